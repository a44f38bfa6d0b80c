//! Which local names a statement reads and binds.

use std::collections::BTreeSet;

use crate::frontend::*;

/// A binding made by a statement.
#[derive(Debug, Clone, PartialEq)]
pub struct Def {
    pub name: String,
    /// The value bound, when it is a single expression.
    pub expr: Option<Expr>,
    /// Text describing bindings without an expression.
    pub source: String,
}

/// Names read by `e`, in first-occurrence order. Names bound by lambdas and
/// comprehensions inside `e` are not reads.
pub fn expr_reads(e: &Expr) -> Vec<String> {
    let mut r = Reads::default();
    r.expr(e);
    r.out
}

/// Names a statement reads, excluding nested statement bodies.
pub fn stmt_uses(s: &Stmt) -> Vec<String> {
    let mut r = Reads::default();
    match &s.kind {
        StmtKind::Assign { targets, value } => {
            r.expr(value);
            targets.iter().for_each(|t| r.target(t));
        }
        StmtKind::AugAssign { target, value, .. } => {
            match &target.kind {
                ExprKind::Name(n) => r.push(n),
                _ => r.target(target),
            }
            r.expr(value);
        }
        StmtKind::For { target, iter, .. } => {
            r.expr(iter);
            r.target(target);
        }
        StmtKind::With { items, .. } => {
            for it in items {
                r.expr(&it.context);
                if let Some(v) = &it.vars {
                    r.target(v);
                }
            }
        }
        StmtKind::FunctionDef(f) => {
            f.decorators.iter().for_each(|d| r.expr(d));
            for p in f.params.all() {
                p.default
                    .iter()
                    .chain(p.annotation.iter())
                    .for_each(|x| r.expr(x));
            }
            if let Some(ret) = &f.returns {
                r.expr(ret);
            }
        }
        _ => s.header_exprs().into_iter().for_each(|x| r.expr(x)),
    }
    r.out
}

fn header_text(s: &Stmt) -> String {
    stmt_header(s).trim_end_matches(':').to_string()
}

/// Bindings made by a statement, in binding order.
pub fn stmt_defs(s: &Stmt) -> Vec<Def> {
    let mut out = Vec::new();
    let plain = |name: &str, out: &mut Vec<Def>| {
        out.push(Def {
            name: name.to_string(),
            expr: None,
            source: header_text(s),
        })
    };
    match &s.kind {
        StmtKind::Assign { targets, value } => {
            for t in targets {
                bind(t, Some(value), &header_text(s), &mut out);
            }
        }
        StmtKind::AugAssign { target, op, value } => {
            if let ExprKind::Name(n) = &target.kind {
                let expr = Expr::new(
                    ExprKind::BinOp {
                        left: Box::new(target.clone()),
                        op: *op,
                        right: Box::new(value.clone()),
                    },
                    s.span,
                );
                out.push(Def {
                    name: n.clone(),
                    expr: Some(expr),
                    source: String::new(),
                });
            }
        }
        StmtKind::For { target, .. } => bind(target, None, &header_text(s), &mut out),
        StmtKind::With { items, .. } => {
            for it in items {
                if let Some(v) = &it.vars {
                    bind(v, None, &header_text(s), &mut out);
                }
            }
        }
        StmtKind::Import(names) => names
            .iter()
            .for_each(|a| plain(a.bound_name(false), &mut out)),
        StmtKind::ImportFrom { names, .. } => names
            .iter()
            .filter(|a| a.name != "*")
            .for_each(|a| plain(a.bound_name(true), &mut out)),
        StmtKind::FunctionDef(f) => plain(&f.name, &mut out),
        StmtKind::ClassDef(c) => plain(&c.name, &mut out),
        StmtKind::Try { handlers, .. } => handlers
            .iter()
            .filter_map(|h| h.name.as_deref())
            .for_each(|n| plain(n, &mut out)),
        _ => {}
    }
    out
}

fn bind(target: &Expr, value: Option<&Expr>, source: &str, out: &mut Vec<Def>) {
    match &target.kind {
        ExprKind::Name(n) => out.push(Def {
            name: n.clone(),
            expr: value.cloned(),
            source: source.to_string(),
        }),
        ExprKind::Tuple(ts) | ExprKind::List(ts) => {
            let elementwise = match value.map(|v| &v.kind) {
                Some(ExprKind::Tuple(vs) | ExprKind::List(vs))
                    if vs.len() == ts.len()
                        && !vs
                            .iter()
                            .chain(ts.iter())
                            .any(|x| matches!(x.kind, ExprKind::Starred(_))) =>
                {
                    Some(vs)
                }
                _ => None,
            };
            match elementwise {
                Some(vs) => ts
                    .iter()
                    .zip(vs)
                    .for_each(|(t, v)| bind(t, Some(v), source, out)),
                None => ts.iter().for_each(|t| bind(t, None, source, out)),
            }
        }
        ExprKind::Starred(inner) => bind(inner, None, source, out),
        _ => {}
    }
}

#[derive(Default)]
struct Reads {
    out: Vec<String>,
    seen: BTreeSet<String>,
    scopes: Vec<BTreeSet<String>>,
}

impl Reads {
    fn push(&mut self, n: &str) {
        if self.scopes.iter().any(|s| s.contains(n)) {
            return;
        }
        if self.seen.insert(n.to_string()) {
            self.out.push(n.to_string());
        }
    }

    /// Reads performed while storing to `t`: object and index expressions of
    /// attribute and subscript targets.
    fn target(&mut self, t: &Expr) {
        match &t.kind {
            ExprKind::Name(_) => {}
            ExprKind::Tuple(v) | ExprKind::List(v) => v.iter().for_each(|x| self.target(x)),
            ExprKind::Starred(x) => self.target(x),
            ExprKind::Attribute { value, .. } => self.expr(value),
            ExprKind::Subscript { value, slice } => {
                self.expr(value);
                self.expr(slice);
            }
            _ => self.expr(t),
        }
    }

    fn comprehension(&mut self, gens: &[Comprehension], elts: &[&Expr]) {
        if let Some(first) = gens.first() {
            self.expr(&first.iter);
        }
        let mut bound = Vec::new();
        for g in gens {
            collect_names(&g.target, &mut bound);
        }
        self.scopes.push(bound.into_iter().collect());
        for (i, g) in gens.iter().enumerate() {
            if i > 0 {
                self.expr(&g.iter);
            }
            g.ifs.iter().for_each(|c| self.expr(c));
        }
        elts.iter().for_each(|e| self.expr(e));
        self.scopes.pop();
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Name(n) => self.push(n),
            ExprKind::Lambda { params, body } => {
                for p in params.all() {
                    if let Some(d) = &p.default {
                        self.expr(d);
                    }
                }
                self.scopes.push(params.names().into_iter().collect());
                self.expr(body);
                self.scopes.pop();
            }
            ExprKind::ListComp { elt, generators }
            | ExprKind::SetComp { elt, generators }
            | ExprKind::GeneratorExp { elt, generators } => self.comprehension(generators, &[elt]),
            ExprKind::DictComp {
                key,
                value,
                generators,
            } => self.comprehension(generators, &[key, value]),
            _ => {
                for c in NodeRef::Expr(e).children() {
                    match c {
                        NodeRef::Expr(x) => self.expr(x),
                        NodeRef::Keyword(k) => self.expr(&k.value),
                        _ => {}
                    }
                }
            }
        }
    }
}

fn collect_names(t: &Expr, out: &mut Vec<String>) {
    match &t.kind {
        ExprKind::Name(n) => out.push(n.clone()),
        ExprKind::Tuple(v) | ExprKind::List(v) => v.iter().for_each(|x| collect_names(x, out)),
        ExprKind::Starred(x) => collect_names(x, out),
        _ => {}
    }
}
