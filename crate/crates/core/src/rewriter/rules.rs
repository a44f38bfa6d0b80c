use std::collections::BTreeSet;

use super::TempNamer;
use crate::frontend::*;

/// The five simplification rules. Ids 6 and up are reserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RewriteRule {
    ComprehensionUnfolding = 1,
    NestedCallHandling = 2,
    SubscriptionAssignment = 3,
    LambdaConversion = 4,
    CallChainSplitting = 5,
}

pub const RULES: [RewriteRule; 5] = [
    RewriteRule::ComprehensionUnfolding,
    RewriteRule::NestedCallHandling,
    RewriteRule::SubscriptionAssignment,
    RewriteRule::LambdaConversion,
    RewriteRule::CallChainSplitting,
];

impl RewriteRule {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            RewriteRule::ComprehensionUnfolding => "ComprehensionUnfolding",
            RewriteRule::NestedCallHandling => "NestedCallHandling",
            RewriteRule::SubscriptionAssignment => "SubscriptionAssignment",
            RewriteRule::LambdaConversion => "LambdaConversion",
            RewriteRule::CallChainSplitting => "CallChainSplitting",
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        RULES.iter().copied().find(|r| r.id() == id)
    }

    pub fn matches(self, stmt: &Stmt) -> bool {
        match self {
            RewriteRule::ComprehensionUnfolding => match_comprehension(stmt).is_some(),
            RewriteRule::NestedCallHandling => match_nested_call(stmt).is_some(),
            RewriteRule::SubscriptionAssignment => {
                matches!(stmt_value(stmt).map(|v| &v.kind), Some(ExprKind::Subscript { value, .. }) if value.is_call())
            }
            RewriteRule::LambdaConversion => match_lambda(stmt).is_some(),
            RewriteRule::CallChainSplitting => stmt_value(stmt).is_some_and(|v| chain_links(v) > 0),
        }
    }
}

/// Rewrite `stmt` with `rule`. Returns `vec![stmt]` unchanged when the rule
/// does not match.
pub fn apply_rule(rule: RewriteRule, stmt: &Stmt, namer: &mut TempNamer) -> Vec<Stmt> {
    let out = match rule {
        RewriteRule::ComprehensionUnfolding => unfold_comprehension(stmt, namer),
        RewriteRule::NestedCallHandling => hoist_nested_call(stmt, namer),
        RewriteRule::SubscriptionAssignment => hoist_subscripted_call(stmt, namer),
        RewriteRule::LambdaConversion => convert_lambda(stmt),
        RewriteRule::CallChainSplitting => {
            split_chain(stmt, &mut |_, n: &mut TempNamer| n.fresh(), namer)
        }
    };
    out.unwrap_or_else(|| vec![stmt.clone()])
}

// ---- shared helpers ----------------------------------------------------

/// Right-hand side of a single-value statement (`x = v` or bare `v`).
fn stmt_value(stmt: &Stmt) -> Option<&Expr> {
    match &stmt.kind {
        StmtKind::Assign { value, .. } => Some(value),
        StmtKind::Expr(e) => Some(e),
        _ => None,
    }
}

fn with_value(stmt: &Stmt, value: Expr) -> Stmt {
    let kind = match &stmt.kind {
        StmtKind::Assign { targets, .. } => StmtKind::Assign {
            targets: targets.clone(),
            value,
        },
        _ => StmtKind::Expr(value),
    };
    Stmt::new(kind, stmt.span)
}

fn assign(name: &str, value: Expr, span: Span) -> Stmt {
    Stmt::new(
        StmtKind::Assign {
            targets: vec![Expr::name(name, value.span)],
            value,
        },
        span,
    )
}

fn contains_call(e: &Expr) -> bool {
    sub_exprs(e).iter().any(|x| x.is_call())
}

fn single_name_target(stmt: &Stmt) -> Option<(&str, &Expr)> {
    match &stmt.kind {
        StmtKind::Assign { targets, value } if targets.len() == 1 => {
            Some((targets[0].as_name()?, value))
        }
        _ => None,
    }
}

// ---- rule 1 ------------------------------------------------------------

struct CompParts<'a> {
    target: &'a str,
    kind: &'a ExprKind,
    generators: &'a [Comprehension],
}

fn match_comprehension(stmt: &Stmt) -> Option<CompParts<'_>> {
    let (target, value) = single_name_target(stmt)?;
    let generators = match &value.kind {
        ExprKind::ListComp { generators, .. }
        | ExprKind::SetComp { generators, .. }
        | ExprKind::DictComp { generators, .. } => generators,
        _ => return None,
    };
    let referenced = sub_exprs(value).iter().any(|x| {
        x.as_name() == Some(target) || matches!(x.kind, ExprKind::Yield(_) | ExprKind::YieldFrom(_))
    });
    if referenced {
        return None;
    }
    Some(CompParts {
        target,
        kind: &value.kind,
        generators,
    })
}

fn bound_names(target: &Expr, out: &mut Vec<String>) {
    match &target.kind {
        ExprKind::Name(n) => out.push(n.clone()),
        ExprKind::Tuple(v) | ExprKind::List(v) => v.iter().for_each(|x| bound_names(x, out)),
        ExprKind::Starred(x) => bound_names(x, out),
        _ => {}
    }
}

/// Renames free occurrences of names, stopping where a lambda or an inner
/// comprehension rebinds them.
struct Rename<'a> {
    map: &'a [(String, String)],
    shadowed: Vec<BTreeSet<String>>,
}

impl Rename<'_> {
    fn lookup(&self, n: &str) -> Option<&str> {
        if self.shadowed.iter().any(|s| s.contains(n)) {
            return None;
        }
        self.map
            .iter()
            .find(|(a, _)| a == n)
            .map(|(_, b)| b.as_str())
    }
}

impl VisitMut for Rename<'_> {
    fn visit_expr(&mut self, e: &mut Expr) {
        match &mut e.kind {
            ExprKind::Name(n) => {
                if let Some(new) = self.lookup(n) {
                    *n = new.to_string();
                }
            }
            ExprKind::Lambda { params, body } => {
                for p in [&mut params.posonly, &mut params.args, &mut params.kwonly] {
                    for x in p.iter_mut() {
                        if let Some(d) = &mut x.default {
                            self.visit_expr(d);
                        }
                    }
                }
                self.shadowed.push(params.names().into_iter().collect());
                self.visit_expr(body);
                self.shadowed.pop();
            }
            ExprKind::ListComp { generators, .. }
            | ExprKind::SetComp { generators, .. }
            | ExprKind::GeneratorExp { generators, .. }
            | ExprKind::DictComp { generators, .. } => {
                let mut bound = Vec::new();
                for g in generators.iter() {
                    bound_names(&g.target, &mut bound);
                }
                if let Some(first) = generators.first_mut() {
                    self.visit_expr(&mut first.iter);
                }
                self.shadowed.push(bound.into_iter().collect());
                match &mut e.kind {
                    ExprKind::ListComp { elt, generators }
                    | ExprKind::SetComp { elt, generators }
                    | ExprKind::GeneratorExp { elt, generators } => {
                        self.visit_expr(elt);
                        rename_generators(self, generators);
                    }
                    ExprKind::DictComp {
                        key,
                        value,
                        generators,
                    } => {
                        self.visit_expr(key);
                        self.visit_expr(value);
                        rename_generators(self, generators);
                    }
                    _ => unreachable!(),
                }
                self.shadowed.pop();
            }
            _ => walk_expr_mut(self, e),
        }
    }
}

fn rename_generators(r: &mut Rename<'_>, generators: &mut [Comprehension]) {
    for (i, g) in generators.iter_mut().enumerate() {
        if i > 0 {
            r.visit_expr(&mut g.iter);
        }
        g.ifs.iter_mut().for_each(|x| r.visit_expr(x));
    }
}

fn unfold_comprehension(stmt: &Stmt, namer: &mut TempNamer) -> Option<Vec<Stmt>> {
    let parts = match_comprehension(stmt)?;
    let span = stmt.span;
    let mut generators: Vec<Comprehension> = parts.generators.to_vec();

    // Loop variables leak into the enclosing scope once unfolded, so any that
    // also occur outside this statement get fresh names.
    let mut bound = Vec::new();
    for g in &generators {
        bound_names(&g.target, &mut bound);
    }
    let mut inside = std::collections::HashMap::new();
    for n in walk(NodeRef::Stmt(stmt), Order::Pre) {
        if let NodeRef::Expr(Expr {
            kind: ExprKind::Name(id),
            ..
        }) = n
        {
            *inside.entry(id.as_str()).or_insert(0usize) += 1;
        }
    }
    let mut renames: Vec<(String, String)> = Vec::new();
    for b in &bound {
        if renames.iter().any(|(a, _)| a == b) {
            continue;
        }
        if namer.occurrences(b) > inside.get(b.as_str()).copied().unwrap_or(0) {
            renames.push((b.clone(), namer.fresh()));
        }
    }

    let (mut elt, mut key_value) = (None, None);
    match parts.kind {
        ExprKind::ListComp { elt: e, .. } | ExprKind::SetComp { elt: e, .. } => {
            elt = Some((**e).clone())
        }
        ExprKind::DictComp { key, value, .. } => {
            key_value = Some(((**key).clone(), (**value).clone()))
        }
        _ => return None,
    }
    if !renames.is_empty() {
        let mut r = Rename {
            map: &renames,
            shadowed: Vec::new(),
        };
        for g in &mut generators {
            r.visit_expr(&mut g.target);
        }
        rename_generators(&mut r, &mut generators);
        if let Some(e) = &mut elt {
            r.visit_expr(e);
        }
        if let Some((k, v)) = &mut key_value {
            r.visit_expr(k);
            r.visit_expr(v);
        }
    }

    let target = parts.target;
    let name = |sp: Span| Expr::name(target, sp);
    let call = |func: Expr, args: Vec<Expr>, sp: Span| {
        Expr::new(
            ExprKind::Call {
                func: Box::new(func),
                args,
                keywords: vec![],
            },
            sp,
        )
    };
    let method = |m: &str, sp: Span| {
        Expr::new(
            ExprKind::Attribute {
                value: Box::new(name(sp)),
                attr: m.to_string(),
            },
            sp,
        )
    };
    let (init, innermost) = match parts.kind {
        ExprKind::ListComp { .. } => {
            let e = elt.unwrap();
            let sp = e.span;
            (
                Expr::new(ExprKind::List(vec![]), span),
                Stmt::new(
                    StmtKind::Expr(call(method("append", sp), vec![e], sp)),
                    span,
                ),
            )
        }
        ExprKind::SetComp { .. } => {
            let e = elt.unwrap();
            let sp = e.span;
            (
                call(Expr::name("set", span), vec![], span),
                Stmt::new(StmtKind::Expr(call(method("add", sp), vec![e], sp)), span),
            )
        }
        _ => {
            let (k, v) = key_value.unwrap();
            let sp = k.span;
            let slot = Expr::new(
                ExprKind::Subscript {
                    value: Box::new(name(sp)),
                    slice: Box::new(k),
                },
                sp,
            );
            (
                Expr::new(
                    ExprKind::Dict {
                        keys: vec![],
                        values: vec![],
                    },
                    span,
                ),
                Stmt::new(
                    StmtKind::Assign {
                        targets: vec![slot],
                        value: v,
                    },
                    span,
                ),
            )
        }
    };

    let mut body = vec![innermost];
    for g in generators.into_iter().rev() {
        for cond in g.ifs.into_iter().rev() {
            body = vec![Stmt::new(
                StmtKind::If {
                    test: cond,
                    body,
                    orelse: vec![],
                },
                span,
            )];
        }
        body = vec![Stmt::new(
            StmtKind::For {
                target: g.target,
                iter: g.iter,
                body,
                orelse: vec![],
            },
            span,
        )];
    }
    let mut out = vec![assign(target, init, span)];
    out.extend(body);
    Some(out)
}

// ---- rule 2 ------------------------------------------------------------

#[derive(Clone, Copy)]
enum ArgSlot {
    Positional(usize),
    Starred(usize),
    Keyword(usize),
}

/// Leftmost call-valued argument of the statement's call, provided nothing
/// evaluated before it contains a call.
fn match_nested_call(stmt: &Stmt) -> Option<ArgSlot> {
    let ExprKind::Call {
        func,
        args,
        keywords,
    } = &stmt_value(stmt)?.kind
    else {
        return None;
    };
    if contains_call(func) {
        return None;
    }
    for (i, a) in args.iter().enumerate() {
        match &a.kind {
            ExprKind::Call { .. } => return Some(ArgSlot::Positional(i)),
            ExprKind::Starred(inner) if inner.is_call() => return Some(ArgSlot::Starred(i)),
            _ if contains_call(a) => return None,
            _ => {}
        }
    }
    for (i, k) in keywords.iter().enumerate() {
        if k.value.is_call() {
            return Some(ArgSlot::Keyword(i));
        }
        if contains_call(&k.value) {
            return None;
        }
    }
    None
}

fn hoist_nested_call(stmt: &Stmt, namer: &mut TempNamer) -> Option<Vec<Stmt>> {
    let slot = match_nested_call(stmt)?;
    let mut value = stmt_value(stmt)?.clone();
    let ExprKind::Call { args, keywords, .. } = &mut value.kind else {
        return None;
    };
    let place: &mut Expr = match slot {
        ArgSlot::Positional(i) => &mut args[i],
        ArgSlot::Starred(i) => match &mut args[i].kind {
            ExprKind::Starred(inner) => inner,
            _ => return None,
        },
        ArgSlot::Keyword(i) => &mut keywords[i].value,
    };
    let tmp = namer.fresh();
    let inner = std::mem::replace(place, Expr::name(&tmp, place.span));
    let mut out = Vec::new();
    for s in [assign(&tmp, inner, stmt.span), with_value(stmt, value)] {
        match hoist_nested_call(&s, namer) {
            Some(more) => out.extend(more),
            None => out.push(s),
        }
    }
    Some(out)
}

// ---- rule 3 ------------------------------------------------------------

fn hoist_subscripted_call(stmt: &Stmt, namer: &mut TempNamer) -> Option<Vec<Stmt>> {
    let mut value = stmt_value(stmt)?.clone();
    let ExprKind::Subscript { value: base, .. } = &mut value.kind else {
        return None;
    };
    if !base.is_call() {
        return None;
    }
    let tmp = namer.fresh();
    let sp = base.span;
    let call = std::mem::replace(&mut **base, Expr::name(&tmp, sp));
    Some(vec![assign(&tmp, call, stmt.span), with_value(stmt, value)])
}

// ---- rule 4 ------------------------------------------------------------

fn match_lambda(stmt: &Stmt) -> Option<(&str, &Parameters, &Expr)> {
    let (name, value) = single_name_target(stmt)?;
    match &value.kind {
        ExprKind::Lambda { params, body } => Some((name, params, body)),
        _ => None,
    }
}

fn convert_lambda(stmt: &Stmt) -> Option<Vec<Stmt>> {
    let (name, params, body) = match_lambda(stmt)?;
    let ret = Stmt::new(StmtKind::Return(Some(body.clone())), stmt.span);
    Some(vec![Stmt::new(
        StmtKind::FunctionDef(FunctionDef {
            name: name.to_string(),
            params: params.clone(),
            body: vec![ret],
            decorators: vec![],
            returns: None,
        }),
        stmt.span,
    )])
}

// ---- rule 5 ------------------------------------------------------------

/// Number of calls in `e` whose method receiver is itself a call.
fn chain_links(e: &Expr) -> usize {
    match &e.kind {
        ExprKind::Call { func, .. } => match &func.kind {
            ExprKind::Attribute { value, .. } if value.is_call() => 1 + chain_links(value),
            _ => 0,
        },
        _ => 0,
    }
}

/// Split `a().b().c()` into one statement per call. `name_for` picks the
/// temporary for each intermediate receiver, given the calls hoisted so far
/// (innermost first).
pub(crate) fn split_chain(
    stmt: &Stmt,
    name_for: &mut dyn FnMut(&[Expr], &mut TempNamer) -> String,
    namer: &mut TempNamer,
) -> Option<Vec<Stmt>> {
    let value = stmt_value(stmt)?;
    let links = chain_links(value);
    if links == 0 {
        return None;
    }
    // Peel receivers from the outside in: calls[0] is the innermost.
    let mut calls = Vec::with_capacity(links + 1);
    let mut cur = value.clone();
    loop {
        let receiver = match &mut cur.kind {
            ExprKind::Call { func, .. } => match &mut func.kind {
                ExprKind::Attribute { value, .. } if value.is_call() => {
                    let sp = value.span;
                    Some(std::mem::replace(&mut **value, Expr::name("", sp)))
                }
                _ => None,
            },
            _ => None,
        };
        calls.push(cur);
        match receiver {
            Some(r) => cur = r,
            None => break,
        }
    }
    calls.reverse();

    let mut out = Vec::with_capacity(calls.len());
    let mut prev: Option<String> = None;
    let last = calls.len() - 1;
    for i in 0..calls.len() {
        let mut call = calls[i].clone();
        if let Some(p) = &prev {
            if let ExprKind::Call { func, .. } = &mut call.kind {
                if let ExprKind::Attribute { value, .. } = &mut func.kind {
                    if let ExprKind::Name(n) = &mut value.kind {
                        *n = p.clone();
                    }
                }
            }
        }
        calls[i] = call.clone();
        if i == last {
            out.push(with_value(stmt, call));
        } else {
            let tmp = name_for(&calls[..=i], namer);
            out.push(assign(&tmp, call, stmt.span));
            prev = Some(tmp);
        }
    }
    Some(out)
}
