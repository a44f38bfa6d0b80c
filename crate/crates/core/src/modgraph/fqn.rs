//! Fully qualified names for call targets.

use std::collections::{BTreeMap, BTreeSet};

use crate::frontend::*;
use crate::ssa::stmt_defs;

/// What a local name stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Fqn(String),
    /// Bound, but not to anything with a static name.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Resolved {
    Fqn(String),
    /// The dotted text as written (or unparsed, when not dotted).
    Unresolved(String),
}

impl Resolved {
    pub fn fqn(&self) -> Option<&str> {
        match self {
            Resolved::Fqn(s) => Some(s),
            Resolved::Unresolved(_) => None,
        }
    }
}

/// Python builtins that resolve to `builtins.<name>` when not shadowed.
pub fn builtin_names() -> &'static [&'static str] {
    &[
        "abs",
        "all",
        "any",
        "ascii",
        "bin",
        "bool",
        "bytearray",
        "bytes",
        "callable",
        "chr",
        "classmethod",
        "compile",
        "complex",
        "delattr",
        "dict",
        "dir",
        "divmod",
        "enumerate",
        "eval",
        "exec",
        "filter",
        "float",
        "format",
        "frozenset",
        "getattr",
        "globals",
        "hasattr",
        "hash",
        "help",
        "hex",
        "id",
        "input",
        "int",
        "isinstance",
        "issubclass",
        "iter",
        "len",
        "list",
        "locals",
        "map",
        "max",
        "memoryview",
        "min",
        "next",
        "object",
        "oct",
        "open",
        "ord",
        "pow",
        "print",
        "property",
        "range",
        "repr",
        "reversed",
        "round",
        "set",
        "setattr",
        "slice",
        "sorted",
        "staticmethod",
        "str",
        "sum",
        "super",
        "tuple",
        "type",
        "vars",
        "zip",
        "Exception",
        "ValueError",
        "TypeError",
        "KeyError",
        "IndexError",
        "RuntimeError",
        "StopIteration",
        "NotImplementedError",
        "AttributeError",
        "ZeroDivisionError",
    ]
}

/// Name bindings visible in one scope.
#[derive(Debug, Clone, Default)]
pub struct NameContext {
    /// Dotted name of the enclosing module.
    pub module: String,
    /// Package relative imports are anchored at.
    pub package: String,
    /// Top-level package name of the project, if any.
    pub root: Option<String>,
    /// Module and package names of the project.
    pub project: BTreeSet<String>,
    pub bindings: BTreeMap<String, Binding>,
    /// A `from m import *` is in scope, so unbound names may come from it.
    pub wildcard: bool,
}

/// How one definition in a scope binds its name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Source {
    Fqn(String),
    Alias(String),
    Unknown,
}

impl NameContext {
    /// Context for a module body. `is_package` is true for `__init__`
    /// modules.
    pub fn for_module(module_name: &str, is_package: bool, body: &Module) -> NameContext {
        NameContext::project_module(module_name, is_package, body, None, &BTreeSet::new())
    }

    /// Like [`NameContext::for_module`], with imports of project modules
    /// written relative to the project root qualified by `root`.
    pub fn project_module(
        module_name: &str,
        is_package: bool,
        body: &Module,
        root: Option<&str>,
        project: &BTreeSet<String>,
    ) -> NameContext {
        let package = if is_package {
            module_name.to_string()
        } else {
            module_name
                .rsplit_once('.')
                .map(|(p, _)| p.to_string())
                .unwrap_or_default()
        };
        let base = NameContext {
            module: module_name.to_string(),
            package,
            root: root.map(str::to_string),
            project: project.clone(),
            bindings: BTreeMap::new(),
            wildcard: false,
        };
        base.scope(&body.body, module_name, &[])
    }

    /// Context for a nested scope whose definitions are qualified by
    /// `prefix`. `params` shadow outer bindings.
    pub fn scope(&self, body: &[Stmt], prefix: &str, params: &[String]) -> NameContext {
        let mut sources: BTreeMap<String, BTreeSet<Source>> = BTreeMap::new();
        let mut globals = BTreeSet::new();
        let mut wildcard = false;
        for p in params {
            sources
                .entry(p.clone())
                .or_default()
                .insert(Source::Unknown);
        }
        self.collect(body, prefix, &mut sources, &mut globals, &mut wildcard);

        let mut ctx = self.clone();
        ctx.wildcard |= wildcard;
        let mut aliases = Vec::new();
        for (name, srcs) in sources {
            if globals.contains(&name) {
                continue;
            }
            let mut it = srcs.into_iter();
            match (it.next(), it.next()) {
                (Some(Source::Fqn(f)), None) => {
                    ctx.bindings.insert(name, Binding::Fqn(f));
                }
                (Some(Source::Alias(t)), None) if t.split('.').next() != Some(name.as_str()) => {
                    ctx.bindings.insert(name.clone(), Binding::Unknown);
                    aliases.push((name, t));
                }
                _ => {
                    ctx.bindings.insert(name, Binding::Unknown);
                }
            }
        }
        // Alias chains settle within as many rounds as there are aliases.
        for _ in 0..=aliases.len() {
            let mut changed = false;
            for (name, target) in &aliases {
                let b = match resolve_dotted(target, &ctx) {
                    Resolved::Fqn(f) => Binding::Fqn(f),
                    Resolved::Unresolved(_) => Binding::Unknown,
                };
                if ctx.bindings.get(name) != Some(&b) {
                    ctx.bindings.insert(name.clone(), b);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        ctx
    }

    fn collect(
        &self,
        body: &[Stmt],
        prefix: &str,
        sources: &mut BTreeMap<String, BTreeSet<Source>>,
        globals: &mut BTreeSet<String>,
        wildcard: &mut bool,
    ) {
        fn add(sources: &mut BTreeMap<String, BTreeSet<Source>>, name: &str, s: Source) {
            sources.entry(name.to_string()).or_default().insert(s);
        }
        for s in body {
            match &s.kind {
                StmtKind::Import(names) => {
                    for a in names {
                        let imported = match &a.asname {
                            Some(_) => a.name.clone(),
                            None => a.name.split('.').next().unwrap_or(&a.name).to_string(),
                        };
                        add(
                            sources,
                            a.bound_name(false),
                            Source::Fqn(self.absolute(&imported)),
                        );
                    }
                }
                StmtKind::ImportFrom {
                    module,
                    names,
                    level,
                } => {
                    let base = if *level == 0 {
                        module.as_deref().map(|m| self.absolute(m))
                    } else {
                        self.relative(*level, module.as_deref())
                    };
                    for a in names {
                        if a.name == "*" {
                            *wildcard = true;
                            continue;
                        }
                        let src = match &base {
                            Some(b) => Source::Fqn(format!("{b}.{}", a.name)),
                            None => Source::Unknown,
                        };
                        add(sources, a.bound_name(true), src);
                    }
                }
                StmtKind::FunctionDef(f) => add(
                    sources,
                    &f.name,
                    Source::Fqn(format!("{prefix}.{}", f.name)),
                ),
                StmtKind::ClassDef(c) => add(
                    sources,
                    &c.name,
                    Source::Fqn(format!("{prefix}.{}", c.name)),
                ),
                StmtKind::Assign { targets, value } => {
                    for t in targets {
                        match (&t.kind, value.dotted_name()) {
                            (ExprKind::Name(n), Some(d)) => add(sources, n, Source::Alias(d)),
                            _ => {
                                for d in stmt_defs(&Stmt::new(
                                    StmtKind::Assign {
                                        targets: vec![t.clone()],
                                        value: value.clone(),
                                    },
                                    s.span,
                                )) {
                                    add(sources, &d.name, Source::Unknown);
                                }
                            }
                        }
                    }
                }
                StmtKind::Global(ns) | StmtKind::Nonlocal(ns) => globals.extend(ns.iter().cloned()),
                _ => {
                    for d in stmt_defs(s) {
                        add(sources, &d.name, Source::Unknown);
                    }
                }
            }
            if !matches!(s.kind, StmtKind::FunctionDef(_) | StmtKind::ClassDef(_)) {
                for b in s.bodies() {
                    self.collect(b, prefix, sources, globals, wildcard);
                }
            }
        }
    }

    /// Qualify an absolute module path written inside the project root.
    fn absolute(&self, dotted: &str) -> String {
        let first = dotted.split('.').next().unwrap_or(dotted);
        match &self.root {
            Some(r)
                if !self.project.contains(first)
                    && self.project.contains(&format!("{r}.{first}")) =>
            {
                format!("{r}.{dotted}")
            }
            _ => dotted.to_string(),
        }
    }

    fn relative(&self, level: u32, module: Option<&str>) -> Option<String> {
        let mut base = self.package.clone();
        for _ in 1..level {
            base = base.rsplit_once('.')?.0.to_string();
        }
        if base.is_empty() {
            return None;
        }
        Some(match module {
            Some(m) => format!("{base}.{m}"),
            None => base,
        })
    }
}

fn resolve_dotted(dotted: &str, ctx: &NameContext) -> Resolved {
    let (first, rest) = match dotted.split_once('.') {
        Some((f, r)) => (f, Some(r)),
        None => (dotted, None),
    };
    let join = |base: &str| match rest {
        Some(r) => format!("{base}.{r}"),
        None => base.to_string(),
    };
    match ctx.bindings.get(first) {
        Some(Binding::Fqn(f)) => Resolved::Fqn(join(f)),
        Some(Binding::Unknown) => Resolved::Unresolved(dotted.to_string()),
        None if !ctx.wildcard && builtin_names().contains(&first) => {
            Resolved::Fqn(join(&format!("builtins.{first}")))
        }
        None => Resolved::Unresolved(dotted.to_string()),
    }
}

/// Qualify a `Name`/`Attribute` chain by substituting the binding of its
/// root name.
pub fn resolve_fqn(expr: &Expr, ctx: &NameContext) -> Resolved {
    match expr.dotted_name() {
        Some(d) => resolve_dotted(&d, ctx),
        None => Resolved::Unresolved(unparse_expr(expr)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallSite {
    pub span: Span,
    /// Callee as written.
    pub syntactic: String,
    pub resolved: Resolved,
}

/// Every call in `module`, in source order, with its callee qualified in
/// the scope the call appears in.
pub fn call_sites(module: &Module, ctx: &NameContext) -> Vec<CallSite> {
    let mut out = Vec::new();
    stmts(&module.body, ctx, &ctx.module.clone(), &mut out);
    out.sort_by_key(|c| {
        (
            c.span.start_line,
            c.span.start_col,
            c.span.end_line,
            c.span.end_col,
        )
    });
    out
}

fn stmts(body: &[Stmt], ctx: &NameContext, prefix: &str, out: &mut Vec<CallSite>) {
    for s in body {
        for e in s.header_exprs() {
            expr(e, ctx, &mut Vec::new(), out);
        }
        match &s.kind {
            StmtKind::FunctionDef(f) => {
                let inner_prefix = format!("{prefix}.{}", f.name);
                let inner = ctx.scope(&f.body, &inner_prefix, &f.params.names());
                stmts(&f.body, &inner, &inner_prefix, out);
            }
            StmtKind::ClassDef(c) => {
                // Class-level names are not visible inside methods.
                let class_prefix = format!("{prefix}.{}", c.name);
                let class_ctx = ctx.scope(&c.body, &class_prefix, &[]);
                for s in &c.body {
                    match &s.kind {
                        StmtKind::FunctionDef(f) => {
                            for e in s.header_exprs() {
                                expr(e, &class_ctx, &mut Vec::new(), out);
                            }
                            let p = format!("{class_prefix}.{}", f.name);
                            let inner = ctx.scope(&f.body, &p, &f.params.names());
                            stmts(&f.body, &inner, &p, out);
                        }
                        _ => stmts(std::slice::from_ref(s), &class_ctx, &class_prefix, out),
                    }
                }
            }
            _ => {
                for b in s.bodies() {
                    stmts(b, ctx, prefix, out);
                }
            }
        }
    }
}

fn bound_in(t: &Expr, out: &mut BTreeSet<String>) {
    match &t.kind {
        ExprKind::Name(n) => {
            out.insert(n.clone());
        }
        ExprKind::Tuple(v) | ExprKind::List(v) => v.iter().for_each(|x| bound_in(x, out)),
        ExprKind::Starred(x) => bound_in(x, out),
        _ => {}
    }
}

fn expr(e: &Expr, ctx: &NameContext, shadow: &mut Vec<BTreeSet<String>>, out: &mut Vec<CallSite>) {
    match &e.kind {
        ExprKind::Call { func, .. } => {
            let syntactic = func.dotted_name().unwrap_or_else(|| unparse_expr(func));
            let root = syntactic.split('.').next().unwrap_or("");
            let resolved =
                if func.dotted_name().is_some() && shadow.iter().any(|s| s.contains(root)) {
                    Resolved::Unresolved(syntactic.clone())
                } else {
                    resolve_fqn(func, ctx)
                };
            out.push(CallSite {
                span: e.span,
                syntactic,
                resolved,
            });
        }
        ExprKind::Lambda { params, body } => {
            for p in params.all() {
                if let Some(d) = &p.default {
                    expr(d, ctx, shadow, out);
                }
            }
            shadow.push(params.names().into_iter().collect());
            expr(body, ctx, shadow, out);
            shadow.pop();
            return;
        }
        ExprKind::ListComp { generators, .. }
        | ExprKind::SetComp { generators, .. }
        | ExprKind::GeneratorExp { generators, .. }
        | ExprKind::DictComp { generators, .. } => {
            let mut names = BTreeSet::new();
            generators
                .iter()
                .for_each(|g| bound_in(&g.target, &mut names));
            if let Some(g) = generators.first() {
                expr(&g.iter, ctx, shadow, out);
            }
            shadow.push(names);
            for c in NodeRef::Expr(e).children() {
                if let NodeRef::Expr(x) = c {
                    if generators.first().is_some_and(|g| std::ptr::eq(x, &g.iter)) {
                        continue;
                    }
                    expr(x, ctx, shadow, out);
                }
            }
            shadow.pop();
            return;
        }
        _ => {}
    }
    for c in NodeRef::Expr(e).children() {
        match c {
            NodeRef::Expr(x) => expr(x, ctx, shadow, out),
            NodeRef::Keyword(k) => expr(&k.value, ctx, shadow, out),
            _ => {}
        }
    }
}
