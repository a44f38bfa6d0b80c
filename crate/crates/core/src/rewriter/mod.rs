//! Source-to-source simplification.
//!
//! [`simplify_module`] applies the five [`RewriteRule`]s until none matches.
//! [`run_transforms`] chains user hooks, and [`refine_call_chains`] splits
//! method chains using known return types for temporary names.

mod rules;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::frontend::*;
pub use rules::{apply_rule, RewriteRule, RULES};

pub const PASS_LIMIT: usize = 100;

/// Fresh temporary names: `_ret`, `_ret_1`, `_ret_2`, ...
///
/// Also tracks how often each identifier occurs in the module being
/// rewritten, so rules can tell whether a name is used elsewhere.
#[derive(Debug, Clone)]
pub struct TempNamer {
    pub prefix: String,
    pub counter: usize,
    occurrences: HashMap<String, usize>,
}

impl Default for TempNamer {
    fn default() -> Self {
        TempNamer {
            prefix: "_ret".to_string(),
            counter: 0,
            occurrences: HashMap::new(),
        }
    }
}

impl TempNamer {
    /// Namer that avoids every identifier of `module`.
    pub fn for_module(module: &Module) -> Self {
        TempNamer {
            occurrences: identifier_counts(module),
            ..Default::default()
        }
    }

    pub fn with_prefix(mut self, prefix: &str) -> Self {
        self.prefix = prefix.to_string();
        self
    }

    pub fn occurrences(&self, name: &str) -> usize {
        self.occurrences.get(name).copied().unwrap_or(0)
    }

    pub fn fresh(&mut self) -> String {
        loop {
            let candidate = match self.counter {
                0 => self.prefix.clone(),
                n => format!("{}_{n}", self.prefix),
            };
            self.counter += 1;
            if !self.occurrences.contains_key(&candidate) {
                self.occurrences.insert(candidate.clone(), 1);
                return candidate;
            }
        }
    }

    /// Fresh name `base`, `base_1`, ... outside the main counter sequence.
    pub fn fresh_with(&mut self, base: &str) -> String {
        let candidate = std::iter::once(base.to_string())
            .chain((1..).map(|i| format!("{base}_{i}")))
            .find(|c| !self.occurrences.contains_key(c))
            .expect("unbounded sequence");
        self.occurrences.insert(candidate.clone(), 1);
        candidate
    }
}

/// Occurrence count of every identifier: names, definitions, parameters,
/// import bindings and scope declarations.
pub fn identifier_counts(module: &Module) -> HashMap<String, usize> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut bump = |n: &str| *counts.entry(n.to_string()).or_insert(0) += 1;
    for node in walk(NodeRef::Module(module), Order::Pre) {
        match node {
            NodeRef::Expr(e) => match &e.kind {
                ExprKind::Name(n) => bump(n),
                ExprKind::Lambda { params, .. } => params.all().for_each(|p| bump(&p.name)),
                _ => {}
            },
            NodeRef::Stmt(s) => match &s.kind {
                StmtKind::FunctionDef(f) => {
                    bump(&f.name);
                    f.params.all().for_each(|p| bump(&p.name));
                }
                StmtKind::ClassDef(c) => bump(&c.name),
                StmtKind::Import(names) => names.iter().for_each(|a| bump(a.bound_name(false))),
                StmtKind::ImportFrom { names, .. } => {
                    names.iter().for_each(|a| bump(a.bound_name(true)))
                }
                StmtKind::Global(ns) | StmtKind::Nonlocal(ns) => ns.iter().for_each(|n| bump(n)),
                StmtKind::Try { handlers, .. } => {
                    handlers.iter().flat_map(|h| &h.name).for_each(|n| bump(n))
                }
                _ => {}
            },
            _ => {}
        }
    }
    counts
}

fn first_match(stmt: &Stmt) -> Option<RewriteRule> {
    RULES.iter().copied().find(|r| r.matches(stmt))
}

/// One pass over a statement list: nested bodies first, then the statement
/// itself. Statements produced by a rule are revisited before moving on.
fn rewrite_body(body: Vec<Stmt>, namer: &mut TempNamer, changed: &mut bool) -> Vec<Stmt> {
    let mut work: std::collections::VecDeque<Stmt> = body.into();
    let mut out = Vec::with_capacity(work.len());
    while let Some(mut stmt) = work.pop_front() {
        for b in stmt.bodies_mut() {
            *b = rewrite_body(std::mem::take(b), namer, changed);
        }
        match first_match(&stmt) {
            Some(rule) => {
                *changed = true;
                for s in apply_rule(rule, &stmt, namer).into_iter().rev() {
                    work.push_front(s);
                }
            }
            None => out.push(stmt),
        }
    }
    out
}

/// Apply the rules to a fixpoint.
pub fn simplify_module(module: &Module) -> Result<Module> {
    let mut namer = TempNamer::for_module(module);
    let mut current = module.clone();
    for _ in 0..PASS_LIMIT {
        let mut changed = false;
        current.body = rewrite_body(std::mem::take(&mut current.body), &mut namer, &mut changed);
        if !changed {
            return Ok(current);
        }
    }
    Err(Error::IterationLimit(PASS_LIMIT))
}

/// True when no rule matches any statement of `module`.
pub fn is_simplified(module: &Module) -> bool {
    walk(NodeRef::Module(module), Order::Pre)
        .iter()
        .all(|n| match n {
            NodeRef::Stmt(s) => first_match(s).is_none(),
            _ => true,
        })
}

type HookFn = dyn Fn(Module) -> std::result::Result<Module, String> + Send + Sync;

/// Named user transformation over a whole module.
pub struct TransformHook {
    pub name: String,
    callback: Box<HookFn>,
}

impl TransformHook {
    pub fn new(
        name: impl Into<String>,
        callback: impl Fn(Module) -> std::result::Result<Module, String> + Send + Sync + 'static,
    ) -> Self {
        TransformHook {
            name: name.into(),
            callback: Box::new(callback),
        }
    }
}

impl std::fmt::Debug for TransformHook {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformHook")
            .field("name", &self.name)
            .finish()
    }
}

/// Apply hooks in order. A hook that fails, or whose output does not
/// reparse after unparsing, aborts with the hook's name attached.
pub fn run_transforms(module: &Module, hooks: &[TransformHook]) -> Result<Module> {
    let mut current = module.clone();
    for hook in hooks {
        let hook_err = |message: String| Error::Hook {
            name: hook.name.clone(),
            message,
        };
        current = (hook.callback)(current).map_err(hook_err)?;
        let text = unparse_module(&current);
        parse_module(&text, &hook.name)
            .map_err(|e| hook_err(format!("produced invalid code: {e}")))?;
    }
    Ok(current)
}

/// Split every method-call chain. A temporary whose value has a known type
/// is named `_ret_<type>`; others fall back to `_ret`.
///
/// `return_types` maps a callee to its return type name. Plain calls are
/// looked up by their dotted callee text (`f1`, `mod.f1`); method calls on a
/// typed temporary by `<type>.<method>`.
pub fn refine_call_chains(module: &Module, return_types: &BTreeMap<String, String>) -> Module {
    let mut namer = TempNamer::for_module(module);
    let mut m = module.clone();
    m.body = refine_body(std::mem::take(&mut m.body), return_types, &mut namer);
    m
}

fn refine_body(
    body: Vec<Stmt>,
    types: &BTreeMap<String, String>,
    namer: &mut TempNamer,
) -> Vec<Stmt> {
    let mut out = Vec::with_capacity(body.len());
    for mut stmt in body {
        for b in stmt.bodies_mut() {
            *b = refine_body(std::mem::take(b), types, namer);
        }
        if !RewriteRule::CallChainSplitting.matches(&stmt) {
            out.push(stmt);
            continue;
        }
        let mut known: Vec<Option<String>> = Vec::new();
        let mut name_for = |calls: &[Expr], n: &mut TempNamer| {
            let call = calls.last().expect("at least one call");
            let ty = match &call.kind {
                ExprKind::Call { func, .. } => match &func.kind {
                    ExprKind::Attribute { attr, .. } if calls.len() > 1 => known
                        .last()
                        .cloned()
                        .flatten()
                        .and_then(|recv| types.get(&format!("{recv}.{attr}")).cloned()),
                    _ => func.dotted_name().and_then(|d| types.get(&d).cloned()),
                },
                _ => None,
            };
            let name = match &ty {
                Some(t) => n.fresh_with(&format!("{}_{}", n.prefix, sanitize(t))),
                None => n.fresh(),
            };
            known.push(ty);
            name
        };
        match rules::split_chain(&stmt, &mut name_for, namer) {
            Some(v) => out.extend(v),
            None => out.push(stmt),
        }
    }
    out
}

fn sanitize(type_name: &str) -> String {
    type_name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests;
