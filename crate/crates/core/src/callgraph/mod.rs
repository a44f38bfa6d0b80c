//! Call graphs from propagating callable values to a fixpoint.
//!
//! Every name, parameter and return value in every namespace holds a set of
//! values (functions, classes, modules, instances, external names). Each
//! round re-evaluates every scope body against the current sets; calls found
//! along the way add edges and feed arguments into parameters. Rounds repeat
//! until neither the sets nor the edges grow.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::rc::Rc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frontend::*;
use crate::modgraph::{
    build_dir_tree, builtin_names, parse_imports, Diagnostic, Resolver, Target, TreeNode,
};
use crate::ssa::stmt_defs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Module,
    Function,
    Class,
    External,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Module => "module",
            NodeKind::Function => "function",
            NodeKind::Class => "class",
            NodeKind::External => "external",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CgNode {
    pub fqn: String,
    pub kind: NodeKind,
}

/// Final value sets, keyed `namespace.name` (returns as
/// `namespace.<return>`), and the name-to-name flows seen while computing
/// them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssignmentGraph {
    pub value_sets: BTreeMap<String, BTreeSet<String>>,
    pub flows: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone, Default)]
pub struct CallGraph {
    pub nodes: BTreeMap<String, NodeKind>,
    pub edges: BTreeMap<String, BTreeSet<String>>,
    pub internal_mods: BTreeSet<String>,
    pub external_mods: BTreeSet<String>,
    pub assignment: AssignmentGraph,
    pub diagnostics: Vec<Diagnostic>,
    pub parse_errors: Vec<ParseError>,
    /// Propagation rounds until the fixpoint.
    pub rounds: usize,
}

impl CallGraph {
    pub fn node_list(&self) -> Vec<CgNode> {
        self.nodes
            .iter()
            .map(|(f, k)| CgNode {
                fqn: f.clone(),
                kind: *k,
            })
            .collect()
    }

    pub fn callees(&self, fqn: &str) -> Vec<&str> {
        self.edges
            .get(fqn)
            .map(|s| s.iter().map(String::as_str).collect())
            .unwrap_or_default()
    }
}

/// All edges, sorted.
pub fn output_edges(cg: &CallGraph) -> Vec<(String, String)> {
    cg.edges
        .iter()
        .flat_map(|(a, bs)| bs.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// Internal and external module names, sorted.
pub fn output_mods(cg: &CallGraph) -> (Vec<String>, Vec<String>) {
    (
        cg.internal_mods.iter().cloned().collect(),
        cg.external_mods.iter().cloned().collect(),
    )
}

/// Every node mapped to its sorted callees, with sorted keys, two-space
/// indentation and a trailing newline.
pub fn to_simple_json(cg: &CallGraph) -> String {
    let map: BTreeMap<&str, Vec<&str>> = cg
        .nodes
        .keys()
        .map(|n| (n.as_str(), cg.callees(n)))
        .collect();
    let mut s = serde_json::to_string_pretty(&map).expect("string map serializes");
    s.push('\n');
    s
}

/// One `caller -> callee` line per edge.
pub fn to_edge_lines(cg: &CallGraph) -> String {
    output_edges(cg)
        .into_iter()
        .map(|(a, b)| format!("{a} -> {b}\n"))
        .collect()
}

/// Analyze the modules reachable from `entry_points`. With a package root,
/// modules are named from the root directory and entries may be given
/// relative to it; every module of the package is an entry when none are
/// given. Without one, each entry is a standalone module named by its stem.
pub fn analyze(entry_points: &[PathBuf], package_root: Option<&Path>) -> Result<CallGraph> {
    let (tree, entries) = match package_root {
        Some(root) => {
            let tree = build_dir_tree(root)?;
            let canon_root = std::fs::canonicalize(root).map_err(|source| Error::Io {
                path: root.to_path_buf(),
                source,
            })?;
            let mut entries = Vec::new();
            for e in entry_points {
                let path = if e.exists() { e.clone() } else { root.join(e) };
                let canon = std::fs::canonicalize(&path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                if !canon.is_file() {
                    return Err(Error::NotAFile(path));
                }
                entries.push(module_name_for_path(&canon_root, &canon)?);
            }
            if entries.is_empty() {
                entries = tree
                    .source_nodes()
                    .iter()
                    .map(|n| n.full_name.clone())
                    .collect();
            }
            (tree, entries)
        }
        None => {
            let mut children = Vec::new();
            for e in entry_points {
                let text = read_source(e)?;
                let stem = e
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let (module, parse_error) = match parse_module(&text, &e.display().to_string()) {
                    Ok(m) => (Some(m), None),
                    Err(err) => (None, Some(err)),
                };
                children.push(TreeNode {
                    name: stem.clone(),
                    full_name: stem,
                    path: e.clone(),
                    children: Vec::new(),
                    module,
                    parse_error,
                    is_source: true,
                });
            }
            children.sort_by(|a, b| a.full_name.cmp(&b.full_name));
            children.dedup_by(|a, b| a.full_name == b.full_name);
            let entries = children.iter().map(|c| c.full_name.clone()).collect();
            (standalone_tree(children), entries)
        }
    };
    Ok(analyze_tree(&tree, &entries))
}

fn standalone_tree(children: Vec<TreeNode>) -> TreeNode {
    TreeNode {
        name: String::new(),
        full_name: String::new(),
        path: PathBuf::new(),
        children,
        module: None,
        parse_error: None,
        is_source: false,
    }
}

/// Analyze one standalone module given as text.
pub fn analyze_source(name: &str, text: &str) -> std::result::Result<CallGraph, ParseError> {
    let module = parse_module(text, &format!("{name}.py"))?;
    let tree = standalone_tree(vec![TreeNode {
        name: name.to_string(),
        full_name: name.to_string(),
        path: PathBuf::from(format!("{name}.py")),
        children: Vec::new(),
        module: Some(module),
        parse_error: None,
        is_source: true,
    }]);
    Ok(analyze_tree(&tree, &[name.to_string()]))
}

/// Analyze the modules of `tree` reachable by imports from `entries`.
pub fn analyze_tree(tree: &TreeNode, entries: &[String]) -> CallGraph {
    let resolver = Resolver::new(tree);
    let (dict, _) = parse_imports(tree);
    let mut reached: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<String> = entries.iter().cloned().collect();
    let mut external = BTreeSet::new();
    while let Some(m) = queue.pop_front() {
        if !resolver.sources.contains(&m) || !reached.insert(m.clone()) {
            continue;
        }
        for r in dict.get(&m).into_iter().flatten() {
            if !r.internal {
                external.insert(r.imported_module.clone());
                continue;
            }
            let mut name = r.imported_module.as_str();
            loop {
                queue.push_back(name.to_string());
                match name.rsplit_once('.') {
                    Some((p, _)) => name = p,
                    None => break,
                }
            }
        }
    }

    let mut an = Analyzer::new(resolver);
    let mut cg = CallGraph::default();
    for node in tree.source_nodes() {
        if !reached.contains(&node.full_name) {
            continue;
        }
        match (&node.module, &node.parse_error) {
            (Some(m), _) => an.add_module(node, m),
            (None, Some(e)) => cg.parse_errors.push(e.clone()),
            _ => {}
        }
    }
    cg.rounds = an.run();
    for (fqn, kind) in &an.kinds {
        cg.nodes.insert(fqn.clone(), *kind);
    }
    for (a, b) in &an.edges {
        cg.nodes.entry(b.clone()).or_insert(NodeKind::External);
        cg.edges.entry(a.clone()).or_default().insert(b.clone());
    }
    cg.internal_mods = reached;
    cg.external_mods = external;
    cg.assignment = an.assignment_graph();
    cg.diagnostics = an.diagnostics.into_iter().collect();
    cg
}

/// C3 linearization of `c` given its direct bases. Inconsistent or cyclic
/// hierarchies fall back to a depth-first order without repeats.
pub(crate) fn c3_linearize(c: &str, bases: &dyn Fn(&str) -> Vec<String>) -> Vec<String> {
    fn go(c: &str, bases: &dyn Fn(&str) -> Vec<String>, stack: &mut Vec<String>) -> Vec<String> {
        if stack.iter().any(|s| s == c) {
            return vec![c.to_string()];
        }
        stack.push(c.to_string());
        let direct = bases(c);
        let mut seqs: Vec<Vec<String>> = direct.iter().map(|b| go(b, bases, stack)).collect();
        stack.pop();
        seqs.push(direct);
        let mut fallback = vec![c.to_string()];
        for x in seqs.iter().flatten() {
            if !fallback.contains(x) {
                fallback.push(x.clone());
            }
        }
        let mut out = vec![c.to_string()];
        loop {
            seqs.retain(|s| !s.is_empty());
            if seqs.is_empty() {
                return out;
            }
            let head = seqs
                .iter()
                .map(|s| s[0].clone())
                .find(|h| !seqs.iter().any(|s| s[1..].contains(h)));
            let Some(h) = head else { return fallback };
            for s in seqs.iter_mut() {
                if s[0] == h {
                    s.remove(0);
                }
            }
            out.push(h);
        }
    }
    go(c, bases, &mut Vec::new())
}

const RETURN: &str = "<return>";
const ROUND_LIMIT: usize = 10_000;
const EXTERNAL_DEPTH: usize = 8;

type Slot = (String, String);
type Values = BTreeSet<Value>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Value {
    /// A function, class or module.
    Def(String),
    Instance(String),
    External(String),
    Builtin(String),
    /// Function with its first parameter already bound.
    Bound(String, Box<Value>),
    /// `super()` inside class `.0`, for an object of class `.1`.
    Super(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScopeKind {
    Module,
    Function,
    Class,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Plain,
    Static,
    ClassMethod,
    Property,
}

#[derive(Debug, Clone)]
enum Body {
    Stmts(Rc<Vec<Stmt>>),
    Expr(Rc<Expr>),
}

#[derive(Debug, Clone)]
struct Scope {
    fqn: String,
    kind: ScopeKind,
    module: String,
    /// Scope consulted for names not bound here; class scopes are skipped.
    parent: Option<usize>,
    locals: BTreeSet<String>,
    globals: BTreeSet<String>,
    nonlocals: BTreeSet<String>,
    params: Parameters,
    /// Enclosing class, for methods.
    method_of: Option<String>,
    flavor: Flavor,
    /// Project modules star-imported into this scope.
    wildcards: Vec<String>,
    bases: usize,
    body: Body,
}

struct Analyzer {
    resolver: Resolver,
    scopes: Vec<Scope>,
    by_fqn: BTreeMap<String, Vec<usize>>,
    kinds: BTreeMap<String, NodeKind>,
    packages: BTreeMap<String, String>,
    values: BTreeMap<Slot, Values>,
    edges: BTreeSet<(String, String)>,
    flows: BTreeSet<(Slot, Slot)>,
    diagnostics: BTreeSet<Diagnostic>,
    changed: bool,
}

fn decorator_flavor(decorators: &[Expr]) -> Flavor {
    for d in decorators {
        match d.dotted_name().as_deref() {
            Some("staticmethod") => return Flavor::Static,
            Some("classmethod") => return Flavor::ClassMethod,
            Some(n)
                if n == "property"
                    || n.ends_with(".setter")
                    || n.ends_with(".getter")
                    || n.ends_with(".deleter") =>
            {
                return Flavor::Property
            }
            _ => {}
        }
    }
    Flavor::Plain
}

fn comprehension_targets(e: &Expr, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Lambda { params, .. } => {
            for p in params.all() {
                if let Some(d) = &p.default {
                    comprehension_targets(d, out);
                }
            }
            return;
        }
        ExprKind::ListComp { generators, .. }
        | ExprKind::SetComp { generators, .. }
        | ExprKind::GeneratorExp { generators, .. }
        | ExprKind::DictComp { generators, .. } => {
            for g in generators {
                out.extend(
                    stmt_defs(&Stmt::new(
                        StmtKind::For {
                            target: g.target.clone(),
                            iter: g.iter.clone(),
                            body: Vec::new(),
                            orelse: Vec::new(),
                        },
                        e.span,
                    ))
                    .into_iter()
                    .map(|d| d.name),
                );
            }
        }
        _ => {}
    }
    for c in NodeRef::Expr(e).children() {
        match c {
            NodeRef::Expr(x) => comprehension_targets(x, out),
            NodeRef::Keyword(k) => comprehension_targets(&k.value, out),
            _ => {}
        }
    }
}

fn op_dunder(op: BinOpKind) -> &'static str {
    match op {
        BinOpKind::Add => "__add__",
        BinOpKind::Sub => "__sub__",
        BinOpKind::Mult => "__mul__",
        BinOpKind::Div => "__truediv__",
        BinOpKind::FloorDiv => "__floordiv__",
        BinOpKind::Mod => "__mod__",
        BinOpKind::Pow => "__pow__",
        BinOpKind::MatMult => "__matmul__",
        BinOpKind::LShift => "__lshift__",
        BinOpKind::RShift => "__rshift__",
        BinOpKind::BitOr => "__or__",
        BinOpKind::BitAnd => "__and__",
        BinOpKind::BitXor => "__xor__",
    }
}

fn cmp_dunders(op: CmpOp) -> &'static [&'static str] {
    match op {
        CmpOp::Eq => &["__eq__"],
        CmpOp::NotEq => &["__ne__", "__eq__"],
        CmpOp::Lt => &["__lt__", "__gt__"],
        CmpOp::LtE => &["__le__", "__ge__"],
        CmpOp::Gt => &["__gt__", "__lt__"],
        CmpOp::GtE => &["__ge__", "__le__"],
        _ => &[],
    }
}

impl Analyzer {
    fn new(resolver: Resolver) -> Self {
        Analyzer {
            resolver,
            scopes: Vec::new(),
            by_fqn: BTreeMap::new(),
            kinds: BTreeMap::new(),
            packages: BTreeMap::new(),
            values: BTreeMap::new(),
            edges: BTreeSet::new(),
            flows: BTreeSet::new(),
            diagnostics: BTreeSet::new(),
            changed: false,
        }
    }

    // ---- extraction ----

    fn add_module(&mut self, node: &TreeNode, module: &Module) {
        let name = node.full_name.clone();
        self.packages.insert(name.clone(), node.package());
        self.kinds.insert(name.clone(), NodeKind::Module);
        let idx = self.push_scope(Scope {
            fqn: name.clone(),
            kind: ScopeKind::Module,
            module: name,
            parent: None,
            locals: BTreeSet::new(),
            globals: BTreeSet::new(),
            nonlocals: BTreeSet::new(),
            params: Parameters::default(),
            method_of: None,
            flavor: Flavor::Plain,
            wildcards: Vec::new(),
            bases: 0,
            body: Body::Stmts(Rc::new(module.body.clone())),
        });
        self.extract(&module.body, idx);
    }

    fn push_scope(&mut self, mut scope: Scope) -> usize {
        let idx = self.scopes.len();
        match &scope.body {
            Body::Stmts(b) => {
                let b = b.clone();
                self.collect_locals(&b, &mut scope);
            }
            Body::Expr(e) => comprehension_targets(e, &mut scope.locals),
        }
        scope.locals.extend(scope.params.names());
        self.by_fqn.entry(scope.fqn.clone()).or_default().push(idx);
        self.scopes.push(scope);
        idx
    }

    fn collect_locals(&self, body: &[Stmt], scope: &mut Scope) {
        for s in body {
            match &s.kind {
                StmtKind::Global(ns) => scope.globals.extend(ns.iter().cloned()),
                StmtKind::Nonlocal(ns) => scope.nonlocals.extend(ns.iter().cloned()),
                StmtKind::ImportFrom {
                    module,
                    names,
                    level,
                } if names.iter().any(|a| a.name == "*") => {
                    if let Target::Node(m) =
                        self.import_base(&scope.module, *level, module.as_deref())
                    {
                        scope.wildcards.push(m);
                    }
                }
                _ => {}
            }
            scope
                .locals
                .extend(stmt_defs(s).into_iter().map(|d| d.name));
            for e in s.header_exprs() {
                comprehension_targets(e, &mut scope.locals);
            }
            if !matches!(s.kind, StmtKind::FunctionDef(_) | StmtKind::ClassDef(_)) {
                for b in s.bodies() {
                    self.collect_locals(b, scope);
                }
            }
        }
    }

    fn child_parent(&self, owner: usize) -> Option<usize> {
        if self.scopes[owner].kind == ScopeKind::Class {
            self.scopes[owner].parent
        } else {
            Some(owner)
        }
    }

    fn extract(&mut self, body: &[Stmt], owner: usize) {
        for s in body {
            for e in s.header_exprs() {
                self.extract_lambdas(e, owner);
            }
            let parent = self.child_parent(owner);
            let prefix = self.scopes[owner].fqn.clone();
            let module = self.scopes[owner].module.clone();
            match &s.kind {
                StmtKind::FunctionDef(f) => {
                    let fqn = format!("{prefix}.{}", f.name);
                    self.kinds.entry(fqn.clone()).or_insert(NodeKind::Function);
                    let method_of = (self.scopes[owner].kind == ScopeKind::Class)
                        .then(|| self.scopes[owner].fqn.clone());
                    let idx = self.push_scope(Scope {
                        fqn,
                        kind: ScopeKind::Function,
                        module,
                        parent,
                        locals: BTreeSet::new(),
                        globals: BTreeSet::new(),
                        nonlocals: BTreeSet::new(),
                        params: f.params.clone(),
                        method_of,
                        flavor: decorator_flavor(&f.decorators),
                        wildcards: Vec::new(),
                        bases: 0,
                        body: Body::Stmts(Rc::new(f.body.clone())),
                    });
                    self.extract(&f.body, idx);
                }
                StmtKind::ClassDef(c) => {
                    let fqn = format!("{prefix}.{}", c.name);
                    self.kinds.entry(fqn.clone()).or_insert(NodeKind::Class);
                    let idx = self.push_scope(Scope {
                        fqn,
                        kind: ScopeKind::Class,
                        module,
                        parent,
                        locals: BTreeSet::new(),
                        globals: BTreeSet::new(),
                        nonlocals: BTreeSet::new(),
                        params: Parameters::default(),
                        method_of: None,
                        flavor: Flavor::Plain,
                        wildcards: Vec::new(),
                        bases: c.bases.len(),
                        body: Body::Stmts(Rc::new(c.body.clone())),
                    });
                    self.extract(&c.body, idx);
                }
                _ => {
                    for b in s.bodies() {
                        self.extract(b, owner);
                    }
                }
            }
        }
    }

    fn extract_lambdas(&mut self, e: &Expr, owner: usize) {
        if let ExprKind::Lambda { params, body } = &e.kind {
            for p in params.all() {
                if let Some(d) = &p.default {
                    self.extract_lambdas(d, owner);
                }
            }
            let fqn = format!("{}.<lambda>", self.scopes[owner].fqn);
            self.kinds.entry(fqn.clone()).or_insert(NodeKind::Function);
            let idx = self.push_scope(Scope {
                fqn,
                kind: ScopeKind::Lambda,
                module: self.scopes[owner].module.clone(),
                parent: self.child_parent(owner),
                locals: BTreeSet::new(),
                globals: BTreeSet::new(),
                nonlocals: BTreeSet::new(),
                params: (**params).clone(),
                method_of: None,
                flavor: Flavor::Plain,
                wildcards: Vec::new(),
                bases: 0,
                body: Body::Expr(Rc::new((**body).clone())),
            });
            self.extract_lambdas(body, idx);
            return;
        }
        for c in NodeRef::Expr(e).children() {
            match c {
                NodeRef::Expr(x) => self.extract_lambdas(x, owner),
                NodeRef::Keyword(k) => self.extract_lambdas(&k.value, owner),
                _ => {}
            }
        }
    }

    fn import_base(&self, module: &str, level: u32, name: Option<&str>) -> Target {
        if level == 0 {
            self.resolver.absolute(name.unwrap_or(""))
        } else {
            let package = self.packages.get(module).cloned().unwrap_or_default();
            self.resolver.relative(&package, level, name)
        }
    }

    // ---- fixpoint ----

    fn run(&mut self) -> usize {
        let mut rounds = 0;
        loop {
            self.changed = false;
            for i in 0..self.scopes.len() {
                match self.scopes[i].body.clone() {
                    Body::Stmts(b) => self.stmts(&b, i),
                    Body::Expr(e) => {
                        let v = self.eval(&e, i);
                        let slot = (self.scopes[i].fqn.clone(), RETURN.to_string());
                        self.add(slot, v);
                    }
                }
            }
            rounds += 1;
            if !self.changed {
                return rounds;
            }
            if rounds >= ROUND_LIMIT {
                self.diag(0, 0, "propagation stopped before a fixpoint".to_string());
                return rounds;
            }
        }
    }

    fn add(&mut self, slot: Slot, vals: Values) {
        if vals.is_empty() {
            return;
        }
        let cur = self.values.entry(slot).or_default();
        for v in vals {
            if cur.insert(v) {
                self.changed = true;
            }
        }
    }

    fn get(&self, ns: &str, name: &str) -> Values {
        self.values
            .get(&(ns.to_string(), name.to_string()))
            .cloned()
            .unwrap_or_default()
    }

    fn edge(&mut self, caller: &str, callee: &str) {
        if self.edges.insert((caller.to_string(), callee.to_string())) {
            self.changed = true;
        }
    }

    fn diag(&mut self, scope: usize, line: u32, message: String) {
        let module = self
            .scopes
            .get(scope)
            .map(|s| s.module.clone())
            .unwrap_or_default();
        self.diagnostics.insert(Diagnostic {
            module,
            line,
            message,
        });
    }

    fn is_kind(&self, fqn: &str, kind: NodeKind) -> bool {
        self.kinds.get(fqn) == Some(&kind)
    }

    fn lookup(&self, name: &str, i: usize) -> Option<Slot> {
        let s = &self.scopes[i];
        if s.globals.contains(name) {
            return Some((s.module.clone(), name.to_string()));
        }
        if s.locals.contains(name) && !s.nonlocals.contains(name) {
            return Some((s.fqn.clone(), name.to_string()));
        }
        for w in &s.wildcards {
            let defines = self
                .by_fqn
                .get(w)
                .into_iter()
                .flatten()
                .any(|&j| self.scopes[j].locals.contains(name));
            if defines {
                return Some((w.clone(), name.to_string()));
            }
        }
        s.parent.and_then(|p| self.lookup(name, p))
    }

    fn store_slot(&self, name: &str, i: usize) -> Slot {
        let s = &self.scopes[i];
        if s.globals.contains(name) {
            return (s.module.clone(), name.to_string());
        }
        if s.nonlocals.contains(name) {
            if let Some(slot) = s.parent.and_then(|p| self.lookup(name, p)) {
                return slot;
            }
        }
        (s.fqn.clone(), name.to_string())
    }

    fn scope_of(&self, fqn: &str) -> Option<&Scope> {
        self.by_fqn
            .get(fqn)
            .and_then(|v| v.first())
            .map(|&i| &self.scopes[i])
    }

    // ---- statements ----

    fn stmts(&mut self, body: &[Stmt], i: usize) {
        for s in body {
            self.stmt(s, i);
        }
    }

    fn stmt(&mut self, s: &Stmt, i: usize) {
        let fqn = self.scopes[i].fqn.clone();
        match &s.kind {
            StmtKind::Expr(e) => {
                self.eval(e, i);
            }
            StmtKind::Assign { targets, value } => {
                let v = self.eval(value, i);
                for t in targets {
                    if let (ExprKind::Name(to), ExprKind::Name(from)) = (&t.kind, &value.kind) {
                        if let Some(src) = self.lookup(from, i) {
                            self.flows.insert((src, self.store_slot(to, i)));
                        }
                    }
                    self.assign(t, v.clone(), i);
                }
            }
            StmtKind::AugAssign { target, op, value } => {
                let l = self.eval(target, i);
                let r = self.eval(value, i);
                let mut out = r.clone();
                for v in &l {
                    if let Value::Instance(c) = v {
                        let iop = op_dunder(*op).replacen("__", "__i", 1);
                        let mut res = self.call_method(
                            c,
                            &iop,
                            vec![(r.clone(), false)],
                            i,
                            s.span.start_line,
                        );
                        if res.is_empty() {
                            res = self.call_method(
                                c,
                                op_dunder(*op),
                                vec![(r.clone(), false)],
                                i,
                                s.span.start_line,
                            );
                        }
                        out.extend(res);
                    }
                }
                self.assign(target, out, i);
            }
            StmtKind::Return(v) => {
                if let Some(e) = v {
                    let vals = self.eval(e, i);
                    self.add((fqn, RETURN.to_string()), vals);
                }
            }
            StmtKind::For { target, iter, .. } => {
                let it = self.eval(iter, i);
                let elems = self.iterate(it, i, s.span.start_line);
                self.assign(target, elems, i);
            }
            StmtKind::With { items, .. } => {
                for it in items {
                    let mut v = self.eval(&it.context, i);
                    for x in v.clone() {
                        if let Value::Instance(c) = x {
                            v.extend(self.call_method(
                                &c,
                                "__enter__",
                                Vec::new(),
                                i,
                                s.span.start_line,
                            ));
                            self.call_method(&c, "__exit__", Vec::new(), i, s.span.start_line);
                        }
                    }
                    if let Some(t) = &it.vars {
                        self.assign(t, v, i);
                    }
                }
            }
            StmtKind::Import(names) => {
                for a in names {
                    let parts: Vec<&str> = a.name.split('.').collect();
                    for k in 1..=parts.len() {
                        if let Target::Node(m) = self.resolver.absolute(&parts[..k].join(".")) {
                            if self.resolver.is_module(&m) {
                                self.edge(&fqn, &m);
                            }
                        }
                    }
                    let bound_to = match &a.asname {
                        Some(_) => a.name.clone(),
                        None => parts[0].to_string(),
                    };
                    let v = match self.resolver.absolute(&bound_to) {
                        Target::Node(m) => Value::Def(m),
                        Target::External(x) | Target::Missing(x) => Value::External(x),
                    };
                    let slot = self.store_slot(a.bound_name(false), i);
                    self.add(slot, [v].into());
                }
            }
            StmtKind::ImportFrom {
                module,
                names,
                level,
            } => {
                let base =
                    self.import_base(&self.scopes[i].module.clone(), *level, module.as_deref());
                match base {
                    Target::Node(b) => {
                        let mut p = b.as_str();
                        loop {
                            if self.resolver.is_module(p) {
                                self.edge(&fqn, p);
                            }
                            match p.rsplit_once('.') {
                                Some((q, _)) => p = q,
                                None => break,
                            }
                        }
                        for a in names.iter().filter(|a| a.name != "*") {
                            let sub = format!("{b}.{}", a.name);
                            let v = if self.resolver.names.contains(&sub) {
                                if self.resolver.is_module(&sub) {
                                    self.edge(&fqn, &sub);
                                }
                                [Value::Def(sub)].into()
                            } else {
                                let src = (b.clone(), a.name.clone());
                                let dst = self.store_slot(a.bound_name(true), i);
                                self.flows.insert((src, dst));
                                self.get(&b, &a.name)
                            };
                            let slot = self.store_slot(a.bound_name(true), i);
                            self.add(slot, v);
                        }
                    }
                    Target::External(x) => {
                        for a in names.iter().filter(|a| a.name != "*") {
                            let slot = self.store_slot(a.bound_name(true), i);
                            let name = if x.is_empty() {
                                a.name.clone()
                            } else {
                                format!("{x}.{}", a.name)
                            };
                            self.add(slot, [Value::External(name)].into());
                        }
                    }
                    Target::Missing(_) => {}
                }
            }
            StmtKind::FunctionDef(f) => {
                let ffqn = format!("{fqn}.{}", f.name);
                for p in f.params.all() {
                    if let Some(d) = &p.default {
                        let v = self.eval(d, i);
                        self.add((ffqn.clone(), p.name.clone()), v);
                    }
                }
                let v = self.decorate(
                    &f.decorators,
                    [Value::Def(ffqn)].into(),
                    &f.name,
                    i,
                    s.span.start_line,
                );
                let slot = self.store_slot(&f.name, i);
                self.add(slot, v);
            }
            StmtKind::ClassDef(c) => {
                let cfqn = format!("{fqn}.{}", c.name);
                self.edge(&fqn, &cfqn);
                for (k, b) in c.bases.iter().enumerate() {
                    let v = self.eval(b, i);
                    self.add((cfqn.clone(), format!("<base{k}>")), v);
                }
                for k in &c.keywords {
                    self.eval(&k.value, i);
                }
                let v = self.decorate(
                    &c.decorators,
                    [Value::Def(cfqn)].into(),
                    &c.name,
                    i,
                    s.span.start_line,
                );
                let slot = self.store_slot(&c.name, i);
                self.add(slot, v);
            }
            StmtKind::Raise { exc, cause } => {
                if let Some(e) = exc {
                    let v = self.eval(e, i);
                    for x in v {
                        if let Value::Def(c) = x {
                            if self.is_kind(&c, NodeKind::Class) {
                                self.instantiate(&c, Vec::new(), i, s.span.start_line);
                            }
                        }
                    }
                }
                if let Some(e) = cause {
                    self.eval(e, i);
                }
            }
            StmtKind::Try { handlers, .. } => {
                for h in handlers {
                    let Some(t) = &h.typ else { continue };
                    let v = self.eval(t, i);
                    if let Some(n) = &h.name {
                        let inst: Values = v
                            .into_iter()
                            .filter_map(|x| match x {
                                Value::Def(c) if self.is_kind(&c, NodeKind::Class) => {
                                    Some(Value::Instance(c))
                                }
                                _ => None,
                            })
                            .collect();
                        let slot = self.store_slot(n, i);
                        self.add(slot, inst);
                    }
                }
            }
            _ => {
                for e in s.header_exprs() {
                    self.eval(e, i);
                }
            }
        }
        if !matches!(s.kind, StmtKind::FunctionDef(_) | StmtKind::ClassDef(_)) {
            for b in s.bodies() {
                self.stmts(b, i);
            }
        }
    }

    /// Apply decorators bottom-up. The undecorated value is kept alongside
    /// whatever the decorators return.
    fn decorate(
        &mut self,
        decorators: &[Expr],
        mut vals: Values,
        name: &str,
        i: usize,
        line: u32,
    ) -> Values {
        for d in decorators.iter().rev() {
            let dv = self.eval(d, i);
            let mut out = vals.clone();
            for v in dv {
                if matches!(v, Value::Builtin(_) | Value::External(_)) {
                    continue;
                }
                let wraps = matches!(&v, Value::Def(f) if self.is_kind(f, NodeKind::Function))
                    || matches!(v, Value::Bound(..));
                if wraps {
                    self.diag(
                        i,
                        line,
                        format!("decorated `{name}` is also treated as undecorated"),
                    );
                }
                out.extend(self.call_value(&v, vec![(vals.clone(), false)], Vec::new(), i, line));
            }
            vals = out;
        }
        vals
    }

    fn assign(&mut self, target: &Expr, vals: Values, i: usize) {
        match &target.kind {
            ExprKind::Name(n) => {
                let slot = self.store_slot(n, i);
                self.add(slot, vals);
            }
            ExprKind::Tuple(ts) | ExprKind::List(ts) => {
                for t in ts {
                    self.assign(t, vals.clone(), i);
                }
            }
            ExprKind::Starred(x) => self.assign(x, vals, i),
            ExprKind::Attribute { value, attr } => {
                for b in self.eval(value, i) {
                    match b {
                        Value::Instance(c) => {
                            for f in self.class_attr(&c, attr) {
                                if let Value::Def(f) = f {
                                    if self
                                        .scope_of(&f)
                                        .is_some_and(|s| s.flavor == Flavor::Property)
                                    {
                                        self.invoke(
                                            &f,
                                            Some(Value::Instance(c.clone())),
                                            vec![(vals.clone(), false)],
                                            Vec::new(),
                                            i,
                                        );
                                    }
                                }
                            }
                            self.add((c, format!("@{attr}")), vals.clone());
                        }
                        Value::Def(k)
                            if self.is_kind(&k, NodeKind::Class)
                                || self.is_kind(&k, NodeKind::Module) =>
                        {
                            self.add((k, attr.clone()), vals.clone());
                        }
                        _ => {}
                    }
                }
            }
            ExprKind::Subscript { value, slice } => {
                self.eval(slice, i);
                for b in self.eval(value, i) {
                    if let Value::Instance(c) = b {
                        self.call_method(
                            &c,
                            "__setitem__",
                            vec![(vals.clone(), false)],
                            i,
                            target.span.start_line,
                        );
                    }
                }
                if matches!(
                    value.kind,
                    ExprKind::Name(_) | ExprKind::Attribute { .. } | ExprKind::Subscript { .. }
                ) {
                    self.assign(value, vals, i);
                }
            }
            _ => {
                self.eval(target, i);
            }
        }
    }

    // ---- expressions ----

    fn eval(&mut self, e: &Expr, i: usize) -> Values {
        match &e.kind {
            ExprKind::Name(n) => match self.lookup(n, i) {
                Some((ns, name)) => self.get(&ns, &name),
                None if builtin_names().contains(&n.as_str()) => [Value::Builtin(n.clone())].into(),
                None => Values::new(),
            },
            ExprKind::Constant(_) => Values::new(),
            ExprKind::Attribute { value, attr } => {
                let base = self.eval(value, i);
                let mut out = Values::new();
                for v in base {
                    out.extend(self.attribute(&v, attr, i));
                }
                out
            }
            ExprKind::Call { .. } => self.call(e, i),
            ExprKind::Lambda { params, .. } => {
                let fqn = format!("{}.<lambda>", self.scopes[i].fqn);
                for p in params.all() {
                    if let Some(d) = &p.default {
                        let v = self.eval(d, i);
                        self.add((fqn.clone(), p.name.clone()), v);
                    }
                }
                [Value::Def(fqn)].into()
            }
            ExprKind::BinOp { left, op, right } => {
                let l = self.eval(left, i);
                let r = self.eval(right, i);
                let mut out: Values = l.union(&r).cloned().collect();
                for v in &l {
                    if let Value::Instance(c) = v {
                        out.extend(self.call_method(
                            c,
                            op_dunder(*op),
                            vec![(r.clone(), false)],
                            i,
                            e.span.start_line,
                        ));
                    }
                }
                for v in &r {
                    if let Value::Instance(c) = v {
                        let rop = op_dunder(*op).replacen("__", "__r", 1);
                        out.extend(self.call_method(
                            c,
                            &rop,
                            vec![(l.clone(), false)],
                            i,
                            e.span.start_line,
                        ));
                    }
                }
                out
            }
            ExprKind::UnaryOp { operand, .. } => {
                self.eval(operand, i);
                Values::new()
            }
            ExprKind::BoolOp { values, .. } => {
                let mut out = Values::new();
                for v in values {
                    out.extend(self.eval(v, i));
                }
                out
            }
            ExprKind::Compare {
                left,
                ops,
                comparators,
            } => {
                let mut prev = self.eval(left, i);
                for (op, c) in ops.iter().zip(comparators) {
                    let cur = self.eval(c, i);
                    let (recv, arg, names): (&Values, &Values, &[&str]) = match op {
                        CmpOp::In | CmpOp::NotIn => (&cur, &prev, &["__contains__"]),
                        _ => (&prev, &cur, cmp_dunders(*op)),
                    };
                    let (recv, arg) = (recv.clone(), arg.clone());
                    for v in &recv {
                        if let Value::Instance(k) = v {
                            for n in names {
                                self.call_method(
                                    k,
                                    n,
                                    vec![(arg.clone(), false)],
                                    i,
                                    e.span.start_line,
                                );
                            }
                        }
                    }
                    prev = cur;
                }
                Values::new()
            }
            ExprKind::IfExp { test, body, orelse } => {
                self.eval(test, i);
                let mut out = self.eval(body, i);
                out.extend(self.eval(orelse, i));
                out
            }
            ExprKind::List(xs) | ExprKind::Tuple(xs) | ExprKind::Set(xs) => {
                let mut out = Values::new();
                for x in xs {
                    out.extend(self.eval(x, i));
                }
                out
            }
            ExprKind::Dict { keys, values } => {
                let mut out = Values::new();
                for k in keys.iter().flatten() {
                    out.extend(self.eval(k, i));
                }
                for v in values {
                    out.extend(self.eval(v, i));
                }
                out
            }
            ExprKind::Starred(x) => self.eval(x, i),
            ExprKind::Subscript { value, slice } => {
                let b = self.eval(value, i);
                let s = self.eval(slice, i);
                let mut out = b.clone();
                for v in &b {
                    if let Value::Instance(c) = v {
                        out.extend(self.call_method(
                            c,
                            "__getitem__",
                            vec![(s.clone(), false)],
                            i,
                            e.span.start_line,
                        ));
                    }
                }
                out
            }
            ExprKind::Slice { lower, upper, step } => {
                for x in [lower, upper, step].into_iter().flatten() {
                    self.eval(x, i);
                }
                Values::new()
            }
            ExprKind::ListComp { elt, generators }
            | ExprKind::SetComp { elt, generators }
            | ExprKind::GeneratorExp { elt, generators } => {
                self.generators(generators, i);
                self.eval(elt, i)
            }
            ExprKind::DictComp {
                key,
                value,
                generators,
            } => {
                self.generators(generators, i);
                let mut out = self.eval(key, i);
                out.extend(self.eval(value, i));
                out
            }
            ExprKind::Yield(v) => {
                if let Some(v) = v {
                    let vals = self.eval(v, i);
                    let slot = (self.scopes[i].fqn.clone(), RETURN.to_string());
                    self.add(slot, vals);
                }
                Values::new()
            }
            ExprKind::YieldFrom(v) => {
                let vals = self.eval(v, i);
                let elems = self.iterate(vals, i, e.span.start_line);
                let slot = (self.scopes[i].fqn.clone(), RETURN.to_string());
                self.add(slot, elems);
                Values::new()
            }
        }
    }

    fn generators(&mut self, generators: &[Comprehension], i: usize) {
        for g in generators {
            let it = self.eval(&g.iter, i);
            let elems = self.iterate(it, i, g.iter.span.start_line);
            self.assign(&g.target, elems, i);
            for c in &g.ifs {
                self.eval(c, i);
            }
        }
    }

    /// Values produced by iterating over `vals`: containers are flattened
    /// into their elements, objects go through `__iter__`/`__next__`.
    fn iterate(&mut self, vals: Values, i: usize, line: u32) -> Values {
        let mut out = vals.clone();
        for v in &vals {
            if let Value::Instance(c) = v {
                let its = self.call_method(c, "__iter__", Vec::new(), i, line);
                for it in &its {
                    if let Value::Instance(k) = it {
                        out.extend(self.call_method(k, "__next__", Vec::new(), i, line));
                    }
                }
                out.extend(its);
            }
        }
        out
    }

    fn call(&mut self, e: &Expr, i: usize) -> Values {
        let ExprKind::Call {
            func,
            args,
            keywords,
        } = &e.kind
        else {
            return Values::new();
        };
        let line = e.span.start_line;
        let fv = self.eval(func, i);
        let pos: Vec<(Values, bool)> = args
            .iter()
            .map(|a| match &a.kind {
                ExprKind::Starred(x) => (self.eval(x, i), true),
                _ => (self.eval(a, i), false),
            })
            .collect();
        let kws: Vec<(Option<String>, Values)> = keywords
            .iter()
            .map(|k| (k.arg.clone(), self.eval(&k.value, i)))
            .collect();

        if fv.is_empty() {
            // Growing a builtin container stores into it.
            if let ExprKind::Attribute { value, attr } = &func.kind {
                if matches!(
                    attr.as_str(),
                    "append" | "add" | "extend" | "insert" | "update" | "setdefault" | "appendleft"
                ) && matches!(value.kind, ExprKind::Name(_) | ExprKind::Attribute { .. })
                {
                    let mut all: Values = pos.iter().flat_map(|(v, _)| v.iter().cloned()).collect();
                    all.extend(kws.iter().flat_map(|(_, v)| v.iter().cloned()));
                    self.assign(value, all, i);
                }
            }
        }
        let mut out = Values::new();
        for v in &fv {
            out.extend(self.call_value(v, pos.clone(), kws.clone(), i, line));
        }
        out
    }

    fn call_value(
        &mut self,
        v: &Value,
        pos: Vec<(Values, bool)>,
        kws: Vec<(Option<String>, Values)>,
        i: usize,
        line: u32,
    ) -> Values {
        let caller = self.scopes[i].fqn.clone();
        match v {
            Value::Def(f) if self.is_kind(f, NodeKind::Function) => {
                self.invoke(f, None, pos, kws, i)
            }
            Value::Def(c) if self.is_kind(c, NodeKind::Class) => {
                self.instantiate_with(c, pos, kws, i, line)
            }
            Value::Bound(f, recv) => self.invoke(f, Some((**recv).clone()), pos, kws, i),
            Value::Instance(c) => self.call_method_kw(c, "__call__", pos, kws, i, line),
            Value::External(x) => {
                self.edge(&caller, x);
                Values::new()
            }
            Value::Builtin(name) => self.builtin(name, pos, kws, i, line),
            _ => Values::new(),
        }
    }

    /// Record a call to function `f` and feed it the arguments.
    fn invoke(
        &mut self,
        f: &str,
        recv: Option<Value>,
        pos: Vec<(Values, bool)>,
        kws: Vec<(Option<String>, Values)>,
        i: usize,
    ) -> Values {
        let caller = self.scopes[i].fqn.clone();
        self.edge(&caller, f);
        let Some(params) = self.scope_of(f).map(|s| s.params.clone()) else {
            return Values::new();
        };
        let positional: Vec<String> = params.positional().map(|p| p.name.clone()).collect();
        let vararg = params.vararg.as_ref().map(|p| p.name.clone());
        let kwarg = params.kwarg.as_ref().map(|p| p.name.clone());
        let mut idx = 0;
        if let Some(r) = recv {
            if let Some(first) = positional.first() {
                self.add((f.to_string(), first.clone()), [r].into());
                idx = 1;
            }
        }
        let mut spread = false;
        for (vals, starred) in pos {
            if starred || spread {
                spread = true;
                for p in positional.iter().skip(idx).chain(vararg.iter()) {
                    self.add((f.to_string(), p.clone()), vals.clone());
                }
            } else if idx < positional.len() {
                self.add((f.to_string(), positional[idx].clone()), vals);
                idx += 1;
            } else if let Some(va) = &vararg {
                self.add((f.to_string(), va.clone()), vals);
            }
        }
        for (name, vals) in kws {
            match name {
                Some(n) if params.all().any(|p| p.name == n) => self.add((f.to_string(), n), vals),
                Some(_) => {
                    if let Some(k) = &kwarg {
                        self.add((f.to_string(), k.clone()), vals);
                    }
                }
                None => {
                    for p in params.all() {
                        self.add((f.to_string(), p.name.clone()), vals.clone());
                    }
                }
            }
        }
        self.get(f, RETURN)
    }

    fn instantiate(&mut self, c: &str, pos: Vec<(Values, bool)>, i: usize, line: u32) -> Values {
        self.instantiate_with(c, pos, Vec::new(), i, line)
    }

    fn instantiate_with(
        &mut self,
        c: &str,
        pos: Vec<(Values, bool)>,
        kws: Vec<(Option<String>, Values)>,
        i: usize,
        line: u32,
    ) -> Values {
        self.call_method_kw(c, "__init__", pos, kws, i, line);
        [Value::Instance(c.to_string())].into()
    }

    fn call_method(
        &mut self,
        c: &str,
        name: &str,
        pos: Vec<(Values, bool)>,
        i: usize,
        line: u32,
    ) -> Values {
        self.call_method_kw(c, name, pos, Vec::new(), i, line)
    }

    /// Call method `name` looked up on an object of class `c`.
    fn call_method_kw(
        &mut self,
        c: &str,
        name: &str,
        pos: Vec<(Values, bool)>,
        kws: Vec<(Option<String>, Values)>,
        i: usize,
        line: u32,
    ) -> Values {
        let mut out = Values::new();
        for m in self.attribute(&Value::Instance(c.to_string()), name, i) {
            if matches!(m, Value::Bound(..)) {
                out.extend(self.call_value(&m, pos.clone(), kws.clone(), i, line));
            }
        }
        out
    }

    fn builtin(
        &mut self,
        name: &str,
        pos: Vec<(Values, bool)>,
        kws: Vec<(Option<String>, Values)>,
        i: usize,
        line: u32,
    ) -> Values {
        let arg = |k: usize| pos.get(k).map(|(v, _)| v.clone()).unwrap_or_default();
        let all: Values = pos.iter().flat_map(|(v, _)| v.iter().cloned()).collect();
        let keyword = |n: &str| {
            kws.iter()
                .filter(|(k, _)| k.as_deref() == Some(n))
                .flat_map(|(_, v)| v.iter().cloned())
                .collect::<Values>()
        };
        match name {
            "map" | "filter" => {
                let elems: Values = pos
                    .iter()
                    .skip(1)
                    .flat_map(|(v, _)| v.iter().cloned())
                    .collect::<Values>();
                let elems = self.iterate(elems, i, line);
                let mut out = elems.clone();
                for f in arg(0) {
                    out.extend(self.call_value(
                        &f,
                        vec![(elems.clone(), false)],
                        Vec::new(),
                        i,
                        line,
                    ));
                }
                out
            }
            "sorted" | "min" | "max" => {
                let elems = self.iterate(all, i, line);
                for f in keyword("key") {
                    self.call_value(&f, vec![(elems.clone(), false)], Vec::new(), i, line);
                }
                elems
            }
            "super" => {
                let scope = &self.scopes[i];
                let explicit = (arg(0), arg(1));
                let pairs: Vec<(String, String)> = if !explicit.0.is_empty() {
                    let mut v = Vec::new();
                    for a in &explicit.0 {
                        for b in &explicit.1 {
                            if let (Value::Def(c), Value::Instance(r) | Value::Def(r)) = (a, b) {
                                v.push((c.clone(), r.clone()));
                            }
                        }
                    }
                    v
                } else if let (Some(c), Some(first)) =
                    (&scope.method_of, scope.params.positional().next())
                {
                    self.get(&scope.fqn, &first.name)
                        .into_iter()
                        .filter_map(|r| match r {
                            Value::Instance(r) | Value::Def(r) => Some((c.clone(), r)),
                            _ => None,
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                pairs.into_iter().map(|(c, r)| Value::Super(c, r)).collect()
            }
            "iter" | "next" | "list" | "tuple" | "set" | "frozenset" | "reversed" | "enumerate"
            | "zip" | "dict" => self.iterate(all, i, line),
            "len" | "str" | "repr" | "bool" | "hash" | "abs" | "print" | "format" => {
                let dunder = match name {
                    "len" => vec!["__len__"],
                    "repr" => vec!["__repr__"],
                    "bool" => vec!["__bool__", "__len__"],
                    "hash" => vec!["__hash__"],
                    "abs" => vec!["__abs__"],
                    "format" => vec!["__format__", "__str__", "__repr__"],
                    _ => vec!["__str__", "__repr__"],
                };
                for v in &all {
                    if let Value::Instance(c) = v {
                        for d in &dunder {
                            if !self.call_method(c, d, Vec::new(), i, line).is_empty()
                                || self.has_method(c, d)
                            {
                                break;
                            }
                        }
                    }
                }
                Values::new()
            }
            "getattr" | "setattr" | "eval" | "exec" | "__import__" | "globals" | "locals"
            | "vars" | "compile" => {
                self.diag(i, line, format!("dynamic `{name}` call is not analyzed"));
                Values::new()
            }
            _ => Values::new(),
        }
    }

    fn has_method(&self, c: &str, name: &str) -> bool {
        self.mro(c).iter().any(|k| !self.get(k, name).is_empty())
    }

    // ---- classes ----

    fn bases(&self, c: &str) -> Vec<String> {
        let n = self.scope_of(c).map(|s| s.bases).unwrap_or(0);
        let mut out = Vec::new();
        for k in 0..n {
            for v in self.get(c, &format!("<base{k}>")) {
                if let Value::Def(b) = v {
                    if self.is_kind(&b, NodeKind::Class) && !out.contains(&b) {
                        out.push(b);
                    }
                }
            }
        }
        out
    }

    /// Method resolution order: C3 linearization, falling back to a
    /// depth-first order when the bases are inconsistent.
    fn mro(&self, c: &str) -> Vec<String> {
        c3_linearize(c, &|k| self.bases(k))
    }

    /// Class-level value of `attr`, from the first class in the MRO of `c`
    /// that has one.
    fn class_attr(&self, c: &str, attr: &str) -> Values {
        self.mro(c)
            .iter()
            .map(|k| self.get(k, attr))
            .find(|v| !v.is_empty())
            .unwrap_or_default()
    }

    fn method_view(&self, v: Value, recv_class: &str, instance: bool) -> Option<Value> {
        let Value::Def(f) = &v else { return Some(v) };
        if !self.is_kind(f, NodeKind::Function) {
            return Some(v);
        }
        let flavor = self.scope_of(f).map(|s| s.flavor).unwrap_or(Flavor::Plain);
        Some(match flavor {
            Flavor::Static => v,
            Flavor::ClassMethod => {
                Value::Bound(f.clone(), Box::new(Value::Def(recv_class.to_string())))
            }
            Flavor::Plain if instance => {
                Value::Bound(f.clone(), Box::new(Value::Instance(recv_class.to_string())))
            }
            Flavor::Plain => v,
            Flavor::Property => return None,
        })
    }

    fn attribute(&mut self, v: &Value, attr: &str, i: usize) -> Values {
        let mut out = Values::new();
        match v {
            Value::Def(c) if self.is_kind(c, NodeKind::Class) => {
                for x in self.class_attr(c, attr) {
                    out.extend(self.method_view(x, c, false));
                }
            }
            Value::Instance(c) => {
                for k in self.mro(c) {
                    out.extend(self.get(&k, &format!("@{attr}")));
                }
                for x in self.class_attr(c, attr) {
                    if let Value::Def(f) = &x {
                        if self
                            .scope_of(f)
                            .is_some_and(|s| s.flavor == Flavor::Property)
                        {
                            out.extend(self.invoke(f, Some(v.clone()), Vec::new(), Vec::new(), i));
                            continue;
                        }
                    }
                    out.extend(self.method_view(x, c, true));
                }
            }
            Value::Super(c, r) => {
                let mro = self.mro(r);
                let after = mro
                    .iter()
                    .position(|k| k == c)
                    .map(|p| p + 1)
                    .unwrap_or(mro.len());
                if let Some(vals) = mro[after..]
                    .iter()
                    .map(|k| self.get(k, attr))
                    .find(|v| !v.is_empty())
                {
                    for x in vals {
                        out.extend(self.method_view(x, r, true));
                    }
                }
            }
            Value::Def(m) if !self.is_kind(m, NodeKind::Function) => {
                out.extend(self.get(m, attr));
                let sub = format!("{m}.{attr}");
                if self.resolver.names.contains(&sub) {
                    out.insert(Value::Def(sub));
                }
            }
            Value::External(x) if x.split('.').count() < EXTERNAL_DEPTH => {
                out.insert(Value::External(format!("{x}.{attr}")));
            }
            _ => {}
        }
        out
    }

    fn assignment_graph(&self) -> AssignmentGraph {
        let key = |(ns, n): &Slot| format!("{ns}.{n}");
        let render = |v: &Value| match v {
            Value::Def(x) | Value::Instance(x) | Value::External(x) | Value::Bound(x, _) => {
                Some(x.clone())
            }
            Value::Builtin(b) => Some(format!("builtins.{b}")),
            Value::Super(..) => None,
        };
        AssignmentGraph {
            value_sets: self
                .values
                .iter()
                .filter(|((_, n), _)| !n.starts_with("<base"))
                .map(|(k, vs)| (key(k), vs.iter().filter_map(render).collect()))
                .collect(),
            flows: self.flows.iter().map(|(a, b)| (key(a), key(b))).collect(),
        }
    }
}

#[cfg(test)]
mod tests;
