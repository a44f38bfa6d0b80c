//! Type sets for variables, parameters and return values.
//!
//! Inference is flow-insensitive: every binding of a name in a scope adds
//! to one set. Parameters take the union of argument types at resolved call
//! sites, constraints from their use in the body, and default values.
//! Functions that escape (used as values, decorated, called through unknown
//! receivers or with unpacked arguments) get `Any` for their parameters.

mod table;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::rc::Rc;

use serde_json::{json, Map, Value};

use crate::callgraph::c3_linearize;
use crate::cfg::build_from_module;
use crate::error::{Error, Result};
use crate::frontend::*;
use crate::modgraph::{build_dir_tree, builtin_names, Diagnostic, NameContext, Resolved};
use crate::rewriter::simplify_module;
use crate::ssa::stmt_defs;
pub use table::{HeuristicTable, SIGNATURES_ENV};

pub type TypeSet = BTreeSet<String>;

pub const ANY: &str = "Any";

pub fn any() -> TypeSet {
    [ANY.to_string()].into()
}

fn one(t: &str) -> TypeSet {
    [t.to_string()].into()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRecord {
    pub file: String,
    pub line_number: u32,
    pub function: Option<String>,
    pub variable: Option<String>,
    pub parameter: Option<String>,
    pub types: TypeSet,
}

impl TypeRecord {
    pub fn is_return(&self) -> bool {
        self.variable.is_none() && self.parameter.is_none()
    }

    fn sort_key(&self) -> (&str, u32, u8, &str, &str) {
        let (rank, name) = match (&self.parameter, &self.variable) {
            (Some(p), _) => (1, p.as_str()),
            (_, Some(v)) => (2, v.as_str()),
            _ => (0, ""),
        };
        (
            &self.file,
            self.line_number,
            rank,
            self.function.as_deref().unwrap_or(""),
            name,
        )
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("file".into(), json!(self.file));
        m.insert("line_number".into(), json!(self.line_number));
        if let Some(f) = &self.function {
            m.insert("function".into(), json!(f));
        }
        if let Some(v) = &self.variable {
            m.insert("variable".into(), json!(v));
        }
        if let Some(p) = &self.parameter {
            m.insert("parameter".into(), json!(p));
        }
        m.insert("type".into(), json!(self.types.iter().collect::<Vec<_>>()));
        Value::Object(m)
    }
}

pub fn records_to_json(records: &[TypeRecord]) -> Value {
    Value::Array(records.iter().map(TypeRecord::to_json).collect())
}

#[derive(Debug, Clone, Default)]
pub struct TypeInference {
    pub name: String,
    pub records: Vec<TypeRecord>,
    pub diagnostics: Vec<Diagnostic>,
    pub parse_errors: Vec<ParseError>,
}

impl TypeInference {
    /// Records for `function` (qualified within its module), in order.
    pub fn for_function(&self, function: &str) -> Vec<&TypeRecord> {
        self.records
            .iter()
            .filter(|r| r.function.as_deref() == Some(function))
            .collect()
    }

    pub fn return_of(&self, function: &str) -> Option<&TypeRecord> {
        self.records
            .iter()
            .find(|r| r.is_return() && r.function.as_deref() == Some(function))
    }

    pub fn variable(&self, function: Option<&str>, name: &str) -> Option<&TypeRecord> {
        self.records
            .iter()
            .find(|r| r.function.as_deref() == function && r.variable.as_deref() == Some(name))
    }

    pub fn parameter(&self, function: &str, name: &str) -> Option<&TypeRecord> {
        self.records.iter().find(|r| {
            r.function.as_deref() == Some(function) && r.parameter.as_deref() == Some(name)
        })
    }
}

/// One module to analyze.
#[derive(Debug, Clone)]
pub struct Input {
    pub name: String,
    pub file: String,
    pub module: Module,
    pub is_package: bool,
}

/// Infer types for a file or for every module under a package directory.
/// With `simplify`, modules pass through the rewriter first and records for
/// the temporaries it introduces are dropped.
pub fn infer_types(
    name: &str,
    entry: &Path,
    table: &HeuristicTable,
    simplify: bool,
) -> Result<TypeInference> {
    let meta = std::fs::metadata(entry).map_err(|source| Error::Io {
        path: entry.to_path_buf(),
        source,
    })?;
    let mut inputs = Vec::new();
    let mut parse_errors = Vec::new();
    let mut root = None;
    if meta.is_dir() {
        let tree = build_dir_tree(entry)?;
        root = Some(tree.full_name.clone());
        for node in tree.source_nodes() {
            let rel = node.path.strip_prefix(entry).unwrap_or(&node.path);
            let file = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            match (&node.module, &node.parse_error) {
                (Some(m), _) => inputs.push(Input {
                    name: node.full_name.clone(),
                    file,
                    module: m.clone(),
                    is_package: node.path.file_name().is_some_and(|n| n == "__init__.py"),
                }),
                (None, Some(e)) => parse_errors.push(e.clone()),
                _ => {}
            }
        }
    } else {
        let text = read_source(entry)?;
        let module = parse_module(&text, &entry.display().to_string())?;
        inputs.push(Input {
            name: entry
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            file: entry.display().to_string(),
            module,
            is_package: false,
        });
    }
    let mut out = infer_inputs(inputs, root.as_deref(), table, simplify)?;
    out.name = name.to_string();
    out.parse_errors = parse_errors;
    Ok(out)
}

/// Infer types for one module given as text, named by the file stem.
pub fn infer_source(
    file: &str,
    text: &str,
    table: &HeuristicTable,
    simplify: bool,
) -> Result<TypeInference> {
    let module = parse_module(text, file)?;
    let name = Path::new(file)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    infer_inputs(
        vec![Input {
            name,
            file: file.to_string(),
            module,
            is_package: false,
        }],
        None,
        table,
        simplify,
    )
}

pub fn infer_inputs(
    inputs: Vec<Input>,
    root: Option<&str>,
    table: &HeuristicTable,
    simplify: bool,
) -> Result<TypeInference> {
    let mut originals = Vec::new();
    let mut prepared = Vec::new();
    for mut input in inputs {
        let idents = statement_bound(&input.module.body);
        if simplify {
            input.module = simplify_module(&input.module)?;
        }
        originals.push(idents);
        prepared.push(input);
    }
    let mut engine = Engine::new(table, root, &prepared);
    engine.solve();
    let mut records = engine.records();
    if simplify {
        records.retain(|r| {
            let m = prepared.iter().position(|i| i.file == r.file).unwrap_or(0);
            r.variable.as_ref().is_none_or(|v| originals[m].contains(v))
        });
    }
    Ok(TypeInference {
        name: String::new(),
        records,
        diagnostics: engine.diagnostics.into_iter().collect(),
        parse_errors: Vec::new(),
    })
}

/// Type of `expr` with names looked up in `env` and calls looked up by
/// their dotted name in `table`.
pub fn type_of_expr(
    expr: &Expr,
    env: &BTreeMap<String, TypeSet>,
    table: &HeuristicTable,
) -> TypeSet {
    struct Simple<'a> {
        env: &'a BTreeMap<String, TypeSet>,
        table: &'a HeuristicTable,
    }
    impl Typing for Simple<'_> {
        fn table(&self) -> &HeuristicTable {
            self.table
        }
        fn name(&mut self, n: &str) -> TypeSet {
            self.env.get(n).cloned().unwrap_or_else(any)
        }
        fn call(&mut self, e: &Expr) -> TypeSet {
            let ExprKind::Call {
                func,
                args,
                keywords,
            } = &e.kind
            else {
                return any();
            };
            for a in args {
                self.eval(a);
            }
            for k in keywords {
                self.eval(&k.value);
            }
            if let ExprKind::Attribute { value, attr } = &func.kind {
                if value
                    .dotted_name()
                    .is_none_or(|d| self.env.contains_key(d.split('.').next().unwrap_or("")))
                {
                    let recv = self.eval(value);
                    return method_result(self.table, &recv, attr);
                }
            }
            func.dotted_name()
                .and_then(|d| {
                    self.table
                        .signature(&d)
                        .or_else(|| self.table.signature(&format!("builtins.{d}")))
                        .cloned()
                })
                .unwrap_or_else(any)
        }
        fn attribute(&mut self, _: &TypeSet, _: &str) -> TypeSet {
            any()
        }
    }
    Simple { env, table }.eval(expr)
}

fn method_result(table: &HeuristicTable, recv: &TypeSet, attr: &str) -> TypeSet {
    let mut out = TypeSet::new();
    for t in recv {
        match table.method(t, attr) {
            Some(r) => {
                out.insert(r.to_string());
            }
            None => {
                out.insert(ANY.to_string());
            }
        }
    }
    if out.is_empty() {
        out = any();
    }
    out
}

/// Callers passing `function` these argument types.
#[derive(Debug, Clone, Default)]
pub struct CallSiteTypes {
    pub positional: Vec<TypeSet>,
    pub keywords: Vec<(String, TypeSet)>,
}

/// Parameter types from call sites, body constraints and defaults. A
/// parameter without evidence gets `Any`.
pub fn infer_parameters(
    function: &FunctionDef,
    call_sites: &[CallSiteTypes],
    body_constraints: &BTreeMap<String, TypeSet>,
    table: &HeuristicTable,
) -> BTreeMap<String, TypeSet> {
    let mut out: BTreeMap<String, TypeSet> = function
        .params
        .all()
        .map(|p| (p.name.clone(), TypeSet::new()))
        .collect();
    let positional: Vec<&Param> = function.params.positional().collect();
    for site in call_sites {
        for (k, t) in site.positional.iter().enumerate() {
            if let Some(p) = positional.get(k) {
                out.get_mut(&p.name).unwrap().extend(t.iter().cloned());
            }
        }
        for (n, t) in &site.keywords {
            if let Some(s) = out.get_mut(n) {
                s.extend(t.iter().cloned());
            }
        }
    }
    for (n, t) in body_constraints {
        if let Some(s) = out.get_mut(n) {
            s.extend(t.iter().cloned());
        }
    }
    for p in function.params.all() {
        if let Some(d) = &p.default {
            out.get_mut(&p.name)
                .unwrap()
                .extend(type_of_expr(d, &BTreeMap::new(), table));
        }
    }
    if let Some(v) = &function.params.vararg {
        out.insert(v.name.clone(), one("Tuple"));
    }
    if let Some(k) = &function.params.kwarg {
        out.insert(k.name.clone(), one("Dict"));
    }
    for s in out.values_mut() {
        if s.is_empty() {
            *s = any();
        }
    }
    out
}

/// Expression typing shared by the engine and [`type_of_expr`].
trait Typing {
    fn table(&self) -> &HeuristicTable;
    fn name(&mut self, n: &str) -> TypeSet;
    fn call(&mut self, e: &Expr) -> TypeSet;
    fn attribute(&mut self, recv: &TypeSet, attr: &str) -> TypeSet;
    fn mixed_operands(&mut self, _line: u32, _l: &str, _r: &str) {}
    fn lambda(&mut self, _params: &Parameters, body: &Expr) {
        let _ = body;
    }
    fn comprehension(&mut self, generators: &[Comprehension], elts: &[&Expr]) -> Vec<TypeSet> {
        for g in generators {
            self.eval(&g.iter);
        }
        elts.iter().map(|_| any()).collect()
    }

    fn eval(&mut self, e: &Expr) -> TypeSet {
        self.eval_default(e)
    }

    fn eval_default(&mut self, e: &Expr) -> TypeSet {
        match &e.kind {
            ExprKind::Constant(c) => one(match c {
                Constant::Int(_) => "int",
                Constant::Float(_) => "float",
                Constant::Str(_) | Constant::FString(_) => "str",
                Constant::Bytes(_) => "bytes",
                Constant::Bool(_) => "bool",
                Constant::None => "None",
                Constant::Ellipsis => ANY,
            }),
            ExprKind::Name(n) => self.name(n),
            ExprKind::List(xs) | ExprKind::Tuple(xs) | ExprKind::Set(xs) => {
                for x in xs {
                    self.eval(x);
                }
                one(match &e.kind {
                    ExprKind::List(_) => "List",
                    ExprKind::Tuple(_) => "Tuple",
                    _ => "Set",
                })
            }
            ExprKind::Dict { keys, values } => {
                for k in keys.iter().flatten() {
                    self.eval(k);
                }
                for v in values {
                    self.eval(v);
                }
                one("Dict")
            }
            ExprKind::ListComp { elt, generators } => {
                self.comprehension(generators, &[elt]);
                one("List")
            }
            ExprKind::SetComp { elt, generators } => {
                self.comprehension(generators, &[elt]);
                one("Set")
            }
            ExprKind::GeneratorExp { elt, generators } => {
                self.comprehension(generators, &[elt]);
                one("Generator")
            }
            ExprKind::DictComp {
                key,
                value,
                generators,
            } => {
                self.comprehension(generators, &[key, value]);
                one("Dict")
            }
            ExprKind::Lambda { params, body } => {
                self.lambda(params, body);
                one("callable")
            }
            ExprKind::BinOp { left, op, right } => {
                let l = self.eval(left);
                let r = self.eval(right);
                let mut out = TypeSet::new();
                for a in &l {
                    for b in &r {
                        if a == ANY || b == ANY {
                            out.insert(ANY.to_string());
                            continue;
                        }
                        let t = self.table().binop_or_any(*op, a, b);
                        if *op == BinOpKind::Add && t.contains(ANY) {
                            let textual = |x: &str| matches!(x, "str" | "bytes");
                            let numeric =
                                |x: &str| matches!(x, "int" | "float" | "bool" | "complex");
                            if (textual(a) && numeric(b)) || (numeric(a) && textual(b)) {
                                self.mixed_operands(e.span.start_line, a, b);
                            }
                        }
                        out.extend(t);
                    }
                }
                out
            }
            ExprKind::UnaryOp { op, operand } => {
                let t = self.eval(operand);
                let mut out = TypeSet::new();
                for x in &t {
                    out.insert(self.table().unary(*op, x).unwrap_or(ANY).to_string());
                }
                if *op == UnaryOpKind::Not {
                    return one("bool");
                }
                out
            }
            ExprKind::BoolOp { values, .. } => {
                let mut out = TypeSet::new();
                for v in values {
                    out.extend(self.eval(v));
                }
                out
            }
            ExprKind::Compare {
                left, comparators, ..
            } => {
                self.eval(left);
                for c in comparators {
                    self.eval(c);
                }
                one("bool")
            }
            ExprKind::IfExp { test, body, orelse } => {
                self.eval(test);
                let mut out = self.eval(body);
                out.extend(self.eval(orelse));
                out
            }
            ExprKind::Call { .. } => self.call(e),
            ExprKind::Attribute { value, attr } => {
                let recv = self.eval(value);
                self.attribute(&recv, attr)
            }
            ExprKind::Subscript { value, slice } => {
                let base = self.eval(value);
                self.eval(slice);
                let is_slice = matches!(slice.kind, ExprKind::Slice { .. });
                let mut out = TypeSet::new();
                for t in &base {
                    let r = match t.as_str() {
                        "str" => "str",
                        "List" | "Tuple" | "bytes" if is_slice => t.as_str(),
                        "bytes" => "int",
                        _ => ANY,
                    };
                    out.insert(r.to_string());
                }
                if out.is_empty() {
                    out = any();
                }
                out
            }
            ExprKind::Slice { lower, upper, step } => {
                for x in [lower, upper, step].into_iter().flatten() {
                    self.eval(x);
                }
                any()
            }
            ExprKind::Starred(x) => {
                self.eval(x);
                any()
            }
            ExprKind::Yield(v) => {
                if let Some(v) = v {
                    self.eval(v);
                }
                any()
            }
            ExprKind::YieldFrom(v) => {
                self.eval(v);
                any()
            }
        }
    }
}

/// Element type when iterating over a value of type `t`.
fn element_type(t: &str) -> &'static str {
    match t {
        "str" => "str",
        "range" | "bytes" => "int",
        _ => ANY,
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Module,
    Function,
    Class,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Bind {
    Var,
    Param,
    Def,
    Import,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Plain,
    Static,
    ClassMethod,
}

#[derive(Debug, Clone)]
struct Scope {
    fqn: String,
    module: usize,
    kind: Kind,
    parent: Option<usize>,
    /// Function or class this scope belongs to.
    owner: Option<String>,
    ctx: NameContext,
    body: Rc<Vec<Stmt>>,
    binds: BTreeMap<String, BTreeSet<Bind>>,
    first_var_line: BTreeMap<String, u32>,
    globals: BTreeSet<String>,
    nonlocals: BTreeSet<String>,
}

#[derive(Debug, Clone)]
struct Func {
    fqn: String,
    qualname: String,
    module: usize,
    scope: usize,
    /// Scope the `def` statement runs in.
    outer: usize,
    def: FunctionDef,
    line: u32,
    method_of: Option<String>,
    flavor: Flavor,
    generator: bool,
    falls_through: bool,
    first_return: Option<u32>,
}

#[derive(Debug, Clone)]
struct Class {
    outer: usize,
    bases: Vec<Expr>,
    methods: BTreeMap<String, String>,
}

struct Engine<'t> {
    table: &'t HeuristicTable,
    files: Vec<String>,
    scopes: Vec<Scope>,
    funcs: BTreeMap<String, Func>,
    classes: BTreeMap<String, Class>,
    class_bases: BTreeMap<String, Vec<String>>,
    vars: BTreeMap<(usize, String), TypeSet>,
    args: BTreeMap<(String, String), TypeSet>,
    constraints: BTreeMap<(String, String), TypeSet>,
    returns: BTreeMap<String, TypeSet>,
    fields: BTreeMap<(String, String), TypeSet>,
    /// Attributes stored through objects of unknown type.
    open_fields: BTreeSet<String>,
    escaped: BTreeSet<String>,
    diagnostics: BTreeSet<Diagnostic>,
    changed: bool,
}

fn flavor(decorators: &[Expr]) -> Flavor {
    for d in decorators {
        match d.dotted_name().as_deref() {
            Some("staticmethod") => return Flavor::Static,
            Some("classmethod") => return Flavor::ClassMethod,
            _ => {}
        }
    }
    Flavor::Plain
}

fn contains_yield(body: &[Stmt]) -> bool {
    fn expr(e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Yield(_) | ExprKind::YieldFrom(_) => true,
            ExprKind::Lambda { .. } => false,
            _ => NodeRef::Expr(e).children().into_iter().any(|c| match c {
                NodeRef::Expr(x) => expr(x),
                NodeRef::Keyword(k) => expr(&k.value),
                _ => false,
            }),
        }
    }
    body.iter().any(|s| match &s.kind {
        StmtKind::FunctionDef(_) | StmtKind::ClassDef(_) => false,
        _ => {
            s.header_exprs().into_iter().any(expr)
                || s.bodies().into_iter().any(|b| contains_yield(b))
        }
    })
}

fn first_return(body: &[Stmt]) -> Option<u32> {
    for s in body {
        match &s.kind {
            StmtKind::Return(_) => return Some(s.span.start_line),
            StmtKind::FunctionDef(_) | StmtKind::ClassDef(_) => {}
            _ => {
                if let Some(l) = s.bodies().into_iter().filter_map(|b| first_return(b)).min() {
                    return Some(l);
                }
            }
        }
    }
    None
}

fn falls_through(f: &FunctionDef, span: Span) -> bool {
    let cfg = build_from_module(
        &f.name,
        &Module {
            body: f.body.clone(),
            span,
        },
    );
    cfg.final_blocks.iter().any(|id| {
        !matches!(
            cfg.block(*id).statements.last().map(|s| &s.kind),
            Some(StmtKind::Return(Some(_))) | Some(StmtKind::Raise { .. })
        )
    })
}

impl<'t> Engine<'t> {
    fn new(table: &'t HeuristicTable, root: Option<&str>, inputs: &[Input]) -> Self {
        let mut e = Engine {
            table,
            files: inputs.iter().map(|i| i.file.clone()).collect(),
            scopes: Vec::new(),
            funcs: BTreeMap::new(),
            classes: BTreeMap::new(),
            class_bases: BTreeMap::new(),
            vars: BTreeMap::new(),
            args: BTreeMap::new(),
            constraints: BTreeMap::new(),
            returns: BTreeMap::new(),
            fields: BTreeMap::new(),
            open_fields: BTreeSet::new(),
            escaped: BTreeSet::new(),
            diagnostics: BTreeSet::new(),
            changed: false,
        };
        let project: BTreeSet<String> = inputs
            .iter()
            .flat_map(|i| {
                let parts: Vec<&str> = i.name.split('.').collect();
                (1..=parts.len()).map(move |k| parts[..k].join("."))
            })
            .collect();
        for (m, input) in inputs.iter().enumerate() {
            let ctx = NameContext::project_module(
                &input.name,
                input.is_package,
                &input.module,
                root,
                &project,
            );
            let idx = e.push_scope(
                input.name.clone(),
                m,
                Kind::Module,
                None,
                None,
                ctx,
                &input.module.body,
                &[],
            );
            e.extract(&input.module.body, idx, "");
        }
        let names: Vec<String> = e.classes.keys().cloned().collect();
        for c in names {
            let class = e.classes[&c].clone();
            let ctx = e.scopes[class.outer].ctx.clone();
            let bases = class
                .bases
                .iter()
                .filter_map(|b| match crate::modgraph::resolve_fqn(b, &ctx) {
                    Resolved::Fqn(f) if e.classes.contains_key(&f) => Some(f),
                    _ => None,
                })
                .collect();
            e.class_bases.insert(c, bases);
        }
        e.seed_constraints();
        e
    }

    #[allow(clippy::too_many_arguments)]
    fn push_scope(
        &mut self,
        fqn: String,
        module: usize,
        kind: Kind,
        parent: Option<usize>,
        owner: Option<String>,
        ctx: NameContext,
        body: &[Stmt],
        params: &[String],
    ) -> usize {
        let mut s = Scope {
            fqn,
            module,
            kind,
            parent,
            owner,
            ctx,
            body: Rc::new(body.to_vec()),
            binds: BTreeMap::new(),
            first_var_line: BTreeMap::new(),
            globals: BTreeSet::new(),
            nonlocals: BTreeSet::new(),
        };
        for p in params {
            s.binds.entry(p.clone()).or_default().insert(Bind::Param);
        }
        collect_binds(body, &mut s);
        self.scopes.push(s);
        self.scopes.len() - 1
    }

    fn lookup_parent(&self, owner: usize) -> usize {
        if self.scopes[owner].kind == Kind::Class {
            self.scopes[owner].parent.unwrap_or(owner)
        } else {
            owner
        }
    }

    fn extract(&mut self, body: &[Stmt], owner: usize, qual: &str) {
        for s in body {
            match &s.kind {
                StmtKind::FunctionDef(f) => {
                    let qualname = if qual.is_empty() {
                        f.name.clone()
                    } else {
                        format!("{qual}.{}", f.name)
                    };
                    let fqn = format!("{}.{}", self.scopes[owner].fqn, f.name);
                    let parent = self.lookup_parent(owner);
                    let ctx = self.scopes[parent]
                        .ctx
                        .scope(&f.body, &fqn, &f.params.names());
                    let method_of = (self.scopes[owner].kind == Kind::Class)
                        .then(|| self.scopes[owner].fqn.clone());
                    let idx = self.push_scope(
                        fqn.clone(),
                        self.scopes[owner].module,
                        Kind::Function,
                        Some(parent),
                        Some(qualname.clone()),
                        ctx,
                        &f.body,
                        &f.params.names(),
                    );
                    if let Some(c) = &method_of {
                        if let Some(class) = self.classes.get_mut(c) {
                            class.methods.insert(f.name.clone(), fqn.clone());
                        }
                    }
                    if !f.decorators.is_empty() && flavor(&f.decorators) == Flavor::Plain {
                        self.escaped.insert(fqn.clone());
                    }
                    if f.name.starts_with("__") && f.name.ends_with("__") && f.name != "__init__" {
                        self.escaped.insert(fqn.clone());
                    }
                    self.funcs.insert(
                        fqn.clone(),
                        Func {
                            fqn: fqn.clone(),
                            qualname: qualname.clone(),
                            module: self.scopes[owner].module,
                            scope: idx,
                            outer: owner,
                            def: f.clone(),
                            line: s.span.start_line,
                            method_of,
                            flavor: flavor(&f.decorators),
                            generator: contains_yield(&f.body),
                            falls_through: falls_through(f, s.span),
                            first_return: first_return(&f.body),
                        },
                    );
                    self.extract(&f.body, idx, &qualname);
                }
                StmtKind::ClassDef(c) => {
                    let qualname = if qual.is_empty() {
                        c.name.clone()
                    } else {
                        format!("{qual}.{}", c.name)
                    };
                    let fqn = format!("{}.{}", self.scopes[owner].fqn, c.name);
                    let parent = self.lookup_parent(owner);
                    let ctx = self.scopes[parent].ctx.scope(&c.body, &fqn, &[]);
                    self.classes.insert(
                        fqn.clone(),
                        Class {
                            outer: owner,
                            bases: c.bases.clone(),
                            methods: BTreeMap::new(),
                        },
                    );
                    let idx = self.push_scope(
                        fqn,
                        self.scopes[owner].module,
                        Kind::Class,
                        Some(parent),
                        Some(qualname.clone()),
                        ctx,
                        &c.body,
                        &[],
                    );
                    self.extract(&c.body, idx, &qualname);
                }
                _ => {
                    for b in s.bodies() {
                        self.extract(b, owner, qual);
                    }
                }
            }
        }
    }

    /// Parameter constraints from how the body uses them: concatenation
    /// with a string, and methods owned by a single type.
    fn seed_constraints(&mut self) {
        let funcs: Vec<Func> = self.funcs.values().cloned().collect();
        for f in funcs {
            let params: BTreeSet<String> = f.def.params.names().into_iter().collect();
            let mut found: Vec<(String, String)> = Vec::new();
            let mut visit = |e: &Expr| match &e.kind {
                ExprKind::BinOp {
                    left,
                    op: BinOpKind::Add,
                    right,
                } => {
                    for (a, b) in [(left, right), (right, left)] {
                        if let (
                            ExprKind::Name(p),
                            ExprKind::Constant(Constant::Str(_) | Constant::FString(_)),
                        ) = (&a.kind, &b.kind)
                        {
                            if params.contains(p) {
                                found.push((p.clone(), "str".into()));
                            }
                        }
                    }
                }
                ExprKind::Call { func, .. } => {
                    if let ExprKind::Attribute { value, attr } = &func.kind {
                        if let ExprKind::Name(p) = &value.kind {
                            if params.contains(p) {
                                if let Some(t) = self.table.owner_of_method(attr) {
                                    found.push((p.clone(), t.to_string()));
                                }
                            }
                        }
                    }
                }
                _ => {}
            };
            for s in &f.def.body {
                walk_own_exprs(s, &mut visit);
            }
            // Rebinding the parameter anywhere voids its constraints.
            let rebound: BTreeSet<String> = self.scopes[f.scope]
                .binds
                .iter()
                .filter(|(_, b)| b.len() > 1 || !b.contains(&Bind::Param))
                .map(|(n, _)| n.clone())
                .collect();
            for (p, t) in found {
                if !rebound.contains(&p) {
                    self.constraints
                        .entry((f.fqn.clone(), p))
                        .or_default()
                        .insert(t);
                }
            }
        }
    }

    // ---- fixpoint ----

    fn solve(&mut self) {
        loop {
            self.fixpoint();
            // Parameters still without evidence may receive anything.
            let mut grew = false;
            let funcs: Vec<(String, Vec<String>)> = self
                .funcs
                .values()
                .map(|f| (f.fqn.clone(), f.def.params.names()))
                .collect();
            for (f, params) in funcs {
                if self.escaped.contains(&f) {
                    continue;
                }
                for p in params {
                    if self.param_types(&f, &p).is_empty() {
                        self.args
                            .entry((f.clone(), p))
                            .or_default()
                            .insert(ANY.to_string());
                        grew = true;
                    }
                }
            }
            if !grew {
                return;
            }
        }
    }

    fn fixpoint(&mut self) {
        loop {
            self.changed = false;
            for i in 0..self.scopes.len() {
                let body = self.scopes[i].body.clone();
                self.stmts(&body, i);
            }
            if !self.changed {
                return;
            }
        }
    }

    fn grow(&mut self, set: TypeSet, target: Target) {
        if set.is_empty() {
            return;
        }
        let slot = match target {
            Target::Var(i, n) => self.vars.entry((i, n)).or_default(),
            Target::Arg(f, p) => self.args.entry((f, p)).or_default(),
            Target::Return(f) => self.returns.entry(f).or_default(),
            Target::Field(c, a) => self.fields.entry((c, a)).or_default(),
        };
        for t in set {
            if slot.insert(t) {
                self.changed = true;
            }
        }
    }

    fn escape(&mut self, f: &str) {
        if self.escaped.insert(f.to_string()) {
            self.changed = true;
        }
    }

    fn subclasses(&self, c: &str) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = [c.to_string()].into();
        loop {
            let before = out.len();
            for (k, bases) in &self.class_bases {
                if bases.iter().any(|b| out.contains(b)) {
                    out.insert(k.clone());
                }
            }
            if out.len() == before {
                return out;
            }
        }
    }

    fn mro(&self, c: &str) -> Vec<String> {
        c3_linearize(c, &|k| self.class_bases.get(k).cloned().unwrap_or_default())
    }

    fn find_method(&self, c: &str, name: &str) -> Option<String> {
        self.mro(c)
            .into_iter()
            .find_map(|k| self.classes.get(&k)?.methods.get(name).cloned())
    }

    fn param_types(&self, f: &str, p: &str) -> TypeSet {
        let func = &self.funcs[f];
        if func.def.params.vararg.as_ref().is_some_and(|v| v.name == p) {
            return one("Tuple");
        }
        if func.def.params.kwarg.as_ref().is_some_and(|v| v.name == p) {
            return one("Dict");
        }
        let first = func.def.params.positional().next().map(|x| x.name.as_str()) == Some(p);
        if first {
            if let Some(c) = &func.method_of {
                match func.flavor {
                    Flavor::Plain => return self.subclasses(c),
                    Flavor::ClassMethod => return one("callable"),
                    Flavor::Static => {}
                }
            }
        }
        let mut out = TypeSet::new();
        if self.escaped.contains(f) {
            out.insert(ANY.to_string());
        }
        let key = (f.to_string(), p.to_string());
        out.extend(self.args.get(&key).into_iter().flatten().cloned());
        out.extend(self.constraints.get(&key).into_iter().flatten().cloned());
        out
    }

    fn default_types(&mut self, f: &str) {
        let func = self.funcs[f].clone();
        for p in func.def.params.all() {
            if let Some(d) = &p.default {
                let t = self.eval_in(d, func.outer);
                self.grow(t, Target::Arg(f.to_string(), p.name.clone()));
            }
        }
    }

    /// Scope that binds `name` as seen from scope `i`.
    fn resolve_scope(&self, name: &str, i: usize) -> Option<usize> {
        let s = &self.scopes[i];
        if s.globals.contains(name) {
            return self
                .scopes
                .iter()
                .position(|x| x.kind == Kind::Module && x.module == s.module);
        }
        if s.binds.contains_key(name) && !s.nonlocals.contains(name) {
            return Some(i);
        }
        s.parent.and_then(|p| self.resolve_scope(name, p))
    }

    fn name_types(&mut self, name: &str, i: usize) -> TypeSet {
        let Some(j) = self.resolve_scope(name, i) else {
            return if builtin_names().contains(&name) {
                one("callable")
            } else {
                any()
            };
        };
        let binds = self.scopes[j].binds.get(name).cloned().unwrap_or_default();
        let mut out = TypeSet::new();
        for b in binds {
            match b {
                Bind::Var => out.extend(
                    self.vars
                        .get(&(j, name.to_string()))
                        .into_iter()
                        .flatten()
                        .cloned(),
                ),
                Bind::Param => {
                    if let Some(owner) = self.function_of(j) {
                        out.extend(self.param_types(&owner, name));
                    }
                }
                Bind::Def => {
                    out.insert("callable".into());
                }
                Bind::Import => {
                    out.insert(ANY.into());
                }
            }
        }
        out
    }

    fn function_of(&self, scope: usize) -> Option<String> {
        let s = &self.scopes[scope];
        (s.kind == Kind::Function).then(|| s.fqn.clone())
    }

    // ---- statements ----

    fn stmts(&mut self, body: &[Stmt], i: usize) {
        for s in body {
            self.stmt(s, i);
        }
    }

    fn stmt(&mut self, s: &Stmt, i: usize) {
        match &s.kind {
            StmtKind::Assign { targets, value } => {
                let t = self.eval_in(value, i);
                for target in targets {
                    match (&target.kind, &value.kind) {
                        (
                            ExprKind::Tuple(ts) | ExprKind::List(ts),
                            ExprKind::Tuple(vs) | ExprKind::List(vs),
                        ) if ts.len() == vs.len()
                            && !ts
                                .iter()
                                .chain(vs)
                                .any(|x| matches!(x.kind, ExprKind::Starred(_))) =>
                        {
                            for (a, b) in ts.iter().zip(vs) {
                                let bt = self.eval_in(b, i);
                                self.bind(a, bt, i);
                            }
                        }
                        _ => self.bind(target, t.clone(), i),
                    }
                }
            }
            StmtKind::AugAssign { target, op, value } => {
                let l = self.eval_in(target, i);
                let r = self.eval_in(value, i);
                let mut out = TypeSet::new();
                for a in &l {
                    for b in &r {
                        if a == ANY || b == ANY {
                            out.insert(ANY.into());
                        } else {
                            out.extend(self.table.binop_or_any(*op, a, b));
                        }
                    }
                }
                self.bind(target, out, i);
            }
            StmtKind::Return(v) => {
                if let Some(f) = self.function_of(i) {
                    let t = match v {
                        Some(e) => self.eval_in(e, i),
                        None => one("None"),
                    };
                    self.grow(t, Target::Return(f));
                }
            }
            StmtKind::For { target, iter, .. } => {
                let t = self.eval_in(iter, i);
                let elems: TypeSet = t.iter().map(|x| element_type(x).to_string()).collect();
                self.bind(target, if elems.is_empty() { any() } else { elems }, i);
            }
            StmtKind::With { items, .. } => {
                for it in items {
                    self.eval_in(&it.context, i);
                    if let Some(v) = &it.vars {
                        self.bind(v, any(), i);
                    }
                }
            }
            StmtKind::Try { handlers, .. } => {
                for h in handlers {
                    if let Some(t) = &h.typ {
                        self.eval_in(t, i);
                    }
                    if let Some(n) = &h.name {
                        self.grow(any(), Target::Var(self.store_scope(n, i), n.clone()));
                    }
                }
            }
            StmtKind::FunctionDef(f) => {
                for d in &f.decorators {
                    self.eval_in(d, i);
                }
                let fqn = format!("{}.{}", self.scopes[i].fqn, f.name);
                if self.funcs.contains_key(&fqn) {
                    self.default_types(&fqn);
                }
            }
            StmtKind::ClassDef(c) => {
                for e in c.decorators.iter().chain(&c.bases) {
                    self.eval_in(e, i);
                }
                for k in &c.keywords {
                    self.eval_in(&k.value, i);
                }
                // Class-level assignments are also attributes of instances.
                let cfqn = format!("{}.{}", self.scopes[i].fqn, c.name);
                if let Some(ci) = self
                    .scopes
                    .iter()
                    .position(|s| s.fqn == cfqn && s.kind == Kind::Class)
                {
                    let names: Vec<String> = self.scopes[ci]
                        .binds
                        .iter()
                        .filter(|(_, b)| b.contains(&Bind::Var))
                        .map(|(n, _)| n.clone())
                        .collect();
                    for n in names {
                        let t = self.vars.get(&(ci, n.clone())).cloned().unwrap_or_default();
                        self.grow(t, Target::Field(cfqn.clone(), n));
                    }
                }
            }
            _ => {
                for e in s.header_exprs() {
                    self.eval_in(e, i);
                }
            }
        }
        if !matches!(s.kind, StmtKind::FunctionDef(_) | StmtKind::ClassDef(_)) {
            for b in s.bodies() {
                self.stmts(b, i);
            }
        }
    }

    fn store_scope(&self, name: &str, i: usize) -> usize {
        let s = &self.scopes[i];
        if s.globals.contains(name) || s.nonlocals.contains(name) {
            if let Some(p) = s.parent {
                if let Some(j) = self.resolve_scope(name, p) {
                    return j;
                }
            }
        }
        i
    }

    fn bind(&mut self, target: &Expr, t: TypeSet, i: usize) {
        match &target.kind {
            ExprKind::Name(n) => {
                let j = self.store_scope(n, i);
                self.grow(t, Target::Var(j, n.clone()));
            }
            ExprKind::Tuple(ts) | ExprKind::List(ts) => {
                for x in ts {
                    self.bind(x, any(), i);
                }
            }
            ExprKind::Starred(x) => self.bind(x, one("List"), i),
            ExprKind::Attribute { value, attr } => {
                let recv = self.eval_in(value, i);
                for r in recv {
                    if self.classes.contains_key(&r) {
                        self.grow(t.clone(), Target::Field(r, attr.clone()));
                    } else if r == ANY && self.open_fields.insert(attr.clone()) {
                        self.changed = true;
                    }
                }
            }
            _ => {
                self.eval_in(target, i);
            }
        }
    }

    fn eval_in(&mut self, e: &Expr, i: usize) -> TypeSet {
        let mut ev = Eval {
            engine: self,
            scope: i,
            shadow: Vec::new(),
        };
        ev.eval(e)
    }

    fn diag(&mut self, module: usize, line: u32, message: String) {
        let module = self
            .scopes
            .iter()
            .find(|s| s.module == module)
            .map(|s| s.fqn.clone())
            .unwrap_or_default();
        self.diagnostics.insert(Diagnostic {
            module,
            line,
            message,
        });
    }

    // ---- output ----

    fn records(&self) -> Vec<TypeRecord> {
        let mut out = Vec::new();
        let nonempty = |s: TypeSet| if s.is_empty() { any() } else { s };
        for f in self.funcs.values() {
            let file = self.files[f.module].clone();
            let mut ret = if f.generator {
                one("Generator")
            } else {
                let mut r = self.returns.get(&f.fqn).cloned().unwrap_or_default();
                if f.falls_through {
                    r.insert("None".into());
                }
                r
            };
            ret = nonempty(ret);
            out.push(TypeRecord {
                file: file.clone(),
                line_number: f.first_return.filter(|_| !f.generator).unwrap_or(f.line),
                function: Some(f.qualname.clone()),
                variable: None,
                parameter: None,
                types: ret,
            });
            for p in f.def.params.all() {
                out.push(TypeRecord {
                    file: file.clone(),
                    line_number: f.line,
                    function: Some(f.qualname.clone()),
                    variable: None,
                    parameter: Some(p.name.clone()),
                    types: nonempty(self.param_types(&f.fqn, &p.name)),
                });
            }
        }
        for (i, s) in self.scopes.iter().enumerate() {
            if s.kind == Kind::Class {
                continue;
            }
            for (name, line) in &s.first_var_line {
                let mut types = self
                    .vars
                    .get(&(i, name.clone()))
                    .cloned()
                    .unwrap_or_default();
                let binds = &s.binds[name];
                if binds.contains(&Bind::Def) {
                    types.insert("callable".into());
                }
                if binds.contains(&Bind::Import) {
                    types.insert(ANY.into());
                }
                if binds.contains(&Bind::Param) {
                    continue;
                }
                out.push(TypeRecord {
                    file: self.files[s.module].clone(),
                    line_number: *line,
                    function: s.owner.clone(),
                    variable: Some(name.clone()),
                    parameter: None,
                    types: nonempty(types),
                });
            }
        }
        out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        out
    }
}

enum Target {
    Var(usize, String),
    Arg(String, String),
    Return(String),
    Field(String, String),
}

/// Calls `visit` on every expression a statement list evaluates itself,
/// skipping nested function, class and lambda bodies.
fn walk_own_exprs(s: &Stmt, visit: &mut dyn FnMut(&Expr)) {
    fn expr(e: &Expr, visit: &mut dyn FnMut(&Expr)) {
        visit(e);
        if matches!(e.kind, ExprKind::Lambda { .. }) {
            return;
        }
        for c in NodeRef::Expr(e).children() {
            match c {
                NodeRef::Expr(x) => expr(x, visit),
                NodeRef::Keyword(k) => expr(&k.value, visit),
                _ => {}
            }
        }
    }
    for e in s.header_exprs() {
        expr(e, visit);
    }
    if !matches!(s.kind, StmtKind::FunctionDef(_) | StmtKind::ClassDef(_)) {
        for b in s.bodies() {
            for x in b {
                walk_own_exprs(x, visit);
            }
        }
    }
}

fn collect_binds(body: &[Stmt], scope: &mut Scope) {
    for s in body {
        let line = s.span.start_line;
        match &s.kind {
            StmtKind::Global(ns) => scope.globals.extend(ns.iter().cloned()),
            StmtKind::Nonlocal(ns) => scope.nonlocals.extend(ns.iter().cloned()),
            _ => {}
        }
        let kind = match &s.kind {
            StmtKind::FunctionDef(_) | StmtKind::ClassDef(_) => Bind::Def,
            StmtKind::Import(_) | StmtKind::ImportFrom { .. } => Bind::Import,
            _ => Bind::Var,
        };
        for d in stmt_defs(s) {
            if kind == Bind::Var {
                scope.first_var_line.entry(d.name.clone()).or_insert(line);
            }
            scope.binds.entry(d.name).or_default().insert(kind);
        }
        if !matches!(s.kind, StmtKind::FunctionDef(_) | StmtKind::ClassDef(_)) {
            for b in s.bodies() {
                collect_binds(b, scope);
            }
        }
    }
    let outside: Vec<String> = scope
        .globals
        .iter()
        .chain(&scope.nonlocals)
        .cloned()
        .collect();
    for n in outside {
        scope.binds.remove(&n);
        scope.first_var_line.remove(&n);
    }
}

/// Callee of a call expression.
enum Callee {
    Function { fqn: String, bound: bool },
    Class(String),
    Known(TypeSet),
    Unknown,
}

struct Eval<'a, 't> {
    engine: &'a mut Engine<'t>,
    scope: usize,
    /// Lambda parameters and comprehension variables in scope.
    shadow: Vec<BTreeMap<String, TypeSet>>,
}

impl Eval<'_, '_> {
    fn shadowed(&self, n: &str) -> Option<TypeSet> {
        self.shadow.iter().rev().find_map(|m| m.get(n).cloned())
    }

    /// Whether `n` is a local variable or parameter rather than a name the
    /// context can qualify.
    fn is_dynamic(&self, n: &str) -> bool {
        if self.shadowed(n).is_some() {
            return true;
        }
        match self.engine.resolve_scope(n, self.scope) {
            Some(j) => self.engine.scopes[j]
                .binds
                .get(n)
                .is_some_and(|b| b.contains(&Bind::Var) || b.contains(&Bind::Param)),
            None => false,
        }
    }

    fn ctx(&self) -> &NameContext {
        &self.engine.scopes[self.scope].ctx
    }

    fn static_target(&self, e: &Expr) -> Option<String> {
        let d = e.dotted_name()?;
        if self.is_dynamic(d.split('.').next().unwrap_or("")) {
            return None;
        }
        crate::modgraph::resolve_fqn(e, self.ctx())
            .fqn()
            .map(str::to_string)
    }

    fn callee_of(&mut self, func: &Expr) -> Vec<Callee> {
        if let Some(f) = self.static_target(func) {
            let e = &*self.engine;
            if e.funcs.contains_key(&f) {
                // `Class.method(...)` passes the instance explicitly.
                return vec![Callee::Function {
                    fqn: f,
                    bound: false,
                }];
            }
            if e.classes.contains_key(&f) {
                return vec![Callee::Class(f)];
            }
            if let Some(t) = e.table.signature(&f) {
                return vec![Callee::Known(t.clone())];
            }
            if let Some((cls, m)) = f.rsplit_once('.') {
                if e.classes.contains_key(cls) {
                    if let Some(found) = e.find_method(cls, m) {
                        return vec![Callee::Function {
                            fqn: found,
                            bound: false,
                        }];
                    }
                }
            }
            return vec![Callee::Unknown];
        }
        let ExprKind::Attribute { value, attr } = &func.kind else {
            self.eval(func);
            return vec![Callee::Unknown];
        };
        // `super().m(...)`
        if let ExprKind::Call { func: sf, args, .. } = &value.kind {
            if sf.as_name() == Some("super") && args.is_empty() && !self.is_dynamic("super") {
                let cls = self.enclosing_class();
                let mut out = Vec::new();
                if let Some(c) = cls {
                    for sub in self.engine.subclasses(&c) {
                        let mro = self.engine.mro(&sub);
                        let start = mro
                            .iter()
                            .position(|k| *k == c)
                            .map(|p| p + 1)
                            .unwrap_or(mro.len());
                        if let Some(found) = mro[start..]
                            .iter()
                            .find_map(|k| self.engine.classes.get(k)?.methods.get(attr).cloned())
                        {
                            out.push(Callee::Function {
                                fqn: found,
                                bound: true,
                            });
                        }
                    }
                }
                if out.is_empty() {
                    out.push(Callee::Unknown);
                }
                return out;
            }
        }
        let recv = self.eval(value);
        let mut out = Vec::new();
        for t in &recv {
            if self.engine.classes.contains_key(t) {
                match self.engine.find_method(t, attr) {
                    Some(m) => {
                        let bound = self.engine.funcs[&m].flavor != Flavor::Static;
                        out.push(Callee::Function { fqn: m, bound });
                    }
                    None => out.push(Callee::Unknown),
                }
            } else if let Some(r) = self.engine.table.method(t, attr) {
                out.push(Callee::Known(one(r)));
            } else {
                out.push(Callee::Unknown);
                if t == ANY {
                    self.escape_methods(attr);
                }
            }
        }
        if out.is_empty() {
            out.push(Callee::Unknown);
        }
        out
    }

    fn escape_methods(&mut self, name: &str) {
        let hits: Vec<String> = self
            .engine
            .classes
            .values()
            .filter_map(|c| c.methods.get(name).cloned())
            .collect();
        for h in hits {
            self.engine.escape(&h);
        }
    }

    fn enclosing_class(&self) -> Option<String> {
        let mut i = Some(self.scope);
        while let Some(k) = i {
            if let Some(f) = self.engine.function_of(k) {
                if let Some(c) = &self.engine.funcs[&f].method_of {
                    return Some(c.clone());
                }
            }
            i = self.engine.scopes[k].parent;
        }
        None
    }

    fn pass_args(
        &mut self,
        f: &str,
        bound: bool,
        pos: &[(TypeSet, bool)],
        kws: &[(Option<String>, TypeSet)],
    ) {
        let unpacked = pos.iter().any(|(_, s)| *s) || kws.iter().any(|(k, _)| k.is_none());
        if unpacked {
            self.engine.escape(f);
            return;
        }
        let def = self.engine.funcs[f].def.clone();
        let positional: Vec<String> = def.params.positional().map(|p| p.name.clone()).collect();
        let skip = usize::from(bound && self.engine.funcs[f].method_of.is_some());
        for (k, (t, _)) in pos.iter().enumerate() {
            if let Some(p) = positional.get(k + skip) {
                self.engine
                    .grow(t.clone(), Target::Arg(f.to_string(), p.clone()))
            }
        }
        for (k, t) in kws {
            let Some(k) = k else { continue };
            if def.params.all().any(|p| &p.name == k) {
                self.engine
                    .grow(t.clone(), Target::Arg(f.to_string(), k.clone()));
            }
        }
    }

    fn function_result(&self, f: &str) -> TypeSet {
        let func = &self.engine.funcs[f];
        if func.generator {
            return one("Generator");
        }
        let mut r = self.engine.returns.get(f).cloned().unwrap_or_default();
        if func.falls_through {
            r.insert("None".into());
        }
        r
    }

    /// Functions and classes referenced as plain values can be called from
    /// anywhere.
    fn note_value_use(&mut self, e: &Expr) {
        if let Some(f) = self.static_target(e) {
            if self.engine.funcs.contains_key(&f) {
                self.engine.escape(&f);
            }
            if self.engine.classes.contains_key(&f) {
                for sub in self.engine.subclasses(&f) {
                    if let Some(init) = self.engine.find_method(&sub, "__init__") {
                        self.engine.escape(&init);
                    }
                }
            }
        } else if let ExprKind::Attribute { attr, .. } = &e.kind {
            self.escape_methods(attr);
        }
    }
}

impl Typing for Eval<'_, '_> {
    fn table(&self) -> &HeuristicTable {
        self.engine.table
    }

    fn name(&mut self, n: &str) -> TypeSet {
        if let Some(t) = self.shadowed(n) {
            return t;
        }
        self.engine.name_types(n, self.scope)
    }

    fn eval(&mut self, e: &Expr) -> TypeSet {
        match &e.kind {
            ExprKind::Name(_) => {
                self.note_value_use(e);
                let ExprKind::Name(n) = &e.kind else {
                    unreachable!()
                };
                self.name(n)
            }
            ExprKind::Attribute { value, attr } => {
                if self.static_target(e).is_some() {
                    self.note_value_use(e);
                    if let Some(f) = self.static_target(e) {
                        if let Some((cls, a)) = f.rsplit_once('.') {
                            if self.engine.classes.contains_key(cls) {
                                return self.field(cls, a);
                            }
                        }
                    }
                    return any();
                }
                self.note_value_use(e);
                let recv = self.eval(value);
                self.attribute(&recv, attr)
            }
            _ => self.eval_default(e),
        }
    }

    fn call(&mut self, e: &Expr) -> TypeSet {
        let ExprKind::Call {
            func,
            args,
            keywords,
        } = &e.kind
        else {
            return any();
        };
        let callees = self.callee_of(func);
        let pos: Vec<(TypeSet, bool)> = args
            .iter()
            .map(|a| match &a.kind {
                ExprKind::Starred(x) => (self.eval(x), true),
                _ => (self.eval(a), false),
            })
            .collect();
        let kws: Vec<(Option<String>, TypeSet)> = keywords
            .iter()
            .map(|k| (k.arg.clone(), self.eval(&k.value)))
            .collect();
        let mut out = TypeSet::new();
        for c in callees {
            match c {
                Callee::Function { fqn, bound } => {
                    self.pass_args(&fqn, bound, &pos, &kws);
                    out.extend(self.function_result(&fqn));
                }
                Callee::Class(cls) => {
                    if let Some(init) = self.engine.find_method(&cls, "__init__") {
                        self.pass_args(&init, true, &pos, &kws);
                    }
                    out.insert(cls);
                }
                Callee::Known(t) => out.extend(t),
                Callee::Unknown => {
                    out.insert(ANY.into());
                }
            }
        }
        out
    }

    fn attribute(&mut self, recv: &TypeSet, attr: &str) -> TypeSet {
        let mut out = TypeSet::new();
        for t in recv {
            if self.engine.classes.contains_key(t) {
                out.extend(self.field(t, attr));
            } else {
                out.insert(ANY.into());
            }
        }
        if out.is_empty() {
            out = any();
        }
        out
    }

    fn mixed_operands(&mut self, line: u32, l: &str, r: &str) {
        let m = self.engine.scopes[self.scope].module;
        self.engine.diag(
            m,
            line,
            format!("`+` on `{l}` and `{r}` has no common type"),
        );
    }

    fn lambda(&mut self, params: &Parameters, body: &Expr) {
        for p in params.all() {
            if let Some(d) = &p.default {
                self.eval(d);
            }
        }
        self.shadow
            .push(params.names().into_iter().map(|n| (n, any())).collect());
        self.eval(body);
        self.shadow.pop();
    }

    fn comprehension(&mut self, generators: &[Comprehension], elts: &[&Expr]) -> Vec<TypeSet> {
        let mut frame = BTreeMap::new();
        self.shadow.push(BTreeMap::new());
        for g in generators {
            let it = self.eval(&g.iter);
            let elems: TypeSet = it.iter().map(|x| element_type(x).to_string()).collect();
            let mut names = BTreeSet::new();
            bound_names(&g.target, &mut names);
            let single = matches!(g.target.kind, ExprKind::Name(_));
            for n in names {
                let t = if single && !elems.is_empty() {
                    elems.clone()
                } else {
                    any()
                };
                frame.insert(n.clone(), t.clone());
                self.shadow.last_mut().unwrap().insert(n, t);
            }
            for c in &g.ifs {
                self.eval(c);
            }
        }
        let out = elts.iter().map(|x| self.eval(x)).collect();
        self.shadow.pop();
        out
    }
}

impl Eval<'_, '_> {
    fn field(&self, cls: &str, attr: &str) -> TypeSet {
        if self.engine.open_fields.contains(attr) {
            return any();
        }
        let mut out = TypeSet::new();
        let mut found = false;
        for k in self.engine.mro(cls) {
            if let Some(t) = self.engine.fields.get(&(k.clone(), attr.to_string())) {
                out.extend(t.iter().cloned());
                found = true;
            }
            if self
                .engine
                .classes
                .get(&k)
                .is_some_and(|c| c.methods.contains_key(attr))
            {
                out.insert("callable".into());
                found = true;
            }
        }
        // Subclasses may set the attribute on the same object.
        for sub in self.engine.subclasses(cls) {
            if let Some(t) = self.engine.fields.get(&(sub, attr.to_string())) {
                out.extend(t.iter().cloned());
                found = true;
            }
        }
        if !found {
            return any();
        }
        out
    }
}

/// Names bound by statements anywhere in `body`, nested scopes included.
fn statement_bound(body: &[Stmt]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in body {
        out.extend(stmt_defs(s).into_iter().map(|d| d.name));
        if let StmtKind::Try { handlers, .. } = &s.kind {
            out.extend(handlers.iter().filter_map(|h| h.name.clone()));
        }
        for b in s.bodies() {
            out.extend(statement_bound(b));
        }
    }
    out
}

fn bound_names(t: &Expr, out: &mut BTreeSet<String>) {
    match &t.kind {
        ExprKind::Name(n) => {
            out.insert(n.clone());
        }
        ExprKind::Tuple(v) | ExprKind::List(v) => v.iter().for_each(|x| bound_names(x, out)),
        ExprKind::Starred(x) => bound_names(x, out),
        _ => {}
    }
}
