//! Parsing, unparsing and traversal of Python source.

pub mod ast;
mod lexer;
mod parser;
mod unparse;

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
pub use ast::*;
pub use parser::is_keyword;
pub use unparse::{
    constant_text, float_repr, stmt_header, str_repr, unparse_expr, unparse_module, unparse_stmt,
};

/// Syntax error or use of a construct outside the supported subset.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub path: String,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.path, self.line, self.col, self.message
        )
    }
}

/// Parse a module. `path` is only used in error messages.
pub fn parse_module(text: &str, path: &str) -> std::result::Result<Module, ParseError> {
    parser::parse(text, path)
}

/// A source file read from disk together with its dotted module name.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
    pub module_name: String,
}

impl SourceFile {
    /// Read `file`. With a `root`, the module name is the dotted path from
    /// `root`; otherwise it is the file stem.
    pub fn read(root: Option<&Path>, file: &Path) -> Result<SourceFile> {
        let text = read_source(file)?;
        let module_name = match root {
            Some(r) => module_name_for_path(r, file)?,
            None => file
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("module")
                .to_string(),
        };
        Ok(SourceFile {
            path: file.to_path_buf(),
            text,
            module_name,
        })
    }

    pub fn parse(&self) -> std::result::Result<Module, ParseError> {
        parse_module(&self.text, &self.path.display().to_string())
    }
}

/// Read a file as UTF-8, rejecting directories and invalid encodings.
pub fn read_source(file: &Path) -> Result<String> {
    let meta = std::fs::metadata(file).map_err(|source| Error::Io {
        path: file.to_path_buf(),
        source,
    })?;
    if !meta.is_file() {
        return Err(Error::NotAFile(file.to_path_buf()));
    }
    let bytes = std::fs::read(file).map_err(|source| Error::Io {
        path: file.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|_| Error::Utf8(file.to_path_buf()))
}

/// Dotted module name of `file` relative to `root`, including the root
/// directory's own name: `(example, example/module_a.py)` gives
/// `example.module_a`, and `__init__.py` names its package.
pub fn module_name_for_path(root: &Path, file: &Path) -> Result<String> {
    let outside = || Error::OutsideRoot {
        file: file.to_path_buf(),
        root: root.to_path_buf(),
    };
    let rel = file.strip_prefix(root).map_err(|_| outside())?;
    if file.extension().and_then(|e| e.to_str()) != Some("py") {
        return Err(Error::NotPython(file.to_path_buf()));
    }
    let mut parts: Vec<String> = Vec::new();
    if let Some(root_name) = root_name(root) {
        parts.push(root_name);
    }
    let comps: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    if comps.is_empty() {
        return Err(outside());
    }
    for (i, c) in comps.iter().enumerate() {
        if i + 1 == comps.len() {
            let stem = c.trim_end_matches(".py");
            if stem != "__init__" {
                parts.push(stem.to_string());
            }
        } else {
            parts.push(c.clone());
        }
    }
    if parts.is_empty() {
        return Err(outside());
    }
    Ok(parts.join("."))
}

/// Last path component of a directory, resolving `.` and `..`.
pub(crate) fn root_name(root: &Path) -> Option<String> {
    let name = root.file_name().map(|n| n.to_string_lossy().into_owned());
    match name {
        Some(n) if n != "." && n != ".." => Some(n),
        _ => std::fs::canonicalize(root)
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned())),
    }
}

// ---- traversal ---------------------------------------------------------

/// Borrowed view of any tree node.
#[derive(Debug, Clone, Copy)]
pub enum NodeRef<'a> {
    Module(&'a Module),
    Stmt(&'a Stmt),
    Expr(&'a Expr),
    Keyword(&'a Keyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Pre,
    Post,
}

impl<'a> NodeRef<'a> {
    pub fn span(&self) -> Span {
        match self {
            NodeRef::Module(m) => m.span,
            NodeRef::Stmt(s) => s.span,
            NodeRef::Expr(e) => e.span,
            NodeRef::Keyword(k) => k.span,
        }
    }

    /// Node kind name, e.g. `Assign`, `Call`, `Name`, `keyword`.
    pub fn kind(&self) -> &'static str {
        match self {
            NodeRef::Module(_) => "Module",
            NodeRef::Stmt(s) => s.kind_name(),
            NodeRef::Keyword(_) => "keyword",
            NodeRef::Expr(e) => match &e.kind {
                ExprKind::Name(_) => "Name",
                ExprKind::Constant(_) => "Constant",
                ExprKind::BinOp { .. } => "BinOp",
                ExprKind::UnaryOp { .. } => "UnaryOp",
                ExprKind::BoolOp { .. } => "BoolOp",
                ExprKind::Compare { .. } => "Compare",
                ExprKind::Call { .. } => "Call",
                ExprKind::Attribute { .. } => "Attribute",
                ExprKind::Subscript { .. } => "Subscript",
                ExprKind::Slice { .. } => "Slice",
                ExprKind::Lambda { .. } => "Lambda",
                ExprKind::ListComp { .. } => "ListComp",
                ExprKind::SetComp { .. } => "SetComp",
                ExprKind::DictComp { .. } => "DictComp",
                ExprKind::GeneratorExp { .. } => "GeneratorExp",
                ExprKind::List(_) => "List",
                ExprKind::Tuple(_) => "Tuple",
                ExprKind::Set(_) => "Set",
                ExprKind::Dict { .. } => "Dict",
                ExprKind::Starred(_) => "Starred",
                ExprKind::IfExp { .. } => "IfExp",
                ExprKind::Yield(_) => "Yield",
                ExprKind::YieldFrom(_) => "YieldFrom",
            },
        }
    }

    /// Direct children in source order.
    pub fn children(&self) -> Vec<NodeRef<'a>> {
        let mut out = Vec::new();
        match *self {
            NodeRef::Module(m) => out.extend(m.body.iter().map(NodeRef::Stmt)),
            NodeRef::Keyword(k) => out.push(NodeRef::Expr(&k.value)),
            NodeRef::Stmt(s) => stmt_children(s, &mut out),
            NodeRef::Expr(e) => expr_children(e, &mut out),
        }
        out
    }
}

fn params_children<'a>(p: &'a Parameters, out: &mut Vec<NodeRef<'a>>) {
    for x in p.all() {
        if let Some(a) = &x.annotation {
            out.push(NodeRef::Expr(a));
        }
        if let Some(d) = &x.default {
            out.push(NodeRef::Expr(d));
        }
    }
}

fn stmt_children<'a>(s: &'a Stmt, out: &mut Vec<NodeRef<'a>>) {
    let exprs = |v: &'a [Expr], out: &mut Vec<NodeRef<'a>>| out.extend(v.iter().map(NodeRef::Expr));
    let stmts = |v: &'a [Stmt], out: &mut Vec<NodeRef<'a>>| out.extend(v.iter().map(NodeRef::Stmt));
    match &s.kind {
        StmtKind::FunctionDef(f) => {
            exprs(&f.decorators, out);
            params_children(&f.params, out);
            if let Some(r) = &f.returns {
                out.push(NodeRef::Expr(r));
            }
            stmts(&f.body, out);
        }
        StmtKind::ClassDef(c) => {
            exprs(&c.decorators, out);
            exprs(&c.bases, out);
            out.extend(c.keywords.iter().map(NodeRef::Keyword));
            stmts(&c.body, out);
        }
        StmtKind::Assign { targets, value } => {
            exprs(targets, out);
            out.push(NodeRef::Expr(value));
        }
        StmtKind::AugAssign { target, value, .. } => {
            out.push(NodeRef::Expr(target));
            out.push(NodeRef::Expr(value));
        }
        StmtKind::Return(v) => out.extend(v.iter().map(NodeRef::Expr)),
        StmtKind::If { test, body, orelse } | StmtKind::While { test, body, orelse } => {
            out.push(NodeRef::Expr(test));
            stmts(body, out);
            stmts(orelse, out);
        }
        StmtKind::For {
            target,
            iter,
            body,
            orelse,
        } => {
            out.push(NodeRef::Expr(target));
            out.push(NodeRef::Expr(iter));
            stmts(body, out);
            stmts(orelse, out);
        }
        StmtKind::Expr(e) => out.push(NodeRef::Expr(e)),
        StmtKind::Del(t) => exprs(t, out),
        StmtKind::Assert { test, msg } => {
            out.push(NodeRef::Expr(test));
            out.extend(msg.iter().map(NodeRef::Expr));
        }
        StmtKind::Raise { exc, cause } => {
            out.extend(exc.iter().map(NodeRef::Expr));
            out.extend(cause.iter().map(NodeRef::Expr));
        }
        StmtKind::Try {
            body,
            handlers,
            orelse,
            finalbody,
        } => {
            stmts(body, out);
            for h in handlers {
                out.extend(h.typ.iter().map(NodeRef::Expr));
                stmts(&h.body, out);
            }
            stmts(orelse, out);
            stmts(finalbody, out);
        }
        StmtKind::With { items, body } => {
            for it in items {
                out.push(NodeRef::Expr(&it.context));
                out.extend(it.vars.iter().map(NodeRef::Expr));
            }
            stmts(body, out);
        }
        StmtKind::Break
        | StmtKind::Continue
        | StmtKind::Pass
        | StmtKind::Import(_)
        | StmtKind::ImportFrom { .. }
        | StmtKind::Global(_)
        | StmtKind::Nonlocal(_) => {}
    }
}

fn comp_children<'a>(gens: &'a [Comprehension], out: &mut Vec<NodeRef<'a>>) {
    for g in gens {
        out.push(NodeRef::Expr(&g.target));
        out.push(NodeRef::Expr(&g.iter));
        out.extend(g.ifs.iter().map(NodeRef::Expr));
    }
}

fn expr_children<'a>(e: &'a Expr, out: &mut Vec<NodeRef<'a>>) {
    match &e.kind {
        ExprKind::Name(_) | ExprKind::Constant(_) => {}
        ExprKind::BinOp { left, right, .. } => {
            out.push(NodeRef::Expr(left));
            out.push(NodeRef::Expr(right));
        }
        ExprKind::UnaryOp { operand, .. } => out.push(NodeRef::Expr(operand)),
        ExprKind::BoolOp { values, .. } => out.extend(values.iter().map(NodeRef::Expr)),
        ExprKind::Compare {
            left, comparators, ..
        } => {
            out.push(NodeRef::Expr(left));
            out.extend(comparators.iter().map(NodeRef::Expr));
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            out.push(NodeRef::Expr(func));
            out.extend(args.iter().map(NodeRef::Expr));
            out.extend(keywords.iter().map(NodeRef::Keyword));
        }
        ExprKind::Attribute { value, .. } => out.push(NodeRef::Expr(value)),
        ExprKind::Subscript { value, slice } => {
            out.push(NodeRef::Expr(value));
            out.push(NodeRef::Expr(slice));
        }
        ExprKind::Slice { lower, upper, step } => {
            for x in [lower, upper, step].into_iter().flatten() {
                out.push(NodeRef::Expr(x));
            }
        }
        ExprKind::Lambda { params, body } => {
            params_children(params, out);
            out.push(NodeRef::Expr(body));
        }
        ExprKind::ListComp { elt, generators }
        | ExprKind::SetComp { elt, generators }
        | ExprKind::GeneratorExp { elt, generators } => {
            out.push(NodeRef::Expr(elt));
            comp_children(generators, out);
        }
        ExprKind::DictComp {
            key,
            value,
            generators,
        } => {
            out.push(NodeRef::Expr(key));
            out.push(NodeRef::Expr(value));
            comp_children(generators, out);
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            out.extend(elts.iter().map(NodeRef::Expr))
        }
        ExprKind::Dict { keys, values } => {
            for (k, v) in keys.iter().zip(values) {
                if let Some(k) = k {
                    out.push(NodeRef::Expr(k));
                }
                out.push(NodeRef::Expr(v));
            }
        }
        ExprKind::Starred(v) | ExprKind::YieldFrom(v) => out.push(NodeRef::Expr(v)),
        ExprKind::IfExp { test, body, orelse } => {
            out.push(NodeRef::Expr(body));
            out.push(NodeRef::Expr(test));
            out.push(NodeRef::Expr(orelse));
        }
        ExprKind::Yield(v) => out.extend(v.iter().map(|x| NodeRef::Expr(x))),
    }
}

/// Every node reachable from `root` exactly once, in pre- or post-order.
pub fn walk(root: NodeRef<'_>, order: Order) -> Vec<NodeRef<'_>> {
    let mut out = Vec::new();
    fn go<'a>(n: NodeRef<'a>, order: Order, out: &mut Vec<NodeRef<'a>>) {
        if order == Order::Pre {
            out.push(n);
        }
        for c in n.children() {
            go(c, order, out);
        }
        if order == Order::Post {
            out.push(n);
        }
    }
    go(root, order, &mut out);
    out
}

/// All expressions under `e` (inclusive), pre-order.
pub fn sub_exprs(e: &Expr) -> Vec<&Expr> {
    walk(NodeRef::Expr(e), Order::Pre)
        .into_iter()
        .filter_map(|n| match n {
            NodeRef::Expr(x) => Some(x),
            _ => None,
        })
        .collect()
}

/// In-place tree visitor. Override a method and call the matching `walk_*`
/// function to keep descending.
pub trait VisitMut {
    fn visit_stmt(&mut self, s: &mut Stmt) {
        walk_stmt_mut(self, s);
    }
    fn visit_expr(&mut self, e: &mut Expr) {
        walk_expr_mut(self, e);
    }
    fn visit_span(&mut self, _span: &mut Span) {}
}

pub fn walk_module_mut<V: VisitMut + ?Sized>(v: &mut V, m: &mut Module) {
    v.visit_span(&mut m.span);
    for s in &mut m.body {
        v.visit_stmt(s);
    }
}

fn walk_params_mut<V: VisitMut + ?Sized>(v: &mut V, p: &mut Parameters) {
    let Parameters {
        posonly,
        args,
        vararg,
        kwonly,
        kwarg,
    } = p;
    let all = posonly
        .iter_mut()
        .chain(args.iter_mut())
        .chain(vararg.iter_mut())
        .chain(kwonly.iter_mut())
        .chain(kwarg.iter_mut());
    for x in all {
        v.visit_span(&mut x.span);
        if let Some(a) = &mut x.annotation {
            v.visit_expr(a);
        }
        if let Some(d) = &mut x.default {
            v.visit_expr(d);
        }
    }
}

pub fn walk_stmt_mut<V: VisitMut + ?Sized>(v: &mut V, s: &mut Stmt) {
    v.visit_span(&mut s.span);
    match &mut s.kind {
        StmtKind::FunctionDef(f) => {
            f.decorators.iter_mut().for_each(|e| v.visit_expr(e));
            walk_params_mut(v, &mut f.params);
            if let Some(r) = &mut f.returns {
                v.visit_expr(r);
            }
            f.body.iter_mut().for_each(|s| v.visit_stmt(s));
        }
        StmtKind::ClassDef(c) => {
            c.decorators.iter_mut().for_each(|e| v.visit_expr(e));
            c.bases.iter_mut().for_each(|e| v.visit_expr(e));
            for k in &mut c.keywords {
                v.visit_span(&mut k.span);
                v.visit_expr(&mut k.value);
            }
            c.body.iter_mut().for_each(|s| v.visit_stmt(s));
        }
        StmtKind::Assign { targets, value } => {
            targets.iter_mut().for_each(|e| v.visit_expr(e));
            v.visit_expr(value);
        }
        StmtKind::AugAssign { target, value, .. } => {
            v.visit_expr(target);
            v.visit_expr(value);
        }
        StmtKind::Return(x) => {
            if let Some(x) = x {
                v.visit_expr(x);
            }
        }
        StmtKind::If { test, body, orelse } | StmtKind::While { test, body, orelse } => {
            v.visit_expr(test);
            body.iter_mut().for_each(|s| v.visit_stmt(s));
            orelse.iter_mut().for_each(|s| v.visit_stmt(s));
        }
        StmtKind::For {
            target,
            iter,
            body,
            orelse,
        } => {
            v.visit_expr(target);
            v.visit_expr(iter);
            body.iter_mut().for_each(|s| v.visit_stmt(s));
            orelse.iter_mut().for_each(|s| v.visit_stmt(s));
        }
        StmtKind::Import(names) | StmtKind::ImportFrom { names, .. } => {
            names.iter_mut().for_each(|a| v.visit_span(&mut a.span));
        }
        StmtKind::Expr(e) => v.visit_expr(e),
        StmtKind::Del(t) => t.iter_mut().for_each(|e| v.visit_expr(e)),
        StmtKind::Assert { test, msg } => {
            v.visit_expr(test);
            if let Some(m) = msg {
                v.visit_expr(m);
            }
        }
        StmtKind::Raise { exc, cause } => {
            if let Some(e) = exc {
                v.visit_expr(e);
            }
            if let Some(c) = cause {
                v.visit_expr(c);
            }
        }
        StmtKind::Try {
            body,
            handlers,
            orelse,
            finalbody,
        } => {
            body.iter_mut().for_each(|s| v.visit_stmt(s));
            for h in handlers {
                v.visit_span(&mut h.span);
                if let Some(t) = &mut h.typ {
                    v.visit_expr(t);
                }
                h.body.iter_mut().for_each(|s| v.visit_stmt(s));
            }
            orelse.iter_mut().for_each(|s| v.visit_stmt(s));
            finalbody.iter_mut().for_each(|s| v.visit_stmt(s));
        }
        StmtKind::With { items, body } => {
            for it in items {
                v.visit_expr(&mut it.context);
                if let Some(x) = &mut it.vars {
                    v.visit_expr(x);
                }
            }
            body.iter_mut().for_each(|s| v.visit_stmt(s));
        }
        StmtKind::Break
        | StmtKind::Continue
        | StmtKind::Pass
        | StmtKind::Global(_)
        | StmtKind::Nonlocal(_) => {}
    }
}

fn walk_comps_mut<V: VisitMut + ?Sized>(v: &mut V, gens: &mut [Comprehension]) {
    for g in gens {
        v.visit_expr(&mut g.target);
        v.visit_expr(&mut g.iter);
        g.ifs.iter_mut().for_each(|e| v.visit_expr(e));
    }
}

pub fn walk_expr_mut<V: VisitMut + ?Sized>(v: &mut V, e: &mut Expr) {
    v.visit_span(&mut e.span);
    match &mut e.kind {
        ExprKind::Name(_) | ExprKind::Constant(_) => {}
        ExprKind::BinOp { left, right, .. } => {
            v.visit_expr(left);
            v.visit_expr(right);
        }
        ExprKind::UnaryOp { operand, .. } => v.visit_expr(operand),
        ExprKind::BoolOp { values, .. } => values.iter_mut().for_each(|e| v.visit_expr(e)),
        ExprKind::Compare {
            left, comparators, ..
        } => {
            v.visit_expr(left);
            comparators.iter_mut().for_each(|e| v.visit_expr(e));
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            v.visit_expr(func);
            args.iter_mut().for_each(|e| v.visit_expr(e));
            for k in keywords {
                v.visit_span(&mut k.span);
                v.visit_expr(&mut k.value);
            }
        }
        ExprKind::Attribute { value, .. } => v.visit_expr(value),
        ExprKind::Subscript { value, slice } => {
            v.visit_expr(value);
            v.visit_expr(slice);
        }
        ExprKind::Slice { lower, upper, step } => {
            for x in [lower, upper, step].into_iter().flatten() {
                v.visit_expr(x);
            }
        }
        ExprKind::Lambda { params, body } => {
            walk_params_mut(v, params);
            v.visit_expr(body);
        }
        ExprKind::ListComp { elt, generators }
        | ExprKind::SetComp { elt, generators }
        | ExprKind::GeneratorExp { elt, generators } => {
            v.visit_expr(elt);
            walk_comps_mut(v, generators);
        }
        ExprKind::DictComp {
            key,
            value,
            generators,
        } => {
            v.visit_expr(key);
            v.visit_expr(value);
            walk_comps_mut(v, generators);
        }
        ExprKind::List(elts) | ExprKind::Tuple(elts) | ExprKind::Set(elts) => {
            elts.iter_mut().for_each(|e| v.visit_expr(e))
        }
        ExprKind::Dict { keys, values } => {
            for (k, val) in keys.iter_mut().zip(values.iter_mut()) {
                if let Some(k) = k {
                    v.visit_expr(k);
                }
                v.visit_expr(val);
            }
        }
        ExprKind::Starred(x) | ExprKind::YieldFrom(x) => v.visit_expr(x),
        ExprKind::IfExp { test, body, orelse } => {
            v.visit_expr(body);
            v.visit_expr(test);
            v.visit_expr(orelse);
        }
        ExprKind::Yield(x) => {
            if let Some(x) = x {
                v.visit_expr(x);
            }
        }
    }
}

struct ClearSpans;

impl VisitMut for ClearSpans {
    fn visit_span(&mut self, span: &mut Span) {
        *span = Span::default();
    }
}

/// Copy of `m` with every span zeroed.
pub fn without_spans(m: &Module) -> Module {
    let mut m = m.clone();
    walk_module_mut(&mut ClearSpans, &mut m);
    m
}

/// Tree equality ignoring source spans.
pub fn structurally_equal(a: &Module, b: &Module) -> bool {
    without_spans(a) == without_spans(b)
}

pub fn stmts_structurally_equal(a: &[Stmt], b: &[Stmt]) -> bool {
    let wrap = |body: &[Stmt]| Module {
        body: body.to_vec(),
        span: Span::default(),
    };
    structurally_equal(&wrap(a), &wrap(b))
}

#[cfg(test)]
mod tests;
