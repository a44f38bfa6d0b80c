//! Recursive-descent parser over the token stream from [`super::lexer`].
//!
//! Grammar follows the CPython 3 LL(1) grammar restricted to the supported
//! subset. Anything outside it is a [`ParseError`] at the first offending
//! token.

use super::ast::*;
use super::lexer::{tokenize, StrKind, StrTok, Tok, Token};
use super::ParseError;

const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import",
    "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

type PResult<T> = Result<T, ParseError>;

pub fn parse(text: &str, path: &str) -> PResult<Module> {
    let toks = tokenize(text, path)?;
    let mut p = Parser {
        toks,
        pos: 0,
        path: path.to_string(),
        prev_end: (1, 0),
    };
    let mut body = Vec::new();
    while !matches!(p.peek(), Tok::End) {
        if matches!(p.peek(), Tok::Newline) {
            p.advance();
            continue;
        }
        body.extend(p.statement()?);
    }
    let end = p.toks.last().map(|t| t.end).unwrap_or((1, 0));
    let span = Span::new(1, 0, end.0, end.1);
    Ok(Module { body, span })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    path: String,
    prev_end: (u32, u32),
}

fn span_of(start: (u32, u32), end: (u32, u32)) -> Span {
    Span::new(start.0, start.1, end.0, end.1)
}

impl Parser {
    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_nth(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn start(&self) -> (u32, u32) {
        self.toks[self.pos].start
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        if !matches!(t.tok, Tok::Newline | Tok::Indent | Tok::Dedent | Tok::End) {
            self.prev_end = t.end;
        }
        t
    }

    fn span_from(&self, start: (u32, u32)) -> Span {
        span_of(start, self.prev_end)
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.start();
        ParseError {
            path: self.path.clone(),
            line,
            col,
            message: msg.into(),
        }
    }

    fn unexpected(&self) -> ParseError {
        let what = match self.peek() {
            Tok::Name(n) => format!("'{n}'"),
            Tok::Int(_) | Tok::Float(_) => "number".to_string(),
            Tok::Str(_) => "string".to_string(),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Newline => "newline".to_string(),
            Tok::Indent => "indent".to_string(),
            Tok::Dedent => "dedent".to_string(),
            Tok::End => "end of file".to_string(),
        };
        self.error_here(format!("invalid syntax: unexpected {what}"))
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected '{op}'")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected '{kw}'")))
        }
    }

    fn expect_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Name(n) if !is_keyword(&n) => {
                self.advance();
                Ok(n)
            }
            _ => Err(self.error_here("expected identifier")),
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline => {
                self.advance();
                Ok(())
            }
            Tok::End => Ok(()),
            _ => Err(self.unexpected()),
        }
    }

    /// Can the current token begin an expression?
    fn starts_expr(&self) -> bool {
        match self.peek() {
            Tok::Name(n) => {
                !is_keyword(n) || matches!(n.as_str(), "not" | "lambda" | "None" | "True" | "False")
            }
            Tok::Int(_) | Tok::Float(_) | Tok::Str(_) => true,
            Tok::Op(o) => matches!(*o, "(" | "[" | "{" | "-" | "+" | "~" | "*" | "..."),
            _ => false,
        }
    }

    // ---- statements ----------------------------------------------------

    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        match self.peek() {
            Tok::Indent => return Err(self.error_here("unexpected indent")),
            Tok::Dedent => return Err(self.error_here("unexpected dedent")),
            _ => {}
        }
        let kw = match self.peek() {
            Tok::Name(n) => n.clone(),
            Tok::Op("@") => return Ok(vec![self.decorated()?]),
            _ => return self.simple_statements(),
        };
        match kw.as_str() {
            "if" => Ok(vec![self.if_stmt()?]),
            "while" => Ok(vec![self.while_stmt()?]),
            "for" => Ok(vec![self.for_stmt()?]),
            "def" => Ok(vec![self.funcdef(Vec::new(), self.start())?]),
            "class" => Ok(vec![self.classdef(Vec::new(), self.start())?]),
            "try" => Ok(vec![self.try_stmt()?]),
            "with" => Ok(vec![self.with_stmt()?]),
            "async" | "await" => Err(self.error_here(format!("'{kw}' is not supported"))),
            _ => self.simple_statements(),
        }
    }

    fn simple_statements(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.simple_statement()?];
        while self.eat_op(";") {
            if matches!(self.peek(), Tok::Newline | Tok::End) {
                break;
            }
            out.push(self.simple_statement()?);
        }
        self.expect_newline()?;
        Ok(out)
    }

    fn suite(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_op(":")?;
        if !matches!(self.peek(), Tok::Newline) {
            return self.simple_statements();
        }
        self.advance();
        if !matches!(self.peek(), Tok::Indent) {
            return Err(self.error_here("expected an indented block"));
        }
        self.advance();
        let mut body = Vec::new();
        loop {
            match self.peek() {
                Tok::Dedent => {
                    self.advance();
                    break;
                }
                Tok::End => break,
                Tok::Newline => {
                    self.advance();
                }
                _ => body.extend(self.statement()?),
            }
        }
        Ok(body)
    }

    fn simple_statement(&mut self) -> PResult<Stmt> {
        let start = self.start();
        let kw = match self.peek() {
            Tok::Name(n) => n.clone(),
            _ => String::new(),
        };
        let kind = match kw.as_str() {
            "pass" => {
                self.advance();
                StmtKind::Pass
            }
            "break" => {
                self.advance();
                StmtKind::Break
            }
            "continue" => {
                self.advance();
                StmtKind::Continue
            }
            "return" => {
                self.advance();
                let value = if self.starts_expr() {
                    Some(self.testlist_star_expr()?)
                } else {
                    None
                };
                StmtKind::Return(value)
            }
            "import" => {
                self.advance();
                let mut names = vec![self.dotted_as_name()?];
                while self.eat_op(",") {
                    names.push(self.dotted_as_name()?);
                }
                StmtKind::Import(names)
            }
            "from" => self.import_from()?,
            "global" | "nonlocal" => {
                self.advance();
                let mut names = vec![self.expect_name()?];
                while self.eat_op(",") {
                    names.push(self.expect_name()?);
                }
                if kw == "global" {
                    StmtKind::Global(names)
                } else {
                    StmtKind::Nonlocal(names)
                }
            }
            "del" => {
                self.advance();
                let mut targets = vec![self.expr()?];
                while self.eat_op(",") {
                    if !self.starts_expr() {
                        break;
                    }
                    targets.push(self.expr()?);
                }
                for t in &targets {
                    self.check_target(t, "delete")?;
                }
                StmtKind::Del(targets)
            }
            "assert" => {
                self.advance();
                let test = self.test()?;
                let msg = if self.eat_op(",") {
                    Some(self.test()?)
                } else {
                    None
                };
                StmtKind::Assert { test, msg }
            }
            "raise" => {
                self.advance();
                let (mut exc, mut cause) = (None, None);
                if self.starts_expr() {
                    exc = Some(self.test()?);
                    if self.eat_kw("from") {
                        cause = Some(self.test()?);
                    }
                }
                StmtKind::Raise { exc, cause }
            }
            "async" | "await" => return Err(self.error_here(format!("'{kw}' is not supported"))),
            _ => self.expr_statement()?,
        };
        Ok(Stmt::new(kind, self.span_from(start)))
    }

    fn expr_statement(&mut self) -> PResult<StmtKind> {
        let first = self.yield_or_testlist()?;
        if self.is_op("=") {
            let mut items = vec![first];
            while self.eat_op("=") {
                items.push(self.yield_or_testlist()?);
            }
            let value = items.pop().expect("assignment has a value");
            for t in &items {
                self.check_target(t, "assign to")?;
            }
            return Ok(StmtKind::Assign {
                targets: items,
                value,
            });
        }
        if let Tok::Op(op) = self.peek().clone() {
            if op.len() >= 2 && op.ends_with('=') && !matches!(op, "==" | "<=" | ">=" | "!=") {
                let sym = &op[..op.len() - 1];
                if let Some(bin) = BinOpKind::from_symbol(sym) {
                    match first.kind {
                        ExprKind::Name(_)
                        | ExprKind::Attribute { .. }
                        | ExprKind::Subscript { .. } => {}
                        _ => {
                            return Err(
                                self.error_here("illegal expression for augmented assignment")
                            )
                        }
                    }
                    self.advance();
                    let value = self.yield_or_testlist()?;
                    return Ok(StmtKind::AugAssign {
                        target: first,
                        op: bin,
                        value,
                    });
                }
            }
            if op == ":" {
                return Err(self.error_here("annotated assignments are not supported"));
            }
        }
        Ok(StmtKind::Expr(first))
    }

    fn check_target(&self, e: &Expr, what: &str) -> PResult<()> {
        match &e.kind {
            ExprKind::Name(_) | ExprKind::Attribute { .. } | ExprKind::Subscript { .. } => Ok(()),
            ExprKind::Tuple(elts) | ExprKind::List(elts) => {
                elts.iter().try_for_each(|x| self.check_target(x, what))
            }
            ExprKind::Starred(inner) => self.check_target(inner, what),
            _ => Err(ParseError {
                path: self.path.clone(),
                line: e.span.start_line,
                col: e.span.start_col,
                message: format!("cannot {what} expression"),
            }),
        }
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.expect_name()?;
        while self.is_op(".") {
            self.advance();
            name.push('.');
            name.push_str(&self.expect_name()?);
        }
        Ok(name)
    }

    fn dotted_as_name(&mut self) -> PResult<Alias> {
        let start = self.start();
        let name = self.dotted_name()?;
        let asname = if self.eat_kw("as") {
            Some(self.expect_name()?)
        } else {
            None
        };
        Ok(Alias {
            name,
            asname,
            span: self.span_from(start),
        })
    }

    fn import_from(&mut self) -> PResult<StmtKind> {
        self.expect_kw("from")?;
        let mut level = 0;
        loop {
            if self.eat_op(".") {
                level += 1;
            } else if self.eat_op("...") {
                level += 3;
            } else {
                break;
            }
        }
        let module = if self.is_kw("import") {
            if level == 0 {
                return Err(self.error_here("expected module name"));
            }
            None
        } else {
            Some(self.dotted_name()?)
        };
        self.expect_kw("import")?;
        let mut names = Vec::new();
        if self.is_op("*") {
            let start = self.start();
            self.advance();
            names.push(Alias {
                name: "*".into(),
                asname: None,
                span: self.span_from(start),
            });
        } else {
            let paren = self.eat_op("(");
            loop {
                let start = self.start();
                let name = self.expect_name()?;
                let asname = if self.eat_kw("as") {
                    Some(self.expect_name()?)
                } else {
                    None
                };
                names.push(Alias {
                    name,
                    asname,
                    span: self.span_from(start),
                });
                if !self.eat_op(",") {
                    break;
                }
                if paren && self.is_op(")") {
                    break;
                }
            }
            if paren {
                self.expect_op(")")?;
            }
        }
        Ok(StmtKind::ImportFrom {
            module,
            names,
            level,
        })
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.advance(); // `if` or `elif`
        let test = self.test()?;
        let body = self.suite()?;
        let orelse = if self.is_kw("elif") {
            vec![self.if_stmt()?]
        } else if self.eat_kw("else") {
            self.suite()?
        } else {
            Vec::new()
        };
        Ok(Stmt::new(
            StmtKind::If { test, body, orelse },
            self.span_from(start),
        ))
    }

    fn while_stmt(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.expect_kw("while")?;
        let test = self.test()?;
        let body = self.suite()?;
        let orelse = if self.eat_kw("else") {
            self.suite()?
        } else {
            Vec::new()
        };
        Ok(Stmt::new(
            StmtKind::While { test, body, orelse },
            self.span_from(start),
        ))
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.expect_kw("for")?;
        let target = self.exprlist()?;
        self.check_target(&target, "assign to")?;
        self.expect_kw("in")?;
        let iter = self.testlist()?;
        let body = self.suite()?;
        let orelse = if self.eat_kw("else") {
            self.suite()?
        } else {
            Vec::new()
        };
        Ok(Stmt::new(
            StmtKind::For {
                target,
                iter,
                body,
                orelse,
            },
            self.span_from(start),
        ))
    }

    fn try_stmt(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.expect_kw("try")?;
        let body = self.suite()?;
        let mut handlers = Vec::new();
        while self.is_kw("except") {
            let hstart = self.start();
            self.advance();
            let (mut typ, mut name) = (None, None);
            if !self.is_op(":") {
                typ = Some(self.test()?);
                if self.eat_kw("as") {
                    name = Some(self.expect_name()?);
                }
            }
            let hbody = self.suite()?;
            handlers.push(ExceptHandler {
                typ,
                name,
                body: hbody,
                span: self.span_from(hstart),
            });
        }
        let orelse = if !handlers.is_empty() && self.eat_kw("else") {
            self.suite()?
        } else {
            Vec::new()
        };
        let finalbody = if self.eat_kw("finally") {
            self.suite()?
        } else {
            Vec::new()
        };
        if handlers.is_empty() && finalbody.is_empty() {
            return Err(self.error_here("expected 'except' or 'finally' block"));
        }
        Ok(Stmt::new(
            StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            },
            self.span_from(start),
        ))
    }

    fn with_stmt(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.expect_kw("with")?;
        let mut items = Vec::new();
        loop {
            let context = self.test()?;
            let vars = if self.eat_kw("as") {
                let t = self.expr()?;
                self.check_target(&t, "assign to")?;
                Some(t)
            } else {
                None
            };
            items.push(WithItem { context, vars });
            if !self.eat_op(",") {
                break;
            }
        }
        let body = self.suite()?;
        Ok(Stmt::new(
            StmtKind::With { items, body },
            self.span_from(start),
        ))
    }

    fn decorated(&mut self) -> PResult<Stmt> {
        let start = self.start();
        let mut decorators = Vec::new();
        while self.is_op("@") {
            self.advance();
            let dstart = self.start();
            let name = self.expect_name()?;
            let mut e = Expr::name(name, self.span_from(dstart));
            while self.eat_op(".") {
                let attr = self.expect_name()?;
                e = Expr::new(
                    ExprKind::Attribute {
                        value: Box::new(e),
                        attr,
                    },
                    self.span_from(dstart),
                );
            }
            if self.is_op("(") {
                return Err(self.error_here("decorators with arguments are not supported"));
            }
            decorators.push(e);
            if !matches!(self.peek(), Tok::Newline) {
                return Err(self.unexpected());
            }
            self.advance();
        }
        if self.is_kw("def") {
            self.funcdef(decorators, start)
        } else if self.is_kw("class") {
            self.classdef(decorators, start)
        } else {
            Err(self.error_here("expected 'def' or 'class' after decorator"))
        }
    }

    fn funcdef(&mut self, decorators: Vec<Expr>, start: (u32, u32)) -> PResult<Stmt> {
        self.expect_kw("def")?;
        let name = self.expect_name()?;
        self.expect_op("(")?;
        let params = self.parameters(")", true)?;
        self.expect_op(")")?;
        let returns = if self.eat_op("->") {
            Some(self.test()?)
        } else {
            None
        };
        let body = self.suite()?;
        Ok(Stmt::new(
            StmtKind::FunctionDef(FunctionDef {
                name,
                params,
                body,
                decorators,
                returns,
            }),
            self.span_from(start),
        ))
    }

    fn classdef(&mut self, decorators: Vec<Expr>, start: (u32, u32)) -> PResult<Stmt> {
        self.expect_kw("class")?;
        let name = self.expect_name()?;
        let (mut bases, mut keywords) = (Vec::new(), Vec::new());
        if self.eat_op("(") {
            let (a, k) = self.arguments()?;
            self.expect_op(")")?;
            bases = a;
            keywords = k;
        }
        let body = self.suite()?;
        Ok(Stmt::new(
            StmtKind::ClassDef(ClassDef {
                name,
                bases,
                keywords,
                body,
                decorators,
            }),
            self.span_from(start),
        ))
    }

    /// Parameter list up to (not including) `close`. Annotations are only
    /// accepted for `def` parameters.
    fn parameters(&mut self, close: &str, annotated: bool) -> PResult<Parameters> {
        let mut params = Parameters::default();
        let mut seen_star = false;
        let mut seen_default = false;
        while !self.is_op(close) {
            let start = self.start();
            if self.eat_op("/") {
                if seen_star || !params.posonly.is_empty() || params.args.is_empty() {
                    return Err(self.error_here("invalid '/' in parameter list"));
                }
                params.posonly = std::mem::take(&mut params.args);
            } else if self.eat_op("**") {
                let p = self.param(start, annotated, false)?;
                params.kwarg = Some(p);
                self.eat_op(",");
                if !self.is_op(close) {
                    return Err(self.error_here("parameter after '**' parameter"));
                }
                break;
            } else if self.eat_op("*") {
                if seen_star {
                    return Err(self.error_here("duplicate '*' in parameter list"));
                }
                seen_star = true;
                if !self.is_op(",") && !self.is_op(close) {
                    params.vararg = Some(self.param(start, annotated, false)?);
                }
            } else {
                let p = self.param(start, annotated, true)?;
                if seen_star {
                    params.kwonly.push(p);
                } else {
                    if p.default.is_some() {
                        seen_default = true;
                    } else if seen_default {
                        return Err(
                            self.error_here("non-default argument follows default argument")
                        );
                    }
                    params.args.push(p);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(params)
    }

    fn param(&mut self, start: (u32, u32), annotated: bool, defaults: bool) -> PResult<Param> {
        let name = self.expect_name()?;
        let annotation = if annotated && self.eat_op(":") {
            Some(self.test()?)
        } else {
            None
        };
        let default = if defaults && self.eat_op("=") {
            Some(self.test()?)
        } else {
            None
        };
        Ok(Param {
            name,
            annotation,
            default,
            span: self.span_from(start),
        })
    }

    // ---- expressions ---------------------------------------------------

    fn yield_or_testlist(&mut self) -> PResult<Expr> {
        if self.is_kw("yield") {
            self.yield_expr()
        } else {
            self.testlist_star_expr()
        }
    }

    fn yield_expr(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.expect_kw("yield")?;
        if self.eat_kw("from") {
            let v = self.test()?;
            return Ok(Expr::new(
                ExprKind::YieldFrom(Box::new(v)),
                self.span_from(start),
            ));
        }
        let v = if self.starts_expr() {
            Some(Box::new(self.testlist_star_expr()?))
        } else {
            None
        };
        Ok(Expr::new(ExprKind::Yield(v), self.span_from(start)))
    }

    /// Comma-separated list of `test` / `*expr`; more than one element (or a
    /// trailing comma) makes a tuple.
    fn testlist_star_expr(&mut self) -> PResult<Expr> {
        self.sequence(|p| p.test_or_star())
    }

    fn testlist(&mut self) -> PResult<Expr> {
        self.sequence(|p| p.test())
    }

    fn exprlist(&mut self) -> PResult<Expr> {
        self.sequence(|p| {
            if p.is_op("*") {
                p.star_expr()
            } else {
                p.expr()
            }
        })
    }

    fn sequence(&mut self, mut item: impl FnMut(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        let start = self.start();
        let first = item(self)?;
        if !self.is_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if !self.starts_expr() {
                break;
            }
            elts.push(item(self)?);
        }
        Ok(Expr::new(ExprKind::Tuple(elts), self.span_from(start)))
    }

    fn test_or_star(&mut self) -> PResult<Expr> {
        if self.is_op("*") {
            self.star_expr()
        } else {
            self.test()
        }
    }

    fn star_expr(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.expect_op("*")?;
        let v = self.expr()?;
        Ok(Expr::new(
            ExprKind::Starred(Box::new(v)),
            self.span_from(start),
        ))
    }

    fn test(&mut self) -> PResult<Expr> {
        if self.is_kw("lambda") {
            return self.lambda();
        }
        let start = self.start();
        let body = self.or_test()?;
        if self.eat_kw("if") {
            let test = self.or_test()?;
            self.expect_kw("else")?;
            let orelse = self.test()?;
            return Ok(Expr::new(
                ExprKind::IfExp {
                    test: Box::new(test),
                    body: Box::new(body),
                    orelse: Box::new(orelse),
                },
                self.span_from(start),
            ));
        }
        if self.is_op(":=") {
            return Err(self.error_here("assignment expressions are not supported"));
        }
        Ok(body)
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.expect_kw("lambda")?;
        let params = self.parameters(":", false)?;
        self.expect_op(":")?;
        let body = self.test()?;
        Ok(Expr::new(
            ExprKind::Lambda {
                params: Box::new(params),
                body: Box::new(body),
            },
            self.span_from(start),
        ))
    }

    fn or_test(&mut self) -> PResult<Expr> {
        self.bool_chain("or", BoolOpKind::Or, |p| p.and_test())
    }

    fn and_test(&mut self) -> PResult<Expr> {
        self.bool_chain("and", BoolOpKind::And, |p| p.not_test())
    }

    fn bool_chain(
        &mut self,
        kw: &str,
        op: BoolOpKind,
        mut next: impl FnMut(&mut Self) -> PResult<Expr>,
    ) -> PResult<Expr> {
        let start = self.start();
        let first = next(self)?;
        if !self.is_kw(kw) {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw(kw) {
            values.push(next(self)?);
        }
        Ok(Expr::new(
            ExprKind::BoolOp { op, values },
            self.span_from(start),
        ))
    }

    fn not_test(&mut self) -> PResult<Expr> {
        if self.is_kw("not") {
            let start = self.start();
            self.advance();
            let operand = self.not_test()?;
            return Ok(Expr::new(
                ExprKind::UnaryOp {
                    op: UnaryOpKind::Not,
                    operand: Box::new(operand),
                },
                self.span_from(start),
            ));
        }
        self.comparison()
    }

    fn comp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op(">=") => CmpOp::GtE,
            Tok::Op("<=") => CmpOp::LtE,
            Tok::Op("!=") => CmpOp::NotEq,
            Tok::Name(n) if n == "in" => CmpOp::In,
            Tok::Name(n) if n == "not" && matches!(self.peek_nth(1), Tok::Name(m) if m == "in") => {
                self.advance();
                CmpOp::NotIn
            }
            Tok::Name(n) if n == "is" => {
                if matches!(self.peek_nth(1), Tok::Name(m) if m == "not") {
                    self.advance();
                    CmpOp::IsNot
                } else {
                    CmpOp::Is
                }
            }
            _ => return None,
        };
        self.advance();
        Some(op)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let start = self.start();
        let left = self.expr()?;
        let mut ops = Vec::new();
        let mut comparators = Vec::new();
        while let Some(op) = self.comp_op() {
            ops.push(op);
            comparators.push(self.expr()?);
        }
        if ops.is_empty() {
            return Ok(left);
        }
        Ok(Expr::new(
            ExprKind::Compare {
                left: Box::new(left),
                ops,
                comparators,
            },
            self.span_from(start),
        ))
    }

    fn binary_level(
        &mut self,
        ops: &[&str],
        mut next: impl FnMut(&mut Self) -> PResult<Expr>,
    ) -> PResult<Expr> {
        let start = self.start();
        let mut left = next(self)?;
        loop {
            let op = match self.peek() {
                Tok::Op(o) if ops.contains(o) => *o,
                _ => break,
            };
            self.advance();
            let right = next(self)?;
            left = Expr::new(
                ExprKind::BinOp {
                    left: Box::new(left),
                    op: BinOpKind::from_symbol(op).expect("binary operator"),
                    right: Box::new(right),
                },
                self.span_from(start),
            );
        }
        Ok(left)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary_level(&["|"], |p| p.xor_expr())
    }

    fn xor_expr(&mut self) -> PResult<Expr> {
        self.binary_level(&["^"], |p| p.and_expr())
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        self.binary_level(&["&"], |p| p.shift_expr())
    }

    fn shift_expr(&mut self) -> PResult<Expr> {
        self.binary_level(&["<<", ">>"], |p| p.arith_expr())
    }

    fn arith_expr(&mut self) -> PResult<Expr> {
        self.binary_level(&["+", "-"], |p| p.term())
    }

    fn term(&mut self) -> PResult<Expr> {
        self.binary_level(&["*", "/", "%", "//", "@"], |p| p.factor())
    }

    fn factor(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Tok::Op("-") => UnaryOpKind::Neg,
            Tok::Op("+") => UnaryOpKind::Pos,
            Tok::Op("~") => UnaryOpKind::Invert,
            _ => return self.power(),
        };
        let start = self.start();
        self.advance();
        let operand = self.factor()?;
        Ok(Expr::new(
            ExprKind::UnaryOp {
                op,
                operand: Box::new(operand),
            },
            self.span_from(start),
        ))
    }

    fn power(&mut self) -> PResult<Expr> {
        let start = self.start();
        let base = self.atom_expr()?;
        if self.eat_op("**") {
            let exp = self.factor()?;
            return Ok(Expr::new(
                ExprKind::BinOp {
                    left: Box::new(base),
                    op: BinOpKind::Pow,
                    right: Box::new(exp),
                },
                self.span_from(start),
            ));
        }
        Ok(base)
    }

    fn atom_expr(&mut self) -> PResult<Expr> {
        let start = self.start();
        if self.is_kw("await") {
            return Err(self.error_here("'await' is not supported"));
        }
        let mut e = self.atom()?;
        loop {
            if self.eat_op("(") {
                let (args, keywords) = self.arguments()?;
                self.expect_op(")")?;
                e = Expr::new(
                    ExprKind::Call {
                        func: Box::new(e),
                        args,
                        keywords,
                    },
                    self.span_from(start),
                );
            } else if self.eat_op("[") {
                let slice = self.subscript_list()?;
                self.expect_op("]")?;
                e = Expr::new(
                    ExprKind::Subscript {
                        value: Box::new(e),
                        slice: Box::new(slice),
                    },
                    self.span_from(start),
                );
            } else if self.eat_op(".") {
                let attr = self.expect_name()?;
                e = Expr::new(
                    ExprKind::Attribute {
                        value: Box::new(e),
                        attr,
                    },
                    self.span_from(start),
                );
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn arguments(&mut self) -> PResult<(Vec<Expr>, Vec<Keyword>)> {
        let mut args = Vec::new();
        let mut keywords: Vec<Keyword> = Vec::new();
        while !self.is_op(")") {
            let start = self.start();
            if self.eat_op("**") {
                let value = self.test()?;
                keywords.push(Keyword {
                    arg: None,
                    value,
                    span: self.span_from(start),
                });
            } else if self.is_op("*") {
                let s = self.star_expr()?;
                args.push(s);
            } else if matches!(self.peek(), Tok::Name(n) if !is_keyword(n))
                && matches!(self.peek_nth(1), Tok::Op("="))
            {
                let arg = self.expect_name()?;
                self.advance();
                let value = self.test()?;
                keywords.push(Keyword {
                    arg: Some(arg),
                    value,
                    span: self.span_from(start),
                });
            } else {
                let value = self.test()?;
                if self.is_kw("for") {
                    let generators = self.comp_for()?;
                    let g = Expr::new(
                        ExprKind::GeneratorExp {
                            elt: Box::new(value),
                            generators,
                        },
                        self.span_from(start),
                    );
                    args.push(g);
                } else {
                    if keywords.iter().any(|k| k.arg.is_none()) {
                        return Err(self
                            .error_here("positional argument follows keyword argument unpacking"));
                    }
                    if !keywords.is_empty() {
                        return Err(self.error_here("positional argument follows keyword argument"));
                    }
                    args.push(value);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok((args, keywords))
    }

    fn subscript_list(&mut self) -> PResult<Expr> {
        let start = self.start();
        let first = self.subscript()?;
        if !self.is_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.is_op("]") {
                break;
            }
            elts.push(self.subscript()?);
        }
        Ok(Expr::new(ExprKind::Tuple(elts), self.span_from(start)))
    }

    fn subscript(&mut self) -> PResult<Expr> {
        let start = self.start();
        let lower = if self.is_op(":") {
            None
        } else {
            let e = self.test_or_star()?;
            if !self.is_op(":") {
                return Ok(e);
            }
            Some(Box::new(e))
        };
        self.expect_op(":")?;
        let upper = if self.is_op(":") || self.is_op("]") || self.is_op(",") {
            None
        } else {
            Some(Box::new(self.test()?))
        };
        let step = if self.eat_op(":") && !self.is_op("]") && !self.is_op(",") {
            Some(Box::new(self.test()?))
        } else {
            None
        };
        Ok(Expr::new(
            ExprKind::Slice { lower, upper, step },
            self.span_from(start),
        ))
    }

    fn comp_for(&mut self) -> PResult<Vec<Comprehension>> {
        let mut gens = Vec::new();
        while self.is_kw("for") {
            self.advance();
            let target = self.exprlist()?;
            self.check_target(&target, "assign to")?;
            self.expect_kw("in")?;
            let iter = self.or_test()?;
            let mut ifs = Vec::new();
            while self.eat_kw("if") {
                ifs.push(self.or_test()?);
            }
            gens.push(Comprehension { target, iter, ifs });
        }
        if self.is_kw("async") {
            return Err(self.error_here("'async' is not supported"));
        }
        Ok(gens)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.start();
        let tok = self.peek().clone();
        match tok {
            Tok::Op("(") => {
                self.advance();
                if self.eat_op(")") {
                    return Ok(Expr::new(
                        ExprKind::Tuple(Vec::new()),
                        self.span_from(start),
                    ));
                }
                if self.is_kw("yield") {
                    let y = self.yield_expr()?;
                    self.expect_op(")")?;
                    return Ok(y);
                }
                let first = self.test_or_star()?;
                if self.is_kw("for") {
                    let generators = self.comp_for()?;
                    self.expect_op(")")?;
                    return Ok(Expr::new(
                        ExprKind::GeneratorExp {
                            elt: Box::new(first),
                            generators,
                        },
                        self.span_from(start),
                    ));
                }
                if self.eat_op(")") {
                    if matches!(first.kind, ExprKind::Starred(_)) {
                        return Err(self.error_here("cannot use starred expression here"));
                    }
                    return Ok(first);
                }
                let mut elts = vec![first];
                while self.eat_op(",") {
                    if self.is_op(")") {
                        break;
                    }
                    elts.push(self.test_or_star()?);
                }
                self.expect_op(")")?;
                Ok(Expr::new(ExprKind::Tuple(elts), self.span_from(start)))
            }
            Tok::Op("[") => {
                self.advance();
                if self.eat_op("]") {
                    return Ok(Expr::new(ExprKind::List(Vec::new()), self.span_from(start)));
                }
                let first = self.test_or_star()?;
                if self.is_kw("for") {
                    let generators = self.comp_for()?;
                    self.expect_op("]")?;
                    return Ok(Expr::new(
                        ExprKind::ListComp {
                            elt: Box::new(first),
                            generators,
                        },
                        self.span_from(start),
                    ));
                }
                let mut elts = vec![first];
                while self.eat_op(",") {
                    if self.is_op("]") {
                        break;
                    }
                    elts.push(self.test_or_star()?);
                }
                self.expect_op("]")?;
                Ok(Expr::new(ExprKind::List(elts), self.span_from(start)))
            }
            Tok::Op("{") => {
                self.advance();
                self.dict_or_set(start)
            }
            Tok::Op("...") => {
                self.advance();
                Ok(Expr::new(
                    ExprKind::Constant(Constant::Ellipsis),
                    self.span_from(start),
                ))
            }
            Tok::Int(v) => {
                self.advance();
                Ok(Expr::new(
                    ExprKind::Constant(Constant::Int(v)),
                    self.span_from(start),
                ))
            }
            Tok::Float(v) => {
                self.advance();
                Ok(Expr::new(
                    ExprKind::Constant(Constant::Float(v)),
                    self.span_from(start),
                ))
            }
            Tok::Str(_) => self.strings(),
            Tok::Name(n) => {
                let c = match n.as_str() {
                    "None" => Some(Constant::None),
                    "True" => Some(Constant::Bool(true)),
                    "False" => Some(Constant::Bool(false)),
                    _ => None,
                };
                if let Some(c) = c {
                    self.advance();
                    return Ok(Expr::new(ExprKind::Constant(c), self.span_from(start)));
                }
                if is_keyword(&n) {
                    return Err(self.unexpected());
                }
                self.advance();
                Ok(Expr::name(n, self.span_from(start)))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn dict_or_set(&mut self, start: (u32, u32)) -> PResult<Expr> {
        if self.eat_op("}") {
            return Ok(Expr::new(
                ExprKind::Dict {
                    keys: Vec::new(),
                    values: Vec::new(),
                },
                self.span_from(start),
            ));
        }
        // first item decides dict vs set
        let (first_key, first_val) = if self.eat_op("**") {
            (None, self.expr()?)
        } else {
            let k = self.test_or_star()?;
            if self.eat_op(":") {
                (Some(k), self.test()?)
            } else {
                return self.set_rest(start, k);
            }
        };
        if self.is_kw("for") {
            if let Some(key) = first_key {
                let generators = self.comp_for()?;
                self.expect_op("}")?;
                return Ok(Expr::new(
                    ExprKind::DictComp {
                        key: Box::new(key),
                        value: Box::new(first_val),
                        generators,
                    },
                    self.span_from(start),
                ));
            }
        }
        let mut keys = vec![first_key];
        let mut values = vec![first_val];
        while self.eat_op(",") {
            if self.is_op("}") {
                break;
            }
            if self.eat_op("**") {
                keys.push(None);
                values.push(self.expr()?);
            } else {
                keys.push(Some(self.test()?));
                self.expect_op(":")?;
                values.push(self.test()?);
            }
        }
        self.expect_op("}")?;
        Ok(Expr::new(
            ExprKind::Dict { keys, values },
            self.span_from(start),
        ))
    }

    fn set_rest(&mut self, start: (u32, u32), first: Expr) -> PResult<Expr> {
        if self.is_kw("for") {
            let generators = self.comp_for()?;
            self.expect_op("}")?;
            return Ok(Expr::new(
                ExprKind::SetComp {
                    elt: Box::new(first),
                    generators,
                },
                self.span_from(start),
            ));
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.is_op("}") {
                break;
            }
            elts.push(self.test_or_star()?);
        }
        self.expect_op("}")?;
        Ok(Expr::new(ExprKind::Set(elts), self.span_from(start)))
    }

    /// Adjacent string literals concatenate.
    fn strings(&mut self) -> PResult<Expr> {
        let start = self.start();
        let mut parts: Vec<StrTok> = Vec::new();
        while let Tok::Str(s) = self.peek().clone() {
            self.advance();
            parts.push(s);
        }
        let any_bytes = parts.iter().any(|p| p.kind == StrKind::Bytes);
        let all_bytes = parts.iter().all(|p| p.kind == StrKind::Bytes);
        if any_bytes && !all_bytes {
            return Err(ParseError {
                path: self.path.clone(),
                line: start.0,
                col: start.1,
                message: "cannot mix bytes and nonbytes literals".into(),
            });
        }
        let c = if all_bytes {
            Constant::Bytes(
                parts
                    .iter()
                    .flat_map(|p| p.value.chars().map(|c| c as u32 as u8))
                    .collect(),
            )
        } else if parts.iter().any(|p| p.kind == StrKind::FString) {
            let raws: Vec<&str> = parts.iter().map(|p| p.raw.as_str()).collect();
            Constant::FString(raws.join(" "))
        } else {
            Constant::Str(parts.iter().map(|p| p.value.as_str()).collect())
        };
        Ok(Expr::new(ExprKind::Constant(c), self.span_from(start)))
    }
}
