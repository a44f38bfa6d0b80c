//! Source regeneration. Output reparses to a structurally equal tree;
//! formatting and comments are not preserved.

use super::ast::*;

// Operator precedence, lowest first.
const TUPLE: u8 = 1;
const YIELD: u8 = 2;
const TEST: u8 = 3;
const OR: u8 = 4;
const AND: u8 = 5;
const NOT: u8 = 6;
const CMP: u8 = 7;
const BOR: u8 = 8;
const BXOR: u8 = 9;
const BAND: u8 = 10;
const SHIFT: u8 = 11;
const ARITH: u8 = 12;
const TERM: u8 = 13;
const FACTOR: u8 = 14;
const POWER: u8 = 15;
const ATOM: u8 = 16;

pub fn unparse_module(m: &Module) -> String {
    let mut out = String::new();
    for s in &m.body {
        write_stmt(&mut out, s, 0);
    }
    out
}

pub fn unparse_stmt(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, s, 0);
    out
}

/// One-line rendering of a statement: compound statements show only their
/// header (`if c > 0:`), bodies are omitted.
pub fn stmt_header(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::FunctionDef(f) => {
            let mut out = String::new();
            for d in &f.decorators {
                out.push('@');
                out.push_str(&expr_at(d, ATOM));
                out.push(' ');
            }
            out.push_str(&format!("def {}({})", f.name, params_text(&f.params)));
            if let Some(r) = &f.returns {
                out.push_str(&format!(" -> {}", expr_at(r, TEST)));
            }
            out.push(':');
            out
        }
        StmtKind::ClassDef(c) => format!("class {}{}:", c.name, class_args(c)),
        StmtKind::If { test, .. } => format!("if {}:", expr_at(test, TEST)),
        StmtKind::While { test, .. } => format!("while {}:", expr_at(test, TEST)),
        StmtKind::For { target, iter, .. } => {
            format!(
                "for {} in {}:",
                expr_at(target, TUPLE),
                expr_at(iter, TUPLE)
            )
        }
        StmtKind::Try { .. } => "try:".to_string(),
        StmtKind::With { items, .. } => format!("with {}:", with_items(items)),
        _ => unparse_stmt(s).trim_end().to_string(),
    }
}

pub fn unparse_expr(e: &Expr) -> String {
    expr_at(e, TUPLE)
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn line(out: &mut String, level: usize, text: &str) {
    indent(out, level);
    out.push_str(text);
    out.push('\n');
}

fn block(out: &mut String, body: &[Stmt], level: usize) {
    if body.is_empty() {
        line(out, level, "pass");
    }
    for s in body {
        write_stmt(out, s, level);
    }
}

fn class_args(c: &ClassDef) -> String {
    if c.bases.is_empty() && c.keywords.is_empty() {
        return String::new();
    }
    let mut parts: Vec<String> = c.bases.iter().map(|b| expr_at(b, TEST)).collect();
    parts.extend(c.keywords.iter().map(keyword_text));
    format!("({})", parts.join(", "))
}

fn with_items(items: &[WithItem]) -> String {
    items
        .iter()
        .map(|it| match &it.vars {
            Some(v) => format!("{} as {}", expr_at(&it.context, TEST), expr_at(v, BOR)),
            None => expr_at(&it.context, TEST),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_stmt(out: &mut String, s: &Stmt, level: usize) {
    match &s.kind {
        StmtKind::FunctionDef(f) => {
            for d in &f.decorators {
                line(out, level, &format!("@{}", expr_at(d, ATOM)));
            }
            let mut head = format!("def {}({})", f.name, params_text(&f.params));
            if let Some(r) = &f.returns {
                head.push_str(&format!(" -> {}", expr_at(r, TEST)));
            }
            head.push(':');
            line(out, level, &head);
            block(out, &f.body, level + 1);
        }
        StmtKind::ClassDef(c) => {
            for d in &c.decorators {
                line(out, level, &format!("@{}", expr_at(d, ATOM)));
            }
            line(out, level, &format!("class {}{}:", c.name, class_args(c)));
            block(out, &c.body, level + 1);
        }
        StmtKind::If { test, body, orelse } => {
            line(out, level, &format!("if {}:", expr_at(test, TEST)));
            block(out, body, level + 1);
            write_else(out, orelse, level);
        }
        StmtKind::While { test, body, orelse } => {
            line(out, level, &format!("while {}:", expr_at(test, TEST)));
            block(out, body, level + 1);
            if !orelse.is_empty() {
                line(out, level, "else:");
                block(out, orelse, level + 1);
            }
        }
        StmtKind::For {
            target,
            iter,
            body,
            orelse,
        } => {
            line(
                out,
                level,
                &format!(
                    "for {} in {}:",
                    expr_at(target, TUPLE),
                    expr_at(iter, TUPLE)
                ),
            );
            block(out, body, level + 1);
            if !orelse.is_empty() {
                line(out, level, "else:");
                block(out, orelse, level + 1);
            }
        }
        StmtKind::Try {
            body,
            handlers,
            orelse,
            finalbody,
        } => {
            line(out, level, "try:");
            block(out, body, level + 1);
            for h in handlers {
                let head = match (&h.typ, &h.name) {
                    (Some(t), Some(n)) => format!("except {} as {}:", expr_at(t, TEST), n),
                    (Some(t), None) => format!("except {}:", expr_at(t, TEST)),
                    _ => "except:".to_string(),
                };
                line(out, level, &head);
                block(out, &h.body, level + 1);
            }
            if !orelse.is_empty() {
                line(out, level, "else:");
                block(out, orelse, level + 1);
            }
            if !finalbody.is_empty() {
                line(out, level, "finally:");
                block(out, finalbody, level + 1);
            }
        }
        StmtKind::With { items, body } => {
            line(out, level, &format!("with {}:", with_items(items)));
            block(out, body, level + 1);
        }
        _ => line(out, level, &simple_stmt(s)),
    }
}

fn write_else(out: &mut String, orelse: &[Stmt], level: usize) {
    if orelse.is_empty() {
        return;
    }
    if let [Stmt {
        kind: StmtKind::If { test, body, orelse },
        ..
    }] = orelse
    {
        line(out, level, &format!("elif {}:", expr_at(test, TEST)));
        block(out, body, level + 1);
        write_else(out, orelse, level);
        return;
    }
    line(out, level, "else:");
    block(out, orelse, level + 1);
}

fn simple_stmt(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Assign { targets, value } => {
            let mut parts: Vec<String> = targets.iter().map(|t| expr_at(t, TUPLE)).collect();
            parts.push(expr_at(value, TUPLE));
            parts.join(" = ")
        }
        StmtKind::AugAssign { target, op, value } => format!(
            "{} {}= {}",
            expr_at(target, TUPLE),
            op.symbol(),
            expr_at(value, TUPLE)
        ),
        StmtKind::Return(None) => "return".into(),
        StmtKind::Return(Some(v)) => match v.kind {
            ExprKind::Yield(_) | ExprKind::YieldFrom(_) => format!("return ({})", expr_text(v)),
            _ => format!("return {}", expr_at(v, TUPLE)),
        },
        StmtKind::Break => "break".into(),
        StmtKind::Continue => "continue".into(),
        StmtKind::Pass => "pass".into(),
        StmtKind::Import(names) => format!("import {}", aliases(names)),
        StmtKind::ImportFrom {
            module,
            names,
            level,
        } => format!(
            "from {}{} import {}",
            ".".repeat(*level as usize),
            module.as_deref().unwrap_or(""),
            aliases(names)
        ),
        StmtKind::Expr(e) => expr_at(e, TUPLE),
        StmtKind::Global(n) => format!("global {}", n.join(", ")),
        StmtKind::Nonlocal(n) => format!("nonlocal {}", n.join(", ")),
        StmtKind::Del(t) => format!(
            "del {}",
            t.iter()
                .map(|e| expr_at(e, BOR))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        StmtKind::Assert { test, msg } => match msg {
            Some(m) => format!("assert {}, {}", expr_at(test, TEST), expr_at(m, TEST)),
            None => format!("assert {}", expr_at(test, TEST)),
        },
        StmtKind::Raise { exc, cause } => match (exc, cause) {
            (Some(e), Some(c)) => format!("raise {} from {}", expr_at(e, TEST), expr_at(c, TEST)),
            (Some(e), None) => format!("raise {}", expr_at(e, TEST)),
            _ => "raise".into(),
        },
        _ => unreachable!("compound statement in simple_stmt"),
    }
}

fn aliases(names: &[Alias]) -> String {
    names
        .iter()
        .map(|a| match &a.asname {
            Some(n) => format!("{} as {}", a.name, n),
            None => a.name.clone(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn params_text(p: &Parameters) -> String {
    let mut parts = Vec::new();
    let one = |p: &Param| {
        let mut s = p.name.clone();
        if let Some(a) = &p.annotation {
            s.push_str(&format!(": {}", expr_at(a, TEST)));
        }
        if let Some(d) = &p.default {
            if p.annotation.is_some() {
                s.push_str(&format!(" = {}", expr_at(d, TEST)));
            } else {
                s.push_str(&format!("={}", expr_at(d, TEST)));
            }
        }
        s
    };
    for x in &p.posonly {
        parts.push(one(x));
    }
    if !p.posonly.is_empty() {
        parts.push("/".into());
    }
    for x in &p.args {
        parts.push(one(x));
    }
    if let Some(v) = &p.vararg {
        parts.push(format!("*{}", one(v)));
    } else if !p.kwonly.is_empty() {
        parts.push("*".into());
    }
    for x in &p.kwonly {
        parts.push(one(x));
    }
    if let Some(k) = &p.kwarg {
        parts.push(format!("**{}", one(k)));
    }
    parts.join(", ")
}

fn keyword_text(k: &Keyword) -> String {
    match &k.arg {
        Some(a) => format!("{}={}", a, expr_at(&k.value, TEST)),
        None => format!("**{}", expr_at(&k.value, TEST)),
    }
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Tuple(elts) if !elts.is_empty() => TUPLE,
        ExprKind::Yield(_) | ExprKind::YieldFrom(_) => YIELD,
        ExprKind::Lambda { .. } | ExprKind::IfExp { .. } => TEST,
        ExprKind::BoolOp {
            op: BoolOpKind::Or, ..
        } => OR,
        ExprKind::BoolOp {
            op: BoolOpKind::And,
            ..
        } => AND,
        ExprKind::UnaryOp {
            op: UnaryOpKind::Not,
            ..
        } => NOT,
        ExprKind::Compare { .. } => CMP,
        ExprKind::BinOp { op, .. } => binop_precedence(*op),
        ExprKind::UnaryOp { .. } => FACTOR,
        ExprKind::Starred(_) => BOR,
        ExprKind::Constant(Constant::Int(v)) if *v < 0 => FACTOR,
        ExprKind::Constant(Constant::Float(v)) if v.is_sign_negative() => FACTOR,
        _ => ATOM,
    }
}

fn binop_precedence(op: BinOpKind) -> u8 {
    match op {
        BinOpKind::BitOr => BOR,
        BinOpKind::BitXor => BXOR,
        BinOpKind::BitAnd => BAND,
        BinOpKind::LShift | BinOpKind::RShift => SHIFT,
        BinOpKind::Add | BinOpKind::Sub => ARITH,
        BinOpKind::Mult
        | BinOpKind::MatMult
        | BinOpKind::Div
        | BinOpKind::FloorDiv
        | BinOpKind::Mod => TERM,
        BinOpKind::Pow => POWER,
    }
}

fn expr_at(e: &Expr, ctx: u8) -> String {
    let text = expr_text(e);
    if precedence(e) < ctx {
        format!("({text})")
    } else {
        text
    }
}

fn join(elts: &[Expr], ctx: u8) -> String {
    elts.iter()
        .map(|e| expr_at(e, ctx))
        .collect::<Vec<_>>()
        .join(", ")
}

fn comprehensions(gens: &[Comprehension]) -> String {
    let mut s = String::new();
    for g in gens {
        s.push_str(&format!(
            " for {} in {}",
            expr_at(&g.target, TUPLE),
            expr_at(&g.iter, OR)
        ));
        for c in &g.ifs {
            s.push_str(&format!(" if {}", expr_at(c, OR)));
        }
    }
    s
}

fn expr_text(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Name(n) => n.clone(),
        ExprKind::Constant(c) => constant_text(c),
        ExprKind::BinOp { left, op, right } => {
            let p = binop_precedence(*op);
            let (lp, rp) = if *op == BinOpKind::Pow {
                (POWER + 1, FACTOR)
            } else {
                (p, p + 1)
            };
            format!(
                "{} {} {}",
                expr_at(left, lp),
                op.symbol(),
                expr_at(right, rp)
            )
        }
        ExprKind::UnaryOp { op, operand } => match op {
            UnaryOpKind::Not => format!("not {}", expr_at(operand, NOT)),
            _ => format!("{}{}", op.symbol(), expr_at(operand, FACTOR)),
        },
        ExprKind::BoolOp { op, values } => {
            let (word, p) = match op {
                BoolOpKind::And => (" and ", AND),
                BoolOpKind::Or => (" or ", OR),
            };
            values
                .iter()
                .map(|v| expr_at(v, p + 1))
                .collect::<Vec<_>>()
                .join(word)
        }
        ExprKind::Compare {
            left,
            ops,
            comparators,
        } => {
            let mut s = expr_at(left, CMP + 1);
            for (op, c) in ops.iter().zip(comparators) {
                s.push_str(&format!(" {} {}", op.symbol(), expr_at(c, CMP + 1)));
            }
            s
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            let mut parts: Vec<String> = args
                .iter()
                .map(|a| match &a.kind {
                    ExprKind::GeneratorExp { .. } => format!("({})", expr_text(a)),
                    _ => expr_at(a, TEST),
                })
                .collect();
            parts.extend(keywords.iter().map(keyword_text));
            format!("{}({})", callee_text(func), parts.join(", "))
        }
        ExprKind::Attribute { value, attr } => {
            let base = match &value.kind {
                ExprKind::Constant(Constant::Int(_)) => format!("({})", expr_text(value)),
                _ => expr_at(value, ATOM),
            };
            format!("{base}.{attr}")
        }
        ExprKind::Subscript { value, slice } => {
            let inner = match &slice.kind {
                ExprKind::Tuple(elts) if !elts.is_empty() => {
                    let mut s = join(elts, TEST);
                    if elts.len() == 1 {
                        s.push(',');
                    }
                    s
                }
                _ => expr_at(slice, TEST),
            };
            format!("{}[{}]", expr_at(value, ATOM), inner)
        }
        ExprKind::Slice { lower, upper, step } => {
            let mut s = String::new();
            if let Some(l) = lower {
                s.push_str(&expr_at(l, TEST));
            }
            s.push(':');
            if let Some(u) = upper {
                s.push_str(&expr_at(u, TEST));
            }
            if let Some(st) = step {
                s.push(':');
                s.push_str(&expr_at(st, TEST));
            }
            s
        }
        ExprKind::Lambda { params, body } => {
            if params.is_empty() {
                format!("lambda: {}", expr_at(body, TEST))
            } else {
                format!("lambda {}: {}", params_text(params), expr_at(body, TEST))
            }
        }
        ExprKind::ListComp { elt, generators } => {
            format!("[{}{}]", expr_at(elt, TEST), comprehensions(generators))
        }
        ExprKind::SetComp { elt, generators } => {
            format!("{{{}{}}}", expr_at(elt, TEST), comprehensions(generators))
        }
        ExprKind::GeneratorExp { elt, generators } => {
            format!("({}{})", expr_at(elt, TEST), comprehensions(generators))
        }
        ExprKind::DictComp {
            key,
            value,
            generators,
        } => format!(
            "{{{}: {}{}}}",
            expr_at(key, TEST),
            expr_at(value, TEST),
            comprehensions(generators)
        ),
        ExprKind::List(elts) => format!("[{}]", join(elts, TEST)),
        ExprKind::Tuple(elts) => match elts.len() {
            0 => "()".into(),
            1 => format!("{},", expr_at(&elts[0], TEST)),
            _ => join(elts, TEST),
        },
        ExprKind::Set(elts) => {
            if elts.is_empty() {
                "set()".into()
            } else {
                format!("{{{}}}", join(elts, TEST))
            }
        }
        ExprKind::Dict { keys, values } => {
            let items: Vec<String> = keys
                .iter()
                .zip(values)
                .map(|(k, v)| match k {
                    Some(k) => format!("{}: {}", expr_at(k, TEST), expr_at(v, TEST)),
                    None => format!("**{}", expr_at(v, BOR)),
                })
                .collect();
            format!("{{{}}}", items.join(", "))
        }
        ExprKind::Starred(v) => format!("*{}", expr_at(v, BOR)),
        ExprKind::IfExp { test, body, orelse } => format!(
            "{} if {} else {}",
            expr_at(body, OR),
            expr_at(test, OR),
            expr_at(orelse, TEST)
        ),
        ExprKind::Yield(None) => "yield".into(),
        ExprKind::Yield(Some(v)) => format!("yield {}", expr_at(v, TUPLE)),
        ExprKind::YieldFrom(v) => format!("yield from {}", expr_at(v, TEST)),
    }
}

fn callee_text(func: &Expr) -> String {
    match &func.kind {
        ExprKind::Constant(Constant::Int(_)) => format!("({})", expr_text(func)),
        _ => expr_at(func, ATOM),
    }
}

pub fn constant_text(c: &Constant) -> String {
    match c {
        Constant::Int(v) => v.to_string(),
        Constant::Float(v) => float_repr(*v),
        Constant::Str(s) => str_repr(s),
        Constant::Bytes(b) => bytes_repr(b),
        Constant::Bool(true) => "True".into(),
        Constant::Bool(false) => "False".into(),
        Constant::None => "None".into(),
        Constant::Ellipsis => "...".into(),
        Constant::FString(raw) => raw.clone(),
    }
}

/// Python-style `repr` of a float.
pub fn float_repr(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 {
            "1e309".into()
        } else {
            "-1e309".into()
        };
    }
    if v.is_nan() {
        return "nan".into();
    }
    let abs = v.abs();
    if abs != 0.0 && !(1e-4..1e16).contains(&abs) {
        // Rust prints `1e-7` / `1e100`; Python prints `1e-07` / `1e+100`.
        let s = format!("{v:e}");
        let (mant, exp) = s.split_once('e').expect("exponent form");
        let exp: i32 = exp.parse().expect("exponent");
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let s = format!("{v:?}");
    if s.contains('.') || s.contains('e') {
        s
    } else {
        format!("{s}.0")
    }
}

/// Python-style `repr` of a str.
pub fn str_repr(s: &str) -> String {
    let quote = if s.contains('\'') && !s.contains('"') {
        '"'
    } else {
        '\''
    };
    let mut out = String::new();
    out.push(quote);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                out.push_str(&format!("\\x{:02x}", c as u32))
            }
            c if c.is_control() => {
                let n = c as u32;
                if n <= 0xff {
                    out.push_str(&format!("\\x{n:02x}"));
                } else if n <= 0xffff {
                    out.push_str(&format!("\\u{n:04x}"));
                } else {
                    out.push_str(&format!("\\U{n:08x}"));
                }
            }
            c => out.push(c),
        }
    }
    out.push(quote);
    out
}

fn bytes_repr(b: &[u8]) -> String {
    let mut out = String::from("b'");
    for &x in b {
        match x {
            b'\\' => out.push_str("\\\\"),
            b'\'' => out.push_str("\\'"),
            b'\n' => out.push_str("\\n"),
            b'\r' => out.push_str("\\r"),
            b'\t' => out.push_str("\\t"),
            0x20..=0x7e => out.push(x as char),
            _ => out.push_str(&format!("\\x{x:02x}")),
        }
    }
    out.push('\'');
    out
}
