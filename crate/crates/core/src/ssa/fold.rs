//! Constant evaluation with the analyzed language's semantics for ints,
//! floats, strings, bools and `None`.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::frontend::*;

/// Longest string a fold may produce.
pub const MAX_STR: usize = 10_000;
/// Integers beyond this magnitude do not convert exactly to floats.
const EXACT_FLOAT_INT: i64 = 1 << 53;

#[derive(Debug, Clone, PartialEq)]
pub enum PyValue {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    None,
}

impl PyValue {
    /// `repr()` text.
    pub fn repr(&self) -> String {
        match self {
            PyValue::Int(i) => i.to_string(),
            PyValue::Float(f) => float_repr(*f),
            PyValue::Str(s) => str_repr(s),
            PyValue::Bool(true) => "True".into(),
            PyValue::Bool(false) => "False".into(),
            PyValue::None => "None".into(),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            PyValue::Int(_) => "int",
            PyValue::Float(_) => "float",
            PyValue::Str(_) => "str",
            PyValue::Bool(_) => "bool",
            PyValue::None => "None",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            PyValue::Int(i) => (*i).into(),
            PyValue::Float(f) => serde_json::Number::from_f64(*f)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            PyValue::Str(s) => s.clone().into(),
            PyValue::Bool(b) => (*b).into(),
            PyValue::None => serde_json::Value::Null,
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            PyValue::Int(i) => *i != 0,
            PyValue::Float(f) => *f != 0.0,
            PyValue::Str(s) => !s.is_empty(),
            PyValue::Bool(b) => *b,
            PyValue::None => false,
        }
    }

    fn from_constant(c: &Constant) -> Option<PyValue> {
        Some(match c {
            Constant::Int(i) => PyValue::Int(*i),
            Constant::Float(f) => PyValue::Float(*f),
            Constant::Str(s) if s.chars().count() <= MAX_STR => PyValue::Str(s.clone()),
            Constant::Bool(b) => PyValue::Bool(*b),
            Constant::None => PyValue::None,
            _ => return None,
        })
    }
}

/// Why an expression did not fold.
#[derive(Debug, Clone, PartialEq)]
pub enum NoFold {
    /// Operand not known or operation not modeled.
    Unknown,
    /// Evaluation would raise at run time, e.g. `ZeroDivisionError`.
    Fault(&'static str),
}

type Eval = Result<PyValue, NoFold>;

fn fault(kind: &'static str) -> Eval {
    Err(NoFold::Fault(kind))
}

enum Num {
    I(i64),
    F(f64),
}

fn num(v: &PyValue) -> Option<Num> {
    match v {
        PyValue::Int(i) => Some(Num::I(*i)),
        PyValue::Bool(b) => Some(Num::I(*b as i64)),
        PyValue::Float(f) => Some(Num::F(*f)),
        _ => None,
    }
}

fn as_float(i: i64) -> Result<f64, NoFold> {
    if i.abs() > EXACT_FLOAT_INT {
        Err(NoFold::Unknown)
    } else {
        Ok(i as f64)
    }
}

fn finite(f: f64) -> Eval {
    if f.is_finite() {
        Ok(PyValue::Float(f))
    } else {
        Err(NoFold::Unknown)
    }
}

fn int(r: Option<i64>) -> Eval {
    r.map(PyValue::Int).ok_or(NoFold::Unknown)
}

fn float_divmod(a: f64, b: f64) -> (f64, f64) {
    let mut m = a % b;
    let mut div = (a - m) / b;
    if m != 0.0 {
        if (b < 0.0) != (m < 0.0) {
            m += b;
            div -= 1.0;
        }
    } else {
        m = 0.0f64.copysign(b);
    }
    let floordiv = if div != 0.0 {
        let f = div.floor();
        if div - f > 0.5 {
            f + 1.0
        } else {
            f
        }
    } else {
        0.0f64.copysign(a / b)
    };
    (floordiv, m)
}

fn int_pow(a: i64, b: i64) -> Eval {
    if b < 0 {
        if a == 0 {
            return fault("ZeroDivisionError");
        }
        return finite(as_float(a)?.powf(b as f64));
    }
    let e = u32::try_from(b).map_err(|_| NoFold::Unknown)?;
    int(a.checked_pow(e))
}

fn arith(op: BinOpKind, l: &PyValue, r: &PyValue) -> Eval {
    use BinOpKind::*;
    if let (PyValue::Bool(a), PyValue::Bool(b)) = (l, r) {
        match op {
            BitAnd => return Ok(PyValue::Bool(a & b)),
            BitOr => return Ok(PyValue::Bool(a | b)),
            BitXor => return Ok(PyValue::Bool(a ^ b)),
            _ => {}
        }
    }
    match (l, r) {
        (PyValue::Str(a), PyValue::Str(b)) if op == Add => {
            if a.len() + b.len() > MAX_STR {
                return Err(NoFold::Unknown);
            }
            return Ok(PyValue::Str(format!("{a}{b}")));
        }
        (PyValue::Str(s), n) | (n, PyValue::Str(s)) if op == Mult => {
            let times = match n {
                PyValue::Int(i) => *i,
                PyValue::Bool(b) => *b as i64,
                _ => return Err(NoFold::Unknown),
            };
            if times <= 0 {
                return Ok(PyValue::Str(String::new()));
            }
            let len = (s.len() as u128) * (times as u128);
            if len > MAX_STR as u128 {
                return Err(NoFold::Unknown);
            }
            return Ok(PyValue::Str(s.repeat(times as usize)));
        }
        _ => {}
    }
    let (a, b) = match (num(l), num(r)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(NoFold::Unknown),
    };
    match (a, b) {
        (Num::I(a), Num::I(b)) => match op {
            Add => int(a.checked_add(b)),
            Sub => int(a.checked_sub(b)),
            Mult => int(a.checked_mul(b)),
            Div => {
                if b == 0 {
                    return fault("ZeroDivisionError");
                }
                finite(as_float(a)? / as_float(b)?)
            }
            FloorDiv | Mod => {
                if b == 0 {
                    return fault("ZeroDivisionError");
                }
                if a == i64::MIN && b == -1 {
                    return Err(NoFold::Unknown);
                }
                let (q, m) = (a.div_euclid(b), a.rem_euclid(b));
                // Python rounds the quotient toward negative infinity.
                let (q, m) = if b < 0 && m != 0 {
                    (q - 1, m + b)
                } else {
                    (q, m)
                };
                Ok(PyValue::Int(if op == FloorDiv { q } else { m }))
            }
            Pow => int_pow(a, b),
            LShift => {
                if b < 0 {
                    return fault("ValueError");
                }
                if a == 0 {
                    return Ok(PyValue::Int(0));
                }
                if b >= 63 {
                    return Err(NoFold::Unknown);
                }
                let r = a.checked_shl(b as u32).ok_or(NoFold::Unknown)?;
                if r >> b != a {
                    return Err(NoFold::Unknown);
                }
                Ok(PyValue::Int(r))
            }
            RShift => {
                if b < 0 {
                    return fault("ValueError");
                }
                Ok(PyValue::Int(a >> b.min(63)))
            }
            BitAnd => Ok(PyValue::Int(a & b)),
            BitOr => Ok(PyValue::Int(a | b)),
            BitXor => Ok(PyValue::Int(a ^ b)),
            MatMult => Err(NoFold::Unknown),
        },
        (a, b) => {
            let to_f = |n: Num| match n {
                Num::I(i) => as_float(i),
                Num::F(f) => Ok(f),
            };
            let (a, b) = (to_f(a)?, to_f(b)?);
            match op {
                Add => finite(a + b),
                Sub => finite(a - b),
                Mult => finite(a * b),
                Div => {
                    if b == 0.0 {
                        return fault("ZeroDivisionError");
                    }
                    finite(a / b)
                }
                FloorDiv | Mod => {
                    if b == 0.0 {
                        return fault("ZeroDivisionError");
                    }
                    let (q, m) = float_divmod(a, b);
                    finite(if op == FloorDiv { q } else { m })
                }
                Pow => {
                    if a == 0.0 && b < 0.0 {
                        return fault("ZeroDivisionError");
                    }
                    if a < 0.0 && b.fract() != 0.0 {
                        return Err(NoFold::Unknown);
                    }
                    finite(a.powf(b))
                }
                _ => Err(NoFold::Unknown),
            }
        }
    }
}

fn unary(op: UnaryOpKind, v: &PyValue) -> Eval {
    match op {
        UnaryOpKind::Not => Ok(PyValue::Bool(!v.truthy())),
        _ => match num(v) {
            Some(Num::I(i)) => match op {
                UnaryOpKind::Neg => int(i.checked_neg()),
                UnaryOpKind::Pos => Ok(PyValue::Int(i)),
                _ => Ok(PyValue::Int(!i)),
            },
            Some(Num::F(f)) => match op {
                UnaryOpKind::Neg => Ok(PyValue::Float(-f)),
                UnaryOpKind::Pos => Ok(PyValue::Float(f)),
                _ => Err(NoFold::Unknown),
            },
            None => Err(NoFold::Unknown),
        },
    }
}

fn num_cmp(a: &PyValue, b: &PyValue) -> Option<Result<Ordering, NoFold>> {
    let (a, b) = (num(a)?, num(b)?);
    Some(match (a, b) {
        (Num::I(x), Num::I(y)) => Ok(x.cmp(&y)),
        (x, y) => {
            let f = |n: Num| match n {
                Num::I(i) => as_float(i),
                Num::F(f) => Ok(f),
            };
            match (f(x), f(y)) {
                (Ok(x), Ok(y)) => x.partial_cmp(&y).ok_or(NoFold::Unknown),
                _ => Err(NoFold::Unknown),
            }
        }
    })
}

fn equal(a: &PyValue, b: &PyValue) -> Result<bool, NoFold> {
    if let Some(o) = num_cmp(a, b) {
        return o.map(|o| o == Ordering::Equal);
    }
    Ok(match (a, b) {
        (PyValue::Str(x), PyValue::Str(y)) => x == y,
        (PyValue::None, PyValue::None) => true,
        _ => false,
    })
}

fn compare(op: CmpOp, a: &PyValue, b: &PyValue) -> Result<bool, NoFold> {
    use CmpOp::*;
    match op {
        Eq => equal(a, b),
        NotEq => equal(a, b).map(|x| !x),
        Lt | LtE | Gt | GtE => {
            let ord = match (a, b) {
                (PyValue::Str(x), PyValue::Str(y)) => x.cmp(y),
                _ => match num_cmp(a, b) {
                    Some(o) => o?,
                    None => return Err(NoFold::Fault("TypeError")),
                },
            };
            Ok(match op {
                Lt => ord == Ordering::Less,
                LtE => ord != Ordering::Greater,
                Gt => ord == Ordering::Greater,
                _ => ord != Ordering::Less,
            })
        }
        Is | IsNot => {
            let same = match (a, b) {
                (PyValue::None, PyValue::None) => true,
                (PyValue::Bool(x), PyValue::Bool(y)) => x == y,
                (PyValue::None, _) | (_, PyValue::None) => false,
                (PyValue::Bool(_), _) | (_, PyValue::Bool(_)) => false,
                _ => return Err(NoFold::Unknown),
            };
            Ok(if op == Is { same } else { !same })
        }
        In | NotIn => match (a, b) {
            (PyValue::Str(x), PyValue::Str(y)) => Ok((op == In) == y.contains(x.as_str())),
            _ => Err(NoFold::Unknown),
        },
    }
}

/// Evaluate `e` with names looked up in `env`.
pub fn eval(e: &Expr, env: &HashMap<&str, PyValue>) -> Eval {
    match &e.kind {
        ExprKind::Constant(c) => PyValue::from_constant(c).ok_or(NoFold::Unknown),
        ExprKind::Name(n) => env.get(n.as_str()).cloned().ok_or(NoFold::Unknown),
        ExprKind::BinOp { left, op, right } => {
            let l = eval(left, env)?;
            let r = eval(right, env)?;
            arith(*op, &l, &r)
        }
        ExprKind::UnaryOp { op, operand } => unary(*op, &eval(operand, env)?),
        ExprKind::BoolOp { op, values } => {
            let mut last = PyValue::None;
            for v in values {
                last = eval(v, env)?;
                let stop = match op {
                    BoolOpKind::And => !last.truthy(),
                    BoolOpKind::Or => last.truthy(),
                };
                if stop {
                    break;
                }
            }
            Ok(last)
        }
        ExprKind::Compare {
            left,
            ops,
            comparators,
        } => {
            let mut l = eval(left, env)?;
            for (op, c) in ops.iter().zip(comparators) {
                let r = eval(c, env)?;
                if !compare(*op, &l, &r)? {
                    return Ok(PyValue::Bool(false));
                }
                l = r;
            }
            Ok(PyValue::Bool(true))
        }
        ExprKind::IfExp { test, body, orelse } => {
            if eval(test, env)?.truthy() {
                eval(body, env)
            } else {
                eval(orelse, env)
            }
        }
        _ => Err(NoFold::Unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str) -> Eval {
        let m = parse_module(&format!("_ = {src}\n"), "t").unwrap();
        let StmtKind::Assign { value, .. } = &m.body[0].kind else {
            unreachable!()
        };
        eval(value, &HashMap::new())
    }

    fn r(src: &str) -> String {
        ev(src)
            .map(|v| v.repr())
            .unwrap_or_else(|e| format!("{e:?}"))
    }

    #[test]
    fn python_arithmetic() {
        assert_eq!(r("-7 // 2"), "-4");
        assert_eq!(r("-7 % 2"), "1");
        assert_eq!(r("7 % -2"), "-1");
        assert_eq!(r("7 // -2"), "-4");
        assert_eq!(r("-7.5 // 2"), "-4.0");
        assert_eq!(r("-7.5 % 2"), "0.5");
        assert_eq!(r("7 / 2"), "3.5");
        assert_eq!(r("2 ** -1"), "0.5");
        assert_eq!(r("True + True"), "2");
        assert_eq!(r("True & False"), "False");
        assert_eq!(r("~True"), "-2");
        assert_eq!(r("'ab' * 2 + 'c'"), "'ababc'");
        assert_eq!(r("1 < 2 < 3"), "True");
        assert_eq!(r("1 == 1.0"), "True");
        assert_eq!(r("0 or 'x'"), "'x'");
        assert_eq!(r("None is None"), "True");
        assert_eq!(r("'b' in 'abc'"), "True");
        assert_eq!(r("1 if 0 else 2"), "2");
    }

    #[test]
    fn faults_and_limits() {
        assert_eq!(ev("1 / 0"), Err(NoFold::Fault("ZeroDivisionError")));
        assert_eq!(ev("1.0 % 0"), Err(NoFold::Fault("ZeroDivisionError")));
        assert_eq!(ev("1 < 'a'"), Err(NoFold::Fault("TypeError")));
        assert_eq!(ev("9223372036854775807 + 1"), Err(NoFold::Unknown));
        assert_eq!(ev("'x' * 20000"), Err(NoFold::Unknown));
        assert_eq!(ev("1e308 * 10"), Err(NoFold::Unknown));
        assert_eq!(ev("f(1)"), Err(NoFold::Unknown));
    }
}
