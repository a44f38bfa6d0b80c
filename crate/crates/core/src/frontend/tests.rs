use super::*;
use proptest::prelude::*;

const FIB: &str = "# example.py
def fib():
    a, b = 0, 1
    while True:
        yield a
        a, b = b, a + b

fib_gen = fib()
for _ in range(10):
    next(fib_gen)
";

fn roundtrip(src: &str) {
    let m = parse_module(src, "t.py").unwrap_or_else(|e| panic!("{e}\n{src}"));
    let text = unparse_module(&m);
    let m2 = parse_module(&text, "t.py").unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert!(
        structurally_equal(&m, &m2),
        "round-trip mismatch:\n{src}\n---\n{text}"
    );
    assert_eq!(unparse_module(&m2), text, "unparse not stable");
}

#[test]
fn single_assignment() {
    let m = parse_module("x = 1", "t.py").unwrap();
    assert_eq!(m.body.len(), 1);
    match &m.body[0].kind {
        StmtKind::Assign { targets, value } => {
            assert_eq!(targets[0].as_name(), Some("x"));
            assert_eq!(value.kind, ExprKind::Constant(Constant::Int(1)));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(unparse_module(&m), "x = 1\n");
}

#[test]
fn fib_statement_lines() {
    let m = parse_module(FIB, "example.py").unwrap();
    let kinds: Vec<(&str, u32)> = m
        .body
        .iter()
        .map(|s| (s.kind_name(), s.span.start_line))
        .collect();
    assert_eq!(kinds, vec![("FunctionDef", 2), ("Assign", 8), ("For", 9)]);
}

#[test]
fn malformed_def_reports_line_one() {
    let e = parse_module("def f(:", "bad.py").unwrap_err();
    assert_eq!(e.line, 1);
    assert!(e.to_string().starts_with("bad.py:1:"));
}

#[test]
fn empty_module_unparses_to_nothing() {
    let m = parse_module("", "t.py").unwrap();
    assert!(m.body.is_empty());
    assert_eq!(unparse_module(&m), "");
}

#[test]
fn lambda_def_unparse() {
    let m = parse_module("def fun(x):\n    return x + 1\n", "t.py").unwrap();
    assert_eq!(unparse_module(&m), "def fun(x):\n    return x + 1\n");
}

#[test]
fn unsupported_constructs_rejected() {
    for src in [
        "async def f():\n    pass\n",
        "match x:\n    case 1:\n        pass\n",
        "@dec(1)\ndef f():\n    pass\n",
        "x: int = 1\n",
        "if (y := 2):\n    pass\n",
        "x = 1j\n",
        "x = 99999999999999999999999\n",
    ] {
        assert!(parse_module(src, "t.py").is_err(), "accepted: {src}");
    }
}

#[test]
fn global_and_fstring_accepted() {
    let m = parse_module("def f():\n    global g\n    return f'{g}!'\n", "t.py").unwrap();
    let StmtKind::FunctionDef(f) = &m.body[0].kind else {
        panic!()
    };
    assert!(matches!(f.body[0].kind, StmtKind::Global(_)));
    roundtrip("def f():\n    global g\n    return f'{g}!'\n");
}

#[test]
fn roundtrip_assorted() {
    for src in [
        "x = (a + b) * c - -d ** 2\n",
        "y = a if b else (c if d else e)\n",
        "z = not (a and b) or c\n",
        "f(*args, k=1, **kw)\n",
        "v = [i * j for i in range(3) if i for j in range(i)]\n",
        "d = {k: v for (k, v) in items}\n",
        "s = {1, 2}\nt = ()\nu = (1,)\n",
        "a[1:2, ::3] = b[-1]\n",
        "lam = lambda x, *y, z=1, **w: x + z\n",
        "class C(B, metaclass=M):\n    x = 1\n    def m(self, /, a, *, b=2):\n        return self.x\n",
        "try:\n    pass\nexcept (A, B) as e:\n    raise C from e\nelse:\n    pass\nfinally:\n    del x, y[0]\n",
        "with open(p) as f, lock:\n    data = f.read()\n",
        "while x:\n    if a:\n        break\n    elif b:\n        continue\n    else:\n        x -= 1\nelse:\n    pass\n",
        "def g():\n    x = yield\n    y = yield x\n    yield from range(3)\n    return (yield)\n",
        "import a.b as c, d\nfrom .. import e as f\nfrom .m import (g, h)\nfrom x import *\n",
        "assert x > 0, 'msg'\n",
        "x = 'a' 'b'\nb = b'\\x00raw'\n",
        "print(1e-07, 1e16, 0.5, 3.0, 0x1F, 1_000)\n",
        "x = a < b <= c != d is not e not in f\n",
        "@staticmethod\n@mod.deco\ndef f():\n    ...\n",
        "x = -(-1)\ny = (-2) ** 2\nz = 2 ** -1\n",
        "x = (yield)\n",
        "for x, (y, z) in pairs:\n    pass\n",
        "x = a.b.c(d)[e].f\n",
        "x = {**a, 'b': 1}\n",
        "nonlocal_ok = 1\n",
    ] {
        roundtrip(src);
    }
}

#[test]
fn parse_is_deterministic() {
    assert_eq!(
        parse_module(FIB, "t.py").unwrap(),
        parse_module(FIB, "t.py").unwrap()
    );
}

#[test]
fn walk_orders() {
    let m = parse_module("x = 1", "t.py").unwrap();
    let pre: Vec<&str> = walk(NodeRef::Module(&m), Order::Pre)
        .iter()
        .map(|n| n.kind())
        .collect();
    assert_eq!(pre, ["Module", "Assign", "Name", "Constant"]);
    let post: Vec<&str> = walk(NodeRef::Module(&m), Order::Post)
        .iter()
        .map(|n| n.kind())
        .collect();
    assert_eq!(post, ["Name", "Constant", "Assign", "Module"]);

    let leaf = Expr::name("a", Span::default());
    assert_eq!(walk(NodeRef::Expr(&leaf), Order::Pre).len(), 1);
}

#[test]
fn fib_has_one_function_def() {
    let m = parse_module(FIB, "t.py").unwrap();
    let defs = walk(NodeRef::Module(&m), Order::Pre)
        .iter()
        .filter(|n| n.kind() == "FunctionDef")
        .count();
    assert_eq!(defs, 1);
}

fn check_spans(src: &str) {
    let m = parse_module(src, "t.py").unwrap();
    fn go(n: NodeRef<'_>) {
        let s = n.span();
        assert!(s.start_line >= 1);
        assert!(
            (s.start_line, s.start_col) <= (s.end_line, s.end_col),
            "{s:?}"
        );
        for c in n.children() {
            assert!(
                s.contains(&c.span()),
                "{} {:?} escapes {} {:?}",
                c.kind(),
                c.span(),
                n.kind(),
                s
            );
            go(c);
        }
    }
    go(NodeRef::Module(&m));
}

#[test]
fn spans_nest() {
    check_spans(FIB);
    check_spans(
        "@d\nclass C(B):\n    def m(self, a=(1 + 2)):\n        return [x for x in (a).b if x]\n",
    );
    check_spans("x = {'a': f(k=1), **z}\ny = a[1:2]\n");
}

#[test]
fn module_names() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("example");
    let n = |rel: &str| module_name_for_path(&root, &root.join(rel)).unwrap();
    assert_eq!(n("module_a.py"), "example.module_a");
    assert_eq!(n("sub/mod.py"), "example.sub.mod");
    assert_eq!(n("sub/__init__.py"), "example.sub");
    assert_eq!(n("__init__.py"), "example");
    assert!(module_name_for_path(&root, &tmp.path().join("other.py")).is_err());
    assert!(module_name_for_path(&root, &root.join("x.txt")).is_err());
}

#[test]
fn source_file_rejects_non_utf8() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("bad.py");
    std::fs::write(&p, [0x78, 0x3d, 0xff, 0x0a]).unwrap();
    assert!(matches!(SourceFile::read(None, &p), Err(Error::Utf8(_))));
    assert!(matches!(
        SourceFile::read(None, tmp.path()),
        Err(Error::NotAFile(_))
    ));
    let ok = tmp.path().join("ok.py");
    std::fs::write(&ok, "x = 1\n").unwrap();
    assert_eq!(SourceFile::read(None, &ok).unwrap().module_name, "ok");
}

// ---- generated trees ---------------------------------------------------

fn sp() -> Span {
    Span::default()
}

fn e(kind: ExprKind) -> Expr {
    Expr::new(kind, sp())
}

fn arb_leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        prop::sample::select(vec!["a", "b", "xs", "f"]).prop_map(|n| Expr::name(n, sp())),
        (0i64..1000).prop_map(|i| e(ExprKind::Constant(Constant::Int(i)))),
        prop::sample::select(vec![0.5f64, 2.0, 1e-7, 1e20])
            .prop_map(|f| e(ExprKind::Constant(Constant::Float(f)))),
        "[a-z '\"\\\\]{0,6}".prop_map(|s| e(ExprKind::Constant(Constant::Str(s)))),
        any::<bool>().prop_map(|b| e(ExprKind::Constant(Constant::Bool(b)))),
        Just(e(ExprKind::Constant(Constant::None))),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    arb_leaf().prop_recursive(4, 32, 3, |inner| {
        let b = |x: Expr| Box::new(x);
        prop_oneof![
            (
                inner.clone(),
                prop::sample::select(vec![
                    BinOpKind::Add,
                    BinOpKind::Sub,
                    BinOpKind::Mult,
                    BinOpKind::Div,
                    BinOpKind::Pow,
                    BinOpKind::Mod,
                    BinOpKind::BitOr,
                    BinOpKind::LShift,
                ]),
                inner.clone()
            )
                .prop_map(move |(l, op, r)| e(ExprKind::BinOp {
                    left: b(l),
                    op,
                    right: b(r)
                })),
            (
                prop::sample::select(vec![
                    UnaryOpKind::Neg,
                    UnaryOpKind::Not,
                    UnaryOpKind::Invert
                ]),
                inner.clone()
            )
                .prop_map(move |(op, x)| e(ExprKind::UnaryOp { op, operand: b(x) })),
            (
                prop::sample::select(vec![BoolOpKind::And, BoolOpKind::Or]),
                prop::collection::vec(inner.clone(), 2..4)
            )
                .prop_map(|(op, values)| e(ExprKind::BoolOp { op, values })),
            (
                inner.clone(),
                prop::collection::vec(
                    (
                        prop::sample::select(vec![CmpOp::Lt, CmpOp::Eq, CmpOp::In, CmpOp::IsNot]),
                        inner.clone()
                    ),
                    1..3
                )
            )
                .prop_map(move |(l, rest)| {
                    let (ops, comparators) = rest.into_iter().unzip();
                    e(ExprKind::Compare {
                        left: b(l),
                        ops,
                        comparators,
                    })
                }),
            (inner.clone(), prop::collection::vec(inner.clone(), 0..3)).prop_map(
                move |(f, args)| e(ExprKind::Call {
                    func: b(f),
                    args,
                    keywords: vec![]
                })
            ),
            (inner.clone(), prop::sample::select(vec!["x", "upper"])).prop_map(move |(v, a)| e(
                ExprKind::Attribute {
                    value: b(v),
                    attr: a.to_string()
                }
            )),
            (inner.clone(), inner.clone()).prop_map(move |(v, s)| e(ExprKind::Subscript {
                value: b(v),
                slice: b(s)
            })),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|v| e(ExprKind::Tuple(v))),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|v| e(ExprKind::List(v))),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(move |(t, x, y)| e(
                ExprKind::IfExp {
                    test: b(t),
                    body: b(x),
                    orelse: b(y)
                }
            )),
            inner.clone().prop_map(move |body| e(ExprKind::Lambda {
                params: Box::new(Parameters {
                    args: vec![Param {
                        name: "q".into(),
                        annotation: None,
                        default: None,
                        span: sp()
                    }],
                    ..Parameters::default()
                }),
                body: b(body)
            })),
        ]
    })
}

proptest! {
    #[test]
    fn generated_expressions_roundtrip(x in arb_expr()) {
        let m = Module {
            body: vec![Stmt::new(
                StmtKind::Assign { targets: vec![Expr::name("r", sp())], value: x },
                sp(),
            )],
            span: sp(),
        };
        let text = unparse_module(&m);
        let back = parse_module(&text, "gen.py").map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(structurally_equal(&m, &back), "{}", text);
    }

    #[test]
    fn lexer_never_panics(s in "[ -~\n\t]{0,60}") {
        let _ = parse_module(&s, "fuzz.py");
    }
}
