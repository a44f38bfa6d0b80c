//! Random small programs for property tests.

use proptest::prelude::*;

const VARS: &[&str] = &["a", "b", "c", "d"];

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(VARS).prop_map(str::to_string)
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => var(),
        2 => (0i64..20).prop_map(|n| n.to_string()),
        1 => prop::sample::select(&["'s'", "'t'", "1.5", "True", "None"][..]).prop_map(str::to_string),
    ]
}

pub fn expr() -> impl Strategy<Value = String> {
    atom().prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                prop::sample::select(&["+", "-", "*"][..]),
                inner.clone()
            )
                .prop_map(|(l, op, r)| format!("({l} {op} {r})")),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("f({l}, {r})")),
            inner.clone().prop_map(|x| format!("[{x}]")),
            (inner.clone(), var()).prop_map(|(x, v)| format!("[{x} for {v} in range(3)]")),
            inner.prop_map(|x| format!("g({x})[0:1]")),
        ]
    })
}

fn stmts(depth: u32) -> BoxedStrategy<Vec<String>> {
    let simple = prop_oneof![
        4 => (var(), expr()).prop_map(|(v, e)| vec![format!("{v} = {e}")]),
        1 => (var(), expr()).prop_map(|(v, e)| vec![format!("{v} += {e}")]),
        1 => expr().prop_map(|e| vec![format!("print({e})")]),
        1 => (var(), var()).prop_map(|(a, b)| vec![format!("{a} = {b}")]),
    ];
    if depth == 0 {
        return prop::collection::vec(simple, 1..4)
            .prop_map(|v| v.concat())
            .boxed();
    }
    let nested = stmts(depth - 1);
    let compound = prop_oneof![
        3 => simple.clone(),
        1 => (var(), nested.clone(), nested.clone()).prop_map(|(c, t, e)| {
            let mut out = vec![format!("if {c}:")];
            out.extend(t.iter().map(|l| format!("    {l}")));
            out.push("else:".into());
            out.extend(e.iter().map(|l| format!("    {l}")));
            out
        }),
        1 => (var(), nested.clone()).prop_map(|(c, body)| {
            let mut out = vec![format!("while {c}:")];
            out.extend(body.iter().map(|l| format!("    {l}")));
            out.push("    break".into());
            out
        }),
        1 => (var(), nested.clone()).prop_map(|(v, body)| {
            let mut out = vec![format!("for {v} in range(2):")];
            out.extend(body.iter().map(|l| format!("    {l}")));
            out
        }),
        1 => nested.clone().prop_map(|body| {
            let mut out = vec!["def h(a, b=1):".to_string()];
            out.extend(body.iter().map(|l| format!("    {l}")));
            out.push("    return a".into());
            out
        }),
    ];
    prop::collection::vec(compound, 1..5)
        .prop_map(|v| v.concat())
        .boxed()
}

/// A module whose free names `f`, `g` and the four variables are defined
/// up front, so every generated program runs.
pub fn program() -> impl Strategy<Value = String> {
    stmts(2).prop_map(|body| {
        let mut text = String::from(
            "def f(x, y):\n    return x\ndef g(x):\n    return [x, x]\na = 1\nb = 2\nc = 0\nd = 'd'\n",
        );
        for l in body {
            text.push_str(&l);
            text.push('\n');
        }
        text
    })
}
