//! Constant folding against the reference interpreter.

mod common;

use lancet_core::cfg::build_from_module;
use lancet_core::frontend::parse_module;
use lancet_core::ssa::{analyze, DefKind};
use serde_json::Value;

#[test]
fn branch_example_values() {
    let text = std::fs::read_to_string(common::corpus().join("samples/b2.py")).unwrap();
    let cfg = build_from_module("b2", &parse_module(&text, "b2").unwrap());
    let (uses, consts) = analyze(&cfg);
    let folded = |n: &str, v: usize| {
        consts
            .get(n, v)
            .and_then(|d| d.folded.as_ref())
            .map(|f| f.to_json())
    };
    assert_eq!(folded("c", 0), Some(Value::from(10)));
    assert_eq!(folded("a", 0), Some(Value::from(-1)));
    assert_eq!(folded("a", 1), Some(Value::from(0)));
    assert_eq!(folded("a", 2), Some(Value::from(0)));
    assert_eq!(folded("total", 0), None);
    assert_eq!(consts.get("a", 1).unwrap().kind, DefKind::Arithmetic);
    assert_eq!(consts.get("a", 2).unwrap().kind, DefKind::Literal);
    let join = uses.at(3, 0).unwrap();
    assert_eq!(join["c"], [0].into());
    assert_eq!(join["a"], [1, 2].into());
}

#[test]
fn straight_line_matches_interpreter() {
    let compared = common::checks::straight_line_folding().unwrap();
    assert!(compared >= 35, "only {compared} values compared");
}
