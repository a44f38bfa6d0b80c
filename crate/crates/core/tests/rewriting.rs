//! Simplification rules against golden output and the reference
//! interpreter.

mod common;

use std::collections::BTreeSet;

use common::alpha_equal;
use lancet_core::frontend::{parse_module, structurally_equal, unparse_module, Module};
use lancet_core::modgraph::builtin_names;
use lancet_core::rewriter::{identifier_counts, is_simplified, simplify_module};
use proptest::prelude::*;

fn simplify(text: &str) -> Module {
    simplify_module(&parse_module(text, "t").unwrap()).unwrap()
}

const TABLE: &[(&str, &str)] = &[
    (
        "lst = [i for i in range(N)]\n",
        "lst = []\nfor i in range(N):\n    lst.append(i)\n",
    ),
    ("x = funA(funB())\n", "_ret = funB()\nx = funA(_ret)\n"),
    ("x = funA()[1:10]\n", "_ret = funA()\nx = _ret[1:10]\n"),
    ("x = lambda a: a + 10\n", "def x(a):\n    return a + 10\n"),
    (
        "f1().f2().f3()\n",
        "_ret = f1()\n_ret_1 = _ret.f2()\n_ret_1.f3()\n",
    ),
];

#[test]
fn table_rules_up_to_renaming() {
    for (before, after) in TABLE {
        let got = simplify(before);
        assert!(
            alpha_equal(&got, after),
            "{before:?} became {:?}",
            unparse_module(&got)
        );
    }
}

#[test]
fn renaming_is_not_identity() {
    // The comparison must still tell different programs apart.
    assert!(!alpha_equal(
        &simplify("x = funA(funB())\n"),
        "_ret = funA()\nx = funB(_ret)\n"
    ));
}

#[test]
fn corpus_behaves_the_same_after_rewriting() {
    let changed = common::checks::rewrite_semantics().unwrap();
    assert!(changed >= 20, "only {changed} rewrite cases");
}

#[test]
fn corpus_reaches_fixpoint_with_fresh_names() {
    for file in common::all_sources() {
        let text = std::fs::read_to_string(&file).unwrap();
        let original = parse_module(&text, "t").unwrap();
        let once = simplify_module(&original).unwrap();
        assert!(is_simplified(&once), "{}", file.display());
        assert!(
            structurally_equal(&simplify_module(&once).unwrap(), &once),
            "{}",
            file.display()
        );
        let before: BTreeSet<String> = identifier_counts(&original).into_keys().collect();
        let after: BTreeSet<String> = identifier_counts(&once).into_keys().collect();
        for name in after.difference(&before) {
            let helper = builtin_names().contains(&name.as_str())
                || matches!(name.as_str(), "append" | "add");
            assert!(
                name.starts_with("_ret") || helper,
                "{}: unexpected new name {name}",
                file.display()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplification_is_idempotent(text in common::gen::program()) {
        let once = simplify(&text);
        prop_assert!(is_simplified(&once));
        prop_assert!(structurally_equal(&simplify_module(&once).unwrap(), &once));
        let reparsed = parse_module(&unparse_module(&once), "t").unwrap();
        prop_assert!(structurally_equal(&reparsed, &once));
    }
}
