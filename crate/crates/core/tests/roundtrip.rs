//! Parsing and unparsing preserve program structure, judged both by our
//! own AST and by the reference parser.

mod common;

use lancet_core::frontend::{parse_module, structurally_equal, unparse_module};
use proptest::prelude::*;

/// Reads pairs of paths from argv and prints the indices of pairs whose
/// `ast.dump` differs.
const SAME_AST: &str = r#"
import ast, sys
args = sys.argv[1:]
for k in range(0, len(args), 2):
    a, b = (ast.dump(ast.parse(open(p).read())) for p in args[k:k + 2])
    if a != b:
        print(k // 2)
"#;

#[test]
fn corpus_roundtrips() {
    assert!(common::checks::roundtrip_corpus().unwrap() > 50);
}

#[test]
fn reference_parser_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("same.py");
    std::fs::write(&script, SAME_AST).unwrap();
    let files = common::all_sources();
    let mut args = vec![script.clone().into_os_string()];
    for (k, file) in files.iter().enumerate() {
        let text = std::fs::read_to_string(file).unwrap();
        let out = dir.path().join(format!("{k}.py"));
        std::fs::write(&out, unparse_module(&parse_module(&text, "t").unwrap())).unwrap();
        args.push(file.clone().into_os_string());
        args.push(out.into_os_string());
    }
    let refs: Vec<&std::ffi::OsStr> = args.iter().map(|a| a.as_os_str()).collect();
    let out = common::python(&refs, None);
    assert_eq!(out.status, 0, "{}", out.stderr);
    let bad: Vec<String> = out
        .stdout
        .lines()
        .map(|l| files[l.parse::<usize>().unwrap()].display().to_string())
        .collect();
    assert!(bad.is_empty(), "structure changed: {bad:?}");
}

#[test]
fn syntax_errors_carry_positions() {
    for bad in [
        "x = (1,\n",
        "def f(:\n    pass\n",
        "if x\n    y = 1\n",
        "x = 1 +\n",
    ] {
        let e = parse_module(bad, "bad.py").unwrap_err();
        assert!(e.line >= 1, "{bad:?}");
        assert!(e.to_string().contains("bad.py"), "{e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_programs_roundtrip(text in common::gen::program()) {
        let m = parse_module(&text, "t").unwrap();
        let again = parse_module(&unparse_module(&m), "t").unwrap();
        prop_assert!(structurally_equal(&m, &again));
    }
}
