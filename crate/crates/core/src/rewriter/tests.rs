use super::*;

fn parse(src: &str) -> Module {
    parse_module(src, "t.py").unwrap()
}

fn simplify(src: &str) -> String {
    unparse_module(&simplify_module(&parse(src)).unwrap())
}

#[test]
fn nested_calls_hoist_innermost_first() {
    assert_eq!(
        simplify("x = funA(funB(funC()))\n"),
        "_ret_1 = funC()\n_ret = funB(_ret_1)\nx = funA(_ret)\n"
    );
}

#[test]
fn arguments_hoisted_left_to_right() {
    assert_eq!(
        simplify("f(g(), h())\n"),
        "_ret = g()\n_ret_1 = h()\nf(_ret, _ret_1)\n"
    );
    // an earlier call-bearing argument blocks hoisting past it
    assert_eq!(simplify("f(a + g(), h())\n"), "f(a + g(), h())\n");
}

#[test]
fn temporaries_skip_existing_names() {
    assert_eq!(
        simplify("_ret = 1\nx = f(g())\n"),
        "_ret = 1\n_ret_1 = g()\nx = f(_ret_1)\n"
    );
}

#[test]
fn chain_keeps_final_role() {
    assert_eq!(
        simplify("y = a().b().c(1)\n"),
        "_ret = a()\n_ret_1 = _ret.b()\ny = _ret_1.c(1)\n"
    );
}

#[test]
fn comprehension_kinds() {
    assert_eq!(
        simplify("s = {i % 3 for i in xs if i}\n"),
        "s = set()\nfor i in xs:\n    if i:\n        s.add(i % 3)\n"
    );
    assert_eq!(
        simplify("d = {k: v for k, v in ps}\n"),
        "d = {}\nfor k, v in ps:\n    d[k] = v\n"
    );
    // generator expressions are left alone
    assert_eq!(simplify("g = (i for i in xs)\n"), "g = (i for i in xs)\n");
    // self-reference blocks unfolding
    assert_eq!(simplify("x = [x for y in x]\n"), "x = [x for y in x]\n");
}

#[test]
fn comprehension_variable_renamed_on_collision() {
    let out = simplify("i = 5\nlst = [i for i in range(3)]\nprint(i)\n");
    assert_eq!(
        out,
        "i = 5\nlst = []\nfor _ret in range(3):\n    lst.append(_ret)\nprint(i)\n"
    );
}

#[test]
fn lambda_inside_function() {
    assert_eq!(
        simplify("def f():\n    x = lambda a: a + 10\n    return x(1)\n"),
        "def f():\n    def x(a):\n        return a + 10\n    return x(1)\n"
    );
}

#[test]
fn no_match_is_identity() {
    let m = parse("x = 1\nif x:\n    print(x)\n");
    assert!(structurally_equal(&simplify_module(&m).unwrap(), &m));
}

#[test]
fn idempotent_and_fixpoint() {
    let src = "r = [f(g(i)) for i in h()[0]]\nv = o.p().q()[1:2]\nw = lambda: k(m())\n";
    let once = simplify_module(&parse(src)).unwrap();
    assert!(is_simplified(&once));
    let twice = simplify_module(&once).unwrap();
    assert!(structurally_equal(&once, &twice));
}

#[test]
fn apply_rule_passes_through_non_matching() {
    let s = &parse("x = 1\n").body[0];
    let mut n = TempNamer::default();
    for r in RULES {
        assert!(!r.matches(s));
        assert_eq!(apply_rule(r, s, &mut n), vec![s.clone()]);
    }
    assert_eq!(RewriteRule::from_id(4), Some(RewriteRule::LambdaConversion));
    assert_eq!(RewriteRule::from_id(6), None);
}

#[test]
fn hooks() {
    let m = parse("a = 1\n");
    assert!(structurally_equal(&run_transforms(&m, &[]).unwrap(), &m));
    let id = TransformHook::new("identity", Ok);
    assert!(structurally_equal(&run_transforms(&m, &[id]).unwrap(), &m));

    struct R;
    impl VisitMut for R {
        fn visit_expr(&mut self, e: &mut Expr) {
            if let ExprKind::Name(n) = &mut e.kind {
                if n == "a" {
                    *n = "b".into();
                }
            }
            walk_expr_mut(self, e);
        }
    }
    let rename = TransformHook::new("rename", |mut m: Module| {
        walk_module_mut(&mut R, &mut m);
        Ok(m)
    });
    let out = run_transforms(&m, &[rename]).unwrap();
    assert_eq!(unparse_module(&out), "b = 1\n");

    let failing = TransformHook::new("boom", |_| Err("nope".to_string()));
    let err = run_transforms(&m, &[failing]).unwrap_err().to_string();
    assert!(err.contains("boom") && err.contains("nope"), "{err}");

    let broken = TransformHook::new("broken", |mut m: Module| {
        if let StmtKind::Assign { targets, .. } = &mut m.body[0].kind {
            targets[0] = Expr::name("not valid", Span::default());
        }
        Ok(m)
    });
    assert!(run_transforms(&m, &[broken])
        .unwrap_err()
        .to_string()
        .contains("broken"));
}

#[test]
fn refine_chains() {
    let src = "f1().f2().f3()\n";
    let empty = BTreeMap::new();
    assert_eq!(
        unparse_module(&refine_call_chains(&parse(src), &empty)),
        "_ret = f1()\n_ret_1 = _ret.f2()\n_ret_1.f3()\n"
    );
    let types: BTreeMap<String, String> = [("f1", "A"), ("A.f2", "m.B")]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let typed = refine_call_chains(&parse(src), &types);
    assert_eq!(
        unparse_module(&typed),
        "_ret_A = f1()\n_ret_m_B = _ret_A.f2()\n_ret_m_B.f3()\n"
    );
    assert!(structurally_equal(
        &refine_call_chains(&typed, &types),
        &typed
    ));

    let two = parse("def g():\n    a().b().c()\n    d().e().f()\n");
    let out = refine_call_chains(&two, &empty);
    let StmtKind::FunctionDef(f) = &out.body[0].kind else {
        panic!()
    };
    assert_eq!(f.body.len(), 6);
    let temps: std::collections::BTreeSet<_> = f
        .body
        .iter()
        .filter_map(|s| match &s.kind {
            StmtKind::Assign { targets, .. } => targets[0].as_name().map(str::to_string),
            _ => None,
        })
        .collect();
    assert_eq!(temps.len(), 4);
}
