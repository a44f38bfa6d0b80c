use super::*;

fn cg(src: &str) -> CallGraph {
    analyze_source("m", src).unwrap()
}

fn edges(src: &str) -> Vec<(String, String)> {
    output_edges(&cg(src))
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

#[test]
fn direct_calls() {
    let g = cg("def g(): pass\ndef f(): g()\nf()\n");
    assert_eq!(output_edges(&g), pairs(&[("m", "m.f"), ("m.f", "m.g")]));
    assert_eq!(
        to_simple_json(&g),
        "{\n  \"m\": [\n    \"m.f\"\n  ],\n  \"m.f\": [\n    \"m.g\"\n  ],\n  \"m.g\": []\n}\n"
    );
}

#[test]
fn higher_order_alias() {
    assert_eq!(edges("def g(): pass\nh = g\nh()\n"), pairs(&[("m", "m.g")]));
}

#[test]
fn empty_module() {
    let g = cg("");
    assert!(output_edges(&g).is_empty());
    assert_eq!(output_mods(&g), (vec!["m".to_string()], vec![]));
    assert_eq!(to_simple_json(&g), "{\n  \"m\": []\n}\n");
}

#[test]
fn nested_definitions() {
    let g = cg("def outer():\n    def inner(): pass\n    inner()\nouter()\n");
    assert_eq!(
        output_edges(&g),
        pairs(&[("m", "m.outer"), ("m.outer", "m.outer.inner")])
    );
    assert_eq!(g.nodes["m.outer.inner"], NodeKind::Function);
}

#[test]
fn duplicate_calls_give_one_edge() {
    assert_eq!(edges("def g(): pass\ng()\ng()\n"), pairs(&[("m", "m.g")]));
}

#[test]
fn functions_through_parameters_and_returns() {
    let src = "def a(): pass\ndef apply(fn):\n    return fn()\ndef make():\n    return a\napply(make())\n";
    assert_eq!(
        edges(src),
        pairs(&[("m", "m.apply"), ("m", "m.make"), ("m.apply", "m.a")])
    );
}

#[test]
fn classes_methods_and_inheritance() {
    let src = "class A:\n    def __init__(self): self.go()\n    def go(self): pass\n\
               class B(A):\n    def go(self):\n        super().go()\n\
               b = B()\nb.go()\n";
    let e = edges(src);
    for want in [
        ("m", "m.A"),
        ("m", "m.B"),
        ("m", "m.A.__init__"),
        ("m", "m.B.go"),
        ("m.A.__init__", "m.B.go"),
        ("m.B.go", "m.A.go"),
    ] {
        assert!(
            e.contains(&(want.0.to_string(), want.1.to_string())),
            "missing {want:?} in {e:?}"
        );
    }
    assert!(!e.contains(&("m".to_string(), "m.A.go".to_string())));
}

#[test]
fn builtins_with_function_arguments() {
    let src = "def k(x): return x\ndef p(x): return x\nsorted([1], key=k)\nlist(map(p, [1]))\nys = sorted([2], key=lambda v: k(v))\n";
    let e = edges(src);
    for want in [
        ("m", "m.k"),
        ("m", "m.p"),
        ("m", "m.<lambda>"),
        ("m.<lambda>", "m.k"),
    ] {
        assert!(
            e.contains(&(want.0.to_string(), want.1.to_string())),
            "missing {want:?}"
        );
    }
}

#[test]
fn containers_and_loops() {
    let src = "def f(): pass\ndef g(): pass\nfs = [f]\nfs.append(g)\nfor h in fs:\n    h()\nd = {}\nd['k'] = f\nd['k']()\n";
    assert_eq!(edges(src), pairs(&[("m", "m.f"), ("m", "m.g")]));
}

#[test]
fn externals_only_through_imports() {
    let g = cg("import os\nfrom os.path import join\nos.getcwd()\njoin('a')\nx = foo\nx.bar()\n");
    assert_eq!(
        output_edges(&g),
        pairs(&[("m", "os.getcwd"), ("m", "os.path.join")])
    );
    assert_eq!(g.nodes["os.getcwd"], NodeKind::External);
    assert_eq!(
        output_mods(&g).1,
        vec!["os".to_string(), "os.path".to_string()]
    );
}

#[test]
fn decorators_and_properties() {
    let src = "def deco(fn):\n    return fn\n@deco\ndef f(): pass\nf()\n\
               class C:\n    @property\n    def p(self): return 1\n    @staticmethod\n    def s(a): pass\n\
               c = C()\nc.p\nC.s(1)\n";
    let e = edges(src);
    for want in [
        ("m", "m.deco"),
        ("m", "m.f"),
        ("m", "m.C.p"),
        ("m", "m.C.s"),
    ] {
        assert!(
            e.contains(&(want.0.to_string(), want.1.to_string())),
            "missing {want:?}"
        );
    }
    assert!(!cg(src).diagnostics.is_empty());
}

#[test]
fn recursion_and_dynamic_features() {
    let g = cg("def f(n):\n    if n: f(n - 1)\n    getattr(n, 'x')\nf(2)\n");
    assert!(output_edges(&g).contains(&("m.f".into(), "m.f".into())));
    assert_eq!(g.diagnostics.len(), 1);
}

#[test]
fn deterministic_json() {
    let src = "class A:\n    def m(self): pass\nfor x in [A(), A()]:\n    x.m()\n";
    assert_eq!(to_simple_json(&cg(src)), to_simple_json(&cg(src)));
}

#[test]
fn package_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("example");
    std::fs::create_dir_all(&root).unwrap();
    for (n, t) in [
        (
            "module_a.py",
            "from .module_b import B\nfrom .module_c import C\nB().cwd()\n",
        ),
        (
            "module_b.py",
            "from .module_c import C\n\nclass B(C):\n    pass\n",
        ),
        (
            "module_c.py",
            "import os\n\nclass C:\n    def cwd(self):\n        return os.getcwd()\n",
        ),
    ] {
        std::fs::write(root.join(n), t).unwrap();
    }
    let g = analyze(&[], Some(&root)).unwrap();
    let (int, ext) = output_mods(&g);
    assert_eq!(
        int,
        vec!["example.module_a", "example.module_b", "example.module_c"]
    );
    assert_eq!(ext, vec!["os"]);
    let e = output_edges(&g);
    assert!(e.contains(&("example.module_a".into(), "example.module_c.C.cwd".into())));
    assert!(e.contains(&("example.module_c.C.cwd".into(), "os.getcwd".into())));

    let g = analyze(&[PathBuf::from("module_b.py")], Some(&root)).unwrap();
    assert_eq!(
        output_mods(&g).0,
        vec!["example.module_b", "example.module_c"]
    );
}

#[test]
fn standalone_files_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("main.py");
    let b = dir.path().join("helper.py");
    let bad = dir.path().join("bad.py");
    std::fs::write(&a, "import helper\nhelper.run()\n").unwrap();
    std::fs::write(&b, "def run(): pass\n").unwrap();
    std::fs::write(&bad, "def (:\n").unwrap();
    let g = analyze(&[a, b, bad], None).unwrap();
    assert!(output_edges(&g).contains(&("main".into(), "helper.run".into())));
    assert_eq!(g.parse_errors.len(), 1);
}

#[test]
fn assignment_graph_records_flows() {
    let g = cg("def g(): pass\nh = g\n");
    assert_eq!(g.assignment.value_sets["m.h"], ["m.g".to_string()].into());
    assert!(g.assignment.flows.contains(&("m.g".into(), "m.h".into())));
}
