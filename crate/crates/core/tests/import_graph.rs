//! Import graphs of the example packages and of generated packages whose
//! imports are known by construction.

mod common;

use std::collections::BTreeSet;

use lancet_core::modgraph::{leaf_nodes, ImportGraph};
use proptest::prelude::*;

fn pairs(list: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    list.iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn leaves(g: &ImportGraph) -> Vec<String> {
    leaf_nodes(g).iter().map(|n| n.full_name.clone()).collect()
}

#[test]
fn three_module_example() {
    let g = ImportGraph::build(&common::corpus().join("samples/example")).unwrap();
    assert_eq!(
        g.internal_edges,
        pairs(&[
            ("example.module_a", "example.module_b"),
            ("example.module_a", "example.module_c"),
            ("example.module_b", "example.module_c"),
        ])
    );
    assert_eq!(leaves(&g), ["example.module_c"]);
    assert_eq!(g.external_modules(), BTreeSet::from(["os".to_string()]));
    assert!(g.diagnostics.is_empty());
}

#[test]
fn nested_folders_without_init_files() {
    let g = ImportGraph::build(&common::corpus().join("packages/example_pkg")).unwrap();
    let p = |s: &str| format!("example_pkg.{s}");
    let want: BTreeSet<(String, String)> = [
        ("main", "sub_folder1.module1"),
        ("main", "sub_folder1.module2"),
        ("main", "sub_folder2.helpers"),
        ("sub_folder1.module1", "sub_folder1.module2"),
    ]
    .iter()
    .map(|(a, b)| (p(a), p(b)))
    .collect();
    assert_eq!(g.internal_edges, want);
    assert_eq!(
        leaves(&g),
        [p("sub_folder1.module2"), p("sub_folder2.helpers")]
    );
}

/// Module `i` lives at `pkg/m{i}.py` when `i` is even and at
/// `pkg/sub/m{i}.py` when odd.
fn dotted(i: usize) -> String {
    if i.is_multiple_of(2) {
        format!("m{i}")
    } else {
        format!("sub.m{i}")
    }
}

/// One way of writing an import of module `j` from module `i`.
fn import_line(i: usize, j: usize, style: u8) -> String {
    let path = dotted(j);
    let (parent, leaf) = match path.rsplit_once('.') {
        Some((p, l)) => (Some(p.to_string()), l.to_string()),
        None => (None, path.clone()),
    };
    match style % 5 {
        0 => format!("import pkg.{path}\n"),
        1 => format!("import {path}\n"),
        2 => match &parent {
            Some(p) => format!("from pkg.{p} import {leaf}\n"),
            None => format!("from pkg import {leaf}\n"),
        },
        3 => format!("from pkg.{path} import thing\n"),
        _ => {
            // Relative form, climbing out of `sub` when needed.
            let up = if i % 2 == 1 { ".." } else { "." };
            match &parent {
                Some(p) if i % 2 == 1 => {
                    format!("from . import {leaf}\nfrom {up}{p} import {leaf}\n")
                }
                Some(p) => format!("from .{p} import {leaf}\n"),
                None => format!("from {up}{leaf} import thing\n"),
            }
        }
    }
}

const EXTERNAL: &[&str] = &["os", "json.decoder", "collections", "itertools"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_packages(
        n in 2usize..7,
        imports in prop::collection::vec((0usize..7, 0usize..7, any::<u8>()), 0..14),
        externals in prop::collection::vec((0usize..7, 0usize..4), 0..4),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("pkg");
        std::fs::create_dir_all(root.join("sub")).unwrap();
        let mut texts = vec![String::new(); n];
        let mut want = BTreeSet::new();
        for &(i, j, style) in &imports {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            texts[i].push_str(&import_line(i, j, style));
            want.insert((format!("pkg.{}", dotted(i)), format!("pkg.{}", dotted(j))));
        }
        let mut want_ext = BTreeSet::new();
        for &(i, e) in &externals {
            texts[i % n].push_str(&format!("import {}\n", EXTERNAL[e]));
            want_ext.insert(EXTERNAL[e].to_string());
        }
        for (i, t) in texts.iter().enumerate() {
            let path = root.join(format!("{}.py", dotted(i).replace('.', "/")));
            std::fs::write(path, format!("{t}x = {i}\n")).unwrap();
        }
        let g = ImportGraph::build(&root).unwrap();
        prop_assert_eq!(&g.internal_edges, &want);
        prop_assert_eq!(g.external_modules(), want_ext);
        let importers: BTreeSet<&String> = want.iter().map(|(a, _)| a).collect();
        let want_leaves: BTreeSet<String> = (0..n)
            .map(|i| format!("pkg.{}", dotted(i)))
            .filter(|m| !importers.contains(m))
            .collect();
        prop_assert_eq!(leaves(&g).into_iter().collect::<BTreeSet<_>>(), want_leaves);
    }
}
