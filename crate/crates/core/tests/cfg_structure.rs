//! CFG shape checks: golden counts, well-formedness, and executed line
//! sequences replayed as paths through the graph.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use lancet_core::cfg::{build_from_module, BlockId, Cfg};
use lancet_core::frontend::{parse_module, Stmt};
use serde_json::Value;

fn cfg_of(path: &std::path::Path) -> Cfg {
    let text = std::fs::read_to_string(path).unwrap();
    let name = path.file_stem().unwrap().to_string_lossy().into_owned();
    build_from_module(&name, &parse_module(&text, &name).unwrap())
}

fn counts(c: &Cfg) -> Value {
    let functions: Vec<&str> = c.function_cfgs.keys().map(|(_, n)| n.as_str()).collect();
    serde_json::json!({"blocks": c.blocks.len(), "edges": c.links().count(), "functions": functions})
}

#[test]
fn fib_matches_golden_counts() {
    let c = common::corpus();
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(c.join("golden/fib_cfg.json")).unwrap())
            .unwrap();
    let cfg = cfg_of(&c.join("samples/fib.py"));
    assert_eq!(counts(&cfg), golden["module"]);
    let (_, fib) = cfg.function_cfgs.iter().next().unwrap();
    assert_eq!(counts(fib), golden["fib"]);
}

#[test]
fn same_name_definitions_stay_apart() {
    let cfg = cfg_of(&common::corpus().join("samples/solve.py"));
    let keys: Vec<_> = cfg.function_cfgs.keys().cloned().collect();
    assert_eq!(keys.len(), 2);
    assert!(keys.iter().all(|(_, n)| n == "solve"));
    assert_ne!(keys[0].0, keys[1].0);
    let bodies: BTreeSet<String> = cfg
        .function_cfgs
        .values()
        .map(|c| lancet_core::frontend::unparse_stmt(&c.block(c.entry).statements[0]))
        .collect();
    assert_eq!(bodies.len(), 2);
}

fn well_formed(label: &str, c: &Cfg) {
    assert!(c.blocks.contains_key(&c.entry), "{label}: entry missing");
    for (id, b) in &c.blocks {
        assert_eq!(*id, b.id, "{label}");
        for l in &b.exits {
            assert_eq!(l.source, *id, "{label}");
            let target = c
                .blocks
                .get(&l.target)
                .unwrap_or_else(|| panic!("{label}: dangling edge"));
            assert!(
                target.predecessors.contains(l),
                "{label}: {} -> {} not mirrored",
                l.source,
                l.target
            );
        }
        for l in &b.predecessors {
            assert_eq!(l.target, *id, "{label}");
            assert!(
                c.block(l.source).exits.contains(l),
                "{label}: stray predecessor"
            );
        }
    }
    for f in &c.final_blocks {
        assert!(
            c.block(*f).exits.is_empty(),
            "{label}: final block {f} has exits"
        );
    }
    // Unreachable blocks are exactly those no path from the entry visits.
    let mut seen = BTreeSet::new();
    let mut stack = vec![c.entry];
    while let Some(b) = stack.pop() {
        if seen.insert(b) {
            stack.extend(c.successors(b));
        }
    }
    for id in c.blocks.keys() {
        if c.unreachable.contains(id) {
            assert!(!seen.contains(id), "{label}: block {id} is reachable");
        }
    }
}

#[test]
fn corpus_cfgs_are_well_formed() {
    for file in common::all_sources() {
        let cfg = cfg_of(&file);
        let label = file.display().to_string();
        well_formed(&label, &cfg);
        for (path, sub) in cfg.all_nested() {
            well_formed(&format!("{label}:{path}"), sub);
        }
    }
}

fn is_compound(s: &Stmt) -> bool {
    matches!(
        s.kind_name(),
        "If" | "While" | "For" | "Try" | "With" | "FunctionDef" | "ClassDef"
    )
}

type LineMap = HashMap<u32, (BlockId, usize)>;

/// Line -> statement position. Compound statements own their first line
/// only; simple statements own every line they span.
fn line_map(c: &Cfg) -> LineMap {
    let mut out = HashMap::new();
    for (&id, b) in &c.blocks {
        for (i, s) in b.statements.iter().enumerate() {
            let last = if is_compound(s) {
                s.span.start_line
            } else {
                s.span.end_line
            };
            for line in s.span.start_line..=last {
                out.entry(line).or_insert((id, i));
            }
        }
    }
    out
}

/// Whether a path of at least one edge leads from `from` to `to`.
fn path_exists(c: &Cfg, from: BlockId, to: BlockId) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<BlockId> = c.successors(from).collect();
    while let Some(b) = stack.pop() {
        if b == to {
            return true;
        }
        if seen.insert(b) {
            stack.extend(c.successors(b));
        }
    }
    false
}

#[test]
fn executed_lines_follow_cfg_paths() {
    let mut replayed = 0;
    for (file, pkg) in common::runnable() {
        if pkg.is_some() {
            continue;
        }
        let out = common::python(
            &[
                common::oracle("trace_lines.py").as_os_str(),
                file.as_os_str(),
            ],
            None,
        );
        assert_eq!(out.status, 0, "{}: {}", file.display(), out.stderr);
        let cfg = cfg_of(&file);
        let mut scopes: BTreeMap<String, Vec<&Cfg>> = BTreeMap::new();
        scopes.entry(String::new()).or_default().push(&cfg);
        for (path, sub) in cfg.all_nested() {
            scopes.entry(path).or_default().push(sub);
        }
        let maps: BTreeMap<&str, (&Cfg, LineMap)> = scopes
            .iter()
            .filter(|(_, v)| v.len() == 1)
            .map(|(k, v)| (k.as_str(), (v[0], line_map(v[0]))))
            .collect();
        for row in out.stdout.lines() {
            let run: Value = serde_json::from_str(row).unwrap();
            let scope = run["scope"].as_str().unwrap();
            let Some((c, map)) = maps.get(scope) else {
                continue;
            };
            // Exceptional flow is outside the model.
            let steps = run["steps"].as_array().unwrap();
            let has_try = c
                .iter()
                .flat_map(|b| &b.statements)
                .any(|s| s.kind_name() == "Try");
            if has_try || steps.iter().any(|s| s[1].as_bool().unwrap()) {
                continue;
            }
            let mut prev: Option<(BlockId, usize)> = None;
            for step in steps {
                let line = step[0].as_u64().unwrap() as u32;
                let Some(&here) = map.get(&line) else {
                    continue;
                };
                let header = &c.block(here.0).statements[here.1];
                if let Some(p) = prev {
                    // `__exit__` runs on the line of the `with` header.
                    let exiting = header.kind_name() == "With"
                        && ((here.0 == p.0 && here.1 < p.1) || path_exists(c, here.0, p.0));
                    if exiting {
                        continue;
                    }
                    let ok =
                        here == p || (here.0 == p.0 && here.1 > p.1) || path_exists(c, p.0, here.0);
                    assert!(
                        ok,
                        "{} {scope:?}: line {line} at {here:?} cannot follow {p:?}",
                        file.display()
                    );
                    replayed += 1;
                }
                prev = Some(here);
            }
        }
    }
    assert!(replayed > 300, "only {replayed} transitions replayed");
}
