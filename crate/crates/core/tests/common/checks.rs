//! Corpus-wide checks shared by the per-module tests and the acceptance
//! run. Each returns a count of what it compared, or the first mismatch.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use lancet_core::callgraph::{analyze, output_edges, to_simple_json};
use lancet_core::cfg::build_from_module;
use lancet_core::frontend::{
    parse_module, structurally_equal, unparse_module, walk, ExprKind, NodeRef, Order,
};
use lancet_core::rewriter::simplify_module;
use lancet_core::ssa::analyze as ssa_analyze;
use lancet_core::typeinfer::{infer_types, HeuristicTable, TypeRecord};

use super::*;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Every runnable program prints the same before and after rewriting.
/// Returns the number of rewrite cases the simplifier changed.
pub fn rewrite_semantics() -> Result<usize, String> {
    let mut changed = 0;
    for (file, pkg) in runnable() {
        if pkg.is_some() {
            continue;
        }
        let text = std::fs::read_to_string(&file).unwrap();
        let before = run_python_file(&file);
        ensure!(before.status == 0, "{}: {}", file.display(), before.stderr);
        let original = parse_module(&text, "t").map_err(|e| e.to_string())?;
        let rewritten = unparse_module(&simplify_module(&original).map_err(|e| e.to_string())?);
        let after = run_python_source(&rewritten, file.parent().unwrap());
        ensure!(
            after.status == 0,
            "{}: {}\n{rewritten}",
            file.display(),
            after.stderr
        );
        ensure!(
            before.stdout == after.stdout,
            "{}: output differs\n{rewritten}",
            file.display()
        );
        if file.parent().unwrap().ends_with("rewrite") && rewritten != unparse_module(&original) {
            changed += 1;
        }
    }
    Ok(changed)
}

/// Use sets of every corpus CFG with at most `max_blocks` blocks equal the
/// gen/kill fixpoint, with and without simplification.
pub fn fixpoint_corpus(max_blocks: usize) -> Result<usize, String> {
    let mut checked = 0;
    for file in all_sources() {
        let text = std::fs::read_to_string(&file).unwrap();
        let name = file.file_stem().unwrap().to_string_lossy().into_owned();
        for simplify in [false, true] {
            for (label, cfg) in small_cfgs(&name, &text, simplify, max_blocks) {
                dataflow::compare(&label, &cfg)?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Folded values on straight-line files equal what the interpreter
/// computes. Definitions involving a call may stay unfolded.
pub fn straight_line_folding() -> Result<usize, String> {
    let mut compared = 0;
    for file in py_files(&corpus().join("fold")) {
        let text = std::fs::read_to_string(&file).unwrap();
        let cfg = build_from_module("f", &parse_module(&text, "f").map_err(|e| e.to_string())?);
        ensure!(
            cfg.blocks.len() == 1,
            "{} is not straight-line",
            file.display()
        );
        let (_, consts) = ssa_analyze(&cfg);
        let block = cfg.block(cfg.entry);
        for (no, name, want) in step_assignments(&file) {
            let Some((idx, stmt)) = block
                .statements
                .iter()
                .enumerate()
                .find(|(_, s)| s.span.start_line == no)
            else {
                return Err(format!("{}:{no} has no statement", file.display()));
            };
            let Some((_, def)) = consts
                .entries
                .iter()
                .find(|((n, _), d)| *n == name && d.site.stmt == Some(idx))
            else {
                return Err(format!("{}:{no} {name} has no definition", file.display()));
            };
            match &def.folded {
                Some(v) => {
                    ensure!(
                        v.to_json() == want,
                        "{}:{no} {name}: folded {} but ran to {want}",
                        file.display(),
                        v.to_json()
                    );
                    compared += 1;
                }
                None => {
                    let has_call = walk(NodeRef::Stmt(stmt), Order::Pre)
                        .iter()
                        .any(|n| matches!(n, NodeRef::Expr(e) if matches!(e.kind, ExprKind::Call { .. })));
                    ensure!(has_call, "{}:{no} {name} was not folded", file.display());
                }
            }
        }
    }
    Ok(compared)
}

fn trace_args<'a>(
    script: &'a Path,
    file: &'a Path,
    pkg: Option<&'a Path>,
) -> (Vec<&'a std::ffi::OsStr>, &'a Path) {
    match pkg {
        Some(root) => (
            vec![script.as_os_str(), root.as_os_str(), file.as_os_str()],
            root,
        ),
        None => {
            let dir = file.parent().unwrap();
            (
                vec![
                    script.as_os_str(),
                    dir.as_os_str(),
                    file.as_os_str(),
                    "--standalone".as_ref(),
                ],
                dir,
            )
        }
    }
}

/// Calls observed at run time are edges of the computed call graph.
/// Generator bodies start under whoever resumes them, so for those only
/// the existence of some call is required.
pub fn traced_calls() -> Result<usize, String> {
    let script = oracle("trace_calls.py");
    let mut observed = 0;
    for (file, pkg) in runnable() {
        let (args, cwd) = trace_args(&script, &file, pkg.as_deref());
        let out = python(&args, Some(cwd));
        ensure!(out.status == 0, "{}: {}", file.display(), out.stderr);
        let cg = analyze(std::slice::from_ref(&file), pkg.as_deref()).map_err(|e| e.to_string())?;
        ensure!(
            cg.parse_errors.is_empty(),
            "{}: parse errors",
            file.display()
        );
        let edges: BTreeSet<(String, String)> = output_edges(&cg).into_iter().collect();
        let targets: BTreeSet<&str> = edges.iter().map(|(_, t)| t.as_str()).collect();
        for line in out.stdout.lines() {
            if let Some(rest) = line.strip_prefix("gen ") {
                let (_, callee) = rest.split_once(" -> ").unwrap();
                ensure!(
                    targets.contains(callee),
                    "{}: nothing calls generator {callee}",
                    file.display()
                );
            } else {
                let (caller, callee) = line.split_once(" -> ").unwrap();
                ensure!(
                    edges.contains(&(caller.to_string(), callee.to_string())),
                    "{}: missing edge {line}",
                    file.display()
                );
            }
            observed += 1;
        }
    }
    Ok(observed)
}

/// The pinned Simple JSON of the golden call-graph cases.
pub fn golden_call_graphs() -> Result<usize, String> {
    let dir = corpus().join("golden");
    let names = ["cg_direct", "cg_higher_order", "cg_nested"];
    for name in names {
        let cg = analyze(&[dir.join(format!("{name}.py"))], None).map_err(|e| e.to_string())?;
        let want = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
        let got = to_simple_json(&cg);
        ensure!(got == want, "{name}: got\n{got}\nwant\n{want}");
    }
    Ok(names.len())
}

type TypeKey = (String, String, &'static str, String);

fn type_key(r: &TypeRecord, pkg: bool) -> TypeKey {
    let (kind, name) = match (&r.variable, &r.parameter) {
        (Some(v), _) => ("var", v.clone()),
        (_, Some(p)) => ("param", p.clone()),
        _ => ("return", String::new()),
    };
    let file = if pkg {
        r.file.clone()
    } else {
        Path::new(&r.file)
            .file_name()
            .unwrap()
            .to_string_lossy()
            .into_owned()
    };
    (file, r.function.clone().unwrap_or_default(), kind, name)
}

/// Runtime types are members of the inferred sets (or the set holds
/// `Any`), functions that ran have records, and at least three quarters
/// of observations are matched by name. Returns (compared, exact).
pub fn dynamic_types() -> Result<(usize, usize), String> {
    let script = oracle("observe_types.py");
    let table = HeuristicTable::builtin();
    let (mut compared, mut exact) = (0, 0);
    for (file, pkg) in runnable() {
        let (args, cwd) = trace_args(&script, &file, pkg.as_deref());
        let out = python(&args, Some(cwd));
        ensure!(out.status == 0, "{}: {}", file.display(), out.stderr);
        let observed: Vec<(TypeKey, String)> = out
            .stdout
            .lines()
            .map(|l| {
                let f: Vec<&str> = l.split('\t').collect();
                let kind = match f[2] {
                    "param" => "param",
                    "var" => "var",
                    _ => "return",
                };
                (
                    (f[0].to_string(), f[1].to_string(), kind, f[3].to_string()),
                    f[4].to_string(),
                )
            })
            .collect();
        for simplify in [false, true] {
            let entry = pkg.clone().unwrap_or_else(|| file.clone());
            let name = entry.file_stem().unwrap().to_string_lossy().into_owned();
            let inferred =
                infer_types(&name, &entry, &table, simplify).map_err(|e| e.to_string())?;
            let mut sets: BTreeMap<TypeKey, BTreeSet<String>> = BTreeMap::new();
            for r in &inferred.records {
                sets.entry(type_key(r, pkg.is_some()))
                    .or_default()
                    .extend(r.types.iter().cloned());
            }
            for (k, ty) in &observed {
                if k.2 != "var" && !k.1.is_empty() && !k.1.contains("<lambda>") {
                    ensure!(
                        sets.contains_key(k),
                        "{} (simplify {simplify}): no record for {k:?}",
                        file.display()
                    );
                }
                let Some(set) = sets.get(k) else { continue };
                let covered = set.contains("Any") || (ty != "?" && set.contains(ty));
                ensure!(
                    covered,
                    "{} (simplify {simplify}): {k:?} was {ty} at run time, inferred {set:?}",
                    file.display()
                );
                compared += 1;
                if set.contains(ty) {
                    exact += 1;
                }
            }
        }
    }
    ensure!(
        exact * 4 >= compared * 3,
        "only {exact} of {compared} observations matched by name"
    );
    Ok((compared, exact))
}

/// parse, unparse, parse gives the same tree and a stable text for every
/// corpus file.
pub fn roundtrip_corpus() -> Result<usize, String> {
    let files = all_sources();
    for file in &files {
        let text = std::fs::read_to_string(file).unwrap();
        let m = parse_module(&text, "t").map_err(|e| e.to_string())?;
        let once = unparse_module(&m);
        let again = parse_module(&once, "t").map_err(|e| format!("{}: {e}", file.display()))?;
        ensure!(
            structurally_equal(&m, &again),
            "{}: structure changed",
            file.display()
        );
        ensure!(
            unparse_module(&again) == once,
            "{}: text not stable",
            file.display()
        );
    }
    Ok(files.len())
}
