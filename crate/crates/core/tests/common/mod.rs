#![allow(dead_code)]

pub mod checks;
pub mod dataflow;
pub mod gen;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use lancet_core::cfg::{build_from_module, Cfg};
use lancet_core::frontend::{parse_module, structurally_equal, unparse_module, Module};
use lancet_core::rewriter::simplify_module;

/// The core crate's directory, also when this module is shared with
/// another crate's tests.
fn core_dir() -> PathBuf {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    if here.ends_with("core") {
        here.to_path_buf()
    } else {
        here.join("../core")
    }
}

pub fn corpus() -> PathBuf {
    core_dir().join("tests/corpus")
}

pub fn oracle(script: &str) -> PathBuf {
    core_dir().join("tests/oracles").join(script)
}

/// `.py` files directly inside `dir`, sorted.
pub fn py_files(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "py"))
        .collect();
    out.sort();
    out
}

/// Every `.py` file under `dir` at any depth, sorted.
pub fn py_files_deep(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "py") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// All analyzable sources in the corpus.
pub fn all_sources() -> Vec<PathBuf> {
    py_files_deep(&corpus())
}

/// Runnable programs with their package root, when they have one.
pub fn runnable() -> Vec<(PathBuf, Option<PathBuf>)> {
    let c = corpus();
    let mut out: Vec<(PathBuf, Option<PathBuf>)> = py_files(&c.join("programs"))
        .into_iter()
        .chain(py_files(&c.join("rewrite")))
        .map(|p| (p, None))
        .collect();
    let pkg = c.join("packages/example_pkg");
    out.push((pkg.join("main.py"), Some(pkg)));
    out
}

pub struct Output {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run the reference interpreter with a fixed hash seed.
pub fn python(args: &[&std::ffi::OsStr], cwd: Option<&Path>) -> Output {
    let mut cmd = Command::new("python3");
    cmd.args(args)
        .env("PYTHONHASHSEED", "0")
        .env("PYTHONDONTWRITEBYTECODE", "1");
    if let Some(d) = cwd {
        cmd.current_dir(d);
    }
    let out = cmd.output().expect("python3 is required for oracle tests");
    Output {
        status: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn run_python_file(path: &Path) -> Output {
    python(&[path.as_os_str()], path.parent())
}

pub fn run_python_source(text: &str, cwd: &Path) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("prog.py");
    std::fs::write(&f, text).unwrap();
    python(&[f.as_os_str()], Some(cwd))
}

/// Rename `_ret`, `_ret_1`, ... to canonical names in order of first
/// appearance.
pub fn canonical(text: &str) -> String {
    let mut names: HashMap<String, String> = HashMap::new();
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String, names: &mut HashMap<String, String>| {
        let is_temp = word == "_ret"
            || word
                .strip_prefix("_ret_")
                .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
        if is_temp {
            let n = names.len();
            out.push_str(
                names
                    .entry(word.clone())
                    .or_insert_with(|| format!("tmp{n}")),
            );
        } else {
            out.push_str(word);
        }
        word.clear();
    };
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' {
            word.push(ch);
        } else {
            flush(&mut word, &mut out, &mut names);
            out.push(ch);
        }
    }
    flush(&mut word, &mut out, &mut names);
    out
}

/// Structural equality up to renaming of simplifier temporaries.
pub fn alpha_equal(got: &Module, want: &str) -> bool {
    let a = parse_module(&canonical(&unparse_module(got)), "a").unwrap();
    let b = parse_module(&canonical(want), "b").unwrap();
    structurally_equal(&a, &b)
}

/// Every CFG of `text` (module and nested) with at most `max_blocks` blocks.
pub fn small_cfgs(name: &str, text: &str, simplify: bool, max_blocks: usize) -> Vec<(String, Cfg)> {
    let mut m = parse_module(text, name).unwrap();
    if simplify {
        m = simplify_module(&m).unwrap();
    }
    let root = build_from_module(name, &m);
    let mut all = vec![(name.to_string(), root.clone())];
    all.extend(
        root.all_nested()
            .into_iter()
            .map(|(p, c)| (format!("{name}.{p}"), c.clone())),
    );
    all.retain(|(_, c)| c.blocks.len() <= max_blocks);
    all
}

/// Run the statement-stepping interpreter on a straight-line file and
/// return `(line, target, value)` for each simple assignment.
pub fn step_assignments(file: &Path) -> Vec<(u32, String, serde_json::Value)> {
    let out = python(
        &[oracle("step_assign.py").as_os_str(), file.as_os_str()],
        None,
    );
    assert_eq!(out.status, 0, "{}: {}", file.display(), out.stderr);
    out.stdout
        .lines()
        .map(|l| {
            let row: Vec<serde_json::Value> = serde_json::from_str(l).unwrap();
            (
                row[0].as_u64().unwrap() as u32,
                row[1].as_str().unwrap().to_string(),
                row[2].clone(),
            )
        })
        .collect()
}
