//! Inputs for the benchmarks in `benches/`.

use std::fmt::Write;

/// A module of `n` small functions that call each other, branch, loop and
/// build containers.
pub fn synthetic_module(n: usize) -> String {
    let mut s = String::from("import os\n\n");
    for i in 0..n {
        let prev = if i == 0 {
            "len".to_string()
        } else {
            format!("f{}", i - 1)
        };
        let _ = write!(
            s,
            "def f{i}(a, b=1):\n    total = 0\n    for k in range(a):\n        if k % 2:\n            total += {prev}([k])\n        else:\n            total -= b\n    names = [str(x) for x in range(total % 5)]\n    return total + len(names)\n\n"
        );
    }
    for i in 0..n {
        let _ = writeln!(s, "r{i} = f{i}({i})");
    }
    s
}
