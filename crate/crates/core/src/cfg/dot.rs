use std::fmt::Write;

use super::Cfg;
use crate::frontend::{stmt_header, unparse_expr};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

/// Graphviz text for `cfg`. Node labels list the block id and one line per
/// statement; edge labels are the link conditions. With `include_functions`
/// every nested function and class CFG becomes a `cluster_` subgraph.
pub fn to_dot(cfg: &Cfg, include_functions: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(&cfg.name));
    out.push_str("    node [shape=box, fontname=\"monospace\"];\n");
    body(cfg, "b", include_functions, 1, &mut out);
    out.push_str("}\n");
    out
}

fn body(cfg: &Cfg, prefix: &str, nested: bool, depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    for b in cfg.blocks.values() {
        let mut label = format!("{}:\\l", b.id);
        for s in &b.statements {
            label.push_str(&escape(&stmt_header(s)));
            label.push_str("\\l");
        }
        let _ = writeln!(out, "{pad}\"{prefix}{}\" [label=\"{label}\"];", b.id);
    }
    for l in cfg.links() {
        let cond = l
            .condition
            .as_ref()
            .map(|c| escape(&unparse_expr(c)))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{pad}\"{prefix}{}\" -> \"{prefix}{}\" [label=\"{cond}\"];",
            l.source, l.target
        );
    }
    if !nested {
        return;
    }
    for (kind, map) in [("function", &cfg.function_cfgs), ("class", &cfg.class_cfgs)] {
        for ((block, name), sub) in map {
            let sub_prefix = format!("{prefix}{block}_{name}_");
            let _ = writeln!(out, "{pad}subgraph \"cluster_{sub_prefix}\" {{");
            let _ = writeln!(out, "{pad}    label=\"{kind} {}\";", escape(name));
            body(sub, &sub_prefix, true, depth + 1, out);
            let _ = writeln!(out, "{pad}}}");
        }
    }
}
