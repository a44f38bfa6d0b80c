//! Reaching definitions by the textbook gen/kill equations, iterated to a
//! fixpoint over statement positions.

use std::collections::{BTreeMap, BTreeSet};

use lancet_core::cfg::Cfg;
use lancet_core::ssa::{compute_ssa, stmt_uses, SsaUseMap};

pub type Point = (usize, usize);
pub type UseRows = BTreeMap<Point, BTreeMap<String, BTreeSet<usize>>>;

type Defs = BTreeSet<(String, usize)>;

pub fn fixpoint(cfg: &Cfg) -> UseRows {
    let (_, consts) = compute_ssa(cfg);
    // The version each statement leaves behind for each name it binds.
    let mut gen: BTreeMap<Point, BTreeMap<String, usize>> = BTreeMap::new();
    let mut at_entry: Defs = BTreeSet::new();
    for ((name, v), d) in &consts.entries {
        match d.site.stmt {
            None => {
                at_entry.insert((name.clone(), *v));
            }
            Some(s) => {
                let slot = gen
                    .entry((d.site.block, s))
                    .or_default()
                    .entry(name.clone())
                    .or_insert(*v);
                *slot = (*slot).max(*v);
            }
        }
    }
    let transfer = |p: Point, input: &Defs| -> Defs {
        let Some(g) = gen.get(&p) else {
            return input.clone();
        };
        let mut out: Defs = input
            .iter()
            .filter(|(n, _)| !g.contains_key(n))
            .cloned()
            .collect();
        out.extend(g.iter().map(|(n, v)| (n.clone(), *v)));
        out
    };

    let mut block_in: BTreeMap<usize, Defs> =
        cfg.blocks.keys().map(|&b| (b, Defs::new())).collect();
    let mut block_out: BTreeMap<usize, Defs> = block_in.clone();
    loop {
        let mut changed = false;
        for (&b, block) in &cfg.blocks {
            let mut input: Defs = if b == cfg.entry {
                at_entry.clone()
            } else {
                Defs::new()
            };
            for p in cfg.predecessor_ids(b) {
                input.extend(block_out[&p].iter().cloned());
            }
            let mut cur = input.clone();
            for i in 0..block.statements.len() {
                cur = transfer((b, i), &cur);
            }
            if block_in[&b] != input || block_out[&b] != cur {
                block_in.insert(b, input);
                block_out.insert(b, cur);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut rows = UseRows::new();
    for (&b, block) in &cfg.blocks {
        let mut cur = block_in[&b].clone();
        for (i, s) in block.statements.iter().enumerate() {
            let mut row: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
            for name in stmt_uses(s) {
                let vs: BTreeSet<usize> = cur
                    .iter()
                    .filter(|(n, _)| *n == name)
                    .map(|(_, v)| *v)
                    .collect();
                if !vs.is_empty() {
                    row.insert(name, vs);
                }
            }
            rows.insert((b, i), row);
            cur = transfer((b, i), &cur);
        }
    }
    rows
}

/// The library's use sets in the same shape.
pub fn library(uses: &SsaUseMap) -> UseRows {
    let mut out = UseRows::new();
    for (&b, rows) in &uses.per_block {
        for (i, row) in rows.iter().enumerate() {
            out.insert((b, i), row.clone());
        }
    }
    out
}

/// First position where the library disagrees with the fixpoint.
pub fn compare(label: &str, cfg: &Cfg) -> Result<(), String> {
    let (uses, _) = compute_ssa(cfg);
    let got = library(&uses);
    let want = fixpoint(cfg);
    for (k, w) in &want {
        if got.get(k) != Some(w) {
            return Err(format!(
                "{label}: at {k:?} fixpoint {w:?}, library {:?}",
                got.get(k)
            ));
        }
    }
    if got.len() != want.len() {
        return Err(format!("{label}: library has rows the fixpoint lacks"));
    }
    Ok(())
}
