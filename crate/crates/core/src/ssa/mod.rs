//! SSA numbering with implicit phi, constant folding and alias pairs.
//!
//! Phi nodes are not materialized: a use whose reaching definitions differ
//! along incoming paths simply records several versions.

mod fold;
mod names;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Map, Value};

use crate::cfg::{BlockId, Cfg};
use crate::frontend::*;
pub use fold::{eval, NoFold, PyValue, MAX_STR};
pub use names::{expr_reads, stmt_defs, stmt_uses, Def};

pub type Version = usize;
pub type VarVersion = (String, Version);

/// Versions reaching each use, one map per statement of each block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SsaUseMap {
    pub per_block: BTreeMap<BlockId, Vec<BTreeMap<String, BTreeSet<Version>>>>,
}

impl SsaUseMap {
    /// Use sets of statement `index` in `block`.
    pub fn at(&self, block: BlockId, index: usize) -> Option<&BTreeMap<String, BTreeSet<Version>>> {
        self.per_block.get(&block).and_then(|v| v.get(index))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefKind {
    Literal,
    NameReference,
    Arithmetic,
    Call,
    Other,
    Unknown,
}

impl DefKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DefKind::Literal => "literal",
            DefKind::NameReference => "name-reference",
            DefKind::Arithmetic => "arithmetic",
            DefKind::Call => "call",
            DefKind::Other => "other",
            DefKind::Unknown => "unknown",
        }
    }

    pub fn of(expr: &Expr) -> DefKind {
        match &expr.kind {
            ExprKind::Constant(Constant::FString(_)) => DefKind::Other,
            ExprKind::Constant(_) => DefKind::Literal,
            ExprKind::UnaryOp {
                op: UnaryOpKind::Neg | UnaryOpKind::Pos,
                operand,
            } if matches!(
                operand.kind,
                ExprKind::Constant(Constant::Int(_) | Constant::Float(_))
            ) =>
            {
                DefKind::Literal
            }
            ExprKind::Name(_) => DefKind::NameReference,
            ExprKind::BinOp { .. }
            | ExprKind::UnaryOp { .. }
            | ExprKind::BoolOp { .. }
            | ExprKind::Compare { .. } => DefKind::Arithmetic,
            ExprKind::Call { .. } => DefKind::Call,
            _ => DefKind::Other,
        }
    }
}

/// Where a version is defined. `stmt` is `None` for parameters, which are
/// defined on entry to the function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefSite {
    pub block: BlockId,
    pub stmt: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefValue {
    /// Defining expression, when the binding has one (`x = e`, `x += e`).
    pub expr: Option<Expr>,
    /// Unparsed defining expression, or a description of the binding.
    pub source: String,
    pub kind: DefKind,
    pub folded: Option<PyValue>,
    /// Run-time error the defining expression would raise.
    pub fault: Option<&'static str>,
    pub site: DefSite,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstDict {
    pub entries: BTreeMap<VarVersion, DefValue>,
}

impl ConstDict {
    pub fn get(&self, name: &str, version: Version) -> Option<&DefValue> {
        self.entries.get(&(name.to_string(), version))
    }

    pub fn versions(&self, name: &str) -> usize {
        self.entries.keys().filter(|(n, _)| n == name).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AliasPair {
    pub alias: VarVersion,
    pub target: String,
}

/// Block order used for numbering: reverse post-order of a depth-first
/// search that visits successors last-exit-first, then unreachable blocks
/// by id.
pub fn numbering_order(cfg: &Cfg) -> Vec<BlockId> {
    let mut post = Vec::with_capacity(cfg.blocks.len());
    let mut seen = BTreeSet::new();
    // Iterative DFS: (block, next successor index into reversed exits).
    let mut stack: Vec<(BlockId, Vec<BlockId>)> = Vec::new();
    let succs = |id: BlockId| -> Vec<BlockId> {
        cfg.successors(id)
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect()
    };
    seen.insert(cfg.entry);
    stack.push((cfg.entry, succs(cfg.entry)));
    while let Some((id, pending)) = stack.last_mut() {
        let id = *id;
        if pending.is_empty() {
            post.push(id);
            stack.pop();
            continue;
        }
        let next = pending.remove(0);
        if seen.insert(next) {
            stack.push((next, succs(next)));
        }
    }
    post.reverse();
    post.extend(cfg.blocks.keys().filter(|id| !seen.contains(id)));
    post
}

/// Number every definition and compute the versions reaching each use.
pub fn compute_ssa(cfg: &Cfg) -> (SsaUseMap, ConstDict) {
    let order = numbering_order(cfg);

    // Assign versions in numbering order.
    let mut next: HashMap<String, Version> = HashMap::new();
    let mut consts = ConstDict::default();
    let mut new_version = |name: &str, value: DefValue, consts: &mut ConstDict| -> Version {
        let v = next.entry(name.to_string()).or_insert(0);
        let version = *v;
        *v += 1;
        consts.entries.insert((name.to_string(), version), value);
        version
    };
    let entry_site = DefSite {
        block: cfg.entry,
        stmt: None,
    };
    let mut entry_defs: Vec<VarVersion> = Vec::new();
    for p in &cfg.params {
        let value = DefValue {
            expr: None,
            source: format!("parameter {p}"),
            kind: DefKind::Unknown,
            folded: None,
            fault: None,
            site: entry_site,
        };
        let v = new_version(p, value, &mut consts);
        entry_defs.push((p.clone(), v));
    }
    // Per block, per statement: the versions it defines.
    let mut block_defs: HashMap<BlockId, Vec<Vec<VarVersion>>> = HashMap::new();
    for &id in &order {
        let mut per_stmt = Vec::new();
        for (i, s) in cfg.block(id).statements.iter().enumerate() {
            let mut defined = Vec::new();
            for d in stmt_defs(s) {
                let kind = match &d.expr {
                    Some(e) => DefKind::of(e),
                    None => DefKind::Other,
                };
                let value = DefValue {
                    source: d.expr.as_ref().map(unparse_expr).unwrap_or(d.source),
                    expr: d.expr,
                    kind,
                    folded: None,
                    fault: None,
                    site: DefSite {
                        block: id,
                        stmt: Some(i),
                    },
                };
                let v = new_version(&d.name, value, &mut consts);
                defined.push((d.name, v));
            }
            per_stmt.push(defined);
        }
        block_defs.insert(id, per_stmt);
    }

    // Reaching definitions: name -> versions, per block entry.
    type Env = BTreeMap<String, BTreeSet<Version>>;
    let transfer = |id: BlockId, mut env: Env| -> Env {
        for defined in &block_defs[&id] {
            for (n, v) in defined {
                env.insert(n.clone(), [*v].into_iter().collect());
            }
        }
        env
    };
    let mut inputs: HashMap<BlockId, Env> = cfg.blocks.keys().map(|&id| (id, Env::new())).collect();
    let mut outputs: HashMap<BlockId, Env> = HashMap::new();
    let entry_env: Env = entry_defs
        .iter()
        .map(|(n, v)| (n.clone(), [*v].into_iter().collect()))
        .collect();
    let mut work: std::collections::VecDeque<BlockId> = order.iter().copied().collect();
    let mut queued: BTreeSet<BlockId> = order.iter().copied().collect();
    while let Some(id) = work.pop_front() {
        queued.remove(&id);
        let mut env = if id == cfg.entry {
            entry_env.clone()
        } else {
            Env::new()
        };
        for p in &cfg.block(id).predecessors {
            if let Some(out) = outputs.get(&p.source) {
                for (n, vs) in out {
                    env.entry(n.clone()).or_default().extend(vs);
                }
            }
        }
        inputs.insert(id, env.clone());
        let out = transfer(id, env);
        if outputs.get(&id) != Some(&out) {
            outputs.insert(id, out);
            for s in cfg.successors(id) {
                if queued.insert(s) {
                    work.push_back(s);
                }
            }
        }
    }

    let mut uses = SsaUseMap::default();
    for (&id, block) in &cfg.blocks {
        let mut env = inputs[&id].clone();
        let mut rows = Vec::with_capacity(block.statements.len());
        for (s, defined) in block.statements.iter().zip(&block_defs[&id]) {
            let row: BTreeMap<String, BTreeSet<Version>> = stmt_uses(s)
                .into_iter()
                .filter_map(|n| {
                    env.get(&n)
                        .filter(|v| !v.is_empty())
                        .map(|v| (n, v.clone()))
                })
                .collect();
            rows.push(row);
            for (n, v) in defined {
                env.insert(n.clone(), [*v].into_iter().collect());
            }
        }
        uses.per_block.insert(id, rows);
    }
    (uses, consts)
}

/// Fill `folded` for every definition whose free names each have a single
/// reaching version with a known value.
pub fn fold_constants(consts: &ConstDict, uses: &SsaUseMap) -> ConstDict {
    let mut out = consts.clone();
    loop {
        let mut changed = false;
        let keys: Vec<VarVersion> = out.entries.keys().cloned().collect();
        for key in keys {
            let entry = &out.entries[&key];
            if entry.folded.is_some() || entry.fault.is_some() {
                continue;
            }
            let (Some(expr), Some(stmt)) = (&entry.expr, entry.site.stmt) else {
                continue;
            };
            let row = uses.at(entry.site.block, stmt);
            let known: Vec<(String, PyValue)> = expr_reads(expr)
                .into_iter()
                .filter_map(|name| {
                    let vs = row?.get(&name).filter(|vs| vs.len() == 1)?;
                    let v = *vs.iter().next()?;
                    let value = out.entries.get(&(name.clone(), v))?.folded.clone()?;
                    Some((name, value))
                })
                .collect();
            let env: HashMap<&str, PyValue> =
                known.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
            let result = eval(expr, &env);
            match result {
                Ok(v) => {
                    out.entries.get_mut(&key).unwrap().folded = Some(v);
                    changed = true;
                }
                Err(NoFold::Fault(f)) => {
                    out.entries.get_mut(&key).unwrap().fault = Some(f);
                    changed = true;
                }
                Err(NoFold::Unknown) => {}
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Compute SSA and fold constants in one step.
pub fn analyze(cfg: &Cfg) -> (SsaUseMap, ConstDict) {
    let (uses, consts) = compute_ssa(cfg);
    let folded = fold_constants(&consts, &uses);
    (uses, folded)
}

/// One pair per definition that copies another name, in key order.
pub fn alias_pairs(consts: &ConstDict) -> Vec<AliasPair> {
    consts
        .entries
        .iter()
        .filter(|(_, d)| d.kind == DefKind::NameReference)
        .filter_map(|(k, d)| {
            let target = d.expr.as_ref()?.as_name()?.to_string();
            Some(AliasPair {
                alias: k.clone(),
                target,
            })
        })
        .collect()
}

pub fn to_json(uses: &SsaUseMap, consts: &ConstDict) -> Value {
    let mut blocks = Map::new();
    for (id, rows) in &uses.per_block {
        let rows: Vec<Value> = rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = row
                    .iter()
                    .map(|(n, vs)| {
                        (
                            n.clone(),
                            Value::from(vs.iter().copied().collect::<Vec<_>>()),
                        )
                    })
                    .collect();
                Value::Object(m)
            })
            .collect();
        blocks.insert(id.to_string(), Value::Array(rows));
    }
    let mut constants = Map::new();
    for ((n, v), d) in &consts.entries {
        constants.insert(
            format!("{n}#{v}"),
            json!({
                "kind": d.kind.as_str(),
                "folded": d.folded.as_ref().map(PyValue::to_json).unwrap_or(Value::Null),
                "source": d.source,
            }),
        );
    }
    json!({"blocks": blocks, "constants": constants})
}

pub fn aliases_to_json(pairs: &[AliasPair]) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|p| json!({"alias": [p.alias.0, p.alias.1], "target": p.target}))
            .collect(),
    )
}
