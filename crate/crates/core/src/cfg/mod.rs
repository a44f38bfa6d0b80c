//! Intra-procedural control-flow graphs.
//!
//! Blocks hold straight-line statements; a compound statement (`if`,
//! `while`, `for`) is stored as the last statement of the block that
//! evaluates its header. Function and class bodies get their own [`Cfg`],
//! keyed by the id of the block holding the definition and the name.

mod builder;
mod dot;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::{json, Value};

use crate::error::Result;
use crate::frontend::*;
pub use dot::to_dot;

pub type BlockId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub source: BlockId,
    pub target: BlockId,
    pub condition: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub id: BlockId,
    pub statements: Vec<Stmt>,
    pub exits: Vec<Link>,
    pub predecessors: Vec<Link>,
}

impl Block {
    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Every call evaluated by this block's statements, in source order.
    /// Bodies of compound statements belong to other blocks and are skipped.
    pub fn get_calls(&self) -> Vec<&Expr> {
        let mut calls: Vec<&Expr> = self
            .statements
            .iter()
            .flat_map(|s| s.header_exprs())
            .flat_map(sub_exprs)
            .filter(|e| e.is_call())
            .collect();
        calls.sort_by_key(|e| (e.span.start_line, e.span.start_col));
        calls
    }
}

pub type NestedKey = (BlockId, String);

#[derive(Debug, Clone, PartialEq)]
pub struct Cfg {
    pub name: String,
    pub entry: BlockId,
    pub blocks: BTreeMap<BlockId, Block>,
    pub final_blocks: BTreeSet<BlockId>,
    /// Blocks not reachable from `entry` (code after `return`, `break`, ...).
    pub unreachable: BTreeSet<BlockId>,
    pub function_cfgs: BTreeMap<NestedKey, Cfg>,
    pub class_cfgs: BTreeMap<NestedKey, Cfg>,
    /// Parameter names when this is a function CFG.
    pub params: Vec<String>,
}

impl Cfg {
    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[&id]
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.blocks.values().flat_map(|b| b.exits.iter())
    }

    pub fn successors(&self, id: BlockId) -> impl Iterator<Item = BlockId> + '_ {
        self.blocks[&id].exits.iter().map(|l| l.target)
    }

    pub fn predecessor_ids(&self, id: BlockId) -> BTreeSet<BlockId> {
        self.blocks[&id]
            .predecessors
            .iter()
            .map(|l| l.source)
            .collect()
    }

    /// Blocks in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }

    /// All CFGs nested in this one at any depth, paired with a dotted path of
    /// names from this CFG (functions and classes alike).
    pub fn all_nested(&self) -> Vec<(String, &Cfg)> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a Cfg, prefix: &str, out: &mut Vec<(String, &'a Cfg)>) {
            let mut kids: Vec<(&NestedKey, &Cfg)> =
                c.function_cfgs.iter().chain(c.class_cfgs.iter()).collect();
            kids.sort_by(|a, b| a.0.cmp(b.0));
            for ((_, name), sub) in kids {
                let path = if prefix.is_empty() {
                    name.clone()
                } else {
                    format!("{prefix}.{name}")
                };
                out.push((path.clone(), sub));
                go(sub, &path, out);
            }
        }
        go(self, "", &mut out);
        out
    }

    pub fn to_json(&self) -> Value {
        let blocks: Vec<Value> = self
            .blocks
            .values()
            .map(|b| {
                let stmts: Vec<Value> = b
                    .statements
                    .iter()
                    .map(|s| {
                        json!({
                            "span": [s.span.start_line, s.span.start_col, s.span.end_line, s.span.end_col],
                            "text": stmt_header(s),
                        })
                    })
                    .collect();
                json!({
                    "id": b.id,
                    "statements": stmts,
                    "final": self.final_blocks.contains(&b.id),
                    "unreachable": self.unreachable.contains(&b.id),
                })
            })
            .collect();
        let links: Vec<Value> = self
            .links()
            .map(|l| {
                json!({
                    "source": l.source,
                    "target": l.target,
                    "condition": l.condition.as_ref().map(unparse_expr),
                })
            })
            .collect();
        let nested = |m: &BTreeMap<NestedKey, Cfg>| -> Vec<Value> {
            m.iter()
                .map(|((block, name), c)| json!({"block": block, "name": name, "cfg": c.to_json()}))
                .collect()
        };
        json!({
            "name": self.name,
            "entry": self.entry,
            "blocks": blocks,
            "links": links,
            "functions": nested(&self.function_cfgs),
            "classes": nested(&self.class_cfgs),
        })
    }
}

/// Directly nested function CFGs with their `(block_id, name)` keys.
pub fn visit_function_cfgs(cfg: &Cfg) -> impl Iterator<Item = (&NestedKey, &Cfg)> {
    cfg.function_cfgs.iter()
}

pub fn build_from_module(name: &str, module: &Module) -> Cfg {
    builder::build(name, &module.body, Vec::new())
}

pub fn build_from_source(name: &str, text: &str) -> std::result::Result<Cfg, ParseError> {
    Ok(build_from_module(name, &parse_module(text, name)?))
}

pub fn build_from_file(name: &str, path: &Path) -> Result<Cfg> {
    let text = read_source(path)?;
    let module = parse_module(&text, &path.display().to_string())?;
    Ok(build_from_module(name, &module))
}

/// Condition for the false branch of `test`.
pub fn invert(test: &Expr) -> Expr {
    match &test.kind {
        ExprKind::Compare {
            left,
            ops,
            comparators,
        } if ops.len() == 1 => Expr::new(
            ExprKind::Compare {
                left: left.clone(),
                ops: vec![ops[0].negate()],
                comparators: comparators.clone(),
            },
            test.span,
        ),
        ExprKind::UnaryOp {
            op: UnaryOpKind::Not,
            operand,
        } => (**operand).clone(),
        _ => Expr::new(
            ExprKind::UnaryOp {
                op: UnaryOpKind::Not,
                operand: Box::new(test.clone()),
            },
            test.span,
        ),
    }
}
