use std::collections::{BTreeMap, BTreeSet};

use super::{invert, Block, BlockId, Cfg, Link, NestedKey};
use crate::frontend::*;

struct Loop {
    guard: BlockId,
    after: BlockId,
}

struct Builder {
    name: String,
    blocks: BTreeMap<BlockId, Block>,
    next_id: BlockId,
    current: Option<BlockId>,
    loops: Vec<Loop>,
    function_cfgs: BTreeMap<NestedKey, Cfg>,
    class_cfgs: BTreeMap<NestedKey, Cfg>,
}

pub(super) fn build(name: &str, body: &[Stmt], params: Vec<String>) -> Cfg {
    let mut b = Builder {
        name: name.to_string(),
        blocks: BTreeMap::new(),
        next_id: 1,
        current: None,
        loops: Vec::new(),
        function_cfgs: BTreeMap::new(),
        class_cfgs: BTreeMap::new(),
    };
    let entry = b.new_block();
    b.current = Some(entry);
    b.body(body);
    b.finish(entry, params)
}

impl Builder {
    fn new_block(&mut self) -> BlockId {
        let id = self.next_id;
        self.next_id += 1;
        self.blocks.insert(
            id,
            Block {
                id,
                statements: Vec::new(),
                exits: Vec::new(),
                predecessors: Vec::new(),
            },
        );
        id
    }

    fn link(&mut self, source: BlockId, target: BlockId, condition: Option<Expr>) {
        self.blocks.get_mut(&source).unwrap().exits.push(Link {
            source,
            target,
            condition,
        });
    }

    /// The block receiving the next statement. After a jump there is none,
    /// so a fresh (unreachable) block is started.
    fn current(&mut self) -> BlockId {
        match self.current {
            Some(c) => c,
            None => {
                let c = self.new_block();
                self.current = Some(c);
                c
            }
        }
    }

    fn push(&mut self, id: BlockId, stmt: &Stmt) {
        self.blocks
            .get_mut(&id)
            .unwrap()
            .statements
            .push(stmt.clone());
    }

    /// Loop header block: the current one if it is still empty and has no
    /// exits, otherwise a new block reached by fallthrough.
    fn loop_guard(&mut self) -> BlockId {
        let cur = self.current();
        let b = &self.blocks[&cur];
        if b.statements.is_empty() && b.exits.is_empty() {
            return cur;
        }
        let guard = self.new_block();
        self.link(cur, guard, None);
        guard
    }

    fn body(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::If { test, body, orelse } => self.if_stmt(s, test, body, orelse),
            StmtKind::While { test, body, orelse } => {
                let exit_cond = Some(invert(test));
                self.loop_stmt(s, Some(test.clone()), exit_cond, body, orelse)
            }
            StmtKind::For {
                target,
                iter,
                body,
                orelse,
            } => {
                let binding = Expr::new(
                    ExprKind::Compare {
                        left: Box::new(target.clone()),
                        ops: vec![CmpOp::In],
                        comparators: vec![iter.clone()],
                    },
                    target.span.to(iter.span),
                );
                self.loop_stmt(s, Some(binding), None, body, orelse)
            }
            StmtKind::Break | StmtKind::Continue => {
                let cur = self.current();
                self.push(cur, s);
                if let Some(l) = self.loops.last() {
                    let target = if matches!(s.kind, StmtKind::Break) {
                        l.after
                    } else {
                        l.guard
                    };
                    self.link(cur, target, None);
                }
                self.current = None;
            }
            StmtKind::Return(_) => {
                let cur = self.current();
                self.push(cur, s);
                self.current = None;
            }
            StmtKind::FunctionDef(f) => {
                let cur = self.current();
                self.push(cur, s);
                let sub = build(&f.name, &f.body, f.params.names());
                self.function_cfgs.insert((cur, f.name.clone()), sub);
            }
            StmtKind::ClassDef(c) => {
                let cur = self.current();
                self.push(cur, s);
                let sub = build(&c.name, &c.body, Vec::new());
                self.class_cfgs.insert((cur, c.name.clone()), sub);
            }
            StmtKind::Try {
                body,
                handlers,
                orelse,
                finalbody,
            } => {
                let cur = self.current();
                self.push(cur, s);
                self.body(body);
                for h in handlers {
                    self.body(&h.body);
                }
                self.body(orelse);
                self.body(finalbody);
            }
            StmtKind::With { body, .. } => {
                let cur = self.current();
                self.push(cur, s);
                self.body(body);
            }
            _ => {
                let cur = self.current();
                self.push(cur, s);
                if s.is_yield_point() {
                    let next = self.new_block();
                    self.link(cur, next, None);
                    self.current = Some(next);
                }
            }
        }
    }

    fn if_stmt(&mut self, s: &Stmt, test: &Expr, body: &[Stmt], orelse: &[Stmt]) {
        let head = self.current();
        self.push(head, s);

        let then_block = self.new_block();
        self.link(head, then_block, Some(test.clone()));
        self.current = Some(then_block);
        self.body(body);
        let then_end = self.current;

        let after = self.new_block();
        if let Some(e) = then_end {
            self.link(e, after, None);
        }

        if orelse.is_empty() {
            self.link(head, after, Some(invert(test)));
        } else {
            let else_block = self.new_block();
            self.link(head, else_block, Some(invert(test)));
            self.current = Some(else_block);
            self.body(orelse);
            if let Some(e) = self.current {
                self.link(e, after, None);
            }
        }
        self.current = Some(after);
    }

    fn loop_stmt(
        &mut self,
        s: &Stmt,
        enter: Option<Expr>,
        exit: Option<Expr>,
        body: &[Stmt],
        orelse: &[Stmt],
    ) {
        let guard = self.loop_guard();
        self.push(guard, s);

        let body_block = self.new_block();
        let after = self.new_block();
        self.link(guard, body_block, enter);

        self.loops.push(Loop { guard, after });
        self.current = Some(body_block);
        self.body(body);
        if let Some(e) = self.current {
            self.link(e, guard, None);
        }
        self.loops.pop();

        if orelse.is_empty() {
            self.link(guard, after, exit);
        } else {
            let else_block = self.new_block();
            self.link(guard, else_block, exit);
            self.current = Some(else_block);
            self.body(orelse);
            if let Some(e) = self.current {
                self.link(e, after, None);
            }
        }
        self.current = Some(after);
    }

    fn finish(mut self, entry: BlockId, params: Vec<String>) -> Cfg {
        let links: Vec<Link> = self.blocks.values().flat_map(|b| b.exits.clone()).collect();
        for l in links {
            self.blocks.get_mut(&l.target).unwrap().predecessors.push(l);
        }
        // Drop blocks that ended up holding nothing and connecting nothing,
        // e.g. the join after an `if` whose branches both return.
        self.blocks.retain(|&id, b| {
            id == entry
                || !(b.statements.is_empty() && b.exits.is_empty() && b.predecessors.is_empty())
        });

        let mut reachable = BTreeSet::new();
        let mut stack = vec![entry];
        while let Some(id) = stack.pop() {
            if reachable.insert(id) {
                stack.extend(self.blocks[&id].exits.iter().map(|l| l.target));
            }
        }
        let unreachable = self
            .blocks
            .keys()
            .copied()
            .filter(|id| !reachable.contains(id))
            .collect();
        let final_blocks = self
            .blocks
            .values()
            .filter(|b| reachable.contains(&b.id) && b.exits.is_empty())
            .map(|b| b.id)
            .collect();
        Cfg {
            name: self.name,
            entry,
            blocks: self.blocks,
            final_blocks,
            unreachable,
            function_cfgs: self.function_cfgs,
            class_cfgs: self.class_cfgs,
            params,
        }
    }
}
