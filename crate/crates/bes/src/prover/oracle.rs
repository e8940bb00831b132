//! Independent decision procedure for intuitionistic propositional
//! sequents, used to cross-check every clause-level verdict.
//!
//! The calculus is the contraction-free one: left implications are
//! analyzed by the shape of their antecedent (atom, absurdity,
//! conjunction, disjunction, or implication), so no rule ever copies its
//! principal formula into a premise and proof search terminates without
//! loop checks. Under a weighting where atoms and absurdity count 1,
//! implication and disjunction add 1, and conjunction adds 2, every rule
//! strictly decreases the multiset of sequent weights; debug builds
//! assert that on every step.
//!
//! Verdicts are memoized per (assumption set, goal), so one [`Oracle`]
//! amortizes well over batches of related sequents.

use rustc_hash::FxHashMap;

use crate::prover::{Sequent, SequentProof};
use crate::syntax::{Atom, Context, Formula};

type Id = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Node {
    Bot,
    Atom(u32),
    Conj(Id, Id),
    Disj(Id, Id),
    Impl(Id, Id),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    ids: FxHashMap<Node, Id>,
    weights: Vec<u64>,
    atoms: Vec<Atom>,
    atom_ids: FxHashMap<Atom, u32>,
}

impl Arena {
    fn insert(&mut self, node: Node) -> Id {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let weight = match node {
            Node::Bot | Node::Atom(_) => 1,
            Node::Impl(l, r) | Node::Disj(l, r) => self.weights[l as usize] + self.weights[r as usize] + 1,
            Node::Conj(l, r) => self.weights[l as usize] + self.weights[r as usize] + 2,
        };
        let id = self.nodes.len() as Id;
        self.nodes.push(node);
        self.weights.push(weight);
        self.ids.insert(node, id);
        id
    }

    fn intern(&mut self, f: &Formula) -> Id {
        let node = match f {
            Formula::Absurd => Node::Bot,
            Formula::Atomic(a) => {
                let atom_id = match self.atom_ids.get(a) {
                    Some(&id) => id,
                    None => {
                        let id = self.atoms.len() as u32;
                        self.atoms.push(a.clone());
                        self.atom_ids.insert(a.clone(), id);
                        id
                    }
                };
                Node::Atom(atom_id)
            }
            Formula::Conj(l, r) => {
                let (l, r) = (self.intern(l), self.intern(r));
                Node::Conj(l, r)
            }
            Formula::Disj(l, r) => {
                let (l, r) = (self.intern(l), self.intern(r));
                Node::Disj(l, r)
            }
            Formula::Impl(l, r) => {
                let (l, r) = (self.intern(l), self.intern(r));
                Node::Impl(l, r)
            }
        };
        self.insert(node)
    }

    fn formula(&self, id: Id) -> Formula {
        match self.nodes[id as usize] {
            Node::Bot => Formula::Absurd,
            Node::Atom(a) => Formula::Atomic(self.atoms[a as usize].clone()),
            Node::Conj(l, r) => Formula::conj(self.formula(l), self.formula(r)),
            Node::Disj(l, r) => Formula::disj(self.formula(l), self.formula(r)),
            Node::Impl(l, r) => Formula::implies(self.formula(l), self.formula(r)),
        }
    }
}

/// Sorted-set context helpers. Contexts are sorted deduplicated id
/// vectors; set semantics is sound here because no rule of the calculus
/// needs two copies of a formula.
fn with(ctx: &[Id], x: Id) -> Vec<Id> {
    match ctx.binary_search(&x) {
        Ok(_) => ctx.to_vec(),
        Err(pos) => {
            let mut out = ctx.to_vec();
            out.insert(pos, x);
            out
        }
    }
}

fn without(ctx: &[Id], x: Id) -> Vec<Id> {
    let mut out = ctx.to_vec();
    if let Ok(pos) = out.binary_search(&x) {
        out.remove(pos);
    }
    out
}

pub struct Oracle {
    arena: Arena,
    memo: FxHashMap<(Vec<Id>, Id), bool>,
    bot: Id,
}

impl Default for Oracle {
    fn default() -> Oracle {
        Oracle::new()
    }
}

impl Oracle {
    pub fn new() -> Oracle {
        let mut arena = Arena::default();
        let bot = arena.insert(Node::Bot);
        Oracle { arena, memo: FxHashMap::default(), bot }
    }

    /// Decides `assumptions |- goal`.
    pub fn prove(&mut self, assumptions: &Context, goal: &Formula) -> bool {
        let ctx = self.intern_context(assumptions);
        let goal = self.arena.intern(goal);
        self.prove_ids(ctx, goal)
    }

    /// Like [`Oracle::prove`], returning a checkable proof tree when the
    /// sequent is provable.
    pub fn proof(&mut self, assumptions: &Context, goal: &Formula) -> Option<SequentProof> {
        let ctx = self.intern_context(assumptions);
        let goal = self.arena.intern(goal);
        if !self.prove_ids(ctx.clone(), goal) {
            return None;
        }
        Some(self.build(&ctx, goal))
    }

    fn intern_context(&mut self, assumptions: &Context) -> Vec<Id> {
        let mut ctx: Vec<Id> = assumptions.iter().map(|f| self.arena.intern(f)).collect();
        ctx.sort_unstable();
        ctx.dedup();
        ctx
    }

    fn node(&self, id: Id) -> Node {
        self.arena.nodes[id as usize]
    }

    fn prove_ids(&mut self, ctx: Vec<Id>, goal: Id) -> bool {
        let key = (ctx, goal);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let verdict = self.step(&key.0, key.1);
        self.memo.insert(key, verdict);
        verdict
    }

    /// One derived step: recurse into `(ctx, goal)` from the strictly
    /// heavier parent `(pctx, pgoal)`.
    fn sub(&mut self, pctx: &[Id], pgoal: Id, ctx: Vec<Id>, goal: Id) -> bool {
        #[cfg(debug_assertions)]
        self.assert_decrease(pctx, pgoal, &ctx, goal);
        #[cfg(not(debug_assertions))]
        let _ = (pctx, pgoal);
        self.prove_ids(ctx, goal)
    }

    #[cfg(debug_assertions)]
    fn assert_decrease(&self, pctx: &[Id], pgoal: Id, ctx: &[Id], goal: Id) {
        let measure = |ctx: &[Id], goal: Id| {
            let mut weights: Vec<u64> = ctx.iter().map(|&f| self.arena.weights[f as usize]).collect();
            weights.push(self.arena.weights[goal as usize]);
            weights.sort_unstable_by(|a, b| b.cmp(a));
            weights
        };
        let parent = measure(pctx, pgoal);
        let child = measure(ctx, goal);
        // Multiset order over naturals is descending-lexicographic with
        // shorter prefixes smaller.
        let decreases = match child
            .iter()
            .zip(parent.iter())
            .find(|(c, p)| c != p)
        {
            Some((c, p)) => c < p,
            None => child.len() < parent.len(),
        };
        assert!(
            decreases,
            "termination measure failed to decrease: {parent:?} -> {child:?}"
        );
    }

    fn step(&mut self, ctx: &[Id], goal: Id) -> bool {
        if ctx.binary_search(&self.bot).is_ok() || ctx.binary_search(&goal).is_ok() {
            return true;
        }

        // Invertible left rules: commit to the first applicable one.
        for &h in ctx {
            match self.node(h) {
                Node::Conj(l, r) => {
                    let next = with(&with(&without(ctx, h), l), r);
                    return self.sub(ctx, goal, next, goal);
                }
                Node::Impl(a, b) => match self.node(a) {
                    Node::Bot => {
                        return self.sub(ctx, goal, without(ctx, h), goal);
                    }
                    Node::Conj(x, y) => {
                        let inner = self.arena.insert(Node::Impl(y, b));
                        let curried = self.arena.insert(Node::Impl(x, inner));
                        let next = with(&without(ctx, h), curried);
                        return self.sub(ctx, goal, next, goal);
                    }
                    Node::Disj(x, y) => {
                        let left = self.arena.insert(Node::Impl(x, b));
                        let right = self.arena.insert(Node::Impl(y, b));
                        let next = with(&with(&without(ctx, h), left), right);
                        return self.sub(ctx, goal, next, goal);
                    }
                    Node::Atom(_) if ctx.binary_search(&a).is_ok() => {
                        let next = with(&without(ctx, h), b);
                        return self.sub(ctx, goal, next, goal);
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        for &h in ctx {
            if let Node::Disj(l, r) = self.node(h) {
                let base = without(ctx, h);
                return self.sub(ctx, goal, with(&base, l), goal)
                    && self.sub(ctx, goal, with(&base, r), goal);
            }
        }

        // Invertible right rules.
        match self.node(goal) {
            Node::Impl(a, b) => {
                return self.sub(ctx, goal, with(ctx, a), b);
            }
            Node::Conj(l, r) => {
                return self.sub(ctx, goal, ctx.to_vec(), l)
                    && self.sub(ctx, goal, ctx.to_vec(), r);
            }
            Node::Disj(l, r) => {
                if self.sub(ctx, goal, ctx.to_vec(), l) || self.sub(ctx, goal, ctx.to_vec(), r) {
                    return true;
                }
            }
            _ => {}
        }

        // Nested implications on the left, the one non-invertible choice.
        for &h in ctx {
            if let Node::Impl(a, c) = self.node(h) {
                if let Node::Impl(_, y) = self.node(a) {
                    let base = without(ctx, h);
                    let unroll = self.arena.insert(Node::Impl(y, c));
                    if self.sub(ctx, goal, with(&base, unroll), a)
                        && self.sub(ctx, goal, with(&base, c), goal)
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Rebuilds a proof tree for a sequent already known provable by
    /// replaying the decision order and consulting the memoized engine
    /// at branch points.
    fn build(&mut self, ctx: &[Id], goal: Id) -> SequentProof {
        debug_assert!(self.prove_ids(ctx.to_vec(), goal));
        if ctx.binary_search(&self.bot).is_ok() {
            return self.proof_node(ctx, goal, "absurdity-left", Some(self.bot), Vec::new());
        }
        if ctx.binary_search(&goal).is_ok() {
            return self.proof_node(ctx, goal, "axiom", None, Vec::new());
        }

        for &h in ctx {
            match self.node(h) {
                Node::Conj(l, r) => {
                    let next = with(&with(&without(ctx, h), l), r);
                    let premise = self.build(&next, goal);
                    return self.proof_node(ctx, goal, "conjunction-left", Some(h), vec![premise]);
                }
                Node::Impl(a, b) => match self.node(a) {
                    Node::Bot => {
                        let premise = self.build(&without(ctx, h), goal);
                        return self.proof_node(
                            ctx,
                            goal,
                            "absurdity-antecedent-left",
                            Some(h),
                            vec![premise],
                        );
                    }
                    Node::Conj(x, y) => {
                        let inner = self.arena.insert(Node::Impl(y, b));
                        let curried = self.arena.insert(Node::Impl(x, inner));
                        let next = with(&without(ctx, h), curried);
                        let premise = self.build(&next, goal);
                        return self.proof_node(
                            ctx,
                            goal,
                            "conjunction-antecedent-left",
                            Some(h),
                            vec![premise],
                        );
                    }
                    Node::Disj(x, y) => {
                        let left = self.arena.insert(Node::Impl(x, b));
                        let right = self.arena.insert(Node::Impl(y, b));
                        let next = with(&with(&without(ctx, h), left), right);
                        let premise = self.build(&next, goal);
                        return self.proof_node(
                            ctx,
                            goal,
                            "disjunction-antecedent-left",
                            Some(h),
                            vec![premise],
                        );
                    }
                    Node::Atom(_) if ctx.binary_search(&a).is_ok() => {
                        let next = with(&without(ctx, h), b);
                        let premise = self.build(&next, goal);
                        return self.proof_node(ctx, goal, "detachment-left", Some(h), vec![premise]);
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        for &h in ctx {
            if let Node::Disj(l, r) = self.node(h) {
                let base = without(ctx, h);
                let left = self.build(&with(&base, l), goal);
                let right = self.build(&with(&base, r), goal);
                return self.proof_node(ctx, goal, "disjunction-left", Some(h), vec![left, right]);
            }
        }

        match self.node(goal) {
            Node::Impl(a, b) => {
                let premise = self.build(&with(ctx, a), b);
                return self.proof_node(ctx, goal, "implication-right", None, vec![premise]);
            }
            Node::Conj(l, r) => {
                let left = self.build(ctx, l);
                let right = self.build(ctx, r);
                return self.proof_node(ctx, goal, "conjunction-right", None, vec![left, right]);
            }
            Node::Disj(l, r) => {
                if self.prove_ids(ctx.to_vec(), l) {
                    let premise = self.build(ctx, l);
                    return self.proof_node(ctx, goal, "disjunction-right-1", None, vec![premise]);
                }
                if self.prove_ids(ctx.to_vec(), r) {
                    let premise = self.build(ctx, r);
                    return self.proof_node(ctx, goal, "disjunction-right-2", None, vec![premise]);
                }
            }
            _ => {}
        }

        for &h in ctx {
            if let Node::Impl(a, c) = self.node(h) {
                if let Node::Impl(_, y) = self.node(a) {
                    let base = without(ctx, h);
                    let unroll = self.arena.insert(Node::Impl(y, c));
                    let first_ctx = with(&base, unroll);
                    let second_ctx = with(&base, c);
                    if self.prove_ids(first_ctx.clone(), a)
                        && self.prove_ids(second_ctx.clone(), goal)
                    {
                        let first = self.build(&first_ctx, a);
                        let second = self.build(&second_ctx, goal);
                        return self.proof_node(
                            ctx,
                            goal,
                            "implication-antecedent-left",
                            Some(h),
                            vec![first, second],
                        );
                    }
                }
            }
        }
        unreachable!("build called on an unprovable sequent");
    }

    fn proof_node(
        &self,
        ctx: &[Id],
        goal: Id,
        rule: &'static str,
        principal: Option<Id>,
        premises: Vec<SequentProof>,
    ) -> SequentProof {
        SequentProof {
            rule,
            principal: principal.map(|id| self.arena.formula(id)),
            sequent: self.sequent(ctx, goal),
            premises,
        }
    }

    fn sequent(&self, ctx: &[Id], goal: Id) -> Sequent {
        Sequent {
            assumptions: ctx.iter().map(|&id| self.arena.formula(id)).collect(),
            goal: self.arena.formula(goal),
        }
    }
}
