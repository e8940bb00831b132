//! The support relation as a decision procedure, plus a bounded direct
//! evaluator of its quantifier definition used for differential testing.
//!
//! [`supports`] decides a support query by flattening the context and
//! formula through one shared naming map, instantiating the schematic
//! clause system of that map over a finite atom universe, adding the
//! base's own rules as clauses, and running the rule engine with the
//! flattened context as atomic hypotheses. [`valid`] is support at the
//! empty base, which coincides with intuitionistic provability; the
//! differential suites check that against the independent sequent
//! prover.
//!
//! [`bounded_eval`] instead evaluates the defining quantifier semantics
//! directly: base extensions range over a finite rule universe and
//! quantified atoms over a finite universe. It is an approximation by
//! construction and exists purely as a second opinion.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::base::{derives, Base, Derivation};
use crate::clauses::{
    base_to_clauses, flatten_many, instantiate_system, modified_system_from, ClauseSystem,
};
use crate::prover::{clause_derives, kripke_refute, oracle_prove, Sequent};
use crate::syntax::{normalize_bot, Atom, Context, Formula};

/// A support judgment to decide: `context ⊩_base formula`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SupportQuery {
    pub base: Base,
    pub context: Context,
    pub formula: Formula,
}

/// The outcome of deciding a support query, together with the full
/// clause-level picture: the instantiation universe, the combined
/// concrete system, the flattened hypotheses and goal, and a replayable
/// derivation when the verdict is positive.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SupportResult {
    pub verdict: bool,
    pub goal: Atom,
    pub hypotheses: BTreeSet<Atom>,
    pub universe: Vec<Atom>,
    pub certificate: Option<Derivation>,
    pub system: ClauseSystem,
}

/// Decides `context ⊩_base formula`.
pub fn supports(q: &SupportQuery) -> SupportResult {
    supports_padded(q, 0)
}

/// Like [`supports`] but with `extra` additional fresh atoms thrown
/// into the instantiation universe. Verdicts must not depend on
/// `extra`; the property suite checks that invariance.
pub fn supports_padded(q: &SupportQuery, extra: usize) -> SupportResult {
    let formula = normalize_bot(&q.formula);
    let context: Vec<Formula> = q.context.iter().map(normalize_bot).collect();
    let mut inputs = context.clone();
    inputs.push(formula.clone());
    let map = flatten_many(&inputs).expect("normalized inputs always flatten");
    let system = modified_system_from(&map);
    let mut universe: BTreeSet<Atom> = map.range().into_iter().collect();
    universe.extend(q.base.atoms());
    for offset in 0..=extra {
        universe.insert(map.extra_fresh(offset));
    }
    let universe: Vec<Atom> = universe.into_iter().collect();
    let concrete =
        instantiate_system(&system, &universe).expect("the universe is never empty");
    let combined = concrete.union(&base_to_clauses(&q.base));
    let hypotheses: BTreeSet<Atom> = context
        .iter()
        .map(|g| map.flat(g).expect("context entries were flattened").clone())
        .collect();
    let goal = map
        .flat(&formula)
        .expect("the formula was flattened")
        .clone();
    let (verdict, certificate) = clause_derives(&combined, &hypotheses, &goal)
        .expect("instantiated systems carry no schematic clauses");
    SupportResult { verdict, goal, hypotheses, universe, certificate, system: combined }
}

/// Support at the empty base: validity of `formula` under `context`.
pub fn valid(context: &Context, formula: &Formula) -> bool {
    let query = SupportQuery {
        base: Base::new(),
        context: context.clone(),
        formula: formula.clone(),
    };
    supports(&query).verdict
}

/// The direct shortcut for atomic judgments: support of an atom under
/// atomic hypotheses is derivability in the base.
pub fn support_atomic(base: &Base, hypotheses: &BTreeSet<Atom>, goal: &Atom) -> bool {
    derives(base, hypotheses, goal).0
}

/// How many worlds the crosscheck refuter may enumerate.
pub const CROSSCHECK_MAX_WORLDS: usize = 3;

/// One differential observation: the clause-level verdict, the sequent
/// prover's verdict, and the world count of a countermodel when one
/// exists within [`CROSSCHECK_MAX_WORLDS`] worlds.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CrosscheckRecord {
    pub formula: String,
    pub bes: bool,
    pub oracle: bool,
    pub kripke: Option<usize>,
    pub agree: bool,
}

/// The aggregate of a differential run, in input order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrosscheckReport {
    pub records: Vec<CrosscheckRecord>,
    pub mismatches: usize,
}

impl CrosscheckReport {
    pub fn total(&self) -> usize {
        self.records.len()
    }
}

fn crosscheck_one(formula: &Formula) -> CrosscheckRecord {
    let bes = valid(&Context::new(), formula);
    let oracle = oracle_prove(&Sequent::new([], formula.clone())).0;
    let kripke = if oracle {
        None
    } else {
        kripke_refute(formula, CROSSCHECK_MAX_WORLDS).map(|m| m.worlds)
    };
    CrosscheckRecord {
        formula: formula.to_string(),
        bes,
        oracle,
        kripke,
        agree: bes == oracle,
    }
}

/// Runs the validity decision procedure against the sequent prover on
/// every formula, attempting a Kripke countermodel for refuted ones.
/// `jobs` above zero pins the worker count; zero uses the default pool.
/// Record order is input order either way.
pub fn crosscheck(formulas: &[Formula], jobs: usize) -> CrosscheckReport {
    use rayon::prelude::*;
    let run = || formulas.par_iter().map(crosscheck_one).collect::<Vec<_>>();
    let records = if jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool construction does not fail")
            .install(run)
    };
    let mismatches = records.iter().filter(|r| !r.agree).count();
    CrosscheckReport { records, mismatches }
}

/// Whether extension rules may discharge hypotheses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PremiseDepth {
    /// Premises of enumerated rules are bare atoms.
    Flat,
    /// Premises may also discharge a single hypothesis (`(h => a)`).
    Hypothetical,
}

/// Finite relativization for the direct evaluator: the atom universe
/// quantified atoms range over, and the shape limits of the enumerated
/// extension rules.
///
/// The greatest atom of the universe is kept out of every enumerated
/// rule. It stands in for the infinitely many atoms no finite base
/// mentions: no enumerable extension can derive it, so absurdity
/// support stays unsatisfiable just as in the unbounded semantics. Pad
/// the universe with one atom beyond the query's to get that fidelity,
/// and with two so that extension rules can also target a fresh atom.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bounds {
    pub atom_universe: BTreeSet<Atom>,
    pub max_rules: usize,
    pub max_premises: usize,
    pub premise_depth: PremiseDepth,
}

/// Hard cap on the quantified atom universe (rows are machine words).
pub const MAX_UNIVERSE_ATOMS: usize = 32;

/// Hard cap on the enumerated rule universe (extension sets are
/// machine-word bitmasks).
pub const MAX_RULE_UNIVERSE: usize = 128;

/// Why the bounded evaluator rejected its inputs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundedError {
    #[error("atom `{atom}` of the query is outside the bounded atom universe")]
    OutsideUniverse { atom: Atom },
    #[error("atom universe has {size} atoms; the evaluator handles at most {MAX_UNIVERSE_ATOMS}")]
    UniverseTooLarge { size: usize },
    #[error(
        "the bounds generate {size} extension rules; the evaluator enumerates at most {MAX_RULE_UNIVERSE}"
    )]
    RuleUniverseTooLarge { size: usize },
}

/// Evaluates the quantifier definition of support directly.
///
/// Equivalent to `BoundedEvaluator::new(&q.base, bounds)?.eval(...)`;
/// build the evaluator yourself to share its caches across queries
/// against one base.
pub fn bounded_eval(q: &SupportQuery, bounds: &Bounds) -> Result<bool, BoundedError> {
    BoundedEvaluator::new(&q.base, bounds)?.eval(&q.context, &q.formula)
}

/// A rule over atom indices: premises pair a hypothesis bitmask with a
/// head index.
#[derive(Clone, PartialEq, Eq, Debug)]
struct MicroRule {
    premises: Vec<(u32, usize)>,
    conclusion: usize,
}

/// Formula structure over interned ids.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum FNode {
    Atom(usize),
    Absurd,
    Conj(usize, usize),
    Disj(usize, usize),
    Impl(usize, usize),
}

/// Derived-atom rows per assumption set, for one extension.
#[derive(Clone, Debug, Default)]
struct ClosureTable {
    rows: Vec<(u32, u32)>,
}

impl ClosureTable {
    fn get(&self, assumptions: u32) -> Option<u32> {
        self.rows
            .iter()
            .find(|(a, _)| *a == assumptions)
            .map(|(_, derived)| *derived)
    }
}

const CLOSURE_CACHE_CAP: usize = 1 << 17;
const EXT_CACHE_CAP: usize = 1 << 12;
const EMPTY_CONTEXT: usize = 0;

/// The bounded direct evaluator for one base under fixed [`Bounds`].
///
/// Extension rules range over every universe atom except the greatest
/// (see [`Bounds`]), carry at most `max_premises` distinct premises,
/// and skip shapes that can never enlarge derivability (a premise
/// hypothesis equal to its own head, or a bare premise equal to the
/// rule's conclusion). Each universal quantifier enumerates extensions
/// of the current base by at most `max_rules` of these rules.
#[derive(Debug)]
pub struct BoundedEvaluator {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
    rule_atoms: usize,
    base: Vec<MicroRule>,
    pool: Vec<MicroRule>,
    max_rules: usize,
    literal_atomic: bool,
    nodes: Vec<FNode>,
    fids: BTreeMap<Formula, usize>,
    atom_fids: Vec<usize>,
    contexts: Vec<Vec<usize>>,
    cids: BTreeMap<Vec<usize>, usize>,
    memo: FxHashMap<(u128, u32, u32), bool>,
    closures: FxHashMap<u128, ClosureTable>,
    ext_cache: FxHashMap<u128, Vec<u128>>,
}

impl BoundedEvaluator {
    pub fn new(base: &Base, bounds: &Bounds) -> Result<BoundedEvaluator, BoundedError> {
        let atoms: Vec<Atom> = bounds.atom_universe.iter().cloned().collect();
        if atoms.len() > MAX_UNIVERSE_ATOMS {
            return Err(BoundedError::UniverseTooLarge { size: atoms.len() });
        }
        let index: BTreeMap<Atom, usize> =
            atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        if let Some(atom) = base.atoms().into_iter().find(|a| !index.contains_key(a)) {
            return Err(BoundedError::OutsideUniverse { atom });
        }
        let rule_atoms = if atoms.len() >= 2 { atoms.len() - 1 } else { atoms.len() };

        let mut candidates: Vec<(u32, usize)> = (0..rule_atoms).map(|a| (0u32, a)).collect();
        if bounds.premise_depth == PremiseDepth::Hypothetical {
            for h in 0..rule_atoms {
                for a in 0..rule_atoms {
                    if h != a {
                        candidates.push((1 << h, a));
                    }
                }
            }
        }
        let mut pool = Vec::new();
        for conclusion in 0..rule_atoms {
            for k in 0..=bounds.max_premises.min(candidates.len()) {
                each_combination(candidates.len(), k, &mut |combo| {
                    let trivial = combo
                        .iter()
                        .any(|&i| candidates[i].0 == 0 && candidates[i].1 == conclusion);
                    if !trivial {
                        pool.push(MicroRule {
                            premises: combo.iter().map(|&i| candidates[i]).collect(),
                            conclusion,
                        });
                    }
                });
            }
        }
        if pool.len() > MAX_RULE_UNIVERSE {
            return Err(BoundedError::RuleUniverseTooLarge { size: pool.len() });
        }

        let base_rules = base
            .rules
            .iter()
            .map(|rule| MicroRule {
                premises: rule
                    .premises
                    .iter()
                    .map(|p| {
                        let bits = p
                            .hypotheses
                            .iter()
                            .fold(0u32, |acc, h| acc | 1 << index[h]);
                        (bits, index[&p.head])
                    })
                    .collect(),
                conclusion: index[&rule.conclusion],
            })
            .collect();

        let mut evaluator = BoundedEvaluator {
            atoms,
            index,
            rule_atoms,
            base: base_rules,
            pool,
            max_rules: bounds.max_rules,
            literal_atomic: false,
            nodes: Vec::new(),
            fids: BTreeMap::new(),
            atom_fids: Vec::new(),
            contexts: vec![Vec::new()],
            cids: BTreeMap::from([(Vec::new(), EMPTY_CONTEXT)]),
            memo: FxHashMap::default(),
            closures: FxHashMap::default(),
            ext_cache: FxHashMap::default(),
        };
        evaluator.atom_fids = (0..evaluator.atoms.len())
            .map(|i| {
                let formula = Formula::atom(evaluator.atoms[i].clone());
                evaluator.intern(&formula)
            })
            .collect();
        Ok(evaluator)
    }

    /// How many extension rules the bounds generate.
    pub fn rule_universe(&self) -> usize {
        self.pool.len()
    }

    /// When set, judgments whose context is purely atomic run through
    /// the extension quantifier instead of the provably equivalent
    /// derivability check. Much slower; the differential suites use it
    /// to keep the comparison honest.
    pub fn set_literal_atomic(&mut self, literal: bool) {
        if self.literal_atomic != literal {
            self.literal_atomic = literal;
            self.memo.clear();
        }
    }

    /// Decides `context ⊩ formula` at this evaluator's base.
    pub fn eval(&mut self, context: &Context, formula: &Formula) -> Result<bool, BoundedError> {
        for f in context.iter().chain(std::iter::once(formula)) {
            for atom in f.atoms() {
                if !self.index.contains_key(&atom) {
                    return Err(BoundedError::OutsideUniverse { atom });
                }
            }
        }
        let mut items: Vec<usize> = context.iter().map(|f| self.intern(f)).collect();
        items.sort_unstable();
        items.dedup();
        let cid = self.context_id(items);
        let fid = self.intern(formula);
        Ok(self.judge(0, cid, fid))
    }

    fn intern(&mut self, formula: &Formula) -> usize {
        if let Some(&id) = self.fids.get(formula) {
            return id;
        }
        let node = match formula {
            Formula::Atomic(a) => FNode::Atom(self.index[a]),
            Formula::Absurd => FNode::Absurd,
            Formula::Conj(l, r) => FNode::Conj(self.intern(l), self.intern(r)),
            Formula::Disj(l, r) => FNode::Disj(self.intern(l), self.intern(r)),
            Formula::Impl(l, r) => FNode::Impl(self.intern(l), self.intern(r)),
        };
        let id = self.nodes.len();
        self.nodes.push(node);
        self.fids.insert(formula.clone(), id);
        id
    }

    fn context_id(&mut self, items: Vec<usize>) -> usize {
        if let Some(&id) = self.cids.get(&items) {
            return id;
        }
        let id = self.contexts.len();
        self.contexts.push(items.clone());
        self.cids.insert(items, id);
        id
    }

    fn singleton(&mut self, fid: usize) -> usize {
        self.context_id(vec![fid])
    }

    fn judge(&mut self, mask: u128, ctx: usize, goal: usize) -> bool {
        let key = (mask, ctx as u32, goal as u32);
        if let Some(&value) = self.memo.get(&key) {
            return value;
        }
        let value = self.compute(mask, ctx, goal);
        self.memo.insert(key, value);
        value
    }

    fn compute(&mut self, mask: u128, ctx: usize, goal: usize) -> bool {
        let items = self.contexts[ctx].clone();
        if !items.is_empty() {
            // The general quantifier row: every extension supporting the
            // whole context supports the conclusion.
            if !self.literal_atomic && items.len() <= self.max_rules {
                if let Some(bits) = self.rule_atom_bits(&items) {
                    if let FNode::Atom(g) = self.nodes[goal] {
                        // Equivalent to the loop below: the extension by
                        // one nullary rule per context atom is the
                        // critical instance, and cut gives the converse.
                        return self.derivable(mask, bits, g);
                    }
                }
            }
            for ext in self.extensions(mask) {
                if items.iter().all(|&g| self.judge(ext, EMPTY_CONTEXT, g))
                    && !self.judge(ext, EMPTY_CONTEXT, goal)
                {
                    return false;
                }
            }
            return true;
        }
        match self.nodes[goal] {
            FNode::Atom(a) => self.derivable(mask, 0, a),
            FNode::Absurd => (0..self.atoms.len()).all(|u| self.derivable(mask, 0, u)),
            FNode::Conj(l, r) => {
                self.judge(mask, EMPTY_CONTEXT, l) && self.judge(mask, EMPTY_CONTEXT, r)
            }
            FNode::Impl(l, r) => {
                let c = self.singleton(l);
                self.judge(mask, c, r)
            }
            FNode::Disj(l, r) => {
                let lc = self.singleton(l);
                let rc = self.singleton(r);
                for ext in self.extensions(mask) {
                    for u in 0..self.atoms.len() {
                        let uf = self.atom_fids[u];
                        if self.judge(ext, lc, uf)
                            && self.judge(ext, rc, uf)
                            && !self.derivable(ext, 0, u)
                        {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Context as an assumption bitmask, if every entry is an atom the
    /// rule universe can assert.
    fn rule_atom_bits(&self, items: &[usize]) -> Option<u32> {
        let mut bits = 0u32;
        for &fid in items {
            match self.nodes[fid] {
                FNode::Atom(a) if a < self.rule_atoms => bits |= 1 << a,
                _ => return None,
            }
        }
        Some(bits)
    }

    /// All extensions of `mask` by at most `max_rules` pool rules,
    /// including `mask` itself.
    fn extensions(&mut self, mask: u128) -> Vec<u128> {
        if let Some(cached) = self.ext_cache.get(&mask) {
            return cached.clone();
        }
        let avail: Vec<usize> = (0..self.pool.len()).filter(|i| mask >> i & 1 == 0).collect();
        let mut out = Vec::new();
        for k in 0..=self.max_rules.min(avail.len()) {
            each_combination(avail.len(), k, &mut |combo| {
                let ext = combo.iter().fold(mask, |acc, &i| acc | 1 << avail[i]);
                out.push(ext);
            });
        }
        if self.ext_cache.len() < EXT_CACHE_CAP {
            self.ext_cache.insert(mask, out.clone());
        }
        out
    }

    /// Derivability of an atom from atomic assumptions in the base
    /// extended by the rules of `mask`, via a least fixpoint over
    /// assumption-set rows.
    fn derivable(&mut self, mask: u128, assumptions: u32, goal: usize) -> bool {
        if let Some(table) = self.closures.get(&mask) {
            if let Some(derived) = table.get(assumptions) {
                return derived >> goal & 1 == 1;
            }
        }
        let mut table = self.closures.remove(&mask).unwrap_or_default();
        self.extend_table(mask, &mut table, assumptions);
        let result = table.get(assumptions).expect("row was discovered") >> goal & 1 == 1;
        if self.closures.len() < CLOSURE_CACHE_CAP {
            self.closures.insert(mask, table);
        }
        result
    }

    fn extend_table(&self, mask: u128, table: &mut ClosureTable, root: u32) {
        let mut active: Vec<&MicroRule> = self.base.iter().collect();
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            active.push(&self.pool[i]);
            rest &= rest - 1;
        }
        // Rows reachable through premise hypotheses.
        let mut stack = vec![root];
        while let Some(row) = stack.pop() {
            if table.get(row).is_some() {
                continue;
            }
            table.rows.push((row, row));
            for rule in &active {
                for (hyps, _) in &rule.premises {
                    if row | hyps != row {
                        stack.push(row | hyps);
                    }
                }
            }
        }
        // Simultaneous least fixpoint across all rows.
        loop {
            let mut changed = false;
            for i in 0..table.rows.len() {
                let row = table.rows[i].0;
                for rule in &active {
                    let bit = 1u32 << rule.conclusion;
                    if table.rows[i].1 & bit != 0 {
                        continue;
                    }
                    let fires = rule.premises.iter().all(|&(hyps, head)| {
                        let derived = table
                            .get(row | hyps)
                            .expect("premise rows were discovered");
                        derived >> head & 1 == 1
                    });
                    if fires {
                        table.rows[i].1 |= bit;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Calls `f` with every ascending `k`-subset of `0..n`.
fn each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    let mut combo = Vec::with_capacity(k);
    fn go(n: usize, k: usize, start: usize, combo: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == 0 {
            f(combo);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            combo.push(i);
            go(n, k - 1, i + 1, combo, f);
            combo.pop();
        }
    }
    go(n, k, 0, &mut combo, f);
}
