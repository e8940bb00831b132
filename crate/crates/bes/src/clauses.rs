//! Clausal translation of formulas into general atomic clauses.
//!
//! [`flatten`] names every subformula with an atom (`#1`, `#2`, ... for
//! composites, atoms naming themselves), then [`clauses_for`] emits the
//! defining clauses of each composite in terms of those names:
//!
//! ```text
//! x /\ y   ~>   #k -> x,  #k -> y,  x /\ y -> #k
//! x \/ y   ~>   x -> #k,  y -> #k,  #k /\ (x -> u) /\ (y -> u) -> u   for each u
//! x -> y   ~>   #k /\ x -> y,  (x -> y) -> #k
//! ```
//!
//! [`mints_system`] instantiates the disjunction eliminations over the
//! flattening range and adds absurdity clauses over a fresh guard atom;
//! [`modified_system`] instead leaves eliminations and the absurdity
//! clause `#bot -> u` schematic in `u`, to be instantiated over whatever
//! universe a caller supplies. Atomic rules and clauses are carried by
//! the same shape, and [`rule_to_clause`]/[`clause_to_rule`] move between
//! them without loss.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::base::{AtomicRule, Base, RulePremise};
use crate::syntax::{collect_subformulas, Atom, Formula};

/// A general atomic clause: premises (each possibly hypothetical) that
/// jointly yield an atomic conclusion. Structurally identical to
/// [`AtomicRule`]; the separate type marks which side of the translation
/// a value lives on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GeneralClause {
    pub premises: Vec<RulePremise>,
    pub conclusion: Atom,
}

impl GeneralClause {
    pub fn bare(conclusion: Atom) -> GeneralClause {
        GeneralClause { premises: Vec::new(), conclusion }
    }

    pub fn new(premises: Vec<RulePremise>, conclusion: Atom) -> GeneralClause {
        GeneralClause { premises, conclusion }
    }

    /// The clause read back as a formula: bare clauses are their
    /// conclusion atom, others `P1 /\ ... /\ Pn -> c` with hypothetical
    /// premises rendered as implications.
    pub fn as_formula(&self) -> Formula {
        fn premise_formula(p: &RulePremise) -> Formula {
            let head = Formula::Atomic(p.head.clone());
            match conj_all(p.hypotheses.iter().map(|a| Formula::Atomic(a.clone()))) {
                Some(hyps) => Formula::implies(hyps, head),
                None => head,
            }
        }
        match conj_all(self.premises.iter().map(premise_formula)) {
            Some(body) => Formula::implies(body, Formula::Atomic(self.conclusion.clone())),
            None => Formula::Atomic(self.conclusion.clone()),
        }
    }

    /// All atoms mentioned by the clause, sorted.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for premise in &self.premises {
            out.extend(premise.hypotheses.iter().cloned());
            out.insert(premise.head.clone());
        }
        out.insert(self.conclusion.clone());
        out
    }
}

fn conj_all<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
    items.into_iter().reduce(Formula::conj)
}

impl fmt::Display for GeneralClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_formula())
    }
}

impl Serialize for GeneralClause {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Premise<'a> {
            hyps: Vec<&'a str>,
            head: &'a str,
        }
        let premises: Vec<Premise> = self
            .premises
            .iter()
            .map(|p| Premise {
                hyps: p.hypotheses.iter().map(Atom::name).collect(),
                head: p.head.name(),
            })
            .collect();
        let mut s = serializer.serialize_struct("GeneralClause", 2)?;
        s.serialize_field("premises", &premises)?;
        s.serialize_field("conclusion", self.conclusion.name())?;
        s.end()
    }
}

/// An atom position inside a schematic clause: either a fixed atom or
/// the single schematic slot.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SchemAtom {
    Fixed(Atom),
    Slot,
}

impl SchemAtom {
    fn instantiate(&self, x: &Atom) -> Atom {
        match self {
            SchemAtom::Fixed(a) => a.clone(),
            SchemAtom::Slot => x.clone(),
        }
    }

    fn name(&self) -> &str {
        match self {
            SchemAtom::Fixed(a) => a.name(),
            SchemAtom::Slot => "?x",
        }
    }
}

/// A clause template with one schematic atom slot, standing for one
/// clause per atom it is instantiated with.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SchematicClause {
    pub premises: Vec<(BTreeSet<SchemAtom>, SchemAtom)>,
    pub conclusion: SchemAtom,
}

impl SchematicClause {
    pub fn instantiate(&self, x: &Atom) -> GeneralClause {
        GeneralClause {
            premises: self
                .premises
                .iter()
                .map(|(hyps, head)| RulePremise {
                    hypotheses: hyps.iter().map(|h| h.instantiate(x)).collect(),
                    head: head.instantiate(x),
                })
                .collect(),
            conclusion: self.conclusion.instantiate(x),
        }
    }
}

impl fmt::Display for SchematicClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marker = Atom::internal("?x".into());
        write!(f, "{}", self.instantiate(&marker).as_formula())
    }
}

impl Serialize for SchematicClause {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Premise<'a> {
            hyps: Vec<&'a str>,
            head: &'a str,
        }
        let premises: Vec<Premise> = self
            .premises
            .iter()
            .map(|(hyps, head)| Premise {
                hyps: hyps.iter().map(SchemAtom::name).collect(),
                head: head.name(),
            })
            .collect();
        let mut s = serializer.serialize_struct("SchematicClause", 2)?;
        s.serialize_field("premises", &premises)?;
        s.serialize_field("conclusion", self.conclusion.name())?;
        s.end()
    }
}

/// A set of concrete clauses plus schematic clause families.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct ClauseSystem {
    pub clauses: BTreeSet<GeneralClause>,
    pub schematics: BTreeSet<SchematicClause>,
}

impl ClauseSystem {
    pub fn new() -> ClauseSystem {
        ClauseSystem::default()
    }

    /// Union of two systems.
    pub fn union(&self, other: &ClauseSystem) -> ClauseSystem {
        let mut out = self.clone();
        out.clauses.extend(other.clauses.iter().cloned());
        out.schematics.extend(other.schematics.iter().cloned());
        out
    }

    pub fn insert(&mut self, clause: GeneralClause) {
        self.clauses.insert(clause);
    }

    /// All atoms mentioned by concrete clauses, sorted.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for clause in &self.clauses {
            out.extend(clause.atoms());
        }
        out
    }
}

/// The injective naming map a flattening produced: every subformula of
/// the flattened formulas paired with the atom that names it, plus the
/// always-allocated absurdity name and guard atom.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlatMap {
    entries: Vec<(Formula, Atom)>,
    index: BTreeMap<Formula, Atom>,
    bot_atom: Atom,
    fresh_y: Atom,
    next_fresh: usize,
}

impl FlatMap {
    /// The atom naming `f`, if `f` was among the flattened subformulas.
    pub fn flat(&self, f: &Formula) -> Option<&Atom> {
        self.index.get(f)
    }

    /// Subformula/name pairs, leftmost-innermost subformula order.
    pub fn entries(&self) -> &[(Formula, Atom)] {
        &self.entries
    }

    /// The names of all flattened subformulas, in entry order.
    pub fn range(&self) -> Vec<Atom> {
        self.entries.iter().map(|(_, a)| a.clone()).collect()
    }

    /// The name reserved for absurdity (allocated whether or not
    /// absurdity occurs).
    pub fn bot_atom(&self) -> &Atom {
        &self.bot_atom
    }

    /// The guard atom for the absurdity clauses of [`mints_system`].
    pub fn fresh_y(&self) -> &Atom {
        &self.fresh_y
    }

    /// A fresh atom beyond everything this map allocated; `offset`
    /// distinguishes several of them.
    pub fn extra_fresh(&self, offset: usize) -> Atom {
        Atom::internal(format!("#{}", self.next_fresh + offset))
    }
}

/// Flattening requires absurdity confined to implication conclusions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlattenError {
    #[error("absurdity occurs outside an implication conclusion; normalize the formula first")]
    NotNormalized,
}

/// Names every subformula of `f`. Atoms name themselves; composites get
/// `#1`, `#2`, ... in leftmost-innermost order; the absurdity name and
/// the guard atom take the next two numbers.
pub fn flatten(f: &Formula) -> Result<FlatMap, FlattenError> {
    flatten_many(std::slice::from_ref(f))
}

/// Flattens several formulas through one shared naming map. Subformulas
/// are ordered formula by formula, leftmost-innermost within each.
pub fn flatten_many(formulas: &[Formula]) -> Result<FlatMap, FlattenError> {
    for f in formulas {
        if !crate::syntax::bot_normalized(f) {
            return Err(FlattenError::NotNormalized);
        }
    }
    let mut seen = BTreeSet::new();
    let mut subs = Vec::new();
    for f in formulas {
        collect_subformulas(f, &mut seen, &mut subs);
    }
    let composites = subs.iter().filter(|s| s.is_composite()).count();
    let bot_atom = Atom::internal(format!("#{}", composites + 1));
    let fresh_y = Atom::internal(format!("#{}", composites + 2));
    let mut entries = Vec::new();
    let mut index = BTreeMap::new();
    let mut counter = 0;
    for sub in subs {
        let name = match &sub {
            Formula::Atomic(a) => a.clone(),
            Formula::Absurd => bot_atom.clone(),
            _ => {
                counter += 1;
                Atom::internal(format!("#{counter}"))
            }
        };
        index.insert(sub.clone(), name.clone());
        entries.push((sub, name));
    }
    Ok(FlatMap { entries, index, bot_atom, fresh_y, next_fresh: composites + 3 })
}

/// Failure while emitting the defining clauses of a subformula.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClauseError {
    #[error("`{formula}` is not a composite formula")]
    NotComposite { formula: String },
    #[error("`{formula}` was not named by this flattening")]
    NotInMap { formula: String },
    #[error("instantiation universe is empty")]
    EmptyUniverse,
}

/// The defining clauses of one composite subformula, with disjunction
/// eliminations instantiated over `inst`.
pub fn clauses_for(
    f: &Formula,
    map: &FlatMap,
    inst: &[Atom],
) -> Result<Vec<GeneralClause>, ClauseError> {
    if inst.is_empty() {
        return Err(ClauseError::EmptyUniverse);
    }
    let name = |sub: &Formula| {
        map.flat(sub)
            .cloned()
            .ok_or_else(|| ClauseError::NotInMap { formula: sub.to_string() })
    };
    let this = name(f)?;
    match f {
        Formula::Conj(l, r) => {
            let (fl, fr) = (name(l)?, name(r)?);
            Ok(vec![
                GeneralClause::new(vec![RulePremise::flat(this.clone())], fl.clone()),
                GeneralClause::new(vec![RulePremise::flat(this.clone())], fr.clone()),
                GeneralClause::new(
                    vec![RulePremise::flat(fl), RulePremise::flat(fr)],
                    this,
                ),
            ])
        }
        Formula::Disj(l, r) => {
            let (fl, fr) = (name(l)?, name(r)?);
            let mut out = vec![
                GeneralClause::new(vec![RulePremise::flat(fl.clone())], this.clone()),
                GeneralClause::new(vec![RulePremise::flat(fr.clone())], this.clone()),
            ];
            for x in inst {
                out.push(disjunction_elimination(&this, &fl, &fr).instantiate(x));
            }
            Ok(out)
        }
        Formula::Impl(l, r) => {
            let (fl, fr) = (name(l)?, name(r)?);
            Ok(vec![
                GeneralClause::new(
                    vec![RulePremise::flat(this.clone()), RulePremise::flat(fl.clone())],
                    fr.clone(),
                ),
                GeneralClause::new(vec![RulePremise::new([fl], fr)], this),
            ])
        }
        _ => Err(ClauseError::NotComposite { formula: f.to_string() }),
    }
}

fn disjunction_elimination(disj: &Atom, left: &Atom, right: &Atom) -> SchematicClause {
    SchematicClause {
        premises: vec![
            (BTreeSet::new(), SchemAtom::Fixed(disj.clone())),
            (
                BTreeSet::from([SchemAtom::Fixed(left.clone())]),
                SchemAtom::Slot,
            ),
            (
                BTreeSet::from([SchemAtom::Fixed(right.clone())]),
                SchemAtom::Slot,
            ),
        ],
        conclusion: SchemAtom::Slot,
    }
}

fn ex_falso(bot: &Atom) -> SchematicClause {
    SchematicClause {
        premises: vec![(BTreeSet::new(), SchemAtom::Fixed(bot.clone()))],
        conclusion: SchemAtom::Slot,
    }
}

/// The clause system of the flattening-based provability reduction: the
/// defining clauses of every composite subformula with eliminations over
/// the whole flattening range, plus absurdity clauses tied to the guard
/// atom. Returns the system and the name of `f`, its goal.
pub fn mints_system(f: &Formula) -> Result<(ClauseSystem, Atom), FlattenError> {
    let map = flatten(f)?;
    let range = map.range();
    let mut system = ClauseSystem::new();
    for (sub, _) in map.entries() {
        if sub.is_composite() {
            let clauses = clauses_for(sub, &map, &range)
                .expect("composite subformulas of the map are always translatable");
            system.clauses.extend(clauses);
        }
    }
    let bot = map.bot_atom().clone();
    let guard = map.fresh_y().clone();
    let mut all_then_guard: Vec<RulePremise> =
        range.iter().map(|x| RulePremise::flat(x.clone())).collect();
    all_then_guard.push(RulePremise::flat(guard.clone()));
    system.insert(GeneralClause::new(all_then_guard, bot.clone()));
    system.insert(GeneralClause::new(vec![RulePremise::flat(bot.clone())], guard));
    for x in &range {
        system.insert(GeneralClause::new(
            vec![RulePremise::flat(bot.clone())],
            x.clone(),
        ));
    }
    let goal = map
        .flat(f)
        .expect("the flattened formula names itself")
        .clone();
    Ok((system, goal))
}

/// Like [`mints_system`] but with disjunction eliminations and the
/// absurdity clause left schematic, to be instantiated over a universe
/// of the caller's choosing. No guard atom is involved.
pub fn modified_system(f: &Formula) -> Result<ClauseSystem, FlattenError> {
    let map = flatten(f)?;
    Ok(modified_system_from(&map))
}

/// The schematic system read off an existing flattening.
pub fn modified_system_from(map: &FlatMap) -> ClauseSystem {
    let mut system = ClauseSystem::new();
    for (sub, name) in map.entries() {
        match sub {
            Formula::Conj(..) | Formula::Impl(..) => {
                let marker = [name.clone()];
                let clauses = clauses_for(sub, map, &marker)
                    .expect("composite subformulas of the map are always translatable");
                system.clauses.extend(clauses);
            }
            Formula::Disj(l, r) => {
                let fl = map.flat(l).expect("operand was flattened").clone();
                let fr = map.flat(r).expect("operand was flattened").clone();
                system.insert(GeneralClause::new(
                    vec![RulePremise::flat(fl.clone())],
                    name.clone(),
                ));
                system.insert(GeneralClause::new(
                    vec![RulePremise::flat(fr.clone())],
                    name.clone(),
                ));
                system.schematics.insert(disjunction_elimination(name, &fl, &fr));
            }
            _ => {}
        }
    }
    system.schematics.insert(ex_falso(map.bot_atom()));
    system
}

/// Instantiation failure.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstantiateError {
    #[error("instantiation universe is empty")]
    EmptyUniverse,
}

/// Expands every schematic clause of `system` over `universe`. The
/// result is fully concrete.
pub fn instantiate_system(
    system: &ClauseSystem,
    universe: &[Atom],
) -> Result<ClauseSystem, InstantiateError> {
    if universe.is_empty() {
        return Err(InstantiateError::EmptyUniverse);
    }
    let mut out = ClauseSystem::new();
    out.clauses = system.clauses.clone();
    for schematic in &system.schematics {
        for x in universe {
            out.insert(schematic.instantiate(x));
        }
    }
    Ok(out)
}

/// Reads an atomic rule as the clause with the same premises and
/// conclusion.
pub fn rule_to_clause(rule: &AtomicRule) -> GeneralClause {
    GeneralClause { premises: rule.premises.clone(), conclusion: rule.conclusion.clone() }
}

/// Reads a clause back as an atomic rule. Inverse of [`rule_to_clause`].
pub fn clause_to_rule(clause: &GeneralClause) -> AtomicRule {
    AtomicRule { premises: clause.premises.clone(), conclusion: clause.conclusion.clone() }
}

/// Every rule of the base as a concrete clause.
pub fn base_to_clauses(base: &Base) -> ClauseSystem {
    let mut out = ClauseSystem::new();
    out.clauses = base.rules.iter().map(rule_to_clause).collect();
    out
}

/// The intuitionistic clause shapes of the translation's target
/// fragment.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MintsClassification {
    /// `(p1 /\ ... /\ pn) -> q` with every premise hypothesis-free;
    /// covers bare atoms (`n = 0`).
    Horn,
    /// `(p -> q) -> r`: exactly one premise, with exactly one hypothesis.
    ImplicationNested,
    /// `p -> (q \/ r)`. A [`GeneralClause`] conclusion is a single atom,
    /// so this tag never arises here; it completes the shape taxonomy.
    DisjunctiveHead,
    /// Anything else, such as instantiated disjunction eliminations.
    General,
}

/// Tags a clause with the shape it instantiates.
pub fn classify(clause: &GeneralClause) -> MintsClassification {
    if clause.premises.iter().all(|p| p.hypotheses.is_empty()) {
        return MintsClassification::Horn;
    }
    if let [premise] = clause.premises.as_slice() {
        if premise.hypotheses.len() == 1 {
            return MintsClassification::ImplicationNested;
        }
    }
    MintsClassification::General
}

/// How a formula falls outside the clause fragment.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClauseShapeError {
    #[error("`{formula}` is outside the clause fragment (conjunctions of clauses implying an atom)")]
    NotClausal { formula: String },
}

/// Reads a formula in the clause fragment back as a clause: an atom, or
/// `P1 /\ ... /\ Pn -> c` where each `Pi` is an atom or an implication
/// between conjunctions of atoms and an atom.
pub fn formula_to_clause(f: &Formula) -> Result<GeneralClause, ClauseShapeError> {
    let reject = || ClauseShapeError::NotClausal { formula: f.to_string() };
    match f {
        Formula::Atomic(a) => Ok(GeneralClause::bare(a.clone())),
        Formula::Impl(body, head) => {
            let Formula::Atomic(conclusion) = &**head else {
                return Err(reject());
            };
            let mut premises = Vec::new();
            for item in conjuncts(body) {
                match item {
                    Formula::Atomic(a) => premises.push(RulePremise::flat(a.clone())),
                    Formula::Impl(hyps, inner_head) => {
                        let Formula::Atomic(inner) = &**inner_head else {
                            return Err(reject());
                        };
                        let mut hypotheses = BTreeSet::new();
                        for h in conjuncts(hyps) {
                            let Formula::Atomic(a) = h else {
                                return Err(reject());
                            };
                            hypotheses.insert(a.clone());
                        }
                        premises.push(RulePremise { hypotheses, head: inner.clone() });
                    }
                    _ => return Err(reject()),
                }
            }
            Ok(GeneralClause::new(premises, conclusion.clone()))
        }
        _ => Err(reject()),
    }
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Conj(l, r) => {
            let mut out = conjuncts(l);
            out.extend(conjuncts(r));
            out
        }
        other => vec![other],
    }
}
