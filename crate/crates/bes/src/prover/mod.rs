//! Dual-route checking: an independent sequent-calculus oracle, the
//! clause-level decision procedure it is compared against, and a small
//! Kripke countermodel search for refuted formulas.

mod kripke;
mod oracle;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::base::{Base, Derivation};
use crate::clauses::{clause_to_rule, formula_to_clause, ClauseShapeError, ClauseSystem};
use crate::syntax::{Atom, Context, Formula};
use crate::trace::{render_judgment, TraceNode};

pub use kripke::{kripke_refute, KripkeModel, ModelError, MAX_ENUMERATED_WORLDS};
pub use oracle::Oracle;

/// An intuitionistic sequent `assumptions |- goal`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sequent {
    pub assumptions: Context,
    pub goal: Formula,
}

impl Sequent {
    pub fn new<I: IntoIterator<Item = Formula>>(assumptions: I, goal: Formula) -> Sequent {
        Sequent { assumptions: assumptions.into_iter().collect(), goal }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = render_judgment(
            self.assumptions.iter().map(Formula::to_string),
            &self.goal.to_string(),
        );
        f.write_str(&rendered)
    }
}

/// A proof tree in the contraction-free sequent calculus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SequentProof {
    pub rule: &'static str,
    /// The assumption the rule analyzed, if any.
    pub principal: Option<Formula>,
    pub sequent: Sequent,
    pub premises: Vec<SequentProof>,
}

/// Why a sequent proof failed to check.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step `{rule}` does not check at `{sequent}`: {reason}")]
pub struct ProofCheckError {
    pub rule: &'static str,
    pub sequent: String,
    pub reason: String,
}

impl SequentProof {
    pub fn to_trace(&self) -> TraceNode {
        TraceNode {
            judgment: self.sequent.to_string(),
            rule: self.rule.to_string(),
            premises: self.premises.iter().map(SequentProof::to_trace).collect(),
        }
    }

    /// Re-checks every step structurally: the rule applies to the node's
    /// sequent and produces exactly the recorded premise sequents.
    pub fn check(&self) -> Result<(), ProofCheckError> {
        let fail = |reason: &str| ProofCheckError {
            rule: self.rule,
            sequent: self.sequent.to_string(),
            reason: reason.to_string(),
        };
        let ctx = &self.sequent.assumptions;
        let goal = &self.sequent.goal;
        let principal = || -> Result<&Formula, ProofCheckError> {
            let p = self.principal.as_ref().ok_or_else(|| fail("missing principal formula"))?;
            if !ctx.contains(p) {
                return Err(fail("principal formula is not among the assumptions"));
            }
            Ok(p)
        };
        let expect_premises = |shapes: Vec<Sequent>| -> Result<(), ProofCheckError> {
            if self.premises.len() != shapes.len() {
                return Err(fail("wrong number of premises"));
            }
            for (premise, expected) in self.premises.iter().zip(&shapes) {
                if premise.sequent != *expected {
                    return Err(fail(&format!(
                        "premise `{}` differs from expected `{expected}`",
                        premise.sequent
                    )));
                }
            }
            Ok(())
        };
        let swap = |remove: &Formula, add: &[Formula]| {
            let mut next = ctx.clone();
            next.remove(remove);
            next.extend(add.iter().cloned());
            next
        };

        match self.rule {
            "axiom" => {
                if !ctx.contains(goal) {
                    return Err(fail("goal is not among the assumptions"));
                }
                expect_premises(Vec::new())?;
            }
            "absurdity-left" => {
                if !ctx.contains(&Formula::Absurd) {
                    return Err(fail("no absurdity among the assumptions"));
                }
                expect_premises(Vec::new())?;
            }
            "conjunction-left" => {
                let Formula::Conj(l, r) = principal()? else {
                    return Err(fail("principal formula is not a conjunction"));
                };
                let (l, r) = ((**l).clone(), (**r).clone());
                let p = principal()?.clone();
                expect_premises(vec![Sequent {
                    assumptions: swap(&p, &[l, r]),
                    goal: goal.clone(),
                }])?;
            }
            "disjunction-left" => {
                let Formula::Disj(l, r) = principal()? else {
                    return Err(fail("principal formula is not a disjunction"));
                };
                let (l, r) = ((**l).clone(), (**r).clone());
                let p = principal()?.clone();
                expect_premises(vec![
                    Sequent { assumptions: swap(&p, &[l]), goal: goal.clone() },
                    Sequent { assumptions: swap(&p, &[r]), goal: goal.clone() },
                ])?;
            }
            "implication-right" => {
                let Formula::Impl(a, b) = goal else {
                    return Err(fail("goal is not an implication"));
                };
                let mut next = ctx.clone();
                next.insert((**a).clone());
                expect_premises(vec![Sequent { assumptions: next, goal: (**b).clone() }])?;
            }
            "conjunction-right" => {
                let Formula::Conj(l, r) = goal else {
                    return Err(fail("goal is not a conjunction"));
                };
                expect_premises(vec![
                    Sequent { assumptions: ctx.clone(), goal: (**l).clone() },
                    Sequent { assumptions: ctx.clone(), goal: (**r).clone() },
                ])?;
            }
            "disjunction-right-1" | "disjunction-right-2" => {
                let Formula::Disj(l, r) = goal else {
                    return Err(fail("goal is not a disjunction"));
                };
                let picked = if self.rule == "disjunction-right-1" { l } else { r };
                let _ = (l, r);
                expect_premises(vec![Sequent {
                    assumptions: ctx.clone(),
                    goal: (**picked).clone(),
                }])?;
            }
            "detachment-left" => {
                let p = principal()?.clone();
                let Formula::Impl(a, b) = &p else {
                    return Err(fail("principal formula is not an implication"));
                };
                if !matches!(**a, Formula::Atomic(_)) || !ctx.contains(a) {
                    return Err(fail("antecedent is not an assumed atom"));
                }
                expect_premises(vec![Sequent {
                    assumptions: swap(&p, &[(**b).clone()]),
                    goal: goal.clone(),
                }])?;
            }
            "absurdity-antecedent-left" => {
                let p = principal()?.clone();
                let Formula::Impl(a, _) = &p else {
                    return Err(fail("principal formula is not an implication"));
                };
                if !matches!(**a, Formula::Absurd) {
                    return Err(fail("antecedent is not absurdity"));
                }
                expect_premises(vec![Sequent {
                    assumptions: swap(&p, &[]),
                    goal: goal.clone(),
                }])?;
            }
            "conjunction-antecedent-left" => {
                let p = principal()?.clone();
                let Formula::Impl(a, c) = &p else {
                    return Err(fail("principal formula is not an implication"));
                };
                let Formula::Conj(x, y) = &**a else {
                    return Err(fail("antecedent is not a conjunction"));
                };
                let curried =
                    Formula::implies((**x).clone(), Formula::implies((**y).clone(), (**c).clone()));
                expect_premises(vec![Sequent {
                    assumptions: swap(&p, &[curried]),
                    goal: goal.clone(),
                }])?;
            }
            "disjunction-antecedent-left" => {
                let p = principal()?.clone();
                let Formula::Impl(a, c) = &p else {
                    return Err(fail("principal formula is not an implication"));
                };
                let Formula::Disj(x, y) = &**a else {
                    return Err(fail("antecedent is not a disjunction"));
                };
                let left = Formula::implies((**x).clone(), (**c).clone());
                let right = Formula::implies((**y).clone(), (**c).clone());
                expect_premises(vec![Sequent {
                    assumptions: swap(&p, &[left, right]),
                    goal: goal.clone(),
                }])?;
            }
            "implication-antecedent-left" => {
                let p = principal()?.clone();
                let Formula::Impl(a, c) = &p else {
                    return Err(fail("principal formula is not an implication"));
                };
                let Formula::Impl(_, y) = &**a else {
                    return Err(fail("antecedent is not an implication"));
                };
                let unroll = Formula::implies((**y).clone(), (**c).clone());
                expect_premises(vec![
                    Sequent { assumptions: swap(&p, &[unroll]), goal: (**a).clone() },
                    Sequent { assumptions: swap(&p, &[(**c).clone()]), goal: goal.clone() },
                ])?;
            }
            other => return Err(fail(&format!("unknown rule `{other}`"))),
        }
        for premise in &self.premises {
            premise.check()?;
        }
        Ok(())
    }
}

/// Decides the sequent with the independent calculus, returning a proof
/// tree on success.
pub fn oracle_prove(s: &Sequent) -> (bool, Option<SequentProof>) {
    let mut oracle = Oracle::new();
    match oracle.proof(&s.assumptions, &s.goal) {
        Some(proof) => (true, Some(proof)),
        None => (false, None),
    }
}

/// Clause-level derivability asked of a system with schematic clauses
/// still in it; instantiate first.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("clause system still contains schematic clauses; instantiate it first")]
pub struct SchematicsRemain;

/// Decides whether `goal` is derivable from the concrete clauses of
/// `system` under atomic hypotheses, by running the rule engine on the
/// clauses read as rules.
pub fn clause_derives(
    system: &ClauseSystem,
    hypotheses: &BTreeSet<Atom>,
    goal: &Atom,
) -> Result<(bool, Option<Derivation>), SchematicsRemain> {
    if !system.schematics.is_empty() {
        return Err(SchematicsRemain);
    }
    let base: Base = system.clauses.iter().map(clause_to_rule).collect();
    Ok(crate::base::derives(&base, hypotheses, goal))
}

/// Why [`decide_goal`] rejected a query.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    Schematics(#[from] SchematicsRemain),
    #[error(transparent)]
    OutsideFragment(#[from] ClauseShapeError),
}

/// Decides goals in the conjunction-implication fragment over a clause
/// system: conjunction goals split, implication goals move their
/// antecedent conjuncts into the system as clauses, and atomic goals run
/// the clause engine.
pub fn decide_goal(
    system: &ClauseSystem,
    hypotheses: &BTreeSet<Atom>,
    goal: &Formula,
) -> Result<bool, DecideError> {
    check_goal_shape(goal)?;
    decide_checked(system.clone(), hypotheses, goal)
}

fn check_goal_shape(goal: &Formula) -> Result<(), ClauseShapeError> {
    match goal {
        Formula::Atomic(_) => Ok(()),
        Formula::Conj(l, r) => {
            check_goal_shape(l)?;
            check_goal_shape(r)
        }
        Formula::Impl(l, r) => {
            for item in conjuncts(l) {
                formula_to_clause(item)?;
            }
            check_goal_shape(r)
        }
        other => Err(ClauseShapeError::NotClausal { formula: other.to_string() }),
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

fn decide_checked(
    system: ClauseSystem,
    hypotheses: &BTreeSet<Atom>,
    goal: &Formula,
) -> Result<bool, DecideError> {
    match goal {
        Formula::Atomic(a) => Ok(clause_derives(&system, hypotheses, a)?.0),
        Formula::Conj(l, r) => Ok(decide_checked(system.clone(), hypotheses, l)?
            && decide_checked(system, hypotheses, r)?),
        Formula::Impl(l, r) => {
            let mut extended = system;
            for item in conjuncts(l) {
                let clause = formula_to_clause(item).expect("goal shape was checked");
                extended.insert(clause);
            }
            decide_checked(extended, hypotheses, r)
        }
        _ => unreachable!("goal shape was checked"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clauses::{instantiate_system, mints_system, modified_system, GeneralClause};
    use crate::syntax::parse_formula;

    fn parse(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn atom(name: &str) -> Atom {
        Atom::new(name).unwrap()
    }

    fn provable(s: &str) -> bool {
        oracle_prove(&Sequent::new([], parse(s))).0
    }

    #[test]
    fn oracle_accepts_intuitionistic_validities() {
        for text in [
            "p -> p",
            "bot -> p",
            "p /\\ q -> p",
            "~~(p \\/ ~p)",
            "((p \\/ q) -> r) -> (p -> r)",
            "(p -> q) -> (q -> r) -> p -> r",
            "p -> ~~p",
            "~~~p -> ~p",
        ] {
            assert!(provable(text), "rejected {text}");
        }
    }

    #[test]
    fn oracle_rejects_classical_only_principles() {
        for text in [
            "p \\/ ~p",
            "~~p -> p",
            "((p -> q) -> p) -> p",
            "(p -> q) \\/ (q -> p)",
            "~(p /\\ q) -> ~p \\/ ~q",
            "p",
            "bot",
        ] {
            assert!(!provable(text), "accepted {text}");
        }
    }

    #[test]
    fn oracle_uses_assumptions() {
        let s = Sequent::new([parse("p"), parse("p -> q")], parse("q"));
        let (ok, proof) = oracle_prove(&s);
        assert!(ok);
        let proof = proof.unwrap();
        proof.check().unwrap();
        assert_eq!(proof.sequent, s);
    }

    #[test]
    fn oracle_proofs_check_and_render() {
        let s = Sequent::new([], parse("((p \\/ q) -> r) -> (p -> r)"));
        let (ok, proof) = oracle_prove(&s);
        assert!(ok);
        let proof = proof.unwrap();
        proof.check().unwrap();
        let trace = proof.to_trace();
        assert!(trace.judgment.contains("|- (p \\/ q -> r) -> p -> r"));
        assert!(trace.to_json().contains("\"rule\""));
    }

    #[test]
    fn proof_checker_rejects_tampered_trees() {
        let s = Sequent::new([], parse("p -> p"));
        let (_, proof) = oracle_prove(&s);
        let mut proof = proof.unwrap();
        proof.premises.clear();
        assert!(proof.check().is_err());
    }

    #[test]
    fn oracle_detaches_nested_implications() {
        // Provable only through analyzing an implication antecedent.
        assert!(provable("((p -> p) -> q) -> q"));
        assert!(!provable("((p -> q) -> q) -> q"));
    }

    #[test]
    fn clause_engine_matches_reading_clauses_as_rules() {
        let (system, goal) = mints_system(&parse("a /\\ b")).unwrap();
        let (no_hyps, _) = clause_derives(&system, &BTreeSet::new(), &goal).unwrap();
        assert!(!no_hyps);
        let hyps: BTreeSet<Atom> = [atom("a"), atom("b")].into();
        let (with_hyps, witness) = clause_derives(&system, &hyps, &goal).unwrap();
        assert!(with_hyps);
        assert!(witness.is_some());
    }

    #[test]
    fn clause_engine_requires_concrete_systems() {
        let system = modified_system(&parse("a \\/ b")).unwrap();
        assert_eq!(
            clause_derives(&system, &BTreeSet::new(), &atom("a")),
            Err(SchematicsRemain)
        );
    }

    #[test]
    fn goal_decisions_split_conjunctions_and_absorb_antecedents() {
        let disj = parse("a \\/ b");
        let map_universe = [atom("a"), atom("b"), atom("g"), Atom::internal("#1".into())];
        let system = instantiate_system(&modified_system(&disj).unwrap(), &map_universe).unwrap();
        let mut with_disj = system.clone();
        with_disj.insert(GeneralClause::bare(Atom::internal("#1".into())));
        let goal = parse("(a -> g) /\\ (b -> g) -> g");
        assert!(decide_goal(&with_disj, &BTreeSet::new(), &goal).unwrap());
        assert!(!decide_goal(&system, &BTreeSet::new(), &goal).unwrap());
    }

    #[test]
    fn goal_decisions_reject_foreign_shapes() {
        let (system, _) = mints_system(&parse("a /\\ b")).unwrap();
        for bad in ["a \\/ b", "a -> b \\/ c", "bot", "(a \\/ b) -> c"] {
            assert!(
                decide_goal(&system, &BTreeSet::new(), &parse(bad)).is_err(),
                "accepted {bad}"
            );
        }
    }

    #[test]
    fn goal_decisions_agree_with_the_oracle() {
        let (system, _) = mints_system(&parse("a /\\ b")).unwrap();
        let goal = parse("(a -> g) /\\ ((g -> a) -> g) -> g");
        let verdict = decide_goal(&system, &BTreeSet::new(), &goal).unwrap();
        let mut assumptions: Vec<Formula> =
            system.clauses.iter().map(GeneralClause::as_formula).collect();
        assumptions.sort();
        let oracle = oracle_prove(&Sequent::new(assumptions, goal)).0;
        assert_eq!(verdict, oracle);
    }
}
