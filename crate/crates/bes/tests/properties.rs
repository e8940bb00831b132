//! Randomized laws of the library surface: grammar round-trips, measure
//! and subformula algebra, translation invariants, certificate replay,
//! and the semantic coherence of the decision procedure against the
//! rule engine, the sequent prover, and the bounded evaluator.

use std::collections::BTreeSet;

use proptest::prelude::*;

use bes::base::DerivEngine;
use bes::prover::Oracle;
use bes::syntax::bot_normalized;
use bes::{
    bounded_eval, clause_derives, clause_to_rule, derives, flatten, kripke_refute, normalize_bot,
    oracle_prove, parse_formula, print_formula, rule_to_clause, subformulas, support_atomic,
    supports, supports_padded, valid, weight, Atom, AtomicRule, Base, BoundedEvaluator, Bounds,
    ClauseSystem, Context, Formula, GeneralClause, PremiseDepth, RulePremise, Sequent,
    SupportQuery,
};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn atom_strategy() -> impl Strategy<Value = Atom> {
    proptest::sample::select(&NAMES[..]).prop_map(|name| Atom::new(name).expect("names are valid"))
}

fn formula_strategy(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        5 => atom_strategy().prop_map(Formula::atom),
        1 => Just(Formula::Absurd),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::conj(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::disj(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::implies(l, r)),
        ]
    })
}

fn premise_strategy() -> impl Strategy<Value = RulePremise> {
    (proptest::collection::btree_set(atom_strategy(), 0..=2), atom_strategy())
        .prop_map(|(hypotheses, head)| RulePremise::new(hypotheses, head))
}

fn rule_strategy() -> impl Strategy<Value = AtomicRule> {
    (proptest::collection::vec(premise_strategy(), 0..=2), atom_strategy())
        .prop_map(|(premises, conclusion)| AtomicRule::new(premises, conclusion))
}

fn base_strategy(max_rules: usize) -> impl Strategy<Value = Base> {
    proptest::collection::vec(rule_strategy(), 0..=max_rules).prop_map(|rules| {
        let mut base = Base::new();
        for rule in rules {
            base.insert(rule);
        }
        base
    })
}

fn clause_strategy() -> impl Strategy<Value = GeneralClause> {
    (proptest::collection::vec(premise_strategy(), 0..=3), atom_strategy())
        .prop_map(|(premises, conclusion)| GeneralClause::new(premises, conclusion))
}

fn system_strategy(max_clauses: usize) -> impl Strategy<Value = ClauseSystem> {
    proptest::collection::vec(clause_strategy(), 0..=max_clauses).prop_map(|clauses| {
        let mut system = ClauseSystem::new();
        for clause in clauses {
            system.insert(clause);
        }
        system
    })
}

fn assumptions_strategy() -> impl Strategy<Value = BTreeSet<Atom>> {
    proptest::collection::btree_set(atom_strategy(), 0..=2)
}

proptest! {
    #[test]
    fn printed_formulas_parse_back(f in formula_strategy(4)) {
        let printed = print_formula(&f);
        prop_assert_eq!(&parse_formula(&printed).expect("printed formulas parse"), &f);
        prop_assert_eq!(f.to_string(), printed);
    }

    #[test]
    fn weight_adds_one_per_connective(l in formula_strategy(3), r in formula_strategy(3)) {
        let (wl, wr) = (weight(&l), weight(&r));
        prop_assert_eq!(weight(&Formula::conj(l.clone(), r.clone())), wl + wr + 1);
        prop_assert_eq!(weight(&Formula::disj(l.clone(), r.clone())), wl + wr + 1);
        prop_assert_eq!(weight(&Formula::implies(l, r)), wl + wr + 1);
    }

    #[test]
    fn subformulas_list_children_before_parents(f in formula_strategy(4)) {
        let subs = subformulas(&f);
        prop_assert_eq!(subs.last(), Some(&f));
        let distinct: BTreeSet<&Formula> = subs.iter().collect();
        prop_assert_eq!(distinct.len(), subs.len());
        let position =
            |g: &Formula| subs.iter().position(|s| s == g).expect("operands are listed");
        for (i, sub) in subs.iter().enumerate() {
            if let Formula::Conj(l, r) | Formula::Disj(l, r) | Formula::Impl(l, r) = sub {
                prop_assert!(position(l) < i);
                prop_assert!(position(r) < i);
            }
        }
    }

    #[test]
    fn rules_and_clauses_biject(rule in rule_strategy(), clause in clause_strategy()) {
        prop_assert_eq!(&clause_to_rule(&rule_to_clause(&rule)), &rule);
        prop_assert_eq!(&rule_to_clause(&clause_to_rule(&clause)), &clause);
    }

    #[test]
    fn flattening_names_subformulas_injectively(f in formula_strategy(4)) {
        let normalized = normalize_bot(&f);
        let map = flatten(&normalized).expect("normalized formulas flatten");
        for sub in subformulas(&normalized) {
            prop_assert!(map.flat(&sub).is_some(), "unnamed subformula `{}`", sub);
        }
        let mut names = BTreeSet::new();
        for (sub, name) in map.entries() {
            prop_assert!(names.insert(name.clone()), "name `{name}` reused");
            if let Formula::Atomic(a) = sub {
                prop_assert_eq!(name, a, "atoms must name themselves");
            }
        }
    }

    #[test]
    fn derivability_is_monotone_in_the_base(
        base in base_strategy(3),
        extra in proptest::collection::vec(rule_strategy(), 0..=2),
        assumptions in assumptions_strategy(),
        goal in atom_strategy(),
    ) {
        if derives(&base, &assumptions, &goal).0 {
            let mut bigger = base;
            for rule in extra {
                bigger.insert(rule);
            }
            prop_assert!(derives(&bigger, &assumptions, &goal).0);
        }
    }

    #[test]
    fn derivation_certificates_replay(
        base in base_strategy(3),
        assumptions in assumptions_strategy(),
        goal in atom_strategy(),
    ) {
        let (derived, certificate) = derives(&base, &assumptions, &goal);
        prop_assert_eq!(derived, certificate.is_some());
        if let Some(derivation) = certificate {
            prop_assert!(derivation.replay(&base, &assumptions, &goal).is_ok());
        }
    }

    #[test]
    fn engine_matches_prover_on_small_bases(
        base in base_strategy(3),
        assumptions in assumptions_strategy(),
        goal in atom_strategy(),
    ) {
        let derived = DerivEngine::new(&base).derivable(&assumptions, &goal);
        let context: Vec<Formula> = base
            .rules
            .iter()
            .map(|r| rule_to_clause(r).as_formula())
            .chain(assumptions.iter().cloned().map(Formula::atom))
            .collect();
        let proved = oracle_prove(&Sequent::new(context, Formula::atom(goal))).0;
        prop_assert_eq!(derived, proved);
    }

    #[test]
    fn derived_atoms_persist_into_extensions(
        system in system_strategy(3),
        extension in system_strategy(2),
        p in atom_strategy(),
        q in atom_strategy(),
    ) {
        let mut with_p = system.clone();
        with_p.insert(GeneralClause::bare(p.clone()));
        let empty = BTreeSet::new();
        let chained = clause_derives(&with_p, &empty, &q).expect("concrete").0;
        if chained {
            let bigger = system.union(&extension);
            if clause_derives(&bigger, &empty, &p).expect("concrete").0 {
                prop_assert!(clause_derives(&bigger, &empty, &q).expect("concrete").0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normalization_is_idempotent_and_equivalent(f in formula_strategy(3)) {
        let normalized = normalize_bot(&f);
        prop_assert!(bot_normalized(&normalized));
        prop_assert_eq!(&normalize_bot(&normalized), &normalized);
        let mut oracle = Oracle::new();
        prop_assert!(
            oracle.prove(&Context::new(), &Formula::implies(f.clone(), normalized.clone()))
        );
        prop_assert!(oracle.prove(&Context::new(), &Formula::implies(normalized, f)));
    }

    #[test]
    fn validity_matches_the_prover(f in formula_strategy(3)) {
        let decided = valid(&Context::new(), &f);
        let proved = oracle_prove(&Sequent::new([], f)).0;
        prop_assert_eq!(decided, proved);
    }

    #[test]
    fn countermodels_and_proofs_exclude_each_other(f in formula_strategy(3)) {
        let (proved, proof) = oracle_prove(&Sequent::new([], f.clone()));
        if let Some(proof) = proof {
            prop_assert!(proof.check().is_ok());
        }
        match kripke_refute(&f, 3) {
            Some(model) => {
                prop_assert!(model.validate().is_ok());
                prop_assert!(!model.satisfies(&f));
                prop_assert!(!proved, "`{f}` was both proved and refuted");
            }
            None => {
                // The refuter is bounded: absence of a small countermodel
                // decides nothing on its own.
            }
        }
    }

    #[test]
    fn support_is_monotone_under_base_extension(
        base in base_strategy(2),
        extra in proptest::collection::vec(rule_strategy(), 0..=2),
        f in formula_strategy(3),
    ) {
        let query =
            SupportQuery { base: base.clone(), context: Context::new(), formula: f.clone() };
        if supports(&query).verdict {
            let mut bigger = base;
            for rule in extra {
                bigger.insert(rule);
            }
            let big = SupportQuery { base: bigger, context: Context::new(), formula: f };
            prop_assert!(supports(&big).verdict);
        }
    }

    #[test]
    fn padding_never_changes_verdicts(
        base in base_strategy(2),
        f in formula_strategy(3),
        extra in 1usize..=3,
    ) {
        let query = SupportQuery { base, context: Context::new(), formula: f };
        let bare = supports(&query);
        let padded = supports_padded(&query, extra);
        prop_assert_eq!(bare.verdict, padded.verdict);
        prop_assert_eq!(padded.universe.len(), bare.universe.len() + extra);
    }

    #[test]
    fn support_decomposes_by_connective(
        base in base_strategy(2),
        l in formula_strategy(2),
        r in formula_strategy(2),
    ) {
        let sup = |formula: Formula, context: Context| {
            supports(&SupportQuery { base: base.clone(), context, formula }).verdict
        };
        let both = sup(Formula::conj(l.clone(), r.clone()), Context::new());
        prop_assert_eq!(
            both,
            sup(l.clone(), Context::new()) && sup(r.clone(), Context::new())
        );
        let arrow = sup(Formula::implies(l.clone(), r.clone()), Context::new());
        let hypothesis: Context = [l.clone()].into_iter().collect();
        prop_assert_eq!(arrow, sup(r.clone(), hypothesis));
        if sup(l.clone(), Context::new()) {
            prop_assert!(sup(Formula::disj(l, r), Context::new()));
        }
    }

    #[test]
    fn atomic_support_is_derivability(
        base in base_strategy(3),
        assumptions in assumptions_strategy(),
        goal in atom_strategy(),
    ) {
        let context: Context = assumptions.iter().cloned().map(Formula::atom).collect();
        let query =
            SupportQuery { base: base.clone(), context, formula: Formula::atom(goal.clone()) };
        let result = supports(&query);
        prop_assert_eq!(result.verdict, support_atomic(&base, &assumptions, &goal));
        if let Some(certificate) = &result.certificate {
            let translated: Base = result.system.clauses.iter().map(clause_to_rule).collect();
            prop_assert!(
                certificate.replay(&translated, &result.hypotheses, &result.goal).is_ok()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounded_literal_matches_the_engine(
        base in base_strategy(2),
        assumptions in assumptions_strategy(),
        goal in atom_strategy(),
    ) {
        let mut universe: BTreeSet<Atom> =
            NAMES.iter().map(|n| Atom::new(n).expect("valid")).collect();
        universe.insert(Atom::new("pad").expect("valid"));
        let bounds = Bounds {
            atom_universe: universe,
            max_rules: 2,
            max_premises: 1,
            premise_depth: PremiseDepth::Hypothetical,
        };
        let mut evaluator =
            BoundedEvaluator::new(&base, &bounds).expect("small bases fit the caps");
        evaluator.set_literal_atomic(true);
        let context: Context = assumptions.iter().cloned().map(Formula::atom).collect();
        let bounded = evaluator
            .eval(&context, &Formula::atom(goal.clone()))
            .expect("atomic queries stay in bounds");
        prop_assert_eq!(bounded, derives(&base, &assumptions, &goal).0);
    }

    #[test]
    fn bounded_default_mode_agrees_on_atomic_queries(
        base in base_strategy(2),
        goal in atom_strategy(),
    ) {
        let mut universe: BTreeSet<Atom> =
            NAMES.iter().map(|n| Atom::new(n).expect("valid")).collect();
        universe.insert(Atom::new("pad").expect("valid"));
        let bounds = Bounds {
            atom_universe: universe,
            max_rules: 2,
            max_premises: 1,
            premise_depth: PremiseDepth::Hypothetical,
        };
        let query = SupportQuery {
            base: base.clone(),
            context: Context::new(),
            formula: Formula::atom(goal.clone()),
        };
        let bounded = bounded_eval(&query, &bounds).expect("atomic queries stay in bounds");
        prop_assert_eq!(bounded, supports(&query).verdict);
    }
}
