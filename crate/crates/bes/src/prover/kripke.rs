//! Finite Kripke countermodel search for intuitionistically refutable
//! formulas. Models double as independently checkable certificates of
//! invalidity: [`KripkeModel::validate`] re-checks the frame conditions
//! and [`KripkeModel::forces`] replays the semantics.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Atom, Formula};

/// Any search over more worlds than this would never finish; the bound
/// keeps the relation masks inside one machine word.
pub const MAX_ENUMERATED_WORLDS: usize = 6;

/// A finite rooted Kripke model for intuitionistic propositional logic.
///
/// `order[i][j]` holds when world `j` refines world `i` (every world
/// refines itself). Valuations must be monotone along the order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct KripkeModel {
    pub worlds: usize,
    pub root: usize,
    pub order: Vec<Vec<bool>>,
    pub valuation: Vec<BTreeSet<Atom>>,
}

/// A structural defect found by [`KripkeModel::validate`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("shape mismatch: order and valuation must both cover {expected} worlds")]
    Shape { expected: usize },
    #[error("root {root} is out of range")]
    RootRange { root: usize },
    #[error("world {world} does not refine itself")]
    NotReflexive { world: usize },
    #[error("order is not transitive at {lower} <= {mid} <= {upper}")]
    NotTransitive { lower: usize, mid: usize, upper: usize },
    #[error("worlds {a} and {b} refine each other")]
    NotAntisymmetric { a: usize, b: usize },
    #[error("world {world} is not reachable from the root")]
    Unreachable { world: usize },
    #[error("atom `{atom}` is forced at world {lower} but not at its refinement {upper}")]
    NotMonotone { lower: usize, upper: usize, atom: Atom },
}

impl KripkeModel {
    /// Checks that the model is a genuine rooted intuitionistic frame:
    /// the order is a partial order, every world refines the root, and
    /// the valuation is monotone.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.worlds;
        if self.order.len() != n
            || self.order.iter().any(|row| row.len() != n)
            || self.valuation.len() != n
        {
            return Err(ModelError::Shape { expected: n });
        }
        if self.root >= n {
            return Err(ModelError::RootRange { root: self.root });
        }
        for w in 0..n {
            if !self.order[w][w] {
                return Err(ModelError::NotReflexive { world: w });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && self.order[a][b] && self.order[b][a] {
                    return Err(ModelError::NotAntisymmetric { a, b });
                }
                for c in 0..n {
                    if self.order[a][b] && self.order[b][c] && !self.order[a][c] {
                        return Err(ModelError::NotTransitive { lower: a, mid: b, upper: c });
                    }
                }
            }
        }
        for w in 0..n {
            if !self.order[self.root][w] {
                return Err(ModelError::Unreachable { world: w });
            }
        }
        for lower in 0..n {
            for upper in 0..n {
                if !self.order[lower][upper] {
                    continue;
                }
                if let Some(atom) = self.valuation[lower].difference(&self.valuation[upper]).next()
                {
                    return Err(ModelError::NotMonotone {
                        lower,
                        upper,
                        atom: atom.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The forcing relation at a world.
    pub fn forces(&self, world: usize, formula: &Formula) -> bool {
        match formula {
            Formula::Atomic(atom) => self.valuation[world].contains(atom),
            Formula::Absurd => false,
            Formula::Conj(l, r) => self.forces(world, l) && self.forces(world, r),
            Formula::Disj(l, r) => self.forces(world, l) || self.forces(world, r),
            Formula::Impl(l, r) => (0..self.worlds).all(|v| {
                !self.order[world][v] || !self.forces(v, l) || self.forces(v, r)
            }),
        }
    }

    /// Forcing at the root, i.e. truth in the model.
    pub fn satisfies(&self, formula: &Formula) -> bool {
        self.forces(self.root, formula)
    }
}

/// Searches for the first rooted model with at most `max_worlds` worlds
/// whose root does not force `formula`. The enumeration is fully
/// deterministic: world counts ascend, then relation masks, then
/// valuation masks, so equal inputs always yield the identical model.
///
/// # Panics
///
/// Panics when `max_worlds` exceeds [`MAX_ENUMERATED_WORLDS`].
pub fn kripke_refute(formula: &Formula, max_worlds: usize) -> Option<KripkeModel> {
    assert!(
        max_worlds <= MAX_ENUMERATED_WORLDS,
        "refusing to enumerate models over more than {MAX_ENUMERATED_WORLDS} worlds"
    );
    let atoms: Vec<Atom> = formula.atoms().into_iter().collect();
    let index: BTreeMap<&Atom, usize> =
        atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    for n in 1..=max_worlds {
        if let Some(model) = refute_with_worlds(formula, &atoms, &index, n) {
            model.validate().expect("searched model must be well formed");
            assert!(
                !model.satisfies(formula),
                "searched model must refute the formula on replay"
            );
            return Some(model);
        }
    }
    None
}

fn refute_with_worlds(
    formula: &Formula,
    atoms: &[Atom],
    index: &BTreeMap<&Atom, usize>,
    n: usize,
) -> Option<KripkeModel> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let width = atoms.len();
    for mask in 0u64..1 << pairs.len() {
        let mut order = vec![vec![false; n]; n];
        for w in 0..n {
            order[w][w] = true;
        }
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                order[i][j] = true;
            }
        }
        if !is_rooted_partial_order(&order, n) {
            continue;
        }
        let full = (1u64 << width) - 1;
        for vmask in 0u64..1 << (width * n) {
            let world_mask = |w: usize| vmask >> (w * width) & full;
            let monotone = (0..n).all(|i| {
                (0..n).all(|j| !order[i][j] || world_mask(i) & !world_mask(j) == 0)
            });
            if !monotone {
                continue;
            }
            if !forces_masked(formula, 0, &order, &world_mask, index, n) {
                let valuation = (0..n)
                    .map(|w| {
                        atoms
                            .iter()
                            .enumerate()
                            .filter(|(t, _)| world_mask(w) >> t & 1 == 1)
                            .map(|(_, a)| a.clone())
                            .collect()
                    })
                    .collect();
                return Some(KripkeModel { worlds: n, root: 0, order, valuation });
            }
        }
    }
    None
}

fn is_rooted_partial_order(order: &[Vec<bool>], n: usize) -> bool {
    for a in 0..n {
        if !order[0][a] {
            return false;
        }
        for b in 0..n {
            if a != b && order[a][b] && order[b][a] {
                return false;
            }
            for c in 0..n {
                if order[a][b] && order[b][c] && !order[a][c] {
                    return false;
                }
            }
        }
    }
    true
}

fn forces_masked(
    formula: &Formula,
    world: usize,
    order: &[Vec<bool>],
    world_mask: &impl Fn(usize) -> u64,
    index: &BTreeMap<&Atom, usize>,
    n: usize,
) -> bool {
    match formula {
        Formula::Atomic(atom) => world_mask(world) >> index[atom] & 1 == 1,
        Formula::Absurd => false,
        Formula::Conj(l, r) => {
            forces_masked(l, world, order, world_mask, index, n)
                && forces_masked(r, world, order, world_mask, index, n)
        }
        Formula::Disj(l, r) => {
            forces_masked(l, world, order, world_mask, index, n)
                || forces_masked(r, world, order, world_mask, index, n)
        }
        Formula::Impl(l, r) => (0..n).all(|v| {
            !order[world][v]
                || !forces_masked(l, v, order, world_mask, index, n)
                || forces_masked(r, v, order, world_mask, index, n)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn parse(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn atom(name: &str) -> Atom {
        Atom::new(name).unwrap()
    }

    #[test]
    fn refutes_excluded_middle_with_two_worlds() {
        let model = kripke_refute(&parse("p \\/ ~p"), 3).unwrap();
        assert_eq!(model.worlds, 2);
        assert!(!model.satisfies(&parse("p \\/ ~p")));
    }

    #[test]
    fn refutes_double_negation_elimination_with_two_worlds() {
        let model = kripke_refute(&parse("~~p -> p"), 3).unwrap();
        assert_eq!(model.worlds, 2);
    }

    #[test]
    fn refutes_peirce_with_two_worlds() {
        let model = kripke_refute(&parse("((p -> q) -> p) -> p"), 3).unwrap();
        assert_eq!(model.worlds, 2);
    }

    #[test]
    fn linearity_needs_three_worlds() {
        let formula = parse("(p -> q) \\/ (q -> p)");
        assert!(kripke_refute(&formula, 2).is_none());
        let model = kripke_refute(&formula, 3).unwrap();
        assert_eq!(model.worlds, 3);
    }

    #[test]
    fn valid_formulas_have_no_countermodel() {
        for text in ["p -> p", "bot -> p", "p /\\ q -> p", "~~(p \\/ ~p)"] {
            assert!(kripke_refute(&parse(text), 3).is_none(), "refuted {text}");
        }
    }

    #[test]
    fn atomless_refutables_need_one_world() {
        let model = kripke_refute(&parse("bot"), 3).unwrap();
        assert_eq!(model.worlds, 1);
        assert!(model.valuation[0].is_empty());
    }

    #[test]
    fn search_is_deterministic() {
        let formula = parse("~~p -> p");
        assert_eq!(kripke_refute(&formula, 3), kripke_refute(&formula, 3));
    }

    #[test]
    fn forcing_is_monotone_in_searched_models() {
        let formula = parse("(p -> q) \\/ (q -> p)");
        let model = kripke_refute(&formula, 3).unwrap();
        let p = Formula::atom(atom("p"));
        for lower in 0..model.worlds {
            for upper in 0..model.worlds {
                if model.order[lower][upper] && model.forces(lower, &p) {
                    assert!(model.forces(upper, &p));
                }
            }
        }
    }

    #[test]
    fn validation_rejects_broken_frames() {
        let mut model = kripke_refute(&parse("p \\/ ~p"), 3).unwrap();
        model.valuation[0].insert(atom("p"));
        model.valuation[1].clear();
        assert!(matches!(model.validate(), Err(ModelError::NotMonotone { .. })));

        let loopy = KripkeModel {
            worlds: 2,
            root: 0,
            order: vec![vec![true, true], vec![true, true]],
            valuation: vec![BTreeSet::new(), BTreeSet::new()],
        };
        assert!(matches!(loopy.validate(), Err(ModelError::NotAntisymmetric { .. })));

        let detached = KripkeModel {
            worlds: 2,
            root: 0,
            order: vec![vec![true, false], vec![false, true]],
            valuation: vec![BTreeSet::new(), BTreeSet::new()],
        };
        assert!(matches!(detached.validate(), Err(ModelError::Unreachable { .. })));
    }

    #[test]
    fn double_negation_holds_where_the_atom_does_not() {
        let model = KripkeModel {
            worlds: 2,
            root: 0,
            order: vec![vec![true, true], vec![false, true]],
            valuation: vec![BTreeSet::new(), [atom("p")].into()],
        };
        model.validate().unwrap();
        assert!(model.forces(0, &parse("~~p")));
        assert!(!model.forces(0, &parse("p")));
    }
}
