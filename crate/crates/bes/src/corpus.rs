//! Formula corpora for the differential suites: a curated list with
//! hand-checked statuses and a seeded random generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{parse_formula, Atom, Formula};

/// A formula with its known validity status.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CuratedEntry {
    pub formula: Formula,
    pub valid: bool,
}

const CURATED: &str = include_str!("../data/curated.txt");

/// The built-in corpus of formulas with hand-checked statuses.
pub fn curated() -> Vec<CuratedEntry> {
    CURATED
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(|line| {
            let (status, text) = line.split_once(' ').expect("a status and a formula per line");
            let valid = match status {
                "valid" => true,
                "invalid" => false,
                other => panic!("unknown curated status `{other}`"),
            };
            CuratedEntry {
                formula: parse_formula(text).expect("curated entries parse"),
                valid,
            }
        })
        .collect()
}

/// `count` random formulas with at most `max_size` connectives over
/// `atoms` atom names, deterministically derived from `seed`.
pub fn random_formulas(seed: u64, count: usize, max_size: usize, atoms: usize) -> Vec<Formula> {
    assert!(atoms >= 1, "at least one atom name is required");
    let names: Vec<Atom> = (0..atoms)
        .map(|i| Atom::new(&atom_name(i)).expect("generated names are valid"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(0..=max_size);
            random_formula(&mut rng, &names, size)
        })
        .collect()
}

fn atom_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("a{i}")
    }
}

fn random_formula(rng: &mut ChaCha8Rng, names: &[Atom], size: usize) -> Formula {
    if size == 0 {
        return if rng.gen_range(0..8) == 0 {
            Formula::Absurd
        } else {
            Formula::atom(names[rng.gen_range(0..names.len())].clone())
        };
    }
    let connective = rng.gen_range(0..3);
    let left = rng.gen_range(0..size);
    let right = size - 1 - left;
    let l = random_formula(rng, names, left);
    let r = random_formula(rng, names, right);
    match connective {
        0 => Formula::conj(l, r),
        1 => Formula::disj(l, r),
        _ => Formula::implies(l, r),
    }
}
