//! Seeded instance generators: stage colourings in each stability class,
//! limit functions whose values code sets of prescribed shapes, trees and
//! tournaments. Deterministic for a fixed seed.

use crate::codec::{pair, set_encode, sized_encode};
use crate::coloring::{StageColoring, Tournament};
use crate::error::{Error, Result};
use crate::oracles::LimitFunction;
use crate::tree::{split_tree, DyadicTree};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stability classes the colouring generator produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColoringClass {
    /// Every point below the bound is paired; pairs share a fresh colour at
    /// every stage. Strongly rainbow-stable.
    Married,
    /// Every point gets a fresh colour at every stage. Rainbow-stable, no
    /// partners.
    Monk,
    /// A random matching below `pair_bound`; the rest are monks. Weakly
    /// rainbow-stable.
    Mixed,
    /// Colours drawn at random from a small palette; typically no stability.
    Drifting,
}

impl ColoringClass {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "married" => Some(Self::Married),
            "monk" => Some(Self::Monk),
            "mixed" => Some(Self::Mixed),
            "drifting" => Some(Self::Drifting),
            _ => None,
        }
    }
}

/// A random partner involution: `Married` pairs everything (domain rounded
/// down to even), `Mixed` pairs a random subset below `pair_bound`.
pub fn random_matching(
    seed: u64,
    domain: u64,
    pair_bound: u64,
    total: bool,
) -> HashMap<u64, u64> {
    let mut r = rng(seed);
    let mut pts: Vec<u64> = (0..pair_bound.min(domain)).collect();
    pts.shuffle(&mut r);
    let mut partner = HashMap::new();
    for c in pts.chunks(2) {
        if c.len() == 2 && (total || r.gen_bool(0.7)) {
            partner.insert(c[0], c[1]);
            partner.insert(c[1], c[0]);
        }
    }
    partner
}

/// Pair colouring in the requested stability class. `window` is the tail
/// width the classifier will be run with: partners are kept below the window
/// start so the class is visible there.
pub fn gen_coloring(class: ColoringClass, domain: u64, window: u64, seed: u64) -> StageColoring {
    let start = domain.saturating_sub(window);
    match class {
        ColoringClass::Married => {
            let partner = random_matching(seed, domain, start & !1, true);
            coloring_from_matching(domain, &partner)
        }
        ColoringClass::Monk => {
            StageColoring::from_fn(2, domain, |t| 2 * pair(t[0], t[1]) + 1)
        }
        ColoringClass::Mixed => {
            let partner = random_matching(seed, domain, (start / 2) & !1, false);
            coloring_from_matching(domain, &partner)
        }
        ColoringClass::Drifting => {
            let mut r = rng(seed);
            let palette = domain.max(4);
            StageColoring::from_fn(2, domain, |_| r.gen_range(0..palette))
        }
    }
}

/// Mixed-class colouring whose married pairs all sit below `pair_bound`:
/// the shape the forcing harness plants.
pub fn gen_mixed_with_pairs_below(
    domain: u64,
    pair_bound: u64,
    seed: u64,
) -> (StageColoring, Vec<(u64, u64)>) {
    let partner = random_matching(seed, domain, pair_bound & !1, true);
    let f = coloring_from_matching(domain, &partner);
    let mut pairs: Vec<(u64, u64)> = partner
        .iter()
        .filter(|&(&a, &b)| a < b)
        .map(|(&a, &b)| (a, b))
        .collect();
    pairs.sort();
    (f, pairs)
}

/// 2-bounded colouring from a partner involution: partners share
/// `2*pair(min, s)` at every stage, unpaired points get fresh odd colours.
pub fn coloring_from_matching(domain: u64, partner: &HashMap<u64, u64>) -> StageColoring {
    StageColoring::from_fn(2, domain, |t| {
        let (x, s) = (t[0], t[1]);
        match partner.get(&x) {
            Some(&y) if y != s => 2 * pair(x.min(y), s),
            _ => 2 * pair(x, s) + 1,
        }
    })
}

/// Random stable pair colouring: each point draws a limit colour from the
/// palette and shows it at every stage.
pub fn gen_stable_coloring(domain: u64, palette: u64, seed: u64) -> StageColoring {
    let mut r = rng(seed);
    let limit: Vec<u64> = (0..domain).map(|_| r.gen_range(0..palette)).collect();
    StageColoring::from_fn(2, domain, |t| limit[t[0] as usize])
}

/// Limit function with 2-bounded limit values: points are matched and
/// partners share a limit value; approximations permute the values before
/// the stabilization stage.
pub fn gen_two_bounded_limit(
    arg_bound: u64,
    stage_bound: u64,
    stab_stage: u64,
    seed: u64,
) -> LimitFunction {
    let mut r = rng(seed);
    let partner = random_matching(r.gen(), arg_bound, arg_bound & !1, true);
    let limit: Vec<u64> = (0..arg_bound)
        .map(|x| partner.get(&x).map_or(x, |&y| x.min(y)))
        .collect();
    let mut table = vec![0u64; (arg_bound * stage_bound) as usize];
    for x in 0..arg_bound {
        for s in 0..stage_bound {
            table[(x * stage_bound + s) as usize] = if s < stab_stage {
                limit[r.gen_range(0..arg_bound) as usize]
            } else {
                limit[x as usize]
            };
        }
    }
    LimitFunction::new(arg_bound, stage_bound, table).expect("table is total")
}

fn random_sized_set(
    r: &mut ChaCha8Rng,
    size: usize,
    min_value: u64,
    bound: u64,
    taken: &BTreeSet<u64>,
) -> BTreeSet<u64> {
    let mut candidates: Vec<u64> = (min_value..bound).filter(|x| !taken.contains(x)).collect();
    candidates.shuffle(r);
    candidates.into_iter().take(size).collect()
}

/// Limit function whose value at `e` codes a set from the sized family
/// `(size(e), min(e))`, with all the limit sets pairwise disjoint and their
/// elements below `element_bound`. Approximations before the stabilization
/// stage show other (also valid, also disjoint per stage) sets.
pub fn gen_sized_set_limit(
    arg_bound: u64,
    stage_bound: u64,
    stab_stage: u64,
    element_bound: u64,
    size: impl Fn(u64) -> usize,
    min_value: impl Fn(u64) -> u64,
    seed: u64,
) -> Result<(LimitFunction, Vec<BTreeSet<u64>>)> {
    let mut r = rng(seed);
    let total: usize = (0..arg_bound).map(|e| size(e)).sum();
    if (total as u64) > element_bound {
        return Err(Error::Instance(format!(
            "cannot fit {total} disjoint elements below {element_bound}"
        )));
    }
    let draw_stage = |r: &mut ChaCha8Rng| -> Result<Vec<BTreeSet<u64>>> {
        let mut taken = BTreeSet::new();
        let mut sets = Vec::new();
        for e in 0..arg_bound {
            let s = random_sized_set(r, size(e), min_value(e), element_bound, &taken);
            if s.len() < size(e) {
                return Err(Error::Instance(format!(
                    "requirement {e} could not draw {} disjoint elements in [{}, {element_bound})",
                    size(e),
                    min_value(e)
                )));
            }
            taken.extend(s.iter().copied());
            sets.push(s);
        }
        Ok(sets)
    };
    let limits = draw_stage(&mut r)?;
    let mut table = vec![0u64; (arg_bound * stage_bound) as usize];
    for s in 0..stage_bound {
        let stage_sets = if s < stab_stage { draw_stage(&mut r)? } else { limits.clone() };
        for e in 0..arg_bound {
            table[(e * stage_bound + s) as usize] =
                sized_encode(&stage_sets[e as usize], size(e), min_value(e))?;
        }
    }
    Ok((LimitFunction::new(arg_bound, stage_bound, table)?, limits))
}

/// Limit function whose value at `x` bit-codes a set; sizes alternate between
/// "large enough to act on" (3x + 2) and smaller, elements below
/// `element_bound`. Stabilizes by `stab_stage`.
pub fn gen_bit_set_limit(
    arg_bound: u64,
    stage_bound: u64,
    stab_stage: u64,
    element_bound: u64,
    seed: u64,
) -> Result<LimitFunction> {
    let mut r = rng(seed);
    let draw = |r: &mut ChaCha8Rng, x: u64| -> Result<u64> {
        let large = r.gen_bool(0.6);
        let want = if large { 3 * x as usize + 2 } else { r.gen_range(0..=(x as usize + 1)) };
        let set = random_sized_set(r, want, 0, element_bound, &BTreeSet::new());
        set_encode(&set)
    };
    let limits: Vec<u64> = (0..arg_bound)
        .map(|x| draw(&mut r, x))
        .collect::<Result<_>>()?;
    let mut table = vec![0u64; (arg_bound * stage_bound) as usize];
    for x in 0..arg_bound {
        for s in 0..stage_bound {
            table[(x * stage_bound + s) as usize] = if s < stab_stage {
                draw(&mut r, x)?
            } else {
                limits[x as usize]
            };
        }
    }
    Ok(LimitFunction::new(arg_bound, stage_bound, table)?)
}

/// Limit function with uniformly random small values, stabilizing by the
/// given stage.
pub fn gen_small_value_limit(
    arg_bound: u64,
    stage_bound: u64,
    stab_stage: u64,
    value_bound: u64,
    seed: u64,
) -> LimitFunction {
    let mut r = rng(seed);
    let limits: Vec<u64> = (0..arg_bound).map(|_| r.gen_range(0..value_bound)).collect();
    let mut table = vec![0u64; (arg_bound * stage_bound) as usize];
    for x in 0..arg_bound {
        for s in 0..stage_bound {
            table[(x * stage_bound + s) as usize] = if s < stab_stage {
                r.gen_range(0..value_bound)
            } else {
                limits[x as usize]
            };
        }
    }
    LimitFunction::new(arg_bound, stage_bound, table).expect("table is total")
}

/// Split-pattern tree of a random set of the given size.
pub fn gen_split_tree(depth: u32, set_size: usize, seed: u64) -> (DyadicTree, BTreeSet<u64>) {
    let mut r = rng(seed);
    let d = random_sized_set(&mut r, set_size, 0, depth as u64, &BTreeSet::new());
    (split_tree(&d, depth), d)
}

/// Tree obtained from the full tree by dropping each leaf independently with
/// the given probability (never below one leaf).
pub fn gen_random_tree(depth: u32, drop_prob: f64, seed: u64) -> DyadicTree {
    let mut r = rng(seed);
    let mut leaves: BTreeSet<u64> = (0..(1u64 << depth))
        .filter(|_| !r.gen_bool(drop_prob))
        .collect();
    if leaves.is_empty() {
        leaves.insert(0);
    }
    DyadicTree::new(depth, leaves)
}

/// Uniformly random tournament.
pub fn gen_tournament(domain: u64, seed: u64) -> Tournament {
    let mut r = rng(seed);
    let pairs = (domain * domain.saturating_sub(1) / 2) as usize;
    Tournament::from_bits(domain, (0..pairs).map(|_| r.gen_bool(0.5)).collect())
        .expect("bit count matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{check_k_bounded, classify_stability, TailWindow};

    #[test]
    fn coloring_classes_land_where_the_classifier_says() {
        let w = TailWindow::new(8);
        for seed in 0..5 {
            let married = gen_coloring(ColoringClass::Married, 40, 8, seed);
            let flags = classify_stability(&married, w);
            assert!(flags.strongly_rainbow_stable, "seed {seed}: {flags:?}");
            assert!(check_k_bounded(&married, 2).is_ok());

            let monk = gen_coloring(ColoringClass::Monk, 40, 8, seed);
            let flags = classify_stability(&monk, w);
            assert!(flags.rainbow_stable && !flags.strongly_rainbow_stable);

            let mixed = gen_coloring(ColoringClass::Mixed, 40, 8, seed);
            let flags = classify_stability(&mixed, w);
            assert!(flags.weakly_rainbow_stable, "seed {seed}: {flags:?}");
            assert!(check_k_bounded(&mixed, 2).is_ok());
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            gen_coloring(ColoringClass::Mixed, 30, 6, 7),
            gen_coloring(ColoringClass::Mixed, 30, 6, 7)
        );
        assert_eq!(gen_random_tree(10, 0.3, 3), gen_random_tree(10, 0.3, 3));
        let a = gen_two_bounded_limit(12, 12, 4, 5);
        let b = gen_two_bounded_limit(12, 12, 4, 5);
        assert_eq!(a.table(), b.table());
    }

    #[test]
    fn two_bounded_limit_stabilizes_and_is_two_bounded() {
        let h = gen_two_bounded_limit(12, 14, 5, 11);
        assert!(h.stabilization_bound() <= 5);
        let mut counts = HashMap::new();
        for x in 0..12 {
            *counts.entry(h.limit_value(x)).or_insert(0) += 1;
        }
        assert!(counts.values().all(|&c| c <= 2));
    }

    #[test]
    fn sized_set_limits_are_disjoint_and_shaped() {
        let (h, limits) = gen_sized_set_limit(
            3,
            130,
            90,
            100,
            |e| crate::dnc::em_size(e),
            |_| 0,
            42,
        )
        .unwrap();
        assert!(h.stabilization_bound() <= 90);
        let mut all = BTreeSet::new();
        for (e, set) in limits.iter().enumerate() {
            assert_eq!(set.len(), crate::dnc::em_size(e as u64));
            assert!(set.iter().all(|x| all.insert(*x)), "overlap at {e}");
        }
    }

    #[test]
    fn mixed_with_low_pairs_stays_below_the_bound() {
        let (f, pairs) = gen_mixed_with_pairs_below(40, 20, 9);
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|&(a, b)| a < 20 && b < 20));
        let flags = classify_stability(&f, TailWindow::new(8));
        assert!(flags.weakly_rainbow_stable);
    }
}
