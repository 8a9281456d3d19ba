//! Budgeted brute-force solution search (rainbows, thin sets, free sets,
//! transitive sub-tournaments, cross-homogeneous pairs), escaping functions
//! over indexed families, and greedy prerainbow-to-rainbow extraction.

use crate::coloring::{
    is_free, is_prerainbow, is_rainbow, rainbow_violation, thin_witness, transitive_violation,
    StageColoring, TailWindow, Tournament,
};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// How a budgeted enumeration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchEnd {
    /// The space was scanned completely.
    Exhaustive,
    /// The node budget ran out; the emitted solutions are a prefix.
    BudgetExhausted,
    /// The solution cap was reached before the space was scanned.
    CapReached,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solutions: Vec<Vec<u64>>,
    pub end: SearchEnd,
    pub nodes: u64,
}

/// Depth-first scan over increasing subsets of `candidates`, pruning with
/// `viable` (which must be monotone: a solution's prefixes are viable) and
/// emitting viable sets of exactly `size` elements, capped by `budget` node
/// expansions and `cap` solutions.
pub fn search_subsets(
    candidates: &[u64],
    size: usize,
    budget: u64,
    cap: usize,
    mut viable: impl FnMut(&[u64]) -> bool,
) -> SearchOutcome {
    let mut solutions = Vec::new();
    let mut nodes: u64 = 0;
    let mut prefix: Vec<u64> = Vec::with_capacity(size);

    fn go(
        candidates: &[u64],
        from: usize,
        size: usize,
        budget: u64,
        cap: usize,
        viable: &mut impl FnMut(&[u64]) -> bool,
        prefix: &mut Vec<u64>,
        solutions: &mut Vec<Vec<u64>>,
        nodes: &mut u64,
    ) -> Option<SearchEnd> {
        if prefix.len() == size {
            solutions.push(prefix.clone());
            if solutions.len() >= cap {
                return Some(SearchEnd::CapReached);
            }
            return None;
        }
        let need = size - prefix.len();
        for i in from..candidates.len() {
            if candidates.len() - i < need {
                break;
            }
            *nodes += 1;
            if *nodes > budget {
                return Some(SearchEnd::BudgetExhausted);
            }
            prefix.push(candidates[i]);
            let ok = viable(prefix);
            if ok {
                if let Some(end) = go(
                    candidates, i + 1, size, budget, cap, viable, prefix, solutions, nodes,
                ) {
                    prefix.pop();
                    return Some(end);
                }
            }
            prefix.pop();
        }
        None
    }

    let end = go(
        candidates, 0, size, budget, cap, &mut viable, &mut prefix, &mut solutions, &mut nodes,
    )
    .unwrap_or(SearchEnd::Exhaustive);
    SearchOutcome { solutions, end, nodes }
}

fn all_points(domain: u64) -> Vec<u64> {
    (0..domain).collect()
}

/// All rainbows of the given size (rainbowness is closed under subsets, so
/// prefix pruning is exact).
pub fn find_rainbows(f: &StageColoring, size: usize, budget: u64, cap: usize) -> SearchOutcome {
    search_subsets(&all_points(f.domain), size, budget, cap, |p| is_rainbow(f, p))
}

/// Rainbows restricted to given candidate points.
pub fn find_rainbows_in(
    f: &StageColoring,
    candidates: &[u64],
    size: usize,
    budget: u64,
    cap: usize,
) -> SearchOutcome {
    search_subsets(candidates, size, budget, cap, |p| is_rainbow(f, p))
}

/// Sets avoiding the specific colour `avoided` on all their tuples.
pub fn find_thin_sets(
    f: &StageColoring,
    avoided: u64,
    size: usize,
    budget: u64,
    cap: usize,
) -> SearchOutcome {
    find_thin_sets_in(f, &all_points(f.domain), avoided, size, budget, cap)
}

pub fn find_thin_sets_in(
    f: &StageColoring,
    candidates: &[u64],
    avoided: u64,
    size: usize,
    budget: u64,
    cap: usize,
) -> SearchOutcome {
    search_subsets(candidates, size, budget, cap, |p| {
        // Only tuples using the newest point need rechecking, but the scan is
        // cheap at the scales we run; keep it simple and exact.
        crate::coloring::subtuples(p, f.arity)
            .iter()
            .all(|t| f.get(t) != avoided)
    })
}

/// Free sets: colours landing in the set must be coordinates of their tuple.
pub fn find_free_sets(f: &StageColoring, size: usize, budget: u64, cap: usize) -> SearchOutcome {
    find_free_sets_in(f, &all_points(f.domain), size, budget, cap)
}

pub fn find_free_sets_in(
    f: &StageColoring,
    candidates: &[u64],
    size: usize,
    budget: u64,
    cap: usize,
) -> SearchOutcome {
    // Freeness is not prefix-monotone under the subset quantifier "colour in
    // the final set": a colour might only later join the set. Prune with the
    // weaker exact-prefix check, then filter complete candidates.
    let mut out = search_subsets(candidates, size, budget, cap, |p| {
        p.len() < size || is_free(f, p)
    });
    out.solutions.retain(|s| is_free(f, s));
    out
}

/// Transitive sub-tournaments (3-cycle-freeness is closed under subsets).
pub fn find_transitive_sets(
    t: &Tournament,
    size: usize,
    budget: u64,
    cap: usize,
) -> SearchOutcome {
    search_subsets(&all_points(t.domain), size, budget, cap, |p| {
        transitive_violation(t, p).is_none()
    })
}

/// Pairs of sets (h1, h2), each of the given size, all increasing cross pairs
/// (x in h1, y in h2, x < y) sharing the single colour `colour`.
pub fn find_cross_homogeneous(
    f: &StageColoring,
    colour: u64,
    size: usize,
    budget: u64,
    cap: usize,
) -> Vec<(Vec<u64>, Vec<u64>)> {
    debug_assert_eq!(f.arity, 2);
    let mut out = Vec::new();
    let h1s = search_subsets(&all_points(f.domain), size, budget, cap * 8, |_| true);
    'outer: for h1 in &h1s.solutions {
        let h2s = search_subsets(&all_points(f.domain), size, budget, cap, |p| {
            h1.iter()
                .all(|&x| p.iter().all(|&y| x >= y || f.get(&[x, y]) == colour))
        });
        for h2 in h2s.solutions {
            if h1.iter().any(|&x| h2.iter().any(|&y| x < y)) {
                out.push((h1.clone(), h2));
                if out.len() >= cap {
                    break 'outer;
                }
            }
        }
    }
    out
}

/// An indexed family of finite sets with a declared size bound, as consumed
/// by escaping functions.
pub trait IndexedFamily {
    fn set(&self, e: u64) -> BTreeSet<u64>;
    /// Declared upper bound on the size of `set(e)`.
    fn size_bound(&self, e: u64) -> usize;
}

/// Family given directly by closures.
pub struct FnFamily<F: Fn(u64) -> BTreeSet<u64>, B: Fn(u64) -> usize> {
    pub set_fn: F,
    pub bound_fn: B,
}

impl<F: Fn(u64) -> BTreeSet<u64>, B: Fn(u64) -> usize> IndexedFamily for FnFamily<F, B> {
    fn set(&self, e: u64) -> BTreeSet<u64> {
        (self.set_fn)(e)
    }
    fn size_bound(&self, e: u64) -> usize {
        (self.bound_fn)(e)
    }
}

/// Least natural not in the indexed set; lands at or below the size bound.
pub fn escape_family(family: &impl IndexedFamily, e: u64) -> u64 {
    escape_set(&family.set(e))
}

/// Least natural not in the given set.
pub fn escape_set(set: &BTreeSet<u64>) -> u64 {
    let mut v = 0u64;
    for &x in set {
        if x > v {
            break;
        }
        if x == v {
            v += 1;
        }
    }
    v
}

/// Total diagonalizer against a finite table: `d(x) != h(x)` everywhere,
/// obtained by escaping the singleton family `{h(x)}`.
pub fn diagonalize_table(h: &[u64]) -> Vec<u64> {
    h.iter()
        .map(|&v| escape_set(&[v].into_iter().collect()))
        .collect()
}

/// Greedy rainbow extraction from a prerainbow: scan the points in order and
/// keep every point that preserves injectivity of the colouring on the kept
/// set. Fails fast if the input is not a prerainbow.
pub fn prerainbow_to_rainbow(
    f: &StageColoring,
    x: &[u64],
    w: TailWindow,
) -> Result<Vec<u64>> {
    if !is_prerainbow(f, x, w) {
        return Err(Error::NotStable {
            class: "prerainbow".into(),
        });
    }
    let mut kept: Vec<u64> = Vec::new();
    for &z in x {
        kept.push(z);
        if rainbow_violation(f, &kept).is_some() {
            kept.pop();
        }
    }
    Ok(kept)
}

/// Convenience: do the tuples of `a` avoid colour `c` entirely?
pub fn avoids_colour(f: &StageColoring, a: &[u64], c: u64) -> bool {
    crate::coloring::subtuples(a, f.arity)
        .iter()
        .all(|t| f.get(t) != c)
}

/// Convenience: thin witness under an explicit colour bound.
pub fn thin_under_bound(f: &StageColoring, a: &[u64], bound: u64) -> Option<u64> {
    thin_witness(f, a, bound)
}
