//! Stage-truncated colourings and tournaments over a finite domain, the tail
//! window rendering of "for all but finitely many stages", and the checkers
//! (boundedness, rainbow, thin, free, transitive, stability classes).

use crate::codec::{colex_cmp, increasing_tuples, tuple_rank};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Total colouring of the strictly increasing `arity`-tuples over `[0, domain)`.
///
/// For stage-indexed constructions the last coordinate is read as the stage;
/// for plain colourings it is just another point. Entries are stored in colex
/// rank order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageColoring {
    pub arity: usize,
    pub domain: u64,
    table: Vec<u64>,
}

impl StageColoring {
    pub fn new(arity: usize, domain: u64) -> Self {
        let entries = crate::codec::binomial(domain, arity as u64) as usize;
        StageColoring {
            arity,
            domain,
            table: vec![0; entries],
        }
    }

    pub fn from_fn(arity: usize, domain: u64, mut f: impl FnMut(&[u64]) -> u64) -> Self {
        let mut c = StageColoring::new(arity, domain);
        for t in increasing_tuples(domain, arity) {
            let r = tuple_rank(&t) as usize;
            c.table[r] = f(&t);
        }
        c
    }

    pub fn from_table(arity: usize, domain: u64, table: Vec<u64>) -> Option<Self> {
        let entries = crate::codec::binomial(domain, arity as u64) as usize;
        (table.len() == entries).then_some(StageColoring { arity, domain, table })
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Colour of an increasing tuple.
    pub fn get(&self, t: &[u64]) -> u64 {
        debug_assert_eq!(t.len(), self.arity);
        self.table[tuple_rank(t) as usize]
    }

    pub fn set(&mut self, t: &[u64], colour: u64) {
        debug_assert_eq!(t.len(), self.arity);
        let r = tuple_rank(t) as usize;
        self.table[r] = colour;
    }

    /// Pair colouring read as "point x at stage s": sorts the two arguments.
    pub fn at_stage(&self, x: u64, s: u64) -> u64 {
        debug_assert_eq!(self.arity, 2);
        debug_assert_ne!(x, s);
        if x < s {
            self.get(&[x, s])
        } else {
            self.get(&[s, x])
        }
    }

    /// Shape check for data read from untrusted files: the table must cover
    /// exactly the increasing tuples of the stated arity.
    pub fn is_consistent(&self) -> bool {
        self.arity >= 1
            && self.table.len() as u128 == crate::codec::binomial(self.domain, self.arity as u64)
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<u64>> {
        increasing_tuples(self.domain, self.arity)
    }
}

/// Tournament over `[0, domain)`: exactly one direction per unordered pair.
/// `beats(a, b)` holds when the `a -> b` edge is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tournament {
    pub domain: u64,
    /// Bit per pair {x < y} in colex rank order: true means `x` beats `y`.
    forward: Vec<bool>,
}

impl Tournament {
    /// Default orientation: the smaller point beats the larger.
    pub fn new(domain: u64) -> Self {
        let pairs = (domain * domain.saturating_sub(1) / 2) as usize;
        Tournament {
            domain,
            forward: vec![true; pairs],
        }
    }

    fn idx(x: u64, y: u64) -> usize {
        debug_assert!(x < y);
        tuple_rank(&[x, y]) as usize
    }

    pub fn beats(&self, a: u64, b: u64) -> bool {
        debug_assert_ne!(a, b);
        if a < b {
            self.forward[Self::idx(a, b)]
        } else {
            !self.forward[Self::idx(b, a)]
        }
    }

    /// Orient the pair so that `winner` beats `loser`.
    pub fn orient(&mut self, winner: u64, loser: u64) {
        debug_assert_ne!(winner, loser);
        if winner < loser {
            self.forward[Self::idx(winner, loser)] = true;
        } else {
            self.forward[Self::idx(loser, winner)] = false;
        }
    }

    pub fn forward_bits(&self) -> &[bool] {
        &self.forward
    }

    pub fn from_bits(domain: u64, forward: Vec<bool>) -> Option<Self> {
        let pairs = (domain * domain.saturating_sub(1) / 2) as usize;
        (forward.len() == pairs).then_some(Tournament { domain, forward })
    }

    /// Shape check for data read from untrusted files.
    pub fn is_consistent(&self) -> bool {
        self.forward.len() as u64 == self.domain * self.domain.saturating_sub(1) / 2
    }
}

/// Tail window rendering of "for all but finitely many stages": the stages
/// `[stage_bound - width, stage_bound)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailWindow {
    pub width: u64,
}

impl TailWindow {
    pub fn new(width: u64) -> Self {
        TailWindow { width }
    }

    pub fn start(&self, stage_bound: u64) -> u64 {
        stage_bound.saturating_sub(self.width)
    }

    pub fn stages(&self, stage_bound: u64) -> std::ops::Range<u64> {
        self.start(stage_bound)..stage_bound
    }
}

/// Checks that every colour has at most `k` preimages among the increasing
/// tuples; returns the first offending colour with its witnesses otherwise.
pub fn check_k_bounded(f: &StageColoring, k: usize) -> Result<(), (u64, Vec<Vec<u64>>)> {
    let mut seen: HashMap<u64, Vec<Vec<u64>>> = HashMap::new();
    for t in f.tuples() {
        let c = f.get(&t);
        let e = seen.entry(c).or_default();
        e.push(t);
        if e.len() > k {
            return Err((c, e.clone()));
        }
    }
    Ok(())
}

/// A set is a rainbow for `f` when `f` is injective on its increasing tuples.
pub fn is_rainbow(f: &StageColoring, a: &[u64]) -> bool {
    rainbow_violation(f, a).is_none()
}

/// First pair of distinct tuples from `a` with equal colour, if any.
pub fn rainbow_violation(f: &StageColoring, a: &[u64]) -> Option<(Vec<u64>, Vec<u64>)> {
    debug_assert!(a.windows(2).all(|w| w[0] < w[1]));
    let mut seen: HashMap<u64, Vec<u64>> = HashMap::new();
    for t in subtuples(a, f.arity) {
        match seen.entry(f.get(&t)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                return Some((e.get().clone(), t));
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(t);
            }
        }
    }
    None
}

/// Least colour below `colour_bound` missing from `f`'s image on the
/// increasing tuples of `a`, if any. Such a set is "thin" for `f`.
pub fn thin_witness(f: &StageColoring, a: &[u64], colour_bound: u64) -> Option<u64> {
    let mut present: BTreeSet<u64> = BTreeSet::new();
    for t in subtuples(a, f.arity) {
        present.insert(f.get(&t));
    }
    (0..colour_bound).find(|c| !present.contains(c))
}

/// A set is free for `f` when every tuple whose colour lands back in the set
/// already contains its colour as a coordinate.
pub fn is_free(f: &StageColoring, a: &[u64]) -> bool {
    free_violation(f, a).is_none()
}

pub fn free_violation(f: &StageColoring, a: &[u64]) -> Option<Vec<u64>> {
    let set: BTreeSet<u64> = a.iter().copied().collect();
    for t in subtuples(a, f.arity) {
        let c = f.get(&t);
        if set.contains(&c) && !t.contains(&c) {
            return Some(t);
        }
    }
    None
}

/// A sub-tournament is transitive iff it has no directed 3-cycle; returns a
/// witnessing cycle otherwise.
pub fn transitive_violation(t: &Tournament, h: &[u64]) -> Option<(u64, u64, u64)> {
    for (i, &a) in h.iter().enumerate() {
        for &b in &h[i + 1..] {
            for &c in h {
                if c == a || c == b {
                    continue;
                }
                // Cycle a -> b -> c -> a (or its reverse, caught at another
                // (a, b) ordering).
                if t.beats(a, b) && t.beats(b, c) && t.beats(c, a) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

pub fn is_transitive(t: &Tournament, h: &[u64]) -> bool {
    transitive_violation(t, h).is_none()
}

/// One colour class per point in the limit: `(n+1)`-tuples whose colours may
/// coincide only when the final coordinates coincide.
pub fn is_one_tail_rainbow(f: &StageColoring, h: &[u64]) -> bool {
    one_tail_violation(f, h).is_none()
}

pub fn one_tail_violation(f: &StageColoring, h: &[u64]) -> Option<(Vec<u64>, Vec<u64>)> {
    let mut seen: HashMap<u64, Vec<Vec<u64>>> = HashMap::new();
    for t in subtuples(h, f.arity) {
        let c = f.get(&t);
        let e = seen.entry(c).or_default();
        if let Some(prev) = e.iter().find(|p| p.last() != t.last()) {
            return Some((prev.clone(), t));
        }
        e.push(t);
    }
    None
}

/// Prerainbow: distinct points of `x` never share a colour at the tail stages
/// drawn from `x` itself.
pub fn is_prerainbow(f: &StageColoring, x: &[u64], w: TailWindow) -> bool {
    prerainbow_violation(f, x, w).is_none()
}

pub fn prerainbow_violation(f: &StageColoring, x: &[u64], w: TailWindow) -> Option<(u64, u64, u64)> {
    debug_assert_eq!(f.arity, 2);
    let start = w.start(f.domain);
    for (i, &a) in x.iter().enumerate() {
        for &b in &x[i + 1..] {
            for &s in x {
                if s >= start && s > a && s > b && f.get(&[a, s]) == f.get(&[b, s]) {
                    return Some((a, b, s));
                }
            }
        }
    }
    None
}

/// Stability classes of a pair colouring read as "point at stage", with the
/// tail window rendering the limit quantifier. Points and partner candidates
/// range over `[0, domain - width)` so every tail pair is inside the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityFlags {
    /// Every point's colour is constant on the tail.
    pub stable: bool,
    /// Every point either shares its colour with a fixed partner at every
    /// tail stage, or shares with nobody at any tail stage.
    pub rainbow_stable: bool,
    /// Every pair of points is either colour-equal at every tail stage or at
    /// none of them.
    pub weakly_rainbow_stable: bool,
    /// Every point has a partner sharing its colour at every tail stage.
    pub strongly_rainbow_stable: bool,
}

impl StabilityFlags {
    pub fn none(&self) -> bool {
        !(self.stable || self.rainbow_stable || self.weakly_rainbow_stable || self.strongly_rainbow_stable)
    }
}

/// Works at any arity >= 2: a "point" is an increasing (arity-1)-tuple with
/// entries below the window start, and its colour at stage s is the colour of
/// the tuple extended by s.
pub fn classify_stability(f: &StageColoring, w: TailWindow) -> StabilityFlags {
    debug_assert!(f.arity >= 2);
    let n = f.domain;
    let start = w.start(n);
    let tail: Vec<u64> = (start..n).collect();
    let points: Vec<Vec<u64>> = increasing_tuples(start, f.arity - 1).collect();

    let colour = |p: &[u64], s: u64| {
        let mut t = p.to_vec();
        t.push(s);
        f.get(&t)
    };

    let stable = points
        .iter()
        .all(|p| tail.windows(2).all(|s| colour(p, s[0]) == colour(p, s[1])));

    let tail_equal =
        |p: &[u64], q: &[u64]| tail.iter().all(|&s| colour(p, s) == colour(q, s));
    let tail_distinct =
        |p: &[u64], q: &[u64]| tail.iter().all(|&s| colour(p, s) != colour(q, s));

    let weakly_rainbow_stable = points.iter().enumerate().all(|(i, p)| {
        points[i + 1..]
            .iter()
            .all(|q| tail_equal(p, q) || tail_distinct(p, q))
    });

    let has_partner = |p: &[u64]| points.iter().any(|q| q[..] != *p && tail_equal(p, q));
    // A point is a tail monk when no other participant shares its colour at
    // any tail stage; participants at stage s are the tuples below s.
    let monk = |p: &[u64]| {
        tail.iter().all(|&s| {
            increasing_tuples(s, f.arity - 1)
                .filter(|q| q[..] != *p)
                .all(|q| colour(p, s) != colour(&q, s))
        })
    };

    let strongly_rainbow_stable = points.iter().all(|p| has_partner(p));
    let rainbow_stable = points.iter().all(|p| has_partner(p) || monk(p));

    StabilityFlags {
        stable,
        rainbow_stable,
        weakly_rainbow_stable,
        strongly_rainbow_stable,
    }
}

/// All strictly increasing `k`-subtuples of the (sorted) slice `a`.
pub fn subtuples(a: &[u64], k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > a.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| a[i]).collect());
        // Advance the index combination (lexicographic on positions): bump the
        // rightmost index that is below its cap, reset everything after it.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < a.len() - (k - i) {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Tuples ordered by colex rank; useful for deterministic scans.
pub fn subtuples_colex(a: &[u64], k: usize) -> Vec<Vec<u64>> {
    let mut out = subtuples(a, k);
    out.sort_by(|s, t| colex_cmp(s, t));
    out
}
