//! Instance transformations between colouring principles: jump lowering,
//! rainbow-to-thin and rainbow-to-free, strong stabilization, the
//! collision-tracking reduction to bounded colourings, tail-partner families
//! with escaping-driven prerainbow growth, and the tournament reading of
//! stable colourings against a set sequence.

use crate::codec::{binomial, increasing_tuples, pair, set_decode, set_encode, tuple_encode, tuple_rank, unpair};
use crate::coloring::{
    is_one_tail_rainbow, StageColoring, TailWindow, Tournament,
};
use crate::error::{Error, Result};
use crate::oracles::{LimitFunction, UniformSetSequence};
use crate::solvers::IndexedFamily;
use std::collections::{BTreeSet, HashMap};

/// Lowers a limit-approximated n-ary colouring to an exact (n+1)-ary one.
///
/// `h` approximates the colouring on colex ranks of increasing n-tuples. The
/// value at (x-tuple, stage s) is the triple code of (approximation, s, 0)
/// while at most one rank-smaller tuple shares the approximation at s, and
/// the fallback triple (rank, s, 1) otherwise. The result is 2-bounded
/// whenever the limit is, and rainbows descend once a post-stabilization
/// stage is available.
pub fn jump_lower(h: &LimitFunction, n: usize, domain: u64) -> StageColoring {
    let ranks = binomial(domain, n as u64) as u64;
    assert!(h.arg_bound >= ranks && h.stage_bound >= domain);
    let mut g = StageColoring::new(n + 1, domain);
    for s in 0..domain {
        // Number of rank-smaller tuples sharing each rank's value at stage s.
        let mut seen: HashMap<u64, u64> = HashMap::new();
        let mut prior_same = vec![0u64; ranks as usize];
        for r in 0..ranks {
            let v = h.approx_at(r, s);
            let e = seen.entry(v).or_insert(0);
            prior_same[r as usize] = *e;
            *e += 1;
        }
        for x in increasing_tuples(s, n) {
            let r = tuple_rank(&x);
            let v = h.approx_at(r, s);
            let colour = if prior_same[r as usize] <= 1 {
                tuple_encode(&[v, s, 0])
            } else {
                tuple_encode(&[r, s, 1])
            };
            let mut t = x.clone();
            t.push(s);
            g.set(&t, colour);
        }
    }
    g
}

/// Iterated jump lowering: level 0 is the supplied 1-ary limit colouring,
/// level j+1 lowers the (exact) level-j colouring. Returns the exact levels
/// 1..=depth, of arities 2..=depth+1.
pub fn compose_jump_lower(h0: &LimitFunction, depth: usize, domain: u64) -> Vec<StageColoring> {
    let mut levels = Vec::with_capacity(depth);
    let mut cur = jump_lower(h0, 1, domain);
    levels.push(cur.clone());
    for _ in 1..depth {
        let ranks = binomial(domain, cur.arity as u64) as u64;
        let lift = LimitFunction::constant(ranks, domain, |r| cur.table()[r as usize]);
        cur = jump_lower(&lift, cur.arity, domain);
        levels.push(cur.clone());
    }
    levels
}

/// Rainbow-to-thin transformation: colours of the input n-ary colouring are
/// read as pair codes. The output (n+1)-ary colouring copies the colour at
/// the smaller pair member whenever the input colour decodes to a pair
/// (x, y) with x < y below the tuple, and is fresh otherwise. 2-bounded by
/// construction (copy chains have length at most two).
pub fn rainbow_to_thin(f: &StageColoring) -> StageColoring {
    let n = f.arity;
    let mut g = StageColoring::new(n + 1, f.domain);
    for t in increasing_tuples(f.domain, n + 1) {
        let y = t[0];
        let z = &t[1..];
        let (a, b) = unpair(f.get(z));
        let colour = if a < b && b == y {
            // (a, z) is colex-smaller and already coloured.
            let mut src = vec![a];
            src.extend_from_slice(z);
            g.get(&src)
        } else {
            2 * tuple_rank(&t) + 1
        };
        g.set(&t, colour);
    }
    g
}

/// Solution map for [`rainbow_to_thin`]: the first two elements of the
/// rainbow name the avoided colour `pair(x, y)`, and everything above y is
/// the thin set.
pub fn trim_solution(h: &[u64]) -> Option<(u64, u64, Vec<u64>)> {
    if h.len() < 2 {
        return None;
    }
    let (x, y) = (h[0], h[1]);
    Some((x, y, h.iter().copied().filter(|&z| z > y).collect()))
}

/// Rainbow-to-thin with a stability certificate: the construction is the
/// same, and the result is rainbow-stable whenever the input colouring is
/// stable (checked by the caller via the classifier).
pub fn srrt_lift(f: &StageColoring) -> StageColoring {
    rainbow_to_thin(f)
}

/// Trapping data for an n-ary colouring: values sit between the (t-1)-th and
/// t-th coordinates (1-indexed; positions 0 and n+1 are the infinities).
/// Tuples containing 0 with an empty window are outside the naturals and are
/// skipped.
pub fn check_trapped(f: &StageColoring, t: usize) -> Result<()> {
    let n = f.arity;
    assert!(t >= 1 && t <= n + 1);
    for z in increasing_tuples(f.domain, n) {
        if z[0] == 0 {
            continue;
        }
        let v = f.get(&z);
        let lower_ok = t == 1 || z[t - 2] <= v;
        let upper_ok = t == n + 1 || v < z[t - 1];
        if !lower_ok || !upper_ok {
            return Err(Error::NotTrapped { t, tuple: z, value: v });
        }
    }
    Ok(())
}

/// Interleave pair components with the extra element at slot 2(t-1);
/// returns the tuple only when strictly increasing.
pub fn interleave(xy: &[(u64, u64)], t: usize, u: u64) -> Option<Vec<u64>> {
    let mut w = Vec::with_capacity(2 * xy.len() + 1);
    for (i, &(x, y)) in xy.iter().enumerate() {
        if i + 1 == t {
            w.push(u);
        }
        w.push(x);
        w.push(y);
    }
    if t == xy.len() + 1 {
        w.push(u);
    }
    w.windows(2).all(|p| p[0] < p[1]).then_some(w)
}

/// Split a (2n+1)-tuple into its n pair components and the slot-t element.
pub fn deinterleave(w: &[u64], t: usize) -> (Vec<(u64, u64)>, u64) {
    let slot = 2 * (t - 1);
    let u = w[slot];
    let mut xy = Vec::with_capacity(w.len() / 2);
    let mut i = 0;
    while i < w.len() {
        if i == slot {
            i += 1;
            continue;
        }
        let a = w[i];
        let b = if i + 1 == slot { w[i + 2] } else { w[i + 1] };
        xy.push((a, b));
        i += if i + 1 == slot { 3 } else { 2 };
    }
    (xy, u)
}

/// Rainbow-to-free transformation for a t-trapped n-ary colouring: the output
/// (2n+1)-ary colouring identifies the two interleavings of a decoded pair
/// whenever both are well-formed, and is fresh otherwise.
///
/// The input colouring is evaluated on pair codes of points below
/// `out_domain`, so its own domain must cover `pair(out_domain-2,
/// out_domain-1)`.
pub fn rainbow_to_free(f: &StageColoring, t: usize, out_domain: u64) -> Result<StageColoring> {
    check_trapped(f, t)?;
    let n = f.arity;
    assert!(out_domain < 2 || f.domain > pair(out_domain - 2, out_domain - 1));
    let mut g = StageColoring::new(2 * n + 1, out_domain);
    for w in increasing_tuples(out_domain, 2 * n + 1) {
        let (xy, u) = deinterleave(&w, t);
        let z: Vec<u64> = xy.iter().map(|&(x, y)| pair(x, y)).collect();
        let colour = if z.windows(2).all(|p| p[0] < p[1]) {
            let (a, b) = unpair(f.get(&z));
            if a < b && b == u {
                match interleave(&xy, t, a) {
                    // The a-interleaving is colex-smaller: same coordinates
                    // except a smaller slot value.
                    Some(src) => g.get(&src),
                    None => 2 * tuple_rank(&w) + 1,
                }
            } else {
                2 * tuple_rank(&w) + 1
            }
        } else {
            2 * tuple_rank(&w) + 1
        };
        g.set(&w, colour);
    }
    Ok(g)
}

/// Solution map for [`rainbow_to_free`]: consecutive pairs of the rainbow,
/// coded.
pub fn pairs_solution(h: &[u64]) -> Vec<u64> {
    h.chunks_exact(2).map(|c| pair(c[0], c[1])).collect()
}

/// Verification bundle for lifting thinness through a limit: every k-tuple of
/// `a` whose limit colour is `avoided` must show it at every tail stage, so a
/// set avoiding the colour at the tail avoids it in the limit.
#[derive(Debug, Clone)]
pub struct LiftBundle {
    pub checked: Vec<(Vec<u64>, u64)>,
    pub avoided_in_limit: bool,
}

pub fn limit_lift_thin(
    h: &LimitFunction,
    k: usize,
    a: &[u64],
    avoided: u64,
    w: TailWindow,
) -> Result<LiftBundle> {
    h.check_stabilized_by(w.start(h.stage_bound))?;
    let mut checked = Vec::new();
    let mut avoided_in_limit = true;
    for t in crate::coloring::subtuples(a, k) {
        let r = tuple_rank(&t);
        if h.limit_value(r) == avoided {
            avoided_in_limit = false;
            for s in w.stages(h.stage_bound) {
                assert_eq!(h.approx_at(r, s), avoided);
                checked.push((t.clone(), s));
            }
        }
    }
    Ok(LiftBundle { checked, avoided_in_limit })
}

/// Turns a rainbow-stable 2-bounded colouring into a strongly rainbow-stable
/// one: at each stage the input's collision pairs share a fresh colour, and
/// the leftover points are paired off rank-consecutively (odd one out fresh).
/// Prerainbows descend to the input.
pub fn stabilize_strongly(f: &StageColoring) -> StageColoring {
    debug_assert_eq!(f.arity, 2);
    let mut g = StageColoring::new(2, f.domain);
    for s in 0..f.domain {
        let mut partner: HashMap<u64, u64> = HashMap::new();
        let mut by_colour: HashMap<u64, u64> = HashMap::new();
        for x in 0..s {
            match by_colour.entry(f.get(&[x, s])) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    let y = *e.get();
                    partner.insert(x, y);
                    partner.insert(y, x);
                }
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(x);
                }
            }
        }
        let leftover: Vec<u64> = (0..s).filter(|x| !partner.contains_key(x)).collect();
        for c in leftover.chunks(2) {
            if c.len() == 2 {
                partner.insert(c[0], c[1]);
                partner.insert(c[1], c[0]);
            }
        }
        for x in 0..s {
            let colour = match partner.get(&x) {
                Some(&y) => 2 * pair(x.min(y), s),
                None => 2 * pair(x, s) + 1,
            };
            g.set(&[x, s], colour);
        }
    }
    g
}

/// The pointer-chasing reduction of an arbitrary pair colouring to a 6-bounded
/// one. A pair whose colour is one of its members maps to 0; a colour above
/// the pair maps to 1; otherwise the pair is replaced by the lexicographically
/// smaller pair obtained by substituting the colour, and the parity of the
/// number of steps until the substitution leaves the active region (or flips
/// which coordinate is replaced) decides between 2i and 2i+1, where i marks
/// the replaced coordinate.
pub fn srt_to_sfs(f: &StageColoring, cap: u64) -> Result<StageColoring> {
    debug_assert_eq!(f.arity, 2);
    // The pointer index: 1 when the colour is below both members, 2 when it
    // sits strictly between them. Only meaningful inside the active region.
    let index = |x: u64, _y: u64, c: u64| if c < x { 1u64 } else { 2 };
    let in_region = |x: u64, y: u64, c: u64| c < y && c != x && c != y;
    let mut g = StageColoring::new(2, f.domain);
    for t in increasing_tuples(f.domain, 2) {
        let (x, y) = (t[0], t[1]);
        let c = f.get(&t);
        let colour = if c == x || c == y {
            0
        } else if c > y {
            1
        } else {
            let i0 = index(x, y, c);
            let (mut a, mut b) = (x, y);
            let mut steps = 0u64;
            let j = loop {
                let cc = f.get(&[a, b]);
                // Substitute and re-sort: the replaced coordinate is the
                // least one above the colour.
                let (na, nb) = if cc < a { (cc, b) } else { (a, cc) };
                steps += 1;
                if steps > cap {
                    return Err(Error::IterationCap { cap, x, y });
                }
                let ccc = f.get(&[na, nb]);
                if !in_region(na, nb, ccc) || index(na, nb, ccc) != i0 {
                    break steps;
                }
                a = na;
                b = nb;
            };
            2 * i0 + (j % 2)
        };
        g.set(&t, colour);
    }
    Ok(g)
}

/// Priority construction against a limit function whose values are bit-coded
/// sets: whenever the decoded set of requirement x is large enough (3x + 2),
/// its two least unrestrained elements at or above x share a fresh colour at
/// every stage; everything else is a fresh singleton. Rainbow-stable and
/// 2-bounded.
pub fn srrt_diag_commitments(h: &LimitFunction, s: u64) -> HashMap<u64, u64> {
    let mut committed: HashMap<u64, u64> = HashMap::new();
    let mut restrained: BTreeSet<u64> = BTreeSet::new();
    for x in 0..h.arg_bound {
        let d = set_decode(h.approx_at(x, s));
        if (d.len() as u64) < 3 * x + 2 {
            continue;
        }
        let avail: Vec<u64> = d
            .iter()
            .copied()
            .filter(|&u| u >= x && !restrained.contains(&u))
            .take(2)
            .collect();
        if avail.len() == 2 {
            committed.insert(avail[0], avail[0]);
            committed.insert(avail[1], avail[0]);
            restrained.insert(avail[0]);
            restrained.insert(avail[1]);
        }
    }
    committed
}

pub fn build_srrt_diag_coloring(h: &LimitFunction, domain: u64) -> Result<StageColoring> {
    for x in 0..h.arg_bound {
        for s in 0..h.stage_bound.min(domain) {
            if let Some(&m) = set_decode(h.approx_at(x, s)).iter().next_back() {
                if m >= domain {
                    return Err(Error::DomainTooSmall { domain, element: m });
                }
            }
        }
    }
    let mut f = StageColoring::new(2, domain);
    for s in 0..domain {
        let committed = srrt_diag_commitments(h, s);
        for w in 0..s {
            let colour = match committed.get(&w) {
                Some(&m) => 2 * pair(m, s),
                None => 2 * pair(w, s) + 1,
            };
            f.set(&[w, s], colour);
        }
    }
    Ok(f)
}

/// Bit code of the first 3x + 2 elements of the rainbow: the value a rainbow
/// pins against requirement x.
pub fn srrt_diag_solution(r: &[u64], x: u64) -> Result<u64> {
    let set: BTreeSet<u64> = r.iter().copied().take((3 * x + 2) as usize).collect();
    set_encode(&set)
}

pub fn srrt_diag_noise_bound(h: &LimitFunction, domain: u64) -> u64 {
    let mut b = h.stabilization_bound();
    for x in 0..h.arg_bound {
        for s in 0..h.stage_bound.min(domain) {
            if let Some(&m) = set_decode(h.approx_at(x, s)).iter().next_back() {
                b = b.max(m + 1);
            }
        }
    }
    b
}

/// Tail-partner family of a weakly rainbow-stable colouring: `bad(x)` is the
/// set of points tail-colour-equal to x (including x), and the indexed family
/// unions `bad` over the bit-decoded index.
#[derive(Debug, Clone)]
pub struct BadFamily {
    pub window_start: u64,
    bad: Vec<BTreeSet<u64>>,
}

impl BadFamily {
    pub fn new(f: &StageColoring, w: TailWindow) -> Self {
        let start = w.start(f.domain);
        let tail: Vec<u64> = (start..f.domain).collect();
        let tail_equal = |x: u64, y: u64| {
            tail.iter().all(|&s| f.at_stage(x, s) == f.at_stage(y, s))
        };
        let bad = (0..start)
            .map(|x| (0..start).filter(|&y| y == x || tail_equal(x, y)).collect())
            .collect();
        BadFamily { window_start: start, bad }
    }

    pub fn bad(&self, x: u64) -> &BTreeSet<u64> {
        &self.bad[x as usize]
    }

    /// Number of unordered pairs of the decoded index with identical partner
    /// sets; drives the exact size formula under strong rainbow stability:
    /// |X_e| = 2|D_e| - 2 * (this count).
    pub fn matched_pairs(&self, e: u64) -> usize {
        let d: Vec<u64> = set_decode(e).into_iter().collect();
        let mut count = 0;
        for (i, &x) in d.iter().enumerate() {
            for &y in &d[i + 1..] {
                if self.bad(x) == self.bad(y) {
                    count += 1;
                }
            }
        }
        count
    }
}

impl IndexedFamily for BadFamily {
    fn set(&self, e: u64) -> BTreeSet<u64> {
        set_decode(e)
            .into_iter()
            .filter(|&x| x < self.window_start)
            .flat_map(|x| self.bad(x).iter().copied())
            .collect()
    }
    fn size_bound(&self, e: u64) -> usize {
        2 * set_decode(e).len()
    }
}

/// Grows a prerainbow by escaping the tail-partner family of the current set:
/// the escape value is never a tail partner of anything already in, so the
/// grown set stays a prerainbow. Returns the set and whether the target was
/// reached before the window ran out.
pub fn escaping_to_prerainbow(
    family: &BadFamily,
    target: usize,
) -> Result<(Vec<u64>, bool)> {
    let mut r: BTreeSet<u64> = BTreeSet::new();
    while r.len() < target {
        let e = set_encode(&r)?;
        let v = crate::solvers::escape_family(family, e);
        if v >= family.window_start {
            return Ok((r.into_iter().collect(), false));
        }
        r.insert(v);
    }
    Ok((r.into_iter().collect(), true))
}

/// Collapses a weakly rainbow-stable pair colouring to a plain 1-ary
/// colouring on the pre-window points: each point is coloured by its least
/// tail partner. 2-bounded when the input is; rainbows are prerainbows of the
/// input.
pub fn wsrrt_to_jump_rainbow(f: &StageColoring, w: TailWindow) -> StageColoring {
    let family = BadFamily::new(f, w);
    StageColoring::from_fn(1, family.window_start, |t| {
        *family.bad(t[0]).iter().next().unwrap()
    })
}

/// Reads one-step collisions as pointers: if x < y share a colour at stage s,
/// the point y at stage s is coloured x, otherwise 0. Stable when the input
/// is weakly rainbow-stable; free sets inside a one-tail rainbow are rainbows
/// of the input.
pub fn freeness_coloring(f: &StageColoring) -> StageColoring {
    debug_assert_eq!(f.arity, 2);
    let mut g = StageColoring::new(2, f.domain);
    for s in 0..f.domain {
        let mut first: HashMap<u64, u64> = HashMap::new();
        for x in 0..s {
            let c = f.get(&[x, s]);
            match first.entry(c) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    g.set(&[x, s], *e.get());
                }
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(x);
                    g.set(&[x, s], 0);
                }
            }
        }
    }
    g
}

/// Greedy one-tail-rainbow growth: repeatedly add the least point that keeps
/// the invariant, certifying the blocking set stays within the binomial
/// bound. Returns the set and whether the target size was reached.
pub fn one_tail_greedy(
    f: &StageColoring,
    target: usize,
) -> Result<(Vec<u64>, bool)> {
    let n = f.arity - 1;
    let mut h: Vec<u64> = Vec::new();
    while h.len() < target {
        let mut blocking: BTreeSet<u64> = h.iter().copied().collect();
        for x in 0..f.domain {
            if h.contains(&x) {
                continue;
            }
            let mut cand: Vec<u64> = h.clone();
            cand.push(x);
            cand.sort();
            if !is_one_tail_rainbow(f, &cand) {
                blocking.insert(x);
            }
        }
        let bound = binomial(h.len() as u64, n as u64) as usize * 2 + h.len();
        if blocking.len() > bound {
            return Err(Error::Instance(format!(
                "blocking set of size {} exceeds the bound {}",
                blocking.len(),
                bound
            )));
        }
        let v = crate::solvers::escape_set(&blocking);
        if v >= f.domain {
            return Ok((h, false));
        }
        h.push(v);
        h.sort();
    }
    Ok((h, true))
}

/// Classification of a sub-tournament solution against a stable colouring
/// and a set sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionClass {
    /// Some limit colour below the bound is missing on the set.
    ThinFor(u64),
    /// Past the cut, the set is on one side of every sequence member.
    Cohesive,
    /// The four-cycle configuration: both limit colours of an index are
    /// present and the post-cut stages meet both sides.
    Violation {
        i: u64,
        x: u64,
        y: u64,
        s0: u64,
        s1: u64,
    },
}

/// Tournament reading of a stable pair colouring against a set sequence: the
/// x -> s edge follows the stage-s colour parity and the side of s in the
/// indexed set.
pub fn em_sts_coh_tournament(
    f: &StageColoring,
    r: &UniformSetSequence,
    k: u64,
) -> Tournament {
    let mut t = Tournament::new(f.domain);
    for p in increasing_tuples(f.domain, 2) {
        let (x, s) = (p[0], p[1]);
        let c = f.get(&[x, s]);
        let i = c / 2;
        let fwd = if i < k {
            let inside = r.contains(i, s);
            (c % 2 == 0 && inside) || (c % 2 == 1 && !inside)
        } else {
            true
        };
        if fwd {
            t.orient(x, s);
        } else {
            t.orient(s, x);
        }
    }
    t
}

/// Limit colour of a point under a stable colouring: its colour at the last
/// stage distinct from the point itself.
pub fn limit_colour(f: &StageColoring, x: u64) -> u64 {
    let s = if x == f.domain - 1 { f.domain - 2 } else { f.domain - 1 };
    f.at_stage(x, s)
}

/// Classifies a set against the tournament reading: thin, cohesive past the
/// cut, or the violating four-cycle configuration.
pub fn classify_em_sts_coh(
    f: &StageColoring,
    r: &UniformSetSequence,
    k: u64,
    h: &[u64],
    cut: u64,
) -> SolutionClass {
    let colours: Vec<u64> = h.iter().map(|&x| limit_colour(f, x)).collect();
    for i in 0..k {
        let xs: Vec<u64> = h
            .iter()
            .zip(&colours)
            .filter(|&(_, &c)| c == 2 * i)
            .map(|(&x, _)| x)
            .collect();
        let ys: Vec<u64> = h
            .iter()
            .zip(&colours)
            .filter(|&(_, &c)| c == 2 * i + 1)
            .map(|(&x, _)| x)
            .collect();
        for &x in &xs {
            for &y in &ys {
                let lo = cut.max(x + 1).max(y + 1);
                let s0 = h.iter().copied().find(|&s| s >= lo && r.contains(i, s));
                let s1 = h.iter().copied().find(|&s| s >= lo && !r.contains(i, s));
                if let (Some(s0), Some(s1)) = (s0, s1) {
                    return SolutionClass::Violation { i, x, y, s0, s1 };
                }
            }
        }
    }
    if let Some(c) = (0..2 * k).find(|c| !colours.contains(c)) {
        return SolutionClass::ThinFor(c);
    }
    SolutionClass::Cohesive
}

/// The four edges of the cycle a violation configuration exhibits; all four
/// must point forward for the classification to be honest.
pub fn violation_cycle(
    _t: &Tournament,
    v: &SolutionClass,
) -> Option<[(u64, u64); 4]> {
    if let SolutionClass::Violation { x, y, s0, s1, .. } = *v {
        Some([(x, s0), (s0, y), (y, s1), (s1, x)])
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{check_k_bounded, classify_stability, is_rainbow};
    use crate::solvers::{find_free_sets_in, find_rainbows, SearchEnd};

    #[test]
    fn jump_lower_is_2_bounded_and_drops_rainbows() {
        let n = 12u64;
        // 2-bounded limit colouring of points: x and x+1 share for even x.
        let h = LimitFunction::constant(n, n, |x| x / 2);
        let g = jump_lower(&h, 1, n);
        assert!(check_k_bounded(&g, 2).is_ok());
        let out = find_rainbows(&g, 4, 10_000_000, usize::MAX);
        assert_eq!(out.end, SearchEnd::Exhaustive);
        assert!(!out.solutions.is_empty());
        for a in &out.solutions {
            // The top element is the embedded witness stage.
            let body = &a[..a.len() - 1];
            let mut seen = std::collections::HashSet::new();
            for &x in body {
                assert!(seen.insert(h.limit_value(x)), "collision in {:?}", a);
            }
        }
    }

    #[test]
    fn compose_jump_lower_descends_level_by_level() {
        let n = 10u64;
        let h0 = LimitFunction::constant(n, n, |x| x / 2);
        let levels = compose_jump_lower(&h0, 2, n);
        assert_eq!(levels.len(), 2);
        assert_eq!(levels[1].arity, 3);
        let out = find_rainbows(&levels[1], 5, 50_000_000, 3_000);
        for a in &out.solutions {
            let l1 = &a[..a.len() - 1];
            assert!(is_rainbow(&levels[0], l1), "level-1 descent of {:?}", a);
            let l0 = &l1[..l1.len() - 1];
            let mut seen = std::collections::HashSet::new();
            for &x in l0 {
                assert!(seen.insert(h0.limit_value(x)));
            }
        }
    }

    #[test]
    fn rainbow_to_thin_trim_avoids_the_named_colour() {
        let n = 14u64;
        // f hits pair codes: f(z) = pair(0, 1) = 1 for every z, so the code
        // (0,1) is copied onto tuples starting at 1.
        let f = StageColoring::from_fn(1, n, |_| pair(0, 1));
        let g = rainbow_to_thin(&f);
        assert!(check_k_bounded(&g, 2).is_ok());
        let out = find_rainbows(&g, 4, 10_000_000, usize::MAX);
        assert_eq!(out.end, SearchEnd::Exhaustive);
        for a in &out.solutions {
            let (x, y, rest) = trim_solution(a).unwrap();
            for &z in &rest {
                assert_ne!(f.get(&[z]), pair(x, y), "avoidance in {:?}", a);
            }
        }
    }

    #[test]
    fn interleave_round_trip() {
        let xy = [(1u64, 3), (6, 9)];
        let w = interleave(&xy, 2, 4).unwrap();
        assert_eq!(w, vec![1, 3, 4, 6, 9]);
        let (back, u) = deinterleave(&w, 2);
        assert_eq!(back, xy.to_vec());
        assert_eq!(u, 4);
        assert!(interleave(&xy, 2, 3).is_none()); // not strictly increasing
        let w0 = interleave(&xy, 1, 0).unwrap();
        assert_eq!(w0, vec![0, 1, 3, 6, 9]);
        let w3 = interleave(&xy, 3, 12).unwrap();
        assert_eq!(w3, vec![1, 3, 6, 9, 12]);
        for t in 1..=3 {
            let w = interleave(&xy, t, 20);
            if let Some(w) = w {
                let (b, u) = deinterleave(&w, t);
                assert_eq!((b, u), (xy.to_vec(), 20));
            }
        }
    }

    #[test]
    fn trapped_scan_accepts_and_rejects() {
        let n = 12u64;
        // 1-indexed t = 1: value strictly below the first coordinate; tuples
        // containing 0 are skipped.
        let f = StageColoring::from_fn(1, n, |z| z[0].saturating_sub(1));
        assert!(check_trapped(&f, 1).is_ok());
        assert!(check_trapped(&f, 2).is_err());
        let id = StageColoring::from_fn(1, n, |z| z[0]);
        assert!(check_trapped(&id, 2).is_ok());
        assert!(check_trapped(&id, 1).is_err());
    }

    #[test]
    fn rainbow_to_free_solutions_are_free() {
        let n = 16u64;
        // The input lives on pair codes of points below n.
        let f = StageColoring::from_fn(1, pair(n - 2, n - 1) + 1, |z| z[0].saturating_sub(1));
        let g = rainbow_to_free(&f, 1, n).unwrap();
        assert!(check_k_bounded(&g, 2).is_ok());
        let out = find_rainbows(&g, 6, 50_000_000, 2_000);
        assert!(!out.solutions.is_empty());
        for a in &out.solutions {
            let h1 = pairs_solution(a);
            let mut sorted = h1.clone();
            sorted.sort();
            sorted.dedup();
            // Freeness of the coded pair set under f.
            for &z in &sorted {
                let c = f.get(&[z]);
                if sorted.contains(&c) {
                    assert!(h1.contains(&c));
                }
            }
        }
    }

    #[test]
    fn stabilize_strongly_makes_partners_total() {
        let n = 16u64;
        let w = TailWindow::new(4);
        // Rainbow-stable input: monks only.
        let f = StageColoring::from_fn(2, n, |t| 2 * pair(t[0], t[1]) + 1);
        let flags = classify_stability(&f, w);
        assert!(flags.rainbow_stable && !flags.strongly_rainbow_stable);
        let g = stabilize_strongly(&f);
        assert!(check_k_bounded(&g, 2).is_ok());
        let gflags = classify_stability(&g, w);
        assert!(gflags.strongly_rainbow_stable, "{gflags:?}");
        // Prerainbow descent, exhaustively on small sets.
        let pts: Vec<u64> = (0..n).collect();
        for x in crate::coloring::subtuples(&pts, 3) {
            if crate::coloring::is_prerainbow(&g, &x, w) {
                assert!(crate::coloring::is_prerainbow(&f, &x, w));
            }
        }
    }

    #[test]
    fn srt_to_sfs_worked_example_and_bound() {
        let n = 10u64;
        let f = StageColoring::from_fn(2, n, |_| 0);
        let g = srt_to_sfs(&f, n * n).unwrap();
        // Pair (1,2): colour 0 is below both members, one substitution step
        // leaves the region, so the output colour is 2*1 + 1 = 3.
        assert_eq!(g.get(&[1, 2]), 3);
        for t in g.tuples() {
            assert!(g.get(&t) < 6);
        }
    }

    #[test]
    fn bad_family_and_prerainbow_growth() {
        let n = 20u64;
        let w = TailWindow::new(5);
        // Married colouring: 2k and 2k+1 always share.
        let f = StageColoring::from_fn(2, n, |t| 2 * pair(t[0] / 2, t[1]));
        let fam = BadFamily::new(&f, w);
        assert_eq!(fam.bad(0), &[0u64, 1].into_iter().collect());
        assert_eq!(fam.bad(5), &[4u64, 5].into_iter().collect());
        // Size formula under strong rainbow stability.
        for e in [0b11u64, 0b1010, 0b100110] {
            let d = set_decode(e);
            let x = fam.set(e);
            assert_eq!(x.len(), 2 * d.len() - 2 * fam.matched_pairs(e));
        }
        let (r, complete) = escaping_to_prerainbow(&fam, 7).unwrap();
        assert!(complete, "grew only {:?}", r);
        assert!(crate::coloring::is_prerainbow(&f, &r, w));
        // No two tail partners inside.
        for (i, &x) in r.iter().enumerate() {
            for &y in &r[i + 1..] {
                assert!(!fam.bad(x).contains(&y));
            }
        }
    }

    #[test]
    fn wsrrt_collapse_rainbows_are_prerainbows() {
        let n = 18u64;
        let w = TailWindow::new(5);
        let f = StageColoring::from_fn(2, n, |t| 2 * pair(t[0] / 2, t[1]));
        let g = wsrrt_to_jump_rainbow(&f, w);
        assert!(check_k_bounded(&g, 2).is_ok());
        // g-rainbow: no two points with the same least tail partner.
        let pts: Vec<u64> = (0..g.domain).collect();
        for x in crate::coloring::subtuples(&pts, 4) {
            if is_rainbow(&g, &x) {
                assert!(crate::coloring::is_prerainbow(&f, &x, w));
            }
        }
    }

    #[test]
    fn freeness_coloring_free_sets_are_rainbows() {
        let n = 16u64;
        let w = TailWindow::new(4);
        // Weakly rainbow-stable married colouring.
        let f = StageColoring::from_fn(2, n, |t| 2 * pair(t[0] / 2, t[1]));
        let g = freeness_coloring(&f);
        assert!(classify_stability(&g, w).stable);
        let (x, _) = one_tail_greedy(&f, 8).unwrap();
        assert!(is_one_tail_rainbow(&f, &x));
        let out = find_free_sets_in(&g, &x, 4, 10_000_000, usize::MAX);
        for h in &out.solutions {
            assert!(is_rainbow(&f, h), "free set {:?} not a rainbow", h);
        }
    }

    #[test]
    fn em_sts_coh_classification_and_planted_cycle() {
        let n = 14u64;
        let k = 2u64;
        // Stable colouring with all four limit colours present.
        let f = StageColoring::from_fn(2, n, |t| t[0] % 4);
        let r = UniformSetSequence::new(
            n,
            vec![(0..n).filter(|x| x % 2 == 0).collect(), (0..n / 2).collect()],
        )
        .unwrap();
        let t = em_sts_coh_tournament(&f, &r, k);
        // h meets both sides of r_0 late and carries colours 0 and 1.
        let h: Vec<u64> = vec![0, 1, 10, 11];
        let class = classify_em_sts_coh(&f, &r, k, &h, 2);
        if let SolutionClass::Violation { .. } = class {
            let cyc = violation_cycle(&t, &class).unwrap();
            for (a, b) in cyc {
                assert!(t.beats(a, b), "edge {a}->{b} of the planted cycle");
            }
            assert!(crate::coloring::transitive_violation(&t, &h).is_some());
        } else {
            panic!("expected a violation, got {class:?}");
        }
    }
}
