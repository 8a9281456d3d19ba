//! Diagonalization constructions: stagewise tournaments and colourings built
//! against limit functions or halting tables, whose solutions escape the
//! canonically indexed set families (the finite engine behind the
//! diagonally-non-computable reductions).

use crate::codec::{pair, set_decode, sized_decode, sized_encode, tuple_component, tuple_encode, unpair};
use crate::coloring::{StageColoring, Tournament};
use crate::error::{Error, Result};
use crate::oracles::{LimitFunction, MockHaltingTable};
use crate::solvers::IndexedFamily;
use std::collections::{BTreeSet, HashMap, HashSet};

pub fn pow3(e: u32) -> u64 {
    3u64.pow(e)
}

/// Set size used by requirement `e` of the tournament constructions.
pub fn em_size(e: u64) -> usize {
    pow3(e as u32 + 1) as usize
}

/// Set size used by requirement (e, i) of the thin-set construction:
/// `3^(pair(e,i)+1)`.
pub fn ts2_size(e: u64, i: u64) -> usize {
    pow3(pair(e, i) as u32 + 1) as usize
}

fn decode_em_set(g: &LimitFunction, e: u64, s: u64, min_value: u64) -> BTreeSet<u64> {
    sized_decode(g.approx_at(e, s), em_size(e), min_value)
}

/// Stagewise tournament against a limit-coded family of sets. `min_value(e)`
/// is the family's lower bound per requirement: 0 for the plain variant,
/// `e` for the stable one.
///
/// At stage s+1, the new point s is oriented: each requirement e < s claims
/// the two least unclaimed elements {x, y} of its current set and, when both
/// edges at s are still free, orients them so {x, y, s} is a 3-cycle with the
/// current x-y edge. All remaining edges at s default to "smaller beats
/// larger".
pub fn build_em_tournament(
    g: &LimitFunction,
    domain: u64,
    min_value: impl Fn(u64) -> u64,
) -> Result<Tournament> {
    // Pre-validate every decode against the domain.
    for e in 0..g.arg_bound {
        for s in 0..g.stage_bound.min(domain) {
            let d = decode_em_set(g, e, s, min_value(e));
            if let Some(&m) = d.iter().next_back() {
                if m >= domain {
                    return Err(Error::DomainTooSmall { domain, element: m });
                }
            }
        }
    }
    let mut t = Tournament::new(domain);
    let mut assigned: HashSet<(u64, u64)> = HashSet::new();
    let key = |a: u64, b: u64| (a.min(b), a.max(b));

    for s in 0..domain {
        let mut claimed: BTreeSet<u64> = BTreeSet::new();
        for e in 0..g.arg_bound.min(s) {
            let d = decode_em_set(g, e, s, min_value(e));
            let avail: Vec<u64> = d.difference(&claimed).copied().take(2).collect();
            if avail.len() < 2 {
                return Err(Error::PairAvailability {
                    requirement: e,
                    needed: 2,
                    stage: s,
                });
            }
            let (x, y) = (avail[0], avail[1]);
            claimed.extend(d.iter().copied());
            if x == s || y == s {
                continue;
            }
            if !assigned.contains(&key(s, x)) && !assigned.contains(&key(s, y)) {
                // Freeze the x-y edge at its current (possibly default)
                // direction, then close the 3-cycle through s.
                assigned.insert(key(x, y));
                if t.beats(x, y) {
                    t.orient(y, s);
                    t.orient(s, x);
                } else {
                    t.orient(x, s);
                    t.orient(s, y);
                }
                assigned.insert(key(s, x));
                assigned.insert(key(s, y));
            }
        }
        for z in 0..s {
            assigned.insert(key(z, s)); // default orientation stands
        }
    }
    Ok(t)
}

/// Code of the first `3^(e+1)` elements of `h` at or above `min_value`, in
/// the same sized family the construction reads.
pub fn em_solution(h: &[u64], e: u64, min_value: u64) -> Result<u64> {
    let set: BTreeSet<u64> = h
        .iter()
        .copied()
        .filter(|&x| x >= min_value)
        .take(em_size(e))
        .collect();
    sized_encode(&set, em_size(e), min_value)
}

/// Stage from which the tournament construction is pure: above every decoded
/// element and every approximation movement.
pub fn em_noise_bound(g: &LimitFunction, domain: u64, min_value: impl Fn(u64) -> u64) -> u64 {
    let mut b = g.stabilization_bound();
    for e in 0..g.arg_bound {
        for s in 0..g.stage_bound.min(domain) {
            if let Some(&m) = decode_em_set(g, e, s, min_value(e)).iter().next_back() {
                b = b.max(m + 1);
            }
        }
    }
    b
}

/// Reads a tournament as the 2-colouring "does the smaller point beat the
/// larger".
pub fn tournament_as_coloring(t: &Tournament) -> StageColoring {
    StageColoring::from_fn(2, t.domain, |p| u64::from(t.beats(p[0], p[1])))
}

/// Code of the first `3^(e+1)` elements of a homogeneous side.
pub fn ipt_solution(h: &[u64], e: u64) -> Result<u64> {
    em_solution(h, e, 0)
}

fn decode_ts2_set(g: &LimitFunction, code: u64, s: u64) -> BTreeSet<u64> {
    let (e, i) = unpair(code);
    sized_decode(g.approx_at(code, s), ts2_size(e, i), 0)
}

/// Stagewise pair colouring against a limit-coded family indexed by
/// `pair(e, i)`. At stage s+1 each live requirement claims the least
/// unclaimed element x of its set and colours the edge {x, s} with i if it is
/// still free; everything else at s defaults to colour 0.
pub fn build_ts2_coloring(g: &LimitFunction, domain: u64) -> Result<StageColoring> {
    for code in 0..g.arg_bound {
        for s in 0..g.stage_bound.min(domain) {
            let d = decode_ts2_set(g, code, s);
            if let Some(&m) = d.iter().next_back() {
                if m >= domain {
                    return Err(Error::DomainTooSmall { domain, element: m });
                }
            }
        }
    }
    let mut f = StageColoring::new(2, domain);
    let mut assigned: HashSet<(u64, u64)> = HashSet::new();
    let key = |a: u64, b: u64| (a.min(b), a.max(b));

    for s in 0..domain {
        let mut claimed: BTreeSet<u64> = BTreeSet::new();
        for code in 0..g.arg_bound.min(s) {
            let (_, i) = unpair(code);
            let d = decode_ts2_set(g, code, s);
            let x = match d.difference(&claimed).next() {
                Some(&x) => x,
                None => {
                    return Err(Error::PairAvailability {
                        requirement: code,
                        needed: 1,
                        stage: s,
                    })
                }
            };
            claimed.extend(d.iter().copied());
            if x != s && !assigned.contains(&key(x, s)) {
                f.set(&[x.min(s), x.max(s)], i);
                assigned.insert(key(x, s));
            }
        }
        for z in 0..s {
            assigned.insert(key(z, s)); // colour 0 already in place
        }
    }
    Ok(f)
}

/// Code of the first `3^(pair(e,i)+1)` elements of the thin set, in the
/// family the construction reads.
pub fn ts2_solution(a: &[u64], e: u64, i: u64) -> Result<u64> {
    let set: BTreeSet<u64> = a.iter().copied().take(ts2_size(e, i)).collect();
    sized_encode(&set, ts2_size(e, i), 0)
}

/// Stage above all decoded elements and approximation movement of the
/// thin-set construction.
pub fn ts2_noise_bound(g: &LimitFunction, domain: u64) -> u64 {
    let mut b = g.stabilization_bound();
    for code in 0..g.arg_bound {
        for s in 0..g.stage_bound.min(domain) {
            if let Some(&m) = decode_ts2_set(g, code, s).iter().next_back() {
                b = b.max(m + 1);
            }
        }
    }
    b
}

/// The set requirement e watches at stage s: the decoded converged value once
/// the machine has halted by s, a default block of fresh elements before.
pub fn srrt_dnr_set(h: &MockHaltingTable, e: u64, s: u64) -> BTreeSet<u64> {
    match h.observed(e, s) {
        Some(v) => sized_decode(v, em_size(e), e + 1),
        None => (e + 1..=e + em_size(e) as u64).collect(),
    }
}

/// Per-stage commitments of the halting-driven rainbow construction: point ->
/// least element of its committed pair.
fn srrt_dnr_commitments(h: &MockHaltingTable, s: u64) -> HashMap<u64, u64> {
    let mut committed = HashMap::new();
    let mut claimed: BTreeSet<u64> = BTreeSet::new();
    for e in 0..h.len().min(s) {
        let d = srrt_dnr_set(h, e, s);
        let avail: Vec<u64> = d.difference(&claimed).copied().take(2).collect();
        claimed.extend(d.iter().copied());
        if avail.len() == 2 {
            committed.insert(avail[0], avail[0]);
            committed.insert(avail[1], avail[0]);
        }
    }
    committed
}

/// 2-bounded stagewise colouring against a halting table: at every stage each
/// requirement's two least unclaimed watched elements share a fresh colour;
/// everything else is a fresh singleton. Committed pairs of halted machines
/// stabilize, so the colouring is rainbow-stable.
pub fn build_srrt_dnr_coloring(h: &MockHaltingTable, domain: u64) -> Result<StageColoring> {
    for e in 0..h.len() {
        for s in 0..domain {
            if let Some(&m) = srrt_dnr_set(h, e, s).iter().next_back() {
                if m >= domain {
                    return Err(Error::DomainTooSmall { domain, element: m });
                }
            }
        }
    }
    let mut f = StageColoring::new(2, domain);
    for s in 0..domain {
        let committed = srrt_dnr_commitments(h, s);
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

/// Code of the first `3^(e+1)` elements of the rainbow above e, in the family
/// a halted machine's value is decoded into.
pub fn srrt_dnr_solution(r: &[u64], e: u64) -> Result<u64> {
    em_solution(r, e, e + 1)
}

/// Stage above all watched elements and convergence stages.
pub fn srrt_dnr_noise_bound(h: &MockHaltingTable, domain: u64) -> u64 {
    let mut b = 0u64;
    for e in 0..h.len() {
        if let crate::oracles::HaltEntry::Converge { stage, .. } = h.entries[e as usize] {
            b = b.max(stage + 1);
        }
        for s in 0..domain {
            if let Some(&m) = srrt_dnr_set(h, e, s).iter().next_back() {
                b = b.max(m + 1);
            }
        }
    }
    b
}

/// Set size and lower bound of requirement `code` of the movable-marker
/// construction: `code + 1` naturals, all above `code`.
pub fn stable_thin_size(code: u64) -> usize {
    code as usize + 1
}

/// Per-stage commitments (point -> colour) of the movable-marker finite
/// injury construction: requirements in priority order each mark the least
/// element of their current set not restrained by higher priority and commit
/// it to their colour. Re-picking every stage realizes the injury rules: a
/// marker moves exactly when the approximation changes, a higher-priority
/// marker lands on it, or a smaller element of the set is released.
pub fn stable_thin_commitments(
    f: &LimitFunction,
    req_count: u64,
    s: u64,
) -> Vec<(u64, u64, u64)> {
    // (code, point, colour) per requirement alive at stage s.
    let mut out = Vec::new();
    let mut restrained: BTreeSet<u64> = BTreeSet::new();
    for code in 0..req_count {
        let (e, i) = unpair(code);
        if e >= f.arg_bound {
            continue;
        }
        let d = sized_decode(f.approx_at(e, s), stable_thin_size(code), code + 1);
        // |D| = code+1 while at most `code` higher-priority markers exist.
        let u = d
            .iter()
            .copied()
            .find(|x| !restrained.contains(x))
            .expect("set larger than the restrained prefix");
        restrained.insert(u);
        out.push((code, u, i));
    }
    out
}

/// Stable colouring from the movable-marker construction: at stage s every
/// committed point wears its requirement's colour, everyone else colour 0.
pub fn build_stable_thin_coloring(
    f: &LimitFunction,
    req_count: u64,
    domain: u64,
) -> Result<StageColoring> {
    for code in 0..req_count {
        let (e, _) = unpair(code);
        if e >= f.arg_bound {
            continue;
        }
        for s in 0..f.stage_bound.min(domain) {
            let d = sized_decode(f.approx_at(e, s), stable_thin_size(code), code + 1);
            if let Some(&m) = d.iter().next_back() {
                if m >= domain {
                    return Err(Error::DomainTooSmall { domain, element: m });
                }
            }
        }
    }
    let mut c = StageColoring::new(2, domain);
    for s in 0..domain {
        let mut colour_of: HashMap<u64, u64> = HashMap::new();
        for (_, u, i) in stable_thin_commitments(f, req_count, s) {
            colour_of.insert(u, i);
        }
        for w in 0..s {
            c.set(&[w, s], colour_of.get(&w).copied().unwrap_or(0));
        }
    }
    Ok(c)
}

/// Code of the set of the first `code + 1` elements of `h` above `code`: the
/// candidate the construction diagonalizes against.
pub fn stable_thin_solution(h: &[u64], code: u64) -> Result<u64> {
    let set: BTreeSet<u64> = h
        .iter()
        .copied()
        .filter(|&x| x > code)
        .take(stable_thin_size(code))
        .collect();
    sized_encode(&set, stable_thin_size(code), code + 1)
}

/// Stage above all decoded elements and approximation movement.
pub fn stable_thin_noise_bound(f: &LimitFunction, req_count: u64, domain: u64) -> u64 {
    let mut b = f.stabilization_bound();
    for code in 0..req_count {
        let (e, _) = unpair(code);
        if e >= f.arg_bound {
            continue;
        }
        for s in 0..f.stage_bound.min(domain) {
            let d = sized_decode(f.approx_at(e, s), stable_thin_size(code), code + 1);
            if let Some(&m) = d.iter().next_back() {
                b = b.max(m + 1);
            }
        }
    }
    b
}

/// The family `X_e = decode of e by bits`, read through an indexed family.
pub struct BitFamily<'a> {
    pub sets: &'a dyn Fn(u64) -> BTreeSet<u64>,
}

/// The table an escaping function is distilled into: `h(pair(e, i))` is the
/// i-th right-fold component of the i-th element of `X_e` (0 when the family
/// runs out).
pub fn diagonal_component_table(family: &impl IndexedFamily, x: u64) -> u64 {
    let (e, i) = unpair(x);
    let xe: Vec<u64> = family.set(e).into_iter().collect();
    match xe.get(i as usize) {
        Some(&n) => tuple_component(n, i as usize),
        None => 0,
    }
}

/// Stage-s escaping value rebuilt from a diagonalizer `g` of the component
/// table: the code of the tuple `(g(pair(e,0)), ..., g(pair(e,s)))`. Once
/// `s >= |X_e|` the value is outside `X_e`.
pub fn escape_from_diagonalizer(g: impl Fn(u64) -> u64, e: u64, s: u64) -> u64 {
    let parts: Vec<u64> = (0..=s).map(|i| g(pair(e, i))).collect();
    tuple_encode(&parts)
}

/// Decode of a bit-coded index restricted to a domain, as a family.
pub struct DecodedBitFamily {
    pub domain: u64,
}

impl IndexedFamily for DecodedBitFamily {
    fn set(&self, e: u64) -> BTreeSet<u64> {
        set_decode(e)
    }
    fn size_bound(&self, e: u64) -> usize {
        set_decode(e).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{is_transitive, transitive_violation};
    use crate::solvers::{diagonalize_table, FnFamily};

    fn limit_of_sets(sets: &[BTreeSet<u64>], sizes: &[usize], mins: &[u64], stages: u64) -> LimitFunction {
        let mut table = Vec::new();
        for (j, set) in sets.iter().enumerate() {
            let v = sized_encode(set, sizes[j], mins[j]).unwrap();
            table.extend(std::iter::repeat(v).take(stages as usize));
        }
        LimitFunction::new(sets.len() as u64, stages, table).unwrap()
    }

    #[test]
    fn em_tournament_breaks_transitivity_on_the_decoded_set() {
        let n = 40u64;
        let d0: BTreeSet<u64> = [2u64, 4, 6].into_iter().collect();
        let g = limit_of_sets(&[d0.clone()], &[3], &[0], n);
        let t = build_em_tournament(&g, n, |_| 0).unwrap();
        let bound = em_noise_bound(&g, n, |_| 0);
        for s in bound..n {
            let mut h: Vec<u64> = d0.iter().copied().collect();
            h.push(s);
            assert!(
                transitive_violation(&t, &h).is_some(),
                "stage {s} should close a 3-cycle"
            );
        }
        // The decoded set already carries a cycle: its largest element sits
        // above the claimed pair and is itself a stage.
        assert!(transitive_violation(&t, &d0.iter().copied().collect::<Vec<_>>()).is_some());
        // Points never claimed by any requirement keep the default
        // orientation and stay transitive.
        assert!(is_transitive(&t, &[1, 3, 5]));
    }

    #[test]
    fn em_solution_round_trip() {
        let h: Vec<u64> = (5..45).collect();
        let code = em_solution(&h, 0, 0).unwrap();
        assert_eq!(sized_decode(code, 3, 0), [5, 6, 7].into_iter().collect());
        let code = em_solution(&h, 0, 7).unwrap();
        assert_eq!(sized_decode(code, 3, 7), [7, 8, 9].into_iter().collect());
    }

    #[test]
    fn ts2_coloring_paints_the_watched_element() {
        let n = 30u64;
        // Requirement code 0 = (0,0) watches a 3-set; code 1 = (0,1) a 9-set.
        let d0: BTreeSet<u64> = [3u64, 5, 7].into_iter().collect();
        let d1: BTreeSet<u64> = (10..19).collect();
        let g = limit_of_sets(&[d0.clone(), d1.clone()], &[3, 9], &[0, 0], n);
        let f = build_ts2_coloring(&g, n).unwrap();
        let bound = ts2_noise_bound(&g, n);
        for s in bound..n {
            // Requirement (0,1) colours the least unclaimed element of d1 with 1.
            assert_eq!(f.get(&[10, s]), 1, "stage {s}");
            // Requirement (0,0) colours with 0 -- same as the default here,
            // but the element is claimed first.
            assert_eq!(f.get(&[3, s]), 0);
        }
    }

    #[test]
    fn srrt_dnr_coloring_is_2_bounded_and_pairs_share() {
        let h = MockHaltingTable {
            entries: vec![
                crate::oracles::HaltEntry::Converge {
                    value: sized_encode(&[2u64, 5, 9].into_iter().collect(), 3, 1).unwrap(),
                    stage: 4,
                },
                crate::oracles::HaltEntry::Diverge,
            ],
        };
        let n = 36u64;
        let f = build_srrt_dnr_coloring(&h, n).unwrap();
        assert!(crate::coloring::check_k_bounded(&f, 2).is_ok());
        let bound = srrt_dnr_noise_bound(&h, n);
        for s in bound..n {
            // Machine 0 halted: its two least watched elements share.
            assert_eq!(f.get(&[2, s]), f.get(&[5, s]));
            // Machine 1 diverges: watches {2..=11}, two least unclaimed are 3, 4.
            assert_eq!(f.get(&[3, s]), f.get(&[4, s]));
        }
    }

    #[test]
    fn stable_thin_markers_settle_and_wear_their_colour() {
        let n = 40u64;
        // One argument e=0 read by requirements code 0 = (0,0) and code 2 = (1,0):
        // only (0,0) has e < arg_bound = 1.
        let f = LimitFunction::constant(1, n, |_| 5);
        let c = build_stable_thin_coloring(&f, 1, n).unwrap();
        let d = sized_decode(5, 1, 1);
        let u = *d.iter().next().unwrap();
        let bound = stable_thin_noise_bound(&f, 1, n);
        for s in bound.max(u + 1)..n {
            assert_eq!(c.get(&[u, s]), 0); // requirement (0,0) commits colour 0
        }
        let flags = crate::coloring::classify_stability(&c, crate::coloring::TailWindow::new(8));
        assert!(flags.stable);
    }

    #[test]
    fn escaping_rebuilt_from_a_diagonalizer_escapes() {
        // Family: X_e = three arbitrary codes.
        let fam = FnFamily {
            set_fn: |e: u64| [e + 3, 2 * e + 7, 5 * e + 11].into_iter().collect(),
            bound_fn: |_| 3usize,
        };
        let max_arg = (0..6).map(|e| pair(e, 6)).max().unwrap();
        let h: Vec<u64> = (0..=max_arg)
            .map(|x| diagonal_component_table(&fam, x))
            .collect();
        let d = diagonalize_table(&h);
        for e in 0..6u64 {
            for s in 3..6u64 {
                let v = escape_from_diagonalizer(|x| d[x as usize], e, s);
                assert!(!fam.set(e).contains(&v), "e={e} s={s}");
            }
        }
    }
}
