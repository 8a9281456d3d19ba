//! Bushy-tree forcing over a finite universe: strictly increasing strings
//! coded as bitmasks, string sets with a bigness trichotomy, forcing
//! conditions with doubling width bounds, and the lowness construction that
//! alternates stem extension with jump decisions.

use crate::error::{Error, Result};
use crate::oracles::MockFunctional;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Strictly increasing strings over `[0, universe)` are coded by the bitmask
/// of their elements; the order is recovered by sorting.
pub fn string_to_mask(s: &[u64]) -> u64 {
    s.iter().fold(0, |m, &x| m | (1u64 << x))
}

pub fn mask_to_string(mask: u64) -> Vec<u64> {
    (0..64).filter(|&x| (mask >> x) & 1 == 1).collect()
}

pub fn mask_len(mask: u64) -> usize {
    mask.count_ones() as usize
}

fn mask_max(mask: u64) -> Option<u64> {
    (mask != 0).then(|| 63 - mask.leading_zeros() as u64)
}

/// A set of strings, upward-monotone in all the variants used here: once a
/// string is in, so is every extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StringSet {
    /// Strings containing at least one of the listed masks.
    Enumerated(Vec<u64>),
    /// Strings containing both members of some listed pair.
    PairCollision(Vec<(u64, u64)>),
    /// Strings a functional halts on.
    Halting(MockFunctional),
    Union(Vec<StringSet>),
}

impl StringSet {
    pub fn contains(&self, mask: u64) -> bool {
        match self {
            StringSet::Enumerated(ms) => ms.iter().any(|&m| m & mask == m),
            StringSet::PairCollision(ps) => ps
                .iter()
                .any(|&(a, b)| (mask >> a) & 1 == 1 && (mask >> b) & 1 == 1),
            StringSet::Halting(f) => f.halts(&mask_to_string(mask)),
            StringSet::Union(ss) => ss.iter().any(|s| s.contains(mask)),
        }
    }

    /// Upper bound on the elements membership depends on: strings agreeing
    /// below the bound are members alike. `None` when membership keeps
    /// depending on arbitrarily large elements (e.g. length triggers).
    pub fn value_reach(&self) -> Option<u64> {
        match self {
            StringSet::Enumerated(ms) => ms
                .iter()
                .map(|&m| mask_max(m).map_or(0, |x| x + 1))
                .max()
                .or(Some(0)),
            StringSet::PairCollision(ps) => {
                Some(ps.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0))
            }
            StringSet::Halting(f) => f.value_reach(),
            StringSet::Union(ss) => {
                let mut r = 0;
                for s in ss {
                    r = r.max(s.value_reach()?);
                }
                Some(r)
            }
        }
    }

    /// Union with the variant lists flattened.
    pub fn union(self, other: StringSet) -> StringSet {
        let mut parts = match self {
            StringSet::Union(ss) => ss,
            s => vec![s],
        };
        match other {
            StringSet::Union(ss) => parts.extend(ss),
            s => parts.push(s),
        }
        StringSet::Union(parts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bigness {
    Big,
    Small,
}

/// Decides whether `set` is big above `stem` for the width schedule
/// `n -> factor * (n + 1)`: big means a tree above the stem, every node of
/// length n with `factor * (n + 1)` children, whose leaves all lie in the
/// set. Exact over the finite universe.
pub fn is_big(set: &StringSet, factor: u64, stem: &[u64], universe: u64) -> Bigness {
    let mut memo: HashMap<u64, bool> = HashMap::new();
    let mask = string_to_mask(stem);
    if big_rec(set, factor, mask, universe, &mut memo) {
        Bigness::Big
    } else {
        Bigness::Small
    }
}

fn big_rec(
    set: &StringSet,
    factor: u64,
    mask: u64,
    universe: u64,
    memo: &mut HashMap<u64, bool>,
) -> bool {
    if let Some(&b) = memo.get(&mask) {
        return b;
    }
    let b = if set.contains(mask) {
        true
    } else {
        let needed = factor * (mask_len(mask) as u64 + 1);
        let first = mask_max(mask).map_or(0, |x| x + 1);
        let mut count = 0u64;
        let mut remaining = universe.saturating_sub(first);
        let mut found = false;
        for x in first..universe {
            remaining -= 1;
            if big_rec(set, factor, mask | (1 << x), universe, memo) {
                count += 1;
                if count >= needed {
                    found = true;
                    break;
                }
            }
            if count + remaining < needed {
                break;
            }
        }
        found
    };
    memo.insert(mask, b);
    b
}

/// The finite closure of a set at a width schedule: every string of length
/// at most `max_len` above which the set is big. Joining the closure never
/// turns a small set big (checked by the caller where it matters).
pub fn closure_up_to(set: &StringSet, factor: u64, universe: u64, max_len: usize) -> StringSet {
    let mut masks = Vec::new();
    for mask in 0..(1u64 << universe) {
        if mask_len(mask) <= max_len {
            let s = mask_to_string(mask);
            if is_big(set, factor, &s, universe) == Bigness::Big {
                masks.push(mask);
            }
        }
    }
    StringSet::Enumerated(masks)
}

/// A smallness verdict transfers from the finite universe to the unbounded
/// setting only when the set's membership is settled strictly below the
/// universe; checks that and errors otherwise.
pub fn check_small_sound(set: &StringSet, universe: u64, stem: &[u64]) -> Result<()> {
    match set.value_reach() {
        Some(r) if r < universe => Ok(()),
        _ => Err(Error::BignessUndecided {
            universe,
            len_cap: stem.len(),
        }),
    }
}

/// A forcing condition: a stem, the width factor, and a bad set that is
/// small above the stem and misses it.
#[derive(Debug, Clone)]
pub struct Condition {
    pub stem: Vec<u64>,
    pub factor: u64,
    pub bad: StringSet,
    pub universe: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JumpOutcome {
    Halts { witness: Vec<u64>, value: u64 },
    Diverges,
}

impl Condition {
    pub fn new(bad: StringSet, factor: u64, universe: u64) -> Result<Self> {
        let c = Condition {
            stem: Vec::new(),
            factor,
            bad,
            universe,
        };
        c.check()?;
        Ok(c)
    }

    /// The condition invariant: the bad set misses the stem and is small
    /// above it.
    pub fn check(&self) -> Result<()> {
        if self.bad.contains(string_to_mask(&self.stem)) {
            return Err(Error::Instance("stem lies in the bad set".into()));
        }
        if is_big(&self.bad, self.factor, &self.stem, self.universe) == Bigness::Big {
            return Err(Error::Instance("bad set is big above the stem".into()));
        }
        check_small_sound(&self.bad, self.universe, &self.stem)
    }

    /// Extends the stem by the least admissible element. Smallness of the bad
    /// set above the stem guarantees fewer than `factor * (len + 1)` children
    /// are excluded.
    pub fn extend_with_element(&self) -> Result<Condition> {
        let first = self.stem.last().map_or(0, |&x| x + 1);
        let mut excluded = 0u64;
        for x in first..self.universe {
            let mut stem = self.stem.clone();
            stem.push(x);
            if !self.bad.contains(string_to_mask(&stem))
                && is_big(&self.bad, self.factor, &stem, self.universe) == Bigness::Small
            {
                debug_assert!(excluded < self.factor * (self.stem.len() as u64 + 1));
                return Ok(Condition { stem, ..self.clone() });
            }
            excluded += 1;
        }
        Err(Error::NoExtension {
            last: self.stem.last().copied().unwrap_or(0),
            universe: self.universe,
        })
    }

    /// Decides the jump of the generic at the functional: when its halting
    /// set is big above the stem, walks to a halting string the bad set stays
    /// small above (the jump converges); otherwise joins the halting set into
    /// the bad set at doubled width (the jump diverges along the generic).
    pub fn force_jump(&self, f: &MockFunctional) -> Result<(Condition, JumpOutcome)> {
        let halt = StringSet::Halting(f.clone());
        if is_big(&halt, self.factor, &self.stem, self.universe) == Bigness::Big {
            let tau = self
                .find_halting(f, &self.stem)
                .ok_or_else(|| Error::Instance("big halting set yielded no witness".into()))?;
            let value = f.output(&tau).expect("witness halts");
            let cond = Condition { stem: tau.clone(), ..self.clone() };
            cond.check()?;
            return Ok((cond, JumpOutcome::Halts { witness: tau, value }));
        }
        check_small_sound(&halt, self.universe, &self.stem)?;
        let cond = Condition {
            stem: self.stem.clone(),
            factor: 2 * self.factor,
            bad: self.bad.clone().union(halt),
            universe: self.universe,
        };
        cond.check()?;
        Ok((cond, JumpOutcome::Diverges))
    }

    /// Depth-first search for a halting extension above which the bad set is
    /// still small; exists whenever the halting set is big above the stem and
    /// the bad set is small there.
    fn find_halting(&self, f: &MockFunctional, s: &[u64]) -> Option<Vec<u64>> {
        let mask = string_to_mask(s);
        if f.halts(s)
            && !self.bad.contains(mask)
            && is_big(&self.bad, self.factor, s, self.universe) == Bigness::Small
        {
            return Some(s.to_vec());
        }
        if !f.can_halt_above(s) {
            return None;
        }
        let first = s.last().map_or(0, |&x| x + 1);
        for x in first..self.universe {
            let mut t = s.to_vec();
            t.push(x);
            if let Some(tau) = self.find_halting(f, &t) {
                return Some(tau);
            }
        }
        None
    }
}

/// Trace of the lowness construction: the generic string, the decided jump
/// values (None for divergence) and the final condition.
#[derive(Debug, Clone)]
pub struct LowTrace {
    pub generic: Vec<u64>,
    pub outcomes: Vec<Option<u64>>,
    pub final_factor: u64,
}

/// Alternates stem extension with jump forcing against the listed
/// functionals, then keeps extending until the generic reaches the target
/// length. The initial bad set holds the strings containing a forbidden
/// pair, so the generic never picks up two partners.
pub fn run_low_construction(
    forbidden_pairs: &[(u64, u64)],
    universe: u64,
    functionals: &[MockFunctional],
    target_len: usize,
) -> Result<LowTrace> {
    let mut cond = Condition::new(
        StringSet::PairCollision(forbidden_pairs.to_vec()),
        1,
        universe,
    )?;
    let mut outcomes = Vec::with_capacity(functionals.len());
    for f in functionals {
        cond = cond.extend_with_element()?;
        let (next, outcome) = cond.force_jump(f)?;
        cond = next;
        outcomes.push(match outcome {
            JumpOutcome::Halts { value, .. } => Some(value),
            JumpOutcome::Diverges => None,
        });
    }
    while cond.stem.len() < target_len {
        cond = cond.extend_with_element()?;
    }
    Ok(LowTrace {
        generic: cond.stem,
        outcomes,
        final_factor: cond.factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_coding_round_trip() {
        let s = vec![0u64, 3, 7, 12];
        assert_eq!(mask_to_string(string_to_mask(&s)), s);
        assert_eq!(mask_len(string_to_mask(&s)), 4);
        assert_eq!(mask_to_string(0), Vec::<u64>::new());
    }

    #[test]
    fn pair_collision_bigness_with_linear_widths() {
        // Universe 8, pairs (0,1), (2,3), (4,5): pair-free strings never form
        // a tree of width n -> n + 1 into the collision set.
        let bad = StringSet::PairCollision(vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(is_big(&bad, 1, &[], 8), Bigness::Small);
        // Above a stem holding one partner only the matching child reaches
        // the set, one child short of the width 2 the schedule asks for.
        assert_eq!(is_big(&bad, 1, &[0], 8), Bigness::Small);
        assert_eq!(is_big(&bad, 3, &[], 8), Bigness::Small);
        // A string already in the set is big above itself.
        assert_eq!(is_big(&bad, 1, &[0, 1], 8), Bigness::Big);
        // Strings containing element 3: the single big child suffices at the
        // root, where the schedule asks for width 1.
        let single = StringSet::Enumerated(vec![1 << 3]);
        assert_eq!(is_big(&single, 1, &[], 8), Bigness::Big);
        assert_eq!(is_big(&single, 1, &[0], 8), Bigness::Small);
        // Length triggers spread over the whole universe and stay big.
        let len3 = StringSet::Halting(MockFunctional::HaltsOnLength { length: 3, value: 0 });
        assert_eq!(is_big(&len3, 1, &[0], 8), Bigness::Big);
    }

    #[test]
    fn smallness_is_additive_under_doubling() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let universe = 7u64;
        let mut checked = 0;
        for _ in 0..200 {
            let factor = rng.gen_range(1..=2u64);
            let gen_set = |rng: &mut rand_chacha::ChaCha8Rng| {
                let n = rng.gen_range(1..=4usize);
                StringSet::Enumerated(
                    (0..n)
                        // Member masks of 2-4 elements: shorter ones are
                        // almost always big.
                        .map(|_| {
                            let mut m = 0u64;
                            for _ in 0..rng.gen_range(2..=4) {
                                m |= 1 << rng.gen_range(0..universe);
                            }
                            m
                        })
                        .collect(),
                )
            };
            let a = gen_set(&mut rng);
            let b = gen_set(&mut rng);
            if is_big(&a, factor, &[], universe) == Bigness::Small
                && is_big(&b, factor, &[], universe) == Bigness::Small
            {
                checked += 1;
                let u = a.union(b);
                assert_eq!(
                    is_big(&u, 2 * factor, &[], universe),
                    Bigness::Small,
                    "union turned big: {u:?}"
                );
            }
        }
        assert!(checked > 10, "only {checked} small pairs sampled");
    }

    #[test]
    fn force_jump_decides_both_ways() {
        let pairs = vec![(0u64, 1), (2, 3), (4, 5), (6, 7)];
        let cond = Condition::new(StringSet::PairCollision(pairs), 1, 16).unwrap();
        let cond = cond.extend_with_element().unwrap();

        // A functional halting on every length-3 string: its halting set is
        // big, so the jump converges along a walked-to witness.
        let f = MockFunctional::HaltsOnLength { length: 3, value: 42 };
        let (next, outcome) = cond.force_jump(&f).unwrap();
        match outcome {
            JumpOutcome::Halts { witness, value } => {
                assert_eq!(value, 42);
                assert!(witness.len() >= 3);
                assert!(witness.starts_with(&cond.stem));
                assert_eq!(next.stem, witness);
                assert!(next.check().is_ok());
            }
            JumpOutcome::Diverges => panic!("expected a halt"),
        }

        // A value trigger only ever yields one set-reaching child per node,
        // below the linear width schedule: forced divergent, soundly (the
        // trigger sits inside the universe).
        let h = MockFunctional::HaltsOnValue { trigger: 9, value: 1 };
        let (next, outcome) = cond.force_jump(&h).unwrap();
        assert_eq!(outcome, JumpOutcome::Diverges);
        // The halting set joined the bad set: element 9 is now off limits.
        assert!(next.bad.contains(string_to_mask(&[9])));

        // A never-halting functional forces divergence and doubles the width.
        let g = MockFunctional::NeverHalts;
        let (next, outcome) = cond.force_jump(&g).unwrap();
        assert_eq!(outcome, JumpOutcome::Diverges);
        assert_eq!(next.factor, 2 * cond.factor);
        assert!(next.check().is_ok());
    }

    #[test]
    fn low_construction_avoids_pairs_and_decides_jumps() {
        let pairs: Vec<(u64, u64)> = (0..8).map(|i| (2 * i, 2 * i + 1)).collect();
        // Length triggers must come before any width doubling: afterwards the
        // finite universe can no longer certify their bigness.
        let functionals = vec![
            MockFunctional::HaltsOnLength { length: 5, value: 2 },
            MockFunctional::AlwaysHalts { value: 7 },
            MockFunctional::HaltsOnValue { trigger: 21, value: 1 },
            MockFunctional::NeverHalts,
        ];
        let trace = run_low_construction(&pairs, 24, &functionals, 8).unwrap();
        assert!(trace.generic.len() >= 8);
        // Length triggers and constants converge; value triggers force
        // divergence (their halting sets are small under linear widths).
        assert_eq!(trace.outcomes[0], Some(2));
        assert_eq!(trace.outcomes[1], Some(7));
        assert_eq!(trace.outcomes[2], None);
        assert_eq!(trace.outcomes[3], None);
        // The divergence on the value trigger bans it from the generic.
        assert!(!trace.generic.contains(&21));
        for &(a, b) in &pairs {
            assert!(
                !(trace.generic.contains(&a) && trace.generic.contains(&b)),
                "generic picked up the pair ({a}, {b})"
            );
        }
    }
}
