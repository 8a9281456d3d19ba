//! Numeric codings: the diagonal pairing function, right-folded tuple codes,
//! colex ranks for increasing tuples, and finite-set codecs (plain bit coding
//! and sized families in colex order).

use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Diagonal pairing `pair(x, y) = (x + y)(x + y + 1)/2 + x`.
///
/// Bijective on pairs of naturals, and monotone in both coordinates: if
/// `x < u` and `y < v` then `pair(x, y) < pair(u, v)`.
pub fn pair(x: u64, y: u64) -> u64 {
    let s = (x as u128) + (y as u128);
    (s * (s + 1) / 2 + x as u128) as u64
}

/// Inverse of [`pair`].
pub fn unpair(code: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= code.
    let c = code as u128;
    let mut s = (((8.0 * code as f64 + 1.0).sqrt() - 1.0) / 2.0) as u128;
    while s * (s + 1) / 2 > c {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= c {
        s += 1;
    }
    let x = c - s * (s + 1) / 2;
    let y = s - x;
    (x as u64, y as u64)
}

/// Right-folded tuple code: `code([a]) = a`, `code([a, rest..]) = pair(a, code(rest))`.
///
/// The empty tuple codes to 0 by convention.
pub fn tuple_encode(t: &[u64]) -> u64 {
    match t.split_last() {
        None => 0,
        Some((last, init)) => init.iter().rev().fold(*last, |acc, &x| pair(x, acc)),
    }
}

/// Decode a code as a tuple of the given length (inverse of [`tuple_encode`]
/// for `len >= 1`).
pub fn tuple_decode(code: u64, len: usize) -> Vec<u64> {
    assert!(len >= 1, "tuple length must be positive");
    let mut out = Vec::with_capacity(len);
    let mut rest = code;
    for _ in 0..len - 1 {
        let (x, r) = unpair(rest);
        out.push(x);
        rest = r;
    }
    out.push(rest);
    out
}

/// Uniform component extraction: the i-th coordinate of the tuple coded by
/// `code`, read through the right fold. Agrees with `tuple_decode(code, len)[i]`
/// whenever `i + 2 <= len`.
pub fn tuple_component(code: u64, i: usize) -> u64 {
    let mut rest = code;
    for _ in 0..i {
        rest = unpair(rest).1;
    }
    unpair(rest).0
}

/// Binomial coefficient with saturation; enough headroom for rank arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    acc
}

/// Colex rank of a strictly increasing tuple: `rank(x_1 < ... < x_k) =
/// C(x_1,1) + C(x_2,2) + ... + C(x_k,k)`. Bijective from increasing k-tuples
/// onto the naturals, and monotone coordinatewise.
pub fn tuple_rank(t: &[u64]) -> u64 {
    debug_assert!(t.windows(2).all(|w| w[0] < w[1]), "tuple must be increasing");
    let mut acc: u128 = 0;
    for (i, &x) in t.iter().enumerate() {
        acc += binomial(x, i as u64 + 1);
    }
    acc as u64
}

/// Inverse of [`tuple_rank`] at arity `k`.
pub fn tuple_unrank(rank: u64, k: usize) -> Vec<u64> {
    let mut out = vec![0u64; k];
    let mut rem = rank as u128;
    for i in (1..=k).rev() {
        // Greatest x with C(x, i) <= rem.
        let mut x = i as u64 - 1;
        while binomial(x + 1, i as u64) <= rem {
            x += 1;
        }
        rem -= binomial(x, i as u64);
        out[i - 1] = x;
    }
    out
}

/// Colex comparison of two increasing tuples of the same arity: compare the
/// largest coordinates first.
pub fn colex_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Iterate all strictly increasing `k`-tuples with entries `< n`, in colex
/// order (i.e. by increasing [`tuple_rank`]).
pub fn increasing_tuples(n: u64, k: usize) -> IncreasingTuples {
    IncreasingTuples {
        n,
        current: if k == 0 || (k as u64) <= n {
            Some((0..k as u64).collect())
        } else {
            None
        },
        started: false,
    }
}

pub struct IncreasingTuples {
    n: u64,
    current: Option<Vec<u64>>,
    started: bool,
}

impl Iterator for IncreasingTuples {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let cur = self.current.as_mut()?;
        if !self.started {
            self.started = true;
            return Some(cur.clone());
        }
        let k = cur.len();
        if k == 0 {
            self.current = None;
            return None;
        }
        // Colex successor: bump the lowest coordinate that can move without
        // colliding with the one above it; reset everything below.
        let mut i = 0;
        loop {
            let cap = if i + 1 < k { cur[i + 1] } else { self.n };
            if cur[i] + 1 < cap {
                cur[i] += 1;
                for j in 0..i {
                    cur[j] = j as u64;
                }
                return Some(cur.clone());
            }
            i += 1;
            if i == k {
                self.current = None;
                return None;
            }
        }
    }
}

/// Plain bit coding of finite sets: bit `j` of the code is set iff `j` is in
/// the set.
pub fn set_decode(code: u64) -> BTreeSet<u64> {
    (0..64).filter(|j| code >> j & 1 == 1).collect()
}

/// Inverse of [`set_decode`]. Fails if an element is 64 or more.
pub fn set_encode(set: &BTreeSet<u64>) -> Result<u64> {
    let mut code = 0u64;
    for &x in set {
        if x >= 64 {
            return Err(Error::SetElementTooLarge { element: x });
        }
        code |= 1 << x;
    }
    Ok(code)
}

/// Sized family: the bijective colex enumeration of all sets of `size`
/// naturals, each `>= min_value`. Index 0 is `{min_value, ..., min_value + size - 1}`.
pub fn sized_decode(index: u64, size: usize, min_value: u64) -> BTreeSet<u64> {
    tuple_unrank(index, size)
        .into_iter()
        .map(|z| z + min_value)
        .collect()
}

/// Inverse of [`sized_decode`]. Fails when the set has the wrong size or an
/// element below `min_value`.
pub fn sized_encode(set: &BTreeSet<u64>, size: usize, min_value: u64) -> Result<u64> {
    if set.len() != size {
        return Err(Error::SizedFamilyShape {
            expected_size: size,
            got_size: set.len(),
            min_value,
        });
    }
    let shifted: Vec<u64> = set
        .iter()
        .map(|&x| {
            x.checked_sub(min_value).ok_or(Error::SizedFamilyShape {
                expected_size: size,
                got_size: set.len(),
                min_value,
            })
        })
        .collect::<Result<_>>()?;
    Ok(tuple_rank(&shifted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_examples() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(0, 1), 1);
        assert_eq!(pair(1, 0), 2);
        assert_eq!(pair(1, 1), 4);
        assert_eq!(pair(0, 2), 3);
        assert_eq!(pair(2, 0), 5);
    }

    #[test]
    fn unpair_round_trip() {
        for code in 0..10_000u64 {
            let (x, y) = unpair(code);
            assert_eq!(pair(x, y), code);
        }
    }

    #[test]
    fn pair_monotone_in_both_coordinates() {
        for x in 0..25u64 {
            for y in 0..25u64 {
                for u in x + 1..26 {
                    for v in y + 1..26 {
                        assert!(pair(x, y) < pair(u, v));
                    }
                }
            }
        }
    }

    #[test]
    fn tuple_code_round_trip() {
        let t = [3u64, 1, 4, 1, 5];
        let code = tuple_encode(&t);
        assert_eq!(tuple_decode(code, 5), t.to_vec());
        assert_eq!(tuple_encode(&[7]), 7);
        assert_eq!(tuple_encode(&[1, 2]), pair(1, 2));
    }

    #[test]
    fn tuple_component_uniform_extraction() {
        let t = [9u64, 2, 7, 4];
        let code = tuple_encode(&t);
        for i in 0..3 {
            assert_eq!(tuple_component(code, i), t[i]);
        }
    }

    #[test]
    fn rank_is_colex_and_bijective() {
        let tuples: Vec<Vec<u64>> = increasing_tuples(9, 3).collect();
        assert_eq!(tuples.len(), binomial(9, 3) as usize);
        for (r, t) in tuples.iter().enumerate() {
            assert_eq!(tuple_rank(t), r as u64);
            assert_eq!(tuple_unrank(r as u64, 3), *t);
        }
        for w in tuples.windows(2) {
            assert_eq!(colex_cmp(&w[0], &w[1]), std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn set_codec_round_trip() {
        for code in 0..2_000u64 {
            assert_eq!(set_encode(&set_decode(code)).unwrap(), code);
        }
        assert_eq!(set_decode(0b1011), [0, 1, 3].into_iter().collect());
    }

    #[test]
    fn sized_family_round_trip() {
        for index in 0..500u64 {
            let set = sized_decode(index, 3, 5);
            assert!(set.iter().all(|&x| x >= 5));
            assert_eq!(set.len(), 3);
            assert_eq!(sized_encode(&set, 3, 5).unwrap(), index);
        }
        // Index 0 is the least set in colex order.
        assert_eq!(sized_decode(0, 3, 1), [1, 2, 3].into_iter().collect());
        assert_eq!(sized_decode(0, 4, 0), [0, 1, 2, 3].into_iter().collect());
    }

    #[test]
    fn sized_family_rejects_bad_shape() {
        let set: BTreeSet<u64> = [0, 1].into_iter().collect();
        assert!(sized_encode(&set, 3, 0).is_err());
        assert!(sized_encode(&set, 2, 1).is_err());
    }
}
