//! Symmetrization over index slots and multiset/tuple conversions.

use std::collections::BTreeMap;
use std::ops::Range;

use itertools::Itertools;

use super::coeff::Coeff;
use super::rational::{factorial, GaussianRational, Rational};

/// Averages an indexed array over all permutations of the index positions
/// in `slots`. Keys are index tuples; absent keys are zero.
pub fn symmetrize<T: Coeff>(t: &BTreeMap<Vec<usize>, T>, slots: Range<usize>) -> BTreeMap<Vec<usize>, T> {
    let n = slots.len();
    let inv = GaussianRational::real(factorial(n).recip().unwrap());
    let mut out: BTreeMap<Vec<usize>, T> = BTreeMap::new();
    for (key, v) in t {
        for perm in (0..n).permutations(n) {
            let mut k = key.clone();
            for (i, &p) in perm.iter().enumerate() {
                k[slots.start + i] = key[slots.start + p];
            }
            let c = v.scale_c(&inv);
            match out.get_mut(&k) {
                Some(x) => *x = x.add_c(&c),
                None => {
                    out.insert(k, c);
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero_c());
    out
}

/// Multiplicity vector (length `m`) of an index tuple over `0..m`.
pub fn tuple_to_exps(tuple: &[usize], m: usize) -> Vec<u32> {
    let mut e = vec![0u32; m];
    for &i in tuple {
        e[i] += 1;
    }
    e
}

/// The sorted tuple with the given multiplicities.
pub fn exps_to_sorted_tuple(exps: &[u32]) -> Vec<usize> {
    exps.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
}

/// All distinct orderings of the multiset with multiplicities `exps`,
/// in lexicographic order.
pub fn tuples_of(exps: &[u32]) -> Vec<Vec<usize>> {
    let base = exps_to_sorted_tuple(exps);
    let n = base.len();
    let mut out: Vec<Vec<usize>> = base.iter().copied().permutations(n).unique().collect();
    out.sort();
    out
}

/// Number of orderings of a multiset: `|α|! / α!`.
pub fn multiset_count(exps: &[u32]) -> Rational {
    let n: u32 = exps.iter().sum();
    let den = exps.iter().fold(Rational::one(), |a, &e| &a * &factorial(e as usize));
    &factorial(n as usize) / &den
}

/// Every tuple over `0..m` of length `n`.
pub fn all_tuples(m: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    std::iter::repeat_n(0..m, n).multi_cartesian_product().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn transposition_average() {
        let mut t = BTreeMap::new();
        t.insert(vec![0, 1], g(3));
        t.insert(vec![1, 0], g(5));
        let s = symmetrize(&t, 0..2);
        assert_eq!(s[&vec![0, 1]], g(4));
        assert_eq!(s[&vec![1, 0]], g(4));
    }

    #[test]
    fn symmetric_input_unchanged() {
        let mut t = BTreeMap::new();
        t.insert(vec![0, 1], g(3));
        t.insert(vec![1, 0], g(3));
        t.insert(vec![1, 1], g(7));
        assert_eq!(symmetrize(&t, 0..2), t);
    }

    #[test]
    fn tuple_helpers() {
        assert_eq!(tuples_of(&[1, 2]), vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        assert_eq!(multiset_count(&[1, 2]), Rational::from_int(3));
        assert_eq!(tuple_to_exps(&[1, 0, 1], 2), vec![1, 2]);
        assert_eq!(all_tuples(2, 2).len(), 4);
    }

    proptest! {
        #[test]
        fn symmetrize_is_idempotent_and_invariant(vals in proptest::collection::vec(-5i64..5, 8)) {
            let mut t = BTreeMap::new();
            for (i, k) in all_tuples(2, 3).into_iter().enumerate() {
                t.insert(k, g(vals[i]));
            }
            t.retain(|_, v: &mut GaussianRational| !v.is_zero());
            let s = symmetrize(&t, 0..3);
            prop_assert_eq!(&symmetrize(&s, 0..3), &s);
            for (k, v) in &s {
                let mut k2 = k.clone();
                k2.swap(0, 2);
                prop_assert_eq!(s.get(&k2), Some(v));
            }
        }
    }
}
