//! Streaming enumeration of permutation classes and derangement counting.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::perm::{Element, PermClass, Permutation};

/// Largest `n` enumerated exhaustively unless configured otherwise.
pub const DEFAULT_BOUND: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("BoundExceeded: n = {n} is above the enumeration bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
}

/// All permutations of `{1..n}` in lexicographic one-line order.
///
/// Holds only the current permutation. [`LexPermutations::with_first`]
/// restricts the stream to permutations with a given `π(1)`.
#[derive(Debug, Clone)]
pub struct LexPermutations {
    current: Option<Vec<Element>>,
    pinned: usize,
}

impl LexPermutations {
    pub fn new(n: usize) -> Self {
        LexPermutations {
            current: Some((1..=n as Element).collect()),
            pinned: 0,
        }
    }

    /// Permutations with `π(1) = first`, still in lexicographic order.
    /// Empty when `first` is not in `1..=n`.
    pub fn with_first(n: usize, first: Element) -> Self {
        if first == 0 || first as usize > n {
            return LexPermutations {
                current: None,
                pinned: 1,
            };
        }
        let image = std::iter::once(first)
            .chain((1..=n as Element).filter(|&e| e != first))
            .collect();
        LexPermutations {
            current: Some(image),
            pinned: 1,
        }
    }
}

/// Advances `xs` to its lexicographic successor; false when `xs` was the last.
fn next_permutation(xs: &mut [Element]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs
        .iter()
        .rposition(|&x| x > xs[i])
        .expect("a larger element exists to the right of the pivot");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Self::Item> {
        let mut image = self.current.take()?;
        let out = Permutation::from_image_unchecked(image.clone());
        if next_permutation(&mut image[self.pinned..]) {
            self.current = Some(image);
        }
        Some(out)
    }
}

/// Members of `class` among permutations of `{1..n}`, lexicographic, each once.
pub fn iter_class(n: usize, class: PermClass) -> impl Iterator<Item = Permutation> {
    LexPermutations::new(n).filter(move |p| class.contains(p))
}

/// `d_0..=d_{n_max}` from `d_n = n·d_{n-1} + (-1)^n`.
pub fn count_d_rec1(n_max: usize) -> Vec<BigUint> {
    let mut d = Vec::with_capacity(n_max + 1);
    d.push(BigUint::one());
    for n in 1..=n_max {
        let scaled = &d[n - 1] * n;
        // n·d_{n-1} >= 1 whenever n is odd (d_{n-1} > 0 for even n-1).
        d.push(if n.is_multiple_of(2) {
            scaled + 1u32
        } else {
            scaled - 1u32
        });
    }
    d
}

/// `d_0..=d_{n_max}` from `d_n = (n-1)(d_{n-1} + d_{n-2})`.
pub fn count_d_rec2(n_max: usize) -> Vec<BigUint> {
    let mut d = vec![BigUint::one()];
    if n_max >= 1 {
        d.push(BigUint::zero());
    }
    for n in 2..=n_max {
        let next = (&d[n - 1] + &d[n - 2]) * (n - 1);
        d.push(next);
    }
    d
}

fn check_bound(n: usize, bound: usize) -> Result<(), EnumerateError> {
    if n > bound {
        Err(EnumerateError::BoundExceeded { n, bound })
    } else {
        Ok(())
    }
}

/// Cardinality of `class` by enumerating all of `S_n`.
pub fn count_class_bruteforce(
    n: usize,
    class: PermClass,
    bound: usize,
) -> Result<u64, EnumerateError> {
    check_bound(n, bound)?;
    Ok(iter_class(n, class).count() as u64)
}

/// Class sizes gathered in a single pass over `S_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassCounts {
    pub s: u64,
    pub d: u64,
    pub f: u64,
    pub dstar: u64,
    pub fstar: u64,
}

impl ClassCounts {
    pub fn get(&self, class: PermClass) -> u64 {
        match class {
            PermClass::S => self.s,
            PermClass::D => self.d,
            PermClass::F => self.f,
            PermClass::DStar => self.dstar,
            PermClass::FStar => self.fstar,
        }
    }
}

pub fn count_all_bruteforce(n: usize, bound: usize) -> Result<ClassCounts, EnumerateError> {
    check_bound(n, bound)?;
    let mut counts = ClassCounts::default();
    for p in LexPermutations::new(n) {
        counts.s += 1;
        for class in crate::perm::classify(&p) {
            match class {
                PermClass::S => {}
                PermClass::D => counts.d += 1,
                PermClass::F => counts.f += 1,
                PermClass::DStar => counts.dstar += 1,
                PermClass::FStar => counts.fstar += 1,
            }
        }
    }
    Ok(counts)
}

/// Which counting routes agree for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MethodAgreement {
    /// `d_n - n·d_{n-1} = (-1)^n` holds for the first recurrence's values.
    pub recurrence_1: bool,
    /// The second recurrence gives the same `d_n`.
    pub recurrence_2: bool,
    /// Enumerated `d_n`, `|F_n|`, `|D*_n|` and `|F*_n|` all match;
    /// `None` when `n` is above the enumeration bound.
    pub brute_force: Option<bool>,
}

impl MethodAgreement {
    pub fn all(&self) -> bool {
        self.recurrence_1 && self.recurrence_2 && self.brute_force.unwrap_or(true)
    }
}

/// Counts for one `n`. Big-integer fields serialize as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRecord {
    pub n: usize,
    #[serde(serialize_with = "as_decimal")]
    pub d_n: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub d_n_rec2: BigUint,
    pub d_n_brute: Option<u64>,
    /// `n·d_{n-1}`, zero for `n = 0`.
    #[serde(serialize_with = "as_decimal")]
    pub f_n: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub dstar_n: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub fstar_n: BigUint,
    pub brute: Option<ClassCounts>,
    pub method_agreement: MethodAgreement,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CountRecord {
    /// Builds the record for `n` from precomputed recurrence tables (each of
    /// length at least `n + 1`) and optional enumerated counts.
    pub fn new(n: usize, rec1: &[BigUint], rec2: &[BigUint], brute: Option<ClassCounts>) -> Self {
        let d_n = rec1[n].clone();
        let f_n = if n == 0 {
            BigUint::zero()
        } else {
            &rec1[n - 1] * n
        };
        // The excluded involution exists in D_n for even n, in F_n for odd n
        // (n >= 1).
        let dstar_n = if n.is_multiple_of(2) {
            &d_n - 1u32
        } else {
            d_n.clone()
        };
        let fstar_n = if !n.is_multiple_of(2) {
            &f_n - 1u32
        } else {
            f_n.clone()
        };

        let recurrence_1 = n == 0 || {
            let lhs = &d_n + if !n.is_multiple_of(2) { 1u32 } else { 0 };
            let rhs = &f_n + if n.is_multiple_of(2) { 1u32 } else { 0 };
            lhs == rhs
        };
        let recurrence_2 = rec2[n] == d_n;
        let brute_force = brute.map(|b| {
            BigUint::from(b.d) == d_n
                && BigUint::from(b.f) == f_n
                && BigUint::from(b.dstar) == dstar_n
                && BigUint::from(b.fstar) == fstar_n
                && b.dstar == b.fstar
        });

        CountRecord {
            n,
            d_n,
            d_n_rec2: rec2[n].clone(),
            d_n_brute: brute.map(|b| b.d),
            f_n,
            dstar_n,
            fstar_n,
            brute,
            method_agreement: MethodAgreement {
                recurrence_1,
                recurrence_2,
                brute_force,
            },
        }
    }
}

/// One record per `n` in `0..=max_n`; enumeration runs where `n <= bound`.
pub fn count_table(max_n: usize, bound: usize) -> Vec<CountRecord> {
    let rec1 = count_d_rec1(max_n);
    let rec2 = count_d_rec2(max_n);
    (0..=max_n)
        .map(|n| {
            let brute = count_all_bruteforce(n, bound).ok();
            CountRecord::new(n, &rec1, &rec2, brute)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn images(it: impl Iterator<Item = Permutation>) -> Vec<Vec<Element>> {
        it.map(|p| p.image().to_vec()).collect()
    }

    #[test]
    fn derangements_of_three() {
        assert_eq!(
            images(iter_class(3, PermClass::D)),
            vec![vec![2, 3, 1], vec![3, 1, 2]]
        );
    }

    #[test]
    fn small_classes() {
        assert_eq!(iter_class(4, PermClass::DStar).count(), 8);
        assert_eq!(iter_class(2, PermClass::F).count(), 0);
        assert_eq!(images(LexPermutations::new(0)), vec![Vec::<Element>::new()]);
        assert_eq!(images(LexPermutations::new(1)), vec![vec![1]]);
    }

    #[test]
    fn lex_order_s3() {
        assert_eq!(
            images(LexPermutations::new(3)),
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1]
            ]
        );
    }

    #[test]
    fn pinned_first_matches_filter() {
        for n in 0..=6 {
            for first in 0..=n as Element + 1 {
                let expected: Vec<_> = LexPermutations::new(n)
                    .filter(|p| n > 0 && p.apply(1) == first)
                    .collect();
                let got: Vec<_> = LexPermutations::with_first(n, first).collect();
                assert_eq!(got, expected, "n={n} first={first}");
            }
        }
    }

    #[test]
    fn recurrence_values() {
        let d1 = count_d_rec1(9);
        assert_eq!(d1[1], BigUint::zero());
        assert_eq!(d1[4], BigUint::from(9u32));
        assert_eq!(d1[9], BigUint::from(133_496u32));
        let d2 = count_d_rec2(6);
        assert_eq!(d2[2], BigUint::one());
        assert_eq!(d2[4], BigUint::from(9u32));
        assert_eq!(d2[6], BigUint::from(265u32));
        assert_eq!(count_d_rec1(0).len(), 1);
        assert_eq!(count_d_rec2(0), vec![BigUint::one()]);
        assert_eq!(count_d_rec2(1).len(), 2);
    }

    #[test]
    fn recurrences_go_past_u64() {
        let d1 = count_d_rec1(30);
        let d2 = count_d_rec2(30);
        assert_eq!(d1, d2);
        assert!(d1[21] > BigUint::from(u64::MAX));
        assert!(d1[20] <= BigUint::from(u64::MAX));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(
            count_class_bruteforce(4, PermClass::D, DEFAULT_BOUND),
            Ok(9)
        );
        assert_eq!(
            count_class_bruteforce(5, PermClass::FStar, DEFAULT_BOUND),
            Ok(44)
        );
        assert_eq!(
            count_class_bruteforce(0, PermClass::S, DEFAULT_BOUND),
            Ok(1)
        );
        assert_eq!(
            count_class_bruteforce(10, PermClass::D, DEFAULT_BOUND),
            Err(EnumerateError::BoundExceeded { n: 10, bound: 9 })
        );
    }

    #[test]
    fn single_pass_counts_match_per_class_counts() {
        for n in 0..=6 {
            let all = count_all_bruteforce(n, DEFAULT_BOUND).unwrap();
            for class in PermClass::ALL {
                assert_eq!(
                    all.get(class),
                    count_class_bruteforce(n, class, DEFAULT_BOUND).unwrap()
                );
            }
        }
    }

    #[test]
    fn count_records_agree() {
        let table = count_table(12, 6);
        for r in &table {
            assert!(r.method_agreement.all(), "{r:?}");
            assert_eq!(r.dstar_n, r.fstar_n);
            assert_eq!(r.brute.is_some(), r.n <= 6);
        }
        assert_eq!(table[0].d_n, BigUint::one());
        assert_eq!(table[0].dstar_n, BigUint::zero());
        assert_eq!(table[4].f_n, BigUint::from(8u32));
        assert_eq!(table[1].fstar_n, BigUint::zero());
    }

    #[test]
    fn count_record_flags_disagreement() {
        let rec1 = count_d_rec1(4);
        let mut rec2 = count_d_rec2(4);
        rec2[4] += 1u32;
        let r = CountRecord::new(4, &rec1, &rec2, None);
        assert!(!r.method_agreement.recurrence_2);
        assert!(!r.method_agreement.all());

        let mut brute = count_all_bruteforce(4, 9).unwrap();
        brute.f += 1;
        let r = CountRecord::new(4, &rec1, &count_d_rec2(4), Some(brute));
        assert_eq!(r.method_agreement.brute_force, Some(false));
    }
}
