//! The map ψ from derangements (minus `(1,2)(3,4)...(n-1,n)` for even `n`)
//! onto permutations with exactly one fixed point (minus `(1)(2,3)...(n-1,n)`
//! for odd `n`), and its inverse.
//!
//! Both directions work on canonical cycle notation. Let `k` be the number of
//! leading cycles of the form `(2i-1, 2i)`, and let the next cycle be
//! `(2k+1, a1, a2, ..., aj)`.
//!
//! * Case I (that cycle has at least three elements):
//!   `(1,2)...(2k-1,2k)(2k+1,a1,a2,...,aj)` becomes
//!   `(1)(2,3)...(2k,a1)(2k+1,a2,...,aj)`; with `k = 0` the fixed point is `a1`.
//! * Case II (it is the 2-cycle `(2k+1,a1)`): the following cycle is
//!   `(2k+2,a2,...,aj)` and `(1,2)...(2k-1,2k)(2k+1,a1)(2k+2,a2,...,aj)` becomes
//!   `(1)(2,3)...(2k,2k+1)(2k+2,a1,a2,...,aj)`.
//!
//! Cycles after the rewritten prefix are untouched.

use serde::Serialize;
use thiserror::Error;

use crate::perm::{excluded_fixed, CycleForm, Element};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BijectionError {
    #[error("ExcludedInput: {0} has no image under the bijection")]
    ExcludedInput(String),
    #[error("NotADerangement: {0} has fixed points")]
    NotADerangement(String),
    #[error("NotExactlyOneFixedPoint: {input} has {count} fixed points")]
    NotExactlyOneFixedPoint { input: String, count: usize },
    /// A structural property of canonical cycle notation failed to hold.
    /// Never expected; surfaced so sweeps can count it instead of aborting.
    #[error("InvariantViolated: {0}")]
    InvariantViolated(String),
}

impl BijectionError {
    /// Variant name, as printed at the start of the message.
    pub fn kind(&self) -> &'static str {
        match self {
            BijectionError::ExcludedInput(_) => "ExcludedInput",
            BijectionError::NotADerangement(_) => "NotADerangement",
            BijectionError::NotExactlyOneFixedPoint { .. } => "NotExactlyOneFixedPoint",
            BijectionError::InvariantViolated(_) => "InvariantViolated",
        }
    }
}

/// Which rewriting rule applies to a derangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum BijectionCase {
    #[serde(rename = "i")]
    CaseI { k: usize, a1: Element },
    #[serde(rename = "ii")]
    CaseII { k: usize, a1: Element },
    #[serde(rename = "excluded")]
    Excluded,
}

impl BijectionCase {
    pub fn tag(&self) -> &'static str {
        match self {
            BijectionCase::CaseI { .. } => "i",
            BijectionCase::CaseII { .. } => "ii",
            BijectionCase::Excluded => "excluded",
        }
    }

    pub fn k(&self) -> Option<usize> {
        match *self {
            BijectionCase::CaseI { k, .. } | BijectionCase::CaseII { k, .. } => Some(k),
            BijectionCase::Excluded => None,
        }
    }

    pub fn a1(&self) -> Option<Element> {
        match *self {
            BijectionCase::CaseI { a1, .. } | BijectionCase::CaseII { a1, .. } => Some(a1),
            BijectionCase::Excluded => None,
        }
    }
}

/// The image of a derangement together with the case that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    pub output: CycleForm,
    pub case: BijectionCase,
}

/// Largest `k` such that the canonical cycles begin `(1,2)(3,4)...(2k-1,2k)`.
pub fn prefix_k(c: &CycleForm) -> usize {
    prefix_len(c.cycles())
}

fn prefix_len(cycles: &[Vec<Element>]) -> usize {
    cycles
        .iter()
        .enumerate()
        .take_while(|(i, cycle)| {
            let i = *i as Element;
            cycle.as_slice() == [2 * i + 1, 2 * i + 2]
        })
        .count()
}

fn canonical_derangement(c: &CycleForm) -> Result<CycleForm, BijectionError> {
    let c = c.clone().canonicalize();
    if !c.is_derangement() {
        return Err(BijectionError::NotADerangement(c.to_string()));
    }
    Ok(c)
}

pub fn classify_case(c: &CycleForm) -> Result<BijectionCase, BijectionError> {
    let c = canonical_derangement(c)?;
    case_of(c.cycles())
}

fn case_of(cycles: &[Vec<Element>]) -> Result<BijectionCase, BijectionError> {
    let k = prefix_len(cycles);
    let Some(cycle) = cycles.get(k) else {
        return Ok(BijectionCase::Excluded);
    };
    let start = 2 * k as Element + 1;
    if cycle[0] != start {
        return Err(BijectionError::InvariantViolated(format!(
            "cycle after a prefix of length {k} starts at {} instead of {start}",
            cycle[0]
        )));
    }
    let a1 = cycle[1];
    Ok(if cycle.len() >= 3 {
        BijectionCase::CaseI { k, a1 }
    } else {
        BijectionCase::CaseII { k, a1 }
    })
}

/// Applies ψ to a derangement, reporting the case used.
pub fn psi_mapping(c: &CycleForm) -> Result<Mapping, BijectionError> {
    let canonical = canonical_derangement(c)?;
    let n = canonical.n();
    let cycles = canonical.cycles();
    let case = case_of(cycles)?;

    let (k, a1) = match case {
        BijectionCase::Excluded => {
            return Err(BijectionError::ExcludedInput(canonical.to_string()));
        }
        BijectionCase::CaseI { k, a1 } | BijectionCase::CaseII { k, a1 } => (k, a1),
    };
    if 2 * k >= n {
        return Err(BijectionError::InvariantViolated(format!(
            "prefix length {k} is not below n/2 for n = {n}"
        )));
    }

    let k_el = k as Element;
    let mut out: Vec<Vec<Element>> = Vec::with_capacity(cycles.len() + 1);
    let rest_from = match case {
        BijectionCase::CaseI { .. } => {
            let tail = cycles[k][2..].to_vec();
            if k == 0 {
                out.push(vec![a1]);
                out.push([1].into_iter().chain(tail).collect());
            } else {
                out.push(vec![1]);
                out.extend((1..k_el).map(|i| vec![2 * i, 2 * i + 1]));
                out.push(vec![2 * k_el, a1]);
                out.push([2 * k_el + 1].into_iter().chain(tail).collect());
            }
            k + 1
        }
        BijectionCase::CaseII { .. } => {
            if a1 < 2 * k_el + 3 {
                return Err(BijectionError::InvariantViolated(format!(
                    "case ii with k = {k} has a1 = {a1}, expected at least {}",
                    2 * k_el + 3
                )));
            }
            let next = cycles.get(k + 1).ok_or_else(|| {
                BijectionError::InvariantViolated(format!(
                    "case ii with k = {k} has no cycle after (2k+1, a1)"
                ))
            })?;
            if next[0] != 2 * k_el + 2 {
                return Err(BijectionError::InvariantViolated(format!(
                    "case ii with k = {k}: next cycle starts at {} instead of {}",
                    next[0],
                    2 * k_el + 2
                )));
            }
            out.push(vec![1]);
            out.extend((1..=k_el).map(|i| vec![2 * i, 2 * i + 1]));
            out.push(
                [2 * k_el + 2, a1]
                    .into_iter()
                    .chain(next[1..].iter().copied())
                    .collect(),
            );
            k + 2
        }
        BijectionCase::Excluded => unreachable!(),
    };
    out.extend(cycles[rest_from..].iter().cloned());

    let output = CycleForm::from_cycles_unchecked(n, out).canonicalize();
    Ok(Mapping { output, case })
}

/// ψ on canonical cycle notation; any valid decomposition is accepted.
pub fn psi(c: &CycleForm) -> Result<CycleForm, BijectionError> {
    psi_mapping(c).map(|m| m.output)
}

/// ψ⁻¹ from permutations with exactly one fixed point back to derangements.
pub fn psi_inverse(c: &CycleForm) -> Result<CycleForm, BijectionError> {
    let canonical = c.clone().canonicalize();
    let n = canonical.n();
    let fixed = canonical.fixed_points();
    if fixed.len() != 1 {
        return Err(BijectionError::NotExactlyOneFixedPoint {
            input: canonical.to_string(),
            count: fixed.len(),
        });
    }
    if excluded_fixed(n).is_some_and(|ex| ex == canonical) {
        return Err(BijectionError::ExcludedInput(canonical.to_string()));
    }
    let fixed = fixed[0];
    let cycles = canonical.into_cycles();

    let out: Vec<Vec<Element>> = if fixed != 1 {
        // Merge (ℓ) into the cycle (1, a2, ..., aj) right after 1.
        cycles
            .into_iter()
            .filter(|cyc| cyc.len() > 1)
            .map(|mut cyc| {
                if cyc[0] == 1 {
                    cyc.insert(1, fixed);
                }
                cyc
            })
            .collect()
    } else {
        // Drop (1), shift {2..n} down to {1..n-1}, map, shift back, then
        // replace the new fixed point (m) with (1, m).
        let shifted: Vec<Vec<Element>> = cycles
            .into_iter()
            .skip(1)
            .map(|cyc| cyc.into_iter().map(|e| e - 1).collect())
            .collect();
        let inner = CycleForm::from_cycles_unchecked(n - 1, shifted);
        if prefix_k(&inner) == inner.cycles().len() {
            return Err(BijectionError::InvariantViolated(format!(
                "inner map received the excluded involution {inner}"
            )));
        }
        let mapped = psi(&inner)?;
        mapped
            .into_cycles()
            .into_iter()
            .map(|cyc| {
                let cyc: Vec<Element> = cyc.into_iter().map(|e| e + 1).collect();
                if cyc.len() == 1 {
                    vec![1, cyc[0]]
                } else {
                    cyc
                }
            })
            .collect()
    };

    Ok(CycleForm::from_cycles_unchecked(n, out).canonicalize())
}
