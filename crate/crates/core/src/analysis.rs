//! Utility gaps and the payment-interval sweep.
//!
//! The sweep splits `[0, 1]` into `K` intervals `[(i−1)/K, i/K)`, the last
//! one closed, and for every interval asks two questions: is there a profile
//! whose utility lies in it, and is there one that also answers `c = 1`.
//! The decision is the second answer at the highest non-empty interval.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::engine::{evaluate_family, Enumeration, Evaluation, Profile, Protocol};
use crate::error::{MripError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaClass {
    Constant,
    InversePoly,
    Smaller,
}

impl AlphaClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AlphaClass::Constant => "constant",
            AlphaClass::InversePoly => "1/poly",
            AlphaClass::Smaller => "smaller",
        }
    }
}

/// A gap is constant when at least `constant`, inverse-polynomial when at
/// least `size^-degree`, and smaller otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapThresholds {
    pub constant: (i64, i64),
    pub degree: u32,
}

impl Default for GapThresholds {
    fn default() -> Self {
        Self {
            constant: (1, 16),
            degree: 3,
        }
    }
}

impl GapThresholds {
    pub fn classify<T: Scalar>(&self, gap: &T, size: u64) -> AlphaClass {
        if *gap >= T::from_ratio(self.constant.0, self.constant.1) {
            AlphaClass::Constant
        } else if gap.clone() * T::from_count(size.max(1)).powu(self.degree) >= T::one() {
            AlphaClass::InversePoly
        } else {
            AlphaClass::Smaller
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport<T> {
    pub best_utility: T,
    /// `None` when the family has no profile with the wrong answer bit.
    pub best_wrong_utility: Option<T>,
    pub gap: Option<T>,
    pub alpha_class: Option<AlphaClass>,
}

pub fn gap_from_enumeration<T: Scalar>(
    e: &Enumeration<T>,
    ground_truth: bool,
    size: u64,
    thresholds: &GapThresholds,
) -> GapReport<T> {
    let best = e.max_utility().clone();
    let wrong = e.best_with_bit(!ground_truth).cloned();
    let gap = wrong.as_ref().map(|w| best.clone() - w.clone());
    GapReport {
        alpha_class: gap.as_ref().map(|g| thresholds.classify(g, size)),
        best_utility: best,
        best_wrong_utility: wrong,
        gap,
    }
}

/// Best utility minus the best utility among profiles answering `!ground_truth`.
pub fn utility_gap<T, P>(protocol: &P, family: &[Profile], ground_truth: bool, size: u64) -> Result<GapReport<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    let e = evaluate_family(protocol, family, Evaluation::Auto)?;
    Ok(gap_from_enumeration(&e, ground_truth, size, &GapThresholds::default()))
}

/// The `2K` queries `(i, 0)` and `(i, 1)`, in order; independent of any answer.
pub fn query_plan(intervals: usize) -> impl Iterator<Item = (usize, bool)> {
    (1..=intervals).flat_map(|i| [(i, false), (i, true)])
}

/// 1-based interval of `u ∈ [0, 1]`, or `None` outside `[0, 1]`.
pub fn interval_of<T: Scalar>(u: &T, intervals: usize) -> Option<usize> {
    if *u < T::zero() || *u > T::one() {
        return None;
    }
    let k = intervals as i64;
    // largest i in 0..k with i/k <= u
    let (mut lo, mut hi) = (0i64, k - 1);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if T::from_ratio(mid, k) <= *u {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Some(lo as usize + 1)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Bucket {
    with_c0: bool,
    with_c1: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<T> {
    pub intervals: usize,
    /// Highest non-empty interval `i*`.
    pub chosen_interval: usize,
    /// Answer to `(i*, 1)`.
    pub decision: bool,
    /// Profiles with both answer bits share `i*`.
    pub ambiguous: bool,
    /// Number of queries issued, always `2K`.
    pub queries: usize,
    /// Queries answered "yes", in plan order.
    pub yes: Vec<(usize, bool)>,
    /// Smallest positive difference between two utilities in the family.
    pub min_spacing: Option<T>,
}

impl<T: Scalar> SweepReport<T> {
    /// True when the interval width is below the family's utility spacing.
    pub fn resolves(&self) -> bool {
        self.min_spacing
            .as_ref()
            .map_or(true, |d| d.clone() * T::from_count(self.intervals as u64) > T::one())
    }

    /// `"0"`, `"1"` or `"ambiguous"`.
    pub fn decision_label(&self) -> &'static str {
        match (self.ambiguous, self.decision) {
            (true, _) => "ambiguous",
            (false, true) => "1",
            (false, false) => "0",
        }
    }
}

pub fn min_spacing<T: Scalar>(utilities: &[T]) -> Option<T> {
    let mut sorted = utilities.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    sorted.dedup();
    sorted
        .windows(2)
        .map(|w| w[1].clone() - w[0].clone())
        .fold(None, |m: Option<T>, d| match m {
            Some(m) if m <= d => Some(m),
            _ => Some(d),
        })
}

pub fn sweep_from_enumeration<T: Scalar>(e: &Enumeration<T>, intervals: usize) -> Result<SweepReport<T>> {
    if intervals == 0 {
        return Err(MripError::Config("interval count must be at least 1".into()));
    }
    let mut buckets: BTreeMap<usize, Bucket> = BTreeMap::new();
    for r in &e.ranked {
        if let Some(i) = interval_of(&r.utility, intervals) {
            let b = buckets.entry(i).or_default();
            if r.c {
                b.with_c1 = true;
            } else {
                b.with_c0 = true;
            }
        }
    }
    let answer = |(i, with_c1): (usize, bool)| {
        buckets
            .get(&i)
            .is_some_and(|b| if with_c1 { b.with_c1 } else { b.with_c0 || b.with_c1 })
    };
    let mut queries = 0;
    let mut yes = Vec::new();
    for q in query_plan(intervals) {
        queries += 1;
        if answer(q) {
            yes.push(q);
        }
    }
    let Some(&chosen) = yes.iter().map(|(i, _)| i).max() else {
        return Err(MripError::NoNonNegativeProfile);
    };
    let top = buckets[&chosen];
    let utilities: Vec<T> = e.ranked.iter().map(|r| r.utility.clone()).collect();
    Ok(SweepReport {
        intervals,
        chosen_interval: chosen,
        decision: answer((chosen, true)),
        ambiguous: top.with_c0 && top.with_c1,
        queries,
        yes,
        min_spacing: min_spacing(&utilities),
    })
}

pub fn interval_sweep<T, P>(protocol: &P, family: &[Profile], intervals: usize) -> Result<SweepReport<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    let e = evaluate_family(protocol, family, Evaluation::Auto)?;
    sweep_from_enumeration(&e, intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{FnProfile, Ranked};
    use crate::Rational;

    fn ranked(u: Rational, c: bool) -> Ranked<Rational> {
        Ranked {
            profile: FnProfile::new(format!("u={u} c={c}"), |_, _: &[crate::engine::Bits]| None).into_profile(),
            utility: u,
            c,
        }
    }

    #[test]
    fn intervals_are_half_open() {
        let q = |n, d| Rational::from_ratio(n, d);
        assert_eq!(interval_of(&q(0, 1), 4), Some(1));
        assert_eq!(interval_of(&q(1, 4), 4), Some(2));
        assert_eq!(interval_of(&q(249, 1000), 4), Some(1));
        assert_eq!(interval_of(&q(1, 1), 4), Some(4));
        assert_eq!(interval_of(&q(-1, 2), 4), None);
        assert_eq!(interval_of(&q(1, 1), 1), Some(1));
    }

    #[test]
    fn plan_ignores_answers() {
        let plan: Vec<_> = query_plan(3).collect();
        assert_eq!(plan.len(), 6);
        assert_eq!(plan[0], (1, false));
        assert_eq!(plan[5], (3, true));
    }

    #[test]
    fn coarse_sweep_flags_collisions() {
        let e = Enumeration {
            ranked: vec![
                ranked(Rational::from_ratio(1, 2), false),
                ranked(Rational::from_ratio(5, 11), true),
                ranked(Rational::from_ratio(-1, 1), true),
            ],
        };
        let coarse = sweep_from_enumeration(&e, 1).unwrap();
        assert!(coarse.ambiguous);
        assert_eq!(coarse.decision_label(), "ambiguous");
        assert!(!coarse.resolves());
        let fine = sweep_from_enumeration(&e, 64).unwrap();
        assert!(fine.resolves());
        assert_eq!(fine.decision_label(), "0");
        let negative = Enumeration {
            ranked: vec![ranked(Rational::from_ratio(-1, 3), true)],
        };
        assert!(matches!(
            sweep_from_enumeration(&negative, 4),
            Err(MripError::NoNonNegativeProfile)
        ));
    }

    #[test]
    fn classification() {
        let t = GapThresholds::default();
        assert_eq!(t.classify(&Rational::from_ratio(1, 2), 10), AlphaClass::Constant);
        assert_eq!(t.classify(&Rational::from_ratio(1, 500), 10), AlphaClass::InversePoly);
        assert_eq!(t.classify(&Rational::from_ratio(1, 5000), 10), AlphaClass::Smaller);
    }
}
