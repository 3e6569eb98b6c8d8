//! Brier's scoring rule on `{0, 1}` and the shifted, scaled variant used as a
//! protocol payment.

use crate::error::{MripError, Result};
use crate::scalar::Scalar;

/// A distribution over `{0, 1}` given by `p1 = Pr[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDistribution<T> {
    p1: T,
}

impl<T: Scalar> BinaryDistribution<T> {
    pub fn new(p1: T) -> Result<Self> {
        if p1 < T::zero() || p1 > T::one() {
            return Err(MripError::Config(format!("probability {p1} outside [0, 1]")));
        }
        Ok(Self { p1 })
    }

    /// `count / total`, e.g. `a / 2^{r+3s}`.
    pub fn from_count(count: u64, total: u64) -> Result<Self> {
        if total == 0 {
            return Err(MripError::Config("empty sample space".into()));
        }
        Self::new(T::from_count(count) / T::from_count(total))
    }

    pub fn p1(&self) -> &T {
        &self.p1
    }

    pub fn p0(&self) -> T {
        T::one() - self.p1.clone()
    }

    pub fn prob(&self, outcome: bool) -> T {
        if outcome {
            self.p1.clone()
        } else {
            self.p0()
        }
    }

    fn sum_of_squares(&self) -> T {
        let p0 = self.p0();
        self.p1.clone() * self.p1.clone() + p0.clone() * p0
    }
}

/// `2·D(ω) − Σ D(ω')² − 1`, with range `[−2, 0]`.
pub fn brier_score<T: Scalar>(report: &BinaryDistribution<T>, outcome: bool) -> T {
    let two = T::from_count(2);
    two * report.prob(outcome) - report.sum_of_squares() - T::one()
}

/// `(2·p_b − (p1² + p0²) + 1) / 11`, with range `[0, 2/11]`.
pub fn protocol_score<T: Scalar>(report: &BinaryDistribution<T>, outcome: bool) -> T {
    let two = T::from_count(2);
    (two * report.prob(outcome) - report.sum_of_squares() + T::one()) / T::from_count(11)
}

/// Expected [`protocol_score`] of `report` when outcomes follow `truth`.
pub fn expected_protocol_score<T: Scalar>(report: &BinaryDistribution<T>, truth: &BinaryDistribution<T>) -> T {
    truth.p1().clone() * protocol_score(report, true) + truth.p0() * protocol_score(report, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Zero;

    fn d(n: i64, den: i64) -> BinaryDistribution<Rational> {
        BinaryDistribution::new(Rational::from_ratio(n, den)).unwrap()
    }

    fn q(n: i64, den: i64) -> Rational {
        Rational::from_ratio(n, den)
    }

    #[test]
    fn brier_extremes() {
        assert_eq!(brier_score(&d(1, 1), true), Rational::zero());
        assert_eq!(brier_score(&d(0, 1), true), q(-2, 1));
        assert_eq!(brier_score(&d(1, 2), false), q(-1, 2));
    }

    #[test]
    fn protocol_score_values() {
        assert_eq!(protocol_score(&d(1, 1), true), q(2, 11));
        assert_eq!(protocol_score(&d(0, 1), true), Rational::zero());
        assert_eq!(protocol_score(&d(1, 2), true), q(3, 22));
        assert_eq!(protocol_score(&d(1, 2), false), q(3, 22));
    }

    #[test]
    fn expected_scores() {
        assert_eq!(expected_protocol_score(&d(1, 1), &d(1, 1)), q(2, 11));
        assert_eq!(expected_protocol_score(&d(1, 2), &d(1, 2)), q(3, 22));
        let misreport = expected_protocol_score(&d(1, 2), &d(1, 1));
        assert_eq!(misreport, q(3, 22));
        assert!(misreport < q(2, 11));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(BinaryDistribution::new(q(3, 2)).is_err());
        assert!(BinaryDistribution::new(q(-1, 5)).is_err());
        assert!(BinaryDistribution::<Rational>::from_count(1, 0).is_err());
    }

    #[test]
    fn generic_over_floats() {
        let report = BinaryDistribution::new(0.25f64).unwrap();
        let exact = protocol_score(&d(1, 4), true);
        let approx = protocol_score(&report, true);
        assert!((approx - 7.0 / 88.0).abs() < 1e-12);
        assert_eq!(exact, q(7, 88));
        let r32 = BinaryDistribution::new(0.25f32).unwrap();
        assert!((brier_score(&r32, false) - (-0.125f32)).abs() < 1e-6);
    }
}
