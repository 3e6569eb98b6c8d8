//! Desk-scale stand-ins for a two-prover MIP proving membership in Oracle-3SAT.
//!
//! Variant A is exhaustive: P1 sends the whole oracle table and the verifier
//! checks every assignment. Variant B spot-checks `m` random assignments
//! against P1's answers and cross-checks one of the queried points with P2.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::oracle3sat::{count_satisfying, Oracle3SatInstance, OracleTable};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MipVariant {
    Exhaustive,
    /// `repetitions: None` picks the smallest `m` with `(1 − 1/N)^m ≤ 1/3`.
    Sampled { repetitions: Option<u32> },
}

impl Default for MipVariant {
    fn default() -> Self {
        MipVariant::Exhaustive
    }
}

impl MipVariant {
    pub fn sampled() -> Self {
        MipVariant::Sampled { repetitions: None }
    }

    /// Spot-check count on `instance`; 0 for the exhaustive variant.
    pub fn repetitions(&self, instance: &Oracle3SatInstance) -> u32 {
        match *self {
            MipVariant::Exhaustive => 0,
            MipVariant::Sampled { repetitions: Some(m) } => m,
            MipVariant::Sampled { repetitions: None } => default_repetitions(instance.num_assignments()),
        }
    }
}

/// Smallest `m ≥ 1` with `(1 − 1/n)^m ≤ 1/3`, i.e. `3·(n−1)^m ≤ n^m`.
pub fn default_repetitions(n: u64) -> u32 {
    let (num, den) = (BigInt::from(n - 1), BigInt::from(n));
    let (mut lhs, mut rhs) = (BigInt::from(3), BigInt::one());
    let mut m = 0;
    loop {
        m += 1;
        lhs *= &num;
        rhs *= &den;
        if lhs <= rhs {
            return m;
        }
    }
}

/// True when every assignment satisfies the instance under `oracle`.
pub fn exhaustive_accepts(instance: &Oracle3SatInstance, oracle: &OracleTable) -> bool {
    count_satisfying(instance, oracle) == instance.num_assignments()
}

/// `Σ_w sat(w) · #{k : A1(b_k) = A2(b_k)}` with `sat` taken under `p1`.
pub fn weighted_matches(instance: &Oracle3SatInstance, p1: &OracleTable, p2: &OracleTable) -> u64 {
    (0..instance.num_assignments())
        .map(|w| {
            let qs = [1, 2, 3].map(|k| instance.query_of(w, k));
            let answers = qs.map(|b| p1.get(b));
            if !instance.satisfied_packed(w, answers) {
                return 0;
            }
            qs.iter().filter(|&&b| p1.get(b) == p2.get(b)).count() as u64
        })
        .sum()
}

/// Acceptance probability when P1 and P2 answer from fixed tables.
///
/// For the sampled variant this is `(M / 3N) · f^{m−1}` with `f = a'/N` for
/// P1's table and `M` from [`weighted_matches`]; it reduces to `f^m` when the
/// tables agree.
pub fn accept_probability<T: Scalar>(
    instance: &Oracle3SatInstance,
    variant: MipVariant,
    p1: &OracleTable,
    p2: &OracleTable,
) -> T {
    let n = instance.num_assignments();
    match variant {
        MipVariant::Exhaustive => T::from_count(u64::from(exhaustive_accepts(instance, p1))),
        MipVariant::Sampled { .. } => {
            let m = variant.repetitions(instance);
            let f = T::from_count(count_satisfying(instance, p1)) / T::from_count(n);
            let matched = T::from_count(weighted_matches(instance, p1, p2)) / T::from_count(3 * n);
            matched * f.powu(m - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn repetition_count_is_minimal() {
        for n in [2u64, 8, 16, 64] {
            let m = default_repetitions(n);
            let f = Rational::from_ratio(n as i64 - 1, n as i64);
            let third = Rational::from_ratio(1, 3);
            assert!(f.powu(m) <= third, "n={n}");
            assert!(m == 1 || f.powu(m - 1) > third, "n={n}");
        }
        assert_eq!(default_repetitions(2), 2);
        assert_eq!(default_repetitions(8), 9);
    }

    #[test]
    fn agreeing_tables_give_f_to_the_m() {
        let inst = Oracle3SatInstance::new(1, 1, vec![[1, 5, -2], [-1, 6, 7]]).unwrap();
        let a = OracleTable::constant(1, false);
        let v = MipVariant::Sampled { repetitions: Some(3) };
        let f = Rational::from_ratio(count_satisfying(&inst, &a) as i64, 16);
        assert_eq!(accept_probability::<Rational>(&inst, v, &a, &a), f.powu(3));
        let taut = Oracle3SatInstance::tautology(1, 1).unwrap();
        assert_eq!(
            accept_probability::<Rational>(&taut, MipVariant::Exhaustive, &a, &a),
            Rational::from_count(1)
        );
    }
}
