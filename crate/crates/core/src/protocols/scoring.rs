//! The Brier-scoring protocol for Oracle-3SAT.
//!
//! P1 announces `c` and a count `a` of satisfying assignments. The verifier
//! draws `w, w'` and `k ∈ {1..6}`, asks P1 for `A(b1..b6)` (the queries of
//! `w` then `w'`) and P2 for `A(b_k)`, and scores `a/N` against the outcome
//! `B(w', A(b4), A(b5), A(b6))` whenever `B(w, A(b1), A(b2), A(b3))` holds.

use std::any::Any;
use std::sync::Arc;

use serde_json::json;

use super::answer_queries;
use crate::engine::{width_for, Action, BitWriter, Bits, Profile, Protocol, Strategy};
use crate::error::Result;
use crate::oracle3sat::{count_satisfying, Oracle3SatInstance, OracleTable};
use crate::scalar::Scalar;
use crate::scoring::{protocol_score, BinaryDistribution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigScoring {
    instance: Oracle3SatInstance,
}

pub fn make_fig_scoring(instance: Oracle3SatInstance) -> FigScoring {
    FigScoring { instance }
}

impl FigScoring {
    pub fn instance(&self) -> &Oracle3SatInstance {
        &self.instance
    }

    fn n(&self) -> u64 {
        self.instance.num_assignments()
    }

    /// Width of the count field in P1's opening message.
    pub fn count_width(&self) -> u32 {
        width_for(self.n())
    }

    /// Opening message `c ‖ a`.
    pub fn opening(&self, c: bool, a: u64) -> Bits {
        let mut w = BitWriter::new();
        w.push_bit(c).push_u64(a, self.count_width());
        w.finish()
    }

    fn parse_opening(&self, m: &Bits) -> Option<(bool, u64)> {
        let mut r = m.reader();
        let c = r.bit()?;
        let a = r.u64(self.count_width())?;
        (r.is_done() && a <= self.n()).then_some((c, a))
    }

    /// `(b1, …, b6)` for coins `(w, w', k−1)`.
    pub fn queries(&self, coins: &[u64]) -> [usize; 6] {
        let (w, w2) = (coins[0], coins[1]);
        [
            self.instance.query_of(w, 1),
            self.instance.query_of(w, 2),
            self.instance.query_of(w, 3),
            self.instance.query_of(w2, 1),
            self.instance.query_of(w2, 2),
            self.instance.query_of(w2, 3),
        ]
    }

    fn consistent(&self, c: bool, a: u64) -> bool {
        c == (a == self.n())
    }
}

impl<T: Scalar> Protocol<T> for FigScoring {
    fn num_provers(&self) -> usize {
        2
    }

    fn num_rounds(&self) -> usize {
        3
    }

    fn coin_radices(&self) -> Vec<u64> {
        vec![self.n(), self.n(), 6]
    }

    fn speaks_first(&self, prover: usize) -> bool {
        prover == 0
    }

    fn step(&self, coins: &[u64], tr: &[Vec<Bits>]) -> Result<Action<T>> {
        let penalty = Ok(Action::Pay(-T::one()));
        let Some((c, a)) = self.parse_opening(&tr[0][0]) else {
            return penalty;
        };
        if !self.consistent(c, a) {
            return penalty;
        }
        let s = self.instance.s();
        let bs = self.queries(coins);
        let k = coins[2] as usize;
        if tr[0].len() == 1 {
            let mut w = BitWriter::new();
            for &b in &bs {
                w.push_u64(b as u64, s);
            }
            return Ok(Action::Query(vec![Some(w.finish()), Some(Bits::from_u64(bs[k] as u64, s))]));
        }
        let (answers, single) = (&tr[0][2], &tr[1][2]);
        if answers.len() != 6 || single.len() != 1 {
            return penalty;
        }
        let v = answers.as_slice();
        if single.first() != Some(v[k]) {
            return penalty;
        }
        if !self.instance.satisfied_packed(coins[0], [v[0], v[1], v[2]]) {
            return Ok(Action::Pay(T::zero()));
        }
        let outcome = self.instance.satisfied_packed(coins[1], [v[3], v[4], v[5]]);
        let report = BinaryDistribution::from_count(a, self.n())?;
        Ok(Action::Pay(protocol_score(&report, outcome)))
    }

    fn name(&self) -> String {
        "scoring".into()
    }

    fn params(&self) -> serde_json::Value {
        json!({ "r": self.instance.r(), "s": self.instance.s(), "clauses": self.instance.clauses() })
    }

    fn grouped_utility(&self, profile: &dyn Strategy) -> Option<Result<T>> {
        let p = profile.as_any().downcast_ref::<CommittedOracleProfile>()?;
        if p.oracle.width() != self.instance.s() || p.a >= 1u64 << self.count_width() {
            return None;
        }
        if p.a > self.n() || !self.consistent(p.c, p.a) {
            return Some(Ok(-T::one()));
        }
        Some((|| {
            let q = BinaryDistribution::<T>::from_count(count_satisfying(&self.instance, &p.oracle), self.n())?;
            let report = BinaryDistribution::from_count(p.a, self.n())?;
            let score = q.p1().clone() * protocol_score(&report, true) + q.p0() * protocol_score(&report, false);
            Ok(q.p1().clone() * score)
        })())
    }
}

/// Both provers answer from the same table; P1 opens with `c ‖ a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommittedOracleProfile {
    pub c: bool,
    pub a: u64,
    pub oracle: OracleTable,
    count_width: u32,
}

impl CommittedOracleProfile {
    pub fn new(instance: &Oracle3SatInstance, c: bool, a: u64, oracle: OracleTable) -> Self {
        Self {
            c,
            a,
            oracle,
            count_width: width_for(instance.num_assignments()),
        }
    }

    /// `c = 1`, `a = N` and the lexicographically first maximizing oracle
    /// when the instance is satisfiable; otherwise `c = 0` and `a = a*`.
    pub fn honest(instance: &Oracle3SatInstance) -> Result<Self> {
        let d = crate::oracle3sat::decide_oracle3sat(instance)?;
        Ok(Self::new(instance, d.member, d.a_star, d.witness))
    }

    /// Every `(c, a, A)` with `a ∈ 0..=N`.
    pub fn family(instance: &Oracle3SatInstance) -> Vec<Profile> {
        let n = instance.num_assignments();
        let mut out = Vec::new();
        for c in [false, true] {
            for a in 0..=n {
                for oracle in OracleTable::all(instance.s()) {
                    out.push(Arc::new(Self::new(instance, c, a, oracle)) as Profile);
                }
            }
        }
        out
    }
}

impl Strategy for CommittedOracleProfile {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        match (prover, transcript.len()) {
            (0, 0) => {
                let mut w = BitWriter::new();
                w.push_bit(self.c).push_u64(self.a, self.count_width);
                Some(w.finish())
            }
            (_, 2) => answer_queries(&self.oracle, &transcript[1]),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        format!("c={} a={} A={}", u8::from(self.c), self.a, self.oracle)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{conditional_utility, expected_utility_with, run_protocol, Deviation, Evaluation};
    use crate::Rational;

    fn corpus() -> Oracle3SatInstance {
        Oracle3SatInstance::new(1, 1, vec![[1, 5, -2], [-1, 6, 7]]).unwrap()
    }

    #[test]
    fn inconsistent_opening_pays_minus_one_everywhere() {
        let inst = Oracle3SatInstance::tautology(0, 1).unwrap();
        let proto = make_fig_scoring(inst.clone());
        let p = CommittedOracleProfile::new(&inst, true, 3, OracleTable::constant(1, true));
        for w in 0..8 {
            let out = run_protocol::<Rational, _>(&proto, &[w, 7 - w, w % 6], &p).unwrap();
            assert_eq!(out.payment, -Rational::from_count(1));
        }
    }

    #[test]
    fn grouped_equals_per_coin() {
        let inst = corpus();
        let proto = make_fig_scoring(inst.clone());
        for p in CommittedOracleProfile::family(&inst).iter().step_by(5) {
            let per: Rational = expected_utility_with(&proto, p.as_ref(), Evaluation::PerCoin).unwrap();
            let grouped: Rational = expected_utility_with(&proto, p.as_ref(), Evaluation::Grouped).unwrap();
            assert_eq!(per, grouped, "{}", p.describe());
        }
    }

    #[test]
    fn satisfiable_honest_utility() {
        let inst = Oracle3SatInstance::new(0, 1, vec![[1, 2, 4]]).unwrap();
        let proto = make_fig_scoring(inst.clone());
        let honest = CommittedOracleProfile::honest(&inst).unwrap();
        assert!(honest.c);
        let u: Rational = expected_utility_with(&proto, &honest, Evaluation::PerCoin).unwrap();
        assert_eq!(u, Rational::from_ratio(2, 11));
    }

    #[test]
    fn contradicting_p2_on_one_query_is_caught() {
        let inst = corpus();
        let proto = make_fig_scoring(inst.clone());
        let base: Profile = Arc::new(CommittedOracleProfile::honest(&inst).unwrap());
        let coins = [3u64, 9, 0];
        let queries = proto.queries(&coins);
        let plain = run_protocol::<Rational, _>(&proto, &coins, base.as_ref()).unwrap();
        let p1_view = plain.transcripts[0][..2].to_vec();
        let mut flipped = plain.transcripts[0][2].as_slice().to_vec();
        flipped[4] = !flipped[4];
        let dev = Deviation::new(base.clone()).with(0, p1_view, Bits::new(flipped));
        let same_query = |c: &[u64]| proto.queries(c) == queries;
        let u: Rational = conditional_utility(&proto, &dev, same_query).unwrap().unwrap();
        assert!(u < Rational::from_count(0));
    }
}
