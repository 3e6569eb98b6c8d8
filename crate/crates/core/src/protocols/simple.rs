//! The two-prover, three-round protocol that wraps a MIP: answering `c = 0`
//! earns 1/2, answering `c = 1` earns 1 if the MIP accepts and 0 otherwise.

use std::any::Any;
use std::sync::Arc;

use serde_json::json;

use super::answer_queries;
use super::mip::{accept_probability, exhaustive_accepts, MipVariant};
use crate::engine::{Action, BitWriter, Bits, Profile, Protocol, Strategy};
use crate::error::Result;
use crate::oracle3sat::{Oracle3SatInstance, OracleTable};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigSimple {
    instance: Oracle3SatInstance,
    mip: MipVariant,
    reps: u32,
}

pub fn make_fig_simple(instance: Oracle3SatInstance, mip: MipVariant) -> FigSimple {
    FigSimple::new(instance, mip)
}

impl FigSimple {
    pub fn new(instance: Oracle3SatInstance, mip: MipVariant) -> Self {
        let reps = mip.repetitions(&instance);
        Self { instance, mip, reps }
    }

    pub fn instance(&self) -> &Oracle3SatInstance {
        &self.instance
    }

    pub fn mip(&self) -> MipVariant {
        self.mip
    }

    pub fn repetitions(&self) -> u32 {
        self.reps
    }

    fn spot_queries(&self, coins: &[u64]) -> Bits {
        let s = self.instance.s();
        let mut w = BitWriter::new();
        for &assignment in &coins[..self.reps as usize] {
            for k in 1..=3 {
                w.push_u64(self.instance.query_of(assignment, k) as u64, s);
            }
        }
        w.finish()
    }

    fn cross_query(&self, coins: &[u64]) -> (usize, u32, Bits) {
        let m = self.reps as usize;
        let (spot, k) = (coins[m] as usize, coins[m + 1] as u32 + 1);
        let b = self.instance.query_of(coins[spot], k);
        (spot, k, Bits::from_u64(b as u64, self.instance.s()))
    }

    fn verdict(&self, coins: &[u64], tr: &[Vec<Bits>]) -> bool {
        match self.mip {
            MipVariant::Exhaustive => {
                let table = tr[0][2].as_slice().to_vec();
                OracleTable::new(self.instance.s(), table).is_ok_and(|a| exhaustive_accepts(&self.instance, &a))
            }
            MipVariant::Sampled { .. } => {
                let m = self.reps as usize;
                let (answers, cross) = (&tr[0][2], &tr[1][2]);
                if answers.len() != 3 * m || cross.len() != 1 {
                    return false;
                }
                let a = answers.as_slice();
                let all_sat = (0..m).all(|i| self.instance.satisfied_packed(coins[i], [a[3 * i], a[3 * i + 1], a[3 * i + 2]]));
                let (spot, k, _) = self.cross_query(coins);
                all_sat && cross.first() == Some(a[3 * spot + k as usize - 1])
            }
        }
    }
}

impl<T: Scalar> Protocol<T> for FigSimple {
    fn num_provers(&self) -> usize {
        2
    }

    fn num_rounds(&self) -> usize {
        3
    }

    fn coin_radices(&self) -> Vec<u64> {
        match self.mip {
            MipVariant::Exhaustive => vec![],
            MipVariant::Sampled { .. } => {
                let mut r = vec![self.instance.num_assignments(); self.reps as usize];
                r.extend([u64::from(self.reps), 3]);
                r
            }
        }
    }

    fn speaks_first(&self, prover: usize) -> bool {
        prover == 0
    }

    fn step(&self, coins: &[u64], tr: &[Vec<Bits>]) -> Result<Action<T>> {
        if tr[0].len() == 1 {
            let opening = &tr[0][0];
            if opening.len() != 1 {
                return Ok(Action::Pay(T::zero()));
            }
            if opening.first() == Some(false) {
                return Ok(Action::Pay(T::half()));
            }
            return Ok(Action::Query(match self.mip {
                MipVariant::Exhaustive => vec![Some(Bits::empty()), None],
                MipVariant::Sampled { .. } => {
                    vec![Some(self.spot_queries(coins)), Some(self.cross_query(coins).2)]
                }
            }));
        }
        Ok(Action::Pay(if self.verdict(coins, tr) { T::one() } else { T::zero() }))
    }

    fn name(&self) -> String {
        match self.mip {
            MipVariant::Exhaustive => "simple".into(),
            MipVariant::Sampled { .. } => "simple-b".into(),
        }
    }

    fn params(&self) -> serde_json::Value {
        json!({
            "r": self.instance.r(),
            "s": self.instance.s(),
            "clauses": self.instance.clauses(),
            "mip": self.mip,
            "repetitions": self.reps,
        })
    }

    fn grouped_utility(&self, profile: &dyn Strategy) -> Option<Result<T>> {
        let p = profile.as_any().downcast_ref::<SimpleProfile>()?;
        if p.p1.width() != self.instance.s() || p.p2.width() != self.instance.s() {
            return None;
        }
        Some(Ok(if p.c {
            accept_probability(&self.instance, self.mip, &p.p1, &p.p2)
        } else {
            T::half()
        }))
    }
}

/// Provers that announce `c` and answer every MIP query from fixed tables:
/// P1 from `p1`, P2 from `p2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleProfile {
    pub c: bool,
    pub p1: OracleTable,
    pub p2: OracleTable,
}

impl SimpleProfile {
    pub fn new(c: bool, oracle: OracleTable) -> Self {
        Self {
            c,
            p2: oracle.clone(),
            p1: oracle,
        }
    }

    pub fn honest(instance: &Oracle3SatInstance) -> Result<Self> {
        let d = crate::oracle3sat::decide_oracle3sat(instance)?;
        Ok(Self::new(d.member, d.witness))
    }

    /// Both answer bits crossed with every table, both provers sharing it.
    pub fn family(instance: &Oracle3SatInstance) -> Vec<Profile> {
        [false, true]
            .into_iter()
            .flat_map(|c| OracleTable::all(instance.s()).map(move |a| Arc::new(Self::new(c, a)) as Profile))
            .collect()
    }
}

impl Strategy for SimpleProfile {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        match (prover, transcript.len()) {
            (0, 0) => Some(Bits::bit(self.c)),
            (0, 2) if transcript[1].is_empty() => Some(Bits::new(self.p1.bits().to_vec())),
            (0, 2) => answer_queries(&self.p1, &transcript[1]),
            (1, 2) => answer_queries(&self.p2, &transcript[1]),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        if self.p1 == self.p2 {
            format!("c={} A={}", u8::from(self.c), self.p1)
        } else {
            format!("c={} A1={} A2={}", u8::from(self.c), self.p1, self.p2)
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
