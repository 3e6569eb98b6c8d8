//! Negative control: a protocol whose payments have their sign flipped.

use crate::engine::{Action, Bits, Protocol};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignFlip<P> {
    base: P,
}

impl<P> SignFlip<P> {
    pub fn new(base: P) -> Self {
        Self { base }
    }
}

impl<T: Scalar, P: Protocol<T>> Protocol<T> for SignFlip<P> {
    fn num_provers(&self) -> usize {
        self.base.num_provers()
    }

    fn num_rounds(&self) -> usize {
        self.base.num_rounds()
    }

    fn coin_radices(&self) -> Vec<u64> {
        self.base.coin_radices()
    }

    fn coin_weight(&self, coins: &[u64]) -> u64 {
        self.base.coin_weight(coins)
    }

    fn speaks_first(&self, prover: usize) -> bool {
        self.base.speaks_first(prover)
    }

    fn step(&self, coins: &[u64], transcripts: &[Vec<Bits>]) -> Result<Action<T>> {
        Ok(match self.base.step(coins, transcripts)? {
            Action::Pay(r) => Action::Pay(-r),
            query => query,
        })
    }

    fn name(&self) -> String {
        format!("broken-{}", self.base.name())
    }

    fn params(&self) -> serde_json::Value {
        self.base.params()
    }

    fn grouped_utility(&self, profile: &dyn crate::engine::Strategy) -> Option<Result<T>> {
        self.base.grouped_utility(profile).map(|u| u.map(|u| -u))
    }
}
