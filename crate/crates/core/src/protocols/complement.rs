//! Complement wrapper: a protocol for `L` becomes one for the complement of
//! `L` by flipping the first bit of P1's opening message before the inner
//! verifier sees it.

use std::any::Any;

use crate::engine::{Action, Bits, Profile, Protocol, Strategy};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complement<P> {
    base: P,
}

pub fn complement_wrap<P>(base: P) -> Complement<P> {
    Complement { base }
}

impl<P> Complement<P> {
    pub fn base(&self) -> &P {
        &self.base
    }
}

fn unflip(transcripts: &[Vec<Bits>]) -> Vec<Vec<Bits>> {
    let mut inner = transcripts.to_vec();
    if let Some(opening) = inner.first_mut().and_then(|t| t.first_mut()) {
        *opening = opening.flip_first();
    }
    inner
}

impl<T: Scalar, P: Protocol<T>> Protocol<T> for Complement<P> {
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
        self.base.step(coins, &unflip(transcripts))
    }

    fn name(&self) -> String {
        format!("complement-{}", self.base.name())
    }

    fn params(&self) -> serde_json::Value {
        self.base.params()
    }

    fn grouped_utility(&self, profile: &dyn Strategy) -> Option<Result<T>> {
        let p = profile.as_any().downcast_ref::<ComplementProfile>()?;
        self.base.grouped_utility(p.base.as_ref())
    }
}

/// The image of a base profile: P1 opens with the first bit flipped and
/// otherwise behaves as the base profile would on the unflipped history.
#[derive(Clone)]
pub struct ComplementProfile {
    base: Profile,
}

impl ComplementProfile {
    pub fn new(base: Profile) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &Profile {
        &self.base
    }

    pub fn family(base: &[Profile]) -> Vec<Profile> {
        base.iter()
            .map(|p| std::sync::Arc::new(Self::new(p.clone())) as Profile)
            .collect()
    }
}

impl Strategy for ComplementProfile {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        if prover != 0 {
            return self.base.respond(prover, transcript);
        }
        match transcript.split_first() {
            None => self.base.respond(0, &[]).map(|m| m.flip_first()),
            Some((opening, rest)) => {
                let mut inner = Vec::with_capacity(transcript.len());
                inner.push(opening.flip_first());
                inner.extend_from_slice(rest);
                self.base.respond(0, &inner)
            }
        }
    }

    fn describe(&self) -> String {
        format!("complement({})", self.base.describe())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{answer_bit, expected_utility_with, payment_tally, Evaluation};
    use crate::oracle3sat::Oracle3SatInstance;
    use crate::protocols::{make_fig_scoring, CommittedOracleProfile};
    use crate::Rational;
    use std::sync::Arc;

    #[test]
    fn bijection_preserves_payment_multisets() {
        let inst = Oracle3SatInstance::new(0, 1, vec![[1, -4, 5], [2, 3, -6]]).unwrap();
        let base = make_fig_scoring(inst.clone());
        let wrapped = complement_wrap(base.clone());
        for p in CommittedOracleProfile::family(&inst).iter().step_by(7) {
            let image = ComplementProfile::new(p.clone());
            let a = payment_tally::<Rational, _>(&base, p.as_ref()).unwrap();
            let b = payment_tally::<Rational, _>(&wrapped, &image).unwrap();
            assert_eq!(a.sorted(), b.sorted());
            assert_ne!(answer_bit(p.as_ref()), answer_bit(&image));
            let grouped: Rational = expected_utility_with(&wrapped, &image, Evaluation::Grouped).unwrap();
            assert_eq!(grouped, a.mean().unwrap());
        }
    }

    #[test]
    fn double_wrap_is_identity() {
        let inst = Oracle3SatInstance::new(0, 1, vec![[1, 2, -5]]).unwrap();
        let base = make_fig_scoring(inst.clone());
        let twice = complement_wrap(complement_wrap(base.clone()));
        for p in CommittedOracleProfile::family(&inst).iter().step_by(5) {
            let image: Profile = Arc::new(ComplementProfile::new(Arc::new(ComplementProfile::new(p.clone()))));
            let a = payment_tally::<Rational, _>(&base, p.as_ref()).unwrap();
            let b = payment_tally::<Rational, _>(&twice, image.as_ref()).unwrap();
            assert_eq!(a.sorted(), b.sorted());
            assert_eq!(answer_bit(p.as_ref()), answer_bit(image.as_ref()));
            let direct = payment_tally::<Rational, _>(&twice, p.as_ref()).unwrap();
            assert_eq!(a.sorted(), direct.sorted());
        }
    }
}
