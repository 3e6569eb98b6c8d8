//! Simulation of any protocol by two provers in five rounds.
//!
//! P1' announces `c`, receives the inner verifier's coins `r` and returns the
//! prover messages of the whole inner run. The verifier replays the inner
//! verifier on them, samples a round `j` and an inner prover `k`, asks P2'
//! for `m_kj` given the prefix `m_k1 … m_k(j−1)`, and pays `R / (2pt)` if
//! the answers agree and `−1` otherwise.
//!
//! Wire formats: `r` is each coin component in `width_for(radix − 1)` bits.
//! P1''s transcript is an 8-bit count `L` of odd rounds, then for each of
//! them and each inner prover a 16-bit length followed by the message. The
//! query to P2' is `j` and `k` in 8 bits each, then the `j − 1` prefix
//! messages, each behind a 16-bit length.

use std::any::Any;
use std::collections::BTreeSet;
use std::marker::PhantomData;
use std::sync::Arc;

use serde_json::json;

use crate::engine::{evaluate_family, run_protocol, width_for, Evaluation, Action, BitWriter, Bits, Profile, Protocol, Strategy};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoFive<P> {
    base: Arc<P>,
}

pub fn two_five_wrap<P>(base: P) -> TwoFive<P> {
    TwoFive { base: Arc::new(base) }
}

impl<P> TwoFive<P> {
    pub fn base(&self) -> &Arc<P> {
        &self.base
    }
}

fn encode_coins(radices: &[u64], coins: &[u64]) -> Bits {
    let mut w = BitWriter::new();
    for (&r, &c) in radices.iter().zip(coins) {
        w.push_u64(c, width_for(r.saturating_sub(1)));
    }
    w.finish()
}

fn decode_coins(radices: &[u64], m: &Bits) -> Option<Vec<u64>> {
    let mut r = m.reader();
    let coins = radices
        .iter()
        .map(|&radix| r.u64(width_for(radix.saturating_sub(1))).filter(|&c| c < radix))
        .collect::<Option<Vec<_>>>()?;
    r.is_done().then_some(coins)
}

fn push_message(w: &mut BitWriter, m: &Bits) {
    w.push_u64(m.len() as u64, 16).push_bits(m.as_slice());
}

fn encode_query(j: usize, k: usize, prefix: &[Bits]) -> Bits {
    let mut w = BitWriter::new();
    w.push_u64(j as u64, 8).push_u64(k as u64, 8);
    for m in prefix {
        push_message(&mut w, m);
    }
    w.finish()
}

/// `(j, k, prefix)` with `k` 1-based.
fn decode_query(m: &Bits) -> Option<(usize, usize, Vec<Bits>)> {
    let mut r = m.reader();
    let j = r.u64(8)? as usize;
    let k = r.u64(8)? as usize;
    let prefix = (1..j)
        .map(|_| {
            let len = r.u64(16)? as usize;
            Some(Bits::new(r.take(len)?.to_vec()))
        })
        .collect::<Option<Vec<_>>>()?;
    r.is_done().then_some((j, k, prefix))
}

/// Inner run reconstructed from P1''s transcript.
struct Replay<T> {
    transcripts: Vec<Vec<Bits>>,
    /// `engaged[idx][k]`: prover `k` spoke in odd round `2·idx + 1`.
    engaged: Vec<Vec<bool>>,
    payment: T,
}

impl<P> TwoFive<P> {
    fn split<'c>(&self, coins: &'c [u64]) -> (&'c [u64], usize, usize) {
        let n = coins.len();
        (&coins[..n - 2], coins[n - 2] as usize + 1, coins[n - 1] as usize + 1)
    }

    fn replay<T: Scalar>(&self, coins: &[u64], m: &Bits) -> Option<Replay<T>>
    where
        P: Protocol<T>,
    {
        let t = self.base.num_provers();
        let mut r = m.reader();
        let rounds = r.u64(8)? as usize;
        if rounds == 0 || 2 * rounds - 1 > self.base.num_rounds() {
            return None;
        }
        let mut transcripts: Vec<Vec<Bits>> = vec![Vec::new(); t];
        let mut engaged: Vec<bool> = (0..t).map(|k| self.base.speaks_first(k)).collect();
        let mut log = Vec::with_capacity(rounds);
        for idx in 0..rounds {
            for (k, tr) in transcripts.iter_mut().enumerate() {
                let len = r.u64(16)? as usize;
                let msg = r.take(len)?;
                if !engaged[k] && len > 0 {
                    return None;
                }
                tr.push(Bits::new(msg.to_vec()));
            }
            log.push(engaged.clone());
            match self.base.step(coins, &transcripts).ok()? {
                Action::Pay(payment) => {
                    return (idx + 1 == rounds && r.is_done()).then_some(Replay {
                        transcripts,
                        engaged: log,
                        payment,
                    });
                }
                Action::Query(queries) => {
                    if idx + 1 == rounds || queries.len() != t {
                        return None;
                    }
                    for ((tr, flag), q) in transcripts.iter_mut().zip(engaged.iter_mut()).zip(queries) {
                        *flag = q.is_some();
                        tr.push(q.unwrap_or_default());
                    }
                }
            }
        }
        None
    }
}

impl<T: Scalar, P: Protocol<T>> Protocol<T> for TwoFive<P> {
    fn num_provers(&self) -> usize {
        2
    }

    fn num_rounds(&self) -> usize {
        5
    }

    /// Inner coins `r`, then `j − 1` and `k − 1`.
    fn coin_radices(&self) -> Vec<u64> {
        let mut radices = self.base.coin_radices();
        radices.push(self.base.num_rounds() as u64);
        radices.push(self.base.num_provers() as u64);
        radices
    }

    fn coin_weight(&self, coins: &[u64]) -> u64 {
        self.base.coin_weight(self.split(coins).0)
    }

    fn speaks_first(&self, prover: usize) -> bool {
        prover == 0
    }

    fn step(&self, coins: &[u64], tr: &[Vec<Bits>]) -> Result<Action<T>> {
        let penalty = Ok(Action::Pay(-T::one()));
        let (inner, j, k) = self.split(coins);
        if tr[0][0].len() != 1 {
            return penalty;
        }
        let c = tr[0][0].first();
        if tr[0].len() == 1 {
            let r = encode_coins(&self.base.coin_radices(), inner);
            return Ok(Action::Query(vec![Some(r), None]));
        }
        let Some(replay) = self.replay::<T>(inner, &tr[0][2]) else {
            return penalty;
        };
        let scale = T::from_count(2 * (self.base.num_rounds() * self.base.num_provers()) as u64);
        let paid = Ok(Action::Pay(replay.payment.clone() / scale));
        let checked = j % 2 == 1 && replay.engaged.get(j / 2).is_some_and(|e| e[k - 1]);
        if !checked {
            return paid;
        }
        let claimed = &replay.transcripts[k - 1][j - 1];
        if tr[0].len() == 3 {
            let prefix = &replay.transcripts[k - 1][..j - 1];
            return Ok(Action::Query(vec![None, Some(encode_query(j, k, prefix))]));
        }
        let answer = &tr[1][4];
        if (j, k) == (1, 1) && answer.first() != c {
            return penalty;
        }
        if answer != claimed {
            return penalty;
        }
        paid
    }

    fn name(&self) -> String {
        format!("two-five-{}", self.base.name())
    }

    fn params(&self) -> serde_json::Value {
        json!({ "base": self.base.descriptor() })
    }
}

/// Flips the first bit of a message, or appends a bit to the empty message.
pub fn alter(m: &Bits) -> Bits {
    if m.is_empty() {
        Bits::bit(true)
    } else {
        m.flip_first()
    }
}

/// Base profile with the messages at `lies` (odd round, 0-based prover) altered.
struct Altered {
    base: Profile,
    lies: BTreeSet<(usize, usize)>,
}

impl Strategy for Altered {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        let m = self.base.respond(prover, transcript)?;
        Some(if self.lies.contains(&(transcript.len() + 1, prover)) {
            alter(&m)
        } else {
            m
        })
    }

    fn describe(&self) -> String {
        self.base.describe()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// A base profile lifted to the simulation: P1' simulates the inner provers
/// (altering the cells in `lies`), P2' answers from the unaltered base profile.
pub struct LiftedProfile<T, P> {
    base: Arc<P>,
    altered: Altered,
    _scalar: PhantomData<fn() -> T>,
}

impl<T: Scalar, P: Protocol<T>> LiftedProfile<T, P> {
    pub fn honest(wrapper: &TwoFive<P>, profile: Profile) -> Self {
        Self::lying(wrapper, profile, BTreeSet::new())
    }

    /// `lies` holds `(round, prover)` pairs: odd round numbers, 0-based provers.
    pub fn lying(wrapper: &TwoFive<P>, profile: Profile, lies: BTreeSet<(usize, usize)>) -> Self {
        Self {
            base: wrapper.base.clone(),
            altered: Altered { base: profile, lies },
            _scalar: PhantomData,
        }
    }

    pub fn lies(&self) -> &BTreeSet<(usize, usize)> {
        &self.altered.lies
    }

    fn simulate(&self, r: &Bits) -> Option<Bits> {
        let coins = decode_coins(&self.base.coin_radices(), r)?;
        let out = run_protocol::<T, P>(&self.base, &coins, &self.altered).ok()?;
        let t = self.base.num_provers();
        let played = out.transcripts[0].len();
        let rounds = played.div_ceil(2);
        let mut w = BitWriter::new();
        w.push_u64(rounds as u64, 8);
        for j in (0..played).step_by(2) {
            for k in 0..t {
                push_message(&mut w, &out.transcripts[k][j]);
            }
        }
        Some(w.finish())
    }
}

impl<T: Scalar, P: Protocol<T> + 'static> Strategy for LiftedProfile<T, P> {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        match (prover, transcript.len()) {
            (0, 0) => {
                let opening = self.altered.respond(0, &[])?;
                Some(Bits::bit(opening.first().unwrap_or(false)))
            }
            (0, 2) => self.simulate(&transcript[1]),
            (1, 4) => {
                let (_, k, prefix) = decode_query(&transcript[3])?;
                self.altered.base.respond(k.checked_sub(1)?, &prefix)
            }
            _ => None,
        }
    }

    fn describe(&self) -> String {
        let base = self.altered.base.describe();
        if self.altered.lies.is_empty() {
            format!("lift({base})")
        } else {
            let cells: Vec<String> = self
                .altered
                .lies
                .iter()
                .map(|(j, k)| format!("m{}{}", k + 1, j))
                .collect();
            format!("lift({base}) lying on {}", cells.join(","))
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// The best base profile for each answer bit, lifted honestly and with a
/// single altered message at every odd round and inner prover (round 1
/// only for provers that speak first).
pub fn lifted_family<T, P>(wrapper: &TwoFive<P>, base_family: &[Profile]) -> Result<Vec<Profile>>
where
    T: Scalar,
    P: Protocol<T> + 'static,
{
    let e = evaluate_family::<T, P>(&wrapper.base, base_family, Evaluation::Auto)?;
    let t = wrapper.base.num_provers();
    let mut out: Vec<Profile> = Vec::new();
    for c in [false, true] {
        let Some(best) = e.best_with_bit(c) else {
            continue;
        };
        let profile = e
            .ranked
            .iter()
            .find(|r| r.c == c && r.utility == *best)
            .map(|r| r.profile.clone())
            .expect("best_with_bit comes from ranked");
        out.push(Arc::new(LiftedProfile::<T, P>::honest(wrapper, profile.clone())));
        for j in (1..=wrapper.base.num_rounds()).step_by(2) {
            for k in (0..t).filter(|&k| j > 1 || wrapper.base.speaks_first(k)) {
                let lies = BTreeSet::from([(j, k)]);
                out.push(Arc::new(LiftedProfile::<T, P>::lying(wrapper, profile.clone(), lies)));
            }
        }
    }
    Ok(out)
}
