//! Generic execution of multi-prover protocols and exact evaluation of
//! strategy profiles.
//!
//! Rounds are numbered from 1. In odd rounds every engaged prover sends a
//! message to the verifier; in even rounds the verifier sends one message to
//! each prover. Prover `i` sees only the messages exchanged with it, so its
//! transcript before round `j` is `(m_i1, …, m_i(j−1))`. Provers are indexed
//! from 0 in code and from 1 in reports.

use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{MripError, Result};
use crate::scalar::Scalar;

/// A message: a finite bit string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn empty() -> Self {
        Bits(Vec::new())
    }

    pub fn bit(b: bool) -> Self {
        Bits(vec![b])
    }

    /// `value` in `width` bits, most significant first.
    pub fn from_u64(value: u64, width: u32) -> Self {
        let mut w = BitWriter::new();
        w.push_u64(value, width);
        w.finish()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<bool> {
        self.0.first().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<bool> {
        self.0
    }

    /// Copy with the first bit inverted; the empty message is unchanged.
    pub fn flip_first(&self) -> Self {
        let mut out = self.clone();
        if let Some(b) = out.0.first_mut() {
            *b = !*b;
        }
        out
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: &self.0, at: 0 }
    }
}

impl From<Vec<bool>> for Bits {
    fn from(bits: Vec<bool>) -> Self {
        Bits(bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = MripError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ε" || s.is_empty() {
            return Ok(Bits::empty());
        }
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(MripError::Config(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

/// Number of bits needed to write every value in `0..=max`, at least 1.
pub fn width_for(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}

#[derive(Debug, Default)]
pub struct BitWriter(Vec<bool>);

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, b: bool) -> &mut Self {
        self.0.push(b);
        self
    }

    pub fn push_u64(&mut self, value: u64, width: u32) -> &mut Self {
        debug_assert!(width == 64 || value < (1u64 << width), "{value} does not fit {width} bits");
        for j in (0..width).rev() {
            self.0.push((value >> j) & 1 == 1);
        }
        self
    }

    pub fn push_bits(&mut self, bits: &[bool]) -> &mut Self {
        self.0.extend_from_slice(bits);
        self
    }

    pub fn finish(&mut self) -> Bits {
        Bits(std::mem::take(&mut self.0))
    }
}

/// Sequential decoder for fixed-width fields; every read fails past the end.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    at: usize,
}

impl<'a> BitReader<'a> {
    pub fn bit(&mut self) -> Option<bool> {
        let b = *self.bits.get(self.at)?;
        self.at += 1;
        Some(b)
    }

    pub fn u64(&mut self, width: u32) -> Option<u64> {
        let end = self.at.checked_add(width as usize)?;
        let slice = self.bits.get(self.at..end)?;
        self.at = end;
        Some(slice.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b)))
    }

    pub fn take(&mut self, n: usize) -> Option<&'a [bool]> {
        let slice = self.bits.get(self.at..self.at.checked_add(n)?)?;
        self.at += n;
        Some(slice)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.at
    }

    pub fn is_done(&self) -> bool {
        self.at == self.bits.len()
    }
}

/// What the verifier does after an odd round.
#[derive(Debug, Clone, PartialEq)]
pub enum Action<T> {
    /// One entry per prover. `None` leaves the prover out of the next
    /// exchange: it receives the empty message and is not asked to reply.
    Query(Vec<Option<Bits>>),
    Pay(T),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolDescriptor {
    pub name: String,
    pub provers: usize,
    pub rounds: usize,
    /// Product of the coin radices, as a decimal string.
    pub coin_space: String,
    pub params: serde_json::Value,
}

/// A verifier together with the input it runs on.
pub trait Protocol<T: Scalar>: Send + Sync {
    fn num_provers(&self) -> usize;

    fn num_rounds(&self) -> usize;

    /// The coin outcome is a mixed-radix vector `coins[k] < radices[k]`.
    fn coin_radices(&self) -> Vec<u64>;

    /// Relative probability of a coin outcome; 0 removes it.
    fn coin_weight(&self, _coins: &[u64]) -> u64 {
        1
    }

    /// Whether prover `prover` sends a message in round 1.
    fn speaks_first(&self, _prover: usize) -> bool {
        true
    }

    /// Called after every odd round with the transcripts so far.
    fn step(&self, coins: &[u64], transcripts: &[Vec<Bits>]) -> Result<Action<T>>;

    fn name(&self) -> String;

    fn params(&self) -> serde_json::Value {
        serde_json::Value::Null
    }

    /// Closed-form expected payment for profiles the protocol recognizes.
    fn grouped_utility(&self, _profile: &dyn Strategy) -> Option<Result<T>> {
        None
    }

    fn descriptor(&self) -> ProtocolDescriptor {
        ProtocolDescriptor {
            name: self.name(),
            provers: self.num_provers(),
            rounds: self.num_rounds(),
            coin_space: CoinSpace::new(self.coin_radices())
                .size()
                .map_or_else(|| "overflow".to_string(), |s| s.to_string()),
            params: self.params(),
        }
    }
}

impl<T: Scalar, P: Protocol<T> + ?Sized> Protocol<T> for Arc<P> {
    fn num_provers(&self) -> usize {
        (**self).num_provers()
    }
    fn num_rounds(&self) -> usize {
        (**self).num_rounds()
    }
    fn coin_radices(&self) -> Vec<u64> {
        (**self).coin_radices()
    }
    fn coin_weight(&self, coins: &[u64]) -> u64 {
        (**self).coin_weight(coins)
    }
    fn speaks_first(&self, prover: usize) -> bool {
        (**self).speaks_first(prover)
    }
    fn step(&self, coins: &[u64], transcripts: &[Vec<Bits>]) -> Result<Action<T>> {
        (**self).step(coins, transcripts)
    }
    fn name(&self) -> String {
        (**self).name()
    }
    fn params(&self) -> serde_json::Value {
        (**self).params()
    }
    fn grouped_utility(&self, profile: &dyn Strategy) -> Option<Result<T>> {
        (**self).grouped_utility(profile)
    }
    fn descriptor(&self) -> ProtocolDescriptor {
        (**self).descriptor()
    }
}

/// Deterministic prover behaviour for all provers at once.
pub trait Strategy: Send + Sync {
    /// Message of `prover` in round `transcript.len() + 1`; `None` if undefined.
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits>;

    fn describe(&self) -> String;

    fn as_any(&self) -> &dyn Any;
}

pub type Profile = Arc<dyn Strategy>;

/// The answer bit a profile commits to: the first bit of P1's opening message.
pub fn answer_bit(profile: &dyn Strategy) -> bool {
    profile
        .respond(0, &[])
        .and_then(|m| m.first())
        .unwrap_or(false)
}

type Key = (usize, Vec<Bits>);

/// A strategy given as a finite table; undefined transcripts are errors.
#[derive(Debug, Clone, Default)]
pub struct ExplicitProfile {
    name: String,
    table: HashMap<Key, Bits>,
}

impl ExplicitProfile {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            table: HashMap::new(),
        }
    }

    pub fn with(mut self, prover: usize, transcript: Vec<Bits>, message: Bits) -> Self {
        self.table.insert((prover, transcript), message);
        self
    }
}

impl Strategy for ExplicitProfile {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        self.table.get(&(prover, transcript.to_vec())).cloned()
    }

    fn describe(&self) -> String {
        self.name.clone()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// A base profile with finitely many transcript entries replaced.
#[derive(Clone)]
pub struct Deviation {
    base: Profile,
    overrides: HashMap<Key, Bits>,
    label: String,
}

impl Deviation {
    pub fn new(base: Profile) -> Self {
        Self {
            base,
            overrides: HashMap::new(),
            label: String::new(),
        }
    }

    pub fn with(mut self, prover: usize, transcript: Vec<Bits>, message: Bits) -> Self {
        if !self.label.is_empty() {
            self.label.push(';');
        }
        let path: Vec<String> = transcript.iter().map(Bits::to_string).collect();
        self.label
            .push_str(&format!("P{}[{}]->{}", prover + 1, path.join(","), message));
        self.overrides.insert((prover, transcript), message);
        self
    }

    pub fn base(&self) -> &Profile {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.overrides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.overrides.is_empty()
    }
}

impl Strategy for Deviation {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        match self.overrides.get(&(prover, transcript.to_vec())) {
            Some(m) => Some(m.clone()),
            None => self.base.respond(prover, transcript),
        }
    }

    fn describe(&self) -> String {
        format!("{} with {}", self.base.describe(), self.label)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// A strategy backed by a closure.
pub struct FnProfile<F> {
    name: String,
    f: F,
}

impl<F> FnProfile<F>
where
    F: Fn(usize, &[Bits]) -> Option<Bits> + Send + Sync + 'static,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }

    pub fn into_profile(self) -> Profile {
        Arc::new(self)
    }
}

impl<F> Strategy for FnProfile<F>
where
    F: Fn(usize, &[Bits]) -> Option<Bits> + Send + Sync + 'static,
{
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        (self.f)(prover, transcript)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome<T> {
    /// `transcripts[i][j-1]` is `m_ij` for prover `i` (0-based).
    pub transcripts: Vec<Vec<Bits>>,
    pub payment: T,
    pub c: bool,
}

pub fn run_protocol<T, P>(protocol: &P, coins: &[u64], profile: &dyn Strategy) -> Result<ProtocolOutcome<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    let t = protocol.num_provers();
    let rounds = protocol.num_rounds();
    let mut transcripts: Vec<Vec<Bits>> = vec![Vec::with_capacity(rounds); t];
    let mut engaged: Vec<bool> = (0..t).map(|i| protocol.speaks_first(i)).collect();
    let mut round = 1;
    loop {
        for (i, tr) in transcripts.iter_mut().enumerate() {
            let msg = if engaged[i] {
                profile
                    .respond(i, tr)
                    .ok_or_else(|| MripError::PartialStrategy {
                        prover: i + 1,
                        round,
                        transcript: tr.clone(),
                    })?
            } else {
                Bits::empty()
            };
            tr.push(msg);
        }
        match protocol.step(coins, &transcripts)? {
            Action::Pay(payment) => {
                let one = T::one();
                if payment > one || payment < -one {
                    return Err(MripError::PaymentOutOfRange(payment.to_string()));
                }
                let c = transcripts[0][0].first().unwrap_or(false);
                return Ok(ProtocolOutcome {
                    transcripts,
                    payment,
                    c,
                });
            }
            Action::Query(queries) => {
                if round + 2 > rounds {
                    return Err(MripError::ProtocolViolation(format!(
                        "{} queries after round {round} of {rounds}",
                        protocol.name()
                    )));
                }
                if queries.len() != t {
                    return Err(MripError::ProtocolViolation(format!(
                        "{} addressed {} provers, expected {t}",
                        protocol.name(),
                        queries.len()
                    )));
                }
                for ((tr, flag), q) in transcripts.iter_mut().zip(engaged.iter_mut()).zip(queries) {
                    *flag = q.is_some();
                    tr.push(q.unwrap_or_default());
                }
                round += 2;
            }
        }
    }
}

/// Finite mixed-radix coin space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinSpace {
    radices: Vec<u64>,
}

impl CoinSpace {
    pub fn new(radices: Vec<u64>) -> Self {
        Self { radices }
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }

    /// `None` on overflow.
    pub fn size(&self) -> Option<u128> {
        self.radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(u128::from(r)))
    }

    /// Outcomes in lexicographic order, last component fastest.
    pub fn iter(&self) -> CoinIter<'_> {
        let done = self.radices.iter().any(|&r| r == 0);
        CoinIter {
            radices: &self.radices,
            current: vec![0; self.radices.len()],
            done,
        }
    }
}

pub struct CoinIter<'a> {
    radices: &'a [u64],
    current: Vec<u64>,
    done: bool,
}

impl Iterator for CoinIter<'_> {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = true;
        for k in (0..self.radices.len()).rev() {
            self.current[k] += 1;
            if self.current[k] < self.radices[k] {
                self.done = false;
                break;
            }
            self.current[k] = 0;
        }
        Some(out)
    }
}

/// Default cap on family sizes and per-coin enumerations.
pub const DEFAULT_MAX_ENUM: u128 = 1 << 22;

/// The enumeration cap, overridable through `MRIP_MAX_ENUM`.
pub fn max_enum() -> u128 {
    std::env::var("MRIP_MAX_ENUM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ENUM)
}

fn check_cap(what: &str, size: Option<u128>) -> Result<()> {
    let cap = max_enum();
    match size {
        Some(s) if s <= cap => Ok(()),
        other => Err(MripError::EnumerationTooLarge {
            what: what.to_string(),
            size: other.unwrap_or(u128::MAX),
            cap,
        }),
    }
}

/// Multiset of payments with integer weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PaymentTally<T> {
    entries: Vec<(T, u64)>,
    total: u64,
}

impl<T: Scalar> Default for PaymentTally<T> {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
            total: 0,
        }
    }
}

impl<T: Scalar> PaymentTally<T> {
    pub fn add(&mut self, value: T, weight: u64) {
        if weight == 0 {
            return;
        }
        self.total += weight;
        match self.entries.iter_mut().find(|(v, _)| *v == value) {
            Some((_, w)) => *w += weight,
            None => self.entries.push((value, weight)),
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// `None` when nothing was added.
    pub fn mean(&self) -> Option<T> {
        if self.total == 0 {
            return None;
        }
        let sum = self
            .entries
            .iter()
            .fold(T::zero(), |acc, (v, w)| acc + v.clone() * T::from_count(*w));
        Some(sum / T::from_count(self.total))
    }

    /// Entries sorted by payment, for multiset comparison.
    pub fn sorted(&self) -> Vec<(T, u64)> {
        let mut out = self.entries.clone();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    pub fn min(&self) -> Option<&T> {
        self.entries
            .iter()
            .map(|(v, _)| v)
            .min_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
    }

    pub fn max(&self) -> Option<&T> {
        self.entries
            .iter()
            .map(|(v, _)| v)
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
    }
}

/// Per-coin payments over the coins accepted by `filter`.
pub fn payment_tally_where<T, P>(
    protocol: &P,
    profile: &dyn Strategy,
    mut filter: impl FnMut(&[u64]) -> bool,
) -> Result<PaymentTally<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    let space = CoinSpace::new(protocol.coin_radices());
    check_cap("coin space", space.size())?;
    let mut tally = PaymentTally::default();
    for coins in space.iter() {
        let weight = protocol.coin_weight(&coins);
        if weight == 0 || !filter(&coins) {
            continue;
        }
        let outcome = run_protocol(protocol, &coins, profile)?;
        tally.add(outcome.payment, weight);
    }
    Ok(tally)
}

pub fn payment_tally<T, P>(protocol: &P, profile: &dyn Strategy) -> Result<PaymentTally<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    payment_tally_where(protocol, profile, |_| true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    PerCoin,
    Grouped,
    /// Grouped when the protocol recognizes the profile, per-coin otherwise.
    #[default]
    Auto,
}

pub fn expected_utility_with<T, P>(protocol: &P, profile: &dyn Strategy, how: Evaluation) -> Result<T>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    let per_coin = || {
        payment_tally(protocol, profile)?
            .mean()
            .ok_or_else(|| MripError::ProtocolViolation("coin space has zero total weight".into()))
    };
    match how {
        Evaluation::PerCoin => per_coin(),
        Evaluation::Grouped => protocol.grouped_utility(profile).unwrap_or_else(|| {
            Err(MripError::GroupedUnavailable(format!(
                "{} has no closed form for {}",
                protocol.name(),
                profile.describe()
            )))
        }),
        Evaluation::Auto => protocol.grouped_utility(profile).unwrap_or_else(per_coin),
    }
}

/// `u(s̃; x) = E_r R`.
pub fn expected_utility<T, P>(protocol: &P, profile: &dyn Strategy) -> Result<T>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    expected_utility_with(protocol, profile, Evaluation::Auto)
}

/// Expected payment conditioned on the coins satisfying `event`; `None` if
/// the event has probability 0.
pub fn conditional_utility<T, P>(
    protocol: &P,
    profile: &dyn Strategy,
    event: impl FnMut(&[u64]) -> bool,
) -> Result<Option<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    Ok(payment_tally_where(protocol, profile, event)?.mean())
}

#[derive(Clone)]
pub struct Ranked<T> {
    pub profile: Profile,
    pub utility: T,
    pub c: bool,
}

impl<T: fmt::Debug> fmt::Debug for Ranked<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ranked")
            .field("profile", &self.profile.describe())
            .field("utility", &self.utility)
            .field("c", &self.c)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration<T> {
    /// Every profile with its utility, in family order.
    pub ranked: Vec<Ranked<T>>,
}

impl<T: Scalar> Enumeration<T> {
    pub fn max_utility(&self) -> &T {
        self.ranked
            .iter()
            .map(|r| &r.utility)
            .fold(&self.ranked[0].utility, |m, u| if u > m { u } else { m })
    }

    /// All profiles attaining the maximum, sorted by description.
    pub fn maximizers(&self) -> Vec<Ranked<T>> {
        let max = self.max_utility().clone();
        let mut out: Vec<Ranked<T>> = self.ranked.iter().filter(|r| r.utility == max).cloned().collect();
        out.sort_by_cached_key(|r| r.profile.describe());
        out
    }

    /// Best utility among profiles with answer bit `c`.
    pub fn best_with_bit(&self, c: bool) -> Option<&T> {
        self.ranked
            .iter()
            .filter(|r| r.c == c)
            .map(|r| &r.utility)
            .fold(None, |m: Option<&T>, u| match m {
                Some(m) if m >= u => Some(m),
                _ => Some(u),
            })
    }
}

/// Evaluates every profile of `family`.
pub fn evaluate_family<T, P>(protocol: &P, family: &[Profile], how: Evaluation) -> Result<Enumeration<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    if family.is_empty() {
        return Err(MripError::EmptyFamily);
    }
    check_cap("strategy family", Some(family.len() as u128))?;
    let ranked = family
        .iter()
        .map(|profile| {
            Ok(Ranked {
                utility: expected_utility_with(protocol, profile.as_ref(), how)?,
                c: answer_bit(profile.as_ref()),
                profile: profile.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration { ranked })
}

#[derive(Debug, Clone)]
pub struct Best<T> {
    pub max_utility: T,
    pub maximizers: Vec<Ranked<T>>,
}

pub fn enumerate_best<T, P>(protocol: &P, family: &[Profile]) -> Result<Best<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    let e = evaluate_family(protocol, family, Evaluation::Auto)?;
    Ok(Best {
        max_utility: e.max_utility().clone(),
        maximizers: e.maximizers(),
    })
}

#[derive(Debug, Clone)]
pub struct MripCheck<T> {
    pub cond1: bool,
    pub cond2: bool,
    pub max_utility: T,
    pub maximizers: Vec<Ranked<T>>,
}

impl<T: Scalar> MripCheck<T> {
    pub fn from_enumeration(e: &Enumeration<T>, ground_truth: bool) -> Self {
        let max_utility = e.max_utility().clone();
        let maximizers = e.maximizers();
        Self {
            cond1: max_utility >= T::zero(),
            cond2: maximizers.iter().all(|r| r.c == ground_truth),
            max_utility,
            maximizers,
        }
    }

    pub fn passed(&self) -> bool {
        self.cond1 && self.cond2
    }

    pub fn report(&self) -> MripReport {
        MripReport {
            max_utility: self.max_utility.render(),
            maximizers: self.maximizers.iter().map(|r| r.profile.describe()).collect(),
            cond1: self.cond1,
            cond2: self.cond2,
        }
    }
}

/// Definition 1 on a finite family: the maximum is non-negative and every
/// maximizer reports `ground_truth`.
pub fn check_mrip<T, P>(protocol: &P, family: &[Profile], ground_truth: bool) -> Result<MripCheck<T>>
where
    T: Scalar,
    P: Protocol<T> + ?Sized,
{
    let e = evaluate_family(protocol, family, Evaluation::Auto)?;
    Ok(MripCheck::from_enumeration(&e, ground_truth))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct MripReport {
    pub max_utility: String,
    pub maximizers: Vec<String>,
    pub cond1: bool,
    pub cond2: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    /// One prover, three rounds: it announces a bit, the verifier echoes a
    /// coin, and the prover is paid 1 for repeating the coin, 0 otherwise.
    struct Echo;

    impl Protocol<Rational> for Echo {
        fn num_provers(&self) -> usize {
            1
        }
        fn num_rounds(&self) -> usize {
            3
        }
        fn coin_radices(&self) -> Vec<u64> {
            vec![2]
        }
        fn step(&self, coins: &[u64], tr: &[Vec<Bits>]) -> Result<Action<Rational>> {
            match tr[0].len() {
                1 => Ok(Action::Query(vec![Some(Bits::from_u64(coins[0], 1))])),
                _ => {
                    let hit = tr[0][2] == tr[0][1];
                    Ok(Action::Pay(Rational::from_count(u64::from(hit))))
                }
            }
        }
        fn name(&self) -> String {
            "echo".into()
        }
    }

    fn parrot() -> Profile {
        FnProfile::new("parrot", |_, tr: &[Bits]| {
            Some(if tr.is_empty() { Bits::bit(true) } else { tr[1].clone() })
        })
        .into_profile()
    }

    fn stubborn() -> Profile {
        FnProfile::new("stubborn", |_, _: &[Bits]| Some(Bits::bit(false))).into_profile()
    }

    #[test]
    fn bits_codec() {
        let b = Bits::from_u64(5, 4);
        assert_eq!(b.to_string(), "0101");
        assert_eq!(b.reader().u64(4), Some(5));
        assert_eq!("0101".parse::<Bits>().unwrap(), b);
        assert_eq!(Bits::empty().to_string(), "ε");
        assert_eq!(b.flip_first().to_string(), "1101");
        let mut r = b.reader();
        assert_eq!(r.u64(3), Some(2));
        assert_eq!(r.u64(2), None);
        assert_eq!(width_for(0), 1);
        assert_eq!(width_for(1), 1);
        assert_eq!(width_for(8), 4);
    }

    #[test]
    fn coin_space_order() {
        let all: Vec<_> = CoinSpace::new(vec![2, 3]).iter().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(CoinSpace::new(vec![]).iter().count(), 1);
        assert_eq!(CoinSpace::new(vec![3, 0]).iter().count(), 0);
    }

    #[test]
    fn run_and_expectation() {
        let out = run_protocol(&Echo, &[1], parrot().as_ref()).unwrap();
        assert_eq!(out.payment, Rational::from_count(1));
        assert!(out.c);
        assert_eq!(out.transcripts[0].len(), 3);
        let u: Rational = expected_utility(&Echo, stubborn().as_ref()).unwrap();
        assert_eq!(u, Rational::from_ratio(1, 2));
    }

    #[test]
    fn partial_strategy_is_reported() {
        let p = ExplicitProfile::new("partial").with(0, vec![], Bits::bit(true));
        match run_protocol::<Rational, _>(&Echo, &[0], &p) {
            Err(MripError::PartialStrategy { prover, round, transcript }) => {
                assert_eq!((prover, round), (1, 3));
                assert_eq!(transcript.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deviation_overrides_one_entry() {
        let dev = Deviation::new(stubborn()).with(0, vec![Bits::bit(false), Bits::bit(true)], Bits::bit(true));
        let u: Rational = expected_utility(&Echo, &dev).unwrap();
        assert_eq!(u, Rational::from_count(1));
        assert!(dev.describe().contains("stubborn"));
    }

    #[test]
    fn enumeration_reports_all_ties() {
        let family = vec![parrot(), stubborn(), parrot()];
        let best = enumerate_best::<Rational, _>(&Echo, &family).unwrap();
        assert_eq!(best.max_utility, Rational::from_count(1));
        assert_eq!(best.maximizers.len(), 2);
        let check = check_mrip::<Rational, _>(&Echo, &family, true).unwrap();
        assert!(check.cond1 && check.cond2);
        let check = check_mrip::<Rational, _>(&Echo, &family, false).unwrap();
        assert!(!check.cond2);
        let json = serde_json::to_string(&check.report()).unwrap();
        assert!(json.contains("\"max_utility\":\"1/1\""));
        assert!(matches!(
            enumerate_best::<Rational, _>(&Echo, &[]),
            Err(MripError::EmptyFamily)
        ));
    }

    #[test]
    fn tally_is_a_multiset() {
        let mut t = PaymentTally::<Rational>::default();
        t.add(Rational::from_ratio(1, 2), 2);
        t.add(Rational::from_count(0), 1);
        t.add(Rational::from_ratio(1, 2), 1);
        assert_eq!(t.total_weight(), 4);
        assert_eq!(t.mean().unwrap(), Rational::from_ratio(3, 8));
        assert_eq!(t.sorted()[1], (Rational::from_ratio(1, 2), 3));
    }
}
