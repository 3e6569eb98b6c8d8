//! The four-prover protocol for three-level circuits with Oracle-3SAT gates.
//!
//! P1 and P2 play the gate-checking game over the whole three-level circuit.
//! When the sampled gate is an NEXP gate, its claimed input block `x'` is
//! handed to P3 and P4, which run the MIP-wrapped protocol on it; the outer
//! payment is `2R'/(p+1)` if their answer agrees with P1's claimed value.

use std::any::Any;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use serde_json::json;

use super::mip::{exhaustive_accepts, MipVariant};
use crate::circuits::{InputSource, ThreeLevelCircuit, TlGate, TlKind};
use crate::engine::{width_for, Action, BitWriter, Bits, Profile, Protocol, Strategy};
use crate::error::{MripError, Result};
use crate::oracle3sat::{decide_oracle3sat, Decision, OracleTable};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct FigExpNexp {
    tlc: Arc<ThreeLevelCircuit>,
    x: Vec<bool>,
    gates: Vec<TlGate>,
    slot_weight: u64,
}

pub fn make_fig_expnexp(tlc: Arc<ThreeLevelCircuit>, x: Vec<bool>, mip: MipVariant) -> Result<FigExpNexp> {
    FigExpNexp::new(tlc, x, mip)
}

/// P1's round-3 message: type, `p` input gates, `p` wires and `p + 1` values
/// (`v_i` first). Slots past the gate's fan-in are padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NexpClaim {
    pub kind: TlKind,
    pub inputs: Vec<usize>,
    pub wires: Vec<usize>,
    pub values: Vec<bool>,
}

impl FigExpNexp {
    pub fn new(tlc: Arc<ThreeLevelCircuit>, x: Vec<bool>, mip: MipVariant) -> Result<Self> {
        if mip != MipVariant::Exhaustive {
            return Err(MripError::Config(
                "the three-level protocol runs its subroutine with the exhaustive MIP only".into(),
            ));
        }
        tlc.eval(&x)?;
        let gates = (1..=tlc.size()).map(|i| tlc.gate(i)).collect::<Result<Vec<_>>>()?;
        let slot_weight = gates
            .iter()
            .map(|g| g.inputs.len() as u64 + 1)
            .fold(1, |acc: u64, f| acc.lcm(&f));
        Ok(Self {
            tlc,
            x,
            gates,
            slot_weight,
        })
    }

    pub fn circuit(&self) -> &Arc<ThreeLevelCircuit> {
        &self.tlc
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    fn p(&self) -> usize {
        self.tlc.p()
    }

    pub fn gate_width(&self) -> u32 {
        width_for(self.tlc.size() as u64)
    }

    pub fn wire_width(&self) -> u32 {
        width_for(self.tlc.max_wire() as u64)
    }

    pub fn encode_claim(&self, claim: &NexpClaim) -> Bits {
        encode_claim(claim, self.gate_width(), self.wire_width())
    }

    pub fn decode_claim(&self, m: &Bits) -> Option<NexpClaim> {
        let p = self.p();
        let mut r = m.reader();
        let kind = TlKind::from_code(r.u64(3)?)?;
        let inputs = (0..p).map(|_| r.u64(self.gate_width()).map(|v| v as usize)).collect::<Option<_>>()?;
        let wires = (0..p).map(|_| r.u64(self.wire_width()).map(|v| v as usize)).collect::<Option<_>>()?;
        let values = (0..=p).map(|_| r.bit()).collect::<Option<_>>()?;
        r.is_done().then_some(NexpClaim {
            kind,
            inputs,
            wires,
            values,
        })
    }

    /// Step 4: type, inputs and local value checks.
    fn step4(&self, i: usize, c: bool, claim: &NexpClaim) -> bool {
        if !self.tlc.confirms(i, claim.kind, &claim.inputs, &claim.wires) {
            return false;
        }
        let truth = &self.gates[i - 1];
        let v = &claim.values;
        let local = match (claim.kind, truth.source) {
            (TlKind::Nexp, _) => true,
            (TlKind::Input, Some(InputSource::XBit(j))) => v[0] == self.x[j],
            (TlKind::Input, Some(InputSource::Nexp(_))) => v[0] == v[1],
            (TlKind::And, _) => v[0] == (v[1] && v[2]),
            (TlKind::Or, _) => v[0] == (v[1] || v[2]),
            (TlKind::Not, _) => v[0] != v[1],
            (TlKind::Input, None) => false,
        };
        local && (i != self.tlc.output_gate() || v[0] == c)
    }

    fn subroutine_payment<T: Scalar>(&self, c_sub: bool, v_i: bool, r_sub: T) -> T {
        if c_sub != v_i {
            return -T::one();
        }
        T::from_count(2) * r_sub / T::from_count(self.p() as u64 + 1)
    }
}

fn encode_claim(claim: &NexpClaim, gw: u32, hw: u32) -> Bits {
    let mut w = BitWriter::new();
    w.push_u64(claim.kind.code(), 3);
    for &i in &claim.inputs {
        w.push_u64(i as u64, gw);
    }
    for &h in &claim.wires {
        w.push_u64(h as u64, hw);
    }
    w.push_bits(&claim.values);
    w.finish()
}

impl<T: Scalar> Protocol<T> for FigExpNexp {
    fn num_provers(&self) -> usize {
        4
    }

    fn num_rounds(&self) -> usize {
        9
    }

    /// `(i − 1, slot)`; `slot` indexes `i` itself (0) or one of its inputs.
    fn coin_radices(&self) -> Vec<u64> {
        vec![self.tlc.size() as u64, self.p() as u64 + 1]
    }

    /// Uniform over gates, then uniform over `{i}` and the inputs of `i`.
    fn coin_weight(&self, coins: &[u64]) -> u64 {
        let fan = self.gates[coins[0] as usize].inputs.len() as u64 + 1;
        if coins[1] < fan {
            self.slot_weight / fan
        } else {
            0
        }
    }

    fn speaks_first(&self, prover: usize) -> bool {
        prover == 0
    }

    fn step(&self, coins: &[u64], tr: &[Vec<Bits>]) -> Result<Action<T>> {
        let zero = Ok(Action::Pay(T::zero()));
        let i = coins[0] as usize + 1;
        let slot = coins[1] as usize;
        if tr[0][0].len() != 1 {
            return zero;
        }
        let c = tr[0][0].first() == Some(true);
        if tr[0].len() == 1 {
            let q = Bits::from_u64(i as u64, self.gate_width());
            return Ok(Action::Query(vec![Some(q), None, None, None]));
        }
        let Some(claim) = self.decode_claim(&tr[0][2]) else {
            return zero;
        };
        if !self.step4(i, c, &claim) {
            return zero;
        }
        let target = if slot == 0 { i } else { claim.inputs[slot - 1] };
        let v_i = claim.values[0];
        match tr[0].len() {
            3 => {
                let q = Bits::from_u64(target as u64, self.gate_width());
                Ok(Action::Query(vec![None, Some(q), None, None]))
            }
            5 => {
                let answer = &tr[1][4];
                if answer.len() != 1 || answer.first() != Some(claim.values[slot]) {
                    return Ok(Action::Pay(-T::one()));
                }
                if claim.kind != TlKind::Nexp {
                    return Ok(Action::Pay(T::one()));
                }
                let x_sub = Bits::new(claim.values[1..].to_vec());
                Ok(Action::Query(vec![None, None, Some(x_sub.clone()), Some(x_sub)]))
            }
            7 => {
                let opening = &tr[2][6];
                if opening.len() != 1 {
                    return Ok(Action::Pay(-T::one()));
                }
                if opening.first() == Some(false) {
                    return Ok(Action::Pay(self.subroutine_payment(false, v_i, T::half())));
                }
                Ok(Action::Query(vec![None, None, Some(Bits::empty()), None]))
            }
            _ => {
                let accepted = self
                    .tlc
                    .codec()
                    .decode(&claim.values[1..])
                    .ok()
                    .and_then(|inst| {
                        let table = OracleTable::new(inst.s(), tr[2][8].as_slice().to_vec()).ok()?;
                        Some(exhaustive_accepts(&inst, &table))
                    })
                    .unwrap_or(false);
                let r_sub = if accepted { T::one() } else { T::zero() };
                Ok(Action::Pay(self.subroutine_payment(true, v_i, r_sub)))
            }
        }
    }

    fn name(&self) -> String {
        "expnexp".into()
    }

    fn params(&self) -> serde_json::Value {
        let x: String = self.x.iter().map(|&b| if b { '1' } else { '0' }).collect();
        json!({
            "n": self.tlc.n(),
            "q": self.tlc.q(),
            "p": self.p(),
            "gates": self.tlc.size(),
            "x": x,
        })
    }
}

/// How P3 chooses its answer bit for a block `x'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubPolicy {
    /// The true membership of `x'`.
    Honest,
    /// The opposite of the true membership.
    Negated,
    Constant(bool),
}

type DecisionCache = Arc<Mutex<HashMap<Vec<bool>, Option<Decision>>>>;

/// P1 reports the true topology with values from `values`, P2 answers from
/// the same table, and P3 runs the subroutine according to `sub`, sending a
/// maximizing oracle whenever it answers 1 on a decodable block.
#[derive(Debug, Clone)]
pub struct NexpGateProfile {
    pub c: bool,
    /// `values[i-1]` is the claimed value of gate `i`.
    pub values: Vec<bool>,
    pub sub: SubPolicy,
    label: String,
    tlc: Arc<ThreeLevelCircuit>,
    cache: DecisionCache,
}

impl NexpGateProfile {
    pub fn new(tlc: Arc<ThreeLevelCircuit>, c: bool, values: Vec<bool>, sub: SubPolicy) -> Self {
        Self {
            c,
            values,
            sub,
            label: String::new(),
            tlc,
            cache: DecisionCache::default(),
        }
    }

    pub fn honest(tlc: Arc<ThreeLevelCircuit>, x: &[bool]) -> Result<Self> {
        let e = tlc.eval(x)?;
        Ok(Self::new(tlc, e.final_bit, e.values.as_slice().to_vec(), SubPolicy::Honest))
    }

    /// Value tables built from every claimed NEXP output vector, each with
    /// at most one further gate flipped, crossed with both answer bits and
    /// the honest and negated subroutine policies.
    pub fn family(tlc: Arc<ThreeLevelCircuit>, x: &[bool]) -> Result<Vec<Profile>> {
        let q = tlc.q();
        let size = tlc.size();
        let cache = DecisionCache::default();
        let mut out = Vec::new();
        for b in 0..1u32 << q {
            let nexp: Vec<bool> = (0..q).map(|j| (b >> j) & 1 == 1).collect();
            let base = tlc.values_with_nexp(x, &nexp)?.as_slice().to_vec();
            for flip in 0..=size {
                let mut values = base.clone();
                if flip > 0 {
                    values[flip - 1] = !values[flip - 1];
                }
                for c in [false, true] {
                    for sub in [SubPolicy::Honest, SubPolicy::Negated] {
                        let mut p = Self::new(tlc.clone(), c, values.clone(), sub);
                        p.cache = cache.clone();
                        p.label = format!("nexp={b:0q$b} flip={flip}", q = q);
                        out.push(Arc::new(p) as Profile);
                    }
                }
            }
        }
        Ok(out)
    }

    fn value(&self, gate: usize) -> bool {
        gate.checked_sub(1).and_then(|j| self.values.get(j)).copied().unwrap_or(false)
    }

    fn decide(&self, block: &[bool]) -> Option<Decision> {
        let mut cache = self.cache.lock().expect("decision cache poisoned");
        cache
            .entry(block.to_vec())
            .or_insert_with(|| {
                let inst = self.tlc.codec().decode(block).ok()?;
                decide_oracle3sat(&inst).ok()
            })
            .clone()
    }

    pub fn claim(&self, i: usize) -> Option<NexpClaim> {
        let truth = self.tlc.gate(i).ok()?;
        let p = self.tlc.p();
        let mut inputs = truth.inputs.clone();
        let mut wires = truth.wires.clone();
        inputs.resize(p, 0);
        wires.resize(p, 0);
        let mut values = vec![self.value(i)];
        values.extend(truth.inputs.iter().map(|&j| self.value(j)));
        values.resize(p + 1, false);
        Some(NexpClaim {
            kind: truth.kind,
            inputs,
            wires,
            values,
        })
    }
}

impl Strategy for NexpGateProfile {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        let gw = width_for(self.tlc.size() as u64);
        let hw = width_for(self.tlc.max_wire() as u64);
        match (prover, transcript.len()) {
            (0, 0) => Some(Bits::bit(self.c)),
            (0, 2) => {
                let i = transcript[1].reader().u64(gw)? as usize;
                Some(encode_claim(&self.claim(i)?, gw, hw))
            }
            (1, 4) => {
                let i = transcript[3].reader().u64(gw)? as usize;
                Some(Bits::bit(self.value(i)))
            }
            (2, 6) => {
                let member = self.decide(transcript[5].as_slice()).is_some_and(|d| d.member);
                Some(Bits::bit(match self.sub {
                    SubPolicy::Honest => member,
                    SubPolicy::Negated => !member,
                    SubPolicy::Constant(b) => b,
                }))
            }
            (2, 8) => Some(
                self.decide(transcript[5].as_slice())
                    .map_or_else(Bits::empty, |d| Bits::new(d.witness.bits().to_vec())),
            ),
            (3, 6) => Some(Bits::empty()),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        let table: String = self.values.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let label = if self.label.is_empty() {
            String::new()
        } else {
            format!(" [{}]", self.label)
        };
        format!("c={} sub={:?} v={table}{label}", u8::from(self.c), self.sub)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
