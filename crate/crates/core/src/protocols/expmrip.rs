//! The two-prover, five-round protocol for explicitly given circuits.
//!
//! The verifier samples a gate `i` and asks P1 for its type, inputs, input
//! wires and the values of `i` and its inputs; it then asks P2 for the value
//! of one of those gates and pays 1 if every check passes, 0 otherwise.

use std::any::Any;
use std::sync::Arc;

use serde_json::json;

use crate::circuits::{wire_id, Circuit, DcOracle, DcQuery, GateKind};
use crate::engine::{width_for, Action, BitWriter, Bits, Profile, Protocol, Strategy};
use crate::error::Result;
use crate::scalar::Scalar;

/// Number of coin slots used to pick `i'`; divisible by 1, 2 and 3.
const SLOTS: u64 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigExpMrip {
    dc: DcOracle,
    x: Vec<bool>,
}

pub fn make_fig_expmrip(dc: DcOracle, x: Vec<bool>) -> Result<FigExpMrip> {
    FigExpMrip::new(dc, x)
}

/// P1's round-3 message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateClaim {
    pub kind: GateKind,
    pub inputs: [usize; 2],
    pub wires: [usize; 2],
    /// `v_i, v_i1, v_i2`.
    pub values: [bool; 3],
}

impl FigExpMrip {
    pub fn new(dc: DcOracle, x: Vec<bool>) -> Result<Self> {
        dc.circuit().eval(&x)?;
        Ok(Self { dc, x })
    }

    pub fn circuit(&self) -> &Circuit {
        self.dc.circuit()
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    fn g(&self) -> usize {
        self.dc.size()
    }

    pub fn gate_width(&self) -> u32 {
        width_for(self.g() as u64)
    }

    pub fn wire_width(&self) -> u32 {
        width_for(2 * self.g() as u64)
    }

    pub fn encode_claim(&self, claim: &GateClaim) -> Bits {
        let mut w = BitWriter::new();
        w.push_u64(claim.kind.code(), 2);
        for &i in &claim.inputs {
            w.push_u64(i as u64, self.gate_width());
        }
        for &h in &claim.wires {
            w.push_u64(h as u64, self.wire_width());
        }
        w.push_bits(&claim.values);
        w.finish()
    }

    pub fn decode_claim(&self, m: &Bits) -> Option<GateClaim> {
        let mut r = m.reader();
        let kind = GateKind::from_code(r.u64(2)?)?;
        let (gw, hw) = (self.gate_width(), self.wire_width());
        let inputs = [r.u64(gw)? as usize, r.u64(gw)? as usize];
        let wires = [r.u64(hw)? as usize, r.u64(hw)? as usize];
        let values = [r.bit()?, r.bit()?, r.bit()?];
        r.is_done().then_some(GateClaim {
            kind,
            inputs,
            wires,
            values,
        })
    }

    /// Positions of the claim that `i'` may be drawn from.
    fn candidates(&self, i: usize, claim: &GateClaim) -> usize {
        if i <= self.circuit().n() {
            1
        } else {
            1 + claim.kind.arity()
        }
    }

    /// Checks 6a to 6d.
    fn local_checks(&self, i: usize, c: bool, claim: &GateClaim) -> bool {
        let n = self.circuit().n();
        let [vi, v1, v2] = claim.values;
        if i > n {
            let q = |query| self.dc.query(query) == Ok(1);
            if !q(DcQuery::Type { gate: i, kind: claim.kind }) || claim.kind == GateKind::Input {
                return false;
            }
            for slot in 0..claim.kind.arity() {
                let (h, src) = (claim.wires[slot], claim.inputs[slot]);
                if !q(DcQuery::Input { wire: h, gate: i }) || !q(DcQuery::Output { wire: h, gate: src }) {
                    return false;
                }
            }
            if claim.kind.apply(&[v1, v2]) != Some(vi) {
                return false;
            }
        } else if vi != self.x[i - 1] {
            return false;
        }
        i != self.g() || vi == c
    }
}

impl<T: Scalar> Protocol<T> for FigExpMrip {
    fn num_provers(&self) -> usize {
        2
    }

    fn num_rounds(&self) -> usize {
        5
    }

    fn coin_radices(&self) -> Vec<u64> {
        vec![self.g() as u64, SLOTS]
    }

    fn speaks_first(&self, prover: usize) -> bool {
        prover == 0
    }

    fn step(&self, coins: &[u64], tr: &[Vec<Bits>]) -> Result<Action<T>> {
        let fail = Ok(Action::Pay(T::zero()));
        let i = coins[0] as usize + 1;
        if tr[0][0].len() != 1 {
            return fail;
        }
        let c = tr[0][0].first() == Some(true);
        match tr[0].len() {
            1 => Ok(Action::Query(vec![Some(Bits::from_u64(i as u64, self.gate_width())), None])),
            3 => {
                let Some(claim) = self.decode_claim(&tr[0][2]) else {
                    return fail;
                };
                let pos = (coins[1] % self.candidates(i, &claim) as u64) as usize;
                let target = if pos == 0 { i } else { claim.inputs[pos - 1] };
                if target >= 1usize << self.gate_width() {
                    return fail;
                }
                Ok(Action::Query(vec![None, Some(Bits::from_u64(target as u64, self.gate_width()))]))
            }
            _ => {
                let Some(claim) = self.decode_claim(&tr[0][2]) else {
                    return fail;
                };
                let pos = (coins[1] % self.candidates(i, &claim) as u64) as usize;
                let consistent = tr[1][4].len() == 1 && tr[1][4].first() == Some(claim.values[pos]);
                Ok(Action::Pay(if consistent && self.local_checks(i, c, &claim) {
                    T::one()
                } else {
                    T::zero()
                }))
            }
        }
    }

    fn name(&self) -> String {
        "expmrip".into()
    }

    fn params(&self) -> serde_json::Value {
        let x: String = self.x.iter().map(|&b| if b { '1' } else { '0' }).collect();
        json!({ "n": self.circuit().n(), "g": self.g(), "x": x })
    }
}

/// P1 reports the circuit's topology and values from `values`; P2 answers
/// every value query from the same table.
#[derive(Debug, Clone)]
pub struct GateOracleProfile {
    pub c: bool,
    /// `values[i-1]` is the claimed value of gate `i`.
    pub values: Vec<bool>,
    /// When false, P1 misreports the type of every non-input gate.
    pub topology_honest: bool,
    circuit: Arc<Circuit>,
}

impl GateOracleProfile {
    pub fn new(circuit: Arc<Circuit>, c: bool, values: Vec<bool>, topology_honest: bool) -> Self {
        Self {
            c,
            values,
            topology_honest,
            circuit,
        }
    }

    pub fn honest(circuit: Arc<Circuit>, x: &[bool]) -> Result<Self> {
        let values = circuit.eval(x)?.as_slice().to_vec();
        let c = values[values.len() - 1];
        Ok(Self::new(circuit, c, values, true))
    }

    /// All `2^g` value tables crossed with both answer bits.
    pub fn family(circuit: Arc<Circuit>) -> Vec<Profile> {
        let g = circuit.size();
        let mut out = Vec::with_capacity(2usize << g);
        for c in [false, true] {
            for table in 0..1u64 << g {
                let values = (0..g).map(|j| (table >> j) & 1 == 1).collect();
                out.push(Arc::new(Self::new(circuit.clone(), c, values, true)) as Profile);
            }
        }
        out
    }

    fn value(&self, gate: usize) -> bool {
        gate.checked_sub(1).and_then(|j| self.values.get(j)).copied().unwrap_or(false)
    }

    /// The claim P1 sends for gate `i`.
    pub fn claim(&self, i: usize) -> Option<GateClaim> {
        let gate = self.circuit.gates().get(i.checked_sub(1)?)?;
        let mut inputs = [0; 2];
        let mut wires = [0; 2];
        for (slot, &src) in gate.inputs.iter().enumerate() {
            inputs[slot] = src;
            wires[slot] = wire_id(i, slot);
        }
        let kind = match (self.topology_honest, gate.kind) {
            (true, k) | (false, k @ GateKind::Input) => k,
            (false, GateKind::And) => GateKind::Or,
            (false, GateKind::Or | GateKind::Not) => GateKind::And,
        };
        Some(GateClaim {
            kind,
            inputs,
            wires,
            values: [self.value(i), self.value(inputs[0]), self.value(inputs[1])],
        })
    }
}

impl Strategy for GateOracleProfile {
    fn respond(&self, prover: usize, transcript: &[Bits]) -> Option<Bits> {
        let g = self.circuit.size();
        let gw = width_for(g as u64);
        let hw = width_for(2 * g as u64);
        match (prover, transcript.len()) {
            (0, 0) => Some(Bits::bit(self.c)),
            (0, 2) => {
                let i = transcript[1].reader().u64(gw)? as usize;
                let claim = self.claim(i)?;
                let mut w = BitWriter::new();
                w.push_u64(claim.kind.code(), 2);
                for v in claim.inputs {
                    w.push_u64(v as u64, gw);
                }
                for h in claim.wires {
                    w.push_u64(h as u64, hw);
                }
                w.push_bits(&claim.values);
                Some(w.finish())
            }
            (1, 4) => {
                let i = transcript[3].reader().u64(gw)? as usize;
                Some(Bits::bit(self.value(i)))
            }
            _ => None,
        }
    }

    fn describe(&self) -> String {
        let table: String = self.values.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let topo = if self.topology_honest { "" } else { " lying-topology" };
        format!("c={} v={table}{topo}", u8::from(self.c))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
