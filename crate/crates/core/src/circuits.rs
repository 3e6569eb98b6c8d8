//! Explicit Boolean circuits, the Direct-Connect query interface over them,
//! and the three-level circuit whose middle level consists of Oracle-3SAT gates.
//!
//! Gates are numbered from 1. Gates `1..=n` are the input gates and gate `g`
//! is the output of a single-output circuit. The `slot`-th input wire of gate
//! `d` (slot 0 or 1) has id `2d − slot`, so wire ids lie in `1..=2g`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{MripError, Result};
use crate::jsonpos::array_element_line;
use crate::oracle3sat::{decide_oracle3sat, Oracle3SatInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Input,
    And,
    Or,
    Not,
}

impl GateKind {
    pub const ALL: [GateKind; 4] = [GateKind::Input, GateKind::And, GateKind::Or, GateKind::Not];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Input => 0,
            GateKind::Not => 1,
            GateKind::And | GateKind::Or => 2,
        }
    }

    pub fn code(self) -> u64 {
        match self {
            GateKind::Input => 0,
            GateKind::And => 1,
            GateKind::Or => 2,
            GateKind::Not => 3,
        }
    }

    pub fn from_code(code: u64) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    /// Applies the gate to its input values; `None` for input gates.
    pub fn apply(self, inputs: &[bool]) -> Option<bool> {
        match self {
            GateKind::Input => None,
            GateKind::Not => Some(!inputs[0]),
            GateKind::And => Some(inputs[0] && inputs[1]),
            GateKind::Or => Some(inputs[0] || inputs[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    #[serde(rename = "type")]
    pub kind: GateKind,
    #[serde(rename = "in", default)]
    pub inputs: Vec<usize>,
}

impl Gate {
    pub fn input() -> Self {
        Gate {
            kind: GateKind::Input,
            inputs: vec![],
        }
    }

    pub fn and(a: usize, b: usize) -> Self {
        Gate {
            kind: GateKind::And,
            inputs: vec![a, b],
        }
    }

    pub fn or(a: usize, b: usize) -> Self {
        Gate {
            kind: GateKind::Or,
            inputs: vec![a, b],
        }
    }

    pub fn not(a: usize) -> Self {
        Gate {
            kind: GateKind::Not,
            inputs: vec![a],
        }
    }
}

pub fn wire_id(dest: usize, slot: usize) -> usize {
    2 * dest - slot
}

/// Gate values indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateValues(Vec<bool>);

impl GateValues {
    pub fn from_one_based(values: Vec<bool>) -> Self {
        GateValues(values)
    }

    pub fn get(&self, gate: usize) -> bool {
        self.0[gate - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    order: Vec<usize>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let g = gates.len();
        if g == 0 || g < n {
            return Err(MripError::InvalidCircuit(format!(
                "{g} gates cannot hold {n} inputs and an output"
            )));
        }
        for (idx, gate) in gates.iter().enumerate() {
            check_gate(n, g, idx + 1, gate)?;
        }
        let order = topological_order(&gates)
            .ok_or_else(|| MripError::InvalidCircuit("wiring contains a cycle".into()))?;
        Ok(Self { n, gates, order })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Gate count `g`, including input gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[id - 1]
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn eval(&self, x: &[bool]) -> Result<GateValues> {
        if x.len() != self.n {
            return Err(MripError::InvalidCircuit(format!(
                "input has {} bits, circuit expects {}",
                x.len(),
                self.n
            )));
        }
        let mut values = vec![false; self.gates.len()];
        values[..self.n].copy_from_slice(x);
        for &id in &self.order {
            let gate = &self.gates[id - 1];
            let ins: Vec<bool> = gate.inputs.iter().map(|&j| values[j - 1]).collect();
            if let Some(v) = gate.kind.apply(&ins) {
                values[id - 1] = v;
            }
        }
        Ok(GateValues(values))
    }

    /// `(wire, source, destination)` for every wire, sorted by wire id.
    pub fn wiring(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<_> = self
            .gates
            .iter()
            .enumerate()
            .flat_map(|(idx, gate)| {
                let dest = idx + 1;
                gate.inputs
                    .iter()
                    .enumerate()
                    .map(move |(slot, &src)| (wire_id(dest, slot), src, dest))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawCircuit = serde_json::from_str(text).map_err(|e| MripError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        Self::from_raw(raw, |idx| array_element_line(text, "gates", idx))
    }

    fn from_raw(raw: RawCircuit, line_of: impl Fn(usize) -> usize) -> Result<Self> {
        let g = raw.gates.len();
        for (idx, gate) in raw.gates.iter().enumerate() {
            let dest = idx + 1;
            let err = |message: String| MripError::Parse {
                line: line_of(idx),
                message: format!("gate {dest}: {message}"),
            };
            let as_gate = Gate {
                kind: gate.kind,
                inputs: gate.inputs.clone(),
            };
            check_gate(raw.n, g, dest, &as_gate).map_err(|e| err(e.to_string()))?;
            if let Some(wires) = &gate.wires {
                let expected: Vec<usize> = (0..gate.inputs.len()).map(|s| wire_id(dest, s)).collect();
                if *wires != expected {
                    return Err(err(format!("wires {wires:?} differ from {expected:?}")));
                }
            }
        }
        let gates = raw
            .gates
            .into_iter()
            .map(|g| Gate {
                kind: g.kind,
                inputs: g.inputs,
            })
            .collect();
        Self::new(raw.n, gates).map_err(|e| MripError::Parse {
            line: 1,
            message: e.to_string(),
        })
    }

    fn to_raw(&self) -> RawCircuit {
        RawCircuit {
            n: self.n,
            gates: self
                .gates
                .iter()
                .enumerate()
                .map(|(idx, g)| RawGate {
                    kind: g.kind,
                    inputs: g.inputs.clone(),
                    wires: Some((0..g.inputs.len()).map(|s| wire_id(idx + 1, s)).collect()),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut out = format!("{{\n  \"n\": {},\n  \"gates\": [", self.n);
        for (idx, gate) in self.to_raw().gates.iter().enumerate() {
            out.push_str(if idx == 0 { "\n    " } else { ",\n    " });
            out.push_str(&serde_json::to_string(gate).expect("gate serializes"));
        }
        out.push_str("\n  ]\n}\n");
        out
    }
}

fn check_gate(n: usize, g: usize, id: usize, gate: &Gate) -> Result<()> {
    let bad = |m: String| Err(MripError::InvalidCircuit(format!("gate {id}: {m}")));
    let should_be_input = id <= n;
    if should_be_input != (gate.kind == GateKind::Input) {
        return bad(if should_be_input {
            "gates 1..=n must be INPUT".into()
        } else {
            "only gates 1..=n may be INPUT".into()
        });
    }
    if gate.inputs.len() != gate.kind.arity() {
        return bad(format!(
            "{:?} takes {} inputs, got {}",
            gate.kind,
            gate.kind.arity(),
            gate.inputs.len()
        ));
    }
    if let Some(&src) = gate.inputs.iter().find(|&&src| src == 0 || src > g || src == id) {
        return bad(format!("input gate {src} out of range"));
    }
    Ok(())
}

fn topological_order(gates: &[Gate]) -> Option<Vec<usize>> {
    let g = gates.len();
    let mut indegree = vec![0usize; g + 1];
    let mut fanout = vec![Vec::new(); g + 1];
    for (idx, gate) in gates.iter().enumerate() {
        for &src in &gate.inputs {
            indegree[idx + 1] += 1;
            fanout[src].push(idx + 1);
        }
    }
    let mut queue: VecDeque<usize> = (1..=g).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(g);
    while let Some(id) = queue.pop_front() {
        order.push(id);
        for &next in &fanout[id] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                queue.push_back(next);
            }
        }
    }
    (order.len() == g).then_some(order)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGate {
    #[serde(rename = "type")]
    kind: GateKind,
    #[serde(rename = "in", default)]
    inputs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wires: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCircuit {
    n: usize,
    gates: Vec<RawGate>,
}

pub fn eval_circuit(circuit: &Circuit, x: &[bool]) -> Result<GateValues> {
    circuit.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcQuery {
    Size,
    /// Is wire `wire` an input to gate `gate`?
    Input { wire: usize, gate: usize },
    /// Is wire `wire` the output of gate `gate`?
    Output { wire: usize, gate: usize },
    /// Is `kind` the type of gate `gate`?
    Type { gate: usize, kind: GateKind },
}

/// Answers `SIZE / INPUT / OUTPUT / TYPE` for an explicitly stored circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcOracle {
    circuit: Circuit,
}

impl DcOracle {
    pub fn new(circuit: Circuit) -> Self {
        Self { circuit }
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn size(&self) -> usize {
        self.circuit.size()
    }

    /// `SIZE` returns the gate count; every other query returns 0 or 1.
    pub fn query(&self, query: DcQuery) -> Result<u64> {
        let g = self.circuit.size();
        let check_gate = |i: usize| {
            if (1..=g).contains(&i) {
                Ok(())
            } else {
                Err(MripError::Query(format!("gate {i} outside 1..={g}")))
            }
        };
        let check_wire = |h: usize| {
            if (1..=2 * g).contains(&h) {
                Ok(())
            } else {
                Err(MripError::Query(format!("wire {h} outside 1..={}", 2 * g)))
            }
        };
        let answer = match query {
            DcQuery::Size => return Ok(g as u64),
            DcQuery::Input { wire, gate } => {
                check_wire(wire)?;
                check_gate(gate)?;
                let arity = self.circuit.gate(gate).inputs.len();
                (0..arity).any(|slot| wire_id(gate, slot) == wire)
            }
            DcQuery::Output { wire, gate } => {
                check_wire(wire)?;
                check_gate(gate)?;
                let dest = wire.div_ceil(2);
                let slot = 2 * dest - wire;
                self.circuit.gate(dest).inputs.get(slot) == Some(&gate)
            }
            DcQuery::Type { gate, kind } => {
                check_gate(gate)?;
                self.circuit.gate(gate).kind == kind
            }
        };
        Ok(u64::from(answer))
    }

    /// True when the DC interface confirms wire `wire` runs from `src` into `dest`.
    pub fn confirms_edge(&self, wire: usize, src: usize, dest: usize) -> bool {
        self.query(DcQuery::Input { wire, gate: dest }) == Ok(1)
            && self.query(DcQuery::Output { wire, gate: src }) == Ok(1)
    }
}

pub fn dc_query(oracle: &DcOracle, query: DcQuery) -> Result<u64> {
    oracle.query(query)
}

/// Fixed-width encoding of an Oracle-3SAT instance as an NEXP-gate input block.
///
/// Layout (each field most significant bit first): `r`, `s − 1`, clause
/// count, then `max_clauses` slots of three literals, each a sign bit
/// followed by the variable index. Slots past the clause count are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCodec {
    pub r_bits: u32,
    pub s_bits: u32,
    pub count_bits: u32,
    pub var_bits: u32,
    pub max_clauses: u32,
}

impl Default for BlockCodec {
    fn default() -> Self {
        Self {
            r_bits: 1,
            s_bits: 1,
            count_bits: 2,
            var_bits: 4,
            max_clauses: 3,
        }
    }
}

impl BlockCodec {
    /// Block width `p`.
    pub fn width(&self) -> usize {
        (self.r_bits + self.s_bits + self.count_bits + self.max_clauses * 3 * (1 + self.var_bits)) as usize
    }

    fn literal_offset(&self, clause: usize, slot: usize) -> usize {
        (self.r_bits + self.s_bits + self.count_bits) as usize + (clause * 3 + slot) * (1 + self.var_bits as usize)
    }

    pub fn encode(&self, instance: &Oracle3SatInstance) -> Result<Vec<bool>> {
        let fits = |v: u64, bits: u32| v < (1u64 << bits);
        let count = instance.clauses().len() as u64;
        let max_var = u64::from(instance.num_variables());
        if !fits(u64::from(instance.r()), self.r_bits)
            || !fits(u64::from(instance.s() - 1), self.s_bits)
            || count > u64::from(self.max_clauses)
            || !fits(count, self.count_bits)
            || !fits(max_var, self.var_bits)
        {
            return Err(MripError::InvalidInstance(format!(
                "instance (r={}, s={}, {} clauses) does not fit the block codec",
                instance.r(),
                instance.s(),
                count
            )));
        }
        let mut bits = vec![false; self.width()];
        let mut at = 0;
        for (value, width) in [
            (u64::from(instance.r()), self.r_bits),
            (u64::from(instance.s() - 1), self.s_bits),
            (count, self.count_bits),
        ] {
            write_field(&mut bits[at..at + width as usize], value);
            at += width as usize;
        }
        for (c, clause) in instance.clauses().iter().enumerate() {
            for (slot, &lit) in clause.iter().enumerate() {
                let off = self.literal_offset(c, slot);
                bits[off] = lit < 0;
                write_field(&mut bits[off + 1..off + 1 + self.var_bits as usize], u64::from(lit.unsigned_abs()));
            }
        }
        Ok(bits)
    }

    pub fn decode(&self, bits: &[bool]) -> std::result::Result<Oracle3SatInstance, String> {
        if bits.len() != self.width() {
            return Err(format!("block has {} bits, expected {}", bits.len(), self.width()));
        }
        let mut at = 0;
        let mut field = |width: u32| {
            let v = read_field(&bits[at..at + width as usize]);
            at += width as usize;
            v
        };
        let r = field(self.r_bits) as u32;
        let s = field(self.s_bits) as u32 + 1;
        let count = field(self.count_bits) as usize;
        if count > self.max_clauses as usize {
            return Err(format!("clause count {count} exceeds {}", self.max_clauses));
        }
        let clauses = (0..count)
            .map(|c| {
                [0, 1, 2].map(|slot| {
                    let off = self.literal_offset(c, slot);
                    let idx = read_field(&bits[off + 1..off + 1 + self.var_bits as usize]) as i32;
                    if bits[off] {
                        -idx
                    } else {
                        idx
                    }
                })
            })
            .collect();
        Oracle3SatInstance::new(r, s, clauses).map_err(|e| e.to_string())
    }
}

fn write_field(out: &mut [bool], value: u64) {
    let w = out.len();
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = (value >> (w - 1 - j)) & 1 == 1;
    }
}

fn read_field(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

/// Gate types of the three-level circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TlKind {
    Input,
    And,
    Or,
    Not,
    Nexp,
}

impl TlKind {
    pub fn code(self) -> u64 {
        match self {
            TlKind::Input => 0,
            TlKind::And => 1,
            TlKind::Or => 2,
            TlKind::Not => 3,
            TlKind::Nexp => 4,
        }
    }

    pub fn from_code(code: u64) -> Option<Self> {
        [TlKind::Input, TlKind::And, TlKind::Or, TlKind::Not, TlKind::Nexp]
            .get(code as usize)
            .copied()
    }

    fn from_gate(kind: GateKind) -> Self {
        match kind {
            GateKind::Input => TlKind::Input,
            GateKind::And => TlKind::And,
            GateKind::Or => TlKind::Or,
            GateKind::Not => TlKind::Not,
        }
    }
}

/// Where a three-level input gate takes its value from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSource {
    /// Bit `j` (0-based) of `x`.
    XBit(usize),
    /// The output of NEXP gate with this global id.
    Nexp(usize),
}

/// Global view of one gate: type, input gates, input wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TlGate {
    pub kind: TlKind,
    pub inputs: Vec<usize>,
    pub wires: Vec<usize>,
    pub source: Option<InputSource>,
}

/// Level 1 maps `x` to `q` blocks of `p` bits on gates `n+1..=n+p·q`; NEXP
/// gates `g+1..=g+q` decide the blocks; level 3 (gates `g+q+1..=g+q+g'`)
/// reads `x` and the NEXP outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeLevelCircuit {
    level1: Circuit,
    level3: Circuit,
    q: usize,
    codec: BlockCodec,
    dc1: DcOracle,
    dc3: DcOracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeLevelEval {
    pub final_bit: bool,
    pub values: GateValues,
    pub blocks: Vec<Oracle3SatInstance>,
    pub nexp: Vec<bool>,
}

impl ThreeLevelCircuit {
    pub const MAX_NEXP_GATES: usize = 4;

    pub fn new(level1: Circuit, q: usize, codec: BlockCodec, level3: Circuit) -> Result<Self> {
        let n = level1.n();
        let p = codec.width();
        if q == 0 || q > Self::MAX_NEXP_GATES {
            return Err(MripError::InvalidCircuit(format!(
                "NEXP gate count {q} outside 1..={}",
                Self::MAX_NEXP_GATES
            )));
        }
        if level1.size() < n + p * q {
            return Err(MripError::InvalidCircuit(format!(
                "level 1 has {} gates, needs at least n + p·q = {}",
                level1.size(),
                n + p * q
            )));
        }
        if level3.n() != n + q {
            return Err(MripError::InvalidCircuit(format!(
                "level 3 must have n + q = {} inputs, has {}",
                n + q,
                level3.n()
            )));
        }
        Ok(Self {
            dc1: DcOracle::new(level1.clone()),
            dc3: DcOracle::new(level3.clone()),
            level1,
            level3,
            q,
            codec,
        })
    }

    pub fn n(&self) -> usize {
        self.level1.n()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// NEXP-gate fan-in `p`.
    pub fn p(&self) -> usize {
        self.codec.width()
    }

    pub fn codec(&self) -> &BlockCodec {
        &self.codec
    }

    pub fn level1(&self) -> &Circuit {
        &self.level1
    }

    pub fn level3(&self) -> &Circuit {
        &self.level3
    }

    /// `g + q + g'`.
    pub fn size(&self) -> usize {
        self.level1.size() + self.q + self.level3.size()
    }

    pub fn output_gate(&self) -> usize {
        self.size()
    }

    fn g1(&self) -> usize {
        self.level1.size()
    }

    fn nexp_wire_base(&self) -> usize {
        2 * self.g1()
    }

    fn level3_wire_base(&self) -> usize {
        self.nexp_wire_base() + self.q * self.p()
    }

    fn link_wire_base(&self) -> usize {
        self.level3_wire_base() + 2 * self.level3.size()
    }

    /// Largest wire id in use.
    pub fn max_wire(&self) -> usize {
        self.link_wire_base() + self.q
    }

    /// Type, inputs, wires and value source of a global gate, by naming convention.
    pub fn gate(&self, id: usize) -> Result<TlGate> {
        let (n, g, q, p) = (self.n(), self.g1(), self.q, self.p());
        if id == 0 || id > self.size() {
            return Err(MripError::Query(format!("gate {id} outside 1..={}", self.size())));
        }
        if id <= g {
            let gate = self.level1.gate(id);
            return Ok(TlGate {
                kind: TlKind::from_gate(gate.kind),
                inputs: gate.inputs.clone(),
                wires: (0..gate.inputs.len()).map(|s| wire_id(id, s)).collect(),
                source: (id <= n).then_some(InputSource::XBit(id - 1)),
            });
        }
        if id <= g + q {
            let block = id - g - 1;
            let first = n + block * p + 1;
            return Ok(TlGate {
                kind: TlKind::Nexp,
                inputs: (first..first + p).collect(),
                wires: (1..=p).map(|k| self.nexp_wire_base() + block * p + k).collect(),
                source: None,
            });
        }
        let local = id - g - q;
        let gate = self.level3.gate(local);
        if local <= n {
            return Ok(TlGate {
                kind: TlKind::Input,
                inputs: vec![],
                wires: vec![],
                source: Some(InputSource::XBit(local - 1)),
            });
        }
        if local <= n + q {
            let k = local - n;
            return Ok(TlGate {
                kind: TlKind::Input,
                inputs: vec![g + k],
                wires: vec![self.link_wire_base() + k],
                source: Some(InputSource::Nexp(g + k)),
            });
        }
        Ok(TlGate {
            kind: TlKind::from_gate(gate.kind),
            inputs: gate.inputs.iter().map(|&j| j + g + q).collect(),
            wires: (0..gate.inputs.len())
                .map(|s| self.level3_wire_base() + wire_id(local, s))
                .collect(),
            source: None,
        })
    }

    /// Checks a claimed type and wiring of gate `id`. Level-1 and level-3
    /// logic gates go through their DC oracles; everything else follows the
    /// naming convention.
    pub fn confirms(&self, id: usize, kind: TlKind, inputs: &[usize], wires: &[usize]) -> bool {
        let Ok(truth) = self.gate(id) else {
            return false;
        };
        let (g, q) = (self.g1(), self.q);
        let logic = matches!(kind, TlKind::And | TlKind::Or | TlKind::Not);
        let in_level1 = id > self.n() && id <= g;
        let in_level3 = id > g + q + self.n() + q;
        if logic && (in_level1 || in_level3) {
            let (dc, offset, wire_base) = if in_level1 {
                (&self.dc1, 0, 0)
            } else {
                (&self.dc3, g + q, self.level3_wire_base())
            };
            let local = id - offset;
            let gk = match kind {
                TlKind::And => GateKind::And,
                TlKind::Or => GateKind::Or,
                _ => GateKind::Not,
            };
            if dc.query(DcQuery::Type { gate: local, kind: gk }) != Ok(1) {
                return false;
            }
            let arity = gk.arity();
            if inputs.len() < arity || wires.len() < arity {
                return false;
            }
            return (0..arity).all(|slot| {
                let (Some(src), Some(h)) = (inputs[slot].checked_sub(offset), wires[slot].checked_sub(wire_base)) else {
                    return false;
                };
                src >= 1 && h >= 1 && dc.confirms_edge(h, src, local)
            });
        }
        let arity = truth.inputs.len();
        kind == truth.kind
            && inputs.len() >= arity
            && wires.len() >= arity
            && inputs[..arity] == truth.inputs[..]
            && wires[..arity] == truth.wires[..]
    }

    /// The `q` blocks written by level 1 on input `x`.
    pub fn blocks(&self, x: &[bool]) -> Result<Vec<Vec<bool>>> {
        let (n, p) = (self.n(), self.p());
        let v1 = self.level1.eval(x)?;
        Ok((0..self.q)
            .map(|block| (0..p).map(|k| v1.get(n + block * p + k + 1)).collect())
            .collect())
    }

    /// Gate values, indexed from 1, when the NEXP gates output `nexp`.
    pub fn values_with_nexp(&self, x: &[bool], nexp: &[bool]) -> Result<GateValues> {
        let v1 = self.level1.eval(x)?;
        let mut x3 = x.to_vec();
        x3.extend(nexp);
        let v3 = self.level3.eval(&x3)?;
        let mut values = v1.as_slice().to_vec();
        values.extend(nexp);
        values.extend(v3.as_slice());
        Ok(GateValues(values))
    }

    pub fn eval(&self, x: &[bool]) -> Result<ThreeLevelEval> {
        let mut blocks = Vec::with_capacity(self.q);
        let mut nexp = Vec::with_capacity(self.q);
        for (block, bits) in self.blocks(x)?.into_iter().enumerate() {
            let instance = self
                .codec
                .decode(&bits)
                .map_err(|reason| MripError::UndecodableBlock { block, reason })?;
            nexp.push(decide_oracle3sat(&instance)?.member);
            blocks.push(instance);
        }
        let values = self.values_with_nexp(x, &nexp)?;
        Ok(ThreeLevelEval {
            final_bit: values.get(values.len()),
            values,
            blocks,
            nexp,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawThreeLevel = serde_json::from_str(text).map_err(|e| MripError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let key_line = |key: &str| text.find(&format!("\"{key}\"")).map_or(1, |p| 1 + text[..p].matches('\n').count());
        let l1 = Circuit::from_raw(raw.level1, |_| key_line("level1"))?;
        let l3 = Circuit::from_raw(raw.level3, |_| key_line("level3"))?;
        let tlc = Self::new(l1, raw.q, raw.codec, l3).map_err(|e| MripError::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        if let Some(instances) = raw.instances {
            let at_zero = tlc.eval(&vec![false; tlc.n()]).map_err(|e| MripError::Parse {
                line: key_line("instances"),
                message: e.to_string(),
            })?;
            if instances != at_zero.blocks {
                return Err(MripError::Parse {
                    line: key_line("instances"),
                    message: "embedded instances differ from the level-1 output at x = 0".into(),
                });
            }
        }
        Ok(tlc)
    }

    pub fn to_json_string(&self) -> String {
        let indent = |c: &Circuit| c.to_json_string().trim_end().replace('\n', "\n  ");
        let mut out = format!(
            "{{\n  \"n\": {},\n  \"q\": {},\n  \"codec\": {},\n  \"level1\": {},\n  \"level3\": {}",
            self.n(),
            self.q,
            compact(&self.codec),
            indent(&self.level1),
            indent(&self.level3)
        );
        if let Ok(e) = self.eval(&vec![false; self.n()]) {
            out.push_str(",\n  \"instances\": [");
            for (j, inst) in e.blocks.iter().enumerate() {
                out.push_str(if j == 0 { "\n    " } else { ",\n    " });
                out.push_str(&compact(inst));
            }
            out.push_str("\n  ]");
        }
        out.push_str("\n}\n");
        out
    }
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("value serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawThreeLevel {
    n: usize,
    q: usize,
    codec: BlockCodec,
    level1: RawCircuit,
    level3: RawCircuit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    instances: Option<Vec<Oracle3SatInstance>>,
}

pub fn eval_three_level(tlc: &ThreeLevelCircuit, x: &[bool]) -> Result<ThreeLevelEval> {
    tlc.eval(x)
}
