//! Reference implementations shared by the integration tests. Nothing here
//! calls the library's deciders or evaluators.

#![allow(dead_code)]

use mrip::circuits::{Circuit, GateKind, ThreeLevelCircuit};
use mrip::gen;
use mrip::oracle3sat::Oracle3SatInstance;

pub const CORPUS_SEED: u64 = 20_240_611;
pub const CORPUS_SIZE: usize = 60;

pub fn corpus() -> Vec<Oracle3SatInstance> {
    gen::gen_corpus(CORPUS_SEED, CORPUS_SIZE).expect("corpus generates")
}

/// Value of variable `v` (1-based) under `w` and the three oracle answers.
fn var(inst: &Oracle3SatInstance, w: u64, answers: [bool; 3], v: u32) -> bool {
    let width = inst.r() + 3 * inst.s();
    if v <= width {
        (w >> (v - 1)) & 1 == 1
    } else {
        answers[(v - width - 1) as usize]
    }
}

/// Query `k` (0-based) read from `w`: bit `j` of block `k` has weight `2^j`.
fn query(inst: &Oracle3SatInstance, w: u64, k: u32) -> usize {
    let mut q = 0;
    for j in 0..inst.s() {
        let v = inst.r() + k * inst.s() + j + 1;
        if (w >> (v - 1)) & 1 == 1 {
            q += 1 << j;
        }
    }
    q
}

/// Number of assignments satisfied with the oracle given as a bitmask.
pub fn brute_count(inst: &Oracle3SatInstance, oracle: u64) -> u64 {
    let width = inst.r() + 3 * inst.s();
    let mut count = 0;
    for w in 0..1u64 << width {
        let answers = [0, 1, 2].map(|k| (oracle >> query(inst, w, k)) & 1 == 1);
        let sat = inst.clauses().iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = var(inst, w, answers, lit.unsigned_abs());
                if lit > 0 {
                    value
                } else {
                    !value
                }
            })
        });
        if sat {
            count += 1;
        }
    }
    count
}

/// `(member, a*)` by trying every oracle.
pub fn brute_decide(inst: &Oracle3SatInstance) -> (bool, u64) {
    let n = 1u64 << (inst.r() + 3 * inst.s());
    let best = (0..1u64 << (1u64 << inst.s()))
        .map(|oracle| brute_count(inst, oracle))
        .max()
        .unwrap();
    (best == n, best)
}

/// Gate values by repeated relaxation, independent of any topological sort.
pub fn brute_eval(circuit: &Circuit, x: &[bool]) -> Vec<bool> {
    let g = circuit.size();
    let mut known: Vec<Option<bool>> = vec![None; g];
    for (j, &b) in x.iter().enumerate() {
        known[j] = Some(b);
    }
    loop {
        let mut progress = false;
        for id in 1..=g {
            if known[id - 1].is_some() {
                continue;
            }
            let gate = circuit.gate(id);
            let ins: Option<Vec<bool>> = gate.inputs.iter().map(|&j| known[j - 1]).collect();
            if let Some(ins) = ins {
                known[id - 1] = Some(match gate.kind {
                    GateKind::And => ins[0] && ins[1],
                    GateKind::Or => ins[0] || ins[1],
                    GateKind::Not => !ins[0],
                    GateKind::Input => unreachable!("inputs are seeded"),
                });
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    known.into_iter().map(|v| v.expect("acyclic circuit")).collect()
}

fn field(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc * 2 + u64::from(b))
}

/// Decodes a block with the default layout: r (1 bit), s − 1 (1 bit), clause
/// count (2 bits), then three clauses of three sign-and-4-bit literals.
pub fn brute_decode(bits: &[bool]) -> Option<Oracle3SatInstance> {
    assert_eq!(bits.len(), 49);
    let r = field(&bits[0..1]) as u32;
    let s = field(&bits[1..2]) as u32 + 1;
    let count = field(&bits[2..4]) as usize;
    if count > 3 {
        return None;
    }
    let mut clauses = Vec::new();
    for c in 0..count {
        let mut clause = [0i32; 3];
        for (slot, lit) in clause.iter_mut().enumerate() {
            let off = 4 + (3 * c + slot) * 5;
            let v = field(&bits[off + 1..off + 5]) as i32;
            *lit = if bits[off] { -v } else { v };
        }
        clauses.push(clause);
    }
    Oracle3SatInstance::new(r, s, clauses).ok()
}

pub struct ThreeLevelTruth {
    pub final_bit: bool,
    /// Membership of each block, `None` when the block does not decode.
    pub members: Vec<Option<bool>>,
}

pub fn brute_three_level(tlc: &ThreeLevelCircuit, x: &[bool]) -> ThreeLevelTruth {
    let n = tlc.n();
    let p = tlc.p();
    let l1 = brute_eval(tlc.level1(), x);
    let members: Vec<Option<bool>> = (0..tlc.q())
        .map(|j| brute_decode(&l1[n + j * p..n + (j + 1) * p]).map(|inst| brute_decide(&inst).0))
        .collect();
    let mut l3_in = x.to_vec();
    l3_in.extend(members.iter().map(|m| m.unwrap_or(false)));
    let l3 = brute_eval(tlc.level3(), &l3_in);
    ThreeLevelTruth {
        final_bit: *l3.last().unwrap(),
        members,
    }
}

/// Hand-built circuits plus seeded random ones, all with at most 8 gates.
pub fn small_circuits() -> Vec<Circuit> {
    use mrip::circuits::Gate;
    let xor2 = Circuit::new(
        2,
        vec![
            Gate::input(),
            Gate::input(),
            Gate::or(1, 2),
            Gate::and(1, 2),
            Gate::not(4),
            Gate::and(3, 5),
        ],
    )
    .unwrap();
    let mut out = vec![xor2];
    let mut rng = gen::rng(5);
    for size in [4, 5, 6, 7, 8, 8] {
        out.push(gen::gen_circuit(2, size, &mut rng).unwrap());
    }
    let mut rng = gen::rng(6);
    out.push(gen::gen_circuit(3, 8, &mut rng).unwrap());
    out
}

pub fn all_inputs(n: usize) -> Vec<Vec<bool>> {
    (0..1u32 << n).map(|v| (0..n).map(|j| (v >> j) & 1 == 1).collect()).collect()
}

/// Bit `b` of the mask is `A(b)`.
pub fn oracle_mask(oracle: &mrip::oracle3sat::OracleTable) -> u64 {
    oracle
        .bits()
        .iter()
        .enumerate()
        .fold(0, |m, (b, &v)| m | (u64::from(v) << b))
}
