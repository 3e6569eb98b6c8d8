//! Seeded generators for instances, circuits and three-level circuits.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuits::{BlockCodec, Circuit, Gate, ThreeLevelCircuit};
use crate::error::{MripError, Result};
use crate::oracle3sat::{DeskBounds, Oracle3SatInstance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with `clauses` clauses. Half of all literals are drawn
/// from the three answer variables so that the oracle matters.
pub fn gen_instance<R: Rng>(r: u32, s: u32, clauses: usize, rng: &mut R) -> Result<Oracle3SatInstance> {
    let bounds = DeskBounds::default();
    if s > bounds.max_decide_width {
        return Err(MripError::Config(format!(
            "oracle width s = {s} exceeds {} (s ≤ 4)",
            bounds.max_decide_width
        )));
    }
    if s == 0 {
        return Err(MripError::Config("oracle width s must be positive".into()));
    }
    if r + 3 * s > bounds.max_assignment_bits {
        return Err(MripError::Config(format!(
            "r + 3s = {} exceeds {}",
            r + 3 * s,
            bounds.max_assignment_bits
        )));
    }
    let w = (r + 3 * s) as i32;
    let literal = |rng: &mut R| {
        let var = if w == 0 || rng.gen_bool(0.5) {
            w + rng.gen_range(1..=3)
        } else {
            rng.gen_range(1..=w)
        };
        if rng.gen_bool(0.5) {
            -var
        } else {
            var
        }
    };
    let clauses = (0..clauses)
        .map(|_| [literal(rng), literal(rng), literal(rng)])
        .collect();
    Oracle3SatInstance::new(r, s, clauses)
}

/// Every shape `(r, s)` with `r ≤ 2`, `s ≤ 2` inside the default desk bounds.
pub const CORPUS_SHAPES: [(u32, u32); 4] = [(0, 1), (1, 1), (2, 1), (0, 2)];

/// `count` instances over [`CORPUS_SHAPES`] with 1 to 6 clauses.
pub fn gen_corpus(seed: u64, count: usize) -> Result<Vec<Oracle3SatInstance>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let &(r, s) = CORPUS_SHAPES.choose(&mut rng).expect("non-empty");
            let m = rng.gen_range(1..=6);
            gen_instance(r, s, m, &mut rng)
        })
        .collect()
}

/// Random circuit on `n` inputs with `size` gates in total. Gate `k` reads
/// gate `k − 1` and possibly one other lower-numbered gate.
pub fn gen_circuit<R: Rng>(n: usize, size: usize, rng: &mut R) -> Result<Circuit> {
    if n == 0 || size <= n {
        return Err(MripError::Config(format!(
            "need at least one input and one logic gate, got n = {n}, size = {size}"
        )));
    }
    let mut gates: Vec<Gate> = (0..n).map(|_| Gate::input()).collect();
    for id in n + 1..=size {
        let a = id - 1;
        let b = rng.gen_range(1..id);
        let gate = match rng.gen_range(0..3) {
            0 => Gate::and(a, b),
            1 => Gate::or(a, b),
            _ => Gate::not(a),
        };
        gates.push(gate);
    }
    Circuit::new(n, gates)
}

fn gen_block_instance<R: Rng>(codec: &BlockCodec, rng: &mut R) -> Result<Oracle3SatInstance> {
    let r = rng.gen_range(0..1u32 << codec.r_bits);
    let clauses = rng.gen_range(0..=codec.max_clauses as usize);
    gen_instance(r, 1, clauses, rng)
}

/// Level 1 whose blocks are fixed instances selected by input bits.
///
/// Block `j` is `φ_j^1` when `x_{1 + j mod n}` is set and `φ_j^0` otherwise;
/// each output bit is a constant, a copy or a negation of that input.
/// Constants are `x_1 ∧ ¬x_1` and `x_1 ∨ ¬x_1` with `¬x_1` the last gate.
fn selector_level1(n: usize, blocks: &[(Vec<bool>, Vec<bool>)]) -> Result<Circuit> {
    let p: usize = blocks.first().map_or(0, |b| b.0.len());
    let helper = n + p * blocks.len() + 1;
    let mut gates: Vec<Gate> = (0..n).map(|_| Gate::input()).collect();
    for (j, (zero, one)) in blocks.iter().enumerate() {
        let sel = 1 + j % n;
        for (&b0, &b1) in zero.iter().zip(one) {
            gates.push(match (b0, b1) {
                (false, false) => Gate::and(1, helper),
                (true, true) => Gate::or(1, helper),
                (false, true) => Gate::and(sel, sel),
                (true, false) => Gate::not(sel),
            });
        }
    }
    gates.push(Gate::not(1));
    Circuit::new(n, gates)
}

/// Random three-level circuit with `q` NEXP gates and a random level 3 of
/// `level3_gates` logic gates over `x` and the NEXP outputs.
pub fn gen_three_level<R: Rng>(n: usize, q: usize, level3_gates: usize, rng: &mut R) -> Result<ThreeLevelCircuit> {
    if q == 0 || q > ThreeLevelCircuit::MAX_NEXP_GATES {
        return Err(MripError::Config(format!("NEXP gate count {q} outside 1..=4")));
    }
    if n == 0 {
        return Err(MripError::Config("need at least one input".into()));
    }
    let codec = BlockCodec::default();
    let blocks = (0..q)
        .map(|_| {
            let a = codec.encode(&gen_block_instance(&codec, rng)?)?;
            let b = codec.encode(&gen_block_instance(&codec, rng)?)?;
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let level1 = selector_level1(n, &blocks)?;
    let level3 = gen_level3(n, q, level3_gates.max(q), rng)?;
    ThreeLevelCircuit::new(level1, q, codec, level3)
}

/// Chains every NEXP output (inputs `n+1..=n+q`) into the output gate.
fn gen_level3<R: Rng>(n: usize, q: usize, logic: usize, rng: &mut R) -> Result<Circuit> {
    let inputs = n + q;
    let mut gates: Vec<Gate> = (0..inputs).map(|_| Gate::input()).collect();
    for k in 0..logic {
        let id = inputs + k + 1;
        let gate = if k < q {
            let b = if k == 0 { rng.gen_range(1..=n) } else { id - 1 };
            if rng.gen_bool(0.5) {
                Gate::and(n + k + 1, b)
            } else {
                Gate::or(n + k + 1, b)
            }
        } else {
            match rng.gen_range(0..3) {
                0 => Gate::and(id - 1, rng.gen_range(1..id)),
                1 => Gate::or(id - 1, rng.gen_range(1..id)),
                _ => Gate::not(id - 1),
            }
        };
        gates.push(gate);
    }
    Circuit::new(inputs, gates)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = gen_corpus(7, 5).unwrap();
        let b = gen_corpus(7, 5).unwrap();
        assert_eq!(a, b);
        let mut r1 = rng(3);
        let mut r2 = rng(3);
        assert_eq!(gen_circuit(3, 8, &mut r1).unwrap(), gen_circuit(3, 8, &mut r2).unwrap());
    }

    #[test]
    fn refuses_wide_oracles() {
        assert!(matches!(gen_instance(0, 5, 2, &mut rng(0)), Err(MripError::Config(_))));
    }

    #[test]
    fn three_level_blocks_follow_the_selector() {
        let mut r = rng(11);
        for _ in 0..5 {
            let tlc = gen_three_level(2, 2, 3, &mut r).unwrap();
            for x in 0..4u8 {
                let x: Vec<bool> = (0..2).map(|j| (x >> j) & 1 == 1).collect();
                let e = tlc.eval(&x).unwrap();
                assert_eq!(e.blocks.len(), 2);
            }
        }
    }
}
