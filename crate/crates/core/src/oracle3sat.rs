//! Oracle-3SAT instances, oracle truth tables and exhaustive deciders.
//!
//! Variables are numbered `1..=r+3s+3`. Variables `1..=r+3s` come from the
//! assignment `w = (z, b1, b2, b3)`; the last three stand for the oracle
//! answers `A(b1), A(b2), A(b3)`. Literals are DIMACS-style signed integers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MripError, Result};
use crate::jsonpos::array_element_line;

/// Feasibility caps for exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeskBounds {
    /// Upper bound on `r + 3s`.
    pub max_assignment_bits: u32,
    /// Upper bound on `s` for [`decide_oracle3sat`].
    pub max_decide_width: u32,
}

impl Default for DeskBounds {
    fn default() -> Self {
        Self {
            max_assignment_bits: 6,
            max_decide_width: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CompiledClause {
    pos: u64,
    neg: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Oracle3SatInstance {
    r: u32,
    s: u32,
    clauses: Vec<[i32; 3]>,
    compiled: Vec<CompiledClause>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    r: u32,
    s: u32,
    clauses: Vec<[i32; 3]>,
}

impl TryFrom<RawInstance> for Oracle3SatInstance {
    type Error = MripError;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Self::new(raw.r, raw.s, raw.clauses)
    }
}

impl From<Oracle3SatInstance> for RawInstance {
    fn from(inst: Oracle3SatInstance) -> Self {
        RawInstance {
            r: inst.r,
            s: inst.s,
            clauses: inst.clauses,
        }
    }
}

impl Oracle3SatInstance {
    pub fn new(r: u32, s: u32, clauses: Vec<[i32; 3]>) -> Result<Self> {
        Self::with_bounds(r, s, clauses, &DeskBounds::default())
    }

    pub fn with_bounds(r: u32, s: u32, clauses: Vec<[i32; 3]>, bounds: &DeskBounds) -> Result<Self> {
        if s == 0 {
            return Err(MripError::InvalidInstance("oracle width s must be positive".into()));
        }
        if r + 3 * s > bounds.max_assignment_bits {
            return Err(MripError::InstanceTooLarge(format!(
                "r + 3s = {} exceeds the desk bound {}",
                r + 3 * s,
                bounds.max_assignment_bits
            )));
        }
        if let Some((idx, lit)) = first_bad_literal(r, s, &clauses) {
            return Err(MripError::InvalidInstance(format!(
                "clause {idx}: literal {lit} outside 1..={}",
                r + 3 * s + 3
            )));
        }
        let compiled = clauses
            .iter()
            .map(|clause| {
                let mut c = CompiledClause { pos: 0, neg: 0 };
                for &lit in clause {
                    let bit = 1u64 << (lit.unsigned_abs() - 1);
                    if lit > 0 {
                        c.pos |= bit;
                    } else {
                        c.neg |= bit;
                    }
                }
                c
            })
            .collect();
        Ok(Self {
            r,
            s,
            clauses,
            compiled,
        })
    }

    /// The empty conjunction: every oracle satisfies it.
    pub fn tautology(r: u32, s: u32) -> Result<Self> {
        Self::new(r, s, Vec::new())
    }

    /// `(v1) ∧ (¬v1)`, each padded to three literals. Requires `r + 3s ≥ 1`.
    pub fn contradiction(r: u32, s: u32) -> Result<Self> {
        Self::new(r, s, vec![[1, 1, 1], [-1, -1, -1]])
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// `r + 3s`, the length of an assignment `w`.
    pub fn assignment_bits(&self) -> u32 {
        self.r + 3 * self.s
    }

    /// `r + 3s + 3`.
    pub fn num_variables(&self) -> u32 {
        self.assignment_bits() + 3
    }

    /// `2^{r+3s}`.
    pub fn num_assignments(&self) -> u64 {
        1u64 << self.assignment_bits()
    }

    /// Reported size: variable count plus literal slots.
    pub fn size(&self) -> usize {
        self.num_variables() as usize + 3 * self.clauses.len()
    }

    /// Oracle query `b_k` (k in 1..=3) carried by the assignment with index `w`.
    pub fn query_of(&self, w: u64, k: u32) -> usize {
        debug_assert!((1..=3).contains(&k));
        let mask = (1u64 << self.s) - 1;
        ((w >> (self.r + (k - 1) * self.s)) & mask) as usize
    }

    /// Clause check on the packed assignment: bits `0..r+3s` are `w`, the next
    /// three bits are the oracle answers.
    pub fn satisfied_packed(&self, w: u64, answers: [bool; 3]) -> bool {
        let shift = self.assignment_bits();
        let assign = w
            | (u64::from(answers[0]) << shift)
            | (u64::from(answers[1]) << (shift + 1))
            | (u64::from(answers[2]) << (shift + 2));
        self.compiled
            .iter()
            .all(|c| assign & c.pos != 0 || !assign & c.neg != 0)
    }

    pub fn eval_cnf(&self, w: &WAssignment, answers: [bool; 3]) -> bool {
        self.satisfied_packed(w.index(), answers)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(text).map_err(|e| MripError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        if let Some((idx, lit)) = first_bad_literal(raw.r, raw.s, &raw.clauses) {
            return Err(MripError::Parse {
                line: array_element_line(text, "clauses", idx),
                message: format!(
                    "literal {lit} outside 1..={}",
                    raw.r + 3 * raw.s + 3
                ),
            });
        }
        let line = text.find("\"r\"").map_or(1, |p| 1 + text[..p].matches('\n').count());
        Self::new(raw.r, raw.s, raw.clauses).map_err(|e| MripError::Parse {
            line,
            message: e.to_string(),
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut out = format!("{{\n  \"r\": {},\n  \"s\": {},\n  \"clauses\": [", self.r, self.s);
        for (i, c) in self.clauses.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&format!("[{}, {}, {}]", c[0], c[1], c[2]));
        }
        if !self.clauses.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("]\n}\n");
        out
    }
}

fn first_bad_literal(r: u32, s: u32, clauses: &[[i32; 3]]) -> Option<(usize, i32)> {
    let max = i64::from(r) + 3 * i64::from(s) + 3;
    clauses.iter().enumerate().find_map(|(idx, clause)| {
        clause
            .iter()
            .find(|&&lit| lit == 0 || i64::from(lit.unsigned_abs()) > max)
            .map(|&lit| (idx, lit))
    })
}

/// A truth table `A: {0,1}^s → {0,1}`; entry `b` is `A(b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OracleTable {
    width: u32,
    table: Vec<bool>,
}

impl OracleTable {
    pub fn new(width: u32, table: Vec<bool>) -> Result<Self> {
        if table.len() != 1usize << width {
            return Err(MripError::InvalidInstance(format!(
                "oracle table of width {width} needs {} entries, got {}",
                1usize << width,
                table.len()
            )));
        }
        Ok(Self { width, table })
    }

    pub fn constant(width: u32, value: bool) -> Self {
        Self {
            width,
            table: vec![value; 1usize << width],
        }
    }

    /// The `k`-th table in lexicographic order of `(A(0), A(1), …)`.
    pub fn from_lex_index(width: u32, k: u64) -> Self {
        let len = 1usize << width;
        let table = (0..len).map(|b| (k >> (len - 1 - b)) & 1 == 1).collect();
        Self { width, table }
    }

    pub fn lex_index(&self) -> u64 {
        self.table.iter().fold(0, |acc, &bit| (acc << 1) | u64::from(bit))
    }

    /// All `2^{2^s}` tables in lexicographic order.
    pub fn all(width: u32) -> impl Iterator<Item = OracleTable> {
        let count = 1u64 << (1u64 << width);
        (0..count).map(move |k| Self::from_lex_index(width, k))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn get(&self, b: usize) -> bool {
        self.table[b]
    }

    pub fn bits(&self) -> &[bool] {
        &self.table
    }
}

impl fmt::Display for OracleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.table {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `w = (z, b1, b2, b3)`; bit `j` of [`WAssignment::index`] is variable `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WAssignment {
    pub z: Vec<bool>,
    pub b: [Vec<bool>; 3],
}

impl WAssignment {
    pub fn from_index(r: u32, s: u32, w: u64) -> Self {
        let bit = |j: u32| (w >> j) & 1 == 1;
        let z = (0..r).map(bit).collect();
        let b = [0, 1, 2].map(|k| (0..s).map(|j| bit(r + k * s + j)).collect());
        Self { z, b }
    }

    pub fn index(&self) -> u64 {
        self.z
            .iter()
            .chain(self.b.iter().flatten())
            .enumerate()
            .fold(0, |acc, (j, &v)| acc | (u64::from(v) << j))
    }

    pub fn len(&self) -> usize {
        self.z.len() + self.b.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `a'`: the number of assignments `w` satisfied under `oracle`.
pub fn count_satisfying(instance: &Oracle3SatInstance, oracle: &OracleTable) -> u64 {
    assert_eq!(oracle.width(), instance.s(), "oracle width must equal s");
    (0..instance.num_assignments())
        .filter(|&w| {
            let answers = [1, 2, 3].map(|k| oracle.get(instance.query_of(w, k)));
            instance.satisfied_packed(w, answers)
        })
        .count() as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub member: bool,
    /// `a*`, the maximum of [`count_satisfying`] over all oracles.
    pub a_star: u64,
    /// Lexicographically smallest oracle attaining `a_star`.
    pub witness: OracleTable,
}

pub fn decide_oracle3sat(instance: &Oracle3SatInstance) -> Result<Decision> {
    decide_oracle3sat_with(instance, &DeskBounds::default())
}

pub fn decide_oracle3sat_with(instance: &Oracle3SatInstance, bounds: &DeskBounds) -> Result<Decision> {
    if instance.s() > bounds.max_decide_width {
        return Err(MripError::InstanceTooLarge(format!(
            "s = {} exceeds {} for exhaustive oracle search",
            instance.s(),
            bounds.max_decide_width
        )));
    }
    let full = instance.num_assignments();
    let mut best: Option<(u64, OracleTable)> = None;
    for oracle in OracleTable::all(instance.s()) {
        let count = count_satisfying(instance, &oracle);
        if best.as_ref().map_or(true, |(a, _)| count > *a) {
            best = Some((count, oracle));
            if count == full {
                break;
            }
        }
    }
    let (a_star, witness) = best.expect("at least one oracle exists");
    Ok(Decision {
        member: a_star == full,
        a_star,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Variable-by-variable evaluation, independent of the bitmask path.
    fn eval_by_hand(inst: &Oracle3SatInstance, w: &WAssignment, answers: [bool; 3]) -> bool {
        let mut vals: Vec<bool> = w.z.clone();
        for b in &w.b {
            vals.extend(b);
        }
        vals.extend(answers);
        inst.clauses().iter().all(|clause| {
            clause.iter().any(|&lit| {
                let v = vals[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }

    fn corpus_r1_s1() -> Oracle3SatInstance {
        // variables: z=1, b1=2, b2=3, b3=4, A(b1)=5, A(b2)=6, A(b3)=7
        Oracle3SatInstance::new(1, 1, vec![[1, 5, -2], [-1, 6, 7]]).unwrap()
    }

    #[test]
    fn empty_clause_list_is_true() {
        let inst = Oracle3SatInstance::tautology(1, 1).unwrap();
        for w in 0..inst.num_assignments() {
            let wa = WAssignment::from_index(1, 1, w);
            assert!(inst.eval_cnf(&wa, [false, true, false]));
        }
    }

    #[test]
    fn forced_literal() {
        let inst = Oracle3SatInstance::new(1, 1, vec![[1, 1, 1]]).unwrap();
        let w = WAssignment {
            z: vec![true],
            b: [vec![false], vec![true], vec![false]],
        };
        assert!(inst.eval_cnf(&w, [false; 3]));
        assert!(inst.eval_cnf(&w, [true; 3]));
    }

    #[test]
    fn corpus_instance_matches_hand_evaluation() {
        let inst = corpus_r1_s1();
        for w in 0..inst.num_assignments() {
            let wa = WAssignment::from_index(1, 1, w);
            assert_eq!(wa.index(), w);
            for ans in 0..8u8 {
                let answers = [ans & 1 == 1, ans & 2 == 2, ans & 4 == 4];
                assert_eq!(inst.eval_cnf(&wa, answers), eval_by_hand(&inst, &wa, answers));
            }
        }
        // z=1, b=(0,0,0): clause 1 true via z, clause 2 needs A(b2) or A(b3).
        let w = WAssignment::from_index(1, 1, 0b0001);
        assert!(!inst.eval_cnf(&w, [false, false, false]));
        assert!(inst.eval_cnf(&w, [false, false, true]));
    }

    #[test]
    fn counts() {
        let taut = Oracle3SatInstance::tautology(2, 1).unwrap();
        assert_eq!(count_satisfying(&taut, &OracleTable::constant(1, false)), 32);
        let contra = Oracle3SatInstance::contradiction(1, 1).unwrap();
        for oracle in OracleTable::all(1) {
            assert_eq!(count_satisfying(&contra, &oracle), 0);
        }
        // independent double loop for the corpus instance under A ≡ 0
        let inst = corpus_r1_s1();
        let zero = OracleTable::constant(1, false);
        let mut expected = 0;
        for z in 0..2u64 {
            for bs in 0..8u64 {
                let w = z | (bs << 1);
                let wa = WAssignment::from_index(1, 1, w);
                if eval_by_hand(&inst, &wa, [false; 3]) {
                    expected += 1;
                }
            }
        }
        assert_eq!(count_satisfying(&inst, &zero), expected);
        assert_eq!(expected, 4);
    }

    #[test]
    fn decisions() {
        let taut = Oracle3SatInstance::tautology(0, 2).unwrap();
        let d = decide_oracle3sat(&taut).unwrap();
        assert!(d.member);
        assert_eq!(d.a_star, 64);
        assert_eq!(d.witness, OracleTable::constant(2, false));

        let contra = Oracle3SatInstance::contradiction(0, 1).unwrap();
        let d = decide_oracle3sat(&contra).unwrap();
        assert!(!d.member);
        assert_eq!(d.a_star, 0);

        // A(b1) must be 1 for every b1: only oracles with A ≡ 1 work.
        let inst = Oracle3SatInstance::new(0, 1, vec![[4, 4, 4]]).unwrap();
        let d = decide_oracle3sat(&inst).unwrap();
        assert!(d.member);
        assert_eq!(d.witness, OracleTable::constant(1, true));
    }

    #[test]
    fn decide_refuses_wide_oracles() {
        let bounds = DeskBounds {
            max_assignment_bits: 12,
            max_decide_width: 2,
        };
        let inst = Oracle3SatInstance::with_bounds(0, 3, vec![], &bounds).unwrap();
        assert!(matches!(
            decide_oracle3sat_with(&inst, &bounds),
            Err(MripError::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn lex_order_of_tables() {
        let tables: Vec<String> = OracleTable::all(1).map(|t| t.to_string()).collect();
        assert_eq!(tables, ["00", "01", "10", "11"]);
        for k in 0..16 {
            assert_eq!(OracleTable::from_lex_index(2, k).lex_index(), k);
        }
    }

    #[test]
    fn construction_rejects_bad_literals_and_sizes() {
        assert!(Oracle3SatInstance::new(1, 1, vec![[1, 2, 8]]).is_err());
        assert!(Oracle3SatInstance::new(1, 1, vec![[0, 2, 3]]).is_err());
        assert!(Oracle3SatInstance::new(1, 1, vec![[-7, 2, 3]]).is_ok());
        assert!(matches!(
            Oracle3SatInstance::new(1, 2, vec![]),
            Err(MripError::InstanceTooLarge(_))
        ));
        assert!(Oracle3SatInstance::new(1, 0, vec![]).is_err());
    }

    #[test]
    fn json_errors_name_the_line() {
        let text = "{\n  \"r\": 1,\n  \"s\": 1,\n  \"clauses\": [\n    [1, 2, 3],\n    [1, 9, 3]\n  ]\n}\n";
        match Oracle3SatInstance::from_json_str(text) {
            Err(MripError::Parse { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains('9'));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let broken = "{\n  \"r\": 1,\n  \"s\": \n}";
        assert!(matches!(
            Oracle3SatInstance::from_json_str(broken),
            Err(MripError::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let inst = corpus_r1_s1();
        let text = inst.to_json_string();
        assert_eq!(Oracle3SatInstance::from_json_str(&text).unwrap(), inst);
        let empty = Oracle3SatInstance::tautology(0, 1).unwrap();
        assert_eq!(Oracle3SatInstance::from_json_str(&empty.to_json_string()).unwrap(), empty);
    }
}
