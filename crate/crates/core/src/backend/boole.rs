use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::term::{Op, Term};

/// Largest number of distinct variables a Boolean term may mention.
pub const MAX_TRUTH_VARS: usize = 20;

/// Operation names of a Boolean algebra signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleOps {
    pub zero: Op,
    pub one: Op,
    pub and: Op,
    pub or: Op,
    pub not: Op,
}

/// A Boolean function of `k` inputs as a packed truth table (bit `i` is the
/// value at assignment `i`, input `j` read from bit `j` of `i`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    pub inputs: usize,
    bits: Vec<u64>,
}

impl TruthTable {
    fn words(inputs: usize) -> usize {
        (1usize << inputs).div_ceil(64)
    }

    pub fn constant(inputs: usize, value: bool) -> Self {
        let mut t = TruthTable { inputs, bits: vec![if value { !0 } else { 0 }; Self::words(inputs)] };
        t.mask();
        t
    }

    pub fn projection(inputs: usize, j: usize) -> Self {
        let mut t = TruthTable::constant(inputs, false);
        for i in 0..(1usize << inputs) {
            if i >> j & 1 == 1 {
                t.set(i, true);
            }
        }
        t
    }

    fn mask(&mut self) {
        let len = 1usize << self.inputs;
        if len < 64 {
            self.bits[0] &= (1u64 << len) - 1;
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.bits[i / 64] |= 1 << (i % 64);
        } else {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| f(*a, *b)).collect();
        TruthTable { inputs: self.inputs, bits }
    }

    pub fn and(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a & b)
    }

    pub fn or(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a | b)
    }

    pub fn not(&self) -> Self {
        let mut t = TruthTable { inputs: self.inputs, bits: self.bits.iter().map(|a| !a).collect() };
        t.mask();
        t
    }

    pub fn is_constant(&self) -> Option<bool> {
        let len = 1usize << self.inputs;
        let first = self.get(0);
        (0..len).all(|i| self.get(i) == first).then_some(first)
    }

    /// Whether the function depends on input `j`.
    pub fn depends_on(&self, j: usize) -> bool {
        (0..(1usize << self.inputs)).any(|i| i >> j & 1 == 0 && self.get(i) != self.get(i | 1 << j))
    }
}

impl BooleOps {
    pub fn standard() -> Self {
        BooleOps { zero: "0".into(), one: "1".into(), and: "and".into(), or: "or".into(), not: "not".into() }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Self {
        BooleOps {
            zero: f(&self.zero).into(),
            one: f(&self.one).into(),
            and: f(&self.and).into(),
            or: f(&self.or).into(),
            not: f(&self.not).into(),
        }
    }

    /// Truth table of `t` with inputs indexed through `slot`.
    pub fn table(&self, t: &Term, inputs: usize, slot: &BTreeMap<usize, usize>) -> Result<TruthTable> {
        match t {
            Term::Var(i) => Ok(TruthTable::projection(inputs, slot[i])),
            Term::App(op, args) => {
                let sub = args.iter().map(|a| self.table(a, inputs, slot)).collect::<Result<Vec<_>>>()?;
                match (sub.as_slice(), op) {
                    ([], o) if *o == self.zero => Ok(TruthTable::constant(inputs, false)),
                    ([], o) if *o == self.one => Ok(TruthTable::constant(inputs, true)),
                    ([a, b], o) if *o == self.and => Ok(a.and(b)),
                    ([a, b], o) if *o == self.or => Ok(a.or(b)),
                    ([a], o) if *o == self.not => Ok(a.not()),
                    _ => Err(Error::UnknownOp(op.to_string())),
                }
            }
        }
    }

    /// Truth table over the variables actually used, with those variables in ascending order.
    pub fn function(&self, t: &Term) -> Result<(Vec<usize>, TruthTable)> {
        let vars: Vec<usize> = t.var_set().into_iter().collect();
        if vars.len() > MAX_TRUTH_VARS {
            return Err(Error::Invalid(format!(
                "truth table over {} variables exceeds the limit of {MAX_TRUTH_VARS}",
                vars.len()
            )));
        }
        let slot = vars.iter().enumerate().map(|(j, v)| (*v, j)).collect();
        let table = self.table(t, vars.len(), &slot)?;
        Ok((vars, table))
    }

    /// Canonical term: a constant, a literal, or the minterm DNF over essential variables.
    pub fn canonical(&self, vars: &[usize], table: &TruthTable) -> Term {
        if let Some(v) = table.is_constant() {
            return Term::constant(if v { &self.one } else { &self.zero });
        }
        let essential: Vec<usize> = (0..vars.len()).filter(|&j| table.depends_on(j)).collect();
        let value = |sel: usize| {
            let mut idx = 0;
            for (b, &j) in essential.iter().enumerate() {
                if sel >> b & 1 == 1 {
                    idx |= 1 << j;
                }
            }
            table.get(idx)
        };
        let literal = |b: usize, positive: bool| {
            let x = Term::Var(vars[essential[b]]);
            if positive {
                x
            } else {
                Term::app(&self.not, vec![x])
            }
        };
        if essential.len() == 1 {
            return literal(0, value(1));
        }
        let minterms = (0..1usize << essential.len())
            .filter(|&sel| value(sel))
            .map(|sel| {
                let lits = (0..essential.len()).map(|b| literal(b, sel >> b & 1 == 1)).collect();
                Term::fold_right(&self.and, lits, Term::constant(&self.one))
            })
            .collect();
        Term::fold_right(&self.or, minterms, Term::constant(&self.zero))
    }

    pub fn normalize(&self, t: &Term) -> Result<Term> {
        let (vars, table) = self.function(t)?;
        Ok(self.canonical(&vars, &table))
    }

    /// Every element of the free algebra on `n` generators, ordered by truth-table index.
    pub fn elements(&self, n: usize) -> Vec<Term> {
        let vars: Vec<usize> = (1..=n).collect();
        let rows = 1usize << n;
        (0..1u128 << rows)
            .map(|code| {
                let mut t = TruthTable::constant(n, false);
                for i in 0..rows {
                    t.set(i, code >> i & 1 == 1);
                }
                self.canonical(&vars, &t)
            })
            .collect()
    }
}
