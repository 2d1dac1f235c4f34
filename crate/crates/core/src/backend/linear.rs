use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::term::{Op, Term};

/// Abelian group operations, possibly with several aliases for each role
/// (a Kronecker product of two abelian-group theories identifies them).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOps {
    pub add: Vec<Op>,
    pub neg: Vec<Op>,
    pub zero: Vec<Op>,
    /// `Some(k)` for modules over Z/k.
    pub modulus: Option<u64>,
}

/// Coefficient vector indexed by variable.
pub type Coeffs = BTreeMap<usize, i64>;

impl LinearOps {
    pub fn standard(modulus: Option<u64>) -> Self {
        LinearOps { add: vec!["add".into()], neg: vec!["neg".into()], zero: vec!["zero".into()], modulus }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Self {
        let r = |v: &[Op]| v.iter().map(|o| Op::from(f(o))).collect();
        LinearOps { add: r(&self.add), neg: r(&self.neg), zero: r(&self.zero), modulus: self.modulus }
    }

    /// Merges the aliases of another abelian-group signature.
    pub fn merged(&self, other: &LinearOps) -> Self {
        let cat = |a: &[Op], b: &[Op]| a.iter().chain(b).cloned().collect();
        let modulus = match (self.modulus, other.modulus) {
            (None, m) | (m, None) => m,
            (Some(a), Some(b)) => Some(gcd(a, b)),
        };
        LinearOps {
            add: cat(&self.add, &other.add),
            neg: cat(&self.neg, &other.neg),
            zero: cat(&self.zero, &other.zero),
            modulus,
        }
    }

    fn reduce(&self, c: i64) -> i64 {
        match self.modulus {
            Some(k) => c.rem_euclid(k as i64),
            None => c,
        }
    }

    pub fn coeffs(&self, t: &Term) -> Result<Coeffs> {
        let mut out = Coeffs::new();
        self.accumulate(t, 1, &mut out)?;
        out.retain(|_, c| {
            *c = self.reduce(*c);
            *c != 0
        });
        Ok(out)
    }

    fn accumulate(&self, t: &Term, sign: i64, out: &mut Coeffs) -> Result<()> {
        match t {
            Term::Var(i) => {
                let e = out.entry(*i).or_insert(0);
                *e = self.reduce(*e + sign);
                Ok(())
            }
            Term::App(op, args) => match args.as_slice() {
                [] if self.zero.contains(op) => Ok(()),
                [a] if self.neg.contains(op) => self.accumulate(a, -sign, out),
                [a, b] if self.add.contains(op) => {
                    self.accumulate(a, sign, out)?;
                    self.accumulate(b, sign, out)
                }
                _ => Err(Error::UnknownOp(op.to_string())),
            },
        }
    }

    /// `c` copies of `x_i` (or of `neg(x_i)` when negative), summed right-nested.
    pub fn term_of(&self, coeffs: &Coeffs) -> Term {
        let mut items = Vec::new();
        for (&v, &c) in coeffs {
            let atom = if c < 0 { Term::app(&self.neg[0], vec![Term::Var(v)]) } else { Term::Var(v) };
            items.extend(std::iter::repeat_n(atom, c.unsigned_abs() as usize));
        }
        Term::fold_right(&self.add[0], items, Term::constant(&self.zero[0]))
    }

    pub fn normalize(&self, t: &Term) -> Result<Term> {
        Ok(self.term_of(&self.coeffs(t)?))
    }

    /// All `k^n` elements for a finite modulus, in lexicographic coefficient order.
    pub fn elements(&self, n: usize) -> Option<Vec<Term>> {
        let k = self.modulus? as usize;
        let total = k.checked_pow(n as u32)?;
        Some(
            (0..total)
                .map(|mut code| {
                    let mut coeffs = Coeffs::new();
                    for v in (1..=n).rev() {
                        let c = (code % k) as i64;
                        code /= k;
                        if c != 0 {
                            coeffs.insert(v, c);
                        }
                    }
                    self.term_of(&coeffs)
                })
                .collect(),
        )
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_term;

    #[test]
    fn integer_coefficients() {
        let ab = LinearOps::standard(None);
        let nf = |s: &str| ab.normalize(&parse_term(s).unwrap()).unwrap().to_string();
        assert_eq!(nf("add(x2,neg(x2))"), "zero");
        assert_eq!(nf("add(x2,add(x1,x2))"), "add(x1,add(x2,x2))");
        assert_eq!(nf("neg(add(x1,zero))"), "neg(x1)");
    }

    #[test]
    fn modular_coefficients() {
        let m3 = LinearOps::standard(Some(3));
        let t = parse_term("neg(x1)").unwrap();
        assert_eq!(m3.normalize(&t).unwrap().to_string(), "add(x1,x1)");
        assert_eq!(m3.elements(2).unwrap().len(), 9);
    }
}
