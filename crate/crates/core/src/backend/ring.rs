use crate::error::{Error, Result};
use crate::ncpoly::NCPoly;
use crate::term::{Op, Term};

/// Operation names of a unital ring signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingOps {
    pub add: Op,
    pub neg: Op,
    pub zero: Op,
    pub mul: Op,
    pub one: Op,
}

impl RingOps {
    pub fn standard() -> Self {
        RingOps { add: "add".into(), neg: "neg".into(), zero: "zero".into(), mul: "mul".into(), one: "one".into() }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Self {
        RingOps {
            add: f(&self.add).into(),
            neg: f(&self.neg).into(),
            zero: f(&self.zero).into(),
            mul: f(&self.mul).into(),
            one: f(&self.one).into(),
        }
    }

    /// `t` as a noncommutative polynomial; variable `x_j` is generator `j - 1`.
    pub fn poly(&self, t: &Term) -> Result<NCPoly> {
        match t {
            Term::Var(j) => Ok(NCPoly::generator((j - 1) as u16)),
            Term::App(op, args) => {
                let sub = args.iter().map(|s| self.poly(s)).collect::<Result<Vec<_>>>()?;
                match sub.as_slice() {
                    [] if *op == self.zero => Ok(NCPoly::zero()),
                    [] if *op == self.one => Ok(NCPoly::one()),
                    [p] if *op == self.neg => Ok(p.neg()),
                    [p, q] if *op == self.add => Ok(p.add(q)),
                    [p, q] if *op == self.mul => Ok(p.mul(q)),
                    _ => Err(Error::UnknownOp(op.to_string())),
                }
            }
        }
    }

    pub fn term_of(&self, p: &NCPoly) -> Term {
        let mut mons: Vec<_> = p.terms().collect();
        mons.sort_by(|(u, _), (w, _)| u.len().cmp(&w.len()).then_with(|| u.cmp(w)));
        let mut items = Vec::new();
        for (w, c) in mons {
            let factors = w.iter().map(|&g| Term::Var(g as usize + 1)).collect();
            let mut m = Term::fold_right(&self.mul, factors, Term::constant(&self.one));
            if c < 0 {
                m = Term::App(self.neg.clone(), vec![m]);
            }
            items.extend(std::iter::repeat_n(m, c.unsigned_abs() as usize));
        }
        Term::fold_right(&self.add, items, Term::constant(&self.zero))
    }

    pub fn normalize(&self, t: &Term) -> Result<Term> {
        Ok(self.term_of(&self.poly(t)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_term;

    #[test]
    fn ring_identities() {
        let r = RingOps::standard();
        let nf = |s: &str| r.normalize(&parse_term(s).unwrap()).unwrap().to_string();
        assert_eq!(nf("mul(x1,one)"), "x1");
        assert_eq!(nf("mul(x1,zero)"), "zero");
        assert_eq!(nf("mul(add(x1,x2),x1)"), nf("add(mul(x1,x1),mul(x2,x1))"));
        assert_ne!(nf("mul(x1,x2)"), nf("mul(x2,x1)"));
    }
}
