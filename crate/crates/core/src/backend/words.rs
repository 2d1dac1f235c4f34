use crate::error::{Error, Result};
use crate::term::{Op, Term};

/// Operation names of a group signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupOps {
    pub mul: Op,
    pub inv: Op,
    pub unit: Op,
}

/// A letter `x_i` or its inverse.
pub type Letter = (usize, bool);

fn push(word: &mut Vec<Letter>, l: Letter) {
    if word.last() == Some(&(l.0, !l.1)) {
        word.pop();
    } else {
        word.push(l);
    }
}

impl GroupOps {
    pub fn standard() -> Self {
        GroupOps { mul: "mul".into(), inv: "inv".into(), unit: "e".into() }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Self {
        GroupOps { mul: f(&self.mul).into(), inv: f(&self.inv).into(), unit: f(&self.unit).into() }
    }

    /// Freely reduced word of `t`; `true` marks an inverted letter.
    pub fn word(&self, t: &Term) -> Result<Vec<Letter>> {
        match t {
            Term::Var(i) => Ok(vec![(*i, false)]),
            Term::App(op, args) => match args.as_slice() {
                [] if *op == self.unit => Ok(Vec::new()),
                [a] if *op == self.inv => Ok(self.word(a)?.into_iter().rev().map(|(v, s)| (v, !s)).collect()),
                [a, b] if *op == self.mul => {
                    let mut w = self.word(a)?;
                    for l in self.word(b)? {
                        push(&mut w, l);
                    }
                    Ok(w)
                }
                _ => Err(Error::UnknownOp(op.to_string())),
            },
        }
    }

    pub fn term_of(&self, word: &[Letter]) -> Term {
        let atoms = word
            .iter()
            .map(|&(v, inv)| if inv { Term::app(&self.inv, vec![Term::Var(v)]) } else { Term::Var(v) })
            .collect();
        Term::fold_right(&self.mul, atoms, Term::constant(&self.unit))
    }

    pub fn normalize(&self, t: &Term) -> Result<Term> {
        Ok(self.term_of(&self.word(t)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_term;

    fn nf(s: &str) -> String {
        GroupOps::standard().normalize(&parse_term(s).unwrap()).unwrap().to_string()
    }

    #[test]
    fn reduced_words() {
        assert_eq!(nf("mul(x1,inv(x1))"), "e");
        assert_eq!(nf("inv(mul(x1,x2))"), "mul(inv(x2),inv(x1))");
        assert_eq!(nf("mul(mul(x1,x2),x3)"), "mul(x1,mul(x2,x3))");
        assert_eq!(nf("inv(inv(x2))"), "x2");
        assert_eq!(nf("mul(e,mul(x1,e))"), "x1");
        assert_ne!(nf("mul(x1,x2)"), nf("mul(x2,x1)"));
    }
}
