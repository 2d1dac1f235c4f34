use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::term::{Op, Term};

/// Operation names of a G-set signature: one unary operation per
/// non-identity group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSetOps {
    pub group: FiniteGroup,
    /// `(operation, element)` in element order.
    pub ops: Vec<(Op, usize)>,
}

impl GSetOps {
    pub fn standard(group: &FiniteGroup) -> Self {
        let ops = group.non_identity().map(|g| (Op::from(format!("g{g}")), g)).collect();
        GSetOps { group: group.clone(), ops }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Self {
        GSetOps { group: self.group.clone(), ops: self.ops.iter().map(|(o, g)| (Op::from(f(o)), *g)).collect() }
    }

    pub fn element_of(&self, op: &str) -> Option<usize> {
        self.ops.iter().find(|(o, _)| &**o == op).map(|(_, g)| *g)
    }

    pub fn op_for(&self, g: usize) -> Option<&Op> {
        self.ops.iter().find(|(_, h)| *h == g).map(|(o, _)| o)
    }

    /// `g · x_j`, or `x_j` itself for the identity.
    pub fn act_on_var(&self, g: usize, j: usize) -> Term {
        match self.op_for(g) {
            Some(op) => Term::App(op.clone(), vec![Term::Var(j)]),
            None => Term::Var(j),
        }
    }

    /// The pair `(generator, group element)` denoted by `t`.
    pub fn orbit_point(&self, t: &Term) -> Result<(usize, usize)> {
        match t {
            Term::Var(j) => Ok((*j, self.group.identity())),
            Term::App(op, args) => match (self.element_of(op), args.as_slice()) {
                (Some(a), [s]) => {
                    let (j, h) = self.orbit_point(s)?;
                    Ok((j, self.group.mul(a, h)))
                }
                _ => Err(Error::UnknownOp(op.to_string())),
            },
        }
    }

    pub fn normalize(&self, t: &Term) -> Result<Term> {
        let (j, h) = self.orbit_point(t)?;
        Ok(self.act_on_var(h, j))
    }

    pub fn elements(&self, n: usize) -> Vec<Term> {
        (1..=n).flat_map(|j| (0..self.group.order()).map(move |h| (j, h))).map(|(j, h)| self.act_on_var(h, j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_term;

    #[test]
    fn cyclic_action() {
        let ops = GSetOps::standard(&FiniteGroup::cyclic(3));
        let nf = |s: &str| ops.normalize(&parse_term(s).unwrap()).unwrap().to_string();
        assert_eq!(nf("g1(g2(x1))"), "x1");
        assert_eq!(nf("g1(g1(x2))"), "g2(x2)");
        assert_eq!(ops.elements(2).len(), 6);
    }
}
