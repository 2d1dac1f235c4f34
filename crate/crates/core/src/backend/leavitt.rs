use crate::error::{Error, Result};
use crate::ncpoly::{NCPoly, Word};
use crate::term::{Op, Term};

/// Generator index of `R_i` (1-based `i`).
pub fn r_gen(i: usize) -> u16 {
    (i - 1) as u16
}

/// Generator index of `C_i` (1-based `i`) in the Leavitt algebra of type `a`.
pub fn c_gen(a: usize, i: usize) -> u16 {
    (a + i - 1) as u16
}

pub fn leavitt_names(a: usize) -> Vec<String> {
    (1..=a).map(|i| format!("R{i}")).chain((1..=a).map(|i| format!("C{i}"))).collect()
}

enum Redex {
    /// `C_i R_j` at this position; `true` when `i == j`.
    Dual(usize, bool),
    /// `R_a C_a` at this position.
    Sum(usize),
}

fn first_redex(a: usize, w: &[u16]) -> Option<Redex> {
    let a16 = a as u16;
    w.windows(2).enumerate().find_map(|(k, pair)| {
        let (x, y) = (pair[0], pair[1]);
        if x >= a16 && y < a16 {
            Some(Redex::Dual(k, x - a16 == y))
        } else if x == a16 - 1 && y == 2 * a16 - 1 {
            Some(Redex::Sum(k))
        } else {
            None
        }
    })
}

/// Normal form in the Leavitt algebra `L_a` under `C_i R_j -> δ_ij` and
/// `R_a C_a -> 1 - Σ_{i<a} R_i C_i`.
pub fn leavitt_normalize(a: usize, p: &NCPoly) -> NCPoly {
    let mut out = NCPoly::zero();
    let mut stack: Vec<(Word, i64)> = p.terms().map(|(w, c)| (w.clone(), c)).collect();
    while let Some((w, c)) = stack.pop() {
        match first_redex(a, &w) {
            None => out.add_term(w, c),
            Some(Redex::Dual(k, same)) => {
                if same {
                    let mut v = w[..k].to_vec();
                    v.extend_from_slice(&w[k + 2..]);
                    stack.push((v, c));
                }
            }
            Some(Redex::Sum(k)) => {
                let mut v = w[..k].to_vec();
                v.extend_from_slice(&w[k + 2..]);
                stack.push((v, c));
                for i in 1..a {
                    let mut v = w[..k].to_vec();
                    v.push(r_gen(i));
                    v.push(c_gen(a, i));
                    v.extend_from_slice(&w[k + 2..]);
                    stack.push((v, -c));
                }
            }
        }
    }
    out
}

/// Linear operations plus the Cantor operations `mu` (arity `a`) and `nu_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeavittOps {
    pub a: usize,
    pub add: Op,
    pub neg: Op,
    pub zero: Op,
    pub mu: Op,
    pub nu: Vec<Op>,
}

impl LeavittOps {
    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Self {
        LeavittOps {
            a: self.a,
            add: f(&self.add).into(),
            neg: f(&self.neg).into(),
            zero: f(&self.zero).into(),
            mu: f(&self.mu).into(),
            nu: self.nu.iter().map(|o| Op::from(f(o))).collect(),
        }
    }

    /// Coefficients `p_j` with `t = Σ p_j · x_j` in the free module on `n` generators.
    pub fn vector(&self, t: &Term, n: usize) -> Result<Vec<NCPoly>> {
        let v = self.eval(t, n)?;
        Ok(v.iter().map(|p| leavitt_normalize(self.a, p)).collect())
    }

    fn eval(&self, t: &Term, n: usize) -> Result<Vec<NCPoly>> {
        match t {
            Term::Var(j) => {
                let mut v = vec![NCPoly::zero(); n];
                v[j - 1] = NCPoly::one();
                Ok(v)
            }
            Term::App(op, args) => {
                let sub = args.iter().map(|s| self.eval(s, n)).collect::<Result<Vec<_>>>()?;
                if *op == self.zero && sub.is_empty() {
                    Ok(vec![NCPoly::zero(); n])
                } else if *op == self.add && sub.len() == 2 {
                    Ok(sub[0].iter().zip(&sub[1]).map(|(p, q)| p.add(q)).collect())
                } else if *op == self.neg && sub.len() == 1 {
                    Ok(sub[0].iter().map(NCPoly::neg).collect())
                } else if *op == self.mu && sub.len() == self.a {
                    let mut acc = vec![NCPoly::zero(); n];
                    for (i, v) in sub.iter().enumerate() {
                        let r = NCPoly::generator(r_gen(i + 1));
                        for (slot, p) in acc.iter_mut().zip(v) {
                            *slot = leavitt_normalize(self.a, &slot.add(&r.mul(p)));
                        }
                    }
                    Ok(acc)
                } else if let Some(i) = self.nu.iter().position(|o| o == op).filter(|_| sub.len() == 1) {
                    let c = NCPoly::generator(c_gen(self.a, i + 1));
                    Ok(sub[0].iter().map(|p| leavitt_normalize(self.a, &c.mul(p))).collect())
                } else {
                    Err(Error::UnknownOp(op.to_string()))
                }
            }
        }
    }

    /// Canonical term for `Σ p_j · x_j`: generator `C_i` acts as `nu_i` and
    /// `R_i` as `mu` with the argument in slot `i` and zeros elsewhere.
    pub fn term_of(&self, v: &[NCPoly]) -> Term {
        let mut items = Vec::new();
        for (j, p) in v.iter().enumerate() {
            let mut mons: Vec<(&Word, i64)> = p.terms().collect();
            mons.sort_by(|(u, _), (w, _)| u.len().cmp(&w.len()).then_with(|| u.cmp(w)));
            for (w, c) in mons {
                let mut cur = Term::Var(j + 1);
                for &g in w.iter().rev() {
                    let g = g as usize;
                    cur = if g < self.a {
                        let mut args = vec![Term::constant(&self.zero); self.a];
                        args[g] = cur;
                        Term::App(self.mu.clone(), args)
                    } else {
                        Term::App(self.nu[g - self.a].clone(), vec![cur])
                    };
                }
                if c < 0 {
                    cur = Term::App(self.neg.clone(), vec![cur]);
                }
                items.extend(std::iter::repeat_n(cur, c.unsigned_abs() as usize));
            }
        }
        Term::fold_right(&self.add, items, Term::constant(&self.zero))
    }

    pub fn normalize(&self, t: &Term, n: usize) -> Result<Term> {
        Ok(self.term_of(&self.vector(t, n)?))
    }
}
