use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::term::{Signature, Term};

/// Knuth-Bendix order. Unlisted symbols weigh 1; precedence defaults to
/// declaration order (later declarations are larger) and falls back to names.
#[derive(Clone, Debug, Default)]
pub struct Kbo {
    weights: HashMap<String, usize>,
    precedence: HashMap<String, usize>,
}

impl Kbo {
    pub fn for_signature(sig: &Signature) -> Self {
        let precedence = sig.ops().iter().enumerate().map(|(i, o)| (o.name.clone(), i)).collect();
        Kbo { weights: HashMap::new(), precedence }
    }

    pub fn with_weight(mut self, op: &str, weight: usize) -> Self {
        self.weights.insert(op.to_string(), weight.max(1));
        self
    }

    fn weight(&self, t: &Term) -> usize {
        match t {
            Term::Var(_) => 1,
            Term::App(op, args) => {
                self.weights.get(&**op).copied().unwrap_or(1) + args.iter().map(|a| self.weight(a)).sum::<usize>()
            }
        }
    }

    fn compare_ops(&self, f: &str, g: &str) -> Ordering {
        match (self.precedence.get(f), self.precedence.get(g)) {
            (Some(a), Some(b)) if a != b => a.cmp(b),
            _ => f.cmp(g),
        }
    }

    fn var_counts(t: &Term, out: &mut BTreeMap<usize, usize>) {
        match t {
            Term::Var(i) => *out.entry(*i).or_default() += 1,
            Term::App(_, args) => args.iter().for_each(|a| Self::var_counts(a, out)),
        }
    }

    /// `s > t` in the order.
    pub fn greater(&self, s: &Term, t: &Term) -> bool {
        let mut vs = BTreeMap::new();
        let mut vt = BTreeMap::new();
        Self::var_counts(s, &mut vs);
        Self::var_counts(t, &mut vt);
        if vt.iter().any(|(v, n)| vs.get(v).copied().unwrap_or(0) < *n) {
            return false;
        }
        let (ws, wt) = (self.weight(s), self.weight(t));
        if ws != wt {
            return ws > wt;
        }
        match (s, t) {
            (Term::App(f, sargs), Term::App(g, targs)) => match self.compare_ops(f, g) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    for (a, b) in sargs.iter().zip(targs) {
                        if a != b {
                            return self.greater(a, b);
                        }
                    }
                    false
                }
            },
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orients_by_weight_and_precedence() {
        let sig = Signature::from_ops([("e", 0), ("mul", 2), ("inv", 1)]).unwrap();
        let kbo = Kbo::for_signature(&sig);
        let x = Term::var;
        let mul = |a, b| Term::app("mul", vec![a, b]);
        assert!(kbo.greater(&mul(Term::constant("e"), x(1)), &x(1)));
        // associativity: left-nested is larger by argument comparison
        let l = mul(mul(x(1), x(2)), x(3));
        let r = mul(x(1), mul(x(2), x(3)));
        assert!(kbo.greater(&l, &r));
        assert!(!kbo.greater(&r, &l));
        // commutativity cannot be oriented
        assert!(!kbo.greater(&mul(x(1), x(2)), &mul(x(2), x(1))));
        assert!(!kbo.greater(&mul(x(2), x(1)), &mul(x(1), x(2))));
    }
}
