//! Signatures, terms over positional variables, equations and presentations.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Operation symbol. Cheap to clone and compared by name.
pub type Op = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpDecl {
    pub name: String,
    pub arity: usize,
}

/// Named operations with arities; names are unique.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    ops: Vec<OpDecl>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ops<'a>(ops: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self> {
        let mut sig = Signature::new();
        for (name, arity) in ops {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<()> {
        if self.index.contains_key(name) {
            return Err(Error::DuplicateOp(name.to_string()));
        }
        if !is_op_name(name) {
            return Err(Error::InvalidName(name.to_string()));
        }
        self.index.insert(name.to_string(), self.ops.len());
        self.ops.push(OpDecl { name: name.to_string(), arity });
        Ok(())
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index.get(name).map(|&i| self.ops[i].arity)
    }

    /// Declaration position; used as the default precedence.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = &OpDecl> {
        self.ops.iter().filter(|o| o.arity == 0)
    }

    /// Returns a copy with every operation renamed by `f`.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> Result<Signature> {
        let mut sig = Signature::new();
        for o in &self.ops {
            sig.add(&f(&o.name), o.arity)?;
        }
        Ok(sig)
    }
}

/// Operation names: identifiers or digit strings, but never of the variable shape `x<digits>`.
pub fn is_op_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') && !is_var_name(s)
}

pub(crate) fn is_var_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('x') && s[1..].chars().all(|c| c.is_ascii_digit())
}

/// A term: a positional variable `x_i` (1-based) or an operation applied to arguments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(Op, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        debug_assert!(i >= 1);
        Term::Var(i)
    }

    pub fn app(op: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::from(op), args)
    }

    pub fn constant(op: &str) -> Term {
        Term::App(Arc::from(op), Vec::new())
    }

    /// The variables `x_1..x_n`.
    pub fn vars(n: usize) -> Vec<Term> {
        (1..=n).map(Term::Var).collect()
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Nesting depth. Variables have depth 0 and constants depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Largest variable index, 0 for closed terms.
    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::App(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    pub fn var_set(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, v: usize) -> bool {
        match self {
            Term::Var(i) => *i == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Replaces `x_i` by `env[i-1]`; fails if a variable has no entry.
    pub fn substitute(&self, env: &[Term]) -> Result<Term> {
        match self {
            Term::Var(i) => env.get(i - 1).cloned().ok_or(Error::VarOutOfRange { var: *i, context: env.len() }),
            Term::App(op, args) => {
                Ok(Term::App(op.clone(), args.iter().map(|a| a.substitute(env)).collect::<Result<_>>()?))
            }
        }
    }

    /// Renames variables through `f`.
    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Var(i) => Term::Var(f(*i)),
            Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn shift_vars(&self, by: usize) -> Term {
        self.map_vars(&|i| i + by)
    }

    /// Replaces each operation by a term in the operation's argument variables.
    pub fn translate(&self, assignment: &impl Fn(&str) -> Option<Term>) -> Result<Term> {
        match self {
            Term::Var(i) => Ok(Term::Var(*i)),
            Term::App(op, args) => {
                let image = assignment(op).ok_or_else(|| Error::UnknownOp(op.to_string()))?;
                let args = args.iter().map(|a| a.translate(assignment)).collect::<Result<Vec<_>>>()?;
                image.substitute(&args)
            }
        }
    }

    pub fn rename_ops(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Var(i) => Term::Var(*i),
            Term::App(op, args) => Term::App(Arc::from(f(op).as_str()), args.iter().map(|a| a.rename_ops(f)).collect()),
        }
    }

    /// Checks arities against `sig` and variable indices against `context`.
    pub fn check(&self, sig: &Signature, context: usize) -> Result<()> {
        match self {
            Term::Var(i) => {
                if *i == 0 || *i > context {
                    Err(Error::VarOutOfRange { var: *i, context })
                } else {
                    Ok(())
                }
            }
            Term::App(op, args) => {
                let arity = sig.arity(op).ok_or_else(|| Error::UnknownOp(op.to_string()))?;
                if arity != args.len() {
                    return Err(Error::ArityMismatch { op: op.to_string(), expected: arity, found: args.len() });
                }
                args.iter().try_for_each(|a| a.check(sig, context))
            }
        }
    }

    /// Subterm at a position (sequence of 0-based argument indices).
    pub fn at(&self, pos: &[usize]) -> Option<&Term> {
        match pos.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Term::App(_, args) => args.get(i)?.at(rest),
                Term::Var(_) => None,
            },
        }
    }

    pub fn replace_at(&self, pos: &[usize], with: Term) -> Term {
        match pos.split_first() {
            None => with,
            Some((&i, rest)) => match self {
                Term::App(op, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, with);
                    Term::App(op.clone(), args)
                }
                Term::Var(_) => self.clone(),
            },
        }
    }

    /// Positions of non-variable subterms, pre-order.
    pub fn app_positions(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        fn go(t: &Term, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if let Term::App(_, args) = t {
                out.push(cur.clone());
                for (i, a) in args.iter().enumerate() {
                    cur.push(i);
                    go(a, cur, out);
                    cur.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Right-nested application of a binary operation; `empty` for no items.
    pub fn fold_right(op: &str, items: Vec<Term>, empty: Term) -> Term {
        let mut iter = items.into_iter().rev();
        match iter.next() {
            None => empty,
            Some(last) => iter.fold(last, |acc, t| Term::app(op, vec![t, acc])),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(op, args) if args.is_empty() => write!(f, "{op}"),
            Term::App(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `left = right` over variables `x_1..x_context`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Equation {
    pub left: Term,
    pub right: Term,
    pub context: usize,
}

impl Equation {
    pub fn new(left: Term, right: Term, context: usize) -> Self {
        Equation { left, right, context }
    }

    /// Equation whose context is the largest variable used.
    pub fn tight(left: Term, right: Term) -> Self {
        let context = left.max_var().max(right.max_var());
        Equation { left, right, context }
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        self.left.check(sig, self.context)?;
        self.right.check(sig, self.context)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} = {}", self.context, self.left, self.right)
    }
}

/// A finite presentation of an equational theory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub name: String,
    pub signature: Signature,
    pub equations: Vec<Equation>,
}

impl Presentation {
    pub fn new(name: &str, signature: Signature, equations: Vec<Equation>) -> Result<Self> {
        for eq in &equations {
            eq.check(&signature)?;
        }
        Ok(Presentation { name: name.to_string(), signature, equations })
    }

    pub fn renamed(&self, name: &str, f: impl Fn(&str) -> String) -> Result<Presentation> {
        let signature = self.signature.renamed(&f)?;
        let equations = self
            .equations
            .iter()
            .map(|e| Equation::new(e.left.rename_ops(&f), e.right.rename_ops(&f), e.context))
            .collect();
        Presentation::new(name, signature, equations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and(a: Term, b: Term) -> Term {
        Term::app("and", vec![a, b])
    }
    fn not(a: Term) -> Term {
        Term::app("not", vec![a])
    }
    fn x(i: usize) -> Term {
        Term::var(i)
    }

    #[test]
    fn substitution_examples() {
        let t = and(x(1), x(2));
        assert_eq!(x(1).substitute(std::slice::from_ref(&t)).unwrap(), t);
        assert_eq!(t.substitute(&[x(2), x(1)]).unwrap(), and(x(2), x(1)));
        assert_eq!(not(x(1)).substitute(std::slice::from_ref(&t)).unwrap(), not(t));
    }

    #[test]
    fn substitution_out_of_range() {
        let err = and(x(1), x(3)).substitute(&[x(1), x(2)]).unwrap_err();
        assert!(matches!(err, Error::VarOutOfRange { var: 3, .. }));
    }

    #[test]
    fn size_and_depth() {
        assert_eq!((x(1).size(), x(1).depth()), (1, 0));
        let t = and(x(1), not(x(2)));
        assert_eq!((t.size(), t.depth()), (4, 2));
        let c = Term::constant("0");
        assert_eq!((c.size(), c.depth()), (1, 1));
    }

    #[test]
    fn duplicate_op_rejected() {
        let mut sig = Signature::new();
        sig.add("f", 1).unwrap();
        assert!(matches!(sig.add("f", 2), Err(Error::DuplicateOp(_))));
        assert!(matches!(sig.add("x3", 0), Err(Error::InvalidName(_))));
    }

    #[test]
    fn arity_checked() {
        let sig = Signature::from_ops([("and", 2)]).unwrap();
        let bad = Term::app("and", vec![x(1)]);
        assert!(matches!(bad.check(&sig, 1), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn positions_and_replacement() {
        let t = and(x(1), not(x(2)));
        assert_eq!(t.app_positions(), vec![vec![], vec![1]]);
        assert_eq!(t.at(&[1, 0]), Some(&x(2)));
        assert_eq!(t.replace_at(&[1], x(3)), and(x(1), x(3)));
    }

    #[test]
    fn fold_right_nests_to_the_right() {
        let t = Term::fold_right("and", vec![x(1), x(2), x(3)], Term::constant("1"));
        assert_eq!(t.to_string(), "and(x1,and(x2,x3))");
        assert_eq!(Term::fold_right("and", vec![], Term::constant("1")).to_string(), "1");
    }
}
