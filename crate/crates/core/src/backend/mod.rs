//! Decision procedures for equality in free models.

pub mod boole;
pub mod gset;
pub mod leavitt;
pub mod linear;
pub mod ring;
pub mod words;

use crate::error::{Error, Result};
use crate::rewrite::RewriteSystem;
use crate::term::{Op, Term};

pub use boole::BooleOps;
pub use gset::GSetOps;
pub use leavitt::{leavitt_normalize, LeavittOps};
pub use linear::LinearOps;
pub use ring::RingOps;
pub use words::GroupOps;

/// A word-problem backend. `normalize` returns a canonical representative,
/// so two terms are equal in the free model iff their normal forms coincide.
#[derive(Clone, Debug)]
pub enum Backend {
    /// No equations: every term is its own normal form.
    Free {
        constants: Vec<Op>,
        operations: bool,
    },
    Trs(RewriteSystem),
    TruthTable(BooleOps),
    ReducedWord(GroupOps),
    Linear(LinearOps),
    GSet(GSetOps),
    /// A theory `T` with a commuting group action: the free model on `n`
    /// generators is the free `T`-model on `n·|G|` generators, permuted by `G`.
    Action {
        inner: Box<Backend>,
        action: GSetOps,
    },
    Leavitt(LeavittOps),
    FreeRing(RingOps),
    /// Every term equals the given constant.
    Trivial {
        zero: Op,
    },
    Undecided(String),
}

impl Backend {
    pub fn kind(&self) -> &'static str {
        match self {
            Backend::Free { .. } => "free",
            Backend::Trs(_) => "rewriting",
            Backend::TruthTable(_) => "truth-table",
            Backend::ReducedWord(_) => "reduced-word",
            Backend::Linear(_) => "linear",
            Backend::GSet(_) => "gset-tuple",
            Backend::Action { .. } => "group-action",
            Backend::Leavitt(_) => "leavitt",
            Backend::FreeRing(_) => "free-ring",
            Backend::Trivial { .. } => "trivial",
            Backend::Undecided(_) => "undecided",
        }
    }

    pub fn is_decided(&self) -> bool {
        match self {
            Backend::Undecided(_) => false,
            Backend::Action { inner, .. } => inner.is_decided(),
            _ => true,
        }
    }

    /// Canonical form of a well-formed term over context `n`.
    pub fn normalize(&self, t: &Term, n: usize) -> Result<Term> {
        match self {
            Backend::Free { .. } => Ok(t.clone()),
            Backend::Trs(trs) => trs.normalize(t),
            Backend::TruthTable(ops) => ops.normalize(t),
            Backend::ReducedWord(ops) => ops.normalize(t),
            Backend::Linear(ops) => ops.normalize(t),
            Backend::GSet(ops) => ops.normalize(t),
            Backend::Action { inner, action } => {
                let g = action.group.order();
                let lifted = lift(t, action.group.identity(), action)?;
                let nf = inner.normalize(&lifted, n * g)?;
                Ok(lower(&nf, action))
            }
            Backend::Leavitt(ops) => ops.normalize(t, n),
            Backend::FreeRing(ops) => ops.normalize(t),
            Backend::Trivial { zero } => Ok(Term::App(zero.clone(), Vec::new())),
            Backend::Undecided(msg) => Err(Error::Undecidable(msg.clone())),
        }
    }

    /// All elements of the free model on `n` generators when it is finite,
    /// `None` when it is infinite. Fails past `cap` elements.
    pub fn elements(&self, n: usize, cap: usize) -> Result<Option<Vec<Term>>> {
        let check = |count: Option<u128>| -> Result<()> {
            match count {
                Some(c) if c <= cap as u128 => Ok(()),
                _ => Err(Error::CapExceeded(cap)),
            }
        };
        let out = match self {
            Backend::Free { constants, operations } => {
                if *operations && (n > 0 || !constants.is_empty()) {
                    return Ok(None);
                }
                let all: Vec<Term> = Term::vars(n)
                    .into_iter()
                    .chain(constants.iter().map(|c| Term::App(c.clone(), Vec::new())))
                    .collect();
                check(Some(all.len() as u128))?;
                all
            }
            Backend::TruthTable(ops) => {
                let count = if n < 7 { 1u128.checked_shl(1 << n) } else { None };
                check(count)?;
                ops.elements(n)
            }
            Backend::Linear(ops) if n == 0 => vec![ops.term_of(&Default::default())],
            Backend::Linear(ops) => match ops.modulus {
                Some(k) => {
                    check((k as u128).checked_pow(n as u32))?;
                    ops.elements(n).unwrap_or_default()
                }
                None => return Ok(None),
            },
            Backend::ReducedWord(ops) if n == 0 => vec![Term::constant(&ops.unit)],
            Backend::Leavitt(ops) if n == 0 => vec![Term::constant(&ops.zero)],
            Backend::GSet(ops) => {
                check(Some((n * ops.group.order()) as u128))?;
                ops.elements(n)
            }
            Backend::Action { inner, action } => match inner.elements(n * action.group.order(), cap)? {
                Some(els) => els.iter().map(|e| lower(e, action)).collect(),
                None => return Ok(None),
            },
            Backend::Trivial { zero } => vec![Term::App(zero.clone(), Vec::new())],
            Backend::Undecided(msg) => return Err(Error::Undecidable(msg.clone())),
            Backend::Trs(_) | Backend::ReducedWord(_) | Backend::Leavitt(_) | Backend::FreeRing(_) => return Ok(None),
        };
        Ok(Some(out))
    }

    /// The same backend over renamed operations.
    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Backend {
        match self {
            Backend::Free { constants, operations } => {
                Backend::Free { constants: constants.iter().map(|c| Op::from(f(c))).collect(), operations: *operations }
            }
            Backend::Trs(trs) => Backend::Trs(trs.rename_ops(&|s: &str| f(s))),
            Backend::TruthTable(ops) => Backend::TruthTable(ops.rename(f)),
            Backend::ReducedWord(ops) => Backend::ReducedWord(ops.rename(f)),
            Backend::Linear(ops) => Backend::Linear(ops.rename(f)),
            Backend::GSet(ops) => Backend::GSet(ops.rename(f)),
            Backend::Action { inner, action } => {
                Backend::Action { inner: Box::new(inner.rename(f)), action: action.rename(f) }
            }
            Backend::Leavitt(ops) => Backend::Leavitt(ops.rename(f)),
            Backend::FreeRing(ops) => Backend::FreeRing(ops.rename(f)),
            Backend::Trivial { zero } => Backend::Trivial { zero: f(zero).into() },
            Backend::Undecided(msg) => Backend::Undecided(msg.clone()),
        }
    }
}

/// `h · t` as a term of the inner theory, where inner variable
/// `(j - 1)·|G| + g + 1` stands for `g · x_j`.
fn lift(t: &Term, h: usize, action: &GSetOps) -> Result<Term> {
    let order = action.group.order();
    match t {
        Term::Var(j) => Ok(Term::Var((j - 1) * order + h + 1)),
        Term::App(op, args) => match action.element_of(op) {
            Some(a) => match args.as_slice() {
                [s] => lift(s, action.group.mul(h, a), action),
                _ => Err(Error::UnknownOp(op.to_string())),
            },
            None => Ok(Term::App(op.clone(), args.iter().map(|s| lift(s, h, action)).collect::<Result<_>>()?)),
        },
    }
}

fn lower(t: &Term, action: &GSetOps) -> Term {
    let order = action.group.order();
    match t {
        Term::Var(v) => action.act_on_var((v - 1) % order, (v - 1) / order + 1),
        Term::App(op, args) => Term::App(op.clone(), args.iter().map(|s| lower(s, action)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_term;
    use crate::group::FiniteGroup;

    #[test]
    fn action_extension_over_truth_tables() {
        let b = Backend::Action {
            inner: Box::new(Backend::TruthTable(BooleOps::standard())),
            action: GSetOps::standard(&FiniteGroup::cyclic(2)),
        };
        let nf = |s: &str| b.normalize(&parse_term(s).unwrap(), 2).unwrap();
        assert_eq!(nf("g1(and(x1,x2))"), nf("and(g1(x1),g1(x2))"));
        assert_eq!(nf("g1(g1(x1))"), Term::Var(1));
        assert_eq!(nf("g1(not(x1))").to_string(), "not(g1(x1))");
        assert_ne!(nf("g1(x1)"), nf("x1"));
        let els = b.elements(1, 100).unwrap().unwrap();
        assert_eq!(els.len(), 16);
    }

    #[test]
    fn product_of_actions() {
        let c2 = FiniteGroup::cyclic(2);
        let c3 = FiniteGroup::cyclic(3);
        let inner = Backend::GSet(GSetOps::standard(&c3).rename(&|s: &str| format!("r_{s}")));
        let b = Backend::Action {
            inner: Box::new(inner),
            action: GSetOps::standard(&c2).rename(&|s: &str| format!("l_{s}")),
        };
        let els = b.elements(1, 100).unwrap().unwrap();
        assert_eq!(els.len(), 6);
        let t = parse_term("l_g1(r_g1(l_g1(x1)))").unwrap();
        assert_eq!(b.normalize(&t, 1).unwrap().to_string(), "r_g1(x1)");
    }

    #[test]
    fn infinite_and_undecided() {
        let b = Backend::ReducedWord(GroupOps::standard());
        assert!(b.elements(1, 10).unwrap().is_none());
        assert_eq!(b.elements(0, 10).unwrap().unwrap().len(), 1);
        let u = Backend::Undecided("no procedure".into());
        assert!(u.normalize(&Term::Var(1), 1).is_err());
        let t = Backend::TruthTable(BooleOps::standard());
        assert!(matches!(t.elements(4, 1000), Err(Error::CapExceeded(1000))));
    }
}
