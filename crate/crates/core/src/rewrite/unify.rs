use std::collections::HashMap;

use crate::term::Term;

/// Variable bindings produced by unification.
pub type Subst = HashMap<usize, Term>;

/// Matches `pattern` against `target`; returns an environment indexed by
/// pattern variable (unused slots hold the variable itself).
pub fn match_term(pattern: &Term, target: &Term) -> Option<Vec<Term>> {
    let n = pattern.max_var();
    let mut env: Vec<Option<Term>> = vec![None; n];
    if go(pattern, target, &mut env) {
        Some(env.into_iter().enumerate().map(|(i, t)| t.unwrap_or(Term::Var(i + 1))).collect())
    } else {
        None
    }
}

fn go(p: &Term, t: &Term, env: &mut [Option<Term>]) -> bool {
    match p {
        Term::Var(i) => match &env[i - 1] {
            Some(bound) => bound == t,
            None => {
                env[i - 1] = Some(t.clone());
                true
            }
        },
        Term::App(op, pargs) => match t {
            Term::App(op2, targs) if op == op2 && pargs.len() == targs.len() => {
                pargs.iter().zip(targs).all(|(a, b)| go(a, b, env))
            }
            _ => false,
        },
    }
}

fn resolve(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(i) => match s.get(i) {
            Some(b) => resolve(b, s),
            None => t.clone(),
        },
        Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| resolve(a, s)).collect()),
    }
}

fn occurs(v: usize, t: &Term, s: &Subst) -> bool {
    match t {
        Term::Var(i) => *i == v || s.get(i).is_some_and(|b| occurs(v, b, s)),
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, s)),
    }
}

/// Most general unifier, fully resolved.
pub fn unify(a: &Term, b: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = walk(&x, &s);
        let y = walk(&y, &s);
        match (&x, &y) {
            (Term::Var(i), Term::Var(j)) if i == j => {}
            (Term::Var(i), other) | (other, Term::Var(i)) => {
                if occurs(*i, other, &s) {
                    return None;
                }
                s.insert(*i, other.clone());
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
        }
    }
    let keys: Vec<usize> = s.keys().copied().collect();
    let resolved = keys.into_iter().map(|k| (k, resolve(&Term::Var(k), &s))).collect();
    Some(resolved)
}

fn walk(t: &Term, s: &Subst) -> Term {
    let mut cur = t.clone();
    while let Term::Var(i) = cur {
        match s.get(&i) {
            Some(b) => cur = b.clone(),
            None => break,
        }
    }
    cur
}

/// Applies a resolved substitution.
pub fn apply(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(i) => s.get(i).cloned().unwrap_or_else(|| t.clone()),
        Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| apply(a, s)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: Term, b: Term) -> Term {
        Term::app("f", vec![a, b])
    }
    fn g(a: Term) -> Term {
        Term::app("g", vec![a])
    }

    #[test]
    fn unifier_equalizes() {
        let a = f(Term::Var(1), g(Term::Var(2)));
        let b = f(g(Term::Var(3)), Term::Var(1));
        let s = unify(&a, &b).unwrap();
        assert_eq!(apply(&a, &s), apply(&b, &s));
    }

    #[test]
    fn occurs_check() {
        assert!(unify(&Term::Var(1), &g(Term::Var(1))).is_none());
    }

    #[test]
    fn matching_is_one_sided() {
        let p = f(Term::Var(1), Term::Var(1));
        assert!(match_term(&p, &f(g(Term::Var(2)), g(Term::Var(2)))).is_some());
        assert!(match_term(&p, &f(Term::Var(1), Term::Var(2))).is_none());
    }
}
