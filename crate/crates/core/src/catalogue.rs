//! Built-in theories with their decision procedures.

use std::path::Path;

use crate::backend::{Backend, BooleOps, GSetOps, GroupOps, LinearOps, RingOps};
use crate::dsl::{parse_presentation, parse_term};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::rewrite::{CompletionBounds, RewriteRule, RewriteSystem, DEFAULT_STEP_BUDGET};
use crate::term::{Equation, Presentation, Signature, Term};
use crate::theory::{Family, Theory};

pub const BOOLE_SOURCE: &str = "theory Boole;
op 0/0; op 1/0; op and/2; op or/2; op not/1;
eq 2: and(x1,x2) = and(x2,x1);
eq 2: or(x1,x2) = or(x2,x1);
eq 3: and(x1,and(x2,x3)) = and(and(x1,x2),x3);
eq 3: or(x1,or(x2,x3)) = or(or(x1,x2),x3);
eq 1: and(x1,1) = x1;
eq 1: or(x1,0) = x1;
eq 3: and(x1,or(x2,x3)) = or(and(x1,x2),and(x1,x3));
eq 3: or(x1,and(x2,x3)) = and(or(x1,x2),or(x1,x3));
eq 1: and(x1,not(x1)) = 0;
eq 1: or(x1,not(x1)) = 1;
end";

pub const GROUPS_SOURCE: &str = "theory Groups;
op e/0; op mul/2; op inv/1;
eq 3: mul(mul(x1,x2),x3) = mul(x1,mul(x2,x3));
eq 1: mul(e,x1) = x1;
eq 1: mul(x1,e) = x1;
eq 1: mul(inv(x1),x1) = e;
eq 1: mul(x1,inv(x1)) = e;
end";

pub const AB_SOURCE: &str = "theory Ab;
op zero/0; op add/2; op neg/1;
eq 3: add(add(x1,x2),x3) = add(x1,add(x2,x3));
eq 2: add(x1,x2) = add(x2,x1);
eq 1: add(x1,zero) = x1;
eq 1: add(x1,neg(x1)) = zero;
end";

pub const RINGS_SOURCE: &str = "theory Rings;
op zero/0; op one/0; op add/2; op neg/1; op mul/2;
eq 3: add(add(x1,x2),x3) = add(x1,add(x2,x3));
eq 2: add(x1,x2) = add(x2,x1);
eq 1: add(x1,zero) = x1;
eq 1: add(x1,neg(x1)) = zero;
eq 3: mul(mul(x1,x2),x3) = mul(x1,mul(x2,x3));
eq 1: mul(one,x1) = x1;
eq 1: mul(x1,one) = x1;
eq 3: mul(x1,add(x2,x3)) = add(mul(x1,x2),mul(x1,x3));
eq 3: mul(add(x1,x2),x3) = add(mul(x1,x3),mul(x2,x3));
end";

fn builtin(src: &str) -> Presentation {
    parse_presentation(src).expect("built-in presentation parses")
}

/// The theory `E` of sets: no operations, no equations.
pub fn sets_theory() -> Theory {
    let p = Presentation::new("E", Signature::new(), Vec::new()).expect("empty presentation");
    Theory::new(p, Backend::Free { constants: Vec::new(), operations: false }, Family::Sets)
}

pub fn boole_theory() -> Theory {
    Theory::new(builtin(BOOLE_SOURCE), Backend::TruthTable(BooleOps::standard()), Family::Boole)
}

pub fn groups_theory() -> Theory {
    Theory::new(builtin(GROUPS_SOURCE), Backend::ReducedWord(GroupOps::standard()), Family::Groups)
}

pub fn ab_theory() -> Theory {
    Theory::new(builtin(AB_SOURCE), Backend::Linear(LinearOps::standard(None)), Family::Ab)
}

/// Unital rings, decided in the free ring.
pub fn rings_theory() -> Theory {
    Theory::new(builtin(RINGS_SOURCE), Backend::FreeRing(RingOps::standard()), Family::Rings)
}

/// Modules over `Z/k`: abelian groups with `k·x = 0`.
pub fn modr_theory(k: u64) -> Result<Theory> {
    if k == 0 {
        return Err(Error::Invalid("Mod:k needs k ≥ 1".into()));
    }
    let mut p = builtin(AB_SOURCE);
    p.name = format!("Mod{k}");
    let copies = vec![Term::Var(1); k as usize];
    p.equations.push(Equation::new(Term::fold_right("add", copies, Term::constant("zero")), Term::constant("zero"), 1));
    Ok(Theory::new(p, Backend::Linear(LinearOps::standard(Some(k))), Family::Mod(k)))
}

/// Cantor algebras of arity `a`: `mu` of arity `a` inverse to `(nu_1, …, nu_a)`.
pub fn cantor_presentation(a: usize) -> Result<Presentation> {
    if a < 2 {
        return Err(Error::Invalid(format!("Cantor arity must be at least 2, got {a}")));
    }
    let mut sig = Signature::new();
    sig.add("mu", a)?;
    for i in 1..=a {
        sig.add(&format!("nu{i}"), 1)?;
    }
    let mu = Term::app("mu", Term::vars(a));
    let mut eqs: Vec<Equation> =
        (1..=a).map(|i| Equation::new(Term::app(&format!("nu{i}"), vec![mu.clone()]), Term::Var(i), a)).collect();
    let split = (1..=a).map(|i| Term::app(&format!("nu{i}"), vec![Term::Var(1)])).collect();
    eqs.push(Equation::new(Term::app("mu", split), Term::Var(1), 1));
    Presentation::new(&format!("Cantor{a}"), sig, eqs)
}

/// The defining equations oriented left to right form a complete system.
pub fn cantor_theory(a: usize) -> Result<Theory> {
    let p = cantor_presentation(a)?;
    let rules =
        p.equations.iter().map(|e| RewriteRule::new(e.left.clone(), e.right.clone())).collect::<Result<Vec<_>>>()?;
    Ok(Theory::new(p, Backend::Trs(RewriteSystem::new(rules)), Family::Cantor(a)))
}

/// Sets with a left action of `G`: one unary operation `g<h>` per non-identity element.
pub fn gsets_presentation(group: &FiniteGroup) -> Result<Presentation> {
    let ops = GSetOps::standard(group);
    let mut sig = Signature::new();
    for (op, _) in &ops.ops {
        sig.add(op, 1)?;
    }
    let mut eqs = Vec::new();
    for (oa, a) in &ops.ops {
        for (ob, b) in &ops.ops {
            let left = Term::App(oa.clone(), vec![Term::App(ob.clone(), vec![Term::Var(1)])]);
            eqs.push(Equation::new(left, ops.act_on_var(group.mul(*a, *b), 1), 1));
        }
    }
    Presentation::new(&format!("GSets_{}", group.name), sig, eqs)
}

pub fn gsets_theory(group: &FiniteGroup) -> Result<Theory> {
    let p = gsets_presentation(group)?;
    Ok(Theory::new(p, Backend::GSet(GSetOps::standard(group)), Family::GSets(group.clone())))
}

/// The standard complete rewriting system for groups.
pub fn groups_trs() -> RewriteSystem {
    let rules = [
        ("mul(e,x1)", "x1"),
        ("mul(x1,e)", "x1"),
        ("mul(inv(x1),x1)", "e"),
        ("mul(x1,inv(x1))", "e"),
        ("mul(mul(x1,x2),x3)", "mul(x1,mul(x2,x3))"),
        ("inv(e)", "e"),
        ("inv(inv(x1))", "x1"),
        ("mul(inv(x1),mul(x1,x2))", "x2"),
        ("mul(x1,mul(inv(x1),x2))", "x2"),
        ("inv(mul(x1,x2))", "mul(inv(x2),inv(x1))"),
    ];
    let rules =
        rules.iter().map(|(l, r)| RewriteRule::new(parse_term(l).unwrap(), parse_term(r).unwrap()).unwrap()).collect();
    RewriteSystem::with_budget(rules, DEFAULT_STEP_BUDGET)
}

/// Parses a group descriptor: `C<n>`, `S3`, products `AxB`, or a JSON table file.
pub fn parse_group(spec: &str) -> Result<FiniteGroup> {
    if Path::new(spec).is_file() {
        let src = std::fs::read_to_string(spec).map_err(|e| Error::Invalid(format!("{spec}: {e}")))?;
        return FiniteGroup::from_json(&src);
    }
    let factors: Vec<&str> = spec.split('x').collect();
    let mut acc: Option<FiniteGroup> = None;
    for f in factors {
        let g = if f == "S3" {
            FiniteGroup::symmetric3()
        } else if let Some(n) = f.strip_prefix('C').and_then(|n| n.parse::<usize>().ok()) {
            if n == 0 {
                return Err(Error::InvalidGroup("C0 is not a group".into()));
            }
            FiniteGroup::cyclic(n)
        } else {
            return Err(Error::InvalidGroup(format!("unknown group `{spec}`")));
        };
        acc = Some(match acc {
            None => g,
            Some(prev) => FiniteGroup::product(&prev, &g),
        });
    }
    acc.ok_or_else(|| Error::InvalidGroup(format!("unknown group `{spec}`")))
}

/// Resolves a catalogue name (`E`, `Boole`, `Cantor:a`, `Groups`, `Ab`,
/// `Mod:k`, `Rings`, `GSets:<group>`) or a path to a `.thy` presentation.
pub fn resolve(name: &str, bounds: CompletionBounds) -> Result<Theory> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let number = |a: Option<&str>| -> Result<u64> {
        a.and_then(|s| s.parse().ok()).ok_or_else(|| Error::Invalid(format!("`{name}` needs a numeric parameter")))
    };
    match (head, arg) {
        ("E" | "Sets", None) => Ok(sets_theory()),
        ("Boole", None) => Ok(boole_theory()),
        ("Groups", None) => Ok(groups_theory()),
        ("Ab", None) => Ok(ab_theory()),
        ("Rings", None) => Ok(rings_theory()),
        ("Cantor", a) => cantor_theory(number(a)? as usize),
        ("Mod", a) => modr_theory(number(a)?),
        ("GSets", Some(g)) => gsets_theory(&parse_group(g)?),
        _ if name.ends_with(".thy") => {
            let src = std::fs::read_to_string(name).map_err(|e| Error::Invalid(format!("{name}: {e}")))?;
            Ok(Theory::from_presentation(parse_presentation(&src)?, bounds))
        }
        _ => Err(Error::Invalid(format!("unknown theory `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{check_local_confluence, complete, Kbo};

    #[test]
    fn presentations_have_expected_shape() {
        let b = boole_theory();
        assert_eq!(b.signature().len(), 5);
        assert_eq!(b.presentation().equations.len(), 10);
        let c = cantor_presentation(3).unwrap();
        assert_eq!(c.signature.len(), 4);
        assert_eq!(c.equations.len(), 4);
        let g = gsets_presentation(&FiniteGroup::cyclic(3)).unwrap();
        assert_eq!(g.equations.len(), 4);
    }

    #[test]
    fn backends_prove_their_axioms() {
        let theories = vec![
            sets_theory(),
            boole_theory(),
            groups_theory(),
            ab_theory(),
            rings_theory(),
            modr_theory(3).unwrap(),
            cantor_theory(2).unwrap(),
            cantor_theory(4).unwrap(),
            gsets_theory(&FiniteGroup::symmetric3()).unwrap(),
        ];
        for t in theories {
            for eq in &t.presentation().equations {
                assert!(t.proves(eq).unwrap(), "{} fails {eq}", t.name());
            }
            assert!(!t.is_degenerate().unwrap());
        }
    }

    #[test]
    fn cantor_system_is_the_completion() {
        for a in 2..=4 {
            let p = cantor_presentation(a).unwrap();
            let report = complete(&p, &Kbo::for_signature(&p.signature), CompletionBounds::default());
            assert!(report.is_complete());
            assert_eq!(report.rules.len(), a + 1);
        }
    }

    #[test]
    fn group_system_is_confluent_and_agrees_with_reduced_words() {
        let trs = groups_trs();
        assert!(check_local_confluence(&trs).unwrap().locally_confluent());
        let g = groups_theory();
        for s in ["inv(mul(x1,inv(x2)))", "mul(mul(x1,inv(x1)),mul(x2,e))", "inv(inv(mul(e,x3)))"] {
            let t = parse_term(s).unwrap();
            let via_trs = trs.normalize(&t).unwrap();
            assert_eq!(g.normalize(&via_trs, 3).unwrap(), g.normalize(&t, 3).unwrap());
        }
    }

    #[test]
    fn resolve_names() {
        let b = CompletionBounds::default();
        assert_eq!(resolve("Cantor:3", b).unwrap().name(), "Cantor3");
        assert_eq!(resolve("GSets:C2xC3", b).unwrap().signature().len(), 5);
        assert!(resolve("Cantor:1", b).is_err());
        assert!(resolve("Nope", b).is_err());
    }
}
