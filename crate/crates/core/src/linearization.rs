//! Linearization `Z ⊗ T`, trivial-ring detection, group rings and Leavitt algebras.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::backend::leavitt::{c_gen, leavitt_names, r_gen};
pub use crate::backend::leavitt_normalize;
use crate::catalogue::ab_theory;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::kronecker::{kronecker, KroneckerTheory};
use crate::ncpoly::NCPoly;
use crate::term::{Presentation, Term};
use crate::theory::{FMor, Family, Theory, TheoryMorphism};

/// `Z ⊗ T` together with the linearization `T → Z ⊗ T`.
#[derive(Clone, Debug)]
pub struct Linearization {
    pub kronecker: KroneckerTheory,
    pub morphism: TheoryMorphism,
}

pub fn linearize(t: &Theory) -> Result<Linearization> {
    let kronecker = kronecker(&ab_theory(), t)?;
    let morphism = kronecker.right_embedding.clone();
    Ok(Linearization { kronecker, morphism })
}

/// Why one term of a derivation equals the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepRule {
    /// An equation of the factor theory `T`.
    Theory,
    /// A ground instance of commutation equation `index`, rewritten at `position`.
    Commutation { index: usize, position: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub rule: StepRule,
    pub result: Term,
}

/// A chain `x1 = t_1 = … = zero` in the free `Z ⊗ T`-model on one generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub start: Term,
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    pub fn end(&self) -> &Term {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    /// Checks every step against the combined presentation and the factor
    /// theory `t`, whose operations carry the given name prefix.
    pub fn replay(&self, p: &Presentation, t: &Theory, prefix: &str) -> Result<bool> {
        let back: BTreeMap<String, String> =
            t.signature().ops().iter().map(|o| (format!("{prefix}{}", o.name), o.name.clone())).collect();
        let to_t = |s: &Term| -> Option<Term> {
            s.translate(&|op| {
                let name = back.get(op)?;
                Some(Term::app(name, Term::vars(t.signature().arity(name)?)))
            })
            .ok()
        };
        let mut current = self.start.clone();
        for step in &self.steps {
            let ok = match &step.rule {
                StepRule::Theory => match (to_t(&current), to_t(&step.result)) {
                    (Some(a), Some(b)) => {
                        let n = a.max_var().max(b.max_var());
                        t.equal(&a, &b, n)?
                    }
                    _ => false,
                },
                StepRule::Commutation { index, position } => match p.equations.get(*index) {
                    Some(eq) if eq.context == 0 => match current.at(position) {
                        Some(sub) if *sub == eq.left => current.replace_at(position, eq.right.clone()) == step.result,
                        Some(sub) if *sub == eq.right => current.replace_at(position, eq.left.clone()) == step.result,
                        _ => false,
                    },
                    _ => false,
                },
            };
            if !ok {
                return Ok(false);
            }
            current = step.result.clone();
        }
        Ok(true)
    }
}

/// Index of the ground equation `{a, b}` in `p`.
fn ground_equation(p: &Presentation, a: &Term, b: &Term) -> Option<usize> {
    p.equations
        .iter()
        .position(|e| e.context == 0 && ((e.left == *a && e.right == *b) || (e.left == *b && e.right == *a)))
}

struct Builder<'a> {
    p: &'a Presentation,
    steps: Vec<DerivationStep>,
    current: Term,
}

impl Builder<'_> {
    fn theory(&mut self, to: Term) {
        self.current = to.clone();
        self.steps.push(DerivationStep { rule: StepRule::Theory, result: to });
    }

    /// Rewrites the subterm at `pos` to `to` by a ground commutation equation.
    fn commute(&mut self, pos: Vec<usize>, to: Term) -> Option<()> {
        let from = self.current.at(&pos)?.clone();
        let index = ground_equation(self.p, &from, &to)?;
        self.current = self.current.replace_at(&pos, to);
        self.steps.push(DerivationStep {
            rule: StepRule::Commutation { index, position: pos },
            result: self.current.clone(),
        });
        Some(())
    }
}

/// Searches for `x1 = f(c..x1..c) = f(zero..x1..zero) = f(d..x1..d) = closed = zero`
/// in the presentation `p` of `Ab ⊗ T`, where `zero` is the abelian-group zero and
/// `rename` maps `T`'s operation names into `p`.
pub fn find_collapse(
    p: &Presentation,
    zero: &str,
    t: &Theory,
    rename: &dyn Fn(&str) -> String,
) -> Result<Option<Derivation>> {
    find_collapse_bounded(p, zero, t, rename, DEFAULT_TRIVIAL_BUDGET).map(|(d, _)| d)
}

pub const DEFAULT_TRIVIAL_BUDGET: usize = 1000;

fn find_collapse_bounded(
    p: &Presentation,
    zero: &str,
    t: &Theory,
    rename: &dyn Fn(&str) -> String,
    budget: usize,
) -> Result<(Option<Derivation>, usize)> {
    let zero_t = Term::constant(zero);
    let constants: Vec<String> = t.signature().constants().map(|c| c.name.clone()).collect();
    let mut checks = 0;
    for f in t.signature().ops().iter().filter(|o| o.arity > 0) {
        for pos in 0..f.arity {
            let with = |c: &str| {
                let args = (0..f.arity).map(|q| if q == pos { Term::Var(1) } else { Term::constant(c) }).collect();
                Term::app(&f.name, args)
            };
            for c in &constants {
                checks += 1;
                if checks > budget {
                    return Ok((None, checks));
                }
                let unit = with(c);
                if !t.equal(&unit, &Term::Var(1), 1).unwrap_or(false) {
                    continue;
                }
                for d in &constants {
                    checks += 1;
                    let absorbing = with(d);
                    let Ok(closed) = t.normalize(&absorbing, 1) else { continue };
                    if closed.max_var() > 0 {
                        continue;
                    }
                    let mut b = Builder { p, steps: Vec::new(), current: Term::Var(1) };
                    let chain = (|| {
                        b.theory(unit.rename_ops(&rename));
                        let others: Vec<usize> = (0..f.arity).filter(|&q| q != pos).collect();
                        if c != d {
                            for &q in &others {
                                b.commute(vec![q], zero_t.clone())?;
                            }
                            for &q in &others {
                                b.commute(vec![q], Term::constant(&rename(d)))?;
                            }
                        }
                        b.theory(closed.rename_ops(&rename));
                        collapse_closed(&mut b, &zero_t)
                    })();
                    if chain.is_some() {
                        return Ok((Some(Derivation { start: Term::Var(1), steps: b.steps }), checks));
                    }
                }
            }
        }
    }
    Ok((None, checks))
}

/// Rewrites a closed term to `zero`, innermost first: constants become `zero`,
/// then `g(zero, …, zero)` becomes `zero`.
fn collapse_closed(b: &mut Builder, zero: &Term) -> Option<()> {
    while b.current != *zero {
        let pos = b.current.app_positions().into_iter().rev().find(|q| match b.current.at(q) {
            Some(Term::App(_, args)) => args.iter().all(|a| a == zero) && b.current.at(q) != Some(zero),
            _ => false,
        })?;
        b.commute(pos, zero.clone())?;
    }
    Some(())
}

/// Outcome of [`detect_trivial_ring`].
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TrivialRingVerdict {
    Trivial { derivation: Derivation, checks: usize },
    NotShownTrivial { reason: String, checks: usize },
}

impl TrivialRingVerdict {
    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            TrivialRingVerdict::Trivial { derivation, .. } => Some(derivation),
            TrivialRingVerdict::NotShownTrivial { .. } => None,
        }
    }
}

/// Looks for a derivation of `x1 = zero` in the free `Z ⊗ T`-model on one generator.
pub fn detect_trivial_ring(t: &Theory, budget: usize) -> Result<(Linearization, TrivialRingVerdict)> {
    let lin = linearize(t)?;
    let kt = &lin.kronecker;
    let zero = kt.left_name("zero");
    let prefix = kt.prefixes.1.clone();
    let rename = move |s: &str| format!("{prefix}{s}");
    let (found, checks) = find_collapse_bounded(kt.combined.presentation(), &zero, t, &rename, budget)?;
    let verdict = match found {
        Some(derivation) => TrivialRingVerdict::Trivial { derivation, checks },
        None if checks > budget => {
            TrivialRingVerdict::NotShownTrivial { reason: format!("budget of {budget} checks exhausted"), checks }
        }
        None => TrivialRingVerdict::NotShownTrivial {
            reason: "no operation with a unit constant and an absorbing constant".into(),
            checks,
        },
    };
    Ok((lin, verdict))
}

/// A unital ring by generators and integer polynomial relations.
#[derive(Clone, Debug)]
pub struct RingPresentation {
    pub generators: Vec<String>,
    pub relations: Vec<(NCPoly, NCPoly)>,
    pub unital: bool,
}

impl RingPresentation {
    /// Relations rendered as `lhs = rhs`.
    pub fn render(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|(l, r)| format!("{} = {}", l.render(&self.generators), r.render(&self.generators)))
            .collect()
    }
}

/// `Z[G]`: one generator `t<g>` per non-identity element, relations from the multiplication table.
pub fn group_ring(g: &FiniteGroup) -> RingPresentation {
    let gens: Vec<usize> = g.non_identity().collect();
    let index: BTreeMap<usize, u16> = gens.iter().enumerate().map(|(i, &h)| (h, i as u16)).collect();
    let element = |h: usize| match index.get(&h) {
        Some(&i) => NCPoly::generator(i),
        None => NCPoly::one(),
    };
    let mut relations = Vec::new();
    for &a in &gens {
        for &b in &gens {
            relations.push((element(a).mul(&element(b)), element(g.mul(a, b))));
        }
    }
    RingPresentation { generators: gens.iter().map(|h| format!("t{h}")).collect(), relations, unital: true }
}

/// Endomorphisms `Σ_g c_g·g(x1)` of the free rank-one `Z[G]`-module with
/// `|c_g| ≤ bound`, as distinct morphisms of `Z ⊗ GSets(G)`.
pub fn group_ring_endomorphisms(lin: &Linearization, bound: i64) -> Result<Vec<FMor>> {
    let kt = &lin.kronecker;
    let Family::GSets(g) = kt.right.family() else {
        return Err(Error::Invalid("the right factor is not a theory of G-sets".into()));
    };
    let (add, neg, zero) = (kt.left_name("add"), kt.left_name("neg"), kt.left_name("zero"));
    let basis: Vec<Term> = (0..g.order())
        .map(|h| match h == g.identity() {
            true => Term::Var(1),
            false => Term::app(&kt.right_name(&format!("g{h}")), vec![Term::Var(1)]),
        })
        .collect();
    let scaled = |c: i64, b: &Term| {
        let unit = if c < 0 { Term::app(&neg, vec![b.clone()]) } else { b.clone() };
        Term::fold_right(&add, vec![unit; c.unsigned_abs() as usize], Term::constant(&zero))
    };
    let mut coeffs = vec![-bound; g.order()];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    loop {
        let parts = coeffs.iter().zip(&basis).map(|(&c, b)| scaled(c, b)).collect();
        let f = FMor::new(&kt.combined, 1, 1, vec![Term::fold_right(&add, parts, Term::constant(&zero))])?;
        if seen.insert(f.components()[0].clone()) {
            out.push(f);
        }
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return Ok(out);
            }
            coeffs[i] += 1;
            if coeffs[i] <= bound {
                break;
            }
            coeffs[i] = -bound;
            i += 1;
        }
    }
}

/// `L_a`: generators `R1..Ra, C1..Ca`, relations `Ci·Rj = δij` and `Σ Ri·Ci = 1`.
pub fn leavitt_presentation(a: usize) -> Result<RingPresentation> {
    if a < 2 {
        return Err(Error::Invalid(format!("Leavitt algebras need a >= 2, got {a}")));
    }
    let mut relations = Vec::new();
    for i in 1..=a {
        for j in 1..=a {
            let rhs = if i == j { NCPoly::one() } else { NCPoly::zero() };
            relations.push((NCPoly::monomial(1, vec![c_gen(a, i), r_gen(j)]), rhs));
        }
    }
    let sum = (1..=a).fold(NCPoly::zero(), |acc, i| acc.add(&NCPoly::monomial(1, vec![r_gen(i), c_gen(a, i)])));
    relations.push((sum, NCPoly::one()));
    Ok(RingPresentation { generators: leavitt_names(a), relations, unital: true })
}

/// Symbolic check that the row `R = (R1 … Ra)` and the column `C = (C1 … Ca)^t`
/// are mutually inverse: `R·C = [1]` and `(Ci·Rj) = I_a`.
#[derive(Clone, Debug, Serialize)]
pub struct RankIsoProof {
    pub a: usize,
    pub row_times_column: String,
    pub column_times_row: Vec<Vec<String>>,
    pub verified: bool,
}

pub fn verify_rank_iso(a: usize) -> Result<RankIsoProof> {
    let p = leavitt_presentation(a)?;
    let names = &p.generators;
    let rc = (1..=a).fold(NCPoly::zero(), |acc, i| acc.add(&NCPoly::monomial(1, vec![r_gen(i), c_gen(a, i)])));
    let rc = leavitt_normalize(a, &rc);
    if rc != NCPoly::one() {
        return Err(Error::CheckFailed(format!("R·C normalizes to {}", rc.render(names))));
    }
    let mut matrix = Vec::new();
    for i in 1..=a {
        let mut row = Vec::new();
        for j in 1..=a {
            let e = leavitt_normalize(a, &NCPoly::monomial(1, vec![c_gen(a, i), r_gen(j)]));
            let expected = if i == j { NCPoly::one() } else { NCPoly::zero() };
            if e != expected {
                return Err(Error::CheckFailed(format!("C{i}·R{j} normalizes to {}", e.render(names))));
            }
            row.push(e.render(names));
        }
        matrix.push(row);
    }
    Ok(RankIsoProof { a, row_times_column: rc.render(names), column_times_row: matrix, verified: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{boole_theory, groups_theory, rings_theory, sets_theory};

    #[test]
    fn boole_collapses() {
        let b = boole_theory();
        let (lin, verdict) = detect_trivial_ring(&b, DEFAULT_TRIVIAL_BUDGET).unwrap();
        let d = verdict.derivation().expect("trivial");
        assert_eq!(d.end(), &Term::constant("zero"));
        assert!(d.replay(lin.kronecker.combined.presentation(), &b, "").unwrap());
        let shown: Vec<String> = d.steps.iter().map(|s| s.result.to_string()).collect();
        assert_eq!(shown[0], "and(x1,1)");
    }

    #[test]
    fn rings_collapse_with_prefixes() {
        let r = rings_theory();
        let (lin, verdict) = detect_trivial_ring(&r, DEFAULT_TRIVIAL_BUDGET).unwrap();
        let d = verdict.derivation().expect("trivial");
        assert_eq!(d.end(), &Term::constant("l_zero"));
        assert!(d.replay(lin.kronecker.combined.presentation(), &r, "r_").unwrap());
        assert_eq!(lin.kronecker.combined.backend().kind(), "trivial");
    }

    #[test]
    fn nontrivial_linearizations() {
        for t in [sets_theory(), groups_theory()] {
            let (_, verdict) = detect_trivial_ring(&t, DEFAULT_TRIVIAL_BUDGET).unwrap();
            assert!(verdict.derivation().is_none(), "{}", t.name());
        }
    }

    #[test]
    fn tampered_derivation_fails_replay() {
        let b = boole_theory();
        let (lin, verdict) = detect_trivial_ring(&b, DEFAULT_TRIVIAL_BUDGET).unwrap();
        let mut d = verdict.derivation().unwrap().clone();
        d.steps[0].result = Term::app("or", vec![Term::Var(1), Term::constant("1")]);
        assert!(!d.replay(lin.kronecker.combined.presentation(), &b, "").unwrap());
    }

    #[test]
    fn leavitt_relations() {
        for a in 2..=6 {
            let p = leavitt_presentation(a).unwrap();
            assert_eq!(p.relations.len(), a * a + 1);
            assert_eq!(p.generators.len(), 2 * a);
            for (l, r) in &p.relations {
                assert_eq!(leavitt_normalize(a, &l.sub(r)), NCPoly::zero());
            }
        }
        assert!(verify_rank_iso(3).unwrap().verified);
    }

    #[test]
    fn group_ring_of_c2() {
        let p = group_ring(&FiniteGroup::cyclic(2));
        assert_eq!(p.render(), ["t1.t1 = 1"]);
        assert!(group_ring(&FiniteGroup::trivial()).relations.is_empty());
    }
}
