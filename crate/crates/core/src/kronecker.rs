//! Kronecker products of theories, the bilinear functor on free models and
//! commutativity of theories.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backend::{Backend, LeavittOps, LinearOps};
use crate::error::{Error, Result};
use crate::linearization::find_collapse;
use crate::models::{for_each_model, FiniteModel};
use crate::rewrite::{complete, CompletionBounds, Kbo};
use crate::term::{Equation, Op, Presentation, Signature, Term};
use crate::theory::{compose, coproduct, random_fmor, FMor, Family, Theory, TheoryMorphism};

/// `S ⊗ T` with its two embeddings.
#[derive(Clone, Debug)]
pub struct KroneckerTheory {
    pub left: Theory,
    pub right: Theory,
    pub combined: Theory,
    pub left_embedding: TheoryMorphism,
    pub right_embedding: TheoryMorphism,
    /// Number of commutation equations at the end of the combined presentation.
    pub commutations: usize,
    /// Prefixes added to the operation names of each factor (empty unless names clash).
    pub prefixes: (String, String),
}

impl KroneckerTheory {
    pub fn left_name(&self, op: &str) -> String {
        format!("{}{op}", self.prefixes.0)
    }

    pub fn right_name(&self, op: &str) -> String {
        format!("{}{op}", self.prefixes.1)
    }
}

/// `f(g(x_11..x_1n), …, g(x_m1..x_mn)) = g(f(x_11..x_m1), …, f(x_1n..x_mn))`
/// with `x_ij = x_{(i-1)n+j}`.
pub fn commutation_equation(f: &str, m: usize, g: &str, n: usize) -> Equation {
    let x = |i: usize, j: usize| Term::Var(i * n + j + 1);
    let left = Term::app(f, (0..m).map(|i| Term::app(g, (0..n).map(|j| x(i, j)).collect())).collect());
    let right = Term::app(g, (0..n).map(|j| Term::app(f, (0..m).map(|i| x(i, j)).collect())).collect());
    Equation::new(left, right, m * n)
}

fn prefix(p: &'static str) -> impl Fn(&str) -> String {
    move |s: &str| format!("{p}{s}")
}

fn is_unit(t: &Theory) -> bool {
    t.signature().is_empty() && t.presentation().equations.is_empty()
}

pub fn kronecker(s: &Theory, t: &Theory) -> Result<KroneckerTheory> {
    kronecker_with(s, t, CompletionBounds::default())
}

/// Like [`kronecker`], with explicit bounds for the completion fallback.
pub fn kronecker_with(s: &Theory, t: &Theory, bounds: CompletionBounds) -> Result<KroneckerTheory> {
    let clash = s.signature().ops().iter().any(|o| t.signature().contains(&o.name));
    let (lp, rp) = if clash { ("l_", "r_") } else { ("", "") };
    let (ls, rs) = (prefix(lp), prefix(rp));
    let sp = s.presentation().renamed(s.name(), &ls)?;
    let tp = t.presentation().renamed(t.name(), &rs)?;
    let mut sig = Signature::new();
    for op in sp.signature.ops().iter().chain(tp.signature.ops()) {
        sig.add(&op.name, op.arity)?;
    }
    let mut equations: Vec<Equation> = sp.equations.iter().chain(&tp.equations).cloned().collect();
    let base = equations.len();
    for f in sp.signature.ops() {
        for g in tp.signature.ops() {
            equations.push(commutation_equation(&f.name, f.arity, &g.name, g.arity));
        }
    }
    let commutations = equations.len() - base;
    let presentation = Presentation::new(&format!("{}_x_{}", s.name(), t.name()), sig, equations)?;

    let (backend, family) = if is_unit(s) {
        (t.backend().rename(&rs), t.family().clone())
    } else if is_unit(t) {
        (s.backend().rename(&ls), s.family().clone())
    } else {
        let sb = s.backend().rename(&ls);
        let tb = t.backend().rename(&rs);
        let backend = product_backend(&presentation, s, &sb, t, &tb, &ls, &rs)
            .unwrap_or_else(|| completion_backend(&presentation, bounds));
        (backend, Family::Kronecker)
    };
    let combined = Theory::new(presentation, backend, family);
    let embed = |theory: &Theory, f: &dyn Fn(&str) -> String| -> Result<TheoryMorphism> {
        let assignment: BTreeMap<String, Term> = theory
            .signature()
            .ops()
            .iter()
            .map(|o| (o.name.clone(), Term::app(&f(&o.name), Term::vars(o.arity))))
            .collect();
        TheoryMorphism::new(theory, &combined, assignment)
    };
    Ok(KroneckerTheory {
        left_embedding: embed(s, &ls)?,
        right_embedding: embed(t, &rs)?,
        left: s.clone(),
        right: t.clone(),
        combined,
        commutations,
        prefixes: (lp.to_string(), rp.to_string()),
    })
}

fn completion_backend(p: &Presentation, bounds: CompletionBounds) -> Backend {
    let report = complete(p, &Kbo::for_signature(&p.signature), bounds);
    if report.is_complete() {
        Backend::Trs(report.system(bounds.step_budget))
    } else {
        Backend::Undecided(format!(
            "{}: completion did not succeed ({})",
            p.name,
            report.message.as_deref().unwrap_or("unknown reason")
        ))
    }
}

fn as_linear(b: &Backend) -> Option<LinearOps> {
    match b {
        Backend::Linear(ops) => Some(ops.clone()),
        Backend::ReducedWord(g) => Some(LinearOps {
            add: vec![g.mul.clone()],
            neg: vec![g.inv.clone()],
            zero: vec![g.unit.clone()],
            modulus: None,
        }),
        _ => None,
    }
}

/// Decision procedures for the catalogue identities; `None` falls back to completion.
fn product_backend(
    p: &Presentation,
    s: &Theory,
    sb: &Backend,
    t: &Theory,
    tb: &Backend,
    ls: &dyn Fn(&str) -> String,
    rs: &dyn Fn(&str) -> String,
) -> Option<Backend> {
    if let Backend::GSet(action) = tb {
        if sb.is_decided() {
            return Some(Backend::Action { inner: Box::new(sb.clone()), action: action.clone() });
        }
    }
    if let Backend::GSet(action) = sb {
        if tb.is_decided() {
            return Some(Backend::Action { inner: Box::new(tb.clone()), action: action.clone() });
        }
    }
    // Eckmann–Hilton: two commuting group structures coincide and are abelian
    if let (Some(a), Some(b)) = (as_linear(sb), as_linear(tb)) {
        return Some(Backend::Linear(a.merged(&b)));
    }
    let leavitt = |lin: &Backend, rn: &dyn Fn(&str) -> String, cantor: &Theory| match (lin, cantor.family()) {
        (Backend::Linear(ops), Family::Cantor(a)) if ops.modulus.is_none() => Some(Backend::Leavitt(LeavittOps {
            a: *a,
            add: ops.add[0].clone(),
            neg: ops.neg[0].clone(),
            zero: ops.zero[0].clone(),
            mu: rn("mu").into(),
            nu: (1..=*a).map(|i| Op::from(rn(&format!("nu{i}")))).collect(),
        })),
        _ => None,
    };
    if let Some(b) = leavitt(sb, rs, t).or_else(|| leavitt(tb, ls, s)) {
        return Some(b);
    }
    let trivial = |lin: &Backend, other: &Theory, rn: &dyn Fn(&str) -> String| match lin {
        Backend::Linear(ops) => find_collapse(p, &ops.zero[0], other, rn)
            .ok()
            .flatten()
            .map(|_| Backend::Trivial { zero: ops.zero[0].clone() }),
        _ => None,
    };
    trivial(sb, t, rs).or_else(|| trivial(tb, s, ls))
}

/// `r × f = f ⊕ … ⊕ f` (`r` blocks).
pub fn times_left(r: usize, f: &FMor) -> Result<FMor> {
    let mut out = FMor::identity(f.theory(), 0)?;
    for _ in 0..r {
        out = coproduct(&out, f)?;
    }
    Ok(out)
}

/// `f × r`: component `(i, k)` (at `i·r + k`) is `f_i` with `x_j ↦ x_{(j-1)r+k}`.
pub fn times_right(f: &FMor, r: usize) -> Result<FMor> {
    let comps = f.components().iter().flat_map(|c| (1..=r).map(move |k| c.map_vars(&|j| (j - 1) * r + k))).collect();
    FMor::new(f.theory(), f.src * r, f.dst * r, comps)
}

/// The bilinear functor `F_S × F_T → F_{S⊗T}`, `(m, n) ↦ m·n` with `(i, j) ↦ i·n + j`.
#[derive(Clone, Debug)]
pub struct BilinearWitness {
    pub theory: KroneckerTheory,
}

impl BilinearWitness {
    pub fn new(theory: KroneckerTheory) -> Self {
        BilinearWitness { theory }
    }

    pub fn on_objects(&self, m: usize, n: usize) -> usize {
        m * n
    }

    /// Both composites of the defining square, in the combined theory.
    pub fn composites(&self, f: &FMor, g: &FMor) -> Result<(FMor, FMor)> {
        let kt = &self.theory;
        if f.theory() != &kt.left || g.theory() != &kt.right {
            return Err(Error::MorphismMismatch("morphisms are not in the factor theories".into()));
        }
        let fe = kt.left_embedding.apply(f)?;
        let ge = kt.right_embedding.apply(g)?;
        let (m, m2, n, n2) = (f.src, f.dst, g.src, g.dst);
        let first = compose(&times_right(&fe, n2)?, &times_left(m, &ge)?)?;
        let second = compose(&times_left(m2, &ge)?, &times_right(&fe, n)?)?;
        Ok((first, second))
    }

    /// `P(f, g)`; fails if the two composites differ.
    pub fn apply(&self, f: &FMor, g: &FMor) -> Result<FMor> {
        let (a, b) = self.composites(f, g)?;
        if a != b {
            return Err(Error::CheckFailed(format!("bilinear square fails: {a} vs {b}")));
        }
        Ok(a)
    }
}

pub fn bilinear_on_morphisms(w: &BilinearWitness, f: &FMor, g: &FMor) -> Result<FMor> {
    w.apply(f, g)
}

/// `T_{m(n1+n2)} → T_{mn1+mn2}` sending row-major `(i, j)` to its block position.
fn block_split(theory: &Theory, m: usize, n1: usize, n2: usize) -> Result<FMor> {
    let n = n1 + n2;
    let comps = (0..m * n)
        .map(|p| {
            let (i, j) = (p / n, p % n);
            Term::Var(if j < n1 { i * n1 + j } else { m * n1 + i * n2 + (j - n1) } + 1)
        })
        .collect();
    FMor::new(theory, m * n, m * n, comps)
}

/// Inverse of [`block_split`].
fn block_join(theory: &Theory, m: usize, n1: usize, n2: usize) -> Result<FMor> {
    let split = block_split(theory, m, n1, n2)?;
    let mut comps = vec![Term::Var(1); split.src];
    for (p, c) in split.components().iter().enumerate() {
        if let Term::Var(q) = c {
            comps[q - 1] = Term::Var(p + 1);
        }
    }
    FMor::new(theory, split.src, split.dst, comps)
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct BilinearReport {
    pub pairs_checked: usize,
    pub square_failures: usize,
    pub delta_failures: usize,
    pub monoidality_failures: usize,
}

impl BilinearReport {
    pub fn passed(&self) -> bool {
        self.square_failures == 0 && self.delta_failures == 0 && self.monoidality_failures == 0
    }
}

const SAMPLE_TERM_SIZE: usize = 5;

/// Seeded checks of the bilinear functor: the defining square, strict
/// distributivity in each argument and monoidality in the second argument.
pub fn check_bilinear_axioms(
    w: &BilinearWitness,
    samples: usize,
    arity_bound: usize,
    seed: u64,
) -> Result<BilinearReport> {
    let kt = &w.theory;
    let (s, t, c) = (&kt.left, &kt.right, &kt.combined);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = arity_bound.max(1);
    let mut report = BilinearReport::default();
    let arity = |rng: &mut ChaCha8Rng| rng.gen_range(1..=bound);
    for _ in 0..samples {
        let (m, m2, m3, n, n2, n3) =
            (arity(&mut rng), arity(&mut rng), arity(&mut rng), arity(&mut rng), arity(&mut rng), arity(&mut rng));
        let f = random_fmor(s, m, m2, SAMPLE_TERM_SIZE, &mut rng)?;
        let f2 = random_fmor(s, m3, m2, SAMPLE_TERM_SIZE, &mut rng)?;
        let g = random_fmor(t, n, n2, SAMPLE_TERM_SIZE, &mut rng)?;
        let g2 = random_fmor(t, n3, n2, SAMPLE_TERM_SIZE, &mut rng)?;
        report.pairs_checked += 1;
        let (a, b) = w.composites(&f, &g)?;
        if a != b {
            report.square_failures += 1;
            continue;
        }
        let p = a;
        // left distributivity is the identity: P(f ⊕ f2, g) = P(f, g) ⊕ P(f2, g)
        let ff = coproduct(&f, &f2)?;
        let lhs = w.apply(&ff, &g);
        let rhs = coproduct(&p, &w.apply(&f2, &g)?)?;
        let objects_ok = (m + m3) * n == m * n + m3 * n && m * (n + n3) == m * n + m * n3;
        if !objects_ok || lhs.ok().as_ref() != Some(&rhs) {
            report.delta_failures += 1;
        }
        // P(f, g ⊕ g2) equals P(f, g) ⊕ P(f, g2) reshuffled by the block permutations
        let gg = coproduct(&g, &g2)?;
        let direct = w.apply(&f, &gg);
        let blocks = coproduct(&p, &w.apply(&f, &g2)?)?;
        let reshuffled = compose(&block_join(c, m2, n2, n2)?, &compose(&blocks, &block_split(c, m, n, n3)?)?)?;
        if direct.ok().as_ref() != Some(&reshuffled) {
            report.monoidality_failures += 1;
        }
    }
    Ok(report)
}

/// Outcome of [`is_commutative_theory`].
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CommutativityVerdict {
    /// Every self-commutation equation is derivable.
    Commutative {
        equations: Vec<Equation>,
    },
    NonCommutative {
        witness: FiniteModel,
        equation: Equation,
        assignment: Vec<usize>,
    },
    Inconclusive {
        reason: String,
    },
}

/// Self-commutation equations, one per ordered pair of operations `f ≤ g`.
pub fn self_commutation_equations(t: &Theory) -> Vec<Equation> {
    let ops = t.signature().ops();
    let mut out = Vec::new();
    for (i, f) in ops.iter().enumerate() {
        for g in &ops[i..] {
            out.push(commutation_equation(&f.name, f.arity, &g.name, g.arity));
        }
    }
    out
}

/// Decides whether all operations of `t` commute, by derivation or by a
/// finite counter-model on at most `model_size_bound` elements.
pub fn is_commutative_theory(t: &Theory, model_size_bound: usize) -> Result<CommutativityVerdict> {
    let equations = self_commutation_equations(t);
    let mut open = Vec::new();
    for eq in &equations {
        if !t.proves(eq).unwrap_or(false) {
            open.push(eq.clone());
        }
    }
    if open.is_empty() {
        return Ok(CommutativityVerdict::Commutative { equations });
    }
    for k in 2..=model_size_bound {
        let mut found = None;
        for_each_model(t, k, |m| {
            for eq in &open {
                if let Ok(Some(env)) = m.satisfies(eq, t.signature()) {
                    found = Some((m.clone(), eq.clone(), env));
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
        if let Some((witness, equation, assignment)) = found {
            return Ok(CommutativityVerdict::NonCommutative { witness, equation, assignment });
        }
    }
    Ok(CommutativityVerdict::Inconclusive {
        reason: format!(
            "{} commutation equations not derived and no counter-model up to size {model_size_bound}",
            open.len()
        ),
    })
}
