//! K₀ of a theory with certificates, the assembly map at π₀, pushforwards,
//! the K₀ ring of a commutative theory and automorphism groups of free models.

use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kronecker::{is_commutative_theory, CommutativityVerdict};
use crate::linearization::linearize;
use crate::models::{for_each_model, FiniteModel};
use crate::term::Term;
use crate::theory::{compose, hom_enumerate, is_iso, ElementList, FMor, Theory, TheoryMorphism};

/// Search bounds for [`k0`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct K0Options {
    pub term_bound: usize,
    pub arity_bound: usize,
    /// Largest carrier tried for a separating model.
    pub model_cap: usize,
    /// Carriers whose equation-instance count exceeds this are skipped.
    pub max_instances: usize,
    pub element_cap: usize,
    /// Term bound for the minimality search in `Z ⊗ T` during [`assembly_pi0`].
    pub linear_term_bound: usize,
    pub jobs: usize,
}

impl Default for K0Options {
    fn default() -> Self {
        K0Options {
            term_bound: 6,
            arity_bound: 6,
            model_cap: 4,
            max_instances: 200_000,
            element_cap: 200_000,
            linear_term_bound: 4,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CyclicGroup {
    InfiniteCyclic,
    Cyclic { order: usize },
}

impl CyclicGroup {
    pub fn order(&self) -> Option<usize> {
        match self {
            CyclicGroup::InfiniteCyclic => None,
            CyclicGroup::Cyclic { order } => Some(*order),
        }
    }
}

impl std::fmt::Display for CyclicGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CyclicGroup::InfiniteCyclic => write!(f, "Z"),
            CyclicGroup::Cyclic { order: 1 } => write!(f, "0"),
            CyclicGroup::Cyclic { order } => write!(f, "Z/{order}"),
        }
    }
}

/// An isomorphism `T_1 ≅ T_m`: `forward: T_1 → T_m`, `inverse: T_m → T_1`.
#[derive(Clone, Debug, Serialize)]
pub struct TorsionWitness {
    pub m: usize,
    pub forward: FMor,
    pub inverse: FMor,
}

impl TorsionWitness {
    /// Both composites are identities.
    pub fn verify(&self) -> Result<bool> {
        let th = self.forward.theory();
        Ok(compose(&self.inverse, &self.forward)? == FMor::identity(th, 1)?
            && compose(&self.forward, &self.inverse)? == FMor::identity(th, self.m)?)
    }
}

/// Evidence for the value of K₀.
#[derive(Clone, Debug, Serialize)]
pub struct K0Certificate {
    pub theory: String,
    /// `None` when neither a witness nor an invariant was found.
    pub group: Option<CyclicGroup>,
    pub generator: String,
    pub torsion_witness: Option<TorsionWitness>,
    pub separating_invariant: Option<FiniteModel>,
    /// Arities `m` for which no isomorphism `T_1 ≅ T_m` exists among terms within the bound.
    pub excluded_arities: Vec<usize>,
    pub skipped_model_sizes: Vec<usize>,
    pub bounds: K0Options,
    pub note: String,
}

impl K0Certificate {
    pub fn is_conclusive(&self) -> bool {
        self.group.is_some()
    }

    /// Re-checks the witness or the invariant.
    pub fn verify(&self, theory: &Theory) -> Result<bool> {
        if let Some(w) = &self.torsion_witness {
            return w.verify();
        }
        if let Some(m) = &self.separating_invariant {
            return Ok(m.size >= 2 && m.check(theory)?.valid);
        }
        Ok(!self.is_conclusive())
    }
}

fn instance_count(theory: &Theory, k: usize) -> usize {
    theory
        .presentation()
        .equations
        .iter()
        .map(|e| k.checked_pow(e.context as u32).unwrap_or(usize::MAX))
        .fold(0usize, |a, b| a.saturating_add(b))
}

/// Smallest model with at least two elements, trying carriers `2..=cap`.
pub fn separating_model(theory: &Theory, opts: &K0Options) -> Result<(Option<FiniteModel>, Vec<usize>)> {
    let mut skipped = Vec::new();
    for k in 2..=opts.model_cap {
        if instance_count(theory, k) > opts.max_instances {
            skipped.push(k);
            continue;
        }
        let mut found = None;
        for_each_model(theory, k, |m| {
            found = Some(m.clone());
            ControlFlow::Break(())
        })?;
        if found.is_some() {
            return Ok((found, skipped));
        }
    }
    Ok((None, skipped))
}

/// Variables first occur in the order `x1, x2, …`; every morphism `T_1 → T_m`
/// is a permutation of the variables away from exactly one such term.
fn first_occurrence_ordered(t: &Term) -> bool {
    fn walk(t: &Term, next: &mut usize) -> bool {
        match t {
            Term::Var(i) if *i == *next + 1 => {
                *next += 1;
                true
            }
            Term::Var(i) => *i <= *next,
            Term::App(_, args) => args.iter().all(|a| walk(a, next)),
        }
    }
    walk(t, &mut 0)
}

/// Searches `T_1 ≅ T_m` with both sides built from terms of size ≤ `bound`.
pub fn find_rank_iso(
    theory: &Theory,
    m: usize,
    ones: &ElementList,
    opts: &K0Options,
) -> Result<Option<TorsionWitness>> {
    let degenerate = theory.is_degenerate()?;
    let forwards: Vec<Term> = theory
        .elements(m, Some(opts.term_bound), opts.element_cap)?
        .elements
        .into_iter()
        .filter(|t| degenerate || (t.var_set().len() == m && first_occurrence_ordered(t)))
        .collect();
    let try_one = |u: &Term| -> Result<Option<TorsionWitness>> {
        let forward = FMor::new(theory, 1, m, vec![u.clone()])?;
        let targets = (1..=m).map(|j| theory.normalize(&Term::Var(j), m)).collect::<Result<Vec<_>>>()?;
        let mut candidates: Vec<Vec<Term>> = vec![Vec::new(); m];
        for s in &ones.elements {
            let image = theory.backend().normalize(&s.substitute(std::slice::from_ref(u))?, m)?;
            for (j, t) in targets.iter().enumerate() {
                if *t == image {
                    candidates[j].push(s.clone());
                }
            }
        }
        if candidates.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        let limits: Vec<usize> = candidates.iter().map(Vec::len).collect();
        let mut idx = vec![0usize; m];
        loop {
            let comps = idx.iter().zip(&candidates).map(|(&i, c)| c[i].clone()).collect();
            let inverse = FMor::new(theory, m, 1, comps)?;
            let w = TorsionWitness { m, forward: forward.clone(), inverse };
            if w.verify()? {
                return Ok(Some(w));
            }
            if !crate::theory::advance(&mut idx, &limits) {
                return Ok(None);
            }
        }
    };
    let jobs = opts.jobs.max(1).min(forwards.len().max(1));
    if jobs == 1 {
        for u in &forwards {
            if let Some(w) = try_one(u)? {
                return Ok(Some(w));
            }
        }
        return Ok(None);
    }
    // strided split; the hit with the smallest enumeration index wins
    let results: Vec<Result<Option<(usize, TorsionWitness)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|t| {
                let (forwards, try_one) = (&forwards, &try_one);
                scope.spawn(move || {
                    for i in (t..forwards.len()).step_by(jobs) {
                        if let Some(w) = try_one(&forwards[i])? {
                            return Ok(Some((i, w)));
                        }
                    }
                    Ok(None)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
    });
    let mut best: Option<(usize, TorsionWitness)> = None;
    for r in results {
        if let Some((i, w)) = r? {
            if best.as_ref().is_none_or(|(j, _)| i < *j) {
                best = Some((i, w));
            }
        }
    }
    Ok(best.map(|(_, w)| w))
}

pub fn k0(theory: &Theory, opts: &K0Options) -> Result<K0Certificate> {
    k0_with_witness(theory, opts, None)
}

/// Like [`k0`], starting from a known isomorphism `T_1 ≅ T_m`; only smaller
/// arities are searched.
pub fn k0_with_witness(theory: &Theory, opts: &K0Options, known: Option<TorsionWitness>) -> Result<K0Certificate> {
    if opts.term_bound == 0 || opts.arity_bound == 0 {
        return Err(Error::Invalid("k0 bounds must be at least 1".into()));
    }
    let mut cert = K0Certificate {
        theory: theory.name().to_string(),
        group: None,
        generator: "[T1]".into(),
        torsion_witness: None,
        separating_invariant: None,
        excluded_arities: Vec::new(),
        skipped_model_sizes: Vec::new(),
        bounds: *opts,
        note: String::new(),
    };
    if let Some(w) = &known {
        if !w.verify()? {
            return Err(Error::CheckFailed("the supplied witness is not an isomorphism".into()));
        }
    }
    let degenerate = theory.is_degenerate()?;
    if known.is_none() && !degenerate {
        let (model, skipped) = separating_model(theory, opts)?;
        cert.skipped_model_sizes = skipped;
        if let Some(m) = model {
            cert.note = format!(
                "a model with {} elements has |M|^m distinct for distinct m, so no T_m ≅ T_n for m ≠ n",
                m.size
            );
            cert.separating_invariant = Some(m);
            cert.group = Some(CyclicGroup::InfiniteCyclic);
            return Ok(cert);
        }
    }
    let last = known.as_ref().map_or(opts.arity_bound, |w| w.m - 1);
    let ones = theory.elements(1, Some(opts.term_bound), opts.element_cap)?;
    for m in 2..=last {
        if let Some(w) = find_rank_iso(theory, m, &ones, opts)? {
            cert.torsion_witness = Some(w);
            break;
        }
        cert.excluded_arities.push(m);
    }
    if cert.torsion_witness.is_none() {
        cert.torsion_witness = known;
    }
    match &cert.torsion_witness {
        Some(w) => {
            cert.group = Some(CyclicGroup::Cyclic { order: w.m - 1 });
            cert.note = format!(
                "T1 ≅ T{} is verified; minimality is certified only among terms of size ≤ {}",
                w.m, opts.term_bound
            );
        }
        None => {
            cert.note = format!(
                "no model with 2..={} elements and no isomorphism T1 ≅ Tm for m ≤ {} among terms of size ≤ {}; infinite within bounds",
                opts.model_cap, opts.arity_bound, opts.term_bound
            );
        }
    }
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Isomorphism,
    SurjectiveNotInjective,
    Zero,
}

/// A homomorphism of cyclic groups sending generator to generator.
#[derive(Clone, Debug, Serialize)]
pub struct CyclicMap {
    pub source: CyclicGroup,
    pub target: CyclicGroup,
    pub generator_image: String,
    pub kind: MapKind,
}

impl CyclicMap {
    /// The generator-preserving map `source → target`, if well defined.
    pub fn new(source: CyclicGroup, target: CyclicGroup, generator_image: &str) -> Result<CyclicMap> {
        let kind = match (source.order(), target.order()) {
            (s, t) if s == t => MapKind::Isomorphism,
            (_, Some(1)) => MapKind::Zero,
            (None, Some(_)) => MapKind::SurjectiveNotInjective,
            (Some(s), Some(t)) if s % t == 0 => MapKind::SurjectiveNotInjective,
            _ => return Err(Error::CheckFailed(format!("no generator-preserving homomorphism {source} → {target}"))),
        };
        Ok(CyclicMap { source, target, generator_image: generator_image.into(), kind })
    }

    pub fn is_surjective(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AssemblyReport {
    pub map: CyclicMap,
    pub theory: K0Certificate,
    pub linearization: K0Certificate,
}

fn require(cert: &K0Certificate) -> Result<CyclicGroup> {
    cert.group.ok_or_else(|| Error::Inconclusive(format!("K0({}) within bounds", cert.theory)))
}

/// `K₀(Ab) ⊗ K₀(T) → K₀(Z ⊗ T)` at π₀, sending `[Ab_1] ⊗ [T_1]` to `[(Z⊗T)_1]`.
pub fn assembly_pi0(theory: &Theory, opts: &K0Options) -> Result<AssemblyReport> {
    let source = k0(theory, opts)?;
    let group = require(&source)?;
    let lin = linearize(theory)?;
    let target_theory = &lin.kronecker.combined;
    let transported = match &source.torsion_witness {
        Some(w) => Some(TorsionWitness {
            m: w.m,
            forward: lin.morphism.apply(&w.forward)?,
            inverse: lin.morphism.apply(&w.inverse)?,
        }),
        None => None,
    };
    let target_opts = K0Options { term_bound: opts.linear_term_bound.min(opts.term_bound), ..*opts };
    let target = k0_with_witness(target_theory, &target_opts, transported)?;
    let map = CyclicMap::new(group, require(&target)?, "[(Z⊗T)1]")?;
    Ok(AssemblyReport { map, theory: source, linearization: target })
}

#[derive(Clone, Debug, Serialize)]
pub struct Pushforward {
    pub map: CyclicMap,
    pub source: K0Certificate,
    pub target: K0Certificate,
    /// The image of the source witness is an isomorphism in the target.
    pub witness_transported: Option<bool>,
}

/// The map `K₀(S) → K₀(T)` induced by a theory morphism.
pub fn k0_pushforward(l: &TheoryMorphism, opts: &K0Options) -> Result<Pushforward> {
    let source = k0(&l.source, opts)?;
    let target = k0(&l.target, opts)?;
    let map = CyclicMap::new(require(&source)?, require(&target)?, "[T1]")?;
    let witness_transported = match &source.torsion_witness {
        Some(w) => {
            Some(TorsionWitness { m: w.m, forward: l.apply(&w.forward)?, inverse: l.apply(&w.inverse)? }.verify()?)
        }
        None => None,
    };
    if witness_transported == Some(false) {
        return Err(Error::CheckFailed("the source witness does not map to an isomorphism".into()));
    }
    Ok(Pushforward { map, source, target, witness_transported })
}

/// `K₀(T)` as a ring with `[T_m]·[T_n] = [T_{mn}]`.
#[derive(Clone, Debug, Serialize)]
pub struct K0Ring {
    pub group: CyclicGroup,
    pub unit: String,
    pub multiplication: String,
    /// `table[i][j]` is the class of `i·j` for finite groups.
    pub table: Option<Vec<Vec<usize>>>,
}

pub fn k0_ring(theory: &Theory, opts: &K0Options) -> Result<K0Ring> {
    match is_commutative_theory(theory, opts.model_cap)? {
        CommutativityVerdict::Commutative { .. } => {}
        _ => {
            return Err(Error::Invalid(format!(
                "{} is not shown commutative; K0 carries no ring structure here",
                theory.name()
            )))
        }
    }
    let cert = k0(theory, opts)?;
    let group = require(&cert)?;
    let table = group.order().map(|d| (0..d).map(|i| (0..d).map(|j| (i * j) % d).collect()).collect());
    Ok(K0Ring {
        group,
        unit: "[T1]".into(),
        multiplication: "[Tm]·[Tn] = [Tmn]; the generator [T1] squares to itself".into(),
        table,
    })
}

/// Invertible endomorphisms of `T_n` with their multiplication table
/// (`table[i][j]` is the index of `elements[i] ∘ elements[j]`).
#[derive(Clone, Debug, Serialize)]
pub struct AutGroup {
    pub n: usize,
    pub elements: Vec<FMor>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverses: Vec<usize>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

pub fn aut_group(theory: &Theory, n: usize, bound: Option<usize>, cap: usize) -> Result<AutGroup> {
    let homs = hom_enumerate(theory, n, n, bound, cap)?;
    let mut elements = Vec::new();
    for f in homs {
        if is_iso(&f, bound, cap)?.inverse().is_some() {
            elements.push(f);
        }
    }
    let index: HashMap<&FMor, usize> = elements.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut table = Vec::with_capacity(elements.len());
    for g in &elements {
        let mut row = Vec::with_capacity(elements.len());
        for f in &elements {
            let gf = compose(g, f)?;
            let k = *index
                .get(&gf)
                .ok_or_else(|| Error::CheckFailed(format!("{gf} is outside the enumerated automorphisms")))?;
            row.push(k);
        }
        table.push(row);
    }
    let id = FMor::identity(theory, n)?;
    let identity = *index.get(&id).ok_or_else(|| Error::CheckFailed("identity not found".into()))?;
    let inverses = (0..elements.len())
        .map(|i| {
            (0..elements.len())
                .find(|&j| table[i][j] == identity && table[j][i] == identity)
                .ok_or_else(|| Error::CheckFailed(format!("{} has no inverse in the table", elements[i])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AutGroup { n, elements, table, identity, inverses })
}
