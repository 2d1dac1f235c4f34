//! Arity-capped multicategories: `M1`, the underlying multicategory of `F_T`,
//! and the coherence diagrams of the lax monoidal structure.

use std::collections::BTreeMap;
use std::fmt::Debug;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalogue::sets_theory;
use crate::error::{Error, Result};
use crate::kronecker::{kronecker, BilinearWitness, KroneckerTheory};
use crate::term::Term;
use crate::theory::{compose, coproduct, hom_enumerate, random_fmor, FMor, Theory, TheoryMorphism};

/// Hom-sets larger than this are sampled instead of enumerated.
pub const DEFAULT_HOM_LIMIT: usize = 4096;
/// Composable configurations beyond this count are sampled.
pub const DEFAULT_CONFIG_LIMIT: usize = 100_000;
const SAMPLE_TERM_SIZE: usize = 4;

/// A multicategory explored within an arity window.
pub trait Multicategory {
    type Obj: Clone + PartialEq + Debug;
    type Mor: Clone + PartialEq + Debug;

    fn basepoint(&self) -> Self::Obj;
    /// Profiles `(sources, target)` inside the window.
    fn window(&self, cap: usize) -> Vec<(Vec<Self::Obj>, Self::Obj)>;
    /// All morphisms of a profile, or `None` when there are more than `limit`.
    fn hom(&self, sources: &[Self::Obj], target: &Self::Obj, limit: usize) -> Result<Option<Vec<Self::Mor>>>;
    /// A random morphism of a profile; `None` when the hom-set is empty.
    fn sample(&self, sources: &[Self::Obj], target: &Self::Obj, rng: &mut ChaCha8Rng) -> Result<Option<Self::Mor>>;
    fn profile(&self, f: &Self::Mor) -> (Vec<Self::Obj>, Self::Obj);
    fn identity(&self, c: &Self::Obj) -> Result<Self::Mor>;
    /// `f ∘ (g_1, …, g_k)`.
    fn compose(&self, f: &Self::Mor, gs: &[Self::Mor]) -> Result<Self::Mor>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum M1Object {
    Zero,
    One,
}

/// The unique morphism of its profile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct M1Morphism {
    pub sources: Vec<M1Object>,
    pub target: M1Object,
}

/// Two objects; `(0,…,0; 0)` and profiles with exactly one `1` mapping to `1` are points, all else empty.
#[derive(Clone, Copy, Debug, Default)]
pub struct M1;

pub fn m1() -> M1 {
    M1
}

impl M1 {
    pub fn hom_size(&self, sources: &[M1Object], target: M1Object) -> usize {
        let ones = sources.iter().filter(|o| **o == M1Object::One).count();
        usize::from(match target {
            M1Object::Zero => ones == 0,
            M1Object::One => ones == 1,
        })
    }
}

impl Multicategory for M1 {
    type Obj = M1Object;
    type Mor = M1Morphism;

    fn basepoint(&self) -> M1Object {
        M1Object::Zero
    }

    fn window(&self, cap: usize) -> Vec<(Vec<M1Object>, M1Object)> {
        let mut out = Vec::new();
        for len in 0..=cap {
            for code in 0..1usize << len {
                let sources: Vec<M1Object> =
                    (0..len).map(|i| if code >> i & 1 == 1 { M1Object::One } else { M1Object::Zero }).collect();
                for target in [M1Object::Zero, M1Object::One] {
                    out.push((sources.clone(), target));
                }
            }
        }
        out
    }

    fn hom(&self, sources: &[M1Object], target: &M1Object, _limit: usize) -> Result<Option<Vec<M1Morphism>>> {
        let one = M1Morphism { sources: sources.to_vec(), target: *target };
        Ok(Some(if self.hom_size(sources, *target) == 1 { vec![one] } else { Vec::new() }))
    }

    fn sample(&self, sources: &[M1Object], target: &M1Object, _rng: &mut ChaCha8Rng) -> Result<Option<M1Morphism>> {
        Ok(self.hom(sources, target, 1)?.and_then(|v| v.into_iter().next()))
    }

    fn profile(&self, f: &M1Morphism) -> (Vec<M1Object>, M1Object) {
        (f.sources.clone(), f.target)
    }

    fn identity(&self, c: &M1Object) -> Result<M1Morphism> {
        Ok(M1Morphism { sources: vec![*c], target: *c })
    }

    fn compose(&self, f: &M1Morphism, gs: &[M1Morphism]) -> Result<M1Morphism> {
        check_composable(&f.sources, gs.iter().map(|g| &g.target))?;
        let sources = gs.iter().flat_map(|g| g.sources.iter().copied()).collect();
        Ok(M1Morphism { sources, target: f.target })
    }
}

fn check_composable<'a, O: PartialEq + Debug + 'a>(sources: &[O], targets: impl Iterator<Item = &'a O>) -> Result<()> {
    let targets: Vec<&O> = targets.collect();
    if targets.len() != sources.len() || sources.iter().zip(&targets).any(|(s, t)| s != *t) {
        return Err(Error::MorphismMismatch(format!("sources {sources:?} against targets {targets:?}")));
    }
    Ok(())
}

/// An `n`-ary morphism `(c_1, …, c_n; d)` of `U F_T`: a morphism `T_{c_1+…+c_n} → T_d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UMorphism {
    pub sources: Vec<usize>,
    pub target: usize,
    pub map: FMor,
}

/// `U F_T` with objects `0..=arity_cap`; hom-sets are read off `F_T`,
/// with components of size ≤ `size_bound` when given.
#[derive(Clone, Debug)]
pub struct UnderlyingMulticategory {
    pub theory: Theory,
    pub arity_cap: usize,
    pub size_bound: Option<usize>,
}

pub fn underlying(theory: &Theory, arity_cap: usize, size_bound: Option<usize>) -> UnderlyingMulticategory {
    UnderlyingMulticategory { theory: theory.clone(), arity_cap, size_bound }
}

/// All morphisms `T_m → T_n`, or `None` when there are more than `limit` or infinitely many.
pub fn enumerate_bounded(
    theory: &Theory,
    m: usize,
    n: usize,
    bound: Option<usize>,
    limit: usize,
) -> Result<Option<Vec<FMor>>> {
    match hom_enumerate(theory, m, n, bound, limit) {
        Ok(v) => Ok(Some(v)),
        Err(Error::CapExceeded(_) | Error::InfiniteHomSet) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A random morphism `T_m → T_n`; `None` when there is none.
pub fn sample_fmor(theory: &Theory, m: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<FMor>> {
    if m > 0 && n == 0 && theory.signature().constants().next().is_none() {
        return Ok(None);
    }
    random_fmor(theory, m, n, SAMPLE_TERM_SIZE, rng).map(Some)
}

impl Multicategory for UnderlyingMulticategory {
    type Obj = usize;
    type Mor = UMorphism;

    fn basepoint(&self) -> usize {
        0
    }

    /// Source lists of length ≤ cap with total arity ≤ cap, targets ≤ cap.
    fn window(&self, cap: usize) -> Vec<(Vec<usize>, usize)> {
        let cap = cap.min(self.arity_cap);
        let mut lists = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..cap {
            let mut next = Vec::new();
            for l in &frontier {
                let used: usize = l.iter().sum();
                for c in 0..=cap - used {
                    let mut l2: Vec<usize> = l.clone();
                    l2.push(c);
                    next.push(l2);
                }
            }
            lists.extend(next.iter().cloned());
            frontier = next;
        }
        lists.into_iter().flat_map(|l| (0..=cap).map(move |d| (l.clone(), d))).collect()
    }

    fn hom(&self, sources: &[usize], target: &usize, limit: usize) -> Result<Option<Vec<UMorphism>>> {
        let m = sources.iter().sum();
        Ok(enumerate_bounded(&self.theory, m, *target, self.size_bound, limit)?
            .map(|v| v.into_iter().map(|map| UMorphism { sources: sources.to_vec(), target: *target, map }).collect()))
    }

    fn sample(&self, sources: &[usize], target: &usize, rng: &mut ChaCha8Rng) -> Result<Option<UMorphism>> {
        let m = sources.iter().sum();
        Ok(sample_fmor(&self.theory, m, *target, rng)?.map(|map| UMorphism {
            sources: sources.to_vec(),
            target: *target,
            map,
        }))
    }

    fn profile(&self, f: &UMorphism) -> (Vec<usize>, usize) {
        (f.sources.clone(), f.target)
    }

    fn identity(&self, c: &usize) -> Result<UMorphism> {
        Ok(UMorphism { sources: vec![*c], target: *c, map: FMor::identity(&self.theory, *c)? })
    }

    fn compose(&self, f: &UMorphism, gs: &[UMorphism]) -> Result<UMorphism> {
        check_composable(&f.sources, gs.iter().map(|g| &g.target))?;
        let mut block = FMor::identity(&self.theory, 0)?;
        for g in gs {
            block = coproduct(&block, &g.map)?;
        }
        Ok(UMorphism {
            sources: gs.iter().flat_map(|g| g.sources.iter().copied()).collect(),
            target: f.target,
            map: compose(&f.map, &block)?,
        })
    }
}

/// Outcome of one diagram or law check over a finite window.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct DiagramReport {
    pub diagram: String,
    pub theories: Vec<String>,
    pub window: String,
    pub checked: usize,
    pub exhaustive: usize,
    pub sampled: usize,
    pub failures: usize,
    /// Up to five failing instances.
    pub examples: Vec<String>,
}

impl DiagramReport {
    fn new(diagram: &str, theories: &[&Theory], window: String) -> Self {
        DiagramReport {
            diagram: diagram.into(),
            theories: theories.iter().map(|t| t.name().to_string()).collect(),
            window,
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, exhaustive: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if exhaustive {
            self.exhaustive += 1;
        } else {
            self.sampled += 1;
        }
        if !ok {
            self.failures += 1;
            if self.examples.len() < 5 {
                self.examples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Morphisms of a profile: all of them when at most `limit`, else `samples` random ones.
fn morphisms<M: Multicategory>(
    mc: &M,
    sources: &[M::Obj],
    target: &M::Obj,
    limit: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<M::Mor>, bool)> {
    if let Some(all) = mc.hom(sources, target, limit)? {
        return Ok((all, true));
    }
    let mut out = Vec::new();
    for _ in 0..samples {
        if let Some(f) = mc.sample(sources, target, rng)? {
            out.push(f);
        }
    }
    Ok((out, false))
}

fn pick<M: Multicategory>(
    mc: &M,
    sources: &[M::Obj],
    target: &M::Obj,
    limit: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<M::Mor>> {
    match mc.hom(sources, target, limit)? {
        Some(all) => Ok(all.choose(rng).cloned()),
        None => mc.sample(sources, target, rng),
    }
}

/// Unit and associativity laws on the window of arity `cap`.
pub fn check_multicategory_laws<M: Multicategory>(
    mc: &M,
    name: &str,
    cap: usize,
    samples: usize,
    seed: u64,
) -> Result<DiagramReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DiagramReport {
        diagram: "multicategory-laws".into(),
        theories: vec![name.into()],
        window: format!("arity ≤ {cap}"),
        ..Default::default()
    };
    let window = mc.window(cap);
    for (sources, target) in &window {
        let (fs, exhaustive) = morphisms(mc, sources, target, DEFAULT_HOM_LIMIT, samples, &mut rng)?;
        for f in fs {
            let ids = sources.iter().map(|c| mc.identity(c)).collect::<Result<Vec<_>>>()?;
            let right = mc.compose(&f, &ids)? == f;
            let left = mc.compose(&mc.identity(target)?, std::slice::from_ref(&f))? == f;
            report.record(left && right, exhaustive, || format!("unit law fails for {f:?}"));
        }
    }
    // two-level configurations (f; g_1..g_k; h_..): profiles of g_i end in the sources of f
    let by_target = |d: &M::Obj| -> Vec<&(Vec<M::Obj>, M::Obj)> { window.iter().filter(|(_, t)| t == d).collect() };
    let mut configs: Vec<Vec<usize>> = Vec::new();
    let mut total: usize = 0;
    for (fi, (sources, _)) in window.iter().enumerate() {
        let choices: Vec<usize> = sources.iter().map(|d| by_target(d).len()).collect();
        let n: usize = choices.iter().product();
        total = total.saturating_add(n);
        if total <= DEFAULT_CONFIG_LIMIT {
            let mut idx = vec![0usize; choices.len()];
            if choices.iter().all(|&c| c > 0) {
                loop {
                    let mut c = vec![fi];
                    c.extend(&idx);
                    configs.push(c);
                    if !crate::theory::advance(&mut idx, &choices) {
                        break;
                    }
                }
            }
        }
    }
    let exhaustive = total <= DEFAULT_CONFIG_LIMIT;
    let runs: Vec<Vec<usize>> = if exhaustive {
        configs
    } else {
        (0..samples)
            .filter_map(|_| {
                let fi = rng.gen_range(0..window.len());
                let mut c = vec![fi];
                for d in &window[fi].0 {
                    let opts = by_target(d);
                    if opts.is_empty() {
                        return None;
                    }
                    c.push(rng.gen_range(0..opts.len()));
                }
                Some(c)
            })
            .collect()
    };
    for c in runs {
        let (fs, ft) = &window[c[0]];
        let Some(f) = pick(mc, fs, ft, DEFAULT_HOM_LIMIT, &mut rng)? else { continue };
        let mut gs = Vec::new();
        let mut hs_all = Vec::new();
        let mut ok_shape = true;
        for (d, &gi) in fs.iter().zip(&c[1..]) {
            let (gsrc, gt) = by_target(d)[gi];
            let Some(g) = pick(mc, gsrc, gt, DEFAULT_HOM_LIMIT, &mut rng)? else {
                ok_shape = false;
                break;
            };
            let mut hs = Vec::new();
            for b in gsrc {
                let opts = by_target(b);
                let (hsrc, ht) = opts[rng.gen_range(0..opts.len())];
                match pick(mc, hsrc, ht, DEFAULT_HOM_LIMIT, &mut rng)? {
                    Some(h) => hs.push(h),
                    None => hs.push(mc.identity(b)?),
                }
            }
            gs.push(g);
            hs_all.push(hs);
        }
        if !ok_shape {
            continue;
        }
        let flat_h: Vec<M::Mor> = hs_all.iter().flatten().cloned().collect();
        let left = mc.compose(&mc.compose(&f, &gs)?, &flat_h)?;
        let inner = gs.iter().zip(&hs_all).map(|(g, hs)| mc.compose(g, hs)).collect::<Result<Vec<_>>>()?;
        let right = mc.compose(&f, &inner)?;
        report.record(left == right, exhaustive, || format!("associativity fails at {f:?} with {gs:?}"));
    }
    Ok(report)
}

/// The map of based multicategories `M1 → U F_T` with `0 ↦ 0`, `1 ↦ c`.
pub fn m1_image(u: &UnderlyingMulticategory, c: usize, f: &M1Morphism) -> Result<UMorphism> {
    let obj = |o: &M1Object| if *o == M1Object::One { c } else { 0 };
    let sources: Vec<usize> = f.sources.iter().map(obj).collect();
    let target = obj(&f.target);
    Ok(UMorphism { sources, target, map: FMor::identity(&u.theory, target)? })
}

/// The canonical `M1`-module structure on `U F_T`: each `M1 → U F_T` is a
/// multifunctor and the unit acts as the identity, within arity `cap`.
pub fn check_m1_module(theory: &Theory, cap: usize) -> Result<DiagramReport> {
    let u = underlying(theory, cap, None);
    let m = m1();
    let mut report = DiagramReport::new("m1-module", &[theory], format!("objects ≤ {cap}, arity ≤ {cap}"));
    let window: Vec<M1Morphism> = m
        .window(cap)
        .into_iter()
        .filter_map(|(s, t)| m.hom(&s, &t, 1).ok().flatten().and_then(|v| v.into_iter().next()))
        .collect();
    for c in 0..=cap {
        for f in &window {
            let image = m1_image(&u, c, f)?;
            let identity_like = image.map.is_identity()?;
            report.record(identity_like, true, || format!("image of {f:?} at {c} is {}", image.map));
            // preservation of every composite whose inner arities stay in the window
            let mut stack: Vec<Vec<&M1Morphism>> = vec![Vec::new()];
            while let Some(gs) = stack.pop() {
                if gs.len() == f.sources.len() {
                    let gs_owned: Vec<M1Morphism> = gs.iter().map(|g| (*g).clone()).collect();
                    let whole = m1_image(&u, c, &m.compose(f, &gs_owned)?)?;
                    let images = gs_owned.iter().map(|g| m1_image(&u, c, g)).collect::<Result<Vec<_>>>()?;
                    let parts = u.compose(&image, &images)?;
                    report.record(whole == parts, true, || format!("composite through {f:?} not preserved at {c}"));
                    continue;
                }
                let used: usize = gs.iter().map(|g| g.sources.len()).sum();
                let need = f.sources[gs.len()];
                for g in window.iter().filter(|g| g.target == need && used + g.sources.len() <= cap) {
                    let mut next = gs.clone();
                    next.push(g);
                    stack.push(next);
                }
            }
        }
        // the action 0 ⊕ c → c is unital and associative
        let unit =
            m1_image(&u, c, &M1Morphism { sources: vec![M1Object::Zero, M1Object::One], target: M1Object::One })?;
        let mult = m1_image(&u, c, &M1Morphism { sources: vec![M1Object::Zero; 2], target: M1Object::Zero })?;
        let a1 = u.compose(&unit, &[mult.clone(), u.identity(&c)?])?;
        let a2 = u.compose(&unit, &[u.identity(&0)?, unit.clone()])?;
        report.record(a1 == a2 && unit.sources == [0, c], true, || format!("action on {c} is not associative"));
    }
    Ok(report)
}

/// `E ⊗ S → S`: the unit isomorphism of theories.
fn unit_morphism(kt: &KroneckerTheory) -> Result<TheoryMorphism> {
    let s = &kt.right;
    let assignment =
        s.signature().ops().iter().map(|o| (kt.right_name(&o.name), Term::app(&o.name, Term::vars(o.arity)))).collect();
    TheoryMorphism::new(&kt.combined, s, assignment)
}

/// The left unit square `M1 ⊗ U(S) → U(S)` against `M1 → U(E)`, `U(E) ⊗ U(S) → U(E⊗S) → U(S)`,
/// on both generating forms of morphisms.
pub fn check_unit_coherence(s: &Theory, cap: usize, samples: usize, seed: u64) -> Result<DiagramReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = sets_theory();
    let kt = kronecker(&e, s)?;
    let unit = unit_morphism(&kt)?;
    let w = BilinearWitness::new(kt);
    let id_e1 = FMor::identity(&e, 1)?;
    let mut report = DiagramReport::new("unit-square", &[s], format!("arity ≤ {cap}"));
    // form (id_1, f): the check does not depend on how the source arity is split into blocks
    for total in 0..=cap {
        for n in 0..=cap {
            let (fs, exhaustive) = match enumerate_bounded(s, total, n, None, DEFAULT_HOM_LIMIT)? {
                Some(all) => (all, true),
                None => {
                    let mut v = Vec::new();
                    for _ in 0..samples {
                        if let Some(f) = sample_fmor(s, total, n, &mut rng)? {
                            v.push(f);
                        }
                    }
                    (v, false)
                }
            };
            for f in fs {
                let image = unit.apply(&w.apply(&id_e1, &f)?)?;
                let objects_ok = w.on_objects(1, total) == total && w.on_objects(1, n) == n;
                report.record(image == f && objects_ok, exhaustive, || format!("(id_1, {f}) ↦ {image}"));
            }
        }
    }
    // form ((0,…,1,…,0) → 1, id_{S_n})
    let u = underlying(s, cap, None);
    for n in 0..=cap {
        let id = FMor::identity(s, n)?;
        for k in 1..=cap {
            for p in 0..k {
                let mut sources = vec![M1Object::Zero; k];
                sources[p] = M1Object::One;
                let module = m1_image(&u, n, &M1Morphism { sources, target: M1Object::One })?;
                let image = unit.apply(&w.apply(&id_e1, &id)?)?;
                let mut typed = vec![0; k];
                typed[p] = w.on_objects(1, n);
                let ok = image == id && module.map == id && module.sources == typed;
                report.record(ok, true, || format!("basepoint form at position {p} of {k} on T{n}"));
            }
        }
    }
    Ok(report)
}

/// `T_{pq} → T_{qp}`, `(i, k) ↦ (k, i)`.
pub fn transpose(theory: &Theory, p: usize, q: usize) -> Result<FMor> {
    let comps = (0..p * q).map(|x| Term::Var((x % q) * p + x / q + 1)).collect();
    FMor::new(theory, p * q, q * p, comps)
}

/// `S ⊗ T → T ⊗ S` exchanging the two factors.
pub fn swap_morphism(st: &KroneckerTheory, ts: &KroneckerTheory) -> Result<TheoryMorphism> {
    let mut assignment = BTreeMap::new();
    for o in st.left.signature().ops() {
        assignment.insert(st.left_name(&o.name), Term::app(&ts.right_name(&o.name), Term::vars(o.arity)));
    }
    for o in st.right.signature().ops() {
        assignment.insert(st.right_name(&o.name), Term::app(&ts.left_name(&o.name), Term::vars(o.arity)));
    }
    TheoryMorphism::new(&st.combined, &ts.combined, assignment)
}

/// The symmetry square: `σ(P(f, g))` conjugated by transpositions equals `P(g, f)`,
/// on `(f, id)` and `(id, g)` within the window and on sampled general pairs.
pub fn check_symmetry_square(s: &Theory, t: &Theory, cap: usize, samples: usize, seed: u64) -> Result<DiagramReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st = kronecker(s, t)?;
    let ts = kronecker(t, s)?;
    let sigma = swap_morphism(&st, &ts)?;
    let w_st = BilinearWitness::new(st);
    let w_ts = BilinearWitness::new(ts);
    let target = &w_ts.theory.combined;
    let mut report = DiagramReport::new("symmetry-square", &[s, t], format!("arity ≤ {cap}"));
    let check = |f: &FMor, g: &FMor, exhaustive: bool, report: &mut DiagramReport| -> Result<()> {
        let p = sigma.apply(&w_st.apply(f, g)?)?;
        let q = w_ts.apply(g, f)?;
        let left = compose(&transpose(target, f.dst, g.dst)?, &p)?;
        let right = compose(&q, &transpose(target, f.src, g.src)?)?;
        report.record(left == right, exhaustive, || format!("σ P({f}, {g}) vs P({g}, {f})"));
        Ok(())
    };
    for (a, b) in (0..=cap).flat_map(|a| (0..=cap).map(move |b| (a, b))) {
        for (theory, is_left) in [(s, true), (t, false)] {
            let (fs, exhaustive) = match enumerate_bounded(theory, a, b, None, DEFAULT_HOM_LIMIT)? {
                Some(all) => (all, true),
                None => {
                    let mut v = Vec::new();
                    for _ in 0..samples {
                        v.extend(sample_fmor(theory, a, b, &mut rng)?);
                    }
                    (v, false)
                }
            };
            for f in &fs {
                for n in 0..=cap {
                    let other = if is_left { t } else { s };
                    let id = FMor::identity(other, n)?;
                    if is_left {
                        check(f, &id, exhaustive, &mut report)?;
                    } else {
                        check(&id, f, exhaustive, &mut report)?;
                    }
                }
            }
        }
    }
    for _ in 0..samples {
        let dims: Vec<usize> = (0..4).map(|_| rng.gen_range(0..=cap)).collect();
        let (Some(f), Some(g)) =
            (sample_fmor(s, dims[0], dims[1], &mut rng)?, sample_fmor(t, dims[2], dims[3], &mut rng)?)
        else {
            continue;
        };
        check(&f, &g, false, &mut report)?;
    }
    Ok(report)
}

/// The associativity interchange for `(S, T, V)`: both bracketings of the
/// trilinear map agree after the associator, and equal the composite of
/// `f × id × id`, `id × g × id`, `id × id × h` in every order.
pub fn check_associativity(
    s: &Theory,
    t: &Theory,
    v: &Theory,
    cap: usize,
    samples: usize,
    seed: u64,
) -> Result<DiagramReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tv = kronecker(t, v)?;
    let s_tv = kronecker(s, &tv.combined)?;
    let st = kronecker(s, t)?;
    let st_v = kronecker(&st.combined, v)?;
    let mut assignment = BTreeMap::new();
    for o in s.signature().ops() {
        assignment
            .insert(st_v.left_name(&st.left_name(&o.name)), Term::app(&s_tv.left_name(&o.name), Term::vars(o.arity)));
    }
    for o in t.signature().ops() {
        assignment.insert(
            st_v.left_name(&st.right_name(&o.name)),
            Term::app(&s_tv.right_name(&tv.left_name(&o.name)), Term::vars(o.arity)),
        );
    }
    for o in v.signature().ops() {
        assignment.insert(
            st_v.right_name(&o.name),
            Term::app(&s_tv.right_name(&tv.right_name(&o.name)), Term::vars(o.arity)),
        );
    }
    let alpha = TheoryMorphism::new(&st_v.combined, &s_tv.combined, assignment)?;
    let (w_tv, w_s_tv, w_st, w_st_v) =
        (BilinearWitness::new(tv), BilinearWitness::new(s_tv), BilinearWitness::new(st), BilinearWitness::new(st_v));
    let mut report = DiagramReport::new("associativity", &[s, t, v], format!("arity ≤ {cap}, {samples} samples"));
    for _ in 0..samples {
        let d: Vec<usize> = (0..6).map(|_| rng.gen_range(0..=cap)).collect();
        let (Some(f), Some(g), Some(h)) = (
            sample_fmor(s, d[0], d[1], &mut rng)?,
            sample_fmor(t, d[2], d[3], &mut rng)?,
            sample_fmor(v, d[4], d[5], &mut rng)?,
        ) else {
            continue;
        };
        let right = w_s_tv.apply(&f, &w_tv.apply(&g, &h)?)?;
        let left = alpha.apply(&w_st_v.apply(&w_st.apply(&f, &g)?, &h)?)?;
        let mut ok = left == right;
        // step k moves coordinate k from source to target arity
        let step = |k: usize, dims: [usize; 3]| -> Result<FMor> {
            let id = |th: &Theory, n| FMor::identity(th, n);
            match k {
                0 => w_s_tv.apply(&f, &id(&w_tv.theory.combined, dims[1] * dims[2])?),
                1 => w_s_tv.apply(&id(s, dims[0])?, &w_tv.apply(&g, &id(v, dims[2])?)?),
                _ => w_s_tv.apply(&id(s, dims[0])?, &w_tv.apply(&id(t, dims[1])?, &h)?),
            }
        };
        let ends = [(f.src, f.dst), (g.src, g.dst), (h.src, h.dst)];
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let mut dims = [f.src, g.src, h.src];
            let mut acc = FMor::identity(&w_s_tv.theory.combined, dims.iter().product())?;
            for k in order {
                let m = step(k, dims)?;
                acc = compose(&m, &acc)?;
                dims[k] = ends[k].1;
            }
            ok &= acc == right;
        }
        report.record(ok, false, || format!("({f}, {g}, {h})"));
    }
    Ok(report)
}

/// All diagrams for one to three theories.
#[derive(Clone, Debug, Serialize)]
pub struct CoherenceReport {
    pub theories: Vec<String>,
    pub cap: usize,
    pub samples: usize,
    pub seed: u64,
    pub diagrams: Vec<DiagramReport>,
}

impl CoherenceReport {
    pub fn failures(&self) -> usize {
        self.diagrams.iter().map(|d| d.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

pub fn check_coherence(theories: &[Theory], cap: usize, samples: usize, seed: u64) -> Result<CoherenceReport> {
    if theories.is_empty() || theories.len() > 3 {
        return Err(Error::Invalid(format!("expected 1 to 3 theories, got {}", theories.len())));
    }
    let mut diagrams = Vec::new();
    for th in theories {
        diagrams.push(check_m1_module(th, cap)?);
        diagrams.push(check_unit_coherence(th, cap, samples, seed)?);
    }
    for i in 0..theories.len() {
        for j in i + 1..theories.len() {
            diagrams.push(check_symmetry_square(&theories[i], &theories[j], cap, samples, seed)?);
        }
    }
    if let [s, t, v] = theories {
        diagrams.push(check_associativity(s, t, v, cap, samples, seed)?);
    }
    Ok(CoherenceReport {
        theories: theories.iter().map(|t| t.name().to_string()).collect(),
        cap,
        samples,
        seed,
        diagrams,
    })
}
