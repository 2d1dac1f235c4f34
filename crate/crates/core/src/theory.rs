//! The category of finitely generated free models of a theory.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::backend::Backend;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::rewrite::{complete, CompletionBounds, Kbo};
use crate::term::{Equation, Presentation, Signature, Term};

/// Default guard on the number of morphisms a hom-set enumeration may produce.
pub const DEFAULT_HOM_CAP: usize = 100_000;

/// Where a theory came from; drives the choice of product backends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Sets,
    Boole,
    Cantor(usize),
    Groups,
    Ab,
    Mod(u64),
    GSets(FiniteGroup),
    Rings,
    Kronecker,
    User,
}

#[derive(Debug)]
struct TheoryData {
    presentation: Presentation,
    backend: Backend,
    family: Family,
}

/// A presentation together with a decision procedure for its free models.
#[derive(Clone)]
pub struct Theory(Arc<TheoryData>);

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theory({}, {})", self.name(), self.backend().kind())
    }
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.name() == other.name() && self.presentation() == other.presentation())
    }
}

impl Theory {
    pub fn new(presentation: Presentation, backend: Backend, family: Family) -> Self {
        Theory(Arc::new(TheoryData { presentation, backend, family }))
    }

    /// A theory from a user presentation: the free term algebra when there are
    /// no equations, otherwise a completed rewriting system when bounded
    /// completion succeeds.
    pub fn from_presentation(p: Presentation, bounds: CompletionBounds) -> Self {
        let backend = if p.equations.is_empty() {
            free_backend(&p.signature)
        } else {
            let report = complete(&p, &Kbo::for_signature(&p.signature), bounds);
            if report.is_complete() {
                Backend::Trs(report.system(bounds.step_budget))
            } else {
                Backend::Undecided(format!(
                    "{}: completion did not succeed ({})",
                    p.name,
                    report.message.as_deref().unwrap_or("unknown reason")
                ))
            }
        };
        Theory::new(p, backend, Family::User)
    }

    pub fn name(&self) -> &str {
        &self.0.presentation.name
    }

    pub fn presentation(&self) -> &Presentation {
        &self.0.presentation
    }

    pub fn signature(&self) -> &Signature {
        &self.0.presentation.signature
    }

    pub fn backend(&self) -> &Backend {
        &self.0.backend
    }

    pub fn family(&self) -> &Family {
        &self.0.family
    }

    /// The same theory with every rewriting budget replaced.
    pub fn with_step_budget(&self, budget: usize) -> Theory {
        Theory::new(self.presentation().clone(), set_budget(self.backend(), budget), self.family().clone())
    }

    /// Canonical form of `t` over context `n`.
    pub fn normalize(&self, t: &Term, n: usize) -> Result<Term> {
        t.check(self.signature(), n)?;
        self.backend().normalize(t, n)
    }

    pub fn equal(&self, a: &Term, b: &Term, n: usize) -> Result<bool> {
        Ok(self.normalize(a, n)? == self.normalize(b, n)?)
    }

    pub fn proves(&self, eq: &Equation) -> Result<bool> {
        self.equal(&eq.left, &eq.right, eq.context)
    }

    /// Whether `x1 = x2` holds, i.e. every model has at most one element.
    pub fn is_degenerate(&self) -> Result<bool> {
        self.equal(&Term::Var(1), &Term::Var(2), 2)
    }

    /// Distinct elements of the free model on `n` generators that have a
    /// representative of size at most `bound`, by increasing minimal size.
    pub fn elements_up_to(&self, n: usize, bound: usize, cap: usize) -> Result<ElementList> {
        let sig = self.signature();
        let mut seen: HashSet<Term> = HashSet::new();
        let mut levels: Vec<Vec<Term>> = vec![Vec::new()];
        let mut all = Vec::new();
        let mut sizes = Vec::new();
        let mut push = |t: Term, s: usize, level: &mut Vec<Term>, all: &mut Vec<Term>| -> Result<()> {
            if seen.insert(t.clone()) {
                if all.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                level.push(t.clone());
                all.push(t);
                sizes.push(s);
            }
            Ok(())
        };
        for s in 1..=bound {
            let mut level = Vec::new();
            if s == 1 {
                for v in Term::vars(n) {
                    let t = self.backend().normalize(&v, n)?;
                    push(t, 1, &mut level, &mut all)?;
                }
                for c in sig.constants() {
                    let t = self.backend().normalize(&Term::constant(&c.name), n)?;
                    push(t, 1, &mut level, &mut all)?;
                }
            } else {
                for op in sig.ops().iter().filter(|o| o.arity > 0 && o.arity < s) {
                    for parts in compositions(s - 1, op.arity) {
                        let pools: Vec<&Vec<Term>> = parts.iter().map(|&p| &levels[p]).collect();
                        if pools.iter().any(|p| p.is_empty()) {
                            continue;
                        }
                        let mut idx = vec![0usize; op.arity];
                        loop {
                            let args = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                            let t = self.backend().normalize(&Term::app(&op.name, args), n)?;
                            push(t, s, &mut level, &mut all)?;
                            if !advance(&mut idx, &pools.iter().map(|p| p.len()).collect::<Vec<_>>()) {
                                break;
                            }
                        }
                    }
                }
            }
            levels.push(level);
        }
        let complete = match self.backend().elements(n, cap.max(all.len())) {
            Ok(Some(full)) => full.len() == all.len(),
            _ => false,
        };
        Ok(ElementList { elements: all, sizes, complete })
    }

    /// Elements of the free model on `n` generators: every element when the
    /// bound is `None` (finite free models only), otherwise those of size ≤ bound.
    pub fn elements(&self, n: usize, bound: Option<usize>, cap: usize) -> Result<ElementList> {
        match bound {
            Some(b) => self.elements_up_to(n, b, cap),
            None => match self.backend().elements(n, cap)? {
                Some(elements) => {
                    let sizes = elements.iter().map(Term::size).collect();
                    Ok(ElementList { elements, sizes, complete: true })
                }
                None => Err(Error::InfiniteHomSet),
            },
        }
    }
}

fn free_backend(sig: &Signature) -> Backend {
    Backend::Free {
        constants: sig.constants().map(|c| crate::term::Op::from(c.name.as_str())).collect(),
        operations: sig.ops().iter().any(|o| o.arity > 0),
    }
}

fn set_budget(b: &Backend, budget: usize) -> Backend {
    match b {
        Backend::Trs(trs) => {
            let mut trs = trs.clone();
            trs.set_step_budget(budget);
            Backend::Trs(trs)
        }
        Backend::Action { inner, action } => {
            Backend::Action { inner: Box::new(set_budget(inner, budget)), action: action.clone() }
        }
        other => other.clone(),
    }
}

/// Result of an element enumeration; `complete` means the whole free model was reached.
#[derive(Clone, Debug)]
pub struct ElementList {
    pub elements: Vec<Term>,
    pub sizes: Vec<usize>,
    pub complete: bool,
}

/// Ordered ways of writing `total` as `parts` positive summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Odometer step over `idx` with per-digit limits; false after the last tuple.
pub(crate) fn advance(idx: &mut [usize], limits: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < limits[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// A morphism `T_src → T_dst`: `src` normal-form terms over `x_1..x_dst`.
#[derive(Clone)]
pub struct FMor {
    theory: Theory,
    pub src: usize,
    pub dst: usize,
    components: Vec<Term>,
}

impl PartialEq for FMor {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.dst == other.dst && self.components == other.components
    }
}

impl Eq for FMor {}

impl std::hash::Hash for FMor {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.src, self.dst, &self.components).hash(state);
    }
}

impl fmt::Debug for FMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self.components.iter().map(|t| t.to_string()).collect();
        write!(f, "({}) : T{} -> T{}", comps.join(", "), self.src, self.dst)
    }
}

impl Serialize for FMor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FMor", 3)?;
        st.serialize_field("src", &self.src)?;
        st.serialize_field("dst", &self.dst)?;
        st.serialize_field("components", &self.components)?;
        st.end()
    }
}

impl FMor {
    /// Checks and normalizes the components.
    pub fn new(theory: &Theory, src: usize, dst: usize, components: Vec<Term>) -> Result<FMor> {
        if components.len() != src {
            return Err(Error::MorphismMismatch(format!("{} components for source T{src}", components.len())));
        }
        let components = components.iter().map(|t| theory.normalize(t, dst)).collect::<Result<Vec<_>>>()?;
        Ok(FMor { theory: theory.clone(), src, dst, components })
    }

    pub(crate) fn from_normal(theory: &Theory, dst: usize, components: Vec<Term>) -> FMor {
        FMor { theory: theory.clone(), src: components.len(), dst, components }
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn components(&self) -> &[Term] {
        &self.components
    }

    pub fn identity(theory: &Theory, n: usize) -> Result<FMor> {
        FMor::new(theory, n, n, Term::vars(n))
    }

    pub fn is_identity(&self) -> Result<bool> {
        Ok(self.src == self.dst && *self == FMor::identity(&self.theory, self.src)?)
    }

    /// `g ∘ f` for `f: T_l → T_m` and `g = self: T_m → T_n`.
    pub fn compose(&self, f: &FMor) -> Result<FMor> {
        compose(self, f)
    }
}

fn same_theory(a: &FMor, b: &FMor) -> Result<()> {
    if a.theory != b.theory {
        return Err(Error::MorphismMismatch(format!("morphisms of {} and {}", a.theory.name(), b.theory.name())));
    }
    Ok(())
}

/// `g ∘ f` for `f: T_l → T_m`, `g: T_m → T_n`; component `i` is `f_i[g]`.
pub fn compose(g: &FMor, f: &FMor) -> Result<FMor> {
    same_theory(g, f)?;
    if f.dst != g.src {
        return Err(Error::MorphismMismatch(format!(
            "cannot compose T{} -> T{} after T{} -> T{}",
            g.src, g.dst, f.src, f.dst
        )));
    }
    let comps = f
        .components
        .iter()
        .map(|t| g.theory.backend().normalize(&t.substitute(&g.components)?, g.dst))
        .collect::<Result<Vec<_>>>()?;
    Ok(FMor::from_normal(&g.theory, g.dst, comps))
}

/// Block sum `f ⊕ g: T_{m+p} → T_{n+q}`.
pub fn coproduct(f: &FMor, g: &FMor) -> Result<FMor> {
    same_theory(f, g)?;
    let mut comps = f.components.clone();
    comps.extend(g.components.iter().map(|t| t.shift_vars(f.dst)));
    Ok(FMor::from_normal(&f.theory, f.dst + g.dst, comps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Inclusion of `T_n` (left) or `T_m` (right) into `T_{n+m}`.
pub fn injection(theory: &Theory, n: usize, m: usize, side: Side) -> Result<FMor> {
    let comps = match side {
        Side::Left => Term::vars(n),
        Side::Right => (n + 1..=n + m).map(Term::Var).collect(),
    };
    FMor::new(theory, comps.len(), n + m, comps)
}

/// The block swap `T_{n+m} → T_{m+n}`.
pub fn symmetry(theory: &Theory, n: usize, m: usize) -> Result<FMor> {
    let comps = (1..=n).map(|i| Term::Var(m + i)).chain((1..=m).map(Term::Var)).collect();
    FMor::new(theory, n + m, n + m, comps)
}

/// Morphisms `T_m → T_n` whose components have a representative of size ≤ `bound`
/// (all of them when `bound` is `None`), in lexicographic order of components.
pub fn hom_enumerate(theory: &Theory, m: usize, n: usize, bound: Option<usize>, cap: usize) -> Result<Vec<FMor>> {
    let els = theory.elements(n, bound, cap)?;
    let k = els.elements.len();
    let total = (k as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::CapExceeded(cap));
    }
    let mut out = Vec::with_capacity(total as usize);
    if m > 0 && k == 0 {
        return Ok(out);
    }
    let mut idx = vec![0usize; m];
    let limits = vec![k; m];
    loop {
        let comps = idx.iter().map(|&i| els.elements[i].clone()).collect();
        out.push(FMor::from_normal(theory, n, comps));
        if !advance(&mut idx, &limits) {
            break;
        }
    }
    Ok(out)
}

/// Outcome of an inverse search.
#[derive(Clone, Debug)]
pub enum IsoSearch {
    Inverse(FMor),
    /// Exhaustive search shows there is no inverse.
    NotInvertible(String),
    /// Nothing found among candidates of bounded size.
    NotFound {
        term_bound: usize,
    },
}

impl IsoSearch {
    pub fn inverse(&self) -> Option<&FMor> {
        match self {
            IsoSearch::Inverse(g) => Some(g),
            _ => None,
        }
    }
}

/// Searches for a two-sided inverse of `f: T_p → T_q` among morphisms whose
/// components have size ≤ `bound` (or all morphisms when `bound` is `None`).
pub fn is_iso(f: &FMor, bound: Option<usize>, cap: usize) -> Result<IsoSearch> {
    let theory = &f.theory;
    let (p, q) = (f.src, f.dst);
    if f.is_identity()? {
        return Ok(IsoSearch::Inverse(f.clone()));
    }
    let degenerate = theory.is_degenerate()?;
    if !degenerate {
        let used: std::collections::BTreeSet<usize> = f.components.iter().flat_map(|t| t.var_set()).collect();
        if let Some(v) = (1..=q).find(|v| !used.contains(v)) {
            return Ok(IsoSearch::NotInvertible(format!("x{v} does not occur in any component")));
        }
    }
    let els = theory.elements(p, bound, cap)?;
    let mut candidates: Vec<Vec<&Term>> = Vec::with_capacity(q);
    for j in 1..=q {
        let target = theory.backend().normalize(&Term::Var(j), q)?;
        let mut cj = Vec::new();
        for s in &els.elements {
            let image = theory.backend().normalize(&s.substitute(&f.components)?, q)?;
            if image == target {
                cj.push(s);
            }
        }
        if cj.is_empty() {
            return Ok(give_up(&els, bound, format!("no candidate for component {j}")));
        }
        candidates.push(cj);
    }
    let id_p = FMor::identity(theory, p)?;
    let limits: Vec<usize> = candidates.iter().map(Vec::len).collect();
    let mut idx = vec![0usize; q];
    loop {
        let comps: Vec<Term> = idx.iter().zip(&candidates).map(|(&i, c)| c[i].clone()).collect();
        let g = FMor::from_normal(theory, p, comps);
        if compose(&g, f)? == id_p {
            let id_q = FMor::identity(theory, q)?;
            if compose(f, &g)? != id_q {
                return Err(Error::CheckFailed(format!("inverse candidate {g} is one-sided")));
            }
            return Ok(IsoSearch::Inverse(g));
        }
        if q == 0 || !advance(&mut idx, &limits) {
            break;
        }
    }
    Ok(give_up(&els, bound, "no candidate tuple is a two-sided inverse".into()))
}

fn give_up(els: &ElementList, bound: Option<usize>, why: String) -> IsoSearch {
    match bound {
        Some(b) if !els.complete => IsoSearch::NotFound { term_bound: b },
        _ => IsoSearch::NotInvertible(why),
    }
}

/// An interpretation of each source operation as a target term.
#[derive(Clone, Debug)]
pub struct TheoryMorphism {
    pub source: Theory,
    pub target: Theory,
    pub assignment: BTreeMap<String, Term>,
}

/// Verdict of [`check_theory_morphism`].
#[derive(Clone, Debug, Serialize)]
pub struct MorphismVerdict {
    pub valid: bool,
    pub violated: Option<Equation>,
    pub translated: Option<(Term, Term)>,
}

impl TheoryMorphism {
    /// Checks that each source operation of arity `k` gets a target term over `x_1..x_k`.
    pub fn new(source: &Theory, target: &Theory, assignment: BTreeMap<String, Term>) -> Result<Self> {
        for op in source.signature().ops() {
            let image = assignment
                .get(&*op.name)
                .ok_or_else(|| Error::MorphismMismatch(format!("no image for `{}`", op.name)))?;
            image.check(target.signature(), op.arity)?;
        }
        if let Some(extra) = assignment.keys().find(|k| !source.signature().contains(k)) {
            return Err(Error::UnknownOp(extra.clone()));
        }
        Ok(TheoryMorphism { source: source.clone(), target: target.clone(), assignment })
    }

    /// Sends each source operation to the target operation of the same name.
    pub fn by_name(source: &Theory, target: &Theory) -> Result<Self> {
        let assignment = source
            .signature()
            .ops()
            .iter()
            .map(|o| (o.name.to_string(), Term::app(&o.name, Term::vars(o.arity))))
            .collect();
        Self::new(source, target, assignment)
    }

    pub fn translate(&self, t: &Term) -> Result<Term> {
        t.translate(&|op| self.assignment.get(op).cloned())
    }

    /// The induced functor on free models.
    pub fn apply(&self, f: &FMor) -> Result<FMor> {
        let comps = f.components.iter().map(|t| self.translate(t)).collect::<Result<Vec<_>>>()?;
        FMor::new(&self.target, f.src, f.dst, comps)
    }
}

/// Valid iff every translated source equation holds in the target.
pub fn check_theory_morphism(l: &TheoryMorphism) -> Result<MorphismVerdict> {
    for eq in &l.source.presentation().equations {
        let left = l.translate(&eq.left)?;
        let right = l.translate(&eq.right)?;
        if !l.target.equal(&left, &right, eq.context)? {
            return Ok(MorphismVerdict { valid: false, violated: Some(eq.clone()), translated: Some((left, right)) });
        }
    }
    Ok(MorphismVerdict { valid: true, violated: None, translated: None })
}

/// Equality of theory morphisms: agreement on every generating operation.
pub fn theory_morphisms_equal(a: &TheoryMorphism, b: &TheoryMorphism) -> Result<bool> {
    if a.source != b.source || a.target != b.target {
        return Err(Error::MorphismMismatch("different source or target".into()));
    }
    for op in a.source.signature().ops() {
        if !a.target.equal(&a.assignment[&*op.name], &b.assignment[&*op.name], op.arity)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random term over `x_1..x_n` with at most `max_size` nodes; `None` when
/// the free model on `n` generators has no terms at all.
pub fn random_term(theory: &Theory, n: usize, max_size: usize, rng: &mut impl Rng) -> Option<Term> {
    let sig = theory.signature();
    let leaves: Vec<Term> = Term::vars(n).into_iter().chain(sig.constants().map(|c| Term::constant(&c.name))).collect();
    if leaves.is_empty() {
        return None;
    }
    let ops: Vec<_> = sig.ops().iter().filter(|o| o.arity > 0).collect();
    fn go(budget: usize, leaves: &[Term], ops: &[&crate::term::OpDecl], rng: &mut impl Rng) -> Term {
        let fitting: Vec<_> = ops.iter().filter(|o| o.arity < budget).collect();
        if !fitting.is_empty() && rng.gen_bool(0.6) {
            let op = fitting[rng.gen_range(0..fitting.len())];
            let mut rest = budget - 1 - op.arity;
            let args = (0..op.arity)
                .map(|_| {
                    let extra = if rest > 0 { rng.gen_range(0..=rest) } else { 0 };
                    rest -= extra;
                    go(1 + extra, leaves, ops, rng)
                })
                .collect();
            return Term::app(&op.name, args);
        }
        leaves[rng.gen_range(0..leaves.len())].clone()
    }
    Some(go(max_size.max(1), &leaves, &ops, rng))
}

/// A random morphism `T_m → T_n`.
pub fn random_fmor(theory: &Theory, m: usize, n: usize, max_size: usize, rng: &mut impl Rng) -> Result<FMor> {
    let comps = (0..m)
        .map(|_| random_term(theory, n, max_size, rng))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Invalid(format!("no terms over {n} variables in {}", theory.name())))?;
    FMor::new(theory, m, n, comps)
}
