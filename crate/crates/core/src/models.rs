//! Finite models: checking, enumeration with propagation, homomorphisms,
//! products and abelian group objects.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::catalogue::ab_theory;
use crate::error::{Error, Result};
use crate::term::{Equation, Signature, Term};
use crate::theory::{advance, Theory};

/// Default carrier bound for exhaustive enumeration.
pub const DEFAULT_MAX_CARRIER: usize = 4;
const UNKNOWN: u16 = u16::MAX;

/// Term with operations resolved to signature positions.
#[derive(Clone, Debug)]
enum CTerm {
    Var(usize),
    App(usize, Vec<CTerm>),
}

fn compile(t: &Term, sig: &Signature) -> Result<CTerm> {
    match t {
        Term::Var(i) => Ok(CTerm::Var(*i - 1)),
        Term::App(op, args) => {
            let idx = sig.position(op).ok_or_else(|| Error::UnknownOp(op.to_string()))?;
            Ok(CTerm::App(idx, args.iter().map(|a| compile(a, sig)).collect::<Result<_>>()?))
        }
    }
}

fn cell_index(k: usize, args: &[u16]) -> usize {
    args.iter().fold(0, |acc, &a| acc * k + a as usize)
}

/// A finite model on carrier `{0, …, size-1}`; `tables[i]` is the table of the
/// `i`-th operation, indexed row-major with the first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteModel {
    pub theory: String,
    pub size: usize,
    pub ops: Vec<(String, usize)>,
    pub tables: Vec<Vec<u16>>,
}

/// First equation instance that fails, if any.
#[derive(Clone, Debug, Serialize)]
pub struct ModelVerdict {
    pub valid: bool,
    pub violated: Option<Equation>,
    pub assignment: Option<Vec<usize>>,
}

impl FiniteModel {
    /// Validates table shapes and every equation.
    pub fn new(theory: &Theory, size: usize, tables: Vec<Vec<u16>>) -> Result<FiniteModel> {
        let model = Self::unchecked(theory, size, tables)?;
        let verdict = model.check(theory)?;
        match verdict.violated {
            None => Ok(model),
            Some(eq) => {
                Err(Error::CheckFailed(format!("equation {eq} fails at {:?}", verdict.assignment.unwrap_or_default())))
            }
        }
    }

    fn unchecked(theory: &Theory, size: usize, tables: Vec<Vec<u16>>) -> Result<FiniteModel> {
        let sig = theory.signature();
        if tables.len() != sig.len() {
            return Err(Error::Invalid(format!("{} tables for {} operations", tables.len(), sig.len())));
        }
        for (op, table) in sig.ops().iter().zip(&tables) {
            let cells = size.checked_pow(op.arity as u32).unwrap_or(usize::MAX);
            if table.len() != cells || table.iter().any(|&v| v as usize >= size) {
                return Err(Error::Invalid(format!("table of `{}` has the wrong shape", op.name)));
            }
        }
        Ok(FiniteModel {
            theory: theory.name().to_string(),
            size,
            ops: sig.ops().iter().map(|o| (o.name.clone(), o.arity)).collect(),
            tables,
        })
    }

    pub fn apply(&self, op: usize, args: &[u16]) -> u16 {
        self.tables[op][cell_index(self.size, args)]
    }

    fn eval_c(&self, t: &CTerm, env: &[u16]) -> u16 {
        match t {
            CTerm::Var(i) => env[*i],
            CTerm::App(op, args) => {
                let vals: Vec<u16> = args.iter().map(|a| self.eval_c(a, env)).collect();
                self.apply(*op, &vals)
            }
        }
    }

    fn op_position(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|(o, _)| o == name)
    }

    /// Value of `t` under `env` (`x_i ↦ env[i-1]`).
    pub fn eval(&self, t: &Term, env: &[u16]) -> Result<u16> {
        match t {
            Term::Var(i) => env.get(i - 1).copied().ok_or(Error::VarOutOfRange { var: *i, context: env.len() }),
            Term::App(op, args) => {
                let idx = self.op_position(op).ok_or_else(|| Error::UnknownOp(op.to_string()))?;
                let vals = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>>>()?;
                Ok(self.apply(idx, &vals))
            }
        }
    }

    /// Checks every equation of `theory` at every assignment.
    pub fn check(&self, theory: &Theory) -> Result<ModelVerdict> {
        let sig = theory.signature();
        for eq in &theory.presentation().equations {
            let (l, r) = (compile(&eq.left, sig)?, compile(&eq.right, sig)?);
            if let Some(env) = self.first_failure(&l, &r, eq.context) {
                return Ok(ModelVerdict {
                    valid: false,
                    violated: Some(eq.clone()),
                    assignment: Some(env.into_iter().map(usize::from).collect()),
                });
            }
        }
        Ok(ModelVerdict { valid: true, violated: None, assignment: None })
    }

    /// Whether `eq` holds at every assignment; returns a failing assignment otherwise.
    pub fn satisfies(&self, eq: &Equation, sig: &Signature) -> Result<Option<Vec<usize>>> {
        let (l, r) = (compile(&eq.left, sig)?, compile(&eq.right, sig)?);
        Ok(self.first_failure(&l, &r, eq.context).map(|e| e.into_iter().map(usize::from).collect()))
    }

    fn first_failure(&self, l: &CTerm, r: &CTerm, context: usize) -> Option<Vec<u16>> {
        if self.size == 0 {
            return None;
        }
        let mut idx = vec![0usize; context];
        let limits = vec![self.size; context];
        loop {
            let env: Vec<u16> = idx.iter().map(|&v| v as u16).collect();
            if self.eval_c(l, &env) != self.eval_c(r, &env) {
                return Some(env);
            }
            if !advance(&mut idx, &limits) {
                return None;
            }
        }
    }

    /// The model with its carrier relabelled by `perm` (old element `i` becomes `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> FiniteModel {
        let k = self.size;
        let mut inverse = vec![0; k];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let tables = self
            .ops
            .iter()
            .zip(&self.tables)
            .map(|((_, arity), table)| {
                let cells = k.pow(*arity as u32);
                (0..cells)
                    .map(|c| {
                        let mut args = vec![0u16; *arity];
                        let mut rest = c;
                        for slot in args.iter_mut().rev() {
                            *slot = inverse[rest % k] as u16;
                            rest /= k;
                        }
                        perm[table[cell_index(k, &args)] as usize] as u16
                    })
                    .collect()
            })
            .collect();
        FiniteModel { tables, ..self.clone() }
    }
}

pub fn check_model(theory: &Theory, size: usize, tables: Vec<Vec<u16>>) -> Result<ModelVerdict> {
    FiniteModel::unchecked(theory, size, tables)?.check(theory)
}

enum Val {
    Known(u16),
    /// The whole side is one unassigned cell with known arguments.
    Pending(usize),
    /// Evaluation stops at this unassigned cell further inside.
    Blocked(usize),
}

/// Backtracking over table cells; every equation instance watches the cell
/// that currently blocks its evaluation.
struct Search {
    k: usize,
    /// First flat cell id of each operation.
    offset: Vec<usize>,
    /// Operation of each flat cell.
    owner: Vec<usize>,
    cells: Vec<u16>,
    equations: Vec<(CTerm, CTerm)>,
    instances: Vec<(usize, Vec<u16>)>,
    watch: Vec<Vec<u32>>,
    watch_trail: Vec<usize>,
    /// Watching instances whose other side was already known.
    anchored: Vec<u32>,
    anchored_trail: Vec<usize>,
    trail: Vec<usize>,
    rank: Vec<usize>,
}

impl Search {
    fn eval(&self, t: &CTerm, env: &[u16]) -> Val {
        match t {
            CTerm::Var(i) => Val::Known(env[*i]),
            CTerm::App(op, args) => {
                let mut idx = 0;
                for a in args {
                    match self.eval(a, env) {
                        Val::Known(v) => idx = idx * self.k + v as usize,
                        Val::Pending(c) | Val::Blocked(c) => return Val::Blocked(c),
                    }
                }
                let cell = self.offset[*op] + idx;
                match self.cells[cell] {
                    UNKNOWN => Val::Pending(cell),
                    v => Val::Known(v),
                }
            }
        }
    }

    fn assign(&mut self, cell: usize, v: u16, queue: &mut Vec<usize>) {
        self.cells[cell] = v;
        self.trail.push(cell);
        queue.push(cell);
    }

    fn add_watch(&mut self, cell: usize, inst: usize) {
        self.watch[cell].push(inst as u32);
        self.watch_trail.push(cell);
    }

    fn check(&mut self, inst: usize, queue: &mut Vec<usize>) -> bool {
        let (eq, env) = &self.instances[inst];
        let (l, r) = &self.equations[*eq];
        let (lv, rv) = (self.eval(l, env), self.eval(r, env));
        match (lv, rv) {
            (Val::Known(a), Val::Known(b)) => a == b,
            (Val::Known(a), Val::Pending(c)) | (Val::Pending(c), Val::Known(a)) => {
                self.assign(c, a, queue);
                true
            }
            (Val::Pending(c1) | Val::Blocked(c1), Val::Pending(c2) | Val::Blocked(c2)) => {
                self.add_watch(c1, inst);
                if c1 != c2 {
                    self.add_watch(c2, inst);
                }
                true
            }
            (Val::Blocked(c), Val::Known(_)) | (Val::Known(_), Val::Blocked(c)) => {
                self.add_watch(c, inst);
                self.anchored[c] += 1;
                self.anchored_trail.push(c);
                true
            }
        }
    }

    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        while let Some(cell) = queue.pop() {
            let mut i = 0;
            while i < self.watch[cell].len() {
                let inst = self.watch[cell][i] as usize;
                if !self.check(inst, &mut queue) {
                    return false;
                }
                i += 1;
            }
        }
        true
    }

    fn undo(&mut self, trail: usize, watch_trail: usize, anchored_trail: usize) {
        for cell in self.anchored_trail.drain(anchored_trail..) {
            self.anchored[cell] -= 1;
        }
        for cell in self.trail.drain(trail..) {
            self.cells[cell] = UNKNOWN;
        }
        for cell in self.watch_trail.drain(watch_trail..) {
            self.watch[cell].pop();
        }
    }

    /// Unassigned cell of lowest arity that blocks the most instances.
    fn next_cell(&self, arity: &[usize]) -> Option<usize> {
        (0..self.cells.len()).filter(|&c| self.cells[c] == UNKNOWN).min_by_key(|&c| {
            let (a, w) = (self.anchored[c], self.watch[c].len());
            (std::cmp::Reverse(a), std::cmp::Reverse(w), arity[self.owner[c]], self.rank[c])
        })
    }

    fn run(&mut self, arity: &[usize], visit: &mut dyn FnMut(&[u16]) -> ControlFlow<()>) -> ControlFlow<()> {
        let Some(cell) = self.next_cell(arity) else {
            return visit(&self.cells);
        };
        for v in 0..self.k as u16 {
            let (t, w, a) = (self.trail.len(), self.watch_trail.len(), self.anchored_trail.len());
            let mut queue = Vec::new();
            self.assign(cell, v, &mut queue);
            let flow = if self.propagate(queue) { self.run(arity, visit) } else { ControlFlow::Continue(()) };
            self.undo(t, w, a);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Visits every model of `theory` on a `k`-element carrier, in a deterministic
/// order, until the visitor breaks. Returns the number of models visited.
pub fn for_each_model(
    theory: &Theory,
    k: usize,
    mut visit: impl FnMut(&FiniteModel) -> ControlFlow<()>,
) -> Result<usize> {
    let sig = theory.signature();
    if k >= UNKNOWN as usize {
        return Err(Error::Invalid(format!("carrier of size {k} is too large")));
    }
    if k == 0 {
        if sig.constants().next().is_some() {
            return Ok(0);
        }
        let tables = sig.ops().iter().map(|_| Vec::new()).collect();
        let m = FiniteModel::unchecked(theory, 0, tables)?;
        let _ = visit(&m);
        return Ok(1);
    }
    let arity: Vec<usize> = sig.ops().iter().map(|o| o.arity).collect();
    let sizes: Vec<usize> = arity.iter().map(|&a| k.pow(a as u32)).collect();
    let offset: Vec<usize> = sizes.iter().scan(0, |acc, &s| Some(std::mem::replace(acc, *acc + s))).collect();
    let total: usize = sizes.iter().sum();
    let owner: Vec<usize> = sizes.iter().enumerate().flat_map(|(op, &s)| std::iter::repeat_n(op, s)).collect();
    let mut ops_order: Vec<usize> = (0..arity.len()).collect();
    ops_order.sort_by_key(|&i| (arity[i] != 0, std::cmp::Reverse(arity[i]), i));
    let mut rank = vec![0; total];
    for (r, c) in ops_order.iter().flat_map(|&op| offset[op]..offset[op] + sizes[op]).enumerate() {
        rank[c] = r;
    }
    let mut equations = Vec::new();
    let mut instances = Vec::new();
    for (e, eq) in theory.presentation().equations.iter().enumerate() {
        equations.push((compile(&eq.left, sig)?, compile(&eq.right, sig)?));
        let mut idx = vec![0usize; eq.context];
        let limits = vec![k; eq.context];
        loop {
            instances.push((e, idx.iter().map(|&v| v as u16).collect()));
            if !advance(&mut idx, &limits) {
                break;
            }
        }
    }
    let mut search = Search {
        k,
        offset: offset.clone(),
        owner,
        cells: vec![UNKNOWN; total],
        equations,
        watch: vec![Vec::new(); total],
        watch_trail: Vec::new(),
        anchored: vec![0; total],
        anchored_trail: Vec::new(),
        trail: Vec::new(),
        rank,
        instances,
    };
    let mut queue = Vec::new();
    let mut consistent = true;
    for inst in 0..search.instances.len() {
        if !search.check(inst, &mut queue) {
            consistent = false;
            break;
        }
    }
    let mut count = 0;
    if consistent && search.propagate(queue) {
        let _ = search.run(&arity, &mut |cells| {
            count += 1;
            let tables = (0..arity.len()).map(|op| cells[offset[op]..offset[op] + sizes[op]].to_vec()).collect();
            let m = FiniteModel {
                theory: theory.name().to_string(),
                size: k,
                ops: sig.ops().iter().map(|o| (o.name.clone(), o.arity)).collect(),
                tables,
            };
            visit(&m)
        });
    }
    Ok(count)
}

/// All models on a `k`-element carrier (labelled structures, not iso classes).
pub fn enumerate_models(theory: &Theory, k: usize, cap: usize) -> Result<Vec<FiniteModel>> {
    let mut out = Vec::new();
    let mut over = false;
    for_each_model(theory, k, |m| {
        if out.len() >= cap {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(m.clone());
        ControlFlow::Continue(())
    })?;
    if over {
        return Err(Error::CapExceeded(cap));
    }
    Ok(out)
}

pub fn count_models(theory: &Theory, k: usize) -> Result<usize> {
    for_each_model(theory, k, |_| ControlFlow::Continue(()))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest relabelling of the tables under all carrier permutations.
pub fn canonical_tables(m: &FiniteModel) -> Vec<Vec<u16>> {
    permutations(m.size).iter().map(|p| m.permuted(p).tables).min().unwrap_or_default()
}

/// Number of isomorphism classes of models on `k` elements (`k ≤ 6`).
pub fn count_up_to_iso(theory: &Theory, k: usize) -> Result<usize> {
    if k > 6 {
        return Err(Error::Invalid("isomorphism classes are only counted for carriers up to 6".into()));
    }
    let mut classes = BTreeSet::new();
    for_each_model(theory, k, |m| {
        classes.insert(canonical_tables(m));
        ControlFlow::Continue(())
    })?;
    Ok(classes.len())
}

/// Maps `h: M → N` commuting with every operation, as value vectors.
pub fn hom_models(m: &FiniteModel, n: &FiniteModel, cap: usize) -> Result<Vec<Vec<u16>>> {
    if m.ops != n.ops {
        return Err(Error::MorphismMismatch("models of different signatures".into()));
    }
    let mut out = Vec::new();
    let mut h = vec![UNKNOWN; m.size];
    let mut over = false;
    let _ = hom_search(m, n, &mut h, &mut |h| {
        if out.len() >= cap {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(h.to_vec());
        ControlFlow::Continue(())
    });
    if over {
        return Err(Error::CapExceeded(cap));
    }
    Ok(out)
}

/// Counts homomorphisms without storing them.
pub fn count_hom_models(m: &FiniteModel, n: &FiniteModel) -> Result<usize> {
    if m.ops != n.ops {
        return Err(Error::MorphismMismatch("models of different signatures".into()));
    }
    let mut count = 0;
    let mut h = vec![UNKNOWN; m.size];
    let _ = hom_search(m, n, &mut h, &mut |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// Propagates `h(f(a)) = f(h(a))`; false on conflict.
fn hom_propagate(m: &FiniteModel, n: &FiniteModel, h: &mut [u16], trail: &mut Vec<usize>) -> bool {
    loop {
        let mut changed = false;
        for (op, (_, arity)) in m.ops.iter().enumerate() {
            let cells = m.size.pow(*arity as u32);
            let mut args = vec![0u16; *arity];
            let mut images = vec![0u16; *arity];
            'cells: for c in 0..cells {
                let mut rest = c;
                for (slot, img) in args.iter_mut().zip(images.iter_mut()).rev() {
                    *slot = (rest % m.size) as u16;
                    rest /= m.size;
                    *img = h[*slot as usize];
                    if *img == UNKNOWN {
                        continue 'cells;
                    }
                }
                let target = n.apply(op, &images);
                let source = m.tables[op][c] as usize;
                match h[source] {
                    UNKNOWN => {
                        h[source] = target;
                        trail.push(source);
                        changed = true;
                    }
                    v if v != target => return false,
                    _ => {}
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn hom_search(
    m: &FiniteModel,
    n: &FiniteModel,
    h: &mut Vec<u16>,
    visit: &mut dyn FnMut(&[u16]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut trail = Vec::new();
    let undo = |h: &mut Vec<u16>, trail: &[usize]| {
        for &i in trail {
            h[i] = UNKNOWN;
        }
    };
    if !hom_propagate(m, n, h, &mut trail) {
        undo(h, &trail);
        return ControlFlow::Continue(());
    }
    let flow = match h.iter().position(|&v| v == UNKNOWN) {
        None => visit(h),
        Some(i) => {
            let mut flow = ControlFlow::Continue(());
            for v in 0..n.size as u16 {
                h[i] = v;
                flow = hom_search(m, n, h, visit);
                h[i] = UNKNOWN;
                if flow.is_break() {
                    break;
                }
            }
            flow
        }
    };
    undo(h, &trail);
    flow
}

/// Componentwise product on carrier pairs `(i, j) ↦ i·|N| + j`.
pub fn product_model(m: &FiniteModel, n: &FiniteModel) -> Result<FiniteModel> {
    if m.ops != n.ops {
        return Err(Error::MorphismMismatch("models of different signatures".into()));
    }
    let size = m.size * n.size;
    let tables = m
        .ops
        .iter()
        .enumerate()
        .map(|(op, (_, arity))| {
            (0..size.pow(*arity as u32))
                .map(|c| {
                    let mut left = vec![0u16; *arity];
                    let mut right = vec![0u16; *arity];
                    let mut rest = c;
                    for k in (0..*arity).rev() {
                        let pair = rest % size;
                        rest /= size;
                        left[k] = (pair / n.size) as u16;
                        right[k] = (pair % n.size) as u16;
                    }
                    m.apply(op, &left) * n.size as u16 + n.apply(op, &right)
                })
                .collect()
        })
        .collect();
    Ok(FiniteModel { theory: m.theory.clone(), size, ops: m.ops.clone(), tables })
}

/// The free model on `r` generators as a finite model, when finite. The
/// generators are elements `0..r`; `elements[i]` is the normal form of element `i`.
pub fn free_model_as_finite(theory: &Theory, r: usize, cap: usize) -> Result<(FiniteModel, Vec<Term>)> {
    let all = theory.backend().elements(r, cap)?.ok_or(Error::InfiniteHomSet)?;
    let mut elements: Vec<Term> = Vec::with_capacity(all.len());
    for v in 1..=r {
        let g = theory.normalize(&Term::Var(v), r)?;
        if !elements.contains(&g) {
            elements.push(g);
        }
    }
    for e in all {
        if !elements.contains(&e) {
            elements.push(e);
        }
    }
    let index: HashMap<&Term, u16> = elements.iter().enumerate().map(|(i, e)| (e, i as u16)).collect();
    let k = elements.len();
    let mut tables = Vec::new();
    for op in theory.signature().ops() {
        let cells = k.pow(op.arity as u32);
        let mut table = Vec::with_capacity(cells);
        for c in 0..cells {
            let mut args = vec![Term::Var(1); op.arity];
            let mut rest = c;
            for slot in args.iter_mut().rev() {
                *slot = elements[rest % k].clone();
                rest /= k;
            }
            let nf = theory.backend().normalize(&Term::app(&op.name, args), r)?;
            let v = *index
                .get(&nf)
                .ok_or_else(|| Error::CheckFailed(format!("{nf} is not among the enumerated elements")))?;
            table.push(v);
        }
        tables.push(table);
    }
    let model = FiniteModel::unchecked(theory, k, tables)?;
    Ok((model, elements))
}

/// An abelian group structure on a model whose operations are homomorphisms.
#[derive(Clone, Debug, Serialize)]
pub struct AbelianObjectWitness {
    pub base: FiniteModel,
    pub add: Vec<u16>,
    pub neg: Vec<u16>,
    pub zero: u16,
}

/// All abelian group objects on `k`-element models of `theory`.
pub fn abelian_group_objects(theory: &Theory, k: usize, cap: usize) -> Result<Vec<AbelianObjectWitness>> {
    if k == 0 {
        return Err(Error::Invalid("abelian group objects need a non-empty carrier".into()));
    }
    let ab = ab_theory();
    let (zero_i, add_i, neg_i) = (
        ab.signature().position("zero").expect("zero"),
        ab.signature().position("add").expect("add"),
        ab.signature().position("neg").expect("neg"),
    );
    let groups = enumerate_models(&ab, k, cap)?;
    let models = enumerate_models(theory, k, cap)?;
    let mut out = Vec::new();
    for m in &models {
        for g in &groups {
            let zero = g.tables[zero_i][0];
            let add = &g.tables[add_i];
            let neg = &g.tables[neg_i];
            if is_abelian_object(m, zero, add, neg) {
                if out.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                out.push(AbelianObjectWitness { base: m.clone(), add: add.clone(), neg: neg.clone(), zero });
            }
        }
    }
    Ok(out)
}

fn is_abelian_object(m: &FiniteModel, zero: u16, add: &[u16], neg: &[u16]) -> bool {
    let k = m.size;
    let plus = |a: u16, b: u16| add[a as usize * k + b as usize];
    for (op, (_, arity)) in m.ops.iter().enumerate() {
        let arity = *arity;
        if m.apply(op, &vec![zero; arity]) != zero {
            return false;
        }
        let cells = k.pow(arity as u32);
        for c in 0..cells {
            let mut a = vec![0u16; arity];
            let mut rest = c;
            for slot in a.iter_mut().rev() {
                *slot = (rest % k) as u16;
                rest /= k;
            }
            let fa = m.apply(op, &a);
            let negs: Vec<u16> = a.iter().map(|&x| neg[x as usize]).collect();
            if m.apply(op, &negs) != neg[fa as usize] {
                return false;
            }
            for d in 0..cells {
                let mut b = vec![0u16; arity];
                let mut rest = d;
                for slot in b.iter_mut().rev() {
                    *slot = (rest % k) as u16;
                    rest /= k;
                }
                let sums: Vec<u16> = a.iter().zip(&b).map(|(&x, &y)| plus(x, y)).collect();
                if m.apply(op, &sums) != plus(fa, m.apply(op, &b)) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{boole_theory, cantor_theory, groups_theory, gsets_theory, sets_theory};
    use crate::group::FiniteGroup;

    #[test]
    fn counts_of_small_models() {
        let e = sets_theory();
        assert_eq!(count_models(&e, 3).unwrap(), 1);
        let b = boole_theory();
        let counts: Vec<usize> = (0..=4).map(|k| count_models(&b, k).unwrap()).collect();
        assert_eq!(counts, [0, 1, 2, 0, 12]);
        let g = groups_theory();
        assert_eq!(count_models(&g, 3).unwrap(), 3);
        assert_eq!(count_up_to_iso(&g, 4).unwrap(), 2);
        let c2 = gsets_theory(&FiniteGroup::cyclic(2)).unwrap();
        // involutions on 3 points
        assert_eq!(count_models(&c2, 3).unwrap(), 4);
        let cantor = cantor_theory(2).unwrap();
        assert_eq!(count_models(&cantor, 1).unwrap(), 1);
        assert_eq!(count_models(&cantor, 2).unwrap(), 0);
    }

    #[test]
    fn groups_of_order_six() {
        let g = groups_theory();
        assert_eq!(count_up_to_iso(&g, 6).unwrap(), 2);
    }

    #[test]
    fn homs_and_products() {
        let b = boole_theory();
        let two = enumerate_models(&b, 2, 10).unwrap().remove(0);
        let sq = product_model(&two, &two).unwrap();
        assert!(sq.check(&b).unwrap().valid);
        assert_eq!(hom_models(&two, &sq, 100).unwrap().len(), 1);
        assert_eq!(count_hom_models(&sq, &two).unwrap(), 2);
        let (free, els) = free_model_as_finite(&b, 1, 100).unwrap();
        assert_eq!(els[0], Term::Var(1));
        assert_eq!(free.size, 4);
        assert_eq!(count_hom_models(&free, &sq).unwrap(), 4);
    }

    #[test]
    fn abelian_objects() {
        let e = sets_theory();
        assert_eq!(abelian_group_objects(&e, 3, 1000).unwrap().len(), 3);
        let b = boole_theory();
        assert_eq!(abelian_group_objects(&b, 1, 1000).unwrap().len(), 1);
        assert!(abelian_group_objects(&b, 2, 1000).unwrap().is_empty());
        let g = groups_theory();
        let objs = abelian_group_objects(&g, 4, 1000).unwrap();
        // each abelian group of order four carries exactly its own structure
        assert_eq!(objs.len(), 16);
    }

    #[test]
    fn check_reports_violation() {
        let g = groups_theory();
        let bad = vec![vec![0], vec![0, 1, 1, 1], vec![0, 1]];
        let v = check_model(&g, 2, bad).unwrap();
        assert!(!v.valid);
        assert!(v.violated.is_some());
    }
}
