//! Term rewriting: leftmost-innermost normalization under a step budget,
//! Knuth-Bendix ordering, critical pairs and bounded completion.

mod completion;
mod kbo;
mod unify;

pub use completion::{
    check_local_confluence, complete, critical_pairs, CompletionBounds, CompletionReport, CompletionStatus,
    ConfluenceReport, CriticalPair, RuleOrigin,
};
pub use kbo::Kbo;
pub use unify::{match_term, unify, Subst};

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::term::{Op, Term};

pub const DEFAULT_STEP_BUDGET: usize = 10_000;

/// `lhs -> rhs`; the left side is never a bare variable and the right side
/// only uses variables of the left side.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RewriteRule {
    pub lhs: Term,
    pub rhs: Term,
    pub context: usize,
}

impl RewriteRule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self> {
        if lhs.is_var() {
            return Err(Error::Invalid(format!("rule lhs {lhs} is a variable")));
        }
        let lv = lhs.var_set();
        if !rhs.var_set().is_subset(&lv) {
            return Err(Error::Invalid(format!("rule {lhs} -> {rhs} introduces variables")));
        }
        let context = lhs.max_var();
        Ok(RewriteRule { lhs, rhs, context })
    }

    fn root(&self) -> &Op {
        match &self.lhs {
            Term::App(op, _) => op,
            Term::Var(_) => unreachable!("rule lhs is never a variable"),
        }
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An ordered rule list normalized leftmost-innermost.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    rules: Vec<RewriteRule>,
    step_budget: usize,
    by_root: HashMap<Op, Vec<usize>>,
}

impl PartialEq for RewriteSystem {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.step_budget == other.step_budget
    }
}

impl RewriteSystem {
    pub fn new(rules: Vec<RewriteRule>) -> Self {
        Self::with_budget(rules, DEFAULT_STEP_BUDGET)
    }

    pub fn with_budget(rules: Vec<RewriteRule>, step_budget: usize) -> Self {
        let mut by_root: HashMap<Op, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_root.entry(r.root().clone()).or_default().push(i);
        }
        RewriteSystem { rules, step_budget: step_budget.max(1), by_root }
    }

    /// Builds rules from `(lhs, rhs)` pairs.
    pub fn from_pairs(pairs: Vec<(Term, Term)>) -> Result<Self> {
        let rules = pairs.into_iter().map(|(l, r)| RewriteRule::new(l, r)).collect::<Result<_>>()?;
        Ok(Self::new(rules))
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn step_budget(&self) -> usize {
        self.step_budget
    }

    pub fn set_step_budget(&mut self, budget: usize) {
        self.step_budget = budget.max(1);
    }

    pub fn rename_ops(&self, f: &impl Fn(&str) -> String) -> RewriteSystem {
        let rules = self
            .rules
            .iter()
            .map(|r| RewriteRule { lhs: r.lhs.rename_ops(f), rhs: r.rhs.rename_ops(f), context: r.context })
            .collect();
        RewriteSystem::with_budget(rules, self.step_budget)
    }

    /// Leftmost-innermost normal form. Errors when the step budget runs out.
    pub fn normalize(&self, t: &Term) -> Result<Term> {
        let mut steps = 0;
        self.nf(t, &mut steps)
    }

    /// Normal form together with the number of rewrite steps used.
    pub fn normalize_counting(&self, t: &Term) -> Result<(Term, usize)> {
        let mut steps = 0;
        let nf = self.nf(t, &mut steps)?;
        Ok((nf, steps))
    }

    fn nf(&self, t: &Term, steps: &mut usize) -> Result<Term> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::App(op, args) => {
                let args = args.iter().map(|a| self.nf(a, steps)).collect::<Result<Vec<_>>>()?;
                let t = Term::App(op.clone(), args);
                match self.rewrite_root(&t)? {
                    None => Ok(t),
                    Some(next) => {
                        *steps += 1;
                        if *steps > self.step_budget {
                            return Err(Error::BudgetExhausted(self.step_budget));
                        }
                        self.nf(&next, steps)
                    }
                }
            }
        }
    }

    /// First rule (in order) whose left side matches `t` at the root.
    fn rewrite_root(&self, t: &Term) -> Result<Option<Term>> {
        let Term::App(op, _) = t else { return Ok(None) };
        let Some(candidates) = self.by_root.get(op) else { return Ok(None) };
        for &i in candidates {
            let rule = &self.rules[i];
            if let Some(sub) = match_term(&rule.lhs, t) {
                return rule.rhs.substitute(&sub).map(Some);
            }
        }
        Ok(None)
    }

    /// True when some rule applies somewhere in `t`.
    pub fn is_reducible(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::App(_, args) => {
                args.iter().any(|a| self.is_reducible(a)) || matches!(self.rewrite_root(t), Ok(Some(_)))
            }
        }
    }

    pub fn is_normal(&self, t: &Term) -> bool {
        !self.is_reducible(t)
    }
}
