use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::kbo::Kbo;
use super::unify::{apply, unify};
use super::{RewriteRule, RewriteSystem};
use crate::error::{Error, Result};
use crate::term::{Presentation, Term};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CompletionBounds {
    pub max_rules: usize,
    pub max_term_size: usize,
    pub step_budget: usize,
}

impl Default for CompletionBounds {
    fn default() -> Self {
        CompletionBounds { max_rules: 64, max_term_size: 40, step_budget: super::DEFAULT_STEP_BUDGET }
    }
}

/// How a completed rule was obtained from the input equations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleOrigin {
    Axiom {
        equation: usize,
    },
    CriticalPair {
        outer: usize,
        inner: usize,
        position: Vec<usize>,
    },
    /// Re-added after its left side became reducible by rule `by`.
    Simplified {
        rule: usize,
        by: usize,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPair {
    pub outer: usize,
    pub inner: usize,
    pub position: Vec<usize>,
    pub left: Term,
    pub right: Term,
    pub left_normal: Term,
    pub right_normal: Term,
    pub joinable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionStatus {
    Complete,
    Unorientable,
    BoundExceeded,
    BudgetExhausted,
}

/// Result of a bounded completion run. On failure `offending` holds the pair
/// that could not be handled and `rules` the partial system.
#[derive(Clone, Debug, Serialize)]
pub struct CompletionReport {
    pub status: CompletionStatus,
    pub rules: Vec<CompletedRule>,
    pub critical_pairs: Vec<CriticalPair>,
    pub offending: Option<(Term, Term)>,
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletedRule {
    pub id: usize,
    pub lhs: Term,
    pub rhs: Term,
    pub origin: RuleOrigin,
}

impl CompletionReport {
    pub fn is_complete(&self) -> bool {
        self.status == CompletionStatus::Complete
    }

    pub fn system(&self, step_budget: usize) -> RewriteSystem {
        let rules = self
            .rules
            .iter()
            .map(|r| RewriteRule::new(r.lhs.clone(), r.rhs.clone()).expect("completed rules are valid"))
            .collect();
        RewriteSystem::with_budget(rules, step_budget)
    }
}

/// Renumbers variables in order of first occurrence across both terms.
fn canonical_vars(a: &Term, b: &Term) -> (Term, Term) {
    let mut map = BTreeMap::new();
    fn visit(t: &Term, map: &mut BTreeMap<usize, usize>, order: &mut Vec<usize>) {
        match t {
            Term::Var(i) => {
                if !map.contains_key(i) {
                    map.insert(*i, order.len() + 1);
                    order.push(*i);
                }
            }
            Term::App(_, args) => args.iter().for_each(|x| visit(x, map, order)),
        }
    }
    let mut order = Vec::new();
    visit(a, &mut map, &mut order);
    visit(b, &mut map, &mut order);
    (a.map_vars(&|i| map[&i]), b.map_vars(&|i| map[&i]))
}

/// All critical pairs between two rules; `inner` is renamed apart first.
fn overlaps(outer: &RewriteRule, inner: &RewriteRule, same: bool) -> Vec<(Vec<usize>, Term, Term)> {
    let shift = outer.lhs.max_var().max(outer.rhs.max_var());
    let il = inner.lhs.shift_vars(shift);
    let ir = inner.rhs.shift_vars(shift);
    let mut out = Vec::new();
    for pos in outer.lhs.app_positions() {
        if same && pos.is_empty() {
            continue;
        }
        let sub = outer.lhs.at(&pos).expect("position exists");
        if let Some(s) = unify(sub, &il) {
            let left = apply(&outer.rhs, &s);
            let right = apply(&outer.lhs.replace_at(&pos, ir.clone()), &s);
            let (left, right) = canonical_vars(&left, &right);
            out.push((pos, left, right));
        }
    }
    out
}

/// Every critical pair of `trs`, each normalized and marked joinable or not.
pub fn critical_pairs(trs: &RewriteSystem) -> Result<Vec<CriticalPair>> {
    let mut out = Vec::new();
    for (i, outer) in trs.rules().iter().enumerate() {
        for (j, inner) in trs.rules().iter().enumerate() {
            for (position, left, right) in overlaps(outer, inner, i == j) {
                let left_normal = trs.normalize(&left)?;
                let right_normal = trs.normalize(&right)?;
                out.push(CriticalPair {
                    outer: i,
                    inner: j,
                    position,
                    joinable: left_normal == right_normal,
                    left,
                    right,
                    left_normal,
                    right_normal,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub critical_pairs: Vec<CriticalPair>,
    pub joinable: usize,
    pub non_joinable: usize,
}

impl ConfluenceReport {
    pub fn locally_confluent(&self) -> bool {
        self.non_joinable == 0
    }
}

pub fn check_local_confluence(trs: &RewriteSystem) -> Result<ConfluenceReport> {
    let critical_pairs = critical_pairs(trs)?;
    let joinable = critical_pairs.iter().filter(|c| c.joinable).count();
    let non_joinable = critical_pairs.len() - joinable;
    Ok(ConfluenceReport { critical_pairs, joinable, non_joinable })
}

struct Pending {
    left: Term,
    right: Term,
    origin: RuleOrigin,
}

/// Bounded Knuth-Bendix completion of `p` under `order`.
pub fn complete(p: &Presentation, order: &Kbo, bounds: CompletionBounds) -> CompletionReport {
    let mut queue: VecDeque<Pending> = p
        .equations
        .iter()
        .enumerate()
        .map(|(i, e)| Pending {
            left: e.left.clone(),
            right: e.right.clone(),
            origin: RuleOrigin::Axiom { equation: i },
        })
        .collect();
    let mut rules: Vec<CompletedRule> = Vec::new();
    let mut next_id = 0;

    let system = |rules: &[CompletedRule]| {
        RewriteSystem::with_budget(
            rules
                .iter()
                .map(|r| RewriteRule { lhs: r.lhs.clone(), rhs: r.rhs.clone(), context: r.lhs.max_var() })
                .collect(),
            bounds.step_budget,
        )
    };
    let fail = |status, rules: Vec<CompletedRule>, pair: Option<(Term, Term)>, msg: String| CompletionReport {
        status,
        rules,
        critical_pairs: Vec::new(),
        offending: pair,
        message: Some(msg),
    };

    while let Some(Pending { left, right, origin }) = queue.pop_front() {
        let trs = system(&rules);
        let (l, r) = match (trs.normalize(&left), trs.normalize(&right)) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => {
                return fail(CompletionStatus::BudgetExhausted, rules, Some((left, right)), e.to_string())
            }
        };
        if l == r {
            continue;
        }
        if l.size() > bounds.max_term_size || r.size() > bounds.max_term_size {
            return fail(
                CompletionStatus::BoundExceeded,
                rules,
                Some((l, r)),
                format!("term size exceeds {}", bounds.max_term_size),
            );
        }
        let (lhs, rhs) = if order.greater(&l, &r) {
            (l, r)
        } else if order.greater(&r, &l) {
            (r, l)
        } else {
            let msg = Error::Unorientable(format!("{l} = {r}")).to_string();
            return fail(CompletionStatus::Unorientable, rules, Some((l, r)), msg);
        };
        let (lhs, rhs) = canonical_vars(&lhs, &rhs);
        let id = next_id;
        next_id += 1;
        let new_rule = RewriteRule { context: lhs.max_var(), lhs: lhs.clone(), rhs: rhs.clone() };
        let single = RewriteSystem::new(vec![new_rule.clone()]);

        // inter-reduce the existing rules against the new one
        let mut kept = Vec::new();
        for old in rules.drain(..) {
            if single.is_reducible(&old.lhs) {
                queue.push_back(Pending {
                    left: old.lhs,
                    right: old.rhs,
                    origin: RuleOrigin::Simplified { rule: old.id, by: id },
                });
            } else {
                kept.push(old);
            }
        }
        rules = kept;
        rules.push(CompletedRule { id, lhs, rhs, origin });
        let trs = system(&rules);
        for rule in rules.iter_mut() {
            match trs.normalize(&rule.rhs) {
                Ok(nf) => rule.rhs = nf,
                Err(e) => {
                    let pair = Some((rule.lhs.clone(), rule.rhs.clone()));
                    return fail(CompletionStatus::BudgetExhausted, rules.clone(), pair, e.to_string());
                }
            }
        }
        if rules.len() > bounds.max_rules {
            return fail(CompletionStatus::BoundExceeded, rules, None, format!("more than {} rules", bounds.max_rules));
        }
        let new_idx = rules.len() - 1;
        let as_rule =
            |r: &CompletedRule| RewriteRule { lhs: r.lhs.clone(), rhs: r.rhs.clone(), context: r.lhs.max_var() };
        let newr = as_rule(&rules[new_idx]);
        for other in &rules {
            let o = as_rule(other);
            let same = other.id == id;
            for (position, a, b) in overlaps(&newr, &o, same) {
                queue.push_back(Pending {
                    left: a,
                    right: b,
                    origin: RuleOrigin::CriticalPair { outer: id, inner: other.id, position },
                });
            }
            if !same {
                for (position, a, b) in overlaps(&o, &newr, false) {
                    queue.push_back(Pending {
                        left: a,
                        right: b,
                        origin: RuleOrigin::CriticalPair { outer: other.id, inner: id, position },
                    });
                }
            }
        }
    }

    let trs = system(&rules);
    match critical_pairs(&trs) {
        Ok(cps) => {
            let status = if cps.iter().all(|c| c.joinable) {
                CompletionStatus::Complete
            } else {
                CompletionStatus::BoundExceeded
            };
            CompletionReport { status, rules, critical_pairs: cps, offending: None, message: None }
        }
        Err(e) => fail(CompletionStatus::BudgetExhausted, rules, None, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_presentation;
    use crate::term::Signature;

    fn x(i: usize) -> Term {
        Term::var(i)
    }

    #[test]
    fn cantor2_completes_to_three_rules() {
        let p = parse_presentation(
            "theory Cantor2; op mu/2; op nu1/1; op nu2/1;
             eq 2: nu1(mu(x1,x2)) = x1;
             eq 2: nu2(mu(x1,x2)) = x2;
             eq 1: mu(nu1(x1),nu2(x1)) = x1;
             end",
        )
        .unwrap();
        let rep = complete(&p, &Kbo::for_signature(&p.signature), CompletionBounds::default());
        assert!(rep.is_complete(), "{rep:?}");
        let rules: Vec<String> = rep.rules.iter().map(|r| format!("{} -> {}", r.lhs, r.rhs)).collect();
        assert_eq!(rules, vec!["nu1(mu(x1,x2)) -> x1", "nu2(mu(x1,x2)) -> x2", "mu(nu1(x1),nu2(x1)) -> x1"]);
        assert!(rep.critical_pairs.iter().all(|c| c.joinable));
        assert!(!rep.critical_pairs.is_empty());
    }

    #[test]
    fn reflexive_equation_discarded() {
        let p = parse_presentation("theory F; op f/1; eq 1: f(x1) = f(x1); end").unwrap();
        let rep = complete(&p, &Kbo::for_signature(&p.signature), CompletionBounds::default());
        assert!(rep.is_complete());
        assert!(rep.rules.is_empty());
    }

    #[test]
    fn commutativity_is_unorientable() {
        let p = parse_presentation("theory C; op and/2; eq 2: and(x1,x2) = and(x2,x1); end").unwrap();
        let rep = complete(&p, &Kbo::for_signature(&p.signature), CompletionBounds::default());
        assert_eq!(rep.status, CompletionStatus::Unorientable);
        assert!(rep.offending.is_some());
    }

    #[test]
    fn non_joinable_pair_reported() {
        let f = |t| Term::app("f", vec![t]);
        let g = |t| Term::app("g", vec![t]);
        let trs = RewriteSystem::from_pairs(vec![(f(g(x(1))), x(1)), (g(x(1)), x(1))]).unwrap();
        let rep = check_local_confluence(&trs).unwrap();
        assert_eq!(rep.non_joinable, 1);
        let bad = rep.critical_pairs.iter().find(|c| !c.joinable).unwrap();
        let mut sides = [bad.left_normal.to_string(), bad.right_normal.to_string()];
        sides.sort();
        assert_eq!(sides, ["f(x1)".to_string(), "x1".to_string()]);
    }

    #[test]
    fn monoid_completion_terminates() {
        let sig = Signature::from_ops([("e", 0), ("m", 2)]).unwrap();
        let m = |a, b| Term::app("m", vec![a, b]);
        let e = Term::constant("e");
        let p = Presentation::new(
            "Monoid",
            sig.clone(),
            vec![
                crate::term::Equation::new(m(e.clone(), x(1)), x(1), 1),
                crate::term::Equation::new(m(x(1), e), x(1), 1),
                crate::term::Equation::new(m(m(x(1), x(2)), x(3)), m(x(1), m(x(2), x(3))), 3),
            ],
        )
        .unwrap();
        let rep = complete(&p, &Kbo::for_signature(&sig), CompletionBounds::default());
        assert!(rep.is_complete());
        assert_eq!(rep.rules.len(), 3);
    }
}
