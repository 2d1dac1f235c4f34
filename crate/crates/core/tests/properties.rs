use std::ops::ControlFlow;

use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lawvere::backend::{leavitt_normalize, Backend};
use lawvere::catalogue::*;
use lawvere::dsl::{parse_presentation, parse_term, print_presentation};
use lawvere::group::FiniteGroup;
use lawvere::kronecker::{kronecker, BilinearWitness};
use lawvere::kzero::{k0, CyclicGroup, K0Options};
use lawvere::models::{for_each_model, FiniteModel};
use lawvere::ncpoly::NCPoly;
use lawvere::rewrite::{complete, CompletionBounds, Kbo};
use lawvere::theory::*;
use lawvere::{Equation, Presentation, Signature, Term};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn catalogue() -> Vec<Theory> {
    vec![
        sets_theory(),
        boole_theory(),
        groups_theory(),
        ab_theory(),
        cantor_theory(2).unwrap(),
        gsets_theory(&FiniteGroup::cyclic(2)).unwrap(),
        gsets_theory(&FiniteGroup::symmetric3()).unwrap(),
    ]
}

fn groups_by_rewriting() -> Theory {
    let g = groups_theory();
    Theory::new(g.presentation().clone(), Backend::Trs(groups_trs()), g.family().clone())
}

fn rewriting_theories() -> Vec<Theory> {
    vec![groups_by_rewriting(), cantor_theory(2).unwrap(), cantor_theory(3).unwrap()]
}

fn models_up_to(th: &Theory, max: usize) -> Vec<FiniteModel> {
    let mut out = Vec::new();
    for k in 1..=max {
        for_each_model(th, k, |m| {
            out.push(m.clone());
            ControlFlow::Continue(())
        })
        .unwrap();
    }
    out
}

/// Every assignment of `{0..size}` to `n` variables.
fn assignments(size: usize, n: usize) -> impl Iterator<Item = Vec<u16>> {
    (0..size.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let v = code % size;
                code /= size;
                v as u16
            })
            .collect()
    })
}

/// Terms over `f/2`, `g/1`, `c/0` and up to three variables.
fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(1usize..=3).prop_map(Term::Var), Just(Term::constant("c"))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app("f", vec![a, b])),
            inner.prop_map(|a| Term::app("g", vec![a])),
        ]
    })
}

fn arb_poly(a: usize) -> impl Strategy<Value = NCPoly> {
    let word = prop::collection::vec(0..(2 * a) as u16, 0..5);
    prop::collection::vec((word, -3i64..=3), 0..5).prop_map(|terms| {
        let mut p = NCPoly::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn substitution_identity_and_associativity(t in arb_term(), e1 in prop::collection::vec(arb_term(), 3), e2 in prop::collection::vec(arb_term(), 3)) {
        prop_assert_eq!(t.substitute(&Term::vars(3)).unwrap(), t.clone());
        let e1e2: Vec<Term> = e1.iter().map(|s| s.substitute(&e2).unwrap()).collect();
        prop_assert_eq!(t.substitute(&e1).unwrap().substitute(&e2).unwrap(), t.substitute(&e1e2).unwrap());
    }

    #[test]
    fn terms_print_and_parse(t in arb_term()) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn presentations_round_trip(eqs in prop::collection::vec((arb_term(), arb_term()), 0..5)) {
        let sig = Signature::from_ops([("c", 0), ("g", 1), ("f", 2)]).unwrap();
        let equations = eqs.into_iter().map(|(l, r)| Equation::new(l, r, 3)).collect();
        let p = Presentation::new("Random", sig, equations).unwrap();
        let printed = print_presentation(&p);
        let reparsed = parse_presentation(&printed).unwrap();
        prop_assert_eq!(&reparsed, &p);
        prop_assert_eq!(print_presentation(&reparsed), printed);
    }

    #[test]
    fn category_laws(seed in any::<u64>(), dims in prop::array::uniform4(1usize..=3)) {
        let mut r = rng(seed);
        let [a, b, c, d] = dims;
        for th in catalogue() {
            let f = random_fmor(&th, a, b, 6, &mut r).unwrap();
            let g = random_fmor(&th, b, c, 6, &mut r).unwrap();
            let h = random_fmor(&th, c, d, 6, &mut r).unwrap();
            let hg_f = compose(&compose(&h, &g).unwrap(), &f).unwrap();
            let h_gf = compose(&h, &compose(&g, &f).unwrap()).unwrap();
            prop_assert_eq!(hg_f, h_gf, "{}", th.name());
            prop_assert_eq!(compose(&f, &FMor::identity(&th, a).unwrap()).unwrap(), f.clone());
            prop_assert_eq!(compose(&FMor::identity(&th, b).unwrap(), &f).unwrap(), f);
        }
    }

    #[test]
    fn coproduct_is_functorial_and_symmetric(seed in any::<u64>(), dims in prop::array::uniform6(1usize..=2)) {
        let mut r = rng(seed);
        let [a, b, c, a2, b2, c2] = dims;
        for th in catalogue() {
            let f1 = random_fmor(&th, a, b, 5, &mut r).unwrap();
            let g1 = random_fmor(&th, b, c, 5, &mut r).unwrap();
            let f2 = random_fmor(&th, a2, b2, 5, &mut r).unwrap();
            let g2 = random_fmor(&th, b2, c2, 5, &mut r).unwrap();
            let sum_then = compose(&coproduct(&g1, &g2).unwrap(), &coproduct(&f1, &f2).unwrap()).unwrap();
            let then_sum = coproduct(&compose(&g1, &f1).unwrap(), &compose(&g2, &f2).unwrap()).unwrap();
            prop_assert_eq!(sum_then, then_sum, "{}", th.name());

            let twice = compose(&symmetry(&th, b, a).unwrap(), &symmetry(&th, a, b).unwrap()).unwrap();
            prop_assert!(twice.is_identity().unwrap());
            let post = compose(&symmetry(&th, b, b2).unwrap(), &coproduct(&f1, &f2).unwrap()).unwrap();
            let pre = compose(&coproduct(&f2, &f1).unwrap(), &symmetry(&th, a, a2).unwrap()).unwrap();
            prop_assert_eq!(post, pre, "{}", th.name());
        }
    }

    #[test]
    fn backend_congruence(seed in any::<u64>()) {
        let mut r = rng(seed);
        for th in catalogue().into_iter().chain(rewriting_theories()) {
            let t = random_term(&th, 3, 7, &mut r).unwrap();
            let env: Vec<Term> = (0..3).map(|_| random_term(&th, 2, 5, &mut r).unwrap()).collect();
            let env_nf: Vec<Term> = env.iter().map(|u| th.normalize(u, 2).unwrap()).collect();
            let a = th.normalize(&t.substitute(&env).unwrap(), 2).unwrap();
            let b = th.normalize(&t.substitute(&env_nf).unwrap(), 2).unwrap();
            prop_assert_eq!(a, b, "{}", th.name());
        }
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        for th in catalogue().into_iter().chain(rewriting_theories()) {
            let t = random_term(&th, 3, 9, &mut r).unwrap();
            let nf = th.normalize(&t, 3).unwrap();
            prop_assert_eq!(th.normalize(&nf, 3).unwrap(), nf, "{}", th.name());
        }
    }

    #[test]
    fn leavitt_normalization_is_idempotent_and_linear(a in 2usize..=4, p in arb_poly(4), q in arb_poly(4)) {
        let restrict = |p: &NCPoly| {
            let mut out = NCPoly::zero();
            for (w, c) in p.terms() {
                out.add_term(w.iter().map(|&g| g % (2 * a) as u16).collect(), c);
            }
            out
        };
        let (p, q) = (restrict(&p), restrict(&q));
        let np = leavitt_normalize(a, &p);
        prop_assert_eq!(leavitt_normalize(a, &np), np.clone());
        let nq = leavitt_normalize(a, &q);
        prop_assert_eq!(leavitt_normalize(a, &p.add(&q)), leavitt_normalize(a, &np.add(&nq)));
    }

    #[test]
    fn bilinear_map_is_a_functor(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c2 = gsets_theory(&FiniteGroup::cyclic(2)).unwrap();
        for (s, t) in [(boole_theory(), c2.clone()), (sets_theory(), boole_theory()), (c2.clone(), c2)] {
            let w = BilinearWitness::new(kronecker(&s, &t).unwrap());
            let f1 = random_fmor(&s, 1, 2, 4, &mut r).unwrap();
            let f2 = random_fmor(&s, 2, 1, 4, &mut r).unwrap();
            let g1 = random_fmor(&t, 1, 1, 4, &mut r).unwrap();
            let g2 = random_fmor(&t, 1, 2, 4, &mut r).unwrap();
            let whole = w.apply(&compose(&f2, &f1).unwrap(), &compose(&g2, &g1).unwrap()).unwrap();
            let parts = compose(&w.apply(&f2, &g2).unwrap(), &w.apply(&f1, &g1).unwrap()).unwrap();
            prop_assert_eq!(whole, parts);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn normalization_is_sound_in_finite_models(seed in any::<u64>()) {
        let mut r = rng(seed);
        for th in rewriting_theories().into_iter().chain([boole_theory(), gsets_theory(&FiniteGroup::cyclic(2)).unwrap()]) {
            let models = models_up_to(&th, 4);
            prop_assert!(!models.is_empty());
            for _ in 0..8 {
                let t = random_term(&th, 3, 9, &mut r).unwrap();
                let nf = th.normalize(&t, 3).unwrap();
                for m in &models {
                    for env in assignments(m.size, 3) {
                        prop_assert_eq!(m.eval(&t, &env).unwrap(), m.eval(&nf, &env).unwrap(), "{}: {} vs {}", th.name(), t, nf);
                    }
                }
            }
        }
    }

    #[test]
    fn iso_witnesses_are_two_sided(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        for th in [sets_theory(), boole_theory(), gsets_theory(&FiniteGroup::cyclic(2)).unwrap(), cantor_theory(2).unwrap()] {
            let f = random_fmor(&th, n, n, 3, &mut r).unwrap();
            if let Some(g) = is_iso(&f, Some(4), 50_000).unwrap().inverse() {
                prop_assert!(compose(g, &f).unwrap().is_identity().unwrap(), "{}: {}", th.name(), f);
                prop_assert!(compose(&f, g).unwrap().is_identity().unwrap(), "{}: {}", th.name(), f);
            }
        }
    }

    #[test]
    fn k0_certificates_are_sound(a in 2usize..=3, bound in 4usize..=6) {
        let th = cantor_theory(a).unwrap();
        let opts = K0Options { term_bound: bound, jobs: 1, ..K0Options::default() };
        let cert = k0(&th, &opts).unwrap();
        prop_assert!(cert.verify(&th).unwrap());
        if let Some(w) = &cert.torsion_witness {
            prop_assert!(compose(&w.inverse, &w.forward).unwrap().is_identity().unwrap());
            prop_assert!(compose(&w.forward, &w.inverse).unwrap().is_identity().unwrap());
            prop_assert_eq!(cert.group, Some(CyclicGroup::Cyclic { order: w.m - 1 }));
        }
    }
}

#[test]
fn separating_invariants_separate() {
    for th in catalogue().into_iter().filter(|t| !t.is_degenerate().unwrap()) {
        let cert = k0(&th, &K0Options::default()).unwrap();
        if cert.group != Some(CyclicGroup::InfiniteCyclic) {
            continue;
        }
        let m = cert.separating_invariant.as_ref().expect("invariant");
        assert!(m.check(&th).unwrap().valid);
        let powers: Vec<usize> = (1..=6).map(|r| m.size.pow(r)).collect();
        assert!(powers.windows(2).all(|w| w[0] < w[1]), "{}", th.name());
    }
}

#[test]
fn enumerated_models_satisfy_their_equations() {
    for th in catalogue().into_iter().chain(rewriting_theories()) {
        for m in models_up_to(&th, 3) {
            assert!(m.check(&th).unwrap().valid, "{}", th.name());
        }
    }
}

#[test]
fn completed_rules_hold_in_models() {
    let sources = [
        "theory Monoid; op e/0; op m/2; eq 3: m(m(x1,x2),x3) = m(x1,m(x2,x3)); eq 1: m(e,x1) = x1; eq 1: m(x1,e) = x1; end",
        "theory Retract; op f/1; op g/1; eq 1: f(g(x1)) = x1; eq 1: g(f(g(x1))) = g(x1); end",
    ];
    let mut presentations: Vec<Presentation> =
        sources.iter().map(|s| parse_presentation(&s.replace("; ", ";\n")).unwrap()).collect();
    presentations.push(cantor_presentation(2).unwrap());
    presentations.push(groups_theory().presentation().clone());
    for p in presentations {
        let report = complete(&p, &Kbo::for_signature(&p.signature), CompletionBounds::default());
        if !report.is_complete() {
            continue;
        }
        let th = Theory::from_presentation(p.clone(), CompletionBounds::default());
        for m in models_up_to(&th, 3) {
            for rule in &report.rules {
                let n = rule.lhs.max_var().max(rule.rhs.max_var());
                for env in assignments(m.size, n) {
                    assert_eq!(
                        m.eval(&rule.lhs, &env).unwrap(),
                        m.eval(&rule.rhs, &env).unwrap(),
                        "{}: rule {}",
                        p.name,
                        rule.id
                    );
                }
            }
        }
    }
}
