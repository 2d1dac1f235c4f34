use std::collections::BTreeMap;

use lawvere::catalogue::*;
use lawvere::dsl::parse_term;
use lawvere::group::FiniteGroup;
use lawvere::theory::*;
use lawvere::Term;

fn t(s: &str) -> Term {
    parse_term(s).unwrap()
}

fn fmor(th: &Theory, src: usize, dst: usize, comps: &[&str]) -> FMor {
    FMor::new(th, src, dst, comps.iter().map(|c| t(c)).collect()).unwrap()
}

fn assign(pairs: &[(&str, &str)]) -> BTreeMap<String, Term> {
    pairs.iter().map(|(k, v)| (k.to_string(), t(v))).collect()
}

#[test]
fn identities() {
    let e = sets_theory();
    assert_eq!(FMor::identity(&e, 3).unwrap().components(), &Term::vars(3)[..]);
    assert!(FMor::identity(&boole_theory(), 0).unwrap().components().is_empty());
    let c2 = cantor_theory(2).unwrap();
    assert_eq!(FMor::identity(&c2, 1).unwrap().components(), &[Term::Var(1)]);
}

#[test]
fn composition_examples() {
    let e = sets_theory();
    let f = fmor(&e, 2, 1, &["x1", "x1"]);
    let g = fmor(&e, 1, 2, &["x2"]);
    assert_eq!(compose(&FMor::identity(&e, 1).unwrap(), &f).unwrap(), f);
    // the map 1 ↦ 2 followed by 1,2 ↦ 1
    assert_eq!(compose(&f, &g).unwrap(), fmor(&e, 1, 1, &["x1"]));

    let c2 = cantor_theory(2).unwrap();
    let split = fmor(&c2, 2, 1, &["nu1(x1)", "nu2(x1)"]);
    let merge = fmor(&c2, 1, 2, &["mu(x1,x2)"]);
    assert_eq!(compose(&split, &merge).unwrap(), FMor::identity(&c2, 1).unwrap());
    assert!(compose(&split, &split).is_err());
}

#[test]
fn sums_and_symmetry() {
    let e = sets_theory();
    let id1 = FMor::identity(&e, 1).unwrap();
    assert_eq!(coproduct(&id1, &id1).unwrap(), FMor::identity(&e, 2).unwrap());
    let s = symmetry(&e, 1, 1).unwrap();
    assert_eq!(s, fmor(&e, 2, 2, &["x2", "x1"]));
    assert_eq!(compose(&s, &s).unwrap(), FMor::identity(&e, 2).unwrap());
    let b = boole_theory();
    assert_eq!(injection(&b, 1, 1, Side::Left).unwrap(), fmor(&b, 1, 2, &["x1"]));
    assert_eq!(injection(&b, 1, 1, Side::Right).unwrap(), fmor(&b, 1, 2, &["x2"]));
}

#[test]
fn hom_set_sizes() {
    let e = sets_theory();
    for m in 0..=4usize {
        for n in 0..=4usize {
            let homs = hom_enumerate(&e, m, n, None, DEFAULT_HOM_CAP).unwrap();
            assert_eq!(homs.len(), n.pow(m as u32), "|F_E({m},{n})|");
        }
    }
    assert_eq!(hom_enumerate(&boole_theory(), 1, 1, None, DEFAULT_HOM_CAP).unwrap().len(), 4);
    let c2 = gsets_theory(&FiniteGroup::cyclic(2)).unwrap();
    assert_eq!(hom_enumerate(&c2, 1, 1, None, DEFAULT_HOM_CAP).unwrap().len(), 2);
    assert!(hom_enumerate(&groups_theory(), 1, 1, None, DEFAULT_HOM_CAP).is_err());
    assert!(hom_enumerate(&boole_theory(), 1, 3, None, 100).is_err());
}

#[test]
fn bounded_enumeration_is_deduplicated() {
    let b = boole_theory();
    let homs = hom_enumerate(&b, 1, 1, Some(4), DEFAULT_HOM_CAP).unwrap();
    assert_eq!(homs.len(), 4);
    let g = groups_theory();
    let els = g.elements(1, Some(3), DEFAULT_HOM_CAP).unwrap();
    let shown: Vec<String> = els.elements.iter().map(|e| e.to_string()).collect();
    assert_eq!(shown, ["x1", "e", "inv(x1)", "mul(x1,x1)"]);
    assert!(!els.complete);
}

#[test]
fn iso_search() {
    let e = sets_theory();
    let id = FMor::identity(&e, 2).unwrap();
    assert_eq!(is_iso(&id, None, DEFAULT_HOM_CAP).unwrap().inverse(), Some(&id));
    let fold = fmor(&e, 2, 1, &["x1", "x1"]);
    assert!(matches!(is_iso(&fold, None, DEFAULT_HOM_CAP).unwrap(), IsoSearch::NotInvertible(_)));
    let swap = symmetry(&e, 1, 2).unwrap();
    let inv = is_iso(&swap, None, DEFAULT_HOM_CAP).unwrap();
    assert_eq!(inv.inverse(), Some(&symmetry(&e, 2, 1).unwrap()));

    let c2 = cantor_theory(2).unwrap();
    let merge = fmor(&c2, 1, 2, &["mu(x1,x2)"]);
    let found = is_iso(&merge, Some(4), DEFAULT_HOM_CAP).unwrap();
    assert_eq!(found.inverse(), Some(&fmor(&c2, 2, 1, &["nu1(x1)", "nu2(x1)"])));
    let stuck = fmor(&c2, 1, 2, &["mu(x2,x1)"]);
    assert!(is_iso(&stuck, Some(4), DEFAULT_HOM_CAP).unwrap().inverse().is_some());
    let not = fmor(&c2, 1, 2, &["mu(x1,x1)"]);
    assert!(matches!(is_iso(&not, Some(4), DEFAULT_HOM_CAP).unwrap(), IsoSearch::NotInvertible(_)));
    let bounded = fmor(&c2, 1, 2, &["mu(nu1(x1),x2)"]);
    assert!(matches!(is_iso(&bounded, Some(3), DEFAULT_HOM_CAP).unwrap(), IsoSearch::NotFound { .. }));
}

#[test]
fn theory_morphism_checks() {
    let e = sets_theory();
    let b = boole_theory();
    let to_b = TheoryMorphism::new(&e, &b, BTreeMap::new()).unwrap();
    assert!(check_theory_morphism(&to_b).unwrap().valid);

    let g = groups_theory();
    let ab = ab_theory();
    let forget =
        TheoryMorphism::new(&g, &ab, assign(&[("mul", "add(x1,x2)"), ("inv", "neg(x1)"), ("e", "zero")])).unwrap();
    assert!(check_theory_morphism(&forget).unwrap().valid);

    let bad = TheoryMorphism::new(&ab, &b, assign(&[("add", "and(x1,x2)"), ("zero", "1"), ("neg", "x1")])).unwrap();
    let verdict = check_theory_morphism(&bad).unwrap();
    assert!(!verdict.valid);
    assert_eq!(verdict.violated.unwrap().to_string(), "1: add(x1,neg(x1)) = zero");
}

#[test]
fn theory_morphism_equality() {
    let c2 = gsets_theory(&FiniteGroup::cyclic(2)).unwrap();
    let id = TheoryMorphism::by_name(&c2, &c2).unwrap();
    let inversion = TheoryMorphism::new(&c2, &c2, assign(&[("g1", "g1(x1)")])).unwrap();
    assert!(theory_morphisms_equal(&id, &id).unwrap());
    assert!(theory_morphisms_equal(&id, &inversion).unwrap());

    let g = groups_theory();
    let gid = TheoryMorphism::by_name(&g, &g).unwrap();
    let op = TheoryMorphism::new(&g, &g, assign(&[("mul", "mul(x2,x1)"), ("inv", "inv(x1)"), ("e", "e")])).unwrap();
    assert!(check_theory_morphism(&op).unwrap().valid);
    assert!(!theory_morphisms_equal(&gid, &op).unwrap());
}
