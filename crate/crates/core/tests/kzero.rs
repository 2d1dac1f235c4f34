use std::collections::BTreeMap;

use lawvere::catalogue::*;
use lawvere::dsl::parse_term;
use lawvere::group::FiniteGroup;
use lawvere::kronecker::kronecker;
use lawvere::kzero::*;
use lawvere::theory::*;

fn morphism(s: &Theory, t: &Theory, pairs: &[(&str, &str)]) -> TheoryMorphism {
    let assignment: BTreeMap<String, lawvere::Term> =
        pairs.iter().map(|(k, v)| (k.to_string(), parse_term(v).unwrap())).collect();
    TheoryMorphism::new(s, t, assignment).unwrap()
}

#[test]
fn infinite_cyclic_with_invariant() {
    let c2 = gsets_theory(&FiniteGroup::cyclic(2)).unwrap();
    for th in [sets_theory(), boole_theory(), groups_theory(), ab_theory(), c2] {
        let cert = k0(&th, &K0Options::default()).unwrap();
        assert_eq!(cert.group, Some(CyclicGroup::InfiniteCyclic), "{}", th.name());
        assert_eq!(cert.separating_invariant.as_ref().unwrap().size, 2);
        assert!(cert.verify(&th).unwrap());
    }
}

#[test]
fn cantor_torsion() {
    for a in 2..=5 {
        let th = cantor_theory(a).unwrap();
        let start = std::time::Instant::now();
        let cert = k0(&th, &K0Options::default()).unwrap();
        println!("Cantor{a}: {:?}", start.elapsed());
        assert_eq!(cert.group, Some(CyclicGroup::Cyclic { order: a - 1 }));
        let w = cert.torsion_witness.as_ref().unwrap();
        assert_eq!(w.m, a);
        assert!(w.verify().unwrap());
        assert_eq!(cert.excluded_arities, (2..a).collect::<Vec<_>>());
    }
}

#[test]
fn mod_k_is_infinite() {
    let th = modr_theory(3).unwrap();
    let cert = k0(&th, &K0Options::default()).unwrap();
    assert_eq!(cert.group, Some(CyclicGroup::InfiniteCyclic));
    assert_eq!(cert.separating_invariant.unwrap().size, 3);
}

#[test]
fn cyclic_maps() {
    use CyclicGroup::*;
    let z = InfiniteCyclic;
    let c = |order| Cyclic { order };
    assert_eq!(CyclicMap::new(z, z, "").unwrap().kind, MapKind::Isomorphism);
    assert_eq!(CyclicMap::new(z, c(1), "").unwrap().kind, MapKind::Zero);
    assert_eq!(CyclicMap::new(z, c(3), "").unwrap().kind, MapKind::SurjectiveNotInjective);
    assert_eq!(CyclicMap::new(c(6), c(3), "").unwrap().kind, MapKind::SurjectiveNotInjective);
    assert_eq!(CyclicMap::new(c(4), c(4), "").unwrap().kind, MapKind::Isomorphism);
    assert!(CyclicMap::new(c(4), c(3), "").is_err());
    assert!(CyclicMap::new(c(4), z, "").is_err());
}

#[test]
fn assembly() {
    let opts = K0Options::default();
    let b = assembly_pi0(&boole_theory(), &opts).unwrap();
    assert_eq!(b.map.kind, MapKind::Zero);
    assert_eq!(b.map.target, CyclicGroup::Cyclic { order: 1 });
    let e = assembly_pi0(&sets_theory(), &opts).unwrap();
    assert_eq!(e.map.kind, MapKind::Isomorphism);
    for a in [2, 3, 5] {
        let start = std::time::Instant::now();
        let r = assembly_pi0(&cantor_theory(a).unwrap(), &opts).unwrap();
        println!("assembly Cantor{a}: {:?}", start.elapsed());
        assert_eq!(r.map.kind, MapKind::Isomorphism);
        assert_eq!(r.map.source, CyclicGroup::Cyclic { order: a - 1 });
        assert!(r.linearization.torsion_witness.as_ref().unwrap().verify().unwrap());
    }
}

#[test]
fn pushforwards() {
    let opts = K0Options::default();
    let to_boole = morphism(&sets_theory(), &boole_theory(), &[]);
    let p = k0_pushforward(&to_boole, &opts).unwrap();
    assert_eq!(p.map.kind, MapKind::Isomorphism);
    let to_cantor = morphism(&sets_theory(), &cantor_theory(2).unwrap(), &[]);
    let p = k0_pushforward(&to_cantor, &opts).unwrap();
    assert_eq!(p.map.kind, MapKind::Zero);
    assert!(p.map.is_surjective());
    let ab = morphism(&groups_theory(), &ab_theory(), &[("e", "zero"), ("mul", "add(x1,x2)"), ("inv", "neg(x1)")]);
    let p = k0_pushforward(&ab, &opts).unwrap();
    assert_eq!((p.map.source, p.map.target), (CyclicGroup::InfiniteCyclic, CyclicGroup::InfiniteCyclic));
}

#[test]
fn rings() {
    let opts = K0Options::default();
    let c2 = gsets_theory(&FiniteGroup::cyclic(2)).unwrap();
    for th in [ab_theory(), sets_theory(), c2] {
        assert_eq!(k0_ring(&th, &opts).unwrap().group, CyclicGroup::InfiniteCyclic);
    }
    assert!(k0_ring(&groups_theory(), &opts).is_err());
    assert!(k0_ring(&boole_theory(), &opts).is_err());
}

#[test]
fn automorphisms() {
    let c2 = gsets_theory(&FiniteGroup::cyclic(2)).unwrap();
    for (th, n, order) in [(sets_theory(), 3, 6), (boole_theory(), 1, 2), (c2, 1, 2)] {
        let g = aut_group(&th, n, Some(4), 100_000).unwrap();
        assert_eq!(g.order(), order, "{}", th.name());
        let k = g.order();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    assert_eq!(g.table[g.table[a][b]][c], g.table[a][g.table[b][c]]);
                }
            }
        }
    }
}

#[test]
fn product_gsets_match_product_group() {
    let (c2, c3) = (FiniteGroup::cyclic(2), FiniteGroup::cyclic(3));
    let kt = kronecker(&gsets_theory(&c2).unwrap(), &gsets_theory(&c3).unwrap()).unwrap();
    let prod = gsets_theory(&FiniteGroup::product(&c2, &c3)).unwrap();
    let opts = K0Options::default();
    let a = k0(&kt.combined, &opts).unwrap();
    let b = k0(&prod, &opts).unwrap();
    assert_eq!(a.group, Some(CyclicGroup::InfiniteCyclic));
    assert_eq!(a.group, b.group);
}
