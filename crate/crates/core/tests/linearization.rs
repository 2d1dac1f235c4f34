use std::collections::HashSet;

use lawvere::catalogue::gsets_theory;
use lawvere::group::FiniteGroup;
use lawvere::linearization::{detect_trivial_ring, linearize, TrivialRingVerdict, DEFAULT_TRIVIAL_BUDGET};
use lawvere::models::count_models;

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Addition tables of abelian groups on `0..k`: every relabelling of `Z/k`
/// and, for `k = 4`, of the Klein group.
fn labelled_abelian_groups(k: usize) -> HashSet<Vec<usize>> {
    let mut standard: Vec<Box<dyn Fn(usize, usize) -> usize>> = vec![Box::new(move |a, b| (a + b) % k)];
    if k == 4 {
        standard.push(Box::new(|a, b| a ^ b));
    }
    let mut out = HashSet::new();
    for add in &standard {
        for p in permutations(k) {
            let mut inv = vec![0; k];
            for (i, &x) in p.iter().enumerate() {
                inv[x] = i;
            }
            let table: Vec<usize> = (0..k * k).map(|c| p[add(inv[c / k], inv[c % k])]).collect();
            out.insert(table);
        }
    }
    out
}

/// Involutive additive self-maps of the group with addition table `add`.
fn involutions(k: usize, add: &[usize]) -> usize {
    (0..k.pow(k as u32))
        .filter(|&code| {
            let g: Vec<usize> = (0..k).map(|i| code / k.pow(i as u32) % k).collect();
            (0..k).all(|x| g[g[x]] == x) && (0..k * k).all(|c| g[add[c]] == add[k * g[c / k] + g[c % k]])
        })
        .count()
}

#[test]
fn linearized_c2_sets_are_abelian_groups_with_an_involution() {
    let lin = linearize(&gsets_theory(&FiniteGroup::cyclic(2)).unwrap()).unwrap();
    for k in 1..=4 {
        let oracle: usize = labelled_abelian_groups(k).iter().map(|add| involutions(k, add)).sum();
        assert!(oracle > 0);
        assert_eq!(count_models(&lin.kronecker.combined, k).unwrap(), oracle, "size {k}");
    }
}

#[test]
fn linearized_c2_sets_are_not_trivial() {
    let (_, verdict) =
        detect_trivial_ring(&gsets_theory(&FiniteGroup::cyclic(2)).unwrap(), DEFAULT_TRIVIAL_BUDGET).unwrap();
    assert!(matches!(verdict, TrivialRingVerdict::NotShownTrivial { .. }));
}
