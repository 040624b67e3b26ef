use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use mubforge::fixtures::Golden;
use mubforge::spread::{admissible_subsets, combinations, subset_scan, union_mask, CompleteSetSearch};
use mubforge::{
    assemble_unextendible, build_complete_set, certify_unextendible, new_classes_from_subset, search_unextendible,
    theorem2_scan, Certification, ClassLattice, ClassSet, CommutingClass, MubError, PauliWord, Prime, SetKind,
    TieBreak,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prime(p: u32) -> Prime {
    Prime::new(p).unwrap()
}

fn lattice(p: u32) -> ClassLattice {
    ClassLattice::new(prime(p)).unwrap()
}

fn all_complete_sets(lattice: &ClassLattice) -> Vec<ClassSet> {
    let mut out = Vec::new();
    let mut search = CompleteSetSearch::new(lattice, TieBreak::Canonical, u64::MAX);
    let _ = search.run(|chosen| {
        let classes = chosen.iter().map(|&i| lattice.classes()[i].clone()).collect();
        out.push(ClassSet::complete(lattice.prime(), classes).unwrap());
        ControlFlow::Continue(())
    });
    assert!(!search.budget_exhausted());
    out
}

/// Unextendible iff no commuting independent pair inside the residual spans
/// a plane lying wholly in the residual.
fn residual_oracle(set: &ClassSet) -> bool {
    let p = set.prime();
    let q = p.get() as u8;
    let residual: BTreeSet<PauliWord> =
        PauliWord::nonidentity(p).filter(|w| !set.classes().iter().any(|c| c.contains(w))).collect();
    for u in &residual {
        for v in &residual {
            if u.symplectic_form(v, p) != 0 || !u.independent(v, p).unwrap() {
                continue;
            }
            let inside = (0..q)
                .flat_map(|a| (0..q).map(move |b| (a, b)))
                .map(|(a, b)| u.power(a, p).compose(&v.power(b, p), p))
                .all(|w| w.is_identity() || residual.contains(&w));
            if inside {
                return false;
            }
        }
    }
    true
}

fn random_partial_set(lattice: &ClassLattice, rng: &mut ChaCha8Rng) -> ClassSet {
    let mut order: Vec<&CommutingClass> = lattice.classes().iter().collect();
    order.shuffle(rng);
    let target = rng.random_range(1..=lattice.prime().dim() + 1);
    let mut chosen: Vec<CommutingClass> = Vec::new();
    for c in order {
        if chosen.len() == target {
            break;
        }
        if chosen.iter().all(|d| c.mask().is_disjoint(d.mask())) {
            chosen.push(c.clone());
        }
    }
    ClassSet::candidate(lattice.prime(), chosen).unwrap()
}

#[test]
fn worked_example_at_p3() {
    let g = Golden::worked_p3().unwrap();
    let lat = lattice(3);
    let complete = g.set("complete").unwrap();
    assert_eq!(complete.kind(), SetKind::Complete);
    assert_eq!(complete.covered().len(), 80);

    let first = g.subset_indices("complete", "first").unwrap();
    let subset: Vec<&CommutingClass> = first.iter().map(|&i| &complete.classes()[i]).collect();
    let mut new = new_classes_from_subset(&subset, &lat).unwrap();
    new.sort();
    let mut expected = g.classes(&["CI", "CII"]).unwrap();
    expected.sort();
    assert_eq!(new, expected);

    let eight = assemble_unextendible(complete, &first, &lat).unwrap();
    assert!(eight.same_classes(g.set("unextendible_8").unwrap()));
    let Certification::Unextendible(cert) = certify_unextendible(&eight, &lat) else { panic!("8-class set extends") };
    assert_eq!(cert, g.set("unextendible_8").unwrap().certificate().unwrap());

    let second = g.subset_indices("unextendible_8", "second").unwrap();
    let five = assemble_unextendible(g.set("unextendible_8").unwrap(), &second, &lat).unwrap();
    assert!(five.same_classes(g.set("unextendible_5").unwrap()));
    let sub: Vec<&CommutingClass> = second.iter().map(|&i| &g.set("unextendible_8").unwrap().classes()[i]).collect();
    assert_eq!(new_classes_from_subset(&sub, &lat).unwrap(), vec![g.class("CA").unwrap().clone()]);
    assert!(certify_unextendible(&five, &lat).is_unextendible());
    assert!(residual_oracle(&five) && residual_oracle(&eight));
}

#[test]
fn worked_example_membership() {
    let g = Golden::worked_p3().unwrap();
    let p = prime(3);
    let ca = CommutingClass::span(&PauliWord::new(0, 1, 0, 0), &PauliWord::new(0, 0, 0, 1), p).unwrap();
    assert_eq!(&ca, g.class("CA").unwrap());
    assert!(g.class("C1").unwrap().disjoint(g.class("C2").unwrap()).unwrap());
    assert!(!ca.disjoint(g.class("C4").unwrap()).unwrap());
    assert!(ca.contains(&PauliWord::new(0, 0, 0, 1)) && g.class("C4").unwrap().contains(&PauliWord::new(0, 0, 0, 1)));
}

#[test]
fn four_dimensional_triple() {
    let g = Golden::d4().unwrap();
    let lat = lattice(2);
    let complete = g.set("complete").unwrap();
    let triple = assemble_unextendible(complete, &[0, 1, 2], &lat).unwrap();
    assert!(triple.same_classes(g.set("unextendible_3").unwrap()));
    let Certification::Unextendible(cert) = certify_unextendible(&triple, &lat) else { panic!("triple extends") };
    assert_eq!(cert.residual_word_count, 6);
    assert_eq!(triple.residual().words(prime(2)), g.residual().unwrap());
    assert!(residual_oracle(&triple));
}

#[test]
fn certification_matches_residual_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [2, 3] {
        let lat = lattice(p);
        let mut verdicts = BTreeMap::new();
        for _ in 0..50 {
            let set = random_partial_set(&lat, &mut rng);
            let ours = certify_unextendible(&set, &lat);
            if let Certification::Extendible { witness } = &ours {
                assert!(witness.mask().is_subset(&set.residual()));
            }
            assert_eq!(ours.is_unextendible(), residual_oracle(&set), "{:?}", set.classes());
            *verdicts.entry(ours.is_unextendible()).or_insert(0) += 1;
        }
        // Both outcomes should be exercised.
        assert_eq!(verdicts.len(), 2, "p={p}: {verdicts:?}");
    }
}

#[test]
fn complete_sets_are_exact_covers() {
    for (p, n) in [(2u32, 6usize), (3, 36)] {
        let lat = lattice(p);
        let sets = all_complete_sets(&lat);
        assert_eq!(sets.len(), n);
        for s in &sets {
            assert_eq!(s.len(), (p * p + 1) as usize);
            assert_eq!(s.covered().len(), (p.pow(4) - 1) as usize);
            assert!(certify_unextendible(s, &lat).is_unextendible());
        }
    }
}

#[test]
fn outside_classes_meet_p_plus_one_members_of_a_complete_set() {
    for p in [2, 3] {
        let lat = lattice(p);
        let p = prime(p);
        for complete in all_complete_sets(&lat).iter().take(4) {
            for c in lat.classes().iter().filter(|c| !complete.classes().contains(c)) {
                let mut per_class: BTreeMap<usize, usize> = BTreeMap::new();
                for w in c.members() {
                    let home = complete.classes().iter().position(|d| d.contains(w)).unwrap();
                    *per_class.entry(home).or_insert(0) += 1;
                }
                assert_eq!(per_class.len(), p.as_usize() + 1);
                assert!(per_class.values().all(|&k| k == p.as_usize() - 1));
            }
        }
    }
}

#[test]
fn at_most_two_new_classes_exhaustive_p3() {
    let lat = lattice(3);
    let g = Golden::worked_p3().unwrap();
    let scan = subset_scan(g.set("complete").unwrap(), &lat).unwrap();
    assert_eq!(scan.counts.len(), 210);
    assert!(scan.max_count() <= 2);
    let built = build_complete_set(&lat, TieBreak::Canonical).unwrap();
    assert!(subset_scan(&built, &lat).unwrap().max_count() <= 2);
}

#[test]
fn at_most_two_new_classes_sampled_p5() {
    let lat = lattice(5);
    let complete = build_complete_set(&lat, TieBreak::Canonical).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let idx: Vec<usize> = (0..complete.len()).collect();
    for _ in 0..300 {
        let mut pick: Vec<usize> = idx.choose_multiple(&mut rng, 6).copied().collect();
        pick.sort();
        let sub: Vec<&CommutingClass> = pick.iter().map(|&i| &complete.classes()[i]).collect();
        assert!(new_classes_from_subset(&sub, &lat).unwrap().len() <= 2);
    }
    let admissible = admissible_subsets(&complete, &lat);
    assert!(!admissible.is_empty());
    assert!(admissible.values().all(|v| v.len() <= 2));
}

#[test]
fn no_single_new_class_at_p3_over_every_complete_set() {
    let lat = lattice(3);
    let mut total: BTreeMap<usize, usize> = BTreeMap::new();
    for complete in all_complete_sets(&lat) {
        let scan = theorem2_scan(&complete, &lat).unwrap();
        assert!(scan.never_exactly_one(), "{:?}", scan.histogram);
        for (k, n) in scan.histogram {
            *total.entry(k).or_insert(0) += n;
        }
    }
    assert_eq!(total, BTreeMap::from([(0, 7020), (2, 540)]));
}

#[test]
fn worked_example_scan_regressions() {
    let lat = lattice(3);
    let g = Golden::worked_p3().unwrap();
    let scan = theorem2_scan(g.set("complete").unwrap(), &lat).unwrap();
    assert_eq!(scan.histogram, BTreeMap::from([(0, 195), (2, 15)]));
    let count = |s: &[usize]| scan.counts.iter().find(|(k, _)| k == s).unwrap().1;
    assert_eq!(count(&[0, 1, 4, 6]), 2);
    // {C1, C2, C3, C4} admits nothing.
    assert_eq!(count(&[0, 1, 2, 3]), 0);
    assert!(matches!(
        theorem2_scan(&build_complete_set(&lattice(2), TieBreak::Canonical).unwrap(), &lattice(2)),
        Err(MubError::WrongPrime { expected: 3, got: 2 })
    ));
}

#[test]
fn p2_subsets_each_admit_exactly_one_class() {
    let lat = lattice(2);
    let g = Golden::d4().unwrap();
    let scan = subset_scan(g.set("complete").unwrap(), &lat).unwrap();
    assert_eq!(scan.histogram, BTreeMap::from([(1, 10)]));
    let s = g.set("complete").unwrap();
    let new = new_classes_from_subset(&[&s.classes()[0], &s.classes()[1], &s.classes()[2]], &lat).unwrap();
    assert_eq!(new, vec![g.class("C3").unwrap().clone()]);
}

#[test]
fn admissible_index_agrees_with_scan() {
    for p in [2, 3] {
        let lat = lattice(p);
        for complete in all_complete_sets(&lat).iter().step_by(5) {
            let scan = subset_scan(complete, &lat).unwrap();
            let admissible = admissible_subsets(complete, &lat);
            let from_scan: BTreeMap<Vec<usize>, usize> = scan.counts.into_iter().filter(|(_, n)| *n > 0).collect();
            let from_index: BTreeMap<Vec<usize>, usize> =
                admissible.iter().map(|(k, v)| (k.clone(), v.len())).collect();
            assert_eq!(from_scan, from_index);
        }
    }
}

#[test]
fn product_decomposition_through_third_class() {
    // Whenever a new class holds U₁ ∈ C₁, V₁ ∈ C₂ with U₁V₁ ∈ C₃, some other
    // pair Ũ₂ ∈ C₁, Ṽ₂ ∈ C₂ has Ũ₂Ṽ₂ ∈ C₃ independent of U₁V₁.
    let p = prime(3);
    let lat = lattice(3);
    let g = Golden::worked_p3().unwrap();
    let complete = g.set("complete").unwrap();
    let mut checked = 0;
    for (subset, new) in admissible_subsets(complete, &lat) {
        let classes: Vec<&CommutingClass> = subset.iter().map(|&i| &complete.classes()[i]).collect();
        for ci in &new {
            for (a, b, c) in [(0, 1, 2), (0, 2, 3), (1, 2, 3), (1, 3, 0)] {
                let (c1, c2, c3) = (classes[a], classes[b], classes[c]);
                for u1 in ci.members().iter().filter(|w| c1.contains(w)) {
                    for v1 in ci.members().iter().filter(|w| c2.contains(w)) {
                        let w1 = u1.compose(v1, p);
                        if !c3.contains(&w1) {
                            continue;
                        }
                        checked += 1;
                        let found = c1.members().iter().any(|u2| {
                            c2.members().iter().any(|v2| {
                                let w2 = u2.compose(v2, p);
                                c3.contains(&w2) && w1.independent(&w2, p).unwrap()
                            })
                        });
                        assert!(found);
                    }
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn commutation_constants_can_be_equalised() {
    // For C₁ = ⟨U₁, U₂⟩, C₂ = ⟨V₁, V₂⟩ with [U₁,V₁] = [U₂,V₂] = 0, a power of U₂
    // carries the same constant against V₁ as U₁ does against V₂.
    for p in [3, 5] {
        let p = prime(p);
        let lat = lattice(p.get());
        let complete = build_complete_set(&lat, TieBreak::Canonical).unwrap();
        let (c1, c2) = (&complete.classes()[0], &complete.classes()[1]);
        let mut checked = 0;
        for u1 in c1.members() {
            let v1 = c2.members().iter().find(|v| u1.commutes_with(v, p)).unwrap();
            for u2 in c1.members().iter().filter(|u| u1.independent(u, p).unwrap()) {
                let v2 = c2.members().iter().find(|v| u2.commutes_with(v, p)).unwrap();
                let alpha = u1.symplectic_form(v2, p);
                let j_alpha = u2.symplectic_form(v1, p);
                assert!(alpha != 0 && j_alpha != 0);
                let j = p.mul(j_alpha, p.inv(alpha).unwrap());
                let rescaled = u2.power(p.inv(j).unwrap(), p);
                assert!(c1.contains(&rescaled));
                assert_eq!(rescaled.symplectic_form(v1, p), alpha);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn search_at_p3() {
    let lat = lattice(3);
    let g = Golden::worked_p3().unwrap();
    let eight = search_unextendible(&lat, 8, 1_000_000, TieBreak::Canonical).unwrap();
    assert!(!eight.budget_exhausted);
    assert_eq!(eight.complete_sets_visited, 36);
    assert!(eight.sets.iter().any(|s| s.same_classes(g.set("unextendible_8").unwrap())));
    assert!(eight.sets.iter().all(|s| s.kind() == SetKind::CertifiedUnextendible && residual_oracle(s)));
    let seven = search_unextendible(&lat, 7, 1_000_000, TieBreak::Canonical).unwrap();
    assert!(seven.sets.is_empty());
}

#[test]
fn search_at_p2_finds_the_triple() {
    let lat = lattice(2);
    let g = Golden::d4().unwrap();
    let report = search_unextendible(&lat, 3, 10_000, TieBreak::Canonical).unwrap();
    assert!(report.sets.iter().any(|s| s.same_classes(g.set("unextendible_3").unwrap())));
    assert!(report.sets.iter().all(residual_oracle));
    assert!(search_unextendible(&lat, 4, 10_000, TieBreak::Canonical).unwrap().sets.is_empty());
}

#[test]
fn seeded_search_is_reproducible() {
    let lat = lattice(3);
    let a = search_unextendible(&lat, 8, 40, TieBreak::Seeded(11)).unwrap();
    let b = search_unextendible(&lat, 8, 40, TieBreak::Seeded(11)).unwrap();
    assert_eq!(a, b);
    assert!(a.budget_exhausted);
}

#[test]
fn seeded_complete_sets_are_valid() {
    let lat = lattice(3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let s = build_complete_set(&lat, TieBreak::Seeded(rng.random())).unwrap();
        assert_eq!(union_mask(prime(3), s.classes()).len(), 80);
    }
}

#[test]
fn subset_enumeration_is_lexicographic() {
    let c = combinations(5, 3);
    assert_eq!(c.len(), 10);
    assert_eq!(c.first().unwrap(), &vec![0, 1, 2]);
    assert_eq!(c.last().unwrap(), &vec![2, 3, 4]);
    assert!(c.windows(2).all(|w| w[0] < w[1]));
}
