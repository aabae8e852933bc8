mod common;

use common::*;
use lorentz_ot::feasibility::{
    counting_form, extract_permutation, hall_bruteforce, hall_bruteforce_counts, j_related, matching_is_unique,
    tight_split, CausalRelation, FeasibilityError, PermutationResult,
};
use lorentz_ot::IntegerMarginals;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_marginals(n: usize) -> IntegerMarginals {
    IntegerMarginals { denominator: n as u64, source: vec![1; n], target: vec![1; n], exact: true }
}

fn check_permutation(rel: &CausalRelation) {
    let n = rel.rows();
    let hall = hall_bruteforce_counts(rel, &unit_marginals(n)).unwrap();
    match extract_permutation(rel).unwrap() {
        PermutationResult::Found(sigma) => {
            assert!(hall.is_none());
            let mut seen = vec![false; n];
            for (i, &j) in sigma.iter().enumerate() {
                assert!(rel.admits(i, j) && !seen[j]);
                seen[j] = true;
            }
        }
        PermutationResult::Deficient { rows, columns } => {
            assert!(hall.is_some());
            assert_eq!(rel.future_of(&rows), columns);
            assert!(columns.len() < rows.len());
        }
    }
}

#[test]
fn permutation_iff_hall_exhaustive_small() {
    for n in 1..=4usize {
        for bits in 0u32..(1 << (n * n)) {
            let adj = (0..n * n).map(|k| bits >> k & 1 == 1).collect();
            check_permutation(&CausalRelation::from_adjacency(n, n, adj));
        }
    }
}

#[test]
fn permutation_iff_hall_random_five_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4000 {
        let n = rng.gen_range(5..=6);
        check_permutation(&random_relation(&mut rng, n, n));
    }
}

#[test]
fn full_relation_uniqueness() {
    let rel = CausalRelation::from_adjacency(3, 3, vec![true; 9]);
    let PermutationResult::Found(sigma) = extract_permutation(&rel).unwrap() else { panic!() };
    assert!(!matching_is_unique(&rel, &sigma));
    let diag = CausalRelation::from_pairs(3, 3, &[(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]);
    assert!(matching_is_unique(&diag, &[0, 1, 2]));
}

/// Relation where `A` reaches exactly `B` and the rest reaches anything.
fn tight_instance(rng: &mut ChaCha8Rng) -> (CausalRelation, IntegerMarginals, Vec<usize>) {
    let (m, n) = (rng.gen_range(2..=8), rng.gen_range(2..=8));
    let a = rng.gen_range(1..m);
    let b = rng.gen_range(1..n);
    let mass_a = rng.gen_range(b.max(a) as u64..=12);
    let mass_rest = rng.gen_range((n - b).max(m - a) as u64..=12);
    let mut source = composition(rng, a, mass_a);
    source.extend(composition(rng, m - a, mass_rest));
    let mut target = composition(rng, b, mass_a);
    target.extend(composition(rng, n - b, mass_rest));
    let p = rng.gen_range(0.3..0.9);
    let adj = (0..m * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i < a && j >= b {
                false
            } else {
                rng.gen_bool(p)
            }
        })
        .collect();
    let marg = IntegerMarginals { denominator: mass_a + mass_rest, source, target, exact: true };
    (CausalRelation::from_adjacency(m, n, adj), marg, (0..a).collect())
}

#[test]
fn tight_split_preserves_hall() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 200 {
        let (rel, marg, set) = tight_instance(&mut rng);
        if hall_bruteforce_counts(&rel, &marg).unwrap().is_some() {
            continue;
        }
        let (inner, outer) = match tight_split(&rel, &marg, &set) {
            Ok(split) => split,
            Err(FeasibilityError::NotTight { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        for child in [&inner, &outer] {
            assert_eq!(child.marginals.source.iter().sum::<u64>(), child.marginals.denominator);
            assert_eq!(child.marginals.target.iter().sum::<u64>(), child.marginals.denominator);
            assert!(hall_bruteforce_counts(&child.relation, &child.marginals).unwrap().is_none());
        }
        checked += 1;
    }
}

#[test]
fn tight_split_rejects_full_set() {
    let rel = CausalRelation::from_adjacency(2, 2, vec![true; 4]);
    let marg = unit_marginals(2);
    assert!(matches!(tight_split(&rel, &marg, &[0, 1]), Err(FeasibilityError::NotTight { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn flow_matches_hall(seed in any::<u64>(), m in 1usize..=8, n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = rng.gen_range(m.max(n) as u64..=16);
        let (mu, nu) = random_pair(&mut rng, 1, m, n, total);
        let rel = random_relation(&mut rng, m, n);
        let v = j_related(&rel, &mu, &nu);
        prop_assert_eq!(v.related, hall_bruteforce(&rel, &mu, &nu).unwrap().is_none());
        prop_assert!(v.witness_coupling.is_some() != v.violating_set.is_some());
        if let Some(c) = v.witness_coupling {
            prop_assert!(c.is_supported_on(rel.adjacency()));
            prop_assert!(c.has_marginals(&v.marginals.source, &v.marginals.target));
        }
        if let Some(s) = v.violating_set {
            let marg = counting_form(&mu, &nu);
            let mass: u64 = s.indices.iter().map(|&i| marg.source[i]).sum();
            let reach: u64 = rel.future_of(&s.indices).iter().map(|&j| marg.target[j]).sum();
            prop_assert!(reach < mass);
        }
    }

    #[test]
    fn fattening_is_monotone(seed in any::<u64>(), eps in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let (mu, nu) = random_pair(&mut rng, 2, m, n, 8);
        let model = minkowski(2);
        let exact = CausalRelation::build(&model, &mu, &nu, 0.0).unwrap();
        let fat = CausalRelation::build(&model, &mu, &nu, eps).unwrap();
        for (a, b) in exact.adjacency().iter().zip(fat.adjacency()) {
            prop_assert!(!a || *b);
        }
        if j_related(&exact, &mu, &nu).related {
            prop_assert!(j_related(&fat, &mu, &nu).related);
        }
    }
}
