use fairmerge::balance_frac::{balance_pq, detect_case};
use fairmerge::balance_int::balance_p;
use fairmerge::fairify::make_clusters_fair;
use fairmerge::instances::gen_random;
use fairmerge::oracle::{bell_number, enum_partitions, oracle_closest_balanced, oracle_closest_fair};
use fairmerge::workspace::replay;
use fairmerge::*;
use proptest::prelude::*;

/// Ratios covering all three regimes, including unreduced and red-majority forms.
const RATIOS: &[(usize, usize)] = &[(1, 1), (2, 2), (2, 1), (3, 1), (4, 1), (3, 2), (5, 2), (5, 3), (1, 2), (2, 5)];

fn random_instance(max_units: usize) -> impl Strategy<Value = (ColoredInstance, Clustering)> {
    (0..RATIOS.len(), 1..=max_units, any::<u64>(), any::<u64>()).prop_map(|(r, t, seed, kseed)| {
        let (p, q) = RATIOS[r];
        let n = (p + q) * t;
        let k = 1 + (kseed as usize % n);
        gen_random(n, p, q, k, seed).unwrap()
    })
}

fn labels(max_n: usize) -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (1..=max_n).prop_flat_map(|n| (prop::collection::vec(0u8..6, n), prop::collection::vec(0u8..6, n)))
}

fn check_subset_counts(t: &Transcript) {
    for phase in &t.phases {
        assert_eq!(
            phase.subsets_cut * phase.modulus,
            phase.deficit_total,
            "routine {} on {:?}",
            phase.routine,
            phase.color
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fast_distance_matches_pair_count((a, b) in labels(40)) {
        let (a, b) = (Clustering::from_labels(&a), Clustering::from_labels(&b));
        let d = dist(&a, &b).unwrap();
        prop_assert_eq!(d, dist_fast(&a, &b).unwrap());
        prop_assert_eq!(d, dist(&b, &a).unwrap());
        prop_assert_eq!(dist(&a, &a).unwrap(), 0);
    }

    #[test]
    fn distance_triangle_inequality((a, b) in labels(20), c in prop::collection::vec(0u8..6, 20)) {
        let n = a.len();
        let (a, b, c) = (Clustering::from_labels(&a), Clustering::from_labels(&b), Clustering::from_labels(&c[..n]));
        prop_assert!(dist(&a, &c).unwrap() <= dist(&a, &b).unwrap() + dist(&b, &c).unwrap());
    }

    #[test]
    fn closest_fair_output_is_fair_and_replays((inst, c) in random_instance(12)) {
        let (out, report, t) = closest_fair(&inst, &c).unwrap();
        prop_assert!(is_fair(&inst, &out));
        let d = dist_fast(&c, &out).unwrap();
        prop_assert_eq!(report.achieved_distance, d);
        prop_assert_eq!(replay(&t, &out).unwrap(), d);
        check_subset_counts(&t);
    }

    #[test]
    fn balancing_output_is_balanced((inst, c) in random_instance(12)) {
        let result = match inst.regime() {
            Regime::Equal => return Ok(()),
            Regime::Integral => balance_p(&inst, &c),
            Regime::Fractional => balance_pq(&inst, &c),
        };
        let (out, t) = result.unwrap();
        prop_assert!(is_balanced(&inst, &out));
        prop_assert_eq!(replay(&t, &out).unwrap(), dist_fast(&c, &out).unwrap());
        check_subset_counts(&t);
    }

    #[test]
    fn fractional_routine_matches_detected_case((inst, c) in random_instance(12)) {
        prop_assume!(inst.regime() == Regime::Fractional);
        let (_, t) = balance_pq(&inst, &c).unwrap();
        let expected = detect_case(&inst, &c).unwrap().routine();
        for phase in &t.phases {
            prop_assert_eq!(phase.routine.as_str(), expected);
        }
    }

    #[test]
    fn balance_pq_is_color_swap_invariant((inst, c) in random_instance(10)) {
        prop_assume!(inst.regime() == Regime::Fractional);
        let swapped = inst.swap_colors().unwrap();
        prop_assert_eq!(balance_pq(&inst, &c).unwrap(), balance_pq(&swapped, &c).unwrap());
    }

    #[test]
    fn fairify_moves_only_reds_and_conserves((inst, c) in random_instance(12)) {
        let balanced = match inst.regime() {
            Regime::Equal => return Ok(()),
            Regime::Integral => balance_p(&inst, &c).unwrap().0,
            Regime::Fractional => balance_pq(&inst, &c).unwrap().0,
        };
        let (out, t) = make_clusters_fair(&inst, &balanced).unwrap();
        prop_assert!(is_fair(&inst, &out));
        prop_assert!(t.moves.iter().all(|m| m.points.iter().all(|&v| inst.color(v) == Color::Red)));
        let (p, q) = (inst.p(), inst.q());
        let surplus: usize = balanced
            .color_counts(&inst)
            .iter()
            .map(|&[r, b]| r.saturating_sub(b / p * q))
            .sum();
        prop_assert_eq!(t.points_moved(), surplus);
        prop_assert_eq!(replay(&t, &out).unwrap(), dist_fast(&balanced, &out).unwrap());
    }

    #[test]
    fn consensus_returns_best_candidate(
        (inst, c) in random_instance(6),
        seeds in prop::collection::vec(any::<u64>(), 1..4),
        ell_pick in 0usize..3,
    ) {
        let n = inst.n();
        let mut inputs = vec![c];
        for s in seeds {
            let k = 1 + (s as usize % n);
            let (p, q) = inst.given_ratio();
            inputs.push(gen_random(n, p, q, k, s).unwrap().1);
        }
        let ell = [Ell::Finite(1.0), Ell::Finite(2.0), Ell::Infinity][ell_pick];
        let r = fair_consensus(&inst, &inputs, ell).unwrap();
        prop_assert!(is_fair(&inst, &r.clustering));
        for (k, cand) in r.candidate_distances.iter().enumerate() {
            let ord = compare_lmean(&r.distances, cand, ell);
            prop_assert!(ord.is_le());
            if k < r.chosen {
                prop_assert!(ord.is_lt());
            }
        }
        for (j, d) in inputs.iter().enumerate() {
            prop_assert_eq!(r.distances[j], dist(d, &r.clustering).unwrap());
        }
    }

    #[test]
    fn lmean_order_agrees_with_values(a in prop::collection::vec(0u64..200, 1..6), b in prop::collection::vec(0u64..200, 1..6), l in 1.0f64..5.0) {
        let ell = Ell::Finite(l);
        let (x, y) = (lmean(&a, ell).unwrap().value, lmean(&b, ell).unwrap().value);
        if (x - y).abs() > 1e-9 * x.max(y).max(1.0) {
            prop_assert_eq!(compare_lmean(&a, &b, ell), x.partial_cmp(&y).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_ignores_cluster_relabeling((inst, c) in random_instance(3), shift in 1usize..5) {
        prop_assume!(inst.n() <= 9);
        let relabeled: Vec<usize> = c.labels().iter().map(|&l| (l + shift) * 7).collect();
        let r = Clustering::from_labels(&relabeled);
        prop_assert_eq!(
            oracle_closest_fair(&inst, &c).unwrap().optimum,
            oracle_closest_fair(&inst, &r).unwrap().optimum
        );
    }

    #[test]
    fn balanced_optimum_never_exceeds_fair((inst, c) in random_instance(3)) {
        prop_assume!(inst.n() <= 9);
        let bal = oracle_closest_balanced(&inst, &c).unwrap();
        let fair = oracle_closest_fair(&inst, &c).unwrap();
        prop_assert!(bal.optimum <= fair.optimum);
        prop_assert_eq!(fair.partitions_enumerated, bell_number(inst.n()));
    }

    #[test]
    fn oracle_ignores_swapping_same_colored_points((inst, c) in random_instance(3), i in 0usize..9, j in 0usize..9) {
        let n = inst.n();
        prop_assume!(n <= 9);
        let (i, j) = (i % n, j % n);
        prop_assume!(inst.color(i) == inst.color(j));
        let mut labels = c.labels().to_vec();
        labels.swap(i, j);
        let permuted = Clustering::from_labels(&labels);
        prop_assert_eq!(
            oracle_closest_fair(&inst, &c).unwrap().optimum,
            oracle_closest_fair(&inst, &permuted).unwrap().optimum
        );
    }
}

#[test]
fn partition_counts_match_bell_numbers() {
    for n in 0..=9 {
        assert_eq!(enum_partitions(n).unwrap().count() as u64, bell_number(n));
    }
}
