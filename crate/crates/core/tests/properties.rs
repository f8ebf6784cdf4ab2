use std::collections::BTreeSet;

use proptest::prelude::*;
use rankshift::centrality::Metric;
use rankshift::detection::{
    mixed_sort, residuals, select_topk_abs, select_topk_split, stratified_sort, threshold_filter, OutlierRecord, ResidualSet,
};
use rankshift::eval::{avg_precision_at_k, precision_at_k, r_star};
use rankshift::graph::{NodeSet, TemporalLayer};
use rankshift::ingest::RiskLevel;
use rankshift::ranking::Ranking;

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<usize>>()).prop_shuffle()
}

fn residual_set() -> impl Strategy<Value = ResidualSet> {
    (2usize..60).prop_flat_map(|n| (permutation(n), permutation(n))).prop_map(|(px, py)| {
        let nodes = NodeSet::range(px.len());
        let x = Ranking::from_positions(nodes.clone(), px).unwrap();
        let y = Ranking::from_positions(nodes, py).unwrap();
        residuals(&x, &y).unwrap()
    })
}

fn node_set(list: &[OutlierRecord]) -> BTreeSet<usize> {
    list.iter().map(|r| r.node).collect()
}

/// Per-metric lists over the same residuals, with a ΔHRA vector.
fn lists() -> impl Strategy<Value = (Vec<Vec<OutlierRecord>>, Vec<f64>)> {
    (residual_set(), 1usize..5, 1usize..12).prop_flat_map(|(set, m, k)| {
        let n = set.entries.len();
        (
            Just(set),
            Just(m),
            Just(k),
            prop::collection::vec(prop::collection::vec(any::<bool>(), n), m),
            prop::collection::vec(-5i32..5, n),
        )
    })
    .prop_map(|(set, m, k, masks, hra)| {
        let lists = (0..m)
            .map(|i| {
                let mut s = set.clone();
                s.exclude(|node| masks[i][node]);
                let mut l = select_topk_abs(&s, k);
                for r in &mut l {
                    r.metric = Some(Metric::ALL[i]);
                }
                l
            })
            .collect();
        (lists, hra.into_iter().map(f64::from).collect())
    })
}

proptest! {
    #[test]
    fn residuals_sum_to_zero(set in residual_set()) {
        prop_assert_eq!(set.deltas().iter().sum::<i64>(), 0);
    }

    #[test]
    fn abs_selection_is_contained_in_split(set in residual_set(), k in 0usize..20) {
        let abs = select_topk_abs(&set, k);
        let split = select_topk_split(&set, k, k);
        prop_assert!(node_set(&abs).is_subset(&node_set(&split)));
        let floor = abs.iter().map(|r| r.abs_delta()).min().unwrap_or(u64::MAX);
        let chosen = node_set(&abs);
        for r in set.entries.iter().filter(|r| r.delta != 0 && !chosen.contains(&r.node)) {
            prop_assert!(abs.len() == k && r.delta.unsigned_abs() <= floor);
        }
        for w in split.windows(2) {
            prop_assert!(w[0].abs_delta() >= w[1].abs_delta());
        }
        prop_assert!(split.iter().filter(|r| r.delta > 0).count() <= k);
        prop_assert!(split.iter().filter(|r| r.delta < 0).count() <= k);
    }

    #[test]
    fn filter_partitions_its_input(
        set in residual_set(),
        seed in any::<u64>(),
        t_hr in 0.5f64..20.0,
        multiplier in 1.0f64..6.0,
    ) {
        let n = set.entries.len();
        let edge = |i: usize, salt: u64| (i, (i + 1 + (seed.wrapping_mul(i as u64 + salt) % (n as u64 - 1)) as usize) % n, 1.0 + (seed >> (i % 32)) as f64 % 17.0);
        let nodes = set.nodes.clone();
        let lx = TemporalLayer::new("x", nodes.clone(), (0..n).map(|i| edge(i, 1))).unwrap();
        let ly = TemporalLayer::new("y", nodes, (0..n).step_by(2).map(|i| edge(i, 7))).unwrap();
        let risk: Vec<Option<RiskLevel>> = (0..n)
            .map(|i| match (seed >> (i % 60)) % 4 { 0 => None, 1 => Some(RiskLevel::Low), 2 => Some(RiskLevel::Medium), _ => Some(RiskLevel::High) })
            .collect();
        let outliers = select_topk_split(&set, 10, 10);
        let total = outliers.len();
        let out = threshold_filter(outliers, &lx, &ly, &risk, t_hr, multiplier).unwrap();
        prop_assert_eq!(out.kept.len() + out.removed.len(), total);
        for r in &out.removed {
            prop_assert!(r.strength_x <= r.threshold && r.strength_y <= r.threshold);
        }
        for (i, r) in out.kept.iter().enumerate() {
            prop_assert_eq!(r.final_position, Some(i + 1));
        }
    }

    #[test]
    fn final_lists_hold_the_union_once((lists, hra) in lists()) {
        let union: BTreeSet<usize> = lists.iter().flat_map(|l| node_set(l)).collect();
        for merged in [mixed_sort(&lists, &hra), stratified_sort(&lists, &hra)] {
            let nodes: Vec<usize> = merged.iter().map(|e| e.record.node).collect();
            prop_assert_eq!(nodes.len(), union.len());
            prop_assert_eq!(nodes.iter().copied().collect::<BTreeSet<_>>(), union.clone());
            for (i, e) in merged.iter().enumerate() {
                prop_assert_eq!(e.record.final_position, Some(i + 1));
                prop_assert!(!e.metrics.is_empty());
            }
        }
        let mixed = mixed_sort(&lists, &hra);
        for w in mixed.windows(2) {
            prop_assert!(w[0].record.delta_hra >= w[1].record.delta_hra);
        }
    }

    #[test]
    fn stratified_ignores_list_order((lists, hra) in lists(), rot in 0usize..4) {
        let mut turned = lists.clone();
        let len = turned.len();
        turned.rotate_left(rot % len);
        turned.reverse();
        prop_assert_eq!(stratified_sort(&lists, &hra), stratified_sort(&turned, &hra));
        prop_assert_eq!(mixed_sort(&lists, &hra), mixed_sort(&turned, &hra));
    }

    #[test]
    fn prepending_moves_precision_the_right_way(rel in prop::collection::vec(any::<bool>(), 1..40), k in 1usize..45, head in any::<bool>()) {
        let mut longer = vec![head];
        longer.extend(&rel);
        let (before, after) = (precision_at_k(&rel, k), precision_at_k(&longer, k));
        if head { prop_assert!(after >= before) } else { prop_assert!(after <= before) }
    }

    #[test]
    fn promoting_a_relevant_item_never_hurts_avg_precision(rel in prop::collection::vec(any::<bool>(), 2..40), k in 1usize..45, at in any::<prop::sample::Index>()) {
        let i = at.index(rel.len() - 1);
        prop_assume!(!rel[i] && rel[i + 1] && i + 1 < k);
        let mut swapped = rel.clone();
        swapped.swap(i, i + 1);
        prop_assert!(avg_precision_at_k(&swapped, k) >= avg_precision_at_k(&rel, k) - 1e-15);
    }

    #[test]
    fn recall_at_full_cutoff_is_one(rel in prop::collection::vec(any::<bool>(), 1..40)) {
        let tp = rel.iter().filter(|r| **r).count();
        prop_assert_eq!(r_star(&rel, rel.len(), tp), (tp > 0).then_some(1.0));
    }
}
