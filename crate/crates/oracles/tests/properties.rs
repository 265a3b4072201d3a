use cmabt_oracles::{
    brute_force_best, greedy_im_with, influence_spread_exact, influence_spread_mc, top_k_indices, Direction,
    Subsets, WeightedGraph, GREEDY_RATIO,
};
use proptest::prelude::*;

fn sorted_reference(w: &[f64], k: usize, dir: Direction) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = match dir {
            Direction::Max => w[b].total_cmp(&w[a]),
            Direction::Min => w[a].total_cmp(&w[b]),
        };
        ord.then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    // coarse grid so ties actually occur
    prop::collection::vec((0u8..8).prop_map(|x| x as f64 / 8.0), 1..=64)
}

fn small_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..=6).prop_flat_map(|v| {
        prop::collection::vec((0..v, 0..v, 0u8..=4), 0..=8).prop_map(move |raw| {
            let mut seen = std::collections::BTreeSet::new();
            let triples: Vec<_> = raw
                .into_iter()
                .filter(|&(a, b, _)| a != b && seen.insert((a, b)))
                .map(|(a, b, p)| (a, b, p as f64 / 4.0))
                .collect();
            WeightedGraph::from_triples(v, &triples).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn top_k_matches_full_sort(w in weights(), kf in 0.0f64..=1.0, max in any::<bool>()) {
        let k = (kf * w.len() as f64) as usize;
        let dir = if max { Direction::Max } else { Direction::Min };
        prop_assert_eq!(top_k_indices(&w, k, dir).unwrap(), sorted_reference(&w, k, dir));
    }

    #[test]
    fn raising_a_selected_weight_keeps_it(w in weights(), kf in 0.0f64..=1.0, pick in any::<prop::sample::Index>(), bump in 0.0f64..2.0) {
        let k = ((kf * w.len() as f64) as usize).max(1);
        let sel = top_k_indices(&w, k, Direction::Max).unwrap();
        let arm = sel[pick.index(sel.len())];
        let mut w2 = w.clone();
        w2[arm] += bump;
        prop_assert!(top_k_indices(&w2, k, Direction::Max).unwrap().contains(&arm));
    }

    #[test]
    fn greedy_exact_within_ratio(g in small_graph(), kf in 0.0f64..=1.0) {
        let v = g.node_count();
        let k = ((kf * v as f64) as usize).clamp(1, v);
        let (_, greedy) = greedy_im_with(v, k, |_, s| influence_spread_exact(&g, s)).unwrap();
        let spread = |a: &cmabt_core::Action, _: &[f64]| influence_spread_exact(&g, &a.indices()).unwrap();
        let (_, best) = brute_force_best(spread, &Subsets { m: v, size: k, up_to: false }, &[]).unwrap();
        prop_assert!(greedy >= GREEDY_RATIO * best - 1e-12, "greedy {} best {}", greedy, best);
    }
}

#[test]
fn monte_carlo_spread_converges_to_exact() {
    let g = WeightedGraph::from_triples(
        6,
        &[(0, 1, 0.5), (0, 2, 0.3), (1, 3, 0.7), (2, 3, 0.4), (3, 4, 0.6), (4, 5, 0.2), (5, 0, 0.9)],
    )
    .unwrap();
    let v = g.node_count() as f64;
    for (seeds, mc) in [(vec![0], 2000usize), (vec![1, 2], 5000), (vec![4], 20000)] {
        let exact = influence_spread_exact(&g, &seeds).unwrap();
        let est = influence_spread_mc(&g, &seeds, mc, 42);
        assert!((est - exact).abs() <= 3.0 * (v * v / mc as f64).sqrt(), "{seeds:?}: {est} vs {exact}");
    }
}
