mod common;

use netdefense_core::cascade::estimate_component_losses;
use netdefense_core::tree::tree_expected_losses;
use netdefense_core::{CascadeModel, DependencyGraph};
use proptest::prelude::*;

fn tree_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>, Vec<f64>)> {
    (1usize..=50).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
        (
            Just(n),
            parents,
            prop::collection::vec(0.0f64..=1.0, n.saturating_sub(1)),
            prop::collection::vec(0.0f64..=1.0, n),
            // Shuffle labels so the root is not always target 0.
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(|(n, parents, probs, w, perm)| {
                let edges = parents
                    .iter()
                    .zip(&probs)
                    .enumerate()
                    .map(|(i, (&p, &prob))| (perm[p], perm[i + 1], prob))
                    .collect();
                (n, edges, w)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rerooting_matches_path_products((n, edges, w) in tree_strategy()) {
        let g = DependencyGraph::undirected(n, &edges).unwrap().with_worths(w.clone(), None).unwrap();
        let fast = tree_expected_losses(&CascadeModel::Sparse(g)).unwrap();
        let slow = common::path_product_losses(n, &edges, &w);
        for t in 0..n {
            prop_assert!((fast.loss_def[t] - slow[t]).abs() <= 1e-9, "t={} {} vs {}", t, fast.loss_def[t], slow[t]);
            prop_assert!(fast.loss_def[t] >= w[t] - 1e-12);
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact_tree_losses() {
    // Four-standard-error agreement for at least 99% of (tree, target) pairs.
    let mut state = 0x1234_5678_u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let (mut pairs, mut good) = (0, 0);
    for seed in 0..20u64 {
        let n = 5 + (next() * 25.0) as usize;
        let edges = common::random_tree(n, &mut next);
        let w: Vec<f64> = (0..n).map(|_| next()).collect();
        let g = DependencyGraph::undirected(n, &edges)
            .unwrap()
            .with_worths(w, None)
            .unwrap();
        let model = CascadeModel::Sparse(g);
        let exact = tree_expected_losses(&model).unwrap();
        let est = estimate_component_losses(&model, 10_000, seed).unwrap();
        for t in 0..n {
            pairs += 1;
            if (est.loss_def[t] - exact.loss_def[t]).abs() <= 4.0 * est.stderr_def[t] + 1e-12 {
                good += 1;
            }
        }
    }
    assert!(good as f64 >= 0.99 * pairs as f64, "{good}/{pairs}");
}
