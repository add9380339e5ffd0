//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use netdefense_core::{DependencyGraph, GameInstance, TargetId};

/// Expected losses on a tree by summing, from every root, the product of
/// edge probabilities along each path (quadratic time).
pub fn path_product_losses(n: usize, edges: &[(usize, usize, f64)], w: &[f64]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, p) in edges {
        adj[a].push((b, p));
        adj[b].push((a, p));
    }
    (0..n)
        .map(|root| {
            let mut total = 0.0;
            let mut stack = vec![(root, usize::MAX, 1.0)];
            while let Some((u, parent, reach)) = stack.pop() {
                total += w[u] * reach;
                for &(v, p) in &adj[u] {
                    if v != parent {
                        stack.push((v, u, reach * p));
                    }
                }
            }
            total
        })
        .collect()
}

/// Exact expected component worth per target by enumerating all live-edge
/// subsets of an undirected graph.
pub fn enumerate_losses(g: &DependencyGraph) -> Vec<f64> {
    let n = g.n();
    let edges = g.edges();
    let m = edges.len();
    assert!(m <= 20, "enumeration is exponential in the edge count");
    let mut out = vec![0.0; n];
    for mask in 0u32..(1 << m) {
        let mut prob = 1.0;
        let mut label: Vec<usize> = (0..n).collect();
        for (i, e) in edges.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prob *= e.prob;
                let (from, to) = (label[e.source], label[e.dest]);
                if from != to {
                    for l in label.iter_mut() {
                        if *l == from {
                            *l = to;
                        }
                    }
                }
            } else {
                prob *= 1.0 - e.prob;
            }
        }
        if prob == 0.0 {
            continue;
        }
        for t in 0..n {
            let comp: f64 = (0..n)
                .filter(|&u| label[u] == label[t])
                .map(|u| g.worths()[u])
                .sum();
            out[t] += prob * comp;
        }
    }
    out
}

/// Defender utility of `policy` with the attacker best responding and ties
/// going to the defender. Written against the raw matrices.
pub fn brute_evaluate(inst: &GameInstance, q: &[Vec<f64>]) -> (f64, TargetId) {
    let n = inst.n();
    let k = inst.num_options();
    let u = inst.utilities();
    let att: Vec<f64> = (0..n)
        .map(|t| (0..k).map(|o| u.v(o, t) * q[t][o]).sum())
        .collect();
    let def: Vec<f64> = (0..n)
        .map(|t| (0..k).map(|o| u.u(o, t) * q[t][o]).sum())
        .collect();
    let best = att.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut target = usize::MAX;
    for t in 0..n {
        if att[t] >= best - 1e-12 && (target == usize::MAX || def[t] > def[target]) {
            target = t;
        }
    }
    let r = inst.priors().attack_prob;
    let g = &inst.priors().failure;
    let random: f64 = (0..n).map(|t| g[t] * def[t]).sum();
    let cost: f64 = (0..n)
        .map(|t| {
            (0..k)
                .map(|o| inst.configs().cost(o, t) * q[t][o])
                .sum::<f64>()
        })
        .sum();
    (
        r * def[target] + (1.0 - r) * random - cost,
        TargetId(target),
    )
}

/// Best objective over two-option policies with defense probabilities on a
/// grid of `steps + 1` points per target.
pub fn grid_search(inst: &GameInstance, steps: usize) -> f64 {
    let n = inst.n();
    assert_eq!(inst.num_options(), 2);
    let mut idx = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let q: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| {
                let d = i as f64 / steps as f64;
                vec![1.0 - d, d]
            })
            .collect();
        best = best.max(brute_evaluate(inst, &q).0);
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] <= steps {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Random labeled tree by attaching each node to a uniformly chosen earlier one.
pub fn random_tree(n: usize, mut next: impl FnMut() -> f64) -> Vec<(usize, usize, f64)> {
    (1..n)
        .map(|v| {
            let parent = ((next() * v as f64) as usize).min(v - 1);
            (parent, v, next())
        })
        .collect()
}
