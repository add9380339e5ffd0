//! Exact expected losses on undirected trees in linear time.
//!
//! On a tree the path between two targets is unique and edges fail
//! independently, so `t'` joins the cascade from `t` with the product of the
//! edge probabilities along the path. Rooting the tree anywhere, a downward
//! pass sums each subtree's contribution and an upward pass adds the rest of
//! the tree, giving every `L(t)` with two traversals.

use alloc::vec;
use alloc::vec::Vec;

use crate::cascade::ExpectedLossVector;
use crate::error::{Error, Result};
use crate::graph::CascadeModel;

pub fn tree_expected_losses(model: &CascadeModel) -> Result<ExpectedLossVector> {
    let g = model.graph();
    if g.is_directed() {
        return Err(Error::DirectedModel);
    }
    let n = g.n();

    let mut tree_edges = Vec::new();
    match model {
        CascadeModel::Sparse(g) => {
            tree_edges.extend(g.edges().iter().map(|e| (e.source, e.dest, e.prob)));
        }
        CascadeModel::Dense(_) => {
            model.for_each_candidate_edge(|a, b, p| tree_edges.push((a, b, p)))
        }
    }
    if tree_edges.len() != n - 1 {
        return Err(Error::NotATree(alloc::format!(
            "{n} targets need {} edges, found {}",
            n - 1,
            tree_edges.len()
        )));
    }

    let mut offsets = vec![0usize; n + 1];
    for &(a, b, _) in &tree_edges {
        offsets[a + 1] += 1;
        offsets[b + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets[..n].to_vec();
    let mut adj = vec![(0usize, 0.0f64); 2 * tree_edges.len()];
    for &(a, b, p) in &tree_edges {
        adj[fill[a]] = (b, p);
        fill[a] += 1;
        adj[fill[b]] = (a, p);
        fill[b] += 1;
    }

    // Breadth-first order from target 0; parent edge probability per node.
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut parent_prob = vec![0.0; n];
    parent[0] = 0;
    order.push(0);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &(v, p) in &adj[offsets[u]..offsets[u + 1]] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                parent_prob[v] = p;
                order.push(v);
            }
        }
    }
    if order.len() != n {
        return Err(Error::NotATree(alloc::format!(
            "graph is disconnected: {} of {n} targets reachable",
            order.len()
        )));
    }

    let losses = |worths: &[f64]| -> Vec<f64> {
        // down[v] = w_v + sum over children c of p(v,c) * down[c]
        let mut down = worths.to_vec();
        for &v in order.iter().skip(1).rev() {
            down[parent[v]] += parent_prob[v] * down[v];
        }
        // up[c] = p(v,c) * (w_v + up[v] + sum over siblings s of p(v,s) * down[s])
        let mut up = vec![0.0; n];
        for &c in order.iter().skip(1) {
            let v = parent[c];
            let p = parent_prob[c];
            up[c] = p * (down[v] - p * down[c] + up[v]);
        }
        down.iter().zip(&up).map(|(d, u)| d + u).collect()
    };

    ExpectedLossVector::exact(losses(g.worths()), losses(g.attacker_worths()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DependencyGraph;

    fn model(n: usize, edges: &[(usize, usize, f64)], w: Vec<f64>) -> CascadeModel {
        DependencyGraph::undirected(n, edges)
            .unwrap()
            .with_worths(w, None)
            .unwrap()
            .into()
    }

    #[test]
    fn single_node() {
        let l = tree_expected_losses(&model(1, &[], vec![3.0])).unwrap();
        assert_eq!(l.loss_def, vec![3.0]);
    }

    #[test]
    fn path_of_three() {
        let l = tree_expected_losses(&model(3, &[(0, 1, 0.5), (1, 2, 0.5)], vec![1.0; 3])).unwrap();
        assert!((l.loss_def[0] - 1.75).abs() < 1e-12);
        assert!((l.loss_def[1] - 2.0).abs() < 1e-12);
        assert!((l.loss_def[2] - 1.75).abs() < 1e-12);
    }

    #[test]
    fn star_with_certain_edges_sums_everything() {
        let edges: Vec<_> = (1..6).map(|i| (0, i, 1.0)).collect();
        let w = vec![0.5, 1.0, 2.0, 0.0, 1.5, 1.0];
        let l = tree_expected_losses(&model(6, &edges, w)).unwrap();
        assert!(l.loss_def.iter().all(|&x| (x - 6.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_non_trees() {
        let cyc = model(3, &[(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)], vec![1.0; 3]);
        assert!(matches!(
            tree_expected_losses(&cyc),
            Err(Error::NotATree(_))
        ));
        // Right edge count but disconnected (cycle plus isolated node).
        let split = model(4, &[(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)], vec![1.0; 4]);
        assert!(matches!(
            tree_expected_losses(&split),
            Err(Error::NotATree(_))
        ));
        let directed: CascadeModel = DependencyGraph::directed(2, &[(0, 1, 0.5)]).unwrap().into();
        assert_eq!(
            tree_expected_losses(&directed).unwrap_err(),
            Error::DirectedModel
        );
    }
}
