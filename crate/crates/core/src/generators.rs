//! Random graph models and worth assignment.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::graph::{DependencyGraph, Directedness, Edge};
use crate::rng;

/// Cascade probability given to generated edges unless overridden.
pub const DEFAULT_CASCADE_PROB: f64 = 0.5;

/// Erdos-Renyi model: every pair independently carries an edge with
/// probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErdosRenyi {
    pub n: usize,
    pub p: f64,
    pub cascade_prob: f64,
    pub directedness: Directedness,
}

impl ErdosRenyi {
    pub fn new(n: usize, p: f64) -> Self {
        ErdosRenyi {
            n,
            p,
            cascade_prob: DEFAULT_CASCADE_PROB,
            directedness: Directedness::Undirected,
        }
    }

    /// Edge probability giving the requested expected degree on `n` nodes.
    pub fn with_average_degree(n: usize, avg_degree: f64) -> Self {
        let p = if n > 1 {
            avg_degree / (n - 1) as f64
        } else {
            0.0
        };
        Self::new(n, p.min(1.0))
    }

    pub fn generate(&self, seed: u64) -> Result<DependencyGraph> {
        if self.n == 0 {
            return Err(invalid!("Erdos-Renyi needs n >= 1"));
        }
        check_prob(self.p, "edge probability")?;
        check_prob(self.cascade_prob, "cascade probability")?;
        let mut rng = rng::seeded(seed);
        let mut edges = Vec::new();
        let directed = self.directedness.is_directed();
        for a in 0..self.n {
            let start = if directed { 0 } else { a + 1 };
            for b in start..self.n {
                if a == b {
                    continue;
                }
                if rng.gen::<f64>() < self.p {
                    edges.push(Edge {
                        source: a,
                        dest: b,
                        prob: self.cascade_prob,
                    });
                }
            }
        }
        DependencyGraph::new(self.n, self.directedness, edges)
    }
}

/// `ER(n, p)` with the default cascade probability, undirected.
pub fn generate_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<DependencyGraph> {
    ErdosRenyi::new(n, p).generate(seed)
}

/// Generalized preferential attachment. Starting from two nodes joined by an
/// edge, node `i` attaches to `min(m, i)` distinct earlier nodes, each drawn
/// with probability proportional to `degree^mu` among those not yet chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreferentialAttachment {
    pub n: usize,
    pub m: usize,
    pub mu: f64,
    pub cascade_prob: f64,
}

impl PreferentialAttachment {
    pub fn new(n: usize, m: usize, mu: f64) -> Self {
        PreferentialAttachment {
            n,
            m,
            mu,
            cascade_prob: DEFAULT_CASCADE_PROB,
        }
    }

    pub fn generate(&self, seed: u64) -> Result<DependencyGraph> {
        let PreferentialAttachment { n, m, mu, .. } = *self;
        if n < 2 {
            return Err(invalid!("preferential attachment needs n >= 2"));
        }
        if m == 0 {
            return Err(invalid!("preferential attachment needs m >= 1"));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(invalid!("exponent mu {mu} must be finite and >= 0"));
        }
        check_prob(self.cascade_prob, "cascade probability")?;

        let mut rng = rng::seeded(seed);
        let mut degree = vec![0usize; n];
        let mut weight = vec![0.0f64; n];
        let mut edges = Vec::with_capacity(1 + (n - 2) * m);
        let push = |edges: &mut Vec<Edge>, a: usize, b: usize| {
            edges.push(Edge {
                source: a,
                dest: b,
                prob: self.cascade_prob,
            })
        };

        push(&mut edges, 0, 1);
        degree[0] = 1;
        degree[1] = 1;
        weight[0] = attachment_weight(1, mu);
        weight[1] = weight[0];

        let mut chosen = Vec::with_capacity(m);
        for i in 2..n {
            chosen.clear();
            if i <= m {
                chosen.extend(0..i);
            } else {
                for _ in 0..m {
                    let total: f64 = (0..i)
                        .filter(|j| !chosen.contains(j))
                        .map(|j| weight[j])
                        .sum();
                    let mut target = rng.gen::<f64>() * total;
                    let mut pick = None;
                    for j in (0..i).filter(|j| !chosen.contains(j)) {
                        pick = Some(j);
                        if target < weight[j] {
                            break;
                        }
                        target -= weight[j];
                    }
                    chosen.push(pick.expect("at least one earlier node is available"));
                }
            }
            for &j in &chosen {
                push(&mut edges, j, i);
                degree[j] += 1;
                weight[j] = attachment_weight(degree[j], mu);
            }
            degree[i] = chosen.len();
            weight[i] = attachment_weight(degree[i], mu);
        }
        DependencyGraph::new(n, Directedness::Undirected, edges)
    }
}

/// `PA(n, m, mu)` with the default cascade probability.
pub fn generate_preferential_attachment(
    n: usize,
    m: usize,
    mu: f64,
    seed: u64,
) -> Result<DependencyGraph> {
    PreferentialAttachment::new(n, m, mu).generate(seed)
}

fn attachment_weight(degree: usize, mu: f64) -> f64 {
    if mu == 0.0 {
        1.0
    } else if mu == 1.0 {
        degree as f64
    } else {
        libm::pow(degree as f64, mu)
    }
}

fn check_prob(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid!("{what} {p} outside [0, 1]"))
    }
}

/// How intrinsic worths are filled in.
#[derive(Debug, Clone, PartialEq)]
pub enum WorthAssignment {
    /// Independent draws from `U[0, 1)`.
    Uniform01 {
        seed: u64,
    },
    Constant(f64),
    Explicit {
        defender: Vec<f64>,
        attacker: Option<Vec<f64>>,
    },
}

/// Populates worths; attacker worths mirror defender worths unless given.
pub fn assign_worths(graph: DependencyGraph, mode: &WorthAssignment) -> Result<DependencyGraph> {
    let n = graph.n();
    match mode {
        WorthAssignment::Uniform01 { seed } => {
            let mut rng = rng::seeded(*seed);
            let w = (0..n).map(|_| rng.gen::<f64>()).collect();
            graph.with_worths(w, None)
        }
        WorthAssignment::Constant(v) => graph.with_worths(vec![*v; n], None),
        WorthAssignment::Explicit { defender, attacker } => {
            graph.with_worths(defender.clone(), attacker.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unionfind::UnionFind;

    #[test]
    fn er_extremes() {
        assert_eq!(generate_erdos_renyi(5, 0.0, 1).unwrap().edges().len(), 0);
        assert_eq!(generate_erdos_renyi(5, 1.0, 1).unwrap().edges().len(), 10);
        let mut er = ErdosRenyi::new(5, 1.0);
        er.directedness = Directedness::Directed;
        assert_eq!(er.generate(1).unwrap().edges().len(), 20);
    }

    #[test]
    fn er_is_deterministic() {
        let a = generate_erdos_renyi(40, 0.1, 99).unwrap();
        let b = generate_erdos_renyi(40, 0.1, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn er_edge_count_matches_binomial_mean() {
        // Binomial(4950, 0.02): mean 99, variance 97.02.
        let seeds = 1000;
        let counts: Vec<f64> = (0..seeds)
            .map(|s| generate_erdos_renyi(100, 0.02, s).unwrap().edges().len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / seeds as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
        let expected_mean = 0.02 * 4950.0;
        let expected_var = 4950.0 * 0.02 * 0.98;
        let se = (expected_var / seeds as f64).sqrt();
        assert!((mean - expected_mean).abs() < 3.0 * se, "mean {mean}");
        // Sample variance of 1000 draws is within ~15% of the truth with high probability.
        assert!((var / expected_var - 1.0).abs() < 0.15, "variance {var}");
    }

    #[test]
    fn pa_seed_graph_only() {
        let g = generate_preferential_attachment(2, 1, 1.0, 3).unwrap();
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn pa_m1_is_a_tree() {
        for seed in 0..50 {
            for &mu in &[0.0, 1.0, 2.5] {
                let g = generate_preferential_attachment(60, 1, mu, seed).unwrap();
                assert_eq!(g.edges().len(), 59);
                let mut uf = UnionFind::new(60);
                for e in g.edges() {
                    assert!(uf.union(e.source, e.dest), "cycle at seed {seed}");
                }
            }
        }
    }

    #[test]
    fn pa_small_nodes_connect_to_all_predecessors() {
        let g = generate_preferential_attachment(6, 3, 1.0, 5).unwrap();
        // Node 2 joins both seed nodes, node 3 joins 0, 1, 2.
        assert!(g.prob(2, 0) > 0.0 && g.prob(2, 1) > 0.0);
        assert!(g.prob(3, 0) > 0.0 && g.prob(3, 1) > 0.0 && g.prob(3, 2) > 0.0);
        assert_eq!(g.edges().len(), 1 + 2 + 3 + 3 + 3);
    }

    #[test]
    fn pa_rejects_bad_parameters() {
        assert!(generate_preferential_attachment(1, 1, 1.0, 0).is_err());
        assert!(generate_preferential_attachment(5, 0, 1.0, 0).is_err());
        assert!(generate_preferential_attachment(5, 1, -1.0, 0).is_err());
    }

    #[test]
    fn worth_modes() {
        let g = generate_erdos_renyi(66, 0.0, 0).unwrap();
        let c = assign_worths(g.clone(), &WorthAssignment::Constant(0.5)).unwrap();
        assert!(c.worths().iter().all(|&w| w == 0.5));

        let g3 = generate_erdos_renyi(3, 0.0, 0).unwrap();
        let e = assign_worths(
            g3.clone(),
            &WorthAssignment::Explicit {
                defender: vec![0.2, 0.5, 1.0],
                attacker: None,
            },
        )
        .unwrap();
        assert_eq!(e.worths(), &[0.2, 0.5, 1.0]);
        assert_eq!(e.attacker_worths(), &[0.2, 0.5, 1.0]);

        let u1 = assign_worths(g.clone(), &WorthAssignment::Uniform01 { seed: 4 }).unwrap();
        let u2 = assign_worths(g.clone(), &WorthAssignment::Uniform01 { seed: 4 }).unwrap();
        assert_eq!(u1.worths(), u2.worths());
        assert!(u1.worths().iter().all(|&w| (0.0..1.0).contains(&w)));

        let bad = assign_worths(
            g3,
            &WorthAssignment::Explicit {
                defender: vec![1.0],
                attacker: None,
            },
        );
        assert!(bad.is_err());
    }
}
