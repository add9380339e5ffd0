//! Expected cascade losses by live-edge sampling.
//!
//! Under the independent cascade model a failure started at `t` reaches
//! exactly the connected component of `t` in a random subgraph that keeps
//! each edge independently with its cascade probability. One sample of that
//! subgraph therefore yields the loss of every possible attack at once: the
//! worth sum of the attacked node's component.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{CascadeModel, DependencyGraph, TargetId};
use crate::rng::{self, SampleRng};
use crate::unionfind::UnionFind;

/// Samples are reduced in fixed blocks of this many consecutive indices, so
/// any schedule that merges block accumulators in block order reproduces the
/// sequential result bit for bit.
pub const SAMPLE_CHUNK: u64 = 256;

/// Expected loss `L(t)` per attacked target: the expected total worth of the
/// targets a cascade started at `t` affects, assuming the attack penetrates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedLossVector {
    pub loss_def: Vec<f64>,
    pub loss_atk: Vec<f64>,
    /// Standard error of each `loss_def` entry; zero for exact vectors.
    pub stderr_def: Vec<f64>,
    pub stderr_atk: Vec<f64>,
    /// Number of Monte Carlo samples behind the estimate; zero when exact.
    pub samples: u64,
}

impl ExpectedLossVector {
    pub fn exact(loss_def: Vec<f64>, loss_atk: Vec<f64>) -> Result<Self> {
        if loss_def.len() != loss_atk.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} defender losses vs {} attacker losses",
                loss_def.len(),
                loss_atk.len()
            )));
        }
        let n = loss_def.len();
        Ok(ExpectedLossVector {
            loss_def,
            loss_atk,
            stderr_def: vec![0.0; n],
            stderr_atk: vec![0.0; n],
            samples: 0,
        })
    }

    /// Losses that ignore cascades: `L(t) = w_t`.
    pub fn intrinsic(graph: &DependencyGraph) -> Self {
        ExpectedLossVector::exact(graph.worths().to_vec(), graph.attacker_worths().to_vec())
            .expect("worth vectors share the graph's length")
    }

    pub fn n(&self) -> usize {
        self.loss_def.len()
    }
}

/// Running sums over samples of per-target component worths.
#[derive(Debug, Clone, PartialEq)]
pub struct LossAccumulator {
    samples: u64,
    sum_def: Vec<f64>,
    sumsq_def: Vec<f64>,
    sum_atk: Vec<f64>,
    sumsq_atk: Vec<f64>,
}

impl LossAccumulator {
    pub fn new(n: usize) -> Self {
        LossAccumulator {
            samples: 0,
            sum_def: vec![0.0; n],
            sumsq_def: vec![0.0; n],
            sum_atk: vec![0.0; n],
            sumsq_atk: vec![0.0; n],
        }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Adds samples `range` of the stream family `master_seed`.
    pub fn add_samples(&mut self, model: &CascadeModel, master_seed: u64, range: Range<u64>) {
        let mut ws = SampleWorkspace::new(model.n());
        for k in range {
            let mut rng = rng::stream(master_seed, k);
            ws.sample(model, &mut rng);
            self.record(&ws.loss_def, &ws.loss_atk);
        }
    }

    fn record(&mut self, def: &[f64], atk: &[f64]) {
        self.samples += 1;
        for t in 0..def.len() {
            self.sum_def[t] += def[t];
            self.sumsq_def[t] += def[t] * def[t];
            self.sum_atk[t] += atk[t];
            self.sumsq_atk[t] += atk[t] * atk[t];
        }
    }

    /// Folds `other` into `self`. Merging block accumulators in a fixed
    /// order makes the result independent of how blocks were scheduled.
    pub fn merge(&mut self, other: &LossAccumulator) {
        self.samples += other.samples;
        for t in 0..self.sum_def.len() {
            self.sum_def[t] += other.sum_def[t];
            self.sumsq_def[t] += other.sumsq_def[t];
            self.sum_atk[t] += other.sum_atk[t];
            self.sumsq_atk[t] += other.sumsq_atk[t];
        }
    }

    pub fn finish(&self) -> ExpectedLossVector {
        let k = self.samples as f64;
        let stats = |sum: &[f64], sumsq: &[f64]| -> (Vec<f64>, Vec<f64>) {
            sum.iter()
                .zip(sumsq)
                .map(|(&s, &sq)| {
                    let mean = s / k;
                    let se = if self.samples > 1 {
                        let var = ((sq - s * mean) / (k - 1.0)).max(0.0);
                        libm::sqrt(var / k)
                    } else {
                        0.0
                    };
                    (mean, se)
                })
                .unzip()
        };
        let (loss_def, stderr_def) = stats(&self.sum_def, &self.sumsq_def);
        let (loss_atk, stderr_atk) = stats(&self.sum_atk, &self.sumsq_atk);
        ExpectedLossVector {
            loss_def,
            loss_atk,
            stderr_def,
            stderr_atk,
            samples: self.samples,
        }
    }
}

/// Consecutive blocks of `SAMPLE_CHUNK` sample indices covering `0..samples`.
pub fn sample_chunks(samples: u64) -> impl Iterator<Item = Range<u64>> + Clone {
    (0..samples.div_ceil(SAMPLE_CHUNK)).map(move |c| {
        let start = c * SAMPLE_CHUNK;
        start..(start + SAMPLE_CHUNK).min(samples)
    })
}

/// Estimates `L(t)` for every target from `samples` live-edge samples.
///
/// Undirected models use one union-find pass per sample. Directed models
/// sample live edges once per sample and search forward from every start.
/// The result depends only on `(model, samples, master_seed)`.
pub fn estimate_component_losses(
    model: &CascadeModel,
    samples: u64,
    master_seed: u64,
) -> Result<ExpectedLossVector> {
    if samples == 0 {
        return Err(invalid!("sample count must be at least 1"));
    }
    let mut total = LossAccumulator::new(model.n());
    for chunk in sample_chunks(samples) {
        let mut acc = LossAccumulator::new(model.n());
        acc.add_samples(model, master_seed, chunk);
        total.merge(&acc);
    }
    Ok(total.finish())
}

/// Per-sample scratch space.
struct SampleWorkspace {
    uf: UnionFind,
    comp_def: Vec<f64>,
    comp_atk: Vec<f64>,
    loss_def: Vec<f64>,
    loss_atk: Vec<f64>,
    live: Vec<(usize, usize)>,
}

impl SampleWorkspace {
    fn new(n: usize) -> Self {
        SampleWorkspace {
            uf: UnionFind::new(n),
            comp_def: vec![0.0; n],
            comp_atk: vec![0.0; n],
            loss_def: vec![0.0; n],
            loss_atk: vec![0.0; n],
            live: Vec::new(),
        }
    }

    fn sample(&mut self, model: &CascadeModel, rng: &mut SampleRng) {
        if model.is_directed() {
            self.sample_directed(model, rng);
        } else {
            self.sample_undirected(model, rng);
        }
    }

    fn sample_undirected(&mut self, model: &CascadeModel, rng: &mut SampleRng) {
        let g = model.graph();
        let n = g.n();
        self.uf.reset(n);
        let uf = &mut self.uf;
        model.for_each_candidate_edge(|a, b, p| {
            if rng.gen::<f64>() < p {
                uf.union(a, b);
            }
        });
        self.comp_def.iter_mut().for_each(|x| *x = 0.0);
        self.comp_atk.iter_mut().for_each(|x| *x = 0.0);
        for t in 0..n {
            let r = self.uf.find(t);
            self.comp_def[r] += g.worths()[t];
            self.comp_atk[r] += g.attacker_worths()[t];
        }
        for t in 0..n {
            let r = self.uf.find(t);
            self.loss_def[t] = self.comp_def[r];
            self.loss_atk[t] = self.comp_atk[r];
        }
    }

    fn sample_directed(&mut self, model: &CascadeModel, rng: &mut SampleRng) {
        let g = model.graph();
        let n = g.n();
        self.live.clear();
        let live = &mut self.live;
        model.for_each_candidate_edge(|a, b, p| {
            if rng.gen::<f64>() < p {
                live.push((a, b));
            }
        });
        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in self.live.iter() {
            offsets[a + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        // Live edges are emitted sorted by source, so they already form CSR rows.
        let mut seen = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for start in 0..n {
            let (mut def, mut atk) = (0.0, 0.0);
            seen[start] = start;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                def += g.worths()[u];
                atk += g.attacker_worths()[u];
                for &(_, v) in &self.live[offsets[u]..offsets[u + 1]] {
                    if seen[v] != start {
                        seen[v] = start;
                        queue.push_back(v);
                    }
                }
            }
            self.loss_def[start] = def;
            self.loss_atk[start] = atk;
        }
    }
}

/// Component partition of one live-edge sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component label per target; labels are dense and numbered in order
    /// of each component's smallest member.
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn same(&self, a: TargetId, b: TargetId) -> bool {
        self.labels[a.0] == self.labels[b.0]
    }

    pub fn size_of(&self, t: TargetId) -> usize {
        let l = self.labels[t.0];
        self.labels.iter().filter(|&&x| x == l).count()
    }
}

/// Keeps each edge of an undirected model independently with its cascade
/// probability and returns the resulting components.
pub fn sample_live_edge_graph(model: &CascadeModel, rng: &mut SampleRng) -> Result<Components> {
    if model.is_directed() {
        return Err(Error::DirectedModel);
    }
    let n = model.n();
    let mut uf = UnionFind::new(n);
    model.for_each_candidate_edge(|a, b, p| {
        if rng.gen::<f64>() < p {
            uf.union(a, b);
        }
    });
    let mut label_of_root = vec![usize::MAX; n];
    let mut labels = vec![0; n];
    let mut count = 0;
    for (t, label) in labels.iter_mut().enumerate() {
        let r = uf.find(t);
        if label_of_root[r] == usize::MAX {
            label_of_root[r] = count;
            count += 1;
        }
        *label = label_of_root[r];
    }
    Ok(Components { labels, count })
}

/// Runs one cascade from `start` breadth first, flipping each edge's coin
/// the first time contagion crosses it. Returns the affected targets sorted.
pub fn simulate_cascade_bfs(
    model: &CascadeModel,
    start: TargetId,
    rng: &mut SampleRng,
) -> Result<Vec<usize>> {
    let n = model.n();
    if start.0 >= n {
        return Err(invalid!("start target {} outside [0, {n})", start.0));
    }
    let mut affected = vec![false; n];
    affected[start.0] = true;
    let mut queue = VecDeque::from([start.0]);
    while let Some(u) = queue.pop_front() {
        model.for_each_out_neighbor(u, |v, p| {
            // An edge into an already affected node carries no new contagion.
            if !affected[v] && rng.gen::<f64>() < p {
                affected[v] = true;
                queue.push_back(v);
            }
        });
    }
    Ok((0..n).filter(|&t| affected[t]).collect())
}
