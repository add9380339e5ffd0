//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails. Criteria 1-7 run twice, on one
//! and on four worker threads, and criterion 9 compares their CSV output.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use netdefense::parallel::{self, with_threads};
use netdefense::sweep::{
    run_sweep, BaseGraph, GraphFamily, Method, SweepKind, SweepOutput, SweepSpec,
};
use netdefense_core::baselines::{independence_policy, star_family};
use netdefense_core::game::{evaluate_policy, solve_multiple_lp, LpStatus};
use netdefense_core::generators::{assign_worths, PreferentialAttachment, WorthAssignment};
use netdefense_core::rng::derive_seed;
use netdefense_core::tree::tree_expected_losses;
use netdefense_core::{
    CascadeModel, ConfigurationSet, DependencyGraph, ExpectedLossVector, GameInstance, GamePriors,
    SecurityOption, SolveOptions,
};
use statrs::distribution::{ContinuousCDF, StudentsT};

struct Outcome {
    pass: bool,
    detail: String,
    /// Canonical text of the results, compared across thread counts.
    csv: String,
}

/// Uniform draw in `[0, 1)` from a hashed `(a, b)` pair.
fn unit(a: u64, b: u64) -> f64 {
    (derive_seed(a, b) >> 11) as f64 / (1u64 << 53) as f64
}

// ---------------------------------------------------------------- criterion 1

fn path_product(n: usize, edges: &[(usize, usize, f64)], w: &[f64]) -> Vec<f64> {
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

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut csv = String::from("tree,target,loss\n");
    for tree in 0..100u64 {
        let n = 1 + (unit(tree, 0) * 50.0) as usize;
        let edges: Vec<_> = (1..n)
            .map(|v| {
                let parent = ((unit(tree, 2 * v as u64) * v as f64) as usize).min(v - 1);
                (parent, v, unit(tree, 2 * v as u64 + 1))
            })
            .collect();
        let w: Vec<f64> = (0..n).map(|t| unit(tree + 1000, t as u64)).collect();
        let g = DependencyGraph::undirected(n, &edges)
            .unwrap()
            .with_worths(w.clone(), None)
            .unwrap();
        let fast = tree_expected_losses(&CascadeModel::Sparse(g)).unwrap();
        let slow = path_product(n, &edges, &w);
        for t in 0..n {
            worst = worst.max((fast.loss_def[t] - slow[t]).abs());
            writeln!(csv, "{tree},{t},{}", fast.loss_def[t]).unwrap();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-9 && secs < 5.0,
        detail: format!("100 random trees (n <= 50), max |error| = {worst:.2e} (tol 1e-9), {secs:.3} s (limit 5 s)"),
        csv,
    }
}

// ---------------------------------------------------------------- criterion 2

fn enumerate_losses(n: usize, edges: &[(usize, usize, f64)], w: &[f64]) -> Vec<f64> {
    let m = edges.len();
    let mut out = vec![0.0; n];
    for mask in 0u32..(1 << m) {
        let mut prob = 1.0;
        let mut label: Vec<usize> = (0..n).collect();
        for (i, &(a, b, p)) in edges.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prob *= p;
                let (from, to) = (label[a], label[b]);
                for l in label.iter_mut().filter(|l| **l == from) {
                    *l = to;
                }
            } else {
                prob *= 1.0 - p;
            }
        }
        if prob == 0.0 {
            continue;
        }
        for t in 0..n {
            let comp: f64 = (0..n).filter(|&u| label[u] == label[t]).map(|u| w[u]).sum();
            out[t] += prob * comp;
        }
    }
    out
}

fn criterion2() -> Outcome {
    const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
    const K: u64 = 200_000;
    let start = Instant::now();
    let (mut graphs, mut pairs, mut within) = (0u64, 0usize, 0usize);
    let mut csv = String::from("graph,target,estimate,stderr\n");
    for n in 1..=5usize {
        let all: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        for mask in 0u32..(1 << all.len()) {
            if mask.count_ones() > 7 {
                continue;
            }
            let id = graphs;
            graphs += 1;
            let edges: Vec<_> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(i, &(a, b))| (a, b, GRID[(derive_seed(id, i as u64) % 5) as usize]))
                .collect();
            let w: Vec<f64> = (0..n).map(|t| unit(id + 7_000_000, t as u64)).collect();
            let g = DependencyGraph::undirected(n, &edges)
                .unwrap()
                .with_worths(w.clone(), None)
                .unwrap();
            let est = parallel::estimate_component_losses(&CascadeModel::Sparse(g), K, id).unwrap();
            let exact = enumerate_losses(n, &edges, &w);
            for t in 0..n {
                pairs += 1;
                if (est.loss_def[t] - exact[t]).abs() <= 4.0 * est.stderr_def[t] + 1e-9 {
                    within += 1;
                }
                writeln!(csv, "{id},{t},{},{}", est.loss_def[t], est.stderr_def[t]).unwrap();
            }
        }
    }
    let frac = within as f64 / pairs as f64;
    Outcome {
        pass: frac >= 0.99,
        detail: format!(
            "{graphs} labeled graphs (n <= 5, |E| <= 7), K = {K}: {within}/{pairs} = {:.2}% within 4 SE (need 99%), {:.1} s",
            100.0 * frac,
            start.elapsed().as_secs_f64()
        ),
        csv,
    }
}

// ---------------------------------------------------------------- criterion 3

/// Defender value of a two-option policy (`d[t]` = defense probability)
/// against a best-responding attacker, ties to the defender.
fn brute_value(loss: &[f64], cost: &[f64], r: f64, d: &[f64]) -> f64 {
    let n = loss.len();
    // Zero-sum: attacker value L(1 - d), defender value -L(1 - d).
    let att: Vec<f64> = (0..n).map(|t| loss[t] * (1.0 - d[t])).collect();
    let best = att.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hit = (0..n)
        .filter(|&t| att[t] >= best - 1e-12)
        .map(|t| -att[t])
        .fold(f64::NEG_INFINITY, f64::max);
    let random: f64 = att.iter().map(|a| -a / n as f64).sum();
    let spend: f64 = (0..n).map(|t| cost[t] * d[t]).sum();
    r * hit + (1.0 - r) * random - spend
}

fn grid_best(loss: &[f64], cost: &[f64], r: f64) -> f64 {
    let n = loss.len();
    let mut idx = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let d: Vec<f64> = idx.iter().map(|&i| i as f64 / 100.0).collect();
        best = best.max(brute_value(loss, cost, r, &d));
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] <= 100 {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn criterion3() -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut below = 0;
    let mut csv = String::from("instance,n,r,lp,grid\n");
    for i in 0..50u64 {
        let n = 1 + (derive_seed(i, 99) % 3) as usize;
        let r = [0.0, 0.5, 1.0][(i % 3) as usize];
        let loss: Vec<f64> = (0..n).map(|t| unit(i, t as u64)).collect();
        let cost: Vec<f64> = (0..n).map(|t| 0.5 * unit(i + 500, t as u64)).collect();
        let lv = ExpectedLossVector::exact(loss.clone(), loss.clone()).unwrap();
        let mut costs = vec![0.0; n];
        costs.extend_from_slice(&cost);
        let configs = ConfigurationSet::new(
            n,
            vec![
                SecurityOption {
                    name: "none".into(),
                    penetration: 1.0,
                },
                SecurityOption {
                    name: "full".into(),
                    penetration: 0.0,
                },
            ],
            costs,
        )
        .unwrap();
        let inst =
            GameInstance::from_losses(&lv, &configs, &GamePriors::uniform(n, r).unwrap(), true)
                .unwrap();
        let lp = parallel::solve_multiple_lp(&inst, &SolveOptions::default())
            .unwrap()
            .objective;
        let grid = grid_best(&loss, &cost, r);
        if lp < grid - 1e-9 {
            below += 1;
        }
        worst_gap = worst_gap.max(lp - grid);
        writeln!(csv, "{i},{n},{r},{lp},{grid}").unwrap();
    }
    Outcome {
        pass: below == 0 && worst_gap <= 0.02,
        detail: format!(
            "50 instances (n <= 3, r in {{0, 0.5, 1}}): max LP - grid = {worst_gap:.4} (tol 0.02), grid above LP in {below} cases"
        ),
        csv,
    }
}

// ---------------------------------------------------------------- criterion 4

fn sweep_csv(out: &SweepOutput) -> String {
    let mut buf = Vec::new();
    out.write_csv(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn spec(kind: SweepKind, n: usize, family: GraphFamily, reps: usize, seed: u64) -> SweepSpec {
    let mut s = SweepSpec::new(kind);
    s.n = n;
    s.base = BaseGraph::Generated(family);
    s.replications = reps;
    s.master_seed = seed;
    s.record_timings = false;
    s
}

fn criterion4() -> Outcome {
    let families = [
        ("ER(0.1)", GraphFamily::ErdosRenyi { p: 0.1 }),
        (
            "PA(m=1)",
            GraphFamily::PreferentialAttachment { m: 1, mu: 1.0 },
        ),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    let mut csv = String::new();
    for (name, family) in families {
        let out = run_sweep(&spec(SweepKind::Cost, 50, family, 20, 4000)).unwrap();
        csv += &sweep_csv(&out);
        let opt = out.by_param(Method::Optimal);
        let mut violations = 0;
        let mut best_z = Vec::new();
        for baseline in [Method::Independence, Method::DegreeHeuristic] {
            let other = out.by_param(baseline);
            let mut z_max = f64::NEG_INFINITY;
            for (i, (o, b)) in opt.iter().zip(&other).enumerate() {
                let gaps: Vec<f64> = o
                    .iter()
                    .zip(b)
                    .map(|(x, y)| y.neg_utility - x.neg_utility)
                    .collect();
                violations += gaps.iter().filter(|g| **g < -1e-9).count();
                if i > 0 && i + 1 < opt.len() {
                    let (mean, se) = netdefense::sweep::mean_stderr(gaps.into_iter());
                    if mean > 0.0 {
                        z_max = z_max.max(if se > 0.0 { mean / se } else { f64::INFINITY });
                    }
                }
            }
            best_z.push(z_max);
        }
        let ok = violations == 0 && best_z.iter().all(|z| *z > 2.0);
        pass &= ok;
        detail.push(format!(
            "{name}: {violations} dominance violations, best intermediate-c mean gap z = {:.1} (independence), {:.1} (degree)",
            best_z[0], best_z[1]
        ));
    }
    Outcome {
        pass,
        detail: format!("n = 50, 20 seeds, 20 c values; {}", detail.join("; ")),
        csv,
    }
}

// ---------------------------------------------------------------- criterion 5

fn criterion5() -> Outcome {
    let mut csv = String::from("n,ratio\n");
    let mut ratios = Vec::new();
    for n in [5usize, 10, 20, 40] {
        let s = star_family(n).unwrap();
        let losses = tree_expected_losses(&CascadeModel::Sparse(s.graph.clone())).unwrap();
        let inst = s.instance(&losses).unwrap();
        let opt = solve_multiple_lp(&inst, &SolveOptions::default()).unwrap();
        let q =
            independence_policy(&s.graph, &s.configs, &s.priors, &SolveOptions::default()).unwrap();
        let ind = evaluate_policy(&inst, &q).unwrap();
        let ratio = ind.defender_utility / opt.objective;
        writeln!(csv, "{n},{ratio}").unwrap();
        ratios.push(ratio);
    }
    let growth = ratios[3] / ratios[1];
    Outcome {
        pass: growth >= 2.0,
        detail: format!(
            "star family, -U(independence)/-U(optimal) = {:.1}, {:.1}, {:.1}, {:.1} for n = 5, 10, 20, 40; ratio(40)/ratio(10) = {growth:.2} (need >= 2)",
            ratios[0], ratios[1], ratios[2], ratios[3]
        ),
        csv,
    }
}

// ---------------------------------------------------------------- criterion 6

/// Two peaks separated by a dip to at most 90% of the lower one, after
/// collapsing runs of equal values.
fn bimodal(series: &[f64]) -> bool {
    let mut c: Vec<f64> = Vec::new();
    for &x in series {
        if c.last() != Some(&x) {
            c.push(x);
        }
    }
    let peaks: Vec<usize> = (0..c.len())
        .filter(|&i| (i == 0 || c[i] > c[i - 1]) && (i + 1 == c.len() || c[i] > c[i + 1]))
        .collect();
    peaks.iter().enumerate().any(|(a, &i)| {
        peaks[a + 1..].iter().any(|&k| {
            c[i + 1..k].iter().cloned().fold(f64::INFINITY, f64::min) <= 0.9 * c[i].min(c[k])
        })
    })
}

fn criterion6() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let mut csv = String::new();
    for (name, family) in [
        ("ER", GraphFamily::ErdosRenyi { p: 2.0 / 99.0 }),
        ("PA", GraphFamily::PreferentialAttachment { m: 1, mu: 1.0 }),
    ] {
        let out = run_sweep(&spec(SweepKind::Cost, 100, family, 20, 6000)).unwrap();
        csv += &sweep_csv(&out);
        let cells = out.by_param(Method::Optimal);
        let loss: Vec<(f64, f64)> = cells
            .iter()
            .map(|c| netdefense::sweep::mean_stderr(c.iter().map(|r| r.exp_loss)))
            .collect();
        let cost: Vec<f64> = cells
            .iter()
            .map(|c| netdefense::sweep::mean_stderr(c.iter().map(|r| r.exp_cost)).0)
            .collect();
        let monotone = loss
            .windows(2)
            .all(|w| w[1].0 >= w[0].0 - 2.0 * w[0].1.max(w[1].1));
        let zero_at_zero = cells[0].iter().all(|r| r.exp_cost.abs() <= 1e-12);
        let peak = cost.iter().cloned().fold(0.0, f64::max);
        let returns = cost[cost.len() - 1] <= 0.05 * peak;
        let seeds = cells[0].len();
        let bimodal_seeds = (0..seeds)
            .filter(|&s| bimodal(&cells.iter().map(|c| c[s].exp_cost).collect::<Vec<_>>()))
            .count();
        let ok = match name {
            "ER" => monotone && zero_at_zero && returns,
            _ => monotone && zero_at_zero && 2 * bimodal_seeds >= seeds,
        };
        pass &= ok;
        notes.push(format!(
            "{name}: loss weakly increasing {monotone}, cost(0) = 0 {zero_at_zero}, cost at c = {} is {:.3} of peak {:.3}, bimodal seeds {bimodal_seeds}/{seeds}",
            out.rows.last().unwrap().param,
            cost[cost.len() - 1],
            peak
        ));
    }
    Outcome {
        pass,
        detail: format!("n = 100, 20 seeds; {}", notes.join("; ")),
        csv,
    }
}

// ---------------------------------------------------------------- criterion 7

fn criterion7() -> Outcome {
    let mut s = spec(
        SweepKind::Density,
        100,
        GraphFamily::ErdosRenyi { p: 0.0 },
        100,
        7000,
    );
    s.values = vec![0.5, 2.0];
    s.cost = 0.04;
    let out = run_sweep(&s).unwrap();
    let cells = out.by_param(Method::Optimal);
    let a: Vec<f64> = cells[0].iter().map(|r| r.exp_loss).collect();
    let b: Vec<f64> = cells[1].iter().map(|r| r.exp_loss).collect();
    let (ma, sa) = netdefense::sweep::mean_stderr(a.iter().cloned());
    let (mb, sb) = netdefense::sweep::mean_stderr(b.iter().cloned());
    // Welch's t-test, one-sided: degree 2 has the larger mean loss.
    let t = (mb - ma) / (sa * sa + sb * sb).sqrt();
    let (va, vb) = (sa * sa, sb * sb);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p = 1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t);
    Outcome {
        pass: mb > ma && p < 0.01,
        detail: format!(
            "ER n = 100, c = 0.04, 100 seeds: mean loss {ma:.4} (degree 0.5) vs {mb:.4} (degree 2), Welch t = {t:.2}, df = {df:.1}, one-sided p = {p:.2e} (need < 0.01)"
        ),
        csv: sweep_csv(&out),
    }
}

// ---------------------------------------------------------------- criterion 8

fn criterion8() -> Outcome {
    let n = 6474;
    let start = Instant::now();
    let g = PreferentialAttachment::new(n, 2, 1.0).generate(8).unwrap();
    let g = assign_worths(g, &WorthAssignment::Uniform01 { seed: 9 }).unwrap();
    let gen_s = start.elapsed().as_secs_f64();
    let t = Instant::now();
    let losses =
        parallel::estimate_component_losses(&CascadeModel::Sparse(g.clone()), 1000, 10).unwrap();
    let sample_s = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let inst = GameInstance::from_losses(
        &losses,
        &ConfigurationSet::two_level(n, 0.04).unwrap(),
        &GamePriors::uniform(n, 0.0).unwrap(),
        true,
    )
    .unwrap();
    let opts = SolveOptions {
        short_circuit_zero_attack: false,
        ..SolveOptions::default()
    };
    let res = parallel::solve_multiple_lp(&inst, &opts).unwrap();
    let solve_s = t.elapsed().as_secs_f64();
    let total = start.elapsed().as_secs_f64();
    let solved = res
        .per_lp_status
        .iter()
        .filter(|s| **s != LpStatus::Skipped)
        .count();
    Outcome {
        pass: total < 1800.0 && solved == n,
        detail: format!(
            "PA n = {n}, m = 2, {} edges, K = 1000, {solved} LPs solved: generate {gen_s:.2} s, sample {sample_s:.2} s, LPs {solve_s:.2} s, total {total:.2} s (limit 1800 s)",
            g.edges().len()
        ),
        csv: String::new(),
    }
}

fn main() -> ExitCode {
    type Criterion = fn() -> Outcome;
    let criteria: [(&str, Criterion); 7] = [
        ("tree oracle", criterion1),
        ("exhaustive cascade oracle", criterion2),
        ("LP grid oracle", criterion3),
        ("baseline dominance", criterion4),
        ("star family scaling", criterion5),
        ("cost-sweep shape", criterion6),
        ("density jump", criterion7),
    ];
    let mut all_pass = true;
    let mut report = |id: usize, name: &str, pass: bool, detail: &str| {
        all_pass &= pass;
        println!(
            "criterion {id} [{}] {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    };

    let mut first_csv = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = with_threads(1, f);
        report(i + 1, name, o.pass, &o.detail);
        first_csv.push(o.csv);
    }
    let o = criterion8();
    report(8, "scalability", o.pass, &o.detail);

    let mut mismatched = Vec::new();
    for (i, (_, f)) in criteria.iter().enumerate() {
        let o = with_threads(4, f);
        if o.csv != first_csv[i] {
            mismatched.push(i + 1);
        }
    }
    let bytes: usize = first_csv.iter().map(String::len).sum();
    report(
        9,
        "determinism",
        mismatched.is_empty(),
        &format!(
            "criteria 1-7 rerun on 4 threads vs 1 thread: {} bytes of CSV compared, mismatches in {:?}",
            bytes, mismatched
        ),
    );

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
