//! Rayon drivers for sampling and the fixed-target LPs. Results are
//! bit-identical to the sequential core functions for any thread count.

use netdefense_core::cascade::{sample_chunks, LossAccumulator};
use netdefense_core::game::{best_lp_index, FixedTargetOutcome, FixedTargetSolver};
use netdefense_core::{
    CascadeModel, Error, ExpectedLossVector, GameInstance, LpStatus, Result, SolveOptions,
    SolveResult, TargetId,
};
use rayon::prelude::*;

/// Parallel `estimate_component_losses`: chunks run independently and are
/// merged in chunk order.
pub fn estimate_component_losses(
    model: &CascadeModel,
    samples: u64,
    master_seed: u64,
) -> Result<ExpectedLossVector> {
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let n = model.n();
    let chunks: Vec<_> = sample_chunks(samples).collect();
    let partial: Vec<LossAccumulator> = chunks
        .into_par_iter()
        .map(|range| {
            let mut acc = LossAccumulator::new(n);
            acc.add_samples(model, master_seed, range);
            acc
        })
        .collect();
    let mut total = LossAccumulator::new(n);
    for acc in &partial {
        total.merge(acc);
    }
    Ok(total.finish())
}

/// Parallel `solve_multiple_lp`. The first pass keeps only objectives; the
/// winning LP is solved again for its policy.
pub fn solve_multiple_lp(inst: &GameInstance, options: &SolveOptions) -> Result<SolveResult> {
    let solver = FixedTargetSolver::new(inst, *options)?;
    if solver.uses_zero_attack_shortcut() {
        return solver.solve_without_attacker();
    }
    let statuses: Vec<LpStatus> = (0..inst.n())
        .into_par_iter()
        .map(|t| {
            Ok(match solver.solve(TargetId(t))? {
                FixedTargetOutcome::Optimal { objective, .. } => LpStatus::Optimal(objective),
                FixedTargetOutcome::Infeasible => LpStatus::Infeasible,
            })
        })
        .collect::<Result<_>>()?;
    let t = best_lp_index(&statuses).ok_or(Error::AllInfeasible)?;
    match solver.solve(TargetId(t))? {
        FixedTargetOutcome::Optimal { policy, objective } => Ok(SolveResult {
            policy,
            objective,
            attacked_target: TargetId(t),
            per_lp_status: statuses,
        }),
        FixedTargetOutcome::Infeasible => Err(Error::Numerical(format!(
            "LP {t} changed status on re-solve"
        ))),
    }
}

/// Runs `f` on a dedicated pool with `threads` workers (`0` = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction");
    pool.install(f)
}
