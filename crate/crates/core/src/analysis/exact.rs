use super::{
    draw_round, mutual_information, AnalysisError, JointDistribution, RoundKind, ScenarioConfig,
    ScenarioStats, Tally,
};
use crate::adversary::{EveStrategy, Inference};
use crate::chooser::for_each_branch;
use crate::protocol::{run_round, PairPreparation, RoundMode};
use crate::qcore::PauliCode;

const LEAK_TOL: f64 = 1e-9;

/// Exact statistics by expanding every random choice of both round kinds.
pub fn enumerate_scenario(config: &ScenarioConfig) -> Result<ScenarioStats, AnalysisError> {
    let mut tally = Tally::default();
    for kind in [RoundKind::Encoding, RoundKind::Control] {
        let mut mass = 0.0;
        for_each_branch(
            |c| draw_round(config, kind, c),
            |w, record| {
                mass += w;
                tally.record(w, &record);
            },
        )?;
        if (mass - 1.0).abs() > LEAK_TOL {
            return Err(AnalysisError::ProbabilityLeak(mass));
        }
    }
    let n = tally.leaves;
    tally.finish(config.control_targets, n, false)
}

/// `I(A;E)` for a fixed preparation, with Alice's operation uniform.
pub fn eve_information_given(
    prep: &PairPreparation,
    strategy: &EveStrategy,
) -> Result<f64, AnalysisError> {
    let mut joint = JointDistribution::new();
    for_each_branch(
        |c| {
            let op = PauliCode::ALL[c.choose_uniform(4)];
            run_round(prep, &RoundMode::Encoding, op, strategy, c)
        },
        |w, r| {
            if let Some(op) = r.alice_op {
                joint.add(op, r.eve.inferred, w);
            }
        },
    )?;
    mutual_information(&joint)
}

/// Counts `(preparation, operation)` cases in which Eve's inference is exactly
/// Alice's operation on every branch. Returns `(recovered, total)`.
pub fn count_exact_recoveries(strategy: &EveStrategy) -> Result<(usize, usize), AnalysisError> {
    let mut recovered = 0;
    let mut total = 0;
    for prep in PairPreparation::all() {
        for op in PauliCode::ALL {
            let mut all_exact = true;
            for_each_branch(
                |c| run_round(&prep, &RoundMode::Encoding, op, strategy, c),
                |_, r| all_exact &= r.eve.inferred == Inference::Exact(op),
            )?;
            total += 1;
            recovered += usize::from(all_exact);
        }
    }
    Ok((recovered, total))
}
