//! Scenario evaluation: exact branch enumeration, seeded Monte Carlo and
//! Bloch-sphere sweeps of Eve's intercept bases.
//!
//! A scenario fixes Eve's strategy and Alice's control settings. Bob's
//! preparation is uniform over the 24 pairs and Alice's operation is uniform
//! over the four Pauli codes. Encoding-mode and control-mode statistics are
//! reported separately, each conditional on its mode.

mod exact;
mod info;
mod monte_carlo;
mod sweep;

use serde::Serialize;
use thiserror::Error;

use crate::adversary::{AdversaryError, EveStrategy, Inference};
use crate::chooser::Chooser;
use crate::protocol::{
    run_round, PairPreparation, ProtocolError, RoundMode, RoundRecord, ORDERED_BASIS_PAIRS,
};
use crate::qcore::{MeasBasis, PauliCode, QcoreError};

pub use exact::{count_exact_recoveries, enumerate_scenario, eve_information_given};
pub use info::{mutual_information, JointDistribution};
pub use monte_carlo::monte_carlo;
pub use sweep::{sweep_eve_bases, Sweep, SweepMinimum, SweepRow, MIN_RESOLUTION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error("branch weights sum to {0}, expected 1")]
    ProbabilityLeak(f64),
    #[error("malformed joint distribution: {0}")]
    MalformedTable(String),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("sweep resolution {0} is below the minimum of {MIN_RESOLUTION}")]
    ResolutionTooLow(usize),
    #[error("sweep found evasion {0} below the 0.5 floor")]
    FloorViolated(f64),
}

/// How Alice picks her basis for a control measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlPolicy {
    /// Always Bob's preparation basis.
    #[default]
    Oracle,
    /// Uniform over Z, X, Y; mismatches are inconclusive.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlTargets {
    Q1,
    Q2,
    #[default]
    Both,
}

impl ControlTargets {
    pub fn mask(self) -> [bool; 2] {
        match self {
            ControlTargets::Q1 => [true, false],
            ControlTargets::Q2 => [false, true],
            ControlTargets::Both => [true, true],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub strategy: EveStrategy,
    pub control_policy: ControlPolicy,
    pub control_targets: ControlTargets,
}

impl ScenarioConfig {
    pub fn new(strategy: EveStrategy) -> Self {
        ScenarioConfig {
            strategy,
            control_policy: ControlPolicy::default(),
            control_targets: ControlTargets::default(),
        }
    }
}

/// Aggregated metrics of a scenario.
///
/// `evasion_per_qubit` is conditional on a conclusive comparison (Alice's
/// basis equals Bob's); the `_uncond` variants count inconclusive comparisons
/// as evasions. Pair metrics exist only when both qubits are checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioStats {
    pub evasion_per_qubit: Option<f64>,
    pub evasion_per_qubit_uncond: f64,
    pub evasion_pair: Option<f64>,
    pub evasion_pair_uncond: Option<f64>,
    pub detection_per_qubit: Option<f64>,
    pub eve_info_bits: f64,
    pub qber: f64,
    /// Leaf count (exact) or trial count (Monte Carlo).
    pub n: u64,
    pub evasion_per_qubit_stderr: Option<f64>,
    pub evasion_pair_stderr: Option<f64>,
    pub qber_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RoundKind {
    Encoding,
    Control,
}

/// Draws the scenario-level random choices, then plays the round.
pub(crate) fn draw_round(
    config: &ScenarioConfig,
    kind: RoundKind,
    chooser: &mut dyn Chooser,
) -> Result<RoundRecord, ProtocolError> {
    let bases = ORDERED_BASIS_PAIRS[chooser.choose_uniform(ORDERED_BASIS_PAIRS.len())];
    let k = chooser.choose_uniform(4) as u8;
    let prep = PairPreparation::new(bases, [k >> 1, k & 1])?;
    match kind {
        RoundKind::Encoding => {
            let op = PauliCode::ALL[chooser.choose_uniform(4)];
            run_round(&prep, &RoundMode::Encoding, op, &config.strategy, chooser)
        }
        RoundKind::Control => {
            let mask = config.control_targets.mask();
            let mut alice = [None, None];
            for q in 0..2 {
                if mask[q] {
                    alice[q] = Some(match config.control_policy {
                        ControlPolicy::Oracle => bases[q],
                        ControlPolicy::Uniform => MeasBasis::CANONICAL[chooser.choose_uniform(3)],
                    });
                }
            }
            run_round(
                &prep,
                &RoundMode::Control { bases: alice },
                PauliCode::I,
                &config.strategy,
                chooser,
            )
        }
    }
}

/// Weighted sums over rounds. With unit weights every field is an integer
/// count, so merging is exact in any order.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tally {
    leaves: u64,
    enc_weight: f64,
    enc_errors: f64,
    joint: JointDistribution<PauliCode, Inference>,
    ctl_weight: f64,
    analyzed: f64,
    detected: f64,
    conclusive: f64,
    conclusive_undetected: f64,
    pair_conclusive: f64,
    pair_conclusive_undetected: f64,
    round_undetected: f64,
}

impl Tally {
    pub(crate) fn record(&mut self, w: f64, r: &RoundRecord) {
        self.leaves += 1;
        match r.mode {
            RoundMode::Encoding => {
                self.enc_weight += w;
                if r.decoded_correctly() == Some(false) {
                    self.enc_errors += w;
                }
                if let Some(op) = r.alice_op {
                    self.joint.add(op, r.eve.inferred, w);
                }
            }
            RoundMode::Control { .. } => {
                self.ctl_weight += w;
                let analyzed = r.control.len() as f64;
                let conclusive = r.control.iter().filter(|c| c.conclusive).count() as f64;
                let detected = r.control.iter().filter(|c| c.detected).count() as f64;
                self.analyzed += w * analyzed;
                self.detected += w * detected;
                self.conclusive += w * conclusive;
                self.conclusive_undetected += w * (conclusive - detected);
                if detected == 0.0 {
                    self.round_undetected += w;
                }
                if r.control.len() == 2 && conclusive == 2.0 {
                    self.pair_conclusive += w;
                    if detected == 0.0 {
                        self.pair_conclusive_undetected += w;
                    }
                }
            }
        }
    }

    pub(crate) fn merge(mut self, other: Tally) -> Tally {
        self.leaves += other.leaves;
        self.enc_weight += other.enc_weight;
        self.enc_errors += other.enc_errors;
        self.joint.merge(other.joint);
        self.ctl_weight += other.ctl_weight;
        self.analyzed += other.analyzed;
        self.detected += other.detected;
        self.conclusive += other.conclusive;
        self.conclusive_undetected += other.conclusive_undetected;
        self.pair_conclusive += other.pair_conclusive;
        self.pair_conclusive_undetected += other.pair_conclusive_undetected;
        self.round_undetected += other.round_undetected;
        self
    }

    /// Ratios and, for sampled tallies, binomial standard errors.
    pub(crate) fn finish(
        &self,
        targets: ControlTargets,
        n: u64,
        sampled: bool,
    ) -> Result<ScenarioStats, AnalysisError> {
        let ratio = |num: f64, den: f64| (den > 0.0).then(|| num / den);
        let stderr = |p: f64, den: f64| {
            if sampled {
                (p * (1.0 - p) / den).sqrt()
            } else {
                0.0
            }
        };

        let evasion_per_qubit = ratio(self.conclusive_undetected, self.conclusive);
        let qber = ratio(self.enc_errors, self.enc_weight).unwrap_or(0.0);
        let both = targets == ControlTargets::Both;
        let evasion_pair =
            ratio(self.pair_conclusive_undetected, self.pair_conclusive).filter(|_| both);

        let info = if self.enc_weight > 0.0 {
            mutual_information(&self.joint.scaled(1.0 / self.enc_weight))?
        } else {
            0.0
        };
        Ok(ScenarioStats {
            evasion_per_qubit,
            evasion_per_qubit_uncond: ratio(self.analyzed - self.detected, self.analyzed)
                .unwrap_or(1.0),
            evasion_pair,
            evasion_pair_uncond: ratio(self.round_undetected, self.ctl_weight).filter(|_| both),
            detection_per_qubit: evasion_per_qubit.map(|e| 1.0 - e),
            eve_info_bits: info,
            qber,
            n,
            evasion_per_qubit_stderr: evasion_per_qubit.map(|p| stderr(p, self.conclusive)),
            evasion_pair_stderr: evasion_pair.map(|p| stderr(p, self.pair_conclusive)),
            qber_stderr: stderr(qber, self.enc_weight),
        })
    }
}

/// Probability that Eve's intercept in `eve_basis` leaves Bob's eigenstate
/// of `bob_basis` undisturbed when Alice checks in Bob's basis:
/// `Σ_i |⟨e_i|b⟩|⁴`.
pub fn evasion_per_qubit(eve_basis: &MeasBasis, bob_basis: &MeasBasis) -> f64 {
    let b = bob_basis.eigenstate(0);
    (0..2u8)
        .map(|i| {
            let overlap = eve_basis
                .eigenstate(i)
                .inner(&b)
                .map_or(0.0, |c| c.norm_sqr());
            overlap * overlap
        })
        .sum()
}
