use std::f64::consts::PI;

use serde::Serialize;

use super::{enumerate_scenario, evasion_per_qubit, AnalysisError, ScenarioConfig};
use crate::adversary::EveStrategy;
use crate::qcore::MeasBasis;

pub const MIN_RESOLUTION: usize = 8;

/// Slack below 0.5 tolerated before the floor check fails.
const FLOOR_TOL: f64 = 1e-9;

/// One point of the two-qubit grid. `evasion` is the mean of the two
/// per-qubit evasions against Bob's bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub evasion: f64,
    /// Eve's information, only where both grid points are canonical bases.
    pub info_bits: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepMinimum {
    pub theta: f64,
    pub phi: f64,
    pub evasion: f64,
}

/// Per-qubit evasion over a `resolution x resolution` grid of Eve bases.
///
/// Grid points are `θ = jπ/r`, `φ = kπ/r` for `j, k < r`. Every basis appears
/// once: `(θ, φ)` and `(π-θ, φ+π)` are the same basis, and `θ = π` repeats `θ = 0`.
#[derive(Debug, Clone)]
pub struct Sweep {
    resolution: usize,
    bob_bases: [MeasBasis; 2],
    grid: Vec<(f64, f64)>,
    evasion: [Vec<f64>; 2],
    canonical: Vec<Option<usize>>,
    /// `info[c1][c2]` for canonical indices into `MeasBasis::CANONICAL`.
    info: [[f64; 3]; 3],
}

pub fn sweep_eve_bases(
    resolution: usize,
    bob_bases: [MeasBasis; 2],
) -> Result<Sweep, AnalysisError> {
    if resolution < MIN_RESOLUTION {
        return Err(AnalysisError::ResolutionTooLow(resolution));
    }
    let step = PI / resolution as f64;
    let grid: Vec<(f64, f64)> = (0..resolution)
        .flat_map(|j| (0..resolution).map(move |k| (j as f64 * step, k as f64 * step)))
        .collect();
    let evasion = bob_bases.map(|bob| {
        grid.iter()
            .map(|&(theta, phi)| evasion_per_qubit(&MeasBasis::Bloch { theta, phi }, &bob))
            .collect::<Vec<_>>()
    });
    let canonical = grid
        .iter()
        .map(|&(theta, phi)| {
            let b = MeasBasis::Bloch { theta, phi };
            MeasBasis::CANONICAL.iter().position(|c| c.same_basis(&b))
        })
        .collect();

    let mut info = [[0.0; 3]; 3];
    for (i, b1) in MeasBasis::CANONICAL.iter().enumerate() {
        for (j, b2) in MeasBasis::CANONICAL.iter().enumerate() {
            let cfg = ScenarioConfig::new(EveStrategy::InterceptResend { bases: [*b1, *b2] });
            info[i][j] = enumerate_scenario(&cfg)?.eve_info_bits;
        }
    }

    let sweep = Sweep {
        resolution,
        bob_bases,
        grid,
        evasion,
        canonical,
        info,
    };
    for q in 0..2 {
        let min = sweep.qubit_minimum(q).evasion;
        if min < 0.5 - FLOOR_TOL {
            return Err(AnalysisError::FloorViolated(min));
        }
    }
    Ok(sweep)
}

impl Sweep {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn bob_bases(&self) -> [MeasBasis; 2] {
        self.bob_bases
    }

    /// `(θ, φ, evasion)` for every grid point, against Bob's basis on `qubit`.
    pub fn qubit_points(&self, qubit: usize) -> impl Iterator<Item = SweepMinimum> + '_ {
        self.grid
            .iter()
            .zip(&self.evasion[qubit])
            .map(|(&(theta, phi), &evasion)| SweepMinimum {
                theta,
                phi,
                evasion,
            })
    }

    /// Smallest per-qubit evasion on the grid (first in grid order on ties).
    pub fn qubit_minimum(&self, qubit: usize) -> SweepMinimum {
        self.qubit_points(qubit)
            .reduce(|best, p| if p.evasion < best.evasion { p } else { best })
            .expect("grid is non-empty")
    }

    /// All grid points within `tol` of the per-qubit minimum.
    pub fn qubit_argmins(&self, qubit: usize, tol: f64) -> Vec<SweepMinimum> {
        let min = self.qubit_minimum(qubit).evasion;
        self.qubit_points(qubit)
            .filter(|p| p.evasion <= min + tol)
            .collect()
    }

    /// Minimum of the pair-mean evasion; the mean is separable, so this is
    /// the mean of the per-qubit minima.
    pub fn pair_minimum(&self) -> f64 {
        (self.qubit_minimum(0).evasion + self.qubit_minimum(1).evasion) / 2.0
    }

    /// Number of rows [`Sweep::rows`] yields.
    pub fn row_count(&self) -> usize {
        self.grid.len() * self.grid.len()
    }

    /// Full two-qubit table, qubit 1 varying slowest.
    pub fn rows(&self) -> impl Iterator<Item = SweepRow> + '_ {
        let n = self.grid.len();
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| {
                let (theta1, phi1) = self.grid[i];
                let (theta2, phi2) = self.grid[j];
                let info_bits = match (self.canonical[i], self.canonical[j]) {
                    (Some(a), Some(b)) => Some(self.info[a][b]),
                    _ => None,
                };
                SweepRow {
                    theta1,
                    phi1,
                    theta2,
                    phi2,
                    evasion: (self.evasion[0][i] + self.evasion[1][j]) / 2.0,
                    info_bits,
                }
            })
        })
    }
}
