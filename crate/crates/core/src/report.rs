//! CSV and JSON emitters with fixed schemas.
//!
//! CSV: `,` separator, `.` decimal, LF line endings, floats printed with 12
//! significant digits, absent values as empty fields. JSON: one flat object
//! per scenario with the same keys as the CSV header.

use std::io::{self, Write};

use serde::Serialize;

use crate::analysis::{
    ControlPolicy, ControlTargets, ScenarioConfig, ScenarioStats, Sweep, SweepRow,
};

pub const SCENARIO_HEADER: [&str; 17] = [
    "strategy",
    "parameters",
    "control",
    "policy",
    "engine",
    "seed",
    "evasion_per_qubit",
    "evasion_per_qubit_uncond",
    "evasion_pair",
    "evasion_pair_uncond",
    "detection_per_qubit",
    "eve_info_bits",
    "qber",
    "n",
    "evasion_per_qubit_stderr",
    "evasion_pair_stderr",
    "qber_stderr",
];

pub const SWEEP_HEADER: [&str; 6] = ["theta1", "phi1", "theta2", "phi2", "evasion", "info_bits"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    MonteCarlo,
}

/// One scenario's configuration together with its statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub strategy: String,
    pub parameters: String,
    pub control: &'static str,
    pub policy: &'static str,
    pub engine: Engine,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub stats: ScenarioStats,
}

impl ScenarioReport {
    pub fn new(
        config: &ScenarioConfig,
        engine: Engine,
        seed: Option<u64>,
        stats: ScenarioStats,
    ) -> Self {
        ScenarioReport {
            strategy: config.strategy.name().to_string(),
            parameters: config.strategy.parameters(),
            control: match config.control_targets {
                ControlTargets::Q1 => "q1",
                ControlTargets::Q2 => "q2",
                ControlTargets::Both => "both",
            },
            policy: match config.control_policy {
                ControlPolicy::Oracle => "oracle",
                ControlPolicy::Uniform => "uniform",
            },
            engine,
            seed,
            stats,
        }
    }

    fn csv_record(&self) -> Vec<String> {
        let s = &self.stats;
        let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
        vec![
            self.strategy.clone(),
            self.parameters.clone(),
            self.control.to_string(),
            self.policy.to_string(),
            match self.engine {
                Engine::Exact => "exact".to_string(),
                Engine::MonteCarlo => "monte_carlo".to_string(),
            },
            self.seed.map(|v| v.to_string()).unwrap_or_default(),
            opt(s.evasion_per_qubit),
            fmt_sig(s.evasion_per_qubit_uncond),
            opt(s.evasion_pair),
            opt(s.evasion_pair_uncond),
            opt(s.detection_per_qubit),
            fmt_sig(s.eve_info_bits),
            fmt_sig(s.qber),
            s.n.to_string(),
            opt(s.evasion_per_qubit_stderr),
            opt(s.evasion_pair_stderr),
            fmt_sig(s.qber_stderr),
        ]
    }
}

/// Formats with 12 significant digits in positional notation.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn into_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn write_scenarios_csv<W: Write>(w: W, reports: &[ScenarioReport]) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SCENARIO_HEADER).map_err(into_io)?;
    for r in reports {
        out.write_record(r.csv_record()).map_err(into_io)?;
    }
    out.flush()
}

pub fn write_scenario_json<W: Write>(mut w: W, report: &ScenarioReport) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    w.write_all(b"\n")
}

fn sweep_record(row: &SweepRow) -> [String; 6] {
    [
        fmt_sig(row.theta1),
        fmt_sig(row.phi1),
        fmt_sig(row.theta2),
        fmt_sig(row.phi2),
        fmt_sig(row.evasion),
        row.info_bits.map(fmt_sig).unwrap_or_default(),
    ]
}

pub fn write_sweep_csv<W: Write>(w: W, sweep: &Sweep) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SWEEP_HEADER).map_err(into_io)?;
    for row in sweep.rows() {
        out.write_record(sweep_record(&row)).map_err(into_io)?;
    }
    out.flush()
}

/// Streams `{"resolution", "bob_bases", "minima", "rows": [...]}`.
pub fn write_sweep_json<W: Write>(mut w: W, sweep: &Sweep) -> io::Result<()> {
    let bob: Vec<String> = sweep.bob_bases().iter().map(|b| b.to_string()).collect();
    let minima = [sweep.qubit_minimum(0), sweep.qubit_minimum(1)];
    write!(w, "{{\"resolution\":{},\"bob_bases\":", sweep.resolution())?;
    serde_json::to_writer(&mut w, &bob)?;
    w.write_all(b",\"minima\":")?;
    serde_json::to_writer(&mut w, &minima)?;
    w.write_all(b",\"rows\":[")?;
    for (i, row) in sweep.rows().enumerate() {
        if i > 0 {
            w.write_all(b",")?;
        }
        w.write_all(b"\n")?;
        serde_json::to_writer(&mut w, &row)?;
    }
    w.write_all(b"\n]}\n")
}
