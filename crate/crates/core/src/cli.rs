//! Command-line front end.
//!
//! ```text
//! sixdp enumerate --strategy ira --eve-bases XY
//! sixdp simulate  --strategy 2cnot --variants v1,v2 --trials 100000 --seed 7 --format json
//! sixdp sweep     --resolution 64 [--bob-bases ZX]
//! sixdp claims
//! ```
//!
//! Exit codes: 0 success, 1 failed claim or runtime error, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::adversary::{EveStrategy, Variant};
use crate::analysis::{
    enumerate_scenario, monte_carlo, sweep_eve_bases, AnalysisError, ControlPolicy, ControlTargets,
    ScenarioConfig,
};
use crate::claims::run_claims;
use crate::qcore::MeasBasis;
use crate::report::{
    write_scenario_json, write_scenarios_csv, write_sweep_csv, write_sweep_json, Engine,
    ScenarioReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "sixdp",
    version,
    about = "Exact and sampled analysis of the two-way six-state QKD protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Exact statistics by full branch enumeration.
    Enumerate(ScenarioArgs),
    /// Seeded Monte Carlo estimate.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Per-qubit evasion over a Bloch-sphere grid of intercept bases.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u64).range(8..))]
        resolution: u64,
        /// Bob's preparation bases for the two qubits.
        #[arg(long, default_value = "ZX")]
        bob_bases: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check every protocol claim by exact computation.
    Claims,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyName {
    None,
    Ira,
    IraSame,
    #[value(name = "2cnot")]
    TwoCnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Q1,
    Q2,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Oracle,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long, value_enum)]
    strategy: StrategyName,
    /// Eve's bases: `XY`, `Z/Y` or `bloch:θ,φ/X` (radians).
    #[arg(long)]
    eve_bases: Option<String>,
    /// 2CNOT wiring per qubit: `v1,v2`, `v1`, `skip,v2`.
    #[arg(long)]
    variants: Option<String>,
    #[arg(long, value_enum, default_value_t = TargetArg::Both)]
    control: TargetArg,
    #[arg(long, value_enum, default_value_t = PolicyArg::Oracle)]
    policy: PolicyArg,
    #[command(flatten)]
    output: OutputArgs,
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub out: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Enumerate(ScenarioConfig),
    Simulate {
        config: ScenarioConfig,
        trials: u64,
        seed: u64,
    },
    Sweep {
        resolution: usize,
        bob_bases: [MeasBasis; 2],
    },
    Claims,
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, msg)
}

/// Splits a basis list: `/` separates tokens, and a piece made only of
/// letters is one token per letter.
pub fn parse_basis_list(s: &str) -> Result<Vec<MeasBasis>, String> {
    let mut out = Vec::new();
    for piece in s.split('/').map(str::trim) {
        if piece.is_empty() {
            return Err(format!("empty basis token in `{s}`"));
        }
        if piece.starts_with("bloch:") {
            out.push(piece.parse().map_err(|e| format!("{e}"))?);
        } else {
            for ch in piece.chars() {
                out.push(ch.to_string().parse().map_err(|e| format!("{e}"))?);
            }
        }
    }
    Ok(out)
}

fn parse_variants(s: &str) -> Result<[Option<Variant>; 2], String> {
    let items: Vec<&str> = s.split(',').map(str::trim).collect();
    if items.is_empty() || items.len() > 2 {
        return Err(format!("expected one or two variants, got `{s}`"));
    }
    let mut out = [None, None];
    for (slot, item) in out.iter_mut().zip(&items) {
        *slot = match item.to_ascii_lowercase().as_str() {
            "v1" => Some(Variant::V1),
            "v2" => Some(Variant::V2),
            "skip" | "none" | "-" => None,
            other => return Err(format!("unknown variant `{other}` (valid: v1, v2, skip)")),
        };
    }
    if out.iter().all(Option::is_none) {
        return Err("at least one qubit must be attacked".to_string());
    }
    Ok(out)
}

fn build_strategy(args: &ScenarioArgs) -> Result<EveStrategy, clap::Error> {
    let bases = args
        .eve_bases
        .as_deref()
        .map(parse_basis_list)
        .transpose()
        .map_err(|e| usage(ErrorKind::InvalidValue, format!("invalid --eve-bases: {e}")))?;
    let conflict = |flag: &str| {
        usage(
            ErrorKind::ArgumentConflict,
            format!("{flag} does not apply to strategy {:?}", args.strategy),
        )
    };
    let missing = |flag: &str| {
        usage(
            ErrorKind::MissingRequiredArgument,
            format!("strategy needs {flag}"),
        )
    };

    match args.strategy {
        StrategyName::None => {
            if bases.is_some() {
                return Err(conflict("--eve-bases"));
            }
            if args.variants.is_some() {
                return Err(conflict("--variants"));
            }
            Ok(EveStrategy::None)
        }
        StrategyName::Ira | StrategyName::IraSame => {
            if args.variants.is_some() {
                return Err(conflict("--variants"));
            }
            let bases = bases.ok_or_else(|| missing("--eve-bases"))?;
            let pair = match (args.strategy, bases.as_slice()) {
                (_, [a, b]) => [*a, *b],
                (StrategyName::IraSame, [a]) => [*a, *a],
                _ => {
                    return Err(usage(
                        ErrorKind::InvalidValue,
                        format!("--eve-bases needs one basis per qubit, got {}", bases.len()),
                    ))
                }
            };
            if args.strategy == StrategyName::IraSame && !pair[0].same_basis(&pair[1]) {
                return Err(usage(
                    ErrorKind::InvalidValue,
                    "ira-same needs equal bases on both qubits",
                ));
            }
            Ok(EveStrategy::InterceptResend { bases: pair })
        }
        StrategyName::TwoCnot => {
            if bases.is_some() {
                return Err(conflict("--eve-bases"));
            }
            let spec = args
                .variants
                .as_deref()
                .ok_or_else(|| missing("--variants"))?;
            let variants = parse_variants(spec)
                .map_err(|e| usage(ErrorKind::InvalidValue, format!("invalid --variants: {e}")))?;
            Ok(EveStrategy::TwoCnot { variants })
        }
    }
}

fn build_config(args: &ScenarioArgs) -> Result<ScenarioConfig, clap::Error> {
    Ok(ScenarioConfig {
        strategy: build_strategy(args)?,
        control_policy: match args.policy {
            PolicyArg::Oracle => ControlPolicy::Oracle,
            PolicyArg::Uniform => ControlPolicy::Uniform,
        },
        control_targets: match args.control {
            TargetArg::Q1 => ControlTargets::Q1,
            TargetArg::Q2 => ControlTargets::Q2,
            TargetArg::Both => ControlTargets::Both,
        },
    })
}

/// Parses and validates `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<RunSpec, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    Ok(match cli.command {
        Cmd::Enumerate(args) => RunSpec {
            command: Command::Enumerate(build_config(&args)?),
            out: args.output.out,
            format: args.output.format,
        },
        Cmd::Simulate {
            scenario,
            trials,
            seed,
        } => RunSpec {
            command: Command::Simulate {
                config: build_config(&scenario)?,
                trials,
                seed,
            },
            out: scenario.output.out,
            format: scenario.output.format,
        },
        Cmd::Sweep {
            resolution,
            bob_bases,
            output,
        } => {
            let bases = parse_basis_list(&bob_bases)
                .map_err(|e| usage(ErrorKind::InvalidValue, format!("invalid --bob-bases: {e}")))?;
            let bob_bases = match bases.as_slice() {
                [a] => [*a, *a],
                [a, b] => [*a, *b],
                _ => {
                    return Err(usage(
                        ErrorKind::InvalidValue,
                        "--bob-bases takes one or two bases",
                    ))
                }
            };
            RunSpec {
                command: Command::Sweep {
                    resolution: resolution as usize,
                    bob_bases,
                },
                out: output.out,
                format: output.format,
            }
        }
        Cmd::Claims => RunSpec {
            command: Command::Claims,
            out: None,
            format: Format::Csv,
        },
    })
}

fn sink<'a>(out: &Option<PathBuf>, stdout: &'a mut dyn Write) -> io::Result<Box<dyn Write + 'a>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(stdout),
    })
}

/// Executes a validated invocation and returns the process exit code.
///
/// Data goes to `--out` or `stdout`; summaries go to `stderr`.
pub fn run(
    spec: &RunSpec,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let write_report = |report: ScenarioReport, stdout: &mut dyn Write| -> Result<(), CliError> {
        let mut w = sink(&spec.out, stdout)?;
        match spec.format {
            Format::Csv => write_scenarios_csv(&mut w, &[report])?,
            Format::Json => write_scenario_json(&mut w, &report)?,
        }
        w.flush()?;
        Ok(())
    };

    match &spec.command {
        Command::Enumerate(config) => {
            let stats = enumerate_scenario(config)?;
            write_report(
                ScenarioReport::new(config, Engine::Exact, None, stats),
                stdout,
            )?;
        }
        Command::Simulate {
            config,
            trials,
            seed,
        } => {
            let stats = monte_carlo(config, *trials, *seed)?;
            write_report(
                ScenarioReport::new(config, Engine::MonteCarlo, Some(*seed), stats),
                stdout,
            )?;
        }
        Command::Sweep {
            resolution,
            bob_bases,
        } => {
            let sweep = sweep_eve_bases(*resolution, *bob_bases)?;
            for q in 0..2 {
                let m = sweep.qubit_minimum(q);
                writeln!(
                    stderr,
                    "qubit {} (Bob {}): min evasion {:.9} at theta={:.6} phi={:.6}",
                    q + 1,
                    bob_bases[q],
                    m.evasion,
                    m.theta,
                    m.phi
                )?;
            }
            let mut w = sink(&spec.out, stdout)?;
            match spec.format {
                Format::Csv => write_sweep_csv(&mut w, &sweep)?,
                Format::Json => write_sweep_json(&mut w, &sweep)?,
            }
            w.flush()?;
        }
        Command::Claims => {
            let claims = run_claims()?;
            for c in &claims {
                writeln!(stdout, "{c}")?;
            }
            if claims.iter().any(|c| !c.pass) {
                return Ok(EXIT_CLAIM_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> Result<RunSpec, clap::Error> {
        parse_args(std::iter::once("sixdp").chain(line.split_whitespace()))
    }

    #[test]
    fn enumerate_ira() {
        let spec = parse("enumerate --strategy ira --eve-bases XY").unwrap();
        assert_eq!(
            spec.command,
            Command::Enumerate(ScenarioConfig::new(EveStrategy::InterceptResend {
                bases: [MeasBasis::X, MeasBasis::Y]
            }))
        );
        assert_eq!(spec.format, Format::Csv);
    }

    #[test]
    fn simulate_two_cnot() {
        let spec = parse(
            "simulate --strategy 2cnot --variants v1,v2 --trials 100000 --seed 7 --format json",
        )
        .unwrap();
        assert_eq!(
            spec.command,
            Command::Simulate {
                config: ScenarioConfig::new(EveStrategy::TwoCnot {
                    variants: [Some(Variant::V1), Some(Variant::V2)]
                }),
                trials: 100_000,
                seed: 7,
            }
        );
        assert_eq!(spec.format, Format::Json);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        for line in [
            "enumerate --strategy ira --eve-bases QZ",
            "enumerate --strategy bogus",
            "enumerate --strategy ira",
            "enumerate --strategy ira --eve-bases XYZ",
            "enumerate --strategy ira-same --eve-bases XY",
            "enumerate --strategy none --eve-bases XY",
            "enumerate --strategy 2cnot --variants v3",
            "enumerate --strategy 2cnot --variants skip,skip",
            "simulate --strategy none --trials 0 --seed 1",
            "simulate --strategy none --trials 10",
            "sweep --resolution 7",
            "sweep --resolution 16 --bob-bases XYZ",
        ] {
            let err = parse(line).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{line}");
        }
    }

    #[test]
    fn unknown_strategy_lists_valid_names() {
        let msg = parse("enumerate --strategy bogus").unwrap_err().to_string();
        for name in ["none", "ira", "ira-same", "2cnot"] {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn same_basis_shorthand_and_options() {
        let spec =
            parse("enumerate --strategy ira-same --eve-bases Y --control q2 --policy uniform")
                .unwrap();
        let Command::Enumerate(cfg) = spec.command else {
            panic!()
        };
        assert_eq!(
            cfg.strategy,
            EveStrategy::InterceptResend {
                bases: [MeasBasis::Y; 2]
            }
        );
        assert_eq!(cfg.control_targets, ControlTargets::Q2);
        assert_eq!(cfg.control_policy, ControlPolicy::Uniform);
    }

    #[test]
    fn bloch_tokens_and_single_variant() {
        let spec = parse("enumerate --strategy ira --eve-bases bloch:0.5,0/Z").unwrap();
        let Command::Enumerate(cfg) = spec.command else {
            panic!()
        };
        assert_eq!(
            cfg.strategy,
            EveStrategy::InterceptResend {
                bases: [
                    MeasBasis::Bloch {
                        theta: 0.5,
                        phi: 0.0
                    },
                    MeasBasis::Z
                ]
            }
        );
        let spec = parse("enumerate --strategy 2cnot --variants v2").unwrap();
        let Command::Enumerate(cfg) = spec.command else {
            panic!()
        };
        assert_eq!(
            cfg.strategy,
            EveStrategy::TwoCnot {
                variants: [Some(Variant::V2), None]
            }
        );
    }

    #[test]
    fn basis_lists() {
        assert_eq!(
            parse_basis_list("XY").unwrap(),
            vec![MeasBasis::X, MeasBasis::Y]
        );
        assert_eq!(
            parse_basis_list("Z/Y").unwrap(),
            vec![MeasBasis::Z, MeasBasis::Y]
        );
        assert!(parse_basis_list("X//Y").is_err());
        assert!(parse_basis_list("bloch:9,0").is_err());
    }
}
