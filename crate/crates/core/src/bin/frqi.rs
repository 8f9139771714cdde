use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use frqi::circuit::{Backend, CouplingMap};
use frqi::experiment::{self, ExperimentConfig, ImageSource, Mitigation, Shots};
use frqi::image::{self, DecodeVariant, EncodingMode};
use frqi::sim::{CalibrationOptions, NoiseModel};
use frqi::{BuilderVariant, Error};

/// Encode grayscale images as FRQI circuits, run them on a simulated
/// backend and decode the result.
#[derive(Parser)]
#[command(name = "frqi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode, execute and decode one image; writes output.pgm and metrics.json.
    Roundtrip {
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "exact")]
        shots: Shots,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// One CSV row per (n, builder).
    SweepSize {
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        /// Image to downscale to each size; uniform random pixels if absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "exact")]
        shots: Shots,
        /// Build and lower only; no simulation.
        #[arg(long)]
        construct_only: bool,
        /// CSV path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated runs over several shot counts.
    SweepShots {
        /// Image to run; a random 2^n-sided image if absent.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated shot counts.
        #[arg(long, value_delimiter = ',', default_value = "8192,1e6")]
        shots: Vec<Shots>,
        /// Seeds per shot count, starting at --seed.
        #[arg(long, default_value_t = 5)]
        repeats: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raw counts (or exact distribution) on the data qubits as JSON.
    Counts {
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "exact")]
        shots: Shots,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Readout calibration matrix as JSON, usable with --mitigation model:FILE.
    Calibrate {
        #[arg(long)]
        qubits: u32,
        #[arg(long, default_value_t = 0.0)]
        p_meas: f64,
        #[arg(long, default_value_t = 0.0)]
        p_gate: f64,
        #[arg(long, default_value_t = 8192)]
        cal_shots: u64,
        /// Let gate noise hit the preparation X gates too.
        #[arg(long)]
        gate_noise: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// mary or mcry; sweep-size runs both unless given.
    #[arg(long)]
    builder: Vec<BuilderVariant>,
    #[arg(long, default_value = "linear")]
    mode: EncodingMode,
    #[arg(long, default_value = "ratio")]
    decode: DecodeVariant,
    #[arg(long, default_value_t = 0.0)]
    p_meas: f64,
    #[arg(long, default_value_t = 0.0)]
    p_gate: f64,
    /// none, own, or model:FILE.
    #[arg(long, default_value = "none")]
    mitigation: String,
    /// Shots per prepared state for --mitigation own.
    #[arg(long, default_value_t = 8192)]
    cal_shots: u64,
    /// Calibrate with gate noise on the preparation gates.
    #[arg(long)]
    cal_gate_noise: bool,
    /// Backend name, line:N, complete:N, or an edge-list file.
    #[arg(long)]
    coupling_map: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write null timings so output is byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
}

impl RunArgs {
    fn config(&self, shots: Shots) -> Result<ExperimentConfig, Error> {
        let noise = (self.p_meas > 0.0 || self.p_gate > 0.0)
            .then(|| NoiseModel::new(self.p_meas, self.p_gate))
            .transpose()?;
        let mitigation = match self.mitigation.as_str() {
            "none" => Mitigation::None,
            "own" => Mitigation::Own {
                p_meas: self.p_meas,
                p_gate: self.p_gate,
                cal_shots: self.cal_shots,
            },
            m => match m.strip_prefix("model:") {
                Some(path) if !path.is_empty() => Mitigation::Model { path: path.into() },
                _ => {
                    return Err(Error::Usage(format!(
                        "unknown mitigation '{m}' (none, own, model:FILE)"
                    )))
                }
            },
        };
        let cfg = ExperimentConfig {
            builder: self.builder.first().copied().unwrap_or(BuilderVariant::Mary),
            mode: self.mode,
            decode: self.decode,
            shots,
            noise,
            mitigation,
            coupling_map: self.coupling_map.as_deref().map(coupling_map).transpose()?,
            seed: self.seed,
            calibration: CalibrationOptions {
                gate_noise: self.cal_gate_noise,
            },
            record_timing: !self.no_timing,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn coupling_map(spec: &str) -> Result<CouplingMap, Error> {
    if let Ok(b) = Backend::from_str(spec) {
        return Ok(b.coupling_map());
    }
    let sized = |prefix: &str| {
        spec.strip_prefix(prefix)
            .map(|n| {
                n.parse::<u32>()
                    .map_err(|_| Error::Usage(format!("bad qubit count in '{spec}'")))
            })
            .transpose()
    };
    if let Some(n) = sized("line:")? {
        return Ok(CouplingMap::line(n));
    }
    if let Some(n) = sized("complete:")? {
        return Ok(CouplingMap::complete(n));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Error::Io {
        context: format!("reading coupling map {spec}"),
        source: e,
    })?;
    Ok(CouplingMap::from_text(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => experiment::save_text(path, text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io {
            context: "writing stdout".into(),
            source: e,
        }),
    }
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Roundtrip { input, run, shots, out } => {
            let report = experiment::cmd_roundtrip(&run.config(shots)?, &input, &out)?;
            emit(None, &experiment::json_string(&report))
        }
        Command::SweepSize {
            n_min,
            n_max,
            input,
            run,
            shots,
            construct_only,
            out,
        } => {
            if n_min == 0 || n_min > n_max {
                return Err(Error::Usage(format!("bad size range {n_min}..={n_max}")));
            }
            let cfg = run.config(shots)?;
            let source = match input {
                Some(path) => ImageSource::Pgm(image::load_pgm(path)?),
                None => ImageSource::Random { seed: cfg.seed },
            };
            let variants = if run.builder.is_empty() {
                BuilderVariant::ALL.to_vec()
            } else {
                run.builder.clone()
            };
            let rows = experiment::cmd_sweep_size(&cfg, n_min..=n_max, &variants, &source, construct_only)?;
            emit(out.as_deref(), &experiment::sizes_to_csv(&rows))
        }
        Command::SweepShots {
            input,
            n,
            run,
            shots,
            repeats,
            out,
        } => {
            if repeats == 0 || shots.contains(&Shots::Exact) {
                return Err(Error::Usage(
                    "sweep-shots needs sampled shot counts and at least one repeat".into(),
                ));
            }
            let counts: Vec<u64> = shots
                .iter()
                .map(|s| match s {
                    Shots::Sampled(k) => *k,
                    Shots::Exact => unreachable!(),
                })
                .collect();
            let cfg = run.config(shots[0])?;
            let img = match input {
                Some(path) => image::load_pgm(path)?,
                None => ImageSource::Random { seed: cfg.seed }.image(n)?,
            };
            let rows = experiment::cmd_sweep_shots(&cfg, &img, &counts, repeats)?;
            emit(out.as_deref(), &experiment::shots_to_csv(&rows))
        }
        Command::Counts { input, run, shots, out } => {
            let img = image::load_pgm(input)?;
            let value = experiment::cmd_counts(&run.config(shots)?, &img)?;
            emit(out.as_deref(), &experiment::json_string(&value))
        }
        Command::Calibrate {
            qubits,
            p_meas,
            p_gate,
            cal_shots,
            gate_noise,
            seed,
            out,
        } => {
            let noise = NoiseModel::new(p_meas, p_gate)?;
            let cal = experiment::cmd_calibrate(qubits, &noise, cal_shots, seed, CalibrationOptions { gate_noise })?;
            emit(out.as_deref(), &format!("{}\n", cal.to_json()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
