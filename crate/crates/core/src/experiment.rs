//! End-to-end experiments: encode, lower, route, simulate, mitigate, decode.
//!
//! These back the `frqi` subcommands but are plain functions returning
//! serializable reports, so they are equally usable from code.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::builder::{self, BuildError, BuildOptions, BuilderVariant};
use crate::circuit::{Circuit, CouplingMap, GateClass};
use crate::image::{self, DecodeVariant, EncodingMode, Image};
use crate::sim::{self, CalibrationMatrix, CalibrationOptions, NoiseModel, SimConfig, SimError};
use crate::transpile::{self, Placement};
use crate::Error;

/// Version tag written as the first line of every CSV.
pub const CSV_VERSION: &str = "# frqi-csv v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    /// Decode the exact output distribution.
    Exact,
    Sampled(u64),
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Sampled(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Shots {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Self::Exact);
        }
        // accept 1e6 style counts
        let v: f64 = s.parse().map_err(|_| format!("invalid shot count '{s}'"))?;
        if v < 1.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
            return Err(format!("shot count must be a positive integer, got '{s}'"));
        }
        Ok(Self::Sampled(v as u64))
    }
}

impl Serialize for Shots {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Exact => s.serialize_str("exact"),
            Self::Sampled(n) => s.serialize_u64(*n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Mitigation {
    None,
    /// Calibrate against our own noise model.
    Own {
        p_meas: f64,
        p_gate: f64,
        cal_shots: u64,
    },
    /// Calibration matrix loaded from a JSON file written by `calibrate`.
    Model {
        path: PathBuf,
    },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub builder: BuilderVariant,
    pub mode: EncodingMode,
    pub decode: DecodeVariant,
    pub shots: Shots,
    pub noise: Option<NoiseModel>,
    pub mitigation: Mitigation,
    pub coupling_map: Option<CouplingMap>,
    pub seed: u64,
    pub build: BuildOptions,
    pub sim: SimConfig,
    pub calibration: CalibrationOptions,
    /// Wall-clock fields are written as null when off, making output
    /// byte-identical across runs.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            builder: BuilderVariant::Mary,
            mode: EncodingMode::Linear,
            decode: DecodeVariant::Ratio,
            shots: Shots::Exact,
            noise: None,
            mitigation: Mitigation::None,
            coupling_map: None,
            seed: 0,
            build: BuildOptions::default(),
            sim: SimConfig::default(),
            calibration: CalibrationOptions::default(),
            record_timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.shots == Shots::Exact {
            if self.noise.as_ref().is_some_and(|n| !n.is_noiseless()) {
                return Err(Error::Usage("exact shots cannot be combined with noise".into()));
            }
            if self.mitigation != Mitigation::None {
                return Err(Error::Usage("mitigation requires sampled shots".into()));
            }
        }
        if let Mitigation::Own {
            p_meas,
            p_gate,
            cal_shots,
        } = self.mitigation
        {
            NoiseModel::new(p_meas, p_gate)?;
            if cal_shots == 0 {
                return Err(Error::Usage("calibration needs at least one shot".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of one encode–execute–decode run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub builder: BuilderVariant,
    pub mode: EncodingMode,
    pub decode: DecodeVariant,
    pub n: u32,
    pub shots: Shots,
    pub seed: u64,
    pub num_qubits: u32,
    pub depth: usize,
    pub gate_counts: BTreeMap<GateClass, usize>,
    pub cx_count: usize,
    pub swaps: usize,
    pub relative_difference: f64,
    /// Same run decoded without mitigation, when mitigation is on.
    pub unmitigated_relative_difference: Option<f64>,
    pub zero_mass_pixels: Vec<usize>,
    pub wall_time_s: Option<f64>,
    #[serde(skip)]
    pub output: Image,
    #[serde(skip)]
    pub raw: Measurement,
    #[serde(skip)]
    pub mitigated: Option<Vec<f64>>,
}

/// What was measured on the data qubits (positions, then gray).
#[derive(Debug, Clone, Default)]
pub enum Measurement {
    #[default]
    None,
    Exact(Vec<f64>),
    Counts(sim::Counts),
}

/// Builds the circuit for `img`, lowers it, and routes it when a coupling
/// map is configured. Returns the executable circuit and, for each data
/// qubit, the executable qubit it is measured on.
pub fn compile(cfg: &ExperimentConfig, img: &Image) -> Result<(Circuit, Vec<u32>, usize), Error> {
    let angles = image::gray_to_angles(img, cfg.mode);
    let circuit = builder::build_circuit(cfg.builder, &angles, &cfg.build)?;
    let lowered = transpile::lower(&circuit);
    let data = circuit.roles().data_qubits();
    match &cfg.coupling_map {
        None => Ok((lowered, data, 0)),
        Some(map) => {
            let routed = transpile::route(&lowered, map, &Placement::Auto)?;
            let (exec, index) = routed.compact();
            let measured = data
                .iter()
                .map(|&l| index[routed.final_layout[l as usize] as usize].expect("kept"))
                .collect();
            Ok((exec, measured, routed.swaps))
        }
    }
}

pub fn run(cfg: &ExperimentConfig, img: &Image) -> Result<RunReport, Error> {
    cfg.validate()?;
    let start = Instant::now();
    let (exec, data, swaps) = compile(cfg, img)?;
    let n = img.exponent();
    let (raw, probs) = match cfg.shots {
        Shots::Exact => {
            let dist = sim::exact_probabilities(&exec, &cfg.sim)?.marginal(&data)?;
            let p = dist.into_probs();
            (Measurement::Exact(p.clone()), p)
        }
        Shots::Sampled(shots) => {
            let counts = sim::sample(&exec, shots, cfg.noise.as_ref(), cfg.seed, &cfg.sim)?.marginal(&data)?;
            let p = counts.to_distribution().into_probs();
            (Measurement::Counts(counts), p)
        }
    };
    let mitigated = match calibration_for(cfg, data.len() as u32)? {
        Some(cal) => Some(sim::mitigate_distribution(&probs, &cal)?.into_probs()),
        None => None,
    };
    let decoded = image::probs_to_image(mitigated.as_deref().unwrap_or(&probs), n, cfg.mode, cfg.decode)?;
    let relative_difference = image::relative_difference(img, &decoded.image)?;
    let unmitigated_relative_difference = match mitigated {
        Some(_) => {
            let plain = image::probs_to_image(&probs, n, cfg.mode, cfg.decode)?;
            Some(image::relative_difference(img, &plain.image)?)
        }
        None => None,
    };
    let stats = exec.stats();
    Ok(RunReport {
        builder: cfg.builder,
        mode: cfg.mode,
        decode: cfg.decode,
        n,
        shots: cfg.shots,
        seed: cfg.seed,
        num_qubits: exec.num_qubits(),
        depth: stats.depth(),
        cx_count: stats.count(GateClass::CX),
        gate_counts: stats.counts().clone(),
        swaps,
        relative_difference,
        unmitigated_relative_difference,
        zero_mass_pixels: decoded.zero_mass_pixels,
        wall_time_s: cfg.record_timing.then(|| start.elapsed().as_secs_f64()),
        output: decoded.image,
        raw,
        mitigated,
    })
}

fn calibration_for(cfg: &ExperimentConfig, q: u32) -> Result<Option<CalibrationMatrix>, Error> {
    let cal = match &cfg.mitigation {
        Mitigation::None => return Ok(None),
        Mitigation::Own {
            p_meas,
            p_gate,
            cal_shots,
        } => {
            let noise = NoiseModel::new(*p_meas, *p_gate)?;
            sim::build_calibration(q, &noise, *cal_shots, calibration_seed(cfg.seed), cfg.calibration)?
        }
        Mitigation::Model { path } => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                context: format!("reading {}", path.display()),
                source: e,
            })?;
            CalibrationMatrix::from_json(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?
        }
    };
    if cal.num_qubits() != q {
        return Err(SimError::DimMismatch {
            expected: 1 << q,
            found: cal.dim(),
        }
        .into());
    }
    Ok(Some(cal))
}

fn calibration_seed(seed: u64) -> u64 {
    seed ^ 0xC0FF_EE00_CA11_B8A7
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            context: format!("creating {}", dir.display()),
            source: e,
        })?;
    }
    fs::write(path, bytes).map_err(|e| Error::Io {
        context: format!("writing {}", path.display()),
        source: e,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes `output.pgm` and `metrics.json` into `out_dir`.
pub fn cmd_roundtrip(cfg: &ExperimentConfig, input: &Path, out_dir: &Path) -> Result<RunReport, Error> {
    let img = image::load_pgm(input)?;
    let report = run(cfg, &img)?;
    write_file(&out_dir.join("output.pgm"), &image::encode_pgm(&report.output))?;
    write_file(&out_dir.join("metrics.json"), to_json(&report).as_bytes())?;
    Ok(report)
}

/// Where sweep images come from.
#[derive(Debug, Clone)]
pub enum ImageSource {
    /// Box-downscaled to each size.
    Pgm(Image),
    /// Uniform random pixels, seeded per size.
    Random { seed: u64 },
}

impl ImageSource {
    pub fn image(&self, n: u32) -> Result<Image, Error> {
        let side = 1usize << n;
        match self {
            Self::Pgm(img) => Ok(image::downscale(img, side)?),
            Self::Random { seed } => Ok(random_image(side, seed.wrapping_add(u64::from(n)))?),
        }
    }
}

pub fn random_image(side: usize, seed: u64) -> Result<Image, image::ImageError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::new(side, (0..side * side).map(|_| rng.gen()).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeRow {
    pub n: u32,
    pub variant: BuilderVariant,
    pub num_qubits: Option<u32>,
    pub depth: Option<usize>,
    pub cx_count: Option<usize>,
    pub total_gates: Option<usize>,
    pub diff_rel: Option<f64>,
    pub time_s: Option<f64>,
    pub status: String,
}

/// One row per `(n, variant)`, ordered by `n` then variant.
///
/// With `construct_only` the circuit is built and its lowering measured as a
/// stream, without simulation.
pub fn cmd_sweep_size(
    cfg: &ExperimentConfig,
    n_range: std::ops::RangeInclusive<u32>,
    variants: &[BuilderVariant],
    source: &ImageSource,
    construct_only: bool,
) -> Result<Vec<SizeRow>, Error> {
    if !construct_only {
        cfg.validate()?;
    }
    let jobs: Vec<(u32, BuilderVariant)> = n_range.flat_map(|n| variants.iter().map(move |&v| (n, v))).collect();
    let mut rows: Vec<SizeRow> = jobs
        .par_iter()
        .map(|&(n, variant)| size_row(cfg, n, variant, source, construct_only))
        .collect::<Result<_, Error>>()?;
    rows.sort_by_key(|r| (r.n, r.variant));
    Ok(rows)
}

fn size_row(
    cfg: &ExperimentConfig,
    n: u32,
    variant: BuilderVariant,
    source: &ImageSource,
    construct_only: bool,
) -> Result<SizeRow, Error> {
    let mut row = SizeRow {
        n,
        variant,
        num_qubits: None,
        depth: None,
        cx_count: None,
        total_gates: None,
        diff_rel: None,
        time_s: None,
        status: "ok".into(),
    };
    let start = Instant::now();
    let img = source.image(n)?;
    let cfg = ExperimentConfig {
        builder: variant,
        ..cfg.clone()
    };
    let outcome = if construct_only {
        construct(&cfg, &img).map(|(q, stats)| {
            row.num_qubits = Some(q);
            row.depth = Some(stats.depth());
            row.cx_count = Some(stats.count(GateClass::CX));
            row.total_gates = Some(stats.total());
        })
    } else {
        run(&cfg, &img).map(|r| {
            row.num_qubits = Some(r.num_qubits);
            row.depth = Some(r.depth);
            row.cx_count = Some(r.cx_count);
            row.total_gates = Some(r.gate_counts.values().sum());
            row.diff_rel = Some(r.relative_difference);
        })
    };
    match outcome {
        Ok(()) => {}
        Err(e) => match e.exit_code() {
            2 => row.status = resource_status(&e).into(),
            _ => return Err(e),
        },
    }
    row.time_s = cfg.record_timing.then(|| start.elapsed().as_secs_f64());
    Ok(row)
}

fn resource_status(e: &Error) -> &'static str {
    match e {
        Error::Build(BuildError::TooLarge { .. }) => "too-large",
        Error::Build(BuildError::OverBudget { .. }) => "over-budget",
        _ => "sim-cap",
    }
}

/// Builds and measures the lowered circuit without materializing it.
pub fn construct(cfg: &ExperimentConfig, img: &Image) -> Result<(u32, crate::circuit::CircuitStats), Error> {
    let angles = image::gray_to_angles(img, cfg.mode);
    let circuit = builder::build_circuit(cfg.builder, &angles, &cfg.build)?;
    Ok((circuit.num_qubits(), transpile::lower_stats(&circuit)))
}

pub fn sizes_to_csv(rows: &[SizeRow]) -> String {
    let mut out =
        format!("{CSV_VERSION} sweep-size\nn,variant,qubits,depth,cx_count,total_gates,diff_rel,time_s,status\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.variant,
            opt(r.num_qubits),
            opt(r.depth),
            opt(r.cx_count),
            opt(r.total_gates),
            opt(r.diff_rel),
            opt(r.time_s),
            r.status
        ));
    }
    out
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct ShotsRow {
    pub n: u32,
    pub variant: BuilderVariant,
    pub shots: u64,
    pub seed: u64,
    pub diff_rel: f64,
    pub unmitigated_diff_rel: Option<f64>,
}

/// Repeats the run for every shot count and `repeats` consecutive seeds.
pub fn cmd_sweep_shots(
    cfg: &ExperimentConfig,
    img: &Image,
    shot_counts: &[u64],
    repeats: u64,
) -> Result<Vec<ShotsRow>, Error> {
    let jobs: Vec<(u64, u64)> = shot_counts
        .iter()
        .flat_map(|&s| (0..repeats).map(move |k| (s, k)))
        .collect();
    jobs.iter()
        .map(|&(shots, k)| {
            let cfg = ExperimentConfig {
                shots: Shots::Sampled(shots),
                seed: cfg.seed.wrapping_add(k),
                record_timing: false,
                ..cfg.clone()
            };
            let r = run(&cfg, img)?;
            Ok(ShotsRow {
                n: r.n,
                variant: r.builder,
                shots,
                seed: cfg.seed,
                diff_rel: r.relative_difference,
                unmitigated_diff_rel: r.unmitigated_relative_difference,
            })
        })
        .collect()
}

pub fn shots_to_csv(rows: &[ShotsRow]) -> String {
    let mut out = format!("{CSV_VERSION} sweep-shots\nn,variant,shots,seed,diff_rel,unmitigated_diff_rel\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.variant,
            r.shots,
            r.seed,
            r.diff_rel,
            opt(r.unmitigated_diff_rel)
        ));
    }
    out
}

/// Raw counts (or the exact distribution) on the data qubits, plus the
/// mitigated distribution when mitigation is configured.
pub fn cmd_counts(cfg: &ExperimentConfig, img: &Image) -> Result<serde_json::Value, Error> {
    let r = run(cfg, img)?;
    let mut obj = serde_json::Map::new();
    obj.insert("shots".into(), serde_json::to_value(r.shots).expect("serializable"));
    match &r.raw {
        Measurement::Exact(p) => {
            obj.insert("distribution".into(), p.clone().into());
        }
        Measurement::Counts(c) => {
            obj.insert("counts".into(), c.to_json_map().into());
        }
        Measurement::None => {}
    }
    if let Some(m) = &r.mitigated {
        obj.insert("mitigated".into(), m.clone().into());
    }
    Ok(obj.into())
}

/// Calibration matrix over `q` qubits as written to disk.
pub fn cmd_calibrate(
    q: u32,
    noise: &NoiseModel,
    shots_per_state: u64,
    seed: u64,
    opts: CalibrationOptions,
) -> Result<CalibrationMatrix, Error> {
    if shots_per_state == 0 {
        return Err(SimError::ZeroShots.into());
    }
    Ok(sim::build_calibration(q, noise, shots_per_state, seed, opts)?)
}

pub fn save_text(path: &Path, text: &str) -> Result<(), Error> {
    write_file(path, text.as_bytes())
}

pub fn json_string<T: Serialize>(value: &T) -> String {
    to_json(value)
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}
