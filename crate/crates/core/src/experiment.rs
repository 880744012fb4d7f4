//! Experiment configuration and the drivers behind the command-line tool.
//!
//! Every driver writes its artifacts into the configured output directory and
//! finishes with `manifest.json`, which lists each file with its SHA-256. Wall
//! clock data only appears in the manifest's `metadata` object.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::ambiguity::AmbiguityEvaluator;
use crate::audio::{read_wav, write_wav};
use crate::container::{self, Container};
use crate::error::{Error, Result};
use crate::grid::{gen_chirp, gen_mixture, ChirpSpec, Grid, MixtureSpec, MixtureTerm, Signal};
use crate::metrics::{misfit, verify_noise_bounds, BoundReport};
use crate::retrieval::{retrieve, single_window_retrieve, Algorithm, Reconstruction, RetrievalConfig};
use crate::stft::{MeasurementSet, NoiseModel, RNG_ALGORITHM};
use crate::windows::{
    build_frft_family, build_frft_family_with_angles, build_hermite_family, coverage_radii, stability_mask,
    summed_mask, Scheme, WindowFamily,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalConfig {
    Chirp {
        #[serde(flatten)]
        spec: ChirpSpec,
    },
    Mixture {
        #[serde(default = "preset_terms")]
        terms: Vec<MixtureTerm>,
    },
    /// Crop of a mono PCM16 file on a grid of half-width `half_width`,
    /// by default `sqrt(L)/2` so the lattice is square in physical units.
    Wav {
        path: PathBuf,
        #[serde(default)]
        offset: usize,
        #[serde(default = "default_crop")]
        length: usize,
        #[serde(default)]
        half_width: Option<f64>,
    },
}

fn preset_terms() -> Vec<MixtureTerm> {
    MixtureSpec::preset().terms
}

fn default_crop() -> usize {
    1024
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig::Chirp { spec: ChirpSpec::preset() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeConfig {
    /// Angles default to `(j - 1) pi / n`; an explicit list wins over `n`.
    FrftGauss {
        a: f64,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        angles: Option<Vec<f64>>,
    },
    Hermite {
        degrees: Vec<usize>,
    },
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig::FrftGauss { a: 15.0, n: Some(40), angles: None }
    }
}

impl SchemeConfig {
    pub fn build(&self, grid: &Grid) -> Result<WindowFamily> {
        match self {
            SchemeConfig::FrftGauss { a, angles: Some(angles), .. } => build_frft_family_with_angles(*a, angles, grid),
            SchemeConfig::FrftGauss { a, n: Some(n), angles: None } => build_frft_family(*a, *n, grid),
            SchemeConfig::FrftGauss { n: None, angles: None, .. } => {
                Err(Error::Config("frft_gauss scheme needs `n` or `angles`".into()))
            }
            SchemeConfig::Hermite { degrees } => build_hermite_family(degrees, grid),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            SchemeConfig::FrftGauss { .. } => Algorithm::Alg1,
            SchemeConfig::Hermite { .. } => Algorithm::Alg2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    None,
    Additive { level: f64 },
    Multiplicative { level: f64 },
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::None
    }
}

impl NoiseConfig {
    fn apply(&self, set: &MeasurementSet, seed: u64) -> Result<MeasurementSet> {
        match *self {
            NoiseConfig::None => Ok(set.clone()),
            NoiseConfig::Additive { level } => set.with_noise(NoiseModel::Additive, level, seed),
            NoiseConfig::Multiplicative { level } => set.with_noise(NoiseModel::Multiplicative, level, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t: f64,
    pub l: usize,
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::square(self.t, self.l)
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { t: 8.0, l: 1024 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitFlags {
    pub csv: bool,
    pub pgm: bool,
    pub json: bool,
    pub wav: bool,
    /// Binary containers for the signal, ambiguity lattice and measurements.
    pub binary: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags { csv: true, pgm: true, json: true, wav: true, binary: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Dilation of the single Gauss window.
    pub a: f64,
    pub epsilons: Vec<f64>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { a: 1.0, epsilons: vec![1e-3, 1e-6, 1e-9] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub count: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub trials: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig { count: 6, min_degree: 0, max_degree: 50, trials: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub trials: usize,
    pub levels: Vec<f64>,
    pub p: f64,
    pub grid: GridConfig,
    pub frft: SchemeConfig,
    pub hermite: SchemeConfig,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            trials: 50,
            levels: vec![1e-3, 1e-2, 1e-1],
            p: 2.0,
            grid: GridConfig { t: 8.0, l: 256 },
            frft: SchemeConfig::default(),
            hermite: SchemeConfig::Hermite { degrees: vec![0, 10, 20, 30, 40, 50] },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub signal: SignalConfig,
    pub scheme: SchemeConfig,
    pub epsilon: f64,
    pub noise: NoiseConfig,
    pub grid: GridConfig,
    pub outputs: PathBuf,
    pub emit: EmitFlags,
    pub seed: u64,
    pub baseline: BaselineConfig,
    pub study: StudyConfig,
    pub bounds: BoundsConfig,
    /// Directory relative paths in the config resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            signal: SignalConfig::default(),
            scheme: SchemeConfig::default(),
            epsilon: 1e-3,
            noise: NoiseConfig::None,
            grid: GridConfig::default(),
            outputs: PathBuf::from("out"),
            emit: EmitFlags::default(),
            seed: 0,
            baseline: BaselineConfig::default(),
            study: StudyConfig::default(),
            bounds: BoundsConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_json(&fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        self.grid.grid().map_err(|e| Error::Config(e.to_string()))?;
        match self.noise {
            NoiseConfig::Additive { level } | NoiseConfig::Multiplicative { level } if !(level >= 0.0) => {
                return Err(Error::Config(format!("noise level must be non-negative, got {level}")));
            }
            _ => {}
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// The test signal together with the audio rate when it came from a file.
    pub fn make_signal(&self) -> Result<(Signal, Option<u32>)> {
        self.make_signal_on(&self.grid)
    }

    /// Like [`Self::make_signal`] on another grid; audio crops keep their own grid.
    pub fn make_signal_on(&self, grid: &GridConfig) -> Result<(Signal, Option<u32>)> {
        let grid = grid.grid()?;
        match &self.signal {
            SignalConfig::Chirp { spec } => Ok((gen_chirp(spec, &grid)?, None)),
            SignalConfig::Mixture { terms } => Ok((gen_mixture(&MixtureSpec { terms: terms.clone() }, &grid)?, None)),
            SignalConfig::Wav { path, offset, length, half_width } => {
                let audio = read_wav(self.resolve(path))?.crop(*offset, *length)?;
                let t = half_width.unwrap_or((*length as f64).sqrt() / 2.0);
                let grid = Grid::square(t, *length)?;
                Ok((Signal::from_real(grid, &audio.samples)?, Some(audio.sample_rate)))
            }
        }
    }
}

/// One emitted file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Writes artifacts one at a time and records them for the manifest.
pub struct ArtifactWriter {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ArtifactWriter { dir, entries: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, produce: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        produce(&path)?;
        let bytes = fs::read(&path)?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.write(name, |p| {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            fs::write(p, text)?;
            Ok(())
        })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn finish(self, command: &str, cfg: &ExperimentConfig) -> Result<PathBuf> {
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let manifest = json!({
            "command": command,
            "files": self.entries,
            "config": cfg,
            "metadata": {
                "tool": env!("CARGO_PKG_NAME"),
                "version": env!("CARGO_PKG_VERSION"),
                "rng": RNG_ALGORITHM,
                "created_unix": created,
            },
        });
        let path = self.dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}

/// Lines for standard output plus the manifest location.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub manifest: PathBuf,
}

fn magnitudes(values: &Array2<num_complex::Complex64>) -> Array2<f64> {
    values.mapv(|v| v.norm())
}

/// Interior gaps of a mask along the positive `x` half of the `y = 0` row.
pub fn radial_gaps(bits: &Array2<bool>) -> usize {
    let half = bits.nrows() / 2;
    let row: Vec<bool> = bits.row(half).iter().skip(bits.ncols() / 2).copied().collect();
    let last_true = match row.iter().rposition(|&b| b) {
        Some(i) => i,
        None => return 0,
    };
    row[..=last_true].windows(2).filter(|w| w[0] && !w[1]).count()
}

pub fn cmd_coverage(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grid = cfg.grid.grid()?;
    let family = cfg.scheme.build(&grid)?;
    let mut out = ArtifactWriter::new(&cfg.outputs)?;
    let mut lines = Vec::new();
    match family.scheme() {
        Scheme::FrftGauss { a } => {
            let sum = family.summed_lattice()?;
            let mask = summed_mask(&family, cfg.epsilon)?;
            if cfg.emit.pgm {
                out.write("summed_ambiguity.pgm", |p| container::write_log_pgm(&magnitudes(&sum), p))?;
                out.write("mask.pgm", |p| container::write_mask_pgm(&mask.bits, p))?;
            }
            let report = coverage_radii(a, family.len(), cfg.epsilon).ok();
            if let Some(r) = &report {
                lines.push(format!("R1 = {:.6}  R2 = {:.6}  numeric = {:.6}", r.r1, r.r2, r.covered_disc_radius_numeric));
            }
            lines.push(format!("mask covers {:.4} of the lattice", mask.area_fraction()));
            if cfg.emit.json {
                out.json(
                    "coverage.json",
                    &json!({
                        "scheme": family.scheme(),
                        "windows": family.len(),
                        "epsilon": cfg.epsilon,
                        "report": report,
                        "mask_area_fraction": mask.area_fraction(),
                        "mask_area": mask.area(),
                    }),
                )?;
            }
        }
        Scheme::Hermite => {
            let mut union = None;
            let mut members = Vec::new();
            for n in family.degrees() {
                let m = stability_mask(&AmbiguityEvaluator::Hermite { n }, cfg.epsilon, &grid)?;
                if cfg.emit.pgm {
                    out.write(&format!("mask_n{n}.pgm"), |p| container::write_mask_pgm(&m.bits, p))?;
                }
                let gaps = radial_gaps(&m.bits);
                lines.push(format!("degree {n}: {} cells, {gaps} annular gaps", m.count()));
                members.push(json!({ "degree": n, "cells": m.count(), "gaps": gaps }));
                union = Some(match union {
                    None => m,
                    Some(u) => m.union(&u),
                });
            }
            let union = union.expect("families are non-empty");
            lines.push(format!("union: {} cells, {} annular gaps", union.count(), radial_gaps(&union.bits)));
            if cfg.emit.pgm {
                out.write("mask_union.pgm", |p| container::write_mask_pgm(&union.bits, p))?;
            }
            if cfg.emit.json {
                out.json(
                    "coverage.json",
                    &json!({
                        "scheme": "hermite",
                        "epsilon": cfg.epsilon,
                        "members": members,
                        "union_cells": union.count(),
                        "union_gaps": radial_gaps(&union.bits),
                        "union_area_fraction": union.area_fraction(),
                    }),
                )?;
            }
        }
    }
    let manifest = out.finish("coverage", cfg)?;
    Ok(Outcome { lines, manifest })
}

fn emit_reconstruction(
    out: &mut ArtifactWriter,
    cfg: &ExperimentConfig,
    prefix: &str,
    truth: &Signal,
    rec: &Reconstruction,
    rate: Option<u32>,
) -> Result<()> {
    if cfg.emit.csv {
        out.write(&format!("{prefix}signal.csv"), |p| container::write_signal_csv(&rec.signal, p))?;
    }
    if cfg.emit.binary {
        out.write(&format!("{prefix}signal.bin"), |p| Container::from_signal(&rec.signal, "reconstruction").save(p))?;
        out.write(&format!("{prefix}ambiguity.bin"), |p| {
            Container::from_ambiguity(&rec.ambiguity, "masked ambiguity estimate").save(p)
        })?;
    }
    if cfg.emit.pgm {
        out.write(&format!("{prefix}mask.pgm"), |p| container::write_mask_pgm(&rec.mask().bits, p))?;
        out.write(&format!("{prefix}ambiguity.pgm"), |p| {
            container::write_log_pgm(&magnitudes(&rec.ambiguity.values), p)
        })?;
    }
    if cfg.emit.wav {
        if let Some(rate) = rate {
            // Align the global phase with the input before writing audio.
            let (_, theta) = misfit(truth, &rec.signal)?;
            let aligned = rec.signal.scaled(num_complex::Complex64::from_polar(1.0, theta));
            out.write(&format!("{prefix}signal.wav"), |p| write_wav(aligned.values(), rate, p))?;
        }
    }
    Ok(())
}

fn emit_truth(out: &mut ArtifactWriter, cfg: &ExperimentConfig, truth: &Signal, rate: Option<u32>) -> Result<()> {
    if cfg.emit.csv {
        out.write("truth.csv", |p| container::write_signal_csv(truth, p))?;
    }
    if cfg.emit.wav {
        if let Some(rate) = rate {
            out.write("truth.wav", |p| write_wav(truth.values(), rate, p))?;
        }
    }
    Ok(())
}

pub fn cmd_retrieve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (truth, rate) = cfg.make_signal()?;
    let family = cfg.scheme.build(truth.grid())?;
    let clean = family.measure(&truth)?;
    let noisy = cfg.noise.apply(&clean, cfg.seed)?;
    let rcfg = RetrievalConfig::new(cfg.epsilon, cfg.scheme.algorithm());
    let mut rec = retrieve(&noisy, &family, &rcfg)?;
    let bounds = verify_noise_bounds(&clean, &noisy, &family, &rcfg, 2.0, Some(&truth))?;
    rec.diagnostics = Some(bounds);
    let (d, theta) = misfit(&truth, &rec.signal)?;

    let mut out = ArtifactWriter::new(&cfg.outputs)?;
    emit_truth(&mut out, cfg, &truth, rate)?;
    emit_reconstruction(&mut out, cfg, "reconstruction_", &truth, &rec, rate)?;
    if cfg.emit.json {
        out.json(
            "result.json",
            &json!({
                "misfit": d,
                "theta": theta,
                "algorithm": rcfg.algorithm,
                "epsilon": cfg.epsilon,
                "windows": family.members().iter().map(|w| w.id.clone()).collect::<Vec<_>>(),
                "anchor_c": rec.anchor_c,
                "anchor_time": truth.grid().time(rec.anchor_c),
                "omega_area_fraction": rec.omega_area_fraction,
                "noise": noisy.members().iter().map(|m| m.noise).collect::<Vec<_>>(),
            }),
        )?;
        out.json("bounds.json", &bounds)?;
    }
    let lines = vec![
        format!("d = {d:.6}"),
        format!("theta = {theta:.6}"),
        format!("omega area fraction = {:.4}", rec.omega_area_fraction),
    ];
    let manifest = out.finish("retrieve", cfg)?;
    Ok(Outcome { lines, manifest })
}

pub fn cmd_baseline(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (truth, rate) = cfg.make_signal()?;
    let a = cfg.baseline.a;
    let family = build_frft_family(a, 1, truth.grid())?;
    let clean = family.measure(&truth)?;
    let noisy = cfg.noise.apply(&clean, cfg.seed)?;
    let evaluator = AmbiguityEvaluator::Gauss { a };
    let mut out = ArtifactWriter::new(&cfg.outputs)?;
    emit_truth(&mut out, cfg, &truth, rate)?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for (i, &eps) in cfg.baseline.epsilons.iter().enumerate() {
        let rcfg = RetrievalConfig::new(eps, Algorithm::Alg1);
        let rec = single_window_retrieve(&noisy.members()[0], &evaluator, &rcfg)?;
        let (d, theta) = misfit(&truth, &rec.signal)?;
        emit_reconstruction(&mut out, cfg, &format!("eps{i}_"), &truth, &rec, rate)?;
        lines.push(format!("epsilon = {eps:e}: d = {d:.6}, theta = {theta:.6}"));
        rows.push(json!({ "epsilon": eps, "misfit": d, "theta": theta, "omega_area_fraction": rec.omega_area_fraction }));
    }
    if cfg.emit.csv {
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                ["epsilon", "misfit", "theta", "omega_area_fraction"].iter().map(|k| r[*k].to_string()).collect()
            })
            .collect();
        out.write("baseline.csv", |p| {
            container::write_table_csv(&["epsilon", "misfit", "theta", "omega_area_fraction"], &table, p)
        })?;
    }
    if cfg.emit.json {
        out.json("baseline.json", &json!({ "window": evaluator, "runs": rows }))?;
    }
    let manifest = out.finish("baseline", cfg)?;
    Ok(Outcome { lines, manifest })
}

/// Summary of a random Hermite window study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub trials: usize,
    pub count: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub seed: u64,
    pub mean: f64,
    pub p90: f64,
    pub min: f64,
    pub max: f64,
    pub degree_sets: Vec<Vec<usize>>,
    pub misfits: Vec<f64>,
}

/// Nearest-rank percentile of unsorted data.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Draws `trials` degree sets (sorted, without replacement) and runs the
/// peeled scheme on each.
pub fn random_hermite_study(
    truth: &Signal,
    study: &StudyConfig,
    epsilon: f64,
    seed: u64,
) -> Result<StudySummary> {
    if study.trials == 0 {
        return Err(Error::Config("study needs at least one trial".into()));
    }
    if study.max_degree < study.min_degree || study.max_degree - study.min_degree + 1 < study.count || study.count == 0 {
        return Err(Error::Config(format!(
            "cannot draw {} distinct degrees from {}..={}",
            study.count, study.min_degree, study.max_degree
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let span = study.max_degree - study.min_degree + 1;
    let degree_sets: Vec<Vec<usize>> = (0..study.trials)
        .map(|_| {
            let mut d: Vec<usize> =
                rand::seq::index::sample(&mut rng, span, study.count).into_iter().map(|i| i + study.min_degree).collect();
            d.sort_unstable();
            d
        })
        .collect();
    let rcfg = RetrievalConfig::new(epsilon, Algorithm::Alg2);
    let misfits = degree_sets
        .par_iter()
        .map(|degrees| {
            let family = build_hermite_family(degrees, truth.grid())?;
            let rec = retrieve(&family.measure(truth)?, &family, &rcfg)?;
            Ok(misfit(truth, &rec.signal)?.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = misfits.iter().sum::<f64>() / misfits.len() as f64;
    Ok(StudySummary {
        trials: study.trials,
        count: study.count,
        min_degree: study.min_degree,
        max_degree: study.max_degree,
        seed,
        mean,
        p90: percentile(&misfits, 90.0),
        min: misfits.iter().copied().fold(f64::INFINITY, f64::min),
        max: misfits.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        degree_sets,
        misfits,
    })
}

pub fn cmd_random_study(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (truth, _) = cfg.make_signal()?;
    let summary = random_hermite_study(&truth, &cfg.study, cfg.epsilon, cfg.seed)?;
    let mut out = ArtifactWriter::new(&cfg.outputs)?;
    if cfg.emit.csv {
        let rows: Vec<Vec<String>> = summary
            .degree_sets
            .iter()
            .zip(&summary.misfits)
            .enumerate()
            .map(|(i, (d, m))| {
                let degrees = d.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                vec![i.to_string(), degrees, m.to_string()]
            })
            .collect();
        out.write("study.csv", |p| container::write_table_csv(&["trial", "degrees", "misfit"], &rows, p))?;
    }
    if cfg.emit.json {
        out.json("study.json", &summary)?;
    }
    let lines = vec![format!(
        "{} trials: mean = {:.6}, p90 = {:.6}, min = {:.6}, max = {:.6}",
        summary.trials, summary.mean, summary.p90, summary.min, summary.max
    )];
    let manifest = out.finish("random-study", cfg)?;
    Ok(Outcome { lines, manifest })
}

/// One randomized bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTrial {
    pub trial: usize,
    pub model: NoiseModel,
    pub level: f64,
    pub seed: u64,
    pub report: BoundReport,
}

/// Trial `i` uses the summed scheme for even `i`, the peeled one for odd `i`,
/// alternates noise models every two trials and cycles through the levels.
pub fn bound_trials(cfg: &ExperimentConfig) -> Result<Vec<BoundTrial>> {
    let b = &cfg.bounds;
    if b.levels.is_empty() || b.trials == 0 {
        return Err(Error::Config("bound verification needs levels and at least one trial".into()));
    }
    let (truth, _) = cfg.make_signal_on(&b.grid)?;
    let grid = *truth.grid();
    let families = [b.frft.build(&grid)?, b.hermite.build(&grid)?];
    let algorithms = [b.frft.algorithm(), b.hermite.algorithm()];
    let clean = [families[0].measure(&truth)?, families[1].measure(&truth)?];
    (0..b.trials)
        .into_par_iter()
        .map(|i| {
            let which = i % 2;
            let model = if (i / 2) % 2 == 0 { NoiseModel::Additive } else { NoiseModel::Multiplicative };
            let level = b.levels[(i / 4) % b.levels.len()];
            let seed = cfg.seed.wrapping_add(i as u64);
            let noisy = clean[which].with_noise(model, level, seed)?;
            let rcfg = RetrievalConfig::new(cfg.epsilon, algorithms[which]);
            let report = verify_noise_bounds(&clean[which], &noisy, &families[which], &rcfg, b.p, None)?;
            Ok(BoundTrial { trial: i, model, level, seed, report })
        })
        .collect()
}

pub fn cmd_verify_bounds(cfg: &ExperimentConfig) -> Result<Outcome> {
    let trials = bound_trials(cfg)?;
    let failed = trials.iter().filter(|t| !t.report.all_satisfied()).count();
    let mut out = ArtifactWriter::new(&cfg.outputs)?;
    if cfg.emit.csv {
        let rows: Vec<Vec<String>> = trials
            .iter()
            .map(|t| {
                let r = &t.report;
                vec![
                    t.trial.to_string(),
                    format!("{:?}", r.algorithm).to_lowercase(),
                    format!("{:?}", t.model).to_lowercase(),
                    t.level.to_string(),
                    t.seed.to_string(),
                    r.lhs_a_norm.to_string(),
                    r.rhs_bound.to_string(),
                    r.lhs_slice.to_string(),
                    r.rhs_slice_bound.to_string(),
                    r.all_satisfied().to_string(),
                ]
            })
            .collect();
        let header =
            ["trial", "algorithm", "model", "level", "seed", "lhs", "rhs", "lhs_slice", "rhs_slice", "satisfied"];
        out.write("bounds.csv", |p| container::write_table_csv(&header, &rows, p))?;
    }
    if cfg.emit.json {
        out.json("bounds.json", &json!({ "trials": trials, "failed": failed }))?;
    }
    let lines = vec![format!("{} of {} trials satisfied both bounds", trials.len() - failed, trials.len())];
    let manifest = out.finish("verify-bounds", cfg)?;
    if failed > 0 {
        return Err(Error::BoundViolated { failed, total: trials.len() });
    }
    Ok(Outcome { lines, manifest })
}

/// Angles `(j - 1) pi / 40` for `j = 1..=80`, the literal convention used for
/// the multi-modal experiments.
pub fn eighty_angles() -> Vec<f64> {
    (0..80).map(|j| j as f64 * PI / 40.0).collect()
}
