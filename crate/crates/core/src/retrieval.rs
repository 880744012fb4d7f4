//! Direct inversion: masked division of spectrogram products by window
//! ambiguities, then a one-dimensional inverse transform to the signal.

use ndarray::{Array2, Axis, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambiguity::{lattice_phase, power_to_product, AmbiguityEvaluator, AmbiguityGrid};
use crate::error::{Error, Result};
use crate::fft::{centered_along, Direction};
use crate::grid::{Grid, Signal};
use crate::metrics::BoundReport;
use crate::stft::{Measurement, MeasurementSet};
use crate::windows::{RegionMask, WindowFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// One region `{ |sum_j A g_j| > eps }` and the summed quotient.
    Alg1,
    /// Peeled disjoint regions, one quotient per window.
    Alg2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub epsilon: f64,
    pub anchor: Anchor,
    pub algorithm: Algorithm,
}

impl RetrievalConfig {
    pub fn new(epsilon: f64, algorithm: Algorithm) -> Self {
        RetrievalConfig { epsilon, anchor: Anchor::Auto, algorithm }
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon > 0.0 && self.epsilon.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("threshold must be positive, got {}", self.epsilon)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub signal: Signal,
    /// Masked estimate of `Af`.
    pub ambiguity: AmbiguityGrid,
    pub omega_area_fraction: f64,
    pub anchor_c: usize,
    /// Estimated `|f(c)|^2` at the anchor.
    pub anchor_weight: f64,
    pub diagnostics: Option<BoundReport>,
}

impl Reconstruction {
    pub fn mask(&self) -> RegionMask {
        RegionMask {
            grid: self.ambiguity.grid,
            bits: self.ambiguity.mask.clone().expect("reconstructions are always masked"),
            epsilon: f64::NAN,
        }
    }
}

fn check_inputs(set: &MeasurementSet, evaluators: usize) -> Result<Grid> {
    if set.len() != evaluators {
        return Err(Error::InvalidParameter(format!(
            "{} measurements for {} windows",
            set.len(),
            evaluators
        )));
    }
    let grid = *set.grid();
    grid.require_square("retrieval")?;
    Ok(grid)
}

/// `q / conj(d)` with `|d|` clamped from below at `eps`.
fn guarded_quotient(q: Complex64, d: Complex64, eps: f64) -> Complex64 {
    let mag = d.norm();
    if mag >= eps {
        q / d.conj()
    } else if mag == 0.0 {
        q / eps
    } else {
        q / (d.conj() * (eps / mag))
    }
}

fn summed_assembly(
    grid: Grid,
    powers: &[&Array2<f64>],
    evaluators: &[&AmbiguityEvaluator],
    eps: f64,
) -> Result<AmbiguityGrid> {
    let mut total = Array2::<f64>::zeros((grid.len(), grid.len()));
    for p in powers {
        total += *p;
    }
    let mut denom = Array2::<Complex64>::zeros((grid.len(), grid.len()));
    for e in evaluators {
        denom += &e.lattice(&grid)?;
    }
    let mask = denom.mapv(|d| d.norm() > eps);
    if !mask.iter().any(|&b| b) {
        return Err(Error::EmptyRegion);
    }
    let mut product = power_to_product(&grid, &total)?;
    Zip::from(&mut product.values).and(&denom).for_each(|q, &d| *q = guarded_quotient(*q, d, eps));
    product.masked(mask)
}

fn peeled_assembly(
    grid: Grid,
    powers: &[&Array2<f64>],
    evaluators: &[&AmbiguityEvaluator],
    eps: f64,
) -> Result<AmbiguityGrid> {
    let len = grid.len();
    let lattices = evaluators.par_iter().map(|e| e.lattice(&grid)).collect::<Result<Vec<_>>>()?;
    let mut claimed = Array2::from_elem((len, len), false);
    let mut values = Array2::<Complex64>::zeros((len, len));
    for (power, ag) in powers.iter().zip(&lattices) {
        let own = Zip::from(ag).and(&claimed).map_collect(|d, &taken| !taken && d.norm() > eps);
        if !own.iter().any(|&b| b) {
            continue;
        }
        let product = power_to_product(&grid, power)?;
        Zip::from(&mut values).and(&product.values).and(ag).and(&own).for_each(|v, &q, &d, &mine| {
            if mine {
                *v = guarded_quotient(q, d, eps);
            }
        });
        Zip::from(&mut claimed).and(&own).for_each(|c, &mine| *c |= mine);
    }
    if !claimed.iter().any(|&b| b) {
        return Err(Error::EmptyRegion);
    }
    AmbiguityGrid::new(grid, values)?.masked(claimed)
}

/// Masked estimate of `Af` from the measurements, by the configured algorithm.
pub fn assemble(set: &MeasurementSet, family: &WindowFamily, cfg: &RetrievalConfig) -> Result<AmbiguityGrid> {
    cfg.validate()?;
    let grid = check_inputs(set, family.len())?;
    grid.require_same(family.grid(), "measurements and windows live on different grids")?;
    let powers: Vec<&Array2<f64>> = set.iter().map(|m| &m.power).collect();
    let evaluators: Vec<&AmbiguityEvaluator> = family.members().iter().map(|w| &w.evaluator).collect();
    match cfg.algorithm {
        Algorithm::Alg1 => summed_assembly(grid, &powers, &evaluators, cfg.epsilon),
        Algorithm::Alg2 => peeled_assembly(grid, &powers, &evaluators, cfg.epsilon),
    }
}

/// Runs the algorithm named in `cfg`.
pub fn retrieve(set: &MeasurementSet, family: &WindowFamily, cfg: &RetrievalConfig) -> Result<Reconstruction> {
    let a = assemble(set, family, cfg)?;
    reconstruct_from_ambiguity(&a, cfg)
}

pub fn run_alg1(set: &MeasurementSet, family: &WindowFamily, cfg: &RetrievalConfig) -> Result<Reconstruction> {
    retrieve(set, family, &RetrievalConfig { algorithm: Algorithm::Alg1, ..*cfg })
}

pub fn run_alg2(set: &MeasurementSet, family: &WindowFamily, cfg: &RetrievalConfig) -> Result<Reconstruction> {
    retrieve(set, family, &RetrievalConfig { algorithm: Algorithm::Alg2, ..*cfg })
}

/// Pointwise inversion with a single window.
pub fn single_window_retrieve(
    measurement: &Measurement,
    evaluator: &AmbiguityEvaluator,
    cfg: &RetrievalConfig,
) -> Result<Reconstruction> {
    cfg.validate()?;
    let grid = measurement.grid;
    grid.require_square("retrieval")?;
    let a = summed_assembly(grid, &[&measurement.power], &[evaluator], cfg.epsilon)?;
    reconstruct_from_ambiguity(&a, cfg)
}

/// Anchor weights `w(c)`, the inverse transform of `A(0, .)` at `c`, which
/// estimate `|f(c)|^2`.
pub fn anchor_weights(a: &AmbiguityGrid) -> Result<Vec<f64>> {
    Ok(slice_transform(a)?.column(a.grid.len() / 2).iter().map(|v| v.re).collect())
}

/// `W[l, k] = sum_m dy V[m, k] e^{2 pi i t'_l y_m}` where `V = A e^{-pi i x y}`
/// is the STFT-convention lattice and `t'_l = (l - L/2) dt`.
fn slice_transform(a: &AmbiguityGrid) -> Result<Array2<Complex64>> {
    let grid = a.grid;
    grid.require_square("reconstruction")?;
    let len = grid.len();
    let mut w = a.values.clone();
    w.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(m, mut row)| {
        for (k, v) in row.iter_mut().enumerate() {
            *v *= lattice_phase(len, m, k, -1.0) * grid.dy();
        }
    });
    centered_along(&mut w, Axis(0), Direction::Inverse);
    Ok(w)
}

/// Recovers the signal up to a global phase from a masked estimate of `Af`.
///
/// With `V_f f(x, y) = e^{-pi i x y} Af(x, y)`, the inverse transform in `y`
/// at shift `x` and time `x + c` equals `f(x + c) conj(f(c))`, so every sample
/// sits on an integer lattice offset and needs no interpolation. The result
/// is normalized by `sqrt |w(c)|`.
pub fn reconstruct_from_ambiguity(a: &AmbiguityGrid, cfg: &RetrievalConfig) -> Result<Reconstruction> {
    let grid = a.grid;
    let len = grid.len();
    let half = len / 2;
    let w = slice_transform(a)?;
    let weights: Vec<f64> = w.column(half).iter().map(|v| v.re).collect();
    let energy: f64 = a.values.column(half).iter().map(|v| v.norm()).sum::<f64>() * grid.dy();
    let (anchor, peak) = match cfg.anchor {
        Anchor::Auto => weights
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (c, v)| if v > best.1 { (c, v) } else { best }),
        Anchor::Fixed(c) if c < len => (c, weights[c]),
        Anchor::Fixed(c) => {
            return Err(Error::InvalidParameter(format!("anchor index {c} outside 0..{len}")));
        }
    };
    // A fixed anchor may see a negative weight under noise; only its size matters for k.
    let size = if matches!(cfg.anchor, Anchor::Fixed(_)) { peak.abs() } else { peak };
    if !(size > 1e-10 * energy) || energy == 0.0 {
        return Err(Error::DegenerateAnchor { peak, energy });
    }
    let norm = w[[anchor, half]].norm().sqrt();
    let mut values = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..len {
        let l = (anchor + k + len - half) % len;
        values[l] = w[[l, k]] / norm;
    }
    let mask = a.mask.clone().unwrap_or_else(|| Array2::from_elem((len, len), true));
    let omega_area_fraction = mask.iter().filter(|&&b| b).count() as f64 / mask.len() as f64;
    let ambiguity = AmbiguityGrid { grid, values: a.values.clone(), mask: Some(mask) };
    Ok(Reconstruction {
        signal: Signal::new(grid, values)?,
        ambiguity,
        omega_area_fraction,
        anchor_c: anchor,
        anchor_weight: peak,
        diagnostics: None,
    })
}
