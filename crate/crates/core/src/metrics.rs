//! Phase-blind misfit, mixed lattice norms and noise-propagation bounds.

use std::f64::consts::PI;

use ndarray::{Array2, Axis, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambiguity::{numeric_ambiguity, AmbiguityGrid};
use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};
use crate::retrieval::{assemble, reconstruct_from_ambiguity, Algorithm, Anchor, RetrievalConfig};
use crate::special::ComplexGridFn;
use crate::stft::MeasurementSet;
use crate::windows::WindowFamily;

/// `d = min_theta ||f1 - e^{i theta} f2|| / ||f1||` and the minimizing angle in
/// `[0, 2 pi)`.
pub fn misfit(f1: &Signal, f2: &Signal) -> Result<(f64, f64)> {
    f1.grid().require_same(f2.grid(), "misfit between signals on different grids")?;
    let reference: f64 = f1.values().iter().map(|v| v.norm_sqr()).sum();
    if reference == 0.0 {
        return Err(Error::InvalidParameter("misfit needs a non-zero reference signal".into()));
    }
    let inner: Complex64 = f1.values().iter().zip(f2.values()).map(|(a, b)| a * b.conj()).sum();
    let theta = if inner.norm() == 0.0 { 0.0 } else { inner.arg().rem_euclid(2.0 * PI) };
    let rot = Complex64::from_polar(1.0, theta);
    let residual: f64 = f1.values().iter().zip(f2.values()).map(|(a, b)| (a - rot * b).norm_sqr()).sum();
    Ok(((residual / reference).sqrt(), theta))
}

/// Discrete `L^{p,1}` norm: outer sum over `y` with weight `dy`, inner
/// `L^p` over `x` with weight `dt`.
pub fn mixed_norm(g: &AmbiguityGrid, p: f64) -> Result<f64> {
    mixed_norm_of(&g.grid, &g.values.mapv(|v| v.norm()), p)
}

pub(crate) fn mixed_norm_of(grid: &Grid, magnitudes: &Array2<f64>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("mixed norm needs p >= 1, got {p}")));
    }
    let dt = grid.dt();
    let dy = grid.dy();
    let total = magnitudes
        .axis_iter(Axis(0))
        .map(|row| {
            if p.is_infinite() {
                row.iter().copied().fold(0.0, f64::max)
            } else {
                (dt * row.iter().map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
            }
        })
        .sum::<f64>();
    Ok(total * dy)
}

/// Terms of the total-error decomposition that need the true signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalErrorTerms {
    /// `||Af||_{L^{p,1}}` over the complement of the region.
    pub approx_term: f64,
    /// `||Af(0, .)||_{L^1}` over the complement of the region slice.
    pub slice_approx_term: f64,
    pub k_clean: f64,
    pub k_noisy: f64,
    /// `|f(c)|` at the shared anchor.
    pub k_true: f64,
    pub anchor_c: usize,
    pub misfit_clean: f64,
    pub misfit_noisy: f64,
}

/// Both sides of the noise-propagation inequalities
/// `||A - A^eta||_{L^{p,1}} <= C_p ||eta|| / eps` and
/// `||A(0,.) - A^eta(0,.)||_{L^1} <= |slice of region| ||eta|| / eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub p: f64,
    /// `||1_Omega||_{L^{p,1}}`.
    pub c_p: f64,
    /// Measure of `{x : (x, 0) in Omega}`.
    pub c_r_omega: f64,
    /// Measure of `{y : (0, y) in Omega}`, the slice the second bound integrates over.
    pub slice_measure: f64,
    pub lhs_a_norm: f64,
    pub rhs_bound: f64,
    pub lhs_slice: f64,
    pub rhs_slice_bound: f64,
    /// `||sum_j eta_j||_{L^1}` for the summed scheme, `max_j ||eta_j||_{L^1}` for the peeled one.
    pub noise_norm: f64,
    pub satisfied: (bool, bool),
    pub total: Option<TotalErrorTerms>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.satisfied.0 && self.satisfied.1
    }
}

fn noise_norm(clean: &MeasurementSet, noisy: &MeasurementSet, algorithm: Algorithm) -> f64 {
    let grid = clean.grid();
    let cell = grid.dt() * grid.hop() as f64 * grid.dy();
    let diffs = clean.iter().zip(noisy).map(|(c, n)| &n.power - &c.power);
    match algorithm {
        Algorithm::Alg1 => {
            let total = diffs.reduce(|acc, d| acc + d).expect("non-empty set");
            cell * total.iter().map(|v| v.abs()).sum::<f64>()
        }
        Algorithm::Alg2 => diffs.map(|d| cell * d.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max),
    }
}

pub fn verify_noise_bounds(
    clean: &MeasurementSet,
    noisy: &MeasurementSet,
    family: &WindowFamily,
    cfg: &RetrievalConfig,
    p: f64,
    truth: Option<&Signal>,
) -> Result<BoundReport> {
    if clean.len() != noisy.len() {
        return Err(Error::GridMismatch(format!("{} clean vs {} noisy measurements", clean.len(), noisy.len())));
    }
    clean.grid().require_same(noisy.grid(), "clean and noisy measurements live on different grids")?;
    if clean.iter().zip(noisy).any(|(c, n)| c.power.dim() != n.power.dim()) {
        return Err(Error::GridMismatch("clean and noisy power matrices differ in shape".into()));
    }
    let a = assemble(clean, family, cfg)?;
    let a_eta = assemble(noisy, family, cfg)?;
    let grid = a.grid;
    let half = grid.len() / 2;
    let mask = a.mask.clone().expect("assembled grids are masked");

    let diff = Zip::from(&a.values).and(&a_eta.values).map_collect(|x, y| (x - y).norm());
    let indicator = mask.mapv(|b| if b { 1.0 } else { 0.0 });
    let c_p = mixed_norm_of(&grid, &indicator, p)?;
    let lhs_a_norm = mixed_norm_of(&grid, &diff, p)?;
    let lhs_slice = diff.column(half).sum() * grid.dy();
    let c_r_omega = mask.row(half).iter().filter(|&&b| b).count() as f64 * grid.dt();
    let slice_measure = mask.column(half).iter().filter(|&&b| b).count() as f64 * grid.dy();

    let eta = noise_norm(clean, noisy, cfg.algorithm);
    let rhs_bound = c_p * eta / cfg.epsilon;
    let rhs_slice_bound = slice_measure * eta / cfg.epsilon;

    let total = match truth {
        Some(f) => Some(total_terms(f, &a, &a_eta, &mask, cfg, p)?),
        None => None,
    };
    Ok(BoundReport {
        algorithm: cfg.algorithm,
        epsilon: cfg.epsilon,
        p,
        c_p,
        c_r_omega,
        slice_measure,
        lhs_a_norm,
        rhs_bound,
        lhs_slice,
        rhs_slice_bound,
        noise_norm: eta,
        satisfied: (lhs_a_norm <= rhs_bound, lhs_slice <= rhs_slice_bound),
        total,
    })
}

fn total_terms(
    f: &Signal,
    a: &AmbiguityGrid,
    a_eta: &AmbiguityGrid,
    mask: &Array2<bool>,
    cfg: &RetrievalConfig,
    p: f64,
) -> Result<TotalErrorTerms> {
    let grid = a.grid;
    f.grid().require_same(&grid, "true signal lives on a different grid")?;
    let half = grid.len() / 2;
    let af = numeric_ambiguity(&ComplexGridFn::new(grid, f.values().to_vec())?, true)?;
    let outside = Zip::from(&af.values).and(mask).map_collect(|v, &inside| if inside { 0.0 } else { v.norm() });
    let approx_term = mixed_norm_of(&grid, &outside, p)?;
    let slice_approx_term = outside.column(half).sum() * grid.dy();

    let clean = reconstruct_from_ambiguity(a, cfg)?;
    let shared = RetrievalConfig { anchor: Anchor::Fixed(clean.anchor_c), ..*cfg };
    let noisy = reconstruct_from_ambiguity(a_eta, &shared)?;
    Ok(TotalErrorTerms {
        approx_term,
        slice_approx_term,
        k_clean: clean.anchor_weight.abs().sqrt(),
        k_noisy: noisy.anchor_weight.abs().sqrt(),
        k_true: f.values()[clean.anchor_c].norm(),
        anchor_c: clean.anchor_c,
        misfit_clean: misfit(f, &clean.signal)?.0,
        misfit_noisy: misfit(f, &noisy.signal)?.0,
    })
}
