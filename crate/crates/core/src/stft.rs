//! Discrete STFT by the left Riemann sum, spectrogram measurements and noise.

use std::f64::consts::PI;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};
use crate::special::ComplexGridFn;

/// Name of the generator behind every noise draw.
pub const RNG_ALGORITHM: &str = "ChaCha20";

/// STFT coefficients `c[m, k]`, rows indexed by frequency bin `m < M`,
/// columns by shift `k < K`.
#[derive(Debug, Clone, PartialEq)]
pub struct StftCoeffs {
    pub grid: Grid,
    pub window_id: String,
    pub values: Array2<Complex64>,
}

/// `c[m, k] = dt * sum_l f_l conj(g[(l - k*hop + L/2) mod L]) e^{-2 pi i t_l y_m}`.
///
/// The window is used cyclically, i.e. periodized over the grid.
pub fn forward_stft(f: &Signal, g: &ComplexGridFn, window_id: &str) -> Result<StftCoeffs> {
    let grid = *f.grid();
    grid.require_same(g.grid(), "signal and window are sampled on different grids")?;
    let (len, bins, hop) = (grid.len(), grid.bins(), grid.hop());
    let fv = f.values();
    let gv = g.values();
    let fft = FftPlanner::new().plan_fft_forward(bins);
    // t_l y_m = (l - L/2)(m - M/2)/M: fold (-1)^{l - L/2} h_l into l mod M, then
    // undo the m-independent offset with e^{i pi L m / M}.
    let post: Vec<Complex64> = (0..bins)
        .map(|m| Complex64::from_polar(grid.dt(), PI * ((len * m) % (2 * bins)) as f64 / bins as f64))
        .collect();
    let parity = |l: usize| if (l + len / 2) % 2 == 0 { 1.0 } else { -1.0 };

    let mut values = Array2::<Complex64>::zeros((bins, grid.shifts()));
    values.axis_iter_mut(Axis(1)).into_par_iter().enumerate().for_each_init(
        || vec![Complex64::new(0.0, 0.0); bins],
        |buf, (k, mut col)| {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            let offset = len + len / 2 - k * hop;
            for l in 0..len {
                buf[l % bins] += fv[l] * gv[(l + offset) % len].conj() * parity(l);
            }
            fft.process(buf);
            for ((c, b), p) in col.iter_mut().zip(buf.iter()).zip(&post) {
                *c = b * p;
            }
        },
    );
    Ok(StftCoeffs { grid, window_id: window_id.to_string(), values })
}

impl StftCoeffs {
    /// Quadrature-weighted energy `dt * dy * hop * dt * sum |c|^2`, which matches
    /// `||f||^2 ||g||^2` for well localized signals.
    pub fn weighted_energy(&self) -> f64 {
        let g = &self.grid;
        g.dy() * g.hop() as f64 * g.dt() * self.values.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// `power + N(0, level^2)`.
    Additive,
    /// `(|V| * N(1, level^2))^2`.
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseMeta {
    pub model: NoiseModel,
    pub level: f64,
    pub seed: u64,
    pub stream: u64,
}

/// Squared STFT magnitudes `|V_g f|^2` for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub grid: Grid,
    pub window_id: String,
    pub power: Array2<f64>,
    pub noise: Option<NoiseMeta>,
}

pub fn to_measurement(c: &StftCoeffs) -> Measurement {
    Measurement {
        grid: c.grid,
        window_id: c.window_id.clone(),
        power: c.values.mapv(|v| v.norm_sqr()),
        noise: None,
    }
}

/// Adds noise drawn from stream 0 of a ChaCha20 generator seeded with `seed`.
pub fn add_noise(mea: &Measurement, model: NoiseModel, level: f64, seed: u64) -> Result<Measurement> {
    add_noise_stream(mea, model, level, seed, 0)
}

pub fn add_noise_stream(
    mea: &Measurement,
    model: NoiseModel,
    level: f64,
    seed: u64,
    stream: u64,
) -> Result<Measurement> {
    if !(level.is_finite() && level >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise level must be non-negative, got {level}")));
    }
    if level == 0.0 {
        return Ok(mea.clone());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut power = mea.power.clone();
    match model {
        NoiseModel::Additive => {
            let dist = Normal::new(0.0, level).expect("level is finite and positive");
            power.iter_mut().for_each(|p| *p += dist.sample(&mut rng));
        }
        NoiseModel::Multiplicative => {
            let dist = Normal::new(1.0, level).expect("level is finite and positive");
            power.iter_mut().for_each(|p| *p = (p.max(0.0).sqrt() * dist.sample(&mut rng)).powi(2));
        }
    }
    Ok(Measurement {
        grid: mea.grid,
        window_id: mea.window_id.clone(),
        power,
        noise: Some(NoiseMeta { model, level, seed, stream }),
    })
}

/// One measurement per window of a family, all on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    members: Vec<Measurement>,
}

impl MeasurementSet {
    pub fn new(members: Vec<Measurement>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidParameter("empty measurement set".into()))?;
        for m in &members[1..] {
            first.grid.require_same(&m.grid, "measurements live on different grids")?;
        }
        Ok(MeasurementSet { members })
    }

    pub fn grid(&self) -> &Grid {
        &self.members[0].grid
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Measurement] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Measurement> {
        self.members.iter()
    }

    /// Noise for member `j` comes from stream `j` of the seeded generator.
    pub fn with_noise(&self, model: NoiseModel, level: f64, seed: u64) -> Result<Self> {
        let members = self
            .members
            .par_iter()
            .enumerate()
            .map(|(j, m)| add_noise_stream(m, model, level, seed, j as u64))
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasurementSet { members })
    }
}

impl<'a> IntoIterator for &'a MeasurementSet {
    type Item = &'a Measurement;
    type IntoIter = std::slice::Iter<'a, Measurement>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
