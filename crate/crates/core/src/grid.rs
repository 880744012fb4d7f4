//! Uniform time/frequency lattice, sampled signals and synthetic test signals.
//!
//! Time samples sit at `t_l = -T + l*dt` for `l = 0..L` with `dt = 2T/L`.
//! STFT shifts use every `hop`-th sample and the frequency axis is sampled at
//! `y_m = (1/dt)(-1/2 + m/M)`. Retrieval always runs with `hop = 1` and
//! `M = L`, where the ambiguity lattice is `x_k = -T + k*dt` and
//! `y_m = (m - L/2) / (L*dt)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    len: usize,
    dt: f64,
    hop: usize,
    bins: usize,
}

impl Grid {
    pub fn new(half_width: f64, len: usize, hop: usize, bins: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width must be positive, got {half_width}")));
        }
        if len == 0 || len % 2 != 0 {
            return Err(Error::InvalidGrid(format!("sample count must be even and positive, got {len}")));
        }
        if hop == 0 || len % hop != 0 {
            return Err(Error::InvalidGrid(format!("hop {hop} does not divide {len}")));
        }
        if bins == 0 {
            return Err(Error::InvalidGrid("frequency bin count must be positive".into()));
        }
        Ok(Grid { half_width, len, dt: 2.0 * half_width / len as f64, hop, bins })
    }

    /// Square lattice (`hop = 1`, `M = L`) used by every retrieval pipeline.
    pub fn square(half_width: f64, len: usize) -> Result<Self> {
        Self::new(half_width, len, 1, len)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Number of STFT shifts, `L / hop`.
    pub fn shifts(&self) -> usize {
        self.len / self.hop
    }

    pub fn is_square(&self) -> bool {
        self.hop == 1 && self.bins == self.len
    }

    pub fn time(&self, l: usize) -> f64 {
        -self.half_width + l as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|l| self.time(l)).collect()
    }

    /// Position of the `k`-th STFT shift.
    pub fn shift(&self, k: usize) -> f64 {
        -self.half_width + (k * self.hop) as f64 * self.dt
    }

    pub fn freq(&self, m: usize) -> f64 {
        (-0.5 + m as f64 / self.bins as f64) / self.dt
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.bins).map(|m| self.freq(m)).collect()
    }

    /// Frequency step `1/(M dt)`.
    pub fn dy(&self) -> f64 {
        1.0 / (self.bins as f64 * self.dt)
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    pub(crate) fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!(
                "{what} needs hop = 1 and M = L (got hop {}, M {}, L {})",
                self.hop, self.bins, self.len
            )))
        }
    }

    pub(crate) fn require_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(what.to_string()))
        }
    }
}

/// Complex samples `f_l = f(t_l)` bound to a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "signal has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Signal { grid, values })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Signal { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Same samples interpreted on another grid with the same length.
    pub fn with_grid(self, grid: Grid) -> Result<Self> {
        Self::new(grid, self.values)
    }

    /// Discrete L2 norm `sqrt(dt * sum |f_l|^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.dt() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Signal { grid: self.grid, values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn add(&self, other: &Signal) -> Result<Self> {
        self.grid.require_same(&other.grid, "signals live on different grids")?;
        Ok(Signal {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Real linear chirp `A e^{-pi (t/w)^2} cos(2 pi (nu0 t + beta t^2 / 2) + phase)`.
///
/// The instantaneous frequency moves linearly from `start_freq` at `t = -w` to
/// `end_freq` at `t = +w`, where `w` is the envelope width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChirpSpec {
    pub amplitude: f64,
    pub envelope_width: f64,
    pub start_freq: f64,
    pub end_freq: f64,
    pub phase: f64,
}

impl Default for ChirpSpec {
    fn default() -> Self {
        Self::preset()
    }
}

impl ChirpSpec {
    /// Preset used by the chirp experiments.
    pub fn preset() -> Self {
        ChirpSpec {
            amplitude: 1.0,
            envelope_width: 2.5,
            start_freq: 1.25,
            end_freq: 2.75,
            phase: PI / 4.0,
        }
    }

    fn center_freq(&self) -> f64 {
        0.5 * (self.start_freq + self.end_freq)
    }

    fn sweep_rate(&self) -> f64 {
        (self.end_freq - self.start_freq) / (2.0 * self.envelope_width)
    }

    fn instantaneous_freq(&self, t: f64) -> f64 {
        self.center_freq() + self.sweep_rate() * t
    }
}

pub fn gen_chirp(spec: &ChirpSpec, grid: &Grid) -> Result<Signal> {
    if !(spec.envelope_width > 0.0) {
        return Err(Error::InvalidParameter("chirp envelope width must be positive".into()));
    }
    let nyq = grid.nyquist();
    let edge = spec
        .instantaneous_freq(-grid.half_width())
        .abs()
        .max(spec.instantaneous_freq(grid.half_width()).abs());
    if edge >= nyq {
        return Err(Error::InvalidParameter(format!(
            "chirp reaches {edge} cycles per unit, Nyquist is {nyq}"
        )));
    }
    let (nu0, beta) = (spec.center_freq(), spec.sweep_rate());
    let values = grid
        .times()
        .into_iter()
        .map(|t| {
            let env = (-PI * (t / spec.envelope_width).powi(2)).exp();
            let phase = 2.0 * PI * (nu0 * t + 0.5 * beta * t * t) + spec.phase;
            Complex64::new(spec.amplitude * env * phase.cos(), 0.0)
        })
        .collect();
    Signal::new(*grid, values)
}

/// One term `w * phi^4(t - shift)` of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub shift: f64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub terms: Vec<MixtureTerm>,
}

impl MixtureSpec {
    /// Dilation of the mixture bumps.
    pub const DILATION: f64 = 4.0;

    /// Three well separated bumps used by the multi-modal experiments.
    pub fn preset() -> Self {
        let term = |shift, w| MixtureTerm { shift, weight: Complex64::new(w, 0.0) };
        MixtureSpec { terms: vec![term(-1.0, 1.0), term(0.0, -0.7), term(1.2, 0.8)] }
    }

    pub fn union(&self, other: &MixtureSpec) -> MixtureSpec {
        MixtureSpec { terms: self.terms.iter().chain(&other.terms).copied().collect() }
    }
}

pub fn gen_mixture(spec: &MixtureSpec, grid: &Grid) -> Result<Signal> {
    let t_max = grid.half_width();
    if let Some(bad) = spec.terms.iter().find(|term| !(term.shift.abs() < t_max)) {
        return Err(Error::InvalidParameter(format!(
            "mixture shift {} outside (-{t_max}, {t_max})",
            bad.shift
        )));
    }
    let a = MixtureSpec::DILATION;
    let norm = a.powf(0.25);
    let values = grid
        .times()
        .into_iter()
        .map(|t| {
            spec.terms
                .iter()
                .map(|term| term.weight * (norm * (-a * PI * (t - term.shift).powi(2)).exp()))
                .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
        })
        .collect();
    Signal::new(*grid, values)
}

/// Standard Gauss `phi^1` as a signal, handy for self-consistency checks.
pub fn gauss_signal(grid: &Grid) -> Signal {
    let samples = special::dilated_gauss_samples(1.0, grid).expect("a = 1 is valid");
    Signal::from_real(*grid, samples.values()).expect("lengths match")
}
