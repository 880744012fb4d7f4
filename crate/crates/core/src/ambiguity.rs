//! Ambiguity functions on the square lattice and the FFT map from spectrograms
//! to products `Af * conj(Ag)`.
//!
//! Lattice values are stored as `values[m, k]` with `x_k = -T + k dt` along
//! columns and `y_m = (m - L/2)/(L dt)` along rows, so the origin sits at
//! `(L/2, L/2)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use ndarray::{Array2, Axis, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{centered_along, Direction};
use crate::grid::{Grid, Signal};
use crate::special::{self, ComplexGridFn};
use crate::stft::{forward_stft, Measurement};

/// Complex lattice function with an optional region mask.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityGrid {
    pub grid: Grid,
    pub values: Array2<Complex64>,
    pub mask: Option<Array2<bool>>,
}

impl AmbiguityGrid {
    pub fn new(grid: Grid, values: Array2<Complex64>) -> Result<Self> {
        grid.require_square("an ambiguity lattice")?;
        if values.dim() != (grid.len(), grid.len()) {
            return Err(Error::GridMismatch(format!(
                "lattice of shape {:?} for L = {}",
                values.dim(),
                grid.len()
            )));
        }
        Ok(AmbiguityGrid { grid, values, mask: None })
    }

    /// Zeroes every value outside `mask` and records the mask.
    pub fn masked(mut self, mask: Array2<bool>) -> Result<Self> {
        if mask.dim() != self.values.dim() {
            return Err(Error::GridMismatch("mask shape differs from lattice".into()));
        }
        Zip::from(&mut self.values).and(&mask).for_each(|v, &keep| {
            if !keep {
                *v = Complex64::new(0.0, 0.0);
            }
        });
        self.mask = Some(mask);
        Ok(self)
    }

    pub fn origin(&self) -> Complex64 {
        let c = self.grid.len() / 2;
        self.values[[c, c]]
    }

    /// Lattice coordinates `(x_k, y_m)` of entry `[m, k]`.
    pub fn coords(&self, m: usize, k: usize) -> (f64, f64) {
        lattice_point(&self.grid, m, k)
    }
}

pub fn lattice_point(grid: &Grid, m: usize, k: usize) -> (f64, f64) {
    let half = (grid.len() / 2) as f64;
    (grid.time(k), (m as f64 - half) * grid.dy())
}

/// `e^{s * pi i x_k y_m}` computed from the exact integer product
/// `(k - L/2)(m - L/2) mod 2L`.
pub(crate) fn lattice_phase(len: usize, m: usize, k: usize, sign: f64) -> Complex64 {
    let l = len as i64;
    let n = ((k as i64 - l / 2) * (m as i64 - l / 2)).rem_euclid(2 * l);
    Complex64::from_polar(1.0, sign * PI * n as f64 / len as f64)
}

/// `A phi^a(x, y) = 2^{-1/2} e^{-(pi/2)(a x^2 + y^2/a)}`.
pub fn eval_gauss_ambiguity(a: f64, x: f64, y: f64) -> f64 {
    FRAC_1_SQRT_2 * (-0.5 * PI * (a * x * x + y * y / a)).exp()
}

/// Ambiguity of the fractional Fourier transform of `phi^a`: the Gauss
/// ambiguity evaluated at the rotated point.
pub fn eval_frft_gauss_ambiguity(a: f64, alpha: f64, x: f64, y: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    eval_gauss_ambiguity(a, x * c - y * s, x * s + y * c)
}

/// `A h_n(x, y) = e^{-pi r^2 / 2} L_n(pi r^2)`.
pub fn eval_hermite_ambiguity(n: usize, x: f64, y: f64) -> f64 {
    special::laguerre_function(n, PI * (x * x + y * y))
}

/// Source of ambiguity values for a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbiguityEvaluator {
    Gauss { a: f64 },
    FrftGauss { a: f64, alpha: f64 },
    Hermite { n: usize },
    #[serde(skip)]
    Numeric(Arc<AmbiguityGrid>),
}

impl AmbiguityEvaluator {
    /// Value at an arbitrary point; `None` for the lattice-only numeric kind.
    pub fn eval(&self, x: f64, y: f64) -> Option<f64> {
        match *self {
            AmbiguityEvaluator::Gauss { a } => Some(eval_gauss_ambiguity(a, x, y)),
            AmbiguityEvaluator::FrftGauss { a, alpha } => Some(eval_frft_gauss_ambiguity(a, alpha, x, y)),
            AmbiguityEvaluator::Hermite { n } => Some(eval_hermite_ambiguity(n, x, y)),
            AmbiguityEvaluator::Numeric(_) => None,
        }
    }

    /// Values on the square lattice of `grid`.
    pub fn lattice(&self, grid: &Grid) -> Result<Array2<Complex64>> {
        grid.require_square("evaluating an ambiguity lattice")?;
        if let AmbiguityEvaluator::Numeric(table) = self {
            grid.require_same(&table.grid, "numeric ambiguity table has a different grid")?;
            return Ok(table.values.clone());
        }
        let len = grid.len();
        let mut out = Array2::<Complex64>::zeros((len, len));
        out.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(m, mut row)| {
            for (k, v) in row.iter_mut().enumerate() {
                let (x, y) = lattice_point(grid, m, k);
                *v = Complex64::new(self.eval(x, y).expect("closed form"), 0.0);
            }
        });
        Ok(out)
    }

    pub fn describe(&self) -> String {
        match self {
            AmbiguityEvaluator::Gauss { a } => format!("gauss(a={a})"),
            AmbiguityEvaluator::FrftGauss { a, alpha } => format!("frft_gauss(a={a},alpha={alpha})"),
            AmbiguityEvaluator::Hermite { n } => format!("hermite(n={n})"),
            AmbiguityEvaluator::Numeric(_) => "numeric".to_string(),
        }
    }
}

/// Ambiguity of sampled `g` on the lattice: `V_g g` times `e^{pi i x y}`.
///
/// With `apply_phase = false` the raw `V_g g` is returned instead.
pub fn numeric_ambiguity(g: &ComplexGridFn, apply_phase: bool) -> Result<AmbiguityGrid> {
    let grid = *g.grid();
    grid.require_square("numeric ambiguity")?;
    let signal = Signal::new(grid, g.values().to_vec())?;
    let mut values = forward_stft(&signal, g, "self")?.values;
    if apply_phase {
        let len = grid.len();
        values.indexed_iter_mut().for_each(|((m, k), v)| *v *= lattice_phase(len, m, k, 1.0));
    }
    AmbiguityGrid::new(grid, values)
}

/// Lattice approximation of `Af * conj(Ag)` from `|V_g f|^2`.
///
/// `G[m', k'] = (1/L) sum_{m,k} P[m,k] e^{-2 pi i (k-L/2)(m'-L/2)/L}
/// e^{+2 pi i (m-L/2)(k'-L/2)/L}`, i.e. the 2D Fourier transform of the
/// spectrogram with the `(u, v) -> (v, -u)` swap folded into the index roles.
pub fn spectrogram_to_product(mea: &Measurement) -> Result<AmbiguityGrid> {
    power_to_product(&mea.grid, &mea.power)
}

pub(crate) fn power_to_product(grid: &Grid, power: &Array2<f64>) -> Result<AmbiguityGrid> {
    grid.require_square("spectrogram_to_product")?;
    let len = grid.len();
    if power.dim() != (len, len) {
        return Err(Error::GridMismatch("power matrix shape differs from grid".into()));
    }
    let mut q = power.mapv(|p| Complex64::new(p, 0.0));
    // Along k: output index m' replaces k in each row.
    centered_along(&mut q, Axis(1), Direction::Forward);
    // Along m: output index k' replaces m in each column.
    centered_along(&mut q, Axis(0), Direction::Inverse);
    let scale = 1.0 / len as f64;
    let values = Array2::from_shape_fn((len, len), |(m, k)| q[[k, m]] * scale);
    AmbiguityGrid::new(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::dilated_gauss_samples;
    use crate::stft::to_measurement;

    #[test]
    fn gauss_closed_form_values() {
        assert!((eval_gauss_ambiguity(1.0, 0.0, 0.0) - FRAC_1_SQRT_2).abs() < 1e-16);
        for &(x, y) in &[(0.3, -1.1), (2.0, 0.5)] {
            assert!((eval_gauss_ambiguity(2.0, x, y) - eval_gauss_ambiguity(0.5, y, x)).abs() < 1e-16);
            assert_eq!(eval_frft_gauss_ambiguity(3.0, 0.0, x, y), eval_gauss_ambiguity(3.0, x, y));
            let q = eval_frft_gauss_ambiguity(3.0, PI / 2.0, x, y);
            assert!((q - eval_gauss_ambiguity(3.0, -y, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn hermite_ambiguity_is_one_at_origin() {
        for n in [0, 1, 7, 50, 100] {
            assert!((eval_hermite_ambiguity(n, 0.0, 0.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lattice_origin_is_centered() {
        let grid = Grid::square(8.0, 64).unwrap();
        assert_eq!(lattice_point(&grid, 32, 32), (0.0, 0.0));
        assert_eq!(lattice_phase(64, 32, 5, 1.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn product_of_gauss_matches_closed_form() {
        let grid = Grid::square(8.0, 256).unwrap();
        let g = dilated_gauss_samples(1.0, &grid).unwrap().to_complex();
        let f = Signal::new(grid, g.values().to_vec()).unwrap();
        let prod = spectrogram_to_product(&to_measurement(&forward_stft(&f, &g, "g").unwrap())).unwrap();
        for ((m, k), v) in prod.values.indexed_iter() {
            let (x, y) = lattice_point(&grid, m, k);
            assert!((v - 0.5 * (-PI * (x * x + y * y)).exp()).norm() < 1e-6);
        }
    }

    #[test]
    fn masking_zeroes_outside() {
        let grid = Grid::square(1.0, 4).unwrap();
        let a = AmbiguityGrid::new(grid, Array2::from_elem((4, 4), Complex64::new(1.0, 1.0))).unwrap();
        let mut mask = Array2::from_elem((4, 4), false);
        mask[[2, 2]] = true;
        let a = a.masked(mask).unwrap();
        assert_eq!(a.values.iter().filter(|v| v.norm() > 0.0).count(), 1);
        assert_eq!(a.origin(), Complex64::new(1.0, 1.0));
    }
}
