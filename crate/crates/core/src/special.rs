//! Special-function kernels: Laguerre polynomials, Hermite functions, dilated
//! Gaussians and the fractional Fourier transform of a dilated Gaussian.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

const RESCALE_ABOVE: f64 = 1.0e150;

/// Real samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGridFn {
    grid: Grid,
    values: Vec<f64>,
}

impl RealGridFn {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for a grid of {}", values.len(), grid.len())));
        }
        if let Some(l) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Malformed(format!("non-finite sample at index {l}")));
        }
        Ok(RealGridFn { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_complex(&self) -> ComplexGridFn {
        ComplexGridFn {
            grid: self.grid,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Complex samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGridFn {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexGridFn {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for a grid of {}", values.len(), grid.len())));
        }
        if let Some(l) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Malformed(format!("non-finite sample at index {l}")));
        }
        Ok(ComplexGridFn { grid, values })
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
}

/// Laguerre polynomial `L_n(z)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-z) L_k - k L_{k-1}`.
pub fn laguerre_eval(n: usize, z: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - z) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre function `e^{-z/2} L_n(z)`, rescaled during the recurrence so the
/// polynomial never overflows before the exponential damping is applied.
pub fn laguerre_function(n: usize, z: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut log_scale = -0.5 * z;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - z) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
    }
    if cur == 0.0 {
        0.0
    } else {
        cur.signum() * (cur.abs().ln() + log_scale).exp()
    }
}

/// `h_n(t)` for the `e^{-pi t^2}` convention, unit L2 norm and positive leading
/// coefficient.
///
/// Uses `h_n(t) = (2 pi)^{1/4} psi_n(sqrt(2 pi) t)` where `psi_n` are the
/// orthonormal Hermite functions of the `e^{-s^2/2}` convention. The Gaussian
/// factor is carried in log form so large `|t|` neither underflows nor
/// overflows.
pub fn hermite_value(n: usize, t: f64) -> Option<f64> {
    let s = (2.0 * PI).sqrt() * t;
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut log_scale = -0.5 * s * s - 0.25 * PI.ln() + 0.25 * (2.0 * PI).ln();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * s * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return None;
        }
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
    }
    let v = if cur == 0.0 { 0.0 } else { cur.signum() * (cur.abs().ln() + log_scale).exp() };
    v.is_finite().then_some(v)
}

pub fn hermite_samples(n: usize, grid: &Grid) -> Result<RealGridFn> {
    let values = grid
        .times()
        .into_iter()
        .map(|t| hermite_value(n, t).ok_or(Error::HermiteOverflow { degree: n }))
        .collect::<Result<Vec<_>>>()?;
    RealGridFn::new(*grid, values)
}

fn check_dilation(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dilation must be positive, got {a}")))
    }
}

/// `phi^a(t) = a^{1/4} e^{-a pi t^2}`.
pub fn dilated_gauss(a: f64, t: f64) -> f64 {
    a.powf(0.25) * (-a * PI * t * t).exp()
}

pub fn dilated_gauss_samples(a: f64, grid: &Grid) -> Result<RealGridFn> {
    check_dilation(a)?;
    RealGridFn::new(*grid, grid.times().into_iter().map(|t| dilated_gauss(a, t)).collect())
}

/// Chirped Gaussian `prefactor * e^{-pi (u + i v) t^2}` equal to the fractional
/// Fourier transform of `phi^a` at angle `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpedGauss {
    pub prefactor: Complex64,
    pub u: f64,
    pub v: f64,
}

impl ChirpedGauss {
    pub fn of_frft(a: f64, alpha: f64) -> Result<Self> {
        check_dilation(a)?;
        let (s, c) = alpha.sin_cos();
        if s.abs() < 1e-8 {
            // The kernel degenerates to the identity or the parity map, and phi^a is even.
            return Ok(ChirpedGauss { prefactor: Complex64::new(a.powf(0.25), 0.0), u: a, v: 0.0 });
        }
        let den = a * a * s * s + c * c;
        let u = a / den;
        let v = s * c * (1.0 - a * a) / den;
        let ratio = Complex64::from_polar(1.0, alpha) / Complex64::new(c, a * s);
        Ok(ChirpedGauss { prefactor: a.powf(0.25) * ratio.sqrt(), u, v })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.prefactor * Complex64::new(-PI * self.u * t * t, -PI * self.v * t * t).exp()
    }
}

/// Samples of the fractional Fourier transform of `phi^a` at angle `alpha`.
pub fn frft_gauss_samples(a: f64, alpha: f64, grid: &Grid) -> Result<ComplexGridFn> {
    let g = ChirpedGauss::of_frft(a, alpha)?;
    ComplexGridFn::new(*grid, grid.times().into_iter().map(|t| g.eval(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t: f64, l: usize) -> Grid {
        Grid::square(t, l).unwrap()
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre_eval(0, 7.3), 1.0);
        assert_eq!(laguerre_eval(1, 2.0), -1.0);
        let z = 1.7;
        assert!((laguerre_eval(2, z) - (z * z - 4.0 * z + 2.0) / 2.0).abs() < 1e-14);
        for n in 0..20 {
            assert_eq!(laguerre_eval(n, 0.0), 1.0);
        }
    }

    #[test]
    fn laguerre_function_agrees_with_plain_product() {
        for &(n, z) in &[(0, 3.0), (5, 2.5), (40, 17.0), (100, 60.0)] {
            let direct = (-0.5 * z as f64).exp() * laguerre_eval(n, z);
            let scaled = laguerre_function(n, z);
            assert!((direct - scaled).abs() <= 1e-12 * direct.abs().max(1e-300), "{n} {z}");
        }
        assert!(laguerre_function(200, 1000.0).is_finite());
    }

    #[test]
    fn hermite_ground_state() {
        let g = grid(8.0, 256);
        let h = hermite_samples(0, &g).unwrap();
        for (t, v) in g.times().into_iter().zip(h.values()) {
            assert!((v - 2f64.powf(0.25) * (-PI * t * t).exp()).abs() < 1e-15);
        }
        assert_eq!(hermite_value(1, 0.0), Some(0.0));
    }

    #[test]
    fn hermite_one_has_positive_leading_coefficient() {
        // h_1(t) = 2^{5/4} sqrt(pi) t e^{-pi t^2}
        for &t in &[-0.7, 0.2, 1.3] {
            let expect = 2f64.powf(1.25) * PI.sqrt() * t * (-PI * t * t).exp();
            assert!((hermite_value(1, t).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_large_argument_stays_finite() {
        let g = grid(40.0, 2048);
        let h = hermite_samples(200, &g).unwrap();
        assert!(h.values().iter().all(|v| v.is_finite() && v.abs() < 2.0));
    }

    #[test]
    fn gauss_values() {
        assert_eq!(dilated_gauss(1.0, 0.0), 1.0);
        assert_eq!(dilated_gauss(16.0, 0.0), 2.0);
        assert!(dilated_gauss_samples(0.0, &grid(1.0, 8)).is_err());
        assert!(frft_gauss_samples(-1.0, 0.3, &grid(1.0, 8)).is_err());
    }

    #[test]
    fn frft_special_angles() {
        let g = grid(8.0, 256);
        let phi2 = dilated_gauss_samples(2.0, &g).unwrap();
        let at0 = frft_gauss_samples(2.0, 0.0, &g).unwrap();
        for (a, b) in at0.values().iter().zip(phi2.values()) {
            assert_eq!(a.re, *b);
            assert_eq!(a.im, 0.0);
        }
        let phi1 = dilated_gauss_samples(1.0, &g).unwrap();
        let quarter = frft_gauss_samples(1.0, PI / 2.0, &g).unwrap();
        for (a, b) in quarter.values().iter().zip(phi1.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn frft_of_dilation_is_inverse_dilation_at_quarter_turn() {
        // The Fourier transform of phi^a is phi^{1/a}.
        let g = grid(8.0, 256);
        let fa = frft_gauss_samples(4.0, PI / 2.0, &g).unwrap();
        let inv = dilated_gauss_samples(0.25, &g).unwrap();
        for (a, b) in fa.values().iter().zip(inv.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn frft_is_pi_periodic_for_even_input() {
        let g = grid(8.0, 128);
        let a = frft_gauss_samples(3.0, 0.4, &g).unwrap();
        let b = frft_gauss_samples(3.0, 0.4 + PI, &g).unwrap();
        let n = g.len();
        for l in 1..n {
            assert!((a.values()[l] - b.values()[n - l]).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_fn_rejects_wrong_length_and_nan() {
        let g = grid(1.0, 4);
        assert!(RealGridFn::new(g, vec![0.0; 3]).is_err());
        assert!(RealGridFn::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
