//! Laguerre recurrences, Hermite functions and fractional Fourier transforms of
//! the dilated Gaussian, sampled on a grid.

use stft_phase::prelude::*;
use stft_phase::special::{hermite_value, laguerre_function, ChirpedGauss};

fn main() -> stft_phase::Result<()> {
    for n in [0, 5, 10, 50] {
        println!("L_{n}(2.5) = {:+.6e}   e^(-z/2) L_{n}(2.5) = {:+.6e}", laguerre_eval(n, 2.5), laguerre_function(n, 2.5));
    }

    let grid = Grid::square(8.0, 1024)?;
    for n in [0, 1, 10, 100, 400] {
        let h = hermite_samples(n, &grid)?;
        let norm = (grid.dt() * h.values().iter().map(|v| v * v).sum::<f64>()).sqrt();
        println!("h_{n:<3}  ||h|| = {norm:.12}   h(0.3) = {:+.6}", hermite_value(n, 0.3).unwrap_or(f64::NAN));
    }

    for alpha in [0.0, 0.4, std::f64::consts::FRAC_PI_2] {
        let g = ChirpedGauss::of_frft(15.0, alpha)?;
        let s = frft_gauss_samples(15.0, alpha, &grid)?;
        let norm = (grid.dt() * s.values().iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
        println!("F_{alpha:.3} phi^15: u = {:.5}, v = {:+.5}, ||g|| = {norm:.12}", g.u, g.v);
    }
    Ok(())
}
