//! Centered DFTs: `X_m = sum_l x_l e^{∓2 pi i (l - N/2)(m - N/2) / N}`.
//!
//! The centering is applied by explicit modulation around a plain FFT so the
//! lattice origin always sits at index `N/2`.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Planned centered DFT of even length `N`. Unnormalized in both directions.
#[derive(Clone)]
pub struct CenteredDft {
    fft: Arc<dyn Fft<f64>>,
    len: usize,
    post_sign: f64,
}

impl CenteredDft {
    pub fn new(len: usize, direction: Direction) -> Self {
        assert!(len % 2 == 0, "centered DFT needs an even length");
        let mut planner = FftPlanner::new();
        let fft = match direction {
            Direction::Forward => planner.plan_fft_forward(len),
            Direction::Inverse => planner.plan_fft_inverse(len),
        };
        // (l - N/2)(m - N/2) = lm - (N/2)(l + m) + N^2/4, and e^{∓i pi N/2} = (-1)^{N/2}.
        let post_sign = if (len / 2) % 2 == 0 { 1.0 } else { -1.0 };
        CenteredDft { fft, len, post_sign }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn process(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len);
        alternate(buf, 1.0);
        self.fft.process(buf);
        alternate(buf, self.post_sign);
    }
}

fn alternate(buf: &mut [Complex64], sign: f64) {
    for (l, v) in buf.iter_mut().enumerate() {
        *v *= if l % 2 == 0 { sign } else { -sign };
    }
}

/// Applies a centered DFT along `axis` of a matrix, in place.
pub fn centered_along(data: &mut Array2<Complex64>, axis: Axis, direction: Direction) {
    let n = data.len_of(axis);
    let plan = CenteredDft::new(n, direction);
    let lanes_axis = Axis(1 - axis.index());
    data.axis_iter_mut(lanes_axis).into_par_iter().for_each_init(
        || vec![Complex64::new(0.0, 0.0); n],
        |buf, mut lane| {
            for (b, v) in buf.iter_mut().zip(lane.iter()) {
                *b = *v;
            }
            plan.process(buf);
            for (v, b) in lane.iter_mut().zip(buf.iter()) {
                *v = *b;
            }
        },
    );
}
