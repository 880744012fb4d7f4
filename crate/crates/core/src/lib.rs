//! Phase retrieval from multi-window STFT magnitudes by direct inversion of
//! the ambiguity function.
//!
//! Two schemes are provided. The summed scheme measures with fractional Fourier
//! transforms of a dilated Gaussian and divides the summed spectrogram product
//! by the summed window ambiguities. The peeled scheme measures with Hermite
//! functions and assigns each lattice cell to the lowest degree whose ambiguity
//! is large there. Both finish with a one-dimensional inverse transform that
//! recovers the signal up to a global phase.
//!
//! ```
//! use stft_phase::prelude::*;
//!
//! let grid = Grid::square(8.0, 128)?;
//! let f = gauss_signal(&grid);
//! let family = build_frft_family(2.0, 8, &grid)?;
//! let measurements = family.measure(&f)?;
//! let rec = run_alg1(&measurements, &family, &RetrievalConfig::new(1e-3, Algorithm::Alg1))?;
//! assert!(misfit(&f, &rec.signal)?.0 < 1e-3);
//! # Ok::<(), stft_phase::Error>(())
//! ```

pub mod ambiguity;
pub mod audio;
pub mod container;
pub mod error;
pub mod experiment;
pub mod fft;
pub mod grid;
pub mod metrics;
pub mod retrieval;
pub mod special;
pub mod stft;
pub mod windows;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::ambiguity::{
        eval_frft_gauss_ambiguity, eval_gauss_ambiguity, eval_hermite_ambiguity, numeric_ambiguity,
        spectrogram_to_product, AmbiguityEvaluator, AmbiguityGrid,
    };
    pub use crate::error::{Error, Result};
    pub use crate::grid::{gauss_signal, gen_chirp, gen_mixture, ChirpSpec, Grid, MixtureSpec, MixtureTerm, Signal};
    pub use crate::metrics::{misfit, mixed_norm, verify_noise_bounds, BoundReport};
    pub use crate::retrieval::{
        reconstruct_from_ambiguity, retrieve, run_alg1, run_alg2, single_window_retrieve, Algorithm, Anchor,
        Reconstruction, RetrievalConfig,
    };
    pub use crate::special::{
        dilated_gauss_samples, frft_gauss_samples, hermite_samples, laguerre_eval, ComplexGridFn, RealGridFn,
    };
    pub use crate::stft::{add_noise, forward_stft, to_measurement, Measurement, MeasurementSet, NoiseModel};
    pub use crate::windows::{
        build_frft_family, build_frft_family_with_angles, build_hermite_family, coverage_radii, peel_masks,
        stability_mask, summed_mask, CoverageReport, RegionMask, WindowFamily,
    };
}
