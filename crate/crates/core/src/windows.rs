//! Window families, stability masks, disjoint peeling and coverage geometry.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityEvaluator;
use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};
use crate::special::{self, ComplexGridFn};
use crate::stft::{forward_stft, to_measurement, MeasurementSet};

#[derive(Debug, Clone)]
pub struct Window {
    pub id: String,
    pub samples: ComplexGridFn,
    pub evaluator: AmbiguityEvaluator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    FrftGauss { a: f64 },
    Hermite,
}

#[derive(Debug, Clone)]
pub struct WindowFamily {
    grid: Grid,
    scheme: Scheme,
    members: Vec<Window>,
}

/// Angles `(j - 1) pi / n` for `j = 1..=n`.
pub fn default_angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 * PI / n as f64).collect()
}

pub fn build_frft_family(a: f64, n: usize, grid: &Grid) -> Result<WindowFamily> {
    if n == 0 {
        return Err(Error::InvalidParameter("a window family needs at least one member".into()));
    }
    build_frft_family_with_angles(a, &default_angles(n), grid)
}

/// Family `F_{alpha_j} phi^a` for an explicit angle list.
pub fn build_frft_family_with_angles(a: f64, angles: &[f64], grid: &Grid) -> Result<WindowFamily> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter("a window family needs at least one member".into()));
    }
    let members = angles
        .iter()
        .map(|&alpha| {
            Ok(Window {
                id: format!("frft_gauss/a={a}/alpha={alpha:.9}"),
                samples: special::frft_gauss_samples(a, alpha, grid)?,
                evaluator: AmbiguityEvaluator::FrftGauss { a, alpha },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindowFamily { grid: *grid, scheme: Scheme::FrftGauss { a }, members })
}

pub fn build_hermite_family(degrees: &[usize], grid: &Grid) -> Result<WindowFamily> {
    if degrees.is_empty() {
        return Err(Error::InvalidParameter("a window family needs at least one member".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!("hermite degrees must increase strictly: {degrees:?}")));
    }
    let members = degrees
        .iter()
        .map(|&n| {
            Ok(Window {
                id: format!("hermite/n={n}"),
                samples: special::hermite_samples(n, grid)?.to_complex(),
                evaluator: AmbiguityEvaluator::Hermite { n },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindowFamily { grid: *grid, scheme: Scheme::Hermite, members })
}

impl WindowFamily {
    /// Family holding a single window.
    pub fn single(window: Window, scheme: Scheme) -> Self {
        WindowFamily { grid: *window.samples.grid(), scheme, members: vec![window] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn members(&self) -> &[Window] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.members
            .iter()
            .filter_map(|w| match w.evaluator {
                AmbiguityEvaluator::Hermite { n } => Some(n),
                _ => None,
            })
            .collect()
    }

    /// Noiseless measurements `|V_{g_j} f|^2` for every member.
    pub fn measure(&self, f: &Signal) -> Result<MeasurementSet> {
        let members = self
            .members
            .iter()
            .map(|w| forward_stft(f, &w.samples, &w.id).map(|c| to_measurement(&c)))
            .collect::<Result<Vec<_>>>()?;
        MeasurementSet::new(members)
    }

    /// `sum_j A g_j` on the lattice.
    pub fn summed_lattice(&self) -> Result<Array2<Complex64>> {
        let mut total = Array2::<Complex64>::zeros((self.grid.len(), self.grid.len()));
        for w in &self.members {
            total += &w.evaluator.lattice(&self.grid)?;
        }
        Ok(total)
    }
}

/// Boolean lattice region with the threshold that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    pub grid: Grid,
    pub bits: Array2<bool>,
    pub epsilon: f64,
}

impl RegionMask {
    pub fn empty(grid: Grid, epsilon: f64) -> Self {
        RegionMask { grid, bits: Array2::from_elem((grid.len(), grid.len()), false), epsilon }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn area_fraction(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    /// Physical area `count * dx * dy`.
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.dt() * self.grid.dy()
    }

    pub fn union(&self, other: &RegionMask) -> RegionMask {
        RegionMask { grid: self.grid, bits: Zip::from(&self.bits).and(&other.bits).map_collect(|&a, &b| a || b), epsilon: self.epsilon }
    }

    pub fn difference(&self, other: &RegionMask) -> RegionMask {
        RegionMask { grid: self.grid, bits: Zip::from(&self.bits).and(&other.bits).map_collect(|&a, &b| a && !b), epsilon: self.epsilon }
    }

    pub fn intersects(&self, other: &RegionMask) -> bool {
        Zip::from(&self.bits).and(&other.bits).fold(false, |acc, &a, &b| acc || (a && b))
    }

    pub fn is_subset_of(&self, other: &RegionMask) -> bool {
        Zip::from(&self.bits).and(&other.bits).fold(true, |acc, &a, &b| acc && (!a || b))
    }
}

fn threshold(values: &Array2<Complex64>, grid: Grid, epsilon: f64) -> RegionMask {
    RegionMask { grid, bits: values.mapv(|v| v.norm() > epsilon), epsilon }
}

/// `{ |A g| > epsilon }` on the lattice.
pub fn stability_mask(evaluator: &AmbiguityEvaluator, epsilon: f64, grid: &Grid) -> Result<RegionMask> {
    let closed_form = !matches!(evaluator, AmbiguityEvaluator::Numeric(_));
    if !(epsilon > 0.0) || (closed_form && epsilon >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold {epsilon} outside (0, 1) for {}",
            evaluator.describe()
        )));
    }
    Ok(threshold(&evaluator.lattice(grid)?, *grid, epsilon))
}

/// `{ |sum_j A g_j| > epsilon }`, the single region used by the summed scheme.
pub fn summed_mask(family: &WindowFamily, epsilon: f64) -> Result<RegionMask> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {epsilon}")));
    }
    Ok(threshold(&family.summed_lattice()?, family.grid, epsilon))
}

/// Pairwise disjoint regions: member `j` keeps its stability set minus
/// everything claimed by earlier members.
pub fn peel_masks(family: &WindowFamily, epsilon: f64) -> Result<Vec<RegionMask>> {
    let singles = family
        .members
        .par_iter()
        .map(|w| stability_mask(&w.evaluator, epsilon, &family.grid))
        .collect::<Result<Vec<_>>>()?;
    let mut claimed = RegionMask::empty(family.grid, epsilon);
    Ok(singles
        .into_iter()
        .map(|mask| {
            let own = mask.difference(&claimed);
            claimed = claimed.union(&own);
            own
        })
        .collect())
}

/// Disc radii covered by the union of rotated ellipses
/// `a x'^2 + y'^2 / a < C`, `C = (2/pi)|ln(sqrt 2 eps)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub a: f64,
    pub n: usize,
    pub epsilon: f64,
    pub r1: f64,
    pub r2: f64,
    pub covered_disc_radius_numeric: f64,
    /// Union area over the area of the disc of radius `sqrt(a C)`.
    pub area_fraction: f64,
}

const COVERAGE_RAYS: usize = 1 << 18;

fn level_constant(epsilon: f64) -> f64 {
    (2.0 / PI) * (2f64.sqrt() * epsilon).ln().abs()
}

/// Closed-form radii `(R1, R2)` without the brute-force check.
pub fn coverage_bounds(a: f64, n: usize, epsilon: f64) -> Result<(f64, f64)> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("coverage needs a > 1, got {a}")));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("coverage needs at least 3 angles, got {n}")));
    }
    if !(epsilon > 0.0 && epsilon < FRAC_1_SQRT_2) {
        return Err(Error::InvalidParameter(format!("threshold {epsilon} outside (0, 1/sqrt 2)")));
    }
    let c = level_constant(epsilon);
    let half = PI / (2.0 * n as f64);
    let (s2, c2) = (half.sin().powi(2), half.cos().powi(2));
    Ok(((c / (c2 / a + a * s2)).sqrt(), (c / (a * c2 + s2 / a)).sqrt()))
}

pub fn coverage_radii(a: f64, n: usize, epsilon: f64) -> Result<CoverageReport> {
    let (r1, r2) = coverage_bounds(a, n, epsilon)?;
    let c = level_constant(epsilon);

    // The union is star-shaped about the origin, so along each ray it reaches
    // the largest of the per-ellipse boundary radii.
    let angles = default_angles(n);
    let (min_reach, area) = (0..COVERAGE_RAYS)
        .into_par_iter()
        .map(|i| {
            let theta = PI * i as f64 / COVERAGE_RAYS as f64;
            let reach = angles
                .iter()
                .map(|alpha| {
                    let (s, co) = (theta + alpha).sin_cos();
                    c / (a * co * co + s * s / a)
                })
                .fold(0.0, f64::max);
            (reach.sqrt(), reach)
        })
        .reduce(|| (f64::INFINITY, 0.0), |x, y| (x.0.min(y.0), x.1 + y.1));
    // The union is symmetric under theta -> theta + pi.
    let union_area = area * PI / COVERAGE_RAYS as f64;
    Ok(CoverageReport {
        a,
        n,
        epsilon,
        r1,
        r2,
        covered_disc_radius_numeric: min_reach,
        area_fraction: (union_area / (PI * a * c)).min(1.0),
    })
}
