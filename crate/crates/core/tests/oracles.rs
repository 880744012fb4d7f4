//! Library outputs checked against independent computations: exact rational
//! sums, brute-force quadrature and direct transcriptions of definitions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ndarray::Array2;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use num_complex::Complex64;
use stft_phase::experiment::radial_gaps;
use stft_phase::prelude::*;
use stft_phase::special::{hermite_value, laguerre_function, ChirpedGauss};
use stft_phase::stft::add_noise;

fn grid(t: f64, l: usize) -> Grid {
    Grid::square(t, l).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `L_n(z) = sum_k C(n, k) (-z)^k / k!` in exact rational arithmetic.
fn laguerre_exact(n: u32, z: i64) -> f64 {
    let z = BigRational::from_integer(BigInt::from(z));
    let mut sum = BigRational::zero();
    let mut binom = BigRational::one();
    let mut fact = BigRational::one();
    let mut power = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigRational::from_integer(BigInt::from(n - k + 1)) / BigRational::from_integer(BigInt::from(k));
            fact = fact * BigRational::from_integer(BigInt::from(k));
            power = power * -z.clone();
        }
        sum += binom.clone() * power.clone() / fact.clone();
    }
    sum.to_f64().unwrap()
}

#[test]
fn laguerre_matches_exact_binomial_sum() {
    for (n, z) in [(10u32, 5i64), (3, 2), (20, 7), (6, 1)] {
        let exact = laguerre_exact(n, z);
        assert!(rel(laguerre_eval(n as usize, z as f64), exact) < 1e-12, "L_{n}({z})");
        let damped = laguerre_function(n as usize, z as f64);
        assert!(rel(damped, exact * (-(z as f64) / 2.0).exp()) < 1e-12);
    }
}

#[test]
fn laguerre_function_has_n_sign_changes() {
    for n in [5usize, 10, 50] {
        let top = 4.0 * n as f64 + 10.0;
        let steps = 200_000;
        let values: Vec<f64> = (1..=steps).map(|i| laguerre_function(n, top * i as f64 / steps as f64)).collect();
        let changes = values.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        assert_eq!(changes, n);
    }
}

/// `h_5` from the explicit physicists' polynomial `H_5(s) = 32 s^5 - 160 s^3 + 120 s`.
fn hermite_5_explicit(t: f64) -> f64 {
    let s = (2.0 * PI).sqrt() * t;
    let h5 = 32.0 * s.powi(5) - 160.0 * s.powi(3) + 120.0 * s;
    2f64.powf(0.25) / (32.0f64 * 120.0).sqrt() * h5 * (-PI * t * t).exp()
}

#[test]
fn hermite_five_matches_explicit_formula() {
    for i in -400..=400 {
        let t = i as f64 * 0.01;
        let v = hermite_value(5, t).unwrap();
        assert!((v - hermite_5_explicit(t)).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn hermite_functions_are_orthonormal_by_quadrature() {
    let (t_max, n_pts) = (10.0, 40_000);
    let dt = 2.0 * t_max / n_pts as f64;
    let ts: Vec<f64> = (0..n_pts).map(|i| -t_max + i as f64 * dt).collect();
    let table: Vec<Vec<f64>> = (0..=30).map(|n| ts.iter().map(|&t| hermite_value(n, t).unwrap()).collect()).collect();
    let norm5 = (dt * table[5].iter().map(|v| v * v).sum::<f64>()).sqrt();
    assert!((norm5 - 1.0).abs() < 1e-8);
    for m in 0..=30 {
        for n in m..=30 {
            let ip = dt * table[m].iter().zip(&table[n]).map(|(a, b)| a * b).sum::<f64>();
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-8, "<h_{m}, h_{n}> = {ip}");
        }
    }
}

#[test]
fn hermite_three_ambiguity_vanishes_at_laguerre_roots() {
    // L_3(z) = (-z^3 + 9 z^2 - 18 z + 6) / 6; roots by bisection on the explicit cubic.
    let cubic = |z: f64| (-z * z * z + 9.0 * z * z - 18.0 * z + 6.0) / 6.0;
    let bisect = |mut lo: f64, mut hi: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cubic(lo).signum() == cubic(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let roots = [bisect(0.0, 1.0), bisect(1.0, 4.0), bisect(4.0, 8.0)];
    let radii: Vec<f64> = roots.iter().map(|z| (z / PI).sqrt()).collect();

    let steps = 100_000;
    let r_max = 2.5;
    let mut crossings = Vec::new();
    let mut prev = eval_hermite_ambiguity(3, 0.0, 0.0);
    for i in 1..=steps {
        let r = r_max * i as f64 / steps as f64;
        let v = eval_hermite_ambiguity(3, r * 0.6, r * 0.8);
        if v.signum() != prev.signum() {
            crossings.push(r);
        }
        prev = v;
    }
    assert_eq!(crossings.len(), 3);
    for (c, r) in crossings.iter().zip(&radii) {
        assert!((c - r).abs() < 2.0 * r_max / steps as f64, "crossing {c} vs root radius {r}");
    }
}

/// Unitary fractional Fourier transform at angle `alpha` in `(0, pi)` by left
/// Riemann quadrature.
fn frft_quadrature(f: impl Fn(f64) -> f64, alpha: f64, w: f64, t_max: f64, n: usize) -> Complex64 {
    let (s, c) = alpha.sin_cos();
    let cot = c / s;
    let pre = Complex64::from_polar(1.0 / s.abs().sqrt(), alpha / 2.0 - PI / 4.0);
    let dt = 2.0 * t_max / n as f64;
    let sum: Complex64 = (0..n)
        .map(|i| {
            let t = -t_max + i as f64 * dt;
            Complex64::from_polar(f(t), PI * (cot * (w * w + t * t) - 2.0 * w * t / s))
        })
        .sum();
    pre * sum * dt
}

#[test]
fn frft_gauss_matches_integral() {
    let g = grid(8.0, 1024);
    let (a, alpha) = (15.0, PI / 7.0);
    let closed = ChirpedGauss::of_frft(a, alpha).unwrap();
    let samples = frft_gauss_samples(a, alpha, &g).unwrap();
    let phi = |t: f64| a.powf(0.25) * (-a * PI * t * t).exp();
    let oversampled = 8 * g.len();
    for l in (0..g.len()).step_by(37) {
        let w = g.time(l);
        let numeric = frft_quadrature(phi, alpha, w, 8.0, oversampled);
        assert!((closed.eval(w) - numeric).norm() < 1e-8, "w = {w}");
        assert!((samples.values()[l] - numeric).norm() < 1e-8);
    }
}

#[test]
fn fourier_transform_eigenrelation_for_hermite() {
    for n in [0usize, 1, 4, 7] {
        let h = |t: f64| hermite_value(n, t).unwrap();
        let eig = Complex64::new(0.0, -1.0).powu(n as u32);
        for &w in &[-1.3, -0.4, 0.0, 0.55, 1.9] {
            let numeric = frft_quadrature(h, PI / 2.0, w, 10.0, 40_000);
            assert!((numeric - eig * h(w)).norm() < 1e-10, "n = {n}, w = {w}");
        }
    }
    // phi^1 is fixed by every fractional transform.
    for &alpha in &[0.3, 1.1, 2.5] {
        let g = ChirpedGauss::of_frft(1.0, alpha).unwrap();
        for &t in &[-0.7, 0.0, 0.9] {
            assert!((g.eval(t) - (-PI * t * t).exp()).norm() < 1e-14);
        }
    }
}

/// Direct transcription of the discrete STFT with a cyclic window.
fn naive_stft(f: &Signal, g: &ComplexGridFn) -> Array2<Complex64> {
    let grid = *f.grid();
    let (len, hop, bins) = (grid.len(), grid.hop(), grid.bins());
    let mut out = Array2::zeros((bins, grid.shifts()));
    for m in 0..bins {
        for k in 0..grid.shifts() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..len {
                let gi = (l + len + len / 2 - (k * hop) % len) % len;
                let phase = -2.0 * PI * grid.time(l) * grid.freq(m);
                acc += f.values()[l] * g.values()[gi].conj() * Complex64::from_polar(1.0, phase);
            }
            out[[m, k]] = acc * grid.dt();
        }
    }
    out
}

#[test]
fn fast_stft_matches_triple_loop() {
    for (t, len, hop, bins) in [(3.0, 32, 1, 32), (3.0, 32, 2, 16), (2.0, 24, 3, 12), (4.0, 40, 1, 40)] {
        let g = Grid::new(t, len, hop, bins).unwrap();
        let f = Signal::new(
            g,
            g.times().iter().map(|&x| Complex64::new((-x * x).exp() * (3.0 * x).cos(), 0.3 * x * (-x * x).exp())).collect(),
        )
        .unwrap();
        let w = frft_gauss_samples(2.0, 0.7, &g).unwrap();
        let fast = forward_stft(&f, &w, "w").unwrap().values;
        let slow = naive_stft(&f, &w);
        let scale = slow.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-10 * scale, "L = {len}, hop = {hop}, M = {bins}: {err}");
    }
}

#[test]
fn stft_is_an_isometry_for_localized_signals() {
    let g = grid(8.0, 512);
    let f = gen_mixture(&MixtureSpec::preset(), &g).unwrap();
    for w in [dilated_gauss_samples(3.0, &g).unwrap().to_complex(), hermite_samples(7, &g).unwrap().to_complex()] {
        let wn = g.dt() * w.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        let e = forward_stft(&f, &w, "w").unwrap().weighted_energy();
        assert!(rel(e, f.l2_norm().powi(2) * wn) < 1e-6);
    }
}

#[test]
fn gauss_spectrogram_product_matches_closed_form() {
    let g = grid(8.0, 256);
    let f = gauss_signal(&g);
    let w = dilated_gauss_samples(1.0, &g).unwrap().to_complex();
    let product = spectrogram_to_product(&to_measurement(&forward_stft(&f, &w, "phi").unwrap())).unwrap();
    for ((m, k), v) in product.values.indexed_iter() {
        let (x, y) = product.coords(m, k);
        let want = 0.5 * (-PI * (x * x + y * y)).exp();
        assert!((v - want).norm() < 1e-6, "({x}, {y})");
    }
}

#[test]
fn numeric_gauss_ambiguity_peaks_at_origin() {
    let g = grid(8.0, 256);
    let a = numeric_ambiguity(&dilated_gauss_samples(1.0, &g).unwrap().to_complex(), true).unwrap();
    assert!((a.origin().re - FRAC_1_SQRT_2).abs() < 1e-12);
    let peak = a.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!((peak - FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn gauss_hermite_mask_is_the_expected_disc() {
    let g = grid(8.0, 512);
    let eps = 0.1;
    let radius = (2.0 * (1.0 / eps as f64).ln() / PI).sqrt();
    assert!((radius - 1.2108).abs() < 1e-4);
    let mask = stability_mask(&AmbiguityEvaluator::Hermite { n: 0 }, eps, &g).unwrap();
    for ((m, k), &inside) in mask.bits.indexed_iter() {
        let (x, y) = stft_phase::ambiguity::lattice_point(&g, m, k);
        let r = x.hypot(y);
        if (r - radius).abs() > 1e-9 {
            assert_eq!(inside, r < radius, "({x}, {y})");
        }
    }
}

#[test]
fn tenth_hermite_mask_has_ten_gaps() {
    let g = grid(8.0, 512);
    let mask = stability_mask(&AmbiguityEvaluator::Hermite { n: 10 }, 0.1, &g).unwrap();
    assert_eq!(radial_gaps(&mask.bits), 10);
}

#[test]
fn coverage_radius_agrees_with_polar_membership() {
    let (a, n, eps) = (10.0, 40, 0.1);
    let report = coverage_radii(a, n, eps).unwrap();
    let angles: Vec<f64> = (0..n).map(|j| j as f64 * PI / n as f64).collect();
    let covered = |x: f64, y: f64| angles.iter().any(|&al| eval_frft_gauss_ambiguity(a, al, x, y) > eps);
    let rays = 100_000;
    let probe = |r: f64| (0..rays).all(|i| {
        let th = 2.0 * PI * i as f64 / rays as f64;
        covered(r * th.cos(), r * th.sin())
    });
    assert!(probe(report.r1 * (1.0 - 1e-3)));
    assert!(!probe(report.r1 * (1.0 + 1e-3)));
    assert!(report.r1 > report.r2);
}

#[test]
fn mixed_norm_of_gauss_ambiguity() {
    let g = grid(8.0, 512);
    let lattice = AmbiguityEvaluator::Gauss { a: 1.0 }.lattice(&g).unwrap();
    let norm = mixed_norm(&AmbiguityGrid::new(g, lattice).unwrap(), 2.0).unwrap();

    // Separable quadrature at ten times the lattice resolution.
    let (dx, dy) = (g.dt() / 10.0, g.dy() / 10.0);
    let inner = |y: f64| {
        let s: f64 = (0..5120).map(|i| {
            let x = -8.0 + i as f64 * dx;
            0.5 * (-PI * (x * x + y * y)).exp()
        }).sum();
        (s * dx).sqrt()
    };
    let y_max = 0.5 / g.dt();
    let steps = (2.0 * y_max / dy).round() as usize;
    let quad: f64 = (0..steps).map(|j| inner(-y_max + j as f64 * dy)).sum::<f64>() * dy;
    assert!(rel(norm, quad) < 1e-6);
    assert!(rel(norm, 1.0) < 1e-6);
}

#[test]
fn multiplicative_noise_mean_power_gain() {
    let g = grid(8.0, 256);
    let f = gauss_signal(&g);
    let family = build_frft_family(2.0, 1, &g).unwrap();
    let set = family.measure(&f).unwrap();
    let clean = &set.members()[0];
    let noisy = add_noise(clean, NoiseModel::Multiplicative, 0.05, 11).unwrap();
    let ratios: Vec<f64> = clean
        .power
        .iter()
        .zip(noisy.power.iter())
        .filter(|(c, _)| **c > 1e-20)
        .map(|(c, n)| n / c)
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    // E[xi^2] = 1 + 0.05^2 for xi ~ N(1, 0.05^2).
    assert!((1.0..=1.006).contains(&mean), "mean gain {mean}");
}

#[test]
fn chirp_ambiguity_mass_is_concentrated() {
    let g = grid(8.0, 1024);
    let f = gen_chirp(&ChirpSpec::preset(), &g).unwrap();
    let a = numeric_ambiguity(&ComplexGridFn::new(g, f.values().to_vec()).unwrap(), true).unwrap();
    let (mut inside, mut total) = (0.0, 0.0);
    for ((m, k), v) in a.values.indexed_iter() {
        let (x, y) = a.coords(m, k);
        let w = v.norm_sqr();
        total += w;
        if x.abs() <= 12.0 && y.abs() <= 12.0 {
            inside += w;
        }
    }
    assert!(inside / total > 0.99);
}

#[test]
fn mixture_ambiguity_has_separate_blobs() {
    let g = grid(8.0, 512);
    let f = gen_mixture(&MixtureSpec::preset(), &g).unwrap();
    let a = numeric_ambiguity(&ComplexGridFn::new(g, f.values().to_vec()).unwrap(), true).unwrap();
    let row = a.values.row(g.len() / 2);
    let mags: Vec<f64> = row.iter().map(|v| v.norm()).collect();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let maxima = (1..mags.len() - 1)
        .filter(|&k| mags[k] > 0.05 * peak && mags[k] >= mags[k - 1] && mags[k] > mags[k + 1])
        .count();
    assert!(maxima >= 3, "found {maxima} blobs along the time-shift axis");
}
