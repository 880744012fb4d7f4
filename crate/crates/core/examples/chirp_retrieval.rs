//! Chirp recovery: forty rotated Gauss windows against a single standard Gauss
//! window at several thresholds.

use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let grid = Grid::square(8.0, 1024)?;
    let f = gen_chirp(&ChirpSpec::preset(), &grid)?;

    let family = build_frft_family(15.0, 40, &grid)?;
    let rec = run_alg1(&family.measure(&f)?, &family, &RetrievalConfig::new(1e-3, Algorithm::Alg1))?;
    let (d, theta) = misfit(&f, &rec.signal)?;
    println!("40 windows, eps = 1e-3: d = {d:.6}, theta = {theta:.4}, region covers {:.4}", rec.omega_area_fraction);

    let g = dilated_gauss_samples(1.0, &grid)?.to_complex();
    let mea = to_measurement(&forward_stft(&f, &g, "phi^1")?);
    for eps in [1e-3, 1e-6, 1e-9] {
        let rec = single_window_retrieve(&mea, &AmbiguityEvaluator::Gauss { a: 1.0 }, &RetrievalConfig::new(eps, Algorithm::Alg1))?;
        println!("single Gauss, eps = {eps:.0e}: d = {:.4}", misfit(&f, &rec.signal)?.0);
    }
    Ok(())
}
