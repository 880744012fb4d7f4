//! Peeled recovery with Hermite windows, for a fixed degree set and for
//! randomly drawn ones.

use stft_phase::experiment::{random_hermite_study, StudyConfig};
use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let grid = Grid::square(8.0, 512)?;
    let f = gen_chirp(&ChirpSpec::preset(), &grid)?;
    let cfg = RetrievalConfig::new(1e-3, Algorithm::Alg2);

    for degrees in [vec![0], vec![0, 10], vec![0, 10, 20, 30, 40, 50]] {
        let family = build_hermite_family(&degrees, &grid)?;
        let rec = run_alg2(&family.measure(&f)?, &family, &cfg)?;
        println!("degrees {degrees:?}: d = {:.6}", misfit(&f, &rec.signal)?.0);
    }

    let study = StudyConfig { count: 6, min_degree: 0, max_degree: 50, trials: 10 };
    let s = random_hermite_study(&f, &study, 1e-3, 2024)?;
    println!("10 random sets of 6 degrees: mean = {:.6}, p90 = {:.6}, worst = {:.6}", s.mean, s.p90, s.max);
    Ok(())
}
