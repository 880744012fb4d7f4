//! A three-bump mixture measured with multiplicative noise and recovered with
//! eighty rotated Gauss windows and with two Hermite windows.

use stft_phase::experiment::eighty_angles;
use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let grid = Grid::square(8.0, 512)?;
    let f = gen_mixture(&MixtureSpec::preset(), &grid)?;
    let seed = 7;

    let frft = build_frft_family_with_angles(50.0, &eighty_angles(), &grid)?;
    let noisy = frft.measure(&f)?.with_noise(NoiseModel::Multiplicative, 0.05, seed)?;
    let rec = run_alg1(&noisy, &frft, &RetrievalConfig::new(0.5, Algorithm::Alg1))?;
    println!("80 frft windows, eps = 0.5: d = {:.4}", misfit(&f, &rec.signal)?.0);

    for degrees in [vec![50, 100], vec![100]] {
        let family = build_hermite_family(&degrees, &grid)?;
        let noisy = family.measure(&f)?.with_noise(NoiseModel::Multiplicative, 0.05, seed)?;
        match run_alg2(&noisy, &family, &RetrievalConfig::new(0.5, Algorithm::Alg2)) {
            Ok(rec) => println!(
                "hermite {degrees:?}, eps = 0.5: d = {:.4}, region covers {:.5}",
                misfit(&f, &rec.signal)?.0,
                rec.omega_area_fraction
            ),
            Err(e) => println!("hermite {degrees:?}, eps = 0.5: {e}"),
        }
    }
    Ok(())
}
