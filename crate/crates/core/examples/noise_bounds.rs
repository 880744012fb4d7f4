//! Both sides of the noise-propagation inequalities for the summed and the
//! peeled scheme, plus the total-error terms that need the true signal.

use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let grid = Grid::square(8.0, 256)?;
    let f = gen_chirp(&ChirpSpec::preset(), &grid)?;
    let schemes = [
        (build_frft_family(15.0, 40, &grid)?, Algorithm::Alg1),
        (build_hermite_family(&[0, 10, 20, 30, 40, 50], &grid)?, Algorithm::Alg2),
    ];
    for (family, alg) in &schemes {
        let clean = family.measure(&f)?;
        for (model, level) in [(NoiseModel::Additive, 1e-2), (NoiseModel::Multiplicative, 1e-1)] {
            let noisy = clean.with_noise(model, level, 1)?;
            let r = verify_noise_bounds(&clean, &noisy, family, &RetrievalConfig::new(0.1, *alg), 2.0, Some(&f))?;
            println!(
                "{alg:?} {model:?} {level:.0e}: {:.3e} <= {:.3e}, slice {:.3e} <= {:.3e}, satisfied {:?}",
                r.lhs_a_norm, r.rhs_bound, r.lhs_slice, r.rhs_slice_bound, r.satisfied
            );
            if let Some(t) = r.total {
                println!("    misfit clean {:.2e}, noisy {:.2e}, k = {:.4} vs |f(c)| = {:.4}", t.misfit_clean, t.misfit_noisy, t.k_noisy, t.k_true);
            }
        }
    }
    Ok(())
}
