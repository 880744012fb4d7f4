//! Summed ambiguity of fractional Fourier transformed Gauss windows: the union
//! of rotated ellipses approaches a disc as the number of angles grows.

use std::path::PathBuf;

use stft_phase::container::{write_log_pgm, write_mask_pgm};
use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("coverage_daffodil"));
    std::fs::create_dir_all(&out)?;
    let grid = Grid::square(8.0, 512)?;

    for n in [3, 5, 10, 40] {
        let r = coverage_radii(10.0, n, 0.1)?;
        println!(
            "a = 10, N = {n:>2}: R1 = {:.4}  R2 = {:.4}  brute force = {:.4}  union/disc area = {:.4}",
            r.r1, r.r2, r.covered_disc_radius_numeric, r.area_fraction
        );
    }

    let family = build_frft_family(10.0, 40, &grid)?;
    let sum = family.summed_lattice()?;
    write_log_pgm(&sum.mapv(|v| v.norm()), out.join("daffodil.pgm"))?;
    let mask = summed_mask(&family, 0.1)?;
    write_mask_pgm(&mask.bits, out.join("daffodil_mask.pgm"))?;
    println!("mask covers {:.4} of the lattice; images in {}", mask.area_fraction(), out.display());
    Ok(())
}
