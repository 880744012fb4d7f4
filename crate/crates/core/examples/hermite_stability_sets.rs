//! Stability sets of Hermite windows are annuli with gaps at the Laguerre
//! zeros. Several degrees fill each other's gaps, and peeling splits the union
//! into disjoint pieces.

use std::path::PathBuf;

use stft_phase::container::write_mask_pgm;
use stft_phase::experiment::radial_gaps;
use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hermite_sets"));
    std::fs::create_dir_all(&out)?;
    let grid = Grid::square(8.0, 512)?;
    let eps = 0.1;

    let family = build_hermite_family(&[1, 5, 10], &grid)?;
    let mut union = RegionMask::empty(grid, eps);
    for w in family.members() {
        let m = stability_mask(&w.evaluator, eps, &grid)?;
        println!("{:<12} area {:.4}  gaps {}", w.id, m.area(), radial_gaps(&m.bits));
        write_mask_pgm(&m.bits, out.join(format!("{}.pgm", w.id.replace(['/', '='], "_"))))?;
        union = union.union(&m);
    }
    println!("union        area {:.4}  gaps {}", union.area(), radial_gaps(&union.bits));
    write_mask_pgm(&union.bits, out.join("union.pgm"))?;

    for (w, piece) in family.members().iter().zip(peel_masks(&family, eps)?) {
        println!("peeled {:<12} keeps {:>6} cells", w.id, piece.count());
    }
    Ok(())
}
