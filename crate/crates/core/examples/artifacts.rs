//! Measurements, ambiguity estimates and signals written to the binary
//! container, CSV and PGM formats and read back.

use std::path::PathBuf;

use stft_phase::container::{write_signal_csv, Container};
use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("artifacts"));
    std::fs::create_dir_all(&out)?;
    let grid = Grid::square(8.0, 256)?;
    let f = gen_mixture(&MixtureSpec::preset(), &grid)?;
    let family = build_frft_family(4.0, 8, &grid)?;
    let set = family.measure(&f)?;
    let rec = run_alg1(&set, &family, &RetrievalConfig::new(1e-3, Algorithm::Alg1))?;

    Container::from_measurement(&set.members()[0]).save(out.join("power.bin"))?;
    Container::from_ambiguity(&rec.ambiguity, "masked estimate").save(out.join("ambiguity.bin"))?;
    write_signal_csv(&rec.signal, out.join("signal.csv"))?;

    let power = Container::load(out.join("power.bin"))?.into_measurement()?;
    let amb = Container::load(out.join("ambiguity.bin"))?.into_ambiguity()?;
    println!("power round trip exact: {}", power.power == set.members()[0].power);
    println!("ambiguity round trip exact: {}", amb.values == rec.ambiguity.values && amb.mask == rec.ambiguity.mask);
    for name in ["power.bin", "ambiguity.bin", "signal.csv"] {
        println!("{name:<14} {:>8} bytes", std::fs::metadata(out.join(name))?.len());
    }
    Ok(())
}
