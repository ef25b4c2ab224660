//! Find, save, reload and re-verify a bistability witness.

use seqnet::{find_witness, verify_witness, ModelParams, RateSource, WitnessOptions, WitnessResult};

fn main() -> seqnet::Result<()> {
    let p = ModelParams::bistable(3, 7)?;
    let w = find_witness(&p, &RateSource::Canonical, &WitnessOptions::default())?;
    print!("{}", w.summary());

    let path = std::env::temp_dir().join("seqnet-witness.json");
    w.save(&path)?;
    let back = WitnessResult::load(&path)?;
    verify_witness(&back)?;
    println!("reloaded from {} and re-verified", path.display());
    Ok(())
}
