//! Sample rates from the bistability region and check them exactly.

use seqnet::region::{canonical_rates, check_bistability, in_triangular_set, sample_region};
use seqnet::scalar::format_rational;
use seqnet::{ModelParams, RateChoice};

fn main() -> seqnet::Result<()> {
    let p = ModelParams::bistable(3, 7)?;
    let canonical = canonical_rates(&p, RateChoice::Bistability)?;
    println!("canonical r = {:?}, r9 = {}", canonical.r.iter().map(format_rational).collect::<Vec<_>>(), canonical.r_n2);

    for seed in 0..5 {
        let front = sample_region(&p, seed)?;
        let check = check_bistability(&p, &front, false)?;
        let r: Vec<String> = front.r.iter().map(|v| format!("{:.4}", seqnet::scalar::Scalar::to_f64(v))).collect();
        println!(
            "seed {seed}: r = [{}] r9 = {:.4}  region = {}  triangular = {}",
            r.join(", "),
            seqnet::scalar::Scalar::to_f64(&front.r_n2),
            check.all_satisfied,
            in_triangular_set(&p, &front)?
        );
    }
    Ok(())
}
