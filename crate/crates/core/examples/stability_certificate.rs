//! Exact column-dominance certificates for the stable pair of K~(6,5).

use seqnet::massaction::{conservation_substitute, stamp_eps};
use seqnet::scalar::{rat, rational_from_f64};
use seqnet::stability::classify_state;
use seqnet::steady::{continue_in_eps, ContinuationOptions};
use seqnet::{Branch, FrontRates, ModelParams};

fn main() -> seqnet::Result<()> {
    let p = ModelParams::bistable(6, 5)?;
    let ints = |v: &[i64]| v.iter().map(|&k| rat(k, 1)).collect::<Vec<_>>();
    let front = FrontRates::new(&p, ints(&[2, 1, 6, 7, 1]), rat(5, 1))?;

    for eps in [rat(6, 1000), rat(1, 1000)] {
        let r = conservation_substitute(&p, &stamp_eps(&p, &front, &eps))?.into_values();
        println!("eps = {eps}");
        for branch in Branch::ALL {
            let x = continue_in_eps(&p, &front.to_f64(), branch, seqnet::scalar::Scalar::to_f64(&eps), &ContinuationOptions::default())?.x;
            let xr = x.iter().map(|v| rational_from_f64(*v)).collect::<seqnet::Result<Vec<_>>>()?;
            let report = classify_state(&p, &r, &xr)?;
            let eig: Vec<String> = report.eigenvalues.iter().map(|z| format!("{:.5}", z.re)).collect();
            println!(
                "  {branch:?}: {:?} scaling={:?} margin={:.3e} eigenvalues=[{}]",
                report.verdict,
                report.scaling.as_ref().map(|s| s.kind),
                report.dominant_margin,
                eig.join(", ")
            );
        }
    }
    Ok(())
}
