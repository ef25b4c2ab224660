//! The three steady states of K~(6,5) at eps = 0.006 with rates
//! r = (2, 1, 6, 7, 1), r7 = 5.

use seqnet::steady::{continue_in_eps, delta_branch, ContinuationOptions};
use seqnet::{Branch, FrontRates, ModelParams};

fn main() -> seqnet::Result<()> {
    let p = ModelParams::bistable(6, 5)?;
    let front = FrontRates::new(&p, vec![2.0, 1.0, 6.0, 7.0, 1.0], 5.0)?;

    let (_, delta) = delta_branch(&p, &front)?;
    println!("eps = 0 interior point: {delta:.6?}");

    for branch in Branch::ALL {
        let s = continue_in_eps(&p, &front, branch, 0.006, &ContinuationOptions::default())?;
        println!(
            "{branch:?}: x = {:.6?}  |f| = {:.1e}  det J = {:.5e}  nondegenerate = {}",
            s.x, s.residual_norm, s.det_j, s.nondegenerate
        );
    }
    Ok(())
}
