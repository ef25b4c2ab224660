//! Integrate around the steady states of K~(6,5) and probe their basins.

use seqnet::massaction::{conservation_substitute, stamp_eps};
use seqnet::sim::{basin_probe, integrate, IntegrateOptions, Method, SequestrationField};
use seqnet::steady::{continue_in_eps, ContinuationOptions};
use seqnet::{Branch, FrontRates, ModelParams};

fn main() -> seqnet::Result<()> {
    let p = ModelParams::bistable(6, 5)?;
    let front = FrontRates::new(&p, vec![2.0, 1.0, 6.0, 7.0, 1.0], 5.0)?;
    let rates = conservation_substitute(&p, &stamp_eps(&p, &front, &0.006))?.into_values();
    let states = Branch::ALL
        .iter()
        .map(|&b| continue_in_eps(&p, &front, b, 0.006, &ContinuationOptions::default()).map(|s| s.x))
        .collect::<seqnet::Result<Vec<_>>>()?;
    let field = SequestrationField::new(&p, &rates)?;

    let tr = integrate(&field, &[1.01, 1.0, 1.0, 1.0, 1.0], &states, &IntegrateOptions::default())?;
    println!("from (1.01, 1, 1, 1, 1): {:?} after {} steps, t = {:.2}", tr.terminal, tr.accepted, tr.final_time());
    let csv = tr.to_csv();
    println!("{}", csv.lines().take(3).collect::<Vec<_>>().join("\n"));

    let opts = IntegrateOptions {
        method: Method::Rosenbrock,
        t_max: 2e4,
        ..Default::default()
    };
    for count in basin_probe(&field, &states, 1e-3, 20, 42, &opts)? {
        println!("around x{}: reached {:?}, unresolved {}", count.target + 1, count.reached, count.unresolved);
    }
    Ok(())
}
