//! Certifies a point of ℓ_∞⁴ with no best coapproximation in
//! F = ker(1,0,0,0) ∩ ker(1/2,1/6,1/6,1/6), and checks the single-kernel control.

use std::time::Instant;

use coapprox::oracle::{verify_counterexample_linf4, CounterexampleConfig};

fn main() -> coapprox::Result<()> {
    let cfg = CounterexampleConfig::default();
    let start = Instant::now();
    let rep = verify_counterexample_linf4(&cfg)?;
    println!("grid: h = {}, R = {}, {} samples, seed {}", rep.h, rep.radius, rep.samples, rep.seed);
    println!("basis: {:?}", rep.basis.iter().map(|b| b.coords()).collect::<Vec<_>>());
    println!("witness x = {:?}", rep.witness.coords());
    println!("best grid candidate d = {:?}", rep.candidate.coords());
    println!("grid margin {:.6}, slack {:.3}, certified margin {:.6}", rep.grid_margin, rep.slack, rep.margin);
    if let Some(c) = &rep.control {
        println!(
            "control on ker f1: {} samples, {} queries, max margin {:.6} (tol {:.3}) -> {}",
            c.samples,
            c.queries,
            c.max_margin,
            c.tol,
            if c.passed() { "ok" } else { "FAILED" }
        );
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
