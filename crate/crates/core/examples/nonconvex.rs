//! A contractive set that is not convex: the double cone {|y| ≤ |x|} in ℓ_∞².

use coapprox::oracle::{nonconvex_projection_linf2, nonexpansiveness_sweep, SweepConfig};
use coapprox::NormSpec;

fn main() {
    for p in [[1.0, 2.0], [-1.0, 2.0], [0.5, 0.3], [2.0, -5.0], [0.0, 1.0]] {
        println!("P{p:?} = {:?}", nonconvex_projection_linf2(p).coords());
    }
    let space = NormSpec::linf(2);
    let cfg = SweepConfig { pairs: 100_000, scale: 4.0, seed: 2 };
    let rep = nonexpansiveness_sweep(|x| nonconvex_projection_linf2([x[0], x[1]]), &space, &cfg);
    println!("max ratio over {} pairs: {}", rep.pairs, rep.max_ratio);
    // (1, 1) and (−1, 1) are fixed, their midpoint is not
    println!("midpoint (0, 1) maps to {:?}", nonconvex_projection_linf2([0.0, 1.0]).coords());
}
