//! Approximating the Euclidean disc by N supporting half-spaces. The
//! intersection of the N tangent half-spaces at equiangular points is a
//! regular N-gon, whose Hausdorff distance to the disc is sec(π/N) − 1.

use coapprox::gauge::{decompose, hausdorff_estimate};
use coapprox::sampling::equiangular;
use coapprox::{ConvexBody, NormSpec};

fn main() -> coapprox::Result<()> {
    let space = NormSpec::l2(2);
    let disc = ConvexBody::unit_ball(space.clone());
    println!("{:>4}  {:>12}  {:>12}", "N", "estimate", "sec(pi/N)-1");
    for n in [4, 8, 16, 32, 64] {
        let hs = decompose(&disc, &space, n, equiangular(n), 0)?;
        let polygon = ConvexBody::from_halfspaces(hs)?;
        let est = hausdorff_estimate(&disc, &polygon, &space, 20_000)?;
        let exact = 1.0 / (std::f64::consts::PI / n as f64).cos() - 1.0;
        println!("{n:>4}  {est:>12.8}  {exact:>12.8}");
    }
    Ok(())
}
