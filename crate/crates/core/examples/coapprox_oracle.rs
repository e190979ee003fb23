//! Brute-force best coapproximation on a sampled set: contractive
//! projections land in R_F(x), and the points they produce are optimal.

use coapprox::halfspace::{HalfSpaceProjection, SearchBudget};
use coapprox::oracle::{find_coapprox, is_coapprox, is_optimal_point, SampledSet};
use coapprox::{DualFunctional, HalfSpace, NormSpec, Point};

fn main() -> coapprox::Result<()> {
    let space = NormSpec::linf(2);
    let h = HalfSpace::new(DualFunctional::from(vec![1.0, 0.0]), 0.0, space.clone())?;
    let q = HalfSpaceProjection::certify(h, &SearchBudget::default())?;

    // F = {x_1 ≤ 0} ∩ [−3, 3]², sampled with step 0.1
    let step = 0.1;
    let pts: Vec<Point> = (-30..=0)
        .flat_map(|i| (-30..=30).map(move |j| Point::from(vec![i as f64 * step, j as f64 * step])))
        .collect();
    let f = SampledSet::explicit(&space, pts, step)?;

    for x in [[1.5, 0.4], [2.0, -1.0], [-1.0, 1.0]] {
        let qx = q.apply(&x);
        let rep = find_coapprox(&space, &f, &x, 1e-12)?;
        println!(
            "x = {x:?}: Qx = {:?}, Qx in R_F(x): {}, oracle margin {:.3e} at {:?}",
            qx.coords(),
            is_coapprox(&space, &f, &qx, &x, 1e-12),
            rep.margin,
            rep.candidate.coords()
        );
        let with_qx = f.clone().with_point(&space, &qx)?;
        let opt = is_optimal_point(&space, &with_qx, &qx, 400, 1)?;
        println!("  Qx optimal: {} after {} trials", opt.optimal, opt.evaluations);
    }

    let outside = [0.5, 0.0];
    let opt = is_optimal_point(&space, &f, &outside, 400, 1)?;
    println!("{outside:?} is dominated by {:?}", opt.witness.map(|w| w.into_vec()));
    Ok(())
}
