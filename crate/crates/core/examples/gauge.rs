//! Minkowski gauges of a polytope given by vertices and of a translated
//! ℓ_1 ball, plus the supporting half-space at a smooth boundary point.

use coapprox::{ConvexBody, NormSpec, Point};

fn main() -> coapprox::Result<()> {
    let simplex = ConvexBody::from_vertices(vec![
        Point::from(vec![2.0, 0.0]),
        Point::from(vec![-1.0, 1.5]),
        Point::from(vec![-1.0, -1.5]),
    ])?;
    for x in [[1.0, 0.0], [-0.5, 0.0], [0.3, 0.7], [4.0, -4.0]] {
        let g = simplex.gauge(&x, 1e-12)?;
        println!("gauge{x:?} = {g:.12}");
    }

    let l2 = NormSpec::l2(2);
    let z = simplex.boundary_point(&[1.0, 1.0])?;
    let h = simplex.supporting_halfspace(&l2, &z)?;
    println!(
        "boundary point {:?}; supporting half-space {:?}·x <= {:.6}",
        z.coords(),
        h.functional().coeffs(),
        h.level()
    );

    let diamond = ConvexBody::unit_ball(NormSpec::l1(2)).translate(&[0.25, 0.0])?;
    println!("shifted l1 ball: gauge(1, 0) = {:.12}", diamond.gauge(&[1.0, 0.0], 1e-12)?);
    Ok(())
}
