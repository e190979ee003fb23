//! Projection onto an intersection of contractive half-spaces of ℓ_∞³ via
//! the relaxed iteration of the averaged map.

use coapprox::halfspace::{HalfSpaceProjection, SearchBudget};
use coapprox::intersect::{averaged_map, fixed_point, zero_in_hull, IterationConfig};
use coapprox::{DualFunctional, HalfSpace, NormSpec};

fn main() -> coapprox::Result<()> {
    let space = NormSpec::linf(3);
    let family = [([1.0, 0.0, 0.0], 0.0), ([0.5, 0.25, 0.25], 0.0), ([0.6, -0.3, 0.1], 0.2)];
    let mut qs = Vec::new();
    for (f, d) in family {
        let h = HalfSpace::normalized(&DualFunctional::from(f.to_vec()), d, &space)?;
        qs.push(HalfSpaceProjection::certify(h, &SearchBudget::default())?);
    }
    let ys: Vec<_> = qs.iter().map(|q| q.direction().clone()).collect();
    println!("0 in conv{{y_k}}: {}", zero_in_hull(&ys)?);

    let q = averaged_map(qs, None)?;
    let cfg = IterationConfig::default();
    for x0 in [[1.0, 1.0, 1.0], [4.0, -2.0, 3.0], [-1.0, 0.0, 0.0]] {
        let fp = fixed_point(&q, &x0, &cfg)?;
        println!(
            "{x0:?} -> {:?} ({} iterations, residual {:.1e}, violation {:.1e}, monotone {})",
            fp.point.coords(),
            fp.iterations,
            fp.residual,
            q.max_violation(&fp.point),
            fp.monotone
        );
    }
    Ok(())
}
