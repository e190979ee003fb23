//! One-complemented hyperplanes and the contractive projections onto the
//! half-spaces they bound.

use coapprox::halfspace::{
    find_norm_one_projection, is_one_complemented_hyperplane_l1, is_one_complemented_hyperplane_linf,
    HalfSpaceProjection, SearchBudget,
};
use coapprox::oracle::{nonexpansiveness_sweep, SweepConfig};
use coapprox::{DualFunctional, Error, HalfSpace, NormSpec};

fn main() -> coapprox::Result<()> {
    let budget = SearchBudget::default();
    let sixth = 1.0 / 6.0;

    let linf = NormSpec::linf(4);
    for f in [vec![0.5, sixth, sixth, sixth], vec![0.25; 4]] {
        let f = DualFunctional::from(f);
        let dominated = is_one_complemented_hyperplane_linf(&f)?;
        match find_norm_one_projection(&linf, &f, &budget) {
            Ok(p) => println!(
                "l_inf^4 {:?}: dominated = {dominated}, y = {:?}, norm {:.9}",
                f.coeffs(),
                p.projection().direction().coords(),
                p.norm_estimate()
            ),
            Err(Error::NotFound { estimate }) => {
                println!("l_inf^4 {:?}: dominated = {dominated}, best norm {estimate:.6}", f.coeffs())
            }
            Err(e) => return Err(e),
        }
    }

    let l1 = NormSpec::l1(3);
    let f = DualFunctional::from(vec![0.7, -0.2, 0.0]);
    println!("l_1^3 {:?}: two nonzero coordinates = {}", f.coeffs(), is_one_complemented_hyperplane_l1(&f)?);

    let h = HalfSpace::normalized(&f, 0.4, &l1)?;
    let q = HalfSpaceProjection::certify(h, &budget)?;
    println!("Q(3, 1, -2) = {:?}", q.apply(&[3.0, 1.0, -2.0]).coords());
    let sweep = nonexpansiveness_sweep(|x| q.apply(x), &l1, &SweepConfig::default());
    println!("max |Qx - Qz| / |x - z| over {} pairs: {:.12}", sweep.pairs, sweep.max_ratio);
    Ok(())
}
