//! Complex ℓ_p as a real space: the interleaved realification is an
//! isometry, and Re f has the same dual norm as f.

use coapprox::spaces::{complex_lp_norm, realified_dual_norm, realified_norm, realify, realify_functional};
use coapprox::{ComplexPoint, Exponent};
use num_complex::Complex64;

fn main() {
    let z = vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.5), Complex64::new(0.0, 3.0)];
    let v = realify(&ComplexPoint::from_complex(&z));
    println!("z = {z:?}\nrealified = {:?}", v.coords());
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
        println!("p = {p}: complex norm {:.12}, realified norm {:.12}", complex_lp_norm(p, &z), realified_norm(p, &v));
    }

    let w = vec![Complex64::new(0.3, 0.4), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.2)];
    let g = realify_functional(&w);
    let q = Exponent::Finite(3.0);
    println!(
        "f = {w:?}: dual norm of f {:.12}, dual norm of Re f {:.12}",
        complex_lp_norm(q.conjugate(), &w),
        realified_dual_norm(q, &g)
    );
}
