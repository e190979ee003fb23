//! Small dense feasibility solves: does `A λ = b` have a solution `λ ≥ 0`?
//!
//! Phase one of the simplex method with Bland's rule on a dense tableau.
//! Problems here have at most a few hundred columns, so no sparsity or
//! factorization updates are attempted.

use crate::point::Point;

const PIVOT_EPS: f64 = 1e-12;

/// Solves `A λ = b, λ ≥ 0` where `columns[j]` is the `j`-th column of `A`.
/// Returns a nonnegative solution or `None` if the system is infeasible.
pub fn nonnegative_solution(columns: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let k = columns.len();
    let width = k + m + 1;
    let scale = 1.0 + b.iter().fold(0.0f64, |s, v| s.max(v.abs()));

    // tableau rows: [A | I | b], with rows flipped so that b >= 0
    let mut t = vec![vec![0.0; width]; m];
    for (i, row) in t.iter_mut().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for (j, col) in columns.iter().enumerate() {
            row[j] = sign * col[i];
        }
        row[k + i] = 1.0;
        row[width - 1] = sign * b[i];
    }
    let mut basis: Vec<usize> = (k..k + m).collect();

    let max_pivots = 50 * (m + k) + 100;
    for _ in 0..max_pivots {
        // reduced costs of the phase-one objective (sum of artificials)
        let entering = (0..k + m).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z: f64 = (0..m)
                .filter(|&i| basis[i] >= k)
                .map(|i| t[i][j])
                .sum::<f64>()
                - if j >= k { 1.0 } else { 0.0 };
            z > PIVOT_EPS * scale
        });
        let Some(e) = entering else { break };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][e] > PIVOT_EPS {
                let ratio = t[i][width - 1] / t[i][e];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        // unbounded ray in phase one cannot happen: the objective is bounded below
        let Some((r, _)) = leave else { break };

        let pivot = t[r][e];
        for v in t[r].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r {
                let factor = row[e];
                if factor != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        basis[r] = e;
    }

    let mut lambda = vec![0.0; k];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < k {
            lambda[bj] = t[i][width - 1].max(0.0);
        }
    }
    let residual = (0..m)
        .map(|i| {
            let ax: f64 = columns.iter().zip(&lambda).map(|(c, l)| c[i] * l).sum();
            (ax - b[i]).abs()
        })
        .fold(0.0f64, f64::max);
    (residual <= 1e-11 * scale).then_some(lambda)
}

/// Convex-combination coefficients expressing `x` in terms of `points`.
pub fn convex_coefficients(points: &[Point], x: &[f64]) -> Option<Vec<f64>> {
    let columns: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut c = p.coords().to_vec();
            c.push(1.0);
            c
        })
        .collect();
    let mut b = x.to_vec();
    b.push(1.0);
    nonnegative_solution(&columns, &b)
}

/// Whether `x` is a nonnegative combination of `generators`.
pub fn in_cone(generators: &[Point], x: &[f64]) -> bool {
    let columns: Vec<Vec<f64>> = generators.iter().map(|p| p.coords().to_vec()).collect();
    nonnegative_solution(&columns, x).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> Vec<Point> {
        v.iter().map(|p| Point::from(p.to_vec())).collect()
    }

    #[test]
    fn diamond_membership() {
        let diamond = pts(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        let lam = convex_coefficients(&diamond, &[0.4, 0.4]).expect("inside");
        assert!((lam.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(lam.iter().all(|&l| l >= 0.0));
        assert!(convex_coefficients(&diamond, &[0.5, 0.5]).is_some());
        assert!(convex_coefficients(&diamond, &[0.6, 0.5]).is_none());
    }

    #[test]
    fn negative_rhs_is_handled() {
        let cols = vec![vec![-1.0, 0.0], vec![0.0, -2.0]];
        let l = nonnegative_solution(&cols, &[-3.0, -4.0]).unwrap();
        assert!((l[0] - 3.0).abs() < 1e-12 && (l[1] - 2.0).abs() < 1e-12);
        assert!(nonnegative_solution(&cols, &[1.0, 0.0]).is_none());
    }

    #[test]
    fn cone_membership() {
        let gens = pts(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert!(in_cone(&gens, &[2.0, 1.0]));
        assert!(!in_cone(&gens, &[0.0, 1.0]));
        assert!(in_cone(&gens, &[0.0, 0.0]));
    }

    #[test]
    fn degenerate_duplicate_points() {
        let p = pts(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        assert!(convex_coefficients(&p, &[0.5, 0.5]).is_some());
        assert!(convex_coefficients(&p, &[0.5, 0.4]).is_none());
    }
}
