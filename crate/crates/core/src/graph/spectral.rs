use super::SimpleGraph;
use crate::error::{Error, Result};

/// `|λ₂|`: largest eigenvalue magnitude of the normalized adjacency operator `A/t`
/// on the complement of the all-ones vector.
pub fn second_eigenvalue(g: &SimpleGraph) -> Result<f64> {
    Ok(spectrum_orthogonal_to_ones(g)?
        .into_iter()
        .fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Signed second-largest eigenvalue of `A/t` (the largest on the complement of the all-ones vector).
pub fn second_largest_eigenvalue(g: &SimpleGraph) -> Result<f64> {
    Ok(*spectrum_orthogonal_to_ones(g)?.last().expect("n ≥ 2"))
}

/// Eigenvalues of `A/t` restricted to `1⊥`, ascending.
///
/// The top eigenvector (all ones) is deflated by compressing the operator onto
/// the Helmert basis of `1⊥`; the remaining `(n−1)×(n−1)` symmetric matrix is
/// diagonalized with cyclic Jacobi rotations.
pub fn spectrum_orthogonal_to_ones(g: &SimpleGraph) -> Result<Vec<f64>> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::Structure(format!("need at least 2 vertices, got {n}")));
    }
    let t = match g.regular_degree() {
        Some(t) if t >= 1 => t,
        Some(_) => return Err(Error::Structure("graph has no edges".into())),
        None => return Err(Error::Structure("graph is not regular".into())),
    };
    if !g.is_connected() {
        return Err(Error::Structure("graph is disconnected".into()));
    }

    // Column k of the Helmert basis (k = 1..n-1): entries 0..k are 1, entry k is -k, scaled.
    let m = n - 1;
    let scale: Vec<f64> = (1..n).map(|k| 1.0 / ((k * (k + 1)) as f64).sqrt()).collect();
    let coef = |i: usize, col: usize| -> f64 {
        let k = col + 1;
        if i < k {
            scale[col]
        } else if i == k {
            -(k as f64) * scale[col]
        } else {
            0.0
        }
    };
    // W = (A/t) H, then B = Hᵀ W.
    let inv_t = 1.0 / t as f64;
    let mut w = vec![0.0; n * m];
    for i in 0..n {
        for col in 0..m {
            let s: f64 = g.neighbors(i).iter().map(|&j| coef(j, col)).sum();
            w[i * m + col] = s * inv_t;
        }
    }
    let mut b = vec![0.0; m * m];
    for r in 0..m {
        for c in 0..m {
            // Column r of H is nonzero only on rows 0..=r+1.
            b[r * m + c] = (0..=(r + 1).min(n - 1)).map(|i| coef(i, r) * w[i * m + c]).sum();
        }
    }
    for r in 0..m {
        for c in r + 1..m {
            let avg = 0.5 * (b[r * m + c] + b[c * m + r]);
            b[r * m + c] = avg;
            b[c * m + r] = avg;
        }
    }
    let mut eig = jacobi_eigenvalues(b, m);
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    /// Dense oracle: full eigendecomposition of A/t, dropping one eigenvalue 1.
    fn dense_second(g: &SimpleGraph) -> (f64, f64) {
        let n = g.num_vertices();
        let t = g.regular_degree().unwrap() as f64;
        let m = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 / t } else { 0.0 });
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev.pop(); // the trivial eigenvalue 1
        (ev.iter().fold(0.0f64, |a, x| a.max(x.abs())), *ev.last().unwrap())
    }

    #[test]
    fn complete_graph_closed_form() {
        for r in 3..=12 {
            let g = SimpleGraph::complete(r);
            let want = 1.0 / (r as f64 - 1.0);
            assert!((second_eigenvalue(&g).unwrap() - want).abs() < 1e-10);
            assert!((dense_second(&g).0 - want).abs() < 1e-10);
        }
    }

    #[test]
    fn cycle_signed_and_magnitude() {
        for n in 3..=14 {
            let g = SimpleGraph::cycle(n).unwrap();
            let signed = second_largest_eigenvalue(&g).unwrap();
            assert!((signed - (2.0 * PI / n as f64).cos()).abs() < 1e-10, "C_{n}");
            // most negative eigenvalue of C_n is cos(2π⌊n/2⌋/n)
            let most_negative = (2.0 * PI * (n / 2) as f64 / n as f64).cos();
            let want = (2.0 * PI / n as f64).cos().max(most_negative.abs());
            assert!((second_eigenvalue(&g).unwrap() - want).abs() < 1e-10, "C_{n}");
        }
    }

    #[test]
    fn matches_dense_on_small_regular_graphs() {
        let graphs = [
            SimpleGraph::cycle(9).unwrap(),
            SimpleGraph::complete(6),
            // Petersen graph
            SimpleGraph::from_edges(
                10,
                [
                    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                    (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                ],
            )
            .unwrap(),
            // 3-cube
            SimpleGraph::from_edges(8, (0..8).flat_map(|u| (0..3).map(move |b| (u, u ^ (1 << b)))).filter(|&(u, v)| u < v)).unwrap(),
        ];
        for g in &graphs {
            let (mag, signed) = dense_second(g);
            assert!((second_eigenvalue(g).unwrap() - mag).abs() < 1e-6);
            assert!((second_largest_eigenvalue(g).unwrap() - signed).abs() < 1e-6);
        }
    }

    #[test]
    fn structure_errors() {
        let two_triangles = SimpleGraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(matches!(second_eigenvalue(&two_triangles), Err(Error::Structure(_))));
        let path = SimpleGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(matches!(second_eigenvalue(&path), Err(Error::Structure(_))));
        assert!(second_eigenvalue(&SimpleGraph::empty(4)).is_err());
    }
}
