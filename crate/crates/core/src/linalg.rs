//! Thin layer over `faer` for the dense complex decompositions the solvers
//! need.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};

/// Eigenvalues and, optionally, right eigenvectors (one per column).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<c64>,
    pub vectors: Option<Mat<c64>>,
}

/// `A = U diag(s) V*` with `s` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat<c64>,
    pub s: Vec<f64>,
    pub v: Mat<c64>,
}

fn check_finite(a: MatRef<'_, c64>, what: &str) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::LinearAlgebra(format!(
                    "{what}: non-finite entry at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn lu_solve(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let x = a.partial_piv_lu().solve(b);
    check_finite(x.as_ref(), "LU solve").map_err(|_| {
        Error::LinearAlgebra("LU solve produced non-finite values (singular matrix)".into())
    })?;
    Ok(x)
}

/// Diagonal similarity `A ← D⁻¹ A D` with power-of-two entries that evens
/// out row and column norms. Returns `D`.
pub fn balance(a: &mut Mat<c64>) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut d = vec![1.0; n];
    let abs1 = |z: c64| z.re.abs() + z.im.abs();
    for _sweep in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(a[(j, i)]);
                    r += abs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                d[i] *= f;
                let gi = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= gi;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    d
}

/// Eigenvalues (and right eigenvectors when `vectors`) of a square matrix.
/// The matrix is balanced first; eigenvectors are returned for the original
/// matrix.
pub fn eig(mut a: Mat<c64>, vectors: bool) -> Result<EigenDecomposition> {
    check_finite(a.as_ref(), "eigenproblem")?;
    let d = balance(&mut a);
    if !vectors {
        let values = a
            .eigenvalues()
            .map_err(|e| Error::LinearAlgebra(format!("eigenvalue iteration failed: {e:?}")))?;
        return Ok(EigenDecomposition { values, vectors: None });
    }
    let evd = a
        .eigen()
        .map_err(|e| Error::LinearAlgebra(format!("eigenvalue iteration failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..a.nrows()).map(|i| s[i]).collect();
    let u = evd.U();
    let vecs = Mat::from_fn(a.nrows(), a.ncols(), |i, j| u[(i, j)] * d[i]);
    Ok(EigenDecomposition { values, vectors: Some(vecs) })
}

/// Singular values in descending order.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    check_finite(a, "singular values")?;
    let mut s = a
        .singular_values()
        .map_err(|e| Error::LinearAlgebra(format!("SVD failed: {e:?}")))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

fn svd_impl(a: MatRef<'_, c64>, thin: bool) -> Result<Svd> {
    check_finite(a, "SVD")?;
    let f = if thin { a.thin_svd() } else { a.svd() }
        .map_err(|e| Error::LinearAlgebra(format!("SVD failed: {e:?}")))?;
    let sd = f.S().column_vector();
    let k = sd.nrows();
    let raw: Vec<f64> = (0..k).map(|i| sd[i].re).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| raw[y].total_cmp(&raw[x]));
    let (fu, fv) = (f.U(), f.V());
    let perm = |m: MatRef<'_, c64>| {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
            m[(i, if j < k { order[j] } else { j })]
        })
    };
    Ok(Svd {
        u: perm(fu),
        s: order.iter().map(|&i| raw[i]).collect(),
        v: perm(fv),
    })
}

/// Thin SVD.
pub fn thin_svd(a: MatRef<'_, c64>) -> Result<Svd> {
    svd_impl(a, true)
}

/// Full SVD; `v` is square.
pub fn full_svd(a: MatRef<'_, c64>) -> Result<Svd> {
    svd_impl(a, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> Mat<c64> {
        Mat::from_fn(n, n, |i, j| {
            c64::new(
                ((i * 7 + j * 13) % 17) as f64 / 17.0 + if i == j { 2.0 } else { 0.0 },
                ((i * 3 + j * 5) % 11) as f64 / 11.0,
            )
        })
    }

    #[test]
    fn lu_solve_residual() {
        let a = test_matrix(20);
        let b = Mat::from_fn(20, 3, |i, j| c64::new(i as f64, j as f64));
        let x = lu_solve(a.as_ref(), b.as_ref()).unwrap();
        let r = &a * &x - &b;
        assert!(r.norm_max() < 1e-12);
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let mut a = test_matrix(30);
        // badly scaled rows and columns exercise the balancing path
        for i in 0..30 {
            let f = 2f64.powi(i as i32 - 15);
            for j in 0..30 {
                a[(i, j)] *= f;
                a[(j, i)] /= f;
            }
        }
        let e = eig(a.clone(), true).unwrap();
        let v = e.vectors.unwrap();
        for k in 0..30 {
            let col = v.col(k);
            let av = &a * col;
            let norm = col.norm_l2();
            let mut res: f64 = 0.0;
            for i in 0..30 {
                res = res.max((av[i] - e.values[k] * col[i]).norm());
            }
            assert!(res < 1e-9 * norm * a.norm_max().max(1.0), "k={k} res={res}");
        }
        let plain = eig(a, false).unwrap();
        let mut x: Vec<f64> = plain.values.iter().map(|z| z.re).collect();
        let mut y: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-10 * p.abs().max(1.0));
        }
    }

    #[test]
    fn balance_is_a_similarity() {
        let mut a = test_matrix(10);
        a[(0, 9)] *= 1e8;
        let trace: c64 = (0..10).map(|i| a[(i, i)]).sum();
        let mut b = a.clone();
        let d = balance(&mut b);
        let tb: c64 = (0..10).map(|i| b[(i, i)]).sum();
        assert!((trace - tb).norm() < 1e-12);
        for i in 0..10 {
            for j in 0..10 {
                let expect = a[(i, j)] * (d[j] / d[i]);
                assert!((b[(i, j)] - expect).norm() <= 1e-15 * expect.norm());
            }
        }
    }

    #[test]
    fn svd_reconstructs_and_sorts() {
        let a = test_matrix(12);
        let f = thin_svd(a.as_ref()).unwrap();
        for w in f.s.windows(2) {
            assert!(w[0] >= w[1]);
        }
        let s = Mat::from_fn(12, 12, |i, j| if i == j { c64::new(f.s[i], 0.0) } else { c64::new(0.0, 0.0) });
        let r = &f.u * &s * f.v.adjoint() - &a;
        assert!(r.norm_max() < 1e-12);
        let sv = singular_values(a.as_ref()).unwrap();
        for (x, y) in sv.iter().zip(&f.s) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn full_svd_null_space() {
        let a = Mat::from_fn(3, 8, |i, j| c64::new((i + 2 * j) as f64, (i * j) as f64 * 0.1));
        let f = full_svd(a.as_ref()).unwrap();
        assert_eq!(f.v.ncols(), 8);
        let z = f.v.subcols(3, 5);
        assert!((&a * z).norm_max() < 1e-12);
    }
}
