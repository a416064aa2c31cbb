use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Dense complex solve by partial-pivot LU.
pub fn solve_dense(matrix: DMatrix<C64>, rhs: &[C64]) -> Result<Vec<C64>> {
    let b = DVector::from_column_slice(rhs);
    matrix
        .lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Accuracy("singular integral-equation matrix".into()))
}

/// Real least squares `min |A x - b|` through SVD.
pub fn lstsq_real(matrix: DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let b = DVector::from_column_slice(rhs);
    let svd = matrix.svd(true, true);
    let eps = svd.singular_values.max() * 1e-14;
    svd.solve(&b, eps)
        .map(|x| x.iter().copied().collect())
        .map_err(|e| Error::Accuracy(format!("least squares failed: {e}")))
}

#[derive(Debug, Clone, Copy)]
pub struct GmresReport {
    pub iterations: usize,
    pub residual: f64,
}

/// Restarted GMRES with modified Gram-Schmidt.
pub fn gmres(
    apply: impl Fn(&[C64], &mut [C64]),
    rhs: &[C64],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<(Vec<C64>, GmresReport)> {
    let n = rhs.len();
    let norm = |v: &[C64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let bnorm = norm(rhs).max(f64::MIN_POSITIVE);
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    let mut total = 0;
    loop {
        apply(&x, &mut scratch);
        let r: Vec<C64> = rhs.iter().zip(&scratch).map(|(b, ax)| b - ax).collect();
        let beta = norm(&r);
        if beta / bnorm <= tol {
            return Ok((x, GmresReport { iterations: total, residual: beta / bnorm }));
        }
        if total >= max_iter {
            return Err(Error::NonConvergence { iterations: total, residual: beta / bnorm });
        }
        let m = restart.min(max_iter - total).max(1);
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess = vec![vec![C64::new(0.0, 0.0); m]; m + 1];
        let mut cs = vec![C64::new(0.0, 0.0); m];
        let mut sn = vec![C64::new(0.0, 0.0); m];
        let mut g = vec![C64::new(0.0, 0.0); m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..m {
            let mut w = vec![C64::new(0.0, 0.0); n];
            apply(&basis[j], &mut w);
            for (i, v) in basis.iter().enumerate() {
                let h: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                hess[i][j] = h;
                w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= h * vk);
            }
            let hn = norm(&w);
            hess[j + 1][j] = C64::new(hn, 0.0);
            for i in 0..j {
                let tmp = cs[i].conj() * hess[i][j] + sn[i].conj() * hess[i + 1][j];
                hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
                hess[i][j] = tmp;
            }
            let (a, b) = (hess[j][j], hess[j + 1][j]);
            let denom = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if denom == 0.0 {
                used = j;
                break;
            }
            cs[j] = a / denom;
            sn[j] = b / denom;
            hess[j][j] = C64::new(denom, 0.0);
            hess[j + 1][j] = C64::new(0.0, 0.0);
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j].conj() * g[j];
            used = j + 1;
            total += 1;
            if g[j + 1].norm() / bnorm <= tol * 0.5 || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        let mut y = vec![C64::new(0.0, 0.0); used];
        for i in (0..used).rev() {
            let mut acc = g[i];
            for k in i + 1..used {
                acc -= hess[i][k] * y[k];
            }
            y[i] = acc / hess[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[k]).for_each(|(xi, vi)| *xi += yk * vi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gmres_matches_dense_solve_on_shifted_skew_system() {
        let n = 40;
        let mut a = DMatrix::<C64>::identity(n, n);
        for i in 0..n {
            for j in 0..i {
                let v = C64::new(((i * 7 + j) as f64).sin(), ((i + 3 * j) as f64).cos()) * 0.3;
                a[(i, j)] += v;
                a[(j, i)] -= v.conj();
            }
        }
        let b: Vec<C64> = (0..n).map(|i| C64::new(1.0, i as f64 * 0.1)).collect();
        let dense = solve_dense(a.clone(), &b).unwrap();
        let (x, report) = gmres(
            |v, out| {
                let r = &a * DVector::from_column_slice(v);
                out.copy_from_slice(r.as_slice());
            },
            &b,
            1e-13,
            15,
            500,
        )
        .unwrap();
        assert!(report.residual <= 1e-13);
        for (p, q) in x.iter().zip(&dense) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn lstsq_recovers_line() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let x = lstsq_real(a, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
