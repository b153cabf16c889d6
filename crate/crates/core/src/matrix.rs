//! Dense linear algebra at desk scale: scalar matrices over a coefficient
//! ring, determinants of series matrices, and f64-complex determinants for
//! point evaluation.

use num::complex::Complex64;

use crate::error::{KErr, KResult};
use crate::scalar::{CoeffMode, Scalar};
use crate::series::BiSeries;

pub type Mat<C> = Vec<Vec<C>>;

pub fn identity_mat<C: Scalar>(n: usize) -> Mat<C> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { C::one() } else { C::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose<C: Scalar>(a: &Mat<C>) -> Mat<C> {
    let (r, c) = (a.len(), a[0].len());
    (0..c)
        .map(|j| (0..r).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn mat_mul<C: Scalar>(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    let (r, mid, c) = (a.len(), b.len(), b[0].len());
    assert!(a.iter().all(|row| row.len() == mid), "mat_mul shape");
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| {
                    let mut acc = C::zero();
                    for (k, brow) in b.iter().enumerate() {
                        acc = acc + a[i][k].clone() * brow[j].clone();
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse. Exact mode pivots on the first nonzero entry; float
/// mode on the largest magnitude.
pub fn mat_inv<C: Scalar>(a: &Mat<C>) -> KResult<Mat<C>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n), "mat_inv: square input");
    let mut m: Mat<C> = a.clone();
    let mut inv = identity_mat::<C>(n);
    for col in 0..n {
        let pivot_row = match C::MODE {
            CoeffMode::Exact => (col..n).find(|&r| !m[r][col].is_zero()),
            CoeffMode::Float => (col..n)
                .filter(|&r| !m[r][col].is_zero())
                .max_by(|&x, &y| m[x][col].abs_f64().total_cmp(&m[y][col].abs_f64())),
        }
        .ok_or(KErr::SingularLinearPart)?;
        m.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = m[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                m[r][j] = m[r][j].clone() - f.clone() * m[col][j].clone();
                inv[r][j] = inv[r][j].clone() - f.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Row rank by Gaussian elimination. Float mode treats entries within tol of
/// zero as zero (exact mode ignores tol); pivots on largest magnitude.
pub fn rank<C: Scalar>(a: &Mat<C>, tol: f64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut m = a.clone();
    let mut r = 0usize;
    for col in 0..cols {
        let pivot = (r..rows)
            .filter(|&i| !m[i][col].approx_zero(tol))
            .max_by(|&x, &y| m[x][col].abs_f64().total_cmp(&m[y][col].abs_f64()));
        let Some(p) = pivot else { continue };
        m.swap(r, p);
        let pv = m[r][col].clone();
        for i in (r + 1)..rows {
            if m[i][col].approx_zero(tol) {
                continue;
            }
            let f = m[i][col].clone() / pv.clone();
            for j in col..cols {
                m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// LDL^T of a symmetric positive-definite matrix: h = l d l^T with l unit
/// lower triangular. Fails with the offending pivot index when h is not
/// positive definite. Division-only, so it stays exact in exact mode.
pub fn ldlt<C: Scalar>(h: &Mat<C>) -> KResult<(Mat<C>, Vec<C>)> {
    let n = h.len();
    let mut l = identity_mat::<C>(n);
    let mut d = vec![C::zero(); n];
    for jcol in 0..n {
        let mut dj = h[jcol][jcol].clone();
        for k in 0..jcol {
            dj = dj - l[jcol][k].clone() * l[jcol][k].clone() * d[k].clone();
        }
        if !dj.is_positive() {
            return Err(KErr::IndefiniteQuadraticPart(jcol));
        }
        d[jcol] = dj;
        for i in (jcol + 1)..n {
            let mut v = h[i][jcol].clone();
            for k in 0..jcol {
                v = v - l[i][k].clone() * l[jcol][k].clone() * d[k].clone();
            }
            l[i][jcol] = v / d[jcol].clone();
        }
    }
    Ok((l, d))
}

/// Multiplicative inverse of a series with invertible (nonzero) constant
/// term: (c(1+u))^{-1} = c^{-1} sum (-u)^p, truncated.
pub fn series_inverse<C: Scalar>(b: &BiSeries<C>) -> KResult<BiSeries<C>> {
    let c = b.constant_term();
    if c.is_zero() {
        return Err(KErr::Invalid(
            "series inverse needs a nonzero constant term".into(),
        ));
    }
    let cinv = C::one() / c;
    let u = b.scale(&cinv).without_constant_term(); // b/c = 1 + u
    let mut acc = BiSeries::one(b.dim(), b.order());
    let mut p = BiSeries::one(b.dim(), b.order());
    for _ in 0..b.order() {
        p = p.mul(&u).neg();
        if p.is_zero_series() {
            break;
        }
        acc = acc.add(&p);
    }
    Ok(acc.scale(&cinv))
}

pub fn series_div<C: Scalar>(a: &BiSeries<C>, b: &BiSeries<C>) -> KResult<BiSeries<C>> {
    Ok(a.mul(&series_inverse(b)?))
}

/// Determinant of a square matrix of series. Recursive cofactor expansion for
/// n <= 4; division-free-style Bareiss elimination (with exact series
/// division by unit-constant pivots) above, falling back to cofactor when a
/// pivot is not a unit.
pub fn det_series<C: Scalar>(m: &[Vec<BiSeries<C>>]) -> BiSeries<C> {
    let n = m.len();
    assert!(n > 0, "det of empty matrix");
    assert!(m.iter().all(|row| row.len() == n), "det: square input");
    if n <= 4 {
        return det_cofactor(m);
    }
    match det_bareiss(m) {
        Some(d) => d,
        None => det_cofactor(m),
    }
}

fn det_cofactor<C: Scalar>(m: &[Vec<BiSeries<C>>]) -> BiSeries<C> {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = BiSeries::zero(m[0][0].dim(), m[0][0].order());
    for col in 0..n {
        if m[0][col].is_zero_series() {
            continue;
        }
        let minor: Vec<Vec<BiSeries<C>>> = (1..n)
            .map(|r| {
                (0..n)
                    .filter(|&c| c != col)
                    .map(|c| m[r][c].clone())
                    .collect()
            })
            .collect();
        let term = m[0][col].mul(&det_cofactor(&minor));
        acc = if col % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Bareiss: a[i][j] <- (a[k][k] a[i][j] - a[i][k] a[k][j]) / prev_pivot; the
/// divisions are exact over the series ring when every pivot has a nonzero
/// constant term (true for jets of positive-definite metrics, whose pivot
/// constants are leading principal minors). Returns None when a pivot is not
/// a unit so the caller can fall back.
fn det_bareiss<C: Scalar>(m: &[Vec<BiSeries<C>>]) -> Option<BiSeries<C>> {
    let n = m.len();
    let mut a: Vec<Vec<BiSeries<C>>> = m.to_vec();
    let mut prev = BiSeries::one(m[0][0].dim(), m[0][0].order());
    for k in 0..n - 1 {
        if a[k][k].constant_term().is_zero() {
            return None;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = series_div(&num, &prev).ok()?;
            }
        }
        prev = a[k][k].clone();
    }
    Some(a[n - 1][n - 1].clone())
}

/// LU determinant of a complex matrix (partial pivoting); used at point
/// evaluation only.
pub fn cmat_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].norm_sqr().total_cmp(&a[y][col].norm_sqr()))
            .unwrap();
        if a[pivot][col].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for j in col..n {
                let sub = f * a[col][j];
                a[r][j] -= sub;
            }
        }
    }
    det
}
