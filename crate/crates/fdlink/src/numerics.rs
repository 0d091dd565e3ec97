//! Complex linear algebra and scalar helpers shared by the whole pipeline.
//!
//! Everything operates on dynamically sized `Complex<f64>` matrices. The
//! decompositions delegate to `nalgebra`; the wrappers fix ordering
//! conventions (singular values descending), enforce conditioning limits, and
//! map numerical failure modes onto [`crate::Error`].

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Condition-number ceiling beyond which Hermitian solves are refused.
pub const COND_LIMIT: f64 = 1e12;

/// Converts a power level in dBm to linear milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts a power ratio in dB to a linear factor.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Right singular subspace of a complex matrix.
pub struct SvdRight {
    /// Singular values in descending order.
    pub values: Vec<f64>,
    /// Right singular vectors as columns, ordered like `values`.
    pub v: CMat,
}

/// Full set of right singular vectors, descending singular-value order.
///
/// `v` always has as many columns as `m` has columns; for wide or rank
/// deficient inputs the trailing columns span the (numerical) null space.
pub fn svd_right(m: &CMat) -> SvdRight {
    let svd = m.clone().svd(false, true);
    let v_t = svd
        .v_t
        .expect("right singular vectors were requested from the decomposition");
    let mut v = v_t.adjoint();
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    // nalgebra does not promise an ordering; sort columns ourselves.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let sorted_v = CMat::from_columns(&order.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v = sorted_v;
    // A wide matrix has fewer singular values than columns; nalgebra's thin
    // V^H omits the null-space columns, so complete the basis when needed.
    if v.ncols() < m.ncols() {
        v = complete_basis(&v, m.ncols());
        values.resize(m.ncols(), 0.0);
    }
    SvdRight { values, v }
}

/// Extends a column-orthonormal matrix to a full orthonormal basis by
/// Gram-Schmidt over the standard basis vectors.
fn complete_basis(v: &CMat, dim: usize) -> CMat {
    let mut cols: Vec<CVec> = v.column_iter().map(|c| c.into_owned()).collect();
    let mut e = 0usize;
    while cols.len() < dim {
        let mut cand = CVec::zeros(dim);
        cand[e] = C64::new(1.0, 0.0);
        e += 1;
        for c in &cols {
            let proj = c.dotc(&cand);
            cand -= c * proj;
        }
        let norm = cand.norm();
        if norm > 1e-8 {
            cols.push(cand / C64::new(norm, 0.0));
        }
    }
    CMat::from_columns(&cols.iter().map(|c| c.column(0)).collect::<Vec<_>>())
}

/// Solves `A X = B` for Hermitian `A` via eigendecomposition.
///
/// Refuses matrices with condition number above [`COND_LIMIT`].
pub fn hermitian_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let mut max_ev = 0f64;
    let mut min_ev = f64::INFINITY;
    for &ev in eig.eigenvalues.iter() {
        max_ev = max_ev.max(ev.abs());
        min_ev = min_ev.min(ev.abs());
    }
    let cond = if min_ev == 0.0 {
        f64::INFINITY
    } else {
        max_ev / min_ev
    };
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(Error::IllConditioned { cond });
    }
    // X = Q diag(1/lambda) Q^H B
    let qh_b = eig.eigenvectors.adjoint() * b;
    let mut scaled = qh_b;
    for (i, &ev) in eig.eigenvalues.iter().enumerate() {
        let inv = C64::new(1.0 / ev, 0.0);
        scaled.row_mut(i).iter_mut().for_each(|x| *x *= inv);
    }
    Ok(&eig.eigenvectors * scaled)
}

/// Base-2 log determinant of a Hermitian positive definite matrix.
///
/// Uses a Cholesky factorization (never cofactor expansion); failure to
/// factor reports [`Error::NotPositiveDefinite`].
pub fn log_det_hermitian(a: &CMat) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        // A positive pivot yields an essentially real diagonal entry; a
        // negative pivot surfaces as the complex square root of a negative
        // number, whose real part is only a rounding residue. Requiring the
        // real part to dominate rejects that case robustly.
        if !(d.re > 0.0) || !d.re.is_finite() || d.im.abs() >= d.re {
            return Err(Error::NotPositiveDefinite);
        }
        acc += d.re.ln();
    }
    Ok(2.0 * acc / std::f64::consts::LN_2)
}

/// Zeroth-order Bessel function of the first kind.
///
/// Power series for small arguments, Hankel asymptotic expansion beyond;
/// absolute error stays below 1e-8 on `|x| <= 50`.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 12.0 {
        // J0(x) = sum_k (-1)^k (x^2/4)^k / (k!)^2
        let q = ax * ax / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        // J0(x) ~ sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)]
        let inv2 = 1.0 / (ax * ax);
        let p = 1.0
            + inv2 * (-9.0 / 128.0 + inv2 * (3675.0 / 32768.0 + inv2 * (-2_401_245.0 / 4_194_304.0)));
        let q = (1.0 / ax)
            * (-0.125
                + inv2
                    * (75.0 / 1024.0
                        + inv2 * (-59535.0 / 262_144.0 + inv2 * (57_972_915.0 / 33_554_432.0))));
        let chi = ax - std::f64::consts::FRAC_PI_4;
        (2.0 / (std::f64::consts::PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Frobenius norm squared.
pub fn fro_norm_sq(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum()
}

/// Hermitian-symmetrizes a matrix that is Hermitian up to rounding error.
pub fn hermitianize(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|c| c * 0.5)
}

/// Identity matrix scaled by a real factor.
pub fn scaled_eye(n: usize, s: f64) -> CMat {
    CMat::from_diagonal_element(n, n, C64::new(s, 0.0))
}
