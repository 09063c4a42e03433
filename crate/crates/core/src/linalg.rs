//! Dense linear-algebra helpers shared by the operator modules.
//!
//! All decompositions go through nalgebra; this module only fixes orderings
//! and conventions (descending singular values, ascending eigenvalues,
//! positive-definite diagonal blocks) so that results are deterministic.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// Thin SVD with singular values sorted in descending order.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

/// Relative size below which entries are dropped before a decomposition.
///
/// nalgebra's iterations underflow (and return NaN) on matrices whose
/// entries span hundreds of orders of magnitude, which happens for Hankel
/// matrices of decaying series. Dropping entries below `1e-40` of the
/// largest one is a perturbation far below rounding error.
const NEGLIGIBLE: f64 = 1e-40;

/// `m / scale` with negligible entries zeroed, and `scale` (zero for a zero
/// matrix).
fn conditioned(m: &DMatrix<f64>, floor: f64) -> (DMatrix<f64>, f64) {
    let scale = m.amax();
    if scale == 0.0 || !scale.is_finite() {
        return (m.clone(), if scale == 0.0 { 0.0 } else { 1.0 });
    }
    (m.map(|x| if x.abs() < floor * scale { 0.0 } else { x / scale }), scale)
}

/// Relative reconstruction and orthogonality tolerance an SVD must meet.
const SVD_CHECK_TOL: f64 = 1e-11;

pub fn svd(m: &DMatrix<f64>) -> SortedSvd {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return SortedSvd {
            u: DMatrix::zeros(r, 0),
            singular_values: DVector::zeros(0),
            v_t: DMatrix::zeros(0, c),
        };
    }
    let (a, scale) = conditioned(m, NEGLIGIBLE);
    if scale == 0.0 {
        let k = r.min(c);
        return SortedSvd {
            u: DMatrix::identity(r, k),
            singular_values: DVector::zeros(k),
            v_t: DMatrix::identity(k, c),
        };
    }
    let mut d = svd_unit(&a);
    d.singular_values *= scale;
    d
}

fn svd_unit(m: &DMatrix<f64>) -> SortedSvd {
    // nalgebra's Golub-Kahan iteration occasionally returns inaccurate
    // vectors; each candidate is checked before use.
    let dec = m.clone().svd(true, true);
    let direct = sorted(dec.u.expect("requested U"), dec.singular_values, dec.v_t.expect("requested V^T"));
    if svd_accurate(m, &direct) {
        return direct;
    }
    let dec = m.transpose().svd(true, true);
    let flipped = sorted(
        dec.v_t.expect("requested V^T").transpose(),
        dec.singular_values,
        dec.u.expect("requested U").transpose(),
    );
    if svd_accurate(m, &flipped) {
        return flipped;
    }
    svd_by_eigen(m)
}

fn sorted(u: DMatrix<f64>, s: DVector<f64>, v_t: DMatrix<f64>) -> SortedSvd {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let k = order.len();
    let mut su = DMatrix::zeros(u.nrows(), k);
    let mut sv = DMatrix::zeros(k, v_t.ncols());
    let mut ss = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        su.set_column(dst, &u.column(src));
        sv.set_row(dst, &v_t.row(src));
        ss[dst] = s[src];
    }
    SortedSvd { u: su, singular_values: ss, v_t: sv }
}

fn svd_accurate(m: &DMatrix<f64>, d: &SortedSvd) -> bool {
    let k = d.singular_values.len();
    if d.singular_values.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return false;
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let rebuilt = &d.u * DMatrix::from_diagonal(&d.singular_values) * &d.v_t;
    let eye = DMatrix::<f64>::identity(k, k);
    (rebuilt - m).norm() <= SVD_CHECK_TOL * scale
        && (d.u.transpose() * &d.u - &eye).norm() <= SVD_CHECK_TOL * k as f64
        && (&d.v_t * d.v_t.transpose() - &eye).norm() <= SVD_CHECK_TOL * k as f64
}

/// Orthonormal basis of the complement of the (orthonormal) columns of `q`.
fn orthogonal_complement(q: &DMatrix<f64>, dim: usize, count: usize) -> DMatrix<f64> {
    let proj = DMatrix::<f64>::identity(dim, dim) - q * q.transpose();
    let (_, vecs) = symmetric_eigen(&proj);
    vecs.columns(dim - count, count).into_owned()
}

/// SVD from the symmetric eigenproblem of `[[0, A], [Aᵀ, 0]]`, whose
/// eigenvalues are `±σ` with eigenvectors `(u; ±v)/√2`.
fn svd_by_eigen(m: &DMatrix<f64>) -> SortedSvd {
    let (r, c) = m.shape();
    if c > r {
        let t = svd_by_eigen(&m.transpose());
        return SortedSvd {
            u: t.v_t.transpose(),
            singular_values: t.singular_values,
            v_t: t.u.transpose(),
        };
    }
    let k = c;
    let mut jw = DMatrix::zeros(r + c, r + c);
    jw.view_mut((0, r), (r, c)).copy_from(m);
    jw.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let (vals, vecs) = symmetric_eigen(&jw);
    let floor = 1e-13 * m.norm();
    let mut u_good = Vec::new();
    let mut v_good = Vec::new();
    let mut s_good = Vec::new();
    for idx in (r + c - k..r + c).rev() {
        if vals[idx] <= floor {
            break;
        }
        let x = vecs.view((0, idx), (r, 1)).into_owned();
        let y = vecs.view((r, idx), (c, 1)).into_owned();
        u_good.push(&x / x.norm());
        v_good.push(&y / y.norm());
        s_good.push(vals[idx]);
    }
    let g = s_good.len();
    let mut u = DMatrix::zeros(r, k);
    let mut v = DMatrix::zeros(c, k);
    for i in 0..g {
        u.set_column(i, &u_good[i].column(0));
        v.set_column(i, &v_good[i].column(0));
    }
    if g < k {
        let uc = orthogonal_complement(&u.columns(0, g).into_owned(), r, k - g);
        let vc = orthogonal_complement(&v.columns(0, g).into_owned(), c, k - g);
        u.columns_mut(g, k - g).copy_from(&uc);
        v.columns_mut(g, k - g).copy_from(&vc);
    }
    let mut s = DVector::zeros(k);
    for (i, val) in s_good.iter().enumerate() {
        s[i] = *val;
    }
    SortedSvd { u, singular_values: s, v_t: v.transpose() }
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    svd(m).singular_values.iter().copied().collect()
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a square (or tall) matrix; uses `min(r, c)` values.
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Symmetric eigendecomposition with eigenvalues in ascending order.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let (a, scale) = conditioned(&sym, NEGLIGIBLE);
    let mut dec = a.clone().symmetric_eigen();
    if !eigen_accurate(&a, &dec) {
        dec = conditioned(&a, 1e-20).0.symmetric_eigen();
    }
    dec.eigenvalues *= scale;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        dec.eigenvalues[a]
            .total_cmp(&dec.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let mut vals = DVector::zeros(n);
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vals[dst] = dec.eigenvalues[src];
        vecs.set_column(dst, &dec.eigenvectors.column(src));
    }
    (vals, vecs)
}

fn eigen_accurate(m: &DMatrix<f64>, dec: &nalgebra::SymmetricEigen<f64, nalgebra::Dyn>) -> bool {
    if dec.eigenvalues.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let rebuilt = &dec.eigenvectors * DMatrix::from_diagonal(&dec.eigenvalues) * dec.eigenvectors.transpose();
    (rebuilt - m).norm() <= SVD_CHECK_TOL * m.norm().max(f64::MIN_POSITIVE)
}

/// Lower-triangular `L` with positive diagonal and `m = L Lᵀ`.
pub fn cholesky_lower(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    sym.cholesky().map(|c| c.unpack())
}

/// Lower-triangular `A` with positive diagonal and `m = Aᵀ A`.
///
/// This is the Cholesky factorization taken in reversed index order.
pub fn reversed_cholesky(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    let flipped = DMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)]);
    let l = cholesky_lower(&flipped)?;
    // m = J L Lᵀ J, so A = J Lᵀ J is lower triangular with m = Aᵀ A.
    Some(DMatrix::from_fn(n, n, |i, j| l[(n - 1 - j, n - 1 - i)]))
}

/// Orthogonal factor `O` of the polar decomposition `m = O H`, `H` symmetric
/// positive semi-definite.
pub fn polar_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let dec = svd(m);
    &dec.u * &dec.v_t
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

/// Spectral norm of `m - I`.
pub fn distance_to_identity(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    spectral_norm(&(m - DMatrix::<f64>::identity(n, m.ncols())))
}
