//! Normalized coprime factorizations and their doubly-coprime completion.
//!
//! For a causal plant `P` the right factors satisfy `P = N M⁻¹`,
//! `MᵀM + NᵀN = I`; the left factors satisfy `P = M̂⁻¹ N̂`,
//! `M̂M̂ᵀ + N̂N̂ᵀ = I`. Both come from triangular factorizations of
//! `I + PᵀP` (in reversed time order) and `I + PPᵀ`, so the inverses of `M`
//! and `M̂` are causal by construction.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::LtvOperator;
use crate::{IDENTITY_TOL, STRUCTURAL_TOL};

/// Threshold below which a factorization is accepted.
pub const ACCEPT_TOL: f64 = IDENTITY_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FactorizationResiduals {
    /// `‖MᵀM + NᵀN − I‖`
    pub rcf_isometry: f64,
    /// `‖M̂M̂ᵀ + N̂N̂ᵀ − I‖`
    pub lcf_coisometry: f64,
    /// `‖[V̂ −Û; −N̂ M̂][M U; N V] − I‖`
    pub doubly_coprime_left: f64,
    /// `‖[M U; N V][V̂ −Û; −N̂ M̂] − I‖`
    pub doubly_coprime_right: f64,
    /// `‖N M⁻¹ − P‖`
    pub quotient_right: f64,
    /// `‖M̂⁻¹ N̂ − P‖`
    pub quotient_left: f64,
    /// Largest entry above the block diagonal among the eight factors.
    pub causality: f64,
}

impl FactorizationResiduals {
    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    pub fn accepted(&self) -> bool {
        self.max() < ACCEPT_TOL
    }

    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("rcf_isometry", self.rcf_isometry),
            ("lcf_coisometry", self.lcf_coisometry),
            ("doubly_coprime_left", self.doubly_coprime_left),
            ("doubly_coprime_right", self.doubly_coprime_right),
            ("quotient_right", self.quotient_right),
            ("quotient_left", self.quotient_left),
            ("causality", self.causality),
        ]
    }
}

/// The eight causal operators of a doubly-coprime factorization.
///
/// Spaces: `M, V̂ : U → U`, `N : U → Y`, `M̂, V : Y → Y`, `N̂ : U → Y`,
/// `U, Û : Y → U`, where `U` is the plant input space and `Y` its output
/// space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoprimeFactorization {
    pub plant: LtvOperator,
    pub m: LtvOperator,
    pub n: LtvOperator,
    pub m_hat: LtvOperator,
    pub n_hat: LtvOperator,
    pub u: LtvOperator,
    pub v: LtvOperator,
    pub u_hat: LtvOperator,
    pub v_hat: LtvOperator,
    pub residuals: FactorizationResiduals,
}

fn check_causal(p: &LtvOperator) -> Result<()> {
    let scale = p.matrix().amax().max(1.0);
    let anti = p.anticausal_magnitude();
    if anti > STRUCTURAL_TOL * scale {
        return Err(Error::NotCausal(anti));
    }
    Ok(())
}

/// Replaces each diagonal block `D` by its positive-definite polar factor,
/// multiplying block rows (`rows = true`) or block columns by orthogonal
/// blocks.
fn symmetrize_diagonal_blocks(a: &mut LtvOperator, rows: bool) -> Result<()> {
    let t = a.horizon();
    let domain = a.domain().clone();
    let codomain = a.codomain().clone();
    let mut data = a.matrix().clone();
    for k in 0..t {
        let o = linalg::polar_orthogonal(&a.block(k, k).into_owned());
        if rows {
            let r = codomain.range(k);
            let strip = data.rows(r.start, r.len()).into_owned();
            data.rows_mut(r.start, r.len()).copy_from(&(o.transpose() * strip));
        } else {
            let c = domain.range(k);
            let strip = data.columns(c.start, c.len()).into_owned();
            data.columns_mut(c.start, c.len()).copy_from(&(strip * o.transpose()));
        }
    }
    *a = a.with_matrix(data)?;
    Ok(())
}

/// Normalized right coprime factors `(M, N)` of a causal plant.
pub fn normalized_rcf(plant: &LtvOperator) -> Result<(LtvOperator, LtvOperator)> {
    check_causal(plant)?;
    let inputs = plant.domain().clone();
    let p = plant.matrix();
    let w = DMatrix::identity(inputs.total_dim(), inputs.total_dim()) + p.transpose() * p;
    let a = linalg::reversed_cholesky(&w)
        .ok_or_else(|| Error::Verification {
            what: "I + PᵀP positive definite".into(),
            residual: f64::NAN,
            tol: 0.0,
        })?;
    let mut a = LtvOperator::new(inputs.clone(), inputs, a)?;
    symmetrize_diagonal_blocks(&mut a, true)?;
    let m = a.solve_causal_inverse()?;
    let n = plant.compose(&m)?;
    Ok((m, n))
}

/// Normalized left coprime factors `(M̂, N̂)` of a causal plant.
pub fn normalized_lcf(plant: &LtvOperator) -> Result<(LtvOperator, LtvOperator)> {
    check_causal(plant)?;
    let outputs = plant.codomain().clone();
    let p = plant.matrix();
    let w = DMatrix::identity(outputs.total_dim(), outputs.total_dim()) + p * p.transpose();
    let l = linalg::cholesky_lower(&w).ok_or_else(|| Error::Verification {
        what: "I + PPᵀ positive definite".into(),
        residual: f64::NAN,
        tol: 0.0,
    })?;
    let mut a = LtvOperator::new(outputs.clone(), outputs, l)?;
    symmetrize_diagonal_blocks(&mut a, false)?;
    let m_hat = a.solve_causal_inverse()?;
    let n_hat = m_hat.compose(plant)?;
    Ok((m_hat, n_hat))
}

/// Completion `(U, V, Û, V̂)` with `U = Û = 0`, `V = M̂⁻¹`, `V̂ = M⁻¹`.
///
/// At a finite horizon the zero controller stabilizes every causal plant,
/// which is what makes this completion valid.
pub fn bezout_completion(
    m: &LtvOperator,
    _n: &LtvOperator,
    m_hat: &LtvOperator,
    _n_hat: &LtvOperator,
) -> Result<(LtvOperator, LtvOperator, LtvOperator, LtvOperator)> {
    let inputs = m.domain().clone();
    let outputs = m_hat.domain().clone();
    let u = LtvOperator::zeros(outputs.clone(), inputs.clone());
    let u_hat = LtvOperator::zeros(outputs, inputs);
    let v = m_hat.solve_causal_inverse()?;
    let v_hat = m.solve_causal_inverse()?;
    Ok((u, v, u_hat, v_hat))
}

/// Dense `[[a, b], [c, d]]`.
pub(crate) fn block2(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let (r1, c1) = a.shape();
    let (r2, c2) = d.shape();
    let mut out = DMatrix::zeros(r1 + r2, c1 + c2);
    out.view_mut((0, 0), (r1, c1)).copy_from(a);
    out.view_mut((0, c1), (r1, c2)).copy_from(b);
    out.view_mut((r1, 0), (r2, c1)).copy_from(c);
    out.view_mut((r1, c1), (r2, c2)).copy_from(d);
    out
}

/// Dense vertical stack of matrices with equal column counts.
pub(crate) fn vstack(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols = parts.first().map_or(0, |p| p.ncols());
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for p in parts {
        out.view_mut((r, 0), (p.nrows(), cols)).copy_from(p);
        r += p.nrows();
    }
    out
}

/// Dense horizontal stack of matrices with equal row counts.
pub(crate) fn hstack(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = parts.first().map_or(0, |p| p.nrows());
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for p in parts {
        out.view_mut((0, c), (rows, p.ncols())).copy_from(p);
        c += p.ncols();
    }
    out
}

/// Evaluates every named residual of a factorization.
pub fn verify_doubly_coprime(f: &CoprimeFactorization) -> FactorizationResiduals {
    let (m, n, mh, nh) = (f.m.matrix(), f.n.matrix(), f.m_hat.matrix(), f.n_hat.matrix());
    let (u, v, uh, vh) = (f.u.matrix(), f.v.matrix(), f.u_hat.matrix(), f.v_hat.matrix());
    let du = m.ncols();
    let dy = mh.ncols();

    let rcf_isometry = linalg::distance_to_identity(&(m.transpose() * m + n.transpose() * n));
    let lcf_coisometry = linalg::distance_to_identity(&(mh * mh.transpose() + nh * nh.transpose()));

    let left = block2(vh, &(-uh), &(-nh), mh);
    let right = block2(m, u, n, v);
    let doubly_coprime_left = linalg::distance_to_identity(&(&left * &right));
    let doubly_coprime_right = linalg::distance_to_identity(&(&right * &left));
    debug_assert_eq!(right.nrows(), du + dy);

    let p = f.plant.matrix();
    let quotient = |inv: Result<LtvOperator>, rebuild: &dyn Fn(&DMatrix<f64>) -> DMatrix<f64>| match inv {
        Ok(inv) => linalg::spectral_norm(&(rebuild(inv.matrix()) - p)),
        Err(_) => f64::INFINITY,
    };
    let quotient_right = quotient(f.m.solve_causal_inverse(), &|mi| n * mi);
    let quotient_left = quotient(f.m_hat.solve_causal_inverse(), &|mhi| mhi * nh);

    let causality = [&f.m, &f.n, &f.m_hat, &f.n_hat, &f.u, &f.v, &f.u_hat, &f.v_hat]
        .iter()
        .map(|op| op.anticausal_magnitude())
        .fold(0.0, f64::max);

    FactorizationResiduals {
        rcf_isometry,
        lcf_coisometry,
        doubly_coprime_left,
        doubly_coprime_right,
        quotient_right,
        quotient_left,
        causality,
    }
}

impl CoprimeFactorization {
    /// Assembles a factorization from its parts and evaluates its residuals.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        plant: LtvOperator,
        m: LtvOperator,
        n: LtvOperator,
        m_hat: LtvOperator,
        n_hat: LtvOperator,
        u: LtvOperator,
        v: LtvOperator,
        u_hat: LtvOperator,
        v_hat: LtvOperator,
    ) -> Self {
        let mut f = CoprimeFactorization {
            plant,
            m,
            n,
            m_hat,
            n_hat,
            u,
            v,
            u_hat,
            v_hat,
            residuals: FactorizationResiduals::default(),
        };
        f.residuals = verify_doubly_coprime(&f);
        f
    }

    /// Another valid completion: `U + MQ`, `V + NQ`, `Û + QM̂`, `V̂ + QN̂`
    /// for a causal `Q : Y → U`.
    pub fn with_youla_shift(&self, q: &LtvOperator) -> Result<Self> {
        if q.domain() != self.u.domain() || q.codomain() != self.u.codomain() {
            return Err(Error::dims("Youla parameter must map outputs to inputs"));
        }
        check_causal(q)?;
        let u = self.u.add(&self.m.compose(q)?)?;
        let v = self.v.add(&self.n.compose(q)?)?;
        let u_hat = self.u_hat.add(&q.compose(&self.m_hat)?)?;
        let v_hat = self.v_hat.add(&q.compose(&self.n_hat)?)?;
        Ok(CoprimeFactorization::from_parts(
            self.plant.clone(),
            self.m.clone(),
            self.n.clone(),
            self.m_hat.clone(),
            self.n_hat.clone(),
            u,
            v,
            u_hat,
            v_hat,
        ))
    }

    /// Dense `[M; N]`.
    pub fn right_graph(&self) -> DMatrix<f64> {
        vstack(&[self.m.matrix(), self.n.matrix()])
    }

    pub fn inputs(&self) -> &crate::SignalSpace {
        self.m.domain()
    }

    pub fn outputs(&self) -> &crate::SignalSpace {
        self.m_hat.domain()
    }
}

/// Full pipeline: right and left normalized factors plus the zero-controller
/// completion.
pub fn factorize(plant: &LtvOperator) -> Result<CoprimeFactorization> {
    let (m, n) = normalized_rcf(plant)?;
    let (m_hat, n_hat) = normalized_lcf(plant)?;
    let (u, v, u_hat, v_hat) = bezout_completion(&m, &n, &m_hat, &n_hat)?;
    Ok(CoprimeFactorization::from_parts(
        plant.clone(),
        m,
        n,
        m_hat,
        n_hat,
        u,
        v,
        u_hat,
        v_hat,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::toeplitz_lift_scalar;
    use crate::random;
    use crate::space::SignalSpace;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn assert_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) {
        let d = linalg::frobenius_distance(a, b);
        assert!(d < tol, "distance {d:e}\n{a}\n{b}");
    }

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
    }

    #[test]
    fn zero_plant_factors_trivially() {
        let sp = SignalSpace::uniform(3, 2).unwrap();
        let p = LtvOperator::zeros(sp.clone(), sp);
        let f = factorize(&p).unwrap();
        let id = DMatrix::identity(6, 6);
        assert_close(f.m.matrix(), &id, 1e-15);
        assert_close(f.m_hat.matrix(), &id, 1e-15);
        assert_eq!(f.n.matrix().norm(), 0.0);
        assert_eq!(f.n_hat.matrix().norm(), 0.0);
        assert_close(f.v.matrix(), &id, 1e-15);
        assert_close(f.v_hat.matrix(), &id, 1e-15);
        assert_eq!(f.residuals.max(), 0.0);
    }

    #[test]
    fn static_gain_is_scaled_identity() {
        let g = 1.7;
        let p = toeplitz_lift_scalar(&[g], 1, 2).unwrap();
        let s = (1.0 + g * g).sqrt();
        let (m, n) = normalized_rcf(&p).unwrap();
        assert_close(m.matrix(), &(DMatrix::identity(2, 2) / s), 1e-14);
        assert_close(n.matrix(), &(DMatrix::identity(2, 2) * (g / s)), 1e-14);
        let (mh, nh) = normalized_lcf(&p).unwrap();
        assert_close(mh.matrix(), &(DMatrix::identity(2, 2) / s), 1e-14);
        assert_close(nh.matrix(), &(DMatrix::identity(2, 2) * (g / s)), 1e-14);
    }

    #[test]
    fn shift_factors_by_hand() {
        // PᵀP = diag(1,1,0), PPᵀ = diag(0,1,1).
        let p = toeplitz_lift_scalar(&[0.0, 1.0], 1, 3).unwrap();
        let f = factorize(&p).unwrap();
        let r = FRAC_1_SQRT_2;
        assert_close(f.m.matrix(), &diag(&[r, r, 1.0]), 1e-15);
        let mut n = DMatrix::zeros(3, 3);
        n[(1, 0)] = r;
        n[(2, 1)] = r;
        assert_close(f.n.matrix(), &n, 1e-15);
        assert_close(f.m_hat.matrix(), &diag(&[1.0, r, r]), 1e-15);
        assert_close(f.n_hat.matrix(), &n, 1e-15);
        let s2 = 2f64.sqrt();
        assert_close(f.v.matrix(), &diag(&[1.0, s2, s2]), 1e-14);
        assert_close(f.v_hat.matrix(), &diag(&[s2, s2, 1.0]), 1e-14);
        assert!(f.residuals.max() < 1e-12, "{:?}", f.residuals);
    }

    #[test]
    fn diagonal_blocks_are_positive_definite() {
        let mut rng = random::rng(11);
        let inputs = SignalSpace::new(alloc::vec![2, 2, 1]).unwrap();
        let outputs = SignalSpace::new(alloc::vec![2, 1, 2]).unwrap();
        let p = random::random_causal(&mut rng, inputs, outputs, 1.0);
        let f = factorize(&p).unwrap();
        for op in [&f.m, &f.m_hat] {
            let a = op.solve_causal_inverse().unwrap();
            for k in 0..3 {
                let b = a.block(k, k).into_owned();
                assert!((&b - b.transpose()).norm() < 1e-12);
                assert!(linalg::symmetric_eigen(&b).0[0] > 0.0);
            }
        }
        assert!(f.residuals.accepted(), "{:?}", f.residuals);
    }

    #[test]
    fn rejects_anticausal_plant() {
        let p = toeplitz_lift_scalar(&[0.0, 1.0], 1, 3).unwrap().adjoint();
        assert!(matches!(normalized_rcf(&p), Err(Error::NotCausal(_))));
    }

    #[test]
    fn tampered_factor_is_detected() {
        let p = toeplitz_lift_scalar(&[0.0, 1.0], 1, 3).unwrap();
        let mut f = factorize(&p).unwrap();
        let mut m = f.m.matrix().clone();
        m[(1, 1)] += 1e-3;
        f.m = f.m.with_matrix(m).unwrap();
        let r = verify_doubly_coprime(&f);
        assert!(r.rcf_isometry >= 1e-4, "{r:?}");
        assert!(!r.accepted());
    }

    #[test]
    fn youla_shift_keeps_identities() {
        let mut rng = random::rng(5);
        let p = random::random_plant(&mut rng, 5, 2);
        let f = factorize(&p).unwrap();
        let q = random::random_causal(&mut rng, f.outputs().clone(), f.inputs().clone(), 1.0);
        let g = f.with_youla_shift(&q).unwrap();
        assert!(g.residuals.accepted(), "{:?}", g.residuals);
    }
}
