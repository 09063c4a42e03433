//! The operators `Ξ`, `Γ`, `Υ` on causal Hilbert-Schmidt spaces, their
//! Schmidt pairs, the optimal Youla parameter and the robust controller.
//!
//! With `K = [M; N]`, `R = MᵀU + NᵀV` and `L = (−N̂, M̂)`:
//!
//! * `Π₁ = I − K 𝒫 Kᵀ` projects `𝒜₂ ⊕ 𝒜₂` onto `S = (𝒜₂ ⊕ 𝒜₂) ⊖ K 𝒜₂`,
//! * `Ξ X = [U; V] X − K 𝒫(R X)` maps `𝒜₂` onto `S`,
//! * `Γ = L|_S` is the inverse of `Ξ`,
//! * `Υ X = (I − 𝒫) Lᵀ X` is the Hankel operator of the left factors.
//!
//! Here `𝒜₂` is the space of causal operators `Z → Y` with `Z` the plant
//! output space; the norms do not depend on that choice.

use alloc::vec::Vec;
#[allow(unused_imports)] // float methods without std
use nalgebra::ComplexField;
use nalgebra::{DMatrix, DVector};

use crate::coprime::{vstack, CoprimeFactorization};
use crate::error::{Error, Result};
use crate::flatten::{CoordSpace, FlattenedMap, Region};
use crate::linalg;
use crate::nehari::{nehari_extension, NehariSolution};
use crate::operator::LtvOperator;
use crate::space::SignalSpace;

/// Tolerance of the optimal-parameter identity check.
pub const Q_IDENTITY_TOL: f64 = 1e-7;
/// Tolerance of the achieved-norm check in [`optimal_q`].
pub const Q_NORM_TOL: f64 = 1e-8;

fn causal(m: DMatrix<f64>, cod: &SignalSpace, dom: &SignalSpace) -> DMatrix<f64> {
    LtvOperator::new(dom.clone(), cod.clone(), m)
        .expect("product shapes follow the factor spaces")
        .nest_project()
        .into_matrix()
}

/// `𝒜₂`: causal `Z → Y`.
pub fn a2_space(f: &CoprimeFactorization) -> CoordSpace {
    let y = f.outputs().clone();
    CoordSpace::new(alloc::vec![(y.clone(), y)], Region::Causal)
}

/// `𝒜₂ ⊕ 𝒜₂`: causal `(Z → U, Z → Y)`.
pub fn doubled_space(f: &CoprimeFactorization) -> CoordSpace {
    let (u, y) = (f.inputs().clone(), f.outputs().clone());
    CoordSpace::new(alloc::vec![(u, y.clone()), (y.clone(), y)], Region::Causal)
}

/// `𝒜₂^{2⊥}`: strictly anticausal `(Z → U, Z → Y)`.
pub fn anticausal_doubled_space(f: &CoprimeFactorization) -> CoordSpace {
    let (u, y) = (f.inputs().clone(), f.outputs().clone());
    CoordSpace::new(alloc::vec![(u, y.clone()), (y.clone(), y)], Region::StrictlyAnticausal)
}

/// Flattened `Ξ : 𝒜₂ → 𝒜₂ ⊕ 𝒜₂` (its range is `S`).
pub fn xi_map(f: &CoprimeFactorization) -> Result<FlattenedMap> {
    let r = crate::margin::symbol_r(f)?;
    let (uspace, yspace) = (f.inputs().clone(), f.outputs().clone());
    let (m, n, u, v, r) = (f.m.matrix(), f.n.matrix(), f.u.matrix(), f.v.matrix(), r.matrix());
    Ok(FlattenedMap::from_fn(a2_space(f), doubled_space(f), |x| {
        let p = causal(r * &x[0], &uspace, &yspace);
        alloc::vec![u * &x[0] - m * &p, v * &x[0] - n * &p]
    }))
}

/// Flattened `Π₁` on `𝒜₂ ⊕ 𝒜₂`.
pub fn pi1_map(f: &CoprimeFactorization) -> FlattenedMap {
    let (uspace, yspace) = (f.inputs().clone(), f.outputs().clone());
    let (m, n) = (f.m.matrix(), f.n.matrix());
    let d = doubled_space(f);
    FlattenedMap::from_fn(d.clone(), d, |z| {
        let p = causal(m.transpose() * &z[0] + n.transpose() * &z[1], &uspace, &yspace);
        alloc::vec![&z[0] - m * &p, &z[1] - n * &p]
    })
}

/// Flattened `L = (−N̂, M̂)` on all of `𝒜₂ ⊕ 𝒜₂`.
pub fn gamma_map(f: &CoprimeFactorization) -> FlattenedMap {
    let (mh, nh) = (f.m_hat.matrix(), f.n_hat.matrix());
    FlattenedMap::from_fn(doubled_space(f), a2_space(f), |s| {
        alloc::vec![mh * &s[1] - nh * &s[0]]
    })
}

/// Flattened `Υ = (I − 𝒫)[−N̂ᵀ; M̂ᵀ]`.
pub fn upsilon_map(f: &CoprimeFactorization) -> FlattenedMap {
    let (mh, nh) = (f.m_hat.matrix(), f.n_hat.matrix());
    FlattenedMap::from_fn(a2_space(f), anticausal_doubled_space(f), |x| {
        alloc::vec![-(nh.transpose() * &x[0]), mh.transpose() * &x[0]]
    })
}

/// Residuals of the identities the proof operators must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProofResiduals {
    /// `‖Π₁² − Π₁‖`
    pub pi1_idempotent: f64,
    /// `‖Π₁ − Π₁ᵀ‖`
    pub pi1_symmetric: f64,
    /// `‖Ξ − S SᵀΞ‖`: part of the range of `Ξ` outside `S`.
    pub xi_range_leak: f64,
    /// `‖ΓΞ − I‖` on `𝒜₂`
    pub gamma_xi: f64,
    /// `‖ΞΓ − I‖` on `S`
    pub xi_gamma: f64,
    /// `‖ΓΓᵀ + ΥᵀΥ − I‖`: the isometry of `Γᵀ + Υ`.
    pub energy_split: f64,
    /// `|τ(Γ)² + ‖Υ‖² − 1|`
    pub tau_identity: f64,
    /// `|‖Ξ‖ − 1/τ(Γ)|`
    pub norm_triangle: f64,
}

impl ProofResiduals {
    pub fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("pi1_idempotent", self.pi1_idempotent),
            ("pi1_symmetric", self.pi1_symmetric),
            ("xi_range_leak", self.xi_range_leak),
            ("gamma_xi", self.gamma_xi),
            ("xi_gamma", self.xi_gamma),
            ("energy_split", self.energy_split),
            ("tau_identity", self.tau_identity),
            ("norm_triangle", self.norm_triangle),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

/// `Ξ`, `Γ`, `Υ` and `Π₁` in consistent orthonormal coordinates.
#[derive(Debug, Clone)]
pub struct ProofOperators {
    pub factorization: CoprimeFactorization,
    pub xi: FlattenedMap,
    pub gamma: FlattenedMap,
    pub upsilon: FlattenedMap,
    pub pi1: FlattenedMap,
    /// Orthonormal basis of `S` in `𝒜₂ ⊕ 𝒜₂` coordinates, one column each.
    pub s_basis: DMatrix<f64>,
    /// `Ξ` with codomain coordinates taken in `s_basis`.
    pub xi_s: DMatrix<f64>,
    /// `Γ` restricted to `S`, domain coordinates in `s_basis`.
    pub gamma_s: DMatrix<f64>,
    pub xi_norm: f64,
    pub upsilon_norm: f64,
    /// Minimal gain of `Γ` on `S`.
    pub tau_gamma: f64,
    pub gamma_singular_values: Vec<f64>,
    pub xi_singular_values: Vec<f64>,
    pub residuals: ProofResiduals,
}

/// Builds every proof operator and checks their identities.
pub fn build_proof_operators(f: &CoprimeFactorization) -> Result<ProofOperators> {
    let xi = xi_map(f)?;
    let gamma = gamma_map(f);
    let upsilon = upsilon_map(f);
    let pi1 = pi1_map(f);

    let (vals, vecs) = linalg::symmetric_eigen(&pi1.matrix);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
    let expected = xi.domain.len();
    if keep.len() != expected {
        return Err(Error::RankDeficient {
            expected,
            found: keep.len(),
        });
    }
    let mut s_basis = DMatrix::zeros(pi1.matrix.nrows(), keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        s_basis.set_column(dst, &vecs.column(src));
    }

    let xi_s = s_basis.transpose() * &xi.matrix;
    let gamma_s = &gamma.matrix * &s_basis;
    let n1 = expected;

    let xi_singular_values = linalg::singular_values(&xi_s);
    let gamma_singular_values = linalg::singular_values(&gamma_s);
    let xi_norm = xi_singular_values.first().copied().unwrap_or(0.0);
    let tau_gamma = gamma_singular_values.last().copied().unwrap_or(0.0);
    let upsilon_norm = upsilon.norm();

    let p = &pi1.matrix;
    let residuals = ProofResiduals {
        pi1_idempotent: linalg::spectral_norm(&(p * p - p)),
        pi1_symmetric: linalg::spectral_norm(&(p - p.transpose())),
        xi_range_leak: linalg::spectral_norm(&(&xi.matrix - &s_basis * &xi_s)),
        gamma_xi: linalg::distance_to_identity(&(&gamma_s * &xi_s)),
        xi_gamma: linalg::distance_to_identity(&(&xi_s * &gamma_s)),
        energy_split: linalg::spectral_norm(
            &(&gamma_s * gamma_s.transpose() + upsilon.matrix.transpose() * &upsilon.matrix
                - DMatrix::<f64>::identity(n1, n1)),
        ),
        tau_identity: (tau_gamma * tau_gamma + upsilon_norm * upsilon_norm - 1.0).abs(),
        norm_triangle: if tau_gamma > 0.0 {
            (xi_norm - 1.0 / tau_gamma).abs()
        } else {
            f64::INFINITY
        },
    };

    Ok(ProofOperators {
        factorization: f.clone(),
        xi,
        gamma,
        upsilon,
        pi1,
        s_basis,
        xi_s,
        gamma_s,
        xi_norm,
        upsilon_norm,
        tau_gamma,
        gamma_singular_values,
        xi_singular_values,
        residuals,
    })
}

/// Residuals of one Schmidt triple.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SchmidtResiduals {
    /// `‖ΥX − λY*‖`
    pub upsilon_forward: f64,
    /// `‖ΥᵀY* − λX‖`
    pub upsilon_adjoint: f64,
    /// `‖ΓW − √(1−λ²) X‖`
    pub gamma_forward: f64,
    /// `‖ΓᵀX − √(1−λ²) W‖`
    pub gamma_adjoint: f64,
    /// `‖ΞX − W/√(1−λ²)‖`
    pub xi_forward: f64,
    /// `‖ΞᵀW − X/√(1−λ²)‖`
    pub xi_adjoint: f64,
    /// `‖[−N̂ᵀ; M̂ᵀ]X − √(1−λ²) W − λY*‖`, evaluated on full operators.
    pub split: f64,
    /// `‖(−N̂, M̂)Y* − λX‖`, evaluated on full operators.
    pub return_map: f64,
    /// distance from `√(1−λ²)` to the nearest singular value of `Γ`
    pub gamma_singular_match: f64,
    /// distance from `1/√(1−λ²)` to the nearest singular value of `Ξ`
    pub xi_singular_match: f64,
}

impl SchmidtResiduals {
    pub fn named(&self) -> [(&'static str, f64); 10] {
        [
            ("upsilon_forward", self.upsilon_forward),
            ("upsilon_adjoint", self.upsilon_adjoint),
            ("gamma_forward", self.gamma_forward),
            ("gamma_adjoint", self.gamma_adjoint),
            ("xi_forward", self.xi_forward),
            ("xi_adjoint", self.xi_adjoint),
            ("split", self.split),
            ("return_map", self.return_map),
            ("gamma_singular_match", self.gamma_singular_match),
            ("xi_singular_match", self.xi_singular_match),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

/// A singular value `λ ∈ (0, 1)` of `Υ` with its Schmidt vectors.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub lambda: f64,
    /// Unit-norm causal `X : Z → Y`.
    pub x: LtvOperator,
    /// Strictly anticausal pair `(Z → U, Z → Y)`.
    pub y_star: Vec<LtvOperator>,
    /// Causal pair in `S`.
    pub w: Vec<LtvOperator>,
    /// Coordinates of `X`, `Y*`, `W` (the last in `𝒜₂ ⊕ 𝒜₂` coordinates).
    pub x_coords: DVector<f64>,
    pub y_coords: DVector<f64>,
    pub w_coords: DVector<f64>,
    pub residuals: SchmidtResiduals,
}

fn nearest(values: &[f64], target: f64) -> f64 {
    values
        .iter()
        .map(|s| (s - target).abs())
        .fold(f64::INFINITY, f64::min)
}

fn hs_norm_of(parts: &[DMatrix<f64>]) -> f64 {
    parts.iter().map(|p| p.norm_squared()).sum::<f64>().sqrt()
}

/// Singular values below this are treated as zero.
const ZERO_SINGULAR: f64 = 1e-12;

/// Top `k` Schmidt triples of `Υ` (fewer if `Υ` has smaller rank).
pub fn schmidt_pairs(po: &ProofOperators, k: usize) -> Result<Vec<SchmidtData>> {
    let dec = po.upsilon.svd();
    let f = &po.factorization;
    let (mh, nh) = (f.m_hat.matrix(), f.n_hat.matrix());
    let a2 = &po.xi.domain;
    let doubled = &po.xi.codomain;
    let anti = &po.upsilon.codomain;

    let mut out = Vec::new();
    for i in 0..dec.singular_values.len().min(k) {
        let lambda = dec.singular_values[i];
        if lambda <= ZERO_SINGULAR {
            break;
        }
        if lambda >= 1.0 - 1e-12 {
            return Err(Error::DegenerateSingularValue(lambda));
        }
        let x = dec.v_t.row(i).transpose();
        let y = dec.u.column(i).into_owned();
        let sl = (1.0 - lambda * lambda).sqrt();
        let w_s = po.gamma_s.transpose() * &x / sl;
        let w_full = &po.s_basis * &w_s;

        let xm = a2.unpack(&x);
        let ym = anti.unpack(&y);
        let wm = doubled.unpack(&w_full);
        let split_parts = [
            -(nh.transpose() * &xm[0]) - &wm[0] * sl - &ym[0] * lambda,
            mh.transpose() * &xm[0] - &wm[1] * sl - &ym[1] * lambda,
        ];
        let ret = mh * &ym[1] - nh * &ym[0] - &xm[0] * lambda;

        let residuals = SchmidtResiduals {
            upsilon_forward: (&po.upsilon.matrix * &x - &y * lambda).norm(),
            upsilon_adjoint: (po.upsilon.matrix.transpose() * &y - &x * lambda).norm(),
            gamma_forward: (&po.gamma_s * &w_s - &x * sl).norm(),
            gamma_adjoint: (po.gamma_s.transpose() * &x - &w_s * sl).norm(),
            xi_forward: (&po.xi_s * &x - &w_s / sl).norm(),
            xi_adjoint: (po.xi_s.transpose() * &w_s - &x / sl).norm(),
            split: hs_norm_of(&split_parts),
            return_map: ret.norm(),
            gamma_singular_match: nearest(&po.gamma_singular_values, sl),
            xi_singular_match: nearest(&po.xi_singular_values, 1.0 / sl),
        };
        out.push(SchmidtData {
            lambda,
            x: a2.unpack_operators(&x)?.remove(0),
            y_star: anti.unpack_operators(&y)?,
            w: doubled.unpack_operators(&w_full)?,
            x_coords: x,
            y_coords: y,
            w_coords: w_full,
            residuals,
        });
    }
    Ok(out)
}

/// Residuals of the single-vector singular value criterion for `Υ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T7Report {
    /// `‖𝒫 Z‖` with `Z = [−N̂ᵀ; M̂ᵀ](−N̂, M̂)W − (1 − λ²)W`.
    pub z_causal: f64,
    /// `‖W − Π₁W‖`
    pub w_in_s: f64,
    /// `X` rebuilt as `(−N̂, M̂)W/√(1−λ²)`, compared up to sign.
    pub x_match: f64,
    /// `Y*` rebuilt as `Z/(λ√(1−λ²))`, compared up to sign.
    pub y_match: f64,
}

impl T7Report {
    pub fn max(&self) -> f64 {
        self.z_causal.max(self.w_in_s).max(self.x_match).max(self.y_match)
    }
}

fn signed_distance(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    let plus: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_squared()).sum::<f64>().sqrt();
    let minus: f64 = a.iter().zip(b).map(|(x, y)| (x + y).norm_squared()).sum::<f64>().sqrt();
    plus.min(minus)
}

/// Checks that `sd.w` alone certifies `sd.lambda` as a singular value of `Υ`
/// and reproduces `X` and `Y*`.
pub fn t7_check(po: &ProofOperators, sd: &SchmidtData) -> T7Report {
    let f = &po.factorization;
    let (mh, nh) = (f.m_hat.matrix(), f.n_hat.matrix());
    let lambda = sd.lambda;
    let s2 = 1.0 - lambda * lambda;
    let sl = s2.sqrt();
    let w: Vec<DMatrix<f64>> = sd.w.iter().map(|o| o.matrix().clone()).collect();
    let lw = mh * &w[1] - nh * &w[0];
    let z = [
        -(nh.transpose() * &lw) - &w[0] * s2,
        mh.transpose() * &lw - &w[1] * s2,
    ];
    let doubled = &po.xi.codomain;
    let z_causal = doubled.pack(&z).norm();
    let w_coords = doubled.pack(&w);
    let w_in_s = (&w_coords - &po.pi1.matrix * &w_coords).norm();
    let x_rebuilt = [&lw / sl];
    let x_match = signed_distance(&x_rebuilt, &[sd.x.matrix().clone()]);
    let y_rebuilt: Vec<DMatrix<f64>> = z.iter().map(|p| p / (lambda * sl)).collect();
    let y_given: Vec<DMatrix<f64>> = sd.y_star.iter().map(|o| o.matrix().clone()).collect();
    let y_match = signed_distance(&y_rebuilt, &y_given);
    T7Report {
        z_causal,
        w_in_s,
        x_match,
        y_match,
    }
}

/// Output of [`optimal_q`].
#[derive(Debug, Clone)]
pub struct OptimalQ {
    pub q: LtvOperator,
    /// `‖[U + MQ; V + NQ]‖`
    pub achieved_norm: f64,
    /// `(1 + ‖H_R‖²)^{1/2} = 1/r_o`
    pub target_norm: f64,
    /// Largest `‖QX + RX − (Mᵀ, Nᵀ)ΞX‖` over the top singular subspace of `Ξ`.
    pub identity_residual: f64,
    /// Dimension of that subspace.
    pub top_multiplicity: usize,
    pub nehari: NehariSolution,
}

/// `[U + MQ; V + NQ]` as a dense matrix.
pub fn youla_column(f: &CoprimeFactorization, q: &LtvOperator) -> Result<DMatrix<f64>> {
    let top = f.u.add(&f.m.compose(q)?)?;
    let bottom = f.v.add(&f.n.compose(q)?)?;
    Ok(vstack(&[top.matrix(), bottom.matrix()]))
}

/// Optimal causal Youla parameter, by the Nehari problem for `R`.
pub fn optimal_q(f: &CoprimeFactorization) -> Result<OptimalQ> {
    let r = crate::margin::symbol_r(f)?;
    let nehari = nehari_extension(&r)?;
    let q = nehari.q.clone();
    let achieved_norm = linalg::spectral_norm(&youla_column(f, &q)?);
    let target_norm = (1.0 + nehari.distance * nehari.distance).sqrt();
    if (achieved_norm - target_norm).abs() > Q_NORM_TOL {
        return Err(Error::Verification {
            what: "optimal Youla parameter norm".into(),
            residual: (achieved_norm - target_norm).abs(),
            tol: Q_NORM_TOL,
        });
    }

    // Top singular subspace of Ξ through its Gram matrix.
    let xi = xi_map(f)?;
    let gram = xi.matrix.transpose() * &xi.matrix;
    let (vals, vecs) = linalg::symmetric_eigen(&gram);
    let top = vals.iter().copied().fold(0.0, f64::max);
    let cluster: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] >= top * (1.0 - 1e-9))
        .collect();
    let (m, n, rm, qm) = (f.m.matrix(), f.n.matrix(), r.matrix(), q.matrix());
    let mut identity_residual: f64 = 0.0;
    for &i in &cluster {
        let x = vecs.column(i).into_owned();
        let xm = xi.domain.unpack(&x);
        let wx = xi.codomain.unpack(&(&xi.matrix * &x));
        let lhs = qm * &xm[0];
        let rhs = -(rm * &xm[0]) + m.transpose() * &wx[0] + n.transpose() * &wx[1];
        identity_residual = identity_residual.max((lhs - rhs).norm());
    }
    if identity_residual > Q_IDENTITY_TOL {
        return Err(Error::Verification {
            what: "optimal parameter Schmidt identity".into(),
            residual: identity_residual,
            tol: Q_IDENTITY_TOL,
        });
    }
    Ok(OptimalQ {
        q,
        achieved_norm,
        target_norm,
        identity_residual,
        top_multiplicity: cluster.len(),
        nehari,
    })
}

/// Norms of the four closed-loop maps of the interconnection of `P` and `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedLoop {
    /// `‖(I − PC)⁻¹‖`
    pub sensitivity: f64,
    /// `‖(I − PC)⁻¹ P‖`
    pub plant_sensitivity: f64,
    /// `‖C (I − PC)⁻¹‖`
    pub control_sensitivity: f64,
    /// `‖C (I − PC)⁻¹ P‖`
    pub complementary: f64,
    /// `1 / ‖[C; I](I − PC)⁻¹[I, P]‖`
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub struct RobustController {
    pub c: LtvOperator,
    pub closed_loop: ClosedLoop,
    /// `|closed_loop.margin − 1/‖[U + MQ; V + NQ]‖|`
    pub margin_residual: f64,
}

/// Condition number beyond which a diagonal block of `V + NQ` is refused.
pub const CONTROLLER_COND_LIMIT: f64 = 1e10;

/// `C = (U + MQ)(V + NQ)⁻¹` with its closed-loop certificate.
pub fn robust_controller(f: &CoprimeFactorization, q: &LtvOperator) -> Result<RobustController> {
    let num = f.u.add(&f.m.compose(q)?)?;
    let den = f.v.add(&f.n.compose(q)?)?;
    for k in 0..den.horizon() {
        let s = linalg::singular_values(&den.block(k, k).into_owned());
        let (hi, lo) = (s[0], s[s.len() - 1]);
        if !(lo > 0.0) || hi / lo > CONTROLLER_COND_LIMIT {
            return Err(Error::SingularBlock { block: k, sigma_min: lo });
        }
    }
    let c = num.compose(&den.solve_causal_inverse()?)?;
    let p = &f.plant;
    let id_y = LtvOperator::identity(p.codomain().clone());
    let sens = id_y.sub(&p.compose(&c)?)?.solve_causal_inverse()?;
    let ps = sens.compose(p)?;
    let cs = c.compose(&sens)?;
    let cps = cs.compose(p)?;
    let full = coprime_block(&cs, &cps, &sens, &ps);
    let margin = 1.0 / linalg::spectral_norm(&full);
    let column_norm = linalg::spectral_norm(&vstack(&[num.matrix(), den.matrix()]));
    Ok(RobustController {
        closed_loop: ClosedLoop {
            sensitivity: sens.operator_norm(),
            plant_sensitivity: ps.operator_norm(),
            control_sensitivity: cs.operator_norm(),
            complementary: cps.operator_norm(),
            margin,
        },
        margin_residual: (margin - 1.0 / column_norm).abs(),
        c,
    })
}

fn coprime_block(cs: &LtvOperator, cps: &LtvOperator, s: &LtvOperator, ps: &LtvOperator) -> DMatrix<f64> {
    // [C; I] S [I, P] = [[CS, CSP], [S, SP]]
    crate::coprime::block2(cs.matrix(), cps.matrix(), s.matrix(), ps.matrix())
}
