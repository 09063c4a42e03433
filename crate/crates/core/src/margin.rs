//! Stability margins.
//!
//! `r_o = (1 + ‖H_R‖²)^{-1/2}` with `R = MᵀU + NᵀV` is computed from the
//! corner formula and cross-checked by `r_o² = 1 − ‖Υ‖²`. The module also
//! tabulates the truncated profile of `Ξ`, the Corona criterion, the radius
//! of the row (left factor) problem and a closed-form LTI oracle.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{Complex, ComplexField, DMatrix};

use crate::coprime::{hstack, vstack, CoprimeFactorization};
use crate::error::{Error, Result};
use crate::flatten::CoordSpace;
use crate::linalg;
use crate::nehari::{distance_to_causal, flatten_hankel, nehari_extension};
use crate::operator::LtvOperator;
use crate::space::NestIndex;
use crate::synthesis::{upsilon_map, xi_map};

/// Profile entries with `n > T − BOUNDARY_STEPS` are flagged.
pub const BOUNDARY_STEPS: i64 = 5;
/// Relative eigenvalue floor below which a truncated Corona Gram matrix is
/// treated as singular.
pub const CORONA_KERNEL_TOL: f64 = 1e-12;

/// `R = MᵀU + NᵀV`.
pub fn symbol_r(f: &CoprimeFactorization) -> Result<LtvOperator> {
    f.m.adjoint().compose(&f.u)?.add(&f.n.adjoint().compose(&f.v)?)
}

/// Output of [`r_upper`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperMargin {
    /// `‖H_R‖` by the corner formula.
    pub hankel_norm: f64,
    /// `‖H_R‖` from the flattened Hankel operator.
    pub hankel_norm_flat: f64,
    pub r_o: f64,
    /// `|‖[U + MQ; V + NQ]‖ − (1 + ‖R + Q‖²)^{1/2}|` at the Nehari `Q`.
    pub unitary_residual: f64,
}

/// `r_o` from the Hankel norm of `R`.
pub fn r_upper(f: &CoprimeFactorization) -> Result<UpperMargin> {
    let r = symbol_r(f)?;
    let hankel_norm = distance_to_causal(&r);
    let hankel_norm_flat = flatten_hankel(&r).norm();
    let sol = nehari_extension(&r)?;
    let column = crate::synthesis::youla_column(f, &sol.q)?;
    let lhs = linalg::spectral_norm(&column);
    let rhs = (1.0 + sol.achieved_norm * sol.achieved_norm).sqrt();
    Ok(UpperMargin {
        hankel_norm,
        hankel_norm_flat,
        r_o: (1.0 + hankel_norm * hankel_norm).sqrt().recip(),
        unitary_residual: (lhs - rhs).abs(),
    })
}

/// `‖H_R‖` by the corner formula, without the cross-checks of [`r_upper`].
pub fn hankel_norm(f: &CoprimeFactorization) -> Result<f64> {
    Ok(distance_to_causal(&symbol_r(f)?))
}

/// `r_o` by the corner formula only.
pub fn r_o(f: &CoprimeFactorization) -> Result<f64> {
    let h = hankel_norm(f)?;
    Ok((1.0 + h * h).sqrt().recip())
}

/// Output of [`r_upper_alt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltMargin {
    pub upsilon_norm: f64,
    pub r_o_alt: f64,
}

/// `r_o` from the Hankel operator of the left factors.
pub fn r_upper_alt(f: &CoprimeFactorization) -> Result<AltMargin> {
    let upsilon_norm = upsilon_map(f).norm();
    if upsilon_norm >= 1.0 {
        return Err(Error::UpsilonNotContractive(upsilon_norm));
    }
    Ok(AltMargin {
        upsilon_norm,
        r_o_alt: (1.0 - upsilon_norm * upsilon_norm).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEntry {
    /// Nest index, `−1` for the unrestricted operator.
    pub n: i64,
    /// Norm of `Ξ` on causal inputs supported after time `n`.
    pub value: f64,
    /// Set for entries close enough to the horizon end that the restriction
    /// is dominated by the last few blocks.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginProfile {
    pub entries: Vec<ProfileEntry>,
    /// `r_o`, the lower end of the bracket for the optimal margin.
    pub lower: f64,
    /// `1 / min` over the profile entries.
    pub upper: f64,
}

/// Norms of `Ξ` restricted to `(I − P_n)`-supported inputs, `n = −1, …, T − 2`.
pub fn margin_profile(f: &CoprimeFactorization) -> Result<MarginProfile> {
    let xi = xi_map(f)?;
    let t = f.plant.horizon() as i64;
    let mut entries = Vec::with_capacity(t as usize);
    for n in -1..t - 1 {
        let nest = NestIndex::from_signed(n)?;
        let sub = CoordSpace::causal_after(xi.domain.shapes().to_vec(), nest);
        let restricted = &xi.matrix * sub.embedding_into(&xi.domain);
        entries.push(ProfileEntry {
            n,
            value: linalg::spectral_norm(&restricted),
            boundary: n > t - BOUNDARY_STEPS,
        });
    }
    let lower = entries.first().map_or(1.0, |e| e.value.recip());
    let min = entries.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    Ok(MarginProfile {
        entries,
        lower,
        upper: min.recip(),
    })
}

/// `sup_n sup_f ‖P_n f‖ / ‖[P_n M f; P_n N f]‖` over `n = 0, …, T − 1`.
///
/// By causality `P_n M f = P_n M P_n f`, so each inner supremum is
/// `λ_min(M_nᵀM_n + N_nᵀN_n)^{-1/2}` with `M_n`, `N_n` the leading principal
/// block sections. A numerically singular section gives `∞`.
pub fn corona_criterion(m: &LtvOperator, n: &LtvOperator) -> Result<f64> {
    if m.domain() != n.domain() {
        return Err(Error::dims("M and N need a common domain"));
    }
    let t = m.horizon();
    let mut worst: f64 = 0.0;
    for k in 0..t {
        let nest = NestIndex::Through(k);
        let cols = m.domain().kept_by(nest);
        let mk = m.matrix().view((0, 0), (m.codomain().kept_by(nest), cols));
        let nk = n.matrix().view((0, 0), (n.codomain().kept_by(nest), cols));
        let gram = mk.transpose() * mk + nk.transpose() * nk;
        let (vals, _) = linalg::symmetric_eigen(&gram);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(0.0, f64::max);
        if lo <= CORONA_KERNEL_TOL * hi.max(1.0) {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(lo.sqrt().recip());
    }
    Ok(worst)
}

/// `‖(V̂, −Û)‖`, the norm of an explicit causal left inverse of `[M; N]`;
/// an upper bound for [`corona_criterion`].
pub fn left_inverse_norm(f: &CoprimeFactorization) -> f64 {
    let neg_u_hat = -f.u_hat.matrix();
    linalg::spectral_norm(&hstack(&[f.v_hat.matrix(), &neg_u_hat]))
}

/// Output of [`t11_radius`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowRadius {
    /// `inf_Q ‖(V̂ + QN̂, −(Û + QM̂))‖`
    pub optimum: f64,
    pub radius: f64,
    /// `|‖row(Q)‖ − optimum|` at the constructed `Q`.
    pub residual: f64,
}

/// Radius of the row problem for `(V̂, −Û)`.
///
/// Right multiplication by the unitary `[[M, N̂ᵀ], [N, −M̂ᵀ]]` turns the row
/// into `(I, R̂ + Q)` with `R̂ = V̂N̂ᵀ + ÛM̂ᵀ`, so the optimum is
/// `(1 + dist(R̂, causal)²)^{1/2}`. The distance is found by solving the
/// Nehari problem for the causal-reversed adjoint `J R̂ᵀ J`.
pub fn t11_radius(f: &CoprimeFactorization) -> Result<RowRadius> {
    let r_hat = f
        .v_hat
        .compose(&f.n_hat.adjoint())?
        .add(&f.u_hat.compose(&f.m_hat.adjoint())?)?;
    let flipped = r_hat.adjoint().time_reversed();
    let sol = nehari_extension(&flipped)?;
    let q = sol.q.time_reversed().adjoint();
    let optimum = (1.0 + sol.distance * sol.distance).sqrt();

    let left = f.v_hat.add(&q.compose(&f.n_hat)?)?;
    let right = f.u_hat.add(&q.compose(&f.m_hat)?)?.scale(-1.0);
    let achieved = linalg::spectral_norm(&hstack(&[left.matrix(), right.matrix()]));
    Ok(RowRadius {
        optimum,
        radius: optimum.recip(),
        residual: (achieved - optimum).abs(),
    })
}

/// Relative distance from the unit circle below which a root of the
/// spectral factorization is rejected.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Roots of `a_0 + a_1 λ + … + a_d λ^d` with `a_d ≠ 0`.
fn poly_roots(a: &[f64]) -> Vec<Complex<f64>> {
    let d = a.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = a[d];
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -a[i] / lead;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Outer spectral factor `φ` of `w(λ) = 1 + p(λ)p(1/λ)`, `p = Σ h_k λ^k`.
fn spectral_factor(h: &[f64]) -> Result<Vec<f64>> {
    let m = h.len() - 1;
    let c: Vec<f64> = (0..=m)
        .map(|k| (k == 0) as u8 as f64 + (0..=m - k).map(|j| h[j] * h[j + k]).sum::<f64>())
        .collect();
    // λ^m w(λ), palindromic of degree 2m.
    let a: Vec<f64> = (0..=2 * m).map(|k| c[k.abs_diff(m)]).collect();
    let zeros = a.iter().take_while(|v| **v == 0.0).count();
    let trimmed = &a[zeros..a.len() - zeros];
    let mut outside = Vec::new();
    for r in poly_roots(trimmed) {
        let mag = r.modulus();
        if (mag - 1.0).abs() <= UNIT_CIRCLE_TOL {
            return Err(Error::RootOnUnitCircle(mag));
        }
        if mag > 1.0 {
            outside.push(r);
        }
    }
    // φ(λ) = s ∏ (1 − λ/r), with s fixed by φ(1)² = w(1).
    let mut poly = vec![Complex::new(1.0, 0.0)];
    let mut at_one = Complex::new(1.0, 0.0);
    for r in &outside {
        let inv = r.inv();
        let mut next = vec![Complex::new(0.0, 0.0); poly.len() + 1];
        for (k, p) in poly.iter().enumerate() {
            next[k] += p;
            next[k + 1] -= p * inv;
        }
        poly = next;
        at_one *= Complex::new(1.0, 0.0) - inv;
    }
    let w1: f64 = c[0] + 2.0 * c[1..].iter().sum::<f64>();
    let s = w1.sqrt() / at_one.re;
    Ok(poly.iter().map(|p| p.re * s).collect())
}

/// First `len` power-series coefficients of `num / den`.
fn series_divide(num: &[f64], den: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for k in 0..len {
        let mut acc = num.get(k).copied().unwrap_or(0.0);
        for j in 1..den.len().min(k + 1) {
            acc -= den[j] * out[k - j];
        }
        out[k] = acc / den[0];
    }
    out
}

/// Largest coprime-factor stability margin of the SISO FIR plant
/// `p(λ) = h_0 + h_1 λ + … + h_m λ^m` (`λ` the delay), from the `K × K`
/// Hankel matrices of its normalized factors `ñ = p/φ` and `m̃ = 1/φ`.
pub fn lti_margin_oracle(h: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("truncation must be positive".into()));
    }
    let len = h.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
    if len == 0 {
        return Ok(1.0);
    }
    let h = &h[..len];
    let phi = spectral_factor(h)?;
    let n_tilde = series_divide(h, &phi, 2 * k);
    let m_tilde = series_divide(&[1.0], &phi, 2 * k);
    let hankel = |g: &[f64]| DMatrix::from_fn(k, k, |i, j| g[i + j + 1]);
    let stacked = vstack(&[&hankel(&n_tilde), &hankel(&m_tilde)]);
    let norm = linalg::spectral_norm(&stacked);
    Ok((1.0 - norm * norm).max(0.0).sqrt())
}

/// Every margin quantity of a factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub hankel_norm_r: f64,
    pub hankel_norm_r_flat: f64,
    pub r_o: f64,
    pub r_o_alt: f64,
    pub upsilon_norm: f64,
    pub cross_residual: f64,
    pub unitary_residual: f64,
    pub profile: MarginProfile,
    pub corona_value: f64,
    pub left_inverse_norm: f64,
    pub t11_radius: f64,
    pub t11_residual: f64,
}

pub fn margin_report(f: &CoprimeFactorization) -> Result<MarginReport> {
    let upper = r_upper(f)?;
    let alt = r_upper_alt(f)?;
    let row = t11_radius(f)?;
    Ok(MarginReport {
        hankel_norm_r: upper.hankel_norm,
        hankel_norm_r_flat: upper.hankel_norm_flat,
        r_o: upper.r_o,
        r_o_alt: alt.r_o_alt,
        upsilon_norm: alt.upsilon_norm,
        cross_residual: (upper.r_o - alt.r_o_alt).abs(),
        unitary_residual: upper.unitary_residual,
        profile: margin_profile(f)?,
        corona_value: corona_criterion(&f.m, &f.n)?,
        left_inverse_norm: left_inverse_norm(f),
        t11_radius: row.radius,
        t11_residual: row.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coprime::factorize;
    use crate::lift::toeplitz_lift_scalar;
    use crate::random::{random_plant, rng};

    fn fir(h: &[f64], t: usize) -> CoprimeFactorization {
        factorize(&toeplitz_lift_scalar(h, 1, t).unwrap()).unwrap()
    }

    const RT2: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn shift_symbol_is_the_upper_shift() {
        let f = fir(&[0.0, 1.0], 3);
        let r = symbol_r(&f).unwrap();
        let upper = toeplitz_lift_scalar(&[0.0, 1.0], 1, 3).unwrap().adjoint();
        assert!(linalg::frobenius_distance(r.matrix(), upper.matrix()) < 1e-12);
    }

    #[test]
    fn shift_margin_closed_form() {
        for t in 2..7 {
            let f = fir(&[0.0, 1.0], t);
            let up = r_upper(&f).unwrap();
            assert!((up.hankel_norm - 1.0).abs() < 1e-12);
            assert!((up.hankel_norm_flat - 1.0).abs() < 1e-10);
            assert!((up.r_o - RT2).abs() < 1e-12);
            assert!(up.unitary_residual < 1e-8);
            let alt = r_upper_alt(&f).unwrap();
            assert!((alt.upsilon_norm - RT2).abs() < 1e-10);
            assert!((alt.r_o_alt - RT2).abs() < 1e-10);
        }
    }

    #[test]
    fn static_and_zero_plants_have_unit_margin() {
        for g in [0.0, 0.5, 1.0, 2.0] {
            let f = fir(&[g], 4);
            let rep = margin_report(&f).unwrap();
            assert!((rep.r_o - 1.0).abs() < 1e-12);
            assert!((rep.r_o_alt - 1.0).abs() < 1e-10);
            assert!((rep.corona_value - 1.0).abs() < 1e-10);
            for e in &rep.profile.entries {
                assert!((e.value - 1.0).abs() < 1e-10, "{e:?}");
            }
        }
        let rep = margin_report(&fir(&[0.0], 3)).unwrap();
        assert!((rep.t11_radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_corona_and_row_radius() {
        let f = fir(&[0.0, 1.0], 3);
        let c = corona_criterion(&f.m, &f.n).unwrap();
        assert!((c - 2f64.sqrt()).abs() < 1e-10);
        assert!(c <= left_inverse_norm(&f) + 1e-10);
        let row = t11_radius(&f).unwrap();
        assert!((row.radius - RT2).abs() < 1e-8);
        assert!(row.residual < 1e-8);
    }

    #[test]
    fn corona_of_trivial_pair() {
        let m = toeplitz_lift_scalar(&[1.0], 2, 3).unwrap();
        let n = LtvOperator::zeros(m.domain().clone(), crate::SignalSpace::uniform(3, 1).unwrap());
        assert!((corona_criterion(&m, &n).unwrap() - 1.0).abs() < 1e-14);
        let z = LtvOperator::zeros(m.domain().clone(), m.codomain().clone());
        assert_eq!(corona_criterion(&z, &n).unwrap(), f64::INFINITY);
    }

    #[test]
    fn random_plants_agree_on_both_formulas() {
        let mut r = rng(11);
        for _ in 0..15 {
            let p = random_plant(&mut r, 5, 2);
            let f = factorize(&p).unwrap();
            let rep = margin_report(&f).unwrap();
            assert!(rep.cross_residual < 1e-8, "{}", rep.cross_residual);
            assert!((rep.hankel_norm_r - rep.hankel_norm_r_flat).abs() < 1e-8);
            assert!(rep.unitary_residual < 1e-8);
            assert!(rep.r_o > 0.0 && rep.r_o <= 1.0 + 1e-15);
            let first = rep.profile.entries[0].value;
            assert!((first - rep.r_o.recip()).abs() < 1e-8);
            for w in rep.profile.entries.windows(2) {
                assert!(w[1].value <= w[0].value + 1e-10);
            }
            assert!(rep.profile.lower <= rep.profile.upper + 1e-12);
            assert!(rep.t11_radius <= 1.0 + 1e-12);
            assert!(rep.t11_residual < 1e-8);
            assert!(rep.corona_value <= rep.left_inverse_norm + 1e-8);
        }
    }

    #[test]
    fn oracle_closed_forms() {
        assert!((lti_margin_oracle(&[0.0, 1.0], 50).unwrap() - RT2).abs() < 1e-12);
        assert!((lti_margin_oracle(&[3.0], 50).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(lti_margin_oracle(&[0.0, 0.0], 10).unwrap(), 1.0);
        assert!(lti_margin_oracle(&[1.0], 0).is_err());
    }

    #[test]
    fn spectral_factor_reproduces_the_laurent_polynomial() {
        let h = [0.3, -0.7, 0.2];
        let phi = spectral_factor(&h).unwrap();
        for k in 0..h.len() {
            let lhs: f64 = (0..phi.len() - k).map(|j| phi[j] * phi[j + k]).sum();
            let rhs = (k == 0) as u8 as f64 + (0..h.len() - k).map(|j| h[j] * h[j + k]).sum::<f64>();
            assert!((lhs - rhs).abs() < 1e-12, "{k}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn lifted_margin_approaches_oracle() {
        let h = [0.0, 0.5];
        let oracle = lti_margin_oracle(&h, 200).unwrap();
        let lifted = r_o(&fir(&h, 40)).unwrap();
        assert!((lifted - oracle).abs() < 1e-3, "{lifted} vs {oracle}");
    }
}
