//! Time-varying Hankel operators and the nest Nehari problem.
//!
//! For a symbol `R` the Hankel operator acts on causal Hilbert-Schmidt
//! operators `A` by `H_R A = (I − 𝒫)(R A)`. Its norm equals both the largest
//! corner `max_n ‖P_n R (I − P_n)‖` and the distance from `R` to the causal
//! operators; [`nehari_extension`] constructs a causal `Q` attaining that
//! distance.
//!
//! Symbols may be column-stacked (`[R₁; R₂]`, all with a common domain); the
//! Hankel operator then acts componentwise and the corners are stacked.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::coprime::vstack;
use crate::error::{Error, Result};
use crate::flatten::{CoordSpace, FlattenedMap, Region};
use crate::linalg;
use crate::operator::LtvOperator;
use crate::space::SignalSpace;
use crate::STRUCTURAL_TOL;

/// Relative slack added to the target norm in each Parrott step so the
/// central formula never divides by a vanishing gap.
const PARROTT_SLACK: f64 = 1e-12;

fn common_domain<'a>(symbol: &[&'a LtvOperator]) -> Result<&'a SignalSpace> {
    let first = symbol
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty symbol".into()))?;
    if symbol.iter().any(|r| r.domain() != first.domain()) {
        return Err(Error::dims("stacked symbol components need a common domain"));
    }
    Ok(first.domain())
}

/// `(I − 𝒫)(R A)` for a causal `A`.
pub fn hankel_apply(r: &LtvOperator, a: &LtvOperator) -> Result<LtvOperator> {
    let scale = a.matrix().amax().max(1.0);
    let anti = a.anticausal_magnitude();
    if anti > STRUCTURAL_TOL * scale {
        return Err(Error::NotCausal(anti));
    }
    Ok(r.compose(a)?.anticausal_part())
}

/// Hankel operator of a stacked symbol, tabulated from causal
/// Hilbert-Schmidt operators `A : Z → Z` (`Z` the symbol domain) to the
/// strictly anticausal part of each component.
pub fn flatten_hankel_stacked(symbol: &[&LtvOperator]) -> Result<FlattenedMap> {
    let z = common_domain(symbol)?.clone();
    let domain = CoordSpace::new(alloc::vec![(z.clone(), z.clone())], Region::Causal);
    let codomain = CoordSpace::new(
        symbol.iter().map(|r| (r.codomain().clone(), z.clone())).collect(),
        Region::StrictlyAnticausal,
    );
    let mats: Vec<&DMatrix<f64>> = symbol.iter().map(|r| r.matrix()).collect();
    // Packing into strictly anticausal coordinates applies (I − 𝒫).
    Ok(FlattenedMap::from_fn(domain, codomain, |a| {
        mats.iter().map(|r| *r * &a[0]).collect()
    }))
}

pub fn flatten_hankel(r: &LtvOperator) -> FlattenedMap {
    flatten_hankel_stacked(&[r]).expect("single component always has a common domain")
}

/// `‖P_n [R₁; R₂; …] (I − P_n)‖` for `n = 0, …, T − 2`.
pub fn corner_norms_stacked(symbol: &[&LtvOperator]) -> Result<Vec<f64>> {
    let t = common_domain(symbol)?.horizon();
    Ok((0..t.saturating_sub(1))
        .map(|n| {
            let corners: Vec<DMatrix<f64>> = symbol.iter().map(|r| r.corner(n)).collect();
            let refs: Vec<&DMatrix<f64>> = corners.iter().collect();
            linalg::spectral_norm(&vstack(&refs))
        })
        .collect())
}

pub fn corner_norms(r: &LtvOperator) -> Vec<f64> {
    corner_norms_stacked(&[r]).expect("single component always has a common domain")
}

/// Distance from a stacked symbol to the causal operators, by the corner
/// formula.
pub fn distance_to_causal_stacked(symbol: &[&LtvOperator]) -> Result<f64> {
    Ok(corner_norms_stacked(symbol)?.into_iter().fold(0.0, f64::max))
}

/// `inf_Q ‖R + Q‖` over causal `Q`, by the corner formula.
pub fn distance_to_causal(r: &LtvOperator) -> f64 {
    corner_norms(r).into_iter().fold(0.0, f64::max)
}

/// Output of [`nehari_extension`].
#[derive(Debug, Clone, PartialEq)]
pub struct NehariSolution {
    /// Causal `Q` with `‖R + Q‖` minimal.
    pub q: LtvOperator,
    /// `‖R + Q‖`.
    pub achieved_norm: f64,
    /// The corner-formula distance the sweep aims for.
    pub distance: f64,
    /// After finishing block column `j` (swept from the last column down to
    /// the first), the norm of the completed columns `j..T`.
    pub column_norms: Vec<f64>,
}

/// Optimal causal approximant by a column-by-column Parrott completion.
///
/// The unknown causal part of `X = R + Q` is filled block by block, last
/// column first and top to bottom within a column. Each block is the
/// central Parrott choice for the submatrix made of the rows above it and
/// the columns from its own onwards, so every such staircase submatrix keeps
/// the norm of the corners it contains.
pub fn nehari_extension(r: &LtvOperator) -> Result<NehariSolution> {
    let cod = r.codomain().clone();
    let dom = r.domain().clone();
    let t = r.horizon();
    let distance = distance_to_causal(r);

    let mut x = r.anticausal_part().into_matrix();
    let total_cols = dom.total_dim();
    let mut column_norms = Vec::with_capacity(t);
    for j in (0..t).rev() {
        let cj = dom.range(j);
        let right = dom.offset(j + 1);
        let right_len = total_cols - right;
        for i in j..t {
            let ri = cod.range(i);
            let above = cod.offset(i);
            if above == 0 || right_len == 0 {
                // Parrott with a missing row or column strip: zero is central.
                continue;
            }
            let a = x.view((0, right), (above, right_len)).into_owned();
            let b = x.view((0, cj.start), (above, cj.len())).into_owned();
            let c = x.view((ri.start, right), (ri.len(), right_len)).into_owned();
            let known_rows = linalg::spectral_norm(&x.view((0, cj.start), (above, total_cols - cj.start)).into_owned());
            let known_cols = linalg::spectral_norm(&x.view((0, right), (ri.end, right_len)).into_owned());
            let target = distance.max(known_rows).max(known_cols) * (1.0 + PARROTT_SLACK);
            if target == 0.0 {
                continue;
            }
            let t2 = target * target;
            let dec = linalg::svd(&a);
            let weights = DMatrix::from_diagonal(&dec.singular_values.map(|s| s / (t2 - s * s)));
            let z = -(c * dec.v_t.transpose() * weights * dec.u.transpose() * b);
            x.view_mut((ri.start, cj.start), (ri.len(), cj.len())).copy_from(&z);
        }
        let done = x.view((0, cj.start), (x.nrows(), total_cols - cj.start)).into_owned();
        column_norms.push(linalg::spectral_norm(&done));
    }
    let x_op = r.with_matrix(x)?;
    let achieved_norm = x_op.operator_norm();
    let q = x_op.nest_project().sub(&r.nest_project())?;
    Ok(NehariSolution {
        q,
        achieved_norm,
        distance,
        column_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::toeplitz_lift_scalar;
    use crate::random;

    fn upper_shift(t: usize) -> LtvOperator {
        toeplitz_lift_scalar(&[0.0, 1.0], 1, t).unwrap().adjoint()
    }

    #[test]
    fn causal_symbol_has_zero_hankel() {
        let mut rng = random::rng(1);
        let s = SignalSpace::new(alloc::vec![1, 2, 1]).unwrap();
        let r = random::random_causal(&mut rng, s.clone(), s.clone(), 1.0);
        let a = random::random_causal(&mut rng, s.clone(), s, 1.0);
        assert_eq!(hankel_apply(&r, &a).unwrap().matrix().norm(), 0.0);
        assert_eq!(flatten_hankel(&r).norm(), 0.0);
        assert_eq!(distance_to_causal(&r), 0.0);
    }

    #[test]
    fn hankel_rejects_anticausal_argument() {
        let r = upper_shift(3);
        assert!(matches!(hankel_apply(&r, &r), Err(Error::NotCausal(_))));
    }

    #[test]
    fn upper_shift_symbols() {
        let r2 = upper_shift(2);
        let id = LtvOperator::identity(r2.domain().clone());
        assert_eq!(hankel_apply(&r2, &id).unwrap(), r2);
        let f2 = flatten_hankel(&r2);
        // A single nonzero entry maps to the single anticausal coordinate.
        assert_eq!(f2.codomain.len(), 1);
        assert!((f2.norm() - 1.0).abs() < 1e-14);
        assert_eq!(distance_to_causal(&r2), 1.0);
        let r3 = upper_shift(3);
        assert!((flatten_hankel(&r3).norm() - 1.0).abs() < 1e-14);
        assert!((distance_to_causal(&r3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hankel_matches_brute_force_on_elementary_blocks() {
        let mut rng = random::rng(2);
        let s = SignalSpace::uniform(3, 1).unwrap();
        let r = random::random_operator(&mut rng, s.clone(), s.clone(), 1.0);
        let f = flatten_hankel(&r);
        for (k, c) in f.domain.coords().iter().enumerate() {
            let mut e = DMatrix::zeros(3, 3);
            e[(c.row, c.col)] = 1.0;
            let prod = r.matrix() * &e;
            // Brute force: keep entries strictly above the diagonal.
            for (q, cc) in f.codomain.coords().iter().enumerate() {
                assert!(cc.row < cc.col);
                assert_eq!(f.matrix[(q, k)], prod[(cc.row, cc.col)]);
            }
            let mut count = 0;
            for i in 0..3 {
                for j in i + 1..3 {
                    if prod[(i, j)] != 0.0 {
                        count += 1;
                    }
                }
            }
            assert!(count <= f.matrix.column(k).iter().filter(|v| **v != 0.0).count());
        }
    }

    #[test]
    fn flattened_and_corner_norms_agree() {
        let mut rng = random::rng(3);
        for _ in 0..20 {
            let s = random::random_space(&mut rng, 5, 2);
            let z = random::random_space(&mut rng, 5, 2);
            let r = random::random_operator(&mut rng, s, z, 1.0);
            let flat = flatten_hankel(&r).norm();
            let corner = distance_to_causal(&r);
            assert!((flat - corner).abs() < 1e-8, "{flat} vs {corner}");
        }
    }

    #[test]
    fn causal_symbol_extension_is_exact_negation() {
        let mut rng = random::rng(4);
        let s = SignalSpace::uniform(4, 2).unwrap();
        let r = random::random_causal(&mut rng, s.clone(), s, 1.0);
        let sol = nehari_extension(&r).unwrap();
        assert_eq!(sol.q, r.scale(-1.0));
        assert_eq!(sol.achieved_norm, 0.0);
    }

    #[test]
    fn upper_shift_extension_reaches_one() {
        let r = upper_shift(3);
        let sol = nehari_extension(&r).unwrap();
        assert!((sol.achieved_norm - 1.0).abs() < 1e-8, "{}", sol.achieved_norm);
        assert!(sol.q.is_causal(0.0));
    }

    #[test]
    fn random_extension_attains_distance() {
        let mut rng = random::rng(5);
        for _ in 0..20 {
            let s = random::random_space(&mut rng, 4, 2);
            let z = random::random_space(&mut rng, 4, 2);
            let r = random::random_operator(&mut rng, s, z, 1.0);
            let sol = nehari_extension(&r).unwrap();
            assert!(
                (sol.achieved_norm - sol.distance).abs() < 1e-8,
                "{} vs {}",
                sol.achieved_norm,
                sol.distance
            );
            assert!(sol.q.is_causal(0.0));
            let direct = r.add(&sol.q).unwrap().operator_norm();
            assert!((direct - sol.achieved_norm).abs() < 1e-12);
            for w in sol.column_norms.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
            assert!(*sol.column_norms.last().unwrap() <= sol.achieved_norm + 1e-12);
        }
    }
}
