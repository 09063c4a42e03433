//! The time-varying gap metric.
//!
//! A plant is represented by its graph `[M; N]` (normalized right coprime
//! factors). For each truncation index `n`, `Π_n` is the orthogonal projection
//! onto the range of `[M; N](I − P_n)`; the directed gap at `n` is
//! `‖(diag(I − P_n, I − P_n) − Π_{2n}) Π_{1n}‖` and the gap is the supremum of
//! its symmetric version over the nest.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand::Rng;

use crate::coprime::{normalized_rcf, vstack};
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::LtvOperator;
use crate::random;
use crate::space::NestIndex;

/// Relative cutoff on singular values when extracting range bases.
pub const RANK_TOL: f64 = 1e-12;

/// Normalized right graph `[M; N]` of a plant.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub m: LtvOperator,
    pub n: LtvOperator,
}

impl Graph {
    pub fn of_plant(plant: &LtvOperator) -> Result<Self> {
        let (m, n) = normalized_rcf(plant)?;
        Ok(Graph { m, n })
    }

    pub fn horizon(&self) -> usize {
        self.m.horizon()
    }

    fn stacked(&self) -> DMatrix<f64> {
        vstack(&[self.m.matrix(), self.n.matrix()])
    }

    /// Dimension of the doubled signal space `U ⊕ Y`.
    pub fn doubled_dim(&self) -> usize {
        self.m.codomain().total_dim() + self.n.codomain().total_dim()
    }

    /// `diag(I − P_n, I − P_n)` on the doubled space.
    pub fn complement_projection(&self, n: NestIndex) -> DMatrix<f64> {
        let du = self.m.codomain();
        let dy = self.n.codomain();
        let mut d = DMatrix::zeros(self.doubled_dim(), self.doubled_dim());
        for i in du.kept_by(n)..du.total_dim() {
            d[(i, i)] = 1.0;
        }
        let off = du.total_dim();
        for i in dy.kept_by(n)..dy.total_dim() {
            d[(off + i, off + i)] = 1.0;
        }
        d
    }
}

/// Orthogonal projection onto `range([M; N](I − P_n))`.
pub fn graph_projection(g: &Graph, n: NestIndex) -> DMatrix<f64> {
    let k = g.stacked();
    let first_col = g.m.domain().kept_by(n);
    let cols = k.ncols() - first_col;
    let dim = k.nrows();
    if cols == 0 {
        return DMatrix::zeros(dim, dim);
    }
    let restricted = k.columns(first_col, cols).into_owned();
    let dec = linalg::svd(&restricted);
    let top = dec.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = dec
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * top && s > 0.0)
        .count();
    let basis = dec.u.columns(0, rank);
    basis * basis.transpose()
}

fn check_same_spaces(g1: &Graph, g2: &Graph) -> Result<()> {
    if g1.m.domain() != g2.m.domain() || g1.n.codomain() != g2.n.codomain() {
        return Err(Error::dims("plants must act between the same signal spaces"));
    }
    Ok(())
}

fn directed_from_projections(q: &DMatrix<f64>, pi1: &DMatrix<f64>, pi2: &DMatrix<f64>) -> f64 {
    linalg::spectral_norm(&((q - pi2) * pi1))
}

/// Directed gap `δ⃗_n(G₁, G₂)`.
pub fn directed_gap_n(g1: &Graph, g2: &Graph, n: NestIndex) -> Result<f64> {
    check_same_spaces(g1, g2)?;
    let q = g1.complement_projection(n);
    Ok(directed_from_projections(&q, &graph_projection(g1, n), &graph_projection(g2, n)))
}

/// Per-index gap values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEntry {
    /// Signed nest index (`-1` is the untruncated comparison).
    pub n: i64,
    pub directed_12: f64,
    pub directed_21: f64,
    /// `‖Π_{1n} − Π_{2n}‖`
    pub two_sided: f64,
    /// `|two_sided − max(directed_12, directed_21)|`
    pub max_identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub per_n: Vec<GapEntry>,
    pub directed_12: f64,
    pub directed_21: f64,
    pub alpha: f64,
}

impl GapReport {
    pub fn per_n_directed_12(&self) -> Vec<f64> {
        self.per_n.iter().map(|e| e.directed_12).collect()
    }

    pub fn per_n_directed_21(&self) -> Vec<f64> {
        self.per_n.iter().map(|e| e.directed_21).collect()
    }

    pub fn max_identity_residual(&self) -> f64 {
        self.per_n
            .iter()
            .map(|e| e.max_identity_residual)
            .fold(0.0, f64::max)
    }
}

/// Gap `α(G₁, G₂)` with the full per-index breakdown over `n = −1, …, T − 1`.
pub fn tv_gap(g1: &Graph, g2: &Graph) -> Result<GapReport> {
    check_same_spaces(g1, g2)?;
    let mut per_n = Vec::with_capacity(g1.horizon() + 1);
    for n in NestIndex::finite_nest(g1.horizon()) {
        let q = g1.complement_projection(n);
        let pi1 = graph_projection(g1, n);
        let pi2 = graph_projection(g2, n);
        let d12 = directed_from_projections(&q, &pi1, &pi2);
        let d21 = directed_from_projections(&q, &pi2, &pi1);
        let two_sided = linalg::spectral_norm(&(&pi1 - &pi2));
        per_n.push(GapEntry {
            n: n.as_signed().unwrap_or(i64::MAX),
            directed_12: d12,
            directed_21: d21,
            two_sided,
            max_identity_residual: (two_sided - d12.max(d21)).abs(),
        });
    }
    let directed_12 = per_n.iter().map(|e| e.directed_12).fold(0.0, f64::max);
    let directed_21 = per_n.iter().map(|e| e.directed_21).fold(0.0, f64::max);
    Ok(GapReport {
        per_n,
        directed_12,
        directed_21,
        alpha: directed_12.max(directed_21),
    })
}

/// Gap between two plants, factoring both first.
pub fn plant_gap(p1: &LtvOperator, p2: &LtvOperator) -> Result<GapReport> {
    tv_gap(&Graph::of_plant(p1)?, &Graph::of_plant(p2)?)
}

/// A plant drawn from a coprime-factor ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSample {
    pub plant: LtvOperator,
    /// `‖[Δ_M; Δ_N]‖`
    pub perturbation_norm: f64,
    /// `α(P, P₁)`
    pub alpha: f64,
}

/// Diagonal blocks of `M + Δ_M` below this smallest singular value are
/// rejected and the perturbation redrawn.
pub const BALL_SINGULAR_TOL: f64 = 1e-8;

/// Perturbs the graph of `P` by causal `[Δ_M; Δ_N]` of norm below `radius`
/// and reports the gap between `P` and each perturbed plant
/// `(N + Δ_N)(M + Δ_M)⁻¹`.
pub fn sample_coprime_ball(plant: &LtvOperator, radius: f64, count: usize, seed: u64) -> Result<Vec<BallSample>> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("radius {radius} must be positive")));
    }
    let base = Graph::of_plant(plant)?;
    let mut rng = random::rng(seed);
    let inputs = plant.domain().clone();
    let outputs = plant.codomain().clone();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(Error::InvalidArgument(
                "coprime ball sampling keeps producing singular M + Δ_M".into(),
            ));
        }
        let dm = random::random_causal(&mut rng, inputs.clone(), inputs.clone(), 1.0);
        let dn = random::random_causal(&mut rng, inputs.clone(), outputs.clone(), 1.0);
        let raw = linalg::spectral_norm(&vstack(&[dm.matrix(), dn.matrix()]));
        if raw == 0.0 {
            continue;
        }
        let target = radius * rng.gen_range(0.0..1.0f64);
        let s = target / raw;
        let (dm, dn) = (dm.scale(s), dn.scale(s));
        let m1 = base.m.add(&dm)?;
        let n1 = base.n.add(&dn)?;
        if m1.weakest_diagonal_block().1 < BALL_SINGULAR_TOL {
            continue;
        }
        let p1 = n1.compose(&m1.solve_causal_inverse()?)?;
        let alpha = tv_gap(&base, &Graph::of_plant(&p1)?)?.alpha;
        out.push(BallSample {
            plant: p1,
            perturbation_norm: target,
            alpha,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::toeplitz_lift_scalar;
    use crate::space::SignalSpace;

    fn gain(g: f64, t: usize) -> LtvOperator {
        toeplitz_lift_scalar(&[g], 1, t).unwrap()
    }

    /// Sine of the angle between span(1, a) and span(1, b) in R².
    fn two_vector_oracle(a: f64, b: f64) -> f64 {
        let (u, v) = ((1.0, a), (1.0, b));
        let cos = (u.0 * v.0 + u.1 * v.1) / ((1.0 + a * a).sqrt() * (1.0 + b * b).sqrt());
        (1.0 - cos * cos).max(0.0).sqrt()
    }

    #[test]
    fn projection_of_zero_plant_graph() {
        let g = Graph::of_plant(&gain(0.0, 2)).unwrap();
        let pi = graph_projection(&g, NestIndex::Empty);
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![1.0, 1.0, 0.0, 0.0]));
        assert!(linalg::frobenius_distance(&pi, &expect) < 1e-14);
        let none = graph_projection(&g, NestIndex::All);
        assert_eq!(none.norm(), 0.0);
    }

    #[test]
    fn projection_of_static_gain_graph() {
        let g = Graph::of_plant(&gain(2.0, 1)).unwrap();
        let pi = graph_projection(&g, NestIndex::Empty);
        let v = nalgebra::DVector::from_vec(alloc::vec![1.0, 2.0]) / 5f64.sqrt();
        assert!(linalg::frobenius_distance(&pi, &(&v * v.transpose())) < 1e-14);
        assert!(linalg::frobenius_distance(&(&pi * &pi), &pi) < 1e-12);
    }

    #[test]
    fn static_gap_matches_angle_oracle() {
        let g0 = Graph::of_plant(&gain(0.0, 1)).unwrap();
        let g1 = Graph::of_plant(&gain(1.0, 1)).unwrap();
        let d = directed_gap_n(&g0, &g1, NestIndex::Empty).unwrap();
        assert!((d - two_vector_oracle(0.0, 1.0)).abs() < 1e-12);
        assert!((d - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        for (a, b) in [(0.0, 1.0), (1.0, 2.0), (-0.5, 3.0)] {
            let r = plant_gap(&gain(a, 3), &gain(b, 3)).unwrap();
            assert!((r.alpha - two_vector_oracle(a, b)).abs() < 1e-9);
            let closed = (a - b).abs() / ((1.0 + a * a) * (1.0 + b * b)).sqrt();
            assert!((r.alpha - closed).abs() < 1e-9);
            // Static plants: every truncation gives the same value.
            for e in &r.per_n[..r.per_n.len() - 1] {
                assert!((e.directed_12 - r.alpha).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gap_of_plant_with_itself_is_zero() {
        let mut rng = random::rng(8);
        let p = random::random_plant(&mut rng, 5, 2);
        let r = plant_gap(&p, &p).unwrap();
        assert!(r.alpha < 1e-10);
        let q = LtvOperator::zeros(p.domain().clone(), p.codomain().clone());
        assert!(plant_gap(&q, &q).unwrap().alpha == 0.0);
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = gain(1.0, 2);
        let b = LtvOperator::zeros(SignalSpace::uniform(2, 2).unwrap(), SignalSpace::uniform(2, 1).unwrap());
        assert!(plant_gap(&a, &b).is_err());
    }

    #[test]
    fn tiny_ball_gives_tiny_gaps() {
        let p = toeplitz_lift_scalar(&[0.0, 1.0], 1, 3).unwrap();
        for s in sample_coprime_ball(&p, 1e-8, 20, 3).unwrap() {
            assert!(s.alpha < 1e-6);
        }
    }

    #[test]
    fn static_output_perturbation_of_zero_plant() {
        // P = 0, Δ_N = g I, Δ_M = 0 gives P₁ = g I.
        let g = 0.3;
        let r = plant_gap(&gain(0.0, 2), &gain(g, 2)).unwrap();
        assert!((r.alpha - g / (1.0 + g * g).sqrt()).abs() < 1e-12);
        assert!(r.alpha < g);
    }
}
