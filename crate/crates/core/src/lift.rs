//! Lifting of system descriptions into block operators.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::LtvOperator;
use crate::space::SignalSpace;

/// Time-varying state-space data `x_{k+1} = A_k x_k + B_k u_k`,
/// `y_k = C_k x_k + D_k u_k`, with `x_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceSequence {
    pub a: Vec<DMatrix<f64>>,
    pub b: Vec<DMatrix<f64>>,
    pub c: Vec<DMatrix<f64>>,
    pub d: Vec<DMatrix<f64>>,
}

impl StateSpaceSequence {
    pub fn horizon(&self) -> usize {
        self.a.len()
    }

    /// Checks shapes and returns `(input dims, output dims)`.
    pub fn validate(&self) -> Result<(SignalSpace, SignalSpace)> {
        let t = self.a.len();
        if t == 0 {
            return Err(Error::EmptyHorizon);
        }
        for (name, len) in [("B", self.b.len()), ("C", self.c.len()), ("D", self.d.len())] {
            if len != t {
                return Err(Error::dims(format!("{name} has {len} steps, A has {t}")));
            }
        }
        let mut inputs = Vec::with_capacity(t);
        let mut outputs = Vec::with_capacity(t);
        for k in 0..t {
            let (a, b, c, d) = (&self.a[k], &self.b[k], &self.c[k], &self.d[k]);
            let n_k = a.ncols();
            let n_next = a.nrows();
            if b.nrows() != n_next {
                return Err(Error::dims(format!(
                    "step {k}: B has {} rows, A has {n_next}",
                    b.nrows()
                )));
            }
            if c.ncols() != n_k {
                return Err(Error::dims(format!(
                    "step {k}: C has {} columns, A has {n_k}",
                    c.ncols()
                )));
            }
            if d.shape() != (c.nrows(), b.ncols()) {
                return Err(Error::dims(format!(
                    "step {k}: D is {}x{}, expected {}x{}",
                    d.nrows(),
                    d.ncols(),
                    c.nrows(),
                    b.ncols()
                )));
            }
            if k + 1 < t && self.a[k + 1].ncols() != n_next {
                return Err(Error::dims(format!(
                    "step {k}: A maps into dimension {n_next}, A_{} expects {}",
                    k + 1,
                    self.a[k + 1].ncols()
                )));
            }
            inputs.push(b.ncols());
            outputs.push(c.nrows());
        }
        Ok((SignalSpace::new(inputs)?, SignalSpace::new(outputs)?))
    }
}

/// Lifts a state-space sequence to its causal input-output operator.
///
/// Block `(i, j)` is `D_i` on the diagonal and `C_i A_{i-1} ⋯ A_{j+1} B_j`
/// below it.
pub fn lift_state_space(sys: &StateSpaceSequence) -> Result<LtvOperator> {
    let (inputs, outputs) = sys.validate()?;
    let t = sys.horizon();
    let mut op = LtvOperator::zeros(inputs, outputs);
    for j in 0..t {
        op.set_block(j, j, &sys.d[j])?;
        // Propagated input effect on the state, starting at x_{j+1}.
        let mut state = sys.b[j].clone();
        for i in j + 1..t {
            op.set_block(i, j, &(&sys.c[i] * &state))?;
            if i + 1 < t {
                state = &sys.a[i] * state;
            }
        }
    }
    Ok(op)
}

/// Block-Toeplitz causal operator with block `(i, j) = h[i - j]`.
pub fn toeplitz_lift(h: &[DMatrix<f64>], horizon: usize) -> Result<LtvOperator> {
    let first = h
        .first()
        .ok_or_else(|| Error::InvalidArgument("FIR needs at least one coefficient".into()))?;
    let (p, m) = first.shape();
    if let Some(k) = h.iter().position(|b| b.shape() != (p, m)) {
        return Err(Error::dims(format!(
            "FIR coefficient {k} is {}x{}, coefficient 0 is {p}x{m}",
            h[k].nrows(),
            h[k].ncols()
        )));
    }
    let inputs = SignalSpace::uniform(horizon, m)?;
    let outputs = SignalSpace::uniform(horizon, p)?;
    LtvOperator::from_blocks(inputs, outputs, |i, j| {
        if i >= j {
            h.get(i - j).cloned()
        } else {
            None
        }
    })
}

/// [`toeplitz_lift`] with scalar taps acting as `h_k · I_dim`.
pub fn toeplitz_lift_scalar(h: &[f64], dim: usize, horizon: usize) -> Result<LtvOperator> {
    let blocks: Vec<DMatrix<f64>> = h
        .iter()
        .map(|&g| DMatrix::identity(dim, dim) * g)
        .collect();
    toeplitz_lift(&blocks, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn scalar(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    fn lti_scalar(a: f64, b: f64, c: f64, d: f64, t: usize) -> StateSpaceSequence {
        StateSpaceSequence {
            a: vec![scalar(a); t],
            b: vec![scalar(b); t],
            c: vec![scalar(c); t],
            d: vec![scalar(d); t],
        }
    }

    #[test]
    fn state_space_delay_is_shift() {
        let op = lift_state_space(&lti_scalar(0.0, 1.0, 1.0, 0.0, 3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(op.matrix()[(i, j)], if i == j + 1 { 1.0 } else { 0.0 });
            }
        }
        assert!(op.is_causal(0.0));
        assert_eq!(op, toeplitz_lift_scalar(&[0.0, 1.0], 1, 3).unwrap());
    }

    #[test]
    fn static_gain_lifts_to_scaled_identity() {
        let op = lift_state_space(&lti_scalar(0.0, 0.0, 0.0, 2.5, 2)).unwrap();
        assert_eq!(op.matrix(), &(DMatrix::identity(2, 2) * 2.5));
    }

    #[test]
    fn unrolled_first_order_recursion() {
        // x1 = u0, x2 = 0.5 u0 + u1; y = x.
        let op = lift_state_space(&lti_scalar(0.5, 1.0, 1.0, 0.0, 3)).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.5, 1.0, 0.0]);
        assert_eq!(op.matrix(), &expect);
    }

    #[test]
    fn toeplitz_diagonals() {
        let op = toeplitz_lift_scalar(&[1.0, 2.0, 3.0], 1, 4).unwrap();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 0.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 3.0, 2.0, 1.0, 0.0, 0.0, 3.0, 2.0, 1.0],
        );
        assert_eq!(op.matrix(), &expect);
        let g = toeplitz_lift_scalar(&[4.0], 1, 2).unwrap();
        assert_eq!(g.matrix(), &(DMatrix::identity(2, 2) * 4.0));
    }

    #[test]
    fn shape_errors() {
        let mut sys = lti_scalar(0.0, 1.0, 1.0, 0.0, 3);
        sys.a[1] = DMatrix::zeros(2, 1);
        assert!(matches!(lift_state_space(&sys), Err(Error::DimensionMismatch(_))));
        let empty = StateSpaceSequence { a: vec![], b: vec![], c: vec![], d: vec![] };
        assert_eq!(lift_state_space(&empty), Err(Error::EmptyHorizon));
        assert!(toeplitz_lift_scalar(&[1.0], 1, 0).is_err());
        assert!(toeplitz_lift(&[], 3).is_err());
    }

    #[test]
    fn time_varying_state_dimension() {
        // state dimension 1 -> 2 -> 1
        let sys = StateSpaceSequence {
            a: vec![DMatrix::from_row_slice(2, 1, &[1.0, 2.0]), DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), scalar(0.0)],
            b: vec![DMatrix::from_row_slice(2, 1, &[1.0, 0.0]), scalar(1.0), scalar(1.0)],
            c: vec![scalar(1.0), DMatrix::from_row_slice(1, 2, &[0.0, 1.0]), scalar(1.0)],
            d: vec![scalar(0.0); 3],
        };
        let op = lift_state_space(&sys).unwrap();
        // (1,0) = C1 B0 = 0; (2,0) = C2 A1 B0 = 1; (2,1) = C2 B1 = 1.
        assert_eq!(op.matrix()[(1, 0)], 0.0);
        assert_eq!(op.matrix()[(2, 0)], 1.0);
        assert_eq!(op.matrix()[(2, 1)], 1.0);
    }
}
