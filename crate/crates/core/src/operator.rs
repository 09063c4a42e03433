//! Block operators over a finite horizon.

use alloc::format;
use nalgebra::{DMatrix, DMatrixView, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::{NestIndex, SignalSpace};

/// Which side a truncation projection multiplies from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `P_n X`
    Left,
    /// `X P_n`
    Right,
    /// `P_n X P_n`
    Both,
}

/// A linear map between two signal spaces over the same horizon.
///
/// Stored densely: block `(i, j)` has shape
/// `codomain.dim(i) × domain.dim(j)` and maps the input at time `j` to the
/// output at time `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtvOperator {
    domain: SignalSpace,
    codomain: SignalSpace,
    data: DMatrix<f64>,
}

impl LtvOperator {
    pub fn new(domain: SignalSpace, codomain: SignalSpace, data: DMatrix<f64>) -> Result<Self> {
        if domain.horizon() != codomain.horizon() {
            return Err(Error::dims(format!(
                "domain horizon {} differs from codomain horizon {}",
                domain.horizon(),
                codomain.horizon()
            )));
        }
        if data.shape() != (codomain.total_dim(), domain.total_dim()) {
            return Err(Error::dims(format!(
                "entries are {}x{}, block structure needs {}x{}",
                data.nrows(),
                data.ncols(),
                codomain.total_dim(),
                domain.total_dim()
            )));
        }
        Ok(LtvOperator { domain, codomain, data })
    }

    pub fn zeros(domain: SignalSpace, codomain: SignalSpace) -> Self {
        assert_eq!(domain.horizon(), codomain.horizon(), "horizon mismatch");
        let data = DMatrix::zeros(codomain.total_dim(), domain.total_dim());
        LtvOperator { domain, codomain, data }
    }

    pub fn identity(space: SignalSpace) -> Self {
        let n = space.total_dim();
        LtvOperator {
            domain: space.clone(),
            codomain: space,
            data: DMatrix::identity(n, n),
        }
    }

    /// Builds an operator block by block; `f(i, j)` returns block `(i, j)` or
    /// `None` for a zero block.
    pub fn from_blocks<F>(domain: SignalSpace, codomain: SignalSpace, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Option<DMatrix<f64>>,
    {
        let mut op = LtvOperator::zeros(domain, codomain);
        let t = op.horizon();
        for i in 0..t {
            for j in 0..t {
                if let Some(b) = f(i, j) {
                    op.set_block(i, j, &b)?;
                }
            }
        }
        Ok(op)
    }

    pub fn domain(&self) -> &SignalSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &SignalSpace {
        &self.codomain
    }

    pub fn horizon(&self) -> usize {
        self.domain.horizon()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Same block structure, new entries.
    pub fn with_matrix(&self, data: DMatrix<f64>) -> Result<Self> {
        LtvOperator::new(self.domain.clone(), self.codomain.clone(), data)
    }

    pub fn is_square(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn block(&self, i: usize, j: usize) -> DMatrixView<'_, f64> {
        let r = self.codomain.range(i);
        let c = self.domain.range(j);
        self.data.view((r.start, c.start), (r.len(), c.len()))
    }

    pub fn set_block(&mut self, i: usize, j: usize, block: &DMatrix<f64>) -> Result<()> {
        let r = self.codomain.range(i);
        let c = self.domain.range(j);
        if block.shape() != (r.len(), c.len()) {
            return Err(Error::dims(format!(
                "block ({i},{j}) must be {}x{}, got {}x{}",
                r.len(),
                c.len(),
                block.nrows(),
                block.ncols()
            )));
        }
        self.data
            .view_mut((r.start, c.start), (r.len(), c.len()))
            .copy_from(block);
        Ok(())
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &LtvOperator) -> Result<LtvOperator> {
        if self.domain != rhs.codomain {
            return Err(Error::dims("compose: inner signal spaces differ"));
        }
        Ok(LtvOperator {
            domain: rhs.domain.clone(),
            codomain: self.codomain.clone(),
            data: &self.data * &rhs.data,
        })
    }

    /// The adjoint, i.e. the transpose for real scalars.
    pub fn adjoint(&self) -> LtvOperator {
        LtvOperator {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            data: self.data.transpose(),
        }
    }

    pub fn add(&self, rhs: &LtvOperator) -> Result<LtvOperator> {
        self.check_same_shape(rhs, "add")?;
        self.with_matrix(&self.data + &rhs.data)
    }

    pub fn sub(&self, rhs: &LtvOperator) -> Result<LtvOperator> {
        self.check_same_shape(rhs, "sub")?;
        self.with_matrix(&self.data - &rhs.data)
    }

    pub fn scale(&self, factor: f64) -> LtvOperator {
        LtvOperator {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            data: &self.data * factor,
        }
    }

    fn check_same_shape(&self, rhs: &LtvOperator, what: &str) -> Result<()> {
        if self.domain != rhs.domain || self.codomain != rhs.codomain {
            return Err(Error::dims(format!("{what}: operands act between different spaces")));
        }
        Ok(())
    }

    /// Smallest singular value over the diagonal blocks, with the block index
    /// where it occurs. Non-square diagonal blocks report zero.
    pub fn weakest_diagonal_block(&self) -> (usize, f64) {
        let mut worst = (0, f64::INFINITY);
        for k in 0..self.horizon() {
            let b = self.block(k, k).into_owned();
            let s = if b.is_square() {
                linalg::min_singular_value(&b)
            } else {
                0.0
            };
            if s < worst.1 {
                worst = (k, s);
            }
        }
        worst
    }

    /// Inverse of a causal operator by block forward substitution.
    ///
    /// Only the block lower-triangular part is read. Fails when a diagonal
    /// block is singular relative to its own scale.
    pub fn solve_causal_inverse(&self) -> Result<LtvOperator> {
        let t = self.horizon();
        let mut diag_inv = alloc::vec::Vec::with_capacity(t);
        for k in 0..t {
            let b = self.block(k, k).into_owned();
            if !b.is_square() {
                return Err(Error::dims(format!(
                    "diagonal block {k} is {}x{}, causal inverse needs square blocks",
                    b.nrows(),
                    b.ncols()
                )));
            }
            let s = linalg::singular_values(&b);
            let (hi, lo) = (s[0], s[s.len() - 1]);
            if !(lo > 1e-14 * hi.max(1e-300)) || !lo.is_finite() {
                return Err(Error::SingularBlock { block: k, sigma_min: lo });
            }
            let inv = b
                .try_inverse()
                .ok_or(Error::SingularBlock { block: k, sigma_min: lo })?;
            diag_inv.push(inv);
        }
        let mut out = LtvOperator::zeros(self.codomain.clone(), self.domain.clone());
        for (j, inv) in diag_inv.iter().enumerate() {
            out.set_block(j, j, inv)?;
            for (i, inv_i) in diag_inv.iter().enumerate().skip(j + 1) {
                let mut acc = DMatrix::zeros(self.codomain.dim(i), self.codomain.dim(j));
                for k in j..i {
                    acc += self.block(i, k) * out.block(k, j);
                }
                let x = -(inv_i * acc);
                out.set_block(i, j, &x)?;
            }
        }
        Ok(out)
    }

    /// Truncation by `P_n` (or its complement `Q_n = I - P_n`).
    pub fn truncate(&self, n: NestIndex, side: Side, complement: bool) -> LtvOperator {
        let mut data = self.data.clone();
        let rows_kept = self.codomain.kept_by(n);
        let cols_kept = self.domain.kept_by(n);
        let zero_rows = |d: &mut DMatrix<f64>| {
            let total = d.nrows();
            if complement {
                d.rows_mut(0, rows_kept).fill(0.0);
            } else {
                d.rows_mut(rows_kept, total - rows_kept).fill(0.0);
            }
        };
        let zero_cols = |d: &mut DMatrix<f64>| {
            let total = d.ncols();
            if complement {
                d.columns_mut(0, cols_kept).fill(0.0);
            } else {
                d.columns_mut(cols_kept, total - cols_kept).fill(0.0);
            }
        };
        match side {
            Side::Left => zero_rows(&mut data),
            Side::Right => zero_cols(&mut data),
            Side::Both => {
                zero_rows(&mut data);
                zero_cols(&mut data);
            }
        }
        LtvOperator {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            data,
        }
    }

    /// Largest entry above the block diagonal in absolute value.
    pub fn anticausal_magnitude(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in 0..self.data.ncols() {
            let tc = self.domain.time_of(c);
            let rows_before = self.codomain.offset(tc);
            for r in 0..rows_before {
                worst = worst.max(self.data[(r, c)].abs());
            }
        }
        worst
    }

    /// Causality test: `max_n ‖P_n X (I - P_n)‖ <= tol`.
    pub fn is_causal(&self, tol: f64) -> bool {
        let t = self.horizon();
        (0..t.saturating_sub(1)).all(|n| self.corner_norm(n) <= tol)
    }

    /// `P_n X (I - P_n)` as a plain matrix (rows `<= n`, columns `> n`).
    pub fn corner(&self, n: usize) -> DMatrix<f64> {
        let r = self.codomain.offset(n + 1);
        let c = self.domain.offset(n + 1);
        self.data
            .view((0, c), (r, self.data.ncols() - c))
            .into_owned()
    }

    /// Spectral norm of [`corner`](Self::corner).
    pub fn corner_norm(&self, n: usize) -> f64 {
        linalg::spectral_norm(&self.corner(n))
    }

    /// Nest projection `𝒫`: the block lower-triangular part, diagonal included.
    pub fn nest_project(&self) -> LtvOperator {
        self.pattern_filter(|i, j| i >= j)
    }

    /// `(I - 𝒫)`: the strictly block upper-triangular part.
    pub fn anticausal_part(&self) -> LtvOperator {
        self.pattern_filter(|i, j| i < j)
    }

    fn pattern_filter(&self, keep: impl Fn(usize, usize) -> bool) -> LtvOperator {
        let mut data = self.data.clone();
        for c in 0..data.ncols() {
            let tc = self.domain.time_of(c);
            for r in 0..data.nrows() {
                if !keep(self.codomain.time_of(r), tc) {
                    data[(r, c)] = 0.0;
                }
            }
        }
        LtvOperator {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            data,
        }
    }

    pub fn operator_norm(&self) -> f64 {
        linalg::spectral_norm(&self.data)
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Hilbert-Schmidt pairing `tr(Bᵀ A)` with `A = self`.
    pub fn hs_inner(&self, other: &LtvOperator) -> Result<f64> {
        self.check_same_shape(other, "hs_inner")?;
        Ok(self.data.dot(&other.data))
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.data * x
    }

    /// Conjugation by the block-reversal permutation: `J X J`.
    ///
    /// Maps causal operators to anticausal ones and back; combined with the
    /// adjoint it maps causal operators to causal operators.
    pub fn time_reversed(&self) -> LtvOperator {
        let dom = self.domain.reversed();
        let cod = self.codomain.reversed();
        let t = self.horizon();
        LtvOperator::from_blocks(dom, cod, |i, j| Some(self.block(t - 1 - i, t - 1 - j).into_owned()))
            .expect("reversed blocks have matching shapes")
    }
}
