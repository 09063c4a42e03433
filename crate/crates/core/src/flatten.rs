//! Explicit matrices of linear maps between spaces of operators.
//!
//! Operators are flattened by listing the scalar entries allowed by a block
//! pattern (causal or strictly anticausal). Those elementary coordinates are
//! orthonormal for the Hilbert-Schmidt inner product, so spectral norms and
//! singular vectors of a [`FlattenedMap`] are those of the operator map.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::linalg;
use crate::operator::LtvOperator;
use crate::space::{NestIndex, SignalSpace};

/// Block pattern of a coordinate space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Block `(i, j)` with `i >= j`; the causal Hilbert-Schmidt class.
    Causal,
    /// Block `(i, j)` with `i < j`; the complement of the causal class.
    StrictlyAnticausal,
}

/// One scalar entry of one component of an operator tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coord {
    pub component: usize,
    pub row: usize,
    pub col: usize,
}

/// Ordered elementary basis of a subspace of operator tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordSpace {
    /// `(codomain, domain)` of each component.
    shapes: Vec<(SignalSpace, SignalSpace)>,
    region: Region,
    coords: Vec<Coord>,
}

impl CoordSpace {
    pub fn new(shapes: Vec<(SignalSpace, SignalSpace)>, region: Region) -> Self {
        Self::filtered(shapes, region, |_| true)
    }

    /// Causal tuples whose rows vanish up to time `n`: `(I − P_n) X = X`.
    pub fn causal_after(shapes: Vec<(SignalSpace, SignalSpace)>, n: NestIndex) -> Self {
        let keep_from = |cod: &SignalSpace| cod.kept_by(n);
        let starts: Vec<usize> = shapes.iter().map(|(cod, _)| keep_from(cod)).collect();
        Self::filtered(shapes, Region::Causal, move |c: &Coord| c.row >= starts[c.component])
    }

    fn filtered(
        shapes: Vec<(SignalSpace, SignalSpace)>,
        region: Region,
        keep: impl Fn(&Coord) -> bool,
    ) -> Self {
        let mut coords = Vec::new();
        for (component, (cod, dom)) in shapes.iter().enumerate() {
            for col in 0..dom.total_dim() {
                let tc = dom.time_of(col);
                for row in 0..cod.total_dim() {
                    let tr = cod.time_of(row);
                    let inside = match region {
                        Region::Causal => tr >= tc,
                        Region::StrictlyAnticausal => tr < tc,
                    };
                    let c = Coord { component, row, col };
                    if inside && keep(&c) {
                        coords.push(c);
                    }
                }
            }
        }
        CoordSpace { shapes, region, coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn shapes(&self) -> &[(SignalSpace, SignalSpace)] {
        &self.shapes
    }

    /// Zero matrices shaped like each component.
    pub fn zeros(&self) -> Vec<DMatrix<f64>> {
        self.shapes
            .iter()
            .map(|(cod, dom)| DMatrix::zeros(cod.total_dim(), dom.total_dim()))
            .collect()
    }

    /// Coordinates of a tuple; entries outside the pattern are dropped, which
    /// is the orthogonal projection onto this subspace.
    pub fn pack(&self, parts: &[DMatrix<f64>]) -> DVector<f64> {
        debug_assert_eq!(parts.len(), self.shapes.len());
        DVector::from_iterator(
            self.coords.len(),
            self.coords.iter().map(|c| parts[c.component][(c.row, c.col)]),
        )
    }

    pub fn unpack(&self, v: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut parts = self.zeros();
        for (c, x) in self.coords.iter().zip(v.iter()) {
            parts[c.component][(c.row, c.col)] = *x;
        }
        parts
    }

    /// [`unpack`](Self::unpack) into block operators.
    pub fn unpack_operators(&self, v: &DVector<f64>) -> Result<Vec<LtvOperator>> {
        self.unpack(v)
            .into_iter()
            .zip(&self.shapes)
            .map(|(m, (cod, dom))| LtvOperator::new(dom.clone(), cod.clone(), m))
            .collect()
    }

    /// Embedding of this coordinate space into a larger one with the same
    /// component shapes: column `k` is the unit vector of coordinate `k`.
    pub fn embedding_into(&self, ambient: &CoordSpace) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(ambient.len(), self.len());
        for (k, c) in self.coords.iter().enumerate() {
            if let Some(pos) = ambient.coords.iter().position(|a| a == c) {
                e[(pos, k)] = 1.0;
            }
        }
        e
    }
}

/// Matrix of a linear map between two coordinate spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenedMap {
    pub domain: CoordSpace,
    pub codomain: CoordSpace,
    pub matrix: DMatrix<f64>,
}

impl FlattenedMap {
    /// Tabulates `map` on every elementary input of `domain`.
    pub fn from_fn<F>(domain: CoordSpace, codomain: CoordSpace, mut map: F) -> Self
    where
        F: FnMut(&[DMatrix<f64>]) -> Vec<DMatrix<f64>>,
    {
        let mut matrix = DMatrix::zeros(codomain.len(), domain.len());
        let mut input = domain.zeros();
        for (k, c) in domain.coords.iter().enumerate() {
            input[c.component][(c.row, c.col)] = 1.0;
            let out = map(&input);
            matrix.set_column(k, &codomain.pack(&out));
            input[c.component][(c.row, c.col)] = 0.0;
        }
        FlattenedMap { domain, codomain, matrix }
    }

    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.matrix)
    }

    pub fn svd(&self) -> linalg::SortedSvd {
        linalg::svd(&self.matrix)
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }
}
