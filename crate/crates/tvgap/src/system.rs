//! Input documents describing a plant and their lifting to an operator.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use tvgap_core::lift::{lift_state_space, toeplitz_lift, toeplitz_lift_scalar, StateSpaceSequence};
use tvgap_core::{LtvOperator, SignalSpace, STRUCTURAL_TOL};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Dense matrix as a list of rows.
pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDescription {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub name: String,
    pub horizon: usize,
    #[serde(flatten)]
    pub system: Payload,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Payload {
    Fir(FirPayload),
    StateSpace(StateSpacePayload),
    BlockMatrix(BlockMatrixPayload),
}

/// Time-invariant impulse response `h_0, h_1, …`, either scalar (applied as
/// `h_k I` on `block_dim`-dimensional signals) or as matrix blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_blocks: Option<Vec<Rows>>,
}

/// `x_{k+1} = A_k x_k + B_k u_k`, `y_k = C_k x_k + D_k u_k`, `x_0 = 0`.
/// Each list holds one matrix per step, or a single matrix used at every
/// step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpacePayload {
    pub a: Vec<Rows>,
    pub b: Vec<Rows>,
    pub c: Vec<Rows>,
    pub d: Vec<Rows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockMatrixPayload {
    pub input_dims: Vec<usize>,
    pub output_dims: Vec<usize>,
    #[serde(default = "yes")]
    pub causal: bool,
    pub matrix: Rows,
}

fn yes() -> bool {
    true
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn parse_system(text: &str) -> Result<SystemDescription, CliError> {
    let desc: SystemDescription =
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed system description: {e}")))?;
    desc.validate()?;
    Ok(desc)
}

pub fn rows_to_matrix(rows: &Rows, field: &str) -> Result<DMatrix<f64>, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(invalid(format!("{field}: matrix must be nonempty")));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(invalid(format!("{field}[{i}]: row has {} entries, expected {c}", row.len())));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("{field}[{i}][{j}]: non-finite number")));
        }
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl SystemDescription {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != FORMAT_VERSION {
            return Err(invalid(format!(
                "version: unsupported format version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        self.lift().map(|_| ())
    }

    /// Replaces the horizon; block matrices have a fixed horizon.
    pub fn with_horizon(mut self, horizon: usize) -> Result<Self, CliError> {
        if let Payload::BlockMatrix(_) = self.system {
            if horizon != self.horizon {
                return Err(invalid("--horizon: a block_matrix system has a fixed horizon"));
            }
        }
        self.horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    pub fn lift(&self) -> Result<LtvOperator, CliError> {
        let t = self.horizon;
        if t == 0 {
            return Err(invalid("horizon: must be at least 1"));
        }
        match &self.system {
            Payload::Fir(p) => lift_fir(p, t),
            Payload::StateSpace(p) => lift_ss(p, t),
            Payload::BlockMatrix(p) => lift_block(p, t),
        }
    }
}

fn lift_fir(p: &FirPayload, t: usize) -> Result<LtvOperator, CliError> {
    match (&p.h, &p.h_blocks) {
        (Some(h), None) => {
            if h.is_empty() {
                return Err(invalid("payload.h: impulse response must be nonempty"));
            }
            if let Some(k) = h.iter().position(|v| !v.is_finite()) {
                return Err(invalid(format!("payload.h[{k}]: non-finite number")));
            }
            let dim = p.block_dim.unwrap_or(1);
            if dim == 0 {
                return Err(invalid("payload.block_dim: must be at least 1"));
            }
            Ok(toeplitz_lift_scalar(h, dim, t)?)
        }
        (None, Some(blocks)) => {
            if blocks.is_empty() {
                return Err(invalid("payload.h_blocks: impulse response must be nonempty"));
            }
            if p.block_dim.is_some() {
                return Err(invalid("payload.block_dim: only valid with scalar h"));
            }
            let mats = blocks
                .iter()
                .enumerate()
                .map(|(k, b)| rows_to_matrix(b, &format!("payload.h_blocks[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(toeplitz_lift(&mats, t)?)
        }
        _ => Err(invalid("payload: give exactly one of h and h_blocks")),
    }
}

fn per_step(list: &[Rows], t: usize, field: &str) -> Result<Vec<DMatrix<f64>>, CliError> {
    let mats = list
        .iter()
        .enumerate()
        .map(|(k, m)| rows_to_matrix(m, &format!("payload.{field}[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    match mats.len() {
        1 => Ok(vec![mats[0].clone(); t]),
        n if n == t => Ok(mats),
        n => Err(invalid(format!("payload.{field}: {n} matrices for horizon {t} (give 1 or {t})"))),
    }
}

fn lift_ss(p: &StateSpacePayload, t: usize) -> Result<LtvOperator, CliError> {
    let seq = StateSpaceSequence {
        a: per_step(&p.a, t, "a")?,
        b: per_step(&p.b, t, "b")?,
        c: per_step(&p.c, t, "c")?,
        d: per_step(&p.d, t, "d")?,
    };
    lift_state_space(&seq).map_err(|e| invalid(format!("payload: {e}")))
}

fn lift_block(p: &BlockMatrixPayload, t: usize) -> Result<LtvOperator, CliError> {
    if p.input_dims.len() != t || p.output_dims.len() != t {
        return Err(invalid(format!(
            "payload: input_dims/output_dims must have one entry per step (horizon {t})"
        )));
    }
    let dom = SignalSpace::new(p.input_dims.clone()).map_err(|e| invalid(format!("payload.input_dims: {e}")))?;
    let cod = SignalSpace::new(p.output_dims.clone()).map_err(|e| invalid(format!("payload.output_dims: {e}")))?;
    let m = rows_to_matrix(&p.matrix, "payload.matrix")?;
    if m.shape() != (cod.total_dim(), dom.total_dim()) {
        return Err(invalid(format!(
            "payload.matrix: shape {}x{} does not match output/input dims {}x{}",
            m.nrows(),
            m.ncols(),
            cod.total_dim(),
            dom.total_dim()
        )));
    }
    let op = LtvOperator::new(dom, cod, m)?;
    if p.causal {
        let anti = op.anticausal_magnitude();
        if anti > STRUCTURAL_TOL * op.matrix().amax().max(1.0) {
            return Err(invalid(format!(
                "payload.matrix: declared causal but has an entry of size {anti:e} above the block diagonal"
            )));
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_fir_lifts_to_the_shift() {
        let d = parse_system(r#"{"kind":"fir","horizon":4,"payload":{"h":[0,1]}}"#).unwrap();
        let op = d.lift().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(op.matrix()[(i, j)], if i == j + 1 { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn malformed_documents_report_position() {
        let err = parse_system("{\"kind\": \"fir\",\n \"horizon\": }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn shape_errors_name_the_field() {
        let text = r#"{"kind":"state_space","horizon":2,"payload":{"a":[[[0]]],"b":[[[1]]],"c":[[[1, 2]]],"d":[[[0]]]}}"#;
        let err = parse_system(text).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        let text = r#"{"kind":"fir","horizon":2,"payload":{"h_blocks":[[[1, 2], [3]]]}}"#;
        assert!(parse_system(text).unwrap_err().to_string().contains("payload.h_blocks[0][1]"));
    }

    #[test]
    fn declared_causal_block_matrix_is_checked() {
        let text = r#"{"kind":"block_matrix","horizon":2,"payload":{"input_dims":[1,1],"output_dims":[1,1],"matrix":[[1,2],[0,1]]}}"#;
        assert!(parse_system(text).is_err());
        let text = r#"{"kind":"block_matrix","horizon":2,"payload":{"input_dims":[1,1],"output_dims":[1,1],"causal":false,"matrix":[[1,2],[0,1]]}}"#;
        assert!(parse_system(text).is_ok());
    }

    #[test]
    fn horizon_override() {
        let d = parse_system(r#"{"kind":"fir","horizon":2,"payload":{"h":[0,1]}}"#).unwrap();
        assert_eq!(d.clone().with_horizon(5).unwrap().lift().unwrap().horizon(), 5);
        assert!(d.with_horizon(0).is_err());
        let b = parse_system(r#"{"kind":"block_matrix","horizon":1,"payload":{"input_dims":[1],"output_dims":[1],"matrix":[[2]]}}"#).unwrap();
        assert!(b.with_horizon(3).is_err());
    }
}
