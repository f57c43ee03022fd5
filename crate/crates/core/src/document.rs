//! The on-disk document format for states, maps, and channels.
//!
//! One self-describing JSON document per object; complex entries are
//! two-element `[real, imaginary]` arrays. Parsing accepts any valid JSON
//! layout of the fields; serialization is canonical (fixed field order,
//! 17-significant-digit floats), so parse -> serialize is byte-stable and
//! documents are diffable in tests.

use num_complex::Complex64;
use serde::Deserialize;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DEFAULT_TOL};
use crate::maps::ElementaryOperator;
use crate::states::BipartiteState;

/// Parsed and shape-validated document content.
#[derive(Debug, Clone)]
pub enum MatrixDocument {
    State {
        dim_a: usize,
        dim_b: usize,
        matrix: ComplexMatrix,
    },
    Map {
        dim_in: usize,
        dim_out: usize,
        label: String,
        plus_kraus: Vec<ComplexMatrix>,
        minus_kraus: Vec<ComplexMatrix>,
    },
    Channel {
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<ComplexMatrix>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawDocument {
    State {
        dim_a: usize,
        dim_b: usize,
        matrix: Vec<Vec<[f64; 2]>>,
    },
    Map {
        dim_in: usize,
        dim_out: usize,
        #[serde(default)]
        label: String,
        plus_kraus: Vec<Vec<Vec<[f64; 2]>>>,
        minus_kraus: Vec<Vec<Vec<[f64; 2]>>>,
    },
    Channel {
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>], expect_rows: usize, expect_cols: usize) -> Result<ComplexMatrix> {
    if rows.len() != expect_rows {
        return Err(Error::Parse(format!(
            "matrix has {} rows, declared dimensions require {expect_rows}",
            rows.len()
        )));
    }
    let mut data = Vec::with_capacity(expect_rows * expect_cols);
    for row in rows {
        if row.len() != expect_cols {
            return Err(Error::Parse(format!(
                "matrix row has {} entries, declared dimensions require {expect_cols}",
                row.len()
            )));
        }
        for &[re, im] in row {
            data.push(Complex64::new(re, im));
        }
    }
    ComplexMatrix::new(expect_rows, expect_cols, data)
}

impl MatrixDocument {
    /// Parse a JSON document and validate array shapes against the
    /// declared dimensions. State/map/channel *semantic* invariants (PSD,
    /// trace, channel audit) are checked on conversion, not here.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match raw {
            RawDocument::State {
                dim_a,
                dim_b,
                matrix,
            } => {
                if dim_a == 0 || dim_b == 0 {
                    return Err(Error::Parse(
                        "state dimensions must be positive".to_string(),
                    ));
                }
                let d = dim_a
                    .checked_mul(dim_b)
                    .ok_or_else(|| Error::Parse("state dimensions overflow".to_string()))?;
                if d > 4096 {
                    return Err(Error::Parse(format!(
                        "total dimension {d} exceeds the supported maximum 4096"
                    )));
                }
                let matrix = rows_to_matrix(&matrix, d, d)?;
                Ok(MatrixDocument::State {
                    dim_a,
                    dim_b,
                    matrix,
                })
            }
            RawDocument::Map {
                dim_in,
                dim_out,
                label,
                plus_kraus,
                minus_kraus,
            } => {
                check_map_dims(dim_in, dim_out)?;
                let parse_family = |family: &[Vec<Vec<[f64; 2]>>]| -> Result<Vec<ComplexMatrix>> {
                    family
                        .iter()
                        .map(|rows| rows_to_matrix(rows, dim_out, dim_in))
                        .collect()
                };
                Ok(MatrixDocument::Map {
                    dim_in,
                    dim_out,
                    label,
                    plus_kraus: parse_family(&plus_kraus)?,
                    minus_kraus: parse_family(&minus_kraus)?,
                })
            }
            RawDocument::Channel {
                dim_in,
                dim_out,
                kraus,
            } => {
                check_map_dims(dim_in, dim_out)?;
                let kraus = kraus
                    .iter()
                    .map(|rows| rows_to_matrix(rows, dim_out, dim_in))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MatrixDocument::Channel {
                    dim_in,
                    dim_out,
                    kraus,
                })
            }
        }
    }

    /// Canonical serialization: fixed field order, matrices one row per
    /// line, every float in 17-significant-digit scientific notation.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        match self {
            MatrixDocument::State {
                dim_a,
                dim_b,
                matrix,
            } => {
                out.push_str("{\n  \"kind\": \"state\",\n");
                out.push_str(&format!("  \"dim_a\": {dim_a},\n"));
                out.push_str(&format!("  \"dim_b\": {dim_b},\n"));
                out.push_str("  \"matrix\": ");
                write_matrix(&mut out, matrix, "  ");
                out.push_str("\n}\n");
            }
            MatrixDocument::Map {
                dim_in,
                dim_out,
                label,
                plus_kraus,
                minus_kraus,
            } => {
                out.push_str("{\n  \"kind\": \"map\",\n");
                out.push_str(&format!("  \"dim_in\": {dim_in},\n"));
                out.push_str(&format!("  \"dim_out\": {dim_out},\n"));
                out.push_str(&format!(
                    "  \"label\": {},\n",
                    serde_json::to_string(label).expect("strings serialize")
                ));
                out.push_str("  \"plus_kraus\": ");
                write_family(&mut out, plus_kraus, "  ");
                out.push_str(",\n  \"minus_kraus\": ");
                write_family(&mut out, minus_kraus, "  ");
                out.push_str("\n}\n");
            }
            MatrixDocument::Channel {
                dim_in,
                dim_out,
                kraus,
            } => {
                out.push_str("{\n  \"kind\": \"channel\",\n");
                out.push_str(&format!("  \"dim_in\": {dim_in},\n"));
                out.push_str(&format!("  \"dim_out\": {dim_out},\n"));
                out.push_str("  \"kraus\": ");
                write_family(&mut out, kraus, "  ");
                out.push_str("\n}\n");
            }
        }
        out
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MatrixDocument::State { .. } => "state",
            MatrixDocument::Map { .. } => "map",
            MatrixDocument::Channel { .. } => "channel",
        }
    }

    /// Convert into a validated bipartite state.
    pub fn into_state(self) -> Result<BipartiteState> {
        match self {
            MatrixDocument::State {
                dim_a,
                dim_b,
                matrix,
            } => BipartiteState::new(dim_a, dim_b, matrix),
            other => Err(Error::WrongDocumentKind {
                expected: "state",
                found: other.kind().to_string(),
            }),
        }
    }

    /// Convert into an elementary operator. Channel documents convert too
    /// (all-plus family).
    pub fn into_map(self) -> Result<ElementaryOperator> {
        match self {
            MatrixDocument::Map {
                dim_in,
                dim_out,
                label,
                plus_kraus,
                minus_kraus,
            } => ElementaryOperator::new(dim_in, dim_out, plus_kraus, minus_kraus, label),
            MatrixDocument::Channel {
                dim_in,
                dim_out,
                kraus,
            } => ElementaryOperator::new(dim_in, dim_out, kraus, vec![], "channel"),
            other => Err(Error::WrongDocumentKind {
                expected: "map",
                found: other.kind().to_string(),
            }),
        }
    }

    /// Convert into an audited quantum channel.
    pub fn into_channel(self) -> Result<QuantumChannel> {
        match self {
            MatrixDocument::Channel {
                dim_in,
                dim_out,
                kraus,
            } => QuantumChannel::new(dim_in, dim_out, kraus, DEFAULT_TOL),
            other => Err(Error::WrongDocumentKind {
                expected: "channel",
                found: other.kind().to_string(),
            }),
        }
    }

    pub fn from_state(state: &BipartiteState) -> Self {
        MatrixDocument::State {
            dim_a: state.dim_a(),
            dim_b: state.dim_b(),
            matrix: state.matrix().clone(),
        }
    }

    pub fn from_map(map: &ElementaryOperator) -> Self {
        MatrixDocument::Map {
            dim_in: map.dim_in(),
            dim_out: map.dim_out(),
            label: map.label().to_string(),
            plus_kraus: map.plus_kraus().to_vec(),
            minus_kraus: map.minus_kraus().to_vec(),
        }
    }

    pub fn from_channel(channel: &QuantumChannel) -> Self {
        MatrixDocument::Channel {
            dim_in: channel.dim_in(),
            dim_out: channel.dim_out(),
            kraus: channel.kraus().to_vec(),
        }
    }
}

fn check_map_dims(dim_in: usize, dim_out: usize) -> Result<()> {
    if dim_in == 0 || dim_out == 0 {
        return Err(Error::Parse("map dimensions must be positive".to_string()));
    }
    if dim_in > 4096 || dim_out > 4096 {
        return Err(Error::Parse(format!(
            "map dimension {}x{} exceeds the supported maximum 4096",
            dim_out, dim_in
        )));
    }
    Ok(())
}

/// 17 significant digits: enough to reproduce any f64 exactly on reparse.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_matrix(out: &mut String, m: &ComplexMatrix, indent: &str) {
    out.push_str("[\n");
    for i in 0..m.rows() {
        out.push_str(indent);
        out.push_str("  [");
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            let z = m.get(i, j);
            out.push('[');
            out.push_str(&fmt_float(z.re));
            out.push(',');
            out.push_str(&fmt_float(z.im));
            out.push(']');
        }
        out.push(']');
        if i + 1 < m.rows() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(indent);
    out.push(']');
}

fn write_family(out: &mut String, family: &[ComplexMatrix], indent: &str) {
    if family.is_empty() {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    let inner = format!("{indent}  ");
    for (idx, m) in family.iter().enumerate() {
        out.push_str(&inner);
        write_matrix(out, m, &inner);
        if idx + 1 < family.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(indent);
    out.push(']');
}

/// Parse a comma-separated list of real numbers ("1, 0.5, -2e-3").
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("empty number list".to_string()));
    }
    trimmed
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a real number: \"{tok}\"")))
                .and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(Error::Parse(format!("number is not finite: \"{tok}\"")))
                    }
                })
        })
        .collect()
}
