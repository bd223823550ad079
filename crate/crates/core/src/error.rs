use serde_json::json;
use thiserror::Error;

use crate::lattice::Element;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptySpace,

    #[error("negative coordinate at index {index}")]
    NegativeInput { index: usize },

    #[error("element is not a component of e (coordinate {index} is {value})")]
    NotAComponent { index: usize, value: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("weight at index {index} is not strictly positive: {value}")]
    NonPositiveWeight { index: usize, value: String },

    #[error("map sends {index} to {value}, outside 0..{dimension}")]
    MapOutOfRange {
        index: usize,
        value: usize,
        dimension: usize,
    },

    /// `T S delta_j != T delta_j` for the reported basis index.
    #[error("system is not conditional-expectation preserving: T S e_{witness} != T e_{witness}")]
    NotMeasurePreserving {
        witness: usize,
        ts: Element,
        t: Element,
    },

    #[error("sequence is empty")]
    EmptySequence,

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error(
        "Cesaro averages do not vanish: stalled at checkpoint {checkpoint} (coordinate {coordinate}, average {average})"
    )]
    CesaroNotVanishing {
        checkpoint: usize,
        coordinate: usize,
        average: String,
    },

    #[error("threshold schedule must be strictly decreasing and positive")]
    InvalidThresholds,

    #[error("j is only defined on a square tensor space ({left} x {right})")]
    NonSquareTensor { left: usize, right: usize },

    #[error("tensor dimension {dimension} exceeds cap {cap}")]
    TensorTooLarge { dimension: usize, cap: usize },

    #[error("period {0} is too long to materialise")]
    PeriodTooLong(u128),

    #[error("invalid rational {0:?}")]
    ParseRational(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// An internal invariant failed; always a bug.
    #[error("internal defect: {0}")]
    Defect(String),
}

/// Process exit codes used by the `rse` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVALID_INPUT: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const DEFECT: i32 = 4;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CesaroNotVanishing { .. } => exit::PRECONDITION,
            Error::Defect(_) => exit::DEFECT,
            _ => exit::INVALID_INPUT,
        }
    }

    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptySpace => "empty_space",
            Error::NegativeInput { .. } => "negative_input",
            Error::NotAComponent { .. } => "not_a_component",
            Error::InvalidPartition(_) => "invalid_partition",
            Error::NonPositiveWeight { .. } => "non_positive_weight",
            Error::MapOutOfRange { .. } => "map_out_of_range",
            Error::NotMeasurePreserving { .. } => "not_measure_preserving",
            Error::EmptySequence => "empty_sequence",
            Error::InvalidSequence(_) => "invalid_sequence",
            Error::CesaroNotVanishing { .. } => "cesaro_not_vanishing",
            Error::InvalidThresholds => "invalid_thresholds",
            Error::NonSquareTensor { .. } => "non_square_tensor",
            Error::TensorTooLarge { .. } => "tensor_too_large",
            Error::PeriodTooLong(_) => "period_too_long",
            Error::ParseRational(_) => "parse_rational",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
            Error::Defect(_) => "defect",
        }
    }

    /// `{"kind", "message", ...witness fields}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "kind": self.kind(), "message": self.to_string() });
        let extra = match self {
            Error::DimensionMismatch { expected, found } => json!({ "expected": expected, "found": found }),
            Error::NegativeInput { index } => json!({ "index": index }),
            Error::NotAComponent { index, value } => json!({ "index": index, "value": value }),
            Error::NonPositiveWeight { index, value } => json!({ "index": index, "value": value }),
            Error::MapOutOfRange { index, value, dimension } => {
                json!({ "index": index, "value": value, "dimension": dimension })
            }
            Error::NotMeasurePreserving { witness, ts, t } => json!({ "witness": witness, "ts": ts, "t": t }),
            Error::CesaroNotVanishing {
                checkpoint,
                coordinate,
                average,
            } => json!({ "checkpoint": checkpoint, "coordinate": coordinate, "average": average }),
            Error::NonSquareTensor { left, right } => json!({ "left": left, "right": right }),
            Error::TensorTooLarge { dimension, cap } => json!({ "dimension": dimension, "cap": cap }),
            _ => json!({}),
        };
        if let (Some(obj), serde_json::Value::Object(fields)) = (v.as_object_mut(), extra) {
            obj.extend(fields);
        }
        v
    }
}
