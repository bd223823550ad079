//! On-disk JSON formats.
//!
//! System file:
//!
//! ```json
//! {
//!   "dimension": 4,
//!   "weights": ["1/4", "1/4", "1/4", "1/4"],
//!   "partition": [[0, 1, 2, 3]],
//!   "map": [1, 2, 3, 0]
//! }
//! ```
//!
//! `map[i]` is `sigma(i)`, so `(Sf)_i = f_{map[i]}`. A tensor product adds
//! `"tensor_of": [left, right]` holding both factor systems; the composite is
//! still stored explicitly and validated on its own.
//!
//! Sequence file for KvN runs: either a finite prefix `{"values": [[..], ..]}`
//! or an exact sequence `{"preperiod": [..], "period": [..]}`, each entry an
//! element (array of rational strings). An optional `"thresholds"` array of
//! strictly decreasing positive rationals replaces the default `1/m` schedule.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_dim, Element};
use crate::mixing::Thresholds;
use crate::operators::{validate_ceps, Ceps, ConditionalExpectationOp, RieszHomMap};
use crate::rational::{self, Rational};
use crate::tensor::tensor_ceps;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub dimension: usize,
    #[serde(with = "rational::vec")]
    pub weights: Vec<Rational>,
    pub partition: Vec<Vec<usize>>,
    pub map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor_of: Option<Vec<SystemFile>>,
}

impl SystemFile {
    pub fn from_ceps(sys: &Ceps) -> Self {
        SystemFile {
            dimension: sys.dimension(),
            weights: sys.t().weights().to_vec(),
            partition: sys.t().blocks().to_vec(),
            map: sys.s().sigma().to_vec(),
            tensor_of: None,
        }
    }

    pub fn tensor(left: &SystemFile, right: &SystemFile, composite: &Ceps) -> Self {
        SystemFile {
            tensor_of: Some(vec![left.clone(), right.clone()]),
            ..SystemFile::from_ceps(composite)
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("system files always serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    /// Structural checks, then `TS = T`. Tensor files also re-validate both
    /// factors and require the composite to equal their product.
    pub fn to_ceps(&self) -> Result<Ceps> {
        check_dim(self.dimension, self.weights.len())?;
        check_dim(self.dimension, self.map.len())?;
        let t = ConditionalExpectationOp::new(self.partition.clone(), self.weights.clone())?;
        let s = RieszHomMap::new(self.map.clone())?;
        let sys = validate_ceps(t, s)?;
        if let Some(factors) = &self.tensor_of {
            let [left, right] = factors.as_slice() else {
                return Err(Error::InvalidConfig(format!(
                    "tensor_of must hold exactly 2 systems, found {}",
                    factors.len()
                )));
            };
            let product = tensor_ceps(&left.to_ceps()?, &right.to_ceps()?)?;
            if SystemFile::from_ceps(&product) != SystemFile::from_ceps(&sys) {
                return Err(Error::InvalidConfig(
                    "composite system differs from the product of tensor_of".into(),
                ));
            }
        }
        Ok(sys)
    }
}

pub fn read_system(path: &Path) -> Result<Ceps> {
    SystemFile::read(path)?.to_ceps()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Element>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preperiod: Option<Vec<Element>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<Element>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Element>,
}

impl SequenceFile {
    pub fn prefix(values: Vec<Element>) -> Self {
        SequenceFile {
            values: Some(values),
            preperiod: None,
            period: None,
            thresholds: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("sequence files always serialize");
        s.push('\n');
        s
    }

    /// The first `horizon` terms. Exact sequences extend to any horizon.
    pub fn terms(&self, horizon: usize) -> Result<Vec<Element>> {
        match (&self.values, &self.period) {
            (Some(values), None) if self.preperiod.is_none() => {
                if values.is_empty() {
                    return Err(Error::EmptySequence);
                }
                if horizon > values.len() {
                    return Err(Error::InvalidConfig(format!(
                        "horizon {horizon} exceeds the {} stored values",
                        values.len()
                    )));
                }
                Ok(values[..horizon].to_vec())
            }
            (None, Some(period)) => {
                if period.is_empty() {
                    return Err(Error::EmptySequence);
                }
                let pre = self.preperiod.clone().unwrap_or_default();
                Ok((0..horizon)
                    .map(|k| {
                        if k < pre.len() {
                            pre[k].clone()
                        } else {
                            period[(k - pre.len()) % period.len()].clone()
                        }
                    })
                    .collect())
            }
            _ => Err(Error::InvalidSequence(
                "expected either \"values\" or \"period\" (with optional \"preperiod\")".into(),
            )),
        }
    }

    pub fn thresholds(&self) -> Result<Thresholds> {
        match &self.thresholds {
            None => Ok(Thresholds::Harmonic),
            Some(e) => Thresholds::custom(e.coords().to_vec()),
        }
    }
}
