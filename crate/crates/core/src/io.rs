//! JSON file formats and report documents.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{FairError, Result};
use crate::model::{Clustering, Color, ColoredInstance};
use crate::pipeline::{Factor, GuaranteeReport};
use crate::workspace::Transcript;

/// `{"n": 4, "colors": "RBRB", "p": 1, "q": 1}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub colors: String,
    pub p: usize,
    pub q: usize,
}

impl InstanceFile {
    /// Writes the caller's original colors and ratio, undoing any swap.
    pub fn from_instance(instance: &ColoredInstance) -> Self {
        let (p, q) = instance.given_ratio();
        Self {
            n: instance.n(),
            colors: instance.original_colors().into_iter().map(Color::to_char).collect(),
            p,
            q,
        }
    }

    pub fn to_instance(&self) -> Result<ColoredInstance> {
        let colors = self
            .colors
            .chars()
            .map(|c| Color::from_char(c).ok_or_else(|| FairError::InvalidFile(format!("unknown color {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if colors.len() != self.n {
            return Err(FairError::InvalidFile(format!(
                "colors has {} entries but n = {}",
                colors.len(),
                self.n
            )));
        }
        ColoredInstance::new(colors, self.p, self.q)
    }
}

/// `{"labels": [0, 0, 1, 1]}`; any integers, normalized on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteringFile {
    pub labels: Vec<i64>,
}

impl ClusteringFile {
    pub fn from_clustering(c: &Clustering) -> Self {
        Self {
            labels: c.labels().iter().map(|&l| l as i64).collect(),
        }
    }

    /// Normalizes labels, checking the length against `n` when given.
    pub fn to_clustering(&self, n: Option<usize>) -> Result<Clustering> {
        match n {
            Some(n) => Clustering::normalize(&self.labels, n),
            None => Ok(Clustering::from_labels(&self.labels)),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<ColoredInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| FairError::InvalidFile(e.to_string()))?;
    file.to_instance()
}

pub fn parse_clustering(text: &str, n: Option<usize>) -> Result<Clustering> {
    let file: ClusteringFile = serde_json::from_str(text).map_err(|e| FairError::InvalidFile(e.to_string()))?;
    file.to_clustering(n)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| FairError::InvalidFile(format!("{}: {e}", path.display())))
}

pub fn read_instance(path: &Path) -> Result<ColoredInstance> {
    parse_instance(&read(path)?)
}

pub fn read_clustering(path: &Path, n: Option<usize>) -> Result<Clustering> {
    parse_clustering(&read(path)?, n)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

/// Integral factors print as integers, others as decimals.
pub fn factor_json(f: Factor) -> Value {
    if f.is_integer() {
        Value::from(*f.numer())
    } else {
        Value::from(*f.numer() as f64 / *f.denom() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageEntry {
    pub stage: String,
    pub distance: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosestFairReport {
    pub regime: String,
    pub p: usize,
    pub q: usize,
    pub colors_swapped: bool,
    pub alpha: Value,
    pub beta: Option<Value>,
    pub composed_factor: Value,
    pub achieved_distance: u64,
    pub stage_distances: Vec<StageEntry>,
    pub points_moved: usize,
}

impl ClosestFairReport {
    pub fn new(instance: &ColoredInstance, report: &GuaranteeReport, transcript: &Transcript) -> Self {
        Self {
            regime: report.label().to_string(),
            p: instance.p(),
            q: instance.q(),
            colors_swapped: instance.swapped(),
            alpha: factor_json(report.guarantee.alpha),
            beta: report.guarantee.beta.map(factor_json),
            composed_factor: factor_json(report.composed_factor),
            achieved_distance: report.achieved_distance,
            stage_distances: report
                .stages
                .iter()
                .map(|s| StageEntry {
                    stage: s.stage.to_string(),
                    distance: s.distance,
                })
                .collect(),
            points_moved: transcript.points_moved(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub optimum: f64,
    pub partitions_enumerated: u64,
    pub within_factor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusReport {
    pub regime: String,
    pub ell: String,
    pub chosen: usize,
    pub objective: f64,
    pub distances: Vec<u64>,
    pub factor: Value,
    pub colors_swapped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub mode: String,
    pub optimum: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<u64>>,
    pub argmin: Vec<usize>,
    pub partitions_enumerated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub elements: Vec<u64>,
    pub p: usize,
    pub q: usize,
    pub target: u64,
    pub tau: Value,
    pub experimental: bool,
    pub point_count: usize,
    pub oracle_checkable: bool,
}

impl ReductionReport {
    pub fn new(r: &crate::instances::ReductionInstance) -> Self {
        Self {
            elements: r.elements.clone(),
            p: r.p,
            q: r.q,
            target: r.target,
            tau: factor_json(r.tau),
            experimental: r.experimental,
            point_count: r.point_count,
            oracle_checkable: r.oracle_checkable,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip_keeps_caller_orientation() {
        let text = r#"{"n": 5, "colors": "RRRBB", "p": 2, "q": 3}"#;
        let inst = parse_instance(text).unwrap();
        assert!(inst.swapped());
        assert_eq!((inst.p(), inst.q()), (3, 2));
        let back = InstanceFile::from_instance(&inst);
        assert_eq!(back, serde_json::from_str::<InstanceFile>(text).unwrap());
    }

    #[test]
    fn rejects_malformed_instances() {
        assert!(matches!(
            parse_instance(r#"{"n": 3, "colors": "RB", "p": 1, "q": 1}"#),
            Err(FairError::InvalidFile(_))
        ));
        assert!(matches!(
            parse_instance(r#"{"n": 2, "colors": "RX", "p": 1, "q": 1}"#),
            Err(FairError::InvalidFile(_))
        ));
        assert!(matches!(parse_instance("{"), Err(FairError::InvalidFile(_))));
        assert_eq!(
            parse_instance(r#"{"n": 2, "colors": "RB", "p": 0, "q": 1}"#).unwrap_err(),
            FairError::ZeroRatio { p: 0, q: 1 }
        );
    }

    #[test]
    fn clustering_labels_normalize() {
        let c = parse_clustering(r#"{"labels": [7, -1, 7, 3]}"#, Some(4)).unwrap();
        assert_eq!(c.labels(), &[0, 1, 0, 2]);
        assert_eq!(
            parse_clustering(r#"{"labels": [0, 1]}"#, Some(3)).unwrap_err(),
            FairError::LengthMismatch { expected: 3, got: 2 }
        );
        let file = ClusteringFile::from_clustering(&c);
        assert_eq!(file.to_clustering(Some(4)).unwrap(), c);
    }

    #[test]
    fn factors_print_as_integers_when_integral() {
        assert_eq!(factor_json(Factor::from_integer(17)), Value::from(17u64));
        assert_eq!(factor_json(Factor::new(7, 2)), Value::from(3.5));
    }
}
