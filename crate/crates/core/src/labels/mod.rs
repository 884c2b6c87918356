//! Labeled training sets: policies, patient-level partitions, validation and
//! test subsets, and label-noise estimates.

mod build;
mod io;
mod noise;
mod partition;
mod subset;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{FindingId, FindingSet, N_FINDINGS};

pub use build::build_label_sets;
pub use io::{load_labels_csv, read_labels_csv, write_labels_csv};
pub use noise::{estimate_label_noise, write_noise_csv, NoiseReport, NoiseRow, PolicyNoise};
pub use partition::{assign_partition, partition_by_patient, PartitionRatios};
pub use subset::{build_broad_test_set, select_validation_subset, Selection, Shortfall};

/// 40 binary labels indexed by finding. Findings not reported positive are 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LabelVector(FindingSet);

impl LabelVector {
    pub fn from_findings(findings: FindingSet) -> Self {
        LabelVector(findings)
    }

    pub fn get(self, finding: FindingId) -> bool {
        self.0.contains(finding)
    }

    pub fn positives(self) -> FindingSet {
        self.0
    }

    pub fn to_bits(self) -> [u8; N_FINDINGS] {
        let mut bits = [0u8; N_FINDINGS];
        for id in self.0.iter() {
            bits[id.index()] = 1;
        }
        bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Only reports whose candidate sentences are all tagged.
    FullyCovered,
    /// Additionally reports with at least one recognized positive sentence.
    AnyHit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    FullyCovered,
    AnyHitOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Train,
    Validation,
    Test,
}

macro_rules! str_enum {
    ($ty:ty, $what:literal, $($variant:path => $s:literal),+ $(,)?) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($variant => $s),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($variant),)+
                    other => Err(format!(concat!("unknown ", $what, " {:?}"), other)),
                }
            }
        }
    };
}

str_enum!(Policy, "policy", Policy::FullyCovered => "fully_covered", Policy::AnyHit => "any_hit");
str_enum!(Coverage, "coverage", Coverage::FullyCovered => "fully_covered", Coverage::AnyHitOnly => "any_hit_only");
str_enum!(
    Partition, "partition",
    Partition::Train => "train",
    Partition::Validation => "validation",
    Partition::Test => "test",
);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledStudy {
    pub study_id: String,
    pub patient_id: String,
    pub labels: LabelVector,
    pub coverage: Coverage,
    /// Unset until [`partition_by_patient`] runs.
    pub partition: Option<Partition>,
}
