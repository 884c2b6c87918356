use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LabeledStudy, Partition};
use crate::error::{Error, Result};
use crate::hash::stable_hash;

/// Percentages for train / validation / test, summing to 100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRatios {
    pub train: u8,
    pub validation: u8,
    pub test: u8,
}

impl Default for PartitionRatios {
    fn default() -> Self {
        PartitionRatios {
            train: 80,
            validation: 10,
            test: 10,
        }
    }
}

impl PartitionRatios {
    pub fn new(train: u8, validation: u8, test: u8) -> Result<Self> {
        let sum = u16::from(train) + u16::from(validation) + u16::from(test);
        if sum != 100 {
            return Err(Error::InvalidInput(format!(
                "partition ratios {train}/{validation}/{test} sum to {sum}, not 100"
            )));
        }
        Ok(PartitionRatios {
            train,
            validation,
            test,
        })
    }

    fn bucket(self, b: u64) -> Partition {
        if b < u64::from(self.train) {
            Partition::Train
        } else if b < u64::from(self.train) + u64::from(self.validation) {
            Partition::Validation
        } else {
            Partition::Test
        }
    }
}

impl FromStr for PartitionRatios {
    type Err = Error;

    /// Parses `80/10/10`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').map(str::trim).collect();
        let [a, b, c] = parts[..] else {
            return Err(Error::InvalidInput(format!("ratios {s:?} are not of the form a/b/c")));
        };
        let p = |x: &str| {
            x.parse::<u8>()
                .map_err(|e| Error::InvalidInput(format!("ratio {x:?}: {e}")))
        };
        PartitionRatios::new(p(a)?, p(b)?, p(c)?)
    }
}

impl fmt::Display for PartitionRatios {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.train, self.validation, self.test)
    }
}

/// Partition of one patient: bucket `stable_hash(seed, patient_id) % 100`
/// mapped onto the ratio ranges in train, validation, test order.
pub fn assign_partition(patient_id: &str, ratios: PartitionRatios, seed: u64) -> Partition {
    ratios.bucket(stable_hash(seed, &[patient_id]) % 100)
}

/// Assign every study the partition of its patient.
pub fn partition_by_patient(studies: &mut [LabeledStudy], ratios: PartitionRatios, seed: u64) {
    for s in studies {
        s.partition = Some(assign_partition(&s.patient_id, ratios, seed));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_parse() {
        assert_eq!("80/10/10".parse::<PartitionRatios>().unwrap(), PartitionRatios::default());
        assert!("80/10/11".parse::<PartitionRatios>().is_err());
        assert!("80/20".parse::<PartitionRatios>().is_err());
        assert!("a/b/c".parse::<PartitionRatios>().is_err());
        assert_eq!(PartitionRatios::new(100, 0, 0).unwrap().to_string(), "100/0/0");
    }

    #[test]
    fn degenerate_ratios() {
        let all_test = PartitionRatios::new(0, 0, 100).unwrap();
        for p in ["a", "b", "c"] {
            assert_eq!(assign_partition(p, all_test, 1), Partition::Test);
        }
    }

    #[test]
    fn pinned_assignments() {
        // Frozen values: changing the hash would silently move patients
        // between splits.
        let r = PartitionRatios::default();
        let got: Vec<_> = ["patient-0", "patient-1", "patient-2", "patient-3"]
            .iter()
            .map(|p| stable_hash(42, &[p]) % 100)
            .collect();
        assert_eq!(got, PINNED_BUCKETS);
        assert_eq!(assign_partition("patient-0", r, 42), r.bucket(PINNED_BUCKETS[0]));
    }

    const PINNED_BUCKETS: [u64; 4] = [77, 51, 13, 22];
}
