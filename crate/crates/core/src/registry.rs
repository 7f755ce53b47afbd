//! Candidate detector ids and their canonical order.
//!
//! Registry order defines the columns of every performance matrix and is the
//! tie-break everywhere an argmax is taken: the lowest index wins.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DetectorId {
    #[serde(rename = "MSP")]
    Msp,
    #[serde(rename = "GEN")]
    Gen,
    #[serde(rename = "MaxLogit")]
    MaxLogit,
    #[serde(rename = "EnergyBased")]
    EnergyBased,
    #[serde(rename = "Mahalanobis")]
    Mahalanobis,
    #[serde(rename = "ViM")]
    Vim,
    #[serde(rename = "kNN")]
    Knn,
    #[serde(rename = "ReAct")]
    React,
    #[serde(rename = "ASH")]
    Ash,
}

impl DetectorId {
    pub const ALL: [DetectorId; 9] = [
        DetectorId::Msp,
        DetectorId::Gen,
        DetectorId::MaxLogit,
        DetectorId::EnergyBased,
        DetectorId::Mahalanobis,
        DetectorId::Vim,
        DetectorId::Knn,
        DetectorId::React,
        DetectorId::Ash,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorId::Msp => "MSP",
            DetectorId::Gen => "GEN",
            DetectorId::MaxLogit => "MaxLogit",
            DetectorId::EnergyBased => "EnergyBased",
            DetectorId::Mahalanobis => "Mahalanobis",
            DetectorId::Vim => "ViM",
            DetectorId::Knn => "kNN",
            DetectorId::React => "ReAct",
            DetectorId::Ash => "ASH",
        }
    }

    /// Case-insensitive lookup that also accepts the common alternate
    /// spellings (`VIM`, `KNN`, `Energy`).
    pub fn parse_loose(name: &str) -> Option<DetectorId> {
        let lower = name.trim().to_ascii_lowercase();
        let alias = match lower.as_str() {
            "energy" => "energybased",
            other => other,
        };
        Self::ALL.into_iter().find(|d| d.as_str().to_ascii_lowercase() == alias)
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|d| d.as_str() == s).ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// Ordered list of candidate model ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Registry {
    ids: Vec<String>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::detectors()
    }
}

impl Registry {
    /// The nine post-hoc detectors, in canonical order.
    pub fn detectors() -> Self {
        Self { ids: DetectorId::ALL.iter().map(|d| d.as_str().to_string()).collect() }
    }

    pub fn new(ids: Vec<String>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::invalid("registry must not be empty"));
        }
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(Self { ids })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| Error::UnknownModel(id.to_string()))
    }

    pub fn get(&self, index: usize) -> &str {
        &self.ids[index]
    }

    /// Parse every id as a zoo detector.
    pub fn detector_ids(&self) -> Result<Vec<DetectorId>> {
        self.ids.iter().map(|s| s.parse()).collect()
    }
}

/// Index of the maximum; ties go to the lowest index. NaN never wins.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None if !v.is_nan() => best = Some(i),
            Some(b) if v > values[b] => best = Some(i),
            _ => {}
        }
    }
    best
}
