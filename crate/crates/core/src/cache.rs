//! Content-based collaborative-filtering cache held at the edge node.
//!
//! Requests carry a feature vector. A lookup scores the request against
//! every cached vector, takes the best score and rounds it to a binary hit
//! indicator: `hit = floor(best + 1/2)`. Distances are mapped onto `(0, 1]`
//! through `1 / (1 + d)` before rounding, so a hit means `d <= 1`.
//! Admission is unconditional; eviction is least-recently-used.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Dense request descriptor. Non-empty, all components finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(elements: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(ModelError::domain(
                "features",
                "vector must have at least one element",
            ));
        }
        if let Some(bad) = elements.iter().find(|x| !x.is_finite()) {
            return Err(ModelError::domain(
                "features",
                format!("non-finite component {bad}"),
            ));
        }
        Ok(Self(elements))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = ModelError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SimilarityMetric {
    /// `1 / (1 + euclidean distance)`.
    #[default]
    #[serde(rename = "normalized-euclidean")]
    NormalizedEuclidean,
    /// Cosine of the angle, floored at zero.
    #[serde(rename = "cosine")]
    Cosine,
}

impl fmt::Display for SimilarityMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimilarityMetric::NormalizedEuclidean => f.write_str("normalized-euclidean"),
            SimilarityMetric::Cosine => f.write_str("cosine"),
        }
    }
}

/// Plain euclidean distance between two vectors of equal dimension.
pub fn euclidean_distance(u: &FeatureVector, v: &FeatureVector) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    Ok(u.0
        .iter()
        .zip(&v.0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Similarity score in `[0, 1]`.
pub fn similarity(u: &FeatureVector, v: &FeatureVector, metric: SimilarityMetric) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    match metric {
        SimilarityMetric::NormalizedEuclidean => Ok(1.0 / (1.0 + euclidean_distance(u, v)?)),
        SimilarityMetric::Cosine => {
            let denom = u.norm() * v.norm();
            if denom == 0.0 {
                return Err(ModelError::UndefinedAngle);
            }
            let dot: f64 = u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum();
            Ok((dot / denom).clamp(0.0, 1.0))
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(ModelError::Dimension { expected, found })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntryId(pub u64);

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub id: EntryId,
    pub vector: FeatureVector,
    /// Size of the cached result in bits.
    pub result_bits: f64,
    /// Store tick of the last insert or hit.
    pub last_access: u64,
}

impl CacheEntry {
    pub fn new(id: EntryId, vector: FeatureVector, result_bits: f64) -> Self {
        Self {
            id,
            vector,
            result_bits,
            last_access: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LookupResult {
    pub hit: bool,
    pub best_score: f64,
    /// Present exactly when `hit` is set.
    pub matched: Option<EntryId>,
    /// Store tick at which the lookup happened.
    pub tick: u64,
}

impl LookupResult {
    /// The rounded hit indicator as a number in `{0, 1}`.
    pub fn indicator(&self) -> f64 {
        if self.hit {
            1.0
        } else {
            0.0
        }
    }
}

/// Capacity-bounded similarity cache. Owned by one simulation context.
#[derive(Debug, Clone)]
pub struct CacheStore {
    capacity: usize,
    metric: SimilarityMetric,
    entries: Vec<CacheEntry>,
    dim: Option<usize>,
    clock: u64,
    next_id: u64,
}

impl CacheStore {
    pub fn new(capacity: usize, metric: SimilarityMetric) -> Result<Self> {
        if capacity == 0 {
            return Err(ModelError::domain("cache_capacity", "must be >= 1"));
        }
        Ok(Self {
            capacity,
            metric,
            entries: Vec::new(),
            dim: None,
            clock: 0,
            next_id: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn metric(&self) -> SimilarityMetric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CacheEntry] {
        &self.entries
    }

    pub fn contains(&self, id: EntryId) -> bool {
        self.entries.iter().any(|e| e.id == id)
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Scores `u` against every entry and applies the rounding rule.
    /// A hit refreshes the matched entry's recency.
    pub fn lookup(&mut self, u: &FeatureVector) -> Result<LookupResult> {
        if let Some(dim) = self.dim {
            check_dim(dim, u.dim())?;
        }
        if self.metric == SimilarityMetric::Cosine && u.norm() == 0.0 {
            return Err(ModelError::UndefinedAngle);
        }
        self.clock += 1;

        let mut best: Option<(f64, usize)> = None;
        for (idx, entry) in self.entries.iter().enumerate() {
            let score = similarity(u, &entry.vector, self.metric)?;
            let better = match best {
                None => true,
                Some((s, i)) => score > s || (score == s && entry.id < self.entries[i].id),
            };
            if better {
                best = Some((score, idx));
            }
        }

        let best_score = best.map_or(0.0, |(s, _)| s);
        let hit = (best_score + 0.5).floor().clamp(0.0, 1.0) == 1.0;
        let matched = match best {
            Some((_, idx)) if hit => {
                self.entries[idx].last_access = self.clock;
                Some(self.entries[idx].id)
            }
            _ => None,
        };
        Ok(LookupResult {
            hit,
            best_score,
            matched,
            tick: self.clock,
        })
    }

    /// Inserts or replaces `entry`, evicting the least recently accessed
    /// entry (lowest id on ties) when full.
    pub fn insert(&mut self, mut entry: CacheEntry) -> Result<Option<EntryId>> {
        if let Some(dim) = self.dim {
            check_dim(dim, entry.vector.dim())?;
        }
        if !(entry.result_bits.is_finite() && entry.result_bits >= 0.0) {
            return Err(ModelError::domain(
                "result_bits",
                format!("must be finite and >= 0, got {}", entry.result_bits),
            ));
        }
        if self.metric == SimilarityMetric::Cosine && entry.vector.norm() == 0.0 {
            return Err(ModelError::UndefinedAngle);
        }
        self.dim = Some(entry.vector.dim());
        self.clock += 1;
        self.next_id = self.next_id.max(entry.id.0 + 1);
        entry.last_access = self.clock;

        if let Some(slot) = self.entries.iter_mut().find(|e| e.id == entry.id) {
            *slot = entry;
            return Ok(None);
        }

        let mut evicted = None;
        if self.entries.len() == self.capacity {
            let victim = self
                .entries
                .iter()
                .enumerate()
                .min_by_key(|(_, e)| (e.last_access, e.id))
                .map(|(i, _)| i)
                .expect("full store is non-empty");
            evicted = Some(self.entries.swap_remove(victim).id);
        }
        self.entries.push(entry);
        Ok(evicted)
    }

    /// Inserts a new entry under a freshly allocated id.
    pub fn admit(&mut self, vector: FeatureVector, result_bits: f64) -> Result<EntryId> {
        let id = EntryId(self.next_id);
        self.insert(CacheEntry::new(id, vector, result_bits))?;
        Ok(id)
    }
}
