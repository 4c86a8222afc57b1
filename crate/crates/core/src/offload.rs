//! Offloading decision between the edge node and the remote cloud.
//!
//! Both branches pay the uplink `R / r_up` and the downlink `F / r_down`.
//! The cloud branch adds `D / P_cloud` plus the fixed edge-to-cloud latency;
//! the edge branch adds `D / P_edge`, which a cache hit removes entirely.
//! The task goes wherever the total is smaller, with ties kept at the edge.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cache::{CacheStore, FeatureVector, LookupResult};
use crate::error::{require_non_negative, require_positive, Result};

/// One offloadable computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub upload_bits: f64,
    pub compute_cycles: f64,
    pub result_bits: f64,
    pub features: FeatureVector,
}

impl TaskSpec {
    pub fn validate(&self) -> Result<()> {
        require_non_negative("upload_bits", self.upload_bits)?;
        require_non_negative("compute_cycles", self.compute_cycles)?;
        require_non_negative("result_bits", self.result_bits)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeProfile {
    /// Cycles per second.
    pub processing_rate_cps: f64,
}

impl NodeProfile {
    pub fn new(processing_rate_cps: f64) -> Self {
        Self {
            processing_rate_cps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("processing_rate_cps", self.processing_rate_cps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkProfile {
    pub uplink_rate_bps: f64,
    pub downlink_rate_bps: f64,
    pub backhaul_latency_s: f64,
}

impl LinkProfile {
    pub fn validate(&self) -> Result<()> {
        require_positive("uplink_rate_bps", self.uplink_rate_bps)?;
        require_positive("downlink_rate_bps", self.downlink_rate_bps)?;
        require_non_negative("backhaul_latency_s", self.backhaul_latency_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Location {
    Edge,
    Cloud,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Edge => f.write_str("Edge"),
            Location::Cloud => f.write_str("Cloud"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionOutcome {
    pub location: Location,
    pub delay_edge: f64,
    pub delay_cloud: f64,
    pub chosen_delay: f64,
    pub cache_hit: bool,
    pub lookup: LookupResult,
}

fn validate_all(task: &TaskSpec, link: &LinkProfile, nodes: &[&NodeProfile]) -> Result<()> {
    task.validate()?;
    link.validate()?;
    nodes.iter().try_for_each(|n| n.validate())
}

/// Delay of shipping the task through the edge to the cloud and back.
pub fn delay_cloud(task: &TaskSpec, link: &LinkProfile, cloud: &NodeProfile) -> Result<f64> {
    validate_all(task, link, &[cloud])?;
    Ok(task.upload_bits / link.uplink_rate_bps
        + task.compute_cycles / cloud.processing_rate_cps
        + task.result_bits / link.downlink_rate_bps
        + link.backhaul_latency_s)
}

/// Delay of serving the task at the edge; a hit skips the compute term.
pub fn delay_edge(
    task: &TaskSpec,
    link: &LinkProfile,
    edge: &NodeProfile,
    hit: bool,
) -> Result<f64> {
    validate_all(task, link, &[edge])?;
    let miss = if hit { 0.0 } else { 1.0 };
    Ok(task.upload_bits / link.uplink_rate_bps
        + task.compute_cycles / edge.processing_rate_cps * miss
        + task.result_bits / link.downlink_rate_bps)
}

/// Baseline where every task goes to the cloud and the cache is never consulted.
pub fn delay_traditional(task: &TaskSpec, link: &LinkProfile, cloud: &NodeProfile) -> Result<f64> {
    delay_cloud(task, link, cloud)
}

/// Picks the branch with the smaller delay, edge on ties.
pub fn choose(delay_edge: f64, delay_cloud: f64) -> (Location, f64) {
    if delay_edge <= delay_cloud {
        (Location::Edge, delay_edge)
    } else {
        (Location::Cloud, delay_cloud)
    }
}

/// Looks the task up in the cache and evaluates both branches without
/// admitting anything. Recency of a matched entry is still refreshed.
pub fn evaluate(
    task: &TaskSpec,
    store: &mut CacheStore,
    link: &LinkProfile,
    edge: &NodeProfile,
    cloud: &NodeProfile,
) -> Result<DecisionOutcome> {
    validate_all(task, link, &[edge, cloud])?;
    let lookup = store.lookup(&task.features)?;
    let delay_edge = delay_edge(task, link, edge, lookup.hit)?;
    let delay_cloud = delay_cloud(task, link, cloud)?;
    let (location, chosen_delay) = choose(delay_edge, delay_cloud);
    Ok(DecisionOutcome {
        location,
        delay_edge,
        delay_cloud,
        chosen_delay,
        cache_hit: lookup.hit,
        lookup,
    })
}

/// Full decision step: evaluate, then on a miss admit the result into the
/// edge cache. Results computed in the cloud flow back through the edge and
/// are cached there as well.
pub fn decide(
    task: &TaskSpec,
    store: &mut CacheStore,
    link: &LinkProfile,
    edge: &NodeProfile,
    cloud: &NodeProfile,
) -> Result<DecisionOutcome> {
    let outcome = evaluate(task, store, link, edge, cloud)?;
    if !outcome.cache_hit {
        store.admit(task.features.clone(), task.result_bits)?;
    }
    Ok(outcome)
}

/// Compute demand at which the two branches cost the same on a miss.
/// `None` when the cloud is not faster than the edge.
pub fn crossover_demand(
    link: &LinkProfile,
    edge: &NodeProfile,
    cloud: &NodeProfile,
) -> Option<f64> {
    let (pe, pc) = (edge.processing_rate_cps, cloud.processing_rate_cps);
    (pc > pe).then(|| link.backhaul_latency_s * pe * pc / (pc - pe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::SimilarityMetric;
    use proptest::prelude::*;

    fn task(r: f64, d: f64, f: f64) -> TaskSpec {
        TaskSpec {
            upload_bits: r,
            compute_cycles: d,
            result_bits: f,
            features: FeatureVector::new(vec![0.0, 1.0]).unwrap(),
        }
    }

    fn link(up: f64, down: f64, alpha: f64) -> LinkProfile {
        LinkProfile {
            uplink_rate_bps: up,
            downlink_rate_bps: down,
            backhaul_latency_s: alpha,
        }
    }

    #[test]
    fn cloud_branch_examples() {
        let c = NodeProfile::new(10.0);
        assert_eq!(
            delay_cloud(&task(0.0, 0.0, 0.0), &link(8.0, 1.0, 0.0), &c).unwrap(),
            0.0
        );
        assert_eq!(
            delay_cloud(&task(8.0, 10.0, 0.0), &link(8.0, 1.0, 0.5), &c).unwrap(),
            2.5
        );
        let got = delay_cloud(
            &task(1e6, 1e9, 1e4),
            &link(1e6, 1e8, 0.01),
            &NodeProfile::new(1e10),
        )
        .unwrap();
        let want = 1.0 + 0.1 + 0.0001 + 0.01;
        assert!((got - want).abs() / want < 1e-12);
        assert_eq!(
            delay_traditional(&task(8.0, 10.0, 0.0), &link(8.0, 1.0, 0.5), &c).unwrap(),
            2.5
        );
    }

    #[test]
    fn edge_branch_examples() {
        let e = NodeProfile::new(5.0);
        let l = link(8.0, 4.0, 0.5);
        assert_eq!(
            delay_edge(&task(8.0, 10.0, 0.0), &l, &e, false).unwrap(),
            3.0
        );
        assert_eq!(
            delay_edge(&task(8.0, 10.0, 2.0), &l, &e, true).unwrap(),
            1.5
        );
        assert_eq!(
            delay_edge(&task(0.0, 0.0, 0.0), &l, &e, false).unwrap(),
            0.0
        );
    }

    #[test]
    fn invalid_inputs() {
        let e = NodeProfile::new(5.0);
        assert!(delay_edge(&task(-1.0, 1.0, 1.0), &link(1.0, 1.0, 0.0), &e, false).is_err());
        assert!(delay_edge(&task(1.0, 1.0, 1.0), &link(0.0, 1.0, 0.0), &e, false).is_err());
        assert!(delay_cloud(&task(1.0, 1.0, 1.0), &link(1.0, 1.0, -0.1), &e).is_err());
        assert!(delay_cloud(
            &task(1.0, 1.0, 1.0),
            &link(1.0, 1.0, 0.0),
            &NodeProfile::new(0.0)
        )
        .is_err());
    }

    fn store() -> CacheStore {
        CacheStore::new(8, SimilarityMetric::NormalizedEuclidean).unwrap()
    }

    #[test]
    fn hit_goes_to_edge() {
        let mut s = store();
        let t = task(100.0, 1e9, 10.0);
        s.admit(t.features.clone(), 10.0).unwrap();
        let out = decide(
            &t,
            &mut s,
            &link(1e3, 1e6, 0.1),
            &NodeProfile::new(1.0),
            &NodeProfile::new(1e12),
        )
        .unwrap();
        assert!(out.cache_hit);
        assert_eq!(out.location, Location::Edge);
    }

    #[test]
    fn heavy_miss_goes_to_cloud() {
        let mut s = store();
        // edge: 1 + 1e6 + 0.001 ; cloud: 1 + 1 + 0.001 + 1e-6
        let out = decide(
            &task(1e3, 1e6, 1.0),
            &mut s,
            &link(1e3, 1e3, 1e-6),
            &NodeProfile::new(1.0),
            &NodeProfile::new(1e6),
        )
        .unwrap();
        assert!(!out.cache_hit);
        assert_eq!(out.location, Location::Cloud);
        assert_eq!(out.chosen_delay, out.delay_cloud);
        assert_eq!(s.len(), 1, "cloud result warms the edge cache");
    }

    #[test]
    fn tie_goes_to_edge() {
        // edge: 1 + 10/5 = 3 ; cloud: 1 + 10/10 + 1 = 3
        let mut s = store();
        let out = decide(
            &task(8.0, 10.0, 0.0),
            &mut s,
            &link(8.0, 1.0, 1.0),
            &NodeProfile::new(5.0),
            &NodeProfile::new(10.0),
        )
        .unwrap();
        assert_eq!(out.delay_edge, out.delay_cloud);
        assert_eq!(out.location, Location::Edge);
    }

    #[test]
    fn crossover_none_when_cloud_slower() {
        let l = link(1.0, 1.0, 0.1);
        assert_eq!(
            crossover_demand(&l, &NodeProfile::new(2.0), &NodeProfile::new(1.0)),
            None
        );
        assert_eq!(
            crossover_demand(&l, &NodeProfile::new(1.0), &NodeProfile::new(2.0)),
            Some(0.2)
        );
    }

    proptest! {
        #[test]
        fn chosen_delay_nondecreasing_in_sizes(
            r in 0.0..1e7f64, d in 0.0..1e10f64, f in 0.0..1e6f64,
            bump in 1.0..3.0f64, which in 0usize..3,
            up in 1e5..1e8f64, pe in 1e8..1e10f64, pc in 1e8..1e11f64, alpha in 0.0..0.1f64,
        ) {
            let l = link(up, 1e8, alpha);
            let (e, c) = (NodeProfile::new(pe), NodeProfile::new(pc));
            let base = task(r, d, f);
            let mut bigger = base.clone();
            match which {
                0 => bigger.upload_bits *= bump,
                1 => bigger.compute_cycles *= bump,
                _ => bigger.result_bits *= bump,
            }
            let a = decide(&base, &mut store(), &l, &e, &c).unwrap().chosen_delay;
            let b = decide(&bigger, &mut store(), &l, &e, &c).unwrap().chosen_delay;
            prop_assert!(b >= a);
        }
    }
}
