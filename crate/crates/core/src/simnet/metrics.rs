//! Delivery metrics computed from a finished run.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;

use super::scenario::{ConfigError, ScenarioConfig};
use super::world::{Counters, World};
use crate::protocol::{subscribed, NodeId, PublicationId};
use crate::topic::TopicHierarchy;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublicationMetrics {
    pub publisher: NodeId,
    pub seq: u64,
    pub topic: String,
    pub published_at: u64,
    /// Stations other than the publisher whose subscriptions cover the
    /// topic. Altruism alone does not make a station a subscriber.
    pub subscribers: usize,
    pub reached: usize,
    /// `reached / subscribers`, or 1 when there are no subscribers.
    pub delivery_ratio: f64,
    /// Steps from publication to receipt, one per reached subscriber in
    /// node-id order.
    pub latencies: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub steps: u64,
    pub beacons: u64,
    pub transfers: u64,
    pub drops: u64,
    /// Mean of the per-publication ratios (1 when there are none).
    pub mean_delivery_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub publications: Vec<PublicationMetrics>,
    pub totals: Totals,
}

impl MetricsReport {
    pub fn from_world(world: &World, h: &TopicHierarchy) -> Self {
        let mut first_receipt: BTreeMap<(PublicationId, NodeId), u64> = BTreeMap::new();
        for r in &world.trace.receipts {
            first_receipt.entry((r.publication, r.receiver)).or_insert(r.step);
        }

        let publications: Vec<PublicationMetrics> = world
            .planned
            .iter()
            .map(|plan| {
                let subscribers: Vec<NodeId> = world
                    .nodes
                    .values()
                    .filter(|n| n.state.id != plan.id.publisher)
                    .filter(|n| subscribed(&n.state.subscriptions, &plan.topic, h).unwrap_or(false))
                    .map(|n| n.state.id)
                    .collect();
                let latencies: Vec<u64> = subscribers
                    .iter()
                    .filter_map(|n| first_receipt.get(&(plan.id, *n)))
                    .map(|step| step - plan.step)
                    .collect();
                let delivery_ratio = if subscribers.is_empty() {
                    1.0
                } else {
                    latencies.len() as f64 / subscribers.len() as f64
                };
                PublicationMetrics {
                    publisher: plan.id.publisher,
                    seq: plan.id.seq,
                    topic: plan.topic.clone(),
                    published_at: plan.step,
                    subscribers: subscribers.len(),
                    reached: latencies.len(),
                    delivery_ratio,
                    latencies,
                }
            })
            .collect();

        let mean_delivery_ratio = if publications.is_empty() {
            1.0
        } else {
            publications.iter().map(|p| p.delivery_ratio).sum::<f64>() / publications.len() as f64
        };
        let Counters {
            beacons,
            transfers,
            drops,
        } = world.counters;

        MetricsReport {
            publications,
            totals: Totals {
                steps: world.step,
                beacons,
                transfers,
                drops,
                mean_delivery_ratio,
            },
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per publication; latencies are `;`-separated.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "publisher",
            "seq",
            "topic",
            "published_at",
            "subscribers",
            "reached",
            "delivery_ratio",
            "latencies",
        ])?;
        for p in &self.publications {
            let latencies: Vec<String> = p.latencies.iter().map(u64::to_string).collect();
            w.write_record([
                p.publisher.to_string(),
                p.seq.to_string(),
                p.topic.clone(),
                p.published_at.to_string(),
                p.subscribers.to_string(),
                p.reached.to_string(),
                p.delivery_ratio.to_string(),
                latencies.join(";"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `pubs=<n> mean_delivery=<r> steps=<s>`
    pub fn summary_line(&self) -> String {
        format!(
            "pubs={} mean_delivery={:.3} steps={}",
            self.publications.len(),
            self.totals.mean_delivery_ratio,
            self.totals.steps
        )
    }
}

/// Runs the scenario to completion and returns the final world.
pub fn simulate(config: &ScenarioConfig, h: &TopicHierarchy) -> Result<World, ConfigError> {
    let mut world = World::new(config, h)?;
    world.run_steps(h, config.steps);
    Ok(world)
}

pub fn run(config: &ScenarioConfig, h: &TopicHierarchy) -> Result<MetricsReport, ConfigError> {
    let world = simulate(config, h)?;
    Ok(MetricsReport::from_world(&world, h))
}
