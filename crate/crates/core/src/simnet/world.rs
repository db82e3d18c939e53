//! The simulated network: positions, mobility and synchronous
//! beacon/transfer rounds.
//!
//! Randomness comes from a single ChaCha8 stream seeded with the scenario
//! seed and consumed in ascending node-id order, so a run is a pure
//! function of its scenario.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::scenario::{Area, ConfigError, MobilitySpec, Point, ScenarioConfig};
use crate::protocol::{compute_offers, Beacon, NodeId, NodeState, Publication, PublicationId};
use crate::topic::TopicHierarchy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown node {0}")]
pub struct UnknownNode(pub NodeId);

#[derive(Debug, Clone, PartialEq)]
pub enum Mobility {
    Static,
    RandomWaypoint {
        speed_min: f64,
        speed_max: f64,
        pause_steps: u64,
        target: Point,
        speed: f64,
        pause_left: u64,
    },
    Patrol {
        waypoints: Vec<Point>,
        speed: f64,
        next: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimNode {
    pub state: NodeState,
    pub position: Point,
    pub mobility: Mobility,
}

/// A publication the scenario asks for, with the id `publish` will give it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedPublication {
    pub id: PublicationId,
    pub step: u64,
    pub topic: String,
    pub payload: String,
}

/// A publication newly stored by `receiver`, visible from `step` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Receipt {
    pub step: u64,
    pub publication: PublicationId,
    pub receiver: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Transfer {
    pub step: u64,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub publication: PublicationId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub receipts: Vec<Receipt>,
    pub transfers: Vec<Transfer>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub beacons: u64,
    pub transfers: u64,
    pub drops: u64,
}

#[derive(Debug, Clone)]
pub struct World {
    pub step: u64,
    pub area: Area,
    pub radio_range: f64,
    pub nodes: BTreeMap<NodeId, SimNode>,
    rng: ChaCha8Rng,
    /// In scenario order.
    pub planned: Vec<PlannedPublication>,
    pub trace: Trace,
    pub counters: Counters,
}

fn uniform_point(rng: &mut ChaCha8Rng, area: Area) -> Point {
    Point::new(rng.gen_range(0.0..=area.width), rng.gen_range(0.0..=area.height))
}

fn uniform_speed(rng: &mut ChaCha8Rng, min: f64, max: f64) -> f64 {
    rng.gen_range(min..=max)
}

/// Moves `from` toward `to` by at most `speed`. Returns the new position
/// and whether `to` was reached.
fn advance(from: Point, to: Point, speed: f64) -> (Point, bool) {
    let dist = from.distance(to);
    if dist <= speed {
        (to, true)
    } else {
        let f = speed / dist;
        (
            Point::new(from.x + (to.x - from.x) * f, from.y + (to.y - from.y) * f),
            false,
        )
    }
}

impl World {
    /// Builds the initial world. The scenario is validated against `h` first.
    pub fn new(config: &ScenarioConfig, h: &TopicHierarchy) -> Result<Self, ConfigError> {
        config.validate(h)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let mut sorted: Vec<_> = config.nodes.iter().collect();
        sorted.sort_by_key(|n| n.id);

        let mut nodes = BTreeMap::new();
        for cfg in sorted {
            let id = NodeId(cfg.id);
            let mut state = NodeState::new(id, cfg.altruistic);
            for code in &cfg.subscriptions {
                state
                    .subscribe(code, h)
                    .map_err(|e| ConfigError::single(format!("node {id}: {e}")))?;
            }
            let position = match (&cfg.position, &cfg.mobility) {
                (Some(p), _) => *p,
                (None, MobilitySpec::Patrol { waypoints, .. }) => waypoints[0],
                (None, _) => uniform_point(&mut rng, config.area),
            };
            let mobility = match &cfg.mobility {
                MobilitySpec::Static => Mobility::Static,
                MobilitySpec::RandomWaypoint {
                    speed_min,
                    speed_max,
                    pause_steps,
                } => Mobility::RandomWaypoint {
                    speed_min: *speed_min,
                    speed_max: *speed_max,
                    pause_steps: *pause_steps,
                    target: uniform_point(&mut rng, config.area),
                    speed: uniform_speed(&mut rng, *speed_min, *speed_max),
                    pause_left: 0,
                },
                MobilitySpec::Patrol { waypoints, speed } => Mobility::Patrol {
                    waypoints: waypoints.clone(),
                    speed: *speed,
                    next: usize::from(waypoints.len() > 1 && position == waypoints[0]) % waypoints.len(),
                },
            };
            nodes.insert(
                id,
                SimNode {
                    state,
                    position,
                    mobility,
                },
            );
        }

        // Ids follow the order publish() will be called in: by step, then
        // scenario order.
        let mut order: Vec<usize> = (0..config.publications.len()).collect();
        order.sort_by_key(|&i| config.publications[i].step);
        let mut next_seq: BTreeMap<u32, u64> = BTreeMap::new();
        let mut ids = vec![PublicationId::new(0, 0); config.publications.len()];
        for i in order {
            let node = config.publications[i].node;
            let seq = next_seq.entry(node).or_insert(0);
            ids[i] = PublicationId::new(node, *seq);
            *seq += 1;
        }
        let planned = config
            .publications
            .iter()
            .zip(ids)
            .map(|(p, id)| PlannedPublication {
                id,
                step: p.step,
                topic: p.topic.clone(),
                payload: p.payload.clone(),
            })
            .collect();

        Ok(World {
            step: 0,
            area: config.area,
            radio_range: config.radio_range,
            nodes,
            rng,
            planned,
            trace: Trace::default(),
            counters: Counters::default(),
        })
    }

    pub fn node(&self, id: NodeId) -> Result<&SimNode, UnknownNode> {
        self.nodes.get(&id).ok_or(UnknownNode(id))
    }

    /// Stations within radio range of `id` (boundary inclusive), excluding
    /// `id` itself.
    pub fn neighbors(&self, id: NodeId) -> Result<BTreeSet<NodeId>, UnknownNode> {
        let me = self.node(id)?.position;
        let r2 = self.radio_range * self.radio_range;
        Ok(self
            .nodes
            .iter()
            .filter(|(other, n)| **other != id && me.distance_sq(n.position) <= r2)
            .map(|(other, _)| *other)
            .collect())
    }

    /// Advances every mobile station by one step.
    pub fn move_nodes(&mut self) {
        let area = self.area;
        for node in self.nodes.values_mut() {
            match &mut node.mobility {
                Mobility::Static => {}
                Mobility::RandomWaypoint {
                    speed_min,
                    speed_max,
                    pause_steps,
                    target,
                    speed,
                    pause_left,
                } => {
                    if *pause_left > 0 {
                        *pause_left -= 1;
                        if *pause_left == 0 {
                            *target = uniform_point(&mut self.rng, area);
                            *speed = uniform_speed(&mut self.rng, *speed_min, *speed_max);
                        }
                        continue;
                    }
                    let (pos, arrived) = advance(node.position, *target, *speed);
                    node.position = area.clamp(pos);
                    if arrived {
                        if *pause_steps == 0 {
                            *target = uniform_point(&mut self.rng, area);
                            *speed = uniform_speed(&mut self.rng, *speed_min, *speed_max);
                        } else {
                            *pause_left = *pause_steps;
                        }
                    }
                }
                Mobility::Patrol {
                    waypoints,
                    speed,
                    next,
                } => {
                    let (pos, arrived) = advance(node.position, waypoints[*next], *speed);
                    node.position = area.clamp(pos);
                    if arrived {
                        *next = (*next + 1) % waypoints.len();
                    }
                }
            }
        }
    }

    /// One synchronous detection/transfer round over all stations.
    pub fn exchange_round(&mut self, h: &TopicHierarchy) {
        let order: Vec<NodeId> = self.nodes.keys().copied().collect();
        self.exchange_in_order(h, &order);
    }

    /// Round semantics do not depend on `order`: beacons and offers are
    /// computed from the pre-round states, and deliveries are applied
    /// afterwards.
    pub(crate) fn exchange_in_order(&mut self, h: &TopicHierarchy, order: &[NodeId]) {
        let beacons: BTreeMap<NodeId, Beacon> = order
            .iter()
            .map(|id| (*id, self.nodes[id].state.make_beacon()))
            .collect();
        self.counters.beacons += beacons.len() as u64;

        let mut inbox: BTreeMap<NodeId, BTreeMap<PublicationId, Publication>> = BTreeMap::new();
        let mut transfers = Vec::new();
        for sender in order {
            let neighbors = self.neighbors(*sender).unwrap_or_default();
            let state = &self.nodes[sender].state;
            for receiver in neighbors {
                for id in compute_offers(state, &beacons[&receiver], h) {
                    transfers.push(Transfer {
                        step: self.step,
                        sender: *sender,
                        receiver,
                        publication: id,
                    });
                    inbox
                        .entry(receiver)
                        .or_default()
                        .entry(id)
                        .or_insert_with(|| state.store[&id].clone());
                }
            }
        }
        transfers.sort();
        self.counters.transfers += transfers.len() as u64;
        self.trace.transfers.extend(transfers);

        let visible_at = self.step + 1;
        let mut receipts = Vec::new();
        for (receiver, pubs) in inbox {
            let node = self.nodes.get_mut(&receiver).expect("receiver is a known node");
            let fresh: Vec<PublicationId> = pubs.keys().filter(|id| !node.state.holds(**id)).copied().collect();
            let outcome = node.state.accept_transfer(pubs.values(), h);
            self.counters.drops += outcome.dropped as u64;
            receipts.extend(
                fresh
                    .into_iter()
                    .filter(|id| node.state.holds(*id))
                    .map(|publication| Receipt {
                        step: visible_at,
                        publication,
                        receiver,
                    }),
            );
        }
        receipts.sort();
        self.trace.receipts.extend(receipts);
    }

    /// Publishes whatever is scheduled for the current step.
    fn inject(&mut self, h: &TopicHierarchy) {
        let now = self.step;
        for plan in self.planned.iter().filter(|p| p.step == now) {
            let node = self
                .nodes
                .get_mut(&plan.id.publisher)
                .expect("scenario validation checked publishers");
            let publication = node
                .state
                .publish(&plan.topic, plan.payload.clone(), now, h)
                .expect("scenario validation checked topics");
            debug_assert_eq!(publication.id, plan.id);
        }
    }

    /// inject, move, exchange, then advance the clock.
    pub fn step(&mut self, h: &TopicHierarchy) {
        self.inject(h);
        self.move_nodes();
        self.exchange_round(h);
        self.step += 1;
    }

    pub fn run_steps(&mut self, h: &TopicHierarchy, steps: u64) {
        for _ in 0..steps {
            self.step(h);
        }
    }

    /// Step at which a publication was injected, if it has been.
    pub fn published_at(&self, id: PublicationId) -> Option<u64> {
        let plan = self.planned.iter().find(|p| p.id == id)?;
        (plan.step < self.step).then_some(plan.step)
    }
}
