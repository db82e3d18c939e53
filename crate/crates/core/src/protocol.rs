//! Per-station publish/subscribe state machine.
//!
//! A station subscribes to subjects, publishes on subjects, and takes part
//! in dissemination rounds: it announces itself with a [`Beacon`], works out
//! which of its publications a neighbour lacks and would accept
//! ([`compute_offers`]), and stores what neighbours send it
//! ([`NodeState::accept_transfer`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::topic::{TopicError, TopicHierarchy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Network-wide publication identity: the publisher and its sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PublicationId {
    pub publisher: NodeId,
    pub seq: u64,
}

impl PublicationId {
    pub fn new(publisher: u32, seq: u64) -> Self {
        Self {
            publisher: NodeId(publisher),
            seq,
        }
    }
}

impl fmt::Display for PublicationId {
    /// `<publisher>_<seq>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.publisher, self.seq)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    pub id: PublicationId,
    pub topic: String,
    pub payload: String,
    pub created_at: u64,
}

/// What a station announces to its neighbourhood each round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Beacon {
    pub sender: NodeId,
    pub subscriptions: BTreeSet<String>,
    pub altruistic: bool,
    /// Exact set of publication ids the sender stores.
    pub holdings: BTreeSet<PublicationId>,
}

/// Anything that exposes a subscription set and an altruism flag.
pub trait Interests {
    fn subscriptions(&self) -> &BTreeSet<String>;
    fn altruistic(&self) -> bool;
}

impl Interests for Beacon {
    fn subscriptions(&self) -> &BTreeSet<String> {
        &self.subscriptions
    }
    fn altruistic(&self) -> bool {
        self.altruistic
    }
}

impl Interests for NodeState {
    fn subscriptions(&self) -> &BTreeSet<String> {
        &self.subscriptions
    }
    fn altruistic(&self) -> bool {
        self.altruistic
    }
}

/// Whether a station with these interests wants (or, if altruistic, will
/// carry) a publication on `topic`.
pub fn interested(who: &impl Interests, topic: &str, h: &TopicHierarchy) -> Result<bool, TopicError> {
    h.lookup(topic)?;
    if who.altruistic() {
        return Ok(true);
    }
    subscribed(who.subscriptions(), topic, h)
}

/// Whether any code in `subs` covers `topic`. Ignores altruism.
pub fn subscribed(subs: &BTreeSet<String>, topic: &str, h: &TopicHierarchy) -> Result<bool, TopicError> {
    for s in subs {
        if h.covers(s, topic)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of [`NodeState::accept_transfer`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TransferOutcome {
    /// Newly stored.
    pub accepted: usize,
    /// Already held.
    pub duplicates: usize,
    /// Not wanted, or on a topic this hierarchy does not know.
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeState {
    pub id: NodeId,
    pub subscriptions: BTreeSet<String>,
    pub altruistic: bool,
    pub store: BTreeMap<PublicationId, Publication>,
    pub next_seq: u64,
    /// Incoming publications rejected by the admission rule so far.
    pub dropped: u64,
}

impl NodeState {
    pub fn new(id: NodeId, altruistic: bool) -> Self {
        Self {
            id,
            subscriptions: BTreeSet::new(),
            altruistic,
            store: BTreeMap::new(),
            next_seq: 0,
            dropped: 0,
        }
    }

    /// Adds `code` to the subscriptions. Idempotent.
    pub fn subscribe(&mut self, code: &str, h: &TopicHierarchy) -> Result<(), TopicError> {
        h.lookup(code)?;
        self.subscriptions.insert(code.to_string());
        Ok(())
    }

    /// Creates and stores a new publication. The publisher keeps its own
    /// publication whatever its subscriptions are.
    pub fn publish(
        &mut self,
        topic: &str,
        payload: impl Into<String>,
        now: u64,
        h: &TopicHierarchy,
    ) -> Result<Publication, TopicError> {
        h.lookup(topic)?;
        let publication = Publication {
            id: PublicationId {
                publisher: self.id,
                seq: self.next_seq,
            },
            topic: topic.to_string(),
            payload: payload.into(),
            created_at: now,
        };
        self.next_seq += 1;
        self.store.insert(publication.id, publication.clone());
        Ok(publication)
    }

    pub fn make_beacon(&self) -> Beacon {
        Beacon {
            sender: self.id,
            subscriptions: self.subscriptions.clone(),
            altruistic: self.altruistic,
            holdings: self.store.keys().copied().collect(),
        }
    }

    pub fn holds(&self, id: PublicationId) -> bool {
        self.store.contains_key(&id)
    }

    /// Stores each incoming publication this station is interested in and
    /// does not hold yet. Everything else is dropped without error.
    pub fn accept_transfer<'a, I>(&mut self, pubs: I, h: &TopicHierarchy) -> TransferOutcome
    where
        I: IntoIterator<Item = &'a Publication>,
    {
        let mut outcome = TransferOutcome::default();
        for p in pubs {
            if self.store.contains_key(&p.id) {
                outcome.duplicates += 1;
                continue;
            }
            if interested(self, &p.topic, h).unwrap_or(false) {
                self.store.insert(p.id, p.clone());
                outcome.accepted += 1;
            } else {
                outcome.dropped += 1;
            }
        }
        self.dropped += outcome.dropped as u64;
        outcome
    }

    /// Storage admission rule: every stored publication is either this
    /// station's own or one it is interested in.
    pub fn admission_holds(&self, h: &TopicHierarchy) -> bool {
        self.store.values().all(|p| {
            p.id.publisher == self.id || interested(self, &p.topic, h).unwrap_or(false)
        })
    }
}

/// Publications `sender` holds that the beacon's owner lacks and would accept.
pub fn compute_offers(sender: &NodeState, neighbor: &Beacon, h: &TopicHierarchy) -> BTreeSet<PublicationId> {
    sender
        .store
        .values()
        .filter(|p| !neighbor.holdings.contains(&p.id))
        .filter(|p| interested(neighbor, &p.topic, h).unwrap_or(false))
        .map(|p| p.id)
        .collect()
}

/// Relative storage path: root-to-topic codes, then `<publisher>_<seq>`.
pub fn store_path(h: &TopicHierarchy, p: &Publication) -> Result<String, TopicError> {
    let mut segments: Vec<String> = h.path(&p.topic)?.into_iter().map(str::to_string).collect();
    segments.push(p.id.to_string());
    Ok(segments.join("/"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::confinfo_hierarchy;
    use proptest::prelude::*;

    fn node(id: u32, subs: &[&str], altruistic: bool, h: &TopicHierarchy) -> NodeState {
        let mut n = NodeState::new(NodeId(id), altruistic);
        for s in subs {
            n.subscribe(s, h).unwrap();
        }
        n
    }

    #[test]
    fn subscribe_idempotent_and_checked() {
        let h = confinfo_hierarchy();
        let mut once = node(1, &[], false, &h);
        once.subscribe("speaker", &h).unwrap();
        let mut twice = once.clone();
        twice.subscribe("speaker", &h).unwrap();
        assert_eq!(once, twice);
        assert_eq!(
            once.subscribe("nosuch", &h),
            Err(TopicError::UnknownCode("nosuch".into()))
        );
    }

    #[test]
    fn subscription_covers_descendants() {
        let h = confinfo_hierarchy();
        let n = node(1, &["organizer"], false, &h);
        assert!(interested(&n, "logistics", &h).unwrap());
    }

    #[test]
    fn publish_sequence_and_ownership() {
        let h = confinfo_hierarchy();
        let mut n = node(3, &[], false, &h);
        let a = n.publish("guest", "a", 0, &h).unwrap();
        let b = n.publish("guest", "b", 4, &h).unwrap();
        assert_eq!(a.id, PublicationId::new(3, 0));
        assert_eq!(b.id, PublicationId::new(3, 1));
        assert_eq!(b.created_at, 4);
        assert!(n.holds(a.id) && n.holds(b.id));
        assert!(!interested(&n, "guest", &h).unwrap());
        assert!(n.admission_holds(&h));
        assert!(n.publish("nosuch", "x", 0, &h).is_err());
        assert_eq!(n.next_seq, 2);
    }

    #[test]
    fn interested_set_for_publication_matches_covers() {
        let h = confinfo_hierarchy();
        let codes: Vec<String> = h.codes().map(str::to_string).collect();
        let nodes: Vec<NodeState> = codes
            .iter()
            .enumerate()
            .map(|(i, c)| node(i as u32, &[c], false, &h))
            .collect();
        let got: BTreeSet<&str> = nodes
            .iter()
            .filter(|n| interested(*n, "session_speaker", &h).unwrap())
            .map(|n| n.subscriptions.iter().next().unwrap().as_str())
            .collect();
        let expected: BTreeSet<&str> = ["participant", "speaker", "session_speaker"].into();
        assert_eq!(got, expected);
    }

    #[test]
    fn beacons() {
        let h = confinfo_hierarchy();
        let fresh = NodeState::new(NodeId(9), false).make_beacon();
        assert!(fresh.subscriptions.is_empty() && fresh.holdings.is_empty());

        let mut n = node(1, &["chair"], true, &h);
        for id in [PublicationId::new(1, 0), PublicationId::new(2, 5)] {
            n.store.insert(
                id,
                Publication {
                    id,
                    topic: "guest".into(),
                    payload: String::new(),
                    created_at: 0,
                },
            );
        }
        let b = n.make_beacon();
        assert_eq!(b.sender, NodeId(1));
        assert!(b.altruistic);
        assert_eq!(
            b.holdings,
            [PublicationId::new(1, 0), PublicationId::new(2, 5)].into()
        );
        assert_eq!(b.subscriptions, ["chair".to_string()].into());
    }

    #[test]
    fn interest_rules() {
        let h = confinfo_hierarchy();
        assert!(interested(&node(0, &[], true, &h), "logistics", &h).unwrap());
        assert!(!interested(&node(0, &["chair"], false, &h), "guest", &h).unwrap());
        assert!(interested(&node(0, &["speaker"], false, &h), "participant", &h).unwrap());
        assert!(interested(&node(0, &[], true, &h), "nosuch", &h).is_err());
    }

    #[test]
    fn offers() {
        let h = confinfo_hierarchy();
        let mut sender = node(1, &[], false, &h);
        let p1 = sender.publish("plenary_speaker", "p1", 0, &h).unwrap();
        let p2 = sender.publish("guest", "p2", 0, &h).unwrap();

        let neighbor = node(2, &["speaker"], false, &h);
        assert_eq!(compute_offers(&sender, &neighbor.make_beacon(), &h), [p1.id].into());

        let altruist = node(3, &[], true, &h);
        assert_eq!(
            compute_offers(&sender, &altruist.make_beacon(), &h),
            [p1.id, p2.id].into()
        );

        let mut holder = node(4, &["speaker"], false, &h);
        holder.accept_transfer([&p1], &h);
        assert!(compute_offers(&sender, &holder.make_beacon(), &h).is_empty());
    }

    #[test]
    fn transfers() {
        let h = confinfo_hierarchy();
        let mut publisher = node(7, &[], false, &h);
        let p = publisher.publish("logistics", "trucks", 0, &h).unwrap();

        let mut org = node(1, &["organizer"], false, &h);
        assert_eq!(org.accept_transfer([&p], &h).accepted, 1);
        let before = org.clone();
        let again = org.accept_transfer([&p], &h);
        assert_eq!((again.accepted, again.duplicates), (0, 1));
        assert_eq!(org, before);

        let mut chair = node(2, &["chair"], false, &h);
        let out = chair.accept_transfer([&p], &h);
        assert_eq!((out.accepted, out.dropped), (0, 1));
        assert!(chair.store.is_empty());
        assert_eq!(chair.dropped, 1);

        let mut altruist = node(3, &[], true, &h);
        assert_eq!(altruist.accept_transfer([&p, &p], &h).accepted, 1);

        let hostile = Publication {
            id: PublicationId::new(99, 0),
            topic: "nosuch".into(),
            payload: String::new(),
            created_at: 0,
        };
        let out = altruist.accept_transfer([&hostile], &h);
        assert_eq!((out.accepted, out.dropped), (0, 1));
    }

    #[test]
    fn storage_paths() {
        let h = confinfo_hierarchy();
        let mut p = Publication {
            id: PublicationId::new(7, 2),
            topic: "logistics".into(),
            payload: String::new(),
            created_at: 0,
        };
        assert_eq!(store_path(&h, &p).unwrap(), "participant/organizer/logistics/7_2");
        p.topic = "participant".into();
        assert_eq!(store_path(&h, &p).unwrap(), "participant/7_2");
        p.topic = "nosuch".into();
        assert!(store_path(&h, &p).is_err());
    }

    fn arb_node() -> impl Strategy<Value = (Vec<usize>, bool, Vec<(usize, u32, u64)>)> {
        (
            prop::collection::vec(0usize..13, 0..3),
            any::<bool>(),
            prop::collection::vec((0usize..13, 0u32..4, 0u64..4), 0..6),
        )
    }

    type NodeSpec = (Vec<usize>, bool, Vec<(usize, u32, u64)>);

    fn build(id: u32, spec: &NodeSpec, h: &TopicHierarchy) -> NodeState {
        let codes: Vec<&str> = h.codes().collect();
        let mut n = NodeState::new(NodeId(id), spec.1);
        for &s in &spec.0 {
            n.subscribe(codes[s], h).unwrap();
        }
        // Seed the store through the admission rule.
        let incoming: Vec<Publication> = spec
            .2
            .iter()
            .map(|&(t, publisher, seq)| Publication {
                id: PublicationId::new(publisher + 100, seq),
                topic: codes[t].to_string(),
                payload: String::new(),
                created_at: 0,
            })
            .collect();
        n.accept_transfer(&incoming, h);
        n
    }

    proptest! {
        #[test]
        fn offers_are_always_accepted(a in arb_node(), b in arb_node()) {
            let h = confinfo_hierarchy();
            let sender = build(0, &a, &h);
            let mut receiver = build(1, &b, &h);
            let offers = compute_offers(&sender, &receiver.make_beacon(), &h);
            let pubs: Vec<&Publication> = offers.iter().map(|id| &sender.store[id]).collect();
            let outcome = receiver.accept_transfer(pubs, &h);
            prop_assert_eq!(outcome.accepted, offers.len());
            prop_assert!(receiver.admission_holds(&h));
            // Anything not offered and not held would have been dropped.
            let rest: Vec<&Publication> = sender
                .store
                .values()
                .filter(|p| !offers.contains(&p.id))
                .collect();
            let mut probe = receiver.clone();
            prop_assert_eq!(probe.accept_transfer(rest, &h).accepted, 0);
        }

        #[test]
        fn replay_changes_nothing(a in arb_node(), b in arb_node()) {
            let h = confinfo_hierarchy();
            let sender = build(0, &a, &h);
            let mut receiver = build(1, &b, &h);
            let all: Vec<Publication> = sender.store.values().cloned().collect();
            let first = receiver.accept_transfer(&all, &h);
            let snapshot = receiver.store.clone();
            let second = receiver.accept_transfer(&all, &h);
            prop_assert_eq!(second.accepted, 0);
            prop_assert_eq!(&receiver.store, &snapshot);
            prop_assert!(receiver.store.len() >= first.accepted);
        }
    }
}
