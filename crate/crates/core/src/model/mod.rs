//! Distributed index coding instances and their composite-message catalogs.
//!
//! An instance fixes which messages each source stores (`T_k`), what each
//! receiver wants and already has, and the deterministic MAC joining the
//! sources. Messages are addressed by [`MessageId`] in files and reports and
//! by their position in the instance's message universe internally.

mod catalog;
pub mod file;
mod sets;
mod stripe;

use std::collections::{BTreeMap, BTreeSet};

pub use catalog::{enumerate_composites, Composite, CompositeCatalog};
pub use sets::{MessageId, MessageSet, ParseMessageIdError, SourceSet};
pub use stripe::{mds_example_instance, stripe_instance, stripe_instance_with_mac};

use crate::mac::MacModel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("message {0} is not stored at any source")]
    UncoveredMessage(MessageId),
    #[error("receiver {receiver} both wants and has message {message}")]
    WantHasOverlap { receiver: usize, message: MessageId },
    #[error("receiver {0} wants nothing")]
    EmptyWant(usize),
    #[error("bad reference: {0}")]
    BadReference(String),
    #[error("instance has {sources} sources but the MAC has {inputs} inputs")]
    MacMismatch { sources: usize, inputs: usize },
    #[error("declared composite `{0}` has an empty message or carrier set")]
    EmptyComposite(String),
    #[error("duplicate composite label `{0}`")]
    DuplicateLabel(String),
    #[error("cannot stripe into {parts} parts: {reason}")]
    BadParts { parts: usize, reason: String },
    #[error("message set {0} is not in the catalog")]
    NotInCatalog(String),
    #[error("at most {max} {what} are supported, got {got}")]
    TooMany {
        what: &'static str,
        max: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    pub wants: MessageSet,
    pub has: MessageSet,
}

/// Unvalidated instance description, addressed by message ids.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    /// The message universe. Order is irrelevant; it is sorted on validation.
    pub messages: Vec<MessageId>,
    pub sources: Vec<Vec<MessageId>>,
    pub receivers: Vec<RawReceiver>,
    pub mac: MacModel,
    pub declared_composites: Vec<RawComposite>,
    /// Original message id -> its stripe ids.
    pub aggregation: Option<BTreeMap<MessageId, Vec<MessageId>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawReceiver {
    pub wants: Vec<MessageId>,
    pub has: Vec<MessageId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawComposite {
    pub label: String,
    pub messages: Vec<MessageId>,
    /// 1-based source numbers.
    pub carriers: Vec<usize>,
}

impl RawInstance {
    /// Messages `1..=n`, receiver `j` wants `{j}` and has `has[j-1]`.
    pub fn plain(n: u32, sources: &[&[u32]], has: &[&[u32]], mac: MacModel) -> Self {
        let ids = |xs: &[u32]| xs.iter().map(|&x| MessageId::plain(x)).collect::<Vec<_>>();
        RawInstance {
            messages: (1..=n).map(MessageId::plain).collect(),
            sources: sources.iter().map(|s| ids(s)).collect(),
            receivers: has
                .iter()
                .enumerate()
                .map(|(j, a)| RawReceiver {
                    wants: vec![MessageId::plain(j as u32 + 1)],
                    has: ids(a),
                })
                .collect(),
            mac,
            declared_composites: Vec::new(),
            aggregation: None,
        }
    }
}

/// A validated instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    messages: Vec<MessageId>,
    sources: Vec<MessageSet>,
    receivers: Vec<Receiver>,
    mac: MacModel,
    declared: Vec<Composite>,
    aggregation: Option<BTreeMap<MessageId, MessageSet>>,
}

pub fn validate_instance(raw: RawInstance) -> Result<Instance, ModelError> {
    let universe: Vec<MessageId> = raw
        .messages
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if universe.len() != raw.messages.len() {
        return Err(ModelError::BadReference(
            "message universe lists a message twice".into(),
        ));
    }
    if universe.is_empty() {
        return Err(ModelError::BadReference("instance has no messages".into()));
    }
    if universe.len() > MessageSet::CAPACITY {
        return Err(ModelError::TooMany {
            what: "messages",
            max: MessageSet::CAPACITY,
            got: universe.len(),
        });
    }
    if raw.sources.is_empty() || raw.sources.len() > 16 {
        return Err(ModelError::TooMany {
            what: "sources (and at least one)",
            max: 16,
            got: raw.sources.len(),
        });
    }

    let lookup = |id: &MessageId, ctx: &str| -> Result<usize, ModelError> {
        universe
            .binary_search(id)
            .map_err(|_| ModelError::BadReference(format!("{ctx} refers to unknown message {id}")))
    };
    let to_set = |ids: &[MessageId], ctx: &str| -> Result<MessageSet, ModelError> {
        ids.iter()
            .try_fold(MessageSet::empty(), |s, id| Ok(s.with(lookup(id, ctx)?)))
    };

    let sources = raw
        .sources
        .iter()
        .enumerate()
        .map(|(k, t)| to_set(t, &format!("source {}", k + 1)))
        .collect::<Result<Vec<_>, _>>()?;

    let k = sources.len();
    raw.mac
        .check()
        .map_err(|e| ModelError::BadReference(e.to_string()))?;
    if raw.mac.input_count() != k {
        return Err(ModelError::MacMismatch {
            sources: k,
            inputs: raw.mac.input_count(),
        });
    }

    let mut declared = Vec::new();
    let mut labels = BTreeSet::new();
    for d in &raw.declared_composites {
        let messages = to_set(&d.messages, &format!("composite `{}`", d.label))?;
        let mut carriers = SourceSet::empty();
        for &c in &d.carriers {
            if c == 0 || c > k {
                return Err(ModelError::BadReference(format!(
                    "composite `{}` names carrier {c} but there are {k} sources",
                    d.label
                )));
            }
            carriers = carriers.with(c - 1);
        }
        if messages.is_empty() || carriers.is_empty() {
            return Err(ModelError::EmptyComposite(d.label.clone()));
        }
        if !labels.insert(d.label.clone()) {
            return Err(ModelError::DuplicateLabel(d.label.clone()));
        }
        declared.push(Composite::declared(d.label.clone(), messages, carriers));
    }

    let stored = sources.iter().fold(MessageSet::empty(), |a, t| a.union(*t));
    if let Some(missing) = MessageSet::full(universe.len()).difference(stored).iter().next() {
        return Err(ModelError::UncoveredMessage(universe[missing]));
    }

    if raw.receivers.is_empty() {
        return Err(ModelError::BadReference("instance has no receivers".into()));
    }
    let mut receivers = Vec::with_capacity(raw.receivers.len());
    for (j, r) in raw.receivers.iter().enumerate() {
        let ctx = format!("receiver {}", j + 1);
        let wants = to_set(&r.wants, &ctx)?;
        let has = to_set(&r.has, &ctx)?;
        if wants.is_empty() {
            return Err(ModelError::EmptyWant(j + 1));
        }
        if let Some(m) = wants.intersection(has).iter().next() {
            return Err(ModelError::WantHasOverlap {
                receiver: j + 1,
                message: universe[m],
            });
        }
        receivers.push(Receiver { wants, has });
    }

    let aggregation = match &raw.aggregation {
        None => None,
        Some(map) => {
            let mut out = BTreeMap::new();
            let mut seen = MessageSet::empty();
            for (orig, stripes) in map {
                let set = to_set(stripes, &format!("stripes of {orig}"))?;
                if set.is_empty() || set.intersects(seen) {
                    return Err(ModelError::BadReference(format!(
                        "stripes of {orig} are empty or overlap another message's stripes"
                    )));
                }
                if universe.binary_search(orig).is_ok() {
                    return Err(ModelError::BadReference(format!(
                        "aggregate id {orig} collides with a stored message"
                    )));
                }
                seen = seen.union(set);
                out.insert(*orig, set);
            }
            if seen != MessageSet::full(universe.len()) {
                return Err(ModelError::BadReference(
                    "aggregation map does not cover every message".into(),
                ));
            }
            Some(out)
        }
    };

    Ok(Instance {
        messages: universe,
        sources,
        receivers,
        mac: raw.mac,
        declared,
        aggregation,
    })
}

impl Instance {
    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    pub fn messages(&self) -> &[MessageId] {
        &self.messages
    }

    pub fn message_id(&self, index: usize) -> MessageId {
        self.messages[index]
    }

    pub fn message_index(&self, id: MessageId) -> Option<usize> {
        self.messages.binary_search(&id).ok()
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[MessageSet] {
        &self.sources
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn mac(&self) -> &MacModel {
        &self.mac
    }

    pub fn declared_composites(&self) -> &[Composite] {
        &self.declared
    }

    pub fn aggregation(&self) -> Option<&BTreeMap<MessageId, MessageSet>> {
        self.aggregation.as_ref()
    }

    pub fn all_messages(&self) -> MessageSet {
        MessageSet::full(self.messages.len())
    }

    /// Ids under which rates are reported: aggregate ids for striped instances.
    pub fn reported_messages(&self) -> Vec<MessageId> {
        match &self.aggregation {
            Some(map) => map.keys().copied().collect(),
            None => self.messages.clone(),
        }
    }

    /// `{1,4}` style rendering.
    pub fn render_set(&self, set: MessageSet) -> String {
        format!("{{{}}}", self.join_ids(set))
    }

    pub(crate) fn join_ids(&self, set: MessageSet) -> String {
        set.iter()
            .map(|i| self.messages[i].to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_set(&self, ids: &[MessageId]) -> Result<MessageSet, ModelError> {
        ids.iter().try_fold(MessageSet::empty(), |s, id| {
            self.message_index(*id)
                .map(|i| s.with(i))
                .ok_or_else(|| ModelError::BadReference(format!("unknown message {id}")))
        })
    }

    pub fn to_raw(&self) -> RawInstance {
        let ids = |s: MessageSet| s.iter().map(|i| self.messages[i]).collect::<Vec<_>>();
        RawInstance {
            messages: self.messages.clone(),
            sources: self.sources.iter().map(|t| ids(*t)).collect(),
            receivers: self
                .receivers
                .iter()
                .map(|r| RawReceiver {
                    wants: ids(r.wants),
                    has: ids(r.has),
                })
                .collect(),
            mac: self.mac.clone(),
            declared_composites: self
                .declared
                .iter()
                .map(|c| RawComposite {
                    label: c.label().to_string(),
                    messages: ids(c.messages()),
                    carriers: c.carriers().iter().map(|k| k + 1).collect(),
                })
                .collect(),
            aggregation: self
                .aggregation
                .as_ref()
                .map(|m| m.iter().map(|(k, v)| (*k, ids(*v))).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example1_has() -> [&'static [u32]; 4] {
        [&[4], &[3, 4], &[1, 2], &[2, 3]]
    }

    #[test]
    fn example1_centralized_is_valid() {
        let raw = RawInstance::plain(4, &[&[1, 2, 3, 4]], &example1_has(), MacModel::binary_adder(1));
        let inst = validate_instance(raw).unwrap();
        assert_eq!(inst.message_count(), 4);
        assert_eq!(inst.source_count(), 1);
        assert_eq!(inst.receivers()[1].has, MessageSet::from_indices([2, 3]));
    }

    #[test]
    fn disjoint_sources_are_valid() {
        let raw = RawInstance::plain(4, &[&[1, 2], &[3, 4]], &example1_has(), MacModel::binary_adder(2));
        assert!(validate_instance(raw).is_ok());
    }

    #[test]
    fn uncovered_message_rejected() {
        let raw = RawInstance::plain(4, &[&[1, 2], &[1, 2]], &example1_has(), MacModel::binary_adder(2));
        assert_eq!(
            validate_instance(raw),
            Err(ModelError::UncoveredMessage(MessageId::plain(3)))
        );
    }

    #[test]
    fn overlap_and_bad_references_rejected() {
        let raw = RawInstance::plain(2, &[&[1, 2]], &[&[1], &[]], MacModel::binary_adder(1));
        assert!(matches!(
            validate_instance(raw),
            Err(ModelError::WantHasOverlap { receiver: 1, .. })
        ));
        let raw = RawInstance::plain(2, &[&[1, 2, 3]], &[&[], &[]], MacModel::binary_adder(1));
        assert!(matches!(validate_instance(raw), Err(ModelError::BadReference(_))));
        let mut raw = RawInstance::plain(2, &[&[1, 2]], &[&[], &[]], MacModel::binary_adder(1));
        raw.declared_composites.push(RawComposite {
            label: "c".into(),
            messages: vec![MessageId::plain(1)],
            carriers: vec![2],
        });
        assert!(matches!(validate_instance(raw), Err(ModelError::BadReference(_))));
    }

    #[test]
    fn mac_input_count_must_match() {
        let raw = RawInstance::plain(2, &[&[1, 2]], &[&[], &[]], MacModel::binary_adder(2));
        assert_eq!(
            validate_instance(raw),
            Err(ModelError::MacMismatch {
                sources: 1,
                inputs: 2
            })
        );
    }

    #[test]
    fn raw_round_trip() {
        let raw = RawInstance::plain(4, &[&[1, 4], &[1, 2, 3]], &example1_has(), MacModel::binary_adder(2));
        let inst = validate_instance(raw.clone()).unwrap();
        assert_eq!(inst.to_raw(), raw);
    }
}
