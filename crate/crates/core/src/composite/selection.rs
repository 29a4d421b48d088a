use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use super::CompositeError;
use crate::model::file::SelectionDoc;
use crate::model::{CompositeCatalog, Instance, MessageSet};

/// Decoding set `K_j` per receiver, optionally restricted to a subset of the
/// catalog (the composites the scheme actually sends).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selection {
    decoding: Vec<MessageSet>,
    active: Option<BTreeSet<String>>,
}

fn elements(s: MessageSet) -> Vec<usize> {
    s.iter().collect()
}

impl Ord for Selection {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |s: &Selection| {
            s.decoding
                .iter()
                .map(|k| (k.len(), elements(*k)))
                .collect::<Vec<_>>()
        };
        key(self)
            .cmp(&key(other))
            .then_with(|| self.active.cmp(&other.active))
    }
}

impl PartialOrd for Selection {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Selection {
    pub fn new(decoding: Vec<MessageSet>) -> Self {
        Selection {
            decoding,
            active: None,
        }
    }

    pub fn with_active(decoding: Vec<MessageSet>, active: impl IntoIterator<Item = String>) -> Self {
        Selection {
            decoding,
            active: Some(active.into_iter().collect()),
        }
    }

    /// `K_j = want_j` for every receiver.
    pub fn minimal(instance: &Instance) -> Self {
        Selection::new(instance.receivers().iter().map(|r| r.wants).collect())
    }

    pub fn decoding_sets(&self) -> &[MessageSet] {
        &self.decoding
    }

    pub fn decoding_set(&self, j: usize) -> MessageSet {
        self.decoding[j]
    }

    pub fn active(&self) -> Option<&BTreeSet<String>> {
        self.active.as_ref()
    }

    pub fn check(&self, instance: &Instance) -> Result<(), CompositeError> {
        let n = instance.receivers().len();
        if self.decoding.len() != n {
            return Err(CompositeError::BadDecodingSet {
                receiver: self.decoding.len().min(n) + 1,
                reason: format!("expected {n} decoding sets, got {}", self.decoding.len()),
            });
        }
        for (j, (k, r)) in self.decoding.iter().zip(instance.receivers()).enumerate() {
            if !r.wants.is_subset(*k) {
                return Err(CompositeError::BadDecodingSet {
                    receiver: j + 1,
                    reason: "must contain the wanted messages".into(),
                });
            }
            if !k.is_subset(instance.all_messages()) {
                return Err(CompositeError::BadDecodingSet {
                    receiver: j + 1,
                    reason: "refers to messages outside the instance".into(),
                });
            }
        }
        Ok(())
    }

    /// Resolves a file's selection block against its instance.
    pub fn from_doc(instance: &Instance, doc: &SelectionDoc) -> Result<Self, CompositeError> {
        let decoding = doc
            .decoding_sets
            .iter()
            .map(|ids| instance.parse_set(ids))
            .collect::<Result<Vec<_>, _>>()?;
        let sel = match &doc.active {
            None => Selection::new(decoding),
            Some(labels) => Selection::with_active(decoding, labels.iter().cloned()),
        };
        sel.check(instance)?;
        Ok(sel)
    }

    pub fn to_doc(&self, instance: &Instance) -> SelectionDoc {
        SelectionDoc {
            decoding_sets: self
                .decoding
                .iter()
                .map(|k| k.iter().map(|m| instance.message_id(m)).collect())
                .collect(),
            active: self.active.as_ref().map(|a| a.iter().cloned().collect()),
        }
    }

    /// `K1={1} K2={1,2} ...`, followed by the active composites if restricted.
    pub fn render(&self, instance: &Instance) -> String {
        let mut out = self
            .decoding
            .iter()
            .enumerate()
            .map(|(j, k)| format!("K{}={}", j + 1, instance.render_set(*k)))
            .collect::<Vec<_>>()
            .join(" ");
        if let Some(active) = &self.active {
            let labels: Vec<&str> = active.iter().map(String::as_str).collect();
            out.push_str(&format!(" active=[{}]", labels.join(" ")));
        }
        out
    }
}

/// Candidate decoding sets of one receiver. Sets giving the same usable
/// composites collapse to the smallest: extra messages without a usable
/// composite only add `R_m <= 0`.
fn receiver_candidates(instance: &Instance, catalog: &CompositeCatalog, j: usize) -> Vec<MessageSet> {
    let r = &instance.receivers()[j];
    let free = instance.all_messages().difference(r.wants.union(r.has));
    let mut best: BTreeMap<Vec<usize>, MessageSet> = BTreeMap::new();
    let mut extras: Vec<MessageSet> = free.subsets().collect();
    extras.sort_by_key(|s| (s.len(), elements(*s)));
    for x in extras {
        let k = r.wants.union(x);
        let known = k.union(r.has);
        let usable: Vec<usize> = catalog
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.messages().is_subset(known))
            .map(|(i, _)| i)
            .collect();
        best.entry(usable).or_insert(k);
    }
    let mut out: Vec<MessageSet> = best.into_values().collect();
    out.sort_by_key(|s| (s.len(), elements(*s)));
    out
}

/// Every selection tuple after per-receiver pruning, in lexicographic order.
pub fn enumerate_selections(
    instance: &Instance,
    catalog: &CompositeCatalog,
    cap: usize,
) -> Result<Vec<Selection>, CompositeError> {
    let per: Vec<Vec<MessageSet>> = (0..instance.receivers().len())
        .map(|j| receiver_candidates(instance, catalog, j))
        .collect();
    let count = per
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
        .unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(CompositeError::TooLarge { count, cap });
    }
    let mut out = vec![Vec::new()];
    for cands in &per {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<MessageSet>| {
                cands.iter().map(move |k| {
                    let mut v = prefix.clone();
                    v.push(*k);
                    v
                })
            })
            .collect();
    }
    let mut sels: Vec<Selection> = out.into_iter().map(Selection::new).collect();
    sels.sort();
    Ok(sels)
}
