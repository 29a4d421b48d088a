use std::collections::HashMap;

use super::{Instance, MessageSet, ModelError, SourceSet};

/// A composite message `W_J`: a labeled message subset and the sources able to send it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composite {
    label: String,
    messages: MessageSet,
    carriers: SourceSet,
    declared: bool,
}

impl Composite {
    pub(crate) fn derived(label: String, messages: MessageSet, carriers: SourceSet) -> Self {
        Composite {
            label,
            messages,
            carriers,
            declared: false,
        }
    }

    pub(crate) fn declared(label: String, messages: MessageSet, carriers: SourceSet) -> Self {
        Composite {
            label,
            messages,
            carriers,
            declared: true,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn messages(&self) -> MessageSet {
        self.messages
    }

    pub fn carriers(&self) -> SourceSet {
        self.carriers
    }

    /// True for precoded composites listed in the instance rather than derived from `T_k`.
    pub fn is_declared(&self) -> bool {
        self.declared
    }
}

/// Every computable composite: the derived part `P'` followed by declared composites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeCatalog {
    entries: Vec<Composite>,
    by_label: HashMap<String, usize>,
    derived_by_set: HashMap<MessageSet, usize>,
}

/// Builds the catalog. Within each source, subsets come by size then
/// lexicographically; a subset seen at an earlier source is not repeated.
pub fn enumerate_composites(instance: &Instance) -> CompositeCatalog {
    let mut entries = Vec::new();
    let mut derived_by_set = HashMap::new();
    for t in instance.sources() {
        let mut subsets: Vec<MessageSet> = t.nonempty_subsets().collect();
        subsets.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
        for j in subsets {
            if derived_by_set.contains_key(&j) {
                continue;
            }
            let carriers = SourceSet::from_indices(
                instance
                    .sources()
                    .iter()
                    .enumerate()
                    .filter(|(_, tk)| j.is_subset(**tk))
                    .map(|(k, _)| k),
            );
            derived_by_set.insert(j, entries.len());
            entries.push(Composite::derived(instance.join_ids(j), j, carriers));
        }
    }
    entries.extend(instance.declared_composites().iter().cloned());
    let by_label = entries
        .iter()
        .enumerate()
        .map(|(i, c)| (c.label.clone(), i))
        .collect();
    CompositeCatalog {
        entries,
        by_label,
        derived_by_set,
    }
}

impl CompositeCatalog {
    pub fn entries(&self) -> &[Composite] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn by_label(&self, label: &str) -> Option<&Composite> {
        self.by_label.get(label).map(|&i| &self.entries[i])
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    pub fn derived(&self, messages: MessageSet) -> Option<&Composite> {
        self.derived_by_set.get(&messages).map(|&i| &self.entries[i])
    }

    /// Carriers of `messages`: the derived entry's, else the union over
    /// declared entries with exactly that message set.
    pub fn carriers(&self, messages: MessageSet) -> Result<SourceSet, ModelError> {
        if let Some(c) = self.derived(messages) {
            return Ok(c.carriers);
        }
        let declared: Vec<_> = self
            .entries
            .iter()
            .filter(|c| c.declared && c.messages == messages)
            .collect();
        if declared.is_empty() {
            return Err(ModelError::NotInCatalog(format!("{:#x}", messages.0)));
        }
        Ok(declared
            .iter()
            .fold(SourceSet::empty(), |a, c| a.union(c.carriers)))
    }

    /// Keeps only the entries for which `keep` holds.
    pub fn restricted(&self, mut keep: impl FnMut(&Composite) -> bool) -> CompositeCatalog {
        let entries: Vec<Composite> = self.entries.iter().filter(|c| keep(c)).cloned().collect();
        let by_label = entries
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.clone(), i))
            .collect();
        let derived_by_set = entries
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.declared)
            .map(|(i, c)| (c.messages, i))
            .collect();
        CompositeCatalog {
            entries,
            by_label,
            derived_by_set,
        }
    }
}
