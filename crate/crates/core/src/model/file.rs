//! JSON instance files.
//!
//! ```json
//! {
//!   "n_messages": 4,
//!   "sources": [[1, 4], [1, 2, 3]],
//!   "receivers": [{"has": [4]}, {"has": [3, 4]}, {"has": [1, 2]}, {"has": [2, 3]}],
//!   "mac": {"type": "binary_adder", "inputs": 2}
//! }
//! ```
//!
//! For striped instances `stripes` maps each original id to its stripe ids
//! and the message universe is the union of the stripes. An optional
//! `selection` block names the decoding sets (and optionally the active
//! composite labels) of the scheme the instance was published with.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{validate_instance, Instance, MessageId, ModelError, RawComposite, RawInstance, RawReceiver};
use crate::mac::MacModel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FileError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] ModelError),
}

impl From<serde_json::Error> for FileError {
    fn from(e: serde_json::Error) -> Self {
        FileError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub n_messages: u32,
    pub sources: Vec<Vec<MessageId>>,
    pub receivers: Vec<ReceiverDoc>,
    pub mac: MacModel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub declared_composites: Vec<CompositeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stripes: Option<BTreeMap<String, Vec<MessageId>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wants: Option<Vec<MessageId>>,
    #[serde(default)]
    pub has: Vec<MessageId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeDoc {
    pub label: String,
    pub messages: Vec<MessageId>,
    pub carriers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionDoc {
    pub decoding_sets: Vec<Vec<MessageId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<String>>,
}

/// A parsed file: the validated instance plus its optional published selection.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub selection: Option<SelectionDoc>,
}

fn field(field: impl Into<String>, reason: impl Into<String>) -> FileError {
    FileError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

impl InstanceDoc {
    pub fn into_raw(self) -> Result<RawInstance, FileError> {
        if self.n_messages == 0 {
            return Err(field("n_messages", "must be positive"));
        }
        let (messages, aggregation) = match &self.stripes {
            None => ((1..=self.n_messages).map(MessageId::plain).collect(), None),
            Some(map) => {
                if map.len() != self.n_messages as usize {
                    return Err(field(
                        "stripes",
                        format!("has {} entries but n_messages is {}", map.len(), self.n_messages),
                    ));
                }
                let mut agg = BTreeMap::new();
                let mut universe = Vec::new();
                for (key, stripes) in map {
                    let id: MessageId = key
                        .parse()
                        .map_err(|e: super::ParseMessageIdError| field(format!("stripes.{key}"), e.to_string()))?;
                    universe.extend(stripes.iter().copied());
                    agg.insert(id, stripes.clone());
                }
                (universe, Some(agg))
            }
        };
        let stripe_mode = aggregation.is_some();
        let receivers = self
            .receivers
            .into_iter()
            .enumerate()
            .map(|(j, r)| {
                let wants = match r.wants {
                    Some(w) => w,
                    None if stripe_mode => {
                        return Err(field(
                            format!("receivers[{j}].wants"),
                            "required for striped instances",
                        ))
                    }
                    None => vec![MessageId::plain(j as u32 + 1)],
                };
                Ok(RawReceiver { wants, has: r.has })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RawInstance {
            messages,
            sources: self.sources,
            receivers,
            mac: self.mac,
            declared_composites: self
                .declared_composites
                .into_iter()
                .map(|c| RawComposite {
                    label: c.label,
                    messages: c.messages,
                    carriers: c.carriers,
                })
                .collect(),
            aggregation,
        })
    }

    pub fn from_instance(instance: &Instance, selection: Option<SelectionDoc>) -> Self {
        let raw = instance.to_raw();
        let plain = raw.aggregation.is_none();
        InstanceDoc {
            n_messages: instance.reported_messages().len() as u32,
            sources: raw.sources,
            receivers: raw
                .receivers
                .into_iter()
                .enumerate()
                .map(|(j, r)| ReceiverDoc {
                    wants: (!(plain && r.wants == [MessageId::plain(j as u32 + 1)])).then_some(r.wants),
                    has: r.has,
                })
                .collect(),
            mac: raw.mac,
            declared_composites: raw
                .declared_composites
                .into_iter()
                .map(|c| CompositeDoc {
                    label: c.label,
                    messages: c.messages,
                    carriers: c.carriers,
                })
                .collect(),
            stripes: raw
                .aggregation
                .map(|m| m.into_iter().map(|(k, v)| (k.to_string(), v)).collect()),
            selection,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, FileError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let selection = doc.selection.clone();
    let instance = validate_instance(doc.into_raw()?)?;
    Ok(InstanceFile {
        instance,
        selection,
    })
}

pub fn render_instance(instance: &Instance, selection: Option<SelectionDoc>) -> String {
    let doc = InstanceDoc::from_instance(instance, selection);
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize")
}
