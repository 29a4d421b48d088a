use std::collections::BTreeMap;

use super::{
    validate_instance, Instance, MessageId, MessageSet, ModelError, RawComposite, RawInstance,
    RawReceiver,
};
use crate::mac::MacModel;

/// Stripes every message into `parts` sub-messages, one per new source, over
/// a `parts`-input binary adder.
pub fn stripe_instance(instance: &Instance, parts: usize) -> Result<Instance, ModelError> {
    if parts == 1 {
        return Ok(instance.clone());
    }
    stripe_instance_with_mac(instance, parts, MacModel::binary_adder(parts))
}

/// Source `k` of the result stores stripe `j.pk` of every message `j`;
/// the base instance's placement is discarded. Receiver wants and side
/// information are lifted to all stripes, and the aggregation map records
/// `j -> {j.p1, ..}`.
pub fn stripe_instance_with_mac(
    instance: &Instance,
    parts: usize,
    mac: MacModel,
) -> Result<Instance, ModelError> {
    let bad = |reason: &str| ModelError::BadParts {
        parts,
        reason: reason.to_string(),
    };
    if parts == 0 {
        return Err(bad("need at least one part"));
    }
    if mac.input_count() != parts {
        return Err(bad("MAC input count must equal the number of parts"));
    }
    if instance.aggregation().is_some() || instance.messages().iter().any(|m| m.part.is_some()) {
        return Err(bad("instance is already striped"));
    }
    if !instance.declared_composites().is_empty() {
        return Err(bad("declared composites cannot be striped"));
    }
    let parts_u32 = u32::try_from(parts).map_err(|_| bad("too many parts"))?;
    let stripes_of = |id: MessageId| (1..=parts_u32).map(move |p| MessageId::stripe(id.base, p));
    let lift = |set: MessageSet| {
        set.iter()
            .flat_map(|i| stripes_of(instance.message_id(i)))
            .collect::<Vec<_>>()
    };

    let messages: Vec<MessageId> = instance
        .messages()
        .iter()
        .flat_map(|&m| stripes_of(m))
        .collect();
    let sources = (1..=parts_u32)
        .map(|p| {
            instance
                .messages()
                .iter()
                .map(|m| MessageId::stripe(m.base, p))
                .collect()
        })
        .collect();
    let receivers = instance
        .receivers()
        .iter()
        .map(|r| RawReceiver {
            wants: lift(r.wants),
            has: lift(r.has),
        })
        .collect();
    let aggregation: BTreeMap<_, _> = instance
        .messages()
        .iter()
        .map(|&m| (m, stripes_of(m).collect()))
        .collect();

    validate_instance(RawInstance {
        messages,
        sources,
        receivers,
        mac,
        declared_composites: Vec::new(),
        aggregation: Some(aggregation),
    })
}

/// Example 1's receivers over two striped sources plus a coded third source
/// holding precoded combinations of both halves, on a 3-input adder.
pub fn mds_example_instance() -> Instance {
    let all: Vec<MessageId> = (1..=4)
        .flat_map(|j| [MessageId::stripe(j, 1), MessageId::stripe(j, 2)])
        .collect();
    let ends: Vec<MessageId> = [1, 4]
        .into_iter()
        .flat_map(|j| [MessageId::stripe(j, 1), MessageId::stripe(j, 2)])
        .collect();
    let has: [&[u32]; 4] = [&[4], &[3, 4], &[1, 2], &[2, 3]];
    let receivers = has
        .iter()
        .enumerate()
        .map(|(j, a)| RawReceiver {
            wants: vec![MessageId::stripe(j as u32 + 1, 1), MessageId::stripe(j as u32 + 1, 2)],
            has: a
                .iter()
                .flat_map(|&m| [MessageId::stripe(m, 1), MessageId::stripe(m, 2)])
                .collect(),
        })
        .collect();
    let declared = (1..=2)
        .flat_map(|c| {
            [
                RawComposite {
                    label: format!("c{c}:1,4"),
                    messages: ends.clone(),
                    carriers: vec![3],
                },
                RawComposite {
                    label: format!("c{c}:1,2,3,4"),
                    messages: all.clone(),
                    carriers: vec![3],
                },
            ]
        })
        .collect();
    let raw = RawInstance {
        messages: all.clone(),
        sources: vec![
            (1..=4).map(|j| MessageId::stripe(j, 1)).collect(),
            (1..=4).map(|j| MessageId::stripe(j, 2)).collect(),
            Vec::new(),
        ],
        receivers,
        mac: MacModel::binary_adder(3),
        declared_composites: declared,
        aggregation: Some(
            (1..=4)
                .map(|j| {
                    (
                        MessageId::plain(j),
                        vec![MessageId::stripe(j, 1), MessageId::stripe(j, 2)],
                    )
                })
                .collect(),
        ),
    };
    validate_instance(raw).expect("builtin MDS instance is valid")
}
