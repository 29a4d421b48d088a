use std::collections::BTreeMap;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::model::{Instance, MessageId};
use crate::rational::{self, Rational};

/// `Σ c_m · M_m` over GF(p), keyed by message index. Empty means idle (sends 0).
pub type LinearForm = BTreeMap<usize, u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSchedule {
    pub slots: Vec<LinearForm>,
    /// Rate of the ideal erasure code protecting this source's symbol stream.
    pub code_rate: Rational,
}

/// Periodic linear schedules of every source over a prime field.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    field: u32,
    sources: Vec<SourceSchedule>,
    claims: Option<BTreeMap<MessageId, Rational>>,
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl Scheme {
    /// Validates against `instance`: every slot uses only messages its source
    /// stores (or that one of its declared composites covers), coefficients lie
    /// in the field, and field symbols fit the channel inputs.
    pub fn new(
        instance: &Instance,
        field: u32,
        sources: Vec<SourceSchedule>,
        claims: Option<BTreeMap<MessageId, Rational>>,
    ) -> Result<Self, SimError> {
        let bad = |m: String| Err(SimError::InvalidScheme(m));
        if !is_prime(field) || field > 251 {
            return bad(format!("field size {field} is not a supported prime (2..=251)"));
        }
        let k = instance.source_count();
        if sources.len() != k {
            return bad(format!("{} schedules for {k} sources", sources.len()));
        }
        let period = sources[0].slots.len();
        if period == 0 {
            return bad("a period needs at least one slot".into());
        }
        for (s, sched) in sources.iter().enumerate() {
            if sched.slots.len() != period {
                return bad(format!(
                    "source {} has {} slots, expected {period}",
                    s + 1,
                    sched.slots.len()
                ));
            }
            if !sched.code_rate.is_positive() || sched.code_rate > Rational::one() {
                return bad(format!("source {} code rate must lie in (0, 1]", s + 1));
            }
            let stored = instance.sources()[s];
            let covered = instance
                .declared_composites()
                .iter()
                .filter(|c| c.carriers().contains(s))
                .fold(stored, |acc, c| acc.union(c.messages()));
            for (t, form) in sched.slots.iter().enumerate() {
                for (&m, &c) in form {
                    if m >= instance.message_count() {
                        return bad(format!("slot {} of source {} names an unknown message", t + 1, s + 1));
                    }
                    if c == 0 || c >= field {
                        return bad(format!(
                            "coefficient {c} of message {} is not a nonzero element of GF({field})",
                            instance.message_id(m)
                        ));
                    }
                    if !covered.contains(m) {
                        return bad(format!(
                            "source {} cannot compute with message {}",
                            s + 1,
                            instance.message_id(m)
                        ));
                    }
                }
            }
            if k > 1 && instance.mac().alphabet(s) < field {
                return bad(format!(
                    "GF({field}) symbols do not fit input {} of the channel (alphabet {})",
                    s + 1,
                    instance.mac().alphabet(s)
                ));
            }
        }
        Ok(Scheme {
            field,
            sources,
            claims,
        })
    }

    pub fn field(&self) -> u32 {
        self.field
    }

    pub fn sources(&self) -> &[SourceSchedule] {
        &self.sources
    }

    pub fn slots_per_period(&self) -> usize {
        self.sources[0].slots.len()
    }

    pub fn claims(&self) -> Option<&BTreeMap<MessageId, Rational>> {
        self.claims.as_ref()
    }

    /// Code rate shared by every source whose schedule mentions `m`, or `None`
    /// when no source sends it.
    pub(crate) fn message_code_rate(&self, m: usize) -> Result<Option<Rational>, SimError> {
        let mut rate: Option<&Rational> = None;
        for sched in &self.sources {
            if sched.slots.iter().any(|f| f.contains_key(&m)) {
                match rate {
                    Some(r) if *r != sched.code_rate => {
                        return Err(SimError::InvalidScheme(
                            "sources sending the same message use different code rates".into(),
                        ))
                    }
                    _ => rate = Some(&sched.code_rate),
                }
            }
        }
        Ok(rate.cloned())
    }

    /// Symbol sent by source `k` in slot `t` for message values `w`.
    pub(crate) fn encode(&self, k: usize, t: usize, w: &[u32]) -> u32 {
        let p = u64::from(self.field);
        let sum = self.sources[k].slots[t]
            .iter()
            .fold(0u64, |acc, (&m, &c)| (acc + u64::from(c) * u64::from(w[m])) % p);
        sum as u32
    }
}

/// Scheme file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDoc {
    #[serde(default = "default_field")]
    pub field: u32,
    /// Per source, per slot: message id → coefficient.
    pub slots: Vec<Vec<BTreeMap<String, u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_rates: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims: Option<BTreeMap<String, String>>,
}

fn default_field() -> u32 {
    2
}

fn parse_id(instance: &Instance, text: &str) -> Result<usize, SimError> {
    let id: MessageId = text
        .parse()
        .map_err(|e: crate::model::ParseMessageIdError| SimError::InvalidScheme(e.to_string()))?;
    instance
        .message_index(id)
        .ok_or_else(|| SimError::InvalidScheme(format!("unknown message {id}")))
}

impl SchemeDoc {
    pub fn into_scheme(self, instance: &Instance) -> Result<Scheme, SimError> {
        let rates = match &self.code_rates {
            None => vec![Rational::one(); self.slots.len()],
            Some(v) => {
                if v.len() != self.slots.len() {
                    return Err(SimError::InvalidScheme(
                        "code_rates needs one entry per source".into(),
                    ));
                }
                v.iter()
                    .map(|t| rational::parse(t).map_err(|e| SimError::InvalidScheme(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let sources = self
            .slots
            .iter()
            .zip(rates)
            .map(|(slots, code_rate)| {
                let slots = slots
                    .iter()
                    .map(|form| {
                        form.iter()
                            .map(|(id, &c)| Ok((parse_id(instance, id)?, c)))
                            .collect::<Result<LinearForm, SimError>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SourceSchedule { slots, code_rate })
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        let claims = match self.claims {
            None => None,
            Some(map) => Some(
                map.iter()
                    .map(|(id, r)| {
                        let id: MessageId = id.parse().map_err(|e: crate::model::ParseMessageIdError| {
                            SimError::InvalidScheme(e.to_string())
                        })?;
                        let r = rational::parse(r).map_err(|e| SimError::InvalidScheme(e.to_string()))?;
                        Ok((id, r))
                    })
                    .collect::<Result<BTreeMap<_, _>, SimError>>()?,
            ),
        };
        Scheme::new(instance, self.field, sources, claims)
    }
}

pub fn parse_scheme(instance: &Instance, text: &str) -> Result<Scheme, SimError> {
    let doc: SchemeDoc = serde_json::from_str(text).map_err(|e| SimError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.into_scheme(instance)
}

impl Scheme {
    pub fn to_doc(&self, instance: &Instance) -> SchemeDoc {
        let all_full = self.sources.iter().all(|s| s.code_rate.is_one());
        SchemeDoc {
            field: self.field,
            slots: self
                .sources
                .iter()
                .map(|s| {
                    s.slots
                        .iter()
                        .map(|f| {
                            f.iter()
                                .map(|(&m, &c)| (instance.message_id(m).to_string(), c))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            code_rates: (!all_full).then(|| {
                self.sources
                    .iter()
                    .map(|s| rational::render(&s.code_rate))
                    .collect()
            }),
            claims: self.claims.as_ref().map(|c| {
                c.iter()
                    .map(|(id, r)| (id.to_string(), rational::render(r)))
                    .collect()
            }),
        }
    }
}

