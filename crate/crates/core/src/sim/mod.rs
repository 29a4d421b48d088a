//! Exhaustive simulation of explicit linear schemes.
//!
//! Every message carries one field symbol per period. For every tuple of
//! message values the simulator computes each slot's channel output, then lets
//! each receiver decode jointly over the whole period: a value is decoded when
//! all tuples consistent with the receiver's observations agree on it.
//!
//! Erasure block codes are idealized. A source may protect its symbol stream
//! with a code of rate `c`; a receiver recovers the whole stream once the
//! fraction of that stream's symbols it cannot pin down is at most `1 - c`,
//! and recovered streams feed back into decoding. A wanted message decoded in
//! a fraction `1 - ε` of tuples is credited `(1 - ε) · c / slots` symbols per
//! channel use.

mod scheme;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

pub use scheme::{parse_scheme, LinearForm, Scheme, SchemeDoc, SourceSchedule};

use crate::model::{Instance, MessageId};
use crate::polytope::{RateRegion, Variable};
use crate::rational::Rational;

/// Default cap on `q^N · slots` symbol evaluations.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("simulation needs {needed} evaluations, over the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("bad time-sharing weights: {0}")]
    BadWeights(String),
    #[error("unknown scheme `{name}`; available: {available}")]
    UnknownName { name: String, available: String },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// Decode outcomes for one output value of one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeRow {
    pub y: i64,
    /// Tuples producing `y` in this slot.
    pub tuples: u64,
    /// Of those, tuples in which every wanted message decodes.
    pub decoded: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WantedOutcome {
    pub message: MessageId,
    pub erasure: Rational,
    pub rate: Rational,
    /// Decoder output per message tuple (`None` = erased).
    pub decoded: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverReport {
    /// 1-based receiver number.
    pub receiver: usize,
    /// 1-based sources whose coded streams this receiver recovers.
    pub decoded_streams: Vec<usize>,
    pub wanted: Vec<WantedOutcome>,
    /// Per slot, one row per output value the slot produces.
    pub decode_table: Vec<Vec<DecodeRow>>,
    /// Some wanted message never decodes.
    pub failure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub field: u32,
    pub slots: usize,
    /// Number of message tuples enumerated; 0 for time-shared reports.
    pub tuples: u64,
    pub receivers: Vec<ReceiverReport>,
}

/// Message values of tuple `index`; message 0 varies fastest.
fn tuple_values(index: u64, q: u32, n: usize) -> Vec<u32> {
    let mut rest = index;
    (0..n)
        .map(|_| {
            let v = (rest % u64::from(q)) as u32;
            rest /= u64::from(q);
            v
        })
        .collect()
}

fn channel(instance: &Instance, x: &[u32]) -> i64 {
    // a single source talks over a noiseless link carrying one field symbol
    if instance.source_count() == 1 {
        i64::from(x[0])
    } else {
        instance.mac().output(x)
    }
}

struct Trace {
    w: Vec<u32>,
    /// `x[t][k]`
    x: Vec<Vec<u32>>,
    y: Vec<i64>,
}

fn tuple_count(instance: &Instance, scheme: &Scheme, budget: u64) -> Result<u64, SimError> {
    let n = instance.message_count() as u32;
    let tuples = u128::from(scheme.field()).checked_pow(n).unwrap_or(u128::MAX);
    let needed = tuples.saturating_mul(scheme.slots_per_period() as u128);
    if needed > u128::from(budget) {
        return Err(SimError::BudgetExceeded { needed, budget });
    }
    Ok(tuples as u64)
}

fn traces(instance: &Instance, scheme: &Scheme, tuples: u64) -> Vec<Trace> {
    let n = instance.message_count();
    let k = instance.source_count();
    (0..tuples)
        .into_par_iter()
        .map(|i| {
            let w = tuple_values(i, scheme.field(), n);
            let x: Vec<Vec<u32>> = (0..scheme.slots_per_period())
                .map(|t| (0..k).map(|s| scheme.encode(s, t, &w)).collect())
                .collect();
            let y = x.iter().map(|xt| channel(instance, xt)).collect();
            Trace { w, x, y }
        })
        .collect()
}

/// Group id per tuple for the observations of receiver `j` given recovered streams.
fn groups(instance: &Instance, traces: &[Trace], j: usize, streams: &BTreeSet<usize>) -> Vec<usize> {
    let has = instance.receivers()[j].has;
    let mut ids: HashMap<Vec<i64>, usize> = HashMap::new();
    traces
        .iter()
        .map(|tr| {
            let mut key = tr.y.clone();
            key.extend(has.iter().map(|m| i64::from(tr.w[m])));
            for &s in streams {
                key.extend(tr.x.iter().map(|xt| i64::from(xt[s])));
            }
            let next = ids.len();
            *ids.entry(key).or_insert(next)
        })
        .collect()
}

/// Common value of `value(tuple)` within each group, `None` where it varies.
fn group_constants(group: &[usize], value: impl Fn(usize) -> u32) -> Vec<Option<u32>> {
    let count = group.iter().max().map_or(0, |g| g + 1);
    let mut seen: Vec<Option<Option<u32>>> = vec![None; count];
    for (i, &g) in group.iter().enumerate() {
        let v = value(i);
        seen[g] = match seen[g] {
            None => Some(Some(v)),
            Some(Some(u)) if u == v => Some(Some(u)),
            _ => Some(None),
        };
    }
    seen.into_iter().map(|s| s.flatten()).collect()
}

fn simulate_receiver(
    instance: &Instance,
    scheme: &Scheme,
    traces: &[Trace],
    j: usize,
) -> Result<ReceiverReport, SimError> {
    let k = instance.source_count();
    let slots = scheme.slots_per_period();
    let total = traces.len() as u64;
    let mut streams = BTreeSet::new();
    let mut group = groups(instance, traces, j, &streams);
    loop {
        let mut gained = false;
        let pending: Vec<usize> = (0..k).filter(|s| !streams.contains(s)).collect();
        for s in pending {
            let mut erased = 0u64;
            for t in 0..slots {
                let consts = group_constants(&group, |i| traces[i].x[t][s]);
                erased += group.iter().filter(|&&g| consts[g].is_none()).count() as u64;
            }
            let eps = Rational::new(erased.into(), (total * slots as u64).into());
            if eps <= Rational::one() - &scheme.sources()[s].code_rate {
                streams.insert(s);
                gained = true;
            }
        }
        if !gained {
            break;
        }
        group = groups(instance, traces, j, &streams);
    }

    let receiver = &instance.receivers()[j];
    let mut wanted = Vec::new();
    for m in receiver.wants.iter() {
        let consts = group_constants(&group, |i| traces[i].w[m]);
        let decoded: Vec<Option<u32>> = group.iter().map(|&g| consts[g]).collect();
        let misses = decoded.iter().filter(|d| d.is_none()).count() as u64;
        let erasure = Rational::new(misses.into(), total.into());
        let code_rate = scheme.message_code_rate(m)?.unwrap_or_else(Rational::zero);
        let rate = (Rational::one() - &erasure) * code_rate / Rational::from_integer((slots as i64).into());
        wanted.push(WantedOutcome {
            message: instance.message_id(m),
            erasure,
            rate,
            decoded,
        });
    }

    let decode_table = (0..slots)
        .map(|t| {
            let mut rows: BTreeMap<i64, (u64, u64)> = BTreeMap::new();
            for (i, tr) in traces.iter().enumerate() {
                let e = rows.entry(tr.y[t]).or_default();
                e.0 += 1;
                if wanted.iter().all(|w| w.decoded[i].is_some()) {
                    e.1 += 1;
                }
            }
            rows.into_iter()
                .map(|(y, (tuples, decoded))| DecodeRow { y, tuples, decoded })
                .collect()
        })
        .collect();

    let failure = wanted.iter().any(|w| w.erasure.is_one() || w.rate.is_zero());
    Ok(ReceiverReport {
        receiver: j + 1,
        decoded_streams: streams.into_iter().map(|s| s + 1).collect(),
        wanted,
        decode_table,
        failure,
    })
}

/// Runs `scheme` on every message tuple.
pub fn simulate_exhaustive(instance: &Instance, scheme: &Scheme) -> Result<SimReport, SimError> {
    simulate_with_budget(instance, scheme, DEFAULT_BUDGET)
}

pub fn simulate_with_budget(
    instance: &Instance,
    scheme: &Scheme,
    budget: u64,
) -> Result<SimReport, SimError> {
    let tuples = tuple_count(instance, scheme, budget)?;
    let traces = traces(instance, scheme, tuples);
    let receivers = (0..instance.receivers().len())
        .into_par_iter()
        .map(|j| simulate_receiver(instance, scheme, &traces, j))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimReport {
        field: scheme.field(),
        slots: scheme.slots_per_period(),
        tuples,
        receivers,
    })
}

/// Channel-input tuples in `slot` consistent with output `y` and with the
/// receiver's known message values substituted into every encoder.
pub fn knowledge_set(
    instance: &Instance,
    scheme: &Scheme,
    slot: usize,
    y: i64,
    known: &BTreeMap<MessageId, u32>,
) -> Result<BTreeSet<Vec<u32>>, SimError> {
    if slot >= scheme.slots_per_period() {
        return Err(SimError::InvalidScheme(format!("no slot {}", slot + 1)));
    }
    let n = instance.message_count();
    let mut fixed = vec![None; n];
    for (id, v) in known {
        let m = instance
            .message_index(*id)
            .ok_or_else(|| SimError::InvalidScheme(format!("unknown message {id}")))?;
        fixed[m] = Some(*v % scheme.field());
    }
    let tuples = tuple_count(instance, scheme, DEFAULT_BUDGET)?;
    let k = instance.source_count();
    let mut out = BTreeSet::new();
    for i in 0..tuples {
        let w = tuple_values(i, scheme.field(), n);
        if fixed.iter().zip(&w).any(|(f, v)| f.is_some_and(|f| f != *v)) {
            continue;
        }
        let x: Vec<u32> = (0..k).map(|s| scheme.encode(s, slot, &w)).collect();
        if channel(instance, &x) == y {
            out.insert(x);
        }
    }
    Ok(out)
}

impl SimReport {
    /// Achieved rate per reported message: the smallest rate over receivers
    /// wanting it, stripes summed for striped instances.
    pub fn rate_vector(&self, instance: &Instance) -> BTreeMap<Variable, Rational> {
        let mut per: BTreeMap<MessageId, Rational> = BTreeMap::new();
        for r in &self.receivers {
            for w in &r.wanted {
                per.entry(w.message)
                    .and_modify(|v| {
                        if w.rate < *v {
                            *v = w.rate.clone()
                        }
                    })
                    .or_insert_with(|| w.rate.clone());
            }
        }
        let rate = |id: &MessageId| per.get(id).cloned().unwrap_or_else(Rational::zero);
        match instance.aggregation() {
            None => instance
                .messages()
                .iter()
                .map(|id| (Variable::rate(*id), rate(id)))
                .collect(),
            Some(map) => map
                .iter()
                .map(|(orig, stripes)| {
                    let total = stripes
                        .iter()
                        .map(|m| rate(&instance.message_id(m)))
                        .fold(Rational::zero(), |a, b| a + b);
                    (Variable::rate(*orig), total)
                })
                .collect(),
        }
    }

    /// Decoder outputs that differ from the true message value.
    pub fn false_decodes(&self, instance: &Instance) -> u64 {
        let n = instance.message_count();
        let mut bad = 0;
        for r in &self.receivers {
            for w in &r.wanted {
                let m = instance.message_index(w.message).expect("report matches instance");
                for (i, d) in w.decoded.iter().enumerate() {
                    if let Some(v) = d {
                        if tuple_values(i as u64, self.field, n)[m] != *v {
                            bad += 1;
                        }
                    }
                }
            }
        }
        bad
    }

    pub fn claims_met(&self, instance: &Instance, scheme: &Scheme) -> Option<bool> {
        let claims = scheme.claims()?;
        let achieved: BTreeMap<MessageId, Rational> = self
            .rate_vector(instance)
            .into_iter()
            .filter_map(|(v, r)| match v {
                Variable::Rate(id) => Some((id, r)),
                Variable::Composite(_) => None,
            })
            .collect();
        Some(
            claims
                .iter()
                .all(|(id, c)| achieved.get(id).is_some_and(|a| a >= c)),
        )
    }
}

/// Convex combination of reports with matching receivers and wants.
pub fn timeshare(reports: &[SimReport], weights: &[Rational]) -> Result<SimReport, SimError> {
    if reports.is_empty() || reports.len() != weights.len() {
        return Err(SimError::BadWeights("need one weight per report".into()));
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(SimError::BadWeights("weights must be nonnegative".into()));
    }
    let total = weights.iter().fold(Rational::zero(), |a, w| a + w);
    if !total.is_one() {
        return Err(SimError::BadWeights(format!(
            "weights sum to {}, not 1",
            crate::rational::render(&total)
        )));
    }
    let shape = |r: &SimReport| -> Vec<Vec<MessageId>> {
        r.receivers
            .iter()
            .map(|x| x.wanted.iter().map(|w| w.message).collect())
            .collect()
    };
    let first = &reports[0];
    if reports.iter().any(|r| shape(r) != shape(first)) {
        return Err(SimError::BadWeights(
            "reports cover different receivers or wanted messages".into(),
        ));
    }
    let used: Vec<&SimReport> = reports
        .iter()
        .zip(weights)
        .filter(|(_, w)| w.is_positive())
        .map(|(r, _)| r)
        .collect();
    if used.iter().all(|r| *r == used[0]) {
        return Ok(used[0].clone());
    }
    let receivers = first
        .receivers
        .iter()
        .enumerate()
        .map(|(j, base)| {
            let wanted = base
                .wanted
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let mix = |f: &dyn Fn(&WantedOutcome) -> Rational| {
                        reports
                            .iter()
                            .zip(weights)
                            .fold(Rational::zero(), |a, (r, wt)| a + wt * f(&r.receivers[j].wanted[i]))
                    };
                    WantedOutcome {
                        message: w.message,
                        erasure: mix(&|o| o.erasure.clone()),
                        rate: mix(&|o| o.rate.clone()),
                        decoded: Vec::new(),
                    }
                })
                .collect::<Vec<_>>();
            let streams: BTreeSet<usize> = used
                .iter()
                .map(|r| r.receivers[j].decoded_streams.iter().copied().collect::<BTreeSet<_>>())
                .reduce(|a, b| a.intersection(&b).copied().collect())
                .unwrap_or_default();
            ReceiverReport {
                receiver: base.receiver,
                decoded_streams: streams.into_iter().collect(),
                failure: wanted.iter().any(|w| w.rate.is_zero()),
                wanted,
                decode_table: Vec::new(),
            }
        })
        .collect();
    Ok(SimReport {
        field: first.field,
        slots: 0,
        tuples: 0,
        receivers,
    })
}

/// True iff the achieved rates lie in the region.
pub fn check_against_region(report: &SimReport, instance: &Instance, region: &RateRegion) -> bool {
    region.contains_point(&report.rate_vector(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::MacModel;
    use crate::model::{validate_instance, RawInstance};
    use crate::rational::{int, ratio};

    fn example6() -> Instance {
        let raw = RawInstance::plain(
            4,
            &[&[1, 4], &[1, 2, 3]],
            &[&[4], &[3, 4], &[1, 2], &[2, 3]],
            MacModel::binary_adder(2),
        );
        validate_instance(raw).unwrap()
    }

    fn form(pairs: &[(usize, u32)]) -> LinearForm {
        pairs.iter().copied().collect()
    }

    fn example6_scheme(inst: &Instance) -> Scheme {
        let src = |f: LinearForm| SourceSchedule {
            slots: vec![f],
            code_rate: int(1),
        };
        Scheme::new(
            inst,
            2,
            vec![src(form(&[(0, 1), (3, 1)])), src(form(&[(0, 1), (1, 1), (2, 1)]))],
            None,
        )
        .unwrap()
    }

    #[test]
    fn example6_rates_and_table() {
        let inst = example6();
        let report = simulate_exhaustive(&inst, &example6_scheme(&inst)).unwrap();
        let rates: Vec<Rational> = report.receivers.iter().map(|r| r.wanted[0].rate.clone()).collect();
        assert_eq!(rates, [ratio(1, 2), int(1), ratio(1, 2), int(1)]);
        assert_eq!(report.receivers[0].wanted[0].erasure, ratio(1, 2));
        let table = &report.receivers[0].decode_table[0];
        let outcome: Vec<(i64, bool)> = table.iter().map(|r| (r.y, r.decoded == r.tuples)).collect();
        assert_eq!(outcome, [(0, true), (1, false), (2, true)]);
        assert!(table.iter().all(|r| r.decoded == 0 || r.decoded == r.tuples));
        assert_eq!(report.false_decodes(&inst), 0);
    }

    #[test]
    fn knowledge_sets() {
        let inst = example6();
        let scheme = example6_scheme(&inst);
        let known = BTreeMap::from([(MessageId::plain(3), 0), (MessageId::plain(4), 1)]);
        let ks = knowledge_set(&inst, &scheme, 0, 1, &known).unwrap();
        assert_eq!(ks, BTreeSet::from([vec![0, 1], vec![1, 0]]));
        let ks = knowledge_set(&inst, &scheme, 0, 0, &BTreeMap::new()).unwrap();
        assert_eq!(ks, BTreeSet::from([vec![0, 0]]));
        assert!(knowledge_set(&inst, &scheme, 0, 7, &known).unwrap().is_empty());
    }

    #[test]
    fn scheme_validation() {
        let inst = example6();
        let src = |f: LinearForm| SourceSchedule {
            slots: vec![f],
            code_rate: int(1),
        };
        // source 1 does not store message 2
        let err = Scheme::new(&inst, 2, vec![src(form(&[(1, 1)])), src(form(&[]))], None);
        assert!(matches!(err, Err(SimError::InvalidScheme(_))));
        let err = Scheme::new(&inst, 4, vec![src(form(&[])), src(form(&[]))], None);
        assert!(matches!(err, Err(SimError::InvalidScheme(_))));
        let err = Scheme::new(&inst, 3, vec![src(form(&[])), src(form(&[]))], None);
        assert!(matches!(err, Err(SimError::InvalidScheme(_))), "GF(3) does not fit the adder");
    }

    #[test]
    fn budget() {
        let inst = example6();
        let scheme = example6_scheme(&inst);
        assert!(matches!(
            simulate_with_budget(&inst, &scheme, 8),
            Err(SimError::BudgetExceeded { needed: 16, budget: 8 })
        ));
    }

    #[test]
    fn timesharing() {
        let inst = example6();
        let r = simulate_exhaustive(&inst, &example6_scheme(&inst)).unwrap();
        assert_eq!(timeshare(std::slice::from_ref(&r), &[int(1)]).unwrap(), r);
        assert_eq!(timeshare(&[r.clone(), r.clone()], &[ratio(1, 2), ratio(1, 2)]).unwrap(), r);
        assert!(matches!(
            timeshare(&[r.clone(), r.clone()], &[ratio(1, 2), ratio(1, 3)]),
            Err(SimError::BadWeights(_))
        ));
        assert!(matches!(
            timeshare(std::slice::from_ref(&r), &[int(-1)]),
            Err(SimError::BadWeights(_))
        ));
    }
}
