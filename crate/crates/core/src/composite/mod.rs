//! Composite-coding constraint systems and their projections to rate space.
//!
//! A selection fixes each receiver's decoding set `K_j`. Its system joins the
//! decoding inequalities of every receiver with every receiver's MAC bounds;
//! eliminating the composite rates leaves one polyhedron over message rates.
//! The achievable region is the union over selections.

mod selection;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

pub use selection::{enumerate_selections, Selection};

use crate::mac::{receiver_mac_constraints, MacError, MutualInfoVector};
use crate::model::{enumerate_composites, CompositeCatalog, Instance, MessageSet, ModelError};
use crate::polytope::{
    fm_eliminate, lp_max, poly_contains_poly, remove_redundant, Inequality, LpValue, Polyhedron,
    PolytopeError, RateRegion, RegionMember, Variable,
};
use crate::rational::Rational;

/// Default cap on the number of selections an unrestricted run may enumerate.
pub const DEFAULT_SELECTION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompositeError {
    #[error("bad decoding set for receiver {receiver}: {reason}")]
    BadDecodingSet { receiver: usize, reason: String },
    #[error("selection names unknown composite `{0}`")]
    UnknownComposite(String),
    #[error("{count} selections exceed the cap of {cap}; restrict the selection")]
    TooLarge { count: u128, cap: usize },
    #[error("the region is empty")]
    EmptyRegion,
    #[error("the weighted rate is unbounded")]
    Unbounded,
    #[error("expected a single-source instance, found {0} sources")]
    NotCentralized(usize),
    #[error("no selection is available for paper mode")]
    MissingSelection,
    #[error(transparent)]
    Mac(#[from] MacError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A selection's full constraint system before elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub polyhedron: Polyhedron,
    pub selection: Selection,
    /// Per receiver, the decoding inequalities followed by the MAC inequalities.
    pub per_receiver: Vec<(Vec<Inequality>, Vec<Inequality>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectionMode {
    Paper(Selection),
    All,
}

#[derive(Debug, Clone)]
pub struct RegionOptions {
    pub selection_cap: usize,
    /// Worker threads for unrestricted runs; `None` uses rayon's default pool.
    pub workers: Option<usize>,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            selection_cap: DEFAULT_SELECTION_CAP,
            workers: None,
        }
    }
}

pub fn rate_var(instance: &Instance, index: usize) -> Variable {
    Variable::rate(instance.message_id(index))
}

fn composite_var(label: &str) -> Variable {
    Variable::composite(label)
}

/// Decoding inequalities of receiver `j` (0-based) for decoding set `k_j`:
/// for each nonempty `J ⊆ K_j \ A_j`, `Σ_{m∈J} R_m <= Σ S_C` over catalog
/// entries inside `K_j ∪ A_j` that meet `J`.
pub fn decoding_constraints(
    instance: &Instance,
    catalog: &CompositeCatalog,
    j: usize,
    k_j: MessageSet,
) -> Result<Vec<Inequality>, CompositeError> {
    let receiver = instance.receivers().get(j).ok_or_else(|| {
        CompositeError::BadDecodingSet {
            receiver: j + 1,
            reason: "no such receiver".into(),
        }
    })?;
    if !receiver.wants.is_subset(k_j) {
        return Err(CompositeError::BadDecodingSet {
            receiver: j + 1,
            reason: format!(
                "{} does not contain the wanted messages {}",
                instance.render_set(k_j),
                instance.render_set(receiver.wants)
            ),
        });
    }
    if !k_j.is_subset(instance.all_messages()) {
        return Err(CompositeError::BadDecodingSet {
            receiver: j + 1,
            reason: "refers to messages outside the instance".into(),
        });
    }
    let known = k_j.union(receiver.has);
    let usable: Vec<_> = catalog
        .entries()
        .iter()
        .filter(|c| c.messages().is_subset(known))
        .collect();
    let mut out = Vec::new();
    let mut targets: Vec<MessageSet> = k_j.difference(receiver.has).nonempty_subsets().collect();
    targets.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
    for target in targets {
        let lhs = target.iter().map(|m| rate_var(instance, m));
        let rhs = usable
            .iter()
            .filter(|c| c.messages().intersects(target))
            .map(|c| composite_var(c.label()));
        out.push(Inequality::sums_le(lhs, rhs));
    }
    Ok(out)
}

/// The catalog a selection actually uses.
pub fn selection_catalog(
    catalog: &CompositeCatalog,
    sel: &Selection,
) -> Result<CompositeCatalog, CompositeError> {
    match sel.active() {
        None => Ok(catalog.clone()),
        Some(labels) => {
            if let Some(missing) = labels.iter().find(|l| catalog.by_label(l).is_none()) {
                return Err(CompositeError::UnknownComposite(missing.clone()));
            }
            Ok(catalog.restricted(|c| labels.contains(c.label())))
        }
    }
}

pub fn assemble_selection_system(
    instance: &Instance,
    catalog: &CompositeCatalog,
    mi: &MutualInfoVector,
    sel: &Selection,
) -> Result<AssembledSystem, CompositeError> {
    sel.check(instance)?;
    let used = selection_catalog(catalog, sel)?;
    let mut all = Vec::new();
    let mut per_receiver = Vec::new();
    for j in 0..instance.receivers().len() {
        let dec = decoding_constraints(instance, &used, j, sel.decoding_set(j))?;
        let mac = receiver_mac_constraints(instance, &used, j, mi);
        all.extend(dec.iter().cloned());
        all.extend(mac.iter().cloned());
        per_receiver.push((dec, mac));
    }
    let vars = (0..instance.message_count())
        .map(|m| rate_var(instance, m))
        .chain(used.entries().iter().map(|c| composite_var(c.label())));
    Ok(AssembledSystem {
        polyhedron: Polyhedron::with_variables(all, vars),
        selection: sel.clone(),
        per_receiver,
    })
}

/// Eliminates composite rates, then (for striped instances) replaces stripe
/// rates by their aggregate sums.
pub fn region_for_selection(
    instance: &Instance,
    catalog: &CompositeCatalog,
    mi: &MutualInfoVector,
    sel: &Selection,
) -> Result<Polyhedron, CompositeError> {
    let system = assemble_selection_system(instance, catalog, mi, sel)?;
    let composites: Vec<Variable> = system
        .polyhedron
        .variables()
        .iter()
        .filter(|v| !v.is_rate())
        .cloned()
        .collect();
    let stripe_region = remove_redundant(&fm_eliminate(&system.polyhedron, &composites));
    match instance.aggregation() {
        None => Ok(stripe_region),
        Some(map) => Ok(aggregate(instance, &stripe_region, map)),
    }
}

/// Projects a stripe-rate polyhedron onto aggregate rates `R_j = Σ_p R_{j.p}`.
pub fn aggregate(
    instance: &Instance,
    stripe_region: &Polyhedron,
    map: &BTreeMap<crate::model::MessageId, MessageSet>,
) -> Polyhedron {
    let mut p = stripe_region.clone();
    for (orig, stripes) in map {
        let total = Variable::rate(*orig);
        let parts: Vec<Variable> = stripes.iter().map(|m| rate_var(instance, m)).collect();
        p.push(Inequality::sums_le([total.clone()], parts.clone()));
        p.push(Inequality::sums_le(parts, [total]));
    }
    let stripe_vars: Vec<Variable> = (0..instance.message_count())
        .map(|m| rate_var(instance, m))
        .collect();
    remove_redundant(&fm_eliminate(&p, &stripe_vars))
}

/// Theorem-style region: one polyhedron for a given selection, or the pruned
/// union over all selections.
pub fn achievable_region(
    instance: &Instance,
    mi: &MutualInfoVector,
    mode: &SelectionMode,
    options: &RegionOptions,
) -> Result<RateRegion, CompositeError> {
    let catalog = enumerate_composites(instance);
    match mode {
        SelectionMode::Paper(sel) => {
            let polyhedron = region_for_selection(instance, &catalog, mi, sel)?;
            Ok(RateRegion::new(vec![RegionMember {
                polyhedron,
                provenance: sel.clone(),
            }]))
        }
        SelectionMode::All => {
            let selections = enumerate_selections(instance, &catalog, options.selection_cap)?;
            let compute = || {
                selections
                    .par_iter()
                    .map(|sel| region_for_selection(instance, &catalog, mi, sel))
                    .collect::<Result<Vec<_>, _>>()
            };
            let polys = match options.workers {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map(|pool| pool.install(compute))
                    .unwrap_or_else(|_| compute())?,
                None => compute()?,
            };
            let members = polys
                .into_iter()
                .zip(selections)
                .map(|(polyhedron, provenance)| RegionMember {
                    polyhedron,
                    provenance,
                })
                .collect();
            Ok(prune(members))
        }
    }
}

/// Drops empty members and members contained in another; among equal members
/// the smallest selection survives.
pub fn prune(mut members: Vec<RegionMember>) -> RateRegion {
    members.retain(|m| !m.polyhedron.has_infeasible_marker());
    members.sort_by(|a, b| a.provenance.cmp(&b.provenance));
    // syntactically equal polyhedra first; cheap and common
    let mut seen = BTreeSet::new();
    members.retain(|m| seen.insert(m.polyhedron.render_lines()));
    let n = members.len();
    let contains: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| i != j && poly_contains_poly(&members[i].polyhedron, &members[j].polyhedron))
                .collect()
        })
        .collect();
    let keep: Vec<bool> = (0..n)
        .map(|i| !(0..n).any(|j| contains[j][i] && (!contains[i][j] || j < i)))
        .collect();
    RateRegion::new(
        members
            .into_iter()
            .zip(keep)
            .filter_map(|(m, k)| k.then_some(m))
            .collect(),
    )
}

/// Largest `Σ w·R` over the region's members.
pub fn max_weighted_rate(
    region: &RateRegion,
    weights: &BTreeMap<Variable, Rational>,
) -> Result<Rational, CompositeError> {
    let mut best: Option<Rational> = None;
    for m in region.members() {
        match lp_max(&m.polyhedron, weights) {
            Err(PolytopeError::Infeasible) => continue,
            Ok(LpValue::Unbounded) => return Err(CompositeError::Unbounded),
            Ok(LpValue::Optimal { value, .. }) => {
                if best.as_ref().is_none_or(|b| value > *b) {
                    best = Some(value);
                }
            }
        }
    }
    best.ok_or(CompositeError::EmptyRegion)
}

/// Unit weights on the reported rate variables.
pub fn sum_rate_weights(instance: &Instance) -> BTreeMap<Variable, Rational> {
    instance
        .reported_messages()
        .into_iter()
        .map(|id| (Variable::rate(id), Rational::from_integer(1.into())))
        .collect()
}

/// Single-source index coding over a unit-capacity link.
pub fn centralized_region(
    instance: &Instance,
    mode: &SelectionMode,
    options: &RegionOptions,
) -> Result<RateRegion, CompositeError> {
    if instance.source_count() != 1 {
        return Err(CompositeError::NotCentralized(instance.source_count()));
    }
    achievable_region(instance, &MutualInfoVector::unit_link(), mode, options)
}
