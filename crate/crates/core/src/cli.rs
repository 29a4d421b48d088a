//! Command implementations behind the `indexcode` binary.
//!
//! Every command returns its rendered output so the binary only parses
//! arguments and maps [`CliError`] to an exit code. Text and JSON renderings
//! are built from the same sections, so they always list the same
//! inequalities.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Signed;
use serde_json::{json, Map, Value};

use crate::builtin::{self, BuiltinError};
use crate::composite::{
    achievable_region, assemble_selection_system, max_weighted_rate, selection_catalog,
    AssembledSystem, CompositeError, RegionOptions, Selection, SelectionMode,
};
use crate::mac::{MacModel, MutualInfoVector, DEFAULT_PRECISION_BITS};
use crate::model::file::{parse_instance, InstanceFile};
use crate::model::{enumerate_composites, Instance, MessageId};
use crate::polytope::{Inequality, Polyhedron, RateRegion, Variable};
use crate::rational::{self, Rational};
use crate::sim::{self, parse_scheme, Scheme, SimError, SimReport};

/// Places shown in decimal renderings. Display only; values stay exact.
pub const DECIMAL_PLACES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid input; exit code 2.
    #[error("{0}")]
    Input(String),
    /// A resource cap was hit; exit code 3.
    #[error("{0}")]
    ResourceCap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::ResourceCap(_) => 3,
        }
    }
}

impl From<CompositeError> for CliError {
    fn from(e: CompositeError) -> Self {
        match e {
            CompositeError::TooLarge { .. } => CliError::ResourceCap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::BudgetExceeded { .. } => CliError::ResourceCap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<BuiltinError> for CliError {
    fn from(e: BuiltinError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionArg {
    Paper,
    All,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub precision_bits: u32,
    pub format: Format,
    /// `None`: the file's selection if it has one, else all selections.
    pub selection: Option<SelectionArg>,
    pub workers: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            precision_bits: DEFAULT_PRECISION_BITS,
            format: Format::Text,
            selection: None,
            workers: None,
        }
    }
}

/// Rendered text plus the same content as JSON.
struct Section {
    text: String,
    json: Value,
}

fn emit(section: Section, format: Format) -> String {
    match format {
        Format::Text => section.text,
        Format::Json => {
            let mut out = serde_json::to_string_pretty(&section.json).expect("values serialize");
            out.push('\n');
            out
        }
    }
}

fn decimal(value: &Rational) -> String {
    rational::render_decimal(value, DECIMAL_PLACES)
}

fn exact_and_decimal(value: &Rational) -> String {
    let exact = rational::render(value);
    let dec = decimal(value);
    format!("{exact} = {dec}")
}

/// Reads an instance from a path, falling back to a bundled example name.
pub fn load_instance(arg: &str) -> Result<InstanceFile, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
        return parse_instance(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")));
    }
    match builtin::builtin_instance(arg) {
        Ok(file) => Ok(file),
        Err(BuiltinError::UnknownName { available, .. }) => Err(CliError::Input(format!(
            "{arg}: no such file or bundled example (bundled: {available})"
        ))),
        Err(e) => Err(e.into()),
    }
}

/// Reads a scheme from a path, falling back to a bundled scheme name.
pub fn load_scheme(instance: &Instance, arg: &str) -> Result<Scheme, CliError> {
    let path = Path::new(arg);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{arg}: {e}")))?
    } else {
        builtin::scheme_text(arg)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "{arg}: no such file or bundled scheme (bundled: {})",
                    builtin::scheme_names().join(", ")
                ))
            })?
            .to_string()
    };
    parse_scheme(instance, &text).map_err(|e| CliError::from(e).prefixed(arg))
}

impl CliError {
    fn prefixed(self, what: &str) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{what}: {m}")),
            CliError::ResourceCap(m) => CliError::ResourceCap(format!("{what}: {m}")),
        }
    }
}

/// MAC mutual information, or the unit link for a single source.
pub fn mutual_info(instance: &Instance, precision_bits: u32) -> Result<MutualInfoVector, CliError> {
    if instance.source_count() == 1 {
        return Ok(MutualInfoVector::unit_link());
    }
    MutualInfoVector::compute(instance.mac(), precision_bits)
        .map_err(|e| CliError::Input(CompositeError::from(e).to_string()))
}

fn resolve_mode(file: &InstanceFile, arg: Option<SelectionArg>) -> Result<SelectionMode, CliError> {
    match (arg, &file.selection) {
        (Some(SelectionArg::All), _) | (None, None) => Ok(SelectionMode::All),
        (_, Some(doc)) => Ok(SelectionMode::Paper(Selection::from_doc(&file.instance, doc)?)),
        (Some(SelectionArg::Paper), None) => Err(CliError::Input(
            "the instance file has no selection block; use --selection=all".into(),
        )),
    }
}

fn mode_name(mode: &SelectionMode) -> &'static str {
    match mode {
        SelectionMode::Paper(_) => "paper",
        SelectionMode::All => "all",
    }
}

struct Computed {
    mode: SelectionMode,
    region: RateRegion,
}

fn compute_region(file: &InstanceFile, settings: &Settings) -> Result<Computed, CliError> {
    let mi = mutual_info(&file.instance, settings.precision_bits)?;
    let mode = resolve_mode(file, settings.selection)?;
    let options = RegionOptions {
        workers: settings.workers,
        ..RegionOptions::default()
    };
    let region = achievable_region(&file.instance, &mi, &mode, &options)?;
    Ok(Computed { mode, region })
}

fn inequality_json(q: &Inequality) -> Value {
    let coefficients: Map<String, Value> = q
        .coeffs()
        .iter()
        .map(|(v, c)| (v.to_string(), Value::String(rational::render(c))))
        .collect();
    json!({
        "text": q.to_string(),
        "coefficients": coefficients,
        "bound": rational::render(q.bound()),
        "bound_decimal": decimal(q.bound()),
    })
}

fn inequality_line(q: &Inequality) -> String {
    if q.bound().is_integer() {
        q.to_string()
    } else {
        format!("{}  [{}]", q, decimal(q.bound()))
    }
}

fn canonical_lines(p: &Polyhedron) -> Vec<Inequality> {
    p.canonicalized().inequalities().to_vec()
}

fn selection_json(instance: &Instance, sel: &Selection) -> Value {
    json!({
        "text": sel.render(instance),
        "decoding_sets": sel.to_doc(instance).decoding_sets,
        "active": sel.active().map(|a| a.iter().cloned().collect::<Vec<_>>()),
    })
}

fn region_section(instance: &Instance, computed: &Computed, precision_bits: u32) -> Section {
    let members = computed.region.members();
    let mut text = format!(
        "region ({} selection, {} polyhedr{}):\n",
        mode_name(&computed.mode),
        members.len(),
        if members.len() == 1 { "on" } else { "a" }
    );
    let mut items = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let lines = canonical_lines(&m.polyhedron);
        text.push_str(&format!("polyhedron {}: {}\n", i + 1, m.provenance.render(instance)));
        for q in &lines {
            text.push_str(&format!("  {}\n", inequality_line(q)));
        }
        items.push(json!({
            "selection": selection_json(instance, &m.provenance),
            "inequalities": lines.iter().map(inequality_json).collect::<Vec<_>>(),
        }));
    }
    Section {
        text,
        json: json!({
            "mode": mode_name(&computed.mode),
            "precision_bits": precision_bits,
            "polyhedra": items,
        }),
    }
}

/// `region`: the pruned union of polyhedra with their provenance selections.
pub fn run_region(instance_arg: &str, settings: &Settings) -> Result<String, CliError> {
    let file = load_instance(instance_arg)?;
    let computed = compute_region(&file, settings)?;
    Ok(emit(
        region_section(&file.instance, &computed, settings.precision_bits),
        settings.format,
    ))
}

/// Parses `v1,...,vN`, one rational per reported message.
fn parse_vector(instance: &Instance, text: &str, what: &str) -> Result<BTreeMap<Variable, Rational>, CliError> {
    let ids = instance.reported_messages();
    let values = text
        .split(',')
        .map(|t| rational::parse(t).map_err(|e| CliError::Input(format!("{what}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != ids.len() {
        return Err(CliError::Input(format!(
            "{what}: expected {} values, got {}",
            ids.len(),
            values.len()
        )));
    }
    Ok(ids.into_iter().map(Variable::rate).zip(values).collect())
}

fn sumrate_section(region: &RateRegion, weights: &BTreeMap<Variable, Rational>) -> Result<Section, CliError> {
    let value = max_weighted_rate(region, weights)?;
    let weights_json: Map<String, Value> = weights
        .iter()
        .map(|(v, w)| (v.to_string(), Value::String(rational::render(w))))
        .collect();
    Ok(Section {
        text: format!("weighted sum-rate: {}\n", exact_and_decimal(&value)),
        json: json!({
            "weights": weights_json,
            "value": rational::render(&value),
            "decimal": decimal(&value),
        }),
    })
}

/// `sumrate`: the largest weighted rate over the region.
pub fn run_sumrate(instance_arg: &str, weights: &str, settings: &Settings) -> Result<String, CliError> {
    let file = load_instance(instance_arg)?;
    let weights = parse_vector(&file.instance, weights, "--weights")?;
    if weights.values().any(|w| w.is_negative()) {
        return Err(CliError::Input("--weights: weights must be nonnegative".into()));
    }
    let computed = compute_region(&file, settings)?;
    Ok(emit(sumrate_section(&computed.region, &weights)?, settings.format))
}

fn member_section(region: &RateRegion, point: &BTreeMap<Variable, Rational>) -> Section {
    let hit = if point.values().any(|r| r.is_negative()) {
        None
    } else {
        region
            .members()
            .iter()
            .position(|m| crate::polytope::contains_point(&m.polyhedron, point))
    };
    let rates: Vec<String> = point
        .iter()
        .map(|(v, r)| format!("{v}={}", rational::render(r)))
        .collect();
    let text = match hit {
        Some(i) => format!("point {}: member: yes (polyhedron {})\n", rates.join(" "), i + 1),
        None => format!("point {}: member: no\n", rates.join(" ")),
    };
    let point_json: Map<String, Value> = point
        .iter()
        .map(|(v, r)| (v.to_string(), Value::String(rational::render(r))))
        .collect();
    Section {
        text,
        json: json!({
            "point": point_json,
            "member": hit.is_some(),
            "polyhedron": hit.map(|i| i + 1),
        }),
    }
}

/// `member`: whether a rate vector lies in the region.
pub fn run_member(instance_arg: &str, rates: &str, settings: &Settings) -> Result<String, CliError> {
    let file = load_instance(instance_arg)?;
    let point = parse_vector(&file.instance, rates, "--rates")?;
    let computed = compute_region(&file, settings)?;
    Ok(emit(member_section(&computed.region, &point), settings.format))
}

fn single_selection(file: &InstanceFile, arg: Option<SelectionArg>) -> Result<Selection, CliError> {
    match (arg, &file.selection) {
        (Some(SelectionArg::All), _) => Err(CliError::Input(
            "constraints are listed for one selection; drop --selection=all".into(),
        )),
        (_, Some(doc)) => Ok(Selection::from_doc(&file.instance, doc)?),
        (Some(SelectionArg::Paper), None) => Err(CliError::Input(
            "the instance file has no selection block".into(),
        )),
        (None, None) => Ok(Selection::minimal(&file.instance)),
    }
}

fn constraints_section(instance: &Instance, system: &AssembledSystem, labels: &[String], dump: bool) -> Section {
    let mut text = format!("selection: {}\n", system.selection.render(instance));
    text.push_str(&format!(
        "composites ({}): {}\n",
        labels.len(),
        labels.iter().map(|l| format!("S{{{l}}}")).collect::<Vec<_>>().join(" ")
    ));
    let mut receivers = Vec::new();
    for (j, (dec, mac)) in system.per_receiver.iter().enumerate() {
        if dump {
            text.push_str(&format!("receiver {}:\n  decoding:\n", j + 1));
            for q in dec {
                text.push_str(&format!("    {}\n", q.render_balanced()));
            }
            text.push_str("  mac:\n");
            for q in mac {
                text.push_str(&format!("    {}\n", q.render_balanced()));
            }
        } else {
            text.push_str(&format!(
                "receiver {}: {} decoding, {} mac inequalities\n",
                j + 1,
                dec.len(),
                mac.len()
            ));
        }
        let render = |qs: &[Inequality]| -> Vec<Value> {
            qs.iter()
                .map(|q| {
                    let mut v = inequality_json(q);
                    v["balanced"] = Value::String(q.render_balanced());
                    v
                })
                .collect()
        };
        receivers.push(json!({
            "receiver": j + 1,
            "decoding": render(dec),
            "mac": render(mac),
        }));
    }
    text.push_str(&format!(
        "system: {} inequalities over {} variables\n",
        system.polyhedron.len(),
        system.polyhedron.variables().len()
    ));
    Section {
        text,
        json: json!({
            "selection": selection_json(instance, &system.selection),
            "composites": labels,
            "receivers": receivers,
            "variables": system.polyhedron.variables().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        }),
    }
}

fn assemble(file: &InstanceFile, settings: &Settings) -> Result<(AssembledSystem, Vec<String>), CliError> {
    let sel = single_selection(file, settings.selection)?;
    let mi = mutual_info(&file.instance, settings.precision_bits)?;
    let catalog = enumerate_composites(&file.instance);
    let labels = selection_catalog(&catalog, &sel)?
        .entries()
        .iter()
        .map(|c| c.label().to_string())
        .collect();
    Ok((assemble_selection_system(&file.instance, &catalog, &mi, &sel)?, labels))
}

/// `constraints`: the system before elimination, per receiver.
pub fn run_constraints(instance_arg: &str, dump: bool, settings: &Settings) -> Result<String, CliError> {
    let file = load_instance(instance_arg)?;
    let (system, labels) = assemble(&file, settings)?;
    Ok(emit(
        constraints_section(&file.instance, &system, &labels, dump),
        settings.format,
    ))
}

fn rate_list(rates: &BTreeMap<Variable, Rational>) -> (String, Value) {
    let text = rates
        .iter()
        .map(|(v, r)| format!("{v} = {}", exact_and_decimal(r)))
        .collect::<Vec<_>>()
        .join(", ");
    let json: Map<String, Value> = rates
        .iter()
        .map(|(v, r)| (v.to_string(), Value::String(rational::render(r))))
        .collect();
    (text, Value::Object(json))
}

fn simulation_section(
    instance: &Instance,
    title: &str,
    report: &SimReport,
    scheme: Option<&Scheme>,
    region: &RateRegion,
) -> Section {
    let mut text = if report.tuples > 0 {
        format!(
            "simulation {title}: GF({}), {} slot(s) per period, {} message tuples\n",
            report.field, report.slots, report.tuples
        )
    } else {
        format!("simulation {title}: time-shared with equal weights\n")
    };
    let mut receivers = Vec::new();
    for r in &report.receivers {
        let wants: Vec<String> = r.wanted.iter().map(|w| w.message.to_string()).collect();
        let streams: Vec<String> = r.decoded_streams.iter().map(|s| s.to_string()).collect();
        text.push_str(&format!(
            "receiver {} (wants {{{}}}): recovered streams {{{}}}{}\n",
            r.receiver,
            wants.join(","),
            streams.join(","),
            if r.failure { ", FAILURE" } else { "" }
        ));
        let mut table = Vec::new();
        if !r.decode_table.is_empty() {
            text.push_str("  slot  y  tuples  decoded\n");
        }
        for (t, rows) in r.decode_table.iter().enumerate() {
            for row in rows {
                text.push_str(&format!(
                    "  {:>4} {:>2} {:>7} {:>8}\n",
                    t + 1,
                    row.y,
                    row.tuples,
                    row.decoded
                ));
                table.push(json!({"slot": t + 1, "y": row.y, "tuples": row.tuples, "decoded": row.decoded}));
            }
        }
        let mut wanted = Vec::new();
        for w in &r.wanted {
            text.push_str(&format!(
                "  message {}: erasure {}, rate {}\n",
                w.message,
                rational::render(&w.erasure),
                exact_and_decimal(&w.rate)
            ));
            wanted.push(json!({
                "message": w.message.to_string(),
                "erasure": rational::render(&w.erasure),
                "rate": rational::render(&w.rate),
                "rate_decimal": decimal(&w.rate),
            }));
        }
        receivers.push(json!({
            "receiver": r.receiver,
            "decoded_streams": r.decoded_streams,
            "failure": r.failure,
            "decode_table": table,
            "wanted": wanted,
        }));
    }
    let rates = report.rate_vector(instance);
    let (rates_text, rates_json) = rate_list(&rates);
    let sum = rates.values().fold(Rational::from_integer(0.into()), |a, r| a + r);
    let inside = sim::check_against_region(report, instance, region);
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    text.push_str(&format!("achieved rates: {rates_text}\n"));
    text.push_str(&format!("achieved sum-rate: {}\n", exact_and_decimal(&sum)));
    let false_decodes = (report.tuples > 0).then(|| report.false_decodes(instance));
    if let Some(n) = false_decodes {
        text.push_str(&format!("false decodes: {n}\n"));
    }
    let claims = scheme.and_then(|s| report.claims_met(instance, s));
    if let Some(ok) = claims {
        text.push_str(&format!("claims met: {}\n", yes_no(ok)));
    }
    text.push_str(&format!("inside region: {}\n", yes_no(inside)));
    Section {
        text,
        json: json!({
            "name": title,
            "field": report.field,
            "slots": report.slots,
            "tuples": report.tuples,
            "receivers": receivers,
            "rates": rates_json,
            "sum_rate": rational::render(&sum),
            "false_decodes": false_decodes,
            "claims_met": claims,
            "inside_region": inside,
        }),
    }
}

/// `simulate`: exhaustive run of a scheme plus its region-membership verdict.
pub fn run_simulate(instance_arg: &str, scheme_arg: &str, settings: &Settings) -> Result<String, CliError> {
    let file = load_instance(instance_arg)?;
    let scheme = load_scheme(&file.instance, scheme_arg)?;
    let report = sim::simulate_exhaustive(&file.instance, &scheme)?;
    let computed = compute_region(&file, settings)?;
    Ok(emit(
        simulation_section(&file.instance, scheme_arg, &report, Some(&scheme), &computed.region),
        settings.format,
    ))
}

fn mac_summary(mac: &MacModel) -> String {
    match mac {
        MacModel::BinaryAdder { inputs } => format!("binary adder, {inputs} input(s)"),
        MacModel::Table { alphabets, .. } => format!("table, alphabets {alphabets:?}"),
    }
}

fn instance_section(name: &str, instance: &Instance) -> Section {
    let mut text = format!(
        "instance {name}: {} messages, {} source(s), {} receivers\nmac: {}\n",
        instance.message_count(),
        instance.source_count(),
        instance.receivers().len(),
        mac_summary(instance.mac())
    );
    for (k, t) in instance.sources().iter().enumerate() {
        text.push_str(&format!("source {} stores {}\n", k + 1, instance.render_set(*t)));
    }
    for (j, r) in instance.receivers().iter().enumerate() {
        text.push_str(&format!(
            "receiver {} wants {}, has {}\n",
            j + 1,
            instance.render_set(r.wants),
            instance.render_set(r.has)
        ));
    }
    for c in instance.declared_composites() {
        let carriers: Vec<String> = c.carriers().iter().map(|k| (k + 1).to_string()).collect();
        text.push_str(&format!(
            "declared composite {} = {} carried by {{{}}}\n",
            c.label(),
            instance.render_set(c.messages()),
            carriers.join(",")
        ));
    }
    if let Some(map) = instance.aggregation() {
        for (orig, parts) in map {
            text.push_str(&format!("stripes of {orig}: {}\n", instance.render_set(*parts)));
        }
    }
    Section {
        text,
        json: json!({
            "name": name,
            "messages": instance.message_count(),
            "sources": instance.source_count(),
            "receivers": instance.receivers().len(),
            "mac": mac_summary(instance.mac()),
        }),
    }
}

fn point_map(instance: &Instance, rates: Vec<Rational>) -> BTreeMap<Variable, Rational> {
    instance
        .reported_messages()
        .into_iter()
        .map(|id: MessageId| Variable::rate(id))
        .zip(rates)
        .collect()
}

/// `example`: instance summary, constraint dump, eliminated region, sum-rate
/// and, where a scheme exists, its simulation and membership verdict.
pub fn run_example(name: &str, settings: &Settings) -> Result<String, CliError> {
    let file = builtin::builtin_instance(name)?;
    let instance = &file.instance;
    let mut sections = vec![("instance", instance_section(name, instance))];
    let constraint_settings = Settings {
        selection: settings.selection.filter(|s| *s == SelectionArg::Paper),
        ..settings.clone()
    };
    if settings.selection != Some(SelectionArg::All) {
        let (system, labels) = assemble(&file, &constraint_settings)?;
        sections.push(("constraints", constraints_section(instance, &system, &labels, true)));
    }
    let computed = compute_region(&file, settings)?;
    sections.push((
        "region",
        region_section(instance, &computed, settings.precision_bits),
    ));
    let ones = point_map(
        instance,
        vec![Rational::from_integer(1.into()); instance.reported_messages().len()],
    );
    sections.push(("sum_rate", sumrate_section(&computed.region, &ones)?));

    let schemes = builtin::example_schemes(name);
    let mut reports = Vec::new();
    let mut sim_sections = Vec::new();
    for s in &schemes {
        let (_, scheme) = builtin::builtin_scheme(s)?;
        let report = sim::simulate_exhaustive(instance, &scheme)?;
        sim_sections.push(simulation_section(instance, s, &report, Some(&scheme), &computed.region));
        reports.push(report);
    }
    if reports.len() > 1 {
        let w = Rational::new(1.into(), (reports.len() as i64).into());
        let mixed = sim::timeshare(&reports, &vec![w; reports.len()])?;
        sim_sections.push(simulation_section(
            instance,
            &schemes.join(" + "),
            &mixed,
            None,
            &computed.region,
        ));
    }
    if !sim_sections.is_empty() {
        let text = sim_sections.iter().map(|s| s.text.as_str()).collect::<String>();
        let json = Value::Array(sim_sections.into_iter().map(|s| s.json).collect());
        sections.push(("simulations", Section { text, json }));
    }
    if let Some(rates) = builtin::reference_point(name) {
        let mut s = member_section(&computed.region, &point_map(instance, rates));
        s.text = format!(
            "no symbol-level scheme is simulated for this example; its published point is checked by region membership\n{}",
            s.text
        );
        sections.push(("reference_point", s));
    }

    let text = sections
        .iter()
        .map(|(_, s)| s.text.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    let json: Map<String, Value> = sections.into_iter().map(|(k, s)| (k.to_string(), s.json)).collect();
    Ok(emit(
        Section {
            text,
            json: Value::Object(json),
        },
        settings.format,
    ))
}
