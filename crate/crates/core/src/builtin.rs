//! The worked examples bundled with the crate: instance files with their
//! published selections, and explicit schemes for the ones with a symbol-level
//! construction.

use crate::composite::{CompositeError, Selection};
use crate::model::file::{parse_instance, FileError, InstanceFile};
use crate::model::Instance;
use crate::rational::{self, Rational};
use crate::sim::{parse_scheme, Scheme, SimError};

macro_rules! bundled {
    ($($name:literal => $path:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $path)))),*]
    };
}

const INSTANCES: &[(&str, &str)] = bundled! {
    "central-1234" => "instances/central-1234.json",
    "dist-12-34" => "instances/dist-12-34.json",
    "dist-14-23" => "instances/dist-14-23.json",
    "dist-14-123" => "instances/dist-14-123.json",
    "striped-2" => "instances/striped-2.json",
    "mds-3-2" => "instances/mds-3-2.json",
};

const SCHEMES: &[(&str, &str, &str)] = &[
    ("central-1234", "central-1234", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/schemes/central-1234.json"))),
    ("dist-12-34", "dist-12-34", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/schemes/dist-12-34.json"))),
    ("dist-14-123", "dist-14-123", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/schemes/dist-14-123.json"))),
    ("striped-2-cornerA", "striped-2", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/schemes/striped-2-cornerA.json"))),
    ("striped-2-cornerB", "striped-2", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/schemes/striped-2-cornerB.json"))),
];

/// Published operating points checked by region membership rather than by
/// simulation, one rate per reported message.
const POINTS: &[(&str, &[&str])] = &[
    ("dist-14-23", &["1/4", "1", "1", "1/4"]),
    ("mds-3-2", &["0.905", "0.905", "0.905", "0.905"]),
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuiltinError {
    #[error("unknown example `{name}`; available: {available}")]
    UnknownName { name: String, available: String },
    #[error("bundled file for `{name}` is broken: {reason}")]
    Broken { name: String, reason: String },
}

pub fn example_names() -> Vec<&'static str> {
    INSTANCES.iter().map(|(n, _)| *n).collect()
}

pub fn scheme_names() -> Vec<&'static str> {
    SCHEMES.iter().map(|(n, _, _)| *n).collect()
}

/// Raw JSON of a bundled instance.
pub fn instance_text(name: &str) -> Option<&'static str> {
    INSTANCES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn scheme_text(name: &str) -> Option<&'static str> {
    SCHEMES.iter().find(|(n, _, _)| *n == name).map(|(_, _, t)| *t)
}

fn broken(name: &str, e: impl std::fmt::Display) -> BuiltinError {
    BuiltinError::Broken {
        name: name.to_string(),
        reason: e.to_string(),
    }
}

pub fn builtin_instance(name: &str) -> Result<InstanceFile, BuiltinError> {
    let text = instance_text(name).ok_or_else(|| BuiltinError::UnknownName {
        name: name.to_string(),
        available: example_names().join(", "),
    })?;
    parse_instance(text).map_err(|e: FileError| broken(name, e))
}

/// A bundled instance with its published selection.
pub fn builtin_with_selection(name: &str) -> Result<(Instance, Selection), BuiltinError> {
    let file = builtin_instance(name)?;
    let doc = file
        .selection
        .as_ref()
        .ok_or_else(|| broken(name, "no selection block"))?;
    let sel = Selection::from_doc(&file.instance, doc).map_err(|e: CompositeError| broken(name, e))?;
    Ok((file.instance, sel))
}

/// A bundled scheme and the instance it runs on.
pub fn builtin_scheme(name: &str) -> Result<(Instance, Scheme), SimError> {
    let (_, instance_name, text) = SCHEMES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| SimError::UnknownName {
            name: name.to_string(),
            available: scheme_names().join(", "),
        })?;
    let file = builtin_instance(instance_name)
        .map_err(|e| SimError::InvalidScheme(e.to_string()))?;
    let scheme = parse_scheme(&file.instance, text)?;
    Ok((file.instance, scheme))
}

/// Schemes simulated for an example, time-shared with equal weights.
pub fn example_schemes(name: &str) -> Vec<&'static str> {
    SCHEMES
        .iter()
        .filter(|(_, inst, _)| *inst == name)
        .map(|(n, _, _)| *n)
        .collect()
}

/// The published point of an example without a symbol-level scheme.
pub fn reference_point(name: &str) -> Option<Vec<Rational>> {
    POINTS.iter().find(|(n, _)| *n == name).map(|(_, rates)| {
        rates
            .iter()
            .map(|r| rational::parse(r).expect("bundled point parses"))
            .collect()
    })
}
