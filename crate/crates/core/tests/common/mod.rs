#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;

use indexcode::builtin::builtin_with_selection;
use indexcode::cli::mutual_info;
use indexcode::composite::{
    achievable_region, assemble_selection_system, AssembledSystem, RegionOptions, Selection, SelectionMode,
};
use indexcode::mac::DEFAULT_PRECISION_BITS;
use indexcode::model::{enumerate_composites, Instance, MessageId};
use indexcode::polytope::{Inequality, Polyhedron, RateRegion, Variable};
use indexcode::rational::{self, Rational};

fn variable(token: &str) -> Variable {
    if let Some(label) = token.strip_prefix("S{").and_then(|t| t.strip_suffix('}')) {
        Variable::composite(label)
    } else {
        let id: MessageId = token.strip_prefix('R').expect("R or S variable").parse().unwrap();
        Variable::rate(id)
    }
}

fn side(text: &str, sign: i64) -> (Vec<(Variable, Rational)>, Rational) {
    let mut terms = Vec::new();
    let mut constant = rational::int(0);
    for term in text.split(" + ").map(str::trim) {
        if let Ok(c) = rational::parse(term) {
            constant += c;
            continue;
        }
        let (coef, var) = match term.split_once(' ') {
            Some((c, v)) => (rational::parse(c).unwrap(), v),
            None => (rational::int(1), term),
        };
        terms.push((variable(var), coef * rational::int(sign)));
    }
    (terms, constant)
}

/// Parses `R1 + R2 <= S{1} + S{1,2}` or `R1 + R2 <= 3/2`; decimals allowed.
pub fn ineq(text: &str) -> Inequality {
    let (lhs, rhs) = text.split_once("<=").expect("an inequality");
    let (mut terms, lc) = side(lhs, 1);
    let (rterms, rc) = side(rhs, -1);
    terms.extend(rterms);
    Inequality::new(terms, rc - lc)
}

pub fn system(lines: &[&str]) -> Polyhedron {
    Polyhedron::new(lines.iter().map(|l| ineq(l)).collect())
}

/// Canonical rendering of a list of inequalities, sorted.
pub fn canonical(lines: &[&str]) -> Vec<String> {
    system(lines).render_lines()
}

pub struct Paper {
    pub instance: Instance,
    pub selection: Selection,
    pub region: RateRegion,
}

impl Paper {
    pub fn polyhedron(&self) -> &Polyhedron {
        &self.region.members()[0].polyhedron
    }

    pub fn lines(&self) -> Vec<String> {
        self.polyhedron().render_lines()
    }

    pub fn system(&self) -> AssembledSystem {
        let mi = mutual_info(&self.instance, DEFAULT_PRECISION_BITS).unwrap();
        let catalog = enumerate_composites(&self.instance);
        assemble_selection_system(&self.instance, &catalog, &mi, &self.selection).unwrap()
    }
}

/// A bundled example's region under its published selection.
pub fn paper(name: &str) -> Paper {
    let (instance, selection) = builtin_with_selection(name).unwrap();
    let mi = mutual_info(&instance, DEFAULT_PRECISION_BITS).unwrap();
    let region = achievable_region(
        &instance,
        &mi,
        &SelectionMode::Paper(selection.clone()),
        &RegionOptions::default(),
    )
    .unwrap();
    Paper {
        instance,
        selection,
        region,
    }
}

pub fn point(instance: &Instance, rates: &[&str]) -> BTreeMap<Variable, Rational> {
    instance
        .reported_messages()
        .into_iter()
        .map(Variable::rate)
        .zip(rates.iter().map(|r| rational::parse(r).unwrap()))
        .collect()
}

pub fn unit_weights(instance: &Instance) -> BTreeMap<Variable, Rational> {
    indexcode::composite::sum_rate_weights(instance)
}
