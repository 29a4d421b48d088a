use std::collections::BTreeMap;

use super::{contains_point, Polyhedron, Variable};
use crate::composite::Selection;
use crate::rational::Rational;

/// One polyhedron of a region with the selection that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMember {
    pub polyhedron: Polyhedron,
    pub provenance: Selection,
}

/// Finite union of polyhedra over rate variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateRegion {
    members: Vec<RegionMember>,
}

impl RateRegion {
    pub fn new(members: Vec<RegionMember>) -> Self {
        RateRegion { members }
    }

    pub fn members(&self) -> &[RegionMember] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.iter().all(|m| m.polyhedron.has_infeasible_marker())
    }

    pub fn contains_point(&self, x: &BTreeMap<Variable, Rational>) -> bool {
        self.members.iter().any(|m| contains_point(&m.polyhedron, x))
    }
}
