//! Exact rational inequality systems over nonnegative named variables.
//!
//! Every [`Polyhedron`] carries implicit nonnegativity of all its variables.
//! Projection is Fourier–Motzkin, redundancy is decided by exact LP.

mod fm;
pub mod lp;
mod region;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use fm::{fm_eliminate, fm_eliminate_with, remove_redundant, DEFAULT_REDUNDANCY_THRESHOLD};
pub use region::{RateRegion, RegionMember};

use crate::model::MessageId;
use crate::rational::{render, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("the constraint system is infeasible")]
    Infeasible,
}

/// A rate variable: `R_j` for a message or `S_label` for a composite.
/// Rates order before composites; each kind orders by its id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Rate(MessageId),
    Composite(Arc<str>),
}

impl Variable {
    pub fn rate(id: MessageId) -> Self {
        Variable::Rate(id)
    }

    pub fn composite(label: &str) -> Self {
        Variable::Composite(Arc::from(label))
    }

    pub fn is_rate(&self) -> bool {
        matches!(self, Variable::Rate(_))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Rate(id) => write!(f, "R{id}"),
            Variable::Composite(label) => write!(f, "S{{{label}}}"),
        }
    }
}

/// `Σ coeffs[v]·v <= bound`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Inequality {
    coeffs: BTreeMap<Variable, Rational>,
    bound: Rational,
}

impl Inequality {
    pub fn new(coeffs: impl IntoIterator<Item = (Variable, Rational)>, bound: Rational) -> Self {
        let mut map: BTreeMap<Variable, Rational> = BTreeMap::new();
        for (v, c) in coeffs {
            *map.entry(v).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Inequality { coeffs: map, bound }
    }

    /// `v_1 + .. + v_n <= bound`.
    pub fn sum_le(vars: impl IntoIterator<Item = Variable>, bound: Rational) -> Self {
        Inequality::new(vars.into_iter().map(|v| (v, Rational::one())), bound)
    }

    /// `Σ lhs <= Σ rhs` for unit-coefficient sums, moved to one side.
    pub fn sums_le(
        lhs: impl IntoIterator<Item = Variable>,
        rhs: impl IntoIterator<Item = Variable>,
    ) -> Self {
        let terms = lhs
            .into_iter()
            .map(|v| (v, Rational::one()))
            .chain(rhs.into_iter().map(|v| (v, -Rational::one())));
        Inequality::new(terms, Rational::zero())
    }

    /// The unsatisfiable `0 <= -1`.
    pub fn infeasible() -> Self {
        Inequality {
            coeffs: BTreeMap::new(),
            bound: -Rational::one(),
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<Variable, Rational> {
        &self.coeffs
    }

    pub fn coefficient(&self, v: &Variable) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn is_infeasible_marker(&self) -> bool {
        self.coeffs.is_empty() && self.bound.is_negative()
    }

    /// Implied by nonnegativity alone.
    pub fn is_trivial(&self) -> bool {
        !self.bound.is_negative() && self.coeffs.values().all(|c| !c.is_positive())
    }

    /// Scaled by a positive factor so the coefficients are coprime integers.
    pub fn canonical(&self) -> Self {
        match canonical_scale(self.coeffs.values()) {
            None => {
                let bound = if self.bound.is_negative() {
                    -Rational::one()
                } else {
                    Rational::zero()
                };
                Inequality {
                    coeffs: BTreeMap::new(),
                    bound,
                }
            }
            Some(scale) => Inequality {
                coeffs: self
                    .coeffs
                    .iter()
                    .map(|(v, c)| (v.clone(), c * &scale))
                    .collect(),
                bound: &self.bound * &scale,
            },
        }
    }

    pub fn lhs_at(&self, point: &BTreeMap<Variable, Rational>) -> Rational {
        self.coeffs
            .iter()
            .filter_map(|(v, c)| point.get(v).map(|x| c * x))
            .fold(Rational::zero(), |a, t| a + t)
    }

    pub fn holds_at(&self, point: &BTreeMap<Variable, Rational>) -> bool {
        self.lhs_at(point) <= self.bound
    }
}

/// Positive factor making the values coprime integers, or `None` if all are zero.
pub(crate) fn canonical_scale<'a>(values: impl Iterator<Item = &'a Rational>) -> Option<Rational> {
    let mut lcm = num_bigint::BigInt::one();
    let mut nonzero = Vec::new();
    for v in values {
        if !v.is_zero() {
            lcm = lcm.lcm(v.denom());
            nonzero.push(v);
        }
    }
    if nonzero.is_empty() {
        return None;
    }
    let mut gcd = num_bigint::BigInt::zero();
    for v in &nonzero {
        let n = v.numer() * (&lcm / v.denom());
        gcd = gcd.gcd(&n);
    }
    Some(Rational::new(lcm, gcd))
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 <= {}", render(&self.bound));
        }
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{} {v}", render(&mag))?;
            }
        }
        write!(f, " <= {}", render(&self.bound))
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (&'a Variable, Rational)>) -> Vec<String> {
    terms
        .map(|(v, mag)| {
            if mag.is_one() {
                v.to_string()
            } else {
                format!("{} {v}", render(&mag))
            }
        })
        .collect()
}

impl Inequality {
    /// Negative terms moved to the right: `R1 + R2 <= S{1} + S{1,2}`.
    pub fn render_balanced(&self) -> String {
        let lhs = render_terms(
            self.coeffs
                .iter()
                .filter(|(_, c)| c.is_positive())
                .map(|(v, c)| (v, c.clone())),
        );
        let rhs = render_terms(
            self.coeffs
                .iter()
                .filter(|(_, c)| c.is_negative())
                .map(|(v, c)| (v, c.abs())),
        );
        let lhs = if lhs.is_empty() { "0".to_string() } else { lhs.join(" + ") };
        if rhs.is_empty() {
            return format!("{lhs} <= {}", render(&self.bound));
        }
        let mut rhs = rhs.join(" + ");
        if self.bound.is_positive() {
            rhs.push_str(&format!(" + {}", render(&self.bound)));
        } else if self.bound.is_negative() {
            rhs.push_str(&format!(" - {}", render(&self.bound.abs())));
        }
        format!("{lhs} <= {rhs}")
    }
}

/// Conjunction of inequalities over a variable space, all variables `>= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polyhedron {
    inequalities: Vec<Inequality>,
    variables: BTreeSet<Variable>,
}

impl Polyhedron {
    pub fn new(inequalities: Vec<Inequality>) -> Self {
        Polyhedron::with_variables(inequalities, [])
    }

    /// Declares extra variables that may not occur in any inequality.
    pub fn with_variables(
        inequalities: Vec<Inequality>,
        extra: impl IntoIterator<Item = Variable>,
    ) -> Self {
        let mut variables: BTreeSet<Variable> = extra.into_iter().collect();
        for q in &inequalities {
            variables.extend(q.coeffs.keys().cloned());
        }
        Polyhedron {
            inequalities,
            variables,
        }
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn variables(&self) -> &BTreeSet<Variable> {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.inequalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inequalities.is_empty()
    }

    pub fn push(&mut self, q: Inequality) {
        self.variables.extend(q.coeffs.keys().cloned());
        self.inequalities.push(q);
    }

    pub fn extend(&mut self, qs: impl IntoIterator<Item = Inequality>) {
        for q in qs {
            self.push(q);
        }
    }

    /// Canonical, sorted, duplicate-free copy.
    pub fn canonicalized(&self) -> Self {
        let set: BTreeSet<Inequality> = self.inequalities.iter().map(|q| q.canonical()).collect();
        Polyhedron {
            inequalities: set.into_iter().collect(),
            variables: self.variables.clone(),
        }
    }

    pub fn has_infeasible_marker(&self) -> bool {
        self.inequalities.iter().any(Inequality::is_infeasible_marker)
    }

    /// One rendered inequality per entry, in canonical order.
    pub fn render_lines(&self) -> Vec<String> {
        self.canonicalized()
            .inequalities
            .iter()
            .map(|q| q.to_string())
            .collect()
    }

    fn dense(&self, order: &[Variable]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let index: BTreeMap<&Variable, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut a = Vec::with_capacity(self.inequalities.len());
        let mut b = Vec::with_capacity(self.inequalities.len());
        for q in &self.inequalities {
            let mut row = vec![Rational::zero(); order.len()];
            for (v, c) in &q.coeffs {
                row[index[v]] = c.clone();
            }
            a.push(row);
            b.push(q.bound.clone());
        }
        (a, b)
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.render_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpValue {
    Optimal {
        value: Rational,
        witness: BTreeMap<Variable, Rational>,
    },
    Unbounded,
}

impl LpValue {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpValue::Optimal { value, .. } => Some(value),
            LpValue::Unbounded => None,
        }
    }
}

/// Exact maximum of `objective` over `p` and the nonnegative orthant.
pub fn lp_max(
    p: &Polyhedron,
    objective: &BTreeMap<Variable, Rational>,
) -> Result<LpValue, PolytopeError> {
    let order: Vec<Variable> = p
        .variables
        .iter()
        .chain(objective.keys())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (a, b) = p.dense(&order);
    let c: Vec<Rational> = order
        .iter()
        .map(|v| objective.get(v).cloned().unwrap_or_else(Rational::zero))
        .collect();
    match lp::maximize(&a, &b, &c) {
        lp::DenseOutcome::Infeasible => Err(PolytopeError::Infeasible),
        lp::DenseOutcome::Unbounded => Ok(LpValue::Unbounded),
        lp::DenseOutcome::Optimal { value, x } => Ok(LpValue::Optimal {
            value,
            witness: order.into_iter().zip(x).collect(),
        }),
    }
}

/// True iff `x >= 0` and `x` satisfies every inequality. Missing variables read as 0.
pub fn contains_point(p: &Polyhedron, x: &BTreeMap<Variable, Rational>) -> bool {
    x.values().all(|v| !v.is_negative()) && p.inequalities.iter().all(|q| q.holds_at(x))
}

/// True iff every point of `inner` lies in `outer`.
pub fn poly_contains_poly(outer: &Polyhedron, inner: &Polyhedron) -> bool {
    for q in &outer.inequalities {
        if q.is_trivial() {
            continue;
        }
        match lp_max(inner, &q.coeffs) {
            Err(PolytopeError::Infeasible) => return true,
            Ok(LpValue::Unbounded) => return false,
            Ok(LpValue::Optimal { value, .. }) => {
                if value > q.bound {
                    return false;
                }
            }
        }
    }
    // an empty inner is contained in anything, including an outer with no facets
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn r(j: u32) -> Variable {
        Variable::rate(MessageId::plain(j))
    }

    fn s(label: &str) -> Variable {
        Variable::composite(label)
    }

    #[test]
    fn variable_order_and_display() {
        assert!(r(4) < s("1"));
        assert!(r(1) < r(2));
        assert!(s("1,2") < s("1,4"));
        assert_eq!(r(3).to_string(), "R3");
        assert_eq!(Variable::rate(MessageId::stripe(1, 2)).to_string(), "R1.p2");
        assert_eq!(s("1,2,3,4").to_string(), "S{1,2,3,4}");
    }

    #[test]
    fn rendering() {
        let q = Inequality::sum_le([s("1,4"), s("1,2,3,4")], ratio(3, 2));
        assert_eq!(q.to_string(), "S{1,2,3,4} + S{1,4} <= 3/2");
        let q = Inequality::sums_le([r(1)], [s("1"), s("1,2")]);
        assert_eq!(q.to_string(), "R1 - S{1} - S{1,2} <= 0");
        assert_eq!(q.render_balanced(), "R1 <= S{1} + S{1,2}");
        let q = Inequality::new([(r(1), int(2)), (r(2), ratio(-1, 2))], int(1));
        assert_eq!(q.to_string(), "2 R1 - 1/2 R2 <= 1");
        assert_eq!(q.render_balanced(), "2 R1 <= 1/2 R2 + 1");
        assert_eq!(Inequality::infeasible().to_string(), "0 <= -1");
    }

    #[test]
    fn canonical_form() {
        let q = Inequality::new([(r(1), ratio(2, 3)), (r(2), ratio(4, 3))], int(2));
        let c = q.canonical();
        assert_eq!(c.to_string(), "R1 + 2 R2 <= 3");
        let q = Inequality::new([(r(1), int(-4)), (r(2), int(6))], int(3));
        assert_eq!(q.canonical().to_string(), "-2 R1 + 3 R2 <= 3/2");
        assert!(Inequality::new([], int(-7)).canonical().is_infeasible_marker());
        assert!(Inequality::new([(r(1), int(1)), (r(1), int(-1))], int(0)).coeffs().is_empty());
    }

    #[test]
    fn lp_max_examples() {
        let region = Polyhedron::new(vec![
            Inequality::sum_le([r(1), r(2)], int(1)),
            Inequality::sum_le([r(3), r(4)], int(1)),
            Inequality::sum_le([r(1), r(2), r(3)], ratio(3, 2)),
            Inequality::sum_le([r(1), r(2), r(4)], ratio(3, 2)),
        ]);
        let sum: BTreeMap<_, _> = (1..=4).map(|j| (r(j), int(1))).collect();
        match lp_max(&region, &sum).unwrap() {
            LpValue::Optimal { value, witness } => {
                assert_eq!(value, int(2));
                assert!(contains_point(&region, &witness));
            }
            LpValue::Unbounded => panic!("bounded"),
        }
        let open = Polyhedron::new(vec![]);
        assert_eq!(
            lp_max(&open, &BTreeMap::from([(r(1), int(1))])).unwrap(),
            LpValue::Unbounded
        );
        let empty = Polyhedron::new(vec![Inequality::sum_le([r(1)], int(-1))]);
        assert_eq!(
            lp_max(&empty, &BTreeMap::new()),
            Err(PolytopeError::Infeasible)
        );
    }

    #[test]
    fn point_membership() {
        let region = Polyhedron::new(vec![
            Inequality::sum_le([r(1), r(2)], int(1)),
            Inequality::sum_le([r(1), r(3)], int(1)),
            Inequality::sum_le([r(1), r(4)], int(1)),
            Inequality::sum_le([r(3), r(4)], int(1)),
        ]);
        let pt = |v: [Rational; 4]| -> BTreeMap<Variable, Rational> {
            v.into_iter().enumerate().map(|(i, x)| (r(i as u32 + 1), x)).collect()
        };
        let half = ratio(1, 2);
        assert!(contains_point(&region, &pt([half.clone(), half.clone(), half.clone(), half.clone()])));
        assert!(!contains_point(&region, &pt([ratio(3, 5), half.clone(), half.clone(), half.clone()])));
        assert!(contains_point(&region, &BTreeMap::new()));
        assert!(!contains_point(&region, &pt([int(-1), int(0), int(0), int(0)])));
    }

    #[test]
    fn containment() {
        let unit = Polyhedron::new(vec![
            Inequality::sum_le([r(1)], int(1)),
            Inequality::sum_le([r(2)], int(1)),
        ]);
        let double = Polyhedron::new(vec![
            Inequality::sum_le([r(1)], int(2)),
            Inequality::sum_le([r(2)], int(2)),
        ]);
        assert!(poly_contains_poly(&unit, &unit));
        assert!(poly_contains_poly(&double, &unit));
        assert!(!poly_contains_poly(&unit, &double));
        let empty = Polyhedron::new(vec![Inequality::infeasible()]);
        assert!(poly_contains_poly(&unit, &empty));
        assert!(!poly_contains_poly(&empty, &unit));
    }
}
