//! Random systems and instances with independent checks, shared by the
//! property suites and the acceptance run.

use std::collections::BTreeMap;

use proptest::prelude::*;

use indexcode::cli::mutual_info;
use indexcode::composite::{region_for_selection, Selection};
use indexcode::mac::entropy::LogLinear;
use indexcode::mac::{conditional_entropy, MacModel, DEFAULT_PRECISION_BITS};
use indexcode::model::{enumerate_composites, validate_instance, Instance, MessageSet, RawInstance, SourceSet};
use indexcode::polytope::{fm_eliminate, lp_max, poly_contains_poly, remove_redundant, Inequality, LpValue, Polyhedron, Variable};
use indexcode::rational::{self, Rational};

pub const SYSTEM_VARS: usize = 6;

/// Rows `(coefficients, bound)`, the number of leading variables to
/// eliminate, and probe directions over the kept variables.
#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub rows: Vec<(Vec<i64>, i64)>,
    pub eliminate: usize,
    pub directions: Vec<Vec<i64>>,
}

pub fn random_system() -> impl Strategy<Value = RandomSystem> {
    let row = (prop::collection::vec(-3i64..=3, SYSTEM_VARS), -2i64..=6);
    (
        prop::collection::vec(row, 1..=10),
        0usize..=4,
        prop::collection::vec(prop::collection::vec(-2i64..=2, SYSTEM_VARS), 4),
    )
        .prop_map(|(rows, eliminate, directions)| RandomSystem {
            rows,
            eliminate,
            directions,
        })
}

fn x(i: usize) -> Variable {
    Variable::composite(&format!("x{i}"))
}

impl RandomSystem {
    pub fn polyhedron(&self) -> Polyhedron {
        let qs = self
            .rows
            .iter()
            .map(|(a, b)| {
                Inequality::new(
                    a.iter().enumerate().map(|(i, &c)| (x(i), rational::int(c))),
                    rational::int(*b),
                )
            })
            .collect();
        Polyhedron::with_variables(qs, (0..SYSTEM_VARS).map(x))
    }
}

fn support(p: &Polyhedron, c: &BTreeMap<Variable, Rational>) -> Option<Option<Rational>> {
    match lp_max(p, c) {
        Err(_) => None,
        Ok(LpValue::Unbounded) => Some(None),
        Ok(LpValue::Optimal { value, .. }) => Some(Some(value)),
    }
}

/// Compares the projection with the LP over the unprojected system: equal
/// feasibility and equal support values in every probe and unit direction.
/// Returns a description of the first disagreement.
pub fn fm_disagreement(sys: &RandomSystem) -> Option<String> {
    let p = sys.polyhedron();
    let gone: Vec<Variable> = (0..sys.eliminate).map(x).collect();
    let projected = fm_eliminate(&p, &gone);
    let reduced = remove_redundant(&projected);
    let kept = sys.eliminate..SYSTEM_VARS;
    let mut dirs: Vec<BTreeMap<Variable, Rational>> = sys
        .directions
        .iter()
        .map(|d| kept.clone().map(|i| (x(i), rational::int(d[i]))).collect())
        .collect();
    dirs.extend(kept.clone().map(|i| BTreeMap::from([(x(i), rational::int(1))])));
    dirs.push(BTreeMap::new());
    for q in [&projected, &reduced] {
        if q.variables().iter().any(|v| gone.contains(v)) {
            return Some("eliminated variable survives".into());
        }
        for d in &dirs {
            let (a, b) = (support(&p, d), support(q, d));
            if a != b {
                return Some(format!("direction {d:?}: original {a:?}, projected {b:?}"));
            }
        }
    }
    None
}

/// Small instance: per message a nonempty mask of sources storing it, per
/// receiver a side-information mask.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub n: usize,
    pub k: usize,
    pub storage: Vec<u32>,
    pub has: Vec<u32>,
    /// Extra decoding-set mask per receiver.
    pub extra: Vec<u32>,
    /// Which receiver / source to enlarge, and with which message (mod N).
    pub pick: (usize, usize),
}

pub fn random_instance() -> impl Strategy<Value = RandomInstance> {
    (1usize..=4, 1usize..=2).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(1u32..(1 << k), n),
            prop::collection::vec(0u32..(1 << n), n),
            prop::collection::vec(0u32..(1 << n), n),
            (0..16usize, 0..16usize),
        )
            .prop_map(move |(storage, has, extra, pick)| RandomInstance {
                n,
                k,
                storage,
                has,
                extra,
                pick,
            })
    })
}

impl RandomInstance {
    fn build(&self, storage: &[u32], has: &[u32]) -> Instance {
        let sources: Vec<Vec<u32>> = (0..self.k)
            .map(|s| (0..self.n).filter(|&m| storage[m] >> s & 1 == 1).map(|m| m as u32 + 1).collect())
            .collect();
        let has: Vec<Vec<u32>> = (0..self.n)
            .map(|j| {
                (0..self.n)
                    .filter(|&m| m != j && has[j] >> m & 1 == 1)
                    .map(|m| m as u32 + 1)
                    .collect()
            })
            .collect();
        let s: Vec<&[u32]> = sources.iter().map(Vec::as_slice).collect();
        let h: Vec<&[u32]> = has.iter().map(Vec::as_slice).collect();
        validate_instance(RawInstance::plain(self.n as u32, &s, &h, MacModel::binary_adder(self.k))).unwrap()
    }

    pub fn instance(&self) -> Instance {
        self.build(&self.storage, &self.has)
    }

    /// Same instance with one more side-information message at one receiver.
    pub fn more_side_information(&self) -> Instance {
        let mut has = self.has.clone();
        has[self.pick.0 % self.n] |= 1 << (self.pick.1 % self.n);
        self.build(&self.storage, &has)
    }

    /// Same instance with one more message stored at one source.
    pub fn more_storage(&self) -> Instance {
        let mut storage = self.storage.clone();
        storage[self.pick.1 % self.n] |= 1 << (self.pick.0 % self.k);
        self.build(&storage, &self.has)
    }

    pub fn selection(&self) -> Selection {
        Selection::new(
            (0..self.n)
                .map(|j| {
                    let mask = self.extra[j] | 1 << j;
                    MessageSet::from_indices((0..self.n).filter(|m| mask >> m & 1 == 1))
                })
                .collect(),
        )
    }
}

fn region(instance: &Instance, sel: &Selection) -> Polyhedron {
    let mi = mutual_info(instance, DEFAULT_PRECISION_BITS).unwrap();
    region_for_selection(instance, &enumerate_composites(instance), &mi, sel).unwrap()
}

/// `None` when both enlargements keep the old region, else which one failed.
pub fn monotonicity_violation(r: &RandomInstance) -> Option<&'static str> {
    let sel = r.selection();
    let base = region(&r.instance(), &sel);
    if !poly_contains_poly(&region(&r.more_side_information(), &sel), &base) {
        return Some("side information");
    }
    if !poly_contains_poly(&region(&r.more_storage(), &sel), &base) {
        return Some("storage");
    }
    None
}

/// Sign of `a + b - c - d`, decided exactly or by refining enclosures.
pub fn nonnegative_combination(a: &LogLinear, b: &LogLinear, c: &LogLinear, d: &LogLinear) -> bool {
    let mut diff = LogLinear::zero();
    diff.add_scaled(a, &rational::int(1));
    diff.add_scaled(b, &rational::int(1));
    diff.add_scaled(c, &rational::int(-1));
    diff.add_scaled(d, &rational::int(-1));
    if let Some(v) = diff.exact() {
        return *v >= rational::int(0);
    }
    let mut terms = 16;
    loop {
        let (lo, hi) = diff.bounds(terms);
        if lo >= rational::int(0) {
            return true;
        }
        if hi < rational::int(0) {
            return false;
        }
        terms *= 2;
    }
}

/// Pairs of source subsets on which `S -> I(X_S; Y | X_{S^c})` fails to be
/// normalized, monotone or submodular.
pub fn polymatroid_violations(mac: &MacModel) -> Vec<String> {
    let k = mac.input_count();
    let f: BTreeMap<SourceSet, LogLinear> = SourceSet::full(k)
        .subsets()
        .map(|s| (s, conditional_entropy(mac, s).unwrap()))
        .collect();
    let zero = LogLinear::zero();
    let mut bad = Vec::new();
    if f[&SourceSet::empty()].exact() != Some(&rational::int(0)) {
        bad.push("f(empty) != 0".to_string());
    }
    for (&a, fa) in &f {
        for (&b, fb) in &f {
            let u = SourceSet(a.0 | b.0);
            let i = SourceSet(a.0 & b.0);
            if !nonnegative_combination(fa, fb, &f[&u], &f[&i]) {
                bad.push(format!("submodularity fails on {a:?}, {b:?}"));
            }
            if a.is_subset(b) && !nonnegative_combination(fb, &zero, fa, &zero) {
                bad.push(format!("monotonicity fails on {a:?} within {b:?}"));
            }
        }
    }
    bad
}
