//! Deterministic multiple access channels under independent uniform inputs.
//!
//! For a deterministic channel `I(X_S; Y | X_{S^c}) = H(Y | X_{S^c})`, so every
//! polymatroid bound reduces to an enumeration over input tuples. The per-receiver
//! MAC constraints charge a composite to a source subset only when all of its
//! carriers lie inside that subset: a composite held by several sources is sent
//! cooperatively and escapes the single-source bounds.

pub mod entropy;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{CompositeCatalog, Instance, SourceSet};
use crate::polytope::{Inequality, Variable};
use crate::rational::{int, Rational};

pub const DEFAULT_PRECISION_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MacError {
    #[error("source subset {0:#b} refers to inputs beyond the channel's {1}")]
    BadSubset(u32, usize),
    #[error("bad input assignment: {0}")]
    BadAssignment(String),
    #[error("bad channel table: {0}")]
    BadTable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MacModel {
    /// `y = x_1 + .. + x_K` over binary inputs, summed as integers.
    BinaryAdder { inputs: usize },
    /// Arbitrary finite table; `outputs` is row-major with the last input fastest.
    Table {
        alphabets: Vec<u32>,
        outputs: Vec<i64>,
    },
}

impl MacModel {
    pub fn binary_adder(inputs: usize) -> Self {
        MacModel::BinaryAdder { inputs }
    }

    pub fn table(alphabets: Vec<u32>, outputs: Vec<i64>) -> Result<Self, MacError> {
        let mac = MacModel::Table { alphabets, outputs };
        mac.check()?;
        Ok(mac)
    }

    /// The adder written out as a table.
    pub fn adder_as_table(inputs: usize) -> Self {
        let outputs = (0..1u32 << inputs)
            .map(|code| i64::from((0..inputs).filter(|k| code >> k & 1 == 1).count() as u32))
            .collect();
        MacModel::Table {
            alphabets: vec![2; inputs],
            outputs,
        }
    }

    pub fn check(&self) -> Result<(), MacError> {
        match self {
            MacModel::BinaryAdder { inputs } => {
                if *inputs == 0 || *inputs > 16 {
                    return Err(MacError::BadTable(format!("adder with {inputs} inputs")));
                }
            }
            MacModel::Table { alphabets, outputs } => {
                if alphabets.is_empty() || alphabets.contains(&0) {
                    return Err(MacError::BadTable("alphabets must be nonempty and positive".into()));
                }
                let total = alphabets
                    .iter()
                    .try_fold(1usize, |acc, &a| acc.checked_mul(a as usize))
                    .filter(|&t| t <= 1 << 24)
                    .ok_or_else(|| MacError::BadTable("input space too large".into()))?;
                if outputs.len() != total {
                    return Err(MacError::BadTable(format!(
                        "expected {total} outputs, got {}",
                        outputs.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn input_count(&self) -> usize {
        match self {
            MacModel::BinaryAdder { inputs } => *inputs,
            MacModel::Table { alphabets, .. } => alphabets.len(),
        }
    }

    pub fn alphabet(&self, input: usize) -> u32 {
        match self {
            MacModel::BinaryAdder { .. } => 2,
            MacModel::Table { alphabets, .. } => alphabets[input],
        }
    }

    /// Channel output; inputs must lie in their alphabets.
    pub fn output(&self, x: &[u32]) -> i64 {
        match self {
            MacModel::BinaryAdder { .. } => x.iter().map(|&v| i64::from(v)).sum(),
            MacModel::Table { alphabets, outputs } => {
                let idx = x
                    .iter()
                    .zip(alphabets)
                    .fold(0usize, |acc, (&v, &a)| acc * a as usize + v as usize);
                outputs[idx]
            }
        }
    }

    /// Every output value the channel can produce.
    pub fn output_range(&self) -> Vec<i64> {
        let mut ys: Vec<i64> = match self {
            MacModel::BinaryAdder { inputs } => (0..=*inputs as i64).collect(),
            MacModel::Table { outputs, .. } => outputs.clone(),
        };
        ys.sort_unstable();
        ys.dedup();
        ys
    }

    /// Calls `f` for every input tuple agreeing with `fixed`.
    pub(crate) fn for_each_input(&self, fixed: &[Option<u32>], mut f: impl FnMut(&[u32])) {
        let k = self.input_count();
        let mut x: Vec<u32> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        loop {
            f(&x);
            // odometer over the free inputs, last input fastest
            let mut i = k;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if fixed[i].is_some() {
                    continue;
                }
                x[i] += 1;
                if x[i] < self.alphabet(i) {
                    break;
                }
                x[i] = 0;
            }
        }
    }
}

/// Distribution of `Y` with the inputs in `fixed` pinned and the rest uniform.
pub fn output_distribution(
    mac: &MacModel,
    fixed: &[Option<u32>],
) -> Result<BTreeMap<i64, Rational>, MacError> {
    let k = mac.input_count();
    if fixed.len() != k {
        return Err(MacError::BadAssignment(format!(
            "expected {k} entries, got {}",
            fixed.len()
        )));
    }
    for (i, v) in fixed.iter().enumerate() {
        if let Some(v) = v {
            if *v >= mac.alphabet(i) {
                return Err(MacError::BadAssignment(format!(
                    "input {} value {v} outside alphabet of size {}",
                    i + 1,
                    mac.alphabet(i)
                )));
            }
        }
    }
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut total = 0u64;
    mac.for_each_input(fixed, |x| {
        *counts.entry(mac.output(x)).or_default() += 1;
        total += 1;
    });
    Ok(counts
        .into_iter()
        .map(|(y, c)| (y, Rational::new(c.into(), total.into())))
        .collect())
}

/// `H(Y | X_{S^c})` as an exact log-linear form.
pub fn conditional_entropy(mac: &MacModel, s: SourceSet) -> Result<entropy::LogLinear, MacError> {
    let k = mac.input_count();
    if !s.is_subset(SourceSet::full(k)) {
        return Err(MacError::BadSubset(s.0, k));
    }
    let mut h = entropy::LogLinear::zero();
    if s.is_empty() {
        return Ok(h);
    }
    let complement: Vec<usize> = (0..k).filter(|i| !s.contains(*i)).collect();
    let assignments: u64 = complement.iter().map(|&i| u64::from(mac.alphabet(i))).product();
    let weight = Rational::new(1.into(), assignments.into());
    // walk the complement's assignments by holding the inputs in S at 0
    let walk_complement: Vec<Option<u32>> = (0..k).map(|i| s.contains(i).then_some(0)).collect();
    let mut err = None;
    mac.for_each_input(&walk_complement, |x| {
        let fixed: Vec<Option<u32>> = (0..k)
            .map(|i| (!s.contains(i)).then_some(x[i]))
            .collect();
        match output_distribution(mac, &fixed) {
            Ok(dist) => h.add_scaled(&entropy::entropy(dist.into_values()), &weight),
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(h),
    }
}

/// `I(X_S; Y | X_{S^c})`, floored to a multiple of `2^-precision_bits`
/// unless it is exactly dyadic.
pub fn conditional_mutual_info(
    mac: &MacModel,
    s: SourceSet,
    precision_bits: u32,
) -> Result<Rational, MacError> {
    Ok(conditional_entropy(mac, s)?.floor_dyadic(precision_bits))
}

/// Rounded `I(X_S; Y | X_{S^c})` for every source subset `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualInfoVector {
    inputs: usize,
    values: Vec<Rational>,
}

impl MutualInfoVector {
    pub fn compute(mac: &MacModel, precision_bits: u32) -> Result<Self, MacError> {
        let k = mac.input_count();
        let values = SourceSet::full(k)
            .subsets()
            .map(|s| (s.0, s))
            .collect::<BTreeMap<_, _>>()
            .into_values()
            .map(|s| conditional_mutual_info(mac, s, precision_bits))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MutualInfoVector { inputs: k, values })
    }

    /// The unit-capacity single link of centralized index coding.
    pub fn unit_link() -> Self {
        MutualInfoVector {
            inputs: 1,
            values: vec![int(0), int(1)],
        }
    }

    /// Values indexed by subset bit pattern; index 0 must be zero.
    pub fn from_values(inputs: usize, values: Vec<Rational>) -> Self {
        assert_eq!(values.len(), 1 << inputs);
        MutualInfoVector { inputs, values }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn get(&self, s: SourceSet) -> &Rational {
        &self.values[s.0 as usize]
    }
}

/// Polymatroid MAC constraints seen by receiver `receiver` (0-based).
///
/// Composites whose messages the receiver already has are dropped. For each
/// nonempty source subset `Ssub`, the rates of the remaining composites with
/// `carriers ⊆ Ssub` sum to at most `mi(Ssub)`.
pub fn receiver_mac_constraints(
    instance: &Instance,
    catalog: &CompositeCatalog,
    receiver: usize,
    mi: &MutualInfoVector,
) -> Vec<Inequality> {
    let has = instance.receivers()[receiver].has;
    let active: Vec<_> = catalog
        .entries()
        .iter()
        .filter(|c| !c.messages().is_subset(has))
        .collect();
    SourceSet::full(mi.inputs())
        .nonempty_subsets()
        .filter_map(|ssub| {
            let vars: Vec<Variable> = active
                .iter()
                .filter(|c| c.carriers().is_subset(ssub))
                .map(|c| Variable::composite(c.label()))
                .collect();
            if vars.is_empty() {
                return None;
            }
            Some(Inequality::sum_le(vars, mi.get(ssub).clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, to_f64};

    #[test]
    fn adder_two_inputs() {
        let mac = MacModel::binary_adder(2);
        let one = SourceSet::singleton(0);
        assert_eq!(conditional_mutual_info(&mac, one, 24).unwrap(), int(1));
        assert_eq!(
            conditional_mutual_info(&mac, SourceSet::full(2), 24).unwrap(),
            ratio(3, 2)
        );
        assert_eq!(conditional_mutual_info(&mac, SourceSet::empty(), 24).unwrap(), int(0));
        assert!(matches!(
            conditional_mutual_info(&mac, SourceSet::singleton(2), 24),
            Err(MacError::BadSubset(..))
        ));
    }

    #[test]
    fn adder_three_inputs_rounds_down() {
        let mac = MacModel::binary_adder(3);
        let v = conditional_mutual_info(&mac, SourceSet::full(3), 24).unwrap();
        let truth = 3.0 - 0.75 * 3f64.log2();
        assert!(to_f64(&v) <= truth);
        assert!(truth - to_f64(&v) < 2f64.powi(-24));
        assert_eq!(v.denom() % 2u32, 0u32.into());
    }

    #[test]
    fn distributions() {
        let mac = MacModel::binary_adder(2);
        let d = output_distribution(&mac, &[None, None]).unwrap();
        assert_eq!(d, BTreeMap::from([(0, ratio(1, 4)), (1, ratio(1, 2)), (2, ratio(1, 4))]));
        let d = output_distribution(&mac, &[None, Some(1)]).unwrap();
        assert_eq!(d, BTreeMap::from([(1, ratio(1, 2)), (2, ratio(1, 2))]));
        let id = MacModel::table(vec![2], vec![0, 1]).unwrap();
        let d = output_distribution(&id, &[None]).unwrap();
        assert_eq!(d, BTreeMap::from([(0, ratio(1, 2)), (1, ratio(1, 2))]));
        assert!(matches!(
            output_distribution(&mac, &[Some(2), None]),
            Err(MacError::BadAssignment(_))
        ));
        assert!(matches!(
            output_distribution(&mac, &[None]),
            Err(MacError::BadAssignment(_))
        ));
    }

    #[test]
    fn table_checks() {
        assert!(MacModel::table(vec![2, 2], vec![0, 1, 1]).is_err());
        assert!(MacModel::table(vec![], vec![0]).is_err());
        let xor = MacModel::table(vec![2, 2], vec![0, 1, 1, 0]).unwrap();
        assert_eq!(xor.output(&[1, 0]), 1);
        assert_eq!(xor.output_range(), vec![0, 1]);
        // XOR of two uniform bits: H(Y)=1, H(Y|X_2)=1
        let mi = MutualInfoVector::compute(&xor, 24).unwrap();
        assert_eq!(mi.get(SourceSet::full(2)), &int(1));
        assert_eq!(mi.get(SourceSet::singleton(1)), &int(1));
    }

    #[test]
    fn table_row_major_last_input_fastest() {
        // y = 10*x1 + x2 with x1 in {0,1}, x2 in {0,1,2}
        let t = MacModel::table(vec![2, 3], vec![0, 1, 2, 10, 11, 12]).unwrap();
        assert_eq!(t.output(&[1, 2]), 12);
        assert_eq!(t.output(&[0, 1]), 1);
    }
}
