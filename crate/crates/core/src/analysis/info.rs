use std::collections::BTreeMap;

use super::AnalysisError;

/// Sparse joint distribution (or weight table) over pairs `(a, e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<A: Ord, E: Ord> {
    cells: BTreeMap<(A, E), f64>,
}

impl<A: Ord, E: Ord> Default for JointDistribution<A, E> {
    fn default() -> Self {
        JointDistribution {
            cells: BTreeMap::new(),
        }
    }
}

impl<A: Ord + Copy, E: Ord + Copy> JointDistribution<A, E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, a: A, e: E, weight: f64) {
        *self.cells.entry((a, e)).or_insert(0.0) += weight;
    }

    pub fn merge(&mut self, other: JointDistribution<A, E>) {
        for ((a, e), w) in other.cells {
            self.add(a, e, w);
        }
    }

    pub fn scaled(&self, factor: f64) -> JointDistribution<A, E> {
        JointDistribution {
            cells: self.cells.iter().map(|(k, w)| (*k, w * factor)).collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.cells.values().sum()
    }

    pub fn get(&self, a: A, e: E) -> f64 {
        self.cells.get(&(a, e)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (A, E, f64)> + '_ {
        self.cells.iter().map(|(&(a, e), &w)| (a, e, w))
    }

    fn marginals(&self) -> (BTreeMap<A, f64>, BTreeMap<E, f64>) {
        let mut pa = BTreeMap::new();
        let mut pe = BTreeMap::new();
        for (&(a, e), &w) in &self.cells {
            *pa.entry(a).or_insert(0.0) += w;
            *pe.entry(e).or_insert(0.0) += w;
        }
        (pa, pe)
    }
}

impl<A: Ord + Copy, E: Ord + Copy> FromIterator<(A, E, f64)> for JointDistribution<A, E> {
    fn from_iter<T: IntoIterator<Item = (A, E, f64)>>(iter: T) -> Self {
        let mut d = JointDistribution::new();
        for (a, e, w) in iter {
            d.add(a, e, w);
        }
        d
    }
}

/// `I(A;E)` in bits. Zero cells contribute nothing.
pub fn mutual_information<A: Ord + Copy, E: Ord + Copy>(
    joint: &JointDistribution<A, E>,
) -> Result<f64, AnalysisError> {
    if let Some(w) = joint.cells.values().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(AnalysisError::MalformedTable(format!("entry {w}")));
    }
    let total = joint.total();
    if (total - 1.0).abs() > 1e-9 {
        return Err(AnalysisError::MalformedTable(format!(
            "entries sum to {total}"
        )));
    }
    let (pa, pe) = joint.marginals();
    let info: f64 = joint
        .cells
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|((a, e), &p)| p * (p / (pa[a] * pe[e])).log2())
        .sum();
    Ok(info.max(0.0))
}
