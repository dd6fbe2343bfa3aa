//! Generalized Ledley machinery: truth matrices for admissible sets, maximum
//! (restricted) sets, and subset antecedence/consequence verification.
//!
//! For a transition matrix M_F ∈ L_{N×(M·N)} and an admissible set Ω of next
//! states, the truth matrix T_Ω has T[u][x] = 1 iff applying control u in
//! state x lands in Ω. A feedback law u = M_G x is a subset antecedence
//! solution on a restricted set W iff M_G|_W ≤ T_Ω|_W entrywise; restriction
//! is evaluated as a masked comparison, so column positions always stay
//! aligned with state indices.

use std::collections::BTreeSet;

use crate::error::LedleyError;
use crate::matrix::{BoolMatrix, LogicalMatrix};

/// Subset of state indices {1..N} with exact set algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    universe: usize,
    members: BTreeSet<usize>,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet { universe, members: BTreeSet::new() }
    }

    pub fn full(universe: usize) -> Self {
        StateSet { universe, members: (1..=universe).collect() }
    }

    pub fn from_indices(
        universe: usize,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self, LedleyError> {
        let mut members = BTreeSet::new();
        for i in indices {
            if i == 0 || i > universe {
                return Err(LedleyError::StateIndex { index: i, n: universe });
            }
            members.insert(i);
        }
        Ok(StateSet { universe, members })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.universe
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(&index)
    }

    pub fn insert(&mut self, index: usize) {
        debug_assert!(index >= 1 && index <= self.universe);
        self.members.insert(index);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members.iter().copied().collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        StateSet {
            universe: self.universe,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        StateSet {
            universe: self.universe,
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        StateSet {
            universe: self.universe,
            members: self.members.difference(&other.members).copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        StateSet {
            universe: self.universe,
            members: (1..=self.universe).filter(|i| !self.members.contains(i)).collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// Splits the M·N columns of a transition matrix into (N states, M controls).
pub fn transition_dims(m_f: &LogicalMatrix) -> Result<(usize, usize), LedleyError> {
    let n = m_f.rows();
    let cols = m_f.num_cols();
    if n == 0 || !cols.is_multiple_of(n) {
        return Err(LedleyError::ColumnCount { cols, n });
    }
    Ok((n, cols / n))
}

/// Truth matrix of an admissible set: M rows (controls) × N columns (states).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthMatrix {
    matrix: BoolMatrix,
    omega: StateSet,
}

impl TruthMatrix {
    pub fn controls(&self) -> usize {
        self.matrix.rows()
    }

    pub fn states(&self) -> usize {
        self.matrix.cols()
    }

    /// Entry at (control u, state x), both 1-based.
    pub fn entry(&self, u: usize, x: usize) -> bool {
        self.matrix.get(u - 1, x - 1)
    }

    /// The admissible set this matrix was built from.
    pub fn omega(&self) -> &StateSet {
        &self.omega
    }

    pub fn as_bool(&self) -> &BoolMatrix {
        &self.matrix
    }

    /// Rows of 0/1 integers, the JSON export form.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.matrix.to_rows_u8()
    }
}

/// Build T_Ω for the transition matrix M_F: entry (u,x) is 1 iff
/// Col_{(u−1)N+x}(M_F) ∈ Ω.
pub fn truth_matrix(m_f: &LogicalMatrix, omega: &StateSet) -> Result<TruthMatrix, LedleyError> {
    let (n, m) = transition_dims(m_f)?;
    if omega.universe() != n {
        return Err(LedleyError::UniverseMismatch { universe: omega.universe(), n });
    }
    let mut matrix = BoolMatrix::zeros(m, n).expect("positive dims");
    for u in 1..=m {
        for x in 1..=n {
            if omega.contains(m_f.col((u - 1) * n + x)) {
                matrix.set(u - 1, x - 1, true);
            }
        }
    }
    Ok(TruthMatrix { matrix, omega: omega.clone() })
}

/// Maximum (restricted) subset: the states whose truth-matrix column is
/// non-zero, i.e. from which Ω is reachable in one step.
pub fn maximum_set(t: &TruthMatrix) -> StateSet {
    let mut set = StateSet::empty(t.states());
    for x in 1..=t.states() {
        if (1..=t.controls()).any(|u| t.entry(u, x)) {
            set.insert(x);
        }
    }
    set
}

/// State feedback law u = M_G x in algebraic form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedbackLaw {
    m_g: LogicalMatrix,
}

impl FeedbackLaw {
    pub fn new(m_g: LogicalMatrix) -> Self {
        FeedbackLaw { m_g }
    }

    pub fn matrix(&self) -> &LogicalMatrix {
        &self.m_g
    }

    pub fn states(&self) -> usize {
        self.m_g.num_cols()
    }

    /// Control index applied in state x.
    pub fn control_at(&self, x: usize) -> usize {
        self.m_g.col(x)
    }
}

fn check_shapes(g: &FeedbackLaw, t: &TruthMatrix, w: &StateSet) -> Result<(), LedleyError> {
    if g.m_g.rows() != t.controls() || g.states() != t.states() {
        return Err(LedleyError::Shape(format!(
            "law {}x{} vs truth matrix {}x{}",
            g.m_g.rows(),
            g.states(),
            t.controls(),
            t.states()
        )));
    }
    if w.universe() != t.states() {
        return Err(LedleyError::UniverseMismatch { universe: w.universe(), n: t.states() });
    }
    Ok(())
}

/// M_G|_W ≤ T|_W: the law is a subset antecedence solution on W. Since each
/// law column has exactly one 1, this reduces to T[g(x)][x] = 1 for x ∈ W.
pub fn is_subset_antecedence(
    g: &FeedbackLaw,
    t: &TruthMatrix,
    w: &StateSet,
) -> Result<bool, LedleyError> {
    check_shapes(g, t, w)?;
    Ok(w.iter().all(|x| t.entry(g.control_at(x), x)))
}

/// T|_W ≤ M_G|_W: the law is a subset consequence solution on W.
pub fn is_subset_consequence(
    g: &FeedbackLaw,
    t: &TruthMatrix,
    w: &StateSet,
) -> Result<bool, LedleyError> {
    check_shapes(g, t, w)?;
    Ok(w.iter().all(|x| (1..=t.controls()).all(|u| !t.entry(u, x) || g.control_at(x) == u)))
}

/// Controls admissible at state x: the non-zero rows of column x.
pub fn candidate_controls(t: &TruthMatrix, x: usize) -> Result<BTreeSet<usize>, LedleyError> {
    if x == 0 || x > t.states() {
        return Err(LedleyError::StateIndex { index: x, n: t.states() });
    }
    Ok((1..=t.controls()).filter(|&u| t.entry(u, x)).collect())
}
