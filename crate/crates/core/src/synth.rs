//! Point and set stabilization via layered subset antecedence solutions.
//!
//! The point algorithm grows admissible layers backwards from the target:
//! Ω(0) is the target, W_{k+1} the maximum set of T_{Ω(k)}, and
//! Ω(k+1) = W_{k+1} ∖ ∪ W_i. It stops solvable once the layers cover the
//! whole state space, and unsolvable when a layer comes up empty first. The
//! per-state candidate controls read off the layer truth matrices encode
//! every time-optimal state-feedback stabilizer at once: states in
//! Ω(0) ∪ Ω(1) draw from the base truth matrix, states in Ω(i) for i ≥ 2
//! from T_{Ω(i−1)}.
//!
//! Set stabilization first shrinks the target to its largest control
//! invariant subset W_0 (fixed-point pruning, first iterate = target ∩ Θ)
//! and then runs the same iteration with Ω(0) = W_0 and base truth matrix
//! T_{W_0}.
//!
//! [`bfs_oracle`] is an independent backward breadth-first search over the
//! controlled transition relation; for solvable instances the layer number
//! of every state equals its BFS distance, which is the time-optimality
//! claim in checkable form.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::error::SynthError;
use crate::ledley::{
    candidate_controls, maximum_set, transition_dims, truth_matrix, FeedbackLaw, StateSet,
    TruthMatrix,
};
use crate::logic::{mixed_radix_decode, Expr, Network};
use crate::matrix::LogicalMatrix;

/// Stabilization objective: a single state or a state set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSpec {
    Point(usize),
    Set(StateSet),
}

/// The layer structure produced by the algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerDecomposition {
    layers: Vec<StateSet>,
    reached: Vec<StateSet>,
    truth_matrices: Vec<TruthMatrix>,
    solvable: bool,
}

impl LayerDecomposition {
    /// Ω(0), Ω(1), …: pairwise disjoint, union = Δ_N exactly when solvable.
    pub fn layers(&self) -> &[StateSet] {
        &self.layers
    }

    /// W_0, W_1, …, the maximum sets as computed.
    pub fn reached(&self) -> &[StateSet] {
        &self.reached
    }

    /// Truth matrices in layer order: index 0 is the base matrix, index i
    /// (i ≥ 1) is T_{Ω(i)}.
    pub fn truth_matrices(&self) -> &[TruthMatrix] {
        &self.truth_matrices
    }

    pub fn solvable(&self) -> bool {
        self.solvable
    }

    /// Number of the last layer (k*), when solvable.
    pub fn k_star(&self) -> usize {
        self.layers.len() - 1
    }

    /// Layer number of a state, if it was covered.
    pub fn layer_of(&self, x: usize) -> Option<usize> {
        self.layers.iter().position(|l| l.contains(x))
    }
}

/// Per-state candidate controls plus layer assignment; the family of every
/// time-optimal stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerFamily {
    controls: usize,
    candidates: Vec<BTreeSet<usize>>,
    layer_of: Vec<usize>,
}

impl StabilizerFamily {
    pub fn states(&self) -> usize {
        self.candidates.len()
    }

    pub fn controls(&self) -> usize {
        self.controls
    }

    pub fn candidates(&self, x: usize) -> &BTreeSet<usize> {
        &self.candidates[x - 1]
    }

    pub fn layer_of(&self, x: usize) -> usize {
        self.layer_of[x - 1]
    }

    pub fn contains(&self, law: &FeedbackLaw) -> bool {
        law.states() == self.states()
            && law.matrix().rows() == self.controls
            && (1..=self.states()).all(|x| self.candidates(x).contains(&law.control_at(x)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsolvableReason {
    /// The target point is not a control fixed point.
    NotFixedPoint,
    /// Some states can never reach the target; carries the uncovered set.
    Unreachable { uncovered: StateSet },
    /// The target set contains no control invariant core.
    EmptyCore,
}

impl UnsolvableReason {
    pub fn label(&self) -> &'static str {
        match self {
            UnsolvableReason::NotFixedPoint => "NotFixedPoint",
            UnsolvableReason::Unreachable { .. } => "Unreachable",
            UnsolvableReason::EmptyCore => "EmptyCore",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unsolvable {
    pub reason: UnsolvableReason,
    /// Layers computed before the failure was detected.
    pub partial: LayerDecomposition,
}

/// A solvable instance: the core Ω(0), the layer structure, and the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilization {
    pub core: StateSet,
    pub decomposition: LayerDecomposition,
    pub family: StabilizerFamily,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Stabilizable(Stabilization),
    Unstabilizable(Unsolvable),
}

impl Outcome {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Outcome::Stabilizable(_))
    }

    pub fn stabilization(&self) -> Option<&Stabilization> {
        match self {
            Outcome::Stabilizable(s) => Some(s),
            Outcome::Unstabilizable(_) => None,
        }
    }
}

/// Whether some control keeps the system at x for one step.
pub fn is_control_fixed_point(m_f: &LogicalMatrix, x: usize) -> Result<bool, SynthError> {
    let (n, m) = transition_dims(m_f)?;
    if x == 0 || x > n {
        return Err(SynthError::TargetRange { index: x, n });
    }
    Ok((1..=m).any(|u| m_f.col((u - 1) * n + x) == x))
}

fn build_family(controls: usize, layers: &[StateSet], truths: &[TruthMatrix]) -> StabilizerFamily {
    let n = layers[0].universe();
    let mut layer_of = vec![0usize; n];
    let mut candidates = vec![BTreeSet::new(); n];
    for (i, layer) in layers.iter().enumerate() {
        let t = if i <= 1 { &truths[0] } else { &truths[i - 1] };
        for x in layer.iter() {
            layer_of[x - 1] = i;
            candidates[x - 1] = candidate_controls(t, x).expect("x within universe");
        }
    }
    StabilizerFamily { controls, candidates, layer_of }
}

fn iterate(
    m_f: &LogicalMatrix,
    core: StateSet,
    t_base: TruthMatrix,
    w1: StateSet,
) -> Result<Outcome, SynthError> {
    let controls = t_base.controls();
    let mut layers = vec![core.clone()];
    let mut reached = vec![core.clone()];
    let mut truths = vec![t_base];
    let mut covered = core.clone();

    if !covered.is_full() {
        let mut w_next = w1;
        loop {
            let omega = w_next.difference(&covered);
            covered = covered.union(&omega);
            layers.push(omega.clone());
            reached.push(w_next);
            // full cover is checked before the empty-layer failure so the
            // degenerate "already covered" step still counts as success
            if covered.is_full() {
                break;
            }
            if omega.is_empty() {
                return Ok(Outcome::Unstabilizable(Unsolvable {
                    reason: UnsolvableReason::Unreachable { uncovered: covered.complement() },
                    partial: LayerDecomposition {
                        layers,
                        reached,
                        truth_matrices: truths,
                        solvable: false,
                    },
                }));
            }
            let t = truth_matrix(m_f, &omega)?;
            w_next = maximum_set(&t);
            truths.push(t);
        }
    }

    let family = build_family(controls, &layers, &truths);
    let decomposition =
        LayerDecomposition { layers, reached, truth_matrices: truths, solvable: true };
    Ok(Outcome::Stabilizable(Stabilization { core, decomposition, family }))
}

/// Synthesize all time-optimal stabilizers to a target point.
pub fn point_stabilize(m_f: &LogicalMatrix, target: usize) -> Result<Outcome, SynthError> {
    let (n, _) = transition_dims(m_f)?;
    if target == 0 || target > n {
        return Err(SynthError::TargetRange { index: target, n });
    }
    let core = StateSet::from_indices(n, [target]).expect("target in range");
    let t0 = truth_matrix(m_f, &core)?;
    let w1 = maximum_set(&t0);
    if !w1.contains(target) {
        return Ok(Outcome::Unstabilizable(Unsolvable {
            reason: UnsolvableReason::NotFixedPoint,
            partial: LayerDecomposition {
                layers: vec![core.clone()],
                reached: vec![core],
                truth_matrices: vec![t0],
                solvable: false,
            },
        }));
    }
    iterate(m_f, core, t0, w1)
}

/// Largest control invariant subset of the target: fixed-point pruning whose
/// first iterate is target ∩ Θ.
pub fn largest_control_invariant(
    m_f: &LogicalMatrix,
    target: &StateSet,
) -> Result<StateSet, SynthError> {
    let mut core = target.clone();
    while !core.is_empty() {
        let kept = core.intersection(&maximum_set(&truth_matrix(m_f, &core)?));
        if kept == core {
            break;
        }
        core = kept;
    }
    Ok(core)
}

/// Synthesize all time-optimal stabilizers to a target set; the returned
/// core is the largest control invariant subset W_0 of the target.
pub fn set_stabilize(m_f: &LogicalMatrix, target: &StateSet) -> Result<Outcome, SynthError> {
    let (n, _) = transition_dims(m_f)?;
    if target.universe() != n {
        return Err(
            crate::error::LedleyError::UniverseMismatch { universe: target.universe(), n }.into()
        );
    }
    if target.is_empty() {
        return Err(SynthError::EmptyTarget);
    }
    let core = largest_control_invariant(m_f, target)?;
    if core.is_empty() {
        return Ok(Outcome::Unstabilizable(Unsolvable {
            reason: UnsolvableReason::EmptyCore,
            partial: LayerDecomposition {
                layers: Vec::new(),
                reached: Vec::new(),
                truth_matrices: Vec::new(),
                solvable: false,
            },
        }));
    }
    let t0 = truth_matrix(m_f, &core)?;
    // every core state keeps a step inside the core, so core ⊆ W_1
    let w1 = maximum_set(&t0);
    iterate(m_f, core, t0, w1)
}

/// Exact number of time-optimal stabilizers: the product of the per-state
/// candidate-set sizes.
pub fn count_stabilizers(family: &StabilizerFamily) -> BigUint {
    family.candidates.iter().fold(BigUint::from(1u32), |acc, c| acc * BigUint::from(c.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionPolicy {
    SmallestControl,
    LargestControl,
}

/// Deterministic member of the family: per state the smallest (or largest)
/// admissible control index.
pub fn select_stabilizer(family: &StabilizerFamily, policy: SelectionPolicy) -> FeedbackLaw {
    let cols = family
        .candidates
        .iter()
        .map(|c| match policy {
            SelectionPolicy::SmallestControl => *c.iter().next().expect("solvable family"),
            SelectionPolicy::LargestControl => *c.iter().next_back().expect("solvable family"),
        })
        .collect();
    FeedbackLaw::new(LogicalMatrix::new(family.controls, cols).expect("valid law"))
}

/// Lexicographic stream over the Cartesian product of candidate sets (state
/// 1 most significant, candidates ascending), truncated at `limit`.
pub fn enumerate_stabilizers(
    family: &StabilizerFamily,
    limit: usize,
) -> Result<StabilizerIter, SynthError> {
    if limit == 0 {
        return Err(SynthError::ZeroLimit);
    }
    let choices: Vec<Vec<usize>> =
        family.candidates.iter().map(|c| c.iter().copied().collect()).collect();
    let exhausted = choices.iter().any(Vec::is_empty);
    Ok(StabilizerIter {
        controls: family.controls,
        choices,
        cursor: None,
        exhausted,
        remaining: limit,
    })
}

pub struct StabilizerIter {
    controls: usize,
    choices: Vec<Vec<usize>>,
    cursor: Option<Vec<usize>>,
    exhausted: bool,
    remaining: usize,
}

impl Iterator for StabilizerIter {
    type Item = FeedbackLaw;

    fn next(&mut self) -> Option<FeedbackLaw> {
        if self.exhausted || self.remaining == 0 {
            return None;
        }
        match &mut self.cursor {
            None => self.cursor = Some(vec![0; self.choices.len()]),
            Some(pos) => {
                // odometer with the last state fastest
                let mut advanced = false;
                for i in (0..pos.len()).rev() {
                    if pos[i] + 1 < self.choices[i].len() {
                        pos[i] += 1;
                        pos[i + 1..].iter_mut().for_each(|p| *p = 0);
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    self.exhausted = true;
                    return None;
                }
            }
        }
        self.remaining -= 1;
        let pos = self.cursor.as_ref().expect("set above");
        let cols: Vec<usize> = pos.iter().zip(&self.choices).map(|(&p, c)| c[p]).collect();
        Some(FeedbackLaw::new(LogicalMatrix::new(self.controls, cols).expect("valid law")))
    }
}

/// Per-control-variable marginals of a combined law: the j-th marginal sends
/// state x to the j-th mixed-radix digit of M_G(x), which is exactly
/// (1ᵀ ⊗ I_{kⱼ} ⊗ 1ᵀ) M_G.
pub fn control_marginals(
    law: &FeedbackLaw,
    control_radices: &[usize],
) -> Result<Vec<LogicalMatrix>, SynthError> {
    let rows = law.matrix().rows();
    let product: usize = control_radices.iter().product();
    if product != rows {
        return Err(SynthError::RadixMismatch { radices: control_radices.to_vec(), rows });
    }
    let digits: Vec<Vec<usize>> = (1..=law.states())
        .map(|x| mixed_radix_decode(law.control_at(x), control_radices))
        .collect();
    control_radices
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            LogicalMatrix::new(k, digits.iter().map(|d| d[j]).collect()).map_err(SynthError::from)
        })
        .collect()
}

/// Disjunctive normal form of a Boolean marginal over the network's state
/// variables: canonical minterms of the true-output states, with an optional
/// greedy adjacent merge pass.
pub fn to_dnf(marginal: &LogicalMatrix, net: &Network, merge: bool) -> Result<Expr, SynthError> {
    if let Some(v) = net.state_vars().iter().find(|v| v.domain.k != 2) {
        return Err(SynthError::NonBooleanDomain { k: v.domain.k });
    }
    if marginal.rows() != 2 {
        return Err(SynthError::NonBooleanDomain { k: marginal.rows() });
    }
    let n = net.state_space();
    if marginal.num_cols() != n {
        return Err(SynthError::LawShape { got: marginal.num_cols(), expected: n });
    }
    let mut implicants: Vec<Vec<Option<bool>>> = (1..=n)
        .filter(|&x| marginal.col(x) == 1)
        .map(|x| {
            mixed_radix_decode(x, &net.state_radices()).iter().map(|&l| Some(l == 1)).collect()
        })
        .collect();
    if implicants.is_empty() {
        return Ok(Expr::truth(false));
    }
    if implicants.len() == n {
        return Ok(Expr::truth(true));
    }
    if merge {
        implicants = merge_implicants(implicants);
    }
    implicants.sort();
    let terms: Vec<Expr> = implicants
        .iter()
        .map(|imp| {
            let literals: Vec<Expr> = imp
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|b| if b { Expr::state(i) } else { !Expr::state(i) }))
                .collect();
            debug_assert!(!literals.is_empty(), "all-free implicants were handled above");
            literals.into_iter().reduce(|a, b| a & b).expect("nonempty")
        })
        .collect();
    Ok(terms.into_iter().reduce(|a, b| a | b).expect("nonempty"))
}

/// One Quine-McCluskey combine sweep at a time: merge pairs differing in a
/// single fixed position until no pair merges. Preserves the covered set.
fn merge_implicants(mut list: Vec<Vec<Option<bool>>>) -> Vec<Vec<Option<bool>>> {
    loop {
        let mut used = vec![false; list.len()];
        let mut next: Vec<Vec<Option<bool>>> = Vec::new();
        let mut merged_any = false;
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                if let Some(m) = merge_pair(&list[i], &list[j]) {
                    used[i] = true;
                    used[j] = true;
                    if !next.contains(&m) {
                        next.push(m);
                    }
                    merged_any = true;
                }
            }
        }
        for (i, imp) in list.iter().enumerate() {
            if !used[i] && !next.contains(imp) {
                next.push(imp.clone());
            }
        }
        if !merged_any {
            return list;
        }
        list = next;
    }
}

fn merge_pair(a: &[Option<bool>], b: &[Option<bool>]) -> Option<Vec<Option<bool>>> {
    let mut diff = None;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        match (x, y) {
            (Some(p), Some(q)) if p != q => {
                if diff.replace(i).is_some() {
                    return None;
                }
            }
            (x, y) if x == y => {}
            _ => return None,
        }
    }
    diff.map(|i| {
        let mut m = a.to_vec();
        m[i] = None;
        m
    })
}

/// Closed-loop dynamics x(t+1) = M_F M_G PR_N x(t) = M_c x(t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedLoop {
    m_c: LogicalMatrix,
    convergence_time: Option<usize>,
    attractor: StateSet,
    first_hit: Vec<Option<usize>>,
}

impl ClosedLoop {
    pub fn m_c(&self) -> &LogicalMatrix {
        &self.m_c
    }

    /// Least t with every trajectory inside the target from time t on;
    /// `None` when some trajectory never settles there.
    pub fn convergence_time(&self) -> Option<usize> {
        self.convergence_time
    }

    /// States lying on cycles of M_c.
    pub fn attractor(&self) -> &StateSet {
        &self.attractor
    }

    /// First time each state's trajectory enters the target.
    pub fn first_hit(&self) -> &[Option<usize>] {
        &self.first_hit
    }
}

/// Build the closed loop for a feedback law and analyse convergence into the
/// given target set.
pub fn closed_loop(
    m_f: &LogicalMatrix,
    law: &FeedbackLaw,
    target: &StateSet,
) -> Result<ClosedLoop, SynthError> {
    let (n, m) = transition_dims(m_f)?;
    if law.matrix().rows() != m || law.states() != n {
        return Err(SynthError::LawShape { got: law.states(), expected: n });
    }
    if target.universe() != n {
        return Err(
            crate::error::LedleyError::UniverseMismatch { universe: target.universe(), n }.into()
        );
    }
    let m_c = m_f.stp(law.matrix())?.stp(&LogicalMatrix::power_reducing(n)?)?;
    debug_assert!(m_c.rows() == n && m_c.num_cols() == n);
    Ok(analyse_closed_loop(m_c, target))
}

fn analyse_closed_loop(m_c: LogicalMatrix, target: &StateSet) -> ClosedLoop {
    let n = m_c.rows();
    let mut attractor = StateSet::empty(n);
    let mut settle: Vec<Option<usize>> = Vec::with_capacity(n);
    let mut first_hit: Vec<Option<usize>> = Vec::with_capacity(n);
    for start in 1..=n {
        let mut seen = vec![usize::MAX; n + 1];
        let mut traj = Vec::new();
        let mut x = start;
        while seen[x] == usize::MAX {
            seen[x] = traj.len();
            traj.push(x);
            x = m_c.col(x);
        }
        let cycle_start = seen[x];
        for &y in &traj[cycle_start..] {
            attractor.insert(y);
        }
        first_hit.push(traj.iter().position(|&y| target.contains(y)));
        if traj[cycle_start..].iter().all(|&y| target.contains(y)) {
            let last_outside = traj.iter().rposition(|&y| !target.contains(y));
            settle.push(Some(last_outside.map_or(0, |i| i + 1)));
        } else {
            settle.push(None);
        }
    }
    let convergence_time = settle
        .iter()
        .copied()
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().max().unwrap_or(0));
    ClosedLoop { m_c, convergence_time, attractor, first_hit }
}

/// Backward BFS distances over the controlled transition relation, the
/// independent oracle for layer numbers. For a set target the search starts
/// from the largest control invariant core obtained by fixed-point pruning.
pub struct BfsOracle {
    pub core: StateSet,
    pub distance: Vec<Option<usize>>,
}

pub fn bfs_oracle(m_f: &LogicalMatrix, target: &TargetSpec) -> Result<BfsOracle, SynthError> {
    let (n, m) = transition_dims(m_f)?;
    let step = |x: usize, u: usize| m_f.col((u - 1) * n + x);
    let core = match target {
        TargetSpec::Point(x) => {
            if *x == 0 || *x > n {
                return Err(SynthError::TargetRange { index: *x, n });
            }
            StateSet::from_indices(n, [*x]).expect("in range")
        }
        TargetSpec::Set(set) => {
            if set.universe() != n {
                return Err(crate::error::LedleyError::UniverseMismatch {
                    universe: set.universe(),
                    n,
                }
                .into());
            }
            let mut core = set.clone();
            loop {
                let kept: Vec<usize> =
                    core.iter().filter(|&x| (1..=m).any(|u| core.contains(step(x, u)))).collect();
                if kept.len() == core.len() {
                    break;
                }
                core = StateSet::from_indices(n, kept).expect("subset of core");
            }
            core
        }
    };

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for x in 1..=n {
        for u in 1..=m {
            preds[step(x, u)].push(x);
        }
    }
    let mut distance: Vec<Option<usize>> = vec![None; n];
    let mut frontier: Vec<usize> = core.iter().collect();
    for &x in &frontier {
        distance[x - 1] = Some(0);
    }
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &y in &frontier {
            for &x in &preds[y] {
                if distance[x - 1].is_none() {
                    distance[x - 1] = Some(d);
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    Ok(BfsOracle { core, distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_network;
    use crate::matrix::DenseMatrix;

    const BCN4: &str = "\
network bcn4
state X1 : bool
state X2 : bool
state X3 : bool
state X4 : bool
control U1 : bool
control U2 : bool
X1' = X2 | U1
X2' = X4 | (U2 & X1)
X3' = (X1 & X4) ^ (!X3)
X4' = (!X1) <-> U2
";

    const MIX23: &str = "\
network mix23
state X1 : 2
state X2 : 3
control U : 3
op dia : (2,3) -> 2 = [1,1,2,2,2,1]
op box : (2,3) -> 3 = [1,2,3,2,3,1]
X1' = dia(X1, X2)
X2' = box(X1, U)
";

    const KNOWN_MG_POINT: [usize; 16] = [1, 2, 4, 2, 4, 2, 2, 4, 3, 3, 2, 4, 1, 1, 3, 3];
    const KNOWN_MC_POINT: [usize; 16] = [2, 7, 3, 5, 9, 7, 3, 13, 3, 7, 2, 6, 3, 7, 9, 13];
    const KNOWN_MG_SET: [usize; 16] = [1, 2, 3, 1, 1, 3, 3, 4, 2, 1, 2, 4, 4, 1, 4, 2];
    const KNOWN_MC_SET: [usize; 16] = [2, 7, 4, 2, 2, 12, 12, 13, 4, 7, 2, 6, 12, 7, 10, 6];

    fn bcn4_m_f() -> LogicalMatrix {
        parse_network(BCN4).unwrap().compile()
    }

    fn mix23_m_f() -> LogicalMatrix {
        parse_network(MIX23).unwrap().compile()
    }

    fn law(rows: usize, cols: &[usize]) -> FeedbackLaw {
        FeedbackLaw::new(LogicalMatrix::new(rows, cols.to_vec()).unwrap())
    }

    fn solved(outcome: Outcome) -> Stabilization {
        match outcome {
            Outcome::Stabilizable(s) => s,
            Outcome::Unstabilizable(u) => panic!("expected solvable, got {:?}", u.reason),
        }
    }

    #[test]
    fn control_fixed_points() {
        let m_f = bcn4_m_f();
        assert!(is_control_fixed_point(&m_f, 3).unwrap());

        let neg = parse_network("network n\nstate X : bool\nX' = !X\n").unwrap().compile();
        assert!(!is_control_fixed_point(&neg, 1).unwrap());

        let full = parse_network("network f\nstate X : bool\ncontrol U : bool\nX' = U\n")
            .unwrap()
            .compile();
        for x in 1..=2 {
            assert!(is_control_fixed_point(&full, x).unwrap());
        }
        assert!(is_control_fixed_point(&m_f, 17).is_err());
    }

    #[test]
    fn point_stabilization_of_boolean_example() {
        let m_f = bcn4_m_f();
        let st = solved(point_stabilize(&m_f, 3).unwrap());
        let d = &st.decomposition;
        assert!(d.solvable());
        assert_eq!(d.k_star(), 3);
        assert_eq!(d.layers()[0].to_vec(), vec![3]);
        assert_eq!(d.layers()[1].to_vec(), vec![7, 9, 13]);
        assert_eq!(d.layers()[2].to_vec(), vec![2, 5, 6, 8, 10, 14, 15, 16]);
        assert_eq!(d.layers()[3].to_vec(), vec![1, 4, 11, 12]);
        assert_eq!(d.reached()[1].to_vec(), vec![3, 7, 9, 13]);
        assert_eq!(d.reached()[2].to_vec(), vec![2, 5, 6, 8, 10, 14, 15, 16]);
        assert_eq!(count_stabilizers(&st.family).to_string(), "1024");
        assert!(st.family.contains(&law(4, &KNOWN_MG_POINT)));
        // the base truth matrix has exactly the six admissible pairs
        let t0 = &d.truth_matrices()[0];
        let ones: Vec<(usize, usize)> = (1..=4)
            .flat_map(|u| (1..=16).map(move |x| (u, x)))
            .filter(|&(u, x)| t0.entry(u, x))
            .collect();
        assert_eq!(ones, vec![(1, 9), (1, 13), (2, 3), (2, 7), (3, 9), (4, 3)]);
    }

    #[test]
    fn point_layers_match_bfs_distances() {
        let m_f = bcn4_m_f();
        let st = solved(point_stabilize(&m_f, 3).unwrap());
        let oracle = bfs_oracle(&m_f, &TargetSpec::Point(3)).unwrap();
        for x in 1..=16 {
            assert_eq!(Some(st.family.layer_of(x)), oracle.distance[x - 1]);
        }
    }

    #[test]
    fn closed_loop_of_known_point_law() {
        let m_f = bcn4_m_f();
        let target = StateSet::from_indices(16, [3]).unwrap();
        let cl = closed_loop(&m_f, &law(4, &KNOWN_MG_POINT), &target).unwrap();
        assert_eq!(cl.m_c().col_indices(), &KNOWN_MC_POINT);
        assert_eq!(cl.m_c().pow(3).unwrap().col_indices(), &[3; 16]);
        assert_eq!(cl.convergence_time(), Some(3));
        assert_eq!(cl.attractor().to_vec(), vec![3]);
    }

    #[test]
    fn every_enumerated_point_law_is_sound() {
        let m_f = bcn4_m_f();
        let st = solved(point_stabilize(&m_f, 3).unwrap());
        let target = StateSet::from_indices(16, [3]).unwrap();
        let oracle = bfs_oracle(&m_f, &TargetSpec::Point(3)).unwrap();
        let laws: Vec<FeedbackLaw> = enumerate_stabilizers(&st.family, 2000).unwrap().collect();
        assert_eq!(laws.len(), 1024);
        let mut seen = std::collections::BTreeSet::new();
        for law in &laws {
            assert!(seen.insert(law.matrix().col_indices().to_vec()), "duplicate law");
            let cl = closed_loop(&m_f, law, &target).unwrap();
            assert!(cl.convergence_time().is_some());
            for x in 1..=16 {
                assert_eq!(cl.first_hit()[x - 1], oracle.distance[x - 1]);
            }
        }
    }

    #[test]
    fn set_stabilization_of_boolean_example() {
        let m_f = bcn4_m_f();
        let target = StateSet::from_indices(16, [6, 7, 12]).unwrap();
        // Θ is the maximum set of T_M
        let theta = maximum_set(&truth_matrix(&m_f, &target).unwrap());
        assert_eq!(theta.to_vec(), vec![2, 6, 7, 10, 12, 13, 14, 16]);
        let st = solved(set_stabilize(&m_f, &target).unwrap());
        // the target itself is control invariant
        assert_eq!(st.core, target);
        assert_eq!(st.decomposition.k_star(), 3);
        assert_eq!(st.decomposition.layers()[1], theta.difference(&target));
        assert_eq!(st.decomposition.layers()[2].to_vec(), vec![1, 4, 5, 8, 11, 15]);
        assert_eq!(st.decomposition.layers()[3].to_vec(), vec![3, 9]);
        assert_eq!(count_stabilizers(&st.family).to_string(), "6144");
        assert!(st.family.contains(&law(4, &KNOWN_MG_SET)));

        let cl = closed_loop(&m_f, &law(4, &KNOWN_MG_SET), &st.core).unwrap();
        assert_eq!(cl.m_c().col_indices(), &KNOWN_MC_SET);
        assert_eq!(cl.attractor().to_vec(), vec![6, 12]);
        assert!(cl.attractor().is_subset(&st.core));
        assert!(cl.convergence_time().is_some());
        // W_0 is closed under the synthesized loop
        for x in st.core.iter() {
            assert!(st.core.contains(cl.m_c().col(x)));
        }
    }

    #[test]
    fn set_layers_match_bfs_distances() {
        let m_f = bcn4_m_f();
        let target = StateSet::from_indices(16, [6, 7, 12]).unwrap();
        let st = solved(set_stabilize(&m_f, &target).unwrap());
        let oracle = bfs_oracle(&m_f, &TargetSpec::Set(target)).unwrap();
        assert_eq!(oracle.core, st.core);
        for x in 1..=16 {
            assert_eq!(Some(st.family.layer_of(x)), oracle.distance[x - 1]);
        }
    }

    #[test]
    fn mix_valued_point_case() {
        let m_f = mix23_m_f();
        let st = solved(point_stabilize(&m_f, 1).unwrap());
        let d = &st.decomposition;
        assert_eq!(d.reached()[1].to_vec(), vec![1, 2, 6]);
        assert_eq!(d.layers()[1].to_vec(), vec![2, 6]);
        assert_eq!(d.layers()[2].to_vec(), vec![3, 4, 5]);
        assert_eq!(d.k_star(), 2);
        let expected = law(3, &[1, 1, 3, 2, 2, 3]);
        assert!(st.family.contains(&expected));
        assert_eq!(count_stabilizers(&st.family).to_string(), "1");
        assert_eq!(select_stabilizer(&st.family, SelectionPolicy::SmallestControl), expected);

        let target = StateSet::from_indices(6, [1]).unwrap();
        let cl = closed_loop(&m_f, &expected, &target).unwrap();
        assert_eq!(cl.m_c().col_indices(), &[1, 1, 6, 6, 6, 1]);
        assert_eq!(cl.m_c().pow(2).unwrap().col_indices(), &[1; 6]);
        assert_eq!(cl.convergence_time(), Some(2));
    }

    #[test]
    fn mix_valued_set_case() {
        let m_f = mix23_m_f();
        let target = StateSet::from_indices(6, [3, 6]).unwrap();
        let theta = maximum_set(&truth_matrix(&m_f, &target).unwrap());
        assert!(theta.is_full());
        let st = solved(set_stabilize(&m_f, &target).unwrap());
        assert_eq!(st.core, target);
        assert_eq!(st.decomposition.k_star(), 1);
        let expected = law(3, &[3, 3, 3, 2, 2, 2]);
        assert!(st.family.contains(&expected));
        let cl = closed_loop(&m_f, &expected, &st.core).unwrap();
        assert_eq!(cl.m_c().col_indices(), &[3, 3, 6, 6, 6, 3]);
        assert!(cl.convergence_time().is_some());
    }

    #[test]
    fn negation_network_has_no_fixed_target() {
        let m_f = parse_network("network n\nstate X : bool\nX' = !X\n").unwrap().compile();
        match point_stabilize(&m_f, 1).unwrap() {
            Outcome::Unstabilizable(u) => {
                assert_eq!(u.reason, UnsolvableReason::NotFixedPoint);
                assert_eq!(u.partial.layers().len(), 1);
            }
            Outcome::Stabilizable(_) => panic!("negation cannot be point-stabilized"),
        }
    }

    #[test]
    fn unreachable_states_are_reported() {
        // the control is ignored, so state 2 can never reach state 1
        let m_f = parse_network("network i\nstate X : bool\ncontrol U : bool\nX' = X\n")
            .unwrap()
            .compile();
        match point_stabilize(&m_f, 1).unwrap() {
            Outcome::Unstabilizable(u) => match u.reason {
                UnsolvableReason::Unreachable { uncovered } => {
                    assert_eq!(uncovered.to_vec(), vec![2]);
                }
                other => panic!("expected unreachable, got {other:?}"),
            },
            Outcome::Stabilizable(_) => panic!("state 2 is unreachable"),
        }
        let oracle = bfs_oracle(&m_f, &TargetSpec::Point(1)).unwrap();
        assert_eq!(oracle.distance, vec![Some(0), None]);
    }

    #[test]
    fn empty_invariant_core_is_reported() {
        let m_f = parse_network("network n\nstate X : bool\nX' = !X\n").unwrap().compile();
        let target = StateSet::from_indices(2, [1]).unwrap();
        match set_stabilize(&m_f, &target).unwrap() {
            Outcome::Unstabilizable(u) => assert_eq!(u.reason, UnsolvableReason::EmptyCore),
            Outcome::Stabilizable(_) => panic!("{{1}} has no invariant core under negation"),
        }
        let oracle = bfs_oracle(&m_f, &TargetSpec::Set(target)).unwrap();
        assert!(oracle.core.is_empty());
    }

    #[test]
    fn full_universe_set_target_is_trivially_solvable() {
        let m_f = bcn4_m_f();
        let st = solved(set_stabilize(&m_f, &StateSet::full(16)).unwrap());
        assert!(st.core.is_full());
        assert_eq!(st.decomposition.k_star(), 0);
        assert_eq!(st.decomposition.layers().len(), 1);
        // every control is admissible everywhere
        assert_eq!(count_stabilizers(&st.family), BigUint::from(4u32).pow(16));
    }

    #[test]
    fn set_stabilize_rejects_empty_target() {
        let m_f = bcn4_m_f();
        assert_eq!(set_stabilize(&m_f, &StateSet::empty(16)).unwrap_err(), SynthError::EmptyTarget);
    }

    #[test]
    fn fully_controllable_network_reaches_in_one_step() {
        let m_f = parse_network("network f\nstate X : bool\ncontrol U : bool\nX' = U\n")
            .unwrap()
            .compile();
        let oracle = bfs_oracle(&m_f, &TargetSpec::Point(1)).unwrap();
        assert!(oracle.distance.iter().all(|d| d.unwrap() <= 1));
    }

    #[test]
    fn enumeration_is_lexicographic_and_bounded() {
        let m_f = bcn4_m_f();
        let st = solved(point_stabilize(&m_f, 3).unwrap());
        assert!(enumerate_stabilizers(&st.family, 0).is_err());
        let first: Vec<FeedbackLaw> = enumerate_stabilizers(&st.family, 3).unwrap().collect();
        assert_eq!(first.len(), 3);
        assert_eq!(first[0], select_stabilizer(&st.family, SelectionPolicy::SmallestControl));
        // lexicographic: the first two differ only in the last free state
        let a = first[0].matrix().col_indices();
        let b = first[1].matrix().col_indices();
        let diff: Vec<usize> = (0..16).filter(|&i| a[i] != b[i]).collect();
        assert_eq!(diff.len(), 1);
        assert!(a[diff[0]] < b[diff[0]]);
        let last = enumerate_stabilizers(&st.family, usize::MAX).unwrap().last().unwrap();
        assert_eq!(last, select_stabilizer(&st.family, SelectionPolicy::LargestControl));
    }

    #[test]
    fn marginals_of_known_law() {
        let g = law(4, &KNOWN_MG_POINT);
        let marginals = control_marginals(&g, &[2, 2]).unwrap();
        assert_eq!(marginals[0].col_indices(), &[1, 1, 2, 1, 2, 1, 1, 2, 2, 2, 1, 2, 1, 1, 2, 2]);
        assert_eq!(marginals[1].col_indices(), &[1, 2, 2, 2, 2, 2, 2, 2, 1, 1, 2, 2, 1, 1, 1, 1]);
        // khatri-rao of the marginals reconstructs the law
        assert_eq!(marginals[0].khatri_rao(&marginals[1]).unwrap(), *g.matrix());
        // and each marginal equals the dense (1ᵀ ⊗ I ⊗ 1ᵀ)·M_G projection
        let ones = DenseMatrix::<i64>::new(1, 2, vec![1, 1]).unwrap();
        let eye = DenseMatrix::<i64>::identity(2).unwrap();
        let first = eye.kron(&ones).unwrap().matmul(&g.matrix().to_dense()).unwrap();
        assert_eq!(first, marginals[0].to_dense());
        let second = ones.kron(&eye).unwrap().matmul(&g.matrix().to_dense()).unwrap();
        assert_eq!(second, marginals[1].to_dense());
    }

    #[test]
    fn single_control_marginal_is_the_law_itself() {
        let g = law(3, &[1, 1, 3, 2, 2, 3]);
        let marginals = control_marginals(&g, &[3]).unwrap();
        assert_eq!(marginals.len(), 1);
        assert_eq!(&marginals[0], g.matrix());
        assert!(control_marginals(&g, &[2, 2]).is_err());
    }

    #[test]
    fn dnf_round_trips_for_known_marginals() {
        let net = parse_network(BCN4).unwrap();
        let g = law(4, &KNOWN_MG_POINT);
        for marginal in control_marginals(&g, &[2, 2]).unwrap() {
            for merge in [false, true] {
                let formula = to_dnf(&marginal, &net, merge).unwrap();
                let back = net.state_structure_matrix(&formula).unwrap();
                assert_eq!(back, marginal, "merge={merge}");
            }
        }
    }

    #[test]
    fn dnf_constants() {
        let net = parse_network(BCN4).unwrap();
        let always = LogicalMatrix::new(2, vec![1; 16]).unwrap();
        assert_eq!(to_dnf(&always, &net, false).unwrap(), Expr::truth(true));
        let never = LogicalMatrix::new(2, vec![2; 16]).unwrap();
        assert_eq!(to_dnf(&never, &net, true).unwrap(), Expr::truth(false));
    }

    #[test]
    fn dnf_rejects_non_boolean_domains() {
        let net = parse_network(MIX23).unwrap();
        let marginal = LogicalMatrix::new(2, vec![1; 6]).unwrap();
        assert!(matches!(to_dnf(&marginal, &net, false), Err(SynthError::NonBooleanDomain { .. })));
    }

    #[test]
    fn closed_loop_shape_errors() {
        let m_f = bcn4_m_f();
        let target = StateSet::from_indices(16, [3]).unwrap();
        assert!(closed_loop(&m_f, &law(2, &[1; 16]), &target).is_err());
        assert!(closed_loop(&m_f, &law(4, &[1; 8]), &target).is_err());
    }

    #[test]
    fn synthesis_is_shareable_across_threads() {
        let m_f = std::sync::Arc::new(bcn4_m_f());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let m_f = std::sync::Arc::clone(&m_f);
                std::thread::spawn(move || {
                    let st = solved(point_stabilize(&m_f, 3).unwrap());
                    count_stabilizers(&st.family).to_string()
                })
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), "1024");
        }
    }
}
