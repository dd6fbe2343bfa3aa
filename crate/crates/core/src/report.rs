//! JSON result reports for stabilization runs and law verification.

use serde::{Deserialize, Serialize};

use crate::error::SynthError;
use crate::ledley::{is_subset_antecedence, FeedbackLaw, StateSet};
use crate::matrix::LogicalMatrix;
use crate::synth::{
    bfs_oracle, closed_loop, control_marginals, count_stabilizers, enumerate_stabilizers,
    select_stabilizer, Outcome, SelectionPolicy, Stabilization, TargetSpec,
};

/// Stabilization result report. `count` is an arbitrary-precision decimal
/// string; `convergence_time` is a step count or the string "diverges".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizeReport {
    pub solvable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncovered: Option<Vec<usize>>,
    pub layers: Vec<Vec<usize>>,
    #[serde(rename = "core_W0", skip_serializing_if = "Option::is_none")]
    pub core_w0: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_law: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginals: Option<Vec<Vec<usize>>>,
    #[serde(rename = "M_c", skip_serializing_if = "Option::is_none")]
    pub m_c: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_time: Option<Convergence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attractor: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_state_reach_time: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated_laws: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Convergence {
    Steps(usize),
    Diverges(String),
}

impl From<Option<usize>> for Convergence {
    fn from(value: Option<usize>) -> Self {
        match value {
            Some(steps) => Convergence::Steps(steps),
            None => Convergence::Diverges("diverges".to_string()),
        }
    }
}

/// Assemble the full report for a synthesis outcome.
pub fn stabilize_report(
    m_f: &LogicalMatrix,
    control_radices: &[usize],
    outcome: &Outcome,
    is_set_target: bool,
    policy: SelectionPolicy,
    enumerate: Option<usize>,
) -> Result<StabilizeReport, SynthError> {
    match outcome {
        Outcome::Unstabilizable(u) => Ok(StabilizeReport {
            solvable: false,
            reason: Some(u.reason.label().to_string()),
            uncovered: match &u.reason {
                crate::synth::UnsolvableReason::Unreachable { uncovered } => {
                    Some(uncovered.to_vec())
                }
                _ => None,
            },
            layers: u.partial.layers().iter().map(StateSet::to_vec).collect(),
            core_w0: None,
            count: None,
            selected_law: None,
            marginals: None,
            m_c: None,
            convergence_time: None,
            attractor: None,
            per_state_reach_time: None,
            enumerated_laws: None,
        }),
        Outcome::Stabilizable(st) => {
            let law = select_stabilizer(&st.family, policy);
            let cl = closed_loop(m_f, &law, &st.core)?;
            let marginals = control_marginals(&law, control_radices)?;
            let n = st.family.states();
            let enumerated = match enumerate {
                Some(limit) => Some(
                    enumerate_stabilizers(&st.family, limit)?
                        .map(|g| g.matrix().col_indices().to_vec())
                        .collect(),
                ),
                None => None,
            };
            Ok(StabilizeReport {
                solvable: true,
                reason: None,
                uncovered: None,
                layers: st.decomposition.layers().iter().map(StateSet::to_vec).collect(),
                core_w0: is_set_target.then(|| st.core.to_vec()),
                count: Some(count_stabilizers(&st.family).to_string()),
                selected_law: Some(law.matrix().col_indices().to_vec()),
                marginals: Some(marginals.iter().map(|m| m.col_indices().to_vec()).collect()),
                m_c: Some(cl.m_c().col_indices().to_vec()),
                convergence_time: Some(cl.convergence_time().into()),
                attractor: Some(cl.attractor().to_vec()),
                per_state_reach_time: Some((1..=n).map(|x| st.family.layer_of(x)).collect()),
                enumerated_laws: enumerated,
            })
        }
    }
}

/// Verification report for an externally supplied law.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    /// States whose control is not admissible for their layer.
    pub violated_states: Vec<usize>,
    /// States whose closed-loop first-hit time differs from the BFS optimum.
    pub suboptimal_states: Vec<usize>,
    pub converges: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_time: Option<Convergence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Layer truth matrices as 0/1 rows, base matrix first.
    pub truth_matrices: Vec<Vec<Vec<u8>>>,
}

/// Check a law against the synthesized family: layer inequalities (subset
/// antecedence per layer), closed-loop convergence to the core, and
/// per-state time-optimality against the BFS oracle.
pub fn verify_report(
    m_f: &LogicalMatrix,
    outcome: &Outcome,
    target: &TargetSpec,
    law: &FeedbackLaw,
) -> Result<VerifyReport, SynthError> {
    let st: &Stabilization = match outcome {
        Outcome::Unstabilizable(u) => {
            return Ok(VerifyReport {
                pass: false,
                violated_states: Vec::new(),
                suboptimal_states: Vec::new(),
                converges: false,
                convergence_time: None,
                reason: Some(u.reason.label().to_string()),
                truth_matrices: u.partial.truth_matrices().iter().map(|t| t.to_rows()).collect(),
            })
        }
        Outcome::Stabilizable(st) => st,
    };
    let d = &st.decomposition;

    // the Final-Step inequalities, layer by layer
    let mut violated = StateSet::empty(st.family.states());
    let base_scope = if d.layers().len() > 1 {
        d.layers()[0].union(&d.layers()[1])
    } else {
        d.layers()[0].clone()
    };
    if !is_subset_antecedence(law, &d.truth_matrices()[0], &base_scope)? {
        for x in base_scope.iter() {
            if !d.truth_matrices()[0].entry(law.control_at(x), x) {
                violated.insert(x);
            }
        }
    }
    for i in 2..d.layers().len() {
        let t = &d.truth_matrices()[i - 1];
        if !is_subset_antecedence(law, t, &d.layers()[i])? {
            for x in d.layers()[i].iter() {
                if !t.entry(law.control_at(x), x) {
                    violated.insert(x);
                }
            }
        }
    }

    let cl = closed_loop(m_f, law, &st.core)?;
    let oracle = bfs_oracle(m_f, target)?;
    let suboptimal: Vec<usize> = (1..=st.family.states())
        .filter(|&x| cl.first_hit()[x - 1] != oracle.distance[x - 1])
        .collect();
    let converges = cl.convergence_time().is_some();
    let pass = violated.is_empty() && suboptimal.is_empty() && converges;
    Ok(VerifyReport {
        pass,
        violated_states: violated.to_vec(),
        suboptimal_states: suboptimal,
        converges,
        convergence_time: Some(cl.convergence_time().into()),
        reason: None,
        truth_matrices: d.truth_matrices().iter().map(|t| t.to_rows()).collect(),
    })
}
