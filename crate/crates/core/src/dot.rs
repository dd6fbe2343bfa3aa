//! Graphviz DOT export of closed-loop state transition graphs.

use std::fmt::Write;

use crate::ledley::StateSet;
use crate::matrix::LogicalMatrix;

/// Render the functional graph of a closed-loop matrix: one node per state
/// labeled with its delta index and value tuple, one edge x → M_c(x), and
/// attractor (cycle) states drawn with a double border. Output is
/// deterministic: nodes and edges in state order.
pub fn closed_loop_dot(name: &str, m_c: &LogicalMatrix, labels: &[String]) -> String {
    let n = m_c.rows();
    debug_assert_eq!(labels.len(), n);
    let attractor = cycle_states(m_c);
    let mut out = String::new();
    writeln!(out, "digraph {} {{", sanitize(name)).unwrap();
    writeln!(out, "    rankdir=LR;").unwrap();
    writeln!(out, "    node [shape=ellipse];").unwrap();
    for x in 1..=n {
        let marker = if attractor.contains(x) { " peripheries=2 style=bold" } else { "" };
        writeln!(out, "    s{} [label=\"{} {}\"{}];", x, x, labels[x - 1], marker).unwrap();
    }
    for x in 1..=n {
        writeln!(out, "    s{} -> s{};", x, m_c.col(x)).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

/// States lying on cycles: the image of M_c^N.
pub fn cycle_states(m_c: &LogicalMatrix) -> StateSet {
    let n = m_c.rows();
    let pow = m_c.pow(n).expect("square closed loop");
    StateSet::from_indices(n, pow.col_indices().iter().copied()).expect("columns in range")
}

fn sanitize(name: &str) -> String {
    let cleaned: String =
        name.chars().map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if cleaned.is_empty() || cleaned.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        format!("g_{cleaned}")
    } else {
        cleaned
    }
}
