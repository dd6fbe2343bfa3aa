//! Compile Boolean, k-valued and mix-valued control networks into algebraic
//! state-space form via the semi-tensor product, and synthesize every
//! time-optimal state-feedback stabilizer to a target point or target set.
//!
//! The pipeline mirrors the underlying theory:
//!
//! * [`matrix`] — exact integer kernel: semi-tensor, Kronecker and
//!   Khatri-Rao products, compressed logical matrices, power-reducing
//!   matrices, Boolean comparisons.
//! * [`logic`] — network DSL, structure matrices by exhaustive evaluation,
//!   and the transition matrix x(t+1) = M_F u(t) x(t).
//! * [`ledley`] — truth matrices of admissible sets, maximum subsets, and
//!   subset antecedence/consequence verification.
//! * [`synth`] — layered point/set stabilization, enumeration of all
//!   time-optimal feedback laws, closed-loop verification, and an
//!   independent BFS oracle.
//! * [`report`] / [`dot`] — JSON result reports and Graphviz export of
//!   closed-loop transition graphs.
//!
//! All values are immutable after construction and safe to share across
//! threads.

pub mod dot;
pub mod error;
pub mod ledley;
pub mod logic;
pub mod matrix;
pub mod report;
pub mod synth;

pub use error::{LedleyError, MatrixError, ModelError, ParseError, SynthError};
pub use ledley::{FeedbackLaw, StateSet, TruthMatrix};
pub use logic::{CompiledNetwork, Network};
pub use matrix::{bool_leq, BoolMatrix, DeltaVector, DenseMatrix, LogicalMatrix};
pub use synth::{Outcome, SelectionPolicy, Stabilization, TargetSpec};

/// Concrete dense matrix with the default exact scalar.
pub type DenseIntMatrix = DenseMatrix<i64>;
