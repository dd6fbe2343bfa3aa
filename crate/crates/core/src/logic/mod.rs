//! Network model: variable declarations over k-valued domains, update
//! expressions, and compilation to the algebraic state-space form
//! x(t+1) = M_F u(t) x(t).
//!
//! Value convention: the logical value (k−i)/(k−1) of a k-valued variable is
//! the delta vector δ_k^i, so for Booleans 1 ↔ δ2^1 and 0 ↔ δ2^2. The joint
//! state index is mixed-radix over the declared variable order, most
//! significant first, and the combined column of M_F for (u,x) is (u−1)·N + x.

mod expr;
mod parse;

pub use expr::{
    builtin_structure_matrix, negation_structure_matrix, BinOp, Expr, ExprDisplay, VarKind, VarRef,
};
pub use parse::parse_network;

use serde::{Deserialize, Serialize};

use crate::error::{MatrixError, ModelError, ParseError};
use crate::matrix::LogicalMatrix;

/// Combined control·state space size above which compilation refuses to
/// enumerate columns.
pub const MAX_COMBINED_SPACE: usize = 1 << 22;

/// A k-valued logical domain D_k = {0, 1/(k−1), …, 1}, k ≥ 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Domain {
    pub k: usize,
}

impl Domain {
    pub fn new(k: usize) -> Result<Self, ModelError> {
        if k < 2 {
            return Err(ModelError::DomainSize { k });
        }
        Ok(Domain { k })
    }
}

/// Level i (1-based delta index) of D_k rendered as its logical value.
pub fn level_to_value_string(k: usize, level: usize) -> String {
    if level == 1 {
        "1".into()
    } else if level == k {
        "0".into()
    } else {
        format!("{}/{}", k - level, k - 1)
    }
}

/// Parse a logical value ("1", "0", or "p/q") into the delta level of D_k.
pub fn value_str_to_level(k: usize, s: &str) -> Result<usize, ModelError> {
    let err = || ModelError::OutOfDomain { value: s.to_string(), k };
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (
            p.trim().parse::<usize>().map_err(|_| err())?,
            q.trim().parse::<usize>().map_err(|_| err())?,
        ),
        None => (s.trim().parse::<usize>().map_err(|_| err())?, 1),
    };
    value_to_level(k, num, den).ok_or_else(err)
}

/// The level i with (k−i)/(k−1) = num/den, if one exists.
pub fn value_to_level(k: usize, num: usize, den: usize) -> Option<usize> {
    if den == 0 || num > den {
        return None;
    }
    let scaled = num * (k - 1);
    if !scaled.is_multiple_of(den) {
        return None;
    }
    let i = k - scaled / den;
    (1..=k).contains(&i).then_some(i)
}

/// Mixed-radix encode of 1-based digits, most significant first; result is a
/// 1-based index in 1..=Π(radices).
pub fn mixed_radix_encode(digits: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(digits.len(), radices.len());
    let mut idx = 0;
    for (&d, &r) in digits.iter().zip(radices) {
        debug_assert!((1..=r).contains(&d));
        idx = idx * r + (d - 1);
    }
    idx + 1
}

/// Inverse of [`mixed_radix_encode`].
pub fn mixed_radix_decode(index: usize, radices: &[usize]) -> Vec<usize> {
    let mut rem = index - 1;
    let mut digits = vec![1; radices.len()];
    for (slot, &r) in digits.iter_mut().zip(radices).rev() {
        *slot = rem % r + 1;
        rem /= r;
    }
    digits
}

/// A declared operator: argument domains, output domain and the structure
/// matrix row given as delta indices, the same delta-index format used for custom
/// connectives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    pub name: String,
    pub arg_ks: Vec<usize>,
    pub out_k: usize,
    pub table: LogicalMatrix,
}

impl Operator {
    pub fn new(
        name: impl Into<String>,
        arg_ks: Vec<usize>,
        out_k: usize,
        indices: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if arg_ks.is_empty() || arg_ks.iter().any(|&k| k < 2) || out_k < 2 {
            return Err(ModelError::DomainSize {
                k: *arg_ks.iter().find(|&&k| k < 2).unwrap_or(&out_k),
            });
        }
        let expected: usize = arg_ks.iter().product();
        if indices.len() != expected {
            return Err(ModelError::TableLength { name, expected, got: indices.len() });
        }
        let table = LogicalMatrix::new(out_k, indices)
            .map_err(|_| ModelError::TableIndex { name: name.clone(), out_k })?;
        Ok(Operator { name, arg_ks, out_k, table })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub domain: Domain,
}

/// A parsed and resolved control network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    name: String,
    states: Vec<VarDecl>,
    controls: Vec<VarDecl>,
    updates: Vec<Expr>,
    ops: Vec<Operator>,
    state_names: Vec<String>,
    control_names: Vec<String>,
}

impl Network {
    pub(crate) fn from_parts(
        name: String,
        states: Vec<VarDecl>,
        controls: Vec<VarDecl>,
        updates: Vec<Expr>,
        ops: Vec<Operator>,
    ) -> Self {
        let state_names = states.iter().map(|v| v.name.clone()).collect();
        let control_names = controls.iter().map(|v| v.name.clone()).collect();
        Network { name, states, controls, updates, ops, state_names, control_names }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_vars(&self) -> &[VarDecl] {
        &self.states
    }

    pub fn control_vars(&self) -> &[VarDecl] {
        &self.controls
    }

    pub fn updates(&self) -> &[Expr] {
        &self.updates
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn state_radices(&self) -> Vec<usize> {
        self.states.iter().map(|v| v.domain.k).collect()
    }

    pub fn control_radices(&self) -> Vec<usize> {
        self.controls.iter().map(|v| v.domain.k).collect()
    }

    /// State-space size N = Π k_xᵢ.
    pub fn state_space(&self) -> usize {
        self.states.iter().map(|v| v.domain.k).product()
    }

    /// Control-space size M = Π k_uⱼ (1 when there are no controls).
    pub fn control_space(&self) -> usize {
        self.controls.iter().map(|v| v.domain.k).product()
    }

    pub fn display<'a>(&'a self, expr: &'a Expr) -> ExprDisplay<'a> {
        ExprDisplay { expr, state_names: &self.state_names, control_names: &self.control_names }
    }

    /// Delta index in Δ_N of a full state assignment given as 1-based levels.
    pub fn state_to_index(&self, levels: &[usize]) -> Result<usize, ModelError> {
        let radices = self.state_radices();
        if levels.len() != radices.len() {
            return Err(ModelError::Arity { got: levels.len(), expected: radices.len() });
        }
        for (&l, &r) in levels.iter().zip(&radices) {
            if l == 0 || l > r {
                return Err(ModelError::IndexRange { index: l, max: r });
            }
        }
        Ok(mixed_radix_encode(levels, &radices))
    }

    /// Per-variable levels of a state index in 1..=N.
    pub fn index_to_state(&self, index: usize) -> Result<Vec<usize>, ModelError> {
        let n = self.state_space();
        if index == 0 || index > n {
            return Err(ModelError::IndexRange { index, max: n });
        }
        Ok(mixed_radix_decode(index, &self.state_radices()))
    }

    /// Evaluate an expression under the given control/state levels.
    pub fn eval_expr(&self, e: &Expr, controls: &[usize], states: &[usize]) -> usize {
        match e {
            Expr::Var(v) => match v.kind {
                VarKind::State => states[v.pos],
                VarKind::Control => controls[v.pos],
            },
            Expr::Const { index, .. } => *index,
            Expr::Not(a) => expr::NOT_TABLE[self.eval_expr(a, controls, states) - 1],
            Expr::Bin(op, a, b) => {
                let ia = self.eval_expr(a, controls, states);
                let ib = self.eval_expr(b, controls, states);
                op.table()[(ia - 1) * 2 + ib - 1]
            }
            Expr::Call(name, args) => {
                let op = self.operator(name).expect("resolved expressions only call declared ops");
                let digits: Vec<usize> =
                    args.iter().map(|a| self.eval_expr(a, controls, states)).collect();
                op.table.col(mixed_radix_encode(&digits, &op.arg_ks))
            }
        }
    }

    /// Semantic one-step map: the state index reached from (u, x).
    pub fn eval_step(&self, u: usize, x: usize) -> usize {
        let controls = mixed_radix_decode(u, &self.control_radices());
        let states = mixed_radix_decode(x, &self.state_radices());
        let next: Vec<usize> =
            self.updates.iter().map(|e| self.eval_expr(e, &controls, &states)).collect();
        mixed_radix_encode(&next, &self.state_radices())
    }

    /// Structure matrix of an expression over the combined control·state
    /// space: shape out_k × (M·N), column (u−1)·N+x holding the evaluation at
    /// (u, x). Built by exhaustive evaluation.
    pub fn structure_matrix(&self, e: &Expr) -> LogicalMatrix {
        let n = self.state_space();
        let m = self.control_space();
        let control_radices = self.control_radices();
        let state_radices = self.state_radices();
        let out_k = self.expr_domain(e);
        let mut cols = Vec::with_capacity(m * n);
        for u in 1..=m {
            let controls = mixed_radix_decode(u, &control_radices);
            for x in 1..=n {
                let states = mixed_radix_decode(x, &state_radices);
                cols.push(self.eval_expr(e, &controls, &states));
            }
        }
        LogicalMatrix::new(out_k, cols).expect("evaluation yields in-range levels")
    }

    /// Structure matrix over states only (shape out_k × N); the expression
    /// must not mention controls.
    pub fn state_structure_matrix(&self, e: &Expr) -> Result<LogicalMatrix, ModelError> {
        if e.references_controls() {
            return Err(ModelError::ControlsInStateFormula);
        }
        let state_radices = self.state_radices();
        let out_k = self.expr_domain(e);
        let cols: Vec<usize> = (1..=self.state_space())
            .map(|x| self.eval_expr(e, &[], &mixed_radix_decode(x, &state_radices)))
            .collect();
        Ok(LogicalMatrix::new(out_k, cols).expect("evaluation yields in-range levels"))
    }

    /// Output domain of a resolved expression.
    pub fn expr_domain(&self, e: &Expr) -> usize {
        match e {
            Expr::Var(v) => match v.kind {
                VarKind::State => self.states[v.pos].domain.k,
                VarKind::Control => self.controls[v.pos].domain.k,
            },
            Expr::Const { k, .. } => *k,
            Expr::Not(_) | Expr::Bin(..) => 2,
            Expr::Call(name, _) => self.operator(name).expect("declared").out_k,
        }
    }

    /// Compile to the transition structure matrix M_F ∈ L_{N×(M·N)} as the
    /// Khatri-Rao product of the per-update structure matrices.
    pub fn compile(&self) -> LogicalMatrix {
        let mut it = self.updates.iter().map(|e| self.structure_matrix(e));
        let first = it.next().expect("networks have at least one state");
        it.fold(first, |acc, m| acc.khatri_rao(&m).expect("equal column counts"))
    }

    pub fn to_compiled(&self) -> CompiledNetwork {
        CompiledNetwork {
            name: self.name.clone(),
            n: self.states.len(),
            m: self.controls.len(),
            state_space: self.state_space(),
            control_space: self.control_space(),
            radices: Radices { states: self.state_radices(), controls: self.control_radices() },
            m_f: self.compile().col_indices().to_vec(),
        }
    }
}

/// JSON export of a compiled network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledNetwork {
    pub name: String,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub state_space: usize,
    #[serde(rename = "M")]
    pub control_space: usize,
    pub radices: Radices,
    #[serde(rename = "M_F")]
    pub m_f: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Radices {
    pub states: Vec<usize>,
    pub controls: Vec<usize>,
}

impl CompiledNetwork {
    pub fn validate(&self) -> Result<(), ParseError> {
        let n: usize = self.radices.states.iter().product();
        let m: usize = self.radices.controls.iter().product();
        let bad = |msg: String| Err(ParseError::new(0, msg));
        if self.radices.states.len() != self.n || self.radices.controls.len() != self.m {
            return bad("radices length does not match n/m".into());
        }
        if n != self.state_space || m != self.control_space {
            return bad("N/M do not match radix products".into());
        }
        if self.m_f.len() != m * n {
            return bad(format!("M_F has {} columns, expected {}", self.m_f.len(), m * n));
        }
        if self.m_f.iter().any(|&i| i == 0 || i > n) {
            return bad("M_F contains out-of-range delta indices".into());
        }
        Ok(())
    }

    pub fn m_f_logical(&self) -> Result<LogicalMatrix, MatrixError> {
        LogicalMatrix::new(self.state_space, self.m_f.clone())
    }
}
