//! Expression trees over network variables.
//!
//! Expressions are fully resolved: variables are positional references and
//! constants are delta indices in a known domain. Evaluation is table-driven
//! for built-in and custom operators alike.

use std::fmt;

use crate::matrix::LogicalMatrix;

/// Built-in Boolean connectives with their structure-matrix rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Imp,
    Iff,
    Xor,
}

pub const NOT_TABLE: [usize; 2] = [2, 1];

impl BinOp {
    pub fn table(self) -> &'static [usize; 4] {
        match self {
            BinOp::And => &[1, 2, 2, 2],
            BinOp::Or => &[1, 1, 1, 2],
            BinOp::Imp => &[1, 2, 1, 1],
            BinOp::Iff => &[1, 2, 2, 1],
            BinOp::Xor => &[2, 1, 1, 2],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Imp => "->",
            BinOp::Iff => "<->",
            BinOp::Xor => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::And => 4,
            BinOp::Xor => 3,
            BinOp::Or => 2,
            BinOp::Imp => 1,
            BinOp::Iff => 0,
        }
    }
}

/// Structure matrix of a built-in connective, e.g. δ2[1,2,2,2] for ∧.
pub fn builtin_structure_matrix(op: BinOp) -> LogicalMatrix {
    LogicalMatrix::new(2, op.table().to_vec()).expect("static tables are valid")
}

/// Structure matrix of negation, δ2[2,1].
pub fn negation_structure_matrix() -> LogicalMatrix {
    LogicalMatrix::new(2, NOT_TABLE.to_vec()).expect("static tables are valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    State,
    Control,
}

/// Positional reference to a declared variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarRef {
    pub kind: VarKind,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(VarRef),
    /// δ_k^index constant.
    Const {
        k: usize,
        index: usize,
    },
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Application of a declared (custom) operator by name.
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn state(pos: usize) -> Expr {
        Expr::Var(VarRef { kind: VarKind::State, pos })
    }

    pub fn control(pos: usize) -> Expr {
        Expr::Var(VarRef { kind: VarKind::Control, pos })
    }

    pub fn truth(value: bool) -> Expr {
        Expr::Const { k: 2, index: if value { 1 } else { 2 } }
    }

    /// Whether any control variable occurs in the tree.
    pub fn references_controls(&self) -> bool {
        match self {
            Expr::Var(v) => v.kind == VarKind::Control,
            Expr::Const { .. } => false,
            Expr::Not(a) => a.references_controls(),
            Expr::Bin(_, a, b) => a.references_controls() || b.references_controls(),
            Expr::Call(_, args) => args.iter().any(Expr::references_controls),
        }
    }
}

impl std::ops::Not for Expr {
    type Output = Expr;

    fn not(self) -> Expr {
        Expr::Not(Box::new(self))
    }
}

impl std::ops::BitAnd for Expr {
    type Output = Expr;

    fn bitand(self, rhs: Expr) -> Expr {
        Expr::Bin(BinOp::And, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::BitOr for Expr {
    type Output = Expr;

    fn bitor(self, rhs: Expr) -> Expr {
        Expr::Bin(BinOp::Or, Box::new(self), Box::new(rhs))
    }
}

/// Renders an expression in the DSL syntax, given variable names supplied by
/// the owning network.
pub struct ExprDisplay<'a> {
    pub(crate) expr: &'a Expr,
    pub(crate) state_names: &'a [String],
    pub(crate) control_names: &'a [String],
}

impl ExprDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        match e {
            Expr::Var(v) => {
                let name = match v.kind {
                    VarKind::State => &self.state_names[v.pos],
                    VarKind::Control => &self.control_names[v.pos],
                };
                write!(f, "{name}")
            }
            Expr::Const { k: 2, index } => write!(f, "{}", if *index == 1 { "1" } else { "0" }),
            Expr::Const { k, index } => write!(f, "d({k},{index})"),
            Expr::Not(a) => {
                write!(f, "!")?;
                self.write(f, a, 5)
            }
            Expr::Bin(op, a, b) => {
                let prec = op.precedence();
                let parens = prec < min_prec;
                if parens {
                    write!(f, "(")?;
                }
                // -> is right-associative, the rest left-associative
                let (lp, rp) = match op {
                    BinOp::Imp => (prec + 1, prec),
                    _ => (prec, prec + 1),
                };
                self.write(f, a, lp)?;
                write!(f, " {} ", op.symbol())?;
                self.write(f, b, rp)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    self.write(f, a, 0)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, 0)
    }
}
