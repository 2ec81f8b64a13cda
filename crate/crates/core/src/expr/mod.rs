//! Scalar expressions of chart coordinates.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          (right-associative)
//! atom    := number | ident | ident '(' sum ')' | '(' sum ')'
//! ```
//!
//! Coordinates are `x1`..`xn`; any other identifier must be a declared
//! parameter or one of `sqrt exp log ln sin cos tan atan`.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

mod eval;
mod parser;

pub use eval::ParamLookup;
pub use parser::parse;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Atan,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Self::Sqrt,
            "exp" => Self::Exp,
            "log" | "ln" => Self::Log,
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "tan" => Self::Tan,
            "atan" => Self::Atan,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sqrt => "sqrt",
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Atan => "atan",
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum Node {
    Const(f64),
    /// Zero-based coordinate index (`x1` is 0).
    Var(usize),
    Param(String),
    Neg(Expr),
    Binary(BinOp, Expr, Expr),
    Call(Func, Expr),
}

/// An immutable, cheaply clonable expression tree.
///
/// Subtrees are shared, so fields derived by composition (inverse metrics,
/// raised winds) stay small; evaluation memoizes shared nodes.
#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: f64) -> Self {
        Self(Arc::new(Node::Const(value)))
    }

    pub fn var(index: usize) -> Self {
        Self(Arc::new(Node::Var(index)))
    }

    pub fn param(name: &str) -> Self {
        Self(Arc::new(Node::Param(name.into())))
    }

    pub fn call(func: Func, arg: Expr) -> Self {
        Self(Arc::new(Node::Call(func, arg)))
    }

    fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Self(Arc::new(Node::Binary(op, a, b)))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(v) => Some(v),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_constant() == Some(v)
    }

    // Builders fold literal zeros and ones so composed fields stay lean.

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_const(0.0) {
            return other.clone();
        }
        if other.is_const(0.0) {
            return self.clone();
        }
        Self::binary(BinOp::Add, self.clone(), other.clone())
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        if other.is_const(0.0) {
            return self.clone();
        }
        if self.is_const(0.0) {
            return other.neg();
        }
        Self::binary(BinOp::Sub, self.clone(), other.clone())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_const(0.0) || other.is_const(0.0) {
            return Self::constant(0.0);
        }
        if self.is_const(1.0) {
            return other.clone();
        }
        if other.is_const(1.0) {
            return self.clone();
        }
        Self::binary(BinOp::Mul, self.clone(), other.clone())
    }

    pub fn div(&self, other: &Expr) -> Expr {
        if self.is_const(0.0) {
            return Self::constant(0.0);
        }
        if other.is_const(1.0) {
            return self.clone();
        }
        Self::binary(BinOp::Div, self.clone(), other.clone())
    }

    pub fn pow(&self, exponent: &Expr) -> Expr {
        if exponent.is_const(1.0) {
            return self.clone();
        }
        Self::binary(BinOp::Pow, self.clone(), exponent.clone())
    }

    pub fn powi(&self, exponent: i32) -> Expr {
        self.pow(&Self::constant(f64::from(exponent)))
    }

    pub fn neg(&self) -> Expr {
        if self.is_const(0.0) {
            return self.clone();
        }
        Self(Arc::new(Node::Neg(self.clone())))
    }

    pub fn scale(&self, factor: f64) -> Expr {
        Self::constant(factor).mul(self)
    }

    /// Sum of the given terms; `0` when empty.
    pub fn sum<'a>(terms: impl IntoIterator<Item = &'a Expr>) -> Expr {
        terms
            .into_iter()
            .fold(Self::constant(0.0), |acc, t| acc.add(t))
    }

    /// Whether any coordinate appears in the tree.
    pub fn depends_on_coordinates(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Param(_) => false,
            Node::Var(_) => true,
            Node::Neg(e) | Node::Call(_, e) => e.depends_on_coordinates(),
            Node::Binary(_, a, b) => a.depends_on_coordinates() || b.depends_on_coordinates(),
        }
    }

    /// Largest coordinate index referenced, plus one.
    pub fn coordinate_span(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Param(_) => 0,
            Node::Var(i) => i + 1,
            Node::Neg(e) | Node::Call(_, e) => e.coordinate_span(),
            Node::Binary(_, a, b) => a.coordinate_span().max(b.coordinate_span()),
        }
    }

    pub fn parameters(&self, out: &mut alloc::collections::BTreeSet<String>) {
        match self.node() {
            Node::Const(_) | Node::Var(_) => {}
            Node::Param(p) => {
                out.insert(p.clone());
            }
            Node::Neg(e) | Node::Call(_, e) => e.parameters(out),
            Node::Binary(_, a, b) => {
                a.parameters(out);
                b.parameters(out);
            }
        }
    }
}

/// Fully parenthesized text that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{})", -v)
            }
            Node::Const(v) => write!(f, "{v}"),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Param(p) => f.write_str(p),
            Node::Neg(e) => write!(f, "(-{e})"),
            Node::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Node::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests;
