//! Activation-function expressions: the phenotype evolved by the grammar.

mod eval;
mod text;

pub use eval::{derivative, evaluate, sample_curve, EvalOutcome, EvalStatus, ZERO_DIVISION_EPS};
pub use text::{parse_text, ParseError};

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Sin,
    Cos,
    Tan,
    Exp,
    Tanh,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 5] = [
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Tan,
        UnaryOp::Exp,
        UnaryOp::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Tanh => "tanh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundOp {
    Min,
    Max,
}

impl BoundOp {
    pub fn name(self) -> &'static str {
        match self {
            BoundOp::Min => "min",
            BoundOp::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
        }
    }
}

/// Expression tree over a single input `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum ActivationExpr {
    Input,
    Const(f64),
    Unary(UnaryOp, Box<ActivationExpr>),
    /// `min(child, c)` / `max(child, c)`.
    Bounded(BoundOp, Box<ActivationExpr>, f64),
    /// `pow(child, e)`.
    Pow(Box<ActivationExpr>, f64),
    Binary(BinaryOp, Box<ActivationExpr>, Box<ActivationExpr>),
}

impl ActivationExpr {
    pub fn unary(op: UnaryOp, child: ActivationExpr) -> Self {
        ActivationExpr::Unary(op, Box::new(child))
    }

    pub fn bounded(op: BoundOp, child: ActivationExpr, bound: f64) -> Self {
        ActivationExpr::Bounded(op, Box::new(child), bound)
    }

    pub fn pow(child: ActivationExpr, exponent: f64) -> Self {
        ActivationExpr::Pow(Box::new(child), exponent)
    }

    pub fn binary(op: BinaryOp, left: ActivationExpr, right: ActivationExpr) -> Self {
        ActivationExpr::Binary(op, Box::new(left), Box::new(right))
    }

    /// The rectifier `max(x, 0)`, used by the baseline experiment.
    pub fn relu() -> Self {
        ActivationExpr::bounded(BoundOp::Max, ActivationExpr::Input, 0.0)
    }

    pub fn contains_input(&self) -> bool {
        match self {
            ActivationExpr::Input => true,
            ActivationExpr::Const(_) => false,
            ActivationExpr::Unary(_, c)
            | ActivationExpr::Bounded(_, c, _)
            | ActivationExpr::Pow(c, _) => c.contains_input(),
            ActivationExpr::Binary(_, l, r) => l.contains_input() || r.contains_input(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ActivationExpr::Input | ActivationExpr::Const(_) => 1,
            ActivationExpr::Unary(_, c)
            | ActivationExpr::Bounded(_, c, _)
            | ActivationExpr::Pow(c, _) => 1 + c.node_count(),
            ActivationExpr::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn to_text(&self) -> String {
        text::to_text(self)
    }
}

pub fn contains_input(expr: &ActivationExpr) -> bool {
    expr.contains_input()
}

pub fn to_text(expr: &ActivationExpr) -> String {
    expr.to_text()
}

impl fmt::Display for ActivationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for ActivationExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_text(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_input_cases() {
        let sin = ActivationExpr::unary(UnaryOp::Sin, ActivationExpr::Input);
        assert!(sin.contains_input());
        assert!(!ActivationExpr::Const(2.0).contains_input());
        let nested = ActivationExpr::binary(
            BinaryOp::Add,
            ActivationExpr::Const(1.0),
            ActivationExpr::pow(sin, 2.0),
        );
        assert!(nested.contains_input());
    }

    #[test]
    fn node_count() {
        let e: ActivationExpr = "tan(x)+cos(x)-tanh(x)-cos(x)".parse().unwrap();
        // 3 binary operators, 4 unary primitives, 4 inputs
        assert_eq!(e.node_count(), 11);
    }
}
