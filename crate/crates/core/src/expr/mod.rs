//! Arithmetic expressions in one or more variables, for describing integrands as text.
//!
//! Grammar: numbers, the variable `x` (one dimension) or `x1`..`x4`, the constants
//! `pi` and `e`, `+ - * / ^`, unary minus and the functions `exp sin cos sqrt atan
//! abs`. `^` is right-associative and unary minus binds tighter than `^`, so `-x^2`
//! is `(-x)^2`. There is no implicit multiplication.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::error::QuadError;
use crate::rules::Integrand;
use crate::tensor::{MultiIntegrand, MAX_DIMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Atan,
    Abs,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Exp,
        Func::Sin,
        Func::Cos,
        Func::Sqrt,
        Func::Atan,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sqrt => v.sqrt(),
            Func::Atan => v.atan(),
            Func::Abs => v.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Non-negative literal; negative numbers are `Neg(Num)`.
    Num(f64),
    /// Zero-based variable index.
    Var(usize),
    Const(Constant),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

const PREC_NEG: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(op, ..) => op.precedence(),
            Node::Neg(_) => PREC_NEG,
            _ => PREC_ATOM,
        }
    }

    /// Source text with as few parentheses as the grammar allows.
    pub fn to_string_with(&self, dims: usize) -> String {
        let mut out = String::new();
        self.write(&mut out, dims);
        out
    }

    fn write(&self, out: &mut String, dims: usize) {
        use std::fmt::Write;
        match self {
            Node::Num(v) => write!(out, "{v}").expect("string write"),
            Node::Var(_) if dims == 1 => out.push('x'),
            Node::Var(i) => write!(out, "x{}", i + 1).expect("string write"),
            Node::Const(Constant::Pi) => out.push_str("pi"),
            Node::Const(Constant::E) => out.push('e'),
            Node::Neg(inner) => {
                out.push('-');
                inner.write_wrapped(out, dims, inner.precedence() < PREC_NEG);
            }
            Node::Binary(op, l, r) => {
                let prec = op.precedence();
                let (l_paren, r_paren) = if *op == BinOp::Pow {
                    (l.precedence() <= prec, r.precedence() < prec)
                } else {
                    (l.precedence() < prec, r.precedence() <= prec)
                };
                l.write_wrapped(out, dims, l_paren);
                out.push(op.symbol());
                r.write_wrapped(out, dims, r_paren);
            }
            Node::Call(f, arg) => {
                out.push_str(f.name());
                arg.write_wrapped(out, dims, true);
            }
        }
    }

    fn write_wrapped(&self, out: &mut String, dims: usize, paren: bool) {
        if paren {
            out.push('(');
        }
        self.write(out, dims);
        if paren {
            out.push(')');
        }
    }

    fn eval(&self, point: &[f64], dims: usize) -> Result<f64, EvalError> {
        let fail = |message: &str| EvalError {
            message: message.to_string(),
            subexpression: self.to_string_with(dims),
        };
        let v = match self {
            Node::Num(v) => *v,
            Node::Var(i) => point[*i],
            Node::Const(c) => c.value(),
            Node::Neg(inner) => -inner.eval(point, dims)?,
            Node::Binary(op, l, r) => {
                let a = l.eval(point, dims)?;
                let b = r.eval(point, dims)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(fail("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a == 0.0 && b < 0.0 {
                            return Err(fail("division by zero"));
                        }
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(fail("negative base with non-integer exponent"));
                        }
                        a.powf(b)
                    }
                }
            }
            Node::Call(f, arg) => {
                let a = arg.eval(point, dims)?;
                if *f == Func::Sqrt && a < 0.0 {
                    return Err(fail("square root of a negative number"));
                }
                f.apply(a)
            }
        };
        if !v.is_finite() {
            return Err(fail("non-finite result"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    InvalidNumber(String),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    UnknownIdentifier(String),
    VariableOutOfRange {
        name: String,
        dims: usize,
    },
    Arity {
        name: &'static str,
        found: usize,
    },
    Dimension {
        dims: usize,
    },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number `{s}`"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::VariableOutOfRange { name, dims } => {
                write!(f, "variable `{name}` exceeds dimension {dims}")
            }
            ParseErrorKind::Arity { name, found } => {
                write!(f, "`{name}` takes 1 argument, got {found}")
            }
            ParseErrorKind::Dimension { dims } => {
                write!(f, "dimension must be between 1 and {MAX_DIMS}, got {dims}")
            }
        }
    }
}

/// Syntax error with the 0-based character position where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

/// Evaluation failure, naming the subexpression that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} in `{subexpression}`")]
pub struct EvalError {
    pub message: String,
    pub subexpression: String,
}

/// A parsed expression in `dims` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    dims: usize,
}

impl Expression {
    pub fn parse(src: &str, dims: usize) -> Result<Self, ParseError> {
        if dims == 0 || dims > MAX_DIMS {
            return Err(ParseError {
                kind: ParseErrorKind::Dimension { dims },
                position: 0,
            });
        }
        let root = parser::parse(src, dims)?;
        Ok(Expression { root, dims })
    }

    /// Wraps an existing tree. Variable indices must be below `dims`.
    pub fn from_node(root: Node, dims: usize) -> Self {
        Expression { root, dims }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Evaluates at `point`, which must have `dims` coordinates.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64, EvalError> {
        assert_eq!(
            point.len(),
            self.dims,
            "point has {} coordinates, expression has {} variables",
            point.len(),
            self.dims
        );
        self.root.eval(point, self.dims)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root.to_string_with(self.dims))
    }
}

impl Integrand for Expression {
    fn eval(&self, x: f64) -> Result<f64, QuadError> {
        if self.dims != 1 {
            return Err(QuadError::Dimension {
                dims: self.dims,
                max: 1,
            });
        }
        self.root.eval(&[x], 1).map_err(|e| QuadError::Evaluation {
            x,
            message: e.to_string(),
        })
    }
}

impl MultiIntegrand for Expression {
    fn eval(&self, point: &[f64]) -> Result<f64, QuadError> {
        if point.len() != self.dims {
            return Err(QuadError::Dimension {
                dims: point.len(),
                max: self.dims,
            });
        }
        self.root
            .eval(point, self.dims)
            .map_err(|e| QuadError::Evaluation {
                x: point[0],
                message: format!("{e} at {point:?}"),
            })
    }
}
