//! Expression language for metric components.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := ("-")? power ;
//! power  := atom ("^" factor)? ;
//! atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")" ;
//! ```
//!
//! Identifiers resolve to chart coordinates or declared parameters at parse
//! time; function names are limited to [`Func`].

mod eval;
mod parse;

use std::fmt;

pub use eval::{evaluate_jet, evaluate_value, EvalError, EvalErrorKind, ParamMap};
pub use parse::{parse_expression, ParseContext, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Exp, Func::Log, Func::Sin, Func::Cos, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        1
    }
}

/// Parsed metric-component expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    /// Chart coordinate; `index` is its position in the coordinate list.
    Variable {
        name: String,
        index: usize,
    },
    Parameter(String),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr::Constant(v)
    }

    pub fn var(name: &str, index: usize) -> Self {
        Expr::Variable { name: name.to_string(), index }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Self {
        Expr::Unary { op: UnaryOp::Neg, operand: Box::new(e) }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn call(func: Func, arg: Expr) -> Self {
        Expr::Call { func, args: vec![arg] }
    }

    /// Coordinate indices referenced anywhere in the tree, sorted and deduplicated.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Variable { index, .. } = e {
                out.push(*index);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Parameter(p) = e {
                out.push(p.clone());
            }
        });
        out.sort();
        out.dedup();
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Unary { operand, .. } => operand.walk(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }

    /// Child at `path` (indices into operands, left to right).
    pub fn node_at(&self, path: &[usize]) -> Option<&Expr> {
        let Some((&first, rest)) = path.split_first() else {
            return Some(self);
        };
        let child = match self {
            Expr::Unary { operand, .. } if first == 0 => operand.as_ref(),
            Expr::Binary { lhs, .. } if first == 0 => lhs.as_ref(),
            Expr::Binary { rhs, .. } if first == 1 => rhs.as_ref(),
            Expr::Call { args, .. } => args.get(first)?,
            _ => return None,
        };
        child.node_at(rest)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op: BinOp::Add | BinOp::Sub, .. } => 1,
            Expr::Binary { op: BinOp::Mul | BinOp::Div, .. } => 2,
            Expr::Unary { .. } => 3,
            Expr::Binary { op: BinOp::Pow, .. } => 4,
            _ => 5,
        }
    }
}

/// Text that reparses to the same tree; parentheses only where precedence or
/// associativity requires them.
pub fn format_expression(ast: &Expr) -> String {
    ast.to_string()
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(v) => write!(f, "{v:?}"),
            Expr::Variable { name, .. } => f.write_str(name),
            Expr::Parameter(p) => f.write_str(p),
            Expr::Unary { op: UnaryOp::Neg, operand } => {
                f.write_str("-")?;
                write_child(f, operand, operand.precedence() < 4)
            }
            Expr::Binary { op: BinOp::Pow, lhs, rhs } => {
                write_child(f, lhs, lhs.precedence() < 5)?;
                f.write_str("^")?;
                write_child(f, rhs, rhs.precedence() < 3)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = self.precedence();
                write_child(f, lhs, lhs.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, rhs, rhs.precedence() <= p)
            }
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
