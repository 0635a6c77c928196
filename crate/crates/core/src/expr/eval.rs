use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func, UnaryOp};
use crate::jet::{Jet3, JetError};

/// Values for named scalar parameters.
pub type ParamMap = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum EvalErrorKind {
    Jet(JetError),
    UnboundParameter(String),
    CoordinateOutOfRange { index: usize, nvars: usize },
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalErrorKind::Jet(e) => write!(f, "{e}"),
            EvalErrorKind::UnboundParameter(p) => write!(f, "parameter {p:?} has no value"),
            EvalErrorKind::CoordinateOutOfRange { index, nvars } => {
                write!(f, "coordinate index {index} outside a {nvars}-dimensional point")
            }
        }
    }
}

/// Evaluation failure, located by the child-index path of the failing node
/// (see [`Expr::node_at`]).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in `{node}` (node path {path:?})")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub path: Vec<usize>,
    pub node: String,
}

struct Ctx<'a> {
    point: &'a [f64],
    params: &'a ParamMap,
    path: Vec<usize>,
}

impl Ctx<'_> {
    fn fail(&self, node: &Expr, kind: EvalErrorKind) -> EvalError {
        EvalError { kind, path: self.path.clone(), node: node.to_string() }
    }

    fn child(&mut self, idx: usize, e: &Expr) -> Result<Jet3, EvalError> {
        self.path.push(idx);
        let r = self.eval(e);
        self.path.pop();
        r
    }

    fn eval(&mut self, e: &Expr) -> Result<Jet3, EvalError> {
        let n = self.point.len();
        let jet = |r: Result<Jet3, JetError>, this: &Self| r.map_err(|err| this.fail(e, EvalErrorKind::Jet(err)));
        match e {
            Expr::Constant(v) => Ok(Jet3::constant(n, *v)),
            Expr::Variable { index, .. } => {
                if *index >= n {
                    return Err(self.fail(e, EvalErrorKind::CoordinateOutOfRange { index: *index, nvars: n }));
                }
                Ok(Jet3::seed(n, *index, self.point[*index]))
            }
            Expr::Parameter(p) => match self.params.get(p) {
                Some(v) => Ok(Jet3::constant(n, *v)),
                None => Err(self.fail(e, EvalErrorKind::UnboundParameter(p.clone()))),
            },
            Expr::Unary { op: UnaryOp::Neg, operand } => Ok(self.child(0, operand)?.neg()),
            Expr::Binary { op, lhs, rhs } => {
                let a = self.child(0, lhs)?;
                let b = self.child(1, rhs)?;
                let r = match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b),
                    BinOp::Pow => a.pow(&b),
                };
                jet(r, self)
            }
            Expr::Call { func, args } => {
                let a = self.child(0, &args[0])?;
                let r = match func {
                    Func::Exp => Ok(a.exp()),
                    Func::Log => a.ln(),
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Sqrt => a.sqrt(),
                };
                jet(r, self)
            }
        }
    }
}

/// Full third-order jet of `expr` at `point`, one jet variable per coordinate.
pub fn evaluate_jet(expr: &Expr, point: &[f64], params: &ParamMap) -> Result<Jet3, EvalError> {
    Ctx { point, params, path: Vec::new() }.eval(expr)
}

/// Plain value of `expr` at `point`.
pub fn evaluate_value(expr: &Expr, point: &[f64], params: &ParamMap) -> Result<f64, EvalError> {
    fn go(e: &Expr, point: &[f64], params: &ParamMap, path: &mut Vec<usize>) -> Result<f64, EvalError> {
        let fail = |kind, path: &Vec<usize>| EvalError { kind, path: path.clone(), node: e.to_string() };
        let sub = |i: usize, c: &Expr, path: &mut Vec<usize>| {
            path.push(i);
            let r = go(c, point, params, path);
            path.pop();
            r
        };
        let domain = |func: &'static str, value: f64, path: &Vec<usize>| {
            fail(EvalErrorKind::Jet(JetError::Domain { func, value }), path)
        };
        match e {
            Expr::Constant(v) => Ok(*v),
            Expr::Variable { index, .. } => point
                .get(*index)
                .copied()
                .ok_or_else(|| fail(EvalErrorKind::CoordinateOutOfRange { index: *index, nvars: point.len() }, path)),
            Expr::Parameter(p) => {
                params.get(p).copied().ok_or_else(|| fail(EvalErrorKind::UnboundParameter(p.clone()), path))
            }
            Expr::Unary { operand, .. } => Ok(-sub(0, operand, path)?),
            Expr::Binary { op, lhs, rhs } => {
                let a = sub(0, lhs, path)?;
                let b = sub(1, rhs, path)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div if b == 0.0 => Err(fail(EvalErrorKind::Jet(JetError::DivisionByZero), path)),
                    BinOp::Div => Ok(a / b),
                    BinOp::Pow if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 => {
                        if a == 0.0 && b < 0.0 {
                            Err(fail(EvalErrorKind::Jet(JetError::DivisionByZero), path))
                        } else {
                            Ok(a.powi(b as i32))
                        }
                    }
                    BinOp::Pow if a <= 0.0 => Err(domain("pow", a, path)),
                    BinOp::Pow => Ok(a.powf(b)),
                }
            }
            Expr::Call { func, args } => {
                let a = sub(0, &args[0], path)?;
                match func {
                    Func::Exp => Ok(a.exp()),
                    Func::Log if a <= 0.0 => Err(domain("log", a, path)),
                    Func::Log => Ok(a.ln()),
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Sqrt if a <= 0.0 => Err(domain("sqrt", a, path)),
                    Func::Sqrt => Ok(a.sqrt()),
                }
            }
        }
    }
    go(expr, point, params, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expression, ParseContext};

    fn ctx() -> ParseContext {
        ParseContext::with_dim(6).with_parameters(["c1"])
    }

    #[test]
    fn constant_jet() {
        let e = parse_expression("1", &ctx()).unwrap();
        let j = evaluate_jet(&e, &[0.0; 6], &ParamMap::new()).unwrap();
        assert_eq!(j.value(), 1.0);
        assert!(j.is_constant());
    }

    #[test]
    fn exp_component() {
        let e = parse_expression("exp(x1)", &ctx()).unwrap();
        let j = evaluate_jet(&e, &[0.0; 6], &ParamMap::new()).unwrap();
        assert_eq!((j.value(), j.d1(0), j.d1(1)), (1.0, 1.0, 0.0));
    }

    #[test]
    fn shifted_square() {
        let e = parse_expression("(x5+1)^2", &ctx()).unwrap();
        let mut p = [0.0; 6];
        p[4] = 0.5;
        let j = evaluate_jet(&e, &p, &ParamMap::new()).unwrap();
        assert_eq!((j.value(), j.d1(4), j.d2(4, 4), j.d3(4, 4, 4)), (2.25, 3.0, 2.0, 0.0));
    }

    #[test]
    fn exp_minus_at_one() {
        let e = parse_expression("exp(-x1)", &ctx()).unwrap();
        let mut p = [0.0; 6];
        p[0] = 1.0;
        let v = evaluate_jet(&e, &p, &ParamMap::new()).unwrap().value();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(evaluate_value(&e, &p, &ParamMap::new()).unwrap(), v);
    }

    #[test]
    fn errors_carry_location() {
        let e = parse_expression("x2 + log(x1 - 1)", &ctx()).unwrap();
        let err = evaluate_jet(&e, &[0.5; 6], &ParamMap::new()).unwrap_err();
        assert_eq!(err.path, vec![1]);
        assert_eq!(err.node, "log(x1 - 1.0)");
        assert!(matches!(err.kind, EvalErrorKind::Jet(JetError::Domain { func: "log", .. })));
        let verr = evaluate_value(&e, &[0.5; 6], &ParamMap::new()).unwrap_err();
        assert_eq!(verr.path, vec![1]);

        let e = parse_expression("c1 * x1", &ctx()).unwrap();
        let err = evaluate_jet(&e, &[0.5; 6], &ParamMap::new()).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::UnboundParameter("c1".into()));
        assert_eq!(err.path, vec![0]);
        let params: ParamMap = [("c1".to_string(), 2.0)].into();
        assert_eq!(evaluate_jet(&e, &[0.5; 6], &params).unwrap().value(), 1.0);
    }
}
