//! Truncated multivariate Taylor arithmetic through third order.
//!
//! A [`Jet3`] carries the value of a function at a point together with its
//! gradient, Hessian and third-derivative array in `nvars` variables. Mixed
//! partials are stored in full (`n^2` and `n^3` entries) and kept symmetric by
//! every operation.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jets have different variable counts ({0} vs {1})")]
    VarMismatch(usize, usize),
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("{op} expects {expected} argument(s), got {found}")]
    Arity { op: &'static str, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet3 {
    nvars: usize,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
    third: Vec<f64>,
}

impl Jet3 {
    pub fn constant(nvars: usize, value: f64) -> Self {
        Self {
            nvars,
            value,
            grad: vec![0.0; nvars],
            hess: vec![0.0; nvars * nvars],
            third: vec![0.0; nvars * nvars * nvars],
        }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn seed(nvars: usize, i: usize, value: f64) -> Self {
        let mut j = Self::constant(nvars, value);
        j.grad[i] = 1.0;
        j
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.nvars + j]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.third[(i * self.nvars + j) * self.nvars + k]
    }

    /// True when every derivative coefficient is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.grad.iter().chain(&self.hess).chain(&self.third).all(|c| *c == 0.0)
    }

    fn check(&self, other: &Self) -> Result<(), JetError> {
        if self.nvars != other.nvars {
            Err(JetError::VarMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            nvars: self.nvars,
            value: f(self.value, other.value),
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| f(*a, *b)).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(a, b)| f(*a, *b)).collect(),
            third: self.third.iter().zip(&other.third).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            nvars: self.nvars,
            value: self.value * s,
            grad: self.grad.iter().map(|x| x * s).collect(),
            hess: self.hess.iter().map(|x| x * s).collect(),
            third: self.third.iter().map(|x| x * s).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Leibniz rule through third order.
    pub fn mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        let n = self.nvars;
        let (u, v) = (self, other);
        let mut out = Self::constant(n, u.value * v.value);
        for i in 0..n {
            out.grad[i] = u.grad[i] * v.value + u.value * v.grad[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.hess[i * n + j] =
                    u.d2(i, j) * v.value + u.grad[i] * v.grad[j] + u.grad[j] * v.grad[i] + u.value * v.d2(i, j);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.third[(i * n + j) * n + k] = u.d3(i, j, k) * v.value
                        + u.d2(i, j) * v.grad[k]
                        + u.d2(i, k) * v.grad[j]
                        + u.d2(j, k) * v.grad[i]
                        + u.grad[i] * v.d2(j, k)
                        + u.grad[j] * v.d2(i, k)
                        + u.grad[k] * v.d2(i, j)
                        + u.value * v.d3(i, j, k);
                }
            }
        }
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        self.mul(&other.recip()?)
    }

    /// Chain rule for `f(u)` given `f, f', f'', f'''` at `u.value`.
    pub fn compose(&self, f: [f64; 4]) -> Self {
        let n = self.nvars;
        let u = self;
        let mut out = Self::constant(n, f[0]);
        for i in 0..n {
            out.grad[i] = f[1] * u.grad[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.hess[i * n + j] = f[1] * u.d2(i, j) + f[2] * u.grad[i] * u.grad[j];
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.third[(i * n + j) * n + k] = f[1] * u.d3(i, j, k)
                        + f[2] * (u.d2(i, j) * u.grad[k] + u.d2(i, k) * u.grad[j] + u.d2(j, k) * u.grad[i])
                        + f[3] * u.grad[i] * u.grad[j] * u.grad[k];
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let x = self.value;
        if x == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let r = 1.0 / x;
        Ok(self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn powi(&self, k: i32) -> Result<Self, JetError> {
        let x = self.value;
        if k < 0 && x == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let kf = k as f64;
        // falling factorials k, k(k-1), k(k-1)(k-2)
        let c = [1.0, kf, kf * (kf - 1.0), kf * (kf - 1.0) * (kf - 2.0)];
        let mut f = [0.0; 4];
        for (j, fj) in f.iter_mut().enumerate() {
            *fj = if c[j] == 0.0 { 0.0 } else { c[j] * x.powi(k - j as i32) };
        }
        Ok(self.compose(f))
    }

    pub fn powf(&self, r: f64) -> Result<Self, JetError> {
        let x = self.value;
        if x <= 0.0 {
            return Err(JetError::Domain { func: "pow", value: x });
        }
        let c = [1.0, r, r * (r - 1.0), r * (r - 1.0) * (r - 2.0)];
        let mut f = [0.0; 4];
        for (j, fj) in f.iter_mut().enumerate() {
            *fj = c[j] * x.powf(r - j as f64);
        }
        Ok(self.compose(f))
    }

    /// `self ^ exponent` for a jet-valued exponent: `exp(exponent * log(self))`,
    /// falling back to integer or real powers when the exponent is constant.
    pub fn pow(&self, exponent: &Self) -> Result<Self, JetError> {
        self.check(exponent)?;
        if exponent.is_constant() {
            let e = exponent.value;
            if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                return self.powi(e as i32);
            }
            return self.powf(e);
        }
        if self.value <= 0.0 {
            return Err(JetError::Domain { func: "pow", value: self.value });
        }
        Ok(exponent.mul(&self.ln()?)?.exp())
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose([e; 4])
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let x = self.value;
        if x <= 0.0 {
            return Err(JetError::Domain { func: "log", value: x });
        }
        let r = 1.0 / x;
        Ok(self.compose([x.ln(), r, -r * r, 2.0 * r * r * r]))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let x = self.value;
        if x <= 0.0 {
            return Err(JetError::Domain { func: "sqrt", value: x });
        }
        let s = x.sqrt();
        Ok(self.compose([s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)]))
    }
}

/// Operation selector for [`jet_arithmetic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    PowInt(i32),
    PowReal(f64),
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

/// Apply `op` to `args` (two jets for binary operations, one otherwise).
pub fn jet_arithmetic(op: JetOp, args: &[Jet3]) -> Result<Jet3, JetError> {
    let arity = match op {
        JetOp::Add | JetOp::Sub | JetOp::Mul | JetOp::Div => 2,
        _ => 1,
    };
    if args.len() != arity {
        return Err(JetError::Arity { op: op_name(op), expected: arity, found: args.len() });
    }
    let a = &args[0];
    match op {
        JetOp::Add => a.add(&args[1]),
        JetOp::Sub => a.sub(&args[1]),
        JetOp::Mul => a.mul(&args[1]),
        JetOp::Div => a.div(&args[1]),
        JetOp::Neg => Ok(a.neg()),
        JetOp::PowInt(k) => a.powi(k),
        JetOp::PowReal(r) => a.powf(r),
        JetOp::Exp => Ok(a.exp()),
        JetOp::Log => a.ln(),
        JetOp::Sin => Ok(a.sin()),
        JetOp::Cos => Ok(a.cos()),
        JetOp::Sqrt => a.sqrt(),
    }
}

fn op_name(op: JetOp) -> &'static str {
    match op {
        JetOp::Add => "add",
        JetOp::Sub => "sub",
        JetOp::Mul => "mul",
        JetOp::Div => "div",
        JetOp::Neg => "neg",
        JetOp::PowInt(_) => "powi",
        JetOp::PowReal(_) => "powf",
        JetOp::Exp => "exp",
        JetOp::Log => "log",
        JetOp::Sin => "sin",
        JetOp::Cos => "cos",
        JetOp::Sqrt => "sqrt",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_at_zero() {
        let e = Jet3::seed(1, 0, 0.0).exp();
        assert_eq!((e.value(), e.d1(0), e.d2(0, 0), e.d3(0, 0, 0)), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn square_at_two() {
        let x = Jet3::seed(1, 0, 2.0);
        let sq = jet_arithmetic(JetOp::Mul, &[x.clone(), x]).unwrap();
        assert_eq!((sq.value(), sq.d1(0), sq.d2(0, 0), sq.d3(0, 0, 0)), (4.0, 4.0, 2.0, 0.0));
    }

    #[test]
    fn powi_at_zero_base() {
        let x = Jet3::seed(1, 0, 0.0);
        let c = x.powi(3).unwrap();
        assert_eq!((c.value(), c.d1(0), c.d2(0, 0), c.d3(0, 0, 0)), (0.0, 0.0, 0.0, 6.0));
        assert_eq!(x.powi(-1), Err(JetError::DivisionByZero));
    }

    #[test]
    fn domain_errors() {
        let z = Jet3::constant(2, 0.0);
        let neg = Jet3::constant(2, -1.0);
        assert_eq!(Jet3::constant(2, 1.0).div(&z), Err(JetError::DivisionByZero));
        assert!(matches!(neg.ln(), Err(JetError::Domain { func: "log", .. })));
        assert!(matches!(neg.sqrt(), Err(JetError::Domain { func: "sqrt", .. })));
        assert!(matches!(neg.powf(0.5), Err(JetError::Domain { func: "pow", .. })));
        assert_eq!(z.add(&Jet3::constant(3, 0.0)), Err(JetError::VarMismatch(2, 3)));
        assert!(matches!(jet_arithmetic(JetOp::Add, &[z]), Err(JetError::Arity { .. })));
    }

    #[test]
    fn sqrt_matches_half_power() {
        let x = Jet3::seed(1, 0, 1.7).add(&Jet3::constant(1, 0.0)).unwrap();
        let a = x.sqrt().unwrap();
        let b = x.powf(0.5).unwrap();
        for (p, q) in
            [(a.value(), b.value()), (a.d1(0), b.d1(0)), (a.d2(0, 0), b.d2(0, 0)), (a.d3(0, 0, 0), b.d3(0, 0, 0))]
        {
            assert!((p - q).abs() < 1e-14 * q.abs().max(1.0));
        }
    }
}
