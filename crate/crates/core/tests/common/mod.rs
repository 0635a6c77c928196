#![allow(dead_code)]

use proptest::prelude::*;
use roter::chart::MetricChart;
use roter::expr::{BinOp, Expr, Func};
use roter::tensor::DenseTensor;

/// Symmetrize a row-major `n×n` buffer.
pub fn sym_from(n: usize, v: &[f64]) -> DenseTensor {
    DenseTensor::sym2_from_fn(n, |ix| 0.5 * (v[ix[0] * n + ix[1]] + v[ix[1] * n + ix[0]])).expect("symmetric")
}

/// Random symmetric `(0,2)` tensor with entries in `[-1, 1]`.
pub fn sym2(n: usize) -> impl Strategy<Value = DenseTensor> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| sym_from(n, &v))
}

/// Random non-degenerate metric of any signature: a signed diagonal with
/// entries of size `0.5..2` plus a small symmetric perturbation.
pub fn metric(n: usize) -> impl Strategy<Value = DenseTensor> {
    (prop::collection::vec((0.5..2.0f64, any::<bool>()), n), prop::collection::vec(-1.0..1.0f64, n * n)).prop_map(
        move |(diag, pert)| {
            let p = sym_from(n, &pert);
            DenseTensor::sym2_from_fn(n, |ix| {
                let d = if ix[0] == ix[1] {
                    let (m, neg) = diag[ix[0]];
                    if neg {
                        -m
                    } else {
                        m
                    }
                } else {
                    0.0
                };
                d + 0.1 / n as f64 * p.at2(ix[0], ix[1])
            })
            .expect("symmetric")
        },
    )
}

/// Random generalized curvature tensor: a sum of two Kulkarni–Nomizu products.
pub fn curvature_tensor(n: usize) -> impl Strategy<Value = DenseTensor> {
    (sym2(n), sym2(n), sym2(n), sym2(n)).prop_map(|(a, b, c, d)| {
        let x = roter::tensor::kn_product(&a, &b).expect("kn");
        let y = roter::tensor::kn_product(&c, &d).expect("kn");
        &x + &y
    })
}

/// Parameters of a random smooth chart in dimension 3 or 4 on `[-0.5, 0.5]^n`.
#[derive(Debug, Clone)]
pub struct ChartSpec {
    pub n: usize,
    pub signs: Vec<bool>,
    pub coeffs: Vec<f64>,
    pub idx: Vec<usize>,
    pub point: Vec<f64>,
}

pub fn chart_spec() -> impl Strategy<Value = ChartSpec> {
    (3usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(-1.0..1.0f64, 6 * n * n),
            prop::collection::vec(0..n, 3 * n * n),
            prop::collection::vec(-0.5..0.5f64, n),
        )
            .prop_map(move |(signs, coeffs, idx, point)| ChartSpec { n, signs, coeffs, idx, point })
    })
}

impl ChartSpec {
    /// Diagonally dominant components built from sines, cosines,
    /// exponentials and monomials; the first diagonal entry is always positive.
    pub fn chart(&self) -> MetricChart {
        let n = self.n;
        let mut chart = MetricChart::new(n).expect("dimension");
        for i in 0..n {
            for j in i..n {
                let k = i * n + j;
                let c = &self.coeffs[6 * k..6 * k + 6];
                let [p, q, r] = [self.idx[3 * k] + 1, self.idx[3 * k + 1] + 1, self.idx[3 * k + 2] + 1];
                let src = if i == j {
                    let sign = if i > 0 && self.signs[i] { "-" } else { "" };
                    format!(
                        "{sign}(2 + ({})*sin(({})*x{p} + ({})) + ({})*x{q}*x{r} + 0.2*({})*exp(({})*x{q}))",
                        c[0], c[1], c[2], c[3], c[4], c[5]
                    )
                } else {
                    let w = 0.15 / n as f64;
                    format!(
                        "{w}*(({})*cos(({})*x{p}) + ({})*x{q}^2 + ({})*exp(({})*x{r}) + ({})*x{p}*x{r})",
                        c[0], c[1], c[2], c[3], c[4], c[5]
                    )
                };
                chart.set_component_str(i, j, &src).expect("generated component parses");
            }
        }
        chart
    }
}

/// Random expression trees over `x1..x3` and parameters `a`, `k`, with
/// non-negative constants so that printing and re-parsing is exact.
pub fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..4000).prop_map(|v| Expr::constant(v as f64 / 8.0)),
        (0.0..1e6f64).prop_map(Expr::constant),
        (0usize..3).prop_map(|i| Expr::var(&format!("x{}", i + 1), i)),
        prop::sample::select(vec!["a", "k"]).prop_map(|s| Expr::Parameter(s.to_string())),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (
                prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (prop::sample::select(Func::ALL.to_vec()), inner).prop_map(|(f, a)| Expr::call(f, a)),
        ]
    })
}

/// Smooth test functions of `x1, x2, x3` for jet checks, defined on `[-0.5, 0.5]^3`.
pub fn smooth_function(template: usize, c: &[f64]) -> String {
    match template % 4 {
        0 => format!("exp(({})*x1)*sin(({})*x2 + ({})) + ({})*x1^2*x3", c[0], c[1], c[2], c[3]),
        1 => format!("log(2 + cos(({})*x3)) + sqrt(1.5 + ({})*sin(x1*x2)) - ({})*x2^3", c[0], c[1], c[2]),
        2 => format!("(1.5 + ({})*x2)^(x1 + ({})) / (2 + x3^2)", 0.5 * c[0], c[1]),
        _ => format!("cos(({})*x1*x2*x3) * (1 + ({})*x1)^3 + exp(-(x2 - ({}))^2)", 3.0 * c[0], c[1], c[2]),
    }
}
