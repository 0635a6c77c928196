//! Built-in charts, closed-form component tables for regression, and
//! synthetic curvature fixtures.
//!
//! | name            | chart                                                         |
//! |-----------------|---------------------------------------------------------------|
//! | `flat`          | identity metric, `dim` parameter (default 4)                  |
//! | `sphere3`       | round unit 3-sphere in hyperspherical coordinates             |
//! | `met1`          | `f [dx1² + dx2² + dx3² + dx4² + h dx5²]`, `f(x1)`, `h(x1,x2)` |
//! | `met1-case-i`   | `met1` with `f = exp(x1)`, `h = exp(x1 + x2)`                 |
//! | `met1-case-ii`  | `met1` with `f = exp(x1)`, `h = 1 + x1^2`                     |
//! | `met1-case-iii` | `met1` with `f = exp(x1)`, `h = exp(-x1)`                     |
//! | `met1-case-vi`  | `met1` with `f = h = 1`                                       |
//! | `met2`          | product of two 3-dimensional hyperbolic blocks, `x5 > 0`      |
//! | `met2-block`    | the first 3-dimensional factor of `met2`                      |

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chart::{ChartError, MetricChart};
use crate::curvature::{CurvaturePackage, EngineError};
use crate::expr::{evaluate_jet, parse_expression, BinOp, EvalError, Expr, ParamMap, ParseContext, ParseError};
use crate::tensor::{kn_product, DenseTensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog metric {0:?}")]
    UnknownMetric(String),
    #[error("metric {metric} needs parameter {name:?}")]
    MissingParameter { metric: String, name: String },
    #[error("metric {metric} does not take parameter {name:?}")]
    UnexpectedParameter { metric: String, name: String },
    #[error("parameter {name:?}: {source}")]
    Parse { name: String, source: ParseError },
    #[error("parameter {name:?} = {value:?} is not a valid value")]
    InvalidValue { name: String, value: String },
    #[error("{name} may depend only on {allowed}, but uses x{}", .found + 1)]
    Dependency { name: String, allowed: &'static str, found: usize },
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Axis-aligned box from which sample points are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SampleBox {
    /// `[0.1, 0.9]^n`.
    pub fn unit(n: usize) -> Self {
        Self { lower: vec![0.1; n], upper: vec![0.9; n] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Shift one coordinate interval by `delta`.
    pub fn shifted(mut self, axis: usize, delta: f64) -> Self {
        self.lower[axis] += delta;
        self.upper[axis] += delta;
        self
    }
}

/// A chart together with its default sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogMetric {
    pub name: String,
    pub chart: MetricChart,
    pub sample_box: SampleBox,
}

pub const CATALOG_NAMES: [&str; 9] =
    ["flat", "sphere3", "met1", "met1-case-i", "met1-case-ii", "met1-case-iii", "met1-case-vi", "met2", "met2-block"];

/// `(f, h)` for the `met1` case presets.
pub fn met1_case(name: &str) -> Option<(&'static str, &'static str)> {
    match name {
        "met1-case-i" => Some(("exp(x1)", "exp(x1 + x2)")),
        "met1-case-ii" => Some(("exp(x1)", "1 + x1^2")),
        "met1-case-iii" => Some(("exp(x1)", "exp(-x1)")),
        "met1-case-vi" => Some(("1", "1")),
        _ => None,
    }
}

/// Build a catalog metric by name. `params` holds raw `--param` values:
/// expressions for `met1`'s `f` and `h`, reals otherwise.
pub fn build(name: &str, params: &BTreeMap<String, String>) -> Result<CatalogMetric, CatalogError> {
    let allow = |allowed: &[&str]| -> Result<(), CatalogError> {
        match params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CatalogError::UnexpectedParameter { metric: name.to_string(), name: k.clone() }),
            None => Ok(()),
        }
    };
    let (chart, sample_box) = match name {
        "flat" => {
            allow(&["dim"])?;
            let n = match params.get("dim") {
                Some(v) => v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| CatalogError::InvalidValue { name: "dim".into(), value: v.clone() })?,
                None => 4,
            };
            (flat(n)?, SampleBox::unit(n))
        }
        "sphere3" => {
            allow(&[])?;
            (sphere3(), SampleBox { lower: vec![0.5, 0.5, 0.0], upper: vec![2.5, 2.5, 6.0] })
        }
        "met1" => {
            allow(&["f", "h"])?;
            let get = |k: &str| {
                params
                    .get(k)
                    .ok_or_else(|| CatalogError::MissingParameter { metric: name.to_string(), name: k.to_string() })
            };
            (build_met1(get("f")?, get("h")?)?, SampleBox::unit(5))
        }
        "met2" => {
            allow(&[])?;
            (build_met2(), SampleBox::unit(6).shifted(4, 1.0))
        }
        "met2-block" => {
            allow(&[])?;
            (build_met2_block(), SampleBox::unit(3))
        }
        other => match met1_case(other) {
            Some((f, h)) => {
                allow(&[])?;
                (build_met1(f, h)?, SampleBox::unit(5))
            }
            None => return Err(CatalogError::UnknownMetric(other.to_string())),
        },
    };
    Ok(CatalogMetric { name: name.to_string(), chart, sample_box })
}

/// Identity metric in `n >= 3` dimensions.
pub fn flat(n: usize) -> Result<MetricChart, ChartError> {
    let mut chart = MetricChart::new(n)?;
    for i in 0..n {
        chart.set_component(i, i, Expr::constant(1.0))?;
    }
    Ok(chart)
}

/// `dx1² + sin²x1 (dx2² + sin²x2 dx3²)`, sectional curvature 1.
pub fn sphere3() -> MetricChart {
    let mut chart = MetricChart::new(3).expect("dimension 3");
    chart.set_component_str(0, 0, "1").expect("valid");
    chart.set_component_str(1, 1, "sin(x1)^2").expect("valid");
    chart.set_component_str(2, 2, "sin(x1)^2 * sin(x2)^2").expect("valid");
    chart.add_constraint_str("sin(x1) * sin(x2) > 0").expect("valid");
    chart
}

fn parse_restricted(name: &str, src: &str, allowed_upto: usize, allowed: &'static str) -> Result<Expr, CatalogError> {
    let ctx = ParseContext::with_dim(5);
    let e = parse_expression(src, &ctx).map_err(|source| CatalogError::Parse { name: name.to_string(), source })?;
    if let Some(&found) = e.variables().iter().find(|&&v| v >= allowed_upto) {
        return Err(CatalogError::Dependency { name: name.to_string(), allowed, found });
    }
    Ok(e)
}

/// `ds² = f [dx1² + dx2² + dx3² + dx4² + h dx5²]` with `f = f(x1)` and
/// `h = h(x1, x2)`.
pub fn build_met1(f_expr: &str, h_expr: &str) -> Result<MetricChart, CatalogError> {
    let f = parse_restricted("f", f_expr, 1, "x1")?;
    let h = parse_restricted("h", h_expr, 2, "x1, x2")?;
    let mut chart = MetricChart::new(5)?;
    for i in 0..4 {
        chart.set_component(i, i, f.clone())?;
    }
    chart.set_component(4, 4, Expr::binary(BinOp::Mul, f, h))?;
    Ok(chart)
}

/// `dx1² + e^{x1}(dx2² + dx3²) + dx4² + e^{x4} dx5² + e^{x4}(x5+1)² dx6²` on `x5 > 0`.
pub fn build_met2() -> MetricChart {
    let mut chart = MetricChart::new(6).expect("dimension 6");
    for (i, src) in ["1", "exp(x1)", "exp(x1)", "1", "exp(x4)", "exp(x4) * (x5 + 1)^2"].iter().enumerate() {
        chart.set_component_str(i, i, src).expect("valid component");
    }
    chart.add_constraint_str("x5 > 0").expect("valid constraint");
    chart
}

/// `dx1² + e^{x1}(dx2² + dx3²)`: constant sectional curvature `-1/4`.
pub fn build_met2_block() -> MetricChart {
    let mut chart = MetricChart::new(3).expect("dimension 3");
    for (i, src) in ["1", "exp(x1)", "exp(x1)"].iter().enumerate() {
        chart.set_component_str(i, i, src).expect("valid component");
    }
    chart
}

/// Expected nonzero components, 0-based, one representative per symmetry orbit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComponentTable {
    pub r: Vec<([usize; 4], f64)>,
    pub s: Vec<([usize; 2], f64)>,
}

impl ComponentTable {
    /// Expand into full tensors using the curvature and symmetric-pair rules.
    pub fn to_tensors(&self, n: usize) -> (DenseTensor, DenseTensor) {
        let mut r = DenseTensor::zeros(n, 4);
        for &([a, b, c, d], v) in &self.r {
            for (idx, sign) in [
                ([a, b, c, d], 1.0),
                ([b, a, c, d], -1.0),
                ([a, b, d, c], -1.0),
                ([b, a, d, c], 1.0),
                ([c, d, a, b], 1.0),
                ([d, c, a, b], -1.0),
                ([c, d, b, a], -1.0),
                ([d, c, b, a], 1.0),
            ] {
                r.set(&idx, sign * v);
            }
        }
        let mut s = DenseTensor::zeros(n, 2);
        for &([a, b], v) in &self.s {
            s.set(&[a, b], v);
            s.set(&[b, a], v);
        }
        (r, s)
    }
}

/// Values of `f, f', f''` and `h` with its first and second partials at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Met1Data {
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    pub h: f64,
    pub h1: f64,
    pub h2: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl Met1Data {
    pub fn from_expressions(f: &Expr, h: &Expr, point: &[f64]) -> Result<Self, EvalError> {
        let params = ParamMap::new();
        let fj = evaluate_jet(f, point, &params)?;
        let hj = evaluate_jet(h, point, &params)?;
        Ok(Self {
            f: fj.value(),
            fp: fj.d1(0),
            fpp: fj.d2(0, 0),
            h: hj.value(),
            h1: hj.d1(0),
            h2: hj.d1(1),
            h11: hj.d2(0, 0),
            h12: hj.d2(0, 1),
            h22: hj.d2(1, 1),
        })
    }
}

/// Closed-form nonzero `R` and `S` components of the `met1` family.
pub fn met1_oracle(d: &Met1Data) -> ComponentTable {
    let Met1Data { f, fp, fpp, h, h1, h2, h11, h12, h22 } = *d;
    let r1212 = (fp * fp - f * fpp) / (2.0 * f);
    let r2323 = -(fp * fp) / (4.0 * f);
    let r1515 = 0.25 * (-2.0 * h * fpp - h1 * fp + 2.0 * h * fp * fp / f + f * h1 * h1 / h - 2.0 * f * h11);
    let r1525 = 0.25 * f * (h1 * h2 / h - 2.0 * h12);
    let r2525 = 0.25 * f * (-(fp * (h * fp + f * h1)) / (f * f) + h2 * h2 / h - 2.0 * h22);
    let r3535 = -(fp * (h * fp + f * h1)) / (4.0 * f);

    let s11 = (-f * f * h1 * h1 + f * h * h1 * fp + 2.0 * h * (4.0 * f * h * fpp + f * f * h11 - 4.0 * h * fp * fp))
        / (4.0 * f * f * h * h);
    let s12 = -(h1 * h2 - 2.0 * h * h12) / (4.0 * h * h);
    let s22 = (h * (2.0 * f * h * fpp + 2.0 * f * f * h22 + f * h1 * fp + h * fp * fp) - f * f * h2 * h2)
        / (4.0 * f * f * h * h);
    let s33 = (2.0 * f * h * fpp + h * fp * fp + f * h1 * fp) / (4.0 * f * f * h);
    let s55 = (-f * f * (h1 * h1 + h2 * h2)
        + 2.0 * f * h * (2.0 * h1 * fp + f * (h11 + h22))
        + h * h * (2.0 * f * fpp + fp * fp))
        / (4.0 * f * f * h);

    ComponentTable {
        r: vec![
            ([0, 1, 0, 1], r1212),
            ([0, 2, 0, 2], r1212),
            ([0, 3, 0, 3], r1212),
            ([1, 2, 1, 2], r2323),
            ([1, 3, 1, 3], r2323),
            ([2, 3, 2, 3], r2323),
            ([0, 4, 0, 4], r1515),
            ([0, 4, 1, 4], r1525),
            ([1, 4, 1, 4], r2525),
            ([2, 4, 2, 4], r3535),
            ([3, 4, 3, 4], r3535),
        ],
        s: vec![([0, 0], s11), ([0, 1], s12), ([1, 1], s22), ([2, 2], s33), ([3, 3], s33), ([4, 4], s55)],
    }
}

/// Closed-form nonzero `R` and `S` components of `met2` at `point`.
pub fn met2_oracle(point: &[f64]) -> ComponentTable {
    let (e1, e4, x5) = (point[0].exp(), point[3].exp(), point[4]);
    let p = (x5 + 1.0) * (x5 + 1.0);
    ComponentTable {
        r: vec![
            ([0, 1, 0, 1], -e1 / 4.0),
            ([0, 2, 0, 2], -e1 / 4.0),
            ([1, 2, 1, 2], -e1 * e1 / 4.0),
            ([3, 4, 3, 4], -e4 / 4.0),
            ([3, 5, 3, 5], -e4 * p / 4.0),
            ([4, 5, 4, 5], -e4 * e4 * p / 4.0),
        ],
        s: vec![
            ([0, 0], 0.5),
            ([1, 1], e1 / 2.0),
            ([2, 2], e1 / 2.0),
            ([3, 3], 0.5),
            ([4, 4], e4 / 2.0),
            ([5, 5], 0.5 * e4 * p),
        ],
    }
}

/// Worst relative deviation of computed tensors from a component table:
/// listed components are compared relative to their own magnitude, all other
/// components relative to the largest listed magnitude.
pub fn table_deviation(table: &ComponentTable, r: &DenseTensor, s: &DenseTensor) -> f64 {
    let (r_exp, s_exp) = table.to_tensors(r.dim());
    let rel = |got: &DenseTensor, want: &DenseTensor| {
        let scale = want.max_abs().max(f64::MIN_POSITIVE);
        got.data()
            .iter()
            .zip(want.data())
            .map(|(g, w)| (g - w).abs() / if *w != 0.0 { w.abs() } else { scale })
            .fold(0.0f64, f64::max)
    };
    rel(r, &r_exp).max(rel(s, &s_exp))
}

/// Synthetic package with `R = c g∧g`.
pub fn constant_curvature_package(g: &DenseTensor, c: f64) -> Result<CurvaturePackage, EngineError> {
    let r = c * &kn_product(g, g)?;
    CurvaturePackage::from_algebraic(g.clone(), r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curvature_package;

    #[test]
    fn met2_engine_matches_table_at_shifted_origin() {
        let chart = build_met2();
        let p = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let pkg = curvature_package(&chart, &p).unwrap();
        assert!((pkg.r.at4(0, 1, 0, 1) + 0.25).abs() < 1e-15);
        assert!((pkg.s.at2(5, 5) - 2.0).abs() < 1e-14);
        assert!(table_deviation(&met2_oracle(&p), &pkg.r, &pkg.s) < 1e-12);
    }

    #[test]
    fn met2_domain_is_enforced() {
        let chart = build_met2();
        assert!(chart.check_admissible(&[0.0, 0.0, 0.0, 0.0, -0.5, 0.0]).is_err());
    }

    #[test]
    fn met1_oracle_trivial_cases() {
        let flat = Met1Data { f: 1.0, fp: 0.0, fpp: 0.0, h: 1.0, h1: 0.0, h2: 0.0, h11: 0.0, h12: 0.0, h22: 0.0 };
        let t = met1_oracle(&flat);
        assert!(t.r.iter().all(|(_, v)| *v == 0.0) && t.s.iter().all(|(_, v)| *v == 0.0));
        // f = exp(x1), h = 1 at x1 = 0
        let e = Met1Data { f: 1.0, fp: 1.0, fpp: 1.0, h: 1.0, ..flat };
        let t = met1_oracle(&e);
        assert_eq!(t.r[0].1, 0.0);
        assert_eq!(t.r[3].1, -0.25);
    }

    #[test]
    fn met1_engine_matches_table() {
        let chart = build_met1("exp(x1) + x1^2", "2 + sin(x1 * x2)").unwrap();
        let p = [0.3, 0.6, 0.2, 0.4, 0.5];
        let pkg = curvature_package(&chart, &p).unwrap();
        let f = chart.component(0, 0).unwrap();
        let h = parse_expression("2 + sin(x1 * x2)", &ParseContext::with_dim(5)).unwrap();
        let data = Met1Data::from_expressions(f, &h, &p).unwrap();
        let dev = table_deviation(&met1_oracle(&data), &pkg.r, &pkg.s);
        assert!(dev < 1e-9, "deviation {dev:e}");
    }

    #[test]
    fn met1_dependency_checked() {
        assert!(matches!(build_met1("x2", "1"), Err(CatalogError::Dependency { found: 1, .. })));
        assert!(matches!(build_met1("1", "x3"), Err(CatalogError::Dependency { found: 2, .. })));
        assert!(matches!(build_met1("2x1", "1"), Err(CatalogError::Parse { .. })));
    }

    #[test]
    fn catalog_names_build() {
        for name in CATALOG_NAMES {
            let mut params = BTreeMap::new();
            if name == "met1" {
                params.insert("f".to_string(), "exp(x1)".to_string());
                params.insert("h".to_string(), "1".to_string());
            }
            let m = build(name, &params).unwrap();
            assert_eq!(m.sample_box.dim(), m.chart.dim());
        }
        assert!(matches!(build("nope", &BTreeMap::new()), Err(CatalogError::UnknownMetric(_))));
        assert!(matches!(build("met1", &BTreeMap::new()), Err(CatalogError::MissingParameter { .. })));
    }

    #[test]
    fn sphere_ricci_sign_follows_conventions() {
        let pkg = curvature_package(&sphere3(), &[1.0, 1.2, 0.3]).unwrap();
        // K = 1: R = -(1/2) g∧g, S = -2g under the engine conventions
        for i in 0..3 {
            assert!((pkg.s.at2(i, i) + 2.0 * pkg.g.at2(i, i)).abs() < 1e-12);
        }
    }
}
