//! Metric charts: coordinate names, symmetric component expressions,
//! scalar parameters and an optional admissible-domain predicate.
//!
//! Charts can be read from a plain-text key–value document:
//!
//! ```text
//! # 3-dimensional block of a product metric
//! dim = 3
//! coordinates = x1, x2, x3
//! g[1][1] = 1
//! g[2][2] = exp(x1)
//! g[3][3] = c * exp(x1)
//! param.c = 1.0
//! domain = x1 > -5, x1 < 5
//! ```
//!
//! Indices in `g[i][j]` are 1-based; absent entries are zero and an entry
//! given once fills both `(i,j)` and `(j,i)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::{
    evaluate_jet, evaluate_value, parse_expression, EvalError, Expr, ParamMap, ParseContext, ParseError,
};
use crate::jet::Jet3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("chart dimension must be at least 3, got {0}")]
    Dimension(usize),
    #[error("expected {expected} coordinates, got {found}")]
    CoordinateCount { expected: usize, found: usize },
    #[error("component g[{i}][{j}]: {source}")]
    Component { i: usize, j: usize, source: ParseError },
    #[error("component g[{i}][{j}] conflicts with g[{j}][{i}]")]
    Asymmetric { i: usize, j: usize },
    #[error("index ({i},{j}) outside a {dim}-dimensional chart")]
    IndexOutOfRange { i: usize, j: usize, dim: usize },
    #[error("domain constraint {text:?}: {source}")]
    Constraint { text: String, source: ParseError },
    #[error("domain constraint {0:?} needs one of <, <=, >, >=")]
    ConstraintSyntax(String),
    #[error("point has {found} coordinates, chart has {expected}")]
    PointLength { expected: usize, found: usize },
    #[error("point violates domain constraint {0:?}")]
    Domain(String),
    #[error("evaluating g[{i}][{j}]: {source}")]
    Eval { i: usize, j: usize, source: EvalError },
    #[error("evaluating domain constraint {text:?}: {source}")]
    DomainEval { text: String, source: EvalError },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
    #[error("chart parameter {0:?} is not set")]
    MissingParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Less,
    LessEq,
    Greater,
    GreaterEq,
}

impl Comparison {
    fn symbol(self) -> &'static str {
        match self {
            Comparison::Less => "<",
            Comparison::LessEq => "<=",
            Comparison::Greater => ">",
            Comparison::GreaterEq => ">=",
        }
    }

    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Comparison::Less => a < b,
            Comparison::LessEq => a <= b,
            Comparison::Greater => a > b,
            Comparison::GreaterEq => a >= b,
        }
    }
}

/// One inequality `lhs <op> rhs` of the admissible domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub lhs: Expr,
    pub op: Comparison,
    pub rhs: Expr,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricChart {
    dim: usize,
    coordinates: Vec<String>,
    /// Row-major `dim x dim`, mirrored across the diagonal.
    components: Vec<Option<Expr>>,
    parameters: ParamMap,
    domain: Vec<Constraint>,
}

impl MetricChart {
    /// Empty (all-zero) chart with coordinates `x1..xn`.
    pub fn new(dim: usize) -> Result<Self, ChartError> {
        Self::with_coordinates((1..=dim).map(|i| format!("x{i}")).collect())
    }

    pub fn with_coordinates(coordinates: Vec<String>) -> Result<Self, ChartError> {
        let dim = coordinates.len();
        if dim < 3 {
            return Err(ChartError::Dimension(dim));
        }
        Ok(Self {
            dim,
            coordinates,
            components: vec![None; dim * dim],
            parameters: ParamMap::new(),
            domain: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn parameters(&self) -> &ParamMap {
        &self.parameters
    }

    pub fn domain(&self) -> &[Constraint] {
        &self.domain
    }

    pub fn parse_context(&self) -> ParseContext {
        ParseContext::new(&self.coordinates).with_parameters(self.parameters.keys())
    }

    pub fn set_parameter(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
    }

    /// Set `g_ij = g_ji` (0-based indices) from a parsed expression.
    pub fn set_component(&mut self, i: usize, j: usize, e: Expr) -> Result<(), ChartError> {
        if i >= self.dim || j >= self.dim {
            return Err(ChartError::IndexOutOfRange { i: i + 1, j: j + 1, dim: self.dim });
        }
        self.components[i * self.dim + j] = Some(e.clone());
        self.components[j * self.dim + i] = Some(e);
        Ok(())
    }

    /// Parse and set `g_ij = g_ji` (0-based indices).
    pub fn set_component_str(&mut self, i: usize, j: usize, src: &str) -> Result<(), ChartError> {
        let e = parse_expression(src, &self.parse_context()).map_err(|source| ChartError::Component {
            i: i + 1,
            j: j + 1,
            source,
        })?;
        self.set_component(i, j, e)
    }

    pub fn component(&self, i: usize, j: usize) -> Option<&Expr> {
        self.components[i * self.dim + j].as_ref()
    }

    /// Add a domain inequality such as `"x5 > 0"`.
    pub fn add_constraint_str(&mut self, text: &str) -> Result<(), ChartError> {
        let c = parse_constraint(text, &self.parse_context())?;
        self.domain.push(c);
        Ok(())
    }

    fn check_point(&self, point: &[f64]) -> Result<(), ChartError> {
        if point.len() != self.dim {
            return Err(ChartError::PointLength { expected: self.dim, found: point.len() });
        }
        Ok(())
    }

    /// Error if `point` lies outside the declared domain.
    pub fn check_admissible(&self, point: &[f64]) -> Result<(), ChartError> {
        self.check_point(point)?;
        for c in &self.domain {
            let text = c.to_string();
            let l = evaluate_value(&c.lhs, point, &self.parameters)
                .map_err(|source| ChartError::DomainEval { text: text.clone(), source })?;
            let r = evaluate_value(&c.rhs, point, &self.parameters)
                .map_err(|source| ChartError::DomainEval { text: text.clone(), source })?;
            if !c.op.holds(l, r) {
                return Err(ChartError::Domain(text));
            }
        }
        Ok(())
    }

    /// Third-order jets of every metric component at `point`, row-major.
    pub fn metric_jets(&self, point: &[f64]) -> Result<Vec<Jet3>, ChartError> {
        self.check_admissible(point)?;
        let n = self.dim;
        let mut out: Vec<Option<Jet3>> = vec![None; n * n];
        for i in 0..n {
            for j in i..n {
                let jet = match self.component(i, j) {
                    Some(e) => evaluate_jet(e, point, &self.parameters).map_err(|source| ChartError::Eval {
                        i: i + 1,
                        j: j + 1,
                        source,
                    })?,
                    None => Jet3::constant(n, 0.0),
                };
                out[j * n + i] = Some(jet.clone());
                out[i * n + j] = Some(jet);
            }
        }
        Ok(out.into_iter().map(|j| j.expect("filled above")).collect())
    }

    /// Every parameter referenced by a component or constraint must have a value.
    pub fn check_parameters(&self) -> Result<(), ChartError> {
        let referenced = self
            .components
            .iter()
            .flatten()
            .chain(self.domain.iter().flat_map(|c| [&c.lhs, &c.rhs]))
            .flat_map(|e| e.parameters());
        for p in referenced {
            if !self.parameters.contains_key(&p) {
                return Err(ChartError::MissingParameter(p));
            }
        }
        Ok(())
    }

    /// Render in the chart file format; [`parse_chart_file`] reads it back.
    pub fn to_chart_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dim = {}", self.dim);
        let _ = writeln!(s, "coordinates = {}", self.coordinates.join(", "));
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "param.{k} = {v:?}");
        }
        for i in 0..self.dim {
            for j in i..self.dim {
                if let Some(e) = self.component(i, j) {
                    let _ = writeln!(s, "g[{}][{}] = {}", i + 1, j + 1, e);
                }
            }
        }
        if !self.domain.is_empty() {
            let parts: Vec<String> = self.domain.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "domain = {}", parts.join(", "));
        }
        s
    }
}

fn parse_constraint(text: &str, ctx: &ParseContext) -> Result<Constraint, ChartError> {
    let ops = [
        ("<=", Comparison::LessEq),
        (">=", Comparison::GreaterEq),
        ("<", Comparison::Less),
        (">", Comparison::Greater),
    ];
    for (sym, op) in ops {
        if let Some(pos) = text.find(sym) {
            let err = |source| ChartError::Constraint { text: text.trim().to_string(), source };
            let lhs = parse_expression(&text[..pos], ctx).map_err(err)?;
            let rhs = parse_expression(&text[pos + sym.len()..], ctx).map_err(err)?;
            return Ok(Constraint { lhs, op, rhs });
        }
    }
    Err(ChartError::ConstraintSyntax(text.trim().to_string()))
}

/// Split on commas at parenthesis depth zero.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_index_key(key: &str) -> Option<(usize, usize)> {
    let rest = key.strip_prefix("g[")?;
    let (i, rest) = rest.split_once(']')?;
    let rest = rest.strip_prefix('[')?;
    let (j, tail) = rest.split_once(']')?;
    if !tail.is_empty() {
        return None;
    }
    Some((i.trim().parse().ok()?, j.trim().parse().ok()?))
}

/// Read a chart from the key–value text format described in the module docs.
pub fn parse_chart_file(text: &str) -> Result<MetricChart, ChartError> {
    let mut dim: Option<(usize, usize)> = None;
    let mut coords: Option<(Vec<String>, usize)> = None;
    let mut params = BTreeMap::new();
    let mut comps: Vec<(usize, usize, String, usize)> = Vec::new();
    let mut domain: Vec<(String, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let file_err = |message: String| ChartError::File { line: line_no, message };
        let (key, value) =
            line.split_once('=').ok_or_else(|| file_err(format!("expected `key = value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "dim" {
            let d = value.parse().map_err(|_| file_err(format!("invalid dim {value:?}")))?;
            dim = Some((d, line_no));
        } else if key == "coordinates" {
            let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
            if names.iter().any(|n| !is_identifier(n)) {
                return Err(file_err(format!("invalid coordinate list {value:?}")));
            }
            coords = Some((names, line_no));
        } else if let Some(name) = key.strip_prefix("param.") {
            if !is_identifier(name) {
                return Err(file_err(format!("invalid parameter name {name:?}")));
            }
            let v: f64 = value.parse().map_err(|_| file_err(format!("invalid real {value:?} for {name}")))?;
            params.insert(name.to_string(), v);
        } else if key == "domain" {
            domain.extend(split_top_level(value).into_iter().map(|c| (c.trim().to_string(), line_no)));
        } else if let Some((i, j)) = parse_index_key(key) {
            comps.push((i, j, value.to_string(), line_no));
        } else {
            return Err(file_err(format!("unknown key {key:?}")));
        }
    }

    let coordinates = match (dim, coords) {
        (Some((d, line)), Some((names, _))) if names.len() != d => {
            return Err(ChartError::File { line, message: format!("dim = {d} but {} coordinates listed", names.len()) })
        }
        (_, Some((names, _))) => names,
        (Some((d, _)), None) => (1..=d).map(|i| format!("x{i}")).collect(),
        (None, None) => return Err(ChartError::File { line: 0, message: "missing `dim`".into() }),
    };
    let mut chart = MetricChart::with_coordinates(coordinates)?;
    chart.parameters = params;
    let n = chart.dim;
    let ctx = chart.parse_context();
    let mut seen: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
    for (i, j, src, line) in comps {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(ChartError::File { line, message: format!("index g[{i}][{j}] outside 1..={n}") });
        }
        let e = parse_expression(&src, &ctx).map_err(|source| ChartError::Component { i, j, source })?;
        let key = (i.min(j), i.max(j));
        if let Some(prev) = seen.get(&key) {
            if *prev != e {
                return Err(ChartError::Asymmetric { i, j });
            }
        }
        seen.insert(key, e.clone());
        chart.set_component(i - 1, j - 1, e)?;
    }
    for (text, _) in domain {
        let c = parse_constraint(&text, &ctx)?;
        chart.domain.push(c);
    }
    Ok(chart)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
