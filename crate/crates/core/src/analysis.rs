//! End-to-end analysis: build a chart, sample points, run the engine,
//! classifier and symmetry checks at each point, and aggregate.
//!
//! The JSON rendering is the canonical report; [`render_text`] is a
//! projection of the same JSON value.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, SampleBox};
use crate::chart::{parse_chart_file, MetricChart};
use crate::classify::{
    classify_curvature_form, einstein_level, quasi_constant_curvature, quasi_einstein, CurvatureClass, CurvatureForm,
    EinsteinVerdict, QuasiConstantCurvature, QuasiDecomposition, Tolerances, Verdict,
};
use crate::curvature::curvature_package;
use crate::symmetry::{equivalence_matrix, local_symmetry_residuals, EquivalenceTable};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum ChartSource {
    /// Catalog name plus raw `--param` values.
    Catalog { name: String, params: BTreeMap<String, String> },
    /// Chart file plus real-valued parameter overrides.
    File { path: PathBuf, params: BTreeMap<String, String> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleSpec {
    Points(Vec<Vec<f64>>),
    /// `count` uniform points from `sample_box` (the chart's default box when absent).
    Random {
        count: usize,
        sample_box: Option<SampleBox>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub source: ChartSource,
    pub samples: SampleSpec,
    pub tolerances: Tolerances,
    pub format: OutputFormat,
    pub seed: u64,
    /// Any per-point engine failure aborts the analysis.
    pub strict: bool,
}

impl AnalysisConfig {
    pub fn catalog(name: &str) -> Self {
        Self {
            source: ChartSource::Catalog { name: name.to_string(), params: BTreeMap::new() },
            samples: SampleSpec::Random { count: DEFAULT_SAMPLES, sample_box: None },
            tolerances: Tolerances::default(),
            format: OutputFormat::Json,
            seed: 0,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("engine error: {0}")]
    Engine(String),
}

impl AnalysisError {
    /// Process exit code: 2 for engine failures, 3 for configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            AnalysisError::Engine(_) => 2,
            AnalysisError::Config(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSymmetry {
    pub nabla_r_ratio: f64,
    pub nabla_s_ratio: f64,
    pub locally_symmetric: Verdict,
    pub ricci_symmetric: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    pub kappa: f64,
    pub kappa2: f64,
    pub curvature_form: CurvatureForm,
    pub curvature_label: String,
    pub einstein: EinsteinVerdict,
    pub quasi_einstein: Option<QuasiDecomposition>,
    pub quasi_constant_curvature: Option<QuasiConstantCurvature>,
    pub local_symmetry: Option<LocalSymmetry>,
    pub symmetry: EquivalenceTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub point: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub summary: String,
    pub modal_class: String,
    pub class_counts: BTreeMap<String, usize>,
    /// Indices of points whose class differs from the modal one.
    pub class_disagreements: Vec<usize>,
    pub modal_einstein_level: String,
    /// `0` for Ricci flat, `k` for `Ein(k)`, absent when no relation was found.
    pub modal_einstein_number: Option<u8>,
    pub einstein_counts: BTreeMap<String, usize>,
    pub einstein_disagreements: Vec<usize>,
    pub kappa: Spread,
    /// Per-coefficient spread of the fit that decided the modal class.
    pub coefficient_spreads: Vec<Spread>,
    pub implication_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub metric: String,
    pub dim: usize,
    pub coordinates: Vec<String>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub points: Vec<PointRecord>,
    pub failures: Vec<PointFailure>,
    pub aggregate: Option<Aggregate>,
}

/// Resolve the chart and default sample box for a configuration.
pub fn resolve_chart(source: &ChartSource) -> Result<(String, MetricChart, SampleBox), AnalysisError> {
    match source {
        ChartSource::Catalog { name, params } => {
            let m = catalog::build(name, params).map_err(|e| AnalysisError::Config(e.to_string()))?;
            Ok((m.name, m.chart, m.sample_box))
        }
        ChartSource::File { path, params } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| AnalysisError::Config(format!("reading {}: {e}", path.display())))?;
            let mut chart =
                parse_chart_file(&text).map_err(|e| AnalysisError::Config(format!("{}: {e}", path.display())))?;
            for (k, v) in params {
                let value: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| AnalysisError::Config(format!("parameter {k} = {v:?} is not a real number")))?;
                chart.set_parameter(k, value);
            }
            chart.check_parameters().map_err(|e| AnalysisError::Config(e.to_string()))?;
            let n = chart.dim();
            Ok((path.display().to_string(), chart, SampleBox::unit(n)))
        }
    }
}

fn sample_points(
    spec: &SampleSpec,
    default_box: &SampleBox,
    dim: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, AnalysisError> {
    match spec {
        SampleSpec::Points(points) => {
            if points.is_empty() {
                return Err(AnalysisError::Config("no sample points".into()));
            }
            if let Some(p) = points.iter().find(|p| p.len() != dim) {
                return Err(AnalysisError::Config(format!("point {p:?} has {} coordinates, chart has {dim}", p.len())));
            }
            Ok(points.clone())
        }
        SampleSpec::Random { count, sample_box } => {
            if *count == 0 {
                return Err(AnalysisError::Config("sample count must be at least 1".into()));
            }
            let b = sample_box.as_ref().unwrap_or(default_box);
            if b.dim() != dim || b.upper.len() != dim {
                return Err(AnalysisError::Config(format!("sample box has dimension {}, chart has {dim}", b.dim())));
            }
            if b.lower.iter().zip(&b.upper).any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
                return Err(AnalysisError::Config("sample box bounds must be finite with lower <= upper".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..*count)
                .map(|_| {
                    b.lower
                        .iter()
                        .zip(&b.upper)
                        .map(|(lo, hi)| if lo == hi { *lo } else { rng.random_range(*lo..*hi) })
                        .collect()
                })
                .collect())
        }
    }
}

/// Run every pointwise check at `point`.
pub fn analyze_point(chart: &MetricChart, point: &[f64], tols: &Tolerances) -> Result<PointRecord, String> {
    let pkg = curvature_package(chart, point).map_err(|e| e.to_string())?;
    let form = classify_curvature_form(&pkg, tols).map_err(|e| e.to_string())?;
    let einstein = einstein_level(&pkg, tols).map_err(|e| e.to_string())?;
    let qe = quasi_einstein(&pkg, tols);
    let qcc = match &qe {
        Some(q) if !q.degenerate => Some(quasi_constant_curvature(&pkg, &q.eta, tols).map_err(|e| e.to_string())?),
        _ => None,
    };
    let local_symmetry = local_symmetry_residuals(&pkg).map(|(a, b)| LocalSymmetry {
        nabla_r_ratio: a,
        nabla_s_ratio: b,
        locally_symmetric: tols.verdict(a),
        ricci_symmetric: tols.verdict(b),
    });
    let is_grt = form.generalized.membership == Verdict::Holds;
    let symmetry = equivalence_matrix(&pkg, is_grt, tols).map_err(|e| e.to_string())?;
    Ok(PointRecord {
        point: point.to_vec(),
        kappa: pkg.kappa,
        kappa2: pkg.kappa2,
        curvature_label: form.label(),
        curvature_form: form,
        einstein,
        quasi_einstein: qe,
        quasi_constant_curvature: qcc,
        local_symmetry,
        symmetry,
    })
}

fn modal(labels: &[String]) -> (String, BTreeMap<String, usize>, Vec<usize>) {
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l.clone()).or_insert(0usize) += 1;
    }
    // Ties resolve to the first label in sorted order.
    let best = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(k, _)| k.clone()).unwrap_or_default();
    let disagree = labels.iter().enumerate().filter(|(_, l)| **l != best).map(|(i, _)| i).collect();
    (best, counts, disagree)
}

fn spread(values: impl Iterator<Item = f64>) -> Spread {
    values.fold(Spread { min: f64::INFINITY, max: f64::NEG_INFINITY }, |s, v| Spread {
        min: s.min.min(v),
        max: s.max.max(v),
    })
}

fn aggregate(points: &[PointRecord]) -> Option<Aggregate> {
    if points.is_empty() {
        return None;
    }
    let labels: Vec<String> = points.iter().map(|p| p.curvature_label.clone()).collect();
    let (modal_class, class_counts, class_disagreements) = modal(&labels);
    let levels: Vec<String> = points.iter().map(|p| p.einstein.level.label()).collect();
    let (modal_einstein_level, einstein_counts, einstein_disagreements) = modal(&levels);
    let modal_einstein_number = points
        .iter()
        .find(|p| p.einstein.level.label() == modal_einstein_level)
        .and_then(|p| p.einstein.level.number());
    let modal_kind =
        points[labels.iter().position(|l| *l == modal_class).expect("modal label present")].curvature_form.class;
    let fit_of = |p: &PointRecord| match modal_kind {
        CurvatureClass::ConstantCurvature => Some(p.curvature_form.constant.coefficients.clone()),
        CurvatureClass::ConformallyFlat => Some(p.curvature_form.conformal.coefficients.clone()),
        CurvatureClass::RoterType => Some(p.curvature_form.roter.coefficients.clone()),
        CurvatureClass::GeneralizedRoterType => Some(p.curvature_form.generalized.coefficients.clone()),
        CurvatureClass::Flat | CurvatureClass::NotGrt => None,
    };
    let coeffs: Vec<Vec<f64>> =
        points.iter().zip(&labels).filter(|(_, l)| **l == modal_class).filter_map(|(p, _)| fit_of(p)).collect();
    let coefficient_spreads = match coeffs.first() {
        Some(first) => (0..first.len()).map(|i| spread(coeffs.iter().map(|c| c[i]))).collect(),
        None => Vec::new(),
    };
    let mut summary = format!("{modal_class}; {modal_einstein_level}");
    if modal_kind == CurvatureClass::NotGrt {
        let r = spread(points.iter().map(|p| p.curvature_form.generalized.relative_residual));
        summary = format!("{modal_class} (residual {:.3e}..{:.3e}); {modal_einstein_level}", r.min, r.max);
    }
    if !class_disagreements.is_empty() || !einstein_disagreements.is_empty() {
        summary.push_str(&format!(
            "; {} class and {} level disagreements",
            class_disagreements.len(),
            einstein_disagreements.len()
        ));
    }
    Some(Aggregate {
        summary,
        modal_class,
        class_counts,
        class_disagreements,
        modal_einstein_level,
        modal_einstein_number,
        einstein_counts,
        einstein_disagreements,
        kappa: spread(points.iter().map(|p| p.kappa)),
        coefficient_spreads,
        implication_violations: points.iter().map(|p| p.symmetry.violations.len()).sum(),
    })
}

/// Run the full analysis. Deterministic for a given configuration and seed.
pub fn analyze(config: &AnalysisConfig) -> Result<ClassificationReport, AnalysisError> {
    config.tolerances.validate().map_err(|e| AnalysisError::Config(e.to_string()))?;
    let (metric, chart, default_box) = resolve_chart(&config.source)?;
    let points = sample_points(&config.samples, &default_box, chart.dim(), config.seed)?;
    let tols = config.tolerances;
    let results: Vec<Result<PointRecord, String>> =
        points.par_iter().map(|p| analyze_point(&chart, p, &tols)).collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (p, r) in points.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(error) => failures.push(PointFailure { point: p.clone(), error }),
        }
    }
    if let Some(f) = failures.first() {
        if config.strict || records.is_empty() {
            return Err(AnalysisError::Engine(format!("at {:?}: {}", f.point, f.error)));
        }
    }
    Ok(ClassificationReport {
        schema_version: SCHEMA_VERSION,
        metric,
        dim: chart.dim(),
        coordinates: chart.coordinates().to_vec(),
        seed: config.seed,
        tolerances: tols,
        aggregate: aggregate(&records),
        points: records,
        failures,
    })
}

/// Writes every float with 17 significant digits.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", format_float(value))
    }
}

fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
        self.serialize(&mut ser).expect("report serializes");
        String::from_utf8(out).expect("JSON is UTF-8")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Plain-text projection of the JSON report: a summary followed by one
/// `path = value` line per leaf.
pub fn render_text(report: &ClassificationReport) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut out = String::new();
    out.push_str(&format!("metric {} (dim {}), {} points", report.metric, report.dim, report.points.len()));
    if !report.failures.is_empty() {
        out.push_str(&format!(", {} failed", report.failures.len()));
    }
    out.push('\n');
    if let Some(a) = &report.aggregate {
        out.push_str(&format!("summary: {}\n", a.summary));
    }
    out.push('\n');
    walk(&value, String::new(), &mut out);
    out
}

fn walk(v: &serde_json::Value, path: String, out: &mut String) {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(child, p, out);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str(&format!("{path} = []\n"));
            }
            for (i, child) in items.iter().enumerate() {
                walk(child, format!("{path}[{i}]"), out);
            }
        }
        Value::Number(n) => {
            let text = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) if !n.is_f64() => u.to_string(),
                (_, Some(i), _) if !n.is_f64() => i.to_string(),
                (_, _, Some(f)) => format_float(f),
                _ => n.to_string(),
            };
            out.push_str(&format!("{path} = {text}\n"));
        }
        Value::String(s) => out.push_str(&format!("{path} = {s}\n")),
        Value::Bool(b) => out.push_str(&format!("{path} = {b}\n")),
        Value::Null => out.push_str(&format!("{path} = null\n")),
    }
}

/// Render in the configured format.
pub fn render(report: &ClassificationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Text => render_text(report),
    }
}
