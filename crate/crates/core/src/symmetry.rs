//! Semisymmetry (`D·T = 0`), pseudosymmetry (`D·T = L Q(A,T)`) and local
//! symmetry (`∇R = 0`, `∇S = 0`) checks on a curvature package.

use serde::{Deserialize, Serialize};

use crate::classify::{Tolerances, Verdict};
use crate::curvature::CurvaturePackage;
use crate::tensor::{
    curvature_action, curvature_action_raised, mu_action, q_product, DenseTensor, OneForm, TensorError, Vector,
};

const GUARD: f64 = 1e-300;

/// `‖D·T‖ / (‖D‖ ‖g⁻¹‖ ‖T‖)`.
pub fn semisymmetry_residual(d: &DenseTensor, g: &DenseTensor, t: &DenseTensor) -> Result<f64, TensorError> {
    let g_inv = crate::tensor::inverse_metric(g)?;
    let action = curvature_action(d, g, t)?;
    Ok(action.norm() / (d.norm() * g_inv.norm() * t.norm()).max(GUARD))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PseudoStatus {
    Holds,
    Fails,
    /// Residual between the accept and reject tolerances.
    Borderline,
    /// The right-hand side vanishes: the condition says nothing here.
    Indeterminate,
}

impl PseudoStatus {
    pub fn is_determinate(self) -> bool {
        matches!(self, PseudoStatus::Holds | PseudoStatus::Fails)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudosymmetryVerdict {
    /// Fitted proportionality factor; absent when the right side vanishes.
    pub l: Option<f64>,
    pub residual: f64,
    pub status: PseudoStatus,
}

/// Fit `lhs = L rhs`. `scale` is the magnitude against which `‖rhs‖` is
/// judged negligible (`‖rhs‖ < tols.floor * scale`).
pub fn pseudosymmetry_fit(
    lhs: &DenseTensor,
    rhs: &DenseTensor,
    scale: f64,
    tols: &Tolerances,
) -> Result<PseudosymmetryVerdict, TensorError> {
    lhs.same_shape(rhs)?;
    let rn = rhs.norm();
    if rn < tols.floor * scale || rn == 0.0 {
        return Ok(PseudosymmetryVerdict {
            l: None,
            residual: lhs.norm() / scale.max(GUARD),
            status: PseudoStatus::Indeterminate,
        });
    }
    let l = lhs.dot(rhs) / (rn * rn);
    let residual = lhs.axpy(-l, rhs).norm() / lhs.norm().max(rn).max(GUARD);
    let status = match tols.verdict(residual) {
        Verdict::Holds => PseudoStatus::Holds,
        Verdict::Fails => PseudoStatus::Fails,
        Verdict::Indeterminate => PseudoStatus::Borderline,
    };
    Ok(PseudosymmetryVerdict { l: Some(l), residual, status })
}

/// `(‖∇R‖/‖R‖, ‖∇S‖/‖S‖)`, or `None` for packages without derivative data.
/// A vanishing tensor with vanishing derivative gives 0.
pub fn local_symmetry_residuals(pkg: &CurvaturePackage) -> Option<(f64, f64)> {
    let ratio = |d: &DenseTensor, t: &DenseTensor| {
        let dn = d.norm();
        if dn == 0.0 {
            0.0
        } else {
            dn / t.norm().max(GUARD)
        }
    };
    Some((ratio(pkg.nabla_r.as_ref()?, &pkg.r), ratio(pkg.nabla_s.as_ref()?, &pkg.s)))
}

/// `‖μ_X·T‖ / (‖μ‖ ‖X‖ ‖T‖)`.
pub fn mu_residual(mu: &OneForm, x: &Vector, t: &DenseTensor) -> Result<f64, TensorError> {
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let out = mu_action(mu, x, t)?;
    Ok(out.norm() / (norm(&mu.0) * norm(&x.0) * t.norm()).max(GUARD))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvatureKind {
    R,
    C,
    W,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    R,
    S,
    C,
}

impl CurvatureKind {
    pub const ALL: [CurvatureKind; 4] = [CurvatureKind::R, CurvatureKind::C, CurvatureKind::W, CurvatureKind::K];

    fn tensor(self, pkg: &CurvaturePackage) -> &DenseTensor {
        match self {
            CurvatureKind::R => &pkg.r,
            CurvatureKind::C => &pkg.c,
            CurvatureKind::W => &pkg.w,
            CurvatureKind::K => &pkg.k,
        }
    }
}

impl TargetKind {
    pub const ALL: [TargetKind; 3] = [TargetKind::R, TargetKind::S, TargetKind::C];

    /// Magnitude used to normalize residuals: the tensor's own norm, but never
    /// below the size it would have if built from `R` (so that a tensor that
    /// vanishes up to roundoff does not inflate the ratio).
    fn scale(self, pkg: &CurvaturePackage) -> f64 {
        let r = pkg.r.norm();
        match self {
            TargetKind::R => r,
            TargetKind::S => pkg.s.norm().max(pkg.g_inv.norm() * r),
            TargetKind::C => pkg.c.norm().max(r),
        }
    }

    fn tensor(self, pkg: &CurvaturePackage) -> &DenseTensor {
        match self {
            TargetKind::R => &pkg.r,
            TargetKind::S => &pkg.s,
            TargetKind::C => &pkg.c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemisymmetryRow {
    pub d: CurvatureKind,
    pub t: TargetKind,
    pub residual: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudosymmetryRow {
    pub d: CurvatureKind,
    pub t: TargetKind,
    /// `g` for the Deszcz-type condition, `S` for the Ricci-generalized one.
    pub a: String,
    pub verdict: PseudosymmetryVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceTable {
    pub semisymmetry: Vec<SemisymmetryRow>,
    pub pseudosymmetry: Vec<PseudosymmetryRow>,
    /// Whether the implication checks below were applied (the package is of
    /// generalized Roter type).
    pub implications_checked: bool,
    /// Implications violated beyond tolerance.
    pub violations: Vec<String>,
}

impl EquivalenceTable {
    pub fn semi(&self, d: CurvatureKind, t: TargetKind) -> &SemisymmetryRow {
        self.semisymmetry.iter().find(|r| r.d == d && r.t == t).expect("all pairs present")
    }

    pub fn pseudo(&self, d: CurvatureKind, t: TargetKind, a: &str) -> Option<&PseudosymmetryRow> {
        self.pseudosymmetry.iter().find(|r| r.d == d && r.t == t && r.a == a)
    }
}

/// Semisymmetry and pseudosymmetry verdicts for every `D ∈ {R, C, W, K}`
/// acting on `T ∈ {R, S, C}`, plus `R·R` against `Q(S,R)`.
///
/// When `is_grt` is set, checks that on a generalized Roter type package the
/// condition on `R` and on `S` agree for each `D` (same verdict, and the same
/// `L` to `1e-6` relative), and that `D·S = 0` forces `D·C = 0`.
pub fn equivalence_matrix(
    pkg: &CurvaturePackage,
    is_grt: bool,
    tols: &Tolerances,
) -> Result<EquivalenceTable, TensorError> {
    let g_inv = &pkg.g_inv;
    let r_norm = pkg.r.norm();
    let mut semisymmetry = Vec::new();
    let mut pseudosymmetry = Vec::new();
    for d_kind in CurvatureKind::ALL {
        let d = d_kind.tensor(pkg);
        let d_scale = d.norm().max(r_norm);
        for t_kind in TargetKind::ALL {
            let t = t_kind.tensor(pkg);
            let t_scale = t_kind.scale(pkg);
            let action = curvature_action_raised(d, g_inv, t)?;
            let residual = action.norm() / (d_scale * g_inv.norm() * t_scale).max(GUARD);
            semisymmetry.push(SemisymmetryRow { d: d_kind, t: t_kind, residual, verdict: tols.verdict(residual) });
            let q = q_product(&pkg.g, t)?;
            let scale = pkg.g.norm() * t_scale;
            let verdict = pseudosymmetry_fit(&action, &q, scale, tols)?;
            pseudosymmetry.push(PseudosymmetryRow { d: d_kind, t: t_kind, a: "g".into(), verdict });
        }
    }
    let rr = curvature_action_raised(&pkg.r, g_inv, &pkg.r)?;
    let qsr = q_product(&pkg.s, &pkg.r)?;
    let verdict = pseudosymmetry_fit(&rr, &qsr, pkg.s.norm() * pkg.r.norm(), tols)?;
    pseudosymmetry.push(PseudosymmetryRow { d: CurvatureKind::R, t: TargetKind::R, a: "S".into(), verdict });

    let mut table =
        EquivalenceTable { semisymmetry, pseudosymmetry, implications_checked: is_grt, violations: Vec::new() };
    if is_grt {
        table.violations = implication_violations(&table);
    }
    Ok(table)
}

fn implication_violations(table: &EquivalenceTable) -> Vec<String> {
    let mut out = Vec::new();
    for d in CurvatureKind::ALL {
        let (on_r, on_s, on_c) =
            (table.semi(d, TargetKind::R), table.semi(d, TargetKind::S), table.semi(d, TargetKind::C));
        let determinate = |v: Verdict| v != Verdict::Indeterminate;
        if determinate(on_r.verdict) && determinate(on_s.verdict) && on_r.verdict != on_s.verdict {
            out.push(format!(
                "{d:?}·R = 0 is {:?} but {d:?}·S = 0 is {:?} (residuals {:.3e}, {:.3e})",
                on_r.verdict, on_s.verdict, on_r.residual, on_s.residual
            ));
        }
        if on_s.verdict == Verdict::Holds && on_c.verdict == Verdict::Fails {
            out.push(format!("{d:?}·S = 0 holds but {d:?}·C = 0 fails (residual {:.3e})", on_c.residual));
        }
        let (pr, ps) = (
            &table.pseudo(d, TargetKind::R, "g").expect("present").verdict,
            &table.pseudo(d, TargetKind::S, "g").expect("present").verdict,
        );
        if pr.status.is_determinate() && ps.status.is_determinate() {
            if pr.status != ps.status {
                out.push(format!("{d:?}·R = L Q(g,R) is {:?} but {d:?}·S = L Q(g,S) is {:?}", pr.status, ps.status));
            } else if pr.status == PseudoStatus::Holds {
                let (a, b) = (pr.l.unwrap_or(0.0), ps.l.unwrap_or(0.0));
                if (a - b).abs() > 1e-6 * a.abs().max(b.abs()).max(1e-12) {
                    out.push(format!("{d:?}: pseudosymmetry factors differ on R and S ({a:e} vs {b:e})"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_met2, constant_curvature_package};
    use crate::curvature::curvature_package;
    use crate::tensor::kn_product;

    #[test]
    fn metric_is_annihilated() {
        let g = DenseTensor::diagonal(&[1.0, -2.0, 0.5]);
        let s = DenseTensor::sym2(3, vec![1.0, 0.2, 0.0, 0.2, -1.0, 0.3, 0.0, 0.3, 2.0]).unwrap();
        let d = kn_product(&g, &s).unwrap();
        assert!(semisymmetry_residual(&d, &g, &g).unwrap() < 1e-15);
    }

    #[test]
    fn constant_curvature_rows() {
        let g = DenseTensor::diagonal(&[1.0, 2.0, 3.0, 1.5]);
        let pkg = constant_curvature_package(&g, -0.3).unwrap();
        let tols = Tolerances::default();
        let table = equivalence_matrix(&pkg, true, &tols).unwrap();
        assert!(table.semisymmetry.iter().all(|r| r.verdict == Verdict::Holds));
        let deszcz = &table.pseudo(CurvatureKind::R, TargetKind::R, "g").unwrap().verdict;
        assert_eq!(deszcz.status, PseudoStatus::Indeterminate);
        assert!(table.violations.is_empty());
    }

    #[test]
    fn proportional_fit() {
        let rhs = DenseTensor::diagonal(&[1.0, 2.0, 3.0]);
        let lhs = 2.0 * &rhs;
        let v = pseudosymmetry_fit(&lhs, &rhs, 1.0, &Tolerances::default()).unwrap();
        assert_eq!(v.l, Some(2.0));
        assert_eq!(v.residual, 0.0);
        assert_eq!(v.status, PseudoStatus::Holds);
    }

    #[test]
    fn met2_is_locally_symmetric() {
        let pkg = curvature_package(&build_met2(), &[0.1, 0.4, 0.2, 0.3, 1.5, 0.6]).unwrap();
        let (a, b) = local_symmetry_residuals(&pkg).unwrap();
        assert!(a < 1e-8 && b < 1e-8);
        let table = equivalence_matrix(&pkg, false, &Tolerances::default()).unwrap();
        assert!(table.semi(CurvatureKind::R, TargetKind::S).residual < 1e-9);
        assert_eq!(table.semi(CurvatureKind::R, TargetKind::R).verdict, Verdict::Holds);
        assert_eq!(table.semi(CurvatureKind::R, TargetKind::C).verdict, Verdict::Holds);
    }

    #[test]
    fn mu_residual_vanishes_for_zero_form() {
        let t = DenseTensor::identity(3);
        let r = mu_residual(&OneForm(vec![0.0; 3]), &Vector(vec![1.0, 0.0, 0.0]), &t).unwrap();
        assert_eq!(r, 0.0);
    }
}
