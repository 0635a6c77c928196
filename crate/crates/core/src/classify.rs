//! Pointwise structure detection: curvature-form hierarchy, Ricci-level
//! (Einstein) hierarchy, quasi-Einstein and quasi-constant-curvature
//! decompositions, and the coefficient relations that tie them together.
//!
//! Membership is decided by least-squares fits of flattened tensors. A fit
//! with relative residual below `accept` is a member, above `reject` a
//! non-member, and anything between is reported as indeterminate.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::CurvaturePackage;
use crate::linalg::min_norm_solve;
use crate::tensor::{kn_product, DenseTensor, TensorError};

/// Singular values below this fraction of the largest are treated as zero.
pub const SVD_CUTOFF: f64 = 1e-10;
const RESIDUAL_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("empty basis")]
    EmptyBasis,
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("package is not Einstein (level {0})")]
    NotEinstein(String),
    #[error("package is not of constant curvature (residual {0:.3e})")]
    NotConstantCurvature(f64),
    #[error("scalar curvature vanishes; the relation is vacuous")]
    ZeroScalarCurvature,
    #[error("coefficient of S∧S must be nonzero")]
    ZeroTopCoefficient,
    #[error("invalid tolerances: accept {accept} must be below reject {reject}")]
    Tolerances { accept: f64, reject: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub accept: f64,
    pub reject: f64,
    /// Relative size below which the right-hand side of a pseudosymmetry
    /// condition counts as zero.
    pub floor: f64,
    /// Relative gap within which eigenvalues are clustered together.
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { accept: 1e-8, reject: 1e-4, floor: 1e-10, cluster: 1e-6 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if self.accept > 0.0 && self.accept < self.reject && self.reject.is_finite() {
            Ok(())
        } else {
            Err(ClassifyError::Tolerances { accept: self.accept, reject: self.reject })
        }
    }

    pub fn verdict(&self, residual: f64) -> Verdict {
        if residual < self.accept {
            Verdict::Holds
        } else if residual > self.reject {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Determinate,
    /// The basis is linearly dependent; see `kernel_basis`.
    Degenerate,
    /// Every basis tensor is numerically zero.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Minimum-norm coefficients, one per basis tensor.
    pub coefficients: Vec<f64>,
    pub relative_residual: f64,
    /// Orthonormal basis of the coefficient null space.
    pub kernel_basis: Vec<Vec<f64>>,
    pub status: FitStatus,
    pub membership: Verdict,
}

impl FitResult {
    /// True when the coefficient at `index` is the same for every solution.
    pub fn coefficient_is_determined(&self, index: usize) -> bool {
        self.kernel_basis.iter().all(|v| v[index].abs() < 1e-8)
    }
}

/// Least-squares fit of `target ≈ Σ c_i basis_i` over flattened components.
pub fn fit_linear_combination(
    target: &DenseTensor,
    basis: &[&DenseTensor],
    tols: &Tolerances,
) -> Result<FitResult, ClassifyError> {
    if basis.is_empty() {
        return Err(ClassifyError::EmptyBasis);
    }
    for b in basis {
        target.same_shape(b)?;
    }
    let rows = target.data().len();
    let a = DMatrix::from_fn(rows, basis.len(), |r, c| basis[c].data()[r]);
    let sol = min_norm_solve(&a, target.data(), SVD_CUTOFF);
    let mut fitted = vec![0.0; rows];
    for (c, b) in basis.iter().enumerate() {
        for (f, v) in fitted.iter_mut().zip(b.data()) {
            *f += sol.solution[c] * v;
        }
    }
    let resid: f64 = fitted.iter().zip(target.data()).map(|(f, t)| (t - f) * (t - f)).sum::<f64>().sqrt();
    let relative_residual = resid / target.norm().max(RESIDUAL_GUARD);
    let status = if sol.sigma_max <= f64::MIN_POSITIVE {
        FitStatus::Indeterminate
    } else if sol.kernel.is_empty() {
        FitStatus::Determinate
    } else {
        FitStatus::Degenerate
    };
    Ok(FitResult {
        coefficients: sol.solution,
        relative_residual,
        kernel_basis: sol.kernel,
        status,
        membership: tols.verdict(relative_residual),
    })
}

/// Orthonormal basis of the null space of the matrix whose columns are the
/// flattened `family` members.
pub fn family_kernel(family: &[&DenseTensor]) -> Vec<Vec<f64>> {
    let rows = family[0].data().len();
    let a = DMatrix::from_fn(rows, family.len(), |r, c| family[c].data()[r]);
    min_norm_solve(&a, &vec![0.0; rows], SVD_CUTOFF).kernel
}

/// The six Kulkarni–Nomizu products of `{g, S, S²}` in the order
/// `g∧g, g∧S, S∧S, g∧S², S∧S², S²∧S²`.
pub fn grt_basis(pkg: &CurvaturePackage) -> Result<[DenseTensor; 6], TensorError> {
    let (g, s, s2) = (&pkg.g, &pkg.s, &pkg.s2);
    Ok([
        kn_product(g, g)?,
        kn_product(g, s)?,
        kn_product(s, s)?,
        kn_product(g, s2)?,
        kn_product(s, s2)?,
        kn_product(s2, s2)?,
    ])
}

/// `R - Σ L_i B_i` over the six products of [`grt_basis`].
pub fn grt_remainder(pkg: &CurvaturePackage, l: &[f64; 6]) -> Result<DenseTensor, TensorError> {
    let basis = grt_basis(pkg)?;
    let mut out = pkg.r.clone();
    for (c, b) in l.iter().zip(&basis) {
        out = out.axpy(-c, b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureClass {
    Flat,
    ConstantCurvature,
    ConformallyFlat,
    RoterType,
    GeneralizedRoterType,
    /// Not of generalized Roter type.
    NotGrt,
}

impl CurvatureClass {
    pub fn label(self) -> &'static str {
        match self {
            CurvatureClass::Flat => "flat",
            CurvatureClass::ConstantCurvature => "constant curvature",
            CurvatureClass::ConformallyFlat => "conformally flat",
            CurvatureClass::RoterType => "Roter type",
            CurvatureClass::GeneralizedRoterType => "generalized Roter type",
            CurvatureClass::NotGrt => "not GRT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureForm {
    pub class: CurvatureClass,
    /// False when some fit landed between the accept and reject tolerances.
    pub determinate: bool,
    /// `‖R‖ / ‖G‖`.
    pub flat_ratio: f64,
    /// Fit of `R` against `g∧g`.
    pub constant: FitResult,
    /// Fit against `g∧g, g∧S`.
    pub conformal: FitResult,
    /// Fit against `g∧g, g∧S, S∧S`.
    pub roter: FitResult,
    /// Fit against all six products of [`grt_basis`].
    pub generalized: FitResult,
    /// `‖C‖ / ‖R‖`.
    pub weyl_ratio: f64,
    /// The conformal fit and the Weyl ratio give the same verdict.
    pub weyl_agrees: bool,
    /// `S∧S` cannot be dropped from the Roter fit.
    pub proper_roter: Verdict,
    /// `S²∧S²` cannot be dropped from the generalized Roter fit.
    pub proper_generalized: Verdict,
}

impl CurvatureForm {
    /// Human label such as "proper Roter type".
    pub fn label(&self) -> String {
        let proper = match self.class {
            CurvatureClass::RoterType => self.proper_roter == Verdict::Holds,
            CurvatureClass::GeneralizedRoterType => self.proper_generalized == Verdict::Holds,
            _ => false,
        };
        if proper {
            format!("proper {}", self.class.label())
        } else {
            self.class.label().to_string()
        }
    }
}

/// Place `R` in the chain flat ⊂ constant curvature ⊂ conformally flat ⊂
/// Roter type ⊂ generalized Roter type, returning the most special class
/// whose fit is accepted.
pub fn classify_curvature_form(pkg: &CurvaturePackage, tols: &Tolerances) -> Result<CurvatureForm, ClassifyError> {
    let basis = grt_basis(pkg)?;
    let [gg, gs, ss, gs2, ss2, s2s2] = &basis;
    let constant = fit_linear_combination(&pkg.r, &[gg], tols)?;
    let conformal = fit_linear_combination(&pkg.r, &[gg, gs], tols)?;
    let roter = fit_linear_combination(&pkg.r, &[gg, gs, ss], tols)?;
    let generalized = fit_linear_combination(&pkg.r, &[gg, gs, ss, gs2, ss2, s2s2], tols)?;
    let without_top = fit_linear_combination(&pkg.r, &[gg, gs, ss, gs2, ss2], tols)?;

    let r_norm = pkg.r.norm();
    let flat_ratio = r_norm / pkg.gg.norm().max(RESIDUAL_GUARD);
    let weyl_ratio = pkg.c.norm() / r_norm.max(RESIDUAL_GUARD);
    let flat = tols.verdict(flat_ratio);

    let chain = [
        (CurvatureClass::Flat, flat),
        (CurvatureClass::ConstantCurvature, constant.membership),
        (CurvatureClass::ConformallyFlat, conformal.membership),
        (CurvatureClass::RoterType, roter.membership),
        (CurvatureClass::GeneralizedRoterType, generalized.membership),
    ];
    let mut class = CurvatureClass::NotGrt;
    let mut determinate = true;
    for (c, v) in chain {
        if v == Verdict::Indeterminate {
            determinate = false;
        }
        if v == Verdict::Holds {
            class = c;
            break;
        }
    }
    let weyl_agrees = flat == Verdict::Holds || tols.verdict(weyl_ratio) == conformal.membership;
    let proper = |fit: &FitResult, reduced: &FitResult| match fit.membership {
        Verdict::Holds => match reduced.membership {
            Verdict::Fails => Verdict::Holds,
            Verdict::Holds => Verdict::Fails,
            Verdict::Indeterminate => Verdict::Indeterminate,
        },
        _ => Verdict::Fails,
    };
    let proper_roter = proper(&roter, &conformal);
    let proper_generalized = proper(&generalized, &without_top);
    Ok(CurvatureForm {
        class,
        determinate,
        flat_ratio,
        constant,
        conformal,
        roter,
        generalized,
        weyl_ratio,
        weyl_agrees,
        proper_roter,
        proper_generalized,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EinsteinLevel {
    RicciFlat,
    /// `Ein(k)`: a monic polynomial of degree `k` in the Ricci operator vanishes.
    Ein(u8),
    None,
}

impl EinsteinLevel {
    pub fn label(self) -> String {
        match self {
            EinsteinLevel::RicciFlat => "Ricci flat".into(),
            EinsteinLevel::Ein(1) => "Einstein".into(),
            EinsteinLevel::Ein(k) => format!("Ein({k})"),
            EinsteinLevel::None => "none up to Ein(4)".into(),
        }
    }

    pub fn number(self) -> Option<u8> {
        match self {
            EinsteinLevel::RicciFlat => Some(0),
            EinsteinLevel::Ein(k) => Some(k),
            EinsteinLevel::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EinsteinVerdict {
    pub level: EinsteinLevel,
    /// Monic relation `a_0 g + a_1 S + ... + S^k = 0` at the detected level.
    pub relation: Vec<f64>,
    /// Residual of fitting `S^k` by `g, ..., S^{k-1}` for `k = 0..=4`
    /// (`k = 0` compares `‖S‖` with `‖g‖`).
    pub level_residuals: Vec<f64>,
    /// Null spaces of the families `[g, S]`, `[g, S, S²]`, ..., `[g, ..., S⁴]`.
    pub kernels: Vec<Vec<Vec<f64>>>,
}

/// Smallest `k` for which `S^k` lies in the span of `g, S, ..., S^{k-1}`.
pub fn einstein_level(pkg: &CurvaturePackage, tols: &Tolerances) -> Result<EinsteinVerdict, ClassifyError> {
    let family = [&pkg.g, &pkg.s, &pkg.s2, &pkg.s3, &pkg.s4];
    let mut level_residuals = vec![pkg.s.norm() / pkg.g.norm().max(RESIDUAL_GUARD)];
    let mut fits = vec![None];
    for k in 1..=4 {
        let fit = fit_linear_combination(family[k], &family[..k], tols)?;
        level_residuals.push(fit.relative_residual);
        fits.push(Some(fit));
    }
    let mut level = EinsteinLevel::None;
    let mut relation = Vec::new();
    for (k, r) in level_residuals.iter().enumerate() {
        if *r < tols.accept {
            if k == 0 {
                level = EinsteinLevel::RicciFlat;
                relation = vec![1.0];
            } else {
                level = EinsteinLevel::Ein(k as u8);
                let fit = fits[k].as_ref().expect("fitted above");
                relation = fit.coefficients.iter().map(|c| -c).chain([1.0]).collect();
            }
            break;
        }
    }
    let kernels = (2..=5).map(|m| family_kernel(&family[..m])).collect();
    Ok(EinsteinVerdict { level, relation, level_residuals, kernels })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiDecomposition {
    pub alpha: f64,
    pub beta: f64,
    /// Unit (Euclidean) covector.
    pub eta: Vec<f64>,
    pub residual: f64,
    /// `β` vanishes: the input is Einstein and `η` is arbitrary.
    pub degenerate: bool,
}

/// `S = α g + β η⊗η` with `α` an eigenvalue of `g⁻¹S` of multiplicity at
/// least `n - 1`.
pub fn quasi_einstein(pkg: &CurvaturePackage, tols: &Tolerances) -> Option<QuasiDecomposition> {
    quasi_einstein_of(&pkg.g, &pkg.g_inv, &pkg.s, tols)
}

pub fn quasi_einstein_of(
    g: &DenseTensor,
    g_inv: &DenseTensor,
    s: &DenseTensor,
    tols: &Tolerances,
) -> Option<QuasiDecomposition> {
    let n = g.dim();
    let gm = g.matrix();
    let sm = s.matrix();
    let op = g_inv.matrix() * &sm;
    let eig = op.complex_eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(RESIDUAL_GUARD);
    let mut reals: Vec<f64> = eig.iter().filter(|z| z.im.abs() <= tols.cluster * scale).map(|z| z.re).collect();
    reals.sort_by(|a, b| a.total_cmp(b));
    // Largest cluster of consecutive eigenvalues with gaps within tolerance.
    let mut best: (usize, usize) = (0, 0);
    let mut start = 0;
    for i in 1..=reals.len() {
        if i == reals.len() || reals[i] - reals[i - 1] > tols.cluster * scale {
            if i - start > best.1 - best.0 {
                best = (start, i);
            }
            start = i;
        }
    }
    if best.1 - best.0 + 1 < n {
        return None;
    }
    let cluster = &reals[best.0..best.1];
    let alpha = cluster.iter().sum::<f64>() / cluster.len() as f64;
    let m = &sm - alpha * &gm;
    let sym = SymmetricEigen::new(0.5 * (&m + m.transpose()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[b].abs().total_cmp(&sym.eigenvalues[a].abs()));
    let s_norm = sm.norm().max(RESIDUAL_GUARD);
    if n > 1 && sym.eigenvalues[order[1]].abs() > tols.cluster * s_norm {
        return None;
    }
    let top = order[0];
    let beta = sym.eigenvalues[top];
    let mut eta: Vec<f64> = sym.eigenvectors.column(top).iter().copied().collect();
    // Fix the sign so the largest entry is positive.
    let lead = eta.iter().copied().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    if lead < 0.0 {
        eta.iter_mut().for_each(|v| *v = -*v);
    }
    let fitted = alpha * &gm + beta * DMatrix::from_fn(n, n, |i, j| eta[i] * eta[j]);
    let residual = (&sm - fitted).norm() / s_norm;
    Some(QuasiDecomposition { alpha, beta, eta, residual, degenerate: beta.abs() <= tols.accept * s_norm })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiConstantCurvature {
    /// Coefficient of `G = ½ g∧g`.
    pub alpha: f64,
    /// Coefficient of `g∧(η⊗η)`.
    pub beta: f64,
    pub eta: Vec<f64>,
    pub fit: FitResult,
}

/// Fit `R = α' G + β' g∧(η⊗η)` for a given covector `η`.
pub fn quasi_constant_curvature(
    pkg: &CurvaturePackage,
    eta: &[f64],
    tols: &Tolerances,
) -> Result<QuasiConstantCurvature, ClassifyError> {
    let ee = DenseTensor::outer_square(eta);
    let g_ee = kn_product(&pkg.g, &ee)?;
    let fit = fit_linear_combination(&pkg.r, &[&pkg.gg, &g_ee], tols)?;
    Ok(QuasiConstantCurvature { alpha: fit.coefficients[0], beta: fit.coefficients[1], eta: eta.to_vec(), fit })
}

/// `α' = 2[L1 + α(L2 + α(L3 + L4 + α(L5 + L6 α)))]`: the `G` coefficient of
/// a quasi-Einstein generalized Roter tensor predicted from its coefficients.
pub fn quasi_constant_alpha(l: &[f64], alpha: f64) -> f64 {
    2.0 * (l[0] + alpha * (l[1] + alpha * (l[2] + l[3] + alpha * (l[4] + l[5] * alpha))))
}

/// Given a Roter form `R = N1 g∧g + N2 g∧S + N3 S∧S` with `N3 ≠ 0` and free
/// `(L4, L5, L6)`, return `(L1, L2, L3)` such that the six-term generalized
/// form reproduces the same `R`.
///
/// Contracting the Roter form gives `2 N3 S² = b g + (a - 1) S` with
/// `a = (n-2) N2 + 2 N3 κ` and `b = 2(n-1) N1 + N2 κ`; substituting that
/// into the three `S²` products yields the coefficients.
#[allow(clippy::too_many_arguments)]
pub fn rt_to_grt_coefficients(
    n1: f64,
    n2: f64,
    n3: f64,
    kappa: f64,
    n: usize,
    l4: f64,
    l5: f64,
    l6: f64,
) -> Result<(f64, f64, f64), ClassifyError> {
    if n3 == 0.0 {
        return Err(ClassifyError::ZeroTopCoefficient);
    }
    let nf = n as f64;
    let a = (nf - 2.0) * n2 + 2.0 * n3 * kappa - 1.0;
    let b = 2.0 * (nf - 1.0) * n1 + n2 * kappa;
    let d = n3 * n3;
    let l1 = n1 - (b * b * l6 + 2.0 * b * l4 * n3) / (4.0 * d);
    let l2 = n2 - (a * b * l6 + a * l4 * n3 + b * l5 * n3) / (2.0 * d);
    let l3 = n3 - (a * a * l6 + 2.0 * a * l5 * n3) / (4.0 * d);
    Ok((l1, l2, l3))
}

/// Residuals of the two constant-curvature coefficient relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCurvatureRelations {
    pub roter_holds: bool,
    pub generalized_holds: bool,
    /// Worst relative violation over the particular solution and the
    /// homogeneous condition on each kernel vector.
    pub roter_violation: f64,
    pub generalized_violation: f64,
}

/// Check that every Roter coefficient vector satisfies
/// `(N1 n² + κ(N2 n + N3 κ))/n = κ/(2(n-1))` and every generalized Roter
/// coefficient vector satisfies
/// `(L1 n⁴ + κ[L2 n³ + κ{n²(L3+L4) + L5 n κ + L6 κ²}])/n³ = κ/(2(n-1))`.
pub fn constant_curvature_relations(
    form: &CurvatureForm,
    kappa: f64,
    n: usize,
    tol: f64,
) -> Result<ConstantCurvatureRelations, ClassifyError> {
    if form.constant.membership != Verdict::Holds || form.class == CurvatureClass::Flat {
        return Err(ClassifyError::NotConstantCurvature(form.constant.relative_residual));
    }
    if kappa == 0.0 {
        return Err(ClassifyError::ZeroScalarCurvature);
    }
    let nf = n as f64;
    let target = kappa / (2.0 * (nf - 1.0));
    let rt = |c: &[f64]| (c[0] * nf * nf + kappa * (c[1] * nf + c[2] * kappa)) / nf;
    let grt = |c: &[f64]| {
        (c[0] * nf.powi(4)
            + kappa
                * (c[1] * nf.powi(3) + kappa * (nf * nf * (c[2] + c[3]) + c[4] * nf * kappa + c[5] * kappa * kappa)))
            / nf.powi(3)
    };
    let violation = |fit: &FitResult, rel: &dyn Fn(&[f64]) -> f64| {
        let mut worst = (rel(&fit.coefficients) - target).abs() / target.abs();
        for v in &fit.kernel_basis {
            // Homogeneous part: scale by the size of the coefficients it multiplies.
            worst = worst.max(rel(v).abs() / target.abs().max(1.0));
        }
        worst
    };
    let roter_violation = violation(&form.roter, &rt);
    let generalized_violation = violation(&form.generalized, &grt);
    Ok(ConstantCurvatureRelations {
        roter_holds: roter_violation < tol,
        generalized_holds: generalized_violation < tol,
        roter_violation,
        generalized_violation,
    })
}

/// `(2/n⁴)[L1 n⁴ + κ{L2 n³ + κ((L3+L4) n² + L5 n κ + L6 κ²)}]`: the `G`
/// coefficient of `R` predicted from a generalized Roter fit on an Einstein
/// package.
pub fn einstein_grt_constant_coefficient(
    pkg: &CurvaturePackage,
    grt_fit: &FitResult,
    einstein: &EinsteinVerdict,
) -> Result<f64, ClassifyError> {
    if !matches!(einstein.level, EinsteinLevel::Ein(1) | EinsteinLevel::RicciFlat) {
        return Err(ClassifyError::NotEinstein(einstein.level.label()));
    }
    let l = &grt_fit.coefficients;
    let nf = pkg.dim() as f64;
    let k = pkg.kappa;
    let n4 = nf.powi(4);
    Ok(2.0 / n4 * (l[0] * n4 + k * (l[1] * nf.powi(3) + k * ((l[2] + l[3]) * nf * nf + l[4] * nf * k + l[5] * k * k))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build, build_met2, constant_curvature_package};
    use crate::curvature::curvature_package;
    use std::collections::BTreeMap;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn fit_recovers_basis_member() {
        let a = DenseTensor::diagonal(&[1.0, 2.0, 3.0]);
        let b = DenseTensor::identity(3);
        let fit = fit_linear_combination(&a, &[&a, &b], &tols()).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12 && fit.coefficients[1].abs() < 1e-12);
        assert!(fit.relative_residual < 1e-14);
        assert_eq!(fit.status, FitStatus::Determinate);
    }

    #[test]
    fn fit_of_orthogonal_target_has_unit_residual() {
        let b = DenseTensor::diagonal(&[1.0, 0.0, 0.0]);
        let t = DenseTensor::diagonal(&[0.0, 1.0, 0.0]);
        let fit = fit_linear_combination(&t, &[&b], &tols()).unwrap();
        assert!((fit.relative_residual - 1.0).abs() < 1e-14);
        assert_eq!(fit.membership, Verdict::Fails);
        assert!(fit_linear_combination(&t, &[], &tols()).is_err());
        let z = DenseTensor::zeros(3, 2);
        assert_eq!(fit_linear_combination(&t, &[&z], &tols()).unwrap().status, FitStatus::Indeterminate);
    }

    #[test]
    fn degenerate_fit_reports_kernel() {
        let b = DenseTensor::identity(3);
        let b2 = 2.0 * &b;
        let fit = fit_linear_combination(&b, &[&b, &b2], &tols()).unwrap();
        assert_eq!(fit.status, FitStatus::Degenerate);
        assert_eq!(fit.kernel_basis.len(), 1);
        // min-norm: c + 2d = 1 minimizing c² + d² → (0.2, 0.4)
        assert!((fit.coefficients[0] - 0.2).abs() < 1e-12 && (fit.coefficients[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn met2_is_einstein_and_not_grt() {
        let chart = build_met2();
        let pkg = curvature_package(&chart, &[0.2, 0.5, 0.3, 0.7, 1.4, 0.1]).unwrap();
        let ein = einstein_level(&pkg, &tols()).unwrap();
        assert_eq!(ein.level, EinsteinLevel::Ein(1));
        assert!((ein.relation[0] + 0.5).abs() < 1e-12);
        let form = classify_curvature_form(&pkg, &tols()).unwrap();
        assert_eq!(form.class, CurvatureClass::NotGrt);
        assert!(form.generalized.relative_residual > 1e-2);
    }

    #[test]
    fn rt_to_grt_cases() {
        assert_eq!(rt_to_grt_coefficients(0.3, -0.2, 0.7, 1.1, 5, 0.0, 0.0, 0.0).unwrap(), (0.3, -0.2, 0.7));
        let (l1, l2, l3) = rt_to_grt_coefficients(1.0, 1.0, 1.0, 0.0, 5, 0.0, 0.0, 1.0).unwrap();
        assert_eq!((l1, l2, l3), (-15.0, -7.0, 0.0));
        assert!(rt_to_grt_coefficients(1.0, 1.0, 0.0, 0.0, 5, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn quasi_einstein_synthetic() {
        let g = DenseTensor::identity(4);
        let e1 = [1.0, 0.0, 0.0, 0.0];
        let s = &g + &DenseTensor::outer_square(&e1);
        let q = quasi_einstein_of(&g, &g, &s, &tols()).unwrap();
        assert!((q.alpha - 1.0).abs() < 1e-12 && (q.beta - 1.0).abs() < 1e-12);
        assert!((q.eta[0] - 1.0).abs() < 1e-12 && q.residual < 1e-14);
        let einstein = quasi_einstein_of(&g, &g, &(3.0 * &g), &tols()).unwrap();
        assert!(einstein.degenerate);
        let generic = DenseTensor::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        assert!(quasi_einstein_of(&g, &g, &generic, &tols()).is_none());
    }

    #[test]
    fn constant_curvature_fixture() {
        let g = DenseTensor::diagonal(&[1.0, 1.5, 2.0]);
        let pkg = constant_curvature_package(&g, 0.4).unwrap();
        let form = classify_curvature_form(&pkg, &tols()).unwrap();
        assert_eq!(form.class, CurvatureClass::ConstantCurvature);
        let rel = constant_curvature_relations(&form, pkg.kappa, 3, 1e-9).unwrap();
        assert!(rel.roter_holds && rel.generalized_holds, "{rel:?}");
        let ein = einstein_level(&pkg, &tols()).unwrap();
        let c = einstein_grt_constant_coefficient(&pkg, &form.generalized, &ein).unwrap();
        // R = 0.4 g∧g = 0.8 G
        assert!((c - 0.8).abs() < 1e-12);
    }

    #[test]
    fn flat_preset_is_flat() {
        let m = build("met1-case-vi", &BTreeMap::new()).unwrap();
        let pkg = curvature_package(&m.chart, &[0.5; 5]).unwrap();
        let form = classify_curvature_form(&pkg, &tols()).unwrap();
        assert_eq!(form.class, CurvatureClass::Flat);
        assert_eq!(einstein_level(&pkg, &tols()).unwrap().level, EinsteinLevel::RicciFlat);
    }
}
