//! Levi-Civita connection, curvature and first covariant derivatives at a
//! chart point, computed from third-order jets of the metric components.
//!
//! Conventions:
//!
//! - `R^l_{kij} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} - Γ^l_{jm} Γ^m_{ik}`,
//!   so that `R(∂_i, ∂_j) ∂_k = R^l_{kij} ∂_l`;
//! - `R_{ijkl} = g_{km} R^m_{lij}`;
//! - `S_{jk} = g^{il} R_{ijkl}` and `κ = g^{jk} S_{jk}`.
//!
//! With these choices a space of constant sectional curvature `K` has
//! `R = -(K/2) g∧g` and `S = -(n-1) K g`.
//!
//! Derivative arrays put the differentiation index last: `nabla_r[i,j,k,l,e]`
//! is `(∇_e R)_{ijkl}` and `nabla_s[a,b,c]` is `(∇_c S)_{ab}`.

use thiserror::Error;

use crate::chart::{ChartError, MetricChart};
use crate::jet::Jet3;
use crate::linalg;
use crate::tensor::{contract_first_last, kn_product, ricci_power_raised, trace_raised, DenseTensor, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("curvature data needs dimension >= 3, got {0}")]
    Dimension(usize),
}

/// Metric components and their partial derivatives through third order.
///
/// Index layout (row-major): `g[i,j]`, `dg[i,j,e]`, `ddg[i,j,e,f]`,
/// `dddg[i,j,e,f,h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJets {
    pub dim: usize,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
    pub ddg: Vec<f64>,
    pub dddg: Vec<f64>,
}

impl MetricJets {
    pub fn from_jets(dim: usize, jets: &[Jet3]) -> Self {
        let n = dim;
        let mut g = vec![0.0; n * n];
        let mut dg = vec![0.0; n.pow(3)];
        let mut ddg = vec![0.0; n.pow(4)];
        let mut dddg = vec![0.0; n.pow(5)];
        for (ij, jet) in jets.iter().enumerate() {
            g[ij] = jet.value();
            for e in 0..n {
                dg[ij * n + e] = jet.d1(e);
                for f in 0..n {
                    ddg[(ij * n + e) * n + f] = jet.d2(e, f);
                    for h in 0..n {
                        dddg[((ij * n + e) * n + f) * n + h] = jet.d3(e, f, h);
                    }
                }
            }
        }
        Self { dim, g, dg, ddg, dddg }
    }

    pub fn at_chart(chart: &MetricChart, point: &[f64]) -> Result<Self, ChartError> {
        Ok(Self::from_jets(chart.dim(), &chart.metric_jets(point)?))
    }
}

/// Christoffel symbols of the second kind, `at(a,b,c) = Γ^a_{bc}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    dim: usize,
    data: Vec<f64>,
}

impl Connection {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The flat connection (all symbols zero).
    pub fn zero(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim.pow(3)] }
    }
}

/// `(∇_c T)_{ab} = ∂_c T_{ab} - Γ^d_{ca} T_{db} - Γ^d_{cb} T_{ad}`, with
/// `dt[a,b,c] = ∂_c T_{ab}`. Output layout `[a,b,c]`.
pub fn covariant_derivative_sym2(gamma: &Connection, t: &[f64], dt: &[f64]) -> DenseTensor {
    let n = gamma.dim;
    DenseTensor::from_fn(n, 3, |idx| {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        let mut v = dt[(a * n + b) * n + c];
        for d in 0..n {
            v -= gamma.at(d, c, a) * t[d * n + b] + gamma.at(d, c, b) * t[a * n + d];
        }
        v
    })
}

/// Pointwise curvature data.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePackage {
    pub point: Vec<f64>,
    pub g: DenseTensor,
    pub g_inv: DenseTensor,
    pub gamma: Connection,
    pub r: DenseTensor,
    pub s: DenseTensor,
    pub s2: DenseTensor,
    pub s3: DenseTensor,
    pub s4: DenseTensor,
    pub kappa: f64,
    pub kappa2: f64,
    /// `G = ½ g∧g`.
    pub gg: DenseTensor,
    /// Weyl conformal curvature.
    pub c: DenseTensor,
    /// Concircular curvature.
    pub w: DenseTensor,
    /// Conharmonic curvature.
    pub k: DenseTensor,
    /// `∇R`; absent for packages built from algebraic data only.
    pub nabla_r: Option<DenseTensor>,
    pub nabla_s: Option<DenseTensor>,
}

impl CurvaturePackage {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Package from a metric and a curvature tensor at a single point, with no
    /// connection or derivative data. Used for synthetic fixtures.
    pub fn from_algebraic(g: DenseTensor, r: DenseTensor) -> Result<Self, EngineError> {
        let n = g.dim();
        let g = g.into_sym2()?;
        let g_inv = linalg::invert(&g.matrix())
            .map(|m| DenseTensor::from_matrix_sym(&m))
            .ok_or_else(|| EngineError::SingularMetric { point: Vec::new() })?;
        Self::assemble(Vec::new(), g, g_inv, Connection::zero(n), r, None, None)
    }

    fn assemble(
        point: Vec<f64>,
        g: DenseTensor,
        g_inv: DenseTensor,
        gamma: Connection,
        r: DenseTensor,
        nabla_r: Option<DenseTensor>,
        nabla_s: Option<DenseTensor>,
    ) -> Result<Self, EngineError> {
        let n = g.dim();
        if n < 3 {
            return Err(EngineError::Dimension(n));
        }
        let r = r.into_curv4()?;
        let s = contract_first_last(&r, &g_inv)?.into_sym2()?;
        let s2 = ricci_power_raised(&s, &g_inv, 2)?;
        let s3 = ricci_power_raised(&s, &g_inv, 3)?;
        let s4 = ricci_power_raised(&s, &g_inv, 4)?;
        let kappa = trace_raised(&s, &g_inv)?;
        let kappa2 = trace_raised(&s2, &g_inv)?;
        let g_wedge_g = kn_product(&g, &g)?;
        let g_wedge_s = kn_product(&g, &s)?;
        let nf = n as f64;
        let gg = 0.5 * &g_wedge_g;
        let k = r.axpy(-1.0 / (nf - 2.0), &g_wedge_s);
        let c = k.axpy(kappa / (2.0 * (nf - 1.0) * (nf - 2.0)), &g_wedge_g);
        let w = r.axpy(-kappa / (2.0 * nf * (nf - 1.0)), &g_wedge_g);
        Ok(Self { point, g, g_inv, gamma, r, s, s2, s3, s4, kappa, kappa2, gg, c, w, k, nabla_r, nabla_s })
    }
}

/// Everything derived from the metric jets before tensors are assembled.
struct RawCurvature {
    g_inv: Vec<f64>,
    gamma: Vec<f64>,
    /// `r[i,j,k,l] = R_{ijkl}`.
    r: Vec<f64>,
    /// `dr[i,j,k,l,e] = ∂_e R_{ijkl}`.
    dr: Vec<f64>,
}

fn raw_curvature(mj: &MetricJets, point: &[f64]) -> Result<RawCurvature, EngineError> {
    let n = mj.dim;
    let gm = nalgebra::DMatrix::from_row_slice(n, n, &mj.g);
    let gi = linalg::invert(&gm).ok_or_else(|| EngineError::SingularMetric { point: point.to_vec() })?;
    let ix2 = |a: usize, b: usize| a * n + b;
    let ix3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let ix4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let ix5 = |a: usize, b: usize, c: usize, d: usize, e: usize| (((a * n + b) * n + c) * n + d) * n + e;

    let mut g_inv = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            g_inv[ix2(a, b)] = 0.5 * (gi[(a, b)] + gi[(b, a)]);
        }
    }
    let g = |i: usize, j: usize| mj.g[ix2(i, j)];
    let dg = |i: usize, j: usize, e: usize| mj.dg[ix3(i, j, e)];
    let ddg = |i: usize, j: usize, e: usize, f: usize| mj.ddg[ix4(i, j, e, f)];
    let dddg = |i: usize, j: usize, e: usize, f: usize, h: usize| mj.dddg[ix5(i, j, e, f, h)];

    // ∂_e g^{ab} = -g^{ac} ∂_e g_{cd} g^{db}
    let mut dginv = vec![0.0; n.pow(3)];
    // ginv_dg[a,d,e] = g^{ac} ∂_e g_{cd}
    let mut ginv_dg = vec![0.0; n.pow(3)];
    for a in 0..n {
        for d in 0..n {
            for e in 0..n {
                ginv_dg[ix3(a, d, e)] = (0..n).map(|c| g_inv[ix2(a, c)] * dg(c, d, e)).sum();
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for e in 0..n {
                dginv[ix3(a, b, e)] = -(0..n).map(|d| ginv_dg[ix3(a, d, e)] * g_inv[ix2(d, b)]).sum::<f64>();
            }
        }
    }
    // ∂_f ∂_e g^{ab} = -∂_f g^{ac} ∂_e g_{cd} g^{db} - g^{ac} ∂_f∂_e g_{cd} g^{db} - g^{ac} ∂_e g_{cd} ∂_f g^{db}
    let mut ddginv = vec![0.0; n.pow(4)];
    for a in 0..n {
        for b in 0..n {
            for e in 0..n {
                for f in 0..n {
                    let mut v = 0.0;
                    for c in 0..n {
                        for d in 0..n {
                            v -= dginv[ix3(a, c, f)] * dg(c, d, e) * g_inv[ix2(d, b)]
                                + g_inv[ix2(a, c)] * ddg(c, d, e, f) * g_inv[ix2(d, b)]
                                + g_inv[ix2(a, c)] * dg(c, d, e) * dginv[ix3(d, b, f)];
                        }
                    }
                    ddginv[ix4(a, b, e, f)] = v;
                }
            }
        }
    }

    // Christoffel symbols of the first kind Γ_{d,bc} and their derivatives.
    let mut c1 = vec![0.0; n.pow(3)];
    let mut dc1 = vec![0.0; n.pow(4)];
    let mut ddc1 = vec![0.0; n.pow(5)];
    for d in 0..n {
        for b in 0..n {
            for c in 0..n {
                c1[ix3(d, b, c)] = 0.5 * (dg(d, c, b) + dg(b, d, c) - dg(b, c, d));
                for e in 0..n {
                    dc1[ix4(d, b, c, e)] = 0.5 * (ddg(d, c, b, e) + ddg(b, d, c, e) - ddg(b, c, d, e));
                    for f in 0..n {
                        ddc1[ix5(d, b, c, e, f)] =
                            0.5 * (dddg(d, c, b, e, f) + dddg(b, d, c, e, f) - dddg(b, c, d, e, f));
                    }
                }
            }
        }
    }

    // Γ^a_{bc}, ∂_e Γ^a_{bc}, ∂_e ∂_f Γ^a_{bc}
    let mut gamma = vec![0.0; n.pow(3)];
    let mut dgamma = vec![0.0; n.pow(4)];
    let mut ddgamma = vec![0.0; n.pow(5)];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                gamma[ix3(a, b, c)] = (0..n).map(|d| g_inv[ix2(a, d)] * c1[ix3(d, b, c)]).sum();
                for e in 0..n {
                    dgamma[ix4(a, b, c, e)] = (0..n)
                        .map(|d| dginv[ix3(a, d, e)] * c1[ix3(d, b, c)] + g_inv[ix2(a, d)] * dc1[ix4(d, b, c, e)])
                        .sum();
                    for f in 0..n {
                        ddgamma[ix5(a, b, c, e, f)] = (0..n)
                            .map(|d| {
                                ddginv[ix4(a, d, e, f)] * c1[ix3(d, b, c)]
                                    + dginv[ix3(a, d, e)] * dc1[ix4(d, b, c, f)]
                                    + dginv[ix3(a, d, f)] * dc1[ix4(d, b, c, e)]
                                    + g_inv[ix2(a, d)] * ddc1[ix5(d, b, c, e, f)]
                            })
                            .sum();
                    }
                }
            }
        }
    }

    // Mixed curvature rm[l,k,i,j] = R^l_{kij} and its derivatives drm[l,k,i,j,e].
    let mut rm = vec![0.0; n.pow(4)];
    let mut drm = vec![0.0; n.pow(5)];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgamma[ix4(l, j, k, i)] - dgamma[ix4(l, i, k, j)];
                    for m in 0..n {
                        v += gamma[ix3(l, i, m)] * gamma[ix3(m, j, k)] - gamma[ix3(l, j, m)] * gamma[ix3(m, i, k)];
                    }
                    rm[ix4(l, k, i, j)] = v;
                    for e in 0..n {
                        let mut dv = ddgamma[ix5(l, j, k, i, e)] - ddgamma[ix5(l, i, k, j, e)];
                        for m in 0..n {
                            dv += dgamma[ix4(l, i, m, e)] * gamma[ix3(m, j, k)]
                                + gamma[ix3(l, i, m)] * dgamma[ix4(m, j, k, e)]
                                - dgamma[ix4(l, j, m, e)] * gamma[ix3(m, i, k)]
                                - gamma[ix3(l, j, m)] * dgamma[ix4(m, i, k, e)];
                        }
                        drm[ix5(l, k, i, j, e)] = dv;
                    }
                }
            }
        }
    }

    // Lower: R_{ijkl} = g_{km} R^m_{lij}.
    let mut r = vec![0.0; n.pow(4)];
    let mut dr = vec![0.0; n.pow(5)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    r[ix4(i, j, k, l)] = (0..n).map(|m| g(k, m) * rm[ix4(m, l, i, j)]).sum();
                    for e in 0..n {
                        dr[ix5(i, j, k, l, e)] =
                            (0..n).map(|m| dg(k, m, e) * rm[ix4(m, l, i, j)] + g(k, m) * drm[ix5(m, l, i, j, e)]).sum();
                    }
                }
            }
        }
    }
    Ok(RawCurvature { g_inv, gamma, r, dr })
}

/// Christoffel symbols of the Levi-Civita connection at `point`.
pub fn christoffel(chart: &MetricChart, point: &[f64]) -> Result<Connection, EngineError> {
    let mj = MetricJets::at_chart(chart, point)?;
    connection_from_jets(&mj, point)
}

pub fn connection_from_jets(mj: &MetricJets, point: &[f64]) -> Result<Connection, EngineError> {
    let n = mj.dim;
    let gm = nalgebra::DMatrix::from_row_slice(n, n, &mj.g);
    let gi = linalg::invert(&gm).ok_or_else(|| EngineError::SingularMetric { point: point.to_vec() })?;
    let mut data = vec![0.0; n.pow(3)];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                data[(a * n + b) * n + c] = (0..n)
                    .map(|d| {
                        let c1 = mj.dg[(d * n + c) * n + b] + mj.dg[(b * n + d) * n + c] - mj.dg[(b * n + c) * n + d];
                        0.5 * gi[(a, d)] * c1
                    })
                    .sum();
            }
        }
    }
    Ok(Connection { dim: n, data })
}

/// Full curvature package of `chart` at `point`.
pub fn curvature_package(chart: &MetricChart, point: &[f64]) -> Result<CurvaturePackage, EngineError> {
    let mj = MetricJets::at_chart(chart, point)?;
    package_from_jets(&mj, point)
}

pub fn package_from_jets(mj: &MetricJets, point: &[f64]) -> Result<CurvaturePackage, EngineError> {
    let n = mj.dim;
    if n < 3 {
        return Err(EngineError::Dimension(n));
    }
    let raw = raw_curvature(mj, point)?;
    let gamma = Connection { dim: n, data: raw.gamma };
    let g = DenseTensor::sym2(n, mj.g.clone())?;
    let g_inv = DenseTensor::sym2(n, raw.g_inv)?;
    let r_t = DenseTensor::from_vec(n, 4, raw.r.clone())?;

    let ix2 = |a: usize, b: usize| a * n + b;
    let ix4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let ix5 = |a: usize, b: usize, c: usize, d: usize, e: usize| (((a * n + b) * n + c) * n + d) * n + e;

    let nabla_r = DenseTensor::from_fn(n, 5, |idx| {
        let (i, j, k, l, e) = (idx[0], idx[1], idx[2], idx[3], idx[4]);
        let mut v = raw.dr[ix5(i, j, k, l, e)];
        for m in 0..n {
            v -= gamma.at(m, e, i) * raw.r[ix4(m, j, k, l)]
                + gamma.at(m, e, j) * raw.r[ix4(i, m, k, l)]
                + gamma.at(m, e, k) * raw.r[ix4(i, j, m, l)]
                + gamma.at(m, e, l) * raw.r[ix4(i, j, k, m)];
        }
        v
    });

    // S_{jk} = g^{il} R_{ijkl}; ∂_e S by the product rule with ∂_e g^{il} = -g^{ia} ∂_e g_{ab} g^{bl}.
    let gi = g_inv.data();
    let mut s_raw = vec![0.0; n * n];
    let mut ds = vec![0.0; n.pow(3)];
    for j in 0..n {
        for k in 0..n {
            for i in 0..n {
                for l in 0..n {
                    let gil = gi[ix2(i, l)];
                    s_raw[ix2(j, k)] += gil * raw.r[ix4(i, j, k, l)];
                    for e in 0..n {
                        let mut dgil = 0.0;
                        for a in 0..n {
                            for b in 0..n {
                                dgil -= gi[ix2(i, a)] * mj.dg[(a * n + b) * n + e] * gi[ix2(b, l)];
                            }
                        }
                        ds[(j * n + k) * n + e] += dgil * raw.r[ix4(i, j, k, l)] + gil * raw.dr[ix5(i, j, k, l, e)];
                    }
                }
            }
        }
    }
    let nabla_s = covariant_derivative_sym2(&gamma, &s_raw, &ds);
    CurvaturePackage::assemble(point.to_vec(), g, g_inv, gamma, r_t, Some(nabla_r), Some(nabla_s))
}

/// `∇g` at `point`, layout `[a,b,c] = (∇_c g)_{ab}`; zero for the Levi-Civita
/// connection up to roundoff.
pub fn metric_covariant_derivative(mj: &MetricJets, gamma: &Connection) -> DenseTensor {
    covariant_derivative_sym2(gamma, &mj.g, &mj.dg)
}

/// Largest component of the cyclic sum `∇_e R_{abcd} + ∇_c R_{abde} + ∇_d R_{abec}`.
pub fn second_bianchi_violation(nabla_r: &DenseTensor) -> f64 {
    let n = nabla_r.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        let v = nabla_r.get(&[a, b, c, d, e])
                            + nabla_r.get(&[a, b, d, e, c])
                            + nabla_r.get(&[a, b, e, c, d]);
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
    }
    worst
}

/// Ricci contraction of `∇R` over slots 1 and 4, layout `[j,k,e]`.
pub fn contract_nabla_r(nabla_r: &DenseTensor, g_inv: &DenseTensor) -> DenseTensor {
    let n = nabla_r.dim();
    DenseTensor::from_fn(n, 3, |idx| {
        let (j, k, e) = (idx[0], idx[1], idx[2]);
        let mut v = 0.0;
        for i in 0..n {
            for l in 0..n {
                v += g_inv.at2(i, l) * nabla_r.get(&[i, j, k, l, e]);
            }
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::parse_chart_file;
    use crate::tensor::generalized_curvature_violation;

    fn hyperbolic_block() -> MetricChart {
        parse_chart_file("dim = 3\ng[1][1] = 1\ng[2][2] = exp(x1)\ng[3][3] = exp(x1)\n").unwrap()
    }

    #[test]
    fn flat_metric_has_zero_connection_and_curvature() {
        let chart = parse_chart_file("dim = 3\ng[1][1] = 1\ng[2][2] = 1\ng[3][3] = -1\n").unwrap();
        let pkg = curvature_package(&chart, &[0.3, 0.2, 0.1]).unwrap();
        assert!(pkg.gamma.data().iter().all(|v| *v == 0.0));
        assert_eq!(pkg.r.max_abs(), 0.0);
        assert_eq!(pkg.nabla_r.unwrap().max_abs(), 0.0);
    }

    #[test]
    fn block_christoffel_and_curvature() {
        let chart = hyperbolic_block();
        let gamma = christoffel(&chart, &[0.0; 3]).unwrap();
        assert!((gamma.at(0, 1, 1) + 0.5).abs() < 1e-15);
        let pkg = curvature_package(&chart, &[0.0; 3]).unwrap();
        assert!((pkg.r.at4(0, 1, 0, 1) + 0.25).abs() < 1e-14);
        for i in 0..3 {
            for j in 0..3 {
                assert!((pkg.s.at2(i, j) - 0.5 * pkg.g.at2(i, j)).abs() < 1e-14);
            }
        }
        assert!((pkg.kappa - 1.5).abs() < 1e-14);
        // constant curvature -1/4: R = (1/8) g∧g
        let gg = kn_product(&pkg.g, &pkg.g).unwrap();
        assert!(pkg.r.max_abs_diff(&(0.125 * &gg)) < 1e-14);
        assert!(pkg.c.max_abs() < 1e-14);
        assert!(pkg.w.max_abs() < 1e-14);
    }

    fn wavy() -> MetricChart {
        parse_chart_file(
            "dim = 4\n\
             g[1][1] = 1 + x2^2\n\
             g[1][2] = 0.3 * sin(x3)\n\
             g[2][2] = exp(x1) \n\
             g[3][3] = -(2 + cos(x1 * x4))\n\
             g[3][4] = 0.1 * x1 * x2\n\
             g[4][4] = 1.5 + x3\n",
        )
        .unwrap()
    }

    #[test]
    fn identities_on_generic_metric() {
        let chart = wavy();
        let p = [0.4, -0.3, 0.7, 0.2];
        let mj = MetricJets::at_chart(&chart, &p).unwrap();
        let pkg = package_from_jets(&mj, &p).unwrap();
        let scale = pkg.r.max_abs();
        assert!(generalized_curvature_violation(&pkg.r).unwrap() < 1e-12 * scale);
        assert!(metric_covariant_derivative(&mj, &pkg.gamma).max_abs() < 1e-12);
        let nr = pkg.nabla_r.as_ref().unwrap();
        assert!(second_bianchi_violation(nr) < 1e-10 * nr.max_abs());
        let contracted = contract_nabla_r(nr, &pkg.g_inv);
        assert!(contracted.max_abs_diff(pkg.nabla_s.as_ref().unwrap()) < 1e-10 * nr.max_abs());
        // C is trace-free.
        let tc = contract_first_last(&pkg.c, &pkg.g_inv).unwrap();
        assert!(tc.max_abs() < 1e-12 * pkg.c.max_abs());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let chart = wavy();
        let p = [0.4, -0.3, 0.7, 0.2];
        let pkg = curvature_package(&chart, &p).unwrap();
        let h = 1e-4;
        for e in 0..4 {
            let shifted = |s: f64| {
                let mut q = p;
                q[e] += s;
                curvature_package(&chart, &q).unwrap()
            };
            let (p1, m1, p2, m2) = (shifted(h), shifted(-h), shifted(2.0 * h), shifted(-2.0 * h));
            let nr = pkg.nabla_r.as_ref().unwrap();
            for idx in 0..256 {
                let r_at = |pk: &CurvaturePackage| pk.r.data()[idx];
                let d = (8.0 * (r_at(&p1) - r_at(&m1)) - (r_at(&p2) - r_at(&m2))) / (12.0 * h);
                let (i, j, k, l) = (idx / 64, (idx / 16) % 4, (idx / 4) % 4, idx % 4);
                let mut cov = d;
                for m in 0..4 {
                    cov -= pkg.gamma.at(m, e, i) * pkg.r.at4(m, j, k, l)
                        + pkg.gamma.at(m, e, j) * pkg.r.at4(i, m, k, l)
                        + pkg.gamma.at(m, e, k) * pkg.r.at4(i, j, m, l)
                        + pkg.gamma.at(m, e, l) * pkg.r.at4(i, j, k, m);
                }
                assert!((cov - nr.get(&[i, j, k, l, e])).abs() < 1e-7, "{idx} {e}");
            }
        }
    }

    #[test]
    fn singular_metric_is_reported() {
        let chart = parse_chart_file("dim = 3\ng[1][1] = x1\ng[2][2] = 1\ng[3][3] = 1\n").unwrap();
        assert!(matches!(curvature_package(&chart, &[0.0; 3]), Err(EngineError::SingularMetric { .. })));
    }

    #[test]
    fn algebraic_package_of_constant_curvature() {
        let g = DenseTensor::diagonal(&[1.0, 2.0, -1.0, 0.5]);
        let r = 0.7 * &kn_product(&g, &g).unwrap();
        let pkg = CurvaturePackage::from_algebraic(g.clone(), r).unwrap();
        // S = 2c(n-1) g
        assert!(pkg.s.max_abs_diff(&(2.0 * 0.7 * 3.0 * &g)) < 1e-13);
        assert!(pkg.nabla_r.is_none());
    }
}
