//! Small dense linear-algebra helpers shared by the engine and classifier.

use nalgebra::DMatrix;

/// `|det| / prod(row norms)` below this is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Hadamard-normalized determinant: `|det A| / prod_i ‖row_i‖`, in `[0, 1]`.
pub fn normalized_determinant(m: &DMatrix<f64>) -> f64 {
    let lu = m.clone().lu();
    let det = lu.determinant().abs();
    let rows: f64 = m.row_iter().map(|r| r.norm()).product();
    if rows == 0.0 {
        0.0
    } else {
        det / rows
    }
}

/// Inverse via LU with partial pivoting; `None` if the matrix is numerically
/// singular by [`SINGULARITY_THRESHOLD`].
pub fn invert(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if !m.is_square() || normalized_determinant(m) < SINGULARITY_THRESHOLD {
        return None;
    }
    m.clone().lu().try_inverse()
}

/// Minimum-norm least-squares solution of `A x ≈ b` through a thin SVD, with
/// singular values below `cutoff * σ_max` discarded.
pub struct SvdSolve {
    pub solution: Vec<f64>,
    /// Orthonormal basis of the numerical null space of `A`.
    pub kernel: Vec<Vec<f64>>,
    pub sigma_max: f64,
    pub rank: usize,
}

pub fn min_norm_solve(a: &DMatrix<f64>, b: &[f64], cutoff: f64) -> SvdSolve {
    let cols = a.ncols();
    // Thin SVD of a tall matrix yields all `cols` right singular vectors.
    let (u, sigma, vt) = if a.nrows() >= cols {
        let svd = a.clone().svd(true, true);
        (svd.u.unwrap(), svd.singular_values, svd.v_t.unwrap())
    } else {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        let svd = padded.svd(true, true);
        (svd.u.unwrap(), svd.singular_values, svd.v_t.unwrap())
    };
    let sigma_max = sigma.iter().fold(0.0f64, |m, s| m.max(*s));
    let thresh = cutoff * sigma_max;
    let mut solution = vec![0.0; cols];
    let mut kernel = Vec::new();
    let mut rank = 0;
    for (i, &s) in sigma.iter().enumerate() {
        let v = vt.row(i);
        if s > thresh && s > 0.0 {
            rank += 1;
            let ub: f64 = u.column(i).iter().zip(b.iter().chain(std::iter::repeat(&0.0))).map(|(x, y)| x * y).sum();
            let coef = ub / s;
            for j in 0..cols {
                solution[j] += coef * v[j];
            }
        } else {
            kernel.push(v.iter().copied().collect());
        }
    }
    SvdSolve { solution, kernel, sigma_max, rank }
}
