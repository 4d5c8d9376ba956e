//! Symmetric Toeplitz solves and polynomial root moduli.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Reflection coefficients at or beyond this modulus send the solve to the
/// dense fallback.
pub const REFLECTION_LIMIT: f64 = 1.0 - 1e-12;

/// Largest 2-norm condition number accepted for an autocovariance matrix.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzSolution {
    pub x: Vec<f64>,
    /// `true` when Levinson recursion was abandoned for a dense LU solve.
    pub used_fallback: bool,
}

/// Dense symmetric Toeplitz matrix with first column `col`.
pub fn toeplitz_matrix(col: &[f64]) -> DMatrix<f64> {
    let n = col.len();
    DMatrix::from_fn(n, n, |i, j| col[i.abs_diff(j)])
}

/// Levinson recursion for `T x = b`, `T` symmetric Toeplitz with first column `col`.
///
/// Returns `None` when the diagonal is not positive or a reflection
/// coefficient reaches [`REFLECTION_LIMIT`].
pub fn levinson(col: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = col.len();
    assert_eq!(n, b.len(), "toeplitz column and rhs lengths differ");
    if n == 0 {
        return Some(Vec::new());
    }
    let t0 = col[0];
    if !(t0 > 0.0) || !t0.is_finite() {
        return None;
    }
    let r: Vec<f64> = col.iter().map(|v| v / t0).collect();
    let b: Vec<f64> = b.iter().map(|v| v / t0).collect();

    let mut x = vec![b[0]];
    if n == 1 {
        return Some(x);
    }
    let mut alpha = -r[1];
    if alpha.abs() >= REFLECTION_LIMIT {
        return None;
    }
    let mut y = vec![alpha];
    let mut beta = 1.0;
    for k in 1..n {
        beta *= 1.0 - alpha * alpha;
        let dot: f64 = (0..k).map(|i| r[i + 1] * x[k - 1 - i]).sum();
        let mu = (b[k] - dot) / beta;
        let next: Vec<f64> = (0..k).map(|i| x[i] + mu * y[k - 1 - i]).collect();
        x = next;
        x.push(mu);
        if k < n - 1 {
            let dot: f64 = (0..k).map(|i| r[i + 1] * y[k - 1 - i]).sum();
            alpha = (-r[k + 1] - dot) / beta;
            if !alpha.is_finite() || alpha.abs() >= REFLECTION_LIMIT {
                return None;
            }
            let next: Vec<f64> = (0..k).map(|i| y[i] + alpha * y[k - 1 - i]).collect();
            y = next;
            y.push(alpha);
        }
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// General dense solve by LU with partial pivoting.
pub fn dense_solve(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    a.clone().lu().solve(&rhs).map(|v| v.iter().copied().collect())
}

/// 2-norm condition number of a symmetric matrix.
pub fn symmetric_condition(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let eig = a.clone().symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !max.is_finite() || max == 0.0 || min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves the symmetric Toeplitz system, rejecting ill-conditioned matrices.
pub fn solve_toeplitz(col: &[f64], b: &[f64]) -> Result<ToeplitzSolution> {
    let t = toeplitz_matrix(col);
    let condition = symmetric_condition(&t);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::DegenerateAutocovariance { condition });
    }
    if let Some(x) = levinson(col, b) {
        return Ok(ToeplitzSolution { x, used_fallback: false });
    }
    log::debug!("levinson recursion hit a unit reflection coefficient; using dense LU");
    dense_solve(&t, b)
        .map(|x| ToeplitzSolution { x, used_fallback: true })
        .ok_or(Error::DegenerateAutocovariance { condition })
}

/// Moduli of the roots of `1 - c_1 z - ... - c_p z^p`, ascending. Roots at
/// infinity (trailing zero coefficients) are omitted.
pub fn ar_root_moduli(coefs: &[f64]) -> Vec<f64> {
    // Reciprocal roots are the eigenvalues of the companion matrix.
    let p = coefs.len();
    if p == 0 {
        return Vec::new();
    }
    let companion = DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            coefs[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut moduli: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|l| l.norm())
        .filter(|m| *m > 0.0)
        .map(|m| 1.0 / m)
        .collect();
    moduli.sort_by(f64::total_cmp);
    moduli
}
