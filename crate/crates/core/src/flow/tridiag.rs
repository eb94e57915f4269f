//! Thomas algorithm and its cyclic (Sherman–Morrison) variant.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Solve `a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]` (a[0], c[n-1] ignored).
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if n == 0 || a.len() != n || c.len() != n || d.len() != n {
        return Err(Error::param("tridiagonal", "band lengths must match and be nonzero"));
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut denom = b[0];
    if denom == 0.0 {
        return Err(Error::Degenerate("zero pivot in tridiagonal solve".into()));
    }
    cp[0] = c[0] / denom;
    dp[0] = d[0] / denom;
    for i in 1..n {
        denom = b[i] - a[i] * cp[i - 1];
        if denom == 0.0 {
            return Err(Error::Degenerate("zero pivot in tridiagonal solve".into()));
        }
        cp[i] = c[i] / denom;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / denom;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Cyclic system: row 0 couples to `x[n-1]` through `a[0]`, row `n-1` to `x[0]`
/// through `c[n-1]`.
pub fn solve_cyclic_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if n < 3 {
        return Err(Error::param("tridiagonal", "cyclic system needs at least 3 rows"));
    }
    let alpha = c[n - 1];
    let beta = a[0];
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;
    let x = solve_tridiagonal(a, &bb, c, d)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(a, &bb, c, &u)?;
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    Ok(x.iter().zip(z.iter()).map(|(xi, zi)| xi - fact * zi).collect())
}
