//! Hausdorff dimension of certified graph-directed systems, plus a
//! brute-force box-counting estimate on the underlying IFS.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::algebra::{to_f64, Rational};
use crate::gds::{GraphDirectedSystem, SeparationStatus, VerifiedSystem};
use crate::ifs::HomogeneousIfs;

/// Default convergence tolerance for the spectral radius.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Iteration budget for power iteration.
pub const MAX_ITERATIONS: usize = 1_000_000;
/// Default cap on the number of words enumerated by box counting.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimensionError {
    #[error("count matrix is empty")]
    Empty,
    #[error("count matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("vertex {0} has no outgoing edge")]
    ZeroRow(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("power iteration did not converge within {max_iters} iterations")]
    NotConverged { max_iters: usize },
    #[error("separation is not certified; no dimension is reported")]
    NotCertified,
    #[error("box counting needs depth >= 2, got {0}")]
    DepthTooSmall(usize),
    #[error("enumerating {words} words exceeds the cap of {cap}")]
    BudgetExceeded { words: u128, cap: u64 },
}

/// Edge counts between vertices; entry `(u, v)` (1-based) counts edges `u → v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    rows: Vec<Vec<u32>>,
}

impl CountMatrix {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self, DimensionError> {
        let n = rows.len();
        if n == 0 {
            return Err(DimensionError::Empty);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(DimensionError::NotSquare { row: i + 1, len: row.len(), expected: n });
            }
            if row.iter().all(|&c| c == 0) {
                return Err(DimensionError::ZeroRow(i + 1));
            }
        }
        Ok(CountMatrix { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.rows[u - 1][v - 1]
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn edge_total(&self) -> u32 {
        self.row_sums().iter().sum()
    }
}

pub fn count_matrix(gds: &GraphDirectedSystem) -> CountMatrix {
    // every vertex of a built system has an out-edge
    CountMatrix { rows: gds.count_matrix() }
}

/// Perron root estimate with a rigorous floating-point bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
    /// Half-width of the bracket; `|rho - ρ(M)| <= residual`.
    pub residual: f64,
    pub iterations: usize,
}

pub fn spectral_radius(m: &CountMatrix, tol: f64) -> Result<SpectralEstimate, DimensionError> {
    spectral_radius_with(m, tol, MAX_ITERATIONS)
}

/// Power iteration on `M + I`, which shares the Perron vector of `M` and is
/// aperiodic. For any positive `x`, the Collatz–Wielandt ratios
/// `((M+I)x)_i / x_i` bracket `ρ(M) + 1`; iteration stops once the bracket
/// is narrower than `tol`.
pub fn spectral_radius_with(
    m: &CountMatrix,
    tol: f64,
    max_iters: usize,
) -> Result<SpectralEstimate, DimensionError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(DimensionError::BadTolerance(tol));
    }
    let n = m.size();
    let mut x = vec![1.0_f64; n];
    let mut next = vec![0.0_f64; n];
    for iteration in 1..=max_iters {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for i in 0..n {
            let y = x[i] + m.rows[i].iter().zip(&x).map(|(&c, &xj)| c as f64 * xj).sum::<f64>();
            let ratio = y / x[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            next[i] = y;
        }
        if hi - lo < tol {
            let (lower, upper) = (lo - 1.0, hi - 1.0);
            return Ok(SpectralEstimate {
                rho: 0.5 * (lower + upper),
                lower,
                upper,
                residual: 0.5 * (upper - lower),
                iterations: iteration,
            });
        }
        let scale = next.iter().cloned().fold(0.0_f64, f64::max);
        for (xi, yi) in x.iter_mut().zip(&next) {
            *xi = yi / scale;
        }
    }
    Err(DimensionError::NotConverged { max_iters })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub spectral: SpectralEstimate,
    pub dimension: f64,
    /// Bound on `|dimension - true value|` inherited from the bracket on ρ.
    pub residual: f64,
}

/// `log ρ / log(1/λ)` for a system whose separation has been certified.
pub fn hausdorff_dim(system: &VerifiedSystem, tol: f64) -> Result<DimensionEstimate, DimensionError> {
    if system.report.separation.status != SeparationStatus::Certified {
        return Err(DimensionError::NotCertified);
    }
    spectral_dimension(&count_matrix(&system.gds), system.gds.lambda(), tol)
}

/// The dimension formula without the separation precondition.
pub fn spectral_dimension(
    m: &CountMatrix,
    lambda: &Rational,
    tol: f64,
) -> Result<DimensionEstimate, DimensionError> {
    let spectral = spectral_radius(m, tol)?;
    let log_inv = -to_f64(lambda).ln();
    let dimension = spectral.rho.ln() / log_inv;
    let residual = (spectral.upper.ln() - spectral.lower.ln()) / (2.0 * log_inv);
    Ok(DimensionEstimate { spectral, dimension, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCount {
    /// `counts[k-1]` is the number of distinct level-`k` cylinders.
    pub counts: Vec<u64>,
    /// Least-squares slope of `log N_k` against `k·log(1/λ)`, `k = 1..=depth`.
    pub slope: f64,
}

/// Counts distinct cylinders `f_w([0,1]^d)` for `|w| = k ≤ depth`.
///
/// Cylinders of equal length coincide exactly when their lower corners do,
/// and the level-`k` corners are `{a_i + λc}` over level-`k-1` corners `c`,
/// so each level is built from the deduplicated previous one.
pub fn box_count_dim(ifs: &HomogeneousIfs, depth: usize, cap: u64) -> Result<BoxCount, DimensionError> {
    if depth < 2 {
        return Err(DimensionError::DepthTooSmall(depth));
    }
    let words = (ifs.map_count() as u128).saturating_pow(depth as u32);
    if words > cap as u128 {
        return Err(DimensionError::BudgetExceeded { words, cap });
    }
    let counts = match scaled_corner_counts(ifs, depth) {
        Some(counts) => counts,
        None => rational_corner_counts(ifs, depth),
    };
    let lambda = ifs.lambda();
    let log_inv = -to_f64(lambda).ln();
    let points: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| ((i + 1) as f64 * log_inv, (n as f64).ln()))
        .collect();
    Ok(BoxCount { counts, slope: regression_slope(&points) })
}

/// Exact corner recursion over rationals.
fn rational_corner_counts(ifs: &HomogeneousIfs, depth: usize) -> Vec<u64> {
    let lambda = ifs.lambda();
    let shifts: Vec<&Vec<Rational>> = ifs.maps().iter().map(|f| &f.shift).collect();
    let mut level: Vec<Vec<Rational>> = vec![vec![Rational::from_integer(0.into()); ifs.dim()]];
    let mut counts = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut seen = HashSet::with_capacity(level.len() * shifts.len());
        for corner in &level {
            let scaled: Vec<Rational> = corner.iter().map(|c| c * lambda).collect();
            for shift in &shifts {
                seen.insert(shift.iter().zip(&scaled).map(|(a, c)| a + c).collect::<Vec<_>>());
            }
        }
        level = seen.into_iter().collect();
        counts.push(level.len() as u64);
    }
    counts
}

/// The same recursion on integers. With `λ = p/q` and `D` the common
/// denominator of the translations, `X_k = D·q^{k-1}·c_k` satisfies
/// `X_k = q^{k-1}·D·a_i + p·X_{k-1}`, and scaling is injective per level.
/// Returns `None` if an intermediate value leaves `i128`.
fn scaled_corner_counts(ifs: &HomogeneousIfs, depth: usize) -> Option<Vec<u64>> {
    let lambda = ifs.lambda();
    let p: i128 = lambda.numer().try_into().ok()?;
    let q: i128 = lambda.denom().try_into().ok()?;
    let mut den = BigInt::one();
    for f in ifs.maps() {
        for a in &f.shift {
            den = den.lcm(a.denom());
        }
    }
    let shifts: Vec<Vec<i128>> = ifs
        .maps()
        .iter()
        .map(|f| {
            f.shift
                .iter()
                .map(|a| (a.numer() * (&den / a.denom())).try_into().ok())
                .collect::<Option<Vec<i128>>>()
        })
        .collect::<Option<_>>()?;
    let mut level: Vec<Vec<i128>> = vec![vec![0; ifs.dim()]];
    let mut q_power: i128 = 1;
    let mut counts = Vec::with_capacity(depth);
    for k in 0..depth {
        if k > 0 {
            q_power = q_power.checked_mul(q)?;
        }
        let mut seen = HashSet::with_capacity(level.len() * shifts.len());
        for corner in &level {
            // X_0 = 0, so the p·X term vanishes on the first level
            let carried: Vec<i128> = corner.iter().map(|&x| p.checked_mul(x)).collect::<Option<_>>()?;
            for shift in &shifts {
                let next = shift
                    .iter()
                    .zip(&carried)
                    .map(|(&a, &c)| a.checked_mul(q_power)?.checked_add(c))
                    .collect::<Option<Vec<i128>>>()?;
                seen.insert(next);
            }
        }
        level = seen.into_iter().collect();
        counts.push(level.len() as u64);
    }
    Some(counts)
}

fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests;
