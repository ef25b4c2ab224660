//! Local stability of steady states.
//!
//! A matrix whose diagonal is negative and which is diagonally dominant by
//! rows or by columns has no eigenvalue with positive real part, and none on
//! the imaginary axis except possibly zero. Together with a nonzero
//! determinant this certifies stability. The Jacobians here are rarely
//! dominant as they stand, so a positive diagonal similarity `D J D^-1` is
//! applied first. When no scaling works the verdict falls back to
//! eigenvalues.

pub mod eigen;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use eigen::{eigenpairs, eigenvalues};

use crate::error::Result;
use crate::massaction::{r, sequestration_jacobian, ModelParams};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::steady::is_nondegenerate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscMode {
    Row,
    Column,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GershgorinDisc {
    pub center: f64,
    pub radius: f64,
    pub mode: DiscMode,
    /// 0-based row or column.
    pub index: usize,
}

impl GershgorinDisc {
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        (z - Complex64::new(self.center, 0.0)).norm() <= self.radius + slack
    }
}

fn off_diagonal_sum<T: Scalar>(a: &Matrix<T>, i: usize, mode: DiscMode) -> T {
    (0..a.rows())
        .filter(|&j| j != i)
        .map(|j| match mode {
            DiscMode::Row => a[(i, j)].abs(),
            DiscMode::Column => a[(j, i)].abs(),
        })
        .fold(T::zero(), |acc, v| acc + v)
}

pub fn gershgorin_discs<T: Scalar>(a: &Matrix<T>, mode: DiscMode) -> Result<Vec<GershgorinDisc>> {
    let n = a.ensure_square()?;
    Ok((0..n)
        .map(|i| GershgorinDisc {
            center: a[(i, i)].to_f64(),
            radius: off_diagonal_sum(a, i, mode).to_f64(),
            mode,
            index: i,
        })
        .collect())
}

/// Whether `z` lies within `slack` of some disc.
pub fn in_disc_union(discs: &[GershgorinDisc], z: Complex64, slack: f64) -> bool {
    discs.iter().any(|d| d.contains(z, slack))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dominance<T> {
    pub dominant: bool,
    /// `min_i |a_ii| - sum_{j != i} |a_ij|` (rows) or `|a_ji|` (columns).
    pub margin: T,
}

pub fn is_diagonally_dominant<T: Scalar>(a: &Matrix<T>, mode: DiscMode) -> Result<Dominance<T>> {
    let n = a.ensure_square()?;
    let margin = (0..n)
        .map(|i| a[(i, i)].abs() - off_diagonal_sum(a, i, mode))
        .reduce(|u, v| if v < u { v } else { u })
        .unwrap_or_else(T::zero);
    Ok(Dominance {
        dominant: !margin.is_negative(),
        margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceVerdict {
    NegativeRealParts,
    Inconclusive,
}

pub fn dominance_verdict<T: Scalar>(a: &Matrix<T>) -> Result<DominanceVerdict> {
    let n = a.ensure_square()?;
    let negative = (0..n).all(|i| a[(i, i)].is_negative());
    let dominant = is_diagonally_dominant(a, DiscMode::Row)?.dominant
        || is_diagonally_dominant(a, DiscMode::Column)?.dominant;
    Ok(if negative && dominant {
        DominanceVerdict::NegativeRealParts
    } else {
        DominanceVerdict::Inconclusive
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingKind {
    Identity,
    AllOnes,
    Boundary,
    Comparison,
}

/// Diagonal of a positive diagonal similarity `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingMatrix<T> {
    pub kind: ScalingKind,
    pub d: Vec<T>,
}

impl<T: Scalar> ScalingMatrix<T> {
    pub fn apply(&self, a: &Matrix<T>) -> Matrix<T> {
        a.diagonal_similarity(&self.d)
    }

    pub fn to_f64(&self) -> ScalingMatrix<f64> {
        ScalingMatrix {
            kind: self.kind,
            d: self.d.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// `D = diag(alpha, 1, ..., 1)` with `alpha = 1 + r(n+2) / (r1 x1)`.
///
/// Column `j >= 2` of `D J D^-1` then has zero dominance slack apart from its
/// own outflow; column 1 is strictly dominant exactly when
/// `(r1 x2 + rn) r(n+2) / x1 > (m-1) r1 rn`.
pub fn scaling_all_ones<T: Scalar>(params: &ModelParams, rates: &[T], x: &[T]) -> ScalingMatrix<T> {
    let mut d = vec![T::one(); params.n];
    d[0] = T::one() + r(rates, params.n + 2).clone() / (r(rates, 1).clone() * x[0].clone());
    ScalingMatrix {
        kind: ScalingKind::AllOnes,
        d,
    }
}

/// Scaling for the steady state near the boundary, where `xn` is large.
///
/// `d1` makes column 2 balanced, and for `n > 3` the pair `d(n-1), dn`
/// balances the last two columns:
///
/// ```text
/// d(n-1) = A (P + Q) / (A P + A Q + B Q + C P + C Q)
/// dn     = A P       / (A P + A Q + B Q + C P + C Q)
/// ```
///
/// with `A = r(n-2) x(n-2)`, `B = r(n-1) xn`, `C = r(2n-1)`,
/// `P = r(n-1) x(n-1)`, `Q = r(2n)`. For `n = 3` the middle entry is 1 and
/// `d3 = r2 x2 / (r2 x2 + r6)`.
pub fn scaling_boundary<T: Scalar>(params: &ModelParams, rates: &[T], x: &[T]) -> ScalingMatrix<T> {
    let n = params.n;
    let rr = |j: usize| r(rates, j).clone();
    let xx = |i: usize| x[i - 1].clone();
    let mut d = vec![T::one(); n];
    if n == 3 {
        let denom3 = rr(2) * xx(2) + rr(6);
        d[2] = rr(2) * xx(2) / denom3.clone();
        let numer = rr(1) * rr(2) * xx(1) * xx(2)
            + rr(1) * rr(6) * xx(1)
            + rr(2) * rr(5) * xx(2)
            + rr(2) * rr(6) * xx(3)
            + rr(5) * rr(6);
        d[0] = numer / (rr(1) * xx(1) * denom3);
    } else {
        d[0] = (rr(1) * xx(1) + rr(n + 2)) / (rr(1) * xx(1));
        let a = rr(n - 2) * xx(n - 2);
        let b = rr(n - 1) * xx(n);
        let c = rr(2 * n - 1);
        let p = rr(n - 1) * xx(n - 1);
        let q = rr(2 * n);
        let denom = a.clone() * p.clone()
            + a.clone() * q.clone()
            + b * q.clone()
            + c.clone() * p.clone()
            + c * q.clone();
        d[n - 2] = a.clone() * (p.clone() + q) / denom.clone();
        d[n - 1] = a * p / denom;
    }
    ScalingMatrix {
        kind: ScalingKind::Boundary,
        d,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedStable,
    EigenStable,
    Unstable,
    Degenerate,
}

impl Verdict {
    pub fn is_stable(self) -> bool {
        matches!(self, Verdict::CertifiedStable | Verdict::EigenStable)
    }
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Column discs of the certified matrix, or of `J` itself otherwise.
    pub discs: Vec<GershgorinDisc>,
    pub scaling: Option<ScalingMatrix<f64>>,
    #[serde(with = "complex_pairs")]
    pub eigenvalues: Vec<Complex64>,
    /// Smallest column dominance slack of the certified matrix, or of `J`
    /// when no certificate was found.
    pub dominant_margin: f64,
    pub max_real_part: f64,
    pub nondegenerate: bool,
    /// Whether the eigenvalues agree with an issued certificate.
    pub eigen_confirms: bool,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.verdict.is_stable()
    }
}

/// Relative band around zero inside which eigenvalue real parts are not
/// trusted to decide stability.
pub const EIGEN_TOL: f64 = 1e-9;

/// Floating-point dominance slack required when no exact arithmetic is
/// available.
pub const FLOAT_MARGIN: f64 = 1e-10;

fn eigen_verdict(j: &Matrix<f64>, values: &[Complex64]) -> Verdict {
    let tol = EIGEN_TOL * j.inf_norm();
    let max_re = max_real_part(values);
    if max_re < -tol {
        Verdict::EigenStable
    } else if max_re > tol {
        Verdict::Unstable
    } else {
        Verdict::Degenerate
    }
}

fn max_real_part(values: &[Complex64]) -> f64 {
    values.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Scaling read off the comparison matrix `M` (`m_jj = |a_jj|`,
/// `m_ij = -|a_ij|`): solve `M^T d = 1` in floating point and keep `d` if it
/// is positive. Every column of `D A D^-1` then has slack `1 / d_j`, so the
/// check survives rounding `d` to a rational.
pub fn scaling_comparison<T: Scalar>(a: &Matrix<T>) -> Option<ScalingMatrix<T>> {
    let n = a.rows();
    let af = a.to_f64();
    let mt = Matrix::from_rows(
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { af[(i, i)].abs() } else { -af[(i, j)].abs() })
                    .collect()
            })
            .collect(),
    );
    let d = mt.solve(&vec![1.0; n])?;
    if !d.iter().all(|v| v.is_finite() && *v > 0.0) {
        return None;
    }
    let top = d.iter().cloned().fold(0.0, f64::max);
    Some(ScalingMatrix {
        kind: ScalingKind::Comparison,
        d: d.iter().map(|v| T::from_f64(v / top)).collect(),
    })
}

/// Certificate check on a candidate `D J D^-1`: negative diagonal and
/// column dominance.
pub fn certifies<T: Scalar>(scaled: &Matrix<T>, min_margin: &T) -> Result<(bool, T)> {
    let dom = is_diagonally_dominant(scaled, DiscMode::Column)?;
    let negative = (0..scaled.rows()).all(|i| scaled[(i, i)].is_negative());
    Ok((negative && dom.margin >= *min_margin, dom.margin))
}

fn report<T: Scalar>(j: &Matrix<T>, scalings: &[ScalingMatrix<T>], min_margin: T) -> Result<StabilityReport> {
    let jf = j.to_f64();
    let det = jf.determinant()?;
    let nondegenerate = is_nondegenerate(&jf, det);
    let values = eigenvalues(&jf)?;
    let max_re = max_real_part(&values);

    let identity = ScalingMatrix {
        kind: ScalingKind::Identity,
        d: vec![T::one(); j.rows()],
    };
    let mut best: Option<(ScalingMatrix<T>, Matrix<T>, T)> = None;
    if nondegenerate {
        let comparison = scaling_comparison(j);
        for scaling in std::iter::once(&identity).chain(scalings).chain(comparison.as_ref()) {
            if scaling.d.iter().any(|v| !v.is_positive()) {
                continue;
            }
            let scaled = scaling.apply(j);
            let (ok, margin) = certifies(&scaled, &min_margin)?;
            if ok {
                best = Some((scaling.clone(), scaled, margin));
                break;
            }
        }
    }
    let (verdict, discs, scaling, margin) = match best {
        Some((scaling, scaled, margin)) => (
            Verdict::CertifiedStable,
            gershgorin_discs(&scaled, DiscMode::Column)?,
            Some(scaling.to_f64()),
            margin.to_f64(),
        ),
        None => {
            let verdict = if nondegenerate {
                eigen_verdict(&jf, &values)
            } else {
                Verdict::Degenerate
            };
            let margin = is_diagonally_dominant(j, DiscMode::Column)?.margin.to_f64();
            (verdict, gershgorin_discs(j, DiscMode::Column)?, None, margin)
        }
    };
    Ok(StabilityReport {
        eigen_confirms: verdict != Verdict::CertifiedStable || max_re < 0.0,
        verdict,
        discs,
        scaling,
        eigenvalues: values,
        dominant_margin: margin,
        max_real_part: max_re,
        nondegenerate,
    })
}

/// Classify a bare floating-point matrix: dominance of `J` itself with a
/// positive safety margin, then eigenvalues.
pub fn classify(j: &Matrix<f64>) -> Result<StabilityReport> {
    let margin = FLOAT_MARGIN * j.inf_norm().max(1.0);
    report(j, &[], margin)
}

/// Classify the Jacobian of the fully open sequestration system at `x`,
/// trying both structural scalings and then the comparison-matrix one. With rational inputs the certificate is
/// exact for `J(x)` at the given `x`.
pub fn classify_state<T: Scalar>(params: &ModelParams, rates: &[T], x: &[T]) -> Result<StabilityReport> {
    let j = sequestration_jacobian(params, rates, x);
    let scalings = [scaling_all_ones(params, rates, x), scaling_boundary(params, rates, x)];
    let min_margin = if T::EXACT {
        T::zero()
    } else {
        T::from_f64(FLOAT_MARGIN * j.to_f64().inf_norm().max(1.0))
    };
    report(&j, &scalings, min_margin)
}
