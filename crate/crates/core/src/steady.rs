//! The three positive steady states: the `eps = 0` branch points, Newton
//! refinement, continuation in `eps`, and determinant checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::massaction::{
    conservation_substitute, jacobian_p, phi_map, r, sequestration_jacobian, sequestration_rhs,
    stamp_eps, system_p, FrontRates, ModelParams,
};
use crate::matrix::Matrix;
use crate::region::InequalityId;
use crate::scalar::Scalar;

/// Relative threshold of the scaled determinant test in [`is_nondegenerate`].
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    AllOnes,
    Delta,
    Boundary,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::AllOnes, Branch::Delta, Branch::Boundary];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub x: Vec<f64>,
    #[serde(rename = "residual")]
    pub residual_norm: f64,
    #[serde(rename = "detJ")]
    pub det_j: f64,
    pub nondegenerate: bool,
    pub branch: Branch,
    pub eps: f64,
    /// Coordinates after the change of variables, for the boundary branch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
}

impl SteadyState {
    /// Evaluate residual and determinant of `x` under the full rate vector.
    pub fn assess(
        params: &ModelParams,
        rates: &[f64],
        x: Vec<f64>,
        branch: Branch,
        eps: f64,
    ) -> Self {
        let f = sequestration_rhs(params, rates, &x);
        let jac = sequestration_jacobian(params, rates, &x);
        let det_j = jac.determinant().unwrap_or(0.0);
        Self {
            residual_norm: inf_norm(&f),
            nondegenerate: is_nondegenerate(&jac, det_j),
            det_j,
            x,
            branch,
            eps,
            y: None,
        }
    }

    pub fn jacobian(&self, params: &ModelParams, rates: &[f64]) -> Matrix<f64> {
        sequestration_jacobian(params, rates, &self.x)
    }
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Scaled determinant test: `|det J|` compared against the Hadamard bound
/// `prod_j ||J e_j||_2`, so the verdict does not depend on the units of `x`.
pub fn is_nondegenerate(jac: &Matrix<f64>, det: f64) -> bool {
    let bound: f64 = jac.column_norms().iter().product();
    det.is_finite() && bound > 0.0 && det.abs() > DEGENERACY_TOL * bound
}

fn violated(id: InequalityId) -> Error {
    Error::Precondition(format!("inequality `{id}` does not hold"))
}

/// The two interior steady states of the `eps = 0` system: `(1,...,1)` and
/// the point `delta`.
pub fn delta_branch<T: Scalar>(
    params: &ModelParams,
    front: &FrontRates<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    params.ensure_bistable()?;
    let n = params.n;
    let m = T::from_i64(params.m as i64);
    let m1 = T::from_i64(params.m as i64 - 1);
    let rr = |j: usize| front.get(j).clone();
    let (r1, rn, rn2) = (rr(1), rr(n), rr(n + 2));
    if rr(n - 1) <= m.clone() * rn.clone() {
        return Err(violated(InequalityId::TailDominance));
    }
    if m1.clone() * r1.clone() <= rn2 {
        return Err(violated(InequalityId::ProductionExcess));
    }
    let base = m1.clone() * r1.clone();
    let mut delta = Vec::with_capacity(n);
    delta.push((r1.clone() + rn.clone()) * rn2.clone() / (base.clone() * rn.clone()));
    delta.push((base.clone() - rn2.clone()) * rn.clone() / (r1.clone() * rn2.clone()));
    for i in 3..=n {
        let sign = if i % 2 == 0 { T::one() } else { -T::one() };
        let numer = base.clone() * (rr(i - 1) + sign.clone() * m.clone() * rn.clone())
            - sign * m.clone() * (r1.clone() + rn.clone()) * rn2.clone();
        let prev = delta[i - 2].clone();
        let d = numer / (base.clone() * rr(i - 1) * prev);
        if !d.is_positive() {
            return Err(violated(InequalityId::Alternating(i)));
        }
        delta.push(d);
    }
    Ok((vec![T::one(); n], delta))
}

/// The positive zero `xi` of the `eps = 0` system in the `phi` coordinates.
pub fn boundary_branch(params: &ModelParams, front: &FrontRates<f64>) -> Result<Vec<f64>> {
    params.ensure_bistable()?;
    let n = params.n;
    let m = params.m as f64;
    let rr = |j: usize| *front.get(j);
    let xi = if n == 3 {
        vec![
            (rr(1) + rr(3)) / rr(3),
            (rr(1) + rr(2) + rr(5)) / rr(2),
            (m - 1.0) * rr(1) - rr(5),
        ]
    } else {
        let (r1, rn, rn2, rk) = (rr(1), rr(n), rr(n + 2), rr(n - 2));
        let xi1 = positive_root_h1(r1, rn, rn2, rk);
        let mut xi = vec![xi1, (r1 + rn2 - rk) / (r1 * xi1 + rn2)];
        for i in 3..=n - 2 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let prev = xi[i - 2];
            xi.push((rr(i - 1) - sign * rk) / (rr(i - 1) * prev));
        }
        xi.push((rk + rr(n - 1)) / rr(n - 1));
        xi.push(m * rn * (xi1 - 1.0) - rk);
        xi
    };
    for (i, v) in xi.iter().enumerate() {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(violated(boundary_condition(n, i + 1)));
        }
    }
    Ok(xi)
}

/// The inequality whose failure makes `xi_i` non-positive.
fn boundary_condition(n: usize, i: usize) -> InequalityId {
    if n == 3 {
        return InequalityId::ProductionExcess;
    }
    match i {
        2 => InequalityId::OutflowBound,
        i if i == n => InequalityId::Alternating(n - 1),
        i if i <= n - 2 => InequalityId::OddChain(i - 1),
        _ => InequalityId::TailDominance,
    }
}

/// Coefficients of the quadratic whose positive root is `xi_1`.
pub fn h1_coefficients(r1: f64, rn: f64, rn2: f64, rk: f64) -> [f64; 3] {
    [r1 * rn, r1 * rn2 + rn * rn2 - r1 * rk - r1 * rn, -(r1 + rn) * rn2]
}

fn positive_root_h1(r1: f64, rn: f64, rn2: f64, rk: f64) -> f64 {
    let [a, b, c] = h1_coefficients(r1, rn, rn2, rk);
    // a > 0 > c, so the roots have opposite signs
    let q = -0.5 * (b + b.signum() * (b * b - 4.0 * a * c).sqrt());
    let (u, v) = (q / a, c / q);
    if u > 0.0 {
        u
    } else {
        v
    }
}

/// A square system `F(z) = 0` with analytic Jacobian.
pub trait System {
    fn eval(&self, z: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&self, z: &[f64]) -> Result<Matrix<f64>>;
}

/// `f` in concentration coordinates.
pub struct ConcentrationSystem {
    pub params: ModelParams,
    pub rates: Vec<f64>,
}

impl System for ConcentrationSystem {
    fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(sequestration_rhs(&self.params, &self.rates, z))
    }

    fn jacobian(&self, z: &[f64]) -> Result<Matrix<f64>> {
        Ok(sequestration_jacobian(&self.params, &self.rates, z))
    }
}

/// `p = f o phi`; `r2n` holds `r1..r2n`, inflows are derived.
pub struct PhiSystem {
    pub params: ModelParams,
    pub r2n: Vec<f64>,
}

impl System for PhiSystem {
    fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        system_p(&self.params, &self.r2n, z)
    }

    fn jacobian(&self, z: &[f64]) -> Result<Matrix<f64>> {
        jacobian_p(&self.params, &self.r2n, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            max_halvings: 40,
        }
    }
}

/// Newton's method restricted to the positive orthant.
///
/// A full step that leaves the orthant is halved until it stays inside.
/// The Jacobian is factored at every iterate, including the last, so a
/// singular root is reported rather than returned. Once steps fall to
/// rounding level the iterate is accepted if the residual is within
/// `1e4 * tol`.
pub fn newton_refine(
    system: &dyn System,
    z0: &[f64],
    opts: &NewtonOptions,
) -> Result<(Vec<f64>, usize)> {
    let mut z = z0.to_vec();
    let mut fz = system.eval(&z)?;
    let mut res = inf_norm(&fz);
    for iteration in 0..=opts.max_iter {
        let jac = system.jacobian(&z)?;
        let neg: Vec<f64> = fz.iter().map(|v| -v).collect();
        let step = jac
            .solve(&neg)
            .ok_or(Error::SingularJacobian { iteration })?;
        if res <= opts.tol {
            return Ok((z, iteration));
        }
        let tiny = inf_norm(&step) <= 1e-15 * (1.0 + inf_norm(&z));
        if tiny && res <= 1e4 * opts.tol {
            return Ok((z, iteration));
        }
        if iteration == opts.max_iter {
            break;
        }
        let mut lambda = 1.0;
        let mut halvings = 0;
        let next = loop {
            let trial: Vec<f64> = z.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            if trial.iter().all(|v| *v > 0.0 && v.is_finite()) {
                break trial;
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(Error::LeftPositiveOrthant {
                    halvings: opts.max_halvings,
                });
            }
            lambda *= 0.5;
        };
        z = next;
        fz = system.eval(&z)?;
        res = inf_norm(&fz);
    }
    Err(Error::NewtonMaxIter {
        iterations: opts.max_iter,
        residual: res,
    })
}

/// Full `3n` rate vector in floating point for a given `eps`.
pub fn rates_at_eps(params: &ModelParams, front: &FrontRates<f64>, eps: f64) -> Result<Vec<f64>> {
    Ok(conservation_substitute(params, &stamp_eps(params, front, &eps))?.into_values())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub steps: usize,
    /// First positive `eps` as a fraction of the target.
    pub start_fraction: f64,
    /// Give up once a bisected step is smaller than this fraction of the
    /// scheduled step.
    pub min_step_fraction: f64,
    pub newton: NewtonOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            steps: 20,
            start_fraction: 1e-3,
            min_step_fraction: 1e-6,
            newton: NewtonOptions::default(),
        }
    }
}

/// Geometric schedule from `target * start_fraction` to `target`.
pub fn eps_schedule(target: f64, opts: &ContinuationOptions) -> Vec<f64> {
    let steps = opts.steps.max(1);
    if steps == 1 {
        return vec![target];
    }
    let start = target * opts.start_fraction;
    let ratio = (target / start).powf(1.0 / (steps - 1) as f64);
    let mut out: Vec<f64> = (0..steps).map(|k| start * ratio.powi(k as i32)).collect();
    out[steps - 1] = target;
    out
}

/// Follow one `eps = 0` branch to `eps_target`.
pub fn continue_in_eps(
    params: &ModelParams,
    front: &FrontRates<f64>,
    branch: Branch,
    eps_target: f64,
    opts: &ContinuationOptions,
) -> Result<SteadyState> {
    params.ensure_bistable()?;
    if !(eps_target > 0.0 && eps_target.is_finite()) {
        return Err(Error::InvalidParams(format!("eps must be positive, got {eps_target}")));
    }
    let final_rates = rates_at_eps(params, front, eps_target)?;
    let newton = NewtonOptions {
        tol: opts.newton.tol * (1.0 + inf_norm(&final_rates)),
        ..opts.newton
    };
    match branch {
        Branch::AllOnes => Ok(SteadyState::assess(
            params,
            &final_rates,
            vec![1.0; params.n],
            branch,
            eps_target,
        )),
        Branch::Delta => {
            let (_, seed) = delta_branch(params, front)?;
            let x = follow(eps_target, seed, opts, |eps, z| {
                let system = ConcentrationSystem {
                    params: *params,
                    rates: rates_at_eps(params, front, eps)?,
                };
                newton_refine(&system, z, &newton).map(|(z, _)| z)
            })?;
            Ok(SteadyState::assess(params, &final_rates, x, branch, eps_target))
        }
        Branch::Boundary => {
            let seed = boundary_branch(params, front)?;
            let y = follow(eps_target, seed, opts, |eps, z| {
                let system = PhiSystem {
                    params: *params,
                    r2n: stamp_eps(params, front, &eps),
                };
                newton_refine(&system, z, &newton).map(|(z, _)| z)
            })?;
            let x = phi_map(&y, &eps_target)?;
            let mut state = SteadyState::assess(params, &final_rates, x, branch, eps_target);
            state.y = Some(y);
            Ok(state)
        }
    }
}

fn follow(
    target: f64,
    seed: Vec<f64>,
    opts: &ContinuationOptions,
    mut solve: impl FnMut(f64, &[f64]) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let mut good_eps = 0.0;
    let mut good = seed;
    for scheduled in eps_schedule(target, opts) {
        let min_step = (scheduled - good_eps) * opts.min_step_fraction;
        let mut trial = scheduled;
        loop {
            match solve(trial, &good) {
                Ok(z) => {
                    good = z;
                    good_eps = trial;
                    if trial == scheduled {
                        break;
                    }
                    trial = scheduled;
                }
                Err(_) => {
                    let step = trial - good_eps;
                    if step * 0.5 < min_step {
                        return Err(Error::ContinuationStalled {
                            last_good_eps: good_eps,
                            failed_eps: trial,
                        });
                    }
                    trial = good_eps + step * 0.5;
                }
            }
        }
    }
    Ok(good)
}

/// The determinant of
///
/// ```text
/// [a1+b1  a2                       ]
/// [b1     a2+b2  a3                ]
/// [        ...    ...    ...       ]
/// [              b(n-1)   an       ]
/// ```
///
/// which is `a1 a2 ... an`.
pub fn tridiagonal_det<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(b.len() + 1, a.len());
    a.iter().fold(T::one(), |acc, v| acc * v.clone())
}

pub fn tridiagonal_matrix<T: Scalar>(a: &[T], b: &[T]) -> Matrix<T> {
    let n = a.len();
    let mut mat = Matrix::zeros(n, n);
    for i in 0..n {
        mat[(i, i)] = a[i].clone();
        if i + 1 < n {
            mat[(i, i)] = a[i].clone() + b[i].clone();
            mat[(i, i + 1)] = a[i + 1].clone();
            mat[(i + 1, i)] = b[i].clone();
        }
    }
    mat
}

/// Subtract each row from the one above it, bottom to top, which leaves a
/// lower triangular matrix; returns the product of its diagonal.
pub fn tridiagonal_det_by_elimination<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut mat = tridiagonal_matrix(a, b);
    let n = a.len();
    for k in (1..n).rev() {
        for j in 0..n {
            let v = mat[(k - 1, j)].clone() - mat[(k, j)].clone();
            mat[(k - 1, j)] = v;
        }
    }
    (0..n).fold(T::one(), |acc, i| acc * mat[(i, i)].clone())
}

/// `det J` when every eps-slot is zero:
/// `r2...r(n-1) x2...x(n-1) ((m-1) r1 rn x1 - (rn + r1 x2) r(n+2))`.
pub fn det_j_closed_form<T: Scalar>(params: &ModelParams, rates: &[T], x: &[T]) -> Result<T> {
    let n = params.n;
    if rates.len() < 2 * n || x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: x.len(),
        });
    }
    if let Some(j) = params.eps_slots().into_iter().find(|&j| !r(rates, j).is_zero()) {
        return Err(Error::Precondition(format!(
            "closed-form determinant needs r{j} = 0"
        )));
    }
    let rr = |j: usize| r(rates, j).clone();
    let mut prod = T::one();
    for i in 2..n {
        prod = prod * rr(i) * x[i - 1].clone();
    }
    let m1 = T::from_i64(params.m as i64 - 1);
    let tail = m1 * rr(1) * rr(n) * x[0].clone() - (rr(n) + rr(1) * x[1].clone()) * rr(n + 2);
    Ok(prod * tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::massaction::{conservation_substitute, system_g};
    use crate::scalar::{rat, Rational};
    use num_traits::Signed;

    fn published() -> (ModelParams, FrontRates<f64>) {
        let p = ModelParams::bistable(6, 5).unwrap();
        (p, FrontRates::new(&p, vec![2.0, 1.0, 6.0, 7.0, 1.0], 5.0).unwrap())
    }

    fn close(a: &[f64], b: &[f64], rel: f64) -> bool {
        a.iter().zip(b).all(|(u, v)| (u - v).abs() <= rel * v.abs())
    }

    #[test]
    fn delta_small_case_exact() {
        let p = ModelParams::bistable(2, 3).unwrap();
        let front = FrontRates::new(&p, vec![rat(2, 1), rat(3, 1), rat(1, 1)], rat(1, 1)).unwrap();
        let (ones, delta) = delta_branch(&p, &front).unwrap();
        assert_eq!(ones, vec![rat(1, 1); 3]);
        assert_eq!(delta, vec![rat(3, 2), rat(1, 2), rat(8, 3)]);

        let mut r2n = stamp_eps(&p, &front, &rat(0, 1));
        let rates = conservation_substitute(&p, &r2n).unwrap();
        for x in [&ones, &delta] {
            let f = sequestration_rhs(&p, rates.values(), x);
            assert!(f.iter().all(|v| v == &rat(0, 1)));
        }
        r2n[1] = rat(1, 1);
        assert!(matches!(
            delta_branch(&p, &FrontRates::from_rates(&p, &r2n).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boundary_worked_example() {
        let (p, front) = published();
        let xi = boundary_branch(&p, &front).unwrap();
        assert!(close(&xi, &[2.5, 0.1, 70.0, 13.0 / 7.0, 3.0], 1e-13), "{xi:?}");
        let g = system_g(&p, &front, &xi).unwrap();
        assert!(inf_norm(&g) < 1e-12);
        assert_eq!(h1_coefficients(2.0, 1.0, 5.0, 6.0), [2.0, 1.0, -15.0]);
    }

    #[test]
    fn boundary_small_case() {
        for m in 2..7u32 {
            let p = ModelParams::bistable(m, 3).unwrap();
            let front =
                FrontRates::new(&p, vec![2.0, m as f64 + 1.0, 1.0], m as f64 - 1.0).unwrap();
            let xi = boundary_branch(&p, &front).unwrap();
            assert_eq!(xi, vec![3.0, 2.0, m as f64 - 1.0]);
        }
    }

    #[test]
    fn h1_root_selected_by_sign() {
        // b > 0 and b < 0 both yield the positive root
        for (r1, rn, rn2, rk) in [(2.0, 1.0, 5.0, 6.0), (1.0, 1.0, 0.1, 20.0), (3.0, 0.5, 9.0, 0.2)] {
            let root = positive_root_h1(r1, rn, rn2, rk);
            let [a, b, c] = h1_coefficients(r1, rn, rn2, rk);
            assert!(root > 0.0);
            assert!((a * root * root + b * root + c).abs() < 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn newton_from_published_guess() {
        let (p, front) = published();
        let system = ConcentrationSystem {
            params: p,
            rates: rates_at_eps(&p, &front, 0.006).unwrap(),
        };
        let (x, _) = newton_refine(&system, &[1.9, 0.28, 20.0, 0.011, 150.0], &NewtonOptions {
            tol: 1e-10,
            ..Default::default()
        })
        .unwrap();
        assert!(close(&x, &[1.92826, 0.276459, 20.0808, 0.0110718, 150.601], 5e-6), "{x:?}");

        let (same, iters) = newton_refine(&system, &[1.0; 5], &NewtonOptions::default()).unwrap();
        assert_eq!(same, vec![1.0; 5]);
        assert_eq!(iters, 0);
    }

    #[test]
    fn newton_reports_singular_root() {
        // (r1 + r3) r5 = (m - 1) r1 r3 with m = 3: the two interior states merge at (1,1,1)
        let p = ModelParams::bistable(3, 3).unwrap();
        let front = FrontRates::new(&p, vec![1.0, 4.0, 1.0], 1.0).unwrap();
        let system = ConcentrationSystem {
            params: p,
            rates: rates_at_eps(&p, &front, 0.0).unwrap(),
        };
        assert!(matches!(
            newton_refine(&system, &[1.0; 3], &NewtonOptions::default()),
            Err(Error::SingularJacobian { iteration: 0 })
        ));
        let (_, delta) = delta_branch(&p, &front).unwrap();
        assert_eq!(delta[0], 1.0);
    }

    #[test]
    fn continuation_reaches_published_states() {
        let (p, front) = published();
        let opts = ContinuationOptions::default();
        let ones = continue_in_eps(&p, &front, Branch::AllOnes, 0.006, &opts).unwrap();
        assert_eq!(ones.x, vec![1.0; 5]);
        assert!(ones.residual_norm < 1e-12);
        let mid = continue_in_eps(&p, &front, Branch::Delta, 0.006, &opts).unwrap();
        assert!(close(&mid.x, &[1.69795, 0.382186, 12.5363, 0.028445, 54.5727], 5e-5), "{:?}", mid.x);
        let far = continue_in_eps(&p, &front, Branch::Boundary, 0.006, &opts).unwrap();
        assert!(close(&far.x, &[1.92826, 0.276459, 20.0808, 0.0110718, 150.601], 5e-5), "{:?}", far.x);
        for s in [&ones, &mid, &far] {
            assert!(s.nondegenerate, "{s:?}");
            assert!(s.residual_norm < 1e-10 * 14.0);
        }
        assert!(far.y.is_some());
        assert!(far.det_j < 0.0 && mid.det_j > 0.0 && ones.det_j < 0.0);
    }

    #[test]
    fn schedule_shape() {
        let s = eps_schedule(0.006, &ContinuationOptions::default());
        assert_eq!(s.len(), 20);
        assert!((s[0] - 6e-6).abs() < 1e-18);
        assert_eq!(s[19], 0.006);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tridiagonal_examples() {
        let a = [2.0, 3.0, 4.0];
        let b = [5.0, 7.0];
        assert_eq!(tridiagonal_det(&a, &b), 24.0);
        assert!((tridiagonal_matrix(&a, &b).determinant().unwrap() - 24.0).abs() < 1e-12);
        assert_eq!(tridiagonal_det_by_elimination(&a, &b), 24.0);
        assert_eq!(tridiagonal_det(&[1.0, 0.0, 3.0], &[9.0, -2.0]), 0.0);
    }

    #[test]
    fn closed_form_determinant() {
        let p = ModelParams::bistable(2, 3).unwrap();
        let r2n: Vec<Rational> = [2, 3, 1, 0, 1, 0].iter().map(|&k| rat(k, 1)).collect();
        let rates = conservation_substitute(&p, &r2n).unwrap();
        let ones = vec![rat(1, 1); 3];
        let det = det_j_closed_form(&p, rates.values(), &ones).unwrap();
        assert_eq!(det, rat(-3, 1));
        assert_eq!(sequestration_jacobian(&p, rates.values(), &ones).determinant().unwrap(), det);

        let (_, delta) = delta_branch(&p, &FrontRates::from_rates(&p, &r2n).unwrap()).unwrap();
        let det2 = det_j_closed_form(&p, rates.values(), &delta).unwrap();
        assert!(det2.is_positive());

        let mut eps_rates = rates.into_values();
        eps_rates[3] = rat(1, 100);
        assert!(det_j_closed_form(&p, &eps_rates, &ones).is_err());
    }

    #[test]
    fn nondegeneracy_is_scale_free() {
        let a = Matrix::from_rows(vec![vec![-1.0, 0.0], vec![0.0, -1e-8]]);
        assert!(is_nondegenerate(&a, a.determinant().unwrap()));
        let s = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-14]]);
        assert!(!is_nondegenerate(&s, s.determinant().unwrap()));
        assert!(!is_nondegenerate(&Matrix::zeros(2, 2), 0.0));
    }
}
