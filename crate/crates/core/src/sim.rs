//! Time integration of mass-action systems and basin probes around steady
//! states.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::massaction::{jacobian, ode_rhs, sequestration_jacobian, sequestration_rhs, ModelParams};
use crate::matrix::Matrix;
use crate::network::ReactionNetwork;

/// Right-hand side `f` of `dx/dt = f(x)` with its Jacobian.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    fn jacobian(&self, x: &[f64]) -> Matrix<f64>;
}

/// Any reaction network under mass action.
pub struct MassActionField<'a> {
    net: &'a ReactionNetwork,
    rates: &'a [f64],
}

impl<'a> MassActionField<'a> {
    pub fn new(net: &'a ReactionNetwork, rates: &'a [f64]) -> Result<Self> {
        let needed = net.reactions().iter().map(|r| r.rate_index).max().unwrap_or(0);
        if rates.len() < needed {
            return Err(Error::Dimension {
                expected: needed,
                found: rates.len(),
            });
        }
        Ok(Self { net, rates })
    }
}

impl VectorField for MassActionField<'_> {
    fn dim(&self) -> usize {
        self.net.num_species()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        ode_rhs(self.net, self.rates, x).expect("dimensions checked at construction")
    }

    fn jacobian(&self, x: &[f64]) -> Matrix<f64> {
        jacobian(self.net, self.rates, x).expect("dimensions checked at construction")
    }
}

/// The fully open sequestration system, evaluated directly.
pub struct SequestrationField<'a> {
    params: ModelParams,
    rates: &'a [f64],
}

impl<'a> SequestrationField<'a> {
    pub fn new(params: &ModelParams, rates: &'a [f64]) -> Result<Self> {
        if rates.len() != params.num_rates() {
            return Err(Error::Dimension {
                expected: params.num_rates(),
                found: rates.len(),
            });
        }
        Ok(Self { params: *params, rates })
    }
}

impl VectorField for SequestrationField<'_> {
    fn dim(&self) -> usize {
        self.params.n
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        sequestration_rhs(&self.params, self.rates, x)
    }

    fn jacobian(&self, x: &[f64]) -> Matrix<f64> {
        sequestration_jacobian(&self.params, self.rates, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Dormand-Prince 5(4).
    Dopri5,
    /// Linearly implicit Rosenbrock 2(3), L-stable.
    Rosenbrock,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub t_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Stop when `||x - target||_inf <= converge_tol * max(1, ||target||_inf)`.
    pub converge_tol: f64,
    pub method: Method,
    pub max_steps: usize,
    /// Keep every accepted step, or only the endpoints.
    pub record: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            t_max: 1e4,
            rtol: 1e-8,
            atol: 1e-10,
            converge_tol: 1e-8,
            method: Method::Dopri5,
            max_steps: 2_000_000,
            record: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Terminal {
    Converged { target: usize },
    MaxTime,
    LeftDomain { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub terminal: Terminal,
    pub accepted: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// CSV with header `t,x1,...,xn`, one row per recorded step.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t:e}");
            for v in x {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

struct Recorder {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    record: bool,
}

impl Recorder {
    fn push(&mut self, t: f64, x: &[f64]) {
        if self.record || self.times.is_empty() {
            self.times.push(t);
            self.states.push(x.to_vec());
        }
    }

    fn finish(mut self, t: f64, x: &[f64], terminal: Terminal, accepted: usize, rejected: usize) -> Trajectory {
        if self.times.last() != Some(&t) {
            self.times.push(t);
            self.states.push(x.to_vec());
        }
        Trajectory {
            times: self.times,
            states: self.states,
            terminal,
            accepted,
            rejected,
        }
    }
}

fn error_norm(err: &[f64], x: &[f64], x_new: &[f64], opts: &IntegrateOptions) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(x.iter().zip(x_new))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / err.len().max(1) as f64).sqrt()
}

fn converged_to(x: &[f64], targets: &[Vec<f64>], tol: f64) -> Option<usize> {
    targets.iter().position(|t| {
        let scale = t.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        x.iter().zip(t).all(|(a, b)| (a - b).abs() <= tol * scale)
    })
}

/// Proposed step from `x` with size `h`: new state and error estimate.
trait Stepper {
    const ORDER: f64;
    fn step(&mut self, field: &dyn VectorField, x: &[f64], h: f64) -> Option<(Vec<f64>, Vec<f64>)>;
    fn accept(&mut self) {}
}

struct Dopri5 {
    /// `f(x)` at the current point, carried over between accepted steps.
    f0: Option<Vec<f64>>,
    f_last: Option<Vec<f64>>,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(x: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    (0..x.len())
        .map(|i| x[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
        .collect()
}

impl Stepper for Dopri5 {
    const ORDER: f64 = 5.0;

    fn step(&mut self, field: &dyn VectorField, x: &[f64], h: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let k1 = self.f0.get_or_insert_with(|| field.eval(x)).clone();
        let k2 = field.eval(&axpy(x, h, &[(A21, &k1)]));
        let k3 = field.eval(&axpy(x, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = field.eval(&axpy(x, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = field.eval(&axpy(x, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = field.eval(&axpy(
            x,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let x_new = axpy(x, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = field.eval(&x_new);
        let err: Vec<f64> = (0..x.len())
            .map(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
            .collect();
        self.f_last = Some(k7);
        Some((x_new, err))
    }

    fn accept(&mut self) {
        self.f0 = self.f_last.take();
    }
}

struct Rosenbrock23;

impl Stepper for Rosenbrock23 {
    const ORDER: f64 = 3.0;

    fn step(&mut self, field: &dyn VectorField, x: &[f64], h: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = x.len();
        let d = 1.0 / (2.0 + std::f64::consts::SQRT_2);
        let e32 = 6.0 + std::f64::consts::SQRT_2;
        let jac = field.jacobian(x);
        let mut w = Matrix::<f64>::identity(n);
        for i in 0..n {
            for j in 0..n {
                w[(i, j)] -= h * d * jac[(i, j)];
            }
        }
        let lu = w.lu()?;
        let f0 = field.eval(x);
        let k1 = lu.solve(&f0);
        let f1 = field.eval(&axpy(x, 0.5 * h, &[(1.0, &k1)]));
        let rhs2: Vec<f64> = (0..n).map(|i| f1[i] - k1[i]).collect();
        let k2: Vec<f64> = lu.solve(&rhs2).iter().zip(&k1).map(|(a, b)| a + b).collect();
        let x_new = axpy(x, h, &[(1.0, &k2)]);
        let f2 = field.eval(&x_new);
        let rhs3: Vec<f64> = (0..n)
            .map(|i| f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]))
            .collect();
        let k3 = lu.solve(&rhs3);
        let err: Vec<f64> = (0..n).map(|i| h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i])).collect();
        Some((x_new, err))
    }
}

/// Integrate `dx/dt = f(x)` from `x0` until `t_max`, convergence to one of
/// `targets`, or loss of positivity.
pub fn integrate(
    field: &dyn VectorField,
    x0: &[f64],
    targets: &[Vec<f64>],
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if x0.len() != field.dim() {
        return Err(Error::Dimension {
            expected: field.dim(),
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Precondition("initial state must be positive".into()));
    }
    if !(opts.t_max >= 0.0 && opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParams("t_max must be non-negative and tolerances positive".into()));
    }
    if targets.iter().any(|t| t.len() != x0.len()) {
        return Err(Error::Dimension {
            expected: x0.len(),
            found: targets.iter().map(Vec::len).find(|&l| l != x0.len()).unwrap_or(0),
        });
    }
    Ok(match opts.method {
        Method::Dopri5 => run(
            field,
            x0,
            targets,
            opts,
            Dopri5 {
                f0: None,
                f_last: None,
            },
        ),
        Method::Rosenbrock => run(field, x0, targets, opts, Rosenbrock23),
    })
}

fn initial_step(field: &dyn VectorField, x: &[f64], opts: &IntegrateOptions) -> f64 {
    let f = field.eval(x);
    let rate = x
        .iter()
        .zip(&f)
        .map(|(v, d)| d.abs() / (opts.atol + v.abs()))
        .fold(0.0, f64::max);
    let h = if rate > 0.0 { 1e-2 / rate } else { 1e-3 };
    h.min(opts.t_max).max(1e-12)
}

fn run<S: Stepper>(
    field: &dyn VectorField,
    x0: &[f64],
    targets: &[Vec<f64>],
    opts: &IntegrateOptions,
    mut stepper: S,
) -> Trajectory {
    let mut rec = Recorder {
        times: Vec::new(),
        states: Vec::new(),
        record: opts.record,
    };
    let mut t = 0.0;
    let mut x = x0.to_vec();
    rec.push(t, &x);
    if let Some(k) = converged_to(&x, targets, opts.converge_tol) {
        return rec.finish(t, &x, Terminal::Converged { target: k }, 0, 0);
    }
    if opts.t_max == 0.0 {
        return rec.finish(t, &x, Terminal::MaxTime, 0, 0);
    }
    let mut h = initial_step(field, &x, opts);
    let (mut accepted, mut rejected) = (0, 0);
    let exponent = 1.0 / S::ORDER;
    while t < opts.t_max {
        if accepted + rejected >= opts.max_steps {
            let message = format!("step budget of {} exhausted at t = {t:e}", opts.max_steps);
            return rec.finish(t, &x, Terminal::LeftDomain { message }, accepted, rejected);
        }
        h = h.min(opts.t_max - t);
        if h <= 1e-14 * t.max(1.0) {
            let message = format!("step size underflow at t = {t:e}");
            return rec.finish(t, &x, Terminal::LeftDomain { message }, accepted, rejected);
        }
        let Some((x_new, err)) = stepper.step(field, &x, h) else {
            rejected += 1;
            h *= 0.5;
            continue;
        };
        if x_new.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            rejected += 1;
            h *= 0.5;
            continue;
        }
        let e = error_norm(&err, &x, &x_new, opts);
        if !e.is_finite() {
            rejected += 1;
            h *= 0.5;
            continue;
        }
        let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-exponent)).clamp(0.2, 5.0) };
        if e > 1.0 {
            rejected += 1;
            h *= factor.min(1.0);
            continue;
        }
        stepper.accept();
        accepted += 1;
        t = if opts.t_max - (t + h) <= 1e-12 * opts.t_max { opts.t_max } else { t + h };
        x = x_new;
        rec.push(t, &x);
        if let Some(k) = converged_to(&x, targets, opts.converge_tol) {
            return rec.finish(t, &x, Terminal::Converged { target: k }, accepted, rejected);
        }
        h *= factor;
    }
    rec.finish(t, &x, Terminal::MaxTime, accepted, rejected)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinCount {
    pub target: usize,
    pub samples: usize,
    /// Runs that ended at each target, indexed like `targets`.
    pub reached: Vec<usize>,
    /// Runs that hit `t_max` or left the positive orthant.
    pub unresolved: usize,
}

impl BasinCount {
    pub fn returned(&self) -> usize {
        self.reached[self.target]
    }

    pub fn fraction_returned(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        self.returned() as f64 / self.samples as f64
    }
}

/// Start `samples` runs around each target and count where they end.
///
/// Starting points are `x*_i (1 + radius u_i)` with `u` uniform in
/// `[-1, 1]^n`, so every start stays positive for `radius < 1`. Sample `k`
/// around target `j` uses its own stream derived from `seed`, which makes
/// the counts independent of thread scheduling.
pub fn basin_probe(
    field: &dyn VectorField,
    targets: &[Vec<f64>],
    radius: f64,
    samples: usize,
    seed: u64,
    opts: &IntegrateOptions,
) -> Result<Vec<BasinCount>> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidParams(format!("radius must lie in (0, 1), got {radius}")));
    }
    let opts = IntegrateOptions { record: false, ..*opts };
    let mut out = Vec::with_capacity(targets.len());
    for (j, target) in targets.iter().enumerate() {
        let ends = (0..samples)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((j as u64) << 32) | k as u64);
                let x0: Vec<f64> = target
                    .iter()
                    .map(|v| v * (1.0 + radius * rng.gen_range(-1.0..=1.0)))
                    .collect();
                integrate(field, &x0, targets, &opts).map(|tr| tr.terminal)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut reached = vec![0; targets.len()];
        let mut unresolved = 0;
        for end in ends {
            match end {
                Terminal::Converged { target } => reached[target] += 1,
                _ => unresolved += 1,
            }
        }
        out.push(BasinCount {
            target: j,
            samples,
            reached,
            unresolved,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::massaction::{conservation_substitute, stamp_eps, FrontRates};
    use crate::network::open_sequestration;
    use crate::steady::{continue_in_eps, Branch, ContinuationOptions};

    struct Decay(f64);

    impl VectorField for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: &[f64]) -> Vec<f64> {
            vec![-self.0 * x[0]]
        }
        fn jacobian(&self, _: &[f64]) -> Matrix<f64> {
            Matrix::from_rows(vec![vec![-self.0]])
        }
    }

    fn published() -> (ModelParams, Vec<f64>, Vec<Vec<f64>>) {
        let p = ModelParams::bistable(6, 5).unwrap();
        let front = FrontRates::new(&p, vec![2.0, 1.0, 6.0, 7.0, 1.0], 5.0).unwrap();
        let rates = conservation_substitute(&p, &stamp_eps(&p, &front, &0.006))
            .unwrap()
            .into_values();
        let states = Branch::ALL
            .iter()
            .map(|&b| continue_in_eps(&p, &front, b, 0.006, &ContinuationOptions::default()).unwrap().x)
            .collect();
        (p, rates, states)
    }

    #[test]
    fn exponential_decay_both_methods() {
        for method in [Method::Dopri5, Method::Rosenbrock] {
            let opts = IntegrateOptions {
                t_max: 2.0,
                method,
                ..Default::default()
            };
            let tr = integrate(&Decay(1.5), &[1.0], &[], &opts).unwrap();
            assert_eq!(tr.terminal, Terminal::MaxTime);
            assert_eq!(tr.final_time(), 2.0);
            let exact = (-3.0f64).exp();
            let tol = if method == Method::Dopri5 { 1e-7 } else { 1e-5 };
            assert!((tr.last_state()[0] - exact).abs() < tol, "{method:?}: {}", tr.last_state()[0]);
            assert!(tr.times.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rosenbrock_handles_stiff_decay() {
        let opts = IntegrateOptions {
            t_max: 10.0,
            method: Method::Rosenbrock,
            ..Default::default()
        };
        let tr = integrate(&Decay(1e6), &[1.0], &[vec![1e-300]], &opts).unwrap();
        assert!(tr.accepted < 2000, "{} steps", tr.accepted);
    }

    #[test]
    fn steady_state_stays_put() {
        let (p, rates, states) = published();
        let field = SequestrationField::new(&p, &rates).unwrap();
        let opts = IntegrateOptions {
            t_max: 100.0,
            ..Default::default()
        };
        let tr = integrate(&field, &states[0], &[], &opts).unwrap();
        for x in &tr.states {
            assert!(x.iter().zip(&states[0]).all(|(a, b)| (a - b).abs() < 1e-8));
        }
    }

    #[test]
    fn perturbed_stable_state_returns() {
        let (p, rates, states) = published();
        let field = SequestrationField::new(&p, &rates).unwrap();
        let mut x0 = states[0].clone();
        for (i, v) in x0.iter_mut().enumerate() {
            *v += 0.01 * if i % 2 == 0 { 1.0 } else { -1.0 } / (5f64).sqrt();
        }
        let tr = integrate(&field, &x0, &states, &IntegrateOptions::default()).unwrap();
        assert_eq!(tr.terminal, Terminal::Converged { target: 0 });
    }

    #[test]
    fn middle_state_escapes() {
        let (p, rates, states) = published();
        let field = SequestrationField::new(&p, &rates).unwrap();
        let jac = field.jacobian(&states[1]);
        let pairs = crate::stability::eigen::eigenpairs(&jac).unwrap();
        let (_, v) = pairs
            .iter()
            .max_by(|a, b| a.0.re.total_cmp(&b.0.re))
            .unwrap();
        for sign in [1.0, -1.0] {
            let x0: Vec<f64> = states[1].iter().zip(v).map(|(x, c)| x + sign * 1e-4 * c.re).collect();
            let opts = IntegrateOptions {
                t_max: 2e4,
                method: Method::Rosenbrock,
                ..Default::default()
            };
            let tr = integrate(&field, &x0, &states, &opts).unwrap();
            match tr.terminal {
                Terminal::Converged { target } => assert_ne!(target, 1),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn generic_network_field_matches_direct_form() {
        let (p, rates, states) = published();
        let net = open_sequestration(6, 5).unwrap();
        let generic = MassActionField::new(&net, &rates).unwrap();
        let direct = SequestrationField::new(&p, &rates).unwrap();
        let x = &states[2];
        let a = generic.eval(x);
        let b = direct.eval(x);
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-9));
        assert!(generic.jacobian(x).max_abs_diff(&direct.jacobian(x)) < 1e-9);
    }

    #[test]
    fn input_checks_and_edge_cases() {
        let field = Decay(1.0);
        let opts = IntegrateOptions {
            t_max: 0.0,
            ..Default::default()
        };
        let tr = integrate(&field, &[1.0], &[], &opts).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.to_csv(), "t,x1\n0e0,1e0\n");
        assert!(integrate(&field, &[-1.0], &[], &IntegrateOptions::default()).is_err());
        assert!(integrate(&field, &[1.0, 2.0], &[], &IntegrateOptions::default()).is_err());
        let counts = basin_probe(&field, &[vec![1.0]], 1e-3, 0, 1, &IntegrateOptions::default()).unwrap();
        assert_eq!(counts[0].samples, 0);
        assert_eq!(counts[0].reached, vec![0]);
    }

    #[test]
    fn basin_probe_is_deterministic_and_separates_states() {
        let (p, rates, states) = published();
        let field = SequestrationField::new(&p, &rates).unwrap();
        let opts = IntegrateOptions {
            method: Method::Rosenbrock,
            t_max: 2e4,
            ..Default::default()
        };
        let a = basin_probe(&field, &states, 1e-3, 8, 7, &opts).unwrap();
        let b = basin_probe(&field, &states, 1e-3, 8, 7, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].returned(), 8);
        assert_eq!(a[2].returned(), 8);
        assert!(a[1].returned() < 8);
    }

    #[test]
    fn csv_header_and_rows() {
        let opts = IntegrateOptions {
            t_max: 1.0,
            ..Default::default()
        };
        let tr = integrate(&Decay(1.0), &[2.0], &[], &opts).unwrap();
        let csv = tr.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x1"));
        assert_eq!(lines.count(), tr.times.len());
    }
}
