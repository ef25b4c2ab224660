//! Mass-action right-hand sides, Jacobians, the inflow substitution that pins
//! `(1,...,1)` as a steady state, and the change of coordinates `phi` that
//! keeps the boundary branch finite.
//!
//! Rate vectors are 0-based slices holding `r1, r2, ...`; the helper [`r`]
//! reads them with the 1-based labels used everywhere else.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::ReactionNetwork;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: u32,
    pub n: usize,
}

impl ModelParams {
    /// Any `K(m,n)` the evaluators understand: `m >= 1`, `n >= 2`.
    pub fn new(m: u32, n: usize) -> Result<Self> {
        if m < 1 || n < 2 {
            return Err(Error::InvalidParams(format!(
                "need m >= 1 and n >= 2, got m = {m}, n = {n}"
            )));
        }
        Ok(Self { m, n })
    }

    /// Parameters for which bistability can occur: `m >= 2`, `n >= 3` odd.
    pub fn bistable(m: u32, n: usize) -> Result<Self> {
        let p = Self { m, n };
        p.ensure_bistable()?;
        Ok(p)
    }

    pub fn ensure_bistable(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidParams(format!("m must be at least 2, got {}", self.m)));
        }
        if self.n < 3 || self.n % 2 == 0 {
            return Err(Error::InvalidParams(format!(
                "n must be odd and at least 3, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn num_rates(&self) -> usize {
        3 * self.n
    }

    /// Outflow labels that the witness construction drives to a common
    /// small value: `n+1` and `n+3..=2n`.
    pub fn eps_slots(&self) -> Vec<usize> {
        let n = self.n;
        std::iter::once(n + 1).chain(n + 3..=2 * n).collect()
    }

    fn m_scalar<T: Scalar>(&self) -> T {
        T::from_i64(self.m as i64)
    }
}

#[inline]
pub fn r<T>(rates: &[T], j: usize) -> &T {
    &rates[j - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    Free,
    ConservationSubstituted,
}

/// All `3n` rate constants of the fully open network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateVector<T> {
    values: Vec<T>,
    mode: RateMode,
}

impl<T: Scalar> RateVector<T> {
    pub fn free(values: Vec<T>) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| !v.is_positive()) {
            return Err(Error::NonPositiveRate {
                index: j + 1,
                value: values[j].to_f64(),
                equality: "free rates must be positive".into(),
            });
        }
        Ok(Self {
            values,
            mode: RateMode::Free,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn mode(&self) -> RateMode {
        self.mode
    }

    pub fn get(&self, j: usize) -> &T {
        r(&self.values, j)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_f64(&self) -> RateVector<f64> {
        RateVector {
            values: self.values.iter().map(Scalar::to_f64).collect(),
            mode: self.mode,
        }
    }
}

/// The rates that shape the `eps = 0` analysis: `r1..rn` and `r(n+2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRates<T> {
    pub r: Vec<T>,
    pub r_n2: T,
}

impl<T: Scalar> FrontRates<T> {
    pub fn new(params: &ModelParams, r: Vec<T>, r_n2: T) -> Result<Self> {
        if r.len() != params.n {
            return Err(Error::Dimension {
                expected: params.n,
                found: r.len(),
            });
        }
        let front = Self { r, r_n2 };
        if let Some(j) = front.r.iter().position(|v| !v.is_positive()) {
            return Err(Error::NonPositiveRate {
                index: j + 1,
                value: front.r[j].to_f64(),
                equality: "rate constants must be positive".into(),
            });
        }
        if !front.r_n2.is_positive() {
            return Err(Error::NonPositiveRate {
                index: params.n + 2,
                value: front.r_n2.to_f64(),
                equality: "rate constants must be positive".into(),
            });
        }
        Ok(front)
    }

    /// Read `r1..rn` and `r(n+2)` out of a longer rate vector.
    pub fn from_rates(params: &ModelParams, rates: &[T]) -> Result<Self> {
        if rates.len() < params.n + 2 {
            return Err(Error::Dimension {
                expected: 2 * params.n,
                found: rates.len(),
            });
        }
        Self::new(
            params,
            rates[..params.n].to_vec(),
            rates[params.n + 1].clone(),
        )
    }

    /// `r_j` for `j <= n`, and `r(n+2)` for `j = n+2`.
    pub fn get(&self, j: usize) -> &T {
        if j == self.r.len() + 2 {
            &self.r_n2
        } else {
            r(&self.r, j)
        }
    }

    pub fn to_f64(&self) -> FrontRates<f64> {
        FrontRates {
            r: self.r.iter().map(Scalar::to_f64).collect(),
            r_n2: self.r_n2.to_f64(),
        }
    }
}

/// `r1..r2n` with every eps-slot set to `eps`.
pub fn stamp_eps<T: Scalar>(params: &ModelParams, front: &FrontRates<T>, eps: &T) -> Vec<T> {
    let n = params.n;
    let mut out = front.r.clone();
    out.resize(2 * n, eps.clone());
    out[n + 1] = front.r_n2.clone();
    out
}

/// Inflows `r(2n+1)..r(3n)` that make `(1,...,1)` a steady state, without
/// any sign check.
pub fn inflows<T: Scalar>(params: &ModelParams, r2n: &[T]) -> Vec<T> {
    let n = params.n;
    let m: T = params.m_scalar();
    let mut out = Vec::with_capacity(n);
    out.push(r(r2n, 1).clone() + r(r2n, n).clone() + r(r2n, n + 1).clone());
    for i in 2..n {
        out.push(r(r2n, i - 1).clone() + r(r2n, i).clone() + r(r2n, n + i).clone());
    }
    out.push(r(r2n, n - 1).clone() - m * r(r2n, n).clone() + r(r2n, 2 * n).clone());
    out
}

fn inflow_equality(n: usize, i: usize) -> String {
    if i == 1 {
        format!("r{} = r1 + r{n} + r{}", 2 * n + 1, n + 1)
    } else if i < n {
        format!("r{} = r{} + r{i} + r{}", 2 * n + i, i - 1, n + i)
    } else {
        format!("r{} = r{} - m*r{n} + r{}", 3 * n, n - 1, 2 * n)
    }
}

/// Complete `r1..r2n` with the inflows that fix `(1,...,1)`.
///
/// The given rates must be non-negative with `r1..rn` and `r(n+2)` positive;
/// eps-slots may be zero so the `eps = 0` system can be studied exactly.
pub fn conservation_substitute<T: Scalar>(
    params: &ModelParams,
    r_front: &[T],
) -> Result<RateVector<T>> {
    let n = params.n;
    if r_front.len() != 2 * n {
        return Err(Error::Dimension {
            expected: 2 * n,
            found: r_front.len(),
        });
    }
    for (j, v) in r_front.iter().enumerate() {
        let label = j + 1;
        let must_be_positive = label <= n || label == n + 2;
        if v.is_negative() || (must_be_positive && v.is_zero()) {
            return Err(Error::NonPositiveRate {
                index: label,
                value: v.to_f64(),
                equality: "input rate".into(),
            });
        }
    }
    let derived = inflows(params, r_front);
    for (i, v) in derived.iter().enumerate() {
        if !v.is_positive() {
            return Err(Error::NonPositiveRate {
                index: 2 * n + i + 1,
                value: v.to_f64(),
                equality: inflow_equality(n, i + 1),
            });
        }
    }
    let mut values = r_front.to_vec();
    values.extend(derived);
    Ok(RateVector {
        values,
        mode: RateMode::ConservationSubstituted,
    })
}

fn check_dims<T>(net: &ReactionNetwork, rates: &[T], x: &[T]) -> Result<()> {
    if rates.len() != net.num_reactions() {
        return Err(Error::Dimension {
            expected: net.num_reactions(),
            found: rates.len(),
        });
    }
    if x.len() != net.num_species() {
        return Err(Error::Dimension {
            expected: net.num_species(),
            found: x.len(),
        });
    }
    Ok(())
}

fn powi<T: Scalar>(v: &T, k: u32) -> T {
    (0..k).fold(T::one(), |acc, _| acc * v.clone())
}

/// `f(x) = N v(x)` with `v_j = r_j * prod x_i^alpha_ij`.
pub fn ode_rhs<T: Scalar>(net: &ReactionNetwork, rates: &[T], x: &[T]) -> Result<Vec<T>> {
    check_dims(net, rates, x)?;
    let mut f = vec![T::zero(); x.len()];
    for reaction in net.reactions() {
        let mut v = r(rates, reaction.rate_index).clone();
        for (&s, &c) in &reaction.reactants {
            v = v * powi(&x[s], c);
        }
        if v.is_zero() {
            continue;
        }
        for (&s, &c) in &reaction.reactants {
            f[s] = f[s].clone() - T::from_i64(c as i64) * v.clone();
        }
        for (&s, &c) in &reaction.products {
            f[s] = f[s].clone() + T::from_i64(c as i64) * v.clone();
        }
    }
    Ok(f)
}

/// Analytic Jacobian of [`ode_rhs`].
pub fn jacobian<T: Scalar>(net: &ReactionNetwork, rates: &[T], x: &[T]) -> Result<Matrix<T>> {
    check_dims(net, rates, x)?;
    let n = x.len();
    let mut jac: Matrix<T> = Matrix::zeros(n, n);
    for reaction in net.reactions() {
        let rate = r(rates, reaction.rate_index);
        if rate.is_zero() {
            continue;
        }
        for (&k, &ck) in &reaction.reactants {
            // d/dx_k of the monomial
            let mut dv = rate.clone() * T::from_i64(ck as i64) * powi(&x[k], ck - 1);
            for (&s, &c) in &reaction.reactants {
                if s != k {
                    dv = dv * powi(&x[s], c);
                }
            }
            let touched: BTreeSet<usize> = reaction
                .reactants
                .keys()
                .chain(reaction.products.keys())
                .copied()
                .collect();
            for s in touched {
                let delta = reaction.product_coeff(s) as i64 - reaction.reactant_coeff(s) as i64;
                if delta != 0 {
                    jac[(s, k)] = jac[(s, k)].clone() + T::from_i64(delta) * dv.clone();
                }
            }
        }
    }
    Ok(jac)
}

/// The fully open sequestration system written out directly.
pub fn sequestration_rhs<T: Scalar>(params: &ModelParams, rates: &[T], x: &[T]) -> Vec<T> {
    let n = params.n;
    let m: T = params.m_scalar();
    let rr = |j: usize| r(rates, j).clone();
    let xx = |i: usize| x[i - 1].clone();
    let mut f = Vec::with_capacity(n);
    for i in 1..=n {
        let mut v = rr(2 * n + i) - rr(n + i) * xx(i);
        if i > 1 {
            v = v - rr(i - 1) * xx(i - 1) * xx(i);
        }
        if i < n {
            v = v - rr(i) * xx(i) * xx(i + 1);
        }
        if i == 1 {
            v = v - rr(n) * xx(1);
        }
        if i == n {
            v = v + m.clone() * rr(n) * xx(1);
        }
        f.push(v);
    }
    f
}

/// Jacobian of [`sequestration_rhs`]: tridiagonal plus the `(n,1)` corner.
pub fn sequestration_jacobian<T: Scalar>(params: &ModelParams, rates: &[T], x: &[T]) -> Matrix<T> {
    let n = params.n;
    let m: T = params.m_scalar();
    let rr = |j: usize| r(rates, j).clone();
    let xx = |i: usize| x[i - 1].clone();
    let mut jac = Matrix::zeros(n, n);
    for i in 1..=n {
        let mut d = T::zero() - rr(n + i);
        if i > 1 {
            d = d - rr(i - 1) * xx(i - 1);
            jac[(i - 1, i - 2)] = T::zero() - rr(i - 1) * xx(i);
        }
        if i < n {
            d = d - rr(i) * xx(i + 1);
            jac[(i - 1, i)] = T::zero() - rr(i) * xx(i);
        }
        if i == 1 {
            d = d - rr(n);
        }
        jac[(i - 1, i - 1)] = d;
    }
    let corner = jac[(n - 1, 0)].clone() + m * rr(n);
    jac[(n - 1, 0)] = corner;
    jac
}

fn phi_precondition<T: Scalar>(y: &[T], r2n: &T) -> Result<()> {
    if y.len() < 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: y.len(),
        });
    }
    if y[y.len() - 1].is_zero() {
        return Err(Error::Precondition("phi needs y_n != 0".into()));
    }
    if r2n.is_zero() {
        return Err(Error::Precondition("phi needs r(2n) != 0".into()));
    }
    Ok(())
}

/// `phi(y) = (y1, ..., y(n-2), r2n*y(n-1)/yn, yn/r2n)`.
pub fn phi_map<T: Scalar>(y: &[T], r2n: &T) -> Result<Vec<T>> {
    phi_precondition(y, r2n)?;
    let n = y.len();
    let mut x = y.to_vec();
    x[n - 2] = r2n.clone() * y[n - 2].clone() / y[n - 1].clone();
    x[n - 1] = y[n - 1].clone() / r2n.clone();
    Ok(x)
}

/// Jacobian of [`phi_map`]; its determinant is `1/yn`.
pub fn phi_jacobian<T: Scalar>(y: &[T], r2n: &T) -> Result<Matrix<T>> {
    phi_precondition(y, r2n)?;
    let n = y.len();
    let mut jac = Matrix::identity(n);
    let yn = y[n - 1].clone();
    jac[(n - 2, n - 2)] = r2n.clone() / yn.clone();
    jac[(n - 2, n - 1)] = T::zero() - r2n.clone() * y[n - 2].clone() / (yn.clone() * yn);
    jac[(n - 1, n - 1)] = T::one() / r2n.clone();
    Ok(jac)
}

fn full_rates<T: Scalar>(params: &ModelParams, r2n: &[T]) -> Result<Vec<T>> {
    if r2n.len() != 2 * params.n {
        return Err(Error::Dimension {
            expected: 2 * params.n,
            found: r2n.len(),
        });
    }
    let mut all = r2n.to_vec();
    all.extend(inflows(params, r2n));
    Ok(all)
}

/// `p = f o phi`, with the inflows derived from `r1..r2n`.
pub fn system_p<T: Scalar>(params: &ModelParams, r2n: &[T], y: &[T]) -> Result<Vec<T>> {
    let rates = full_rates(params, r2n)?;
    let x = phi_map(y, r(r2n, 2 * params.n))?;
    Ok(sequestration_rhs(params, &rates, &x))
}

/// `J_p(y) = J(phi(y)) * J_phi(y)`.
pub fn jacobian_p<T: Scalar>(params: &ModelParams, r2n: &[T], y: &[T]) -> Result<Matrix<T>> {
    let rates = full_rates(params, r2n)?;
    let eps = r(r2n, 2 * params.n);
    let x = phi_map(y, eps)?;
    sequestration_jacobian(params, &rates, &x).matmul(&phi_jacobian(y, eps)?)
}

/// The limit of `p` as every eps-slot goes to zero.
pub fn system_g<T: Scalar>(params: &ModelParams, front: &FrontRates<T>, y: &[T]) -> Result<Vec<T>> {
    params.ensure_bistable()?;
    let n = params.n;
    if y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: y.len(),
        });
    }
    let m: T = params.m_scalar();
    let rr = |j: usize| front.get(j).clone();
    let yy = |i: usize| y[i - 1].clone();
    if n == 3 {
        return Ok(vec![
            rr(1) + rr(3) - rr(3) * yy(1),
            rr(1) + rr(2) + rr(5) - rr(2) * yy(2),
            rr(2) - m.clone() * rr(3) - rr(2) * yy(2) + m * rr(3) * yy(1) - yy(3),
        ]);
    }
    let mut g = Vec::with_capacity(n);
    g.push(rr(1) + rr(n) - rr(n) * yy(1) - rr(1) * yy(1) * yy(2));
    g.push(
        rr(1) + rr(2) + rr(n + 2)
            - rr(1) * yy(1) * yy(2)
            - rr(2) * yy(2) * yy(3)
            - rr(n + 2) * yy(2),
    );
    for i in 3..=n - 3 {
        g.push(rr(i - 1) + rr(i) - rr(i - 1) * yy(i - 1) * yy(i) - rr(i) * yy(i) * yy(i + 1));
    }
    g.push(rr(n - 3) + rr(n - 2) - rr(n - 3) * yy(n - 3) * yy(n - 2));
    g.push(rr(n - 2) + rr(n - 1) - rr(n - 1) * yy(n - 1));
    g.push(rr(n - 1) - m.clone() * rr(n) + m * rr(n) * yy(1) - rr(n - 1) * yy(n - 1) - yy(n));
    Ok(g)
}

pub fn jacobian_g<T: Scalar>(
    params: &ModelParams,
    front: &FrontRates<T>,
    y: &[T],
) -> Result<Matrix<T>> {
    params.ensure_bistable()?;
    let n = params.n;
    if y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: y.len(),
        });
    }
    let m: T = params.m_scalar();
    let rr = |j: usize| front.get(j).clone();
    let yy = |i: usize| y[i - 1].clone();
    let neg = |v: T| T::zero() - v;
    let mut jac = Matrix::zeros(n, n);
    // 1-based setter
    let mut set = |i: usize, j: usize, v: T| jac[(i - 1, j - 1)] = v;
    if n == 3 {
        set(1, 1, neg(rr(3)));
        set(2, 2, neg(rr(2)));
        set(3, 1, m * rr(3));
        set(3, 2, neg(rr(2)));
        set(3, 3, neg(T::one()));
        return Ok(jac);
    }
    set(1, 1, neg(rr(n) + rr(1) * yy(2)));
    set(1, 2, neg(rr(1) * yy(1)));
    set(2, 1, neg(rr(1) * yy(2)));
    set(2, 2, neg(rr(1) * yy(1) + rr(2) * yy(3) + rr(n + 2)));
    set(2, 3, neg(rr(2) * yy(2)));
    for i in 3..=n - 3 {
        set(i, i - 1, neg(rr(i - 1) * yy(i)));
        set(i, i, neg(rr(i - 1) * yy(i - 1) + rr(i) * yy(i + 1)));
        set(i, i + 1, neg(rr(i) * yy(i)));
    }
    set(n - 2, n - 3, neg(rr(n - 3) * yy(n - 2)));
    set(n - 2, n - 2, neg(rr(n - 3) * yy(n - 3)));
    set(n - 1, n - 1, neg(rr(n - 1)));
    set(n, 1, m * rr(n));
    set(n, n - 1, neg(rr(n - 1)));
    set(n, n, neg(T::one()));
    Ok(jac)
}

/// Closed form of `det J_g`: `-r2 r3` for `n = 3`, otherwise
/// `-r2...r(n-3) r(n-1) y2...y(n-3) (rn r(n+2) + r1 rn y1 + r1 r(n+2) y2)`.
pub fn det_jacobian_g<T: Scalar>(params: &ModelParams, front: &FrontRates<T>, y: &[T]) -> T {
    let n = params.n;
    let rr = |j: usize| front.get(j).clone();
    if n == 3 {
        return T::zero() - rr(2) * rr(3);
    }
    let mut prod = rr(n - 1);
    for i in 2..=n - 3 {
        prod = prod * rr(i) * y[i - 1].clone();
    }
    let tail = rr(n) * rr(n + 2) + rr(1) * rr(n) * y[0].clone() + rr(1) * rr(n + 2) * y[1].clone();
    T::zero() - prod * tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::open_sequestration;
    use crate::scalar::{rat, Rational};

    fn published_r2n() -> Vec<Rational> {
        let e = rat(6, 1000);
        let mut v: Vec<Rational> = [2, 1, 6, 7, 1].iter().map(|&k| rat(k, 1)).collect();
        v.extend([e.clone(), rat(5, 1), e.clone(), e.clone(), e]);
        v
    }

    #[test]
    fn example_inflows() {
        let p = ModelParams::new(6, 5).unwrap();
        let rates = conservation_substitute(&p, &published_r2n()).unwrap();
        let expected = [rat(3006, 1000), rat(8, 1), rat(7006, 1000), rat(13006, 1000), rat(1006, 1000)];
        assert_eq!(&rates.values()[10..], &expected);
        assert_eq!(rates.mode(), RateMode::ConservationSubstituted);

        let net = open_sequestration(6, 5).unwrap();
        let f = ode_rhs(&net, rates.values(), &vec![rat(1, 1); 5]).unwrap();
        assert!(f.iter().all(|v| v == &rat(0, 1)));
    }

    #[test]
    fn negative_inflow_names_equality() {
        let p = ModelParams::new(2, 3).unwrap();
        let r2n: Vec<f64> = vec![1.0, 1.0, 1.0, 1.0, 1.0, 0.0];
        match conservation_substitute(&p, &r2n) {
            Err(Error::NonPositiveRate { index, value, equality }) => {
                assert_eq!(index, 9);
                assert_eq!(value, -1.0);
                assert!(equality.contains("r9 = r2 - m*r3 + r6"), "{equality}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_hand_values() {
        let net = open_sequestration(2, 3).unwrap();
        let f = ode_rhs(&net, &[1.0; 9], &[1.0; 3]).unwrap();
        assert_eq!(f[0], -2.0);
        assert_eq!(f[2], 1.0);
        assert_eq!(ode_rhs(&net, &[0.0; 9], &[0.7, 0.2, 3.0]).unwrap(), vec![0.0; 3]);
        assert!(matches!(ode_rhs(&net, &[1.0; 8], &[1.0; 3]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn generic_matches_direct_form() {
        for (m, n) in [(2, 2), (2, 3), (6, 5), (3, 8)] {
            let p = ModelParams::new(m, n).unwrap();
            let net = open_sequestration(m, n).unwrap();
            let rates: Vec<f64> = (1..=3 * n).map(|j| 0.3 + (j as f64 * 0.77) % 2.0).collect();
            let x: Vec<f64> = (1..=n).map(|i| 0.5 + (i as f64 * 1.3) % 1.7).collect();
            let f = ode_rhs(&net, &rates, &x).unwrap();
            let g = sequestration_rhs(&p, &rates, &x);
            for (a, b) in f.iter().zip(&g) {
                assert!((a - b).abs() < 1e-12);
            }
            let ja = jacobian(&net, &rates, &x).unwrap();
            let jb = sequestration_jacobian(&p, &rates, &x);
            assert!(ja.max_abs_diff(&jb) < 1e-12, "m={m} n={n}");
        }
    }

    #[test]
    fn jacobian_pattern() {
        let p = ModelParams::new(6, 5).unwrap();
        let rates: Vec<f64> = (1..=15).map(|j| j as f64 * 0.5).collect();
        let x = [1.1, 0.9, 1.3, 0.4, 2.0];
        let jac = sequestration_jacobian(&p, &rates, &x);
        assert_eq!(jac[(4, 0)], 6.0 * rates[4]);
        assert_eq!(jac[(0, 4)], 0.0);
        assert_eq!(jac[(0, 0)], -rates[0] * x[1] - rates[4] - rates[5]);
        for i in 0..5 {
            for j in 0..5 {
                if (i as i64 - j as i64).abs() > 1 && (i, j) != (4, 0) {
                    assert_eq!(jac[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn jacobian_handles_repeated_species() {
        // 2A -> A + B exercises coefficients above one on both sides
        let net = crate::network::parse_network("2 X1 -> X1 + X2 ; r1\nX2 -> 0 ; r2").unwrap();
        let jac = jacobian(&net, &[3.0, 1.0], &[2.0, 5.0]).unwrap();
        // f1 = -3 x1^2, f2 = 3 x1^2 - x2
        assert_eq!(jac[(0, 0)], -12.0);
        assert_eq!(jac[(1, 0)], 12.0);
        assert_eq!(jac[(1, 1)], -1.0);
    }

    #[test]
    fn phi_values() {
        let x = phi_map(&[1.0; 5], &1.0).unwrap();
        assert_eq!(x, vec![1.0; 5]);
        let y = [2.5, 0.1, 70.0, 13.0 / 7.0, 3.0];
        let x = phi_map(&y, &0.006).unwrap();
        assert!((x[3] - 0.006 * (13.0 / 7.0) / 3.0).abs() < 1e-15);
        assert!((x[4] - 500.0).abs() < 1e-9);
        let d = phi_jacobian(&y, &0.006).unwrap().determinant().unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-12);
        assert!(phi_map(&[1.0, 0.0], &1.0).is_err());
        assert!(phi_map(&[1.0, 1.0], &0.0).is_err());
    }

    #[test]
    fn g_at_boundary_points() {
        let p = ModelParams::bistable(2, 3).unwrap();
        let front = FrontRates::new(&p, vec![2.0, 3.0, 1.0], 1.0).unwrap();
        let g = system_g(&p, &front, &[3.0, 2.0, 1.0]).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-12), "{g:?}");
        assert_eq!(det_jacobian_g(&p, &front, &[0.3, 7.0, 2.0]), -3.0);

        let p = ModelParams::bistable(6, 5).unwrap();
        let front = FrontRates::new(&p, vec![rat(2, 1), rat(1, 1), rat(6, 1), rat(7, 1), rat(1, 1)], rat(5, 1))
            .unwrap();
        let xi = [rat(5, 2), rat(1, 10), rat(70, 1), rat(13, 7), rat(3, 1)];
        let g = system_g(&p, &front, &xi).unwrap();
        assert!(g.iter().all(|v| v == &rat(0, 1)), "{g:?}");
        assert!(system_g(&ModelParams { m: 2, n: 4 }, &front, &xi).is_err());
    }

    #[test]
    fn jacobian_g_determinant() {
        for n in [3, 5, 7, 9] {
            let p = ModelParams::bistable(3, n).unwrap();
            let front = FrontRates::new(
                &p,
                (1..=n).map(|j| 0.5 + (j as f64 * 0.37) % 1.5).collect(),
                0.8,
            )
            .unwrap();
            let y: Vec<f64> = (1..=n).map(|i| 0.4 + (i as f64 * 0.91) % 2.0).collect();
            let jac = jacobian_g(&p, &front, &y).unwrap();
            let det = jac.determinant().unwrap();
            let closed = det_jacobian_g(&p, &front, &y);
            assert!(closed < 0.0);
            assert!((det - closed).abs() < 1e-12 * closed.abs(), "n={n}: {det} vs {closed}");
        }
    }

    #[test]
    fn eps_slots_layout() {
        assert_eq!(ModelParams::new(2, 3).unwrap().eps_slots(), vec![4, 6]);
        assert_eq!(ModelParams::new(2, 5).unwrap().eps_slots(), vec![6, 8, 9, 10]);
        let p = ModelParams::new(6, 5).unwrap();
        let front = FrontRates::new(&p, vec![2.0, 1.0, 6.0, 7.0, 1.0], 5.0).unwrap();
        let stamped = stamp_eps(&p, &front, &0.006);
        assert_eq!(stamped, vec![2.0, 1.0, 6.0, 7.0, 1.0, 0.006, 5.0, 0.006, 0.006, 0.006]);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0, 3).is_err());
        assert!(ModelParams::new(1, 1).is_err());
        assert!(ModelParams::bistable(1, 3).is_err());
        assert!(ModelParams::bistable(2, 4).is_err());
        assert!(ModelParams::bistable(2, 5).is_ok());
    }
}
