//! Polynomial inequalities on `(r1, ..., rn, r(n+2))` that guarantee three
//! nondegenerate steady states or bistability, the triangular description
//! of the bistability region, canonical rate choices, and a seeded sampler.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::massaction::{FrontRates, ModelParams};
use crate::scalar::{rat, Rational, Scalar};

/// Names of the individual inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum InequalityId {
    /// `(r1 + rn) r(n+2) != (m-1) r1 rn`
    Nondegenerate,
    /// `r(n-1) > m rn`
    TailDominance,
    /// `(m-1) r1 > r(n+2)`
    ProductionExcess,
    /// `(m-1) r1 (r(i-1) + (-1)^i m rn) > (-1)^i m (r1 + rn) r(n+2)`, `i = 3..n`
    Alternating(usize),
    /// `r1 + r(n+2) > r(n-2)`, only for `n > 3`
    OutflowBound,
    /// `ri > r(n-2)` for `i = 3, 5, ..., n-4`
    OddChain(usize),
    /// `(r1 + rn) r(n+2) > (m-1) r1 rn`
    Bistable,
    /// `(r1 + rn) r(n+2) < (m-1) r1 rn`
    AltBistable,
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Nondegenerate => write!(f, "nondegenerate"),
            Self::TailDominance => write!(f, "tail-dominance"),
            Self::ProductionExcess => write!(f, "production-excess"),
            Self::Alternating(i) => write!(f, "alternating-{i}"),
            Self::OutflowBound => write!(f, "outflow-bound"),
            Self::OddChain(i) => write!(f, "odd-chain-{i}"),
            Self::Bistable => write!(f, "bistable"),
            Self::AltBistable => write!(f, "alt-bistable"),
        }
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let indexed = |prefix: &str| -> Option<usize> { s.strip_prefix(prefix)?.parse().ok() };
        Ok(match s {
            "nondegenerate" => Self::Nondegenerate,
            "tail-dominance" => Self::TailDominance,
            "production-excess" => Self::ProductionExcess,
            "outflow-bound" => Self::OutflowBound,
            "bistable" => Self::Bistable,
            "alt-bistable" => Self::AltBistable,
            _ => {
                if let Some(i) = indexed("alternating-") {
                    Self::Alternating(i)
                } else if let Some(i) = indexed("odd-chain-") {
                    Self::OddChain(i)
                } else {
                    return Err(Error::InvalidParams(format!("unknown inequality `{s}`")));
                }
            }
        })
    }
}

impl From<InequalityId> for String {
    fn from(id: InequalityId) -> Self {
        id.to_string()
    }
}

impl TryFrom<String> for InequalityId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Greater,
    Less,
    NotEqual,
}

impl Relation {
    fn holds<T: Scalar>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Greater => lhs > rhs,
            Relation::Less => lhs < rhs,
            Relation::NotEqual => lhs != rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub id: InequalityId,
    pub formula: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Three nondegenerate steady states.
    Mss,
    /// Two stable states, one of them `(1,...,1)`.
    Bistability,
    /// Two stable states near the interior pair.
    AltBistability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCheck {
    pub kind: CheckKind,
    pub records: Vec<InequalityRecord>,
    pub all_satisfied: bool,
}

impl RegionCheck {
    pub fn failed(&self) -> impl Iterator<Item = &InequalityRecord> {
        self.records.iter().filter(|r| !r.satisfied)
    }

    pub fn record(&self, id: InequalityId) -> Option<&InequalityRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// `Ok` when every record holds, otherwise a precondition error naming
    /// the failures.
    pub fn ensure(&self) -> Result<()> {
        if self.all_satisfied {
            return Ok(());
        }
        let names: Vec<String> = self.failed().map(|r| format!("{} ({})", r.id, r.formula)).collect();
        Err(Error::Precondition(format!("rates violate {}", names.join(", "))))
    }
}

struct Recorder {
    records: Vec<InequalityRecord>,
}

impl Recorder {
    fn push<T: Scalar>(&mut self, id: InequalityId, formula: String, lhs: T, relation: Relation, rhs: T) {
        self.records.push(InequalityRecord {
            id,
            formula,
            satisfied: relation.holds(&lhs, &rhs),
            lhs: lhs.to_f64(),
            rhs: rhs.to_f64(),
            relation,
        });
    }
}

fn check<T: Scalar>(params: &ModelParams, front: &FrontRates<T>, kind: CheckKind) -> Result<RegionCheck> {
    params.ensure_bistable()?;
    let n = params.n;
    if front.r.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: front.r.len(),
        });
    }
    let m = T::from_i64(params.m as i64);
    let m1 = T::from_i64(params.m as i64 - 1);
    let rr = |j: usize| front.get(j).clone();
    let (r1, rn, rn2) = (rr(1), rr(n), rr(n + 2));
    let outflow_side = (r1.clone() + rn.clone()) * rn2.clone();
    let production_side = m1.clone() * r1.clone() * rn.clone();

    let mut rec = Recorder { records: Vec::new() };
    let (id, relation, sym) = match kind {
        CheckKind::Mss => (InequalityId::Nondegenerate, Relation::NotEqual, "!="),
        CheckKind::Bistability => (InequalityId::Bistable, Relation::Greater, ">"),
        CheckKind::AltBistability => (InequalityId::AltBistable, Relation::Less, "<"),
    };
    rec.push(
        id,
        format!("(r1 + r{n})*r{} {sym} (m-1)*r1*r{n}", n + 2),
        outflow_side,
        relation,
        production_side,
    );
    rec.push(
        InequalityId::TailDominance,
        format!("r{} > m*r{n}", n - 1),
        rr(n - 1),
        Relation::Greater,
        m.clone() * rn.clone(),
    );
    rec.push(
        InequalityId::ProductionExcess,
        format!("(m-1)*r1 > r{}", n + 2),
        m1.clone() * r1.clone(),
        Relation::Greater,
        rn2.clone(),
    );
    for i in 3..=n {
        let sign = if i % 2 == 0 { T::one() } else { -T::one() };
        let s = if i % 2 == 0 { "+" } else { "-" };
        rec.push(
            InequalityId::Alternating(i),
            format!("(m-1)*r1*(r{} {s} m*r{n}) > {s}m*(r1 + r{n})*r{}", i - 1, n + 2),
            m1.clone() * r1.clone() * (rr(i - 1) + sign.clone() * m.clone() * rn.clone()),
            Relation::Greater,
            sign * m.clone() * (r1.clone() + rn.clone()) * rn2.clone(),
        );
    }
    if n > 3 {
        rec.push(
            InequalityId::OutflowBound,
            format!("r1 + r{} > r{}", n + 2, n - 2),
            r1.clone() + rn2.clone(),
            Relation::Greater,
            rr(n - 2),
        );
        for i in (3..=n.saturating_sub(4)).step_by(2) {
            rec.push(
                InequalityId::OddChain(i),
                format!("r{i} > r{}", n - 2),
                rr(i),
                Relation::Greater,
                rr(n - 2),
            );
        }
    }
    let records = rec.records;
    Ok(RegionCheck {
        kind,
        all_satisfied: records.iter().all(|r| r.satisfied),
        records,
    })
}

/// Conditions for three nondegenerate steady states at small `eps`.
pub fn check_mss<T: Scalar>(params: &ModelParams, front: &FrontRates<T>) -> Result<RegionCheck> {
    check(params, front, CheckKind::Mss)
}

/// Conditions for bistability; `alt` swaps the direction of the
/// outflow/production comparison.
pub fn check_bistability<T: Scalar>(
    params: &ModelParams,
    front: &FrontRates<T>,
    alt: bool,
) -> Result<RegionCheck> {
    let kind = if alt {
        CheckKind::AltBistability
    } else {
        CheckKind::Bistability
    };
    check(params, front, kind)
}

/// Membership in the triangular description of the bistability region.
///
/// For `n = 3` the two-inequality description (`r5 < (m-1) r1`,
/// `r2 > m r3`) is tested as stated; it is strictly larger than the region
/// checked by [`check_bistability`] because it leaves the outflow/production
/// comparison unconstrained.
pub fn in_triangular_set<T: Scalar>(params: &ModelParams, front: &FrontRates<T>) -> Result<bool> {
    params.ensure_bistable()?;
    let n = params.n;
    let m = T::from_i64(params.m as i64);
    let m1 = T::from_i64(params.m as i64 - 1);
    let rr = |j: usize| front.get(j).clone();
    let (r1, rn, rn2) = (rr(1), rr(n), rr(n + 2));
    let gap = m1.clone() * r1.clone() - rn2.clone();
    if !gap.is_positive() {
        return Ok(false);
    }
    if n == 3 {
        return Ok(rr(2) > m * rn);
    }
    if rn.clone() >= r1.clone() * rn2.clone() / gap {
        return Ok(false);
    }
    if rr(n - 1) <= m.clone() * rn.clone() {
        return Ok(false);
    }
    let lower = m * ((r1.clone() + rn.clone()) * rn2.clone() - m1.clone() * r1.clone() * rn)
        / (m1 * r1.clone());
    let rk = rr(n - 2);
    if !(lower < rk && rk < r1 + rn2) {
        return Ok(false);
    }
    Ok((3..=n.saturating_sub(4)).step_by(2).all(|i| rr(i) > rk))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateChoice {
    Mss,
    Bistability,
    Alt,
}

/// Explicit rate choices that satisfy the corresponding checker.
///
/// The bistability choice already satisfies the three-steady-state
/// conditions, so `Mss` and `Bistability` coincide.
pub fn canonical_rates(params: &ModelParams, choice: RateChoice) -> Result<FrontRates<Rational>> {
    params.ensure_bistable()?;
    let n = params.n;
    let m = params.m as i64;
    let int = |v: i64| rat(v, 1);
    let (r, rn2) = match (choice, n) {
        (RateChoice::Mss | RateChoice::Bistability, 3) => (vec![int(2), int(m + 1), int(1)], int(m - 1)),
        (RateChoice::Alt, 3) => (vec![int(3), int(3 * m), int(2)], int(m - 1)),
        (RateChoice::Mss | RateChoice::Bistability, _) => {
            let mut r: Vec<Rational> = (1..=n)
                .map(|j| if j % 2 == 0 { int(1) } else { int(m + 1) })
                .collect();
            r[0] = int(2);
            r[n - 3] = int(m);
            r[n - 2] = int(m + 1);
            r[n - 1] = int(1);
            (r, int(m - 1))
        }
        (RateChoice::Alt, _) => {
            let mut r: Vec<Rational> = (1..=n)
                .map(|j| if j % 2 == 0 { int(m) } else { int(m + 1) })
                .collect();
            r[0] = int(3);
            r[n - 3] = int(m);
            r[n - 2] = int(3 * m);
            r[n - 1] = int(2);
            (r, int(m - 1))
        }
    };
    FrontRates::new(params, r, rn2)
}

const BOX_LOW: (i64, i64) = (1, 10);
const BOX_HIGH: i64 = 10;
const ONE_SIDED_WIDTH: i64 = 10;

/// Exact point strictly inside `(lo, hi)`.
fn uniform_open(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let k: u64 = rng.gen_range(1..(1u64 << 32));
    let u = Rational::new(k.into(), (1u64 << 32).into());
    lo + (hi - lo) * u
}

fn uniform_box(rng: &mut ChaCha8Rng) -> Rational {
    uniform_open(rng, &rat(BOX_LOW.0, BOX_LOW.1), &rat(BOX_HIGH, 1))
}

/// Draw a rate vector from the bistability region by satisfying its
/// triangular inequalities one variable at a time.
///
/// Unconstrained rates come from `(0.1, 10)`; one-sided constraints
/// `v > b` are sampled from `(b, b + 10)`. For `n = 3`, `r3` is bounded the
/// same way `rn` is for larger `n`, which keeps the outflow/production
/// comparison in the bistable direction. The result is exact and the same
/// for the same seed.
pub fn sample_region(params: &ModelParams, seed: u64) -> Result<FrontRates<Rational>> {
    params.ensure_bistable()?;
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rat(params.m as i64, 1);
    let m1 = rat(params.m as i64 - 1, 1);
    let zero = rat(0, 1);
    let width = rat(ONE_SIDED_WIDTH, 1);

    let mut r = vec![zero.clone(); n];
    r[0] = uniform_box(&mut rng);
    let r1 = r[0].clone();
    let rn2 = uniform_open(&mut rng, &zero, &(&m1 * &r1));
    let rn_bound = &r1 * &rn2 / (&m1 * &r1 - &rn2);
    r[n - 1] = uniform_open(&mut rng, &zero, &rn_bound);
    let mrn = &m * &r[n - 1];
    r[n - 2] = uniform_open(&mut rng, &mrn, &(&mrn + &width));
    if n > 3 {
        let rn = r[n - 1].clone();
        let lower = &m * ((&r1 + &rn) * &rn2 - &m1 * &r1 * &rn) / (&m1 * &r1);
        let lower = if lower > zero { lower } else { zero.clone() };
        r[n - 3] = uniform_open(&mut rng, &lower, &(&r1 + &rn2));
        let rk = r[n - 3].clone();
        for i in (3..=n - 4).step_by(2) {
            r[i - 1] = uniform_open(&mut rng, &rk, &(&rk + &width));
        }
        for i in (2..=n - 3).step_by(2) {
            r[i - 1] = uniform_box(&mut rng);
        }
    }
    FrontRates::new(params, r, rn2)
}
