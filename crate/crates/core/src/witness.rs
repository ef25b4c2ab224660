//! Bistability witnesses: choose front rates, shrink `eps` until the three
//! branch states classify as bistable, and re-check saved results.

use std::path::Path;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::massaction::{
    conservation_substitute, sequestration_jacobian, sequestration_rhs, stamp_eps, FrontRates, ModelParams,
};
use crate::region::{canonical_rates, check_bistability, sample_region, CheckKind, RateChoice};
use crate::scalar::{format_rational, parse_rational, rat, rational_from_f64, Rational, Scalar};
use crate::stability::{certifies, classify_state, scaling_boundary, StabilityReport, Verdict};
use crate::steady::{continue_in_eps, Branch, ContinuationOptions, SteadyState};
use crate::SCHEMA;

/// Where the front rates `r1..rn, r(n+2)` come from.
#[derive(Debug, Clone, PartialEq)]
pub enum RateSource {
    Canonical,
    Sampled(u64),
    User(FrontRates<Rational>),
}

impl RateSource {
    pub fn label(&self) -> String {
        match self {
            RateSource::Canonical => "canonical".into(),
            RateSource::Sampled(seed) => format!("sampled:{seed}"),
            RateSource::User(_) => "user".into(),
        }
    }

    /// Resolve to concrete front rates and the region they were validated
    /// against. User rates are tried against the standard region first and
    /// then the alternative one.
    pub fn resolve(&self, params: &ModelParams) -> Result<(FrontRates<Rational>, CheckKind)> {
        params.ensure_bistable()?;
        match self {
            RateSource::Canonical => Ok((canonical_rates(params, RateChoice::Bistability)?, CheckKind::Bistability)),
            RateSource::Sampled(seed) => Ok((sample_region(params, *seed)?, CheckKind::Bistability)),
            RateSource::User(front) => {
                if front.r.len() != params.n {
                    return Err(Error::Dimension {
                        expected: params.n,
                        found: front.r.len(),
                    });
                }
                let standard = check_bistability(params, front, false)?;
                if standard.all_satisfied {
                    return Ok((front.clone(), CheckKind::Bistability));
                }
                let alt = check_bistability(params, front, true)?;
                if alt.all_satisfied {
                    return Ok((front.clone(), CheckKind::AltBistability));
                }
                Err(standard.ensure().unwrap_err())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOptions {
    pub eps0: Rational,
    pub shrink: Rational,
    pub max_rounds: usize,
    pub continuation: ContinuationOptions,
    /// Also require the closed-form boundary scaling to certify the boundary
    /// state, shrinking `eps` further if it does not yet.
    pub closed_form: bool,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            eps0: rat(1, 10),
            shrink: rat(1, 10),
            max_rounds: 12,
            continuation: ContinuationOptions::default(),
            closed_form: false,
        }
    }
}

impl WitnessOptions {
    pub fn validate(&self) -> Result<()> {
        if !self.eps0.is_positive() {
            return Err(Error::InvalidParams("eps0 must be positive".into()));
        }
        if !(self.shrink.is_positive() && self.shrink < Rational::one()) {
            return Err(Error::InvalidParams("shrink must lie in (0, 1)".into()));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidParams("max_rounds must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    #[serde(with = "exact")]
    pub eps: Rational,
    pub success: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub schema: String,
    pub m: u32,
    pub n: usize,
    pub source: String,
    pub region: CheckKind,
    /// Full conservation-substituted rate vector `r1..r3n`.
    #[serde(with = "exact_list")]
    pub r: Vec<Rational>,
    pub r_f64: Vec<f64>,
    #[serde(with = "exact")]
    pub eps: Rational,
    pub states: Vec<SteadyState>,
    pub reports: Vec<StabilityReport>,
    /// 1-based indices of the stable states.
    pub stable: Vec<usize>,
    pub bistable: bool,
    pub trace: Vec<TraceEntry>,
}

impl WitnessResult {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.m, self.n)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let w: WitnessResult = serde_json::from_str(text)?;
        if w.schema != SCHEMA {
            return Err(Error::InvalidParams(format!("unsupported schema `{}`", w.schema)));
        }
        Ok(w)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "K({}, {}) rates={} region={:?} eps={} bistable={}\n",
            self.m,
            self.n,
            self.source,
            self.region,
            format_rational(&self.eps),
            self.bistable
        );
        for (k, (s, rep)) in self.states.iter().zip(&self.reports).enumerate() {
            let x: Vec<String> = s.x.iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&format!(
                "  x{} [{:?}] = ({})  detJ={:.6e}  {:?}\n",
                k + 1,
                s.branch,
                x.join(", "),
                s.det_j,
                rep.verdict
            ));
        }
        let stable: Vec<String> = self.stable.iter().map(|k| format!("x{k}")).collect();
        out.push_str(&format!("  stable: {{{}}}\n", stable.join(", ")));
        out
    }
}

/// Run the witness procedure: resolve rates, then for `eps = eps0,
/// eps0*shrink, ...` build the three branch states and classify them until
/// the result is bistable or the rounds run out. A round that cannot build
/// all three states counts as a failed round.
pub fn find_witness(params: &ModelParams, source: &RateSource, opts: &WitnessOptions) -> Result<WitnessResult> {
    params.ensure_bistable()?;
    opts.validate()?;
    let (front, region) = source.resolve(params)?;
    let mut trace = Vec::new();
    let mut last: Option<WitnessResult> = None;
    let mut eps = opts.eps0.clone();
    for _ in 0..opts.max_rounds {
        match attempt(params, &front, &eps, &opts.continuation) {
            Ok((states, reports, r)) => {
                let stable = stable_indices(&states, &reports);
                let mut bistable = stable.len() >= 2 && states.iter().all(|s| s.nondegenerate);
                let mut message = if bistable {
                    "bistable".to_string()
                } else {
                    format!("{} stable state(s)", stable.len())
                };
                if bistable && opts.closed_form && !boundary_certified(params, &r, &states[2].x)? {
                    bistable = false;
                    message = "bistable, but the closed-form boundary scaling is not yet dominant".into();
                }
                trace.push(TraceEntry {
                    eps: eps.clone(),
                    success: bistable,
                    message,
                });
                let result = WitnessResult {
                    schema: SCHEMA.into(),
                    m: params.m,
                    n: params.n,
                    source: source.label(),
                    region,
                    r_f64: r.iter().map(Scalar::to_f64).collect(),
                    r,
                    eps: eps.clone(),
                    states,
                    reports,
                    stable,
                    bistable,
                    trace: Vec::new(),
                };
                if bistable {
                    return Ok(WitnessResult { trace, ..result });
                }
                last = Some(result);
            }
            Err(e) => trace.push(TraceEntry {
                eps: eps.clone(),
                success: false,
                message: e.to_string(),
            }),
        }
        eps = eps * opts.shrink.clone();
    }
    let failed_eps = trace.last().map(|t| t.eps.clone()).unwrap_or_else(Rational::zero);
    Ok(match last {
        Some(result) => WitnessResult { trace, ..result },
        None => WitnessResult {
            schema: SCHEMA.into(),
            m: params.m,
            n: params.n,
            source: source.label(),
            region,
            r: Vec::new(),
            r_f64: Vec::new(),
            eps: failed_eps,
            states: Vec::new(),
            reports: Vec::new(),
            stable: Vec::new(),
            bistable: false,
            trace,
        },
    })
}

type Round = (Vec<SteadyState>, Vec<StabilityReport>, Vec<Rational>);

fn attempt(params: &ModelParams, front: &FrontRates<Rational>, eps: &Rational, opts: &ContinuationOptions) -> Result<Round> {
    let r = conservation_substitute(params, &stamp_eps(params, front, eps))?.into_values();
    let front_f = front.to_f64();
    let eps_f = eps.to_f64();
    let mut states = Vec::with_capacity(3);
    let mut reports = Vec::with_capacity(3);
    for branch in Branch::ALL {
        let state = continue_in_eps(params, &front_f, branch, eps_f, opts)?;
        reports.push(classify_exact(params, &r, &state.x)?);
        states.push(state);
    }
    Ok((states, reports, r))
}

/// Classify `x` against exact rates; the floating coordinates are taken as
/// the exact dyadic rationals they represent.
pub fn classify_exact(params: &ModelParams, r: &[Rational], x: &[f64]) -> Result<StabilityReport> {
    let xr = x.iter().map(|v| rational_from_f64(*v)).collect::<Result<Vec<_>>>()?;
    classify_state(params, r, &xr)
}

/// Whether the closed-form boundary scaling alone certifies `x` exactly.
pub fn boundary_certified(params: &ModelParams, r: &[Rational], x: &[f64]) -> Result<bool> {
    let xr = x.iter().map(|v| rational_from_f64(*v)).collect::<Result<Vec<_>>>()?;
    let scaled = scaling_boundary(params, r, &xr).apply(&sequestration_jacobian(params, r, &xr));
    Ok(certifies(&scaled, &Rational::zero())?.0)
}

fn stable_indices(states: &[SteadyState], reports: &[StabilityReport]) -> Vec<usize> {
    states
        .iter()
        .zip(reports)
        .enumerate()
        .filter(|(_, (s, rep))| s.nondegenerate && rep.is_stable())
        .map(|(k, _)| k + 1)
        .collect()
}

/// Independent re-check of a bistable witness: exact conservation
/// relations, small residuals, nondegeneracy, and negative eigenvalue real
/// parts for the states marked stable.
pub fn verify_witness(w: &WitnessResult) -> Result<()> {
    let params = w.params()?;
    params.ensure_bistable()?;
    let fail = |msg: String| Err(Error::Precondition(msg));
    if !w.bistable {
        return fail("witness is not marked bistable".into());
    }
    if w.r.len() != params.num_rates() || w.states.len() != 3 {
        return fail("witness is incomplete".into());
    }
    let front = FrontRates::from_rates(&params, &w.r)?;
    let eps_slots = params.eps_slots();
    if eps_slots.iter().any(|&j| w.r[j - 1] != w.eps) {
        return fail("eps slots do not all equal eps".into());
    }
    let rebuilt = conservation_substitute(&params, &stamp_eps(&params, &front, &w.eps))?.into_values();
    if rebuilt != w.r {
        return fail("inflow rates do not satisfy the conservation relations".into());
    }
    let mut stable = 0;
    for (k, state) in w.states.iter().enumerate() {
        if state.x.iter().any(|v| !(*v > 0.0)) {
            return fail(format!("state {} is not positive", k + 1));
        }
        let xr = state.x.iter().map(|v| rational_from_f64(*v)).collect::<Result<Vec<_>>>()?;
        let f = sequestration_rhs(&params, &w.r, &xr);
        let scale = 1.0 + state.x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let residual = f.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max);
        if residual > 1e-10 * scale {
            return fail(format!("state {} has residual {residual:e}", k + 1));
        }
        let report = classify_exact(&params, &w.r, &state.x)?;
        if !report.nondegenerate {
            return fail(format!("state {} is degenerate", k + 1));
        }
        if w.stable.contains(&(k + 1)) {
            if !(report.max_real_part < 0.0) || report.verdict == Verdict::Unstable {
                return fail(format!("state {} is not stable", k + 1));
            }
            stable += 1;
        }
    }
    if stable < 2 {
        return fail("fewer than two stable states".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub m: u32,
    pub n: usize,
    pub source: String,
    pub bistable: bool,
    pub eps: Option<f64>,
    pub rounds: usize,
    pub states_found: usize,
    pub stable_count: usize,
    pub error: Option<String>,
}

/// Run [`find_witness`] on every `(m, n)` cell for every rate source, in
/// parallel on the current rayon pool. Failures are recorded per cell.
pub fn sweep(grid: &[(u32, usize)], sources: &[RateSource], opts: &WitnessOptions) -> Vec<SweepCell> {
    let cells: Vec<((u32, usize), &RateSource)> = grid
        .iter()
        .flat_map(|&cell| sources.iter().map(move |s| (cell, s)))
        .collect();
    cells
        .into_par_iter()
        .map(|((m, n), source)| {
            let outcome = ModelParams::new(m, n).and_then(|p| find_witness(&p, source, opts));
            match outcome {
                Ok(w) => SweepCell {
                    m,
                    n,
                    source: source.label(),
                    bistable: w.bistable,
                    eps: w.bistable.then(|| w.eps.to_f64()),
                    rounds: w.trace.len(),
                    states_found: w.states.len(),
                    stable_count: w.stable.len(),
                    error: None,
                },
                Err(e) => SweepCell {
                    m,
                    n,
                    source: source.label(),
                    bistable: false,
                    eps: None,
                    rounds: 0,
                    states_found: 0,
                    stable_count: 0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

mod exact {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

mod exact_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let texts: Vec<String> = Vec::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}
