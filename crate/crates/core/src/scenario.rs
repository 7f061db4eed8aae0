//! Runnable experiments: single delayed-choice runs, measurement-time
//! sweeps and cross-engine verification.

use serde::Serialize;

use crate::algebra::{BoxParams, PhysConstants};
use crate::dynamics::{
    commutator_closed, commutator_ode_grid, evolve_closed, evolve_numeric_grid, CommutatorPair,
    HeisenbergFrame, NumericOptions,
};
use crate::error::{Error, Result};
use crate::inference::{
    check_bound, inference_from, prepare_post_measurement_state, propagate_state, serialize_float,
    validity_flag, BoundCheck, GaussianState, InferenceReport, Route, BOUND_RTOL,
};
use crate::oracle::{
    block_deviation, build_workspace, hermiticity_defect, oracle_commutator, oracle_evolve_grid,
    OracleConfig, Probe,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    pub route: Route,
    pub device_dx: f64,
    pub device_dcl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub constants: PhysConstants,
    #[serde(rename = "box")]
    pub box_params: BoxParams,
    pub measurement: Measurement,
    /// Backward time from the box measurement to the photon emission.
    pub t_emit: f64,
    pub numeric: NumericOptions,
    pub oracle: Option<OracleConfig>,
}

impl Scenario {
    /// Free fall with `ħ = c = g = 1`, `M = 1000`, `m = 1`, momentum measured
    /// to 0.5, ideal clock, `t_emit = 2`.
    pub fn reference() -> Self {
        Self {
            constants: PhysConstants::unit(),
            box_params: BoxParams {
                mass: 1000.0,
                photon_mass: 1.0,
                potential: crate::algebra::Potential::Free,
            },
            measurement: Measurement {
                route: Route::ViaP,
                device_dx: 0.5,
                device_dcl: 0.0,
            },
            t_emit: 2.0,
            numeric: NumericOptions::default(),
            oracle: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        self.box_params.validate()?;
        crate::ode::check_time(self.t_emit)?;
        crate::ode::check_step(self.numeric.step)?;
        if let Some(oracle) = &self.oracle {
            oracle.validate()?;
        }
        self.initial_state().map(|_| ())
    }

    /// The post-measurement box state at `t = 0`.
    pub fn initial_state(&self) -> Result<GaussianState> {
        let m = &self.measurement;
        prepare_post_measurement_state(m.route, m.device_dx, m.device_dcl, &self.constants)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub report: InferenceReport,
    pub ok: bool,
    pub frame: HeisenbergFrame,
    pub chi_p_qcl: f64,
    pub chi_q_qcl: f64,
    pub bound_p_qcl: BoundCheck,
    pub bound_q_qcl: BoundCheck,
}

pub fn run_scenario(s: &Scenario) -> Result<RunSummary> {
    s.validate()?;
    let state0 = s.initial_state()?;
    let frame = evolve_closed(&s.constants, &s.box_params, s.t_emit)?;
    let state_t = propagate_state(&frame, &state0, s.box_params.photon_mass, &s.constants)?;
    let report = inference_from(
        &frame,
        &state_t,
        s.measurement.route,
        &s.constants,
        &s.box_params,
    );
    let chi_p = commutator_closed(CommutatorPair::PQcl, &s.constants, &s.box_params, s.t_emit)?;
    let chi_q = commutator_closed(CommutatorPair::QQcl, &s.constants, &s.box_params, s.t_emit)?;
    Ok(RunSummary {
        ok: report.ok(),
        report,
        frame,
        chi_p_qcl: chi_p.chi,
        chi_q_qcl: chi_q.chi,
        bound_p_qcl: check_bound(&state_t, chi_p, CommutatorPair::PQcl, s.constants.hbar),
        bound_q_qcl: check_bound(&state_t, chi_q, CommutatorPair::QQcl, s.constants.hbar),
    })
}

/// One measurement time, both inference routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub chi_p_qcl: f64,
    pub chi_q_qcl: f64,
    pub dq: f64,
    pub dp: f64,
    pub dqcl: f64,
    #[serde(serialize_with = "serialize_float")]
    pub dm_p: f64,
    #[serde(serialize_with = "serialize_float")]
    pub dm_q: f64,
    #[serde(rename = "dE_p", serialize_with = "serialize_float")]
    pub de_p: f64,
    #[serde(rename = "dE_q", serialize_with = "serialize_float")]
    pub de_q: f64,
    #[serde(rename = "dT")]
    pub dt: f64,
    #[serde(serialize_with = "serialize_float")]
    pub prod_p: f64,
    #[serde(serialize_with = "serialize_float")]
    pub prod_q: f64,
    #[serde(rename = "bound_ET")]
    pub bound_et: f64,
    pub valid: bool,
    pub degenerate_p: bool,
    pub degenerate_q: bool,
}

impl SweepRow {
    /// Each non-degenerate route respects `ΔE·ΔT ≥ ħ/2`.
    pub fn satisfies_bound(&self) -> bool {
        let floor = self.bound_et * (1.0 - BOUND_RTOL);
        (self.degenerate_p || self.prod_p >= floor) && (self.degenerate_q || self.prod_q >= floor)
    }
}

fn sweep_row(s: &Scenario, state0: &GaussianState, t: f64) -> Result<SweepRow> {
    let (consts, params) = (&s.constants, &s.box_params);
    let frame = evolve_closed(consts, params, t)?;
    let state_t = propagate_state(&frame, state0, params.photon_mass, consts)?;
    let via_p = inference_from(&frame, &state_t, Route::ViaP, consts, params);
    let via_q = inference_from(&frame, &state_t, Route::ViaQ, consts, params);
    Ok(SweepRow {
        t,
        chi_p_qcl: frame.commutator(CommutatorPair::PQcl).chi,
        chi_q_qcl: frame.commutator(CommutatorPair::QQcl).chi,
        dq: state_t.dq(),
        dp: state_t.dp(),
        dqcl: state_t.dqcl(),
        dm_p: via_p.dm,
        dm_q: via_q.dm,
        de_p: via_p.de,
        de_q: via_q.de,
        dt: via_p.dt,
        prod_p: via_p.product,
        prod_q: via_q.product,
        bound_et: via_p.bound,
        valid: validity_flag(params, t),
        degenerate_p: via_p.degenerate,
        degenerate_q: via_q.degenerate,
    })
}

/// `steps` equally spaced points from `t_min` to `t_max`, endpoints exact.
pub fn time_grid(t_min: f64, t_max: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| match i {
            0 => t_min,
            i if i + 1 == steps => t_max,
            i => {
                let i = i as f64;
                (t_min * (last - i) + t_max * i) / last
            }
        })
        .collect()
}

/// Both routes from one fixed post-measurement state over a uniform grid.
/// Commutators come from the closed-form frames.
pub fn sweep(s: &Scenario, t_min: f64, t_max: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if !(t_min.is_finite() && t_max.is_finite()) || t_min < 0.0 || t_min >= t_max {
        return Err(Error::Range(format!(
            "need 0 <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Range(format!("steps = {steps} must be at least 2")));
    }
    s.validate()?;
    let state0 = s.initial_state()?;
    time_grid(t_min, t_max, steps)
        .into_iter()
        .map(|t| sweep_row(s, &state0, t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Closed form against RK4 integration.
    pub numeric: f64,
    /// Closed form against the truncated-basis matrices.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            numeric: 1e-9,
            oracle: 1e-6,
        }
    }
}

/// Flow Hermiticity is held to a fixed tolerance regardless of `Tolerances`.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Number of times sampled by the matrix oracle.
pub const ORACLE_GRID: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        // NaN deviations fail.
        let passed = max_deviation <= tolerance;
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Largest `|approx − exact|` over a series, relative to the largest `|exact|`
/// in that series. Series that are identically zero are compared absolutely.
pub fn series_deviation(approx: &[f64], exact: &[f64]) -> f64 {
    let scale = exact.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let worst = approx
        .iter()
        .zip(exact)
        .map(|(a, e)| (a - e).abs())
        .fold(0.0f64, |m, d| if d.is_nan() { f64::NAN } else { m.max(d) });
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

fn frame_coefficients(frames: &[HeisenbergFrame]) -> Vec<Vec<f64>> {
    let mut series = vec![Vec::with_capacity(frames.len()); 15];
    for f in frames {
        let all = [f.q.to_array(), f.p.to_array(), f.qcl.to_array()];
        for (i, x) in all.iter().flatten().enumerate() {
            series[i].push(*x);
        }
    }
    series
}

fn max_frame_deviation(approx: &[HeisenbergFrame], exact: &[HeisenbergFrame]) -> f64 {
    frame_coefficients(approx)
        .iter()
        .zip(frame_coefficients(exact))
        .map(|(a, e)| series_deviation(a, &e))
        .fold(0.0, f64::max)
}

/// Three-way agreement: closed forms, RK4 coefficient and commutator
/// integration, and optionally the truncated-basis oracle.
///
/// The grid has `grid` equally spaced times on `[0, t_emit]`. Disagreement is
/// reported in the result, never raised as an error.
pub fn verify(
    s: &Scenario,
    grid: usize,
    tol: &Tolerances,
    with_oracle: bool,
) -> Result<VerificationReport> {
    s.validate()?;
    if grid < 2 {
        return Err(Error::Range(format!("grid = {grid} must be at least 2")));
    }
    let (consts, params) = (&s.constants, &s.box_params);
    let times = time_grid(0.0, s.t_emit, grid);
    let closed: Vec<HeisenbergFrame> = times
        .iter()
        .map(|&t| evolve_closed(consts, params, t))
        .collect::<Result<_>>()?;
    let numeric = evolve_numeric_grid(consts, params, &times, &s.numeric)?;
    let ode = commutator_ode_grid(consts, params, &times, &s.numeric)?;

    let mut checks = vec![CheckResult::new(
        "frame closed vs rk4",
        max_frame_deviation(&numeric, &closed),
        tol.numeric,
    )];

    let symplectic = numeric
        .iter()
        .map(|f| (f.symplectic_form() - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult::new(
        "symplectic chi(Q,P)",
        symplectic,
        tol.numeric,
    ));

    for pair in CommutatorPair::ALL {
        let exact: Vec<f64> = times
            .iter()
            .map(|&t| commutator_closed(pair, consts, params, t).map(|c| c.chi))
            .collect::<Result<_>>()?;
        let from_ode: Vec<f64> = ode
            .iter()
            .map(|(pq, qq)| match pair {
                CommutatorPair::PQcl => pq.chi,
                CommutatorPair::QQcl => qq.chi,
            })
            .collect();
        let from_frames: Vec<f64> = numeric.iter().map(|f| f.commutator(pair).chi).collect();
        checks.push(CheckResult::new(
            format!("chi({}) closed vs commutator ode", pair.label()),
            series_deviation(&from_ode, &exact),
            tol.numeric,
        ));
        checks.push(CheckResult::new(
            format!("chi({}) closed vs rk4 frame algebra", pair.label()),
            series_deviation(&from_frames, &exact),
            tol.numeric,
        ));
    }

    if with_oracle {
        checks.extend(oracle_checks(s, tol)?);
    }
    Ok(VerificationReport { checks })
}

fn oracle_checks(s: &Scenario, tol: &Tolerances) -> Result<Vec<CheckResult>> {
    let (consts, params) = (&s.constants, &s.box_params);
    let config = s.oracle.unwrap_or_default();
    let ws = build_workspace(&config, consts.hbar)?;
    let times = time_grid(0.0, s.t_emit, ORACLE_GRID);
    let frames = oracle_evolve_grid(&ws, consts, params, &times, &config)?;

    let mut checks = Vec::new();
    let mut hermiticity: f64 = 0.0;
    for f in &frames {
        hermiticity = hermiticity
            .max(hermiticity_defect(&f.q))
            .max(hermiticity_defect(&f.p));
    }
    for pair in CommutatorPair::ALL {
        let (mut block, mut probe): (f64, f64) = (0.0, 0.0);
        for f in &frames {
            let chi = commutator_closed(pair, consts, params, f.t)?.chi;
            let a = match pair {
                CommutatorPair::PQcl => &f.p,
                CommutatorPair::QQcl => &f.q,
            };
            let norm = chi.abs().max(1.0);
            block = block.max(block_deviation(&ws, a, &f.qcl, chi) / norm);
            let expect = oracle_commutator(&ws, a, &f.qcl, Probe::Vacuum);
            probe = probe.max((expect - chi).norm() / norm);
        }
        checks.push(CheckResult::new(
            format!("chi({}) closed vs oracle block", pair.label()),
            block,
            tol.oracle,
        ));
        checks.push(CheckResult::new(
            format!("chi({}) closed vs oracle vacuum", pair.label()),
            probe,
            tol.oracle,
        ));
    }
    checks.push(CheckResult::new(
        "oracle hermiticity",
        hermiticity,
        HERMITICITY_TOL,
    ));
    Ok(checks)
}
