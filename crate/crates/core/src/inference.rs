//! Gaussian moment transport and inference of the photon's energy and
//! emission time from a delayed box measurement.
//!
//! The measured box state at `t = 0` is carried back along the Heisenberg
//! frame. Its spread in `P(t)` or `Q(t)` converts into a photon-mass
//! uncertainty through the mass sensitivity `a_m` of that operator, and its
//! spread in `Qcl(t)` is the uncertainty in the shutter-opening instant.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Serialize, Serializer};

use crate::algebra::{
    mean_of, BoxParams, CommutatorValue, OperatorCoeffs, PhysConstants, Potential,
};
use crate::dynamics::{evolve_closed, CommutatorPair, HeisenbergFrame};
use crate::error::{Error, Result};

/// Relative slack allowed when comparing an uncertainty product with its bound.
pub const BOUND_RTOL: f64 = 1e-9;

/// Smallest accepted device precision.
pub const MIN_PRECISION: f64 = 1e-12;

/// `|a_m|` below this fraction of its free-fall magnitude counts as zero.
pub const DEGENERACY_RTOL: f64 = 1e-12;

/// Side condition `ωt ≪ M/m` read as `ωt < VALIDITY_FRACTION · M/m`.
pub const VALIDITY_FRACTION: f64 = 0.1;

const SYMMETRY_RTOL: f64 = 1e-12;

/// Which box quantity the final measurement sharpens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Route {
    ViaP,
    ViaQ,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::ViaP => "p",
            Route::ViaQ => "q",
        }
    }

    /// The evolved operator whose spread carries the mass information.
    pub fn operator(self, frame: &HeisenbergFrame) -> &OperatorCoeffs {
        match self {
            Route::ViaP => &frame.p,
            Route::ViaQ => &frame.q,
        }
    }
}

/// First and second moments over `(q, p, q_cl)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mu: Vector3<f64>,
    pub sigma: Matrix3<f64>,
}

impl GaussianState {
    /// Checks symmetry and positive semidefiniteness of `sigma`.
    pub fn new(mu: Vector3<f64>, sigma: Matrix3<f64>) -> Result<Self> {
        if !mu.iter().chain(sigma.iter()).all(|x| x.is_finite()) {
            return Err(Error::InvalidState("non-finite moment".into()));
        }
        let scale = sigma.amax().max(f64::MIN_POSITIVE);
        if (sigma - sigma.transpose()).amax() > SYMMETRY_RTOL * scale {
            return Err(Error::InvalidState("covariance is not symmetric".into()));
        }
        let min_eig = sigma.symmetric_eigenvalues().min();
        if min_eig < -SYMMETRY_RTOL * scale {
            return Err(Error::InvalidState(format!(
                "covariance is not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn diagonal(mu: [f64; 3], variances: [f64; 3]) -> Result<Self> {
        Self::new(
            Vector3::from(mu),
            Matrix3::from_diagonal(&Vector3::from(variances)),
        )
    }

    /// Schrödinger–Robertson condition on the `(q, p)` block.
    pub fn check_quantum_valid(&self, hbar: f64) -> Result<()> {
        let s = &self.sigma;
        let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(0, 1)];
        let min = 0.25 * hbar * hbar;
        if det < min * (1.0 - SYMMETRY_RTOL) {
            return Err(Error::InvalidState(format!(
                "Σ_qq·Σ_pp − Σ_qp² = {det:e} is below ħ²/4 = {min:e}"
            )));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        self.sigma[(0, 0)].max(0.0).sqrt()
    }

    pub fn dp(&self) -> f64 {
        self.sigma[(1, 1)].max(0.0).sqrt()
    }

    pub fn dqcl(&self) -> f64 {
        self.sigma[(2, 2)].max(0.0).sqrt()
    }

    /// Variance of an operator's fluctuating part in this state.
    pub fn variance_of(&self, x: &OperatorCoeffs) -> f64 {
        let v = Vector3::new(x.a_q, x.a_p, x.a_cl);
        (v.transpose() * self.sigma * v)[(0, 0)].max(0.0)
    }

    pub fn mean_of(&self, x: &OperatorCoeffs, m: f64) -> f64 {
        mean_of(x, self.mu.into(), m)
    }
}

/// Moments of the evolved operators: `μ(t)` through `mean_of`, `Σ(t) = S Σ(0) Sᵀ`.
pub fn propagate_state(
    frame: &HeisenbergFrame,
    state0: &GaussianState,
    m: f64,
    consts: &PhysConstants,
) -> Result<GaussianState> {
    state0.check_quantum_valid(consts.hbar)?;
    let ops = [&frame.q, &frame.p, &frame.qcl];
    let s = Matrix3::from_fn(|i, j| {
        let x = ops[i];
        [x.a_q, x.a_p, x.a_cl][j]
    });
    let mu = Vector3::from_fn(|i, _| state0.mean_of(ops[i], m));
    let sigma = s * state0.sigma * s.transpose();
    // Restore exact symmetry lost to rounding.
    let sigma = 0.5 * (sigma + sigma.transpose());
    Ok(GaussianState { mu, sigma })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub dx: f64,
    pub dy: f64,
    pub product: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Robertson check `ΔX·ΔQcl ≥ ħ|chi|/2` for `X = P` or `Q`.
pub fn check_bound(
    state_t: &GaussianState,
    chi: CommutatorValue,
    pair: CommutatorPair,
    hbar: f64,
) -> BoundCheck {
    let dx = match pair {
        CommutatorPair::PQcl => state_t.dp(),
        CommutatorPair::QQcl => state_t.dq(),
    };
    let dy = state_t.dqcl();
    let product = dx * dy;
    let bound = 0.5 * hbar * chi.chi.abs();
    BoundCheck {
        dx,
        dy,
        product,
        bound,
        ok: product >= bound * (1.0 - BOUND_RTOL),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassEstimate {
    #[serde(serialize_with = "serialize_float")]
    pub dm: f64,
    pub validity: bool,
    pub degenerate: bool,
}

/// `ωt < 0.1·M/m` under a spring; always true in free fall.
pub fn validity_flag(params: &BoxParams, t: f64) -> bool {
    match params.omega() {
        None => true,
        Some(w) => {
            params.photon_mass == 0.0
                || w * t < VALIDITY_FRACTION * params.mass / params.photon_mass
        }
    }
}

/// `dm = dX / |a_m(X(t))|`. A vanishing sensitivity yields `dm = +∞` and the
/// degenerate flag.
pub fn mass_uncertainty(
    frame: &HeisenbergFrame,
    route: Route,
    dx: f64,
    consts: &PhysConstants,
    params: &BoxParams,
) -> MassEstimate {
    let a_m = route.operator(frame).a_m.abs();
    let t = frame.t;
    // Free-fall magnitude of the sensitivity sets the scale for "zero".
    let scale = match route {
        Route::ViaP => consts.g * t,
        Route::ViaQ => consts.g * t * t / (2.0 * params.mass),
    };
    let degenerate = a_m == 0.0 || a_m <= DEGENERACY_RTOL * scale;
    let dm = if degenerate { f64::INFINITY } else { dx / a_m };
    MassEstimate {
        dm,
        validity: validity_flag(params, t),
        degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InferenceReport {
    pub route: Route,
    pub t: f64,
    #[serde(serialize_with = "serialize_float")]
    pub dm: f64,
    #[serde(rename = "dE", serialize_with = "serialize_float")]
    pub de: f64,
    #[serde(rename = "dT")]
    pub dt: f64,
    #[serde(serialize_with = "serialize_float")]
    pub product: f64,
    pub bound: f64,
    pub validity: bool,
    pub degenerate: bool,
}

impl InferenceReport {
    /// `ΔE·ΔT ≥ ħ/2` up to [`BOUND_RTOL`]. Degenerate reports carry an
    /// infinite product and pass trivially.
    pub fn ok(&self) -> bool {
        self.product >= self.bound * (1.0 - BOUND_RTOL)
    }
}

/// Carries `state0` back to `t` and infers `ΔE = c²Δm` and `ΔT = ΔQcl(t)`.
pub fn photon_inference(
    consts: &PhysConstants,
    params: &BoxParams,
    state0: &GaussianState,
    route: Route,
    t: f64,
) -> Result<InferenceReport> {
    let frame = evolve_closed(consts, params, t)?;
    let state_t = propagate_state(&frame, state0, params.photon_mass, consts)?;
    Ok(inference_from(&frame, &state_t, route, consts, params))
}

pub(crate) fn inference_from(
    frame: &HeisenbergFrame,
    state_t: &GaussianState,
    route: Route,
    consts: &PhysConstants,
    params: &BoxParams,
) -> InferenceReport {
    let dx = match route {
        Route::ViaP => state_t.dp(),
        Route::ViaQ => state_t.dq(),
    };
    let est = mass_uncertainty(frame, route, dx, consts, params);
    let dt = state_t.dqcl();
    let de = consts.c * consts.c * est.dm;
    let product = if est.degenerate {
        f64::INFINITY
    } else {
        de * dt
    };
    InferenceReport {
        route,
        t: frame.t,
        dm: est.dm,
        de,
        dt,
        product,
        bound: 0.5 * consts.hbar,
        validity: est.validity,
        degenerate: est.degenerate,
    }
}

/// Post-measurement Gaussian at `t = 0`: the measured quantity has spread
/// `device_dx`, its conjugate sits at the minimum `ħ/(2·device_dx)`, the
/// clock has spread `device_dcl`, and there are no correlations.
pub fn prepare_post_measurement_state(
    route: Route,
    device_dx: f64,
    device_dcl: f64,
    consts: &PhysConstants,
) -> Result<GaussianState> {
    if !device_dx.is_finite() || device_dx < MIN_PRECISION {
        return Err(Error::InvalidPrecision(device_dx));
    }
    if !device_dcl.is_finite() || device_dcl < 0.0 {
        return Err(Error::InvalidPrecision(device_dcl));
    }
    let conj = consts.hbar / (2.0 * device_dx);
    let (dq, dp) = match route {
        Route::ViaP => (conj, device_dx),
        Route::ViaQ => (device_dx, conj),
    };
    GaussianState::diagonal([0.0; 3], [dq * dq, dp * dp, device_dcl * device_dcl])
}

/// Classical mixture over photon-mass values.
#[derive(Debug, Clone, PartialEq)]
pub struct MassMixture {
    components: Vec<(f64, f64)>,
}

impl MassMixture {
    /// `(weight, m)` pairs; weights positive and summing to one within 1e−12.
    pub fn new(components: Vec<(f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMixture("no components".into()));
        }
        for &(w, m) in &components {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidMixture(format!("weight {w} must be > 0")));
            }
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidMixture(format!("mass {m} must be >= 0")));
            }
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn single(m: f64) -> Self {
        Self {
            components: vec![(1.0, m)],
        }
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }
}

/// Mean and total spread of `(Q, P, Qcl)` over a mass mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureStatistics {
    pub mean: [f64; 3],
    pub spread: [f64; 3],
}

pub fn mixture_statistics(
    frame: &HeisenbergFrame,
    mixture: &MassMixture,
    state0: &GaussianState,
) -> MixtureStatistics {
    let ops = [&frame.q, &frame.p, &frame.qcl];
    let mut mean = [0.0; 3];
    let mut spread = [0.0; 3];
    for (i, x) in ops.iter().enumerate() {
        // Component variances do not depend on m.
        let var = state0.variance_of(x);
        let (mut first, mut second) = (0.0, 0.0);
        for &(w, m) in mixture.components() {
            let mu = state0.mean_of(x, m);
            first += w * mu;
            second += w * (var + mu * mu);
        }
        mean[i] = first;
        spread[i] = (second - first * first).max(0.0).sqrt();
    }
    MixtureStatistics { mean, spread }
}

/// Normalisation of the clock spread in the general time-energy relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClockDenominator {
    /// `⟨q_cl⟩`
    MeanClock,
    /// `1 − (g/c²)⟨q⟩`, the mean clock rate.
    MeanClockRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeEnergyDiagnostic {
    #[serde(rename = "dH")]
    pub dh: f64,
    pub dqcl: f64,
    pub denom: f64,
    pub lhs: f64,
    pub bound: f64,
}

/// `ΔH·Δq_cl/denom` for `H = p²/2M + m g q + V(q)` under Gaussian moments.
///
/// The variance of a quadratic form is `∇Hᵀ Σ ∇H + ½ tr((AΣ)²)` with `A`
/// the Hessian. This is reported, never asserted against `ħ/2`.
pub fn time_energy_diagnostic(
    state_t: &GaussianState,
    consts: &PhysConstants,
    params: &BoxParams,
    m: f64,
    denominator: ClockDenominator,
) -> Result<TimeEnergyDiagnostic> {
    let k = match params.potential {
        Potential::Free => 0.0,
        Potential::Harmonic { k } => k,
    };
    let (mu_q, mu_p, mu_cl) = (state_t.mu[0], state_t.mu[1], state_t.mu[2]);
    let grad = Vector2::new(m * consts.g + k * mu_q, mu_p / params.mass);
    let hess = Matrix2::new(k, 0.0, 0.0, 1.0 / params.mass);
    let block = state_t.sigma.fixed_view::<2, 2>(0, 0).into_owned();
    let a_sigma = hess * block;
    let var_h = (grad.transpose() * block * grad)[(0, 0)] + 0.5 * (a_sigma * a_sigma).trace();
    let dh = var_h.max(0.0).sqrt();

    let denom = match denominator {
        ClockDenominator::MeanClock => mu_cl,
        ClockDenominator::MeanClockRate => 1.0 - consts.clock_coupling() * mu_q,
    };
    if denom == 0.0 {
        return Err(Error::NoElapsedTime);
    }
    let dqcl = state_t.dqcl();
    Ok(TimeEnergyDiagnostic {
        dh,
        dqcl,
        denom,
        lhs: dh * dqcl / denom,
        bound: 0.5 * consts.hbar,
    })
}

/// JSON has no infinity; write it as the string `"inf"`.
pub(crate) fn serialize_float<S: Serializer>(
    x: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::commutator_closed;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn free() -> BoxParams {
        BoxParams::free(1000.0, 1.0).unwrap()
    }

    fn spring() -> BoxParams {
        BoxParams::harmonic(1000.0, 1.0, 1000.0).unwrap()
    }

    fn reference_state() -> GaussianState {
        GaussianState::diagonal([0.0; 3], [1.0, 0.25, 0.0]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn identity_frame_leaves_state_alone() {
        let s0 = GaussianState::diagonal([0.3, -1.0, 2.0], [1.0, 0.25, 0.5]).unwrap();
        let s = propagate_state(
            &HeisenbergFrame::identity(),
            &s0,
            1.0,
            &PhysConstants::unit(),
        )
        .unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn free_fall_reference_spreads() {
        let c = PhysConstants::unit();
        let frame = evolve_closed(&c, &free(), 2.0).unwrap();
        let s = propagate_state(&frame, &reference_state(), 1.0, &c).unwrap();
        assert_eq!(s.dp(), 0.5);
        // Σ_clcl = (−2)²·1 + (−0.002)²·0.25 = 4.000001
        assert!(rel(s.dqcl(), 4.000001f64.sqrt()) < 1e-15);
        assert!(rel(s.dqcl(), 2.00000025) < 1e-14);

        let chi = commutator_closed(CommutatorPair::PQcl, &c, &free(), 2.0).unwrap();
        let check = check_bound(&s, chi, CommutatorPair::PQcl, c.hbar);
        assert_eq!(check.bound, 1.0);
        assert!(check.ok);
        assert!(rel(check.product, 1.000000125) < 1e-14);
    }

    #[test]
    fn zero_gravity_keeps_clock_spread() {
        let c = PhysConstants::new(1.0, 1.0, 0.0).unwrap();
        let s0 = GaussianState::diagonal([0.0; 3], [1.0, 0.25, 0.09]).unwrap();
        let frame = evolve_closed(&c, &free(), 2.0).unwrap();
        let s = propagate_state(&frame, &s0, 1.0, &c).unwrap();
        assert_eq!(s.dqcl(), s0.dqcl());
    }

    #[test]
    fn rejects_invalid_initial_state() {
        let squeezed = GaussianState::diagonal([0.0; 3], [0.1, 0.1, 0.0]).unwrap();
        let err = propagate_state(
            &HeisenbergFrame::identity(),
            &squeezed,
            0.0,
            &PhysConstants::unit(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidState(_)));
        assert!(GaussianState::diagonal([0.0; 3], [1.0, -1.0, 0.0]).is_err());
        let asym = Matrix3::new(1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(GaussianState::new(Vector3::zeros(), asym).is_err());
    }

    #[test]
    fn trivial_bounds() {
        let c = PhysConstants::unit();
        let s = reference_state();
        for pair in CommutatorPair::ALL {
            let chi = commutator_closed(pair, &c, &free(), 0.0).unwrap();
            let check = check_bound(&s, chi, pair, 1.0);
            assert_eq!(check.bound, 0.0);
            assert!(check.ok);
            let chi = commutator_closed(pair, &c, &spring(), 2.0 * PI).unwrap();
            assert!(check_bound(&s, chi, pair, 1.0).bound < 1e-15);
        }
    }

    #[test]
    fn mass_uncertainty_cases() {
        let c = PhysConstants::unit();
        let frame = evolve_closed(&c, &free(), 2.0).unwrap();
        let est = mass_uncertainty(&frame, Route::ViaP, 0.5, &c, &free());
        assert_eq!(est.dm, 0.25);
        assert!(est.validity && !est.degenerate);

        let frame = evolve_closed(&c, &spring(), FRAC_PI_2).unwrap();
        let est = mass_uncertainty(&frame, Route::ViaQ, 1.0, &c, &spring());
        assert!(rel(est.dm, 1000.0) < 1e-15);

        for route in [Route::ViaP, Route::ViaQ] {
            let est = mass_uncertainty(&HeisenbergFrame::identity(), route, 1.0, &c, &free());
            assert!(est.degenerate);
            assert_eq!(est.dm, f64::INFINITY);
        }
    }

    #[test]
    fn validity_threshold() {
        let params = BoxParams::harmonic(1000.0, 1.0, 1000.0).unwrap();
        assert!(validity_flag(&params, 99.0));
        assert!(!validity_flag(&params, 100.0));
        assert!(validity_flag(
            &BoxParams::harmonic(1000.0, 0.0, 1000.0).unwrap(),
            1e9
        ));
        assert!(validity_flag(&free(), 1e9));
    }

    #[test]
    fn reference_inference_both_routes() {
        let c = PhysConstants::unit();
        let r = photon_inference(&c, &free(), &reference_state(), Route::ViaP, 2.0).unwrap();
        assert_eq!(r.dm, 0.25);
        assert_eq!(r.de, 0.25);
        assert!(rel(r.dt, 2.00000025) < 1e-14);
        assert!(rel(r.product, 0.5000000625) < 1e-14);
        assert!(r.ok() && !r.degenerate);

        let r = photon_inference(&c, &free(), &reference_state(), Route::ViaQ, 2.0).unwrap();
        assert!(rel(r.dm, 1.000001f64.sqrt() / 0.002) < 1e-14);
        assert!(rel(r.dm, 500.00025) < 1e-9);
        assert!(rel(r.product, 1000.0) < 1e-6);
    }

    #[test]
    fn revival_is_degenerate() {
        let c = PhysConstants::unit();
        for route in [Route::ViaP, Route::ViaQ] {
            let r = photon_inference(&c, &spring(), &reference_state(), route, 2.0 * PI).unwrap();
            assert!(r.degenerate, "{route:?}");
            assert_eq!(r.product, f64::INFINITY);
        }
    }

    #[test]
    fn post_measurement_states() {
        let c = PhysConstants::unit();
        let s = prepare_post_measurement_state(Route::ViaP, 0.5, 0.3, &c).unwrap();
        assert_eq!(
            s.sigma,
            Matrix3::from_diagonal(&Vector3::new(1.0, 0.25, 0.09))
        );
        let s = prepare_post_measurement_state(Route::ViaQ, 0.001, 0.0, &c).unwrap();
        assert!(rel(s.dp(), 500.0) < 1e-15);
        assert_eq!(
            prepare_post_measurement_state(Route::ViaQ, 1e-13, 0.0, &c).unwrap_err(),
            Error::InvalidPrecision(1e-13)
        );
        assert!(prepare_post_measurement_state(Route::ViaP, 0.0, 0.0, &c).is_err());
    }

    #[test]
    fn mixtures() {
        let c = PhysConstants::unit();
        let t = 2.0;
        let frame = evolve_closed(&c, &free(), t).unwrap();
        let s0 = reference_state();

        let single = mixture_statistics(&frame, &MassMixture::single(1.0), &s0);
        let st = propagate_state(&frame, &s0, 1.0, &c).unwrap();
        for i in 0..3 {
            assert!((single.mean[i] - st.mu[i]).abs() < 1e-15);
            assert!((single.spread[i] - st.sigma[(i, i)].sqrt()).abs() < 1e-12);
        }

        // Two-point mixture: exact extra variance (g t δ)² in P.
        let delta = 0.1;
        let mix = MassMixture::new(vec![(0.5, 1.0 - delta), (0.5, 1.0 + delta)]).unwrap();
        let stats = mixture_statistics(&frame, &mix, &s0);
        let expected = (0.25f64 + (c.g * t * delta).powi(2)).sqrt();
        assert!(rel(stats.spread[1], expected) < 1e-12);

        let collapsed = MassMixture::new(vec![(0.5, 1.0), (0.5, 1.0)]).unwrap();
        assert_eq!(mixture_statistics(&frame, &collapsed, &s0), single);
    }

    #[test]
    fn mixture_validation() {
        assert!(MassMixture::new(vec![]).is_err());
        assert!(MassMixture::new(vec![(0.5, 1.0)]).is_err());
        assert!(MassMixture::new(vec![(1.0, -1.0)]).is_err());
        assert!(MassMixture::new(vec![(1.5, 1.0), (-0.5, 2.0)]).is_err());
    }

    #[test]
    fn diagnostic_cases() {
        let c = PhysConstants::unit();
        let s0 = prepare_post_measurement_state(Route::ViaP, 0.5, 0.0, &c).unwrap();
        assert_eq!(
            time_energy_diagnostic(&s0, &c, &free(), 1.0, ClockDenominator::MeanClock).unwrap_err(),
            Error::NoElapsedTime
        );

        let g0 = PhysConstants::new(1.0, 1.0, 0.0).unwrap();
        let s0 = prepare_post_measurement_state(Route::ViaP, 0.5, 0.2, &g0).unwrap();
        let lhs = |t: f64, params: &BoxParams| {
            let frame = evolve_closed(&g0, params, t).unwrap();
            let st = propagate_state(&frame, &s0, 1.0, &g0).unwrap();
            time_energy_diagnostic(&st, &g0, params, 1.0, ClockDenominator::MeanClockRate).unwrap()
        };
        for params in [free(), spring()] {
            let first = lhs(0.5, &params);
            assert_eq!(first.dqcl, 0.2);
            assert_eq!(first.denom, 1.0);
            for t in [1.0, 2.0, 3.7] {
                assert!(rel(lhs(t, &params).lhs, first.lhs) < 1e-9);
            }
        }
    }
}
