//! Heisenberg-picture propagation of the box position, momentum and clock.
//!
//! Time runs backwards: `t = 0` is the final box measurement and `t > 0`
//! reaches back toward the photon emission. The equations of motion are
//!
//! ```text
//! dQ/dt   = P / M
//! dP/dt   = -m g - k Q          (k = 0 in free fall)
//! dQcl/dt = 1 - (g/c²) Q
//! ```
//!
//! The clock is kinematic: it has no conjugate momentum and exerts no force
//! on the box.

use serde::Serialize;

use crate::algebra::{
    commutator, BoxParams, CommutatorValue, OperatorCoeffs, PhysConstants, Potential,
};
use crate::error::Result;
use crate::ode::{self, check_time};

/// Propagated operators `(Q(t), P(t), Qcl(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergFrame {
    pub t: f64,
    #[serde(rename = "Q")]
    pub q: OperatorCoeffs,
    #[serde(rename = "P")]
    pub p: OperatorCoeffs,
    #[serde(rename = "Qcl")]
    pub qcl: OperatorCoeffs,
}

impl HeisenbergFrame {
    pub fn identity() -> Self {
        Self {
            t: 0.0,
            q: OperatorCoeffs::q(),
            p: OperatorCoeffs::p(),
            qcl: OperatorCoeffs::q_cl(),
        }
    }

    /// `chi(Q, P)`; equals one for any canonical flow.
    pub fn symplectic_form(&self) -> f64 {
        commutator(&self.q, &self.p).chi
    }

    pub fn commutator(&self, pair: CommutatorPair) -> CommutatorValue {
        match pair {
            CommutatorPair::PQcl => commutator(&self.p, &self.qcl),
            CommutatorPair::QQcl => commutator(&self.q, &self.qcl),
        }
    }

    fn to_array(self) -> [f64; 15] {
        let mut out = [0.0; 15];
        out[..5].copy_from_slice(&self.q.to_array());
        out[5..10].copy_from_slice(&self.p.to_array());
        out[10..].copy_from_slice(&self.qcl.to_array());
        out
    }

    fn from_array(t: f64, a: &[f64; 15]) -> Self {
        let slot = |i: usize| OperatorCoeffs::from_array(std::array::from_fn(|j| a[i + j]));
        Self {
            t,
            q: slot(0),
            p: slot(5),
            qcl: slot(10),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CommutatorPair {
    /// `[P, Qcl]`
    PQcl,
    /// `[Q, Qcl]`
    QQcl,
}

impl CommutatorPair {
    pub const ALL: [CommutatorPair; 2] = [CommutatorPair::PQcl, CommutatorPair::QQcl];

    pub fn label(self) -> &'static str {
        match self {
            CommutatorPair::PQcl => "P-Qcl",
            CommutatorPair::QQcl => "Q-Qcl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericOptions {
    pub step: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self { step: 1e-3 }
    }
}

impl NumericOptions {
    pub fn new(step: f64) -> Result<Self> {
        ode::check_step(step)?;
        Ok(Self { step })
    }
}

/// Closed-form frame at backward time `t`.
pub fn evolve_closed(
    consts: &PhysConstants,
    params: &BoxParams,
    t: f64,
) -> Result<HeisenbergFrame> {
    check_time(t)?;
    let g = consts.g;
    let kappa = consts.clock_coupling();
    let big_m = params.mass;

    let (q, p, qcl) = match params.potential {
        Potential::Free => {
            let q = OperatorCoeffs::new(1.0, t / big_m, 0.0, 0.0, -g * t * t / (2.0 * big_m));
            let p = OperatorCoeffs::new(0.0, 1.0, 0.0, 0.0, -g * t);
            let qcl = OperatorCoeffs::new(
                -kappa * t,
                -kappa * t * t / (2.0 * big_m),
                1.0,
                t,
                kappa * g * t * t * t / (6.0 * big_m),
            );
            (q, p, qcl)
        }
        Potential::Harmonic { k } => {
            let w = (k / big_m).sqrt();
            let (s, c) = (w * t).sin_cos();
            let q = OperatorCoeffs::new(c, s / (big_m * w), 0.0, 0.0, (g / k) * (c - 1.0));
            let p = OperatorCoeffs::new(-big_m * w * s, c, 0.0, 0.0, -(big_m * w * g / k) * s);
            let qcl = OperatorCoeffs::new(
                -kappa * s / w,
                -kappa * (1.0 - c) / (big_m * w * w),
                1.0,
                t,
                -(kappa * g / k) * (s / w - t),
            );
            (q, p, qcl)
        }
    };
    Ok(HeisenbergFrame { t, q, p, qcl })
}

fn coefficient_flow(
    consts: &PhysConstants,
    params: &BoxParams,
) -> impl Fn(&[f64; 15]) -> [f64; 15] {
    let inv_m = 1.0 / params.mass;
    let k = params.spring();
    let g = consts.g;
    let kappa = consts.clock_coupling();
    move |y| {
        let mut dy = [0.0; 15];
        for j in 0..5 {
            dy[j] = y[5 + j] * inv_m;
            dy[5 + j] = -k * y[j];
            dy[10 + j] = -kappa * y[j];
        }
        dy[5 + 4] -= g;
        dy[10 + 3] += 1.0;
        dy
    }
}

/// RK4 frames at each requested time, integrated in a single pass.
pub fn evolve_numeric_grid(
    consts: &PhysConstants,
    params: &BoxParams,
    times: &[f64],
    opts: &NumericOptions,
) -> Result<Vec<HeisenbergFrame>> {
    let y0 = HeisenbergFrame::identity().to_array();
    let ys = ode::integrate_to_times(y0, times, opts.step, coefficient_flow(consts, params))?;
    Ok(times
        .iter()
        .zip(&ys)
        .map(|(&t, y)| HeisenbergFrame::from_array(t, y))
        .collect())
}

pub fn evolve_numeric(
    consts: &PhysConstants,
    params: &BoxParams,
    t: f64,
    opts: &NumericOptions,
) -> Result<HeisenbergFrame> {
    Ok(evolve_numeric_grid(consts, params, &[t], opts)?[0])
}

pub fn commutator_closed(
    pair: CommutatorPair,
    consts: &PhysConstants,
    params: &BoxParams,
    t: f64,
) -> Result<CommutatorValue> {
    check_time(t)?;
    let kappa = consts.clock_coupling();
    let big_m = params.mass;
    let chi = match (params.potential, pair) {
        (Potential::Free, CommutatorPair::PQcl) => kappa * t,
        (Potential::Free, CommutatorPair::QQcl) => kappa * t * t / (2.0 * big_m),
        (Potential::Harmonic { k }, CommutatorPair::PQcl) => {
            let w = (k / big_m).sqrt();
            kappa * (w * t).sin() / w
        }
        (Potential::Harmonic { k }, CommutatorPair::QQcl) => {
            let w = (k / big_m).sqrt();
            kappa * (1.0 - (w * t).cos()) / (big_m * w * w)
        }
    };
    Ok(CommutatorValue::new(chi))
}

/// `(chi(P,Qcl), chi(Q,Qcl))` from the commutator equations, one pass over `times`.
pub fn commutator_ode_grid(
    consts: &PhysConstants,
    params: &BoxParams,
    times: &[f64],
    opts: &NumericOptions,
) -> Result<Vec<(CommutatorValue, CommutatorValue)>> {
    let kappa = consts.clock_coupling();
    let k = params.spring();
    let inv_m = 1.0 / params.mass;
    let flow = move |y: &[f64; 2]| [kappa - k * y[1], y[0] * inv_m];
    let ys = ode::integrate_to_times([0.0, 0.0], times, opts.step, flow)?;
    Ok(ys
        .into_iter()
        .map(|y| (CommutatorValue::new(y[0]), CommutatorValue::new(y[1])))
        .collect())
}

pub fn commutator_ode(
    pair: CommutatorPair,
    consts: &PhysConstants,
    params: &BoxParams,
    t: f64,
    opts: &NumericOptions,
) -> Result<CommutatorValue> {
    let (pq, qq) = commutator_ode_grid(consts, params, &[t], opts)?[0];
    Ok(match pair {
        CommutatorPair::PQcl => pq,
        CommutatorPair::QQcl => qq,
    })
}
