//! Brute-force cross-check in a truncated Fock basis.
//!
//! `q` and `p` become finite Hermitian matrices built from ladder operators.
//! The equations of motion are integrated as matrix ODEs, the clock operator
//! is accumulated by composite Simpson quadrature of `1 − (g/c²)Q(τ)`, and
//! commutators are taken as explicit matrix products. Nothing here reuses the
//! coefficient engine.
//!
//! Truncation breaks the canonical commutator only in the last basis state,
//! so comparisons use the leading `N − buffer` block.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{BoxParams, PhysConstants};
use crate::error::{Error, Result};
use crate::ode::{self, OdeState};

/// Tolerance for Hermiticity and the restricted canonical commutator.
pub const WORKSPACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub n: usize,
    pub buffer: usize,
    pub scale: f64,
    pub step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n: 60,
            buffer: 8,
            scale: 1.0,
            step: 1e-3,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 16 {
            return Err(Error::Config(format!("n = {} must be at least 16", self.n)));
        }
        if self.n <= 2 * self.buffer {
            return Err(Error::Config(format!(
                "n = {} must exceed twice the buffer ({})",
                self.n, self.buffer
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Config(format!("scale = {} must be > 0", self.scale)));
        }
        ode::check_step(self.step)
    }

    /// Size of the block compared against c-number commutators.
    pub fn block(&self) -> usize {
        self.n - self.buffer
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    Vacuum,
    /// Coherent state with amplitude 0.5.
    Coherent,
}

pub const COHERENT_AMPLITUDE: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct OracleWorkspace {
    pub q0: DMatrix<Complex64>,
    pub p0: DMatrix<Complex64>,
    pub vacuum: DVector<Complex64>,
    pub coherent: DVector<Complex64>,
    pub hbar: f64,
    pub block: usize,
}

impl OracleWorkspace {
    pub fn dim(&self) -> usize {
        self.q0.nrows()
    }

    pub fn probe(&self, probe: Probe) -> &DVector<Complex64> {
        match probe {
            Probe::Vacuum => &self.vacuum,
            Probe::Coherent => &self.coherent,
        }
    }
}

fn hermiticity_error(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Ladder-operator matrices for `Q0 = s(a + a†)/√2`, `P0 = (ħ/s)(a − a†)/(i√2)`.
pub fn build_workspace(config: &OracleConfig, hbar: f64) -> Result<OracleWorkspace> {
    config.validate()?;
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::Config(format!("hbar = {hbar} must be > 0")));
    }
    let n = config.n;
    let s = config.scale;
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = Complex64::new(((i + 1) as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let root2 = std::f64::consts::SQRT_2;
    let q0 = (&a + &ad) * Complex64::new(s / root2, 0.0);
    // 1/i = −i
    let p0 = (&a - &ad) * Complex64::new(0.0, -hbar / (s * root2));

    let mut vacuum = DVector::<Complex64>::zeros(n);
    vacuum[0] = Complex64::new(1.0, 0.0);
    let mut coherent = DVector::<Complex64>::zeros(n);
    let mut amp = 1.0;
    for k in 0..n {
        if k > 0 {
            amp *= COHERENT_AMPLITUDE / (k as f64).sqrt();
        }
        coherent[k] = Complex64::new(amp, 0.0);
    }
    let norm = coherent.norm();
    coherent.unscale_mut(norm);

    let ws = OracleWorkspace {
        q0,
        p0,
        vacuum,
        coherent,
        hbar,
        block: config.block(),
    };
    let herm = hermiticity_error(&ws.q0).max(hermiticity_error(&ws.p0));
    if herm > WORKSPACE_TOL {
        return Err(Error::Config(format!(
            "ladder matrices not Hermitian ({herm:e})"
        )));
    }
    let ccr = block_deviation(&ws, &ws.q0, &ws.p0, 1.0);
    if ccr > WORKSPACE_TOL {
        return Err(Error::Config(format!(
            "restricted canonical commutator off by {ccr:e}"
        )));
    }
    Ok(ws)
}

/// Matrices of `Q(t)`, `P(t)` and the clock increment `Qcl(t) − q_cl(0)`.
#[derive(Debug, Clone)]
pub struct OracleFrame {
    pub t: f64,
    pub q: DMatrix<Complex64>,
    pub p: DMatrix<Complex64>,
    pub qcl: DMatrix<Complex64>,
}

#[derive(Clone)]
struct PhaseSpace {
    q: DMatrix<Complex64>,
    p: DMatrix<Complex64>,
}

impl OdeState for PhaseSpace {
    fn axpy(&mut self, h: f64, k: &Self) {
        let h = Complex64::new(h, 0.0);
        self.q.zip_apply(&k.q, |y, dy| *y += h * dy);
        self.p.zip_apply(&k.p, |y, dy| *y += h * dy);
    }
}

/// Matrix flow through each requested time in a single pass.
///
/// Every segment between consecutive sample times uses an even number of
/// equal steps no longer than `config.step`, so the Simpson panels close.
pub fn oracle_evolve_grid(
    ws: &OracleWorkspace,
    consts: &PhysConstants,
    params: &BoxParams,
    times: &[f64],
    config: &OracleConfig,
) -> Result<Vec<OracleFrame>> {
    ode::check_step(config.step)?;
    let order = ode::sorted_order(times)?;
    let n = ws.dim();
    let eye = DMatrix::<Complex64>::identity(n, n);
    let inv_m = Complex64::new(1.0 / params.mass, 0.0);
    let k = Complex64::new(params.spring(), 0.0);
    let force = Complex64::new(-params.photon_mass * consts.g, 0.0);
    let flow = |y: &PhaseSpace| PhaseSpace {
        q: &y.p * inv_m,
        p: &eye * force - &y.q * k,
    };

    let mut y = PhaseSpace {
        q: ws.q0.clone(),
        p: ws.p0.clone(),
    };
    let mut integral = DMatrix::<Complex64>::zeros(n, n);
    let mut t_now = 0.0;
    let mut out: Vec<Option<OracleFrame>> = vec![None; times.len()];
    for idx in order {
        let span = times[idx] - t_now;
        let mut steps = ode::substeps(span, config.step);
        steps += steps % 2;
        if steps > 0 {
            let h = span / steps as f64;
            let mut panel = y.q.clone();
            for i in 1..=steps {
                y = ode::rk4_step(&y, h, &flow);
                let w = if i == steps {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                panel.zip_apply(&y.q, |acc, qi| *acc += w * qi);
            }
            integral += panel * Complex64::new(h / 3.0, 0.0);
        }
        t_now = times[idx];
        let qcl = &eye * Complex64::new(t_now, 0.0)
            - &integral * Complex64::new(consts.clock_coupling(), 0.0);
        out[idx] = Some(OracleFrame {
            t: t_now,
            q: y.q.clone(),
            p: y.p.clone(),
            qcl,
        });
    }
    Ok(out
        .into_iter()
        .map(|f| f.expect("every index visited"))
        .collect())
}

pub fn oracle_evolve(
    ws: &OracleWorkspace,
    consts: &PhysConstants,
    params: &BoxParams,
    t: f64,
    config: &OracleConfig,
) -> Result<OracleFrame> {
    Ok(oracle_evolve_grid(ws, consts, params, &[t], config)?.swap_remove(0))
}

/// `[A, B] / (iħ)`, the matrix whose restricted block should equal `chi·I`.
pub fn commutator_matrix(
    ws: &OracleWorkspace,
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    (a * b - b * a) * Complex64::new(0.0, -1.0 / ws.hbar)
}

/// `⟨probe| [A, B]/(iħ) |probe⟩`.
pub fn oracle_commutator(
    ws: &OracleWorkspace,
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    probe: Probe,
) -> Complex64 {
    let psi = ws.probe(probe);
    let c = commutator_matrix(ws, a, b);
    psi.dotc(&(c * psi))
}

/// Largest entry of `[A, B]/(iħ) − chi·I` on the leading block.
pub fn block_deviation(
    ws: &OracleWorkspace,
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    chi: f64,
) -> f64 {
    let c = commutator_matrix(ws, a, b);
    let mut worst: f64 = 0.0;
    for j in 0..ws.block {
        for i in 0..ws.block {
            let target = if i == j { chi } else { 0.0 };
            worst = worst.max((c[(i, j)] - target).norm());
        }
    }
    worst
}

/// Largest deviation of a matrix from its adjoint.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    hermiticity_error(m)
}
