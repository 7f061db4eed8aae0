//! Classical fixed-step fourth-order Runge–Kutta for autonomous systems.

use crate::error::{Error, Result};

/// Vector-space operations RK4 needs.
pub trait OdeState: Clone {
    /// `self += h·k`
    fn axpy(&mut self, h: f64, k: &Self);
}

impl<const N: usize> OdeState for [f64; N] {
    fn axpy(&mut self, h: f64, k: &Self) {
        for (y, dy) in self.iter_mut().zip(k) {
            *y += h * dy;
        }
    }
}

pub fn rk4_step<S, F>(y: &S, h: f64, f: &F) -> S
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    let k1 = f(y);
    let mut y2 = y.clone();
    y2.axpy(0.5 * h, &k1);
    let k2 = f(&y2);
    let mut y3 = y.clone();
    y3.axpy(0.5 * h, &k2);
    let k3 = f(&y3);
    let mut y4 = y.clone();
    y4.axpy(h, &k3);
    let k4 = f(&y4);

    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

/// Smallest number of equal substeps, each no longer than `step`, covering `span`.
pub fn substeps(span: f64, step: f64) -> usize {
    if span <= 0.0 {
        0
    } else {
        ((span / step).ceil() as usize).max(1)
    }
}

pub(crate) fn check_step(step: f64) -> Result<()> {
    if step.is_finite() && step > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStep(step))
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// Indices of `times` in ascending order, after validating every entry.
pub(crate) fn sorted_order(times: &[f64]) -> Result<Vec<usize>> {
    for &t in times {
        check_time(t)?;
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    Ok(order)
}

/// Integrates from `t = 0` through every requested time in one pass and
/// returns the state at each, in the caller's order. Between consecutive
/// sample times the span is split into equal substeps no longer than `step`.
pub fn integrate_to_times<S, F>(y0: S, times: &[f64], step: f64, f: F) -> Result<Vec<S>>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    check_step(step)?;
    let order = sorted_order(times)?;
    let mut out: Vec<Option<S>> = vec![None; times.len()];
    let mut y = y0;
    let mut t_now = 0.0;
    for idx in order {
        let span = times[idx] - t_now;
        let n = substeps(span, step);
        if n > 0 {
            let h = span / n as f64;
            for _ in 0..n {
                y = rk4_step(&y, h, &f);
            }
        }
        t_now = times[idx];
        out[idx] = Some(y.clone());
    }
    Ok(out
        .into_iter()
        .map(|s| s.expect("every index visited"))
        .collect())
}
