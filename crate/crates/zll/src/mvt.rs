//! Local mean values of |zeta(sigma + it)|^2 against zeta(2 sigma) U, and
//! the divisor-pair sums that bound the remainder.
//!
//! The integrand along a fixed line is an almost periodic sum over pairs
//! (m, n) with frequencies ln(n/m) and amplitudes (mn)^{-sigma}, so the
//! quadrature order is sized from sigma alone: once ratio frequencies up to
//! Omega are resolved, the unresolved tail carries L2 mass
//! e^{(1-2s)Omega} zeta(4s-1)/(2s-1) and the panel noise is set by its
//! square root, not by the evaluator's term count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ladder::QuadratureConfig;
use crate::quad::gl_rule;
use crate::zeta::{zeta_two_sigma, EmBatch, EvalConfig};

/// Hard floor for sigma in the mean-value lemma; the remainder constant
/// blows up as sigma approaches 1.
pub const ALPHA_MIN: f64 = 1.1;

/// Hard cap on Gauss-Legendre panel order; the order model never needs
/// more than this for sigma >= ALPHA_MIN at the default panel width.
pub(crate) const ORDER_CAP: usize = 64;

/// Every RECHECK_STRIDE-th panel is recomputed at a higher order as an
/// embedded error check.
pub(crate) const RECHECK_STRIDE: usize = 16;

/// One scan measurement.
#[derive(Clone, Copy, Debug)]
pub struct MvtEntry {
    pub sigma: f64,
    pub t: f64,
    pub u: f64,
    pub integral: f64,
    pub zeta2sigma: f64,
    pub residual: f64,
}

/// Scan output, sorted by (sigma, T, U).
#[derive(Clone, Debug)]
pub struct MvtReport {
    pub entries: Vec<MvtEntry>,
    pub max_abs_residual: f64,
    /// Least-squares slope of |residual| against ln T; uniformity in T
    /// predicts a slope statistically indistinguishable from zero.
    pub trend_slope: f64,
}

/// GL order that resolves pair frequencies up to Omega(sigma_min) on a
/// panel of width w. zeta(4s - 1) <= zeta(3.4) < 1.2 for s >= 1.1, and the
/// 4e-18 mass target keeps per-unit quadrature noise near 1e-9.
fn panel_order(w: f64, sigma_min: f64) -> usize {
    let d = 2.0 * sigma_min - 1.0;
    let omega = (1.2 / (d * 4e-18)).ln() / d;
    ((w * omega / std::f64::consts::PI).ceil() as usize + 8).min(ORDER_CAP)
}

/// Integral of |zeta(sigma_i + it)|^2 over [t0, t0 + u] for every sigma in
/// the batch at once. Every 16th panel is re-done at higher order; a
/// disagreement past the panel's share of `abs_tol` per unit length means
/// the order model is wrong for these inputs, and that is an error.
fn integrate_abs_sq(
    batch: &EmBatch,
    t0: f64,
    u: f64,
    cfg: &QuadratureConfig,
    out: &mut [f64],
) -> Result<()> {
    let sigma_min = batch.sigmas().iter().cloned().fold(f64::INFINITY, f64::min);
    let w_target = 8.0 * cfg.panel_scale;
    let n_panels = (u / w_target).ceil().max(1.0) as usize;
    let w = u / n_panels as f64;
    let rule = gl_rule(panel_order(w, sigma_min));
    let check = gl_rule(rule.nodes.len() + 8);
    let ns = batch.sigmas().len();
    assert_eq!(out.len(), ns);
    out.fill(0.0);
    let mut vals = vec![num_complex::Complex64::new(0.0, 0.0); ns];
    let mut panel = vec![0.0f64; ns];
    let mut redo = vec![0.0f64; ns];
    for p in 0..n_panels {
        let lo = t0 + p as f64 * w;
        panel.fill(0.0);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            batch.eval_all(lo + w * (x + 1.0) / 2.0, &mut vals)?;
            for (acc, v) in panel.iter_mut().zip(&vals) {
                *acc += wt * v.norm_sqr();
            }
        }
        if p % RECHECK_STRIDE == 0 {
            redo.fill(0.0);
            for (x, wt) in check.nodes.iter().zip(&check.weights) {
                batch.eval_all(lo + w * (x + 1.0) / 2.0, &mut vals)?;
                for (acc, v) in redo.iter_mut().zip(&vals) {
                    *acc += wt * v.norm_sqr();
                }
            }
            for (i, (&a, &b)) in panel.iter().zip(&redo).enumerate() {
                if (a - b).abs() * w / 2.0 > 0.5 * cfg.abs_tol * w {
                    return Err(Error::Numeric(format!(
                        "mean-value quadrature did not converge on panel [{lo}, {}] \
                         at sigma={} (orders {} vs {} disagree by {:.3e})",
                        lo + w,
                        batch.sigmas()[i],
                        rule.nodes.len(),
                        check.nodes.len(),
                        (a - b).abs() * w / 2.0
                    )));
                }
            }
            panel.copy_from_slice(&redo);
        }
        for (acc, &v) in out.iter_mut().zip(panel.iter()) {
            *acc += v * w / 2.0;
        }
    }
    Ok(())
}

fn check_window(sigma: f64, t: f64, u: f64) -> Result<()> {
    if !(sigma >= ALPHA_MIN) {
        return Err(Error::Domain(format!(
            "mean-value lemma operates at sigma >= {ALPHA_MIN}, got {sigma}"
        )));
    }
    if !(t > 0.0 && u > 0.0 && (t + u).is_finite()) {
        return Err(Error::Domain(format!("window needs T > 0 and U > 0, got T={t}, U={u}")));
    }
    Ok(())
}

/// (integral, residual) of one window [T, T + U] on the line sigma, with
/// residual = integral - zeta(2 sigma) U.
pub fn local_mean_value(
    sigma: f64,
    t: f64,
    u: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    check_window(sigma, t, u)?;
    let batch = EmBatch::new(&[sigma], t + u, &EvalConfig::default())?;
    let mut out = [0.0f64];
    integrate_abs_sq(&batch, t, u, cfg, &mut out)?;
    Ok((out[0], out[0] - zeta_two_sigma(sigma)? * u))
}

/// Window set per base point: the fixed list, optionally joined by
/// U = ln ln T (the shortest window the asymptotic formula still covers).
fn windows_for(t: f64, u_grid: &[f64], include_lnln_t: bool) -> Vec<f64> {
    let mut us = u_grid.to_vec();
    if include_lnln_t {
        us.push(t.ln().ln());
    }
    us
}

/// Residual scan over a (sigma, T, U) grid.
pub fn uniformity_scan(
    sigmas: &[f64],
    t_grid: &[f64],
    u_grid: &[f64],
    include_lnln_t: bool,
    cfg: &QuadratureConfig,
) -> Result<MvtReport> {
    cfg.validate()?;
    if sigmas.is_empty() || t_grid.is_empty() || (u_grid.is_empty() && !include_lnln_t) {
        return Err(Error::Config("uniformity scan needs nonempty sigma/T/U grids".into()));
    }
    for (&t, &u) in t_grid.iter().flat_map(|t| u_grid.iter().map(move |u| (t, u))) {
        check_window(ALPHA_MIN, t, u)?;
    }
    for &sg in sigmas {
        check_window(sg, 1.0, 1.0)?;
    }
    let mut z2: Vec<f64> = Vec::with_capacity(sigmas.len());
    for &sg in sigmas {
        z2.push(zeta_two_sigma(sg)?);
    }

    // One batch per base point covers all its windows; base points are
    // independent, so the pool splits there and the final sort restores a
    // worker-count-independent order.
    let per_t: Vec<Vec<MvtEntry>> = t_grid
        .par_iter()
        .map(|&t| -> Result<Vec<MvtEntry>> {
            let us = windows_for(t, u_grid, include_lnln_t);
            let u_max = us.iter().cloned().fold(0.0f64, f64::max);
            let batch = EmBatch::new(sigmas, t + u_max, &EvalConfig::default())?;
            let mut got = vec![0.0f64; sigmas.len()];
            let mut entries = Vec::with_capacity(us.len() * sigmas.len());
            for &u in &us {
                integrate_abs_sq(&batch, t, u, cfg, &mut got)?;
                for ((&sigma, &integral), &zeta2sigma) in
                    sigmas.iter().zip(&got).zip(&z2)
                {
                    entries.push(MvtEntry {
                        sigma,
                        t,
                        u,
                        integral,
                        zeta2sigma,
                        residual: integral - zeta2sigma * u,
                    });
                }
            }
            Ok(entries)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut entries: Vec<MvtEntry> = per_t.into_iter().flatten().collect();
    entries.sort_by(|a, b| {
        (a.sigma, a.t, a.u)
            .partial_cmp(&(b.sigma, b.t, b.u))
            .expect("scan grid values are finite")
    });
    let max_abs_residual =
        entries.iter().map(|e| e.residual.abs()).fold(0.0f64, f64::max);
    Ok(MvtReport { entries: entries.clone(), max_abs_residual, trend_slope: trend_slope(&entries) })
}

/// Least-squares slope of |residual| against ln T; 0 for a degenerate grid.
fn trend_slope(entries: &[MvtEntry]) -> f64 {
    let n = entries.len() as f64;
    let mx = entries.iter().map(|e| e.t.ln()).sum::<f64>() / n;
    let my = entries.iter().map(|e| e.residual.abs()).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for e in entries {
        let dx = e.t.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (e.residual.abs() - my);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

// ---------------------------------------------------------------------------
// Bound sums
// ---------------------------------------------------------------------------

fn check_bound_args(sigma: f64, n_max: usize) -> Result<()> {
    if !(sigma > 1.0) {
        return Err(Error::Domain(format!("bound sums need sigma > 1, got {sigma}")));
    }
    if n_max < 4 {
        return Err(Error::Domain(format!("bound sums need n_max >= 4, got {n_max}")));
    }
    Ok(())
}

/// Truncated well-separated pair sum: sum over n <= n_max, m < n/2 of
/// (mn)^{-sigma}. Converges below (1 + 1/(sigma - 1))^2.
pub fn s1_bound(sigma: f64, n_max: usize) -> Result<f64> {
    check_bound_args(sigma, n_max)?;
    let mut prefix = 0.0; // sum of m^{-sigma} for m <= (n-1)/2
    let mut m_top = 0usize;
    let mut sum = 0.0;
    for n in 1..=n_max {
        while m_top < (n - 1) / 2 {
            m_top += 1;
            prefix += (m_top as f64).powf(-sigma);
        }
        sum += (n as f64).powf(-sigma) * prefix;
    }
    Ok(sum)
}

/// Truncated near-diagonal pair sum: sum over n <= n_max, 1 <= r < n/2 of
/// n / ((n - r) n)^sigma / r, the m = n - r half of the pair kernel.
pub fn s2_bound(sigma: f64, n_max: usize) -> Result<f64> {
    check_bound_args(sigma, n_max)?;
    let pw: Vec<f64> = (0..=n_max).map(|k| (k as f64).powf(-sigma)).collect();
    let mut sum = 0.0;
    for n in 3..=n_max {
        let mut inner = 0.0;
        for r in 1..=(n - 1) / 2 {
            inner += pw[n - r] / r as f64;
        }
        sum += (n as f64) * pw[n] * inner;
    }
    Ok(sum)
}

/// Closed-form majorant for the near-diagonal sum, including the fixed
/// slack factor 4 that turns the O-bound into a testable envelope.
pub fn s2_envelope(sigma: f64) -> Result<f64> {
    if !(sigma > 1.0) {
        return Err(Error::Domain(format!("envelope needs sigma > 1, got {sigma}")));
    }
    let ln2 = std::f64::consts::LN_2;
    let d = sigma - 1.0;
    let core = ln2 / 2f64.powf(2.0 * sigma - 1.0)
        + 2f64.powf(1.0 - 2.0 * sigma) * ln2 / d
        + 2f64.powf(-2.0 * sigma) / (d * d);
    Ok(2f64.powf(sigma) * core * 4.0)
}
