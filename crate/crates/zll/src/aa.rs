//! Interval sequences K_n, approximate solutions of the three-point
//! relation, the mean-value chain behind them, and the two reciprocity
//! estimates tying the half-line to the sigma0 line.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ladder::{
    integrate_with, substitution_identity_check, Density, LadderTable, QuadratureConfig,
};
use crate::mvt::{local_mean_value, ALPHA_MIN};
use crate::primes::PrimeCounter;
use crate::quad::gl_rule;
use crate::zeta::{abs_zeta_sq, zeta_two_sigma, EvalConfig};
use crate::T_OPERATIONAL_MIN;

/// Nested interval endpoints K_0 < K_1 < .. driven by the recurrence
/// K_{n+1} = K_n + K_n^{1/3 + 2 epsilon}.
#[derive(Clone, Debug)]
pub struct IntervalSeq {
    pub t0: f64,
    pub epsilon: f64,
    /// N + 1 endpoints; k[0] = t0.
    pub k: Vec<f64>,
}

impl IntervalSeq {
    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.k.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.k.len() < 2
    }

    pub fn exponent(&self) -> f64 {
        1.0 / 3.0 + 2.0 * self.epsilon
    }
}

/// Generate N intervals from t0. `t_limit` is the reach of the available
/// ladder table; exceeding it is a range error naming the needed domain.
pub fn k_sequence(t0: f64, epsilon: f64, n: usize, t_limit: f64) -> Result<IntervalSeq> {
    if !(t0 >= T_OPERATIONAL_MIN) {
        return Err(Error::Domain(format!(
            "interval sequences start at T >= {T_OPERATIONAL_MIN}, got {t0}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 0.1], got {epsilon}")));
    }
    let ex = 1.0 / 3.0 + 2.0 * epsilon;
    let mut k = Vec::with_capacity(n + 1);
    k.push(t0);
    for i in 0..n {
        let last = k[i];
        let next = last + last.powf(ex);
        if next > t_limit {
            return Err(Error::Domain(format!(
                "K_{} = {next} leaves the covered domain; a ladder table with \
                 t_max >= {next} is required for {n} intervals",
                i + 1
            )));
        }
        k.push(next);
    }
    Ok(IntervalSeq { t0, epsilon, k })
}

/// Normalized three-point product minus one half:
/// R(xi) = |zeta(1/2 + i xi)|^2 |zeta(sigma0 + i phi1(xi))|^2
///         / (zeta(2 sigma0) ln xi) - 1/2.
pub fn residual_r(sigma0: f64, xi: f64, table: &LadderTable) -> Result<f64> {
    if !(sigma0 >= ALPHA_MIN) {
        return Err(Error::Domain(format!(
            "three-point residual needs sigma0 >= {ALPHA_MIN}, got {sigma0}"
        )));
    }
    if !(xi >= T_OPERATIONAL_MIN) {
        return Err(Error::Domain(format!(
            "three-point residual operates at xi >= {T_OPERATIONAL_MIN}, got {xi}"
        )));
    }
    let z2s = zeta_two_sigma(sigma0)?;
    raw_residual(sigma0, xi, z2s, table)
}

fn raw_residual(sigma0: f64, xi: f64, z2s: f64, table: &LadderTable) -> Result<f64> {
    let cfg = EvalConfig::default();
    let v = table.phi1(xi)?;
    let p = abs_zeta_sq(0.5, xi, &cfg)? * abs_zeta_sq(sigma0, v, &cfg)?;
    Ok(p / (z2s * xi.ln()) - 0.5)
}

/// One located approximate solution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AASolution {
    pub n: usize,
    pub sigma0: f64,
    pub u_n: f64,
    pub v_n: f64,
    /// Signed R(u_n).
    pub residual: f64,
    /// ln ln K_n / ln K_n, the expected decay scale of |R|.
    pub envelope: f64,
    /// |zeta(1/2 + i u_n)|^2 |zeta(sigma0 + i v_n)|^2.
    pub product_lhs: f64,
    /// Set when |residual| > A * envelope; never an error.
    pub envelope_miss: bool,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
pub(crate) const XI_TOL: f64 = 1e-6;

/// Locate the |R| argmin in the open interval (K_n, K_{n+1}): coarse grid,
/// then golden-section refinement of the best bracket. The returned point
/// never scores worse than any grid point.
pub fn find_aa(
    sigma0: f64,
    n: usize,
    seq: &IntervalSeq,
    table: &LadderTable,
    grid_m: usize,
    envelope_a: f64,
) -> Result<AASolution> {
    if grid_m < 128 {
        return Err(Error::Config(format!("search grid needs >= 128 points, got {grid_m}")));
    }
    if !(envelope_a > 0.0) {
        return Err(Error::Config(format!("envelope constant must be positive, got {envelope_a}")));
    }
    if n >= seq.len() {
        return Err(Error::Domain(format!(
            "interval index {n} out of range for a {}-interval sequence",
            seq.len()
        )));
    }
    let (k0, k1) = (seq.k[n], seq.k[n + 1]);
    if !(sigma0 >= ALPHA_MIN) {
        return Err(Error::Domain(format!(
            "three-point residual needs sigma0 >= {ALPHA_MIN}, got {sigma0}"
        )));
    }
    let z2s = zeta_two_sigma(sigma0)?;

    let h = (k1 - k0) / (grid_m + 1) as f64;
    let mut best_x = 0.0;
    let mut best_f = f64::INFINITY;
    let mut best_r = 0.0;
    let consider = |x: f64, r: f64, best_x: &mut f64, best_f: &mut f64, best_r: &mut f64| {
        if r.abs() < *best_f {
            *best_f = r.abs();
            *best_x = x;
            *best_r = r;
        }
    };
    for i in 0..grid_m {
        let x = k0 + h * (i + 1) as f64;
        let r = raw_residual(sigma0, x, z2s, table)?;
        consider(x, r, &mut best_x, &mut best_f, &mut best_r);
    }
    // Golden-section on the bracket of one grid spacing either side; probes
    // stay strictly interior, and the running best is monotone.
    let (mut a, mut b) = (best_x - h, best_x + h);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut r1 = raw_residual(sigma0, x1, z2s, table)?;
    let mut r2 = raw_residual(sigma0, x2, z2s, table)?;
    consider(x1, r1, &mut best_x, &mut best_f, &mut best_r);
    consider(x2, r2, &mut best_x, &mut best_f, &mut best_r);
    while b - a > XI_TOL {
        if r1.abs() <= r2.abs() {
            b = x2;
            x2 = x1;
            r2 = r1;
            x1 = b - GOLDEN * (b - a);
            r1 = raw_residual(sigma0, x1, z2s, table)?;
            consider(x1, r1, &mut best_x, &mut best_f, &mut best_r);
        } else {
            a = x1;
            x1 = x2;
            r1 = r2;
            x2 = a + GOLDEN * (b - a);
            r2 = raw_residual(sigma0, x2, z2s, table)?;
            consider(x2, r2, &mut best_x, &mut best_f, &mut best_r);
        }
    }

    let envelope = k0.ln().ln() / k0.ln();
    let cfg = EvalConfig::default();
    let v_n = table.phi1(best_x)?;
    let product_lhs = abs_zeta_sq(0.5, best_x, &cfg)? * abs_zeta_sq(sigma0, v_n, &cfg)?;
    Ok(AASolution {
        n,
        sigma0,
        u_n: best_x,
        v_n,
        residual: best_r,
        envelope,
        product_lhs,
        envelope_miss: best_f > envelope_a * envelope,
    })
}

/// The four checkpoints of the mean-value chain on [T, T + U0].
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ChainReport {
    pub sigma0: f64,
    pub t: f64,
    pub u0: f64,
    /// Substitution identity, table-derivative density (exact identity).
    pub identity_residual: f64,
    /// |RHS / (zeta(2 sigma0) U0) - 1|: the transported window length.
    pub eq_mean_deviation: f64,
    /// Weighted-mean witness inside [T, T + U0].
    pub xi2: f64,
    pub witness_discrepancy: f64,
    /// |three-point ratio at xi2 - 1/2|.
    pub ratio_deviation: f64,
}

pub fn verify_chain(
    sigma0: f64,
    t: f64,
    epsilon: f64,
    table: &LadderTable,
    cfg: &QuadratureConfig,
) -> Result<ChainReport> {
    cfg.validate()?;
    if !(sigma0 >= ALPHA_MIN) {
        return Err(Error::Domain(format!(
            "three-point residual needs sigma0 >= {ALPHA_MIN}, got {sigma0}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 0.1], got {epsilon}")));
    }
    let u0 = t.powf(1.0 / 3.0 + 2.0 * epsilon);
    let z2s = zeta_two_sigma(sigma0)?;
    let identity_residual =
        substitution_identity_check(sigma0, t, u0, table, Density::TableDerivative)?;

    let eval_cfg = EvalConfig::default();
    let f = |x: f64| abs_zeta_sq(sigma0, x, &eval_cfg);
    let (xa, xb) = (table.phi1(t)?, table.phi1(t + u0)?);
    let rhs = local_mean_value(sigma0, xa, xb - xa, cfg)?.0;
    let eq_mean_deviation = (rhs / (z2s * u0) - 1.0).abs();

    // Weighted mean of f(phi1(.)) with density phi1': locate the witness by
    // sign change of the centered integrand, then bisection.
    let rule = gl_rule(cfg.nodes_per_panel);
    let w_t = cfg.panel_scale * std::f64::consts::TAU / t.ln();
    let lhs_w = integrate_with(t, t + u0, w_t, rule, table.knots(), |x| {
        Ok(f(table.phi1(x)?)? * table.phi1_prime(x)?)
    })?;
    let mean = lhs_w / (xb - xa);
    let g = |x: f64| -> Result<f64> { Ok(f(table.phi1(x)?)? - mean) };
    let xi2 = bisect_sign_change(t, t + u0, &g)?;
    let witness_discrepancy = (f(table.phi1(xi2)?)? * (xb - xa) - lhs_w).abs() / lhs_w.abs();

    let ratio =
        abs_zeta_sq(0.5, xi2, &eval_cfg)? * f(table.phi1(xi2)?)? / (z2s * xi2.ln());
    Ok(ChainReport {
        sigma0,
        t,
        u0,
        identity_residual,
        eq_mean_deviation,
        xi2,
        witness_discrepancy,
        ratio_deviation: (ratio - 0.5).abs(),
    })
}

/// Root of g by grid bracketing plus bisection. g is continuous and
/// integrates to zero against a positive density, so a sign change exists;
/// the grid is densified once before giving up.
fn bisect_sign_change<G: Fn(f64) -> Result<f64>>(a: f64, b: f64, g: &G) -> Result<f64> {
    for m in [129usize, 1025] {
        let mut prev_x = a;
        let mut prev_g = g(a)?;
        for i in 1..=m {
            let x = a + (b - a) * i as f64 / m as f64;
            let gx = g(x)?;
            if prev_g == 0.0 {
                return Ok(prev_x);
            }
            if prev_g.signum() != gx.signum() {
                let (mut lo, mut hi, mut glo) = (prev_x, x, prev_g);
                while hi - lo > 1e-12 * b.abs().max(1.0) {
                    let mid = (lo + hi) / 2.0;
                    let gm = g(mid)?;
                    if gm == 0.0 {
                        return Ok(mid);
                    }
                    if glo.signum() != gm.signum() {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
                return Ok((lo + hi) / 2.0);
            }
            prev_x = x;
            prev_g = gx;
        }
    }
    Err(Error::Numeric("no sign change found for the mean-value witness".into()))
}

/// Distance between the transported segment and the source segment, and
/// the sieve-based prediction. rho <= 0 signals overlap; callers flag it,
/// the value is never clamped.
pub fn segment_distance(
    n: usize,
    seq: &IntervalSeq,
    table: &LadderTable,
    pc: &PrimeCounter,
) -> Result<(f64, f64)> {
    if n >= seq.len() {
        return Err(Error::Domain(format!(
            "interval index {n} out of range for a {}-interval sequence",
            seq.len()
        )));
    }
    let rho = seq.k[n] - table.phi1(seq.k[n + 1])?;
    let predicted = pc.expected_drift(seq.k[n])?;
    Ok((rho, predicted))
}

/// The two reciprocal energy estimates and their relative residuals.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct FaradayPair {
    pub energy_half_line: f64,
    pub energy_sigma0_line: f64,
    pub residual_half: f64,
    pub residual_sigma0: f64,
}

/// Each estimate reconstructs one line's energy from the other through the
/// half-value relation; both residuals collapse algebraically to 2|R|.
pub fn faraday_pair(sol: &AASolution) -> Result<FaradayPair> {
    if sol.envelope_miss {
        return Err(Error::Domain(format!(
            "solution at n={} is flagged envelope-miss; reciprocity is not claimed there",
            sol.n
        )));
    }
    let cfg = EvalConfig::default();
    let e_half = abs_zeta_sq(0.5, sol.u_n, &cfg)?;
    let e_s0 = abs_zeta_sq(sol.sigma0, sol.v_n, &cfg)?;
    let z2s = zeta_two_sigma(sol.sigma0)?;
    let (residual_half, residual_sigma0) = reciprocity_residuals(e_half, e_s0, z2s, sol.u_n.ln());
    Ok(FaradayPair {
        energy_half_line: e_half,
        energy_sigma0_line: e_s0,
        residual_half,
        residual_sigma0,
    })
}

fn reciprocity_residuals(e_half: f64, e_s0: f64, z2s: f64, ln_u: f64) -> (f64, f64) {
    let est_half = z2s * ln_u / (2.0 * e_s0);
    let est_s0 = z2s * ln_u / (2.0 * e_half);
    ((e_half - est_half).abs() / est_half, (e_s0 - est_s0).abs() / est_s0)
}
