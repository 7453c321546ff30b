//! Zeta-function evaluators.
//!
//! Three routes with disjoint strengths: a truncated Dirichlet series for
//! sigma comfortably above 1, an Euler-Maclaurin continuation for any
//! sigma > 0, and the real Hardy Z function on the critical line via an
//! accelerated alternating series at moderate height and the Riemann-Siegel
//! expansion above it. `abs_zeta_sq` dispatches between them.

use std::f64::consts::PI;
use std::sync::LazyLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncation knobs shared by the series evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Relative tolerance for certified truncation error (with an absolute
    /// floor of `tol` when the value itself is below 1).
    pub tol: f64,
    /// Hard cap on series length; evaluations that would need more terms
    /// fail rather than degrade.
    pub max_terms: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_terms: 10_000_000 }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!(
                "tol must be positive and finite, got {}",
                self.tol
            )));
        }
        if self.max_terms < 10 {
            return Err(Error::Config(format!(
                "max_terms must be at least 10, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// One evaluated point of the zeta function.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ZetaSample {
    pub sigma: f64,
    pub t: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub abs_sq: f64,
}

impl ZetaSample {
    fn new(sigma: f64, t: f64, v: Complex64) -> Self {
        Self { sigma, t, value_re: v.re, value_im: v.im, abs_sq: v.norm_sqr() }
    }
}

// Phases reach t * ln n ~ 1.3e7 at the top of the operating range; reduce
// mod 2 pi with a two-term split so the libm call stays on its fast path.
const TWO_PI: f64 = std::f64::consts::TAU;
const TWO_PI_HI: f64 = f64::from_bits(TWO_PI.to_bits() & 0xffff_ffff_fc00_0000);
const TWO_PI_LO: f64 = TWO_PI - TWO_PI_HI;

/// (sin, cos) of `phi` after Cody-Waite reduction mod 2 pi.
///
/// Exact up to the f64 representation of `phi` itself for |phi| < 4e8;
/// the quotient times the 27-bit head is exact, so no extra error enters.
#[inline]
pub(crate) fn phase_sincos(phi: f64) -> (f64, f64) {
    let k = (phi * (1.0 / TWO_PI)).round();
    let r = (phi - k * TWO_PI_HI) - k * TWO_PI_LO;
    r.sin_cos()
}

// ---------------------------------------------------------------------------
// Dirichlet series
// ---------------------------------------------------------------------------

const DIRICHLET_PROBE: usize = 64;

#[inline]
fn dirichlet_term(n: usize, sigma: f64, ta: f64) -> Complex64 {
    let ln_n = (n as f64).ln();
    let a = (-sigma * ln_n).exp();
    let (sin, cos) = phase_sincos(ta * ln_n);
    Complex64::new(a * cos, -(a * sin))
}

/// Integral bound on the dropped tail after n terms: n^(1-sigma)/(sigma-1).
#[inline]
fn dirichlet_tail(n: f64, sigma: f64) -> f64 {
    n.powf(1.0 - sigma) / (sigma - 1.0)
}

/// Series length projected to meet `cfg.tol` relative to a partial sum of
/// modulus `partial_norm`.
pub(crate) fn dirichlet_projected_terms(sigma: f64, partial_norm: f64, cfg: &EvalConfig) -> f64 {
    ((sigma - 1.0) * cfg.tol * partial_norm).powf(-1.0 / (sigma - 1.0))
}

fn dirichlet_partial(sigma: f64, ta: f64, n: usize) -> Complex64 {
    (1..=n).map(|m| dirichlet_term(m, sigma, ta)).sum()
}

/// Truncated Dirichlet series, sigma >= 1 + 1e-6.
///
/// Stops once the integral tail bound drops under `tol` times the partial
/// sum. A short probe projects the required length first; evaluations whose
/// projection exceeds `max_terms` fail with `SeriesInfeasible` instead of
/// burning the full cap.
pub fn zeta_dirichlet(sigma: f64, t: f64, cfg: &EvalConfig) -> Result<ZetaSample> {
    cfg.validate()?;
    if !(sigma >= 1.0 + 1e-6) {
        return Err(Error::Domain(format!(
            "zeta_dirichlet needs sigma >= 1 + 1e-6, got {sigma}"
        )));
    }
    let ta = t.abs();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    while n < DIRICHLET_PROBE.min(cfg.max_terms) {
        n += 1;
        sum += dirichlet_term(n, sigma, ta);
        if dirichlet_tail(n as f64, sigma) <= cfg.tol * sum.norm() {
            return Ok(finish_conjugate(sigma, t, sum));
        }
    }
    let needed = dirichlet_projected_terms(sigma, sum.norm(), cfg);
    if !(needed <= cfg.max_terms as f64) {
        return Err(Error::SeriesInfeasible { sigma, needed, cap: cfg.max_terms });
    }
    while n < cfg.max_terms {
        let stop = (n + 4096).min(cfg.max_terms);
        while n < stop {
            n += 1;
            sum += dirichlet_term(n, sigma, ta);
        }
        if dirichlet_tail(n as f64, sigma) <= cfg.tol * sum.norm() {
            return Ok(finish_conjugate(sigma, t, sum));
        }
    }
    Err(Error::SeriesInfeasible { sigma, needed, cap: cfg.max_terms })
}

fn finish_conjugate(sigma: f64, t: f64, v: Complex64) -> ZetaSample {
    ZetaSample::new(sigma, t, if t < 0.0 { v.conj() } else { v })
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin continuation
// ---------------------------------------------------------------------------

const EM_K_MAX: usize = 40;

/// b_k = B_{2k}/(2k)!, via b_k = 2 (-1)^{k+1} zeta(2k) / (2 pi)^{2k}.
/// Closed forms seed 2k <= 8; beyond that a 64-term sum is already exact
/// to f64, so no Bernoulli recurrence (unstable) is ever run.
static EM_COEFFS: LazyLock<[f64; EM_K_MAX + 1]> = LazyLock::new(|| {
    let mut b = [0.0f64; EM_K_MAX + 1];
    let mut pow = 1.0; // (2 pi)^{2k}
    for k in 1..=EM_K_MAX {
        pow *= TWO_PI * TWO_PI;
        let z = match 2 * k {
            2 => PI * PI / 6.0,
            4 => PI.powi(4) / 90.0,
            6 => PI.powi(6) / 945.0,
            8 => PI.powi(8) / 9450.0,
            m => (1..=64).map(|n| (n as f64).powi(-(m as i32))).sum(),
        };
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        b[k] = 2.0 * sign * z / pow;
    }
    b
});

/// Main-sum length the Euler-Maclaurin route uses at height `ta`.
///
/// The correction terms shrink by roughly (|s + 2k| / (2 pi n))^2 per step,
/// so n must stay a fixed fraction of t; n = t/4 gives ratio ~ 0.41.
pub(crate) fn em_main_len(ta: f64) -> usize {
    ((0.25 * ta).ceil() as usize).max(16)
}

/// Boundary closure of a partial sum over 1..n:
/// n^{1-s}/(s-1) + n^{-s}/2 + sum_k b_k s(s+1)...(s+2k-2) n^{-s-2k+1}.
///
/// Returns None when the correction series cannot certify `abs_tol`;
/// the standard remainder bound |T_{K+1}| |s+2K+1| / (sigma+2K+1) gates
/// termination. Terms are built iteratively so nothing overflows even
/// when the raw factor products would.
fn em_boundary(s: Complex64, n: usize, abs_tol: f64) -> Option<Complex64> {
    let b = &*EM_COEFFS;
    let nf = n as f64;
    let n_pow = (-s * nf.ln()).exp();
    let mut acc = n_pow * (nf / (s - 1.0) + 0.5);
    let inv_n2 = 1.0 / (nf * nf);
    let mut term = b[1] * s * n_pow / nf;
    for k in 1..=EM_K_MAX {
        let gate = (s + (2 * k - 1) as f64).norm() / (s.re + (2 * k - 1) as f64);
        if term.norm() * gate <= abs_tol {
            return Some(acc);
        }
        acc += term;
        if k == EM_K_MAX {
            break;
        }
        term = term * (s + (2 * k - 1) as f64) * (s + (2 * k) as f64) * ((b[k + 1] / b[k]) * inv_n2);
    }
    None
}

fn zeta_em_core(sigma: f64, ta: f64, tol: f64, max_terms: usize) -> Result<Complex64> {
    let s = Complex64::new(sigma, ta);
    let mut n = em_main_len(ta);
    for _ in 0..6 {
        if n > max_terms {
            return Err(Error::Numeric(format!(
                "euler-maclaurin main sum needs {n} terms at sigma={sigma}, t={ta}, over the {max_terms}-term cap"
            )));
        }
        let mut main = Complex64::new(0.0, 0.0);
        for m in 1..n {
            main += dirichlet_term(m, sigma, ta);
        }
        let scale = tol * main.norm().max(1.0);
        if let Some(tail) = em_boundary(s, n, scale) {
            return Ok(main + tail);
        }
        n *= 2;
    }
    Err(Error::Numeric(format!(
        "euler-maclaurin corrections failed to converge at sigma={sigma}, t={ta}"
    )))
}

/// Euler-Maclaurin evaluation, valid for any sigma > 0 away from s = 1.
///
/// Certified truncation error <= tol * max(|value|, 1); the main-sum length
/// scales as t/4 and doubles (up to five times) if the correction series
/// stalls.
pub fn zeta_em(sigma: f64, t: f64, cfg: &EvalConfig) -> Result<ZetaSample> {
    cfg.validate()?;
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("zeta_em needs sigma > 0, got {sigma}")));
    }
    if sigma == 1.0 && t == 0.0 {
        return Err(Error::Domain("pole at s = 1".into()));
    }
    let v = zeta_em_core(sigma, t.abs(), cfg.tol, cfg.max_terms)?;
    Ok(finish_conjugate(sigma, t, Complex64::new(v.re, v.im)))
}

// ---------------------------------------------------------------------------
// Batched Euler-Maclaurin over a shared term table
// ---------------------------------------------------------------------------

/// Fixed-cutoff Euler-Maclaurin evaluator for several sigma values at once.
///
/// One phase evaluation per term feeds every sigma, which is what makes
/// dense quadrature of |zeta|^2 along several lines affordable. Valid for
/// |t| <= 4 * n_terms(); the cutoff is sized for `t_max` at construction.
pub struct EmBatch {
    n: usize,
    ln_k: Vec<f64>,
    sigmas: Vec<f64>,
    pows: Vec<Vec<f64>>,
    tol: f64,
}

impl EmBatch {
    pub fn new(sigmas: &[f64], t_max: f64, cfg: &EvalConfig) -> Result<Self> {
        cfg.validate()?;
        if !(t_max >= 0.0) {
            return Err(Error::Domain(format!("t_max must be nonnegative, got {t_max}")));
        }
        for &sg in sigmas {
            if !(sg > 0.0) {
                return Err(Error::Domain(format!("EmBatch needs sigma > 0, got {sg}")));
            }
        }
        let n = em_main_len(t_max);
        if n > cfg.max_terms {
            return Err(Error::Numeric(format!(
                "batched euler-maclaurin needs {n} terms for t_max={t_max}, over the {}-term cap",
                cfg.max_terms
            )));
        }
        let ln_k: Vec<f64> = (1..n).map(|m| (m as f64).ln()).collect();
        let pows = sigmas
            .iter()
            .map(|&sg| ln_k.iter().map(|&l| (-sg * l).exp()).collect())
            .collect();
        Ok(Self { n, ln_k, sigmas: sigmas.to_vec(), pows, tol: cfg.tol })
    }

    pub fn n_terms(&self) -> usize {
        self.n
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Largest |t| the cutoff supports.
    pub fn t_max(&self) -> f64 {
        4.0 * self.n as f64
    }

    /// zeta(sigma_i + i t) for every configured sigma into `out`.
    pub fn eval_all(&self, t: f64, out: &mut [Complex64]) -> Result<()> {
        assert_eq!(out.len(), self.sigmas.len());
        let ta = t.abs();
        if ta > self.t_max() {
            return Err(Error::Domain(format!(
                "t={t} outside the batch range |t| <= {}",
                self.t_max()
            )));
        }
        for v in out.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for (k, &l) in self.ln_k.iter().enumerate() {
            let (sin, cos) = phase_sincos(ta * l);
            for (i, p) in self.pows.iter().enumerate() {
                let a = p[k];
                out[i].re += a * cos;
                out[i].im -= a * sin;
            }
        }
        for (i, &sg) in self.sigmas.iter().enumerate() {
            let s = Complex64::new(sg, ta);
            let scale = self.tol * out[i].norm().max(1.0);
            let tail = em_boundary(s, self.n, scale).ok_or_else(|| {
                Error::Numeric(format!(
                    "batched euler-maclaurin corrections stalled at sigma={sg}, t={ta}"
                ))
            })?;
            out[i] += tail;
            if t < 0.0 {
                out[i] = out[i].conj();
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Riemann-Siegel theta
// ---------------------------------------------------------------------------

// B_{2k} / (2k (2k-1)) for Stirling's series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// theta(t) = Im ln Gamma(1/4 + i t/2) - (t/2) ln pi, the rotation that makes
/// e^{i theta} zeta(1/2 + i t) real.
///
/// Stirling's series at 1/4 + i t/2, shifted right by integers until
/// |z| >= 16 so the eight-term tail is below 1e-18 at every t >= 0.
pub fn rs_theta(t: f64) -> f64 {
    let y = 0.5 * t;
    let mut x = 0.25f64;
    let mut shift = 0.0;
    while x * x + y * y < 256.0 {
        shift += y.atan2(x);
        x += 1.0;
    }
    let r2 = x * x + y * y;
    let arg = y.atan2(x);
    let mut th = (x - 0.5) * arg + 0.5 * y * (r2 / (PI * PI)).ln() - y - shift;
    let w_inv = Complex64::new(x, y).inv();
    let w_inv2 = w_inv * w_inv;
    let mut p = w_inv;
    for c in STIRLING {
        th += c * p.im;
        p *= w_inv2;
    }
    th
}

// ---------------------------------------------------------------------------
// Critical line, moderate height: accelerated alternating series
// ---------------------------------------------------------------------------

/// Where the Hardy Z evaluation switches to the Riemann-Siegel expansion.
pub(crate) const RS_T_MIN: f64 = 300.0;
/// The alternating-series weights stay inside f64 range up to here, which
/// leaves [RS_T_MIN, ETA_T_MAX] as a cross-validation overlap window.
pub(crate) const ETA_T_MAX: f64 = 365.0;

/// zeta(1/2 + i t) by the accelerated alternating series (Chebyshev-weighted
/// eta), for 0 <= t <= ETA_T_MAX. Truncation error is below 5e-15 with the
/// term count used here.
pub(crate) fn zeta_critical_eta(t: f64) -> Complex64 {
    debug_assert!((0.0..=ETA_T_MAX).contains(&t));
    let n = ((PI * t / 2.0 + (3.0 * (1.0 + 2.0 * t)).ln() + 34.0)
        / (3.0 + 8.0f64.sqrt()).ln())
    .ceil() as usize;
    debug_assert!(n <= 400, "weights overflow f64 beyond n ~ 400");
    let nf = n as f64;
    let mut d = Vec::with_capacity(n + 1);
    let mut e = 1.0f64;
    let mut run = 1.0f64;
    d.push(run);
    for j in 0..n {
        let jf = j as f64;
        e *= 4.0 * (nf + jf) * (nf - jf) / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
        run += e;
        d.push(run);
    }
    let dn = d[n];
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let c = 1.0 - d[k] / dn;
        let kf = (k + 1) as f64;
        let l = kf.ln();
        let a = (-0.5 * l).exp() * c;
        let (sin, cos) = phase_sincos(t * l);
        let term = Complex64::new(a * cos, -(a * sin));
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let denom = Complex64::new(1.0, 0.0)
        - (Complex64::new(0.5, -t) * std::f64::consts::LN_2).exp();
    acc / denom
}

// ---------------------------------------------------------------------------
// Riemann-Siegel remainder via jets of Psi about p = 1/2
// ---------------------------------------------------------------------------

// Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) extends to an entire
// function: every real zero of the denominator cancels. Taylor coefficients
// about the symmetry point p = 1/2 (where the denominator is -cos(2 pi d),
// nonzero) give well-conditioned values of Psi and its derivatives across
// all of [0, 1], which direct evaluation near p = 1/4, 3/4 does not.
const PSI_ORDER: usize = 128;
const PSI_DER_MAX: usize = 12;

struct PsiJets {
    /// der[k][i]: i-th Taylor coefficient (about p = 1/2) of Psi^{(k)}.
    der: Vec<Vec<f64>>,
}

static PSI: LazyLock<PsiJets> = LazyLock::new(|| {
    // Taylor coefficients about p = 1/2 by a Cauchy-circle average on
    // |d| = 1. Long division against the denominator is exponentially
    // unstable (the reciprocal has poles at |d| = 1/4, so roundoff grows
    // like (4d)^m), while the circle average keeps every coefficient at
    // ~1e-15 absolute noise.
    const Q: usize = 512;
    let psi_at = |d: Complex64| -> Complex64 {
        let num = (TWO_PI * d * d - Complex64::new(5.0 * PI / 8.0, 0.0)).cos();
        let den = -(TWO_PI * d).cos();
        num / den
    };
    let samples: Vec<Complex64> = (0..Q)
        .map(|q| psi_at(Complex64::from_polar(1.0, TWO_PI * q as f64 / Q as f64)))
        .collect();
    let mut psi = vec![0.0f64; PSI_ORDER + 1];
    for (m, slot) in psi.iter_mut().enumerate() {
        if m % 2 == 1 {
            continue; // Psi(1-p) = Psi(p): odd coefficients vanish exactly
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (q, &s) in samples.iter().enumerate() {
            let ang = -(TWO_PI * ((m * q) % Q) as f64) / Q as f64;
            acc += s * Complex64::from_polar(1.0, ang);
        }
        *slot = acc.re / Q as f64;
    }
    // Jets of the derivatives, with falling-factorial weights.
    let mut der = Vec::with_capacity(PSI_DER_MAX + 1);
    for k in 0..=PSI_DER_MAX {
        let len = PSI_ORDER + 1 - k;
        let mut v = vec![0.0f64; len];
        for (i, slot) in v.iter_mut().enumerate() {
            let mut ff = 1.0;
            for j in 1..=k {
                ff *= (i + j) as f64;
            }
            *slot = psi[i + k] * ff;
        }
        der.push(v);
    }
    PsiJets { der }
});

/// Psi^{(k)}(p) evaluated at p = 1/2 + delta, |delta| <= 1/2, k <= 12.
pub(crate) fn psi_derivative(k: usize, delta: f64) -> f64 {
    let c = &PSI.der[k];
    let mut acc = 0.0;
    for &a in c.iter().rev() {
        acc = acc * delta + a;
    }
    acc
}

/// Remainder coefficients C_0..C_4 of the Riemann-Siegel expansion at
/// p = tau - floor(tau).
pub(crate) fn rs_correction_values(p: f64) -> [f64; 5] {
    let d = p - 0.5;
    let dv = |k: usize| psi_derivative(k, d);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    [
        dv(0),
        -dv(3) / (96.0 * pi2),
        dv(2) / (64.0 * pi2) + dv(6) / (18_432.0 * pi4),
        -dv(1) / (64.0 * pi2) - dv(5) / (3840.0 * pi4) - dv(9) / (5_308_416.0 * pi6),
        dv(0) / (128.0 * pi2)
            + 19.0 * dv(4) / (24_576.0 * pi4)
            + 11.0 * dv(8) / (5_898_240.0 * pi6)
            + dv(12) / (2_038_431_744.0 * pi8),
    ]
}

const RS_CHEB_DEG: usize = 48;

/// Chebyshev tables of C_0..C_4 over p in [0, 1]: the coefficients are
/// entire, so 48 terms reach coefficient decay below 1e-15 while costing a
/// fraction of the five derivative-jet Horner sums per call. The quadrature
/// over millions of panel nodes lives on this path.
static RS_CHEB: LazyLock<[[f64; RS_CHEB_DEG]; 5]> = LazyLock::new(|| {
    let mut tables = [[0.0f64; RS_CHEB_DEG]; 5];
    let vals: Vec<[f64; 5]> = (0..RS_CHEB_DEG)
        .map(|k| {
            let x = (PI * (k as f64 + 0.5) / RS_CHEB_DEG as f64).cos();
            rs_correction_values((x + 1.0) / 2.0)
        })
        .collect();
    for (i, table) in tables.iter_mut().enumerate() {
        for (j, slot) in table.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, v) in vals.iter().enumerate() {
                acc += v[i] * (PI * j as f64 * (k as f64 + 0.5) / RS_CHEB_DEG as f64).cos();
            }
            *slot = acc * 2.0 / RS_CHEB_DEG as f64;
        }
        table[0] *= 0.5;
    }
    tables
});

fn clenshaw(c: &[f64; RS_CHEB_DEG], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0f64, 0.0f64);
    for &a in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + a;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c[0]
}

/// Riemann-Siegel remainder (-1)^{m+1} tau^{-1/2} sum_j C_j(p) tau^{-j}.
pub(crate) fn rs_tail(tau: f64, p: f64, m: usize) -> f64 {
    let x = 2.0 * p - 1.0;
    let mut corr = 0.0;
    let mut tp = 1.0;
    for table in RS_CHEB.iter() {
        corr += clenshaw(table, x) * tp;
        tp /= tau;
    }
    let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
    sign * corr / tau.sqrt()
}

fn hardy_z_rs(t: f64) -> f64 {
    let tau = (t / TWO_PI).sqrt();
    let m = tau.floor() as usize;
    let p = tau - m as f64;
    let th = rs_theta(t);
    let mut main = 0.0;
    for k in 1..=m {
        let kf = k as f64;
        let (_, cos) = phase_sincos(th - t * kf.ln());
        main += cos / kf.sqrt();
    }
    2.0 * main + rs_tail(tau, p, m)
}

/// Hardy's real function Z(t) = e^{i theta(t)} zeta(1/2 + i t), t >= 2.
///
/// Below RS_T_MIN the alternating series carries the value (error ~ 5e-15);
/// above it the Riemann-Siegel main sum plus the C_0..C_4 remainder does
/// (error ~ t^{-11/4}, below 1e-11 everywhere it is used). |Z(t)| equals
/// |zeta(1/2 + i t)| identically.
pub fn hardy_z(t: f64) -> Result<f64> {
    if !(t >= 2.0) {
        return Err(Error::Domain(format!("hardy_z needs t >= 2, got {t}")));
    }
    if t < RS_T_MIN {
        let z = zeta_critical_eta(t);
        let th = rs_theta(t);
        Ok((Complex64::from_polar(1.0, th) * z).re)
    } else {
        Ok(hardy_z_rs(t))
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// zeta(2 sigma) for sigma > 1, real and positive.
pub fn zeta_two_sigma(sigma: f64) -> Result<f64> {
    if !(sigma > 1.0) {
        return Err(Error::Domain(format!("zeta_two_sigma needs sigma > 1, got {sigma}")));
    }
    // t = 0 is cheap, so ask for near full precision: this constant divides
    // normalized residuals and must not contribute visible error.
    let cfg = EvalConfig { tol: 1e-13, ..EvalConfig::default() };
    Ok(zeta_em(2.0 * sigma, 0.0, &cfg)?.value_re)
}

/// |zeta(sigma + i t)|^2, dispatching on sigma.
///
/// Deterministic rule: sigma == 1/2 exactly uses hardy_z(|t|)^2; sigma > 1
/// uses the Dirichlet series when its projected length both fits the cap and
/// does not exceed the Euler-Maclaurin main-sum length (so it is never the
/// slower route), otherwise Euler-Maclaurin; every other sigma > 0 uses
/// Euler-Maclaurin directly.
pub fn abs_zeta_sq(sigma: f64, t: f64, cfg: &EvalConfig) -> Result<f64> {
    if sigma == 0.5 {
        let z = hardy_z(t.abs())?;
        return Ok(z * z);
    }
    if sigma > 1.0 {
        let ta = t.abs();
        let probe = dirichlet_partial(sigma, ta, DIRICHLET_PROBE);
        let needed = dirichlet_projected_terms(sigma, probe.norm(), cfg);
        if needed <= cfg.max_terms as f64 && needed <= em_main_len(ta) as f64 {
            return Ok(zeta_dirichlet(sigma, t, cfg)?.abs_sq);
        }
    }
    Ok(zeta_em(sigma, t, cfg)?.abs_sq)
}
