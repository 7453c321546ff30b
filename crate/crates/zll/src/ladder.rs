//! The ladder companion phi1 of t and its supporting quadrature.
//!
//! phi1(T) solves V ln V + (c - ln 2pi) V = integral of Z^2 over [0, T].
//! The integral is computed on a global panel partition anchored at t = 2
//! (panel width tracks the mean zero gap 2 pi / ln t), so every evaluation
//! of an interval decomposes into the same panels and additivity holds to
//! quadrature error. Inside a block of panels the Riemann-Siegel main sum
//! is advanced by per-term rotators: node k of one panel is node k of the
//! next shifted by exactly the panel width, so each term needs one complex
//! multiply per panel instead of a fresh sincos per node.

use std::fs;
use std::io;
use std::path::Path;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quad::{gl_rule, GlRule};
use crate::zeta::{abs_zeta_sq, hardy_z, phase_sincos, rs_tail, rs_theta, zeta_em, EvalConfig, RS_T_MIN};
use crate::{EULER, LN_TWO_PI, T_OPERATIONAL_MIN};

const TWO_PI: f64 = std::f64::consts::TAU;
/// Anchor of the global panel partition; Z is evaluated from here up.
pub(crate) const PARTITION_ANCHOR: f64 = 2.0;
/// Panels per rotator block, capped so the frozen width stays within ~1%
/// of the 2 pi / ln t target across the block.
pub(crate) const PANELS_PER_BLOCK: usize = 256;

/// Knobs of the Z^2 quadrature and the ladder equation.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Panel width as a multiple of the mean zero gap 2 pi / ln t.
    pub panel_scale: f64,
    /// Gauss-Legendre order per panel.
    pub nodes_per_panel: usize,
    /// Target absolute error per unit length (the fixed rule beats this
    /// comfortably; kept as a config surface and hashed into tables).
    pub abs_tol: f64,
    /// Additive constant absorbed into the ladder equation's right side,
    /// for sensitivity runs; 0 in all defaults.
    pub c0_offset: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { panel_scale: 0.5, nodes_per_panel: 8, abs_tol: 1e-6, c0_offset: 0.0 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.panel_scale > 0.0 && self.panel_scale <= 1.0) {
            return Err(Error::Config(format!(
                "panel_scale must be in (0, 1], got {}",
                self.panel_scale
            )));
        }
        if self.nodes_per_panel < 4 || self.nodes_per_panel > 64 {
            return Err(Error::Config(format!(
                "nodes_per_panel must be in [4, 64], got {}",
                self.nodes_per_panel
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Config(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !self.c0_offset.is_finite() {
            return Err(Error::Config(format!("c0_offset must be finite, got {}", self.c0_offset)));
        }
        Ok(())
    }

    fn canonical(&self) -> String {
        format!(
            "panel_scale {} nodes_per_panel {} abs_tol {} c0_offset {}",
            self.panel_scale, self.nodes_per_panel, self.abs_tol, self.c0_offset
        )
    }

    pub fn digest(&self) -> u64 {
        fnv1a(self.canonical().as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

// ---------------------------------------------------------------------------
// Global panel partition
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct Block {
    t0: f64,
    w: f64,
    n: usize,
}

impl Block {
    fn edge(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.w
    }
    fn end(&self) -> f64 {
        self.edge(self.n)
    }
}

fn next_block(t0: f64, cfg: &QuadratureConfig) -> Block {
    let w = cfg.panel_scale * TWO_PI / t0.ln();
    // Freeze the width over at most 5% growth in t; 1/ln t then drifts by
    // well under 1% from the target across the block.
    let cap = (0.05 * t0 / w).ceil() as usize;
    Block { t0, w, n: PANELS_PER_BLOCK.min(cap.max(1)) }
}

/// The partition from the anchor up to (and including) the block that
/// covers `hi`. Pure arithmetic; identical for every caller with the same
/// config.
fn blocks_to(hi: f64, cfg: &QuadratureConfig) -> Vec<Block> {
    let mut out = Vec::new();
    let mut t0 = PARTITION_ANCHOR;
    while t0 < hi {
        let b = next_block(t0, cfg);
        t0 = b.end();
        out.push(b);
    }
    out
}

// ---------------------------------------------------------------------------
// Z^2 quadrature
// ---------------------------------------------------------------------------

/// Per-term rotators carrying n^{-1/2} e^{-i t_j ln n} for the current
/// panel's nodes; one complex multiply per term advances a panel.
struct Rotators {
    m_max: usize,
    nodes: usize,
    // row j holds terms n = 1..=m_max for node j
    r: Vec<Complex64>,
    step: Vec<Complex64>,
}

impl Rotators {
    fn init(m_max: usize, t_nodes: &[f64], w: f64) -> Self {
        let nodes = t_nodes.len();
        let mut r = vec![Complex64::new(0.0, 0.0); m_max * nodes];
        let mut step = Vec::with_capacity(m_max);
        for n in 1..=m_max {
            let ln_n = (n as f64).ln();
            let amp = 1.0 / (n as f64).sqrt();
            for (j, &t) in t_nodes.iter().enumerate() {
                let (s, c) = phase_sincos(-t * ln_n);
                r[j * m_max + (n - 1)] = Complex64::new(amp * c, amp * s);
            }
            let (s, c) = phase_sincos(-w * ln_n);
            step.push(Complex64::new(c, s));
        }
        Self { m_max, nodes, r, step }
    }

    fn advance(&mut self) {
        for j in 0..self.nodes {
            let row = &mut self.r[j * self.m_max..(j + 1) * self.m_max];
            for (v, s) in row.iter_mut().zip(&self.step) {
                *v *= *s;
            }
        }
    }

    fn partial_sum(&self, j: usize, m: usize) -> Complex64 {
        self.r[j * self.m_max..j * self.m_max + m.min(self.m_max)].iter().sum()
    }
}

struct Integrator {
    rule: &'static GlRule,
    /// GL node offsets mapped to [0, 1].
    offs: Vec<f64>,
}

impl Integrator {
    fn new(cfg: &QuadratureConfig) -> Self {
        let rule = gl_rule(cfg.nodes_per_panel);
        let offs = rule.nodes.iter().map(|x| (x + 1.0) / 2.0).collect();
        Self { rule, offs }
    }

    /// Z^2 over a short interval by direct per-node evaluation.
    fn z2_direct(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for (o, wt) in self.offs.iter().zip(&self.rule.weights) {
            let z = hardy_z(a + (b - a) * o)?;
            acc += wt * z * z;
        }
        Ok(acc * (b - a) / 2.0)
    }

    /// Integrate full panels [p_lo, p_hi) of one block, snapshotting the
    /// running sum at each cut (grid node) on the way. A cut's value is the
    /// integral from edge(p_lo) to the cut point. Cuts must be sorted and
    /// lie in [edge(p_lo), edge(p_hi)].
    fn run_block(
        &self,
        blk: &Block,
        p_lo: usize,
        p_hi: usize,
        cuts: &[(usize, f64)],
    ) -> Result<(f64, Vec<(usize, f64)>)> {
        let nodes = self.offs.len();
        let mut rot: Option<Rotators> = None;
        let m_max = (blk.end() / TWO_PI).sqrt().floor() as usize;
        let mut sum = 0.0;
        let mut out = Vec::with_capacity(cuts.len());
        let mut ci = 0;
        let mut t_nodes = vec![0.0f64; nodes];
        for p in p_lo..p_hi {
            let e = blk.edge(p);
            let e1 = blk.edge(p + 1);
            while ci < cuts.len() && cuts[ci].1 < e1 {
                out.push((cuts[ci].0, sum + self.z2_direct(e, cuts[ci].1)?));
                ci += 1;
            }
            if e < RS_T_MIN {
                sum += self.z2_direct(e, e1)?;
                continue;
            }
            for (tj, o) in t_nodes.iter_mut().zip(&self.offs) {
                *tj = e + blk.w * o;
            }
            match &mut rot {
                None => rot = Some(Rotators::init(m_max, &t_nodes, blk.w)),
                Some(r) => r.advance(),
            }
            let rot = rot.as_ref().unwrap();
            let mut psum = 0.0;
            for (j, (&t, wt)) in t_nodes.iter().zip(&self.rule.weights).enumerate() {
                let tau = (t / TWO_PI).sqrt();
                let m = tau.floor() as usize;
                let acc = rot.partial_sum(j, m);
                let th = rs_theta(t);
                let z = 2.0 * (th.cos() * acc.re - th.sin() * acc.im)
                    + rs_tail(tau, tau - m as f64, m);
                psum += wt * z * z;
            }
            sum += psum * blk.w / 2.0;
        }
        // Cuts landing exactly on the closing edge.
        for &(idx, _) in &cuts[ci..] {
            out.push((idx, sum));
        }
        Ok((sum, out))
    }
}

/// Quadrature of Z(t)^2 over [a, b] on the global partition.
pub fn integrate_z_squared(a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if !(a >= PARTITION_ANCHOR) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "integrate_z_squared needs {PARTITION_ANCHOR} <= a <= b, got a={a}, b={b}"
        )));
    }
    if b < a {
        return Err(Error::Domain(format!("integrate_z_squared needs a <= b, got a={a}, b={b}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let integ = Integrator::new(cfg);
    let mut total = 0.0;
    for blk in blocks_to(b, cfg) {
        if blk.end() <= a {
            continue;
        }
        if blk.t0 >= b {
            break;
        }
        let lo = a.max(blk.t0);
        let hi = b.min(blk.end());
        // First edge at or after lo, last edge at or before hi.
        let p = (((lo - blk.t0) / blk.w).ceil() as usize).min(blk.n);
        let q = (((hi - blk.t0) / blk.w).floor() as usize).min(blk.n);
        if p >= q {
            total += integ.z2_direct(lo, hi)?;
            continue;
        }
        total += integ.z2_direct(lo, blk.edge(p))?;
        total += integ.run_block(&blk, p, q, &[])?.0;
        total += integ.z2_direct(blk.edge(q), hi)?;
    }
    Ok(total)
}

/// Fixed head integral of |zeta(1/2 + i t)|^2 over [0, 2], below the Z
/// evaluator's domain. Computed once; the integrand is smooth there.
fn small_t_head() -> f64 {
    static HEAD: OnceLock<f64> = OnceLock::new();
    *HEAD.get_or_init(|| {
        let cfg = EvalConfig { tol: 1e-12, ..EvalConfig::default() };
        let rule = gl_rule(32);
        let mut acc = 0.0;
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let t = x + 1.0; // maps [-1,1] to [0,2]
            let v = zeta_em(0.5, t, &cfg).expect("head integrand is in range").abs_sq;
            acc += wt * v;
        }
        acc // interval half-length is 1
    })
}

pub(crate) const NEWTON_MAX_ITERS: usize = 100;

fn newton_ladder(rhs: f64, t: f64) -> Result<(f64, usize)> {
    let gamma = EULER - LN_TWO_PI;
    let mut v = t;
    for it in 1..=NEWTON_MAX_ITERS {
        let g = v * v.ln() + gamma * v - rhs;
        if g.abs() <= 1e-12 * rhs.abs().max(1.0) {
            return Ok((v, it));
        }
        let gp = v.ln() + 1.0 + gamma;
        v -= g / gp;
        if !(v.is_finite() && v > 1.0) {
            return Err(Error::Numeric(format!(
                "ladder equation left its domain at T = {t} (V = {v})"
            )));
        }
    }
    Err(Error::Numeric(format!(
        "ladder equation did not converge at T = {t} within {NEWTON_MAX_ITERS} iterations"
    )))
}

/// The ladder value phi1(T): solves V ln V + (c - ln 2pi) V = I(T).
pub fn solve_ladder(t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if !(t >= T_OPERATIONAL_MIN) {
        return Err(Error::Domain(format!(
            "solve_ladder operates at T >= {T_OPERATIONAL_MIN}, got {t}"
        )));
    }
    let rhs = small_t_head() + integrate_z_squared(PARTITION_ANCHOR, t, cfg)? - cfg.c0_offset;
    let (v, _) = newton_ladder(rhs, t)?;
    if !(v > 0.0 && v < t) {
        return Err(Error::Numeric(format!("ladder value {v} escaped (0, T) at T = {t}")));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Ladder table
// ---------------------------------------------------------------------------

/// Uniform-grid memoization of solve_ladder with monotone interpolation.
pub struct LadderTable {
    grid: Vec<f64>,
    phi: Vec<f64>,
    cfg: QuadratureConfig,
    interp: MonotoneCubic,
}

/// Build the table with one cumulative quadrature pass: blocks integrate in
/// parallel, grid nodes snapshot partial sums, and a sequential prefix over
/// block index assembles I(t) identically for any worker count.
pub fn build_table(
    t_min: f64,
    t_max: f64,
    n_points: usize,
    cfg: &QuadratureConfig,
) -> Result<LadderTable> {
    cfg.validate()?;
    if !(t_min >= T_OPERATIONAL_MIN && t_min < t_max && t_max.is_finite()) {
        return Err(Error::Domain(format!(
            "table domain needs {T_OPERATIONAL_MIN} <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if n_points < 64 {
        return Err(Error::Config(format!("table needs >= 64 points, got {n_points}")));
    }
    if n_points > 20_000_000 {
        return Err(Error::Config(format!("{n_points} table points would not fit in memory")));
    }
    let step = (t_max - t_min) / (n_points - 1) as f64;
    let grid: Vec<f64> = (0..n_points)
        .map(|i| if i == n_points - 1 { t_max } else { t_min + i as f64 * step })
        .collect();

    let blocks = blocks_to(t_max, cfg);
    // Distribute grid nodes to blocks: node t belongs to the block with
    // t0 <= t < end, except the final block keeps t == end too.
    let mut cuts_by_block: Vec<Vec<(usize, f64)>> = vec![Vec::new(); blocks.len()];
    {
        let mut bi = 0;
        for (idx, &g) in grid.iter().enumerate() {
            while bi + 1 < blocks.len() && blocks[bi + 1].t0 <= g {
                bi += 1;
            }
            cuts_by_block[bi].push((idx, g));
        }
    }
    let integ = Integrator::new(cfg);
    let results: Vec<(f64, Vec<(usize, f64)>)> = blocks
        .par_iter()
        .zip(cuts_by_block.par_iter())
        .map(|(blk, cuts)| integ.run_block(blk, 0, blk.n, cuts))
        .collect::<Result<Vec<_>>>()?;

    let head = small_t_head();
    let mut i_grid = vec![0.0f64; n_points];
    let mut prefix = 0.0;
    for (bsum, cut_vals) in &results {
        for &(idx, v) in cut_vals {
            i_grid[idx] = prefix + v;
        }
        prefix += bsum;
    }

    let mut phi = Vec::with_capacity(n_points);
    for (idx, &g) in grid.iter().enumerate() {
        let (v, _) = newton_ladder(head + i_grid[idx] - cfg.c0_offset, g)?;
        phi.push(v);
    }
    for i in 0..n_points {
        if phi[i] >= grid[i] {
            return Err(Error::Numeric(format!(
                "ladder invariant phi1 < t violated at node {i} ({} >= {})",
                phi[i], grid[i]
            )));
        }
        if i > 0 && phi[i] <= phi[i - 1] {
            return Err(Error::Numeric(format!("ladder values not increasing at node {i}")));
        }
    }
    let interp = MonotoneCubic::new(grid.clone(), phi.clone())?;
    Ok(LadderTable { grid, phi, cfg: cfg.clone(), interp })
}

impl LadderTable {
    pub fn t_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    pub fn node(&self, i: usize) -> (f64, f64) {
        (self.grid[i], self.phi[i])
    }

    /// Interpolation knots, for quadrature that must not straddle them.
    pub(crate) fn knots(&self) -> &[f64] {
        &self.grid
    }

    /// Interpolated ladder value.
    pub fn phi1(&self, t: f64) -> Result<f64> {
        self.interp.eval(t)
    }

    /// Derivative of the interpolant; needs t strictly inside the domain.
    pub fn phi1_prime(&self, t: f64) -> Result<f64> {
        if !(t > self.t_min() && t < self.t_max()) {
            return Err(Error::Domain(format!(
                "phi1_prime needs t inside ({}, {}), got {t}",
                self.t_min(),
                self.t_max()
            )));
        }
        self.interp.deriv(t)
    }

    /// Mean slope of the ladder across [T, T+U].
    pub fn slope_tan_alpha(&self, t: f64, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::Domain(format!("slope needs U > 0, got {u}")));
        }
        Ok((self.phi1(t + u)? - self.phi1(t)?) / u)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = String::new();
        s.push_str("zll-ladder-table v1\n");
        s.push_str(&format!(
            "t_min {} t_max {} n_points {}\n",
            self.t_min(),
            self.t_max(),
            self.len()
        ));
        s.push_str(&format!("{} hash {:016x}\n", self.cfg.canonical(), self.cfg.digest()));
        s.push_str("data t phi1\n");
        for (t, p) in self.grid.iter().zip(&self.phi) {
            s.push_str(&format!("{t} {p}\n"));
        }
        crate::report::write_atomic(path, s.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        let mut lines = text.lines();
        let bad = |what: &str| Error::Config(format!("ladder table {path:?}: {what}"));
        if lines.next() != Some("zll-ladder-table v1") {
            return Err(bad("missing version header"));
        }
        let meta: Vec<&str> = lines.next().ok_or_else(|| bad("truncated header"))?.split(' ').collect();
        if meta.len() != 6 || meta[0] != "t_min" || meta[2] != "t_max" || meta[4] != "n_points" {
            return Err(bad("malformed bounds line"));
        }
        let n_points: usize = meta[5].parse().map_err(|_| bad("bad n_points"))?;
        let cfg_line: Vec<&str> =
            lines.next().ok_or_else(|| bad("truncated header"))?.split(' ').collect();
        if cfg_line.len() != 10 || cfg_line[8] != "hash" {
            return Err(bad("malformed config line"));
        }
        let pf = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| bad(&format!("bad float {s}")))
        };
        let cfg = QuadratureConfig {
            panel_scale: pf(cfg_line[1])?,
            nodes_per_panel: cfg_line[3].parse().map_err(|_| bad("bad nodes_per_panel"))?,
            abs_tol: pf(cfg_line[5])?,
            c0_offset: pf(cfg_line[7])?,
        };
        let stored = u64::from_str_radix(cfg_line[9], 16).map_err(|_| bad("bad hash"))?;
        if stored != cfg.digest() {
            return Err(bad("config hash mismatch"));
        }
        cfg.validate()?;
        if lines.next() != Some("data t phi1") {
            return Err(bad("missing data header"));
        }
        let mut grid = Vec::with_capacity(n_points);
        let mut phi = Vec::with_capacity(n_points);
        for line in lines {
            let mut it = line.split(' ');
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad(&format!("malformed row {line:?}")));
            };
            grid.push(pf(a)?);
            phi.push(pf(b)?);
        }
        if grid.len() != n_points {
            return Err(bad(&format!("expected {n_points} rows, found {}", grid.len())));
        }
        if pf(meta[1])? != grid[0] || pf(meta[3])? != *grid.last().unwrap() {
            return Err(bad("header bounds disagree with data"));
        }
        let interp = MonotoneCubic::new(grid.clone(), phi.clone())?;
        let table = LadderTable { grid, phi, cfg, interp };
        for i in 0..table.grid.len() {
            if table.phi[i] >= table.grid[i] {
                return Err(bad("phi1 < t violated"));
            }
        }
        Ok(table)
    }
}

// ---------------------------------------------------------------------------
// Ladder-normalized density and the substitution identity
// ---------------------------------------------------------------------------

/// Leading-order normalized square Z(t)^2 / ln t.
pub fn z_tilde_sq(t: f64) -> Result<f64> {
    if !(t >= T_OPERATIONAL_MIN) {
        return Err(Error::Domain(format!(
            "z_tilde_sq operates at t >= {T_OPERATIONAL_MIN}, got {t}"
        )));
    }
    let z = hardy_z(t)?;
    Ok(z * z / t.ln())
}

/// Which density carries the left side of the substitution identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Density {
    /// The table derivative: makes the identity a pure change of variables.
    TableDerivative,
    /// The leading-order rule Z^2/ln t: the residual then measures the
    /// dropped correction factor, not just quadrature.
    RawZSquared,
}

/// Panel-wise quadrature with error propagation from the integrand.
/// Panels never straddle a knot: integrands built from the table are only
/// piecewise smooth, with curvature jumps at grid nodes.
pub(crate) fn integrate_with<F: Fn(f64) -> Result<f64>>(
    a: f64,
    b: f64,
    w_target: f64,
    rule: &GlRule,
    knots: &[f64],
    f: F,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut lo = a;
    let mut ki = knots.partition_point(|&k| k <= a);
    loop {
        let hi = if ki < knots.len() && knots[ki] < b { knots[ki] } else { b };
        let n = ((hi - lo) / w_target).ceil().max(1.0) as usize;
        let w = (hi - lo) / n as f64;
        for p in 0..n {
            let plo = lo + p as f64 * w;
            let mut acc = 0.0;
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                acc += wt * f(plo + w * (x + 1.0) / 2.0)?;
            }
            total += acc * w / 2.0;
        }
        if hi == b {
            return Ok(total);
        }
        lo = hi;
        ki += 1;
    }
}

fn identity_residual<F: Fn(f64) -> Result<f64> + Sync>(
    f: &F,
    t: f64,
    u: f64,
    table: &LadderTable,
    density: Density,
) -> Result<f64> {
    if !(u > 0.0 && u <= t / t.ln()) {
        return Err(Error::Domain(format!(
            "identity window needs 0 < U <= T/ln T = {:.3}, got U = {u}",
            t / t.ln()
        )));
    }
    let rule = gl_rule(table.cfg.nodes_per_panel);
    let w_t = table.cfg.panel_scale * TWO_PI / t.ln();
    let lhs = integrate_with(t, t + u, w_t, rule, &table.grid, |x| {
        let dens = match density {
            Density::TableDerivative => table.phi1_prime(x)?,
            Density::RawZSquared => z_tilde_sq(x)?,
        };
        Ok(f(table.phi1(x)?)? * dens)
    })?;
    let (xa, xb) = (table.phi1(t)?, table.phi1(t + u)?);
    let w_x = table.cfg.panel_scale * TWO_PI / xa.ln();
    let rhs = integrate_with(xa, xb, w_x, rule, &[], |x| f(x))?;
    if rhs == 0.0 {
        return Err(Error::Numeric("identity right side vanished".into()));
    }
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Relative residual of the substitution identity with the test function
/// |zeta(sigma0 + i x)|^2.
pub fn substitution_identity_check(
    sigma0: f64,
    t: f64,
    u: f64,
    table: &LadderTable,
    density: Density,
) -> Result<f64> {
    if !(sigma0 > 1.0) {
        return Err(Error::Domain(format!("identity test function needs sigma0 > 1, got {sigma0}")));
    }
    let cfg = EvalConfig::default();
    identity_residual(&|x| abs_zeta_sq(sigma0, x, &cfg), t, u, table, density)
}
