//! Artifact emission: CSV tables, SVG plots, and run manifests.
//!
//! Every writer is deterministic (fixed float formatting, sorted manifest
//! keys) and atomic (sibling temp file renamed over the target), so
//! reruns with identical config produce byte-identical files and a crash
//! never leaves a truncated artifact behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::aa::AASolution;
use crate::error::Result;
use crate::ladder::QuadratureConfig;
use crate::mvt::MvtReport;
use crate::zeta::EvalConfig;

/// Canonical float rendering shared by CSV and manifest output.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.12e}")
}

/// Write `bytes` to `path` through a temp file in the same directory plus
/// a rename. Creates missing parent directories.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let ctx = |e: std::io::Error| {
        crate::error::Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    };
    std::fs::create_dir_all(dir).map_err(ctx)?;
    let name = path
        .file_name()
        .ok_or_else(|| crate::error::Error::Config(format!("not a file path: {path:?}")))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes).map_err(ctx)?;
    std::fs::rename(&tmp, path).map_err(ctx)?;
    Ok(())
}

/// CSV body for a window scan, columns sigma,T,U,integral,zeta2sigma,residual.
pub fn mvt_csv(report: &MvtReport) -> String {
    let mut s = String::from("sigma,T,U,integral,zeta2sigma,residual\n");
    for e in &report.entries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(e.sigma),
            fmt_f64(e.t),
            fmt_f64(e.u),
            fmt_f64(e.integral),
            fmt_f64(e.zeta2sigma),
            fmt_f64(e.residual)
        );
    }
    s
}

/// One emitted row of an interval run: the found near-solution together
/// with its interval endpoints and the segment-distance pair.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct AaRow {
    pub k_n: f64,
    pub k_n1: f64,
    /// K_n - phi1(K_{n+1}); nonpositive means the transported segment
    /// overlaps its source interval.
    pub rho: f64,
    /// (1 - c) pi(K_n), the prime-counting prediction for rho.
    pub predicted_rho: f64,
    pub sol: AASolution,
}

impl AaRow {
    /// CSV flag column: which soft checks tripped for this interval.
    pub fn flag(&self) -> &'static str {
        match (self.sol.envelope_miss, self.rho <= 0.0) {
            (false, false) => "ok",
            (true, false) => "envelope",
            (false, true) => "overlap",
            (true, true) => "envelope+overlap",
        }
    }
}

/// CSV body for an interval run,
/// columns n,K_n,K_n1,u_n,v_n,residual,envelope,rho,predicted_rho,flag.
pub fn aa_csv(rows: &[AaRow]) -> String {
    let mut s = String::from("n,K_n,K_n1,u_n,v_n,residual,envelope,rho,predicted_rho,flag\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.sol.n,
            fmt_f64(r.k_n),
            fmt_f64(r.k_n1),
            fmt_f64(r.sol.u_n),
            fmt_f64(r.sol.v_n),
            fmt_f64(r.sol.residual),
            fmt_f64(r.sol.envelope),
            fmt_f64(r.rho),
            fmt_f64(r.predicted_rho),
            r.flag()
        );
    }
    s
}

/// One polyline of an SVG chart; x is the row index.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub ys: &'a [f64],
}

const SVG_W: f64 = 720.0;
const SVG_H: f64 = 440.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 46.0;
const LOG_FLOOR: f64 = 1e-16;

/// Render index-series polylines into a self-contained SVG document.
/// With `log_y` the values are plotted on a log10 axis, clamped below at
/// 1e-16 so exact zeros stay on the chart.
pub fn svg_chart(title: &str, y_label: &str, log_y: bool, series: &[Series<'_>]) -> String {
    let ty = |y: f64| if log_y { y.abs().max(LOG_FLOOR).log10() } else { y };
    let n_max = series.iter().map(|s| s.ys.len()).max().unwrap_or(0);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &y in s.ys {
            let v = ty(y);
            y_lo = y_lo.min(v);
            y_hi = y_hi.max(v);
        }
    }
    if !y_lo.is_finite() || !y_hi.is_finite() {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if y_hi - y_lo < 1e-12 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    let x_hi = (n_max.max(2) - 1) as f64;

    let px = |i: f64| MARGIN_L + i / x_hi * (SVG_W - MARGIN_L - MARGIN_R);
    let py = |v: f64| SVG_H - MARGIN_B - (v - y_lo) / (y_hi - y_lo) * (SVG_H - MARGIN_T - MARGIN_B);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\" font-family=\"monospace\" font-size=\"11\">"
    );
    let _ = writeln!(s, "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">{title}</text>",
        SVG_W / 2.0
    );

    // Axes, ticks, grid.
    for k in 0..=4 {
        let v = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let y = py(v);
        let label = if log_y { format!("{:.1e}", 10f64.powf(v)) } else { format!("{v:.3}") };
        let _ = writeln!(
            s,
            "<line x1=\"{MARGIN_L}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#ddd\" stroke-width=\"1\"/>",
            SVG_W - MARGIN_R
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{label}</text>",
            MARGIN_L - 6.0,
            y + 4.0
        );
    }
    let x_ticks = n_max.clamp(2, 7);
    for k in 0..x_ticks {
        let i = x_hi * k as f64 / (x_ticks - 1) as f64;
        let x = px(i);
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            SVG_H - MARGIN_B + 16.0,
            i.round() as usize
        );
    }
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{:.2}\" \
         stroke=\"black\" stroke-width=\"1\"/>",
        SVG_H - MARGIN_B
    );
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN_L}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
         stroke=\"black\" stroke-width=\"1\"/>",
        SVG_H - MARGIN_B,
        SVG_W - MARGIN_R,
        SVG_H - MARGIN_B
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">n</text>",
        SVG_W / 2.0,
        SVG_H - 8.0
    );
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{y_label}</text>",
        SVG_H / 2.0,
        SVG_H / 2.0
    );

    for (j, sr) in series.iter().enumerate() {
        if sr.ys.is_empty() {
            continue;
        }
        let mut pts = String::new();
        for (i, &y) in sr.ys.iter().enumerate() {
            let _ = write!(pts, "{:.2},{:.2} ", px(i as f64), py(ty(y)));
        }
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            pts.trim_end(),
            sr.color
        );
        let ly = MARGIN_T + 14.0 * j as f64;
        let lx = SVG_W - MARGIN_R - 170.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" \
             stroke=\"{}\" stroke-width=\"2\"/>",
            lx + 18.0,
            sr.color
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            lx + 24.0,
            ly + 4.0,
            sr.label
        );
    }
    s.push_str("</svg>\n");
    s
}

/// |R(u_n)| against the decay envelope and its acceptance multiple.
pub fn residual_svg(rows: &[AaRow], envelope_a: f64) -> String {
    let abs_r: Vec<f64> = rows.iter().map(|r| r.sol.residual.abs()).collect();
    let env: Vec<f64> = rows.iter().map(|r| r.sol.envelope).collect();
    let env_a: Vec<f64> = env.iter().map(|e| envelope_a * e).collect();
    let label_a = format!("{envelope_a:.1} * envelope");
    svg_chart(
        "interval residuals",
        "|R|",
        true,
        &[
            Series { label: "|R(u_n)|", color: "#1f6fb2", ys: &abs_r },
            Series { label: "envelope", color: "#777777", ys: &env },
            Series { label: &label_a, color: "#c0392b", ys: &env_a },
        ],
    )
}

/// Measured segment distance rho against the prime-counting prediction.
pub fn rho_svg(rows: &[AaRow]) -> String {
    let rho: Vec<f64> = rows.iter().map(|r| r.rho).collect();
    let pred: Vec<f64> = rows.iter().map(|r| r.predicted_rho).collect();
    svg_chart(
        "segment distances",
        "rho",
        false,
        &[
            Series { label: "rho_n", color: "#1f6fb2", ys: &rho },
            Series { label: "(1-c) pi(K_n)", color: "#c0392b", ys: &pred },
        ],
    )
}

/// Resolved-configuration echo written alongside every run's outputs.
/// Keys render sorted, one `key=value` per line, so manifests diff
/// cleanly between runs.
#[derive(Clone, Debug, Default)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        let mut m = Manifest::default();
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("subcommand", subcommand);
        m
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn set_f64(&mut self, key: &str, x: f64) {
        self.entries.insert(key.to_string(), fmt_f64(x));
    }

    /// Numeric knobs that are fixed at compile time.
    pub fn echo_fixed(&mut self) {
        self.set_f64("ladder.partition_anchor", crate::ladder::PARTITION_ANCHOR);
        self.set("ladder.panels_per_block", crate::ladder::PANELS_PER_BLOCK);
        self.set("ladder.newton_max_iters", crate::ladder::NEWTON_MAX_ITERS);
        self.set_f64("ladder.t_operational_min", crate::T_OPERATIONAL_MIN);
        self.set_f64("zeta.rs_t_min", crate::zeta::RS_T_MIN);
        self.set("mvt.order_cap", crate::mvt::ORDER_CAP);
        self.set("mvt.recheck_stride", crate::mvt::RECHECK_STRIDE);
        self.set_f64("mvt.alpha_min", crate::mvt::ALPHA_MIN);
        self.set_f64("aa.xi_tol", crate::aa::XI_TOL);
    }

    pub fn echo_quadrature(&mut self, cfg: &QuadratureConfig) {
        self.set_f64("quad.panel_scale", cfg.panel_scale);
        self.set("quad.nodes_per_panel", cfg.nodes_per_panel);
        self.set_f64("quad.abs_tol", cfg.abs_tol);
        self.set_f64("quad.c0_offset", cfg.c0_offset);
        self.set("quad.digest", format!("{:016x}", cfg.digest()));
    }

    pub fn echo_eval(&mut self, cfg: &EvalConfig) {
        self.set_f64("eval.tol", cfg.tol);
        self.set("eval.max_terms", cfg.max_terms);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvt::MvtEntry;

    fn sol(n: usize, residual: f64, miss: bool) -> AASolution {
        AASolution {
            n,
            sigma0: 2.0,
            u_n: 1.0e4 + n as f64,
            v_n: 9.5e3 + n as f64,
            residual,
            envelope: 0.24,
            product_lhs: 3.0,
            envelope_miss: miss,
        }
    }

    fn row(n: usize, rho: f64, miss: bool) -> AaRow {
        AaRow { k_n: 1e4, k_n1: 1.003e4, rho, predicted_rho: 520.0, sol: sol(n, 1e-5, miss) }
    }

    #[test]
    fn atomic_write_roundtrip_and_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("a.csv");
        write_atomic(&path, b"first").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"first");
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        // No temp debris left behind.
        let leftovers: Vec<_> = std::fs::read_dir(path.parent().unwrap())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name() != "a.csv")
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn mvt_csv_shape() {
        let rep = MvtReport {
            entries: vec![MvtEntry {
                sigma: 1.5,
                t: 1e3,
                u: 10.0,
                integral: 13.0,
                zeta2sigma: 1.2,
                residual: 0.98,
            }],
            max_abs_residual: 0.98,
            trend_slope: 0.0,
        };
        let csv = mvt_csv(&rep);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "sigma,T,U,integral,zeta2sigma,residual");
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 6);
        assert!(row.starts_with("1.500000000000e0,1.000000000000e3,"));
        assert!(lines.next().is_none());
    }

    #[test]
    fn aa_flag_combinations() {
        assert_eq!(row(0, 500.0, false).flag(), "ok");
        assert_eq!(row(0, 500.0, true).flag(), "envelope");
        assert_eq!(row(0, -1.0, false).flag(), "overlap");
        assert_eq!(row(0, 0.0, true).flag(), "envelope+overlap");
        let csv = aa_csv(&[row(3, 500.0, false)]);
        let body = csv.lines().nth(1).unwrap();
        assert!(body.starts_with("3,"));
        assert!(body.ends_with(",ok"));
        assert_eq!(body.split(',').count(), 10);
    }

    #[test]
    fn manifest_is_sorted_and_complete() {
        let mut m = Manifest::new("aa");
        m.echo_fixed();
        m.echo_quadrature(&QuadratureConfig::default());
        m.echo_eval(&EvalConfig::default());
        m.set("jobs", 4);
        let text = m.render();
        let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
        for want in [
            "version=",
            "subcommand=aa",
            "quad.panel_scale=",
            "quad.digest=",
            "eval.tol=",
            "ladder.panels_per_block=256",
            "mvt.order_cap=64",
            "aa.xi_tol=",
            "jobs=4",
        ] {
            assert!(text.lines().any(|l| l.starts_with(want) || l == want), "missing {want}");
        }
    }

    #[test]
    fn svg_charts_are_well_formed() {
        let rows: Vec<AaRow> = (0..50).map(|n| row(n, 500.0 + n as f64, false)).collect();
        for svg in [residual_svg(&rows, 5.0), rho_svg(&rows)] {
            assert!(svg.starts_with("<svg "));
            assert!(svg.trim_end().ends_with("</svg>"));
            assert!(!svg.contains("NaN") && !svg.contains("inf"));
        }
        assert_eq!(residual_svg(&rows, 5.0).matches("<polyline").count(), 3);
        assert_eq!(rho_svg(&rows).matches("<polyline").count(), 2);
        // Empty input still yields a valid document.
        let empty = svg_chart("t", "y", false, &[]);
        assert!(empty.contains("</svg>"));
    }

    #[test]
    fn emission_is_deterministic() {
        let rows: Vec<AaRow> = (0..10).map(|n| row(n, 500.0, false)).collect();
        assert_eq!(aa_csv(&rows), aa_csv(&rows));
        assert_eq!(residual_svg(&rows, 5.0), residual_svg(&rows, 5.0));
        let m1 = {
            let mut m = Manifest::new("x");
            m.echo_fixed();
            m.render()
        };
        let m2 = {
            let mut m = Manifest::new("x");
            m.echo_fixed();
            m.render()
        };
        assert_eq!(m1, m2);
    }
}
