//! Command line front end. Every run resolves its configuration from
//! defaults, an optional key=value config file, and flags (in that
//! order), executes one subcommand, and writes a manifest echoing the
//! resolved state next to its outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use zll::aa::{find_aa, k_sequence, segment_distance, verify_chain, ChainReport, IntervalSeq};
use zll::error::{Error, Result};
use zll::ladder::{build_table, LadderTable, QuadratureConfig};
use zll::mvt::{s1_bound, s2_bound, s2_envelope, uniformity_scan};
use zll::primes::PrimeCounter;
use zll::report::{aa_csv, mvt_csv, residual_svg, rho_svg, write_atomic, AaRow, Manifest};
use zll::zeta::{zeta_em, EvalConfig};
use zll::T_OPERATIONAL_MIN;

#[derive(Parser)]
#[command(name = "zll", version, about = "Zeta ladder laboratory", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    shared: SharedOpts,
}

/// Knobs shared by every subcommand. Resolution order: built-in default,
/// then the config file, then the flag.
#[derive(Args)]
struct SharedOpts {
    /// Worker threads (default: ZLL_JOBS, then all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Flat key=value file with defaults for the shared knobs
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Manifest path override
    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Quadrature panel width as a multiple of 2 pi / ln t
    #[arg(long, global = true)]
    panel_scale: Option<f64>,
    /// Gauss-Legendre order per quadrature panel
    #[arg(long, global = true)]
    nodes_per_panel: Option<usize>,
    /// Quadrature error target per unit length
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Additive offset in the ladder equation right side
    #[arg(long, global = true, allow_negative_numbers = true)]
    c0_offset: Option<f64>,
    /// Relative tolerance of the series evaluators
    #[arg(long, global = true)]
    eval_tol: Option<f64>,
    /// Series length cap for the evaluators
    #[arg(long, global = true)]
    max_terms: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Zeta evaluators
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Ladder table construction and lookup
    #[command(subcommand)]
    Ladder(LadderCmd),
    /// Prime counting
    #[command(subcommand)]
    Primes(PrimesCmd),
    /// Local mean value scans and series bounds
    #[command(subcommand)]
    Mvt(MvtCmd),
    /// Interval residual search and chain checks
    #[command(subcommand)]
    Aa(AaCmd),
    /// Composite experiment bundles
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand)]
enum ZetaCmd {
    /// Evaluate zeta(sigma + it) by Euler-Maclaurin, print one JSON object
    Eval {
        #[arg(long)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
}

#[derive(Subcommand)]
enum LadderCmd {
    /// Build a ladder table over [t-min, t-max] and save it
    Build {
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Look up phi1 (and its derivative) in a saved table
    Eval {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Subcommand)]
enum PrimesCmd {
    /// Count primes up to x
    Pi {
        #[arg(long)]
        x: f64,
    },
}

#[derive(Subcommand)]
enum MvtCmd {
    /// Residual scan of the local mean value over a (sigma, T, U) grid
    Scan {
        /// Comma list of sigma values
        #[arg(long, default_value = "1.2,1.5,2,3")]
        sigmas: String,
        /// Base points: comma list or A:B:logN / A:B:linN
        #[arg(long, default_value = "1e3:1e6:log4")]
        t: String,
        /// Windows: comma list, or "auto" for 10,100,1000 plus ln ln T
        #[arg(long, default_value = "auto")]
        u: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the proof-shaped series bounds S1, S2 and their majorants
    Bounds {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        nmax: usize,
    },
}

#[derive(Subcommand)]
enum AaCmd {
    /// Search every interval of a K-sequence for a three-point residual root
    Run {
        #[arg(long)]
        sigma0: f64,
        #[arg(long)]
        t0: f64,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        /// Number of intervals
        #[arg(long)]
        n: usize,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the rows as JSON
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write residual and segment-distance charts (second file
        /// gets a -rho suffix)
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Coarse grid points per interval before refinement
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Envelope multiple A in the miss flag |R| > A ln ln K / ln K
        #[arg(long, default_value_t = 5.0)]
        envelope_a: f64,
    },
    /// Walk the mean-value chain at one base point, print one JSON object
    Chain {
        #[arg(long)]
        sigma0: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Build the table, run the scan, the interval search, and the chain
    /// check in one directory
    All {
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma0: f64,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[arg(long, default_value = "zll-report")]
        out_dir: PathBuf,
        /// Ladder table size (default: one node per 4 units of t)
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, default_value = "1.2,1.5,2,3")]
        mvt_sigmas: String,
        #[arg(long, default_value = "1e3:1e6:log4")]
        mvt_t: String,
        #[arg(long, default_value = "auto")]
        mvt_u: String,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, default_value_t = 5.0)]
        envelope_a: f64,
    },
}

/// Fully resolved run configuration.
struct Settings {
    quad: QuadratureConfig,
    eval: EvalConfig,
    jobs: usize,
    manifest_override: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 7] = [
    "quad.panel_scale",
    "quad.nodes_per_panel",
    "quad.abs_tol",
    "quad.c0_offset",
    "eval.tol",
    "eval.max_terms",
    "jobs",
];

fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{}:{}: expected key=value, got {raw:?}", path.display(), i + 1))
        })?;
        let key = k.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "{}:{}: unknown key {key:?} (known: {})",
                path.display(),
                i + 1,
                CONFIG_KEYS.join(", ")
            )));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn parse_key<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Config(format!("config key {key}: cannot parse {v:?}"))),
    }
}

fn resolve_settings(shared: &SharedOpts) -> Result<Settings> {
    let file = match &shared.config {
        Some(p) => load_config_file(p)?,
        None => BTreeMap::new(),
    };
    let mut quad = QuadratureConfig::default();
    let mut eval = EvalConfig::default();

    if let Some(v) = parse_key(&file, "quad.panel_scale")? {
        quad.panel_scale = v;
    }
    if let Some(v) = parse_key(&file, "quad.nodes_per_panel")? {
        quad.nodes_per_panel = v;
    }
    if let Some(v) = parse_key(&file, "quad.abs_tol")? {
        quad.abs_tol = v;
    }
    if let Some(v) = parse_key(&file, "quad.c0_offset")? {
        quad.c0_offset = v;
    }
    if let Some(v) = parse_key(&file, "eval.tol")? {
        eval.tol = v;
    }
    if let Some(v) = parse_key(&file, "eval.max_terms")? {
        eval.max_terms = v;
    }
    let mut jobs: Option<usize> = parse_key(&file, "jobs")?;

    if let Some(v) = shared.panel_scale {
        quad.panel_scale = v;
    }
    if let Some(v) = shared.nodes_per_panel {
        quad.nodes_per_panel = v;
    }
    if let Some(v) = shared.abs_tol {
        quad.abs_tol = v;
    }
    if let Some(v) = shared.c0_offset {
        quad.c0_offset = v;
    }
    if let Some(v) = shared.eval_tol {
        eval.tol = v;
    }
    if let Some(v) = shared.max_terms {
        eval.max_terms = v;
    }
    if shared.jobs.is_some() {
        jobs = shared.jobs;
    }
    if jobs.is_none() {
        if let Ok(v) = std::env::var("ZLL_JOBS") {
            jobs = Some(
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("ZLL_JOBS: cannot parse {v:?}")))?,
            );
        }
    }
    let jobs = jobs.unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    });
    if jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }

    quad.validate()?;
    eval.validate()?;
    Ok(Settings { quad, eval, jobs, manifest_override: shared.manifest.clone() })
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{what}: cannot parse {p:?} as a number")))
        })
        .collect::<Result<_>>()?;
    if vals.is_empty() || vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("{what}: needs a nonempty list of finite numbers")));
    }
    Ok(vals)
}

/// Grid syntax: "A:B:logN" (N log-spaced points), "A:B:linN" (N linear
/// points), or a plain comma list.
fn parse_grid(s: &str, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 1 {
        return parse_list(s, what);
    }
    if parts.len() != 3 {
        return Err(Error::Config(format!("{what}: expected A:B:logN, A:B:linN, or a comma list")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("{what}: cannot parse {:?}", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("{what}: cannot parse {:?}", parts[1])))?;
    let (log, n_str) = match parts[2].strip_prefix("log") {
        Some(rest) => (true, rest),
        None => match parts[2].strip_prefix("lin") {
            Some(rest) => (false, rest),
            None => {
                return Err(Error::Config(format!(
                    "{what}: spacing must be logN or linN, got {:?}",
                    parts[2]
                )))
            }
        },
    };
    let n: usize = n_str
        .parse()
        .map_err(|_| Error::Config(format!("{what}: cannot parse point count {n_str:?}")))?;
    if n < 2 || !(a.is_finite() && b.is_finite() && a < b) || (log && a <= 0.0) {
        return Err(Error::Config(format!(
            "{what}: needs A < B (positive for log spacing) and at least 2 points"
        )));
    }
    let step = if log { (b / a).powf(1.0 / (n - 1) as f64) } else { (b - a) / (n - 1) as f64 };
    Ok((0..n)
        .map(|i| if log { a * step.powi(i as i32) } else { a + step * i as f64 })
        .collect())
}

/// Window syntax: "auto" is the fixed ladder 10,100,1000 joined by
/// U = ln ln T at every base point.
fn parse_windows(s: &str) -> Result<(Vec<f64>, bool)> {
    if s == "auto" {
        Ok((vec![10.0, 100.0, 1000.0], true))
    } else {
        Ok((parse_list(s, "--u")?, false))
    }
}

fn base_manifest(sub: &str, st: &Settings) -> Manifest {
    let mut m = Manifest::new(sub);
    m.echo_fixed();
    m.echo_quadrature(&st.quad);
    m.echo_eval(&st.eval);
    m.set("jobs", st.jobs);
    m
}

fn manifest_path(st: &Settings, default: PathBuf) -> PathBuf {
    st.manifest_override.clone().unwrap_or(default)
}

/// Sibling path for the second chart of an interval run.
fn rho_svg_path(p: &Path) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = p.extension().map(|s| s.to_string_lossy().into_owned());
    match ext {
        Some(e) => p.with_file_name(format!("{stem}-rho.{e}")),
        None => p.with_file_name(format!("{stem}-rho.svg")),
    }
}

fn compute_aa_rows(
    sigma0: f64,
    seq: &IntervalSeq,
    table: &LadderTable,
    grid_m: usize,
    envelope_a: f64,
) -> Result<Vec<AaRow>> {
    let k_last = *seq.k.last().expect("sequence has endpoints");
    let pc = PrimeCounter::new(k_last.ceil() as usize + 2)?;
    (0..seq.len())
        .into_par_iter()
        .map(|i| {
            let sol = find_aa(sigma0, i, seq, table, grid_m, envelope_a)?;
            let (rho, predicted_rho) = segment_distance(i, seq, table, &pc)?;
            Ok(AaRow { k_n: seq.k[i], k_n1: seq.k[i + 1], rho, predicted_rho, sol })
        })
        .collect()
}

/// Run log for an interval search; keeps the residual decay visible
/// without asserting it.
fn aa_summary(rows: &[AaRow]) -> String {
    let n = rows.len();
    let max_r = rows.iter().map(|r| r.sol.residual.abs()).fold(0.0, f64::max);
    let misses = rows.iter().filter(|r| r.sol.envelope_miss).count();
    let rho_up = rows.windows(2).filter(|w| w[1].rho > w[0].rho).count();
    let mut s = format!(
        "aa: {n} intervals, max |R| {max_r:.3e}, envelope misses {misses}, \
         rho strictly increasing in {rho_up}/{} steps",
        n.saturating_sub(1)
    );
    if n >= 20 {
        let mean = |rs: &[AaRow]| {
            rs.iter().map(|r| r.sol.residual.abs()).sum::<f64>() / rs.len() as f64
        };
        s.push_str(&format!(
            "\naa: mean |R| over first 10 intervals {:.3e}, over last 10 {:.3e}",
            mean(&rows[..10]),
            mean(&rows[n - 10..])
        ));
    }
    s
}

#[derive(serde::Serialize)]
struct LadderSample {
    t: f64,
    phi1: f64,
    phi1_prime: Option<f64>,
}

#[derive(serde::Serialize)]
struct BoundsOut {
    sigma: f64,
    n_max: usize,
    s1: f64,
    s1_cap: f64,
    s2: f64,
    s2_cap: f64,
}

#[derive(serde::Serialize)]
struct ChainOut {
    #[serde(flatten)]
    chain: ChainReport,
    slope_tan_alpha: f64,
}

fn run(cli: Cli) -> Result<()> {
    let st = resolve_settings(&cli.shared)?;
    rayon::ThreadPoolBuilder::new().num_threads(st.jobs).build_global().ok();

    match cli.cmd {
        Cmd::Zeta(ZetaCmd::Eval { sigma, t }) => {
            let sample = zeta_em(sigma, t, &st.eval)?;
            println!("{}", serde_json::to_string(&sample).expect("plain struct"));
            let mut m = base_manifest("zeta-eval", &st);
            m.set_f64("arg.sigma", sigma);
            m.set_f64("arg.t", t);
            m.write(&manifest_path(&st, PathBuf::from("zeta-eval.manifest")))
        }
        Cmd::Ladder(LadderCmd::Build { t_min, t_max, points, out }) => {
            let started = Instant::now();
            let table = build_table(t_min, t_max, points, &st.quad)?;
            table.save(&out)?;
            eprintln!(
                "ladder: {} nodes over [{t_min}, {t_max}] in {:.1}s -> {}",
                table.len(),
                started.elapsed().as_secs_f64(),
                out.display()
            );
            let mut m = base_manifest("ladder-build", &st);
            m.set_f64("arg.t_min", t_min);
            m.set_f64("arg.t_max", t_max);
            m.set("arg.points", points);
            m.set("out.table", out.display());
            m.write(&manifest_path(&st, PathBuf::from(format!("{}.manifest", out.display()))))
        }
        Cmd::Ladder(LadderCmd::Eval { table, t }) => {
            let tbl = LadderTable::load(&table)?;
            let sample =
                LadderSample { t, phi1: tbl.phi1(t)?, phi1_prime: tbl.phi1_prime(t).ok() };
            println!("{}", serde_json::to_string(&sample).expect("plain struct"));
            let mut m = base_manifest("ladder-eval", &st);
            m.set("arg.table", table.display());
            m.set_f64("arg.t", t);
            m.write(&manifest_path(&st, PathBuf::from("ladder-eval.manifest")))
        }
        Cmd::Primes(PrimesCmd::Pi { x }) => {
            if !(x.is_finite() && x <= 1e9) {
                return Err(Error::Domain(format!(
                    "prime counting is sieve-backed and capped at x <= 1e9, got {x}"
                )));
            }
            let pc = PrimeCounter::new((x.max(0.0).ceil() as usize + 2).max(3))?;
            println!("{}", pc.prime_pi(x)?);
            let mut m = base_manifest("primes-pi", &st);
            m.set_f64("arg.x", x);
            m.write(&manifest_path(&st, PathBuf::from("primes-pi.manifest")))
        }
        Cmd::Mvt(MvtCmd::Scan { sigmas, t, u, out }) => {
            let sg = parse_list(&sigmas, "--sigmas")?;
            let ts = parse_grid(&t, "--t")?;
            let (us, lnln) = parse_windows(&u)?;
            let started = Instant::now();
            let rep = uniformity_scan(&sg, &ts, &us, lnln, &st.quad)?;
            write_atomic(&out, mvt_csv(&rep).as_bytes())?;
            eprintln!(
                "mvt: {} windows in {:.1}s, max |residual| {:.4}, trend slope {:.4} -> {}",
                rep.entries.len(),
                started.elapsed().as_secs_f64(),
                rep.max_abs_residual,
                rep.trend_slope,
                out.display()
            );
            let mut m = base_manifest("mvt-scan", &st);
            m.set("arg.sigmas", &sigmas);
            m.set("arg.t", &t);
            m.set("arg.u", &u);
            m.set("grid.sigmas", join_f64(&sg));
            m.set("grid.t", join_f64(&ts));
            m.set("grid.u", join_f64(&us));
            m.set("grid.include_lnln_t", lnln);
            m.set("out.csv", out.display());
            m.set_f64("result.max_abs_residual", rep.max_abs_residual);
            m.set_f64("result.trend_slope", rep.trend_slope);
            m.write(&manifest_path(&st, PathBuf::from(format!("{}.manifest", out.display()))))
        }
        Cmd::Mvt(MvtCmd::Bounds { sigma, nmax }) => {
            let s1_cap = {
                let r = 1.0 + 1.0 / (sigma - 1.0);
                r * r
            };
            let out = BoundsOut {
                sigma,
                n_max: nmax,
                s1: s1_bound(sigma, nmax)?,
                s1_cap,
                s2: s2_bound(sigma, nmax)?,
                s2_cap: s2_envelope(sigma)?,
            };
            println!("{}", serde_json::to_string(&out).expect("plain struct"));
            let mut m = base_manifest("mvt-bounds", &st);
            m.set_f64("arg.sigma", sigma);
            m.set("arg.nmax", nmax);
            m.write(&manifest_path(&st, PathBuf::from("mvt-bounds.manifest")))
        }
        Cmd::Aa(AaCmd::Run {
            sigma0,
            t0,
            epsilon,
            n,
            table,
            out,
            json,
            svg,
            grid,
            envelope_a,
        }) => {
            let tbl = LadderTable::load(&table)?;
            let seq = k_sequence(t0, epsilon, n, tbl.t_max())?;
            let started = Instant::now();
            let rows = compute_aa_rows(sigma0, &seq, &tbl, grid, envelope_a)?;
            write_atomic(&out, aa_csv(&rows).as_bytes())?;
            if let Some(p) = &json {
                let mut body = serde_json::to_string_pretty(&rows).expect("plain rows");
                body.push('\n');
                write_atomic(p, body.as_bytes())?;
            }
            if let Some(p) = &svg {
                write_atomic(p, residual_svg(&rows, envelope_a).as_bytes())?;
                write_atomic(&rho_svg_path(p), rho_svg(&rows).as_bytes())?;
            }
            eprintln!("{}", aa_summary(&rows));
            eprintln!(
                "aa: {} intervals in {:.1}s -> {}",
                rows.len(),
                started.elapsed().as_secs_f64(),
                out.display()
            );
            let mut m = base_manifest("aa-run", &st);
            m.set_f64("arg.sigma0", sigma0);
            m.set_f64("arg.t0", t0);
            m.set_f64("arg.epsilon", epsilon);
            m.set("arg.n", n);
            m.set("arg.grid", grid);
            m.set_f64("arg.envelope_a", envelope_a);
            m.set("arg.table", table.display());
            m.set("out.csv", out.display());
            if let Some(p) = &json {
                m.set("out.json", p.display());
            }
            if let Some(p) = &svg {
                m.set("out.svg", p.display());
                m.set("out.svg_rho", rho_svg_path(p).display());
            }
            m.write(&manifest_path(&st, PathBuf::from(format!("{}.manifest", out.display()))))
        }
        Cmd::Aa(AaCmd::Chain { sigma0, t, epsilon, table }) => {
            let tbl = LadderTable::load(&table)?;
            let chain = verify_chain(sigma0, t, epsilon, &tbl, &st.quad)?;
            let slope = tbl.slope_tan_alpha(t, chain.u0)?;
            let out = ChainOut { chain, slope_tan_alpha: slope };
            println!("{}", serde_json::to_string(&out).expect("plain struct"));
            let mut m = base_manifest("aa-chain", &st);
            m.set_f64("arg.sigma0", sigma0);
            m.set_f64("arg.t", t);
            m.set_f64("arg.epsilon", epsilon);
            m.set("arg.table", table.display());
            m.write(&manifest_path(&st, PathBuf::from("aa-chain.manifest")))
        }
        Cmd::Report(ReportCmd::All {
            t0,
            n,
            sigma0,
            epsilon,
            out_dir,
            points,
            mvt_sigmas,
            mvt_t,
            mvt_u,
            grid,
            envelope_a,
        }) => {
            let sg = parse_list(&mvt_sigmas, "--mvt-sigmas")?;
            let ts = parse_grid(&mvt_t, "--mvt-t")?;
            let (us, lnln) = parse_windows(&mvt_u)?;

            // Table bounds are derived from the K-sequence, which is pure
            // arithmetic in (t0, epsilon, n).
            let seq = k_sequence(t0, epsilon, n, f64::INFINITY)?;
            let k_last = *seq.k.last().expect("sequence has endpoints");
            let t_min = (0.95 * t0).max(T_OPERATIONAL_MIN);
            let t_max = k_last + 0.05 * (k_last - t0).max(10.0) + 5.0;
            let n_points = points.unwrap_or_else(|| (((t_max - t_min) / 4.0).ceil() as usize).max(256));

            let started = Instant::now();
            let table = build_table(t_min, t_max, n_points, &st.quad)?;
            let table_path = out_dir.join("ladder.tbl");
            table.save(&table_path)?;
            eprintln!(
                "report: ladder table {} nodes over [{t_min:.1}, {t_max:.1}] in {:.1}s",
                table.len(),
                started.elapsed().as_secs_f64()
            );

            let stage = Instant::now();
            let rep = uniformity_scan(&sg, &ts, &us, lnln, &st.quad)?;
            write_atomic(&out_dir.join("mvt.csv"), mvt_csv(&rep).as_bytes())?;
            eprintln!(
                "report: mvt scan {} windows in {:.1}s, max |residual| {:.4}",
                rep.entries.len(),
                stage.elapsed().as_secs_f64(),
                rep.max_abs_residual
            );

            let stage = Instant::now();
            let rows = compute_aa_rows(sigma0, &seq, &table, grid, envelope_a)?;
            write_atomic(&out_dir.join("aa.csv"), aa_csv(&rows).as_bytes())?;
            let mut body = serde_json::to_string_pretty(&rows).expect("plain rows");
            body.push('\n');
            write_atomic(&out_dir.join("aa.json"), body.as_bytes())?;
            write_atomic(&out_dir.join("residuals.svg"), residual_svg(&rows, envelope_a).as_bytes())?;
            write_atomic(&out_dir.join("rho.svg"), rho_svg(&rows).as_bytes())?;
            eprintln!("{}", aa_summary(&rows));
            eprintln!("report: interval search in {:.1}s", stage.elapsed().as_secs_f64());

            let chain = verify_chain(sigma0, t0, epsilon, &table, &st.quad)?;
            let slope = table.slope_tan_alpha(t0, chain.u0)?;
            let mut chain_body = serde_json::to_string_pretty(&ChainOut { chain, slope_tan_alpha: slope })
                .expect("plain struct");
            chain_body.push('\n');
            write_atomic(&out_dir.join("chain.json"), chain_body.as_bytes())?;

            let mut m = base_manifest("report-all", &st);
            m.set_f64("arg.t0", t0);
            m.set("arg.n", n);
            m.set_f64("arg.sigma0", sigma0);
            m.set_f64("arg.epsilon", epsilon);
            m.set("arg.grid", grid);
            m.set_f64("arg.envelope_a", envelope_a);
            m.set("arg.mvt_sigmas", &mvt_sigmas);
            m.set("arg.mvt_t", &mvt_t);
            m.set("arg.mvt_u", &mvt_u);
            m.set("grid.sigmas", join_f64(&sg));
            m.set("grid.t", join_f64(&ts));
            m.set("grid.u", join_f64(&us));
            m.set("grid.include_lnln_t", lnln);
            m.set_f64("table.t_min", t_min);
            m.set_f64("table.t_max", t_max);
            m.set("table.points", n_points);
            m.set("out.dir", out_dir.display());
            m.set_f64("result.max_abs_residual", rep.max_abs_residual);
            m.set_f64("result.trend_slope", rep.trend_slope);
            m.set_f64("result.slope_tan_alpha", slope);
            m.write(&manifest_path(&st, out_dir.join("manifest.txt")))?;
            eprintln!("report: bundle complete in {:.1}s -> {}", started.elapsed().as_secs_f64(), out_dir.display());
            Ok(())
        }
    }
}

fn join_f64(vals: &[f64]) -> String {
    vals.iter().map(|v| zll::report::fmt_f64(*v)).collect::<Vec<_>>().join(",")
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
