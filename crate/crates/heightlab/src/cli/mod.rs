//! Command-line front end: argument parsing, dispatch, result cache and
//! artifact emission. Exit codes: 0 success, 2 input error, 3 budget or
//! quadrature failure.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::core::{normalize_point, rational_to_f64};
use crate::enumerate::{count_points, fit_theta, min_point, NumberField};
use crate::heights::point_height;
use crate::localdens::{euler_product, local_density};
use crate::mahler::{mahler_measure, MahlerMethod};
use crate::p1lab::{
    anticanonical_height, complex_mass_p1, ding_arith, energy_weil, mt_functional,
    normalized_height, real_mass_p1, real_theorem_functional, volume_normalized_ac_height,
    AcMetric, P1Error, P1Metric,
};
use crate::toric::{canonical_model_binomials, gap_table, polytope_measure, MarkerMode};
use crate::verdict::{
    diagonal_bound_rhs, ej_product, main_conjecture_check, min_point_bound, peyre_assemble,
    xa_study, zhang_report,
};

pub mod cache;
pub mod input;
pub mod plot;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input files; exit 2.
    Input(String),
    /// Budget, convergence, or quadrature failure; exit 3.
    Budget(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Budget(m) => write!(f, "budget error: {m}"),
        }
    }
}

impl From<P1Error> for CliError {
    fn from(e: P1Error) -> Self {
        match e {
            P1Error::QuadratureFailure { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<crate::localdens::LocalError> for CliError {
    fn from(e: crate::localdens::LocalError) -> Self {
        match e {
            crate::localdens::LocalError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

macro_rules! input_error_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}
input_error_from!(
    crate::core::CoreError,
    crate::enumerate::EnumError,
    crate::mahler::MahlerError,
    crate::toric::ToricError,
    crate::verdict::VerdictError
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "heightlab", version, about = "Heights, densities and stability invariants")]
struct Cli {
    /// Cache directory; HEIGHTLAB_CACHE overrides the default of no cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Disable the on-disk result cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Output format for grid-shaped results.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the result to this file (with a .manifest.json sidecar) instead
    /// of stdout only.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Height of a rational point.
    HeightPoint {
        /// Homogeneous coordinates, e.g. 1,1/2.
        #[arg(long)]
        coords: String,
        #[arg(long, default_value = "weil")]
        metric: String,
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
    },
    /// Projective-line workbench: energies, heights, masses, functionals.
    P1 {
        #[arg(value_enum)]
        what: P1What,
        #[arg(long, default_value = "fs")]
        metric: String,
        /// Fourier perturbation a0,a1,b1,a2,b2,...
        #[arg(long)]
        fourier: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Log-Mahler measure of a homogeneous form.
    Mahler {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, default_value = "jensen")]
        method: String,
        #[arg(long, default_value_t = 64)]
        res: usize,
    },
    /// Local density mu_p of a hypersurface.
    Localdensity {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        rmax: u32,
    },
    /// Partial Euler product over p <= pmax.
    Eulerprod {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        pmax: u64,
        #[arg(long, default_value_t = 2)]
        rmax: u32,
    },
    /// Count rational points of bounded height.
    Count {
        #[arg(long)]
        variety: PathBuf,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long)]
        exclude: Option<PathBuf>,
        #[arg(long, default_value = "weil")]
        metric: String,
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        #[arg(long, default_value_t = 1)]
        shards: usize,
    },
    /// Minimal-height point search, with emptiness certificates over Q.
    Minpoint {
        #[arg(long)]
        variety: PathBuf,
        #[arg(long, default_value_t = 1e4)]
        cap: f64,
        #[arg(long, value_enum, default_value = "q")]
        field: FieldFlag,
        #[arg(long, default_value = "weil")]
        metric: String,
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
    },
    /// Toric invariants of a lattice polytope, or a catalog gap table.
    Toric {
        #[arg(long)]
        polytope: Option<PathBuf>,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value = "vertices")]
        markers: MarkerFlag,
    },
    /// Inequality checkers over precomputed inputs.
    Check {
        #[arg(long, value_enum)]
        what: CheckWhat,
        /// key=value pairs; list values use colons, e.g. e=3:1:0.
        #[arg(long)]
        inputs: Vec<String>,
    },
    /// Study table for the diagonal family -a x0^d + x1^d + ... .
    StudyXa {
        #[arg(long, default_value_t = 4)]
        d: u32,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Comma-separated a grid.
        #[arg(long, default_value = "3,21,33")]
        a: String,
        #[arg(long, default_value_t = 50)]
        pmax: u64,
        #[arg(long, default_value_t = 6)]
        rmax: u32,
        /// Write a log-log SVG chart of minimal heights to this file.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Assemble a Peyre-style constant from its local masses.
    Peyre {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        mu_c: f64,
        #[arg(long)]
        mu_r: f64,
        /// Field shape m_R,m_C,degree; e.g. 1,0,1 for Q.
        #[arg(long, default_value = "1,0,1")]
        shape: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum P1What {
    Energy,
    Height,
    Ding,
    Masses,
    Mt,
    RealTheorem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldFlag {
    Q,
    Qi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MarkerFlag {
    Vertices,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckWhat {
    Main,
    Diagonal,
    Minpoint,
    Zhang,
    Ej,
}

struct Output {
    json: Value,
    csv: Option<String>,
}

impl Output {
    fn json(v: Value) -> Self {
        Output { json: v, csv: None }
    }
}

/// Parse argv, dispatch, emit results. Returns the process exit code.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let argv: Vec<String> = argv.into_iter().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            // clap renders --help/--version as "errors" with exit code 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cache_dir = if cli.no_cache {
        None
    } else {
        cli.cache_dir
            .clone()
            .or_else(|| std::env::var_os("HEIGHTLAB_CACHE").map(PathBuf::from))
    };
    match dispatch(&cli.cmd, cache_dir.as_deref()) {
        Ok(out) => {
            let rendered = match (cli.format, &out.csv) {
                (Format::Csv, Some(csv)) => csv.clone(),
                _ => serde_json::to_string_pretty(&out.json).unwrap(),
            };
            println!("{rendered}");
            if let Some(path) = &cli.out {
                if let Err(e) = write_artifacts(path, &rendered, &argv) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.to_string()}));
            match e {
                CliError::Input(_) => 2,
                CliError::Budget(_) => 3,
            }
        }
    }
}

fn write_artifacts(path: &Path, rendered: &str, argv: &[String]) -> std::io::Result<()> {
    std::fs::write(path, rendered)?;
    let manifest = json!({
        "command": argv.join(" "),
        "inputs_hash": cache::key_of("argv", &argv.join("\u{1f}")),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": 0,
    });
    let mut mpath = path.as_os_str().to_owned();
    mpath.push(".manifest.json");
    std::fs::write(PathBuf::from(mpath), serde_json::to_string_pretty(&manifest).unwrap())
}

fn dispatch(cmd: &Cmd, cache_dir: Option<&Path>) -> Result<Output, CliError> {
    match cmd {
        Cmd::HeightPoint { coords, metric, shift } => {
            let metric = input::parse_metric(metric, *shift)?;
            let raw = input::parse_coords(coords)?;
            let point = normalize_point(&raw)?;
            let ph = point_height(&point, &metric);
            Ok(Output::json(json!({"h": ph.h, "H": ph.big_h})))
        }
        Cmd::P1 { what, metric, fourier, shift, tol } => p1_cmd(*what, metric, fourier, *shift, *tol),
        Cmd::Mahler { form, method, res } => {
            let f = input::read_form(form)?;
            let method = match method.as_str() {
                "jensen" | "quadrature" => MahlerMethod::Quadrature,
                "qmc" => MahlerMethod::Qmc,
                other => return Err(CliError::Input(format!("unknown method {other:?}"))),
            };
            let report = mahler_measure(&f, method, *res)?;
            Ok(Output::json(serde_json::to_value(&report).unwrap()))
        }
        Cmd::Localdensity { form, p, rmax } => {
            let f = input::read_form(form)?;
            let key = cache::key_of(
                "localdensity",
                &format!("{} p={p} rmax={rmax}", serde_json::to_string(&f).unwrap()),
            );
            let text = cache::get_put(cache_dir, &key, || {
                let ld = local_density(&f, *p, *rmax)?;
                Ok(serde_json::to_string_pretty(&json!({
                    "p": ld.p,
                    "r_used": ld.r_used,
                    "count": ld.count.to_string(),
                    "mu_p": rational_to_f64(&ld.mu_p),
                    "mu_p_exact": ld.mu_p.to_string(),
                    "stabilized": ld.stabilized,
                    "good_reduction": ld.good_reduction,
                }))
                .unwrap())
            })?;
            Ok(Output::json(serde_json::from_str(&text).unwrap()))
        }
        Cmd::Eulerprod { form, pmax, rmax } => {
            let f = input::read_form(form)?;
            let key = cache::key_of(
                "eulerprod",
                &format!("{} pmax={pmax} rmax={rmax}", serde_json::to_string(&f).unwrap()),
            );
            let text = cache::get_put(cache_dir, &key, || {
                let ep = euler_product(&f, *pmax, *rmax);
                let factors: Vec<Value> = ep
                    .factors
                    .iter()
                    .map(|fac| {
                        json!({
                            "p": fac.p,
                            "r_used": fac.r_used,
                            "mu_p": fac.mu_p.as_ref().map(rational_to_f64),
                            "factor": fac.factor,
                            "error": fac.error,
                        })
                    })
                    .collect();
                Ok(serde_json::to_string_pretty(&json!({
                    "factors": factors,
                    "partial_products": ep.partial_products,
                    "p_max": ep.p_max,
                    "tail_note": ep.tail_note,
                }))
                .unwrap())
            })?;
            Ok(Output::json(serde_json::from_str(&text).unwrap()))
        }
        Cmd::Count { variety, b, grid, exclude, metric, shift, shards } => {
            let v = input::read_variety(variety)?;
            let metric = input::parse_metric(metric, *shift)?;
            let exclusions = match exclude {
                Some(path) => input::read_exclusions(path)?,
                None => Vec::new(),
            };
            if *grid == 0 || *b <= 0.0 {
                return Err(CliError::Input("need --b > 0 and --grid >= 1".into()));
            }
            let b_grid: Vec<f64> = (1..=*grid).map(|k| b * k as f64 / *grid as f64).collect();
            let key = cache::key_of(
                "count",
                &format!(
                    "{} {} {:?} {:?}",
                    serde_json::to_string(&v).unwrap(),
                    serde_json::to_string(&metric).unwrap(),
                    b_grid,
                    serde_json::to_string(&exclusions).unwrap(),
                ),
            );
            let text = cache::get_put(cache_dir, &key, || {
                let mut report = count_points(&v, &metric, &b_grid, &exclusions, *shards, true)?;
                if let Ok((theta, se)) = fit_theta(&report, 0) {
                    report.theta_hat = Some(theta);
                    report.theta_stderr = Some(se);
                }
                Ok(serde_json::to_string_pretty(&report).unwrap())
            })?;
            let report: Value = serde_json::from_str(&text).unwrap();
            let mut csv = String::from("B,count\n");
            for (b, c) in report["b_grid"]
                .as_array()
                .unwrap()
                .iter()
                .zip(report["counts"].as_array().unwrap())
            {
                csv.push_str(&format!("{},{}\n", b, c));
            }
            Ok(Output { json: report, csv: Some(csv) })
        }
        Cmd::Minpoint { variety, cap, field, metric, shift } => {
            let v = input::read_variety(variety)?;
            let metric = input::parse_metric(metric, *shift)?;
            let field = match field {
                FieldFlag::Q => NumberField::Q,
                FieldFlag::Qi => NumberField::Qi,
            };
            let report = min_point(&v, &metric, *cap, field)?;
            Ok(Output::json(serde_json::to_value(&report).unwrap()))
        }
        Cmd::Toric { polytope, catalog, k, markers } => {
            let mode = match markers {
                MarkerFlag::Vertices => MarkerMode::Vertices,
                MarkerFlag::Lattice => MarkerMode::LatticePoints,
            };
            if let Some(path) = catalog {
                let entries = input::read_catalog(path)?;
                let rows = gap_table(&entries)?;
                let json_rows: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({"name": r.name, "degree": rational_to_f64(&r.degree), "kps": r.kps})
                    })
                    .collect();
                let mut csv = String::from("name,degree,kps\n");
                for r in &rows {
                    csv.push_str(&format!("{},{},{}\n", r.name, rational_to_f64(&r.degree), r.kps));
                }
                return Ok(Output { json: json!({"gap_table": json_rows}), csv: Some(csv) });
            }
            let Some(path) = polytope else {
                return Err(CliError::Input("need --polytope or --catalog".into()));
            };
            let p = input::read_polytope(path)?;
            let report = polytope_measure(&p);
            let binomials: Vec<String> =
                canonical_model_binomials(&p, *k, mode).iter().map(|b| b.display()).collect();
            Ok(Output::json(json!({
                "dim": p.dim(),
                "volume": rational_to_f64(&report.volume),
                "degree": rational_to_f64(&report.degree),
                "barycenter": report.barycenter.iter().map(rational_to_f64).collect::<Vec<_>>(),
                "kps": report.kps,
                "bound_rhs": report.bound_rhs,
                "cn_over_factorial": report.cn_over_factorial,
                "binomials": binomials,
            })))
        }
        Cmd::Check { what, inputs } => check_cmd(*what, inputs),
        Cmd::StudyXa { d, n, a, pmax, rmax, plot } => {
            let a_grid: Vec<i64> = a
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Input(format!("bad --a: {e}")))?;
            let study = xa_study(*d, *n, &a_grid, *pmax, *rmax)?;
            let mut csv = String::from("a,h_min,exp_h_proxy,bad_product,cap_product,good_partial\n");
            for r in &study.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.a,
                    r.h_min.map_or(String::from(""), |h| h.to_string()),
                    r.exp_h_proxy,
                    r.bad_product,
                    r.cap_product,
                    r.good_partial_product
                ));
            }
            if let Some(path) = plot {
                let pts: Vec<(f64, f64, String)> = study
                    .rows
                    .iter()
                    .filter_map(|r| r.h_min.map(|h| (r.a as f64, h, format!("a={}", r.a))))
                    .collect();
                let svg = plot::loglog_svg("minimal height vs a", "a", "H_min", &pts);
                std::fs::write(path, svg)
                    .map_err(|e| CliError::Input(format!("cannot write plot: {e}")))?;
            }
            Ok(Output { json: serde_json::to_value(&study).unwrap(), csv: Some(csv) })
        }
        Cmd::Peyre { eta, mu_c, mu_r, shape } => {
            let parts: Vec<u32> = shape
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Input(format!("bad --shape: {e}")))?;
            if parts.len() != 3 {
                return Err(CliError::Input("--shape needs m_R,m_C,degree".into()));
            }
            let pc = peyre_assemble(*eta, *mu_c, *mu_r, (parts[0], parts[1], parts[2]))?;
            Ok(Output::json(serde_json::to_value(&pc).unwrap()))
        }
    }
}

fn p1_cmd(
    what: P1What,
    metric: &str,
    fourier: &Option<String>,
    shift: f64,
    tol: f64,
) -> Result<Output, CliError> {
    let fourier = fourier.as_deref().map(input::parse_fourier).transpose()?;
    if what == P1What::Mt {
        let v = fourier.ok_or_else(|| CliError::Input("mt needs --fourier".into()))?;
        let value = mt_functional(&v, tol)?;
        return Ok(Output::json(json!({"value": value, "est_error": tol})));
    }
    let mut psi = match metric {
        "fs" => P1Metric::fs(),
        "weil" => P1Metric::weil(),
        other => return Err(CliError::Input(format!("unknown p1 metric {other:?} (fs|weil)"))),
    };
    if let Some(v) = fourier {
        psi = psi.with_fourier(v);
    }
    let ac = AcMetric::twice(psi.clone()).with_shift(shift);
    let psi = psi.with_shift(shift / 2.0);
    match what {
        P1What::Energy => {
            let r = energy_weil(&psi, tol)?;
            Ok(Output::json(json!({"value": r.value, "est_error": r.est_error})))
        }
        P1What::Height => {
            let h_hat = normalized_height(&ac, tol)?;
            let h_ac = anticanonical_height(&ac, tol)?;
            let vn = volume_normalized_ac_height(&psi, tol)?;
            Ok(Output::json(json!({
                "h_hat": h_hat,
                "h_ac": h_ac,
                "volume_normalized": vn,
                "est_error": tol,
            })))
        }
        P1What::Ding => {
            let value = ding_arith(&ac, tol)?;
            Ok(Output::json(json!({"value": value, "est_error": tol})))
        }
        P1What::Masses => {
            let c = complex_mass_p1(&ac, tol)?;
            let r = real_mass_p1(&ac, tol)?;
            Ok(Output::json(json!({
                "complex": c.mass,
                "real": r.mass,
                "est_error": c.est_error.max(r.est_error),
            })))
        }
        P1What::RealTheorem => {
            let r = real_theorem_functional(&ac, tol)?;
            Ok(Output::json(json!({"value": r.value, "bound": r.bound, "slack": r.slack})))
        }
        P1What::Mt => unreachable!(),
    }
}

fn check_cmd(what: CheckWhat, inputs: &[String]) -> Result<Output, CliError> {
    let map = input::parse_inputs(inputs)?;
    match what {
        CheckWhat::Main => {
            let report = main_conjecture_check(
                input::input_f64(&map, "h")?,
                input::input_f64(&map, "mu_c")?,
                input::input_f64(&map, "vol")?,
                input::input_f64(&map, "n")? as u32,
                input::input_f64_or(&map, "err", 1e-9)?,
            );
            Ok(Output::json(serde_json::to_value(&report).unwrap()))
        }
        CheckWhat::Diagonal => {
            let a: Vec<i64> = input::input_list(&map, "a")?.iter().map(|x| *x as i64).collect();
            let d = input::input_f64(&map, "d")? as u32;
            let n = input::input_f64(&map, "n")? as usize;
            let form = crate::core::DiagonalForm::from_i64(d, n, &a);
            let rhs = diagonal_bound_rhs(&form)?;
            Ok(Output::json(json!({"rhs": rhs})))
        }
        CheckWhat::Minpoint => {
            let bound = min_point_bound(
                input::input_f64(&map, "mu_c")?,
                input::input_f64(&map, "vol")?,
                input::input_f64(&map, "n")? as u32,
            );
            Ok(Output::json(json!({"bound": bound})))
        }
        CheckWhat::Zhang => {
            let e = input::input_list(&map, "e")?;
            let report = zhang_report(
                &e,
                input::input_f64(&map, "h_hat")?,
                input::input_f64_or(&map, "err", 0.0)?,
            )?;
            Ok(Output::json(serde_json::to_value(&report).unwrap()))
        }
        CheckWhat::Ej => {
            let product =
                ej_product(input::input_f64(&map, "min_h")?, input::input_f64(&map, "theta")?);
            Ok(Output::json(json!({"product": product})))
        }
    }
}
