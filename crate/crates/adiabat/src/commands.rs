use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use braid::{braid_census, braid_construct, braid_permutation, braid_validate, TorusBraid, ValidBraid};
use monopole::{
    adiabatic_residual, assemble_adiabatic, identity_check, newton_refine, perturb_phi, sw_map, weighted_norm,
    AssembleOptions, Config3D, IdentityReport, NewtonOptions,
};
use serde_json::{json, Value};
use topology::{count_large_d, jacobian_fixed_points, spinc_classes, validate_mapping_class, MappingClass};
use transport::{family_from_braid, numeric_monodromy_report, transport_opts, TransportOptions, TransportTrace};
use vortexfield::{moment_residual, vortex_solve_opts, FlatBundleFamily, FlatCurve, SolveOptions, VortexConfig};
use zlattice::{BigInt, GroupElement, IntMatrix};

use crate::config::ScenarioConfig;
use crate::error::{log_entry, CliError, Result};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Action of f on H_1, row-major "a,b;c,d".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub genus: usize,
    /// Rank N of the bundle (strand count for braid-make).
    #[arg(long, global = true, default_value_t = 1)]
    pub rank: u32,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub degree: Option<i64>,
    /// Braid JSON file.
    #[arg(long, global = true)]
    pub braid: Option<PathBuf>,
    /// Points per side of the square grid.
    #[arg(long, global = true, default_value_t = 16)]
    pub grid: usize,
    /// Transport steps (`transport`) or time slices (`newton`, `check-identities`).
    #[arg(long, global = true, default_value_t = 32)]
    pub tsteps: usize,
    /// Comma-separated ε list.
    #[arg(long, global = true, default_value = "0.2,0.1,0.05")]
    pub eps: String,
    /// Mean of τ.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tau: f64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Scenario JSON with tolerances and inline families.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result in both formats; `deferred` is reported after the output is written.
pub struct Output {
    pub json: Value,
    pub csv: String,
    pub deferred: Option<CliError>,
}

impl Output {
    fn new(json: Value, csv: String) -> Self {
        Self { json, csv, deferred: None }
    }
}

fn csv_table<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn mapping_class(c: &Common) -> Result<MappingClass> {
    let text = c.matrix.as_deref().ok_or_else(|| CliError::Usage("--matrix is required".into()))?;
    Ok(validate_mapping_class(c.genus, IntMatrix::from_str(text)?)?)
}

fn degree(c: &Common) -> Result<i64> {
    c.degree.ok_or_else(|| CliError::Usage("--degree is required".into()))
}

fn read_braid(path: &PathBuf) -> Result<ValidBraid> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(braid_validate(TorusBraid::from_json(&text)?)?)
}

fn curve(c: &Common) -> Result<FlatCurve> {
    Ok(FlatCurve::square(c.grid)?)
}

/// The bundle family from `--braid`, else from the scenario's inline family.
fn family(c: &Common, cfg: &ScenarioConfig) -> Result<(FlatBundleFamily, Option<ValidBraid>)> {
    let tau = cfg.tau(c.tau);
    if let Some(path) = &c.braid {
        let b = read_braid(path)?;
        return Ok((family_from_braid(&b, tau), Some(b)));
    }
    match &cfg.family {
        Some(spec) => Ok((spec.build(tau)?, None)),
        None => Err(CliError::Usage("give --braid or a family in --config".into())),
    }
}

fn parse_eps(s: &str) -> Result<Vec<f64>> {
    let eps = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("--eps {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(CliError::Usage("every ε must be positive".into()));
    }
    Ok(eps)
}

fn parse_class(s: &str) -> Result<GroupElement> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    if inner.trim().is_empty() {
        return Ok(GroupElement(Vec::new()));
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|e| CliError::Config(format!("class {s:?}: {e}"))))
        .collect::<Result<Vec<_>>>()
        .map(GroupElement)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn slope_or_null(xs: &[f64], ys: &[f64]) -> Value {
    if xs.len() < 2 || ys.iter().any(|y| y.is_nan() || *y <= 0.0) {
        return Value::Null;
    }
    json!(loglog_slope(xs, ys))
}

pub fn spinc(c: &Common) -> Result<Output> {
    let mc = mapping_class(c)?;
    let d = degree(c)?;
    let classes = spinc_classes(&mc, d)?;
    let json = json!({
        "genus": mc.genus(),
        "degree": d,
        "det": mc.lefschetz_det().to_string(),
        "group": mc.torsion_group().to_string(),
        "classes": classes.iter().map(|s| s.torsion_class.to_string()).collect::<Vec<_>>(),
    });
    let csv = csv_table(&["degree", "torsion_class"], classes.iter().map(|s| [d.to_string(), s.torsion_class.to_string()]));
    Ok(Output::new(json, csv))
}

pub fn fix(c: &Common) -> Result<Output> {
    let mc = mapping_class(c)?;
    let points = jacobian_fixed_points(&mc)?;
    let coords = |p: &zlattice::TorusPoint| p.coords().iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let json = json!({
        "det": mc.lefschetz_det().to_string(),
        "group": mc.torsion_group().to_string(),
        "count": points.len(),
        "fixed_points": points
            .iter()
            .map(|f| json!({ "point": coords(&f.point), "label": f.label.to_string() }))
            .collect::<Vec<_>>(),
    });
    let csv = csv_table(&["point", "label"], points.iter().map(|f| [coords(&f.point).join(" "), f.label.to_string()]));
    Ok(Output::new(json, csv))
}

pub fn count(c: &Common) -> Result<Output> {
    let mc = mapping_class(c)?;
    let table = count_large_d(&mc, c.rank, degree(c)?)?;
    let json = serde_json::from_str(&table.to_json()?).expect("count table is valid JSON");
    Ok(Output::new(json, table.to_csv()?))
}

pub fn braid_census_cmd(c: &Common) -> Result<Output> {
    let path = c.braid.as_ref().ok_or_else(|| CliError::Usage("--braid is required".into()))?;
    let census = braid_census(&read_braid(path)?);
    let json = serde_json::from_str(&census.to_json()).expect("census is valid JSON");
    Ok(Output::new(json, census.to_csv()))
}

pub fn braid_make(c: &Common, cfg: &ScenarioConfig) -> Result<Output> {
    let mc = mapping_class(c)?;
    let mut targets = BTreeMap::new();
    for (k, &v) in &cfg.targets {
        *targets.entry(parse_class(k)?).or_insert(0) += v;
    }
    let b = braid_construct(&mc, &targets, c.rank as usize)?;
    let json: Value = serde_json::from_str(&b.to_json()).expect("braid is valid JSON");
    let mut rows = Vec::new();
    for (i, s) in json["strands"].as_array().into_iter().flatten().enumerate() {
        for bp in s.as_array().into_iter().flatten() {
            let mut r = vec![(i + 1).to_string()];
            r.extend(bp.as_array().into_iter().flatten().map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string)));
            rows.push(r);
        }
    }
    Ok(Output::new(json, csv_table(&["strand", "t", "x", "y"], rows)))
}

fn solve_options(cfg: &ScenarioConfig) -> SolveOptions {
    SolveOptions { tol: cfg.vortex_tol, ..SolveOptions::default() }
}

fn transport_options(cfg: &ScenarioConfig, steps: usize) -> TransportOptions {
    TransportOptions { steps, moment_tol: cfg.moment_tol, psi_tol: cfg.psi_tol, max_halvings: cfg.max_halvings }
}

fn vortex_json(v: &VortexConfig, tau: &[f64]) -> Value {
    json!({
        "n": v.curve.n(),
        "holonomies": v.holonomies,
        "active": v.active,
        "zeta": v.zeta,
        "phi_norm_sq": v.phi_norm_sq(),
        "dbar_residual": v.dbar_residual(),
        "moment_residual": moment_residual(v, tau),
        "newton": { "increments": v.newton.increments, "residuals": v.newton.residuals },
    })
}

pub fn vortex(c: &Common, cfg: &ScenarioConfig) -> Result<Output> {
    let curve = curve(c)?;
    let holonomies = match (&c.braid, &cfg.holonomies) {
        (Some(_), _) | (None, None) => family(c, cfg)?.0.holonomies(0.0),
        (None, Some(h)) => h.clone(),
    };
    let tau = cfg.tau(c.tau).tau(&curve, 0.0);
    let v = vortex_solve_opts(&curve, &holonomies, cfg.active, &tau, &solve_options(cfg))?;
    let density = v.phi_density();
    let csv = csv_table(
        &["x", "y", "phi_sq"],
        density.iter().enumerate().map(|(p, d)| {
            let (x, y) = curve.point(p);
            [x.to_string(), y.to_string(), d.to_string()]
        }),
    );
    Ok(Output::new(vortex_json(&v, &tau), csv))
}

fn trace_json(strand: usize, tr: &TransportTrace) -> Value {
    json!({
        "strand": strand + 1,
        "h": tr.h,
        "rejections": tr.rejections,
        "max_moment_residual": tr.max_moment_residual(),
        "tracking_error": tr.tracking_error(),
        "states": tr.to_json_lines().lines().map(|l| serde_json::from_str(l).expect("trace line is JSON")).collect::<Vec<Value>>(),
    })
}

fn trace_rows(strand: usize, tr: &TransportTrace) -> Vec<[String; 6]> {
    tr.states
        .iter()
        .map(|s| {
            [
                (strand + 1).to_string(),
                s.t.to_string(),
                s.zeta[0].to_string(),
                s.zeta[1].to_string(),
                s.moment_residual.to_string(),
                s.phi_l2.to_string(),
            ]
        })
        .collect()
}

const TRACE_HEADER: [&str; 6] = ["strand", "t", "holonomy_x", "holonomy_y", "moment_residual", "phi_l2"];

pub fn transport_cmd(c: &Common, cfg: &ScenarioConfig) -> Result<Output> {
    let curve = curve(c)?;
    let (fam, braid) = family(c, cfg)?;
    let opts = transport_options(cfg, c.tsteps);
    let (json, traces): (Value, Vec<(usize, TransportTrace)>) = match braid {
        Some(b) => {
            let report = numeric_monodromy_report(&curve, &fam, &b, &opts)?;
            let json = json!({
                "steps": c.tsteps,
                "permutation": report.permutation.to_string(),
                "braid_permutation": braid_permutation(&b).to_string(),
                "match_distances": report.match_distances,
                "max_moment_residual": report.max_moment_residual(),
                "traces": report.traces.iter().enumerate().map(|(k, t)| trace_json(k, t)).collect::<Vec<_>>(),
            });
            (json, report.traces.into_iter().enumerate().collect())
        }
        None => {
            fam.validate(&curve, 8)?;
            let tau0 = fam.tau.tau(&curve, 0.0);
            let start = vortex_solve_opts(&curve, &fam.holonomies(0.0), cfg.active, &tau0, &solve_options(cfg))?;
            let tr = transport_opts(&curve, &fam, &start, &opts)?;
            let json = json!({
                "steps": c.tsteps,
                "max_moment_residual": tr.max_moment_residual(),
                "traces": [trace_json(cfg.active, &tr)],
            });
            (json, vec![(cfg.active, tr)])
        }
    };
    let rows = traces.iter().flat_map(|(k, t)| trace_rows(*k, t));
    Ok(Output::new(json, csv_table(&TRACE_HEADER, rows)))
}

/// `Ξ₀` for the scenario, transported on the active strand.
pub fn adiabatic_config(c: &Common, cfg: &ScenarioConfig) -> Result<Config3D> {
    let curve = curve(c)?;
    let (fam, _) = family(c, cfg)?;
    fam.validate(&curve, 8)?;
    let m = c.tsteps;
    let tau0 = fam.tau.tau(&curve, 0.0);
    let start = vortex_solve_opts(&curve, &fam.holonomies(0.0), cfg.active, &tau0, &solve_options(cfg))?;
    let trace = transport_opts(&curve, &fam, &start, &transport_options(cfg, m * cfg.substeps))?;
    Ok(assemble_adiabatic(&trace, &fam, &AssembleOptions { m, tol: cfg.assemble_tol })?)
}

pub fn newton(c: &Common, cfg: &ScenarioConfig) -> Result<Output> {
    let eps = parse_eps(&c.eps)?;
    let xi0 = adiabatic_config(c, cfg)?;
    let opts = NewtonOptions {
        tol: cfg.newton_tol,
        max_iter: cfg.newton_max_iter,
        linear_tol: cfg.linear_tol,
        max_linear_iter: cfg.max_linear_iter,
    };
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    let (mut sw_norms, mut dists) = (Vec::new(), Vec::new());
    let mut deferred = None;
    for &e in &eps {
        let sw = weighted_norm(&xi0, &sw_map(&xi0, e), e, 2.0).zero;
        let r = newton_refine(&xi0, e, &opts)?;
        let dist = weighted_norm(&xi0, &r.config.fields.sub(&xi0.fields), e, 2.0).one;
        if !r.converged && deferred.is_none() {
            deferred = Some(CliError::NewtonNotConverged { eps: e, iterations: r.log.len() - 1 });
        }
        for l in &r.log {
            rows.push([
                e.to_string(),
                l.k.to_string(),
                l.residual_0_2_eps.to_string(),
                l.increment_1_2_eps.to_string(),
                l.linear_iterations.to_string(),
            ]);
        }
        runs.push(json!({
            "eps": e,
            "sw_0_2_eps": sw,
            "converged": r.converged,
            "iterations": r.log.len() - 1,
            "distance_1_2_eps": dist,
            "log": r.log.iter().map(log_entry).collect::<Vec<_>>(),
        }));
        sw_norms.push(sw);
        dists.push(dist);
    }
    let json = json!({
        "n": c.grid,
        "m": c.tsteps,
        "active": cfg.active,
        "adiabatic_residual": adiabatic_residual(&xi0),
        "runs": runs,
        "sw_slope": slope_or_null(&eps, &sw_norms),
        "distance_slope": slope_or_null(&eps, &dists),
    });
    let csv = csv_table(&["eps", "k", "residual_0_2_eps", "increment_1_2_eps", "linear_iterations"], rows);
    Ok(Output { json, csv, deferred })
}

fn report_json(r: &IdentityReport) -> Value {
    json!({ "identity0": r.identity0, "identity1": r.identity1, "identity2": r.identity2 })
}

pub fn check_identities(c: &Common, cfg: &ScenarioConfig) -> Result<Output> {
    let xi0 = adiabatic_config(c, cfg)?;
    let r = identity_check(&xi0, cfg.samples, cfg.test_modes, c.seed);
    let bad = identity_check(&perturb_phi(&xi0, cfg.control_amp), cfg.samples, cfg.test_modes, c.seed);
    let json = json!({
        "n": c.grid,
        "m": c.tsteps,
        "samples": r.samples,
        "test_modes": cfg.test_modes,
        "seed": c.seed,
        "adiabatic": report_json(&r),
        "negative_control": { "amp": cfg.control_amp, "residuals": report_json(&bad) },
        "identity1_amplification": bad.identity1 / r.identity1,
    });
    let row = |name: &str, r: &IdentityReport| [name.to_string(), r.identity0.to_string(), r.identity1.to_string(), r.identity2.to_string()];
    let csv = csv_table(&["config", "identity0", "identity1", "identity2"], [row("adiabatic", &r), row("negative_control", &bad)]);
    Ok(Output::new(json, csv))
}
