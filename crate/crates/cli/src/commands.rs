use anyhow::Context as _;
use rayon::prelude::*;
use serde::Serialize;

use schwarzschild_lab::conformal_metric::{schwarzschild_profile, MetricProfile, SchwarzschildParams};
use schwarzschild_lab::curvature::{bakry_emery_ricci, ricci_route_disagreement, ricci_sign_change_radius};
use schwarzschild_lab::frankel::{compare_routes, ricci_integral_alpha_route, ricci_integral_direct, AlphaParameter};
use schwarzschild_lab::geodesic::{angular_momentum_at, integrate_geodesic};
use schwarzschild_lab::numerics::grid::log_space;
use schwarzschild_lab::perturbation::{
    build_metric_from_f, check_negativity_conditions, scalar_sign_scan, smoothed_bump_profile, ConditionGrid,
    PerturbationBudget, PerturbationReport, ProfileFunction, DEFAULT_SMOOTHING_FRACTION,
};

use crate::table::{Cell, Table, SCHEMA_VERSION};
use crate::{Failure, Format, Grid, ProfileArgs, Report};

/// Conservation residual above which a geodesic row fails.
const CONSERVATION_LIMIT: f64 = 1e-8;
/// Disagreement limits of the route comparison.
const ODE_ROUTE_LIMIT: f64 = 1e-3;
const QUADRATURE_SERIES_LIMIT: f64 = 1e-6;
/// Largest allowed `|f_φ − f|` after rebuilding a profile.
const RECOVERY_LIMIT: f64 = 1e-8;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// One start point of a parameter grid.
#[derive(Debug, Clone, Copy)]
struct Point {
    params: SchwarzschildParams<f64>,
    /// Value as given on the command line.
    given: f64,
    areal: bool,
    absolute: bool,
}

impl Point {
    fn r0(&self) -> anyhow::Result<f64> {
        let p = &self.params;
        match (self.areal, self.absolute) {
            (false, true) => Ok(self.given),
            (false, false) => Ok(self.given * p.horizon_radius()),
            (true, absolute) => {
                let u = if absolute {
                    self.given
                } else {
                    self.given * p.areal_horizon()
                };
                let prof = schwarzschild_profile(*p)?;
                Ok(prof.radius_of_areal(u)?)
            }
        }
    }

    fn leading(&self) -> Vec<Cell> {
        let p = &self.params;
        vec![p.n().into(), p.m().into(), p.k().into()]
    }
}

fn expand(grid: &Grid, default_r0: &[f64], classic_only: bool) -> Result<Vec<Point>, Failure> {
    if grid.n.is_empty() || grid.m.is_empty() || grid.k.is_empty() {
        return Err(usage("parameter grids must be non-empty"));
    }
    if !(grid.tol > 0.0) || !grid.tol.is_finite() {
        return Err(usage("--tol must be positive"));
    }
    let (starts, areal) = if !grid.u0.is_empty() {
        (grid.u0.clone(), true)
    } else if !grid.r0.is_empty() {
        (grid.r0.clone(), false)
    } else {
        (default_r0.to_vec(), false)
    };
    if starts.is_empty() {
        return Err(usage("start grid must be non-empty"));
    }
    if let Some(bad) = starts.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(usage(format!("start value {bad} must be positive")));
    }
    let mut points = Vec::new();
    for &n in &grid.n {
        for &m in &grid.m {
            for &k in &grid.k {
                if classic_only && k != 1 {
                    return Err(usage("this command supports k = 1 only"));
                }
                let params = SchwarzschildParams::new(n, m, k).map_err(|e| usage(e.to_string()))?;
                for &given in &starts {
                    points.push(Point {
                        params,
                        given,
                        areal,
                        absolute: grid.absolute,
                    });
                }
            }
        }
    }
    Ok(points)
}

/// Evaluates `row` at every point in parallel and assembles the table in
/// input order. A point whose evaluation errors gets a row with only the
/// grid columns filled and fails the table.
fn sweep<F>(command: &'static str, columns: &[&'static str], points: &[Point], row: F) -> Table
where
    F: Fn(&Point) -> anyhow::Result<(Vec<Cell>, bool)> + Sync,
{
    let results: Vec<_> = points.par_iter().map(|p| (p, row(p))).collect();
    let mut table = Table::new(command, columns);
    for (p, res) in results {
        match res {
            Ok((cells, ok)) => {
                table.push(cells);
                table.failed |= !ok;
            }
            Err(e) => {
                eprintln!(
                    "error at n={} m={} k={} start={}: {e:#}",
                    p.params.n(),
                    p.params.m(),
                    p.params.k(),
                    p.given
                );
                table.push_partial(p.leading());
                table.failed = true;
            }
        }
    }
    table
}

fn render(table: &Table, format: Format) -> anyhow::Result<Report> {
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(table)? + "\n",
    };
    Ok(Report {
        body,
        passed: !table.failed,
    })
}

pub fn geodesic(grid: &Grid, s_max: Option<f64>, format: Format) -> Result<Report, Failure> {
    let points = expand(grid, &[1.1, 2.0, 5.0], true)?;
    let s_max = s_max.unwrap_or(f64::INFINITY);
    if !(s_max > 0.0) {
        return Err(usage("--s-max must be positive"));
    }
    let columns = [
        "n",
        "m",
        "k",
        "r0",
        "c0",
        "s_end",
        "r_end",
        "states",
        "max_arclength_residual",
        "max_c_residual",
        "radius_increasing",
        "passed",
    ];
    let table = sweep("geodesic", &columns, &points, |pt| {
        let r0 = pt.r0()?;
        let on_horizon = AlphaParameter::from_start(&pt.params, r0)?.complement == 0.0;
        // the horizon circle never escapes; trace one loop of length 2π C₀
        let s_end = if on_horizon && !s_max.is_finite() {
            2.0 * std::f64::consts::PI * angular_momentum_at(&pt.params, r0)
        } else {
            s_max
        };
        let t = integrate_geodesic(&pt.params, r0, s_end, grid.tol)?;
        let increasing = t.on_horizon || t.radius_strictly_increasing();
        let ok = increasing && t.max_arclength_residual < CONSERVATION_LIMIT && t.max_c_residual < CONSERVATION_LIMIT;
        let last = t.last();
        let mut row = pt.leading();
        row.extend([
            r0.into(),
            t.c0.into(),
            last.s.into(),
            last.r.into(),
            t.states.len().into(),
            t.max_arclength_residual.into(),
            t.max_c_residual.into(),
            increasing.into(),
            ok.into(),
        ]);
        Ok((row, ok))
    });
    Ok(render(&table, format)?)
}

pub fn ricci(grid: &Grid, d: Option<f64>, format: Format) -> Result<Report, Failure> {
    let points = expand(grid, &[1.1, 2.0, 5.0], true)?;
    let d = d.unwrap_or(f64::INFINITY);
    if !(d > 0.0) {
        return Err(usage("--d must be positive"));
    }
    let columns = [
        "n",
        "m",
        "k",
        "r0",
        "c0",
        "alpha",
        "sign_change_radius",
        "R_direct",
        "error_estimate",
        "R_alpha_form",
        "oracle_disagreement",
        "negative",
    ];
    let table = sweep("ricci", &columns, &points, |pt| {
        let p = &pt.params;
        let r0 = pt.r0()?;
        let c0 = angular_momentum_at(p, r0);
        let alpha = AlphaParameter::from_start(p, r0)?;
        let direct = ricci_integral_direct(p, r0, d, grid.tol)?;
        let on_horizon = alpha.complement == 0.0;
        let angular = if d.is_finite() || on_horizon {
            None
        } else {
            Some(ricci_integral_alpha_route(p, r0, grid.tol)?.value)
        };
        let trace = integrate_geodesic(p, r0, d, grid.tol)?;
        let disagreement = ricci_route_disagreement(p, &schwarzschild_profile(*p)?, &trace)?;
        let negative = direct.value < 0.0;
        let mut row = pt.leading();
        row.extend([
            r0.into(),
            c0.into(),
            alpha.alpha.into(),
            ricci_sign_change_radius(p, c0)?.into(),
            direct.value.into(),
            direct.error_estimate.into(),
            angular.into(),
            disagreement.into(),
            negative.into(),
        ]);
        Ok((row, negative))
    });
    Ok(render(&table, format)?)
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "n",
    "m",
    "k",
    "r0",
    "u0",
    "alpha",
    "R_direct",
    "R_alpha_form",
    "R_series",
    "max_pairwise_reldiff",
    "negative",
];

pub fn frankel_sweep(grid: &Grid, format: Format) -> Result<Report, Failure> {
    let points = expand(grid, &[1.1, 2.0, 5.0], false)?;
    let table = sweep("frankel-sweep", &SWEEP_COLUMNS, &points, |pt| {
        let r0 = pt.r0()?;
        let c = compare_routes(&pt.params, r0, grid.tol)?;
        let consistent = c.ode_reldiff < ODE_ROUTE_LIMIT && c.quadrature_series_reldiff < QUADRATURE_SERIES_LIMIT;
        let mut row = pt.leading();
        row.extend([
            c.r0.into(),
            c.u0.into(),
            c.alpha.into(),
            c.direct.into(),
            c.alpha_form.into(),
            c.series.into(),
            c.max_pairwise_reldiff.into(),
            c.negative.into(),
        ]);
        Ok((row, c.negative && consistent))
    });
    Ok(render(&table, format)?)
}

fn load_profile(args: &ProfileArgs) -> Result<ProfileFunction<f64>, Failure> {
    if !(args.tol > 0.0) || !args.tol.is_finite() {
        return Err(usage("--tol must be positive"));
    }
    if !(args.m > 0.0) || !args.m.is_finite() {
        return Err(usage("--m must be positive"));
    }
    match &args.profile {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading profile table {}", path.display()))?;
            let pf = ProfileFunction::from_table(args.n, &text).map_err(|e| usage(e.to_string()))?;
            Ok(pf)
        }
        None => {
            if args.n != 3 {
                return Err(usage(
                    "the built-in example profile is three-dimensional; pass --profile for n != 3",
                ));
            }
            let width = args.smoothing_width.unwrap_or(DEFAULT_SMOOTHING_FRACTION * args.m);
            smoothed_bump_profile(args.m, width).map_err(|e| usage(e.to_string()))
        }
    }
}

fn build(args: &ProfileArgs, pf: &ProfileFunction<f64>) -> anyhow::Result<MetricProfile<f64>> {
    let d = pf.n() as f64 - 2.0;
    let r_f = args.horizon_radius.unwrap_or_else(|| pf.c_f() * 4f64.powf(-1.0 / d));
    Ok(build_metric_from_f(pf, r_f)?)
}

pub fn perturb_build(args: &ProfileArgs, samples: usize, format: Format) -> Result<Report, Failure> {
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let pf = load_profile(args)?;
    let built = build(args, &pf)?;
    let c = pf.c_f();
    let us = log_space(c * (1.0 + 1e-6), 1e3 * c, samples);
    let columns = ["u", "r", "phi", "dphi", "f", "f_phi", "abs_diff"];
    let rows: Vec<anyhow::Result<Vec<Cell>>> = us
        .par_iter()
        .map(|&u| {
            let r = built.radius_of_areal(u)?;
            let f = pf.f(u);
            let f_phi = built.f_phi(u)?;
            Ok(vec![
                u.into(),
                r.into(),
                built.phi(r).into(),
                built.dphi(r).into(),
                f.into(),
                f_phi.into(),
                (f_phi - f).abs().into(),
            ])
        })
        .collect();
    let mut table = Table::new("perturb-build", &columns);
    for (u, row) in us.iter().zip(rows) {
        let row = row?;
        let diff = match row[6] {
            Cell::Float(v) => v,
            _ => f64::NAN,
        };
        if !(diff < RECOVERY_LIMIT) {
            eprintln!("f_φ misses f by {diff:e} at u = {u}");
            table.failed = true;
        }
        table.push(row);
    }
    Ok(render(&table, format)?)
}

#[derive(Serialize)]
struct CheckDocument<'a> {
    schema_version: u32,
    command: &'static str,
    #[serde(flatten)]
    report: &'a PerturbationReport<f64>,
    all_r_negative: bool,
}

pub fn perturb_check(
    args: &ProfileArgs,
    a: Option<f64>,
    b: Option<f64>,
    u0: &[f64],
    absolute: bool,
    format: Format,
) -> Result<Report, Failure> {
    let pf = load_profile(args)?;
    let m = args.m;
    let default_budget = m * m / 16.0;
    let budget = PerturbationBudget::new(a.unwrap_or(default_budget), b.unwrap_or(default_budget), pf.n(), m)
        .map_err(|e| usage(e.to_string()))?;
    let params = SchwarzschildParams::schwarzschild(pf.n(), m).map_err(|e| usage(e.to_string()))?;
    if u0.iter().any(|v| !(*v > 0.0)) {
        return Err(usage("--u0 values must be positive"));
    }
    let built = build(args, &pf)?;
    let c_phi = built.areal_horizon();
    let samples = if u0.is_empty() {
        log_space(1.01 * c_phi, (50.0 * m).max(2.0 * c_phi), 25)
    } else if absolute {
        u0.to_vec()
    } else {
        u0.iter().map(|v| v * c_phi).collect()
    };
    let mut grid = ConditionGrid::standard().with_r_samples(samples);
    grid.tol = args.tol;
    let report = check_negativity_conditions(&built, &params, &budget, &grid)?;
    let all_negative = report.all_r_negative();
    let passed = report.passed && all_negative;
    let body = match format {
        Format::Json => {
            let doc = CheckDocument {
                schema_version: SCHEMA_VERSION,
                command: "perturb-check",
                report: &report,
                all_r_negative: all_negative,
            };
            serde_json::to_string_pretty(&doc).map_err(anyhow::Error::from)? + "\n"
        }
        Format::Csv => {
            let columns = [
                "n",
                "m",
                "a",
                "b",
                "derivative_margin",
                "b_margin",
                "budget_lhs",
                "budget_rhs",
                "grid_points",
                "grid_span",
                "r_samples",
                "r_max",
                "all_r_negative",
                "passed",
            ];
            let r_max = report.r_samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
            let mut table = Table::new("perturb-check", &columns);
            table.push(vec![
                pf.n().into(),
                m.into(),
                report.budget.a.into(),
                report.budget.b.into(),
                report.derivative_margin.into(),
                report.b_margin.into(),
                report.budget_lhs.into(),
                report.budget_rhs.into(),
                report.grid_points.into(),
                report.grid_span.into(),
                report.r_samples.len().into(),
                if report.r_samples.is_empty() {
                    Cell::Empty
                } else {
                    r_max.into()
                },
                all_negative.into(),
                report.passed.into(),
            ]);
            table.to_csv()
        }
    };
    Ok(Report { body, passed })
}

pub fn scal_scan(
    args: &ProfileArgs,
    lo: Option<f64>,
    hi: Option<f64>,
    samples: usize,
    format: Format,
) -> Result<Report, Failure> {
    if args.n != 3 {
        return Err(usage("the scalar-curvature scan needs n = 3"));
    }
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let pf = load_profile(args)?;
    let built = build(args, &pf)?;
    let lo = lo.unwrap_or(1.01 * built.areal_horizon());
    let hi = hi.unwrap_or(30.0 * args.m);
    if !(lo >= built.areal_horizon()) || !(hi > lo) {
        return Err(usage("need areal horizon ≤ --lo < --hi"));
    }
    let scan = scalar_sign_scan(&built, lo, hi, samples)?;
    let mut table = Table::new("scal-scan", &["u", "scal", "sign"]);
    for s in scan {
        table.push(vec![s.u.into(), s.value.into(), Cell::Text(s.sign.to_string())]);
    }
    Ok(render(&table, format)?)
}

pub fn bakry_emery(grid: &Grid, format: Format) -> Result<Report, Failure> {
    let points = expand(grid, &[1.0, 2.0, 10.0, 1e6], true)?;
    let columns = [
        "n",
        "m",
        "k",
        "r",
        "radial",
        "tangential",
        "radial_negative",
        "tangential_positive",
    ];
    let table = sweep("bakry-emery", &columns, &points, |pt| {
        let p = &pt.params;
        let n = p.n();
        let r = pt.r0()?;
        let mut x = vec![0.0; n];
        x[0] = r;
        let mut radial_dir = vec![0.0; n];
        radial_dir[0] = 1.0;
        let mut tangent = vec![0.0; n];
        tangent[1] = 1.0;
        let radial = bakry_emery_ricci(p, &x, &radial_dir, &radial_dir)?;
        let tangential = bakry_emery_ricci(p, &x, &tangent, &tangent)?;
        let ok = radial < 0.0 && tangential > 0.0;
        let mut row = pt.leading();
        row.extend([
            r.into(),
            radial.into(),
            tangential.into(),
            (radial < 0.0).into(),
            (tangential > 0.0).into(),
        ]);
        Ok((row, ok))
    });
    Ok(render(&table, format)?)
}
