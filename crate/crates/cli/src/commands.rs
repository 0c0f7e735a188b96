use std::fs;

use serde_json::{json, Value};
use vortex_core::analyze::report::{classification_json, classification_table, to_json, Cell, Table};
use vortex_core::analyze::{
    audit_field, classify_grid_with_workers, compare_paths, run_suite, sample_points, trajectory_config,
    GridSpec, SuiteReport, SUITE_NAMES,
};
use vortex_core::diffgeo::{classify_sample, criterion_fd, frenet_sample};
use vortex_core::fieldkit::VelocityField;
use vortex_core::flowsim::{disk_probe, flow_map_series, integrate_streamline, DiskProbeConfig};
use vortex_core::{Error, Vec3};

use crate::args::{Command, FieldAction, FieldArgs, Format, Probe};

pub const THREADS_ENV: &str = "VORTEX_CRITERION_THREADS";

/// Rendered result of a subcommand.
pub struct Output {
    /// Short run description for the CSV header line.
    pub context: String,
    pub body: String,
    /// Lines for standard error (summaries).
    pub notes: Vec<String>,
    /// Set when a verification did not pass.
    pub failed: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Bad input discovered after argument parsing.
    Usage(String),
    Io(String),
    /// A numeric check that did not meet its tolerance.
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_field(a: &FieldArgs) -> CliResult<VelocityField> {
    let mut field = if let Some(name) = &a.catalog {
        VelocityField::catalog(name, &a.params)?
    } else {
        if !a.params.is_empty() {
            return Err(CliError::Usage("--params only applies to --catalog".into()));
        }
        let text = match (&a.expr, &a.field_file) {
            (Some(e), _) => e.clone(),
            (None, Some(path)) => {
                let raw = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                raw.lines()
                    .filter(|l| !l.trim_start().starts_with('#'))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            (None, None) => return Err(CliError::Usage("no field source given".into())),
        };
        VelocityField::parse(&text)?
    };
    if let Some(p) = &a.pressure {
        field = field.with_pressure(p)?;
    }
    if a.backward {
        field = field.reversed();
    }
    Ok(field)
}

fn render(format: Format, table: impl FnOnce() -> Table, json: impl FnOnce() -> Value) -> CliResult<String> {
    Ok(match format {
        Format::Csv => table().to_csv()?,
        Format::Json => {
            let mut s = to_json(&json())?;
            s.push('\n');
            s
        }
    })
}

fn ok(context: String, body: String) -> CliResult<Output> {
    Ok(Output {
        context,
        body,
        notes: Vec::new(),
        failed: false,
    })
}

fn worker_count() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

fn vec_cells(v: &Vec3) -> [Cell; 3] {
    [v[0].into(), v[1].into(), v[2].into()]
}

pub fn run(cmd: &Command, format: Format) -> CliResult<Output> {
    match cmd {
        Command::Eval { field, point, fd_step, tol } => {
            let f = read_field(field)?;
            let tol = tol.policy();
            let s = frenet_sample(&f, point, &tol)?;
            let class = classify_sample(&s, &tol);
            let s_fd = fd_step.map(|h| criterion_fd(&f, point, h, &tol)).transpose()?;
            let body = render(
                format,
                || {
                    let mut t = Table::new([
                        "x", "y", "z", "speed", "alpha", "kappa", "torsion", "F", "S", "dz_kappa", "S_fd", "verdict",
                    ]);
                    let mut row = vec_cells(&s.x).to_vec();
                    row.extend([
                        s.speed.into(),
                        s.alpha.into(),
                        s.kappa.into(),
                        s.torsion.into(),
                        s.f.into(),
                        s.s.into(),
                        s.dz_kappa.into(),
                        s_fd.into(),
                        class.verdict.as_str().into(),
                    ]);
                    t.push(row);
                    t
                },
                || {
                    let mut v = serde_json::to_value(s).unwrap_or(Value::Null);
                    v["field"] = json!(f.label());
                    v["verdict"] = json!(class.verdict.as_str());
                    v["is_stretching"] = json!(class.is_stretching);
                    v["criterion_zero"] = json!(class.criterion_zero);
                    if let Some(x) = s_fd {
                        v["S_fd"] = json!(x);
                    }
                    v
                },
            )?;
            ok(format!("eval field={}", f.label()), body)
        }
        Command::Streamline { field, seed, integ, tol } => {
            let f = read_field(field)?;
            let tol = tol.policy();
            let line = integrate_streamline(&f, seed, &integ.config())?;
            // geometry is undefined once the trajectory reaches stagnation
            let geometry: Vec<Option<_>> = line.samples.iter().map(|s| frenet_sample(&f, &s.x, &tol).ok()).collect();
            let body = render(
                format,
                || {
                    let mut t = Table::new(["t", "z", "x", "y", "z_pos", "speed", "kappa", "alpha", "F", "S"]);
                    for (s, g) in line.samples.iter().zip(&geometry) {
                        let mut row: Vec<Cell> = vec![s.t.into(), s.z.into()];
                        row.extend(vec_cells(&s.x));
                        row.push(s.speed.into());
                        row.extend([
                            g.map(|g| g.kappa).into(),
                            g.map(|g| g.alpha).into(),
                            g.map(|g| g.f).into(),
                            g.map(|g| g.s).into(),
                        ]);
                        t.push(row);
                    }
                    t
                },
                || {
                    let samples: Vec<Value> = line
                        .samples
                        .iter()
                        .zip(&geometry)
                        .map(|(s, g)| {
                            json!({
                                "t": s.t, "z": s.z, "x": s.x, "speed": s.speed,
                                "kappa": g.map(|g| g.kappa), "alpha": g.map(|g| g.alpha),
                                "F": g.map(|g| g.f), "S": g.map(|g| g.s),
                            })
                        })
                        .collect();
                    json!({
                        "field": f.label(),
                        "seed": seed,
                        "termination": line.termination,
                        "stats": line.stats,
                        "samples": samples,
                    })
                },
            )?;
            let mut out = ok(format!("streamline field={} seed={}", f.label(), seed), body)?;
            out.notes.push(format!(
                "steps {} rejected {} termination {:?}",
                line.stats.steps, line.stats.rejected, line.termination
            ));
            Ok(out)
        }
        Command::Classify { field, lo, hi, resolution, tol } => {
            let f = read_field(field)?;
            let grid = GridSpec::new(lo.0, hi.0, *resolution)?;
            let rep = classify_grid_with_workers(&f, &grid, &tol.policy(), worker_count()?)?;
            let body = match format {
                Format::Csv => classification_table(&rep).to_csv()?,
                Format::Json => classification_json(&rep)? + "\n",
            };
            let mut out = ok(format!("classify field={}", f.label()), body)?;
            out.notes.extend(rep.summary.iter().map(|(v, n)| format!("{}: {n}", v.as_str())));
            Ok(out)
        }
        Command::Probe { probe: Probe::Disk { field, seed, ring_radius, integ } } => {
            let f = read_field(field)?;
            let cfg = DiskProbeConfig {
                integrator: integ.config(),
                ring_radius: *ring_radius,
            };
            let res = disk_probe(&f, seed, &cfg)?;
            let body = render(
                format,
                || {
                    let mut cols = vec!["t", "defect_n", "defect_b", "axis_stretch"];
                    if ring_radius.is_some() {
                        cols.push("ring_defect");
                    }
                    let mut t = Table::new(cols);
                    for r in &res.series {
                        let mut row: Vec<Cell> =
                            vec![r.t.into(), r.defect_n.into(), r.defect_b.into(), r.axis_stretch.into()];
                        if ring_radius.is_some() {
                            row.push(r.ring_defect.into());
                        }
                        t.push(row);
                    }
                    t
                },
                || json!({ "field": f.label(), "probe": res }),
            )?;
            let mut out = ok(format!("probe disk field={} seed={}", f.label(), seed), body)?;
            out.notes.push(format!(
                "basis {} max |defect| {:.3e}",
                if res.frenet_basis { "frenet" } else { "completion" },
                res.max_abs_defect()
            ));
            Ok(out)
        }
        Command::Probe { probe: Probe::Cauchy { field, seed, omega, integ } } => {
            let f = read_field(field)?;
            let cfg = integ.config();
            let times = cfg.sample_times();
            cfg.validate()?;
            let series = flow_map_series(&f, seed, &times, &cfg)?;
            let rows: Vec<(f64, Vec3, Vec3)> =
                series.iter().map(|s| (s.t, s.x, s.jacobian.mul_vec(omega))).collect();
            let body = render(
                format,
                || {
                    let mut t = Table::new(["t", "x", "y", "z", "omega_x", "omega_y", "omega_z", "omega_norm"]);
                    for (time, x, w) in &rows {
                        let mut row: Vec<Cell> = vec![(*time).into()];
                        row.extend(vec_cells(x));
                        row.extend(vec_cells(w));
                        row.push(w.norm().into());
                        t.push(row);
                    }
                    t
                },
                || {
                    let list: Vec<Value> = rows
                        .iter()
                        .map(|(t, x, w)| json!({"t": t, "x": x, "omega": w, "omega_norm": w.norm()}))
                        .collect();
                    json!({"field": f.label(), "seed": seed, "omega0": omega, "series": list})
                },
            )?;
            ok(format!("probe cauchy field={} seed={}", f.label(), seed), body)
        }
        Command::Compare { field, points, tol } => {
            let f = read_field(field)?;
            let res = compare_paths(&f, points, &tol.policy(), &trajectory_config())?;
            let failed = res.iter().any(|c| !c.pass());
            let body = render(
                format,
                || {
                    let mut t = Table::new(["x", "y", "z", "S_analytic", "S_fd", "S_trajectory", "max_dev", "pass"]);
                    for c in &res {
                        let mut row = vec_cells(&c.x).to_vec();
                        row.extend([
                            c.analytic.into(),
                            c.finite_difference.into(),
                            c.trajectory.into(),
                            c.max_dev().into(),
                            c.pass().into(),
                        ]);
                        t.push(row);
                    }
                    t
                },
                || json!({"field": f.label(), "points": res}),
            )?;
            let mut out = ok(format!("compare field={}", f.label()), body)?;
            if failed {
                out.notes.push("routes disagree beyond tolerance at some points".into());
            }
            Ok(out)
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" { SUITE_NAMES.to_vec() } else { vec![suite.as_str()] };
            let reports = names.iter().map(|n| run_suite(n)).collect::<Result<Vec<SuiteReport>, _>>()?;
            let body = render(
                format,
                || {
                    let mut t = Table::new([
                        "suite", "label", "point", "computed", "oracle", "abs_dev", "rel_dev", "pass", "asserted",
                    ]);
                    for r in &reports {
                        let rows = r.rows.iter().map(|c| (c, true)).chain(r.notes.iter().map(|c| (c, false)));
                        for (c, asserted) in rows {
                            let point: Vec<String> =
                                c.point.iter().map(|v| vortex_core::analyze::report::fmt_f64(*v)).collect();
                            t.push(vec![
                                r.name.clone().into(),
                                c.label.clone().into(),
                                point.join(";").into(),
                                c.computed.into(),
                                c.oracle.into(),
                                c.abs_dev.into(),
                                c.rel_dev.into(),
                                c.pass.into(),
                                asserted.into(),
                            ]);
                        }
                    }
                    t
                },
                || json!(reports),
            )?;
            let notes = reports
                .iter()
                .map(|r| {
                    format!(
                        "suite {}: {} ({} checks, max abs dev {:.3e}, max rel dev {:.3e})",
                        r.name,
                        if r.pass { "PASS" } else { "FAIL" },
                        r.rows.len(),
                        r.max_abs_dev,
                        r.max_rel_dev
                    )
                })
                .collect();
            Ok(Output {
                context: format!("verify {suite}"),
                body,
                notes,
                failed: reports.iter().any(|r| !r.pass),
            })
        }
        Command::Field { action: FieldAction::Check { field, count, lo, hi, rng_seed, fd_step } } => {
            let f = read_field(field)?;
            for k in 0..3 {
                if !(lo[k] <= hi[k]) {
                    return Err(CliError::Usage(format!("--lo must not exceed --hi on axis {k}")));
                }
            }
            let pts = sample_points(*rng_seed, *count, lo.0, hi.0);
            let rep = audit_field(&f, &pts, *fd_step)?;
            if rep.rows.is_empty() {
                return Err(CliError::Core(Error::Domain {
                    expr: format!("{} (no audit point inside the domain)", f.label()),
                }));
            }
            let body = render(
                format,
                || {
                    let mut t = Table::new(["x", "y", "z", "grad_rel", "hess_rel", "hess_asymmetry", "divergence"]);
                    for r in &rep.rows {
                        let mut row = vec_cells(&r.x).to_vec();
                        row.extend([
                            r.grad_rel.into(),
                            r.hess_rel.into(),
                            r.hess_asymmetry.into(),
                            r.divergence.into(),
                        ]);
                        t.push(row);
                    }
                    t
                },
                || json!(rep),
            )?;
            let summary = format!(
                "field {}: max grad rel {:.3e}, max hess rel {:.3e}, skipped {}",
                rep.field, rep.max_grad_rel, rep.max_hess_rel, rep.skipped
            );
            if !rep.pass {
                return Err(CliError::Numeric(format!("derivative audit failed: {summary}")));
            }
            let mut out = ok(format!("field check field={}", f.label()), body)?;
            out.notes.push(summary);
            Ok(out)
        }
    }
}
