//! `maasslab` command-line front end.

mod args;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use maasslab::forms::{self, SeriesEvaluator, SeriesKind, SeriesParams};
use maasslab::holproj::{project_series, ProjectionRequest};
use maasslab::qforms::{enumerate_forms, HPoint, TruncationPolicy};
use maasslab::specfun::Weight;
use maasslab::verify::{all_passed, render_table, run_suite, IdentityId, SamplePlan, VerificationReport};
use maasslab::{Complex, Error};

use args::{Cli, Command, EvalObject, Format, SeriesArgs};
use output::{Emitter, Table};

/// Exit status of a run.
enum Status {
    Ok,
    Failed,
    Usage,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let status = match run(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage(&e) {
                Status::Usage
            } else {
                Status::Failed
            }
        }
    };
    ExitCode::from(match status {
        Status::Ok => 0,
        Status::Failed => 1,
        Status::Usage => 2,
    })
}

/// Errors caused by the arguments rather than by the computation.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidPoint(_)
            | Error::InvalidWeight(_)
            | Error::Domain { .. }
            | Error::DiscriminantRange(_)
            | Error::NotUnimodular(..)
            | Error::NotInGamma04(_)
            | Error::Invalid(_)
    )
}

fn run(cli: &Cli) -> maasslab::Result<Status> {
    let out = Emitter::new(cli.output.clone());
    match &cli.command {
        Command::Enumerate { d, bx, format } => {
            let forms = enumerate_forms(*d, &bx.0);
            match format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut t = Table::new(&["a", "b", "c"]);
                    for q in &forms {
                        t.row(&[q.a.to_string(), q.b.to_string(), q.c.to_string()]);
                    }
                    out.emit(&t.to_csv()?)?;
                }
                _ => {
                    let rows: Vec<[i64; 3]> = forms.iter().map(|q| [q.a, q.b, q.c]).collect();
                    out.emit(&output::json_string(&json!(rows))?)?;
                }
            }
            Ok(Status::Ok)
        }
        Command::Eval { object, series, format } => {
            let p = series.params()?;
            let tau = series.tau;
            let z = series.z;
            let d = series.d;
            let value = match object {
                EvalObject::FD => forms::f_d(&tau, need_d(d)?, &p)?,
                EvalObject::BigFD => forms::big_f_d(&tau, need_d(d)?, &p)?,
                EvalObject::GD => forms::g_d(series.v.unwrap_or(z.im), &tau, need_d(d)?, &p)?,
                EvalObject::Omega => forms::omega(&tau, &z, &p)?,
                EvalObject::Psi => forms::psi(&tau, &z, &p)?,
                EvalObject::PsiStar => forms::psi_star(&tau, &z, &p)?,
                EvalObject::PsiHat => forms::psi_hat_def(&tau, &z, &p)?,
                EvalObject::PsiHatSplit => forms::psi_hat_split(&tau, &z, &p)?,
                EvalObject::Psi1 => forms::psi1(&tau, &z, &p)?,
                EvalObject::Psi2 => forms::psi2(&tau, &z, &p)?,
                EvalObject::Psi3 => forms::psi3(&tau, &z, &p)?,
                EvalObject::Theta => forms::theta(&tau, &z, &p)?,
                EvalObject::ThetaStar => forms::theta_star(&tau, &z, &p)?,
            };
            match format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut t = Table::new(&["object", "re", "im", "tail_bound"]);
                    t.row(&[object.name().into(), fmt(value.value.re), fmt(value.value.im), fmt(value.tail_bound)]);
                    out.emit(&t.to_csv()?)?;
                }
                Format::Table => out.emit(&format!(
                    "{} = {} {:+} i   (tail ≤ {:e})\n",
                    object.name(),
                    value.value.re,
                    value.value.im,
                    value.tail_bound
                ))?,
                Format::Json => out.emit(&output::json_string(&json!({
                    "schema": output::SCHEMA,
                    "command": "eval",
                    "config": json!({ "object": object.name(), "series": series }),
                    "value": complex_json(value.value),
                    "tail_bound": value.tail_bound,
                }))?)?,
            }
            Ok(Status::Ok)
        }
        Command::Coeffs { object, series, format } => {
            let kind = series_kind(*object)?;
            let p = series.params()?;
            let v = series.v.unwrap_or(series.z.im);
            let centre = HPoint::new(0.0, v)?;
            let ev = SeriesEvaluator::new(kind, p, series.tau, centre)?;
            let coeffs: Vec<(i64, Complex)> = ev
                .coefficients(&series.tau, v)
                .into_iter()
                .filter(|(d, _)| d.unsigned_abs() <= u64::from(p.policy.d_max))
                .collect();
            match format.unwrap_or(Format::Json) {
                Format::Json => out.emit(&output::json_string(&json!({
                    "schema": output::SCHEMA,
                    "command": "coeffs",
                    "config": json!({ "object": object.name(), "series": series, "v": v }),
                    "tail_bound": ev.tail_bound(),
                    "coefficients": coeffs.iter().map(|(d, c)| json!({ "D": d, "re": c.re, "im": c.im })).collect::<Vec<_>>(),
                }))?)?,
                _ => out.emit(&coefficient_table(&coeffs).to_csv()?)?,
            }
            Ok(Status::Ok)
        }
        Command::Holproj { object, weight, series, format } => {
            let kind = series_kind(*object)?;
            let p = series.params()?;
            let d_list: Vec<i64> = match series.d {
                Some(d) => vec![d],
                None => (1..=i64::from(p.policy.d_max)).filter(|d| d % 4 <= 1).collect(),
            };
            let kappa = weight.unwrap_or(p.k.as_f64() + 0.5);
            // the projection integrates c_D(v) over all v > 0; the Ψ₂ forms keep the truncation valid there
            let ev = SeriesEvaluator::for_coefficients(&[kind, SeriesKind::Psi2], p, series.tau, 1.0, &d_list)?
                .with_kind(kind);
            let proj = project_series(&ev, &ProjectionRequest::new(kappa, d_list.clone()))?;
            let coeffs: Vec<(i64, Complex)> = d_list.iter().map(|&d| (d, proj.get(d))).collect();
            match format.unwrap_or(Format::Json) {
                Format::Json => out.emit(&output::json_string(&json!({
                    "schema": output::SCHEMA,
                    "command": "holproj",
                    "config": json!({ "object": object.name(), "weight": kappa, "series": series }),
                    "tail_bound": ev.tail_bound(),
                    "coefficients": coeffs.iter().map(|(d, c)| json!({ "D": d, "re": c.re, "im": c.im })).collect::<Vec<_>>(),
                    "value_at_z": complex_json(proj.eval(&series.z)),
                }))?)?,
                _ => out.emit(&coefficient_table(&coeffs).to_csv()?)?,
            }
            Ok(Status::Ok)
        }
        Command::Verify { ids, plan, format } => {
            let ids: Vec<IdentityId> = ids.iter().map(|s| s.parse()).collect::<maasslab::Result<_>>()?;
            let sample = plan.build(&ids)?;
            verification(&out, "verify", &ids, &sample, plan, format.unwrap_or(Format::Table))
        }
        Command::Suite { plan, format } => {
            let ids = IdentityId::ALL.to_vec();
            let sample = plan.build(&ids)?;
            verification(&out, "suite", &ids, &sample, plan, format.unwrap_or(Format::Table))
        }
    }
}

fn verification(
    out: &Emitter,
    command: &str,
    ids: &[IdentityId],
    plan: &SamplePlan,
    echo: &args::PlanArgs,
    format: Format,
) -> maasslab::Result<Status> {
    let start = Instant::now();
    let reports = run_suite(ids, plan);
    let wall = start.elapsed().as_secs_f64();
    let pass = all_passed(&reports);
    match format {
        Format::Table => {
            let mut s = render_table(&reports);
            for r in &reports {
                for n in &r.notes {
                    s.push_str(&format!("{}: {n}\n", r.id));
                }
            }
            s.push_str(&format!("{} identities, {} in {wall:.1} s\n", reports.len(), if pass { "all pass" } else { "FAILED" }));
            out.emit(&s)?;
        }
        Format::Json => out.emit(&output::json_string(&json!({
            "schema": output::SCHEMA,
            "command": command,
            "config": echo,
            "seed": plan.seed,
            "pass": pass,
            "wall_time_s": wall,
            "reports": reports,
        }))?)?,
        Format::Csv => out.emit(&report_table(&reports).to_csv()?)?,
    }
    Ok(if pass { Status::Ok } else { Status::Failed })
}

fn report_table(reports: &[VerificationReport]) -> Table {
    let mut t = Table::new(&["id", "point", "abs_error", "rel_error", "error", "tolerance", "verdict", "failure"]);
    for r in reports {
        for p in &r.points {
            let tol = p.tolerance.unwrap_or(r.tolerance);
            let ok = p.failure.is_none() && p.error <= tol;
            t.row(&[
                r.id.name().into(),
                p.label.clone(),
                fmt(p.abs_error),
                fmt(p.rel_error),
                fmt(p.error),
                fmt(tol),
                (if ok { "pass" } else { "fail" }).into(),
                p.failure.clone().unwrap_or_default(),
            ]);
        }
    }
    t
}

fn coefficient_table(coeffs: &[(i64, Complex)]) -> Table {
    let mut t = Table::new(&["D", "re", "im"]);
    for (d, c) in coeffs {
        t.row(&[d.to_string(), fmt(c.re), fmt(c.im)]);
    }
    t
}

fn need_d(d: Option<i64>) -> maasslab::Result<i64> {
    d.ok_or_else(|| Error::Invalid("this object needs --D".into()))
}

fn series_kind(object: EvalObject) -> maasslab::Result<SeriesKind> {
    object
        .series_kind()
        .ok_or_else(|| Error::Invalid(format!("{} is not a series in z", object.name())))
}

fn complex_json(c: Complex) -> Value {
    json!({ "re": c.re, "im": c.im })
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

impl SeriesArgs {
    fn params(&self) -> maasslab::Result<SeriesParams> {
        let k = Weight::new(self.k)?;
        let mut policy = TruncationPolicy::default().with_d_max(self.d_max).with_tail_target(self.tail_target);
        if let Some(bx) = self.bx {
            policy.bx = bx.0;
        }
        TruncationPolicy::new(policy.bx, policy.d_max, policy.tail_target)?;
        Ok(SeriesParams { k, policy, tau0: self.tau0 })
    }
}
