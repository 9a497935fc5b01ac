//! Acceptance criteria for `k = 4`, `d_max = 20`, tail target `1e-8`.
//! Prints one line per criterion and exits nonzero if any fails.

use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use maasslab::qforms::{enumerate_forms, EnumerationBox, QuadForm, TruncationPolicy};
use maasslab::verify::{run_identity, IdentityId, SamplePlan, VerificationReport};

const K: i64 = 4;
const D_MAX: u32 = 20;
const TAIL: f64 = 1e-8;

const REWRITE_TOL: f64 = 1e-6;
const REWRITE_TIME: Duration = Duration::from_secs(5 * 60);
const LOWER_Z_TOL: f64 = 1e-5;
const LOWER_TAU_TOL: f64 = 1e-4;
const MODULARITY_TOL: f64 = 1e-4;
const PROJ_ZERO_TOL: f64 = 1e-5;
const VIGNERAS_TOL: f64 = 1e-5;
const ERF_TOL: f64 = 1e-12;
const GK_TOL: f64 = 1e-8;
const LIPSCHITZ_TOL: f64 = 1e-8;
const Q_REWRITE_TOL: f64 = 1e-12;
const LAPLACIAN_TOL: f64 = 1e-4;
const SUITE_TIME: Duration = Duration::from_secs(30 * 60);

fn plan(pins: &[(IdentityId, f64)]) -> SamplePlan {
    let mut plan = SamplePlan::default();
    plan.k_list = vec![maasslab::specfun::Weight::new(K).unwrap()];
    plan.policy = TruncationPolicy::default().with_d_max(D_MAX).with_tail_target(TAIL);
    plan.tolerances.extend(pins.iter().copied());
    plan
}

/// Runs identities with pinned tolerances; the criterion holds if every report passes
/// and has at least `min_points` sample points.
fn identities(pins: &[(IdentityId, f64)], min_points: usize) -> (bool, String) {
    let plan = plan(pins);
    let reports: Vec<VerificationReport> = pins.iter().map(|(id, _)| run_identity(*id, &plan)).collect();
    let ok = reports.iter().all(|r| r.passed() && r.points.len() >= min_points);
    let detail = reports
        .iter()
        .map(|r| format!("{} max {:.2e} / tol {:.0e} ({} pts)", r.id, r.max_error, r.tolerance, r.points.len()))
        .collect::<Vec<_>>()
        .join("; ");
    (ok, detail)
}

fn criterion_1() -> (bool, String) {
    let start = Instant::now();
    let (ok, detail) = identities(&[(IdentityId::LemRewrite, REWRITE_TOL)], 5);
    let t = start.elapsed();
    (ok && t <= REWRITE_TIME, format!("{detail}; {:.1} s", t.as_secs_f64()))
}

fn criterion_2() -> (bool, String) {
    let h_ok = SamplePlan::default().scheme.h == 1e-4;
    let (ok, detail) = identities(&[(IdentityId::Thm2LowerZ, LOWER_Z_TOL)], 3);
    (ok && h_ok, format!("{detail}; h = {:e}", SamplePlan::default().scheme.h))
}

fn criterion_3() -> (bool, String) {
    identities(&[(IdentityId::Thm2LowerTau, LOWER_TAU_TOL)], 3)
}

fn criterion_4() -> (bool, String) {
    let (z_ok, z) = identities(&[(IdentityId::Thm1ZModularity, MODULARITY_TOL)], 9);
    let (t_ok, t) = identities(&[(IdentityId::Thm1TauModularity, MODULARITY_TOL)], 6);
    (z_ok && t_ok, format!("{z}; {t}"))
}

fn criterion_5() -> (bool, String) {
    identities(&[(IdentityId::LemProjZero, PROJ_ZERO_TOL)], 1)
}

fn criterion_6() -> (bool, String) {
    // 20 lattice points for each of k = 4 and k = 6
    identities(&[(IdentityId::VignerasTheta, VIGNERAS_TOL), (IdentityId::VignerasThetastar, VIGNERAS_TOL)], 40)
}

fn criterion_7() -> (bool, String) {
    let (a, da) = identities(&[(IdentityId::ErfRewrite, ERF_TOL)], 100);
    let (b, db) = identities(&[(IdentityId::LemGkClosed, GK_TOL)], 20);
    let (c, dc) = identities(&[(IdentityId::Lipschitz, LIPSCHITZ_TOL)], 2);
    (a && b && c, format!("{da}; {db}; {dc}"))
}

fn criterion_8() -> (bool, String) {
    identities(
        &[
            (IdentityId::QRewrite, Q_REWRITE_TOL),
            (IdentityId::QPosdef, 0.0),
            (IdentityId::SgnConstancy, 0.0),
            (IdentityId::BilinearTable, 0.0),
        ],
        1,
    )
}

fn criterion_9() -> (bool, String) {
    identities(&[(IdentityId::LaplacianLocalHarmonic, LAPLACIAN_TOL)], 6)
}

/// Box membership, tested form by form: `|a| ≤ a_max` and `b` within `n_max` translates of
/// `0 ≤ b < 2|a|`, or `a = 0` and `|c| ≤ c_max`.
fn in_box(a: i64, b: i64, c: i64, bx: &EnumerationBox) -> bool {
    if a == 0 {
        return c.abs() <= i64::from(bx.c_max);
    }
    if a.abs() > i64::from(bx.a_max) {
        return false;
    }
    let m = 2 * a.abs();
    ((b - b.rem_euclid(m)) / m).abs() <= i64::from(bx.n_max)
}

/// Forms in the box for every `|d| ≤ d_abs`, indexed by `d + d_abs`, by a triple loop.
fn brute_force(bx: &EnumerationBox, d_abs: i64) -> Vec<Vec<QuadForm>> {
    let a_max = i64::from(bx.a_max);
    let b_max = (2 * a_max * (i64::from(bx.n_max) + 1)).max((d_abs as f64).sqrt().ceil() as i64);
    let c_lim = (b_max * b_max + d_abs) / 4 + i64::from(bx.c_max);
    let mut out = vec![Vec::new(); (2 * d_abs + 1) as usize];
    for a in -a_max..=a_max {
        for b in -b_max..=b_max {
            for c in -c_lim..=c_lim {
                let d = b * b - 4 * a * c;
                if d.abs() <= d_abs && (a, b, c) != (0, 0, 0) && in_box(a, b, c, bx) {
                    out[(d + d_abs) as usize].push(QuadForm { a, b, c });
                }
            }
        }
    }
    for v in &mut out {
        v.sort_by_key(|q| (q.a.abs(), q.a, q.b, q.c));
    }
    out
}

fn criterion_10() -> (bool, String) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for a in 1..=5 {
        for n in 1..=5 {
            for c in 1..=5 {
                let bx = EnumerationBox { a_max: a, n_max: n, c_max: c };
                let brute = brute_force(&bx, 25);
                for d in -25..=25i64 {
                    if enumerate_forms(d, &bx) != brute[(d + 25) as usize] && bad.len() < 3 {
                        bad.push(format!("D={d} box=({a},{n},{c})"));
                    }
                    checked += 1;
                }
            }
        }
    }
    let fixtures: serde_json::Value =
        serde_json::from_str(include_str!("../../core/tests/fixtures/golden.json")).expect("fixture parses");
    let mut regenerated = 0;
    for fx in fixtures["enumerate"].as_array().unwrap() {
        let d = fx["d"].as_i64().unwrap();
        let b: Vec<String> = fx["box"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
        let out = Command::new(env!("CARGO_BIN_EXE_maasslab"))
            .args(["enumerate", &d.to_string(), "--box", &b.join(","), "--format", "json"])
            .output()
            .expect("binary runs");
        let got: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
        if got == fx["forms"] {
            regenerated += 1;
        } else {
            bad.push(format!("fixture D={d}"));
        }
    }
    (
        bad.is_empty(),
        format!("{checked} (D, box) cases against brute force, {regenerated} fixtures regenerated{}", if bad.is_empty() {
            String::new()
        } else {
            format!("; mismatches: {}", bad.join(", "))
        }),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let suite = Command::new(env!("CARGO_BIN_EXE_maasslab"))
        .args(["suite", "--k", &K.to_string(), "--d-max", &D_MAX.to_string(), "--tail-target", &TAIL.to_string()])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("suite starts");

    let criteria: [(&str, fn() -> (bool, String)); 10] = [
        ("1 definition route = split route", criterion_1),
        ("2 z-lowering gives Θ", criterion_2),
        ("3 τ-lowering gives Ω and Θ*", criterion_3),
        ("4 modularity in z and τ", criterion_4),
        ("5 holomorphic projection vanishes", criterion_5),
        ("6 Vignéras equation", criterion_6),
        ("7 special functions", criterion_7),
        ("8 structural identities", criterion_8),
        ("9 local harmonicity", criterion_9),
        ("10 enumeration and fixtures", criterion_10),
    ];
    let mut all = true;
    for (name, check) in criteria {
        let (ok, detail) = check();
        all &= ok;
        println!("[{}] criterion {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }

    let out = suite.wait_with_output().expect("suite finishes");
    let t = start.elapsed();
    let ok = out.status.code() == Some(0) && t <= SUITE_TIME;
    all &= ok;
    println!(
        "[{}] criterion 11 full suite: exit {:?}, {:.1} s",
        if ok { "PASS" } else { "FAIL" },
        out.status.code(),
        t.as_secs_f64()
    );
    if !ok {
        print!("{}", String::from_utf8_lossy(&out.stdout));
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
