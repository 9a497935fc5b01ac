use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use maasslab::forms::SeriesKind;
use maasslab::qforms::{EnumerationBox, HPoint, TruncationPolicy};
use maasslab::specfun::Weight;
use maasslab::verify::{IdentityId, SamplePlan};

#[derive(Parser, Debug)]
#[command(name = "maasslab", version, about = "Evaluate and check locally harmonic Maass forms and their generating function")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "MAASSLAB_THREADS")]
    pub threads: Option<usize>,

    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the forms of discriminant D inside a box.
    Enumerate {
        #[arg(allow_hyphen_values = true)]
        d: i64,
        /// a_max,n_max,c_max.
        #[arg(long = "box", default_value = "3,3,3", value_parser = parse_box)]
        bx: BoxArg,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Evaluate one object at a point.
    Eval {
        #[arg(value_enum)]
        object: EvalObject,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Fourier coefficients c_D(τ, v) of a series in z.
    Coeffs {
        #[arg(value_enum)]
        object: EvalObject,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Holomorphic projection of a series in z.
    Holproj {
        #[arg(value_enum)]
        object: EvalObject,
        /// Projection weight κ (defaults to k + 1/2).
        #[arg(long)]
        weight: Option<f64>,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the listed identities.
    Verify {
        #[arg(required = true, value_parser = parse_id)]
        ids: Vec<String>,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run every identity.
    Suite {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum EvalObject {
    #[value(name = "fD")]
    FD,
    #[value(name = "FD")]
    BigFD,
    #[value(name = "GD")]
    GD,
    #[value(name = "omega")]
    Omega,
    #[value(name = "psi")]
    Psi,
    #[value(name = "psistar")]
    PsiStar,
    #[value(name = "psihat")]
    PsiHat,
    #[value(name = "psihat_split")]
    PsiHatSplit,
    #[value(name = "psi1")]
    Psi1,
    #[value(name = "psi2")]
    Psi2,
    #[value(name = "psi3")]
    Psi3,
    #[value(name = "theta")]
    Theta,
    #[value(name = "thetastar")]
    ThetaStar,
}

impl EvalObject {
    pub fn name(self) -> &'static str {
        match self {
            EvalObject::FD => "fD",
            EvalObject::BigFD => "FD",
            EvalObject::GD => "GD",
            other => other.series_kind().map(|k| k.name()).unwrap_or("?"),
        }
    }

    pub fn series_kind(self) -> Option<SeriesKind> {
        Some(match self {
            EvalObject::FD | EvalObject::BigFD | EvalObject::GD => return None,
            EvalObject::Omega => SeriesKind::Omega,
            EvalObject::Psi => SeriesKind::Psi,
            EvalObject::PsiStar => SeriesKind::PsiStar,
            EvalObject::PsiHat => SeriesKind::PsiHatDef,
            EvalObject::PsiHatSplit => SeriesKind::PsiHatSplit,
            EvalObject::Psi1 => SeriesKind::Psi1,
            EvalObject::Psi2 => SeriesKind::Psi2,
            EvalObject::Psi3 => SeriesKind::Psi3,
            EvalObject::Theta => SeriesKind::Theta,
            EvalObject::ThetaStar => SeriesKind::ThetaStar,
        })
    }
}

/// Point and truncation flags shared by the evaluation commands.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SeriesArgs {
    /// Even weight k ≥ 4.
    #[arg(long, default_value_t = 4)]
    pub k: i64,
    /// Discriminant, for fD, FD, GD, or a single projected coefficient.
    #[arg(long = "D", allow_hyphen_values = true)]
    #[serde(rename = "D")]
    pub d: Option<i64>,
    /// τ as x+yi.
    #[arg(long, default_value = "0+1i", value_parser = parse_point)]
    #[serde(serialize_with = "ser_point")]
    pub tau: HPoint,
    /// z as u+vi.
    #[arg(long, default_value = "0+1i", value_parser = parse_point)]
    #[serde(serialize_with = "ser_point")]
    pub z: HPoint,
    /// v for GD and coeffs (defaults to Im z).
    #[arg(long)]
    pub v: Option<f64>,
    /// Base point τ₀ of Ψ₁, Ψ₂, Ψ₃.
    #[arg(long, default_value = "0+2i", value_parser = parse_point)]
    #[serde(serialize_with = "ser_point")]
    pub tau0: HPoint,
    #[arg(long, default_value_t = 20)]
    pub d_max: u32,
    #[arg(long, default_value_t = 1e-8)]
    pub tail_target: f64,
    /// Minimal enumeration window a_max,n_max,c_max.
    #[arg(long = "box", value_parser = parse_box)]
    #[serde(rename = "box")]
    pub bx: Option<BoxArg>,
}

/// Flags of `verify` and `suite`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct PlanArgs {
    /// Weight of the main checks.
    #[arg(long, default_value_t = 4)]
    pub k: i64,
    #[arg(long, default_value_t = 20)]
    pub d_max: u32,
    #[arg(long, default_value_t = 1e-8)]
    pub tail_target: f64,
    /// Tolerance for every selected identity (defaults per identity).
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value_t = 20_240_101)]
    pub seed: u64,
}

impl PlanArgs {
    pub fn build(&self, ids: &[IdentityId]) -> maasslab::Result<SamplePlan> {
        let mut plan = SamplePlan::seeded(self.seed);
        plan.k_list = vec![Weight::new(self.k)?];
        plan.policy = TruncationPolicy::new(plan.policy.bx, self.d_max, self.tail_target)?;
        if let Some(tol) = self.tolerance {
            if !(tol >= 0.0) {
                return Err(maasslab::Error::Invalid(format!("tolerance {tol} must be nonnegative")));
            }
            for &id in ids {
                plan.tolerances.insert(id, tol);
            }
        }
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxArg(pub EnumerationBox);

impl Serialize for BoxArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.a_max, self.0.n_max, self.0.c_max].serialize(s)
    }
}

fn ser_point<S: serde::Serializer>(p: &HPoint, s: S) -> Result<S::Ok, S::Error> {
    format_point(p).serialize(s)
}

pub fn format_point(p: &HPoint) -> String {
    format!("{}{:+}i", p.re, p.im)
}

fn parse_box(s: &str) -> Result<BoxArg, String> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, n, c] => EnumerationBox::new(a, n, c).map(BoxArg).map_err(|e| e.to_string()),
        _ => Err("expected a_max,n_max,c_max".into()),
    }
}

fn parse_id(s: &str) -> Result<String, String> {
    s.parse::<IdentityId>().map(|id| id.name().to_string()).map_err(|e| e.to_string())
}

/// Parses `x+yi`, `x-yi`, `yi` or `i`.
pub fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("{s:?} is not of the form x+yi");
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|x| (x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok((re.parse::<f64>().map_err(|_| bad())?, im))
}

fn parse_point(s: &str) -> Result<HPoint, String> {
    let (re, im) = parse_complex(s)?;
    HPoint::new(re, im).map_err(|_| format!("{s:?} is not in the upper half-plane"))
}
