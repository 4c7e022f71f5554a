//! Command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
//! or configuration errors, 3 on numerical failures. Reports go to the
//! output stream (or `--out`), diagnostics to the error stream.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cartan_munzner::{eigenmap_energy, verify_family};
use crate::catalog::{catalog, Family};
use crate::degree::{degree_closed_form, degree_numeric, harmonic_table};
use crate::error::{Error, Result};
use crate::profile::{solve_profile, ProfileOptions};
use crate::solution::{solution_report, RadialSolution};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const PROFILE_RESIDUAL_TOL: f64 = 1e-6;
const FAR_FIELD_TOL: f64 = 1e-3;
const PRECHECK_SAMPLES: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "isoparam", version, about = "Gradient maps of isoparametric polynomials and radial Ginzburg-Landau solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Seed of the sampling streams.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Sample count (degree: number of trials). Defaults depend on the command.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Pass tolerance (profile: corridor tolerance). Defaults depend on the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the sample loops.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Preimage,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long, default_value = "g4m1")]
    pub family: String,
    /// Replace the quartic by the non-isoparametric perturbation with this weight (g4m1 only).
    #[arg(long)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    /// Dimension `N`; defaults to the family's ambient dimension, otherwise 6.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Degree `k`; defaults to `g - 1` of the family, otherwise 3.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 50.0)]
    pub rmax: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the implemented families.
    Catalog,
    /// Check the Cartan-Münzner identities and harmonicity of the gradient map.
    Verify(#[command(flatten)] FamilyArgs),
    /// Brouwer degree of the gradient map.
    Degree {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Solve the radial profile equation.
    Profile {
        /// Take `N` and `k` from this family.
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        prof: ProfileArgs,
    },
    /// PDE residual and properties of the assembled radial solution.
    Residual {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        prof: ProfileArgs,
    },
    /// Full pipeline: identities, degree, profile and assembled solution.
    Report {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        prof: ProfileArgs,
    },
}

/// Result of a command: report text and whether all checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

/// Parse `args` (including the program name) and run; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    if cli.common.threads == 0 {
        let _ = writeln!(err, "error: --threads must be at least 1");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_NUMERICAL;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(outcome) => {
            let written = match &cli.common.out {
                Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write report: {e}");
                return EXIT_USAGE;
            }
            if outcome.pass {
                EXIT_PASS
            } else {
                let _ = writeln!(err, "check failed");
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        _ if e.is_numerical() => EXIT_NUMERICAL,
        Error::CorruptedFamily { .. } | Error::Inconsistency(_) | Error::RegularValue(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    match &cli.command {
        Command::Catalog => cmd_catalog(c),
        Command::Verify(fam) => cmd_verify(c, fam),
        Command::Degree { fam, method } => cmd_degree(c, fam, *method),
        Command::Profile { family, prof } => cmd_profile(c, family.as_deref(), prof),
        Command::Residual { fam, prof } => cmd_residual(c, fam, prof),
        Command::Report { fam, prof } => cmd_report(c, fam, prof),
    }
}

fn load_family(args: &FamilyArgs) -> Result<Family> {
    let fam = Family::parse(&args.family)?;
    match args.perturb {
        None => Ok(fam),
        Some(w) if fam.g == 4 && fam.m1 == 1 => Ok(Family::perturbed_quartic(w)),
        Some(_) => Err(Error::Config("--perturb applies to g4m1 only".into())),
    }
}

/// Reject families that fail the algebraic identities before running
/// computations that presuppose them.
fn precheck(fam: &Family, seed: u64) -> Result<()> {
    let rep = verify_family(fam, PRECHECK_SAMPLES, seed, 1e-9)?;
    if rep.algebraic_pass() {
        Ok(())
    } else {
        Err(Error::Inconsistency(format!(
            "{} violates the isoparametric identities (gradient-norm residual {:e})",
            fam.label(),
            rep.residuals.eq11
        )))
    }
}

fn format_or(c: &Common, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = c.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Error::Config(format!("format {f:?} is not available for this command").to_lowercase()))
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Pretty JSON of `report` with the resolved configuration attached.
fn json_with_config(mut report: Value, config: Value) -> String {
    if let Value::Object(map) = &mut report {
        map.insert("config".into(), config);
    }
    let mut s = serde_json::to_string_pretty(&report).expect("values serialize");
    s.push('\n');
    s
}

fn cmd_catalog(c: &Common) -> Result<Outcome> {
    let format = format_or(c, Format::Json, &[Format::Json, Format::Table])?;
    let rows: Vec<Value> = catalog()
        .iter()
        .map(|f| {
            Ok(json!({
                "id": f.id.to_string(),
                "g": f.g,
                "m1": f.m1,
                "m2": f.m2,
                "ambient_dim": f.d,
                "sphere_dim": f.sphere_dim(),
                "degree": degree_closed_form(f.g, f.m1, f.m2)?,
                "energy_density": eigenmap_energy(f.g - 1, f.d),
            }))
        })
        .collect::<Result<_>>()?;
    let text = match format {
        Format::Table => {
            let mut s = String::from("family  g  m1  m2  R^d  degree  energy\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:<7} {:>2} {:>3} {:>3} {:>4} {:>7} {:>7}",
                    r["id"].as_str().unwrap_or_default(),
                    r["g"].to_string(),
                    r["m1"].to_string(),
                    r["m2"].to_string(),
                    r["ambient_dim"].to_string(),
                    r["degree"].to_string(),
                    r["energy_density"].to_string()
                );
            }
            s
        }
        _ => json_with_config(json!({ "families": rows }), json!({ "format": "json" })),
    };
    Ok(Outcome { text, pass: true })
}

fn cmd_verify(c: &Common, args: &FamilyArgs) -> Result<Outcome> {
    let format = format_or(c, Format::Json, &[Format::Json, Format::Table])?;
    let fam = load_family(args)?;
    let samples = c.samples.unwrap_or(1000);
    let tol = c.tol.unwrap_or(1e-9);
    let rep = verify_family(&fam, samples, c.seed, tol)?;
    let text = match format {
        Format::Table => {
            let r = &rep.residuals;
            format!(
                "family {}  seed {}  samples {}  tol {:e}\neuler {:.3e}\neq11 {:.3e}\neq12 {:.3e}\nharmonicity {:.3e} (tol {:e})\nenergy spread {:.3e} (tol {:e}), mean {:.9}\n{}\n",
                rep.family,
                rep.seed,
                rep.samples,
                rep.tol,
                r.euler,
                r.eq11,
                r.eq12,
                r.harmonicity,
                rep.fd_tol.harmonicity,
                r.energy,
                rep.fd_tol.energy,
                rep.energy_density,
                if rep.pass { "PASS" } else { "FAIL" }
            )
        }
        _ => json_with_config(
            to_json(&rep),
            json!({ "command": "verify", "family": args.family, "perturb": args.perturb,
                    "seed": c.seed, "samples": samples, "tol": tol, "threads": c.threads }),
        ),
    };
    Ok(Outcome { text, pass: rep.pass })
}

fn cmd_degree(c: &Common, args: &FamilyArgs, method: Method) -> Result<Outcome> {
    let format = format_or(c, Format::Json, &[Format::Json, Format::Table])?;
    let trials = c.samples.unwrap_or(20);
    if format == Format::Table {
        return degree_table(c.seed, trials);
    }
    let fam = load_family(args)?;
    let config = json!({ "command": "degree", "family": args.family, "perturb": args.perturb,
                         "method": method, "seed": c.seed, "trials": trials, "threads": c.threads });
    let closed = degree_closed_form(fam.g, fam.m1, fam.m2)?;
    if method != Method::ClosedForm {
        precheck(&fam, c.seed)?;
    }
    let (report, pass) = match method {
        Method::ClosedForm => (
            json!({ "family": fam.label(), "g": fam.g, "m1": fam.m1, "m2": fam.m2, "degree_closed_form": closed }),
            true,
        ),
        Method::Preimage | Method::Both => {
            let rep = degree_numeric(&fam, c.seed, trials)?;
            let pass = rep.signs_agree && (method == Method::Preimage || rep.agree);
            let mut v = to_json(&rep);
            if method == Method::Preimage {
                if let Value::Object(map) = &mut v {
                    map.remove("degree_closed_form");
                    map.remove("agree");
                }
            }
            (v, pass)
        }
    };
    Ok(Outcome {
        text: json_with_config(report, config),
        pass,
    })
}

fn degree_table(seed: u64, trials: usize) -> Result<Outcome> {
    let mut text = String::from(" g  m  degree  status\n");
    let mut pass = true;
    for row in harmonic_table() {
        let status = match &row.family {
            Some(id) => {
                let rep = degree_numeric(&Family::parse(id)?, seed, trials)?;
                if rep.degree_numeric == row.degree && rep.signs_agree {
                    format!("verified ({id}, {trials} trials)")
                } else {
                    pass = false;
                    format!("MISMATCH ({id}: numeric {})", rep.degree_numeric)
                }
            }
            None => "closed-form only".to_string(),
        };
        let _ = writeln!(text, "{:>2} {:>2} {:>7}  {status}", row.g, row.m, row.degree);
    }
    Ok(Outcome { text, pass })
}

fn profile_options(c: &Common, prof: &ProfileArgs) -> ProfileOptions {
    ProfileOptions {
        r_max: prof.rmax,
        tol: c.tol.unwrap_or(ProfileOptions::default().tol),
        ..ProfileOptions::default()
    }
}

fn cmd_profile(c: &Common, family: Option<&str>, prof: &ProfileArgs) -> Result<Outcome> {
    let format = format_or(c, Format::Csv, &[Format::Csv, Format::Json])?;
    let (n0, k0) = match family {
        Some(id) => {
            let f = Family::parse(id)?;
            (f.d, f.g - 1)
        }
        None => (6, 3),
    };
    let (n, k) = (prof.n.unwrap_or(n0), prof.k.unwrap_or(k0));
    let opts = profile_options(c, prof);
    let p = solve_profile(n, k, &opts)?;
    let meta = p.meta()?;
    let pass = meta.converged
        && meta.monotone
        && meta.in_corridor
        && meta.residual_sup <= PROFILE_RESIDUAL_TOL
        && meta.far_field_error <= FAR_FIELD_TOL;
    let text = match format {
        Format::Csv => p.to_csv(),
        _ => json_with_config(
            to_json(&meta),
            json!({ "command": "profile", "N": n, "k": k, "options": opts,
                    "residual_tol": PROFILE_RESIDUAL_TOL, "far_field_tol": FAR_FIELD_TOL }),
        ),
    };
    Ok(Outcome { text, pass })
}

/// Assembled solution; an explicit `--N`/`--k` that does not match the
/// family skips the compatibility checks so the mismatch shows in the residual.
fn build_solution(c: &Common, args: &FamilyArgs, prof: &ProfileArgs) -> Result<RadialSolution> {
    let fam = load_family(args)?;
    precheck(&fam, c.seed)?;
    let (n, k) = (prof.n.unwrap_or(fam.d), prof.k.unwrap_or(fam.g - 1));
    let p = solve_profile(n, k, &profile_options(c, prof))?;
    if n == fam.d && k + 1 == fam.g && !fam.is_perturbed() {
        RadialSolution::new(fam, p)
    } else {
        RadialSolution::unchecked(fam, p)
    }
}

fn solution_config(c: &Common, args: &FamilyArgs, prof: &ProfileArgs, sol: &RadialSolution, samples: usize) -> Value {
    json!({ "family": args.family, "perturb": args.perturb, "N": sol.profile.n, "k": sol.profile.k,
            "rmax": prof.rmax, "seed": c.seed, "samples": samples, "threads": c.threads,
            "profile_options": sol.profile.options })
}

fn cmd_residual(c: &Common, args: &FamilyArgs, prof: &ProfileArgs) -> Result<Outcome> {
    let format = format_or(c, Format::Json, &[Format::Json, Format::Table])?;
    let sol = build_solution(c, args, prof)?;
    let samples = c.samples.unwrap_or(100);
    let rep = solution_report(&sol, c.seed, samples)?;
    let text = match format {
        Format::Table => format!(
            "family {}  N {}  k {}\ndegree {}\nmax PDE residual {:.3e} (tol {:e}, step {:e})\nstep ratios {:?}\nmonotone modulus {}\nwitness pair {}\nisometric to trivial {}\n{}\n",
            rep.family,
            rep.n,
            rep.k,
            rep.degree,
            rep.max_pde_residual,
            rep.tol,
            rep.fd_step,
            rep.step_scaling.ratios,
            rep.monotone_modulus,
            rep.witness.found(),
            rep.isometric_to_trivial,
            if rep.pass { "PASS" } else { "FAIL" }
        ),
        _ => {
            let mut config = solution_config(c, args, prof, &sol, samples);
            config["command"] = json!("residual");
            json_with_config(to_json(&rep), config)
        }
    };
    Ok(Outcome { text, pass: rep.pass })
}

fn cmd_report(c: &Common, args: &FamilyArgs, prof: &ProfileArgs) -> Result<Outcome> {
    format_or(c, Format::Json, &[Format::Json])?;
    let fam = load_family(args)?;
    precheck(&fam, c.seed)?;
    let verify = verify_family(&fam, 1000, c.seed, c.tol.unwrap_or(1e-9))?;
    let degree = degree_numeric(&fam, c.seed, 20)?;
    let sol = build_solution(c, args, prof)?;
    let samples = c.samples.unwrap_or(100);
    let solution = solution_report(&sol, c.seed, samples)?;
    let pass = verify.pass && degree.agree && degree.signs_agree && solution.pass && solution.counterexample;
    let mut config = solution_config(c, args, prof, &sol, samples);
    config["command"] = json!("report");
    config["verify_samples"] = json!(1000);
    config["verify_tol"] = json!(verify.tol);
    config["degree_trials"] = json!(20);
    let report = json!({
        "family": fam.label(),
        "pass": pass,
        "verify": to_json(&verify),
        "degree": to_json(&degree),
        "solution": to_json(&solution),
    });
    Ok(Outcome {
        text: json_with_config(report, config),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["isoparam"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code(&Error::Stiffness { r: 1.0 }), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::CorruptedFamily { s: 2.0 }), EXIT_CHECK_FAILED);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["degree", "--family", "g9m1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["catalog", "--format", "csv"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--family", "g3m1", "--perturb", "1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["catalog", "--threads", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["degree", "--family", "g4m1", "--perturb", "2.1"]).0, EXIT_CHECK_FAILED);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("residual"));
    }

    #[test]
    fn catalog_lists_families() {
        let (code, out, _) = run_args(&["catalog"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let ids: Vec<&str> = v["families"].as_array().unwrap().iter().map(|f| f["id"].as_str().unwrap()).collect();
        assert_eq!(ids, ["g2:1", "g3m1", "g4m1", "g6m1"]);
    }

    #[test]
    fn closed_form_degree() {
        let (code, out, _) = run_args(&["degree", "--family", "g2:2", "--method", "closed-form"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["degree_closed_form"], -1);
        assert_eq!(v["config"]["method"], "closed-form");
    }
}
