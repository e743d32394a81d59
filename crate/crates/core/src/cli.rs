//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 the solver could not certify
//! (numerical ambiguity), 3 verification failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dichotomy::{run_dichotomy, SolveConfig};
use crate::error::Error;
use crate::format::{
    CertificateFile, ConfigEcho, Instance, InstanceFile, Real17, ToleranceOverrides, Tolerances,
};
use crate::verify::{brute_force_sumset, demo_minorant, verify_certificate, VerifyTolerances};
use crate::zp::{convolve, dft, support_of, PrimeModulus, SupportSet, ZpFunction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable holding default tolerance overrides.
pub const TOLERANCE_ENV: &str = "FARKAS_BALANCE_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "farkas-balance",
    version,
    about = "Balanced functions vs. small spectral support on Z_p"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write a certificate.
    Solve(SolveArgs),
    /// Check a certificate against an instance.
    Verify(VerifyArgs),
    /// Print the Fourier transform of a set or function as CSV.
    Dft(DftArgs),
    /// Compare S+S by enumeration, by convolution, and through a certificate.
    DemoSumset(DemoArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    /// Certificate destination; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub tol_hull: Option<f64>,
    #[arg(long)]
    pub tol_sep: Option<f64>,
    #[arg(long)]
    pub tol_dft: Option<f64>,
    /// Refuse instances with a larger modulus.
    #[arg(long, default_value_t = 2000)]
    pub max_p: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    pub certificate: PathBuf,
    /// Spectral tolerance; defaults to 1e-7 * p.
    #[arg(long)]
    pub tol_spectral: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DftArgs {
    #[arg(long)]
    pub p: usize,
    /// Comma-separated members of a set.
    #[arg(long, conflicts_with = "g", required_unless_present = "g")]
    pub set: Option<String>,
    /// Comma-separated function values g(0),...,g(p-1).
    #[arg(long)]
    pub g: Option<String>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub set: String,
    /// Certificate whose h is used as the minorant f.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

/// Runs a parsed command. `env_tol` is the value of [`TOLERANCE_ENV`], if set.
pub fn run(cli: Cli, env_tol: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => solve(&a, env_tol, out),
        Command::Verify(a) => verify(&a, out),
        Command::Dft(a) => dft_csv(&a, out),
        Command::DemoSumset(a) => demo(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, messages }) => {
            for m in messages {
                let _ = writeln!(err, "error: {m}");
            }
            code
        }
    }
}

struct Failure {
    code: i32,
    messages: Vec<String>,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            messages: vec![msg.into()],
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    InstanceFile::parse(&read(path)?)
        .and_then(|f| f.validate())
        .map_err(|messages| Failure {
            code: EXIT_INPUT,
            messages,
        })
}

fn load_certificate(path: &Path) -> Result<CertificateFile, Failure> {
    CertificateFile::parse(&read(path)?).map_err(Failure::input)
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::input(format!("write failed: {e}"))
}

/// Flags beat the instance file, which beats the environment.
pub fn resolve_tolerances(
    env_tol: Option<&str>,
    file: &ToleranceOverrides,
    flags: &ToleranceOverrides,
) -> Result<Tolerances, String> {
    let mut tol = Tolerances::default();
    if let Some(text) = env_tol {
        tol = ToleranceOverrides::parse_overrides(text)
            .map_err(|e| format!("{TOLERANCE_ENV}: {e}"))?
            .apply(tol);
    }
    Ok(flags.apply(file.apply(tol)))
}

fn solve(a: &SolveArgs, env_tol: Option<&str>, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = load_instance(&a.instance)?;
    let p = instance.modulus.get();
    if p > a.max_p {
        return Err(Failure::input(format!(
            "p = {p} exceeds --max-p {}",
            a.max_p
        )));
    }
    let flags = ToleranceOverrides {
        tol_hull: a.tol_hull,
        tol_sep: a.tol_sep,
        tol_dft: a.tol_dft,
    };
    for v in [a.tol_hull, a.tol_sep, a.tol_dft].into_iter().flatten() {
        if !(v.is_finite() && v > 0.0) {
            return Err(Failure::input(format!(
                "tolerance flags must be positive, got {v}"
            )));
        }
    }
    let tol = resolve_tolerances(env_tol, &instance.tolerances, &flags).map_err(Failure::input)?;

    let mut cfg = SolveConfig::<f64>::new(instance.budget);
    cfg.geometry.tol_hull = tol.hull;
    cfg.geometry.tol_sep = tol.sep;
    cfg.tol_dft = tol.dft;

    let cert = run_dichotomy(&instance.support, &instance.places, &cfg).map_err(|e| Failure {
        code: match e {
            Error::NumericalAmbiguity { .. } | Error::ResidualBlowup { .. } | Error::Lp(_) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_INPUT,
        },
        messages: vec![e.to_string()],
    })?;
    let echo = ConfigEcho {
        budget: instance.budget,
        places: instance.places.raw().to_vec(),
        tol_hull: Real17(tol.hull),
        tol_sep: Real17(tol.sep),
        tol_dft: Real17(tol.dft),
        max_p: a.max_p,
    };
    let json = CertificateFile::from_certificate(&cert, echo).to_json();
    match &a.output {
        Some(path) => {
            fs::write(path, json).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        None => out.write_all(json.as_bytes()).map_err(io_failure)?,
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = load_instance(&a.instance)?;
    let file = load_certificate(&a.certificate)?;
    if file.p != instance.modulus.get() {
        return Err(Failure::input(
            Error::ModulusMismatch {
                left: instance.modulus.get(),
                right: file.p,
            }
            .to_string(),
        ));
    }
    let cert = file.to_certificate().map_err(Failure::input)?;
    let mut tol = VerifyTolerances::for_modulus(instance.modulus);
    if let Some(s) = a.tol_spectral {
        tol.spectral = s;
    }
    let report = verify_certificate(
        &cert,
        &instance.support,
        &instance.places,
        instance.budget,
        &tol,
    )
    .map_err(|e| Failure::input(e.to_string()))?;
    writeln!(out, "{report}").map_err(io_failure)?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Failure::input(format!("`{s}` is not a valid {what}")))
        })
        .collect()
}

fn parse_set(p: PrimeModulus, text: &str) -> Result<SupportSet, Failure> {
    let members: Vec<usize> = parse_list(text, "set element")?;
    SupportSet::from_members(p, members).map_err(|e| Failure::input(e.to_string()))
}

fn modulus(p: usize) -> Result<PrimeModulus, Failure> {
    PrimeModulus::new(p).map_err(|e| Failure::input(e.to_string()))
}

fn dft_csv(a: &DftArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = modulus(a.p)?;
    let f = match (&a.set, &a.g) {
        (Some(set), None) => ZpFunction::<f64>::indicator(&parse_set(p, set)?),
        (None, Some(g)) => {
            ZpFunction::new(p, parse_list(g, "real")?).map_err(|e| Failure::input(e.to_string()))?
        }
        _ => return Err(Failure::input("give exactly one of --set and --g")),
    };
    let spectrum = dft(&f);
    let mut text = String::from("a,re,im,modulus\n");
    for (a, z) in spectrum.coeffs().iter().enumerate() {
        text.push_str(&format!(
            "{a},{:.16e},{:.16e},{:.16e}\n",
            z.re,
            z.im,
            z.norm()
        ));
    }
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn fmt_set(s: &SupportSet) -> String {
    let items: Vec<String> = s.members().iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn demo(a: &DemoArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = modulus(a.p)?;
    let s = parse_set(p, &a.set)?;
    let enumerated = brute_force_sumset(&s, &s).map_err(|e| Failure::input(e.to_string()))?;
    let ind = ZpFunction::<f64>::indicator(&s);
    let conv = convolve(&ind, &ind).map_err(|e| Failure::input(e.to_string()))?;
    let via_conv = support_of(
        &ZpFunction::new(
            p,
            conv.values()
                .iter()
                .map(|&v| if v > 0.5 { 1.0 } else { 0.0 })
                .collect(),
        )
        .expect("length p"),
    )
    .expect("values in {0, 1}");
    let mut lines = vec![
        format!("S = {}", fmt_set(&s)),
        format!("S+S by pair enumeration: {}", fmt_set(&enumerated)),
        format!("support of S*S:          {}", fmt_set(&via_conv)),
    ];
    let mut code = EXIT_OK;
    if enumerated != via_conv {
        lines.push("agreement: FAIL".into());
        code = EXIT_VERIFY;
    } else {
        lines.push("agreement: pass".into());
    }
    if let Some(path) = &a.certificate {
        let file = load_certificate(path)?;
        if file.p != p.get() {
            return Err(Failure::input(
                Error::ModulusMismatch {
                    left: p.get(),
                    right: file.p,
                }
                .to_string(),
            ));
        }
        let cert = file.to_certificate().map_err(Failure::input)?;
        match demo_minorant(&s, cert.h()) {
            Ok(m) => {
                lines.push(format!("(f*S)(n) > 0 at:          {}", fmt_set(&m)));
                lines.push("containment in S+S: pass".into());
            }
            Err(Error::ContainmentViolation(n)) => {
                lines.push(format!("containment in S+S: FAIL at {n}"));
                code = EXIT_VERIFY;
            }
            Err(e) => return Err(Failure::input(e.to_string())),
        }
    }
    let mut text = lines.join("\n");
    text.push('\n');
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(code)
}
