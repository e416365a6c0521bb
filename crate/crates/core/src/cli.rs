//! Command-line front end.

use std::ffi::OsString;
use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::basemanifold::{BaseError, BaseManifold};
use crate::besselzero::{self, BesselZeroError, ZeroKind, ZeroRequest};
use crate::exactpoly::{self, rat, ExactPolyError, RationalPolynomial};
use crate::modelops::{self, ModelError, ModelOperator};
use crate::specfun::SpecFunError;
use crate::torsion::{self, ConeOverS1Config, TorsionError, TorsionOptions};
use crate::zetacont::{self, Descriptor, ZetaError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NoConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        }
    }
}

fn special(e: &SpecFunError) -> CliError {
    match e {
        SpecFunError::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

impl From<SpecFunError> for CliError {
    fn from(e: SpecFunError) -> Self {
        special(&e)
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        match &e {
            ZetaError::InsufficientSpectrum { .. } | ZetaError::ShiftMismatch { .. } => {
                CliError::NoConvergence(e.to_string())
            }
            ZetaError::Special(s) => special(s),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BesselZeroError> for CliError {
    fn from(e: BesselZeroError) -> Self {
        match &e {
            BesselZeroError::Convergence { .. } => CliError::NoConvergence(e.to_string()),
            BesselZeroError::Special(s) => special(s),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BaseError> for CliError {
    fn from(e: BaseError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ExactPolyError> for CliError {
    fn from(e: ExactPolyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Zeros(z) => z.into(),
            ModelError::Zeta(z) => z.into(),
            ModelError::Special(s) => s.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<TorsionError> for CliError {
    fn from(e: TorsionError) -> Self {
        match e {
            TorsionError::Base(b) => b.into(),
            TorsionError::Zeta(z) => z.into(),
            TorsionError::Poly(p) => p.into(),
            TorsionError::Zeros(z) => z.into(),
            TorsionError::Special(s) => s.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "conetorsion", version, about = "Ray-Singer torsion of cones over closed manifolds")]
#[command(args_conflicts_with_subcommands = false, allow_negative_numbers = true)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// accuracy target of numeric paths, in [1e-12, 1e-4]
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic torsion of a cone
    Torsion {
        #[command(subcommand)]
        target: TorsionTarget,
    },
    /// Positive zeros of Bessel cross products
    Zeros {
        #[arg(long, value_enum)]
        kind: ZeroKindArg,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        count: usize,
    },
    /// Zeta data of the shifted frequencies of one base degree
    Zeta {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        degree: usize,
        #[arg(long, allow_negative_numbers = true)]
        shift: Option<f64>,
    },
    /// Exact D_r, M_r and their coefficients
    Olver {
        #[arg(long)]
        order: usize,
    },
    /// log det of the model operator L_nu(alpha)
    Modeldet {
        #[arg(long)]
        nu: f64,
        /// boundary parameter, `inf` for Dirichlet
        #[arg(long, allow_negative_numbers = true)]
        alpha: String,
        #[arg(long)]
        numeric: bool,
    },
    /// Run the built-in consistency checks
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum TorsionTarget {
    /// Cone over a closed base manifold
    Cone {
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Cone over a circle of length 2 pi R / nu (closed form)
    Disc {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        radius: f64,
    },
}

#[derive(Debug, Args)]
pub struct BaseArgs {
    /// s1, torus2 or custom:<path>
    #[arg(long)]
    pub base: String,
    #[arg(long)]
    pub scale: Option<f64>,
    /// torus lattice basis a1x,a1y,a2x,a2y (default: square of side 2 pi)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lattice: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroKindArg {
    J,
    Jprime,
    Mixed,
}

impl BaseArgs {
    pub fn build(&self) -> Result<BaseManifold, CliError> {
        if self.lattice.is_some() && self.base != "torus2" {
            return Err(CliError::Validation("--lattice only applies to --base torus2".into()));
        }
        let need_scale = || {
            self.scale.ok_or_else(|| CliError::Validation(format!("--scale is required for base {}", self.base)))
        };
        let base = match self.base.as_str() {
            "s1" => BaseManifold::circle(need_scale()?)?,
            "torus2" => {
                let c = need_scale()?;
                match &self.lattice {
                    None => BaseManifold::square_torus2(c)?,
                    Some(v) if v.len() == 4 => BaseManifold::torus2(c, [[v[0], v[1]], [v[2], v[3]]])?,
                    Some(_) => return Err(CliError::Validation("--lattice takes four numbers a1x,a1y,a2x,a2y".into())),
                }
            }
            other => match other.strip_prefix("custom:") {
                Some(path) => {
                    let b = BaseManifold::custom(&PathBuf::from(path))?;
                    if let Some(c) = self.scale {
                        if c != b.scale {
                            return Err(CliError::Validation(format!(
                                "--scale {c} differs from the scale {} stored in {path}",
                                b.scale
                            )));
                        }
                    }
                    b
                }
                None => {
                    return Err(CliError::Validation(format!(
                        "unknown base '{other}', expected s1, torus2 or custom:<path>"
                    )))
                }
            },
        };
        Ok(base)
    }
}

pub fn validate_tol(tol: f64) -> Result<(), CliError> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(CliError::Validation(format!("tolerance {tol} outside [1e-12, 1e-4]")));
    }
    Ok(())
}

fn parse_alpha(text: &str) -> Result<f64, CliError> {
    match text {
        "inf" | "infinity" | "dirichlet" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|a| a.is_finite())
            .ok_or_else(|| CliError::Validation(format!("--alpha must be a number or 'inf', got '{t}'"))),
    }
}

fn poly_coeffs(p: &RationalPolynomial) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Runs one command; returns the output document or an error.
pub fn execute(cli: &Cli) -> Result<(Value, i32), CliError> {
    validate_tol(cli.tol)?;
    let tol = cli.tol;
    let out = match &cli.command {
        Command::Torsion { target: TorsionTarget::Disc { nu, radius } } => {
            let cfg = ConeOverS1Config::new(*radius, *nu)?;
            json!({
                "log_torsion": torsion::theorem_main(cfg),
                "nu": nu,
                "radius": radius,
                "source": "closed_form",
            })
        }
        Command::Torsion { target: TorsionTarget::Cone { base } } => {
            let b = base.build()?;
            let t = torsion::log_torsion_with(&b, TorsionOptions { tol, ..Default::default() })?;
            to_value(&t)
        }
        Command::Zeros { kind, nu, alpha, count } => {
            let k = match (kind, alpha) {
                (ZeroKindArg::J, None) => ZeroKind::Dirichlet,
                (ZeroKindArg::Jprime, None) => ZeroKind::Neumann,
                (ZeroKindArg::Mixed, Some(a)) => ZeroKind::Mixed(*a),
                (ZeroKindArg::Mixed, None) => return Err(CliError::Validation("--kind mixed needs --alpha".into())),
                _ => return Err(CliError::Validation("--alpha only applies to --kind mixed".into())),
            };
            let list = besselzero::zeros(ZeroRequest::new(*nu, k, *count))?;
            let err = list.residuals.iter().zip(&list.slopes).map(|(r, s)| r / s.abs()).fold(0.0, f64::max);
            json!({
                "kind": format!("{kind:?}").to_lowercase(),
                "nu": nu,
                "alpha": alpha,
                "zeros": list.zeros,
                "error_estimate": err,
            })
        }
        Command::Zeta { base, degree, shift } => {
            let b = base.build()?;
            let nu = b.nu_set(*degree)?;
            let alphas = match shift {
                Some(a) => vec![*a],
                None if nu.alpha == 0.0 => vec![0.0],
                None => vec![nu.alpha, -nu.alpha],
            };
            let (data, path) = match nu.stream.descriptor() {
                Descriptor::ArithmeticProgression { .. } => (zetacont::zeta_data_exact(&nu.stream, &alphas)?, "exact"),
                _ => (zetacont::zeta_data_numeric(&nu.stream, &nu.heat, &alphas, tol)?, "numeric"),
            };
            let mut v = to_value(&data);
            v["base"] = json!(b.id);
            v["degree"] = json!(degree);
            v["alpha_k"] = json!(nu.alpha);
            v["path"] = json!(path);
            v
        }
        Command::Olver { order } => {
            let table = exactpoly::olver_table();
            let z = table.coeffs_z(*order)?;
            json!({
                "order": order,
                "D": table.d(*order)?.to_string(),
                "M": table.m(*order)?.to_string(),
                "x": table.coeffs_x(*order)?.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "z": z.iter().map(poly_coeffs).collect::<Vec<_>>(),
            })
        }
        Command::Modeldet { nu, alpha, numeric } => {
            let a = parse_alpha(alpha)?;
            let op = ModelOperator::new(*nu, a)?;
            let d = if *numeric { op.det_numeric(tol.max(1e-8))? } else { op.det_closed()? };
            let mut v = to_value(&d);
            v["nu"] = json!(nu);
            v["alpha"] = if a.is_infinite() { json!("inf") } else { json!(a) };
            v
        }
        Command::Selftest => {
            let checks = selftest(tol, exactpoly::olver_table().d_list());
            let ok = checks.iter().all(|c| c.passed);
            let v = json!({ "passed": ok, "checks": to_value(&checks) });
            return Ok((v, if ok { EXIT_OK } else { EXIT_CHECK_FAILED }));
        }
    };
    Ok((out, EXIT_OK))
}

/// Parses argv, runs the command and writes the result; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn io::Write, err: &mut dyn io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((v, code)) => {
            let text = match cli.format {
                OutputFormat::Json => to_json(&v),
                OutputFormat::Table => to_table(&v),
            };
            let _ = writeln!(out, "{text}");
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

// ---------------------------------------------------------------- serialization

/// %.17g
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let e: i32 = exp.parse().unwrap_or(0);
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..17).contains(&e) {
        trim(&format!("{:.*}", (16 - e) as usize, x))
    } else {
        format!("{}e{e}", trim(mant))
    }
}

struct G17;

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_g17(value).as_bytes())
    }
}

pub fn to_json(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17);
    v.serialize(&mut ser).expect("serializing a json value");
    String::from_utf8(buf).expect("json is utf-8")
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        other => rows.push((prefix.to_string(), to_json(other).trim_matches('"').to_string())),
    }
}

pub fn to_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    rows.iter().map(|(k, x)| format!("{k:<w$}  {x}")).collect::<Vec<_>>().join("\n")
}

// ---------------------------------------------------------------- selftest

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// the result being reproduced
    pub anchor: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, anchor: &'static str, f: impl FnOnce() -> Result<(bool, String), String>) -> CheckResult {
    let (passed, detail) = f().unwrap_or_else(|e| (false, e));
    CheckResult { name, anchor, passed, detail }
}

fn gap(name: &str, got: f64, want: f64, bound: f64) -> (bool, String) {
    let d = (got - want).abs();
    (d <= bound, format!("{name}: |{} - {}| = {d:.3e} (bound {bound:.1e})", format_g17(got), format_g17(want)))
}

/// The consistency checks run by `selftest`. `d_list` is the D_r table used by the DM check.
pub fn selftest(tol: f64, d_list: &[RationalPolynomial]) -> Vec<CheckResult> {
    let s = |e: &dyn std::fmt::Display| e.to_string();
    let table = exactpoly::olver_table();
    let loose = |b: f64| b.max(tol);
    vec![
        check("disc", "two-dimensional cone value", || {
            let v = torsion::theorem_main(ConeOverS1Config::new(1.0, 1.0).map_err(|e| s(&e))?);
            Ok(gap("log T", v, -1.0723649429247, 1e-12))
        }),
        check("angle_formula", "cone over S^1 of angle parameter nu", || {
            let mut ok = true;
            for (r, nu) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)] {
                let v = torsion::theorem_main(ConeOverS1Config::new(r, nu).map_err(|e| s(&e))?);
                let w = 0.5 * (-(std::f64::consts::PI * r * r).ln() + f64::ln(nu) - 1.0 / nu);
                ok &= v == w;
            }
            Ok((ok, "three (R, nu) points".into()))
        }),
        check("circle_vs_general", "even-dimensional torsion formula on circles", || {
            let mut worst: f64 = 0.0;
            for c in [1.5, 2.0, 3.0] {
                let b = BaseManifold::circle(c).map_err(|e| s(&e))?;
                let t = torsion::log_torsion(&b).map_err(|e| s(&e))?.log_torsion;
                let m = torsion::theorem_main(ConeOverS1Config::new(1.0, c).map_err(|e| s(&e))?);
                worst = worst.max((t - m).abs());
            }
            Ok((worst <= 1e-10, format!("max gap {worst:.3e}")))
        }),
        check("model_determinants", "Bessel product determinant", || {
            let t = tol.max(1e-8);
            let half = ModelOperator::dirichlet(0.5).and_then(|o| o.det_numeric(t)).map_err(|e| s(&e))?;
            let (mut ok, mut detail) = gap("L_1/2", half.log_det, std::f64::consts::LN_2, loose(1e-8));
            let mut worst: f64 = 0.0;
            for nu in [1.5, 2.5, 4.0] {
                for a in [f64::INFINITY, 0.0, 1.0, -1.0] {
                    let op = ModelOperator::new(nu, a).map_err(|e| s(&e))?;
                    let n = op.det_numeric(t).map_err(|e| s(&e))?.log_det;
                    let c = op.det_closed().map_err(|e| s(&e))?.log_det;
                    worst = worst.max((n - c).abs());
                }
            }
            ok &= worst <= loose(1e-7);
            detail.push_str(&format!("; grid max gap {worst:.3e}"));
            Ok((ok, detail))
        }),
        check("first_summand", "zeta'(0) of squared J_1 zeros", || {
            let count = if tol < 1e-6 { 2000 } else { 500 };
            let (v, _) = torsion::lemma_first_summand_numeric(1.0, count, tol.max(1e-8)).map_err(|e| s(&e))?;
            Ok(gap("K(1)", v, torsion::lemma_first_summand(1.0), loose(1e-6)))
        }),
        check("exact_polynomials", "D_r and M_r identities", || {
            let m = table.m_list();
            if let Err(r) = exactpoly::check_dm_identity(d_list, m) {
                return Ok((false, format!("D/M identity fails at r = {r}")));
            }
            let d1 = table.d(1).map_err(|e| s(&e))?;
            let want = RationalPolynomial::from_coeffs('t', vec![rat(0, 1), rat(1, 8), rat(0, 1), rat(-5, 24)]);
            if d1 != &want {
                return Ok((false, format!("D_1 = {d1}")));
            }
            let odd = exactpoly::check_odd_sum_identity(table, 10);
            let even = exactpoly::check_even_sum_identity(table, 10);
            Ok((odd.is_ok() && even.is_ok(), format!("odd {odd:?}, even {even:?}")))
        }),
        check("spectral_shift", "zeros of J_nu and of (nu+1) J_{nu+1} + z J'_{nu+1}", || {
            let mut worst: f64 = 0.0;
            for nu in [1.2, 2.0, 3.7] {
                let a = besselzero::zeros(ZeroRequest::new(nu, ZeroKind::Dirichlet, 15)).map_err(|e| s(&e))?;
                let b = besselzero::zeros(ZeroRequest::new(nu + 1.0, ZeroKind::Mixed(nu + 1.0), 15));
                let b = match b {
                    Ok(b) => b,
                    Err(_) => besselzero::zeros_mixed_extended(nu + 1.0, nu + 1.0, 15).map_err(|e| s(&e))?,
                };
                for (x, y) in a.zeros.iter().zip(&b.zeros) {
                    worst = worst.max((x - y).abs());
                }
            }
            Ok((worst <= 1e-10, format!("max gap {worst:.3e}")))
        }),
        check("symmetry_collapse", "p_nu at small and large lambda", || {
            use torsion::derivation::*;
            let sp = SpectralParameter::new(-1e-8).ok_or("bad lambda")?;
            let mut p_worst: f64 = 0.0;
            let mut ab_worst: f64 = 0.0;
            for nu in [2.0, 5.0, 10.0] {
                for (n, k) in [(2usize, 0usize), (3, 0)] {
                    p_worst = p_worst.max(p_nu(nu, k, n, sp).map_err(|e| s(&e))?.abs());
                    let (a, b) = fit_ab(nu, k, n, -1e6, -1e4, 13).map_err(|e| s(&e))?;
                    let (ea, eb) = ab_expected(nu, k, n);
                    ab_worst = ab_worst.max((a - ea).abs()).max((b - eb).abs());
                }
            }
            Ok((p_worst <= 1e-6 && ab_worst <= 1e-3, format!("|p| {p_worst:.3e}, fit {ab_worst:.3e}")))
        }),
        check("torus2", "three-dimensional torsion formula", || {
            let b = BaseManifold::square_torus2(2.0).map_err(|e| s(&e))?;
            let t = torsion::log_torsion_with(&b, TorsionOptions { tol, ..Default::default() }).map_err(|e| s(&e))?;
            let c = torsion::corollary_3d(&b, tol).map_err(|e| s(&e))?;
            let (ok, d) = gap("log T", t.log_torsion, c, loose(1e-8));
            Ok((ok && t.error_estimate <= tol, format!("{d}; error estimate {:.1e}", t.error_estimate)))
        }),
        check("harmonic", "harmonic subcomplexes", || {
            let c = modelops::harmonic_contribution(&BaseManifold::circle(2.0).map_err(|e| s(&e))?);
            let t = modelops::harmonic_contribution(&BaseManifold::square_torus2(2.0).map_err(|e| s(&e))?);
            let ok = (c - 0.5 * std::f64::consts::LN_2).abs() < 1e-15 && (t + 0.5 * 3f64.ln()).abs() < 1e-15;
            Ok((ok, format!("circle {}, torus2 {}", format_g17(c), format_g17(t))))
        }),
    ]
}
