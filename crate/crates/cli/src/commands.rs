use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use su21::algebra::audit_basis;
use su21::bump::{BumpFactor, BumpFunction, Coordinate};
use su21::endoscopy::{
    calibrate, calibration_grid, evaluation_grid, kappa_orbital_sum, pairing_inversion_check, stable_character_sum,
    transfer_identity_check, Calibration, Conventions, EllipticElement, InversionReport, KappaCharacter, LPacket,
    PairingTable, TransferReport,
};
use su21::group::unipotent;
use su21::orbital::{
    dyadic_sequence, elliptic_orbital_closed_form, elliptic_orbital_closed_form_with, elliptic_orbital_quadrature,
    reference_theta_bump, singular_fit, DiagonalGamma, JacobianReading, SingularFit,
};
use su21::orbits::{classify_orbit, coadjoint_act, polarization_check, BFunctional, PolarizationCheck, PolarizationSign};
use su21::quadrature::QuadratureResult;
use su21::roots::{classify_parameter, enumerate_parameters, pair, write_enumeration_csv, Coroot, ParameterClass, Weight};
use su21::scalar::Mode;

use crate::config::RunConfig;
use crate::report::{emit, render, write_csv};
use crate::suites::{verify_all, ELLIPTIC_REL_TOL, THETA_REL_TOL};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "su21", version, about = "Verification suites for SU(2,1): structure, orbits, orbital integrals, endoscopy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership of the printed generators and their bracket relations.
    AuditBasis {
        /// Gaussian-rational arithmetic instead of floats.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the functional t T* + x X* + y Y* + z Z* on b.
    #[command(allow_negative_numbers = true)]
    ClassifyOrbit {
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        x: f64,
        #[arg(long, default_value_t = 0.0)]
        y: f64,
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Act first by exp(x X + y Y' + z Z'), given as `x,y,z`.
        #[arg(long, value_parser = parse_triple)]
        act: Option<[f64; 3]>,
        /// Also report the polarization check for this sign.
        #[arg(long)]
        polarization: Option<SignArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbital integrals.
    Orbital {
        #[command(subcommand)]
        kind: OrbitalCommand,
    },
    /// Transfer identity on a regular grid of the compact Cartan subgroup.
    TransferCheck {
        #[arg(long, default_value = "1,-3,2", value_parser = parse_weight, allow_hyphen_values = true)]
        mu: Weight,
        #[arg(long, default_value = "0,0,0", value_parser = parse_weight, allow_hyphen_values = true)]
        xi: Weight,
        #[arg(long, default_value_t = 32)]
        grid_n: usize,
        /// Largest accepted residual.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Re-run the convention calibration instead of using the frozen manifest.
        #[arg(long)]
        calibrate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// L-packet of a parameter, optionally with character values and the
    /// parameter enumeration.
    #[command(allow_negative_numbers = true)]
    Packet {
        #[arg(long, default_value = "1,-3,2", value_parser = parse_weight, allow_hyphen_values = true)]
        mu: Weight,
        /// Evaluate characters at diag(e^{i th1}, e^{i th2}, e^{-i(th1+th2)}), given as `th1,th2`.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        angles: Option<[f64; 2]>,
        /// Enumerate integral regular parameters with pairings bounded by this.
        #[arg(long)]
        enumerate: Option<u32>,
        /// Enumeration rows as CSV.
        #[arg(long, requires = "enumerate")]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover traces from the pairing table in exact arithmetic.
    InversionCheck {
        #[arg(long, value_enum, default_value_t = TableArg::Both)]
        table: TableArg,
        /// Rational traces `p/q,...`, one per column of a single table.
        #[arg(long, allow_hyphen_values = true)]
        traces: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every suite and summarize.
    VerifyAll {
        /// JSON file with RunConfig fields; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        structure_tol: Option<f64>,
        #[arg(long)]
        quad_tol: Option<f64>,
        #[arg(long)]
        transfer_tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OrbitalCommand {
    /// Orbital integral of diag(a1, a2, a3) by iterated quadrature and by
    /// the Jacobian closed form.
    #[command(allow_negative_numbers = true)]
    Elliptic {
        #[arg(long)]
        a1: f64,
        #[arg(long)]
        a2: f64,
        /// Defaults to 1 / (a1 a2).
        #[arg(long)]
        a3: Option<f64>,
        /// Bump function as inline JSON or a path to a JSON file.
        #[arg(long)]
        bump: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singular fit of F(lambda) on the theta family.
    Theta {
        /// Comma-separated lambdas with strictly decreasing modulus; defaults
        /// to 2^-3, ..., 2^-10.
        #[arg(long, allow_hyphen_values = true)]
        lambda_grid: Option<String>,
        #[arg(long)]
        bump: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fit rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Two,
    Klein,
    Both,
}

fn parse_weight(s: &str) -> Result<Weight, String> {
    s.parse::<Weight>().map_err(|e| e.to_string())
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"))).collect()
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_floats(s)?.try_into().map_err(|v: Vec<f64>| format!("expected 3 values, got {}", v.len()))
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats(s)?.try_into().map_err(|v: Vec<f64>| format!("expected 2 values, got {}", v.len()))
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
pub fn load_bump(arg: &str) -> Result<BumpFunction, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("--bump {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--bump: {e}")))
}

/// Unit bump centered at 0 in each entry above the diagonal.
pub fn default_elliptic_bump() -> BumpFunction {
    let factors = [Coordinate::Re(0, 1), Coordinate::Re(1, 2), Coordinate::Re(0, 2)]
        .into_iter()
        .map(|c| BumpFactor::new(c, 0.0, 1.0).expect("positive radius"))
        .collect();
    BumpFunction::new(1.0, factors).expect("finite amplitude")
}

/// Runs the command; `Ok(true)` when every check it performs passes.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::AuditBasis { exact, out } => audit(exact, out.as_deref()),
        Command::ClassifyOrbit { t, x, y, z, tol, act, polarization, out } => {
            classify(BFunctional::new(t, x, y, z), tol, act, polarization, out.as_deref())
        }
        Command::Orbital { kind: OrbitalCommand::Elliptic { a1, a2, a3, bump, tol, out } } => {
            elliptic(a1, a2, a3, bump.as_deref(), tol, out.as_deref())
        }
        Command::Orbital { kind: OrbitalCommand::Theta { lambda_grid, bump, tol, out, csv } } => {
            theta(lambda_grid.as_deref(), bump.as_deref(), tol, out.as_deref(), csv.as_deref())
        }
        Command::TransferCheck { mu, xi, grid_n, tol, calibrate, out, csv } => {
            transfer(mu, xi, grid_n, tol, calibrate, out.as_deref(), csv.as_deref())
        }
        Command::Packet { mu, angles, enumerate, csv, out } => packet(mu, angles, enumerate, csv.as_deref(), out.as_deref()),
        Command::InversionCheck { table, traces, out } => inversion(table, traces.as_deref(), out.as_deref()),
        Command::VerifyAll { config, seed, structure_tol, quad_tol, transfer_tol, out } => {
            let mut cfg = match &config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(v) = structure_tol {
                cfg.structure_tol = v;
            }
            if let Some(v) = quad_tol {
                cfg.quad_tol = v;
            }
            if let Some(v) = transfer_tol {
                cfg.transfer_tol = v;
            }
            cfg.out = out;
            verify(&cfg)
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")))
    }
}

fn audit(exact: bool, out: Option<&Path>) -> Result<bool, CliError> {
    let report = audit_basis(if exact { Mode::Exact } else { Mode::Float });
    let passed = report.printed_hold();
    emit(&render("audit-basis", passed, &report, true), out)?;
    Ok(passed)
}

#[derive(Serialize)]
struct OrbitRecord {
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    class: &'static str,
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polarization: Option<PolarizationCheck>,
}

fn classify(
    f: BFunctional,
    tol: f64,
    act: Option<[f64; 3]>,
    sign: Option<SignArg>,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    positive("--tol", tol)?;
    if f.as_array().iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage("coefficients must be finite".into()));
    }
    let f = match act {
        Some([x, y, z]) => {
            let c = |v: f64| Complex64::new(v, 0.0);
            coadjoint_act(&unipotent(c(x), c(y), c(z)), &f).map_err(|e| CliError::Usage(e.to_string()))?
        }
        None => f,
    };
    let class = classify_orbit(&f, tol);
    let polarization = sign
        .map(|s| {
            let s = match s {
                SignArg::Plus => PolarizationSign::Plus,
                SignArg::Minus => PolarizationSign::Minus,
            };
            polarization_check(s, &f)
        })
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rec = OrbitRecord { t: f.t, x: f.x, y: f.y, z: f.z, class: class.name(), alpha: class.alpha(), polarization };
    emit(&render("classify-orbit", true, &rec, false), out)?;
    Ok(true)
}

#[derive(Serialize)]
struct EllipticOut {
    gamma: [f64; 3],
    bump: BumpFunction,
    tol: f64,
    quadrature: QuadratureResult,
    closed_form: QuadratureResult,
    duplicate_closed_form: QuadratureResult,
    relative_difference: f64,
    duplicate_relative_difference: f64,
}

fn elliptic(a1: f64, a2: f64, a3: Option<f64>, bump: Option<&str>, tol: f64, out: Option<&Path>) -> Result<bool, CliError> {
    positive("--tol", tol)?;
    let gamma = DiagonalGamma::new(a1, a2, a3.unwrap_or(1.0 / (a1 * a2))).map_err(|e| CliError::Usage(e.to_string()))?;
    let f = bump.map(load_bump).transpose()?.unwrap_or_else(default_elliptic_bump);
    let q = elliptic_orbital_quadrature(&gamma, &f, tol)?;
    let c = elliptic_orbital_closed_form(&gamma, &f, tol)?;
    let d = elliptic_orbital_closed_form_with(&gamma, &f, tol, JacobianReading::Duplicate)?;
    let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b.abs() };
    let body = EllipticOut {
        gamma: gamma.entries(),
        bump: f,
        tol,
        relative_difference: rel(q.value, c.value),
        duplicate_relative_difference: rel(d.value, q.value),
        quadrature: q,
        closed_form: c,
        duplicate_closed_form: d,
    };
    let passed = body.relative_difference <= ELLIPTIC_REL_TOL;
    emit(&render("orbital elliptic", passed, &body, true), out)?;
    Ok(passed)
}

fn theta(grid: Option<&str>, bump: Option<&str>, tol: f64, out: Option<&Path>, csv: Option<&Path>) -> Result<bool, CliError> {
    positive("--tol", tol)?;
    let lambdas = match grid {
        Some(s) => parse_floats(s).map_err(CliError::Usage)?,
        None => dyadic_sequence(3, 10, 1.0),
    };
    let f = bump.map(load_bump).transpose()?.unwrap_or_else(reference_theta_bump);
    let fit: SingularFit = singular_fit(&f, &lambdas, tol).map_err(|e| match e {
        su21::orbital::OrbitalError::BadSequence(_) | su21::orbital::OrbitalError::LambdaOutOfRange(_) => {
            CliError::Usage(e.to_string())
        }
        e => e.into(),
    })?;
    let passed = fit.c_inv_relative_error.is_some_and(|e| e <= THETA_REL_TOL) && !fit.trend.growth_detected;
    if let Some(path) = csv {
        let rows: Vec<Vec<String>> = fit
            .lambdas
            .iter()
            .zip(&fit.values)
            .zip(&fit.residuals)
            .map(|((l, v), r)| vec![l.to_string(), v.to_string(), r.to_string()])
            .collect();
        write_csv(path, &["lambda", "value", "residual"], &rows)?;
    }
    emit(&render("orbital theta", passed, &fit, true), out)?;
    Ok(passed)
}

#[derive(Serialize)]
struct TransferOut<'a> {
    #[serde(flatten)]
    report: &'a TransferReport,
    tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<Calibration>,
}

fn transfer(
    mu: Weight,
    xi: Weight,
    grid_n: usize,
    tol: f64,
    recalibrate: bool,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<bool, CliError> {
    positive("--tol", tol)?;
    if grid_n == 0 {
        return Err(CliError::Usage("--grid-n must be at least 1".into()));
    }
    let calibration = if recalibrate { Some(calibrate(&mu, &xi, &calibration_grid())?) } else { None };
    let conv = calibration.as_ref().map_or(Conventions::FROZEN, |c| c.best);
    let report = transfer_identity_check(&mu, &xi, &evaluation_grid(grid_n), &conv)?;
    let passed = report.max_residual <= tol;
    if let Some(path) = csv {
        let rows: Vec<Vec<String>> = report
            .grid
            .iter()
            .map(|r| {
                let mut row: Vec<String> = r.angles.iter().map(f64::to_string).collect();
                row.extend([
                    r.w.label(),
                    r.kappa.to_string(),
                    r.lhs.re.to_string(),
                    r.lhs.im.to_string(),
                    r.rhs.re.to_string(),
                    r.rhs.im.to_string(),
                    r.residual.to_string(),
                ]);
                row
            })
            .collect();
        write_csv(
            path,
            &["th1", "th2", "th3", "w", "kappa", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"],
            &rows,
        )?;
    }
    let body = TransferOut { report: &report, tol, calibration };
    emit(&render("transfer-check", passed, &body, true), out)?;
    Ok(passed)
}

#[derive(Serialize)]
struct MemberOut {
    representative: String,
    even: String,
    parameter: Weight,
    class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    character: Option<Complex64>,
}

#[derive(Serialize)]
struct EnumerationOut {
    bound: u32,
    entries: usize,
    holomorphic_violations: usize,
    multi_match: usize,
}

#[derive(Serialize)]
struct PacketOut {
    mu: Weight,
    members: Vec<MemberOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angles: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stable_sum: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_sum: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumeration: Option<EnumerationOut>,
}

fn packet(mu: Weight, angles: Option<[f64; 2]>, bound: Option<u32>, csv: Option<&Path>, out: Option<&Path>) -> Result<bool, CliError> {
    let packet = LPacket::new(mu).map_err(|e| CliError::Usage(e.to_string()))?;
    let gamma = angles.map(|[a, b]| EllipticElement::from_pair(a, b));
    let values = gamma.as_ref().map(|g| packet.characters_at_inverse(g)).transpose().map_err(|e| CliError::Usage(e.to_string()))?;
    let members = packet
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| MemberOut {
            representative: m.representative.label(),
            even: m.even.label(),
            parameter: m.parameter,
            class: classify_parameter(&m.parameter).to_string(),
            character: values.map(|v| v[i]),
        })
        .collect();
    let (stable_sum, kappa_sum) = match &gamma {
        Some(g) => (
            Some(stable_character_sum(&mu, g)?),
            Some(kappa_orbital_sum(&mu, &KappaCharacter::reference(), Conventions::FROZEN.kappa_identification, g)?),
        ),
        None => (None, None),
    };
    let mut passed = true;
    let enumeration = match bound {
        Some(b) => {
            let entries = enumerate_parameters(b);
            if let Some(path) = csv {
                let file = std::fs::File::create(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
                write_enumeration_csv(&entries, file)?;
            }
            let holomorphic_violations = entries
                .iter()
                .filter(|e| e.class == ParameterClass::Holomorphic && pair(&e.weight, Coroot::H23) >= Rational64::from(0))
                .count();
            let disagreements = entries.iter().filter(|e| classify_parameter(&e.weight) != e.class).count();
            passed = holomorphic_violations == 0 && disagreements == 0;
            Some(EnumerationOut {
                bound: b,
                entries: entries.len(),
                holomorphic_violations,
                multi_match: entries.iter().filter(|e| e.multi_match).count(),
            })
        }
        None => None,
    };
    let body = PacketOut { mu, members, angles: gamma.map(|g| g.angles()), stable_sum, kappa_sum, enumeration };
    emit(&render("packet", passed, &body, true), out)?;
    Ok(passed)
}

#[derive(Serialize)]
struct InversionOut {
    tables: BTreeMap<&'static str, InversionReport>,
}

fn inversion(table: TableArg, traces: Option<&str>, out: Option<&Path>) -> Result<bool, CliError> {
    let tables = match table {
        TableArg::Two => vec![("two_element", PairingTable::two_element())],
        TableArg::Klein => vec![("klein_four", PairingTable::klein_four())],
        TableArg::Both => vec![("two_element", PairingTable::two_element()), ("klein_four", PairingTable::klein_four())],
    };
    let given: Option<Vec<Rational64>> = traces
        .map(|s| {
            s.split(',')
                .map(|p| p.trim().parse::<Rational64>().map_err(|e| CliError::Usage(format!("--traces {p:?}: {e}"))))
                .collect::<Result<_, _>>()
        })
        .transpose()?;
    if given.is_some() && tables.len() != 1 {
        return Err(CliError::Usage("--traces needs --table two or --table klein".into()));
    }
    let mut reports = BTreeMap::new();
    for (name, t) in tables {
        let tr = match &given {
            Some(v) => v.clone(),
            None => default_traces(t.size()),
        };
        let rep = pairing_inversion_check(&t, &tr).map_err(|e| CliError::Usage(e.to_string()))?;
        reports.insert(name, rep);
    }
    let passed = reports.values().all(|r| r.orthogonal && r.exact);
    emit(&render("inversion-check", passed, &InversionOut { tables: reports }, true), out)?;
    Ok(passed)
}

fn default_traces(n: usize) -> Vec<Rational64> {
    (1..=n as i64).map(|k| Rational64::new(2 * k - 5, k + 1)).collect()
}

fn verify(cfg: &RunConfig) -> Result<bool, CliError> {
    cfg.validate()?;
    let report = verify_all(cfg);
    for s in &report.suites {
        eprintln!("{} {}", if s.passed { "PASS" } else { "FAIL" }, s.name);
        for f in &s.failures {
            eprintln!("    {f}");
        }
    }
    let passed = report.passed();
    emit(&render("verify-all", passed, &report, true), cfg.out.as_deref())?;
    Ok(passed)
}

#[cfg(test)]
mod tests {
    use serde_json::Value;

    use crate::{run_cli, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

    /// Runs `su21 <args> --out <tmp>` and returns the exit code and report.
    fn run_json(args: &[&str]) -> (u8, Value) {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report.json");
        let mut argv = vec!["su21"];
        argv.extend_from_slice(args);
        argv.extend(["--out", out.to_str().unwrap()]);
        let code = run_cli(argv);
        let text = std::fs::read_to_string(&out).unwrap_or_else(|_| "null".into());
        (code, serde_json::from_str(&text).unwrap())
    }

    fn small_config(dir: &std::path::Path, extra: &str) -> String {
        let path = dir.join("config.json");
        let body = format!(
            r#"{{"group_samples": 20, "iwasawa_samples": 5, "orbit_samples": 50, "elliptic_pairs": 2,
                "transfer_grid_n": 8, "fiber_points": 10{extra}}}"#
        );
        std::fs::write(&path, body).unwrap();
        path.to_str().unwrap().to_string()
    }

    #[test]
    fn audit_basis_exit_tracks_printed_relations() {
        let (code, report) = run_json(&["audit-basis"]);
        assert_eq!(report["schema"], 1);
        let printed_hold = report["printed_identities"].as_array().unwrap().iter().all(|c| c["holds"] == true);
        assert_eq!(code, if printed_hold { EXIT_PASS } else { EXIT_FAIL });
        for g in report["generators"].as_array().unwrap() {
            let twisted = matches!(g["name"].as_str().unwrap(), "Y" | "Z" | "T");
            assert_eq!(g["member"], !twisted);
            assert_eq!(g["i_twist_member"], twisted);
        }
    }

    #[test]
    fn exact_audit_has_the_same_verdicts() {
        let (c1, float) = run_json(&["audit-basis"]);
        let (c2, exact) = run_json(&["audit-basis", "--exact"]);
        assert_eq!(c1, c2);
        assert_eq!(exact["mode"], "exact");
        for key in ["generators", "printed_identities", "corrected_identities"] {
            let strip = |v: &Value| -> Vec<(Value, Value, Value)> {
                v[key]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|g| {
                        let id = g.get("name").or(g.get("identity")).cloned().unwrap();
                        let a = g.get("member").or(g.get("holds")).cloned().unwrap();
                        (id, a, g.get("i_twist_member").cloned().unwrap_or(Value::Null))
                    })
                    .collect()
            };
            assert_eq!(strip(&float), strip(&exact), "{key}");
        }
    }

    #[test]
    fn malformed_flags_are_usage_errors() {
        assert_eq!(run_cli(["su21", "audit-basis", "--no-such-flag"]), EXIT_USAGE);
        assert_eq!(run_cli(["su21", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run_cli(["su21", "transfer-check", "--mu", "1,2"]), EXIT_USAGE);
        assert_eq!(run_cli(["su21", "--help"]), EXIT_PASS);
    }

    #[test]
    fn classify_orbit_record() {
        let (code, r) = run_json(&["classify-orbit", "--x", "2", "--y", "-1.5"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(r["class"], "cylinder");
        assert_eq!(r["alpha"], -3.0);
        let (_, r) = run_json(&["classify-orbit", "--z", "-0.5", "--act", "1,2,3"]);
        assert_eq!(r["class"], "omega_minus");
        assert_eq!(r["z"], -0.5);
        assert_eq!(run_cli(["su21", "classify-orbit", "--tol", "0"]), EXIT_USAGE);
    }

    #[test]
    fn elliptic_default_bump_agrees() {
        let (code, r) = run_json(&["orbital", "elliptic", "--a1", "2", "--a2", "1"]);
        assert_eq!(code, EXIT_PASS);
        assert!(r["relative_difference"].as_f64().unwrap() < 1e-6);
        // a = (2, 1, 1/2): |a1 - a3| / |a2 - a3| = 3.
        assert!((r["duplicate_relative_difference"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn elliptic_rejects_bad_input() {
        assert_eq!(run_cli(["su21", "orbital", "elliptic", "--a1", "2", "--a2", "1", "--bump", "{\"amplitude\": 1}"]), EXIT_USAGE);
        assert_eq!(run_cli(["su21", "orbital", "elliptic", "--a1", "2", "--a2", "1", "--a3", "1"]), EXIT_USAGE);
        let bump = r#"{"amplitude":1,"factors":[{"coord":"re[1,2]","center":0,"radius":-1}]}"#;
        assert_eq!(run_cli(["su21", "orbital", "elliptic", "--a1", "2", "--a2", "1", "--bump", bump]), EXIT_USAGE);
    }

    #[test]
    fn elliptic_bump_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bump.json");
        let bump = r#"{"amplitude":2,"factors":[
            {"coord":"re[1,2]","center":0.1,"radius":0.5},
            {"coord":"re[2,3]","center":0,"radius":0.5},
            {"coord":"re[1,3]","center":-0.2,"radius":0.7}]}"#;
        std::fs::write(&path, bump).unwrap();
        let (code, r) = run_json(&["orbital", "elliptic", "--a1", "3", "--a2", "0.5", "--bump", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(r["bump"]["amplitude"], 2.0);
        assert_eq!(r["gamma"][2], 1.0 / 1.5);
    }

    #[test]
    fn theta_fit_report() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("fit.csv");
        let (code, r) = run_json(&["orbital", "theta", "--csv", csv.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS);
        assert!(r["c_inv_relative_error"].as_f64().unwrap() < 0.05);
        assert_eq!(r["lambdas"].as_array().unwrap().len(), 8);
        assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 9);
        assert_eq!(run_cli(["su21", "orbital", "theta", "--lambda-grid", "0.5,0.25"]), EXIT_USAGE);
    }

    #[test]
    fn transfer_check_report_and_tolerance() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("grid.csv");
        let (code, r) = run_json(&["transfer-check", "--grid-n", "8", "--csv", csv.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(r["conventions_manifest"]["root_matching"], "embedding_block");
        assert_eq!(r["grid"].as_array().unwrap().len(), 24);
        assert!(r["max_residual"].as_f64().unwrap() <= 1e-8);
        assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 25);
        let (code, _) = run_json(&["transfer-check", "--grid-n", "8", "--tol", "1e-20"]);
        assert_eq!(code, EXIT_FAIL);
        let (code, r) = run_json(&["transfer-check", "--grid-n", "4", "--calibrate"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(r["calibration"]["ranking"].as_array().unwrap().len(), 16);
        assert_eq!(run_cli(["su21", "transfer-check", "--xi", "1/2,0,-1/2"]), EXIT_FAIL);
    }

    #[test]
    fn packet_members_and_enumeration() {
        let (code, r) = run_json(&["packet", "--mu", "1,-3,2", "--angles", "0.5,1.7", "--enumerate", "5"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(r["members"].as_array().unwrap().len(), 3);
        assert_eq!(r["enumeration"]["holomorphic_violations"], 0);
        assert_eq!(r["angles"][2], -2.2);
        assert_eq!(run_cli(["su21", "packet", "--mu", "1,1,-2"]), EXIT_USAGE);
    }

    #[test]
    fn inversion_check_tables() {
        let (code, r) = run_json(&["inversion-check"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(r["tables"]["klein_four"]["recovered"], r["tables"]["klein_four"]["traces"]);
        let (code, r) = run_json(&["inversion-check", "--table", "two", "--traces", "1/2,-3"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(r["tables"]["two_element"]["sigma"][1], "7/2");
        assert_eq!(run_cli(["su21", "inversion-check", "--table", "klein", "--traces", "1,2"]), EXIT_USAGE);
        assert_eq!(run_cli(["su21", "inversion-check", "--traces", "1,2"]), EXIT_USAGE);
    }

    #[test]
    fn verify_all_is_deterministic_and_isolates_transfer() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path(), "");
        let out1 = dir.path().join("a.json");
        let out2 = dir.path().join("b.json");
        let c1 = run_cli(["su21", "verify-all", "--config", &cfg, "--out", out1.to_str().unwrap()]);
        let c2 = run_cli(["su21", "verify-all", "--config", &cfg, "--out", out2.to_str().unwrap()]);
        let (a, b) = (std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
        assert_eq!(c1, c2);
        assert_eq!(a, b);
        let base: Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(c1, if base["passed"] == true { EXIT_PASS } else { EXIT_FAIL });

        let (code, tight) = run_json(&["verify-all", "--config", &cfg, "--transfer-tol", "1e-20"]);
        assert_eq!(code, EXIT_FAIL);
        for (s, t) in base["suites"].as_array().unwrap().iter().zip(tight["suites"].as_array().unwrap()) {
            if s["name"] == "transfer" {
                assert_eq!(t["passed"], false);
            } else {
                assert_eq!(s, t);
            }
        }
    }

    #[test]
    fn verify_all_rejects_bad_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path(), r#", "unknown_field": 1"#);
        assert_eq!(run_cli(["su21", "verify-all", "--config", &cfg]), EXIT_USAGE);
        assert_eq!(run_cli(["su21", "verify-all", "--quad-tol", "-1"]), EXIT_USAGE);
        assert_eq!(run_cli(["su21", "verify-all", "--config", "/nonexistent/config.json"]), EXIT_FAIL);
    }
}
