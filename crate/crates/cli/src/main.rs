//! Command-line entry point: periods, connection checks, transport,
//! monodromy, action integrals, the elliptic baseline, and the built-in
//! verification suite.
//!
//! Output is a single JSON document (or a CSV table where a command has a
//! tabular form) on standard output; diagnostics go to standard error.
//! Numbers are printed with 17 significant digits, and identical
//! `(input, tol, seed)` produce byte-identical output.
//!
//! Exit codes: 0 success; 2 malformed input; 3 degenerate or singular
//! configuration; 4 convergence failure; 5 internal assertion (or a failed
//! `verify` check).

use std::io::Read as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sextic::curve::roots_from_moduli;
use sextic::json::{self, fmt_f, JVal};
use sextic::legendre::{
    ebar_agm, ebar_complete, hyper_residual, k_agm, k_complete, legendre_system_residual,
    EllipticModulus,
};
use sextic::linalg::Vec5;
use sextic::neumann::action_integrals;
use sextic::path::Space;
use sextic::periods::{period_vector, Cycle};
use sextic::picard_fuchs::{
    route_equivalence_residual, verify_root_identities, zero_curvature_residual,
};
use sextic::scalar::cabs;
use sextic::transport::{monodromy, propagate};
use sextic::verify;
use sextic::{Branches, Curve, Error, PathF, C64};

#[derive(Parser)]
#[command(
    name = "sextic",
    version,
    about = "Periods of Abelian integrals on even-order genus-2 hyperelliptic curves: \
             connection matrices, transport, monodromy, and action variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Periods of the five basis differentials over one cycle.
    ///
    /// Input: {"curve": {...}, "cycle": {...}}. Output: {"J": [[re,im] x5], "err": bound}.
    Periods(Common),
    /// Residuals of the branch-point connection against finite differences,
    /// one row per branch point (CSV by default).
    GmCheck(Common),
    /// Moduli-connection diagnostics: closed form vs transformed route,
    /// finite differences, zero curvature, and the cubic root identities.
    PfCheck(Common),
    /// Transport a period vector along a moduli path by integrating the
    /// connection ODE. With --output csv, emits (t, J) samples along the path.
    ///
    /// Input: {"curve": {...}, "path": {...}, "cycle": {...}?}; the optional
    /// cycle (default branch pair [1,2]) seeds the initial period vector.
    PfTransport(Common),
    /// Monodromy of the period basis around a closed moduli loop. With
    /// --output csv, emits transport samples of the first basis vector.
    ///
    /// Input: {"curve": {...}, "loop": {...}} (or "path" with "closed": true).
    Monodromy(Common),
    /// Action integrals over the supplied cycles, by direct quadrature and
    /// independently from the period vector.
    ///
    /// Input: {"curve": {...}, "cycles": [{...}, ...]}.
    Actions(Common),
    /// Complete elliptic integrals K and E-bar on the quartic baseline
    /// curve, with AGM and differential-equation residuals.
    Legendre(LegendreArgs),
    /// Run the verification suite: the full criterion list on the bundled
    /// default curve, or the curve-generic checks on a supplied curve.
    /// Exits 5 if any check fails.
    Verify(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Input document: a file path, `-` for standard input, or inline JSON
    /// (first non-space character `{`).
    #[arg(long)]
    input: Option<String>,
    /// Quadrature and transport tolerance, in [1e-14, 1e-2].
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for randomized checks (used by `verify`).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format; commands without a tabular form accept only json.
    #[arg(long, value_enum)]
    output: Option<Format>,
}

#[derive(Args)]
struct LegendreArgs {
    /// Modulus k as `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[command(flatten)]
    common: Common,
}

/// A failed run: exit code, stderr diagnostic, and the stdout error document.
struct Failure {
    code: u8,
    message: String,
    document: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        failure_with(err, None)
    }
}

fn failure_with(err: Error, path: Option<&PathF>) -> Failure {
    Failure {
        code: exit_code(&err),
        message: err.to_string(),
        document: error_document(&err, path),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) => 2,
        Error::DegenerateCurve { .. }
        | Error::DegenerateModuli { .. }
        | Error::Clearance { .. }
        | Error::CycleConstruction(_)
        | Error::RootTrackingAmbiguity { .. }
        | Error::PathUnsafe { .. } => 3,
        Error::QuadratureNonConvergence { .. }
        | Error::BranchTracking { .. }
        | Error::StepUnderflow { .. }
        | Error::TransportNonConvergence { .. } => 4,
        Error::Internal(_) => 5,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidInput(_) => "invalid_input",
        Error::DegenerateCurve { .. } => "degenerate_curve",
        Error::DegenerateModuli { .. } => "degenerate_moduli",
        Error::Clearance { .. } => "clearance",
        Error::CycleConstruction(_) => "cycle_construction",
        Error::RootTrackingAmbiguity { .. } => "root_tracking_ambiguity",
        Error::PathUnsafe { .. } => "path_unsafe",
        Error::QuadratureNonConvergence { .. } => "quadrature_non_convergence",
        Error::BranchTracking { .. } => "branch_tracking",
        Error::StepUnderflow { .. } => "step_underflow",
        Error::TransportNonConvergence { .. } => "transport_non_convergence",
        Error::Internal(_) => "internal",
    }
}

/// Structured error document; when the failure points at a path parameter
/// and the path is known, the offending moduli point is included.
fn error_document(err: &Error, path: Option<&PathF>) -> String {
    let mut fields = vec![
        ("kind", JVal::Str(error_kind(err).to_string())),
        ("exit", JVal::Int(exit_code(err) as i64)),
        ("message", JVal::Str(err.to_string())),
    ];
    let mut param_t: Option<f64> = None;
    match err {
        Error::DegenerateCurve {
            i,
            j,
            gap,
            threshold,
        } => {
            fields.push(("i", JVal::Int(*i as i64 + 1)));
            fields.push(("j", JVal::Int(*j as i64 + 1)));
            fields.push(("gap", JVal::Num(*gap)));
            fields.push(("threshold", JVal::Num(*threshold)));
        }
        Error::DegenerateModuli { disc, threshold } => {
            fields.push(("discriminant", JVal::Num(*disc)));
            fields.push(("threshold", JVal::Num(*threshold)));
        }
        Error::Clearance {
            index,
            dist,
            required,
        } => {
            fields.push(("index", JVal::Int(*index as i64 + 1)));
            fields.push(("distance", JVal::Num(*dist)));
            fields.push(("required", JVal::Num(*required)));
        }
        Error::QuadratureNonConvergence { err, tol, nodes } => {
            fields.push(("achieved", JVal::Num(*err)));
            fields.push(("tol", JVal::Num(*tol)));
            fields.push(("nodes", JVal::Int(*nodes as i64)));
        }
        Error::BranchTracking { jump, node, nodes } => {
            fields.push(("jump", JVal::Num(*jump)));
            fields.push(("node", JVal::Int(*node as i64)));
            fields.push(("nodes", JVal::Int(*nodes as i64)));
        }
        Error::RootTrackingAmbiguity { margin } => {
            fields.push(("margin", JVal::Num(*margin)));
        }
        Error::PathUnsafe { t, disc, threshold } => {
            fields.push(("t", JVal::Num(*t)));
            fields.push(("discriminant", JVal::Num(*disc)));
            fields.push(("threshold", JVal::Num(*threshold)));
            param_t = Some(*t);
        }
        Error::StepUnderflow { t, step } => {
            fields.push(("t", JVal::Num(*t)));
            fields.push(("step", JVal::Num(*step)));
            param_t = Some(*t);
        }
        Error::TransportNonConvergence { max_steps } => {
            fields.push(("max_steps", JVal::Int(*max_steps as i64)));
        }
        Error::InvalidInput(_) | Error::CycleConstruction(_) | Error::Internal(_) => {}
    }
    if let (Some(t), Some(p)) = (param_t, path) {
        let point = p.point(t);
        fields.push((
            "parameter",
            JVal::Arr(point.iter().map(|z| JVal::complex(*z)).collect()),
        ));
    }
    json::render(&JVal::obj(vec![("error", JVal::obj(fields))]))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Periods(args) => cmd_periods(args),
        Command::GmCheck(args) => cmd_gm_check(args),
        Command::PfCheck(args) => cmd_pf_check(args),
        Command::PfTransport(args) => cmd_pf_transport(args),
        Command::Monodromy(args) => cmd_monodromy(args),
        Command::Actions(args) => cmd_actions(args),
        Command::Legendre(args) => cmd_legendre(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(doc) => {
            print!("{doc}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            print!("{}", failure.document);
            ExitCode::from(failure.code)
        }
    }
}

fn check_tol(tol: f64) -> sextic::Result<()> {
    if (1e-14..=1e-2).contains(&tol) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "tol {tol:e} outside the admissible range [1e-14, 1e-2]"
        )))
    }
}

fn json_only(args: &Common, command: &str) -> sextic::Result<()> {
    if args.output == Some(Format::Csv) {
        Err(Error::InvalidInput(format!(
            "{command} has no tabular output; use --output json"
        )))
    } else {
        Ok(())
    }
}

fn load_input(input: &Option<String>) -> sextic::Result<json::InputDoc> {
    let text = match input {
        None => {
            return Err(Error::InvalidInput(
                "this command needs --input (a file path, '-', or inline JSON)".into(),
            ))
        }
        Some(s) if s.trim_start().starts_with('{') => s.clone(),
        Some(s) if s == "-" => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::InvalidInput(format!("cannot read standard input: {e}")))?;
            buf
        }
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?,
    };
    json::parse_input(&text)
}

fn complex_row(values: &[C64]) -> JVal {
    JVal::Arr(values.iter().map(|z| JVal::complex(*z)).collect())
}

fn cmd_periods(args: &Common) -> Result<String, Failure> {
    check_tol(args.tol)?;
    json_only(args, "periods")?;
    let doc = load_input(&args.input)?;
    let curve = doc.curve.to_curve()?;
    let cycle = doc
        .cycle
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("periods needs a \"cycle\" entry".into()))?
        .to_cycle()?;
    let bs = Branches::from_curve(&curve)?;
    let pv = period_vector(&bs, &cycle, args.tol)?;
    eprintln!("quadrature nodes: {}", pv.nodes);
    Ok(json::render(&JVal::obj(vec![
        ("J", complex_row(&pv.j)),
        ("err", JVal::Num(pv.err)),
    ])))
}

fn cmd_gm_check(args: &Common) -> Result<String, Failure> {
    check_tol(args.tol)?;
    let doc = load_input(&args.input)?;
    let curve = doc.curve.to_curve()?;
    let bs = Branches::from_curve(&curve)?;
    let delta = 1e-5;
    let rows = verify::gm_fd_rows(&bs.e, delta, args.tol)?;
    match args.output.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("k,residual,delta\n");
            for (k, r) in rows.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", k + 1, fmt_f(*r), fmt_f(delta)));
            }
            Ok(out)
        }
        Format::Json => Ok(json::render(&JVal::obj(vec![(
            "rows",
            JVal::Arr(
                rows.iter()
                    .enumerate()
                    .map(|(k, r)| {
                        JVal::obj(vec![
                            ("k", JVal::Int(k as i64 + 1)),
                            ("residual", JVal::Num(*r)),
                            ("delta", JVal::Num(delta)),
                        ])
                    })
                    .collect(),
            ),
        )]))),
    }
}

fn cmd_pf_check(args: &Common) -> Result<String, Failure> {
    check_tol(args.tol)?;
    json_only(args, "pf-check")?;
    let doc = load_input(&args.input)?;
    let curve = doc.curve.to_curve()?;
    let route = route_equivalence_residual(&curve)?;
    let delta = 1e-5;
    let (fd_h1, fd_h2) = verify::pf_fd_max(&curve, delta, args.tol)?;
    let curvature = zero_curvature_residual(&curve, delta)?;
    let rho = roots_from_moduli(curve.h1, curve.h2, None)?;
    let identities = verify_root_identities(&rho);
    Ok(json::render(&JVal::obj(vec![
        ("route_equivalence_residual", JVal::Num(route)),
        (
            "fd_residuals",
            JVal::obj(vec![("h1", JVal::Num(fd_h1)), ("h2", JVal::Num(fd_h2))]),
        ),
        ("curvature_residual", JVal::Num(curvature)),
        (
            "identity_residuals",
            JVal::Arr(identities.iter().map(|r| JVal::Num(*r)).collect()),
        ),
    ])))
}

/// The path must start where the curve sits, otherwise the seeded period
/// vector belongs to a different point of moduli space.
fn check_path_start(path: &PathF, curve: &Curve, bs: &Branches) -> sextic::Result<()> {
    let start = path.start();
    let (expected, label): (Vec<C64>, &str) = match path.space {
        Space::H => (vec![curve.h1, curve.h2], "(h1, h2)"),
        Space::E => (bs.e.to_vec(), "branch points"),
    };
    let mut scale = 1.0f64;
    for z in &expected {
        scale = scale.max(cabs(*z));
    }
    for (idx, (s, x)) in start.iter().zip(&expected).enumerate() {
        if cabs(*s - *x) > 1e-9 * scale {
            return Err(Error::InvalidInput(format!(
                "path start component {} is {} + {}i but the curve {label} has {} + {}i",
                idx + 1,
                s.re,
                s.im,
                x.re,
                x.im
            )));
        }
    }
    Ok(())
}

fn transport_csv(samples: &[(f64, [C64; 5])]) -> String {
    let mut out = String::from(
        "t,J1_re,J1_im,J2_re,J2_im,J3_re,J3_im,J4_re,J4_im,J5_re,J5_im\n",
    );
    for (t, j) in samples {
        out.push_str(&fmt_f(*t));
        for z in j {
            out.push(',');
            out.push_str(&fmt_f(z.re));
            out.push(',');
            out.push_str(&fmt_f(z.im));
        }
        out.push('\n');
    }
    out
}

fn cmd_pf_transport(args: &Common) -> Result<String, Failure> {
    check_tol(args.tol)?;
    let doc = load_input(&args.input)?;
    let curve = doc.curve.to_curve()?;
    let path = doc
        .path
        .as_ref()
        .or(doc.loop_path.as_ref())
        .ok_or_else(|| Error::InvalidInput("pf-transport needs a \"path\" entry".into()))?
        .to_path()?;
    let cycle = match &doc.cycle {
        Some(c) => c.to_cycle()?,
        None => Cycle::BranchPair {
            i: 0,
            j: 1,
            winding: 1,
            sheet: 1,
        },
    };
    let bs = Branches::from_curve(&curve)?;
    check_path_start(&path, &curve, &bs)?;
    let j0 = period_vector(&bs, &cycle, args.tol)?;
    let format = args.output.unwrap_or(Format::Json);
    let record = format == Format::Csv;
    let res = propagate(&curve.a, &path, &Vec5(j0.j), args.tol, record)
        .map_err(|e| failure_with(e, Some(&path)))?;
    eprintln!(
        "transport: {} steps, max local error {:.3e}",
        res.steps, res.max_local_error
    );
    match format {
        Format::Csv => Ok(transport_csv(&res.samples)),
        Format::Json => Ok(json::render(&JVal::obj(vec![
            ("J_start", complex_row(&j0.j)),
            ("J_end", complex_row(&res.j_end.0)),
            ("steps", JVal::Int(res.steps as i64)),
            ("max_local_error", JVal::Num(res.max_local_error)),
            ("err_estimate", JVal::Num(res.err_estimate)),
        ]))),
    }
}

fn cmd_monodromy(args: &Common) -> Result<String, Failure> {
    check_tol(args.tol)?;
    let doc = load_input(&args.input)?;
    let curve = doc.curve.to_curve()?;
    let path = doc
        .loop_path
        .as_ref()
        .or(doc.path.as_ref())
        .ok_or_else(|| Error::InvalidInput("monodromy needs a \"loop\" entry".into()))?
        .to_path()?;
    // The loop start is the monodromy basepoint; only the a-parameters of
    // the curve enter (the moduli along the loop come from the path).
    let res =
        monodromy(&curve.a, &path, args.tol).map_err(|e| failure_with(e, Some(&path)))?;
    eprintln!(
        "monodromy: {} steps, max local error {:.3e}",
        res.steps, res.max_local_error
    );
    match args.output.unwrap_or(Format::Json) {
        Format::Csv => {
            let col0 = Vec5(std::array::from_fn(|r| res.basis.0[r][0]));
            let run = propagate(&curve.a, &path, &col0, args.tol, true)
                .map_err(|e| failure_with(e, Some(&path)))?;
            Ok(transport_csv(&run.samples))
        }
        Format::Json => {
            let m_rows: Vec<JVal> = (0..5).map(|i| complex_row(&res.m.0[i])).collect();
            let cycles: Vec<JVal> = res
                .basis_cycles
                .iter()
                .map(|(i, j)| {
                    JVal::Arr(vec![
                        JVal::Int(*i as i64 + 1),
                        JVal::Int(*j as i64 + 1),
                    ])
                })
                .collect();
            Ok(json::render(&JVal::obj(vec![
                ("M", JVal::Arr(m_rows)),
                ("det", JVal::complex(res.det_m)),
                ("liouville_residual", JVal::Num(res.liouville_residual)),
                ("basis_cycles", JVal::Arr(cycles)),
                ("steps", JVal::Int(res.steps as i64)),
                ("max_local_error", JVal::Num(res.max_local_error)),
            ])))
        }
    }
}

fn cmd_actions(args: &Common) -> Result<String, Failure> {
    check_tol(args.tol)?;
    json_only(args, "actions")?;
    let doc = load_input(&args.input)?;
    let curve = doc.curve.to_curve()?;
    let cycles_in = doc
        .cycles
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("actions needs a \"cycles\" array".into()))?;
    if cycles_in.is_empty() {
        return Err(Error::InvalidInput("\"cycles\" must not be empty".into()).into());
    }
    let cycles = cycles_in
        .iter()
        .map(|c| c.to_cycle())
        .collect::<sextic::Result<Vec<_>>>()?;
    let res = action_integrals(&curve, &cycles, args.tol)?;
    Ok(json::render(&JVal::obj(vec![
        ("actions", complex_row(&res.actions)),
        (
            "residuals",
            JVal::obj(vec![
                ("route_agreement", JVal::Num(res.route_agreement)),
                ("imag", JVal::Num(res.imag_residual)),
            ]),
        ),
    ])))
}

fn parse_modulus(text: &str) -> sextic::Result<C64> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| -> sextic::Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("cannot parse '{s}' as a real number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidInput("modulus must be finite".into()))
        }
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(parse(re)?, 0.0)),
        [re, im] => Ok(C64::new(parse(re)?, parse(im)?)),
        _ => Err(Error::InvalidInput(
            "--k expects `re` or `re,im`".into(),
        )),
    }
}

fn cmd_legendre(args: &LegendreArgs) -> Result<String, Failure> {
    check_tol(args.common.tol)?;
    json_only(&args.common, "legendre")?;
    let k = parse_modulus(&args.k)?;
    let modulus = EllipticModulus::new(k)?;
    let big_k = k_complete(&modulus)?;
    let ebar = ebar_complete(&modulus)?;
    let agm_k = k_agm(&modulus)?;
    let agm_e = ebar_agm(&modulus)?;
    let (sys_k, sys_e) = legendre_system_residual(&modulus, 1e-6)?;
    let second = hyper_residual(&modulus, 1e-4)?;
    Ok(json::render(&JVal::obj(vec![
        ("K", JVal::complex(big_k)),
        ("Ebar", JVal::complex(ebar)),
        (
            "residuals",
            JVal::obj(vec![
                ("agm_k", JVal::Num(cabs(big_k - agm_k))),
                ("agm_ebar", JVal::Num(cabs(ebar - agm_e))),
                ("system_k", JVal::Num(sys_k)),
                ("system_ebar", JVal::Num(sys_e)),
                ("second_order", JVal::Num(second)),
            ]),
        ),
    ])))
}

fn check_to_jval(line: &verify::CheckLine) -> JVal {
    JVal::obj(vec![
        ("name", JVal::Str(line.name.to_string())),
        ("value", JVal::Num(line.value)),
        ("bound", JVal::Num(line.bound)),
        (
            "direction",
            JVal::Str(
                match line.direction {
                    verify::Direction::AtMost => "at_most",
                    verify::Direction::AtLeast => "at_least",
                }
                .to_string(),
            ),
        ),
        ("passed", JVal::Bool(line.passed())),
    ])
}

fn cmd_verify(args: &Common) -> Result<String, Failure> {
    check_tol(args.tol)?;
    json_only(args, "verify")?;
    let (document, all_passed) = match &args.input {
        None => {
            let reports = verify::run_all(args.seed)?;
            let rank = verify::rank_diagnostic(&verify::fixture_curve())?;
            let all = reports.iter().all(|r| r.passed());
            let criteria: Vec<JVal> = reports
                .iter()
                .map(|r| {
                    JVal::obj(vec![
                        ("index", JVal::Int(r.index as i64)),
                        ("title", JVal::Str(r.title.to_string())),
                        ("passed", JVal::Bool(r.passed())),
                        (
                            "checks",
                            JVal::Arr(r.checks.iter().map(check_to_jval).collect()),
                        ),
                    ])
                })
                .collect();
            let doc = json::render(&JVal::obj(vec![
                ("suite", JVal::Str("bundled-fixture".to_string())),
                ("seed", JVal::Int(args.seed as i64)),
                ("criteria", JVal::Arr(criteria)),
                ("rank_ratio", JVal::Num(rank)),
                ("passed", JVal::Bool(all)),
            ]));
            (doc, all)
        }
        Some(_) => {
            let doc_in = load_input(&args.input)?;
            let curve = doc_in.curve.to_curve()?;
            let checks = verify::curve_checks(&curve, args.tol)?;
            let rank = verify::rank_diagnostic(&curve)?;
            let all = checks.iter().all(verify::CheckLine::passed);
            let doc = json::render(&JVal::obj(vec![
                ("suite", JVal::Str("curve-checks".to_string())),
                (
                    "checks",
                    JVal::Arr(checks.iter().map(check_to_jval).collect()),
                ),
                ("rank_ratio", JVal::Num(rank)),
                ("passed", JVal::Bool(all)),
            ]));
            (doc, all)
        }
    };
    if all_passed {
        Ok(document)
    } else {
        Err(Failure {
            code: 5,
            message: "verification failed: at least one check is out of bounds".to_string(),
            document,
        })
    }
}
