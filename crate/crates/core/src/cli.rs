//! Command-line front end: argument parsing, grid scans, JSON/CSV emission.
//!
//! Exit codes: 0 when every requested check passed (or the query was purely
//! informational), 1 when at least one mathematical check failed, 2 on usage
//! or input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::criteria::{check_conditions, is_coprime_witness, scan_condition_implication};
use crate::galois_orbits::{orbit_census, orbit_separation_cover};
use crate::hodge_data::{dimension_set, isogeny_sum, HodgeProfile};
use crate::lemma_engine::{
    decide_even_lemma, threshold_oracle, verify_lemma_with, verify_separation, LemmaScanOptions,
    Verdict,
};
use crate::report::{Cell, CellResult, Detail, Status, VerificationReport};
use crate::unit_group::{prime_powers_in, UnitGroup, DEFAULT_MAX_Q};

pub const MAX_Q_ENV: &str = "CYCLO_HODGE_MAX_Q";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cyclo-hodge", version, about = "Exhaustive checks for superelliptic Hodge data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid scans.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,
    /// Omit the wall-time field.
    #[arg(long, global = true)]
    no_timing: bool,
    #[arg(long, hide = true, global = true)]
    inject_fault: bool,
}

#[derive(Debug, Args, Clone, Default)]
struct Grid {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    q_max: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Genus and Hodge-group dimensions for (n, q).
    Dims(Grid),
    /// Hypotheses (A), (B), (C) and the coprime witness.
    Check(Grid),
    /// Exhaustive rigidity-lemma check for all q <= q-max.
    VerifyLemma {
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        a: Option<i64>,
    },
    /// Profiles, conditions and separation over a grid.
    Scan {
        #[command(flatten)]
        grid: Grid,
        /// Also check profiles with n > q.
        #[arg(long)]
        include_n_greater_q: bool,
    },
    /// Pair-orbit census, optionally with the separation cover for n.
    Orbits(Grid),
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn max_q() -> Result<u64, UsageError> {
    match std::env::var(MAX_Q_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(|c| c.min(DEFAULT_MAX_Q))
            .map_err(|_| UsageError(format!("{MAX_Q_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_MAX_Q),
    }
}

fn group(q: u64, cap: u64) -> Result<UnitGroup, UsageError> {
    Ok(UnitGroup::with_cap(q, cap)?)
}

impl Grid {
    fn qs(&self, cap: u64) -> Result<Vec<UnitGroup>, UsageError> {
        match (self.q, self.q_max) {
            (Some(q), _) => Ok(vec![group(q, cap)?]),
            (None, Some(q_max)) => {
                if q_max > cap {
                    return Err(UsageError(format!("q-max {q_max} exceeds the cap {cap}")));
                }
                Ok(prime_powers_in(2, q_max)
                    .into_iter()
                    .map(|q| UnitGroup::with_cap(q, cap).expect("prime power under cap"))
                    .collect())
            }
            (None, None) => Err(UsageError("one of --q or --q-max is required".into())),
        }
    }

    fn ns(&self) -> Result<Vec<u64>, UsageError> {
        match (self.n, self.n_max) {
            (Some(n), _) => Ok(vec![n]),
            (None, Some(n_max)) => Ok((4..=n_max).collect()),
            (None, None) => Err(UsageError("one of --n or --n-max is required".into())),
        }
    }

    /// A single explicit point: invalid parameters are usage errors rather
    /// than silently skipped cells.
    fn is_point(&self) -> bool {
        self.n.is_some() && self.q.is_some()
    }
}

fn dims(grid: &Grid, cap: u64) -> Result<VerificationReport, UsageError> {
    let mut report = VerificationReport::new("dims");
    for g in grid.qs(cap)? {
        for n in grid.ns()? {
            let dims = match dimension_set(n, &g) {
                Ok(d) => d,
                Err(e) if grid.is_point() => return Err(e.into()),
                Err(_) => continue,
            };
            let iso = isogeny_sum(n, &g);
            let ok = iso == dims.genus
                && dims.genus == (n - 1) * (g.q() - 1) / 2
                && dims.new_dim == (n - 1) * g.phi() / 2
                && dims.unitary_dim == g.phi() / 2 * (n - 1) * (n - 1)
                && dims.ss_lower_bound == g.phi() / 2 * ((n - 1) * (n - 1) - 1);
            report.push(CellResult {
                cell: Cell::nq(n, g.q()),
                status: if ok { Status::Pass } else { Status::Fail },
                detail: Detail::Dimensions { dims, isogeny_sum: iso },
            });
        }
    }
    Ok(report)
}

fn check(grid: &Grid, cap: u64) -> Result<VerificationReport, UsageError> {
    if !grid.is_point() {
        if let (Some(n_max), Some(q_max), None, None) = (grid.n_max, grid.q_max, grid.n, grid.q) {
            if q_max > cap {
                return Err(UsageError(format!("q-max {q_max} exceeds the cap {cap}")));
            }
            return Ok(scan_condition_implication(n_max, q_max));
        }
    }
    let mut report = VerificationReport::new("check");
    for g in grid.qs(cap)? {
        for n in grid.ns()? {
            let cond = match check_conditions(n, &g) {
                Ok(c) => c,
                Err(e) if grid.is_point() => return Err(e.into()),
                Err(_) => continue,
            };
            let witness_ok = cond.witness.map_or(true, |a| is_coprime_witness(n, &g, a));
            let status = if (cond.any_holds && !cond.witness_exists) || !witness_ok {
                Status::Fail
            } else if cond.any_holds {
                Status::Pass
            } else {
                Status::Info
            };
            report.push(CellResult {
                cell: Cell::nq(n, g.q()),
                status,
                detail: Detail::Conditions(cond),
            });
        }
    }
    Ok(report)
}

fn verify_lemma(
    q_max: Option<u64>,
    q: Option<u64>,
    a: Option<i64>,
    cap: u64,
    inject_fault: bool,
) -> Result<VerificationReport, UsageError> {
    match (q_max, q, a) {
        (Some(q_max), None, None) => {
            if q_max > cap {
                return Err(UsageError(format!("q-max {q_max} exceeds the cap {cap}")));
            }
            let opts = LemmaScanOptions {
                inject_fault,
                ..Default::default()
            };
            Ok(verify_lemma_with(q_max, &opts))
        }
        (None, Some(q), Some(a)) => {
            let g = group(q, cap)?;
            let a = g.unit(a)?;
            let cert = decide_even_lemma(&g, a);
            let oracle = threshold_oracle(&g, a);
            let trivial = a == g.one() || a == g.minus_one();
            let forced = cert.verdict == Verdict::ConstantForced;
            let ok = cert.check(&g).is_ok() && oracle == forced && (trivial || forced);
            let mut report = VerificationReport::new("verify-lemma");
            report.push(CellResult {
                cell: Cell::qa(g.q(), a.residue()),
                status: if ok { Status::Pass } else { Status::Fail },
                detail: Detail::Lemma {
                    verdict: cert.verdict,
                    b_max: cert.b_max,
                    step_tag: cert.step_tag,
                    oracle_agrees: oracle == forced,
                    counterexample: cert.counterexample,
                    merge_log: Some(cert.trace.merge_log),
                },
            });
            Ok(report)
        }
        _ => Err(UsageError("verify-lemma takes either --q-max, or --q with --a".into())),
    }
}

/// Profiles, conditions, separation and orbit cover over a grid. Profiles
/// and separation are restricted to `n < q` unless `include_n_greater_q`;
/// conditions are always evaluated for every valid `(n, q)`.
pub fn scan_grid(
    groups: &[UnitGroup],
    ns: &[u64],
    include_n_greater_q: bool,
    inject_fault: bool,
) -> VerificationReport {
    let partial: Vec<Vec<CellResult>> = groups
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut out = Vec::new();
            let mut fault_pending = inject_fault && gi + 1 == groups.len();
            for &n in ns {
                if n < 4 || n % g.p() == 0 {
                    continue;
                }
                let cond = check_conditions(n, g).expect("valid parameters");
                let forward = !cond.any_holds || cond.witness_exists;
                out.push(CellResult {
                    cell: Cell::nq(n, g.q()),
                    status: if forward { Status::Pass } else { Status::Fail },
                    detail: Detail::Conditions(cond),
                });
                if n >= g.q() && !include_n_greater_q {
                    continue;
                }
                let Ok(mut profile) = HodgeProfile::build(n, g) else {
                    out.push(CellResult {
                        cell: Cell::nq(n, g.q()),
                        status: Status::Fail,
                        detail: Detail::Profile {
                            violations: vec!["profile construction failed".into()],
                            h_constant: false,
                        },
                    });
                    continue;
                };
                if fault_pending {
                    profile.corrupt_for_testing();
                    fault_pending = false;
                }
                let violations = profile.check_invariants();
                let h_constant = profile.is_h_constant();
                let expect_nonconstant = n < g.q();
                out.push(CellResult {
                    cell: Cell::nq(n, g.q()),
                    status: if violations.is_empty() && !(expect_nonconstant && h_constant) {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    detail: Detail::Profile { violations, h_constant },
                });
                if n < g.q() {
                    let sep = verify_separation(&profile);
                    let cover = orbit_separation_cover(&profile);
                    let agree = sep.passed() == cover.passed();
                    for mut r in sep.results.into_iter().chain(cover.results) {
                        if !agree {
                            r.status = Status::Fail;
                        }
                        out.push(r);
                    }
                }
            }
            out
        })
        .collect();
    let mut report = VerificationReport::new("scan");
    for r in partial.into_iter().flatten() {
        report.push(r);
    }
    report
}

fn orbits(grid: &Grid, cap: u64) -> Result<VerificationReport, UsageError> {
    let groups = grid.qs(cap)?;
    let mut report = VerificationReport::new("orbits");
    let ns = if grid.n.is_some() || grid.n_max.is_some() { grid.ns()? } else { Vec::new() };
    for g in &groups {
        report.push(orbit_census(g));
        for &n in &ns {
            if n >= g.q() && !grid.is_point() {
                continue;
            }
            let profile = match HodgeProfile::build(n, g) {
                Ok(p) => p,
                Err(e) if grid.is_point() => return Err(e.into()),
                Err(_) => continue,
            };
            for r in verify_separation(&profile).results {
                report.push(r);
            }
            for r in orbit_separation_cover(&profile).results {
                report.push(r);
            }
        }
    }
    Ok(report)
}

fn echo(report: VerificationReport, global: &GlobalOpts, extra: &[(&str, Option<String>)]) -> VerificationReport {
    let mut report = report
        .with_param("format", format!("{:?}", global.format).to_lowercase())
        .with_param("jobs", global.jobs);
    for (k, v) in extra {
        if let Some(v) = v {
            report = report.with_param(k, v);
        }
    }
    report
}

fn grid_params(grid: &Grid) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("n", grid.n.map(|v| v.to_string())),
        ("q", grid.q.map(|v| v.to_string())),
        ("n_max", grid.n_max.map(|v| v.to_string())),
        ("q_max", grid.q_max.map(|v| v.to_string())),
    ]
}

fn execute(cli: &Cli) -> Result<VerificationReport, UsageError> {
    let cap = max_q()?;
    let g = &cli.global;
    let (report, params) = match &cli.command {
        Command::Dims(grid) => (dims(grid, cap)?, grid_params(grid)),
        Command::Check(grid) => (check(grid, cap)?, grid_params(grid)),
        Command::VerifyLemma { q_max, q, a } => (
            verify_lemma(*q_max, *q, *a, cap, g.inject_fault)?,
            vec![
                ("q_max", q_max.map(|v| v.to_string())),
                ("q", q.map(|v| v.to_string())),
                ("a", a.map(|v| v.to_string())),
            ],
        ),
        Command::Scan { grid, include_n_greater_q } => {
            let groups = grid.qs(cap)?;
            let ns = grid.ns()?;
            let report = scan_grid(&groups, &ns, *include_n_greater_q, g.inject_fault);
            let mut params = grid_params(grid);
            params.push(("include_n_greater_q", Some(include_n_greater_q.to_string())));
            (report, params)
        }
        Command::Orbits(grid) => (orbits(grid, cap)?, grid_params(grid)),
    };
    let mut report = echo(report, g, &params);
    report.invocation.command = command_name(&cli.command).to_string();
    Ok(report.finalized())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Dims(_) => "dims",
        Command::Check(_) => "check",
        Command::VerifyLemma { .. } => "verify-lemma",
        Command::Scan { .. } => "scan",
        Command::Orbits(_) => "orbits",
    }
}

/// CSV header for the report's subcommand.
pub fn csv_header(command: &str) -> &'static [&'static str] {
    match command {
        "dims" => &["n", "q", "genus", "new_dim", "e_dim", "half_deg", "unitary_dim", "ss_lower_bound"],
        "check" => &["n", "q", "p", "holds_A", "holds_B", "holds_C", "any_holds", "witness", "status"],
        "verify-lemma" => &["q", "a", "verdict", "b_max", "step_tag", "oracle_agrees", "status"],
        _ => &["n", "q", "kind", "status", "checked", "failures"],
    }
}

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Info => "info",
    }
}

fn csv_row(command: &str, r: &CellResult) -> Vec<String> {
    let c = &r.cell;
    let st = status_str(r.status).to_string();
    match (command, &r.detail) {
        ("dims", Detail::Dimensions { dims: d, .. }) => vec![
            opt(c.n),
            c.q.to_string(),
            d.genus.to_string(),
            d.new_dim.to_string(),
            d.e_dim.to_string(),
            d.half_deg.to_string(),
            d.unitary_dim.to_string(),
            d.ss_lower_bound.to_string(),
        ],
        ("check", Detail::Conditions(k)) => vec![
            k.n.to_string(),
            k.q.to_string(),
            k.p.to_string(),
            k.holds_a.to_string(),
            k.holds_b.to_string(),
            k.holds_c.to_string(),
            k.any_holds.to_string(),
            opt(k.witness),
            st,
        ],
        ("verify-lemma", Detail::Lemma { verdict, b_max, step_tag, oracle_agrees, .. }) => vec![
            c.q.to_string(),
            opt(c.a),
            format!("{verdict:?}"),
            b_max.to_string(),
            step_tag.map(|t| t.to_string()).unwrap_or_default(),
            oracle_agrees.to_string(),
            st,
        ],
        (_, d) => {
            let (kind, checked, failures) = match d {
                Detail::Dimensions { .. } => ("dimensions", 1, (r.status == Status::Fail) as u64),
                Detail::Conditions(_) => ("conditions", 1, (r.status == Status::Fail) as u64),
                Detail::Lemma { .. } => ("lemma", 1, (r.status == Status::Fail) as u64),
                Detail::Profile { violations, .. } => ("profile", 1, violations.len() as u64),
                Detail::Separation { good_pairs, unseparated } => {
                    ("separation", *good_pairs, unseparated.len() as u64)
                }
                Detail::OrbitCover { orbits, uncovered, .. } => {
                    ("orbit_cover", *orbits, uncovered.len() as u64)
                }
                Detail::Orbits { good_orbits, .. } => ("orbits", *good_orbits, 0),
            };
            vec![opt(c.n), c.q.to_string(), kind.into(), st, checked.to_string(), failures.to_string()]
        }
    }
}

/// Writes one row per cell, in grid order, after the subcommand's header.
pub fn write_csv<W: Write>(report: &VerificationReport, out: W) -> csv::Result<()> {
    let command = report.invocation.command.as_str();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(command))?;
    for r in &report.results {
        w.write_record(csv_row(command, r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &VerificationReport, path: &Path) -> io::Result<()> {
    let file = File::create(path)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    write_csv(report, file).map_err(|e| io::Error::other(format!("{}: {e}", path.display())))
}

fn emit(report: &VerificationReport, global: &GlobalOpts, stdout: &mut dyn Write) -> io::Result<()> {
    match (&global.out, global.format) {
        (Some(path), Format::Csv) => emit_csv(report, path),
        (Some(path), Format::Json) => {
            let mut f = File::create(path)
                .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            serde_json::to_writer_pretty(&mut f, report)?;
            writeln!(f)
        }
        (None, Format::Csv) => {
            let mut buf = Vec::new();
            write_csv(report, &mut buf).map_err(io::Error::other)?;
            stdout.write_all(&buf)
        }
        (None, Format::Json) => {
            serde_json::to_writer_pretty(&mut *stdout, report)?;
            writeln!(stdout)
        }
    }
}

/// Parses `argv`, runs the subcommand and writes the report. Returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
            } else {
                let _ = write!(stdout, "{e}");
            }
            return code;
        }
    };
    if cli.global.jobs == 0 {
        let _ = writeln!(stderr, "error: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let start = Instant::now();
    let mut report = match pool.install(|| execute(&cli)) {
        Ok(r) => r,
        Err(UsageError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    if !cli.global.no_timing {
        report.summary.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let _ = writeln!(
        stderr,
        "{}: {} cells, {} passed, {} failed, {} informational",
        report.invocation.command,
        report.summary.cells,
        report.summary.passed,
        report.summary.failed,
        report.summary.informational
    );
    if let Err(e) = emit(&report, &cli.global, stdout) {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}
