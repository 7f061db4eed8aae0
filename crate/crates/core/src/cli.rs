//! `photon-box run | sweep | verify`.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments,
//! 2 verification failure, 3 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{ConfigError, ConfigFile};
use crate::scenario::{run_scenario, sweep, verify, RunSummary, Scenario, SweepRow, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const CSV_HEADER: &str =
    "t,chi_p_qcl,chi_q_qcl,dq,dp,dqcl,dm_p,dm_q,dE_p,dE_q,dT,prod_p,prod_q,bound_ET,valid,degenerate_p,degenerate_q";

#[derive(Debug, Parser)]
#[command(
    name = "photon-box",
    version,
    about = "Photon-box uncertainty simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer photon energy and emission-time uncertainties for one scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Also write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate both inference routes over a range of measurement delays.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "t-min", allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long = "t-max", allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check closed forms against numeric integration and the matrix oracle.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Tolerance for the closed-form vs RK4 checks.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        oracle: bool,
    },
}

/// Ten significant digits, trailing zeros dropped: `5e-1`, `5.000000625e-1`.
pub fn format_report_value(x: f64) -> String {
    if !x.is_finite() {
        return format_nonfinite(x).to_owned();
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    format!("{:e}", rounded + 0.0)
}

/// Seventeen significant digits in scientific notation, `inf` for infinity.
pub fn format_csv_value(x: f64) -> String {
    if !x.is_finite() {
        return format_nonfinite(x).to_owned();
    }
    // `+ 0.0` folds negative zero.
    format!("{:.16e}", x + 0.0)
}

fn format_nonfinite(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

pub fn csv_line(row: &SweepRow) -> String {
    let nums = [
        row.t,
        row.chi_p_qcl,
        row.chi_q_qcl,
        row.dq,
        row.dp,
        row.dqcl,
        row.dm_p,
        row.dm_q,
        row.de_p,
        row.de_q,
        row.dt,
        row.prod_p,
        row.prod_q,
        row.bound_et,
    ];
    let mut fields: Vec<String> = nums.iter().map(|&x| format_csv_value(x)).collect();
    fields.extend([row.valid, row.degenerate_p, row.degenerate_q].map(|b| b.to_string()));
    fields.join(",")
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_line(row));
        out.push('\n');
    }
    out
}

pub fn render_run(summary: &RunSummary) -> String {
    let r = &summary.report;
    let mut lines = vec![
        format!("route = {}", r.route.label()),
        format!("t = {}", format_report_value(r.t)),
    ];
    for (key, value) in [
        ("dm", r.dm),
        ("dE", r.de),
        ("dT", r.dt),
        ("product", r.product),
        ("bound", r.bound),
        ("chi_p_qcl", summary.chi_p_qcl),
        ("chi_q_qcl", summary.chi_q_qcl),
    ] {
        lines.push(format!("{key} = {}", format_report_value(value)));
    }
    lines.push(format!("ok = {}", summary.ok));
    lines.push(format!("valid = {}", r.validity));
    lines.push(format!("degenerate = {}", r.degenerate));
    lines.join("\n") + "\n"
}

enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::Io(e.to_string()),
            ConfigError::Invalid(_) => Failure::Config(e.to_string()),
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    Ok(ConfigFile::load(path)?.to_scenario()?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Io(e.to_string()))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Run {
            config,
            out: json_path,
        } => {
            let summary = run_scenario(&load(&config)?)?;
            emit(out, &render_run(&summary))?;
            if let Some(path) = json_path {
                let json = serde_json::to_string_pretty(&summary).expect("report serializes");
                write_file(&path, &(json + "\n"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Sweep {
            config,
            t_min,
            t_max,
            steps,
            out: csv_path,
        } => {
            let rows = sweep(&load(&config)?, t_min, t_max, steps)?;
            write_file(&csv_path, &render_csv(&rows))?;
            emit(
                out,
                &format!("wrote {} rows to {}\n", rows.len(), csv_path.display()),
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            config,
            grid,
            tol,
            oracle,
        } => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Failure::Config(format!(
                    "--tol {tol} must be finite and > 0"
                )));
            }
            let scenario = load(&config)?;
            let tolerances = Tolerances {
                numeric: tol,
                ..Tolerances::default()
            };
            let report = verify(&scenario, grid, &tolerances, oracle)?;
            let mut table = format!(
                "{:<40} {:>24} {:>10}  status\n",
                "check", "max_deviation", "tolerance"
            );
            for c in &report.checks {
                table.push_str(&format!(
                    "{:<40} {:>24} {:>10}  {}\n",
                    c.name,
                    format_csv_value(c.max_deviation),
                    format!("{:e}", c.tolerance),
                    if c.passed { "PASS" } else { "FAIL" }
                ));
            }
            emit(out, &table)?;
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY
            })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_formatting() {
        assert_eq!(format_report_value(0.5), "5e-1");
        assert_eq!(format_report_value(0.50000006249999805), "5.000000625e-1");
        assert_eq!(format_report_value(2.0), "2e0");
        assert_eq!(format_report_value(f64::INFINITY), "inf");
        assert_eq!(format_report_value(-0.0), "0e0");
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(format_csv_value(0.5), "5.0000000000000000e-1");
        assert_eq!(format_csv_value(f64::INFINITY), "inf");
        assert_eq!(format_csv_value(-0.0), "0.0000000000000000e0");
        assert_eq!(format_csv_value(-1234.5), "-1.2345000000000000e3");
        // Seventeen significant digits round-trip every finite double.
        for x in [
            0.1,
            1.0 / 3.0,
            std::f64::consts::PI,
            2.0000002499999922,
            1e-300,
            f64::MAX,
        ] {
            assert_eq!(format_csv_value(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn header_has_seventeen_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 17);
        let row = crate::scenario::sweep(&Scenario::reference(), 0.5, 4.0, 2).unwrap()[0];
        assert_eq!(csv_line(&row).split(',').count(), 17);
    }

    #[test]
    fn bad_arguments_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run_cli(["photon-box", "launch"], &mut out, &mut err),
            EXIT_CONFIG
        );
        assert_eq!(
            run_cli(["photon-box", "run"], &mut out, &mut err),
            EXIT_CONFIG
        );
        assert_eq!(
            run_cli(["photon-box", "--help"], &mut out, &mut err),
            EXIT_OK
        );
    }
}
