//! Command-line front end: `affine-orth verify <scenario> [options]`.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on a
//! usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::scenarios::{run_all, run_scenario, Scenario, ScenarioConfig, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "affine-orth", version, about = "Numerical checks for diagonal metrics and deformed connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification scenario and report residuals
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Hopf,
    TorusFlat,
    LocalFrame,
    Theorem1,
    QuasiMetric,
    GaussBonnet,
    All,
}

impl ScenarioArg {
    fn scenario(self) -> Option<Scenario> {
        match self {
            Self::Hopf => Some(Scenario::Hopf),
            Self::TorusFlat => Some(Scenario::TorusFlat),
            Self::LocalFrame => Some(Scenario::LocalFrame),
            Self::Theorem1 => Some(Scenario::Theorem1),
            Self::QuasiMetric => Some(Scenario::QuasiMetric),
            Self::GaussBonnet => Some(Scenario::GaussBonnet),
            Self::All => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    scenario: ScenarioArg,
    /// Connection parameters, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<f64>>,
    /// Deformation parameters in [0, 1], comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,
    #[arg(long)]
    dim: Option<usize>,
    /// Quadrature points per axis (at least 4)
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiplies every tolerance
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    tol_scale: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parsed and validated command line.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub scenario: Option<Scenario>,
    pub scenario_config: ScenarioConfig,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl CliConfig {
    /// Single-scenario runs produce one JSON object, `all` an array.
    pub fn is_all(&self) -> bool {
        self.scenario.is_none()
    }
}

fn parse(args: impl IntoIterator<Item = OsString>) -> Result<CliConfig, clap::Error> {
    let Command::Verify(v) = Cli::try_parse_from(args)?.command;
    Ok(CliConfig {
        scenario: v.scenario.scenario(),
        scenario_config: ScenarioConfig {
            k: v.k,
            t: v.t,
            dim: v.dim,
            grid: v.grid,
            seed: v.seed,
            tol_scale: v.tol_scale,
        },
        format: v.format,
        output: v.output,
    })
}

pub fn render_text(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let verdict = if r.overall { "PASS" } else { "FAIL" };
        out.push_str(&format!("scenario {} {verdict}", r.scenario));
        if let Some(seed) = r.seed {
            out.push_str(&format!(" (seed {seed})"));
        }
        out.push_str(&format!(" in {:.1} ms\n", r.runtime_ms));
        for c in &r.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let op = if c.name.starts_with("min_") { ">" } else { "<=" };
            out.push_str(&format!(
                "  {mark} {:<40} residual {:?} {op} {:?}\n",
                c.name, c.residual, c.tolerance
            ));
        }
        if let Some(f) = &r.first_failure {
            out.push_str(&format!("  first failure: {}", f.check));
            if let Some(p) = &f.point {
                out.push_str(&format!(" at {p:?}"));
            }
            if let Some(e) = &f.error {
                out.push_str(&format!(" ({e})"));
            }
            out.push('\n');
        }
    }
    out
}

pub fn render_json(reports: &[VerificationReport], as_array: bool) -> String {
    let doc = if as_array {
        serde_json::to_string_pretty(reports)
    } else {
        serde_json::to_string_pretty(&reports[0])
    };
    doc.expect("reports serialize") + "\n"
}

/// Runs a validated configuration and returns the exit code.
pub fn run(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let reports = match config.scenario {
        Some(s) => run_scenario(s, &config.scenario_config).map(|r| vec![r]),
        None => run_all(&config.scenario_config),
    };
    let reports = match reports {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let body = match config.format {
        Format::Text => render_text(&reports),
        Format::Json => render_json(&reports, config.is_all()),
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, &body),
        None => stdout.write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_FAIL;
    }
    if reports.iter().all(|r| r.overall) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Entry point used by the binary: parse, run, return the exit code.
pub fn main_with_args(
    args: impl IntoIterator<Item = OsString>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    match parse(args) {
        Ok(config) => run(&config, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(line: &str) -> Vec<OsString> {
        std::iter::once("affine-orth")
            .chain(line.split_whitespace())
            .map(OsString::from)
            .collect()
    }

    fn exit_code(line: &str) -> (i32, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(args(line), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
    }

    #[test]
    fn parses_lists_and_negative_values() {
        let c = parse(args("verify torus-flat --k -1,0,0.5 --seed 3 --format json")).unwrap();
        assert_eq!(c.scenario, Some(Scenario::TorusFlat));
        assert_eq!(c.scenario_config.k, Some(vec![-1.0, 0.0, 0.5]));
        assert_eq!(c.scenario_config.seed, 3);
        assert_eq!(c.format, Format::Json);
        assert!(parse(args("verify all")).unwrap().is_all());
    }

    #[test]
    fn usage_errors_exit_2() {
        for line in [
            "verify nope",
            "verify",
            "verify hopf --dim x",
            "verify theorem1 --t 1.5",
            "verify quasi-metric --grid 3",
            "verify hopf --dim 0",
            "verify hopf --tol-scale 0",
            "verify hopf --tol-scale -1",
        ] {
            assert_eq!(exit_code(line).0, EXIT_USAGE, "{line}");
        }
    }

    #[test]
    fn text_and_json_agree_on_residuals() {
        let cfg = ScenarioConfig::default();
        let r = run_scenario(Scenario::LocalFrame, &cfg).unwrap();
        let text = render_text(std::slice::from_ref(&r));
        for c in &r.checks {
            assert!(text.contains(&format!("{:?}", c.residual)), "{}", c.name);
        }
        let back: VerificationReport = serde_json::from_str(&render_json(&[r.clone()], false)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn failing_check_exits_1() {
        let (code, out) = exit_code("verify torus-flat --k 0.5,0.5");
        assert_eq!(code, EXIT_FAIL);
        assert!(out.contains("FAIL"));
    }
}
