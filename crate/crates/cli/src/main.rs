//! `conmorse`: Morse-index reports, conjugate-point scans and soliton
//! tables from the command line.
//!
//! Exit status: 0 on success (and route agreement for `morse`), 1 on bad
//! input or a numerical failure, 2 when the requested routes disagree.

mod report;
mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conmorse::conjugate::{dirichlet_defect, scan, DomainFamily};
use conmorse::constraint_matrix::{constraint_matrix, default_lambda_sequence, index_limit};
use conmorse::maslov::sweep;
use conmorse::nls::{c_function, soliton, verdict, DEFAULT_WINDOW};
use conmorse::shooting::steps_for;
use conmorse::{morse_report, Route};
use serde::{Deserialize, Serialize};

use report::{to_json, ConjugateSection, LimitSection, MaslovSection, MatrixSampleRow, NumericsEcho, ReportFile};
use spec::{LoadedSpec, ProblemSpecFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Numerics(#[from] conmorse::Error),
    #[error("{0}")]
    Io(String),
}

#[derive(Parser, Debug)]
#[command(name = "conmorse", version, about = "Morse indices of constrained Schrödinger operators on an interval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Problem file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// RK4 steps per unit length, overriding the file.
    #[arg(long)]
    steps: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the selected routes and compare their indices.
    Morse {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated subset of direct,matrix,maslov,conjugate.
        #[arg(long, default_value = "direct,matrix,maslov,conjugate")]
        routes: String,
    },
    /// Defect table over a family of intervals shrinking about the midpoint.
    ConjugateScan {
        #[command(flatten)]
        spec: SpecArgs,
        /// Smallest t; the family is the full interval at t = 1.
        #[arg(long)]
        shrink_to: Option<f64>,
        /// CSV destination (default stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// c(t) table and slope verdict for a power-law soliton.
    Nls {
        #[arg(long)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        /// Table covers δ < |t| ≤ tmax.
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        /// Samples per side.
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constraint matrix at one λ, or its negative count along λ → 0⁻.
    ConstraintMatrix {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
    },
    /// Crossings of the λ-sweep.
    MaslovSweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Write the (lambda, evans) samples as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load(args: &SpecArgs) -> Result<LoadedSpec, CliError> {
    ProblemSpecFile::read(&args.spec)?.load(args.steps)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn csv_text<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_routes(list: &str) -> Result<Vec<Route>, CliError> {
    let mut routes = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let r: Route = name.parse().map_err(|_| CliError::Input(format!("unknown route {name:?}")))?;
        if !routes.contains(&r) {
            routes.push(r);
        }
    }
    if routes.is_empty() {
        return Err(CliError::Input("no routes selected".into()));
    }
    routes.sort();
    Ok(routes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub t: f64,
    pub defect: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CRow {
    pub t: f64,
    pub c: f64,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub evans: f64,
}

#[derive(Serialize)]
struct ScanReport {
    toolkit: &'static str,
    version: &'static str,
    t_min: f64,
    conjugate: ConjugateSection,
    numerics: NumericsEcho,
}

#[derive(Serialize)]
struct SweepReport {
    toolkit: &'static str,
    version: &'static str,
    maslov: MaslovSection,
    numerics: NumericsEcho,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Morse { spec, routes } => {
            let routes = parse_routes(&routes)?;
            let loaded = load(&spec)?;
            let report = morse_report(&loaded.problem, &routes, &loaded.numerics)?;
            let file = ReportFile::new(&report, &loaded.numerics);
            emit(spec.out.as_deref(), &to_json(&file))?;
            Ok(if file.agreement { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::ConjugateScan { spec, shrink_to, csv } => {
            let loaded = load(&spec)?;
            let t_min = shrink_to.unwrap_or(loaded.numerics.t_min_fraction);
            if !(t_min > 0.0 && t_min < 1.0) {
                return Err(CliError::Input(format!("--shrink-to must lie in (0, 1), got {t_min}")));
            }
            let p = &loaded.problem;
            if p.bc() != conmorse::BoundaryCondition::Dirichlet {
                return Err(CliError::Input("conjugate-scan needs a dirichlet problem".into()));
            }
            let family = DomainFamily::centred(&p.interval(), t_min)?;
            let report = scan(p, &family, &loaded.numerics.scan_options())?;
            let steps = steps_for(&p.interval(), loaded.numerics.steps_per_unit);
            let mut rows = Vec::new();
            for &(t, defect) in &report.samples {
                let multiplicity = dirichlet_defect(p, t, &family, steps)?.multiplicity;
                rows.push(DefectRow { t, defect, multiplicity });
            }
            for c in report.conjugate_points.iter().chain(&report.endpoint_crossings) {
                let d = dirichlet_defect(p, c.parameter, &family, steps)?;
                rows.push(DefectRow { t: c.parameter, defect: d.defect, multiplicity: d.multiplicity });
            }
            rows.sort_by(|a, b| a.t.total_cmp(&b.t));
            rows.dedup_by(|a, b| a.t == b.t);
            emit(csv.as_deref(), &csv_text(&rows)?)?;
            if let Some(out) = spec.out.as_deref() {
                let r = ScanReport {
                    toolkit: report::TOOLKIT,
                    version: report::VERSION,
                    t_min,
                    conjugate: ConjugateSection::from(&report),
                    numerics: NumericsEcho::from(&loaded.numerics),
                };
                emit(Some(out), &to_json(&r))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Nls { p, omega, tmax, samples, out } => {
            let s = soliton(p, omega)?;
            if !(tmax > DEFAULT_WINDOW) || samples < 2 {
                return Err(CliError::Input(format!("need tmax > {DEFAULT_WINDOW} and samples >= 2")));
            }
            let v = verdict(p, omega)?;
            let lo = DEFAULT_WINDOW * 1.001;
            let mags: Vec<f64> = (0..samples).map(|k| lo + (tmax - lo) * k as f64 / (samples - 1) as f64).collect();
            let mut rows = Vec::with_capacity(2 * samples);
            for &m in mags.iter().rev() {
                rows.push(CRow { t: -m, c: c_function(&s, -m)?, region: "left".into() });
            }
            for &m in &mags {
                rows.push(CRow { t: m, c: c_function(&s, m)?, region: "right".into() });
            }
            let mut text = format!("# singularity window |t| <= {DEFAULT_WINDOW} excluded\n");
            text.push_str(&csv_text(&rows)?);
            text.push_str(&format!("verdict: {} vk_slope: {}\n", v.verdict, v.vk_slope));
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ConstraintMatrix { spec, lambda } => {
            let loaded = load(&spec)?;
            let p = &loaded.problem;
            let steps = steps_for(&p.interval(), loaded.numerics.steps_per_unit);
            let text = match lambda {
                Some(l) => to_json(&MatrixSampleRow::from(&constraint_matrix(p, l, steps)?)),
                None => to_json(&LimitSection::from(&index_limit(p, &default_lambda_sequence(p)?, steps)?)),
            };
            emit(spec.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MaslovSweep { spec, csv } => {
            let loaded = load(&spec)?;
            let r = sweep(&loaded.problem, &loaded.numerics.sweep_options())?;
            if let Some(path) = csv.as_deref() {
                let rows: Vec<SweepRow> = r.samples.iter().map(|&(lambda, evans)| SweepRow { lambda, evans }).collect();
                emit(Some(path), &csv_text(&rows)?)?;
            }
            let out = SweepReport {
                toolkit: report::TOOLKIT,
                version: report::VERSION,
                maslov: MaslovSection::from(&r),
                numerics: NumericsEcho::from(&loaded.numerics),
            };
            emit(spec.out.as_deref(), &to_json(&out))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_lists() {
        assert_eq!(parse_routes("maslov, direct,maslov").unwrap(), vec![Route::Direct, Route::Maslov]);
        assert!(parse_routes("direct,eigen").is_err());
        assert!(parse_routes("").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            DefectRow { t: 0.1 + 0.2, defect: -1.234e-17, multiplicity: 0 },
            DefectRow { t: std::f64::consts::PI / 5.0, defect: 3.0, multiplicity: 1 },
        ];
        let text = csv_text(&rows).unwrap();
        assert!(text.starts_with("t,defect,multiplicity\n"));
        let back: Vec<DefectRow> =
            csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(back, rows);
    }
}
