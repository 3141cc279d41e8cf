//! Serialisable mirrors of the core reports.

use std::collections::BTreeMap;

use conmorse::morse::MatrixRoute;
use conmorse::{
    ConjugateReport, ConstraintMatrixSample, CrossingKind, CrossingRecord, IndexLimitReport, LambdaSweepReport,
    MorseReport, Numerics,
};
use serde::{Deserialize, Serialize};

pub const TOOLKIT: &str = "conmorse";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRow {
    pub parameter: f64,
    pub kind: String,
    pub dimension: usize,
    pub signature: [usize; 2],
    pub form_values: Vec<f64>,
}

impl From<&CrossingRecord> for CrossingRow {
    fn from(c: &CrossingRecord) -> Self {
        Self {
            parameter: c.parameter,
            kind: match c.kind {
                CrossingKind::LambdaSweep => "lambda".into(),
                CrossingKind::DomainSweep => "domain".into(),
            },
            dimension: c.dimension,
            signature: [c.signature.0, c.signature.1],
            form_values: c.form_values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaslovSection {
    pub index: usize,
    pub maslov_index: i64,
    pub kernel_dimension: usize,
    pub lambda_infinity: f64,
    pub monotone: bool,
    pub crossings: Vec<CrossingRow>,
}

impl From<&LambdaSweepReport> for MaslovSection {
    fn from(r: &LambdaSweepReport) -> Self {
        Self {
            index: r.morse_index,
            maslov_index: r.maslov_index,
            kernel_dimension: r.kernel_dimension,
            lambda_infinity: r.lambda_infinity,
            monotone: r.monotone,
            crossings: r.crossings.iter().map(CrossingRow::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSampleRow {
    pub lambda: f64,
    pub negative_count: usize,
    pub eigenvalues: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
    pub symmetry_defect: f64,
}

impl From<&ConstraintMatrixSample> for MatrixSampleRow {
    fn from(s: &ConstraintMatrixSample) -> Self {
        Self {
            lambda: s.lambda,
            negative_count: s.negative_count,
            eigenvalues: s.eigenvalues.clone(),
            matrix: (0..s.matrix.rows()).map(|i| s.matrix.row(i).to_vec()).collect(),
            symmetry_defect: s.symmetry_defect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSection {
    pub limit: usize,
    pub samples: Vec<MatrixSampleRow>,
    pub poles: Vec<f64>,
}

impl From<&IndexLimitReport> for LimitSection {
    fn from(r: &IndexLimitReport) -> Self {
        Self {
            limit: r.limit,
            samples: r.samples.iter().map(MatrixSampleRow::from).collect(),
            poles: r.poles.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSection {
    pub index: usize,
    pub unconstrained_index: usize,
    pub index_limit: LimitSection,
}

impl From<&MatrixRoute<f64>> for MatrixSection {
    fn from(m: &MatrixRoute<f64>) -> Self {
        Self {
            index: m.constrained_index,
            unconstrained_index: m.unconstrained_index,
            index_limit: LimitSection::from(&m.limit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateSection {
    pub index: usize,
    pub conjugate_points: Vec<CrossingRow>,
    pub endpoint_crossings: Vec<CrossingRow>,
    pub shrinks_to_point: bool,
    pub small_t_certificate: bool,
    pub spectral_flow_only: bool,
}

impl From<&ConjugateReport> for ConjugateSection {
    fn from(r: &ConjugateReport) -> Self {
        Self {
            index: r.total_count,
            conjugate_points: r.conjugate_points.iter().map(CrossingRow::from).collect(),
            endpoint_crossings: r.endpoint_crossings.iter().map(CrossingRow::from).collect(),
            shrinks_to_point: r.shrinks_to_point,
            small_t_certificate: r.small_t_certificate,
            spectral_flow_only: r.spectral_flow_only,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectSection {
    pub index: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Routes {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct: Option<DirectSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maslov: Option<MaslovSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugate: Option<ConjugateSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericsEcho {
    pub steps_per_unit: usize,
    pub lambda_grid: usize,
    pub t_grid: usize,
    pub n_interior: usize,
    pub intersection_tol: f64,
    pub t_min_fraction: f64,
}

impl From<&Numerics> for NumericsEcho {
    fn from(n: &Numerics) -> Self {
        Self {
            steps_per_unit: n.steps_per_unit,
            lambda_grid: n.lambda_grid,
            t_grid: n.t_grid,
            n_interior: n.n_interior,
            intersection_tol: n.intersection_tol,
            t_min_fraction: n.t_min_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub toolkit: String,
    pub version: String,
    pub indices: BTreeMap<String, usize>,
    pub agreement: bool,
    pub routes: Routes,
    pub skipped: BTreeMap<String, String>,
    pub numerics: NumericsEcho,
}

impl ReportFile {
    pub fn new(report: &MorseReport, numerics: &Numerics) -> Self {
        Self {
            toolkit: TOOLKIT.into(),
            version: VERSION.into(),
            indices: report.indices().into_iter().map(|(r, n)| (r.to_string(), n)).collect(),
            agreement: report.agreement(),
            routes: Routes {
                direct: report.direct.map(|index| DirectSection { index }),
                matrix: report.matrix.as_ref().map(MatrixSection::from),
                maslov: report.maslov.as_ref().map(MaslovSection::from),
                conjugate: report.conjugate.as_ref().map(ConjugateSection::from),
            },
            skipped: report.skipped.iter().map(|(r, why)| (r.to_string(), why.clone())).collect(),
            numerics: NumericsEcho::from(numerics),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}
