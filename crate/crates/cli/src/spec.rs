//! JSON problem files.

use std::path::Path;

use conmorse::{BoundaryCondition, ConstraintFunction, Interval, Numerics, Potential, SchroedingerProblem};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpecFile {
    pub interval: IntervalSpec,
    pub potential: PotentialSpec,
    pub bc: BcSpec,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default)]
    pub numerics: NumericsSpec,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BcSpec {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant(ConstantParams),
    Table(TableParams),
    ExpressionId(ExpressionParams),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConstraintSpec {
    Constant(ConstantParams),
    Table(TableParams),
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    pub value: f64,
}

/// Samples joined by straight lines.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TableParams {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

/// `polynomial`: `Σ cₖ xᵏ`. `cosine-series`: `Σ cₖ cos(k·frequency·x)`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpressionParams {
    pub id: String,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub frequency: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSpec {
    /// RK4 steps per unit length.
    pub steps: Option<usize>,
    pub lambda_grid: Option<usize>,
    pub t_grid: Option<usize>,
    pub n_interior: Option<usize>,
    pub t_min_fraction: Option<f64>,
    #[serde(default)]
    pub tolerances: TolerancesSpec,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSpec {
    pub intersection: Option<f64>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

impl TableParams {
    fn validate(&self, what: &str, interval: &Interval) -> Result<(), CliError> {
        if self.x.len() < 2 || self.x.len() != self.values.len() {
            return Err(input(format!("{what} table needs matching x and values with at least 2 entries")));
        }
        if self.x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(input(format!("{what} table x must be strictly increasing")));
        }
        if self.values.iter().chain(&self.x).any(|v| !v.is_finite()) {
            return Err(input(format!("{what} table has non-finite entries")));
        }
        if self.x[0] > interval.left() || *self.x.last().unwrap() < interval.right() {
            return Err(input(format!("{what} table does not cover the interval")));
        }
        Ok(())
    }

    fn segment(x: &[f64], t: f64) -> usize {
        x.partition_point(|&v| v <= t).clamp(1, x.len() - 1) - 1
    }

    fn into_fns(self) -> (impl Fn(f64) -> f64 + Clone, impl Fn(f64) -> f64 + Clone) {
        let (x, v) = (std::sync::Arc::new(self.x), std::sync::Arc::new(self.values));
        let (x2, v2) = (x.clone(), v.clone());
        let value = move |t: f64| {
            let i = Self::segment(&x, t);
            let s = (t - x[i]) / (x[i + 1] - x[i]);
            v[i] + s * (v[i + 1] - v[i])
        };
        let slope = move |t: f64| {
            let i = Self::segment(&x2, t);
            (v2[i + 1] - v2[i]) / (x2[i + 1] - x2[i])
        };
        (value, slope)
    }
}

fn potential(spec: PotentialSpec, interval: &Interval) -> Result<Potential, CliError> {
    Ok(match spec {
        PotentialSpec::Constant(c) => Potential::constant(c.value),
        PotentialSpec::Table(t) => {
            t.validate("potential", interval)?;
            Potential::new(t.into_fns().0)
        }
        PotentialSpec::ExpressionId(e) => {
            if e.coefficients.is_empty() {
                return Err(input("expression needs at least one coefficient"));
            }
            let c = e.coefficients;
            match e.id.as_str() {
                "polynomial" => {
                    if e.frequency.is_some() {
                        return Err(input("polynomial takes no frequency"));
                    }
                    Potential::new(move |x| c.iter().rev().fold(0.0, |acc, &a| acc * x + a))
                }
                "cosine-series" => {
                    let w = e.frequency.ok_or_else(|| input("cosine-series needs a frequency"))?;
                    Potential::new(move |x| c.iter().enumerate().map(|(k, a)| a * (k as f64 * w * x).cos()).sum())
                }
                other => return Err(input(format!("unknown expression id {other:?}"))),
            }
        }
    })
}

fn constraint(spec: ConstraintSpec, interval: &Interval) -> Result<ConstraintFunction, CliError> {
    Ok(match spec {
        ConstraintSpec::Constant(c) => ConstraintFunction::constant(c.value),
        ConstraintSpec::Table(t) => {
            t.validate("constraint", interval)?;
            let (f, df) = t.into_fns();
            ConstraintFunction::new(f, df)
        }
    })
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(input(format!("{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl NumericsSpec {
    pub fn resolve(&self, steps_override: Option<usize>) -> Result<Numerics, CliError> {
        positive("tolerances.intersection", self.tolerances.intersection)?;
        positive("t_min_fraction", self.t_min_fraction)?;
        if self.t_min_fraction.is_some_and(|f| f >= 1.0) {
            return Err(input("t_min_fraction must be below 1"));
        }
        let d = Numerics::default();
        let n = Numerics {
            steps_per_unit: steps_override.or(self.steps).unwrap_or(d.steps_per_unit),
            lambda_grid: self.lambda_grid.unwrap_or(d.lambda_grid),
            t_grid: self.t_grid.unwrap_or(d.t_grid),
            n_interior: self.n_interior.unwrap_or(d.n_interior),
            intersection_tol: self.tolerances.intersection.unwrap_or(d.intersection_tol),
            t_min_fraction: self.t_min_fraction.unwrap_or(d.t_min_fraction),
        };
        if n.steps_per_unit == 0 {
            return Err(input("steps must be positive"));
        }
        Ok(n)
    }
}

/// A parsed, validated problem with its numerics.
pub struct LoadedSpec {
    pub problem: SchroedingerProblem,
    pub numerics: Numerics,
}

impl ProblemSpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| input(format!("spec: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn load(self, steps_override: Option<usize>) -> Result<LoadedSpec, CliError> {
        let interval = Interval::new(self.interval.left, self.interval.right)?;
        let numerics = self.numerics.resolve(steps_override)?;
        let bc = match self.bc {
            BcSpec::Dirichlet => BoundaryCondition::Dirichlet,
            BcSpec::Neumann => BoundaryCondition::Neumann,
        };
        let potential = potential(self.potential, &interval)?;
        let constraints = self.constraints.into_iter().map(|c| constraint(c, &interval)).collect::<Result<_, _>>()?;
        let problem = SchroedingerProblem::new(interval, potential, bc, constraints)?;
        Ok(LoadedSpec { problem, numerics })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BENCH: &str = r#"{
        "interval": {"left": -1, "right": 1},
        "potential": {"kind": "constant", "params": {"value": -25}},
        "bc": "dirichlet",
        "constraints": [{"kind": "constant", "params": {"value": 1}}]
    }"#;

    #[test]
    fn parses_benchmark() {
        let s = ProblemSpecFile::parse(BENCH).unwrap().load(None).unwrap();
        assert_eq!(s.problem.constraint_count(), 1);
        assert_eq!(s.problem.potential().value(0.3), -25.0);
        assert_eq!(s.numerics, Numerics::default());
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = BENCH.replace("\"bc\"", "\"colour\": 1, \"bc\"");
        assert!(ProblemSpecFile::parse(&bad).is_err());
        let bad = BENCH.replace("{\"value\": -25}", "{\"value\": -25, \"slope\": 1}");
        assert!(ProblemSpecFile::parse(&bad).is_err());
    }

    #[test]
    fn invalid_interval_message() {
        let bad = BENCH.replace("\"right\": 1", "\"right\": -1");
        let err = ProblemSpecFile::parse(&bad).unwrap().load(None).err().unwrap();
        assert!(err.to_string().contains("invalid interval"));
    }

    #[test]
    fn expressions_and_tables() {
        let poly = PotentialSpec::ExpressionId(ExpressionParams {
            id: "polynomial".into(),
            coefficients: vec![1.0, 2.0, 3.0],
            frequency: None,
        });
        let iv = Interval::new(0.0, 1.0).unwrap();
        assert_eq!(potential(poly, &iv).unwrap().value(2.0), 17.0);
        let cos = PotentialSpec::ExpressionId(ExpressionParams {
            id: "cosine-series".into(),
            coefficients: vec![1.0, 2.0],
            frequency: Some(std::f64::consts::PI),
        });
        assert!((potential(cos, &iv).unwrap().value(1.0) + 1.0).abs() < 1e-15);
        let table = TableParams { x: vec![0.0, 0.5, 1.0], values: vec![0.0, 1.0, 3.0] };
        let c = constraint(ConstraintSpec::Table(table), &iv).unwrap();
        assert_eq!(c.value(0.25), 0.5);
        assert_eq!(c.value(0.75), 2.0);
        assert_eq!(c.derivative(0.75), 4.0);
        let short = TableParams { x: vec![0.2, 1.0], values: vec![0.0, 1.0] };
        assert!(constraint(ConstraintSpec::Table(short), &iv).is_err());
    }

    #[test]
    fn tolerances_must_be_positive() {
        let n = NumericsSpec { tolerances: TolerancesSpec { intersection: Some(-1.0) }, ..Default::default() };
        assert!(n.resolve(None).is_err());
        let n = NumericsSpec { steps: Some(4096), ..Default::default() };
        assert_eq!(n.resolve(Some(1024)).unwrap().steps_per_unit, 1024);
    }
}
