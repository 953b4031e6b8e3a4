//! Metapopulation models, vaccination strategies and cost functions.
//!
//! A model is a nonnegative next-generation matrix `K` together with the
//! group sizes `μ` (a probability vector). `K[i][j]` is the expected number
//! of infections in group `i` caused by one unvaccinated infectious member of
//! group `j`; the discrete kernel is `k_d(i, j) = K[i][j] / μ_j`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Weight sums further than this from 1 are rejected.
pub const WEIGHT_SUM_REJECT: f64 = 1e-9;
/// Weight sums within this of 1 are kept bit-for-bit.
pub const WEIGHT_SUM_EXACT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MetapopModel {
    matrix: Matrix,
    weights: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl MetapopModel {
    /// Validates and builds a model. Weights summing to within `1e-9` of one
    /// are renormalized; anything further off is rejected.
    pub fn new(matrix: Matrix, weights: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = matrix.dim();
        if n == 0 {
            return Err(Error::Validation("model must have at least one group".into()));
        }
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weights.len(),
            });
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: l.len(),
                });
            }
        }
        if !matrix.is_finite() {
            return Err(Error::Validation("matrix contains NaN or infinite entries".into()));
        }
        if !matrix.is_nonnegative() {
            return Err(Error::Validation("matrix contains negative entries".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::Validation("weights must be finite and strictly positive".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_REJECT {
            return Err(Error::Validation(format!("weights sum to {sum}, expected 1")));
        }
        let weights = if (sum - 1.0).abs() > WEIGHT_SUM_EXACT {
            weights.iter().map(|w| w / sum).collect()
        } else {
            weights
        };
        Ok(MetapopModel {
            matrix,
            weights,
            labels,
        })
    }

    /// Model with equal group sizes `1/N`.
    pub fn uniform(matrix: Matrix) -> Result<Self> {
        let n = matrix.dim();
        MetapopModel::new(matrix, vec![1.0 / n as f64; n], None)
    }

    pub fn n(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Discrete kernel value `k_d(i, j) = K[i][j] / μ_j`.
    pub fn kernel(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)] / self.weights[j]
    }

    /// `K · diag(η)`.
    pub fn effective_matrix(&self, eta: &Strategy) -> Result<Matrix> {
        self.check_dim(eta.len())?;
        Ok(self.matrix.scale_columns(eta.values()))
    }

    /// Model on the groups `idx` with their sizes renormalized to one.
    pub fn restrict(&self, idx: &[usize]) -> Result<MetapopModel> {
        let mass: f64 = idx.iter().map(|&i| self.weights[i]).sum();
        let weights = idx.iter().map(|&i| self.weights[i] / mass).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| idx.iter().map(|&i| l[i].clone()).collect());
        MetapopModel::new(self.matrix.submatrix(idx), weights, labels)
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got,
            });
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s)?;
        file.into_model()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from(self))?)
    }
}

/// On-disk model layout.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub weights: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ModelFile {
    pub fn into_model(self) -> Result<MetapopModel> {
        if self.matrix.len() != self.n {
            return Err(Error::Validation(format!(
                "n = {} but matrix has {} rows",
                self.n,
                self.matrix.len()
            )));
        }
        let matrix = Matrix::from_rows(&self.matrix)
            .map_err(|e| Error::Validation(format!("matrix is not square: {e}")))?;
        MetapopModel::new(matrix, self.weights, self.labels)
    }
}

impl From<&MetapopModel> for ModelFile {
    fn from(m: &MetapopModel) -> Self {
        ModelFile {
            n: m.n(),
            weights: m.weights.clone(),
            matrix: m.matrix.to_rows(),
            labels: m.labels.clone(),
        }
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MetapopModel> {
    let text = fs::read_to_string(path)?;
    MetapopModel::from_json_str(&text)
}

pub fn save_model(model: &MetapopModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model.to_json_string()?)?;
    Ok(())
}

/// Vaccination strategy: `η_i` is the fraction of group `i` left unvaccinated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Strategy(Vec<f64>);

impl Strategy {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Validation(format!("strategy entry {bad} outside [0, 1]")));
        }
        Ok(Strategy(values))
    }

    /// Clamps into `[0, 1]`; NaN becomes 0.
    pub fn clamped(values: Vec<f64>) -> Self {
        Strategy(
            values
                .into_iter()
                .map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) })
                .collect(),
        )
    }

    /// No vaccination.
    pub fn ones(n: usize) -> Self {
        Strategy(vec![1.0; n])
    }

    /// Everybody vaccinated.
    pub fn zeros(n: usize) -> Self {
        Strategy(vec![0.0; n])
    }

    /// `1_A`
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut v = vec![0.0; n];
        for &i in set {
            v[i] = 1.0;
        }
        Strategy(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// `{i : η_i > 0}`
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] > 0.0).collect()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().fold(0.0, |m, &v| m.max(v))
    }

    /// `λ η`, clamped into the box.
    pub fn scaled(&self, lambda: f64) -> Strategy {
        Strategy::clamped(self.0.iter().map(|v| v * lambda).collect())
    }

    /// `η · 1_A`
    pub fn masked(&self, keep: &[usize]) -> Strategy {
        let mut v = vec![0.0; self.len()];
        for &i in keep {
            v[i] = self.0[i];
        }
        Strategy(v)
    }
}

/// Cost of a strategy: `C(η) = Σ c_i μ_i (1 − η_i)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CostFunction {
    /// `c_i = 1`: the vaccinated fraction of the population.
    Uniform,
    /// Per-group unit costs, all strictly positive.
    Affine(Vec<f64>),
}

impl CostFunction {
    pub fn affine(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Validation("affine cost needs coefficients".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(Error::Validation(
                "affine cost coefficients must be finite and strictly positive".into(),
            ));
        }
        Ok(CostFunction::Affine(coefficients))
    }

    /// Per-group marginal weights `w_i = c_i μ_i`, so that `C(η) = Σ w_i (1 − η_i)`.
    pub fn group_weights(&self, model: &MetapopModel) -> Result<Vec<f64>> {
        match self {
            CostFunction::Uniform => Ok(model.weights().to_vec()),
            CostFunction::Affine(c) => {
                model.check_dim(c.len())?;
                Ok(c.iter().zip(model.weights()).map(|(c, m)| c * m).collect())
            }
        }
    }

    pub fn evaluate(&self, model: &MetapopModel, eta: &Strategy) -> Result<f64> {
        model.check_dim(eta.len())?;
        let w = self.group_weights(model)?;
        Ok(cost_with_weights(&w, eta.values()))
    }

    /// `c_max = C(𝟘)`
    pub fn c_max(&self, model: &MetapopModel) -> Result<f64> {
        Ok(compensated_sum(self.group_weights(model)?))
    }

    /// Same cost seen from a sub-model on `idx` whose group sizes were
    /// renormalized by their total mass.
    pub fn restrict(&self, model: &MetapopModel, idx: &[usize]) -> Result<CostFunction> {
        let mass: f64 = idx.iter().map(|&i| model.weights()[i]).sum();
        match self {
            CostFunction::Uniform => CostFunction::affine(vec![mass; idx.len()]),
            CostFunction::Affine(c) => {
                model.check_dim(c.len())?;
                CostFunction::affine(idx.iter().map(|&i| c[i] * mass).collect())
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CostFunction::Uniform => "uniform".into(),
            CostFunction::Affine(c) => format!(
                "affine:{}",
                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

pub(crate) fn cost_with_weights(w: &[f64], eta: &[f64]) -> f64 {
    compensated_sum(w.iter().zip(eta).map(|(w, e)| w * (1.0 - e)))
}

/// Neumaier summation. Costs such as six twelfths should come out as
/// exactly one half.
pub(crate) fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        comp += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + comp
}

/// Free-function form of [`CostFunction::evaluate`].
pub fn cost(c: &CostFunction, model: &MetapopModel, eta: &Strategy) -> Result<f64> {
    c.evaluate(model, eta)
}

/// A kernel on `[0, 1]²` sampled at the cell centers of a uniform `M × M` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridKernelSpec {
    samples: Matrix,
}

impl GridKernelSpec {
    pub fn new(samples: Matrix) -> Result<Self> {
        if samples.dim() == 0 {
            return Err(Error::Validation("grid needs at least one point".into()));
        }
        if !samples.is_finite() {
            return Err(Error::Validation("grid samples contain NaN or infinite values".into()));
        }
        if !samples.is_nonnegative() {
            return Err(Error::Validation("grid samples must be nonnegative".into()));
        }
        Ok(GridKernelSpec { samples })
    }

    /// Samples `k(x, y)` at the midpoints `x_i = (i + 1/2) / M`.
    pub fn from_fn(grid_points: usize, k: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let m = grid_points as f64;
        GridKernelSpec::new(Matrix::from_fn(grid_points, |i, j| {
            k((i as f64 + 0.5) / m, (j as f64 + 0.5) / m)
        }))
    }

    pub fn grid_points(&self) -> usize {
        self.samples.dim()
    }

    pub fn samples(&self) -> &Matrix {
        &self.samples
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: GridFile = serde_json::from_str(s)?;
        if file.samples.len() != file.grid_points {
            return Err(Error::Validation(format!(
                "grid_points = {} but {} sample rows",
                file.grid_points,
                file.samples.len()
            )));
        }
        let samples = Matrix::from_rows(&file.samples)
            .map_err(|e| Error::Validation(format!("samples are not square: {e}")))?;
        GridKernelSpec::new(samples)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GridFile {
    pub grid_points: usize,
    pub samples: Vec<Vec<f64>>,
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<GridKernelSpec> {
    GridKernelSpec::from_json_str(&fs::read_to_string(path)?)
}

/// `K_ij = k(x_i, x_j) / M`, `μ_i = 1 / M`.
pub fn grid_to_model(spec: &GridKernelSpec) -> Result<MetapopModel> {
    let m = spec.grid_points();
    let h = 1.0 / m as f64;
    let matrix = spec.samples.scaled(h);
    MetapopModel::new(matrix, vec![h; m], None)
}

/// Discrete double norm `‖k_d‖_{p,q}` with `1/p + 1/q = 1`.
pub fn double_norm(model: &MetapopModel, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Validation(format!("double norm exponent must be in (1, ∞), got {p}")));
    }
    let q = p / (p - 1.0);
    let mu = model.weights();
    let n = model.n();
    let outer: f64 = (0..n)
        .map(|i| {
            let inner: f64 = (0..n).map(|j| model.kernel(i, j).abs().powf(q) * mu[j]).sum();
            mu[i] * inner.powf(p / q)
        })
        .sum();
    Ok(outer.powf(1.0 / p))
}
