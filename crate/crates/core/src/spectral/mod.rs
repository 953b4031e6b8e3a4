//! Spectral radius, full spectrum, inertia, and the dominant eigenpair of
//! `K·diag(η)` together with the gradient of `η ↦ R_e(η)`.

pub mod eigen;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::matrix::Matrix;
use crate::model::{MetapopModel, Strategy};

/// Relative width of the Collatz–Wielandt bracket at which power iteration stops.
const BRACKET_TOL: f64 = 1e-13;
const POWER_MAX_ITERS: usize = 300;
/// Relative cluster width for multiplicities and the real/zero tests.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCluster {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

/// All eigenvalues of a matrix with clustered multiplicities and inertia counts.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    #[serde(skip)]
    pub values: Vec<Complex64>,
    pub eigenvalues: Vec<EigenCluster>,
    pub radius: f64,
    pub p_count: usize,
    pub n_count: usize,
    pub is_real: bool,
    pub tol: f64,
}

impl Spectrum {
    fn from_values(mut values: Vec<Complex64>) -> Self {
        values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        let radius = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = CLUSTER_TOL * radius.max(1.0);
        let is_real = values.iter().all(|z| z.im.abs() <= tol);
        let p_count = values.iter().filter(|z| z.im.abs() <= tol && z.re > tol).count();
        let n_count = values.iter().filter(|z| z.im.abs() <= tol && z.re < -tol).count();

        // single-linkage clustering in the complex plane
        let n = values.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (values[i] - values[j]).norm() <= tol {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[b.max(a)] = a.min(b);
                    }
                }
            }
        }
        let mut eigenvalues: Vec<EigenCluster> = Vec::new();
        let mut root_pos = vec![usize::MAX; n];
        let mut sums = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            if root_pos[r] == usize::MAX {
                root_pos[r] = eigenvalues.len();
                eigenvalues.push(EigenCluster {
                    re: 0.0,
                    im: 0.0,
                    multiplicity: 0,
                });
                sums.push(Complex64::new(0.0, 0.0));
            }
            let k = root_pos[r];
            eigenvalues[k].multiplicity += 1;
            sums[k] += values[i];
        }
        for (c, s) in eigenvalues.iter_mut().zip(sums) {
            let mean = s / c.multiplicity as f64;
            c.re = mean.re;
            c.im = if mean.im.abs() <= tol { 0.0 } else { mean.im };
        }
        Spectrum {
            values,
            eigenvalues,
            radius,
            p_count,
            n_count,
            is_real,
            tol,
        }
    }

    /// Multiplicity of the cluster containing `lambda`, 0 if none.
    pub fn multiplicity(&self, lambda: Complex64) -> usize {
        self.values
            .iter()
            .filter(|z| (**z - lambda).norm() <= self.tol)
            .count()
    }

    /// Real parts of the eigenvalues, sorted descending.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

/// Dominant eigenpair of a nonnegative matrix.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPair {
    pub value: f64,
    /// Right eigenvector, nonnegative with unit 1-norm.
    pub right: Vec<f64>,
    /// Left eigenvector, nonnegative with `⟨φ, v⟩ = 1`.
    pub left: Vec<f64>,
}

fn check_nonnegative(a: &Matrix) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::Validation("matrix contains NaN or infinite entries".into()));
    }
    if !a.is_nonnegative() {
        return Err(Error::Validation("matrix has negative entries".into()));
    }
    Ok(())
}

/// Perron root of an irreducible nonnegative block by shifted power
/// iteration, bracketed by Collatz–Wielandt bounds.
fn perron_root(b: &Matrix) -> Result<f64> {
    let n = b.dim();
    let (b, _) = eigen::balance(b);
    let max_diag = (0..n).map(|i| b[(i, i)]).fold(0.0, f64::max);
    let s = max_diag + b.max_abs();
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_749_895).fract()))
        .collect();
    let norm: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= norm);
    for _ in 0..POWER_MAX_ITERS {
        let mut y = b.mul_vec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += s * xi;
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if hi - lo <= BRACKET_TOL * hi {
            return Ok((0.5 * (lo + hi) - s).max(0.0));
        }
        let total: f64 = y.iter().sum();
        if !(total.is_finite() && total > 0.0) || y.iter().any(|&v| v <= 0.0) {
            break;
        }
        x = y.into_iter().map(|v| v / total).collect();
    }
    // slow mixing: take the dense spectrum, then polish by inverse
    // iteration until the bracket closes
    let ev = eigen::general_eigenvalues(&b)?;
    let mu = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sigma = mu * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE;
    for _ in 0..8 {
        let y: Vec<f64> = eigen::shifted_solve(&b, sigma, &x).iter().map(|v| v.abs()).collect();
        let total: f64 = y.iter().sum();
        if !(total.is_finite() && total > 0.0) || y.iter().any(|&v| v <= 0.0) {
            break;
        }
        x = y.into_iter().map(|v| v / total).collect();
        let bx = b.mul_vec(&x);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in bx.iter().zip(&x) {
            lo = lo.min(yi / xi);
            hi = hi.max(yi / xi);
        }
        if hi - lo <= BRACKET_TOL * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(mu)
}

/// Spectral radius of a nonnegative matrix.
///
/// The radius is the maximum over strongly connected components of the
/// component radius; singleton components contribute their diagonal entry.
/// A matrix whose support graph is acyclic is nilpotent and gets exactly 0.
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    check_nonnegative(a)?;
    let g = Digraph::from_support(a, 0.0);
    let mut rho = 0.0f64;
    for comp in g.scc() {
        let r = if comp.len() == 1 {
            a[(comp[0], comp[0])]
        } else {
            perron_root(&a.submatrix(&comp))?
        };
        rho = rho.max(r);
    }
    Ok(rho)
}

/// Whether `A` is nilpotent, decided on the support graph.
pub fn is_nilpotent(a: &Matrix) -> bool {
    !Digraph::from_support(a, 0.0).has_cycle()
}

/// Every eigenvalue of a real square matrix with clustered multiplicities.
/// Exactly symmetric input goes through Jacobi so the spectrum comes back real.
pub fn full_spectrum(a: &Matrix) -> Result<Spectrum> {
    if !a.is_finite() {
        return Err(Error::Validation("matrix contains NaN or infinite entries".into()));
    }
    let values = if a.is_symmetric(0.0) {
        eigen::symmetric_eigenvalues(a)?
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    } else {
        eigen::general_eigenvalues(a)?
    };
    Ok(Spectrum::from_values(values))
}

/// `(p, n)`: positive and negative eigenvalue counts with multiplicity.
pub fn inertia(a: &Matrix) -> Result<(usize, usize)> {
    let s = full_spectrum(a)?;
    if !s.is_real {
        return Err(Error::ComplexSpectrum);
    }
    Ok((s.p_count, s.n_count))
}

/// `R_e(η) = ρ(K·diag(η))`.
pub fn effective_re(model: &MetapopModel, eta: &Strategy) -> Result<f64> {
    spectral_radius(&model.effective_matrix(eta)?)
}

/// `R_0 = R_e(𝟙)`.
pub fn basic_reproduction_number(model: &MetapopModel) -> Result<f64> {
    spectral_radius(model.matrix())
}

/// Unit 1-norm nonnegative eigenvector of `a` for the eigenvalue `rho` by
/// inverse iteration.
fn perron_vector(a: &Matrix, rho: f64) -> Result<Vec<f64>> {
    let n = a.dim();
    let sigma = rho * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE;
    let mut x = vec![1.0 / n as f64; n];
    let tol = 1e-10 * rho.max(1.0);
    for _ in 0..50 {
        let y = eigen::shifted_solve(a, sigma, &x);
        let sum: f64 = y.iter().sum();
        if !(sum.is_finite() && sum != 0.0) {
            return Err(Error::NonConvergence("inverse iteration broke down".into()));
        }
        x = y.into_iter().map(|v| (v / sum).max(0.0)).collect();
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        let ax = a.mul_vec(&x);
        let resid = ax
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - rho * q).abs())
            .fold(0.0, f64::max);
        if resid <= tol {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence("inverse iteration did not reach the residual bound".into()))
}

/// Smallest distance from `rho` to any other eigenvalue of `a`.
fn dominant_gap(a: &Matrix, rho: f64) -> Result<f64> {
    let values = if a.is_symmetric(0.0) {
        eigen::symmetric_eigenvalues(a)?
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    } else {
        eigen::general_eigenvalues(a)?
    };
    let target = Complex64::new(rho, 0.0);
    let closest = values
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| (**x - target).norm().total_cmp(&(**y - target).norm()))
        .map(|(i, _)| i);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != closest)
        .map(|(_, z)| (z - target).norm())
        .fold(f64::INFINITY, f64::min))
}

/// Dominant eigenpair of `K·diag(η)`. Fails when `ρ = 0` or when another
/// eigenvalue lies within `1e-8·ρ` of `ρ`.
pub fn dominant_pair(model: &MetapopModel, eta: &Strategy) -> Result<EigenPair> {
    let a = model.effective_matrix(eta)?;
    dominant_pair_of(&a)
}

pub fn dominant_pair_of(a: &Matrix) -> Result<EigenPair> {
    let rho = spectral_radius(a)?;
    if rho == 0.0 {
        return Err(Error::ZeroRadius);
    }
    let gap = dominant_gap(a, rho)?;
    if gap <= CLUSTER_TOL * rho {
        return Err(Error::NonSimple { gap });
    }
    let right = perron_vector(a, rho)?;
    let mut left = perron_vector(&a.transpose(), rho)?;
    let dot: f64 = left.iter().zip(&right).map(|(p, q)| p * q).sum();
    if !(dot > 0.0) {
        return Err(Error::NonSimple { gap });
    }
    left.iter_mut().for_each(|v| *v /= dot);
    Ok(EigenPair {
        value: rho,
        right,
        left,
    })
}

/// Gradient of `η ↦ ρ(K·diag(η))`: `∂_j R_e = (Kᵀφ)_j v_j / ⟨φ, v⟩`.
pub fn re_gradient(model: &MetapopModel, eta: &Strategy) -> Result<Vec<f64>> {
    let pair = dominant_pair(model, eta)?;
    Ok(gradient_from_pair(model.matrix(), &pair))
}

pub(crate) fn gradient_from_pair(k: &Matrix, pair: &EigenPair) -> Vec<f64> {
    let dot: f64 = pair.left.iter().zip(&pair.right).map(|(p, q)| p * q).sum();
    k.vec_mul(&pair.left)
        .into_iter()
        .zip(&pair.right)
        .map(|(kt_phi, v)| kt_phi * v / dot)
        .collect()
}
