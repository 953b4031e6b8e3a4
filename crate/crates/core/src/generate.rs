//! Random model generators for property tests and the verification harness.

use rand::Rng;

use crate::matrix::Matrix;
use crate::model::{MetapopModel, Strategy};

/// Positive weights summing to one.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn random_strategy<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Strategy {
    Strategy::clamped((0..n).map(|_| rng.gen::<f64>()).collect())
}

/// Nonnegative matrix where each entry is zero with probability `1 − density`.
pub fn random_nonnegative<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Matrix {
    Matrix::from_fn(n, |_, _| {
        if rng.gen_bool(density) {
            rng.gen_range(0.0..5.0)
        } else {
            0.0
        }
    })
}

/// Block lower-triangular matrix in a random relabelling of the indices.
/// Diagonal blocks are dense positive, except that a block of size one may
/// come out as zero. Returns the matrix and the blocks (in original labels).
/// Later blocks never infect earlier ones.
pub fn random_block_triangular<R: Rng + ?Sized>(
    rng: &mut R,
    sizes: &[usize],
) -> (Matrix, Vec<Vec<usize>>) {
    let n: usize = sizes.iter().sum();
    let mut block_of = Vec::with_capacity(n);
    for (b, &s) in sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat(b).take(s));
    }
    let zero_block: Vec<bool> = sizes.iter().map(|&s| s == 1 && rng.gen_bool(0.3)).collect();
    let base = Matrix::from_fn(n, |i, j| {
        let (bi, bj) = (block_of[i], block_of[j]);
        if bi == bj {
            if zero_block[bi] {
                0.0
            } else {
                rng.gen_range(0.1..3.0)
            }
        } else if bi > bj && rng.gen_bool(0.4) {
            // earlier block j infects later block i
            rng.gen_range(0.0..3.0)
        } else {
            0.0
        }
    });
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let m = Matrix::from_fn(n, |i, j| base[(perm[i], perm[j])]);
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut blocks = vec![Vec::new(); sizes.len()];
    for old in 0..n {
        blocks[block_of[old]].push(inv[old]);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    (m, blocks)
}

fn random_positive_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.2..2.0)).collect()
}

/// `BᵀB` for a random nonnegative `B`: symmetric, positive semidefinite,
/// entrywise nonnegative.
pub fn random_psd_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let b = Matrix::from_fn(n, |_, _| {
        if rng.gen_bool(0.7) {
            rng.gen_range(0.0..2.0)
        } else {
            0.0
        }
    });
    b.transpose().matmul(&b)
}

/// Symmetric nonnegative matrix with exactly one positive eigenvalue:
/// `v vᵀ − ε W` with `W` positive semidefinite and `ε` small enough to keep
/// every entry nonnegative.
pub fn random_single_positive_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let v = random_positive_vec(rng, n);
    let w = random_psd_symmetric(rng, n);
    let min_vv = v.iter().fold(f64::INFINITY, |m, &x| m.min(x * x));
    let max_w = w.max_abs();
    let eps = if max_w > 0.0 {
        rng.gen_range(0.1..0.9) * min_vv / max_w
    } else {
        0.0
    };
    Matrix::from_fn(n, |i, j| (v[i] * v[j] - eps * w[(i, j)]).max(0.0))
}

/// `diag(a)·S·diag(b)` with random positive `a`, `b`: diagonally
/// symmetrizable with the inertia of `S`.
pub fn diagonal_congruence<R: Rng + ?Sized>(rng: &mut R, s: &Matrix) -> Matrix {
    let n = s.dim();
    let a = random_positive_vec(rng, n);
    let b = random_positive_vec(rng, n);
    s.scale_rows(&a).scale_columns(&b)
}

pub fn random_convex_model<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetapopModel {
    let s = random_psd_symmetric(rng, n);
    let k = diagonal_congruence(rng, &s);
    MetapopModel::new(k, random_weights(rng, n), None).expect("generated model is valid")
}

pub fn random_concave_model<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetapopModel {
    let s = random_single_positive_symmetric(rng, n);
    let k = diagonal_congruence(rng, &s);
    MetapopModel::new(k, random_weights(rng, n), None).expect("generated model is valid")
}

/// Rank-one configuration model `K_ij = f_i g_j μ_j`.
pub struct RankOne {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub model: MetapopModel,
}

pub fn random_rank_one<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RankOne {
    let f = random_positive_vec(rng, n);
    let g = random_positive_vec(rng, n);
    let mu = random_weights(rng, n);
    let k = Matrix::from_fn(n, |i, j| f[i] * g[j] * mu[j]);
    let model = MetapopModel::new(k, mu, None).expect("generated model is valid");
    RankOne { f, g, model }
}

/// Random symmetric matrix with entries in `[-5, 5]`.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-5.0..5.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::inertia;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_inertia() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..8 {
            let s = random_single_positive_symmetric(&mut rng, n);
            assert!(s.is_nonnegative());
            assert_eq!(inertia(&s).unwrap().0, 1);
            let p = random_psd_symmetric(&mut rng, n);
            assert_eq!(inertia(&p).unwrap().1, 0);
        }
    }

    #[test]
    fn block_triangular_has_no_back_infection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (m, blocks) = random_block_triangular(&mut rng, &[2, 1, 3]);
        for (b, later) in blocks.iter().enumerate() {
            for earlier in &blocks[..b] {
                for &i in earlier {
                    for &j in later {
                        assert_eq!(m[(i, j)], 0.0);
                    }
                }
            }
        }
    }
}
