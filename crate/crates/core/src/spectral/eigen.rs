//! Dense eigenvalue kernels: balancing, Hessenberg reduction, the Francis
//! double-shift QR iteration, cyclic Jacobi for symmetric input, and a small
//! LU solver used by inverse iteration.
//!
//! The nonsymmetric path works on a 1-based scratch copy so the index
//! arithmetic stays close to the classical formulation of the algorithm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const RADIX: f64 = 2.0;

/// 1-based dense scratch matrix.
struct Scratch {
    n: usize,
    a: Vec<f64>,
}

impl Scratch {
    fn from_matrix(m: &Matrix) -> Self {
        let n = m.dim();
        let mut a = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                a[(i + 1) * (n + 1) + j + 1] = m[(i, j)];
            }
        }
        Scratch { n, a }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let n1 = self.n + 1;
        self.a[i * n1 + j] = v;
    }

    #[inline]
    fn swap(&mut self, i1: usize, j1: usize, i2: usize, j2: usize) {
        let n1 = self.n + 1;
        self.a.swap(i1 * n1 + j1, i2 * n1 + j2);
    }
}

/// Diagonal similarity by powers of two that equalizes row and column norms.
/// Returns the scaling `d` such that the balanced matrix is `D⁻¹ A D`.
pub fn balance(m: &Matrix) -> (Matrix, Vec<f64>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut d = vec![1.0; n];
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    (a, d)
}

/// Reduction to upper Hessenberg form by stabilized elimination.
fn hessenberg(s: &mut Scratch) {
    let n = s.n;
    for m in 2..n {
        let mut x = 0.0f64;
        let mut i = m;
        for j in m..=n {
            if s.get(j, m - 1).abs() > x.abs() {
                x = s.get(j, m - 1);
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                s.swap(i, j, m, j);
            }
            for j in 1..=n {
                s.swap(j, i, j, m);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = s.get(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    s.set(i, m - 1, y);
                    for j in m..=n {
                        let v = s.get(i, j) - y * s.get(m, j);
                        s.set(i, j, v);
                    }
                    for j in 1..=n {
                        let v = s.get(j, m) + y * s.get(j, i);
                        s.set(j, m, v);
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..i.saturating_sub(1) {
            s.set(i, j, 0.0);
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hqr(s: &mut Scratch, max_steps: usize) -> Result<Vec<Complex64>> {
    let n = s.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += s.get(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let mut total_steps = 0usize;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut ss = s.get(l - 1, l - 1).abs() + s.get(l, l).abs();
                if ss == 0.0 {
                    ss = anorm;
                }
                if s.get(l, l - 1).abs() + ss == ss {
                    s.set(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            x = s.get(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                y = s.get(nn - 1, nn - 1);
                w = s.get(nn, nn - 1) * s.get(nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    total_steps += 1;
                    if total_steps > max_steps {
                        return Err(Error::NonConvergence(format!(
                            "QR iteration exceeded {max_steps} steps"
                        )));
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            let v = s.get(i, i) - x;
                            s.set(i, i, v);
                        }
                        let ss = s.get(nn, nn - 1).abs() + s.get(nn - 1, nn - 2).abs();
                        x = 0.75 * ss;
                        y = x;
                        w = -0.4375 * ss * ss;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = s.get(m, m);
                        r = x - z;
                        let ss0 = y - z;
                        p = (r * ss0 - w) / s.get(m + 1, m) + s.get(m, m + 1);
                        q = s.get(m + 1, m + 1) - z - r - ss0;
                        r = s.get(m + 2, m + 1);
                        let ss = p.abs() + q.abs() + r.abs();
                        p /= ss;
                        q /= ss;
                        r /= ss;
                        if m == l {
                            break;
                        }
                        let u = s.get(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (s.get(m - 1, m - 1).abs() + z.abs() + s.get(m + 1, m + 1).abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        s.set(i, i - 2, 0.0);
                        if i != m + 2 {
                            s.set(i, i - 3, 0.0);
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = s.get(k, k - 1);
                            q = s.get(k + 1, k - 1);
                            r = 0.0;
                            if k != nn - 1 {
                                r = s.get(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let ss = sign((p * p + q * q + r * r).sqrt(), p);
                        if ss != 0.0 {
                            if k == m {
                                if l != m {
                                    let v = -s.get(k, k - 1);
                                    s.set(k, k - 1, v);
                                }
                            } else {
                                s.set(k, k - 1, -ss * x);
                            }
                            p += ss;
                            x = p / ss;
                            y = q / ss;
                            z = r / ss;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = s.get(k, j) + q * s.get(k + 1, j);
                                if k != nn - 1 {
                                    p += r * s.get(k + 2, j);
                                    let v = s.get(k + 2, j) - p * z;
                                    s.set(k + 2, j, v);
                                }
                                let v = s.get(k + 1, j) - p * y;
                                s.set(k + 1, j, v);
                                let v = s.get(k, j) - p * x;
                                s.set(k, j, v);
                            }
                            let mmin = nn.min(k + 3);
                            for i in l..=mmin {
                                p = x * s.get(i, k) + y * s.get(i, k + 1);
                                if k != nn - 1 {
                                    p += z * s.get(i, k + 2);
                                    let v = s.get(i, k + 2) - p * r;
                                    s.set(i, k + 2, v);
                                }
                                let v = s.get(i, k + 1) - p * q;
                                s.set(i, k + 1, v);
                                let v = s.get(i, k) - p;
                                s.set(i, k, v);
                            }
                        }
                        k += 1;
                    }
                }
            }
            // keep iterating on the same block until something deflates
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// All eigenvalues of a general real matrix (balancing, Hessenberg
/// reduction, then shifted QR). The QR sweep count is capped at `100·N²`.
pub fn general_eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !m.is_finite() {
        return Err(Error::Validation("matrix contains NaN or infinite entries".into()));
    }
    if n == 1 {
        return Ok(vec![Complex64::new(m[(0, 0)], 0.0)]);
    }
    let (balanced, _) = balance(m);
    let mut s = Scratch::from_matrix(&balanced);
    hessenberg(&mut s);
    hqr(&mut s, (100 * n * n).max(100))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let mut a = m.clone();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * scale * n as f64 {
            return Ok((0..n).map(|i| a[(i, i)]).collect());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = sign(1.0, theta) / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::NonConvergence("Jacobi sweeps did not converge".into()))
}

/// Solves `(A − σ I) x = b` with partial pivoting. Zero pivots are replaced
/// by a tiny multiple of the matrix scale, which is what inverse iteration
/// wants near an exact eigenvalue.
pub fn shifted_solve(a: &Matrix, sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = a.dim();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= sigma;
    }
    let tiny = f64::EPSILON * (a.max_abs() + sigma.abs()).max(f64::MIN_POSITIVE);
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| m[(i, k)].abs().total_cmp(&m[(j, k)].abs()))
            .unwrap();
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            x.swap(k, piv);
            perm.swap(k, piv);
        }
        if m[(k, k)].abs() < tiny {
            m[(k, k)] = if m[(k, k)] < 0.0 { -tiny } else { tiny };
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                m[(i, j)] -= f * m[(k, j)];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s -= m[(k, j)] * x[j];
        }
        x[k] = s / m[(k, k)];
    }
    x
}
