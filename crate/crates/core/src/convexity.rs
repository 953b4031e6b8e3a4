//! Diagonal symmetrizability, the inertia-based convexity verdict, and a
//! randomized probe that looks for violations of midpoint convexity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{MetapopModel, Strategy};
use crate::spectral::{basic_reproduction_number, effective_re, full_spectrum, inertia};

const SYM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizabilityResult {
    pub symmetrizable: bool,
    /// `d` with `d_i K_ij = d_j K_ji`, smallest entry 1 on each component.
    pub d: Option<Vec<f64>>,
    /// `D^{1/2} K D^{-1/2}`.
    #[serde(skip)]
    pub symmetrized: Option<Matrix>,
}

impl SymmetrizabilityResult {
    fn no() -> Self {
        SymmetrizabilityResult {
            symmetrizable: false,
            d: None,
            symmetrized: None,
        }
    }
}

/// Looks for a positive diagonal `d` with `d_i K_ij = d_j K_ji`.
pub fn symmetrize(model: &MetapopModel) -> SymmetrizabilityResult {
    symmetrize_matrix(model.matrix())
}

pub fn symmetrize_matrix(k: &Matrix) -> SymmetrizabilityResult {
    let n = k.dim();
    for i in 0..n {
        for j in 0..i {
            if (k[(i, j)] > 0.0) != (k[(j, i)] > 0.0) {
                return SymmetrizabilityResult::no();
            }
        }
    }
    // spread d along a BFS forest of the off-diagonal support
    let mut d = vec![0.0; n];
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if comp_of[root] != usize::MAX {
            continue;
        }
        let c = comps.len();
        comp_of[root] = c;
        d[root] = 1.0;
        let mut members = vec![root];
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for j in 0..n {
                if j != i && k[(i, j)] > 0.0 && comp_of[j] == usize::MAX {
                    comp_of[j] = c;
                    d[j] = d[i] * k[(i, j)] / k[(j, i)];
                    members.push(j);
                }
            }
        }
        comps.push(members);
    }
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (d[i] * k[(i, j)], d[j] * k[(j, i)]);
            if (a - b).abs() > SYM_TOL * a.max(b) {
                return SymmetrizabilityResult::no();
            }
        }
    }
    for members in &comps {
        let lo = members.iter().map(|&i| d[i]).fold(f64::INFINITY, f64::min);
        for &i in members {
            d[i] /= lo;
        }
    }
    let sq: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
    let raw = Matrix::from_fn(n, |i, j| sq[i] * k[(i, j)] / sq[j]);
    let m = Matrix::from_fn(n, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    SymmetrizabilityResult {
        symmetrizable: true,
        d: Some(d),
        symmetrized: Some(m),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Convex,
    Concave,
    Linear,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reason {
    SymmetrizablePSD,
    SymmetrizableSingleP,
    ConfigurationRankOne,
    NotSymmetrizable,
    MixedInertia,
}

/// Two strategies and a weight where the chord test fails:
/// `gap = R_e(tη₀ + (1−t)η₁) − [t R_e(η₀) + (1−t) R_e(η₁)]`.
/// A positive gap breaks convexity, a negative one breaks concavity.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub eta0: Strategy,
    pub eta1: Strategy,
    pub t: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityVerdict {
    pub verdict: Verdict,
    pub reason: Reason,
    pub symmetrizable: bool,
    pub d: Option<Vec<f64>>,
    pub inertia: Option<(usize, usize)>,
}

/// Rank at most one, tested against the largest entry as pivot.
pub fn is_rank_at_most_one(k: &Matrix) -> bool {
    let n = k.dim();
    let (mut p, mut q, mut best) = (0, 0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if k[(i, j)].abs() > best {
                best = k[(i, j)].abs();
                p = i;
                q = j;
            }
        }
    }
    if best == 0.0 {
        return true;
    }
    let piv = k[(p, q)];
    let tol = 1e-10 * best * best;
    (0..n).all(|i| (0..n).all(|j| (k[(i, j)] * piv - k[(i, q)] * k[(p, j)]).abs() <= tol))
}

/// Verdict from the structure of `K`: rank one gives a linear `R_e`;
/// otherwise a symmetrizable `K` is convex when its symmetrization has no
/// negative eigenvalue and concave when it has a single positive one.
pub fn classify_convexity(model: &MetapopModel) -> Result<ConvexityVerdict> {
    let sym = symmetrize(model);
    if is_rank_at_most_one(model.matrix()) {
        return Ok(ConvexityVerdict {
            verdict: Verdict::Linear,
            reason: Reason::ConfigurationRankOne,
            symmetrizable: sym.symmetrizable,
            d: sym.d,
            inertia: None,
        });
    }
    let Some(m) = sym.symmetrized.as_ref() else {
        return Ok(ConvexityVerdict {
            verdict: Verdict::Indeterminate,
            reason: Reason::NotSymmetrizable,
            symmetrizable: false,
            d: None,
            inertia: None,
        });
    };
    let (p, n) = inertia(m)?;
    let (verdict, reason) = match (n == 0, p == 1) {
        (true, true) => (Verdict::Linear, Reason::SymmetrizablePSD),
        (true, false) => (Verdict::Convex, Reason::SymmetrizablePSD),
        (false, true) => (Verdict::Concave, Reason::SymmetrizableSingleP),
        (false, false) => (Verdict::Indeterminate, Reason::MixedInertia),
    };
    Ok(ConvexityVerdict {
        verdict,
        reason,
        symmetrizable: true,
        d: sym.d,
        inertia: Some((p, n)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeVerdict {
    LinearConsistent,
    ConvexConsistent,
    ConcaveConsistent,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Largest positive gap found, if above the threshold.
    pub convexity_violation: Option<Witness>,
    /// Most negative gap found, if below minus the threshold.
    pub concavity_violation: Option<Witness>,
    pub max_gap: f64,
    pub min_gap: f64,
}

const PROBE_T: [f64; 3] = [0.25, 0.5, 0.75];

fn probe_trial(model: &MetapopModel, seed: u64, trial: usize) -> Result<Witness> {
    let n = model.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let eta0 = Strategy::clamped((0..n).map(|_| rng.gen::<f64>()).collect());
    let eta1 = Strategy::clamped((0..n).map(|_| rng.gen::<f64>()).collect());
    let t = if trial % 4 < 3 {
        PROBE_T[trial % 4]
    } else {
        rng.gen_range(0.01..0.99)
    };
    let mid = Strategy::clamped(
        eta0.values()
            .iter()
            .zip(eta1.values())
            .map(|(a, b)| t * a + (1.0 - t) * b)
            .collect(),
    );
    let gap = effective_re(model, &mid)?
        - (t * effective_re(model, &eta0)? + (1.0 - t) * effective_re(model, &eta1)?);
    Ok(Witness {
        eta0,
        eta1,
        t,
        gap,
    })
}

/// Random chord tests. Deterministic for a given seed: trial `i` draws from
/// its own stream of the seeded generator, so the parallel schedule does
/// not matter.
pub fn probe_convexity(model: &MetapopModel, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::Validation("probe needs at least one trial".into()));
    }
    let threshold = 1e-6 * basic_reproduction_number(model)?.max(1.0);
    let results: Vec<Witness> = (0..trials)
        .into_par_iter()
        .map(|i| probe_trial(model, seed, i))
        .collect::<Result<_>>()?;
    let mut hi: Option<&Witness> = None;
    let mut lo: Option<&Witness> = None;
    for w in &results {
        if hi.map_or(true, |h| w.gap > h.gap) {
            hi = Some(w);
        }
        if lo.map_or(true, |l| w.gap < l.gap) {
            lo = Some(w);
        }
    }
    let (hi, lo) = (hi.unwrap(), lo.unwrap());
    let convexity_violation = (hi.gap > threshold).then(|| hi.clone());
    let concavity_violation = (lo.gap < -threshold).then(|| lo.clone());
    let verdict = match (&convexity_violation, &concavity_violation) {
        (None, None) => ProbeVerdict::LinearConsistent,
        (Some(_), None) => ProbeVerdict::ConcaveConsistent,
        (None, Some(_)) => ProbeVerdict::ConvexConsistent,
        (Some(_), Some(_)) => ProbeVerdict::Indeterminate,
    };
    Ok(ProbeReport {
        verdict,
        trials,
        seed,
        threshold,
        max_gap: hi.gap,
        min_gap: lo.gap,
        convexity_violation,
        concavity_violation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SylvesterReport {
    pub original: (usize, usize),
    pub transformed: (usize, usize),
    pub matches: bool,
}

/// Compares the inertia of a symmetric `T` with that of `diag(f)·T·diag(g)`.
pub fn sylvester_check(t: &Matrix, f: &[f64], g: &[f64]) -> Result<SylvesterReport> {
    let n = t.dim();
    if f.len() != n || g.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.len().min(g.len()),
        });
    }
    if !t.is_symmetric(0.0) {
        return Err(Error::PreconditionFailed("T must be symmetric".into()));
    }
    let in_range = |x: &f64| (1e-6..=1e6).contains(x);
    if !f.iter().all(in_range) || !g.iter().all(in_range) {
        return Err(Error::PreconditionFailed(
            "scalings must lie in [1e-6, 1e6]".into(),
        ));
    }
    let original = inertia(t)?;
    let scaled = t.scale_rows(f).scale_columns(g);
    let spec = full_spectrum(&scaled)?;
    if !spec.is_real {
        return Err(Error::ComplexSpectrum);
    }
    let transformed = (spec.p_count, spec.n_count);
    Ok(SylvesterReport {
        original,
        transformed,
        matches: original == transformed,
    })
}
