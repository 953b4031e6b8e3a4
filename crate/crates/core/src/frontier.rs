//! Pareto and anti-Pareto frontiers of the (cost, loss) problem.
//!
//! The min side solves `min R_e(η)` over `{η ∈ [0,1]^N : C(η) ≤ c}` and the
//! max side `max R_e(η)` over `{C(η) ≥ c}`. Both feasible sets are a box cut
//! by one half-space `w·η ≥ b` (resp. `≤ b`) with `w_i = c_i μ_i` and
//! `b = c_max − c`. Local searches are projected gradient steps with exact
//! projection and Armijo backtracking, run from several starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convexity::{classify_convexity, Verdict};
use crate::error::{Error, Result};
use crate::independent::{eradication_cost_with, EradicationResult};
use crate::model::{compensated_sum, cost_with_weights, CostFunction, MetapopModel, Strategy};
use crate::graph::Digraph;
use crate::matrix::Matrix;
use crate::spectral::{
    basic_reproduction_number, dominant_pair, dominant_pair_of, effective_re,
    gradient_from_pair, spectral_radius, CLUSTER_TOL,
};
use crate::structure::frobenius_decompose;

/// Largest model handled by exact vertex enumeration on the max side.
pub const VERTEX_BUDGET: usize = 20;
const ARMIJO_SIGMA: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const ZERO_LOSS: f64 = 1e-8;
const STALL_WINDOW: usize = 10;
const STALL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct FrontierOptions {
    pub resolution: usize,
    pub starts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Simplex-grid cross-check of the min side; `None` means on for `N ≤ 3`.
    pub grid_check: Option<bool>,
    /// Allow the max side beyond the vertex budget (ascent only).
    pub heuristic: bool,
    /// Lift the independent-set budget.
    pub force: bool,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        FrontierOptions {
            resolution: 64,
            starts: 16,
            max_iter: 500,
            seed: 0,
            grid_check: None,
            heuristic: false,
            force: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointStatus {
    /// Single start under a convex verdict: a certified global optimum.
    Converged,
    /// Best of several local searches; a bound, not a certificate.
    MultiStartBest,
    /// Exact over the vertices of the feasible polytope.
    VertexEnumerated,
    /// Taken from a closed-form endpoint.
    ClosedForm,
}

#[derive(Clone, Debug, Serialize)]
pub struct Optimum {
    pub loss: f64,
    pub strategy: Strategy,
    pub status: PointStatus,
    /// Cost of the returned strategy (at most the budget on the min side,
    /// at least the budget on the max side).
    pub cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FrontierKind {
    Pareto,
    AntiPareto,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrontierPoint {
    pub cost: f64,
    pub loss: f64,
    pub strategy: Strategy,
    pub status: PointStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrontierCurve {
    pub kind: FrontierKind,
    pub points: Vec<FrontierPoint>,
    pub grid_resolution: usize,
    pub r0: f64,
    pub c_max: f64,
    /// `c⋆` for a Pareto curve, `c^⋆` for an anti-Pareto curve.
    pub critical_cost: f64,
    /// Whether `critical_cost` is exact rather than an upper bound.
    pub critical_exact: bool,
    /// Indices `k` where the loss drops sharply between points `k` and `k+1`.
    pub jumps: Vec<usize>,
}

impl FrontierCurve {
    /// Piecewise-linear loss at cost `c`, clamped to the sampled range.
    pub fn loss_at(&self, c: f64) -> f64 {
        let p = &self.points;
        if c <= p[0].cost {
            return p[0].loss;
        }
        for win in p.windows(2) {
            let (a, b) = (&win[0], &win[1]);
            if c <= b.cost {
                let span = b.cost - a.cost;
                if span <= 0.0 {
                    return b.loss;
                }
                let t = (c - a.cost) / span;
                return a.loss + t * (b.loss - a.loss);
            }
        }
        p[p.len() - 1].loss
    }

    /// Smallest cost (Pareto) or largest cost (anti-Pareto) at which the
    /// interpolated curve reaches loss `l`.
    pub fn cost_for_loss(&self, l: f64) -> f64 {
        let p = &self.points;
        match self.kind {
            FrontierKind::Pareto => {
                if l >= p[0].loss {
                    return p[0].cost;
                }
                for win in p.windows(2) {
                    let (a, b) = (&win[0], &win[1]);
                    if b.loss <= l {
                        let drop = a.loss - b.loss;
                        if drop <= 0.0 {
                            return b.cost;
                        }
                        return a.cost + (a.loss - l) / drop * (b.cost - a.cost);
                    }
                }
                p[p.len() - 1].cost
            }
            FrontierKind::AntiPareto => {
                for win in p.windows(2).rev() {
                    let (a, b) = (&win[0], &win[1]);
                    if a.loss >= l {
                        let drop = a.loss - b.loss;
                        if drop <= 0.0 || b.loss >= l {
                            return b.cost;
                        }
                        return a.cost + (a.loss - l) / drop * (b.cost - a.cost);
                    }
                }
                p[0].cost
            }
        }
    }

    /// Slope bound used for grid tolerances: the steepest adjacent slope,
    /// but never below `R_0 / c_max`.
    pub fn lipschitz(&self) -> f64 {
        let base = if self.c_max > 0.0 { self.r0 / self.c_max } else { 0.0 };
        self.points
            .windows(2)
            .filter(|w| w[1].cost > w[0].cost)
            .map(|w| ((w[1].loss - w[0].loss) / (w[1].cost - w[0].cost)).abs())
            .fold(base, f64::max)
    }

    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1].cost - w[0].cost)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Min,
    Max,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Min => 1.0,
            Side::Max => -1.0,
        }
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean projection onto `[0,1]^N ∩ {w·η ≥ b}` (min side) or
/// `{w·η ≤ b}` (max side). The multiplier is found by bisection and the
/// returned point is always on the feasible side.
fn project(x: &[f64], w: &[f64], b: f64, side: Side) -> Vec<f64> {
    let y: Vec<f64> = x.iter().map(|&v| clamp01(v)).collect();
    let d = dot(w, &y);
    let dir = match side {
        Side::Min if d >= b => return y,
        Side::Max if d <= b => return y,
        Side::Min => 1.0,
        Side::Max => -1.0,
    };
    let at = |lam: f64| -> Vec<f64> {
        x.iter()
            .zip(w)
            .map(|(&xi, &wi)| clamp01(xi + dir * lam * wi))
            .collect()
    };
    let feasible = |v: &[f64]| match side {
        Side::Min => dot(w, v) >= b,
        Side::Max => dot(w, v) <= b,
    };
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
    let xspan = x.iter().map(|v| v.abs() + 1.0).fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, xspan / wmin);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(&at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut out = at(hi);
    // guard against rounding at the face
    if !feasible(&out) {
        out = match side {
            Side::Min => {
                let s = b / dot(w, &out).max(f64::MIN_POSITIVE);
                out.iter().map(|v| clamp01(v * s.max(1.0))).collect()
            }
            Side::Max => {
                let s = b / dot(w, &out).max(f64::MIN_POSITIVE);
                out.iter().map(|v| v * s.min(1.0)).collect()
            }
        };
    }
    out
}

/// Gradients of the Perron roots of the strongly connected pieces of
/// `K·diag(x)` within relative `tol` of `rho`. Each piece is taken together with the
/// groups at `x_j = 0`, so that reopening such a group is priced in.
fn tied_gradients(k: &Matrix, x: &[f64], rho: f64, tol: f64) -> Option<Vec<Vec<f64>>> {
    let n = x.len();
    let a = k.scale_columns(x);
    let zeros: Vec<usize> = (0..n).filter(|&j| x[j] == 0.0).collect();
    let mut out = Vec::new();
    for comp in Digraph::from_support(&a, 0.0).scc() {
        let r = spectral_radius(&a.submatrix(&comp)).ok()?;
        if r == 0.0 || r < rho * (1.0 - tol) {
            continue;
        }
        let mut idx = comp.clone();
        idx.extend(zeros.iter().filter(|j| !comp.contains(j)));
        idx.sort_unstable();
        let pair = dominant_pair_of(&a.submatrix(&idx)).ok()?;
        let g = gradient_from_pair(&k.submatrix(&idx), &pair);
        let mut full = vec![0.0; n];
        for (p, &i) in idx.iter().enumerate() {
            full[i] = g[p];
        }
        out.push(full);
    }
    Some(out)
}

fn combine(gs: Vec<Vec<f64>>, side: Side) -> Vec<f64> {
    let norm2 = |g: &[f64]| dot(g, g);
    match side {
        Side::Max => gs
            .into_iter()
            .max_by(|a, b| norm2(a).total_cmp(&norm2(b)))
            .expect("nonempty"),
        Side::Min => {
            if gs.iter().any(|g| norm2(g) == 0.0) {
                return vec![0.0; gs[0].len()];
            }
            // weights 1/|g_c|² give every tied piece the same first-order drop
            let inv: Vec<f64> = gs.iter().map(|g| 1.0 / norm2(g)).collect();
            let total: f64 = inv.iter().sum();
            let mut out = vec![0.0; gs[0].len()];
            for (g, w) in gs.iter().zip(&inv) {
                for (o, v) in out.iter_mut().zip(g) {
                    *o += w / total * v;
                }
            }
            out
        }
    }
}

/// Shared state for solving one (model, cost) pair at many budgets.
pub struct Solver<'a> {
    model: &'a MetapopModel,
    w: Vec<f64>,
    c_max: f64,
    r0: f64,
    convex: bool,
    eradication: Option<EradicationResult>,
    opts: FrontierOptions,
}

impl<'a> Solver<'a> {
    pub fn new(model: &'a MetapopModel, cost: &CostFunction, opts: FrontierOptions) -> Result<Self> {
        let w = cost.group_weights(model)?;
        let c_max = compensated_sum(w.iter().copied());
        let r0 = basic_reproduction_number(model)?;
        let verdict = classify_convexity(model)?.verdict;
        let eradication = match eradication_cost_with(model, cost, opts.force) {
            Ok(e) => Some(e),
            Err(Error::BudgetExceeded(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Solver {
            model,
            w,
            c_max,
            r0,
            convex: matches!(verdict, Verdict::Convex | Verdict::Linear),
            eradication,
            opts,
        })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn eradication(&self) -> Option<&EradicationResult> {
        self.eradication.as_ref()
    }

    fn n(&self) -> usize {
        self.model.n()
    }

    fn cost_of(&self, x: &[f64]) -> f64 {
        cost_with_weights(&self.w, x)
    }

    fn value(&self, x: &[f64]) -> f64 {
        effective_re(self.model, &Strategy::clamped(x.to_vec())).expect("dimensions agree")
    }

    fn fd_gradient(&self, x: &[f64]) -> Vec<f64> {
        let h = 1e-7;
        (0..x.len())
            .map(|j| {
                let mut up = x.to_vec();
                let mut dn = x.to_vec();
                up[j] = (x[j] + h).min(1.0);
                dn[j] = (x[j] - h).max(0.0);
                (self.value(&up) - self.value(&dn)) / (up[j] - dn[j])
            })
            .collect()
    }

    /// `R_e` and a gradient. Where the dominant eigenvalue is not simple
    /// (several strongly connected pieces share it), the gradients of the
    /// tied pieces are combined: equalized decrease on the min side, the
    /// steepest piece on the max side. Central differences are the last resort.
    fn value_grad(&self, x: &[f64], side: Side) -> (f64, Vec<f64>) {
        let k = self.model.matrix();
        let eta = Strategy::clamped(x.to_vec());
        match dominant_pair(self.model, &eta) {
            Ok(p) => return (p.value, gradient_from_pair(k, &p)),
            Err(Error::ZeroRadius) => return (0.0, self.fd_gradient(x)),
            Err(_) => {}
        }
        let f = self.value(x);
        match tied_gradients(k, x, f, CLUSTER_TOL) {
            Some(gs) if !gs.is_empty() => (f, combine(gs, side)),
            _ => (f, self.fd_gradient(x)),
        }
    }

    fn local_search(&self, side: Side, b: f64, x0: &[f64]) -> (f64, Vec<f64>) {
        let sgn = side.sign();
        let mut x = project(x0, &self.w, b, side);
        let (mut fx, mut g) = self.value_grad(&x, side);
        let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut history = vec![fx];
        for _ in 0..self.opts.max_iter {
            if side == Side::Min && fx == 0.0 {
                break;
            }
            let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gmax == 0.0 {
                break;
            }
            let mut step = 0.5 / gmax;
            if let Some((xp, gp)) = &prev {
                // Barzilai–Borwein guess, still subject to backtracking
                let s: Vec<f64> = x.iter().zip(xp).map(|(a, b)| a - b).collect();
                let yv: Vec<f64> = g.iter().zip(gp).map(|(a, b)| sgn * (a - b)).collect();
                let sy = dot(&s, &yv);
                if sy > 0.0 {
                    step = (dot(&s, &s) / sy).clamp(1e-10, 1e6);
                }
            }
            let mut accepted = None;
            while step > 1e-14 {
                let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * sgn * gi).collect();
                let y = project(&trial, &self.w, b, side);
                let descent: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| sgn * gi * (yi - xi)).sum();
                if descent >= 0.0 {
                    break;
                }
                let fy = self.value(&y);
                if sgn * fy <= sgn * fx + ARMIJO_SIGMA * descent {
                    accepted = Some((y, fy));
                    break;
                }
                step *= ARMIJO_SHRINK;
            }
            let Some((y, fy)) = accepted else { break };
            let moved = y.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let gained = (fy - fx).abs();
            prev = Some((std::mem::replace(&mut x, y), g));
            let (f2, g2) = self.value_grad(&x, side);
            fx = f2;
            g = g2;
            if moved <= 1e-12 || gained <= 1e-13 * fx.abs().max(1.0) {
                break;
            }
            // zigzagging at a kink between tied components
            history.push(fx);
            let h = history.len();
            if h > STALL_WINDOW && sgn * (history[h - 1 - STALL_WINDOW] - fx) <= STALL_TOL * fx.abs().max(1.0) {
                break;
            }
        }
        (fx, x)
    }

    fn rng_for(&self, point: usize, side: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        rng.set_stream(((point as u64) << 1) | side);
        rng
    }

    fn pick_best(&self, side: Side, cands: Vec<(f64, Vec<f64>)>) -> (f64, Vec<f64>) {
        let sgn = side.sign();
        let best = cands
            .iter()
            .map(|c| sgn * c.0)
            .fold(f64::INFINITY, f64::min);
        let tol = 1e-10 * self.r0.max(1.0);
        let round = |v: &[f64]| -> Vec<i64> { v.iter().map(|x| (x * 1e9).round() as i64).collect() };
        cands
            .into_iter()
            .filter(|c| sgn * c.0 <= best + tol)
            .min_by(|a, b| {
                round(&a.1)
                    .cmp(&round(&b.1))
                    .then((sgn * a.0).total_cmp(&(sgn * b.0)))
            })
            .expect("at least one candidate")
    }

    fn budget(&self, c: f64) -> Result<f64> {
        if !(c.is_finite() && c >= -1e-12 && c <= self.c_max * (1.0 + 1e-12)) {
            return Err(Error::Validation(format!(
                "budget {c} outside [0, {}]",
                self.c_max
            )));
        }
        Ok((self.c_max - c).max(0.0))
    }

    fn use_grid_check(&self) -> bool {
        // a convex verdict already certifies the local search
        self.opts.grid_check.unwrap_or(!self.convex && self.n() <= 3) && self.n() <= 4
    }

    /// Budget `c` spread over a random maximal set of pairwise
    /// non-adjacent groups, so that no two vaccinated groups touch.
    fn spread_start(&self, c: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.n();
        let k = self.model.matrix();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut chosen: Vec<usize> = Vec::new();
        for i in order {
            if chosen.iter().all(|&j| k[(i, j)] == 0.0 && k[(j, i)] == 0.0) {
                chosen.push(i);
            }
        }
        let ws: f64 = chosen.iter().map(|&i| self.w[i]).sum();
        let theta = if ws > 0.0 { (c / ws).min(1.0) } else { 0.0 };
        let mut x = vec![1.0; n];
        for i in chosen {
            x[i] = 1.0 - theta;
        }
        x
    }

    /// `min R_e` at cost at most `c`.
    pub fn min_at(&self, c: f64, warm: &[Strategy], point: usize) -> Result<Optimum> {
        let b = self.budget(c)?;
        let n = self.n();
        if b <= 0.0 {
            return Ok(self.optimum(0.0, Strategy::zeros(n), PointStatus::ClosedForm));
        }
        if c <= 0.0 {
            return Ok(self.optimum(self.r0, Strategy::ones(n), PointStatus::ClosedForm));
        }
        if let Some(e) = &self.eradication {
            if e.cstar <= c {
                return Ok(self.optimum(0.0, e.strategy.clone(), PointStatus::ClosedForm));
            }
        }
        let lam = b / self.c_max;
        let mut starts: Vec<Vec<f64>> = vec![vec![lam; n]];
        let status = if self.convex {
            PointStatus::Converged
        } else {
            starts.push(vec![1.0; n]);
            starts.push(vec![0.5; n]);
            if let Some(e) = &self.eradication {
                let theta = (1.0 - c / e.cstar).clamp(0.0, 1.0);
                starts.push(e.strategy.values().iter().map(|&v| v + theta * (1.0 - v)).collect());
            }
            PointStatus::MultiStartBest
        };
        starts.extend(warm.iter().map(|s| s.values().to_vec()));
        let mut rng = self.rng_for(point, 0);
        if !self.convex {
            while starts.len() < self.opts.starts.max(1) + warm.len() {
                starts.push((0..n).map(|_| rng.gen::<f64>()).collect());
            }
            for _ in 0..self.opts.starts / 2 {
                starts.push(self.spread_start(c, &mut rng));
            }
        }
        let mut cands: Vec<(f64, Vec<f64>)> = starts
            .par_iter()
            .map(|s| self.local_search(Side::Min, b, s))
            .collect();
        if self.use_grid_check() {
            cands.push(self.grid_min(b));
        }
        let (loss, x) = self.pick_best(Side::Min, cands);
        Ok(self.optimum(loss, Strategy::clamped(x), status))
    }

    /// Exhaustive search on the face `w·η = b` with `N − 1` free coordinates
    /// on a 1/64 grid.
    fn grid_min(&self, b: f64) -> (f64, Vec<f64>) {
        let n = self.n();
        let steps = 64usize;
        let mut best = (f64::INFINITY, vec![1.0; n]);
        for j in 0..n {
            let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            let total = (steps + 1).pow(others.len() as u32);
            for code in 0..total {
                let mut x = vec![0.0; n];
                let mut c = code;
                for &i in &others {
                    x[i] = (c % (steps + 1)) as f64 / steps as f64;
                    c /= steps + 1;
                }
                let xj = (b - dot(&self.w, &x)) / self.w[j];
                if !(-1e-12..=1.0 + 1e-12).contains(&xj) {
                    continue;
                }
                x[j] = clamp01(xj);
                let f = self.value(&x);
                if f < best.0 {
                    best = (f, x);
                }
            }
        }
        best
    }

    fn optimum(&self, loss: f64, strategy: Strategy, status: PointStatus) -> Optimum {
        Optimum {
            loss,
            cost: self.cost_of(strategy.values()),
            strategy,
            status,
        }
    }

    /// Vertices of `[0,1]^N ∩ {w·η = b}` that are maximal for inclusion:
    /// a 0/1 pattern plus at most one fractional coordinate.
    fn best_vertex(&self, b: f64) -> (f64, Vec<f64>) {
        let n = self.n();
        let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
        let mut suffix = vec![0.0; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + self.w[i];
        }
        let tol = 1e-12 * self.c_max;
        for j in 0..n {
            // DFS over the other coordinates with w(S) ∈ [b − w_j, b]
            let lo = b - self.w[j];
            let mut stack: Vec<(usize, f64, Vec<f64>)> = vec![(0, 0.0, vec![0.0; n])];
            while let Some((i, ws, x)) = stack.pop() {
                if ws > b + tol {
                    continue;
                }
                let rest = suffix[i] - if i <= j { self.w[j] } else { 0.0 };
                if ws + rest < lo - tol {
                    continue;
                }
                if i == n {
                    let mut v = x;
                    v[j] = clamp01((b - ws) / self.w[j]);
                    let f = self.value(&v);
                    if f > best.0 {
                        best = (f, v);
                    }
                    continue;
                }
                if i == j {
                    stack.push((i + 1, ws, x));
                    continue;
                }
                let mut with = x.clone();
                with[i] = 1.0;
                stack.push((i + 1, ws, x));
                stack.push((i + 1, ws + self.w[i], with));
            }
        }
        best
    }

    /// `max R_e` at cost at least `c`.
    pub fn max_at(&self, c: f64, warm: &[Strategy], point: usize) -> Result<Optimum> {
        let b = self.budget(c)?;
        let n = self.n();
        if c <= 0.0 {
            return Ok(self.optimum(self.r0, Strategy::ones(n), PointStatus::ClosedForm));
        }
        if b <= 0.0 {
            return Ok(self.optimum(0.0, Strategy::zeros(n), PointStatus::ClosedForm));
        }
        let enumerate = n <= VERTEX_BUDGET;
        if !enumerate && !self.opts.heuristic {
            return Err(Error::BudgetExceeded(format!(
                "vertex enumeration on {n} groups (limit {VERTEX_BUDGET}); pass the heuristic flag"
            )));
        }
        let mut cands = Vec::new();
        let mut starts: Vec<Vec<f64>> = vec![vec![b / self.c_max; n], vec![1.0; n], vec![0.5; n]];
        if enumerate {
            let v = self.best_vertex(b);
            starts.push(v.1.clone());
            cands.push(v);
        }
        starts.extend(warm.iter().map(|s| s.values().to_vec()));
        let mut rng = self.rng_for(point, 1);
        while starts.len() < self.opts.starts.max(1) + warm.len() {
            starts.push((0..n).map(|_| rng.gen::<f64>()).collect());
        }
        cands.extend(
            starts
                .par_iter()
                .map(|s| self.local_search(Side::Max, b, s))
                .collect::<Vec<_>>(),
        );
        let (loss, x) = self.pick_best(Side::Max, cands);
        let status = if enumerate && self.convex {
            PointStatus::VertexEnumerated
        } else {
            PointStatus::MultiStartBest
        };
        Ok(self.optimum(loss, Strategy::clamped(x), status))
    }
}

/// `R_e⋆(c) = min {R_e(η) : C(η) ≤ c}` with an optimal strategy.
pub fn optimal_loss(model: &MetapopModel, cost: &CostFunction, c: f64) -> Result<Optimum> {
    optimal_loss_with(model, cost, c, &FrontierOptions::default())
}

pub fn optimal_loss_with(
    model: &MetapopModel,
    cost: &CostFunction,
    c: f64,
    opts: &FrontierOptions,
) -> Result<Optimum> {
    Solver::new(model, cost, opts.clone())?.min_at(c, &[], 0)
}

/// `R_e^⋆(c) = max {R_e(η) : C(η) ≥ c}` with a maximizing strategy.
pub fn optimal_loss_max(model: &MetapopModel, cost: &CostFunction, c: f64) -> Result<Optimum> {
    optimal_loss_max_with(model, cost, c, &FrontierOptions::default())
}

pub fn optimal_loss_max_with(
    model: &MetapopModel,
    cost: &CostFunction,
    c: f64,
    opts: &FrontierOptions,
) -> Result<Optimum> {
    Solver::new(model, cost, opts.clone())?.max_at(c, &[], 0)
}

/// Pareto frontier sampled at `resolution + 1` budgets in `[0, c⋆]`.
pub fn pareto_frontier(
    model: &MetapopModel,
    cost: &CostFunction,
    opts: &FrontierOptions,
) -> Result<FrontierCurve> {
    if opts.resolution < 2 {
        return Err(Error::Validation("resolution must be at least 2".into()));
    }
    let solver = Solver::new(model, cost, opts.clone())?;
    let n = model.n();
    let (c_hi, exact) = match solver.eradication() {
        Some(e) => (e.cstar, e.exact),
        None => (solver.c_max(), false),
    };
    let res = opts.resolution;
    let mut points: Vec<FrontierPoint> = Vec::with_capacity(res + 1);
    points.push(FrontierPoint {
        cost: 0.0,
        loss: solver.r0(),
        strategy: Strategy::ones(n),
        status: PointStatus::ClosedForm,
    });
    for k in 1..res {
        let c = c_hi * k as f64 / res as f64;
        let warm: Vec<Strategy> = vec![points[k - 1].strategy.clone()];
        let mut o = solver.min_at(c, &warm, k)?;
        // the previous point is feasible here, so the curve cannot go up
        if o.loss > points[k - 1].loss {
            o.loss = points[k - 1].loss;
            o.strategy = points[k - 1].strategy.clone();
        }
        points.push(FrontierPoint {
            cost: c,
            loss: o.loss,
            strategy: o.strategy,
            status: o.status,
        });
    }
    let end = match solver.eradication() {
        Some(e) => e.strategy.clone(),
        None => Strategy::zeros(n),
    };
    points.push(FrontierPoint {
        cost: c_hi,
        loss: 0.0,
        strategy: end,
        status: PointStatus::ClosedForm,
    });
    // without an exact c⋆, the first zero-loss sample is the estimate
    let critical = if exact {
        c_hi
    } else {
        points
            .iter()
            .find(|p| p.loss <= ZERO_LOSS)
            .map_or(c_hi, |p| p.cost)
    };
    Ok(FrontierCurve {
        kind: FrontierKind::Pareto,
        points,
        grid_resolution: res,
        r0: solver.r0(),
        c_max: solver.c_max(),
        critical_cost: critical,
        critical_exact: exact,
        jumps: Vec::new(),
    })
}

/// `c^⋆`: the largest cost of a strategy keeping `R_e = R_0`, with that
/// strategy (the indicator of a dominant atom).
pub fn anti_critical_cost(model: &MetapopModel, cost: &CostFunction) -> Result<(f64, Strategy)> {
    let n = model.n();
    let dec = frobenius_decompose(model)?;
    let r0 = dec.max_radius();
    if dec.atoms.is_empty() {
        return Ok((0.0, Strategy::ones(n)));
    }
    let mut best: Option<(f64, Strategy)> = None;
    for (atom, &r) in dec.atoms.iter().zip(&dec.atom_radii) {
        if r < r0 * (1.0 - 1e-12) {
            continue;
        }
        let s = Strategy::indicator(n, atom);
        let c = cost.evaluate(model, &s)?;
        if best.as_ref().map_or(true, |b| c > b.0) {
            best = Some((c, s));
        }
    }
    Ok(best.expect("some atom attains R_0"))
}

/// Anti-Pareto frontier sampled at `resolution + 1` budgets in `[c^⋆, c_max]`.
pub fn anti_pareto_frontier(
    model: &MetapopModel,
    cost: &CostFunction,
    opts: &FrontierOptions,
) -> Result<FrontierCurve> {
    if opts.resolution < 2 {
        return Err(Error::Validation("resolution must be at least 2".into()));
    }
    let solver = Solver::new(model, cost, opts.clone())?;
    let n = model.n();
    let (c_lo, s_lo) = anti_critical_cost(model, cost)?;
    let c_max = solver.c_max();
    let res = opts.resolution;
    let mut points: Vec<FrontierPoint> = Vec::with_capacity(res + 1);
    points.push(FrontierPoint {
        cost: c_lo,
        loss: solver.r0(),
        strategy: s_lo,
        status: PointStatus::ClosedForm,
    });
    for k in 1..res {
        let c = c_lo + (c_max - c_lo) * k as f64 / res as f64;
        let warm = vec![points[k - 1].strategy.clone()];
        let o = solver.max_at(c, &warm, k)?;
        points.push(FrontierPoint {
            cost: c,
            loss: o.loss,
            strategy: o.strategy,
            status: o.status,
        });
    }
    points.push(FrontierPoint {
        cost: c_max,
        loss: 0.0,
        strategy: Strategy::zeros(n),
        status: PointStatus::ClosedForm,
    });
    // a strategy feasible at a larger budget is feasible at a smaller one
    for k in (0..points.len() - 1).rev() {
        if points[k + 1].loss > points[k].loss {
            points[k].loss = points[k + 1].loss;
            points[k].strategy = points[k + 1].strategy.clone();
        }
    }
    let step = (c_max - c_lo) / res as f64;
    let slope = if c_max > c_lo { solver.r0() / (c_max - c_lo) } else { 0.0 };
    let jumps = points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].loss - w[1].loss > 10.0 * step * slope)
        .map(|(k, _)| k)
        .collect();
    Ok(FrontierCurve {
        kind: FrontierKind::AntiPareto,
        points,
        grid_resolution: res,
        r0: solver.r0(),
        c_max,
        critical_cost: c_lo,
        critical_exact: true,
        jumps,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomFrontier {
    pub atom: Vec<usize>,
    pub r0: f64,
    /// Cost of vaccinating every group outside the atom.
    pub outside_cost: f64,
    pub pareto: FrontierCurve,
    pub anti: FrontierCurve,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssembledFrontiers {
    pub pareto: FrontierCurve,
    pub anti: FrontierCurve,
    pub per_atom: Vec<AtomFrontier>,
    pub direct_pareto: FrontierCurve,
    pub direct_anti: FrontierCurve,
    /// Largest loss mismatch between assembled and direct curves.
    pub pareto_gap: f64,
    pub anti_gap: f64,
    /// Allowed mismatch: two grid steps times the slope bound.
    pub tolerance: f64,
}

impl AssembledFrontiers {
    pub fn agrees(&self) -> bool {
        self.pareto_gap <= self.tolerance && self.anti_gap <= self.tolerance
    }
}

/// Largest vertical distance between two curves, checked at the sample
/// points of both.
fn curve_gap(a: &FrontierCurve, b: &FrontierCurve) -> f64 {
    a.points
        .iter()
        .map(|p| (p.loss - b.loss_at(p.cost)).abs())
        .chain(b.points.iter().map(|p| (p.loss - a.loss_at(p.cost)).abs()))
        .fold(0.0, f64::max)
}

/// Frontiers of a reducible kernel assembled from per-atom frontiers, and
/// the direct whole-matrix frontiers for comparison.
pub fn assemble_reducible(
    model: &MetapopModel,
    cost: &CostFunction,
    opts: &FrontierOptions,
) -> Result<AssembledFrontiers> {
    let n = model.n();
    let dec = frobenius_decompose(model)?;
    if dec.atoms.is_empty() {
        return Err(Error::PreconditionFailed(
            "decomposition has no atom (R_0 = 0)".into(),
        ));
    }
    let w = cost.group_weights(model)?;
    let c_max = compensated_sum(w.iter().copied());
    let r0 = dec.max_radius();
    let res = opts.resolution;

    let mut per_atom = Vec::with_capacity(dec.atoms.len());
    for (atom, &r) in dec.atoms.iter().zip(&dec.atom_radii) {
        let sub = model.restrict(atom)?;
        let sub_cost = cost.restrict(model, atom)?;
        let outside_cost = compensated_sum((0..n).filter(|i| !atom.contains(i)).map(|i| w[i]));
        per_atom.push(AtomFrontier {
            atom: atom.clone(),
            r0: r,
            outside_cost,
            pareto: pareto_frontier(&sub, &sub_cost, opts)?,
            anti: anti_pareto_frontier(&sub, &sub_cost, opts)?,
        });
    }

    let losses: Vec<f64> = (0..=res).map(|k| r0 * (res - k) as f64 / res as f64).collect();

    // Pareto: each atom independently reaches min(ℓ, R_0,i); the remainder stays open
    let mut pareto_pts = Vec::with_capacity(losses.len());
    for &l in &losses {
        let mut eta = vec![1.0; n];
        let mut total = 0.0;
        for a in &per_atom {
            let target = l.min(a.r0);
            let c_i = if target >= a.r0 { 0.0 } else { a.pareto.cost_for_loss(target) };
            total += c_i;
            // strategy from the nearest sample at or above that budget
            let s = a
                .pareto
                .points
                .iter()
                .find(|p| p.cost >= c_i - 1e-15)
                .unwrap_or(a.pareto.points.last().unwrap());
            for (pos, &g) in a.atom.iter().enumerate() {
                eta[g] = s.strategy.values()[pos];
            }
        }
        pareto_pts.push(FrontierPoint {
            cost: total,
            loss: l,
            strategy: Strategy::clamped(eta),
            status: PointStatus::ClosedForm,
        });
    }

    // anti-Pareto: the best single atom kept alive, everything else vaccinated
    let mut anti_pts = Vec::with_capacity(losses.len());
    for &l in losses.iter().rev() {
        let mut best: Option<(f64, Strategy)> = None;
        for a in per_atom.iter().filter(|a| a.r0 >= l) {
            let c_in = a.anti.cost_for_loss(l);
            let total = a.outside_cost + c_in;
            if best.as_ref().map_or(true, |b| total > b.0) {
                let s = a
                    .anti
                    .points
                    .iter()
                    .rev()
                    .find(|p| p.cost <= c_in + 1e-15)
                    .unwrap_or(&a.anti.points[0]);
                let mut eta = vec![0.0; n];
                for (pos, &g) in a.atom.iter().enumerate() {
                    eta[g] = s.strategy.values()[pos];
                }
                best = Some((total, Strategy::clamped(eta)));
            }
        }
        let (c, s) = best.unwrap_or((c_max, Strategy::zeros(n)));
        anti_pts.push(FrontierPoint {
            cost: c,
            loss: l,
            strategy: s,
            status: PointStatus::ClosedForm,
        });
    }
    anti_pts.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(b.loss.total_cmp(&a.loss)));

    let direct_pareto = pareto_frontier(model, cost, opts)?;
    let direct_anti = anti_pareto_frontier(model, cost, opts)?;
    let pareto = FrontierCurve {
        kind: FrontierKind::Pareto,
        critical_cost: pareto_pts.last().map_or(0.0, |p| p.cost),
        critical_exact: direct_pareto.critical_exact,
        points: pareto_pts,
        grid_resolution: res,
        r0,
        c_max,
        jumps: Vec::new(),
    };
    let anti = FrontierCurve {
        kind: FrontierKind::AntiPareto,
        critical_cost: anti_pts.first().map_or(0.0, |p| p.cost),
        critical_exact: true,
        points: anti_pts,
        grid_resolution: res,
        r0,
        c_max,
        jumps: Vec::new(),
    };
    let pareto_gap = curve_gap(&pareto, &direct_pareto);
    let anti_gap = curve_gap(&anti, &direct_anti);
    let slope = [&direct_pareto, &direct_anti, &pareto, &anti]
        .iter()
        .map(|c| c.lipschitz())
        .fold(0.0, f64::max);
    let step = [&direct_pareto, &direct_anti]
        .iter()
        .map(|c| c.max_step())
        .fold(0.0, f64::max);
    Ok(AssembledFrontiers {
        pareto,
        anti,
        per_atom,
        direct_pareto,
        direct_anti,
        pareto_gap,
        anti_gap,
        tolerance: 2.0 * step * slope,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RayPoint {
    pub lambda: f64,
    pub cost: f64,
    pub loss: f64,
    pub optimal_loss: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayReport {
    pub points: Vec<RayPoint>,
    pub all_pass: bool,
}

/// Checks that `λ η⋆` stays Pareto optimal for `λ ∈ [0, 1/max η⋆]` on a
/// 16-point grid, by comparing `R_e(λη⋆)` with an independent solve at the
/// same budget (warm-started from `λη⋆` itself).
pub fn optimal_ray_check(
    model: &MetapopModel,
    cost: &CostFunction,
    eta_star: &Strategy,
    opts: &FrontierOptions,
) -> Result<RayReport> {
    model.check_dim(eta_star.len())?;
    let verdict = classify_convexity(model)?.verdict;
    if !matches!(verdict, Verdict::Convex | Verdict::Linear) {
        return Err(Error::PreconditionFailed(format!(
            "ray check needs a convex verdict, got {verdict:?}"
        )));
    }
    let top = eta_star.max();
    if !(top > 0.0 && top < 1.0) {
        return Err(Error::PreconditionFailed(
            "η⋆ must satisfy 0 < max η⋆ < 1".into(),
        ));
    }
    let solver = Solver::new(model, cost, opts.clone())?;
    let lam_max = 1.0 / top;
    let mut points = Vec::with_capacity(16);
    for k in 0..16 {
        let lambda = lam_max * k as f64 / 15.0;
        let eta = Strategy::clamped(eta_star.scaled(lambda).into_values());
        let c = cost.evaluate(model, &eta)?;
        let loss = effective_re(model, &eta)?;
        let best = solver.min_at(c.min(solver.c_max()), &[eta.clone()], k)?;
        let pass = (loss - best.loss).abs() <= 1e-6;
        points.push(RayPoint {
            lambda,
            cost: c,
            loss,
            optimal_loss: best.loss,
            pass,
        });
    }
    Ok(RayReport {
        all_pass: points.iter().all(|p| p.pass),
        points,
    })
}

/// Outcomes `(C(η), R_e(η))` of random strategies plus, for `N ≤ 12`, every
/// 0/1 pattern with at most one coordinate on the 1/8 grid (two for `N ≤ 8`).
pub fn feasible_region_sample(
    model: &MetapopModel,
    cost: &CostFunction,
    samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if samples == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let n = model.n();
    let w = cost.group_weights(model)?;
    let mut etas: Vec<Vec<f64>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        etas.push((0..n).map(|_| rng.gen::<f64>()).collect());
    }
    if n <= 12 {
        let fracs: Vec<f64> = (1..8).map(|k| k as f64 / 8.0).collect();
        for mask in 0u32..(1u32 << n) {
            let base: Vec<f64> = (0..n).map(|i| (mask >> i & 1) as f64).collect();
            etas.push(base.clone());
            for j in 0..n {
                for &f in &fracs {
                    let mut e = base.clone();
                    e[j] = f;
                    if n <= 8 {
                        for j2 in (j + 1)..n {
                            for &f2 in &fracs {
                                let mut e2 = e.clone();
                                e2[j2] = f2;
                                etas.push(e2);
                            }
                        }
                    }
                    etas.push(e);
                }
            }
        }
    }
    etas.par_iter()
        .map(|e| Ok((cost_with_weights(&w, e), effective_re(model, &Strategy::clamped(e.clone()))?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Strategy;

    fn quick() -> FrontierOptions {
        FrontierOptions {
            resolution: 8,
            ..FrontierOptions::default()
        }
    }

    #[test]
    fn projection_is_feasible_and_idempotent() {
        let w = [0.2, 0.3, 0.5];
        let x = [1.4, -0.2, 0.1];
        let p = project(&x, &w, 0.6, Side::Min);
        assert!(dot(&w, &p) >= 0.6);
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(project(&p, &w, 0.6, Side::Min), p);
        let q = project(&[1.0; 3], &w, 0.4, Side::Max);
        assert!(dot(&w, &q) <= 0.4);
        assert!((dot(&w, &q) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn projection_matches_kkt_oracle() {
        // for a single active face, the projection is clamp(x + λw) with w·y = b
        let w = [0.25, 0.25, 0.5];
        let x = [0.1, 0.2, 0.3];
        let p = project(&x, &w, 0.5, Side::Min);
        let lam = (p[2] - x[2]) / w[2];
        for i in 0..3 {
            assert!((p[i] - (x[i] + lam * w[i]).clamp(0.0, 1.0)).abs() < 1e-9);
        }
        assert!((dot(&w, &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scalar_model_both_sides() {
        let m = MetapopModel::uniform(Matrix::from_array([[3.0]])).unwrap();
        for c in [0.0, 0.3, 0.75, 1.0] {
            let lo = optimal_loss(&m, &CostFunction::Uniform, c).unwrap();
            let hi = optimal_loss_max(&m, &CostFunction::Uniform, c).unwrap();
            assert!((lo.loss - 3.0 * (1.0 - c)).abs() < 1e-9, "c={c} got {}", lo.loss);
            assert!((hi.loss - 3.0 * (1.0 - c)).abs() < 1e-9);
        }
    }

    #[test]
    fn cycle_pareto_points() {
        let m = fixtures::cycle_model(12);
        let half = optimal_loss(&m, &CostFunction::Uniform, 0.5).unwrap();
        assert_eq!(half.loss, 0.0);
        let q = optimal_loss(&m, &CostFunction::Uniform, 0.25).unwrap();
        assert!(q.loss < 2f64.sqrt() - 1e-3);
        // analytic optimum on the pattern (1, 1, 1/4) repeated
        assert!((q.loss - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-6, "{}", q.loss);
    }

    #[test]
    fn max_side_examples() {
        let m = fixtures::cycle_model(12);
        let r = optimal_loss_max(&m, &CostFunction::Uniform, 0.0).unwrap();
        assert_eq!(r.loss, 2.0);
        let m = fixtures::two_block();
        let r = optimal_loss_max(&m, &CostFunction::Uniform, 0.25).unwrap();
        assert!((r.loss - 3.0).abs() < 1e-12);
    }

    #[test]
    fn anti_critical_examples() {
        let (c, _) = anti_critical_cost(&fixtures::cycle_model(12), &CostFunction::Uniform).unwrap();
        assert_eq!(c, 0.0);
        let (c, s) = anti_critical_cost(&fixtures::two_block(), &CostFunction::Uniform).unwrap();
        assert_eq!(c, 0.5);
        assert_eq!(s.values(), &[1.0, 0.0]);
    }

    #[test]
    fn scalar_frontiers_are_segments() {
        let m = MetapopModel::uniform(Matrix::from_array([[2.0]])).unwrap();
        let p = pareto_frontier(&m, &CostFunction::Uniform, &quick()).unwrap();
        let a = anti_pareto_frontier(&m, &CostFunction::Uniform, &quick()).unwrap();
        for pt in p.points.iter().chain(&a.points) {
            assert!((pt.loss - 2.0 * (1.0 - pt.cost)).abs() < 1e-9);
        }
    }

    #[test]
    fn rank_one_frontier_matches_knapsack() {
        // linear objective: vaccinate the largest f_i g_i μ_i per unit cost first
        let f = [2.0, 1.0, 0.5];
        let g = [1.0, 1.5, 1.0];
        let mu = [0.2, 0.3, 0.5];
        let k = Matrix::from_fn(3, |i, j| f[i] * g[j] * mu[j]);
        let m = MetapopModel::new(k, mu.to_vec(), None).unwrap();
        let curve = pareto_frontier(&m, &CostFunction::Uniform, &quick()).unwrap();
        let knapsack = |c: f64| {
            let mut order: Vec<usize> = (0..3).collect();
            order.sort_by(|&a, &b| (f[b] * g[b]).total_cmp(&(f[a] * g[a])));
            let mut left = c;
            let mut loss: f64 = (0..3).map(|i| f[i] * g[i] * mu[i]).sum();
            for i in order {
                let take = left.min(mu[i]);
                loss -= f[i] * g[i] * take;
                left -= take;
            }
            loss
        };
        for p in &curve.points {
            assert!((p.loss - knapsack(p.cost)).abs() < 1e-7, "{} vs {}", p.loss, knapsack(p.cost));
        }
    }

    #[test]
    fn pareto_monotone_and_zero_after_cstar() {
        let m = fixtures::cycle_model(12);
        let curve = pareto_frontier(&m, &CostFunction::Uniform, &quick()).unwrap();
        assert_eq!(curve.critical_cost, 0.5);
        for w in curve.points.windows(2) {
            assert!(w[1].loss <= w[0].loss + 1e-12);
        }
        assert!(curve.loss_at(0.25) < 2f64.sqrt());
        assert_eq!(curve.points.last().unwrap().loss, 0.0);
    }

    #[test]
    fn anti_plateau_on_two_blocks() {
        let m = fixtures::two_block();
        let a = anti_pareto_frontier(&m, &CostFunction::Uniform, &quick()).unwrap();
        assert_eq!(a.critical_cost, 0.5);
        assert_eq!(a.points[0].loss, 3.0);
    }

    #[test]
    fn assembled_matches_direct_on_two_atoms() {
        let k = Matrix::from_array([
            [2.0, 1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 1.0, 1.0],
        ]);
        let m = MetapopModel::uniform(k).unwrap();
        let a = assemble_reducible(&m, &CostFunction::Uniform, &quick()).unwrap();
        assert!(a.agrees(), "gaps {} {} tol {}", a.pareto_gap, a.anti_gap, a.tolerance);
    }

    #[test]
    fn remainder_stays_unvaccinated() {
        // group 2 is infected but infects no one
        let k = Matrix::from_array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [1.0, 1.0, 0.0]]);
        let m = MetapopModel::uniform(k).unwrap();
        let a = assemble_reducible(&m, &CostFunction::Uniform, &quick()).unwrap();
        for p in &a.pareto.points {
            assert_eq!(p.strategy.values()[2], 1.0);
        }
    }

    #[test]
    fn ray_check_preconditions() {
        let m = fixtures::cycle_model(12);
        let eta = Strategy::new(vec![0.5; 12]).unwrap();
        assert!(matches!(
            optimal_ray_check(&m, &CostFunction::Uniform, &eta, &quick()),
            Err(Error::PreconditionFailed(_))
        ));
        let m = MetapopModel::uniform(fixtures::psd_example()).unwrap();
        assert!(optimal_ray_check(&m, &CostFunction::Uniform, &Strategy::ones(3), &quick()).is_err());
    }

    #[test]
    fn feasible_sample_on_scalar_segment() {
        let m = MetapopModel::uniform(Matrix::from_array([[4.0]])).unwrap();
        let s = feasible_region_sample(&m, &CostFunction::Uniform, 50, 3).unwrap();
        assert!(s.iter().all(|(c, l)| (l - 4.0 * (1.0 - c)).abs() < 1e-12));
    }
}

