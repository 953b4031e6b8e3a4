//! Maximum-weight independent sets of the kernel support and the
//! eradication cost.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{compensated_sum, cost_with_weights, CostFunction, MetapopModel, Strategy};
use crate::spectral::effective_re;
use crate::structure::frobenius_decompose;

/// Default exact-search budget on the number of groups.
pub const MWIS_BUDGET: usize = 40;
const TIE_EPS: f64 = 1e-12;
const BRUTE_FORCE_LIMIT: usize = 25;

#[derive(Clone, Debug, Serialize)]
pub struct IndependentSetResult {
    pub set: Vec<usize>,
    /// Weight of the set: `c_max − C(1_A)`.
    pub alpha: f64,
    /// `C(1_A)`.
    pub cstar: f64,
}

/// Conflict graph restricted to `vertices`: self-infecting groups are
/// dropped, and `i`, `j` conflict when either infects the other.
struct Conflicts {
    /// Global ids, increasing.
    ids: Vec<usize>,
    weights: Vec<f64>,
    adj: Vec<u128>,
}

impl Conflicts {
    fn build(k: &Matrix, w: &[f64], vertices: &[usize]) -> Self {
        let ids: Vec<usize> = vertices.iter().copied().filter(|&i| k[(i, i)] == 0.0).collect();
        let weights = ids.iter().map(|&i| w[i]).collect();
        let adj = ids
            .iter()
            .map(|&i| {
                ids.iter().enumerate().fold(0u128, |acc, (b, &j)| {
                    if j != i && (k[(i, j)] > 0.0 || k[(j, i)] > 0.0) {
                        acc | (1u128 << b)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Conflicts { ids, weights, adj }
    }

    fn weight_of(&self, mask: u128) -> f64 {
        // index order keeps sums reproducible across solvers
        compensated_sum(
            (0..self.ids.len())
                .filter(|&b| mask >> b & 1 == 1)
                .map(|b| self.weights[b]),
        )
    }

    fn to_global(&self, mask: u128) -> Vec<usize> {
        (0..self.ids.len())
            .filter(|&b| mask >> b & 1 == 1)
            .map(|b| self.ids[b])
            .collect()
    }
}

struct Search<'a> {
    g: &'a Conflicts,
    best: f64,
    best_mask: u128,
}

impl Search<'_> {
    /// Greedy clique cover bound: each clique contributes its heaviest member.
    fn bound(&self, mut cand: u128) -> f64 {
        let mut total = 0.0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut clique = 1u128 << v;
            let mut heaviest = self.g.weights[v];
            let mut rest = cand & !clique & self.g.adj[v];
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= !(1u128 << u);
                if self.g.adj[u] & clique == clique {
                    clique |= 1u128 << u;
                    heaviest = heaviest.max(self.g.weights[u]);
                    rest &= self.g.adj[u];
                }
            }
            total += heaviest;
            cand &= !clique;
        }
        total
    }

    fn run(&mut self, current: u128, weight: f64, cand: u128) {
        if cand == 0 {
            if weight > self.best + TIE_EPS * self.best.max(1.0) {
                self.best = weight;
                self.best_mask = current;
            }
            return;
        }
        if weight + self.bound(cand) <= self.best + TIE_EPS * self.best.max(1.0) {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u128 << v;
        // include first, so the first optimum found is the lexicographically smallest
        self.run(current | bit, weight + self.g.weights[v], cand & !bit & !self.g.adj[v]);
        self.run(current, weight, cand & !bit);
    }
}

fn solve(g: &Conflicts) -> u128 {
    let n = g.ids.len();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    // isolated vertices belong to every optimum
    let isolated = (0..n).filter(|&b| g.adj[b] == 0).fold(0u128, |m, b| m | 1u128 << b);
    let mut s = Search {
        g,
        best: f64::NEG_INFINITY,
        best_mask: 0,
    };
    let w0 = g.weight_of(isolated);
    s.run(isolated, w0, all & !isolated);
    s.best_mask
}

fn check_budget(n: usize, force: bool) -> Result<()> {
    if n > 128 || (n > MWIS_BUDGET && !force) {
        return Err(Error::BudgetExceeded(format!(
            "exact independent-set search on {n} groups (limit {MWIS_BUDGET}, forced limit 128)"
        )));
    }
    Ok(())
}

fn result_for(model: &MetapopModel, w: &[f64], set: Vec<usize>) -> IndependentSetResult {
    let eta = Strategy::indicator(model.n(), &set);
    let alpha = compensated_sum(set.iter().map(|&i| w[i]));
    IndependentSetResult {
        cstar: cost_with_weights(w, eta.values()),
        alpha,
        set,
    }
}

/// Exact maximum-weight independent set with weights `c_i μ_i`, by branch
/// and bound. Ties go to the lexicographically smallest set.
pub fn max_independent_set(model: &MetapopModel, cost: &CostFunction) -> Result<IndependentSetResult> {
    max_independent_set_with(model, cost, false)
}

pub fn max_independent_set_with(
    model: &MetapopModel,
    cost: &CostFunction,
    force: bool,
) -> Result<IndependentSetResult> {
    check_budget(model.n(), force)?;
    let w = cost.group_weights(model)?;
    let all: Vec<usize> = (0..model.n()).collect();
    let g = Conflicts::build(model.matrix(), &w, &all);
    let set = g.to_global(solve(&g));
    Ok(result_for(model, &w, set))
}

/// Exhaustive reference solver for small models.
pub fn max_independent_set_brute_force(
    model: &MetapopModel,
    cost: &CostFunction,
) -> Result<IndependentSetResult> {
    let w = cost.group_weights(model)?;
    let all: Vec<usize> = (0..model.n()).collect();
    let g = Conflicts::build(model.matrix(), &w, &all);
    let n = g.ids.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "brute force over {n} eligible groups (limit {BRUTE_FORCE_LIMIT})"
        )));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_set: Vec<usize> = Vec::new();
    for mask in 0u128..(1u128 << n) {
        let independent = (0..n).all(|b| mask >> b & 1 == 0 || g.adj[b] & mask == 0);
        if !independent {
            continue;
        }
        let weight = g.weight_of(mask);
        let set = g.to_global(mask);
        let eps = TIE_EPS * best.max(1.0);
        if weight > best + eps || ((weight - best).abs() <= eps && set < best_set) {
            best = weight;
            best_set = set;
        }
    }
    Ok(result_for(model, &w, best_set))
}

#[derive(Clone, Debug, Serialize)]
pub struct EradicationResult {
    pub cstar: f64,
    pub strategy: Strategy,
    /// Groups left unvaccinated.
    pub set: Vec<usize>,
    /// `c_max − cstar`.
    pub alpha: f64,
    /// True when every atom has symmetric support, so that `cstar` is the
    /// minimal eradication cost; otherwise it is an upper bound.
    pub exact: bool,
    pub re_check: f64,
}

/// Cheapest strategy found with `R_e = 0`: the remainder of the Frobenius
/// decomposition stays unvaccinated and each atom keeps a maximum-weight
/// independent subset.
pub fn eradication_cost(model: &MetapopModel, cost: &CostFunction) -> Result<EradicationResult> {
    eradication_cost_with(model, cost, false)
}

pub fn eradication_cost_with(
    model: &MetapopModel,
    cost: &CostFunction,
    force: bool,
) -> Result<EradicationResult> {
    let n = model.n();
    let k = model.matrix();
    let w = cost.group_weights(model)?;
    let dec = frobenius_decompose(model)?;
    let mut set = dec.remainder.clone();
    let mut exact = true;
    for atom in &dec.atoms {
        check_budget(atom.len(), force)?;
        let g = Conflicts::build(k, &w, atom);
        set.extend(g.to_global(solve(&g)));
        exact &= atom
            .iter()
            .all(|&i| atom.iter().all(|&j| (k[(i, j)] > 0.0) == (k[(j, i)] > 0.0)));
    }
    set.sort_unstable();
    let strategy = Strategy::indicator(n, &set);
    let re_check = effective_re(model, &strategy)?;
    if re_check > 1e-10 {
        return Err(Error::SolverStall(format!(
            "eradicating set leaves R_e = {re_check:e}"
        )));
    }
    let r = result_for(model, &w, set);
    Ok(EradicationResult {
        cstar: r.cstar,
        strategy,
        set: r.set,
        alpha: r.alpha,
        exact,
        re_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate;
    use crate::model::Strategy;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn independent(k: &Matrix, set: &[usize]) -> bool {
        set.iter().all(|&i| set.iter().all(|&j| k[(i, j)] == 0.0))
    }

    #[test]
    fn cycle_independent_set() {
        let m = fixtures::cycle_model(12);
        let r = max_independent_set(&m, &CostFunction::Uniform).unwrap();
        assert_eq!(r.set, vec![0, 2, 4, 6, 8, 10]);
        assert!((r.alpha - 0.5).abs() < 1e-15);
    }

    #[test]
    fn triangle_and_zero() {
        let tri = fixtures::cycle_model(3);
        let r = max_independent_set(&tri, &CostFunction::Uniform).unwrap();
        assert_eq!(r.set.len(), 1);
        assert!((r.alpha - 1.0 / 3.0).abs() < 1e-15);
        // brute-force oracle over the 8 subsets
        let bf = max_independent_set_brute_force(&tri, &CostFunction::Uniform).unwrap();
        assert_eq!(bf.set, r.set);

        let z = MetapopModel::uniform(Matrix::zeros(4)).unwrap();
        let r = max_independent_set(&z, &CostFunction::Uniform).unwrap();
        assert_eq!(r.set, vec![0, 1, 2, 3]);
        assert!((r.alpha - 1.0).abs() < 1e-15);
    }

    #[test]
    fn budget_enforced() {
        let m = MetapopModel::uniform(Matrix::zeros(41)).unwrap();
        assert!(matches!(
            max_independent_set(&m, &CostFunction::Uniform),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(max_independent_set_with(&m, &CostFunction::Uniform, true).is_ok());
    }

    #[test]
    fn eradication_examples() {
        let m = fixtures::cycle_model(12);
        let e = eradication_cost(&m, &CostFunction::Uniform).unwrap();
        assert_eq!(e.cstar, 0.5);
        assert_eq!(e.set, vec![0, 2, 4, 6, 8, 10]);
        assert!(e.exact);
        assert_eq!(e.re_check, 0.0);

        let p = MetapopModel::uniform(Matrix::from_array([[1.0, 2.0], [3.0, 4.0]])).unwrap();
        let e = eradication_cost(&p, &CostFunction::Uniform).unwrap();
        assert!((e.cstar - 1.0).abs() < 1e-15);
        assert!(e.set.is_empty());
    }

    #[test]
    fn eradication_keeps_remainder() {
        // 0 ↔ 1 form an atom that infects the harmless group 2
        let k = Matrix::from_array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let m = MetapopModel::uniform(k).unwrap();
        let e = eradication_cost(&m, &CostFunction::Uniform).unwrap();
        assert!(e.set.contains(&2));
        assert!((e.cstar - 1.0 / 3.0).abs() < 1e-15);
        assert!(e.exact);
    }

    #[test]
    fn asymmetric_atom_is_flagged() {
        let k = Matrix::from_array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
        let m = MetapopModel::uniform(k).unwrap();
        let e = eradication_cost(&m, &CostFunction::Uniform).unwrap();
        assert!(!e.exact);
        assert_eq!(e.re_check, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn branch_and_bound_matches_brute_force(seed in any::<u64>(), n in 1usize..=14, density in 0.05..0.6f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = generate::random_nonnegative(&mut rng, n, density);
            let m = MetapopModel::new(k.clone(), generate::random_weights(&mut rng, n), None).unwrap();
            let bb = max_independent_set(&m, &CostFunction::Uniform).unwrap();
            let bf = max_independent_set_brute_force(&m, &CostFunction::Uniform).unwrap();
            prop_assert_eq!(bb.alpha, bf.alpha);
            prop_assert!(independent(&k, &bb.set));
            prop_assert_eq!(effective_re(&m, &Strategy::indicator(n, &bb.set)).unwrap(), 0.0);

            // only the support matters
            let s = Matrix::from_fn(n, |i, j| if k[(i, j)] > 0.0 { 1.0 } else { 0.0 });
            let ms = MetapopModel::new(s, m.weights().to_vec(), None).unwrap();
            prop_assert_eq!(max_independent_set(&ms, &CostFunction::Uniform).unwrap().set, bb.set);
        }
    }
}
