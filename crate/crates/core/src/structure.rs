//! Support structure of a kernel: invariant sets, the Frobenius
//! decomposition into atoms, irreducibility flags and cordons sanitaires.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::model::{CostFunction, MetapopModel, Strategy};
use crate::spectral::{effective_re, spectral_radius};

/// Support digraph with edge `j → i` iff `K_ij > threshold`.
pub fn support_digraph(model: &MetapopModel, threshold: f64) -> Digraph {
    Digraph::from_support(model.matrix(), threshold)
}

/// `A` is invariant iff no group of `A` infects a group outside `A`.
pub fn is_invariant(model: &MetapopModel, set: &[usize]) -> bool {
    let n = model.n();
    let mut inside = vec![false; n];
    for &i in set {
        inside[i] = true;
    }
    let k = model.matrix();
    (0..n)
        .filter(|&i| !inside[i])
        .all(|i| set.iter().all(|&j| k[(i, j)] == 0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrobeniusDecomposition {
    /// Atoms, each sorted, listed by smallest index.
    pub atoms: Vec<Vec<usize>>,
    pub remainder: Vec<usize>,
    pub atom_radii: Vec<f64>,
    /// Atom positions in increasing `≺` order: if atom `a` infects atom `b`
    /// (through any path) then `b` comes before `a`.
    pub order: Vec<usize>,
}

impl FrobeniusDecomposition {
    pub fn is_monatomic(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn max_radius(&self) -> f64 {
        self.atom_radii.iter().copied().fold(0.0, f64::max)
    }

    /// Rank of each atom in the order.
    pub fn rank(&self) -> Vec<usize> {
        let mut r = vec![0; self.atoms.len()];
        for (pos, &a) in self.order.iter().enumerate() {
            r[a] = pos;
        }
        r
    }
}

pub fn frobenius_decompose(model: &MetapopModel) -> Result<FrobeniusDecomposition> {
    frobenius_decompose_with(model, 0.0)
}

/// Decomposition on the support `{K > threshold}`.
pub fn frobenius_decompose_with(
    model: &MetapopModel,
    threshold: f64,
) -> Result<FrobeniusDecomposition> {
    let n = model.n();
    let k = model.matrix();
    let g = support_digraph(model, threshold);
    let mut atoms = Vec::new();
    let mut atom_radii = Vec::new();
    let mut remainder = Vec::new();
    for comp in g.scc() {
        let r = if comp.len() == 1 {
            let i = comp[0];
            if k[(i, i)] > threshold {
                k[(i, i)]
            } else {
                0.0
            }
        } else {
            spectral_radius(&k.submatrix(&comp))?
        };
        if r > 0.0 {
            atoms.push(comp);
            atom_radii.push(r);
        } else {
            remainder.extend(comp);
        }
    }
    let mut idx: Vec<usize> = (0..atoms.len()).collect();
    idx.sort_by_key(|&a| atoms[a][0]);
    let atoms: Vec<Vec<usize>> = idx.iter().map(|&a| atoms[a].clone()).collect();
    let atom_radii: Vec<f64> = idx.iter().map(|&a| atom_radii[a]).collect();
    remainder.sort_unstable();

    // reach[a][b]: atom a infects atom b through some path
    let all = vec![true; n];
    let reach: Vec<Vec<bool>> = atoms
        .iter()
        .map(|a| {
            let seen = g.reachable_from(a, &all);
            atoms.iter().map(|b| seen[b[0]]).collect()
        })
        .collect();
    let m = atoms.len();
    let mut placed = vec![false; m];
    let mut order = Vec::with_capacity(m);
    for _ in 0..m {
        // next: lowest-indexed unplaced atom that infects no other unplaced atom
        let next = (0..m)
            .find(|&a| !placed[a] && (0..m).all(|b| b == a || placed[b] || !reach[a][b]))
            .expect("condensation is acyclic");
        placed[next] = true;
        order.push(next);
    }
    Ok(FrobeniusDecomposition {
        atoms,
        remainder,
        atom_radii,
        order,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub irreducible: bool,
    pub quasi_irreducible: bool,
    pub monatomic: bool,
    pub atom: Option<Vec<usize>>,
    pub infected: Option<Vec<usize>>,
}

pub fn classify(model: &MetapopModel) -> Result<Classification> {
    let n = model.n();
    let k = model.matrix();
    let dec = frobenius_decompose(model)?;
    let g = support_digraph(model, 0.0);
    let monatomic = dec.is_monatomic();
    let irreducible = monatomic && dec.atoms[0].len() == n;
    let active: Vec<bool> = (0..n)
        .map(|i| (0..n).any(|j| k[(i, j)] > 0.0 || k[(j, i)] > 0.0))
        .collect();
    let quasi_irreducible = g.is_strongly_connected_on(&active)
        && (active.iter().filter(|&&a| a).count() > 1 || monatomic);
    let (atom, infected) = if monatomic {
        let atom = dec.atoms[0].clone();
        let seen = g.reachable_from(&atom, &vec![true; n]);
        let infected: Vec<usize> = (0..n).filter(|&i| seen[i] && !atom.contains(&i)).collect();
        (Some(atom), Some(infected))
    } else {
        (None, None)
    };
    Ok(Classification {
        irreducible,
        quasi_irreducible,
        monatomic,
        atom,
        infected,
    })
}

fn positive_set(eta: &Strategy) -> Vec<bool> {
    eta.values().iter().map(|&x| x > 0.0).collect()
}

/// `η ≠ 𝟘` and the support restricted to `{η > 0}` is not strongly connected.
pub fn is_disconnecting(model: &MetapopModel, eta: &Strategy) -> Result<bool> {
    model.check_dim(eta.len())?;
    if eta.is_zero() {
        return Ok(false);
    }
    let g = support_digraph(model, 0.0);
    Ok(!g.is_strongly_connected_on(&positive_set(eta)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CordonCertificate {
    pub improved: Strategy,
    /// Groups kept at their original level.
    pub kept: Vec<usize>,
    /// Groups newly vaccinated in full.
    pub vaccinated: Vec<usize>,
    pub re_before: f64,
    pub re_after: f64,
    pub cost_before: f64,
    pub cost_after: f64,
}

/// Splits `{η > 0}` into a sink component `X` and the rest (neither side
/// infects the other in the direction that matters), then vaccinates the
/// side with the smaller effective radius entirely. The loss is unchanged
/// and the cost strictly increases.
pub fn cordon_improvement(
    model: &MetapopModel,
    eta: &Strategy,
    cost: &CostFunction,
) -> Result<CordonCertificate> {
    if !is_disconnecting(model, eta)? {
        return Err(Error::NotDisconnecting);
    }
    let n = model.n();
    let active = positive_set(eta);
    let g = support_digraph(model, 0.0);
    let comps = g.scc_on(&active);
    // sink components of the restricted graph infect nothing else in it
    let sink = comps
        .iter()
        .filter(|c| {
            c.iter()
                .all(|&v| g.successors(v).iter().all(|&w| !active[w] || c.contains(&w)))
        })
        .min_by_key(|c| c[0])
        .expect("a finite digraph has a sink component")
        .clone();
    let rest: Vec<usize> = (0..n).filter(|&i| active[i] && !sink.contains(&i)).collect();
    let re_sink = effective_re(model, &eta.masked(&sink))?;
    let re_rest = effective_re(model, &eta.masked(&rest))?;
    let (kept, vaccinated) = if re_sink > re_rest {
        (sink, rest)
    } else {
        (rest, sink)
    };
    let improved = eta.masked(&kept);
    Ok(CordonCertificate {
        re_before: effective_re(model, eta)?,
        re_after: effective_re(model, &improved)?,
        cost_before: cost.evaluate(model, eta)?,
        cost_after: cost.evaluate(model, &improved)?,
        improved,
        kept,
        vaccinated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate;
    use crate::matrix::Matrix;
    use crate::spectral::{basic_reproduction_number, full_spectrum};
    use num_complex::Complex64;
    use crate::model::Strategy;
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(rows: &[Vec<f64>]) -> MetapopModel {
        MetapopModel::uniform(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn support_digraph_examples() {
        let g = support_digraph(&fixtures::cycle_model(12), 0.0);
        assert_eq!(g.edges().len(), 24);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0) && g.has_edge(11, 0));
        assert!(support_digraph(&model(&[vec![0.0; 2], vec![0.0; 2]]), 0.0)
            .edges()
            .is_empty());
        let g = support_digraph(&model(&[vec![0.0, 0.0], vec![1.0, 0.0]]), 0.0);
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn invariance_examples() {
        let m = model(&[vec![1.0, 0.0], vec![1.0, 2.0]]);
        assert!(!is_invariant(&m, &[0]));
        assert!(is_invariant(&m, &[1]));
        assert!(is_invariant(&m, &[]));
        assert!(is_invariant(&m, &[0, 1]));
        assert!(!is_invariant(&fixtures::cycle_model(12), &[0, 1, 2]));
    }

    #[test]
    fn decomposition_examples() {
        let d = frobenius_decompose(&fixtures::counter_convex_model()).unwrap();
        assert_eq!(d.atoms, vec![vec![0, 1, 2]]);
        assert!(d.remainder.is_empty());

        let d = frobenius_decompose(&model(&[vec![1.0, 0.0], vec![1.0, 2.0]])).unwrap();
        assert_eq!(d.atoms, vec![vec![0], vec![1]]);
        assert_eq!(d.atom_radii, vec![1.0, 2.0]);
        // atom 0 infects atom 1, so atom 1 precedes it
        assert_eq!(d.order, vec![1, 0]);

        let d = frobenius_decompose(&model(&[
            vec![0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ]))
        .unwrap();
        assert!(d.atoms.is_empty());
        assert_eq!(d.remainder, vec![0, 1, 2]);
    }

    #[test]
    fn classification_examples() {
        let c = classify(&fixtures::cycle_model(12)).unwrap();
        assert!(c.irreducible && c.quasi_irreducible && c.monatomic);

        let c = classify(&model(&[vec![1.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert!(!c.monatomic && !c.irreducible);

        let c = classify(&model(&[vec![1.0, 0.0], vec![1.0, 0.0]])).unwrap();
        assert!(c.monatomic && !c.quasi_irreducible && !c.irreducible);
        assert_eq!(c.atom, Some(vec![0]));
        assert_eq!(c.infected, Some(vec![1]));

        // an isolated susceptible group does not spoil quasi-irreducibility
        let c = classify(&model(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ]))
        .unwrap();
        assert!(c.quasi_irreducible && !c.irreducible && c.monatomic);

        let c = classify(&model(&[vec![0.0]])).unwrap();
        assert!(!c.irreducible && !c.monatomic);
    }

    #[test]
    fn disconnecting_examples() {
        let m = fixtures::cycle_model(12);
        assert!(is_disconnecting(&m, &fixtures::one_in_four()).unwrap());
        assert!(!is_disconnecting(&m, &Strategy::zeros(12)).unwrap());
        let p = fixtures::counter_convex_model();
        let eta = Strategy::new(vec![0.3, 1.0, 0.2]).unwrap();
        assert!(!is_disconnecting(&p, &eta).unwrap());
    }

    #[test]
    fn cordon_on_cycle() {
        let m = fixtures::cycle_model(12);
        let c = cordon_improvement(&m, &fixtures::one_in_four(), &CostFunction::Uniform).unwrap();
        assert!((c.re_after - 2f64.sqrt()).abs() < 1e-10);
        assert!((c.re_before - c.re_after).abs() < 1e-10);
        assert!((c.cost_before - 0.25).abs() < 1e-15);
        assert!((c.cost_after - 0.5).abs() < 1e-15);
        assert_eq!(c.vaccinated.len(), 3);
    }

    #[test]
    fn cordon_on_two_blocks() {
        let m = fixtures::two_block();
        let c = cordon_improvement(&m, &Strategy::ones(2), &CostFunction::Uniform).unwrap();
        assert_eq!(c.improved.values(), &[1.0, 0.0]);
        assert_eq!(c.re_after, 3.0);
    }

    #[test]
    fn cordon_requires_disconnecting() {
        let m = fixtures::cycle_model(12);
        assert!(matches!(
            cordon_improvement(&m, &Strategy::ones(12), &CostFunction::Uniform),
            Err(Error::NotDisconnecting)
        ));
    }

    fn block_sizes() -> impl proptest::strategy::Strategy<Value = Vec<usize>> {
        proptest::collection::vec(1usize..=4, 2..=4).prop_filter("N ≤ 10", |s| {
            s.iter().sum::<usize>() <= 10
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn block_max_law(sizes in block_sizes(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (k, blocks) = generate::random_block_triangular(&mut rng, &sizes);
            let n = k.dim();
            let m = MetapopModel::uniform(k.clone()).unwrap();
            let eta = generate::random_strategy(&mut rng, n);
            let r0 = basic_reproduction_number(&m).unwrap();
            let re = effective_re(&m, &eta).unwrap();
            let ke = k.scale_columns(eta.values());
            let block_max = blocks
                .iter()
                .map(|b| spectral_radius(&ke.submatrix(b)).unwrap())
                .fold(0.0, f64::max);
            prop_assert!((re - block_max).abs() <= 1e-9 * r0.max(1.0));

            // decomposition invariants
            let d = frobenius_decompose(&m).unwrap();
            let mut all: Vec<usize> = d.atoms.iter().flatten().copied().chain(d.remainder.iter().copied()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let rank = d.rank();
            for (a, atom_a) in d.atoms.iter().enumerate() {
                for (b, atom_b) in d.atoms.iter().enumerate() {
                    if rank[b] < rank[a] {
                        // b ≺ a: nothing flows from b into a
                        for &i in atom_a { for &j in atom_b { prop_assert_eq!(k[(i, j)], 0.0); } }
                    }
                }
            }
            prop_assert_eq!(spectral_radius(&k.submatrix(&d.remainder)).unwrap(), 0.0);
            prop_assert!((d.max_radius() - r0).abs() <= 1e-12 * r0.max(1.0));
        }

        #[test]
        fn disjoint_union_law(sizes in block_sizes(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (k, blocks) = generate::random_block_triangular(&mut rng, &sizes);
            let n = k.dim();
            let m = MetapopModel::uniform(k).unwrap();
            // A = last block (infects no earlier block), B = first block
            let a = blocks.last().unwrap().clone();
            let b = blocks[0].clone();
            let union: Vec<usize> = a.iter().chain(&b).copied().collect();
            let ra = effective_re(&m, &Strategy::indicator(n, &a)).unwrap();
            let rb = effective_re(&m, &Strategy::indicator(n, &b)).unwrap();
            let ru = effective_re(&m, &Strategy::indicator(n, &union)).unwrap();
            prop_assert!((ru - ra.max(rb)).abs() <= 1e-9 * ru.max(1.0));
        }

        #[test]
        fn multiplicity_additivity(sizes in block_sizes(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (k, _) = generate::random_block_triangular(&mut rng, &sizes);
            let n = k.dim();
            let m = MetapopModel::uniform(k.clone()).unwrap();
            let d = frobenius_decompose(&m).unwrap();
            let whole = full_spectrum(&k).unwrap();
            let parts: Vec<_> = d.atoms.iter().map(|a| full_spectrum(&k.submatrix(a)).unwrap()).collect();
            let mut assembled = Matrix::zeros(n);
            for a in &d.atoms {
                assembled = assembled.add(&k.submatrix(a).embed(a, n));
            }
            let tilde = full_spectrum(&assembled).unwrap();
            let cut = 1e-6 * whole.radius;
            for c in whole.eigenvalues.iter().filter(|c| c.re.hypot(c.im) > cut) {
                let z = Complex64::new(c.re, c.im);
                let total: usize = parts.iter().map(|p| p.multiplicity(z)).sum();
                prop_assert_eq!(whole.multiplicity(z), total);
                prop_assert_eq!(whole.multiplicity(z), tilde.multiplicity(z));
            }
        }

        #[test]
        fn cordon_certificate_holds(seed in any::<u64>(), n in 2usize..=9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = generate::random_nonnegative(&mut rng, n, 0.35);
            let m = MetapopModel::new(k, generate::random_weights(&mut rng, n), None).unwrap();
            let eta = generate::random_strategy(&mut rng, n);
            prop_assume!(is_disconnecting(&m, &eta).unwrap());
            let r0 = basic_reproduction_number(&m).unwrap();
            let c = cordon_improvement(&m, &eta, &CostFunction::Uniform).unwrap();
            prop_assert!((c.re_after - c.re_before).abs() <= 1e-10 * r0.max(1.0));
            prop_assert!(c.cost_after > c.cost_before);
        }
    }
}
