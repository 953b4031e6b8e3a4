//! Bundled reference models. These ship with the library so the
//! verification harness runs with no input files.

use crate::matrix::Matrix;
use crate::model::{MetapopModel, Strategy};

/// Adjacency matrix of the undirected `n`-cycle with uniform weights.
pub fn cycle_model(n: usize) -> MetapopModel {
    let k = Matrix::from_fn(n, |i, j| {
        let d = (i + n - j) % n;
        if n > 1 && (d == 1 || d == n - 1) {
            1.0
        } else {
            0.0
        }
    });
    MetapopModel::uniform(k).expect("cycle fixture is valid")
}

/// "One in 4" on the 12-cycle: every fourth group fully vaccinated.
pub fn one_in_four() -> Strategy {
    let v = (0..12).map(|i| if i % 4 == 3 { 0.0 } else { 1.0 }).collect();
    Strategy::new(v).expect("fixture strategy is valid")
}

/// Counterexample to convexity: nonsymmetrizable, positive spectrum.
pub fn counter_convex() -> Matrix {
    Matrix::from_array([[16.0, 12.0, 11.0], [1.0, 12.0, 12.0], [8.0, 1.0, 1.0]])
}

/// Counterexample to concavity: one positive eigenvalue, yet not concave.
pub fn counter_concave() -> Matrix {
    Matrix::from_array([[9.0, 13.0, 14.0], [18.0, 6.0, 5.0], [1.0, 6.0, 6.0]])
}

/// Symmetric positive definite example.
pub fn psd_example() -> Matrix {
    Matrix::from_array([[3.0, 2.0, 0.0], [2.0, 2.0, 1.0], [0.0, 1.0, 4.0]])
}

/// Two isolated groups with reproduction numbers 3 and 1, equal weights.
pub fn two_block() -> MetapopModel {
    MetapopModel::uniform(Matrix::from_array([[3.0, 0.0], [0.0, 1.0]]))
        .expect("two-block fixture is valid")
}

pub fn counter_convex_model() -> MetapopModel {
    MetapopModel::uniform(counter_convex()).expect("fixture is valid")
}

pub fn counter_concave_model() -> MetapopModel {
    MetapopModel::uniform(counter_concave()).expect("fixture is valid")
}
