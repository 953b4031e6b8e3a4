//! Effective reproduction numbers, kernel structure, convexity diagnostics,
//! eradication costs and vaccination frontiers for metapopulation
//! next-generation matrices.

pub mod convexity;
pub mod error;
pub mod fixtures;
pub mod frontier;
pub mod generate;
pub mod graph;
pub mod independent;
pub mod matrix;
pub mod model;
pub mod spectral;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::{
    cost, double_norm, grid_to_model, load_grid, load_model, save_model, CostFunction,
    GridKernelSpec, MetapopModel, Strategy,
};
pub use spectral::{
    basic_reproduction_number, dominant_pair, effective_re, full_spectrum, inertia, re_gradient,
    spectral_radius, EigenPair, Spectrum,
};
pub use structure::{
    classify, cordon_improvement, frobenius_decompose, is_disconnecting, is_invariant,
    support_digraph, Classification, CordonCertificate, FrobeniusDecomposition,
};
pub use convexity::{
    classify_convexity, probe_convexity, sylvester_check, symmetrize, ConvexityVerdict,
    ProbeReport, SymmetrizabilityResult, Verdict,
};
pub use independent::{
    eradication_cost, max_independent_set, EradicationResult, IndependentSetResult,
};
pub use frontier::{
    anti_pareto_frontier, assemble_reducible, feasible_region_sample, optimal_loss,
    optimal_loss_max, optimal_ray_check, pareto_frontier, FrontierCurve, FrontierKind,
    FrontierOptions, PointStatus,
};
