//! Intertwining operators between local representations.
//!
//! An intertwiner for representations ρ of λ and ρ' of λ' is an
//! isomorphism L: V' → V with (ρ ∘ Φ)(X') = L ρ'(X') L⁻¹ for every
//! generator X' of λ'. Such maps are only defined up to scalars, so they
//! are carried around as [`ProjectiveMap`]s.

pub mod diagonal_exchange;
pub mod elementary;
pub mod pa;
pub mod solve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{condition_number, frob, inner, inverse, CMat, C64};
use crate::quantum_algebra::{AlgebraError, GeneratorImages};
use crate::representations::RepError;
use crate::surface_topology::TopologyError;

pub use diagonal_exchange::{exchange_intertwiner, exchange_closed_form, exchange_psi, prefactor, psi, xi_map, SquareData};
pub use elementary::{
    b_operator, compose_path, elementary_intertwiner, flip_intertwiner, identification_intertwiner,
    path_action_deviation, path_steps, transport_class, transport_class_iso, verify_pentagon, BOperator,
    IntertwinerSet, PathStep, PentagonReport,
};
pub use pa::{pa_invariant, solve_fixed_shadow, PaInvariant, PaOptions};
pub use solve::{intertwiner_space, IntertwinerSpace, NULL_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntertwinerError {
    #[error("representations are not isomorphic: {0}")]
    NotIsomorphic(String),
    #[error("intertwiner space has dimension {0}; the pair is reducible")]
    NotUnique(usize),
    #[error("degenerate invariant: x_{0} = −1")]
    DegenerateInvariant(usize),
    #[error("triangulations are not one elementary move apart")]
    NotElementary,
    #[error("edges do not form a pentagon configuration")]
    NotPentagonConfiguration,
    #[error("shadow is not fixed by the mapping class (residual {0:.3e})")]
    NotFixedShadow(f64),
    #[error("fixed-shadow solver did not converge")]
    ShadowSolverFailed,
    #[error("invalid square data: {0}")]
    InvalidSquareData(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Condition numbers above this reject a computed intertwiner as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// An invertible matrix up to a nonzero scalar. The stored representative
/// has its first (row-major) entry of maximal modulus equal to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMap {
    matrix: CMat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectiveMapJson {
    pub dim: usize,
    /// Row-major entries as [re, im].
    pub matrix: Vec<[f64; 2]>,
    pub normalization: String,
}

impl ProjectiveMap {
    pub fn new(m: CMat) -> Self {
        let max = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return ProjectiveMap { matrix: m };
        }
        let cutoff = (1.0 - 1e-9) * max;
        let mut pivot = None;
        'outer: for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() >= cutoff {
                    pivot = Some(m[(r, c)]);
                    break 'outer;
                }
            }
        }
        let p = pivot.expect("max entry exists");
        ProjectiveMap { matrix: m / p }
    }

    pub fn identity(d: usize) -> Self {
        ProjectiveMap { matrix: CMat::identity(d, d) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// ‖A − sB‖ / ‖A‖ with the optimal s = ⟨B, A⟩ / ⟨B, B⟩.
    pub fn distance(&self, other: &ProjectiveMap) -> f64 {
        projective_distance(&self.matrix, &other.matrix)
    }

    pub fn approx_eq(&self, other: &ProjectiveMap, tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol
    }

    /// self ∘ other.
    pub fn compose(&self, other: &ProjectiveMap) -> ProjectiveMap {
        ProjectiveMap::new(&self.matrix * &other.matrix)
    }

    pub fn inverse(&self) -> Option<ProjectiveMap> {
        inverse(&self.matrix).map(ProjectiveMap::new)
    }

    pub fn to_json(&self) -> ProjectiveMapJson {
        let m = &self.matrix;
        let mut entries = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                entries.push([m[(r, c)].re, m[(r, c)].im]);
            }
        }
        ProjectiveMapJson { dim: m.nrows(), matrix: entries, normalization: "max-entry".into() }
    }

    pub fn from_json(j: &ProjectiveMapJson) -> Result<Self, IntertwinerError> {
        if j.matrix.len() != j.dim * j.dim {
            return Err(IntertwinerError::NotIsomorphic("matrix size does not match dim".into()));
        }
        let m = CMat::from_row_iterator(j.dim, j.dim, j.matrix.iter().map(|p| C64::new(p[0], p[1])));
        Ok(ProjectiveMap::new(m))
    }
}

pub fn projective_distance(a: &CMat, b: &CMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let bb = inner(b, b);
    if bb.norm() == 0.0 {
        return if frob(a) == 0.0 { 0.0 } else { 1.0 };
    }
    let s = inner(b, a) / bb;
    frob(&(a - b * s)) / frob(a).max(f64::MIN_POSITIVE)
}

/// Largest relative residual of (ρ∘Φ)(X') = L ρ'(X') L⁻¹ over generators.
pub fn intertwining_residual(l: &CMat, source: &[CMat], target: &[CMat]) -> f64 {
    let li = match inverse(l) {
        Some(x) => x,
        None => return f64::INFINITY,
    };
    source
        .iter()
        .zip(target)
        .map(|(s, t)| crate::linalg::rel_err(s, &(l * t * &li)))
        .fold(0.0, f64::max)
}

/// The unique (up to scalar) L with source(X_g) = L target(X_g) L⁻¹.
pub fn solve_intertwiner_mats(source: &[CMat], target: &[CMat]) -> Result<ProjectiveMap, IntertwinerError> {
    if source.len() != target.len() || source.is_empty() {
        return Err(IntertwinerError::NotIsomorphic("generator counts differ".into()));
    }
    if source[0].shape() != target[0].shape() {
        return Err(IntertwinerError::NotIsomorphic("dimensions differ".into()));
    }
    let sp = intertwiner_space(source, target, NULL_TOL);
    match sp.dim() {
        0 => Err(IntertwinerError::NotIsomorphic("no nonzero intertwiner".into())),
        1 => {
            let l = sp.basis.into_iter().next().unwrap();
            if condition_number(&l) > MAX_CONDITION {
                return Err(IntertwinerError::NotIsomorphic("intertwiner is singular".into()));
            }
            Ok(ProjectiveMap::new(l))
        }
        k => Err(IntertwinerError::NotUnique(k)),
    }
}

pub fn solve_intertwiner<A: GeneratorImages, B: GeneratorImages>(source: &A, target: &B) -> Result<ProjectiveMap, IntertwinerError> {
    if source.generators() != target.generators() {
        return Err(IntertwinerError::NotIsomorphic("different generator contexts".into()));
    }
    let s: Vec<CMat> = (0..source.generators()).map(|g| source.image(g).clone()).collect();
    let t: Vec<CMat> = (0..target.generators()).map(|g| target.image(g).clone()).collect();
    solve_intertwiner_mats(&s, &t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_distance() {
        let m = CMat::from_row_slice(2, 2, &[C64::new(1.0, 1.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 2.0)]);
        let p = ProjectiveMap::new(m.clone());
        assert!((p.matrix()[(1, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let q = ProjectiveMap::new(m * C64::new(-3.0, 0.7));
        assert!(p.distance(&q) < 1e-14);
        assert!(p.approx_eq(&q, 1e-12));
        assert!(p.distance(&ProjectiveMap::identity(2)) > 0.1);
        let back = ProjectiveMap::from_json(&p.to_json()).unwrap();
        assert!(back.distance(&p) < 1e-15);
    }
}
