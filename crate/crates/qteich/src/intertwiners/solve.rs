//! Numerical intertwiner spaces {L : S_g L = L T_g for all g}.
//!
//! When every target matrix is monomial the unknown columns of L are tied
//! together along the orbits of the induced permutations: fixing L e_k on one
//! basis vector per orbit determines the whole orbit, and the remaining
//! consistency conditions form a small stacked system per orbit. Otherwise
//! the dense Kronecker system (I⊗S_g − T_gᵀ⊗I) vec L = 0 is solved.

use std::collections::VecDeque;

use crate::linalg::{frob, monomial_structure, null_space, null_space_scaled, CMat, C64};

/// Singular values below this fraction of the largest count as zero.
pub const NULL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct IntertwinerSpace {
    pub basis: Vec<CMat>,
    /// Smallest retained and largest discarded relative singular values,
    /// useful as a gap diagnostic.
    pub gap: (f64, f64),
}

impl IntertwinerSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Basis of the space of L with `source[g] · L = L · target[g]`.
pub fn intertwiner_space(source: &[CMat], target: &[CMat], rel_tol: f64) -> IntertwinerSpace {
    assert_eq!(source.len(), target.len());
    let mono: Option<Vec<Vec<(usize, C64)>>> = target.iter().map(monomial_structure).collect();
    match mono {
        Some(m) if !source.is_empty() => reduced(source, &m, rel_tol),
        _ => dense(source, target, rel_tol),
    }
}

fn gap_of(sv: &[f64], kept: usize, scale: f64) -> (f64, f64) {
    let smax = sv.first().cloned().unwrap_or(0.0).max(scale).max(f64::MIN_POSITIVE);
    let nz = sv.len().saturating_sub(kept);
    let last_nonzero = if nz > 0 { sv[nz - 1] / smax } else { 0.0 };
    let first_zero = if kept > 0 { sv[nz] / smax } else { 0.0 };
    (first_zero, last_nonzero)
}

fn reduced(source: &[CMat], mono: &[Vec<(usize, C64)>], rel_tol: f64) -> IntertwinerSpace {
    let d = source[0].nrows();
    // L e_k = P_k u with u = L e_{k0} for the orbit seed k0
    let mut assigned: Vec<Option<CMat>> = vec![None; d];
    let mut basis = Vec::new();
    let mut gap = (0.0f64, 1.0f64);
    for k0 in 0..d {
        if assigned[k0].is_some() {
            continue;
        }
        let mut orbit = vec![k0];
        assigned[k0] = Some(CMat::identity(d, d));
        let mut queue = VecDeque::from([k0]);
        while let Some(k) = queue.pop_front() {
            for (g, m) in mono.iter().enumerate() {
                let (kk, b) = m[k];
                if assigned[kk].is_none() {
                    let p = &source[g] * assigned[k].as_ref().unwrap() / b;
                    assigned[kk] = Some(p);
                    orbit.push(kk);
                    queue.push_back(kk);
                }
            }
        }
        // consistent orbits give residuals at rounding level, so the
        // threshold is measured against the size of the terms themselves
        let mut rows = Vec::new();
        let mut scale = 0.0f64;
        for &k in &orbit {
            let pk = assigned[k].as_ref().unwrap();
            for (g, m) in mono.iter().enumerate() {
                let (kk, b) = m[k];
                let lhs = &source[g] * pk;
                let rhs = assigned[kk].as_ref().unwrap() * b;
                scale = scale.max(frob(&lhs)).max(frob(&rhs));
                rows.push(lhs - rhs);
            }
        }
        let mut system = CMat::zeros(rows.len().max(1) * d, d);
        for (i, r) in rows.iter().enumerate() {
            system.view_mut((i * d, 0), (d, d)).copy_from(r);
        }
        let ns = null_space_scaled(&system, rel_tol, scale);
        let g = gap_of(&ns.singular_values, ns.basis.len(), scale);
        gap = (gap.0.max(g.0), if ns.basis.len() < d { gap.1.min(g.1) } else { gap.1 });
        for u in ns.basis {
            let mut l = CMat::zeros(d, d);
            for &k in &orbit {
                let col = assigned[k].as_ref().unwrap() * &u;
                l.set_column(k, &col);
            }
            basis.push(l);
        }
    }
    IntertwinerSpace { basis, gap }
}

fn dense(source: &[CMat], target: &[CMat], rel_tol: f64) -> IntertwinerSpace {
    let d = source.first().map_or(0, |s| s.nrows());
    let dd = d * d;
    let id = CMat::identity(d, d);
    let mut system = CMat::zeros(source.len().max(1) * dd, dd);
    for (g, (s, t)) in source.iter().zip(target).enumerate() {
        // vec(S L − L T) = (I ⊗ S − Tᵀ ⊗ I) vec L, column-major vec
        let block = id.kronecker(s) - t.transpose().kronecker(&id);
        system.view_mut((g * dd, 0), (dd, dd)).copy_from(&block);
    }
    let ns = null_space(&system, rel_tol);
    let gap = gap_of(&ns.singular_values, ns.basis.len(), 0.0);
    let basis = ns.basis.iter().map(|v| CMat::from_column_slice(d, d, v.as_slice())).collect();
    IntertwinerSpace { basis, gap }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inverse, rel_err};
    use crate::representations::standard_matrices;

    #[test]
    fn identity_is_only_self_intertwiner_of_triangle() {
        let b = standard_matrices(3);
        let gens = b.b.to_vec();
        let sp = intertwiner_space(&gens, &gens, NULL_TOL);
        assert_eq!(sp.dim(), 1);
        let l = &sp.basis[0];
        let s = l[(0, 0)];
        assert!(rel_err(&(CMat::identity(3, 3) * s), l) < 1e-10);
    }

    #[test]
    fn recovers_known_conjugator() {
        let b = standard_matrices(3);
        let t = CMat::from_fn(3, 3, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 + 0.5, ((i * j) % 3) as f64 - 0.7));
        let ti = inverse(&t).unwrap();
        let source: Vec<CMat> = b.b.iter().map(|m| &t * m * &ti).collect();
        let sp = intertwiner_space(&source, &b.b, NULL_TOL);
        assert_eq!(sp.dim(), 1);
        let l = &sp.basis[0];
        let s = crate::linalg::inner(l, &t) / crate::linalg::inner(l, l);
        assert!(rel_err(&t, &(l * s)) < 1e-9);
    }

    #[test]
    fn dense_and_reduced_agree_on_dimension() {
        let b = standard_matrices(2);
        let red = intertwiner_space(&b.b, &b.b, NULL_TOL);
        let den = dense(&b.b, &b.b, NULL_TOL);
        assert_eq!(red.dim(), den.dim());
        // commutant of a single diagonal generator with distinct entries
        let one = vec![b.b[0].clone()];
        assert_eq!(intertwiner_space(&one, &one, NULL_TOL).dim(), 2);
    }
}
