//! The invariant of a mapping class at a fixed shadow.
//!
//! Given a mapping class presented as a move sequence from λ to a record of
//! φ(λ) plus the identification of that record with λ, and a shear vector x
//! fixed by the induced coordinate change, the pipeline builds the standard
//! representation ρ with invariants (x, h = q^{2k}), composes the move
//! intertwiners to the standard representation on φ(λ), identifies back
//! with λ, and reports the homology orbit with conjugation-invariant
//! certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{inverse, principal_root, CMat, C64, ONE};
use crate::quantum_algebra::q_pow;
use crate::representations::{from_invariants, shadow_flip, RepError, RepInvariants};
use crate::surface_topology::{all_classes, apply_moves, invert_perm, HomologyClass, IdealTriangulation, Iso, MappingClass, Move};

use super::elementary::{b_operator, compose_path, identification_intertwiner};
use super::{IntertwinerError, ProjectiveMap};

type Res<T> = Result<T, IntertwinerError>;

#[derive(Clone, Debug)]
pub struct PaOptions {
    /// Fixed points are accepted below this relative residual.
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
    /// Random restarts for the Newton fallback.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for PaOptions {
    fn default() -> Self {
        PaOptions { tol: 1e-12, damping: 0.5, max_iter: 500, restarts: 40, seed: 0 }
    }
}

fn rep_err(e: RepError) -> IntertwinerError {
    match e {
        RepError::DegenerateInvariant(i) => IntertwinerError::DegenerateInvariant(i),
        other => IntertwinerError::Rep(other),
    }
}

/// Classical coordinates after running the moves of φ, read back on λ:
/// F(x)_e = x_final(π(e)).
pub fn shadow_action(lambda: &IdealTriangulation, mc: &MappingClass, x: &[C64]) -> Res<Vec<C64>> {
    let mut cur = lambda.clone();
    let mut y = x.to_vec();
    for mv in &mc.moves {
        y = match mv {
            Move::Flip(i) => shadow_flip(&cur, &y, *i).map_err(rep_err)?,
            Move::Reindex(tau) => tau.iter().map(|&t| y[t]).collect(),
        };
        cur = crate::surface_topology::apply_move(&cur, mv)?;
    }
    Ok(mc.iso.edge.iter().map(|&p| y[p]).collect())
}

pub fn shadow_residual(lambda: &IdealTriangulation, mc: &MappingClass, x: &[C64]) -> Res<f64> {
    let fx = shadow_action(lambda, mc, x)?;
    Ok(fx.iter().zip(x).map(|(a, b)| (a - b).norm() / b.norm()).fold(0.0, f64::max))
}

/// Shear coordinates away from 0, ∞ and −1.
fn admissible(x: &[C64]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite() && z.norm() > 1e-8 && z.norm() < 1e8 && (ONE + z).norm() > 1e-8)
}

fn project(x: &mut [C64]) {
    let p: C64 = x.iter().product();
    let s = principal_root(p, x.len()).inv();
    for v in x.iter_mut() {
        *v *= s;
    }
}

fn newton(lambda: &IdealTriangulation, mc: &MappingClass, mut x: Vec<C64>, tol: f64) -> Option<Vec<C64>> {
    let n = x.len();
    let g = |x: &[C64]| -> Option<Vec<C64>> {
        let fx = shadow_action(lambda, mc, x).ok()?;
        let mut out: Vec<C64> = fx.iter().zip(x).map(|(a, b)| a - b).collect();
        out.push(x.iter().product::<C64>() - ONE);
        Some(out)
    };
    for _ in 0..100 {
        if !admissible(&x) {
            return None;
        }
        let g0 = g(&x)?;
        let norm0 = g0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if shadow_residual(lambda, mc, &x).ok()? < tol && g0[n].norm() < tol {
            return Some(x);
        }
        let mut jac = CMat::zeros(n + 1, n);
        for k in 0..n {
            let h = 1e-7 * x[k].norm().max(1.0);
            let mut xp = x.clone();
            xp[k] += h;
            let gp = g(&xp)?;
            for r in 0..=n {
                jac[(r, k)] = (gp[r] - g0[r]) / h;
            }
        }
        let rhs = nalgebra::DVector::from_iterator(n + 1, g0.iter().map(|z| -z));
        let step = jac.svd(true, true).solve(&rhs, 1e-14).ok()?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand: Vec<C64> = x.iter().zip(step.iter()).map(|(a, d)| a + d * t).collect();
            if let Some(gc) = g(&cand) {
                let nc = gc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nc < norm0 {
                    x = cand;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// A shadow fixed by φ with Π x = 1: damped fixed-point iteration, then a
/// Gauss–Newton fallback from the iterate and from random real starts.
pub fn solve_fixed_shadow(lambda: &IdealTriangulation, mc: &MappingClass, opts: &PaOptions) -> Res<Vec<C64>> {
    let n = lambda.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_start = |rng: &mut ChaCha8Rng| {
        let mut x: Vec<C64> = (0..n)
            .map(|_| {
                let m: f64 = rng.gen_range(0.2..5.0);
                C64::new(if rng.gen_bool(0.5) { m } else { -m }, 0.0)
            })
            .collect();
        project(&mut x);
        x
    };
    let mut x = random_start(&mut rng);
    let start = x.clone();
    for _ in 0..opts.max_iter {
        let Ok(fx) = shadow_action(lambda, mc, &x) else { break };
        for (a, b) in x.iter_mut().zip(&fx) {
            *a = *a * (1.0 - opts.damping) + b * opts.damping;
        }
        project(&mut x);
        if !admissible(&x) {
            break;
        }
        if shadow_residual(lambda, mc, &x).map_or(false, |r| r < opts.tol) {
            return Ok(x);
        }
    }
    let x = if admissible(&x) { x } else { start };
    if let Some(sol) = newton(lambda, mc, x, opts.tol) {
        return Ok(sol);
    }
    for _ in 0..opts.restarts {
        let start = random_start(&mut rng);
        if let Some(sol) = newton(lambda, mc, start, opts.tol) {
            return Ok(sol);
        }
    }
    Err(IntertwinerError::ShadowSolverFailed)
}

/// Conjugation-invariant data of one orbit element M (dimension d).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub class: Vec<u32>,
    /// tr(M)^d / det(M) as [re, im].
    pub trace_power: [f64; 2],
    /// |tr M| / |det M|^{1/d}.
    pub trace_modulus: f64,
    /// Sorted eigenvalue moduli divided by |det M|^{1/d}.
    pub eigen_moduli: Vec<f64>,
    /// Per-factor sorted eigenvalue moduli of the partial traces, normalized
    /// the same way: invariant only under tensor-split conjugation.
    pub split_moduli: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct PaInvariant {
    pub order: usize,
    pub k: i64,
    pub shadow: Vec<C64>,
    pub shadow_residual: f64,
    pub h: C64,
    pub base: ProjectiveMap,
    pub orbit: Vec<(HomologyClass, ProjectiveMap)>,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PaSummary {
    #[serde(rename = "N")]
    pub order: usize,
    pub k: i64,
    pub shadow: Vec<[f64; 2]>,
    pub shadow_residual: f64,
    pub h: [f64; 2],
    pub orbit_size: usize,
    /// tr^d/det over the orbit, sorted by (re, im).
    pub sorted_trace_powers: Vec<[f64; 2]>,
    pub sorted_trace_moduli: Vec<f64>,
    pub certificates: Vec<Certificate>,
    pub base: super::ProjectiveMapJson,
}

impl PaInvariant {
    pub fn sorted_trace_moduli(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.certificates.iter().map(|c| c.trace_modulus).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn sorted_trace_powers(&self) -> Vec<[f64; 2]> {
        let mut v: Vec<[f64; 2]> = self.certificates.iter().map(|c| c.trace_power).collect();
        v.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        v
    }

    /// Multiset distance between the trace-power certificates of two runs,
    /// by greedy nearest matching (robust to near ties in any sort order).
    pub fn trace_distance(&self, other: &PaInvariant) -> f64 {
        let a: Vec<C64> = self.certificates.iter().map(|c| C64::new(c.trace_power[0], c.trace_power[1])).collect();
        let mut b: Vec<C64> = other.certificates.iter().map(|c| C64::new(c.trace_power[0], c.trace_power[1])).collect();
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for x in a {
            let (idx, d) = b
                .iter()
                .enumerate()
                .map(|(i, y)| (i, (x - y).norm() / x.norm().max(1.0)))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            worst = worst.max(d);
            b.swap_remove(idx);
        }
        worst
    }

    pub fn summary(&self) -> PaSummary {
        PaSummary {
            order: self.order,
            k: self.k,
            shadow: self.shadow.iter().map(|z| [z.re, z.im]).collect(),
            shadow_residual: self.shadow_residual,
            h: [self.h.re, self.h.im],
            orbit_size: self.orbit.len(),
            sorted_trace_powers: self.sorted_trace_powers(),
            sorted_trace_moduli: self.sorted_trace_moduli(),
            certificates: self.certificates.clone(),
            base: self.base.to_json(),
        }
    }
}

fn partial_trace(m: &CMat, factors: usize, n: usize, keep: usize) -> CMat {
    let d = m.nrows();
    let stride = n.pow((factors - 1 - keep) as u32);
    let mut out = CMat::zeros(n, n);
    for r in 0..d {
        for c in 0..d {
            // indices must agree off the kept factor
            let (ra, ca) = ((r / stride) % n, (c / stride) % n);
            if r - ra * stride == c - ca * stride {
                out[(ra, ca)] += m[(r, c)];
            }
        }
    }
    out
}

fn sorted_moduli(m: &CMat, scale: f64) -> Vec<f64> {
    let ev = m.clone().schur().eigenvalues().expect("complex Schur form");
    let mut v: Vec<f64> = ev.iter().map(|z| z.norm() / scale).collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn certificate(class: &HomologyClass, m: &CMat, factors: usize, n: usize) -> Certificate {
    let d = m.nrows();
    let det = m.determinant();
    let tr = m.trace();
    let root = det.norm().powf(1.0 / d as f64);
    let tp = (tr.ln() * d as f64 - det.ln()).exp();
    let split_moduli = (0..factors).map(|t| sorted_moduli(&partial_trace(m, factors, n, t), root)).collect();
    let mut split_moduli: Vec<Vec<f64>> = split_moduli;
    split_moduli.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    Certificate {
        class: class.coeffs.clone(),
        trace_power: if tr.norm() == 0.0 { [0.0, 0.0] } else { [tp.re, tp.im] },
        trace_modulus: tr.norm() / root,
        eigen_moduli: sorted_moduli(m, root),
        split_moduli,
    }
}

fn invert_iso(iso: &Iso) -> Iso {
    let mut tri = vec![(0, 0); iso.tri.len()];
    for (t, &(u, r)) in iso.tri.iter().enumerate() {
        tri[u] = (t, (3 - r) % 3);
    }
    Iso { tri, edge: invert_perm(&iso.edge) }
}

/// Run the four-step procedure. `shadow = None` invokes the fixed-point
/// solver; a supplied shadow must be fixed within `opts.tol.max(1e-9)`.
pub fn pa_invariant(
    lambda: &IdealTriangulation,
    mc: &MappingClass,
    order: usize,
    shadow: Option<&[C64]>,
    k: i64,
    opts: &PaOptions,
) -> Res<PaInvariant> {
    let x = match shadow {
        Some(x) => {
            if x.len() != lambda.n() {
                return Err(IntertwinerError::NotFixedShadow(f64::INFINITY));
            }
            let r = shadow_residual(lambda, mc, x)?;
            if r > opts.tol.max(1e-9) {
                return Err(IntertwinerError::NotFixedShadow(r));
            }
            x.to_vec()
        }
        None => solve_fixed_shadow(lambda, mc, opts)?,
    };
    let residual = shadow_residual(lambda, mc, &x)?;
    let prod: C64 = x.iter().product();
    let h = principal_root(prod, order) * q_pow(order, 2 * k);
    let tol = 1e-8;
    let zeta = from_invariants(lambda, order, &RepInvariants { x: x.clone(), h }, tol)?;
    let fin = apply_moves(lambda, &mc.moves)?;
    let mut xf = vec![ONE; fin.n()];
    for (e, &p) in mc.iso.edge.iter().enumerate() {
        xf[p] = x[e];
    }
    let zeta_fin = from_invariants(&fin, order, &RepInvariants { x: xf, h }, tol)?;
    let path = compose_path(&zeta, &mc.moves, Some(&zeta_fin), None)?;
    let r = identification_intertwiner(&zeta_fin, &zeta, &invert_iso(&mc.iso))?;
    let base = ProjectiveMap::new(path.base.matrix() * r);
    let classes = all_classes(lambda, order as u32);
    let m = lambda.m();
    let results: Vec<(HomologyClass, ProjectiveMap, Certificate)> = classes
        .par_iter()
        .map(|c| {
            let b = b_operator(c, lambda, order);
            let bi = inverse(&b.matrix).expect("B(c) is invertible");
            let el = ProjectiveMap::new(base.matrix() * bi);
            let cert = certificate(c, el.matrix(), m, order);
            (c.clone(), el, cert)
        })
        .collect();
    let mut orbit = Vec::with_capacity(results.len());
    let mut certificates = Vec::with_capacity(results.len());
    for (c, el, cert) in results {
        orbit.push((c, el));
        certificates.push(cert);
    }
    Ok(PaInvariant { order, k, shadow: x, shadow_residual: residual, h, base, orbit, certificates })
}

/// The once-punctured torus with the word [flip 0, flip 1, flip 2], whose
/// edge map is (0 2 1) on labels and which acts on shear coordinates with a
/// real fixed point.
pub fn torus_demo() -> (IdealTriangulation, MappingClass) {
    let lam = crate::surface_topology::examples::torus();
    let mc = MappingClass::from_moves_with_edges(&lam, vec![Move::Flip(0), Move::Flip(1), Move::Flip(2)], &[0, 2, 1]).expect("torus word");
    (lam, mc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_shadow_is_found_and_fixed() {
        let (lam, mc) = torus_demo();
        let x = solve_fixed_shadow(&lam, &mc, &PaOptions::default()).unwrap();
        assert!(shadow_residual(&lam, &mc, &x).unwrap() < 1e-10);
        let p: C64 = x.iter().product();
        assert!((p - ONE).norm() < 1e-10);
    }

    #[test]
    fn identity_class_gives_b_operators() {
        let lam = crate::surface_topology::examples::torus();
        let mc = MappingClass::identity(&lam);
        let x = vec![C64::new(2.0, 0.0), C64::new(0.25, 0.0), C64::new(2.0, 0.0)];
        let inv = pa_invariant(&lam, &mc, 2, Some(&x), 0, &PaOptions::default()).unwrap();
        assert_eq!(inv.orbit.len(), 4);
        assert!(inv.base.approx_eq(&ProjectiveMap::identity(4), 1e-9));
        for (c, l) in &inv.orbit {
            let b = b_operator(c, &lam, 2);
            let want = ProjectiveMap::new(inverse(&b.matrix).unwrap());
            assert!(l.approx_eq(&want, 1e-9));
        }
    }

    #[test]
    fn unfixed_shadow_is_rejected() {
        let (lam, mc) = torus_demo();
        let x = vec![C64::new(2.0, 0.0), C64::new(0.25, 0.0), C64::new(2.0, 0.0)];
        assert!(matches!(pa_invariant(&lam, &mc, 3, Some(&x), 0, &PaOptions::default()), Err(IntertwinerError::NotFixedShadow(_))));
    }

    #[test]
    fn partial_trace_of_product() {
        let b = CMat::from_fn(3, 3, |i, j| C64::new(if i == j { 2.0 } else { 0.5 }, 0.0));
        let a3 = CMat::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, (i as f64) - 1.0));
        let m = crate::linalg::kron(&a3, &b);
        let p0 = partial_trace(&m, 2, 3, 0);
        assert!(crate::linalg::rel_err(&p0, &(a3.clone() * b.trace())) < 1e-12);
        let p1 = partial_trace(&m, 2, 3, 1);
        assert!(crate::linalg::rel_err(&p1, &(b * a3.trace())) < 1e-12);
    }
}
