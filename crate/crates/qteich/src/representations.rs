//! Local representations of the Chekhov–Fock algebra.
//!
//! A triangle representation in standard form sends side generator `s`
//! (0-based, clockwise) to `y_s B_{s+1}`. A resolved local representation is
//! one such triangle representation per triangle; the representation of the
//! whole triangulation is their tensor product pulled back along the fusion
//! embedding, with triangle `t` as tensor factor `t` (factor 0 most
//! significant).

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intertwiners::solve::{intertwiner_space, NULL_TOL};
use crate::linalg::{identity, inverse, kron_all, principal_root, scalar_value, CMat, C64, ONE};
use crate::quantum_algebra::{
    evaluate, iota_embed, q_pow, q_root, AlgebraError, GeneratorImages, NCPolynomial, QContext,
};
use crate::surface_topology::{
    dual_graph, flip, split_to_triangles, square_labels, EdgeKind, HomologyClass, IdealTriangulation,
    TopologyError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("image of {0} is not a scalar matrix")]
    NotScalar(String),
    #[error("invariant relation h^N = x_1⋯x_n violated (relative error {0:.3e})")]
    InvariantMismatch(f64),
    #[error("representations are not locally equivalent: {0}")]
    NotLocallyEquivalent(String),
    #[error("degenerate invariant: x_{0} = −1")]
    DegenerateInvariant(usize),
    #[error("malformed representation data: {0}")]
    Malformed(String),
    #[error("generator image is singular")]
    Singular,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// B1 = diag(q^{2k}), B2 e_k = e_{k+1} (indices mod N), B3 = q (B1 B2)^{-1}.
#[derive(Clone, Debug)]
pub struct StandardMatrices {
    pub order: usize,
    pub q: C64,
    pub b: [CMat; 3],
    pub b_inv: [CMat; 3],
}

pub fn standard_matrices(n: usize) -> StandardMatrices {
    let q = q_root(n);
    let b1 = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| q_pow(n, 2 * k as i64)));
    let mut b2 = CMat::zeros(n, n);
    for k in 0..n {
        b2[((k + 1) % n, k)] = ONE;
    }
    let b1i = inverse(&b1).unwrap();
    let b2i = b2.transpose();
    let b3 = (&b2i * &b1i) * q;
    let b3i = (&b1 * &b2) / q;
    StandardMatrices { order: n, q, b: [b1, b2, b3], b_inv: [b1i, b2i, b3i] }
}

/// Roots (y_0, y_1, y_2) of a triangle representation in standard form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleRep {
    pub order: usize,
    pub y: [C64; 3],
}

impl TriangleRep {
    pub fn new(order: usize, y: [C64; 3]) -> Self {
        TriangleRep { order, y }
    }

    pub fn h(&self) -> C64 {
        self.y[0] * self.y[1] * self.y[2]
    }

    pub fn x(&self) -> [C64; 3] {
        self.y.map(|y| y.powu(self.order as u32))
    }

    pub fn matrices(&self, std: &StandardMatrices) -> [CMat; 3] {
        [0, 1, 2].map(|s| &std.b[s] * self.y[s])
    }
}

/// Generator → matrix assignment on a fixed algebra context.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    pub ctx: Arc<QContext>,
    images: Vec<CMat>,
    inverses: Vec<CMat>,
}

impl MatrixRep {
    pub fn new(ctx: Arc<QContext>, images: Vec<CMat>) -> Result<Self, RepError> {
        if images.len() != ctx.generators() {
            return Err(RepError::Malformed("one image per generator required".into()));
        }
        let inverses = images.iter().map(|m| inverse(m).ok_or(RepError::Singular)).collect::<Result<_, _>>()?;
        Ok(MatrixRep { ctx, images, inverses })
    }

    pub fn images(&self) -> &[CMat] {
        &self.images
    }

    pub fn order(&self) -> usize {
        self.ctx.order
    }

    /// Largest relative violation of ρ(X_i)ρ(X_j) = q^{2σ_ij} ρ(X_j)ρ(X_i).
    pub fn relation_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.images.len() {
            for j in 0..self.images.len() {
                let lhs = &self.images[i] * &self.images[j];
                let rhs = &self.images[j] * &self.images[i] * self.ctx.qpow(2 * self.ctx.sigma.get(i, j));
                worst = worst.max(crate::linalg::rel_err(&lhs, &rhs));
            }
        }
        worst
    }

    /// Dense complex export: per generator, a row-major list of [re, im].
    pub fn to_json(&self) -> serde_json::Value {
        let mats: Vec<serde_json::Value> = self.images.iter().map(matrix_json).collect();
        serde_json::json!({ "N": self.ctx.order, "dim": self.dim(), "images": mats })
    }
}

pub fn matrix_json(m: &CMat) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
    serde_json::json!(rows)
}

impl GeneratorImages for MatrixRep {
    fn generators(&self) -> usize {
        self.images.len()
    }
    fn dim(&self) -> usize {
        self.images.first().map_or(1, |m| m.nrows())
    }
    fn image(&self, g: usize) -> &CMat {
        &self.images[g]
    }
    fn image_inv(&self, g: usize) -> &CMat {
        &self.inverses[g]
    }
}

/// ρ(X_i) = y_i B_i on the one-triangle algebra.
pub fn triangle_rep(t: &TriangleRep) -> MatrixRep {
    let tri = crate::surface_topology::examples::triangle();
    let std = standard_matrices(t.order);
    MatrixRep::new(QContext::new(&tri, t.order), t.matrices(&std).to_vec()).expect("standard matrices are invertible")
}

/// A representative ρ_1 ⊗ ⋯ ⊗ ρ_m of a local representation.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalRepResolved {
    pub lambda: IdealTriangulation,
    pub order: usize,
    pub parts: Vec<TriangleRep>,
}

/// JSON form: `{"N": k, "parts": [[y0re, y0im, y1re, y1im, y2re, y2im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepJson {
    #[serde(rename = "N")]
    pub order: usize,
    pub parts: Vec<[f64; 6]>,
}

impl LocalRepResolved {
    pub fn new(lambda: IdealTriangulation, order: usize, parts: Vec<TriangleRep>) -> Result<Self, RepError> {
        if order == 0 {
            return Err(RepError::Malformed("N must be positive".into()));
        }
        if parts.len() != lambda.m() {
            return Err(RepError::Malformed(format!("{} parts for {} triangles", parts.len(), lambda.m())));
        }
        for p in &parts {
            if p.order != order {
                return Err(RepError::Malformed("parts disagree on N".into()));
            }
            if p.y.iter().any(|y| !(y.norm() > 0.0) || !y.re.is_finite() || !y.im.is_finite()) {
                return Err(RepError::Malformed("roots must be finite and nonzero".into()));
            }
        }
        Ok(LocalRepResolved { lambda, order, parts })
    }

    pub fn from_roots(lambda: IdealTriangulation, order: usize, roots: &[[C64; 3]]) -> Result<Self, RepError> {
        let parts = roots.iter().map(|y| TriangleRep::new(order, *y)).collect();
        Self::new(lambda, order, parts)
    }

    pub fn root(&self, t: usize, s: usize) -> C64 {
        self.parts[t].y[s]
    }

    pub fn set_root(&mut self, t: usize, s: usize, y: C64) {
        self.parts[t].y[s] = y;
    }

    pub fn dim(&self) -> usize {
        self.order.pow(self.lambda.m() as u32)
    }

    /// Random roots with moduli in [1/2, 2] and uniform phases.
    pub fn random<R: Rng>(lambda: &IdealTriangulation, order: usize, rng: &mut R) -> Self {
        let parts = (0..lambda.m())
            .map(|_| {
                TriangleRep::new(
                    order,
                    [0, 1, 2].map(|_| {
                        C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU))
                    }),
                )
            })
            .collect();
        LocalRepResolved { lambda: lambda.clone(), order, parts }
    }

    pub fn to_json(&self) -> RepJson {
        RepJson {
            order: self.order,
            parts: self.parts.iter().map(|p| [p.y[0].re, p.y[0].im, p.y[1].re, p.y[1].im, p.y[2].re, p.y[2].im]).collect(),
        }
    }

    pub fn from_json(lambda: IdealTriangulation, j: &RepJson) -> Result<Self, RepError> {
        let roots: Vec<[C64; 3]> =
            j.parts.iter().map(|p| [C64::new(p[0], p[1]), C64::new(p[2], p[3]), C64::new(p[4], p[5])]).collect();
        Self::from_roots(lambda, j.order, &roots)
    }

    /// Representation of the fully split surface: side (t, s) is generator
    /// 3t + s acting as y B_{s+1} on factor t.
    pub fn split_rep(&self) -> MatrixRep {
        let (mu, _) = split_to_triangles(&self.lambda);
        let std = standard_matrices(self.order);
        let m = self.lambda.m();
        let id = identity(self.order);
        let mut images = Vec::with_capacity(3 * m);
        for t in 0..m {
            let mats = self.parts[t].matrices(&std);
            for mat in mats {
                let factors: Vec<CMat> = (0..m).map(|u| if u == t { mat.clone() } else { id.clone() }).collect();
                images.push(kron_all(&factors));
            }
        }
        MatrixRep::new(QContext::new(&mu, self.order), images).expect("invertible")
    }
}

/// ρ = (ρ_1 ⊗ ⋯ ⊗ ρ_m) ∘ ι_λ.
pub fn local_rep_matrices(r: &LocalRepResolved) -> MatrixRep {
    let ctx = QContext::new(&r.lambda, r.order);
    let (_, fusion) = split_to_triangles(&r.lambda);
    let split = r.split_rep();
    let images = (0..r.lambda.n())
        .map(|g| {
            let p = iota_embed(&NCPolynomial::generator(&ctx, g), &fusion, &split.ctx).expect("fusion dims");
            evaluate(&p, &split).expect("context")
        })
        .collect();
    MatrixRep::new(ctx, images).expect("invertible")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepInvariants {
    pub x: Vec<C64>,
    pub h: C64,
}

impl RepInvariants {
    pub fn approx_eq(&self, o: &RepInvariants, tol: f64) -> bool {
        let close = |a: C64, b: C64| (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300);
        self.x.len() == o.x.len() && self.x.iter().zip(&o.x).all(|(a, b)| close(*a, *b)) && close(self.h, o.h)
    }
}

/// The central element H = X̲^{(1, …, 1)}.
pub fn central_h(ctx: &Arc<QContext>) -> NCPolynomial {
    NCPolynomial::weyl_term(ctx, &vec![1; ctx.generators()], crate::quantum_algebra::QScalar::one())
}

/// Read x_i from ρ(X_i^N) and h from ρ(H), checking scalarity and
/// h^N = x_1 ⋯ x_n.
pub fn invariants(rep: &MatrixRep, tol: f64) -> Result<RepInvariants, RepError> {
    let n = rep.order();
    let mut x = Vec::with_capacity(rep.generators());
    for g in 0..rep.generators() {
        let mut p = identity(rep.dim());
        for _ in 0..n {
            p = &p * rep.image(g);
        }
        x.push(scalar_value(&p, tol).ok_or_else(|| RepError::NotScalar(format!("X_{g}^N")))?);
    }
    let hm = evaluate(&central_h(&rep.ctx), rep)?;
    let h = scalar_value(&hm, tol).ok_or_else(|| RepError::NotScalar("H".into()))?;
    let lhs = h.powu(n as u32);
    let rhs: C64 = x.iter().product();
    let err = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    if err > tol {
        return Err(RepError::InvariantMismatch(err));
    }
    Ok(RepInvariants { x, h })
}

/// Invariants computed directly from the roots (x_e is the product of the
/// N-th powers of the roots on the sides of e; h the product of all roots).
pub fn invariants_from_roots(r: &LocalRepResolved) -> RepInvariants {
    let lam = &r.lambda;
    let x = (0..lam.n())
        .map(|e| lam.occurrences(e).iter().map(|&(t, s)| r.root(t, s).powu(r.order as u32)).product())
        .collect();
    let h = r.parts.iter().map(|p| p.h()).product();
    RepInvariants { x, h }
}

/// The non-quantum shadow: the x-vector of invariants.
pub fn nonquantum_shadow(rep: &MatrixRep, tol: f64) -> Result<Vec<C64>, RepError> {
    Ok(invariants(rep, tol)?.x)
}

/// Per-edge constants α_e with b = α·a on the left side of e and
/// b = α⁻¹·a on the right side; boundary edges get α = 1 and must agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionConstants {
    pub alpha: Vec<C64>,
}

impl TransitionConstants {
    pub fn compose(&self, other: &TransitionConstants) -> TransitionConstants {
        TransitionConstants { alpha: self.alpha.iter().zip(&other.alpha).map(|(a, b)| a * b).collect() }
    }
    pub fn inverse(&self) -> TransitionConstants {
        TransitionConstants { alpha: self.alpha.iter().map(|a| a.inv()).collect() }
    }
}

fn left_right(lambda: &IdealTriangulation, e: usize) -> ((usize, usize), (usize, usize)) {
    let occ = lambda.occurrences(e);
    if lambda.side(occ[0].0, occ[0].1).flip {
        (occ[1], occ[0])
    } else {
        (occ[0], occ[1])
    }
}

pub fn transition_constants(a: &LocalRepResolved, b: &LocalRepResolved, tol: f64) -> Result<TransitionConstants, RepError> {
    if a.lambda != b.lambda || a.order != b.order {
        return Err(RepError::NotLocallyEquivalent("different triangulations or N".into()));
    }
    let lam = &a.lambda;
    let close = |x: C64, y: C64| (x - y).norm() <= tol * x.norm().max(y.norm());
    let mut alpha = vec![ONE; lam.n()];
    for e in 0..lam.n() {
        match lam.edge_kind(e) {
            EdgeKind::Boundary => {
                let (t, s) = lam.occurrences(e)[0];
                if !close(a.root(t, s), b.root(t, s)) {
                    return Err(RepError::NotLocallyEquivalent(format!("boundary edge {e} differs")));
                }
            }
            _ => {
                let (l, r) = left_right(lam, e);
                let al = b.root(l.0, l.1) / a.root(l.0, l.1);
                if !close(b.root(r.0, r.1), a.root(r.0, r.1) / al) {
                    return Err(RepError::NotLocallyEquivalent(format!("edge {e} scales inconsistently")));
                }
                alpha[e] = al;
            }
        }
    }
    // every triangle must then coincide
    Ok(TransitionConstants { alpha })
}

/// c · r: the root of each side of e is multiplied by q^{2 c_e} on the left
/// and q^{-2 c_e} on the right.
pub fn homology_act(c: &HomologyClass, r: &LocalRepResolved) -> LocalRepResolved {
    let mut out = r.clone();
    let lam = &r.lambda;
    for e in 0..lam.n() {
        if c.coeffs[e] == 0 || lam.edge_kind(e) == EdgeKind::Boundary {
            continue;
        }
        for &(t, s) in lam.occurrences(e) {
            let k = 2 * c.coeffs[e] as i64 * lam.side(t, s).sign();
            out.parts[t].y[s] *= q_pow(r.order, k);
        }
    }
    out
}

/// M_i with M_i ρ(X_{i+1}) M_i^{-1} = q² ρ(X_{i+1}) and
/// M_i ρ(X_{i+2}) M_i^{-1} = q^{-2} ρ(X_{i+2}). For a standard-form
/// triangle these are the B_i themselves.
pub fn elementary_automorphisms(t: &TriangleRep) -> [CMat; 3] {
    standard_matrices(t.order).b
}

/// Side-root exponents (k_0, k_1, k_2), Σ k_s ≡ 0, realized by conjugation
/// with B1^{k_1} B2^{-k_0}.
pub fn shift_operator(order: usize, k: [i64; 3]) -> CMat {
    let std = standard_matrices(order);
    let p1 = crate::linalg::mat_pow(&std.b[0], &std.b_inv[0], k[1].rem_euclid(order as i64));
    let p2 = crate::linalg::mat_pow(&std.b[1], &std.b_inv[1], (-k[0]).rem_euclid(order as i64));
    p1 * p2
}

/// Tensor product of per-triangle intertwiners L_t with
/// ρ_{a,t}(X) = L_t ρ_{b,t}(X) L_t^{-1}, when every triangle pair is
/// isomorphic; `None` otherwise.
pub fn rep_iso_witness(a: &LocalRepResolved, b: &LocalRepResolved, tol: f64) -> Option<CMat> {
    if a.lambda != b.lambda || a.order != b.order {
        return None;
    }
    let std = standard_matrices(a.order);
    let mut factors = Vec::with_capacity(a.parts.len());
    for (pa, pb) in a.parts.iter().zip(&b.parts) {
        let close = |x: C64, y: C64| (x - y).norm() <= tol * x.norm().max(y.norm());
        if !close(pa.h(), pb.h()) || !(0..3).all(|s| close(pa.x()[s], pb.x()[s])) {
            return None;
        }
        let sp = intertwiner_space(&pa.matrices(&std), &pb.matrices(&std), NULL_TOL);
        if sp.dim() != 1 {
            return None;
        }
        factors.push(sp.basis[0].clone());
    }
    Some(kron_all(&factors))
}

/// Dimension of {A : A ρ(X_g) = ρ(X_g) A for all g}.
pub fn commutant_dimension(rep: &MatrixRep) -> usize {
    intertwiner_space(rep.images(), rep.images(), NULL_TOL).dim()
}

/// Classical coordinate change at q = 1 for the flip of edge i: x'_i = 1/x_i
/// and each side role of the square contributes (1 + x_i) (roles j, l) or
/// (1 + x_i^{-1})^{-1} (roles k, m).
pub fn shadow_flip(lambda: &IdealTriangulation, x: &[C64], i: usize) -> Result<Vec<C64>, RepError> {
    if lambda.edge_kind(i) == EdgeKind::SelfFolded {
        return Ok(x.to_vec());
    }
    let sq = square_labels(lambda, i)?;
    let xi = x[i];
    if (ONE + xi).norm() < 1e-12 {
        return Err(RepError::DegenerateInvariant(i));
    }
    let mut out = x.to_vec();
    out[i] = xi.inv();
    for g in [sq.j, sq.l] {
        out[g] *= ONE + xi;
    }
    for g in [sq.k, sq.m] {
        out[g] /= ONE + xi.inv();
    }
    Ok(out)
}

/// Roots for the flipped triangulation with the classically transported
/// invariants and the same central load. The square's new triangles get
/// (v_j, v_k, v_i') and (v_m, 1, v_l); all other triangles are unchanged.
pub fn transport_flip(r: &LocalRepResolved, i: usize) -> Result<LocalRepResolved, RepError> {
    let lam = &r.lambda;
    if lam.edge_kind(i) == EdgeKind::SelfFolded {
        return Ok(r.clone());
    }
    let sq = square_labels(lam, i)?;
    let n = r.order;
    let np = n as u32;
    let side = |t: usize, s: usize| r.root(t, s);
    let xi = (side(sq.t1, sq.s1) * side(sq.t2, sq.s2)).powu(np);
    if (ONE + xi).norm() < 1e-12 {
        return Err(RepError::DegenerateInvariant(i));
    }
    let up = ONE + xi;
    let down = (ONE + xi.inv()).inv();
    let yj = side(sq.t1, (sq.s1 + 2) % 3);
    let ym = side(sq.t1, (sq.s1 + 1) % 3);
    let yk = side(sq.t2, (sq.s2 + 1) % 3);
    let yl = side(sq.t2, (sq.s2 + 2) % 3);
    let vj = principal_root(up * yj.powu(np), n);
    let vk = principal_root(down * yk.powu(np), n);
    let vl = principal_root(up * yl.powu(np), n);
    let vm = principal_root(down * ym.powu(np), n);
    let total = r.parts[sq.t1].h() * r.parts[sq.t2].h();
    let vi = total / (vj * vk * vl * vm);
    let lam2 = flip(lam, i)?;
    let mut parts = r.parts.clone();
    parts[sq.t1] = TriangleRep::new(n, [vj, vk, vi]);
    parts[sq.t2] = TriangleRep::new(n, [vm, ONE, vl]);
    LocalRepResolved::new(lam2, n, parts)
}

/// A representative with prescribed invariants: the first side of each edge
/// carries the principal N-th root, the second side 1, and the first side of
/// edge 0 absorbs the root of unity needed to reach h.
pub fn from_invariants(lambda: &IdealTriangulation, order: usize, inv: &RepInvariants, tol: f64) -> Result<LocalRepResolved, RepError> {
    if inv.x.len() != lambda.n() {
        return Err(RepError::Malformed("x has the wrong length".into()));
    }
    let prod: C64 = inv.x.iter().product();
    let err = (inv.h.powu(order as u32) - prod).norm() / prod.norm();
    if err > tol {
        return Err(RepError::InvariantMismatch(err));
    }
    let mut parts = vec![TriangleRep::new(order, [ONE; 3]); lambda.m()];
    for e in 0..lambda.n() {
        let (t, s) = lambda.occurrences(e)[0];
        parts[t].y[s] = principal_root(inv.x[e], order);
    }
    let h0: C64 = parts.iter().map(|p| p.h()).product();
    let zeta = inv.h / h0;
    let (t, s) = lambda.occurrences(0)[0];
    parts[t].y[s] *= zeta;
    LocalRepResolved::new(lambda.clone(), order, parts)
}

/// Quick check that a set of cycles generates distinct representatives.
pub fn orbit_size(r: &LocalRepResolved, classes: &[HomologyClass], tol: f64) -> usize {
    let mut reps: Vec<LocalRepResolved> = Vec::new();
    for c in classes {
        let x = homology_act(c, r);
        let dup = reps.iter().any(|y| {
            y.parts.iter().zip(&x.parts).all(|(p, q)| (0..3).all(|s| (p.y[s] - q.y[s]).norm() <= tol * p.y[s].norm()))
        });
        if !dup {
            reps.push(x);
        }
    }
    reps.len()
}

/// Betti number of the dual graph.
pub fn betti1(lambda: &IdealTriangulation) -> usize {
    dual_graph(lambda).betti1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_err;
    use crate::surface_topology::{all_classes, examples::*};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_matrix_identities() {
        for n in 1..6 {
            let s = standard_matrices(n);
            let [b1, b2, b3] = &s.b;
            let id = identity(n);
            assert!(rel_err(&id, &(b1 * b2 * b3 / s.q)) < 1e-12);
            assert!(rel_err(&(b1 * b2), &(b2 * b1 * s.q * s.q)) < 1e-12);
            assert!(rel_err(&(b2 * b3), &(b3 * b2 * s.q * s.q)) < 1e-12);
            assert!(rel_err(&(b3 * b1), &(b1 * b3 * s.q * s.q)) < 1e-12);
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            for b in &s.b {
                assert!((b.determinant() - C64::new(sign, 0.0)).norm() < 1e-10);
                let p = crate::linalg::mat_pow(b, b, n as i64);
                assert!(rel_err(&id, &p) < 1e-10);
            }
        }
    }

    #[test]
    fn triangle_rep_invariants() {
        let t = TriangleRep::new(5, [C64::new(1.2, 0.3), C64::new(-0.4, 0.9), C64::new(0.7, -0.2)]);
        let rep = triangle_rep(&t);
        assert!(rep.relation_error() < 1e-10);
        let inv = invariants(&rep, 1e-9).unwrap();
        assert!((inv.h - t.h()).norm() < 1e-10);
        for s in 0..3 {
            assert!((inv.x[s] - t.x()[s]).norm() < 1e-9);
        }
    }

    #[test]
    fn square_diagonal_image() {
        let lam = square();
        let r = LocalRepResolved::from_roots(lam, 3, &[[ONE; 3], [ONE; 3]]).unwrap();
        let rep = local_rep_matrices(&r);
        let s = standard_matrices(3);
        assert!(rel_err(&s.b[1].kronecker(&s.b[0]), rep.image(0)) < 1e-12);
        assert!(rel_err(&s.b[0].kronecker(&identity(3)), rep.image(1)) < 1e-12);
        assert!(rel_err(&identity(3).kronecker(&s.b[2]), rep.image(3)) < 1e-12);
    }

    #[test]
    fn local_invariants_match_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for lam in [square(), torus(), pentagon(), IdealTriangulation::from_edges(&[[0, 1, 1]]).unwrap()] {
            for n in [1, 2, 3] {
                let r = LocalRepResolved::random(&lam, n, &mut rng);
                let rep = local_rep_matrices(&r);
                assert!(rep.relation_error() < 1e-9);
                let a = invariants(&rep, 1e-9).unwrap();
                let b = invariants_from_roots(&r);
                assert!(a.approx_eq(&b, 1e-8), "{lam} N={n}");
            }
        }
    }

    #[test]
    fn corrupted_rep_is_not_scalar() {
        let r = LocalRepResolved::random(&square(), 3, &mut ChaCha8Rng::seed_from_u64(1));
        let rep = local_rep_matrices(&r);
        let mut imgs = rep.images().to_vec();
        imgs[0][(0, 1)] += C64::new(0.5, 0.0);
        let bad = MatrixRep::new(rep.ctx.clone(), imgs).unwrap();
        assert!(matches!(invariants(&bad, 1e-9), Err(RepError::NotScalar(_))));
    }

    #[test]
    fn transition_constants_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lam = torus();
        let a = LocalRepResolved::random(&lam, 3, &mut rng);
        assert!(transition_constants(&a, &a, 1e-12).unwrap().alpha.iter().all(|x| (x - ONE).norm() < 1e-12));
        let mut b = a.clone();
        let (l, r) = left_right(&lam, 1);
        b.parts[l.0].y[l.1] *= 2.0;
        b.parts[r.0].y[r.1] /= 2.0;
        let tc = transition_constants(&a, &b, 1e-12).unwrap();
        assert!((tc.alpha[1] - C64::new(2.0, 0.0)).norm() < 1e-12);
        let mut c = b.clone();
        let (l, r) = left_right(&lam, 2);
        c.parts[l.0].y[l.1] *= C64::new(0.0, 3.0);
        c.parts[r.0].y[r.1] /= C64::new(0.0, 3.0);
        let ac = transition_constants(&a, &c, 1e-12).unwrap();
        let bc = transition_constants(&b, &c, 1e-12).unwrap();
        let comp = tc.compose(&bc);
        assert!(comp.alpha.iter().zip(&ac.alpha).all(|(x, y)| (x - y).norm() < 1e-10));
        let inv = transition_constants(&c, &a, 1e-12).unwrap();
        assert!(inv.alpha.iter().zip(&ac.inverse().alpha).all(|(x, y)| (x - y).norm() < 1e-10));
    }

    #[test]
    fn homology_action_is_free_and_preserves_invariants() {
        let lam = torus();
        let r = LocalRepResolved::random(&lam, 3, &mut ChaCha8Rng::seed_from_u64(2));
        let classes = all_classes(&lam, 3);
        assert_eq!(orbit_size(&r, &classes, 1e-9), 9);
        let base = invariants_from_roots(&r);
        for c in &classes {
            let cr = homology_act(c, &r);
            assert!(invariants_from_roots(&cr).approx_eq(&base, 1e-9));
            let m1 = local_rep_matrices(&cr);
            let m0 = local_rep_matrices(&r);
            for g in 0..3 {
                assert!(rel_err(m0.image(g), m1.image(g)) < 1e-9);
            }
        }
    }

    #[test]
    fn elementary_automorphism_effects() {
        let n = 3;
        let t = TriangleRep::new(n, [C64::new(1.1, 0.2), C64::new(0.3, 0.8), C64::new(-0.9, 0.4)]);
        let std = standard_matrices(n);
        let m = elementary_automorphisms(&t);
        let x = t.matrices(&std);
        let q2 = std.q * std.q;
        for i in 0..3 {
            let mi = &m[i];
            let mi_inv = &std.b_inv[i];
            assert!(rel_err(&x[i], &(mi * &x[i] * mi_inv)) < 1e-12);
            assert!(rel_err(&(&x[(i + 1) % 3] * q2), &(mi * &x[(i + 1) % 3] * mi_inv)) < 1e-12);
            assert!(rel_err(&(&x[(i + 2) % 3] / q2), &(mi * &x[(i + 2) % 3] * mi_inv)) < 1e-12);
        }
        // composite words realize every admissible shift
        for k0 in 0..3i64 {
            for k1 in 0..3i64 {
                let k = [k0, k1, -k0 - k1];
                let d = shift_operator(n, k);
                let di = inverse(&d).unwrap();
                for s in 0..3 {
                    let expect = &x[s] * q_pow(n, 2 * k[s]);
                    assert!(rel_err(&expect, &(&d * &x[s] * &di)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn iso_witness_and_classification() {
        let lam = square();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = LocalRepResolved::random(&lam, 3, &mut rng);
        let w = rep_iso_witness(&a, &a, 1e-9).unwrap();
        let s = w[(0, 0)];
        assert!(rel_err(&(identity(9) * s), &w) < 1e-9);
        let mut b = a.clone();
        b.parts[0].y[0] *= q_pow(3, 2);
        b.parts[0].y[1] *= q_pow(3, -2);
        let w = rep_iso_witness(&a, &b, 1e-9).unwrap();
        let (sa, sb) = (a.split_rep(), b.split_rep());
        let wi = inverse(&w).unwrap();
        for g in 0..6 {
            assert!(rel_err(sa.image(g), &(&w * sb.image(g) * &wi)) < 1e-9);
        }
        let mut c = a.clone();
        c.parts[1].y[2] *= 1.5;
        assert!(rep_iso_witness(&a, &c, 1e-9).is_none());
    }

    #[test]
    fn polygon_irreducible_torus_reducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in 3..6 {
            let r = LocalRepResolved::random(&polygon(p), 2, &mut rng);
            assert_eq!(commutant_dimension(&local_rep_matrices(&r)), 1);
        }
        let r = LocalRepResolved::random(&torus(), 3, &mut rng);
        assert!(commutant_dimension(&local_rep_matrices(&r)) > 1);
    }

    #[test]
    fn flip_transport_matches_shadow() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for lam in [square(), torus(), pentagon()] {
            let r = LocalRepResolved::random(&lam, 3, &mut rng);
            let i = lam.internal_edges()[0];
            let r2 = transport_flip(&r, i).unwrap();
            let x = invariants_from_roots(&r);
            let x2 = invariants_from_roots(&r2);
            let expect = shadow_flip(&lam, &x.x, i).unwrap();
            assert!(x2.approx_eq(&RepInvariants { x: expect, h: x.h }, 1e-9), "{lam}");
        }
    }

    #[test]
    fn from_invariants_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lam = torus();
        let r = LocalRepResolved::random(&lam, 3, &mut rng);
        let inv = invariants_from_roots(&r);
        let s = from_invariants(&lam, 3, &inv, 1e-9).unwrap();
        assert!(invariants_from_roots(&s).approx_eq(&inv, 1e-9));
    }
}
