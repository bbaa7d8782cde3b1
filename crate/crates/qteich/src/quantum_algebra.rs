//! The Chekhov–Fock algebra of a triangulation: q-commuting monomials, Weyl
//! ordering, fusion embeddings and the coordinate changes Φ on generators.
//!
//! A monomial `X^α` is the ordered product `X_1^{α_1} ⋯ X_n^{α_n}`; the Weyl
//! ordered `X̲^α` carries the prefactor `q^{-Σ_{i<j} α_i α_j σ_ij}` and
//! satisfies `X̲^α X̲^β = q^{σ(α,β)} X̲^{α+β}`. Polynomials store Weyl
//! coefficients.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{condition_number, identity, inverse, CMat, C64, ONE, ZERO};
use crate::surface_topology::{
    flip, invert_perm, isomorphisms, reindex, sigma_form, square_labels, EdgeKind, FusionMap,
    IdealTriangulation, Move, SigmaMatrix, TopologyError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("operands live in different algebra contexts")]
    ContextMismatch,
    #[error("denominator image is singular (condition number {0:.3e})")]
    SingularDenominator(f64),
    #[error("triangulations are not one elementary move apart")]
    NotElementary,
    #[error("edge {0} is self-folded; its flip is the identity and has no coordinate change")]
    SelfFoldedFlip(usize),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// The q used throughout: exp(iπ(N+1)/N), a primitive N-th root of
/// (−1)^{N+1} whose square has order N.
pub fn q_root(n: usize) -> C64 {
    assert!(n >= 1, "N must be positive");
    C64::from_polar(1.0, PI * (n as f64 + 1.0) / n as f64)
}

/// q^k computed from the reduced exponent so that equal exponents give
/// bitwise equal values.
pub fn q_pow(n: usize, k: i64) -> C64 {
    let period = 2 * n as i64;
    let k = k.rem_euclid(period);
    C64::from_polar(1.0, PI * (n as f64 + 1.0) * k as f64 / n as f64)
}

/// Fixed data of a Chekhov–Fock algebra: generator count, σ and N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    pub order: usize,
    pub sigma: SigmaMatrix,
}

impl QContext {
    pub fn new(lambda: &IdealTriangulation, order: usize) -> Arc<Self> {
        Arc::new(QContext { order, sigma: sigma_form(lambda) })
    }

    pub fn from_sigma(sigma: SigmaMatrix, order: usize) -> Arc<Self> {
        Arc::new(QContext { order, sigma })
    }

    pub fn generators(&self) -> usize {
        self.sigma.n()
    }

    pub fn q(&self) -> C64 {
        q_root(self.order)
    }

    pub fn qpow(&self, k: i64) -> C64 {
        q_pow(self.order, k)
    }

    /// σ(α, β).
    pub fn pair(&self, a: &[i64], b: &[i64]) -> i64 {
        self.sigma.pair(a, b)
    }

    /// Σ_{i<j} α_i α_j σ_ij.
    pub fn weyl_exponent(&self, a: &[i64]) -> i64 {
        let mut acc = 0;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            for j in i + 1..a.len() {
                acc += a[i] * a[j] * self.sigma.get(i, j);
            }
        }
        acc
    }

    fn same(a: &Arc<QContext>, b: &Arc<QContext>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

/// coefficient · q^{q_exponent}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QScalar {
    pub coeff: C64,
    pub qexp: i64,
}

impl QScalar {
    pub fn new(coeff: C64, qexp: i64) -> Self {
        QScalar { coeff, qexp }
    }
    pub fn one() -> Self {
        QScalar { coeff: ONE, qexp: 0 }
    }
    pub fn qpow(k: i64) -> Self {
        QScalar { coeff: ONE, qexp: k }
    }
    pub fn value(&self, order: usize) -> C64 {
        self.coeff * q_pow(order, self.qexp)
    }
    pub fn mul(&self, o: &QScalar) -> QScalar {
        QScalar { coeff: self.coeff * o.coeff, qexp: self.qexp + o.qexp }
    }
    fn reduce(self, order: usize) -> QScalar {
        QScalar { coeff: self.coeff, qexp: self.qexp.rem_euclid(2 * order as i64) }
    }
}

/// scalar · X^α with factors in index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NCMonomial {
    pub scalar: QScalar,
    pub alpha: Vec<i64>,
}

impl NCMonomial {
    pub fn generator(n: usize, i: usize) -> Self {
        let mut alpha = vec![0; n];
        alpha[i] = 1;
        NCMonomial { scalar: QScalar::one(), alpha }
    }
}

/// X^α · X^β = q^{2 Σ_{i>j} α_i β_j σ_ij} X^{α+β}.
pub fn mono_mul(ctx: &QContext, a: &NCMonomial, b: &NCMonomial) -> Result<NCMonomial, AlgebraError> {
    let n = ctx.generators();
    if a.alpha.len() != n || b.alpha.len() != n {
        return Err(AlgebraError::ContextMismatch);
    }
    let mut e = 0;
    for i in 0..n {
        if a.alpha[i] == 0 {
            continue;
        }
        for j in 0..i {
            e += a.alpha[i] * b.alpha[j] * ctx.sigma.get(i, j);
        }
    }
    let scalar = a.scalar.mul(&b.scalar).mul(&QScalar::qpow(2 * e)).reduce(ctx.order);
    let alpha = a.alpha.iter().zip(&b.alpha).map(|(x, y)| x + y).collect();
    Ok(NCMonomial { scalar, alpha })
}

/// The Weyl-ordered monomial X̲^α as a scalar multiple of X^α.
pub fn weyl(ctx: &QContext, alpha: &[i64]) -> Result<NCMonomial, AlgebraError> {
    if alpha.len() != ctx.generators() {
        return Err(AlgebraError::ContextMismatch);
    }
    Ok(NCMonomial {
        scalar: QScalar::qpow(-ctx.weyl_exponent(alpha)).reduce(ctx.order),
        alpha: alpha.to_vec(),
    })
}

/// Σ_α c_α X̲^α.
#[derive(Clone, Debug)]
pub struct NCPolynomial {
    ctx: Arc<QContext>,
    terms: BTreeMap<Vec<i64>, QScalar>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub alpha: Vec<i64>,
    pub coeff: [f64; 2],
    pub qexp: i64,
}

impl NCPolynomial {
    pub fn zero(ctx: &Arc<QContext>) -> Self {
        NCPolynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<QContext>, c: QScalar) -> Self {
        Self::weyl_term(ctx, &vec![0; ctx.generators()], c)
    }

    pub fn one(ctx: &Arc<QContext>) -> Self {
        Self::constant(ctx, QScalar::one())
    }

    /// c · X̲^α.
    pub fn weyl_term(ctx: &Arc<QContext>, alpha: &[i64], c: QScalar) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(alpha.to_vec(), c);
        p
    }

    pub fn generator(ctx: &Arc<QContext>, i: usize) -> Self {
        let mut a = vec![0; ctx.generators()];
        a[i] = 1;
        Self::weyl_term(ctx, &a, QScalar::one())
    }

    /// X_i^{-1}.
    pub fn generator_inv(ctx: &Arc<QContext>, i: usize) -> Self {
        let mut a = vec![0; ctx.generators()];
        a[i] = -1;
        Self::weyl_term(ctx, &a, QScalar::one())
    }

    pub fn from_monomial(ctx: &Arc<QContext>, m: &NCMonomial) -> Result<Self, AlgebraError> {
        if m.alpha.len() != ctx.generators() {
            return Err(AlgebraError::ContextMismatch);
        }
        // X^α = q^{Σ_{i<j} α_i α_j σ_ij} X̲^α
        let s = m.scalar.mul(&QScalar::qpow(ctx.weyl_exponent(&m.alpha)));
        Ok(Self::weyl_term(ctx, &m.alpha, s))
    }

    pub fn context(&self) -> &Arc<QContext> {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &QScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, alpha: Vec<i64>, c: QScalar) {
        let order = self.ctx.order;
        let c = c.reduce(order);
        match self.terms.get_mut(&alpha) {
            None => {
                self.terms.insert(alpha, c);
            }
            Some(prev) => {
                *prev = if prev.qexp == c.qexp {
                    QScalar::new(prev.coeff + c.coeff, prev.qexp)
                } else {
                    QScalar::new(prev.value(order) + c.value(order), 0)
                };
                if prev.coeff.norm() == 0.0 {
                    self.terms.remove(&alpha);
                }
            }
        }
    }

    pub fn add(&self, other: &NCPolynomial) -> Result<NCPolynomial, AlgebraError> {
        if !QContext::same(&self.ctx, &other.ctx) {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), *c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: QScalar) -> NCPolynomial {
        let mut out = NCPolynomial::zero(&self.ctx);
        for (a, s) in &self.terms {
            out.add_term(a.clone(), s.mul(&c));
        }
        out
    }

    pub fn mul(&self, other: &NCPolynomial) -> Result<NCPolynomial, AlgebraError> {
        if !QContext::same(&self.ctx, &other.ctx) {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = NCPolynomial::zero(&self.ctx);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = self.ctx.pair(a, b);
                let ab: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(ab, ca.mul(cb).mul(&QScalar::qpow(e)));
            }
        }
        Ok(out)
    }

    /// Numerical equality of coefficients.
    pub fn approx_eq(&self, other: &NCPolynomial, tol: f64) -> bool {
        let order = self.ctx.order;
        let mut keys: Vec<&Vec<i64>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.iter().all(|k| {
            let a = self.terms.get(*k).map_or(ZERO, |c| c.value(order));
            let b = other.terms.get(*k).map_or(ZERO, |c| c.value(order));
            (a - b).norm() <= tol * (1.0 + a.norm())
        })
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(a, c)| TermJson { alpha: a.clone(), coeff: [c.coeff.re, c.coeff.im], qexp: c.qexp })
            .collect()
    }

    pub fn from_json(ctx: &Arc<QContext>, terms: &[TermJson]) -> Result<Self, AlgebraError> {
        let mut p = NCPolynomial::zero(ctx);
        for t in terms {
            if t.alpha.len() != ctx.generators() {
                return Err(AlgebraError::ContextMismatch);
            }
            p.add_term(t.alpha.clone(), QScalar::new(C64::new(t.coeff[0], t.coeff[1]), t.qexp));
        }
        Ok(p)
    }
}

/// ι: X̲^α ↦ Y̲^{j(α)} from the algebra of λ into the algebra of the split
/// surface μ.
pub fn iota_embed(p: &NCPolynomial, f: &FusionMap, target: &Arc<QContext>) -> Result<NCPolynomial, AlgebraError> {
    if f.cols() != p.ctx.generators() || f.rows() != target.generators() {
        return Err(AlgebraError::ContextMismatch);
    }
    let mut out = NCPolynomial::zero(target);
    for (a, c) in &p.terms {
        out.add_term(f.apply(a), *c);
    }
    Ok(out)
}

/// Anything that assigns invertible matrices to generators.
pub trait GeneratorImages {
    fn generators(&self) -> usize;
    fn dim(&self) -> usize;
    fn image(&self, g: usize) -> &CMat;
    fn image_inv(&self, g: usize) -> &CMat;
}

const DENOMINATOR_CONDITION_LIMIT: f64 = 1e12;

/// scalar · Π_i ρ(X_i)^{α_i} in index order.
pub fn evaluate_monomial<R: GeneratorImages + ?Sized>(m: &NCMonomial, order: usize, rep: &R) -> Result<CMat, AlgebraError> {
    if m.alpha.len() != rep.generators() {
        return Err(AlgebraError::ContextMismatch);
    }
    let mut out = identity(rep.dim()) * m.scalar.value(order);
    for (g, &e) in m.alpha.iter().enumerate() {
        let base = if e >= 0 { rep.image(g) } else { rep.image_inv(g) };
        for _ in 0..e.unsigned_abs() {
            out = &out * base;
        }
    }
    Ok(out)
}

pub fn evaluate<R: GeneratorImages + ?Sized>(p: &NCPolynomial, rep: &R) -> Result<CMat, AlgebraError> {
    if p.ctx.generators() != rep.generators() {
        return Err(AlgebraError::ContextMismatch);
    }
    let mut out = CMat::zeros(rep.dim(), rep.dim());
    for (a, c) in &p.terms {
        let w = weyl(&p.ctx, a)?;
        let m = NCMonomial { scalar: w.scalar.mul(c), alpha: w.alpha };
        out += evaluate_monomial(&m, p.ctx.order, rep)?;
    }
    Ok(out)
}

/// Ordered product of polynomial factors, each possibly inverted. The
/// quotient P·Q⁻¹ is the two-factor case.
#[derive(Clone, Debug)]
pub struct RationalExpr {
    pub factors: Vec<(NCPolynomial, bool)>,
}

impl RationalExpr {
    pub fn poly(p: NCPolynomial) -> Self {
        RationalExpr { factors: vec![(p, false)] }
    }

    pub fn quotient(p: NCPolynomial, q: NCPolynomial) -> Self {
        RationalExpr { factors: vec![(p, false), (q, true)] }
    }

    pub fn then(mut self, p: NCPolynomial, inverted: bool) -> Self {
        self.factors.push((p, inverted));
        self
    }

    pub fn evaluate<R: GeneratorImages + ?Sized>(&self, rep: &R) -> Result<CMat, AlgebraError> {
        let mut out = identity(rep.dim());
        for (p, inv) in &self.factors {
            let m = evaluate(p, rep)?;
            let m = if *inv {
                let c = condition_number(&m);
                if !(c < DENOMINATOR_CONDITION_LIMIT) {
                    return Err(AlgebraError::SingularDenominator(c));
                }
                inverse(&m).ok_or(AlgebraError::SingularDenominator(f64::INFINITY))?
            } else {
                m
            };
            out = &out * &m;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.factors
                .iter()
                .map(|(p, inv)| serde_json::json!({"inverse": inv, "terms": p.to_json()}))
                .collect(),
        )
    }
}

/// Which sides of the flipped square are glued to each other. Roles follow
/// the standard square: T1 = [j, i, m], T2 = [i, k, l].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareCase {
    pub identified: Vec<(char, char)>,
    /// Case number 1..=8; configurations related by the half-turn of the
    /// square are reported under the same number.
    pub number: u8,
}

fn square_case(j: usize, k: usize, l: usize, m: usize) -> SquareCase {
    let roles = [('j', j), ('k', k), ('l', l), ('m', m)];
    let mut identified = vec![];
    for a in 0..4 {
        for b in a + 1..4 {
            if roles[a].1 == roles[b].1 {
                identified.push((roles[a].0, roles[b].0));
            }
        }
    }
    let has = |x: char, y: char| identified.contains(&(x, y));
    let number = match identified.len() {
        0 => 1,
        1 => {
            if has('j', 'k') || has('l', 'm') {
                2
            } else if has('j', 'm') || has('k', 'l') {
                3
            } else if has('j', 'l') {
                4
            } else {
                5
            }
        }
        _ => {
            if has('j', 'k') {
                6
            } else if has('j', 'm') {
                7
            } else {
                8
            }
        }
    };
    SquareCase { identified, number }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PhiKind {
    Reindex(Vec<usize>),
    Flip { edge: usize, case: SquareCase },
}

/// Φ_{λλ'}: generators of the algebra of λ' = `source` as rational
/// expressions in the algebra of λ = `target`.
#[derive(Clone, Debug)]
pub struct PhiMap {
    pub source: IdealTriangulation,
    pub target: IdealTriangulation,
    pub kind: PhiKind,
    pub images: Vec<RationalExpr>,
}

impl PhiMap {
    pub fn evaluate<R: GeneratorImages + ?Sized>(&self, g: usize, rep: &R) -> Result<CMat, AlgebraError> {
        self.images[g].evaluate(rep)
    }

    pub fn evaluate_all<R: GeneratorImages + ?Sized>(&self, rep: &R) -> Result<Vec<CMat>, AlgebraError> {
        (0..self.images.len()).map(|g| self.evaluate(g, rep)).collect()
    }
}

/// Φ for one elementary move applied to λ.
pub fn phi_elementary(lambda: &IdealTriangulation, mv: &Move, order: usize) -> Result<PhiMap, AlgebraError> {
    let ctx = QContext::new(lambda, order);
    let n = lambda.n();
    match mv {
        Move::Reindex(tau) => {
            let source = reindex(lambda, tau)?;
            let images = tau.iter().map(|&t| RationalExpr::poly(NCPolynomial::generator(&ctx, t))).collect();
            Ok(PhiMap { source, target: lambda.clone(), kind: PhiKind::Reindex(tau.clone()), images })
        }
        Move::Flip(i) => {
            let i = *i;
            if i >= n {
                return Err(TopologyError::InvalidEdge(i).into());
            }
            match lambda.edge_kind(i) {
                EdgeKind::SelfFolded => return Err(AlgebraError::SelfFoldedFlip(i)),
                EdgeKind::Boundary => return Err(TopologyError::BoundaryEdge(i).into()),
                EdgeKind::Internal => {}
            }
            let sq = square_labels(lambda, i)?;
            let source = flip(lambda, i)?;
            let case = square_case(sq.j, sq.k, sq.l, sq.m);
            let xi = NCPolynomial::generator(&ctx, i);
            let xi_inv = NCPolynomial::generator_inv(&ctx, i);
            let one = NCPolynomial::one(&ctx);
            // 1 + q^a X_i and 1 + q^a X_i^{-1}
            let up = |a: i64| one.add(&xi.scale(QScalar::qpow(a))).unwrap();
            let down = |a: i64| one.add(&xi_inv.scale(QScalar::qpow(a))).unwrap();
            let mut images: Vec<RationalExpr> =
                (0..n).map(|g| RationalExpr::poly(NCPolynomial::generator(&ctx, g))).collect();
            images[i] = RationalExpr::poly(xi_inv.clone());
            let role_edge = [('j', sq.j), ('k', sq.k), ('l', sq.l), ('m', sq.m)];
            for &(role, g) in &role_edge {
                let partner = role_edge.iter().find(|&&(r, e)| r != role && e == g).map(|x| x.0);
                let xg = NCPolynomial::generator(&ctx, g);
                let raising = matches!(role, 'j' | 'l');
                let expr = match partner {
                    None if raising => RationalExpr::poly(up(1)).then(xg, false),
                    None => RationalExpr { factors: vec![(down(1), true), (xg, false)] },
                    Some(p) if matches!(p, 'j' | 'l') == raising => {
                        if raising {
                            RationalExpr::poly(up(1)).then(up(3), false).then(xg, false)
                        } else {
                            RationalExpr { factors: vec![(down(1), true), (down(3), true), (xg, false)] }
                        }
                    }
                    Some(_) => RationalExpr::poly(xi.mul(&xg)?),
                };
                images[g] = expr;
            }
            Ok(PhiMap { source, target: lambda.clone(), kind: PhiKind::Flip { edge: i, case }, images })
        }
    }
}

/// Detect the elementary move taking λ to λ' and build its Φ.
pub fn phi_between(lambda: &IdealTriangulation, lambda_p: &IdealTriangulation, order: usize) -> Result<PhiMap, AlgebraError> {
    if lambda.n() != lambda_p.n() || lambda.surface() != lambda_p.surface() {
        return Err(AlgebraError::NotElementary);
    }
    for e in lambda.internal_edges() {
        if lambda.edge_kind(e) == EdgeKind::Internal && flip(lambda, e)?.same_as(lambda_p) {
            return phi_elementary(lambda, &Move::Flip(e), order);
        }
    }
    if let Some(iso) = isomorphisms(lambda, lambda_p, None).into_iter().next() {
        let tau = invert_perm(&iso.edge);
        return phi_elementary(lambda, &Move::Reindex(tau), order);
    }
    Err(AlgebraError::NotElementary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_topology::examples::*;

    struct Diag(Vec<CMat>, Vec<CMat>);
    impl GeneratorImages for Diag {
        fn generators(&self) -> usize {
            self.0.len()
        }
        fn dim(&self) -> usize {
            self.0[0].nrows()
        }
        fn image(&self, g: usize) -> &CMat {
            &self.0[g]
        }
        fn image_inv(&self, g: usize) -> &CMat {
            &self.1[g]
        }
    }

    #[test]
    fn q_roots() {
        assert!((q_root(1) - ONE).norm() < 1e-12);
        assert!((q_root(2) - C64::new(0.0, -1.0)).norm() < 1e-12);
        let q3 = q_root(3);
        assert!((q3.powu(3) - ONE).norm() < 1e-12);
        for n in 1..8usize {
            let q = q_root(n);
            let sign = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((q.powu(n as u32) - C64::new(sign, 0.0)).norm() < 1e-10);
            let q2 = q * q;
            for k in 1..n {
                assert!((q2.powu(k as u32) - ONE).norm() > 1e-6);
            }
        }
    }

    #[test]
    fn triangle_commutation_exponent() {
        let ctx = QContext::new(&triangle(), 3);
        let x1 = NCMonomial::generator(3, 0);
        let x2 = NCMonomial::generator(3, 1);
        let a = mono_mul(&ctx, &x1, &x2).unwrap();
        let b = mono_mul(&ctx, &x2, &x1).unwrap();
        assert_eq!(a.alpha, b.alpha);
        assert_eq!((a.scalar.qexp - b.scalar.qexp).rem_euclid(6), 2);
    }

    #[test]
    fn weyl_h_of_triangle() {
        let ctx = QContext::new(&triangle(), 5);
        let h = weyl(&ctx, &[1, 1, 1]).unwrap();
        assert_eq!(h.scalar.qexp, (-1i64).rem_euclid(10));
        let e = weyl(&ctx, &[0, 1, 0]).unwrap();
        assert_eq!(e.scalar.qexp, 0);
    }

    #[test]
    fn polynomial_product_matches_weyl_rule() {
        let ctx = QContext::new(&square(), 3);
        let a = NCPolynomial::weyl_term(&ctx, &[1, 0, 2, 0, -1], QScalar::one());
        let b = NCPolynomial::weyl_term(&ctx, &[0, 1, 0, 1, 1], QScalar::one());
        let ab = a.mul(&b).unwrap();
        let e = ctx.pair(&[1, 0, 2, 0, -1], &[0, 1, 0, 1, 1]);
        let expect = NCPolynomial::weyl_term(&ctx, &[1, 1, 2, 1, 0], QScalar::qpow(e));
        assert!(ab.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn constant_one_evaluates_to_identity() {
        let ctx = QContext::new(&triangle(), 2);
        let id = identity(2);
        let rep = Diag(vec![id.clone(); 3], vec![id.clone(); 3]);
        let m = evaluate(&NCPolynomial::one(&ctx), &rep).unwrap();
        assert!(crate::linalg::rel_err(&id, &m) < 1e-15);
    }

    #[test]
    fn iota_on_square() {
        let s = square();
        let (mu, j) = crate::surface_topology::split_to_triangles(&s);
        let cs = QContext::new(&s, 3);
        let cm = QContext::new(&mu, 3);
        let xi = NCPolynomial::generator(&cs, 0);
        let img = iota_embed(&xi, &j, &cm).unwrap();
        let (alpha, _) = img.terms().next().unwrap();
        assert_eq!(alpha.iter().sum::<i64>(), 2);
    }

    #[test]
    fn case_detection() {
        for num in 1..=8u8 {
            let lam = crate::surface_topology::examples::square_case(num as usize);
            let phi = phi_elementary(&lam, &Move::Flip(0), 3).unwrap();
            match phi.kind {
                PhiKind::Flip { case, .. } => assert_eq!(case.number, num, "case {num}"),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn reindex_phi_is_permutation() {
        let p = pentagon();
        let tau = vec![1, 0, 2, 3, 4, 5, 6];
        let phi = phi_elementary(&p, &Move::Reindex(tau.clone()), 2).unwrap();
        assert_eq!(phi.images.len(), 7);
        let back = phi_between(&p, &reindex(&p, &tau).unwrap(), 2).unwrap();
        assert!(matches!(back.kind, PhiKind::Reindex(_)));
    }
}
