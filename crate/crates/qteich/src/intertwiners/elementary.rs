//! Intertwiners for elementary moves, their homology orbits and composites.

use std::collections::VecDeque;

use crate::linalg::{
    factor_permutation, identity, inverse, kron_all, principal_root, tensor_embed, CMat, C64, ONE,
};
use crate::quantum_algebra::q_pow;
use crate::representations::{shift_operator, standard_matrices, transport_flip, LocalRepResolved};
use crate::surface_topology::{
    all_classes, apply_move, best_isomorphism, flip, reindex, square_labels, EdgeKind, HomologyClass,
    IdealTriangulation, Iso, Move,
};

use super::{solve_intertwiner_mats, IntertwinerError, ProjectiveMap};

type Res<T> = Result<T, IntertwinerError>;

fn kappa(ratio: C64, order: usize, tol: f64) -> Option<i64> {
    // q^{2κ} = exp(2πiκ/N)
    let n = order as f64;
    let k = (ratio.arg() * n / std::f64::consts::TAU).round() as i64;
    let k = k.rem_euclid(order as i64);
    ((ratio - q_pow(order, 2 * k)).norm() <= tol).then_some(k)
}

/// L: V_b → V_a with ρ_a(X_e) = L ρ_b(X_{iso(e)}) L⁻¹, where `iso` identifies
/// the triangulation of `a` with that of `b`.
pub fn identification_intertwiner(a: &LocalRepResolved, b: &LocalRepResolved, iso: &Iso) -> Res<CMat> {
    let la = &a.lambda;
    if a.order != b.order || !iso.is_valid(la, &b.lambda) {
        return Err(IntertwinerError::NotIsomorphic("identification does not match the triangulations".into()));
    }
    let n = a.order;
    let m = la.m();
    let tol = 1e-8;
    let target = |t: usize, s: usize| {
        let (u, r) = iso.tri[t];
        b.root(u, (s + r) % 3)
    };
    let mut roots: Vec<[C64; 3]> = a.parts.iter().map(|p| p.y).collect();
    // local equivalence: move the left-side ratio onto every internal edge
    for e in la.internal_edges() {
        let occ = la.occurrences(e);
        let (l, r) = if la.side(occ[0].0, occ[0].1).flip { (occ[1], occ[0]) } else { (occ[0], occ[1]) };
        let alpha = target(l.0, l.1) / roots[l.0][l.1];
        roots[l.0][l.1] *= alpha;
        roots[r.0][r.1] /= alpha;
    }
    // remaining side ratios are powers q^{2κ}
    let mut kap = vec![[0i64; 3]; m];
    for t in 0..m {
        for s in 0..3 {
            let ratio = target(t, s) / roots[t][s];
            kap[t][s] = kappa(ratio, n, tol * ratio.norm().max(1.0))
                .ok_or_else(|| IntertwinerError::NotIsomorphic(format!("side ({t}, {s}) differs by more than a root of unity")))?;
        }
    }
    // spread triangle defects along a dual spanning tree
    let mut defect: Vec<i64> = kap.iter().map(|k| k.iter().sum::<i64>()).collect();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut seen = vec![false; m];
    let mut order = Vec::new();
    for root in 0..m {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut comp = vec![root];
        while let Some(t) = queue.pop_front() {
            order.push(t);
            for s in 0..3 {
                let e = la.side(t, s).edge;
                if la.edge_kind(e) != EdgeKind::Internal {
                    continue;
                }
                for &(u, _) in la.occurrences(e) {
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Some((t, e));
                        queue.push_back(u);
                        comp.push(u);
                    }
                }
            }
        }
        let total: i64 = comp.iter().map(|&t| defect[t]).sum();
        if total.rem_euclid(n as i64) != 0 {
            return Err(IntertwinerError::NotIsomorphic("central loads differ".into()));
        }
    }
    for &t in order.iter().rev() {
        if let Some((p, e)) = parent[t] {
            // ε(e, t) k_e ≡ defect_t
            let et = la.epsilon(e, t);
            let k = et * defect[t];
            for &(u, s) in la.occurrences(e) {
                let sg = la.side(u, s).sign();
                roots[u][s] *= q_pow(n, 2 * k * sg);
                kap[u][s] -= k * sg;
            }
            defect[t] -= la.epsilon(e, t) * k;
            defect[p] -= la.epsilon(e, p) * k;
        }
    }
    let std = standard_matrices(n);
    let mut factors = Vec::with_capacity(m);
    let mut perm = vec![0usize; m];
    for t in 0..m {
        let (u, r) = iso.tri[t];
        perm[u] = t;
        let src: Vec<CMat> = (0..3).map(|s| &std.b[s] * roots[t][s]).collect();
        let tgt: Vec<CMat> = (0..3).map(|s| &std.b[(s + r) % 3] * target(t, s)).collect();
        let k = solve_intertwiner_mats(&src, &tgt)?;
        factors.push(k.matrix().clone());
    }
    Ok(kron_all(&factors) * factor_permutation(&perm, n))
}

/// Side matrices of the square of `i` on factors (t1, t2), generator order
/// [i, j, k, l, m].
fn square_side_images(r: &LocalRepResolved, i: usize) -> Res<(Vec<CMat>, Vec<CMat>, LocalRepResolved)> {
    let sq = square_labels(&r.lambda, i)?;
    let n = r.order;
    let std = standard_matrices(n);
    let b = &std.b;
    let id = identity(n);
    let y = |t: usize, s: usize| r.root(t, s);
    let (s1, s2) = (sq.s1, sq.s2);
    let xi = crate::linalg::kron(&b[s1], &b[s2]) * (y(sq.t1, s1) * y(sq.t2, s2));
    let xj = crate::linalg::kron(&b[(s1 + 2) % 3], &id) * y(sq.t1, (s1 + 2) % 3);
    let xm = crate::linalg::kron(&b[(s1 + 1) % 3], &id) * y(sq.t1, (s1 + 1) % 3);
    let xk = crate::linalg::kron(&id, &b[(s2 + 1) % 3]) * y(sq.t2, (s2 + 1) % 3);
    let xl = crate::linalg::kron(&id, &b[(s2 + 2) % 3]) * y(sq.t2, (s2 + 2) % 3);
    let xi_inv = inverse(&xi).expect("invertible");
    let q = q_pow(n, 1);
    let one = identity(n * n);
    let up = &one + &xi * q;
    let down = inverse(&(&one + &xi_inv * q)).ok_or(IntertwinerError::DegenerateInvariant(i))?;
    let source = vec![xi_inv, &up * xj, &down * xk, &up * xl, &down * xm];
    let v = transport_flip(r, i)?;
    let w = |t: usize, s: usize| v.root(t, s);
    let target = vec![
        crate::linalg::kron(&b[2], &b[1]) * (w(sq.t1, 2) * w(sq.t2, 1)),
        crate::linalg::kron(&b[0], &id) * w(sq.t1, 0),
        crate::linalg::kron(&b[1], &id) * w(sq.t1, 1),
        crate::linalg::kron(&id, &b[2]) * w(sq.t2, 2),
        crate::linalg::kron(&id, &b[0]) * w(sq.t2, 0),
    ];
    Ok((source, target, v))
}

/// The transported representation ζ_v on Δ_i(λ) and L with
/// (ρ ∘ Φ)(X') = L ρ_v(X') L⁻¹.
pub fn flip_intertwiner(r: &LocalRepResolved, i: usize) -> Res<(LocalRepResolved, CMat)> {
    let lam = &r.lambda;
    if i >= lam.n() {
        return Err(IntertwinerError::NotElementary);
    }
    if lam.edge_kind(i) == EdgeKind::SelfFolded {
        return Ok((r.clone(), identity(r.dim())));
    }
    let sq = square_labels(lam, i)?;
    let (source, target, v) = square_side_images(r, i)?;
    let lq = solve_intertwiner_mats(&source, &target)?;
    let mut pieces = vec![(vec![sq.t1, sq.t2], lq.matrix().clone())];
    for t in 0..lam.m() {
        if t != sq.t1 && t != sq.t2 {
            pieces.push((vec![t], identity(r.order)));
        }
    }
    Ok((v, tensor_embed(&pieces, lam.m(), r.order)))
}

/// B(c) = ⊗_t B1^{k_1} B2^{−k_0} with k_s = c_e · sign(side), normalized to
/// determinant 1.
#[derive(Clone, Debug)]
pub struct BOperator {
    pub matrix: CMat,
    /// Determinant before normalization.
    pub raw_det: C64,
    pub rescaled: bool,
}

pub fn b_operator(c: &HomologyClass, lambda: &IdealTriangulation, order: usize) -> BOperator {
    let factors: Vec<CMat> = (0..lambda.m())
        .map(|t| {
            let k = [0, 1, 2].map(|s| {
                let side = lambda.side(t, s);
                if lambda.edge_kind(side.edge) == EdgeKind::Boundary {
                    0
                } else {
                    c.coeffs[side.edge] as i64 * side.sign()
                }
            });
            shift_operator(order, k)
        })
        .collect();
    let matrix = kron_all(&factors);
    let raw_det = matrix.determinant();
    if (raw_det - ONE).norm() < 1e-9 {
        BOperator { matrix, raw_det, rescaled: false }
    } else {
        let s = principal_root(raw_det, matrix.nrows());
        BOperator { matrix: matrix * s.inv(), raw_det, rescaled: true }
    }
}

/// Carry a homology class across an identification. Isomorphisms ignore
/// edge orientations, so coefficients flip sign where the flags disagree.
pub fn transport_class_iso(c: &HomologyClass, a: &IdealTriangulation, b: &IdealTriangulation, iso: &Iso) -> HomologyClass {
    let mut ints = vec![0i64; b.n()];
    for e in 0..a.n() {
        let Some(&(t, s)) = a.occurrences(e).first() else { continue };
        let (u, r) = iso.tri[t];
        let agree = a.side(t, s).sign() * b.side(u, (s + r) % 3).sign();
        ints[iso.edge[e]] = c.coeffs[e] as i64 * agree;
    }
    HomologyClass::from_ints(&ints, c.modulus)
}

/// Carry a homology class across a move. Coefficients of surviving edges
/// are kept and the new diagonal is fixed by the cycle condition.
pub fn transport_class(c: &HomologyClass, lambda: &IdealTriangulation, mv: &Move) -> Res<HomologyClass> {
    match mv {
        Move::Reindex(tau) => Ok(HomologyClass { modulus: c.modulus, coeffs: tau.iter().map(|&t| c.coeffs[t]).collect() }),
        Move::Flip(i) => {
            if lambda.edge_kind(*i) == EdgeKind::SelfFolded {
                return Ok(c.clone());
            }
            let sq = square_labels(lambda, *i)?;
            let lp = flip(lambda, *i)?;
            let mut ints: Vec<i64> = c.coeffs.iter().map(|&x| x as i64).collect();
            ints[*i] = 0;
            let rest: i64 = (0..lp.n()).map(|e| lp.epsilon(e, sq.t1) * ints[e]).sum();
            let ei = lp.epsilon(*i, sq.t1);
            ints[*i] = -rest * ei;
            let out = HomologyClass::from_ints(&ints, c.modulus);
            debug_assert!(out.is_cycle(&lp));
            Ok(out)
        }
    }
}

/// All intertwiners between a source and a target representation: the base
/// map and its translates L ∘ B(c)⁻¹ for c ∈ H₁(S; Z_N).
#[derive(Clone, Debug)]
pub struct IntertwinerSet {
    pub source: LocalRepResolved,
    pub target: LocalRepResolved,
    pub base: ProjectiveMap,
}

impl IntertwinerSet {
    pub fn act(&self, c: &HomologyClass) -> ProjectiveMap {
        let b = b_operator(c, &self.target.lambda, self.target.order);
        let bi = inverse(&b.matrix).expect("B(c) is invertible");
        ProjectiveMap::new(self.base.matrix() * bi)
    }

    pub fn classes(&self) -> Vec<HomologyClass> {
        all_classes(&self.target.lambda, self.target.order as u32)
    }

    pub fn elements(&self) -> Vec<(HomologyClass, ProjectiveMap)> {
        self.classes().into_iter().map(|c| {
            let l = self.act(&c);
            (c, l)
        }).collect()
    }

    /// self followed by other on the target side: L_self ∘ L_other.
    pub fn then(&self, other: &IntertwinerSet) -> IntertwinerSet {
        IntertwinerSet { source: self.source.clone(), target: other.target.clone(), base: self.base.compose(&other.base) }
    }

    /// The class c with L ≐ base ∘ B(c)⁻¹, when unique.
    pub fn locate(&self, l: &ProjectiveMap, tol: f64) -> Option<HomologyClass> {
        let hits: Vec<HomologyClass> = self.elements().into_iter().filter(|(_, x)| x.distance(l) <= tol).map(|(c, _)| c).collect();
        (hits.len() == 1).then(|| hits[0].clone())
    }
}

fn identity_edges(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn move_intertwiner(r: &LocalRepResolved, mv: &Move) -> Res<(LocalRepResolved, CMat)> {
    match mv {
        Move::Flip(i) => flip_intertwiner(r, *i),
        Move::Reindex(tau) => {
            let lam = reindex(&r.lambda, tau)?;
            Ok((LocalRepResolved::new(lam, r.order, r.parts.clone())?, identity(r.dim())))
        }
    }
}

fn find_move(a: &IdealTriangulation, b: &IdealTriangulation) -> Res<Option<Move>> {
    let id = identity_edges(a.n());
    if a.n() != b.n() || a.m() != b.m() {
        return Err(IntertwinerError::NotElementary);
    }
    if best_isomorphism(a, b, Some(&id)).is_some() {
        return Ok(None);
    }
    for e in a.internal_edges() {
        if a.edge_kind(e) != EdgeKind::Internal {
            continue;
        }
        let f = flip(a, e)?;
        if best_isomorphism(&f, b, Some(&id)).is_some() {
            return Ok(Some(Move::Flip(e)));
        }
    }
    if let Some(iso) = best_isomorphism(a, b, None) {
        return Ok(Some(Move::Reindex(crate::surface_topology::invert_perm(&iso.edge))));
    }
    Err(IntertwinerError::NotElementary)
}

/// Intertwiners from a representation on λ to one on λ' when λ and λ' are
/// at most one elementary move apart. The move is inferred when `mv` is None.
pub fn elementary_intertwiner(a: &LocalRepResolved, b: &LocalRepResolved, mv: Option<&Move>) -> Res<IntertwinerSet> {
    if a.order != b.order {
        return Err(IntertwinerError::NotIsomorphic("different N".into()));
    }
    let mv = match mv {
        Some(m) => Some(m.clone()),
        None => find_move(&a.lambda, &b.lambda)?,
    };
    let (v, lm) = match &mv {
        Some(m) => move_intertwiner(a, m)?,
        None => (a.clone(), identity(a.dim())),
    };
    let id = identity_edges(v.lambda.n());
    let iso = best_isomorphism(&v.lambda, &b.lambda, Some(&id)).ok_or(IntertwinerError::NotElementary)?;
    let align = identification_intertwiner(&v, b, &iso)?;
    Ok(IntertwinerSet { source: a.clone(), target: b.clone(), base: ProjectiveMap::new(lm * align) })
}

/// One step of a composite: the map, the move (None for the final
/// alignment) and the representation it lands on.
#[derive(Clone, Debug)]
pub struct PathStep {
    pub mv: Option<Move>,
    /// Identification used by the final alignment step.
    pub iso: Option<Iso>,
    pub map: CMat,
    pub target: LocalRepResolved,
}

/// The individual steps of [`compose_path`].
pub fn path_steps(
    a: &LocalRepResolved,
    moves: &[Move],
    fin: Option<&LocalRepResolved>,
    fin_iso: Option<&Iso>,
) -> Res<Vec<PathStep>> {
    let mut cur = a.clone();
    let mut steps = Vec::with_capacity(moves.len() + 1);
    for mv in moves {
        apply_move(&cur.lambda, mv)?;
        let (next, l) = move_intertwiner(&cur, mv)?;
        steps.push(PathStep { mv: Some(mv.clone()), iso: None, map: l, target: next.clone() });
        cur = next;
    }
    if let Some(f) = fin {
        let iso = match fin_iso {
            Some(i) => i.clone(),
            None => {
                let id = identity_edges(cur.lambda.n());
                best_isomorphism(&cur.lambda, &f.lambda, Some(&id)).ok_or(IntertwinerError::NotElementary)?
            }
        };
        if iso.edge.iter().enumerate().any(|(e, &g)| e != g) {
            return Err(IntertwinerError::NotElementary);
        }
        let map = identification_intertwiner(&cur, f, &iso)?;
        steps.push(PathStep { mv: None, iso: Some(iso), map, target: f.clone() });
    }
    Ok(steps)
}

/// Composite along a move sequence. The last step aligns the transported
/// representation with `fin` through `fin_iso` (or the best matching
/// identification with unchanged edge labels).
pub fn compose_path(
    a: &LocalRepResolved,
    moves: &[Move],
    fin: Option<&LocalRepResolved>,
    fin_iso: Option<&Iso>,
) -> Res<IntertwinerSet> {
    let steps = path_steps(a, moves, fin, fin_iso)?;
    let mut base = identity(a.dim());
    for st in &steps {
        base = ProjectiveMap::new(base * &st.map).matrix().clone();
    }
    let target = steps.last().map_or_else(|| a.clone(), |s| s.target.clone());
    Ok(IntertwinerSet { source: a.clone(), target, base: ProjectiveMap::new(base) })
}

/// Shift each step k by c_k and compare with shifting the composite by the
/// transported sum. Returns the projective distance.
pub fn path_action_deviation(steps: &[PathStep], shifts: &[HomologyClass]) -> Res<f64> {
    let d = steps.first().map_or(1, |s| s.map.nrows());
    let mut plain = identity(d);
    let mut shifted = identity(d);
    for (st, c) in steps.iter().zip(shifts) {
        let b = b_operator(c, &st.target.lambda, st.target.order);
        plain = ProjectiveMap::new(plain * &st.map).matrix().clone();
        shifted = ProjectiveMap::new(shifted * &st.map * inverse(&b.matrix).expect("invertible")).matrix().clone();
    }
    let last = &steps.last().ok_or(IntertwinerError::NotElementary)?.target;
    let mut total = HomologyClass::zero(last.lambda.n(), last.order as u32);
    for (k, c) in shifts.iter().enumerate() {
        let mut cls = c.clone();
        for j in k + 1..steps.len() {
            let before = &steps[j - 1].target.lambda;
            if let Some(mv) = &steps[j].mv {
                cls = transport_class(&cls, before, mv)?;
            } else if let Some(iso) = &steps[j].iso {
                cls = transport_class_iso(&cls, before, &steps[j].target.lambda, iso);
            }
        }
        total = total.add(&cls);
    }
    let b = b_operator(&total, &last.lambda, last.order);
    let expect = ProjectiveMap::new(plain * inverse(&b.matrix).expect("invertible"));
    Ok(ProjectiveMap::new(shifted).distance(&expect))
}

#[derive(Clone, Debug)]
pub struct PentagonReport {
    pub moves: Vec<Move>,
    /// Projective distance from the identity to the composite's orbit.
    pub deviation: f64,
    /// The class c with c·(L₀∘⋯∘L₅) closest to the identity; nonzero only
    /// when the chosen representatives differ by a global shift.
    pub shift: HomologyClass,
    /// Size of H₁(S; Z_N); with a single class the action check is vacuous.
    pub orbit_size: usize,
    /// Largest distance between (c₀·L₀)∘⋯∘(c₆·L₆) and (Σc)·(L₀∘⋯∘L₆)
    /// over the tested shift tuples.
    pub action_deviation: f64,
}

/// Run the five alternating flips of two diagonals of a pentagon followed
/// by the label swap and measure how far the composite is from Id.
pub fn verify_pentagon(r: &LocalRepResolved, i: usize, j: usize) -> Res<PentagonReport> {
    let lam = &r.lambda;
    let ok = |e: usize| e < lam.n() && lam.edge_kind(e) == EdgeKind::Internal;
    if i == j || !ok(i) || !ok(j) {
        return Err(IntertwinerError::NotPentagonConfiguration);
    }
    let shares = (0..lam.m()).any(|t| {
        let es = lam.edges_of(t);
        es.contains(&i) && es.contains(&j)
    });
    if !shares {
        return Err(IntertwinerError::NotPentagonConfiguration);
    }
    let mut swap = identity_edges(lam.n());
    swap.swap(i, j);
    for (a, b) in [(i, j), (j, i)] {
        let flips = vec![Move::Flip(a), Move::Flip(b), Move::Flip(a), Move::Flip(b), Move::Flip(a)];
        let Ok(l5) = crate::surface_topology::apply_moves(lam, &flips) else { continue };
        if best_isomorphism(&l5, lam, Some(&swap)).is_none() {
            continue;
        }
        let mut moves = flips;
        moves.push(Move::Reindex(swap.clone()));
        let set = compose_path(r, &moves, Some(r), None)?;
        let id = ProjectiveMap::identity(r.dim());
        let classes = all_classes(lam, r.order as u32);
        let orbit_size = classes.len();
        let (deviation, shift) = classes
            .into_iter()
            .map(|c| (set.act(&c).distance(&id), c))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("zero class");
        let steps = path_steps(r, &moves, Some(r), None)?;
        let mut action_deviation: f64 = 0.0;
        for trial in 0..4usize {
            let shifts: Vec<HomologyClass> = steps
                .iter()
                .enumerate()
                .map(|(k, st)| {
                    let all = all_classes(&st.target.lambda, r.order as u32);
                    all[(trial * 5 + k * 3 + 1) % all.len()].clone()
                })
                .collect();
            action_deviation = action_deviation.max(path_action_deviation(&steps, &shifts)?);
        }
        return Ok(PentagonReport { moves, deviation, shift, orbit_size, action_deviation });
    }
    Err(IntertwinerError::NotPentagonConfiguration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intertwiners::intertwining_residual;
    use crate::quantum_algebra::phi_elementary;
    use crate::representations::{betti1, homology_act, local_rep_matrices};
    use crate::surface_topology::examples::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_set(set: &IntertwinerSet, mv: Option<&Move>) -> f64 {
        let ra = local_rep_matrices(&set.source);
        let rb = local_rep_matrices(&set.target);
        let src: Vec<CMat> = match mv {
            Some(m) => phi_elementary(&set.source.lambda, m, set.source.order).unwrap().evaluate_all(&ra).unwrap(),
            None => ra.images().to_vec(),
        };
        intertwining_residual(set.base.matrix(), &src, rb.images())
    }

    #[test]
    fn identification_of_locally_equivalent_reps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for lam in [square(), torus(), pentagon()] {
            let a = LocalRepResolved::random(&lam, 3, &mut rng);
            let mut b = a.clone();
            // rescale a pair of sides of an internal edge
            let e = lam.internal_edges()[0];
            let occ = lam.occurrences(e).to_vec();
            let s = C64::new(0.3, 1.1);
            b.set_root(occ[0].0, occ[0].1, b.root(occ[0].0, occ[0].1) * s);
            b.set_root(occ[1].0, occ[1].1, b.root(occ[1].0, occ[1].1) / s);
            let set = elementary_intertwiner(&a, &b, None).unwrap();
            assert!(check_set(&set, None) < 1e-9);
        }
    }

    #[test]
    fn flip_intertwiners_for_every_square_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for c in 1..=8 {
            let lam = square_case(c);
            for n in [2, 3] {
                let a = LocalRepResolved::random(&lam, n, &mut rng);
                let (v, l) = flip_intertwiner(&a, 0).unwrap();
                let phi = phi_elementary(&lam, &Move::Flip(0), n).unwrap();
                let src = phi.evaluate_all(&local_rep_matrices(&a)).unwrap();
                let res = intertwining_residual(&l, &src, local_rep_matrices(&v).images());
                assert!(res < 1e-8, "case {c} N={n}: residual {res:e}");
            }
        }
    }

    #[test]
    fn homology_orbit_on_torus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lam = torus();
        let a = LocalRepResolved::random(&lam, 3, &mut rng);
        let (v, _) = flip_intertwiner(&a, 0).unwrap();
        let set = elementary_intertwiner(&a, &v, Some(&Move::Flip(0))).unwrap();
        let els = set.elements();
        assert_eq!(els.len(), 9);
        for (_, l) in &els {
            assert!(check_set(&IntertwinerSet { base: l.clone(), ..set.clone() }, Some(&Move::Flip(0))) < 1e-8);
        }
        for x in 0..els.len() {
            for y in 0..x {
                assert!(els[x].1.distance(&els[y].1) > 1e-3);
            }
        }
        // intertwiners to d·ζ' land in the orbit at a unique class
        for d in set.classes() {
            let moved = homology_act(&d, &v);
            let other = elementary_intertwiner(&a, &moved, Some(&Move::Flip(0))).unwrap();
            assert!(set.locate(&other.base, 1e-8).is_some());
        }
    }

    #[test]
    fn b_operator_commutes_through_flip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let lam = torus();
        let n = 3;
        let a = LocalRepResolved::random(&lam, n, &mut rng);
        let (v, l) = flip_intertwiner(&a, 1).unwrap();
        for c in all_classes(&lam, n as u32) {
            let cp = transport_class(&c, &lam, &Move::Flip(1)).unwrap();
            let b = b_operator(&c, &lam, n).matrix;
            let bp = b_operator(&cp, &v.lambda, n).matrix;
            let lhs = ProjectiveMap::new(&b * &l);
            let rhs = ProjectiveMap::new(&l * &bp);
            assert!(lhs.distance(&rhs) < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn b_operator_determinant() {
        let lam = torus();
        for c in all_classes(&lam, 3) {
            let b = b_operator(&c, &lam, 3);
            assert!((b.raw_det - ONE).norm() < 1e-9);
            assert!(!b.rescaled);
        }
    }

    #[test]
    fn pentagon_relation_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [2, 3] {
            let a = LocalRepResolved::random(&pentagon(), n, &mut rng);
            let rep = verify_pentagon(&a, 0, 1).unwrap();
            assert!(rep.deviation < 1e-8, "N={n} deviation {:e}", rep.deviation);
        }
        let a = LocalRepResolved::random(&square(), 2, &mut rng);
        assert_eq!(verify_pentagon(&a, 0, 1).unwrap_err(), IntertwinerError::NotPentagonConfiguration);
    }

    #[test]
    fn pentagon_with_homology() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [[[2, 3, 0], [0, 4, 1], [1, 5, 2]], [[2, 3, 0], [0, 4, 1], [1, 3, 5]], [[2, 3, 0], [0, 2, 1], [1, 4, 5]]] {
            let l = IdealTriangulation::from_edges(&g).unwrap();
            assert_eq!(betti1(&l), 1);
            for n in [2, 3] {
                let a = LocalRepResolved::random(&l, n, &mut rng);
                let rep = verify_pentagon(&a, 0, 1).unwrap();
                assert_eq!(rep.orbit_size, n as usize);
                assert!(rep.deviation < 1e-8, "{g:?} N={n}: {:e}", rep.deviation);
                assert!(rep.action_deviation < 1e-8, "{g:?} N={n}: action {:e}", rep.action_deviation);
            }
        }
    }
}
