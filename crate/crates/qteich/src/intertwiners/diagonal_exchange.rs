//! Closed-form intertwiner for the flip of the diagonal of a square.
//!
//! The square has diagonal i, sides j, m on the first triangle and k, l on
//! the second. Its representation uses roots (y_j, y_i, y_m) and (1, y_k, y_l);
//! the flipped square uses (v_j, v_k, v_i) and (v_m, 1, v_l) with
//! v_i y_i = q^{2z}. The operator is built as ψ composed with Fourier-type
//! maps ξ, and a direct component formula is provided for comparison.

use rand::Rng;

use crate::linalg::{inverse, kron, principal_root, CMat, C64, ONE, ZERO};
use crate::quantum_algebra::q_pow;
use crate::representations::LocalRepResolved;
use crate::surface_topology::{examples, flip};

use super::{IntertwinerError, ProjectiveMap};

/// Roots of the square before (`y`) and after (`v`) the flip, indexed
/// [i, j, k, l, m].
#[derive(Clone, Debug, PartialEq)]
pub struct SquareData {
    pub order: usize,
    pub y: [C64; 5],
    pub v: [C64; 5],
    pub z: usize,
}

const I: usize = 0;
const J: usize = 1;
const K: usize = 2;
const L: usize = 3;
const M: usize = 4;

impl SquareData {
    /// Checks v_i y_i = q^{2z} for some z, the N-th power relations of the
    /// flip, and equality of the central loads.
    pub fn new(order: usize, y: [C64; 5], v: [C64; 5], tol: f64) -> Result<Self, IntertwinerError> {
        let n = order as u32;
        let xi = y[I].powu(n);
        if (ONE + xi).norm() < 1e-12 {
            return Err(IntertwinerError::DegenerateInvariant(I));
        }
        let prod = v[I] * y[I];
        let z = (0..order)
            .find(|&z| (prod - q_pow(order, 2 * z as i64)).norm() <= tol)
            .ok_or_else(|| IntertwinerError::InvalidSquareData("v_i y_i is not an even power of q".into()))?;
        let up = ONE + xi;
        let down = (ONE + xi.inv()).inv();
        let expect = [(J, up), (K, down), (L, up), (M, down)];
        for (g, f) in expect {
            let want = f * y[g].powu(n);
            if (v[g].powu(n) - want).norm() > tol * want.norm().max(1.0) {
                return Err(IntertwinerError::InvalidSquareData(format!("v[{g}]^N does not match the flip")));
            }
        }
        let h: C64 = y.iter().product();
        let hp: C64 = v.iter().product();
        if (h - hp).norm() > tol * h.norm() {
            return Err(IntertwinerError::InvalidSquareData("central loads differ".into()));
        }
        Ok(SquareData { order, y, v, z })
    }

    /// Random admissible data: y with moduli in [1/2, 2], random roots of
    /// unity in each v, and v_m fixed by the central load.
    pub fn random<R: Rng>(order: usize, rng: &mut R) -> Self {
        let n = order as u32;
        loop {
            let y: [C64; 5] = [0; 5].map(|_| C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU)));
            let xi = y[I].powu(n);
            if (ONE + xi).norm() < 0.1 {
                continue;
            }
            let up = ONE + xi;
            let down = (ONE + xi.inv()).inv();
            let mut root = |f: C64, g: usize| principal_root(f * y[g].powu(n), order) * q_pow(order, 2 * rng.gen_range(0..order as i64));
            let vj = root(up, J);
            let vk = root(down, K);
            let vl = root(up, L);
            let z = rng.gen_range(0..order);
            let vi = y[I].inv() * q_pow(order, 2 * z as i64);
            let h: C64 = y.iter().product();
            let vm = h / (vi * vj * vk * vl);
            return SquareData { order, y, v: [vi, vj, vk, vl, vm], z };
        }
    }

    /// Representations on the square and on its flip along edge 0.
    pub fn reps(&self) -> (LocalRepResolved, LocalRepResolved) {
        let sq = examples::square();
        let fl = flip(&sq, 0).expect("square diagonal is flippable");
        let (y, v) = (self.y, self.v);
        let a = LocalRepResolved::from_roots(sq, self.order, &[[y[J], y[I], y[M]], [ONE, y[K], y[L]]]).expect("valid roots");
        let b = LocalRepResolved::from_roots(fl, self.order, &[[v[J], v[K], v[I]], [v[M], ONE, v[L]]]).expect("valid roots");
        (a, b)
    }

    fn check(&self) -> Result<(), IntertwinerError> {
        if (ONE + self.y[I].powu(self.order as u32)).norm() < 1e-12 {
            return Err(IntertwinerError::DegenerateInvariant(I));
        }
        Ok(())
    }

    fn q(&self, k: i64) -> C64 {
        q_pow(self.order, k)
    }

    /// Π_{u=1}^{a} (1 + y_i q^{1−2(u+z)}).
    fn qproduct(&self, a: usize) -> C64 {
        (1..=a as i64).map(|u| ONE + self.y[I] * self.q(1 - 2 * (u + self.z as i64))).product()
    }
}

/// ξ e_k = N^{-1/2} Σ_h q^{2hk + h²} e_h.
pub fn xi_map(order: usize) -> CMat {
    let s = (order as f64).sqrt();
    CMat::from_fn(order, order, |h, k| {
        let (h, k) = (h as i64, k as i64);
        q_pow(order, 2 * h * k + h * h) / s
    })
}

/// ψ(e_s ⊗ e_t) = Σ_r a_{r,s,t} e_{−r} ⊗ e_{r−(s+t+z)}.
pub fn psi(d: &SquareData) -> Result<CMat, IntertwinerError> {
    d.check()?;
    let n = d.order;
    let (y, v, z) = (d.y, d.v, d.z as i64);
    let a_s = v[K] / (y[K] * y[I]);
    let a_r = y[J] * y[K] * y[I] / (v[J] * v[K]);
    let a_t = y[L] / v[L];
    let mut out = CMat::zeros(n * n, n * n);
    for s in 0..n {
        for t in 0..n {
            let prod = d.qproduct(s + t);
            for r in 0..n {
                let (si, ti, ri) = (s as i64, t as i64, r as i64);
                let e = (ti - ri).pow(2) + 2 * (si + ti - ri) * z + 2 * si * ti;
                let coeff = a_s.powu(s as u32) * a_r.powu(r as u32) * a_t.powu(t as u32) * d.q(e) * prod;
                let b = (-ri).rem_euclid(n as i64) as usize;
                let c = (ri - (si + ti + z)).rem_euclid(n as i64) as usize;
                out[(b * n + c, s * n + t)] += coeff;
            }
        }
    }
    Ok(out)
}

/// (ξ⁻¹ ⊗ I) ψ (ξ⁻¹ ⊗ ξ).
pub fn exchange_psi(d: &SquareData) -> Result<CMat, IntertwinerError> {
    let xi = xi_map(d.order);
    let xin = inverse(&xi).expect("ξ is unitary");
    let id = CMat::identity(d.order, d.order);
    Ok(kron(&xin, &id) * psi(d)? * kron(&xin, &xi))
}

/// f(a) = (y_j / v_j)^a Π_{u=1}^{a} (1 + y_i q^{1−2(u+z)}), for any a ≥ 0.
pub fn prefactor(d: &SquareData, a: usize) -> C64 {
    (d.y[J] / d.v[J]).powu(a as u32) * d.qproduct(a)
}

/// Component formula L(e_s ⊗ e_t) = Σ L^{b,c}_{s,t} e_b ⊗ e_c.
pub fn exchange_closed_form(d: &SquareData) -> Result<CMat, IntertwinerError> {
    d.check()?;
    let n = d.order;
    let (y, v, z) = (d.y, d.v, d.z as i64);
    let a_r = y[J] * y[K] * y[I] / (v[J] * v[K]);
    let a_p = y[L] * y[K] * y[I] / (v[L] * v[K]);
    let f: Vec<C64> = (0..n).map(|a| prefactor(d, a)).collect();
    let p = |x: C64| (0..n).fold(ZERO, |acc, k| acc + (a_p * x).powu(k as u32));
    let mut out = CMat::zeros(n * n, n * n);
    for b in 0..n as i64 {
        for c in 0..n as i64 {
            for s in 0..n as i64 {
                let sum: C64 = (0..n as i64).map(|a| d.q(2 * a * (b - s)) * f[a as usize]).sum();
                for t in 0..n as i64 {
                    let pre = d.q(-s * s + 2 * z * (b - c - z) + 2 * b * c) * a_r.powi((c + z) as i32);
                    let val = pre * p(d.q(2 * (s + t - c - z))) * sum;
                    out[((b * n as i64 + c) as usize, (s * n as i64 + t) as usize)] = val;
                }
            }
        }
    }
    Ok(out)
}

/// The closed-form flip intertwiner, via the ψ construction.
pub fn exchange_intertwiner(d: &SquareData) -> Result<ProjectiveMap, IntertwinerError> {
    Ok(ProjectiveMap::new(exchange_psi(d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intertwiners::{intertwining_residual, solve_intertwiner_mats};
    use crate::quantum_algebra::phi_elementary;
    use crate::representations::local_rep_matrices;
    use crate::surface_topology::Move;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mats(d: &SquareData) -> (Vec<CMat>, Vec<CMat>) {
        let (a, b) = d.reps();
        let phi = phi_elementary(&a.lambda, &Move::Flip(0), d.order).unwrap();
        let src = phi.evaluate_all(&local_rep_matrices(&a)).unwrap();
        (src, local_rep_matrices(&b).images().to_vec())
    }

    #[test]
    fn random_data_is_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let d = SquareData::random(n, &mut rng);
            let back = SquareData::new(n, d.y, d.v, 1e-9).unwrap();
            assert_eq!(back.z, d.z);
        }
    }

    #[test]
    fn xi_intertwines_standard_matrices() {
        let n = 3;
        let std = crate::representations::standard_matrices(n);
        let xi = xi_map(n);
        let xin = inverse(&xi).unwrap();
        for i in 0..3 {
            let conj = &xin * &std.b[i] * &xi;
            let next = &std.b[(i + 1) % 3];
            let s = crate::linalg::inner(next, &conj) / crate::linalg::inner(next, next);
            assert!(crate::linalg::rel_err(&conj, &(next * s)) < 1e-12, "generator {i}");
        }
    }

    #[test]
    fn psi_route_agrees_with_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for _ in 0..3 {
                let d = SquareData::random(n, &mut rng);
                let (src, tgt) = mats(&d);
                let solved = solve_intertwiner_mats(&src, &tgt).unwrap();
                let l = exchange_intertwiner(&d).unwrap();
                assert!(intertwining_residual(l.matrix(), &src, &tgt) < 1e-9, "N={n}");
                assert!(l.distance(&solved) < 1e-8);
            }
        }
    }

    #[test]
    fn printed_formula_matches_psi_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 3, 5] {
            for _ in 0..3 {
                let d = SquareData::random(n, &mut rng);
                let a = exchange_psi(&d).unwrap();
                let b = exchange_closed_form(&d).unwrap();
                assert!(crate::intertwiners::projective_distance(&a, &b) < 1e-10, "N={n}");
            }
        }
    }

    #[test]
    fn prefactor_is_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2, 3, 5] {
            let d = SquareData::random(n, &mut rng);
            for a in 0..n {
                let (x, y) = (prefactor(&d, a), prefactor(&d, a + n));
                assert!((x - y).norm() < 1e-10 * x.norm().max(1.0), "N={n} a={a}");
            }
        }
    }

    #[test]
    fn xi_columns_are_orthogonal() {
        for n in 1..=5 {
            let xi = xi_map(n);
            let gram = xi.adjoint() * &xi;
            assert!(crate::linalg::rel_err(&gram, &CMat::identity(n, n)) < 1e-12);
        }
        assert!((xi_map(1)[(0, 0)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn degenerate_diagonal_is_rejected() {
        let n = 3;
        let yi = principal_root(C64::new(-1.0, 0.0), n);
        let d = SquareData { order: n, y: [yi, ONE, ONE, ONE, ONE], v: [yi.inv(), ONE, ONE, ONE, ONE], z: 0 };
        assert_eq!(psi(&d), Err(IntertwinerError::DegenerateInvariant(0)));
    }
}
