//! Dense complex linear algebra helpers shared by the other modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖a − b‖_F / ‖a‖_F, falling back to the absolute error when a = 0.
pub fn rel_err(a: &CMat, b: &CMat) -> f64 {
    let d = frob(&(a - b));
    let n = frob(a);
    if n == 0.0 {
        d
    } else {
        d / n
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(ms: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for m in ms {
        out = out.kronecker(m);
    }
    out
}

/// If `m` is a scalar multiple of the identity (relative Frobenius tolerance),
/// return the scalar.
pub fn scalar_value(m: &CMat, tol: f64) -> Option<C64> {
    let d = m.nrows();
    if d == 0 || m.ncols() != d {
        return None;
    }
    let x = m.trace() / d as f64;
    let dev = frob(&(m - CMat::identity(d, d) * x));
    if dev <= tol * frob(m).max(f64::MIN_POSITIVE) {
        Some(x)
    } else {
        None
    }
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Integer power; negative exponents use the supplied inverse.
pub fn mat_pow(m: &CMat, inv: &CMat, e: i64) -> CMat {
    let base = if e >= 0 { m } else { inv };
    let mut k = e.unsigned_abs();
    let mut acc = CMat::identity(m.nrows(), m.ncols());
    let mut sq = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &sq;
        }
        k >>= 1;
        if k > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

pub struct NullSpace {
    /// Orthonormal basis of the numerical kernel, one column per vector.
    pub basis: Vec<nalgebra::DVector<C64>>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
}

/// Numerical kernel of `a`: right singular vectors whose singular value is
/// below `rel_tol · σ_max`. Wide systems are padded with zero rows so that a
/// full set of right singular vectors is available.
pub fn null_space(a: &CMat, rel_tol: f64) -> NullSpace {
    null_space_scaled(a, rel_tol, 0.0)
}

/// As [`null_space`], with the threshold taken relative to
/// `max(σ_max, scale)`; needed when the whole system may vanish.
pub fn null_space_scaled(a: &CMat, rel_tol: f64, scale: f64) -> NullSpace {
    let cols = a.ncols();
    if cols == 0 {
        return NullSpace { basis: vec![], singular_values: vec![] };
    }
    let padded;
    let a = if a.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = singular_values.first().cloned().unwrap_or(0.0).max(scale);
    let thresh = rel_tol * smax;
    let basis = idx
        .iter()
        .filter(|&&i| smax == 0.0 || svd.singular_values[i] <= thresh)
        .map(|&i| v_t.row(i).adjoint())
        .collect();
    NullSpace { basis, singular_values }
}

/// True when every column of `m` has exactly one entry above the cutoff.
pub fn monomial_structure(m: &CMat) -> Option<Vec<(usize, C64)>> {
    let cutoff = 1e-12 * m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = Vec::with_capacity(m.ncols());
    for k in 0..m.ncols() {
        let mut hit = None;
        for r in 0..m.nrows() {
            let z = m[(r, k)];
            if z.norm() > cutoff {
                if hit.is_some() {
                    return None;
                }
                hit = Some((r, z));
            }
        }
        out.push(hit?);
    }
    Some(out)
}

/// Frobenius inner product ⟨a, b⟩ = Σ conj(a)·b.
pub fn inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Principal N-th root.
pub fn principal_root(z: C64, n: usize) -> C64 {
    if n == 1 {
        return z;
    }
    (z.ln() / n as f64).exp()
}

pub fn cpow(z: C64, e: i64) -> C64 {
    if e >= 0 {
        z.powu(e as u32)
    } else {
        z.inv().powu((-e) as u32)
    }
}

/// Operator on a tensor product of `m` copies of C^n assembled from pieces,
/// each acting on a subset of factor positions (factor 0 is most significant).
/// The subsets must partition 0..m.
pub fn tensor_embed(pieces: &[(Vec<usize>, CMat)], m: usize, n: usize) -> CMat {
    let dim = n.pow(m as u32);
    let digits = |mut idx: usize| {
        let mut d = vec![0usize; m];
        for p in (0..m).rev() {
            d[p] = idx % n;
            idx /= n;
        }
        d
    };
    let local = |d: &[usize], pos: &[usize]| pos.iter().fold(0usize, |acc, &p| acc * n + d[p]);
    let all: Vec<Vec<usize>> = (0..dim).map(digits).collect();
    let mut out = CMat::zeros(dim, dim);
    for (r, dr) in all.iter().enumerate() {
        for (c, dc) in all.iter().enumerate() {
            let mut v = ONE;
            for (pos, op) in pieces {
                v *= op[(local(dr, pos), local(dc, pos))];
                if v == ZERO {
                    break;
                }
            }
            out[(r, c)] = v;
        }
    }
    out
}

/// Permutation operator sending factor `t` of the source to position `perm[t]`.
pub fn factor_permutation(perm: &[usize], n: usize) -> CMat {
    let m = perm.len();
    let dim = n.pow(m as u32);
    let mut out = CMat::zeros(dim, dim);
    for src in 0..dim {
        let mut d = vec![0usize; m];
        let mut idx = src;
        for p in (0..m).rev() {
            d[p] = idx % n;
            idx /= n;
        }
        let mut nd = vec![0usize; m];
        for t in 0..m {
            nd[perm[t]] = d[t];
        }
        let dst = nd.iter().fold(0usize, |acc, &x| acc * n + x);
        out[(dst, src)] = ONE;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rnd(d: usize, seed: u64) -> CMat {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let a = rnd(4, 1);
        let mut b = CMat::zeros(4, 5);
        b.view_mut((0, 0), (4, 4)).copy_from(&a);
        let col = a.column(0) + a.column(1);
        b.set_column(4, &col);
        let ns = null_space(&b, 1e-10);
        assert_eq!(ns.basis.len(), 1);
        assert!((&b * &ns.basis[0]).norm() < 1e-10);
    }

    #[test]
    fn tensor_embed_matches_kron() {
        let a = rnd(2, 2);
        let b = rnd(2, 3);
        let c = rnd(2, 4);
        let full = kron_all(&[a.clone(), b.clone(), c.clone()]);
        let e = tensor_embed(&[(vec![1], b.clone()), (vec![0, 2], kron(&a, &c))], 3, 2);
        assert!(rel_err(&full, &e) < 1e-12);
    }

    #[test]
    fn factor_permutation_conjugates_kron() {
        let a = rnd(3, 5);
        let b = rnd(3, 6);
        let p = factor_permutation(&[1, 0], 3);
        let lhs = &p * kron(&a, &b) * p.transpose();
        assert!(rel_err(&kron(&b, &a), &lhs) < 1e-12);
    }

    #[test]
    fn mat_pow_negative() {
        let a = rnd(3, 7) + identity(3) * C64::new(3.0, 0.0);
        let ai = inverse(&a).unwrap();
        let p = mat_pow(&a, &ai, -3);
        let q = &ai * &ai * &ai;
        assert!(rel_err(&q, &p) < 1e-12);
    }
}
