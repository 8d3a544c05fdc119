//! Exact polynomial calculus on the unit sphere in R^N.
//!
//! Polynomials in the coordinates `v_1..v_N` are stored in a canonical form
//! where the last coordinate appears with exponent 0 or 1; higher powers are
//! eliminated through `v_N^2 = 1 - v_1^2 - ... - v_{N-1}^2`, which holds
//! identically on the sphere. In this form polynomial identities on the
//! sphere become exact coefficient identities, so operator actions and inner
//! products below involve no quadrature at all.

use std::collections::{BTreeMap, HashMap};

use crate::density::AngularDensity;
use crate::special::{binomial, odd_double_factorial};
use crate::{Error, Result};

const COEFF_EPS: f64 = 1e-14;

/// Moment of a monomial against the uniform probability measure on the unit
/// sphere in R^n: zero unless every exponent is even, otherwise
/// `prod_i (e_i - 1)!! / (n (n+2) ... (n + E - 2))` with `E = sum e_i`.
pub fn sphere_moment(n: usize, exps: &[u32]) -> f64 {
    debug_assert!(exps.len() <= n);
    if exps.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let total: u32 = exps.iter().sum();
    let mut num = 1.0;
    for &e in exps {
        num *= odd_double_factorial(e / 2);
    }
    let mut den = 1.0;
    let mut m = 0;
    while m < total {
        den *= (n as u32 + m) as f64;
        m += 2;
    }
    num / den
}

/// `integral of cos^p(theta) sin^q(theta) rho(theta) d theta`, evaluated by
/// expanding the trigonometric monomial into a finite cosine series and
/// pairing it with the density's Fourier moments. Exact for series densities.
pub fn trig_moment(rho: &AngularDensity, p: u32, q: u32) -> f64 {
    if q % 2 == 1 {
        return 0.0; // odd in theta against an even density
    }
    // cos^p sin^q = sum over (u, w) of binom(p,u) binom(q,w) (-1)^(q-w)
    //               (-1)^(q/2) / 2^(p+q) * e^{i (2u - p + 2w - q) theta}
    let mut freq: BTreeMap<i64, f64> = BTreeMap::new();
    let scale = if (q / 2) % 2 == 0 { 1.0 } else { -1.0 };
    for u in 0..=p {
        for w in 0..=q {
            let m = 2 * u as i64 - p as i64 + 2 * w as i64 - q as i64;
            let sign = if (q - w) % 2 == 0 { 1.0 } else { -1.0 };
            *freq.entry(m).or_insert(0.0) += binomial(p, u) * binomial(q, w) * sign;
        }
    }
    let halves = 0.5f64.powi((p + q) as i32);
    let mut total = 0.0;
    for (m, c) in freq {
        total += c * rho.cosine_moment(m.unsigned_abs() as usize);
    }
    total * halves * scale
}

/// Polynomial on the sphere in canonical reduced form.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl SpherePoly {
    pub fn zero(n: usize) -> Self {
        SpherePoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(&vec![0; n], c);
        p
    }

    pub fn monomial(n: usize, exps: &[u32], coeff: f64) -> Result<Self> {
        if exps.len() != n {
            return Err(Error::invalid(format!(
                "monomial exponent vector has length {} but the sphere sits in {} coordinates",
                exps.len(),
                n
            )));
        }
        let mut p = Self::zero(n);
        p.add_term(exps, coeff);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Adds `coeff * v^exps`, reducing powers of the last coordinate.
    pub fn add_term(&mut self, exps: &[u32], coeff: f64) {
        debug_assert_eq!(exps.len(), self.n);
        if coeff == 0.0 {
            return;
        }
        let last = exps[self.n - 1];
        if last <= 1 {
            let entry = self.terms.entry(exps.to_vec()).or_insert(0.0);
            *entry += coeff;
            if entry.abs() <= COEFF_EPS * coeff.abs().max(1.0) * 1e-2 && *entry == 0.0 {
                self.terms.remove(exps);
            }
            return;
        }
        // v_N^(2+r) = (1 - sum_{i<N} v_i^2) v_N^r
        let mut reduced = exps.to_vec();
        reduced[self.n - 1] = last - 2;
        self.add_term(&reduced, coeff);
        for i in 0..self.n - 1 {
            reduced[i] += 2;
            self.add_term(&reduced, -coeff);
            reduced[i] -= 2;
        }
    }

    pub fn scale(&mut self, c: f64) {
        if c == 0.0 {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn add_assign(&mut self, other: &SpherePoly, factor: f64) {
        debug_assert_eq!(self.n, other.n);
        for (e, c) in &other.terms {
            let entry = self.terms.entry(e.clone()).or_insert(0.0);
            *entry += c * factor;
        }
        self.prune();
    }

    fn prune(&mut self) {
        let scale = self.terms.values().map(|c| c.abs()).fold(0.0, f64::max).max(1.0);
        self.terms.retain(|_, c| c.abs() > COEFF_EPS * scale * 1e-2);
    }

    pub fn mul(&self, other: &SpherePoly) -> SpherePoly {
        debug_assert_eq!(self.n, other.n);
        let mut out = SpherePoly::zero(self.n);
        let mut exps = vec![0u32; self.n];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                for (k, e) in exps.iter_mut().enumerate() {
                    *e = ea[k] + eb[k];
                }
                out.add_term(&exps, ca * cb);
            }
        }
        out
    }

    /// Integral against the uniform probability measure on the sphere.
    pub fn integral(&self) -> f64 {
        let mut total = 0.0;
        for (e, c) in &self.terms {
            total += c * sphere_moment(self.n, e);
        }
        total
    }

    /// L^2(sphere) inner product.
    pub fn inner(&self, other: &SpherePoly) -> f64 {
        self.mul(other).integral()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    /// Pullback under a coordinate permutation: `result(v) = self(v o perm)`,
    /// i.e. exponent `e_k` moves to slot `perm[k]`.
    pub fn permute_coords(&self, perm: &[usize]) -> SpherePoly {
        debug_assert_eq!(perm.len(), self.n);
        let mut out = SpherePoly::zero(self.n);
        let mut exps = vec![0u32; self.n];
        for (e, c) in &self.terms {
            for x in exps.iter_mut() {
                *x = 0;
            }
            for (k, &ek) in e.iter().enumerate() {
                exps[perm[k]] = ek;
            }
            out.add_term(&exps, *c);
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

/// Average over pair rotations: `(Q f)(v) = binom(N,2)^{-1} sum_{i<j}
/// integral f(r_ij(theta) v) rho(theta) d theta`, carried out exactly on the
/// monomial expansion.
pub fn q_apply(rho: &AngularDensity, f: &SpherePoly) -> SpherePoly {
    let n = f.n();
    let mut out = SpherePoly::zero(n);
    let mut cache: HashMap<(u32, u32), f64> = HashMap::new();
    let tm = |p: u32, q: u32, cache: &mut HashMap<(u32, u32), f64>| -> f64 {
        *cache.entry((p, q)).or_insert_with(|| trig_moment(rho, p, q))
    };
    let mut exps = vec![0u32; n];
    for i in 0..n {
        for j in i + 1..n {
            for (e, c) in f.terms() {
                let a = e[i];
                let b = e[j];
                // (v_i cos + v_j sin)^a (-v_i sin + v_j cos)^b
                for alpha in 0..=a {
                    for beta in 0..=b {
                        let p = alpha + beta; // power of cos(theta)
                        let q = a + b - p; // power of sin(theta)
                        let moment = tm(p, q, &mut cache);
                        if moment == 0.0 {
                            continue;
                        }
                        let sign = if (b - beta) % 2 == 0 { 1.0 } else { -1.0 };
                        let w = binomial(a, alpha)
                            * binomial(b, beta)
                            * sign
                            * moment
                            * c;
                        exps.copy_from_slice(e);
                        exps[i] = alpha + (b - beta);
                        exps[j] = (a - alpha) + beta;
                        out.add_term(&exps, w);
                    }
                }
            }
        }
    }
    out.scale(1.0 / (n as f64 * (n as f64 - 1.0) / 2.0));
    out
}

/// Average of the single-coordinate conditional expectations:
/// `(P f)(v) = N^{-1} sum_j E[f | v_j]`, exact on monomials. Conditioning on
/// `v_j` replaces the other coordinates by their moments on the sphere of
/// radius `sqrt(1 - v_j^2)` in N-1 dimensions.
pub fn p_apply(f: &SpherePoly) -> SpherePoly {
    let n = f.n();
    let mut out = SpherePoly::zero(n);
    let mut others = Vec::with_capacity(n - 1);
    let mut exps = vec![0u32; n];
    for j in 0..n {
        for (e, c) in f.terms() {
            others.clear();
            others.extend(e.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x));
            if others.iter().any(|x| x % 2 == 1) {
                continue;
            }
            let rest_total: u32 = others.iter().sum();
            let moment = sphere_moment(n - 1, &others);
            // contribution: moment * v_j^{e_j} (1 - v_j^2)^{rest_total/2}
            let half = rest_total / 2;
            for t in 0..=half {
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                let w = c * moment * binomial(half, t) * sign;
                for x in exps.iter_mut() {
                    *x = 0;
                }
                exps[j] = e[j] + 2 * t;
                out.add_term(&exps, w);
            }
        }
    }
    out.scale(1.0 / n as f64);
    out
}

/// Which invariant subspace a restricted operator is assembled on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// All reduced monomials up to the degree cap.
    Full,
    /// Polynomials invariant under coordinate permutations.
    Symmetric,
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sector::Full => write!(f, "full"),
            Sector::Symmetric => write!(f, "symmetric"),
        }
    }
}

/// All reduced monomials of total degree at most `degree`: exponent vectors
/// with last entry 0 or 1. These are linearly independent on the sphere.
pub fn full_basis(n: usize, degree: u32) -> Vec<SpherePoly> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    fn rec(exps: &mut Vec<u32>, pos: usize, remaining: u32, n: usize, out: &mut Vec<Vec<u32>>) {
        if pos == n - 1 {
            for last in 0..=remaining.min(1) {
                exps[pos] = last;
                out.push(exps.clone());
            }
            exps[pos] = 0;
            return;
        }
        for e in 0..=remaining {
            exps[pos] = e;
            rec(exps, pos + 1, remaining - e, n, out);
        }
        exps[pos] = 0;
    }
    let mut vecs = Vec::new();
    rec(&mut exps, 0, degree, n, &mut vecs);
    vecs.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    for e in vecs {
        out.push(SpherePoly::monomial(n, &e, 1.0).expect("length checked"));
    }
    out
}

/// Integer partitions with at most `max_parts` parts, each part >= 1, total
/// between 0 and `degree` (the empty partition stands for the constant).
pub fn partitions_up_to(degree: u32, max_parts: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    fn rec(total: u32, max_part: u32, parts_left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if total == 0 {
            out.push(cur.clone());
            return;
        }
        if parts_left == 0 {
            return;
        }
        let cap = max_part.min(total);
        for p in (1..=cap).rev() {
            cur.push(p);
            rec(total - p, p, parts_left - 1, cur, out);
            cur.pop();
        }
    }
    for total in 1..=degree {
        let mut cur = Vec::new();
        rec(total, total, max_parts, &mut cur, &mut out);
    }
    out.sort_by_key(|p| (p.iter().sum::<u32>(), p.clone()));
    out
}

/// The symmetrized monomial for a partition: sum of `v^e` over all distinct
/// assignments of the parts to coordinates, normalized by the number of
/// assignments, in reduced form.
pub fn symmetrized_monomial(n: usize, partition: &[u32]) -> Result<SpherePoly> {
    if partition.len() > n {
        return Err(Error::invalid(format!(
            "partition has {} parts but only {} coordinates exist",
            partition.len(),
            n
        )));
    }
    let mut padded: Vec<u32> = partition.to_vec();
    padded.resize(n, 0);
    padded.sort_unstable_by(|a, b| b.cmp(a));
    let mut assignments = Vec::new();
    distinct_permutations(&padded, &mut assignments);
    let count = assignments.len() as f64;
    let mut out = SpherePoly::zero(n);
    for e in &assignments {
        out.add_term(e, 1.0 / count);
    }
    Ok(out)
}

/// All distinct permutations of a multiset of exponents (input sorted
/// descending), generated in lexicographic order.
fn distinct_permutations(sorted_desc: &[u32], out: &mut Vec<Vec<u32>>) {
    let n = sorted_desc.len();
    let mut values: Vec<u32> = sorted_desc.to_vec();
    values.sort_unstable();
    // next_permutation loop over the multiset
    out.push(values.clone());
    loop {
        // find longest non-increasing suffix
        let mut i = n as isize - 2;
        while i >= 0 && values[i as usize] >= values[i as usize + 1] {
            i -= 1;
        }
        if i < 0 {
            break;
        }
        let i = i as usize;
        let mut j = n - 1;
        while values[j] <= values[i] {
            j -= 1;
        }
        values.swap(i, j);
        values[i + 1..].reverse();
        out.push(values.clone());
    }
}

/// Basis of the permutation-invariant polynomials up to `degree`: one
/// symmetrized monomial per partition, pruned to a linearly independent set
/// by incremental Gram-Schmidt (the sphere constraint makes several
/// partitions coincide as functions).
pub fn symmetric_basis(n: usize, degree: u32) -> Result<Vec<(Vec<u32>, SpherePoly)>> {
    let parts = partitions_up_to(degree, n);
    let mut kept: Vec<(Vec<u32>, SpherePoly)> = Vec::new();
    let mut ortho: Vec<SpherePoly> = Vec::new();
    for part in parts {
        let cand = symmetrized_monomial(n, &part)?;
        let cand_norm2 = cand.norm_sq();
        if !(cand_norm2 > 0.0) {
            continue;
        }
        let mut resid = cand.clone();
        for q in &ortho {
            let proj = resid.inner(q) / q.norm_sq();
            resid.add_assign(q, -proj);
        }
        // Re-orthogonalize once; classical Gram-Schmidt alone loses accuracy.
        for q in &ortho {
            let proj = resid.inner(q) / q.norm_sq();
            resid.add_assign(q, -proj);
        }
        let r2 = resid.norm_sq();
        if r2 > 1e-10 * cand_norm2 {
            ortho.push(resid);
            kept.push((part, cand));
        }
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_moments_match_known_values() {
        // E[v1^2] = 1/N, E[v1^4] = 3/(N(N+2)), E[v1^2 v2^2] = 1/(N(N+2))
        for n in 2..8 {
            let nf = n as f64;
            assert_abs_diff_eq!(sphere_moment(n, &[2]), 1.0 / nf, epsilon = 1e-15);
            assert_abs_diff_eq!(sphere_moment(n, &[4]), 3.0 / (nf * (nf + 2.0)), epsilon = 1e-15);
            assert_abs_diff_eq!(sphere_moment(n, &[2, 2]), 1.0 / (nf * (nf + 2.0)), epsilon = 1e-15);
            assert_eq!(sphere_moment(n, &[1, 2]), 0.0);
            assert_eq!(sphere_moment(n, &[]), 1.0);
        }
        // E[v1^6] = 15/(N(N+2)(N+4))
        let nf = 5.0;
        assert_abs_diff_eq!(
            sphere_moment(5, &[6]),
            15.0 / (nf * (nf + 2.0) * (nf + 4.0)),
            epsilon = 1e-15
        );
    }

    #[test]
    fn sphere_moment_sum_rule() {
        // sum_i E[v_i^2 m(v)] = E[m(v)] for any monomial m
        for n in 3..6 {
            let base = [2u32, 1, 1];
            let mut lhs = 0.0;
            for i in 0..n {
                let mut e = vec![0u32; n];
                e[0] = base[0];
                e[1] = base[1];
                e[2] = base[2];
                e[i] += 2;
                lhs += sphere_moment(n, &e);
            }
            let mut e = vec![0u32; n];
            e[0] = base[0];
            e[1] = base[1];
            e[2] = base[2];
            assert_abs_diff_eq!(lhs, sphere_moment(n, &e), epsilon = 1e-15);
        }
    }

    #[test]
    fn trig_moments_uniform() {
        let rho = AngularDensity::uniform();
        assert_abs_diff_eq!(trig_moment(&rho, 0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trig_moment(&rho, 2, 0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(trig_moment(&rho, 0, 2), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(trig_moment(&rho, 2, 2), 1.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trig_moment(&rho, 4, 0), 3.0 / 8.0, epsilon = 1e-15);
        assert_eq!(trig_moment(&rho, 1, 1), 0.0);
        assert_eq!(trig_moment(&rho, 0, 3), 0.0);
        assert_abs_diff_eq!(trig_moment(&rho, 3, 0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn trig_moments_against_quadrature() {
        let rho = AngularDensity::from_unit_coeffs(&[0.4, -0.2, 0.1]).unwrap();
        let m = 1 << 15;
        for (p, q) in [(1, 0), (2, 0), (0, 2), (3, 1), (2, 2), (4, 0), (5, 2), (0, 6)] {
            let mut quad = 0.0;
            for i in 0..m {
                let theta = -PI + 2.0 * PI * i as f64 / m as f64;
                quad += theta.cos().powi(p) * theta.sin().powi(q) * rho.value(theta);
            }
            quad *= 2.0 * PI / m as f64;
            let exact = trig_moment(&rho, p as u32, q as u32);
            assert_abs_diff_eq!(exact, quad, epsilon = 1e-12);
        }
    }

    #[test]
    fn reduction_eliminates_last_coordinate_squares() {
        // v_3^2 = 1 - v_1^2 - v_2^2
        let p = SpherePoly::monomial(3, &[0, 0, 2], 1.0).unwrap();
        let mut expect = SpherePoly::constant(3, 1.0);
        expect.add_assign(&SpherePoly::monomial(3, &[2, 0, 0], 1.0).unwrap(), -1.0);
        expect.add_assign(&SpherePoly::monomial(3, &[0, 2, 0], 1.0).unwrap(), -1.0);
        let mut diff = p.clone();
        diff.add_assign(&expect, -1.0);
        assert!(diff.max_abs_coeff() < 1e-15, "diff {diff:?}");
    }

    #[test]
    fn sum_of_squares_is_one() {
        let n = 5;
        let mut sum = SpherePoly::zero(n);
        for i in 0..n {
            let mut e = vec![0u32; n];
            e[i] = 2;
            sum.add_assign(&SpherePoly::monomial(n, &e, 1.0).unwrap(), 1.0);
        }
        let mut diff = sum;
        diff.add_assign(&SpherePoly::constant(n, 1.0), -1.0);
        assert!(diff.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn multiplication_matches_integral() {
        // <v1^2, v1^2> = E[v1^4]
        let n = 4;
        let p = SpherePoly::monomial(n, &[2, 0, 0, 0], 1.0).unwrap();
        assert_abs_diff_eq!(p.norm_sq(), sphere_moment(n, &[4]), epsilon = 1e-15);
        // involving the reduced coordinate
        let q = SpherePoly::monomial(n, &[0, 0, 0, 1], 1.0).unwrap();
        assert_abs_diff_eq!(q.norm_sq(), 1.0 / n as f64, epsilon = 1e-15);
    }

    #[test]
    fn q_preserves_constants_and_mean() {
        let rho = AngularDensity::from_unit_coeffs(&[0.5]).unwrap();
        let one = SpherePoly::constant(4, 1.0);
        let q_one = q_apply(&rho, &one);
        let mut diff = q_one;
        diff.add_assign(&one, -1.0);
        assert!(diff.max_abs_coeff() < 1e-14);

        // Q is self-adjoint and preserves the sphere average of any poly.
        let f = SpherePoly::monomial(4, &[3, 1, 0, 0], 1.0).unwrap();
        let qf = q_apply(&rho, &f);
        assert_abs_diff_eq!(qf.integral(), f.integral(), epsilon = 1e-14);
    }

    #[test]
    fn q_is_self_adjoint() {
        let rho = AngularDensity::from_unit_coeffs(&[0.3, 0.1]).unwrap();
        let f = SpherePoly::monomial(3, &[2, 1, 0], 1.0).unwrap();
        let g = SpherePoly::monomial(3, &[0, 2, 1], 1.0).unwrap();
        let qf = q_apply(&rho, &f);
        let qg = q_apply(&rho, &g);
        assert_abs_diff_eq!(qf.inner(&g), f.inner(&qg), epsilon = 1e-14);
    }

    #[test]
    fn q_eigenvalue_on_quadratic_difference() {
        // On S^1 write (v1, v2) = (cos psi, sin psi); then v1^2 - v2^2 =
        // cos 2 psi, and the pair rotation shifts psi by -theta, so
        // Q f = E[cos 2 theta] f = pi a_2 f.
        let rho = AngularDensity::from_unit_coeffs(&[0.0, 0.5]).unwrap(); // cos-2theta moment 1/4
        let f = {
            let mut f = SpherePoly::monomial(2, &[2, 0], 1.0).unwrap();
            f.add_assign(&SpherePoly::monomial(2, &[0, 2], 1.0).unwrap(), -1.0);
            f
        };
        let qf = q_apply(&rho, &f);
        let mut expect = f.clone();
        expect.scale(0.25);
        let mut diff = qf;
        diff.add_assign(&expect, -1.0);
        assert!(diff.max_abs_coeff() < 1e-14, "{diff:?}");
    }

    #[test]
    fn p_fixes_single_coordinate_functions() {
        // P averages the N conditionals; on a function of v_1 alone the j=1
        // conditional acts as identity; check P 1 = 1 exactly.
        let one = SpherePoly::constant(5, 1.0);
        let p_one = p_apply(&one);
        let mut diff = p_one;
        diff.add_assign(&one, -1.0);
        assert!(diff.max_abs_coeff() < 1e-14);
    }

    #[test]
    fn p_matches_hand_value_on_v1_squared() {
        // P (v1^2) = (1/N)[ v1^2 + sum_{j != 1} E[v1^2 | v_j] ]
        //          = (1/N)[ v1^2 + sum_{j != 1} (1 - v_j^2)/(N-1) ]
        let n = 3;
        let f = SpherePoly::monomial(n, &[2, 0, 0], 1.0).unwrap();
        let pf = p_apply(&f);
        let mut expect = SpherePoly::monomial(n, &[2, 0, 0], 1.0 / 3.0).unwrap();
        for j in 1..3 {
            let mut e = vec![0u32; 3];
            expect.add_assign(&SpherePoly::constant(3, 1.0 / (3.0 * 2.0)), 1.0);
            e[j] = 2;
            expect.add_assign(&SpherePoly::monomial(3, &e, 1.0).unwrap(), -1.0 / (3.0 * 2.0));
        }
        let mut diff = pf;
        diff.add_assign(&expect, -1.0);
        assert!(diff.max_abs_coeff() < 1e-14, "{diff:?}");
    }

    #[test]
    fn p_is_self_adjoint_and_idempotent_on_averages() {
        let f = SpherePoly::monomial(4, &[2, 2, 0, 0], 1.0).unwrap();
        let g = SpherePoly::monomial(4, &[0, 0, 4, 0], 1.0).unwrap();
        let pf = p_apply(&f);
        let pg = p_apply(&g);
        assert_abs_diff_eq!(pf.inner(&g), f.inner(&pg), epsilon = 1e-14);
        assert_abs_diff_eq!(pf.integral(), f.integral(), epsilon = 1e-14);
    }

    #[test]
    fn full_basis_counts() {
        // reduced monomials degree <= d in n coords: vectors with last in {0,1}
        let b = full_basis(3, 2);
        // degree 0: 1; degree 1: v1, v2, v3; degree 2: v1^2, v1 v2, v1 v3,
        // v2^2, v2 v3 (v3^2 reduces) => 9 total
        assert_eq!(b.len(), 9);
        for p in &b {
            assert!(p.degree() <= 2);
        }
        let b4 = full_basis(3, 4);
        assert!(b4.len() > b.len());
    }

    #[test]
    fn partitions_enumerated_in_order() {
        let parts = partitions_up_to(4, 4);
        let expect: Vec<Vec<u32>> = vec![
            vec![],
            vec![1],
            vec![1, 1],
            vec![2],
            vec![1, 1, 1],
            vec![2, 1],
            vec![3],
            vec![1, 1, 1, 1],
            vec![2, 1, 1],
            vec![2, 2],
            vec![3, 1],
            vec![4],
        ];
        assert_eq!(parts, expect);
    }

    #[test]
    fn partitions_respect_max_parts() {
        let parts = partitions_up_to(4, 2);
        assert!(parts.iter().all(|p| p.len() <= 2));
        assert!(parts.contains(&vec![2, 2]));
        assert!(!parts.contains(&vec![1, 1, 1]));
    }

    #[test]
    fn symmetrized_monomial_is_permutation_invariant() {
        let s = symmetrized_monomial(4, &[2, 1]).unwrap();
        // cyclic shift
        let perm = vec![1, 2, 3, 0];
        let shifted = s.permute_coords(&perm);
        let mut diff = shifted;
        diff.add_assign(&s, -1.0);
        assert!(diff.max_abs_coeff() < 1e-14);
    }

    #[test]
    fn symmetric_basis_dimensions_small() {
        // On the sphere with the constraint, degree <= 4 symmetric functions:
        // N = 3 has one linear dependence more than N >= 4.
        let b3 = symmetric_basis(3, 4).unwrap();
        assert_eq!(b3.len(), 7, "partitions kept: {:?}", b3.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>());
        let b4 = symmetric_basis(4, 4).unwrap();
        assert_eq!(b4.len(), 8);
        let b5 = symmetric_basis(5, 4).unwrap();
        assert_eq!(b5.len(), 8);
    }

    #[test]
    fn symmetric_basis_degree_two() {
        // kept: 1, sum v_i, sum_{i<j} v_i v_j; sum v_i^2 = 1 collapses.
        let b = symmetric_basis(4, 2).unwrap();
        assert_eq!(b.len(), 3);
        assert!(b.iter().any(|(p, _)| p == &vec![1, 1]));
        assert!(!b.iter().any(|(p, _)| p == &vec![2]));
    }

    proptest! {
        #[test]
        fn prop_reduction_consistent_with_values(
            exps in proptest::collection::vec(0u32..4, 3),
            angles in proptest::collection::vec(-3.0f64..3.0, 2),
        ) {
            // evaluate monomial and its reduced form at a sphere point
            let p = SpherePoly::monomial(3, &exps, 1.0).unwrap();
            let (a, b) = (angles[0], angles[1]);
            let v = [a.cos() * b.cos(), a.cos() * b.sin(), a.sin()];
            let direct: f64 = v.iter().zip(&exps).map(|(x, &e)| x.powi(e as i32)).product();
            let mut reduced = 0.0;
            for (e, c) in p.terms() {
                let m: f64 = v.iter().zip(e).map(|(x, &ek)| x.powi(ek as i32)).product();
                reduced += c * m;
            }
            prop_assert!((direct - reduced).abs() < 1e-12);
        }

        #[test]
        fn prop_q_contracts_l2(
            e1 in 0u32..3, e2 in 0u32..3, e3 in 0u32..2,
        ) {
            let rho = AngularDensity::from_unit_coeffs(&[0.4]).unwrap();
            let n = 3;
            let mut f = SpherePoly::monomial(n, &[e1, e2, e3], 1.0).unwrap();
            // remove the mean so we test the contraction on the orthogonal part
            let mean = f.integral();
            f.add_assign(&SpherePoly::constant(n, mean), -1.0);
            if f.norm_sq() > 1e-12 {
                let qf = q_apply(&rho, &f);
                prop_assert!(qf.norm_sq() <= f.norm_sq() * (1.0 + 1e-12));
            }
        }
    }
}
