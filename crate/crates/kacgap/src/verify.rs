//! Independent oracles that re-derive the closed-form results on small
//! instances: restricted polynomial matrices for the pair-average and
//! coordinate-average operators on the sphere, full permutation-matrix
//! spectra, discretized single-pair correlation operators, collision-kernel
//! eigenfunction residuals, and one-dimensional marginal quadratures. The
//! `run_suite` entry points bundle these into named check suites.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::density::AngularDensity;
use crate::gap::{
    eighth_degree_product_closed_form, eighth_degree_product_limit, gap_recursion_lower,
    kac_product_closed_form, kac_quartic_eigenvalue, lambda2_kac, moment_scan_cap,
    theorem71_check,
};
use crate::jsonfmt::f17;
use crate::linalg::{cholesky_lower, generalized_symmetric_eigen, symmetric_eigen, Mat};
use crate::model::{ModelSpec, WalkState};
use crate::poly::{
    full_basis, p_apply, q_apply, sphere_moment, symmetric_basis, Sector, SpherePoly,
};
use crate::quad::{gauss_jacobi, gauss_legendre, orthonormal_jacobi_values};
use crate::spectra::{
    boltzmann_lambda, boltzmann_lambda_closed, boltzmann_max_ell, boltzmann_mu_bound, kac_alpha,
    kac_kappa, son_zonal_ratio, Multiplicity, SpectrumEntry, SpectrumTable,
};
use crate::special::ln_beta;
use crate::{Error, Result};
use serde::Serialize;

const MAX_RESTRICTED_DIM: usize = 2000;
const MAX_RESTRICTED_DEGREE: u32 = 8;

/// An operator compressed onto a finite polynomial basis on the sphere:
/// `gram[a][b] = <m_a, m_b>` and `action[a][b] = <m_a, Op m_b>`, both under
/// the uniform sphere measure, so the operator's restricted eigenvalues are
/// those of the pencil `action x = lambda gram x`.
pub struct RestrictedOperator {
    /// Exponent multi-indices (full sector) or partitions (symmetric sector)
    /// labelling the basis elements; the first entry is the constant.
    pub basis: Vec<Vec<u32>>,
    pub sector: Sector,
    pub gram: Mat,
    pub action: Mat,
}

impl RestrictedOperator {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Gram positive-definite, action symmetric (the operator is
    /// self-adjoint) and fixing the constant with eigenvalue 1.
    pub fn validate(&self) -> Result<()> {
        cholesky_lower(&self.gram)
            .map_err(|e| Error::numerical(format!("gram matrix is not positive definite: {e}")))?;
        let scale = self.action.max_abs().max(1.0);
        if self.action.asymmetry() > 1e-10 * scale {
            return Err(Error::numerical(format!(
                "restricted action is not self-adjoint: asymmetry {:.3e}",
                self.action.asymmetry()
            )));
        }
        // Op 1 = 1 makes the constant column of the action equal the
        // constant column of the gram.
        for a in 0..self.dim() {
            let dev = (self.action[(a, 0)] - self.gram[(a, 0)]).abs();
            if dev > 1e-12 * scale {
                return Err(Error::numerical(format!(
                    "constant function is not fixed: row {a} deviates by {dev:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Eigenvalues of the pencil, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(generalized_symmetric_eigen(&self.action, &self.gram, false)?.values)
    }

    /// Second-largest eigenvalue; checks the top one is 1.
    pub fn second_eigenvalue(&self) -> Result<f64> {
        let vals = self.eigenvalues()?;
        if vals.len() < 2 {
            return Err(Error::invalid("basis too small for a second eigenvalue"));
        }
        let top = vals[vals.len() - 1];
        if (top - 1.0).abs() > 1e-9 {
            return Err(Error::numerical(format!(
                "top restricted eigenvalue {top:.17} is not 1"
            )));
        }
        Ok(vals[vals.len() - 2])
    }
}

fn sector_basis(
    n_particles: usize,
    degree: u32,
    sector: Sector,
) -> Result<(Vec<Vec<u32>>, Vec<SpherePoly>)> {
    if n_particles < 2 {
        return Err(Error::invalid("restricted operators need at least 2 coordinates"));
    }
    if degree > MAX_RESTRICTED_DEGREE {
        return Err(Error::invalid(format!(
            "restricted bases are limited to degree {MAX_RESTRICTED_DEGREE}"
        )));
    }
    let (labels, polys): (Vec<Vec<u32>>, Vec<SpherePoly>) = match sector {
        Sector::Full => {
            let polys = full_basis(n_particles, degree);
            let labels = polys
                .iter()
                .map(|p| p.terms().next().expect("monomial basis").0.clone())
                .collect();
            (labels, polys)
        }
        Sector::Symmetric => {
            let kept = symmetric_basis(n_particles, degree)?;
            kept.into_iter().unzip()
        }
    };
    if polys.len() > MAX_RESTRICTED_DIM {
        return Err(Error::invalid(format!(
            "restricted basis of dimension {} exceeds the {MAX_RESTRICTED_DIM} guard",
            polys.len()
        )));
    }
    Ok((labels, polys))
}

fn assemble(
    labels: Vec<Vec<u32>>,
    basis: Vec<SpherePoly>,
    sector: Sector,
    images: Vec<SpherePoly>,
) -> Result<RestrictedOperator> {
    let dim = basis.len();
    let mut gram = Mat::zeros(dim, dim);
    let mut action = Mat::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            if b >= a {
                let g = basis[a].inner(&basis[b]);
                gram[(a, b)] = g;
                gram[(b, a)] = g;
            }
            action[(a, b)] = basis[a].inner(&images[b]);
        }
    }
    let op = RestrictedOperator { basis: labels, sector, gram, action };
    op.validate()?;
    Ok(op)
}

/// Pair-average operator compressed to polynomials of total degree at most
/// `degree`, assembled exactly from trigonometric and sphere moments.
pub fn build_restricted_q(
    n_particles: usize,
    rho: &AngularDensity,
    degree: u32,
    sector: Sector,
) -> Result<RestrictedOperator> {
    rho.validate()?;
    let (labels, basis) = sector_basis(n_particles, degree, sector)?;
    let images: Vec<SpherePoly> = basis.par_iter().map(|b| q_apply(rho, b)).collect();
    assemble(labels, basis, sector, images)
}

/// Coordinate-average operator (mean of the N single-coordinate conditional
/// expectations) compressed to the same bases.
pub fn build_restricted_p(
    n_particles: usize,
    degree: u32,
    sector: Sector,
) -> Result<RestrictedOperator> {
    let (labels, basis) = sector_basis(n_particles, degree, sector)?;
    let images: Vec<SpherePoly> = basis.par_iter().map(p_apply).collect();
    assemble(labels, basis, sector, images)
}

/// The centered quartic sum `sum_j (v_j^4 - 3/(N(N+2)))`.
pub fn quartic_vector(n_particles: usize) -> Result<SpherePoly> {
    if n_particles < 2 {
        return Err(Error::invalid("quartic sum needs at least 2 coordinates"));
    }
    let nf = n_particles as f64;
    let mut f = SpherePoly::constant(n_particles, -3.0 / (nf + 2.0));
    let mut exps = vec![0u32; n_particles];
    for j in 0..n_particles {
        exps[j] = 4;
        f.add_term(&exps, 1.0);
        exps[j] = 0;
    }
    Ok(f)
}

/// L2 norm of `Q f - lambda f` for the centered quartic sum and its
/// closed-form eigenvalue; zero up to rounding for every density.
pub fn quartic_residual(rho: &AngularDensity, n_particles: usize) -> Result<f64> {
    let f = quartic_vector(n_particles)?;
    let lambda = kac_quartic_eigenvalue(rho, n_particles)?;
    let mut resid = q_apply(rho, &f);
    resid.add_assign(&f, -lambda);
    Ok(resid.norm_sq().max(0.0).sqrt())
}

/// Degree-4 eigenfunction of the single-pair correlation operator:
/// `h(u) = u^4 + c2 u^2 + c0`, fixed by orthogonality to 1 and `u^2` under
/// the single-coordinate marginal (which makes it the degree-4 orthogonal
/// polynomial, hence an eigenfunction with eigenvalue kappa_N).
pub fn k_degree4_eigenfunction(n_particles: usize) -> Result<(f64, f64)> {
    if n_particles < 3 {
        return Err(Error::invalid("marginal eigenfunction needs at least 3 coordinates"));
    }
    let m2 = sphere_moment(n_particles, &[2]);
    let m4 = sphere_moment(n_particles, &[4]);
    let m6 = sphere_moment(n_particles, &[6]);
    // <h,1> = m4 + c2 m2 + c0 = 0 ; <h,u^2> = m6 + c2 m4 + c0 m2 = 0
    let det = m2 * m2 - m4;
    if det.abs() < 1e-300 {
        return Err(Error::numerical("degenerate moment system"));
    }
    let c2 = (m6 - m2 * m4) / det;
    let c0 = -(m4 + c2 * m2);
    Ok((c0, c2))
}

/// Max coefficient of `P phi - mu phi` relative to `phi` where
/// `phi = sum_j h(v_j)` for the degree-4 eigenfunction `h` and
/// `mu = (1 + (N-1) kappa_N)/N`: the coordinate-average operator's second
/// eigenvector built by transfer from the single-pair spectrum.
pub fn transfer_eigenvector_residual(n_particles: usize) -> Result<f64> {
    let (c0, c2) = k_degree4_eigenfunction(n_particles)?;
    let nf = n_particles as f64;
    let mut phi = SpherePoly::constant(n_particles, nf * c0);
    let mut exps = vec![0u32; n_particles];
    for j in 0..n_particles {
        exps[j] = 4;
        phi.add_term(&exps, 1.0);
        exps[j] = 2;
        phi.add_term(&exps, c2);
        exps[j] = 0;
    }
    let mu = (1.0 + (nf - 1.0) * kac_kappa(n_particles)?) / nf;
    let mut resid = p_apply(&phi);
    resid.add_assign(&phi, -mu);
    Ok(resid.max_abs_coeff() / phi.max_abs_coeff())
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Full spectrum of the lazy random-transposition walk from its N! x N!
/// transition matrix, with equal eigenvalues merged into one entry each.
pub fn shuffle_q_bruteforce(n_positions: usize, p: f64) -> Result<SpectrumTable> {
    if !(2..=7).contains(&n_positions) {
        return Err(Error::invalid("brute-force spectra are limited to 2 <= N <= 7"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("success probability {p} outside (0, 1]")));
    }
    let perms = all_permutations(n_positions);
    let index: HashMap<&[usize], usize> =
        perms.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let size = perms.len();
    let pairs = n_positions * (n_positions - 1) / 2;
    let step = p / pairs as f64;
    let mut q = Mat::zeros(size, size);
    let mut scratch = vec![0usize; n_positions];
    for (s, perm) in perms.iter().enumerate() {
        q[(s, s)] += 1.0 - p;
        for a in 0..n_positions {
            for b in a + 1..n_positions {
                scratch.copy_from_slice(perm);
                scratch.swap(a, b);
                let t = index[scratch.as_slice()];
                q[(s, t)] += step;
            }
        }
    }
    let eig = symmetric_eigen(&q, false)?;
    let mut values = eig.values;
    values.reverse(); // descending
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for v in values {
        match entries.last_mut() {
            Some(last) if (last.value - v).abs() < 1e-7 => {
                let Multiplicity::Count(c) = last.multiplicity else { unreachable!() };
                last.multiplicity = Multiplicity::Count(c + 1);
            }
            _ => entries.push(SpectrumEntry {
                n: None,
                l: None,
                class: None,
                value: v,
                multiplicity: Multiplicity::Count(1),
            }),
        }
    }
    let table = SpectrumTable {
        model: "shuffle-bruteforce".into(),
        n_particles: n_positions,
        entries,
        scan_bounds: None,
    };
    table.validate()?;
    Ok(table)
}

/// Gap and second-eigenvalue multiplicity straight off a brute-force table.
pub fn shuffle_bruteforce_gap(table: &SpectrumTable) -> Result<(f64, u64)> {
    if table.entries.len() < 2 {
        return Err(Error::numerical("brute-force spectrum collapsed to one eigenvalue"));
    }
    let second = &table.entries[1];
    let Multiplicity::Count(mult) = second.multiplicity else {
        return Err(Error::numerical("brute-force multiplicities must be counts"));
    };
    Ok((table.n_particles as f64 * (1.0 - second.value), mult))
}

/// Galerkin discretization of the single-pair correlation operator for the
/// sphere walk: `(K g)(v) = E[g(sqrt(1-v^2) z)]` with `z` drawn from the
/// one-lower-dimensional coordinate marginal. Assembled in the orthonormal
/// polynomial basis of the N-dimensional marginal, where the matrix is the
/// exact restriction of K to polynomials of degree <= 12, so its eigenvalues
/// must reproduce the closed-form spectrum.
pub fn kac_k_quadrature(n_particles: usize, grid: usize) -> Result<SpectrumTable> {
    kac_k_quadrature_gate(n_particles, grid, 1e-8)
}

/// Same discretization with a caller-chosen gate on the worst deviation
/// from the closed-form spectrum.
pub fn kac_k_quadrature_gate(n_particles: usize, grid: usize, tol: f64) -> Result<SpectrumTable> {
    if n_particles < 4 {
        return Err(Error::invalid(
            "the inner marginal weight needs N >= 4; smaller N has no density form",
        ));
    }
    if grid < 64 {
        return Err(Error::invalid("quadrature grid must have at least 64 nodes"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("deviation gate must be positive"));
    }
    const MAX_DEGREE: usize = 12;
    let nf = n_particles as f64;
    let a_out = (nf - 3.0) / 2.0;
    let a_in = (nf - 4.0) / 2.0;
    let outer = gauss_jacobi(grid, a_out, a_out)?;
    let inner = gauss_jacobi(grid, a_in, a_in)?;
    let w_out: f64 = outer.weights.iter().sum();
    let w_in: f64 = inner.weights.iter().sum();

    let dim = MAX_DEGREE + 1;
    let mut m = Mat::zeros(dim, dim);
    for (&v, &wv) in outer.nodes.iter().zip(&outer.weights) {
        let pa = orthonormal_jacobi_values(MAX_DEGREE, a_out, a_out, v)?;
        let scale = (1.0 - v * v).max(0.0).sqrt();
        let mut kp = vec![0.0; dim];
        for (&z, &wz) in inner.nodes.iter().zip(&inner.weights) {
            let pb = orthonormal_jacobi_values(MAX_DEGREE, a_out, a_out, scale * z)?;
            for (k, &val) in pb.iter().enumerate() {
                kp[k] += wz * val;
            }
        }
        for b in 0..dim {
            let kpb = kp[b] / w_in;
            for a in 0..dim {
                m[(a, b)] += wv / w_out * pa[a] * kpb;
            }
        }
    }
    let eig = symmetric_eigen(&m, false)?;
    let mut computed = eig.values;
    computed.reverse();

    let mut expected: Vec<(usize, f64)> = (0..dim)
        .map(|n| Ok((n, kac_alpha(n_particles, n)?)))
        .collect::<Result<_>>()?;
    expected.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite"));
    let mut entries = Vec::with_capacity(dim);
    let mut worst: f64 = 0.0;
    for (&got, &(deg, want)) in computed.iter().zip(&expected) {
        worst = worst.max((got - want).abs());
        entries.push(SpectrumEntry {
            n: Some(deg),
            l: None,
            class: None,
            value: got,
            multiplicity: Multiplicity::Count(1),
        });
    }
    if worst > tol {
        return Err(Error::numerical(format!(
            "discretized spectrum misses the closed form by {worst:.3e}; grid too small"
        )));
    }
    let table = SpectrumTable {
        model: "kac-k-quadrature".into(),
        n_particles,
        entries,
        scan_bounds: None,
    };
    table.validate()?;
    Ok(table)
}

/// Value of the degree-n entry of a quadrature table.
pub fn table_value(table: &SpectrumTable, n: usize) -> Result<f64> {
    table
        .entries
        .iter()
        .find(|e| e.n == Some(n))
        .map(|e| e.value)
        .ok_or_else(|| Error::invalid(format!("no degree-{n} entry in the table")))
}

/// Solid-harmonic ladder: `R_l(v) = |v|^l P_l(cos angle(v, e_z))`, a
/// polynomial in v.
fn solid_harmonic(v: [f64; 3], ell: usize) -> f64 {
    let t = v[2];
    let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let mut prev = 1.0;
    if ell == 0 {
        return prev;
    }
    let mut cur = t;
    for l in 1..ell {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * t * cur - lf * r2 * prev) / (lf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Max deviation of the collision kernel applied by ball quadrature to the
/// product eigenfunction `J_n(2|v|^2-1) |v|^l P_l` from `lambda_{n,l}` times
/// that eigenfunction, over a deterministic sample of points; normalized by
/// the largest sampled |eigenfunction| value.
pub fn boltzmann_eigen_residual(
    n_particles: usize,
    n: usize,
    ell: usize,
    samples: usize,
) -> Result<f64> {
    if n_particles < 4 {
        return Err(Error::invalid("the kernel form needs N >= 4"));
    }
    if samples < 4 {
        return Err(Error::invalid("need at least 4 sample points"));
    }
    let lambda = boltzmann_lambda(n_particles, n, ell)?;
    let nf = n_particles as f64;
    let alpha = (3.0 * nf - 8.0) / 2.0;
    let beta = ell as f64 + 0.5;

    let eigenfunction = |v: [f64; 3]| -> Result<f64> {
        let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let radial = orthonormal_jacobi_values(n, alpha, beta, (2.0 * r2 - 1.0).clamp(-1.0, 1.0))?[n];
        Ok(radial * solid_harmonic(v, ell))
    };

    // Ball quadrature for the weight (1-|y|^2)^((3N-11)/2): Gauss-Jacobi in
    // t = 2|y|^2 - 1 against the sphere product rule in the direction.
    let radial = gauss_jacobi(32, (3.0 * nf - 11.0) / 2.0, 0.5)?;
    let polar = gauss_legendre(24)?;
    let n_phi = 48usize;
    let mut directions = Vec::with_capacity(polar.nodes.len() * n_phi);
    for (&c, &wc) in polar.nodes.iter().zip(&polar.weights) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            directions.push(([s * phi.cos(), s * phi.sin(), c], wc));
        }
    }
    let c_mix = (nf * nf - 2.0 * nf).sqrt() / (nf - 1.0);
    let back = 1.0 / (nf - 1.0);

    let apply_kernel = |v: [f64; 3]| -> Result<f64> {
        let stretch = c_mix * (1.0 - (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).max(0.0).sqrt();
        let mut num = 0.0;
        let mut den = 0.0;
        for (&t, &wr) in radial.nodes.iter().zip(&radial.weights) {
            let r = (0.5 * (1.0 + t)).max(0.0).sqrt();
            for &(d, wd) in &directions {
                let u = [
                    stretch * r * d[0] - back * v[0],
                    stretch * r * d[1] - back * v[1],
                    stretch * r * d[2] - back * v[2],
                ];
                let w = wr * wd;
                num += w * eigenfunction(u)?;
                den += w;
            }
        }
        Ok(num / den)
    };

    // Deterministic point set: spiral directions at staggered radii.
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..samples {
        let frac = (i as f64 + 0.5) / samples as f64;
        let z = 1.0 - 2.0 * frac;
        let s = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        let radius = 0.92 * frac.sqrt().max(0.15);
        let v = [radius * s * phi.cos(), radius * s * phi.sin(), radius * z];
        let g = eigenfunction(v)?;
        let kg = apply_kernel(v)?;
        worst = worst.max((kg - lambda * g).abs());
        scale = scale.max(g.abs());
    }
    if !(scale > 0.0) {
        return Err(Error::numerical("eigenfunction vanished on the whole sample"));
    }
    Ok(worst / scale)
}

/// Two-particle walk spectrum: on the circle the pair rotation acts by
/// convolution, so the eigenvalues are exactly the density's cosine moments
/// (each doubled for k >= 1 by the sine/cosine pair).
pub fn fourier_q2_spectrum(rho: &AngularDensity, k_max: usize) -> Result<SpectrumTable> {
    rho.validate()?;
    if k_max == 0 {
        return Err(Error::invalid("need at least one nonzero frequency"));
    }
    let mut entries: Vec<SpectrumEntry> = (0..=k_max)
        .map(|k| SpectrumEntry {
            n: Some(k),
            l: None,
            class: None,
            value: rho.cosine_moment(k),
            multiplicity: Multiplicity::Count(if k == 0 { 1 } else { 2 }),
        })
        .collect();
    let sup = entries[1..]
        .iter()
        .map(|e| e.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let scan = moment_scan_cap(rho).max(k_max);
    let lambda2 = lambda2_kac(rho, scan)?;
    if k_max >= moment_scan_cap(rho) && (lambda2 - sup.max(0.0)).abs() > 1e-12 {
        return Err(Error::numerical(format!(
            "moment supremum {sup:.17e} disagrees with the two-particle eigenvalue {lambda2:.17e}"
        )));
    }
    entries.sort_by(|a, b| b.value.partial_cmp(&a.value).expect("finite").then(a.n.cmp(&b.n)));
    let table = SpectrumTable {
        model: "fourier-two-particle".into(),
        n_particles: 2,
        entries,
        scan_bounds: None,
    };
    table.validate()?;
    Ok(table)
}

/// Even moment of one sphere coordinate computed by one-dimensional
/// Gauss-Jacobi quadrature of the marginal density (1-v^2)^((N-3)/2) --
/// an oracle for the closed-form `sphere_moment`.
pub fn sphere_marginal_moment(n_particles: usize, order: u32) -> Result<f64> {
    if n_particles < 2 {
        return Err(Error::invalid("marginal density needs at least 2 coordinates"));
    }
    let a = (n_particles as f64 - 3.0) / 2.0;
    let rule = gauss_jacobi(64, a, a)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        num += w * x.powi(order as i32);
        den += w;
    }
    Ok(num / den)
}

/// Even moment `E[|v|^order]` of the collision model's single-velocity
/// marginal on the unit ball, density (1-|v|^2)^((3N-8)/2), by radial
/// Gauss-Jacobi quadrature.
pub fn boltzmann_marginal_moment(n_particles: usize, order: u32) -> Result<f64> {
    if n_particles < 3 {
        return Err(Error::invalid("the ball marginal needs at least 3 particles"));
    }
    if order % 2 == 1 {
        return Err(Error::invalid("only even moments are polynomial in the radial variable"));
    }
    let a = (3.0 * n_particles as f64 - 8.0) / 2.0;
    let rule = gauss_jacobi(64, a, 0.5)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let s = 0.5 * (1.0 + t); // |v|^2
        num += w * s.powi((order / 2) as i32);
        den += w;
    }
    Ok(num / den)
}

/// Closed form of the same moment through Beta integrals.
pub fn boltzmann_marginal_moment_closed(n_particles: usize, order: u32) -> Result<f64> {
    if n_particles < 3 || order % 2 == 1 {
        return Err(Error::invalid("even orders and N >= 3 only"));
    }
    let b = (3.0 * n_particles as f64 - 6.0) / 2.0;
    let k = (order / 2) as f64;
    Ok((ln_beta(k + 1.5, b) - ln_beta(1.5, b)).exp())
}

/// One verification check: a computed quantity against its independently
/// known value. `paper_ref` names the result being checked.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyCheck {
    pub check_id: String,
    pub paper_ref: String,
    #[serde(serialize_with = "f17")]
    pub computed: f64,
    #[serde(serialize_with = "f17")]
    pub expected: f64,
    #[serde(serialize_with = "f17")]
    pub tolerance: f64,
    pub pass: bool,
}

impl VerifyCheck {
    pub fn close(
        id: impl Into<String>,
        what: impl Into<String>,
        computed: f64,
        expected: f64,
        tol: f64,
    ) -> Self {
        VerifyCheck {
            check_id: id.into(),
            paper_ref: what.into(),
            computed,
            expected,
            tolerance: tol,
            pass: (computed - expected).abs() <= tol,
        }
    }

    pub fn at_most(id: impl Into<String>, what: impl Into<String>, computed: f64, bound: f64) -> Self {
        VerifyCheck {
            check_id: id.into(),
            paper_ref: what.into(),
            computed,
            expected: bound,
            tolerance: 0.0,
            pass: computed <= bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<VerifyCheck>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<VerifyCheck>) -> Self {
        let passed = checks.iter().all(|c| c.pass);
        SuiteReport { suite: suite.into(), checks, passed }
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "kac-small-n",
    "shuffle-bruteforce",
    "boltzmann-eigen",
    "marginals",
    "recursion-consistency",
    "theorem71",
];

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "kac-small-n" => suite_kac_small_n(),
        "shuffle-bruteforce" => suite_shuffle_bruteforce(),
        "boltzmann-eigen" => suite_boltzmann_eigen(),
        "marginals" => suite_marginals(),
        "recursion-consistency" => suite_recursion_consistency(),
        "theorem71" => suite_theorem71(),
        other => Err(Error::invalid(format!(
            "unknown suite '{other}'; available: {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

fn suite_kac_small_n() -> Result<SuiteReport> {
    let uniform = AngularDensity::uniform();
    let mut checks = Vec::new();

    // Restricted pair-average matrices reproduce the closed-form gap.
    let mut lambda = HashMap::new();
    for n in 2..=6usize {
        let q = build_restricted_q(n, &uniform, 4, Sector::Symmetric)?;
        let second = q.second_eigenvalue()?;
        lambda.insert(n, second);
        if n == 2 {
            checks.push(VerifyCheck::close(
                "q-matrix-second-N2",
                "two-particle walk has no nontrivial polynomial eigenvalue for the flat density",
                second,
                0.0,
                1e-10,
            ));
        } else {
            let nf = n as f64;
            checks.push(VerifyCheck::close(
                format!("gap-matrix-N{n}"),
                "sphere-walk gap from the degree-4 restricted matrix vs (1/2)(N+2)/(N-1)",
                nf * (1.0 - second),
                0.5 * (nf + 2.0) / (nf - 1.0),
                1e-9,
            ));
        }
    }

    // Coordinate-average matrices reproduce the transfer formula, and the
    // one-step recursion identity connects consecutive N.
    for n in 3..=5usize {
        let p = build_restricted_p(n, 4, Sector::Symmetric)?;
        let mu = p.second_eigenvalue()?;
        let nf = n as f64;
        checks.push(VerifyCheck::close(
            format!("transfer-matrix-N{n}"),
            "coordinate-average second eigenvalue vs (1+(N-1)kappa)/N",
            mu,
            (1.0 + (nf - 1.0) * kac_kappa(n)?) / nf,
            1e-10,
        ));
        let prev = lambda[&(n - 1)];
        checks.push(VerifyCheck::close(
            format!("recursion-equality-N{n}"),
            "walk eigenvalue equals previous level plus transfer step (equality case)",
            lambda[&n],
            prev + (1.0 - prev) * mu,
            1e-10,
        ));
        checks.push(VerifyCheck::close(
            format!("transfer-eigenvector-N{n}"),
            "sum of marginal eigenfunctions is the transfer eigenvector",
            transfer_eigenvector_residual(n)?,
            0.0,
            1e-10,
        ));
    }

    // The centered quartic sum is an exact eigenfunction for every density.
    let densities: [(&str, AngularDensity); 3] = [
        ("uniform", AngularDensity::uniform()),
        ("a2", AngularDensity::from_unit_coeffs(&[0.0, 0.5])?),
        ("a4", AngularDensity::from_unit_coeffs(&[0.0, 0.0, 0.0, 0.5])?),
    ];
    for n in 3..=5usize {
        for (tag, rho) in &densities {
            checks.push(VerifyCheck::close(
                format!("quartic-residual-N{n}-{tag}"),
                "centered quartic sum is an eigenfunction of the pair average",
                quartic_residual(rho, n)?,
                0.0,
                1e-10,
            ));
        }
    }

    // Discretized single-pair operator vs the closed-form spectrum.
    for n in 4..=12usize {
        let table = kac_k_quadrature(n, 64)?;
        let nf = n as f64;
        checks.push(VerifyCheck::close(
            format!("k-quadrature-kappa-N{n}"),
            "largest nontrivial single-pair eigenvalue vs 3/(N^2-1)",
            table_value(&table, 4)?,
            3.0 / (nf * nf - 1.0),
            1e-8,
        ));
        checks.push(VerifyCheck::close(
            format!("k-quadrature-alpha2-N{n}"),
            "degree-2 single-pair eigenvalue vs -1/(N-1)",
            table_value(&table, 2)?,
            -1.0 / (nf - 1.0),
            1e-8,
        ));
        checks.push(VerifyCheck::close(
            format!("k-quadrature-alpha6-N{n}"),
            "degree-6 single-pair eigenvalue vs -15/((N-1)(N+1)(N+3))",
            table_value(&table, 6)?,
            -15.0 / ((nf - 1.0) * (nf + 1.0) * (nf + 3.0)),
            1e-8,
        ));
        checks.push(VerifyCheck::close(
            format!("k-quadrature-alpha8-N{n}"),
            "degree-8 single-pair eigenvalue vs 105/((N-1)(N+1)(N+3)(N+5))",
            table_value(&table, 8)?,
            105.0 / ((nf - 1.0) * (nf + 1.0) * (nf + 3.0) * (nf + 5.0)),
            1e-8,
        ));
    }

    // Circle Fourier analysis at N = 2.
    let flat = fourier_q2_spectrum(&uniform, 8)?;
    checks.push(VerifyCheck::close(
        "fourier-flat-lambda2",
        "flat density has vanishing nonzero-frequency moments",
        flat.entries[1].value,
        0.0,
        1e-15,
    ));
    let cos4 = AngularDensity::from_unit_coeffs(&[0.0, 0.0, 0.0, 1.0])?;
    let table4 = fourier_q2_spectrum(&cos4, 8)?;
    checks.push(VerifyCheck::close(
        "fourier-cos4-moment",
        "pure degree-4 density has moment 1/2 at frequency 4",
        table_value(&table4, 4)?,
        0.5,
        1e-15,
    ));

    Ok(SuiteReport::new("kac-small-n", checks))
}

fn suite_shuffle_bruteforce() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for n in 2..=6usize {
        for p in [0.25, 0.5, 1.0] {
            let table = shuffle_q_bruteforce(n, p)?;
            let (gap, mult) = shuffle_bruteforce_gap(&table)?;
            let nf = n as f64;
            checks.push(VerifyCheck::close(
                format!("shuffle-gap-N{n}-p{p:.2}"),
                "brute-force transposition-walk gap vs 2pN/(N-1)",
                gap,
                2.0 * p * nf / (nf - 1.0),
                1e-10,
            ));
            checks.push(VerifyCheck::close(
                format!("shuffle-mult-N{n}-p{p:.2}"),
                "second-eigenvalue multiplicity vs (N-1)^2",
                mult as f64,
                ((n - 1) * (n - 1)) as f64,
                0.0,
            ));
        }
    }
    Ok(SuiteReport::new("shuffle-bruteforce", checks))
}

fn suite_boltzmann_eigen() -> Result<SuiteReport> {
    let mut checks = Vec::new();

    // Recurrence route vs integral representation, and vs closed forms.
    for n_particles in 4..=12usize {
        let mut route_worst = 0.0f64;
        let mut closed_worst = 0.0f64;
        let ell_hi = boltzmann_max_ell(n_particles)?.min(4);
        for ell in 0..=ell_hi {
            for n in 0..=6usize {
                let jac = boltzmann_lambda(n_particles, n, ell)?;
                let idx = crate::spectra::JacobiIndex::boltzmann(n_particles, n, ell)?;
                let koorn = crate::spectra::koornwinder_ratio(
                    idx,
                    crate::spectra::boltzmann_x(n_particles),
                )?;
                let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
                let koorn_lambda =
                    koorn * sign / (n_particles as f64 - 1.0).powi(ell as i32);
                route_worst = route_worst.max((jac - koorn_lambda).abs());
                if n <= 2 {
                    closed_worst = closed_worst
                        .max((jac - boltzmann_lambda_closed(n_particles, n, ell)?).abs());
                }
            }
        }
        checks.push(VerifyCheck::at_most(
            format!("route-agreement-N{n_particles}"),
            "recurrence and integral-representation eigenvalue routes agree",
            route_worst,
            1e-8,
        ));
        checks.push(VerifyCheck::at_most(
            format!("closed-forms-N{n_particles}"),
            "low-degree closed forms match the recurrence route",
            closed_worst,
            1e-12,
        ));
    }

    // Kernel quadrature residuals at N = 5.
    for (n, ell, tol) in [(0usize, 1usize, 1e-8), (1, 0, 1e-6), (2, 0, 1e-6)] {
        checks.push(VerifyCheck::at_most(
            format!("kernel-residual-n{n}-l{ell}"),
            "ball-quadrature kernel action matches the eigenvalue",
            boltzmann_eigen_residual(5, n, ell, 24)?,
            tol,
        ));
    }

    // Modulus bound dominates every eigenvalue and decreases along n.
    for n_particles in [5usize, 8, 12] {
        let ell_hi = boltzmann_max_ell(n_particles)?.min(3);
        let mut domination = f64::NEG_INFINITY;
        let mut chain = f64::NEG_INFINITY;
        for ell in 0..=ell_hi {
            let mut prev_mu: Option<f64> = None;
            for n in 0..=6usize {
                let mu = boltzmann_mu_bound(n_particles, n, ell)?;
                if n >= 1 {
                    let lam = boltzmann_lambda(n_particles, n, ell)?;
                    domination = domination.max(lam.abs() - mu);
                }
                if let Some(p) = prev_mu {
                    chain = chain.max(mu - p);
                }
                prev_mu = Some(mu);
            }
        }
        checks.push(VerifyCheck::at_most(
            format!("modulus-domination-N{n_particles}"),
            "integral modulus bound strictly dominates the eigenvalues",
            domination,
            0.0,
        ));
        checks.push(VerifyCheck::at_most(
            format!("modulus-chain-N{n_particles}"),
            "modulus bound strictly decreases along the radial index",
            chain,
            0.0,
        ));
    }

    Ok(SuiteReport::new("boltzmann-eigen", checks))
}

fn suite_marginals() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for n in [3usize, 5, 10] {
        for order in [2u32, 4, 6, 8] {
            checks.push(VerifyCheck::close(
                format!("sphere-marginal-N{n}-m{order}"),
                "one-coordinate sphere moment: quadrature vs closed form",
                sphere_marginal_moment(n, order)?,
                sphere_moment(n, &[order]),
                1e-10,
            ));
        }
    }
    for n in [4usize, 5] {
        for order in [2u32, 4, 6] {
            checks.push(VerifyCheck::close(
                format!("ball-marginal-N{n}-m{order}"),
                "single-velocity ball moment: quadrature vs Beta closed form",
                boltzmann_marginal_moment(n, order)?,
                boltzmann_marginal_moment_closed(n, order)?,
                1e-12,
            ));
        }
    }

    // Monte Carlo bridge: the simulator's stationary draws reproduce the
    // marginal moments within three standard errors.
    let mut rng = ChaCha12Rng::seed_from_u64(0x6d61_7267);
    let sphere = ModelSpec::kac_uniform(5);
    let mut acc2 = MomentAccumulator::default();
    let mut acc4 = MomentAccumulator::default();
    for _ in 0..40_000 {
        let state = crate::simulate::sample_stationary(&sphere, &mut rng)?;
        let WalkState::Sphere(v) = state else {
            return Err(Error::numerical("sphere model produced a non-sphere state"));
        };
        acc2.push(v[0] * v[0]);
        acc4.push(v[0] * v[0] * v[0] * v[0]);
    }
    checks.push(acc2.check(
        "mc-sphere-N5-m2",
        "sampled stationary sphere states reproduce the second coordinate moment",
        sphere_moment(5, &[2]),
    ));
    checks.push(acc4.check(
        "mc-sphere-N5-m4",
        "sampled stationary sphere states reproduce the fourth coordinate moment",
        sphere_moment(5, &[4]),
    ));

    let boltzmann = ModelSpec::boltzmann_uniform(4);
    let mut accb = MomentAccumulator::default();
    let rescale = 4.0 / 3.0; // N/(N-1) maps a state velocity to the ball marginal
    for _ in 0..40_000 {
        let state = crate::simulate::sample_stationary(&boltzmann, &mut rng)?;
        let WalkState::Velocities(v) = state else {
            return Err(Error::numerical("collision model produced a non-velocity state"));
        };
        let r2 = v[0][0] * v[0][0] + v[0][1] * v[0][1] + v[0][2] * v[0][2];
        accb.push(rescale * r2);
    }
    checks.push(accb.check(
        "mc-ball-N4-m2",
        "sampled stationary collision states reproduce the ball second moment",
        boltzmann_marginal_moment(4, 2)?,
    ));

    Ok(SuiteReport::new("marginals", checks))
}

#[derive(Default)]
struct MomentAccumulator {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl MomentAccumulator {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn check(&self, id: &str, what: &str, expected: f64) -> VerifyCheck {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0);
        let stderr = (var / n).sqrt();
        VerifyCheck::close(id, what, mean, expected, 3.0 * stderr)
    }
}

fn suite_recursion_consistency() -> Result<SuiteReport> {
    let mut checks = Vec::new();

    // Sphere recursion telescopes to the closed form (the flat-density base
    // gap is exactly 2).
    let reports = gap_recursion_lower(&ModelSpec::kac_uniform(200), 200, 2.0)?;
    let mut worst = 0.0f64;
    for r in &reports {
        let nf = r.n_particles as f64;
        let lower = r.delta_lower.ok_or_else(|| Error::numerical("missing lower bound"))?;
        worst = worst.max((lower - 0.5 * (nf + 2.0) / (nf - 1.0)).abs());
    }
    checks.push(VerifyCheck::at_most(
        "sphere-recursion-telescopes",
        "iterated one-step factors reproduce (1/2)(N+2)/(N-1) up to N=200",
        worst,
        1e-12,
    ));
    checks.push(VerifyCheck::close(
        "sphere-product-closed-form-N50",
        "partial product of (1 - 3/(j^2-1)) vs (1/4)(N+2)/(N-1)",
        {
            let mut lit = 1.0;
            for j in 3..=50usize {
                lit *= 1.0 - kac_alpha(j, 4)?;
            }
            lit
        },
        kac_product_closed_form(50)?,
        1e-14,
    ));

    // Shuffle recursion is exact at every level.
    let shuffle = gap_recursion_lower(&ModelSpec::Shuffle { n: 100, p: 0.5 }, 100, 2.0)?;
    let mut worst = 0.0f64;
    for r in &shuffle {
        let nf = r.n_particles as f64;
        let lower = r.delta_lower.ok_or_else(|| Error::numerical("missing lower bound"))?;
        worst = worst.max((lower - nf / (nf - 1.0)).abs());
    }
    checks.push(VerifyCheck::at_most(
        "shuffle-recursion-exact",
        "transposition-walk recursion telescopes to 2pN/(N-1) exactly",
        worst,
        1e-13,
    ));

    // Rotation-walk spectrum coincides with the sphere-walk spectrum.
    let mut worst = 0.0f64;
    for n in 3..=12usize {
        for d in 0..=12usize {
            worst = worst.max((son_zonal_ratio(n, d)? - kac_alpha(n, d)?).abs());
        }
    }
    checks.push(VerifyCheck::at_most(
        "zonal-coincidence",
        "zonal-average eigenvalues equal the sphere-walk single-pair spectrum",
        worst,
        1e-12,
    ));

    // Collision-model recursion: factors stay positive, the scanned kappa
    // obeys the 2/N^2 envelope from N=14 on, and the product keeps a
    // uniform positive floor out to N=200.
    let boltzmann = gap_recursion_lower(&ModelSpec::boltzmann_uniform(200), 200, 1.0)?;
    let mut kappa_envelope = f64::NEG_INFINITY;
    let mut min_factor = f64::INFINITY;
    for r in &boltzmann {
        let nf = r.n_particles as f64;
        min_factor = min_factor.min(1.0 - r.kappa.max(r.beta));
        if r.n_particles >= 14 {
            kappa_envelope = kappa_envelope.max(r.kappa * nf * nf / 2.0);
        }
    }
    let last = boltzmann.last().expect("nonempty recursion");
    checks.push(VerifyCheck::at_most(
        "collision-kappa-envelope",
        "scanned largest positive eigenvalue stays below 2/N^2 from N=14 on",
        kappa_envelope,
        1.0,
    ));
    checks.push(VerifyCheck::at_most(
        "collision-factors-positive",
        "every recursion factor stays strictly positive",
        -min_factor,
        -0.5, // the smallest factor is 1 - kappa at N=4, about 0.79
    ));
    checks.push(VerifyCheck::at_most(
        "collision-gap-floor",
        "collision-model lower bound keeps a positive floor at N=200",
        -(last.delta_lower.ok_or_else(|| Error::numerical("missing lower bound"))?),
        -0.3,
    ));

    Ok(SuiteReport::new("recursion-consistency", checks))
}

fn suite_theorem71() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut literal = 1.0;
    for j in 3..=50usize {
        literal *= 1.0 - kac_alpha(j, 8)?;
    }
    checks.push(VerifyCheck::close(
        "degree8-product-N50",
        "literal degree-8 product vs Gamma-function closed form",
        literal,
        eighth_degree_product_closed_form(50)?,
        1e-10,
    ));
    checks.push(VerifyCheck::close(
        "degree8-product-limit",
        "limiting product constant vs its high-precision value",
        eighth_degree_product_limit(),
        0.5564,
        5e-4,
    ));
    let report = theorem71_check(&AngularDensity::uniform())?;
    checks.push(VerifyCheck::close(
        "criterion-holds-uniform",
        "symmetric-sector margin criterion holds for the flat density",
        if report.holds { 1.0 } else { 0.0 },
        1.0,
        0.0,
    ));
    checks.push(VerifyCheck::close(
        "criterion-gamma2-uniform",
        "two-particle quartic ceiling for the flat density",
        report.gamma_2_cap,
        2.0,
        1e-15,
    ));
    checks.push(VerifyCheck::close(
        "criterion-crossing-uniform",
        "modified product bound overtakes the quartic ceiling immediately",
        report.crossing_n.map(|n| n as f64).unwrap_or(-1.0),
        3.0,
        0.0,
    ));
    Ok(SuiteReport::new("theorem71", checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn restricted_q_reproduces_small_gaps() {
        let uniform = AngularDensity::uniform();
        let q3 = build_restricted_q(3, &uniform, 4, Sector::Symmetric).unwrap();
        assert_relative_eq!(q3.second_eigenvalue().unwrap(), 7.0 / 12.0, epsilon = 1e-10);

        let q2 = build_restricted_q(2, &uniform, 4, Sector::Symmetric).unwrap();
        assert_abs_diff_eq!(q2.second_eigenvalue().unwrap(), 0.0, epsilon = 1e-12);

        // The full basis agrees with the symmetric sector on the top of the
        // spectrum (the optimizer is permutation invariant).
        let q3_full = build_restricted_q(3, &uniform, 4, Sector::Full).unwrap();
        assert_relative_eq!(
            q3_full.second_eigenvalue().unwrap(),
            7.0 / 12.0,
            epsilon = 1e-10
        );
        assert!(q3_full.dim() > q3.dim());
    }

    #[test]
    fn restricted_q_respects_guards() {
        let uniform = AngularDensity::uniform();
        assert!(build_restricted_q(3, &uniform, 10, Sector::Full).is_err());
        assert!(build_restricted_q(1, &uniform, 4, Sector::Full).is_err());
    }

    #[test]
    fn quartic_sum_is_an_exact_eigenfunction() {
        let densities = [
            AngularDensity::uniform(),
            AngularDensity::from_unit_coeffs(&[0.0, 0.5]).unwrap(),
            AngularDensity::from_unit_coeffs(&[0.0, 0.0, 0.0, 0.5]).unwrap(),
        ];
        for n in 3..=5usize {
            for rho in &densities {
                assert!(quartic_residual(rho, n).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn restricted_p_matches_transfer_formula() {
        for n in 3..=5usize {
            let p = build_restricted_p(n, 4, Sector::Symmetric).unwrap();
            let nf = n as f64;
            let expected = (1.0 + (nf - 1.0) * kac_kappa(n).unwrap()) / nf;
            assert_abs_diff_eq!(p.second_eigenvalue().unwrap(), expected, epsilon = 1e-10);
            assert!(transfer_eigenvector_residual(n).unwrap() <= 1e-12);
        }
        // N=3 value in closed form: (1 + 2*(3/8))/3 = 7/12.
        let p3 = build_restricted_p(3, 4, Sector::Symmetric).unwrap();
        assert_relative_eq!(p3.second_eigenvalue().unwrap(), 7.0 / 12.0, epsilon = 1e-10);
    }

    #[test]
    fn recursion_equality_connects_consecutive_sizes() {
        let uniform = AngularDensity::uniform();
        let mut lambda_prev = build_restricted_q(2, &uniform, 4, Sector::Symmetric)
            .unwrap()
            .second_eigenvalue()
            .unwrap();
        for n in 3..=5usize {
            let lambda_n = build_restricted_q(n, &uniform, 4, Sector::Symmetric)
                .unwrap()
                .second_eigenvalue()
                .unwrap();
            let mu = build_restricted_p(n, 4, Sector::Symmetric)
                .unwrap()
                .second_eigenvalue()
                .unwrap();
            assert_abs_diff_eq!(
                lambda_n,
                lambda_prev + (1.0 - lambda_prev) * mu,
                epsilon = 1e-10
            );
            lambda_prev = lambda_n;
        }
    }

    #[test]
    fn shuffle_bruteforce_reference_points() {
        let t2 = shuffle_q_bruteforce(2, 0.7).unwrap();
        assert_eq!(t2.entries.len(), 2);
        assert_relative_eq!(t2.entries[0].value, 1.0, epsilon = 1e-12);
        assert_relative_eq!(t2.entries[1].value, 1.0 - 2.0 * 0.7, epsilon = 1e-12);

        let t3 = shuffle_q_bruteforce(3, 0.5).unwrap();
        let (gap3, mult3) = shuffle_bruteforce_gap(&t3).unwrap();
        assert_abs_diff_eq!(gap3, 1.5, epsilon = 1e-10);
        assert_eq!(mult3, 4);

        let t4 = shuffle_q_bruteforce(4, 1.0).unwrap();
        let (gap4, mult4) = shuffle_bruteforce_gap(&t4).unwrap();
        assert_abs_diff_eq!(gap4, 8.0 / 3.0, epsilon = 1e-10);
        assert_eq!(mult4, 9);

        assert!(shuffle_q_bruteforce(8, 0.5).is_err());
        assert!(shuffle_q_bruteforce(4, 0.0).is_err());
    }

    #[test]
    fn k_quadrature_recovers_closed_spectrum() {
        let t4 = kac_k_quadrature(4, 64).unwrap();
        assert_relative_eq!(table_value(&t4, 0).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(table_value(&t4, 4).unwrap(), 0.2, epsilon = 1e-10);
        assert_relative_eq!(table_value(&t4, 2).unwrap(), -1.0 / 3.0, epsilon = 1e-10);
        // Degree 6 is negative: -1/7, not +1/7.
        assert_relative_eq!(table_value(&t4, 6).unwrap(), -1.0 / 7.0, epsilon = 1e-10);
        // Odd degrees are annihilated.
        for odd in [1usize, 3, 5, 7] {
            assert_abs_diff_eq!(table_value(&t4, odd).unwrap(), 0.0, epsilon = 1e-10);
        }

        let t7 = kac_k_quadrature(7, 96).unwrap();
        for n in (0..=12).step_by(2) {
            assert_abs_diff_eq!(
                table_value(&t7, n).unwrap(),
                kac_alpha(7, n).unwrap(),
                epsilon = 1e-10
            );
        }

        assert!(kac_k_quadrature(3, 64).is_err());
        assert!(kac_k_quadrature(5, 32).is_err());
    }

    #[test]
    fn kernel_residuals_vanish_on_eigenfunctions() {
        // Constant: exactly preserved by the normalized quadrature.
        assert!(boltzmann_eigen_residual(5, 0, 0, 12).unwrap() <= 1e-13);
        // K(v . e) = -(1/4)(v . e) at N=5.
        assert!(boltzmann_eigen_residual(5, 0, 1, 24).unwrap() <= 1e-8);
        assert!(boltzmann_eigen_residual(5, 1, 0, 24).unwrap() <= 1e-6);
        assert!(boltzmann_eigen_residual(5, 2, 0, 24).unwrap() <= 1e-6);
        assert!(boltzmann_eigen_residual(3, 0, 0, 12).is_err());
    }

    #[test]
    fn fourier_table_lists_cosine_moments() {
        let flat = fourier_q2_spectrum(&AngularDensity::uniform(), 6).unwrap();
        assert_eq!(flat.entries[0].value, 1.0);
        for e in &flat.entries[1..] {
            assert_abs_diff_eq!(e.value, 0.0, epsilon = 1e-15);
            assert_eq!(e.multiplicity, Multiplicity::Count(2));
        }

        let rho = AngularDensity::from_unit_coeffs(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let t = fourier_q2_spectrum(&rho, 8).unwrap();
        assert_relative_eq!(table_value(&t, 4).unwrap(), 0.5, epsilon = 1e-15);
        assert!(t.entries.iter().all(|e| e.value < 1.0 + 1e-12));
    }

    #[test]
    fn marginal_quadratures_match_closed_forms() {
        for n in [3usize, 5, 10] {
            for order in [2u32, 4, 6, 8] {
                assert_abs_diff_eq!(
                    sphere_marginal_moment(n, order).unwrap(),
                    sphere_moment(n, &[order]),
                    epsilon = 1e-12
                );
            }
        }
        for n in [4usize, 5] {
            for order in [2u32, 4, 6] {
                assert_abs_diff_eq!(
                    boltzmann_marginal_moment(n, order).unwrap(),
                    boltzmann_marginal_moment_closed(n, order).unwrap(),
                    epsilon = 1e-13
                );
            }
        }
        // E[|v|^2] under the N=4 ball marginal: B(5/2,3)/B(3/2,3) = 1/3,
        // which also matches exchangeability: (N/(N-1)) * (1/N).
        assert_relative_eq!(
            boltzmann_marginal_moment_closed(4, 2).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn suites_run_and_pass() {
        for name in SUITE_NAMES {
            let report = run_suite(name).unwrap();
            let failed: Vec<&VerifyCheck> =
                report.checks.iter().filter(|c| !c.pass).collect();
            assert!(
                report.passed,
                "suite {name} failed: {:?}",
                failed
                    .iter()
                    .map(|c| (&c.check_id, c.computed, c.expected, c.tolerance))
                    .collect::<Vec<_>>()
            );
            assert!(!report.checks.is_empty());
        }
        assert!(run_suite("nonsense").is_err());
    }
}
