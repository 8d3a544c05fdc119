//! Gauss–Legendre and Gauss–Jacobi rules by the Golub–Welsch method:
//! nodes are eigenvalues of the Jacobi recurrence matrix, weights come from
//! the first eigenvector components.

use crate::linalg::{tridiagonal_eigen, Mat};
use crate::special::ln_beta;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Three-term recurrence coefficients of the monic-normalized Jacobi matrix
/// for the weight (1-x)^α (1+x)^β: diagonal `d[k]` and coupling `e[k]`
/// between degrees k-1 and k (`e[0]` unused). The orthonormal polynomials
/// with respect to the *probability* version of the weight satisfy
/// `e[k+1] p_{k+1}(x) = (x - d[k]) p_k(x) - e[k] p_{k-1}(x)`, `p_0 = 1`.
pub fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::invalid("quadrature rule needs at least one node"));
    }
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::invalid(format!(
            "Jacobi weight exponents must exceed -1 (got α={alpha}, β={beta})"
        )));
    }
    let ab = alpha + beta;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    d[0] = (beta - alpha) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        d[k] = (beta * beta - alpha * alpha) / denom;
        // Subdiagonal coupling between rows k-1 and k, stored in e[k].
        let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
        let den = (2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0);
        e[k] = (num / den).sqrt();
    }
    Ok((d, e))
}

/// First moment of the Jacobi weight: ∫ (1-x)^α (1+x)^β dx over [-1, 1].
pub fn jacobi_weight_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_beta(alpha + 1.0, beta + 1.0)).exp()
}

/// Evaluates the orthonormal polynomials p_0..p_max_degree (with respect to
/// the normalized Jacobi weight) at `x`.
pub fn orthonormal_jacobi_values(
    max_degree: usize,
    alpha: f64,
    beta: f64,
    x: f64,
) -> Result<Vec<f64>> {
    let (d, e) = jacobi_recurrence(max_degree + 1, alpha, beta)?;
    let mut vals = Vec::with_capacity(max_degree + 1);
    vals.push(1.0);
    if max_degree == 0 {
        return Ok(vals);
    }
    vals.push((x - d[0]) / e[1]);
    for k in 1..max_degree {
        let next = ((x - d[k]) * vals[k] - e[k] * vals[k - 1]) / e[k + 1];
        vals.push(next);
    }
    Ok(vals)
}

/// n-point rule for ∫_{-1}^{1} f(x) (1-x)^α (1+x)^β dx, exact for
/// polynomials of degree ≤ 2n-1. Requires α, β > -1.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<QuadRule> {
    let (mut d, mut e) = jacobi_recurrence(n, alpha, beta)?;
    let mut z = Mat::identity(n);
    tridiagonal_eigen(&mut d, &mut e, Some(&mut z))?;
    let mu0 = jacobi_weight_mass(alpha, beta);
    let weights: Vec<f64> = (0..n).map(|j| mu0 * z[(0, j)] * z[(0, j)]).collect();
    Ok(QuadRule { nodes: d, weights })
}

/// n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<QuadRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_small_rules_match_tables() {
        let r2 = gauss_legendre(2).unwrap();
        assert_relative_eq!(r2.nodes[0], -(1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r2.nodes[1], (1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r2.weights[0], 1.0, epsilon = 1e-14);

        let r3 = gauss_legendre(3).unwrap();
        assert_relative_eq!(r3.nodes[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(r3.nodes[2], (0.6f64).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r3.weights[1], 8.0 / 9.0, epsilon = 1e-14);
        assert_relative_eq!(r3.weights[0], 5.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn polynomial_exactness_legendre() {
        let rule = gauss_legendre(8).unwrap();
        for m in 0..16u32 {
            let got = rule.integrate(|x| x.powi(m as i32));
            let exact = if m % 2 == 1 { 0.0 } else { 2.0 / (m as f64 + 1.0) };
            assert_relative_eq!(got, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn jacobi_moments_match_beta_integrals() {
        // ∫_{-1}^1 x^{2k} (1-x²)^a dx = Γ(k+1/2)Γ(a+1)/Γ(k+a+3/2).
        for &a in &[0.5, 1.0, 2.5, 7.0] {
            let rule = gauss_jacobi(24, a, a).unwrap();
            for k in 0..8u32 {
                let got = rule.integrate(|x| x.powi(2 * k as i32));
                let exact =
                    (ln_gamma(k as f64 + 0.5) + ln_gamma(a + 1.0) - ln_gamma(k as f64 + a + 1.5))
                        .exp();
                assert_relative_eq!(got, exact, max_relative = 1e-12);
                let odd = rule.integrate(|x| x.powi(2 * k as i32 + 1));
                assert!(odd.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn asymmetric_jacobi_total_weight() {
        // μ0 = 2^{α+β+1} B(α+1, β+1).
        let rule = gauss_jacobi(16, 3.5, 0.5).unwrap();
        let exact = (5.0 * std::f64::consts::LN_2
            + ln_gamma(4.5) + ln_gamma(1.5) - ln_gamma(6.0))
        .exp();
        assert_relative_eq!(rule.total_weight(), exact, max_relative = 1e-13);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }
}
