//! Gamma-function machinery shared by the quadrature rules, the sphere
//! moment formulas, and the infinite-product closed forms.

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
// Lanczos g = 7, n = 9 coefficient set (as used by Boost and GSL).
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal-branch log Γ(z) by Lanczos approximation, with the reflection
/// formula for Re z < 1/2. Relative accuracy ~1e-13 over the moderate |z|
/// used here.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let s = (z * pi).sin();
        Complex64::new(pi.ln(), 0.0) - s.ln() - ln_gamma_complex(Complex64::new(1.0, 0.0) - z)
    } else {
        let zm1 = z - 1.0;
        let mut a = Complex64::new(LANCZOS[0], 0.0);
        for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (zm1 + k as f64);
        }
        let t = zm1 + (LANCZOS_G + 0.5);
        0.5 * (2.0 * pi).ln() + (zm1 + 0.5) * t.ln() - t + a.ln()
    }
}

/// log Γ(x) for real x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_gamma_complex(Complex64::new(x, 0.0)).re
}

/// log B(a, b) for a, b > 0.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Surface area of the unit sphere S^d ⊂ R^{d+1}: 2 π^{(d+1)/2} / Γ((d+1)/2).
pub fn sphere_area(d: u32) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    (std::f64::consts::LN_2 + h * std::f64::consts::PI.ln() - ln_gamma(h)).exp()
}

/// (2k-1)!! = 1·3·5···(2k-1), the double factorial of odd numbers; 1 for k = 0.
pub fn odd_double_factorial(k: u32) -> f64 {
    let mut p = 1.0;
    for j in 1..=k {
        p *= (2 * j - 1) as f64;
    }
    p
}

/// Binomial coefficient as f64 (exact for the small arguments used here).
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_matches_factorials() {
        for n in 1..15u32 {
            let fact: f64 = (1..n).map(|k| k as f64).product();
            assert_relative_eq!(ln_gamma(n as f64), fact.ln(), max_relative = 1e-13, epsilon = 1e-13);
        }
        assert_relative_eq!(
            ln_gamma(0.5),
            0.5 * std::f64::consts::PI.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn complex_gamma_recurrence() {
        // Γ(z+1) = z Γ(z) over a grid of complex arguments.
        for &re in &[0.3, 1.7, 4.0, 12.5, 40.0] {
            for &im in &[-6.0, -1.0, 0.5, 2.449489742783178] {
                let z = Complex64::new(re, im);
                let lhs = ln_gamma_complex(z + 1.0);
                let rhs = ln_gamma_complex(z) + z.ln();
                assert!((lhs - rhs).norm() < 1e-11, "z = {z}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn conjugate_pair_identities() {
        // |Γ(1/2 + iy)|² = π / cosh(πy) and |Γ(1 + iy)|² = πy / sinh(πy).
        let pi = std::f64::consts::PI;
        for &y in &[0.25, 1.0, 2.449489742783178, 5.0] {
            let half = 2.0 * ln_gamma_complex(Complex64::new(0.5, y)).re;
            assert_relative_eq!(half, (pi / (pi * y).cosh()).ln(), epsilon = 1e-11);
            let one = 2.0 * ln_gamma_complex(Complex64::new(1.0, y)).re;
            assert_relative_eq!(one, (pi * y / (pi * y).sinh()).ln(), epsilon = 1e-11);
        }
    }

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(sphere_area(0), 2.0, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(1), 2.0 * pi, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(2), 4.0 * pi, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(3), 2.0 * pi * pi, max_relative = 1e-13);
    }

    #[test]
    fn small_combinatorics() {
        assert_eq!(odd_double_factorial(0), 1.0);
        assert_eq!(odd_double_factorial(3), 15.0);
        assert_eq!(odd_double_factorial(4), 105.0);
        assert_eq!(binomial(8, 3), 56.0);
        assert_eq!(binomial(4, 5), 0.0);
    }
}
