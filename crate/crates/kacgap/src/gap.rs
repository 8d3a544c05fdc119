//! Walk-gap assembly: transfers the kernel extremes (κ_N, β_N) into bounds
//! on the N-particle gap, evaluates the closed-form products, the
//! two-particle Fourier base case, the quartic trial-function ceiling, and
//! the symmetric-sector sharpness criterion.

use crate::density::AngularDensity;
use crate::jsonfmt::{f17, f17_opt};
use crate::model::ModelSpec;
use crate::poly::{trig_moment, Sector};
use crate::spectra::{boltzmann_scan, kac_beta, kac_kappa, DEFAULT_SCAN_NMAX};
use crate::special::{ln_gamma, ln_gamma_complex};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Per-N gap summary: the kernel extremes, the transfer eigenvalue μ_N, and
/// whatever bounds or exact values the model's theory justifies.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    #[serde(rename = "N")]
    pub n_particles: usize,
    /// Second eigenvalue of the two-particle walk attached at the recursion
    /// base (1 − base gap / 2).
    #[serde(serialize_with = "f17")]
    pub lambda2: f64,
    #[serde(serialize_with = "f17")]
    pub delta2: f64,
    #[serde(serialize_with = "f17")]
    pub kappa: f64,
    #[serde(serialize_with = "f17")]
    pub beta: f64,
    #[serde(serialize_with = "f17")]
    pub mu: f64,
    #[serde(serialize_with = "f17_opt", skip_serializing_if = "Option::is_none")]
    pub delta_lower: Option<f64>,
    #[serde(serialize_with = "f17_opt", skip_serializing_if = "Option::is_none")]
    pub delta_upper: Option<f64>,
    #[serde(serialize_with = "f17_opt", skip_serializing_if = "Option::is_none")]
    pub delta_exact: Option<f64>,
    pub sharp: bool,
    pub sector: Sector,
    pub notes: Vec<String>,
}

impl GapReport {
    pub fn validate(&self) -> Result<()> {
        if let (Some(lo), Some(hi)) = (self.delta_lower, self.delta_upper) {
            if lo > hi + 1e-12 {
                return Err(Error::numerical(format!(
                    "gap bounds cross at N={}: lower {lo:.17e} > upper {hi:.17e}",
                    self.n_particles
                )));
            }
        }
        if let Some(exact) = self.delta_exact {
            if let Some(lo) = self.delta_lower {
                if exact < lo - 1e-12 {
                    return Err(Error::numerical("exact gap below its lower bound"));
                }
            }
            if let Some(hi) = self.delta_upper {
                if exact > hi + 1e-12 {
                    return Err(Error::numerical("exact gap above its upper bound"));
                }
            }
        }
        if self.sharp && self.delta_exact.is_none() {
            return Err(Error::invalid("sharp report without an exact value"));
        }
        Ok(())
    }
}

/// Second eigenvalue of the coordinate-averaging operator:
/// max{(1+(N−1)κ)/N, (1+(N−1)β)/N}.
pub fn mu_from_k(n_particles: usize, kappa: f64, beta: f64) -> f64 {
    let nf = n_particles as f64;
    let a = (1.0 + (nf - 1.0) * kappa) / nf;
    let b = (1.0 + (nf - 1.0) * beta) / nf;
    a.max(b)
}

/// Scan cap justified by the density representation: the full coefficient
/// range for series form, resolution/8 for grid form.
pub fn moment_scan_cap(rho: &AngularDensity) -> usize {
    if rho.is_series() {
        rho.coeffs().len()
    } else {
        rho.grid_resolution() / 8
    }
}

/// Second eigenvalue of the two-particle walk: the supremum over k ≥ 1 of
/// ∫cos(kθ)ρ dθ. Exact for series densities (moments vanish beyond the
/// coefficient range, so the supremum includes 0); grid densities must be
/// scanned at least to the resolution-justified cutoff.
pub fn lambda2_kac(rho: &AngularDensity, k_max: usize) -> Result<f64> {
    rho.validate()?;
    let cap = moment_scan_cap(rho);
    let scan_to = if rho.is_series() {
        cap
    } else {
        if k_max < cap {
            return Err(Error::invalid(format!(
                "grid density needs a moment scan to at least resolution/8 = {cap} (got {k_max})"
            )));
        }
        k_max
    };
    let mut sup: f64 = 0.0; // the vanishing tail contributes supremum 0
    for k in 1..=scan_to {
        sup = sup.max(rho.cosine_moment(k));
    }
    if sup >= 1.0 - 1e-12 {
        return Err(Error::numerical(
            "two-particle walk is degenerate: a cosine moment reaches 1",
        ));
    }
    Ok(sup)
}

/// Quartic-coupling coefficient γ = (1/4)(1 − ∫cos4θ ρ dθ) ∈ [0, 1/2].
pub fn gamma_coefficient(rho: &AngularDensity) -> Result<f64> {
    rho.validate()?;
    let gamma = 0.25 * (1.0 - rho.cosine_moment(4));
    if !(-1e-12..=0.5 + 1e-12).contains(&gamma) {
        return Err(Error::numerical(format!(
            "quartic coefficient {gamma} escapes [0, 1/2]"
        )));
    }
    Ok(gamma.clamp(0.0, 0.5))
}

/// Eigenvalue of the N-particle walk on the centered quartic sum
/// Σ_j (v_j⁴ − 3/(N(N+2))): 1 − 2γ(N+2)/(N(N−1)).
pub fn kac_quartic_eigenvalue(rho: &AngularDensity, n_particles: usize) -> Result<f64> {
    if n_particles < 2 {
        return Err(Error::invalid("quartic eigenvalue needs at least 2 particles"));
    }
    let nf = n_particles as f64;
    let gamma = gamma_coefficient(rho)?;
    Ok(1.0 - 2.0 * gamma * (nf + 2.0) / (nf * (nf - 1.0)))
}

/// Gap ceiling from the quartic trial function: Γ_N = 2γ(N+2)/(N−1).
pub fn kac_gamma_n(rho: &AngularDensity, n_particles: usize) -> Result<f64> {
    if n_particles < 2 {
        return Err(Error::invalid("gap ceiling needs at least 2 particles"));
    }
    let nf = n_particles as f64;
    Ok(2.0 * gamma_coefficient(rho)? * (nf + 2.0) / (nf - 1.0))
}

/// Whether the degree-4 moment attains the two-particle supremum (including
/// the vanishing tail), i.e. ∫cos4θρ ≥ ∫coskθρ for every k ≥ 1 and ≥ 0.
/// This is the hypothesis under which the product bound is attained.
pub fn quartic_moment_is_maximal(rho: &AngularDensity) -> Result<bool> {
    rho.validate()?;
    let m4 = rho.cosine_moment(4);
    if m4 < -1e-14 {
        return Ok(false);
    }
    for k in 1..=moment_scan_cap(rho).max(4) {
        if rho.cosine_moment(k) > m4 + 1e-14 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed form of Π_{j=3}^N (1 − 3/(j²−1)) = (1/4)(N+2)/(N−1).
pub fn kac_product_closed_form(n_particles: usize) -> Result<f64> {
    if n_particles < 3 {
        return Err(Error::invalid("product closed form starts at N = 3"));
    }
    let nf = n_particles as f64;
    Ok(0.25 * (nf + 2.0) / (nf - 1.0))
}

/// Two-sided gap report for the sphere walk. The lower bound is the
/// telescoped product ((1−λ₂)/2)(N+2)/(N−1); the upper bound is the quartic
/// ceiling Γ_N; they coincide (and the gap is exact) when the degree-4
/// moment is maximal.
pub fn kac_gap_exact(rho: &AngularDensity, n_particles: usize) -> Result<GapReport> {
    if n_particles < 2 {
        return Err(Error::invalid("gap report needs at least 2 particles"));
    }
    let nf = n_particles as f64;
    let lambda2 = lambda2_kac(rho, moment_scan_cap(rho))?;
    let delta2 = 2.0 * (1.0 - lambda2);
    let lower = 0.5 * (1.0 - lambda2) * (nf + 2.0) / (nf - 1.0);
    let upper = kac_gamma_n(rho, n_particles)?;
    let kappa = 3.0 / (nf * nf - 1.0);
    let beta = 1.0 / ((nf - 1.0) * (nf - 1.0));
    let sharp = quartic_moment_is_maximal(rho)?;
    let mut notes = Vec::new();
    let delta_exact = if sharp {
        if (lower - upper).abs() > 1e-12 * upper.abs().max(1.0) {
            return Err(Error::numerical(format!(
                "degree-4 moment is maximal but bounds disagree: {lower:.17e} vs {upper:.17e}"
            )));
        }
        notes.push("degree-4 moment attains the two-particle supremum; bounds coincide".into());
        Some(lower)
    } else {
        notes.push("degree-4 moment is not maximal; bounds bracket the gap".into());
        None
    };
    let report = GapReport {
        n_particles,
        lambda2,
        delta2,
        kappa,
        beta,
        mu: mu_from_k(n_particles, kappa, beta),
        delta_lower: Some(lower),
        delta_upper: Some(upper),
        delta_exact,
        sharp,
        sector: Sector::Full,
        notes,
    };
    report.validate()?;
    Ok(report)
}

/// Symmetric-sector two-particle gap: 2·min over k ≥ 1 of (1 − ∫coskθρ),
/// including the vanishing-moment tail (which contributes 1).
pub fn symmetric_delta2(rho: &AngularDensity) -> Result<f64> {
    rho.validate()?;
    let mut min_term: f64 = 1.0;
    for k in 1..=moment_scan_cap(rho) {
        min_term = min_term.min(1.0 - rho.cosine_moment(k));
    }
    let value = 2.0 * min_term;
    if !(-1e-12..=2.0 + 1e-12).contains(&value) {
        return Err(Error::numerical(format!(
            "symmetric two-particle gap {value} escapes [0, 2]"
        )));
    }
    Ok(value.clamp(0.0, 2.0))
}

/// Closed form of Π_{j=3}^N (1 − α₈(j)) via Gamma functions, where
/// α₈(j) = 105/((j+5)(j+3)(j+1)(j−1)):
/// 90·Γ(N−1)Γ(N+7)|Γ(N+3+i√6)|² / (Γ(N)Γ(N+6)Γ(N+4)Γ(N+2)|Γ(5+i√6)|²).
pub fn eighth_degree_product_closed_form(n_particles: usize) -> Result<f64> {
    if n_particles < 3 {
        return Err(Error::invalid("product closed form starts at N = 3"));
    }
    let nf = n_particles as f64;
    let root6 = 6.0f64.sqrt();
    let ln_abs2 = |x: f64| 2.0 * ln_gamma_complex(Complex64::new(x, root6)).re;
    let ln = 90.0f64.ln() + ln_gamma(nf - 1.0) + ln_gamma(nf + 7.0) + ln_abs2(nf + 3.0)
        - ln_gamma(nf)
        - ln_gamma(nf + 6.0)
        - ln_gamma(nf + 4.0)
        - ln_gamma(nf + 2.0)
        - ln_abs2(5.0);
    Ok(ln.exp())
}

/// Limit of the above product as N → ∞: (3/770)·sinh(√6 π)/(√6 π).
pub fn eighth_degree_product_limit() -> f64 {
    let x = 6.0f64.sqrt() * std::f64::consts::PI;
    3.0 / 770.0 * x.sinh() / x
}

/// Outcome of the symmetric-sector sharpness criterion.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetricCriterion {
    /// Γ₂ = 8γ, the two-particle quartic ceiling.
    #[serde(serialize_with = "f17")]
    pub gamma_2_cap: f64,
    #[serde(serialize_with = "f17")]
    pub delta2_sym: f64,
    /// Δ̃₂ > 0.45·Γ₂ — the margin that forces the quartic ceiling to be
    /// attained for all large N.
    pub holds: bool,
    /// Limiting value of the degree-8 product, ≈ 0.5564.
    #[serde(rename = "L", serialize_with = "f17")]
    pub l_limit: f64,
    /// Smallest N at which the modified product bound strictly exceeds the
    /// quartic ceiling Γ_N (present when the comparison crosses by N=1000).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing_n: Option<usize>,
}

/// Evaluates the symmetric-sector criterion: Δ̃₂ > 0.45·Γ₂. Also re-derives
/// the degree-8 product closed form against the literal product at N=50 as a
/// self-check, and reports where the bound crossing happens.
pub fn theorem71_check(rho: &AngularDensity) -> Result<SymmetricCriterion> {
    let gamma = gamma_coefficient(rho)?;
    let gamma_2_cap = 8.0 * gamma;
    let delta2_sym = symmetric_delta2(rho)?;
    let holds = delta2_sym > 0.45 * gamma_2_cap;

    // Literal product vs Gamma closed form at N=50.
    let mut literal = 1.0;
    for j in 3..=50usize {
        literal *= 1.0 - crate::spectra::kac_alpha(j, 8)?;
    }
    let closed = eighth_degree_product_closed_form(50)?;
    if (literal - closed).abs() > 1e-10 * literal.abs().max(1.0) {
        return Err(Error::numerical(format!(
            "degree-8 product mismatch at N=50: literal {literal:.17e} vs closed {closed:.17e}"
        )));
    }

    let mut crossing_n = None;
    let mut product = 1.0;
    for n in 3..=1000usize {
        product *= 1.0 - crate::spectra::kac_alpha(n, 8)?;
        let ceiling = 2.0 * gamma * (n as f64 + 2.0) / (n as f64 - 1.0);
        if product * delta2_sym > ceiling {
            crossing_n = Some(n);
            break;
        }
    }

    Ok(SymmetricCriterion {
        gamma_2_cap,
        delta2_sym,
        holds,
        l_limit: eighth_degree_product_limit(),
        crossing_n,
    })
}

/// Eigenvalue of the linearized single-particle evolution on the degree-n
/// Hermite mode: 2∫(sinⁿθ + cosⁿθ − 1)ρ dθ.
pub fn linearized_kac_eigenvalue(rho: &AngularDensity, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("linearized eigenvalue needs degree ≥ 1"));
    }
    rho.validate()?;
    let n = n as u32;
    Ok(2.0 * (trig_moment(rho, n, 0) + trig_moment(rho, 0, n) - 1.0))
}

/// Exact shuffle gap 2pN/(N−1) with the second-eigenvalue multiplicity
/// (N−1)² noted; the recursion reproduces it exactly.
pub fn shuffle_gap_closed_form(n_particles: usize, p: f64) -> Result<GapReport> {
    if n_particles < 2 {
        return Err(Error::invalid("shuffle gap needs at least 2 positions"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("success probability {p} outside (0, 1]")));
    }
    let nf = n_particles as f64;
    let exact = 2.0 * p * nf / (nf - 1.0);
    let kappa = -1.0 / (nf - 1.0);
    let beta = 1.0 / ((nf - 1.0) * (nf - 1.0));
    let report = GapReport {
        n_particles,
        lambda2: 1.0 - 2.0 * p,
        delta2: 4.0 * p,
        kappa,
        beta,
        mu: mu_from_k(n_particles, kappa, beta),
        delta_lower: Some(exact),
        delta_upper: Some(exact),
        delta_exact: Some(exact),
        sharp: true,
        sector: Sector::Full,
        notes: vec![format!(
            "second eigenvalue multiplicity (N−1)² = {}",
            (n_particles - 1) * (n_particles - 1)
        )],
    };
    report.validate()?;
    Ok(report)
}

/// Transfers a walk eigenvalue between success probabilities:
/// λ(p) = 1 + (p/p′)(λ(p′) − 1).
pub fn shuffle_rescale_lambda(lambda_ref: f64, p_ref: f64, p: f64) -> Result<f64> {
    if !(p_ref > 0.0 && p_ref <= 1.0) || !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid("success probabilities must lie in (0, 1]"));
    }
    Ok(1.0 + (p / p_ref) * (lambda_ref - 1.0))
}

/// Iterates the one-step factor (1 − max{κ_j, β_j}) up from the base gap,
/// producing one report per N. The base attaches at N=2 (N=3 for the
/// three-dimensional collision model, whose kernel formulas need N ≥ 4).
pub fn gap_recursion_lower(
    model: &ModelSpec,
    n_max: usize,
    delta2: f64,
) -> Result<Vec<GapReport>> {
    if !(delta2 > 0.0) {
        return Err(Error::invalid("recursion base gap must be positive"));
    }
    model.validate()?;
    let first = match model {
        ModelSpec::Boltzmann3d { .. } => 4,
        _ => 3,
    };
    if n_max < first {
        return Err(Error::invalid(format!(
            "recursion needs N ≥ {first} for this model"
        )));
    }
    let mut reports = Vec::with_capacity(n_max - first + 1);
    let mut lower = delta2;
    for n in first..=n_max {
        let nf = n as f64;
        let (kappa, beta) = match model {
            ModelSpec::KacSphere { .. } | ModelSpec::KacSoN { .. } => {
                (kac_kappa(n)?, kac_beta(n)?)
            }
            ModelSpec::Shuffle { .. } => (-1.0 / (nf - 1.0), 1.0 / ((nf - 1.0) * (nf - 1.0))),
            ModelSpec::Boltzmann3d { .. } => {
                let scan = boltzmann_scan(n, DEFAULT_SCAN_NMAX)?;
                (scan.kappa(), scan.beta)
            }
        };
        let factor = 1.0 - kappa.max(beta);
        if factor <= 0.0 {
            return Err(Error::numerical(format!(
                "recursion factor 1 − max(κ, β) = {factor} is not positive at N = {n}"
            )));
        }
        lower *= factor;

        let mut notes = Vec::new();
        let mut sharp = false;
        let mut delta_upper = None;
        let mut delta_exact = None;
        match model {
            ModelSpec::KacSphere { rho, .. } => {
                let ceiling = kac_gamma_n(rho, n)?;
                delta_upper = Some(ceiling);
                if quartic_moment_is_maximal(rho)?
                    && (lower - ceiling).abs() <= 1e-12 * ceiling.max(1.0)
                {
                    sharp = true;
                    delta_exact = Some(lower);
                    notes.push("product bound meets the quartic ceiling".into());
                }
            }
            ModelSpec::Shuffle { p, .. } => {
                let exact = 2.0 * p * nf / (nf - 1.0);
                delta_upper = Some(exact);
                if (lower - exact).abs() <= 1e-12 * exact.max(1.0) {
                    sharp = true;
                    delta_exact = Some(exact);
                    notes.push("product telescopes to the exact gap".into());
                }
            }
            ModelSpec::Boltzmann3d { .. } => {
                notes.push(
                    "base gap attached at N=3; factors start at N=4 where the kernel \
                     formulas are valid"
                        .into(),
                );
            }
            ModelSpec::KacSoN { .. } => {}
        }

        let report = GapReport {
            n_particles: n,
            lambda2: 1.0 - delta2 / 2.0,
            delta2,
            kappa,
            beta,
            mu: mu_from_k(n, kappa, beta),
            delta_lower: Some(lower),
            delta_upper,
            delta_exact,
            sharp,
            sector: Sector::Full,
            notes,
        };
        report.validate()?;
        reports.push(report);
    }
    Ok(reports)
}
