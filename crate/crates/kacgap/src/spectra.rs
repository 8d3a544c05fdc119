//! Single-collision kernel spectra: Gegenbauer moment ratios for the sphere
//! walk, Jacobi/Koornwinder ratios for the three-dimensional collision model,
//! the two-value shuffle kernel, and the extreme-eigenvalue scans (κ_N, β_N)
//! the recursion engine consumes.

use crate::jsonfmt::f17;
use crate::model::ModelSpec;
use crate::quad::{gauss_jacobi, gauss_legendre};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

/// Default cap on n+ℓ for the collision-model eigenvalue scan.
pub const DEFAULT_SCAN_NMAX: usize = 8;

/// K-eigenvalue of the sphere walk on the degree-`n` Gegenbauer eigenfunction:
/// 0 for odd n, and (−1)^k Π_{j=1}^k (2j−1)/(N−3+2j) for n = 2k. The product
/// is the closed form of the one-coordinate moment E[z^{2k}] on S^{N−2}.
pub fn kac_alpha(n_particles: usize, n: usize) -> Result<f64> {
    if n_particles < 3 {
        return Err(Error::invalid(format!(
            "sphere-walk eigenvalues need at least 3 particles (got {n_particles})"
        )));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let k = n / 2;
    let nf = n_particles as f64;
    let mut prod = 1.0;
    for j in 1..=k {
        let jf = j as f64;
        prod *= (2.0 * jf - 1.0) / (nf - 3.0 + 2.0 * jf);
    }
    Ok(if k % 2 == 0 { prod } else { -prod })
}

/// Largest K-eigenvalue below 1 relevant to the sphere walk: α_4 = 3/(N²−1).
pub fn kac_kappa(n_particles: usize) -> Result<f64> {
    kac_alpha(n_particles, 4)
}

/// Square of the most negative sphere-walk eigenvalue: α_2² = 1/(N−1)².
pub fn kac_beta(n_particles: usize) -> Result<f64> {
    let a2 = kac_alpha(n_particles, 2)?;
    Ok(a2 * a2)
}

/// Index triple for a Jacobi polynomial J_n^{(α,β)}.
#[derive(Clone, Copy, Debug)]
pub struct JacobiIndex {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiIndex {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha <= -1.0 || beta <= -1.0 {
            return Err(Error::invalid(format!(
                "Jacobi index needs α, β > −1 (got α={alpha}, β={beta})"
            )));
        }
        Ok(Self { n, alpha, beta })
    }

    /// Index used by the three-dimensional collision model:
    /// α = (3N−8)/2, β = ℓ + 1/2.
    pub fn boltzmann(n_particles: usize, n: usize, ell: usize) -> Result<Self> {
        if n_particles < 4 {
            return Err(Error::invalid(format!(
                "collision-model eigenvalues need at least 4 particles (got {n_particles})"
            )));
        }
        let alpha = (3.0 * n_particles as f64 - 8.0) / 2.0;
        let beta = ell as f64 + 0.5;
        Self::new(n, alpha, beta)
    }
}

/// J_n^{(α,β)}(x)/J_n^{(α,β)}(1) by the standard three-term recurrence.
/// The ratio is normalization-free; J_n(1) = Π_{j=1}^n (α+j)/j.
pub fn jacobi_ratio(idx: JacobiIndex, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("Jacobi ratio needs |x| ≤ 1 (got {x})")));
    }
    let JacobiIndex { n, alpha, beta } = idx;
    if n == 0 {
        return Ok(1.0);
    }
    let ab = alpha + beta;
    let mut p_prev = 1.0;
    let mut p = 0.5 * (alpha - beta) + 0.5 * (ab + 2.0) * x;
    for m in 2..=n {
        let mf = m as f64;
        let c = 2.0 * mf + ab;
        let a1 = 2.0 * mf * (mf + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (mf + alpha - 1.0) * (mf + beta - 1.0) * c;
        let next = ((a2 + a3 * x) * p - a4 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    let mut at_one = 1.0;
    for j in 1..=n {
        at_one *= (alpha + j as f64) / j as f64;
    }
    Ok(p / at_one)
}

/// Same ratio through the integral representation
/// ∫∫ [(1+x−(1−x)r²)/2 + i√(1−x²) r cosθ]^n dm_{α,β} / ∫∫ dm_{α,β}
/// with dm = (1−r²)^{α−β−1} r^{2β+1} sin^{2β}θ dr dθ, valid for α > β.
/// Tensor quadrature: Gauss–Jacobi in s = r², Gauss–Legendre in θ.
pub fn koornwinder_ratio(idx: JacobiIndex, x: f64) -> Result<f64> {
    koornwinder_ratio_with(idx, x, 64, 64)
}

pub fn koornwinder_ratio_with(
    idx: JacobiIndex,
    x: f64,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!(
            "integral representation needs |x| ≤ 1 (got {x})"
        )));
    }
    if idx.alpha <= idx.beta {
        return Err(Error::invalid(format!(
            "integral representation needs α > β (got α={}, β={})",
            idx.alpha, idx.beta
        )));
    }
    // r^{2β+1} dr = s^β ds / 2 under s = r²; map s = (1+t)/2 onto Jacobi
    // weight (1−t)^{α−β−1}(1+t)^β. Constant factors cancel in the ratio.
    let radial = gauss_jacobi(radial_nodes, idx.alpha - idx.beta - 1.0, idx.beta)?;
    let angular = gauss_legendre(angular_nodes)?;
    let half = std::f64::consts::FRAC_PI_2;

    let re_part = 0.5 * (1.0 + x);
    let re_slope = 0.5 * (1.0 - x);
    let im_scale = (1.0 - x * x).max(0.0).sqrt();

    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (&t, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let s = 0.5 * (1.0 + t);
        let r = s.max(0.0).sqrt();
        let re = re_part - re_slope * s;
        for (&u, &wt) in angular.nodes.iter().zip(&angular.weights) {
            let theta = half * (1.0 + u);
            let w = wr * wt * theta.sin().powf(2.0 * idx.beta);
            let z = Complex64::new(re, im_scale * r * theta.cos());
            num += w * z.powu(idx.n as u32);
            den += w;
        }
    }
    let ratio = num / den;
    if ratio.im.abs() > 1e-10 {
        return Err(Error::numerical(format!(
            "integral-representation imaginary part {:.3e} exceeds 1e-10",
            ratio.im
        )));
    }
    Ok(ratio.re)
}

/// Angular-index cap ℓ_0 = (3N−9)/2 below which the Jacobi route is valid.
pub fn boltzmann_ell_cap(n_particles: usize) -> f64 {
    (3.0 * n_particles as f64 - 9.0) / 2.0
}

/// Largest legal angular index: the biggest ℓ with ℓ < (3N−9)/2.
pub fn boltzmann_max_ell(n_particles: usize) -> Result<usize> {
    if n_particles < 4 {
        return Err(Error::invalid(
            "collision-model angular indices need at least 4 particles",
        ));
    }
    let three_n = 3 * n_particles - 9;
    // ℓ < three_n/2 over the integers.
    Ok(if three_n % 2 == 0 { three_n / 2 - 1 } else { three_n / 2 })
}

/// Argument at which the collision-model eigenvalues evaluate the Jacobi
/// ratio: x = −1 + 2/(N−1)².
pub fn boltzmann_x(n_particles: usize) -> f64 {
    let nm1 = n_particles as f64 - 1.0;
    -1.0 + 2.0 / (nm1 * nm1)
}

/// Closed forms for the first three radial bands (n ∈ {0,1,2}); used as a
/// cross-check on the recurrence route. ε = 1/(N−1)².
pub fn boltzmann_lambda_closed(n_particles: usize, n: usize, ell: usize) -> Result<f64> {
    if n_particles < 4 {
        return Err(Error::invalid(
            "collision-model eigenvalues need at least 4 particles",
        ));
    }
    let nf = n_particles as f64;
    let nm1 = nf - 1.0;
    let eps = 1.0 / (nm1 * nm1);
    let sgn = (-1.0 / nm1).powi(ell as i32);
    let lf = ell as f64;
    let radial = match n {
        0 => 1.0,
        1 => eps - (1.0 - eps) * (2.0 * lf + 3.0) / (3.0 * nf - 6.0),
        2 => {
            eps * eps - (4.0 * lf + 10.0) / (3.0 * nf - 6.0) * eps * (1.0 - eps)
                + (1.0 - eps) * (1.0 - eps) * (2.0 * lf + 5.0) * (2.0 * lf + 3.0)
                    / ((3.0 * nf - 6.0) * (3.0 * nf - 4.0))
        }
        _ => {
            return Err(Error::invalid(format!(
                "closed forms cover radial bands 0..=2 (got {n})"
            )))
        }
    };
    Ok(radial * sgn)
}

/// Eigenvalue λ_{n,ℓ} of the three-dimensional collision kernel:
/// J_n^{(α,β)} ratio at x = −1 + 2/(N−1)² times (−1/(N−1))^ℓ.
/// Requires ℓ < (3N−9)/2; for n ≤ 2 the value is verified against the
/// closed forms to 1e−12 before being returned.
pub fn boltzmann_lambda(n_particles: usize, n: usize, ell: usize) -> Result<f64> {
    if (ell as f64) >= boltzmann_ell_cap(n_particles) {
        return Err(Error::invalid(format!(
            "angular index {ell} is outside the cap (3N−9)/2 = {} at N = {n_particles}",
            boltzmann_ell_cap(n_particles)
        )));
    }
    let idx = JacobiIndex::boltzmann(n_particles, n, ell)?;
    let nm1 = n_particles as f64 - 1.0;
    let value = jacobi_ratio(idx, boltzmann_x(n_particles))? * (-1.0 / nm1).powi(ell as i32);
    if n <= 2 {
        let closed = boltzmann_lambda_closed(n_particles, n, ell)?;
        if (value - closed).abs() > 1e-12 * closed.abs().max(1.0) {
            return Err(Error::numerical(format!(
                "recurrence eigenvalue {value:.17e} disagrees with closed form {closed:.17e} \
                 at (N={n_particles}, n={n}, ℓ={ell})"
            )));
        }
    }
    Ok(value)
}

/// Like `boltzmann_lambda`, but indices at or beyond the ℓ-cap report 0 with
/// a `true` tail flag instead of erroring; such entries are controlled by the
/// scan's μ-bounds, not computed pointwise.
pub fn boltzmann_lambda_or_tail(n_particles: usize, n: usize, ell: usize) -> Result<(f64, bool)> {
    if (ell as f64) >= boltzmann_ell_cap(n_particles) {
        return Ok((0.0, true));
    }
    Ok((boltzmann_lambda(n_particles, n, ell)?, false))
}

/// Upper bound μ_{n,ℓ} = (∫∫ |z|^{n/2} dm / ∫∫ dm) · (1/(N−1))^ℓ on
/// |λ_{n,ℓ}|, strictly decreasing in n since |z| < 1 almost everywhere.
pub fn boltzmann_mu_bound(n_particles: usize, n: usize, ell: usize) -> Result<f64> {
    boltzmann_mu_bound_with(n_particles, n, ell, 64, 64)
}

pub fn boltzmann_mu_bound_with(
    n_particles: usize,
    n: usize,
    ell: usize,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<f64> {
    if (ell as f64) >= boltzmann_ell_cap(n_particles) {
        return Err(Error::invalid(format!(
            "angular index {ell} is outside the cap (3N−9)/2 at N = {n_particles}"
        )));
    }
    let idx = JacobiIndex::boltzmann(n_particles, n, ell)?;
    let x = boltzmann_x(n_particles);
    let radial = gauss_jacobi(radial_nodes, idx.alpha - idx.beta - 1.0, idx.beta)?;
    let angular = gauss_legendre(angular_nodes)?;
    let half = std::f64::consts::FRAC_PI_2;

    let re_part = 0.5 * (1.0 + x);
    let re_slope = 0.5 * (1.0 - x);
    let im_scale = (1.0 - x * x).max(0.0).sqrt();
    let pow = n as f64 / 2.0;

    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let s = 0.5 * (1.0 + t);
        let r = s.max(0.0).sqrt();
        let re = re_part - re_slope * s;
        for (&u, &wt) in angular.nodes.iter().zip(&angular.weights) {
            let theta = half * (1.0 + u);
            let w = wr * wt * theta.sin().powf(2.0 * idx.beta);
            let im = im_scale * r * theta.cos();
            num += w * (re * re + im * im).sqrt().powf(pow);
            den += w;
        }
    }
    let nm1 = n_particles as f64 - 1.0;
    Ok(num / den * (1.0 / nm1).powi(ell as i32))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanExtremum {
    pub n: usize,
    pub l: usize,
    #[serde(serialize_with = "f17")]
    pub value: f64,
}

/// Exhaustive eigenvalue scan over {(n,ℓ): n+ℓ ≤ n_max, ℓ < (3N−9)/2},
/// excluding the constant eigenfunction (0,0). The tail beyond the scan is
/// controlled by μ-bounds on the frontier n+ℓ = n_max+1, which dominate all
/// deeper indices by monotonicity in n.
#[derive(Clone, Debug, Serialize)]
pub struct BoltzmannScan {
    pub n_particles: usize,
    pub n_max: usize,
    pub indices_scanned: usize,
    /// κ_N: the largest scanned eigenvalue below 1.
    pub max: ScanExtremum,
    /// The most negative scanned eigenvalue.
    pub min: ScanExtremum,
    #[serde(serialize_with = "f17")]
    pub beta: f64,
    #[serde(serialize_with = "f17")]
    pub lambda_20: f64,
    /// Whether λ_{2,0} attains the scan maximum. The positive odd-harmonic
    /// band λ_{1,1} = (5N−3)/(3(N−1)³) exceeds it at every N, so this stays
    /// false; it is reported rather than assumed.
    pub lambda_20_is_max: bool,
    #[serde(serialize_with = "f17")]
    pub tail_mu: f64,
    /// Whether the scan maximum dominates the frontier μ-bound, i.e. the
    /// reported κ_N cannot be displaced by any index outside the scan.
    pub tail_dominated: bool,
}

impl BoltzmannScan {
    pub fn kappa(&self) -> f64 {
        self.max.value
    }
}

pub fn boltzmann_scan(n_particles: usize, n_max: usize) -> Result<BoltzmannScan> {
    if n_particles < 4 {
        return Err(Error::invalid(
            "collision-model scan needs at least 4 particles",
        ));
    }
    if n_max < 2 {
        return Err(Error::invalid("scan cap must be at least 2"));
    }
    let ell_max = boltzmann_max_ell(n_particles)?;
    let mut max: Option<ScanExtremum> = None;
    let mut min: Option<ScanExtremum> = None;
    let mut scanned = 0usize;
    for n in 0..=n_max {
        for ell in 0..=(n_max - n).min(ell_max) {
            if n == 0 && ell == 0 {
                continue;
            }
            let value = boltzmann_lambda(n_particles, n, ell)?;
            scanned += 1;
            if max.map_or(true, |m| value > m.value) {
                max = Some(ScanExtremum { n, l: ell, value });
            }
            if min.map_or(true, |m| value < m.value) {
                min = Some(ScanExtremum { n, l: ell, value });
            }
        }
    }
    let max = max.expect("scan set is nonempty");
    let min = min.expect("scan set is nonempty");

    let mut tail_mu: f64 = 0.0;
    for ell in 0..=(n_max + 1).min(ell_max) {
        let n = n_max + 1 - ell;
        tail_mu = tail_mu.max(boltzmann_mu_bound(n_particles, n, ell)?);
    }

    let nm1 = n_particles as f64 - 1.0;
    let lambda_20 = boltzmann_lambda(n_particles, 2, 0)?;
    Ok(BoltzmannScan {
        n_particles,
        n_max,
        indices_scanned: scanned,
        max,
        min,
        beta: 1.0 / (nm1 * nm1),
        lambda_20,
        lambda_20_is_max: max.value <= lambda_20,
        tail_mu,
        tail_dominated: max.value >= tail_mu,
    })
}

/// Smallest N in `n_lo..=n_hi` at which λ_{2,0} attains the scan maximum,
/// if any. Diagnostic for the asymptotic-dominance question; λ_{1,1} stays
/// above λ_{2,0} throughout, so this is expected to return None.
pub fn smallest_n_with_lambda20_max(n_lo: usize, n_hi: usize, n_max: usize) -> Result<Option<usize>> {
    for n_particles in n_lo.max(4)..=n_hi {
        if boltzmann_scan(n_particles, n_max)?.lambda_20_is_max {
            return Ok(Some(n_particles));
        }
    }
    Ok(None)
}

/// Zonal eigenvalue ratio p_d(0)/p_d(1) for S^{N−1} harmonics, evaluated via
/// the Gegenbauer recurrence with parameter λ = (N−2)/2. Coincides with
/// `kac_alpha(N, d)`.
pub fn son_zonal_ratio(n_particles: usize, d: usize) -> Result<f64> {
    if n_particles < 3 {
        return Err(Error::invalid(format!(
            "zonal ratios need at least 3 dimensions (got {n_particles})"
        )));
    }
    if d == 0 {
        return Ok(1.0);
    }
    if d % 2 == 1 {
        return Ok(0.0);
    }
    let lam = (n_particles as f64 - 2.0) / 2.0;
    // At x = 0 the recurrence (m+1)C_{m+1} = 2(m+λ)xC_m − (m+2λ−1)C_{m−1}
    // couples only same-parity degrees.
    let mut even_prev = 1.0; // C_0(0)
    let mut at_zero = 1.0;
    for m in (1..d).step_by(2) {
        let mf = m as f64;
        at_zero = -(mf + 2.0 * lam - 1.0) * even_prev / (mf + 1.0);
        even_prev = at_zero;
    }
    let mut at_one = 1.0; // C_d(1) = binom(d + 2λ − 1, d)
    for j in 1..=d {
        at_one *= (2.0 * lam - 1.0 + j as f64) / j as f64;
    }
    Ok(at_zero / at_one)
}

/// Multiplicity of a spectrum entry: an explicit count, or one copy per
/// spherical-harmonic class of the matching degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Count(u64),
    PerHarmonic,
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Count(c) => s.serialize_u64(*c),
            Multiplicity::PerHarmonic => s.serialize_str("per-harmonic"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(serialize_with = "f17")]
    pub value: f64,
    pub multiplicity: Multiplicity,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumTable {
    pub model: String,
    #[serde(rename = "N")]
    pub n_particles: usize,
    pub entries: Vec<SpectrumEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_bounds: Option<BoltzmannScan>,
}

impl SpectrumTable {
    fn sort_entries(&mut self) {
        self.entries.sort_by(|a, b| {
            b.value
                .partial_cmp(&a.value)
                .expect("spectrum values are finite")
                .then(a.n.cmp(&b.n))
                .then(a.l.cmp(&b.l))
        });
    }

    /// Entries sorted descending, all values in [−1, 1], the constant
    /// eigenfunction present at the top with value 1 and multiplicity 1.
    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::invalid("spectrum table has no entries"));
        }
        for pair in self.entries.windows(2) {
            if pair[0].value < pair[1].value {
                return Err(Error::invalid("spectrum table is not sorted descending"));
            }
        }
        for e in &self.entries {
            if !e.value.is_finite() || e.value.abs() > 1.0 + 1e-12 {
                return Err(Error::invalid(format!(
                    "spectrum value {} outside [−1, 1]",
                    e.value
                )));
            }
        }
        let top = &self.entries[0];
        if (top.value - 1.0).abs() > 1e-12 || top.multiplicity != Multiplicity::Count(1) {
            return Err(Error::invalid(
                "spectrum table must lead with eigenvalue 1 of multiplicity 1",
            ));
        }
        Ok(())
    }
}

pub fn kac_spectrum_table(n_particles: usize, max_degree: usize) -> Result<SpectrumTable> {
    let mut table = SpectrumTable {
        model: "kac-sphere".into(),
        n_particles,
        entries: (0..=max_degree)
            .map(|k| {
                Ok(SpectrumEntry {
                    n: Some(k),
                    l: None,
                    class: None,
                    value: kac_alpha(n_particles, k)?,
                    multiplicity: Multiplicity::Count(1),
                })
            })
            .collect::<Result<_>>()?,
        scan_bounds: None,
    };
    table.sort_entries();
    table.validate()?;
    Ok(table)
}

pub fn son_spectrum_table(n_particles: usize, max_degree: usize) -> Result<SpectrumTable> {
    let mut table = SpectrumTable {
        model: "kac-so-n".into(),
        n_particles,
        entries: (0..=max_degree)
            .map(|d| {
                Ok(SpectrumEntry {
                    n: Some(d),
                    l: None,
                    class: None,
                    value: son_zonal_ratio(n_particles, d)?,
                    multiplicity: if d == 0 {
                        Multiplicity::Count(1)
                    } else {
                        Multiplicity::PerHarmonic
                    },
                })
            })
            .collect::<Result<_>>()?,
        scan_bounds: None,
    };
    table.sort_entries();
    table.validate()?;
    Ok(table)
}

pub fn boltzmann_spectrum_table(n_particles: usize, n_max: usize) -> Result<SpectrumTable> {
    let scan = boltzmann_scan(n_particles, n_max)?;
    let ell_max = boltzmann_max_ell(n_particles)?;
    let mut entries = vec![SpectrumEntry {
        n: Some(0),
        l: Some(0),
        class: None,
        value: 1.0,
        multiplicity: Multiplicity::Count(1),
    }];
    for n in 0..=n_max {
        for ell in 0..=(n_max - n).min(ell_max) {
            if n == 0 && ell == 0 {
                continue;
            }
            entries.push(SpectrumEntry {
                n: Some(n),
                l: Some(ell),
                class: None,
                value: boltzmann_lambda(n_particles, n, ell)?,
                multiplicity: Multiplicity::Count(2 * ell as u64 + 1),
            });
        }
    }
    let mut table = SpectrumTable {
        model: "boltzmann-3d".into(),
        n_particles,
        entries,
        scan_bounds: Some(scan),
    };
    table.sort_entries();
    table.validate()?;
    Ok(table)
}

/// The one-value shuffle kernel K(a,b) = (1 − δ_{ab})/(N−1): eigenvalue 1
/// once and −1/(N−1) with multiplicity N−1.
pub fn shuffle_k_spectrum(n_particles: usize) -> Result<SpectrumTable> {
    if n_particles < 2 {
        return Err(Error::invalid(
            "shuffle spectrum needs at least 2 positions",
        ));
    }
    let mut table = SpectrumTable {
        model: "shuffle".into(),
        n_particles,
        entries: vec![
            SpectrumEntry {
                n: None,
                l: None,
                class: Some("constant".into()),
                value: 1.0,
                multiplicity: Multiplicity::Count(1),
            },
            SpectrumEntry {
                n: None,
                l: None,
                class: Some("standard".into()),
                value: -1.0 / (n_particles as f64 - 1.0),
                multiplicity: Multiplicity::Count(n_particles as u64 - 1),
            },
        ],
        scan_bounds: None,
    };
    table.sort_entries();
    table.validate()?;
    Ok(table)
}

/// Dispatch on the model; `max_degree` caps Gegenbauer degree (sphere, SO(N))
/// or the index scan n+ℓ (three-dimensional collisions).
pub fn spectrum_table(model: &ModelSpec, max_degree: usize) -> Result<SpectrumTable> {
    model.validate()?;
    match model {
        ModelSpec::KacSphere { n, .. } => kac_spectrum_table(*n, max_degree),
        ModelSpec::Boltzmann3d { n, .. } => boltzmann_spectrum_table(*n, max_degree),
        ModelSpec::Shuffle { n, .. } => shuffle_k_spectrum(*n),
        ModelSpec::KacSoN { n, .. } => son_spectrum_table(*n, max_degree),
    }
}

/// Extreme nontrivial kernel eigenvalues (κ_N, β_N) per model; for the
/// three-dimensional collision model the scan details are attached.
#[derive(Clone, Debug, Serialize)]
pub struct KExtremes {
    #[serde(serialize_with = "f17")]
    pub kappa: f64,
    #[serde(serialize_with = "f17")]
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<BoltzmannScan>,
}

pub fn k_extremes(model: &ModelSpec) -> Result<KExtremes> {
    k_extremes_with(model, DEFAULT_SCAN_NMAX)
}

pub fn k_extremes_with(model: &ModelSpec, n_max: usize) -> Result<KExtremes> {
    model.validate()?;
    let n = model.n();
    match model {
        ModelSpec::KacSphere { .. } | ModelSpec::KacSoN { .. } => Ok(KExtremes {
            kappa: kac_kappa(n)?,
            beta: kac_beta(n)?,
            scan: None,
        }),
        ModelSpec::Shuffle { .. } => {
            if n < 3 {
                return Err(Error::invalid(
                    "extreme-eigenvalue report needs at least 3 positions",
                ));
            }
            let nm1 = n as f64 - 1.0;
            Ok(KExtremes {
                kappa: -1.0 / nm1,
                beta: 1.0 / (nm1 * nm1),
                scan: None,
            })
        }
        ModelSpec::Boltzmann3d { .. } => {
            let scan = boltzmann_scan(n, n_max)?;
            Ok(KExtremes {
                kappa: scan.kappa(),
                beta: scan.beta,
                scan: Some(scan),
            })
        }
    }
}
