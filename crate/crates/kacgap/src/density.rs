//! Angular collision densities on [-pi, pi) and scattering weights on the
//! sphere, with the Fourier-moment and sampling machinery the rest of the
//! toolkit builds on.
//!
//! A density is either a finite cosine series
//! `rho(theta) = 1/(2*pi) + sum_k a_k cos(k*theta)` (moments exact) or a
//! pointwise grid on equally spaced angles (moments by the periodic
//! rectangle rule, which is spectrally accurate for smooth data).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

pub const DEFAULT_GRID: usize = 4096;

/// Even probability density for the collision angle on [-pi, pi).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AngularDensity {
    /// Cosine-series coefficients `a_1..a_M` (series form; empty for uniform).
    #[serde(rename = "a_k")]
    coeffs: Vec<f64>,
    /// Resolution used for grid checks, sampling tables, and grid moments.
    #[serde(rename = "grid")]
    grid_resolution: usize,
    /// Pointwise values at `theta_i = -pi + 2*pi*i/n` (grid form only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    values: Option<Vec<f64>>,
}

impl AngularDensity {
    pub fn uniform() -> Self {
        AngularDensity { coeffs: Vec::new(), grid_resolution: DEFAULT_GRID, values: None }
    }

    /// Series form from raw coefficients: `rho = 1/(2*pi) + sum a_k cos(k*theta)`.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        let rho = AngularDensity { coeffs, grid_resolution: DEFAULT_GRID, values: None };
        rho.validate()?;
        Ok(rho)
    }

    /// Series form from unit-normalized coefficients:
    /// `rho = (1 + sum c_k cos(k*theta)) / (2*pi)`.
    pub fn from_unit_coeffs(unit: &[f64]) -> Result<Self> {
        Self::from_coeffs(unit.iter().map(|c| c / (2.0 * PI)).collect())
    }

    /// Grid form: `values[i] = rho(-pi + 2*pi*i/n)`, n = values.len().
    pub fn from_grid(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 16 {
            return Err(Error::invalid(format!("density grid too coarse ({n} points, need >= 16)")));
        }
        let rho = AngularDensity { coeffs: Vec::new(), grid_resolution: n, values: Some(values) };
        rho.validate()?;
        Ok(rho)
    }

    pub fn is_uniform(&self) -> bool {
        self.values.is_none() && self.coeffs.iter().all(|&a| a == 0.0)
    }

    pub fn is_series(&self) -> bool {
        self.values.is_none()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn grid_resolution(&self) -> usize {
        self.grid_resolution
    }

    /// Highest cosine frequency the representation resolves.
    pub fn max_frequency(&self) -> usize {
        match &self.values {
            None => self.coeffs.len(),
            Some(v) => v.len() / 8,
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        match &self.values {
            None => {
                let mut v = 1.0 / (2.0 * PI);
                for (k, a) in self.coeffs.iter().enumerate() {
                    v += a * ((k + 1) as f64 * theta).cos();
                }
                v
            }
            Some(vals) => {
                let n = vals.len() as f64;
                let mut t = (theta + PI).rem_euclid(2.0 * PI) / (2.0 * PI) * n;
                if t >= n {
                    t -= n;
                }
                let i = t.floor() as usize;
                let frac = t - i as f64;
                let a = vals[i % vals.len()];
                let b = vals[(i + 1) % vals.len()];
                a + frac * (b - a)
            }
        }
    }

    /// `integral of cos(k*theta) * rho(theta)` over one period.
    pub fn cosine_moment(&self, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        match &self.values {
            None => {
                if k <= self.coeffs.len() {
                    PI * self.coeffs[k - 1]
                } else {
                    0.0
                }
            }
            Some(vals) => {
                let n = vals.len();
                let h = 2.0 * PI / n as f64;
                let mut acc = 0.0;
                let mut comp = 0.0;
                for (i, &v) in vals.iter().enumerate() {
                    let theta = -PI + h * i as f64;
                    let term = v * (k as f64 * theta).cos() * h;
                    let y = term - comp;
                    let t = acc + y;
                    comp = (t - acc) - y;
                    acc = t;
                }
                acc
            }
        }
    }

    /// Checks normalization, evenness, and nonnegativity.
    pub fn validate(&self) -> Result<()> {
        match &self.values {
            None => {
                let n = self.grid_resolution.max(512);
                let mut min_val = f64::INFINITY;
                for i in 0..n {
                    let theta = -PI + 2.0 * PI * i as f64 / n as f64;
                    min_val = min_val.min(self.value(theta));
                }
                if min_val < -1e-12 {
                    return Err(Error::invalid(format!(
                        "density is negative (min value {min_val:.3e}); series coefficients too large"
                    )));
                }
            }
            Some(vals) => {
                let n = vals.len();
                if vals.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("density grid contains non-finite values"));
                }
                if let Some(&bad) = vals.iter().find(|&&v| v < -1e-12) {
                    return Err(Error::invalid(format!("density grid is negative ({bad:.3e})")));
                }
                let total: f64 = vals.iter().sum::<f64>() * 2.0 * PI / n as f64;
                if (total - 1.0).abs() > 1e-8 {
                    return Err(Error::invalid(format!(
                        "density grid integrates to {total:.12}, expected 1"
                    )));
                }
                for i in 1..n {
                    let mirror = vals[n - i];
                    if (vals[i] - mirror).abs() > 1e-8 {
                        return Err(Error::invalid(format!(
                            "density grid is not even in theta (index {i}: {} vs {})",
                            vals[i], mirror
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Cumulative distribution on [-pi, pi]; exact for series form.
    pub fn cdf(&self, theta: f64) -> f64 {
        let t = theta.clamp(-PI, PI);
        match &self.values {
            None => {
                let mut c = (t + PI) / (2.0 * PI);
                for (i, a) in self.coeffs.iter().enumerate() {
                    let k = (i + 1) as f64;
                    // integral of cos(k s) over [-pi, t] = sin(k t)/k (sin(-k pi) = 0)
                    c += a * (k * t).sin() / k;
                }
                c
            }
            Some(vals) => {
                let n = vals.len();
                let h = 2.0 * PI / n as f64;
                let pos = (t + PI) / h;
                let full = (pos.floor() as usize).min(n - 1);
                let mut acc = 0.0;
                for (i, &v) in vals.iter().enumerate().take(full) {
                    let next = vals[(i + 1) % n];
                    acc += 0.5 * (v + next) * h;
                }
                let frac = pos - full as f64;
                if frac > 0.0 && full < n {
                    let v0 = vals[full];
                    let v1 = vals[(full + 1) % n];
                    let dv = v1 - v0;
                    acc += (v0 + 0.5 * dv * frac) * frac * h;
                }
                acc
            }
        }
    }

    /// Precomputed inverse-CDF table for O(1) angle sampling.
    pub fn sampler(&self) -> Result<AngleSampler> {
        AngleSampler::build(self, self.grid_resolution.max(1024))
    }
}

/// Equi-probable inverse-CDF table: `theta_at[j]` is the angle where the CDF
/// reaches `j / (len-1)`.
#[derive(Clone, Debug)]
pub struct AngleSampler {
    theta_at: Vec<f64>,
}

impl AngleSampler {
    fn build(rho: &AngularDensity, resolution: usize) -> Result<Self> {
        let n = resolution;
        let mut thetas = Vec::with_capacity(n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let theta = -PI + 2.0 * PI * i as f64 / n as f64;
            thetas.push(theta);
            cdf.push(rho.cdf(theta));
        }
        cdf[0] = 0.0;
        let end = cdf[n];
        if !(end > 0.0) || (end - 1.0).abs() > 1e-6 {
            return Err(Error::numerical(format!("density CDF ends at {end}, expected 1")));
        }
        for c in cdf.iter_mut() {
            *c /= end;
        }
        // Enforce monotonicity against roundoff so inversion is well defined.
        for i in 1..=n {
            if cdf[i] < cdf[i - 1] {
                cdf[i] = cdf[i - 1];
            }
        }
        cdf[n] = 1.0;
        let m = n;
        let mut theta_at = Vec::with_capacity(m + 1);
        let mut lo = 0usize;
        for j in 0..=m {
            let u = j as f64 / m as f64;
            while lo + 1 < cdf.len() && cdf[lo + 1] < u {
                lo += 1;
            }
            let hi = (lo + 1).min(n);
            let (c0, c1) = (cdf[lo], cdf[hi]);
            let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
            theta_at.push(thetas[lo] + t * (thetas[hi] - thetas[lo]));
        }
        Ok(AngleSampler { theta_at })
    }

    /// Maps a uniform variate in [0, 1) to an angle in [-pi, pi).
    pub fn sample(&self, u: f64) -> f64 {
        let m = (self.theta_at.len() - 1) as f64;
        let pos = (u.clamp(0.0, 1.0)) * m;
        let i = (pos.floor() as usize).min(self.theta_at.len() - 2);
        let frac = pos - i as f64;
        self.theta_at[i] + frac * (self.theta_at[i + 1] - self.theta_at[i])
    }
}

/// Scattering weight `b(u)` on `u = cos(angle) in [-1, 1]`, normalized so
/// `2*pi * integral b(u) du = 1`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub enum ScatteringWeight {
    /// `b = 1/(4*pi)`, the isotropic kernel.
    Uniform,
    /// Pointwise values at `u_i = -1 + 2*i/(n-1)`.
    Grid { values: Vec<f64> },
}

impl ScatteringWeight {
    pub fn from_grid(values: Vec<f64>) -> Result<Self> {
        let b = ScatteringWeight::Grid { values };
        b.validate()?;
        Ok(b)
    }

    /// Rescales arbitrary nonnegative grid data to the unit normalization.
    pub fn normalized_from_grid(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("scattering grid needs at least 2 points"));
        }
        let total = 2.0 * PI * trapezoid_unit_interval(&values);
        if !(total > 0.0) {
            return Err(Error::invalid("scattering grid has zero mass"));
        }
        for v in values.iter_mut() {
            *v /= total;
        }
        Self::from_grid(values)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScatteringWeight::Uniform => Ok(()),
            ScatteringWeight::Grid { values } => {
                if values.len() < 2 {
                    return Err(Error::invalid("scattering grid needs at least 2 points"));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::invalid("scattering grid must be finite and nonnegative"));
                }
                let total = 2.0 * PI * trapezoid_unit_interval(values);
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::invalid(format!(
                        "scattering weight normalizes to {total:.12}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            ScatteringWeight::Uniform => 1.0 / (4.0 * PI),
            ScatteringWeight::Grid { values } => {
                let n = values.len();
                let pos = (u.clamp(-1.0, 1.0) + 1.0) / 2.0 * (n - 1) as f64;
                let i = (pos.floor() as usize).min(n - 2);
                let frac = pos - i as f64;
                values[i] + frac * (values[i + 1] - values[i])
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            ScatteringWeight::Uniform => 1.0 / (4.0 * PI),
            ScatteringWeight::Grid { values } => values.iter().cloned().fold(0.0, f64::max),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, ScatteringWeight::Uniform)
    }
}

fn trapezoid_unit_interval(values: &[f64]) -> f64 {
    let n = values.len();
    let h = 2.0 / (n - 1) as f64;
    let interior: f64 = values[1..n - 1].iter().sum();
    h * (interior + 0.5 * (values[0] + values[n - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_moments_vanish() {
        let rho = AngularDensity::uniform();
        assert_eq!(rho.cosine_moment(0), 1.0);
        for k in 1..8 {
            assert_eq!(rho.cosine_moment(k), 0.0);
        }
        assert!(rho.is_uniform());
    }

    #[test]
    fn series_moments_are_pi_times_coefficient() {
        let rho = AngularDensity::from_unit_coeffs(&[0.5, -0.1]).unwrap();
        assert_abs_diff_eq!(rho.cosine_moment(1), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.cosine_moment(2), -0.05, epsilon = 1e-15);
        assert_eq!(rho.cosine_moment(3), 0.0);
    }

    #[test]
    fn series_integrates_to_one() {
        let rho = AngularDensity::from_unit_coeffs(&[0.3, 0.2, -0.1]).unwrap();
        let n = 1 << 14;
        let mut total = 0.0;
        for i in 0..n {
            let theta = -PI + 2.0 * PI * i as f64 / n as f64;
            total += rho.value(theta);
        }
        total *= 2.0 * PI / n as f64;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn negative_series_rejected() {
        assert!(AngularDensity::from_unit_coeffs(&[1.5]).is_err());
    }

    #[test]
    fn grid_form_matches_series_moments() {
        let series = AngularDensity::from_unit_coeffs(&[0.5]).unwrap();
        let n = 512;
        let vals: Vec<f64> = (0..n)
            .map(|i| series.value(-PI + 2.0 * PI * i as f64 / n as f64))
            .collect();
        let grid = AngularDensity::from_grid(vals).unwrap();
        for k in 0..6 {
            assert_abs_diff_eq!(grid.cosine_moment(k), series.cosine_moment(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_rejects_odd_density() {
        let n = 64;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let theta = -PI + 2.0 * PI * i as f64 / n as f64;
                (1.0 + 0.5 * theta.sin()) / (2.0 * PI)
            })
            .collect();
        assert!(AngularDensity::from_grid(vals).is_err());
    }

    #[test]
    fn grid_rejects_bad_normalization() {
        let vals = vec![1.0; 64];
        assert!(AngularDensity::from_grid(vals).is_err());
    }

    #[test]
    fn cdf_endpoints() {
        let rho = AngularDensity::from_unit_coeffs(&[0.4, 0.1]).unwrap();
        assert_abs_diff_eq!(rho.cdf(-PI), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.cdf(PI), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.cdf(0.0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn sampler_inverts_cdf() {
        let rho = AngularDensity::from_unit_coeffs(&[0.5]).unwrap();
        let sampler = rho.sampler().unwrap();
        for &u in &[0.01, 0.2, 0.5, 0.77, 0.99] {
            let theta = sampler.sample(u);
            assert_abs_diff_eq!(rho.cdf(theta), u, epsilon = 1e-5);
        }
        assert_abs_diff_eq!(sampler.sample(0.5), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn sampler_histogram_matches_density() {
        let rho = AngularDensity::from_unit_coeffs(&[0.6]).unwrap();
        let sampler = rho.sampler().unwrap();
        let m = 200_000;
        let bins = 16;
        let mut hist = vec![0usize; bins];
        // Low-discrepancy sweep of u; tests the table, not an RNG.
        for i in 0..m {
            let u = (i as f64 + 0.5) / m as f64;
            let theta = sampler.sample(u);
            let b = (((theta + PI) / (2.0 * PI)) * bins as f64).floor() as usize;
            hist[b.min(bins - 1)] += 1;
        }
        for (b, &count) in hist.iter().enumerate() {
            let lo = -PI + 2.0 * PI * b as f64 / bins as f64;
            let hi = -PI + 2.0 * PI * (b + 1) as f64 / bins as f64;
            let expect = (rho.cdf(hi) - rho.cdf(lo)) * m as f64;
            let got = count as f64;
            assert!(
                (got - expect).abs() < 0.01 * m as f64 / bins as f64 + 3.0,
                "bin {b}: got {got}, expected {expect:.1}"
            );
        }
    }

    #[test]
    fn scattering_uniform_is_normalized() {
        let b = ScatteringWeight::Uniform;
        b.validate().unwrap();
        assert_abs_diff_eq!(b.value(0.3), 1.0 / (4.0 * PI), epsilon = 1e-16);
    }

    #[test]
    fn scattering_grid_normalization() {
        let n = 101;
        let raw: Vec<f64> = (0..n)
            .map(|i| {
                let u = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                1.0 + 0.5 * u * u
            })
            .collect();
        let b = ScatteringWeight::normalized_from_grid(raw).unwrap();
        b.validate().unwrap();
        assert!(b.max_value() > 0.0);
    }

    #[test]
    fn scattering_rejects_unnormalized() {
        assert!(ScatteringWeight::from_grid(vec![1.0; 11]).is_err());
    }
}
