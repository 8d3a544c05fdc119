//! Model descriptions and walk states for the four collision models.

use serde::{Deserialize, Serialize};

use crate::density::{AngularDensity, ScatteringWeight};
use crate::{Error, Result};

/// One of the supported random collision models.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// N scalar velocities on the energy sphere; pairs rotate by a random
    /// angle drawn from `rho`.
    KacSphere { n: usize, rho: AngularDensity },
    /// N velocities in R^3 with zero total momentum and unit energy; pairs
    /// scatter into a direction weighted by `b`.
    Boltzmann3d { n: usize, b: ScatteringWeight },
    /// Random-transposition walk: each event swaps two card values with
    /// probability p, else does nothing.
    Shuffle { n: usize, p: f64 },
    /// Walk on the rotation group: left-multiply by a random plane rotation
    /// with angle drawn from `rho`.
    KacSoN { n: usize, rho: AngularDensity },
}

impl ModelSpec {
    pub fn kac_uniform(n: usize) -> Self {
        ModelSpec::KacSphere {
            n,
            rho: AngularDensity::uniform(),
        }
    }

    pub fn boltzmann_uniform(n: usize) -> Self {
        ModelSpec::Boltzmann3d {
            n,
            b: ScatteringWeight::Uniform,
        }
    }

    pub fn son_uniform(n: usize) -> Self {
        ModelSpec::KacSoN {
            n,
            rho: AngularDensity::uniform(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ModelSpec::KacSphere { n, .. }
            | ModelSpec::Boltzmann3d { n, .. }
            | ModelSpec::Shuffle { n, .. }
            | ModelSpec::KacSoN { n, .. } => *n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::KacSphere { .. } => "kac-sphere",
            ModelSpec::Boltzmann3d { .. } => "boltzmann-3d",
            ModelSpec::Shuffle { .. } => "shuffle",
            ModelSpec::KacSoN { .. } => "kac-so-n",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::KacSphere { n, rho } => {
                if *n < 2 {
                    return Err(Error::invalid("kac-sphere needs at least 2 particles"));
                }
                rho.validate()
            }
            ModelSpec::Boltzmann3d { n, b } => {
                if *n < 2 {
                    return Err(Error::invalid("boltzmann-3d needs at least 2 particles"));
                }
                b.validate()
            }
            ModelSpec::Shuffle { n, p } => {
                if *n < 2 {
                    return Err(Error::invalid("shuffle needs at least 2 cards"));
                }
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(Error::invalid(format!("shuffle probability {p} outside (0, 1]")));
                }
                Ok(())
            }
            ModelSpec::KacSoN { n, rho } => {
                if *n < 3 {
                    return Err(Error::invalid("kac-so-n needs dimension at least 3"));
                }
                rho.validate()
            }
        }
    }
}

/// Instantaneous state of one trajectory.
#[derive(Clone, Debug, PartialEq)]
pub enum WalkState {
    /// Point on the unit sphere in R^N.
    Sphere(Vec<f64>),
    /// N velocities in R^3, zero total momentum, unit total energy.
    Velocities(Vec<[f64; 3]>),
    /// Permutation `sigma` as the vector `sigma(0), ..., sigma(N-1)`, with
    /// its inverse and sign tracked incrementally.
    Permutation { perm: Vec<usize>, inv: Vec<usize>, parity: i8 },
    /// Rotation matrix, row-major N x N, determinant +1.
    Rotation { n: usize, g: Vec<f64> },
}

impl WalkState {
    pub fn identity_permutation(n: usize) -> Self {
        WalkState::Permutation { perm: (0..n).collect(), inv: (0..n).collect(), parity: 1 }
    }

    pub fn identity_rotation(n: usize) -> Self {
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            g[i * n + i] = 1.0;
        }
        WalkState::Rotation { n, g }
    }

    /// Checks the conservation laws / group constraints of the state to
    /// tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        match self {
            WalkState::Sphere(v) => {
                let norm2: f64 = v.iter().map(|x| x * x).sum();
                if (norm2 - 1.0).abs() > tol {
                    return Err(Error::numerical(format!(
                        "sphere state norm^2 drifted to {norm2:.17}"
                    )));
                }
                Ok(())
            }
            WalkState::Velocities(v) => {
                let mut p = [0.0f64; 3];
                let mut e = 0.0f64;
                for vi in v {
                    for c in 0..3 {
                        p[c] += vi[c];
                        e += vi[c] * vi[c];
                    }
                }
                if (e - 1.0).abs() > tol {
                    return Err(Error::numerical(format!("energy drifted to {e:.17}")));
                }
                let pmax = p.iter().map(|x| x.abs()).fold(0.0, f64::max);
                if pmax > tol {
                    return Err(Error::numerical(format!("momentum drifted to {pmax:.3e}")));
                }
                Ok(())
            }
            WalkState::Permutation { perm, inv, parity } => {
                let n = perm.len();
                if inv.len() != n {
                    return Err(Error::numerical("permutation inverse has wrong length"));
                }
                let mut seen = vec![false; n];
                for (a, &val) in perm.iter().enumerate() {
                    if val >= n || seen[val] {
                        return Err(Error::numerical("state is not a permutation"));
                    }
                    seen[val] = true;
                    if inv[val] != a {
                        return Err(Error::numerical("permutation inverse out of sync"));
                    }
                }
                if permutation_sign(perm) != *parity {
                    return Err(Error::numerical("permutation parity out of sync"));
                }
                Ok(())
            }
            WalkState::Rotation { n, g } => {
                let n = *n;
                if g.len() != n * n {
                    return Err(Error::numerical("rotation matrix has wrong size"));
                }
                for i in 0..n {
                    for j in i..n {
                        let mut dot = 0.0;
                        for k in 0..n {
                            dot += g[i * n + k] * g[j * n + k];
                        }
                        let target = if i == j { 1.0 } else { 0.0 };
                        if (dot - target).abs() > tol {
                            return Err(Error::numerical(format!(
                                "rotation rows ({i},{j}) lost orthonormality by {:.3e}",
                                (dot - target).abs()
                            )));
                        }
                    }
                }
                let det = determinant(n, g);
                if (det - 1.0).abs() > (tol * n as f64).max(tol) {
                    return Err(Error::numerical(format!("rotation determinant drifted to {det:.17}")));
                }
                Ok(())
            }
        }
    }
}

/// Sign of a permutation, +1 or -1, from its cycle structure.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut sign = 1i8;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut a = start;
        while !seen[a] {
            seen[a] = true;
            a = perm[a];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Determinant by LU with partial pivoting (small dense matrices).
pub fn determinant(n: usize, row_major: &[f64]) -> f64 {
    let mut a = row_major.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            det = -det;
        }
        det *= a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}
