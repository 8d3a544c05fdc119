//! Elementary collision updates and the random draws that feed them.

use rand::Rng;

use crate::density::{AngleSampler, ScatteringWeight};
use crate::{Error, Result};

/// Rotates the pair `(v[i], v[j])` by `theta`:
/// `v_i' = v_i cos(theta) + v_j sin(theta)`, `v_j' = -v_i sin(theta) + v_j cos(theta)`.
pub fn rotate_pair(v: &mut [f64], i: usize, j: usize, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let (vi, vj) = (v[i], v[j]);
    v[i] = vi * c + vj * s;
    v[j] = -vi * s + vj * c;
}

/// Binary collision in R^3: the pair keeps its total momentum and kinetic
/// energy while the relative velocity is redirected to `sigma` (unit vector).
pub fn boltzmann_collide(v: &mut [[f64; 3]], i: usize, j: usize, sigma: [f64; 3]) {
    let mut center = [0.0; 3];
    let mut rel = [0.0; 3];
    for c in 0..3 {
        center[c] = 0.5 * (v[i][c] + v[j][c]);
        rel[c] = v[i][c] - v[j][c];
    }
    let half_speed = 0.5 * (rel[0] * rel[0] + rel[1] * rel[1] + rel[2] * rel[2]).sqrt();
    for c in 0..3 {
        v[i][c] = center[c] + half_speed * sigma[c];
        v[j][c] = center[c] - half_speed * sigma[c];
    }
}

/// Left-multiplies the permutation by the transposition of the *values*
/// `a` and `b`, keeping the inverse and sign in sync.
pub fn shuffle_transpose_values(
    perm: &mut [usize],
    inv: &mut [usize],
    parity: &mut i8,
    a: usize,
    b: usize,
) {
    debug_assert_ne!(a, b);
    let pa = inv[a];
    let pb = inv[b];
    perm.swap(pa, pb);
    inv.swap(a, b);
    *parity = -*parity;
}

/// Left-multiplies the row-major rotation matrix `g` by the plane rotation
/// acting on coordinates `(i, j)`, i.e. mixes rows i and j of `g`.
pub fn son_left_rotate(g: &mut [f64], n: usize, i: usize, j: usize, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    for col in 0..n {
        let gi = g[i * n + col];
        let gj = g[j * n + col];
        g[i * n + col] = gi * c + gj * s;
        g[j * n + col] = -gi * s + gj * c;
    }
}

/// Draws a collision angle from the precomputed inverse-CDF table.
pub fn sample_angle<R: Rng + ?Sized>(sampler: &AngleSampler, rng: &mut R) -> f64 {
    sampler.sample(rng.gen::<f64>())
}

/// Draws an ordered pair `i < j` uniformly among the N(N-1)/2 pairs.
pub fn sample_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    debug_assert!(n >= 2);
    loop {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            return (i.min(j), i.max(j));
        }
    }
}

/// Draws the post-collision relative direction `sigma` for scattering weight
/// `b`, measured against the incoming relative direction `omega`.
///
/// When `omega` is (numerically) zero the scattering angle is irrelevant and
/// the result falls back to an isotropic draw.
pub fn sample_scatter_direction<R: Rng + ?Sized>(
    b: &ScatteringWeight,
    omega: [f64; 3],
    rng: &mut R,
) -> Result<[f64; 3]> {
    let norm = (omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]).sqrt();
    if b.is_uniform() || norm < 1e-300 {
        return Ok(isotropic_direction(rng));
    }
    let axis = [omega[0] / norm, omega[1] / norm, omega[2] / norm];
    let peak = b.max_value();
    if !(peak > 0.0) {
        return Err(Error::invalid("scattering weight has zero peak"));
    }
    // Rejection sampling for u = cos(angle to omega); density on [-1,1] is
    // proportional to b(u).
    let mut u = 0.0;
    let mut accepted = false;
    for _ in 0..100_000 {
        let cand = rng.gen_range(-1.0..=1.0);
        if rng.gen::<f64>() * peak <= b.value(cand) {
            u = cand;
            accepted = true;
            break;
        }
    }
    if !accepted {
        return Err(Error::numerical("scattering-angle rejection sampling stalled"));
    }
    let (e1, e2) = orthonormal_frame(axis);
    let phi = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    let r = (1.0 - u * u).max(0.0).sqrt();
    let (cp, sp) = (phi.cos(), phi.sin());
    Ok([
        u * axis[0] + r * (cp * e1[0] + sp * e2[0]),
        u * axis[1] + r * (cp * e1[1] + sp * e2[1]),
        u * axis[2] + r * (cp * e1[2] + sp * e2[2]),
    ])
}

/// Uniform point on the unit sphere in R^3.
pub fn isotropic_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Two unit vectors completing `axis` (unit) to an orthonormal frame.
fn orthonormal_frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    // Start from the coordinate axis least aligned with `axis`.
    let pick = if axis[0].abs() <= axis[1].abs() && axis[0].abs() <= axis[2].abs() {
        [1.0, 0.0, 0.0]
    } else if axis[1].abs() <= axis[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let dot = pick[0] * axis[0] + pick[1] * axis[1] + pick[2] * axis[2];
    let mut e1 = [pick[0] - dot * axis[0], pick[1] - dot * axis[1], pick[2] - dot * axis[2]];
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for c in e1.iter_mut() {
        *c /= n1;
    }
    let e2 = [
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::AngularDensity;
    use crate::model::{permutation_sign, WalkState};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn rotate_pair_preserves_norm_and_composes() {
        let mut v = vec![0.3, -0.7, 0.648074069840786];
        let norm0: f64 = v.iter().map(|x| x * x).sum();
        rotate_pair(&mut v, 0, 2, 0.4);
        rotate_pair(&mut v, 0, 2, 0.9);
        let norm1: f64 = v.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(norm0, norm1, epsilon = 1e-15);

        let mut w = vec![0.3, -0.7, 0.648074069840786];
        rotate_pair(&mut w, 0, 2, 1.3);
        for (a, b) in v.iter().zip(w.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn rotate_pair_zero_angle_is_identity() {
        let mut v = vec![0.1, 0.2, 0.3];
        rotate_pair(&mut v, 0, 1, 0.0);
        assert_eq!(v, vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn boltzmann_collision_conserves_momentum_and_energy() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mut v = vec![[0.3, 0.1, -0.2], [-0.1, 0.4, 0.2], [-0.2, -0.5, 0.0]];
        let p0: [f64; 3] = [0.0, 0.0, 0.0];
        let p_before = v.iter().fold(p0, |mut acc, x| {
            for c in 0..3 {
                acc[c] += x[c];
            }
            acc
        });
        let e_before: f64 = v.iter().flat_map(|x| x.iter()).map(|x| x * x).sum();
        for _ in 0..50 {
            let sigma = isotropic_direction(&mut rng);
            boltzmann_collide(&mut v, 0, 1, sigma);
            let sigma = isotropic_direction(&mut rng);
            boltzmann_collide(&mut v, 1, 2, sigma);
        }
        let p_after = v.iter().fold(p0, |mut acc, x| {
            for c in 0..3 {
                acc[c] += x[c];
            }
            acc
        });
        let e_after: f64 = v.iter().flat_map(|x| x.iter()).map(|x| x * x).sum();
        for c in 0..3 {
            assert_abs_diff_eq!(p_before[c], p_after[c], epsilon = 1e-13);
        }
        assert_abs_diff_eq!(e_before, e_after, epsilon = 1e-13);
    }

    #[test]
    fn shuffle_transposition_acts_on_values() {
        // sigma = [2, 0, 1]; swapping values 0 and 2 gives [0, 2, 1].
        let mut perm = vec![2usize, 0, 1];
        let mut inv = vec![1usize, 2, 0];
        let mut parity = permutation_sign(&perm);
        shuffle_transpose_values(&mut perm, &mut inv, &mut parity, 0, 2);
        assert_eq!(perm, vec![0, 2, 1]);
        let state = WalkState::Permutation { perm, inv, parity };
        state.validate(0.0).unwrap();
    }

    #[test]
    fn shuffle_transposition_is_involution() {
        let mut perm: Vec<usize> = vec![3, 1, 4, 0, 2];
        let mut inv = vec![0usize; 5];
        for (pos, &val) in perm.iter().enumerate() {
            inv[val] = pos;
        }
        let mut parity = permutation_sign(&perm);
        let orig = perm.clone();
        shuffle_transpose_values(&mut perm, &mut inv, &mut parity, 1, 4);
        assert_ne!(perm, orig);
        shuffle_transpose_values(&mut perm, &mut inv, &mut parity, 1, 4);
        assert_eq!(perm, orig);
        assert_eq!(parity, permutation_sign(&perm));
    }

    #[test]
    fn son_rotation_keeps_special_orthogonal() {
        let n = 4;
        let mut state = WalkState::identity_rotation(n);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        if let WalkState::Rotation { g, .. } = &mut state {
            for _ in 0..200 {
                let (i, j) = sample_pair(n, &mut rng);
                let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                son_left_rotate(g, n, i, j, theta);
            }
        }
        state.validate(1e-12).unwrap();
    }

    #[test]
    fn son_rotation_matches_rotate_pair_on_columns() {
        let n = 3;
        let mut g = vec![0.2, 0.5, -0.1, 0.7, -0.3, 0.4, 0.0, 0.9, 0.6];
        let mut cols: Vec<Vec<f64>> = (0..n).map(|c| (0..n).map(|r| g[r * n + c]).collect()).collect();
        son_left_rotate(&mut g, n, 0, 2, 0.77);
        for (c, col) in cols.iter_mut().enumerate() {
            rotate_pair(col, 0, 2, 0.77);
            for r in 0..n {
                assert_abs_diff_eq!(g[r * n + c], col[r], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn pair_sampling_uniform_over_pairs() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let n = 5;
        let pairs = n * (n - 1) / 2;
        let mut counts = vec![0usize; n * n];
        let draws = 60_000;
        for _ in 0..draws {
            let (i, j) = sample_pair(n, &mut rng);
            assert!(i < j);
            counts[i * n + j] += 1;
        }
        let expect = draws as f64 / pairs as f64;
        for i in 0..n {
            for j in i + 1..n {
                let got = counts[i * n + j] as f64;
                assert!(
                    (got - expect).abs() < 6.0 * expect.sqrt(),
                    "pair ({i},{j}) count {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn isotropic_direction_is_unit_and_balanced() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut mean = [0.0f64; 3];
        let m = 40_000;
        for _ in 0..m {
            let d = isotropic_direction(&mut rng);
            let norm: f64 = d.iter().map(|x| x * x).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            for c in 0..3 {
                mean[c] += d[c];
            }
        }
        for c in 0..3 {
            assert!((mean[c] / m as f64).abs() < 0.02);
        }
    }

    #[test]
    fn scatter_direction_follows_grid_weight() {
        // b(u) proportional to (1 + u)^2: forward-peaked.
        let npts = 201;
        let raw: Vec<f64> = (0..npts)
            .map(|i| {
                let u = -1.0 + 2.0 * i as f64 / (npts - 1) as f64;
                (1.0 + u) * (1.0 + u)
            })
            .collect();
        let b = ScatteringWeight::normalized_from_grid(raw).unwrap();
        let omega = [0.0, 0.0, 1.0];
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let m = 50_000;
        let mut mean_u = 0.0;
        for _ in 0..m {
            let sigma = sample_scatter_direction(&b, omega, &mut rng).unwrap();
            let norm: f64 = sigma.iter().map(|x| x * x).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            mean_u += sigma[2];
        }
        mean_u /= m as f64;
        // E[u] for density prop. to (1+u)^2 on [-1,1] is 1/2.
        assert!((mean_u - 0.5).abs() < 0.02, "mean cos angle {mean_u}");
    }

    #[test]
    fn angle_sampler_histogram() {
        let rho = AngularDensity::from_unit_coeffs(&[0.0, 0.5]).unwrap();
        let sampler = rho.sampler().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        let m = 80_000;
        let mut mean_cos2 = 0.0;
        for _ in 0..m {
            let theta = sample_angle(&sampler, &mut rng);
            mean_cos2 += (2.0 * theta).cos();
        }
        mean_cos2 /= m as f64;
        // E[cos 2 theta] = pi * a_2 = 0.25
        assert!((mean_cos2 - 0.25).abs() < 0.02, "mean cos 2theta {mean_cos2}");
    }
}
