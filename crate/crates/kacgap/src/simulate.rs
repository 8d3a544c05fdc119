//! Event-driven simulation of the walks. Trajectories start from exact
//! stationary draws, advance by Poisson-clocked collision events, and are
//! audited against their conservation laws as they run. Ensembles are
//! reproducible bit for bit: every trajectory owns a counter-mode generator
//! keyed by (master seed, trajectory index), and aggregation always runs in
//! index order regardless of the thread schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collision::{
    boltzmann_collide, rotate_pair, sample_angle, sample_pair, sample_scatter_direction,
    shuffle_transpose_values, son_left_rotate,
};
use crate::density::AngleSampler;
use crate::jsonfmt::f17;
use crate::model::{ModelSpec, WalkState};
use crate::poly::sphere_moment;
use crate::verify::{boltzmann_marginal_moment_closed, VerifyCheck};
use crate::{Error, Result};

const AUDIT_EVERY: u64 = 1000;
const AUDIT_TOL: f64 = 1e-9;

/// Draws one state from the stationary law of the model: uniform on the
/// energy sphere, uniform on the zero-momentum energy shell, uniform over
/// permutations, or Haar on the rotation group. All four constructions are
/// exact (Gaussian projections and Fisher-Yates), not approximate.
pub fn sample_stationary<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Result<WalkState> {
    spec.validate()?;
    match spec {
        ModelSpec::KacSphere { n, .. } => {
            let v = unit_gaussian_vector(*n, rng);
            Ok(WalkState::Sphere(v))
        }
        ModelSpec::Boltzmann3d { n, .. } => {
            // An isotropic Gaussian projected onto the zero-momentum
            // subspace stays isotropic there, so normalizing the energy
            // lands uniformly on the constraint manifold.
            loop {
                let mut v: Vec<[f64; 3]> = (0..*n)
                    .map(|_| {
                        [
                            rng.sample(StandardNormal),
                            rng.sample(StandardNormal),
                            rng.sample(StandardNormal),
                        ]
                    })
                    .collect();
                let mut mean = [0.0f64; 3];
                for vi in &v {
                    for c in 0..3 {
                        mean[c] += vi[c];
                    }
                }
                for c in 0..3 {
                    mean[c] /= *n as f64;
                }
                let mut energy = 0.0;
                for vi in &mut v {
                    for c in 0..3 {
                        vi[c] -= mean[c];
                        energy += vi[c] * vi[c];
                    }
                }
                if energy > 1e-300 {
                    let scale = energy.sqrt().recip();
                    for vi in &mut v {
                        for c in 0..3 {
                            vi[c] *= scale;
                        }
                    }
                    return Ok(WalkState::Velocities(v));
                }
            }
        }
        ModelSpec::Shuffle { n, .. } => {
            let mut perm: Vec<usize> = (0..*n).collect();
            // Fisher-Yates
            for i in (1..*n).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let mut inv = vec![0usize; *n];
            for (pos, &val) in perm.iter().enumerate() {
                inv[val] = pos;
            }
            let parity = crate::model::permutation_sign(&perm);
            Ok(WalkState::Permutation { perm, inv, parity })
        }
        ModelSpec::KacSoN { n, .. } => {
            let g = haar_rotation(*n, rng);
            Ok(WalkState::Rotation { n: *n, g })
        }
    }
}

fn unit_gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 > 1e-300 {
            let s = norm2.sqrt().recip();
            return v.iter().map(|x| x * s).collect();
        }
    }
}

/// Haar-distributed rotation: orthonormalize a Gaussian matrix row by row
/// with positive diagonal, then flip the last row if the determinant is -1
/// (a fixed reflection maps the negative coset onto the group uniformly).
fn haar_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    'retry: loop {
        let mut g: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
        for i in 0..n {
            // Re-orthogonalize twice for stability.
            for _ in 0..2 {
                for k in 0..i {
                    let mut dot = 0.0;
                    for c in 0..n {
                        dot += g[i * n + c] * g[k * n + c];
                    }
                    for c in 0..n {
                        g[i * n + c] -= dot * g[k * n + c];
                    }
                }
            }
            let norm2: f64 = (0..n).map(|c| g[i * n + c] * g[i * n + c]).sum();
            if norm2 < 1e-24 {
                continue 'retry;
            }
            let s = norm2.sqrt().recip();
            for c in 0..n {
                g[i * n + c] *= s;
            }
        }
        if crate::model::determinant(n, &g) < 0.0 {
            for c in 0..n {
                g[(n - 1) * n + c] = -g[(n - 1) * n + c];
            }
        }
        return g;
    }
}

/// Scalar observable evaluated along a trajectory. All variants are centered
/// so their stationary mean vanishes (which is what the autocovariance
/// estimator assumes).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "observable", rename_all = "kebab-case")]
pub enum Observable {
    /// `sum_j v_j^4 - 3/(N+2)` on the sphere: the closed-form slowest mode.
    QuarticSum,
    /// `v_index^power` minus its stationary mean, on the sphere.
    CoordinatePower { index: usize, power: u32 },
    /// `|v_index|^2 - 1/N` for the collision model.
    SpeedSquared { index: usize },
    /// Number of fixed points minus 1 (a pure second-eigenvalue function of
    /// the transposition walk).
    FixedPoints,
    /// `perm(0) - perm(1)`: difference of two card values, again a pure
    /// second-eigenvalue function.
    PositionSplit,
    /// A single rotation-matrix entry (stationary mean zero).
    MatrixEntry { row: usize, col: usize },
}

impl Observable {
    /// Stable column name for CSV output.
    pub fn name(&self) -> String {
        match self {
            Observable::QuarticSum => "quartic_sum".into(),
            Observable::CoordinatePower { index, power } => format!("coord{index}_pow{power}"),
            Observable::SpeedSquared { index } => format!("speed2_{index}"),
            Observable::FixedPoints => "fixed_points".into(),
            Observable::PositionSplit => "position_split".into(),
            Observable::MatrixEntry { row, col } => format!("entry_{row}_{col}"),
        }
    }

    /// The natural slowest-decaying observable for each model.
    pub fn default_for(spec: &ModelSpec) -> Observable {
        match spec {
            ModelSpec::KacSphere { .. } => Observable::QuarticSum,
            ModelSpec::Boltzmann3d { .. } => Observable::SpeedSquared { index: 0 },
            ModelSpec::Shuffle { .. } => Observable::PositionSplit,
            ModelSpec::KacSoN { .. } => Observable::MatrixEntry { row: 0, col: 0 },
        }
    }

    pub fn evaluate(&self, state: &WalkState) -> Result<f64> {
        match (self, state) {
            (Observable::QuarticSum, WalkState::Sphere(v)) => {
                let mut k = Kahan::default();
                for x in v {
                    k.add(x * x * x * x);
                }
                Ok(k.value() - 3.0 / (v.len() as f64 + 2.0))
            }
            (Observable::CoordinatePower { index, power }, WalkState::Sphere(v)) => {
                let x = *v
                    .get(*index)
                    .ok_or_else(|| Error::invalid("coordinate index out of range"))?;
                Ok(x.powi(*power as i32) - sphere_moment(v.len(), &[*power]))
            }
            (Observable::SpeedSquared { index }, WalkState::Velocities(v)) => {
                let vi = v
                    .get(*index)
                    .ok_or_else(|| Error::invalid("velocity index out of range"))?;
                let r2 = vi[0] * vi[0] + vi[1] * vi[1] + vi[2] * vi[2];
                Ok(r2 - 1.0 / v.len() as f64)
            }
            (Observable::FixedPoints, WalkState::Permutation { perm, .. }) => {
                let fixed = perm.iter().enumerate().filter(|(i, &v)| *i == v).count();
                Ok(fixed as f64 - 1.0)
            }
            (Observable::PositionSplit, WalkState::Permutation { perm, .. }) => {
                if perm.len() < 2 {
                    return Err(Error::invalid("need at least two cards"));
                }
                Ok(perm[0] as f64 - perm[1] as f64)
            }
            (Observable::MatrixEntry { row, col }, WalkState::Rotation { n, g }) => {
                if *row >= *n || *col >= *n {
                    return Err(Error::invalid("matrix entry out of range"));
                }
                Ok(g[row * n + col])
            }
            _ => Err(Error::invalid(format!(
                "observable {} does not apply to this state",
                self.name()
            ))),
        }
    }
}

/// Everything needed to rerun an ensemble bit for bit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub spec: ModelSpec,
    /// Sampling times, strictly increasing, starting at 0.
    pub times: Vec<f64>,
    pub trajectories: usize,
    pub seed: u64,
    pub observable: Observable,
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.trajectories == 0 {
            return Err(Error::invalid("need at least one trajectory"));
        }
        if self.times.is_empty() {
            return Err(Error::invalid("need at least one sampling time"));
        }
        if self.times[0] != 0.0 {
            return Err(Error::invalid("sampling times must start at 0"));
        }
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid("sampling times must be strictly increasing"));
            }
        }
        if !self.times.iter().all(|t| t.is_finite()) {
            return Err(Error::invalid("sampling times must be finite"));
        }
        Ok(())
    }
}

/// `0, step, 2 step, ..., count*step`.
pub fn uniform_times(step: f64, count: usize) -> Result<Vec<f64>> {
    if !(step > 0.0) || count == 0 {
        return Err(Error::invalid("need a positive step and at least one interval"));
    }
    Ok((0..=count).map(|k| k as f64 * step).collect())
}

/// Observable values on a grid of times for many independent trajectories.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryEnsemble {
    pub spec: ModelSpec,
    pub observable: Observable,
    pub times: Vec<f64>,
    /// `values[m][k]` is the observable of trajectory m at `times[k]`.
    pub values: Vec<Vec<f64>>,
    pub seed: u64,
    pub n_events: u64,
}

/// Generator for trajectory `index` under master seed `seed`: one ChaCha12
/// stream per trajectory, so trajectories are independent and insertion
/// order never matters.
fn trajectory_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct AuditCtx {
    initial_parity: i8,
    successes: u64,
    since_audit: u64,
    events: u64,
}

impl AuditCtx {
    fn new(state: &WalkState) -> Self {
        let initial_parity = match state {
            WalkState::Permutation { parity, .. } => *parity,
            _ => 1,
        };
        AuditCtx { initial_parity, successes: 0, since_audit: 0, events: 0 }
    }

    fn audit(&mut self, state: &WalkState) -> Result<()> {
        state.validate(AUDIT_TOL)?;
        if let WalkState::Permutation { parity, .. } = state {
            let expected = if self.successes % 2 == 0 {
                self.initial_parity
            } else {
                -self.initial_parity
            };
            if *parity != expected {
                return Err(Error::numerical(
                    "permutation parity disagrees with the transposition count",
                ));
            }
        }
        Ok(())
    }
}

/// Advances the state by time `dt`: the number of collision events is
/// Poisson with mean `N dt`, and every `AUDIT_EVERY` events the conservation
/// laws are re-checked to `AUDIT_TOL`.
fn advance<R: Rng + ?Sized>(
    spec: &ModelSpec,
    angle_sampler: Option<&AngleSampler>,
    state: &mut WalkState,
    dt: f64,
    rng: &mut R,
    ctx: &mut AuditCtx,
) -> Result<()> {
    if dt == 0.0 {
        return Ok(());
    }
    let lambda = spec.n() as f64 * dt;
    let count = Poisson::new(lambda)
        .map_err(|e| Error::invalid(format!("bad event rate {lambda}: {e}")))?
        .sample(rng) as u64;
    for _ in 0..count {
        match (spec, &mut *state) {
            (ModelSpec::KacSphere { n, .. }, WalkState::Sphere(v)) => {
                let sampler =
                    angle_sampler.ok_or_else(|| Error::invalid("missing angle sampler"))?;
                let (i, j) = sample_pair(*n, rng);
                let theta = sample_angle(sampler, rng);
                rotate_pair(v, i, j, theta);
            }
            (ModelSpec::Boltzmann3d { n, b }, WalkState::Velocities(v)) => {
                let (i, j) = sample_pair(*n, rng);
                let omega = [
                    v[i][0] - v[j][0],
                    v[i][1] - v[j][1],
                    v[i][2] - v[j][2],
                ];
                let sigma = sample_scatter_direction(b, omega, rng)?;
                boltzmann_collide(v, i, j, sigma);
            }
            (ModelSpec::Shuffle { n, p }, WalkState::Permutation { perm, inv, parity }) => {
                if rng.gen::<f64>() < *p {
                    let (a, b) = sample_pair(*n, rng);
                    shuffle_transpose_values(perm, inv, parity, a, b);
                    ctx.successes += 1;
                }
            }
            (ModelSpec::KacSoN { n, .. }, WalkState::Rotation { g, .. }) => {
                let sampler =
                    angle_sampler.ok_or_else(|| Error::invalid("missing angle sampler"))?;
                let (i, j) = sample_pair(*n, rng);
                let theta = sample_angle(sampler, rng);
                son_left_rotate(g, *n, i, j, theta);
            }
            _ => return Err(Error::invalid("state does not belong to this model")),
        }
        ctx.events += 1;
        ctx.since_audit += 1;
        if ctx.since_audit >= AUDIT_EVERY {
            ctx.since_audit = 0;
            ctx.audit(state)?;
        }
    }
    Ok(())
}

fn angle_sampler_for(spec: &ModelSpec) -> Result<Option<AngleSampler>> {
    match spec {
        ModelSpec::KacSphere { rho, .. } | ModelSpec::KacSoN { rho, .. } => {
            Ok(Some(rho.sampler()?))
        }
        _ => Ok(None),
    }
}

fn run_trajectory(
    plan: &SimulationPlan,
    angle_sampler: Option<&AngleSampler>,
    index: u64,
) -> Result<(Vec<f64>, u64)> {
    let mut rng = trajectory_rng(plan.seed, index);
    let mut state = sample_stationary(&plan.spec, &mut rng)?;
    let mut ctx = AuditCtx::new(&state);
    let mut out = Vec::with_capacity(plan.times.len());
    out.push(plan.observable.evaluate(&state)?);
    for w in plan.times.windows(2) {
        advance(&plan.spec, angle_sampler, &mut state, w[1] - w[0], &mut rng, &mut ctx)?;
        out.push(plan.observable.evaluate(&state)?);
    }
    ctx.audit(&state)?;
    Ok((out, ctx.events))
}

/// Runs the full ensemble. Trajectories run in parallel but the result is
/// identical to a serial run: each one has its own keyed generator and the
/// outputs are collected in trajectory order.
pub fn run_walk(plan: &SimulationPlan) -> Result<TrajectoryEnsemble> {
    plan.validate()?;
    let angle_sampler = angle_sampler_for(&plan.spec)?;
    let results: Vec<(Vec<f64>, u64)> = (0..plan.trajectories as u64)
        .into_par_iter()
        .map(|m| run_trajectory(plan, angle_sampler.as_ref(), m))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(results.len());
    let mut n_events = 0u64;
    for (row, events) in results {
        values.push(row);
        n_events += events;
    }
    Ok(TrajectoryEnsemble {
        spec: plan.spec.clone(),
        observable: plan.observable.clone(),
        times: plan.times.clone(),
        values,
        seed: plan.seed,
        n_events,
    })
}

/// Kahan compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum
    }
}

/// Relaxation-rate estimate from an ensemble autocovariance fit.
#[derive(Clone, Debug, Serialize)]
pub struct GapEstimate {
    #[serde(serialize_with = "f17")]
    pub rate: f64,
    #[serde(serialize_with = "f17")]
    pub stderr: f64,
    /// Time interval actually used for the log-linear fit.
    pub window: [f64; 2],
    pub n_events: u64,
}

/// Fits `log C(t)` by weighted least squares, where `C(t)` is the ensemble
/// autocovariance of the observable between time 0 and time t. The window
/// runs from 0 to the first time the correlation drops below 5% of `C(0)`;
/// the fit refuses degenerate windows rather than guessing.
pub fn estimate_gap(ens: &TrajectoryEnsemble) -> Result<GapEstimate> {
    let m = ens.values.len();
    let k_total = ens.times.len();
    if m < 16 {
        return Err(Error::invalid("need at least 16 trajectories to fit a rate"));
    }
    if ens.values.iter().any(|row| row.len() != k_total) {
        return Err(Error::invalid("ragged ensemble"));
    }
    let mf = m as f64;

    // Column means, compensated.
    let mut means = vec![0.0f64; k_total];
    for (k, mean) in means.iter_mut().enumerate() {
        let mut acc = Kahan::default();
        for row in &ens.values {
            acc.add(row[k]);
        }
        *mean = acc.value() / mf;
    }

    // Autocovariance against time 0 and the spread of the products.
    let mut cov = vec![0.0f64; k_total];
    let mut cov_sq = vec![0.0f64; k_total];
    for k in 0..k_total {
        let mut acc = Kahan::default();
        let mut acc2 = Kahan::default();
        for row in &ens.values {
            let p = (row[0] - means[0]) * (row[k] - means[k]);
            acc.add(p);
            acc2.add(p * p);
        }
        cov[k] = acc.value() / mf;
        cov_sq[k] = acc2.value() / mf;
    }
    let c0 = cov[0];
    if !(c0 > 1e-300) {
        return Err(Error::numerical(
            "observable has no variance at time 0; nothing to fit",
        ));
    }

    // Window: up to the first crossing below 5% of C(0).
    let mut k_end = k_total - 1;
    for k in 1..k_total {
        if cov[k] < 0.05 * c0 {
            k_end = k;
            break;
        }
    }
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for k in 0..=k_end {
        if cov[k] <= 0.0 {
            continue;
        }
        let var_p = (cov_sq[k] - cov[k] * cov[k]).max(0.0);
        let se = (var_p / mf).sqrt();
        if !(se > 0.0) {
            return Err(Error::numerical("degenerate covariance spread in the fit window"));
        }
        ts.push(ens.times[k]);
        ys.push(cov[k].ln());
        // var(log C) ~ (se/C)^2 by the delta method.
        ws.push((cov[k] / se) * (cov[k] / se));
    }
    if ts.len() < 3 {
        return Err(Error::numerical(
            "correlation window collapsed: fewer than 3 usable points",
        ));
    }

    let sw: f64 = ws.iter().sum();
    let swt: f64 = ws.iter().zip(&ts).map(|(w, t)| w * t).sum();
    let swy: f64 = ws.iter().zip(&ys).map(|(w, y)| w * y).sum();
    let swtt: f64 = ws.iter().zip(&ts).map(|(w, t)| w * t * t).sum();
    let swty: f64 = ws.iter().zip(&ts).zip(&ys).map(|((w, t), y)| w * t * y).sum();
    let det = sw * swtt - swt * swt;
    if !(det > 0.0) {
        return Err(Error::numerical("singular least-squares system"));
    }
    let slope = (sw * swty - swt * swy) / det;
    let slope_var = sw / det;
    let rate = -slope;
    if !(rate > 0.0) {
        return Err(Error::numerical(format!(
            "fitted rate {rate:.6e} is not positive; widen the time grid"
        )));
    }
    Ok(GapEstimate {
        rate,
        stderr: slope_var.sqrt(),
        window: [ts[0], *ts.last().expect("nonempty")],
        n_events: ens.n_events,
    })
}

/// Gap heuristic used only to size burn-in times.
fn rough_gap(spec: &ModelSpec) -> f64 {
    let nf = spec.n() as f64;
    match spec {
        ModelSpec::KacSphere { .. } | ModelSpec::KacSoN { .. } => {
            0.5 * (nf + 2.0) / (nf - 1.0).max(1.0)
        }
        ModelSpec::Shuffle { p, .. } => 2.0 * p * nf / (nf - 1.0),
        ModelSpec::Boltzmann3d { .. } => 0.5,
    }
}

/// Starts trajectories from exact stationary draws, runs them for ten
/// relaxation times, and compares low-order marginal moments of the final
/// states against their closed forms at three standard errors. This tests
/// that the event dynamics *preserve* the stationary law.
pub fn stationary_moment_check(
    spec: &ModelSpec,
    samples: usize,
    seed: u64,
) -> Result<Vec<VerifyCheck>> {
    spec.validate()?;
    if samples < 100 {
        return Err(Error::invalid("need at least 100 samples"));
    }
    let t_final = 10.0 / rough_gap(spec);
    let angle_sampler = angle_sampler_for(spec)?;
    let finals: Vec<WalkState> = (0..samples as u64)
        .into_par_iter()
        .map(|m| {
            let mut rng = trajectory_rng(seed, m);
            let mut state = sample_stationary(spec, &mut rng)?;
            let mut ctx = AuditCtx::new(&state);
            advance(spec, angle_sampler.as_ref(), &mut state, t_final, &mut rng, &mut ctx)?;
            ctx.audit(&state)?;
            Ok(state)
        })
        .collect::<Result<_>>()?;

    let n = spec.n();
    let nf = n as f64;
    let mut checks = Vec::new();
    let mut push_moment =
        |id: String, what: &str, samples: &[f64], expected: f64| {
            let mut acc = Kahan::default();
            let mut acc2 = Kahan::default();
            for &x in samples {
                acc.add(x);
                acc2.add(x * x);
            }
            let count = samples.len() as f64;
            let mean = acc.value() / count;
            let var = (acc2.value() / count - mean * mean).max(0.0);
            let tol = 3.0 * (var / count).sqrt();
            checks.push(VerifyCheck::close(id, what, mean, expected, tol));
        };

    match spec {
        ModelSpec::KacSphere { .. } => {
            for order in [2u32, 4, 6] {
                let vals: Vec<f64> = finals
                    .iter()
                    .map(|s| match s {
                        WalkState::Sphere(v) => v[0].powi(order as i32),
                        _ => f64::NAN,
                    })
                    .collect();
                push_moment(
                    format!("stationary-sphere-m{order}"),
                    "evolved sphere states keep the coordinate-moment law",
                    &vals,
                    sphere_moment(n, &[order]),
                );
            }
        }
        ModelSpec::Boltzmann3d { .. } => {
            let rescale = nf / (nf - 1.0);
            for order in [2u32, 4, 6] {
                let vals: Vec<f64> = finals
                    .iter()
                    .map(|s| match s {
                        WalkState::Velocities(v) => {
                            let r2 = v[0][0] * v[0][0] + v[0][1] * v[0][1] + v[0][2] * v[0][2];
                            (rescale * r2).powi((order / 2) as i32)
                        }
                        _ => f64::NAN,
                    })
                    .collect();
                push_moment(
                    format!("stationary-ball-m{order}"),
                    "evolved collision states keep the single-velocity moment law",
                    &vals,
                    boltzmann_marginal_moment_closed(n, order)?,
                );
            }
        }
        ModelSpec::Shuffle { .. } => {
            for order in [1u32, 2, 3] {
                let vals: Vec<f64> = finals
                    .iter()
                    .map(|s| match s {
                        WalkState::Permutation { perm, .. } => (perm[0] as f64).powi(order as i32),
                        _ => f64::NAN,
                    })
                    .collect();
                let expected =
                    (0..n).map(|j| (j as f64).powi(order as i32)).sum::<f64>() / nf;
                push_moment(
                    format!("stationary-card-m{order}"),
                    "evolved permutations keep card values uniform",
                    &vals,
                    expected,
                );
            }
        }
        ModelSpec::KacSoN { .. } => {
            // The first column of a Haar rotation is uniform on the sphere.
            for order in [2u32, 4, 6] {
                let vals: Vec<f64> = finals
                    .iter()
                    .map(|s| match s {
                        WalkState::Rotation { g, .. } => g[0].powi(order as i32),
                        _ => f64::NAN,
                    })
                    .collect();
                push_moment(
                    format!("stationary-rotation-m{order}"),
                    "evolved rotations keep the Haar column law",
                    &vals,
                    sphere_moment(n, &[order]),
                );
            }
        }
    }
    Ok(checks)
}
