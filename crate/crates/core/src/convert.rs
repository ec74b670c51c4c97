//! Target-state fidelities, multi-start optimization of the pulse parameters,
//! branch tracking across the GHZ phase, and the minimal-duration scan.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI, TAU};

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::StateVector;
use crate::nelder_mead::{minimize, NelderMeadOptions};
use crate::operators::{ghz_state, w_state};
use crate::pulses::{sequence_unitary_full, u_c_entries, Direction, PulseParams};
use crate::scalar::{angle_diff, cis, wrap_angle, Real};

/// Optimal Ising duration ξ₀ = arccos(1/3)/4, which is also the optimal α₂.
pub fn xi_opt() -> f64 {
    (1.0f64 / 3.0).acos() / 4.0
}

/// Optimal first-pulse angle α₁.
pub const ALPHA1_OPT: f64 = FRAC_PI_4;

/// `|⟨GHZ(φ)| 𝒰 |W⟩|` for the W→GHZ sequence, in the ζ basis.
pub fn ghz_fidelity<T: Real>(p: &PulseParams<T>, phi: T) -> T {
    let a1 = u_c_entries(p.alpha1, p.phi1);
    let a2 = u_c_entries(p.alpha2, p.phi2);
    let zz = zz_phases(p.xi);
    // |W⟩ = |ζ₁⟩ and ⟨GHZ(φ)| = (⟨ζ₀| + e^{−iφ}⟨ζ₃|)/√2.
    let mut amp0 = Complex::<T>::zero();
    let mut amp3 = Complex::<T>::zero();
    for k in 0..4 {
        let w = zz[k] * a1[k][1];
        amp0 = amp0 + a2[0][k] * w;
        amp3 = amp3 + a2[3][k] * w;
    }
    (amp0 + cis(-phi) * amp3).norm() * T::FRAC_1_SQRT_2()
}

/// `|⟨W| 𝒰 |GHZ(φ)⟩|` for the GHZ→W sequence, in the ζ basis.
pub fn w_fidelity<T: Real>(p: &PulseParams<T>, phi: T) -> T {
    let a1 = u_c_entries(p.alpha1, p.phi1);
    let a2 = u_c_entries(p.alpha2, p.phi2);
    let zz = zz_phases(p.xi);
    let e = cis(phi);
    let amp = (0..4).fold(Complex::<T>::zero(), |acc, k| acc + a1[1][k] * zz[k] * (a2[k][0] + e * a2[k][3]));
    amp.norm() * T::FRAC_1_SQRT_2()
}

fn zz_phases<T: Real>(xi: T) -> [Complex<T>; 4] {
    let outer = cis(-T::lit(3.0) * xi);
    let inner = cis(xi);
    [outer, inner, inner, outer]
}

/// Fidelity appropriate to the conversion direction.
pub fn fidelity<T: Real>(p: &PulseParams<T>, phi: T, d: Direction) -> T {
    match d {
        Direction::WToGhz => ghz_fidelity(p, phi),
        Direction::GhzToW => w_fidelity(p, phi),
    }
}

/// Same quantity as [`fidelity`], evaluated with 8×8 operators and states.
pub fn fidelity_full<T: Real>(p: &PulseParams<T>, phi: T, d: Direction) -> T {
    let u = sequence_unitary_full(p, d);
    let (from, to): (StateVector<T>, StateVector<T>) = match d {
        Direction::WToGhz => (w_state(), ghz_state(phi)),
        Direction::GhzToW => (ghz_state(phi), w_state()),
    };
    to.inner(&u.apply(&from)).norm()
}

/// Fidelity as a function of ξ when α₂ = ξ and the remaining parameters sit
/// at the m = 0 optimum for φ = 0.
pub fn closed_form_fidelity_xi<T: Real>(xi: T, phi: T) -> T {
    let c = (T::lit(4.0) * xi).cos();
    let radicand = (T::lit(5.0) + T::lit(2.0) * c - T::lit(3.0) * c * c).max(T::zero());
    T::lit(3.0).sqrt() / T::lit(4.0) * radicand.sqrt() * (phi / T::lit(2.0)).cos().abs()
}

/// Linear dependence of the optimal control phases on the GHZ phase:
/// `φ_j = intercept_j + slope·φ + 2πm/3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchLaw {
    pub slope: f64,
    pub phi1_intercept: f64,
    pub phi2_intercept: f64,
}

impl BranchLaw {
    /// The law satisfied by the optima of the given direction.
    ///
    /// Both directions share the slope +1/3: a global z-rotation by θ shifts
    /// every control phase by θ, leaves U_ZZ and W invariant up to phase and
    /// maps GHZ(φ) to GHZ(φ + 3θ).
    pub fn for_direction(d: Direction) -> Self {
        match d {
            Direction::WToGhz => Self { slope: 1.0 / 3.0, phi1_intercept: 5.0 * PI / 6.0, phi2_intercept: PI / 3.0 },
            Direction::GhzToW => {
                Self { slope: 1.0 / 3.0, phi1_intercept: 7.0 * PI / 6.0, phi2_intercept: 5.0 * PI / 3.0 }
            }
        }
    }

    /// Predicted `(φ₁, φ₂)` of branch `m`, reduced into `[0, 2π)`.
    pub fn phases(&self, phi: f64, m: u8) -> (f64, f64) {
        let shift = self.slope * phi + TAU * f64::from(m) / 3.0;
        (wrap_angle(self.phi1_intercept + shift), wrap_angle(self.phi2_intercept + shift))
    }
}

/// Optimal parameters of branch `m` (0, 1 or 2) at GHZ phase `phi`.
pub fn branch_params(phi: f64, d: Direction, m: u8) -> PulseParams<f64> {
    let (phi1, phi2) = BranchLaw::for_direction(d).phases(phi, m);
    PulseParams::new(xi_opt(), ALPHA1_OPT, phi1, xi_opt(), phi2)
}

/// Branch index whose predicted optimum lies within π/6 (per angle) of `p`.
pub fn assign_branch(p: &PulseParams<f64>, phi: f64, d: Direction) -> Option<u8> {
    let c = p.canonical();
    let near = |a: f64, b: f64| angle_diff(a, b).abs() < FRAC_PI_6;
    (0..3u8).find(|&m| {
        let opt = branch_params(phi, d, m);
        near(c.phi1, opt.phi1)
            && near(c.phi2, opt.phi2)
            && (c.xi - opt.xi).abs() < FRAC_PI_6
            && (c.alpha1 - opt.alpha1).abs() < FRAC_PI_6
            && (c.alpha2 - opt.alpha2).abs() < FRAC_PI_6
    })
}

/// Parameters held fixed during an optimization (indexed ξ, α₁, φ₁, α₂, φ₂).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Frozen(pub [Option<f64>; 5]);

impl Frozen {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn xi(xi: f64) -> Self {
        Self([Some(xi), None, None, None, None])
    }

    fn free_indices(&self) -> Vec<usize> {
        (0..5).filter(|&i| self.0[i].is_none()).collect()
    }

    fn assemble(&self, free: &[usize], x: &[f64]) -> PulseParams<f64> {
        let mut a = [0.0; 5];
        for (i, slot) in a.iter_mut().enumerate() {
            if let Some(v) = self.0[i] {
                *slot = v;
            }
        }
        for (&i, &v) in free.iter().zip(x) {
            a[i] = v;
        }
        PulseParams::from_array(a)
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub frozen: Frozen,
    pub nelder_mead: NelderMeadOptions<f64>,
    /// Further passes restarted from each converged point.
    pub polish_passes: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            frozen: Frozen::none(),
            nelder_mead: NelderMeadOptions::default(),
            polish_passes: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    pub params: PulseParams<f64>,
    pub fidelity: f64,
    pub branch: Option<u8>,
    /// Number of local runs (random starts and their branch images) that
    /// ended in this optimum.
    pub restarts_used: usize,
    pub converged: bool,
}

/// Gradient of the fidelity over the unfrozen coordinates (central differences).
pub fn fidelity_gradient(p: &PulseParams<f64>, phi: f64, d: Direction, frozen: &Frozen) -> Vec<f64> {
    const H: f64 = 1e-6;
    let base = p.to_array();
    frozen
        .free_indices()
        .into_iter()
        .map(|i| {
            let mut plus = base;
            let mut minus = base;
            plus[i] += H;
            minus[i] -= H;
            (fidelity(&PulseParams::from_array(plus), phi, d) - fidelity(&PulseParams::from_array(minus), phi, d))
                / (2.0 * H)
        })
        .collect()
}

struct LocalRun {
    params: PulseParams<f64>,
    fidelity: f64,
    nm_converged: bool,
}

fn local_run(phi: f64, d: Direction, opts: &OptimizeOptions, free: &[usize], x0: Vec<f64>) -> LocalRun {
    let objective = |x: &[f64]| 1.0 - fidelity(&opts.frozen.assemble(free, x), phi, d);
    let mut nm = opts.nelder_mead;
    let mut m = minimize(objective, &x0, &nm);
    for _ in 0..opts.polish_passes {
        nm.initial_step *= 0.1;
        let again = minimize(objective, &m.x, &nm);
        let improved = again.fx <= m.fx;
        if improved {
            m = again;
        }
    }
    let params = opts.frozen.assemble(free, &m.x).canonical();
    LocalRun { fidelity: fidelity(&params, phi, d), params, nm_converged: m.converged }
}

/// Component-wise distance between canonical parameter vectors, respecting
/// the periodicity of each coordinate.
fn param_distance(a: &PulseParams<f64>, b: &PulseParams<f64>) -> f64 {
    let periodic = |x: f64, y: f64, period: f64| {
        let d = (x - y).rem_euclid(period);
        d.min(period - d)
    };
    let periods = [FRAC_PI_2, PI, TAU, PI, TAU];
    a.to_array().iter().zip(b.to_array()).zip(periods).map(|((&x, y), per)| periodic(x, y, per)).fold(0.0, f64::max)
}

const CLUSTER_TOL: f64 = 1e-6;

fn sample_start(rng: &mut ChaCha8Rng, free: &[usize]) -> Vec<f64> {
    free.iter()
        .map(|&i| {
            let hi = match i {
                0 => FRAC_PI_2,
                1 | 3 => PI,
                _ => TAU,
            };
            rng.gen_range(0.0..hi)
        })
        .collect()
}

/// A start together with its images under the exact symmetry that shifts
/// both control phases by 2π/3 (a global z-rotation compensated by the GHZ
/// phase period). Images are returned only when both phases are free.
fn branch_images(x: &[f64], free: &[usize]) -> Vec<Vec<f64>> {
    let (Some(i1), Some(i2)) = (free.iter().position(|&i| i == 2), free.iter().position(|&i| i == 4)) else {
        return vec![x.to_vec()];
    };
    (0..3)
        .map(|k| {
            let mut y = x.to_vec();
            let shift = TAU * f64::from(k) / 3.0;
            y[i1] += shift;
            y[i2] += shift;
            y
        })
        .collect()
}

/// Multi-start maximization of the direction's fidelity at GHZ phase `phi`.
///
/// Returns every distinct optimum found, best first.
pub fn optimize(phi: f64, d: Direction, opts: &OptimizeOptions) -> Result<Vec<OptResult>> {
    optimize_with_starts(phi, d, opts, &[])
}

/// As [`optimize`], with extra starting points (full parameter vectors) run
/// after the random ones.
pub fn optimize_with_starts(
    phi: f64,
    d: Direction,
    opts: &OptimizeOptions,
    extra: &[PulseParams<f64>],
) -> Result<Vec<OptResult>> {
    if opts.restarts == 0 && extra.is_empty() {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidArgument(format!("phi must be finite, got {phi}")));
    }
    let free = opts.frozen.free_indices();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for _ in 0..opts.restarts {
        let x = sample_start(&mut rng, &free);
        starts.extend(branch_images(&x, &free));
    }
    starts.extend(extra.iter().map(|p| {
        let a = p.to_array();
        free.iter().map(|&i| a[i]).collect()
    }));

    let mut runs: Vec<LocalRun> = starts.into_par_iter().map(|x0| local_run(phi, d, opts, &free, x0)).collect();

    // Deterministic aggregation: order by canonical tuple, then cluster.
    runs.sort_by(|a, b| a.params.to_array().partial_cmp(&b.params.to_array()).unwrap_or(std::cmp::Ordering::Equal));
    let mut clusters: Vec<(LocalRun, usize, bool)> = Vec::new();
    for run in runs {
        match clusters.iter_mut().find(|(rep, _, _)| param_distance(&rep.params, &run.params) <= CLUSTER_TOL) {
            Some((rep, count, all_conv)) => {
                *count += 1;
                *all_conv &= run.nm_converged;
                if run.fidelity > rep.fidelity {
                    *rep = LocalRun { nm_converged: rep.nm_converged || run.nm_converged, ..run };
                }
            }
            None => {
                let conv = run.nm_converged;
                clusters.push((run, 1, conv));
            }
        }
    }

    let mut results: Vec<OptResult> = clusters
        .into_iter()
        .map(|(rep, count, _)| {
            let grad = fidelity_gradient(&rep.params, phi, d, &opts.frozen);
            let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            OptResult {
                branch: assign_branch(&rep.params, phi, d),
                fidelity: fidelity(&rep.params, phi, d),
                params: rep.params,
                restarts_used: count,
                converged: rep.nm_converged && grad_norm <= 1e-5,
            }
        })
        .collect();
    results.sort_by(|a, b| {
        let key = |r: &OptResult| -(r.fidelity * 1e9).round();
        key(a)
            .partial_cmp(&key(b))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.branch.unwrap_or(u8::MAX).cmp(&b.branch.unwrap_or(u8::MAX)))
            .then(a.params.to_array().partial_cmp(&b.params.to_array()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(results)
}

/// One optimum on the tracked branch at one grid value of the GHZ phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    pub phi: f64,
    pub branch: u8,
    pub phi1: f64,
    pub phi2: f64,
    pub fidelity: f64,
}

/// Least-squares line through unwrapped optimal angles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    /// Intercept reduced into `[0, 2π)`.
    pub intercept: f64,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchFit {
    pub branch: u8,
    pub points: usize,
    pub phi1: LineFit,
    pub phi2: LineFit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchLawReport {
    pub direction: Direction,
    pub branches: Vec<BranchFit>,
    /// Grid rows, ordered by φ then branch; angles reduced into `[0, 2π)`.
    pub points: Vec<BranchPoint>,
    /// `(φ, branch)` pairs where no unique optimum could be matched.
    pub skipped: Vec<(f64, u8)>,
    pub min_fidelity: f64,
}

impl BranchLawReport {
    pub fn max_residual(&self) -> f64 {
        self.branches.iter().flat_map(|b| [b.phi1.max_residual, b.phi2.max_residual]).fold(0.0, f64::max)
    }

    /// Slopes of every fitted line (two per branch).
    pub fn slopes(&self) -> Vec<f64> {
        self.branches.iter().flat_map(|b| [b.phi1.slope, b.phi2.slope]).collect()
    }
}

fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let max_residual = xs.iter().zip(ys).map(|(x, y)| (y - (intercept + slope * x)).abs()).fold(0.0, f64::max);
    LineFit { slope, intercept: wrap_angle(intercept), max_residual }
}

struct Track {
    params: PulseParams<f64>,
    unwrapped: (f64, f64),
    xs: Vec<f64>,
    ys1: Vec<f64>,
    ys2: Vec<f64>,
}

/// Follow the three optimal branches across `phi_grid` and fit each angle
/// linearly against φ.
///
/// Branches are seeded at the φ = 0 optima and continued to the nearest
/// globally optimal cluster (within π/6 per angle) of the previous point, so
/// the fit does not presuppose the law under test.
pub fn branch_law_fit(phi_grid: &[f64], d: Direction, opts: &OptimizeOptions) -> Result<BranchLawReport> {
    if phi_grid.len() < 10 {
        return Err(Error::InvalidArgument(format!(
            "branch-law fit needs at least 10 grid values, got {}",
            phi_grid.len()
        )));
    }
    if let Some(bad) = phi_grid.iter().find(|p| !(0.0..TAU).contains(*p)) {
        return Err(Error::InvalidArgument(format!("grid value {bad} outside [0, 2π)")));
    }
    let mut grid = phi_grid.to_vec();
    grid.sort_by(f64::total_cmp);

    let mut tracks: Vec<Track> = (0..3u8)
        .map(|m| {
            let p = branch_params(0.0, d, m);
            Track { params: p, unwrapped: (p.phi1, p.phi2), xs: Vec::new(), ys1: Vec::new(), ys2: Vec::new() }
        })
        .collect();

    // Every grid point is optimized independently (random starts plus warm
    // starts from the current branch estimates), then matched serially.
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (k, &phi) in grid.iter().enumerate() {
        let warm: Vec<PulseParams<f64>> = tracks.iter().map(|t| t.params).collect();
        let local = OptimizeOptions { seed: opts.seed.wrapping_add(k as u64), ..opts.clone() };
        let results = optimize_with_starts(phi, d, &local, &warm)?;
        let best = results.first().map_or(0.0, |r| r.fidelity);
        let optima: Vec<&OptResult> = results.iter().filter(|r| r.fidelity >= best - 1e-9).collect();

        for (m, track) in tracks.iter_mut().enumerate() {
            let near: Vec<&&OptResult> = optima
                .iter()
                .filter(|r| {
                    let p = &r.params;
                    let q = &track.params.canonical();
                    angle_diff(p.phi1, q.phi1).abs() < FRAC_PI_6
                        && angle_diff(p.phi2, q.phi2).abs() < FRAC_PI_6
                        && param_distance(
                            &PulseParams::new(p.xi, p.alpha1, 0.0, p.alpha2, 0.0),
                            &PulseParams::new(q.xi, q.alpha1, 0.0, q.alpha2, 0.0),
                        ) < FRAC_PI_6
                })
                .collect();
            let [hit] = near.as_slice() else {
                skipped.push((phi, m as u8));
                continue;
            };
            let p = hit.params;
            let prev = track.params.canonical();
            track.unwrapped.0 += angle_diff(p.phi1, prev.phi1);
            track.unwrapped.1 += angle_diff(p.phi2, prev.phi2);
            track.params = p;
            track.xs.push(phi);
            track.ys1.push(track.unwrapped.0);
            track.ys2.push(track.unwrapped.1);
            points.push(BranchPoint { phi, branch: m as u8, phi1: p.phi1, phi2: p.phi2, fidelity: hit.fidelity });
        }
    }

    let branches = tracks
        .iter()
        .enumerate()
        .filter(|(_, t)| t.xs.len() >= 2)
        .map(|(m, t)| BranchFit {
            branch: m as u8,
            points: t.xs.len(),
            phi1: fit_line(&t.xs, &t.ys1),
            phi2: fit_line(&t.xs, &t.ys2),
        })
        .collect();
    let min_fidelity = points.iter().map(|p| p.fidelity).fold(f64::INFINITY, f64::min);
    Ok(BranchLawReport { direction: d, branches, points, skipped, min_fidelity })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DurationPoint {
    pub xi: f64,
    pub best_fidelity: f64,
    pub params: PulseParams<f64>,
}

/// Best W→GHZ fidelity reachable with the Ising duration frozen at each `ξ`.
pub fn minimal_duration_scan(xi_values: &[f64], phi: f64, opts: &OptimizeOptions) -> Result<Vec<DurationPoint>> {
    xi_values
        .iter()
        .map(|&xi| {
            if xi.is_nan() || xi < 0.0 {
                return Err(Error::InvalidArgument(format!("duration must be non-negative, got {xi}")));
            }
            let local = OptimizeOptions { frozen: Frozen::xi(xi), ..opts.clone() };
            let results = optimize(phi, Direction::WToGhz, &local)?;
            let best = &results[0];
            Ok(DurationPoint { xi, best_fidelity: best.fidelity, params: best.params })
        })
        .collect()
}

/// Overlap of the state after the first pulse alone with the target.
pub fn first_pulse_fidelity(alpha1: f64, phi1: f64, phi: f64) -> f64 {
    ghz_fidelity(&PulseParams::new(0.0, alpha1, phi1, 0.0, 0.0), phi)
}
