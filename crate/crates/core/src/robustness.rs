//! Sensitivity of the W→GHZ conversion to systematic pulse-parameter errors.
//!
//! Errors are relative for ξ, α₁, α₂ and absolute (radians) for φ₁, φ₂.
//! Direct simulation through [`crate::convert::ghz_fidelity`] is the ground
//! truth everywhere; the closed forms are evaluated independently.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::convert::{branch_params, ghz_fidelity, xi_opt, ALPHA1_OPT};
use crate::error::{Error, Result};
use crate::nelder_mead::golden_max;
use crate::pulses::{Direction, PulseParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorParam {
    Xi,
    Alpha1,
    Phi1,
    Alpha2,
    Phi2,
}

impl ErrorParam {
    pub const ALL: [ErrorParam; 5] =
        [ErrorParam::Xi, ErrorParam::Alpha1, ErrorParam::Phi1, ErrorParam::Alpha2, ErrorParam::Phi2];

    pub fn name(self) -> &'static str {
        match self {
            ErrorParam::Xi => "xi",
            ErrorParam::Alpha1 => "alpha1",
            ErrorParam::Phi1 => "phi1",
            ErrorParam::Alpha2 => "alpha2",
            ErrorParam::Phi2 => "phi2",
        }
    }
}

impl fmt::Display for ErrorParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deviations from a baseline optimum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ErrorSpec {
    pub eps_xi: f64,
    pub eps_alpha1: f64,
    pub eps_phi1: f64,
    pub eps_alpha2: f64,
    pub eps_phi2: f64,
}

impl ErrorSpec {
    pub fn single(which: ErrorParam, eps: f64) -> Self {
        let mut s = Self::default();
        *s.slot(which) = eps;
        s
    }

    fn slot(&mut self, which: ErrorParam) -> &mut f64 {
        match which {
            ErrorParam::Xi => &mut self.eps_xi,
            ErrorParam::Alpha1 => &mut self.eps_alpha1,
            ErrorParam::Phi1 => &mut self.eps_phi1,
            ErrorParam::Alpha2 => &mut self.eps_alpha2,
            ErrorParam::Phi2 => &mut self.eps_phi2,
        }
    }

    /// ξ → ξ(1+ε_ξ), α_j → α_j(1+ε_αj), φ_j → φ_j + ε_φj.
    pub fn apply(&self, p: &PulseParams<f64>) -> PulseParams<f64> {
        PulseParams::new(
            p.xi * (1.0 + self.eps_xi),
            p.alpha1 * (1.0 + self.eps_alpha1),
            p.phi1 + self.eps_phi1,
            p.alpha2 * (1.0 + self.eps_alpha2),
            p.phi2 + self.eps_phi2,
        )
    }
}

/// Constants entering the φ₂ closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrConstants {
    pub w: Complex<f64>,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl ErrConstants {
    pub fn new() -> Self {
        let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
        Self {
            w: Complex::new(1.0, 2.0 * r2) / 3.0,
            c_plus: ((r3 + r2) / (2.0 * r3)).sqrt(),
            c_minus: ((r3 - r2) / (2.0 * r3)).sqrt(),
        }
    }
}

impl Default for ErrConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// Which optimum the errors perturb: branch `m` of the W→GHZ law at GHZ phase `phi`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Baseline {
    pub phi: f64,
    pub branch: u8,
}

impl Baseline {
    pub fn params(&self) -> PulseParams<f64> {
        branch_params(self.phi, Direction::WToGhz, self.branch)
    }

    /// Fidelity of the baseline optimum after applying `err`.
    pub fn fidelity(&self, err: &ErrorSpec) -> f64 {
        ghz_fidelity(&err.apply(&self.params()), self.phi)
    }
}

fn cis(t: f64) -> Complex<f64> {
    Complex::from_polar(1.0, t)
}

/// Fidelity under a single systematic error, from its closed form.
pub fn closed_form_error_fidelity(which: ErrorParam, eps: f64) -> f64 {
    let xi0 = xi_opt();
    let a10 = ALPHA1_OPT;
    let a20 = xi0;
    let i = Complex::<f64>::i();
    match which {
        ErrorParam::Xi => (3.0 + cis(4.0 * xi0 * eps)).norm() / 4.0,
        ErrorParam::Alpha1 => 0.5 * (a10 * eps).cos().abs() * (3.0 * (2.0 * a10 * eps).cos() - 1.0).abs(),
        ErrorParam::Phi1 => (3.0 - 2.0 * cis(eps) + 3.0 * cis(2.0 * eps)).norm() * (1.0 + cis(eps)).norm() / 8.0,
        ErrorParam::Alpha2 => {
            let t = 2.0 * a20 * eps;
            (Complex::new(t.cos(), 0.0) - 0.5 * i * t.sin()).norm()
        }
        ErrorParam::Phi2 => {
            let ErrConstants { w, c_plus: cp, c_minus: cm } = ErrConstants::new();
            let e = |k: f64| cis(k * eps);
            let sum = (1.0 + e(6.0)) * cm.powi(3)
                + i * (e(1.0) + e(5.0)) * w * cp * cm * cm
                + (e(2.0) + e(4.0)) * w * cp * cp * cm
                + 2.0 * i * e(3.0) * cp.powi(3);
            3f64.sqrt() / 4.0 * sum.norm()
        }
    }
}

/// Fidelity under a single systematic error, by simulating the perturbed sequence.
pub fn direct_error_fidelity(which: ErrorParam, eps: f64, baseline: &Baseline) -> f64 {
    baseline.fidelity(&ErrorSpec::single(which, eps))
}

/// Coefficient `c` of `1 − F ≈ c·ε²`, by a central second difference of the
/// simulated fidelity with one Richardson step (h and h/2).
pub fn quadratic_coefficient(which: ErrorParam, h: f64, baseline: &Baseline) -> Result<f64> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidArgument(format!("step must lie in (0, 1e-3], got {h}")));
    }
    let c = |h: f64| {
        (2.0 - direct_error_fidelity(which, h, baseline) - direct_error_fidelity(which, -h, baseline)) / (2.0 * h * h)
    };
    Ok((4.0 * c(h / 2.0) - c(h)) / 3.0)
}

/// Exact quadratic prefactor of each error's fidelity expansion.
pub fn expected_prefactor(which: ErrorParam) -> f64 {
    let xi0 = xi_opt();
    match which {
        ErrorParam::Xi | ErrorParam::Alpha2 => 1.5 * xi0 * xi0,
        ErrorParam::Alpha1 => 3.5 * ALPHA1_OPT * ALPHA1_OPT,
        ErrorParam::Phi1 => 7.0 / 8.0,
        ErrorParam::Phi2 => 2.0 - 0.75 * 6f64.sqrt(),
    }
}

/// An axis of a sweep: a single error or two errors tied to a common value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SweepAxis {
    Single(ErrorParam),
    /// ε_α₁ = ε_α₂ (relative).
    AlphaTied,
    /// ε_φ₁ = ε_φ₂ (radians).
    PhiTied,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Single(p) => p.name(),
            SweepAxis::AlphaTied => "alpha_tied",
            SweepAxis::PhiTied => "phi_tied",
        }
    }

    fn add_to(self, spec: &mut ErrorSpec, eps: f64) {
        match self {
            SweepAxis::Single(p) => *spec.slot(p) += eps,
            SweepAxis::AlphaTied => {
                spec.eps_alpha1 += eps;
                spec.eps_alpha2 += eps;
            }
            SweepAxis::PhiTied => {
                spec.eps_phi1 += eps;
                spec.eps_phi2 += eps;
            }
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "xi" => SweepAxis::Single(ErrorParam::Xi),
            "alpha1" => SweepAxis::Single(ErrorParam::Alpha1),
            "phi1" => SweepAxis::Single(ErrorParam::Phi1),
            "alpha2" => SweepAxis::Single(ErrorParam::Alpha2),
            "phi2" => SweepAxis::Single(ErrorParam::Phi2),
            "alpha_tied" | "alpha" => SweepAxis::AlphaTied,
            "phi_tied" | "phi" => SweepAxis::PhiTied,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown sweep axis {other:?} (expected xi, alpha1, phi1, alpha2, phi2, alpha_tied or phi_tied)"
                )))
            }
        })
    }
}

/// Uniform grid of `count` points on `[min, max]` for one axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisGrid {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisGrid {
    pub fn new(axis: SweepAxis, min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!("grid count must be at least 2, got {count}")));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidArgument(format!("grid range needs min < max, got {min}:{max}")));
        }
        Ok(Self { axis, min, max, count })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: Vec<f64>,
    pub infidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    /// Row-major over the axes (last axis fastest).
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn max_infidelity(&self) -> f64 {
        self.rows.iter().map(|r| r.infidelity).fold(0.0, f64::max)
    }

    /// Row with the largest infidelity.
    pub fn argmax(&self) -> Option<&SweepRow> {
        self.rows.iter().max_by(|a, b| a.infidelity.total_cmp(&b.infidelity))
    }
}

/// Infidelity `1 − F` of the perturbed baseline over the Cartesian grid.
pub fn sweep(axes: &[AxisGrid], baseline: &Baseline) -> Result<SweepResult> {
    if axes.is_empty() || axes.len() > 3 {
        return Err(Error::InvalidArgument(format!("sweeps take 1 to 3 axes, got {}", axes.len())));
    }
    let values: Vec<Vec<f64>> = axes.iter().map(AxisGrid::values).collect();
    let total: usize = values.iter().map(Vec::len).product();
    let rows = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut eps = vec![0.0; axes.len()];
            for k in (0..axes.len()).rev() {
                eps[k] = values[k][rem % values[k].len()];
                rem /= values[k].len();
            }
            let mut spec = ErrorSpec::default();
            for (g, &e) in axes.iter().zip(&eps) {
                g.axis.add_to(&mut spec, e);
            }
            SweepRow { infidelity: 1.0 - baseline.fidelity(&spec), eps }
        })
        .collect();
    Ok(SweepResult { axes: axes.iter().map(|g| g.axis).collect(), rows })
}

/// How the joint (ξ, α) deviation is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JointUnits {
    /// ξ = ξ₀ + δ_ξ, α_j = α_j,₀ + δ_α (radians).
    Absolute,
    /// ξ = ξ₀(1 + ε_ξ), α_j = α_j,₀(1 + ε_α).
    Relative,
}

/// `1 − F ≈ xx·δ_ξ² + aa·δ_α² + xa·δ_ξ·δ_α` around the optimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointQuadraticForm {
    pub xx: f64,
    pub aa: f64,
    pub xa: f64,
    pub units: JointUnits,
}

impl JointQuadraticForm {
    /// Symmetric coefficient matrix `[[xx, xa/2], [xa/2, aa]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.xx, self.xa / 2.0], [self.xa / 2.0, self.aa]]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.xx > 0.0 && self.xx * self.aa - self.xa * self.xa / 4.0 > 0.0
    }

    pub fn eval(&self, dx: f64, da: f64) -> f64 {
        self.xx * dx * dx + self.aa * da * da + self.xa * dx * da
    }

    /// Distance along direction `theta` at which the form reaches `level`.
    pub fn contour_radius(&self, theta: f64, level: f64) -> f64 {
        (level / self.eval(theta.cos(), theta.sin())).sqrt()
    }
}

fn joint_infidelity(units: JointUnits, dx: f64, da: f64, baseline: &Baseline) -> f64 {
    let p = baseline.params();
    let q = match units {
        JointUnits::Absolute => PulseParams::new(p.xi + dx, p.alpha1 + da, p.phi1, p.alpha2 + da, p.phi2),
        JointUnits::Relative => {
            ErrorSpec { eps_xi: dx, eps_alpha1: da, eps_alpha2: da, ..Default::default() }.apply(&p)
        }
    };
    1.0 - ghz_fidelity(&q, baseline.phi)
}

/// Estimate the joint quadratic form by symmetric finite differences at the optimum.
pub fn joint_quadratic_form(units: JointUnits, h: f64, baseline: &Baseline) -> JointQuadraticForm {
    let f = |dx: f64, da: f64| joint_infidelity(units, dx, da, baseline);
    JointQuadraticForm {
        xx: (f(h, 0.0) + f(-h, 0.0)) / (2.0 * h * h),
        aa: (f(0.0, h) + f(0.0, -h)) / (2.0 * h * h),
        xa: (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h),
        units,
    }
}

/// Largest relative discrepancy between the quadratic-form contour and the
/// simulated contour at infidelity `level`, over `directions` rays.
pub fn contour_radius_error(form: &JointQuadraticForm, level: f64, directions: usize, baseline: &Baseline) -> f64 {
    (0..directions)
        .map(|k| {
            let theta = TAU * k as f64 / directions as f64;
            let (c, s) = (theta.cos(), theta.sin());
            let g = |r: f64| joint_infidelity(form.units, r * c, r * s, baseline) - level;
            let predicted = form.contour_radius(theta, level);
            // Bracket then bisect along the ray.
            let mut hi = predicted;
            while g(hi) < 0.0 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let actual = 0.5 * (lo + hi);
            (predicted - actual).abs() / actual
        })
        .fold(0.0, f64::max)
}

/// Best GHZ phase and fidelity for the perturbed baseline when φ is free.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArbitraryPhi {
    pub phi: f64,
    pub fidelity: f64,
}

/// Maximize the W→GHZ fidelity over the target's phase φ for a φ₁ or φ₂ error:
/// grid search over `[0, 2π)` followed by golden-section refinement.
pub fn arbitrary_phi_fidelity(which: ErrorParam, eps: f64, grid_size: usize) -> Result<ArbitraryPhi> {
    if !matches!(which, ErrorParam::Phi1 | ErrorParam::Phi2) {
        return Err(Error::InvalidArgument(format!("arbitrary-phase relaxation applies to phi1 or phi2, got {which}")));
    }
    if grid_size < 100 {
        return Err(Error::InvalidArgument(format!("phase grid needs at least 100 points, got {grid_size}")));
    }
    let params = ErrorSpec::single(which, eps).apply(&Baseline::default().params());
    let f = |phi: f64| ghz_fidelity(&params, phi);
    let step = TAU / grid_size as f64;
    let (k_best, _) =
        (0..grid_size)
            .map(|k| (k, f(step * k as f64)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let centre = step * k_best as f64;
    let (phi, fidelity) = golden_max(f, centre - step, centre + step, 1e-12);
    // Never report less than the grid itself found.
    let grid_best = f(centre);
    let (phi, fidelity) = if grid_best > fidelity { (centre, grid_best) } else { (phi, fidelity) };
    Ok(ArbitraryPhi { phi: phi.rem_euclid(TAU), fidelity })
}

/// Ratio of infidelities from α₁ and α₂ errors of the same relative size.
pub fn alpha_sensitivity_ratio(eps: f64) -> f64 {
    let b = Baseline::default();
    (1.0 - direct_error_fidelity(ErrorParam::Alpha1, eps, &b))
        / (1.0 - direct_error_fidelity(ErrorParam::Alpha2, eps, &b))
}
