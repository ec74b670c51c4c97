//! Self-check suite run by `wghz verify`: each check recomputes a known
//! property from scratch and compares it with its expected value.

use std::f64::consts::{PI, TAU};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convert::{
    branch_params, closed_form_fidelity_xi, fidelity, fidelity_full, first_pulse_fidelity, minimal_duration_scan,
    optimize, xi_opt, OptimizeOptions, ALPHA1_OPT,
};
use crate::linalg::{herm_expm, ComplexMatrix};
use crate::operators::{ising_hamiltonian, CouplingStrength, QubitCount};
use crate::pulses::{sequence_unitary, sequence_unitary_full, u_c, u_c_tensor_oracle, Direction, PulseParams};
use crate::robustness::{
    closed_form_error_fidelity, direct_error_fidelity, expected_prefactor, joint_quadratic_form, quadratic_coefficient,
    Baseline, ErrorParam, JointUnits,
};
use crate::scalar::angle_diff;
use crate::symmetry::{compress, ising_dynamical_dimension, sector_decomposition_dims, u_s3_dimension, SectorBasis};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, detail: String, passed: bool) -> Self {
        Self { name: name.to_string(), detail, passed }
    }

    fn within(name: &str, got: f64, want: f64, tol: f64) -> Self {
        let err = (got - want).abs();
        Self::new(name, format!("{got:.12} vs {want:.12} (|diff| {err:.1e} <= {tol:.0e})"), err <= tol)
    }

    fn below(name: &str, got: f64, bound: f64) -> Self {
        Self::new(name, format!("{got:.3e} <= {bound:.0e}"), got <= bound)
    }

    /// One report line: `name: detail PASS|FAIL`.
    pub fn line(&self) -> String {
        format!("{}: {} {}", self.name, self.detail, if self.passed { "PASS" } else { "FAIL" })
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> PulseParams<f64> {
    PulseParams::new(
        rng.gen_range(0.0..PI),
        rng.gen_range(-PI..PI),
        rng.gen_range(0.0..TAU),
        rng.gen_range(-PI..PI),
        rng.gen_range(0.0..TAU),
    )
}

fn algebra_checks(out: &mut Vec<Check>) {
    let d = u_s3_dimension();
    out.push(Check::new("u_s3_dimension", format!("{d} == 20"), d == 20));

    let dims = sector_decomposition_dims();
    out.push(Check::new("sector_dims", format!("{dims:?} == [4, 2, 2]"), dims == vec![4, 2, 2]));

    let h = ising_hamiltonian::<f64>(QubitCount::THREE, CouplingStrength::default()).expect("three qubits");
    let c = compress(&h, &SectorBasis::new()).expect("8x8");
    let want = ComplexMatrix::from_diagonal(&[3.0, -1.0, -1.0, 3.0].map(|x| Complex::new(x, 0.0)));
    out.push(Check::below("compress_hzz", c.max_abs_diff(&want), 1e-13));

    match ising_dynamical_dimension(10) {
        Ok(dl) => out.push(Check::new("dynamical_lie_dim", format!("3 < {dl} <= 20"), dl > 3 && dl <= 20)),
        Err(e) => out.push(Check::new("dynamical_lie_dim", e.to_string(), false)),
    }
}

fn oracle_checks(out: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let basis = SectorBasis::new();
    let (mut du, mut df, mut dc, mut unitary) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let phi = rng.gen_range(0.0..TAU);
        for d in [Direction::WToGhz, Direction::GhzToW] {
            let u = sequence_unitary(&p, d);
            let full = compress(&sequence_unitary_full(&p, d), &basis).expect("8x8");
            du = du.max(u.max_abs_diff(&full));
            df = df.max((fidelity(&p, phi, d) - fidelity_full(&p, phi, d)).abs());
            unitary = unitary.max(u.unitary_deviation());
        }
        let uc_full = compress(&u_c_tensor_oracle(p.alpha1, p.phi1), &basis).expect("8x8");
        dc = dc.max(u_c(p.alpha1, p.phi1).max_abs_diff(&uc_full));
    }
    out.push(Check::below("sector_vs_full_unitary", du, 1e-12));
    out.push(Check::below("sector_vs_full_fidelity", df, 1e-12));
    out.push(Check::below("u_c_vs_tensor_oracle", dc, 1e-12));
    out.push(Check::below("sequence_unitarity", unitary, 1e-12));

    let z = crate::operators::PauliKind::Z.matrix::<f64>();
    let e = herm_expm(&z, 0.7).expect("Hermitian");
    let want = ComplexMatrix::from_diagonal(&[Complex::from_polar(1.0, -0.7), Complex::from_polar(1.0, 0.7)]);
    out.push(Check::below("herm_expm_diagonal", e.max_abs_diff(&want), 1e-12));
}

fn conversion_checks(out: &mut Vec<Check>) {
    let opt = branch_params(0.0, Direction::WToGhz, 0);
    out.push(Check::within("optimal_ghz_fidelity", fidelity(&opt, 0.0, Direction::WToGhz), 1.0, 1e-9));
    let rev = branch_params(0.0, Direction::GhzToW, 0);
    out.push(Check::within("optimal_w_fidelity", fidelity(&rev, 0.0, Direction::GhzToW), 1.0, 1e-9));
    out.push(Check::within(
        "first_pulse_fidelity",
        first_pulse_fidelity(ALPHA1_OPT, 5.0 * PI / 6.0, 0.0),
        3f64.sqrt() / 2.0,
        1e-12,
    ));
    out.push(Check::within("closed_form_xi_at_optimum", closed_form_fidelity_xi(xi_opt(), 0.0), 1.0, 1e-12));

    for d in [Direction::WToGhz, Direction::GhzToW] {
        let opts = OptimizeOptions { seed: 7, ..Default::default() };
        let name = format!("branches_{d}");
        match optimize(0.0, d, &opts) {
            Ok(results) => {
                let mut pairs = Vec::new();
                let mut ok = true;
                for m in 0..3u8 {
                    let want = branch_params(0.0, d, m);
                    let hit = results.iter().find(|r| {
                        r.fidelity >= 1.0 - 1e-9
                            && (r.params.xi - want.xi).abs() < 1e-6
                            && (r.params.alpha1 - want.alpha1).abs() < 1e-6
                            && (r.params.alpha2 - want.alpha2).abs() < 1e-6
                            && angle_diff(r.params.phi1, want.phi1).abs() < 1e-6
                            && angle_diff(r.params.phi2, want.phi2).abs() < 1e-6
                    });
                    match hit {
                        Some(r) => pairs.push(format!("({:.6}, {:.6})", r.params.phi1, r.params.phi2)),
                        None => {
                            ok = false;
                            pairs.push(format!("missing m={m}"));
                        }
                    }
                }
                out.push(Check::new(&name, pairs.join(" "), ok));
            }
            Err(e) => out.push(Check::new(&name, e.to_string(), false)),
        }
    }

    let scan =
        minimal_duration_scan(&[0.9 * xi_opt(), xi_opt()], 0.0, &OptimizeOptions { seed: 1, ..Default::default() });
    match scan {
        Ok(s) => {
            out.push(Check::new(
                "minimal_duration_below",
                format!("F(0.9 xi0) = {:.9} < 1 - 1e-4", s[0].best_fidelity),
                s[0].best_fidelity < 1.0 - 1e-4,
            ));
            out.push(Check::within("minimal_duration_at", s[1].best_fidelity, 1.0, 1e-9));
        }
        Err(e) => out.push(Check::new("minimal_duration", e.to_string(), false)),
    }
}

fn robustness_checks(out: &mut Vec<Check>) {
    let b = Baseline::default();
    for p in ErrorParam::ALL {
        let worst = (0..=400)
            .map(|k| {
                let e = -0.2 + 0.001 * k as f64;
                (closed_form_error_fidelity(p, e) - direct_error_fidelity(p, e, &b)).abs()
            })
            .fold(0.0, f64::max);
        out.push(Check::below(&format!("closed_form_{p}"), worst, 1e-12));
    }
    for p in ErrorParam::ALL {
        let name = format!("prefactor_{p}");
        match quadratic_coefficient(p, 1e-4, &b) {
            Ok(c) => out.push(Check::within(&name, c, expected_prefactor(p), 1e-4)),
            Err(e) => out.push(Check::new(&name, e.to_string(), false)),
        }
    }
    let q = joint_quadratic_form(JointUnits::Absolute, 1e-4, &b);
    let err = (q.xx - 1.5).abs().max((q.aa - 5.0).abs()).max((q.xa - 1.0).abs());
    out.push(Check::new(
        "joint_ellipse",
        format!("({:.6}, {:.6}, {:.6}) vs (1.5, 5, 1)", q.xx, q.aa, q.xa),
        err <= 1e-3 && q.is_positive_definite(),
    ));
}

/// Run every check in a fixed order.
pub fn run_all() -> Vec<Check> {
    let mut out = Vec::new();
    algebra_checks(&mut out);
    oracle_checks(&mut out);
    conversion_checks(&mut out);
    robustness_checks(&mut out);
    out
}
