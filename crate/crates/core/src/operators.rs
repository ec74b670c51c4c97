//! Drift Hamiltonian, collective controls, single-site Paulis and the W/GHZ states.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix, StateVector};
use crate::scalar::{cis, wrap_angle, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

impl PauliKind {
    pub const ALL: [PauliKind; 4] = [PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z];

    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        let (o, l, i) = (Complex::zero(), Complex::one(), Complex::i());
        let data = match self {
            PauliKind::I => vec![l, o, o, l],
            PauliKind::X => vec![o, l, l, o],
            PauliKind::Y => vec![o, -i, i, o],
            PauliKind::Z => vec![l, o, o, -l],
        };
        ComplexMatrix::new(2, 2, data).expect("2x2")
    }
}

/// Number of qubits in the register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitCount(usize);

impl QubitCount {
    pub const THREE: QubitCount = QubitCount(3);

    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQubitCount(n, "need at least one qubit"));
        }
        if n > 12 {
            return Err(Error::InvalidQubitCount(n, "dense operators limited to 12 qubits"));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn hilbert_dim(self) -> usize {
        1 << self.0
    }
}

impl Default for QubitCount {
    fn default() -> Self {
        Self::THREE
    }
}

/// Ising coupling `J > 0` (energy units, ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingStrength<T>(T);

impl<T: Real> CouplingStrength<T> {
    pub fn new(j: T) -> Result<Self> {
        if j.is_nan() || j <= T::zero() || !j.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling must be positive, got {j}")));
        }
        Ok(Self(j))
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

impl<T: Real> Default for CouplingStrength<T> {
    fn default() -> Self {
        Self(T::one())
    }
}

/// Pauli operator `kind` acting on qubit `site` (1-based), identity elsewhere.
pub fn pauli_at<T: Real>(kind: PauliKind, site: usize, n: QubitCount) -> Result<ComplexMatrix<T>> {
    if site == 0 || site > n.get() {
        return Err(Error::SiteOutOfRange { site, n_qubits: n.get() });
    }
    let factors: Vec<ComplexMatrix<T>> =
        (1..=n.get()).map(|s| if s == site { kind.matrix() } else { PauliKind::I.matrix() }).collect();
    Ok(kron_all(&factors))
}

/// Tensor product `σ₁ ⊗ σ₂ ⊗ …` of the given single-qubit Paulis.
pub fn pauli_string<T: Real>(kinds: &[PauliKind]) -> ComplexMatrix<T> {
    let factors: Vec<ComplexMatrix<T>> = kinds.iter().map(|k| k.matrix()).collect();
    kron_all(&factors)
}

/// `J Σ_{n<n'} Z_n Z_{n'}`; diagonal in the computational basis.
pub fn ising_hamiltonian<T: Real>(n: QubitCount, j: CouplingStrength<T>) -> Result<ComplexMatrix<T>> {
    if n.get() < 2 {
        return Err(Error::InvalidQubitCount(n.get(), "Ising coupling needs at least two qubits"));
    }
    let nq = n.get();
    let diag: Vec<Complex<T>> = (0..n.hilbert_dim())
        .map(|idx| {
            // Z eigenvalue of qubit s (1-based, leftmost = most significant bit).
            let z = |s: usize| if (idx >> (nq - s)) & 1 == 0 { 1i64 } else { -1 };
            let mut e = 0i64;
            for a in 1..=nq {
                for b in (a + 1)..=nq {
                    e += z(a) * z(b);
                }
            }
            Complex::new(j.get() * T::lit(e as f64), T::zero())
        })
        .collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Collective operator `Σ_n σ_n` of the given kind.
pub fn collective<T: Real>(kind: PauliKind, n: QubitCount) -> ComplexMatrix<T> {
    let dim = n.hilbert_dim();
    (1..=n.get()).fold(ComplexMatrix::zeros(dim, dim), |acc, s| &acc + &pauli_at(kind, s, n).expect("site in range"))
}

/// `(|100⟩ + |010⟩ + |001⟩)/√3`.
pub fn w_state<T: Real>() -> StateVector<T> {
    let a = Complex::new(T::one() / T::lit(3.0).sqrt(), T::zero());
    let mut amps = vec![Complex::zero(); 8];
    for idx in [0b100, 0b010, 0b001] {
        amps[idx] = a;
    }
    StateVector::new(amps).expect("non-empty")
}

/// `(|000⟩ + e^{iφ}|111⟩)/√2`, with φ reduced into `[0, 2π)`.
pub fn ghz_state<T: Real>(phi: T) -> StateVector<T> {
    let a = T::FRAC_1_SQRT_2();
    let mut amps = vec![Complex::zero(); 8];
    amps[0] = Complex::new(a, T::zero());
    amps[7] = cis(wrap_angle(phi)) * a;
    StateVector::new(amps).expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh;

    type M = ComplexMatrix<f64>;
    const N3: QubitCount = QubitCount::THREE;

    fn n(k: usize) -> QubitCount {
        QubitCount::new(k).unwrap()
    }

    #[test]
    fn z_on_first_of_two() {
        let z1: M = pauli_at(PauliKind::Z, 1, n(2)).unwrap();
        let expected = M::from_diagonal(&[1.0, 1.0, -1.0, -1.0].map(|x| Complex::new(x, 0.0)));
        assert_eq!(z1, expected);
    }

    #[test]
    fn pauli_involution() {
        let x2: M = pauli_at(PauliKind::X, 2, n(2)).unwrap();
        assert_eq!(&x2 * &x2, M::identity(4));
    }

    #[test]
    fn different_sites_commute() {
        let x1: M = pauli_at(PauliKind::X, 1, N3).unwrap();
        let y2: M = pauli_at(PauliKind::Y, 2, N3).unwrap();
        assert_eq!(x1.commutator(&y2).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn site_out_of_range() {
        assert!(matches!(pauli_at::<f64>(PauliKind::X, 0, N3), Err(Error::SiteOutOfRange { site: 0, n_qubits: 3 })));
        assert!(pauli_at::<f64>(PauliKind::X, 4, N3).is_err());
    }

    #[test]
    fn ising_two_qubits() {
        let h: M = ising_hamiltonian(n(2), CouplingStrength::default()).unwrap();
        let expected = M::from_diagonal(&[1.0, -1.0, -1.0, 1.0].map(|x| Complex::new(x, 0.0)));
        assert_eq!(h, expected);
    }

    #[test]
    fn ising_three_qubits_per_bitstring() {
        let h: M = ising_hamiltonian(N3, CouplingStrength::default()).unwrap();
        for idx in 0..8 {
            let expected = if idx == 0 || idx == 7 { 3.0 } else { -1.0 };
            assert_eq!(h[(idx, idx)], Complex::new(expected, 0.0));
        }
        // Same operator assembled from pauli_at.
        let z = |s| pauli_at::<f64>(PauliKind::Z, s, N3).unwrap();
        let built = &(&(&z(1) * &z(2)) + &(&z(2) * &z(3))) + &(&z(1) * &z(3));
        assert_eq!(h, built);
    }

    #[test]
    fn ising_spectrum() {
        let h: M = ising_hamiltonian(N3, CouplingStrength::default()).unwrap();
        let (vals, _) = eigh(&h).unwrap();
        assert_eq!(vals, vec![-1.0, -1.0, -1.0, -1.0, -1.0, -1.0, 3.0, 3.0]);
    }

    #[test]
    fn ising_needs_two_qubits() {
        assert!(ising_hamiltonian::<f64>(n(1), CouplingStrength::default()).is_err());
        assert!(CouplingStrength::new(0.0_f64).is_err());
        assert!(QubitCount::new(0).is_err());
    }

    #[test]
    fn collective_single_qubit_is_bare_pauli() {
        let x: M = collective(PauliKind::X, n(1));
        assert_eq!(x, PauliKind::X.matrix());
    }

    #[test]
    fn collective_x_on_vacuum() {
        let x: M = collective(PauliKind::X, N3);
        let out = x.apply(&StateVector::basis(8, 0));
        let w: StateVector<f64> = w_state();
        let expected = w.scale(Complex::new(3f64.sqrt(), 0.0));
        assert!(out.sub(&expected).norm() < 1e-15);
    }

    #[test]
    fn collective_su2_commutator() {
        let x: M = collective(PauliKind::X, N3);
        let y: M = collective(PauliKind::Y, N3);
        let z: M = collective(PauliKind::Z, N3);
        let comm = x.commutator(&y).unwrap();
        assert!(comm.max_abs_diff(&z.scale(Complex::new(0.0, 2.0))) < 1e-15);
    }

    #[test]
    fn target_states() {
        let w: StateVector<f64> = w_state();
        let s = 1.0 / 3f64.sqrt();
        for idx in 0..8 {
            let expected = if [1, 2, 4].contains(&idx) { s } else { 0.0 };
            assert!((w.amplitudes()[idx] - Complex::new(expected, 0.0)).norm() < 1e-16);
        }
        let g: StateVector<f64> = ghz_state(0.0);
        assert!((g.amplitudes()[0].re - 0.5f64.sqrt()).abs() < 1e-16);
        assert!((g.amplitudes()[7].re - 0.5f64.sqrt()).abs() < 1e-16);
        assert!(w.is_normalized(1e-12) && g.is_normalized(1e-12));
    }

    #[test]
    fn ghz_orthogonal_to_w_and_phase_periodic() {
        let w: StateVector<f64> = w_state();
        for k in 0..50 {
            let phi = -7.0 + 0.3 * k as f64;
            let g = ghz_state(phi);
            assert_eq!(g.inner(&w).norm(), 0.0);
            let g2 = ghz_state(phi + std::f64::consts::TAU);
            assert!(g.sub(&g2).norm() < 1e-14);
        }
    }
}
