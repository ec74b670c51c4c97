//! Time-evolution operators of the control–interaction–control pulse sequence.
//!
//! Each operator exists in the 4×4 symmetric-sector form (ζ basis, used for
//! all production evaluations) and in the 8×8 computational-basis form (used
//! as an oracle).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{herm_expm, kron_all, ComplexMatrix};
use crate::operators::{pauli_at, PauliKind, QubitCount};
use crate::scalar::{cis, wrap_angle, Real};

/// The five sequence parameters: Ising-pulse duration ξ = JT and the two
/// control pulses (α₁, φ₁), (α₂, φ₂). Each control pulse rotates every qubit
/// by 2α about the in-plane axis (cos φ, sin φ, 0).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseParams<T> {
    pub xi: T,
    pub alpha1: T,
    pub phi1: T,
    pub alpha2: T,
    pub phi2: T,
}

impl<T: Real> PulseParams<T> {
    pub fn new(xi: T, alpha1: T, phi1: T, alpha2: T, phi2: T) -> Self {
        Self { xi, alpha1, phi1, alpha2, phi2 }
    }

    pub fn to_array(&self) -> [T; 5] {
        [self.xi, self.alpha1, self.phi1, self.alpha2, self.phi2]
    }

    pub fn from_array(a: [T; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    /// Representative of the same sequence up to a global phase with
    /// ξ ∈ [0, π/2), α ∈ [0, π/2] and φ ∈ [0, 2π).
    ///
    /// Uses U_ZZ(ξ + π/2) = i·U_ZZ(ξ), U_C(α + π, φ) = −U_C(α, φ) and
    /// U_C(π − α, φ) = −U_C(α, φ + π).
    pub fn canonical(&self) -> Self {
        let half_pi = T::FRAC_PI_2();
        let mut xi = self.xi % half_pi;
        if xi < T::zero() {
            xi = xi + half_pi;
        }
        if xi >= half_pi {
            xi = T::zero();
        }
        let pulse = |alpha: T, phi: T| {
            let pi = T::PI();
            let mut a = alpha % pi;
            if a < T::zero() {
                a = a + pi;
            }
            let mut p = phi;
            if a > half_pi {
                a = pi - a;
                p = p + pi;
            }
            (a, wrap_angle(p))
        };
        let (alpha1, phi1) = pulse(self.alpha1, self.phi1);
        let (alpha2, phi2) = pulse(self.alpha2, self.phi2);
        Self::new(xi, alpha1, phi1, alpha2, phi2)
    }
}

/// Which state the sequence starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// W → GHZ: pulse (α₁, φ₁) acts first.
    #[serde(rename = "w2ghz")]
    WToGhz,
    /// GHZ → W: pulse (α₂, φ₂) acts first.
    #[serde(rename = "ghz2w")]
    GhzToW,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::WToGhz => "w2ghz",
            Direction::GhzToW => "ghz2w",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "w2ghz" => Ok(Direction::WToGhz),
            "ghz2w" => Ok(Direction::GhzToW),
            other => Err(Error::InvalidArgument(format!("direction must be w2ghz or ghz2w, got {other:?}"))),
        }
    }
}

/// Ising pulse in the ζ basis: diag(e^{−3iξ}, e^{iξ}, e^{iξ}, e^{−3iξ}).
pub fn u_zz<T: Real>(xi: T) -> ComplexMatrix<T> {
    let three = T::lit(3.0);
    let outer = cis(-three * xi);
    let inner = cis(xi);
    ComplexMatrix::from_diagonal(&[outer, inner, inner, outer])
}

/// Ising pulse on the full space: exp(−iξ H_ZZ/J), diagonal.
pub fn u_zz_full<T: Real>(xi: T) -> ComplexMatrix<T> {
    let diag: Vec<Complex<T>> =
        (0..8u32).map(|idx| if idx == 0 || idx == 7 { cis(-T::lit(3.0) * xi) } else { cis(xi) }).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Single-qubit rotation `cos α·I − i sin α·(cos φ X + sin φ Y)`.
pub fn single_qubit_rotation<T: Real>(alpha: T, phi: T) -> ComplexMatrix<T> {
    let (s, c) = alpha.sin_cos();
    let i_sin = Complex::new(T::zero(), -s);
    ComplexMatrix::new(
        2,
        2,
        vec![Complex::new(c, T::zero()), i_sin * cis(-phi), i_sin * cis(phi), Complex::new(c, T::zero())],
    )
    .expect("2x2")
}

/// Control pulse on the full space: `Π_n (cos α·I − i sin α·𝒜_n)` with
/// `𝒜_n = cos φ X_n + sin φ Y_n`.
pub fn u_c_full<T: Real>(alpha: T, phi: T) -> ComplexMatrix<T> {
    let n = QubitCount::THREE;
    let (s, c) = alpha.sin_cos();
    let (sp, cp) = phi.sin_cos();
    (1..=3).fold(ComplexMatrix::identity(8), |acc, site| {
        let x = pauli_at::<T>(PauliKind::X, site, n).expect("site");
        let y = pauli_at::<T>(PauliKind::Y, site, n).expect("site");
        let a_n = &x.scale_real(cp) + &y.scale_real(sp);
        let factor = &ComplexMatrix::identity(8).scale_real(c) - &a_n.scale(Complex::new(T::zero(), s));
        &acc * &factor
    })
}

/// Control pulse as a tensor product of three single-qubit exponentials.
pub fn u_c_tensor_oracle<T: Real>(alpha: T, phi: T) -> ComplexMatrix<T> {
    let (sp, cp) = phi.sin_cos();
    let axis = &PauliKind::X.matrix::<T>().scale_real(cp) + &PauliKind::Y.matrix::<T>().scale_real(sp);
    let r = herm_expm(&axis, alpha).expect("Pauli axis is Hermitian");
    kron_all(&[r.clone(), r.clone(), r])
}

/// Sector matrices `P_S 𝒮_k P_S†` (k = 1, 2, 3) of the elementary symmetric
/// polynomials in 𝒜₁, 𝒜₂, 𝒜₃.
#[rustfmt::skip]
pub fn sector_s_matrices<T: Real>(phi: T) -> [ComplexMatrix<T>; 3] {
    let z = Complex::<T>::zero();
    let r3 = T::lit(3.0).sqrt();
    let two = T::lit(2.0);
    let e = |k: i32| cis(T::lit(k as f64) * phi);
    let s1 = ComplexMatrix::new(
        4,
        4,
        vec![
            z, e(-1) * r3, z, z,
            e(1) * r3, z, e(-1) * two, z,
            z, e(1) * two, z, e(-1) * r3,
            z, z, e(1) * r3, z,
        ],
    )
    .expect("4x4");
    let s2 = ComplexMatrix::new(
        4,
        4,
        vec![
            z, z, e(-2) * r3, z,
            z, Complex::new(two, T::zero()), z, e(-2) * r3,
            e(2) * r3, z, Complex::new(two, T::zero()), z,
            z, e(2) * r3, z, z,
        ],
    )
    .expect("4x4");
    let s3 = ComplexMatrix::new(
        4,
        4,
        vec![
            z, z, z, e(-3),
            z, z, e(-1), z,
            z, e(1), z, z,
            e(3), z, z, z,
        ],
    )
    .expect("4x4");
    [s1, s2, s3]
}

/// Control pulse in the ζ basis:
/// `cos³α·I − i sinα cos²α·𝒮₁ − sin²α cosα·𝒮₂ + i sin³α·𝒮₃`.
pub fn u_c<T: Real>(alpha: T, phi: T) -> ComplexMatrix<T> {
    let e = u_c_entries(alpha, phi);
    ComplexMatrix::from_fn(4, 4, |i, j| e[i][j])
}

/// Entries of [`u_c`] as a stack array (row-major), for hot loops.
pub fn u_c_entries<T: Real>(alpha: T, phi: T) -> [[Complex<T>; 4]; 4] {
    let (s, c) = alpha.sin_cos();
    let (r3, two) = (T::lit(3.0).sqrt(), T::lit(2.0));
    let k0 = Complex::new(c * c * c, T::zero());
    let k1 = Complex::new(T::zero(), -s * c * c);
    let k2 = Complex::new(-s * s * c, T::zero());
    let k3 = Complex::new(T::zero(), s * s * s);
    let (e1, e2, e3) = (cis(phi), cis(two * phi), cis(T::lit(3.0) * phi));
    let (m1, m2, m3) = (e1.conj(), e2.conj(), e3.conj());
    [
        [k0, k1 * m1 * r3, k2 * m2 * r3, k3 * m3],
        [k1 * e1 * r3, k0 + k2 * two, k1 * m1 * two + k3 * m1, k2 * m2 * r3],
        [k2 * e2 * r3, k1 * e1 * two + k3 * e1, k0 + k2 * two, k1 * m1 * r3],
        [k3 * e3, k2 * e2 * r3, k1 * e1 * r3, k0],
    ]
}

fn compose<T: Real>(
    p: &PulseParams<T>,
    d: Direction,
    uc: impl Fn(T, T) -> ComplexMatrix<T>,
    uzz: impl Fn(T) -> ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let pulse1 = uc(p.alpha1, p.phi1);
    let pulse2 = uc(p.alpha2, p.phi2);
    let ising = uzz(p.xi);
    match d {
        Direction::WToGhz => &(&pulse2 * &ising) * &pulse1,
        Direction::GhzToW => &(&pulse1 * &ising) * &pulse2,
    }
}

/// Whole-sequence propagator 𝒰 in the ζ basis.
pub fn sequence_unitary<T: Real>(p: &PulseParams<T>, d: Direction) -> ComplexMatrix<T> {
    compose(p, d, u_c, u_zz)
}

/// Whole-sequence propagator on the full 8-dimensional space.
pub fn sequence_unitary_full<T: Real>(p: &PulseParams<T>, d: Direction) -> ComplexMatrix<T> {
    compose(p, d, u_c_full, u_zz_full)
}
