//! Dense complex linear algebra for operators on a handful of qubits.
//!
//! Storage is row-major and 0-indexed. For tensor products the left factor is
//! the most significant part of the index, so qubit 1 is the leftmost factor.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{dims, Error, Result};
use crate::scalar::Real;

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries for {}", rows * cols, dims(rows, cols)),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex::zero() })
    }

    /// Build from nested rows of real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn shape_str(&self) -> String {
        dims(self.rows, self.cols)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows on the right", self.cols),
                found: rhs.shape_str(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch { expected: self.shape_str(), found: rhs.shape_str() });
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(self.zip_with(rhs, |a, b| a + b))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(self.zip_with(rhs, |a, b| a - b))
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        Self::from_fn(r, c, |i, j| self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)])
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.try_mul(rhs)?.try_sub(&rhs.try_mul(self)?)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Frobenius inner product `tr(A† B)`.
    pub fn frobenius_inner(&self, rhs: &Self) -> Complex<T> {
        self.data.iter().zip(&rhs.data).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.data.iter().zip(&rhs.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    /// `‖M − M†‖_F`.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (self - &self.adjoint()).frobenius_norm()
    }

    /// `‖M + M†‖_F`.
    pub fn skew_hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (self + &self.adjoint()).frobenius_norm()
    }

    /// `‖U†U − I‖_F`.
    pub fn unitary_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (&(&self.adjoint() * self) - &Self::identity(self.rows)).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitary_deviation() <= tol
    }

    pub fn apply(&self, v: &StateVector<T>) -> StateVector<T> {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        StateVector {
            amps: (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(&v.amps)
                        .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
                })
                .collect(),
        }
    }

    pub fn column(&self, j: usize) -> StateVector<T> {
        StateVector { amps: (0..self.rows).map(|i| self[(i, j)]).collect() }
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(cols: &[StateVector<T>]) -> Self {
        let rows = cols[0].dim();
        Self::from_fn(rows, cols.len(), |i, j| cols[j].amps[i])
    }

    /// Matrix with the adjoints of the given vectors as rows.
    pub fn from_bra_rows(vs: &[StateVector<T>]) -> Self {
        let cols = vs[0].dim();
        Self::from_fn(vs.len(), cols, |i, j| vs[i].amps[j].conj())
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_add(rhs).expect("matrix sum dimension mismatch")
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_sub(rhs).expect("matrix difference dimension mismatch")
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> StateVector<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch { expected: "non-empty vector".into(), found: "0 amplitudes".into() });
        }
        Ok(Self { amps })
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![Complex::zero(); dim];
        amps[index] = Complex::one();
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amps: vec![Complex::zero(); dim] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(Complex::new(T::one() / n, T::zero()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { amps: self.amps.iter().map(|&z| z * s).collect() }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps.iter().zip(&other.amps).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect() }
    }
}

/// Tensor product of a list of matrices, left to right.
pub fn kron_all<T: Real>(factors: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc.kron(f))
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary whose columns are
/// the matching eigenvectors.
pub fn eigh<T: Real>(h: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: "square matrix".into(), found: h.shape_str() });
    }
    let dev = h.hermitian_deviation();
    if dev > T::hermitian_tol() * T::one().max(h.frobenius_norm()) {
        return Err(Error::NotHermitian { deviation: dev.to_f64().unwrap_or(f64::NAN) });
    }
    let n = h.rows();
    // Work on the exactly Hermitian part.
    let half = T::lit(0.5);
    let mut a = (h + &h.adjoint()).scale_real(half);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let eps = T::epsilon();

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= T::min_positive_value() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Phase e^{iθ} of a_pq; rotate in the real plane after removing it.
                let phase = apq / r;
                let tau = (aqq - app) / (r + r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // G = diag(1, e^{-iθ}) · [[c, s], [-s, c]]
                let g_pp = Complex::new(c, T::zero());
                let g_pq = Complex::new(s, T::zero());
                let g_qp = phase.conj() * (-s);
                let g_qq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// `exp(−i·scale·h)` for Hermitian `h`, via its eigendecomposition.
pub fn herm_expm<T: Real>(h: &ComplexMatrix<T>, scale: T) -> Result<ComplexMatrix<T>> {
    let (values, vecs) = eigh(h)?;
    let phases: Vec<Complex<T>> = values
        .iter()
        .map(|&l| {
            let theta = -scale * l;
            Complex::new(theta.cos(), theta.sin())
        })
        .collect();
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (0..n).fold(Complex::zero(), |acc, k| acc + vecs[(i, k)] * phases[k] * vecs[(j, k)].conj());
        }
    }
    Ok(out)
}

/// Rank of the complex span of `ops` under the Frobenius inner product.
///
/// Modified Gram–Schmidt with one re-orthogonalization pass; a residual counts
/// as a new direction when its norm exceeds `tol` times the largest input norm.
pub fn span_dimension<T: Real>(ops: &[ComplexMatrix<T>], tol: T) -> Result<usize> {
    let Some(first) = ops.first() else {
        return Ok(0);
    };
    if let Some(bad) = ops.iter().find(|m| m.rows() != first.rows() || m.cols() != first.cols()) {
        return Err(Error::DimensionMismatch { expected: first.shape_str(), found: bad.shape_str() });
    }
    let max_norm = ops.iter().map(|m| m.frobenius_norm()).fold(T::zero(), T::max);
    if max_norm == T::zero() {
        return Ok(0);
    }
    let threshold = tol * max_norm;
    let mut basis: Vec<ComplexMatrix<T>> = Vec::new();
    for m in ops {
        let mut r = m.clone();
        for _pass in 0..2 {
            for b in &basis {
                let c = b.frobenius_inner(&r);
                r = &r - &b.scale(c);
            }
        }
        let n = r.frobenius_norm();
        if n > threshold {
            basis.push(r.scale_real(T::one() / n));
        }
    }
    Ok(basis.len())
}

/// Orthonormal basis of a real span of matrices, with inner product `Re tr(A†B)`.
#[derive(Clone, Debug)]
pub struct RealSpan<T> {
    basis: Vec<ComplexMatrix<T>>,
    tol: T,
}

impl<T: Real> RealSpan<T> {
    pub fn new(tol: T) -> Self {
        Self { basis: Vec::new(), tol }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix<T>] {
        &self.basis
    }

    /// Residual of `m` after projecting out the current span.
    pub fn residual(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut r = m.clone();
        for _pass in 0..2 {
            for b in &self.basis {
                let c = b.frobenius_inner(&r).re;
                r = &r - &b.scale_real(c);
            }
        }
        r
    }

    /// Add the normalized residual of `m` if its norm exceeds the absolute
    /// threshold `tol`. Returns the inserted element.
    pub fn insert(&mut self, m: &ComplexMatrix<T>) -> Option<&ComplexMatrix<T>> {
        if let Some(b) = self.basis.first() {
            assert_eq!((b.rows(), b.cols()), (m.rows(), m.cols()));
        }
        let r = self.residual(m);
        let n = r.frobenius_norm();
        if n > self.tol {
            self.basis.push(r.scale_real(T::one() / n));
            self.basis.last()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::PauliKind;
    use proptest::prelude::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_matrix(seed: &[f64]) -> M {
        M::from_fn(2, 2, |i, j| c(seed[2 * (2 * i + j)], seed[2 * (2 * i + j) + 1]))
    }

    fn random_hermitian(n: usize, seed: &[f64]) -> M {
        let mut k = 0;
        let mut m = M::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                if i == j {
                    m[(i, i)] = c(seed[k % seed.len()], 0.0);
                    k += 1;
                } else {
                    let z = c(seed[k % seed.len()], seed[(k + 1) % seed.len()]);
                    k += 2;
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
        }
        m
    }

    #[test]
    fn kron_identity() {
        let i2 = M::identity(2);
        assert_eq!(i2.kron(&i2), M::identity(4));
    }

    #[test]
    fn kron_x_z_blocks() {
        let x: M = PauliKind::X.matrix();
        let z: M = PauliKind::Z.matrix();
        let k = x.kron(&z);
        let expected = M::from_real_rows(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
        ]);
        assert_eq!(k, expected);
    }

    #[test]
    fn new_rejects_wrong_entry_count() {
        assert!(M::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(M::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn try_mul_rejects_mismatch() {
        let a = M::zeros(2, 3);
        assert!(matches!(a.try_mul(&a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn expm_of_z_is_diagonal_phase() {
        let z: M = PauliKind::Z.matrix();
        let theta = 0.731;
        let u = herm_expm(&z, theta).unwrap();
        let expected = M::from_diagonal(&[c(theta.cos(), -theta.sin()), c(theta.cos(), theta.sin())]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let u = herm_expm(&M::zeros(4, 4), 3.3).unwrap();
        assert!(u.max_abs_diff(&M::identity(4)) < 1e-15);
    }

    #[test]
    fn expm_matches_rotation_identity() {
        let x: M = PauliKind::X.matrix();
        let y: M = PauliKind::Y.matrix();
        for &(phi, theta) in &[(0.0, 0.4), (1.1, -2.0), (5.0 * std::f64::consts::PI / 6.0, 0.785)] {
            let axis = &x.scale_real(f64::cos(phi)) + &y.scale_real(f64::sin(phi));
            let u = herm_expm(&axis, theta).unwrap();
            let expected = &M::identity(2).scale_real(theta.cos()) - &axis.scale(c(0.0, theta.sin()));
            assert!(u.max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let mut m = M::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(herm_expm(&m, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_reconstructs_degenerate_spectrum() {
        let h = M::from_diagonal(&[c(3.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(3.0, 0.0)]);
        let (vals, _) = eigh(&h).unwrap();
        assert_eq!(vals, vec![-1.0, -1.0, 3.0, 3.0]);
    }

    #[test]
    fn span_examples() {
        let i2 = M::identity(2);
        assert_eq!(span_dimension(std::slice::from_ref(&i2), 1e-9).unwrap(), 1);
        let [x, y, z] = [PauliKind::X, PauliKind::Y, PauliKind::Z].map(|k| k.matrix::<f64>());
        let xy = &x + &y;
        assert_eq!(span_dimension(&[i2, x, y, z, xy], 1e-9).unwrap(), 4);
        assert_eq!(span_dimension::<f64>(&[], 1e-9).unwrap(), 0);
    }

    #[test]
    fn span_rejects_mismatched_shapes() {
        let r = span_dimension(&[M::identity(2), M::identity(4)], 1e-9);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn generic_over_f32() {
        let z: ComplexMatrix<f32> = PauliKind::Z.matrix();
        let u = herm_expm(&z, 0.5_f32).unwrap();
        assert!(u.is_unitary(1e-6));
    }

    proptest! {
        #[test]
        fn mixed_product(seed in proptest::collection::vec(-1.0..1.0f64, 32)) {
            let a = random_matrix(&seed[0..8]);
            let b = random_matrix(&seed[8..16]);
            let cm = random_matrix(&seed[16..24]);
            let d = random_matrix(&seed[24..32]);
            let lhs = &a.kron(&b) * &cm.kron(&d);
            let rhs = (&a * &cm).kron(&(&b * &d));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        }

        #[test]
        fn expm_unitary_and_group_law(
            seed in proptest::collection::vec(-2.0..2.0f64, 64),
            s1 in -3.0..3.0f64,
            s2 in -3.0..3.0f64,
        ) {
            let h = random_hermitian(8, &seed);
            let u1 = herm_expm(&h, s1).unwrap();
            let u2 = herm_expm(&h, s2).unwrap();
            let u12 = herm_expm(&h, s1 + s2).unwrap();
            prop_assert!(u1.unitary_deviation() < 1e-12);
            prop_assert!((&u1 * &u2).max_abs_diff(&u12) < 1e-12);
            let back = herm_expm(&h, -s1).unwrap();
            prop_assert!((&u1 * &back).max_abs_diff(&M::identity(8)) < 1e-12);
        }

        #[test]
        fn span_is_order_invariant_and_idempotent(
            perm_seed in 0usize..120,
            w in proptest::collection::vec(-1.0..1.0f64, 4),
        ) {
            let mut ops: Vec<M> = [PauliKind::X, PauliKind::Y, PauliKind::Z]
                .map(|k| k.matrix())
                .into_iter()
                .collect();
            ops.push(&ops[0] + &ops[1]);
            ops.push(M::identity(2));
            let base = span_dimension(&ops, 1e-9).unwrap();
            // Fisher-Yates-ish deterministic shuffle.
            let mut shuffled = ops.clone();
            let mut k = perm_seed;
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, k % (i + 1));
                k /= i + 1;
            }
            prop_assert_eq!(span_dimension(&shuffled, 1e-9).unwrap(), base);
            let combo = ops.iter().zip(&w).fold(M::zeros(2, 2), |acc, (m, &c)| &acc + &m.scale_real(c));
            ops.push(combo);
            prop_assert_eq!(span_dimension(&ops, 1e-9).unwrap(), base);
        }
    }
}
