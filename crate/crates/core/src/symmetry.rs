//! Qubit-permutation symmetry of the three-qubit register.
//!
//! Covers the permutation operators, the symmetrizer, the Hamming-weight basis
//! ζ₀..ζ₃ of the symmetric sector with its 4×8 projection map, the
//! invariant-subspace decomposition of the full space, and Lie-algebra
//! dimension counts.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{eigh, span_dimension, ComplexMatrix, RealSpan, StateVector};
use crate::operators::{collective, ising_hamiltonian, pauli_string, CouplingStrength, PauliKind, QubitCount};
use crate::scalar::Real;

const N_QUBITS: usize = 3;
const DIM: usize = 8;

/// Bijection on the qubit labels, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// From 1-based images: `new(&[2, 1, 3])` swaps qubits 1 and 2.
    pub fn new(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidPermutation(images.to_vec()));
            }
            seen[v - 1] = true;
        }
        Ok(Self { map: images.iter().map(|v| v - 1).collect() })
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Transposition of the 1-based sites `a` and `b` among `n`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n).collect();
        if a == 0 || b == 0 || a > n || b > n {
            return Err(Error::InvalidPermutation(vec![a, b]));
        }
        images.swap(a - 1, b - 1);
        Self::new(&images)
    }

    /// All six permutations of three qubits, identity first.
    pub fn all_s3() -> Vec<Self> {
        [[1, 2, 3], [2, 1, 3], [1, 3, 2], [3, 2, 1], [2, 3, 1], [3, 1, 2]]
            .iter()
            .map(|p| Self::new(p).expect("valid"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Image of the 1-based site `i`.
    pub fn image(&self, i: usize) -> usize {
        self.map[i - 1] + 1
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { map: other.map.iter().map(|&j| self.map[j]).collect() }
    }

    pub fn fixed_points(&self) -> usize {
        self.map.iter().enumerate().filter(|(i, &m)| *i == m).count()
    }

    /// +1 for even, −1 for odd permutations.
    pub fn sign(&self) -> i32 {
        let mut visited = vec![false; self.map.len()];
        let mut sign = 1;
        for start in 0..self.map.len() {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !visited[j] {
                visited[j] = true;
                j = self.map[j];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

/// Unitary that moves the state of qubit `i` to qubit `p(i)`.
pub fn permutation_operator<T: Real>(p: &Permutation) -> ComplexMatrix<T> {
    let n = p.len();
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let mut out = 0usize;
        for i in 0..n {
            let bit = (idx >> (n - 1 - i)) & 1;
            out |= bit << (n - 1 - p.map[i]);
        }
        m[(out, idx)] = Complex::new(T::one(), T::zero());
    }
    m
}

fn check_full_dim<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    if m.rows() != DIM || m.cols() != DIM {
        return Err(Error::DimensionMismatch { expected: "8x8".into(), found: m.shape_str() });
    }
    Ok(())
}

/// Average of `P m P†` over the six qubit permutations.
pub fn symmetrize<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_full_dim(m)?;
    let sum = Permutation::all_s3().iter().fold(ComplexMatrix::zeros(DIM, DIM), |acc, p| {
        let op = permutation_operator::<T>(p);
        &acc + &(&(&op * m) * &op.adjoint())
    });
    Ok(sum.scale_real(T::one() / T::lit(6.0)))
}

/// Hamming-weight basis ζ₀..ζ₃ of the symmetric sector and the 4×8 map `P_S`
/// whose rows are ζ_a†.
#[derive(Clone, Debug)]
pub struct SectorBasis<T> {
    vectors: Vec<StateVector<T>>,
    projector: ComplexMatrix<T>,
}

impl<T: Real> SectorBasis<T> {
    pub fn new() -> Self {
        let vectors: Vec<StateVector<T>> = (0..=N_QUBITS)
            .map(|weight| {
                let members: Vec<usize> = (0..DIM).filter(|i| i.count_ones() as usize == weight).collect();
                let a = T::one() / T::lit(members.len() as f64).sqrt();
                let mut amps = vec![Complex::zero(); DIM];
                for i in members {
                    amps[i] = Complex::new(a, T::zero());
                }
                StateVector::new(amps).expect("non-empty")
            })
            .collect();
        let projector = ComplexMatrix::from_bra_rows(&vectors);
        Self { vectors, projector }
    }

    pub fn vectors(&self) -> &[StateVector<T>] {
        &self.vectors
    }

    /// `P_S`, 4×8.
    pub fn projector(&self) -> &ComplexMatrix<T> {
        &self.projector
    }

    /// Coordinates of an 8-dimensional state in the ζ basis.
    pub fn reduce_state(&self, v: &StateVector<T>) -> StateVector<T> {
        self.projector.apply(v)
    }

    /// 8-dimensional state with the given ζ-basis coordinates.
    pub fn embed_state(&self, v: &StateVector<T>) -> StateVector<T> {
        self.projector.adjoint().apply(v)
    }

    /// `P_S† m P_S`.
    pub fn lift(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &(&self.projector.adjoint() * m) * &self.projector
    }
}

impl<T: Real> Default for SectorBasis<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// The 4×4 compression `P_S m P_S†`.
pub fn compress<T: Real>(m: &ComplexMatrix<T>, basis: &SectorBasis<T>) -> Result<ComplexMatrix<T>> {
    check_full_dim(m)?;
    Ok(&(&basis.projector * m) * &basis.projector.adjoint())
}

/// The 64 operators `i·Π(σ₁⊗σ₂⊗σ₃)`.
pub fn symmetrized_pauli_strings<T: Real>() -> Vec<ComplexMatrix<T>> {
    let mut out = Vec::with_capacity(64);
    for a in PauliKind::ALL {
        for b in PauliKind::ALL {
            for c in PauliKind::ALL {
                let s = symmetrize(&pauli_string::<T>(&[a, b, c])).expect("8x8");
                out.push(s.scale(Complex::i()));
            }
        }
    }
    out
}

/// Dimension of the permutation-invariant algebra u^{S₃}(8).
pub fn u_s3_dimension() -> usize {
    span_dimension(&symmetrized_pauli_strings::<f64>(), f64::rank_tol()).expect("uniform shapes")
}

/// Which S₃ isotypic component an invariant block belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Isotype {
    Trivial,
    Standard,
    Sign,
}

#[derive(Clone, Debug)]
pub struct InvariantBlock<T> {
    pub isotype: Isotype,
    /// Orthonormal basis of the block.
    pub basis: Vec<StateVector<T>>,
    /// Largest `‖(I − QQ†) G Q‖_F` over the generators.
    pub leakage: T,
    /// Dimension of the commutant of the restricted generators (1 ⇔ irreducible).
    pub commutant_dim: usize,
}

impl<T: Real> InvariantBlock<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_irreducible(&self) -> bool {
        self.commutant_dim == 1
    }

    /// `Q† m Q` in the block's own basis.
    pub fn restrict(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let q = ComplexMatrix::from_columns(&self.basis);
        &(&q.adjoint() * m) * &q
    }
}

#[derive(Clone, Debug)]
pub struct SectorDecomposition<T> {
    pub blocks: Vec<InvariantBlock<T>>,
}

impl<T: Real> SectorDecomposition<T> {
    /// Block dimensions in descending order.
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.blocks.iter().map(|b| b.dim()).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn symmetric_block(&self) -> Option<&InvariantBlock<T>> {
        self.blocks.iter().find(|b| b.isotype == Isotype::Trivial)
    }
}

/// Orthonormal basis of the column space of `m`.
fn column_space<T: Real>(m: &ComplexMatrix<T>) -> Vec<StateVector<T>> {
    let scale = m.frobenius_norm();
    let mut basis: Vec<StateVector<T>> = Vec::new();
    for j in 0..m.cols() {
        let mut r = m.column(j);
        for _pass in 0..2 {
            for b in &basis {
                r = r.sub(&b.scale(b.inner(&r)));
            }
        }
        let n = r.norm();
        if n > T::rank_tol() * scale {
            basis.push(r.scale(Complex::new(T::one() / n, T::zero())));
        }
    }
    basis
}

fn commutant_dimension<T: Real>(gens: &[ComplexMatrix<T>]) -> usize {
    let d = gens[0].rows();
    let images: Vec<ComplexMatrix<T>> = (0..d * d)
        .map(|k| {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(k / d, k % d)] = Complex::new(T::one(), T::zero());
            // Stack the commutators as a block diagonal.
            let mut out = ComplexMatrix::zeros(d * gens.len(), d * gens.len());
            for (g_idx, g) in gens.iter().enumerate() {
                let c = g.commutator(&e).expect("square");
                for i in 0..d {
                    for j in 0..d {
                        out[(g_idx * d + i, g_idx * d + j)] = c[(i, j)];
                    }
                }
            }
            out
        })
        .collect();
    let rank = span_dimension(&images, T::rank_tol()).expect("uniform shapes");
    d * d - rank
}

fn make_block<T: Real>(
    isotype: Isotype,
    basis: Vec<StateVector<T>>,
    generators: &[ComplexMatrix<T>],
) -> InvariantBlock<T> {
    let q = ComplexMatrix::from_columns(&basis);
    let complement = &ComplexMatrix::identity(DIM) - &(&q * &q.adjoint());
    let leakage = generators.iter().map(|g| (&(&complement * g) * &q).frobenius_norm()).fold(T::zero(), T::max);
    let restricted: Vec<ComplexMatrix<T>> = generators.iter().map(|g| &(&q.adjoint() * g) * &q).collect();
    InvariantBlock { isotype, commutant_dim: commutant_dimension(&restricted), basis, leakage }
}

/// Decompose the three-qubit space into subspaces invariant under
/// `{H_ZZ, 𝒳, 𝒴}`, working inside the S₃ isotypic components.
///
/// The standard isotypic component carries two copies of the same spin-½
/// action; it is split along the ±1 eigenspaces of the transposition (1 2),
/// which commutes with every generator.
pub fn sector_decomposition<T: Real>() -> SectorDecomposition<T> {
    let n = QubitCount::THREE;
    let generators = vec![
        ising_hamiltonian::<T>(n, CouplingStrength::default()).expect("n = 3"),
        collective::<T>(PauliKind::X, n),
        collective::<T>(PauliKind::Y, n),
    ];
    let perms = Permutation::all_s3();
    let ops: Vec<ComplexMatrix<T>> = perms.iter().map(permutation_operator).collect();
    let sixth = T::one() / T::lit(6.0);

    let trivial = ops.iter().fold(ComplexMatrix::zeros(DIM, DIM), |acc, p| &acc + p).scale_real(sixth);
    let sign = perms
        .iter()
        .zip(&ops)
        .fold(ComplexMatrix::zeros(DIM, DIM), |acc, (p, op)| &acc + &op.scale_real(T::lit(p.sign() as f64)))
        .scale_real(sixth);
    // Character of the 2-dim irrep: 2 on e, 0 on transpositions, −1 on 3-cycles.
    let standard = perms
        .iter()
        .zip(&ops)
        .fold(ComplexMatrix::zeros(DIM, DIM), |acc, (p, op)| {
            let chi = match p.fixed_points() {
                3 => 2.0,
                1 => 0.0,
                _ => -1.0,
            };
            &acc + &op.scale_real(T::lit(chi))
        })
        .scale_real(T::lit(2.0) * sixth);

    let mut blocks = Vec::new();
    let trivial_basis = column_space(&trivial);
    if !trivial_basis.is_empty() {
        blocks.push(make_block(Isotype::Trivial, trivial_basis, &generators));
    }
    let sign_basis = column_space(&sign);
    if !sign_basis.is_empty() {
        blocks.push(make_block(Isotype::Sign, sign_basis, &generators));
    }

    let std_basis = column_space(&standard);
    if !std_basis.is_empty() {
        let q = ComplexMatrix::from_columns(&std_basis);
        let swap = permutation_operator::<T>(&Permutation::transposition(3, 1, 2).expect("valid"));
        let restricted = &(&q.adjoint() * &swap) * &q;
        let (vals, vecs) = eigh(&restricted).expect("transposition is Hermitian");
        let mut start = 0;
        while start < vals.len() {
            let mut end = start + 1;
            while end < vals.len() && (vals[end] - vals[start]).abs() < T::lit(1e-6) {
                end += 1;
            }
            let basis: Vec<StateVector<T>> = (start..end).map(|k| q.apply(&vecs.column(k))).collect();
            blocks.push(make_block(Isotype::Standard, basis, &generators));
            start = end;
        }
    }
    blocks.sort_by_key(|b| std::cmp::Reverse(b.dim()));
    SectorDecomposition { blocks }
}

/// Invariant-subspace dimensions of the three-qubit space, descending.
pub fn sector_decomposition_dims() -> Vec<usize> {
    sector_decomposition::<f64>().dims()
}

/// Real dimension of the Lie algebra generated by skew-Hermitian `generators`.
///
/// Each iteration commutes the directions added in the previous iteration
/// with every generator; the closure has stabilized when nothing new appears.
pub fn dynamical_lie_dimension<T: Real>(generators: &[ComplexMatrix<T>], max_depth: usize) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Ok(0);
    };
    for g in generators {
        if g.rows() != first.rows() || g.cols() != first.cols() {
            return Err(Error::DimensionMismatch { expected: first.shape_str(), found: g.shape_str() });
        }
        let dev = g.skew_hermitian_deviation();
        if dev > T::hermitian_tol() * T::one().max(g.frobenius_norm()) {
            return Err(Error::NotSkewHermitian { deviation: dev.to_f64().unwrap_or(f64::NAN) });
        }
    }
    let gens: Vec<ComplexMatrix<T>> = generators
        .iter()
        .filter(|g| g.frobenius_norm() > T::zero())
        .map(|g| g.scale_real(T::one() / g.frobenius_norm()))
        .collect();
    let mut span = RealSpan::new(T::rank_tol());
    let mut frontier: Vec<ComplexMatrix<T>> = gens.iter().filter_map(|g| span.insert(g).cloned()).collect();

    for _depth in 0..max_depth {
        let candidates: Vec<ComplexMatrix<T>> =
            frontier.iter().flat_map(|b| gens.iter().map(move |g| b.commutator(g).expect("same shape"))).collect();
        let added: Vec<ComplexMatrix<T>> = candidates.iter().filter_map(|c| span.insert(c).cloned()).collect();
        if added.is_empty() {
            return Ok(span.dim());
        }
        frontier = added;
    }
    Err(Error::LieClosureNotConverged { depth: max_depth, dim: span.dim() })
}

/// Generators `{iH_ZZ, i𝒳, i𝒴}` of the three-qubit register (J = 1).
pub fn ising_control_generators<T: Real>() -> Vec<ComplexMatrix<T>> {
    let n = QubitCount::THREE;
    vec![
        ising_hamiltonian::<T>(n, CouplingStrength::default()).expect("n = 3"),
        collective::<T>(PauliKind::X, n),
        collective::<T>(PauliKind::Y, n),
    ]
    .into_iter()
    .map(|h| h.scale(Complex::i()))
    .collect()
}

/// Dimension of the dynamical Lie algebra of the three-qubit register.
pub fn ising_dynamical_dimension(max_depth: usize) -> Result<usize> {
    dynamical_lie_dimension(&ising_control_generators::<f64>(), max_depth)
}
