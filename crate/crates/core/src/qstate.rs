//! Dense density-matrix engine.
//!
//! Registers are small (at most [`MAX_QUBITS`] qubits) and every operation is
//! exact up to floating-point rounding. Qubit 0 is the leftmost, most
//! significant position of a basis bitstring, so `|01>` on two qubits is
//! basis index 1 and qubit 1 carries the `1`.
//!
//! All operations return new values; a [`DensityMatrix`] is never mutated in
//! place once handed out.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 12;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-12;
const FILTER_NORM_TOL: f64 = 1e-12;

#[inline]
fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Complex 2x2 matrix acting on a single qubit slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitOperator {
    m: [[C64; 2]; 2],
}

impl QubitOperator {
    pub fn new(m: [[C64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self::new([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn identity() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn zero() -> Self {
        Self::from_real([[0.0; 2]; 2])
    }

    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Self::new([[c(0.0), C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), c(0.0)]])
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        // eigenvalues of the Hermitian K^dag K in closed form
        let g = self.adjoint() * *self;
        let a = g.m[0][0].re;
        let d = g.m[1][1].re;
        let b = g.m[0][1].norm_sqr();
        let top = 0.5 * (a + d + ((a - d) * (a - d) + 4.0 * b).sqrt());
        top.max(0.0).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for col in 0..2 {
                worst = worst.max((self.m[r][col] - other.m[r][col]).norm());
            }
        }
        worst
    }
}

impl Mul for QubitOperator {
    type Output = QubitOperator;

    fn mul(self, rhs: QubitOperator) -> QubitOperator {
        let mut out = [[c(0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (col, slot) in row.iter_mut().enumerate() {
                *slot = self.m[r][0] * rhs.m[0][col] + self.m[r][1] * rhs.m[1][col];
            }
        }
        QubitOperator::new(out)
    }
}

/// Sum of K^dag K over a Kraus set.
pub fn kraus_effect(kraus: &[QubitOperator]) -> QubitOperator {
    let mut acc = [[c(0.0); 2]; 2];
    for k in kraus {
        let g = k.adjoint() * *k;
        for (row, grow) in acc.iter_mut().zip(g.m) {
            for (a, v) in row.iter_mut().zip(grow) {
                *a += v;
            }
        }
    }
    QubitOperator::new(acc)
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::arg(format!("dimension {dim} is not a power of two")));
    }
    let qubits = dim.trailing_zeros() as usize;
    if qubits > MAX_QUBITS {
        return Err(Error::RegisterCap {
            requested: qubits,
            cap: MAX_QUBITS,
        });
    }
    Ok(qubits)
}

/// Bit mask of `qubit` in an `n`-qubit register.
#[inline]
fn mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Scatter the bits of `value` (MSB first, one per entry of `positions`) into
/// a full register index.
fn scatter(n: usize, positions: &[usize], value: usize) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(0, |acc, (slot, &q)| {
        if value >> (k - 1 - slot) & 1 == 1 {
            acc | mask(n, q)
        } else {
            acc
        }
    })
}

fn check_distinct(n: usize, qubits: &[usize]) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::arg(format!("qubit {q} out of range for {n} qubits")));
        }
        if qubits[..i].contains(&q) {
            return Err(Error::arg(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    qubits: usize,
    amps: DVector<C64>,
}

impl PureState {
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let qubits = qubits_for_dim(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::arg(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            qubits,
            amps: DVector::from_vec(amps),
        })
    }

    /// Normalized superposition of the given basis indices with real weights.
    pub fn from_real_terms(qubits: usize, terms: &[(usize, f64)]) -> Result<Self> {
        let dim = 1usize << qubits;
        let mut amps = vec![c(0.0); dim];
        for &(idx, a) in terms {
            if idx >= dim {
                return Err(Error::arg(format!("basis index {idx} out of range")));
            }
            amps[idx] += c(a);
        }
        Self::from_amplitudes(amps)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        Self::from_real_terms(qubits, &[(index, 1.0)])
    }

    /// `(|01> + |10>)/sqrt(2)`.
    pub fn bell_psi() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real_terms(2, &[(0b01, s), (0b10, s)]).expect("valid Bell state")
    }

    /// `|01>/sqrt(2-d) + sqrt((1-d)/(2-d)) |10>`, the input that maximizes the
    /// singlet fraction when only the first qubit is damped at rate `d`.
    pub fn nonmax_psi(d: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&d) {
            return Err(Error::arg(format!("damping rate {d} outside [0,1)")));
        }
        let norm = 2.0 - d;
        Self::from_real_terms(
            2,
            &[
                (0b01, (1.0 / norm).sqrt()),
                (0b10, ((1.0 - d) / norm).sqrt()),
            ],
        )
    }

    /// `(|001> + |110>)/sqrt(2)`.
    pub fn ghz3() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real_terms(3, &[(0b001, s), (0b110, s)]).expect("valid GHZ state")
    }

    /// Symmetric single-excitation state on `n` qubits.
    pub fn w_state(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::arg("W state needs at least one qubit"));
        }
        let a = 1.0 / (n as f64).sqrt();
        let terms: Vec<_> = (0..n).map(|q| (1usize << q, a)).collect();
        Self::from_real_terms(n, &terms)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            qubits: self.qubits,
            mat: &self.amps * self.amps.adjoint(),
            normalized: true,
        }
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(s: &PureState) -> Self {
        s.to_density()
    }
}

/// Result of a single filter application.
#[derive(Clone, Debug)]
pub struct Filtered {
    /// Post-selected state, `None` when the filter can never succeed.
    pub state: Option<DensityMatrix>,
    pub probability: f64,
}

/// One branch of a computational-basis measurement.
#[derive(Clone, Debug)]
pub struct MeasurementBranch {
    /// Outcome bits in the order the qubits were requested.
    pub outcome: Vec<u8>,
    pub probability: f64,
    /// Renormalized state of the unmeasured qubits, in ascending qubit order.
    pub state: DensityMatrix,
}

impl MeasurementBranch {
    pub fn label(&self) -> String {
        self.outcome
            .iter()
            .map(|b| if *b == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Hermitian positive-semidefinite matrix of dimension `2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    mat: DMatrix<C64>,
    normalized: bool,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity and trace.
    ///
    /// Positivity is not checked here since it needs an eigendecomposition;
    /// see [`DensityMatrix::validate`].
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::arg("density matrix must be square"));
        }
        let qubits = qubits_for_dim(mat.nrows())?;
        let dim = mat.nrows();
        for i in 0..dim {
            for j in i..dim {
                if (mat[(i, j)] - mat[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::arg(format!("matrix not Hermitian at ({i},{j})")));
                }
            }
        }
        let tr = mat.trace().re;
        if !(tr > 0.0 && tr <= 1.0 + TRACE_TOL) {
            return Err(Error::arg(format!("trace {tr} outside (0,1]")));
        }
        Ok(Self {
            qubits,
            mat,
            normalized: (tr - 1.0).abs() <= TRACE_TOL,
        })
    }

    /// Builds a real-entried state from a closure over basis indices.
    pub fn from_real_fn(qubits: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::RegisterCap {
                requested: qubits,
                cap: MAX_QUBITS,
            });
        }
        let dim = 1 << qubits;
        Self::from_matrix(DMatrix::from_fn(dim, dim, |i, j| c(f(i, j))))
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        let p = 1.0 / (1u64 << qubits) as f64;
        Self::from_real_fn(qubits, |i, j| if i == j { p } else { 0.0 })
    }

    pub fn basis_projector(qubits: usize, index: usize) -> Result<Self> {
        Ok(PureState::basis(qubits, index)?.to_density())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rescaled to unit trace.
    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        Self {
            qubits: self.qubits,
            mat: self.mat.map(|z| z / tr),
            normalized: true,
        }
    }

    fn with_matrix(&self, qubits: usize, mat: DMatrix<C64>) -> Self {
        let tr = mat.trace().re;
        Self {
            qubits,
            mat,
            normalized: (tr - 1.0).abs() <= TRACE_TOL,
        }
    }

    fn symmetrized(mut self) -> Self {
        let adj = self.mat.adjoint();
        self.mat = (&self.mat + adj).map(|z| z * 0.5);
        self
    }

    /// Entrywise max |a - b|; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.mat.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&e| e > tol).count()
    }

    /// Full invariant check: Hermitian, PSD and trace bounds.
    pub fn validate(&self) -> Result<()> {
        let checked = Self::from_matrix(self.mat.clone())?;
        let min = checked.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::arg(format!("smallest eigenvalue {min} is negative")));
        }
        Ok(())
    }

    /// Kronecker product; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(Error::RegisterCap {
                requested: qubits,
                cap: MAX_QUBITS,
            });
        }
        Ok(self.with_matrix(qubits, self.mat.kronecker(&other.mat)))
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubits {
            return Err(Error::arg(format!(
                "qubit {qubit} out of range for {} qubits",
                self.qubits
            )));
        }
        Ok(())
    }

    /// `K rho K^dag` with `K` acting on `qubit`; O(dim^2).
    fn conjugate_single(&self, op: &QubitOperator, qubit: usize) -> DMatrix<C64> {
        let n = self.qubits;
        let dim = self.dim();
        let bit = mask(n, qubit);
        let k = op.m;
        let mut m = self.mat.clone();
        // left multiplication mixes row pairs
        for j in 0..dim {
            for i in (0..dim).filter(|i| i & bit == 0) {
                let x0 = m[(i, j)];
                let x1 = m[(i | bit, j)];
                m[(i, j)] = k[0][0] * x0 + k[0][1] * x1;
                m[(i | bit, j)] = k[1][0] * x0 + k[1][1] * x1;
            }
        }
        // right multiplication by K^dag mixes column pairs
        let kc = [
            [k[0][0].conj(), k[0][1].conj()],
            [k[1][0].conj(), k[1][1].conj()],
        ];
        for j in (0..dim).filter(|j| j & bit == 0) {
            for i in 0..dim {
                let y0 = m[(i, j)];
                let y1 = m[(i, j | bit)];
                m[(i, j)] = y0 * kc[0][0] + y1 * kc[0][1];
                m[(i, j | bit)] = y0 * kc[1][0] + y1 * kc[1][1];
            }
        }
        m
    }

    /// Trace-preserving map `rho -> sum_i K_i rho K_i^dag` on one qubit.
    pub fn apply_channel(&self, kraus: &[QubitOperator], qubit: usize) -> Result<DensityMatrix> {
        self.check_qubit(qubit)?;
        let effect = kraus_effect(kraus);
        let deviation = effect.max_abs_diff(&QubitOperator::identity());
        if kraus.is_empty() || deviation > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        let mut acc = DMatrix::<C64>::zeros(self.dim(), self.dim());
        for k in kraus {
            acc += self.conjugate_single(k, qubit);
        }
        Ok(self.with_matrix(self.qubits, acc).symmetrized())
    }

    /// Post-selected measurement element on one qubit.
    ///
    /// The probability is `tr(M rho M^dag) / tr(rho)`; the returned state is
    /// renormalized to unit trace.
    pub fn apply_filter(&self, op: &QubitOperator, qubit: usize) -> Result<Filtered> {
        self.check_qubit(qubit)?;
        let norm = op.operator_norm();
        if norm > 1.0 + FILTER_NORM_TOL {
            return Err(Error::InvalidFilter { norm });
        }
        let out = self.conjugate_single(op, qubit);
        let kept = out.trace().re;
        let probability = (kept / self.trace()).clamp(0.0, 1.0);
        if kept <= 0.0 {
            return Ok(Filtered {
                state: None,
                probability: 0.0,
            });
        }
        let state = DensityMatrix {
            qubits: self.qubits,
            mat: out.map(|z| z / kept),
            normalized: true,
        }
        .symmetrized();
        Ok(Filtered {
            state: Some(state),
            probability,
        })
    }

    /// Conjugation by a CNOT; a pure index permutation.
    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<DensityMatrix> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::arg("CNOT control and target coincide"));
        }
        let n = self.qubits;
        let (cb, tb) = (mask(n, control), mask(n, target));
        let perm = |i: usize| if i & cb != 0 { i ^ tb } else { i };
        let dim = self.dim();
        let mat = DMatrix::from_fn(dim, dim, |i, j| self.mat[(perm(i), perm(j))]);
        Ok(DensityMatrix {
            qubits: n,
            mat,
            normalized: self.normalized,
        })
    }

    /// Projective measurement of `qubits` in the computational basis.
    ///
    /// Branches with zero probability are omitted. Probabilities sum to the
    /// trace of the input.
    pub fn measure_computational(&self, qubits: &[usize]) -> Result<Vec<MeasurementBranch>> {
        let n = self.qubits;
        check_distinct(n, qubits)?;
        let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
        let sub_dim = 1usize << rest.len();
        let mut branches = Vec::new();
        for outcome in 0..(1usize << qubits.len()) {
            let base = scatter(n, qubits, outcome);
            let index: Vec<usize> = (0..sub_dim).map(|r| base | scatter(n, &rest, r)).collect();
            let block = DMatrix::from_fn(sub_dim, sub_dim, |i, j| self.mat[(index[i], index[j])]);
            let probability = block.trace().re;
            if probability <= 0.0 {
                continue;
            }
            let bits = (0..qubits.len())
                .map(|slot| (outcome >> (qubits.len() - 1 - slot) & 1) as u8)
                .collect();
            branches.push(MeasurementBranch {
                outcome: bits,
                probability,
                state: DensityMatrix {
                    qubits: rest.len(),
                    mat: block.map(|z| z / probability),
                    normalized: true,
                },
            });
        }
        Ok(branches)
    }

    /// Reduced state on `keep`, with output qubits in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.qubits;
        if keep.is_empty() {
            return Err(Error::arg("partial trace must keep at least one qubit"));
        }
        check_distinct(n, keep)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dim = 1usize << keep.len();
        let env: Vec<usize> = (0..1usize << traced.len())
            .map(|t| scatter(n, &traced, t))
            .collect();
        let kept: Vec<usize> = (0..dim).map(|k| scatter(n, keep, k)).collect();
        let mat = DMatrix::from_fn(dim, dim, |i, j| {
            env.iter()
                .map(|&e| self.mat[(kept[i] | e, kept[j] | e)])
                .sum()
        });
        Ok(self.with_matrix(keep.len(), mat))
    }

    /// `<target| rho |target>`.
    pub fn fidelity_with_pure(&self, target: &PureState) -> Result<f64> {
        if target.dim() != self.dim() {
            return Err(Error::arg(format!(
                "fidelity target has dim {}, state has dim {}",
                target.dim(),
                self.dim()
            )));
        }
        let v = target.amplitudes();
        Ok((v.adjoint() * &self.mat * v)[(0, 0)].re)
    }

    /// Wootters concurrence of a two-qubit state.
    ///
    /// Writing `rho = X X^dagger`, the Wootters numbers are the singular values
    /// of `X^T (Y x Y) X`. Taking them from an SVD avoids square-rooting tiny
    /// eigenvalues, which would turn 1e-17 of eigen-solver noise into 1e-9.
    /// Eigenvalues of `rho` below `RANK_CUTOFF` are treated as exact zeros.
    pub fn concurrence(&self) -> Result<f64> {
        const RANK_CUTOFF: f64 = 1e-13;
        if self.qubits != 2 {
            return Err(Error::arg("concurrence is defined for two qubits only"));
        }
        let yy = {
            let y = QubitOperator::pauli_y();
            DMatrix::from_fn(4, 4, |i, j| y.m[i >> 1][j >> 1] * y.m[i & 1][j & 1])
        };
        let eig = SymmetricEigen::new(self.mat.clone());
        let cutoff = RANK_CUTOFF * self.trace();
        let x = DMatrix::from_fn(4, 4, |i, k| {
            let e = eig.eigenvalues[k];
            if e > cutoff {
                eig.eigenvectors[(i, k)] * e.sqrt()
            } else {
                c(0.0)
            }
        });
        let tau = x.transpose() * yy * &x;
        let mut l: Vec<f64> = tau.singular_values().iter().copied().collect();
        l.sort_by(|a, b| b.total_cmp(a));
        Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.mat[(i, j)];
                    if z.im.abs() < 1e-15 {
                        format!("{:+.6}", z.re)
                    } else {
                        format!("{:+.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
