//! Superoperators: linear maps on density operators.
//!
//! Operators are flattened row-major, `vec(M)_{i·d+j} = M_{i,j}`, so a map
//! ρ ↦ AρB has supermatrix `A ⊗ Bᵀ` and composition of maps is matrix
//! multiplication.  This layout reproduces the conventional explicit
//! preparation and partial-trace supermatrices for a one-qubit register
//! entry-for-entry (see the tests).
//!
//! A [`Superoperator`] is a dense complex matrix between operator spaces of
//! possibly different sizes (preparation is 4 → 16, tracing out is 16 → 4),
//! plus two *claimed* structural flags — trace preserving, completely
//! positive — that can be checked against the matrix.

mod file;
mod lindblad;

pub use file::{load_superop, save_superop};
pub use lindblad::{lindblad_generator, magnus2_propagator, LindbladSpec, PiecewiseGenerator};

use nalgebra::DMatrix;

use crate::error::Error;
use crate::linalg::{c, expm_hermitian, hermiticity_deviation, kron, CMat, CVec};
use crate::Result;

/// Row-major stacking: `vec(M)_{i·d+j} = M_{i,j}`.
pub fn vec_matrix(m: &CMat) -> CVec {
    let (rows, cols) = m.shape();
    CVec::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

/// Inverse of [`vec_matrix`] for square matrices.
pub fn unvec_matrix(v: &CVec) -> Result<CMat> {
    let len = v.len();
    let dim = isqrt_exact(len).ok_or(Error::NonSquareLength { len })?;
    Ok(CMat::from_fn(dim, dim, |i, j| v[i * dim + j]))
}

fn isqrt_exact(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

#[derive(Debug, Clone)]
pub struct Superoperator {
    mat: CMat,
    /// Claimed flags; see [`Superoperator::validate_flags`].
    pub trace_preserving: bool,
    pub completely_positive: bool,
}

impl Superoperator {
    /// Wrap a supermatrix with no structural claims.
    pub fn from_matrix(mat: CMat) -> Self {
        Superoperator {
            mat,
            trace_preserving: false,
            completely_positive: false,
        }
    }

    /// Wrap a supermatrix and assert flags, verifying them numerically.
    pub fn with_flags(mat: CMat, trace_preserving: bool, completely_positive: bool) -> Result<Self> {
        let s = Superoperator {
            mat,
            trace_preserving,
            completely_positive,
        };
        s.validate_flags()?;
        Ok(s)
    }

    /// Identity map on a `dim_op`-dimensional operator space.
    pub fn identity(dim_op: usize) -> Self {
        Superoperator {
            mat: CMat::identity(dim_op, dim_op),
            trace_preserving: true,
            completely_positive: true,
        }
    }

    /// Operator-space input dimension (matrix column count).
    pub fn dim_in(&self) -> usize {
        self.mat.ncols()
    }

    /// Operator-space output dimension (matrix row count).
    pub fn dim_out(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Apply to a stacked operator.
    pub fn apply(&self, v: &CVec) -> Result<CVec> {
        if v.len() != self.dim_in() {
            return Err(Error::dims(format!(
                "superoperator takes vectors of length {}, got {}",
                self.dim_in(),
                v.len()
            )));
        }
        Ok(&self.mat * v)
    }

    /// Apply to an operator: unvec(S · vec(M)).
    pub fn apply_to_matrix(&self, m: &CMat) -> Result<CMat> {
        unvec_matrix(&self.apply(&vec_matrix(m))?)
    }

    /// `self ∘ inner` (apply `inner` first).  Structural flags survive
    /// composition when both factors carry them.
    pub fn compose(&self, inner: &Superoperator) -> Result<Superoperator> {
        if inner.dim_out() != self.dim_in() {
            return Err(Error::dims(format!(
                "composing {}→{} after {}→{}",
                inner.dim_in(),
                inner.dim_out(),
                self.dim_in(),
                self.dim_out()
            )));
        }
        Ok(Superoperator {
            mat: &self.mat * &inner.mat,
            trace_preserving: self.trace_preserving && inner.trace_preserving,
            completely_positive: self.completely_positive && inner.completely_positive,
        })
    }

    fn hilbert_dims(&self) -> Option<(usize, usize)> {
        Some((isqrt_exact(self.dim_in())?, isqrt_exact(self.dim_out())?))
    }

    /// Trace preservation: the dual applied to the identity returns the
    /// identity, i.e. every input basis operator keeps its trace.
    pub fn is_trace_preserving_within(&self, tol: f64) -> bool {
        let Some((din, dout)) = self.hilbert_dims() else {
            return false;
        };
        for k in 0..din {
            for l in 0..din {
                let col = k * din + l;
                let mut acc = c(0.0, 0.0);
                for i in 0..dout {
                    acc += self.mat[(i * dout + i, col)];
                }
                let want = if k == l { c(1.0, 0.0) } else { c(0.0, 0.0) };
                if (acc - want).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Choi matrix in the row-major convention:
    /// `J[(k·d_out + i), (l·d_out + j)] = S[(i·d_out + j), (k·d_in + l)]`.
    pub fn choi(&self) -> Result<CMat> {
        let (din, dout) = self.hilbert_dims().ok_or(Error::NonSquareLength {
            len: self.dim_in().max(self.dim_out()),
        })?;
        let side = din * dout;
        let mut j = CMat::zeros(side, side);
        for k in 0..din {
            for l in 0..din {
                for a in 0..dout {
                    for b in 0..dout {
                        j[(k * dout + a, l * dout + b)] =
                            self.mat[(a * dout + b, k * din + l)];
                    }
                }
            }
        }
        Ok(j)
    }

    /// Complete positivity: the Choi matrix is Hermitian and PSD, with
    /// eigenvalues allowed down to `-tol`.
    pub fn is_completely_positive_within(&self, tol: f64) -> bool {
        let Ok(j) = self.choi() else {
            return false;
        };
        if hermiticity_deviation(&j) > tol {
            return false;
        }
        let sym = (&j + j.adjoint()).map(|z| z * c(0.5, 0.0));
        let se = nalgebra::SymmetricEigen::new(sym);
        se.eigenvalues.iter().all(|&l| l >= -tol)
    }

    /// Check the claimed flags against the matrix.
    pub fn validate_flags(&self) -> Result<()> {
        if self.trace_preserving && !self.is_trace_preserving_within(1e-10) {
            return Err(Error::ChannelFlagViolation(
                "flagged trace-preserving but dual does not fix the identity".into(),
            ));
        }
        if self.completely_positive && !self.is_completely_positive_within(1e-8) {
            return Err(Error::ChannelFlagViolation(
                "flagged completely positive but Choi matrix is not PSD".into(),
            ));
        }
        Ok(())
    }
}

/// The map ρ ↦ AρB as a supermatrix, `A ⊗ Bᵀ` in the row-major layout.
pub fn left_right_superop(a: &CMat, b: &CMat) -> Superoperator {
    Superoperator::from_matrix(kron(a, &b.transpose()))
}

/// Conjugation ρ ↦ UρU†.
pub fn unitary_superop(u: &CMat) -> Superoperator {
    let mut s = left_right_superop(u, &u.adjoint());
    s.trace_preserving = true;
    s.completely_positive = true;
    s
}

/// Adjoin a fresh |0⟩⟨0| qubit *after* the register: ρ ↦ ρ ⊗ |0⟩⟨0|.
/// For a one-qubit register this is the explicit 16×4 zero-one supermatrix.
pub fn prep_superop() -> Superoperator {
    let zero = crate::linalg::projector(&crate::linalg::basis_state(2, 0));
    let mut mat = CMat::zeros(16, 4);
    for col in 0..4 {
        let e = CMat::from_fn(2, 2, |i, j| {
            if i * 2 + j == col { c(1.0, 0.0) } else { c(0.0, 0.0) }
        });
        let out = vec_matrix(&kron(&e, &zero));
        mat.set_column(col, &out);
    }
    Superoperator {
        mat,
        trace_preserving: true,
        completely_positive: true,
    }
}

/// Trace out the first qubit of a two-qubit register: the explicit 4×16
/// zero-one supermatrix, equal to `vec ∘ Tr₁ ∘ unvec`.
pub fn trace_superop() -> Superoperator {
    let mut mat = CMat::zeros(4, 16);
    for col in 0..16 {
        let e = CMat::from_fn(4, 4, |i, j| {
            if i * 4 + j == col { c(1.0, 0.0) } else { c(0.0, 0.0) }
        });
        let out = vec_matrix(&crate::linalg::partial_trace_first(&e, 2, 2).unwrap());
        mat.set_column(col, &out);
    }
    Superoperator {
        mat,
        trace_preserving: true,
        completely_positive: true,
    }
}

/// Depolarizing channel of strength 𝒩 on n qubits:
/// `vec(ρ) ↦ (1−𝒩) vec(ρ) + 𝒩 Tr(ρ) vec(I/2ⁿ)`.
pub fn depolarizing_superop(strength: f64, n_qubits: usize) -> Result<Superoperator> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(Error::StrengthOutOfRange(strength));
    }
    let dim = 1usize << n_qubits;
    let op = dim * dim;
    let mut mat = CMat::identity(op, op).map(|z| z * c(1.0 - strength, 0.0));
    let fill = strength / dim as f64;
    for i in 0..dim {
        for k in 0..dim {
            mat[(i * dim + i, k * dim + k)] += c(fill, 0.0);
        }
    }
    Ok(Superoperator {
        mat,
        trace_preserving: true,
        completely_positive: true,
    })
}

/// The two-qubit SWAP unitary (qubit 1 is the most significant factor).
pub fn swap_unitary() -> CMat {
    let mut u = CMat::zeros(4, 4);
    u[(0, 0)] = c(1.0, 0.0);
    u[(1, 2)] = c(1.0, 0.0);
    u[(2, 1)] = c(1.0, 0.0);
    u[(3, 3)] = c(1.0, 0.0);
    u
}

/// Effective single-qubit channel of a (possibly noisy) two-qubit swap gate:
/// prepare |0⟩⟨0| in the fresh register, apply the gate, trace out the
/// original register.
pub fn lambda_noise(s_gate: &Superoperator) -> Result<Superoperator> {
    if s_gate.dim_in() != 16 || s_gate.dim_out() != 16 {
        return Err(Error::dims(format!(
            "swap-gate superoperator must be 16x16, got {}x{}",
            s_gate.dim_out(),
            s_gate.dim_in()
        )));
    }
    trace_superop().compose(s_gate)?.compose(&prep_superop())
}

/// Propagator of a constant Lindblad-type generator over time `t`.
pub fn generator_propagator(generator: &Superoperator, t: f64) -> Superoperator {
    Superoperator::from_matrix(crate::linalg::expm(
        &generator.matrix().map(|z| z * c(t, 0.0)),
    ))
}

/// Superoperator of the unitary conjugation `ρ ↦ e^{−iHt} ρ e^{iHt}`.
pub fn evolution_superop(h: &CMat, t: f64) -> Result<Superoperator> {
    let u = expm_hermitian(h, t)?;
    Ok(unitary_superop(&u))
}

/// Reference zero-one supermatrices for the one-qubit register, used to pin
/// the layout convention in tests and the acceptance suite.
pub fn reference_prep_matrix() -> CMat {
    let mut m = DMatrix::zeros(16, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(8, 2)] = c(1.0, 0.0);
    m[(10, 3)] = c(1.0, 0.0);
    m
}

pub fn reference_trace_matrix() -> CMat {
    let mut m = DMatrix::zeros(4, 16);
    for (row, cols) in [(0, [0, 10]), (1, [1, 11]), (2, [4, 14]), (3, [5, 15])] {
        for col in cols {
            m[(row, col)] = c(1.0, 0.0);
        }
    }
    m
}
