//! Dense complex linear algebra and quantum primitives for n ≤ 6 qubits.
//!
//! Everything here is a pure function over owned values; results are safe to
//! share across threads.  Matrix exponentials of Hermitian inputs go through
//! an eigendecomposition so the result is unitary to machine precision;
//! general (non-Hermitian) exponentials, needed for superoperator
//! propagators, use scaling-and-squaring with a degree-13 Padé approximant.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::Error;
use crate::Result;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 2×2 identity.
pub fn id2() -> CMat {
    CMat::identity(2, 2)
}

pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Kronecker product; dimensions multiply.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest |entry| of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max entrywise deviation from Hermiticity, `max |M - M†|`.
pub fn hermiticity_deviation(m: &CMat) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && hermiticity_deviation(m) <= tol
}

/// `‖U†U − I‖_max ≤ tol`.
pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let g = u.adjoint() * u;
    max_abs_diff(&g, &CMat::identity(u.nrows(), u.ncols())) <= tol
}

/// Eigendecomposition `h = V diag(λ) V†` of a Hermitian matrix.
///
/// Returns real eigenvalues and the unitary of eigenvectors.  Fails with
/// [`Error::NonHermitianInput`] if `max |h - h†|` exceeds 1e-12.
pub fn hermitian_eigen(h: &CMat) -> Result<(DVector<f64>, CMat)> {
    let dev = hermiticity_deviation(h);
    if !h.is_square() || dev > 1e-12 {
        return Err(Error::NonHermitianInput { max_dev: dev });
    }
    let se = nalgebra::SymmetricEigen::new(h.clone());
    Ok((se.eigenvalues, se.eigenvectors))
}

/// The unitary `e^{−iht}` of a Hermitian `h`, via eigendecomposition.
pub fn expm_hermitian(h: &CMat, t: f64) -> Result<CMat> {
    let (lambda, v) = hermitian_eigen(h)?;
    let dim = h.nrows();
    // V e^{−iΛt} V†, with the phase column applied in place of a diagonal
    // matrix product.
    let mut scaled = v.clone();
    for k in 0..dim {
        let phase = c(0.0, -lambda[k] * t).exp();
        for i in 0..dim {
            scaled[(i, k)] *= phase;
        }
    }
    Ok(scaled * v.adjoint())
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let g = m.adjoint() * m;
    let se = nalgebra::SymmetricEigen::new(g);
    se.eigenvalues
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.max(0.0)))
        .sqrt()
}

/// Trace out the first tensor factor: `(Tr₁ M)_{ij} = Σ_k M_{k·dB+i, k·dB+j}`.
pub fn partial_trace_first(m: &CMat, dim_a: usize, dim_b: usize) -> Result<CMat> {
    if m.nrows() != m.ncols() || m.nrows() != dim_a * dim_b || dim_a == 0 || dim_b == 0 {
        return Err(Error::dims(format!(
            "partial trace of {}x{} with factors {}x{}",
            m.nrows(),
            m.ncols(),
            dim_a,
            dim_b
        )));
    }
    let mut out = CMat::zeros(dim_b, dim_b);
    for i in 0..dim_b {
        for j in 0..dim_b {
            let mut acc = c(0.0, 0.0);
            for k in 0..dim_a {
                acc += m[(k * dim_b + i, k * dim_b + j)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Computational basis state |index⟩.
pub fn basis_state(dim: usize, index: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[index] = c(1.0, 0.0);
    v
}

/// `|+⟩^{⊗n}`: uniform real amplitudes `2^{−n/2}`.
pub fn plus_state(n_qubits: usize) -> CVec {
    let dim = 1usize << n_qubits;
    let amp = 1.0 / (dim as f64).sqrt();
    CVec::from_element(dim, c(amp, 0.0))
}

/// Rank-one projector |ψ⟩⟨ψ|.
pub fn projector(psi: &CVec) -> CMat {
    psi * psi.adjoint()
}

/// Matrix 1-norm (max column abs sum); the scaling estimate for `expm`.
fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^M` for a general square complex matrix.
///
/// Degree-13 Padé approximant with scaling-and-squaring; truncation error is
/// far below 1e-12 for scaled inputs.  Used for superoperator propagators,
/// which are not Hermitian.
pub fn expm(m: &CMat) -> CMat {
    assert!(m.is_square(), "expm requires a square matrix");
    let dim = m.nrows();
    let theta13 = 5.371_920_351_148_152;
    let norm = one_norm(m);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let a = m.map(|z| z / c(2.0_f64.powi(s as i32), 0.0));

    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let b = |k: usize| c(B[k], 0.0);
    let id = CMat::identity(dim, dim);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let w1 = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let w2 = &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * (w1 + w2);
    let z1 = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = z1 + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let num = &v + &u;
    let den = &v - &u;
    // Nonsingular by construction once ‖A‖₁ ≤ θ₁₃.
    let mut x = den
        .lu()
        .solve(&num)
        .expect("Padé denominator is singular");
    for _ in 0..s {
        x = &x * &x;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_hermitian, random_matrix, rng};

    fn taylor_expm_oracle(m: &CMat) -> CMat {
        // Independent route: 8th-order Taylor with scaling-and-squaring,
        // scaled until the 1-norm is below 0.1.
        let mut s = 0u32;
        while one_norm(m) / 2.0_f64.powi(s as i32) > 0.1 {
            s += 1;
        }
        let a = m.map(|z| z / c(2.0_f64.powi(s as i32), 0.0));
        let dim = m.nrows();
        let mut sum = CMat::identity(dim, dim);
        let mut term = CMat::identity(dim, dim);
        for k in 1..=8 {
            term = (&term * &a).map(|z| z / c(k as f64, 0.0));
            sum += &term;
        }
        let mut x = sum;
        for _ in 0..s {
            x = &x * &x;
        }
        x
    }

    fn power_iteration_norm(m: &CMat, iters: usize) -> f64 {
        // Independent spectral-norm route: power iteration on M†M.
        let g = m.adjoint() * m;
        let dim = g.nrows();
        let mut v = CVec::from_fn(dim, |i, _| c(1.0 + i as f64, 0.5));
        v /= c(v.norm(), 0.0);
        let mut lambda = 0.0;
        for _ in 0..iters {
            let w = &g * &v;
            lambda = w.norm();
            if lambda == 0.0 {
                return 0.0;
            }
            v = w / c(lambda, 0.0);
        }
        lambda.sqrt()
    }

    #[test]
    fn kron_pauli_algebra() {
        let zz = kron(&sigma_z(), &sigma_z());
        let expect = CMat::from_diagonal(&CVec::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(-1.0, 0.0),
            c(1.0, 0.0),
        ]));
        assert_eq!(zz, expect);
        assert_eq!(kron(&id2(), &id2()), CMat::identity(4, 4));
    }

    #[test]
    fn kron_flips_first_qubit() {
        // X on the first (most significant) qubit takes |00⟩ to |10⟩.
        let x1 = kron(&sigma_x(), &id2());
        let out = &x1 * basis_state(4, 0);
        assert!((out - basis_state(4, 2)).norm() < 1e-15);
    }

    #[test]
    fn expm_diagonal_phases() {
        let h = sigma_z().map(|z| z * c(std::f64::consts::FRAC_PI_2, 0.0));
        let u = expm_hermitian(&h, 1.0).unwrap();
        assert!((u[(0, 0)] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((u[(1, 1)] - c(0.0, 1.0)).norm() < 1e-12);
        assert!(u[(0, 1)].norm() < 1e-12 && u[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn expm_zero_time_is_identity() {
        let mut r = rng(11);
        let h = random_hermitian(&mut r, 8);
        let u = expm_hermitian(&h, 0.0).unwrap();
        assert!(max_abs_diff(&u, &CMat::identity(8, 8)) < 1e-12);
    }

    #[test]
    fn expm_matches_taylor_oracle() {
        let mut r = rng(12);
        let h = random_hermitian(&mut r, 4);
        let t = 0.7;
        let u = expm_hermitian(&h, t).unwrap();
        let oracle = taylor_expm_oracle(&h.map(|z| z * c(0.0, -t)));
        assert!(max_abs_diff(&u, &oracle) < 1e-9);
        assert!(is_unitary(&u, 1e-10));
    }

    #[test]
    fn expm_semigroup_and_inverse() {
        let mut r = rng(13);
        for _ in 0..20 {
            let h = random_hermitian(&mut r, 4);
            let (t1, t2) = (0.37, 1.21);
            let u1 = expm_hermitian(&h, t1).unwrap();
            let u2 = expm_hermitian(&h, t2).unwrap();
            let u12 = expm_hermitian(&h, t1 + t2).unwrap();
            assert!(max_abs_diff(&(&u1 * &u2), &u12) < 1e-9);

            let inv = expm_hermitian(&h, -t1).unwrap();
            assert!(max_abs_diff(&(&u1 * &inv), &CMat::identity(4, 4)) < 1e-10);
        }
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        match expm_hermitian(&m, 1.0) {
            Err(Error::NonHermitianInput { .. }) => {}
            other => panic!("expected NonHermitianInput, got {other:?}"),
        }
    }

    #[test]
    fn general_expm_agrees_on_hermitian_generators() {
        let mut r = rng(14);
        for _ in 0..10 {
            let h = random_hermitian(&mut r, 4);
            let t = 0.9;
            let via_eigen = expm_hermitian(&h, t).unwrap();
            let via_pade = expm(&h.map(|z| z * c(0.0, -t)));
            assert!(max_abs_diff(&via_eigen, &via_pade) < 1e-11);
        }
    }

    #[test]
    fn general_expm_matches_taylor_on_nonnormal() {
        let mut r = rng(15);
        for _ in 0..10 {
            let m = random_matrix(&mut r, 5);
            let x = expm(&m);
            let oracle = taylor_expm_oracle(&m);
            assert!(max_abs_diff(&x, &oracle) < 1e-9);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let mut r = rng(16);
        let m = random_hermitian(&mut r, 2);
        // Make it a density-like matrix: ρ = (M² + I)/Tr(..) keeps it PSD.
        let rho = {
            let p = &m * &m + CMat::identity(2, 2);
            let tr: C64 = p.diagonal().iter().sum();
            p.map(|z| z / tr)
        };
        let zero = projector(&basis_state(2, 0));
        let joint = kron(&zero, &rho);
        let back = partial_trace_first(&joint, 2, 2).unwrap();
        assert!(max_abs_diff(&back, &rho) < 1e-14);
    }

    #[test]
    fn partial_trace_bell_state() {
        let mut bell = CVec::zeros(4);
        bell[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        bell[3] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let rho = projector(&bell);
        let reduced = partial_trace_first(&rho, 2, 2).unwrap();
        let half_id = CMat::identity(2, 2).map(|z| z * c(0.5, 0.0));
        assert!(max_abs_diff(&reduced, &half_id) < 1e-14);
    }

    #[test]
    fn partial_trace_matches_projection_oracle_and_preserves_trace() {
        let mut r = rng(17);
        let m = random_matrix(&mut r, 4);
        let got = partial_trace_first(&m, 2, 2).unwrap();

        // Oracle: Σ_k (⟨k| ⊗ I) M (|k⟩ ⊗ I).
        let mut oracle = CMat::zeros(2, 2);
        for k in 0..2 {
            let ket_col = CMat::from_fn(2, 1, |i, _| basis_state(2, k)[i]);
            let ket = kron(&ket_col, &id2());
            let bra = ket.adjoint();
            oracle += bra * &m * ket;
        }
        assert!(max_abs_diff(&got, &oracle) < 1e-13);

        let tr_in: C64 = m.diagonal().iter().sum();
        let tr_out: C64 = got.diagonal().iter().sum();
        assert!((tr_in - tr_out).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMat::identity(6, 6);
        assert!(matches!(
            partial_trace_first(&m, 2, 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&sigma_z()) - 1.0).abs() < 1e-14);
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(3.0, 0.0), c(-5.0, 0.0)]));
        assert!((spectral_norm(&d) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_matches_power_iteration() {
        let mut r = rng(18);
        for _ in 0..10 {
            let m = random_matrix(&mut r, 4);
            let got = spectral_norm(&m);
            let oracle = power_iteration_norm(&m, 4000);
            assert!(
                (got - oracle).abs() < 1e-8,
                "spectral norm {got} vs power iteration {oracle}"
            );
        }
    }
}
