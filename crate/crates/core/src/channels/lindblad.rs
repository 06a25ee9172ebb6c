//! Lindblad generators and second-order propagators for piecewise-constant
//! schedules.

use super::Superoperator;
use crate::error::Error;
use crate::linalg::{c, expm, is_hermitian, kron, CMat};
use crate::Result;

/// A master-equation generator: Hamiltonian part plus weighted collapse
/// operators,
/// `dρ/dt = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    pub hamiltonian: CMat,
    /// `(L_k, γ_k)` with rates γ_k ≥ 0.
    pub collapse: Vec<(CMat, f64)>,
}

impl LindbladSpec {
    pub fn closed(hamiltonian: CMat) -> Self {
        LindbladSpec {
            hamiltonian,
            collapse: Vec::new(),
        }
    }
}

/// The generator supermatrix G with `d vec(ρ)/dt = G vec(ρ)` in the
/// row-major layout:
/// `G = −i(H⊗I − I⊗Hᵀ) + Σ γ (L⊗L̄ − ½ L†L⊗I − ½ I⊗(L†L)ᵀ)`.
pub fn lindblad_generator(spec: &LindbladSpec) -> Result<Superoperator> {
    let h = &spec.hamiltonian;
    if !is_hermitian(h, 1e-12) {
        return Err(Error::NonHermitianInput {
            max_dev: crate::linalg::hermiticity_deviation(h),
        });
    }
    let dim = h.nrows();
    let id = CMat::identity(dim, dim);
    let mut g = (kron(h, &id) - kron(&id, &h.transpose())).map(|z| z * c(0.0, -1.0));
    for (l, rate) in &spec.collapse {
        if *rate < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "collapse rate {rate} is negative"
            )));
        }
        if l.nrows() != dim || l.ncols() != dim {
            return Err(Error::dims(format!(
                "collapse operator is {}x{}, Hamiltonian is {}x{}",
                l.nrows(),
                l.ncols(),
                dim,
                dim
            )));
        }
        let ldl = l.adjoint() * l;
        let jump = kron(l, &l.map(|z| z.conj()));
        let anti = kron(&ldl, &id).map(|z| z * c(0.5, 0.0))
            + kron(&id, &ldl.transpose()).map(|z| z * c(0.5, 0.0));
        g += (jump - anti).map(|z| z * c(*rate, 0.0));
    }
    Ok(Superoperator::from_matrix(g))
}

/// An ordered schedule of constant generators with positive durations.
#[derive(Debug, Clone)]
pub struct PiecewiseGenerator {
    segments: Vec<(Superoperator, f64)>,
}

impl PiecewiseGenerator {
    pub fn new(segments: Vec<(Superoperator, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptySchedule);
        }
        let dim = segments[0].0.dim_in();
        for (g, dt) in &segments {
            if *dt <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "segment duration {dt} must be positive"
                )));
            }
            if g.dim_in() != dim || g.dim_out() != dim {
                return Err(Error::dims(
                    "all schedule segments must share one square dimension",
                ));
            }
        }
        Ok(PiecewiseGenerator { segments })
    }

    pub fn segments(&self) -> &[(Superoperator, f64)] {
        &self.segments
    }
}

/// Second-order propagator `exp(Ω₁ + Ω₂)` of a piecewise-constant schedule:
///
/// ```text
/// Ω₁ = Σ_k G_k Δt_k
/// Ω₂ = ½ Σ_{j>k} [G_j, G_k] Δt_j Δt_k
/// ```
///
/// Exact for a single segment and whenever the segments commute; otherwise
/// the truncation error is third order in the segment durations.
pub fn magnus2_propagator(schedule: &PiecewiseGenerator) -> Result<Superoperator> {
    let segs = schedule.segments();
    let dim = segs[0].0.dim_in();
    let mut omega = CMat::zeros(dim, dim);
    for (g, dt) in segs {
        omega += g.matrix().map(|z| z * c(*dt, 0.0));
    }
    for j in 1..segs.len() {
        for k in 0..j {
            let (gj, dtj) = (&segs[j].0, segs[j].1);
            let (gk, dtk) = (&segs[k].0, segs[k].1);
            let comm = gj.matrix() * gk.matrix() - gk.matrix() * gj.matrix();
            omega += comm.map(|z| z * c(0.5 * dtj * dtk, 0.0));
        }
    }
    Ok(Superoperator::from_matrix(expm(&omega)))
}
