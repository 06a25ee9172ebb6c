//! The single-qubit Clifford group and random local-Clifford states.
//!
//! The 24 single-qubit Cliffords (up to global phase) are generated once by
//! closing {H, S} under multiplication; random product states over n qubits
//! tensor independent uniform draws from that table.

use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::{basis_state, c, id2, kron, CMat, CVec};

const PHASE_TOL: f64 = 1e-9;

/// Fix the global phase so the first entry with significant modulus is real
/// and positive; lets matrices be compared as group elements.
fn canonical_phase(u: &CMat) -> CMat {
    for idx in 0..u.len() {
        let z = u[idx];
        if z.norm() > 0.3 {
            let phase = z / c(z.norm(), 0.0);
            return u.map(|w| w * phase.conj());
        }
    }
    u.clone()
}

fn same_up_to_phase(a: &CMat, b: &CMat) -> bool {
    crate::linalg::max_abs_diff(a, b) <= PHASE_TOL
}

/// The 24-element single-qubit Clifford group, phase-canonicalized.
pub fn single_qubit_cliffords() -> &'static [CMat] {
    static TABLE: OnceLock<Vec<CMat>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = CMat::from_row_slice(
            2,
            2,
            &[c(s2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-s2, 0.0)],
        );
        let phase_gate = CMat::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
        );
        let gens = [hadamard, phase_gate];

        let mut table = vec![canonical_phase(&id2())];
        let mut frontier = table.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for u in &frontier {
                for g in &gens {
                    let w = canonical_phase(&(g * u));
                    if !table.iter().any(|t| same_up_to_phase(t, &w)) {
                        table.push(w.clone());
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(table.len(), 24, "single-qubit Clifford closure size");
        table
    })
}

/// Tensor product of n independent uniform draws from the single-qubit
/// Clifford group.  Deterministic for a fixed RNG state.
pub fn random_local_clifford(n: usize, rng: &mut ChaCha12Rng) -> CMat {
    assert!(n >= 1, "need at least one qubit");
    let table = single_qubit_cliffords();
    let mut u = table[rng.gen_range(0..table.len())].clone();
    for _ in 1..n {
        let next = &table[rng.gen_range(0..table.len())];
        u = kron(&u, next);
    }
    u
}

/// The state obtained by applying a random local Clifford to |0…0⟩, built
/// qubit-by-qubit so only 2-vectors are tensored.
pub fn random_local_clifford_state(n: usize, rng: &mut ChaCha12Rng) -> CVec {
    assert!(n >= 1, "need at least one qubit");
    let table = single_qubit_cliffords();
    let zero = basis_state(2, 0);
    let mut state = &table[rng.gen_range(0..table.len())] * &zero;
    for _ in 1..n {
        let col = &table[rng.gen_range(0..table.len())] * &zero;
        let mut next = CVec::zeros(state.len() * 2);
        for (i, a) in state.iter().enumerate() {
            next[2 * i] = a * col[0];
            next[2 * i + 1] = a * col[1];
        }
        state = next;
    }
    state
}
