//! Deterministic fixtures shared by the benchmarks.

use specpert_core::oracle::sweep::{generate_instance, stream_rng};
use specpert_core::PerturbationInstance;

/// A seeded sweep-style instance of dimension `dim` with `δ_j = delta`.
pub fn instance(dim: usize, delta: f64) -> (PerturbationInstance, usize) {
    let g = generate_instance(&mut stream_rng(42, dim as u64), dim, delta, 0.05).expect("valid fixture");
    (g.inst, g.j)
}
