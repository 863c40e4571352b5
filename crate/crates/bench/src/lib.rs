//! Shared fixtures for the criterion benches.

use qmcbound_core::graph::{gen_erdos_renyi, gen_kagome, gen_square};
use qmcbound_core::Graph;

pub fn square16() -> Graph {
    gen_square(4, true).expect("valid lattice")
}

pub fn kagome18() -> Graph {
    gen_kagome(2, 3, true).expect("valid lattice")
}

/// A connected-looking random instance; empty draws are skipped.
pub fn er(n: usize, p: f64, seed: u64) -> Graph {
    (seed..)
        .map(|s| gen_erdos_renyi(n, p, s).expect("valid parameters"))
        .find(|g| g.num_edges() > 0)
        .expect("some draw has edges")
}
