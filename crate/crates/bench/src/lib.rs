//! Benchmark fixtures shared by the criterion benches.

use isoskel::corpus::standard;
use isoskel::sampling::{random_unimodular, stream};
use isoskel::{Isocrystal, Matrix};

/// A slope-1/3 standard form over `Q_{8}` with `N = 40`.
pub fn third_p2() -> Isocrystal {
    standard(2, 40, &[(1, 3, 3)], 1).expect("standard form")
}

/// A fixed random unimodular matrix over the context of `ic`.
pub fn unimodular(ic: &Isocrystal, seed: u64) -> Matrix {
    let ctx = ic.context();
    random_unimodular(ctx, ic.dimension(), ctx.degree(), &mut stream(seed, 0)).expect("unimodular")
}
