//! Seeded random elements, unimodular matrices and exponent vectors.

use std::sync::Arc;

use num_rational::Rational64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::padic::{make_field, FieldContext, FieldElement, Matrix};

/// Independent random stream for sample `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Small random element of `Z_{p^e}` inside `ctx`, `e | deg ctx`.
pub fn random_integral<R: Rng>(ctx: &Arc<FieldContext>, e: usize, rng: &mut R) -> Result<FieldElement> {
    let bound = (ctx.p() * ctx.p()) as i64;
    let coeffs: Vec<i64> = (0..e).map(|_| rng.gen_range(-bound..=bound)).collect();
    if e == ctx.degree() {
        return Ok(FieldElement::from_poly(ctx, &coeffs));
    }
    let sub = make_field(ctx.p(), e, ctx.precision(), 1)?;
    FieldElement::from_poly(&sub, &coeffs).extend_to(ctx)
}

/// Random unit of `Z_{p^e}`.
pub fn random_unit<R: Rng>(ctx: &Arc<FieldContext>, e: usize, rng: &mut R) -> Result<FieldElement> {
    loop {
        let x = random_integral(ctx, e, rng)?;
        if x.val_ticks() == Some(0) {
            return Ok(x);
        }
    }
}

/// Random element of `GL_n(Z_{p^e})`: permuted product of unipotent
/// triangular factors and a diagonal of units.
pub fn random_unimodular<R: Rng>(ctx: &Arc<FieldContext>, n: usize, e: usize, rng: &mut R) -> Result<Matrix> {
    let mut lower = Matrix::identity(ctx, n);
    let mut upper = Matrix::identity(ctx, n);
    for i in 0..n {
        for j in 0..n {
            if i > j {
                lower.set(i, j, random_integral(ctx, e, rng)?);
            } else if i < j {
                upper.set(i, j, random_integral(ctx, e, rng)?);
            } else {
                upper.set(i, i, random_unit(ctx, e, rng)?);
            }
        }
    }
    let mut g = lower.mul(&upper)?;
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        if i != j {
            g.swap_rows(i, j);
        }
    }
    Ok(g)
}

/// Random exponent vector with entries in `[-range, range]` and denominators
/// dividing `den`.
pub fn random_exponents<R: Rng>(n: usize, range: i64, den: i64, rng: &mut R) -> Vec<Rational64> {
    (0..n)
        .map(|_| Rational64::new(rng.gen_range(-range * den..=range * den), den))
        .collect()
}
