//! Named desk-scale instances, each with a known frame.

use num_rational::Rational64;

use crate::error::Result;
use crate::isocrystal::{standard_context, standard_form, Frame, Isocrystal, NewtonPoint};
use crate::padic::{make_field, FieldElement, Matrix};

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: &'static str,
    pub isocrystal: Isocrystal,
}

fn np(parts: &[(i64, i64, usize)]) -> Result<NewtonPoint> {
    NewtonPoint::new(parts.iter().map(|&(a, b, h)| (Rational64::new(a, b), h)))
}

/// Standard form of `parts` (numerator, denominator, multiplicity) over
/// `Q_{p^m}` with `m = lcm(h, extra)`.
pub fn standard(p: u64, precision: u32, parts: &[(i64, i64, usize)], extra: usize) -> Result<Isocrystal> {
    let np = np(parts)?;
    let ctx = standard_context(p, precision, &np, extra)?;
    standard_form(&ctx, &np)
}

/// `[[1, 1], [0, p]] = g diag(1, p) sigma(g)^{-1}` with
/// `g = [[1, 1/(p-1)], [0, 1]]`.
pub fn unipotent_split(p: u64, precision: u32) -> Result<Isocrystal> {
    let ctx = make_field(p, 1, precision, 1)?;
    let b = Matrix::from_ints(&ctx, &[&[1, 1], &[0, p as i64]]);
    let x = FieldElement::one(&ctx).div(&FieldElement::from_int(&ctx, p as i64 - 1))?;
    let one = FieldElement::one(&ctx);
    let zero = FieldElement::zero(&ctx);
    let g = Matrix::new(&ctx, 2, 2, vec![one.clone(), x, zero, one])?;
    Isocrystal::from_matrix(b)?.with_frame(Frame { newton: np(&[(0, 1, 1), (1, 1, 1)])?, transporter: g })
}

/// The slope-1/2 standard form conjugated by `[[1, z], [p, 1 + z]]` over
/// `Q_{p^2}`, `z` the field generator.
pub fn conjugated_half(p: u64, precision: u32) -> Result<Isocrystal> {
    let std = standard(p, precision, &[(1, 2, 2)], 1)?;
    let ctx = std.context().clone();
    let z = FieldElement::generator(&ctx);
    let one = FieldElement::one(&ctx);
    let g = Matrix::new(&ctx, 2, 2, vec![one.clone(), z.clone(), FieldElement::from_int(&ctx, p as i64), one.add(&z)])?;
    std.sigma_conjugate(&g)
}

/// The fixed corpus used by the acceptance suite and the benchmarks.
pub fn corpus(precision: u32) -> Result<Vec<Instance>> {
    let n = precision;
    let list = vec![
        Instance { name: "identity-p3", isocrystal: standard(3, n, &[(0, 1, 2)], 1)? },
        Instance { name: "split-0-1-p2", isocrystal: standard(2, n, &[(0, 1, 1), (1, 1, 1)], 1)? },
        Instance { name: "half-p2", isocrystal: standard(2, n, &[(1, 2, 2)], 1)? },
        Instance { name: "half-p3", isocrystal: standard(3, n, &[(1, 2, 2)], 1)? },
        Instance { name: "zero-half-p3", isocrystal: standard(3, n, &[(0, 1, 1), (1, 2, 2)], 1)? },
        Instance { name: "third-p2", isocrystal: standard(2, n, &[(1, 3, 3)], 1)? },
        Instance { name: "two-thirds-p3", isocrystal: standard(3, n, &[(2, 3, 3)], 1)? },
        Instance { name: "quarter-p2", isocrystal: standard(2, n, &[(1, 4, 4)], 1)? },
        Instance { name: "half-half-p2", isocrystal: standard(2, n, &[(1, 2, 4)], 1)? },
        Instance { name: "zero-third-p2", isocrystal: standard(2, n, &[(0, 1, 1), (1, 3, 3)], 1)? },
        Instance { name: "conjugated-half-p3", isocrystal: conjugated_half(3, n)? },
        Instance { name: "unipotent-split-p3", isocrystal: unipotent_split(3, n)? },
    ];
    Ok(list)
}
