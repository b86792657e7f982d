//! Crystals: lattices stable under `F` and `V = p F^{-1}`.

use std::collections::{HashSet, VecDeque};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::MinSet;
use crate::building::{CrystalLattice, Norm};
use crate::error::{Error, Result};
use crate::padic::{conway_polynomial, FieldElement, Matrix};

/// Upper bound on Hermite-form candidates scanned by [`enumerate_crystals`].
pub const MAX_CANDIDATES: u64 = 2_000_000;

/// Upper bound on lattices visited by [`crystal_isomorphism`].
const MAX_STATES: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrystalCheck {
    pub crystal: bool,
    pub f_stable: bool,
    pub v_stable: bool,
    pub slopes_in_range: bool,
    pub note: Option<String>,
}

fn slopes_in_range(ms: &MinSet) -> bool {
    ms.newton_point()
        .parts()
        .iter()
        .all(|&(s, _)| s >= Rational64::zero() && s <= Rational64::one())
}

/// Checks `F(M) ⊆ M` and `V(M) ⊆ M` by integrality of the images in the
/// basis of `M`.
pub fn is_crystal(ms: &MinSet, m: &CrystalLattice) -> Result<CrystalCheck> {
    if !slopes_in_range(ms) {
        return Ok(CrystalCheck {
            crystal: false,
            f_stable: false,
            v_stable: false,
            slopes_in_range: false,
            note: Some(Error::SlopeRange.to_string()),
        });
    }
    let b = ms.isocrystal().matrix();
    let basis = m.basis();
    let f_image = b.mul(&basis.sigma(1))?;
    let f_stable = basis.solve(&f_image)?.is_integral();
    let v_image = b.solve(basis)?.sigma(-1).scale(&FieldElement::p_power(m.context(), 1));
    let v_stable = basis.solve(&v_image)?.is_integral();
    Ok(CrystalCheck { crystal: f_stable && v_stable, f_stable, v_stable, slopes_in_range: true, note: None })
}

/// A crystal is minimal when it splits along the slope decomposition and
/// `p^{-d} F^h (M_lambda) = M_lambda` for every slope `lambda = d/h`.
pub fn is_minimal_crystal(ms: &MinSet, m: &CrystalLattice) -> Result<bool> {
    if !is_crystal(ms, m)?.crystal {
        return Ok(false);
    }
    let ctx = m.context();
    let n = m.dimension();
    let dec = ms.decomposition();
    let p_inv = dec.basis.inverse()?;
    let basis = m.basis();
    for blk in &dec.blocks {
        let mut mask = vec![FieldElement::zero(ctx); n];
        for i in blk.range() {
            mask[i] = FieldElement::one(ctx);
        }
        let proj = dec.basis.mul(&Matrix::diagonal(ctx, &mask))?.mul(&p_inv)?;
        let part = proj.mul(basis)?;
        if !basis.solve(&part)?.is_integral() {
            return Ok(false);
        }
        let h = *blk.slope.denom() as usize;
        let d = *blk.slope.numer();
        let pi = ms.isocrystal().twisted_product(h)?;
        let up = pi.mul(&part.sigma(h as i64))?.scale(&FieldElement::p_power(ctx, -d));
        let down = pi.solve(&part)?.sigma(-(h as i64)).scale(&FieldElement::p_power(ctx, d));
        if !basis.solve(&up)?.is_integral() || !basis.solve(&down)?.is_integral() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The ball `{x : alpha(x) <= p^{-e}}` of a Min norm with its crystal check.
pub fn minimal_crystal_ball(ms: &MinSet, a: &Norm, e: Rational64) -> Result<(CrystalLattice, CrystalCheck)> {
    if !slopes_in_range(ms) {
        return Err(Error::SlopeRange);
    }
    if !ms.is_in_min(a)? {
        return Err(Error::NotInMin);
    }
    let lattice = a.ball_lattice(e)?;
    let check = is_crystal(ms, &lattice)?;
    Ok((lattice, check))
}

/// `Z[z] / f(z)` with small integer coefficients.
struct IntRing {
    modulus: Vec<i64>,
}

impl IntRing {
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let m = self.degree();
        let mut prod = vec![0i64; 2 * m];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (m..2 * m).rev() {
            let c = prod[k];
            if c != 0 {
                for (l, f) in self.modulus.iter().take(m).enumerate() {
                    prod[k - m + l] -= c * f;
                }
                prod[k] = 0;
            }
        }
        prod.truncate(m);
        prod
    }
}

/// Whether `p^top e_j` lies in the column span of the upper triangular `h`
/// for every `j`.
fn contains_scaled_standard(ring: &IntRing, h: &[Vec<Vec<i64>>], diag: &[i64], top: i64) -> bool {
    let n = diag.len();
    let m = ring.degree();
    for j in 0..n {
        let mut y = vec![vec![0i64; m]; n];
        for i in (0..n).rev() {
            let mut rhs = vec![0i64; m];
            if i == j {
                rhs[0] = top;
            }
            for l in i + 1..n {
                let t = ring.mul(&h[i][l], &y[l]);
                for (r, t) in rhs.iter_mut().zip(t) {
                    *r -= t;
                }
            }
            let q = diag[i];
            if rhs.iter().any(|c| c % q != 0) {
                return false;
            }
            y[i] = rhs.into_iter().map(|c| c / q).collect();
        }
    }
    true
}

fn candidate_count(p: u64, m: usize, n: usize, top: u32) -> u64 {
    let mut total: u128 = 0;
    let mut a = vec![0u32; n];
    loop {
        let mut c: u128 = 1;
        for (i, &ai) in a.iter().enumerate() {
            let per = (p as u128).saturating_pow(ai * m as u32);
            c = c.saturating_mul(per.saturating_pow((n - 1 - i) as u32));
        }
        total = total.saturating_add(c);
        if !next_digits(&mut a, top) {
            break;
        }
    }
    total.min(u64::MAX as u128) as u64
}

fn next_digits(a: &mut [u32], top: u32) -> bool {
    for d in a.iter_mut().rev() {
        if *d < top {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// All crystals `M` with `p^k O^n ⊆ M ⊆ p^{-k} O^n`, in a fixed order
/// (diagonal exponents, then entries, lexicographically).
pub fn enumerate_crystals(ms: &MinSet, radius: u32) -> Result<Vec<CrystalLattice>> {
    let ctx = ms.context();
    let (p, m, n) = (ctx.p(), ctx.degree(), ms.isocrystal().dimension());
    let top = 2 * radius;
    let count = candidate_count(p, m, n, top);
    if count > MAX_CANDIDATES {
        return Err(Error::ScaleTooLarge(format!("{count} Hermite candidates exceed the limit {MAX_CANDIDATES}")));
    }
    let modulus = conway_polynomial(p, m)
        .ok_or(Error::NoConwayPolynomial { p, m })?
        .iter()
        .map(|&c| c as i64)
        .collect();
    let ring = IntRing { modulus };
    let p_top = (p as i64).pow(top);
    let positions: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut a = vec![0u32; n];
    loop {
        let diag: Vec<i64> = a.iter().map(|&ai| (p as i64).pow(ai)).collect();
        let mut digits = vec![vec![0i64; m]; positions.len()];
        loop {
            let mut h = vec![vec![vec![0i64; m]; n]; n];
            for (k, &(i, j)) in positions.iter().enumerate() {
                h[i][j] = digits[k].clone();
            }
            for i in 0..n {
                h[i][i][0] = diag[i];
            }
            if contains_scaled_standard(&ring, &h, &diag, p_top) {
                let lattice = to_lattice(ms, &h, radius)?;
                if is_crystal(ms, &lattice)?.crystal {
                    out.push(lattice);
                }
            }
            if !next_entries(&mut digits, &positions, &diag) {
                break;
            }
        }
        if !next_digits(&mut a, top) {
            break;
        }
    }
    Ok(out)
}

fn next_entries(digits: &mut [Vec<i64>], positions: &[(usize, usize)], diag: &[i64]) -> bool {
    for (k, &(i, _)) in positions.iter().enumerate().rev() {
        for c in digits[k].iter_mut().rev() {
            if *c + 1 < diag[i] {
                *c += 1;
                return true;
            }
            *c = 0;
        }
    }
    false
}

fn to_lattice(ms: &MinSet, h: &[Vec<Vec<i64>>], radius: u32) -> Result<CrystalLattice> {
    let ctx = ms.context();
    let n = h.len();
    let scale = FieldElement::p_power(ctx, -(radius as i64));
    let basis = Matrix::from_fn(ctx, n, n, |i, j| FieldElement::from_poly(ctx, &h[i][j]).mul(&scale));
    CrystalLattice::new(basis)
}

/// Smallest `k >= 0` with `p^k O^n ⊆ M ⊆ p^{-k} O^n` (unramified contexts).
pub(crate) fn window_radius(m: &CrystalLattice) -> Result<i64> {
    let outer = m.basis().min_val_ticks().unwrap_or(0);
    let inner = m.basis().inverse()?.min_val_ticks().unwrap_or(0);
    Ok((-outer).max(-inner).max(0))
}

/// Breadth-first search through words in the generators of
/// [`MinSet::j_generators`] for `g` in `J` with `g M1 = M2`. The search stays
/// inside a window one step wider than the inputs; `None` means no witness
/// was found there.
pub fn crystal_isomorphism(ms: &MinSet, m1: &CrystalLattice, m2: &CrystalLattice) -> Result<Option<Matrix>> {
    let ctx = ms.context();
    let n = ms.isocrystal().dimension();
    let target = m2.key()?;
    let start = m1.key()?;
    if start == target {
        return Ok(Some(Matrix::identity(ctx, n)));
    }
    let bound = window_radius(m1)?.max(window_radius(m2)?) + 1;
    let gens = ms.j_generators()?;
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(m1.clone(), Matrix::identity(ctx, n))]);
    while let Some((lat, g)) = queue.pop_front() {
        for gen in &gens {
            let next = lat.transform(gen)?;
            if window_radius(&next)? > bound {
                continue;
            }
            let key = next.key()?;
            if !seen.insert(key.clone()) {
                continue;
            }
            let word = gen.mul(&g)?;
            if key == target {
                return Ok(Some(word));
            }
            if seen.len() > MAX_STATES {
                return Err(Error::ScaleTooLarge(format!("lattice search visited more than {MAX_STATES} states")));
            }
            queue.push_back((next, word));
        }
    }
    Ok(None)
}
