//! The Min set of the isometry `F_b` on the building: displacement,
//! membership, construction of Min points and elements of `J_b(Q_p)`.

mod crystal;
mod scan;
mod verify;

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::building::{distance_squared, norms_equal, levi_adapt, Norm, DEFAULT_DENOMINATOR_CAP};
use crate::error::{Error, Result};
use crate::isocrystal::{
    min_nu, simple_blocks, standard_form, Frame, IsoclineDecomposition, Isocrystal, NewtonPoint, SimpleBlock,
};
use crate::padic::element::{format_rational, parse_rational};
use crate::padic::{FieldContext, FieldElement, Matrix};
use crate::sampling::{random_integral, random_unit};

pub use crystal::{
    crystal_isomorphism, enumerate_crystals, is_crystal, is_minimal_crystal, minimal_crystal_ball, CrystalCheck,
    MAX_CANDIDATES,
};
pub use scan::{kappa_scan, ScanConfig, ScanRecord, ScanReport};
pub use verify::{instance_hash, verify_suite, Check, CheckStatus, VerificationReport, VerifyConfig, SUITES};

pub const SCHEMA_VERSION: u32 = 1;

/// Base exponent per simple block of the standard form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinPointParams {
    pub offsets: Vec<Rational64>,
}

impl MinPointParams {
    pub fn uniform(t: Rational64, blocks: usize) -> Self {
        MinPointParams { offsets: vec![t; blocks] }
    }

    pub fn to_json(&self) -> Vec<String> {
        self.offsets.iter().map(|t| format_rational(*t)).collect()
    }

    pub fn from_json(offsets: &[String]) -> Result<Self> {
        Ok(MinPointParams { offsets: offsets.iter().map(|s| parse_rational(s)).collect::<Result<_>>()? })
    }
}

/// Constructive families inside `J_b(Q_p) = {g : g b = b sigma(g)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JFamily {
    /// `p^k u` with `u` a unit of `Z_p`.
    Scalar,
    /// `p^a C^k` on each simple block, `C` its companion matrix.
    BlockPower,
    /// `sum_k D(x_k) C^k` on each simple block, `D(x) = diag(x, sigma x, ...)`.
    CyclicField,
    /// `[[u, p sigma(v)], [v, sigma(u)]]` on slope-1/2 blocks.
    Quaternion,
    /// A swap of two simple blocks of equal slope.
    BlockPermutation,
    /// `Id + D(x)` placed between two simple blocks of equal slope.
    Shear,
    /// Product of one sample from each applicable family.
    Mixed,
}

impl JFamily {
    pub const ALL: [JFamily; 7] = [
        JFamily::Scalar,
        JFamily::BlockPower,
        JFamily::CyclicField,
        JFamily::Quaternion,
        JFamily::BlockPermutation,
        JFamily::Shear,
        JFamily::Mixed,
    ];
}

/// An isocrystal together with its slope decomposition, ready for Min-set
/// queries.
#[derive(Clone, Debug)]
pub struct MinSet {
    ic: Isocrystal,
    newton: NewtonPoint,
    decomposition: IsoclineDecomposition,
    cap: i64,
}

impl MinSet {
    pub fn new(ic: &Isocrystal) -> Result<Self> {
        Self::with_cap(ic, DEFAULT_DENOMINATOR_CAP)
    }

    /// `cap` bounds exponent denominators of the norms built here.
    pub fn with_cap(ic: &Isocrystal, cap: i64) -> Result<Self> {
        let newton = ic.newton_point()?;
        let decomposition = ic.isocline_decomposition()?;
        let cap = cap.max(newton.denominator_lcm());
        Ok(MinSet { ic: ic.clone(), newton, decomposition, cap })
    }

    pub fn isocrystal(&self) -> &Isocrystal {
        &self.ic
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        self.ic.context()
    }

    pub fn newton_point(&self) -> &NewtonPoint {
        &self.newton
    }

    pub fn decomposition(&self) -> &IsoclineDecomposition {
        &self.decomposition
    }

    pub fn denominator_cap(&self) -> i64 {
        self.cap
    }

    /// Squared translation length of `F`.
    pub fn min_nu(&self) -> Rational64 {
        min_nu(&self.newton)
    }

    /// `d(alpha, F alpha)^2`.
    pub fn displacement(&self, a: &Norm) -> Result<Rational64> {
        self.displacement_power(a, 1)
    }

    /// `d(alpha, F^k alpha)^2`.
    pub fn displacement_power(&self, a: &Norm, k: usize) -> Result<Rational64> {
        distance_squared(a, &a.fb_power_act(&self.ic, k)?)
    }

    pub fn is_in_min(&self, a: &Norm) -> Result<bool> {
        self.is_in_min_power(a, 1)
    }

    /// Membership in `Min(F^k)`: `alpha` is adapted to the slope
    /// decomposition and `F^k` scales the slope-`lambda` part by `p^{k lambda}`.
    pub fn is_in_min_power(&self, a: &Norm, k: usize) -> Result<bool> {
        if k == 0 {
            return Err(Error::InvalidParams("power must be at least 1".into()));
        }
        let a = self.widen(a)?;
        let (adapted, same) = levi_adapt(&a, &self.decomposition)?;
        if !same {
            return Ok(false);
        }
        let kk = Rational64::from_integer(k as i64);
        let mut exps = adapted.exponents().to_vec();
        let mut col = 0;
        for blk in &self.decomposition.blocks {
            for _ in 0..blk.dim {
                exps[col] -= kk * blk.slope;
                col += 1;
            }
        }
        let target = Norm::with_cap(adapted.basis().clone(), exps, self.cap.max(a.denominator_cap()))?;
        norms_equal(&adapted.fb_power_act(&self.ic, k)?, &target)
    }

    fn widen(&self, a: &Norm) -> Result<Norm> {
        let den = lcm_all(a.exponents().iter().map(|c| *c.denom())).lcm(&self.newton.denominator_lcm());
        if den <= a.denominator_cap() {
            return Ok(a.clone());
        }
        Norm::with_cap(a.basis().clone(), a.exponents().to_vec(), den.max(self.cap))
    }

    pub fn frame(&self) -> Result<&Frame> {
        self.ic
            .frame()
            .ok_or_else(|| Error::InvalidParams("isocrystal has no known comparison with a standard form".into()))
    }

    /// Simple blocks of the standard form behind the frame.
    pub fn simple_blocks(&self) -> Result<Vec<SimpleBlock>> {
        Ok(simple_blocks(&self.frame()?.newton))
    }

    /// Min point with exponents `t + i d/h` on the cyclic basis of each
    /// simple block, transported by the frame.
    pub fn min_point(&self, params: &MinPointParams) -> Result<Norm> {
        let frame = self.frame()?;
        let blocks = simple_blocks(&frame.newton);
        if params.offsets.len() != blocks.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} block offsets, got {}",
                blocks.len(),
                params.offsets.len()
            )));
        }
        let mut exps = vec![Rational64::zero(); self.ic.dimension()];
        for (blk, t) in blocks.iter().zip(&params.offsets) {
            for i in 0..blk.size {
                exps[blk.start + i] = t + blk.slope * Rational64::from_integer(i as i64);
            }
        }
        self.frame_norm(exps)
    }

    fn frame_norm(&self, exps: Vec<Rational64>) -> Result<Norm> {
        let den = lcm_all(exps.iter().map(|c| *c.denom()));
        Norm::with_cap(self.frame()?.transporter.clone(), exps, self.cap.max(den))
    }

    /// Least-squares projection of `alpha_{T, c}` (frame basis `T`) onto the
    /// Min points of the same apartment, and the squared distance to it.
    pub fn apartment_min_projection(&self, c: &[Rational64]) -> Result<(Norm, Rational64)> {
        let blocks = self.simple_blocks()?;
        if c.len() != self.ic.dimension() {
            return Err(Error::InvalidParams("exponent vector has the wrong length".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut dist = Rational64::zero();
        for blk in &blocks {
            let h = blk.size as i64;
            let t: Rational64 = (0..blk.size)
                .map(|i| c[blk.start + i] - blk.slope * Rational64::from_integer(i as i64))
                .sum::<Rational64>()
                / Rational64::from_integer(h);
            for i in 0..blk.size {
                let d = c[blk.start + i] - t - blk.slope * Rational64::from_integer(i as i64);
                dist += d * d;
            }
            offsets.push(t);
        }
        Ok((self.min_point(&MinPointParams { offsets })?, dist))
    }

    /// `g b = b sigma(g)` at precision.
    pub fn is_in_j(&self, g: &Matrix) -> Result<bool> {
        let b = self.ic.matrix();
        Ok(g.mul(b)?.eq_at_precision(&b.mul(&g.sigma(1))?))
    }

    /// A random element of `J_b(Q_p)` from `family`, built on the standard
    /// form and transported by the frame. Verified before it is returned.
    pub fn sample_j_element<R: Rng>(&self, family: JFamily, rng: &mut R) -> Result<Matrix> {
        let frame = self.frame()?;
        let std = JBuilder::new(self.context(), &frame.newton)?;
        let j = std.sample(family, rng)?;
        let t = &frame.transporter;
        let g = t.mul(&j)?.mul(&t.inverse()?)?;
        if !self.is_in_j(&g)? {
            return Err(Error::NotInJ);
        }
        Ok(g)
    }

    /// Generators for lattice searches: `p` and the companion matrix on each
    /// simple block, with inverses, and swaps of equal blocks.
    pub fn j_generators(&self) -> Result<Vec<Matrix>> {
        let frame = self.frame()?;
        let std = JBuilder::new(self.context(), &frame.newton)?;
        let t = &frame.transporter;
        let t_inv = t.inverse()?;
        let mut out = Vec::new();
        for g in std.generators()? {
            let g = t.mul(&g)?.mul(&t_inv)?;
            if !self.is_in_j(&g)? {
                return Err(Error::NotInJ);
            }
            out.push(g);
        }
        Ok(out)
    }
}

fn lcm_all(it: impl Iterator<Item = i64>) -> i64 {
    it.fold(1, |acc, d| acc.lcm(&d))
}

/// Elements of `J` for the standard form itself.
struct JBuilder<'a> {
    ctx: &'a Arc<FieldContext>,
    n: usize,
    blocks: Vec<SimpleBlock>,
    companions: Vec<Matrix>,
}

impl<'a> JBuilder<'a> {
    fn new(ctx: &'a Arc<FieldContext>, np: &NewtonPoint) -> Result<Self> {
        let std = standard_form(ctx, np)?;
        let blocks = simple_blocks(np);
        let companions = blocks
            .iter()
            .map(|blk| std.matrix().submatrix(blk.start..blk.start + blk.size, blk.start..blk.start + blk.size))
            .collect();
        Ok(JBuilder { ctx, n: np.dimension(), blocks, companions })
    }

    fn block_diag(&self, parts: &[Matrix]) -> Matrix {
        Matrix::block_diag(self.ctx, parts)
    }

    fn fits(&self, h: usize) -> bool {
        self.ctx.degree().is_multiple_of(h)
    }

    /// `diag(x, sigma x, ..., sigma^{h-1} x)`.
    fn cyclic_diag(&self, x: &FieldElement, h: usize) -> Matrix {
        let d: Vec<FieldElement> = (0..h).map(|i| x.frobenius(i as i64)).collect();
        Matrix::diagonal(self.ctx, &d)
    }

    fn equal_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                if self.blocks[i].slope == self.blocks[j].slope {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn swap(&self, i: usize, j: usize) -> Matrix {
        let (a, b) = (&self.blocks[i], &self.blocks[j]);
        let mut perm: Vec<usize> = (0..self.n).collect();
        for k in 0..a.size {
            perm.swap(a.start + k, b.start + k);
        }
        let one = FieldElement::one(self.ctx);
        let mut g = Matrix::zeros(self.ctx, self.n, self.n);
        for (col, &row) in perm.iter().enumerate() {
            g.set(row, col, one.clone());
        }
        g
    }

    fn power(&self, c: &Matrix, k: i64) -> Result<Matrix> {
        if k >= 0 {
            c.pow(k as u64)
        } else {
            c.inverse()?.pow((-k) as u64)
        }
    }

    fn sample<R: Rng>(&self, family: JFamily, rng: &mut R) -> Result<Matrix> {
        let ctx = self.ctx;
        match family {
            JFamily::Scalar => {
                let k = rng.gen_range(-1..=1);
                let u = random_unit(ctx, 1, rng)?;
                Ok(Matrix::identity(ctx, self.n).scale(&u.mul(&FieldElement::p_power(ctx, k))))
            }
            JFamily::BlockPower => {
                let parts = self
                    .companions
                    .iter()
                    .map(|c| {
                        let a = rng.gen_range(-1..=1);
                        let k = rng.gen_range(-1..=1);
                        Ok(self.power(c, k)?.scale(&FieldElement::p_power(ctx, a)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(self.block_diag(&parts))
            }
            JFamily::CyclicField => {
                let mut parts = Vec::with_capacity(self.blocks.len());
                for (blk, c) in self.blocks.iter().zip(&self.companions) {
                    let h = blk.size;
                    if !self.fits(h) {
                        parts.push(Matrix::identity(ctx, h));
                        continue;
                    }
                    let mut g = self.cyclic_diag(&random_unit(ctx, h, rng)?, h);
                    let mut ck = Matrix::identity(ctx, h);
                    for _ in 1..h {
                        ck = ck.mul(c)?;
                        let x = random_integral(ctx, h, rng)?.shift(ctx.ramification() as i64);
                        g = g.add(&self.cyclic_diag(&x, h).mul(&ck)?)?;
                    }
                    if rng.gen_bool(0.5) {
                        g = g.mul(c)?;
                    }
                    parts.push(g);
                }
                Ok(self.block_diag(&parts))
            }
            JFamily::Quaternion => {
                if !self.blocks.iter().any(|b| b.slope == Rational64::new(1, 2)) || !self.fits(2) {
                    return Err(Error::InvalidParams(
                        "quaternion family needs a slope-1/2 block over a field containing Q_{p^2}".into(),
                    ));
                }
                let mut parts = Vec::with_capacity(self.blocks.len());
                for blk in &self.blocks {
                    if blk.slope != Rational64::new(1, 2) {
                        parts.push(Matrix::identity(ctx, blk.size));
                        continue;
                    }
                    let u = random_unit(ctx, 2, rng)?;
                    let v = random_integral(ctx, 2, rng)?;
                    let p = FieldElement::p_power(ctx, 1);
                    let data = vec![u.clone(), p.mul(&v.frobenius(1)), v, u.frobenius(1)];
                    parts.push(Matrix::new(ctx, 2, 2, data)?);
                }
                Ok(self.block_diag(&parts))
            }
            JFamily::BlockPermutation => match self.equal_pairs().choose(rng) {
                Some(&(i, j)) => Ok(self.swap(i, j)),
                None => Ok(Matrix::identity(ctx, self.n)),
            },
            JFamily::Shear => {
                let mut g = Matrix::identity(ctx, self.n);
                let pairs: Vec<_> = self.equal_pairs().into_iter().filter(|&(i, _)| self.fits(self.blocks[i].size)).collect();
                if let Some(&(i, j)) = pairs.choose(rng) {
                    let (bi, bj) = (&self.blocks[i], &self.blocks[j]);
                    let (rows, cols) = if rng.gen_bool(0.5) { (bi, bj) } else { (bj, bi) };
                    let x = random_integral(ctx, bi.size, rng)?;
                    let d = self.cyclic_diag(&x, bi.size);
                    for r in 0..bi.size {
                        for c in 0..bi.size {
                            g.set(rows.start + r, cols.start + c, d.get(r, c).clone());
                        }
                    }
                }
                Ok(g)
            }
            JFamily::Mixed => {
                let mut g = Matrix::identity(ctx, self.n);
                for fam in [
                    JFamily::Scalar,
                    JFamily::BlockPower,
                    JFamily::CyclicField,
                    JFamily::BlockPermutation,
                    JFamily::Shear,
                ] {
                    g = g.mul(&self.sample(fam, rng)?)?;
                }
                Ok(g)
            }
        }
    }

    fn generators(&self) -> Result<Vec<Matrix>> {
        let ctx = self.ctx;
        let mut out = Vec::new();
        for i in 0..self.blocks.len() {
            let with = |g: Matrix| {
                let parts: Vec<Matrix> = (0..self.blocks.len())
                    .map(|k| if k == i { g.clone() } else { Matrix::identity(ctx, self.blocks[k].size) })
                    .collect();
                self.block_diag(&parts)
            };
            let h = self.blocks[i].size;
            for k in [1, -1] {
                out.push(with(Matrix::identity(ctx, h).scale(&FieldElement::p_power(ctx, k))));
                if h > 1 {
                    out.push(with(self.power(&self.companions[i], k)?));
                }
            }
        }
        for (i, j) in self.equal_pairs() {
            out.push(self.swap(i, j));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isocrystal::standard_context;
    use crate::padic::make_field;
    use crate::sampling::stream;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    fn std_min(p: u64, parts: &[(Rational64, usize)]) -> MinSet {
        let np = NewtonPoint::new(parts.iter().copied()).unwrap();
        let ctx = standard_context(p, 20, &np, 1).unwrap();
        MinSet::new(&standard_form(&ctx, &np).unwrap()).unwrap()
    }

    #[test]
    fn displacement_examples() {
        let id = std_min(3, &[(r(0, 1), 2)]);
        let a = Norm::standard(id.context(), vec![r(0, 1), r(1, 1)]).unwrap();
        assert_eq!(id.displacement(&a).unwrap(), r(0, 1));

        let half = std_min(2, &[(r(1, 2), 2)]);
        let a = half.min_point(&MinPointParams::uniform(r(1, 3), 1)).unwrap();
        assert_eq!(half.displacement(&a).unwrap(), r(1, 2));

        let ctx = make_field(3, 1, 20, 1).unwrap();
        let b = Matrix::from_ints(&ctx, &[&[1, 0], &[0, 3]]);
        let ms = MinSet::new(&Isocrystal::from_matrix(b).unwrap()).unwrap();
        let a = Norm::standard(&ctx, vec![r(0, 1), r(0, 1)]).unwrap();
        assert_eq!(ms.displacement(&a).unwrap(), r(1, 1));
        assert_eq!(ms.min_nu(), r(1, 1));
    }

    #[test]
    fn membership_examples() {
        let half = std_min(3, &[(r(1, 2), 2)]);
        let on = Norm::standard(half.context(), vec![r(2, 3), r(7, 6)]).unwrap();
        assert!(half.is_in_min(&on).unwrap());
        let off = Norm::standard(half.context(), vec![r(0, 1), r(0, 1)]).unwrap();
        assert!(!half.is_in_min(&off).unwrap());
        let id = std_min(2, &[(r(0, 1), 3)]);
        assert!(id.is_in_min(&Norm::standard(id.context(), vec![r(0, 1); 3]).unwrap()).unwrap());
    }

    #[test]
    fn min_points() {
        let half = std_min(2, &[(r(1, 2), 2)]);
        let a = half.min_point(&MinPointParams::uniform(r(0, 1), 1)).unwrap();
        assert_eq!(a.exponents(), &[r(0, 1), r(1, 2)]);
        assert!(half.min_point(&MinPointParams::uniform(r(0, 1), 2)).is_err());

        let mixed = std_min(3, &[(r(0, 1), 1), (r(1, 3), 3), (r(1, 1), 1)]);
        let mut rng = stream(5, 0);
        for _ in 0..20 {
            let offsets = crate::sampling::random_exponents(3, 2, 6, &mut rng);
            let a = mixed.min_point(&MinPointParams { offsets }).unwrap();
            assert!(mixed.is_in_min(&a).unwrap());
            assert_eq!(mixed.displacement(&a).unwrap(), mixed.min_nu());
        }
    }

    #[test]
    fn powers() {
        let ms = std_min(2, &[(r(1, 3), 3)]);
        let a = ms.min_point(&MinPointParams::uniform(r(1, 2), 1)).unwrap();
        for k in 1..=3 {
            assert!(ms.is_in_min_power(&a, k).unwrap());
            let k2 = Rational64::from_integer((k * k) as i64);
            assert_eq!(ms.displacement_power(&a, k).unwrap(), k2 * ms.min_nu());
        }
    }

    #[test]
    fn apartment_projection() {
        let half = std_min(2, &[(r(1, 2), 2)]);
        let (p, d) = half.apartment_min_projection(&[r(0, 1), r(0, 1)]).unwrap();
        assert_eq!(p.exponents(), &[r(-1, 4), r(1, 4)]);
        assert_eq!(d, r(1, 8));
        assert!(half.is_in_min(&p).unwrap());
        let (p, d) = half.apartment_min_projection(&[r(1, 1), r(3, 2)]).unwrap();
        assert_eq!(p.exponents(), &[r(1, 1), r(3, 2)]);
        assert_eq!(d, r(0, 1));
    }

    #[test]
    fn j_elements() {
        let half = std_min(3, &[(r(1, 2), 2)]);
        let ctx = half.context().clone();
        assert!(half.is_in_j(&Matrix::identity(&ctx, 2)).unwrap());
        assert!(half.is_in_j(half.isocrystal().matrix()).unwrap());
        assert!(half.is_in_j(&Matrix::identity(&ctx, 2).scale(&FieldElement::p_power(&ctx, 1))).unwrap());
        assert!(!half.is_in_j(&Matrix::from_ints(&ctx, &[&[1, 1], &[0, 1]])).unwrap());

        let a = half.min_point(&MinPointParams::uniform(r(1, 4), 1)).unwrap();
        let mut rng = stream(11, 3);
        for fam in JFamily::ALL {
            for _ in 0..3 {
                let g = half.sample_j_element(fam, &mut rng).unwrap();
                assert!(half.is_in_min(&a.group_act(&g).unwrap()).unwrap(), "{fam:?}");
            }
        }
    }

    #[test]
    fn j_elements_with_equal_blocks() {
        let ms = std_min(2, &[(r(0, 1), 1), (r(1, 2), 4)]);
        let a = ms.min_point(&MinPointParams { offsets: vec![r(0, 1), r(1, 2), r(-1, 1)] }).unwrap();
        let mut rng = stream(2, 9);
        for fam in [JFamily::BlockPermutation, JFamily::Shear, JFamily::Mixed] {
            let g = ms.sample_j_element(fam, &mut rng).unwrap();
            assert!(ms.is_in_min(&a.group_act(&g).unwrap()).unwrap(), "{fam:?}");
        }
        assert_eq!(ms.j_generators().unwrap().len(), 2 + 4 + 4 + 1);
    }
}
