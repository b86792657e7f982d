//! Isocrystals `(L^n, b sigma)`: slopes, isocline decomposition, standard
//! forms, sigma-conjugation and decency.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::element::format_rational;
use crate::padic::{make_field, newton_polygon, slope_factorization, FieldContext, FieldElement, Matrix};

/// Slopes with multiplicities, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPoint {
    parts: Vec<(Rational64, usize)>,
}

/// Serialized slope entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeJson {
    pub num: i64,
    pub den: i64,
    pub mult: usize,
}

impl NewtonPoint {
    /// Validates ordering and that each multiplicity is a multiple of the
    /// slope denominator. Equal slopes are merged.
    pub fn new(parts: impl IntoIterator<Item = (Rational64, usize)>) -> Result<Self> {
        let mut parts: Vec<(Rational64, usize)> = parts.into_iter().filter(|p| p.1 > 0).collect();
        parts.sort_by_key(|a| a.0);
        let mut merged: Vec<(Rational64, usize)> = Vec::new();
        for (s, h) in parts {
            match merged.last_mut() {
                Some(last) if last.0 == s => last.1 += h,
                _ => merged.push((s, h)),
            }
        }
        for &(s, h) in &merged {
            let den = *s.denom();
            if h as i64 % den != 0 {
                return Err(Error::InvalidMultiplicity { mult: h, den });
            }
        }
        Ok(NewtonPoint { parts: merged })
    }

    pub fn parts(&self) -> &[(Rational64, usize)] {
        &self.parts
    }

    pub fn dimension(&self) -> usize {
        self.parts.iter().map(|p| p.1).sum()
    }

    /// Least common multiple of the slope denominators.
    pub fn denominator_lcm(&self) -> i64 {
        self.parts.iter().fold(1, |acc, p| acc.lcm(p.0.denom()))
    }

    /// The slope vector, each slope repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<Rational64> {
        self.parts
            .iter()
            .flat_map(|&(s, h)| std::iter::repeat_n(s, h))
            .collect()
    }

    /// `sum_lambda h_lambda lambda`.
    pub fn total_slope(&self) -> Rational64 {
        self.parts
            .iter()
            .map(|&(s, h)| s * Rational64::from_integer(h as i64))
            .sum()
    }

    pub fn to_json(&self) -> Vec<SlopeJson> {
        self.parts
            .iter()
            .map(|&(s, h)| SlopeJson { num: *s.numer(), den: *s.denom(), mult: h })
            .collect()
    }

    pub fn from_json(parts: &[SlopeJson]) -> Result<Self> {
        if parts.iter().any(|p| p.den <= 0) {
            return Err(Error::Parse("slope denominators must be positive".into()));
        }
        Self::new(parts.iter().map(|p| (Rational64::new(p.num, p.den), p.mult)))
    }
}

impl std::fmt::Display for NewtonPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self
            .parts
            .iter()
            .map(|&(s, h)| format!("{}^{}", format_rational(s), h))
            .collect();
        write!(f, "[{}]", items.join(", "))
    }
}

/// Squared translation length `sum_lambda h_lambda lambda^2`.
pub fn min_nu(np: &NewtonPoint) -> Rational64 {
    np.parts
        .iter()
        .map(|&(s, h)| s * s * Rational64::from_integer(h as i64))
        .sum()
}

/// Block layout of a standard form: one entry per simple summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleBlock {
    pub slope: Rational64,
    /// First column of the block.
    pub start: usize,
    /// Size `h` of the block (the slope denominator).
    pub size: usize,
}

impl SimpleBlock {
    /// Numerator `d` of the slope `d/h`.
    pub fn numerator(&self) -> i64 {
        *self.slope.numer()
    }
}

/// Simple summands of the standard form of `np`, in slope order.
pub fn simple_blocks(np: &NewtonPoint) -> Vec<SimpleBlock> {
    let mut out = Vec::new();
    let mut start = 0;
    for &(s, h) in np.parts() {
        let size = *s.denom() as usize;
        for _ in 0..h / size {
            out.push(SimpleBlock { slope: s, start, size });
            start += size;
        }
    }
    out
}

/// Comparison data with a standard form: `b = g * std * sigma(g)^{-1}`.
#[derive(Clone, Debug)]
pub struct Frame {
    pub newton: NewtonPoint,
    pub transporter: Matrix,
}

/// The isocrystal `F = b sigma` on `L^n`, with `b` defined over `Q_{p^s}`.
#[derive(Clone, Debug)]
pub struct Isocrystal {
    b: Matrix,
    s: usize,
    frame: Option<Frame>,
}

/// Slope-adapted basis: columns grouped by slope.
#[derive(Clone, Debug)]
pub struct IsoclineDecomposition {
    pub basis: Matrix,
    pub blocks: Vec<IsoclineBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoclineBlock {
    pub slope: Rational64,
    pub start: usize,
    pub dim: usize,
}

impl IsoclineBlock {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.dim
    }
}

impl IsoclineDecomposition {
    /// Basis columns of one slope block.
    pub fn block_basis(&self, i: usize) -> Matrix {
        self.basis.columns(self.blocks[i].range())
    }
}

/// Smallest `e` dividing the context degree with `sigma^e(g) = g`.
pub fn definition_degree(g: &Matrix) -> usize {
    let m = g.context().degree();
    (1..=m)
        .filter(|e| m.is_multiple_of(*e))
        .find(|&e| g.sigma(e as i64).eq_at_precision(g))
        .unwrap_or(m)
}

/// Context suitable for the standard form of `np` over `Q_p`: unramified of
/// degree `lcm(h)` times `extra` so that `Q_{p^h}` sits inside it.
pub fn standard_context(p: u64, precision: u32, np: &NewtonPoint, extra: usize) -> Result<Arc<FieldContext>> {
    let m = (np.denominator_lcm() as usize).lcm(&extra.max(1));
    make_field(p, m, precision, 1)
}

/// Block-diagonal companion form: per simple summand of slope `d/h` the
/// `h x h` matrix with ones below the diagonal and `p^d` in the top right.
pub fn standard_form(ctx: &Arc<FieldContext>, np: &NewtonPoint) -> Result<Isocrystal> {
    let n = np.dimension();
    if n == 0 {
        return Err(Error::InvalidParams("empty Newton point".into()));
    }
    let mut b = Matrix::zeros(ctx, n, n);
    let one = FieldElement::one(ctx);
    for blk in simple_blocks(np) {
        let h = blk.size;
        for i in 1..h {
            b.set(blk.start + i, blk.start + i - 1, one.clone());
        }
        b.set(blk.start, blk.start + h - 1, FieldElement::p_power(ctx, blk.numerator()));
    }
    let frame = Frame { newton: np.clone(), transporter: Matrix::identity(ctx, n) };
    Ok(Isocrystal { b, s: 1, frame: Some(frame) })
}

impl Isocrystal {
    /// `b` must be invertible with entries fixed by `sigma^s`, and `s` must
    /// divide the context degree.
    pub fn new(b: Matrix, s: usize) -> Result<Self> {
        if !b.is_square() || b.rows() == 0 {
            return Err(Error::DimensionMismatch("b must be a non-empty square matrix".into()));
        }
        let ctx = b.context();
        if ctx.ramification() != 1 {
            return Err(Error::InvalidField("isocrystals live over unramified contexts".into()));
        }
        if s == 0 || !ctx.degree().is_multiple_of(s) {
            return Err(Error::InvalidParams(format!(
                "definition degree {s} does not divide the context degree {}",
                ctx.degree()
            )));
        }
        if !b.sigma(s as i64).eq_at_precision(&b) {
            return Err(Error::InvalidParams(format!("entries of b are not fixed by sigma^{s}")));
        }
        let det = b.det()?;
        if det.is_exact_zero() {
            return Err(Error::Singular);
        }
        if det.is_zero() {
            return Err(Error::precision("b is singular at working precision"));
        }
        Ok(Isocrystal { b, s, frame: None })
    }

    /// Like [`Isocrystal::new`] with the smallest valid definition degree.
    pub fn from_matrix(b: Matrix) -> Result<Self> {
        let s = definition_degree(&b);
        Self::new(b, s)
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        self.b.context()
    }

    pub fn dimension(&self) -> usize {
        self.b.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.b
    }

    pub fn definition_degree(&self) -> usize {
        self.s
    }

    pub fn frame(&self) -> Option<&Frame> {
        self.frame.as_ref()
    }

    /// Attach a known comparison with a standard form. The relation
    /// `b = g std sigma(g)^{-1}` is checked.
    pub fn with_frame(mut self, frame: Frame) -> Result<Self> {
        let std = standard_form(self.context(), &frame.newton)?;
        let g = &frame.transporter;
        let rebuilt = g.mul(std.matrix())?.mul(&g.sigma(1).inverse()?)?;
        if !rebuilt.eq_at_precision(&self.b) {
            return Err(Error::InvalidParams("frame does not conjugate to the standard form".into()));
        }
        self.frame = Some(frame);
        Ok(self)
    }

    /// `b sigma(b) ... sigma^{k-1}(b)`, the linear part of `F^k`.
    pub fn twisted_product(&self, k: usize) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.context(), self.dimension());
        for i in 0..k {
            acc = acc.mul(&self.b.sigma(i as i64))?;
        }
        Ok(acc)
    }

    /// `Pi_m` for a multiple `m` of the definition degree, computed as
    /// `Pi_s^{m/s}`.
    pub fn twisted_power(&self, m: usize) -> Result<Matrix> {
        if m == 0 || !m.is_multiple_of(self.s) {
            return Err(Error::InvalidParams(format!(
                "{m} is not a positive multiple of the definition degree {}",
                self.s
            )));
        }
        self.twisted_product(self.s)?.pow((m / self.s) as u64)
    }

    pub fn newton_point(&self) -> Result<NewtonPoint> {
        let pi = self.twisted_product(self.s)?;
        let np = newton_polygon(&pi.charpoly()?)?;
        if np.zero_roots > 0 {
            return Err(Error::precision("twisted power is singular at precision"));
        }
        let s = Rational64::from_integer(self.s as i64);
        NewtonPoint::new(np.segments.iter().map(|&(v, h)| (v / s, h)))
            .map_err(|_| Error::precision("slope multiplicities are inconsistent at precision"))
    }

    /// Split `L^n` into the slope parts `N_lambda`.
    ///
    /// Works with `Pi_m`, `m = s * lcm(denominators)`, where all slopes of the
    /// characteristic polynomial are integral, and takes kernels of the
    /// slope-pure factors. Stability under `F` is checked on the result.
    pub fn isocline_decomposition(&self) -> Result<IsoclineDecomposition> {
        let np = self.newton_point()?;
        let n = self.dimension();
        let ctx = self.context();
        if np.parts().len() == 1 {
            return Ok(IsoclineDecomposition {
                basis: Matrix::identity(ctx, n),
                blocks: vec![IsoclineBlock { slope: np.parts()[0].0, start: 0, dim: n }],
            });
        }
        let m = self.s * np.denominator_lcm() as usize;
        let pi = self.twisted_power(m)?;
        let factors = slope_factorization(&pi.charpoly()?)?;
        if factors.len() != np.parts().len() {
            return Err(Error::DecompositionUnverified("factor count differs from the slope count".into()));
        }
        let mut cols: Vec<Vec<FieldElement>> = Vec::with_capacity(n);
        let mut blocks = Vec::new();
        for ((mu, f), &(lambda, h)) in factors.iter().zip(np.parts()) {
            if *mu != lambda * Rational64::from_integer(m as i64) {
                return Err(Error::DecompositionUnverified("factor slopes do not match".into()));
            }
            let ker = pi.eval_poly(f)?.kernel_basis()?;
            if ker.cols() != h {
                return Err(Error::DecompositionUnverified(format!(
                    "slope {} part has dimension {} instead of {h}",
                    format_rational(lambda),
                    ker.cols()
                )));
            }
            blocks.push(IsoclineBlock { slope: lambda, start: cols.len(), dim: h });
            for j in 0..h {
                cols.push(ker.column(j));
            }
        }
        let basis = Matrix::from_columns(ctx, n, &cols);
        let dec = IsoclineDecomposition { basis, blocks };
        self.check_stable(&dec)?;
        Ok(dec)
    }

    /// `basis^{-1} b sigma(basis)` must be block diagonal.
    fn check_stable(&self, dec: &IsoclineDecomposition) -> Result<()> {
        let inv = dec.basis.inverse().map_err(|e| match e {
            Error::PrecisionExhausted(_) => e,
            _ => Error::DecompositionUnverified("slope parts are not independent".into()),
        })?;
        let a = inv.mul(&self.b)?.mul(&dec.basis.sigma(1))?;
        let block_of = |i: usize| dec.blocks.iter().position(|b| b.range().contains(&i));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if block_of(i) != block_of(j) && !a.get(i, j).is_zero() {
                    return Err(Error::DecompositionUnverified(format!(
                        "F leaks from block of column {j} into row {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `b' = g b sigma(g)^{-1}`.
    pub fn sigma_conjugate(&self, g: &Matrix) -> Result<Isocrystal> {
        if g.rows() != self.dimension() || !g.is_square() {
            return Err(Error::DimensionMismatch("conjugating matrix has the wrong size".into()));
        }
        let b = g.mul(&self.b)?.mul(&g.sigma(1).inverse()?)?;
        let s = self.s.lcm(&definition_degree(g));
        let frame = match &self.frame {
            Some(fr) => Some(Frame { newton: fr.newton.clone(), transporter: g.mul(&fr.transporter)? }),
            None => None,
        };
        Ok(Isocrystal { b, s, frame })
    }

    /// Does `Pi_s` act on each slope part as `p^{s lambda}`?
    pub fn is_decent(&self, s: usize) -> Result<bool> {
        if s == 0 {
            return Err(Error::InvalidParams("s must be positive".into()));
        }
        let np = self.newton_point()?;
        let sr = Rational64::from_integer(s as i64);
        if np.parts().iter().any(|&(l, _)| !(l * sr).is_integer()) {
            return Err(Error::InvalidParams(format!("s = {s} does not clear the slope denominators")));
        }
        let dec = self.isocline_decomposition()?;
        let pi = self.twisted_product(s)?;
        for (i, blk) in dec.blocks.iter().enumerate() {
            let v = dec.block_basis(i);
            let lhs = pi.mul(&v)?;
            let rhs = v.scale(&FieldElement::p_power(self.context(), (blk.slope * sr).to_integer()));
            if !lhs.eq_at_precision(&rhs) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `sum h_lambda lambda == val(det b)`.
    pub fn slope_determinant_identity(&self) -> Result<bool> {
        let np = self.newton_point()?;
        let v = self
            .b
            .det()?
            .valuation()
            .finite()
            .ok_or_else(|| Error::precision("determinant is zero at precision"))?;
        Ok(np.total_slope() == v)
    }

    pub fn to_json(&self) -> IsocrystalJson {
        let ctx = self.context();
        IsocrystalJson {
            p: ctx.p(),
            m: ctx.degree(),
            precision: ctx.precision(),
            s: self.s,
            n: self.dimension(),
            b: self.b.to_json(),
        }
    }

    pub fn from_json(json: &IsocrystalJson) -> Result<Self> {
        let ctx = make_field(json.p, json.m, json.precision, 1)?;
        let b = Matrix::from_json(&ctx, &json.b)?;
        if b.rows() != json.n {
            return Err(Error::Parse("n does not match the matrix".into()));
        }
        Self::new(b, json.s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsocrystalJson {
    pub p: u64,
    pub m: usize,
    #[serde(rename = "N")]
    pub precision: u32,
    pub s: usize,
    pub n: usize,
    pub b: Vec<Vec<crate::padic::FieldElementJson>>,
}
