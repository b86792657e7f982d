use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::context::{Coeffs, FieldContext};
use super::element::FieldElement;
use super::residue::{FqPoly, ResidueField};
use crate::error::{Error, Result};

/// Polynomial with coefficients in one field context, constant term first.
#[derive(Clone, Debug)]
pub struct Polynomial {
    ctx: Arc<FieldContext>,
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(ctx: &Arc<FieldContext>, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { ctx: Arc::clone(ctx), coeffs }
    }

    pub fn from_ints(ctx: &Arc<FieldContext>, coeffs: &[i64]) -> Self {
        Self::new(ctx, coeffs.iter().map(|&c| FieldElement::from_int(ctx, c)).collect())
    }

    /// `prod (x - r_i)`.
    pub fn from_roots(ctx: &Arc<FieldContext>, roots: &[FieldElement]) -> Self {
        let mut acc = Self::from_ints(ctx, &[1]);
        for r in roots {
            acc = acc.mul(&Self::new(ctx, vec![r.neg(), FieldElement::one(ctx)]));
        }
        acc
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| FieldElement::zero(&self.ctx))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs
            .last()
            .is_some_and(|c| c.eq_at_precision(&FieldElement::one(&self.ctx)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(&self.ctx, Vec::new());
        }
        let mut out = vec![FieldElement::zero(&self.ctx); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.ctx, out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(&self.ctx, (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect())
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Coefficientwise equality at precision.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.sub(other).coeffs.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.coeffs.iter().map(|c| c.to_json()).collect::<Vec<_>>())
            .expect("serializable")
    }
}

/// Newton polygon reported as root valuations with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygonData {
    /// `(slope, multiplicity)`, slopes strictly increasing; the slope of a
    /// root of valuation `v` is `v`.
    pub segments: Vec<(Rational64, usize)>,
    /// Number of roots equal to zero (monomial factor `x^k`).
    pub zero_roots: usize,
}

impl NewtonPolygonData {
    pub fn total_multiplicity(&self) -> usize {
        self.segments.iter().map(|s| s.1).sum::<usize>() + self.zero_roots
    }
}

fn rational_val(c: &FieldElement) -> Option<Rational64> {
    c.valuation().finite()
}

fn abs_bound(c: &FieldElement) -> Option<Rational64> {
    let d = c.context().ramification() as i64;
    c.abs_ticks().map(|a| Rational64::new(a, d))
}

/// Lower convex hull of `(i, val(a_i))`.
pub fn newton_polygon(f: &Polynomial) -> Result<NewtonPolygonData> {
    let deg = f.degree().ok_or_else(|| Error::InvalidParams("zero polynomial".into()))?;
    let c = f.coeffs();
    let mut zero_roots = 0;
    while zero_roots < deg && c[zero_roots].is_exact_zero() {
        zero_roots += 1;
    }
    if c[zero_roots].is_zero() {
        return Err(Error::precision("constant term of the Newton polygon is not determined"));
    }
    let points: Vec<(i64, Rational64)> = (zero_roots..=deg)
        .filter_map(|i| rational_val(&c[i]).map(|v| (i as i64, v)))
        .collect();
    // monotone chain, lower hull
    let mut hull: Vec<(i64, Rational64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop (x2,y2) if it lies on or above the segment (x1,y1)-(pt)
            let lhs = (y2 - y1) * Rational64::from_integer(pt.0 - x1);
            let rhs = (pt.1 - y1) * Rational64::from_integer(x2 - x1);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let hull_at = |i: i64| -> Rational64 {
        for w in hull.windows(2) {
            let ((x1, y1), (x2, y2)) = (w[0], w[1]);
            if x1 <= i && i <= x2 {
                return y1 + (y2 - y1) * Rational64::new(i - x1, x2 - x1);
            }
        }
        hull[0].1
    };
    for (i, ci) in c.iter().enumerate() {
        if ci.is_zero() && !ci.is_exact_zero() {
            let bound = abs_bound(ci).unwrap_or_default();
            if i < zero_roots || bound < hull_at(i as i64) {
                return Err(Error::precision(format!(
                    "coefficient {i} is O(p^{bound}) below the Newton polygon"
                )));
            }
        }
    }
    let mut segments: Vec<(Rational64, usize)> = hull
        .windows(2)
        .map(|w| {
            let ((x1, y1), (x2, y2)) = (w[0], w[1]);
            ((y1 - y2) / Rational64::from_integer(x2 - x1), (x2 - x1) as usize)
        })
        .collect();
    segments.reverse();
    Ok(NewtonPolygonData { segments, zero_roots })
}

fn raw_poly_mul(ctx: &FieldContext, a: &[Coeffs], b: &[Coeffs]) -> Vec<Coeffs> {
    let mut out = vec![ctx.raw_zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ctx.raw_add(&out[i + j], &ctx.raw_mul(x, y));
        }
    }
    out
}

fn lift_fq(e: &[i64]) -> Coeffs {
    e.iter().map(|&c| BigInt::from(c)).collect()
}

/// Factor a monic polynomial with integral Newton slopes into monic factors
/// that are pure of one slope each (sorted by slope).
///
/// Each factor is obtained by rescaling `x -> p^lambda x`, splitting the
/// residue polynomial as (unit-root part) * (monomial part) and Hensel lifting.
pub fn slope_factorization(f: &Polynomial) -> Result<Vec<(Rational64, Polynomial)>> {
    let ctx = f.context();
    if ctx.ramification() != 1 {
        return Err(Error::IncompatibleTower("slope factorization runs over unramified fields".into()));
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let np = newton_polygon(f)?;
    if np.zero_roots > 0 {
        return Err(Error::InvalidParams("polynomial has zero as a root".into()));
    }
    for (s, _) in &np.segments {
        if !s.is_integer() {
            return Err(Error::SlopeNotIntegral(super::element::format_rational(*s)));
        }
    }
    if np.segments.len() == 1 {
        return Ok(vec![(np.segments[0].0, f.clone())]);
    }
    let n = f.degree().unwrap_or(0);
    let field = ResidueField::new(ctx.p(), ctx.minpoly());
    let mut out = Vec::with_capacity(np.segments.len());
    for &(slope, mult) in &np.segments {
        let lam = slope.to_integer();
        // g_i = f_i p^{lam i - e}
        let e = (0..=n)
            .filter_map(|i| f.coeff(i).val_ticks().map(|v| v + lam * i as i64))
            .min()
            .unwrap_or(0);
        let g: Vec<FieldElement> = (0..=n).map(|i| f.coeff(i).shift(lam * i as i64 - e)).collect();
        let prec = g
            .iter()
            .filter_map(|c| c.abs_ticks())
            .min()
            .unwrap_or(ctx.full_ticks())
            .min(ctx.full_ticks());
        if prec < 1 {
            return Err(Error::precision("no precision left for Hensel lifting"));
        }
        let prec = prec as u32;
        let g_raw: Vec<Coeffs> = g
            .iter()
            .map(|c| {
                c.integral_raw()
                    .map(|r| ctx.raw_mod_p_pow(&r, prec))
                    .ok_or_else(|| Error::precision("non-integral rescaled coefficient"))
            })
            .collect::<Result<_>>()?;
        let g_bar: Vec<Vec<i64>> = g_raw.iter().map(|r| ctx.residue_of(r)).collect();
        let a = g_bar
            .iter()
            .position(|c| !ResidueField::is_zero(c))
            .ok_or_else(|| Error::precision("residue polynomial vanishes"))?;
        let b = a + mult;
        if b > n || ResidueField::is_zero(&g_bar[b]) || g_bar[b + 1..].iter().any(|c| !ResidueField::is_zero(c)) {
            return Err(Error::precision("lifted factors cannot be separated"));
        }
        let lc = g_bar[b].clone();
        let lc_inv = field.inv(&lc).ok_or_else(|| Error::precision("zero residue lead"))?;
        let h_bar: FqPoly = (a..=b).map(|i| field.mul(&g_bar[i], &lc_inv)).collect();
        let mut q_bar: FqPoly = vec![field.zero(); a + 1];
        q_bar[a] = lc.clone();
        let t_bar = field
            .poly_inv_mod(&q_bar, &h_bar)
            .ok_or_else(|| Error::precision("residue factors are not coprime"))?;

        let mut h: Vec<Coeffs> = h_bar.iter().map(|c| lift_fq(c)).collect();
        let mut q: Vec<Coeffs> = q_bar.iter().map(|c| lift_fq(c)).collect();
        for k in 1..prec {
            let hq = raw_poly_mul(ctx, &h, &q);
            let err: Vec<Coeffs> = (0..=n)
                .map(|i| {
                    let gi = &g_raw[i];
                    match hq.get(i) {
                        Some(x) => ctx.raw_sub(gi, x),
                        None => gi.clone(),
                    }
                })
                .collect();
            let mut e_bar: FqPoly = Vec::with_capacity(err.len());
            for c in &err {
                let c = ctx.raw_mod_p_pow(c, prec);
                if ctx.raw_vp(&c).is_some_and(|v| v < k) {
                    return Err(Error::precision("Hensel step lost congruence"));
                }
                let shifted = ctx.raw_div_p_pow(&c, k);
                e_bar.push(ctx.residue_of(&shifted));
            }
            while e_bar.last().is_some_and(ResidueField::is_zero) {
                e_bar.pop();
            }
            if e_bar.is_empty() {
                continue;
            }
            let (_, dh) = field.poly_divrem(&field.poly_mul(&t_bar, &e_bar), &h_bar);
            let (dq, rem) = field.poly_divrem(&field.poly_sub(&e_bar, &field.poly_mul(&q_bar, &dh)), &h_bar);
            debug_assert!(rem.is_empty());
            let pk = ctx.p_pow(k).clone();
            for (i, c) in dh.iter().enumerate() {
                h[i] = ctx.raw_add(&h[i], &ctx.raw_scale(&lift_fq(c), &pk));
            }
            if q.len() < dq.len() {
                q.resize(dq.len(), ctx.raw_zero());
            }
            for (i, c) in dq.iter().enumerate() {
                q[i] = ctx.raw_add(&q[i], &ctx.raw_scale(&lift_fq(c), &pk));
            }
        }
        // f_lam(x) = p^{lam r} h(x / p^lam)
        let r = mult;
        let mut coeffs = Vec::with_capacity(r + 1);
        for (i, hi) in h.iter().enumerate().take(r) {
            let raw = ctx.raw_mod_p_pow(hi, prec);
            let el = if raw.iter().all(|c| c.is_zero()) {
                FieldElement::zero(ctx).truncate(prec as i64)
            } else {
                FieldElement::from_integral_raw(ctx, raw, Some(prec as i64))
            };
            coeffs.push(el.shift(lam * (r - i) as i64));
        }
        coeffs.push(FieldElement::one(ctx));
        out.push((slope, Polynomial::new(ctx, coeffs)));
    }
    Ok(out)
}
