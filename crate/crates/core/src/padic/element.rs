use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::context::{Coeffs, FieldContext};
use crate::error::{Error, Result};

/// A valuation: a rational number or `+infinity` (the valuation of zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Rational64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, _) => Ordering::Greater,
            (_, Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "INFINITY"),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    /// `abs = None` is an exact zero; `Some(k)` is `O(pi^k)`.
    Zero { abs: Option<i64> },
    /// `pi^val * unit` with the unit known modulo `pi^rel`.
    Nonzero { val: i64, unit: Coeffs, rel: i64 },
}

/// An element of `Q_{p^m}(pi)` at fixed precision: valuation plus unit part.
///
/// Valuations and precisions are tracked in ticks of `1/d`. Cancellation in
/// additions lowers the relative precision; a result whose known digits all
/// vanish becomes an inexact zero `O(pi^k)`.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldContext>,
    repr: Repr,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs: None } => write!(f, "0"),
            Repr::Zero { abs: Some(k) } => write!(f, "O(pi^{k})"),
            Repr::Nonzero { val, unit, rel } => {
                let d = self.ctx.digits();
                let m = self.ctx.degree();
                let digits: Vec<Vec<String>> = (0..d)
                    .map(|j| unit[j * m..(j + 1) * m].iter().map(|c| c.to_string()).collect())
                    .collect();
                write!(f, "pi^{val}*{digits:?}+O(rel {rel})")
            }
        }
    }
}

impl FieldElement {
    pub fn zero(ctx: &Arc<FieldContext>) -> Self {
        FieldElement { ctx: Arc::clone(ctx), repr: Repr::Zero { abs: None } }
    }

    pub fn one(ctx: &Arc<FieldContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<FieldContext>, c: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(c))
    }

    pub fn from_bigint(ctx: &Arc<FieldContext>, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(ctx);
        }
        let raw = ctx.raw_from_int(c);
        Self::from_integral_raw(ctx, raw, None)
    }

    /// `sum_i c_i zeta^i` for integer coefficients.
    pub fn from_poly(ctx: &Arc<FieldContext>, coeffs: &[i64]) -> Self {
        let mut acc = Self::zero(ctx);
        let zeta = Self::generator(ctx);
        let mut pow = Self::one(ctx);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&pow.mul(&Self::from_int(ctx, c)));
            }
            if i + 1 < coeffs.len() {
                pow = pow.mul(&zeta);
            }
        }
        acc
    }

    /// The generator `zeta` of the unramified part (a root of the Conway polynomial).
    pub fn generator(ctx: &Arc<FieldContext>) -> Self {
        Self::from_integral_raw(ctx, ctx.raw_generator(), None)
    }

    /// `p^k`.
    pub fn p_power(ctx: &Arc<FieldContext>, k: i64) -> Self {
        Self::pi_power(ctx, k * ctx.ramification() as i64)
    }

    /// `pi^k`, in ticks.
    pub fn pi_power(ctx: &Arc<FieldContext>, k: i64) -> Self {
        FieldElement {
            ctx: Arc::clone(ctx),
            repr: Repr::Nonzero {
                val: k,
                unit: ctx.unit_from_raw(ctx.raw_one()),
                rel: ctx.full_ticks(),
            },
        }
    }

    /// Element with a known lower bound `O(pi^abs)` on its error, from an
    /// integral raw value of `Z_p[zeta]` (digit 0 only).
    pub(crate) fn from_integral_raw(ctx: &Arc<FieldContext>, raw: Coeffs, abs: Option<i64>) -> Self {
        let unit = ctx.unit_from_raw(raw);
        let full = ctx.full_ticks();
        let abs_ticks = abs.unwrap_or(full).min(full);
        Self::from_unit_digits(ctx, unit, 0, abs_ticks)
    }

    /// Normalize `pi^val * u` where `u` may be divisible by `pi`, with the whole
    /// value known modulo `pi^abs`.
    pub(crate) fn from_unit_digits(ctx: &Arc<FieldContext>, u: Coeffs, val: i64, abs: i64) -> Self {
        let limit = abs - val;
        match ctx.u_pi_val(&u, limit.max(0)) {
            None => FieldElement { ctx: Arc::clone(ctx), repr: Repr::Zero { abs: Some(abs) } },
            Some(k) => {
                let unit = ctx.u_unshift(&u, k);
                let v = val + k;
                FieldElement {
                    ctx: Arc::clone(ctx),
                    repr: Repr::Nonzero { val: v, unit, rel: abs - v },
                }
            }
        }
    }

    /// Build from a rational valuation and raw unit digit vectors (JSON layout).
    pub fn from_parts(ctx: &Arc<FieldContext>, valuation: Valuation, unit: &[Vec<BigInt>]) -> Result<Self> {
        let v = match valuation {
            Valuation::Infinity => return Ok(Self::zero(ctx)),
            Valuation::Finite(v) => v,
        };
        let d = ctx.ramification() as i64;
        let ticks = v * Rational64::from_integer(d);
        if !ticks.is_integer() {
            return Err(Error::Parse(format!("valuation {v} not in (1/{d})Z")));
        }
        if unit.len() != ctx.digits() || unit.iter().any(|u| u.len() != ctx.degree()) {
            return Err(Error::Parse("unit digit layout does not match the context".into()));
        }
        let flat: Coeffs = unit
            .iter()
            .flatten()
            .map(|c| c.mod_floor(ctx.modulus()))
            .collect();
        let val = ticks.to_integer();
        let el = Self::from_unit_digits(ctx, flat, val, val + ctx.full_ticks());
        match &el.repr {
            Repr::Nonzero { val: w, .. } if *w == val => Ok(el),
            _ => Err(Error::Parse("unit part is divisible by the uniformizer".into())),
        }
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    /// Exact zero or zero at the current precision.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: None })
    }

    pub fn valuation(&self) -> Valuation {
        match self.repr {
            Repr::Zero { .. } => Valuation::Infinity,
            Repr::Nonzero { val, .. } => {
                Valuation::Finite(Rational64::new(val, self.ctx.ramification() as i64))
            }
        }
    }

    /// Valuation in ticks of `1/d`, `None` for (possibly inexact) zero.
    pub fn val_ticks(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { val, .. } => Some(val),
        }
    }

    /// Absolute precision in ticks; `None` for an exact zero.
    pub fn abs_ticks(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { abs } => abs,
            Repr::Nonzero { val, rel, .. } => Some(val + rel),
        }
    }

    /// Relative precision in ticks (digits of the unit that are known).
    pub fn rel_ticks(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { rel, .. } => Some(rel),
        }
    }

    /// Digits lost relative to the full working precision.
    pub fn precision_loss(&self) -> i64 {
        match self.repr {
            Repr::Zero { abs: None } => 0,
            Repr::Zero { .. } => self.ctx.full_ticks(),
            Repr::Nonzero { rel, .. } => self.ctx.full_ticks() - rel,
        }
    }

    /// Unit digits (outer index = pi-digit, inner = zeta coefficients).
    pub fn unit_digits(&self) -> Option<Vec<Vec<BigInt>>> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { unit, .. } => {
                let m = self.ctx.degree();
                Some(unit.chunks(m).map(|c| c.to_vec()).collect())
            }
        }
    }

    fn check(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.same_field(&other.ctx),
            "mixed field contexts"
        );
    }

    fn with_repr(&self, repr: Repr) -> Self {
        FieldElement { ctx: Arc::clone(&self.ctx), repr }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { val, unit, rel } => self.with_repr(Repr::Nonzero {
                val: *val,
                unit: self.ctx.u_neg(unit),
                rel: *rel,
            }),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => self.with_repr(Repr::Zero {
                abs: match (a, b) {
                    (None, x) | (x, None) => *x,
                    (Some(x), Some(y)) => Some((*x).min(*y)),
                },
            }),
            (Repr::Zero { abs }, _) => other.absorb(*abs),
            (_, Repr::Zero { abs }) => self.absorb(*abs),
            (
                Repr::Nonzero { val: va, unit: ua, rel: ra },
                Repr::Nonzero { val: vb, unit: ub, rel: rb },
            ) => {
                let ((vl, ul, rl), (vh, uh, rh)) = if va <= vb {
                    ((*va, ua, *ra), (*vb, ub, *rb))
                } else {
                    ((*vb, ub, *rb), (*va, ua, *ra))
                };
                let abs = (vl + rl).min(vh + rh);
                let shift = vh - vl;
                if shift >= rl {
                    return self.with_repr(Repr::Nonzero { val: vl, unit: ul.clone(), rel: abs - vl });
                }
                let sum = self.ctx.u_add(ul, &self.ctx.u_shift(uh, shift));
                Self::from_unit_digits(&self.ctx, sum, vl, abs)
            }
        }
    }

    fn absorb(&self, abs: Option<i64>) -> Self {
        let Some(k) = abs else { return self.clone() };
        match &self.repr {
            Repr::Zero { abs: a } => self.with_repr(Repr::Zero { abs: Some(a.map_or(k, |a| a.min(k))) }),
            Repr::Nonzero { val, unit, rel } => {
                if k <= *val {
                    self.with_repr(Repr::Zero { abs: Some(k) })
                } else {
                    self.with_repr(Repr::Nonzero { val: *val, unit: unit.clone(), rel: (*rel).min(k - val) })
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: None }, _) | (_, Repr::Zero { abs: None }) => {
                self.with_repr(Repr::Zero { abs: None })
            }
            (Repr::Zero { abs: Some(a) }, Repr::Zero { abs: Some(b) }) => {
                self.with_repr(Repr::Zero { abs: Some(a + b) })
            }
            (Repr::Zero { abs: Some(a) }, Repr::Nonzero { val, .. })
            | (Repr::Nonzero { val, .. }, Repr::Zero { abs: Some(a) }) => {
                self.with_repr(Repr::Zero { abs: Some(a + val) })
            }
            (
                Repr::Nonzero { val: va, unit: ua, rel: ra },
                Repr::Nonzero { val: vb, unit: ub, rel: rb },
            ) => self.with_repr(Repr::Nonzero {
                val: va + vb,
                unit: self.ctx.u_mul(ua, ub),
                rel: (*ra).min(*rb),
            }),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { abs: None } => Err(Error::DivisionByZero),
            Repr::Zero { .. } => Err(Error::precision("division by an element that is zero at precision")),
            Repr::Nonzero { val, unit, rel } => Ok(self.with_repr(Repr::Nonzero {
                val: -val,
                unit: self.ctx.u_inv(unit)?,
                rel: *rel,
            })),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.ctx);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Multiply by `pi^k` (ticks), exact bookkeeping.
    pub fn shift(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs } => self.with_repr(Repr::Zero { abs: abs.map(|a| a + k) }),
            Repr::Nonzero { val, unit, rel } => {
                self.with_repr(Repr::Nonzero { val: val + k, unit: unit.clone(), rel: *rel })
            }
        }
    }

    /// `sigma^k(x)`; Frobenius acts on the zeta coefficients and fixes `pi`.
    pub fn frobenius(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { val, unit, rel } => self.with_repr(Repr::Nonzero {
                val: *val,
                unit: self.ctx.u_frobenius(unit, k),
                rel: *rel,
            }),
        }
    }

    /// Equality at the precision of both operands.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Integral representative modulo `p^k` as raw coefficients (only for
    /// unramified contexts and elements of non-negative valuation).
    pub(crate) fn integral_raw(&self) -> Option<Coeffs> {
        if self.ctx.ramification() != 1 {
            return None;
        }
        match &self.repr {
            Repr::Zero { .. } => Some(self.ctx.raw_zero()),
            Repr::Nonzero { val, unit, .. } => {
                if *val < 0 {
                    return None;
                }
                if *val as u32 >= self.ctx.precision() {
                    return Some(self.ctx.raw_zero());
                }
                Some(self.ctx.raw_scale(unit, self.ctx.p_pow(*val as u32)))
            }
        }
    }

    /// Truncate to absolute precision `abs` ticks.
    pub fn truncate(&self, abs: i64) -> Self {
        self.absorb(Some(abs))
    }

    /// Residue class of the unit part (first digit) as small integers; `None` for zero.
    pub fn unit_residue(&self) -> Option<Vec<i64>> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { unit, .. } => Some(self.ctx.residue_of(unit)),
        }
    }

    /// Are all zeta coefficients of every digit integers in the prime field
    /// subring (i.e. is the element in `Q_p(pi)`)?
    pub fn is_in_prime_subfield(&self) -> bool {
        self.frobenius(1).eq_at_precision(self)
    }

    /// Re-express a small integer if the element is one (used for display).
    pub fn to_small_int(&self) -> Option<i64> {
        let raw = self.integral_raw()?;
        if raw[1..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let m = self.ctx.modulus();
        let c = &raw[0];
        let half: BigInt = m / 2;
        let signed = if c > &half { c - m } else { c.clone() };
        if signed.abs() < BigInt::from(1_000_000_000i64) {
            num_traits::ToPrimitive::to_i64(&signed)
        } else {
            None
        }
    }
}

impl FieldElement {
    /// Embed into a larger context `Q_{p^m'}(pi')` with `m | m'`, `d | d'`.
    ///
    /// The generator maps to the Conway-compatible root of its minimal
    /// polynomial and `pi` maps to `pi'^{d'/d}`.
    pub fn extend_to(&self, target: &Arc<FieldContext>) -> Result<Self> {
        let src = &self.ctx;
        let (m, d) = (src.degree(), src.ramification());
        let (m2, d2) = (target.degree(), target.ramification());
        if src.p() != target.p() || m2 % m != 0 || d2 % d != 0 {
            return Err(Error::IncompatibleTower(format!(
                "cannot embed Q_{{{}^{m}}}(pi^{d}) into Q_{{{}^{m2}}}(pi^{d2})",
                src.p(),
                target.p()
            )));
        }
        if src.precision() != target.precision() {
            return Err(Error::IncompatibleTower("precisions differ".into()));
        }
        if Arc::ptr_eq(src, target) {
            return Ok(self.clone());
        }
        let e = (d2 / d) as i64;
        let (val, unit, rel) = match &self.repr {
            Repr::Zero { abs } => {
                return Ok(FieldElement {
                    ctx: Arc::clone(target),
                    repr: Repr::Zero { abs: abs.map(|a| a * e) },
                })
            }
            Repr::Nonzero { val, unit, rel } => (*val, unit, *rel),
        };
        let powers = target.raw_embedding_powers(src)?;
        let mut out = vec![BigInt::zero(); target.digits() * m2];
        for j in 0..src.digits() {
            let digit = src.digit(unit, j);
            let mut acc = target.raw_zero();
            for (c, zp) in digit.iter().zip(&powers) {
                if !c.is_zero() {
                    acc = target.raw_add(&acc, &target.raw_scale(zp, c));
                }
            }
            let t = j * e as usize;
            out[t * m2..(t + 1) * m2].clone_from_slice(&acc);
        }
        Ok(Self::from_unit_digits(target, out, val * e, (val + rel) * e))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.eq_at_precision(other)
    }
}

/// Serialized field element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldElementJson {
    pub valuation: String,
    pub unit: Vec<Vec<BigIntString>>,
}

/// Big integers travel as JSON numbers when small and strings otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigIntString(pub BigInt);

impl Serialize for BigIntString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match num_traits::ToPrimitive::to_i64(&self.0) {
            Some(v) if v.unsigned_abs() < (1u64 << 53) => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for BigIntString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(|x| BigIntString(BigInt::from(x)))
                .ok_or_else(|| serde::de::Error::custom("integer expected")),
            serde_json::Value::String(s) => s
                .parse::<BigInt>()
                .map(BigIntString)
                .map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("integer expected")),
        }
    }
}

pub fn format_rational(r: Rational64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Rational64::new(n, d))
    } else {
        Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?))
    }
}

impl FieldElement {
    pub fn to_json(&self) -> FieldElementJson {
        match self.unit_digits() {
            None => FieldElementJson { valuation: "INFINITY".into(), unit: Vec::new() },
            Some(digits) => FieldElementJson {
                valuation: format_rational(self.valuation().finite().unwrap_or_default()),
                unit: digits
                    .into_iter()
                    .map(|d| d.into_iter().map(BigIntString).collect())
                    .collect(),
            },
        }
    }

    pub fn from_json(ctx: &Arc<FieldContext>, json: &FieldElementJson) -> Result<Self> {
        if json.valuation == "INFINITY" {
            return Ok(Self::zero(ctx));
        }
        let v = parse_rational(&json.valuation)?;
        let unit: Vec<Vec<BigInt>> = json
            .unit
            .iter()
            .map(|d| d.iter().map(|c| c.0.clone()).collect())
            .collect();
        Self::from_parts(ctx, Valuation::Finite(v), &unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_field;

    fn q4() -> Arc<FieldContext> {
        make_field(2, 2, 20, 1).unwrap()
    }

    #[test]
    fn square_of_one_plus_zeta() {
        let ctx = q4();
        let x = FieldElement::from_poly(&ctx, &[1, 1]);
        assert_eq!(x.mul(&x), FieldElement::generator(&ctx));
        assert_eq!(x.valuation(), Valuation::Finite(Rational64::from_integer(0)));
    }

    #[test]
    fn frobenius_of_zeta() {
        let ctx = q4();
        let z = FieldElement::generator(&ctx);
        assert_eq!(z.frobenius(1), FieldElement::from_poly(&ctx, &[-1, -1]));
        assert_eq!(z.frobenius(2), z);
        let seven = FieldElement::from_int(&ctx, 7);
        assert_eq!(seven.frobenius(1), seven);
    }

    #[test]
    fn valuations_and_division() {
        let ctx = make_field(5, 1, 20, 1).unwrap();
        let p = FieldElement::from_int(&ctx, 5);
        assert_eq!(p.valuation(), Valuation::Finite(1.into()));
        assert!(FieldElement::zero(&ctx).valuation().is_infinite());
        assert_eq!(p.div(&p).unwrap(), FieldElement::one(&ctx));
        assert_eq!(FieldElement::zero(&ctx).inv().unwrap_err(), Error::DivisionByZero);
        let x = FieldElement::from_int(&ctx, 12);
        assert_eq!(x.add(&FieldElement::zero(&ctx)), x);
    }

    #[test]
    fn cancellation_tracks_loss() {
        let ctx = make_field(3, 1, 10, 1).unwrap();
        let a = FieldElement::from_int(&ctx, 1);
        let b = FieldElement::from_int(&ctx, 1 + 27);
        let diff = b.sub(&a);
        assert_eq!(diff.val_ticks(), Some(3));
        assert_eq!(diff.rel_ticks(), Some(7));
        let zero = a.sub(&a);
        assert!(zero.is_zero() && !zero.is_exact_zero());
        assert_eq!(zero.abs_ticks(), Some(10));
        assert!(zero.inv().is_err());
    }

    #[test]
    fn eisenstein_uniformizer() {
        let base = make_field(3, 1, 20, 1).unwrap();
        let ctx = base.with_ramification(2).unwrap();
        let pi = FieldElement::pi_power(&ctx, 1);
        assert_eq!(pi.valuation(), Valuation::Finite(Rational64::new(1, 2)));
        assert_eq!(pi.mul(&pi), FieldElement::from_int(&ctx, 3));
        let x = pi.add(&FieldElement::one(&ctx));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), FieldElement::one(&ctx));
    }

    #[test]
    fn extension_preserves_valuation() {
        let q2 = make_field(2, 1, 20, 1).unwrap();
        let q4 = make_field(2, 2, 20, 1).unwrap();
        assert_eq!(FieldElement::from_int(&q2, 3).extend_to(&q4).unwrap(), FieldElement::from_int(&q4, 3));

        let q8 = make_field(2, 6, 20, 1).unwrap();
        let z = FieldElement::generator(&q4);
        let image = z.extend_to(&q8).unwrap();
        // the image satisfies x^2 + x + 1 = 0
        let one = FieldElement::one(&q8);
        assert!(image.mul(&image).add(&image).add(&one).is_zero());
        // frobenius commutes with the embedding
        assert_eq!(z.frobenius(1).extend_to(&q8).unwrap(), image.frobenius(1));

        let r2 = make_field(3, 1, 20, 2).unwrap();
        let r4 = make_field(3, 1, 20, 4).unwrap();
        let pi = FieldElement::pi_power(&r2, 1);
        assert_eq!(pi.extend_to(&r4).unwrap(), FieldElement::pi_power(&r4, 2));
        assert!(matches!(pi.extend_to(&q4), Err(Error::IncompatibleTower(_))));
    }

    #[test]
    fn json_round_trip() {
        let ctx = make_field(3, 2, 20, 2).unwrap();
        let x = FieldElement::from_poly(&ctx, &[2, 1]).mul(&FieldElement::pi_power(&ctx, 3));
        let j = x.to_json();
        assert_eq!(j.valuation, "3/2");
        assert_eq!(FieldElement::from_json(&ctx, &j).unwrap(), x);
        let z = FieldElement::zero(&ctx).to_json();
        assert_eq!(z.valuation, "INFINITY");
    }
}
