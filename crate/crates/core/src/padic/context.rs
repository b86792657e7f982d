use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::conway::CONWAY;
use crate::error::{Error, Result};

/// Coefficient vector of an element of `Z_p[zeta]` (length `m`, entries in `[0, p^N)`).
pub(crate) type Coeffs = Vec<BigInt>;

/// The field `Q_{p^m}(pi)` with `pi^d = p`, truncated at `N` p-adic digits.
///
/// The unramified part is `Z_p[zeta] / (f)` where `f` is the Conway polynomial
/// of `F_{p^m}`; Frobenius is determined by the Hensel-lifted image of `zeta`.
/// Contexts are immutable once built and are shared behind an `Arc`.
pub struct FieldContext {
    p: u64,
    degree: usize,
    precision: u32,
    ramification: u32,
    p_big: BigInt,
    modulus: BigInt,
    p_pows: Vec<BigInt>,
    minpoly: Vec<BigInt>,
    minpoly_small: Vec<i64>,
    // x^{m + k} mod f, k = 0..m-1
    reduction: Vec<Coeffs>,
    frob_gen: Coeffs,
    // frob_images[k][i] = (sigma^k zeta)^i
    frob_images: Vec<Vec<Coeffs>>,
    residue_order: BigInt,
    ramified: Mutex<HashMap<u32, Arc<FieldContext>>>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("p", &self.p)
            .field("m", &self.degree)
            .field("N", &self.precision)
            .field("d", &self.ramification)
            .finish()
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// Shipped Conway polynomial for `(p, m)`, constant term first.
pub fn conway_polynomial(p: u64, m: usize) -> Option<&'static [u8]> {
    CONWAY
        .iter()
        .find(|(q, n, _)| *q == p && *n == m)
        .map(|(_, _, c)| *c)
}

type ContextKey = (u64, usize, u32);

fn context_cache() -> &'static Mutex<HashMap<ContextKey, Arc<FieldContext>>> {
    static CACHE: OnceLock<Mutex<HashMap<ContextKey, Arc<FieldContext>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Build (or fetch the shared instance of) the context `Q_{p^m}(p^{1/d})` at
/// precision `N`.
pub fn make_field(p: u64, m: usize, precision: u32, ramification: u32) -> Result<Arc<FieldContext>> {
    if ramification == 0 {
        return Err(Error::InvalidField("ramification d must be at least 1".into()));
    }
    let key = (p, m, precision);
    let cached = context_cache().lock().expect("context cache poisoned").get(&key).cloned();
    let base = match cached {
        Some(ctx) => ctx,
        None => {
            let ctx = FieldContext::new(p, m, precision, 1)?;
            context_cache()
                .lock()
                .expect("context cache poisoned")
                .entry(key)
                .or_insert(ctx)
                .clone()
        }
    };
    base.with_ramification(ramification)
}

impl FieldContext {
    pub(crate) fn new(p: u64, m: usize, precision: u32, ramification: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidField("degree m must be at least 1".into()));
        }
        if ramification == 0 {
            return Err(Error::InvalidField("ramification d must be at least 1".into()));
        }
        if precision < 4 {
            return Err(Error::PrecisionTooSmall(precision));
        }
        let conway = conway_polynomial(p, m).ok_or(Error::NoConwayPolynomial { p, m })?;
        let p_big = BigInt::from(p);
        let mut p_pows = Vec::with_capacity(precision as usize + 1);
        let mut acc = BigInt::one();
        for _ in 0..=precision {
            p_pows.push(acc.clone());
            acc *= &p_big;
        }
        let modulus = p_pows[precision as usize].clone();
        let minpoly: Vec<BigInt> = conway.iter().map(|&c| BigInt::from(c)).collect();
        let minpoly_small: Vec<i64> = conway.iter().map(|&c| c as i64).collect();

        let mut ctx = FieldContext {
            p,
            degree: m,
            precision,
            ramification,
            p_big,
            modulus,
            p_pows,
            minpoly,
            minpoly_small,
            reduction: Vec::new(),
            frob_gen: Vec::new(),
            frob_images: Vec::new(),
            residue_order: BigInt::from(p).pow(m as u32),
            ramified: Mutex::new(HashMap::new()),
        };
        ctx.reduction = ctx.build_reduction();
        ctx.frob_gen = ctx.lift_frobenius()?;
        ctx.frob_images = ctx.build_frobenius_images();
        Ok(Arc::new(ctx))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Unramified degree `m`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Precision `N` in p-adic digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Ramification index `d` of the Eisenstein extension `pi^d = p`.
    pub fn ramification(&self) -> u32 {
        self.ramification
    }

    /// Full relative precision in valuation ticks (units of `1/d`).
    pub fn full_ticks(&self) -> i64 {
        self.precision as i64 * self.ramification as i64
    }

    pub fn minpoly(&self) -> &[i64] {
        &self.minpoly_small
    }

    /// Coefficients of `sigma(zeta)` in the power basis, reduced mod `p^N`.
    pub fn frobenius_generator(&self) -> &[BigInt] {
        &self.frob_gen
    }

    pub(crate) fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub(crate) fn p_pow(&self, k: u32) -> &BigInt {
        &self.p_pows[k as usize]
    }

    /// Header used in serialized payloads.
    pub fn header(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "m": self.degree,
            "N": self.precision,
            "d": self.ramification,
        })
    }

    /// Same unramified field and precision, with `pi^d = p` adjoined.
    ///
    /// Memoized per `d`; only valid on an unramified context.
    pub fn with_ramification(self: &Arc<Self>, d: u32) -> Result<Arc<FieldContext>> {
        if d == self.ramification {
            return Ok(Arc::clone(self));
        }
        if self.ramification != 1 {
            return Err(Error::IncompatibleTower(
                "ramified contexts are built from the unramified base".into(),
            ));
        }
        let mut cache = self.ramified.lock().expect("context cache poisoned");
        if let Some(ctx) = cache.get(&d) {
            return Ok(Arc::clone(ctx));
        }
        let ctx = FieldContext::new(self.p, self.degree, self.precision, d)?;
        cache.insert(d, Arc::clone(&ctx));
        Ok(ctx)
    }

    /// The unramified context underlying this one.
    pub fn unramified(&self) -> Result<Arc<FieldContext>> {
        make_field(self.p, self.degree, self.precision, 1)
    }

    pub fn same_field(&self, other: &FieldContext) -> bool {
        self.p == other.p
            && self.degree == other.degree
            && self.precision == other.precision
            && self.ramification == other.ramification
    }

    // ---- raw arithmetic on Z_p[zeta] / p^N -------------------------------

    pub(crate) fn raw_zero(&self) -> Coeffs {
        vec![BigInt::zero(); self.degree]
    }

    pub(crate) fn raw_one(&self) -> Coeffs {
        let mut v = self.raw_zero();
        v[0] = BigInt::one();
        v
    }

    pub(crate) fn raw_from_int(&self, c: &BigInt) -> Coeffs {
        let mut v = self.raw_zero();
        v[0] = c.mod_floor(&self.modulus);
        v
    }

    pub(crate) fn raw_generator(&self) -> Coeffs {
        if self.degree == 1 {
            // zeta is a root of x + c_0
            return self.raw_from_int(&(-BigInt::from(self.minpoly_small[0])));
        }
        let mut v = self.raw_zero();
        v[1] = BigInt::one();
        v
    }

    fn normalize(&self, v: &mut [BigInt]) {
        for c in v.iter_mut() {
            if c.is_negative() || *c >= self.modulus {
                *c = c.mod_floor(&self.modulus);
            }
        }
    }

    pub(crate) fn raw_add(&self, a: &[BigInt], b: &[BigInt]) -> Coeffs {
        let mut v: Coeffs = a.iter().zip(b).map(|(x, y)| x + y).collect();
        for c in v.iter_mut() {
            if *c >= self.modulus {
                *c -= &self.modulus;
            }
        }
        v
    }

    pub(crate) fn raw_sub(&self, a: &[BigInt], b: &[BigInt]) -> Coeffs {
        let mut v: Coeffs = a.iter().zip(b).map(|(x, y)| x - y).collect();
        for c in v.iter_mut() {
            if c.is_negative() {
                *c += &self.modulus;
            }
        }
        v
    }

    pub(crate) fn raw_neg(&self, a: &[BigInt]) -> Coeffs {
        a.iter()
            .map(|x| if x.is_zero() { BigInt::zero() } else { &self.modulus - x })
            .collect()
    }

    pub(crate) fn raw_scale(&self, a: &[BigInt], c: &BigInt) -> Coeffs {
        let mut v: Coeffs = a.iter().map(|x| x * c).collect();
        self.normalize(&mut v);
        v
    }

    fn is_scalar(a: &[BigInt]) -> bool {
        a[1..].iter().all(|c| c.is_zero())
    }

    pub(crate) fn raw_mul(&self, a: &[BigInt], b: &[BigInt]) -> Coeffs {
        let m = self.degree;
        if m == 1 {
            return vec![(&a[0] * &b[0]).mod_floor(&self.modulus)];
        }
        if Self::is_scalar(a) {
            return self.raw_scale(b, &a[0]);
        }
        if Self::is_scalar(b) {
            return self.raw_scale(a, &b[0]);
        }
        let mut prod = vec![BigInt::zero(); 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let (low, high) = prod.split_at_mut(m);
        for (k, c) in high.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = c.mod_floor(&self.modulus);
            for (i, r) in self.reduction[k].iter().enumerate() {
                if !r.is_zero() {
                    low[i] += &c * r;
                }
            }
        }
        let mut out = low.to_vec();
        self.normalize(&mut out);
        out
    }

    pub(crate) fn raw_pow(&self, a: &[BigInt], e: &BigInt) -> Coeffs {
        let mut result = self.raw_one();
        let mut base = a.to_vec();
        let mut e = e.clone();
        let two = BigInt::from(2);
        while !e.is_zero() {
            if e.is_odd() {
                result = self.raw_mul(&result, &base);
            }
            e /= &two;
            if !e.is_zero() {
                base = self.raw_mul(&base, &base);
            }
        }
        result
    }

    /// p-adic valuation of a raw element, `None` when it vanishes mod `p^N`.
    pub(crate) fn raw_vp(&self, a: &[BigInt]) -> Option<u32> {
        let mut best: Option<u32> = None;
        for c in a {
            if c.is_zero() {
                continue;
            }
            let v = self.vp_int(c);
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        best
    }

    pub(crate) fn vp_int(&self, c: &BigInt) -> u32 {
        if c.is_zero() {
            return self.precision;
        }
        if self.p == 2 {
            return c.trailing_zeros().map(|t| t as u32).unwrap_or(self.precision).min(self.precision);
        }
        let mut v = 0;
        let mut x = c.clone();
        while v < self.precision {
            let (q, r) = x.div_rem(&self.p_big);
            if !r.is_zero() {
                break;
            }
            x = q;
            v += 1;
        }
        v
    }

    /// Exact division of a raw element by `p^k` (caller guarantees divisibility).
    pub(crate) fn raw_div_p_pow(&self, a: &[BigInt], k: u32) -> Coeffs {
        if k == 0 {
            return a.to_vec();
        }
        let d = &self.p_pows[k as usize];
        a.iter().map(|c| c / d).collect()
    }

    pub(crate) fn raw_mod_p_pow(&self, a: &[BigInt], k: u32) -> Coeffs {
        let d = &self.p_pows[k as usize];
        a.iter().map(|c| c.mod_floor(d)).collect()
    }

    /// Inverse of a raw unit (not divisible by p).
    pub(crate) fn raw_inv(&self, a: &[BigInt]) -> Result<Coeffs> {
        if self.raw_vp(&self.raw_mod_p_pow(a, 1)).is_none() {
            return Err(Error::DivisionByZero);
        }
        if self.degree == 1 {
            let inv = a[0]
                .modinv(&self.modulus)
                .ok_or(Error::DivisionByZero)?;
            return Ok(vec![inv]);
        }
        let e = &self.residue_order - BigInt::from(2);
        let mut w = self.raw_mod_p_pow(&self.raw_pow(a, &e), 1);
        let one = self.raw_one();
        let two = self.raw_from_int(&BigInt::from(2));
        let mut iterations = 0;
        loop {
            let aw = self.raw_mul(a, &w);
            if aw == one {
                return Ok(w);
            }
            iterations += 1;
            if iterations > 64 {
                return Err(Error::precision("unit inversion did not converge"));
            }
            w = self.raw_mul(&w, &self.raw_sub(&two, &aw));
        }
    }

    /// Evaluate an integer polynomial (constant first) at a raw element.
    pub(crate) fn raw_eval_int_poly(&self, f: &[BigInt], x: &[BigInt]) -> Coeffs {
        let mut acc = self.raw_zero();
        for c in f.iter().rev() {
            acc = self.raw_mul(&acc, x);
            acc[0] = (&acc[0] + c).mod_floor(&self.modulus);
        }
        acc
    }

    /// Hensel-lift a root of the integer polynomial `f` from a seed that is a
    /// simple root modulo p.
    pub(crate) fn raw_hensel_root(&self, f: &[BigInt], seed: &[BigInt]) -> Result<Coeffs> {
        let deriv: Vec<BigInt> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        let mut r = seed.to_vec();
        let mut rounds = 0;
        loop {
            let fr = self.raw_eval_int_poly(f, &r);
            if fr.iter().all(|c| c.is_zero()) {
                return Ok(r);
            }
            rounds += 1;
            if rounds > 64 {
                return Err(Error::precision("Hensel lifting of a root did not converge"));
            }
            let dr = self.raw_eval_int_poly(&deriv, &r);
            let inv = self.raw_inv(&dr)?;
            r = self.raw_sub(&r, &self.raw_mul(&fr, &inv));
        }
    }

    fn build_reduction(&self) -> Vec<Coeffs> {
        let m = self.degree;
        if m == 1 {
            return Vec::new();
        }
        // x^m = -sum f_i x^i
        let mut cur: Coeffs = self.minpoly[..m].iter().map(|c| -c).collect();
        self.normalize(&mut cur);
        let mut table = vec![cur.clone()];
        for _ in 1..m - 1 {
            // multiply by x
            let top = cur[m - 1].clone();
            let mut next = vec![BigInt::zero(); m];
            for i in (1..m).rev() {
                next[i] = cur[i - 1].clone();
            }
            for (x, c) in next.iter_mut().zip(&self.minpoly[..m]) {
                *x -= &top * c;
            }
            self.normalize(&mut next);
            table.push(next.clone());
            cur = next;
        }
        table
    }

    fn lift_frobenius(&self) -> Result<Coeffs> {
        let zeta = self.raw_generator();
        if self.degree == 1 {
            return Ok(zeta);
        }
        let seed = self.raw_mod_p_pow(&self.raw_pow(&zeta, &self.p_big), 1);
        self.raw_hensel_root(&self.minpoly, &seed)
    }

    fn powers_of(&self, x: &[BigInt]) -> Vec<Coeffs> {
        let mut out = Vec::with_capacity(self.degree);
        let mut acc = self.raw_one();
        for _ in 0..self.degree {
            out.push(acc.clone());
            acc = self.raw_mul(&acc, x);
        }
        out
    }

    fn build_frobenius_images(&self) -> Vec<Vec<Coeffs>> {
        let mut images = vec![self.powers_of(&self.raw_generator())];
        if self.degree == 1 {
            return images;
        }
        images.push(self.powers_of(&self.frob_gen));
        let mut gen = self.frob_gen.clone();
        for _ in 2..self.degree {
            gen = self.raw_apply_images(&images[1], &gen);
            images.push(self.powers_of(&gen));
        }
        images
    }

    fn raw_apply_images(&self, images: &[Coeffs], a: &[BigInt]) -> Coeffs {
        if self.degree == 1 {
            return a.to_vec();
        }
        let mut out = vec![BigInt::zero(); self.degree];
        for (coef, img) in a.iter().zip(images) {
            if coef.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(img) {
                *o += coef * x;
            }
        }
        self.normalize(&mut out);
        out
    }

    /// `sigma^k` on a raw element of `Z_p[zeta]`.
    pub(crate) fn raw_frobenius(&self, a: &[BigInt], k: i64) -> Coeffs {
        let m = self.degree as i64;
        let k = k.rem_euclid(m) as usize;
        if k == 0 {
            return a.to_vec();
        }
        self.raw_apply_images(&self.frob_images[k], a)
    }

    /// Powers `1, z, ..., z^{m-1}` of the image in this field of the
    /// generator of `source`.
    pub(crate) fn raw_embedding_powers(&self, source: &FieldContext) -> Result<Vec<Coeffs>> {
        let m = source.degree;
        if m == self.degree {
            return Ok(self.powers_of(&self.raw_generator())[..m].to_vec());
        }
        if m == 1 {
            return Ok(vec![self.raw_one()]);
        }
        let q_big = BigInt::from(self.p).pow(self.degree as u32) - BigInt::one();
        let q_small = BigInt::from(self.p).pow(m as u32) - BigInt::one();
        let seed = self.raw_mod_p_pow(&self.raw_pow(&self.raw_generator(), &(q_big / q_small)), 1);
        let f: Vec<BigInt> = source.minpoly.clone();
        let root = self.raw_hensel_root(&f, &seed)?;
        Ok(self.powers_of(&root)[..m].to_vec())
    }

    // ---- unit digits: sum_{j<d} u_j pi^j, flattened as d blocks of m ----------

    pub(crate) fn digits(&self) -> usize {
        self.ramification as usize
    }

    pub(crate) fn unit_from_raw(&self, a: Coeffs) -> Coeffs {
        let mut v = a;
        v.resize(self.degree * self.digits(), BigInt::zero());
        v
    }

    pub(crate) fn digit<'a>(&self, u: &'a [BigInt], j: usize) -> &'a [BigInt] {
        &u[j * self.degree..(j + 1) * self.degree]
    }

    pub(crate) fn u_add(&self, a: &[BigInt], b: &[BigInt]) -> Coeffs {
        self.raw_add(a, b)
    }

    pub(crate) fn u_neg(&self, a: &[BigInt]) -> Coeffs {
        self.raw_neg(a)
    }

    pub(crate) fn u_mul(&self, a: &[BigInt], b: &[BigInt]) -> Coeffs {
        let d = self.digits();
        if d == 1 {
            return self.raw_mul(a, b);
        }
        let m = self.degree;
        let mut out = vec![BigInt::zero(); d * m];
        for i in 0..d {
            let ai = self.digit(a, i);
            if ai.iter().all(|c| c.is_zero()) {
                continue;
            }
            for j in 0..d {
                let bj = self.digit(b, j);
                if bj.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let mut prod = self.raw_mul(ai, bj);
                let mut k = i + j;
                if k >= d {
                    k -= d;
                    prod = self.raw_scale(&prod, &self.p_big);
                }
                for (o, x) in out[k * m..(k + 1) * m].iter_mut().zip(prod) {
                    *o += x;
                }
            }
        }
        self.normalize(&mut out);
        out
    }

    /// Multiply unit digits by `pi^k`, `k >= 0`.
    pub(crate) fn u_shift(&self, a: &[BigInt], k: i64) -> Coeffs {
        debug_assert!(k >= 0);
        let d = self.digits() as i64;
        let m = self.degree;
        let q = k.div_euclid(d) as u32;
        let r = k.rem_euclid(d) as usize;
        let base = if q > 0 {
            if q >= self.precision {
                return vec![BigInt::zero(); a.len()];
            }
            self.raw_scale(a, &self.p_pows[q as usize])
        } else {
            a.to_vec()
        };
        if r == 0 {
            return base;
        }
        let dd = d as usize;
        let mut out = vec![BigInt::zero(); dd * m];
        for j in 0..dd {
            let src = &base[j * m..(j + 1) * m];
            let mut t = j + r;
            let wrapped = t >= dd;
            if wrapped {
                t -= dd;
            }
            for (o, x) in out[t * m..(t + 1) * m].iter_mut().zip(src) {
                *o = if wrapped { x * &self.p_big } else { x.clone() };
            }
        }
        self.normalize(&mut out);
        out
    }

    /// Divide unit digits by `pi^k` where divisibility holds.
    pub(crate) fn u_unshift(&self, a: &[BigInt], k: i64) -> Coeffs {
        debug_assert!(k >= 0);
        let d = self.digits() as i64;
        let m = self.degree;
        let q = k.div_euclid(d) as u32;
        let r = k.rem_euclid(d) as usize;
        let base = if q > 0 { self.raw_div_p_pow(a, q) } else { a.to_vec() };
        if r == 0 {
            return base;
        }
        let dd = d as usize;
        let mut out = vec![BigInt::zero(); dd * m];
        for j in 0..dd {
            let src = &base[j * m..(j + 1) * m];
            if j >= r {
                let t = j - r;
                out[t * m..(t + 1) * m].clone_from_slice(src);
            } else {
                // u_j pi^j / pi^r = (u_j / p) pi^{d + j - r}
                let t = dd + j - r;
                for (o, x) in out[t * m..(t + 1) * m].iter_mut().zip(src) {
                    *o = x / &self.p_big;
                }
            }
        }
        out
    }

    /// pi-adic valuation (in ticks) of unit digits, `None` if at least `limit`.
    pub(crate) fn u_pi_val(&self, a: &[BigInt], limit: i64) -> Option<i64> {
        let d = self.digits();
        let mut best: Option<i64> = None;
        for j in 0..d {
            if let Some(v) = self.raw_vp(self.digit(a, j)) {
                let t = v as i64 * d as i64 + j as i64;
                best = Some(best.map_or(t, |b: i64| b.min(t)));
            }
        }
        best.filter(|&t| t < limit)
    }

    pub(crate) fn u_inv(&self, a: &[BigInt]) -> Result<Coeffs> {
        let d = self.digits();
        let w0 = self.raw_inv(self.digit(a, 0))?;
        if d == 1 {
            return Ok(w0);
        }
        let mut w = self.unit_from_raw(w0);
        let one = self.unit_from_raw(self.raw_one());
        let two = self.unit_from_raw(self.raw_from_int(&BigInt::from(2)));
        for _ in 0..80 {
            let aw = self.u_mul(a, &w);
            if aw == one {
                return Ok(w);
            }
            w = self.u_mul(&w, &self.raw_sub(&two, &aw));
        }
        Err(Error::precision("unit inversion did not converge"))
    }

    pub(crate) fn u_frobenius(&self, a: &[BigInt], k: i64) -> Coeffs {
        let m = self.degree;
        let mut out = Vec::with_capacity(a.len());
        for j in 0..self.digits() {
            out.extend(self.raw_frobenius(&a[j * m..(j + 1) * m], k));
        }
        out
    }

    /// Residue of the leading digit, as small integers.
    pub(crate) fn residue_of(&self, a: &[BigInt]) -> Vec<i64> {
        a[..self.degree]
            .iter()
            .map(|c| c.mod_floor(&self.p_big).to_i64().unwrap_or(0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(4, 1, 20, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(make_field(2, 1, 3, 1).unwrap_err(), Error::PrecisionTooSmall(3));
        assert!(matches!(make_field(2, 40, 20, 1), Err(Error::NoConwayPolynomial { .. })));
    }

    #[test]
    fn frobenius_generator_of_q4() {
        let ctx = make_field(2, 2, 20, 1).unwrap();
        assert_eq!(ctx.minpoly(), &[1, 1, 1]);
        // sigma(zeta) = -1 - zeta
        let m = BigInt::from(2).pow(20);
        let expected = vec![&m - 1, &m - 1];
        assert_eq!(ctx.frobenius_generator(), expected.as_slice());
    }

    #[test]
    fn frobenius_generator_is_a_root() {
        for (p, m) in [(2, 3), (3, 2), (5, 2), (2, 6), (7, 3)] {
            let ctx = make_field(p, m, 20, 1).unwrap();
            let f: Vec<BigInt> = ctx.minpoly().iter().map(|&c| BigInt::from(c)).collect();
            let v = ctx.raw_eval_int_poly(&f, ctx.frobenius_generator());
            assert!(v.iter().all(|c| c.is_zero()), "p={p} m={m}");
            // sigma^m(zeta) = zeta
            assert_eq!(ctx.raw_frobenius(&ctx.raw_generator(), m as i64), ctx.raw_generator());
        }
    }

    #[test]
    fn ramified_contexts_are_memoized() {
        let ctx = make_field(3, 1, 20, 1).unwrap();
        let a = ctx.with_ramification(2).unwrap();
        let b = ctx.with_ramification(2).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.full_ticks(), 40);
    }
}
