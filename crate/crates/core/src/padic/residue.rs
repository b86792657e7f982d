//! The residue field `F_{p^m}` and polynomials over it, used by Hensel lifting.

/// `F_p[x] / (f mod p)` with elements as coefficient vectors of length `m`.
#[derive(Clone, Debug)]
pub(crate) struct ResidueField {
    p: i64,
    m: usize,
    minpoly: Vec<i64>,
}

pub(crate) type Fq = Vec<i64>;
/// Polynomial over `F_q`, constant term first, no trailing zeros.
pub(crate) type FqPoly = Vec<Fq>;

impl ResidueField {
    pub fn new(p: u64, minpoly: &[i64]) -> Self {
        let p = p as i64;
        ResidueField { p, m: minpoly.len() - 1, minpoly: minpoly.iter().map(|c| c.rem_euclid(p)).collect() }
    }

    pub fn zero(&self) -> Fq {
        vec![0; self.m]
    }

    pub fn one(&self) -> Fq {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    pub fn is_zero(a: &Fq) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(x, y)| (x - y).rem_euclid(self.p)).collect()
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        let m = self.m;
        let mut prod = vec![0i64; 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..m {
                prod[k - m + i] = (prod[k - m + i] - c * self.minpoly[i]).rem_euclid(self.p);
            }
            prod[k] = 0;
        }
        prod.truncate(m);
        prod
    }

    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if Self::is_zero(a) {
            return None;
        }
        // a^(q-2)
        let mut e = (self.p as u128).pow(self.m as u32) - 2;
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            base = self.mul(&base, &base);
        }
        Some(acc)
    }

    fn trim(poly: &mut FqPoly) {
        while poly.last().is_some_and(Self::is_zero) {
            poly.pop();
        }
    }

    pub fn poly_mul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if Self::is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        Self::trim(&mut out);
        out
    }

    pub fn poly_sub(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let n = a.len().max(b.len());
        let zero = self.zero();
        let mut out: FqPoly = (0..n)
            .map(|i| self.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
            .collect();
        Self::trim(&mut out);
        out
    }

    /// Division with remainder by a nonzero polynomial.
    pub fn poly_divrem(&self, a: &FqPoly, b: &FqPoly) -> (FqPoly, FqPoly) {
        let mut rem = a.clone();
        Self::trim(&mut rem);
        let db = b.len() - 1;
        let lead_inv = self.inv(&b[db]).expect("nonzero divisor");
        if rem.len() < b.len() {
            return (Vec::new(), rem);
        }
        let mut quot = vec![self.zero(); rem.len() - db];
        while rem.len() >= b.len() {
            let k = rem.len() - b.len();
            let c = self.mul(rem.last().unwrap(), &lead_inv);
            for (i, bi) in b.iter().enumerate() {
                rem[k + i] = self.sub(&rem[k + i], &self.mul(&c, bi));
            }
            quot[k] = c;
            Self::trim(&mut rem);
        }
        Self::trim(&mut quot);
        (quot, rem)
    }

    /// Inverse of `a` modulo `modulus`, assuming coprimality.
    pub fn poly_inv_mod(&self, a: &FqPoly, modulus: &FqPoly) -> Option<FqPoly> {
        // extended Euclid tracking only the coefficient of `a`
        let (_, mut r0) = self.poly_divrem(a, modulus);
        let mut r1 = modulus.clone();
        let mut s0: FqPoly = vec![self.one()];
        let mut s1: FqPoly = Vec::new();
        while !r1.is_empty() {
            if r0.is_empty() {
                break;
            }
            let (q, r) = self.poly_divrem(&r0, &r1);
            let s = self.poly_sub(&s0, &self.poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is the gcd, s0 its coefficient
        if r0.len() != 1 {
            return None;
        }
        let c = self.inv(&r0[0])?;
        let s: FqPoly = s0.iter().map(|x| self.mul(x, &c)).collect();
        let (_, s) = self.poly_divrem(&s, modulus);
        Some(s)
    }
}
