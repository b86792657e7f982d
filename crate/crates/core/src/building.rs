//! The building of `GL_n(L)` as the space of diagonalizable norms
//! `alpha_{B,c}(sum y_i B_i) = max_i p^{-(val(y_i) + c_i)}`.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isocrystal::{IsoclineDecomposition, Isocrystal};
use crate::padic::element::{format_rational, parse_rational};
use crate::padic::{FieldContext, FieldElement, FieldElementJson, Matrix, Valuation};

pub const DEFAULT_DENOMINATOR_CAP: i64 = 12;

/// Distances are Euclidean on exponent coordinates with `val(p) = 1`.
pub const METRIC_CONVENTION: &str = "d^2 = sum_i r_i^2, standard inner product on exponent coordinates, val(p) = 1";

/// The norm `alpha_{B,c}`: columns of `B` are an orthogonal basis with
/// `alpha(B_i) = p^{-c_i}`.
#[derive(Clone, Debug)]
pub struct Norm {
    basis: Matrix,
    exponents: Vec<Rational64>,
    inverse: Matrix,
    cap: i64,
}

fn check_cap(exps: &[Rational64], cap: i64) -> Result<i64> {
    let den = exps.iter().fold(1i64, |acc, c| acc.lcm(c.denom()));
    if den > cap {
        return Err(Error::DenominatorCapExceeded { den, cap });
    }
    Ok(den)
}

fn ticks(v: Option<i64>) -> Option<Rational64> {
    v.map(Rational64::from_integer)
}

impl Norm {
    pub fn new(basis: Matrix, exponents: Vec<Rational64>) -> Result<Self> {
        Self::with_cap(basis, exponents, DEFAULT_DENOMINATOR_CAP)
    }

    pub fn with_cap(basis: Matrix, exponents: Vec<Rational64>, cap: i64) -> Result<Self> {
        if !basis.is_square() || basis.rows() != exponents.len() {
            return Err(Error::DimensionMismatch("basis and exponent vector disagree".into()));
        }
        if basis.context().ramification() != 1 {
            return Err(Error::InvalidField("norms are defined over the unramified field".into()));
        }
        check_cap(&exponents, cap)?;
        let inverse = basis.inverse()?;
        Ok(Norm { basis, exponents, inverse, cap })
    }

    /// The norm split by the standard basis.
    pub fn standard(ctx: &Arc<FieldContext>, exponents: Vec<Rational64>) -> Result<Self> {
        Self::new(Matrix::identity(ctx, exponents.len()), exponents)
    }

    fn derive(&self, basis: Matrix, exponents: Vec<Rational64>) -> Result<Self> {
        Self::with_cap(basis, exponents, self.cap)
    }

    fn with_same_basis(&self, exponents: Vec<Rational64>) -> Result<Self> {
        check_cap(&exponents, self.cap)?;
        Ok(Norm { basis: self.basis.clone(), exponents, inverse: self.inverse.clone(), cap: self.cap })
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        self.basis.context()
    }

    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn exponents(&self) -> &[Rational64] {
        &self.exponents
    }

    pub fn denominator_cap(&self) -> i64 {
        self.cap
    }

    /// `e` with `alpha(x) = p^{-e}`; infinite for `x = 0`.
    pub fn eval(&self, x: &[FieldElement]) -> Result<Valuation> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        let col = Matrix::from_columns(self.context(), x.len(), &[x.to_vec()]);
        let y = self.inverse.mul(&col)?;
        let mut best = Valuation::Infinity;
        for (i, c) in self.exponents.iter().enumerate() {
            if let Some(v) = y.get(i, 0).valuation().finite() {
                best = best.min(Valuation::Finite(v + c));
            }
        }
        Ok(best)
    }

    /// Sorted exponents, columns scaled so that their first nonzero entry is 1.
    pub fn canonicalize(&self) -> Result<Norm> {
        let n = self.dimension();
        let ctx = self.context();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let col = self.basis.column(j);
            let lead = col.iter().find(|x| !x.is_zero()).cloned().ok_or(Error::Singular)?;
            let inv = lead.inv()?;
            let scaled: Vec<FieldElement> = col.iter().map(|x| x.mul(&inv)).collect();
            let shift = lead.valuation().finite().unwrap_or_default();
            let key = serde_json::to_string(&scaled.iter().map(|x| x.to_json()).collect::<Vec<_>>())
                .unwrap_or_default();
            cols.push((self.exponents[j] - shift, key, scaled));
        }
        cols.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let exps = cols.iter().map(|c| c.0).collect();
        let vecs: Vec<Vec<FieldElement>> = cols.into_iter().map(|c| c.2).collect();
        self.derive(Matrix::from_columns(ctx, n, &vecs), exps)
    }

    /// `x -> p^mu alpha(x)`: exponents `c - mu`.
    pub fn scale_by_power(&self, mu: Rational64) -> Result<Norm> {
        self.with_same_basis(self.exponents.iter().map(|c| c - mu).collect())
    }

    /// `(g alpha)(x) = alpha(g^{-1} x)`, i.e. `alpha_{gB, c}`.
    pub fn group_act(&self, g: &Matrix) -> Result<Norm> {
        let basis = g.mul(&self.basis)?;
        let inverse = self.inverse.mul(&g.inverse()?)?;
        Ok(Norm { basis, exponents: self.exponents.clone(), inverse, cap: self.cap })
    }

    /// `alpha_{sigma^k(B), c}`.
    pub fn sigma_act(&self, k: i64) -> Norm {
        Norm {
            basis: self.basis.sigma(k),
            exponents: self.exponents.clone(),
            inverse: self.inverse.sigma(k),
            cap: self.cap,
        }
    }

    /// `(Id_V (x) sigma - F)`-twisted action: `alpha_{b sigma(B), c}`.
    pub fn fb_act(&self, ic: &Isocrystal) -> Result<Norm> {
        self.fb_power_act(ic, 1)
    }

    /// The isometry `F^k`: `alpha_{Pi_k sigma^k(B), c}`.
    pub fn fb_power_act(&self, ic: &Isocrystal, k: usize) -> Result<Norm> {
        if ic.dimension() != self.dimension() || !ic.context().same_field(self.context()) {
            return Err(Error::ContextMismatch);
        }
        let pi = ic.twisted_product(k)?;
        let basis = pi.mul(&self.basis.sigma(k as i64))?;
        self.derive(basis, self.exponents.clone())
    }

    /// `(sum c_i - val det B) / n`, the coordinate along the centre.
    pub fn det_component(&self) -> Result<Rational64> {
        let v = self
            .basis
            .det()?
            .valuation()
            .finite()
            .ok_or_else(|| Error::precision("basis determinant vanishes at precision"))?;
        let sum: Rational64 = self.exponents.iter().sum();
        Ok((sum - v) / Rational64::from_integer(self.dimension() as i64))
    }

    /// The lattice `{x : alpha(x) <= p^{-e}}`, basis `p^{ceil(e - c_i)} B_i`.
    pub fn ball_lattice(&self, e: Rational64) -> Result<CrystalLattice> {
        let ctx = self.context();
        let mut basis = self.basis.clone();
        for (j, c) in self.exponents.iter().enumerate() {
            let k = (e - c).ceil().to_integer();
            basis.scale_col(j, &FieldElement::p_power(ctx, k));
        }
        Ok(CrystalLattice {
            basis,
            origin: Some(BallOrigin { exponents: self.exponents.clone(), radius: e }),
        })
    }

    pub fn to_json(&self) -> NormJson {
        NormJson {
            basis: self.basis.to_json(),
            exponents: self.exponents.iter().map(|c| format_rational(*c)).collect(),
        }
    }

    pub fn from_json(ctx: &Arc<FieldContext>, json: &NormJson, cap: i64) -> Result<Self> {
        let basis = Matrix::from_json(ctx, &json.basis)?;
        let exps = json.exponents.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Self::with_cap(basis, exps, cap)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormJson {
    pub basis: Vec<Vec<FieldElementJson>>,
    pub exponents: Vec<String>,
}

/// Exponent differences in a common splitting basis, sorted descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelPosition(pub Vec<Rational64>);

impl RelPosition {
    pub fn distance_squared(&self) -> Rational64 {
        self.0.iter().map(|r| r * r).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|r| r.is_zero())
    }

    pub fn to_json(&self) -> Vec<String> {
        self.0.iter().map(|r| format_rational(*r)).collect()
    }
}

fn sorted_desc(mut v: Vec<Rational64>) -> RelPosition {
    v.sort_by(|a, b| b.cmp(a));
    RelPosition(v)
}

fn check_pair(a: &Norm, b: &Norm) -> Result<()> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch("norms on spaces of different dimension".into()));
    }
    if !a.context().same_field(b.context()) {
        return Err(Error::ContextMismatch);
    }
    Ok(())
}

/// Relative position `r = exps(beta) - exps(alpha)` in a common splitting
/// basis, via Smith form over the Eisenstein extension that makes all
/// exponents integral.
pub fn rel_position(a: &Norm, b: &Norm) -> Result<RelPosition> {
    check_pair(a, b)?;
    let all: Vec<Rational64> = a.exponents.iter().chain(&b.exponents).copied().collect();
    let d = check_cap(&all, a.cap.max(b.cap))?;
    let n = a.dimension();
    let m = a.inverse.mul(&b.basis)?;
    let ectx = a.context().with_ramification(d as u32)?;
    let me = m.base_change(&ectx)?;
    let dr = Rational64::from_integer(d);
    let t = Matrix::from_fn(&ectx, n, n, |i, j| {
        let shift = (a.exponents[i] * dr - b.exponents[j] * dr).to_integer();
        me.get(i, j).shift(shift)
    });
    let exps = t.elementary_divisor_exponents()?;
    if exps.len() < n {
        return Err(Error::precision("transition matrix is singular at precision"));
    }
    Ok(sorted_desc(exps.iter().map(|&e| -Rational64::new(e, d)).collect()))
}

pub fn distance_squared(a: &Norm, b: &Norm) -> Result<Rational64> {
    Ok(rel_position(a, b)?.distance_squared())
}

pub fn norms_equal(a: &Norm, b: &Norm) -> Result<bool> {
    Ok(rel_position(a, b)?.is_zero())
}

struct Pivot {
    row: usize,
    col: usize,
    weight: Rational64,
}

/// Elimination on `a` where entry `(i, j)` carries weight
/// `val(a_ij) + row_w[i] - col_w[j]`. Row operations only add multiples of a
/// pivot row of smaller weight and column operations likewise, so they
/// preserve the norms the weights come from. Returns the pivots in order.
fn weighted_elimination(
    a: &mut Matrix,
    row_w: &[Rational64],
    col_w: &[Rational64],
    mut on_row_op: impl FnMut(usize, usize, &FieldElement),
    mut on_col_op: impl FnMut(usize, usize, &FieldElement),
) -> Result<Vec<Pivot>> {
    let (n, m) = (a.rows(), a.cols());
    let mut rows_left: Vec<usize> = (0..n).collect();
    let mut cols_left: Vec<usize> = (0..m).collect();
    let mut pivots = Vec::new();
    while !rows_left.is_empty() && !cols_left.is_empty() {
        let mut best: Option<Pivot> = None;
        let mut floor: Option<Rational64> = None;
        for &i in &rows_left {
            for &j in &cols_left {
                let x = a.get(i, j);
                let base = row_w[i] - col_w.get(j).copied().unwrap_or_default();
                match ticks(x.val_ticks()) {
                    Some(v) => {
                        let w = v + base;
                        if best.as_ref().is_none_or(|b| w < b.weight) {
                            best = Some(Pivot { row: i, col: j, weight: w });
                        }
                    }
                    None => {
                        if let Some(abs) = ticks(x.abs_ticks()) {
                            let w = abs + base;
                            floor = Some(floor.map_or(w, |f: Rational64| f.min(w)));
                        }
                    }
                }
            }
        }
        let Some(p) = best else { break };
        if floor.is_some_and(|f| f < p.weight) {
            return Err(Error::precision("weighted pivot is not certified"));
        }
        let inv = a.get(p.row, p.col).inv()?;
        for &k in &rows_left {
            if k == p.row || a.get(k, p.col).is_exact_zero() {
                continue;
            }
            let c = a.get(k, p.col).mul(&inv);
            a.row_axpy(k, p.row, &c);
            a.set(k, p.col, FieldElement::zero(a.context()));
            on_row_op(k, p.row, &c);
        }
        for &l in &cols_left {
            if l == p.col || a.get(p.row, l).is_exact_zero() {
                continue;
            }
            let c = inv.mul(a.get(p.row, l));
            a.col_axpy(l, p.col, &c);
            a.set(p.row, l, FieldElement::zero(a.context()));
            on_col_op(l, p.col, &c);
        }
        rows_left.retain(|&i| i != p.row);
        cols_left.retain(|&j| j != p.col);
        pivots.push(p);
    }
    Ok(pivots)
}

/// A basis splitting two norms at once, with both exponent vectors.
#[derive(Clone, Debug)]
pub struct CommonApartment {
    pub basis: Matrix,
    pub alpha: Vec<Rational64>,
    pub beta: Vec<Rational64>,
}

impl CommonApartment {
    pub fn rel_position(&self) -> RelPosition {
        sorted_desc(self.beta.iter().zip(&self.alpha).map(|(b, a)| b - a).collect())
    }
}

/// Common splitting basis of `a` and `b` over `L` (no field extension).
pub fn common_apartment(a: &Norm, b: &Norm) -> Result<CommonApartment> {
    check_pair(a, b)?;
    let n = a.dimension();
    let mut m = a.inverse.mul(&b.basis)?;
    let mut basis = a.basis.clone();
    // row_k -= c row_i on M is the change B_i <- B_i + c B_k of alpha's basis
    let pivots = weighted_elimination(
        &mut m,
        &a.exponents,
        &b.exponents,
        |k, i, c| basis.col_axpy(i, k, &c.neg()),
        |_, _, _| {},
    )?;
    if pivots.len() < n {
        return Err(Error::precision("transition matrix is singular at precision"));
    }
    let mut alpha = vec![Rational64::zero(); n];
    let mut beta = vec![Rational64::zero(); n];
    for p in &pivots {
        alpha[p.row] = a.exponents[p.row];
        beta[p.row] = a.exponents[p.row] - p.weight;
    }
    Ok(CommonApartment { basis, alpha, beta })
}

/// Relative position by weighted elimination over `L`.
pub fn rel_position_fast(a: &Norm, b: &Norm) -> Result<RelPosition> {
    Ok(common_apartment(a, b)?.rel_position())
}

/// The point at parameter `t` on the geodesic from `a` to `b`.
pub fn geodesic_point(a: &Norm, b: &Norm, t: Rational64) -> Result<Norm> {
    if t < Rational64::zero() || t > Rational64::one() {
        return Err(Error::InvalidParams("geodesic parameter outside [0, 1]".into()));
    }
    let ca = common_apartment(a, b)?;
    let exps = ca
        .alpha
        .iter()
        .zip(&ca.beta)
        .map(|(x, y)| (Rational64::one() - t) * x + t * y)
        .collect();
    Norm::with_cap(ca.basis, exps, a.cap.max(b.cap))
}

/// Restriction of `alpha` to the span of the columns of `w`, as a norm on
/// `L^k` (coordinates with respect to those columns).
pub fn restrict_norm(a: &Norm, w: &Matrix) -> Result<Norm> {
    if w.rows() != a.dimension() {
        return Err(Error::DimensionMismatch("subspace basis has the wrong length".into()));
    }
    let k = w.cols();
    let ctx = a.context();
    let mut coords = a.inverse.mul(w)?;
    let mut v = Matrix::identity(ctx, k);
    let zero_w = vec![Rational64::zero(); k];
    let pivots = weighted_elimination(
        &mut coords,
        &a.exponents,
        &zero_w,
        |_, _, _| {},
        |l, j, c| v.col_axpy(l, j, c),
    )?;
    if pivots.len() < k {
        return Err(Error::InvalidParams("subspace basis is not independent".into()));
    }
    let mut exps = vec![Rational64::zero(); k];
    for p in &pivots {
        exps[p.col] = p.weight;
    }
    Norm::with_cap(v, exps, a.cap)
}

/// The block-adapted norm `alpha_M(sum x_lambda) = max alpha(x_lambda)` and
/// whether it equals `alpha`.
pub fn levi_adapt(a: &Norm, dec: &IsoclineDecomposition) -> Result<(Norm, bool)> {
    let n = a.dimension();
    let ctx = a.context();
    let mut cols: Vec<Vec<FieldElement>> = Vec::with_capacity(n);
    let mut exps = Vec::with_capacity(n);
    for i in 0..dec.blocks.len() {
        let w = dec.block_basis(i);
        let r = restrict_norm(a, &w)?;
        let full = w.mul(r.basis())?;
        for j in 0..full.cols() {
            cols.push(full.column(j));
        }
        exps.extend_from_slice(r.exponents());
    }
    let am = Norm::with_cap(Matrix::from_columns(ctx, n, &cols), exps, a.cap)?;
    let same = norms_equal(a, &am)?;
    Ok((am, same))
}

/// Where a lattice came from, if it is a ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallOrigin {
    pub exponents: Vec<Rational64>,
    pub radius: Rational64,
}

/// A full-rank `O_L`-lattice, given by a basis (columns).
#[derive(Clone, Debug)]
pub struct CrystalLattice {
    basis: Matrix,
    origin: Option<BallOrigin>,
}

impl CrystalLattice {
    pub fn new(basis: Matrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::DimensionMismatch("lattice basis must be square".into()));
        }
        if basis.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(CrystalLattice { basis, origin: None })
    }

    pub fn standard(ctx: &Arc<FieldContext>, n: usize) -> Self {
        CrystalLattice { basis: Matrix::identity(ctx, n), origin: None }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn origin(&self) -> Option<&BallOrigin> {
        self.origin.as_ref()
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        self.basis.context()
    }

    pub fn dimension(&self) -> usize {
        self.basis.rows()
    }

    pub fn contains(&self, x: &[FieldElement]) -> Result<bool> {
        let col = Matrix::from_columns(self.context(), x.len(), &[x.to_vec()]);
        Ok(self.basis.solve(&col)?.is_integral())
    }

    pub fn contains_lattice(&self, other: &CrystalLattice) -> Result<bool> {
        Ok(self.basis.solve(&other.basis)?.is_integral())
    }

    pub fn same_as(&self, other: &CrystalLattice) -> Result<bool> {
        Ok(self.contains_lattice(other)? && other.contains_lattice(self)?)
    }

    /// `g M`.
    pub fn transform(&self, g: &Matrix) -> Result<CrystalLattice> {
        Ok(CrystalLattice { basis: g.mul(&self.basis)?, origin: None })
    }

    /// `p^k M`.
    pub fn scale(&self, k: i64) -> CrystalLattice {
        CrystalLattice {
            basis: self.basis.scale(&FieldElement::p_power(self.context(), k)),
            origin: None,
        }
    }

    /// Canonical basis: upper triangular, diagonal `p^{a_i}`, entries above
    /// the diagonal reduced modulo `p^{a_i}` of their row.
    pub fn hermite_form(&self) -> Result<Matrix> {
        let ctx = self.context();
        let n = self.dimension();
        let shift = self.basis.min_val_ticks().unwrap_or(0).min(0);
        let mut a = self.basis.map(|x| x.shift(-shift));
        for r in (0..n).rev() {
            // pivot among columns 0..=r in row r
            let mut best: Option<(i64, usize)> = None;
            for j in 0..=r {
                if let Some(v) = a.get(r, j).val_ticks() {
                    if best.is_none_or(|(b, _)| v < b) {
                        best = Some((v, j));
                    }
                }
            }
            let (v, j) = best.ok_or_else(|| Error::precision("lattice basis is singular at precision"))?;
            a.swap_cols(j, r);
            let unit = a.get(r, r).shift(-v).inv()?;
            a.scale_col(r, &unit);
            a.set(r, r, FieldElement::pi_power(ctx, v));
            let piv_inv = a.get(r, r).inv()?;
            for l in 0..r {
                if a.get(r, l).is_exact_zero() {
                    continue;
                }
                let c = a.get(r, l).mul(&piv_inv);
                a.col_axpy(l, r, &c);
                a.set(r, l, FieldElement::zero(ctx));
            }
        }
        for j in 1..n {
            for i in (0..j).rev() {
                let a_i = a.get(i, i).val_ticks().unwrap_or(0);
                let x = a.get(i, j).clone();
                if x.is_zero() {
                    a.set(i, j, FieldElement::zero(ctx));
                    continue;
                }
                let raw = x.integral_raw().ok_or(Error::NotIntegral)?;
                let reduced = ctx.raw_mod_p_pow(&raw, a_i as u32);
                let rep = FieldElement::from_integral_raw(ctx, reduced, None);
                let q = x.sub(&rep).div(a.get(i, i))?;
                a.col_axpy(j, i, &q);
                a.set(i, j, if rep.is_zero() { FieldElement::zero(ctx) } else { rep });
            }
        }
        Ok(a.map(|x| x.shift(shift)))
    }

    /// A string that identifies the lattice.
    pub fn key(&self) -> Result<String> {
        let h = self.hermite_form()?;
        Ok(serde_json::to_string(&h.to_json()).unwrap_or_default())
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson { basis: self.basis.to_json() }
    }

    pub fn from_json(ctx: &Arc<FieldContext>, json: &LatticeJson) -> Result<Self> {
        Self::new(Matrix::from_json(ctx, &json.basis)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub basis: Vec<Vec<FieldElementJson>>,
}
