use std::sync::Arc;

use super::context::FieldContext;
use super::element::{FieldElement, FieldElementJson};
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Dense row-major matrix over one field context.
#[derive(Clone, Debug)]
pub struct Matrix {
    ctx: Arc<FieldContext>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Result of [`Matrix::smith_normal_form`]: `U * A * V = D`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    /// Valuations of the diagonal in ticks of `1/d`, ascending.
    pub exponents: Vec<i64>,
}

impl Matrix {
    pub fn new(ctx: &Arc<FieldContext>, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { ctx: Arc::clone(ctx), rows, cols, data })
    }

    pub fn zeros(ctx: &Arc<FieldContext>, rows: usize, cols: usize) -> Self {
        Matrix { ctx: Arc::clone(ctx), rows, cols, data: vec![FieldElement::zero(ctx); rows * cols] }
    }

    pub fn identity(ctx: &Arc<FieldContext>, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::one(ctx));
        }
        m
    }

    pub fn from_fn(
        ctx: &Arc<FieldContext>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ctx: Arc::clone(ctx), rows, cols, data }
    }

    pub fn from_ints(ctx: &Arc<FieldContext>, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(ctx, r, c, |i, j| FieldElement::from_int(ctx, rows[i][j]))
    }

    pub fn diagonal(ctx: &Arc<FieldContext>, diag: &[FieldElement]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(ctx, n, n);
        for (i, x) in diag.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Matrix { ctx: Arc::clone(&self.ctx), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Move every entry into another context of the same field (used to
    /// reinterpret an unramified matrix inside an Eisenstein extension).
    pub fn base_change(&self, ctx: &Arc<FieldContext>) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|x| super::extend_field(x, ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ctx: Arc::clone(ctx), rows: self.rows, cols: self.cols, data })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Ok(Matrix { ctx: Arc::clone(&self.ctx), rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect();
        Ok(Matrix { ctx: Arc::clone(&self.ctx), rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_exact_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        let mut acc = Self::identity(&self.ctx, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.ctx, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Entrywise `sigma^k`.
    pub fn sigma(&self, k: i64) -> Self {
        self.map(|x| x.frobenius(k))
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(ctx: &Arc<FieldContext>, rows: usize, cols: &[Vec<FieldElement>]) -> Self {
        Self::from_fn(ctx, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> Self {
        let start = range.start;
        Self::from_fn(&self.ctx, self.rows, range.len(), |i, j| self.get(i, start + j).clone())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(&self.ctx, rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        Ok(Self::from_fn(&self.ctx, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    /// Block diagonal sum.
    pub fn block_diag(ctx: &Arc<FieldContext>, blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(ctx, n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r + i, c + j, b.get(i, j).clone());
                }
            }
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.eq_at_precision(b))
    }

    /// Minimum entry valuation in ticks; `None` if every entry is zero.
    pub fn min_val_ticks(&self) -> Option<i64> {
        self.data.iter().filter_map(|x| x.val_ticks()).min()
    }

    pub fn is_integral(&self) -> bool {
        self.min_val_ticks().is_none_or(|v| v >= 0)
    }

    /// Certified pivot in the block `rows x cols`: minimum valuation among
    /// nonzero entries, row-major on ties. Returns `None` if the block is zero
    /// at precision.
    fn pivot(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Result<Option<(usize, usize)>> {
        let mut best: Option<(i64, usize, usize)> = None;
        let mut min_abs: Option<i64> = None;
        for i in rows {
            for j in cols.clone() {
                let x = self.get(i, j);
                match x.val_ticks() {
                    Some(v) => {
                        if best.is_none_or(|(b, _, _)| v < b) {
                            best = Some((v, i, j));
                        }
                    }
                    None => {
                        if let Some(a) = x.abs_ticks() {
                            min_abs = Some(min_abs.map_or(a, |m| m.min(a)));
                        }
                    }
                }
            }
        }
        match (best, min_abs) {
            (Some((v, _, _)), Some(a)) if a < v => {
                Err(Error::precision(format!("pivot valuation {v} not certified against O(pi^{a})")))
            }
            (Some((_, i, j)), _) => Ok(Some((i, j))),
            (None, _) => Ok(None),
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[target] -= c * row[src]`.
    pub(crate) fn row_axpy(&mut self, target: usize, src: usize, c: &FieldElement) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s.is_exact_zero() {
                continue;
            }
            let t = self.get(target, j).sub(&c.mul(s));
            self.set(target, j, t);
        }
    }

    /// `col[target] -= c * col[src]`.
    pub(crate) fn col_axpy(&mut self, target: usize, src: usize, c: &FieldElement) {
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s.is_exact_zero() {
                continue;
            }
            let t = self.get(i, target).sub(&s.mul(c));
            self.set(i, target, t);
        }
    }

    pub(crate) fn scale_col(&mut self, c: usize, x: &FieldElement) {
        for i in 0..self.rows {
            let t = self.get(i, c).mul(x);
            self.set(i, c, t);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, c: &FieldElement) {
        for j in 0..self.cols {
            let t = self.get(r, j).mul(c);
            self.set(r, j, t);
        }
    }

    pub fn det(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = FieldElement::one(&self.ctx);
        for k in 0..n {
            let Some((pi, pj)) = a.pivot(k..n, k..n)? else {
                // the remaining block is zero at precision
                let abs = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).filter_map(|(i, j)| a.get(i, j).abs_ticks()).min();
                return Ok(match abs {
                    None => FieldElement::zero(&self.ctx),
                    Some(t) => FieldElement::zero(&self.ctx).truncate(t + det.val_ticks().unwrap_or(0)),
                });
            };
            if pi != k {
                a.swap_rows(pi, k);
                det = det.neg();
            }
            if pj != k {
                a.swap_cols(pj, k);
                det = det.neg();
            }
            let piv = a.get(k, k).clone();
            det = det.mul(&piv);
            let inv = piv.inv()?;
            for i in k + 1..n {
                if a.get(i, k).is_exact_zero() {
                    continue;
                }
                let c = a.get(i, k).mul(&inv);
                a.row_axpy(i, k, &c);
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination with certified pivots.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.ctx, n);
        for k in 0..n {
            let Some((pi, _)) = a.pivot(k..n, k..k + 1)? else {
                return if a.data.iter().all(|x| x.is_exact_zero()) || self.det()?.is_exact_zero() {
                    Err(Error::Singular)
                } else {
                    Err(Error::precision("matrix is singular at working precision"))
                };
            };
            a.swap_rows(pi, k);
            inv.swap_rows(pi, k);
            let p = a.get(k, k).inv()?;
            a.scale_row(k, &p);
            inv.scale_row(k, &p);
            for i in 0..n {
                if i == k || a.get(i, k).is_exact_zero() {
                    continue;
                }
                let c = a.get(i, k).clone();
                a.row_axpy(i, k, &c);
                inv.row_axpy(i, k, &c);
            }
        }
        Ok(inv)
    }

    /// Solve `self * X = rhs` for square invertible `self`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.inverse()?.mul(rhs)
    }

    /// Reduced row echelon form with certified pivots; returns the pivot columns.
    fn rref(&self) -> Result<(Matrix, Vec<usize>)> {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some((pi, _)) = a.pivot(r..self.rows, c..c + 1)? else {
                continue;
            };
            a.swap_rows(pi, r);
            let p = a.get(r, c).inv()?;
            a.scale_row(r, &p);
            for i in 0..self.rows {
                if i == r || a.get(i, c).is_exact_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                a.row_axpy(i, r, &f);
            }
            pivots.push(c);
            r += 1;
        }
        Ok((a, pivots))
    }

    /// Rank at working precision.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.1.len())
    }

    /// Basis of the right kernel (as columns); zero columns when `self` is injective.
    pub fn kernel_basis(&self) -> Result<Matrix> {
        let (r, pivots) = self.rref()?;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(&self.ctx, self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, FieldElement::one(&self.ctx));
            for (row, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, r.get(row, f).neg());
            }
        }
        Ok(basis)
    }

    /// Characteristic polynomial `det(x I - A)` by the division-free
    /// Berkowitz recurrence.
    pub fn charpoly(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("charpoly of a non-square matrix".into()));
        }
        let n = self.rows;
        let ctx = &self.ctx;
        let one = FieldElement::one(ctx);
        if n == 0 {
            return Ok(Polynomial::new(ctx, vec![one]));
        }
        // vect holds coefficients from the leading term down
        let mut vect = vec![one.clone(), self.get(0, 0).neg()];
        for r in 1..n {
            // principal submatrix S = A[0..r, 0..r], R = A[r, 0..r], C = A[0..r, r]
            let row: Vec<FieldElement> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let mut col: Vec<FieldElement> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let mut t = Vec::with_capacity(r + 2);
            t.push(one.clone());
            t.push(self.get(r, r).neg());
            for _ in 0..r {
                let rc = dot(ctx, &row, &col);
                t.push(rc.neg());
                col = (0..r)
                    .map(|i| {
                        let s: Vec<FieldElement> = (0..r).map(|j| self.get(i, j).clone()).collect();
                        dot(ctx, &s, &col)
                    })
                    .collect();
            }
            let mut next = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc = FieldElement::zero(ctx);
                for (j, v) in vect.iter().enumerate() {
                    if j <= i && i - j < t.len() {
                        acc = acc.add(&t[i - j].mul(v));
                    }
                }
                next.push(acc);
            }
            vect = next;
        }
        vect.reverse();
        Ok(Polynomial::new(ctx, vect))
    }

    /// Evaluate a polynomial at this square matrix (Horner).
    pub fn eval_poly(&self, f: &Polynomial) -> Result<Matrix> {
        let n = self.rows;
        let mut acc = Self::zeros(&self.ctx, n, n);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self)?;
            for i in 0..n {
                let t = acc.get(i, i).add(c);
                acc.set(i, i, t);
            }
        }
        Ok(acc)
    }

    /// Smith normal form over the valuation ring: `U * A * V = D`.
    ///
    /// Pivot: minimum valuation in the remaining block, row-major on ties.
    pub fn smith_normal_form(&self) -> Result<SmithForm> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        let ctx = &self.ctx;
        let (n, m) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = Self::identity(ctx, n);
        let mut v = Self::identity(ctx, m);
        let mut exponents = Vec::new();
        for k in 0..n.min(m) {
            let Some((pi, pj)) = a.pivot(k..n, k..m)? else {
                break;
            };
            a.swap_rows(pi, k);
            u.swap_rows(pi, k);
            a.swap_cols(pj, k);
            v.swap_cols(pj, k);
            let piv = a.get(k, k).clone();
            let val = piv.val_ticks().expect("pivot is nonzero");
            let unit_inv = piv.shift(-val).inv()?;
            a.scale_row(k, &unit_inv);
            u.scale_row(k, &unit_inv);
            let piv = a.get(k, k).clone();
            let piv_inv = piv.inv()?;
            for i in k + 1..n {
                if a.get(i, k).is_exact_zero() {
                    continue;
                }
                let c = a.get(i, k).mul(&piv_inv);
                a.row_axpy(i, k, &c);
                u.row_axpy(i, k, &c);
                a.set(i, k, FieldElement::zero(ctx));
            }
            for j in k + 1..m {
                if a.get(k, j).is_exact_zero() {
                    continue;
                }
                let c = piv_inv.mul(a.get(k, j));
                a.col_axpy(j, k, &c);
                v.col_axpy(j, k, &c);
                a.set(k, j, FieldElement::zero(ctx));
            }
            exponents.push(val);
        }
        // minimum-valuation pivoting already yields ascending exponents
        debug_assert!(exponents.windows(2).all(|w| w[0] <= w[1]));
        let d = Self::from_fn(ctx, n, m, |i, j| {
            if i == j && i < exponents.len() {
                FieldElement::pi_power(ctx, exponents[i])
            } else {
                FieldElement::zero(ctx)
            }
        });
        Ok(SmithForm { u, d, v, exponents })
    }

    /// Just the elementary-divisor exponents (in ticks), ascending; works for
    /// any matrix with nonzero determinant after clearing denominators.
    pub fn elementary_divisor_exponents(&self) -> Result<Vec<i64>> {
        let shift = self.min_val_ticks().unwrap_or(0).min(0);
        let scaled = if shift < 0 { self.map(|x| x.shift(-shift)) } else { self.clone() };
        let ctx = &self.ctx;
        let (n, m) = (scaled.rows, scaled.cols);
        let mut a = scaled;
        let mut exps = Vec::new();
        for k in 0..n.min(m) {
            let Some((pi, pj)) = a.pivot(k..n, k..m)? else {
                break;
            };
            a.swap_rows(pi, k);
            a.swap_cols(pj, k);
            let piv = a.get(k, k).clone();
            exps.push(piv.val_ticks().expect("pivot is nonzero") + shift);
            let piv_inv = piv.inv()?;
            for i in k + 1..n {
                if a.get(i, k).is_exact_zero() {
                    continue;
                }
                let c = a.get(i, k).mul(&piv_inv);
                a.row_axpy(i, k, &c);
                a.set(i, k, FieldElement::zero(ctx));
            }
            // column ops are unnecessary: the row below is cleared and the
            // pivot divides the rest of its row
            for j in k + 1..m {
                a.set(k, j, FieldElement::zero(ctx));
            }
        }
        Ok(exps)
    }

    pub fn to_json(&self) -> Vec<Vec<FieldElementJson>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_json()).collect())
            .collect()
    }

    pub fn from_json(ctx: &Arc<FieldContext>, rows: &[Vec<FieldElementJson>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix".into()));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|x| FieldElement::from_json(ctx, x))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, r, c, data)
    }
}

fn dot(ctx: &Arc<FieldContext>, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let mut acc = FieldElement::zero(ctx);
    for (x, y) in a.iter().zip(b) {
        if x.is_exact_zero() || y.is_exact_zero() {
            continue;
        }
        acc = acc.add(&x.mul(y));
    }
    acc
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.eq_at_precision(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_field;

    fn leibniz_det(a: &Matrix, rows: &[usize], cols: &[usize]) -> FieldElement {
        let ctx = a.context();
        if rows.is_empty() {
            return FieldElement::one(ctx);
        }
        let mut acc = FieldElement::zero(ctx);
        for (k, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &c)| c).collect();
            let term = a.get(rows[0], c).mul(&leibniz_det(a, &rows[1..], &rest));
            acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        if n < k {
            return Vec::new();
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    /// Partial sums of elementary divisors from minimal minor valuations.
    fn minor_oracle(a: &Matrix) -> Vec<i64> {
        let n = a.rows();
        let mut prev = 0;
        let mut out = Vec::new();
        for k in 1..=n {
            let mut best: Option<i64> = None;
            for r in subsets(n, k) {
                for c in subsets(n, k) {
                    if let Some(v) = leibniz_det(a, &r, &c).val_ticks() {
                        best = Some(best.map_or(v, |b| b.min(v)));
                    }
                }
            }
            let b = best.expect("full rank");
            out.push(b - prev);
            prev = b;
        }
        out
    }

    fn q(p: u64) -> Arc<FieldContext> {
        make_field(p, 1, 30, 1).unwrap()
    }

    #[test]
    fn charpoly_examples() {
        let ctx = q(2);
        let id = Matrix::identity(&ctx, 2);
        assert!(id.charpoly().unwrap().eq_at_precision(&Polynomial::from_ints(&ctx, &[1, -2, 1])));
        let d = Matrix::from_ints(&ctx, &[&[1, 0], &[0, 2]]);
        assert!(d.charpoly().unwrap().eq_at_precision(&Polynomial::from_ints(&ctx, &[2, -3, 1])));
        let c = Matrix::from_ints(&ctx, &[&[0, 2], &[1, 0]]);
        assert!(c.charpoly().unwrap().eq_at_precision(&Polynomial::from_ints(&ctx, &[-2, 0, 1])));
    }

    #[test]
    fn charpoly_matches_determinant() {
        let ctx = q(3);
        let a = Matrix::from_ints(&ctx, &[&[1, 2, 0, 5], &[3, -1, 4, 1], &[0, 9, 2, 2], &[7, 1, 1, 3]]);
        let f = a.charpoly().unwrap();
        // f(0) = det(-A) = det(A) for even n
        assert_eq!(f.coeff(0), a.det().unwrap());
        assert!(a.eval_poly(&f).unwrap().is_zero());
    }

    #[test]
    fn smith_examples() {
        let ctx = q(2);
        assert_eq!(Matrix::identity(&ctx, 2).smith_normal_form().unwrap().exponents, vec![0, 0]);
        let d = Matrix::from_ints(&ctx, &[&[8, 0], &[0, 2]]);
        assert_eq!(d.smith_normal_form().unwrap().exponents, vec![1, 3]);
        let a = Matrix::from_ints(&ctx, &[&[4, 1], &[0, 1]]);
        let snf = a.smith_normal_form().unwrap();
        assert_eq!(snf.exponents, vec![0, 2]);
        assert_eq!(minor_oracle(&a), vec![0, 2]);
        assert!(snf.u.mul(&a).unwrap().mul(&snf.v).unwrap().eq_at_precision(&snf.d));
    }

    #[test]
    fn smith_matches_minor_oracle() {
        let ctx = q(3);
        let a = Matrix::from_ints(&ctx, &[&[3, 9, 0], &[6, 0, 27], &[9, 3, 1]]);
        let snf = a.smith_normal_form().unwrap();
        assert_eq!(snf.exponents, minor_oracle(&a));
        assert_eq!(a.elementary_divisor_exponents().unwrap(), snf.exponents);
        assert!(snf.u.mul(&a).unwrap().mul(&snf.v).unwrap().eq_at_precision(&snf.d));
        assert!(matches!(a.scale(&FieldElement::p_power(&ctx, -1)).smith_normal_form(), Err(Error::NotIntegral)));
    }

    #[test]
    fn kernel_examples() {
        let ctx = q(2);
        let a = Matrix::from_ints(&ctx, &[&[0, 0], &[0, 1]]);
        let k = a.kernel_basis().unwrap();
        assert_eq!(k, Matrix::from_ints(&ctx, &[&[1], &[0]]));
        assert_eq!(Matrix::identity(&ctx, 3).kernel_basis().unwrap().cols(), 0);
        let b = Matrix::from_ints(&ctx, &[&[1, 1], &[1, 1]]);
        assert_eq!(b.kernel_basis().unwrap(), Matrix::from_ints(&ctx, &[&[-1], &[1]]));
    }

    #[test]
    fn inverse_and_det() {
        let ctx = make_field(2, 2, 20, 1).unwrap();
        let z = FieldElement::generator(&ctx);
        let one = FieldElement::one(&ctx);
        let p = FieldElement::from_int(&ctx, 2);
        let a = Matrix::new(&ctx, 2, 2, vec![z.clone(), p.clone(), one.clone(), z.frobenius(1)]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(&ctx, 2));
        // det = zeta sigma(zeta) - 2 = N(zeta) - 2 = 1 - 2
        assert_eq!(a.det().unwrap(), FieldElement::from_int(&ctx, -1));
        let sing = Matrix::from_ints(&ctx, &[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_err());
        assert!(sing.det().unwrap().is_zero());
    }
}
