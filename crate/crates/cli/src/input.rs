//! Instance files: JSON objects describing `b`, with matrix entries written
//! as integers, expression strings in `p` and `z`, or serialized elements.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use serde::Deserialize;

use isoskel::isocrystal::{definition_degree, standard_context, standard_form, Frame, SlopeJson};
use isoskel::padic::{make_field, parse_rational, FieldElementJson};
use isoskel::{Error, FieldContext, FieldElement, Isocrystal, Matrix, NewtonPoint, Norm, Result};

use crate::config::Settings;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Expr(String),
    Element(FieldElementJson),
}

pub type MatrixInput = Vec<Vec<Entry>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameInput {
    pub slopes: Vec<SlopeJson>,
    pub transporter: MatrixInput,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormInput {
    /// Defaults to the identity.
    pub basis: Option<MatrixInput>,
    pub exponents: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(alias = "p")]
    pub prime: Option<u64>,
    #[serde(alias = "m")]
    pub degree: Option<usize>,
    #[serde(alias = "N")]
    pub precision: Option<u32>,
    pub s: Option<usize>,
    /// Present in files written by the library serializer; ignored.
    pub n: Option<usize>,
    pub b: Option<MatrixInput>,
    /// Build the standard form of these slopes instead of reading `b`.
    pub standard: Option<Vec<SlopeJson>>,
    pub frame: Option<FrameInput>,
    pub norm: Option<NormInput>,
    pub offsets: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInput {
    Matrix(MatrixInput),
    Object(Box<InstanceFile>),
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawInput = serde_json::from_str(text).map_err(|e| Error::Parse(format!("input JSON: {e}")))?;
        Ok(match raw {
            RawInput::Matrix(b) => InstanceFile { b: Some(b), ..InstanceFile::default() },
            RawInput::Object(f) => *f,
        })
    }

    /// The header fields as a settings layer.
    pub fn settings(&self) -> Settings {
        Settings { prime: self.prime, degree: self.degree, precision: self.precision, ..Settings::default() }
    }
}

fn newton_from(parts: &[SlopeJson]) -> Result<NewtonPoint> {
    NewtonPoint::from_json(parts)
}

fn uses_generator(rows: &MatrixInput) -> bool {
    rows.iter().flatten().any(|e| match e {
        Entry::Expr(s) => s.contains('z'),
        Entry::Element(_) => true,
        Entry::Int(_) => false,
    })
}

pub fn parse_matrix(ctx: &Arc<FieldContext>, rows: &MatrixInput) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    let mut data = Vec::with_capacity(n * cols);
    for entry in rows.iter().flatten() {
        data.push(match entry {
            Entry::Int(c) => FieldElement::from_int(ctx, *c),
            Entry::Expr(s) => parse_expression(ctx, s)?,
            Entry::Element(j) => FieldElement::from_json(ctx, j)?,
        });
    }
    Matrix::new(ctx, n, cols, data)
}

/// Resolved instance: the isocrystal plus the optional norm and offsets.
pub struct Instance {
    pub isocrystal: Isocrystal,
    pub norm: Option<(Matrix, Vec<Rational64>)>,
    pub offsets: Option<Vec<String>>,
}

/// Builds the isocrystal. Without an explicit degree the matrix is read over
/// `Q_p`, its slopes computed, and it is reread over `Q_{p^m}` with `m` the
/// lcm of the slope denominators.
pub fn resolve(file: &InstanceFile, prime: u64, degree: Option<usize>, precision: u32) -> Result<Instance> {
    let isocrystal = match (&file.standard, &file.b) {
        (Some(_), Some(_)) => return Err(Error::Parse("give either `b` or `standard`, not both".into())),
        (None, None) => return Err(Error::Parse("input needs `b` or `standard`".into())),
        (Some(slopes), None) => {
            let np = newton_from(slopes)?;
            let ctx = standard_context(prime, precision, &np, degree.unwrap_or(1))?;
            if let Some(m) = degree {
                if ctx.degree() != m {
                    return Err(Error::InvalidParams(format!(
                        "degree {m} is not a multiple of the slope denominators"
                    )));
                }
            }
            standard_form(&ctx, &np)?
        }
        (None, Some(rows)) => {
            let m = match degree {
                Some(m) => m,
                None if uses_generator(rows) || file.frame.is_some() => {
                    return Err(Error::InvalidParams("entries in z or an explicit frame need --degree".into()))
                }
                None => {
                    let base = make_field(prime, 1, precision, 1)?;
                    let b = parse_matrix(&base, rows)?;
                    let np = Isocrystal::new(b, 1)?.newton_point()?;
                    np.denominator_lcm() as usize
                }
            };
            let ctx = make_field(prime, m, precision, 1)?;
            let b = parse_matrix(&ctx, rows)?;
            let s = match file.s {
                Some(s) => s,
                None => definition_degree(&b),
            };
            attach_frame(Isocrystal::new(b, s)?, file)?
        }
    };
    let ctx = isocrystal.context().clone();
    let norm = match &file.norm {
        None => None,
        Some(n) => {
            let basis = match &n.basis {
                Some(rows) => parse_matrix(&ctx, rows)?,
                None => Matrix::identity(&ctx, isocrystal.dimension()),
            };
            let exps = n.exponents.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
            Some((basis, exps))
        }
    };
    Ok(Instance { isocrystal, norm, offsets: file.offsets.clone() })
}

/// An explicit frame wins; otherwise `b` equal to the standard form of its
/// own slopes gets the identity frame.
fn attach_frame(ic: Isocrystal, file: &InstanceFile) -> Result<Isocrystal> {
    let ctx = ic.context().clone();
    if let Some(f) = &file.frame {
        let frame = Frame { newton: newton_from(&f.slopes)?, transporter: parse_matrix(&ctx, &f.transporter)? };
        return ic.with_frame(frame);
    }
    let np = ic.newton_point()?;
    if ctx.degree().is_multiple_of(np.denominator_lcm() as usize) {
        let std = standard_form(&ctx, &np)?;
        if std.matrix().eq_at_precision(ic.matrix()) {
            return Ok(std);
        }
    }
    Ok(ic)
}

pub fn build_norm(ic: &Isocrystal, norm: &(Matrix, Vec<Rational64>), cap: i64) -> Result<Norm> {
    if norm.0.rows() != ic.dimension() || norm.1.len() != ic.dimension() {
        return Err(Error::DimensionMismatch("norm does not match the isocrystal".into()));
    }
    Norm::with_cap(norm.0.clone(), norm.1.clone(), cap)
}

/// Recursive descent over `expr := term (('+'|'-') term)*`,
/// `term := unary (('*'|'/')? unary)*`, `unary := '-' unary | atom ('^' int)?`,
/// `atom := int | 'p' | 'z' | '(' expr ')'`.
pub fn parse_expression(ctx: &Arc<FieldContext>, text: &str) -> Result<FieldElement> {
    let tokens: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = ExprParser { ctx, tokens: &tokens, pos: 0, text };
    let value = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(parser.error("trailing characters"));
    }
    Ok(value)
}

struct ExprParser<'a> {
    ctx: &'a Arc<FieldContext>,
    tokens: &'a [char],
    pos: usize,
    text: &'a str,
}

impl ExprParser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("entry `{}`: {what} at position {}", self.text, self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some('/') => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                Some(c) if c.is_ascii_digit() || c == 'p' || c == 'z' || c == '(' => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        base.pow(e)
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg = self.peek() == Some('-');
        if neg {
            self.pos += 1;
        }
        let k = self.integer()?;
        let k = i64::try_from(k).map_err(|_| self.error("exponent too large"))?;
        Ok(if neg { -k } else { k })
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits: String = self.tokens[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.error("integer too large"))
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some('p') => {
                self.pos += 1;
                Ok(FieldElement::p_power(self.ctx, 1))
            }
            Some('z') => {
                self.pos += 1;
                Ok(FieldElement::generator(self.ctx))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.integer()?;
                let k = i64::try_from(k).map_err(|_| self.error("integer too large"))?;
                Ok(FieldElement::from_int(self.ctx, k))
            }
            _ => Err(self.error("expected a number, p, z or `(`")),
        }
    }
}

/// Default decency degree: the lcm of the definition degree and the slope
/// denominators.
pub fn default_decency_degree(ic: &Isocrystal, np: &NewtonPoint) -> usize {
    (ic.definition_degree()).lcm(&(np.denominator_lcm() as usize))
}
