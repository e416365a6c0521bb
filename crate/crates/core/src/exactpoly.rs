//! Exact rational polynomials and the uniform large-order Bessel polynomials.
//!
//! `u_r`, `v_r` follow the Debye recursion. `D_r` and `M_r` are the
//! coefficients of the formal logarithms
//!
//! ```text
//! log(1 + sum u_r(t) x^r)                          = sum D_r(t) x^r
//! log((1 + sum v_r x^r) + a x t (1 + sum u_r x^r)) = sum M_r(t, a) x^r
//! ```
//!
//! with `x = 1/nu`. No floating point is used until `eval_f64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

pub const DEFAULT_MAX_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactPolyError {
    #[error("order {requested} exceeds the configured maximum {max}")]
    OrderLimit { requested: usize, max: usize },
    #[error("order must be at least 1, got {0}")]
    ZeroOrder(usize),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    // numerator and denominator may exceed f64 range separately
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = q.denom().bits().max(q.numer().bits()) as i64 - 60;
            let n = (q.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift.max(0) as usize).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Polynomial with exact rational coefficients, lowest power first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    var: char,
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn zero(var: char) -> Self {
        Self { var, coeffs: Vec::new() }
    }

    pub fn constant(var: char, c: Rational) -> Self {
        Self::from_coeffs(var, vec![c])
    }

    pub fn monomial(var: char, power: usize, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = c;
        Self::from_coeffs(var, coeffs)
    }

    pub fn from_coeffs(var: char, coeffs: Vec<Rational>) -> Self {
        let mut p = Self { var, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect();
        Self::from_coeffs(self.var, coeffs)
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Self {
        let mut coeffs = vec![Rational::zero()];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rational::from_integer(BigInt::from(i + 1)));
        }
        Self::from_coeffs(self.var, coeffs)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    /// Powers carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        RationalPolynomial::from_coeffs(self.var, coeffs)
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        RationalPolynomial::from_coeffs(self.var, coeffs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero(self.var);
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RationalPolynomial::from_coeffs(self.var, coeffs)
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = fmt_rational(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag} {}", self.var)?,
                _ => write!(f, "{mag} {}^{i}", self.var)?,
            }
        }
        Ok(())
    }
}

/// Polynomial in t whose coefficients are polynomials in alpha.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaPolynomial {
    coeffs: Vec<RationalPolynomial>,
}

impl AlphaPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_t_poly(p: &RationalPolynomial) -> Self {
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| RationalPolynomial::constant('a', c.clone()))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<RationalPolynomial>) -> Self {
        let mut p = Self { coeffs };
        while p.coeffs.last().is_some_and(|c| c.is_zero()) {
            p.coeffs.pop();
        }
        p
    }

    /// alpha * t
    pub fn alpha_t() -> Self {
        let a = RationalPolynomial::monomial('a', 1, Rational::one());
        Self::from_coeffs(vec![RationalPolynomial::zero('a'), a])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of t^power as a polynomial in alpha.
    pub fn t_coeff(&self, power: usize) -> RationalPolynomial {
        self.coeffs.get(power).cloned().unwrap_or_else(|| RationalPolynomial::zero('a'))
    }

    pub fn t_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// Value at a rational t, as a polynomial in alpha.
    pub fn eval_t(&self, t: &Rational) -> RationalPolynomial {
        let mut acc = RationalPolynomial::zero('a');
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(t) + c;
        }
        acc
    }

    /// Substitute a rational alpha, leaving a polynomial in t.
    pub fn at_alpha(&self, alpha: &Rational) -> RationalPolynomial {
        RationalPolynomial::from_coeffs('t', self.coeffs.iter().map(|p| p.eval(alpha)).collect())
    }

    pub fn eval_f64(&self, t: f64, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.eval_f64(alpha);
        }
        acc
    }
}

impl Add for &AlphaPolynomial {
    type Output = AlphaPolynomial;
    fn add(self, rhs: Self) -> AlphaPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        AlphaPolynomial::from_coeffs((0..n).map(|i| &self.t_coeff(i) + &rhs.t_coeff(i)).collect())
    }
}

impl Sub for &AlphaPolynomial {
    type Output = AlphaPolynomial;
    fn sub(self, rhs: Self) -> AlphaPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        AlphaPolynomial::from_coeffs((0..n).map(|i| &self.t_coeff(i) - &rhs.t_coeff(i)).collect())
    }
}

impl Mul for &AlphaPolynomial {
    type Output = AlphaPolynomial;
    fn mul(self, rhs: Self) -> AlphaPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return AlphaPolynomial::zero();
        }
        let mut coeffs = vec![RationalPolynomial::zero('a'); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        AlphaPolynomial::from_coeffs(coeffs)
    }
}

impl fmt::Display for AlphaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c}) t")?,
                _ => write!(f, "({c}) t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Coefficients L_1..L_N of log(1 + sum_{r>=1} a_r x^r), where `a[r-1] = a_r`.
///
/// Uses (1 + A) L' = A', i.e. r L_r = r a_r - sum_{k<r} k L_k a_{r-k}.
fn series_log(a: &[AlphaPolynomial]) -> Vec<AlphaPolynomial> {
    let mut out: Vec<AlphaPolynomial> = Vec::with_capacity(a.len());
    for r in 1..=a.len() {
        let rq = Rational::from_integer(BigInt::from(r));
        let mut acc = a[r - 1].scale(&rq);
        for k in 1..r {
            let kq = Rational::from_integer(BigInt::from(k));
            acc = &acc - &(&out[k - 1] * &a[r - k - 1]).scale(&kq);
        }
        out.push(acc.scale(&(Rational::one() / rq)));
    }
    out
}

/// Olver polynomials and their log-composed relatives up to a fixed order.
#[derive(Debug, Clone)]
pub struct OlverTable {
    max_order: usize,
    u: Vec<RationalPolynomial>,
    v: Vec<RationalPolynomial>,
    d: Vec<RationalPolynomial>,
    m: Vec<AlphaPolynomial>,
}

impl OlverTable {
    pub fn new(max_order: usize) -> Self {
        let t = RationalPolynomial::monomial('t', 1, Rational::one());
        let t2 = &t * &t;
        let one = RationalPolynomial::constant('t', Rational::one());
        let half_t2_1mt2 = (&t2 * &(&one - &t2)).scale(&rat(1, 2));
        let one_m5s2 = &one - &t2.scale(&rat(5, 1));
        let t_t2m1 = &t * &(&t2 - &one);

        let mut u = vec![one.clone()];
        for k in 0..max_order {
            let uk = &u[k];
            let a = &half_t2_1mt2 * &uk.derivative();
            let b = (&one_m5s2 * uk).integral().scale(&rat(1, 8));
            u.push(&a + &b);
        }
        let mut v = vec![one.clone()];
        for k in 1..=max_order {
            let prev = &u[k - 1];
            let inner = &prev.scale(&rat(1, 2)) + &(&t * &prev.derivative());
            v.push(&u[k] + &(&t_t2m1 * &inner));
        }

        let ua: Vec<AlphaPolynomial> = u[1..].iter().map(AlphaPolynomial::from_t_poly).collect();
        let d: Vec<RationalPolynomial> = series_log(&ua).iter().map(|p| p.at_alpha(&Rational::zero())).collect();

        let at = AlphaPolynomial::alpha_t();
        let mut a = Vec::with_capacity(max_order);
        for r in 1..=max_order {
            let vr = AlphaPolynomial::from_t_poly(&v[r]);
            let ur1 = AlphaPolynomial::from_t_poly(&u[r - 1]);
            a.push(&vr + &(&at * &ur1));
        }
        let m = series_log(&a);
        Self { max_order, u, v, d, m }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn check(&self, r: usize, allow_zero: bool) -> Result<(), ExactPolyError> {
        if r == 0 && !allow_zero {
            return Err(ExactPolyError::ZeroOrder(r));
        }
        if r > self.max_order {
            return Err(ExactPolyError::OrderLimit { requested: r, max: self.max_order });
        }
        Ok(())
    }

    pub fn u(&self, r: usize) -> Result<&RationalPolynomial, ExactPolyError> {
        self.check(r, true)?;
        Ok(&self.u[r])
    }

    pub fn v(&self, r: usize) -> Result<&RationalPolynomial, ExactPolyError> {
        self.check(r, true)?;
        Ok(&self.v[r])
    }

    pub fn d(&self, r: usize) -> Result<&RationalPolynomial, ExactPolyError> {
        self.check(r, false)?;
        Ok(&self.d[r - 1])
    }

    pub fn m(&self, r: usize) -> Result<&AlphaPolynomial, ExactPolyError> {
        self.check(r, false)?;
        Ok(&self.m[r - 1])
    }

    pub fn d_list(&self) -> &[RationalPolynomial] {
        &self.d
    }

    pub fn m_list(&self) -> &[AlphaPolynomial] {
        &self.m
    }

    /// x_{r,b}: coefficient of t^{r+2b} in D_r, b = 0..r.
    pub fn coeffs_x(&self, r: usize) -> Result<Vec<Rational>, ExactPolyError> {
        let d = self.d(r)?;
        Ok((0..=r).map(|b| d.coeff(r + 2 * b)).collect())
    }

    /// z_{r,b}(alpha): coefficient of t^{r+2b} in M_r, b = 0..r.
    pub fn coeffs_z(&self, r: usize) -> Result<Vec<RationalPolynomial>, ExactPolyError> {
        let m = self.m(r)?;
        Ok((0..=r).map(|b| m.t_coeff(r + 2 * b)).collect())
    }
}

static DEFAULT_TABLE: OnceLock<OlverTable> = OnceLock::new();

/// Shared table of order `DEFAULT_MAX_ORDER`.
pub fn olver_table() -> &'static OlverTable {
    DEFAULT_TABLE.get_or_init(|| OlverTable::new(DEFAULT_MAX_ORDER))
}

pub fn gen_u(r: usize) -> Result<RationalPolynomial, ExactPolyError> {
    olver_table().u(r).cloned()
}

pub fn gen_v(r: usize) -> Result<RationalPolynomial, ExactPolyError> {
    olver_table().v(r).cloned()
}

pub fn gen_d(r: usize) -> Result<RationalPolynomial, ExactPolyError> {
    olver_table().d(r).cloned()
}

pub fn gen_m(r: usize) -> Result<AlphaPolynomial, ExactPolyError> {
    olver_table().m(r).cloned()
}

pub fn coeffs_x(r: usize) -> Result<Vec<Rational>, ExactPolyError> {
    olver_table().coeffs_x(r)
}

pub fn coeffs_z(r: usize) -> Result<Vec<RationalPolynomial>, ExactPolyError> {
    olver_table().coeffs_z(r)
}

/// The polynomial (-1)^{r+1} (a^r + sign (-a)^r) / r in alpha.
pub fn alpha_power_term(r: usize, sign: i64) -> RationalPolynomial {
    let parity = if r % 2 == 0 { 1 } else { -1 };
    let c = rat(if r % 2 == 0 { -1 } else { 1 }, r as i64) * rat(1 + sign * parity, 1);
    RationalPolynomial::monomial('a', r, c)
}

/// First order r at which M_r(1, a) = D_r(1) + (-1)^{r+1} a^r / r fails.
pub fn check_dm_identity(d: &[RationalPolynomial], m: &[AlphaPolynomial]) -> Result<(), usize> {
    let one = Rational::one();
    for (i, (dr, mr)) in d.iter().zip(m).enumerate() {
        let r = i + 1;
        let sign = if r % 2 == 1 { 1 } else { -1 };
        let rhs = &RationalPolynomial::constant('a', dr.eval(&one))
            + &RationalPolynomial::monomial('a', r, rat(sign, r as i64));
        if mr.eval_t(&one) != rhs {
            return Err(r);
        }
    }
    Ok(())
}

fn negate_alpha(p: &RationalPolynomial) -> RationalPolynomial {
    p.compose_neg()
}

impl RationalPolynomial {
    /// p(-a)
    fn compose_neg(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
            .collect();
        Self::from_coeffs(self.var, coeffs)
    }
}

/// Checks sum_b (z_{r,b}(-a) - z_{r,b}(a)) = (-1)^r (a^r - (-a)^r)/r.
pub fn check_odd_sum_identity(table: &OlverTable, r_max: usize) -> Result<(), usize> {
    for r in 1..=r_max {
        let z = table.coeffs_z(r).map_err(|_| r)?;
        let mut lhs = RationalPolynomial::zero('a');
        for zb in &z {
            lhs = &(&lhs + &negate_alpha(zb)) - zb;
        }
        if lhs != (&alpha_power_term(r, -1)).neg() {
            return Err(r);
        }
    }
    Ok(())
}

/// Checks sum_b (2 x_{r,b} - z_{r,b}(-a) - z_{r,b}(a)) = (-1)^r (a^r + (-a)^r)/r.
pub fn check_even_sum_identity(table: &OlverTable, r_max: usize) -> Result<(), usize> {
    for r in 1..=r_max {
        let z = table.coeffs_z(r).map_err(|_| r)?;
        let x = table.coeffs_x(r).map_err(|_| r)?;
        let mut lhs = RationalPolynomial::zero('a');
        for (zb, xb) in z.iter().zip(&x) {
            let two_x = RationalPolynomial::constant('a', xb * rat(2, 1));
            lhs = &(&(&lhs + &two_x) - &negate_alpha(zb)) - zb;
        }
        if lhs != (&alpha_power_term(r, 1)).neg() {
            return Err(r);
        }
    }
    Ok(())
}
