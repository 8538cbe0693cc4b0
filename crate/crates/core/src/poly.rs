//! Dense univariate polynomials with ascending coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::Interval;
use crate::scalar::{Rational, Scalar};
use crate::tolerances::BRACKET_WIDTH;

/// `coeffs[k]` multiplies `x^k`. The highest stored coefficient is nonzero;
/// the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = T::one();
        Self { coeffs }
    }

    pub fn x() -> Self {
        Self::monomial(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// Coefficients padded with zeros to length `len`.
    pub fn padded(&self, len: usize) -> Vec<T> {
        (0..len).map(|k| self.coeff(k)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = T::one() / self.leading();
        self.scale(&inv)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    /// Multiplication by `x`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Linear combination `sum_k w_k p_k`.
    pub fn combine(terms: &[(T, &Polynomial<T>)]) -> Self {
        let len = terms.iter().map(|(_, p)| p.coeffs.len()).max().unwrap_or(0);
        let mut out = vec![T::zero(); len];
        for (w, p) in terms {
            for (o, c) in out.iter_mut().zip(&p.coeffs) {
                *o = o.clone() + w.clone() * c.clone();
            }
        }
        Self::new(out)
    }

    pub fn to_json(&self) -> Value {
        json!({ "coeffs": self.coeffs.iter().map(Scalar::to_json).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("polynomial needs a \"coeffs\" array".into()))?;
        Ok(Self::new(arr.iter().map(T::from_json).collect::<Result<_>>()?))
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in rhs.coeffs.iter().enumerate() {
                out[j + k] = out[j + k].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Add for Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        &self * &rhs
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = *c < T::zero();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        f.write_str("x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A polynomial in either backend, for callers that only learn the scalar
/// kind at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum DynPolynomial {
    Exact(Polynomial<Rational>),
    Float(Polynomial<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynValue {
    Poly(DynPolynomial),
    Exact(Rational),
    Float(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    Scale,
    Eval,
}

impl DynPolynomial {
    /// `Scale` and `Eval` read the second operand's constant term as the
    /// factor or evaluation point.
    pub fn apply(&self, other: &DynPolynomial, op: PolyOp) -> Result<DynValue> {
        match (self, other) {
            (DynPolynomial::Exact(p), DynPolynomial::Exact(q)) => Ok(match binary(p, q, op) {
                Ok(r) => DynValue::Poly(DynPolynomial::Exact(r)),
                Err(v) => DynValue::Exact(v),
            }),
            (DynPolynomial::Float(p), DynPolynomial::Float(q)) => Ok(match binary(p, q, op) {
                Ok(r) => DynValue::Poly(DynPolynomial::Float(r)),
                Err(v) => DynValue::Float(v),
            }),
            _ => Err(Error::KindMismatch),
        }
    }
}

fn binary<T: Scalar>(
    p: &Polynomial<T>,
    q: &Polynomial<T>,
    op: PolyOp,
) -> std::result::Result<Polynomial<T>, T> {
    match op {
        PolyOp::Add => Ok(p + q),
        PolyOp::Sub => Ok(p - q),
        PolyOp::Mul => Ok(p * q),
        PolyOp::Scale => Ok(p.scale(&q.coeff(0))),
        PolyOp::Eval => Err(p.eval(&q.coeff(0))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
    Zero,
}

pub fn parity_of<T: Scalar>(p: &Polynomial<T>) -> Parity {
    if p.is_zero() {
        return Parity::Zero;
    }
    let nz = |k: usize| !p.coeffs[k].is_zero();
    let odd = (1..p.coeffs.len()).step_by(2).any(nz);
    let even = (0..p.coeffs.len()).step_by(2).any(nz);
    match (even, odd) {
        (true, false) => Parity::Even,
        (false, true) => Parity::Odd,
        _ => Parity::Mixed,
    }
}

/// An interval known to contain a sign change of the polynomial. A
/// degenerate bracket (`lo == hi`) is an exact zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignChanges<T> {
    pub count: usize,
    pub brackets: Vec<Bracket<T>>,
    /// The finite window actually searched.
    pub window: (f64, f64),
}

/// Bound on the magnitude of every real zero (Fujiwara).
pub fn root_bound<T: Scalar>(p: &Polynomial<T>) -> f64 {
    let Some(n) = p.degree() else { return 0.0 };
    if n == 0 {
        return 0.0;
    }
    let lead = p.leading().to_f64().abs();
    let mut bound: f64 = 0.0;
    for k in 0..n {
        let c = p.coeffs[k].to_f64().abs() / lead;
        if c == 0.0 {
            continue;
        }
        let e = (n - k) as f64;
        let term = if k == 0 { (c / 2.0).powf(1.0 / e) } else { c.powf(1.0 / e) };
        bound = bound.max(term);
    }
    2.0 * bound * (1.0 + 1e-12) + f64::MIN_POSITIVE
}

/// Counts sign changes of `p` on a uniform grid over `domain` and refines
/// each one by bisection. Unbounded ends are cut at a root bound, so no
/// real zero of `p` lies outside the searched window. The count is a lower
/// bound on the number of distinct odd-order real zeros in the domain.
pub fn sign_changes_in<T: Scalar>(
    p: &Polynomial<T>,
    domain: &Interval,
    resolution: usize,
) -> SignChanges<T> {
    let resolution = resolution.max(2);
    let bound = root_bound(p);
    let lo = domain.lo.max(-bound);
    let hi = domain.hi.min(bound);
    let empty = SignChanges {
        count: 0,
        brackets: Vec::new(),
        window: (lo, hi),
    };
    if p.degree().unwrap_or(0) == 0 || !(lo < hi) {
        return empty;
    }
    let eval = Evaluator::new(p);
    let step = (hi - lo) / resolution as f64;
    let grid: Vec<f64> = (0..=resolution)
        .map(|j| if j == resolution { hi } else { lo + step * j as f64 })
        .collect();
    let signs: Vec<i8> = grid.iter().map(|&x| eval.sign_f64(x)).collect();

    let mut brackets = Vec::new();
    let mut last: Option<usize> = None;
    for (j, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some(k) = last {
            if signs[k] != s {
                brackets.push(if j == k + 1 {
                    eval.bisect(grid[k], grid[j], signs[k])
                } else {
                    // exact zeros on the grid between two opposite signs
                    Bracket {
                        lo: exact_point::<T>(grid[k + 1]),
                        hi: exact_point::<T>(grid[j - 1]),
                    }
                });
            }
        }
        last = Some(j);
    }
    SignChanges {
        count: brackets.len(),
        brackets,
        window: (lo, hi),
    }
}

fn exact_point<T: Scalar>(x: f64) -> T {
    if T::is_exact() {
        T::from_rational(&Rational::from_float(x).expect("finite grid point"))
    } else {
        T::from_f64(x).expect("float backend")
    }
}

/// Sign evaluation with a certified fast path: the float Horner value is
/// trusted when it exceeds a running error bound, otherwise the exact
/// polynomial is evaluated.
struct Evaluator<'a, T> {
    poly: &'a Polynomial<T>,
    approx: Vec<f64>,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    fn new(poly: &'a Polynomial<T>) -> Self {
        Self {
            poly,
            approx: poly.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }

    fn sign_f64(&self, x: f64) -> i8 {
        let mut v = 0.0f64;
        let mut mag = 0.0f64;
        for c in self.approx.iter().rev() {
            v = v * x + c;
            mag = mag * x.abs() + c.abs();
        }
        if !T::is_exact() {
            return sign(v);
        }
        let n = self.approx.len() as f64;
        let err = (4.0 * n + 4.0) * f64::EPSILON * mag;
        if v.abs() > err && v.is_finite() {
            sign(v)
        } else {
            self.sign_exact(&exact_point::<T>(x))
        }
    }

    fn sign_exact(&self, x: &T) -> i8 {
        let v = self.poly.eval(x);
        if v.is_zero() {
            0
        } else if v > T::zero() {
            1
        } else {
            -1
        }
    }

    fn bisect(&self, a: f64, b: f64, sign_a: i8) -> Bracket<T> {
        if T::is_exact() {
            let two = T::from_i64(2);
            let mut lo = exact_point::<T>(a);
            let mut hi = exact_point::<T>(b);
            let width = T::from_rational(
                &Rational::from_float(BRACKET_WIDTH).expect("finite constant"),
            );
            while hi.clone() - lo.clone() > width {
                let mid = (lo.clone() + hi.clone()) / two.clone();
                let s = match mid.to_f64() {
                    m if T::from_rational(&Rational::from_float(m).unwrap()) == mid => {
                        self.sign_f64(m)
                    }
                    _ => self.sign_exact(&mid),
                };
                if s == 0 {
                    return Bracket { lo: mid.clone(), hi: mid };
                }
                if s == sign_a {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Bracket { lo, hi }
        } else {
            let (mut lo, mut hi) = (a, b);
            while hi - lo > BRACKET_WIDTH {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let s = self.sign_f64(mid);
                if s == 0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if s == sign_a {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Bracket {
                lo: exact_point::<T>(lo),
                hi: exact_point::<T>(hi),
            }
        }
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `det[p_k(y_j)]` for points `y_0..y_{n-1}` and polynomials of degrees `0..n-1`.
pub fn alternant_det<T: Scalar>(points: &[T], polys: &[Polynomial<T>]) -> Result<T> {
    if points.len() != polys.len() {
        return Err(Error::Degree(format!(
            "{} points but {} polynomials",
            points.len(),
            polys.len()
        )));
    }
    for (k, p) in polys.iter().enumerate() {
        if p.degree() != Some(k) {
            return Err(Error::Degree(format!(
                "polynomial {k} has degree {:?}, expected {k}",
                p.degree()
            )));
        }
    }
    let n = points.len();
    let m = Matrix::from_fn(n, n, |j, k| polys[k].eval(&points[j]));
    Ok(m.det())
}

/// Exact rational image of a float polynomial, coefficient by coefficient.
pub fn to_exact(p: &Polynomial<f64>) -> Option<Polynomial<Rational>> {
    let coeffs = p
        .coeffs
        .iter()
        .map(|&c| Rational::from_float(c))
        .collect::<Option<Vec<_>>>()?;
    Some(Polynomial::new(coeffs))
}

/// Float image of any polynomial.
pub fn to_float<T: Scalar>(p: &Polynomial<T>) -> Polynomial<f64> {
    p.map(|c| c.to_f64())
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Binomial coefficient as `f64`, exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    num_integer::binomial(num_bigint::BigInt::from(n), num_bigint::BigInt::from(k))
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn rp(c: &[(i64, i64)]) -> Polynomial<Rational> {
        Polynomial::new(c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn ring_identities() {
        let a = rp(&[(1, 1), (1, 1)]);
        let b = rp(&[(-1, 1), (1, 1)]);
        assert_eq!(&a * &b, rp(&[(-1, 1), (0, 1), (1, 1)]));
        let p = rp(&[(-1, 2), (0, 1), (1, 1)]);
        assert_eq!(p.eval(&q(0, 1)), q(-1, 2));
        assert!(Polynomial::<Rational>::monomial(3).scale(&q(0, 1)).is_zero());
    }

    #[test]
    fn parity_classes() {
        assert_eq!(parity_of(&rp(&[(-1, 2), (0, 1), (1, 1)])), Parity::Even);
        assert_eq!(parity_of(&rp(&[(0, 1), (-3, 2), (0, 1), (1, 1)])), Parity::Odd);
        assert_eq!(parity_of(&rp(&[(0, 1), (1, 1), (1, 1)])), Parity::Mixed);
        assert_eq!(parity_of(&Polynomial::<Rational>::zero()), Parity::Zero);
    }

    #[test]
    fn kind_mismatch() {
        let a = DynPolynomial::Exact(rp(&[(1, 1)]));
        let b = DynPolynomial::Float(Polynomial::new(vec![1.0]));
        assert_eq!(a.apply(&b, PolyOp::Add), Err(Error::KindMismatch));
        let e = a.apply(&DynPolynomial::Exact(rp(&[(3, 1)])), PolyOp::Eval).unwrap();
        assert_eq!(e, DynValue::Exact(q(1, 1)));
    }

    #[test]
    fn sign_changes_examples() {
        let unit = Interval::new(-1.0, 1.0);
        let p = rp(&[(-1, 4), (0, 1), (1, 1)]);
        let r = sign_changes_in(&p, &unit, 64);
        assert_eq!(r.count, 2);
        let half = q(1, 2);
        assert!(r.brackets[0].lo <= -half.clone() && -half.clone() <= r.brackets[0].hi);
        assert!(r.brackets[1].lo <= half && half <= r.brackets[1].hi);

        let sq = rp(&[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(sign_changes_in(&sq, &unit, 64).count, 0);

        let quartic = rp(&[(1, 8), (0, 1), (-7, 4), (0, 1), (1, 1)]);
        assert_eq!(sign_changes_in(&quartic, &Interval::real_line(), 512).count, 4);
        let fq = to_float(&quartic);
        let fr = sign_changes_in(&fq, &Interval::real_line(), 512);
        assert_eq!(fr.count, 4);
        for b in &fr.brackets {
            assert!(b.hi - b.lo <= BRACKET_WIDTH);
        }
    }

    #[test]
    fn alternant_small_cases() {
        let polys: Vec<_> = (0..3).map(Polynomial::<Rational>::monomial).collect();
        let pts = [q(0, 1), q(1, 1), q(2, 1)];
        assert_eq!(alternant_det(&pts, &polys).unwrap(), q(2, 1));
        assert_eq!(alternant_det(&[q(5, 3)], &polys[..1]).unwrap(), q(1, 1));
        assert!(matches!(
            alternant_det(&pts[..2], &[polys[0].clone(), polys[2].clone()]),
            Err(Error::Degree(_))
        ));
    }

    #[test]
    fn display() {
        assert_eq!(rp(&[(1, 8), (0, 1), (-7, 4), (0, 1), (1, 1)]).to_string(), "x^4 - 7/4*x^2 + 1/8");
    }
}
