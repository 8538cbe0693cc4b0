//! Measures, their moments, and Gram (Hankel) matrices.
//!
//! Moments are stored normalized, `mu_n = c_n / c_0`. The zeroth moment is
//! carried separately: for the built-in weights it holds a transcendental
//! factor (`sqrt(pi)`, `Gamma(z)`) that cancels from every monic quantity.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Polynomial;
use crate::quadrature::gauss_legendre;
use crate::scalar::{looks_like_float, parse_rational, rational_to_f64, Rational, Scalar};

/// Closed real interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn half_line() -> Self {
        Self::new(0.0, f64::INFINITY)
    }

    pub fn is_symmetric(&self) -> bool {
        self.lo == -self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn to_json(&self) -> Value {
        let end = |x: f64| {
            if x.is_finite() {
                json!(x)
            } else if x > 0.0 {
                json!("inf")
            } else {
                json!("-inf")
            }
        };
        json!([end(self.lo), end(self.hi)])
    }
}

/// Moment values as read from a table.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentData {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl MomentData {
    pub fn len(&self) -> usize {
        match self {
            MomentData::Exact(v) => v.len(),
            MomentData::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get<T: Scalar>(&self, n: usize) -> Result<T> {
        match self {
            MomentData::Exact(v) => Ok(T::from_rational(&v[n])),
            MomentData::Float(v) => T::from_f64(v[n]),
        }
    }

    fn is_zero_at(&self, n: usize) -> bool {
        match self {
            MomentData::Exact(v) => v[n].is_zero(),
            MomentData::Float(v) => v[n] == 0.0,
        }
    }
}

/// Fixed rule used to integrate a numeric weight: composite Gauss–Legendre
/// with `panels` equal subintervals of the (finite) domain and `nodes` points
/// per panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    pub nodes: usize,
    pub panels: usize,
}

pub type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Weight {
    /// `exp(-alpha x^2)` on the real line.
    Gaussian { alpha: Rational },
    /// `exp(-alpha x) x^(z-1)` on the half line.
    Gamma { alpha: Rational, z: Rational },
    Tabulated { mu: MomentData, c0: f64 },
    Numeric { eval: WeightFn, rule: QuadratureRule },
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Gaussian { alpha } => write!(f, "Gaussian(alpha={alpha})"),
            Weight::Gamma { alpha, z } => write!(f, "Gamma(alpha={alpha}, z={z})"),
            Weight::Tabulated { mu, c0 } => {
                write!(f, "Tabulated({} moments, c0={c0})", mu.len())
            }
            Weight::Numeric { rule, .. } => write!(f, "Numeric({rule:?})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Measure {
    domain: Interval,
    weight: Weight,
    symmetric: bool,
}

/// The zeroth moment, numerically and as a readable expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ZerothMoment {
    pub value: f64,
    pub symbolic: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<T> {
    pub c0: ZerothMoment,
    pub mu: Vec<T>,
    pub exact: bool,
    pub max_order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T> {
    pub entries: Matrix<T>,
    pub basis_label: String,
}

fn positive(name: &'static str, v: &Rational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter {
            name,
            value: v.to_string(),
        })
    }
}

impl Measure {
    pub fn gaussian(alpha: Rational) -> Result<Self> {
        positive("alpha", &alpha)?;
        Ok(Self {
            domain: Interval::real_line(),
            weight: Weight::Gaussian { alpha },
            symmetric: true,
        })
    }

    pub fn gamma(alpha: Rational, z: Rational) -> Result<Self> {
        positive("alpha", &alpha)?;
        positive("z", &z)?;
        Ok(Self {
            domain: Interval::half_line(),
            weight: Weight::Gamma { alpha, z },
            symmetric: false,
        })
    }

    /// `mu[0]` must be 1. The measure is flagged symmetric when the domain is
    /// symmetric and every odd moment is exactly zero.
    pub fn tabulated(mu: MomentData, c0: f64, domain: Interval) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::Moment("empty moment table".into()));
        }
        let first_is_one = match &mu {
            MomentData::Exact(v) => v[0].is_one(),
            MomentData::Float(v) => v[0] == 1.0,
        };
        if !first_is_one {
            return Err(Error::Moment("normalized moment mu_0 must equal 1".into()));
        }
        if let MomentData::Float(v) = &mu {
            if let Some(n) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::Moment(format!("moment {n} is not finite")));
            }
        }
        if !(c0.is_finite() && c0 > 0.0) {
            return Err(Error::Moment(format!("c0 = {c0} must be positive")));
        }
        let symmetric =
            domain.is_symmetric() && (1..mu.len()).step_by(2).all(|n| mu.is_zero_at(n));
        Ok(Self {
            domain,
            weight: Weight::Tabulated { mu, c0 },
            symmetric,
        })
    }

    /// A weight known only pointwise, integrated with a declared rule. The
    /// domain must be bounded. With `symmetric` set, odd moments are taken
    /// as exactly zero after checking they are negligible.
    pub fn numeric(
        domain: Interval,
        eval: WeightFn,
        rule: QuadratureRule,
        symmetric: bool,
    ) -> Result<Self> {
        if !domain.is_bounded() || !(domain.lo < domain.hi) {
            return Err(Error::InvalidMeasure(
                "numeric weights need a bounded, nonempty domain".into(),
            ));
        }
        if rule.nodes == 0 || rule.panels == 0 {
            return Err(Error::InvalidMeasure("empty quadrature rule".into()));
        }
        if symmetric && !domain.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(Self {
            domain,
            weight: Weight::Numeric { eval, rule },
            symmetric,
        })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// True when every moment is an exact rational.
    pub fn has_rational_moments(&self) -> bool {
        match &self.weight {
            Weight::Gaussian { .. } | Weight::Gamma { .. } => true,
            Weight::Tabulated { mu, .. } => matches!(mu, MomentData::Exact(_)),
            Weight::Numeric { .. } => false,
        }
    }

    /// Highest moment order available, if finite.
    pub fn available_order(&self) -> Option<usize> {
        match &self.weight {
            Weight::Tabulated { mu, .. } => Some(mu.len() - 1),
            _ => None,
        }
    }

    /// Weight value at `x`, when the weight is known pointwise.
    pub fn weight_at(&self, x: f64) -> Option<f64> {
        if !(self.domain.lo..=self.domain.hi).contains(&x) {
            return Some(0.0);
        }
        match &self.weight {
            Weight::Gaussian { alpha } => Some((-rational_to_f64(alpha) * x * x).exp()),
            Weight::Gamma { alpha, z } => {
                Some((-rational_to_f64(alpha) * x).exp() * x.powf(rational_to_f64(z) - 1.0))
            }
            Weight::Numeric { eval, .. } => Some(eval(x)),
            Weight::Tabulated { .. } => None,
        }
    }

    pub fn zeroth_moment(&self) -> Result<ZerothMoment> {
        Ok(match &self.weight {
            Weight::Gaussian { alpha } => ZerothMoment {
                value: (std::f64::consts::PI / rational_to_f64(alpha)).sqrt(),
                symbolic: format!("sqrt(pi/{alpha})"),
            },
            Weight::Gamma { alpha, z } => {
                let (a, zf) = (rational_to_f64(alpha), rational_to_f64(z));
                ZerothMoment {
                    value: (statrs::function::gamma::ln_gamma(zf) - zf * a.ln()).exp(),
                    symbolic: format!("Gamma({z})/{alpha}^({z})"),
                }
            }
            Weight::Tabulated { c0, .. } => ZerothMoment {
                value: *c0,
                symbolic: format!("{c0}"),
            },
            Weight::Numeric { .. } => {
                let c0 = self.raw_numeric_moments(0)?[0];
                ZerothMoment {
                    value: c0,
                    symbolic: format!("{c0}"),
                }
            }
        })
    }

    fn raw_numeric_moments(&self, max_order: usize) -> Result<Vec<f64>> {
        let Weight::Numeric { eval, rule } = &self.weight else {
            unreachable!("numeric weight expected")
        };
        let rule_1d = gauss_legendre(rule.nodes)?;
        let (a, b) = (self.domain.lo, self.domain.hi);
        let width = (b - a) / rule.panels as f64;
        let mut c = vec![0.0; max_order + 1];
        for panel in 0..rule.panels {
            let left = a + width * panel as f64;
            for (t, w) in rule_1d.nodes.iter().zip(&rule_1d.weights) {
                // reference rule lives on [-1, 1] with weights summing to 1
                let x = left + 0.5 * width * (t + 1.0);
                let wx = eval(x);
                if !wx.is_finite() || wx < 0.0 {
                    return Err(Error::Moment(format!("weight({x}) = {wx}")));
                }
                let mut xp = 1.0;
                for cn in c.iter_mut() {
                    *cn += w * width * wx * xp;
                    xp *= x;
                }
            }
        }
        if let Some(n) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::Moment(format!("moment {n} is not finite")));
        }
        if !(c[0] > 0.0) {
            return Err(Error::Moment("zeroth moment is not positive".into()));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> Value {
        let weight = match &self.weight {
            Weight::Gaussian { alpha } => json!({"gaussian": {"alpha": alpha.to_string()}}),
            Weight::Gamma { alpha, z } => {
                json!({"gamma": {"alpha": alpha.to_string(), "z": z.to_string()}})
            }
            Weight::Tabulated { mu, c0 } => json!({"tabulated": {"moments": mu.len(), "c0": c0}}),
            Weight::Numeric { rule, .. } => {
                json!({"numeric": {"nodes": rule.nodes, "panels": rule.panels}})
            }
        };
        json!({"domain": self.domain.to_json(), "weight": weight, "symmetric": self.symmetric})
    }
}

/// Rising factorial `(z)_n`.
pub fn pochhammer(z: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, k| {
        acc * (z + Rational::from_integer(k.into()))
    })
}

/// `(2k-1)!!`, with `(-1)!! = 1`.
pub fn double_factorial_odd(k: usize) -> Rational {
    (1..=k).fold(Rational::one(), |acc, j| {
        acc * Rational::from_integer((2 * j - 1).into())
    })
}

/// Normalized moments `mu_0..mu_max_order`.
pub fn moments<T: Scalar>(measure: &Measure, max_order: usize) -> Result<MomentSequence<T>> {
    let c0 = measure.zeroth_moment()?;
    let mu: Vec<T> = match &measure.weight {
        Weight::Gaussian { alpha } => (0..=max_order)
            .map(|n| {
                if n % 2 == 1 {
                    T::zero()
                } else {
                    let k = n / 2;
                    let denom = num_traits::pow(Rational::from_integer(2.into()) * alpha, k);
                    T::from_rational(&(double_factorial_odd(k) / denom))
                }
            })
            .collect(),
        Weight::Gamma { alpha, z } => (0..=max_order)
            .map(|n| T::from_rational(&(pochhammer(z, n) / num_traits::pow(alpha.clone(), n))))
            .collect(),
        Weight::Tabulated { mu, .. } => {
            if max_order >= mu.len() {
                return Err(Error::InsufficientMoments {
                    needed: max_order,
                    available: mu.len() - 1,
                });
            }
            (0..=max_order).map(|n| mu.get(n)).collect::<Result<_>>()?
        }
        Weight::Numeric { .. } => {
            if T::is_exact() {
                return Err(Error::NotRepresentable(
                    "numeric weights have no exact moments".into(),
                ));
            }
            let raw = measure.raw_numeric_moments(max_order)?;
            let scale: f64 = raw.iter().map(|v| f64::abs(*v)).fold(0.0, f64::max);
            let mut out = Vec::with_capacity(raw.len());
            for (n, c) in raw.iter().enumerate() {
                let v = if measure.symmetric && n % 2 == 1 {
                    if f64::abs(*c) > 1e-10 * scale {
                        return Err(Error::NotSymmetric);
                    }
                    0.0
                } else {
                    c / raw[0]
                };
                out.push(T::from_f64(v)?);
            }
            out
        }
    };
    Ok(MomentSequence {
        c0,
        mu,
        exact: T::is_exact(),
        max_order,
    })
}

impl<T: Scalar> MomentSequence<T> {
    pub fn get(&self, n: usize) -> Result<&T> {
        self.mu.get(n).ok_or(Error::InsufficientMoments {
            needed: n,
            available: self.max_order,
        })
    }

    /// `sum_{j,k} p_j q_k mu_{j+k}`, in units of `c0`.
    pub fn inner(&self, p: &Polynomial<T>, q: &Polynomial<T>) -> Result<T> {
        let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
            return Ok(T::zero());
        };
        if dp + dq > self.max_order {
            return Err(Error::InsufficientMoments {
                needed: dp + dq,
                available: self.max_order,
            });
        }
        let mut acc = T::zero();
        for (j, a) in p.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut row = T::zero();
            for (k, b) in q.coeffs().iter().enumerate() {
                row = row + b.clone() * self.mu[j + k].clone();
            }
            acc = acc + a.clone() * row;
        }
        Ok(acc)
    }

    /// Gram matrix of an arbitrary polynomial family.
    pub fn gram(&self, basis: &[Polynomial<T>], label: &str) -> Result<GramMatrix<T>> {
        let n = basis.len();
        let mut entries = Matrix::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                let v = self.inner(&basis[j], &basis[k])?;
                entries[(j, k)] = v.clone();
                entries[(k, j)] = v;
            }
        }
        Ok(GramMatrix {
            entries,
            basis_label: label.to_string(),
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c0": {"value": self.c0.value, "symbolic": self.c0.symbolic},
            "mu": self.mu.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "exact": self.exact,
            "max_order": self.max_order,
        })
    }
}

/// `G[j][k] = mu_{j+k}` for `j, k < n`.
pub fn hankel_matrix<T: Scalar>(moments: &MomentSequence<T>, n: usize) -> Result<GramMatrix<T>> {
    if n > 0 && 2 * (n - 1) > moments.max_order {
        return Err(Error::InsufficientMoments {
            needed: 2 * (n - 1),
            available: moments.max_order,
        });
    }
    Ok(GramMatrix {
        entries: Matrix::from_fn(n, n, |j, k| moments.mu[j + k].clone()),
        basis_label: "monomials".into(),
    })
}

pub fn inner_product<T: Scalar>(
    measure: &Measure,
    p: &Polynomial<T>,
    q: &Polynomial<T>,
) -> Result<T> {
    let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
        return Ok(T::zero());
    };
    moments::<T>(measure, dp + dq)?.inner(p, q)
}

impl<T: Scalar> GramMatrix<T> {
    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn leading_minors(&self) -> Vec<T> {
        (0..=self.size()).map(|n| self.entries.leading(n).det()).collect()
    }
}

/// A moment table read from CSV (`n,mu_n` rows) or JSON
/// (`{"c0": ..., "mu": [...]}`).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub mu: MomentData,
    pub c0: f64,
}

impl MomentTable {
    /// Sniffs the format: text starting with `{` is JSON, anything else CSV.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mu = v
            .get("mu")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("moment table needs a \"mu\" array".into()))?;
        let literals: Vec<String> = mu
            .iter()
            .map(|x| match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(Error::Parse(format!("bad moment entry {other}"))),
            })
            .collect::<Result<_>>()?;
        let c0 = match v.get("c0") {
            None | Some(Value::Null) => 1.0,
            Some(Value::Number(n)) => n.as_f64().unwrap_or(f64::NAN),
            Some(Value::String(s)) => rational_to_f64(&parse_rational(s)?),
            Some(other) => return Err(Error::Parse(format!("bad c0 {other}"))),
        };
        Ok(Self {
            mu: classify(&literals)?,
            c0,
        })
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut literals = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("row {row}: expected `n,mu_n`")));
            }
            if row == 0 && rec[0].parse::<usize>().is_err() {
                continue; // header
            }
            let n: usize = rec[0]
                .parse()
                .map_err(|_| Error::Parse(format!("row {row}: bad index {:?}", &rec[0])))?;
            if n != literals.len() {
                return Err(Error::Parse(format!(
                    "moment indices must run 0, 1, 2, ...; found {n} at position {}",
                    literals.len()
                )));
            }
            literals.push(rec[1].to_string());
        }
        Ok(Self {
            mu: classify(&literals)?,
            c0: 1.0,
        })
    }

    pub fn into_measure(self, domain: Interval) -> Result<Measure> {
        Measure::tabulated(self.mu, self.c0, domain)
    }
}

/// Exact when every literal is an integer or `p/q`; float otherwise.
fn classify(literals: &[String]) -> Result<MomentData> {
    if literals.iter().any(|s| looks_like_float(s)) {
        literals
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .or_else(|_| parse_rational(s).map(|r| rational_to_f64(&r)))
                    .map_err(|_| Error::Parse(format!("bad moment {s:?}")))
            })
            .collect::<Result<_>>()
            .map(MomentData::Float)
    } else {
        literals
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_>>()
            .map(MomentData::Exact)
    }
}
