//! Field descriptors, valuations and scalar elements.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{Poly, RatFunc};
use crate::error::{Error, Result};

/// Which local field a value lives in.
///
/// `Padic` is modelled by ℚ with the p-adic valuation and `Funcfield` by
/// 𝔽_p(T) with the T-adic valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Field {
    Real,
    Padic { p: u64 },
    Funcfield { p: u64 },
}

impl Field {
    pub fn is_real(self) -> bool {
        matches!(self, Field::Real)
    }

    pub fn is_exact(self) -> bool {
        !self.is_real()
    }

    pub fn prime(self) -> Option<u64> {
        match self {
            Field::Real => None,
            Field::Padic { p } | Field::Funcfield { p } => Some(p),
        }
    }

    /// Characteristic of the field (0 for ℝ and ℚ).
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Funcfield { p } => p,
            _ => 0,
        }
    }

    /// An element of valuation one (for ℝ, the contraction base 1/2).
    pub fn uniformizer(self) -> FieldElement {
        match self {
            Field::Real => FieldElement::Real(0.5),
            Field::Padic { p } => FieldElement::from_i64(self, p as i64),
            Field::Funcfield { p } => FieldElement::Func(RatFunc::from_poly(Poly::t(p))),
        }
    }

    pub fn validate(self) -> Result<()> {
        if let Some(p) = self.prime() {
            if p > 1 << 31 {
                return Err(Error::InvalidInput(format!("prime {p} too large")));
            }
            if !is_prime(p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Padic { p } => write!(f, "Q({p}-adic)"),
            Field::Funcfield { p } => write!(f, "F_{p}(T)"),
        }
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Discrete valuation with a distinguished value for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, o: Valuation) -> Valuation {
        match (self, o) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("+inf"),
        }
    }
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn vp_int(x: &BigInt, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// A scalar in one of the supported fields.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldElement {
    Real(f64),
    PAdic { p: u64, value: BigRational },
    Func(RatFunc),
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Real(_) => Field::Real,
            FieldElement::PAdic { p, .. } => Field::Padic { p: *p },
            FieldElement::Func(f) => Field::Funcfield { p: f.prime() },
        }
    }

    pub fn zero(field: Field) -> Self {
        Self::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, x: i64) -> Self {
        match field {
            Field::Real => FieldElement::Real(x as f64),
            Field::Padic { p } => FieldElement::PAdic {
                p,
                value: BigRational::from_integer(x.into()),
            },
            Field::Funcfield { p } => FieldElement::Func(RatFunc::constant(p, x)),
        }
    }

    pub fn from_ratio(field: Field, num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        match field {
            Field::Real => FieldElement::Real(num as f64 / den as f64),
            Field::Padic { p } => FieldElement::PAdic {
                p,
                value: BigRational::new(num.into(), den.into()),
            },
            Field::Funcfield { p } => {
                let d = RatFunc::constant(p, den)
                    .inv()
                    .expect("denominator divisible by p");
                FieldElement::Func(RatFunc::constant(p, num).mul(&d))
            }
        }
    }

    pub fn rational(p: u64, value: BigRational) -> Self {
        FieldElement::PAdic { p, value }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            FieldElement::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::PAdic { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn as_ratfunc(&self) -> Option<&RatFunc> {
        match self {
            FieldElement::Func(f) => Some(f),
            _ => None,
        }
    }

    /// Exact zero test (for reals, literal zero).
    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Real(x) => *x == 0.0,
            FieldElement::PAdic { value, .. } => value.is_zero(),
            FieldElement::Func(f) => f.is_zero(),
        }
    }

    /// Zero test with the real tolerance `tol`; exact for other fields.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self {
            FieldElement::Real(x) => x.abs() <= tol,
            _ => self.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Real(x) => *x == 1.0,
            FieldElement::PAdic { value, .. } => value.is_one(),
            FieldElement::Func(f) => f.num().is_one() && f.den().is_one(),
        }
    }

    pub fn valuation(&self) -> Result<Valuation> {
        match self {
            FieldElement::Real(_) => Err(Error::RealHasNoValuation),
            FieldElement::PAdic { p, value } => {
                if value.is_zero() {
                    Ok(Valuation::Infinite)
                } else {
                    Ok(Valuation::Finite(
                        vp_int(value.numer(), *p) - vp_int(value.denom(), *p),
                    ))
                }
            }
            FieldElement::Func(f) => Ok(f.ord_t().map_or(Valuation::Infinite, Valuation::Finite)),
        }
    }

    /// |x|, with |x| = p^(-v(x)) in the non-archimedean cases.
    pub fn abs(&self) -> f64 {
        match self {
            FieldElement::Real(x) => x.abs(),
            _ => match self.valuation().expect("exact field") {
                Valuation::Infinite => 0.0,
                Valuation::Finite(v) => (self.field().prime().unwrap() as f64).powi(-(v as i32)),
            },
        }
    }

    /// Approximate real value; p-adic rationals convert as ordinary rationals.
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            FieldElement::Real(x) => Some(*x),
            FieldElement::PAdic { value, .. } => value.to_f64(),
            FieldElement::Func(_) => None,
        }
    }

    pub fn inv(&self) -> Option<Self> {
        match self {
            FieldElement::Real(x) => (*x != 0.0).then(|| FieldElement::Real(1.0 / x)),
            FieldElement::PAdic { p, value } => (!value.is_zero()).then(|| FieldElement::PAdic {
                p: *p,
                value: value.recip(),
            }),
            FieldElement::Func(f) => f.inv().map(FieldElement::Func),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut exp = e.unsigned_abs();
        let mut b = base;
        let mut acc = FieldElement::one(self.field());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            exp >>= 1;
        }
        acc
    }

    /// Parses the textual encoding of a scalar for the given field.
    pub fn parse(field: Field, s: &str) -> Result<Self> {
        let t = s.trim();
        match field {
            Field::Real => parse_real(t).map(FieldElement::Real),
            Field::Padic { p } => parse_rational(t).map(|value| FieldElement::PAdic { p, value }),
            Field::Funcfield { p } => RatFunc::parse(p, t).map(FieldElement::Func),
        }
    }

    /// Textual encoding; round-trips through [`FieldElement::parse`].
    pub fn encode(&self) -> String {
        match self {
            FieldElement::Real(x) => format!("{x:?}"),
            FieldElement::PAdic { value, .. } => {
                if value.is_integer() {
                    value.numer().to_string()
                } else {
                    format!("{}/{}", value.numer(), value.denom())
                }
            }
            FieldElement::Func(f) => f.to_string(),
        }
    }

    fn check_same(&self, o: &Self) {
        assert_eq!(self.field(), o.field(), "mixed-field arithmetic");
    }
}

fn parse_real(s: &str) -> Result<f64> {
    if let Some((a, b)) = s.split_once('/') {
        let a = parse_real(a)?;
        let b = parse_real(b)?;
        if b == 0.0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(a / b);
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("not a real number: {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite real: {s:?}")));
    }
    Ok(x)
}

/// Parses "a", "a/b", or a finite decimal "1.25" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| bad())?;
        let den: BigInt = b.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = BigRational::new(whole * &scale + frac_num, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $real:expr, $rat:expr, $func:expr) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &'a FieldElement) -> FieldElement {
                self.check_same(o);
                match (self, o) {
                    (FieldElement::Real(a), FieldElement::Real(b)) => {
                        FieldElement::Real($real(*a, *b))
                    }
                    (FieldElement::PAdic { p, value: a }, FieldElement::PAdic { value: b, .. }) => {
                        FieldElement::PAdic {
                            p: *p,
                            value: $rat(a, b),
                        }
                    }
                    (FieldElement::Func(a), FieldElement::Func(b)) => {
                        FieldElement::Func($func(a, b))
                    }
                    _ => unreachable!(),
                }
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &'a FieldElement) -> FieldElement {
                (&self).$m(o)
            }
        }
    };
}

binop!(
    Add,
    add,
    |a: f64, b: f64| a + b,
    |a: &BigRational, b: &BigRational| a + b,
    |a: &RatFunc, b: &RatFunc| a.add(b)
);
binop!(
    Sub,
    sub,
    |a: f64, b: f64| a - b,
    |a: &BigRational, b: &BigRational| a - b,
    |a: &RatFunc, b: &RatFunc| a.sub(b)
);
binop!(
    Mul,
    mul,
    |a: f64, b: f64| a * b,
    |a: &BigRational, b: &BigRational| a * b,
    |a: &RatFunc, b: &RatFunc| a.mul(b)
);
binop!(
    Div,
    div,
    |a: f64, b: f64| a / b,
    |a: &BigRational, b: &BigRational| {
        assert!(!b.is_zero(), "division by zero");
        a / b
    },
    |a: &RatFunc, b: &RatFunc| a.mul(&b.inv().expect("division by zero"))
);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Real(a) => FieldElement::Real(-a),
            FieldElement::PAdic { p, value } => FieldElement::PAdic {
                p: *p,
                value: -value,
            },
            FieldElement::Func(f) => FieldElement::Func(f.neg()),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Orders by absolute value; used for pivot choice.
pub(crate) fn cmp_abs(a: &FieldElement, b: &FieldElement) -> Ordering {
    match (a, b) {
        (FieldElement::Real(x), FieldElement::Real(y)) => x.abs().total_cmp(&y.abs()),
        (FieldElement::PAdic { value: x, .. }, FieldElement::PAdic { value: y, .. }) => {
            x.abs().cmp(&y.abs())
        }
        _ => a.abs().total_cmp(&b.abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5(s: &str) -> FieldElement {
        FieldElement::parse(Field::Padic { p: 5 }, s).unwrap()
    }

    #[test]
    fn padic_valuations() {
        assert_eq!(q5("50").valuation().unwrap(), Valuation::Finite(2));
        assert_eq!(q5("3/25").valuation().unwrap(), Valuation::Finite(-2));
        assert_eq!(q5("0").valuation().unwrap(), Valuation::Infinite);
        assert_eq!(
            FieldElement::Real(2.0).valuation(),
            Err(Error::RealHasNoValuation)
        );
        assert_eq!(q5("3/25").abs(), 25.0);
    }

    #[test]
    fn funcfield_valuation() {
        let f = FieldElement::parse(Field::Funcfield { p: 3 }, "(T^3+T^2)/(T+1)").unwrap();
        assert_eq!(f.valuation().unwrap(), Valuation::Finite(2));
    }

    #[test]
    fn encoding_round_trip() {
        for s in ["7", "-3/4", "1/125"] {
            assert_eq!(q5(s).encode(), s);
        }
        assert_eq!(q5("1.25"), q5("5/4"));
        let x = FieldElement::Real(std::f64::consts::E);
        assert_eq!(FieldElement::parse(Field::Real, &x.encode()).unwrap(), x);
    }

    #[test]
    fn serde_field_tag() {
        let f: Field = serde_json::from_str(r#"{"type":"padic","p":5}"#).unwrap();
        assert_eq!(f, Field::Padic { p: 5 });
        let r: Field = serde_json::from_str(r#"{"type":"real"}"#).unwrap();
        assert_eq!(r, Field::Real);
        assert_eq!(
            serde_json::to_string(&Field::Funcfield { p: 3 }).unwrap(),
            r#"{"type":"funcfield","p":3}"#
        );
    }

    #[test]
    fn powers() {
        let x = q5("1/5");
        assert_eq!(x.pow(3), q5("1/125"));
        assert_eq!(x.pow(-2), q5("25"));
        assert!(x.pow(0).is_one());
    }
}
