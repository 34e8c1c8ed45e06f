//! Polynomials over a prime field 𝔽_p and the rational function field 𝔽_p(T).
//!
//! Coefficients are stored little-endian as residues in `0..p`; the zero
//! polynomial has an empty coefficient vector. Rational functions are kept in
//! lowest terms with a monic denominator, so structural equality is equality
//! of field elements.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a, p - 2, p)
}

impl Poly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut poly = Poly { p, coeffs };
        poly.trim();
        poly
    }

    pub fn zero(p: u64) -> Self {
        Poly {
            p,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(p: u64, c: i64) -> Self {
        let r = c.rem_euclid(p as i64) as u64;
        Poly::new(p, vec![r])
    }

    /// The indeterminate T.
    pub fn t(p: u64) -> Self {
        Poly::new(p, vec![0, 1])
    }

    pub fn monomial(p: u64, coeff: u64, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = coeff;
        Poly::new(p, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Order of vanishing at T = 0; `None` for zero.
    pub fn ord_t(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let p = self.p;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % p
            })
            .collect();
        Poly::new(p, coeffs)
    }

    pub fn neg(&self) -> Poly {
        let p = self.p;
        Poly::new(p, self.coeffs.iter().map(|&c| (p - c) % p).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        Poly::new(p, out)
    }

    pub fn scale(&self, c: u64) -> Poly {
        let p = self.p;
        Poly::new(p, self.coeffs.iter().map(|&a| a * (c % p) % p).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(mod_inv(self.leading(), self.p))
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dd = divisor.degree().unwrap();
        let inv_lead = mod_inv(divisor.leading(), p);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(p), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] * inv_lead % p;
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = (rem[k + j] + p - c * b % p) % p;
            }
        }
        (Poly::new(p, quot), Poly::new(p, rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn divides(&self, other: &Poly) -> bool {
        !self.is_zero() && other.div_rem(self).1.is_zero()
    }

    pub fn pow(&self, mut exp: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(self.p, 1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Factorization into monic irreducibles (with multiplicity) by trial
    /// division. Returns `None` when the search would exceed `budget` trial
    /// divisors.
    pub fn factor(&self, budget: u64) -> Option<(u64, Vec<Poly>)> {
        assert!(!self.is_zero());
        let p = self.p;
        let unit = self.leading();
        let mut rest = self.monic();
        let mut factors = Vec::new();
        let mut spent = 0u64;
        let mut d = 1usize;
        while rest.degree().unwrap_or(0) >= 2 * d {
            let count = p.checked_pow(d as u32)?;
            for tail in 0..count {
                spent += 1;
                if spent > budget {
                    return None;
                }
                let mut coeffs = Vec::with_capacity(d + 1);
                let mut t = tail;
                for _ in 0..d {
                    coeffs.push(t % p);
                    t /= p;
                }
                coeffs.push(1);
                let cand = Poly::new(p, coeffs);
                while cand.divides(&rest) {
                    rest = rest.div_rem(&cand).0;
                    factors.push(cand.clone());
                }
                if rest.degree().unwrap_or(0) < 2 * d {
                    break;
                }
            }
            d += 1;
        }
        if rest.degree().unwrap_or(0) >= 1 {
            factors.push(rest);
        }
        Some((unit, factors))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (deg, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (deg, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("T")?,
                (1, c) => write!(f, "{c}*T")?,
                (d, 1) => write!(f, "T^{d}")?,
                (d, c) => write!(f, "{c}*T^{d}")?,
            }
        }
        Ok(())
    }
}

/// Element of 𝔽_p(T) in lowest terms, denominator monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let p = num.prime();
        if num.is_zero() {
            return RatFunc {
                num,
                den: Poly::constant(p, 1),
            };
        }
        let g = num.gcd(&den);
        let num = num.div_rem(&g).0;
        let den = den.div_rem(&g).0;
        let lead_inv = mod_inv(den.leading(), p);
        RatFunc {
            num: num.scale(lead_inv),
            den: den.scale(lead_inv),
        }
    }

    pub fn from_poly(num: Poly) -> Self {
        let p = num.prime();
        RatFunc {
            num,
            den: Poly::constant(p, 1),
        }
    }

    pub fn zero(p: u64) -> Self {
        Self::from_poly(Poly::zero(p))
    }

    pub fn constant(p: u64, c: i64) -> Self {
        Self::from_poly(Poly::constant(p, c))
    }

    pub fn prime(&self) -> u64 {
        self.num.prime()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// T-adic valuation, `None` for zero.
    pub fn ord_t(&self) -> Option<i64> {
        let a = self.num.ord_t()? as i64;
        let b = self.den.ord_t().expect("nonzero denominator") as i64;
        Some(a - b)
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        Self::normalized(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            None
        } else {
            Some(Self::normalized(self.den.clone(), self.num.clone()))
        }
    }

    pub fn parse(p: u64, s: &str) -> Result<RatFunc> {
        let s = s.trim();
        let mut depth = 0i32;
        let mut split = None;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => {
                    if split.is_some() {
                        return Err(Error::Parse(format!("more than one '/' in {s:?}")));
                    }
                    split = Some(i);
                }
                _ => {}
            }
        }
        match split {
            None => Ok(Self::from_poly(parse_poly(p, s)?)),
            Some(i) => {
                let num = parse_poly(p, &s[..i])?;
                let den = parse_poly(p, &s[i + 1..])?;
                if den.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Self::normalized(num, den))
            }
        }
    }
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

/// Parses sums of terms like `3*T^2`, `T`, `-2*T`, `5`. Coefficients are
/// reduced modulo p.
pub fn parse_poly(p: u64, s: &str) -> Result<Poly> {
    let body: String = strip_parens(s)
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if body.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bad = || Error::Parse(format!("malformed polynomial {s:?}"));
    let mut acc = Poly::zero(p);
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in body.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !body[..i].ends_with('^') {
            terms.push(&body[start..i]);
            start = i;
        }
    }
    terms.push(&body[start..]);
    for term in terms {
        let (negative, term) = match term.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        if term.is_empty() {
            return Err(bad());
        }
        let (coeff_str, var_part) = match term.find('T') {
            Some(idx) => {
                let c = term[..idx].trim_end_matches('*');
                (c, Some(&term[idx + 1..]))
            }
            None => (term, None),
        };
        let coeff: i64 = if coeff_str.is_empty() {
            1
        } else {
            coeff_str.parse().map_err(|_| bad())?
        };
        let degree: usize = match var_part {
            None => 0,
            Some("") => 1,
            Some(rest) => rest
                .strip_prefix('^')
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?,
        };
        let signed = if negative { -coeff } else { coeff };
        let c = signed.rem_euclid(p as i64) as u64;
        acc = acc.add(&Poly::monomial(p, c, degree));
    }
    Ok(acc)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |poly: &Poly| {
            let s = poly.to_string();
            if poly.coeffs().iter().filter(|&&c| c != 0).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let p = 3;
        // (T+1)(T+2) = T^2 + 2 over F_3
        let a = Poly::new(p, vec![1, 1]);
        let b = Poly::new(p, vec![2, 1]);
        let prod = a.mul(&b);
        assert_eq!(prod, Poly::new(p, vec![2, 0, 1]));
        let (q, r) = prod.div_rem(&a);
        assert_eq!(q, b);
        assert!(r.is_zero());
        assert_eq!(prod.gcd(&a.mul(&a)), a);
    }

    #[test]
    fn rational_functions_reduce() {
        let p = 5;
        let f = RatFunc::parse(p, "(T^2+4)/(T+1)").unwrap();
        // T^2 - 1 = (T-1)(T+1)
        assert_eq!(f, RatFunc::parse(p, "T+4").unwrap());
        let g = RatFunc::parse(p, "1/T").unwrap();
        assert_eq!(g.ord_t(), Some(-1));
        assert_eq!(f.mul(&g).mul(&g.inv().unwrap()), f);
    }

    #[test]
    fn display_round_trip() {
        let p = 7;
        for s in ["3*T^2+1", "T", "(T+1)/(T^2+3)", "1/T", "0", "6*T^3+2*T"] {
            let f = RatFunc::parse(p, s).unwrap();
            let again = RatFunc::parse(p, &f.to_string()).unwrap();
            assert_eq!(f, again, "{s}");
        }
        assert_eq!(RatFunc::parse(p, "-1").unwrap().to_string(), "6");
    }

    #[test]
    fn factorization() {
        let p = 3;
        let f = Poly::new(p, vec![0, 0, 1]).mul(&Poly::new(p, vec![1, 0, 1])); // T^2 (T^2+1)
        let (unit, factors) = f.scale(2).factor(10_000).unwrap();
        assert_eq!(unit, 2);
        let mut prod = Poly::constant(p, 1);
        for q in &factors {
            prod = prod.mul(q);
        }
        assert_eq!(prod, f);
        assert_eq!(factors.len(), 3);
    }
}
