//! Dense univariate polynomials with arbitrary-precision integer coefficients.
//!
//! Every polynomial the crate produces (reliability, split reliability,
//! F-polynomials, forge witnesses) has integer coefficients; only evaluation
//! points are rational.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("clear_compose needs deg F <= m, got deg F = {deg} with m = {m}")]
    DegreeExceedsEdgeCount { deg: usize, m: usize },
}

/// Exact sign of a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: &BigInt) -> Sign {
        match x.sign() {
            num_bigint::Sign::Minus => Sign::Negative,
            num_bigint::Sign::NoSign => Sign::Zero,
            num_bigint::Sign::Plus => Sign::Positive,
        }
    }

    pub fn of_rational(x: &Rational) -> Sign {
        Sign::of(x.numer())
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            -1 => Some(Sign::Negative),
            0 => Some(Sign::Zero),
            1 => Some(Sign::Positive),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    /// True when both signs are nonzero and opposite.
    pub fn opposes(self, other: Sign) -> bool {
        matches!(
            (self, other),
            (Sign::Negative, Sign::Positive) | (Sign::Positive, Sign::Negative)
        )
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match self.as_i8() * rhs.as_i8() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Sign, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_i8(v).ok_or_else(|| D::Error::custom(format!("sign must be -1, 0 or 1, got {v}")))
    }
}

/// Dense polynomial in `q`; `coeffs[i]` is the coefficient of `q^i`.
///
/// The zero polynomial is the empty coefficient vector. Its degree is `None`,
/// which orders below every `Some(d)`, so degree comparisons behave as if the
/// zero polynomial had degree negative infinity.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * q^deg`
    pub fn monomial(c: BigInt, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = c;
        Polynomial { coeffs }
    }

    /// The polynomial `q`.
    pub fn q() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    /// `1 - q`
    pub fn one_minus_q() -> Self {
        Self::from_i64s(&[1, -1])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Coefficient of `q^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Numerator of `p(a/b)` scaled by `b^deg`, i.e. `sum c_i a^i b^(deg-i)`.
    /// Shares its sign with `p(a/b)` because `b > 0`.
    fn eval_scaled(&self, x: &Rational) -> BigInt {
        let (a, b) = (x.numer(), x.denom());
        let mut it = self.coeffs.iter().rev();
        let Some(lead) = it.next() else {
            return BigInt::zero();
        };
        let mut acc = lead.clone();
        if b.is_one() {
            for c in it {
                acc = acc * a + c;
            }
        } else {
            let mut bpow = BigInt::one();
            for c in it {
                bpow *= b;
                acc = acc * a + c * &bpow;
            }
        }
        acc
    }

    /// Exact value at a rational point (Horner over integers, one final division).
    pub fn eval(&self, x: &Rational) -> Rational {
        let Some(d) = self.degree() else {
            return Rational::zero();
        };
        let num = self.eval_scaled(x);
        let den = num_traits::pow(x.denom().clone(), d);
        Rational::new(num, den)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Exact sign of `p(x)`.
    pub fn sign_at(&self, x: &Rational) -> Sign {
        Sign::of(&self.eval_scaled(x))
    }

    /// Greatest common divisor of the coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the (positive) content; the sign of every value is preserved.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Polynomial { coeffs: self.coeffs.iter().map(|c| c / &g).collect() }
    }

    /// Pseudo-remainder: `lc(d)^(deg self - deg d + 1) * self mod d`.
    /// Panics if `d` is zero.
    pub fn pseudo_rem(&self, d: &Polynomial) -> Polynomial {
        let dd = d.degree().expect("pseudo_rem by zero polynomial");
        let Some(sd) = self.degree() else {
            return Polynomial::zero();
        };
        if sd < dd {
            return self.clone();
        }
        let lc = d.leading_coeff().unwrap();
        let mut r = self.clone();
        let mut steps = sd - dd + 1;
        while let Some(dr) = r.degree().filter(|&dr| dr >= dd) {
            let top = r.coeffs[dr].clone();
            for c in r.coeffs.iter_mut() {
                *c *= lc;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r.coeffs[dr - dd + j] -= &top * dc;
            }
            r = Polynomial::from_coeffs(r.coeffs);
            steps -= 1;
        }
        if steps > 0 {
            r = r.scale(&num_traits::pow(lc.clone(), steps));
        }
        r
    }

    /// Exact quotient `self / d` when `d` divides `self` over the integers.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let dd = d.degree()?;
        let Some(sd) = self.degree() else {
            return Some(Polynomial::zero());
        };
        if sd < dd {
            return None;
        }
        let lc = d.leading_coeff().unwrap();
        let mut r = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); sd - dd + 1];
        for k in (dd..=sd).rev() {
            let (qc, rem) = r[k].div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            if !qc.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k - dd + j] -= &qc * dc;
                }
            }
            quot[k - dd] = qc;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Polynomial::from_coeffs(quot))
    }

    /// Primitive gcd with positive leading coefficient; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        if a.leading_coeff().is_some_and(Signed::is_negative) {
            a = -a;
        }
        a
    }
}

/// `R^m * F(S/R)` with denominators cleared: `sum_i F_i S^i R^(m-i)`.
pub fn clear_compose(
    f: &Polynomial,
    s: &Polynomial,
    r: &Polynomial,
    m: usize,
) -> Result<Polynomial, PolyError> {
    let Some(df) = f.degree() else {
        return Ok(Polynomial::zero());
    };
    if df > m {
        return Err(PolyError::DegreeExceedsEdgeCount { deg: df, m });
    }
    let mut s_pows = Vec::with_capacity(df + 1);
    s_pows.push(Polynomial::one());
    for i in 1..=df {
        s_pows.push(&s_pows[i - 1] * s);
    }
    // Horner upwards: after step i, acc = sum_{j<=i} F_j S^j R^(i-j).
    let mut acc = Polynomial::zero();
    for (i, s_pow) in s_pows.iter().enumerate() {
        acc = &acc * r;
        let fi = f.coeff(i);
        if !fi.is_zero() {
            acc = &acc + &s_pow.scale(&fi);
        }
    }
    let tail = u32::try_from(m - df).expect("edge count fits in u32");
    Ok(&acc * &r.pow(tail))
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{i}")?,
                (_, false) => write!(f, "{mag}q^{i}")?,
            }
        }
        Ok(())
    }
}

fn add_coeffs(a: &[BigInt], b: &[BigInt]) -> Polynomial {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o += s;
    }
    Polynomial::from_coeffs(out)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        add_coeffs(&self.coeffs, &rhs.coeffs)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(mut self) -> Polynomial {
        for c in self.coeffs.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.coeffs.clone();
        if out.len() < rhs.coeffs.len() {
            out.resize(rhs.coeffs.len(), BigInt::zero());
        }
        for (o, s) in out.iter_mut().zip(&rhs.coeffs) {
            *o -= s;
        }
        Polynomial::from_coeffs(out)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    // Schoolbook convolution; coefficient size dominates at the degrees used here.
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    coeffs: Vec<String>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolynomialJson { coeffs: self.coeffs.iter().map(ToString::to_string).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Polynomial, D::Error> {
        let raw = PolynomialJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(|_| D::Error::custom(format!("bad coefficient `{c}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.last().is_some_and(Zero::is_zero) {
            return Err(D::Error::custom("polynomial has trailing zero coefficients"));
        }
        Ok(Polynomial { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64s(c)
    }

    #[test]
    fn add_cancels_and_trims() {
        assert_eq!(&p(&[1, -1]) + &p(&[0, 1]), Polynomial::one());
        assert_eq!(&Polynomial::zero() + &p(&[3, 0, 2]), p(&[3, 0, 2]));
        assert_eq!(&p(&[1, 2, 3]) - &p(&[1, 2, 3]), Polynomial::zero());
        assert_eq!(p(&[0, 0, 0]), Polynomial::zero());
    }

    #[test]
    fn zero_degree_sentinel_orders_below_constants() {
        assert_eq!(Polynomial::zero().degree(), None);
        assert_eq!(Polynomial::one().degree(), Some(0));
        assert!(Polynomial::zero().degree() < Polynomial::one().degree());
    }

    #[test]
    fn mul_expands_known_factorisations() {
        assert_eq!(&p(&[1, -1]) * &p(&[1, 1]), p(&[1, 0, -1]));
        // (1-q)^4 (18q^5+24q^4+18q^3+10q^2+4q+1)
        let r5 = &Polynomial::one_minus_q().pow(4) * &p(&[1, 4, 10, 18, 24, 18]);
        assert_eq!(r5, p(&[1, 0, 0, -2, -3, -6, 10, 30, -48, 18]));
        // 2q^3 (1-q)^3 (12q^3+9q^2+3q+1)
        let s5 = (&Polynomial::one_minus_q().pow(3) * &p(&[1, 3, 9, 12])).scale(&BigInt::from(2)).shift(3);
        assert_eq!(s5, p(&[0, 0, 0, 2, 0, 6, -14, -24, 54, -24]));
        assert_eq!(r5.degree(), Some(9));
    }

    #[test]
    fn pow_matches_binomials() {
        assert_eq!(Polynomial::one_minus_q().pow(0), Polynomial::one());
        assert_eq!(Polynomial::one_minus_q().pow(7), p(&[1, -7, 21, -35, 35, -21, 7, -1]));
        assert_eq!(p(&[1, 1]).pow(2), p(&[1, 2, 1]));
    }

    #[test]
    fn eval_examples() {
        let c8 = &Polynomial::one_minus_q().pow(7) * &p(&[1, 7]);
        assert_eq!(c8.eval(&rat(-1, 7)), int(0));
        assert_eq!(c8.eval(&int(0)), int(1));
        let r4 = p(&[1, 0, -2, -4, 9, -4]);
        assert_eq!(r4.eval(&int(1)), int(0));
        assert_eq!(p(&[1, 2, 1]).eval(&rat(-1, 2)), rat(1, 4));
        assert_eq!(Polynomial::zero().eval(&rat(3, 5)), int(0));
    }

    #[test]
    fn sign_at_matches_eval() {
        assert_eq!(p(&[1, 7]).sign_at(&rat(-1, 7)), Sign::Zero);
        assert_eq!(p(&[1, -2, 1]).sign_at(&rat(-1, 2)), Sign::Positive);
        assert_eq!(p(&[1, 3]).sign_at(&rat(-1, 2)), Sign::Negative);
    }

    #[test]
    fn clear_compose_examples() {
        let f = p(&[1, 2]);
        let s = p(&[0, 2, -2]);
        let r = Polynomial::one_minus_q().pow(2);
        let c4 = &Polynomial::one_minus_q().pow(3) * &p(&[1, 3]);
        assert_eq!(clear_compose(&f, &s, &r, 2).unwrap(), c4);
        assert_eq!(clear_compose(&Polynomial::one(), &s, &r, 3).unwrap(), r.pow(3));
        let zm = Polynomial::monomial(BigInt::one(), 3);
        assert_eq!(clear_compose(&zm, &s, &r, 3).unwrap(), s.pow(3));
        assert_eq!(
            clear_compose(&zm, &s, &r, 2),
            Err(PolyError::DegreeExceedsEdgeCount { deg: 3, m: 2 })
        );
    }

    #[test]
    fn pseudo_rem_and_exact_division() {
        let a = p(&[-1, 0, 0, 1]); // q^3 - 1
        let b = p(&[-1, 1]);
        assert_eq!(a.pseudo_rem(&b), Polynomial::zero());
        assert_eq!(a.div_exact(&b), Some(p(&[1, 1, 1])));
        let c = p(&[1, 0, 3]);
        let d = p(&[0, 2]);
        // 2^2 (3q^2 + 1) = (6q)(2q) + 4
        assert_eq!(c.pseudo_rem(&d), p(&[4]));
        assert_eq!(c.div_exact(&d), None);
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let common = p(&[1, 7]);
        let a = &common * &p(&[1, 3]);
        let b = &common * &common;
        assert_eq!(a.gcd(&b), common);
        assert_eq!(p(&[2, 4]).gcd(&p(&[3])), Polynomial::one());
    }

    #[test]
    fn json_is_decimal_strings() {
        let poly = p(&[1, 0, -2]);
        let s = serde_json::to_string(&poly).unwrap();
        assert_eq!(s, r#"{"coeffs":["1","0","-2"]}"#);
        assert_eq!(serde_json::from_str::<Polynomial>(&s).unwrap(), poly);
        assert_eq!(serde_json::to_string(&Polynomial::zero()).unwrap(), r#"{"coeffs":[]}"#);
        assert!(serde_json::from_str::<Polynomial>(r#"{"coeffs":["1","0"]}"#).is_err());
        assert!(serde_json::from_str::<Polynomial>(r#"{"coeffs":["x"]}"#).is_err());
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(p(&[1, -2, 0, 3]).to_string(), "1 - 2q + 3q^3");
        assert_eq!(p(&[0, -1]).to_string(), "-q");
    }
}
