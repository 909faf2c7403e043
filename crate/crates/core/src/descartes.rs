//! Root counting by Descartes' rule of signs with interval bisection
//! (Vincent, Collins and Akritas).
//!
//! The interval `(lo, hi)` is mapped onto `(0, 1)` and then onto `(0, inf)`
//! by a Möbius transform; the sign variations of the transformed coefficients
//! bound the root count from above and are exact when they are 0 or 1. A
//! subinterval with 0 variations is root-free and one with 1 variation holds
//! exactly one simple root, so every answer is exact. Intervals are bisected
//! until all pieces are decided. Multiple roots never decide, which is why
//! the search carries a node budget.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{Polynomial, Sign};
use crate::rational::Rational;
use crate::rootiso::{IsolatingInterval, RootError};

/// Bisection nodes explored before giving up on an interval.
pub const DEFAULT_NODE_BUDGET: usize = 4096;

/// `D^d p((a + e y) / D)` for coefficients `c` of degree `d`.
fn compose_linear(c: &[BigInt], a: &BigInt, e: &BigInt, den: &BigInt) -> Vec<BigInt> {
    let d = c.len() - 1;
    let mut b: Vec<BigInt> = vec![BigInt::zero(); d + 1];
    let mut pw = BigInt::one();
    for i in (0..=d).rev() {
        b[i] = &c[i] * &pw;
        if i > 0 {
            pw *= den;
        }
    }
    if !a.is_zero() {
        taylor_shift(&mut b, a);
    }
    if !e.is_one() {
        let mut pw = e.clone();
        for coeff in b.iter_mut().skip(1) {
            *coeff *= &pw;
            pw *= e;
        }
    }
    b
}

/// In place `p(x) -> p(x + a)`.
fn taylor_shift(b: &mut [BigInt], a: &BigInt) {
    let n = b.len();
    let unit = a.is_one();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let (l, r) = b.split_at_mut(j + 1);
            if unit {
                l[j] += &r[0];
            } else {
                l[j] += &r[0] * a;
            }
        }
    }
}

/// Divides out the gcd of the coefficients; signs are kept.
fn reduce_content(b: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in b.iter() {
        g = g.gcd(c);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    for c in b.iter_mut() {
        *c /= &g;
    }
}

/// Cheap partial content removal: the common power of two.
fn reduce_twos(b: &mut [BigInt]) {
    let tz = b.iter().filter_map(|c| c.trailing_zeros()).min().unwrap_or(0);
    if tz > 0 {
        for c in b.iter_mut() {
            *c >>= tz;
        }
    }
}

fn sign_variations(b: &[BigInt]) -> usize {
    let mut count = 0;
    let mut prev = Sign::Zero;
    for c in b {
        let s = Sign::of(c);
        if s.is_zero() {
            continue;
        }
        if prev.opposes(s) {
            count += 1;
        }
        prev = s;
    }
    count
}

/// Descartes bound for roots in `(0, 1)` of the polynomial with coefficients `b`.
fn unit_variations(b: &[BigInt]) -> usize {
    let mut r: Vec<BigInt> = b.iter().rev().cloned().collect();
    taylor_shift(&mut r, &BigInt::one());
    sign_variations(&r)
}

/// Value of the local polynomial at `y = u / 2^j`, scaled by `2^(j d)`.
fn local_value_sign(b: &[BigInt], u: &BigInt, j: u32) -> Sign {
    let mut acc = BigInt::zero();
    let mut pw = BigInt::one();
    for c in b.iter().rev() {
        acc = acc * u + c * &pw;
        pw <<= j;
    }
    Sign::of(&acc)
}

/// Integer data of a rational interval: `lo = a / den`, `hi - lo = e / den`.
fn affine_data(lo: &Rational, hi: &Rational) -> (BigInt, BigInt, BigInt) {
    let den = lo.denom().lcm(hi.denom());
    let a = lo.numer() * (&den / lo.denom());
    let b = hi.numer() * (&den / hi.denom());
    (a.clone(), b - a, den)
}

struct Node {
    lo: Rational,
    hi: Rational,
    coeffs: Vec<BigInt>,
}

/// Descartes sign-variation bound for the roots of `p` in `(lo, hi)`.
pub fn variations(p: &Polynomial, lo: &Rational, hi: &Rational) -> Result<usize, RootError> {
    let b = prepare(p, lo, hi)?;
    Ok(b.map_or(0, |b| unit_variations(&b)))
}

/// The polynomial moved onto `(0, 1)`, or `None` for a nonzero constant.
fn prepare(p: &Polynomial, lo: &Rational, hi: &Rational) -> Result<Option<Vec<BigInt>>, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(RootError::EmptyInterval { lo: Box::new(lo.clone()), hi: Box::new(hi.clone()) });
    }
    for x in [lo, hi] {
        if p.sign_at(x).is_zero() {
            return Err(RootError::EndpointRoot(x.clone()));
        }
    }
    let mut c = p.coeffs();
    // a power of q only contributes the root 0, which lies outside the interval
    if lo.is_positive() || hi.is_negative() {
        let tz = c.iter().take_while(|x| x.is_zero()).count();
        c = &c[tz..];
    }
    if c.len() <= 1 {
        return Ok(None);
    }
    let (a, e, den) = affine_data(lo, hi);
    let mut b = compose_linear(c, &a, &e, &den);
    reduce_content(&mut b);
    Ok(Some(b))
}

/// Disjoint isolating intervals, ascending, one per distinct root of `p` in
/// `(lo, hi)`, each holding a simple root with opposite endpoint signs.
///
/// Fails with `Inconclusive` when `budget` bisection nodes do not decide,
/// which is what happens around a root of even multiplicity.
pub fn isolate(
    p: &Polynomial,
    lo: &Rational,
    hi: &Rational,
    budget: usize,
) -> Result<Vec<IsolatingInterval>, RootError> {
    let Some(b) = prepare(p, lo, hi)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut stack = vec![Node { lo: lo.clone(), hi: hi.clone(), coeffs: b }];
    let mut nodes = 0;
    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > budget {
            return Err(RootError::Inconclusive { budget });
        }
        match unit_variations(&node.coeffs) {
            0 => {}
            1 => out.push(IsolatingInterval::from_endpoints(p, node.lo, node.hi)),
            _ => {
                let (left, right) = split(node);
                stack.push(right);
                stack.push(left);
            }
        }
    }
    Ok(out)
}

/// Bisects near the midpoint, avoiding a root of the local polynomial.
fn split(node: Node) -> (Node, Node) {
    let mut j = 1u32;
    let mut u = BigInt::one();
    while local_value_sign(&node.coeffs, &u, j).is_zero() {
        // 1/2 + 1/4, 1/2 + 1/8, ... are eventually root-free
        j += 1;
        u = (BigInt::one() << (j - 1)) + 1;
    }
    let full = BigInt::one() << j;
    let rest = &full - &u;
    let mut left = compose_linear(&node.coeffs, &BigInt::zero(), &u, &full);
    let mut right = compose_linear(&node.coeffs, &u, &rest, &full);
    reduce_twos(&mut left);
    reduce_twos(&mut right);
    let t = Rational::new(u, full);
    let mid = &node.lo + (&node.hi - &node.lo) * t;
    (
        Node { lo: node.lo, hi: mid.clone(), coeffs: left },
        Node { lo: mid, hi: node.hi, coeffs: right },
    )
}

/// Number of distinct roots of `p` in `(lo, hi)`.
pub fn count_roots(p: &Polynomial, lo: &Rational, hi: &Rational, budget: usize) -> Result<usize, RootError> {
    isolate(p, lo, hi, budget).map(|v| v.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64s(c)
    }

    #[test]
    fn compose_matches_evaluation() {
        let f = p(&[3, -1, 4, -1, 5]);
        let (a, e, den) = affine_data(&rat(-2, 3), &rat(1, 4));
        let b = Polynomial::from_coeffs(compose_linear(f.coeffs(), &a, &e, &den));
        for y in [rat(0, 1), rat(1, 3), rat(1, 1), rat(-5, 7)] {
            let x = rat(-2, 3) + (rat(1, 4) - rat(-2, 3)) * &y;
            let scale = Rational::from_integer(num_traits::pow(den.clone(), 4));
            assert_eq!(b.eval(&y), f.eval(&x) * scale);
        }
    }

    #[test]
    fn shift_by_one() {
        let mut b: Vec<BigInt> = [1, 2, 1].iter().map(|&x| BigInt::from(x)).collect();
        taylor_shift(&mut b, &BigInt::one());
        assert_eq!(b, vec![BigInt::from(4), BigInt::from(4), BigInt::from(1)]);
    }

    #[test]
    fn counts_agree_with_known_roots() {
        let f = &(&p(&[1, 7]) * &p(&[1, 3])) * &p(&[1, 2]);
        assert_eq!(count_roots(&f, &int(-1), &int(0), DEFAULT_NODE_BUDGET).unwrap(), 3);
        let ivs = isolate(&f, &int(-1), &int(0), DEFAULT_NODE_BUDGET).unwrap();
        assert!(ivs[0].contains(&rat(-1, 2)));
        assert!(ivs[1].contains(&rat(-1, 3)));
        assert!(ivs[2].contains(&rat(-1, 7)));
        assert!(ivs.iter().all(|iv| iv.has_sign_change()));
        assert_eq!(count_roots(&p(&[1, -2, 1]), &int(-1), &int(0), DEFAULT_NODE_BUDGET).unwrap(), 0);
        assert_eq!(count_roots(&p(&[0, 0, 1, 7]), &int(-1), &rat(-1, 100), DEFAULT_NODE_BUDGET).unwrap(), 1);
    }

    #[test]
    fn double_root_is_inconclusive() {
        let f = p(&[1, 3]).pow(2);
        assert_eq!(count_roots(&f, &int(-1), &int(0), 64), Err(RootError::Inconclusive { budget: 64 }));
    }

    #[test]
    fn endpoint_roots_rejected() {
        assert_eq!(count_roots(&p(&[1, 2]), &rat(-1, 2), &int(0), 16), Err(RootError::EndpointRoot(rat(-1, 2))));
    }
}
