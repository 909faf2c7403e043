//! Certified real-root counting, isolation and refinement over rational intervals.
//!
//! Counting uses a Sturm chain of the square-free part, computed with exact
//! integer pseudo-remainders. Endpoints that are roots are rejected rather than
//! nudged: the caller decides how to perturb.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descartes;
use crate::poly::{Polynomial, Sign};
use crate::rational::{midpoint, pair, Rational};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RootError {
    #[error("cannot count roots of the zero polynomial")]
    ZeroPolynomial,
    #[error("interval is empty: lo = {lo}, hi = {hi}")]
    EmptyInterval { lo: Box<Rational>, hi: Box<Rational> },
    #[error("polynomial vanishes at interval endpoint {0}; perturb the endpoint and retry")]
    EndpointRoot(Rational),
    #[error("root count undecided after {budget} bisection nodes")]
    Inconclusive { budget: usize },
}

/// Rational interval holding exactly one distinct root of its polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatingInterval {
    #[serde(with = "pair")]
    pub lo: Rational,
    #[serde(with = "pair")]
    pub hi: Rational,
    pub sign_lo: Sign,
    pub sign_hi: Sign,
}

impl IsolatingInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Endpoint signs are nonzero and opposite, so the root has odd multiplicity.
    pub fn has_sign_change(&self) -> bool {
        self.sign_lo.opposes(self.sign_hi)
    }

    pub(crate) fn from_endpoints(p: &Polynomial, lo: Rational, hi: Rational) -> Self {
        let sign_lo = p.sign_at(&lo);
        let sign_hi = p.sign_at(&hi);
        IsolatingInterval { lo, hi, sign_lo, sign_hi }
    }
}

/// Sturm chain of the square-free part of a nonzero polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Result<Self, RootError> {
        if p.is_zero() {
            return Err(RootError::ZeroPolynomial);
        }
        let mut chain = vec![p.primitive_part()];
        let dp = p.derivative();
        if !dp.is_zero() {
            chain.push(dp.primitive_part());
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            let r = a.pseudo_rem(b);
            if r.is_zero() {
                break;
            }
            // r = lc(b)^(delta+1) * rem; the chain continues with a positive multiple of -rem.
            let delta_plus_one = a.degree().unwrap() - b.degree().unwrap() + 1;
            let lc_negative = b.leading_coeff().is_some_and(|c| c < &Zero::zero());
            let factor_negative = lc_negative && !delta_plus_one.is_multiple_of(2);
            let r = r.primitive_part();
            chain.push(if factor_negative { r } else { -r });
        }
        let g = chain.last().unwrap().clone();
        if !g.is_constant() {
            chain = chain
                .iter()
                .map(|c| c.div_exact(&g).expect("Sturm chain element divisible by gcd(p, p')"))
                .collect();
        }
        Ok(SturmChain { chain })
    }

    /// The square-free part of the polynomial the chain was built from.
    pub fn square_free(&self) -> &Polynomial {
        &self.chain[0]
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Sign variations of the chain at `x`, zeros skipped.
    pub fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut prev = Sign::Zero;
        for s in self.chain.iter().map(|c| c.sign_at(x)) {
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

    /// Distinct roots in `(lo, hi)`; both endpoints must be non-roots.
    pub fn count(&self, lo: &Rational, hi: &Rational) -> Result<usize, RootError> {
        check_interval(self.square_free(), lo, hi)?;
        Ok(self.variations(lo) - self.variations(hi))
    }
}

fn check_interval(p: &Polynomial, lo: &Rational, hi: &Rational) -> Result<(), RootError> {
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
    Ok(())
}

pub fn sign_at(p: &Polynomial, x: &Rational) -> Sign {
    p.sign_at(x)
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
pub fn count_roots(p: &Polynomial, lo: &Rational, hi: &Rational) -> Result<usize, RootError> {
    check_interval(p, lo, hi)?;
    SturmChain::new(p)?.count(lo, hi)
}

/// A point strictly inside `(lo, hi)` where `p` does not vanish, near the midpoint.
fn split_point(p: &Polynomial, lo: &Rational, hi: &Rational) -> Rational {
    let mid = midpoint(lo, hi);
    if !p.sign_at(&mid).is_zero() {
        return mid;
    }
    let mut step = (hi - lo) / Rational::from_integer(4.into());
    loop {
        // p has finitely many roots, so some offset avoids them all
        let cand = &mid + &step;
        if !p.sign_at(&cand).is_zero() {
            return cand;
        }
        step /= Rational::from_integer(2.into());
    }
}

/// Disjoint isolating intervals, ascending, one per distinct root in `(lo, hi)`.
pub fn isolate_roots(
    p: &Polynomial,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<IsolatingInterval>, RootError> {
    check_interval(p, lo, hi)?;
    let chain = SturmChain::new(p)?;
    Ok(isolate_with(&chain, p, lo, hi))
}

pub(crate) fn isolate_with(
    chain: &SturmChain,
    p: &Polynomial,
    lo: &Rational,
    hi: &Rational,
) -> Vec<IsolatingInterval> {
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), chain.variations(lo), chain.variations(hi))];
    while let Some((a, b, va, vb)) = stack.pop() {
        match va - vb {
            0 => {}
            1 => out.push(IsolatingInterval::from_endpoints(p, a, b)),
            _ => {
                let m = split_point(p, &a, &b);
                let vm = chain.variations(&m);
                // right half first so the left half pops first
                stack.push((m.clone(), b, vm, vb));
                stack.push((a, m, va, vm));
            }
        }
    }
    out
}

/// Shrinks a certified interval to width at most `eps`, keeping the root inside.
///
/// Bisects on the sign of `p` when the endpoints already bracket a sign change,
/// and on Sturm counts otherwise (even-multiplicity roots).
pub fn refine(p: &Polynomial, iv: &IsolatingInterval, eps: &Rational) -> IsolatingInterval {
    assert!(eps > &Rational::zero(), "refine needs eps > 0");
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    let mut sign_lo = p.sign_at(&lo);
    let mut chain: Option<SturmChain> = None;
    while &(&hi - &lo) > eps {
        let mid = midpoint(&lo, &hi);
        let s = p.sign_at(&mid);
        if s.is_zero() {
            // the unique root sits exactly at mid
            let half = std::cmp::min(eps.clone(), &hi - &lo) / Rational::from_integer(4.into());
            return IsolatingInterval::from_endpoints(p, &mid - &half, &mid + half);
        }
        let root_left = if sign_lo.opposes(p.sign_at(&hi)) {
            s.opposes(sign_lo)
        } else {
            let c = chain.get_or_insert_with(|| SturmChain::new(p).expect("nonzero polynomial"));
            c.variations(&lo) > c.variations(&mid)
        };
        if root_left {
            hi = mid;
        } else {
            lo = mid;
            sign_lo = s;
        }
    }
    IsolatingInterval::from_endpoints(p, lo, hi)
}

/// Refines every interval to width at most `eps`.
pub fn refine_all(p: &Polynomial, ivs: &[IsolatingInterval], eps: &Rational) -> Vec<IsolatingInterval> {
    ivs.iter().map(|iv| refine(p, iv, eps)).collect()
}

/// Degree up to which certification uses Sturm chains; above it the
/// Descartes bisection counter takes over.
pub const STURM_MAX_DEGREE: usize = 60;

/// Exact root counting engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counter {
    Sturm,
    Descartes,
}

impl Counter {
    /// Sturm for small degree, Descartes otherwise.
    pub fn for_polynomial(p: &Polynomial) -> Counter {
        match p.degree() {
            Some(d) if d > STURM_MAX_DEGREE => Counter::Descartes,
            _ => Counter::Sturm,
        }
    }

    pub fn count(self, p: &Polynomial, lo: &Rational, hi: &Rational) -> Result<usize, RootError> {
        match self {
            Counter::Sturm => count_roots(p, lo, hi),
            Counter::Descartes => descartes::count_roots(p, lo, hi, descartes::DEFAULT_NODE_BUDGET),
        }
    }

    pub fn isolate(self, p: &Polynomial, lo: &Rational, hi: &Rational) -> Result<Vec<IsolatingInterval>, RootError> {
        match self {
            Counter::Sturm => isolate_roots(p, lo, hi),
            Counter::Descartes => descartes::isolate(p, lo, hi, descartes::DEFAULT_NODE_BUDGET),
        }
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
    fn sign_examples() {
        assert_eq!(sign_at(&p(&[1, 7]), &rat(-1, 7)), Sign::Zero);
        assert_eq!(sign_at(&p(&[1, -2, 1]), &rat(-1, 2)), Sign::Positive);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_roots(&p(&[1, 7]), &int(-1), &int(0)).unwrap(), 1);
        assert_eq!(count_roots(&p(&[1, -2, 1]), &int(-1), &int(0)).unwrap(), 0);
        // (q - 1/2)^3 (q + 1/3): distinct roots only
        let a = &p(&[-1, 2]).pow(3) * &p(&[1, 3]);
        assert_eq!(count_roots(&a, &int(-1), &int(1)).unwrap(), 2);
    }

    #[test]
    fn count_rejects_bad_input() {
        assert_eq!(count_roots(&Polynomial::zero(), &int(-1), &int(0)), Err(RootError::ZeroPolynomial));
        assert_eq!(count_roots(&p(&[1, 7]), &rat(-1, 7), &int(0)), Err(RootError::EndpointRoot(rat(-1, 7))));
        assert!(matches!(count_roots(&p(&[1, 7]), &int(0), &int(-1)), Err(RootError::EmptyInterval { .. })));
    }

    #[test]
    fn isolate_product_of_linears() {
        let f = &p(&[1, 7]) * &p(&[1, 3]);
        let ivs = isolate_roots(&f, &int(-1), &int(0)).unwrap();
        assert_eq!(ivs.len(), 2);
        assert!(ivs[0].contains(&rat(-1, 3)));
        assert!(ivs[1].contains(&rat(-1, 7)));
        assert!(ivs[0].hi <= ivs[1].lo);
        for iv in &ivs {
            assert!(iv.has_sign_change());
            assert_eq!(count_roots(&f, &iv.lo, &iv.hi).unwrap(), 1);
        }
    }

    #[test]
    fn isolate_root_at_midpoint() {
        let ivs = isolate_roots(&p(&[1, 2]), &int(-1), &int(0)).unwrap();
        assert_eq!(ivs.len(), 1);
        assert!(ivs[0].contains(&rat(-1, 2)));
        let r = refine(&p(&[1, 2]), &ivs[0], &rat(1, 8));
        assert!(r.width() <= rat(1, 8));
        assert!(r.lo < rat(-1, 2) && rat(-1, 2) < r.hi);
        assert!(r.has_sign_change());
    }

    #[test]
    fn refine_to_micro_width() {
        let f = p(&[1, 7]);
        let iv = isolate_roots(&f, &int(-1), &int(0)).unwrap().remove(0);
        let eps = rat(1, 1_000_000);
        let r = refine(&f, &iv, &eps);
        assert!(r.width() <= eps);
        assert!(r.contains(&rat(-1, 7)));
        assert!(r.lo >= iv.lo && r.hi <= iv.hi);
    }

    #[test]
    fn refine_even_multiplicity_root() {
        let f = &p(&[1, 3]).pow(2) * &p(&[2, 1]);
        let ivs = isolate_roots(&f, &int(-1), &int(0)).unwrap();
        assert_eq!(ivs.len(), 1);
        assert!(!ivs[0].has_sign_change());
        let r = refine(&f, &ivs[0], &rat(1, 1000));
        assert!(r.width() <= rat(1, 1000));
        assert!(r.contains(&rat(-1, 3)));
    }

    #[test]
    fn interval_json_shape() {
        let iv = IsolatingInterval { lo: rat(-2, 5), hi: rat(-7, 20), sign_lo: Sign::Positive, sign_hi: Sign::Negative };
        let s = serde_json::to_string(&iv).unwrap();
        assert_eq!(s, r#"{"lo":["-2","5"],"hi":["-7","20"],"sign_lo":1,"sign_hi":-1}"#);
        assert_eq!(serde_json::from_str::<IsolatingInterval>(&s).unwrap(), iv);
    }
}
