//! The density constructor.
//!
//! Given an open interval `I` inside `(-1, 0)`, the pipeline picks a compact
//! `K` inside `I`, finds the smallest odd `N` with `yhat_N < -1` on `K`, picks
//! a bundle-cycle target `-k^(1/b)` inside the image of `yhat_N`, and encloses
//! a root of the witness `W = (R_N + S_N)^b + k S_N^b` in `K`.
//!
//! Where `S_N` does not vanish, `W = S_N^b (yhat_N^b + k)`, and for odd `b`
//! the map `t -> t^b` is strictly increasing, so roots of `W` in `K` are
//! exactly the points where `yhat_N = -k^(1/b)`. That is the reciprocal of
//! the root `-k^(-1/b)` of `Rel(bundle_cycle(k+1, b))`, which makes every such
//! point a reliability root of the simple graph `bundle_cycle(k+1, b)[H_N]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge_substitute_simple, Gadget, GraphError, Multigraph};
use crate::poly::Polynomial;
use crate::rational::{midpoint, pair, rat, Rational};
use crate::rel::{
    binomial, certify_below, recurrence_r, recurrence_s, recurrence_values, yhat_eval, BelowCertificate,
    BelowFailure, BelowVerdict, PointValues, RelError,
};
use crate::rootiso::{refine, Counter, IsolatingInterval, RootError};

pub const DEFAULT_MAX_N: usize = 41;
pub const DEFAULT_MAX_B: usize = 9;
pub const CERTIFICATE_VERSION: u32 = 1;
/// Times `K` may be shrunk to dodge an endpoint degeneracy.
const MAX_SHRINKS: usize = 32;

pub fn default_eps() -> Rational {
    rat(1, 1_000_000)
}

/// Closed rational interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "pair")]
    pub lo: Rational,
    #[serde(with = "pair")]
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// `self` lies strictly inside the open interval `outer`.
    pub fn inside_open(&self, outer: &Interval) -> bool {
        outer.lo < self.lo && self.hi < outer.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForgeRequest {
    pub lo: Rational,
    pub hi: Rational,
    pub eps: Rational,
    pub max_n: usize,
    pub max_b: usize,
    /// Use this `K` instead of the middle half of `I`.
    pub pinned_k: Option<Interval>,
}

impl ForgeRequest {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        ForgeRequest { lo, hi, eps: default_eps(), max_n: DEFAULT_MAX_N, max_b: DEFAULT_MAX_B, pinned_k: None }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn validate(&self) -> Result<(), ForgeError> {
        let bad = |m: String| Err(ForgeError::InvalidRequest(m));
        if !(self.lo > -Rational::one() && self.lo < self.hi && self.hi < Rational::zero()) {
            return bad(format!("need -1 < lo < hi < 0, got lo = {}, hi = {}", self.lo, self.hi));
        }
        if !self.eps.is_positive() {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.max_n < 3 || self.max_n.is_multiple_of(2) {
            return bad(format!("max_n must be odd and at least 3, got {}", self.max_n));
        }
        if self.max_b < 1 || self.max_b.is_multiple_of(2) {
            return bad(format!("max_b must be odd and at least 1, got {}", self.max_b));
        }
        if let Some(k) = &self.pinned_k {
            if !(k.lo < k.hi && k.inside_open(&self.interval())) {
                return bad(format!("pinned K = [{}, {}] must be a proper interval inside I", k.lo, k.hi));
            }
        }
        Ok(())
    }
}

/// One rejected gadget index and the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NAttempt {
    pub n: usize,
    #[serde(flatten)]
    pub failure: BelowFailure,
}

#[derive(Debug, Clone, Error)]
pub enum ForgeError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("no odd N <= {max_n} certifies yhat_N < -1 on K")]
    NNotFound { max_n: usize, attempts: Vec<NAttempt> },
    #[error("no odd b <= {max_b} puts an integer target between the endpoint values of yhat_{n} on K")]
    TargetNotFound { n: usize, max_b: usize },
    #[error("yhat_{n} takes equal values at both ends of K")]
    EqualEndpoints { n: usize },
    #[error("witness has no sign-changing root in K")]
    NoEnclosure,
    #[error("K was shrunk {0} times without clearing an endpoint degeneracy")]
    ShrinkLimit(usize),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Root(#[from] RootError),
}

impl ForgeError {
    /// Pipeline stage the failure belongs to.
    pub fn stage(&self) -> &'static str {
        match self {
            ForgeError::InvalidRequest(_) => "request",
            ForgeError::NNotFound { .. } => "find_n",
            ForgeError::TargetNotFound { .. } | ForgeError::EqualEndpoints { .. } => "choose_target",
            ForgeError::NoEnclosure | ForgeError::ShrinkLimit(_) | ForgeError::Root(_) => "isolate",
            ForgeError::Rel(_) => "relcalc",
        }
    }
}

/// The middle half of `I`.
pub fn choose_k(req: &ForgeRequest) -> Interval {
    let quarter = (&req.hi - &req.lo) / Rational::from_integer(4.into());
    Interval::new(&req.lo + &quarter, &req.hi - &quarter)
}

/// Shrinks `K` toward its center, removing a quarter of its width.
pub fn shrink(k: &Interval) -> Interval {
    let eighth = k.width() / Rational::from_integer(8.into());
    Interval::new(&k.lo + &eighth, &k.hi - &eighth)
}

/// Evenly spaced sample points of `K`, endpoints included.
fn screen_points(k: &Interval) -> Vec<Rational> {
    let w = k.width();
    (0..=4).map(|i| &k.lo + &w * rat(i, 4)).collect()
}

/// Point-value test that can only reject indices `certify_below` would also
/// reject: a vanishing or sign-changing `S_n`, or a sample with `yhat_n >= -1`.
fn screen(n: usize, points: &[Rational], values: &[PointValues]) -> Option<BelowFailure> {
    let at = |x: &Rational| crate::rational::RationalPair(x.clone());
    let signs: Vec<_> = values.iter().map(|v| crate::poly::Sign::of_rational(&v.s[n])).collect();
    if let Some(i) = signs.iter().position(|s| s.is_zero()) {
        return Some(BelowFailure::SplitVanishes { x: at(&points[i]) });
    }
    if signs.iter().any(|&s| s != signs[0]) {
        return Some(BelowFailure::SplitChangesSign);
    }
    for (x, v) in points.iter().zip(values) {
        let t = &v.r[n] + &v.s[n] * Rational::from_integer(2.into());
        let ts = crate::poly::Sign::of_rational(&t);
        if ts.is_zero() {
            return Some(BelowFailure::ThresholdVanishes { x: at(x) });
        }
        if signs[0] * ts != crate::poly::Sign::Negative {
            return Some(BelowFailure::NotBelow { x: at(x) });
        }
    }
    None
}

/// Smallest odd `N <= max_n` with `yhat_N < -1` certified on `K`.
///
/// Indices are first screened by exact point values of the recurrences, which
/// is far cheaper than building the polynomials; the screen rejects only
/// indices that fail certification anyway, so the result is the same as a
/// plain scan with `certify_below`.
pub fn find_n(k: &Interval, max_n: usize) -> Result<(usize, BelowCertificate), ForgeError> {
    let points = screen_points(k);
    let mut horizon = 0;
    let mut values: Vec<PointValues> = Vec::new();
    let mut attempts = Vec::new();
    for n in (3..=max_n).step_by(2) {
        if n > horizon {
            horizon = (2 * horizon + 11).min(max_n).max(n);
            values = points.iter().map(|x| recurrence_values(x, horizon)).collect();
        }
        if let Some(failure) = screen(n, &points, &values) {
            attempts.push(NAttempt { n, failure });
            continue;
        }
        match certify_below(n, &k.lo, &k.hi)? {
            BelowVerdict::Certified(c) => return Ok((n, c)),
            BelowVerdict::Failed(failure) => attempts.push(NAttempt { n, failure }),
        }
    }
    Err(ForgeError::NNotFound { max_n, attempts })
}

/// Bundle-cycle target: `yhat_N = -k^(1/b)` is the reciprocal of a root of
/// `Rel(bundle_cycle(k+1, b))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Target {
    pub k: u64,
    pub b: usize,
}

/// Smallest odd `b <= max_b`, then smallest integer `k >= 2`, with `k^(1/b)`
/// strictly between `|yhat_N|` at the two ends of `K`.
pub fn choose_target(n: usize, k: &Interval, max_b: usize) -> Result<Target, ForgeError> {
    let a = yhat_eval(n, &k.lo)?.abs();
    let c = yhat_eval(n, &k.hi)?.abs();
    if a == c {
        return Err(ForgeError::EqualEndpoints { n });
    }
    target_between(&a, &c, max_b).ok_or(ForgeError::TargetNotFound { n, max_b })
}

/// The target rule on two magnitudes `|yhat|`, in either order.
pub fn target_between(a: &Rational, c: &Rational, max_b: usize) -> Option<Target> {
    let (small, large) = if a < c { (a, c) } else { (c, a) };
    for b in (1..=max_b).step_by(2) {
        let lo_b = num_traits::pow(small.clone(), b);
        let hi_b = num_traits::pow(large.clone(), b);
        let cand = (lo_b.numer().div_floor(lo_b.denom()) + 1u32).max(BigInt::from(2));
        if Rational::from_integer(cand.clone()) < hi_b {
            if let Some(k) = cand.to_u64() {
                return Some(Target { k, b });
            }
        }
    }
    None
}

/// `W = (R_N + S_N)^b + k S_N^b`.
pub fn build_witness(n: usize, k: u64, b: usize) -> Polynomial {
    assert!(!b.is_multiple_of(2), "witness exponent must be odd");
    let s = recurrence_s(n);
    let num = &*recurrence_r(n) + &*s;
    let b = b as u32;
    &num.pow(b) + &s.pow(b).scale(&BigInt::from(k))
}

/// Size of `bundle_cycle(k+1, b)[H_N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: u64,
    pub edges: u64,
}

pub fn graph_summary(n: usize, k: u64, b: usize) -> Option<GraphSummary> {
    let copies = (k.checked_add(1)?).checked_mul(b as u64)?;
    let gadget_edges = binomial(n, 2).to_u64()? - 1;
    Some(GraphSummary {
        vertices: (k + 1).checked_add(copies.checked_mul(n as u64 - 2)?)?,
        edges: copies.checked_mul(gadget_edges)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgeCertificate {
    pub version: u32,
    pub interval: Interval,
    #[serde(rename = "K")]
    pub k_interval: Interval,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: u64,
    pub b: usize,
    #[serde(rename = "W")]
    pub w: Polynomial,
    pub enclosure: IsolatingInterval,
    pub below_cert: BelowCertificate,
    pub graph: GraphSummary,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported certificate version {0}")]
    Version(u32),
}

impl ForgeCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        let cert: ForgeCertificate = serde_json::from_str(text)?;
        if cert.version != CERTIFICATE_VERSION {
            return Err(CertificateError::Version(cert.version));
        }
        Ok(cert)
    }

    /// The certified simple graph `bundle_cycle(k+1, b)[H_N]`.
    pub fn build_graph(&self) -> Result<Multigraph, GraphError> {
        let k = usize::try_from(self.k).map_err(|_| GraphError::TooSmall { what: "k", min: 2, got: 0 })?;
        edge_substitute_simple(&Multigraph::bundle_cycle(k + 1, self.b)?, &Gadget::hn(self.n)?)
    }
}

/// Runs the whole pipeline.
pub fn forge(req: &ForgeRequest) -> Result<ForgeCertificate, ForgeError> {
    req.validate()?;
    let mut k_iv = req.pinned_k.clone().unwrap_or_else(|| choose_k(req));
    let (n, mut below) = find_n(&k_iv, req.max_n)?;
    for _ in 0..MAX_SHRINKS {
        if below.lo != k_iv.lo || below.hi != k_iv.hi {
            below = match certify_below(n, &k_iv.lo, &k_iv.hi)? {
                BelowVerdict::Certified(c) => c,
                BelowVerdict::Failed(_) => unreachable!("a subinterval of a certified interval certifies"),
            };
        }
        let target = match choose_target(n, &k_iv, req.max_b) {
            Ok(t) => t,
            Err(ForgeError::EqualEndpoints { .. }) => {
                k_iv = shrink(&k_iv);
                continue;
            }
            Err(e) => return Err(e),
        };
        let w = build_witness(n, target.k, target.b);
        let ivs = match Counter::for_polynomial(&w).isolate(&w, &k_iv.lo, &k_iv.hi) {
            Ok(ivs) => ivs,
            Err(RootError::EndpointRoot(_)) => {
                k_iv = shrink(&k_iv);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let iv = ivs.into_iter().find(|iv| iv.has_sign_change()).ok_or(ForgeError::NoEnclosure)?;
        let enclosure = refine(&w, &iv, &req.eps);
        let graph = graph_summary(n, target.k, target.b).ok_or(ForgeError::TargetNotFound { n, max_b: req.max_b })?;
        return Ok(ForgeCertificate {
            version: CERTIFICATE_VERSION,
            interval: req.interval(),
            k_interval: k_iv,
            n,
            k: target.k,
            b: target.b,
            w,
            enclosure,
            below_cert: below,
            graph,
        });
    }
    Err(ForgeError::ShrinkLimit(MAX_SHRINKS))
}

/// Outcome of an independent certificate check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// Re-derives everything the certificate claims from the recurrences alone.
pub fn verify(cert: &ForgeCertificate) -> Verification {
    let mut reasons = Vec::new();
    let i = &cert.interval;
    let k = &cert.k_interval;
    let e = &cert.enclosure;

    if cert.version != CERTIFICATE_VERSION {
        reasons.push(format!("unsupported version {}", cert.version));
    }
    if cert.b.is_multiple_of(2) {
        reasons.push(format!("b = {} is not odd", cert.b));
    }
    if cert.k < 2 {
        reasons.push(format!("k = {} is below 2", cert.k));
    }
    if cert.n < 3 || cert.n.is_multiple_of(2) {
        reasons.push(format!("N = {} is not an odd integer >= 3", cert.n));
    }
    if !(i.lo > -Rational::one() && i.lo < i.hi && i.hi < Rational::zero()) {
        reasons.push("containment: interval is not inside (-1, 0)".into());
    }
    if !(k.lo < k.hi && k.inside_open(i)) {
        reasons.push("containment: K is not inside the interval".into());
    }
    if !(e.lo < e.hi && k.lo <= e.lo && e.hi <= k.hi) {
        reasons.push("containment: enclosure is not inside K".into());
    }
    if graph_summary(cert.n, cert.k, cert.b) != Some(cert.graph) {
        reasons.push("graph summary does not match N, k, b".into());
    }
    if !reasons.is_empty() {
        return Verification { valid: false, reasons };
    }

    let w = build_witness(cert.n, cert.k, cert.b);
    if w != cert.w {
        reasons.push("witness mismatch: W differs from (R_N + S_N)^b + k S_N^b".into());
    }
    let (slo, shi) = (w.sign_at(&e.lo), w.sign_at(&e.hi));
    if slo != e.sign_lo || shi != e.sign_hi || !slo.opposes(shi) {
        reasons.push("endpoint sign mismatch: W does not change sign across the enclosure".into());
    } else {
        match Counter::for_polynomial(&w).count(&w, &e.lo, &e.hi) {
            Ok(1) => {}
            Ok(c) => reasons.push(format!("W has {c} roots in the enclosure, expected 1")),
            Err(err) => reasons.push(format!("W root count failed: {err}")),
        }
    }
    let s = recurrence_s(cert.n);
    match Counter::for_polynomial(&s).count(&s, &k.lo, &k.hi) {
        Ok(0) => {}
        Ok(c) => reasons.push(format!("S_N has {c} roots in K")),
        Err(err) => reasons.push(format!("S_N root count on K failed: {err}")),
    }
    let below = &cert.below_cert;
    if below.n != cert.n || below.lo != k.lo || below.hi != k.hi {
        reasons.push("below_cert does not refer to N and K".into());
    }
    match certify_below(cert.n, &k.lo, &k.hi) {
        Ok(BelowVerdict::Certified(c)) if &c == below => {}
        Ok(BelowVerdict::Certified(_)) => reasons.push("below_cert evidence differs from recomputation".into()),
        Ok(BelowVerdict::Failed(f)) => reasons.push(format!("yhat_N < -1 on K not certified: {f}")),
        Err(err) => reasons.push(format!("certify_below failed: {err}")),
    }
    Verification { valid: reasons.is_empty(), reasons }
}

/// Midpoint of the enclosure, for display.
pub fn enclosure_midpoint(cert: &ForgeCertificate) -> Rational {
    midpoint(&cert.enclosure.lo, &cert.enclosure.hi)
}
