//! Reliability engines.
//!
//! Three independent routes to the same polynomials:
//!
//! * edge-subset enumeration (`rel_bruteforce`, `split_bruteforce`, `f_polynomial`),
//! * deletion–contraction (`rel_delcon`),
//! * the complete-graph recurrences for `C_n = Rel(K_n)`, `R_n = Rel(H_n)` and
//!   `S_n = split(H_n)` (`recurrence_c`, `recurrence_r`, `recurrence_s`).
//!
//! On top of those sit the substitution identity
//! `Rel(G[H]) = Rel(H)^m * F(G, split(H) / Rel(H))`, the virtual edge
//! interaction `yhat_n = R_n / S_n + 1`, and [`certify_below`].
//!
//! # Certifying `yhat_n < -1` on an interval
//!
//! Let `T_n = R_n + 2 S_n`. If `S_n` has no root in `[lo, hi]` it has constant
//! sign `s` there, and `yhat_n < -1` is equivalent to `R_n / S_n < -2`, i.e. to
//! `T_n / S_n < 0`, i.e. to `s * sign(T_n) < 0`. If `T_n` also has no root in
//! `[lo, hi]` its sign is constant too, so checking the product of the two
//! endpoint signs proves the inequality on the whole closed interval. Both
//! root-freeness facts come from exact root counts on integer polynomials.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Gadget, GraphError, Multigraph};
use crate::poly::{clear_compose, PolyError, Polynomial, Sign};
use crate::rational::{pair, Rational};
use crate::rootiso::{Counter, RootError};

/// Edge-count ceiling for the `2^m` enumeration oracles.
pub const DEFAULT_MAX_ORACLE_EDGES: usize = 25;

/// Environment variable that lifts the oracle edge ceiling when set to `1`.
pub const GUARD_OVERRIDE_ENV: &str = "RELFORGE_GUARD_OVERRIDE";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RelError {
    #[error("graph has {m} edges; enumeration oracles are limited to {max} (set {GUARD_OVERRIDE_ENV}=1 to lift)")]
    TooManyEdges { m: usize, max: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("gadget index must be at least {min}, got {got}")]
    GadgetIndex { min: usize, got: usize },
    #[error("split reliability vanishes at {0}, so the virtual edge interaction is undefined there")]
    SplitVanishes(Rational),
    #[error("interval [{lo}, {hi}] must satisfy -1 < lo < hi < 0")]
    IntervalOutOfRange { lo: Box<Rational>, hi: Box<Rational> },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Edge ceiling for enumeration oracles; `None` means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGuard {
    pub max_edges: Option<usize>,
}

impl Default for OracleGuard {
    fn default() -> Self {
        OracleGuard { max_edges: Some(DEFAULT_MAX_ORACLE_EDGES) }
    }
}

impl OracleGuard {
    /// No ceiling. The caller accepts `2^m` work.
    pub fn unlimited() -> Self {
        OracleGuard { max_edges: None }
    }

    /// The default ceiling unless `RELFORGE_GUARD_OVERRIDE=1`.
    pub fn from_env() -> Self {
        match std::env::var(GUARD_OVERRIDE_ENV) {
            Ok(v) if v == "1" => Self::unlimited(),
            _ => Self::default(),
        }
    }

    fn check(&self, m: usize) -> Result<(), RelError> {
        match self.max_edges {
            Some(max) if m > max => Err(RelError::TooManyEdges { m, max }),
            _ => Ok(()),
        }
    }
}

/// Union-find with undo, for walking the subset lattice depth-first.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
    history: Vec<Option<usize>>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu { parent: (0..n).collect(), size: vec![1; n], components: n, history: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.history.push(None);
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        self.history.push(Some(rb));
    }

    fn undo(&mut self) {
        if let Some(rb) = self.history.pop().expect("undo without union") {
            let ra = self.parent[rb];
            self.parent[rb] = rb;
            self.size[ra] -= self.size[rb];
            self.components += 1;
        }
    }
}

/// `counts[j]` = number of `j`-edge subsets whose spanning subgraph satisfies `accept`.
fn count_subsets(g: &Multigraph, accept: impl Fn(&RollbackDsu) -> bool) -> Vec<u64> {
    fn walk(
        i: usize,
        chosen: usize,
        edges: &[(usize, usize)],
        dsu: &mut RollbackDsu,
        counts: &mut [u64],
        accept: &dyn Fn(&RollbackDsu) -> bool,
    ) {
        if i == edges.len() {
            if accept(dsu) {
                counts[chosen] += 1;
            }
            return;
        }
        walk(i + 1, chosen, edges, dsu, counts, accept);
        dsu.union(edges[i].0, edges[i].1);
        walk(i + 1, chosen + 1, edges, dsu, counts, accept);
        dsu.undo();
    }
    let mut counts = vec![0u64; g.edge_count() + 1];
    let mut dsu = RollbackDsu::new(g.n_vertices());
    walk(0, 0, g.edges(), &mut dsu, &mut counts, &accept);
    counts
}

/// `sum_j counts[j] (1-q)^j q^(m-j)`.
fn expand_by_kept_edges(counts: &[u64]) -> Polynomial {
    let m = counts.len() - 1;
    let one_minus_q = Polynomial::one_minus_q();
    let mut kept_pow = Polynomial::one();
    let mut total = Polynomial::zero();
    for (j, &c) in counts.iter().enumerate() {
        if c != 0 {
            total = &total + &kept_pow.shift(m - j).scale(&BigInt::from(c));
        }
        kept_pow = &kept_pow * &one_minus_q;
    }
    total
}

/// All-terminal reliability by enumerating every edge subset.
pub fn rel_bruteforce(g: &Multigraph) -> Result<Polynomial, RelError> {
    rel_bruteforce_with(g, OracleGuard::default())
}

pub fn rel_bruteforce_with(g: &Multigraph, guard: OracleGuard) -> Result<Polynomial, RelError> {
    guard.check(g.edge_count())?;
    Ok(expand_by_kept_edges(&count_subsets(g, |d| d.components == 1)))
}

/// Split reliability: surviving subgraph has exactly two components, one holding
/// each terminal.
pub fn split_bruteforce(h: &Gadget) -> Result<Polynomial, RelError> {
    split_bruteforce_with(h, OracleGuard::default())
}

pub fn split_bruteforce_with(h: &Gadget, guard: OracleGuard) -> Result<Polynomial, RelError> {
    guard.check(h.graph().edge_count())?;
    let (u, v) = h.terminals();
    let counts = count_subsets(h.graph(), |d| d.components == 2 && d.find(u) != d.find(v));
    Ok(expand_by_kept_edges(&counts))
}

/// `F(G, z) = sum_i F_i z^i`, `F_i` = number of `i`-edge deletions leaving `G` connected.
pub fn f_polynomial(g: &Multigraph) -> Result<Polynomial, RelError> {
    f_polynomial_with(g, OracleGuard::default())
}

pub fn f_polynomial_with(g: &Multigraph, guard: OracleGuard) -> Result<Polynomial, RelError> {
    guard.check(g.edge_count())?;
    let counts = count_subsets(g, |d| d.components == 1);
    Ok(Polynomial::from_coeffs(counts.iter().rev().map(|&c| BigInt::from(c)).collect()))
}

/// Closed form of `F` for `bundle_cycle(n, b)`: at most one bundle may be removed whole.
pub fn f_bundle_cycle(n: usize, b: usize) -> Polynomial {
    let zb = Polynomial::monomial(BigInt::one(), b);
    let partial = &Polynomial::from_i64s(&[1, 1]).pow(b as u32) - &zb;
    let rest = partial.pow((n - 1) as u32);
    &(&rest * &partial) + &(&rest * &zb).scale(&BigInt::from(n))
}

/// `(1 - q^b)^k (1 + k q^b)`, the reliability of `bundle_cycle(k + 1, b)`.
pub fn rel_bundle_cycle_closed(k: usize, b: usize) -> Polynomial {
    let qb = Polynomial::monomial(BigInt::one(), b);
    let base = &Polynomial::one() - &qb;
    &base.pow(k as u32) * &(&Polynomial::one() + &qb.scale(&BigInt::from(k)))
}

fn canonical(mut edges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    for e in edges.iter_mut() {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    edges
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut dsu = crate::graph::Dsu::new(n);
    for &(a, b) in edges {
        dsu.union(a, b);
    }
    dsu.components() == 1
}

/// All-terminal reliability by deletion–contraction on the lowest-indexed edge.
pub fn rel_delcon(g: &Multigraph) -> Result<Polynomial, RelError> {
    if !g.is_connected() {
        return Err(RelError::Disconnected);
    }
    let mut memo = HashMap::new();
    Ok(delcon(g.n_vertices(), g.edges().to_vec(), &mut memo))
}

type DelconMemo = HashMap<(usize, Vec<(usize, usize)>), Polynomial>;

fn delcon(n: usize, edges: Vec<(usize, usize)>, memo: &mut DelconMemo) -> Polynomial {
    if edges.is_empty() {
        return if n == 1 { Polynomial::one() } else { Polynomial::zero() };
    }
    let key = (n, edges);
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let (n, edges) = key;
    let (a, b) = edges[0];
    let rest = &edges[1..];
    // contract b into a, relabel the vertices above b, drop the new loops
    let relabel = |x: usize| {
        let x = if x == b { a } else { x };
        if x > b {
            x - 1
        } else {
            x
        }
    };
    let contracted: Vec<(usize, usize)> =
        rest.iter().map(|&(x, y)| (relabel(x), relabel(y))).filter(|(x, y)| x != y).collect();
    let mut result = &Polynomial::one_minus_q() * &delcon(n - 1, canonical(contracted), memo);
    if connected(n, rest) {
        result = &result + &(&Polynomial::q() * &delcon(n, rest.to_vec(), memo));
    }
    memo.insert((n, edges), result.clone());
    result
}

/// Exact binomial coefficient by the multiplicative formula.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc = acc * BigInt::from(n - k + i) / BigInt::from(i);
    }
    acc
}

/// Memoized `C_n`, `R_n`, `S_n`. Readers share; a writer extends each table in
/// order under the write lock, so every index is computed exactly once.
#[derive(Debug, Default)]
pub struct RecurrenceCache {
    // c[i] = C_{i+1}; r[i] = R_{i+2}; s[i] = S_{i+2}
    c: RwLock<Vec<Arc<Polynomial>>>,
    r: RwLock<Vec<Arc<Polynomial>>>,
    s: RwLock<Vec<Arc<Polynomial>>>,
}

impl RecurrenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache behind the free `recurrence_*` functions.
    pub fn global() -> &'static RecurrenceCache {
        static CACHE: OnceLock<RecurrenceCache> = OnceLock::new();
        CACHE.get_or_init(RecurrenceCache::new)
    }

    /// `C_1 .. C_n` (index `i` holds `C_{i+1}`).
    fn c_upto(&self, n: usize) -> Vec<Arc<Polynomial>> {
        {
            let c = self.c.read().unwrap();
            if c.len() >= n {
                return c[..n].to_vec();
            }
        }
        let mut c = self.c.write().unwrap();
        while c.len() < n {
            let k = c.len() + 1;
            let mut next = Polynomial::one();
            for a in 1..k {
                let term = c[a - 1].shift(a * (k - a)).scale(&binomial(k - 1, a - 1));
                next = &next - &term;
            }
            c.push(Arc::new(next));
        }
        c[..n].to_vec()
    }

    /// `C_n = Rel(K_n; q)`, `n >= 1`.
    pub fn c(&self, n: usize) -> Arc<Polynomial> {
        assert!(n >= 1, "C_n needs n >= 1");
        self.c_upto(n)[n - 1].clone()
    }

    /// `S_n = split(H_n; q)`, `n >= 2`.
    pub fn s(&self, n: usize) -> Arc<Polynomial> {
        assert!(n >= 2, "S_n needs n >= 2");
        {
            let s = self.s.read().unwrap();
            if s.len() > n - 2 {
                return s[n - 2].clone();
            }
        }
        let c = self.c_upto(n);
        let mut s = self.s.write().unwrap();
        while s.len() <= n - 2 {
            let k = s.len() + 2;
            let mut next = Polynomial::zero();
            for a in 1..k {
                let prod = &*c[a - 1] * &*c[k - a - 1];
                next = &next + &prod.shift(a * (k - a) - 1).scale(&binomial(k - 2, a - 1));
            }
            s.push(Arc::new(next));
        }
        s[n - 2].clone()
    }

    /// `R_n = Rel(H_n; q)`, `n >= 2`.
    pub fn r(&self, n: usize) -> Arc<Polynomial> {
        assert!(n >= 2, "R_n needs n >= 2");
        {
            let r = self.r.read().unwrap();
            if r.len() > n - 2 {
                return r[n - 2].clone();
            }
        }
        let c = self.c_upto(n);
        let mut r = self.r.write().unwrap();
        while r.len() <= n - 2 {
            let k = r.len() + 2;
            let mut next = Polynomial::one();
            for a in 1..k {
                next = &next - &c[a - 1].shift(a * (k - a) - 1).scale(&binomial(k - 2, a - 1));
            }
            for a in 3..k {
                next = &next - &r[a - 2].shift(a * (k - a)).scale(&binomial(k - 2, a - 2));
            }
            r.push(Arc::new(next));
        }
        r[n - 2].clone()
    }
}

pub fn recurrence_c(n: usize) -> Arc<Polynomial> {
    RecurrenceCache::global().c(n)
}

pub fn recurrence_r(n: usize) -> Arc<Polynomial> {
    RecurrenceCache::global().r(n)
}

pub fn recurrence_s(n: usize) -> Arc<Polynomial> {
    RecurrenceCache::global().s(n)
}

/// `R_n` and `S_n` for one gadget index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetPolys {
    pub n: usize,
    #[serde(rename = "R")]
    pub r: Polynomial,
    #[serde(rename = "S")]
    pub s: Polynomial,
}

impl GadgetPolys {
    pub fn new(n: usize) -> Result<Self, RelError> {
        if n < 2 {
            return Err(RelError::GadgetIndex { min: 2, got: n });
        }
        Ok(GadgetPolys { n, r: (*recurrence_r(n)).clone(), s: (*recurrence_s(n)).clone() })
    }

    /// Numerator `R_n + S_n` of `yhat_n`; the denominator is `S_n`.
    pub fn yhat_numerator(&self) -> Polynomial {
        &self.r + &self.s
    }

    /// `R_n + 2 S_n`, whose sign against `S_n` decides `yhat_n < -1`.
    pub fn threshold(&self) -> Polynomial {
        &self.r + &self.s.scale(&BigInt::from(2))
    }
}

/// `Rel(G[H])` from the substitution identity, with every ingredient taken
/// from the enumeration oracles.
pub fn rel_substitution(g: &Multigraph, h: &Gadget) -> Result<Polynomial, RelError> {
    if !g.is_connected() {
        return Err(RelError::Disconnected);
    }
    if !h.graph().is_connected() {
        return Err(RelError::Graph(GraphError::DisconnectedGadget));
    }
    let f = f_polynomial(g)?;
    let r = rel_bruteforce(h.graph())?;
    let s = split_bruteforce(h)?;
    Ok(clear_compose(&f, &s, &r, g.edge_count())?)
}

/// `Rel(G[H_n])` with `R_n`, `S_n` from the recurrences and `F(G)` by enumeration.
pub fn rel_substitution_hn(g: &Multigraph, n: usize) -> Result<Polynomial, RelError> {
    if n < 3 {
        return Err(RelError::GadgetIndex { min: 3, got: n });
    }
    if !g.is_connected() {
        return Err(RelError::Disconnected);
    }
    let f = f_polynomial(g)?;
    Ok(clear_compose(&f, &recurrence_s(n), &recurrence_r(n), g.edge_count())?)
}

/// `yhat_n(x) = (R_n(x) + S_n(x)) / S_n(x)`.
pub fn yhat_eval(n: usize, x: &Rational) -> Result<Rational, RelError> {
    if n < 3 {
        return Err(RelError::GadgetIndex { min: 3, got: n });
    }
    let s = recurrence_s(n).eval(x);
    if s.is_zero() {
        return Err(RelError::SplitVanishes(x.clone()));
    }
    Ok(recurrence_r(n).eval(x) / s + Rational::one())
}

/// Evidence that `yhat_n < -1` on `[lo, hi]`; see the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BelowCertificate {
    pub n: usize,
    #[serde(with = "pair")]
    pub lo: Rational,
    #[serde(with = "pair")]
    pub hi: Rational,
    /// Constant sign of `S_n` on the interval.
    pub split_sign: Sign,
    /// Exact root counter used for both counts.
    pub counter: Counter,
    /// Root count of `S_n` on `(lo, hi)`.
    pub split_roots: usize,
    /// Constant sign of `R_n + 2 S_n` on the interval.
    pub threshold_sign: Sign,
    /// Root count of `R_n + 2 S_n` on `(lo, hi)`.
    pub threshold_roots: usize,
}

/// Why `yhat_n < -1` could not be established on an interval.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum BelowFailure {
    #[error("split polynomial vanishes at {}", .x.0)]
    SplitVanishes { x: crate::rational::RationalPair },
    #[error("split polynomial changes sign on the interval")]
    SplitChangesSign,
    #[error("split polynomial has {count} root(s) in the interval")]
    SplitHasRoots { count: usize },
    #[error("yhat equals -1 at {}", .x.0)]
    ThresholdVanishes { x: crate::rational::RationalPair },
    #[error("yhat is not below -1 at {}", .x.0)]
    NotBelow { x: crate::rational::RationalPair },
    #[error("R + 2S has {count} root(s) in the interval")]
    ThresholdHasRoots { count: usize },
    #[error("root count of the split polynomial undecided")]
    SplitUndecided,
    #[error("root count of R + 2S undecided")]
    ThresholdUndecided,
}

impl BelowFailure {
    /// `'a'` when the split polynomial is at fault, `'b'` for the `yhat < -1` condition.
    pub fn condition(&self) -> char {
        match self {
            BelowFailure::SplitVanishes { .. }
            | BelowFailure::SplitChangesSign
            | BelowFailure::SplitHasRoots { .. }
            | BelowFailure::SplitUndecided => 'a',
            _ => 'b',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BelowVerdict {
    Certified(BelowCertificate),
    Failed(BelowFailure),
}

impl BelowVerdict {
    pub fn certificate(&self) -> Option<&BelowCertificate> {
        match self {
            BelowVerdict::Certified(c) => Some(c),
            BelowVerdict::Failed(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, BelowVerdict::Certified(_))
    }
}

/// Establishes `yhat_n(q) < -1` for every `q` in `[lo, hi]`, or says why not.
///
/// Cheap point checks at `lo`, the midpoint and `hi` run first; only a
/// candidate that survives them pays for the two exact root counts (Sturm
/// chains up to moderate degree, Descartes bisection beyond).
pub fn certify_below(n: usize, lo: &Rational, hi: &Rational) -> Result<BelowVerdict, RelError> {
    if n < 3 {
        return Err(RelError::GadgetIndex { min: 3, got: n });
    }
    if !(lo > &-Rational::one() && lo < hi && hi < &Rational::zero()) {
        return Err(RelError::IntervalOutOfRange { lo: Box::new(lo.clone()), hi: Box::new(hi.clone()) });
    }
    let r = recurrence_r(n);
    let s = recurrence_s(n);
    let t = &*r + &s.scale(&BigInt::from(2));
    let fail = |f| Ok(BelowVerdict::Failed(f));
    let at = |x: &Rational| crate::rational::RationalPair(x.clone());

    let samples = [lo.clone(), crate::rational::midpoint(lo, hi), hi.clone()];
    let s_signs: Vec<Sign> = samples.iter().map(|x| s.sign_at(x)).collect();
    if let Some(i) = s_signs.iter().position(|v| v.is_zero()) {
        return fail(BelowFailure::SplitVanishes { x: at(&samples[i]) });
    }
    if s_signs.iter().any(|&v| v != s_signs[0]) {
        return fail(BelowFailure::SplitChangesSign);
    }
    for x in &samples {
        let ts = t.sign_at(x);
        if ts.is_zero() {
            return fail(BelowFailure::ThresholdVanishes { x: at(x) });
        }
        if s_signs[0] * ts != Sign::Negative {
            return fail(BelowFailure::NotBelow { x: at(x) });
        }
    }
    let counter = Counter::for_polynomial(&s).max(Counter::for_polynomial(&t));
    let split_roots = match counter.count(&s, lo, hi) {
        Ok(0) => 0,
        Ok(count) => return fail(BelowFailure::SplitHasRoots { count }),
        Err(RootError::Inconclusive { .. }) => return fail(BelowFailure::SplitUndecided),
        Err(e) => return Err(e.into()),
    };
    let threshold_roots = match counter.count(&t, lo, hi) {
        Ok(0) => 0,
        Ok(count) => return fail(BelowFailure::ThresholdHasRoots { count }),
        Err(RootError::Inconclusive { .. }) => return fail(BelowFailure::ThresholdUndecided),
        Err(e) => return Err(e.into()),
    };
    Ok(BelowVerdict::Certified(BelowCertificate {
        n,
        lo: lo.clone(),
        hi: hi.clone(),
        split_sign: s_signs[0],
        counter,
        split_roots,
        threshold_sign: t.sign_at(lo),
        threshold_roots,
    }))
}

/// Exact values of the recurrence sequences at one point, computed by running
/// the recurrences on numbers rather than polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointValues {
    /// `c[k] = C_k(q)` for `k >= 1` (`c[0]` unused, set to 1).
    pub c: Vec<Rational>,
    /// `r[k] = R_k(q)` for `k >= 2`.
    pub r: Vec<Rational>,
    /// `s[k] = S_k(q)` for `k >= 2`.
    pub s: Vec<Rational>,
}

/// Runs the recurrences on numbers. With `q = p / D`, each value is carried as
/// the integer `X(q) D^deg X`, using the nominal degrees `C(n,2)` for `C_n` and
/// `C(n,2) - 1` for `R_n` and `S_n`, so no rational normalisation happens until
/// the end.
pub fn recurrence_values(q: &Rational, n_max: usize) -> PointValues {
    let n_max = n_max.max(2);
    let top = n_max * (n_max - 1) / 2;
    let powers = |base: &BigInt| {
        let mut v = Vec::with_capacity(top + 1);
        v.push(BigInt::one());
        for i in 1..=top {
            let next = &v[i - 1] * base;
            v.push(next);
        }
        v
    };
    let pp = powers(q.numer());
    let dp = powers(q.denom());
    let pairs = |k: usize| k * (k - 1) / 2;
    // scaled[k] = X_k(q) * D^deg
    let mut c = vec![BigInt::one(); n_max + 1];
    for k in 2..=n_max {
        let e = pairs(k);
        let mut acc = dp[e].clone();
        for a in 1..k {
            let x = a * (k - a);
            acc -= binomial(k - 1, a - 1) * &c[a] * &pp[x] * &dp[e - pairs(a) - x];
        }
        c[k] = acc;
    }
    let mut r = vec![BigInt::zero(); n_max + 1];
    let mut s = vec![BigInt::zero(); n_max + 1];
    for k in 2..=n_max {
        let e = pairs(k) - 1;
        let mut sk = BigInt::zero();
        let mut rk = dp[e].clone();
        for a in 1..k {
            let x = a * (k - a);
            let b = binomial(k - 2, a - 1);
            sk += &b * &c[a] * &c[k - a] * &pp[x - 1];
            rk -= b * &c[a] * &pp[x - 1] * &dp[e - pairs(a) - (x - 1)];
        }
        for a in 3..k {
            let x = a * (k - a);
            rk -= binomial(k - 2, a - 2) * &r[a] * &pp[x] * &dp[e - (pairs(a) - 1) - x];
        }
        s[k] = sk;
        r[k] = rk;
    }
    let unscale = |v: &[BigInt], deg: &dyn Fn(usize) -> usize, from: usize| -> Vec<Rational> {
        (0..=n_max)
            .map(|k| if k < from { Rational::from_integer(v[k].clone()) } else { Rational::new(v[k].clone(), dp[deg(k)].clone()) })
            .collect()
    };
    let mut c = unscale(&c, &pairs, 1);
    c[0] = Rational::one();
    let mut r = unscale(&r, &|k| pairs(k) - 1, 2);
    let mut s = unscale(&s, &|k| pairs(k) - 1, 2);
    for v in [&mut r, &mut s] {
        v[0] = Rational::zero();
        v[1] = Rational::zero();
    }
    PointValues { c, r, s }
}

/// One row of the convergence table at a fixed `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagRow {
    pub n: usize,
    /// `C_n(q)`, tends to 1.
    pub c: Rational,
    /// `R_n(q)`, tends to 1 (`None` for `n < 2`).
    pub r: Option<Rational>,
    /// `q^(2-n) S_n(q)`, tends to 2.
    pub scaled_split: Option<Rational>,
    /// `2 q^(n-2) yhat_n(q)`, tends to 1 (`None` where `S_n(q) = 0` or `n < 3`).
    pub scaled_yhat: Option<Rational>,
}

/// Convergence table for `n = 1..=n_max` at `q`.
pub fn diagnostic_rows(q: &Rational, n_max: usize) -> Vec<DiagRow> {
    let v = recurrence_values(q, n_max);
    let two = Rational::from_integer(BigInt::from(2));
    (1..=n_max)
        .map(|n| {
            if n < 2 {
                return DiagRow { n, c: v.c[n].clone(), r: None, scaled_split: None, scaled_yhat: None };
            }
            let qn2 = num_traits::pow(q.clone(), n - 2);
            let scaled_split = &v.s[n] / &qn2;
            let scaled_yhat = (n >= 3 && !v.s[n].is_zero())
                .then(|| &two * &qn2 * (&v.r[n] / &v.s[n] + Rational::one()));
            DiagRow { n, c: v.c[n].clone(), r: Some(v.r[n].clone()), scaled_split: Some(scaled_split), scaled_yhat }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64s(c)
    }

    fn h(n: usize) -> Gadget {
        Gadget::hn(n).unwrap()
    }

    #[test]
    fn bruteforce_trees_and_cycle() {
        let tree = Multigraph::star(5).unwrap();
        assert_eq!(rel_bruteforce(&tree).unwrap(), Polynomial::one_minus_q().pow(4));
        let c8 = &Polynomial::one_minus_q().pow(7) * &p(&[1, 7]);
        assert_eq!(rel_bruteforce(&Multigraph::cycle(8).unwrap()).unwrap(), c8);
        assert_eq!(rel_bruteforce(h(4).graph()).unwrap(), p(&[1, 0, -2, -4, 9, -4]));
    }

    #[test]
    fn bruteforce_guard() {
        let big = Multigraph::bundle_cycle(2, 13).unwrap();
        assert_eq!(rel_bruteforce(&big), Err(RelError::TooManyEdges { m: 26, max: 25 }));
        assert!(f_polynomial(&big).is_err());
        let small = OracleGuard { max_edges: Some(3) };
        assert!(rel_bruteforce_with(&Multigraph::cycle(4).unwrap(), small).is_err());
        assert!(rel_bruteforce_with(&Multigraph::cycle(4).unwrap(), OracleGuard::unlimited()).is_ok());
    }

    #[test]
    fn delcon_examples() {
        assert_eq!(rel_delcon(&Multigraph::cycle(2).unwrap()).unwrap(), p(&[1, 0, -1]));
        assert_eq!(rel_delcon(&Multigraph::complete(4).unwrap()).unwrap(), p(&[1, 0, 0, -4, -3, 12, -6]));
        assert_eq!(rel_delcon(&Multigraph::complete(2).unwrap()).unwrap(), p(&[1, -1]));
        assert_eq!(rel_delcon(&Multigraph::complete(1).unwrap()).unwrap(), Polynomial::one());
        assert_eq!(rel_delcon(&Multigraph::new(3, [(0, 1)]).unwrap()), Err(RelError::Disconnected));
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_bruteforce(&h(3)).unwrap(), p(&[0, 2, -2]));
        assert_eq!(split_bruteforce(&h(2)).unwrap(), Polynomial::one());
        assert_eq!(split_bruteforce(&h(5)).unwrap(), p(&[0, 0, 0, 2, 0, 6, -14, -24, 54, -24]));
    }

    #[test]
    fn recurrence_small_values() {
        assert_eq!(*recurrence_c(1), Polynomial::one());
        assert_eq!(*recurrence_c(2), p(&[1, -1]));
        assert_eq!(*recurrence_c(3), p(&[1, 0, -3, 2]));
        assert_eq!(*recurrence_c(4), p(&[1, 0, 0, -4, -3, 12, -6]));
        assert_eq!(*recurrence_s(2), Polynomial::one());
        assert_eq!(*recurrence_s(3), p(&[0, 2, -2]));
        assert_eq!(*recurrence_s(5), p(&[0, 0, 0, 2, 0, 6, -14, -24, 54, -24]));
        assert_eq!(*recurrence_r(2), Polynomial::zero());
        assert_eq!(*recurrence_r(3), p(&[1, -2, 1]));
        assert_eq!(*recurrence_r(4), p(&[1, 0, -2, -4, 9, -4]));
        assert_eq!(*recurrence_r(5), p(&[1, 0, 0, -2, -3, -6, 10, 30, -48, 18]));
    }

    #[test]
    fn independent_caches_agree_regardless_of_order() {
        let a = RecurrenceCache::new();
        let b = RecurrenceCache::new();
        let ra = a.r(9);
        let _ = b.s(4);
        let _ = b.c(12);
        assert_eq!(ra, b.r(9));
        assert_eq!(a.s(7), b.s(7));
    }

    #[test]
    fn edge_count_identity() {
        for n in 3..=12 {
            let d = n * (n - 1) / 2 - 1;
            assert_eq!(recurrence_r(n).degree(), Some(d), "R_{n}");
            assert_eq!(recurrence_s(n).degree(), Some(d), "S_{n}");
        }
    }

    #[test]
    fn f_polynomial_examples() {
        assert_eq!(f_polynomial(&Multigraph::cycle(8).unwrap()).unwrap(), p(&[1, 8]));
        assert_eq!(f_polynomial(&Multigraph::cycle(2).unwrap()).unwrap(), p(&[1, 2]));
        assert_eq!(f_polynomial(&Multigraph::path(6).unwrap()).unwrap(), Polynomial::one());
    }

    #[test]
    fn f_bundle_cycle_examples() {
        assert_eq!(f_bundle_cycle(8, 1), p(&[1, 8]));
        assert_eq!(f_bundle_cycle(2, 2), p(&[1, 4, 6, 4]));
        assert_eq!(f_bundle_cycle(3, 1), p(&[1, 3]));
        for n in 2..=4 {
            for b in 1..=3 {
                assert_eq!(f_bundle_cycle(n, b), f_polynomial(&Multigraph::bundle_cycle(n, b).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn substitution_examples() {
        let c2 = Multigraph::cycle(2).unwrap();
        let four_cycle = &Polynomial::one_minus_q().pow(3) * &p(&[1, 3]);
        assert_eq!(rel_substitution(&c2, &h(3)).unwrap(), four_cycle);
        let six_cycle = &Polynomial::one_minus_q().pow(5) * &p(&[1, 5]);
        assert_eq!(rel_substitution(&Multigraph::cycle(3).unwrap(), &h(3)).unwrap(), six_cycle);
        assert_eq!(rel_substitution_hn(&c2, 4).unwrap(), rel_substitution(&c2, &h(4)).unwrap());
        assert!(rel_substitution(&c2, &h(2)).is_err());
    }

    #[test]
    fn yhat_examples() {
        assert_eq!(yhat_eval(3, &rat(-1, 2)).unwrap(), rat(-1, 2));
        assert_eq!(yhat_eval(3, &rat(-2, 5)).unwrap(), rat(-3, 4));
        assert_eq!(yhat_eval(5, &int(0)), Err(RelError::SplitVanishes(int(0))));
        // closed form of yhat_5 by cross-multiplication
        let g = GadgetPolys::new(5).unwrap();
        let num = &p(&[1, 1]) * &p(&[1, 2, 4, 6, 6, 6]);
        let den = p(&[1, 3, 9, 12]).shift(3).scale(&BigInt::from(2));
        assert_eq!(&g.yhat_numerator() * &den, &num * &g.s);
    }

    #[test]
    fn certify_below_fixture() {
        let (lo, hi) = (rat(-2, 5), rat(-7, 20));
        let v = certify_below(5, &lo, &hi).unwrap();
        let cert = v.certificate().expect("N = 5 certifies");
        assert_eq!((cert.split_roots, cert.threshold_roots), (0, 0));
        assert_eq!(cert.split_sign * cert.threshold_sign, Sign::Negative);
        match certify_below(3, &lo, &hi).unwrap() {
            BelowVerdict::Failed(f) => assert_eq!(f.condition(), 'b'),
            other => panic!("N = 3 must fail, got {other:?}"),
        }
        assert!(certify_below(5, &hi, &lo).is_err());
        assert!(certify_below(5, &int(-1), &hi).is_err());
    }

    #[test]
    fn certify_below_fails_where_split_vanishes() {
        let s5 = recurrence_s(5);
        let roots = crate::rootiso::isolate_roots(&s5, &rat(-99, 100), &rat(-1, 100)).unwrap();
        assert_eq!(roots.len(), 1);
        let iv = &roots[0];
        match certify_below(5, &iv.lo, &iv.hi).unwrap() {
            BelowVerdict::Failed(f) => assert_eq!(f.condition(), 'a'),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn point_values_match_polynomials() {
        let q = rat(-3, 7);
        let v = recurrence_values(&q, 14);
        for n in 2..=14 {
            assert_eq!(v.c[n], recurrence_c(n).eval(&q));
            assert_eq!(v.r[n], recurrence_r(n).eval(&q));
            assert_eq!(v.s[n], recurrence_s(n).eval(&q));
        }
    }

    #[test]
    fn diag_rows_small_n() {
        let rows = diagnostic_rows(&rat(-1, 2), 5);
        assert_eq!(rows[1].c, rat(3, 2));
        assert_eq!(rows[2].c, int(0));
        // 2q * yhat_3(q) with yhat_3(-1/2) = -1/2
        assert_eq!(rows[2].scaled_yhat, Some(rat(1, 2)));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(40, 20), BigInt::from(137846528820u64));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }
}
