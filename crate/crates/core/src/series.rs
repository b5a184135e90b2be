//! Truncated formal series `x^v * sum_u c_u x^u` with exact coefficients,
//! Weyl-algebra operators and their action on series.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, falling_factorial_scalar, Rational, RationalVector};
use crate::error::{check_dim, GkzError, Result};
use crate::lattice::LatticeVector;

/// Cut-off for the infinite sums: offset `u` is kept iff
/// `sum_i weight_i |u_i| <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationFrontier {
    pub weight: Vec<u64>,
    pub bound: u64,
}

impl TruncationFrontier {
    pub fn new(weight: Vec<u64>, bound: u64) -> Result<Self> {
        if weight.is_empty() || weight.contains(&0) {
            return Err(GkzError::invalid("frontier weights must be positive"));
        }
        Ok(TruncationFrontier { weight, bound })
    }

    /// All-ones weight.
    pub fn uniform(n: usize, bound: u64) -> Self {
        TruncationFrontier {
            weight: vec![1; n],
            bound,
        }
    }

    pub fn dim(&self) -> usize {
        self.weight.len()
    }

    pub fn norm(&self, offset: &[i64]) -> u64 {
        self.weight
            .iter()
            .zip(offset)
            .map(|(&w, &u)| w * u.unsigned_abs())
            .sum()
    }

    pub fn contains(&self, offset: &[i64]) -> bool {
        self.norm(offset) <= self.bound
    }

    /// The frontier with its bound lowered by `by`, if that stays natural.
    pub fn shrunk(&self, by: u64) -> Option<Self> {
        self.bound.checked_sub(by).map(|bound| TruncationFrontier {
            weight: self.weight.clone(),
            bound,
        })
    }

    fn intersect(&self, other: &Self) -> Result<Self> {
        if self.weight != other.weight {
            return Err(GkzError::invalid("series frontiers use different weights"));
        }
        Ok(TruncationFrontier {
            weight: self.weight.clone(),
            bound: self.bound.min(other.bound),
        })
    }
}

/// `x^base * sum_{offset} coeff * x^offset`, exact inside `frontier`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    base: RationalVector,
    terms: BTreeMap<Vec<i64>, Rational>,
    frontier: TruncationFrontier,
}

impl TruncatedSeries {
    /// The zero series.
    pub fn zero(base: RationalVector, frontier: TruncationFrontier) -> Result<Self> {
        check_dim(base.dim(), frontier.dim())?;
        Ok(TruncatedSeries {
            base,
            terms: BTreeMap::new(),
            frontier,
        })
    }

    /// The single monomial `x^base`.
    pub fn monomial(base: RationalVector, frontier: TruncationFrontier) -> Result<Self> {
        let n = base.dim();
        let mut s = Self::zero(base, frontier)?;
        s.insert(vec![0; n], Rational::one())?;
        Ok(s)
    }

    /// Builds a series from `(offset, coeff)` pairs; repeated offsets add up.
    pub fn from_terms(
        base: RationalVector,
        frontier: TruncationFrontier,
        terms: impl IntoIterator<Item = (Vec<i64>, Rational)>,
    ) -> Result<Self> {
        let mut s = Self::zero(base, frontier)?;
        for (u, c) in terms {
            s.insert(u, c)?;
        }
        Ok(s)
    }

    /// Adds `coeff * x^(base + offset)`; the offset must lie inside the frontier.
    pub fn insert(&mut self, offset: Vec<i64>, coeff: Rational) -> Result<()> {
        check_dim(self.ambient_n(), offset.len())?;
        if !self.frontier.contains(&offset) {
            return Err(GkzError::InvariantViolation(format!(
                "offset {offset:?} lies outside the frontier"
            )));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.entry(offset) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += &coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &RationalVector {
        &self.base
    }

    pub fn frontier(&self) -> &TruncationFrontier {
        &self.frontier
    }

    pub fn ambient_n(&self) -> usize {
        self.base.dim()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic offset order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, offset: &[i64]) -> Rational {
        self.terms.get(offset).cloned().unwrap_or_else(Rational::zero)
    }

    /// True exponent `base + offset`.
    pub fn exponent(&self, offset: &[i64]) -> Result<RationalVector> {
        self.base.shifted(offset)
    }

    /// Drops everything outside `frontier`, which must sit inside the current one.
    pub fn restricted_to(&self, frontier: &TruncationFrontier) -> Result<Self> {
        let common = self.frontier.intersect(frontier)?;
        Ok(TruncatedSeries {
            base: self.base.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(u, _)| common.contains(u))
                .map(|(u, c)| (u.clone(), c.clone()))
                .collect(),
            frontier: common,
        })
    }

    /// Enlarges the frontier without adding terms. Only sound for a series
    /// already known to be complete, such as a finite polynomial.
    pub fn widened(&self, bound: u64) -> Self {
        let mut s = self.clone();
        s.frontier.bound = s.frontier.bound.max(bound);
        s
    }

    /// Re-expresses the series around a new base differing by an integer
    /// vector; the frontier bound drops by the weighted size of that shift.
    pub fn rebased(&self, new_base: RationalVector) -> Result<Self> {
        check_dim(self.ambient_n(), new_base.dim())?;
        let mut shift = Vec::with_capacity(self.ambient_n());
        for (old, new) in self.base.iter().zip(new_base.iter()) {
            let d = (old - new)
                .to_i64()
                .ok_or_else(|| GkzError::invalid("rebasing needs an integer base difference"))?;
            shift.push(d);
        }
        let frontier = self
            .frontier
            .shrunk(self.frontier.norm(&shift))
            .ok_or_else(|| GkzError::InsufficientData("base shift exceeds the frontier".into()))?;
        let mut out = Self::zero(new_base, frontier)?;
        for (u, c) in &self.terms {
            let moved: Vec<i64> = u.iter().zip(&shift).map(|(a, b)| a + b).collect();
            if out.frontier.contains(&moved) {
                out.insert(moved, c.clone())?;
            }
        }
        Ok(out)
    }

    fn combine(&self, other: &Self, sign: &Rational) -> Result<Self> {
        if self.base != other.base {
            return Err(GkzError::invalid("series have different base exponents"));
        }
        let frontier = self.frontier.intersect(&other.frontier)?;
        let mut out = Self::zero(self.base.clone(), frontier)?;
        for (u, c) in &self.terms {
            if out.frontier.contains(u) {
                out.insert(u.clone(), c.clone())?;
            }
        }
        for (u, c) in &other.terms {
            if out.frontier.contains(u) {
                out.insert(u.clone(), c * sign)?;
            }
        }
        Ok(out)
    }

    /// Sum on the common frontier.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, &Rational::one())
    }

    /// Difference on the common frontier.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, &-Rational::one())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let terms = if factor.is_zero() {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(u, c)| (u.clone(), c * factor)).collect()
        };
        TruncatedSeries {
            base: self.base.clone(),
            terms,
            frontier: self.frontier.clone(),
        }
    }

    /// Same base and same coefficients wherever both series are exact.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_empty())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{} * [", self.base)?;
        for (i, (u, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*x^{u:?}")?;
        }
        write!(f, "] within {:?}", self.frontier)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesTermJson {
    offset: Vec<i64>,
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    base: RationalVector,
    terms: Vec<SeriesTermJson>,
    frontier: TruncationFrontier,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            base: self.base.clone(),
            terms: self
                .terms
                .iter()
                .map(|(u, c)| SeriesTermJson {
                    offset: u.clone(),
                    coeff: c.clone(),
                })
                .collect(),
            frontier: self.frontier.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(deserializer)?;
        TruncatedSeries::from_terms(
            raw.base,
            raw.frontier,
            raw.terms.into_iter().map(|t| (t.offset, t.coeff)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// One monomial `coeff * x^x * d^d` of a Weyl operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylTerm {
    pub coeff: Rational,
    pub x: Vec<u64>,
    pub d: Vec<u64>,
}

/// A finite `Q`-linear combination of normally ordered monomials `x^a d^b`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylOperator {
    n: usize,
    terms: Vec<WeylTerm>,
}

impl WeylOperator {
    /// Normalizes: merges equal `(x, d)` pairs and drops zero coefficients.
    pub fn new(n: usize, terms: impl IntoIterator<Item = WeylTerm>) -> Result<Self> {
        let mut merged: BTreeMap<(Vec<u64>, Vec<u64>), Rational> = BTreeMap::new();
        for t in terms {
            check_dim(n, t.x.len())?;
            check_dim(n, t.d.len())?;
            *merged.entry((t.x, t.d)).or_insert_with(Rational::zero) += &t.coeff;
        }
        Ok(WeylOperator {
            n,
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((x, d), coeff)| WeylTerm { coeff, x, d })
                .collect(),
        })
    }

    pub fn zero(n: usize) -> Self {
        WeylOperator { n, terms: Vec::new() }
    }

    pub fn monomial(coeff: Rational, x: Vec<u64>, d: Vec<u64>) -> Result<Self> {
        let n = x.len();
        Self::new(n, [WeylTerm { coeff, x, d }])
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::new(n, [WeylTerm { coeff: c, x: vec![0; n], d: vec![0; n] }]).expect("dimensions agree")
    }

    /// `d^d`.
    pub fn derivative(d: Vec<u64>) -> Self {
        let n = d.len();
        Self::monomial(Rational::one(), vec![0; n], d).expect("dimensions agree")
    }

    /// `sum_i a_i x_i d_i - beta`.
    pub fn euler(a: &[u64], beta: &Rational) -> Self {
        let n = a.len();
        let mut terms: Vec<WeylTerm> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                WeylTerm {
                    coeff: Rational::from(a[i]),
                    x: e.clone(),
                    d: e,
                }
            })
            .collect();
        terms.push(WeylTerm {
            coeff: -beta.clone(),
            x: vec![0; n],
            d: vec![0; n],
        });
        Self::new(n, terms).expect("dimensions agree")
    }

    /// `d^{u+} - d^{u-}`.
    pub fn binomial(u: &LatticeVector) -> Self {
        Self::derivative(u.plus()).sub(&Self::derivative(u.minus())).expect("dimensions agree")
    }

    /// `d^p - d^q`.
    pub fn binomial_from(plus: Vec<u64>, minus: Vec<u64>) -> Result<Self> {
        check_dim(plus.len(), minus.len())?;
        Self::derivative(plus).sub(&Self::derivative(minus))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[WeylTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Self::new(self.n, self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(
            self.n,
            self.terms.iter().map(|t| WeylTerm {
                coeff: &t.coeff * c,
                x: t.x.clone(),
                d: t.d.clone(),
            }),
        )
        .expect("dimensions agree")
    }

    /// The product `self * other` (apply `other` first), normally ordered via
    /// `d^b x^c = sum_k prod_i C(b_i, k_i) (c_i)_{k_i} x^{c-k} d^{b-k}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = Vec::new();
        for s in &self.terms {
            for t in &other.terms {
                let mut k = vec![0u64; n];
                loop {
                    let mut coeff = &s.coeff * &t.coeff;
                    for i in 0..n {
                        coeff *= &binomial(&Rational::from(s.d[i]), k[i]);
                        coeff *= &falling_factorial_scalar(&Rational::from(t.x[i]), k[i]);
                    }
                    out.push(WeylTerm {
                        coeff,
                        x: (0..n).map(|i| s.x[i] + t.x[i] - k[i]).collect(),
                        d: (0..n).map(|i| s.d[i] - k[i] + t.d[i]).collect(),
                    });
                    // Next multi-index k <= min(s.d, t.x).
                    let mut i = 0;
                    while i < n {
                        if k[i] < s.d[i].min(t.x[i]) {
                            k[i] += 1;
                            break;
                        }
                        k[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
        Self::new(n, out)
    }

    /// Largest weighted offset displacement `sum_i w_i |x_i - d_i|` of a term.
    pub fn shift(&self, weight: &[u64]) -> u64 {
        self.terms
            .iter()
            .map(|t| {
                (0..self.n)
                    .map(|i| weight[i] * (t.x[i] as i64 - t.d[i] as i64).unsigned_abs())
                    .sum::<u64>()
            })
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, t) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            for (name, exps) in [("x", &t.x), ("d", &t.d)] {
                for (i, &e) in exps.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(format!("{name}{}", i + 1)),
                        _ => factors.push(format!("{name}{}^{e}", i + 1)),
                    }
                }
            }
            let negative = t.coeff.is_negative();
            let mag = t.coeff.abs();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let unit = mag == Rational::one();
            match (unit, factors.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{}", factors.join("*"))?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylOperator({self})")
    }
}

impl Serialize for WeylOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeylOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<WeylTerm>::deserialize(deserializer)?;
        let n = terms
            .first()
            .map(|t| t.x.len())
            .ok_or_else(|| serde::de::Error::custom("operator needs at least one term"))?;
        WeylOperator::new(n, terms).map_err(serde::de::Error::custom)
    }
}

/// `op(f)`, exact on `f`'s frontier shrunk by `op.shift(weight)`.
pub fn apply_operator(op: &WeylOperator, f: &TruncatedSeries) -> Result<TruncatedSeries> {
    check_dim(f.ambient_n(), op.dim())?;
    let shift = op.shift(&f.frontier.weight);
    let frontier = f.frontier.shrunk(shift).ok_or_else(|| {
        GkzError::InsufficientData(format!(
            "frontier bound {} is smaller than the operator shift {shift}",
            f.frontier.bound
        ))
    })?;
    let n = f.ambient_n();
    let mut acc: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    for (u, c) in &f.terms {
        let exponent: Vec<Rational> = (0..n).map(|i| &f.base[i] + Rational::from(u[i])).collect();
        for t in &op.terms {
            let target: Vec<i64> = (0..n).map(|i| u[i] + t.x[i] as i64 - t.d[i] as i64).collect();
            if !frontier.contains(&target) {
                continue;
            }
            let mut coeff = c * &t.coeff;
            for i in 0..n {
                if t.d[i] > 0 {
                    coeff *= &falling_factorial_scalar(&exponent[i], t.d[i]);
                    if coeff.is_zero() {
                        break;
                    }
                }
            }
            if !coeff.is_zero() {
                *acc.entry(target).or_insert_with(Rational::zero) += &coeff;
            }
        }
    }
    TruncatedSeries::from_terms(f.base.clone(), frontier, acc)
}

/// Outcome of applying one operator to a series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    pub operator: String,
    pub residual_term_count: usize,
    /// Residual offset of largest weighted norm (first in lexicographic order).
    pub max_residual_offset: Option<Vec<i64>>,
    pub frontier: TruncationFrontier,
}

impl AnnihilationReport {
    pub fn is_zero(&self) -> bool {
        self.residual_term_count == 0
    }
}

/// Applies every operator and records the non-vanishing residual terms.
pub fn verify_annihilation(ops: &[WeylOperator], f: &TruncatedSeries) -> Result<Vec<AnnihilationReport>> {
    ops.iter()
        .map(|op| {
            let r = apply_operator(op, f)?;
            let mut max: Option<(u64, &Vec<i64>)> = None;
            for u in r.terms.keys() {
                let norm = r.frontier.norm(u);
                if max.is_none_or(|(m, _)| norm > m) {
                    max = Some((norm, u));
                }
            }
            Ok(AnnihilationReport {
                operator: op.to_string(),
                residual_term_count: r.len(),
                max_residual_offset: max.map(|(_, u)| u.clone()),
                frontier: r.frontier.clone(),
            })
        })
        .collect()
}

/// Rewrites `op` under `x_i = t_i + epsilon`: each `x_i^e` expands binomially.
pub fn substitute_unit_translation(op: &WeylOperator, i: usize, epsilon: &Rational) -> Result<WeylOperator> {
    if i >= op.dim() {
        return Err(GkzError::invalid(format!("variable index {i} out of range")));
    }
    if epsilon.is_zero() {
        return Err(GkzError::invalid("translation needs epsilon != 0"));
    }
    let mut out = Vec::new();
    for t in op.terms() {
        let e = t.x[i];
        for l in 0..=e {
            let mut x = t.x.clone();
            x[i] = l;
            out.push(WeylTerm {
                coeff: &t.coeff * binomial(&Rational::from(e), l) * epsilon.pow((e - l) as u32),
                x,
                d: t.d.clone(),
            });
        }
    }
    WeylOperator::new(op.dim(), out)
}

/// `t_i = 1 / x_i`: negates coordinate `i` of the base and of every offset.
pub fn inverse_variable_rewrite(f: &TruncatedSeries, i: usize) -> Result<TruncatedSeries> {
    if i >= f.ambient_n() {
        return Err(GkzError::invalid(format!("variable index {i} out of range")));
    }
    let mut base = f.base.clone().into_inner();
    base[i] = -base[i].clone();
    let terms = f.terms.iter().map(|(u, c)| {
        let mut u = u.clone();
        u[i] = -u[i];
        (u, c.clone())
    });
    TruncatedSeries::from_terms(RationalVector::new(base), f.frontier.clone(), terms)
}

/// Expands `f` around `x_i = epsilon` as a series in `t_i = x_i - epsilon`,
/// using `(t_i + eps)^e = sum_l C(e, l) eps^{e-l} t_i^l`. The result has base
/// coordinate `i` equal to 0 and keeps the terms inside `out`.
///
/// Every group of terms sharing their exponents off coordinate `i` must be
/// complete in `f` for the result to be exact; callers guarantee that.
pub fn expand_at_translated_point(
    f: &TruncatedSeries,
    i: usize,
    epsilon: &Rational,
    out: &TruncationFrontier,
) -> Result<TruncatedSeries> {
    let n = f.ambient_n();
    if i >= n {
        return Err(GkzError::invalid(format!("variable index {i} out of range")));
    }
    check_dim(n, out.dim())?;
    if epsilon.is_zero() {
        return Err(GkzError::invalid("translation needs epsilon != 0"));
    }
    let mut base = f.base.clone().into_inner();
    base[i] = Rational::zero();
    let mut series = TruncatedSeries::zero(RationalVector::new(base), out.clone())?;
    for (u, c) in &f.terms {
        let e = &f.base[i] + Rational::from(u[i]);
        let power_base = if *epsilon == Rational::one() {
            None
        } else if let Some(ei) = e.to_i64() {
            Some(ei)
        } else {
            return Err(GkzError::Unsupported(
                "non-integer exponents expand rationally only around epsilon = 1".into(),
            ));
        };
        let mut target = u.clone();
        target[i] = 0;
        let rest = out.norm(&target);
        if rest > out.bound {
            continue;
        }
        let max_l = (out.bound - rest) / out.weight[i];
        for l in 0..=max_l {
            let mut coeff = c * binomial(&e, l);
            if coeff.is_zero() {
                // C(e, l) vanishes for all later l once e is a natural below l.
                if e.is_natural() {
                    break;
                }
                continue;
            }
            if let Some(ei) = power_base {
                let p = ei - l as i64;
                let eps_pow = if p >= 0 {
                    epsilon.pow(p as u32)
                } else {
                    epsilon.recip().pow((-p) as u32)
                };
                coeff *= &eps_pow;
            }
            target[i] = l as i64;
            series.insert(target.clone(), coeff)?;
        }
    }
    Ok(series)
}
