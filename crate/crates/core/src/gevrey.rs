//! Gevrey-order scaling, empirical Gevrey indices, slopes along coordinate
//! hyperplanes, Ext-dimension tables and polynomial solutions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::arith::{log_factorial, Rational, RationalVector};
use crate::error::{GkzError, Result};
use crate::gamma::{gamma_series, special_index};
use crate::lattice::{semigroup_contains, CurveMatrix, Family, DEFAULT_TERM_CAP};
use crate::series::{TruncatedSeries, TruncationFrontier};
use crate::system::{build_system, default_degree_bound};

/// Fraction of leading diagonal terms discarded before the regression.
pub const BURN_IN: f64 = 0.2;

/// A term of `rho_s(f)`: the exact coefficient and its float scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelTerm {
    pub offset: Vec<i64>,
    pub coeff: Rational,
    pub scaled: f64,
}

/// `rho_s(f) = sum_i f_i x^i / i!^{s-1}` along one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelSeries {
    pub base: RationalVector,
    pub s: Rational,
    pub var: usize,
    pub terms: Vec<BorelTerm>,
}

/// Degree used for the `i!` factor: the integer part of the `x_var` exponent,
/// negative degrees counting as 0.
fn borel_degree(f: &TruncatedSeries, offset: &[i64], var: usize) -> u64 {
    let e = &f.base()[var] + Rational::from(offset[var]);
    u64::try_from(e.floor()).unwrap_or(0)
}

/// Scales the coefficient of `x_var`-degree `i` by `exp(-(s-1) ln i!)`.
pub fn borel_rho(f: &TruncatedSeries, s: &Rational, var: usize) -> Result<BorelSeries> {
    if *s < Rational::one() {
        return Err(GkzError::invalid(format!("Gevrey order s = {s} must be at least 1")));
    }
    if var >= f.ambient_n() {
        return Err(GkzError::invalid(format!("variable index {var} out of range")));
    }
    let sm1 = (s - Rational::one()).to_f64();
    let terms = f
        .terms()
        .map(|(u, c)| {
            let i = borel_degree(f, u, var);
            let scaled = if sm1 == 0.0 {
                c.to_f64()
            } else {
                let sign = if c.is_negative() { -1.0 } else { 1.0 };
                sign * (c.ln_abs() - sm1 * log_factorial(i)).exp()
            };
            BorelTerm {
                offset: u.clone(),
                coeff: c.clone(),
                scaled,
            }
        })
        .collect();
    Ok(BorelSeries {
        base: f.base().clone(),
        s: s.clone(),
        var,
        terms,
    })
}

/// Which coefficients form the sequence `c_k` fed to the estimator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    /// Offsets `m * direction`, `m >= 0`.
    Ray(Vec<i64>),
    /// Largest `|c|` for each `x_var` exponent.
    MaxPerDegree,
}

impl fmt::Display for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagonal::Ray(d) => write!(f, "ray {d:?}"),
            Diagonal::MaxPerDegree => write!(f, "max per degree"),
        }
    }
}

/// Empirical Gevrey index along one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub diagonal: String,
    pub terms_used: usize,
    /// Set when the series is a polynomial; the estimate is then 1 by convention.
    pub polynomial: bool,
}

fn is_polynomial(f: &TruncatedSeries) -> bool {
    f.terms().all(|(u, _)| {
        f.exponent(u)
            .map(|e| e.iter().all(Rational::is_natural))
            .unwrap_or(false)
    })
}

/// `(k, ln|c_k|)` pairs along the chosen diagonal, sorted by `k`, with `k > 0`.
fn diagonal_points(f: &TruncatedSeries, var: usize, diagonal: &Diagonal) -> Result<Vec<(f64, f64)>> {
    let mut by_degree: BTreeMap<Rational, f64> = BTreeMap::new();
    match diagonal {
        Diagonal::Ray(d) => {
            if d.len() != f.ambient_n() || d.iter().all(|&x| x == 0) {
                return Err(GkzError::invalid("diagonal direction must be a nonzero vector of the series dimension"));
            }
            let p = d.iter().position(|&x| x != 0).expect("nonzero direction");
            for (u, c) in f.terms() {
                if u[p] % d[p] != 0 {
                    continue;
                }
                let m = u[p] / d[p];
                if m >= 0 && u.iter().zip(d).all(|(&ui, &di)| ui == m * di) {
                    by_degree.insert(&f.base()[var] + Rational::from(u[var]), c.ln_abs());
                }
            }
        }
        Diagonal::MaxPerDegree => {
            for (u, c) in f.terms() {
                let k = &f.base()[var] + Rational::from(u[var]);
                let l = c.ln_abs();
                let slot = by_degree.entry(k).or_insert(f64::NEG_INFINITY);
                *slot = slot.max(l);
            }
        }
    }
    Ok(by_degree
        .into_iter()
        .map(|(k, l)| (k.to_f64(), l))
        .filter(|&(k, _)| k > 0.0)
        .collect())
}

/// Estimates the Gevrey index `s` along `x_var` from the growth of the
/// diagonal coefficients: after a 20% burn-in, `ln|c_k|` is regressed on
/// `[k ln k, k, ln k, 1]` and `s = 1 + (k ln k coefficient)`.
pub fn gevrey_index_estimate(
    f: &TruncatedSeries,
    var: usize,
    min_terms: usize,
    diagonal: &Diagonal,
) -> Result<GevreyEstimate> {
    if var >= f.ambient_n() {
        return Err(GkzError::invalid(format!("variable index {var} out of range")));
    }
    let min_terms = min_terms.max(8);
    if is_polynomial(f) {
        return Ok(GevreyEstimate {
            estimate: 1.0,
            stderr: 0.0,
            diagonal: diagonal.to_string(),
            terms_used: f.len(),
            polynomial: true,
        });
    }
    let points = diagonal_points(f, var, diagonal)?;
    let skip = (points.len() as f64 * BURN_IN).floor() as usize;
    let used = &points[skip..];
    if used.len() < min_terms {
        return Err(GkzError::InsufficientData(format!(
            "{} diagonal terms after burn-in, need at least {min_terms}",
            used.len()
        )));
    }
    let rows = used.len();
    let x = DMatrix::from_fn(rows, 4, |r, c| {
        let k = used[r].0;
        match c {
            0 => k * k.ln(),
            1 => k,
            2 => k.ln(),
            _ => 1.0,
        }
    });
    let y = DVector::from_iterator(rows, used.iter().map(|p| p.1));
    let xtx = x.transpose() * &x;
    let inv = xtx
        .try_inverse()
        .ok_or_else(|| GkzError::InsufficientData("degenerate regression design".into()))?;
    let beta = &inv * x.transpose() * &y;
    let resid = &y - &x * &beta;
    let dof = rows.saturating_sub(4).max(1) as f64;
    let sigma2 = resid.dot(&resid) / dof;
    Ok(GevreyEstimate {
        estimate: 1.0 + beta[0],
        stderr: (sigma2 * inv[(0, 0)]).max(0.0).sqrt(),
        diagonal: diagonal.to_string(),
        terms_used: rows,
        polynomial: false,
    })
}

/// Slope data along the hyperplane `x_hyperplane = 0` (0-based index).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub hyperplane: usize,
    pub has_slope: bool,
    /// Gevrey filtration jump `a_n / a_{n-1}`.
    pub gevrey_jump: Option<Rational>,
    /// The same slope in the `a_{n-1} / (a_{n-1} - a_n)` convention.
    pub alt_slope: Option<Rational>,
}

/// One report per coordinate hyperplane; only `x_n = 0` carries a slope.
pub fn slope_report(matrix: &CurveMatrix) -> Vec<SlopeReport> {
    let n = matrix.n();
    let (p, l) = (Rational::from(matrix.second_last()), Rational::from(matrix.last()));
    (0..n)
        .map(|i| {
            if i == n - 1 {
                SlopeReport {
                    hyperplane: i,
                    has_slope: true,
                    gevrey_jump: Some(&l / &p),
                    alt_slope: Some(&p / &(&p - &l)),
                }
            } else {
                SlopeReport {
                    hyperplane: i,
                    has_slope: false,
                    gevrey_jump: None,
                    alt_slope: None,
                }
            }
        })
        .collect()
}

/// A Gevrey order `1 <= s <= inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GevreyOrder {
    Finite(Rational),
    Infinity,
}

impl GevreyOrder {
    pub fn at_least(&self, threshold: &Rational) -> bool {
        match self {
            GevreyOrder::Finite(s) => s >= threshold,
            GevreyOrder::Infinity => true,
        }
    }
}

impl FromStr for GevreyOrder {
    type Err = GkzError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let order = if matches!(t, "inf" | "infinity" | "∞") {
            GevreyOrder::Infinity
        } else {
            GevreyOrder::Finite(t.parse()?)
        };
        if let GevreyOrder::Finite(v) = &order {
            if *v < Rational::one() {
                return Err(GkzError::invalid(format!("Gevrey order s = {v} must be at least 1")));
            }
        }
        Ok(order)
    }
}

impl fmt::Display for GevreyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GevreyOrder::Finite(s) => write!(f, "{s}"),
            GevreyOrder::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for GevreyOrder {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GevreyOrder {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheaf {
    /// `O_{X|Y}`.
    Holomorphic,
    /// `O^_{X|Y}(s)`.
    Formal,
    /// `Q_Y(s)`.
    Quotient,
}

impl Sheaf {
    pub const ALL: [Sheaf; 3] = [Sheaf::Holomorphic, Sheaf::Formal, Sheaf::Quotient];

    fn label(self) -> &'static str {
        match self {
            Sheaf::Holomorphic => "O_{X|Y}",
            Sheaf::Formal => "O^_{X|Y}(s)",
            Sheaf::Quotient => "Q_Y(s)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    /// The origin (plane) or a point of `Y ∩ Z`.
    Origin,
    /// A point of `Y` off the origin (plane) or off `Z`.
    SmoothPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaClass {
    Special,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Exact,
    /// Holds for all but finitely many `beta`.
    GenericBeta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCell {
    pub sheaf: Sheaf,
    pub ext: u8,
    pub point: PointClass,
    /// `None` where no value is known for this family.
    pub value: Option<u64>,
}

/// `dim Ext^i(M_A(beta), F)` at the two point classes of `Y = (x_n = 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub matrix: Vec<u64>,
    pub beta: Rational,
    pub s: GevreyOrder,
    pub beta_class: BetaClass,
    pub validity: Validity,
    /// `a_n / a_{n-1}`.
    pub threshold: Rational,
    /// `a` (plane) or `a_{n-1}`.
    pub rank: u64,
    pub cells: Vec<DimensionCell>,
}

impl DimensionTable {
    /// Cell lookup; every `Ext^i` with `i >= 2` vanishes.
    pub fn value(&self, sheaf: Sheaf, ext: u8, point: PointClass) -> Option<u64> {
        if ext >= 2 {
            return Some(0);
        }
        self.cells
            .iter()
            .find(|c| c.sheaf == sheaf && c.ext == ext && c.point == point)
            .and_then(|c| c.value)
    }

    /// Aligned text table: rows are sheaves, columns `Ext^0`/`Ext^1` at the
    /// two point classes.
    pub fn render_text(&self) -> String {
        let origin = if self.matrix.len() == 2 { "origin" } else { "z" };
        let header = [
            "sheaf".to_string(),
            format!("Ext0 {origin}"),
            "Ext0 p".to_string(),
            format!("Ext1 {origin}"),
            "Ext1 p".to_string(),
        ];
        let mut rows = vec![header.to_vec()];
        for sheaf in Sheaf::ALL {
            let mut row = vec![sheaf.label().to_string()];
            for ext in [0u8, 1] {
                for point in [PointClass::Origin, PointClass::SmoothPoint] {
                    row.push(self.value(sheaf, ext, point).map_or("-".into(), |v| v.to_string()));
                }
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..5).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
        let matrix: Vec<String> = self.matrix.iter().map(u64::to_string).collect();
        let mut out = format!(
            "A = ({}), beta = {} ({}), s = {}, threshold = {}, rank = {}, validity = {}\n",
            matrix.join(" "),
            self.beta,
            match self.beta_class {
                BetaClass::Special => "special",
                BetaClass::Generic => "generic",
            },
            self.s,
            self.threshold,
            self.rank,
            match self.validity {
                Validity::Exact => "exact",
                Validity::GenericBeta => "generic beta",
            }
        );
        for row in rows {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join(" | ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Whether `beta` lies in `N A` (plane: `aN + bN`; smooth shapes: `N`).
pub fn is_special_beta(matrix: &CurveMatrix, beta: &Rational) -> Result<bool> {
    let Some(b) = beta.to_i64() else { return Ok(false) };
    if b < 0 {
        return Ok(false);
    }
    Ok(semigroup_contains(matrix.entries(), b)?.member)
}

/// The Ext-dimension table for `(A, beta, s)`.
///
/// Plane and smooth shapes fill every cell; general matrices fill only the
/// `Q_Y(s)` row, valid for generic `beta`.
pub fn dimension_table(matrix: &CurveMatrix, beta: &Rational, s: &GevreyOrder) -> Result<DimensionTable> {
    let threshold = Rational::from(matrix.last()) / Rational::from(matrix.second_last());
    let rank = match matrix.family() {
        Family::Plane => matrix.a(0),
        _ => matrix.second_last(),
    };
    let special = is_special_beta(matrix, beta)?;
    let general = matches!(matrix.family(), Family::General);
    let above = s.at_least(&threshold);
    let sp = u64::from(special);
    let mut cells = Vec::new();
    let mut put = |sheaf, ext, point, value: Option<u64>| {
        cells.push(DimensionCell { sheaf, ext, point, value });
    };
    use PointClass::{Origin, SmoothPoint};
    let known = |v: u64| if general { None } else { Some(v) };
    put(Sheaf::Holomorphic, 0, Origin, known(sp));
    put(Sheaf::Holomorphic, 0, SmoothPoint, known(sp));
    put(Sheaf::Holomorphic, 1, Origin, known(sp));
    put(Sheaf::Holomorphic, 1, SmoothPoint, known(sp));
    put(Sheaf::Formal, 0, Origin, known(sp));
    put(Sheaf::Formal, 0, SmoothPoint, known(if above { rank } else { sp }));
    put(Sheaf::Formal, 1, Origin, known(sp));
    put(Sheaf::Formal, 1, SmoothPoint, known(if above { 0 } else { sp }));
    put(Sheaf::Quotient, 0, Origin, Some(0));
    put(Sheaf::Quotient, 0, SmoothPoint, Some(if above { rank } else { 0 }));
    put(Sheaf::Quotient, 1, Origin, Some(0));
    put(Sheaf::Quotient, 1, SmoothPoint, Some(0));
    Ok(DimensionTable {
        matrix: matrix.entries().to_vec(),
        beta: beta.clone(),
        s: s.clone(),
        beta_class: if special { BetaClass::Special } else { BetaClass::Generic },
        validity: if general { Validity::GenericBeta } else { Validity::Exact },
        threshold,
        rank,
        cells,
    })
}

/// The polynomial solution for `beta in N A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialSolution {
    /// Index of the exponent `v^q`; absent for general matrices, where the
    /// exponent is a semigroup witness.
    pub q: Option<u64>,
    pub exponent: RationalVector,
    /// Complete: the frontier encloses every monomial of the polynomial.
    pub series: TruncatedSeries,
}

/// `phi_{v^q}` when it is a polynomial, i.e. exactly when `beta in N A`.
pub fn polynomial_solution(matrix: &CurveMatrix, beta: &Rational) -> Result<Option<PolynomialSolution>> {
    if !is_special_beta(matrix, beta)? {
        return Ok(None);
    }
    let n = matrix.n();
    let b = beta.to_i64().expect("special beta is a natural");
    let (q, exponent) = match matrix.family() {
        Family::Plane => {
            let (q, m0) = special_index(matrix, beta)?.expect("special beta");
            (Some(q), RationalVector::from_integers(&[m0 as i64, q as i64]))
        }
        Family::Smooth | Family::Homogenized { .. } => {
            let (q, m0) = special_index(matrix, beta)?.expect("special beta");
            let mut v = vec![0i64; n];
            v[0] = q as i64;
            v[n - 2] = m0 as i64;
            (Some(q), RationalVector::from_integers(&v))
        }
        Family::General => {
            let w = semigroup_contains(matrix.entries(), b)?
                .witness
                .expect("member has a witness");
            let v: Vec<i64> = w.iter().map(|&x| x as i64).collect();
            (None, RationalVector::from_integers(&v))
        }
    };
    // Every monomial x^e of the polynomial has 0 <= e_i <= beta / a_i.
    let bound: u64 = (0..n)
        .map(|i| exponent[i].to_i64().expect("integral").unsigned_abs() + b as u64 / matrix.a(i))
        .sum();
    let system = build_system(matrix, beta, default_degree_bound(matrix))?;
    let series = gamma_series(&exponent, &system, &TruncationFrontier::uniform(n, bound), DEFAULT_TERM_CAP)?;
    Ok(Some(PolynomialSolution { q, exponent, series }))
}
