//! Homogenization, b-functions, restriction decompositions and the
//! constructive `Ext^1` machinery: the recurrence solver at smooth points of
//! `Y` and the exceptional generator for smooth curves.

use serde::{Deserialize, Serialize};

use crate::arith::{falling_factorial_scalar, factorial, gcd_all, log_factorial, Rational, RationalVector};
use crate::error::{GkzError, Result};
use crate::gamma::{gamma_series, modified_exponent, special_index};
use crate::gevrey::Validity;
use crate::lattice::{minimal_delta, CurveMatrix, Family, DEFAULT_TERM_CAP};
use crate::series::{
    apply_operator, expand_at_translated_point, substitute_unit_translation, TruncatedSeries, TruncationFrontier,
    WeylOperator,
};
use crate::system::{build_system, default_degree_bound};

/// `A' = (1 a_1 ... a_n)` with the operators `Q_i = d0 d_i^{delta_i} - d^{rho_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homogenization {
    pub aprime: CurveMatrix,
    pub q_ops: Vec<WeylOperator>,
    pub deltas: Vec<u64>,
    /// `rho_i` indexed like `A` (entry `i` is 0).
    pub rhos: Vec<Vec<u64>>,
}

/// Homogenizes a coprime matrix with `a_1 > 1`.
pub fn homogenize(matrix: &CurveMatrix) -> Result<Homogenization> {
    let aprime = CurveMatrix::homogenized(matrix.entries())?;
    let n = aprime.n();
    let mut q_ops = Vec::new();
    let mut deltas = Vec::new();
    let mut rhos = Vec::new();
    for i in 0..matrix.n() {
        let (delta, rho) = minimal_delta(matrix, i)?;
        let mut plus = vec![0u64; n];
        plus[0] = 1;
        plus[i + 1] = delta;
        let mut minus = vec![0u64];
        minus.extend(&rho);
        let u: Vec<i64> = plus.iter().zip(&minus).map(|(&p, &m)| p as i64 - m as i64).collect();
        if aprime.dot(&u)? != 0 {
            return Err(GkzError::InvariantViolation(format!("Q_{} is not homogeneous", i + 1)));
        }
        q_ops.push(WeylOperator::binomial_from(plus, minus)?);
        deltas.push(delta);
        rhos.push(rho);
    }
    Ok(Homogenization {
        aprime,
        q_ops,
        deltas,
        rhos,
    })
}

/// A b-function given by its roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BFunction {
    /// Ascending.
    pub roots: Vec<Rational>,
    /// Coefficients of the monic polynomial, constant term first.
    pub as_polynomial: Vec<Rational>,
    pub validity: Validity,
}

impl BFunction {
    fn from_roots(mut roots: Vec<Rational>, validity: Validity) -> Self {
        roots.sort();
        let mut poly = vec![Rational::one()];
        for r in &roots {
            // poly * (tau - r)
            let mut next = vec![Rational::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= &(c * r);
            }
            poly = next;
        }
        BFunction {
            roots,
            as_polynomial: poly,
            validity,
        }
    }

    /// Largest integer root.
    pub fn max_integer_root(&self) -> Option<Rational> {
        self.roots.iter().filter(|r| r.is_integer()).max().cloned()
    }
}

/// `b(tau) = tau (tau - 1) ... (tau - (k - 1))` for `(1 ka kb)` and the weight
/// `(1, 0, 0)`, valid for generic `beta`.
pub fn b_function_1kakb(k: u64, a: u64, b: u64) -> Result<BFunction> {
    if !(1 <= a && a < b) || gcd_all(&[a, b]) != 1 || k * a <= 1 {
        return Err(GkzError::invalid(format!(
            "(k, a, b) = ({k}, {a}, {b}) needs 1 <= a < b, gcd(a, b) = 1 and ka > 1"
        )));
    }
    Ok(BFunction::from_roots(
        (0..k).map(Rational::from).collect(),
        Validity::GenericBeta,
    ))
}

/// Reads `(k, a, b)` off a matrix of shape `(1 ka kb)`.
pub fn split_1kakb(matrix: &CurveMatrix) -> Result<(u64, u64, u64)> {
    let e = matrix.entries();
    if e.len() != 3 || e[0] != 1 {
        return Err(GkzError::invalid(format!("{matrix} is not of the shape (1 ka kb)")));
    }
    let k = gcd_all(&e[1..]);
    Ok((k, e[1] / k, e[2] / k))
}

/// The b-function of `(1 ka kb)` with respect to `(1, 0, 0)`.
pub fn b_function(matrix: &CurveMatrix) -> Result<BFunction> {
    let (k, a, b) = split_1kakb(matrix)?;
    b_function_1kakb(k, a, b)
}

/// The coordinate subspace a system is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictionLocus {
    /// `x_1 = ... = x_{n-2} = 0` for `(1 a_2 ... a_n)`; `x_1 = 0` when `n = 3`.
    LeadingVariables,
    /// `x_0 = 0` for a homogenized `(1 a_1 ... a_n)`.
    HomogenizingVariable,
}

impl RestrictionLocus {
    /// `x_0 = 0` for homogenized matrices, the leading variables otherwise.
    pub fn default_for(matrix: &CurveMatrix) -> Self {
        match matrix.family() {
            Family::Homogenized { .. } => RestrictionLocus::HomogenizingVariable,
            _ => RestrictionLocus::LeadingVariables,
        }
    }
}

/// One summand `M_{matrix}(beta)` of a restriction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionComponent {
    /// Coprime form of the component matrix.
    pub matrix: CurveMatrix,
    pub beta: Rational,
    /// The same summand before dividing out `k`: `((a_{n-1} a_n), beta - i)`.
    pub unreduced: (Vec<u64>, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionDecomposition {
    pub components: Vec<RestrictionComponent>,
    pub validity: Validity,
}

/// Decomposes the restriction of `M_{A'}(beta)` to `locus`.
///
/// `(1 a_2 ... a_n)` at the leading variables gives `k = gcd(a_{n-1}, a_n)`
/// summands `M_{(a_{n-1} a_n)}(beta - i)`, reported in coprime form as
/// `M_{(a_{n-1}/k  a_n/k)}((beta - i)/k)`; `(1 ka kb)` is the case `n = 3`.
/// A homogenized matrix at `x_0 = 0` gives the single summand `M_A(beta)`.
pub fn restrict_decomposition(
    aprime: &CurveMatrix,
    beta: &Rational,
    locus: RestrictionLocus,
) -> Result<RestrictionDecomposition> {
    match locus {
        RestrictionLocus::HomogenizingVariable => {
            let original = aprime
                .original()
                .ok_or_else(|| GkzError::invalid(format!("{aprime} is not a homogenized matrix")))?;
            Ok(RestrictionDecomposition {
                components: vec![RestrictionComponent {
                    unreduced: (original.entries().to_vec(), beta.clone()),
                    matrix: original,
                    beta: beta.clone(),
                }],
                validity: Validity::GenericBeta,
            })
        }
        RestrictionLocus::LeadingVariables => {
            if !aprime.is_smooth_shaped() || aprime.n() < 3 {
                return Err(GkzError::invalid(format!(
                    "{aprime} is not of the shape (1 a_2 ... a_n) with n >= 3"
                )));
            }
            let (p, l) = (aprime.second_last(), aprime.last());
            let k = gcd_all(&[p, l]);
            let reduced = CurveMatrix::new(vec![p / k, l / k])?;
            let components = (0..k)
                .map(|i| {
                    let shifted = beta - Rational::from(i);
                    RestrictionComponent {
                        matrix: reduced.clone(),
                        beta: &shifted / &Rational::from(k),
                        unreduced: (vec![p, l], shifted),
                    }
                })
                .collect();
            Ok(RestrictionDecomposition {
                components,
                validity: Validity::GenericBeta,
            })
        }
    }
}

fn plane_parts(matrix: &CurveMatrix) -> Result<(u64, u64)> {
    if *matrix.family() != Family::Plane {
        return Err(GkzError::Unsupported(format!("{matrix} is not a plane curve matrix")));
    }
    Ok((matrix.a(0), matrix.a(1)))
}

/// `e_{k,m} = (beta - b k)/a - b m`, the `x_1`-exponent of `h_{k+am}`.
fn plane_exponent(a: u64, b: u64, beta: &Rational, k: u64, m: u64) -> Rational {
    (beta - Rational::from(b * k)) / Rational::from(a) - Rational::from(b * m)
}

/// Solves `P(h) = f`, `E_p(h) = 0` at `p = (epsilon, 0)` for `A = (a b)`:
///
/// `h = sum_k sum_m h_{k+am} (t_1 + epsilon)^{(beta - bk)/a - bm} x_2^{k+am}`,
/// `f = sum_k sum_m f_{k+am} (t_1 + epsilon)^{(beta - bk)/a - b(m+1)} x_2^{k+am}`,
///
/// via `h_{k+a(m+1)} = ((e_{k,m})_b h_{k+am} - f_{k+am}) / (k+a(m+1))_a`.
/// `f[k][m]` holds `f_{k+am}`; `initial[k]` the free values `h_k` (default 0).
/// Returns `h[k][m]` for `m = 0 ..= f[k].len()`.
pub fn ext1_recurrence_solve(
    matrix: &CurveMatrix,
    epsilon: &Rational,
    beta: &Rational,
    f: &[Vec<Rational>],
    initial: Option<&[Rational]>,
) -> Result<Vec<Vec<Rational>>> {
    let (a, b) = plane_parts(matrix)?;
    if epsilon.is_zero() {
        return Err(GkzError::invalid("the point (epsilon, 0) must lie off the origin"));
    }
    if f.len() != a as usize {
        return Err(GkzError::DimensionMismatch {
            expected: a as usize,
            actual: f.len(),
        });
    }
    if let Some(init) = initial {
        if init.len() != a as usize {
            return Err(GkzError::DimensionMismatch {
                expected: a as usize,
                actual: init.len(),
            });
        }
    }
    Ok((0..a)
        .map(|k| {
            let mut h = vec![initial.map_or_else(Rational::zero, |init| init[k as usize].clone())];
            for (m, fm) in f[k as usize].iter().enumerate() {
                let m = m as u64;
                let e = plane_exponent(a, b, beta, k, m);
                let num = falling_factorial_scalar(&e, b) * &h[m as usize] - fm;
                let den = falling_factorial_scalar(&Rational::from(k + a * (m + 1)), a);
                h.push(num / den);
            }
            h
        })
        .collect())
}

/// The component tables `c[k][m]` as one series in `(t_1, x_2)` around
/// `x_1 = epsilon`, with base `(0, 0)` and exact inside `uniform(2, bound)`.
/// `shift` lowers every `x_1`-exponent by `b * shift`.
fn translated_series(
    a: u64,
    b: u64,
    beta: &Rational,
    epsilon: &Rational,
    c: &[Vec<Rational>],
    shift: u64,
    bound: u64,
) -> Result<TruncatedSeries> {
    let out = TruncationFrontier::uniform(2, bound);
    let mut total = TruncatedSeries::zero(RationalVector::from_integers(&[0, 0]), out.clone())?;
    for (k, ck) in c.iter().enumerate() {
        let k = k as u64;
        let needed = bound.saturating_sub(k) / a;
        if ck.len() as u64 <= needed {
            return Err(GkzError::InsufficientData(format!(
                "{} coefficients for residue {k}, frontier {bound} needs {}",
                ck.len(),
                needed + 1
            )));
        }
        let base = RationalVector::new(vec![plane_exponent(a, b, beta, k, shift), Rational::from(k)]);
        let span = (a + b) * (ck.len() as u64);
        let x_series = TruncatedSeries::from_terms(
            base,
            TruncationFrontier::uniform(2, span),
            ck.iter()
                .enumerate()
                .map(|(m, v)| (vec![-((b * m as u64) as i64), (a * m as u64) as i64], v.clone())),
        )?;
        let mut wide = out.clone();
        wide.bound += k;
        let t_series = expand_at_translated_point(&x_series, 0, epsilon, &wide)?;
        total = total.add(&t_series.rebased(RationalVector::from_integers(&[0, 0]))?)?;
    }
    Ok(total)
}

/// Residual counts of `P(h) - f` and `E_p(h)` around `(epsilon, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ext1Verification {
    pub p_residual_terms: usize,
    pub ep_residual_terms: usize,
    /// Frontier on which both residuals are exact.
    pub frontier: TruncationFrontier,
}

impl Ext1Verification {
    pub fn holds(&self) -> bool {
        self.p_residual_terms == 0 && self.ep_residual_terms == 0
    }
}

/// Checks `P(h) = f` and `E_p(h) = 0` as power series in `(t_1, x_2)` up to
/// total degree `bound`, with `E_p` the Euler operator rewritten at
/// `x_1 = t_1 + epsilon`.
pub fn ext1_verify(
    matrix: &CurveMatrix,
    epsilon: &Rational,
    beta: &Rational,
    f: &[Vec<Rational>],
    h: &[Vec<Rational>],
    bound: u64,
) -> Result<Ext1Verification> {
    let (a, b) = plane_parts(matrix)?;
    let hs = translated_series(a, b, beta, epsilon, h, 0, bound)?;
    let fs = translated_series(a, b, beta, epsilon, f, 1, bound)?;
    let p = WeylOperator::binomial_from(vec![b, 0], vec![0, a])?;
    let ep = substitute_unit_translation(&WeylOperator::euler(matrix.entries(), beta), 0, epsilon)?;
    let ph = apply_operator(&p, &hs)?;
    let p_residual = ph.sub(&fs)?;
    let ep_residual = apply_operator(&ep, &hs)?.restricted_to(p_residual.frontier())?;
    Ok(Ext1Verification {
        p_residual_terms: p_residual.len(),
        ep_residual_terms: ep_residual.len(),
        frontier: p_residual.frontier().clone(),
    })
}

/// `f_{k+am} = (e_{k,m})_b g_{k+am} - (k+a(m+1))_a g_{k+a(m+1)}`, i.e. the
/// right-hand side `P(g)` for a given `g` table (one fewer entry per residue).
pub fn ext1_rhs_from(matrix: &CurveMatrix, beta: &Rational, g: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let (a, b) = plane_parts(matrix)?;
    Ok(g.iter()
        .enumerate()
        .map(|(k, gk)| {
            let k = k as u64;
            (0..gk.len().saturating_sub(1))
                .map(|m| {
                    let mm = m as u64;
                    falling_factorial_scalar(&plane_exponent(a, b, beta, k, mm), b) * &gk[m]
                        - falling_factorial_scalar(&Rational::from(k + a * (mm + 1)), a) * &gk[m + 1]
                })
                .collect()
        })
        .collect())
}

/// Constants certifying `|h_{k+am}| / (k+am)!^{s-1} <= C D^m`, built as in
/// the induction: `C_1` bounds `|(e_{k,m})_b| / ((k+a(m+1))_a)^s`,
/// `D = max(D~, C_1 + 1)`, `C = max(C~, |h_k| / k!^{s-1})`, where
/// `|f_{k+am}| / (k+am)!^{s-1} <= C~ D~^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyBound {
    pub s: Rational,
    pub ln_c: f64,
    pub ln_d: f64,
    pub c1: f64,
    pub ln_c_tilde: f64,
    pub ln_d_tilde: f64,
    /// Whether every computed `h` term satisfies the bound.
    pub holds: bool,
    /// `max (ln|h^| - ln C - m ln D)`; nonpositive when the bound holds.
    pub worst_margin: f64,
    pub terms_checked: usize,
}

fn scaled_ln(c: &Rational, degree: u64, sm1: f64) -> f64 {
    if c.is_zero() {
        f64::NEG_INFINITY
    } else {
        c.ln_abs() - sm1 * log_factorial(degree)
    }
}

/// Fits the constants of [`GevreyBound`] and checks every term of `h`.
pub fn ext1_gevrey_bound(
    matrix: &CurveMatrix,
    beta: &Rational,
    s: &Rational,
    f: &[Vec<Rational>],
    h: &[Vec<Rational>],
) -> Result<GevreyBound> {
    let (a, b) = plane_parts(matrix)?;
    let sm1 = (s - Rational::one()).to_f64();
    let sf = s.to_f64();
    // C~, D~ from the row maxima L_m = max_k ln(|f_{k+am}| / (k+am)!^{s-1}).
    let rows = f.iter().map(Vec::len).max().unwrap_or(0);
    let lm: Vec<f64> = (0..rows)
        .map(|m| {
            f.iter()
                .enumerate()
                .filter_map(|(k, fk)| fk.get(m).map(|c| scaled_ln(c, k as u64 + a * m as u64, sm1)))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let finite_max = lm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let l0 = if lm.first().is_some_and(|x| x.is_finite()) { lm[0] } else { finite_max };
    let ln_d_tilde = lm
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| l.is_finite())
        .map(|(m, l)| (l - l0) / m as f64)
        .fold(0.0f64, f64::max);
    let ln_c_tilde = lm
        .iter()
        .enumerate()
        .map(|(m, l)| l - m as f64 * ln_d_tilde)
        .fold(f64::NEG_INFINITY, f64::max);
    // C_1 over the computed range, never below the limit (b/a)^b.
    let mut c1 = (b as f64 / a as f64).powi(b as i32);
    for (k, fk) in f.iter().enumerate() {
        for m in 0..fk.len() as u64 {
            let e = plane_exponent(a, b, beta, k as u64, m);
            let num = falling_factorial_scalar(&e, b).ln_abs();
            let den = falling_factorial_scalar(&Rational::from(k as u64 + a * (m + 1)), a).ln_abs();
            c1 = c1.max((num - sf * den).exp());
        }
    }
    let ln_d = ln_d_tilde.max((c1 + 1.0).ln());
    let ln_h0 = h
        .iter()
        .enumerate()
        .filter_map(|(k, hk)| hk.first().map(|c| scaled_ln(c, k as u64, sm1)))
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_c = ln_c_tilde.max(ln_h0);
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for (k, hk) in h.iter().enumerate() {
        for (m, c) in hk.iter().enumerate() {
            let l = scaled_ln(c, k as u64 + a * m as u64, sm1);
            worst = worst.max(l - ln_c - m as f64 * ln_d);
            checked += 1;
        }
    }
    let tolerance = 1e-9 * ln_c.abs().max(1.0);
    Ok(GevreyBound {
        s: s.clone(),
        ln_c,
        ln_d,
        c1,
        ln_c_tilde,
        ln_d_tilde,
        holds: worst <= tolerance,
        worst_margin: worst,
        terms_checked: checked,
    })
}

fn smooth_special(matrix: &CurveMatrix, beta: &Rational) -> Result<(u64, u64)> {
    if !matches!(matrix.family(), Family::Smooth) {
        return Err(GkzError::Unsupported(format!("{matrix} is not a smooth curve matrix")));
    }
    if !beta.is_natural() {
        return Err(GkzError::invalid(format!("beta = {beta} must be a natural number")));
    }
    Ok(special_index(matrix, beta)?.expect("natural beta is special for smooth curves"))
}

/// Multi-indices `m` (indexed like `A`, zero at positions 0 and n-2) with
/// `sum_{i != 1, n-1} a_i m_i <= limit`, lexicographic.
fn bounded_indices(matrix: &CurveMatrix, limit: u64) -> Vec<Vec<u64>> {
    let n = matrix.n();
    let free: Vec<usize> = (1..n).filter(|&i| i != n - 2).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fn walk(matrix: &CurveMatrix, free: &[usize], pos: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if pos == free.len() {
            out.push(cur.clone());
            return;
        }
        let i = free[pos];
        let mut x = 0;
        while x * matrix.a(i) <= left {
            cur[i] = x;
            walk(matrix, free, pos + 1, left - x * matrix.a(i), cur, out);
            x += 1;
        }
        cur[i] = 0;
    }
    walk(matrix, &free, 0, limit, &mut cur, &mut out);
    out
}

fn finite_series(n: usize, terms: Vec<(Vec<i64>, Rational)>) -> Result<TruncatedSeries> {
    let mut base = vec![0i64; n];
    base[n - 2] = -1;
    let bound = terms
        .iter()
        .map(|(u, _)| u.iter().map(|x| x.unsigned_abs()).sum::<u64>())
        .max()
        .unwrap_or(0);
    TruncatedSeries::from_terms(RationalVector::from_integers(&base), TruncationFrontier::uniform(n, bound), terms)
}

/// The `x_{n-1}^{-1}` part of `phi_{tilde v^q}`:
/// `sum_{m in M~(q)} (beta + a_{n-1})! x_1^{e_1} x^m x_{n-1}^{-1} / (m! e_1!)`,
/// `e_1 = beta + a_{n-1} - sum a_i m_i >= 0`. Exact and finite; base
/// `(0, ..., -1, 0)`.
pub fn ext1_generator_slice(matrix: &CurveMatrix, beta: &Rational) -> Result<TruncatedSeries> {
    smooth_special(matrix, beta)?;
    let n = matrix.n();
    let top = beta.to_i64().expect("natural") as u64 + matrix.second_last();
    let numer = Rational::from(factorial(top));
    let terms = bounded_indices(matrix, top)
        .into_iter()
        .map(|m| {
            let used: u64 = m.iter().zip(matrix.entries()).map(|(x, a)| x * a).sum();
            let e1 = top - used;
            let mut den = factorial(e1);
            for &x in &m {
                den *= factorial(x);
            }
            let mut u: Vec<i64> = m.iter().map(|&x| x as i64).collect();
            u[0] = e1 as i64;
            (u, &numer / &Rational::from(den))
        })
        .collect();
    finite_series(n, terms)
}

/// `P_{n-1}(phi_{tilde v^q})` with `P_{n-1} = d_1^{a_{n-1}} - d_{n-1}`: the
/// slice of [`ext1_generator_slice`] differentiated `a_{n-1}` times in `x_1`,
/// `sum (beta + a_{n-1})! x_1^{e_1 - a_{n-1}} x^m x_{n-1}^{-1} / (m! (e_1 - a_{n-1})!)`
/// over `e_1 >= a_{n-1}`. The other generators and `E` annihilate
/// `phi_{tilde v^q}`.
pub fn ext1_generator(matrix: &CurveMatrix, beta: &Rational) -> Result<TruncatedSeries> {
    smooth_special(matrix, beta)?;
    let n = matrix.n();
    let p = matrix.second_last();
    let top = beta.to_i64().expect("natural") as u64 + p;
    let numer = Rational::from(factorial(top));
    let terms = bounded_indices(matrix, top - p)
        .into_iter()
        .map(|m| {
            let used: u64 = m.iter().zip(matrix.entries()).map(|(x, a)| x * a).sum();
            let e = top - p - used;
            let mut den = factorial(e);
            for &x in &m {
                den *= factorial(x);
            }
            let mut u: Vec<i64> = m.iter().map(|&x| x as i64).collect();
            u[0] = e as i64;
            (u, &numer / &Rational::from(den))
        })
        .collect();
    finite_series(n, terms)
}

/// Applies every generator of `H_A(beta)` to `phi_{tilde v^q}` built inside
/// `frontier`, returning the residuals in generator order (`P_2 .. P_n`, `E`).
pub fn modified_residuals(matrix: &CurveMatrix, beta: &Rational, bound: u64) -> Result<Vec<TruncatedSeries>> {
    smooth_special(matrix, beta)?;
    let system = build_system(matrix, beta, default_degree_bound(matrix))?;
    let (_, v) = modified_exponent(&system)?.expect("natural beta has a modified exponent");
    let phi = gamma_series(&v.v, &system, &TruncationFrontier::uniform(matrix.n(), bound), DEFAULT_TERM_CAP)?;
    system.operators().iter().map(|op| apply_operator(op, &phi)).collect()
}
