//! Negative supports, the coefficients `Gamma[v; u]`, the exponent families
//! of plane, smooth and general curves, and truncated Γ-series.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{falling_factorial, Rational, RationalVector};
use crate::error::{check_dim, GkzError, Result};
use crate::lattice::{
    enumerate_offsets_in_box, kernel_basis, semigroup_contains, CurveMatrix, Family, LatticeVector,
};
use crate::series::{TruncatedSeries, TruncationFrontier};
use crate::system::HypergeometricSystem;

/// Where an exponent comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum ExponentLabel {
    PlaneSingular(u64),
    PlaneGeneric(u64),
    SmoothSingular(u64),
    GenericPoint(u64),
    Modified(u64),
    Custom,
}

impl fmt::Display for ExponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentLabel::PlaneSingular(k) => write!(f, "plane_singular({k})"),
            ExponentLabel::PlaneGeneric(j) => write!(f, "plane_generic({j})"),
            ExponentLabel::SmoothSingular(j) => write!(f, "smooth_singular({j})"),
            ExponentLabel::GenericPoint(j) => write!(f, "generic_point({j})"),
            ExponentLabel::Modified(q) => write!(f, "modified({q})"),
            ExponentLabel::Custom => write!(f, "custom"),
        }
    }
}

/// `v in Q^n` with `A v = beta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentVector {
    pub v: RationalVector,
    pub label: ExponentLabel,
}

impl ExponentVector {
    pub fn custom(v: RationalVector) -> Self {
        ExponentVector {
            v,
            label: ExponentLabel::Custom,
        }
    }
}

/// Result of a minimal-negative-support check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityCheck {
    pub minimal: bool,
    /// False when only lattice points inside `search_bound` were examined.
    pub exact: bool,
    pub search_bound: u64,
}

/// Indices whose entry is a negative integer.
pub fn nsupp(v: &[Rational]) -> BTreeSet<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| x.is_negative_integer())
        .map(|(i, _)| i)
        .collect()
}

fn nsupp_shifted(v: &[Rational], u: &[i64]) -> BTreeSet<usize> {
    v.iter()
        .zip(u)
        .enumerate()
        .filter(|(_, (x, &d))| (*x + Rational::from(d)).is_negative_integer())
        .map(|(i, _)| i)
        .collect()
}

/// Per-coordinate bounds on `u` keeping `nsupp(v + u) = nsupp(v)`
/// (or, with `allow_shrink`, keeping it inside `nsupp(v)`).
fn support_box(v: &[Rational], allow_shrink: bool) -> Vec<(Option<i64>, Option<i64>)> {
    v.iter()
        .map(|x| match x.to_i64() {
            Some(k) if k >= 0 => (Some(-k), None),
            Some(k) if !allow_shrink => (None, Some(-k - 1)),
            _ => (None, None),
        })
        .collect()
}

/// Whether no `u in L_A` makes `nsupp(v + u)` a proper subset of `nsupp(v)`.
///
/// Rank-one kernels (`n = 2`) are decided exactly: beyond the coordinate
/// spread of `v` the negative support along the kernel line is constant.
/// Larger kernels are searched within `sum |u_i| <= search_bound`.
pub fn has_minimal_nsupp(v: &RationalVector, matrix: &CurveMatrix, search_bound: u64) -> Result<MinimalityCheck> {
    check_dim(matrix.n(), v.dim())?;
    let ns = nsupp(v);
    if ns.is_empty() {
        return Ok(MinimalityCheck {
            minimal: true,
            exact: true,
            search_bound: 0,
        });
    }
    let proper_subset = |u: &[i64]| {
        let s = nsupp_shifted(v, u);
        s.len() < ns.len() && s.is_subset(&ns)
    };
    if matrix.n() == 2 {
        let k = kernel_basis(matrix)[0].as_slice().to_vec();
        let spread = v
            .iter()
            .zip(&k)
            .filter_map(|(x, &ki)| x.to_integer().map(|z| (z, ki)))
            .map(|(z, ki)| {
                let z = Rational::from(z).abs();
                (&z / &Rational::from(ki.abs())).ceil()
            })
            .max()
            .and_then(|m| i64::try_from(m).ok())
            .unwrap_or(0)
            + 1;
        let minimal = !(-spread..=spread).any(|m| proper_subset(&[m * k[0], m * k[1]]));
        return Ok(MinimalityCheck {
            minimal,
            exact: true,
            search_bound: spread as u64,
        });
    }
    let frontier = TruncationFrontier::uniform(matrix.n(), search_bound);
    let candidates = enumerate_offsets_in_box(matrix, &frontier, &support_box(v, true), usize::MAX)?;
    let minimal = !candidates.iter().any(|u| proper_subset(u.as_slice()));
    Ok(MinimalityCheck {
        minimal,
        exact: false,
        search_bound,
    })
}

/// `Gamma[v; u] = (v)_{u-} / (v + u)_{u+}` for `u in N_v`, else 0.
pub fn gamma_coefficient(v: &RationalVector, u: &LatticeVector) -> Result<Rational> {
    check_dim(v.dim(), u.as_slice().len())?;
    let shifted = v.shifted(u.as_slice())?;
    if nsupp(&shifted) != nsupp(v) {
        return Ok(Rational::zero());
    }
    let num = falling_factorial(v, &u.minus())?;
    let den = falling_factorial(&shifted, &u.plus())?;
    if den.is_zero() {
        return Err(GkzError::InvariantViolation(format!(
            "vanishing denominator in Gamma[{v}; {:?}]",
            u.as_slice()
        )));
    }
    Ok(num / den)
}

fn check_exponent(system: &HypergeometricSystem, v: &RationalVector) -> Result<()> {
    check_dim(system.n(), v.dim())?;
    let weight = v.weighted_sum(system.matrix.entries())?;
    if weight != system.beta {
        return Err(GkzError::invalid(format!(
            "A.v = {weight} differs from beta = {}",
            system.beta
        )));
    }
    Ok(())
}

/// `phi_v = x^v sum_{u in N_v} Gamma[v; u] x^u`, truncated at `frontier`.
pub fn gamma_series(
    v: &RationalVector,
    system: &HypergeometricSystem,
    frontier: &TruncationFrontier,
    term_cap: usize,
) -> Result<TruncatedSeries> {
    check_exponent(system, v)?;
    check_dim(system.n(), frontier.dim())?;
    let offsets = enumerate_offsets_in_box(&system.matrix, frontier, &support_box(v, false), term_cap)?;
    let mut terms = Vec::with_capacity(offsets.len());
    for u in offsets {
        let c = gamma_coefficient(v, &u)?;
        if !c.is_zero() {
            terms.push((u.into_inner(), c));
        }
    }
    TruncatedSeries::from_terms(v.clone(), frontier.clone(), terms)
}

fn div(a: &Rational, b: u64) -> Rational {
    a / &Rational::from(b)
}

/// Singular exponents along `x_n = 0`.
///
/// Plane `(a b)`: `v^k = ((beta - k b)/a, k)`, `k < a`. Smooth
/// `(1 a_2 ... a_n)`: `v^j = (j, 0, ..., (beta - j)/a_{n-1}, 0)`, `j < a_{n-1}`.
/// General matrices return the smooth exponents of the homogenized
/// `(1 a_1 ... a_n)`, whose series restrict to `x_0 = 0`.
pub fn singular_exponents(system: &HypergeometricSystem) -> Result<Vec<ExponentVector>> {
    let m = &system.matrix;
    let beta = &system.beta;
    match m.family() {
        Family::Plane => {
            let (a, b) = (m.a(0), m.a(1));
            Ok((0..a)
                .map(|k| ExponentVector {
                    v: RationalVector::new(vec![div(&(beta - Rational::from(k * b)), a), Rational::from(k)]),
                    label: ExponentLabel::PlaneSingular(k),
                })
                .collect())
        }
        Family::Smooth | Family::Homogenized { .. } => Ok(smooth_singular(m.entries(), beta)),
        Family::General => {
            let h = CurveMatrix::homogenized(m.entries())?;
            Ok(smooth_singular(h.entries(), beta))
        }
    }
}

fn smooth_singular(entries: &[u64], beta: &Rational) -> Vec<ExponentVector> {
    let n = entries.len();
    let special = entries[n - 2];
    (0..special)
        .map(|j| {
            let mut v = vec![Rational::zero(); n];
            v[0] = Rational::from(j);
            v[n - 2] = div(&(beta - Rational::from(j)), special);
            ExponentVector {
                v: RationalVector::new(v),
                label: ExponentLabel::SmoothSingular(j),
            }
        })
        .collect()
}

fn smooth_generic(entries: &[u64], beta: &Rational) -> Vec<ExponentVector> {
    let n = entries.len();
    let last = entries[n - 1];
    (0..last)
        .map(|j| {
            let mut v = vec![Rational::zero(); n];
            v[0] = Rational::from(j);
            v[n - 1] = div(&(beta - Rational::from(j)), last);
            ExponentVector {
                v: RationalVector::new(v),
                label: ExponentLabel::GenericPoint(j),
            }
        })
        .collect()
}

/// Exponents for points off the coordinate hyperplanes.
///
/// Plane: `v^j = (j, (beta - j a)/b)`, `j < b`. Smooth:
/// `w^j = (j, 0, ..., (beta - j)/a_n)`, `j < a_n`. General matrices return the
/// `w^j` of the homogenized matrix.
pub fn generic_exponents(system: &HypergeometricSystem) -> Result<Vec<ExponentVector>> {
    let m = &system.matrix;
    let beta = &system.beta;
    match m.family() {
        Family::Plane => {
            let (a, b) = (m.a(0), m.a(1));
            Ok((0..b)
                .map(|j| ExponentVector {
                    v: RationalVector::new(vec![Rational::from(j), div(&(beta - Rational::from(j * a)), b)]),
                    label: ExponentLabel::PlaneGeneric(j),
                })
                .collect())
        }
        Family::Smooth | Family::Homogenized { .. } => Ok(smooth_generic(m.entries(), beta)),
        Family::General => {
            let h = CurveMatrix::homogenized(m.entries())?;
            Ok(smooth_generic(h.entries(), beta))
        }
    }
}

/// The unique `q` for `beta in N A`, with `m_0 = (beta - q b)/a` (plane) or
/// `(beta - q)/a_{n-1}` (smooth). `None` off the semigroup.
pub fn special_index(matrix: &CurveMatrix, beta: &Rational) -> Result<Option<(u64, u64)>> {
    let Some(b) = beta.to_i64() else { return Ok(None) };
    if b < 0 {
        return Ok(None);
    }
    match matrix.family() {
        Family::Plane => {
            let (a, bb) = (matrix.a(0) as i64, matrix.a(1) as i64);
            if !semigroup_contains(&[a as u64, bb as u64], b)?.member {
                return Ok(None);
            }
            let q = (0..a).find(|&q| b - q * bb >= 0 && (b - q * bb) % a == 0);
            Ok(q.map(|q| (q as u64, ((b - q * bb) / a) as u64)))
        }
        Family::Smooth | Family::Homogenized { .. } => {
            let s = matrix.second_last() as i64;
            Ok(Some(((b % s) as u64, (b / s) as u64)))
        }
        Family::General => Ok(None),
    }
}

/// `tilde v^q`, present iff `beta in N A` (plane and smooth shapes).
///
/// Plane: `(m_0 - b m', q + a m')` with `m'` least such that `b m' >= m_0 + 1`.
/// Smooth: `(beta + a_{n-1}, 0, ..., -1, 0)`.
pub fn modified_exponent(system: &HypergeometricSystem) -> Result<Option<(u64, ExponentVector)>> {
    let m = &system.matrix;
    let Some((q, m0)) = special_index(m, &system.beta)? else { return Ok(None) };
    let v = match m.family() {
        Family::Plane => {
            let (a, b) = (m.a(0) as i64, m.a(1) as i64);
            let m0 = m0 as i64;
            let mp = (m0 + 1 + b - 1) / b;
            RationalVector::from_integers(&[m0 - b * mp, q as i64 + a * mp])
        }
        _ => {
            let n = m.n();
            let mut v = vec![0i64; n];
            v[0] = system.beta.to_i64().expect("integral beta") + m.second_last() as i64;
            v[n - 2] = -1;
            RationalVector::from_integers(&v)
        }
    };
    Ok(Some((
        q,
        ExponentVector {
            v,
            label: ExponentLabel::Modified(q),
        },
    )))
}

/// `phi_{tilde v^q}`: the Γ-series of the modified exponent.
pub fn modified_series(
    system: &HypergeometricSystem,
    frontier: &TruncationFrontier,
    term_cap: usize,
) -> Result<TruncatedSeries> {
    let (_, v) = modified_exponent(system)?
        .ok_or_else(|| GkzError::invalid(format!("beta = {} is not in N A", system.beta)))?;
    gamma_series(&v.v, system, frontier, term_cap)
}

/// Substitutes `x_0 = 0`: keeps the terms with `x_0`-exponent zero and drops
/// the first variable. The result is exact on the remaining weights with the
/// bound reduced by `w_0 |v_0|`.
pub fn restrict_series_x0(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let n = f.ambient_n();
    if n < 2 {
        return Err(GkzError::invalid("restriction needs at least two variables"));
    }
    let fr = f.frontier();
    let base0 = f.base()[0].to_i64();
    let bound = match base0 {
        Some(b0) => fr.bound.saturating_sub(fr.weight[0] * b0.unsigned_abs()),
        None => fr.bound,
    };
    let frontier = TruncationFrontier::new(fr.weight[1..].to_vec(), bound)?;
    let base = RationalVector::new(f.base()[1..].to_vec());
    let terms = f
        .terms()
        .filter(|(u, _)| base0 == Some(-u[0]))
        .map(|(u, c)| (u[1..].to_vec(), c.clone()));
    TruncatedSeries::from_terms(base, frontier, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DEFAULT_TERM_CAP;
    use crate::series::verify_annihilation;
    use crate::system::build_system;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn rv(s: &[&str]) -> RationalVector {
        RationalVector::parse(s).unwrap()
    }

    fn sys(a: &[u64], beta: &str) -> HypergeometricSystem {
        let m = CurveMatrix::new(a.to_vec()).unwrap();
        build_system(&m, &q(beta), 2 * m.last()).unwrap()
    }

    fn plain(es: &[ExponentVector]) -> Vec<RationalVector> {
        es.iter().map(|e| e.v.clone()).collect()
    }

    #[test]
    fn nsupp_examples() {
        assert!(nsupp(&rv(&["1", "2", "3"])).is_empty());
        assert_eq!(nsupp(&rv(&["7", "0", "-1", "0"])), BTreeSet::from([2]));
        assert!(nsupp(&rv(&["-3/2", "1"])).is_empty());
    }

    #[test]
    fn minimality_examples() {
        let a = CurveMatrix::new(vec![2, 3]).unwrap();
        assert!(has_minimal_nsupp(&rv(&["-1", "1"]), &a, 0).unwrap().minimal);
        assert!(has_minimal_nsupp(&rv(&["1", "0"]), &a, 0).unwrap().minimal);
        // (-2, 2) + (3, -2) = (1, 0) empties the negative support.
        let check = has_minimal_nsupp(&rv(&["-2", "2"]), &a, 0).unwrap();
        assert!(!check.minimal && check.exact);
        let s = CurveMatrix::new(vec![1, 2, 5]).unwrap();
        let check = has_minimal_nsupp(&rv(&["6", "-1", "0"]), &s, 20).unwrap();
        assert!(!check.minimal && !check.exact);
    }

    #[test]
    fn gamma_coefficient_examples() {
        let zero = LatticeVector::new(&CurveMatrix::new(vec![2, 3]).unwrap(), vec![0, 0]).unwrap();
        assert_eq!(gamma_coefficient(&rv(&["1/2", "0"]), &zero).unwrap(), q("1"));
        let a = CurveMatrix::new(vec![2, 3]).unwrap();
        let u = LatticeVector::new(&a, vec![-3, 2]).unwrap();
        assert_eq!(gamma_coefficient(&rv(&["1/2", "0"]), &u).unwrap(), q("3/16"));
        let u = LatticeVector::new(&a, vec![3, -2]).unwrap();
        assert_eq!(gamma_coefficient(&rv(&["0", "0"]), &u).unwrap(), q("0"));
    }

    #[test]
    fn plane_exponents() {
        assert_eq!(
            plain(&singular_exponents(&sys(&[2, 3], "1")).unwrap()),
            vec![rv(&["1/2", "0"]), rv(&["-1", "1"])]
        );
        assert_eq!(
            plain(&generic_exponents(&sys(&[2, 3], "0")).unwrap()),
            vec![rv(&["0", "0"]), rv(&["1", "-2/3"]), rv(&["2", "-4/3"])]
        );
    }

    #[test]
    fn smooth_exponents() {
        assert_eq!(
            plain(&singular_exponents(&sys(&[1, 2, 5], "0")).unwrap()),
            vec![rv(&["0", "0", "0"]), rv(&["1", "-1/2", "0"])]
        );
        let w = generic_exponents(&sys(&[1, 2, 5], "1")).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w[3].v, rv(&["3", "0", "-2/5"]));
        let g = singular_exponents(&sys(&[3, 4, 5], "0")).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g[1].v, rv(&["1", "0", "-1/4", "0"]));
    }

    #[test]
    fn modified_exponents() {
        assert!(modified_exponent(&sys(&[2, 3], "1")).unwrap().is_none());
        let (qq, v) = modified_exponent(&sys(&[2, 3], "2")).unwrap().unwrap();
        assert_eq!((qq, v.v), (0, rv(&["-2", "2"])));
        let (qq, v) = modified_exponent(&sys(&[1, 2, 5], "4")).unwrap().unwrap();
        assert_eq!((qq, v.v), (0, rv(&["6", "-1", "0"])));
        assert!(modified_exponent(&sys(&[1, 2, 5], "1/2")).unwrap().is_none());
    }

    #[test]
    fn plane_series_terms() {
        let s = sys(&[2, 3], "2");
        let f = gamma_series(&rv(&["1", "0"]), &s, &TruncationFrontier::uniform(2, 30), DEFAULT_TERM_CAP).unwrap();
        assert_eq!(f.len(), 1);
        let s = sys(&[2, 3], "1");
        let f = gamma_series(&rv(&["1/2", "0"]), &s, &TruncationFrontier::uniform(2, 5), DEFAULT_TERM_CAP).unwrap();
        assert_eq!(f.coefficient(&[0, 0]), q("1"));
        assert_eq!(f.coefficient(&[-3, 2]), q("3/16"));
        assert!(gamma_series(&rv(&["1", "1"]), &s, &TruncationFrontier::uniform(2, 5), 10).is_err());
    }

    #[test]
    fn singular_series_are_annihilated() {
        let s = sys(&[2, 3], "1");
        for e in singular_exponents(&s).unwrap() {
            let f = gamma_series(&e.v, &s, &TruncationFrontier::uniform(2, 40), DEFAULT_TERM_CAP).unwrap();
            for r in verify_annihilation(&s.operators(), &f).unwrap() {
                assert!(r.is_zero(), "{} leaves {r:?}", e.label);
            }
        }
    }

    #[test]
    fn modified_series_residuals() {
        let s = sys(&[2, 3], "2");
        let f = modified_series(&s, &TruncationFrontier::uniform(2, 40), DEFAULT_TERM_CAP).unwrap();
        assert_eq!(f.base(), &rv(&["-2", "2"]));
        assert_eq!(f.coefficient(&[0, 0]), q("1"));
        let r = verify_annihilation(&[s.euler.clone(), s.toric_gens[0].clone()], &f).unwrap();
        assert!(r[0].is_zero());
        assert!(!r[1].is_zero());
    }

    #[test]
    fn restriction_keeps_x0_free_terms() {
        let f = TruncatedSeries::from_terms(
            rv(&["1", "0", "0"]),
            TruncationFrontier::uniform(3, 6),
            [(vec![0, 1, 0], q("1")), (vec![-1, 1, 2], q("5"))],
        )
        .unwrap();
        let r = restrict_series_x0(&f).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coefficient(&[1, 2]), q("5"));
        assert_eq!(r.frontier().bound, 5);
        let g = TruncatedSeries::from_terms(
            rv(&["1", "0", "0"]),
            TruncationFrontier::uniform(3, 6),
            [(vec![0, 1, 0], q("1"))],
        )
        .unwrap();
        assert!(restrict_series_x0(&g).unwrap().is_empty());
    }
}
