//! Generators of the hypergeometric ideal `H_A(beta) = I_A + <E(beta)>`.

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{GkzError, Result};
use crate::lattice::{enumerate_offsets, minimal_delta, CurveMatrix, Family, LatticeVector, DEFAULT_TERM_CAP};
use crate::series::{TruncationFrontier, WeylOperator};

/// The generating operators of `H_A(beta)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergeometricSystem {
    pub matrix: CurveMatrix,
    pub beta: Rational,
    /// `sum_j a_j x_j d_j - beta`.
    pub euler: WeylOperator,
    /// Binomials `d^{u+} - d^{u-}` with `A u = 0`.
    pub toric_gens: Vec<WeylOperator>,
    /// Family-specific extras, such as the `Q_i` of a homogenized matrix.
    pub extra_gens: Vec<WeylOperator>,
    pub gen_degree_bound: u64,
}

impl HypergeometricSystem {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Toric generators, extras, then the Euler operator.
    pub fn operators(&self) -> Vec<WeylOperator> {
        self.toric_gens
            .iter()
            .chain(&self.extra_gens)
            .chain(std::iter::once(&self.euler))
            .cloned()
            .collect()
    }
}

/// `2 max(A)`.
pub fn default_degree_bound(matrix: &CurveMatrix) -> u64 {
    2 * matrix.last()
}

/// Assembles the generators for the family of `matrix`:
/// plane `d1^b - d2^a`; smooth `d1^{a_i} - d_i`; general all lattice
/// binomials with both parts of degree at most `degree_bound`; homogenized
/// the smooth generators plus `Q_i = d0 d_i^{delta_i} - d^{rho_i}`.
pub fn build_system(matrix: &CurveMatrix, beta: &Rational, degree_bound: u64) -> Result<HypergeometricSystem> {
    if degree_bound < matrix.last() {
        return Err(GkzError::invalid(format!(
            "degree bound {degree_bound} is below max(A) = {}",
            matrix.last()
        )));
    }
    let n = matrix.n();
    let euler = WeylOperator::euler(matrix.entries(), beta);
    let mut extra_gens = Vec::new();
    let toric_gens = match matrix.family() {
        Family::Plane => {
            vec![WeylOperator::binomial_from(vec![matrix.a(1), 0], vec![0, matrix.a(0)])?]
        }
        Family::Smooth | Family::Homogenized { .. } => {
            if let Family::Homogenized { original } = matrix.family() {
                let orig = CurveMatrix::new(original.clone())?;
                for i in 0..orig.n() {
                    let (delta, rho) = minimal_delta(&orig, i)?;
                    let mut plus = vec![0u64; n];
                    plus[0] = 1;
                    plus[i + 1] = delta;
                    let mut minus = vec![0u64; 1];
                    minus.extend(rho);
                    assert_lattice_relation(matrix, &plus, &minus)?;
                    extra_gens.push(WeylOperator::binomial_from(plus, minus)?);
                }
            }
            (1..n)
                .map(|i| {
                    let mut plus = vec![0u64; n];
                    plus[0] = matrix.a(i);
                    let mut minus = vec![0u64; n];
                    minus[i] = 1;
                    WeylOperator::binomial_from(plus, minus)
                })
                .collect::<Result<_>>()?
        }
        Family::General => general_binomials(matrix, degree_bound)?
            .iter()
            .map(WeylOperator::binomial)
            .collect(),
    };
    Ok(HypergeometricSystem {
        matrix: matrix.clone(),
        beta: beta.clone(),
        euler,
        toric_gens,
        extra_gens,
        gen_degree_bound: degree_bound,
    })
}

fn assert_lattice_relation(matrix: &CurveMatrix, plus: &[u64], minus: &[u64]) -> Result<()> {
    let u: Vec<i64> = plus.iter().zip(minus).map(|(&p, &m)| p as i64 - m as i64).collect();
    if matrix.dot(&u)? != 0 {
        return Err(GkzError::InvariantViolation(format!("{u:?} is not in ker {matrix}")));
    }
    Ok(())
}

/// Nonzero `u in L_A`, one per `+-u` pair (first nonzero entry positive), with
/// `deg u+` and `deg u-` at most `degree_bound`; sorted by total degree.
fn general_binomials(matrix: &CurveMatrix, degree_bound: u64) -> Result<Vec<LatticeVector>> {
    let frontier = TruncationFrontier::uniform(matrix.n(), 2 * degree_bound);
    let mut out: Vec<LatticeVector> = enumerate_offsets(matrix, &frontier, DEFAULT_TERM_CAP)?
        .into_iter()
        .filter(|u| {
            let first_positive = u.as_slice().iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
            first_positive
                && u.plus().iter().sum::<u64>() <= degree_bound
                && u.minus().iter().sum::<u64>() <= degree_bound
        })
        .collect();
    out.sort_by_key(|u| (u.plus().iter().sum::<u64>() + u.minus().iter().sum::<u64>(), u.clone()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::WeylTerm;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn binom(plus: Vec<u64>, minus: Vec<u64>) -> WeylOperator {
        WeylOperator::binomial_from(plus, minus).unwrap()
    }

    #[test]
    fn plane_generators() {
        let a = CurveMatrix::new(vec![2, 3]).unwrap();
        let sys = build_system(&a, &q("1"), 6).unwrap();
        assert_eq!(sys.toric_gens, vec![binom(vec![3, 0], vec![0, 2])]);
        assert_eq!(sys.euler, WeylOperator::euler(&[2, 3], &q("1")));
        assert!(sys.extra_gens.is_empty());
        assert_eq!(sys.operators().len(), 2);
        assert!(build_system(&a, &q("1"), 2).is_err());
    }

    #[test]
    fn smooth_generators() {
        let a = CurveMatrix::new(vec![1, 2, 5]).unwrap();
        let sys = build_system(&a, &q("0"), 10).unwrap();
        assert_eq!(
            sys.toric_gens,
            vec![binom(vec![2, 0, 0], vec![0, 1, 0]), binom(vec![5, 0, 0], vec![0, 0, 1])]
        );
        let e = WeylOperator::new(
            3,
            (0..3).map(|i| {
                let mut v = vec![0; 3];
                v[i] = 1;
                WeylTerm {
                    coeff: Rational::from([1i64, 2, 5][i]),
                    x: v.clone(),
                    d: v,
                }
            }),
        )
        .unwrap();
        assert_eq!(sys.euler, e);
    }

    #[test]
    fn homogenized_generators() {
        let h = CurveMatrix::homogenized(&[3, 4, 5]).unwrap();
        let sys = build_system(&h, &q("0"), 10).unwrap();
        assert!(sys.toric_gens.contains(&binom(vec![3, 0, 0, 0], vec![0, 1, 0, 0])));
        assert!(sys.extra_gens.contains(&binom(vec![1, 1, 0, 0], vec![0, 0, 1, 0])));
        assert_eq!(sys.extra_gens.len(), 3);
    }

    #[test]
    fn general_generators_lie_in_lattice() {
        let a = CurveMatrix::new(vec![3, 4, 5]).unwrap();
        let sys = build_system(&a, &q("0"), default_degree_bound(&a)).unwrap();
        assert!(!sys.toric_gens.is_empty());
        // d1 d3 - d2^2 is the smallest relation of (3 4 5).
        assert!(sys.toric_gens.contains(&binom(vec![1, 0, 1], vec![0, 2, 0])));
        for g in &sys.toric_gens {
            assert_eq!(g.terms().len(), 2);
            let u: Vec<i64> = (0..3)
                .map(|i| g.terms().iter().map(|t| t.coeff.to_i64().unwrap() * t.d[i] as i64).sum())
                .collect();
            assert_eq!(a.dot(&u).unwrap(), 0);
        }
    }
}
