//! Integer-lattice and numerical-semigroup computations for row matrices
//! `A = (a_1 ... a_n)`: the matrix families, kernel bases, bounded lattice
//! enumeration, semigroup membership and the index sets used when
//! restricting homogenized systems.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::gcd_all;
use crate::error::{check_dim, GkzError, Result};
use crate::series::TruncationFrontier;

/// Largest semigroup target the membership table will allocate for.
pub const SEMIGROUP_TARGET_CAP: i64 = 1_000_000;

/// Default cap on the number of lattice points a single enumeration may visit.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// The family a curve matrix belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Family {
    /// `(a b)` with `0 < a < b`, `gcd(a, b) = 1`.
    Plane,
    /// `(1 a_2 ... a_n)` with `1 < a_2 < ... < a_n`, `n >= 3`.
    Smooth,
    /// `(a_1 ... a_n)` with `1 < a_1 < ... < a_n`, `n >= 3`, coprime entries.
    General,
    /// `(1 a_1 ... a_n)` built from the general (or plane) matrix `original`.
    Homogenized { original: Vec<u64> },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Plane => write!(f, "plane"),
            Family::Smooth => write!(f, "smooth"),
            Family::General => write!(f, "general"),
            Family::Homogenized { original } => write!(f, "homogenized({original:?})"),
        }
    }
}

/// The `1 x n` integer matrix `A` of a monomial curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveMatrix {
    entries: Vec<u64>,
    family: Family,
    gcd: u64,
}

fn strictly_increasing(v: &[u64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl CurveMatrix {
    /// Classifies `entries`: two entries give the plane family, a leading `1`
    /// the smooth family, anything else the general family.
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        let n = entries.len();
        if n < 2 {
            return Err(GkzError::invalid("a curve matrix needs at least two entries"));
        }
        if entries.contains(&0) {
            return Err(GkzError::invalid("matrix entries must be positive"));
        }
        if !strictly_increasing(&entries) {
            return Err(GkzError::invalid(format!(
                "matrix entries must be strictly increasing: {entries:?}"
            )));
        }
        let gcd = gcd_all(&entries);
        let family = if n == 2 {
            if gcd != 1 {
                return Err(GkzError::invalid(format!(
                    "plane matrix ({} {}) must have coprime entries",
                    entries[0], entries[1]
                )));
            }
            Family::Plane
        } else if entries[0] == 1 {
            Family::Smooth
        } else {
            if gcd != 1 {
                return Err(GkzError::invalid(format!(
                    "general matrix {entries:?} must have gcd 1"
                )));
            }
            Family::General
        };
        Ok(CurveMatrix { entries, family, gcd })
    }

    /// `A' = (1 a_1 ... a_n)` for a coprime `A` with `a_1 > 1`.
    pub fn homogenized(original: &[u64]) -> Result<Self> {
        let base = CurveMatrix::new(original.to_vec())?;
        if base.entries[0] == 1 {
            return Err(GkzError::invalid("homogenization needs a_1 > 1"));
        }
        if base.gcd != 1 {
            return Err(GkzError::invalid("homogenization needs gcd(A) = 1"));
        }
        let mut entries = Vec::with_capacity(original.len() + 1);
        entries.push(1);
        entries.extend_from_slice(original);
        Ok(CurveMatrix {
            entries,
            family: Family::Homogenized {
                original: original.to_vec(),
            },
            gcd: 1,
        })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn gcd(&self) -> u64 {
        self.gcd
    }

    /// Entry at 0-based position `i`.
    pub fn a(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn last(&self) -> u64 {
        self.entries[self.n() - 1]
    }

    pub fn second_last(&self) -> u64 {
        self.entries[self.n() - 2]
    }

    /// Smooth and homogenized matrices share the `(1 a_2 ... a_n)` shape.
    pub fn is_smooth_shaped(&self) -> bool {
        matches!(self.family, Family::Smooth | Family::Homogenized { .. })
    }

    /// `A . u` for an integer vector.
    pub fn dot(&self, u: &[i64]) -> Result<i128> {
        check_dim(self.n(), u.len())?;
        Ok(self
            .entries
            .iter()
            .zip(u)
            .map(|(&a, &x)| a as i128 * x as i128)
            .sum())
    }

    /// The matrix with the leading `1` removed, for homogenized matrices.
    pub fn original(&self) -> Option<CurveMatrix> {
        match &self.family {
            Family::Homogenized { original } => CurveMatrix::new(original.clone()).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for CurveMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// An element `u` of `L_A = ker_Z(A)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    /// Checks `A . u = 0`.
    pub fn new(matrix: &CurveMatrix, u: Vec<i64>) -> Result<Self> {
        if matrix.dot(&u)? != 0 {
            return Err(GkzError::invalid(format!("{u:?} is not in ker {matrix}")));
        }
        Ok(LatticeVector(u))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    /// Positive part `u_+`.
    pub fn plus(&self) -> Vec<u64> {
        self.0.iter().map(|&x| x.max(0) as u64).collect()
    }

    /// Negative part `u_-`, so that `u = u_+ - u_-`.
    pub fn minus(&self) -> Vec<u64> {
        self.0.iter().map(|&x| (-x).max(0) as u64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// Outcome of a semigroup membership query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupCertificate {
    pub target: i64,
    pub generators: Vec<u64>,
    pub member: bool,
    /// Lexicographically smallest natural coefficients, when `member`.
    pub witness: Option<Vec<u64>>,
}

/// A `Z`-basis of `ker_Z(A)` (`n - 1` vectors).
///
/// Plane matrices give `(b, -a)`. Smooth-shaped matrices give the rows
/// `-a_i e_1 + e_i` for `i != n-1` and `a_{n-1} e_1 - e_{n-1}`, in order
/// `i = 2..n`. Other matrices give a Hermite normal form basis, every vector
/// with its first nonzero entry positive.
pub fn kernel_basis(matrix: &CurveMatrix) -> Vec<LatticeVector> {
    let n = matrix.n();
    match matrix.family() {
        Family::Plane => vec![LatticeVector(vec![matrix.a(1) as i64, -(matrix.a(0) as i64)])],
        Family::Smooth | Family::Homogenized { .. } => (1..n)
            .map(|i| {
                let mut u = vec![0i64; n];
                if i == n - 2 {
                    u[0] = matrix.a(i) as i64;
                    u[i] = -1;
                } else {
                    u[0] = -(matrix.a(i) as i64);
                    u[i] = 1;
                }
                LatticeVector(u)
            })
            .collect(),
        Family::General => hnf_kernel(matrix.entries()),
    }
}

fn hnf_kernel(row: &[u64]) -> Vec<LatticeVector> {
    let n = row.len();
    // Column-reduce the row with a unimodular U; the columns that end up
    // paired with a zero entry span the kernel.
    let mut r: Vec<i128> = row.iter().map(|&a| a as i128).collect();
    let mut cols: Vec<Vec<i128>> = (0..n)
        .map(|j| (0..n).map(|i| i128::from(i == j)).collect())
        .collect();
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&j| r[j] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let p = *nonzero.iter().min_by_key(|&&j| r[j].abs()).unwrap();
        for &j in &nonzero {
            if j == p {
                continue;
            }
            let q = r[j].div_euclid(r[p]);
            r[j] -= q * r[p];
            for i in 0..n {
                let delta = q * cols[p][i];
                cols[j][i] -= delta;
            }
        }
    }
    let mut basis: Vec<Vec<i128>> = (0..n).filter(|&j| r[j] == 0).map(|j| cols[j].clone()).collect();
    hermite_normal_form(&mut basis);
    basis
        .into_iter()
        .map(|v| LatticeVector(v.into_iter().map(|x| x as i64).collect()))
        .collect()
}

/// Row-style Hermite normal form in place: positive pivots, entries above
/// each pivot reduced into `[0, pivot)`.
fn hermite_normal_form(rows: &mut [Vec<i128>]) {
    let m = rows.len();
    if m == 0 {
        return;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == m {
            break;
        }
        // Euclid down the column until only the pivot row is nonzero.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..m {
                if rows[i][col] != 0
                    && best.is_none_or(|b| rows[i][col].abs() < rows[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..m {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[pivot_row][col]);
                    for c in 0..ncols {
                        let delta = q * rows[pivot_row][c];
                        rows[i][c] -= delta;
                    }
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col] == 0 {
            continue;
        }
        if rows[pivot_row][col] < 0 {
            for c in 0..ncols {
                rows[pivot_row][c] = -rows[pivot_row][c];
            }
        }
        let p = rows[pivot_row][col];
        for i in 0..pivot_row {
            let q = rows[i][col].div_euclid(p);
            if q != 0 {
                for c in 0..ncols {
                    let delta = q * rows[pivot_row][c];
                    rows[i][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
}

/// Decides `target in N g_1 + ... + N g_k` by dynamic programming, with a
/// lexicographically smallest witness.
pub fn semigroup_contains(generators: &[u64], target: i64) -> Result<SemigroupCertificate> {
    if generators.is_empty() || generators.contains(&0) {
        return Err(GkzError::invalid("semigroup generators must be positive"));
    }
    let cert = |member: bool, witness: Option<Vec<u64>>| SemigroupCertificate {
        target,
        generators: generators.to_vec(),
        member,
        witness,
    };
    if target < 0 {
        return Ok(cert(false, None));
    }
    if target > SEMIGROUP_TARGET_CAP {
        return Err(GkzError::ResourceLimit {
            what: "semigroup target",
            count: target as usize,
            cap: SEMIGROUP_TARGET_CAP as usize,
        });
    }
    let t = target as usize;
    let k = generators.len();
    // reach[j][s]: s is reachable using generators j..k only.
    let mut reach = vec![vec![false; t + 1]; k + 1];
    reach[k][0] = true;
    for j in (0..k).rev() {
        let g = generators[j] as usize;
        let (head, tail) = reach.split_at_mut(j + 1);
        let (cur, next) = (&mut head[j], &tail[0]);
        for s in 0..=t {
            cur[s] = next[s] || (s >= g && cur[s - g]);
        }
    }
    if !reach[0][t] {
        return Ok(cert(false, None));
    }
    let mut rem = t;
    let mut witness = Vec::with_capacity(k);
    for j in 0..k {
        let g = generators[j] as usize;
        let mut c = 0usize;
        while !reach[j + 1][rem - c * g] {
            c += 1;
        }
        witness.push(c as u64);
        rem -= c * g;
    }
    debug_assert_eq!(rem, 0);
    Ok(cert(true, Some(witness)))
}

/// Smallest `delta` with `1 + delta a_i` in the semigroup of the other
/// entries, and the lexicographically smallest `rho` (indexed like `A`,
/// `rho[i] = 0`) with `1 + delta a_i = sum_{j != i} rho_j a_j`.
pub fn minimal_delta(matrix: &CurveMatrix, i: usize) -> Result<(u64, Vec<u64>)> {
    if i >= matrix.n() {
        return Err(GkzError::invalid(format!("index {i} out of range for {matrix}")));
    }
    if matrix.gcd() != 1 {
        return Err(GkzError::invalid(format!("{matrix} is not coprime")));
    }
    let others: Vec<u64> = (0..matrix.n()).filter(|&j| j != i).map(|j| matrix.a(j)).collect();
    let ai = matrix.a(i) as i64;
    let mut delta = 0i64;
    loop {
        let target = 1 + delta * ai;
        let cert = semigroup_contains(&others, target)?;
        if let Some(w) = cert.witness {
            let mut rho = w;
            rho.insert(i, 0);
            return Ok((delta as u64, rho));
        }
        delta += 1;
    }
}

/// All `u in L_A` with `sum_i weight_i |u_i| <= bound`, lexicographically
/// sorted. Fails once more than `term_cap` points are found.
pub fn enumerate_offsets(
    matrix: &CurveMatrix,
    frontier: &TruncationFrontier,
    term_cap: usize,
) -> Result<Vec<LatticeVector>> {
    let free = vec![(None, None); matrix.n()];
    enumerate_offsets_in_box(matrix, frontier, &free, term_cap)
}

/// [`enumerate_offsets`] with optional per-coordinate bounds `lo <= u_i <= hi`.
pub fn enumerate_offsets_in_box(
    matrix: &CurveMatrix,
    frontier: &TruncationFrontier,
    bounds: &[(Option<i64>, Option<i64>)],
    term_cap: usize,
) -> Result<Vec<LatticeVector>> {
    let n = matrix.n();
    check_dim(n, frontier.weight.len())?;
    check_dim(n, bounds.len())?;
    let ctx = Enumeration {
        a: matrix.entries().iter().map(|&x| x as i128).collect(),
        w: frontier.weight.iter().map(|&x| x as i128).collect(),
        bounds: bounds
            .iter()
            .map(|&(lo, hi)| (lo.map(i128::from), hi.map(i128::from)))
            .collect(),
        cap: term_cap,
    };
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    ctx.walk(0, frontier.bound as i128, 0, &mut cur, &mut out)?;
    out.sort();
    Ok(out)
}

struct Enumeration {
    a: Vec<i128>,
    w: Vec<i128>,
    bounds: Vec<(Option<i128>, Option<i128>)>,
    cap: usize,
}

impl Enumeration {
    fn range(&self, pos: usize, reach: i128) -> (i128, i128) {
        let (lo, hi) = self.bounds[pos];
        (lo.map_or(-reach, |l| l.max(-reach)), hi.map_or(reach, |h| h.min(reach)))
    }

    fn walk(
        &self,
        pos: usize,
        budget: i128,
        partial: i128,
        cur: &mut Vec<i64>,
        out: &mut Vec<LatticeVector>,
    ) -> Result<()> {
        let n = self.a.len();
        if pos == n - 1 {
            if partial % self.a[pos] != 0 {
                return Ok(());
            }
            let last = -partial / self.a[pos];
            let (lo, hi) = self.range(pos, budget / self.w[pos]);
            if lo <= last && last <= hi {
                cur[pos] = last as i64;
                out.push(LatticeVector(cur.clone()));
                if out.len() > self.cap {
                    return Err(GkzError::ResourceLimit {
                        what: "lattice enumeration",
                        count: out.len(),
                        cap: self.cap,
                    });
                }
            }
            return Ok(());
        }
        let (lo, hi) = self.range(pos, budget / self.w[pos]);
        for x in lo..=hi {
            cur[pos] = x as i64;
            self.walk(pos + 1, budget - self.w[pos] * x.abs(), partial + self.a[pos] * x, cur, out)?;
        }
        cur[pos] = 0;
        Ok(())
    }
}

/// `Delta_j = { m in N^n : sum_{i != n-1} a_i m_i = j + a_{n-1} m_{n-1} }` for
/// the original matrix `(a_1 ... a_n)` of a homogenized `A'`, restricted to
/// `sum m_i <= degree_bound`. Sorted lexicographically.
pub fn delta_j_set(aprime: &CurveMatrix, j: u64, degree_bound: u64) -> Result<Vec<Vec<u64>>> {
    let Family::Homogenized { original } = aprime.family() else {
        return Err(GkzError::invalid(format!("{aprime} is not a homogenized matrix")));
    };
    let n = original.len();
    let special = n - 2;
    if j >= original[special] {
        return Err(GkzError::invalid(format!(
            "j = {j} must be below a_(n-1) = {}",
            original[special]
        )));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    delta_rec(original, special, j, 0, degree_bound, &mut cur, &mut out);
    out.sort();
    Ok(out)
}

fn delta_rec(
    a: &[u64],
    special: usize,
    j: u64,
    pos: usize,
    budget: u64,
    cur: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if pos == a.len() {
        let lhs: u64 = (0..a.len()).filter(|&i| i != special).map(|i| a[i] * cur[i]).sum();
        if lhs == j + a[special] * cur[special] {
            out.push(cur.clone());
        }
        return;
    }
    for x in 0..=budget {
        cur[pos] = x;
        delta_rec(a, special, j, pos + 1, budget - x, cur, out);
    }
    cur[pos] = 0;
}
