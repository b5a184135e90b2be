//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gkz_core::arith::{factorial, gcd_all};
use gkz_core::gamma::{gamma_coefficient, gamma_series, generic_exponents, has_minimal_nsupp, restrict_series_x0, singular_exponents};
use gkz_core::gevrey::{dimension_table, gevrey_index_estimate, polynomial_solution, Diagonal, PointClass, Sheaf};
use gkz_core::lattice::{kernel_basis, minimal_delta, semigroup_contains, DEFAULT_TERM_CAP};
use gkz_core::restriction::{
    b_function_1kakb, ext1_gevrey_bound, ext1_recurrence_solve, ext1_rhs_from, ext1_verify, homogenize,
    restrict_decomposition, RestrictionLocus,
};
use gkz_core::series::verify_annihilation;
use gkz_core::system::default_degree_bound;
use gkz_core::{build_system, CurveMatrix, GevreyOrder, LatticeVector, Rational, RationalVector, TruncationFrontier};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn m(a: &[u64]) -> CurveMatrix {
    CurveMatrix::new(a.to_vec()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

const BETAS: [&str; 4] = ["0", "1", "2", "7/2"];

/// `(A, expected singular count, expected generic count)`.
fn exponent_cases() -> Vec<(CurveMatrix, usize, usize)> {
    let mut cases: Vec<_> = [[2u64, 3], [2, 5], [3, 4]]
        .iter()
        .map(|a| (m(a), a[0] as usize, a[1] as usize))
        .collect();
    cases.push((m(&[1, 2, 5]), 2, 5));
    cases.push((m(&[1, 3, 7]), 3, 7));
    cases
}

fn exponent_counts() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (a, ns, ng) in exponent_cases() {
        for beta in BETAS {
            let sys = build_system(&a, &q(beta), default_degree_bound(&a)).map_err(|e| e.to_string())?;
            let sing = singular_exponents(&sys).map_err(|e| e.to_string())?;
            let gen = generic_exponents(&sys).map_err(|e| e.to_string())?;
            ensure(sing.len() == ns && gen.len() == ng, || {
                format!("{a}, beta={beta}: {} singular / {} generic", sing.len(), gen.len())
            })?;
            for e in sing.iter().chain(&gen) {
                let w = e.v.weighted_sum(a.entries()).map_err(|e| e.to_string())?;
                ensure(w == q(beta), || format!("{a}: A.{} = {w}", e.v))?;
                let check = has_minimal_nsupp(&e.v, &a, 20).map_err(|e| e.to_string())?;
                ensure(check.minimal, || format!("{a}: {} has non-minimal nsupp", e.v))?;
                ensure(a.n() > 2 || check.exact, || format!("{a}: rank-1 check not exact"))?;
                checked += 1;
            }
        }
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("{checked} exponents in {:.2?}", start.elapsed()))
}

fn annihilation() -> Outcome {
    let start = Instant::now();
    let mut series = 0;
    let mut terms = 0;
    for (a, _, _) in exponent_cases() {
        for beta in BETAS {
            let sys = build_system(&a, &q(beta), default_degree_bound(&a)).map_err(|e| e.to_string())?;
            let frontier = TruncationFrontier::uniform(a.n(), 60);
            let exps = singular_exponents(&sys).and_then(|mut s| {
                s.extend(generic_exponents(&sys)?);
                Ok(s)
            });
            for e in exps.map_err(|e| e.to_string())? {
                let f = gamma_series(&e.v, &sys, &frontier, DEFAULT_TERM_CAP).map_err(|e| e.to_string())?;
                for r in verify_annihilation(&sys.operators(), &f).map_err(|e| e.to_string())? {
                    ensure(r.is_zero(), || {
                        format!("{a}, beta={beta}, v={}: {} leaves {} terms", e.v, r.operator, r.residual_term_count)
                    })?;
                }
                series += 1;
                terms += f.len();
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{series} series, {terms} terms, bound 60, in {:.2?}", start.elapsed()))
}

fn gevrey_index() -> Outcome {
    let a = m(&[2, 3]);
    let sys = build_system(&a, &q("1"), default_degree_bound(&a)).map_err(|e| e.to_string())?;
    let v = RationalVector::from_integers(&[-1, 1]);
    let f = gamma_series(&v, &sys, &TruncationFrontier::uniform(2, 5 * 40), DEFAULT_TERM_CAP)
        .map_err(|e| e.to_string())?;
    let e1 = gevrey_index_estimate(&f, 1, 30, &Diagonal::Ray(vec![-3, 2])).map_err(|e| e.to_string())?;
    ensure(!e1.polynomial && e1.terms_used >= 30 && (e1.estimate - 1.5).abs() <= 0.05, || format!("(2 3): {e1:?}"))?;

    let a = m(&[1, 2, 5]);
    let sys = build_system(&a, &q("1"), default_degree_bound(&a)).map_err(|e| e.to_string())?;
    let v = RationalVector::parse(&["0", "1/2", "0"]).map_err(|e| e.to_string())?;
    let frontier = TruncationFrontier::new(vec![40, 1, 1], 7 * 40).map_err(|e| e.to_string())?;
    let f = gamma_series(&v, &sys, &frontier, DEFAULT_TERM_CAP).map_err(|e| e.to_string())?;
    let e2 = gevrey_index_estimate(&f, 2, 30, &Diagonal::Ray(vec![0, -5, 2])).map_err(|e| e.to_string())?;
    ensure(!e2.polynomial && e2.terms_used >= 30 && (e2.estimate - 2.5).abs() <= 0.10, || format!("(1 2 5): {e2:?}"))?;
    Ok(format!(
        "(2 3): {:.4} ± {:.4} over {} terms; (1 2 5): {:.4} ± {:.4} over {} terms",
        e1.estimate, e1.stderr, e1.terms_used, e2.estimate, e2.stderr, e2.terms_used
    ))
}

fn polynomial_case() -> Outcome {
    let a = m(&[2, 3]);
    for beta in 2..=7u64 {
        let sol = polynomial_solution(&a, &Rational::from(beta))
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("beta={beta}: no polynomial solution"))?;
        let candidates: Vec<u64> = (0..2).filter(|&k| beta >= 3 * k && (beta - 3 * k) % 2 == 0).collect();
        ensure(candidates.len() == 1 && sol.q == Some(candidates[0]), || {
            format!("beta={beta}: q={:?}, candidates {candidates:?}", sol.q)
        })?;
        let f = &sol.series;
        ensure(f.terms().all(|(u, _)| f.exponent(u).unwrap().iter().all(Rational::is_natural)), || {
            format!("beta={beta}: not a polynomial")
        })?;
        let sys = build_system(&a, &Rational::from(beta), default_degree_bound(&a)).map_err(|e| e.to_string())?;
        let ops = sys.operators();
        let shift = ops.iter().map(|o| o.shift(&f.frontier().weight)).max().unwrap_or(0);
        let wide = f.widened(f.frontier().bound + shift);
        for r in verify_annihilation(&ops, &wide).map_err(|e| e.to_string())? {
            ensure(r.is_zero() && r.frontier.bound >= f.frontier().bound, || {
                format!("beta={beta}: {} leaves {} terms", r.operator, r.residual_term_count)
            })?;
        }
    }
    let gap = polynomial_solution(&a, &q("1")).map_err(|e| e.to_string())?;
    ensure(gap.is_none(), || "beta=1 should have no polynomial solution".into())?;
    Ok("beta 2..7 unique q, exactly annihilated; beta=1 absent".into())
}

fn expected_cell(sheaf: Sheaf, ext: u8, point: PointClass, special: bool, above: bool, rank: u64) -> u64 {
    let sp = u64::from(special);
    match (sheaf, ext, point, above) {
        (Sheaf::Holomorphic, _, _, _) => sp,
        (Sheaf::Formal, 0, PointClass::SmoothPoint, true) => rank,
        (Sheaf::Formal, 1, PointClass::SmoothPoint, true) => 0,
        (Sheaf::Formal, _, _, _) => sp,
        (Sheaf::Quotient, 0, PointClass::SmoothPoint, true) => rank,
        (Sheaf::Quotient, _, _, _) => 0,
    }
}

fn dimension_tables() -> Outcome {
    let cases = [
        (m(&[2, 3]), ["5/4", "3/2", "2", "inf"], ["1", "2"], q("3/2"), 2u64),
        (m(&[1, 2, 5]), ["2", "5/2", "3", "inf"], ["1/2", "3"], q("5/2"), 2u64),
    ];
    let mut cells = 0;
    for (a, ss, betas, slope, rank) in cases {
        for s in ss {
            let order: GevreyOrder = s.parse().map_err(|e: gkz_core::GkzError| e.to_string())?;
            let above = s == "inf" || q(s) >= slope;
            for beta in betas {
                let special = q(beta).is_natural() && semigroup_contains(a.entries(), q(beta).to_i64().unwrap()).unwrap().member;
                let t = dimension_table(&a, &q(beta), &order).map_err(|e| e.to_string())?;
                for sheaf in Sheaf::ALL {
                    for ext in 0..=2u8 {
                        for point in [PointClass::Origin, PointClass::SmoothPoint] {
                            let want = if ext == 2 { 0 } else { expected_cell(sheaf, ext, point, special, above, rank) };
                            let got = t.value(sheaf, ext, point);
                            ensure(got == Some(want), || {
                                format!("{a}, s={s}, beta={beta}, {sheaf:?} Ext^{ext} {point:?}: {got:?} != {want}")
                            })?;
                            cells += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{cells} cells match"))
}

fn restriction() -> Outcome {
    for (k, a, b) in [(1u64, 2u64, 3u64), (2, 2, 3), (3, 1, 2)] {
        let bf = b_function_1kakb(k, a, b).map_err(|e| e.to_string())?;
        let want: Vec<Rational> = (0..k).map(Rational::from).collect();
        ensure(bf.roots == want, || format!("({k},{a},{b}): roots {:?}", bf.roots))?;
    }
    let d = restrict_decomposition(&m(&[1, 4, 6]), &q("5"), RestrictionLocus::LeadingVariables)
        .map_err(|e| e.to_string())?;
    let got: Vec<(Vec<u64>, Rational)> = d.components.iter().map(|c| (c.matrix.entries().to_vec(), c.beta.clone())).collect();
    let want = vec![(vec![2, 3], q("5/2")), (vec![2, 3], q("2"))];
    ensure(got == want, || format!("(1 4 6), beta=5: {got:?}"))?;
    Ok("b-function roots {0..k-1}; (1 4 6), beta=5 -> ((2 3),5/2), ((2 3),2)".into())
}

fn homogenization_round_trip() -> Outcome {
    let start = Instant::now();
    let a = m(&[3, 4, 5]);
    let h = homogenize(&a).map_err(|e| e.to_string())?;
    let target = build_system(&a, &q("0"), default_degree_bound(&a)).map_err(|e| e.to_string())?;
    let ops = target.operators();
    let shift = ops.iter().map(|o| o.shift(&[1, 1, 1])).max().unwrap_or(0);
    let sys = build_system(&h.aprime, &q("0"), default_degree_bound(&h.aprime)).map_err(|e| e.to_string())?;
    let mut exps = singular_exponents(&sys).map_err(|e| e.to_string())?;
    exps.extend(generic_exponents(&sys).map_err(|e| e.to_string())?);
    let mut nonzero = 0;
    for e in &exps {
        let v0 = e.v[0].to_i64().map_or(0, i64::unsigned_abs);
        let bound = 40 + shift + v0;
        let f = gamma_series(&e.v, &sys, &TruncationFrontier::uniform(4, bound), DEFAULT_TERM_CAP)
            .map_err(|e| e.to_string())?;
        let r = restrict_series_x0(&f).map_err(|e| e.to_string())?;
        nonzero += usize::from(!r.is_empty());
        for rep in verify_annihilation(&ops, &r).map_err(|e| e.to_string())? {
            ensure(rep.is_zero() && rep.frontier.bound >= 40, || {
                format!("v={}: {} leaves {} terms (bound {})", e.v, rep.operator, rep.residual_term_count, rep.frontier.bound)
            })?;
        }
    }
    ensure(nonzero > 0, || "every restricted series vanished".into())?;
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{} series of {}, {nonzero} nonzero after x0=0, residual frontier 40, in {:.2?}",
        exps.len(),
        h.aprime,
        start.elapsed()
    ))
}

fn recurrence_solver() -> Outcome {
    let a = m(&[2, 3]);
    let (eps, beta, s) = (q("1"), q("1"), q("3/2"));
    let bound = 40 + 3;
    let len = 23;
    let f_delta: Vec<Vec<Rational>> = (0..2)
        .map(|k| (0..len).map(|mm| if k == 0 && mm == 0 { q("1") } else { q("0") }).collect())
        .collect();
    let f_harmonic: Vec<Vec<Rational>> = (0..2).map(|_| (0..len).map(|mm| Rational::new(1, mm as i64 + 1)).collect()).collect();
    let g: Vec<Vec<Rational>> = (0..2u64)
        .map(|k| {
            (0..=len as u64)
                .map(|mm| Rational::from(factorial(2 * mm) / factorial(mm)) / Rational::from(k + 1))
                .collect()
        })
        .collect();
    let f_image = ext1_rhs_from(&a, &beta, &g).map_err(|e| e.to_string())?;
    let g0: Vec<Rational> = g.iter().map(|gk| gk[0].clone()).collect();
    let mut report = Vec::new();
    for (name, f, init) in [("delta", &f_delta, None), ("harmonic", &f_harmonic, None), ("P(g)", &f_image, Some(&g0[..]))] {
        let h = ext1_recurrence_solve(&a, &eps, &beta, f, init).map_err(|e| e.to_string())?;
        if name == "P(g)" {
            ensure(h == g, || "P(g) did not reproduce g".into())?;
        }
        if name == "delta" {
            ensure(h[0][1] == q("-1/2"), || format!("h_2 = {}", h[0][1]))?;
        }
        let v = ext1_verify(&a, &eps, &beta, f, &h, bound).map_err(|e| e.to_string())?;
        ensure(v.holds() && v.frontier.bound >= 40, || format!("{name}: {v:?}"))?;
        let gb = ext1_gevrey_bound(&a, &beta, &s, f, &h).map_err(|e| e.to_string())?;
        ensure(gb.holds, || format!("{name}: Gevrey bound fails by {}", gb.worst_margin))?;
        report.push(format!("{name}: C=e^{:.2} D=e^{:.2}", gb.ln_c, gb.ln_d));
    }
    Ok(report.join("; "))
}

/// Lexicographically smallest natural solution of `sum c_j g_j = t`.
fn brute_lex(gens: &[u64], t: u64) -> Option<Vec<u64>> {
    let Some((&g, rest)) = gens.split_first() else {
        return (t == 0).then(Vec::new);
    };
    (0..=t / g).find_map(|c| {
        brute_lex(rest, t - c * g).map(|mut w| {
            w.insert(0, c);
            w
        })
    })
}

fn oracle_equivalence() -> Outcome {
    let mut sets: Vec<Vec<u64>> = Vec::new();
    for x in 1..=20u64 {
        for y in x + 1..=20 {
            sets.push(vec![x, y]);
            for z in y + 1..=20 {
                sets.push(vec![x, y, z]);
            }
        }
    }
    let mut queries = 0;
    for gens in &sets {
        for t in 0..=200u64 {
            let cert = semigroup_contains(gens, t as i64).map_err(|e| e.to_string())?;
            let want = brute_lex(gens, t);
            ensure(cert.member == want.is_some() && cert.witness == want, || {
                format!("{gens:?} target {t}: {:?}", cert.witness)
            })?;
            queries += 1;
        }
    }
    let mut deltas = 0;
    for gens in sets.iter().filter(|g| g[0] > 1 && gcd_all(g) == 1) {
        let a = m(gens);
        for i in 0..gens.len() {
            let others: Vec<u64> = (0..gens.len()).filter(|&j| j != i).map(|j| gens[j]).collect();
            let (delta, w) = (0u64..)
                .find_map(|d| brute_lex(&others, 1 + d * gens[i]).map(|w| (d, w)))
                .unwrap();
            let mut rho = w;
            rho.insert(i, 0);
            let got = minimal_delta(&a, i).map_err(|e| e.to_string())?;
            ensure(got == (delta, rho.clone()), || format!("{gens:?}, i={i}: {got:?} vs ({delta}, {rho:?})"))?;
            deltas += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(0x6b7a);
    let pool = [vec![2u64, 3], vec![2, 5], vec![3, 4], vec![1, 2, 5], vec![1, 3, 7], vec![3, 4, 5]];
    for case in 0..100 {
        let a = m(&pool[rng.random_range(0..pool.len())]);
        let basis = kernel_basis(&a);
        let mut u = vec![0i64; a.n()];
        for b in &basis {
            let c = rng.random_range(-2..=2i64);
            for (ui, bi) in u.iter_mut().zip(b.as_slice()) {
                *ui += c * bi;
            }
        }
        let lv = LatticeVector::new(&a, u.clone()).map_err(|e| e.to_string())?;
        // v >= u-, so v and v + u are both natural.
        let v: Vec<i64> = u.iter().map(|&x| (-x).max(0) + rng.random_range(0..=4i64)).collect();
        let got = gamma_coefficient(&RationalVector::from_integers(&v), &lv).map_err(|e| e.to_string())?;
        let mut want = Rational::one();
        for (&vi, &ui) in v.iter().zip(&u) {
            want = want * Rational::from(factorial(vi as u64)) / Rational::from(factorial((vi + ui) as u64));
        }
        ensure(got == want, || format!("case {case}: v={v:?} u={u:?}: {got} vs {want}"))?;
    }
    Ok(format!("{queries} membership queries, {deltas} minimal deltas, 100 Gamma coefficients"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exponent counts", exponent_counts),
        ("annihilation", annihilation),
        ("Gevrey index", gevrey_index),
        ("polynomial case", polynomial_case),
        ("dimension tables", dimension_tables),
        ("b-function & restriction", restriction),
        ("homogenization round trip", homogenization_round_trip),
        ("recurrence solver", recurrence_solver),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/9 passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
