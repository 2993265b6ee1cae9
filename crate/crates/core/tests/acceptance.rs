//! Acceptance runner: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use isectq::cdga::Cdga;
use isectq::cli::{parse_doc, space_from_doc, Space, CORPUS};
use isectq::exactq::{dot, q, qf, RatMatrix, Q};
use isectq::quadforms::{
    hilbert_symbol, hyperbolic_completion, symplectic_basis, witt_equal, BilinearSpace, FormKind, HyperbolicBasis, Place,
};
use isectq::spaces::{
    b9_base, b9_thom, classify, closed_formal, cpn, dp_model, s2xs3, sigma_cpn, sigma_t2, thom_space, top_functional,
    verify_good_approximation, witt_class_check, Classification,
};
use isectq::truncation::{attach_top_cell_effect, cotruncate, truncate};
use isectq::Error;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;

type Outcome = Result<String, Box<dyn std::error::Error>>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*).into());
        }
    };
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("B9 Thom pipeline", criterion_b9),
        ("nodal truncation example", criterion_nodal),
        ("classification of suspensions", criterion_classification),
        ("truncation degree pattern", criterion_truncation),
        ("quadratic form algorithms", criterion_forms),
        ("good approximations on the corpus", criterion_goodness),
        ("Witt class of the middle form", criterion_witt),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(Ok(detail)) => println!("PASS {}: {name}: {detail} ({secs:.1}s)", i + 1),
            Ok(Err(e)) => {
                failed += 1;
                println!("FAIL {}: {name}: {e} ({secs:.1}s)", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {}: {name}: panicked ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn criterion_b9() -> Outcome {
    let t = Instant::now();
    let base = b9_base()?;
    ensure!(trim(base.betti()) == vec![1, 0, 0, 1, 1, 1, 1, 0, 0, 1], "base Betti {:?}", base.betti());
    let x = b9_thom()?;
    let link = &x.links[0];
    let fund = &x.link_fundamentals[0];
    let h = link.cohomology()?;
    ensure!(h.dim(6) == 2, "dim H^6 of the sphere bundle is {}", h.dim(6));
    let s6 = link.elem("s6")?;
    let s3a = link.mul_e(&link.elem("s3")?, &link.elem("a")?);
    for c in [&s6, &s3a] {
        ensure!(h.is_cocycle(6, &c.v), "{} is not a cocycle", link.label(c));
    }
    let classes = RatMatrix::from_cols(&[h.class_of(6, &s6.v), h.class_of(6, &s3a.v)], 2);
    ensure!(classes.rank() == 2, "s6 and s3*a are dependent in H^6");
    let pair = |u: &[Q], v: &[Q]| dot(fund, &link.mul(6, u, 6, v));
    let gram = RatMatrix::from_rows(
        vec![vec![pair(&s6.v, &s6.v), pair(&s6.v, &s3a.v)], vec![pair(&s3a.v, &s6.v), pair(&s3a.v, &s3a.v)]],
        2,
    );
    ensure!(gram == RatMatrix::from_i64(&[&[0, 1], &[1, 0]]), "Gram on (s6, s3*a) is {gram:?}");
    let dp = dp_model(&x, Some(&[vec![s6.v.clone()]]))?;
    let support: Vec<usize> = (0..dp.betti.len()).filter(|&r| dp.betti[r] > 0).collect();
    ensure!(support == vec![0, 4, 6, 7, 9, 13], "nonzero degrees {support:?}");
    ensure!(support.iter().all(|&r| dp.betti[r] == 1), "Betti {:?}", dp.betti);
    ensure!((0..=13).all(|r| dp.betti.get(r) == dp.betti.get(13 - r)), "not symmetric: {:?}", dp.betti);
    let secs = t.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.1}s");
    Ok(format!("Gram [[0,1],[1,0]], Betti in degrees {support:?}"))
}

fn criterion_nodal() -> Outcome {
    let a = s2xs3()?;
    let (t, _, _) = truncate(&a, 3)?;
    ensure!(trim(t.betti()) == vec![1, 0, 1], "truncation {:?}", t.betti());
    let (c, _) = cotruncate(&a, 3)?;
    ensure!(trim(c.betti()) == vec![1, 0, 0, 1, 0, 1], "cotruncation {:?}", c.betti());
    let e = attach_top_cell_effect(&c, 6, &[q(1)])?;
    ensure!(trim(e.betti.clone()) == vec![1, 0, 0, 1], "after the top cell {:?}", e.betti);
    Ok("(1,0,1), (1,0,0,1,0,1), (1,0,0,1)".into())
}

fn criterion_classification() -> Outcome {
    let cases = [
        ("sigma CP2", sigma_cpn(2)?, Classification::Neither),
        ("sigma CP3", sigma_cpn(3)?, Classification::Witt),
        ("sigma T2", sigma_t2()?, Classification::LSpace),
    ];
    for (name, x, want) in &cases {
        let got = classify(x)?.class;
        ensure!(got == *want, "{name}: {got:?}, expected {want:?}");
    }
    Ok("Neither, Witt, L-space".into())
}

/// `H^r` of the quotient `A / I` where `ideal[r]` spans `I^r`.
fn oracle_quotient_betti(a: &Cdga, ideal: &[RatMatrix]) -> Vec<usize> {
    let top = a.top();
    let rank_bar: Vec<usize> = (0..=top)
        .map(|r| {
            if r == top {
                return 0;
            }
            let both = a.d(r).hstack(&ideal[r + 1]);
            both.rank() - ideal[r + 1].rank()
        })
        .collect();
    (0..=top)
        .map(|r| {
            let dim = a.dim(r) - ideal[r].rank();
            dim - rank_bar[r] - if r > 0 { rank_bar[r - 1] } else { 0 }
        })
        .collect()
}

/// `H^r` of the subcomplex whose degree-`r` part is spanned by `sub[r]`.
fn oracle_sub_betti(a: &Cdga, sub: &[RatMatrix]) -> Vec<usize> {
    let top = a.top();
    let rank: Vec<usize> = (0..=top).map(|r| a.d(r).mul(&sub[r]).rank()).collect();
    (0..=top).map(|r| sub[r].rank() - rank[r] - if r > 0 { rank[r - 1] } else { 0 }).collect()
}

fn pad(mut b: Vec<usize>, n: usize) -> Vec<usize> {
    b.resize(n.max(b.len()), 0);
    b
}

fn criterion_truncation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x7275_6e63);
    let samples = 200;
    let mut checks = 0;
    for s in 0..samples {
        let a = random_cdga(&mut rng);
        let top = a.top();
        let h = oracle_sub_betti(&a, &(0..=top).map(|r| RatMatrix::identity(a.dim(r))).collect::<Vec<_>>());
        for k in 1..=top + 1 {
            // I^{k-1}: standard vectors on the pivot columns of d^{k-1}; I^r = A^r from k on.
            let ideal: Vec<RatMatrix> = (0..=top)
                .map(|r| {
                    if r + 1 == k {
                        RatMatrix::identity(a.dim(r)).select_cols(&a.d(r).independent_cols())
                    } else if r >= k {
                        RatMatrix::identity(a.dim(r))
                    } else {
                        RatMatrix::zeros(a.dim(r), 0)
                    }
                })
                .collect();
            let mut sub = ideal.clone();
            sub[0] = sub[0].hstack(&RatMatrix::from_cols(&[a.unit().to_vec()], a.dim(0)));
            let ot = oracle_quotient_betti(&a, &ideal);
            let oc = oracle_sub_betti(&a, &sub);
            let want_t: Vec<usize> = (0..=top).map(|r| if r < k { h[r] } else { 0 }).collect();
            let want_c: Vec<usize> = (0..=top).map(|r| if r == 0 { 1 } else if r < k { 0 } else { h[r] }).collect();
            ensure!(ot == want_t, "sample {s}, k={k}: oracle truncation {ot:?} vs pattern {want_t:?}");
            ensure!(oc == want_c, "sample {s}, k={k}: oracle cotruncation {oc:?} vs pattern {want_c:?}");
            let et = pad(truncate(&a, k)?.0.betti(), top + 1);
            let ec = pad(cotruncate(&a, k)?.0.betti(), top + 1);
            ensure!(et == want_t, "sample {s}, k={k}: truncation {et:?}, expected {want_t:?}");
            ensure!(ec == want_c, "sample {s}, k={k}: cotruncation {ec:?}, expected {want_c:?}");
            checks += 1;
        }
    }
    Ok(format!("{samples} random algebras, {checks} cut degrees"))
}

fn criterion_forms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x666f_726d);
    let n_blocks = block_checks(&mut rng)?;
    let n_hilbert = reciprocity_checks(&mut rng)?;
    let n_witt = witt_oracle_checks()?;
    Ok(format!("{n_blocks} hyperbolic/symplectic blocks, {n_hilbert} reciprocity products, {n_witt} Witt comparisons"))
}

fn block_checks(rng: &mut StdRng) -> Result<usize, Box<dyn std::error::Error>> {
    let mut count = 0;
    for i in 0..500 {
        let m = rng.gen_range(1..=4);
        let p = random_invertible(rng, 2 * m);
        let pinv = p.inverse().unwrap();
        let g = p.transpose().mul(&hyperbolic_gram(m, false)).mul(&p);
        let b = symmetric(g);
        let c = random_invertible(rng, m);
        let v = pinv.select_cols(&(0..m).collect::<Vec<_>>()).mul(&c);
        let hb = hyperbolic_completion(&b, &v)?;
        let gram = b.restrict(&hb.basis).gram;
        ensure!(gram == HyperbolicBasis::expected_gram(m, FormKind::Symmetric), "completion {i}: Gram {gram:?}");
        let lag = hb.lagrangian();
        ensure!(lag.hstack(&v).rank() == m, "completion {i} changed the Lagrangian");
        count += 1;
    }
    for i in 0..500 {
        let m = rng.gen_range(1..=4);
        let g = if rng.gen_bool(0.5) {
            random_skew(rng, m)
        } else {
            let p = random_invertible(rng, 2 * m);
            p.transpose().mul(&hyperbolic_gram(m, true)).mul(&p)
        };
        let b = BilinearSpace::skew(g)?;
        let hb = symplectic_basis(&b)?;
        let gram = b.restrict(&hb.basis).gram;
        ensure!(gram == HyperbolicBasis::expected_gram(m, FormKind::Skew), "symplectic {i}: Gram {gram:?}");
        ensure!(hb.basis.rank() == 2 * m, "symplectic {i}: not a basis");
        count += 1;
    }
    Ok(count)
}

fn small_primes(mut n: u64, out: &mut Vec<u64>) {
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
}

fn reciprocity_checks(rng: &mut StdRng) -> Result<usize, Box<dyn std::error::Error>> {
    let mut count = 0;
    while count < 500 {
        let nums: Vec<i64> = (0..4).map(|_| rng.gen_range(-300..=300)).collect();
        if nums[0] == 0 || nums[2] == 0 {
            continue;
        }
        let (da, db) = (nums[1].abs() % 40 + 1, nums[3].abs() % 40 + 1);
        let a = qf(nums[0], da);
        let b = qf(nums[2], db);
        let mut primes = vec![2];
        for x in [nums[0].unsigned_abs(), da as u64, nums[2].unsigned_abs(), db as u64] {
            small_primes(x, &mut primes);
        }
        primes.sort();
        primes.dedup();
        let mut prod = hilbert_symbol(&a, &b, Place::Infinity)?;
        for &p in &primes {
            prod *= hilbert_symbol(&a, &b, Place::Prime(p))?;
        }
        ensure!(prod == 1, "product of Hilbert symbols ({a}, {b}) over all places is {prod}");
        count += 1;
    }
    Ok(count)
}

fn isqrt_exact(d: i64) -> bool {
    if d < 0 {
        return false;
    }
    let mut r = (d as f64).sqrt() as i64;
    while r * r > d {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= d {
        r += 1;
    }
    r * r == d
}

/// Exhaustive search for a rational isotropic vector of the integral form `g`
/// among vectors whose first `n-1` coordinates lie within Cassels' bound
/// `(3 sum|g_ij|)^((n-1)/2)`; the last coordinate is solved for exactly.
fn isotropic(g: &[Vec<i64>]) -> bool {
    let n = g.len();
    if (0..n).any(|i| g[i][i] == 0) {
        return true;
    }
    if n == 1 {
        return false;
    }
    let s: i64 = g.iter().flatten().map(|x| x.abs()).sum();
    let bound = ((3 * s) as f64).powf((n - 1) as f64 / 2.0).floor() as i64;
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || g[i][j] == 0));
    let lo = if diagonal { 0 } else { -bound };
    let m = n - 1;
    let mut x = vec![lo; m];
    loop {
        if x.iter().any(|&v| v != 0) {
            let l: i64 = (0..m).map(|i| g[i][m] * x[i]).sum();
            let q0: i64 = (0..m).map(|i| (0..m).map(|j| g[i][j] * x[i] * x[j]).sum::<i64>()).sum();
            if isqrt_exact(l * l - g[m][m] * q0) {
                return true;
            }
        }
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = lo;
            i += 1;
        }
    }
}

fn det_i64(g: &[Vec<i64>]) -> i64 {
    let n = g.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<i64>> = g[1..].iter().map(|row| (0..n).filter(|&j| j != c).map(|j| row[j]).collect()).collect();
            let s = if c % 2 == 0 { 1 } else { -1 };
            s * g[0][c] * det_i64(&minor)
        })
        .sum()
}

/// Independent decision of Witt-triviality for a nondegenerate form of rank at most 4.
fn oracle_hyperbolic(g: &[Vec<i64>], cache: &mut HashMap<Vec<Vec<i64>>, bool>) -> bool {
    if let Some(&v) = cache.get(g) {
        return v;
    }
    let v = match g.len() {
        0 => true,
        2 => isotropic(g),
        4 => isqrt_exact(det_i64(g)) && isotropic(g),
        _ => false,
    };
    cache.insert(g.to_vec(), v);
    v
}

fn to_space(g: &[Vec<i64>]) -> BilinearSpace {
    let rows: Vec<Vec<Q>> = g.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
    symmetric(RatMatrix::from_rows(rows, g.len()))
}

fn diag(entries: &[i64]) -> Vec<Vec<i64>> {
    let n = entries.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect()
}

fn all_tuples(values: &[i64], len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| values.iter().map(move |&v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

fn all_symmetric(n: usize, h: i64) -> Vec<Vec<Vec<i64>>> {
    let values: Vec<i64> = (-h..=h).collect();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    all_tuples(&values, slots.len())
        .into_iter()
        .map(|t| {
            let mut g = vec![vec![0; n]; n];
            for (&(i, j), &v) in slots.iter().zip(&t) {
                g[i][j] = v;
                g[j][i] = v;
            }
            g
        })
        .filter(|g| det_i64(g) != 0)
        .collect()
}

fn witt_oracle_checks() -> Result<usize, Box<dyn std::error::Error>> {
    let mut cache = HashMap::new();
    let mut count = 0;
    let units = [-3, -2, -1, 1, 2, 3];
    // Pairs of diagonal forms of rank at most 2: equal in W(Q) iff f + (-g) is hyperbolic.
    let small: Vec<Vec<i64>> = (1..=2).flat_map(|r| all_tuples(&units, r)).collect();
    for f in &small {
        for g in &small {
            let mut sum = f.clone();
            sum.extend(g.iter().map(|v| -v));
            let mut key = sum.clone();
            key.sort();
            let want = oracle_hyperbolic(&diag(&key), &mut cache);
            let got = witt_equal(&to_space(&diag(f)), &to_space(&diag(g)))?;
            ensure!(got == want, "witt_equal(<{f:?}>, <{g:?}>) = {got}, oracle {want}");
            count += 1;
        }
    }
    // Binary forms with entries in -3..3: hyperbolic iff isotropic.
    for g in all_symmetric(2, 3) {
        let got = witt_equal(&to_space(&g), &BilinearSpace::empty(FormKind::Symmetric))?;
        let want = oracle_hyperbolic(&g, &mut cache);
        ensure!(got == want, "binary form {g:?}: witt_equal {got}, oracle {want}");
        count += 1;
    }
    // Ternary forms: isotropic iff Witt-equivalent to <-det>.
    let mut ternary = all_symmetric(3, 3);
    ternary.extend(all_tuples(&units, 3).iter().map(|t| diag(t)));
    for g in ternary {
        let got = witt_equal(&to_space(&g), &to_space(&[vec![-det_i64(&g)]]))?;
        let want = isotropic(&g);
        ensure!(got == want, "ternary form {g:?}: witt_equal {got}, oracle {want}");
        count += 1;
    }
    Ok(count)
}

fn criterion_goodness() -> Outcome {
    let mut checked = Vec::new();
    let mut skipped = Vec::new();
    for (name, _, text) in CORPUS {
        let Space::Pseudo { x, keeps, .. } = space_from_doc(&parse_doc(text)?)? else { continue };
        match dp_model(&x, keeps.as_deref()) {
            Ok(dp) => {
                let report = verify_good_approximation(&dp);
                let fails: Vec<String> = report.failures().iter().map(|c| c.condition.clone()).collect();
                ensure!(report.good(), "{name}: not good: {fails:?}");
                if dp.classification == Classification::Witt {
                    ensure!(report.very_good(), "{name}: Witt input but not very good: {fails:?}");
                }
                checked.push(*name);
            }
            Err(Error::Unsupported(_)) | Err(Error::Precondition(_)) => skipped.push(*name),
            Err(e) => return Err(format!("{name}: {e}").into()),
        }
    }
    ensure!(checked.len() >= 4, "only {} pseudomanifolds admitted a model", checked.len());
    Ok(format!("good on {checked:?}; no model for {skipped:?}"))
}

fn criterion_witt() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x7769_7474);
    let mut cases: Vec<(String, isectq::spaces::PseudomanifoldModel)> = Vec::new();
    for (name, _, text) in CORPUS {
        if let Space::Pseudo { x, .. } = space_from_doc(&parse_doc(text)?)? {
            if x.n % 4 == 0 {
                cases.push((name.to_string(), x));
            }
        }
    }
    let bundled = cases.len();
    for i in 0..10 {
        let k = rng.gen_range(1..=4);
        cases.push((format!("formal 4-manifold {i}"), closed_formal(2, &random_gram(&mut rng, k, 3))?));
        let k = rng.gen_range(1..=3);
        cases.push((format!("formal 8-manifold {i}"), closed_formal(4, &random_gram(&mut rng, k, 3))?));
        let s2 = cpn(1)?;
        let e = vec![q([-4, -3, -2, -1, 1, 2, 3, 4][rng.gen_range(0..8)])];
        cases.push((format!("Thom over S2 {i}"), thom_space(&s2, &e, 2, 2, &top_functional(&s2))?));
        let k = rng.gen_range(1..=2);
        let m4 = closed_formal(2, &random_gram(&mut rng, k, 2))?.regular;
        let e = vec![q(rng.gen_range(-3..=3))];
        cases.push((format!("rank-4 Thom over a 4-manifold {i}"), thom_space(&m4, &e, 4, 4, &top_functional(&m4))?));
        let k = rng.gen_range(1..=2);
        let c = random_cubic(&mut rng, k);
        let b6 = formal_six(k, &|a, b, d| c[(a * k + b) * k + d]);
        // A nonzero Euler class keeps the circle bundle simply connected.
        let e = loop {
            let e = random_vec(&mut rng, k, 2);
            if e.iter().any(|v| *v != q(0)) {
                break e;
            }
        };
        cases.push((format!("rank-2 Thom over a 6-manifold {i}"), thom_space(&b6, &e, 2, 6, &top_functional(&b6))?));
    }
    for (name, x) in &cases {
        ensure!(witt_class_check(x)?, "{name}: forms differ in W(Q)");
    }
    let nontrivial = cases
        .iter()
        .filter(|(_, x)| {
            let f = isectq::spaces::regular_intersection_form(x).unwrap();
            !f.nondegenerate_part().gram.is_zero() && f.dim() > 0
        })
        .count();
    Ok(format!("{} spaces ({bundled} bundled), {nontrivial} with a nonzero form", cases.len()))
}
