//! Random generators shared by the integration tests.
#![allow(dead_code)]

use isectq::cdga::{differential_ideal, quotient, Cdga, CdgaBuilder, Element};
use isectq::exactq::{q, RatMatrix, Q};
use isectq::quadforms::BilinearSpace;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::Rng;

pub fn trim(mut b: Vec<usize>) -> Vec<usize> {
    while b.len() > 1 && *b.last().unwrap() == 0 {
        b.pop();
    }
    b
}

/// Random integer vector with entries in `-h..=h`.
pub fn random_vec(rng: &mut StdRng, n: usize, h: i64) -> Vec<Q> {
    (0..n).map(|_| q(rng.gen_range(-h..=h))).collect()
}

/// Random invertible integer matrix with small entries.
pub fn random_invertible(rng: &mut StdRng, n: usize) -> RatMatrix {
    loop {
        let rows: Vec<Vec<Q>> = (0..n).map(|_| random_vec(rng, n, 2)).collect();
        let m = RatMatrix::from_rows(rows, n);
        if n == 0 || !m.det().is_zero() {
            return m;
        }
    }
}

/// Random integer combination of a basis of `ker d^r`.
pub fn random_cocycle(rng: &mut StdRng, a: &Cdga, r: usize) -> Vec<Q> {
    let k = a.d(r).kernel_basis();
    let mut v = vec![Q::zero(); a.dim(r)];
    for c in k.columns() {
        let t = q(rng.gen_range(-2..=2));
        for (x, y) in v.iter_mut().zip(&c) {
            *x += &t * y;
        }
    }
    v
}

/// Connected CDGA with top degree at most 8 and at most 4 basis elements per
/// degree: a random relative Sullivan extension, optionally divided by the
/// differential ideal of a random element, then written in a random basis.
pub fn random_cdga(rng: &mut StdRng) -> Cdga {
    'retry: loop {
        let top = rng.gen_range(3..=8);
        let d0 = rng.gen_range(1..=top.min(4));
        let mut a = Cdga::free(&[("g1", d0)], top).unwrap();
        for i in 2..=rng.gen_range(2..=4) {
            let deg = rng.gen_range(1..=top);
            let dv = random_cocycle(rng, &a, deg + 1);
            a = match a.extend(&format!("g{i}"), deg, &dv, top) {
                Ok(b) => b,
                Err(_) => continue 'retry,
            };
            if a.dims().iter().any(|&d| d > 4) {
                continue 'retry;
            }
        }
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(2..=top);
            if a.dim(r) > 0 {
                let x = Element::new(r, random_vec(rng, a.dim(r), 2));
                let i = differential_ideal(&a, &[x]).unwrap();
                a = quotient(&a, &i).unwrap().0;
            }
        }
        let basis: Vec<RatMatrix> = (0..=a.top())
            .map(|r| if r == 0 { RatMatrix::identity(a.dim(0)) } else { random_invertible(rng, a.dim(r)) })
            .collect();
        let b = a.rebased(&basis).unwrap();
        assert!(b.validate().is_empty());
        return b;
    }
}

/// Random nondegenerate symmetric integer matrix of size `k`.
pub fn random_gram(rng: &mut StdRng, k: usize, h: i64) -> RatMatrix {
    loop {
        let mut m = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = q(rng.gen_range(-h..=h));
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Random nondegenerate skew integer matrix of size `2m`.
pub fn random_skew(rng: &mut StdRng, m: usize) -> RatMatrix {
    let k = 2 * m;
    loop {
        let mut g = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in i + 1..k {
                let v = q(rng.gen_range(-3..=3));
                g.set(i, j, v.clone());
                g.set(j, i, -v);
            }
        }
        if !g.det().is_zero() {
            return g;
        }
    }
}

/// Standard hyperbolic Gram matrix of rank `2m`.
pub fn hyperbolic_gram(m: usize, skew: bool) -> RatMatrix {
    let mut g = RatMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        g.set(i, m + i, q(1));
        g.set(m + i, i, q(if skew { -1 } else { 1 }));
    }
    g
}

pub fn symmetric(g: RatMatrix) -> BilinearSpace {
    BilinearSpace::symmetric(g).unwrap()
}

/// Formal algebra of a closed 6-manifold with `H^2 = Q^k` and triple
/// products `x_i x_j x_l = c(i, j, l)` for a symmetric cubic `c`.
pub fn formal_six(k: usize, cubic: &dyn Fn(usize, usize, usize) -> i64) -> Cdga {
    let mut names: Vec<Vec<String>> = vec![vec![]; 7];
    names[0].push("1".into());
    names[2] = (1..=k).map(|i| format!("x{i}")).collect();
    names[4] = (1..=k).map(|i| format!("y{i}")).collect();
    names[6].push("w".into());
    let mut b = CdgaBuilder::new(names);
    b.set_unit(0);
    for i in 0..k {
        for j in 0..k {
            b.set_product(2, i, 2, j, (0..k).map(|l| q(cubic(i, j, l))).collect());
            b.set_product(2, i, 4, j, vec![q(if i == j { 1 } else { 0 })]);
            b.set_product(4, j, 2, i, vec![q(if i == j { 1 } else { 0 })]);
        }
    }
    b.build()
}

/// Random symmetric cubic form on `Q^k` as a lookup table.
pub fn random_cubic(rng: &mut StdRng, k: usize) -> Vec<i64> {
    let mut c = vec![0; k * k * k];
    for i in 0..k {
        for j in i..k {
            for l in j..k {
                let v = rng.gen_range(-2..=2);
                for (a, b, d) in [(i, j, l), (i, l, j), (j, i, l), (j, l, i), (l, i, j), (l, j, i)] {
                    c[(a * k + b) * k + d] = v;
                }
            }
        }
    }
    c
}

/// Cohomology algebra of `S^a x S^b`.
pub fn sphere_product(a: usize, b: usize) -> Cdga {
    let f = Cdga::free(&[("u", a), ("v", b)], a + b).unwrap();
    let mut gens = Vec::new();
    for g in ["u", "v"] {
        let x = f.elem(g).unwrap();
        let sq = f.mul_e(&x, &x);
        if !sq.is_zero() {
            gens.push(sq);
        }
    }
    if gens.is_empty() {
        return f;
    }
    let i = differential_ideal(&f, &gens).unwrap();
    quotient(&f, &i).unwrap().0
}
