//! Bilinear spaces over Q: diagonalization, Hilbert and Hasse symbols, Witt
//! classes, hyperbolic and symplectic bases, and Lagrangian search.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactq::{dot, q, unit_vec, RatMatrix, Q};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Symmetric,
    Skew,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearSpace {
    pub gram: RatMatrix,
    pub kind: FormKind,
}

impl BilinearSpace {
    /// Checks that the Gram matrix is square and (skew-)symmetric.
    pub fn new(gram: RatMatrix, kind: FormKind) -> Result<Self> {
        if gram.rows() != gram.cols() {
            return Err(Error::Input("Gram matrix is not square".into()));
        }
        let t = gram.transpose();
        let ok = match kind {
            FormKind::Symmetric => t == gram,
            FormKind::Skew => t == gram.scale(&q(-1)),
        };
        if !ok {
            return Err(Error::Input(format!("Gram matrix is not {kind:?}").to_lowercase()));
        }
        Ok(BilinearSpace { gram, kind })
    }

    pub fn symmetric(gram: RatMatrix) -> Result<Self> {
        Self::new(gram, FormKind::Symmetric)
    }

    pub fn skew(gram: RatMatrix) -> Result<Self> {
        Self::new(gram, FormKind::Skew)
    }

    /// Symmetric for even middle degree, skew for odd.
    pub fn for_degree(gram: RatMatrix, degree: usize) -> Result<Self> {
        Self::new(gram, if degree % 2 == 0 { FormKind::Symmetric } else { FormKind::Skew })
    }

    pub fn empty(kind: FormKind) -> Self {
        BilinearSpace { gram: RatMatrix::zeros(0, 0), kind }
    }

    pub fn hyperbolic_plane() -> Self {
        BilinearSpace { gram: RatMatrix::from_i64(&[&[0, 1], &[1, 0]]), kind: FormKind::Symmetric }
    }

    pub fn diagonal(entries: &[Q]) -> Self {
        BilinearSpace { gram: RatMatrix::diag(entries), kind: FormKind::Symmetric }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn b(&self, x: &[Q], y: &[Q]) -> Q {
        dot(x, &self.gram.mul_vec(y))
    }

    pub fn direct_sum(&self, other: &BilinearSpace) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::Input("cannot add symmetric and skew forms".into()));
        }
        Ok(BilinearSpace { gram: self.gram.block_diag(&other.gram), kind: self.kind })
    }

    pub fn negated(&self) -> Self {
        BilinearSpace { gram: self.gram.scale(&q(-1)), kind: self.kind }
    }

    /// Gram matrix of the form restricted to the span of the columns of `c`.
    pub fn restrict(&self, c: &RatMatrix) -> Self {
        BilinearSpace { gram: c.transpose().mul(&self.gram).mul(c), kind: self.kind }
    }

    pub fn radical(&self) -> RatMatrix {
        self.gram.kernel_basis()
    }

    pub fn is_degenerate(&self) -> bool {
        self.gram.rank() < self.dim()
    }

    /// The form induced on a standard complement of the radical.
    pub fn nondegenerate_part(&self) -> Self {
        let idx = crate::exactq::complement_std(&self.radical());
        self.restrict(&RatMatrix::identity(self.dim()).select_cols(&idx))
    }
}

fn require_symmetric(b: &BilinearSpace) -> Result<()> {
    match b.kind {
        FormKind::Symmetric => Ok(()),
        FormKind::Skew => Err(Error::Input("operation needs a symmetric form".into())),
    }
}

fn require_nondegenerate(b: &BilinearSpace) -> Result<()> {
    if b.is_degenerate() {
        Err(Error::Input("form is degenerate".into()))
    } else {
        Ok(())
    }
}

/// `P` and entries with `Pᵀ·G·P = diag(entries)`.
pub fn diagonalize(b: &BilinearSpace) -> Result<(RatMatrix, Vec<Q>)> {
    require_symmetric(b)?;
    let n = b.dim();
    let mut g = b.gram.clone();
    let mut p = RatMatrix::identity(n);
    let add_col = |m: &mut RatMatrix, dst: usize, src: usize, c: &Q| {
        for r in 0..m.rows() {
            let v = m.get(r, dst) + c * m.get(r, src);
            m.set(r, dst, v);
        }
    };
    let add_row = |m: &mut RatMatrix, dst: usize, src: usize, c: &Q| {
        for k in 0..m.cols() {
            let v = m.get(dst, k) + c * m.get(src, k);
            m.set(dst, k, v);
        }
    };
    for i in 0..n {
        if g.get(i, i).is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !g.get(j, j).is_zero()) {
                // swap basis vectors i and j
                for r in 0..n {
                    let (a, c) = (g.get(r, i).clone(), g.get(r, j).clone());
                    g.set(r, i, c);
                    g.set(r, j, a);
                }
                for k in 0..n {
                    let (a, c) = (g.get(i, k).clone(), g.get(j, k).clone());
                    g.set(i, k, c);
                    g.set(j, k, a);
                }
                for r in 0..n {
                    let (a, c) = (p.get(r, i).clone(), p.get(r, j).clone());
                    p.set(r, i, c);
                    p.set(r, j, a);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !g.get(i, j).is_zero()) {
                let one = Q::one();
                add_col(&mut g, i, j, &one);
                add_row(&mut g, i, j, &one);
                add_col(&mut p, i, j, &one);
            } else {
                continue;
            }
        }
        let piv = g.get(i, i).clone();
        for j in i + 1..n {
            if g.get(i, j).is_zero() {
                continue;
            }
            let c = -(g.get(i, j) / &piv);
            add_col(&mut g, j, i, &c);
            add_row(&mut g, j, i, &c);
            add_col(&mut p, j, i, &c);
        }
    }
    let entries = (0..n).map(|i| g.get(i, i).clone()).collect();
    Ok((p, entries))
}

pub fn signature(b: &BilinearSpace) -> Result<i64> {
    let (_, d) = diagonalize(b)?;
    Ok(d.iter().map(|x| if x.is_positive() { 1 } else if x.is_negative() { -1 } else { 0 }).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Infinity,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial divisor of an odd composite `n` (Pollard rho).
fn rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = x.abs_diff(y).gcd(&n);
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            out.push(p);
            return factor_into(n / p, out);
        }
    }
    let d = rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorization of `|n|` as (prime, exponent) pairs in increasing order.
pub fn prime_factors(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    let m = n
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Unsupported(format!("cannot factor {n}: exceeds 64 bits")))?;
    if m == 0 {
        return Err(Error::Input("cannot factor 0".into()));
    }
    let mut ps = Vec::new();
    factor_into(m, &mut ps);
    ps.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in ps {
        match out.last_mut() {
            Some((l, e)) if *l == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// Integer in the same square class as a nonzero rational.
fn class_int(a: &Q) -> BigInt {
    a.numer() * a.denom()
}

/// Signed squarefree integer representing the square class of `a`.
pub fn squarefree_class(a: &Q) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::Input("zero has no square class".into()));
    }
    let n = class_int(a);
    let mut out = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (p, e) in prime_factors(&n)? {
        if e % 2 == 1 {
            out *= BigInt::from(p);
        }
    }
    Ok(out)
}

fn split_p(a: &BigInt, p: u64) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut u = a.clone();
    let mut k = 0;
    while u.is_multiple_of(&pb) {
        u /= &pb;
        k += 1;
    }
    (k, u)
}

fn mod_u64(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

fn legendre(u: &BigInt, p: u64) -> i32 {
    if pow_mod(mod_u64(u, p), (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: &Q, b: &Q, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Input("Hilbert symbol of zero".into()));
    }
    let p = match place {
        Place::Infinity => return Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(p) => p,
    };
    if !is_prime(p) {
        return Err(Error::Input(format!("{p} is not a prime")));
    }
    let (al, u) = split_p(&class_int(a), p);
    let (be, v) = split_p(&class_int(b), p);
    if p == 2 {
        let eps = |x: &BigInt| u32::from(mod_u64(x, 4) == 3);
        let omega = |x: &BigInt| u32::from(matches!(mod_u64(x, 8), 3 | 5));
        let e = eps(&u) * eps(&v) + al * omega(&v) + be * omega(&u);
        return Ok(if e % 2 == 0 { 1 } else { -1 });
    }
    let mut s = if (al as u64 * be as u64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
    if be % 2 == 1 {
        s *= legendre(&u, p);
    }
    if al % 2 == 1 {
        s *= legendre(&v, p);
    }
    Ok(s)
}

/// Hasse invariant `prod_{i<j} (d_i, d_j)_v` of a diagonal form.
pub fn hasse(entries: &[Q], place: Place) -> Result<i32> {
    let mut s = 1;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            s *= hilbert_symbol(&entries[i], &entries[j], place)?;
        }
    }
    Ok(s)
}

/// Primes dividing a numerator or denominator of any entry, together with 2.
pub fn relevant_primes(entries: &[Q]) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::from([2u64]);
    for e in entries {
        for (p, _) in prime_factors(e.numer())? {
            out.insert(p);
        }
        for (p, _) in prime_factors(e.denom())? {
            out.insert(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittInvariants {
    pub rank: usize,
    pub signature: i64,
    /// Squarefree representative of the determinant's square class.
    pub discriminant: BigInt,
    pub hasse: BTreeMap<u64, i32>,
}

fn nonzero_diagonal(b: &BilinearSpace) -> Result<Vec<Q>> {
    let (_, d) = diagonalize(b)?;
    Ok(d.into_iter().filter(|x| !x.is_zero()).collect())
}

fn invariants_of(d: &[Q], primes: &BTreeSet<u64>) -> Result<WittInvariants> {
    let signature = d.iter().map(|x| if x.is_positive() { 1 } else { -1 }).sum();
    let det = d.iter().fold(Q::one(), |acc, x| acc * x);
    let mut h = BTreeMap::new();
    for &p in primes {
        h.insert(p, hasse(d, Place::Prime(p))?);
    }
    Ok(WittInvariants { rank: d.len(), signature, discriminant: squarefree_class(&det)?, hasse: h })
}

pub fn witt_invariants(b: &BilinearSpace) -> Result<WittInvariants> {
    require_symmetric(b)?;
    require_nondegenerate(b)?;
    let d = nonzero_diagonal(b)?;
    invariants_of(&d, &relevant_primes(&d)?)
}

/// Equality in W(Q) after removing radicals.
pub fn witt_equal(b1: &BilinearSpace, b2: &BilinearSpace) -> Result<bool> {
    require_symmetric(b1)?;
    require_symmetric(b2)?;
    let mut d1 = nonzero_diagonal(b1)?;
    let mut d2 = nonzero_diagonal(b2)?;
    if d1.len().abs_diff(d2.len()) % 2 == 1 {
        return Ok(false);
    }
    while d1.len() < d2.len() {
        d1.extend([q(1), q(-1)]);
    }
    while d2.len() < d1.len() {
        d2.extend([q(1), q(-1)]);
    }
    let mut primes = relevant_primes(&d1)?;
    primes.extend(relevant_primes(&d2)?);
    Ok(invariants_of(&d1, &primes)? == invariants_of(&d2, &primes)?)
}

/// Whether a nondegenerate symmetric form is Witt-trivial (hyperbolic).
pub fn is_hyperbolic(b: &BilinearSpace) -> Result<bool> {
    require_symmetric(b)?;
    require_nondegenerate(b)?;
    witt_equal(b, &BilinearSpace::empty(FormKind::Symmetric))
}

/// Basis `(a_1..a_m, a_1*..a_m*)` stored as the columns of one matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicBasis {
    pub basis: RatMatrix,
}

impl HyperbolicBasis {
    pub fn half(&self) -> usize {
        self.basis.cols() / 2
    }

    /// The isotropic half `a_1..a_m`.
    pub fn lagrangian(&self) -> RatMatrix {
        let idx: Vec<usize> = (0..self.half()).collect();
        self.basis.select_cols(&idx)
    }

    /// The standard block Gram matrix this basis should realize.
    pub fn expected_gram(m: usize, kind: FormKind) -> RatMatrix {
        let mut g = RatMatrix::zeros(2 * m, 2 * m);
        let s = if kind == FormKind::Symmetric { q(1) } else { q(-1) };
        for i in 0..m {
            g.set(i, m + i, q(1));
            g.set(m + i, i, s.clone());
        }
        g
    }

    pub fn verify(&self, b: &BilinearSpace) -> bool {
        b.restrict(&self.basis).gram == Self::expected_gram(self.half(), b.kind)
    }
}

/// Symplectic basis of a nondegenerate skew form with `b(a_i, a_i*) = 1`.
pub fn symplectic_basis(b: &BilinearSpace) -> Result<HyperbolicBasis> {
    if b.kind != FormKind::Skew {
        return Err(Error::Input("symplectic basis needs a skew form".into()));
    }
    require_nondegenerate(b)?;
    let n = b.dim();
    let mut rest: Vec<Vec<Q>> = (0..n).map(|i| unit_vec(n, i)).collect();
    let (mut us, mut vs) = (Vec::new(), Vec::new());
    while let Some(x) = rest.first().cloned() {
        let j = (1..rest.len())
            .find(|&j| !b.b(&x, &rest[j]).is_zero())
            .ok_or_else(|| Error::Internal("no partner in symplectic reduction".into()))?;
        let c = b.b(&x, &rest[j]);
        let v: Vec<Q> = rest[j].iter().map(|t| t / &c).collect();
        rest.remove(j);
        rest.remove(0);
        for w in rest.iter_mut() {
            let (wu, wv) = (b.b(w, &x), b.b(w, &v));
            for k in 0..n {
                let t = &w[k] - &wv * &x[k] + &wu * &v[k];
                w[k] = t;
            }
        }
        us.push(x);
        vs.push(v);
    }
    us.extend(vs);
    let hb = HyperbolicBasis { basis: RatMatrix::from_cols(&us, n) };
    if !hb.verify(b) {
        return Err(Error::Internal("symplectic basis failed Gram check".into()));
    }
    Ok(hb)
}

/// Completes an isotropic half-rank basis `v` (columns) to a hyperbolic basis.
pub fn hyperbolic_completion(b: &BilinearSpace, v: &RatMatrix) -> Result<HyperbolicBasis> {
    require_nondegenerate(b)?;
    let (n, m) = (b.dim(), v.cols());
    if v.rows() != n {
        return Err(Error::Input("isotropic basis has wrong length".into()));
    }
    if 2 * m != n {
        return Err(Error::Precondition(format!("need {} isotropic vectors for rank {n}, got {m}", n / 2)));
    }
    for i in 0..m {
        for j in i..m {
            if !b.b(&v.col(i), &v.col(j)).is_zero() {
                return Err(Error::Precondition(format!("b(v{i}, v{j}) != 0: not isotropic")));
            }
        }
    }
    if v.rank() != m {
        return Err(Error::Precondition("isotropic vectors are linearly dependent".into()));
    }
    let vg = v.transpose().mul(&b.gram);
    let mut w = Vec::new();
    for j in 0..m {
        let sol = vg
            .solve(&unit_vec(m, j))?
            .ok_or_else(|| Error::Internal("dual vector equations are inconsistent".into()))?;
        w.push(sol);
    }
    let half = crate::exactq::qf(1, 2);
    let corr = match b.kind {
        FormKind::Symmetric => -half,
        FormKind::Skew => half,
    };
    let gram_w: Vec<Vec<Q>> = (0..m).map(|i| (0..m).map(|j| b.b(&w[i], &w[j])).collect()).collect();
    let mut cols: Vec<Vec<Q>> = v.columns();
    for j in 0..m {
        let mut wj = w[j].clone();
        for k in 0..m {
            let c = &corr * &gram_w[k][j];
            if c.is_zero() {
                continue;
            }
            for (x, a) in wj.iter_mut().zip(v.col(k)) {
                *x += &c * a;
            }
        }
        cols.push(wj);
    }
    let hb = HyperbolicBasis { basis: RatMatrix::from_cols(&cols, n) };
    if !hb.verify(b) {
        return Err(Error::Internal("hyperbolic completion failed Gram check".into()));
    }
    Ok(hb)
}

#[derive(Clone, Debug, PartialEq)]
pub enum LagrangianSearch {
    /// Columns span a Lagrangian.
    Found(RatMatrix),
    /// The invariants show that no Lagrangian exists.
    NotHyperbolic,
    /// Hyperbolic, but no isotropic vector was found within the height bound.
    Undecided,
}

pub const DEFAULT_HEIGHT: i64 = 50;

pub fn find_lagrangian(b: &BilinearSpace) -> Result<LagrangianSearch> {
    find_lagrangian_bounded(b, DEFAULT_HEIGHT)
}

pub fn find_lagrangian_bounded(b: &BilinearSpace, height: i64) -> Result<LagrangianSearch> {
    require_nondegenerate(b)?;
    if b.kind == FormKind::Skew {
        return Ok(LagrangianSearch::Found(symplectic_basis(b)?.lagrangian()));
    }
    if !is_hyperbolic(b)? {
        return Ok(LagrangianSearch::NotHyperbolic);
    }
    let n = b.dim();
    let mut space = RatMatrix::identity(n);
    let mut found: Vec<Vec<Q>> = Vec::new();
    while space.cols() > 0 {
        let sub = b.restrict(&space);
        let Some(x) = isotropic_vector(&sub, height)? else {
            return Ok(LagrangianSearch::Undecided);
        };
        let xa = space.mul_vec(&x);
        // partner y with b(x, y) = 1, then pass to the orthogonal of the plane
        let row = sub.gram.mul_vec(&x);
        let k = row.iter().position(|t| !t.is_zero()).ok_or_else(|| Error::Internal("isotropic vector in radical".into()))?;
        let mut y = unit_vec(space.cols(), k);
        let c = &row[k];
        y.iter_mut().for_each(|t| *t /= c);
        let ya = space.mul_vec(&y);
        let cons = RatMatrix::from_rows(vec![b.gram.mul_vec(&xa), b.gram.mul_vec(&ya)], n).mul(&space);
        let ker = cons.kernel_basis();
        space = space.mul(&ker);
        found.push(xa);
    }
    Ok(LagrangianSearch::Found(RatMatrix::from_cols(&found, n)))
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (a, b) = (x.numer().sqrt(), x.denom().sqrt());
    if &(&a * &a) == x.numer() && &(&b * &b) == x.denom() {
        Some(Q::new(a, b))
    } else {
        None
    }
}

/// Nonzero isotropic vector of a nondegenerate symmetric form: diagonal pairs
/// first, then integer vectors of height at most `height` in the diagonal basis
/// with the last coordinate solved exactly.
fn isotropic_vector(b: &BilinearSpace, height: i64) -> Result<Option<Vec<Q>>> {
    let (p, d) = diagonalize(b)?;
    let r = d.len();
    for i in 0..r {
        for j in i + 1..r {
            if let Some(t) = rational_sqrt(&(-(&d[i] / &d[j]))) {
                let mut x = unit_vec(r, i);
                x[j] = t;
                return Ok(Some(p.mul_vec(&x)));
            }
        }
    }
    if r < 3 {
        return Ok(None);
    }
    let last = &d[r - 1];
    let m = r - 1;
    for h in 1..=height {
        let mut x = vec![-h; m];
        loop {
            if x.iter().any(|t| t.abs() == h) && x.iter().find(|t| **t != 0).is_some_and(|t| *t > 0) {
                let s: Q = x.iter().zip(&d).map(|(xi, di)| di * q(xi * xi)).sum();
                if let Some(t) = rational_sqrt(&(-(s / last))) {
                    let mut v: Vec<Q> = x.iter().map(|xi| q(*xi)).collect();
                    v.push(t);
                    return Ok(Some(p.mul_vec(&v)));
                }
            }
            let mut k = 0;
            while k < m && x[k] == h {
                x[k] = -h;
                k += 1;
            }
            if k == m {
                break;
            }
            x[k] += 1;
        }
    }
    Ok(None)
}
