//! Finite-type commutative differential graded algebras over Q.
//!
//! An algebra is stored degree by degree: a list of basis labels, the matrix of
//! `d^r : A^r -> A^{r+1}` acting on column vectors, and a sparse table of
//! structure constants. Everything above `top` is zero.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::exactq::{coordinate_map, fmt_q, is_zero_vec, q, unit_vec, RatMatrix, Q};
use crate::{Error, Result};

/// A homogeneous element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub deg: usize,
    pub v: Vec<Q>,
}

impl Element {
    pub fn new(deg: usize, v: Vec<Q>) -> Self {
        Element { deg, v }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.v)
    }

    pub fn scaled(&self, c: &Q) -> Element {
        Element { deg: self.deg, v: self.v.iter().map(|x| x * c).collect() }
    }

    pub fn plus(&self, other: &Element) -> Element {
        assert_eq!(self.deg, other.deg, "adding elements of different degree");
        Element { deg: self.deg, v: self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect() }
    }
}

/// (-1)^e as a rational.
pub fn sign(e: usize) -> Q {
    if e % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

type ProdKey = (usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Cdga {
    names: Vec<Vec<String>>,
    d: Vec<RatMatrix>,
    prod: HashMap<ProdKey, Vec<Q>>,
    unit: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.detail)
    }
}

/// Readable label for a vector in a given basis, e.g. `x-1/2*y`.
pub fn combo_name(names: &[String], v: &[Q]) -> String {
    let mut out = String::new();
    for (c, n) in v.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let neg = *c < Q::zero();
        let a = if neg { -c.clone() } else { c.clone() };
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if !a.is_one() {
            out.push_str(&fmt_q(&a));
            out.push('*');
        }
        out.push_str(n);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Column basis (reduced echelon) of the span of `vecs` inside Q^n.
pub fn span_basis(vecs: &[Vec<Q>], n: usize) -> RatMatrix {
    if vecs.is_empty() {
        return RatMatrix::zeros(n, 0);
    }
    let rr = RatMatrix::from_rows(vecs.to_vec(), n).rref();
    let rows: Vec<Vec<Q>> = (0..rr.rank).map(|i| rr.r.row(i).to_vec()).collect();
    RatMatrix::from_cols(&rows, n)
}

pub struct CdgaBuilder {
    names: Vec<Vec<String>>,
    d: Vec<RatMatrix>,
    prod: HashMap<ProdKey, Vec<Q>>,
    unit: (usize, usize),
}

impl CdgaBuilder {
    /// Starts an algebra with the given labels; the first degree-0 label is the unit.
    pub fn new(names: Vec<Vec<String>>) -> Self {
        let top = names.len().saturating_sub(1);
        let d = (0..=top)
            .map(|r| {
                let next = names.get(r + 1).map_or(0, |n| n.len());
                RatMatrix::zeros(next, names[r].len())
            })
            .collect();
        CdgaBuilder { names, d, prod: HashMap::new(), unit: (0, 0) }
    }

    pub fn find(&self, name: &str) -> Result<(usize, usize)> {
        for (r, ns) in self.names.iter().enumerate() {
            if let Some(i) = ns.iter().position(|n| n == name) {
                return Ok((r, i));
            }
        }
        Err(Error::Input(format!("unknown basis element '{name}'")))
    }

    pub fn set_unit(&mut self, idx: usize) {
        self.unit = (0, idx);
    }

    pub fn set_d(&mut self, r: usize, row: usize, col: usize, v: Q) -> Result<()> {
        let m = self
            .d
            .get_mut(r)
            .ok_or_else(|| Error::Input(format!("differential entry in degree {r} above top")))?;
        if row >= m.rows() || col >= m.cols() {
            return Err(Error::Input(format!("differential entry ({r},{row},{col}) out of range")));
        }
        m.set(row, col, v);
        Ok(())
    }

    /// Sets `d(src) = sum of coefficient * target`.
    pub fn set_d_named(&mut self, src: &str, terms: &[(&str, Q)]) -> Result<()> {
        let (r, c) = self.find(src)?;
        for (t, v) in terms {
            let (rt, row) = self.find(t)?;
            if rt != r + 1 {
                return Err(Error::Input(format!("d({src}) term {t} has wrong degree")));
            }
            self.set_d(r, row, c, v.clone())?;
        }
        Ok(())
    }

    pub fn set_product(&mut self, i: usize, a: usize, j: usize, b: usize, v: Vec<Q>) {
        self.prod.insert((i, a, j, b), v);
    }

    pub fn set_product_named(&mut self, x: &str, y: &str, terms: &[(&str, Q)]) -> Result<()> {
        let (i, a) = self.find(x)?;
        let (j, b) = self.find(y)?;
        let deg = i + j;
        let len = self.names.get(deg).map_or(0, |n| n.len());
        let mut v = vec![Q::zero(); len];
        for (t, c) in terms {
            let (rt, k) = self.find(t)?;
            if rt != deg {
                return Err(Error::Input(format!("product {x}*{y} term {t} has wrong degree")));
            }
            v[k] += c;
        }
        self.set_product(i, a, j, b, v);
        Ok(())
    }

    /// Fills in unit products and graded-commutative partners that were left out.
    pub fn build(mut self) -> Cdga {
        let (_, u) = self.unit;
        let top = self.names.len().saturating_sub(1);
        let keys: Vec<ProdKey> = self.prod.keys().cloned().collect();
        for (i, a, j, b) in keys {
            if !self.prod.contains_key(&(j, b, i, a)) {
                let v: Vec<Q> = self.prod[&(i, a, j, b)].iter().map(|x| x * sign(i * j)).collect();
                self.prod.insert((j, b, i, a), v);
            }
        }
        for r in 0..=top {
            for k in 0..self.names[r].len() {
                let e = unit_vec(self.names[r].len(), k);
                self.prod.entry((0, u, r, k)).or_insert_with(|| e.clone());
                self.prod.entry((r, k, 0, u)).or_insert(e);
            }
        }
        self.prod.retain(|_, v| !is_zero_vec(v));
        let unit = unit_vec(self.names.first().map_or(0, |n| n.len()), u);
        Cdga { names: self.names, d: self.d, prod: self.prod, unit }
    }
}

impl Cdga {
    /// Assembles an algebra from raw parts, checking only shapes.
    pub fn from_parts(
        names: Vec<Vec<String>>,
        d: Vec<RatMatrix>,
        prod: HashMap<ProdKey, Vec<Q>>,
        unit: Vec<Q>,
    ) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Input("algebra needs degree 0".into()));
        }
        let top = names.len() - 1;
        if d.len() != top + 1 {
            return Err(Error::Input("one differential matrix per degree expected".into()));
        }
        for r in 0..=top {
            let next = if r < top { names[r + 1].len() } else { 0 };
            if d[r].rows() != next || d[r].cols() != names[r].len() {
                return Err(Error::Input(format!("differential in degree {r} has wrong shape")));
            }
        }
        if unit.len() != names[0].len() {
            return Err(Error::Input("unit has wrong length".into()));
        }
        for (&(i, a, j, b), v) in &prod {
            let ok = i <= top
                && j <= top
                && a < names[i].len()
                && b < names[j].len()
                && (i + j > top || v.len() == names[i + j].len());
            if !ok {
                return Err(Error::Input(format!("bad product entry ({i},{a},{j},{b})")));
            }
        }
        let mut prod = prod;
        prod.retain(|&(i, _, j, _), v| i + j <= top && !is_zero_vec(v));
        Ok(Cdga { names, d, prod, unit })
    }

    /// The ground field Q concentrated in degree 0.
    pub fn ground() -> Self {
        CdgaBuilder::new(vec![vec!["1".into()]]).build()
    }

    /// The zero algebra (no basis at all, unit zero).
    pub fn zero() -> Self {
        Cdga { names: vec![vec![]], d: vec![RatMatrix::zeros(0, 0)], prod: HashMap::new(), unit: vec![] }
    }

    pub fn top(&self) -> usize {
        self.names.len() - 1
    }

    pub fn dim(&self, r: usize) -> usize {
        self.names.get(r).map_or(0, |n| n.len())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.names.iter().map(|n| n.len()).collect()
    }

    pub fn names(&self, r: usize) -> &[String] {
        self.names.get(r).map_or(&[], |n| n.as_slice())
    }

    /// Matrix of `d^r`, shape `dim(r+1) x dim(r)`.
    pub fn d(&self, r: usize) -> RatMatrix {
        match self.d.get(r) {
            Some(m) => m.clone(),
            None => RatMatrix::zeros(self.dim(r + 1), self.dim(r)),
        }
    }

    pub fn apply_d(&self, r: usize, v: &[Q]) -> Vec<Q> {
        match self.d.get(r) {
            Some(m) => m.mul_vec(v),
            None => vec![Q::zero(); self.dim(r + 1)],
        }
    }

    pub fn d_elem(&self, x: &Element) -> Element {
        Element::new(x.deg + 1, self.apply_d(x.deg, &x.v))
    }

    pub fn unit(&self) -> &[Q] {
        &self.unit
    }

    pub fn unit_elem(&self) -> Element {
        Element::new(0, self.unit.clone())
    }

    pub fn basis_product(&self, i: usize, a: usize, j: usize, b: usize) -> Option<&Vec<Q>> {
        self.prod.get(&(i, a, j, b))
    }

    /// Product of `x` in degree `i` and `y` in degree `j`.
    pub fn mul(&self, i: usize, x: &[Q], j: usize, y: &[Q]) -> Vec<Q> {
        let n = self.dim(i + j);
        let mut out = vec![Q::zero(); n];
        if i + j > self.top() {
            return out;
        }
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                if let Some(p) = self.prod.get(&(i, a, j, b)) {
                    let c = xa * yb;
                    for (o, pv) in out.iter_mut().zip(p) {
                        if !pv.is_zero() {
                            *o += &c * pv;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn mul_e(&self, x: &Element, y: &Element) -> Element {
        Element::new(x.deg + y.deg, self.mul(x.deg, &x.v, y.deg, &y.v))
    }

    pub fn find(&self, name: &str) -> Option<(usize, usize)> {
        for (r, ns) in self.names.iter().enumerate() {
            if let Some(i) = ns.iter().position(|n| n == name) {
                return Some((r, i));
            }
        }
        None
    }

    pub fn basis_elem(&self, r: usize, i: usize) -> Element {
        Element::new(r, unit_vec(self.dim(r), i))
    }

    pub fn elem(&self, name: &str) -> Result<Element> {
        let (r, i) = self
            .find(name)
            .ok_or_else(|| Error::Input(format!("unknown basis element '{name}'")))?;
        Ok(self.basis_elem(r, i))
    }

    /// Linear combination of named basis elements, all of one degree.
    pub fn combo(&self, terms: &[(&str, Q)]) -> Result<Element> {
        let mut out: Option<Element> = None;
        for (n, c) in terms {
            let e = self.elem(n)?.scaled(c);
            out = Some(match out {
                None => e,
                Some(o) if o.deg == e.deg => o.plus(&e),
                Some(_) => return Err(Error::Input("inhomogeneous combination".into())),
            });
        }
        out.ok_or_else(|| Error::Input("empty combination".into()))
    }

    pub fn label(&self, x: &Element) -> String {
        combo_name(self.names(x.deg), &x.v)
    }

    pub fn complex(&self) -> Complex {
        Complex::new((0..=self.top()).map(|r| self.d(r)).collect())
    }

    /// Every violated axiom, with the offending basis tuple.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let top = self.top();
        let nm = |r: usize, a: usize| self.names[r][a].clone();
        for r in 0..top {
            let dd = self.d(r + 1).mul(&self.d(r));
            for c in 0..self.dim(r) {
                if !is_zero_vec(&dd.col(c)) {
                    out.push(Violation { axiom: "d^2 = 0", detail: format!("d(d({})) != 0", nm(r, c)) });
                }
            }
        }
        if self.dim(0) == 0 {
            if self.names.iter().any(|n| !n.is_empty()) {
                out.push(Violation { axiom: "unit", detail: "no degree-0 part".into() });
            }
            return out;
        }
        if !is_zero_vec(&self.apply_d(0, &self.unit)) {
            out.push(Violation { axiom: "unit", detail: "d(1) != 0".into() });
        }
        for r in 0..=top {
            for a in 0..self.dim(r) {
                let e = unit_vec(self.dim(r), a);
                if self.mul(0, &self.unit, r, &e) != e {
                    out.push(Violation { axiom: "unit", detail: format!("1*{} != {}", nm(r, a), nm(r, a)) });
                }
            }
        }
        for i in 0..=top {
            for j in i..=top - i.min(top) {
                if i + j > top {
                    break;
                }
                for a in 0..self.dim(i) {
                    let x = unit_vec(self.dim(i), a);
                    for b in 0..self.dim(j) {
                        let y = unit_vec(self.dim(j), b);
                        let xy = self.mul(i, &x, j, &y);
                        let yx = self.mul(j, &y, i, &x);
                        let s = sign(i * j);
                        if xy.iter().zip(&yx).any(|(p, r)| *p != &s * r) {
                            out.push(Violation {
                                axiom: "graded commutativity",
                                detail: format!("{}*{} vs {}*{}", nm(i, a), nm(j, b), nm(j, b), nm(i, a)),
                            });
                        }
                    }
                }
            }
        }
        for i in 0..=top {
            for j in 0..=top {
                if i + j + 1 > top {
                    continue;
                }
                for a in 0..self.dim(i) {
                    let x = unit_vec(self.dim(i), a);
                    let dx = self.apply_d(i, &x);
                    for b in 0..self.dim(j) {
                        let y = unit_vec(self.dim(j), b);
                        let dy = self.apply_d(j, &y);
                        let lhs = self.apply_d(i + j, &self.mul(i, &x, j, &y));
                        let t1 = self.mul(i + 1, &dx, j, &y);
                        let t2 = self.mul(i, &x, j + 1, &dy);
                        let s = sign(i);
                        let bad = lhs.iter().zip(t1.iter().zip(&t2)).any(|(l, (p, r))| *l != p + &s * r);
                        if bad {
                            out.push(Violation {
                                axiom: "Leibniz",
                                detail: format!("d({}*{})", nm(i, a), nm(j, b)),
                            });
                        }
                    }
                }
            }
        }
        for i in 1..=top {
            for j in 1..=top {
                for k in 1..=top {
                    if i + j + k > top {
                        continue;
                    }
                    for a in 0..self.dim(i) {
                        let x = unit_vec(self.dim(i), a);
                        for b in 0..self.dim(j) {
                            let y = unit_vec(self.dim(j), b);
                            let xy = self.mul(i, &x, j, &y);
                            let yz_cache: Vec<Vec<Q>> = (0..self.dim(k))
                                .map(|c| self.mul(j, &y, k, &unit_vec(self.dim(k), c)))
                                .collect();
                            for (c, yz) in yz_cache.iter().enumerate() {
                                let z = unit_vec(self.dim(k), c);
                                if self.mul(i + j, &xy, k, &z) != self.mul(i, &x, j + k, yz) {
                                    out.push(Violation {
                                        axiom: "associativity",
                                        detail: format!("({}*{})*{}", nm(i, a), nm(j, b), nm(k, c)),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        match v.first() {
            None => Ok(()),
            Some(first) => Err(Error::Input(format!("invalid CDGA ({} violations), first: {first}", v.len()))),
        }
    }

    /// Cohomology with representatives; validates first.
    pub fn cohomology(&self) -> Result<Cohomology> {
        self.ensure_valid()?;
        Ok(self.complex().cohomology())
    }

    pub fn betti(&self) -> Vec<usize> {
        self.complex().cohomology().betti()
    }

    /// Quotient by everything above `top`.
    pub fn truncated(&self, top: usize) -> Cdga {
        if top >= self.top() {
            return self.clone();
        }
        let names = self.names[..=top].to_vec();
        let mut d: Vec<RatMatrix> = self.d[..=top].to_vec();
        d[top] = RatMatrix::zeros(0, self.dim(top));
        let prod = self.prod.iter().filter(|(k, _)| k.0 + k.2 <= top).map(|(k, v)| (*k, v.clone())).collect();
        Cdga { names, d, prod, unit: self.unit.clone() }
    }

    /// Basis of `A ⊗ Λ(v)` up to `top`, as (power of v, base degree, base index) per degree.
    pub fn extension_layout(&self, deg: usize, top: usize) -> Vec<Vec<(usize, usize, usize)>> {
        let odd = deg % 2 == 1;
        let mut layout = vec![Vec::new(); top + 1];
        for (r, slot) in layout.iter_mut().enumerate() {
            let mut i = 0;
            while i * deg <= r && (!odd || i <= 1) {
                let p = r - i * deg;
                for a in 0..self.dim(p) {
                    slot.push((i, p, a));
                }
                i += 1;
            }
        }
        layout
    }

    /// Relative extension `A ⊗ Λ(v)` with `dv` a cocycle of degree `deg + 1`,
    /// truncated above `top`.
    pub fn extend(&self, name: &str, deg: usize, dv: &[Q], top: usize) -> Result<Cdga> {
        if deg == 0 {
            return Err(Error::Input("generators must have positive degree".into()));
        }
        if dv.len() != self.dim(deg + 1) {
            return Err(Error::Input(format!("d({name}) has wrong length")));
        }
        if !is_zero_vec(&self.apply_d(deg + 1, dv)) {
            return Err(Error::Input(format!("d({name}) is not a cocycle")));
        }
        let odd = deg % 2 == 1;
        let layout = self.extension_layout(deg, top);
        let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut names: Vec<Vec<String>> = vec![Vec::new(); top + 1];
        for (r, slot) in layout.iter().enumerate() {
            for (k, &(i, p, a)) in slot.iter().enumerate() {
                index.insert((i, p, a), k);
                let base = &self.names[p][a];
                let pw = if i == 1 { name.to_string() } else { format!("{name}^{i}") };
                names[r].push(match (i, base.as_str()) {
                    (0, _) => base.clone(),
                    (_, "1") => pw,
                    _ => format!("{base}*{pw}"),
                });
            }
        }
        let dims: Vec<usize> = names.iter().map(|n| n.len()).collect();
        let mut d: Vec<RatMatrix> =
            (0..=top).map(|r| RatMatrix::zeros(if r < top { dims[r + 1] } else { 0 }, dims[r])).collect();
        for r in 0..top {
            for (col, &(i, p, a)) in layout[r].iter().enumerate() {
                let x = unit_vec(self.dim(p), a);
                let dx = self.apply_d(p, &x);
                for (c, val) in dx.iter().enumerate() {
                    if !val.is_zero() {
                        let row = index[&(i, p + 1, c)];
                        let cur = d[r].get(row, col).clone();
                        d[r].set(row, col, cur + val);
                    }
                }
                if i >= 1 {
                    let xdv = self.mul(p, &x, deg + 1, dv);
                    let f = sign(p) * q(i as i64);
                    for (c, val) in xdv.iter().enumerate() {
                        if !val.is_zero() {
                            let row = index[&(i - 1, p + deg + 1, c)];
                            let cur = d[r].get(row, col).clone();
                            d[r].set(row, col, cur + &f * val);
                        }
                    }
                }
            }
        }
        let mut prod = HashMap::new();
        for r1 in 0..=top {
            for (c1, &(i, p, a)) in layout[r1].iter().enumerate() {
                for r2 in 0..=top - r1 {
                    for (c2, &(j, qd, b)) in layout[r2].iter().enumerate() {
                        if odd && i + j > 1 {
                            continue;
                        }
                        let Some(xy) = self.prod.get(&(p, a, qd, b)) else { continue };
                        let s = sign(i * deg * qd);
                        let mut v = vec![Q::zero(); dims[r1 + r2]];
                        for (c, val) in xy.iter().enumerate() {
                            if !val.is_zero() {
                                v[index[&(i + j, p + qd, c)]] += &s * val;
                            }
                        }
                        if !is_zero_vec(&v) {
                            prod.insert((r1, c1, r2, c2), v);
                        }
                    }
                }
            }
        }
        let mut unit = vec![Q::zero(); dims[0]];
        for (a, u) in self.unit.iter().enumerate() {
            unit[index[&(0, 0, a)]] = u.clone();
        }
        Ok(Cdga { names, d, prod, unit })
    }

    /// Free graded-commutative algebra on the generators with zero differential, truncated.
    pub fn free(gens: &[(&str, usize)], top: usize) -> Result<Cdga> {
        let mut a = Cdga::ground();
        for (n, deg) in gens {
            let dv = vec![Q::zero(); a.dim(deg + 1)];
            a = a.extend(n, *deg, &dv, top)?;
        }
        Ok(a)
    }

    /// Product algebra `A_1 x ... x A_k` with block-diagonal differential.
    /// Labels get a `@i` suffix when there is more than one factor.
    pub fn direct_sum(parts: &[Cdga]) -> Cdga {
        if parts.len() == 1 {
            return parts[0].clone();
        }
        if parts.is_empty() {
            return Cdga::zero();
        }
        let top = parts.iter().map(|p| p.top()).max().unwrap_or(0);
        let offs = |r: usize| -> Vec<usize> {
            let mut o = Vec::new();
            let mut s = 0;
            for p in parts {
                o.push(s);
                s += p.dim(r);
            }
            o
        };
        let mut names = vec![Vec::new(); top + 1];
        for (k, p) in parts.iter().enumerate() {
            for (r, slot) in names.iter_mut().enumerate() {
                for n in p.names(r) {
                    slot.push(format!("{n}@{}", k + 1));
                }
            }
        }
        let dims: Vec<usize> = names.iter().map(|n| n.len()).collect();
        let mut d = Vec::new();
        for r in 0..=top {
            let rows = if r < top { dims[r + 1] } else { 0 };
            let mut m = RatMatrix::zeros(rows, dims[r]);
            let (o0, o1) = (offs(r), offs(r + 1));
            for (k, p) in parts.iter().enumerate() {
                if r >= p.top() {
                    continue;
                }
                let pd = p.d(r);
                for i in 0..pd.rows() {
                    for j in 0..pd.cols() {
                        m.set(o1[k] + i, o0[k] + j, pd.get(i, j).clone());
                    }
                }
            }
            d.push(m);
        }
        let mut prod = HashMap::new();
        for (k, p) in parts.iter().enumerate() {
            for (&(i, a, j, b), v) in &p.prod {
                let mut w = vec![Q::zero(); dims[i + j]];
                let o = offs(i + j)[k];
                for (c, x) in v.iter().enumerate() {
                    w[o + c] = x.clone();
                }
                prod.insert((i, offs(i)[k] + a, j, offs(j)[k] + b), w);
            }
        }
        let mut unit = Vec::new();
        for p in parts {
            unit.extend(p.unit.iter().cloned());
        }
        Cdga { names, d, prod, unit }
    }

    /// Algebra obtained by an invertible change of basis in each degree:
    /// column `j` of `basis[r]` becomes the new basis vector `j`.
    pub fn rebased(&self, basis: &[RatMatrix]) -> Result<Cdga> {
        let top = self.top();
        let inv: Vec<RatMatrix> = basis
            .iter()
            .map(|b| b.inverse().ok_or_else(|| Error::Input("change of basis is singular".into())))
            .collect::<Result<_>>()?;
        let d = (0..=top)
            .map(|r| if r < top { inv[r + 1].mul(&self.d(r)).mul(&basis[r]) } else { self.d(r) })
            .collect();
        let mut prod = HashMap::new();
        for i in 0..=top {
            for j in 0..=top - i {
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let v = self.mul(i, &basis[i].col(a), j, &basis[j].col(b));
                        let w = inv[i + j].mul_vec(&v);
                        if !is_zero_vec(&w) {
                            prod.insert((i, a, j, b), w);
                        }
                    }
                }
            }
        }
        let names = (0..=top)
            .map(|r| (0..self.dim(r)).map(|a| combo_name(self.names(r), &basis[r].col(a))).collect())
            .collect();
        let unit = inv[0].mul_vec(&self.unit);
        Cdga::from_parts(names, d, prod, unit)
    }
}

/// A bounded cochain complex: `d[r]` maps degree r to degree r+1.
#[derive(Clone, Debug)]
pub struct Complex {
    pub d: Vec<RatMatrix>,
}

#[derive(Clone, Debug)]
pub struct CohomDegree {
    /// Columns are cocycles representing a basis of H^r.
    pub reps: RatMatrix,
    /// Maps a cocycle to its coordinates in the `reps` basis.
    pub proj: RatMatrix,
    pub cocycles: RatMatrix,
    pub boundaries: RatMatrix,
}

impl CohomDegree {
    pub fn dim(&self) -> usize {
        self.reps.cols()
    }
}

#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degrees: Vec<CohomDegree>,
}

impl Complex {
    pub fn new(d: Vec<RatMatrix>) -> Self {
        Complex { d }
    }

    pub fn dim(&self, r: usize) -> usize {
        self.d.get(r).map_or(0, |m| m.cols())
    }

    pub fn top(&self) -> usize {
        self.d.len().saturating_sub(1)
    }

    pub fn d(&self, r: usize) -> RatMatrix {
        match self.d.get(r) {
            Some(m) => m.clone(),
            None => RatMatrix::zeros(self.dim(r + 1), self.dim(r)),
        }
    }

    pub fn is_complex(&self) -> bool {
        (1..self.d.len()).all(|r| self.d[r].mul(&self.d[r - 1]).is_zero())
    }

    /// Representatives complete the coboundaries inside the cocycles greedily,
    /// scanning the kernel basis in order.
    pub fn cohomology(&self) -> Cohomology {
        let mut degrees = Vec::new();
        for r in 0..self.d.len() {
            let n = self.dim(r);
            let z = self.d[r].kernel_basis();
            let b = if r == 0 { RatMatrix::zeros(n, 0) } else { self.d[r - 1].col_space() };
            let add = crate::exactq::extend_basis(&b, &z);
            let reps = z.select_cols(&add);
            let full = b.hstack(&reps);
            let coords = coordinate_map(&full);
            let idx: Vec<usize> = (b.cols()..full.cols()).collect();
            let proj = coords.select_rows(&idx);
            degrees.push(CohomDegree { reps, proj, cocycles: z, boundaries: b });
        }
        Cohomology { degrees }
    }
}

impl Cohomology {
    pub fn dim(&self, r: usize) -> usize {
        self.degrees.get(r).map_or(0, |c| c.dim())
    }

    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|c| c.dim()).collect()
    }

    pub fn top(&self) -> usize {
        self.degrees.len().saturating_sub(1)
    }

    /// Coordinates of the class of a cocycle.
    pub fn class_of(&self, r: usize, v: &[Q]) -> Vec<Q> {
        match self.degrees.get(r) {
            Some(c) => c.proj.mul_vec(v),
            None => Vec::new(),
        }
    }

    pub fn rep(&self, r: usize, coords: &[Q]) -> Vec<Q> {
        match self.degrees.get(r) {
            Some(c) => c.reps.mul_vec(coords),
            None => Vec::new(),
        }
    }

    pub fn rep_col(&self, r: usize, i: usize) -> Vec<Q> {
        self.degrees[r].reps.col(i)
    }

    pub fn is_cocycle(&self, r: usize, v: &[Q]) -> bool {
        match self.degrees.get(r) {
            Some(c) => c.cocycles.solve(v).ok().flatten().is_some(),
            None => true,
        }
    }

    pub fn is_coboundary(&self, r: usize, v: &[Q]) -> bool {
        match self.degrees.get(r) {
            Some(c) => c.boundaries.solve(v).ok().flatten().is_some(),
            None => true,
        }
    }
}

/// Matrices of the map induced in cohomology by the chain map `f`.
pub fn induced_map(src: &Cohomology, tgt: &Cohomology, f: &dyn Fn(usize) -> RatMatrix) -> Vec<RatMatrix> {
    let top = src.top().max(tgt.top());
    (0..=top)
        .map(|r| {
            let (hs, ht) = (src.dim(r), tgt.dim(r));
            if hs == 0 || ht == 0 {
                return RatMatrix::zeros(ht, hs);
            }
            tgt.degrees[r].proj.mul(&f(r)).mul(&src.degrees[r].reps)
        })
        .collect()
}

/// Per-degree column bases of a graded subspace of some algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSubspace {
    pub basis: Vec<RatMatrix>,
}

impl GradedSubspace {
    pub fn zero(a: &Cdga) -> Self {
        GradedSubspace { basis: (0..=a.top()).map(|r| RatMatrix::zeros(a.dim(r), 0)).collect() }
    }

    pub fn full(a: &Cdga) -> Self {
        GradedSubspace { basis: (0..=a.top()).map(|r| RatMatrix::identity(a.dim(r))).collect() }
    }

    pub fn dim(&self, r: usize) -> usize {
        self.basis.get(r).map_or(0, |b| b.cols())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.cols()).collect()
    }

    pub fn contains(&self, r: usize, v: &[Q]) -> bool {
        if is_zero_vec(v) {
            return true;
        }
        match self.basis.get(r) {
            Some(b) => b.solve(v).ok().flatten().is_some(),
            None => false,
        }
    }

    /// The differential restricted to this subspace, in its own basis.
    pub fn complex(&self, a: &Cdga) -> Complex {
        let top = self.basis.len() - 1;
        let d = (0..=top)
            .map(|r| {
                if r == top || self.dim(r + 1) == 0 {
                    return RatMatrix::zeros(self.dim(r + 1), self.dim(r));
                }
                let c = coordinate_map(&self.basis[r + 1]);
                c.mul(&a.d(r)).mul(&self.basis[r])
            })
            .collect();
        Complex::new(d)
    }
}

/// Smallest graded ideal closed under d containing the generators: `A·(S ∪ dS)`.
pub fn differential_ideal(a: &Cdga, gens: &[Element]) -> Result<GradedSubspace> {
    let top = a.top();
    let mut seeds = Vec::new();
    for g in gens {
        if g.v.len() != a.dim(g.deg) {
            return Err(Error::Input(format!("generator of degree {} has wrong length", g.deg)));
        }
        seeds.push(g.clone());
        seeds.push(a.d_elem(g));
    }
    let mut vecs: Vec<Vec<Vec<Q>>> = vec![Vec::new(); top + 1];
    for s in seeds.iter().filter(|s| s.deg <= top && !s.is_zero()) {
        for j in 0..=top - s.deg {
            for b in 0..a.dim(j) {
                let p = a.mul(j, &unit_vec(a.dim(j), b), s.deg, &s.v);
                if !is_zero_vec(&p) {
                    vecs[s.deg + j].push(p);
                }
            }
        }
    }
    Ok(GradedSubspace { basis: (0..=top).map(|r| span_basis(&vecs[r], a.dim(r))).collect() })
}

/// First failure of the ideal axioms, if any.
pub fn ideal_defect(a: &Cdga, i: &GradedSubspace) -> Option<String> {
    let top = a.top();
    for r in 0..=top {
        for c in 0..i.dim(r) {
            let v = i.basis[r].col(c);
            if r < top && !i.contains(r + 1, &a.apply_d(r, &v)) {
                return Some(format!("not closed under d in degree {r}"));
            }
            for j in 0..=top - r {
                for b in 0..a.dim(j) {
                    let p = a.mul(j, &unit_vec(a.dim(j), b), r, &v);
                    if !i.contains(r + j, &p) {
                        return Some(format!("not closed under multiplication by {}", a.names(j)[b]));
                    }
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct CdgaMorphism {
    pub source: Cdga,
    pub target: Cdga,
    /// `maps[r]` has shape `target.dim(r) x source.dim(r)`.
    pub maps: Vec<RatMatrix>,
}

impl CdgaMorphism {
    pub fn new(source: Cdga, target: Cdga, maps: Vec<RatMatrix>) -> Result<Self> {
        for (r, m) in maps.iter().enumerate() {
            if m.rows() != target.dim(r) || m.cols() != source.dim(r) {
                return Err(Error::Input(format!("morphism matrix in degree {r} has wrong shape")));
            }
        }
        Ok(CdgaMorphism { source, target, maps })
    }

    pub fn identity(a: &Cdga) -> Self {
        let maps = (0..=a.top()).map(|r| RatMatrix::identity(a.dim(r))).collect();
        CdgaMorphism { source: a.clone(), target: a.clone(), maps }
    }

    pub fn map(&self, r: usize) -> RatMatrix {
        match self.maps.get(r) {
            Some(m) => m.clone(),
            None => RatMatrix::zeros(self.target.dim(r), self.source.dim(r)),
        }
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element::new(x.deg, self.map(x.deg).mul_vec(&x.v))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CdgaMorphism) -> CdgaMorphism {
        let top = self.source.top();
        let maps = (0..=top).map(|r| other.map(r).mul(&self.map(r))).collect();
        CdgaMorphism { source: self.source.clone(), target: other.target.clone(), maps }
    }

    pub fn is_surjective(&self, r: usize) -> bool {
        self.map(r).rank() == self.target.dim(r)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let (s, t) = (&self.source, &self.target);
        let mut out = Vec::new();
        let top = s.top().max(t.top());
        for r in 0..=top {
            let lhs = self.map(r + 1).mul(&s.d(r));
            let rhs = t.d(r).mul(&self.map(r));
            if lhs != rhs {
                out.push(Violation { axiom: "chain map", detail: format!("f d != d f in degree {r}") });
            }
        }
        if self.map(0).mul_vec(s.unit()) != t.unit() {
            out.push(Violation { axiom: "unit", detail: "f(1) != 1".into() });
        }
        for i in 0..=s.top() {
            for j in i..=s.top() {
                if i + j > s.top() && i + j > t.top() {
                    continue;
                }
                for a in 0..s.dim(i) {
                    let x = unit_vec(s.dim(i), a);
                    let fx = self.map(i).mul_vec(&x);
                    for b in 0..s.dim(j) {
                        let y = unit_vec(s.dim(j), b);
                        let lhs = self.map(i + j).mul_vec(&s.mul(i, &x, j, &y));
                        let rhs = t.mul(i, &fx, j, &self.map(j).mul_vec(&y));
                        let rhs = if rhs.len() == lhs.len() { rhs } else { vec![Q::zero(); lhs.len()] };
                        if lhs != rhs {
                            out.push(Violation {
                                axiom: "multiplicative",
                                detail: format!("f({}*{})", s.names(i)[a], s.names(j)[b]),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn induced(&self) -> Vec<RatMatrix> {
        let hs = self.source.complex().cohomology();
        let ht = self.target.complex().cohomology();
        induced_map(&hs, &ht, &|r| self.map(r))
    }
}

/// Matrices of `H^r(f)` in the chosen representative bases.
pub fn induced_cohomology_map(f: &CdgaMorphism) -> Vec<RatMatrix> {
    f.induced()
}

/// Sub-algebra spanned by a graded subspace closed under d and products and containing 1.
pub fn subalgebra(a: &Cdga, s: &GradedSubspace) -> Result<(Cdga, CdgaMorphism)> {
    let top = a.top();
    if !s.contains(0, a.unit()) {
        return Err(Error::Input("subalgebra must contain the unit".into()));
    }
    let coords: Vec<RatMatrix> = (0..=top).map(|r| coordinate_map(&s.basis[r])).collect();
    let names: Vec<Vec<String>> = (0..=top)
        .map(|r| (0..s.dim(r)).map(|c| combo_name(a.names(r), &s.basis[r].col(c))).collect())
        .collect();
    let mut d = Vec::new();
    for r in 0..=top {
        let rows = if r < top { s.dim(r + 1) } else { 0 };
        if rows == 0 {
            d.push(RatMatrix::zeros(rows, s.dim(r)));
            continue;
        }
        let img = a.d(r).mul(&s.basis[r]);
        for c in 0..img.cols() {
            if !s.contains(r + 1, &img.col(c)) {
                return Err(Error::Input(format!("subspace not closed under d in degree {r}")));
            }
        }
        d.push(coords[r + 1].mul(&img));
    }
    let mut prod = HashMap::new();
    for i in 0..=top {
        for j in 0..=top - i {
            for x in 0..s.dim(i) {
                let xv = s.basis[i].col(x);
                for y in 0..s.dim(j) {
                    let p = a.mul(i, &xv, j, &s.basis[j].col(y));
                    if is_zero_vec(&p) {
                        continue;
                    }
                    if !s.contains(i + j, &p) {
                        return Err(Error::Input("subspace not closed under multiplication".into()));
                    }
                    prod.insert((i, x, j, y), coords[i + j].mul_vec(&p));
                }
            }
        }
    }
    let unit = coords[0].mul_vec(a.unit());
    let sub = Cdga::from_parts(names, d, prod, unit)?;
    let inc = CdgaMorphism { source: sub.clone(), target: a.clone(), maps: s.basis.clone() };
    Ok((sub, inc))
}

/// `A/I` together with the projection.
pub fn quotient(a: &Cdga, i: &GradedSubspace) -> Result<(Cdga, CdgaMorphism)> {
    if let Some(why) = ideal_defect(a, i) {
        return Err(Error::Input(format!("not a differential ideal: {why}")));
    }
    let top = a.top();
    let mut keep = Vec::new();
    let mut proj = Vec::new();
    for r in 0..=top {
        let extra = crate::exactq::complement_std(&i.basis[r]);
        let full = i.basis[r].hstack(&RatMatrix::identity(a.dim(r)).select_cols(&extra));
        let coords = coordinate_map(&full);
        let idx: Vec<usize> = (i.dim(r)..full.cols()).collect();
        proj.push(coords.select_rows(&idx));
        keep.push(extra);
    }
    let names: Vec<Vec<String>> =
        (0..=top).map(|r| keep[r].iter().map(|&k| a.names(r)[k].clone()).collect()).collect();
    let d = (0..=top)
        .map(|r| {
            if r == top {
                RatMatrix::zeros(0, keep[r].len())
            } else {
                proj[r + 1].mul(&a.d(r)).mul(&RatMatrix::identity(a.dim(r)).select_cols(&keep[r]))
            }
        })
        .collect();
    let mut prod = HashMap::new();
    for x in 0..=top {
        for y in 0..=top - x {
            for (ci, &ka) in keep[x].iter().enumerate() {
                for (cj, &kb) in keep[y].iter().enumerate() {
                    if let Some(p) = a.basis_product(x, ka, y, kb) {
                        let w = proj[x + y].mul_vec(p);
                        if !is_zero_vec(&w) {
                            prod.insert((x, ci, y, cj), w);
                        }
                    }
                }
            }
        }
    }
    let unit = proj[0].mul_vec(a.unit());
    let quo = Cdga::from_parts(names, d, prod, unit)?;
    let p = CdgaMorphism { source: a.clone(), target: quo.clone(), maps: proj };
    Ok((quo, p))
}

/// The sub-CDGA `Q·1 ⊕ I` with its inclusion.
pub fn unital_ideal(a: &Cdga, i: &GradedSubspace) -> Result<(Cdga, CdgaMorphism)> {
    if i.dim(0) != 0 {
        return Err(Error::Input("ideal meets degree 0".into()));
    }
    if let Some(why) = ideal_defect(a, i) {
        return Err(Error::Input(format!("not a differential ideal: {why}")));
    }
    let mut s = i.clone();
    s.basis[0] = RatMatrix::from_cols(&[a.unit().to_vec()], a.dim(0));
    subalgebra(a, &s)
}

/// Per-degree kernel of a surjective morphism.
pub fn kernel_complex(f: &CdgaMorphism) -> Result<GradedSubspace> {
    let top = f.source.top();
    for r in 0..=top.max(f.target.top()) {
        if !f.is_surjective(r) {
            return Err(Error::Input(format!("morphism not surjective in degree {r}")));
        }
    }
    let basis = (0..=top)
        .map(|r| {
            let k = f.map(r).kernel_basis();
            span_basis(&k.columns(), f.source.dim(r))
        })
        .collect();
    Ok(GradedSubspace { basis })
}

/// The pullback `{(a,b) : f(a) = g(b)}` with its two projections. Requires the
/// combined map `A ⊕ B -> C` to be onto in every degree, so that the defining
/// sequence is exact.
pub fn fiber_product(f: &CdgaMorphism, g: &CdgaMorphism) -> Result<(Cdga, CdgaMorphism, CdgaMorphism)> {
    let (a, b, c) = (&f.source, &g.source, &f.target);
    if c.dims() != g.target.dims() {
        return Err(Error::Input("morphisms have different targets".into()));
    }
    let top = a.top().max(b.top());
    for r in 0..=top.max(c.top()) {
        if f.map(r).hstack(&g.map(r)).rank() != c.dim(r) {
            return Err(Error::Precondition(format!(
                "neither map covers degree {r}: the fiber product sequence is not exact"
            )));
        }
    }
    strict_pullback(f, g)
}

/// `{(a,b) : f(a) = g(b)}` without any exactness check.
pub fn strict_pullback(f: &CdgaMorphism, g: &CdgaMorphism) -> Result<(Cdga, CdgaMorphism, CdgaMorphism)> {
    let (a, b, c) = (&f.source, &g.source, &f.target);
    if c.dims() != g.target.dims() {
        return Err(Error::Input("morphisms have different targets".into()));
    }
    let top = a.top().max(b.top());
    let mut basis = Vec::new();
    for r in 0..=top {
        let m = f.map(r).hstack(&g.map(r).scale(&-Q::one()));
        let k = m.kernel_basis();
        basis.push(span_basis(&k.columns(), a.dim(r) + b.dim(r)));
    }
    let split = |r: usize, v: &[Q]| -> (Vec<Q>, Vec<Q>) { (v[..a.dim(r)].to_vec(), v[a.dim(r)..].to_vec()) };
    let coords: Vec<RatMatrix> = basis.iter().map(coordinate_map).collect();
    let names: Vec<Vec<String>> = (0..=top)
        .map(|r| {
            (0..basis[r].cols())
                .map(|k| {
                    let (x, y) = split(r, &basis[r].col(k));
                    format!("({},{})", combo_name(a.names(r), &x), combo_name(b.names(r), &y))
                })
                .collect()
        })
        .collect();
    let mut d = Vec::new();
    for r in 0..=top {
        let rows = if r < top { basis[r + 1].cols() } else { 0 };
        let mut m = RatMatrix::zeros(rows, basis[r].cols());
        if rows > 0 {
            for k in 0..basis[r].cols() {
                let (x, y) = split(r, &basis[r].col(k));
                let mut img = a.apply_d(r, &x);
                img.extend(b.apply_d(r, &y));
                let w = coords[r + 1].mul_vec(&img);
                for (row, val) in w.into_iter().enumerate() {
                    m.set(row, k, val);
                }
            }
        }
        d.push(m);
    }
    let mut prod = HashMap::new();
    for i in 0..=top {
        for j in 0..=top - i {
            for s in 0..basis[i].cols() {
                let (x1, y1) = split(i, &basis[i].col(s));
                for t in 0..basis[j].cols() {
                    let (x2, y2) = split(j, &basis[j].col(t));
                    let mut p = a.mul(i, &x1, j, &x2);
                    p.extend(b.mul(i, &y1, j, &y2));
                    if !is_zero_vec(&p) {
                        prod.insert((i, s, j, t), coords[i + j].mul_vec(&p));
                    }
                }
            }
        }
    }
    let mut u = a.unit().to_vec();
    u.extend(b.unit().iter().cloned());
    let unit = coords[0].mul_vec(&u);
    let p = Cdga::from_parts(names, d, prod, unit)?;
    let pa = (0..=top)
        .map(|r| {
            let idx: Vec<usize> = (0..a.dim(r)).collect();
            basis[r].select_rows(&idx)
        })
        .collect();
    let pb = (0..=top)
        .map(|r| {
            let idx: Vec<usize> = (a.dim(r)..a.dim(r) + b.dim(r)).collect();
            basis[r].select_rows(&idx)
        })
        .collect();
    let to_a = CdgaMorphism { source: p.clone(), target: a.clone(), maps: pa };
    let to_b = CdgaMorphism { source: p.clone(), target: b.clone(), maps: pb };
    Ok((p, to_a, to_b))
}

/// Gram matrix of `(x, y) -> fundamental(x·y)` on `H^r x H^{n-r}`.
pub fn cup_pairing(a: &Cdga, fundamental: &[Q], n: usize, r: usize) -> Result<RatMatrix> {
    if r > n {
        return Err(Error::Input(format!("degree {r} exceeds {n}")));
    }
    if fundamental.len() != a.dim(n) {
        return Err(Error::Input("fundamental functional has wrong length".into()));
    }
    let h = a.complex().cohomology();
    check_functional(&h, n, fundamental)?;
    let (p, m) = (h.dim(r), h.dim(n - r));
    let mut g = RatMatrix::zeros(p, m);
    for i in 0..p {
        let x = h.rep_col(r, i);
        for j in 0..m {
            let y = h.rep_col(n - r, j);
            let xy = a.mul(r, &x, n - r, &y);
            g.set(i, j, crate::exactq::dot(fundamental, &xy));
        }
    }
    Ok(g)
}

/// Checks that a cochain functional vanishes on coboundaries.
pub fn check_functional(h: &Cohomology, n: usize, f: &[Q]) -> Result<()> {
    if let Some(c) = h.degrees.get(n) {
        for k in 0..c.boundaries.cols() {
            if !crate::exactq::dot(f, &c.boundaries.col(k)).is_zero() {
                return Err(Error::Input("functional does not vanish on coboundaries".into()));
            }
        }
    }
    Ok(())
}


impl Complex {
    /// Degreewise direct sum.
    pub fn direct_sum(parts: &[Complex]) -> Complex {
        let top = parts.iter().map(|c| c.top()).max().unwrap_or(0);
        let d = (0..=top)
            .map(|r| {
                let mut m = RatMatrix::zeros(0, 0);
                for c in parts {
                    let rows = if r < top { c.dim(r + 1) } else { 0 };
                    let block = if r < c.d.len() && rows == c.d[r].rows() {
                        c.d[r].clone()
                    } else {
                        RatMatrix::zeros(rows, c.dim(r))
                    };
                    m = m.block_diag(&block);
                }
                m
            })
            .collect();
        Complex::new(d)
    }
}

/// Mapping cone with `K^r = X^r ⊕ Y^{r-1}` and `d(x, y) = (dx, f(x) - dy)`,
/// in degrees `0..=top`. `f(r)` has shape `dim Y^r x dim X^r`.
pub fn cone(x: &Complex, y: &Complex, f: &dyn Fn(usize) -> RatMatrix, top: usize) -> Complex {
    let ydim = |r: isize| if r < 0 { 0 } else { y.dim(r as usize) };
    let dim = |r: usize| x.dim(r) + ydim(r as isize - 1);
    let d = (0..=top)
        .map(|r| {
            if r == top {
                return RatMatrix::zeros(0, dim(r));
            }
            let mut m = RatMatrix::zeros(dim(r + 1), dim(r));
            let (xr, xr1) = (x.dim(r), x.dim(r + 1));
            if xr1 > 0 && xr > 0 {
                m.set_block(0, 0, &x.d(r));
            }
            let fr = f(r);
            if fr.rows() > 0 && fr.cols() > 0 {
                m.set_block(xr1, 0, &fr);
            }
            if r >= 1 && ydim(r as isize - 1) > 0 && y.dim(r) > 0 {
                m.set_block(xr1, xr, &y.d(r - 1).scale(&-Q::one()));
            }
            m
        })
        .collect();
    Complex::new(d)
}

/// Extends `f: A -> T` to `A ⊗ Λ(v) -> T` with `v ↦ image`, where `ext` was
/// built by `A.extend(_, deg, _, top)`.
pub fn extend_morphism(f: &CdgaMorphism, ext: &Cdga, deg: usize, image: &[Q]) -> Result<CdgaMorphism> {
    let t = &f.target;
    if image.len() != t.dim(deg) {
        return Err(Error::Input("image of the new generator has wrong length".into()));
    }
    let layout = f.source.extension_layout(deg, ext.top());
    let mut powers: Vec<Vec<Q>> = vec![t.unit().to_vec()];
    let maps = layout
        .iter()
        .enumerate()
        .map(|(r, slot)| {
            let cols: Vec<Vec<Q>> = slot
                .iter()
                .map(|&(i, p, a)| {
                    while powers.len() <= i {
                        let k = powers.len();
                        let next = t.mul(deg * (k - 1), &powers[k - 1], deg, image);
                        powers.push(next);
                    }
                    let fx = f.map(p).col(a);
                    t.mul(p, &fx, deg * i, &powers[i])
                })
                .collect();
            RatMatrix::from_cols(&cols, t.dim(r))
        })
        .collect();
    CdgaMorphism::new(ext.clone(), t.clone(), maps)
}

/// The cohomology ring as an algebra with zero differential. Classes are
/// labelled by their representatives.
pub fn cohomology_algebra(a: &Cdga) -> Result<Cdga> {
    let h = a.cohomology()?;
    let top = a.top();
    let mut b = CdgaBuilder::new(
        (0..=top)
            .map(|r| {
                (0..h.dim(r))
                    .map(|i| {
                        let l = combo_name(a.names(r), &h.rep_col(r, i));
                        if a.find(&l).is_some() {
                            l
                        } else {
                            format!("[{l}]")
                        }
                    })
                    .collect()
            })
            .collect(),
    );
    let u = h.class_of(0, a.unit());
    let ui = u.iter().position(|x| !x.is_zero()).ok_or_else(|| Error::Input("unit is a coboundary".into()))?;
    if u != unit_vec(u.len(), ui) {
        return Err(Error::Unsupported("unit class is not a representative".into()));
    }
    b.set_unit(ui);
    for i in 0..=top {
        for j in 0..=top - i {
            for x in 0..h.dim(i) {
                for y in 0..h.dim(j) {
                    let p = a.mul(i, &h.rep_col(i, x), j, &h.rep_col(j, y));
                    b.set_product(i, x, j, y, h.class_of(i + j, &p));
                }
            }
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext_x3() -> Cdga {
        Cdga::free(&[("x", 3)], 3).unwrap()
    }

    #[test]
    fn exterior_on_odd_generator() {
        let a = ext_x3();
        assert!(a.validate().is_empty());
        assert_eq!(a.betti(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn broken_differential_reported() {
        let a = ext_x3();
        let mut d = a.d.clone();
        // d(x) = 1 would need a degree-4 target; inject d(1) = x instead
        d[0] = RatMatrix::zeros(0, 1);
        let mut names = a.names.clone();
        names[1] = vec!["y".into()];
        d[0] = RatMatrix::from_i64(&[&[1]]);
        d[1] = RatMatrix::zeros(0, 1);
        let b = Cdga::from_parts(names, d, a.prod.clone(), a.unit.clone()).unwrap();
        let v = b.validate();
        assert!(v.iter().any(|x| x.axiom == "unit" || x.axiom == "Leibniz"), "{v:?}");
    }

    #[test]
    fn torus_pairing_is_skew() {
        let t = Cdga::free(&[("a", 1), ("b", 1)], 2).unwrap();
        let f = vec![q(1)];
        assert_eq!(t.names(2), &["a*b".to_string()]);
        let g = cup_pairing(&t, &f, 2, 1).unwrap();
        assert_eq!(g, RatMatrix::from_i64(&[&[0, 1], &[-1, 0]]));
        let g0 = cup_pairing(&ext_x3(), &[q(1)], 3, 0).unwrap();
        assert_eq!(g0, RatMatrix::from_i64(&[&[1]]));
    }

    #[test]
    fn ideals_and_quotients() {
        let a = Cdga::free(&[("x", 2), ("y", 3)], 7).unwrap();
        let all = differential_ideal(&a, &[a.unit_elem()]).unwrap();
        assert_eq!(all.dims(), a.dims());
        let none = differential_ideal(&a, &[]).unwrap();
        assert!(none.dims().iter().all(|&d| d == 0));
        let (q0, p) = quotient(&a, &none).unwrap();
        assert_eq!(q0.dims(), a.dims());
        assert!(p.validate().is_empty());
        let (qa, _) = quotient(&a, &all).unwrap();
        assert!(qa.dims().iter().all(|&d| d == 0));
    }

    #[test]
    fn extension_differentials() {
        // (Λ(x,y), dy = x^2) truncated: cohomology of S^2 up to the cut
        let a = Cdga::free(&[("x", 2)], 6).unwrap();
        let x2 = a.mul_e(&a.elem("x").unwrap(), &a.elem("x").unwrap());
        let b = a.extend("y", 3, &x2.v, 6).unwrap();
        assert!(b.validate().is_empty());
        let betti = b.betti();
        assert_eq!(&betti[..6], &[1, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn fiber_product_over_zero_is_sum() {
        let a = ext_x3();
        let z = Cdga::zero();
        let f = CdgaMorphism::new(a.clone(), z.clone(), (0..=3).map(|r| RatMatrix::zeros(0, a.dim(r))).collect())
            .unwrap();
        let (p, _, _) = fiber_product(&f, &f).unwrap();
        assert_eq!(p.dims(), vec![2, 0, 0, 2]);
        let id = CdgaMorphism::identity(&a);
        let (p, pa, _) = fiber_product(&id, &id).unwrap();
        assert_eq!(p.dims(), a.dims());
        assert!(pa.validate().is_empty());
    }
}
