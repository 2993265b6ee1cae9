//! Truncation and cotruncation models, Lagrangian cotruncation, and the
//! cohomological effect of attaching a top cell along the link.

use num_traits::Zero;

use crate::cdga::{
    differential_ideal, quotient, span_basis, subalgebra, unital_ideal, Cdga, CdgaMorphism, Cohomology, Element, GradedSubspace,
};
use crate::exactq::{complement_std, dot, is_zero_vec, RatMatrix, Q};
use crate::{Error, Result};

/// Data of the ideal `I_{k-1}` killed by the truncation at `k`.
#[derive(Clone, Debug)]
pub struct TruncationIdeal {
    pub k: usize,
    /// Columns span a complement of `ker d^{k-1}` in `A^{k-1}`.
    pub coim: RatMatrix,
    pub ideal: GradedSubspace,
}

fn require_connected(a: &Cdga) -> Result<Cohomology> {
    let h = a.cohomology()?;
    if h.dim(0) != 1 {
        return Err(Error::Input(format!("algebra is not connected: dim H^0 = {}", h.dim(0))));
    }
    Ok(h)
}

/// Complement of `ker d^r` in `A^r` made of standard basis vectors.
pub fn coimage(a: &Cdga, r: usize) -> RatMatrix {
    let k = a.d(r).kernel_basis();
    let idx = complement_std(&k);
    RatMatrix::identity(a.dim(r)).select_cols(&idx)
}

/// The ideal generated by `coim^{k-1}` and `A^{>=k}`.
pub fn truncation_ideal(a: &Cdga, k: usize) -> Result<TruncationIdeal> {
    let mut gens: Vec<Element> = Vec::new();
    let coim = if k >= 1 { coimage(a, k - 1) } else { RatMatrix::zeros(0, 0) };
    if k >= 1 {
        gens.extend(coim.columns().into_iter().map(|v| Element::new(k - 1, v)));
    }
    for r in k..=a.top() {
        gens.extend((0..a.dim(r)).map(|i| a.basis_elem(r, i)));
    }
    let ideal = differential_ideal(a, &gens)?;
    Ok(TruncationIdeal { k, coim, ideal })
}

/// Model `A/I_{k-1}` of the truncation below degree `k`.
pub fn truncate(a: &Cdga, k: usize) -> Result<(Cdga, CdgaMorphism, TruncationIdeal)> {
    require_connected(a)?;
    let t = truncation_ideal(a, k)?;
    let (q, p) = quotient(a, &t.ideal)?;
    Ok((q, p, t))
}

/// Sub-CDGA `Q·1 + I` spanned by the unit and an ideal.
pub fn unit_plus(a: &Cdga, i: &GradedSubspace) -> Result<(Cdga, CdgaMorphism)> {
    if i.dim(0) == 0 {
        return unital_ideal(a, i);
    }
    let mut s = i.clone();
    let mut cols = i.basis[0].columns();
    cols.push(a.unit().to_vec());
    s.basis[0] = span_basis(&cols, a.dim(0));
    subalgebra(a, &s)
}

/// Model `Q ⊕ I_{k-1}` of the cotruncation from degree `k` on.
pub fn cotruncate(a: &Cdga, k: usize) -> Result<(Cdga, CdgaMorphism)> {
    require_connected(a)?;
    let t = truncation_ideal(a, k)?;
    unit_plus(a, &t.ideal)
}

/// Coordinate functional of a one-dimensional top cohomology `H^n`.
fn top_functional(h: &Cohomology, n: usize) -> Result<Vec<Q>> {
    if h.dim(n) != 1 {
        return Err(Error::Precondition(format!("expected H^{n} = Q, found dimension {}", h.dim(n))));
    }
    Ok(h.degrees[n].proj.row(0).to_vec())
}

/// Cotruncation at the middle degree `s` of a `2s`-dimensional model keeping the
/// Lagrangian spanned by the classes of `keep`.
pub fn lagrangian_cotruncate(a: &Cdga, s: usize, keep: &[Vec<Q>]) -> Result<(Cdga, CdgaMorphism)> {
    let h = require_connected(a)?;
    let fund = top_functional(&h, 2 * s)?;
    for (i, v) in keep.iter().enumerate() {
        if v.len() != a.dim(s) {
            return Err(Error::Input(format!("keep vector {i} has wrong length")));
        }
        if !is_zero_vec(&a.apply_d(s, v)) {
            return Err(Error::Input(format!("keep vector {i} is not a cocycle")));
        }
    }
    let classes: Vec<Vec<Q>> = keep.iter().map(|v| h.class_of(s, v)).collect();
    let rank = RatMatrix::from_cols(&classes, h.dim(s)).rank();
    if rank != keep.len() {
        return Err(Error::Precondition("kept classes are linearly dependent in cohomology".into()));
    }
    if 2 * keep.len() != h.dim(s) {
        return Err(Error::Precondition(format!(
            "a Lagrangian needs {} classes, got {}",
            h.dim(s) / 2,
            keep.len()
        )));
    }
    for i in 0..keep.len() {
        for j in i..keep.len() {
            let p = a.mul(s, &keep[i], s, &keep[j]);
            if !dot(&fund, &p).is_zero() {
                return Err(Error::Precondition(format!("kept classes {i} and {j} pair nontrivially")));
            }
        }
    }
    let mut gens: Vec<Element> = keep.iter().map(|v| Element::new(s, v.clone())).collect();
    gens.extend(coimage(a, s).columns().into_iter().map(|v| Element::new(s, v)));
    for r in s + 1..=a.top() {
        gens.extend((0..a.dim(r)).map(|i| a.basis_elem(r, i)));
    }
    let ideal = differential_ideal(a, &gens)?;
    unit_plus(a, &ideal)
}

/// Cohomology bookkeeping for `cotr ∪ e^n` attached along the link.
#[derive(Clone, Debug, PartialEq)]
pub struct TopCellEffect {
    pub betti: Vec<usize>,
    /// The class of degree `n-1` that the new cell kills.
    pub killed: Vec<Q>,
    /// Degree of the relative class carried by the pair.
    pub relative_degree: usize,
}

/// Betti table after attaching the top cell: unchanged below `n-1`, one class
/// fewer in degree `n-1`, nothing from degree `n` on.
pub fn attach_top_cell_effect(cotr: &Cdga, n: usize, link_fundamental: &[Q]) -> Result<TopCellEffect> {
    if n == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    let h = cotr.cohomology()?;
    if link_fundamental.len() != h.dim(n - 1) {
        return Err(Error::Input(format!(
            "fundamental class has {} coordinates, H^{} has dimension {}",
            link_fundamental.len(),
            n - 1,
            h.dim(n - 1)
        )));
    }
    if is_zero_vec(link_fundamental) {
        return Err(Error::Precondition("link fundamental class is zero: no Poincaré pair".into()));
    }
    let mut betti: Vec<usize> = (0..=n).map(|r| h.dim(r)).collect();
    betti[n - 1] -= 1;
    betti[n] = 0;
    Ok(TopCellEffect { betti, killed: link_fundamental.to_vec(), relative_degree: n })
}

/// Whether the class `top` of `H^n` is a sum of products of positive-degree classes.
pub fn top_class_decomposable(a: &Cdga, n: usize, top: &[Q]) -> Result<bool> {
    let h = a.cohomology()?;
    if top.len() != h.dim(n) {
        return Err(Error::Input(format!("class has wrong length for H^{n}")));
    }
    let mut image = Vec::new();
    for i in 1..n {
        for x in 0..h.dim(i) {
            let xv = h.rep_col(i, x);
            for y in 0..h.dim(n - i) {
                let p = a.mul(i, &xv, n - i, &h.rep_col(n - i, y));
                image.push(h.class_of(n, &p));
            }
        }
    }
    let span = span_basis(&image, h.dim(n));
    Ok(span.solve(top)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::q;

    /// Λ(x2, y3, z3) with dy = x², divided by the acyclic ideal (x³, xy).
    fn s2xs3() -> Cdga {
        let b = Cdga::free(&[("x", 2)], 8).unwrap();
        let x = b.elem("x").unwrap();
        let b = b.extend("y", 3, &b.mul_e(&x, &x).v, 8).unwrap();
        let b = b.extend("z", 3, &vec![Q::zero(); b.dim(4)], 8).unwrap();
        let x = b.elem("x").unwrap();
        let gens = [b.mul_e(&b.mul_e(&x, &x), &x), b.mul_e(&x, &b.elem("y").unwrap())];
        let i = differential_ideal(&b, &gens).unwrap();
        let (m, _) = quotient(&b, &i).unwrap();
        assert_eq!(m.dims(), vec![1, 0, 1, 2, 1, 1, 1, 1, 0]);
        m.truncated(7)
    }

    fn trim(mut b: Vec<usize>) -> Vec<usize> {
        while b.len() > 1 && *b.last().unwrap() == 0 {
            b.pop();
        }
        b
    }

    #[test]
    fn nodal_truncations() {
        let a = s2xs3();
        assert!(a.validate().is_empty());
        let (t, p, _) = truncate(&a, 3).unwrap();
        assert_eq!(trim(t.betti()), vec![1, 0, 1]);
        assert!(p.validate().is_empty());
        let (c, i) = cotruncate(&a, 3).unwrap();
        assert_eq!(trim(c.betti()), vec![1, 0, 0, 1, 0, 1]);
        assert!(i.validate().is_empty());
        let e = attach_top_cell_effect(&c, 6, &[q(1)]).unwrap();
        assert_eq!(trim(e.betti), vec![1, 0, 0, 1]);
    }

    #[test]
    fn exterior_cases() {
        let a = Cdga::free(&[("x", 3)], 3).unwrap();
        assert_eq!(truncate(&a, 5).unwrap().0.betti(), vec![1, 0, 0, 1]);
        assert_eq!(cotruncate(&a, 3).unwrap().0.betti(), vec![1, 0, 0, 1]);
        assert!(!top_class_decomposable(&a, 3, &[q(1)]).unwrap());
    }

    #[test]
    fn cp3_truncations() {
        let a = Cdga::free(&[("x", 2)], 6).unwrap();
        assert_eq!(trim(truncate(&a, 4).unwrap().0.betti()), vec![1, 0, 1]);
        assert_eq!(trim(cotruncate(&a, 4).unwrap().0.betti()), vec![1, 0, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn torus_lagrangian() {
        let t = Cdga::free(&[("a", 1), ("b", 1)], 2).unwrap();
        assert!(top_class_decomposable(&t, 2, &[q(1)]).unwrap());
        let alpha = t.elem("a").unwrap().v;
        let (c, _) = lagrangian_cotruncate(&t, 1, &[alpha.clone()]).unwrap();
        assert_eq!(c.betti(), vec![1, 1, 1]);
        let both = lagrangian_cotruncate(&t, 1, &[alpha.clone(), t.elem("b").unwrap().v]);
        assert!(matches!(both, Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_fundamental_rejected() {
        let a = Cdga::free(&[("x", 3)], 3).unwrap();
        assert!(matches!(attach_top_cell_effect(&a, 4, &[q(0)]), Err(Error::Precondition(_))));
    }
}
