//! Models of pseudomanifolds with isolated singularities: classification,
//! intersection spaces, Poincaré duality approximations and Thom spaces.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::cdga::{
    check_functional, cone, cup_pairing, extend_morphism, fiber_product, induced_map, span_basis, strict_pullback,
    Cdga, CdgaMorphism, Cohomology, Complex, GradedSubspace,
};
use crate::exactq::{complement_std, dot, is_zero_vec, q, unit_vec, RatMatrix, Q};
use crate::quadforms::{find_lagrangian, is_hyperbolic, signature, witt_equal, BilinearSpace, FormKind, LagrangianSearch};
use crate::truncation::{
    attach_top_cell_effect, cotruncate, lagrangian_cotruncate, truncation_ideal, unit_plus, TopCellEffect,
};
use crate::{Error, Result};

/// A model of an `n`-dimensional pseudomanifold with isolated singularities:
/// the regular part, one link model per singular point and the restriction
/// of the regular part to the union of the links.
#[derive(Clone, Debug)]
pub struct PseudomanifoldModel {
    pub n: usize,
    pub regular: Cdga,
    pub links: Vec<Cdga>,
    /// Regular part to the direct sum of the link models.
    pub restriction: CdgaMorphism,
    /// Per link, a functional on `L^{n-1}` evaluating the fundamental class.
    pub link_fundamentals: Vec<Vec<Q>>,
    /// Fundamental functional on `A^n`, used when there are no links.
    pub regular_fundamental: Option<Vec<Q>>,
}

impl PseudomanifoldModel {
    /// Assembles and validates a model. `restriction[r]` maps `A^r` to the
    /// direct sum of the `L_i^r`.
    pub fn new(
        n: usize,
        regular: Cdga,
        links: Vec<Cdga>,
        restriction: Vec<RatMatrix>,
        link_fundamentals: Vec<Vec<Q>>,
        regular_fundamental: Option<Vec<Q>>,
    ) -> Result<Self> {
        let target = Cdga::direct_sum(&links);
        let restriction = CdgaMorphism::new(regular.clone(), target, restriction)?;
        let x = PseudomanifoldModel { n, regular, links, restriction, link_fundamentals, regular_fundamental };
        x.validate()?;
        Ok(x)
    }

    /// A closed manifold given by a model and its fundamental functional.
    pub fn closed(n: usize, regular: Cdga, fundamental: Vec<Q>) -> Result<Self> {
        let maps = (0..=regular.top()).map(|r| RatMatrix::zeros(0, regular.dim(r))).collect();
        Self::new(n, regular, vec![], maps, vec![], Some(fundamental))
    }

    /// The direct sum of the link models.
    pub fn link_algebra(&self) -> &Cdga {
        &self.restriction.target
    }

    /// Offset of link `i` inside the direct sum in degree `r`.
    pub fn link_offset(&self, i: usize, r: usize) -> usize {
        self.links[..i].iter().map(|l| l.dim(r)).sum()
    }

    /// Fundamental functional on the degree `n-1` part of the link sum.
    pub fn total_link_fundamental(&self) -> Vec<Q> {
        self.link_fundamentals.iter().flat_map(|f| f.iter().cloned()).collect()
    }

    /// Checks the hypotheses: valid algebras, connected regular part, closed
    /// `(n-1)`-dimensional Poincaré duality links, a restriction onto the links
    /// in positive degrees, and Stokes for the link fundamental classes.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 2 {
            return Err(Error::Input("dimension must be at least 2".into()));
        }
        self.regular.ensure_valid()?;
        if self.regular.top() < n {
            return Err(Error::Input(format!("regular model must reach degree {n}")));
        }
        let hreg = self.regular.cohomology()?;
        if hreg.dim(0) != 1 {
            return Err(Error::Input("regular part is not connected".into()));
        }
        if self.links.len() != self.link_fundamentals.len() {
            return Err(Error::Input("one fundamental functional per link expected".into()));
        }
        for (i, (l, f)) in self.links.iter().zip(&self.link_fundamentals).enumerate() {
            l.ensure_valid().map_err(|e| Error::Input(format!("link {i}: {e}")))?;
            if l.top() != n - 1 {
                return Err(Error::Input(format!("link {i} must have top degree {}", n - 1)));
            }
            let h = l.cohomology()?;
            if h.dim(0) != 1 {
                return Err(Error::Input(format!("link {i} is not connected")));
            }
            if f.len() != l.dim(n - 1) {
                return Err(Error::Input(format!("link {i}: fundamental functional has wrong length")));
            }
            check_functional(&h, n - 1, f).map_err(|e| Error::Input(format!("link {i}: {e}")))?;
            if h.dim(n - 1) != 1 || dot(f, &h.rep_col(n - 1, 0)).is_zero() {
                return Err(Error::Input(format!("link {i}: fundamental functional does not detect H^{}", n - 1)));
            }
            for r in 0..n {
                let g = cup_pairing(l, f, n - 1, r)?;
                if g.rank() != h.dim(r) || g.rank() != h.dim(n - 1 - r) {
                    return Err(Error::Input(format!("link {i} fails Poincaré duality in degree {r}")));
                }
            }
        }
        if let Some(v) = self.restriction.validate().first() {
            return Err(Error::Input(format!("restriction: {v}")));
        }
        for r in 1..=self.link_algebra().top() {
            if !self.restriction.is_surjective(r) {
                return Err(Error::Input(format!("restriction is not onto in degree {r}")));
            }
        }
        if self.links.is_empty() {
            let f = self
                .regular_fundamental
                .as_ref()
                .ok_or_else(|| Error::Input("a space without links needs a regular fundamental class".into()))?;
            if f.len() != self.regular.dim(n) {
                return Err(Error::Input("regular fundamental functional has wrong length".into()));
            }
            check_functional(&hreg, n, f)?;
            if hreg.dim(n) != 1 || dot(f, &hreg.rep_col(n, 0)).is_zero() {
                return Err(Error::Input(format!("regular fundamental functional does not detect H^{n}")));
            }
        } else {
            let fl = self.total_link_fundamental();
            let rho = self.restriction.map(n - 1);
            let z = &hreg.degrees[n - 1].cocycles;
            for k in 0..z.cols() {
                if !dot(&fl, &rho.mul_vec(&z.col(k))).is_zero() {
                    return Err(Error::Input("link fundamental classes do not bound: Stokes fails".into()));
                }
            }
        }
        Ok(())
    }
}

/// Lower middle perversity value at the singular points.
pub fn lower_middle(n: usize) -> usize {
    (n / 2).saturating_sub(1)
}

/// Upper middle perversity value at the singular points.
pub fn upper_middle(n: usize) -> usize {
    n.div_ceil(2).saturating_sub(1)
}

/// Cotruncation degree `n - 1 - p` for the perversity value `p`.
pub fn cut_degree(n: usize, p: usize) -> Result<usize> {
    if n < 2 || p > n - 2 {
        return Err(Error::Input(format!("perversity value {p} out of range for dimension {n}")));
    }
    Ok(n - 1 - p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Odd dimension and every link has vanishing middle cohomology.
    Witt,
    /// Odd dimension and every link middle form admits a Lagrangian.
    LSpace,
    /// Even dimension: no middle-degree condition applies.
    EvenDim,
    Neither,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Witt => "witt",
            Classification::LSpace => "l-space",
            Classification::EvenDim => "even-dim",
            Classification::Neither => "neither",
        }
    }
}

/// Middle-degree data of one link.
#[derive(Clone, Debug)]
pub struct LinkReport {
    pub middle_dim: usize,
    pub form: BilinearSpace,
    pub signature: Option<i64>,
    pub hyperbolic: bool,
    /// Cocycles spanning a Lagrangian of `H^s(L)`, when one was found.
    pub lagrangian: Option<Vec<Vec<Q>>>,
}

#[derive(Clone, Debug)]
pub struct ClassifyReport {
    pub class: Classification,
    /// Middle degree of the links, for odd `n`.
    pub s: Option<usize>,
    pub links: Vec<LinkReport>,
}

/// Classifies a space as Witt, L-space, even-dimensional or neither.
pub fn classify(x: &PseudomanifoldModel) -> Result<ClassifyReport> {
    if x.n % 2 == 0 {
        return Ok(ClassifyReport { class: Classification::EvenDim, s: None, links: vec![] });
    }
    let s = (x.n - 1) / 2;
    let mut links = Vec::new();
    for (l, f) in x.links.iter().zip(&x.link_fundamentals) {
        let h = l.cohomology()?;
        let form = BilinearSpace::for_degree(cup_pairing(l, f, x.n - 1, s)?, s)?;
        let middle_dim = form.dim();
        let sig = if form.kind == FormKind::Symmetric { Some(signature(&form)?) } else { None };
        let hyperbolic = middle_dim == 0 || form.kind == FormKind::Skew || is_hyperbolic(&form)?;
        let lagrangian = if middle_dim == 0 {
            Some(vec![])
        } else if hyperbolic {
            match find_lagrangian(&form)? {
                LagrangianSearch::Found(c) => Some(c.columns().iter().map(|v| h.rep(s, v)).collect()),
                _ => None,
            }
        } else {
            None
        };
        links.push(LinkReport { middle_dim, form, signature: sig, hyperbolic, lagrangian });
    }
    let class = if links.iter().all(|l| l.middle_dim == 0) {
        Classification::Witt
    } else if links.iter().all(|l| l.hyperbolic) {
        Classification::LSpace
    } else {
        Classification::Neither
    };
    Ok(ClassifyReport { class, s: Some(s), links })
}

/// Adds `count` square-zero closed classes of degree 1 that act on the
/// algebra through the augmentation of a one-dimensional `A^0`.
fn with_degree_one_classes(a: &Cdga, count: usize) -> Result<Cdga> {
    if count == 0 {
        return Ok(a.clone());
    }
    if a.dim(0) != 1 {
        return Err(Error::Unsupported("degree-one correction needs a one-dimensional degree 0".into()));
    }
    let top = a.top().max(1);
    let old1 = a.dim(1);
    let mut names: Vec<Vec<String>> = (0..=top).map(|r| a.names(r).to_vec()).collect();
    for c in 0..count {
        names[1].push(format!("t{}", c + 1));
    }
    let dim = |r: usize| names[r].len();
    let d: Vec<RatMatrix> = (0..=top)
        .map(|r| {
            let rows = if r < top { dim(r + 1) } else { 0 };
            let mut m = RatMatrix::zeros(rows, dim(r));
            let old = a.d(r);
            if old.rows() > 0 && old.cols() > 0 {
                m.set_block(0, 0, &old);
            }
            m
        })
        .collect();
    let mut prod = HashMap::new();
    for i in 0..=a.top() {
        for j in 0..=a.top() - i {
            for x in 0..a.dim(i) {
                for y in 0..a.dim(j) {
                    if let Some(v) = a.basis_product(i, x, j, y) {
                        let mut v = v.clone();
                        if i + j == 1 {
                            v.resize(dim(1), Q::zero());
                        }
                        prod.insert((i, x, j, y), v);
                    }
                }
            }
        }
    }
    let eps = a.unit()[0].recip();
    for c in 0..count {
        let t = unit_vec(dim(1), old1 + c).into_iter().map(|e| e * &eps).collect::<Vec<Q>>();
        prod.insert((0, 0, 1, old1 + c), t.clone());
        prod.insert((1, old1 + c, 0, 0), t);
    }
    Cdga::from_parts(names, d, prod, a.unit().to_vec())
}

/// Pullback of the restriction along an inclusion into the link sum; when
/// degree 0 is not covered, closed degree-1 classes restore exactness.
fn glue(x: &PseudomanifoldModel, inc: &CdgaMorphism) -> Result<Cdga> {
    match fiber_product(&x.restriction, inc) {
        Ok((p, _, _)) => Ok(p),
        Err(Error::Precondition(_)) => {
            let l = x.link_algebra();
            for r in 1..=l.top() {
                if x.restriction.map(r).hstack(&inc.map(r)).rank() != l.dim(r) {
                    return Err(Error::Precondition(format!("gluing is not exact in degree {r}")));
                }
            }
            let defect = l.dim(0) - x.restriction.map(0).hstack(&inc.map(0)).rank();
            let (p, _, _) = strict_pullback(&x.restriction, inc)?;
            with_degree_one_classes(&p, defect)
        }
        Err(e) => Err(e),
    }
}

/// Direct sum of per-link inclusions `C_i -> L_i`.
fn sum_inclusion(x: &PseudomanifoldModel, sides: &[(Cdga, CdgaMorphism)]) -> Result<CdgaMorphism> {
    let parts: Vec<Cdga> = sides.iter().map(|s| s.0.clone()).collect();
    let c = Cdga::direct_sum(&parts);
    let maps = (0..=c.top())
        .map(|r| sides.iter().fold(RatMatrix::zeros(0, 0), |m, s| m.block_diag(&s.1.map(r))))
        .collect();
    CdgaMorphism::new(c, x.link_algebra().clone(), maps)
}

/// Intersection space model for perversity value `p`, built from the
/// cotruncation of the whole link sum.
pub fn intersection_space_model(x: &PseudomanifoldModel, p: usize) -> Result<Cdga> {
    let k = cut_degree(x.n, p)?;
    let l = x.link_algebra();
    if x.links.is_empty() {
        return Ok(x.regular.clone());
    }
    let t = truncation_ideal(l, k)?;
    let (_, inc) = unit_plus(l, &t.ideal)?;
    glue(x, &inc)
}

/// Intersection space model built from the cotruncation of each link.
pub fn normal_intersection_space_model(x: &PseudomanifoldModel, p: usize) -> Result<Cdga> {
    let k = cut_degree(x.n, p)?;
    if x.links.is_empty() {
        return Ok(x.regular.clone());
    }
    let sides = x.links.iter().map(|l| cotruncate(l, k)).collect::<Result<Vec<_>>>()?;
    glue(x, &sum_inclusion(x, &sides)?)
}

/// Per-link cotruncations used by the duality constructions. `keeps[i]` lists
/// cocycles spanning a Lagrangian of the middle cohomology of link `i`.
fn dual_sides(
    x: &PseudomanifoldModel,
    keeps: Option<&[Vec<Vec<Q>>]>,
) -> Result<(ClassifyReport, Vec<(Cdga, CdgaMorphism)>)> {
    let report = classify(x)?;
    let s = x.n / 2;
    if let Some(k) = keeps {
        if k.len() != x.links.len() {
            return Err(Error::Input(format!("expected {} keep lists, got {}", x.links.len(), k.len())));
        }
    }
    let nonempty = keeps.is_some_and(|k| k.iter().any(|v| !v.is_empty()));
    let sides = match report.class {
        Classification::EvenDim => {
            if nonempty {
                return Err(Error::Input("kept classes only apply in odd dimension".into()));
            }
            x.links.iter().map(|l| cotruncate(l, s)).collect::<Result<Vec<_>>>()?
        }
        Classification::Witt => {
            if nonempty {
                return Err(Error::Input("a Witt space has no middle link cohomology to keep".into()));
            }
            x.links.iter().map(|l| cotruncate(l, s)).collect::<Result<Vec<_>>>()?
        }
        Classification::LSpace => {
            let mut out = Vec::new();
            for (i, l) in x.links.iter().enumerate() {
                let keep = match keeps {
                    Some(k) => k[i].clone(),
                    None => report.links[i].lagrangian.clone().ok_or_else(|| {
                        Error::Unsupported(format!(
                            "no Lagrangian found for link {i} within the search bound; pass kept classes"
                        ))
                    })?,
                };
                out.push(lagrangian_cotruncate(l, s, &keep)?);
            }
            out
        }
        Classification::Neither => {
            return Err(Error::Unsupported(
                "odd-dimensional space with a link middle form that has no Lagrangian".into(),
            ))
        }
    };
    Ok((report, sides))
}

/// Intersection space model of an L-space from Lagrangian cotruncations of the
/// links. A Witt space takes empty keep lists and gives the normal model.
pub fn lagrangian_intersection_space_model(x: &PseudomanifoldModel, keeps: Option<&[Vec<Vec<Q>>]>) -> Result<Cdga> {
    if x.n % 2 == 0 {
        return Err(Error::Precondition("Lagrangian intersection spaces need odd dimension".into()));
    }
    if x.links.is_empty() {
        return Ok(x.regular.clone());
    }
    let (_, sides) = dual_sides(x, keeps)?;
    glue(x, &sum_inclusion(x, &sides)?)
}

/// One condition of the good-approximation test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodCheck {
    pub condition: String,
    /// Only required for a very good approximation.
    pub very_good: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessReport {
    pub checks: Vec<GoodCheck>,
}

impl GoodnessReport {
    pub fn good(&self) -> bool {
        self.checks.iter().filter(|c| !c.very_good).all(|c| c.passed)
    }

    pub fn very_good(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&GoodCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Ranks of the maps in cohomology between the regular part, the
/// approximation and the normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpMaps {
    pub regular_betti: Vec<usize>,
    pub normalization_betti: Vec<usize>,
    /// Rank of `H^r(regular) -> H^r(approximation)`.
    pub phi_rank: Vec<usize>,
    /// Rank of `H^r(approximation) -> H^r(normalization)`.
    pub psi_rank: Vec<usize>,
    pub factorization_holds: bool,
}

#[derive(Clone, Debug)]
pub struct DpResult {
    pub n: usize,
    pub betti: Vec<usize>,
    pub classification: Classification,
    /// Middle intersection form on the approximation, for even `n`.
    pub middle_form: Option<BilinearSpace>,
    pub maps: DpMaps,
    pub link_effects: Vec<TopCellEffect>,
    pub goodness: GoodnessReport,
}

fn check(checks: &mut Vec<GoodCheck>, condition: String, very_good: bool, passed: bool) {
    checks.push(GoodCheck { condition, very_good, passed });
}

/// Tests the conditions for a good (and very good) Poincaré duality
/// approximation on the recorded Betti numbers and map ranks.
pub fn verify_good_approximation(dp: &DpResult) -> GoodnessReport {
    let n = dp.n;
    let b = |r: usize| dp.betti.get(r).copied();
    let reg = |r: usize| dp.maps.regular_betti.get(r).copied();
    let bar = |r: usize| dp.maps.normalization_betti.get(r).copied();
    let phi = |r: usize| dp.maps.phi_rank.get(r).copied();
    let psi = |r: usize| dp.maps.psi_rank.get(r).copied();
    let phi_iso = |r: usize| phi(r).is_some() && phi(r) == b(r) && phi(r) == reg(r);
    let phi_inj = |r: usize| phi(r).is_some() && phi(r) == reg(r);
    let psi_iso = |r: usize| psi(r).is_some() && psi(r) == b(r) && psi(r) == bar(r);
    let psi_surj = |r: usize| psi(r).is_some() && psi(r) == bar(r);
    let mut checks = Vec::new();
    check(&mut checks, format!("b_0 = b_{n} = 1"), false, b(0) == Some(1) && b(n) == Some(1));
    let sym = dp.betti.len() == n + 1 && (0..=n).all(|r| b(r) == b(n - r));
    check(&mut checks, "Betti numbers are symmetric".into(), false, sym);
    if n % 2 == 0 {
        let nondeg = dp.middle_form.as_ref().is_some_and(|f| !f.is_degenerate() && Some(f.dim()) == b(n / 2));
        check(&mut checks, format!("middle form on H^{} is nondegenerate", n / 2), false, nondeg);
    }
    check(&mut checks, "psi then phi equals the normalization map".into(), false, dp.maps.factorization_holds);
    let s = n / 2;
    if n % 2 == 0 {
        for r in s + 1..(2 * s).saturating_sub(1) {
            check(&mut checks, format!("phi_{r} iso"), false, phi_iso(r));
        }
        check(&mut checks, format!("phi_{s} injective"), false, phi_inj(s));
        for r in (0..s).chain(std::iter::once(n)) {
            check(&mut checks, format!("psi_{r} iso"), false, psi_iso(r));
        }
        check(&mut checks, format!("phi_{s} iso"), true, phi_iso(s));
    } else {
        for r in s + 2..2 * s {
            check(&mut checks, format!("phi_{r} iso"), false, phi_iso(r));
        }
        check(&mut checks, format!("phi_{} injective", s + 1), false, phi_inj(s + 1));
        for r in (0..s).chain(std::iter::once(n)) {
            check(&mut checks, format!("psi_{r} iso"), false, psi_iso(r));
        }
        check(&mut checks, format!("psi_{s} surjective"), false, psi_surj(s));
        check(&mut checks, format!("phi_{} iso", s + 1), true, phi_iso(s + 1));
        check(&mut checks, format!("psi_{s} iso"), true, psi_iso(s));
    }
    GoodnessReport { checks }
}

/// Matrix `[I | 0]` projecting onto the first `k` coordinates of `k + rest`.
fn first_block(k: usize, rest: usize) -> RatMatrix {
    RatMatrix::identity(k).hstack(&RatMatrix::zeros(k, rest))
}

/// Shared data of the duality construction.
struct Assembly<'a> {
    x: &'a PseudomanifoldModel,
    reg: Complex,
    lcx: Complex,
    m: Complex,
    hm: Cohomology,
}

impl Assembly<'_> {
    fn rho(&self, r: usize) -> RatMatrix {
        self.x.restriction.map(r)
    }

    /// Pairs a relative cochain `(x, y)` of degree `n` with the fundamental class.
    fn rel_fund(&self, xv: &[Q], yv: &[Q]) -> Result<Q> {
        let n = self.x.n;
        match &self.x.regular_fundamental {
            Some(f) if self.x.links.is_empty() => Ok(dot(f, xv)),
            _ => {
                let x0 = self
                    .reg
                    .d(n - 1)
                    .solve(xv)?
                    .ok_or_else(|| Error::Internal("top relative cochain is not exact on the regular part".into()))?;
                let mut v = self.rho(n - 1).mul_vec(&x0);
                for (a, b) in v.iter_mut().zip(yv) {
                    *a -= b;
                }
                Ok(dot(&self.x.total_link_fundamental(), &v))
            }
        }
    }

    /// Middle form on `H^m` of the approximation from the relative classes and
    /// a complement pairing against them.
    fn middle_form(&self) -> Result<BilinearSpace> {
        let n = self.x.n;
        let mdeg = n / 2;
        let a = &self.x.regular;
        let l = self.x.link_algebra();
        let rdim = |r: usize| self.reg.dim(r);
        let kc = cone(&self.reg, &self.lcx, &|r| self.rho(r), n + 1);
        let hk = kc.cohomology();
        let cdim = self.m.dim(mdeg) - rdim(mdeg) - if mdeg >= 1 { self.lcx.dim(mdeg - 1) } else { 0 };
        let ldim = kc.dim(mdeg) - rdim(mdeg);
        let mut j = RatMatrix::zeros(self.m.dim(mdeg), kc.dim(mdeg));
        if rdim(mdeg) > 0 {
            j.set_block(0, 0, &RatMatrix::identity(rdim(mdeg)));
        }
        if ldim > 0 {
            j.set_block(rdim(mdeg) + cdim, rdim(mdeg), &RatMatrix::identity(ldim));
        }
        let jm = self.hm.degrees[mdeg].proj.mul(&j).mul(&hk.degrees[mdeg].reps);
        let piv = jm.independent_cols();
        let w = jm.select_cols(&piv);
        let kap: Vec<Vec<Q>> = piv.iter().map(|&p| hk.rep_col(mdeg, p)).collect();
        let us = complement_std(&w);
        let split = |v: &[Q]| (v[..rdim(mdeg)].to_vec(), v[rdim(mdeg)..].to_vec());
        let pair = |kv: &[Q], xp: &[Q]| -> Result<Q> {
            let (kx, ky) = split(kv);
            let px = a.mul(mdeg, &kx, mdeg, xp);
            let rx = self.rho(mdeg).mul_vec(xp);
            let py = if mdeg >= 1 { l.mul(mdeg - 1, &ky, mdeg, &rx) } else { vec![Q::zero(); l.dim(n - 1)] };
            self.rel_fund(&px, &py)
        };
        let (na, nb) = (kap.len(), us.len());
        let eps = if mdeg % 2 == 0 { Q::one() } else { -Q::one() };
        let mut g = RatMatrix::zeros(na + nb, na + nb);
        for i in 0..na {
            for k in 0..na {
                g.set(i, k, pair(&kap[i], &split(&kap[k]).0)?);
            }
            for (jj, &u) in us.iter().enumerate() {
                let mu = self.hm.rep_col(mdeg, u);
                let v = pair(&kap[i], &mu[..rdim(mdeg)])?;
                g.set(na + jj, i, &eps * &v);
                g.set(i, na + jj, v);
            }
        }
        for i in 0..na {
            for k in 0..na {
                if g.get(i, k) != &(&eps * g.get(k, i)) {
                    return Err(Error::Internal("relative middle pairing is not graded symmetric".into()));
                }
            }
        }
        // Change from the (W, U) basis to the standard basis of H^m.
        let basis = w.hstack(&RatMatrix::identity(self.hm.dim(mdeg)).select_cols(&us));
        let inv = basis.inverse().ok_or_else(|| Error::Internal("middle basis is singular".into()))?;
        let std = inv.transpose().mul(&g).mul(&inv);
        BilinearSpace::for_degree(std, mdeg)
    }
}

/// Builds the Poincaré duality approximation: the regular part glued along the
/// links to the link cotruncations with a top cell attached.
pub fn dp_model(x: &PseudomanifoldModel, keeps: Option<&[Vec<Vec<Q>>]>) -> Result<DpResult> {
    let n = x.n;
    let top = n + 1;
    for (i, l) in x.links.iter().enumerate() {
        if l.cohomology()?.dim(1) != 0 {
            return Err(Error::Precondition(format!("link {i} has H^1 != 0; the construction needs simply connected links")));
        }
    }
    let (report, sides) = if x.links.is_empty() {
        (ClassifyReport { class: classify(x)?.class, s: None, links: vec![] }, vec![])
    } else {
        dual_sides(x, keeps)?
    };
    let l = x.link_algebra();
    let reg = x.regular.complex();
    let lcx = l.complex();
    let mut cparts = Vec::new();
    let mut link_effects = Vec::new();
    for (i, (c, inc)) in sides.iter().enumerate() {
        if c.top() != n - 1 {
            return Err(Error::Internal(format!("cotruncation of link {i} has wrong top degree")));
        }
        let lambda = RatMatrix::from_rows(vec![x.link_fundamentals[i].clone()], x.links[i].dim(n - 1))
            .mul(&inc.map(n - 1));
        let mut d: Vec<RatMatrix> = (0..n - 1).map(|r| c.d(r)).collect();
        d.push(lambda.clone());
        d.push(RatMatrix::zeros(0, 1));
        let cp = Complex::new(d);
        let hc = c.cohomology()?;
        let class: Vec<Q> = (0..hc.dim(n - 1)).map(|j| lambda.mul_vec(&hc.rep_col(n - 1, j))[0].clone()).collect();
        let eff = attach_top_cell_effect(c, n, &class)?;
        if eff.betti != cp.cohomology().betti()[..=n] {
            return Err(Error::Internal(format!("top cell effect disagrees with the attached complex for link {i}")));
        }
        link_effects.push(eff);
        cparts.push(cp);
    }
    let cpx = Complex::direct_sum(&cparts);
    let iota = |r: usize| -> RatMatrix {
        sides.iter().zip(&x.links).fold(RatMatrix::zeros(0, 0), |m, ((c, inc), li)| {
            let blk = if r < n { inc.map(r) } else { RatMatrix::zeros(li.dim(r), if r == n { 1 } else { c.dim(r) }) };
            m.block_diag(&blk)
        })
    };
    let xsum = Complex::direct_sum(&[reg.clone(), cpx.clone()]);
    let fm = |r: usize| x.restriction.map(r).hstack(&iota(r).scale(&-Q::one()));
    let m = cone(&xsum, &lcx, &fm, top);
    let hm = m.cohomology();
    let betti: Vec<usize> = (0..=n).map(|r| hm.dim(r)).collect();

    let hreg = reg.cohomology();
    let hc = cpx.cohomology();
    let hl = lcx.cohomology();
    let rho_s = induced_map(&hreg, &hl, &|r| x.restriction.map(r));
    let iota_s = induced_map(&hc, &hl, &iota);
    let delta_rank = |r: usize| -> usize {
        let a = rho_s.get(r).cloned().unwrap_or_else(|| RatMatrix::zeros(hl.dim(r), hreg.dim(r)));
        let b = iota_s.get(r).cloned().unwrap_or_else(|| RatMatrix::zeros(hl.dim(r), hc.dim(r)));
        a.hstack(&b).rank()
    };
    let mv: Vec<usize> = (0..=n)
        .map(|r| {
            let low = hreg.dim(r) + hc.dim(r) - delta_rank(r);
            let high = if r >= 1 { hl.dim(r - 1) - delta_rank(r - 1) } else { 0 };
            low + high
        })
        .collect();
    if mv != betti {
        return Err(Error::Internal(format!("Mayer-Vietoris Betti numbers {mv:?} disagree with the cone {betti:?}")));
    }

    // Normalization: the regular part with one cone point per link.
    let nu = x.links.len();
    let qnu = Complex::new(vec![RatMatrix::zeros(0, nu)]);
    let kappa_l = |r: usize| -> RatMatrix {
        if r > 0 {
            return RatMatrix::zeros(l.dim(r), 0);
        }
        let cols: Vec<Vec<Q>> = (0..nu)
            .map(|i| {
                let mut v = vec![Q::zero(); l.dim(0)];
                let off = x.link_offset(i, 0);
                for (k, c) in x.links[i].unit().iter().enumerate() {
                    v[off + k] = c.clone();
                }
                v
            })
            .collect();
        RatMatrix::from_cols(&cols, l.dim(0))
    };
    let psum = Complex::direct_sum(&[reg.clone(), qnu]);
    let fp = |r: usize| x.restriction.map(r).hstack(&kappa_l(r).scale(&-Q::one()));
    let pbar = cone(&psum, &lcx, &fp, top);
    let hbar = pbar.cohomology();
    let kappa_c = |r: usize| -> RatMatrix {
        if r > 0 {
            return RatMatrix::zeros(cpx.dim(r), 0);
        }
        let mut mat = RatMatrix::zeros(cpx.dim(0), nu);
        let mut off = 0;
        for (i, (c, _)) in sides.iter().enumerate() {
            for (k, v) in c.unit().iter().enumerate() {
                mat.set(off + k, i, v.clone());
            }
            off += c.dim(0);
        }
        mat
    };
    let ldim = |r: usize| if r >= 1 { lcx.dim(r - 1) } else { 0 };
    let phi_m = |r: usize| first_block(reg.dim(r), cpx.dim(r) + ldim(r));
    let i_m = |r: usize| first_block(reg.dim(r), if r == 0 { nu } else { 0 } + ldim(r));
    let psi_m =
        |r: usize| RatMatrix::identity(reg.dim(r)).block_diag(&kappa_c(r)).block_diag(&RatMatrix::identity(ldim(r)));
    for r in 0..top {
        if m.d(r).mul(&psi_m(r)) != psi_m(r + 1).mul(&pbar.d(r)) {
            return Err(Error::Internal(format!("normalization map is not a chain map in degree {r}")));
        }
    }
    let phi_s = induced_map(&hm, &hreg, &phi_m);
    let psi_s = induced_map(&hbar, &hm, &psi_m);
    let i_s = induced_map(&hbar, &hreg, &i_m);
    let factorization_holds = (0..=n).all(|r| phi_s[r].mul(&psi_s[r]) == i_s[r]);
    let maps = DpMaps {
        regular_betti: (0..=n).map(|r| hreg.dim(r)).collect(),
        normalization_betti: (0..=n).map(|r| hbar.dim(r)).collect(),
        phi_rank: (0..=n).map(|r| phi_s[r].rank()).collect(),
        psi_rank: (0..=n).map(|r| psi_s[r].rank()).collect(),
        factorization_holds,
    };
    let asm = Assembly { x, reg: reg.clone(), lcx: lcx.clone(), m, hm };
    let middle_form = if n % 2 == 0 { Some(asm.middle_form()?) } else { None };
    let mut dp = DpResult {
        n,
        betti,
        classification: report.class,
        middle_form,
        maps,
        link_effects,
        goodness: GoodnessReport { checks: vec![] },
    };
    dp.goodness = verify_good_approximation(&dp);
    Ok(dp)
}

/// Intersection form on the middle cohomology of the pair (regular part,
/// boundary), reduced to its nondegenerate part.
pub fn regular_intersection_form(x: &PseudomanifoldModel) -> Result<BilinearSpace> {
    if x.n % 2 != 0 {
        return Err(Error::Input("intersection forms need even dimension".into()));
    }
    let n = x.n;
    let mdeg = n / 2;
    let a = &x.regular;
    let basis: Vec<RatMatrix> = (0..=a.top()).map(|r| x.restriction.map(r).kernel_basis()).collect();
    let sub = GradedSubspace { basis };
    let hk = sub.complex(a).cohomology();
    let reps: Vec<Vec<Q>> = (0..hk.dim(mdeg)).map(|i| sub.basis[mdeg].mul_vec(&hk.rep_col(mdeg, i))).collect();
    let rel = |v: &[Q]| -> Result<Q> {
        match &x.regular_fundamental {
            Some(f) if x.links.is_empty() => Ok(dot(f, v)),
            _ => {
                let x0 = a
                    .d(n - 1)
                    .solve(v)?
                    .ok_or_else(|| Error::Internal("relative top class is not exact".into()))?;
                Ok(dot(&x.total_link_fundamental(), &x.restriction.map(n - 1).mul_vec(&x0)))
            }
        }
    };
    let mut g = RatMatrix::zeros(reps.len(), reps.len());
    for i in 0..reps.len() {
        for j in 0..reps.len() {
            g.set(i, j, rel(&a.mul(mdeg, &reps[i], mdeg, &reps[j]))?);
        }
    }
    Ok(BilinearSpace::for_degree(g, mdeg)?.nondegenerate_part())
}

/// Compares the Witt class of the approximation's middle form with the
/// intersection form of the regular part (dimension divisible by 4).
pub fn witt_class_check(x: &PseudomanifoldModel) -> Result<bool> {
    if x.n % 4 != 0 {
        return Err(Error::Input("Witt class comparison needs dimension divisible by 4".into()));
    }
    let dp = dp_model(x, None)?;
    let f = dp.middle_form.ok_or_else(|| Error::Internal("missing middle form".into()))?;
    witt_equal(&f, &regular_intersection_form(x)?)
}

/// Degrees and indices of algebra generators of a connected algebra with
/// zero differential: a standard complement of the decomposables in each degree.
fn algebra_generators(h: &Cdga) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 1..=h.top() {
        let mut dec = Vec::new();
        for i in 1..r {
            for x in 0..h.dim(i) {
                for y in 0..h.dim(r - i) {
                    dec.push(h.mul(i, &h.basis_elem(i, x).v, r - i, &h.basis_elem(r - i, y).v));
                }
            }
        }
        for k in complement_std(&span_basis(&dec, h.dim(r))) {
            out.push((r, k));
        }
    }
    out
}

/// Suspension of a closed manifold with a formal model `link` (zero
/// differential): two cone points with link `link`, regular part modelled by
/// `H ⊗ Λ(z_g, u_g)` with `dz_g = u_g` for each generator `g` of `H`.
pub fn suspension(link: &Cdga, fundamental: &[Q]) -> Result<PseudomanifoldModel> {
    if (0..=link.top()).any(|r| !link.d(r).is_zero()) {
        return Err(Error::Input("suspension needs a link model with zero differential".into()));
    }
    let n = link.top() + 1;
    let target = Cdga::direct_sum(&[link.clone(), link.clone()]);
    let maps = (0..=link.top())
        .map(|r| RatMatrix::identity(link.dim(r)).vstack(&RatMatrix::identity(link.dim(r))))
        .collect();
    let mut f = CdgaMorphism::new(link.clone(), target.clone(), maps)?;
    let mut a = link.clone();
    for (c, (r, k)) in algebra_generators(link).into_iter().enumerate() {
        let u = format!("u{}", c + 1);
        let z = format!("z{}", c + 1);
        let a1 = a.extend(&u, r + 1, &vec![Q::zero(); a.dim(r + 2)], n + 1)?;
        f = extend_morphism(&f, &a1, r + 1, &vec![Q::zero(); target.dim(r + 1)])?;
        let du = a1.elem(&u)?.v;
        let a2 = a1.extend(&z, r, &du, n + 1)?;
        let mut img = vec![Q::zero(); target.dim(r)];
        img[k] = Q::one();
        f = extend_morphism(&f, &a2, r, &img)?;
        a = a2;
    }
    let neg: Vec<Q> = fundamental.iter().map(|v| -v).collect();
    PseudomanifoldModel::new(n, a, vec![link.clone(), link.clone()], f.maps, vec![fundamental.to_vec(), neg], None)
}

/// Closed formal manifold of dimension `2m` with cohomology `Q, Q^k, Q` in
/// degrees `0, m, 2m` and middle cup product given by `gram`.
pub fn closed_formal(m: usize, gram: &RatMatrix) -> Result<PseudomanifoldModel> {
    if m == 0 {
        return Err(Error::Input("middle degree must be positive".into()));
    }
    let form = BilinearSpace::for_degree(gram.clone(), m)?;
    if form.is_degenerate() {
        return Err(Error::Input("middle form is degenerate".into()));
    }
    let k = gram.rows();
    let mut names: Vec<Vec<String>> = vec![vec![]; 2 * m + 1];
    names[0].push("1".into());
    names[m] = (1..=k).map(|i| format!("e{i}")).collect();
    names[2 * m].push("w".into());
    let mut b = crate::cdga::CdgaBuilder::new(names);
    b.set_unit(0);
    for i in 0..k {
        for j in 0..k {
            b.set_product(m, i, m, j, vec![gram.get(i, j).clone()]);
        }
    }
    let a = b.build();
    PseudomanifoldModel::closed(2 * m, a, vec![q(1)])
}

/// Thom space of a rank `rank` vector bundle with Euler class `euler` over a
/// closed `base_dim`-manifold with formal cohomology algebra `hb`. The sphere
/// bundle and disk bundle are modelled by `H_B ⊗ Λ(a)` and `H_B ⊗ Λ(a, b)`.
pub fn thom_space(
    hb: &Cdga,
    euler: &[Q],
    rank: usize,
    base_dim: usize,
    base_fundamental: &[Q],
) -> Result<PseudomanifoldModel> {
    if rank % 2 == 1 {
        return Err(Error::Unsupported("odd-rank bundles are not supported".into()));
    }
    if rank < 2 {
        return Err(Error::Input("bundle rank must be at least 2".into()));
    }
    if (0..=hb.top()).any(|r| !hb.d(r).is_zero()) {
        return Err(Error::Input("base model must have zero differential".into()));
    }
    if hb.top() != base_dim {
        return Err(Error::Input(format!("base model must have top degree {base_dim}")));
    }
    if euler.len() != hb.dim(rank) {
        return Err(Error::Input(format!("Euler class must lie in degree {rank}")));
    }
    if base_fundamental.len() != hb.dim(base_dim) {
        return Err(Error::Input("base fundamental functional has wrong length".into()));
    }
    for r in 0..=base_dim {
        let g = cup_pairing(hb, base_fundamental, base_dim, r)?;
        if g.rank() != hb.dim(r) || g.rank() != hb.dim(base_dim - r) {
            return Err(Error::Input(format!("base fails Poincaré duality in degree {r}")));
        }
    }
    let n = base_dim + rank;
    let sphere = hb.extend("a", rank - 1, euler, n - 1)?;
    let d1 = hb.extend("b", rank, &vec![Q::zero(); hb.dim(rank + 1)], n + 1)?;
    let mut eb = euler.to_vec();
    eb.resize(d1.dim(rank), Q::zero());
    let (_, bi) = d1.find("b").ok_or_else(|| Error::Internal("missing generator b".into()))?;
    eb[bi] -= Q::one();
    let disk = d1.extend("a", rank - 1, &eb, n + 1)?;
    let inc = (0..=hb.top())
        .map(|r| {
            let mut m = RatMatrix::zeros(sphere.dim(r), hb.dim(r));
            if hb.dim(r) > 0 {
                m.set_block(0, 0, &RatMatrix::identity(hb.dim(r)));
            }
            m
        })
        .collect();
    let f0 = CdgaMorphism::new(hb.clone(), sphere.clone(), inc)?;
    let f1 = extend_morphism(&f0, &d1, rank, &vec![Q::zero(); sphere.dim(rank)])?;
    let f2 = extend_morphism(&f1, &disk, rank - 1, &sphere.elem("a")?.v)?;
    if let Some(v) = f2.validate().first() {
        return Err(Error::Internal(format!("restriction to the sphere bundle: {v}")));
    }
    let layout = hb.extension_layout(rank - 1, n - 1);
    let fund: Vec<Q> = layout[n - 1]
        .iter()
        .map(|&(i, p, a)| if i == 1 && p == base_dim { base_fundamental[a].clone() } else { Q::zero() })
        .collect();
    PseudomanifoldModel::new(n, disk, vec![sphere], f2.maps, vec![fund], None)
}

/// Predicted class of a Thom space from the base dimension, the rank and
/// `dim H^s(B)` for the middle degree `s` of the sphere bundle.
pub fn classify_thom(base_dim: usize, rank: usize, middle_base_dim: usize) -> Classification {
    let n = base_dim + rank;
    if n % 2 == 0 {
        return Classification::EvenDim;
    }
    let fits = if base_dim % 2 == 1 { rank / 2 <= (base_dim - 1) / 2 + 1 } else { (rank - 1) / 2 <= base_dim / 2 };
    if fits {
        Classification::LSpace
    } else if middle_base_dim == 0 {
        Classification::Witt
    } else {
        Classification::Neither
    }
}

/// Cohomology of `CP^k` as a truncated polynomial algebra.
pub fn cpn(k: usize) -> Result<Cdga> {
    Cdga::free(&[("x", 2)], 2 * k)
}

/// Cohomology of the `k`-torus.
pub fn torus(k: usize) -> Result<Cdga> {
    let names: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    let gens: Vec<(&str, usize)> = names.iter().map(|s| (s.as_str(), 1)).collect();
    Cdga::free(&gens, k)
}

/// Fundamental functional on the one-dimensional top degree of `a`.
pub fn top_functional(a: &Cdga) -> Vec<Q> {
    let mut f = vec![Q::zero(); a.dim(a.top())];
    if let Some(v) = f.first_mut() {
        *v = Q::one();
    }
    f
}

/// Model of the closed 9-manifold `(S^3 x S^6) # (S^4 x S^5)` from its
/// generators `s3, s4, s5, s6` and the killing generators `b6, b71, b72, b8`,
/// built through degree 10.
pub fn b9_model() -> Result<Cdga> {
    let top = 10;
    let mut a = Cdga::free(&[("s3", 3), ("s4", 4), ("s5", 5), ("s6", 6)], top)?;
    let e = |a: &Cdga, x: &str, y: &str| -> Result<Vec<Q>> {
        let (u, v) = (a.elem(x)?, a.elem(y)?);
        Ok(a.mul_e(&u, &v).v)
    };
    let dv = e(&a, "s3", "s4")?;
    a = a.extend("b6", 6, &dv, top)?;
    let dv = e(&a, "s4", "s4")?;
    a = a.extend("b71", 7, &dv, top)?;
    let dv = e(&a, "s5", "s3")?;
    a = a.extend("b72", 7, &dv, top)?;
    let p = e(&a, "s3", "s6")?;
    let r = e(&a, "s4", "s5")?;
    let dv: Vec<Q> = p.iter().zip(&r).map(|(x, y)| x - y).collect();
    a.extend("b8", 8, &dv, top)
}

/// Cohomology ring of the 9-manifold as the image of its model under the
/// formality map sending the killing generators to zero.
pub fn b9_formality() -> Result<(Cdga, CdgaMorphism)> {
    let a = b9_model()?;
    let gens = ["b6", "b71", "b72", "b8"].iter().map(|g| a.elem(g)).collect::<Result<Vec<_>>>()?;
    let i = crate::cdga::differential_ideal(&a, &gens)?;
    crate::cdga::quotient(&a, &i)
}

/// Cohomology algebra of the 9-manifold, truncated at its dimension.
pub fn b9_base() -> Result<Cdga> {
    Ok(b9_formality()?.0.truncated(9))
}

/// Thom space of the rank-4 bundle over the 9-manifold with Euler class `s4`.
pub fn b9_thom() -> Result<PseudomanifoldModel> {
    let hb = b9_base()?;
    let e = hb.elem("s4")?.v;
    thom_space(&hb, &e, 4, 9, &top_functional(&hb))
}

/// Suspension of `CP^k`.
pub fn sigma_cpn(k: usize) -> Result<PseudomanifoldModel> {
    let l = cpn(k)?;
    suspension(&l, &top_functional(&l))
}

/// Suspension of the 2-torus.
pub fn sigma_t2() -> Result<PseudomanifoldModel> {
    let l = torus(2)?;
    suspension(&l, &top_functional(&l))
}

/// Finite model of `S^2 x S^3`: `Λ(x, y, z)` with `dy = x^2` divided by the
/// acyclic ideal `(x^3, xy)`.
pub fn s2xs3() -> Result<Cdga> {
    let b = Cdga::free(&[("x", 2)], 8)?;
    let x = b.elem("x")?;
    let b = b.extend("y", 3, &b.mul_e(&x, &x).v, 8)?;
    let b = b.extend("z", 3, &vec![Q::zero(); b.dim(4)], 8)?;
    let x = b.elem("x")?;
    let gens = [b.mul_e(&b.mul_e(&x, &x), &x), b.mul_e(&x, &b.elem("y")?)];
    let i = crate::cdga::differential_ideal(&b, &gens)?;
    let (m, _) = crate::cdga::quotient(&b, &i)?;
    Ok(m.truncated(5))
}

/// Constant functional helper used by tests and the example corpus.
pub fn is_nonzero_functional(f: &[Q]) -> bool {
    !is_zero_vec(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_cp3_dp() {
        let x = sigma_cpn(3).unwrap();
        assert_eq!(classify(&x).unwrap().class, Classification::Witt);
        let dp = dp_model(&x, None).unwrap();
        assert_eq!(dp.betti, vec![1, 0, 0, 1, 1, 0, 0, 1]);
        assert!(dp.goodness.good(), "{:?}", dp.goodness.failures());
    }

    #[test]
    fn sigma_cp2_neither() {
        let x = sigma_cpn(2).unwrap();
        assert_eq!(classify(&x).unwrap().class, Classification::Neither);
        assert!(matches!(dp_model(&x, None), Err(Error::Unsupported(_))));
        let i = intersection_space_model(&x, lower_middle(5)).unwrap();
        let ni = normal_intersection_space_model(&x, lower_middle(5)).unwrap();
        assert_eq!(i.betti()[..=5], [1, 1, 0, 1, 1, 0]);
        assert_eq!(ni.betti()[..=5], [1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn sigma_t2_lagrangian() {
        let x = sigma_t2().unwrap();
        let rep = classify(&x).unwrap();
        assert_eq!(rep.class, Classification::LSpace);
        assert!(matches!(dp_model(&x, None), Err(Error::Precondition(_))));
        let alpha = x.links[0].elem("a1").unwrap().v;
        let keeps = vec![vec![alpha.clone()], vec![alpha]];
        let li = lagrangian_intersection_space_model(&x, Some(&keeps)).unwrap();
        assert_eq!(li.betti()[..4], [1, 1, 2, 0]);
    }

    #[test]
    fn sigma_s2_top_cells_kill_link_classes() {
        let x = sigma_cpn(1).unwrap();
        let dp = dp_model(&x, None).unwrap();
        assert_eq!(dp.betti, vec![1, 0, 0, 1]);
        let failed: Vec<&str> = dp.goodness.failures().iter().map(|c| c.condition.as_str()).collect();
        assert_eq!(failed, vec!["phi_2 injective", "phi_2 iso"]);
    }

    #[test]
    fn b9_thom_dp() {
        let hb = b9_base().unwrap();
        assert_eq!(hb.betti(), vec![1, 0, 0, 1, 1, 1, 1, 0, 0, 1]);
        let x = b9_thom().unwrap();
        let s6 = x.links[0].elem("s6").unwrap().v;
        let dp = dp_model(&x, Some(&[vec![s6]])).unwrap();
        let nz: Vec<usize> = (0..dp.betti.len()).filter(|&r| dp.betti[r] > 0).collect();
        assert_eq!(nz, vec![0, 4, 6, 7, 9, 13]);
        assert!(dp.betti.iter().all(|&b| b <= 1));
        assert!(dp.goodness.good(), "{:?}", dp.goodness.failures());
        let auto = dp_model(&x, None).unwrap();
        assert!(auto.goodness.good(), "{:?}", auto.goodness.failures());
    }

    #[test]
    fn closed_and_thom_witt() {
        let x = closed_formal(2, &RatMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap();
        assert!(witt_class_check(&x).unwrap());
        let s2 = cpn(1).unwrap();
        let t = thom_space(&s2, &[q(2)], 2, 2, &[q(1)]).unwrap();
        let dp = dp_model(&t, None).unwrap();
        assert_eq!(dp.betti, vec![1, 0, 1, 0, 1]);
        assert!(dp.goodness.very_good(), "{:?}", dp.goodness.failures());
        assert!(witt_class_check(&t).unwrap());
    }
}
