//! Command-line front end, JSON interchange formats and the bundled corpus.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::cdga::{cohomology_algebra, differential_ideal, quotient, sign, Cdga, Element};
use crate::exactq::{fmt_q, parse_q, unit_vec, RatMatrix, Q};
use crate::quadforms::{witt_equal, witt_invariants, BilinearSpace, FormKind};
use crate::spaces::{
    classify, classify_thom, cut_degree, dp_model, intersection_space_model, lagrangian_intersection_space_model,
    lower_middle, normal_intersection_space_model, regular_intersection_form, thom_space, upper_middle, witt_class_check,
    Classification, ClassifyReport, DpResult, PseudomanifoldModel,
};
use crate::truncation::{attach_top_cell_effect, cotruncate, lagrangian_cotruncate, truncate};
use crate::{Error, Result};

/// A rational literal, written as `"p/q"` (integers are also accepted on input).
#[derive(Clone, Debug, PartialEq)]
pub struct Rat(pub Q);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(Rat(Q::from_integer(i.into()))),
            Raw::Str(s) => parse_q(&s).map(Rat).map_err(D::Error::custom),
        }
    }
}

fn rats(v: &[Q]) -> Vec<Rat> {
    v.iter().cloned().map(Rat).collect()
}

fn unrat(v: &[Rat]) -> Vec<Q> {
    v.iter().map(|r| r.0.clone()).collect()
}

/// A CDGA: per-degree basis names, sparse differential entries
/// `(degree, row, col, value)` and sparse products `(x, y, coefficients)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CdgaDoc {
    pub top_degree: usize,
    pub basis: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differential: Vec<(usize, usize, usize, Rat)>,
    #[serde(default)]
    pub products: Vec<(String, String, Vec<Rat>)>,
    /// Coordinates of the unit in degree 0; the first basis element by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<Rat>>,
    /// Optional fundamental functional on the top degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fundamental: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PseudomanifoldDoc {
    pub n: usize,
    pub regular: CdgaDoc,
    pub links: Vec<CdgaDoc>,
    /// Display names of the links, e.g. "CP^2".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_names: Option<Vec<String>>,
    /// Per degree, the rows of the restriction matrix to the sum of the links.
    pub restriction: Vec<Vec<Vec<Rat>>>,
    pub link_fundamentals: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regular_fundamental: Option<Vec<Rat>>,
    /// Per link, names of cocycles spanning a Lagrangian of the middle cohomology.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keeps: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum EulerDoc {
    Name(String),
    Coords(Vec<Rat>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ThomDoc {
    /// Base model; a nonzero differential is replaced by its cohomology.
    pub base: CdgaDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_dim: Option<usize>,
    /// Generators sent to zero by a formality map of the base model.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kill: Vec<String>,
    pub euler: EulerDoc,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keeps: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormDoc {
    pub gram: Vec<Vec<Rat>>,
    #[serde(default)]
    pub skew: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// Top-level JSON document, tagged by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceDoc {
    Cdga(CdgaDoc),
    Formal(CdgaDoc),
    Pseudomanifold(PseudomanifoldDoc),
    Thom(ThomDoc),
    Form(FormDoc),
}

/// Converts a document into an algebra and checks the CDGA axioms.
pub fn cdga_from_doc(doc: &CdgaDoc, formal: bool) -> Result<Cdga> {
    let top = doc.top_degree;
    if doc.basis.len() != top + 1 {
        return Err(Error::Input(format!("basis: expected {} degree lists, found {}", top + 1, doc.basis.len())));
    }
    let mut index: HashMap<&str, (usize, usize)> = HashMap::new();
    for (r, ns) in doc.basis.iter().enumerate() {
        for (i, n) in ns.iter().enumerate() {
            if index.insert(n.as_str(), (r, i)).is_some() {
                return Err(Error::Input(format!("basis: duplicate name '{n}'")));
            }
        }
    }
    let dim = |r: usize| doc.basis.get(r).map_or(0, |b| b.len());
    if formal && !doc.differential.is_empty() {
        return Err(Error::Input("differential: a formal document has zero differential".into()));
    }
    let mut d: Vec<RatMatrix> =
        (0..=top).map(|r| RatMatrix::zeros(if r < top { dim(r + 1) } else { 0 }, dim(r))).collect();
    for (k, (r, row, col, v)) in doc.differential.iter().enumerate() {
        if *r >= top || *row >= dim(r + 1) || *col >= dim(*r) {
            return Err(Error::Input(format!("differential[{k}]: entry ({r},{row},{col}) out of range")));
        }
        d[*r].set(*row, *col, v.0.clone());
    }
    let mut prod: HashMap<(usize, usize, usize, usize), Vec<Q>> = HashMap::new();
    for (k, (x, y, v)) in doc.products.iter().enumerate() {
        let look = |n: &str| index.get(n).copied().ok_or_else(|| Error::Input(format!("products[{k}]: unknown name '{n}'")));
        let ((i, a), (j, b)) = (look(x)?, look(y)?);
        if i + j > top {
            return Err(Error::Input(format!("products[{k}]: degree {} above top", i + j)));
        }
        if v.len() != dim(i + j) {
            return Err(Error::Input(format!("products[{k}]: expected {} coefficients", dim(i + j))));
        }
        prod.insert((i, a, j, b), unrat(v));
    }
    let keys: Vec<_> = prod.keys().cloned().collect();
    for (i, a, j, b) in keys {
        if !prod.contains_key(&(j, b, i, a)) {
            let v = prod[&(i, a, j, b)].iter().map(|x| x * sign(i * j)).collect();
            prod.insert((j, b, i, a), v);
        }
    }
    if dim(0) == 0 {
        return Err(Error::Input("basis: degree 0 is empty".into()));
    }
    let unit = match &doc.unit {
        Some(u) if u.len() != dim(0) => return Err(Error::Input("unit: wrong number of coordinates".into())),
        Some(u) => unrat(u),
        None => unit_vec(dim(0), 0),
    };
    if unit == unit_vec(dim(0), 0) {
        for r in 0..=top {
            for k in 0..dim(r) {
                let e = unit_vec(dim(r), k);
                prod.entry((0, 0, r, k)).or_insert_with(|| e.clone());
                prod.entry((r, k, 0, 0)).or_insert(e);
            }
        }
    }
    let a = Cdga::from_parts(doc.basis.clone(), d, prod, unit)?;
    if let Some(v) = a.validate().first() {
        return Err(Error::Input(format!("axiom '{}' violated: {}", v.axiom, v.detail)));
    }
    Ok(a)
}

/// Serializes an algebra. Products with a standard unit are left implicit.
pub fn cdga_to_doc(a: &Cdga) -> CdgaDoc {
    let top = a.top();
    let basis: Vec<Vec<String>> = (0..=top).map(|r| a.names(r).to_vec()).collect();
    let std_unit = a.dim(0) > 0 && a.unit() == unit_vec(a.dim(0), 0).as_slice();
    let mut differential = Vec::new();
    for r in 0..top {
        let m = a.d(r);
        for row in 0..m.rows() {
            for col in 0..m.cols() {
                if !m.get(row, col).is_zero() {
                    differential.push((r, row, col, Rat(m.get(row, col).clone())));
                }
            }
        }
    }
    let mut products = Vec::new();
    for i in 0..=top {
        for j in i..=top - i {
            for x in 0..a.dim(i) {
                for y in 0..a.dim(j) {
                    if (i == j && y < x) || (std_unit && ((i == 0 && x == 0) || (j == 0 && y == 0))) {
                        continue;
                    }
                    if let Some(v) = a.basis_product(i, x, j, y) {
                        products.push((a.names(i)[x].clone(), a.names(j)[y].clone(), rats(v)));
                    }
                }
            }
        }
    }
    CdgaDoc {
        top_degree: top,
        basis,
        differential,
        products,
        unit: if std_unit { None } else { Some(rats(a.unit())) },
        fundamental: None,
        description: None,
    }
}

/// Serializes a pseudomanifold model.
pub fn pseudomanifold_to_doc(x: &PseudomanifoldModel, keeps: Option<Vec<Vec<String>>>) -> PseudomanifoldDoc {
    PseudomanifoldDoc {
        n: x.n,
        regular: cdga_to_doc(&x.regular),
        links: x.links.iter().map(cdga_to_doc).collect(),
        link_names: None,
        restriction: (0..=x.regular.top())
            .map(|r| {
                let m = x.restriction.map(r);
                (0..m.rows()).map(|i| rats(m.row(i))).collect()
            })
            .collect(),
        link_fundamentals: x.link_fundamentals.iter().map(|f| rats(f)).collect(),
        regular_fundamental: x.regular_fundamental.as_ref().map(|f| rats(f)),
        keeps,
        description: None,
    }
}

/// Metadata of a Thom space construction.
#[derive(Clone, Debug)]
pub struct ThomInfo {
    pub base: Cdga,
    pub base_dim: usize,
    pub rank: usize,
}

/// A parsed document.
#[derive(Clone, Debug)]
pub enum Space {
    Algebra { a: Cdga, fundamental: Option<Vec<Q>> },
    Pseudo { x: PseudomanifoldModel, keeps: Option<Vec<Vec<Vec<Q>>>>, thom: Option<ThomInfo>, link_names: Vec<String> },
    Form(BilinearSpace),
}

fn resolve_keeps(links: &[Cdga], keeps: &Option<Vec<Vec<String>>>) -> Result<Option<Vec<Vec<Vec<Q>>>>> {
    let Some(k) = keeps else { return Ok(None) };
    if k.len() != links.len() {
        return Err(Error::Input(format!("keeps: expected {} lists, found {}", links.len(), k.len())));
    }
    let mut out = Vec::new();
    for (l, names) in links.iter().zip(k) {
        out.push(names.iter().map(|n| l.elem(n).map(|e| e.v)).collect::<Result<Vec<_>>>()?);
    }
    Ok(Some(out))
}

fn base_algebra(doc: &ThomDoc) -> Result<(Cdga, usize)> {
    let raw = cdga_from_doc(&doc.base, false)?;
    let base_dim = doc.base_dim.unwrap_or(raw.top());
    let h = if !doc.kill.is_empty() {
        let gens = doc.kill.iter().map(|g| raw.elem(g)).collect::<Result<Vec<Element>>>()?;
        quotient(&raw, &differential_ideal(&raw, &gens)?)?.0
    } else if (0..=raw.top()).all(|r| raw.d(r).is_zero()) {
        raw
    } else {
        cohomology_algebra(&raw)?
    };
    if h.top() < base_dim {
        return Err(Error::Input(format!("base model stops below degree {base_dim}")));
    }
    Ok((h.truncated(base_dim), base_dim))
}

/// Builds the object described by a document.
pub fn space_from_doc(doc: &SpaceDoc) -> Result<Space> {
    match doc {
        SpaceDoc::Cdga(c) | SpaceDoc::Formal(c) => {
            let a = cdga_from_doc(c, matches!(doc, SpaceDoc::Formal(_)))?;
            Ok(Space::Algebra { a, fundamental: c.fundamental.as_ref().map(|f| unrat(f)) })
        }
        SpaceDoc::Pseudomanifold(p) => {
            let regular = cdga_from_doc(&p.regular, false).map_err(|e| prefix("regular", e))?;
            let links = p
                .links
                .iter()
                .enumerate()
                .map(|(i, l)| cdga_from_doc(l, false).map_err(|e| prefix(&format!("links[{i}]"), e)))
                .collect::<Result<Vec<_>>>()?;
            let ldims: Vec<usize> = (0..=regular.top()).map(|r| links.iter().map(|l| l.dim(r)).sum()).collect();
            if p.restriction.len() != regular.top() + 1 {
                return Err(Error::Input("restriction: one matrix per degree of the regular model expected".into()));
            }
            let mut maps = Vec::new();
            for (r, rows) in p.restriction.iter().enumerate() {
                if rows.len() != ldims[r] || rows.iter().any(|row| row.len() != regular.dim(r)) {
                    return Err(Error::Input(format!("restriction[{r}]: wrong shape")));
                }
                maps.push(RatMatrix::from_rows(rows.iter().map(|row| unrat(row)).collect(), regular.dim(r)));
            }
            let keeps = resolve_keeps(&links, &p.keeps)?;
            let link_names = match &p.link_names {
                Some(v) if v.len() == links.len() => v.clone(),
                Some(v) => return Err(Error::Input(format!("link_names: expected {} names, found {}", links.len(), v.len()))),
                None => (1..=links.len()).map(|i| format!("L_{i}")).collect(),
            };
            let x = PseudomanifoldModel::new(
                p.n,
                regular,
                links,
                maps,
                p.link_fundamentals.iter().map(|f| unrat(f)).collect(),
                p.regular_fundamental.as_ref().map(|f| unrat(f)),
            )?;
            Ok(Space::Pseudo { x, keeps, thom: None, link_names })
        }
        SpaceDoc::Thom(t) => {
            if t.rank % 2 == 1 {
                return Err(Error::Unsupported("odd-rank bundles are classified but not modelled".into()));
            }
            let (hb, base_dim) = base_algebra(t)?;
            let euler = match &t.euler {
                EulerDoc::Name(n) => {
                    let e = hb.elem(n)?;
                    if e.deg != t.rank {
                        return Err(Error::Input(format!("euler: '{n}' has degree {}, expected {}", e.deg, t.rank)));
                    }
                    e.v
                }
                EulerDoc::Coords(v) => unrat(v),
            };
            let mut fund = vec![Q::zero(); hb.dim(base_dim)];
            if let Some(f) = fund.first_mut() {
                *f = Q::from_integer(1.into());
            }
            if let Some(f) = &t.base.fundamental {
                fund = unrat(f);
            }
            let x = thom_space(&hb, &euler, t.rank, base_dim, &fund)?;
            let keeps = resolve_keeps(&x.links, &t.keeps)?;
            let thom = Some(ThomInfo { base: hb, base_dim, rank: t.rank });
            Ok(Space::Pseudo { x, keeps, thom, link_names: vec!["S_E".into()] })
        }
        SpaceDoc::Form(f) => {
            let k = f.gram.len();
            if f.gram.iter().any(|r| r.len() != k) {
                return Err(Error::Input("gram: matrix is not square".into()));
            }
            let g = RatMatrix::from_rows(f.gram.iter().map(|r| unrat(r)).collect(), k);
            let kind = if f.skew { FormKind::Skew } else { FormKind::Symmetric };
            Ok(Space::Form(BilinearSpace::new(g, kind)?))
        }
    }
}

fn prefix(p: &str, e: Error) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("{p}: {m}")),
        other => other,
    }
}

/// Parses a JSON document.
pub fn parse_doc(text: &str) -> Result<SpaceDoc> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("json: {e}")))
}

/// The bundled example corpus: `(name, description, json)`.
pub const CORPUS: &[(&str, &str, &str)] = &[
    ("sigma-cp2", "suspension of CP^2 (n = 5, two singular points)", include_str!("../corpus/sigma-cp2.json")),
    ("sigma-cp3", "suspension of CP^3 (n = 7, two singular points)", include_str!("../corpus/sigma-cp3.json")),
    ("sigma-t2", "suspension of the 2-torus (n = 3, two singular points)", include_str!("../corpus/sigma-t2.json")),
    ("nodal-link", "model of S^2 x S^3, the link of a nodal hypersurface singularity", include_str!("../corpus/nodal-link.json")),
    ("b9-thom", "Thom space of a rank 4 bundle over (S^3 x S^6) # (S^4 x S^5)", include_str!("../corpus/b9-thom.json")),
    ("thom-s2-deg2", "Thom space of the degree 2 plane bundle over S^2", include_str!("../corpus/thom-s2-deg2.json")),
    ("cp2-cp2bar", "closed formal 4-manifold with intersection form diag(1, -1)", include_str!("../corpus/cp2-cp2bar.json")),
];

/// Looks up a bundled example; `thom-439` and `s2xs3` are aliases of `b9-thom` and `nodal-link`.
pub fn corpus_entry(name: &str) -> Option<&'static str> {
    let name = match name {
        "thom-439" => "b9-thom",
        "s2xs3" => "nodal-link",
        other => other,
    };
    CORPUS.iter().find(|(n, _, _)| *n == name).map(|(_, _, j)| *j)
}

fn load(path: &str) -> Result<Space> {
    let text = if Path::new(path).exists() {
        std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))?
    } else {
        let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or(path);
        corpus_entry(stem).ok_or_else(|| Error::Input(format!("{path}: no such file or bundled example")))?.to_string()
    };
    space_from_doc(&parse_doc(&text)?)
}

#[derive(Parser, Debug)]
#[command(name = "isectq", version, about = "Rational models of intersection spaces and Poincaré duality approximations")]
pub struct Cli {
    /// Emit machine-readable JSON instead of text tables.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a document against its axioms.
    Validate { file: String },
    /// Betti numbers and cohomology ring on generators.
    Cohomology { file: String },
    /// Truncation below degree K.
    Truncate {
        file: String,
        #[arg(long)]
        k: usize,
    },
    /// Cotruncation from degree K on.
    Cotruncate {
        file: String,
        #[arg(long)]
        k: usize,
    },
    /// Middle cotruncation keeping the named Lagrangian classes.
    LagCotruncate {
        file: String,
        /// Comma-separated basis names.
        #[arg(long, value_delimiter = ',')]
        keep: Vec<String>,
    },
    /// Intersection space model for a perversity (an integer, `m` or `n`).
    Isect {
        file: String,
        #[arg(long, required_unless_present = "lagrangian")]
        perversity: Option<String>,
        /// Cotruncate each link separately.
        #[arg(long)]
        normal: bool,
        /// Lagrangian intersection space of an odd-dimensional L-space.
        #[arg(long, conflicts_with = "normal")]
        lagrangian: bool,
    },
    /// Witt / L-space classification.
    Classify { file: String },
    /// Poincaré duality approximation.
    Dp {
        file: String,
        /// Kept classes per link: names separated by `,`, links by `;`.
        #[arg(long)]
        keeps: Option<String>,
        /// Print the good-approximation report.
        #[arg(long)]
        report: bool,
    },
    /// Witt class comparison.
    Witt {
        #[command(subcommand)]
        action: WittAction,
    },
    /// Thom space of a bundle over a closed manifold.
    Thom {
        #[arg(long)]
        base: String,
        /// Basis name of the Euler class; required for even ranks.
        #[arg(long)]
        euler: Option<String>,
        #[arg(long)]
        rank: usize,
    },
    /// Bundled examples.
    Examples {
        #[command(subcommand)]
        action: ExampleAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum WittAction {
    /// Compare the Witt classes of two forms (or of the middle forms of two spaces).
    Compare { first: String, second: String },
}

#[derive(Subcommand, Debug)]
pub enum ExampleAction {
    List,
    Run { name: String },
}

/// Output of one command.
pub struct Report {
    pub text: String,
    pub json: Value,
}

fn betti_table(b: &[usize]) -> String {
    let w = b.iter().map(|x| x.to_string().len()).max().unwrap_or(1).max(format!("{}", b.len()).len());
    let mut deg = String::from("degree");
    let mut bet = String::from("betti ");
    for (r, x) in b.iter().enumerate() {
        let _ = write!(deg, "  {r:>w$}");
        let _ = write!(bet, "  {x:>w$}");
    }
    format!("{deg}\n{bet}\n")
}

fn betti_upto(a: &Cdga, n: usize) -> Vec<usize> {
    let b = a.betti();
    (0..=n).map(|r| b.get(r).copied().unwrap_or(0)).collect()
}

fn trimmed(mut b: Vec<usize>) -> Vec<usize> {
    while b.len() > 1 && b.last() == Some(&0) {
        b.pop();
    }
    b
}

fn matrix_json(m: &RatMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| json!(m.row(i).iter().map(fmt_q).collect::<Vec<_>>())).collect())
}

fn matrix_text(m: &RatMatrix) -> String {
    let rows: Vec<String> =
        (0..m.rows()).map(|i| format!("[{}]", m.row(i).iter().map(fmt_q).collect::<Vec<_>>().join(","))).collect();
    format!("[{}]", rows.join(","))
}

fn form_json(f: &BilinearSpace) -> Result<Value> {
    let mut v = json!({
        "dim": f.dim(),
        "kind": if f.kind == FormKind::Symmetric { "symmetric" } else { "skew" },
        "gram": matrix_json(&f.gram),
    });
    if f.kind == FormKind::Symmetric && !f.is_degenerate() {
        let w = witt_invariants(f)?;
        v["signature"] = json!(w.signature);
        v["discriminant"] = json!(w.discriminant.to_string());
        v["hasse"] = json!(w.hasse.iter().map(|(p, s)| (p.to_string(), *s)).collect::<HashMap<_, _>>());
    }
    Ok(v)
}

fn algebra_of(space: Space) -> Result<(Cdga, Option<Vec<Q>>)> {
    match space {
        Space::Algebra { a, fundamental } => Ok((a, fundamental)),
        _ => Err(Error::Input("this command needs a cdga or formal document".into())),
    }
}

type PseudoParts = (PseudomanifoldModel, Option<Vec<Vec<Vec<Q>>>>, Option<ThomInfo>, Vec<String>);

fn pseudo_of(space: Space) -> Result<PseudoParts> {
    match space {
        Space::Pseudo { x, keeps, thom, link_names } => Ok((x, keeps, thom, link_names)),
        _ => Err(Error::Input("this command needs a pseudomanifold or thom document".into())),
    }
}

fn cohomology_report(a: &Cdga) -> Result<Report> {
    let h = a.cohomology()?;
    let betti = trimmed(h.betti());
    let ring = cohomology_algebra(a)?;
    let mut gens = Vec::new();
    let mut prods = Vec::new();
    for r in 1..=ring.top() {
        for i in 0..ring.dim(r) {
            gens.push((r, ring.names(r)[i].clone()));
        }
    }
    for i in 1..=ring.top() {
        for j in i..=ring.top() - i {
            for x in 0..ring.dim(i) {
                for y in 0..ring.dim(j) {
                    if i == j && y < x {
                        continue;
                    }
                    let p = ring.mul(i, &ring.basis_elem(i, x).v, j, &ring.basis_elem(j, y).v);
                    if p.iter().any(|c| !c.is_zero()) {
                        let lhs = format!("{}*{}", ring.names(i)[x], ring.names(j)[y]);
                        prods.push((lhs, ring.label(&Element::new(i + j, p))));
                    }
                }
            }
        }
    }
    let mut text = betti_table(&betti);
    let _ = writeln!(text, "classes: {}", gens.iter().map(|(r, n)| format!("{n} ({r})")).collect::<Vec<_>>().join(", "));
    for (l, r) in &prods {
        let _ = writeln!(text, "  {l} = {r}");
    }
    let json = json!({
        "betti": betti,
        "classes": gens.iter().map(|(r, n)| json!({"degree": r, "name": n})).collect::<Vec<_>>(),
        "products": prods.iter().map(|(l, r)| json!({"product": l, "value": r})).collect::<Vec<_>>(),
    });
    Ok(Report { text, json })
}

fn model_report(title: &str, a: &Cdga, upto: Option<usize>) -> Report {
    let betti = match upto {
        Some(n) => betti_upto(a, n),
        None => trimmed(a.betti()),
    };
    let text = format!("{title}\n{}", betti_table(&betti));
    let json = json!({"betti": betti, "model": SpaceDoc::Cdga(cdga_to_doc(a))});
    Report { text, json }
}

fn classify_text(rep: &ClassifyReport, n: usize, names: &[String]) -> String {
    let s = rep.s.unwrap_or(0);
    let q = |d: usize| if d == 1 { "Q".to_string() } else { format!("Q^{d}") };
    match rep.class {
        Classification::EvenDim => format!("EvenDim (n = {n})"),
        Classification::Witt => format!("Witt (H^{s}(L_i) = 0 for every link)"),
        Classification::LSpace => format!("LSpace (every link middle form H^{s}(L_i) has a Lagrangian)"),
        Classification::Neither => {
            let (i, l) = rep.links.iter().enumerate().find(|(_, l)| !l.hyperbolic).expect("a failing link");
            let why = match l.signature {
                _ if l.middle_dim % 2 == 1 => format!("rank {}", l.middle_dim),
                Some(sig) if sig != 0 => format!("signature {sig}"),
                _ => "nontrivial Witt class".to_string(),
            };
            format!("Neither (H^{s}({}) = {}, no Lagrangian: {why})", names[i], q(l.middle_dim))
        }
    }
}

fn classify_report(x: &PseudomanifoldModel, thom: Option<&ThomInfo>, names: &[String]) -> Result<Report> {
    let rep = classify(x)?;
    let mut text = classify_text(&rep, x.n, names);
    text.push('\n');
    let mut links = Vec::new();
    for (i, l) in rep.links.iter().enumerate() {
        let sig = l.signature.map_or("-".to_string(), |s| s.to_string());
        let _ = writeln!(
            text,
            "  link {} ({}): dim H^{} = {}, {}, signature {sig}, hyperbolic {}",
            i + 1,
            names[i],
            rep.s.unwrap_or(0),
            l.middle_dim,
            if l.form.kind == FormKind::Symmetric { "symmetric" } else { "skew" },
            l.hyperbolic
        );
        links.push(json!({
            "middle_dim": l.middle_dim,
            "form": form_json(&l.form)?,
            "signature_zero": l.signature.is_none_or(|s| s == 0),
            "witt_zero": l.hyperbolic,
            "lagrangian": l.lagrangian.as_ref().map(|v| v.iter().map(|c| x.links[i].label(&Element::new(rep.s.unwrap_or(0), c.clone()))).collect::<Vec<_>>()),
        }));
    }
    let mut json = json!({"n": x.n, "class": rep.class.as_str(), "summary": classify_text(&rep, x.n, names), "links": links});
    if let Some(t) = thom {
        let predicted = thom_prediction(x, t);
        let _ = writeln!(text, "  bundle criterion: {}", predicted.as_str());
        json["bundle_criterion"] = json!(predicted.as_str());
    }
    Ok(Report { text, json })
}

/// Classification of an odd-rank Thom space from the bundle criterion alone;
/// the rational Euler class of an odd-rank bundle vanishes.
fn odd_rank_thom(base: &CdgaDoc, rank: usize) -> Result<Report> {
    let doc = ThomDoc {
        base: base.clone(),
        base_dim: None,
        kill: vec![],
        euler: EulerDoc::Coords(vec![]),
        rank,
        keeps: None,
        description: None,
    };
    let (hb, base_dim) = base_algebra(&doc)?;
    let n = base_dim + rank;
    let s = (n - 1) / 2;
    let hs = if s <= base_dim { hb.cohomology()?.dim(s) } else { 0 };
    let class = classify_thom(base_dim, rank, hs);
    let text = format!("Thom space, n = {n}, odd rank {rank}: classification only, no model
bundle criterion: {}
", class.as_str());
    Ok(Report { text, json: json!({"n": n, "rank": rank, "class": class.as_str(), "bundle_criterion": class.as_str()}) })
}

/// Class predicted by the bundle criterion for a Thom space.
pub fn thom_prediction(x: &PseudomanifoldModel, t: &ThomInfo) -> Classification {
    let s = (x.n - 1) / 2;
    let hs = if s <= t.base.top() { t.base.cohomology().map(|h| h.dim(s)).unwrap_or(0) } else { 0 };
    classify_thom(t.base_dim, t.rank, hs)
}

fn dp_report(x: &PseudomanifoldModel, keeps: Option<&[Vec<Vec<Q>>]>, report: bool) -> Result<Report> {
    let dp = dp_model(x, keeps)?;
    let mut text = format!("DP approximation, n = {}, class {}\n", x.n, dp.classification.as_str());
    text += &betti_table(&dp.betti);
    let nz: Vec<String> = (0..dp.betti.len()).filter(|&r| dp.betti[r] > 0).map(|r| r.to_string()).collect();
    let _ = writeln!(text, "nonzero degrees: {{{}}}", nz.join(","));
    let dual = dp.betti.len() == x.n + 1
        && dp.betti[0] == 1
        && dp.betti[x.n] == 1
        && (0..=x.n).all(|r| dp.betti[r] == dp.betti[x.n - r]);
    let _ = writeln!(text, "Poincaré duality of Betti numbers: {}", if dual { "ok" } else { "FAILED" });
    let _ = writeln!(text, "good: {}, very good: {}", dp.goodness.good(), dp.goodness.very_good());
    let mut json = dp_json(&dp)?;
    json["duality"] = json!(dual);
    if report {
        for c in &dp.goodness.checks {
            let tag = if c.very_good { " (very good)" } else { "" };
            let _ = writeln!(text, "  [{}] {}{tag}", if c.passed { "pass" } else { "FAIL" }, c.condition);
        }
    }
    if let Some(f) = &dp.middle_form {
        let _ = writeln!(text, "middle form on H^{}: {}", x.n / 2, matrix_text(&f.gram));
    }
    if x.n % 4 == 0 {
        let reg = regular_intersection_form(x)?;
        let same = witt_class_check(x)?;
        if let Some(f) = &dp.middle_form {
            let w = witt_invariants(f)?;
            let _ = writeln!(text, "Witt data: signature {}, discriminant {}", w.signature, w.discriminant);
        }
        let _ = writeln!(text, "Witt class equals the regular intersection form: {same}");
        json["witt"] = json!({"regular_form": form_json(&reg)?, "equal": same});
    }
    Ok(Report { text, json })
}

fn dp_json(dp: &DpResult) -> Result<Value> {
    Ok(json!({
        "n": dp.n,
        "fundamental_degree": dp.n,
        "betti": dp.betti,
        "classification": dp.classification.as_str(),
        "middle_form": dp.middle_form.as_ref().map(form_json).transpose()?,
        "maps": {
            "regular_betti": dp.maps.regular_betti,
            "normalization_betti": dp.maps.normalization_betti,
            "phi_rank": dp.maps.phi_rank,
            "psi_rank": dp.maps.psi_rank,
            "factorization": dp.maps.factorization_holds,
        },
        "goodness": {
            "good": dp.goodness.good(),
            "very_good": dp.goodness.very_good(),
            "checks": dp.goodness.checks.iter().map(|c| json!({"condition": c.condition, "very_good": c.very_good, "passed": c.passed})).collect::<Vec<_>>(),
        },
    }))
}

fn parse_perversity(p: &str, n: usize) -> Result<usize> {
    match p {
        "m" | "lower" => Ok(lower_middle(n)),
        "n" | "upper" => Ok(upper_middle(n)),
        _ => p.parse().map_err(|_| Error::Input(format!("perversity '{p}' is not an integer, m or n"))),
    }
}

fn parse_keeps(links: &[Cdga], s: &str) -> Result<Vec<Vec<Vec<Q>>>> {
    let lists: Vec<Vec<String>> = s
        .split(';')
        .map(|l| l.split(',').map(|n| n.trim().to_string()).filter(|n| !n.is_empty()).collect())
        .collect();
    Ok(resolve_keeps(links, &Some(lists))?.unwrap_or_default())
}

fn middle_form_of(space: Space) -> Result<BilinearSpace> {
    match space {
        Space::Form(f) => Ok(f),
        Space::Pseudo { x, keeps, .. } => dp_model(&x, keeps.as_deref())?
            .middle_form
            .ok_or_else(|| Error::Input("space has odd dimension: no middle form".into())),
        Space::Algebra { .. } => Err(Error::Input("witt compare needs forms or pseudomanifolds".into())),
    }
}

/// Gram matrix of the link middle pairing on cohomology representatives.
fn link_middle(x: &PseudomanifoldModel, i: usize) -> Result<(Vec<String>, RatMatrix)> {
    let l = &x.links[i];
    let s = (x.n - 1) / 2;
    let h = l.cohomology()?;
    let labels = (0..h.dim(s)).map(|k| l.label(&Element::new(s, h.rep_col(s, k)))).collect();
    let g = crate::cdga::cup_pairing(l, &x.link_fundamentals[i], x.n - 1, s)?;
    Ok((labels, g))
}

fn run_example(name: &str) -> Result<Report> {
    let text = corpus_entry(name).ok_or_else(|| Error::Input(format!("unknown example '{name}'")))?;
    let space = space_from_doc(&parse_doc(text)?)?;
    let mut out = format!("example {name}\n");
    let mut js = json!({"example": name});
    match space {
        Space::Algebra { a, fundamental } => {
            let h = cohomology_report(&a)?;
            out += &h.text;
            js["cohomology"] = h.json;
            let mid = a.top() / 2 + 1;
            let (t, _, _) = truncate(&a, mid)?;
            let (c, _) = cotruncate(&a, mid)?;
            let _ = writeln!(out, "truncate at {mid}:");
            out += &betti_table(&trimmed(t.betti()));
            let _ = writeln!(out, "cotruncate at {mid}:");
            out += &betti_table(&trimmed(c.betti()));
            js["truncate"] = json!({"k": mid, "betti": trimmed(t.betti())});
            js["cotruncate"] = json!({"k": mid, "betti": trimmed(c.betti())});
            if let Some(f) = fundamental {
                let n = a.top() + 1;
                let hc = c.cohomology()?;
                let class: Vec<Q> = (0..hc.dim(a.top())).map(|k| crate::exactq::dot(&f, &hc.rep_col(a.top(), k))).collect();
                let e = attach_top_cell_effect(&c, n, &class)?;
                let _ = writeln!(out, "attach top cell (n = {n}):");
                out += &betti_table(&trimmed(e.betti.clone()));
                js["top_cell"] = json!({"n": n, "betti": trimmed(e.betti)});
            }
        }
        Space::Pseudo { x, keeps, thom, link_names } => {
            if thom.is_some() && x.n % 2 == 1 {
                let (labels, g) = link_middle(&x, 0)?;
                let s = (x.n - 1) / 2;
                let _ = writeln!(out, "H^{s}(link) basis ({}) Gram {}", labels.join(", "), matrix_text(&g));
                js["link_middle"] = json!({"degree": s, "basis": labels, "gram": matrix_json(&g)});
            }
            let c = classify_report(&x, thom.as_ref(), &link_names)?;
            out += &c.text;
            js["classify"] = c.json;
            if !x.links.is_empty() {
                for (label, p) in [("m", lower_middle(x.n)), ("n", upper_middle(x.n))] {
                    let b = betti_upto(&normal_intersection_space_model(&x, p)?, x.n);
                    let _ = writeln!(out, "normal intersection space, perversity {label} = {p}:");
                    out += &betti_table(&b);
                    js[format!("isect_{label}")] = json!(b);
                }
            }
            match dp_report(&x, keeps.as_deref(), true) {
                Ok(r) => {
                    out += &r.text;
                    js["dp"] = r.json;
                }
                Err(e @ (Error::Unsupported(_) | Error::Precondition(_))) => {
                    let _ = writeln!(out, "DP approximation not constructed: {e}");
                    js["dp"] = json!({"error": e.to_string()});
                }
                Err(e) => return Err(e),
            }
        }
        Space::Form(f) => {
            js["form"] = form_json(&f)?;
            let _ = writeln!(out, "form {}", matrix_text(&f.gram));
        }
    }
    Ok(Report { text: out, json: js })
}

/// Executes a parsed command.
pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Validate { file } => {
            let (kind, detail) = match load(file)? {
                Space::Algebra { a, .. } => ("cdga", format!("dims {:?}", a.dims())),
                Space::Pseudo { x, .. } => ("pseudomanifold", format!("n = {}, {} link(s)", x.n, x.links.len())),
                Space::Form(f) => ("form", format!("dim {}", f.dim())),
            };
            Ok(Report { text: format!("valid {kind}: {detail}\n"), json: json!({"valid": true, "kind": kind}) })
        }
        Command::Cohomology { file } => match load(file)? {
            Space::Algebra { a, .. } => cohomology_report(&a),
            Space::Pseudo { x, .. } => cohomology_report(&x.regular),
            Space::Form(_) => Err(Error::Input("a form has no cohomology".into())),
        },
        Command::Truncate { file, k } => {
            let (a, _) = algebra_of(load(file)?)?;
            let (t, _, _) = truncate(&a, *k)?;
            Ok(model_report(&format!("truncation below degree {k}"), &t, None))
        }
        Command::Cotruncate { file, k } => {
            let (a, _) = algebra_of(load(file)?)?;
            let (c, _) = cotruncate(&a, *k)?;
            Ok(model_report(&format!("cotruncation from degree {k}"), &c, None))
        }
        Command::LagCotruncate { file, keep } => {
            let (a, _) = algebra_of(load(file)?)?;
            if a.top() % 2 != 0 {
                return Err(Error::Precondition("Lagrangian cotruncation needs even top degree".into()));
            }
            let s = a.top() / 2;
            let vs = keep.iter().map(|n| a.elem(n).map(|e| e.v)).collect::<Result<Vec<_>>>()?;
            let (c, _) = lagrangian_cotruncate(&a, s, &vs)?;
            Ok(model_report(&format!("Lagrangian cotruncation at degree {s}"), &c, None))
        }
        Command::Isect { file, perversity, normal, lagrangian } => {
            let (x, keeps, ..) = pseudo_of(load(file)?)?;
            let title;
            let m = if *lagrangian {
                title = format!("Lagrangian intersection space, degrees 0..{}", x.n);
                lagrangian_intersection_space_model(&x, keeps.as_deref())?
            } else {
                let p = parse_perversity(perversity.as_deref().unwrap_or("m"), x.n)?;
                let k = cut_degree(x.n, p)?;
                let kind = if *normal { "normal" } else { "plain" };
                title = format!("{kind} intersection space, perversity {p} (cotruncation from degree {k}), degrees 0..{}", x.n);
                if *normal {
                    normal_intersection_space_model(&x, p)?
                } else {
                    intersection_space_model(&x, p)?
                }
            };
            Ok(model_report(&title, &m, Some(x.n)))
        }
        Command::Classify { file } => {
            let (x, _, thom, names) = pseudo_of(load(file)?)?;
            classify_report(&x, thom.as_ref(), &names)
        }
        Command::Dp { file, keeps, report } => {
            let (x, file_keeps, ..) = pseudo_of(load(file)?)?;
            let keeps = match keeps {
                Some(s) => Some(parse_keeps(&x.links, s)?),
                None => file_keeps,
            };
            dp_report(&x, keeps.as_deref(), *report)
        }
        Command::Witt { action: WittAction::Compare { first, second } } => {
            let f1 = middle_form_of(load(first)?)?.nondegenerate_part();
            let f2 = middle_form_of(load(second)?)?.nondegenerate_part();
            let eq = witt_equal(&f1, &f2)?;
            let text = format!("{}\n", if eq { "equal Witt classes" } else { "different Witt classes" });
            Ok(Report { text, json: json!({"equal": eq, "first": form_json(&f1)?, "second": form_json(&f2)?}) })
        }
        Command::Thom { base, euler, rank } => {
            let text = if Path::new(base).exists() {
                std::fs::read_to_string(base).map_err(|e| Error::Input(format!("{base}: {e}")))?
            } else {
                return Err(Error::Input(format!("{base}: no such file")));
            };
            let base_doc = match parse_doc(&text)? {
                SpaceDoc::Cdga(c) | SpaceDoc::Formal(c) => c,
                SpaceDoc::Thom(t) => t.base,
                _ => return Err(Error::Input("thom --base needs a cdga or formal document".into())),
            };
            if rank % 2 == 1 {
                return odd_rank_thom(&base_doc, *rank);
            }
            let euler = euler.clone().ok_or_else(|| Error::Input("--euler is required for even ranks".into()))?;
            let doc = ThomDoc {
                base: base_doc,
                base_dim: None,
                kill: vec![],
                euler: EulerDoc::Name(euler),
                rank: *rank,
                keeps: None,
                description: None,
            };
            let space = space_from_doc(&SpaceDoc::Thom(doc.clone()))?;
            let (x, _, thom, names) = pseudo_of(space)?;
            let mut r = classify_report(&x, thom.as_ref(), &names)?;
            let model = SpaceDoc::Pseudomanifold(pseudomanifold_to_doc(&x, None));
            r.json["model"] = serde_json::to_value(&model).map_err(|e| Error::Internal(e.to_string()))?;
            let header = format!("Thom space, n = {}, link top degree {}\n", x.n, x.n - 1);
            r.text = header + &r.text;
            Ok(r)
        }
        Command::Examples { action: ExampleAction::List } => {
            let mut text = String::new();
            for (n, d, _) in CORPUS {
                let _ = writeln!(text, "{n:<14} {d}");
            }
            let _ = writeln!(text, "{:<14} alias of b9-thom", "thom-439");
            let _ = writeln!(text, "{:<14} alias of nodal-link", "s2xs3");
            let json = json!(CORPUS.iter().map(|(n, d, _)| json!({"name": n, "description": d})).collect::<Vec<_>>());
            Ok(Report { text, json })
        }
        Command::Examples { action: ExampleAction::Run { name } } => run_example(name),
    }
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout();
    match execute(&cli) {
        Ok(r) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r.json).unwrap_or_default())
            } else {
                write!(out, "{}", r.text)
            };
            0
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(out, "{}", json!({"error": e.to_string(), "exit_code": e.exit_code()}));
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
