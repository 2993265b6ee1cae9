//! The bundled corpus must match the builders it was generated from.
//! Set `ISECTQ_WRITE_CORPUS=1` to regenerate the files.

use isectq::cli::{cdga_to_doc, parse_doc, pseudomanifold_to_doc, space_from_doc, EulerDoc, SpaceDoc, ThomDoc, CORPUS};
use isectq::exactq::{q, RatMatrix};
use isectq::spaces::{b9_model, closed_formal, cpn, s2xs3, sigma_cpn, sigma_t2};

fn generated() -> Vec<(&'static str, SpaceDoc)> {
    let with = |mut d: isectq::cli::PseudomanifoldDoc, desc: &str| {
        d.description = Some(desc.into());
        let link = match desc {
            "suspension of CP^2" => Some("CP^2"),
            "suspension of CP^3" => Some("CP^3"),
            "suspension of the 2-torus" => Some("T^2"),
            _ => None,
        };
        d.link_names = link.map(|l| vec![l.to_string(); 2]);
        SpaceDoc::Pseudomanifold(d)
    };
    let mut nodal = cdga_to_doc(&s2xs3().unwrap());
    nodal.fundamental = Some(vec![isectq::cli::Rat(q(1))]);
    nodal.description = Some("S^2 x S^3: (x2, y3, z3) with dy = x^2, divided by (x^3, xy)".into());
    let mut s2 = cdga_to_doc(&cpn(1).unwrap());
    s2.description = Some("cohomology of S^2".into());
    vec![
        ("sigma-cp2", with(pseudomanifold_to_doc(&sigma_cpn(2).unwrap(), None), "suspension of CP^2")),
        ("sigma-cp3", with(pseudomanifold_to_doc(&sigma_cpn(3).unwrap(), None), "suspension of CP^3")),
        (
            "sigma-t2",
            with(
                pseudomanifold_to_doc(&sigma_t2().unwrap(), Some(vec![vec!["a1".into()], vec!["a1".into()]])),
                "suspension of the 2-torus",
            ),
        ),
        ("nodal-link", SpaceDoc::Cdga(nodal)),
        (
            "b9-thom",
            SpaceDoc::Thom(ThomDoc {
                base: cdga_to_doc(&b9_model().unwrap()),
                base_dim: Some(9),
                kill: vec!["b6".into(), "b71".into(), "b72".into(), "b8".into()],
                euler: EulerDoc::Name("s4".into()),
                rank: 4,
                keeps: Some(vec![vec!["s6".into()]]),
                description: Some("rank 4 bundle over (S^3 x S^6) # (S^4 x S^5) pulled back from TS^4".into()),
            }),
        ),
        (
            "thom-s2-deg2",
            SpaceDoc::Thom(ThomDoc {
                base: s2,
                base_dim: Some(2),
                kill: vec![],
                euler: EulerDoc::Coords(vec![isectq::cli::Rat(q(2))]),
                rank: 2,
                keeps: None,
                description: Some("plane bundle of Euler number 2 over S^2".into()),
            }),
        ),
        (
            "cp2-cp2bar",
            with(
                pseudomanifold_to_doc(&closed_formal(2, &RatMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap(), None),
                "closed formal 4-manifold with intersection form diag(1, -1)",
            ),
        ),
    ]
}

#[test]
fn corpus_matches_builders() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let write = std::env::var("ISECTQ_WRITE_CORPUS").is_ok();
    for (name, doc) in generated() {
        let text = serde_json::to_string_pretty(&doc).unwrap() + "\n";
        if write {
            std::fs::write(dir.join(format!("{name}.json")), &text).unwrap();
            continue;
        }
        let (_, _, bundled) = CORPUS.iter().find(|(n, _, _)| *n == name).expect("bundled");
        assert_eq!(parse_doc(bundled).unwrap(), doc, "{name} differs from its builder");
        space_from_doc(&doc).unwrap();
    }
}
