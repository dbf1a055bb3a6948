//! The `zdiag v1` text format for diagrams of abelian groups and their maps.
//!
//! ```text
//! zdiag v1
//! ring Z
//! shape 1
//! object x
//!   point 0 = Z
//!   point 1 = Z
//!   edge 0 axis 0 = 2
//! end
//! morphism f : x -> x
//!   comp 0 = 3
//!   comp 1 = 3
//! end
//! ```
//!
//! Groups are written on integer generators (`Z^2 + Z/3`, `0`); the `ring`
//! line says which integers are inverted. Matrices list rows separated by
//! `;` with columns for source generators; `-` is the empty matrix and
//! `zero` the zero matrix of the right size. A bare `shape` line is the
//! one-point shape.

use std::fmt::Write as _;

use catfrac::linalg::IntMat;
use catfrac::zdiag::{AbMor, DiagMor, DiagObj, FgAb, Ring};
use catfrac::{Error, Result};
use num_bigint::BigInt;

#[derive(Clone, Debug)]
pub struct ZdDocument {
    pub ring: Ring,
    pub shape: Vec<usize>,
    pub objects: Vec<(String, DiagObj)>,
    pub morphisms: Vec<(String, DiagMor)>,
}

impl ZdDocument {
    pub fn object(&self, name: &str) -> Result<&DiagObj> {
        self.objects
            .iter()
            .find(|o| o.0 == name)
            .map(|o| &o.1)
            .ok_or_else(|| Error::Invalid(format!("no object named {name}")))
    }

    pub fn first_object(&self) -> Result<&DiagObj> {
        self.objects
            .first()
            .map(|o| &o.1)
            .ok_or_else(|| Error::Invalid("document has no object".into()))
    }

    pub fn first_morphism(&self) -> Result<&DiagMor> {
        self.morphisms
            .first()
            .map(|m| &m.1)
            .ok_or_else(|| Error::Invalid("document has no morphism".into()))
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => perr(line, other.to_string()),
    }
}

pub fn parse_ring(s: &str) -> Option<Ring> {
    if s == "Z" {
        return Some(Ring::Z);
    }
    let n: BigInt = s.strip_prefix("Z[1/")?.strip_suffix(']')?.parse().ok()?;
    (n > BigInt::from(1)).then_some(Ring::Inverted(n))
}

fn parse_matrix(s: &str, src: &FgAb, tgt: &FgAb, line: usize) -> Result<IntMat> {
    let s = s.trim();
    let (r, c) = (tgt.num_gens(), src.num_gens());
    if s == "zero" || (s == "-" && (r == 0 || c == 0)) {
        return Ok(IntMat::zeros(r, c));
    }
    let mut data = Vec::new();
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != r {
        return Err(perr(
            line,
            format!("matrix has {} rows, target needs {r}", rows.len()),
        ));
    }
    for row in rows {
        let cells: Vec<&str> = row.split_whitespace().collect();
        if cells.len() != c {
            return Err(perr(
                line,
                format!("matrix row has {} entries, source needs {c}", cells.len()),
            ));
        }
        for e in cells {
            data.push(
                e.parse::<BigInt>()
                    .map_err(|_| perr(line, format!("bad entry `{e}`")))?,
            );
        }
    }
    Ok(IntMat::from_big_rows(r, c, data))
}

fn parse_coords(toks: &[&str], shape: &[usize], line: usize) -> Result<usize> {
    if toks.len() != shape.len() {
        return Err(perr(line, format!("expected {} coordinates", shape.len())));
    }
    let mut p = 0;
    let mut stride = 1;
    for (t, &n) in toks.iter().zip(shape) {
        let v: usize = t
            .parse()
            .map_err(|_| perr(line, format!("bad coordinate `{t}`")))?;
        if v > n {
            return Err(perr(line, format!("coordinate {v} outside [0, {n}]")));
        }
        p += v * stride;
        stride *= n + 1;
    }
    Ok(p)
}

enum Block {
    Object {
        name: String,
        start: usize,
        points: Vec<Option<FgAb>>,
        edges: Vec<(usize, usize, String, usize)>,
    },
    Morphism {
        name: String,
        start: usize,
        src: String,
        tgt: String,
        comps: Vec<Option<(String, usize)>>,
    },
}

pub fn parse(text: &str) -> Result<ZdDocument> {
    let mut header = false;
    let mut ring = None;
    let mut shape: Option<Vec<usize>> = None;
    let mut doc = ZdDocument {
        ring: Ring::Z,
        shape: vec![],
        objects: vec![],
        morphisms: vec![],
    };
    let mut block: Option<Block> = None;
    let mut last = 1;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        last = ln;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if !header {
            if tok != ["zdiag", "v1"] {
                return Err(perr(ln, "expected header `zdiag v1`"));
            }
            header = true;
            continue;
        }
        let (lhs, rhs) = match line.split_once('=') {
            Some((l, r)) => (l.split_whitespace().collect::<Vec<_>>(), Some(r.trim())),
            None => (tok.clone(), None),
        };
        match (&mut block, lhs[0]) {
            (None, "ring") => {
                if ring.is_some() || tok.len() != 2 {
                    return Err(perr(ln, "expected a single `ring Z` or `ring Z[1/n]`"));
                }
                ring = Some(
                    parse_ring(tok[1]).ok_or_else(|| perr(ln, format!("bad ring `{}`", tok[1])))?,
                );
            }
            (None, "shape") => {
                if shape.is_some() {
                    return Err(perr(ln, "duplicate `shape`"));
                }
                let s: std::result::Result<Vec<usize>, _> =
                    tok[1..].iter().map(|t| t.parse::<usize>()).collect();
                let s = s.map_err(|_| perr(ln, "bad shape"))?;
                if s.contains(&0) {
                    return Err(perr(ln, "shape entries must be positive"));
                }
                shape = Some(s);
            }
            (None, "object") => {
                let sh = shape
                    .as_ref()
                    .ok_or_else(|| perr(ln, "`shape` must come before objects"))?;
                if tok.len() != 2 {
                    return Err(perr(ln, "expected `object NAME`"));
                }
                block = Some(Block::Object {
                    name: tok[1].to_string(),
                    start: ln,
                    points: vec![None; DiagObj::num_points_of(sh)],
                    edges: vec![],
                });
            }
            (None, "morphism") => {
                let sh = shape
                    .as_ref()
                    .ok_or_else(|| perr(ln, "`shape` must come before morphisms"))?;
                if tok.len() != 6 || tok[2] != ":" || tok[4] != "->" {
                    return Err(perr(ln, "expected `morphism NAME : SRC -> TGT`"));
                }
                block = Some(Block::Morphism {
                    name: tok[1].to_string(),
                    start: ln,
                    src: tok[3].to_string(),
                    tgt: tok[5].to_string(),
                    comps: vec![None; DiagObj::num_points_of(sh)],
                });
            }
            (Some(Block::Object { points, .. }), "point") => {
                let sh = shape.as_ref().unwrap();
                let p = parse_coords(&lhs[1..], sh, ln)?;
                let rhs = rhs.ok_or_else(|| perr(ln, "expected `point COORDS = GROUP`"))?;
                let r = ring.clone().unwrap_or(Ring::Z);
                if points[p].is_some() {
                    return Err(perr(ln, "duplicate point"));
                }
                points[p] = Some(FgAb::parse(rhs, r).map_err(at(ln))?);
            }
            (Some(Block::Object { edges, .. }), "edge") => {
                let sh = shape.as_ref().unwrap();
                let n = lhs.len();
                if n < 3 || lhs[n - 2] != "axis" {
                    return Err(perr(ln, "expected `edge COORDS axis A = MATRIX`"));
                }
                let p = parse_coords(&lhs[1..n - 2], sh, ln)?;
                let a: usize = lhs[n - 1].parse().map_err(|_| perr(ln, "bad axis"))?;
                let rhs = rhs.ok_or_else(|| perr(ln, "expected `= MATRIX`"))?;
                edges.push((p, a, rhs.to_string(), ln));
            }
            (Some(Block::Morphism { comps, .. }), "comp") => {
                let sh = shape.as_ref().unwrap();
                let p = parse_coords(&lhs[1..], sh, ln)?;
                let rhs = rhs.ok_or_else(|| perr(ln, "expected `comp COORDS = MATRIX`"))?;
                if comps[p].is_some() {
                    return Err(perr(ln, "duplicate component"));
                }
                comps[p] = Some((rhs.to_string(), ln));
            }
            (Some(_), "end") => {
                let r = ring.clone().unwrap_or(Ring::Z);
                let sh = shape.clone().unwrap();
                match block.take().unwrap() {
                    Block::Object {
                        name,
                        start,
                        points,
                        edges,
                    } => {
                        if doc.objects.iter().any(|o| o.0 == name) {
                            return Err(perr(start, format!("duplicate object `{name}`")));
                        }
                        let pts = points
                            .into_iter()
                            .enumerate()
                            .map(|(p, g)| g.ok_or_else(|| perr(ln, format!("point {p} missing"))))
                            .collect::<Result<Vec<_>>>()?;
                        let mut es = Vec::new();
                        for (p, a, m, eln) in edges {
                            if a >= sh.len() {
                                return Err(perr(eln, format!("axis {a} out of range")));
                            }
                            let stride: usize = sh[..a].iter().map(|n| n + 1).product();
                            let coord = (p / stride) % (sh[a] + 1);
                            if coord == sh[a] {
                                return Err(perr(eln, "edge leaves the grid"));
                            }
                            let q = p + stride;
                            let mat = parse_matrix(&m, &pts[p], &pts[q], eln)?;
                            es.push((
                                (p, a),
                                AbMor::new(pts[p].clone(), pts[q].clone(), mat).map_err(at(eln))?,
                            ));
                        }
                        let d = DiagObj::new(r, sh, pts, es).map_err(at(start))?;
                        doc.objects.push((name, d));
                    }
                    Block::Morphism {
                        name,
                        start,
                        src,
                        tgt,
                        comps,
                    } => {
                        let x = doc.object(&src).map_err(at(start))?.clone();
                        let y = doc.object(&tgt).map_err(at(start))?.clone();
                        let mut cs = Vec::new();
                        for (p, c) in comps.into_iter().enumerate() {
                            let (m, cln) =
                                c.ok_or_else(|| perr(ln, format!("component {p} missing")))?;
                            let mat = parse_matrix(&m, &x.points[p], &y.points[p], cln)?;
                            cs.push(
                                AbMor::new(x.points[p].clone(), y.points[p].clone(), mat)
                                    .map_err(at(cln))?,
                            );
                        }
                        let f = DiagMor::new(x, y, cs).map_err(at(start))?;
                        doc.morphisms.push((name, f));
                    }
                }
            }
            (_, other) => return Err(perr(ln, format!("unexpected `{other}`"))),
        }
    }
    if !header {
        return Err(perr(1, "expected header `zdiag v1`"));
    }
    if block.is_some() {
        return Err(perr(last, "unterminated block"));
    }
    doc.ring = ring.unwrap_or(Ring::Z);
    doc.shape = shape.unwrap_or_default();
    Ok(doc)
}

/// A group on its integer generators, as the parser expects.
pub fn group_text(g: &FgAb) -> String {
    if g.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    match g.rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    for d in &g.torsion {
        parts.push(format!("Z/{d}"));
    }
    parts.join(" + ")
}

pub fn matrix_text(m: &IntMat) -> String {
    if m.rows() == 0 || m.cols() == 0 {
        return "-".into();
    }
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn coords_text(d: &DiagObj, p: usize) -> String {
    d.coords(p)
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn space(s: &str) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" {s}")
    }
}

pub fn serialize(doc: &ZdDocument) -> String {
    let mut out = String::from("zdiag v1\n");
    let _ = writeln!(out, "ring {}", doc.ring);
    let shape: Vec<String> = doc.shape.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(out, "shape{}", space(&shape.join(" ")));
    for (name, d) in &doc.objects {
        let _ = writeln!(out, "object {name}");
        for (p, g) in d.points.iter().enumerate() {
            let _ = writeln!(
                out,
                "  point{} = {}",
                space(&coords_text(d, p)),
                group_text(g)
            );
        }
        for ((p, a), m) in d.edge_list() {
            let _ = writeln!(
                out,
                "  edge{} axis {a} = {}",
                space(&coords_text(d, p)),
                matrix_text(&m.mat)
            );
        }
        out.push_str("end\n");
    }
    for (name, f) in &doc.morphisms {
        let src = doc
            .objects
            .iter()
            .find(|o| o.1 == f.src)
            .map_or("?", |o| o.0.as_str());
        let tgt = doc
            .objects
            .iter()
            .find(|o| o.1 == f.tgt)
            .map_or("?", |o| o.0.as_str());
        let _ = writeln!(out, "morphism {name} : {src} -> {tgt}");
        for (p, c) in f.comps.iter().enumerate() {
            let _ = writeln!(
                out,
                "  comp{} = {}",
                space(&coords_text(&f.src, p)),
                matrix_text(&c.mat)
            );
        }
        out.push_str("end\n");
    }
    out
}

/// A document holding one diagram named `x`.
pub fn single_object(d: &DiagObj) -> ZdDocument {
    ZdDocument {
        ring: d.ring.clone(),
        shape: d.shape.clone(),
        objects: vec![("x".into(), d.clone())],
        morphisms: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOUBLING: &str = "zdiag v1\nring Z\nshape 1\nobject x\n  point 0 = Z\n  point 1 = Z\n  edge 0 axis 0 = 2\nend\nmorphism f : x -> x\n  comp 0 = 3\n  comp 1 = 3\nend\n";

    #[test]
    fn round_trip() {
        let d = parse(DOUBLING).unwrap();
        assert_eq!(serialize(&d), DOUBLING);
    }

    #[test]
    fn point_shape() {
        let d = parse("zdiag v1\nring Z[1/2]\nshape\nobject p\n  point = Z + Z/3\nend\n").unwrap();
        assert_eq!(
            d.first_object().unwrap().points[0].torsion,
            vec![BigInt::from(3)]
        );
        assert_eq!(parse(&serialize(&d)).unwrap().objects[0].1, d.objects[0].1);
    }

    #[test]
    fn non_commuting_square_reports_line() {
        let t = "zdiag v1\nshape 1 1\nobject x\n point 0 0 = Z\n point 1 0 = Z\n point 0 1 = Z\n point 1 1 = Z\n edge 0 0 axis 0 = 1\n edge 0 0 axis 1 = 1\n edge 1 0 axis 1 = 2\n edge 0 1 axis 0 = 1\nend\n";
        assert!(matches!(parse(t), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn bad_matrix_size() {
        let t =
            "zdiag v1\nshape 1\nobject x\n point 0 = Z\n point 1 = Z^2\n edge 0 axis 0 = 1\nend\n";
        assert!(matches!(parse(t), Err(Error::Parse { line: 6, .. })));
    }
}
