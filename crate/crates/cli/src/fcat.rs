//! The `fcat v1` text format for finite categories.
//!
//! ```text
//! fcat v1
//! obj A B
//! mor f : A -> B
//! comp g f = h
//! class S = id(A) f
//! zero A
//! cof S
//! weq W
//! ```
//!
//! Identities are implicit and named `id(X)`. Every composable pair of
//! non-identity morphisms needs a `comp` line. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use catfrac::fincat::{check_size, validate_category, CatBuilder, FinCat, Mor};
use catfrac::{Error, MorClass, Result};

/// A parsed document: the category, its named classes and optional Waldhausen designations.
#[derive(Clone, Debug)]
pub struct FcatDocument {
    pub cat: Arc<FinCat>,
    pub classes: Vec<(String, MorClass)>,
    pub zero: Option<String>,
    pub cof: Option<String>,
    pub weq: Option<String>,
}

impl FcatDocument {
    pub fn new(cat: Arc<FinCat>) -> Self {
        FcatDocument {
            cat,
            classes: Vec::new(),
            zero: None,
            cof: None,
            weq: None,
        }
    }

    pub fn class(&self, name: &str) -> Result<&MorClass> {
        self.classes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::Invalid(format!("no class named {name}")))
    }

    /// Adds or replaces a class.
    pub fn set_class(&mut self, name: &str, c: MorClass) {
        match self.classes.iter_mut().find(|(n, _)| n == name) {
            Some(e) => e.1 = c,
            None => self.classes.push((name.to_string(), c)),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.starts_with("id(") && !s.contains(['#', '=']) && s != "->" && s != ":"
}

pub fn parse(text: &str) -> Result<FcatDocument> {
    let mut b = CatBuilder::new();
    let mut objs: HashMap<String, usize> = HashMap::new();
    let mut mors: HashMap<String, Mor> = HashMap::new();
    let mut comp_lines: HashMap<(Mor, Mor), usize> = HashMap::new();
    let mut class_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut zero = None;
    let mut cof = None;
    let mut weq = None;
    let mut header = false;

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if !header {
            if tok != ["fcat", "v1"] {
                return Err(perr(ln, "expected header `fcat v1`"));
            }
            header = true;
            continue;
        }
        match tok[0] {
            "obj" => {
                if tok.len() < 2 {
                    return Err(perr(ln, "`obj` needs at least one name"));
                }
                for &name in &tok[1..] {
                    if !valid_name(name) || objs.contains_key(name) {
                        return Err(perr(ln, format!("bad or duplicate object name `{name}`")));
                    }
                    let x = b.object(name);
                    objs.insert(name.to_string(), x);
                    mors.insert(format!("id({name})"), b.identity(x));
                }
            }
            "mor" => {
                if tok.len() != 6 || tok[2] != ":" || tok[4] != "->" {
                    return Err(perr(ln, "expected `mor NAME : SRC -> TGT`"));
                }
                let name = tok[1];
                if !valid_name(name) || mors.contains_key(name) {
                    return Err(perr(ln, format!("bad or duplicate morphism name `{name}`")));
                }
                let s = *objs
                    .get(tok[3])
                    .ok_or_else(|| perr(ln, format!("unknown object `{}`", tok[3])))?;
                let t = *objs
                    .get(tok[5])
                    .ok_or_else(|| perr(ln, format!("unknown object `{}`", tok[5])))?;
                let m = b.morphism(name, s, t);
                mors.insert(name.to_string(), m);
            }
            "comp" => {
                if tok.len() != 5 || tok[3] != "=" {
                    return Err(perr(ln, "expected `comp G F = H`"));
                }
                let get = |n: &str| {
                    mors.get(n)
                        .copied()
                        .ok_or_else(|| perr(ln, format!("unknown morphism `{n}`")))
                };
                let (g, f, h) = (get(tok[1])?, get(tok[2])?, get(tok[4])?);
                if b.tgt_of(f) != b.src_of(g) {
                    return Err(perr(
                        ln,
                        format!("`{}` and `{}` are not composable", tok[1], tok[2]),
                    ));
                }
                if b.src_of(h) != b.src_of(f) || b.tgt_of(h) != b.tgt_of(g) {
                    return Err(perr(ln, format!("`{}` has the wrong endpoints", tok[4])));
                }
                let is_id = |m: Mor| objs.values().any(|&x| b.identity(x) == m);
                if is_id(g) || is_id(f) {
                    return Err(perr(ln, "composites with identities are implicit"));
                }
                if comp_lines.insert((g, f), ln).is_some() {
                    return Err(perr(ln, "duplicate composition"));
                }
                b.compose(g, f, h);
            }
            "class" => {
                if tok.len() < 3 || tok[2] != "=" {
                    return Err(perr(ln, "expected `class NAME = MOR ...`"));
                }
                if class_lines.iter().any(|c| c.1 == tok[1]) {
                    return Err(perr(ln, format!("duplicate class `{}`", tok[1])));
                }
                class_lines.push((
                    ln,
                    tok[1].to_string(),
                    tok[3..].iter().map(|s| s.to_string()).collect(),
                ));
            }
            "zero" | "cof" | "weq" => {
                if tok.len() != 2 {
                    return Err(perr(ln, format!("expected `{} NAME`", tok[0])));
                }
                let slot = match tok[0] {
                    "zero" => &mut zero,
                    "cof" => &mut cof,
                    _ => &mut weq,
                };
                if slot.is_some() {
                    return Err(perr(ln, format!("duplicate `{}`", tok[0])));
                }
                *slot = Some((ln, tok[1].to_string()));
            }
            other => return Err(perr(ln, format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(perr(1, "expected header `fcat v1`"));
    }
    let lines = text.lines().count().max(1);

    // every composable non-identity pair must be given
    let n = b.num_morphisms();
    let ids: Vec<bool> = {
        let mut v = vec![false; n];
        for &x in objs.values() {
            v[b.identity(x)] = true;
        }
        v
    };
    for g in 0..n {
        for f in 0..n {
            if !ids[g] && !ids[f] && b.tgt_of(f) == b.src_of(g) && !comp_lines.contains_key(&(g, f))
            {
                let name = |m: Mor| {
                    mors.iter()
                        .find(|(_, &v)| v == m)
                        .map(|(k, _)| k.clone())
                        .unwrap_or_default()
                };
                return Err(perr(
                    lines,
                    format!("missing `comp {} {} = ...`", name(g), name(f)),
                ));
            }
        }
    }
    check_size("category", n)?;
    let cat = b.build_unchecked();
    if let Some(v) = validate_category(&cat).violations.first() {
        return Err(perr(lines, format!("not a category: {v}")));
    }
    let cat = Arc::new(cat);
    let mut doc = FcatDocument::new(cat.clone());
    for (ln, name, members) in class_lines {
        let mut c = MorClass::empty(&cat);
        for m in &members {
            let id = cat
                .find_morphism(m)
                .ok_or_else(|| perr(ln, format!("unknown morphism `{m}`")))?;
            c.insert(id);
        }
        doc.classes.push((name, c));
    }
    if let Some((ln, z)) = zero {
        if cat.find_object(&z).is_none() {
            return Err(perr(ln, format!("unknown object `{z}`")));
        }
        doc.zero = Some(z);
    }
    for (slot, val) in [(&mut doc.cof, cof), (&mut doc.weq, weq)] {
        if let Some((ln, s)) = val {
            if !doc.classes.iter().any(|c| c.0 == s) {
                return Err(perr(ln, format!("unknown class `{s}`")));
            }
            *slot = Some(s);
        }
    }
    Ok(doc)
}

/// Renders a document; `parse` reads it back with identical names.
pub fn serialize(doc: &FcatDocument) -> String {
    let c = &*doc.cat;
    let mut out = String::from("fcat v1\n");
    if c.num_objects() > 0 {
        let _ = writeln!(out, "obj {}", c.obj_names().join(" "));
    }
    for m in c.morphisms().filter(|&m| !c.is_identity(m)) {
        let _ = writeln!(
            out,
            "mor {} : {} -> {}",
            c.mor_name(m),
            c.obj_name(c.src(m)),
            c.obj_name(c.tgt(m))
        );
    }
    for g in c.morphisms().filter(|&m| !c.is_identity(m)) {
        for f in c.morphisms().filter(|&m| !c.is_identity(m)) {
            if let Some(h) = c.try_compose(g, f) {
                let _ = writeln!(
                    out,
                    "comp {} {} = {}",
                    c.mor_name(g),
                    c.mor_name(f),
                    c.mor_name(h)
                );
            }
        }
    }
    for (name, cl) in &doc.classes {
        let members = cl.names(c).join(" ");
        let _ = writeln!(out, "class {name} = {members}");
    }
    if let Some(z) = &doc.zero {
        let _ = writeln!(out, "zero {z}");
    }
    if let Some(s) = &doc.cof {
        let _ = writeln!(out, "cof {s}");
    }
    if let Some(s) = &doc.weq {
        let _ = writeln!(out, "weq {s}");
    }
    out
}

/// Serializes a bare category.
pub fn serialize_cat(c: &Arc<FinCat>) -> String {
    serialize(&FcatDocument::new(c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORD1: &str =
        "fcat v1\nobj A B\nmor f : A -> B\nclass S = id(A) id(B) f\nclass T = id(A) id(B)\n";

    #[test]
    fn parses_ordinal() {
        let d = parse(ORD1).unwrap();
        assert_eq!(d.cat.num_morphisms(), 3);
        assert_eq!(d.class("S").unwrap().len(), 3);
        let again = parse(&serialize(&d)).unwrap();
        assert_eq!(serialize(&again), serialize(&d));
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse("fcat v1\nobj A\nmor f : A -> C\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                msg: "unknown object `C`".into()
            }
        );
        assert!(matches!(
            parse("fcat v2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn missing_composite_is_an_error() {
        let e = parse("fcat v1\nobj A\nmor e : A -> A\n").unwrap_err();
        assert!(matches!(e, Error::Parse { msg, .. } if msg.contains("missing")));
    }

    #[test]
    fn rejects_non_associative_table() {
        // e∘e = f, f∘e = e, e∘f = f, f∘f = f breaks (e∘e)∘e = e∘(e∘e)
        let t = "fcat v1\nobj A\nmor e : A -> A\nmor f : A -> A\ncomp e e = f\ncomp f e = e\ncomp e f = f\ncomp f f = f\n";
        assert!(matches!(parse(t), Err(Error::Parse { .. })));
    }
}
