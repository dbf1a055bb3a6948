//! Outcomes of decision procedures.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Holds,
    Fails,
    /// A hypothesis failed, so the implication holds trivially.
    Vacuous,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Vacuous => "VACUOUS",
        })
    }
}

/// A value bound to a role in a witness or counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Item {
    Mor(usize),
    Obj(usize),
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Binding {
    pub role: String,
    pub item: Item,
}

/// One configuration: the quantified variables and what was chosen for them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Instance(pub Vec<Binding>);

impl Instance {
    pub fn new() -> Self {
        Instance(Vec::new())
    }

    pub fn mor(mut self, role: &str, m: usize) -> Self {
        self.0.push(Binding {
            role: role.to_string(),
            item: Item::Mor(m),
        });
        self
    }

    pub fn obj(mut self, role: &str, x: usize) -> Self {
        self.0.push(Binding {
            role: role.to_string(),
            item: Item::Obj(x),
        });
        self
    }

    pub fn int(mut self, role: &str, v: i64) -> Self {
        self.0.push(Binding {
            role: role.to_string(),
            item: Item::Int(v),
        });
        self
    }

    pub fn text(mut self, role: &str, v: impl Into<String>) -> Self {
        self.0.push(Binding {
            role: role.to_string(),
            item: Item::Text(v.into()),
        });
        self
    }

    pub fn get(&self, role: &str) -> Option<&Item> {
        self.0.iter().find(|b| b.role == role).map(|b| &b.item)
    }

    /// Morphism bound to `role`.
    pub fn mor_of(&self, role: &str) -> Option<usize> {
        match self.get(role) {
            Some(Item::Mor(m)) => Some(*m),
            _ => None,
        }
    }

    /// Replaces object and morphism indices by their names.
    pub fn resolve(&mut self, obj: &dyn Fn(usize) -> String, mor: &dyn Fn(usize) -> String) {
        for b in &mut self.0 {
            match b.item {
                Item::Mor(m) => b.item = Item::Text(mor(m)),
                Item::Obj(x) => b.item = Item::Text(obj(x)),
                _ => {}
            }
        }
    }

    /// Renders with the given naming functions.
    pub fn render(&self, obj: &dyn Fn(usize) -> String, mor: &dyn Fn(usize) -> String) -> String {
        self.0
            .iter()
            .map(|b| {
                let v = match &b.item {
                    Item::Mor(m) => mor(*m),
                    Item::Obj(x) => obj(*x),
                    Item::Int(v) => v.to_string(),
                    Item::Text(t) => t.clone(),
                };
                format!("{}={}", b.role, v)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Outcome of a decision procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: String,
    pub status: Status,
    /// Constructed fillers, one per universally quantified instance.
    pub witness: Vec<Instance>,
    pub counterexample: Option<Instance>,
    pub notes: Vec<String>,
    pub parts: Vec<Verdict>,
}

impl Verdict {
    pub fn holds(property: impl Into<String>) -> Self {
        Verdict {
            property: property.into(),
            status: Status::Holds,
            witness: vec![],
            counterexample: None,
            notes: vec![],
            parts: vec![],
        }
    }

    pub fn fails(property: impl Into<String>, cex: Instance) -> Self {
        Verdict {
            property: property.into(),
            status: Status::Fails,
            witness: vec![],
            counterexample: Some(cex),
            notes: vec![],
            parts: vec![],
        }
    }

    pub fn vacuous(property: impl Into<String>, why: impl Into<String>) -> Self {
        Verdict {
            property: property.into(),
            status: Status::Vacuous,
            witness: vec![],
            counterexample: None,
            notes: vec![why.into()],
            parts: vec![],
        }
    }

    pub fn from_bool(property: impl Into<String>, ok: bool, cex: Instance) -> Self {
        if ok {
            Verdict::holds(property)
        } else {
            Verdict::fails(property, cex)
        }
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.status == Status::Fails
    }

    pub fn is_vacuous(&self) -> bool {
        self.status == Status::Vacuous
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_parts(mut self, parts: Vec<Verdict>) -> Self {
        self.parts = parts;
        self
    }

    pub fn with_witness(mut self, w: Vec<Instance>) -> Self {
        self.witness = w;
        self
    }

    /// Names every bound object and morphism, for verdicts whose indices refer to a
    /// category other than the one a report is rendered against.
    pub fn resolve_names(&mut self, obj: &dyn Fn(usize) -> String, mor: &dyn Fn(usize) -> String) {
        for w in &mut self.witness {
            w.resolve(obj, mor);
        }
        if let Some(c) = &mut self.counterexample {
            c.resolve(obj, mor);
        }
        for p in &mut self.parts {
            p.resolve_names(obj, mor);
        }
    }

    /// Conjunction: fails on the first failing part, holds when all parts hold.
    pub fn all(property: impl Into<String>, parts: Vec<Verdict>) -> Self {
        let property = property.into();
        let status = if parts.iter().any(|p| p.is_fails()) {
            Status::Fails
        } else {
            Status::Holds
        };
        let counterexample = parts
            .iter()
            .find(|p| p.is_fails())
            .and_then(|p| p.counterexample.clone());
        Verdict {
            property,
            status,
            witness: vec![],
            counterexample,
            notes: vec![],
            parts,
        }
    }
}
