//! Text and JSON rendering of verdicts and run reports.

use std::fmt::Write as _;

use catfrac::{FinCat, Status, Verdict};
use serde::Serialize;

/// One command run: the echoed command line, its verdicts and free-form sections.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub verdicts: Vec<Verdict>,
    pub sections: Vec<(String, String)>,
    pub skipped: Vec<String>,
    pub exit: i32,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn section(&mut self, title: &str, body: impl Into<String>) {
        self.sections.push((title.to_string(), body.into()));
    }

    /// 0 when every non-vacuous verdict holds, 3 otherwise.
    pub fn status_exit(&self) -> i32 {
        if self.verdicts.iter().any(|v| v.status == Status::Fails) {
            3
        } else {
            0
        }
    }

    pub fn render_text(&self, cat: Option<&FinCat>) -> String {
        let mut s = format!("$ {}\n", self.command);
        for v in &self.verdicts {
            render_verdict(&mut s, v, cat, 0);
        }
        for (t, b) in &self.sections {
            let _ = writeln!(s, "[{t}]");
            s.push_str(b);
            if !b.ends_with('\n') {
                s.push('\n');
            }
        }
        for k in &self.skipped {
            let _ = writeln!(s, "skipped: {k}");
        }
        let _ = writeln!(s, "exit {}", self.exit);
        s
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"))
    }
}

/// Indented verdict tree; morphism and object indices are named through `cat` when given.
pub fn render_verdict(out: &mut String, v: &Verdict, cat: Option<&FinCat>, depth: usize) {
    let pad = "  ".repeat(depth);
    let _ = writeln!(out, "{pad}{}: {}", v.status, v.property);
    let obj = |x: usize| cat.map_or(format!("#{x}"), |c| c.obj_name(x).to_string());
    let mor = |m: usize| cat.map_or(format!("#{m}"), |c| c.mor_name(m).to_string());
    if let Some(cex) = &v.counterexample {
        let _ = writeln!(out, "{pad}  counterexample: {}", cex.render(&obj, &mor));
    }
    for w in v.witness.iter().take(5) {
        let _ = writeln!(out, "{pad}  witness: {}", w.render(&obj, &mor));
    }
    if v.witness.len() > 5 {
        let _ = writeln!(out, "{pad}  ... {} witnesses in total", v.witness.len());
    }
    for n in &v.notes {
        let _ = writeln!(out, "{pad}  note: {n}");
    }
    for p in &v.parts {
        render_verdict(out, p, cat, depth + 1);
    }
}
