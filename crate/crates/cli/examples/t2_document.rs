//! Prints the T2 Waldhausen instance (groups 0, Z/2, Z/4, Z/2+Z/2) as an FCAT document.
//! `data/t2.fcat` is the output of `cargo run --example t2_document`.

use catfrac::waldhausen::examples::t2_cofcat;
use catfrac_cli::fcat::{serialize, FcatDocument};

fn main() {
    let cc = t2_cofcat();
    let mut doc = FcatDocument::new(cc.base.clone());
    doc.set_class("Cof", cc.cof.clone());
    doc.zero = Some(cc.base.obj_name(cc.zero).to_string());
    doc.cof = Some("Cof".into());
    print!("{}", serialize(&doc));
}
