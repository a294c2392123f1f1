//! Regenerates the code bundles under `data/codes`.
//!
//! Usage: `cargo run -p qldpc-gkp --example gen_bundles [-- <output dir>]`

use std::path::PathBuf;

use qldpc_gkp::code::{gross_code, hypergraph_product, lp1054_code, repetition_checks, repetition_code};
use qldpc_gkp::io::CodeBundle;
use qldpc_gkp::schedule::greedy_schedule;
use qldpc_gkp::Schedules;

fn main() -> qldpc_gkp::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/codes"));

    let rep3 = repetition_code(3).with_distance(Some(3));
    CodeBundle::write(
        &root.join("rep3"),
        "rep3",
        &rep3,
        &[("greedy", Schedules::greedy(&rep3)), ("serial", Schedules::serial(&rep3))],
    )?;

    let h = repetition_checks(3);
    let surface = hypergraph_product(&h, &h)?.with_distance(Some(3));
    CodeBundle::write(
        &root.join("surface13"),
        "surface13",
        &surface,
        &[("greedy", Schedules::greedy(&surface)), ("serial", Schedules::serial(&surface))],
    )?;

    let bb = gross_code().with_distance(Some(12));
    CodeBundle::write(&root.join("bb144"), "bb144", &bb, &[("depth6", Schedules::greedy(&bb))])?;

    let lp = lp1054_code().with_distance(Some(20));
    let shallow = Schedules::greedy(&lp);
    let deep = Schedules {
        x: Some(greedy_schedule(lp.h_x()).split_levels(5)),
        z: Some(greedy_schedule(lp.h_z()).split_levels(5)),
    };
    CodeBundle::write(&root.join("lp1054"), "lp1054", &lp, &[("depth8", shallow), ("depth40", deep)])?;

    println!("wrote bundles to {}", root.display());
    Ok(())
}
