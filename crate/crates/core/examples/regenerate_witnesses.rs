//! Rebuild `witnesses/veronese_m3_d{1..8}.json`.
//!
//! Run with `cargo run --release -p tropsec --example regenerate_witnesses`.

use std::path::Path;

use tropsec::bounds::eval_voronoi_partition;
use tropsec::models::veronese_config;
use tropsec::search::{packing_witness_for, veronese_m3_expected, BundledWitness, BundledWitnesses, BUNDLED_DEGREES};
use tropsec::GramForm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("witnesses");
    let g = GramForm::standard(3);
    for d in BUNDLED_DEGREES {
        let config = veronese_config(3, d)?;
        let mut witnesses = Vec::new();
        let n = config.len();
        for k in (1..).take_while(|&k| k == 1 || veronese_m3_expected(d, k - 1) < n) {
            let target = veronese_m3_expected(d, k);
            let witness = packing_witness_for(d, k, target)
                .ok_or_else(|| format!("no realisable packing for d={d}, k={k}"))?;
            let total = eval_voronoi_partition(&config, &witness, &g)?.total;
            if total != target {
                return Err(format!("d={d}, k={k}: total {total} instead of {target}").into());
            }
            eprintln!("d={d} k={k} total={total}");
            witnesses.push(BundledWitness { k, total, witness });
        }
        let data = BundledWitnesses { m: 3, d, witnesses };
        let path = dir.join(format!("veronese_m3_d{d}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&data)? + "\n")?;
    }
    Ok(())
}
