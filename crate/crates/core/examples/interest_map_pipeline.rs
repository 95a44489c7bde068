//! The whole interest-map branch, writing map.jsonl and map.svg.
//!
//! cargo run --release --example interest_map_pipeline [-- out_dir]

use tweetlens::pipeline::{manifest, run_map, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config =
        PipelineConfig::from_toml_file(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/demo.toml"))?;
    config.output_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "interest-map".into())
        .into();
    let artifacts = run_map(&config)?;
    print!("{}", manifest(&config, &artifacts));
    Ok(())
}
