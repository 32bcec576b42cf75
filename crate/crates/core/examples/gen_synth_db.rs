//! Generate a synthetic demo database (sources, graded degradations and a
//! manifest) for trying out the pipeline without real subjective data.
//!
//!     cargo run --release -p vqfuse-core --example gen_synth_db -- \
//!         <out-dir> <database-id> <seed-base> [sources] [frames]

use vqfuse_core::synth::{build_database, SynthConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 4 {
        eprintln!("usage: gen_synth_db <out-dir> <database-id> <seed-base> [sources] [frames]");
        std::process::exit(1);
    }
    let out_dir = std::path::PathBuf::from(&args[1]);
    let database_id = args[2].clone();
    let seed_base: u64 = args[3].parse().expect("seed-base");
    let sources: usize = args
        .get(4)
        .map(|v| v.parse().expect("sources"))
        .unwrap_or(6);
    let frames: usize = args.get(5).map(|v| v.parse().expect("frames")).unwrap_or(6);

    let config = SynthConfig {
        database_id,
        source_seeds: (0..sources as u64).map(|i| seed_base + i).collect(),
        width: 96,
        height: 96,
        frames,
        fps: 30.0,
    };
    let manifest = build_database(&out_dir, &config).unwrap();
    println!(
        "wrote {} sources, {} sequences under {}",
        manifest.sources.len(),
        manifest.sequences.len(),
        out_dir.display()
    );
}
