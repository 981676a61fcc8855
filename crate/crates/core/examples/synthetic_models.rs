//! Generates seeded fixtures for both synthetic models and shows that the
//! same seed reproduces a run exactly.

use simout::synth::{generate_run, read_sidecar, write_synth, SynthModel, SynthParams, GENERATOR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("simout-example-synth");
    for model in [SynthModel::Logistic, SynthModel::PredatorPrey] {
        let p = SynthParams::new(model, 5, 200, 42);
        let files = write_synth(&p, dir.join(format!("{model:?}").to_lowercase()))?;
        let meta = read_sidecar(&files[0]).expect("sidecar written next to every run");
        println!(
            "{model:?}: {} files, outputs {:?}, generator {GENERATOR}, stream {}",
            files.len(),
            meta.output_names,
            meta.stream
        );
        let again = generate_run(&p, 0)?;
        let first = simout::ingest::read_output_file(&files[0], None)?;
        assert!((0..first.n_iters()).all(|i| again.row(i) == first.row(i)));
        let last = first.row(first.n_iters() - 1);
        println!("  run 0, last iteration: {last:?}");
    }
    println!("files under {}", dir.display());
    Ok(())
}
