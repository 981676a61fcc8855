//! Reads a set of replication files and gathers focal measures with both
//! extractors.

use simout::focal::{extract_sixpack, stats_gather, ExtractorSpec};
use simout::ingest::{expand_glob, load_run_set};
use simout::synth::{write_synth, SynthModel, SynthParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("simout-example-ingest");
    write_synth(
        &SynthParams::new(SynthModel::PredatorPrey, 10, 150, 7),
        &dir,
    )?;

    let paths = expand_glob(&format!("{}/*.csv", dir.display()))?;
    let mut rs = load_run_set(&paths, "pp")?;
    rs.set_output_names(vec!["prey".into(), "pred".into()])?;
    println!(
        "{} runs, {} iterations, outputs {:?}",
        rs.len(),
        rs.n_iters(),
        rs.output_names()
    );

    let six = extract_sixpack(&rs.runs()[0].column(0), 75)?;
    println!("run 0 prey sixpack: {six:?}");

    let sixpack = stats_gather(
        &rs,
        &ExtractorSpec::SteadyStateSixpack { ss_idx: 75 },
        None,
        "pp",
    )?;
    println!("\nsteady-state sixpack, {} x {}:", sixpack.n(), sixpack.m());
    print!("{}", sixpack.to_delimited());

    let at = ExtractorSpec::AtIterations {
        iters: vec![0, 50, 149],
    };
    let snapshots = stats_gather(&rs, &at, Some(&[1]), "pp")?;
    println!("\npredators at iterations 0, 50, 149:");
    print!("{}", snapshots.to_delimited());
    Ok(())
}
