//! Summary statistics of every focal measure, printed as a table.

use simout::focal::{stats_gather, ExtractorSpec};
use simout::ingest::RunSet;
use simout::render::{stats_table_per_setup, TableFormat};
use simout::stats::{confidence_interval, stats_analyze};
use simout::synth::{generate_run, SynthModel, SynthParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SynthParams::new(SynthModel::Logistic, 30, 120, 3);
    let runs = (0..p.runs)
        .map(|r| generate_run(&p, r))
        .collect::<Result<Vec<_>, _>>()?;
    let rs = RunSet::new(runs, "logistic")?;
    let fm = stats_gather(
        &rs,
        &ExtractorSpec::SteadyStateSixpack { ss_idx: 80 },
        None,
        "logistic",
    )?;

    let stats = stats_analyze(&fm, 0.05)?;
    let table = stats_table_per_setup(fm.tag(), fm.fm_names(), &stats)?;
    println!("{}", table.render(TableFormat::PlainText));

    let (lo, hi) = confidence_interval(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.05)?;
    println!("95% CI of 1..5: ({lo:.5}, {hi:.5})");
    Ok(())
}
