//! Distributional analysis of focal measures from two setups: a figure grid
//! per focal measure and partial LaTeX tables merged into one.

use simout::focal::{stats_gather, ExtractorSpec, FmMatrix};
use simout::ingest::RunSet;
use simout::render::{dist_plot_per_fm, dist_table_per_fm, emit_svg, TableFormat};
use simout::synth::{generate_run, SynthModel, SynthParams};

fn setup(seed: u64, growth: f64, tag: &str) -> Result<FmMatrix, Box<dyn std::error::Error>> {
    let p = SynthParams::new(SynthModel::PredatorPrey, 30, 100, seed).with_growth(growth);
    let runs = (0..p.runs)
        .map(|r| generate_run(&p, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rs = RunSet::new(runs, tag)?;
    rs.set_output_names(SynthModel::PredatorPrey.output_names())?;
    Ok(stats_gather(
        &rs,
        &ExtractorSpec::SteadyStateSixpack { ss_idx: 50 },
        None,
        tag,
    )?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let setups = [setup(1, 0.3, "v1")?, setup(2, 0.35, "v2")?];
    let dir = std::env::temp_dir().join("simout-example-dist");
    std::fs::create_dir_all(&dir)?;

    let mut merged = None;
    for j in [0, 4] {
        let label = setups[0].fm_names()[j].label();
        let samples: Vec<(String, Vec<f64>)> = setups
            .iter()
            .map(|f| (f.tag().to_string(), f.column(j)))
            .collect();
        emit_svg(
            &dist_plot_per_fm(&samples, &label, 0.05)?,
            dir.join(format!("dist_{label}.svg")),
        )?;
        let part = dist_table_per_fm(&samples, &label, 0.05)?;
        match merged.as_mut() {
            None => merged = Some(part),
            Some(t) => t.merge(&part)?,
        }
    }
    let table = merged.expect("two focal measures");
    println!("{}", table.render(TableFormat::PlainText));
    println!("{}", table.render(TableFormat::Latex));
    println!("figures under {}", dir.display());
    Ok(())
}
