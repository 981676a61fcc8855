//! Docking three implementations: two with the same dynamics and one with a
//! different growth rate. Prints the p-value table and the pairwise counts
//! of failed tests, and writes PDF/CDF overlays for one focal measure.

use simout::compare::{stats_compare, stats_compare_pw, TestSpec};
use simout::focal::{stats_gather, ExtractorSpec, FmMatrix};
use simout::ingest::RunSet;
use simout::render::{emit_svg, stats_compare_plot, stats_compare_table, CompareRow, TableFormat};
use simout::synth::{generate_run, SynthModel, SynthParams};

fn implementation(
    seed: u64,
    growth: f64,
    tag: &str,
) -> Result<FmMatrix, Box<dyn std::error::Error>> {
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
    let fms = [
        implementation(1, 0.3, "java")?,
        implementation(2, 0.3, "netlogo")?,
        implementation(3, 0.4, "patched")?,
    ];

    let mut rows = Vec::new();
    for (group, spec) in [
        ("parametric", TestSpec::parametric()),
        ("non-parametric", TestSpec::non_parametric()),
    ] {
        for other in &fms[1..] {
            let res = stats_compare(&[fms[0].clone(), other.clone()], &spec)?;
            rows.push(CompareRow::new(res).in_group(group));
        }
    }
    println!(
        "{}",
        stats_compare_table(&rows)?.render(TableFormat::PlainText)
    );
    println!(
        "{}",
        stats_compare_pw(&fms, &TestSpec::default())?.to_text(false)
    );

    let j = 4;
    let label = fms[0].fm_names()[j].label();
    let samples: Vec<(String, Vec<f64>)> = fms
        .iter()
        .map(|f| (f.tag().to_string(), f.column(j)))
        .collect();
    let (pdf, cdf) = stats_compare_plot(&samples, &label)?;
    let dir = std::env::temp_dir().join("simout-example-docking");
    std::fs::create_dir_all(&dir)?;
    emit_svg(&pdf, dir.join("pdf.svg"))?;
    emit_svg(&cdf, dir.join("cdf.svg"))?;
    println!("overlays for {label} under {}", dir.display());
    Ok(())
}
