//! Superimposed, extremes and moving-average plots of one output, written
//! as SVG and PGF.

use simout::ingest::RunSet;
use simout::render::{emit_pgf, emit_svg, output_plot, PlotMode};
use simout::synth::{generate_run, SynthModel, SynthParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SynthParams::new(SynthModel::PredatorPrey, 20, 300, 9);
    let runs = (0..p.runs)
        .map(|r| generate_run(&p, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rs = RunSet::new(runs, "pp")?;
    rs.set_output_names(SynthModel::PredatorPrey.output_names())?;

    let dir = std::env::temp_dir().join("simout-example-plots");
    std::fs::create_dir_all(&dir)?;
    let plots = [
        (
            "superimposed",
            output_plot(&rs, 0, PlotMode::Superimposed, Some(&[0, 1, 2]))?,
        ),
        ("extremes", output_plot(&rs, 0, PlotMode::Extremes, None)?),
        (
            "movavg",
            output_plot(&rs, 0, PlotMode::MovingAvg(15), Some(&[0, 1, 2]))?,
        ),
    ];
    for (name, fig) in &plots {
        emit_svg(fig, dir.join(format!("prey_{name}.svg")))?;
        emit_pgf(fig, dir.join(format!("prey_{name}.tex")))?;
        println!(
            "{name}: {} layers, y range [{:.1}, {:.1}]",
            fig.layers.len(),
            fig.y.min,
            fig.y.max
        );
    }
    println!("figures under {}", dir.display());
    Ok(())
}
