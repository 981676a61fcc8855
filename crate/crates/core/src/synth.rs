//! Seeded synthetic simulation output for fixtures and demos.
//!
//! Every run draws from `ChaCha8Rng` keyed by the seed (little-endian `u64`
//! in the first 8 key bytes, the rest zero) with the stream number set to
//! the run index. Standard normals come from Box-Muller on uniforms built
//! as `(next_u64 >> 11) * 2^-53`. Any implementation reproducing these
//! three rules reproduces the fixtures exactly.

use std::fs;
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{write_output, Delimiter, OutputMatrix};

pub const GENERATOR: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthModel {
    /// Noisy logistic growth, one output.
    Logistic,
    /// Discrete stochastic Lotka-Volterra, outputs prey and predators.
    PredatorPrey,
}

impl SynthModel {
    pub fn output_names(self) -> Vec<String> {
        match self {
            SynthModel::Logistic => vec!["pop".into()],
            SynthModel::PredatorPrey => vec!["prey".into(), "pred".into()],
        }
    }

    /// Growth rate used when none is given.
    pub fn default_growth(self) -> f64 {
        match self {
            SynthModel::Logistic => 0.1,
            SynthModel::PredatorPrey => 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub model: SynthModel,
    pub runs: usize,
    pub iters: usize,
    pub seed: u64,
    /// Intrinsic growth rate (of the prey for the predator-prey model).
    pub growth: f64,
}

impl SynthParams {
    pub fn new(model: SynthModel, runs: usize, iters: usize, seed: u64) -> Self {
        SynthParams {
            model,
            runs,
            iters,
            seed,
            growth: model.default_growth(),
        }
    }

    pub fn with_growth(mut self, growth: f64) -> Self {
        self.growth = growth;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.iters == 0 {
            return Err(Error::Config("runs and iters must be positive".into()));
        }
        if !(self.growth.is_finite() && self.growth > 0.0 && self.growth < 2.0) {
            return Err(Error::Config(format!(
                "growth must be in (0, 2), got {}",
                self.growth
            )));
        }
        Ok(())
    }
}

/// Sidecar metadata written next to each generated file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthMeta {
    pub generator: String,
    pub seed: u64,
    pub stream: u64,
    pub run: usize,
    pub params: SynthParams,
    pub output_names: Vec<String>,
}

/// The random source of one run.
pub struct RunRng {
    rng: ChaCha8Rng,
}

impl RunRng {
    pub fn new(seed: u64, run: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(run);
        RunRng { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller, one draw per pair of uniforms.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Generates the output matrix of run `run`.
pub fn generate_run(p: &SynthParams, run: usize) -> Result<OutputMatrix> {
    p.validate()?;
    let mut rng = RunRng::new(p.seed, run as u64);
    let rows = match p.model {
        SynthModel::Logistic => logistic(p, &mut rng),
        SynthModel::PredatorPrey => predator_prey(p, &mut rng),
    };
    OutputMatrix::from_rows(rows, Some(p.model.output_names()))
}

fn logistic(p: &SynthParams, rng: &mut RunRng) -> Vec<Vec<f64>> {
    const K: f64 = 1000.0;
    let mut x: f64 = 10.0;
    let mut rows = Vec::with_capacity(p.iters);
    for _ in 0..p.iters {
        rows.push(vec![x]);
        let next = x + p.growth * x * (1.0 - x / K) + x.sqrt() * rng.normal();
        x = next.round().max(1.0);
    }
    rows
}

fn predator_prey(p: &SynthParams, rng: &mut RunRng) -> Vec<Vec<f64>> {
    const K: f64 = 1000.0;
    const PREDATION: f64 = 0.002;
    const CONVERSION: f64 = 0.25;
    const DEATH: f64 = 0.2;
    let (mut prey, mut pred): (f64, f64) = (900.0, 20.0);
    let mut rows = Vec::with_capacity(p.iters);
    for _ in 0..p.iters {
        rows.push(vec![prey, pred]);
        let eaten = PREDATION * prey * pred;
        let e1 = rng.normal();
        let e2 = rng.normal();
        let next_prey = prey + p.growth * prey * (1.0 - prey / K) - eaten + prey.sqrt() * e1;
        let next_pred = pred + CONVERSION * eaten - DEATH * pred + pred.sqrt() * e2;
        prey = next_prey.round().max(1.0);
        pred = next_pred.round().max(1.0);
    }
    rows
}

/// File name of run `run`; zero-padded so lexical order is run order.
pub fn run_file_name(run: usize) -> String {
    format!("run_{run:03}.csv")
}

/// Sidecar path for a data file: `run_000.csv` → `run_000.meta.json`.
pub fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("meta.json")
}

/// Reads the sidecar of a data file if there is one.
pub fn read_sidecar(data: &Path) -> Option<SynthMeta> {
    let text = fs::read_to_string(sidecar_path(data)).ok()?;
    serde_json::from_str(&text).ok()
}

/// Writes `runs` CSV files plus sidecars into `dir` and returns the data
/// file paths in run order.
pub fn write_synth(p: &SynthParams, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    p.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(p.runs);
    for run in 0..p.runs {
        let m = generate_run(p, run)?;
        let path = dir.join(run_file_name(run));
        fs::write(&path, write_output(&m, Delimiter::Comma))?;
        let meta = SynthMeta {
            generator: GENERATOR.into(),
            seed: p.seed,
            stream: run as u64,
            run,
            params: p.clone(),
            output_names: p.model.output_names(),
        };
        fs::write(
            sidecar_path(&path),
            serde_json::to_string_pretty(&meta)? + "\n",
        )?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_are_reproducible_and_distinct() {
        let p = SynthParams::new(SynthModel::PredatorPrey, 2, 50, 7);
        let a = generate_run(&p, 0).unwrap();
        assert_eq!(a, generate_run(&p, 0).unwrap());
        assert_ne!(a, generate_run(&p, 1).unwrap());
        let q = SynthParams::new(SynthModel::PredatorPrey, 2, 50, 8);
        assert_ne!(a, generate_run(&q, 0).unwrap());
    }

    #[test]
    fn normals_look_standard() {
        let mut rng = RunRng::new(1, 0);
        let xs: Vec<f64> = (0..20000).map(|_| rng.normal()).collect();
        let m = crate::stats::mean(&xs);
        let v = crate::stats::sample_variance(&xs);
        assert!(m.abs() < 0.03, "{m}");
        assert!((v - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn predator_prey_settles() {
        let p = SynthParams::new(SynthModel::PredatorPrey, 1, 300, 3);
        let m = generate_run(&p, 0).unwrap();
        assert_eq!(m.output_names(), ["prey", "pred"]);
        let prey = m.column(0);
        let pred = m.column(1);
        assert!(prey
            .iter()
            .chain(&pred)
            .all(|&v| v >= 1.0 && v.fract() == 0.0));
        let late_prey = crate::stats::mean(&prey[100..]);
        let late_pred = crate::stats::mean(&pred[100..]);
        assert!((300.0..500.0).contains(&late_prey), "{late_prey}");
        assert!((60.0..120.0).contains(&late_pred), "{late_pred}");
    }

    #[test]
    fn logistic_grows_towards_capacity() {
        let p = SynthParams::new(SynthModel::Logistic, 1, 200, 11);
        let x = generate_run(&p, 0).unwrap().column(0);
        assert_eq!(x[0], 10.0);
        assert!(x[199] > 900.0 && x[199] < 1100.0, "{}", x[199]);
    }

    #[test]
    fn bad_params_rejected() {
        let p = SynthParams::new(SynthModel::Logistic, 0, 10, 1);
        assert!(generate_run(&p, 0).is_err());
        let p = SynthParams::new(SynthModel::Logistic, 1, 10, 1).with_growth(-1.0);
        assert!(generate_run(&p, 0).is_err());
    }

    #[test]
    fn writes_files_and_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let p = SynthParams::new(SynthModel::Logistic, 3, 20, 5);
        let paths = write_synth(&p, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let meta = read_sidecar(&paths[2]).unwrap();
        assert_eq!(meta.run, 2);
        assert_eq!(meta.generator, GENERATOR);
        let back = crate::ingest::read_output_file(&paths[2], None).unwrap();
        assert_eq!(back.column(0), generate_run(&p, 2).unwrap().column(0));
    }
}
