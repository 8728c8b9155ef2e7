//! Series CSV and JSON summary writers.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::{json, Map, Value};

use krylov_circuits::analytics::AveragedSeries;
use krylov_circuits::rng::stream_fingerprint;

pub fn write_series(out: &Path, experiment: &str, series: &AveragedSeries) -> std::io::Result<PathBuf> {
    let path = out.join(format!("{experiment}_series.csv"));
    let mut csv = String::from("t,c_mean,c_stderr,n_samples\n");
    for t in 0..series.mean.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            t, series.mean[t], series.stderr[t], series.sample_count
        ));
    }
    std::fs::write(&path, csv)?;
    Ok(path)
}

pub struct SummaryBuilder {
    experiment: String,
    seed: u64,
    wall_clock_s: f64,
    params: Map<String, Value>,
    t_sat: Option<usize>,
    c_inf: Option<f64>,
    c_inf_stderr: Option<f64>,
    h0: Option<f64>,
    realization_streams: Vec<u64>,
}

impl SummaryBuilder {
    pub fn new(experiment: &str, seed: u64, elapsed: Duration) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed,
            wall_clock_s: elapsed.as_secs_f64(),
            params: Map::new(),
            t_sat: None,
            c_inf: None,
            c_inf_stderr: None,
            h0: None,
            realization_streams: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn saturation(mut self, t_sat: usize, c_inf: f64, c_inf_stderr: f64) -> Self {
        self.t_sat = Some(t_sat);
        self.c_inf = Some(c_inf);
        self.c_inf_stderr = Some(c_inf_stderr);
        self
    }

    pub fn h0(mut self, h0: f64) -> Self {
        self.h0 = Some(h0);
        self
    }

    /// Records the derived per-realization stream fingerprints, so a single
    /// realization can be re-run in isolation.
    pub fn realizations(mut self, samples: usize) -> Self {
        self.realization_streams = (0..samples as u64)
            .map(|i| stream_fingerprint(self.seed, &[i]))
            .collect();
        self
    }
}

pub fn write_summary(out: &Path, b: SummaryBuilder) -> std::io::Result<PathBuf> {
    let path = out.join(format!("{}_summary.json", b.experiment));
    let mut doc = json!({
        "experiment": b.experiment,
        "params": Value::Object(b.params),
        "t_sat": b.t_sat,
        "c_inf": b.c_inf,
        "c_inf_stderr": b.c_inf_stderr,
        "seed": b.seed,
        "version": crate::VERSION,
        "wall_clock_s": b.wall_clock_s,
        "realization_streams": b.realization_streams,
    });
    if let Some(h0) = b.h0 {
        doc["h0"] = json!(h0);
    }
    std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
    Ok(path)
}
