//! Subcommand drivers. Each one returns its output as bytes; rows are
//! computed in parallel and assembled in grid order, so the bytes depend only
//! on the configuration.

use gkp_crosstalk::{
    build_multiplexed_epr_state, build_output_state, decode, dv_baseline_fidelity,
    enumerate_admissible_etas, f_ideal, fidelity_upper_bound, mc_fidelity_estimate,
    perfect_transmission_check, CrosstalkParams, FidelityBoundParams, NoiseParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, Format};
use crate::grid::fmt_g12;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match *self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_g12(v),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn to_json(self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // round through the CSV text so both formats carry the same digits
            Cell::Real(v) => json!(fmt_g12(v).parse::<f64>().expect("formatted float parses")),
            Cell::Bool(v) => json!(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let internal = |e: csv::Error| CliError::Internal(format!("csv encoding: {e}"));
        w.write_record(&self.header).map_err(internal)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(internal)?;
        }
        w.into_inner().map_err(|e| CliError::Internal(format!("csv flush: {e}")))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json_bytes(&Value::Array(rows))
    }

    pub fn encode(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

/// Pretty JSON with a trailing newline. `serde_json` maps are ordered, so keys
/// come out alphabetically.
pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON values always serialize");
    out.push(b'\n');
    out
}

pub fn cmd_etas(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let rows = enumerate_admissible_etas(cfg.d1, cfg.d2, cfg.q_max, cfg.p_max)?
        .into_iter()
        .map(|c| {
            vec![
                Cell::Int(c.eta.num()),
                Cell::Int(c.eta.den()),
                Cell::Int(c.q),
                Cell::Int(c.p),
                Cell::Int(c.n),
            ]
        })
        .collect();
    Ok(Table {
        header: vec!["eta_num", "eta_den", "q", "p", "n"],
        rows,
    })
}

pub fn cmd_landscape(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let points = enumerate_admissible_etas(cfg.d1, cfg.d2, cfg.q_max, cfg.p_max)?;
    let bound = FidelityBoundParams::new(cfg.lattice_scale_l, points)?;
    let (d1, d2) = (cfg.d1 as u64, cfg.d2 as u64);
    let per_eta: Vec<Vec<Vec<Cell>>> = cfg
        .open_eta_grid()?
        .par_iter()
        .map(|&eta| {
            cfg.sigma_grid
                .iter()
                .map(|&sigma| {
                    let b = fidelity_upper_bound(eta, sigma, d1, d2, &bound)?;
                    Ok(vec![Cell::Real(eta), Cell::Real(sigma), Cell::Real(b)])
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(Table {
        header: vec!["eta", "sigma", "bound"],
        rows: per_eta.into_iter().flatten().collect(),
    })
}

pub fn cmd_tradeoff(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let cases: Vec<(i64, f64)> = (2..=cfg.d_max)
        .flat_map(|d| cfg.sigma_grid.iter().map(move |&s| (d, s)))
        .collect();
    let rows = cases
        .par_iter()
        .enumerate()
        .map(|(row, &(d, sigma))| {
            let params = CrosstalkParams::new(1, 1, d, d)?;
            let noise = NoiseParams {
                sigma,
                lognormal_mu: cfg.lognormal_mu,
                sigma_c: cfg.sigma_c,
                depol_p: 0.0,
            };
            // every row owns a stream of the configured seed
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(row as u64);
            let mc = mc_fidelity_estimate(&params, &noise, cfg.shots, &mut rng)?;
            Ok(vec![
                Cell::Int(d),
                Cell::Real(params.eta().to_f64()),
                Cell::Int(params.n()),
                Cell::Real(sigma),
                Cell::Real(f_ideal(sigma, d as u64, d as u64)),
                Cell::Real(mc.estimate),
                Cell::Real(mc.std_error),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        header: vec!["d", "eta", "n", "sigma", "f_ideal", "mc_estimate", "mc_stderr"],
        rows,
    })
}

pub fn cmd_dv_baseline(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let per_eta: Vec<Vec<Vec<Cell>>> = cfg
        .eta_grid
        .par_iter()
        .map(|&eta| {
            cfg.depol
                .iter()
                .map(|&p| {
                    let f = dv_baseline_fidelity(eta, p)?;
                    Ok(vec![Cell::Real(eta), Cell::Real(p), Cell::Real(f)])
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(Table {
        header: vec!["eta", "depol_p", "fidelity"],
        rows: per_eta.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub params: CrosstalkParams,
    pub trials: Table,
    /// False if any trial failed to reproduce its input labels.
    pub all_roundtrip: bool,
}

impl DecodeReport {
    pub fn to_json(&self) -> Value {
        let p = &self.params;
        let trials: Value = serde_json::from_slice(&self.trials.to_json()).expect("own JSON parses");
        json!({
            "params": {
                "q": p.q(), "p": p.p(), "n": p.n(),
                "r1": p.r1(), "r2": p.r2(),
                "alpha1": p.alpha1(), "alpha2": p.alpha2(),
            },
            "trials": trials,
        })
    }
}

pub fn cmd_decode_demo(cfg: &ExperimentConfig) -> Result<DecodeReport, CliError> {
    let params = perfect_transmission_check(cfg.eta, cfg.d1, cfg.d2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut all_roundtrip = true;
    for mu1 in 0..cfg.d1 {
        for mu2 in 0..cfg.d2 {
            let state = build_output_state(mu1, mu2, &params)?;
            let out = decode(&state, &params, &mut rng)?;
            all_roundtrip &= out.consistent && (out.mu1, out.mu2) == (mu1, mu2);
            rows.push(vec![
                Cell::Int(mu1),
                Cell::Int(mu2),
                Cell::Int(out.x as i64),
                Cell::Int(out.y as i64),
                Cell::Int(out.gauge_j),
                Cell::Int(out.mu1),
                Cell::Int(out.mu2),
                Cell::Bool(out.consistent),
            ]);
        }
    }
    Ok(DecodeReport {
        params,
        trials: Table {
            header: vec!["mu1_in", "mu2_in", "x", "y", "j", "mu1_out", "mu2_out", "consistent"],
            rows,
        },
        all_roundtrip,
    })
}

/// Amplitudes of a channel output state, or of the multiplexed EPR state
/// when `logical` is `None`.
pub fn cmd_state(cfg: &ExperimentConfig, logical: Option<(i64, i64)>) -> Result<Value, CliError> {
    let params = perfect_transmission_check(cfg.eta, cfg.d1, cfg.d2)?;
    let state = match logical {
        Some((mu1, mu2)) => build_output_state(mu1, mu2, &params)?,
        None => build_multiplexed_epr_state(&params)?,
    };
    serde_json::to_value(&state).map_err(|e| CliError::Internal(format!("state encoding: {e}")))
}
