use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{ChainInputs, ExperimentConfig};
use super::histogram::{detect_modes, Histogram, ModeReport};
use super::{CliError, Command};
use crate::compose::{
    build_transition_table, default_grid_step, predict_sequence, ProtocolConfig, TransitionKey,
    TransitionTable,
};
use crate::distfit::{
    exceedance_probability, fit_weibull, probabilistic_max, DataSpaceSize, EmpiricalSample, FitReport, Unit,
};
use crate::isa_sim::{
    mul_chain_program, mul_map_range_ratio, mul_power_map, parse_program, run_sequence, Opcode, CHAIN_A,
    CHAIN_B, NUM_REGS,
};
use crate::rng::{child_seed, seeded};
use crate::search::{ga_optimize, pattern_sweep, random_profile, sweep_csv, GaConfig, Objective};

/// Provenance stamped on every output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
}

impl Meta {
    fn new(command: Command, cfg: &ExperimentConfig) -> Self {
        Meta {
            command: command.name().to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
        }
    }

    fn csv_header(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).expect("meta serializes"))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FitFile {
    pub meta: Meta,
    #[serde(flatten)]
    pub fit: FitReport,
}

struct Out {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Out {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Out {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, meta: &Meta, body: &str) -> Result<(), CliError> {
        self.write(name, meta.csv_header() + body)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).expect("report serializes");
        s.push('\n');
        self.write(name, s)
    }
}

/// Runs one subcommand and returns the files it wrote.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let meta = Meta::new(command, cfg);
    let mut out = Out::new(&cfg.out_dir)?;
    match command {
        Command::Profile => profile(cfg, &meta, &mut out)?,
        Command::Wcec => wcec(cfg, &meta, &mut out)?,
        Command::Ga => ga(cfg, &meta, &mut out)?,
        Command::Patterns => patterns(cfg, &meta, &mut out)?,
        Command::Characterize => characterize(cfg, &meta, &mut out)?,
        Command::Predict => predict(cfg, &meta, &mut out)?,
        Command::Bimodal => bimodal(cfg, &meta, &mut out)?,
        Command::Mulmap => mulmap(cfg, &meta, &mut out)?,
    }
    Ok(out.written)
}

fn profile(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let sample = random_profile(cfg.benchmark, &cfg.power, cfg.runs, cfg.seed);
    let fit = fit_weibull(&sample)?;
    let hist = Histogram::freedman_diaconis(&sample);
    let mut rows = String::from("run,avg_power_mW\n");
    for (i, v) in sample.values().iter().enumerate() {
        rows.push_str(&format!("{i},{v}\n"));
    }
    out.csv("sample.csv", meta, &rows)?;
    out.json("fit.json", &FitFile { meta: meta.clone(), fit })?;
    out.csv("histogram.csv", meta, &hist.to_csv())?;
    Ok(())
}

/// Reads `fit.json` written by `profile`.
pub fn read_fit(path: &Path) -> Result<FitReport, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let f: FitFile = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(f.fit)
}

/// Numeric column `col` of a CSV written by this tool.
fn csv_column(path: &Path, col: usize) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            l.split(',')
                .nth(col)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: bad row `{l}`", path.display())))
        })
        .collect()
}

fn wcec(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let default_fit = out.dir.join("fit.json");
    let (fit, source) = match &cfg.fit_file {
        Some(p) => (read_fit(p)?, p.display().to_string()),
        None if default_fit.exists() => (read_fit(&default_fit)?, default_fit.display().to_string()),
        None => {
            let sample = random_profile(cfg.benchmark, &cfg.power, cfg.runs, cfg.seed);
            (fit_weibull(&sample)?, "inline".to_string())
        }
    };
    let space = DataSpaceSize::from_bits(cfg.benchmark.layout().input_bits())?;
    let x_star = probabilistic_max(&fit.params, space);

    let mut candidates: Vec<(String, f64)> = Vec::new();
    let sample_csv = out.dir.join("sample.csv");
    if sample_csv.exists() {
        let v = csv_column(&sample_csv, 1)?;
        candidates.push(("profile_max".into(), v.iter().copied().fold(f64::NEG_INFINITY, f64::max)));
    }
    let ga_json = out.dir.join("ga.json");
    if ga_json.exists() {
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&ga_json)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", ga_json.display())))?;
        for dir in ["maximize", "minimize"] {
            if let Some(x) = v[dir]["best_fitness"].as_f64() {
                candidates.push((format!("ga_{dir}"), x));
            }
        }
    }
    let sweep = out.dir.join("sweep.csv");
    if sweep.exists() {
        let v = csv_column(&sweep, 2)?;
        candidates.push(("patterns_max".into(), v.iter().copied().fold(f64::NEG_INFINITY, f64::max)));
    }
    let rows: Vec<_> = candidates
        .iter()
        .map(|(name, value)| {
            json!({
                "source": name,
                "avg_power_mW": value,
                "exceedance": exceedance_probability(&fit.params, *value),
                "bounded": *value <= x_star,
            })
        })
        .collect();
    out.json(
        "wcec.json",
        &json!({
            "meta": meta,
            "fit_source": source,
            "fit": fit,
            "nbits": space.nbits(),
            "x_star": x_star,
            "exceedance": rows,
        }),
    )
}

fn ga(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let mut summary = serde_json::Map::new();
    summary.insert("meta".into(), json!(meta));
    for (objective, tag, suffix) in [
        (Objective::Maximize, "maximize", ""),
        (Objective::Minimize, "minimize", "_min"),
    ] {
        let ga_cfg = GaConfig {
            objective,
            seed: cfg.seed,
            ..cfg.ga
        };
        let r = ga_optimize(cfg.benchmark, &cfg.power, &ga_cfg).map_err(|e| CliError::Config(e.to_string()))?;
        out.write(&format!("best{suffix}.bin"), r.best.bytes())?;
        out.csv(&format!("trace{suffix}.csv"), meta, &r.trace_csv())?;
        summary.insert(
            tag.into(),
            json!({
                "best_fitness": r.best_fitness,
                "evaluations": r.evaluations,
                "best_hex": r.best.to_hex(),
            }),
        );
    }
    out.json("ga.json", &summary)
}

fn patterns(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let results = pattern_sweep(cfg.benchmark, &cfg.power, cfg.seed);
    let sample = EmpiricalSample::new(results.iter().map(|r| r.avg_power).collect(), Unit::Milliwatt)?;
    let hist = Histogram::freedman_diaconis(&sample);
    let modes = detect_modes(&hist).ok();
    let label = |v: f64| -> usize {
        modes.as_ref().map_or(0, |m| {
            (0..m.count)
                .min_by(|&a, &b| (m.centers[a] - v).abs().total_cmp(&(m.centers[b] - v).abs()))
                .unwrap_or(0)
        })
    };
    let mut body = String::new();
    for (line, r) in sweep_csv(&results).lines().zip(std::iter::once(None).chain(results.iter().map(Some))) {
        match r {
            None => body.push_str(&format!("{line},cluster\n")),
            Some(r) => body.push_str(&format!("{line},{}\n", label(r.avg_power))),
        }
    }
    out.csv("sweep.csv", meta, &body)?;
    out.json("sweep_modes.json", &json!({ "meta": meta, "modes": modes }))
}

fn characterize(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let protocol = ProtocolConfig {
        runs: cfg.runs,
        seed: cfg.seed,
    };
    let table = build_transition_table(&cfg.opcodes, &cfg.power, &protocol)?;
    out.json("transitions.json", &json!({ "meta": meta, "transitions": table }))
}

/// Reads a table written by `characterize`, or a bare list of entries.
pub fn read_table(path: &Path) -> Result<TransitionTable, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let list = if v.is_array() { v } else { v["transitions"].clone() };
    serde_json::from_value(list).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn table_for(cfg: &ExperimentConfig, out: &Out) -> Result<Option<TransitionTable>, CliError> {
    let default = out.dir.join("transitions.json");
    match &cfg.transitions_file {
        Some(p) => read_table(p).map(Some),
        None if default.exists() => read_table(&default).map(Some),
        None => Ok(None),
    }
}

fn sequence_ops(cfg: &ExperimentConfig) -> Result<Vec<Opcode>, CliError> {
    match &cfg.sequence_file {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            let prog = parse_program(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Ok(prog.iter().map(|i| i.op).collect())
        }
        None if !cfg.sequence.is_empty() => Ok(cfg.sequence.clone()),
        None => Err(CliError::Config("predict needs `sequence` or `sequence_file`".into())),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Percentiles {
    pub mean: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub p999: f64,
}

fn predict(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let ops = sequence_ops(cfg)?;
    let table = table_for(cfg, out)?
        .ok_or_else(|| CliError::Config("predict needs `transitions_file` or transitions.json in the output directory".into()))?;
    let step = match cfg.grid_step {
        Some(s) => s,
        None => default_grid_step(&ops, &table)?,
    };
    let pred = predict_sequence(&ops, &table, step)?;
    let pct = Percentiles {
        mean: pred.mean(),
        p50: pred.percentile(0.5)?,
        p90: pred.percentile(0.9)?,
        p99: pred.percentile(0.99)?,
        p999: pred.percentile(0.999)?,
    };
    let keys: Vec<String> = pred.keys.iter().map(TransitionKey::to_string).collect();
    out.csv("prediction.csv", meta, &pred.pdf.to_csv())?;
    out.json(
        "percentiles.json",
        &json!({ "meta": meta, "sequence": ops, "transitions": keys, "grid_step": step, "percentiles_pJ": pct }),
    )
}

/// Transition energy of the multiply chain for `runs` operand pairs.
pub fn chain_energies(cfg: &ExperimentConfig) -> EmpiricalSample {
    let prog = mul_chain_program();
    let values: Vec<f64> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|i| {
            let s = child_seed(cfg.seed, i);
            let mut rng = seeded(s, 0);
            let (mut a, mut b): (u8, u8) = (rng.random(), rng.random());
            match cfg.chain_inputs {
                ChainInputs::All => {}
                ChainInputs::OddOdd => {
                    a |= 1;
                    b |= 1;
                }
                ChainInputs::EvenA => a &= !1,
            }
            let mut regs = [0u8; NUM_REGS];
            regs[CHAIN_A] = a;
            regs[CHAIN_B] = b;
            run_sequence(&prog, regs, &cfg.power, s).transition_energy()
        })
        .collect();
    EmpiricalSample::new(values, Unit::Picojoule).expect("finite energies")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BimodalReport {
    pub modes: ModeReport,
    pub predicted_p999: f64,
    pub upper_mode_bounded: bool,
}

/// Histogram, modes and the {mov, mul} prediction for the multiply chain.
pub fn bimodal_report(cfg: &ExperimentConfig, table: Option<TransitionTable>) -> Result<(Histogram, BimodalReport), CliError> {
    let sample = chain_energies(cfg);
    let hist = Histogram::freedman_diaconis(&sample);
    let modes = detect_modes(&hist)?;
    let ops: Vec<Opcode> = mul_chain_program().iter().map(|i| i.op).collect();
    let usable = table.filter(|t| ops.windows(2).all(|w| t.get(w[0], w[1]).is_some()));
    let table = match usable {
        Some(t) => t,
        None => build_transition_table(
            &[Opcode::Mov, Opcode::Mul],
            &cfg.power,
            &ProtocolConfig {
                runs: cfg.runs,
                seed: child_seed(cfg.seed, 0x6368_6169_6e),
            },
        )?,
    };
    let step = match cfg.grid_step {
        Some(s) => s,
        None => default_grid_step(&ops, &table)?,
    };
    let predicted_p999 = predict_sequence(&ops, &table, step)?.percentile(0.999)?;
    let upper = modes.centers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((
        hist,
        BimodalReport {
            upper_mode_bounded: upper <= predicted_p999,
            modes,
            predicted_p999,
        },
    ))
}

fn bimodal(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let table = table_for(cfg, out)?;
    let (hist, report) = bimodal_report(cfg, table)?;
    out.csv("histogram.csv", meta, &hist.to_csv())?;
    out.json("modes.json", &json!({ "meta": meta, "report": report }))
}

fn mulmap(cfg: &ExperimentConfig, meta: &Meta, out: &mut Out) -> Result<(), CliError> {
    let map = mul_power_map(&cfg.power);
    let mut body = String::with_capacity(65_536 * 16);
    body.push_str("a,b,energy_pJ\n");
    for (a, row) in map.iter().enumerate() {
        for (b, e) in row.iter().enumerate() {
            body.push_str(&format!("{a},{b},{e}\n"));
        }
    }
    out.csv("map.csv", meta, &body)?;
    let cells = map.iter().flat_map(|r| r.iter().copied());
    let (lo, hi) = cells.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    out.json(
        "mulmap.json",
        &json!({
            "meta": meta,
            "min_pJ": lo,
            "max_pJ": hi,
            "soc_power_mW": cfg.power.soc_power,
            "range_ratio": mul_map_range_ratio(&map, &cfg.power),
        }),
    )
}
