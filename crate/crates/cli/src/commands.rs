//! Experiment drivers.
//!
//! Each command assembles a [`Table`] with a pinned column order, renders it
//! as CSV or JSON, and writes it once. Rows echo the full configuration
//! (sizes, photon numbers, sample counts, seed, tool version), so any row can
//! be reproduced from the file alone.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde_json::json;

use qnet_core::brickwork;
use qnet_core::ensemble;
use qnet_core::gaussian::{
    apply_bsn, apply_loss, apply_phase_shifts, make_input_state, qfi_displacement,
};
use qnet_core::qfi::{self, QfiBreakdown};
use qnet_core::unitary::sample_haar_unitary;
use qnet_core::{LossSpec, RngStream, SqueezingSpec};

use crate::args::{
    Cli, Command, HaarAverageArgs, LocalDepthArgs, LossSweepArgs, OutputArgs, OutputFormat,
    SingleArgs,
};
use crate::error::{CliError, Result};
use crate::matrix_file;
use crate::output::{self, Cell, Table, TOOL_VERSION};
use crate::validate;

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::HaarAverage(args) => {
            init_threads(args.output.threads)?;
            haar_average(&args)
        }
        Command::LocalDepth(args) => {
            init_threads(args.output.threads)?;
            local_depth(&args)
        }
        Command::LossSweep(args) => {
            init_threads(args.output.threads)?;
            loss_sweep(&args)
        }
        Command::Single(args) => single(&args),
        Command::Validate(args) => {
            init_threads(args.threads)?;
            validate::run(&args)
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config(
            "--threads must be at least 1".to_string(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn emit(table: &Table, out: &OutputArgs, seed: u64) -> Result<()> {
    let timestamp = (!out.no_timestamp).then(output::now_unix);
    let contents = match out.format {
        OutputFormat::Csv => output::render_csv(table, timestamp),
        OutputFormat::Json => output::render_json(table, output::meta_object(Some(seed), timestamp)),
    };
    output::write_output(out.out.as_deref(), &contents)
}

fn single_or_list<T: Copy>(
    single: Option<T>,
    list: &Option<Vec<T>>,
    flag: &str,
) -> Result<Vec<T>> {
    match (single, list) {
        (Some(v), None) => Ok(vec![v]),
        (None, Some(values)) if !values.is_empty() => Ok(values.clone()),
        (None, Some(_)) => Err(CliError::Config(format!("--{flag}-list must not be empty"))),
        // clap enforces exactly one of the pair; kept as a defensive arm.
        _ => Err(CliError::Config(format!(
            "exactly one of --{flag} / --{flag}-list is required"
        ))),
    }
}

fn haar_average(args: &HaarAverageArgs) -> Result<()> {
    let m_list = single_or_list(args.m, &args.m_list, "M")?;
    let fractions = args.k_fractions.clone().unwrap_or_default();
    for &f in &fractions {
        if !f.is_finite() || f <= 0.0 || f >= 1.0 {
            return Err(CliError::Config(format!(
                "--k-fractions entries must lie strictly between 0 and 1, got {f}"
            )));
        }
    }
    let k_values: Vec<f64> = fractions.iter().map(|f| f * TAU * args.nbar).collect();

    let mut columns: Vec<String> = [
        "M",
        "nbar",
        "eta",
        "samples",
        "mean_h_lo",
        "std_h_lo",
        "se_h_lo",
        "mean_h_mo",
        "std_h_mo",
        "se_h_mo",
        "lemma1_closed_form",
        "ratio_mean_to_closed_form",
        "mean_h_mlo",
        "std_h_mlo",
        "se_h_mlo",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for i in 1..=k_values.len() {
        columns.push(format!("k_{i}"));
        columns.push(format!("tail_fraction_{i}"));
    }
    columns.push("seed".to_string());
    columns.push("tool_version".to_string());
    let mut table = Table::new(columns);

    for &m in &m_list {
        let r = ensemble::mc_haar_qfi_with_tails(
            m,
            args.nbar,
            args.eta,
            args.samples,
            args.seed,
            &k_values,
        )?;
        let mut row = vec![
            Cell::Count(m as u64),
            Cell::Real(args.nbar),
            Cell::Real(args.eta),
            Cell::Count(args.samples as u64),
            Cell::Real(r.mean_h_lo),
            Cell::Real(r.std_h_lo),
            Cell::Real(r.se_h_lo()),
            Cell::Real(r.mean_h_mo),
            Cell::Real(r.std_h_mo),
            Cell::Real(r.se_h_mo()),
            Cell::Real(r.closed_form_mean),
            Cell::Real(r.mean_h_lo / r.closed_form_mean),
            Cell::Real(r.mean_h_mlo),
            Cell::Real(r.std_h_mlo),
            Cell::Real(r.se_h_mlo()),
        ];
        for tail in &r.tail_fractions {
            row.push(Cell::Real(tail.k));
            row.push(Cell::Real(tail.fraction));
        }
        row.push(Cell::Count(args.seed));
        row.push(Cell::Text(TOOL_VERSION.to_string()));
        table.push_row(row);
    }
    emit(&table, &args.output, args.seed)
}

fn local_depth(args: &LocalDepthArgs) -> Result<()> {
    let depths = match &args.depths {
        Some(d) if !d.is_empty() => d.clone(),
        Some(_) => return Err(CliError::Config("--depths must not be empty".to_string())),
        None => brickwork::default_depth_grid(args.m),
    };
    let stats = brickwork::depth_sweep(args.m, args.nbar, &depths, args.configs, args.seed)?;

    let mut table = Table::new(
        [
            "M",
            "nbar",
            "depth",
            "depth_over_M2",
            "configs",
            "mean_h_lo_over_M2",
            "mean_h_mlo_over_M2",
            "std_h_lo_over_M2",
            "std_h_mlo_over_M2",
            "se_h_lo_over_M2",
            "se_h_mlo_over_M2",
            "seed",
            "tool_version",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    let m2 = (args.m * args.m) as f64;
    for s in &stats {
        table.push_row(vec![
            Cell::Count(args.m as u64),
            Cell::Real(args.nbar),
            Cell::Count(s.depth as u64),
            Cell::Real(s.depth as f64 / m2),
            Cell::Count(s.configs as u64),
            Cell::Real(s.mean_h_lo_over_m2),
            Cell::Real(s.mean_h_mlo_over_m2),
            Cell::Real(s.std_h_lo_over_m2),
            Cell::Real(s.std_h_mlo_over_m2),
            Cell::Real(s.se_h_lo_over_m2()),
            Cell::Real(s.se_h_mlo_over_m2()),
            Cell::Count(args.seed),
            Cell::Text(TOOL_VERSION.to_string()),
        ]);
    }
    emit(&table, &args.output, args.seed)
}

fn loss_sweep(args: &LossSweepArgs) -> Result<()> {
    let etas = single_or_list(args.eta, &args.eta_list, "eta")?;
    let beta = qfi::loss_threshold_beta(0.5, args.nbar, args.m)?;

    let mut table = Table::new(
        [
            "M",
            "nbar",
            "eta",
            "samples",
            "mean_h_lo_lossy",
            "std_h_lo_lossy",
            "se_h_lo_lossy",
            "closed_vs_covariance_max_rel_err",
            "beta_threshold_alpha_0.5",
            "seed",
            "tool_version",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for &eta in &etas {
        let r = ensemble::mc_haar_qfi(args.m, args.nbar, eta, args.samples, args.seed)?;
        let max_rel = dual_path_max_rel_err(args.m, args.nbar, eta, args.samples, args.seed)?;
        table.push_row(vec![
            Cell::Count(args.m as u64),
            Cell::Real(args.nbar),
            Cell::Real(eta),
            Cell::Count(args.samples as u64),
            Cell::Real(r.mean_h_lo),
            Cell::Real(r.std_h_lo),
            Cell::Real(r.se_h_lo()),
            Cell::Real(max_rel),
            Cell::Real(beta),
            Cell::Count(args.seed),
            Cell::Text(TOOL_VERSION.to_string()),
        ]);
    }
    emit(&table, &args.output, args.seed)
}

/// Worst relative disagreement between the closed-form lossy QFI and the full
/// covariance pipeline (input state, network, optimal phases, loss channel,
/// moment-based QFI) over the same Haar streams the ensemble used.
fn dual_path_max_rel_err(
    m: usize,
    nbar: f64,
    eta: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let loss = LossSpec::new(eta)?;
    let squeeze = SqueezingSpec::new(0, nbar * m as f64)?;
    let errors = (0..samples)
        .into_par_iter()
        .map(|i| -> qnet_core::Result<f64> {
            let mut rng = RngStream::new(seed, i as u64).rng();
            let u = sample_haar_unitary(m, &mut rng)?;
            let closed = qfi::h_lossy(&u, nbar, eta)?;
            let phases = qfi::optimal_phases(&u, 0)?;
            let state = make_input_state(m, &squeeze)?;
            let state = apply_bsn(&state, &u)?;
            let state = apply_phase_shifts(&state, &phases)?;
            let state = apply_loss(&state, &loss);
            let moment = qfi_displacement(&state)?;
            // closed ≥ 2M keeps the denominator away from zero.
            Ok((moment - closed).abs() / closed)
        })
        .collect::<qnet_core::Result<Vec<f64>>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

fn single(args: &SingleArgs) -> Result<()> {
    if !args.nbar.is_finite() || args.nbar < 0.0 {
        return Err(CliError::Config(format!(
            "--nbar must be finite and nonnegative, got {}",
            args.nbar
        )));
    }
    let (u, source) = match (&args.matrix_file, args.m) {
        (Some(path), None) => (
            matrix_file::read_unitary(path)?,
            json!({ "matrix_file": path.display().to_string() }),
        ),
        (None, Some(m)) => {
            let seed = args
                .seed
                .ok_or_else(|| CliError::Config("--seed is required with --M".to_string()))?;
            let mut rng = RngStream::new(seed, 0).rng();
            (sample_haar_unitary(m, &mut rng)?, json!({ "seed": seed }))
        }
        _ => {
            return Err(CliError::Config(
                "exactly one of --M / --matrix-file is required".to_string(),
            ))
        }
    };

    let breakdown = QfiBreakdown::from_unitary(&u, args.nbar);
    let mut meta = serde_json::Map::new();
    meta.insert("tool_version".to_string(), json!(TOOL_VERSION));
    if let serde_json::Value::Object(source) = source {
        meta.extend(source);
    }
    if !args.no_timestamp {
        meta.insert("generated_unix_s".to_string(), json!(output::now_unix()));
    }
    let doc = json!({ "meta": meta, "breakdown": breakdown });
    let mut text = serde_json::to_string_pretty(&doc).expect("json render");
    text.push('\n');
    output::write_output(args.out.as_deref(), &text)
}
