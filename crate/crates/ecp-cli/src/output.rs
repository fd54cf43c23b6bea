//! Rendering of protocol runs, sweeps and phase tables as text, JSON
//! (schema_version 1) and CSV. Floats are written with the shortest
//! round-trip encoding so re-parsing reproduces every value bit-exactly and
//! identical inputs give byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use ecp_core::{MonteCarloResult, PhasePair, ProtocolResult, SweepResult, SweepRow};

use crate::config::{ExperimentConfig, OutputFormat};

pub const JSON_SCHEMA_VERSION: u32 = 1;

/// Everything `ecp run` produced, serialized as one JSON document.
#[derive(Serialize)]
pub struct RunDocument<'a> {
    pub schema_version: u32,
    pub config: &'a ExperimentConfig,
    pub result: &'a ProtocolResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: &'a Option<MonteCarloResult>,
}

#[derive(Serialize)]
pub struct SweepDocument<'a> {
    pub schema_version: u32,
    pub sweep: &'a SweepResult,
}

pub struct PhaseRow {
    pub convention: String,
    pub phases: PhasePair,
    pub mismatch_fidelity: f64,
    pub reference: String,
}

#[derive(Serialize)]
pub struct PhasesDocument {
    pub schema_version: u32,
    pub rows: Vec<PhaseRowJson>,
}

#[derive(Serialize)]
pub struct PhaseRowJson {
    pub convention: String,
    pub phi: f64,
    pub phi0: f64,
    pub phi_mod_2pi: f64,
    pub phi0_mod_2pi: f64,
    pub mod_coupled: f64,
    pub mod_empty: f64,
    pub mismatch_fidelity: f64,
    pub reference: String,
}

/// Write to the configured path or stdout.
pub fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            std::io::stdout().flush().context("flushing stdout")?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
}

pub fn run_json(
    config: &ExperimentConfig,
    result: &ProtocolResult,
    monte_carlo: &Option<MonteCarloResult>,
) -> Result<String> {
    let doc = RunDocument {
        schema_version: JSON_SCHEMA_VERSION,
        config,
        result,
        monte_carlo,
    };
    let mut s = serde_json::to_string_pretty(&doc).context("serializing run result")?;
    s.push('\n');
    Ok(s)
}

pub fn run_csv(result: &ProtocolResult) -> String {
    let mut out = String::from("outcome,probability,success,concurrence,target_fidelity,correction\n");
    for b in &result.branches {
        let concurrence = b
            .concurrence
            .map(|c| c.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{:?}\n",
            b.label, b.branch.probability, b.success, concurrence, b.target_fidelity, b.correction
        ));
    }
    out
}

pub fn run_text(
    config: &ExperimentConfig,
    result: &ProtocolResult,
    monte_carlo: &Option<MonteCarloResult>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "protocol {} (N = {}), a1 = {:.6}, a2 = {:.6}\n",
        result.kind, result.n, config.a1, config.a2
    ));
    out.push_str(&format!(
        "phases: phi = {:.6}, phi0 = {:.6}, |r| = {:.6}\n",
        result.phases.phi, result.phases.phi0, result.phases.mod_coupled
    ));
    out.push_str(&format!(
        "success probability: {:.12}   success outcomes: {}\n",
        result.success_probability,
        result
            .success_outcomes
            .iter()
            .cloned()
            .collect::<Vec<_>>()
            .join(" | ")
    ));
    if (config.a1 - config.a2).abs() < 1e-12 {
        let analytic = 2.0 * config.a1.powi(2) * (1.0 - config.a1.powi(2));
        out.push_str(&format!(
            "closed form 2a1^2(1-a1^2) = {analytic:.12} (|diff| = {:.3e})\n",
            (analytic - result.success_probability).abs()
        ));
    }
    out.push_str("\nbranches:\n");
    out.push_str("  outcome                              p          success  entanglement\n");
    for b in &result.branches {
        let measure = match b.concurrence {
            Some(c) => format!("concurrence {c:.9}"),
            None => format!("target fidelity {:.9}", b.target_fidelity),
        };
        out.push_str(&format!(
            "  {:<36} {:<10.8} {:<8} {}\n",
            b.label, b.branch.probability, b.success, measure
        ));
    }
    if let Some(mc) = monte_carlo {
        out.push_str(&format!(
            "\nmonte carlo: {} trials, seed {}\n  empirical success rate {:.6} (exact {:.6}, binomial sigma {:.3e})\n",
            mc.trials, mc.seed, mc.empirical_success_rate, mc.exact_success_probability, mc.binomial_sigma
        ));
        for (label, count) in &mc.histogram {
            out.push_str(&format!("  {label:<36} {count}\n"));
        }
    }
    out
}

const SWEEP_CSV_HEADER: &str = "axis_value,phi,phi0,r_coupled_abs,p_analytic,p_simulated,f_analytic,f_simulated,p_abs_diff,f_abs_diff\n";

fn sweep_csv_rows(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.axis_value,
            r.phi,
            r.phi0,
            r.r_coupled_abs,
            r.p_analytic,
            r.p_simulated,
            r.f_analytic,
            r.f_simulated,
            r.p_abs_diff,
            r.f_abs_diff
        ));
    }
    out
}

fn convention_suffix(index: usize, label: &str) -> String {
    if label.contains("delta=+") {
        "positive".into()
    } else if label.contains("delta=-") {
        "negative".into()
    } else {
        format!("table{index}")
    }
}

/// CSV output for a sweep. A single table goes to the path (or stdout)
/// verbatim; multiple convention tables go to suffixed files, or to stdout
/// as labeled blocks.
pub fn emit_sweep_csv(output: &Option<PathBuf>, sweep: &SweepResult) -> Result<()> {
    if sweep.tables.len() == 1 {
        return emit(output, &sweep_csv_rows(&sweep.tables[0].rows));
    }
    match output {
        Some(path) => {
            for (i, table) in sweep.tables.iter().enumerate() {
                let suffix = convention_suffix(i, &table.convention);
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("sweep");
                let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
                let sibling = path.with_file_name(format!("{stem}.{suffix}.{ext}"));
                write_file(&sibling, &sweep_csv_rows(&table.rows))?;
                eprintln!("wrote {} ({})", sibling.display(), table.convention);
            }
            Ok(())
        }
        None => {
            let mut content = String::new();
            for table in &sweep.tables {
                content.push_str(&format!("# convention: {}\n", table.convention));
                content.push_str(&sweep_csv_rows(&table.rows));
            }
            emit(&None, &content)
        }
    }
}

pub fn sweep_json(sweep: &SweepResult) -> Result<String> {
    let doc = SweepDocument {
        schema_version: JSON_SCHEMA_VERSION,
        sweep,
    };
    let mut s = serde_json::to_string_pretty(&doc).context("serializing sweep")?;
    s.push('\n');
    Ok(s)
}

pub fn sweep_text(sweep: &SweepResult) -> String {
    let mut out = String::new();
    for table in &sweep.tables {
        out.push_str(&format!("convention: {}\n", table.convention));
        out.push_str(
            "  axis        phi         phi0        P_analytic    P_simulated   F_analytic    F_simulated\n",
        );
        for r in &table.rows {
            out.push_str(&format!(
                "  {:<11.6} {:<11.6} {:<11.6} {:<13.9} {:<13.9} {:<13.9} {:<13.9}\n",
                r.axis_value, r.phi, r.phi0, r.p_analytic, r.p_simulated, r.f_analytic, r.f_simulated
            ));
        }
    }
    out
}

pub fn phases_rows_json(rows: &[PhaseRow]) -> PhasesDocument {
    PhasesDocument {
        schema_version: JSON_SCHEMA_VERSION,
        rows: rows
            .iter()
            .map(|r| PhaseRowJson {
                convention: r.convention.clone(),
                phi: r.phases.phi,
                phi0: r.phases.phi0,
                phi_mod_2pi: ecp_core::mod_two_pi(r.phases.phi),
                phi0_mod_2pi: ecp_core::mod_two_pi(r.phases.phi0),
                mod_coupled: r.phases.mod_coupled,
                mod_empty: r.phases.mod_empty,
                mismatch_fidelity: r.mismatch_fidelity,
                reference: r.reference.clone(),
            })
            .collect(),
    }
}

pub fn phases_text(rows: &[PhaseRow]) -> String {
    let mut out = String::new();
    out.push_str(
        "convention                               phi          phi0         |r|        F_mismatch   reference\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{:<40} {:<12.6} {:<12.6} {:<10.6} {:<12.6} {}\n",
            r.convention, r.phases.phi, r.phases.phi0, r.phases.mod_coupled, r.mismatch_fidelity, r.reference
        ));
    }
    out.push_str(
        "\nmod-2pi aliases:\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{:<40} phi = {:<12.6} phi0 = {:<12.6}\n",
            r.convention,
            ecp_core::mod_two_pi(r.phases.phi),
            ecp_core::mod_two_pi(r.phases.phi0)
        ));
    }
    out
}

pub fn phases_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from(
        "convention,phi,phi0,phi_mod_2pi,phi0_mod_2pi,mod_coupled,mod_empty,mismatch_fidelity,reference\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.convention,
            r.phases.phi,
            r.phases.phi0,
            ecp_core::mod_two_pi(r.phases.phi),
            ecp_core::mod_two_pi(r.phases.phi0),
            r.phases.mod_coupled,
            r.phases.mod_empty,
            r.mismatch_fidelity,
            r.reference
        ));
    }
    out
}

pub fn format_for(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Text => "text",
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
    }
}
