//! Imperfection studies: phase-mismatch and coefficient-deviation
//! fidelities, parameter sweeps, and seeded Monte Carlo statistics.
//!
//! The mismatch closed form F = ½[1 − cos 2(φ − φ0)] quantifies how much of
//! the would-be success weight still arrives at the success herald when the
//! phases deviate from (π, π/2): the heralded success probability scales by
//! exactly this factor, for any input coefficients, while the success-branch
//! residuals themselves stay maximally entangled (their fidelity is
//! phase-independent). The strict per-branch overlap of a heralded-failure
//! residual against its ideal-phase counterpart is a different quantity; it
//! is computed and reported alongside but is not what the closed form
//! predicts.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faraday::{phase_pair, CavityParams, PhasePair, PhotonAnchor};
use crate::protocols::{
    atomic_ecp, run_protocol, PairSpec, ProtocolKind, ProtocolOptions, ProtocolResult,
    ProtocolSpec,
};

/// Coefficient deviation between the two input pairs: a₂ = a₁(1 + k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationSpec {
    pub a1: f64,
    pub k: f64,
}

impl DeviationSpec {
    pub fn new(a1: f64, k: f64) -> Result<Self> {
        if !(a1 > 0.0 && a1 < 1.0) {
            return Err(Error::invalid("DeviationSpec", format!("a1 must lie in (0, 1), got {a1}")));
        }
        let a2 = a1 * (1.0 + k);
        if !(a2 > 0.0 && a2 < 1.0) {
            return Err(Error::invalid(
                "DeviationSpec",
                format!("a1(1+k) = {a2} must lie in (0, 1)"),
            ));
        }
        Ok(DeviationSpec { a1, k })
    }

    pub fn a2(&self) -> f64 {
        self.a1 * (1.0 + self.k)
    }
}

/// Fidelity of the concentrated state when the pair coefficients deviate:
///
/// ```text
/// F(a₁,k) = [√(1−a₁²(1+k)²) + (1+k)√(1−a₁²)]² / (2[1+(1+k)² − 2a₁²(1+k)²])
/// ```
pub fn deviation_fidelity_analytic(spec: &DeviationSpec) -> Result<f64> {
    DeviationSpec::new(spec.a1, spec.k)?;
    if spec.k == 0.0 {
        // the closed form reduces to 1 identically at k = 0
        return Ok(1.0);
    }
    let t = 1.0 + spec.k;
    let rad1 = 1.0 - spec.a1 * spec.a1 * t * t;
    let rad2 = 1.0 - spec.a1 * spec.a1;
    if rad1 < 0.0 || rad2 < 0.0 {
        return Err(Error::invalid(
            "DeviationSpec",
            format!("negative radicand ({rad1}, {rad2})"),
        ));
    }
    let numerator = (rad1.sqrt() + t * rad2.sqrt()).powi(2);
    let denominator = 2.0 * (1.0 + t * t - 2.0 * spec.a1 * spec.a1 * t * t);
    Ok(numerator / denominator)
}

/// Simulated counterpart of [`deviation_fidelity_analytic`]: run the atomic
/// protocol with a₂ = a₁(1+k) at the matched phases and return the worst
/// success-branch fidelity against the canonical Bell target (maximized over
/// the Z feed-forward correction).
pub fn deviation_fidelity_simulated(spec: &DeviationSpec) -> Result<f64> {
    let pair1 = PairSpec::from_a(spec.a1)?;
    let pair2 = PairSpec::from_a(spec.a2())?;
    let result = atomic_ecp(pair1, pair2, &PhasePair::ideal())?;
    min_success_fidelity(&result).ok_or_else(|| {
        Error::Internal("deviation run produced no success branches".into())
    })
}

/// ½[1 − cos 2(φ − φ0)]: the factor by which a phase mismatch scales the
/// heralded success weight. 1 at the matched point (φ − φ0 = π/2), 0 when
/// the two phases coincide and the herald never fires.
pub fn mismatch_fidelity_analytic(phi: f64, phi0: f64) -> f64 {
    0.5 * (1.0 - (2.0 * (phi - phi0)).cos())
}

/// Simulated phase-mismatch diagnostics for the atomic protocol.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MismatchFidelity {
    /// Worst success-branch fidelity against the canonical Bell target;
    /// `None` when the success herald never fires (φ = φ0 mod π). Equals 1
    /// for every phase pair otherwise: the concentrated state is independent
    /// of the rotation angle.
    pub success_branch_fidelity: Option<f64>,
    /// Worst heralded-failure residual overlap against the ideal-phase
    /// residual of the same outcome. Recorded for reference; this strict
    /// per-branch quantity is not the one the closed form predicts.
    pub failure_branch_fidelity: f64,
    /// Success probability divided by its matched-phase value. Matches
    /// [`mismatch_fidelity_analytic`] exactly for all input coefficients.
    pub success_weight_retention: f64,
    /// The phases the run used.
    pub phases: PhasePair,
}

/// Run the atomic protocol at `params` and compare against the matched-phase
/// run, branch by branch.
pub fn mismatch_fidelity_simulated(
    params: &CavityParams,
    pair1: PairSpec,
    pair2: PairSpec,
) -> Result<MismatchFidelity> {
    let phases = phase_pair(params)?;
    let actual = atomic_ecp(pair1, pair2, &phases)?;
    let ideal = atomic_ecp(pair1, pair2, &PhasePair::ideal())?;

    let success_branch_fidelity = min_success_fidelity(&actual);

    let mut failure_branch_fidelity = 1.0f64;
    for b in actual.failure_branches() {
        let ideal_branch = ideal
            .branches
            .iter()
            .find(|ib| ib.label == b.label)
            .ok_or_else(|| {
                Error::Internal(format!("no matched-phase branch for outcome {}", b.label))
            })?;
        let f = b.branch.residual.fidelity(&ideal_branch.branch.residual)?;
        failure_branch_fidelity = failure_branch_fidelity.min(f);
    }

    let success_weight_retention = actual.success_probability / ideal.success_probability;

    Ok(MismatchFidelity {
        success_branch_fidelity,
        failure_branch_fidelity,
        success_weight_retention,
        phases,
    })
}

fn min_success_fidelity(result: &ProtocolResult) -> Option<f64> {
    result
        .success_branches()
        .map(|b| b.target_fidelity)
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
}

/// Histogram of seeded protocol samples with binomial statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub trials: u64,
    pub seed: u64,
    /// Outcome label → occurrence count, in lexicographic label order.
    pub histogram: BTreeMap<String, u64>,
    pub empirical_success_rate: f64,
    pub exact_success_probability: f64,
    /// √(p(1−p)/trials) at the exact success probability.
    pub binomial_sigma: f64,
}

/// Draw `trials` samples from the protocol's exact branch distribution with
/// a ChaCha8 generator seeded by `seed`. Identical inputs reproduce the
/// histogram verbatim.
pub fn monte_carlo_protocol(
    spec: &ProtocolSpec,
    phases: &PhasePair,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloResult> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let result = run_protocol(spec, phases, &ProtocolOptions::default())?;
    let total: f64 = result.branches.iter().map(|b| b.branch.probability).sum();
    let dist: Vec<(&str, f64, bool)> = result
        .branches
        .iter()
        .map(|b| (b.label.as_str(), b.branch.probability / total, b.success))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram: BTreeMap<String, u64> = BTreeMap::new();
    let mut successes = 0u64;
    for _ in 0..trials {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        let mut chosen = dist.len() - 1;
        for (i, (_, p, _)) in dist.iter().enumerate() {
            cum += p;
            if u < cum {
                chosen = i;
                break;
            }
        }
        let (label, _, success) = dist[chosen];
        *histogram.entry(label.to_string()).or_insert(0) += 1;
        if success {
            successes += 1;
        }
    }

    let p = result.success_probability;
    Ok(MonteCarloResult {
        trials,
        seed,
        histogram,
        empirical_success_rate: successes as f64 / trials as f64,
        exact_success_probability: p,
        binomial_sigma: (p * (1.0 - p) / trials as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// a₁ = a₂ swept, matched phases.
    A1,
    /// Cavity-atom detuning (ωc − ω0)/κ swept, both sign conventions.
    Detuning,
    /// Coupling g/κ swept at matched frequencies.
    Coupling,
    /// Deviation constant k swept at fixed a₁.
    K,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a1" => Ok(SweepAxis::A1),
            "detuning" => Ok(SweepAxis::Detuning),
            "coupling" => Ok(SweepAxis::Coupling),
            "k" => Ok(SweepAxis::K),
            other => Err(Error::invalid(
                "axis",
                format!("unknown sweep axis `{other}` (expected a1, detuning, coupling or k)"),
            )),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SweepAxis::A1 => "a1",
            SweepAxis::Detuning => "detuning",
            SweepAxis::Coupling => "coupling",
            SweepAxis::K => "k",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub kind: ProtocolKind,
    pub n: usize,
    /// a₁ held fixed on the detuning, coupling and k axes.
    pub a1: f64,
    /// Photon anchoring used when the detuning axis builds cavity parameters.
    pub anchor: PhotonAnchor,
    /// Emit the −δ table next to the +δ table on the detuning axis.
    pub both_conventions: bool,
}

impl SweepConfig {
    pub fn new(axis: SweepAxis, from: f64, to: f64, points: usize) -> Self {
        SweepConfig {
            axis,
            from,
            to,
            points,
            kind: ProtocolKind::Atomic,
            n: 1,
            a1: std::f64::consts::FRAC_1_SQRT_2,
            anchor: PhotonAnchor::Cavity,
            both_conventions: true,
        }
    }
}

/// One sweep sample: the phases in effect, the analytic and simulated
/// success probability and fidelity, and their absolute differences.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub phi: f64,
    pub phi0: f64,
    pub r_coupled_abs: f64,
    pub p_analytic: f64,
    pub p_simulated: f64,
    pub f_analytic: f64,
    pub f_simulated: f64,
    pub p_abs_diff: f64,
    pub f_abs_diff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    /// Convention label, e.g. `delta=+0.100000kappa,anchor=atom`.
    pub convention: String,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub tables: Vec<SweepTable>,
}

pub fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![from];
    }
    (0..points)
        .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Evaluate analytic and simulated quantities point by point along the
/// configured axis. Analytic and simulated values are computed in the same
/// pass so a divergence shows up immediately in the output table.
pub fn sweep(config: &SweepConfig) -> Result<SweepResult> {
    if config.points == 0 {
        return Err(Error::invalid("points", "sweep range must not be empty"));
    }
    if !config.from.is_finite() || !config.to.is_finite() {
        return Err(Error::invalid("range", "sweep bounds must be finite"));
    }
    let values = linspace(config.from, config.to, config.points);
    let tables = match config.axis {
        SweepAxis::A1 => vec![sweep_a1(config, &values)?],
        SweepAxis::K => vec![sweep_k(config, &values)?],
        SweepAxis::Coupling => vec![sweep_cavity(config, &values, CouplingOrDetuning::Coupling)?],
        SweepAxis::Detuning => {
            let mut tables =
                vec![sweep_cavity(config, &values, CouplingOrDetuning::DetuningPositive)?];
            if config.both_conventions {
                tables.push(sweep_cavity(config, &values, CouplingOrDetuning::DetuningNegative)?);
            }
            tables
        }
    };
    Ok(SweepResult {
        axis: config.axis,
        tables,
    })
}

fn protocol_spec(config: &SweepConfig, pair1: PairSpec, pair2: PairSpec) -> ProtocolSpec {
    ProtocolSpec {
        kind: config.kind,
        n: config.n,
        pair1,
        pair2,
    }
}

fn sweep_a1(config: &SweepConfig, values: &[f64]) -> Result<SweepTable> {
    let ideal = PhasePair::ideal();
    let mut rows = Vec::with_capacity(values.len());
    for &a in values {
        let pair = PairSpec::from_a(a)?;
        let result = run_protocol(
            &protocol_spec(config, pair, pair),
            &ideal,
            &ProtocolOptions::default(),
        )?;
        let p_analytic = 2.0 * a * a * (1.0 - a * a);
        let f_simulated = min_success_fidelity(&result).unwrap_or(f64::NAN);
        rows.push(SweepRow {
            axis_value: a,
            phi: ideal.phi,
            phi0: ideal.phi0,
            r_coupled_abs: 1.0,
            p_analytic,
            p_simulated: result.success_probability,
            f_analytic: 1.0,
            f_simulated,
            p_abs_diff: (p_analytic - result.success_probability).abs(),
            f_abs_diff: (1.0 - f_simulated).abs(),
        });
    }
    Ok(SweepTable {
        convention: "ideal-phases".into(),
        rows,
    })
}

fn sweep_k(config: &SweepConfig, values: &[f64]) -> Result<SweepTable> {
    let ideal = PhasePair::ideal();
    let mut rows = Vec::with_capacity(values.len());
    for &k in values {
        let spec = DeviationSpec::new(config.a1, k)?;
        let pair1 = PairSpec::from_a(spec.a1)?;
        let pair2 = PairSpec::from_a(spec.a2())?;
        let result = run_protocol(
            &protocol_spec(config, pair1, pair2),
            &ideal,
            &ProtocolOptions::default(),
        )?;
        let p_analytic = pair1.a().powi(2) * pair2.b().powi(2)
            + pair1.b().powi(2) * pair2.a().powi(2);
        let f_analytic = deviation_fidelity_analytic(&spec)?;
        let f_simulated = min_success_fidelity(&result).unwrap_or(f64::NAN);
        rows.push(SweepRow {
            axis_value: k,
            phi: ideal.phi,
            phi0: ideal.phi0,
            r_coupled_abs: 1.0,
            p_analytic,
            p_simulated: result.success_probability,
            f_analytic,
            f_simulated,
            p_abs_diff: (p_analytic - result.success_probability).abs(),
            f_abs_diff: (f_analytic - f_simulated).abs(),
        });
    }
    Ok(SweepTable {
        convention: format!("a1={:.6},ideal-phases", config.a1),
        rows,
    })
}

enum CouplingOrDetuning {
    Coupling,
    DetuningPositive,
    DetuningNegative,
}

fn sweep_cavity(
    config: &SweepConfig,
    values: &[f64],
    mode: CouplingOrDetuning,
) -> Result<SweepTable> {
    let pair = PairSpec::from_a(config.a1)?;
    let spec = protocol_spec(config, pair, pair);
    let ideal_run = run_protocol(&spec, &PhasePair::ideal(), &ProtocolOptions::default())?;
    let p_ideal = ideal_run.success_probability;

    let anchor_name = match config.anchor {
        PhotonAnchor::Cavity => "cavity",
        PhotonAnchor::Atom => "atom",
    };
    let convention = match mode {
        CouplingOrDetuning::Coupling => "coupling-sweep,matched-frequencies".to_string(),
        CouplingOrDetuning::DetuningPositive => {
            format!("delta=+axis,anchor={anchor_name}")
        }
        CouplingOrDetuning::DetuningNegative => {
            format!("delta=-axis,anchor={anchor_name}")
        }
    };

    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let params = match mode {
            CouplingOrDetuning::Coupling => CavityParams::with_coupling(v),
            CouplingOrDetuning::DetuningPositive => CavityParams::detuned(v, config.anchor),
            CouplingOrDetuning::DetuningNegative => CavityParams::detuned(-v, config.anchor),
        };
        let phases = phase_pair(&params)?;
        let result = run_protocol(&spec, &phases, &ProtocolOptions::default())?;
        let f_analytic = mismatch_fidelity_analytic(phases.phi, phases.phi0);
        let p_analytic = f_analytic * p_ideal;
        let f_simulated = result.success_probability / p_ideal;
        rows.push(SweepRow {
            axis_value: v,
            phi: phases.phi,
            phi0: phases.phi0,
            r_coupled_abs: phases.mod_coupled,
            p_analytic,
            p_simulated: result.success_probability,
            f_analytic,
            f_simulated,
            p_abs_diff: (p_analytic - result.success_probability).abs(),
            f_abs_diff: (f_analytic - f_simulated).abs(),
        });
    }
    Ok(SweepTable { convention, rows })
}
