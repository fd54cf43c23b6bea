//! Input-output reflection of a single photon off a three-level atom in a
//! low-Q one-sided cavity, and the conditional phase gate it induces.
//!
//! The coupled reflection coefficient is
//!
//! ```text
//!            [i(ωc−ωp) − κ/2][i(ω0−ωp) + γ/2] + g²
//! r(ωp)  =  ───────────────────────────────────────
//!            [i(ωc−ωp) + κ/2][i(ω0−ωp) + γ/2] + g²
//! ```
//!
//! and the empty-cavity coefficient r0(ωp) is the g = 0 limit. For γ = 0 the
//! numerator and denominator are complex conjugates, so |r| = 1 and the
//! photon picks up a pure phase: φ when its polarization addresses the atom's
//! populated ground state, φ0 otherwise. At the matched working point
//! ω0 = ωc, ωp = ωc − κ/2, g = κ/2 this gives (φ, φ0) = (π, π/2).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::Gate;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Minimum reflection-denominator modulus before the parameter set is
/// reported as singular.
pub const SINGULAR_EPS: f64 = 1e-15;

/// Moduli below this make a [`PhasePair`] lossy for gate construction.
pub const LOSSY_EPS: f64 = 1e-6;

/// Physical frequencies and rates defining the scattering phases. All fields
/// share one angular-frequency unit; κ is the conventional reference scale,
/// so dimensionless setups use κ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Atomic transition angular frequency ω0.
    pub omega_0: f64,
    /// Cavity angular frequency ωc.
    pub omega_c: f64,
    /// Photon pulse angular frequency ωp.
    pub omega_p: f64,
    /// Cavity damping rate κ > 0.
    pub kappa: f64,
    /// Atomic decay rate γ ≥ 0.
    pub gamma: f64,
    /// Atom-cavity coupling strength g ≥ 0.
    pub g: f64,
}

/// Which frequency the photon pulse is anchored to when building detuned
/// parameter sets. The matched working point ωp = ωc − κ/2 is ambiguous once
/// ωc ≠ ω0, so both anchorings are exposed; the cavity anchoring is the
/// default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhotonAnchor {
    /// ωp = ωc − κ/2.
    #[default]
    Cavity,
    /// ωp = ω0 − κ/2.
    Atom,
}

impl CavityParams {
    /// Matched working point: ω0 = ωc, ωp = ωc − κ/2, g = κ/2, γ = 0, in
    /// units of κ = 1.
    pub fn ideal() -> Self {
        CavityParams {
            omega_0: 0.0,
            omega_c: 0.0,
            omega_p: -0.5,
            kappa: 1.0,
            gamma: 0.0,
            g: 0.5,
        }
    }

    /// Working point with cavity-atom detuning ωc − ω0 = `delta` (in units
    /// of κ = 1), photon anchored per `anchor`, g = κ/2, γ = 0.
    pub fn detuned(delta: f64, anchor: PhotonAnchor) -> Self {
        let omega_0 = 0.0;
        let omega_c = delta;
        let omega_p = match anchor {
            PhotonAnchor::Cavity => omega_c - 0.5,
            PhotonAnchor::Atom => omega_0 - 0.5,
        };
        CavityParams {
            omega_0,
            omega_c,
            omega_p,
            kappa: 1.0,
            gamma: 0.0,
            g: 0.5,
        }
    }

    /// Matched frequencies but coupling g = `g_over_kappa`·κ.
    pub fn with_coupling(g_over_kappa: f64) -> Self {
        CavityParams {
            g: g_over_kappa,
            ..CavityParams::ideal()
        }
    }

    pub fn with_gamma(mut self, gamma_over_kappa: f64) -> Self {
        self.gamma = gamma_over_kappa * self.kappa;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_0", self.omega_0),
            ("omega_c", self.omega_c),
            ("omega_p", self.omega_p),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("g", self.g),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid("CavityParams", format!("{name} is not finite")));
            }
        }
        if self.kappa <= 0.0 {
            return Err(Error::invalid("CavityParams", "kappa must be > 0"));
        }
        if self.gamma < 0.0 {
            return Err(Error::invalid("CavityParams", "gamma must be >= 0"));
        }
        if self.g < 0.0 {
            return Err(Error::invalid("CavityParams", "g must be >= 0"));
        }
        Ok(())
    }
}

/// The Faraday phase pair with the reflection moduli that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePair {
    /// Coupled-cavity phase φ, principal value in (−π, π].
    pub phi: f64,
    /// Empty-cavity phase φ0, principal value in (−π, π].
    pub phi0: f64,
    /// |r| of the coupled reflection; 1 when γ = 0.
    pub mod_coupled: f64,
    /// |r0| of the empty-cavity reflection; always 1.
    pub mod_empty: f64,
}

impl PhasePair {
    /// The matched-point phases (π, π/2) with unit moduli.
    pub fn ideal() -> Self {
        PhasePair {
            phi: std::f64::consts::PI,
            phi0: std::f64::consts::FRAC_PI_2,
            mod_coupled: 1.0,
            mod_empty: 1.0,
        }
    }

    /// Explicit phases with unit moduli.
    pub fn from_phases(phi: f64, phi0: f64) -> Self {
        PhasePair {
            phi,
            phi0,
            mod_coupled: 1.0,
            mod_empty: 1.0,
        }
    }

    pub fn min_modulus(&self) -> f64 {
        self.mod_coupled.min(self.mod_empty)
    }

    pub fn is_lossy(&self) -> bool {
        self.min_modulus() < 1.0 - LOSSY_EPS
    }
}

/// Map an angle to the display alias in [0, 2π).
pub fn mod_two_pi(angle: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    angle.rem_euclid(tau)
}

/// Coupled reflection coefficient r(ωp) of the atom-cavity system.
///
/// The g = 0 case delegates to [`reflection_empty`], which is the exact
/// algebraic reduction and avoids the removable 0/0 at ω0 = ωp, γ = 0.
pub fn reflection_coupled(params: &CavityParams) -> Result<Complex64> {
    params.validate()?;
    if params.g == 0.0 {
        return Ok(reflection_empty_unchecked(params));
    }
    let dc = Complex64::new(0.0, params.omega_c - params.omega_p);
    let d0 = Complex64::new(params.gamma / 2.0, params.omega_0 - params.omega_p);
    let half_kappa = Complex64::new(params.kappa / 2.0, 0.0);
    let g2 = Complex64::new(params.g * params.g, 0.0);
    let numerator = (dc - half_kappa) * d0 + g2;
    let denominator = (dc + half_kappa) * d0 + g2;
    if denominator.norm() < SINGULAR_EPS {
        return Err(Error::SingularParameters {
            modulus: denominator.norm(),
        });
    }
    Ok(numerator / denominator)
}

/// Empty-cavity reflection coefficient r0(ωp); modulus exactly 1 for κ > 0.
pub fn reflection_empty(params: &CavityParams) -> Result<Complex64> {
    params.validate()?;
    Ok(reflection_empty_unchecked(params))
}

fn reflection_empty_unchecked(params: &CavityParams) -> Complex64 {
    let dc = Complex64::new(0.0, params.omega_c - params.omega_p);
    let half_kappa = Complex64::new(params.kappa / 2.0, 0.0);
    (dc - half_kappa) / (dc + half_kappa)
}

/// Extract (φ, φ0) and the reflection moduli from a parameter set.
pub fn phase_pair(params: &CavityParams) -> Result<PhasePair> {
    let r = reflection_coupled(params)?;
    let r0 = reflection_empty(params)?;
    Ok(PhasePair {
        phi: principal(r.arg()),
        phi0: principal(r0.arg()),
        mod_coupled: r.norm(),
        mod_empty: r0.norm(),
    })
}

/// atan2 returns −π on the negative real axis when the imaginary part is a
/// negative zero; fold that onto +π so phases live in (−π, π].
fn principal(angle: f64) -> f64 {
    if angle == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        angle
    }
}

/// How to build a gate from a lossy phase pair (γ > 0 shrinks |r|).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakageMode {
    /// Keep the phases and drop the amplitude damping. This matches the
    /// paper-level approximation of a pure phase shift; a warning is logged
    /// when min |r| < 0.99.
    #[default]
    Renormalize,
    /// Refuse to build a gate from sub-unit moduli.
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaradayGateSpec {
    pub phases: PhasePair,
    pub mode: LeakageMode,
}

impl FaradayGateSpec {
    pub fn new(phases: PhasePair) -> Self {
        FaradayGateSpec {
            phases,
            mode: LeakageMode::default(),
        }
    }

    pub fn rejecting(phases: PhasePair) -> Self {
        FaradayGateSpec {
            phases,
            mode: LeakageMode::Reject,
        }
    }
}

/// Conditional photon-atom gate on the ordered pair (photon, atom):
///
/// ```text
/// |L⟩|g_L⟩ → e^{iφ}|L⟩|g_L⟩     |R⟩|g_L⟩ → e^{iφ0}|R⟩|g_L⟩
/// |L⟩|g_R⟩ → e^{iφ0}|L⟩|g_R⟩    |R⟩|g_R⟩ → e^{iφ}|R⟩|g_R⟩
/// ```
///
/// With the matched phases this is diag(−1, i, i, −1).
pub fn faraday_gate(spec: &FaradayGateSpec) -> Result<Gate> {
    let p = &spec.phases;
    if p.is_lossy() {
        match spec.mode {
            LeakageMode::Reject => {
                return Err(Error::LossyGateRejected {
                    min_modulus: p.min_modulus(),
                })
            }
            LeakageMode::Renormalize => {
                if p.min_modulus() < 0.99 {
                    log::warn!(
                        "faraday gate: dropping amplitude damping (min |r| = {:.4}); \
                         pure-phase approximation degrades",
                        p.min_modulus()
                    );
                }
            }
        }
    }
    let coupled = Complex64::from_polar(1.0, p.phi);
    let empty = Complex64::from_polar(1.0, p.phi0);
    let name = format!("faraday(phi={:.6}, phi0={:.6})", p.phi, p.phi0);
    Gate::diagonal_two(name, [coupled, empty, empty, coupled])
}

/// Standing-wave coupling g = g0·cos(2πx/λ).
pub fn coupling_from_position(g0: f64, x: f64, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::invalid("lambda", "wavelength must be > 0"));
    }
    Ok(g0 * (std::f64::consts::TAU * x / lambda).cos())
}

/// Cavity quality factor Q = ωc / (2κ).
pub fn cavity_q_factor(omega_c: f64, kappa: f64) -> Result<f64> {
    if kappa <= 0.0 {
        return Err(Error::invalid("kappa", "damping rate must be > 0"));
    }
    Ok(omega_c / (2.0 * kappa))
}

/// Angular frequency 2πc/λ of light with vacuum wavelength `lambda` (meters).
pub fn omega_from_wavelength(lambda: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::invalid("lambda", "wavelength must be > 0"));
    }
    Ok(std::f64::consts::TAU * SPEED_OF_LIGHT / lambda)
}

/// Cavity damping rate implied by a finesse: κ = π c / (2 L F), i.e. half
/// the FWHM linewidth of a cavity with free spectral range c/2L, in angular
/// units.
pub fn kappa_from_finesse(cavity_length: f64, finesse: f64) -> Result<f64> {
    if cavity_length <= 0.0 {
        return Err(Error::invalid("cavity_length", "length must be > 0"));
    }
    if finesse <= 0.0 {
        return Err(Error::invalid("finesse", "finesse must be > 0"));
    }
    Ok(std::f64::consts::PI * SPEED_OF_LIGHT / (2.0 * cavity_length * finesse))
}

/// One labeled detuning convention: the sign applied to ωc − ω0 and the
/// photon anchoring used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetuningConvention {
    pub label: String,
    pub params: CavityParams,
}

/// Both sign conventions ωc − ω0 = ±|delta| for a given photon anchoring.
/// The paper does not pin the sign, so sweep outputs carry both, labeled.
pub fn detuning_conventions(delta_magnitude: f64, anchor: PhotonAnchor) -> Vec<DetuningConvention> {
    let anchor_name = match anchor {
        PhotonAnchor::Cavity => "cavity",
        PhotonAnchor::Atom => "atom",
    };
    [1.0, -1.0]
        .into_iter()
        .map(|sign| DetuningConvention {
            label: format!(
                "delta={}{:.6}kappa,anchor={}",
                if sign > 0.0 { "+" } else { "-" },
                delta_magnitude.abs(),
                anchor_name
            ),
            params: CavityParams::detuned(sign * delta_magnitude.abs(), anchor),
        })
        .collect()
}
