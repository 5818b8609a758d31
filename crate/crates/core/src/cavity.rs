//! Input-output coefficients of a singly charged quantum dot in a double-sided
//! micropillar cavity.
//!
//! All rates are expressed in units of the cavity-field decay rate κ. Under
//! weak excitation the spin-cavity unit acts as a beam splitter with
//! reflection `R`, transmission `T`, side-leakage `S` and dipole-noise `N`
//! amplitudes whose squared moduli sum to one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of one spin-cavity unit, in units of κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavityParams {
    /// Dipole-cavity coupling strength g.
    pub g: f64,
    /// Cavity-field decay rate κ (the unit; 1 unless rescaled).
    pub kappa: f64,
    /// Side-leakage rate κ_s.
    pub kappa_s: f64,
    /// Dipole decay rate γ (the dipole amplitude decays at γ/2).
    pub gamma: f64,
    /// Cavity-probe detuning Δ = ω_c − ω.
    pub detuning: f64,
    /// Trion-cavity detuning ω_X − ω_c; zero when the dipole is tuned into the
    /// cavity mode.
    pub trion_detuning: f64,
}

impl Default for CavityParams {
    fn default() -> Self {
        Self {
            g: 0.0,
            kappa: 1.0,
            kappa_s: 0.0,
            gamma: 0.1,
            detuning: 0.0,
            trion_detuning: 0.0,
        }
    }
}

impl CavityParams {
    /// Resonant unit with γ = 0.1κ and Δ = 0.
    pub fn new(g: f64, kappa_s: f64) -> Self {
        Self {
            g,
            kappa_s,
            ..Self::default()
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("kappa_s", self.kappa_s),
            ("gamma", self.gamma),
            ("detuning", self.detuning),
            ("trion_detuning", self.trion_detuning),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter(format!("g must be ≥ 0, got {}", self.g)));
        }
        if self.kappa_s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa_s must be ≥ 0, got {}",
                self.kappa_s
            )));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Same unit with the dipole decoupled (g = 0): the cold cavity.
    pub fn cold(&self) -> Self {
        Self { g: 0.0, ..*self }
    }
}

/// The four scattering amplitudes of the spin-cavity beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullCoeffs {
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub leak: Complex64,
    pub noise: Complex64,
}

impl FullCoeffs {
    /// `|R|² + |T|² + |S|² + |N|²`.
    pub fn total_probability(&self) -> f64 {
        self.reflection.norm_sqr()
            + self.transmission.norm_sqr()
            + self.leak.norm_sqr()
            + self.noise.norm_sqr()
    }

    /// Weight lost to the leak and noise channels.
    pub fn lost_probability(&self) -> f64 {
        self.leak.norm_sqr() + self.noise.norm_sqr()
    }
}

/// Evaluate `R`, `T`, `S` and `N` at the probe frequency set by `p`.
pub fn full_coeffs(p: &CavityParams) -> Result<FullCoeffs> {
    p.validate()?;
    let i = Complex64::i();
    let kappa = Complex64::new(p.kappa, 0.0);
    let cavity = i * p.detuning + p.kappa_s / 2.0;
    // ω_X − ω = (ω_X − ω_c) + (ω_c − ω)
    let dipole = i * (p.trion_detuning + p.detuning) + p.gamma / 2.0;
    let dressed = Complex64::new(p.g * p.g, 0.0) / dipole;
    let denom = cavity + kappa + dressed;
    Ok(FullCoeffs {
        reflection: (cavity + dressed) / denom,
        transmission: -kappa / denom,
        leak: Complex64::new(-(p.kappa_s * p.kappa).sqrt(), 0.0) / denom,
        noise: (i * p.g * (p.gamma * p.kappa).sqrt() / dipole) / denom,
    })
}

/// Reflection/transmission amplitudes for the coupled (hot) and uncoupled
/// (cold) cavity, plus the leak and noise amplitudes that are traced out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoeffs {
    pub r: Complex64,
    pub t: Complex64,
    pub r0: Complex64,
    pub t0: Complex64,
    /// Side-leakage amplitude of the hot cavity.
    pub s_leak: Complex64,
    /// Dipole-noise amplitude of the hot cavity.
    pub n_noise: Complex64,
    /// Side-leakage amplitude of the cold cavity (its noise amplitude is zero).
    pub s_leak_cold: Complex64,
}

impl ScatterCoeffs {
    /// Perfect circular birefringence: the hot cavity reflects, the cold one
    /// transmits with a π phase.
    pub const IDEAL: ScatterCoeffs = ScatterCoeffs {
        r: Complex64::new(1.0, 0.0),
        t: Complex64::new(0.0, 0.0),
        r0: Complex64::new(0.0, 0.0),
        t0: Complex64::new(-1.0, 0.0),
        s_leak: Complex64::new(0.0, 0.0),
        n_noise: Complex64::new(0.0, 0.0),
        s_leak_cold: Complex64::new(0.0, 0.0),
    };

    /// Coefficients given directly. Leak and noise amplitudes are set so that
    /// each cavity response conserves probability.
    pub fn from_amplitudes(r: Complex64, t: Complex64, r0: Complex64, t0: Complex64) -> Result<Self> {
        let hot_lost = 1.0 - r.norm_sqr() - t.norm_sqr();
        let cold_lost = 1.0 - r0.norm_sqr() - t0.norm_sqr();
        let c = Self {
            r,
            t,
            r0,
            t0,
            s_leak: Complex64::new(hot_lost.max(0.0).sqrt(), 0.0),
            n_noise: Complex64::new(0.0, 0.0),
            s_leak_cold: Complex64::new(cold_lost.max(0.0).sqrt(), 0.0),
        };
        c.validate()?;
        Ok(c)
    }

    /// The scattering map on each spin block is `[[t, r], [r, t]]`; its
    /// singular values are `|t + r|` and `|t − r|`. Both must be ≤ 1.
    pub fn validate(&self) -> Result<()> {
        let vals = [self.r, self.t, self.r0, self.t0];
        if vals.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite scattering coefficient".into()));
        }
        let limit = 1.0 + crate::qcore::TOL;
        for (name, a, b) in [("hot", self.t, self.r), ("cold", self.t0, self.r0)] {
            let smax = (a + b).norm().max((a - b).norm());
            if smax > limit {
                return Err(Error::InvalidParameter(format!(
                    "{name}-cavity coefficients amplify the photon (singular value {smax})"
                )));
            }
        }
        Ok(())
    }

    /// Probability the hot cavity sends a photon into leak/noise modes.
    pub fn hot_loss(&self) -> f64 {
        1.0 - self.r.norm_sqr() - self.t.norm_sqr()
    }

    /// Probability the cold cavity sends a photon into the leak mode.
    pub fn cold_loss(&self) -> f64 {
        1.0 - self.r0.norm_sqr() - self.t0.norm_sqr()
    }
}

/// Hot- and cold-cavity coefficients at detuning `delta` with the trion tuned
/// into the cavity mode.
pub fn resonant_coeffs(p: &CavityParams, delta: f64) -> Result<ScatterCoeffs> {
    let resonant = CavityParams {
        detuning: delta,
        trion_detuning: 0.0,
        ..*p
    };
    let hot = full_coeffs(&resonant)?;
    let cold = full_coeffs(&resonant.cold())?;
    Ok(ScatterCoeffs {
        r: hot.reflection,
        t: hot.transmission,
        r0: cold.reflection,
        t0: cold.transmission,
        s_leak: hot.leak,
        n_noise: hot.noise,
        s_leak_cold: cold.leak,
    })
}

/// Resonant coefficients at the detuning stored in `p`.
pub fn coeffs_for(p: &CavityParams) -> Result<ScatterCoeffs> {
    resonant_coeffs(p, p.detuning)
}
