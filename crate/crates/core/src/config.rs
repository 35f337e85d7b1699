//! Tolerances and step sizes shared by every module.
//!
//! A single [`ToleranceConfig`] is threaded through the numerical routines and
//! the verification suite. All entries have defaults; a JSON document may
//! override any subset of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// QR pivot threshold, relative to the largest column norm.
    pub singular: f64,
    /// Allowed asymmetry, relative to the largest entry.
    pub symmetry: f64,
    /// Minimal absolute gap between eigenvalues (and between components of p̂).
    pub degeneracy: f64,
    pub iwasawa_residual: f64,
    /// Off-band size and reconstruction error allowed for the gauge transform.
    pub gauge_band: f64,
    pub near_pole: f64,
    /// Componentwise agreement between the direct and gauge routes of the map.
    pub route_agreement: f64,
    /// Evaluate the double route inside `aa_to_toda`.
    pub check_routes: bool,
    pub max_exponent: f64,
    /// Above this magnitude subset sums switch to log-space accumulation.
    pub log_space_threshold: f64,
    pub flow_magnitude: f64,
    pub max_subset_dim: usize,
    pub midpoint_tolerance: f64,
    pub midpoint_max_iter: usize,

    // verification suite
    pub moment_constraint: f64,
    pub minor_identity: f64,
    pub sigma_minors: f64,
    pub cauchy_binet_lu: f64,
    pub gauge_invariance: f64,
    pub free_form: f64,
    pub roundtrip: f64,
    pub pullback_form: f64,
    pub pullback_step: f64,
    pub brackets: f64,
    pub symplectomorphism: f64,
    pub symplectomorphism_step: f64,
    pub flow_time: f64,
    pub flow_step: f64,
    pub flow_toda: f64,
    pub dual_flow_time: f64,
    pub dual_flow_step: f64,
    /// Samples for the dual integrator cross-check are drawn with `Ĥ` at most
    /// this; the midpoint error at fixed step grows steeply with `Ĥ`.
    pub dual_flow_energy: f64,
    pub flow_dual: f64,
    pub dual_actions: f64,
    pub scattering_time: f64,
    pub scattering_step: f64,
    pub scattering: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            singular: 1e-12,
            symmetry: 1e-12,
            degeneracy: 1e-9,
            iwasawa_residual: 1e-10,
            gauge_band: 1e-9,
            near_pole: 1e-9,
            route_agreement: 1e-8,
            check_routes: cfg!(debug_assertions),
            max_exponent: 700.0,
            log_space_threshold: 20.0,
            flow_magnitude: 50.0,
            max_subset_dim: 20,
            midpoint_tolerance: 1e-13,
            midpoint_max_iter: 50,

            moment_constraint: 1e-10,
            minor_identity: 1e-9,
            sigma_minors: 1e-10,
            cauchy_binet_lu: 1e-9,
            gauge_invariance: 1e-9,
            free_form: 1e-10,
            roundtrip: 1e-8,
            pullback_form: 1e-4,
            pullback_step: 1e-4,
            brackets: 1e-9,
            symplectomorphism: 5e-5,
            symplectomorphism_step: 1e-5,
            flow_time: 5.0,
            flow_step: 1e-4,
            flow_toda: 1e-6,
            dual_flow_time: 1.0,
            dual_flow_step: 1e-4,
            dual_flow_energy: 10.0,
            flow_dual: 1e-5,
            dual_actions: 1e-8,
            scattering_time: 40.0,
            scattering_step: 1e-3,
            scattering: 1e-3,
        }
    }
}

impl ToleranceConfig {
    /// Parses a (possibly partial) JSON override on top of the defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("tolerance config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides a single named entry, e.g. `set("brackets", "1e-12")`.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let mut doc = serde_json::to_value(&*self).expect("config serializes");
        let slot = doc.get_mut(name).ok_or_else(|| Error::InvalidArgument(format!("unknown tolerance `{name}`")))?;
        *slot = serde_json::from_str(value).map_err(|e| Error::InvalidArgument(format!("value for `{name}`: {e}")))?;
        let updated: Self =
            serde_json::from_value(doc).map_err(|e| Error::InvalidArgument(format!("value for `{name}`: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let doc = serde_json::to_value(self).expect("config serializes");
        for (name, value) in doc.as_object().expect("config is an object") {
            if let Some(x) = value.as_f64() {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "tolerance `{name}` must be positive and finite, got {x}"
                    )));
                }
            }
        }
        Ok(())
    }
}
