use super::angular::SpinQuantum;
use super::stevens::tb3;
use crate::error::{Error, Result};
use crate::units::{lande_g, GHZ, K_B_GHZ_PER_K};
use serde::{Deserialize, Serialize};

/// Ligand-field coefficients `B_k^q` (GHz) and Stevens factors.
///
/// The defaults are placeholder values: the axial terms reproduce a
/// ≈600 K separation between `J_z = ±6` and `J_z = ±5`; the transverse
/// `B44` is small enough that the tunnel splitting is set by
/// [`HyperfineParams::tunnel_splitting_hz`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LigandFieldParams {
    pub b20: f64,
    pub b40: f64,
    pub b44: f64,
    pub b60: f64,
    pub b64: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for LigandFieldParams {
    fn default() -> Self {
        Self {
            b20: 11873.1,
            b40: -6538.8,
            b44: 10.0,
            b60: 946.4,
            b64: 0.0,
            alpha: tb3::ALPHA,
            beta: tb3::BETA,
            gamma: tb3::GAMMA,
        }
    }
}

impl LigandFieldParams {
    /// Purely axial (D4d) field: transverse terms removed.
    pub fn axial(self) -> Self {
        Self { b44: 0.0, b64: 0.0, ..self }
    }

    fn values(&self) -> [(&'static str, f64); 8] {
        [
            ("b20", self.b20),
            ("b40", self.b40),
            ("b44", self.b44),
            ("b60", self.b60),
            ("b64", self.b64),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperfineParams {
    /// Hyperfine constant, GHz.
    pub a_hf: f64,
    /// Quadrupole constant, GHz.
    pub p_quad: f64,
    pub g_j: f64,
    pub nuclear_spin: SpinQuantum,
    /// Splitting at each avoided crossing, Hz.
    pub tunnel_splitting_hz: f64,
}

impl Default for HyperfineParams {
    fn default() -> Self {
        Self {
            a_hf: 3.13 / 6.0,
            p_quad: 0.34,
            g_j: lande_g(3.0, 3.0, 6.0),
            nuclear_spin: SpinQuantum::from_twice(3),
            // 1 μK
            tunnel_splitting_hz: 1e-6 * K_B_GHZ_PER_K * GHZ,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinSystemParams {
    pub ligand: LigandFieldParams,
    pub hyperfine: HyperfineParams,
    pub j: SpinQuantum,
}

impl Default for SpinSystemParams {
    fn default() -> Self {
        Self {
            ligand: LigandFieldParams::default(),
            hyperfine: HyperfineParams::default(),
            j: SpinQuantum::from_twice(12),
        }
    }
}

impl SpinSystemParams {
    /// Returns `(path, message)` for every violated invariant.
    pub fn diagnostics(&self, prefix: &str) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (name, v) in self.ligand.values() {
            if !v.is_finite() {
                out.push((format!("{prefix}.ligand.{name}"), format!("must be finite, got {v}")));
            }
        }
        let h = &self.hyperfine;
        for (name, v) in [("a_hf", h.a_hf), ("p_quad", h.p_quad)] {
            if !v.is_finite() {
                out.push((format!("{prefix}.hyperfine.{name}"), format!("must be finite, got {v}")));
            }
        }
        if !(h.g_j.is_finite() && h.g_j > 0.0) {
            out.push((format!("{prefix}.hyperfine.g_j"), format!("must be positive, got {}", h.g_j)));
        }
        if !(h.tunnel_splitting_hz.is_finite() && h.tunnel_splitting_hz >= 0.0) {
            out.push((
                format!("{prefix}.hyperfine.tunnel_splitting_hz"),
                format!("must be non-negative, got {}", h.tunnel_splitting_hz),
            ));
        }
        if self.j.dim() < 2 {
            out.push((format!("{prefix}.j"), "electronic spin must be at least 1/2".into()));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics("system");
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                d.into_iter().map(|(p, m)| format!("{p}: {m}")).collect::<Vec<_>>().join("; "),
            ))
        }
    }
}
