//! Input states: the down-converted photon pair and the classical laser probe.
//!
//! The pair state is the two-mode, frequency-degenerate reduction of the
//! down-conversion output. Assumed: a monochromatic plane-wave pump, signal
//! and idler at half the pump frequency, one pair of conjugate directions
//! (top/bottom), and zero phase mismatch. The unnormalized creation-operator
//! form is always renormalized. Frequency and timing are not represented;
//! the uncompensated birefringent delay shows up only as the polarization
//! product `|H_S V_I⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Result};
use crate::hilbert::{BasisConvention, Momentum, PairKet, PairState, PhotonState, Polarization, C64};

/// Source imperfection knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceParams {
    /// Scales the coherence between the two momentum assignments.
    #[serde(rename = "source_coherence", default = "one")]
    pub momentum_coherence: f64,
    /// Weight of the ideal state against a momentum-mixed admixture (1 = none).
    #[serde(rename = "source_white_noise", default = "one")]
    pub white_noise: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for SourceParams {
    fn default() -> Self {
        Self::ideal()
    }
}

impl SourceParams {
    pub fn new(momentum_coherence: f64, white_noise: f64) -> Result<Self> {
        let p = Self {
            momentum_coherence,
            white_noise,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn ideal() -> Self {
        Self {
            momentum_coherence: 1.0,
            white_noise: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("source_coherence", self.momentum_coherence)?;
        check_unit_interval("source_white_noise", self.white_noise)
    }
}

/// Pair index of `|m_S, H_S⟩ ⊗ |m_I, V_I⟩`.
fn hv_index(signal_momentum: Momentum, idler_momentum: Momentum) -> usize {
    BasisConvention::pair_index(
        BasisConvention::photon_index(signal_momentum.level(), Polarization::H.level()),
        BasisConvention::photon_index(idler_momentum.level(), Polarization::V.level()),
    )
}

/// `(|T_S B_I⟩ + |B_S T_I⟩)/√2 ⊗ |H_S V_I⟩`.
pub fn spdc_pair_state() -> PairKet {
    let mut amp = vec![C64::new(0.0, 0.0); 16];
    amp[hv_index(Momentum::T, Momentum::B)] = C64::new(FRAC_1_SQRT_2, 0.0);
    amp[hv_index(Momentum::B, Momentum::T)] = C64::new(FRAC_1_SQRT_2, 0.0);
    PairKet::normalize(amp).expect("two nonzero amplitudes")
}

/// Down-conversion output with partial momentum coherence and an optional
/// momentum-mixed admixture. The polarization product is left untouched.
pub fn noisy_source(params: &SourceParams) -> Result<PairState> {
    params.validate()?;
    let mut rho = spdc_pair_state().density().matrix().clone();
    let tb = hv_index(Momentum::T, Momentum::B);
    let bt = hv_index(Momentum::B, Momentum::T);
    rho[(tb, bt)] *= params.momentum_coherence;
    rho[(bt, tb)] *= params.momentum_coherence;

    let mut mixed = nalgebra::DMatrix::<C64>::zeros(16, 16);
    for ms in [Momentum::T, Momentum::B] {
        for mi in [Momentum::T, Momentum::B] {
            let k = hv_index(ms, mi);
            mixed[(k, k)] = C64::new(0.25, 0.0);
        }
    }
    let p = params.white_noise;
    Ok(PairState::from_matrix_unchecked(rho.scale(p) + mixed.scale(1.0 - p)))
}

/// Attenuated laser filling both beam halves with linear polarization at
/// `pol_angle` from H.
pub fn classical_probe_state(pol_angle: f64) -> PhotonState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    PhotonState::product(
        [h, h],
        [
            C64::new(pol_angle.cos(), 0.0),
            C64::new(pol_angle.sin(), 0.0),
        ],
    )
    .expect("unit vectors")
}
