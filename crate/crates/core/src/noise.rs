//! Imperfection channels and the visibility budget.
//!
//! Gate imperfections are coherence factors: the beam-splitter wavefront
//! term `v_bs` and the dove-prism term `v_dp`. Both multiply the
//! polarization coherence that the interferometer hands to the output, so
//! visibilities compose multiplicatively with the source coherence.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::gates::{circuit, swap_gate, CircuitVariant};
use crate::hilbert::{
    tensor, BasisConvention, Dof, Operator, PairState, Photon, PHOTON_DIM,
};
use crate::measurement::{analyzer_projector, fringe_visibility};
use crate::source::{classical_probe_state, noisy_source, SourceParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateNoise {
    #[serde(rename = "gate_bs_coherence", default = "one")]
    pub bs_coherence: f64,
    #[serde(rename = "gate_dove_coherence", default = "one")]
    pub dove_coherence: f64,
    /// Dephase both photons instead of applying one factor per pair.
    #[serde(rename = "per_photon_gate_noise", default)]
    pub per_photon: bool,
}

fn one() -> f64 {
    1.0
}

impl Default for GateNoise {
    fn default() -> Self {
        Self::ideal()
    }
}

impl GateNoise {
    pub fn new(bs_coherence: f64, dove_coherence: f64) -> Result<Self> {
        let g = Self {
            bs_coherence,
            dove_coherence,
            per_photon: false,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn ideal() -> Self {
        Self {
            bs_coherence: 1.0,
            dove_coherence: 1.0,
            per_photon: false,
        }
    }

    /// Single lumped gate coherence, attributed entirely to the beam splitter.
    pub fn lumped(v_gate: f64) -> Result<Self> {
        Self::new(v_gate, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("gate_bs_coherence", self.bs_coherence)?;
        check_unit_interval("gate_dove_coherence", self.dove_coherence)
    }

    /// `v_bs · v_dp`.
    pub fn coherence(&self) -> f64 {
        self.bs_coherence * self.dove_coherence
    }
}

fn pauli_z_on(dof: Dof) -> Operator {
    let z = Operator::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2");
    let id = Operator::identity(2);
    match dof {
        Dof::Momentum => tensor(&z, &id),
        Dof::Polarization => tensor(&id, &z),
    }
    .expect("4x4")
}

/// Kraus pair `{√((1+v)/2)·I, √((1−v)/2)·Z}` on one photon's degree of freedom.
pub fn dephasing_kraus(dof: Dof, v: f64) -> Result<[Operator; 2]> {
    check_unit_interval("coherence", v)?;
    let keep = ((1.0 + v) / 2.0).sqrt();
    let flip = ((1.0 - v) / 2.0).sqrt();
    Ok([
        Operator::new(Operator::identity(PHOTON_DIM).into_matrix().scale(keep))?,
        Operator::new(pauli_z_on(dof).into_matrix().scale(flip))?,
    ])
}

/// Multiplies every element connecting the 0 and 1 levels of `dof` on
/// `photon` by `v`.
pub fn dephase_pair(state: &PairState, photon: Photon, dof: Dof, v: f64) -> Result<PairState> {
    check_unit_interval("coherence", v)?;
    let mut rho = state.matrix().clone();
    for r in 0..rho.nrows() {
        for c in 0..rho.ncols() {
            if BasisConvention::level_in_pair(r, photon, dof)
                != BasisConvention::level_in_pair(c, photon, dof)
            {
                rho[(r, c)] *= v;
            }
        }
    }
    Ok(PairState::from_matrix_unchecked(rho))
}

/// Single-photon version of [`dephase_pair`] on a 4×4 density matrix.
pub fn dephase_photon(rho: &Operator, dof: Dof, v: f64) -> Result<Operator> {
    check_unit_interval("coherence", v)?;
    if rho.dim() != PHOTON_DIM {
        return Err(crate::hilbert::HilbertError::WrongDimension {
            expected: PHOTON_DIM,
            rows: rho.dim(),
            cols: rho.dim(),
        }
        .into());
    }
    let mut m = rho.matrix().clone();
    for r in 0..PHOTON_DIM {
        for c in 0..PHOTON_DIM {
            if BasisConvention::level_in_photon(r, dof) != BasisConvention::level_in_photon(c, dof)
            {
                m[(r, c)] *= v;
            }
        }
    }
    Ok(Operator::new(m)?)
}

/// Noisy source, ideal circuit on both photons, then the gate's coherence
/// loss on the pair's polarization.
pub fn imperfect_swap_pipeline(
    src: &SourceParams,
    gate: &GateNoise,
    variant: CircuitVariant,
) -> Result<PairState> {
    gate.validate()?;
    let rho = noisy_source(src)?;
    let rho = circuit(&rho, &variant.steps())?;
    let v = gate.coherence();
    let rho = dephase_pair(&rho, Photon::Signal, Dof::Polarization, v)?;
    if gate.per_photon {
        dephase_pair(&rho, Photon::Idler, Dof::Polarization, v)
    } else {
        Ok(rho)
    }
}

/// Model prediction of the 45° fringe visibility for the pipeline above.
pub fn predicted_v45(src: &SourceParams, gate: &GateNoise) -> f64 {
    let g = if gate.per_photon {
        gate.coherence().powi(2)
    } else {
        gate.coherence()
    };
    src.white_noise * src.momentum_coherence * g
}

/// Model prediction of the 0° fringe visibility.
pub fn predicted_v0(src: &SourceParams) -> f64 {
    src.white_noise
}

/// Visibility of a 45°-polarized laser probe sent through the SWAP, with or
/// without the dove prism in the Sagnac loop.
pub fn classical_gate_visibility(gate: &GateNoise, with_dove_prism: bool) -> Result<f64> {
    gate.validate()?;
    let v = if with_dove_prism {
        gate.coherence()
    } else {
        gate.bs_coherence
    };
    let probe = classical_probe_state(std::f64::consts::FRAC_PI_4)
        .apply(swap_gate().operator())?
        .density();
    let rho = dephase_photon(&probe, Dof::Polarization, v)?;
    let id = Operator::identity(2);
    Ok(fringe_visibility(|theta| {
        let proj = tensor(&id, &analyzer_projector(theta)).expect("4x4");
        rho.compose(&proj).expect("4x4").trace().re
    }))
}

/// Source coherence implied by a measured quantum visibility and the
/// classical gate visibility: `v45 / v_c1`.
pub fn decompose_fidelity(v45: f64, v_c1: f64) -> Result<f64> {
    if !(v_c1 > 0.0 && v_c1 <= 1.0) {
        return Err(Error::InvalidClassicalVisibility(v_c1));
    }
    if !(v45 >= 0.0) {
        return Err(Error::OutOfRange {
            name: "v45",
            value: v45,
        });
    }
    if v45 > v_c1 {
        return Err(Error::InconsistentBudget { v45, v_c1 });
    }
    Ok(v45 / v_c1)
}

/// Same channel as [`dephase_pair`], applied through its Kraus operators.
pub fn dephase_via_kraus(state: &PairState, photon: Photon, dof: Dof, v: f64) -> Result<PairState> {
    let kraus = dephasing_kraus(dof, v)?;
    Ok(crate::hilbert::apply_kraus_to_photon(state, photon, &kraus)?)
}
