//! Single-photon two-qubit gate library.
//!
//! The M-CNOT is a half-wave plate at 45° in the bottom beam. The P-CNOT is
//! the polarization Sagnac interferometer with a dove prism, abstracted to
//! its ideal unitary; its imperfections live in [`crate::noise`]. Three
//! alternating CNOTs give the momentum/polarization SWAP.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    apply_to_photon, tensor, BasisConvention, HilbertError, Momentum, Operator, PairKet, PairState,
    Photon, C64,
};

/// Half-wave plate Jones matrix `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]`, fast axis
/// at `fast_axis` radians from H. Real with determinant −1.
pub fn hwp_jones(fast_axis: f64) -> Operator {
    let (s, c) = (2.0 * fast_axis).sin_cos();
    Operator::from_real(2, &[c, s, s, -c]).expect("2x2")
}

/// A unitary acting on one photon, with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    mat: Operator,
    label: String,
}

impl GateOp {
    pub fn new(label: impl Into<String>, mat: Operator) -> Result<Self, HilbertError> {
        if mat.dim() != 4 {
            return Err(HilbertError::WrongDimension {
                expected: 4,
                rows: mat.dim(),
                cols: mat.dim(),
            });
        }
        mat.ensure_unitary()?;
        Ok(Self {
            mat,
            label: label.into(),
        })
    }

    pub fn operator(&self) -> &Operator {
        &self.mat
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &GateOp) -> GateOp {
        GateOp {
            mat: self.mat.compose(&first.mat).expect("4x4"),
            label: format!("{}·{}", self.label, first.label),
        }
    }

    pub fn is_involution(&self) -> bool {
        self.mat
            .compose(&self.mat)
            .expect("4x4")
            .max_abs_diff(&Operator::identity(4))
            <= crate::hilbert::ALGEBRA_TOL
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn projector(m: Momentum) -> Operator {
    let mut e = [0.0; 4];
    e[3 * m.level()] = 1.0;
    Operator::from_real(2, &e).expect("2x2")
}

/// `|path⟩⟨path| ⊗ J(θ) + |other⟩⟨other| ⊗ I`: a plate covering one beam half.
pub fn path_waveplate(path: Momentum, fast_axis: f64) -> GateOp {
    let on = tensor(&projector(path), &hwp_jones(fast_axis)).expect("4x4");
    let off = tensor(&projector(path.flipped()), &Operator::identity(2)).expect("4x4");
    let mat = Operator::new(on.matrix() + off.matrix()).expect("4x4");
    GateOp::new(
        format!("path_hwp({:?},{})", path, fast_axis.to_degrees()),
        mat,
    )
    .expect("block-diagonal unitary")
}

/// Waveplate covering the whole beam.
pub fn beam_waveplate(fast_axis: f64) -> GateOp {
    let mat = tensor(&Operator::identity(2), &hwp_jones(fast_axis)).expect("4x4");
    GateOp::new(format!("hwp({})", fast_axis.to_degrees()), mat).expect("unitary")
}

fn permutation(label: &str, image: [usize; 4]) -> GateOp {
    let mut e = [0.0; 16];
    for (src, &dst) in image.iter().enumerate() {
        e[4 * dst + src] = 1.0;
    }
    GateOp::new(label, Operator::from_real(4, &e).expect("4x4")).expect("permutation")
}

const TH: usize = BasisConvention::photon_index(0, 0);
const TV: usize = BasisConvention::photon_index(0, 1);
const BH: usize = BasisConvention::photon_index(1, 0);
const BV: usize = BasisConvention::photon_index(1, 1);

/// Momentum-controlled NOT: flips polarization in the bottom beam.
pub fn m_cnot() -> GateOp {
    let mut g = permutation("m_cnot", [TH, TV, BV, BH]);
    debug_assert!(
        g.operator()
            .max_abs_diff(path_waveplate(Momentum::B, std::f64::consts::FRAC_PI_4).operator())
            < 1e-15
    );
    g.label = "m_cnot".into();
    g
}

/// Polarization-controlled NOT: V light has its beam half exchanged.
pub fn p_cnot() -> GateOp {
    permutation("p_cnot", [TH, BV, BH, TV])
}

/// `M-CNOT · P-CNOT · M-CNOT`.
pub fn swap_gate() -> GateOp {
    let m = m_cnot();
    let mut g = m.after(&p_cnot()).after(&m);
    g.label = "swap".into();
    g
}

/// Which circuit is run on each photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CircuitVariant {
    /// M-CNOT, P-CNOT, M-CNOT: the complete SWAP.
    FullSwap,
    /// M-CNOT, P-CNOT only.
    #[default]
    NoFinalMcnot,
}

impl CircuitVariant {
    /// Gate sequence for one photon, in application order.
    pub fn gates(self) -> Vec<GateOp> {
        match self {
            CircuitVariant::FullSwap => vec![m_cnot(), p_cnot(), m_cnot()],
            CircuitVariant::NoFinalMcnot => vec![m_cnot(), p_cnot()],
        }
    }

    /// Ideal output when the down-conversion state enters both photons:
    /// `|T_S B_I⟩` times a polarization Bell state, `(|HV⟩+|VH⟩)/√2` for the
    /// full SWAP and `(|HH⟩+|VV⟩)/√2` without the final M-CNOT.
    pub fn target_state(self) -> PairKet {
        let pol = match self {
            CircuitVariant::FullSwap => [(0, 1), (1, 0)],
            CircuitVariant::NoFinalMcnot => [(0, 0), (1, 1)],
        };
        let mut amp = vec![C64::new(0.0, 0.0); 16];
        for (ps, pi) in pol {
            let k = BasisConvention::pair_index(
                BasisConvention::photon_index(Momentum::T.level(), ps),
                BasisConvention::photon_index(Momentum::B.level(), pi),
            );
            amp[k] = C64::new(FRAC_1_SQRT_2, 0.0);
        }
        PairKet::new(amp).expect("normalized")
    }

    /// The same gate sequence applied to signal, then to idler.
    pub fn steps(self) -> Vec<(Photon, GateOp)> {
        [Photon::Signal, Photon::Idler]
            .into_iter()
            .flat_map(|p| self.gates().into_iter().map(move |g| (p, g)))
            .collect()
    }
}

/// Applies `steps` in order.
pub fn circuit(state: &PairState, steps: &[(Photon, GateOp)]) -> Result<PairState> {
    steps.iter().try_fold(state.clone(), |rho, (photon, g)| {
        apply_to_photon(&rho, *photon, g.operator()).map_err(Error::from)
    })
}

fn parse_degrees(s: &str, whole: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|d| d.is_finite())
        .map(f64::to_radians)
        .ok_or_else(|| Error::UnknownGate(whole.to_string()))
}

impl FromStr for GateOp {
    type Err = Error;

    /// Accepts `m_cnot`, `p_cnot`, `swap`, `hwp(<deg>)`, `path_hwp(<T|B>,<deg>)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "m_cnot" => return Ok(m_cnot()),
            "p_cnot" => return Ok(p_cnot()),
            "swap" => return Ok(swap_gate()),
            _ => {}
        }
        let unknown = || Error::UnknownGate(s.to_string());
        let (name, rest) = t.split_once('(').ok_or_else(unknown)?;
        let args = rest.strip_suffix(')').ok_or_else(unknown)?;
        match name.trim() {
            "hwp" => Ok(beam_waveplate(parse_degrees(args, s)?)),
            "path_hwp" => {
                let (path, deg) = args.split_once(',').ok_or_else(unknown)?;
                let path = match path.trim() {
                    "T" | "t" => Momentum::T,
                    "B" | "b" => Momentum::B,
                    _ => return Err(unknown()),
                };
                Ok(path_waveplate(path, parse_degrees(deg, s)?))
            }
            _ => Err(unknown()),
        }
    }
}
