//! Polarization analyzers, momentum selection, coincidence probabilities,
//! correlations and the CHSH parameter.
//!
//! Analyzer angles are polarizer transmission axes measured from H, in
//! radians. Momentum selection defaults to signal in T and idler in B, the
//! deterministic paths after the SWAP.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Momentum, Operator, PairState, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerSetting {
    pub theta1: f64,
    pub theta2: f64,
}

impl AnalyzerSetting {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    pub fn from_degrees(theta1: f64, theta2: f64) -> Self {
        Self::new(theta1.to_radians(), theta2.to_radians())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    pub fn from_degrees(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        Self {
            a: a.to_radians(),
            a_prime: a_prime.to_radians(),
            b: b.to_radians(),
            b_prime: b_prime.to_radians(),
        }
    }

    /// `(0°, 45°, 22.5°, 67.5°)`.
    pub fn standard() -> Self {
        Self::from_degrees(0.0, 45.0, 22.5, 67.5)
    }

    pub fn to_degrees(&self) -> [f64; 4] {
        [self.a, self.a_prime, self.b, self.b_prime].map(f64::to_degrees)
    }

    /// `(θ1, θ2, sign)` for each term of `E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
    pub fn terms(&self) -> [(f64, f64, f64); 4] {
        [
            (self.a, self.b, 1.0),
            (self.a, self.b_prime, -1.0),
            (self.a_prime, self.b, 1.0),
            (self.a_prime, self.b_prime, 1.0),
        ]
    }

    fn from_array(x: [f64; 4]) -> Self {
        Self {
            a: x[0],
            a_prime: x[1],
            b: x[2],
            b_prime: x[3],
        }
    }
}

/// Momentum selection for the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Paths {
    pub signal: Momentum,
    pub idler: Momentum,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            signal: Momentum::T,
            idler: Momentum::B,
        }
    }
}

/// `|θ⟩⟨θ|` with `|θ⟩ = cosθ|H⟩ + sinθ|V⟩`.
pub fn analyzer_projector(theta: f64) -> Operator {
    let (s, c) = theta.sin_cos();
    Operator::from_real(2, &[c * c, c * s, c * s, s * s]).expect("2x2")
}

pub fn momentum_projector(path: Momentum) -> Operator {
    let mut e = [0.0; 4];
    e[3 * path.level()] = 1.0;
    Operator::from_real(2, &e).expect("2x2")
}

fn photon_ket(path: Momentum, theta: f64) -> DVector<C64> {
    let m = DVector::from_row_slice(&path.ket());
    let (s, c) = theta.sin_cos();
    let p = DVector::from_row_slice(&[C64::new(c, 0.0), C64::new(s, 0.0)]);
    m.kronecker(&p)
}

/// `Tr[ρ (Π_path ⊗ Π_θ1) ⊗ (Π_path ⊗ Π_θ2)]`.
pub fn coincidence_probability(state: &PairState, setting: AnalyzerSetting, paths: Paths) -> f64 {
    let u = photon_ket(paths.signal, setting.theta1).kronecker(&photon_ket(paths.idler, setting.theta2));
    u.dotc(&(state.matrix() * &u)).re
}

/// Normalized polarization correlation with both arms on the default paths.
pub fn correlation_e(state: &PairState, theta1: f64, theta2: f64) -> Result<f64> {
    correlation_e_on(state, theta1, theta2, Paths::default())
}

pub fn correlation_e_on(state: &PairState, theta1: f64, theta2: f64, paths: Paths) -> Result<f64> {
    let p = |t1: f64, t2: f64| coincidence_probability(state, AnalyzerSetting::new(t1, t2), paths);
    let pp = p(theta1, theta2);
    let mm = p(theta1 + FRAC_PI_2, theta2 + FRAC_PI_2);
    let mp = p(theta1 + FRAC_PI_2, theta2);
    let pm = p(theta1, theta2 + FRAC_PI_2);
    let total = pp + mm + mp + pm;
    if total <= f64::EPSILON {
        return Err(Error::DegenerateCorrelation { theta1, theta2 });
    }
    Ok(((pp + mm - mp - pm) / total).clamp(-1.0, 1.0))
}

/// `E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
pub fn chsh_s(state: &PairState, s: &ChshSettings) -> Result<f64> {
    s.terms()
        .iter()
        .map(|&(t1, t2, sign)| correlation_e(state, t1, t2).map(|e| sign * e))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshOptimum {
    pub settings: ChshSettings,
    pub s: f64,
}

const GRID_STEP_DEG: f64 = 5.0;
const REFINE_TOL: f64 = 1e-12;

/// Maximizes S over the four analyzer angles: a 5° grid, then a Nelder–Mead
/// refinement from the best grid point.
pub fn optimize_chsh(state: &PairState) -> Result<ChshOptimum> {
    let n = (180.0 / GRID_STEP_DEG) as usize;
    let angles: Vec<f64> = (0..n).map(|k| (k as f64 * GRID_STEP_DEG).to_radians()).collect();
    let mut table = vec![0.0; n * n];
    for (i, &t1) in angles.iter().enumerate() {
        for (j, &t2) in angles.iter().enumerate() {
            table[i * n + j] = correlation_e(state, t1, t2)?;
        }
    }
    let e = |i: usize, j: usize| table[i * n + j];
    let mut best = (f64::NEG_INFINITY, [0usize; 4]);
    for a in 0..n {
        for ap in 0..n {
            for b in 0..n {
                let partial = e(a, b) + e(ap, b);
                for bp in 0..n {
                    let s = partial - e(a, bp) + e(ap, bp);
                    if s > best.0 {
                        best = (s, [a, ap, b, bp]);
                    }
                }
            }
        }
    }
    let start = best.1.map(|k| angles[k]);
    let objective = |x: &[f64; 4]| -> f64 {
        chsh_s(state, &ChshSettings::from_array(*x)).unwrap_or(f64::NEG_INFINITY)
    };
    let mut x = start;
    let mut s = best.0;
    // Restarting shakes the simplex out of a collapsed configuration.
    for _ in 0..3 {
        let (nx, ns) = nelder_mead_max(&objective, x, 2.0_f64.to_radians(), REFINE_TOL, 2000);
        let improved = ns - s;
        if ns >= s {
            x = nx;
            s = ns;
        }
        if improved < REFINE_TOL {
            break;
        }
    }
    Ok(ChshOptimum {
        settings: ChshSettings::from_array(x),
        s,
    })
}

fn nelder_mead_max(
    f: &impl Fn(&[f64; 4]) -> f64,
    start: [f64; 4],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> ([f64; 4], f64) {
    let mut simplex: Vec<([f64; 4], f64)> = Vec::with_capacity(5);
    simplex.push((start, f(&start)));
    for k in 0..4 {
        let mut p = start;
        p[k] += step;
        simplex.push((p, f(&p)));
    }
    let lerp = |a: &[f64; 4], b: &[f64; 4], t: f64| -> [f64; 4] {
        std::array::from_fn(|k| a[k] + t * (b[k] - a[k]))
    };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        if simplex[0].1 - simplex[4].1 <= tol {
            break;
        }
        let centroid: [f64; 4] =
            std::array::from_fn(|k| simplex[..4].iter().map(|p| p.0[k]).sum::<f64>() / 4.0);
        let worst = simplex[4];
        let refl = lerp(&centroid, &worst.0, -1.0);
        let fr = f(&refl);
        if fr > simplex[0].1 {
            let exp = lerp(&centroid, &worst.0, -2.0);
            let fe = f(&exp);
            simplex[4] = if fe > fr { (exp, fe) } else { (refl, fr) };
        } else if fr > simplex[3].1 {
            simplex[4] = (refl, fr);
        } else {
            let con = lerp(&centroid, &worst.0, 0.5);
            let fc = f(&con);
            if fc > worst.1 {
                simplex[4] = (con, fc);
            } else {
                let best = simplex[0].0;
                for p in simplex.iter_mut().skip(1) {
                    p.0 = lerp(&best, &p.0, 0.5);
                    p.1 = f(&p.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex[0]
}

/// Coincidence probability against θ2 at fixed θ1, default paths.
pub fn sweep_curve(state: &PairState, theta1: f64, theta2_list: &[f64]) -> Vec<(f64, f64)> {
    theta2_list
        .iter()
        .map(|&t2| {
            (
                t2,
                coincidence_probability(state, AnalyzerSetting::new(theta1, t2), Paths::default()),
            )
        })
        .collect()
}

/// Visibility of a curve of the form `c + a·cos2θ + b·sin2θ`, computed
/// exactly from four samples.
pub fn fringe_visibility(curve: impl Fn(f64) -> f64) -> f64 {
    use std::f64::consts::FRAC_PI_4;
    let (p0, p45, p90, p135) = (
        curve(0.0),
        curve(FRAC_PI_4),
        curve(FRAC_PI_2),
        curve(3.0 * FRAC_PI_4),
    );
    let offset = (p0 + p45 + p90 + p135) / 4.0;
    if offset <= 0.0 {
        return 0.0;
    }
    let a = (p0 - p90) / 2.0;
    let b = (p45 - p135) / 2.0;
    a.hypot(b) / offset
}

/// Exact fringe visibility of the θ2 sweep at fixed θ1.
pub fn exact_visibility(state: &PairState, theta1: f64) -> f64 {
    fringe_visibility(|t2| coincidence_probability(state, AnalyzerSetting::new(theta1, t2), Paths::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{BasisConvention, PairKet};
    use crate::source::classical_probe_state;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn bell_hh_vv() -> PairState {
        let mut amp = vec![C64::new(0.0, 0.0); 16];
        amp[BasisConvention::pair_index(0, 2)] = C64::new(FRAC_1_SQRT_2, 0.0);
        amp[BasisConvention::pair_index(1, 3)] = C64::new(FRAC_1_SQRT_2, 0.0);
        PairKet::new(amp).unwrap().density()
    }

    #[test]
    fn analyzer_special_angles() {
        let h = analyzer_projector(0.0);
        assert_eq!(h, Operator::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap());
        let v = analyzer_projector(FRAC_PI_2);
        assert!(v.max_abs_diff(&Operator::from_real(2, &[0.0, 0.0, 0.0, 1.0]).unwrap()) < 1e-15);
        let d = analyzer_projector(FRAC_PI_4);
        assert!(d.max_abs_diff(&Operator::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap()) < 1e-15);
    }

    #[test]
    fn momentum_projection_probabilities() {
        let t = momentum_projector(Momentum::T);
        let one = crate::hilbert::PhotonState::basis(Momentum::T, crate::hilbert::Polarization::H);
        let proj = crate::hilbert::tensor(&t, &Operator::identity(2)).unwrap();
        assert_abs_diff_eq!(one.density().compose(&proj).unwrap().trace().re, 1.0);
        let probe = classical_probe_state(0.3).density();
        assert_abs_diff_eq!(probe.compose(&proj).unwrap().trace().re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bell_sweep_points() {
        let curve = sweep_curve(&bell_hh_vv(), 0.0, &[0.0, FRAC_PI_4, FRAC_PI_2]);
        assert_abs_diff_eq!(curve[0].1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(curve[1].1, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(curve[2].1, 0.0, epsilon = 1e-15);
        let at45 = sweep_curve(&bell_hh_vv(), FRAC_PI_4, &(0..180).map(|d| (d as f64).to_radians()).collect::<Vec<_>>());
        let argmax = at45
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        assert_abs_diff_eq!(argmax.to_degrees(), 45.0, epsilon = 1e-9);
    }

    #[test]
    fn mixed_polarization_gives_flat_curve() {
        let mut amp = vec![C64::new(0.0, 0.0); 16];
        amp[BasisConvention::pair_index(0, 2)] = C64::new(1.0, 0.0);
        let mut rho = PairKet::new(amp).unwrap().density().matrix().clone();
        // uniform mixture over the four polarization pairs on paths (T, B)
        rho.fill(C64::new(0.0, 0.0));
        for (s, i) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            let k = BasisConvention::pair_index(s, i);
            rho[(k, k)] = C64::new(0.25, 0.0);
        }
        let state = PairState::new(rho).unwrap();
        for (_, p) in sweep_curve(&state, 0.4, &[0.0, 0.5, 1.0, 2.0]) {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-15);
        }
        let opt = optimize_chsh(&state).unwrap();
        assert!(opt.s <= 2.0 + 1e-9);
    }

    #[test]
    fn chsh_ideal_is_tsirelson() {
        let s = chsh_s(&bell_hh_vv(), &ChshSettings::standard()).unwrap();
        assert_abs_diff_eq!(s, 2.0 * SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn product_state_correlations() {
        // |T H> ⊗ |B H>
        let hh = PairKet::basis(BasisConvention::pair_index(0, 2)).density();
        assert_abs_diff_eq!(correlation_e(&hh, 0.0, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(correlation_e(&hh, FRAC_PI_4, FRAC_PI_4).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_correlation_flagged() {
        // both photons in T: nothing on the default (T, B) paths
        let tt = PairKet::basis(BasisConvention::pair_index(0, 0)).density();
        assert!(matches!(
            correlation_e(&tt, 0.0, 0.0),
            Err(Error::DegenerateCorrelation { .. })
        ));
        assert!(chsh_s(&tt, &ChshSettings::standard()).is_err());
    }

    #[test]
    fn fringe_visibility_of_known_curves() {
        assert_abs_diff_eq!(fringe_visibility(|t| 1.0 + 0.3 * (2.0 * (t - 0.2)).cos()), 0.3, epsilon = 1e-12);
        assert_eq!(fringe_visibility(|_| 0.0), 0.0);
    }
}
