//! Constructors for the benchmark interferometer input states, with
//! automatic truncation sizing and reference metadata for report
//! generation.

use crate::error::{Error, Result};
use crate::fock::{
    basis_state, jm_index, outer_product, ModeCutoff, State, TwoModeDensity, TwoModePureState,
};
use crate::linalg::CsrMatrix;
use crate::subtraction::HeraldSign;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Amplitude tail bound used when auto-sizing truncations for states with
/// unbounded photon-number support.
pub const TAIL_TOL: f64 = 1e-12;

/// Default hard ceiling on the per-mode cutoff of auto-sized states.
pub const DEFAULT_CUTOFF_BUDGET: usize = 1024;

/// Input state families for the interferometer comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputStateSpec {
    /// |n> x |0>
    FockVacuum { n: usize },
    /// |alpha> x |0>
    CoherentVacuum { alpha: f64 },
    /// |alpha> x |0, r> (squeezed vacuum in mode b)
    CoherentSqueezed { alpha: f64, r: f64 },
    /// |n> x |n>
    TwinFock { n: usize },
    /// |n> x |n-1>
    FraternalTwin { n: usize },
    /// (|n,0> + |0,n>)/sqrt(2)
    Noon { n: usize },
    /// (|n,n> + |n+1,n-1>)/sqrt(2)
    Ymck { n: usize },
    /// (|n,n-1> + s |n-1,n>)/sqrt(2)
    SubtractedTwin { n: usize, sign: HeraldSign },
    /// Twin-form mixture sum_n p_n |n,n><n,n|: either thermal-like
    /// weights p_n proportional to x^n, or an explicit weight table.
    OpoMixture {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

/// Generator against which the phase-estimation Fisher information of a
/// state is quoted: rotation about the spin y axis for interferometer
/// inputs, the mode-a photon number for the inside-interferometer state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Jy,
    NumberA,
}

fn require_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(format!("{what} requires n >= 1")));
    }
    Ok(())
}

/// Smallest index m such that the probability tail beyond m is below
/// `TAIL_TOL`, given unnormalized probabilities p.
fn tail_cut(p: &[f64]) -> usize {
    let total: f64 = p.iter().sum();
    let mut acc = 0.0;
    for (i, w) in p.iter().enumerate() {
        acc += w;
        if total - acc < TAIL_TOL * total {
            return i;
        }
    }
    p.len() - 1
}

fn coherent_amplitudes(alpha: f64, budget: usize) -> Result<Vec<f64>> {
    let mut c = (-0.5 * alpha * alpha).exp();
    if c == 0.0 {
        return Err(Error::CutoffBudget {
            requested: usize::MAX,
            budget,
        });
    }
    let mut amps = Vec::new();
    for n in 0usize.. {
        amps.push(c);
        // stop once past the Poisson peak with a negligible remaining tail:
        // beyond the peak successive probability ratios are below 1/2, so
        // the tail is bounded by a geometric sum ~ 2 c^2
        if n as f64 > alpha * alpha + 1.0 && 2.0 * c * c < TAIL_TOL * TAIL_TOL {
            break;
        }
        if amps.len() > budget {
            return Err(Error::CutoffBudget {
                requested: amps.len(),
                budget,
            });
        }
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    Ok(amps)
}

fn squeezed_amplitudes(r: f64, budget: usize) -> Result<Vec<f64>> {
    // even-only expansion c_{2k} = (-tanh r / 2)^k sqrt((2k)!)/k! / sqrt(cosh r);
    // the sign convention puts the antisqueezed quadrature out of the
    // interference plane, so r > 0 reduces the detected noise
    let mut amps = vec![1.0 / r.cosh().sqrt()];
    let t = r.tanh();
    loop {
        let k = amps.len();
        let prev = amps[k - 1];
        let next =
            prev * (-t / 2.0) * (((2 * k) * (2 * k - 1)) as f64).sqrt() / k as f64;
        if next.abs() < prev.abs() && next * next < TAIL_TOL * TAIL_TOL {
            break;
        }
        amps.push(next);
        if 2 * amps.len() > budget {
            return Err(Error::CutoffBudget {
                requested: 2 * amps.len(),
                budget,
            });
        }
    }
    Ok(amps)
}

/// Builds the specified state with an auto-sized cutoff, bounded by
/// `budget` (per-mode n_max).
pub fn build_with_budget(spec: &InputStateSpec, budget: usize) -> Result<State> {
    let check_budget = |n_max: usize| -> Result<ModeCutoff> {
        if n_max > budget {
            Err(Error::CutoffBudget {
                requested: n_max,
                budget,
            })
        } else {
            Ok(ModeCutoff::new(n_max))
        }
    };
    match spec {
        InputStateSpec::FockVacuum { n } => {
            require_positive(*n, "fock_vacuum")?;
            let cut = check_budget(*n)?;
            Ok(basis_state(*n, 0, cut)?.into())
        }
        InputStateSpec::TwinFock { n } => {
            require_positive(*n, "twin_fock")?;
            let cut = check_budget(2 * n)?;
            Ok(basis_state(*n, *n, cut)?.into())
        }
        InputStateSpec::FraternalTwin { n } => {
            require_positive(*n, "fraternal_twin")?;
            let cut = check_budget(2 * n - 1)?;
            Ok(basis_state(*n, n - 1, cut)?.into())
        }
        InputStateSpec::Noon { n } => {
            require_positive(*n, "noon")?;
            let cut = check_budget(*n)?;
            let inv = 1.0 / 2f64.sqrt();
            let mut amps = vec![Complex64::new(0.0, 0.0); cut.dim()];
            amps[cut.index(*n, 0)] = Complex64::new(inv, 0.0);
            amps[cut.index(0, *n)] = Complex64::new(inv, 0.0);
            Ok(TwoModePureState::from_amplitudes(cut, amps, 1e-12)?.into())
        }
        InputStateSpec::Ymck { n } => {
            require_positive(*n, "ymck")?;
            let cut = check_budget(2 * n)?;
            let inv = 1.0 / 2f64.sqrt();
            let mut amps = vec![Complex64::new(0.0, 0.0); cut.dim()];
            amps[cut.index(*n, *n)] = Complex64::new(inv, 0.0);
            amps[cut.index(n + 1, n - 1)] = Complex64::new(inv, 0.0);
            Ok(TwoModePureState::from_amplitudes(cut, amps, 1e-12)?.into())
        }
        InputStateSpec::SubtractedTwin { n, sign } => {
            require_positive(*n, "subtracted_twin")?;
            let cut = check_budget(2 * n - 1)?;
            Ok(crate::subtraction::subtracted_twin_pure(*n, *sign, cut)?.into())
        }
        InputStateSpec::CoherentVacuum { alpha } => {
            let ca = coherent_amplitudes(*alpha, budget)?;
            let probs: Vec<f64> = ca.iter().map(|c| c * c).collect();
            let n_max = (tail_cut(&probs) + 2).min(ca.len() - 1);
            let cut = check_budget(n_max)?;
            let mut amps = vec![Complex64::new(0.0, 0.0); cut.dim()];
            for (n, &c) in ca.iter().enumerate().take(n_max + 1) {
                amps[cut.index(n, 0)] = Complex64::new(c, 0.0);
            }
            Ok(TwoModePureState::normalized(cut, amps)?.into())
        }
        InputStateSpec::CoherentSqueezed { alpha, r } => {
            let ca = coherent_amplitudes(*alpha, budget)?;
            let cs = squeezed_amplitudes(*r, budget)?;
            let probs_a: Vec<f64> = ca.iter().map(|c| c * c).collect();
            let na = (tail_cut(&probs_a) + 2).min(ca.len() - 1);
            let nb = 2 * (cs.len() - 1);
            let cut = check_budget(na.max(nb + 2))?;
            let mut amps = vec![Complex64::new(0.0, 0.0); cut.dim()];
            for (n, &c) in ca.iter().enumerate().take(na + 1) {
                for (k, &s) in cs.iter().enumerate() {
                    amps[cut.index(n, 2 * k)] = Complex64::new(c * s, 0.0);
                }
            }
            Ok(TwoModePureState::normalized(cut, amps)?.into())
        }
        InputStateSpec::OpoMixture { x, weights } => {
            let p: Vec<f64> = match (x, weights) {
                (Some(x), None) => {
                    if !(0.0 < *x && *x < 1.0) {
                        return Err(Error::InvalidParameter(format!(
                            "opo_mixture thermal parameter x = {x} outside (0, 1)"
                        )));
                    }
                    // geometric tail beyond weight w is w*x/(1-x)
                    let mut p = Vec::new();
                    let mut w = 1.0;
                    while w * x / (1.0 - x) >= TAIL_TOL {
                        p.push(w);
                        w *= x;
                        if p.len() > budget {
                            return Err(Error::CutoffBudget {
                                requested: p.len(),
                                budget,
                            });
                        }
                    }
                    p.push(w);
                    p
                }
                (None, Some(w)) => {
                    if w.is_empty() || w.iter().any(|v| *v < 0.0) {
                        return Err(Error::InvalidParameter(
                            "opo_mixture weight table must be nonempty and nonnegative"
                                .into(),
                        ));
                    }
                    w.clone()
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "opo_mixture takes exactly one of `x` or `weights`".into(),
                    ));
                }
            };
            let n_max = tail_cut(&p) + 2;
            let cut = check_budget(n_max)?;
            let total: f64 = p.iter().take(n_max + 1).sum();
            let mut mat = CsrMatrix::zeros(cut.dim());
            for (n, &w) in p.iter().enumerate().take(n_max + 1) {
                if w == 0.0 {
                    continue;
                }
                let b = basis_state(n, n, cut)?;
                mat = mat.add(
                    &outer_product(b.amplitudes()).scale(Complex64::new(w / total, 0.0)),
                );
            }
            Ok(State::Mixed(TwoModeDensity::from_matrix(cut, mat)))
        }
    }
}

/// Builds the specified state with the default cutoff budget.
pub fn build(spec: &InputStateSpec) -> Result<State> {
    build_with_budget(spec, DEFAULT_CUTOFF_BUDGET)
}

/// Metadata record for report generation: measured bulk properties of the
/// built state next to the published reference formulas.
#[derive(Debug, Clone, Serialize)]
pub struct StateDescription {
    pub label: String,
    pub mean_total_photons: f64,
    pub purity: f64,
    /// Range of total photon numbers (doubled-j spin labels) in the support.
    pub two_j_min: i64,
    pub two_j_max: i64,
    pub generator: GeneratorKind,
    pub reference_delta_phi: Option<f64>,
    pub reference_delta_phi_formula: String,
    pub reference_fringe_formula: String,
}

fn support_two_j(state: &State) -> (i64, i64) {
    let cutoff = state.cutoff();
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    let mut visit = |idx: usize, w: f64| {
        if w > 1e-20 {
            let (na, nb) = cutoff.unindex(idx);
            let two_j = jm_index(na, nb).two_j;
            lo = lo.min(two_j);
            hi = hi.max(two_j);
        }
    };
    match state {
        State::Pure(psi) => {
            for (i, a) in psi.amplitudes().iter().enumerate() {
                visit(i, a.norm_sqr());
            }
        }
        State::Mixed(rho) => {
            for (r, c, v) in rho.matrix().iter() {
                if r == c {
                    visit(r, v.re);
                }
            }
        }
    }
    if lo > hi {
        (0, 0)
    } else {
        (lo, hi)
    }
}

/// Phase-estimation generator appropriate for this state family.
pub fn generator_kind(spec: &InputStateSpec) -> GeneratorKind {
    match spec {
        InputStateSpec::Noon { .. } => GeneratorKind::NumberA,
        _ => GeneratorKind::Jy,
    }
}

/// Builds the state and reports its measured properties together with the
/// published reference formulas for the comparison table.
pub fn describe(spec: &InputStateSpec) -> Result<StateDescription> {
    let state = build(spec)?;
    let (two_j_min, two_j_max) = support_two_j(&state);
    let (label, ref_dp, ref_dp_formula, ref_fringe) = match spec {
        InputStateSpec::FockVacuum { n } => (
            format!("fock_vacuum(n={n})"),
            Some(1.0 / (*n as f64).sqrt()),
            "1/sqrt(n)".to_string(),
            "n*cos(phi)".to_string(),
        ),
        InputStateSpec::CoherentVacuum { alpha } => (
            format!("coherent_vacuum(alpha={alpha})"),
            Some(1.0 / alpha.abs()),
            "1/|alpha|".to_string(),
            "|alpha|^2*cos(phi)".to_string(),
        ),
        InputStateSpec::CoherentSqueezed { alpha, r } => (
            format!("coherent_squeezed(alpha={alpha}, r={r})"),
            Some((-r).exp() / alpha.abs()),
            "exp(-r)/|alpha|".to_string(),
            "|alpha|^2*cos(phi)".to_string(),
        ),
        InputStateSpec::TwinFock { n } => (
            format!("twin_fock(n={n})"),
            Some(1.0 / (2.0 * *n as f64 * (*n as f64 + 1.0)).sqrt()),
            "1/sqrt(2n(n+1))".to_string(),
            "0".to_string(),
        ),
        InputStateSpec::FraternalTwin { n } => (
            format!("fraternal_twin(n={n})"),
            Some(1.0 / (2.0 * (*n as f64).powi(2) - 1.0).sqrt()),
            "1/sqrt(2n^2-1)".to_string(),
            "cos(phi)/2".to_string(),
        ),
        InputStateSpec::Noon { n } => (
            format!("noon(n={n})"),
            Some(1.0 / *n as f64),
            "1/n".to_string(),
            "~cos(n*phi)".to_string(),
        ),
        InputStateSpec::Ymck { n } => (
            format!("ymck(n={n})"),
            Some(1.0 / (*n as f64 * (*n as f64 + 1.0)).sqrt()),
            "1/sqrt(n(n+1))".to_string(),
            "cos(phi)/2 - sin(phi)/4*sqrt(n(n+2))".to_string(),
        ),
        InputStateSpec::SubtractedTwin { n, sign } => (
            format!(
                "subtracted_twin(n={n}, {})",
                match sign {
                    HeraldSign::Plus => "+",
                    HeraldSign::Minus => "-",
                }
            ),
            Some(1.0 / *n as f64),
            "1/n".to_string(),
            match sign {
                HeraldSign::Plus => "-(n/2)*sin(phi)".to_string(),
                HeraldSign::Minus => "+(n/2)*sin(phi)".to_string(),
            },
        ),
        InputStateSpec::OpoMixture { .. } => (
            "opo_mixture".to_string(),
            None,
            "1/<N> after coherent subtraction".to_string(),
            "0 before subtraction".to_string(),
        ),
    };
    Ok(StateDescription {
        label,
        mean_total_photons: state.mean_total_photons(),
        purity: state.purity(),
        two_j_min,
        two_j_max,
        generator: generator_kind(spec),
        reference_delta_phi: ref_dp,
        reference_delta_phi_formula: ref_dp_formula,
        reference_fringe_formula: ref_fringe,
    })
}
