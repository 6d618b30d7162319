//! Heralded single-photon subtraction from twin beams: weak tap beam
//! splitters feeding ancilla detectors, with either bucket (which-mode
//! erased incoherently) or coherent (ancillas recombined on a balanced
//! beam splitter before detection) heralding.

use crate::error::{Error, Result};
use crate::fock::{
    basis_state, ladder, outer_product, FourModeState, LadderDirection, Mode, ModeCutoff, State,
    TwoModeDensity, TwoModePureState, ANC_00, ANC_01, ANC_10, ANC_11,
};
use crate::linalg::CsrMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which of the two coherent-herald detectors fired; determines the relative
/// sign of the heralded superposition (|n, n-1> +/- |n-1, n>)/sqrt(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeraldSign {
    Plus,
    Minus,
}

impl HeraldSign {
    pub fn sign(&self) -> f64 {
        match self {
            HeraldSign::Plus => 1.0,
            HeraldSign::Minus => -1.0,
        }
    }
}

/// Heralding protocol applied to the tap ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// Bucket detection: exactly one ancilla photon, detector identity
    /// discarded. Erases which-mode information incoherently.
    Bucket,
    /// Ancillas interfere on a balanced beam splitter before detection;
    /// a click in one output heralds a coherent superposition.
    Coherent(HeraldSign),
}

/// Result of a heralded subtraction: the conditional state and the
/// probability of the herald outcome.
#[derive(Debug, Clone)]
pub struct HeraldOutcome {
    pub state: State,
    pub herald_probability: f64,
    pub protocol: Protocol,
    pub tap_theta: f64,
}

/// First-order weak tap between a signal mode and its ancilla:
/// 1 + i theta (x a'^dagger + x^dagger a'), with the ancilla restricted to
/// {0, 1} photons (two-photon ancilla events are outside the model).
pub fn weak_tap(four: &FourModeState, theta: f64, mode: Mode) -> FourModeState {
    let cutoff = four.cutoff();
    let lower = ladder(mode, LadderDirection::Lower, cutoff);
    let raise = ladder(mode, LadderDirection::Raise, cutoff);
    let itheta = Complex64::new(0.0, theta);
    // ancilla transitions for the tapped mode: (0 -> 1) pairs of components
    let pairs: [(usize, usize); 2] = match mode {
        Mode::A => [(ANC_00, ANC_10), (ANC_01, ANC_11)],
        Mode::B => [(ANC_00, ANC_01), (ANC_10, ANC_11)],
    };
    let mut comps = [
        four.component(ANC_00).to_vec(),
        four.component(ANC_01).to_vec(),
        four.component(ANC_10).to_vec(),
        four.component(ANC_11).to_vec(),
    ];
    for (empty, full) in pairs {
        let down = lower.apply_vec(four.component(empty));
        let up = raise.apply_vec(four.component(full));
        for i in 0..cutoff.dim() {
            comps[full][i] += itheta * down[i];
            comps[empty][i] += itheta * up[i];
        }
    }
    FourModeState::from_components(cutoff, comps)
}

/// Recombines the two ancilla modes on a balanced beam splitter
/// (real rotation on the single-photon ancilla subspace):
/// |1,0>' = (|1,0> + |0,1>)/sqrt(2), |0,1>' = (-|1,0> + |0,1>)/sqrt(2).
pub fn ancilla_recombine(four: &FourModeState) -> FourModeState {
    let cutoff = four.cutoff();
    let inv = 1.0 / 2f64.sqrt();
    let mut comps = [
        four.component(ANC_00).to_vec(),
        vec![Complex64::new(0.0, 0.0); cutoff.dim()],
        vec![Complex64::new(0.0, 0.0); cutoff.dim()],
        four.component(ANC_11).to_vec(),
    ];
    for i in 0..cutoff.dim() {
        let c10 = four.component(ANC_10)[i];
        let c01 = four.component(ANC_01)[i];
        comps[ANC_10][i] = inv * (c10 - c01);
        comps[ANC_01][i] = inv * (c10 + c01);
    }
    FourModeState::from_components(cutoff, comps)
}

fn tapped(psi: &TwoModePureState, theta: f64) -> FourModeState {
    let four = FourModeState::from_signal(psi);
    let four = weak_tap(&four, theta, Mode::A);
    weak_tap(&four, theta, Mode::B)
}

/// Herald measurement operator for one coherent-detection branch,
/// M = i theta (a +/- b)/sqrt(2), acting on the signal modes.
fn coherent_herald_op(sign: HeraldSign, theta: f64, cutoff: ModeCutoff) -> CsrMatrix {
    let a = ladder(Mode::A, LadderDirection::Lower, cutoff);
    let b = ladder(Mode::B, LadderDirection::Lower, cutoff);
    let coeff = Complex64::new(0.0, theta / 2f64.sqrt());
    a.matrix()
        .scale(coeff)
        .add(&b.matrix().scale(coeff * sign.sign()))
}

/// Bucket-heralded subtraction. Pure inputs go through the explicit
/// four-mode tap pipeline; mixed inputs through the equivalent Kraus pair
/// (i theta a, i theta b).
pub fn bucket_subtract(state: &State, theta: f64) -> Result<HeraldOutcome> {
    let cutoff = state.cutoff();
    let (rho, prob) = match state {
        State::Pure(psi) => {
            let four = tapped(psi, theta);
            // exactly one ancilla photon, detector identity traced out
            four.conditioned(&[0.0, 1.0, 1.0, 0.0])?
        }
        State::Mixed(rho) => {
            let mut num = CsrMatrix::zeros(cutoff.dim());
            let mut prob = 0.0;
            for mode in [Mode::A, Mode::B] {
                let k = ladder(mode, LadderDirection::Lower, cutoff)
                    .matrix()
                    .scale(Complex64::new(0.0, theta));
                let term = k.matmul(rho.matrix()).matmul(&k.adjoint());
                prob += term.trace().re;
                num = num.add(&term);
            }
            if prob < 1e-300 {
                return Err(Error::Unheraldable { prob });
            }
            (TwoModeDensity::from_matrix(cutoff, num).normalized()?, prob)
        }
    };
    Ok(HeraldOutcome {
        state: State::Mixed(rho),
        herald_probability: prob,
        protocol: Protocol::Bucket,
        tap_theta: theta,
    })
}

/// Coherent-heralded subtraction with the chosen detector sign. Pure inputs
/// stay pure; mixed inputs use the single measurement operator
/// M = i theta (a +/- b)/sqrt(2).
pub fn coherent_subtract(state: &State, theta: f64, sign: HeraldSign) -> Result<HeraldOutcome> {
    let cutoff = state.cutoff();
    let outcome = match state {
        State::Pure(psi) => {
            let four = ancilla_recombine(&tapped(psi, theta));
            let anc = match sign {
                HeraldSign::Plus => ANC_01,
                HeraldSign::Minus => ANC_10,
            };
            let (out, prob) = four.project_ancilla(anc)?;
            (State::Pure(out), prob)
        }
        State::Mixed(rho) => {
            let m = coherent_herald_op(sign, theta, cutoff);
            let term = m.matmul(rho.matrix()).matmul(&m.adjoint());
            let prob = term.trace().re;
            if prob < 1e-300 {
                return Err(Error::Unheraldable { prob });
            }
            (
                State::Mixed(TwoModeDensity::from_matrix(cutoff, term).normalized()?),
                prob,
            )
        }
    };
    Ok(HeraldOutcome {
        state: outcome.0,
        herald_probability: outcome.1,
        protocol: Protocol::Coherent(sign),
        tap_theta: theta,
    })
}

/// Coefficients c_{j,j'} of the heralded mixture over spin sectors,
/// keyed by doubled j so half-integers stay exact (j = n - 1/2 maps to
/// two_j = 2n - 1).
#[derive(Debug, Clone, Default)]
pub struct MixtureCoefficients {
    entries: std::collections::BTreeMap<(i64, i64), Complex64>,
}

impl MixtureCoefficients {
    pub fn get(&self, two_j: i64, two_jp: i64) -> Complex64 {
        self.entries
            .get(&(two_j, two_jp))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Diagonal coefficients as (j, c_{j,j}) pairs.
    pub fn diagonal(&self) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .filter(|((j, jp), _)| j == jp)
            .map(|((j, _), c)| (*j as f64 / 2.0, c.re))
            .collect()
    }

    pub fn sum_diagonal(&self) -> f64 {
        self.diagonal().iter().map(|(_, c)| c).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &Complex64)> {
        self.entries.iter()
    }
}

/// Coefficients of the coherently subtracted state obtained from a
/// twin-form density sum_{n,n'} rho_{n,n'} |n,n><n',n'|:
/// c_{j,j'} = sqrt((j+1/2)(j'+1/2)) rho_{j+1/2,j'+1/2}
///            / sum_j (j+1/2) rho_{j+1/2,j+1/2},
/// with j = n - 1/2 for the component descended from |n,n>.
pub fn mixture_coefficients(rho: &TwoModeDensity) -> Result<MixtureCoefficients> {
    let cutoff = rho.cutoff();
    let tol = 1e-12;
    let mut raw = std::collections::BTreeMap::new();
    let mut norm = 0.0;
    for (r, c, v) in rho.matrix().iter() {
        if v.norm() <= tol {
            continue;
        }
        let (na, nb) = cutoff.unindex(r);
        let (nc, nd) = cutoff.unindex(c);
        if na != nb || nc != nd {
            return Err(Error::NotTwinForm { na, nb, nc, nd });
        }
        if na == nc {
            norm += na as f64 * v.re;
        }
        if na >= 1 && nc >= 1 {
            let w = ((na * nc) as f64).sqrt();
            raw.insert(
                (2 * na as i64 - 1, 2 * nc as i64 - 1),
                v * Complex64::new(w, 0.0),
            );
        }
    }
    if norm < 1e-300 {
        return Err(Error::Unheraldable { prob: norm });
    }
    let inv = Complex64::new(1.0 / norm, 0.0);
    Ok(MixtureCoefficients {
        entries: raw.into_iter().map(|(k, v)| (k, v * inv)).collect(),
    })
}

/// The heralded pure state (|n, n-1> + s |n-1, n>)/sqrt(2) built directly.
pub fn subtracted_twin_pure(
    n: usize,
    sign: HeraldSign,
    cutoff: ModeCutoff,
) -> Result<TwoModePureState> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cannot subtract a photon from the vacuum twin state (n = 0)".into(),
        ));
    }
    cutoff.check('a', n)?;
    cutoff.check('b', n)?;
    let inv = 1.0 / 2f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff.dim()];
    amps[cutoff.index(n, n - 1)] = Complex64::new(inv, 0.0);
    amps[cutoff.index(n - 1, n)] = Complex64::new(sign.sign() * inv, 0.0);
    TwoModePureState::from_amplitudes(cutoff, amps, 1e-12)
}

/// The bucket-heralded mixed state
/// (|n, n-1><n, n-1| + |n-1, n><n-1, n|)/2 built directly.
pub fn bucket_mixture(n: usize, cutoff: ModeCutoff) -> Result<TwoModeDensity> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cannot subtract a photon from the vacuum twin state (n = 0)".into(),
        ));
    }
    cutoff.check('a', n)?;
    cutoff.check('b', n)?;
    let up = basis_state(n, n - 1, cutoff)?;
    let down = basis_state(n - 1, n, cutoff)?;
    let half = Complex64::new(0.5, 0.0);
    let mat = outer_product(up.amplitudes())
        .scale(half)
        .add(&outer_product(down.amplitudes()).scale(half));
    Ok(TwoModeDensity::from_matrix(cutoff, mat))
}

/// Extracts the weights p_n of a twin-form density sum_n p_n |n,n><n,n|.
/// Any matrix element off that diagonal (above tolerance) is rejected.
pub fn twin_weights(rho: &TwoModeDensity) -> Result<Vec<f64>> {
    let cutoff = rho.cutoff();
    let tol = 1e-12;
    let mut weights = vec![0.0; cutoff.mode_dim()];
    for (r, c, v) in rho.matrix().iter() {
        if v.norm() <= tol {
            continue;
        }
        let (na, nb) = cutoff.unindex(r);
        let (nc, nd) = cutoff.unindex(c);
        if r == c && na == nb {
            weights[na] = v.re;
        } else {
            return Err(Error::NotTwinForm { na, nb, nc, nd });
        }
    }
    Ok(weights)
}

/// Weights of the heralded mixture after single-photon subtraction from a
/// twin-form mixture: each |n,n> component heralds with probability
/// proportional to n p_n.
pub fn subtracted_mixture_weights(twin: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = twin
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum();
    if total < 1e-300 {
        return Err(Error::Unheraldable { prob: total });
    }
    Ok(twin
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p / total)
        .collect())
}

/// The heralded mixture sum_n lambda_n |psi_n^s><psi_n^s| with
/// |psi_n^s> = (|n, n-1> + s |n-1, n>)/sqrt(2).
pub fn heralded_twin_mixture(
    lambda: &[f64],
    sign: HeraldSign,
    cutoff: ModeCutoff,
) -> Result<TwoModeDensity> {
    let mut mat = CsrMatrix::zeros(cutoff.dim());
    for (n, &w) in lambda.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        if n == 0 {
            return Err(Error::InvalidParameter(
                "heralded mixture weight on n = 0 is unphysical".into(),
            ));
        }
        let psi = subtracted_twin_pure(n, sign, cutoff)?;
        mat = mat.add(&outer_product(psi.amplitudes()).scale(Complex64::new(w, 0.0)));
    }
    TwoModeDensity::from_matrix(cutoff, mat).normalized()
}
