//! Phase estimation: fringe signals, error-propagation phase errors, the
//! closed-form expressions for subtracted twin beams with and without
//! losses, quantum Fisher information, and the spin-sector mixture results.

use crate::error::{Error, Result};
use crate::fock::{
    expectation_real, schwinger, second_moment, SchwingerOp, State, TwoModeOperator,
};
use crate::optics::{mzi_jz_out, LossSpec};
use crate::subtraction::MixtureCoefficients;

/// Fringe and error-propagation data at a single interferometer phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub phi: f64,
    pub mean_jz: f64,
    pub var_jz: f64,
    /// +infinity at stationary fringe points.
    pub delta_phi: f64,
}

/// Fringe signal <Jz_out(phi)> for the given input state.
pub fn fringe(state: &State, phi: f64) -> Result<f64> {
    expectation_real(state, &mzi_jz_out(phi, state.cutoff()))
}

/// Analytic fringe slope d<Jz_out>/dphi = -cos(phi)<Jx> - sin(phi)<Jz>.
pub fn fringe_slope(state: &State, phi: f64) -> Result<f64> {
    let cutoff = state.cutoff();
    let jx = expectation_real(state, &schwinger(SchwingerOp::Jx, cutoff))?;
    let jz = expectation_real(state, &schwinger(SchwingerOp::Jz, cutoff))?;
    Ok(-phi.cos() * jx - phi.sin() * jz)
}

/// Central finite-difference fringe slope with step h (cross-check for
/// `fringe_slope`).
pub fn fringe_slope_fd(state: &State, phi: f64, h: f64) -> Result<f64> {
    Ok((fringe(state, phi + h)? - fringe(state, phi - h)?) / (2.0 * h))
}

/// Moments and error-propagation phase error at one phase. The variance is
/// clamped at zero against roundoff; a vanishing slope yields the +infinity
/// sentinel rather than an error so that sweeps stay total.
pub fn phase_point(state: &State, phi: f64) -> Result<PhasePoint> {
    let op = mzi_jz_out(phi, state.cutoff());
    let mean = expectation_real(state, &op)?;
    let second = second_moment(state, &op)?;
    let var = (second - mean * mean).max(0.0);
    let slope = fringe_slope(state, phi)?;
    let delta_phi = if slope.abs() < 1e-300 {
        f64::INFINITY
    } else {
        var.sqrt() / slope.abs()
    };
    Ok(PhasePoint {
        phi,
        mean_jz: mean,
        var_jz: var,
        delta_phi,
    })
}

/// Error-propagation phase error sqrt(Var Jz_out)/|d<Jz_out>/dphi|.
pub fn phase_error_numeric(state: &State, phi: f64) -> Result<f64> {
    Ok(phase_point(state, phi)?.delta_phi)
}

/// Closed-form phase error for the subtracted twin state of size n
/// (total photon number 2n - 1, spin j = n - 1/2):
/// sqrt(j(j+1)sin^2 + cos^2 - 3/4 sin^2) / (cos(phi) sqrt(j(j+1) + 1/4)).
pub fn analytic_delta_phi_pure(n: usize, phi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "subtracted twin state requires n >= 1".into(),
        ));
    }
    let c = phi.cos();
    if c.abs() < 1e-12 {
        return Err(Error::PhasePole { phi });
    }
    let j = n as f64 - 0.5;
    let jj = j * (j + 1.0);
    let s2 = phi.sin().powi(2);
    Ok((jj * s2 + c * c - 0.75 * s2).sqrt() / (c * (jj + 0.25).sqrt()))
}

/// The published closed-form detection moments for the subtracted twin
/// state with loss beam splitters (t1, t2) before detection. The two
/// `jz_sq` fields are the two consecutive published expressions, which are
/// not equal to each other; `lossy_moments_exact` gives the channel-exact
/// values for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossyMoments {
    pub mean_jz: f64,
    pub jz_sq_line1: f64,
    pub jz_sq_line2: f64,
    pub cross_term: f64,
}

/// Published lossy moment formulas (verbatim).
pub fn lossy_moments(n: usize, loss: &LossSpec, phi: f64) -> LossyMoments {
    let nf = n as f64;
    let (t1, t2) = (loss.t1(), loss.t2());
    let (s, c) = (phi.sin(), phi.cos());
    let c4 = loss.c4();
    let r1_sq = 1.0 - t1 * t1;
    let r2_sq = 1.0 - t2 * t2;
    LossyMoments {
        mean_jz: -0.5 * (nf * t1 * t2 * s + (nf - 0.5) * c4 * c),
        jz_sq_line1: 0.25
            * (nf * (nf - 1.0) * c4 * c4
                + 0.5 * (t1.powi(4) + t2.powi(4))
                + 0.5 * nf * (t1 * r1_sq + t2 * r2_sq)),
        jz_sq_line2: 0.25 * ((nf - 0.5) * loss.c1() + 2.0 * t1 * t1 * t2 * t2 * nf * (nf - 1.0)),
        cross_term: 0.5
            * nf
            * ((2.0 * nf - 1.0) * t1 * t2 * c4 + t1 * t2 * (r1_sq - r2_sq)),
    }
}

/// Channel-exact first and second Jz moments after the interferometer and
/// the amplitude-damping losses, for the subtracted twin input. Derived
/// from the fixed total photon number N = 2n - 1 before loss and the
/// moment maps of the damping channel:
/// <n>    -> t^2 <n>
/// <n^2>  -> t^4 <n^2> + t^2 (1 - t^2) <n>
/// <na*nb>-> t1^2 t2^2 <na*nb>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactLossyMoments {
    pub mean_jz: f64,
    pub jz_sq: f64,
}

pub fn lossy_moments_exact(n: usize, loss: &LossSpec, phi: f64) -> ExactLossyMoments {
    let nf = n as f64;
    let (t1, t2) = (loss.t1(), loss.t2());
    let (t1_sq, t2_sq) = (t1 * t1, t2 * t2);
    let big_n = 2.0 * nf - 1.0;
    let j = nf - 0.5;
    let jj = j * (j + 1.0);
    // pre-loss output moments of the ideal interferometer
    let jz_mean = -(nf / 2.0) * phi.sin();
    let jz_sq = (jj - 0.25) * phi.sin().powi(2) / 2.0 + 0.25 * phi.cos().powi(2);
    let na_mean = big_n / 2.0 + jz_mean;
    let nb_mean = big_n / 2.0 - jz_mean;
    let na_sq = big_n * big_n / 4.0 + big_n * jz_mean + jz_sq;
    let nb_sq = big_n * big_n / 4.0 - big_n * jz_mean + jz_sq;
    let na_nb = big_n * big_n / 4.0 - jz_sq;
    // push through the damping channels
    let na_mean_l = t1_sq * na_mean;
    let nb_mean_l = t2_sq * nb_mean;
    let na_sq_l = t1_sq * t1_sq * na_sq + t1_sq * (1.0 - t1_sq) * na_mean;
    let nb_sq_l = t2_sq * t2_sq * nb_sq + t2_sq * (1.0 - t2_sq) * nb_mean;
    let na_nb_l = t1_sq * t2_sq * na_nb;
    ExactLossyMoments {
        mean_jz: 0.5 * (na_mean_l - nb_mean_l),
        jz_sq: 0.25 * (na_sq_l - 2.0 * na_nb_l + nb_sq_l),
    }
}

/// Published closed-form lossy phase error in the c1..c4 coefficients
/// (verbatim); equals error propagation of the published moments at
/// phi = 0 but deviates from it (and from the exact channel) away from
/// phi = 0.
pub fn lossy_delta_phi(n: usize, loss: &LossSpec, phi: f64) -> Result<f64> {
    let nf = n as f64;
    let (c1, c2, c3, c4) = (loss.c1(), loss.c2(), loss.c3(), loss.c4());
    let (s, c) = (phi.sin(), phi.cos());
    let den = nf * c2 * c + (nf - 0.5) * c4 * s;
    if den.abs() < 1e-300 {
        return Err(Error::StationaryFringe { phi });
    }
    let num = ((c1 * c1 / 4.0 + 0.5 * c3 * nf) * c * c
        + (c1 * (nf - 0.5) + nf * c2 * (nf * c2 - 4.0)) * s * s)
        .max(0.0)
        .sqrt();
    Ok(num / den.abs())
}

/// Phase error by error propagation of the channel-exact lossy moments.
pub fn lossy_delta_phi_exact(n: usize, loss: &LossSpec, phi: f64) -> Result<f64> {
    let m = lossy_moments_exact(n, loss, phi);
    // d<Jz>/dphi: only the pre-loss fringe depends on phi
    let slope = -0.25 * loss.c1() * (n as f64) * phi.cos();
    if slope.abs() < 1e-300 {
        return Err(Error::StationaryFringe { phi });
    }
    let var = (m.jz_sq - m.mean_jz * m.mean_jz).max(0.0);
    Ok(var.sqrt() / slope.abs())
}

/// Small-phi symmetric-loss approximation
/// delta_phi ~ (1/(t n)) sqrt(1 + n (1 - t^2)/t).
pub fn lossy_delta_phi_small_phi(n: usize, t: f64) -> Result<f64> {
    if !(0.0 < t && t <= 1.0) {
        return Err(Error::TransmissionOutOfRange { t });
    }
    let nf = n as f64;
    Ok((1.0 + nf * (1.0 - t * t) / t).sqrt() / (t * nf))
}

/// Root t* in (0, 1] of the loss tipping equation 1 = n (1 - t^2)/t,
/// found by bisection to 1e-12 residual in t.
pub fn tipping_transmission(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "tipping point requires n >= 1".into(),
        ));
    }
    let nf = n as f64;
    let f = |t: f64| nf * (1.0 - t * t) / t - 1.0;
    let (mut lo, mut hi) = (1e-9, 1.0);
    // f(lo) > 0 (loss term dominates), f(1) = -1 < 0
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Quantum Fisher information 4 Var(G) of a pure state under generator G.
pub fn qfi_pure(state: &State, generator: &TwoModeOperator) -> Result<f64> {
    match state {
        State::Pure(_) => {}
        State::Mixed(_) => return Err(Error::MixedStateQfi),
    }
    let mean = expectation_real(state, generator)?;
    let second = second_moment(state, generator)?;
    Ok(4.0 * (second - mean * mean).max(0.0))
}

/// Quantum Cramer-Rao bound 1/sqrt(QFI).
pub fn qcrb(qfi: f64) -> f64 {
    1.0 / qfi.sqrt()
}

fn mixture_sums(coeffs: &MixtureCoefficients) -> (f64, f64) {
    let mut mean_n = 0.0; // sum_j c_jj sqrt(j(j+1) + 1/4) = sum_j c_jj (j + 1/2)
    let mut curvature = 0.0; // sum_j c_jj (j(j+1) - 1/4)
    for (j, c) in coeffs.diagonal() {
        mean_n += c * (j + 0.5);
        curvature += c * (j * (j + 1.0) - 0.25);
    }
    (mean_n, curvature)
}

/// Phase error of the heralded spin-sector mixture:
/// sqrt(C^2/4 + (S^2/2) sum_j c_jj (j(j+1) - 1/4)
///      - (S^2/4) (sum_j c_jj (j+1/2))^2)
/// / ((C/2) sum_j c_jj (j+1/2)).
pub fn mixture_delta_phi(coeffs: &MixtureCoefficients, phi: f64) -> Result<f64> {
    let (mean_n, curvature) = mixture_sums(coeffs);
    let c = phi.cos();
    let den = 0.5 * c * mean_n;
    if den.abs() < 1e-300 {
        return Err(Error::StationaryFringe { phi });
    }
    let s2 = phi.sin().powi(2);
    let var = (0.25 * c * c + 0.5 * s2 * curvature - 0.25 * s2 * mean_n * mean_n).max(0.0);
    Ok(var.sqrt() / den.abs())
}

/// Minimum (phi = 0) phase error of the heralded mixture,
/// 1 / sum_j c_jj (j + 1/2) = 1/<N>.
pub fn mixture_delta_phi_min(coeffs: &MixtureCoefficients) -> Result<f64> {
    let (mean_n, _) = mixture_sums(coeffs);
    if mean_n < 1e-300 {
        return Err(Error::InvalidParameter(
            "mixture has zero mean photon number".into(),
        ));
    }
    Ok(1.0 / mean_n)
}

/// Mean total photon number <N> = sum_j c_jj (j + 1/2) of the heralded
/// mixture.
pub fn mixture_mean_photons(coeffs: &MixtureCoefficients) -> f64 {
    mixture_sums(coeffs).0
}
