//! Passive linear optics on the truncated two-mode space: beam splitters,
//! phase shifters, the composed Mach-Zehnder interferometer, and
//! amplitude-damping loss channels.

use crate::error::{Error, Result};
use crate::fock::{
    schwinger, Mode, ModeCutoff, SchwingerOp, State, TwoModeDensity, TwoModeOperator,
    TwoModePureState,
};
use crate::linalg::{expm_dense, CsrMatrix};
use ndarray::Array2;
use num_complex::Complex64;

/// Mixing angle of a beam splitter, with r = sin(theta), t = cos(theta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterSpec {
    theta: f64,
}

impl BeamSplitterSpec {
    pub fn new(theta: f64) -> Self {
        BeamSplitterSpec { theta }
    }

    /// Balanced beam splitter (theta = pi/4).
    pub fn balanced() -> Self {
        BeamSplitterSpec {
            theta: std::f64::consts::FRAC_PI_4,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn reflectance(&self) -> f64 {
        self.theta.sin()
    }

    pub fn transmittance(&self) -> f64 {
        self.theta.cos()
    }
}

/// Amplitude transmissions of the two loss beam splitters placed before
/// detection, with the derived c coefficients used by the lossy phase-error
/// formulas. Derived quantities are recomputed on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    t1: f64,
    t2: f64,
}

impl LossSpec {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        for t in [t1, t2] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::TransmissionOutOfRange { t });
            }
        }
        Ok(LossSpec { t1, t2 })
    }

    pub fn lossless() -> Self {
        LossSpec { t1: 1.0, t2: 1.0 }
    }

    pub fn symmetric(t: f64) -> Result<Self> {
        LossSpec::new(t, t)
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn r1(&self) -> f64 {
        (1.0 - self.t1 * self.t1).sqrt()
    }

    pub fn r2(&self) -> f64 {
        (1.0 - self.t2 * self.t2).sqrt()
    }

    /// t1^2 + t2^2
    pub fn c1(&self) -> f64 {
        self.t1 * self.t1 + self.t2 * self.t2
    }

    /// t1 t2
    pub fn c2(&self) -> f64 {
        self.t1 * self.t2
    }

    /// t1 r1^2 + t2 r2^2
    pub fn c3(&self) -> f64 {
        self.t1 * (1.0 - self.t1 * self.t1) + self.t2 * (1.0 - self.t2 * self.t2)
    }

    /// t1^2 - t2^2
    pub fn c4(&self) -> f64 {
        self.t1 * self.t1 - self.t2 * self.t2
    }
}

/// Total-photon-number sectors of the truncated two-mode space. Each sector
/// N carries the basis {(k, N-k)} restricted to the per-mode cutoff; sectors
/// with N <= n_max are complete SU(2) multiplets.
fn sector_indices(total: usize, cutoff: ModeCutoff) -> Vec<(usize, usize)> {
    let n_max = cutoff.n_max();
    let lo = total.saturating_sub(n_max);
    let hi = total.min(n_max);
    (lo..=hi).map(|k| (k, total - k)).collect()
}

/// Exact beam splitter unitary exp[i theta (a'b + b'a)], built sector by
/// sector: the generator conserves total photon number, so the matrix
/// exponential reduces to small dense blocks.
pub fn beam_splitter_unitary(spec: BeamSplitterSpec, cutoff: ModeCutoff) -> TwoModeOperator {
    let theta = spec.theta();
    let mut triplets = Vec::new();
    for total in 0..=(2 * cutoff.n_max()) {
        let basis = sector_indices(total, cutoff);
        let k = basis.len();
        let mut gen = Array2::<Complex64>::zeros((k, k));
        for (i, &(na, nb)) in basis.iter().enumerate() {
            // a^dagger b: (na, nb) -> (na+1, nb-1)
            if nb >= 1 && na + 1 <= cutoff.n_max() {
                let amp = (((na + 1) * nb) as f64).sqrt();
                let j = i + 1; // basis is ordered by increasing na
                debug_assert_eq!(basis[j], (na + 1, nb - 1));
                gen[(j, i)] += Complex64::new(0.0, theta * amp);
                gen[(i, j)] += Complex64::new(0.0, theta * amp);
            }
        }
        let block = expm_dense(&gen);
        for (i, &(na, nb)) in basis.iter().enumerate() {
            for (j, &(ma, mb)) in basis.iter().enumerate() {
                let v = block[(i, j)];
                if v.norm() > 0.0 {
                    triplets.push((cutoff.index(na, nb), cutoff.index(ma, mb), v));
                }
            }
        }
    }
    TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
}

/// First-order (linearized) beam splitter 1 + i theta (a'b + b'a).
/// Not unitary; deviation from the exact unitary is O(theta^2).
pub fn weak_bs_first_order(spec: BeamSplitterSpec, cutoff: ModeCutoff) -> TwoModeOperator {
    let theta = spec.theta();
    let jx = schwinger(SchwingerOp::Jx, cutoff);
    // a'b + b'a = 2 Jx
    TwoModeOperator::identity(cutoff).add(&jx.scale(Complex64::new(0.0, 2.0 * theta)))
}

/// Diagonal unitary exp(i phi n_mode).
pub fn phase_shifter(phi: f64, mode: Mode, cutoff: ModeCutoff) -> TwoModeOperator {
    let triplets = (0..cutoff.dim())
        .map(|i| {
            let (na, nb) = cutoff.unindex(i);
            let n = match mode {
                Mode::A => na,
                Mode::B => nb,
            } as f64;
            (i, i, Complex64::new(0.0, phi * n).exp())
        })
        .collect();
    TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
}

/// Diagonal unitary exp(i phi Jz); multiplies |n_a, n_b> by
/// exp(i phi (n_a - n_b)/2).
pub fn phase_rotation_jz(phi: f64, cutoff: ModeCutoff) -> TwoModeOperator {
    let triplets = (0..cutoff.dim())
        .map(|i| {
            let (na, nb) = cutoff.unindex(i);
            let m = (na as f64 - nb as f64) / 2.0;
            (i, i, Complex64::new(0.0, phi * m).exp())
        })
        .collect();
    TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
}

/// The Schrodinger-picture MZI unitary
/// U(phi) = exp(i pi/2 Jx) exp(-i phi Jz) exp(-i pi/2 Jx),
/// fixed so that conjugating Jz by U reproduces
/// Jz_out = -sin(phi) Jx + cos(phi) Jz.
pub fn mzi_unitary(phi: f64, cutoff: ModeCutoff) -> TwoModeOperator {
    let half_in = beam_splitter_unitary(BeamSplitterSpec::new(-std::f64::consts::FRAC_PI_4), cutoff);
    let half_out = beam_splitter_unitary(BeamSplitterSpec::balanced(), cutoff);
    let phase = phase_rotation_jz(-phi, cutoff);
    half_out.compose(&phase).compose(&half_in)
}

/// Applies the MZI to a state in the Schrodinger picture.
pub fn mzi_schrodinger(state: &State, phi: f64) -> Result<State> {
    let cutoff = state.cutoff();
    let u = mzi_unitary(phi, cutoff);
    match state {
        State::Pure(psi) => {
            let out = u.apply_vec(psi.amplitudes());
            Ok(State::Pure(TwoModePureState::normalized(cutoff, out)?))
        }
        State::Mixed(rho) => {
            let m = u.matrix().matmul(rho.matrix()).matmul(&u.matrix().adjoint());
            Ok(State::Mixed(TwoModeDensity::from_matrix(cutoff, m)))
        }
    }
}

/// Heisenberg-picture output observable Jz_out = -sin(phi) Jx + cos(phi) Jz.
pub fn mzi_jz_out(phi: f64, cutoff: ModeCutoff) -> TwoModeOperator {
    let jx = schwinger(SchwingerOp::Jx, cutoff);
    let jz = schwinger(SchwingerOp::Jz, cutoff);
    jx.scale(Complex64::new(-phi.sin(), 0.0))
        .add(&jz.scale(Complex64::new(phi.cos(), 0.0)))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0f64; n + 1];
    for k in 1..=n {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    lf
}

/// Kraus operators of the amplitude-damping (photon loss) channel with
/// amplitude transmission t, acting on one mode. Element k removes k photons:
/// K_k |n> = sqrt(C(n,k)) t^(n-k) r^k |n-k> with r = sqrt(1 - t^2).
pub fn loss_kraus_ops(t: f64, mode: Mode, cutoff: ModeCutoff) -> Result<Vec<TwoModeOperator>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TransmissionOutOfRange { t });
    }
    let d = cutoff.mode_dim();
    let lf = ln_factorials(cutoff.n_max());
    let r_sq = 1.0 - t * t;
    let mut ops = Vec::new();
    for k in 0..d {
        if k > 0 && r_sq == 0.0 {
            break;
        }
        let mut triplets = Vec::new();
        for n in k..d {
            // log-space to stay finite for large n
            let ln_binom = lf[n] - lf[k] - lf[n - k];
            let mut ln_amp = 0.5 * ln_binom;
            if k > 0 {
                ln_amp += 0.5 * (k as f64) * r_sq.ln();
            }
            if n > k {
                if t == 0.0 {
                    continue;
                }
                ln_amp += ((n - k) as f64) * t.ln();
            }
            let amp = ln_amp.exp();
            if amp == 0.0 {
                continue;
            }
            // embed on the chosen mode, identity on the other
            for other in 0..d {
                let (from, to) = match mode {
                    Mode::A => (cutoff.index(n, other), cutoff.index(n - k, other)),
                    Mode::B => (cutoff.index(other, n), cutoff.index(other, n - k)),
                };
                triplets.push((to, from, Complex64::new(amp, 0.0)));
            }
        }
        if !triplets.is_empty() || k == 0 {
            ops.push(TwoModeOperator::from_matrix(
                cutoff,
                CsrMatrix::from_triplets(cutoff.dim(), triplets),
            ));
        }
    }
    Ok(ops)
}

/// Amplitude-damping channel on one mode; pure inputs are promoted to
/// density operators.
pub fn loss_channel(t: f64, mode: Mode, state: &State) -> Result<TwoModeDensity> {
    let cutoff = state.cutoff();
    let rho = state.to_density();
    let kraus = loss_kraus_ops(t, mode, cutoff)?;
    let mut out = CsrMatrix::zeros(cutoff.dim());
    for k in &kraus {
        let term = k
            .matrix()
            .matmul(rho.matrix())
            .matmul(&k.matrix().adjoint());
        out = out.add(&term);
    }
    Ok(TwoModeDensity::from_matrix(cutoff, out))
}

/// Applies losses (t1 on mode a, t2 on mode b).
pub fn apply_losses(loss: &LossSpec, state: &State) -> Result<TwoModeDensity> {
    let after_a = loss_channel(loss.t1(), Mode::A, state)?;
    loss_channel(loss.t2(), Mode::B, &State::Mixed(after_a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        basis_state, expectation_real, number_op, total_number, TwoModePureState,
    };
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent oracle: full dense Taylor exponential of the beam
    /// splitter generator, no sector decomposition.
    fn bs_unitary_dense_oracle(theta: f64, cutoff: ModeCutoff) -> Array2<Complex64> {
        let jx = schwinger(SchwingerOp::Jx, cutoff);
        let gen = jx.scale(c(0.0, 2.0 * theta));
        expm_dense(&gen.matrix().to_dense())
    }

    #[test]
    fn bs_theta_zero_is_identity() {
        let cut = ModeCutoff::new(4);
        let u = beam_splitter_unitary(BeamSplitterSpec::new(0.0), cut);
        assert!(max_abs_diff(u.matrix(), &CsrMatrix::identity(cut.dim())) < 1e-14);
        let lin = weak_bs_first_order(BeamSplitterSpec::new(0.0), cut);
        assert!(max_abs_diff(lin.matrix(), &CsrMatrix::identity(cut.dim())) < 1e-14);
    }

    #[test]
    fn bs_matches_dense_exponential_oracle() {
        let cut = ModeCutoff::new(5);
        for theta in [0.1, 0.7, std::f64::consts::FRAC_PI_4] {
            let u = beam_splitter_unitary(BeamSplitterSpec::new(theta), cut);
            let oracle = bs_unitary_dense_oracle(theta, cut);
            let diff = (&u.matrix().to_dense() - &oracle)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "theta={theta}: diff {diff}");
        }
    }

    #[test]
    fn hong_ou_mandel_coincidence_vanishes() {
        let cut = ModeCutoff::new(4);
        let u = beam_splitter_unitary(BeamSplitterSpec::balanced(), cut);
        let one_one = basis_state(1, 1, cut).unwrap();
        let out = u.apply_vec(one_one.amplitudes());
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        assert!((out[cut.index(2, 0)] - c(0.0, inv_sqrt2)).norm() < 1e-12);
        assert!((out[cut.index(0, 2)] - c(0.0, inv_sqrt2)).norm() < 1e-12);
        assert!(out[cut.index(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn weak_tap_first_order_amplitude() {
        let cut = ModeCutoff::new(6);
        let n = 4usize;
        for theta in [0.05, 0.01] {
            let u = beam_splitter_unitary(BeamSplitterSpec::new(theta), cut);
            let s = basis_state(n, 0, cut).unwrap();
            let out = u.apply_vec(s.amplitudes());
            let amp = out[cut.index(n - 1, 1)];
            let first_order = c(0.0, theta * (n as f64).sqrt());
            assert!(
                (amp - first_order).norm() < 2.0 * theta.powi(3) * (n as f64).powf(1.5),
                "theta={theta}: residual {}",
                (amp - first_order).norm()
            );
        }
    }

    #[test]
    fn linearized_bs_error_is_quadratic() {
        let cut = ModeCutoff::new(4);
        let mut errs = Vec::new();
        for theta in [0.1, 0.05, 0.025] {
            let exact = beam_splitter_unitary(BeamSplitterSpec::new(theta), cut);
            let lin = weak_bs_first_order(BeamSplitterSpec::new(theta), cut);
            errs.push(max_abs_diff(exact.matrix(), lin.matrix()));
        }
        // halving theta should quarter the error
        assert!((errs[0] / errs[1] - 4.0).abs() < 0.4);
        assert!((errs[1] / errs[2] - 4.0).abs() < 0.4);
        let k = errs[0] / 0.1f64.powi(2);
        for (e, th) in errs.iter().zip([0.1, 0.05, 0.025]) {
            assert!(*e <= 1.1 * k * th * th);
        }
    }

    #[test]
    fn bs_unitary_on_complete_sectors() {
        let cut = ModeCutoff::new(6);
        let u = beam_splitter_unitary(BeamSplitterSpec::new(0.9), cut);
        let prod = u.adjoint().compose(&u);
        for (r, col, v) in prod.matrix().iter() {
            let (na, nb) = cut.unindex(r);
            let (ma, mb) = cut.unindex(col);
            if na + nb <= cut.n_max() && ma + mb <= cut.n_max() {
                let expect = if r == col { 1.0 } else { 0.0 };
                assert!((v - c(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn phase_shifter_diagonal_action() {
        let cut = ModeCutoff::new(4);
        let phi = 0.7;
        let u = phase_shifter(phi, Mode::A, cut);
        let s = basis_state(3, 1, cut).unwrap();
        let out = u.apply_vec(s.amplitudes());
        assert!((out[cut.index(3, 1)] - c(0.0, 3.0 * phi).exp()).norm() < 1e-14);

        let ujz = phase_rotation_jz(phi, cut);
        let out = ujz.apply_vec(s.amplitudes());
        assert!((out[cut.index(3, 1)] - c(0.0, phi).exp()).norm() < 1e-14);

        let id = phase_shifter(0.0, Mode::B, cut);
        assert!(max_abs_diff(id.matrix(), &CsrMatrix::identity(cut.dim())) < 1e-14);
    }

    #[test]
    fn energy_conservation() {
        let cut = ModeCutoff::new(8);
        let mut amps = vec![c(0.0, 0.0); cut.dim()];
        amps[cut.index(2, 1)] = c(0.7, 0.1);
        amps[cut.index(3, 0)] = c(0.2, -0.5);
        amps[cut.index(0, 2)] = c(0.4, 0.0);
        let s = TwoModePureState::normalized(cut, amps).unwrap();
        let nt = total_number(cut);
        let before = expectation_real(&s.clone().into(), &nt).unwrap();
        for u in [
            beam_splitter_unitary(BeamSplitterSpec::new(0.4), cut),
            phase_shifter(1.2, Mode::B, cut),
        ] {
            let out = TwoModePureState::normalized(cut, u.apply_vec(s.amplitudes())).unwrap();
            let after = expectation_real(&out.into(), &nt).unwrap();
            assert!((before - after).abs() < 1e-12);
        }
    }

    #[test]
    fn mzi_twin_fock_fringe_vanishes() {
        let n = 3usize;
        let cut = ModeCutoff::new(2 * n);
        let s: State = basis_state(n, n, cut).unwrap().into();
        let jz = schwinger(SchwingerOp::Jz, cut);
        for phi in [0.0, 0.3, 1.0, 2.5] {
            let out = mzi_schrodinger(&s, phi).unwrap();
            assert!(expectation_real(&out, &jz).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn mzi_subtracted_twin_fringe() {
        let n = 4usize;
        let cut = ModeCutoff::new(2 * n);
        let mut amps = vec![c(0.0, 0.0); cut.dim()];
        amps[cut.index(n, n - 1)] = c(1.0, 0.0);
        amps[cut.index(n - 1, n)] = c(1.0, 0.0);
        let s: State = TwoModePureState::normalized(cut, amps).unwrap().into();
        let jz = schwinger(SchwingerOp::Jz, cut);
        for phi in [0.0, 0.3, 1.0] {
            let out = mzi_schrodinger(&s, phi).unwrap();
            let fringe = expectation_real(&out, &jz).unwrap();
            assert!(
                (fringe + (n as f64 / 2.0) * phi.sin()).abs() < 1e-11,
                "phi={phi}: fringe {fringe}"
            );
        }
    }

    #[test]
    fn mzi_heisenberg_schrodinger_agreement() {
        let cut = ModeCutoff::new(8);
        let mut amps = vec![c(0.0, 0.0); cut.dim()];
        // support restricted to total photon number <= n_max
        amps[cut.index(2, 3)] = c(0.3, 0.4);
        amps[cut.index(4, 1)] = c(-0.2, 0.6);
        amps[cut.index(0, 0)] = c(0.1, 0.0);
        let s: State = TwoModePureState::normalized(cut, amps).unwrap().into();
        let jz = schwinger(SchwingerOp::Jz, cut);
        for phi in [0.0, 0.5, 1.3, 3.0] {
            let heis = expectation_real(&s, &mzi_jz_out(phi, cut)).unwrap();
            let out = mzi_schrodinger(&s, phi).unwrap();
            let schr = expectation_real(&out, &jz).unwrap();
            assert!((heis - schr).abs() < 1e-9, "phi={phi}: {heis} vs {schr}");
        }
    }

    #[test]
    fn jz_out_special_angles() {
        let cut = ModeCutoff::new(5);
        let jz = schwinger(SchwingerOp::Jz, cut);
        let jx = schwinger(SchwingerOp::Jx, cut);
        assert!(max_abs_diff(mzi_jz_out(0.0, cut).matrix(), jz.matrix()) < 1e-14);
        let at_half_pi = mzi_jz_out(std::f64::consts::FRAC_PI_2, cut);
        assert!(max_abs_diff(at_half_pi.matrix(), jx.scale(c(-1.0, 0.0)).matrix()) < 1e-14);
    }

    #[test]
    fn jz_out_square_expansion() {
        let cut = ModeCutoff::new(6);
        let phi = 0.8f64;
        let jz = schwinger(SchwingerOp::Jz, cut);
        let jx = schwinger(SchwingerOp::Jx, cut);
        let out = mzi_jz_out(phi, cut);
        let out_sq = out.compose(&out);
        let (s, co) = (phi.sin(), phi.cos());
        let cross = jx.compose(&jz).add(&jz.compose(&jx));
        let expansion = jx
            .compose(&jx)
            .scale(c(s * s, 0.0))
            .add(&jz.compose(&jz).scale(c(co * co, 0.0)))
            .add(&cross.scale(c(-s * co, 0.0)));
        assert!(max_abs_diff(out_sq.matrix(), expansion.matrix()) < 1e-12);
    }

    #[test]
    fn loss_identity_at_full_transmission() {
        let cut = ModeCutoff::new(4);
        let s: State = basis_state(2, 1, cut).unwrap().into();
        let rho = loss_channel(1.0, Mode::A, &s).unwrap();
        assert!(max_abs_diff(rho.matrix(), s.to_density().matrix()) < 1e-14);
    }

    #[test]
    fn loss_single_photon_two_term_kraus() {
        let cut = ModeCutoff::new(2);
        let t = 0.8f64;
        let s: State = basis_state(1, 0, cut).unwrap().into();
        let rho = loss_channel(t, Mode::A, &s).unwrap();
        assert!((rho.entry(1, 0, 1, 0).re - t * t).abs() < 1e-14);
        assert!((rho.entry(0, 0, 0, 0).re - (1.0 - t * t)).abs() < 1e-14);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loss_scales_mean_photon_number() {
        let cut = ModeCutoff::new(6);
        let t = 0.75f64;
        let mut amps = vec![c(0.0, 0.0); cut.dim()];
        amps[cut.index(4, 2)] = c(0.5, 0.5);
        amps[cut.index(2, 0)] = c(0.3, -0.1);
        amps[cut.index(1, 3)] = c(0.0, 0.8);
        let s: State = TwoModePureState::normalized(cut, amps).unwrap().into();
        let na = number_op(Mode::A, cut);
        let before = expectation_real(&s, &na).unwrap();
        let rho = loss_channel(t, Mode::A, &s).unwrap();
        let after = expectation_real(&State::Mixed(rho), &na).unwrap();
        assert!((after - t * t * before).abs() < 1e-12);
    }

    #[test]
    fn kraus_completeness() {
        let cut = ModeCutoff::new(6);
        for t in [0.0, 0.3, 0.9, 1.0] {
            let kraus = loss_kraus_ops(t, Mode::B, cut).unwrap();
            let mut sum = CsrMatrix::zeros(cut.dim());
            for k in &kraus {
                sum = sum.add(&k.matrix().adjoint().matmul(k.matrix()));
            }
            assert!(
                max_abs_diff(&sum, &CsrMatrix::identity(cut.dim())) < 1e-10,
                "completeness fails at t={t}"
            );
        }
    }

    #[test]
    fn loss_semigroup_property() {
        let cut = ModeCutoff::new(5);
        let (t, tp) = (0.9f64, 0.8f64);
        let mut amps = vec![c(0.0, 0.0); cut.dim()];
        amps[cut.index(3, 1)] = c(0.6, 0.2);
        amps[cut.index(1, 2)] = c(-0.3, 0.7);
        let s: State = TwoModePureState::normalized(cut, amps).unwrap().into();
        let once = loss_channel(t * tp, Mode::A, &s).unwrap();
        let twice = loss_channel(
            tp,
            Mode::A,
            &State::Mixed(loss_channel(t, Mode::A, &s).unwrap()),
        )
        .unwrap();
        assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-10);
    }
}
