//! Truncated two-mode Fock space: states, ladder and Schwinger operators,
//! expectations, and the (j, m) dictionary.
//!
//! Basis ordering is row-major over (n_a, n_b): index = n_a * (n_max + 1) + n_b.
//! Both modes share the same cutoff. Operators are band sparse in this basis.

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, CsrMatrix};
use ndarray::Array2;
use num_complex::Complex64;

/// Global normalization tolerance; overridable per call where it matters.
pub const NORM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest photon number retained per mode. Hilbert dimension per mode is
/// `n_max + 1`; the two-mode dimension is `(n_max + 1)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeCutoff {
    n_max: usize,
}

impl ModeCutoff {
    pub fn new(n_max: usize) -> Self {
        ModeCutoff { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn mode_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    #[inline]
    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * self.mode_dim() + n_b
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize) {
        (idx / self.mode_dim(), idx % self.mode_dim())
    }

    pub fn check(&self, mode: char, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(Error::PhotonOutOfRange {
                mode,
                n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    pub fn ensure_match(&self, other: &ModeCutoff) -> Result<()> {
        if self.n_max != other.n_max {
            Err(Error::CutoffMismatch {
                left: self.n_max,
                right: other.n_max,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    pub fn label(&self) -> char {
        match self {
            Mode::A => 'a',
            Mode::B => 'b',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderDirection {
    Lower,
    Raise,
}

/// Angular momentum labels stored as doubled integers so half-integers stay
/// exact: j = two_j / 2, m = two_m / 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JmLabel {
    pub two_j: i64,
    pub two_m: i64,
}

impl JmLabel {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    /// j(j+1), exact in the doubled representation.
    pub fn casimir(&self) -> f64 {
        (self.two_j * (self.two_j + 2)) as f64 / 4.0
    }
}

/// (n_a, n_b) -> (j, m) with j = (n_a + n_b)/2 and m = (n_a - n_b)/2.
pub fn jm_index(n_a: usize, n_b: usize) -> JmLabel {
    JmLabel {
        two_j: (n_a + n_b) as i64,
        two_m: n_a as i64 - n_b as i64,
    }
}

/// Normalized pure state on the truncated two-mode space.
#[derive(Debug, Clone)]
pub struct TwoModePureState {
    cutoff: ModeCutoff,
    amps: Vec<Complex64>,
}

impl TwoModePureState {
    /// Wraps an amplitude vector, requiring unit norm within `norm_tol`.
    pub fn from_amplitudes(
        cutoff: ModeCutoff,
        amps: Vec<Complex64>,
        norm_tol: f64,
    ) -> Result<Self> {
        assert_eq!(amps.len(), cutoff.dim());
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > norm_tol {
            return Err(Error::Unnormalizable { norm_sq });
        }
        Ok(TwoModePureState { cutoff, amps })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(cutoff: ModeCutoff, amps: Vec<Complex64>) -> Result<Self> {
        assert_eq!(amps.len(), cutoff.dim());
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-300 {
            return Err(Error::Unnormalizable { norm_sq });
        }
        let inv = Complex64::new(1.0 / norm_sq.sqrt(), 0.0);
        Ok(TwoModePureState {
            cutoff,
            amps: amps.into_iter().map(|a| a * inv).collect(),
        })
    }

    pub fn cutoff(&self) -> ModeCutoff {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.amps[self.cutoff.index(n_a, n_b)]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &TwoModePureState) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    pub fn to_density(&self) -> TwoModeDensity {
        TwoModeDensity {
            cutoff: self.cutoff,
            mat: outer_product(&self.amps),
        }
    }

    /// Mean total photon number, computed from the amplitude support.
    pub fn mean_total_photons(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let (na, nb) = self.cutoff.unindex(i);
                (na + nb) as f64 * a.norm_sqr()
            })
            .sum()
    }
}

/// |n_a, n_b> basis vector.
pub fn basis_state(n_a: usize, n_b: usize, cutoff: ModeCutoff) -> Result<TwoModePureState> {
    cutoff.check('a', n_a)?;
    cutoff.check('b', n_b)?;
    let mut amps = vec![ZERO; cutoff.dim()];
    amps[cutoff.index(n_a, n_b)] = ONE;
    Ok(TwoModePureState { cutoff, amps })
}

pub fn vacuum(cutoff: ModeCutoff) -> TwoModePureState {
    basis_state(0, 0, cutoff).expect("vacuum always representable")
}

pub(crate) fn outer_product(v: &[Complex64]) -> CsrMatrix {
    let support: Vec<usize> = (0..v.len()).filter(|&i| v[i].norm_sqr() > 0.0).collect();
    let mut triplets = Vec::with_capacity(support.len() * support.len());
    for &r in &support {
        for &c in &support {
            triplets.push((r, c, v[r] * v[c].conj()));
        }
    }
    CsrMatrix::from_triplets(v.len(), triplets)
}

/// Density operator on the truncated two-mode space, stored sparsely.
#[derive(Debug, Clone)]
pub struct TwoModeDensity {
    cutoff: ModeCutoff,
    mat: CsrMatrix,
}

impl TwoModeDensity {
    pub fn from_matrix(cutoff: ModeCutoff, mat: CsrMatrix) -> Self {
        assert_eq!(mat.dim(), cutoff.dim());
        TwoModeDensity { cutoff, mat }
    }

    pub fn cutoff(&self) -> ModeCutoff {
        self.cutoff
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.mat
    }

    pub fn entry(&self, n_a: usize, n_b: usize, m_a: usize, m_b: usize) -> Complex64 {
        self.mat
            .get(self.cutoff.index(n_a, n_b), self.cutoff.index(m_a, m_b))
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Returns the trace-1 rescaling; errors when the trace is ~0.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.abs() < 1e-300 {
            return Err(Error::Unnormalizable { norm_sq: tr });
        }
        Ok(TwoModeDensity {
            cutoff: self.cutoff,
            mat: self.mat.scale(Complex64::new(1.0 / tr, 0.0)),
        })
    }

    /// Tr(rho^2); equals sum |rho_ij|^2 for Hermitian rho.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|(_, _, v)| v.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.mat.hermiticity_error()
    }

    /// Smallest eigenvalue, computed on the occupied support block.
    pub fn min_eigenvalue(&self) -> f64 {
        let mut support: Vec<usize> = Vec::new();
        for (r, c, v) in self.mat.iter() {
            if v.norm() > 0.0 {
                support.push(r);
                support.push(c);
            }
        }
        support.sort_unstable();
        support.dedup();
        if support.is_empty() {
            return 0.0;
        }
        let k = support.len();
        let mut block = Array2::<Complex64>::zeros((k, k));
        for (i, &r) in support.iter().enumerate() {
            for (j, &c) in support.iter().enumerate() {
                block[(i, j)] = self.mat.get(r, c);
            }
        }
        eigvalsh(&block)[0]
    }

    pub fn mean_total_photons(&self) -> f64 {
        (0..self.cutoff.dim())
            .map(|i| {
                let (na, nb) = self.cutoff.unindex(i);
                (na + nb) as f64 * self.mat.get(i, i).re
            })
            .sum()
    }
}

/// Trace distance (1/2) ||rho - sigma||_1, computed by diagonalizing the
/// difference on its occupied support block.
pub fn trace_distance(rho: &TwoModeDensity, sigma: &TwoModeDensity) -> Result<f64> {
    rho.cutoff().ensure_match(&sigma.cutoff())?;
    let diff = rho.matrix().sub(sigma.matrix());
    let mut support: Vec<usize> = Vec::new();
    for (r, c, v) in diff.iter() {
        if v.norm() > 0.0 {
            support.push(r);
            support.push(c);
        }
    }
    support.sort_unstable();
    support.dedup();
    if support.is_empty() {
        return Ok(0.0);
    }
    let k = support.len();
    let mut block = Array2::<Complex64>::zeros((k, k));
    for (i, &r) in support.iter().enumerate() {
        for (j, &c) in support.iter().enumerate() {
            block[(i, j)] = diff.get(r, c);
        }
    }
    Ok(0.5 * eigvalsh(&block).iter().map(|l| l.abs()).sum::<f64>())
}

/// Linear operator on the truncated two-mode space (sparse storage).
#[derive(Debug, Clone)]
pub struct TwoModeOperator {
    cutoff: ModeCutoff,
    mat: CsrMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchwingerOp {
    Jx,
    Jy,
    Jz,
    J2,
}

impl TwoModeOperator {
    pub fn from_matrix(cutoff: ModeCutoff, mat: CsrMatrix) -> Self {
        assert_eq!(mat.dim(), cutoff.dim());
        TwoModeOperator { cutoff, mat }
    }

    pub fn identity(cutoff: ModeCutoff) -> Self {
        TwoModeOperator {
            cutoff,
            mat: CsrMatrix::identity(cutoff.dim()),
        }
    }

    pub fn cutoff(&self) -> ModeCutoff {
        self.cutoff
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.mat
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        TwoModeOperator {
            cutoff: self.cutoff,
            mat: self.mat.scale(factor),
        }
    }

    pub fn add(&self, other: &TwoModeOperator) -> Self {
        TwoModeOperator {
            cutoff: self.cutoff,
            mat: self.mat.add(&other.mat),
        }
    }

    pub fn sub(&self, other: &TwoModeOperator) -> Self {
        TwoModeOperator {
            cutoff: self.cutoff,
            mat: self.mat.sub(&other.mat),
        }
    }

    pub fn compose(&self, other: &TwoModeOperator) -> Self {
        TwoModeOperator {
            cutoff: self.cutoff,
            mat: self.mat.matmul(&other.mat),
        }
    }

    pub fn adjoint(&self) -> Self {
        TwoModeOperator {
            cutoff: self.cutoff,
            mat: self.mat.adjoint(),
        }
    }

    /// Raw matrix-vector action; the result is generally unnormalized.
    pub fn apply_vec(&self, amps: &[Complex64]) -> Vec<Complex64> {
        self.mat.apply(amps)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.mat.hermiticity_error()
    }
}

/// Ladder operator on one mode: lower has elements sqrt(n), raise sqrt(n+1).
/// Raising out of the truncated space drops the amplitude.
pub fn ladder(mode: Mode, direction: LadderDirection, cutoff: ModeCutoff) -> TwoModeOperator {
    let d = cutoff.mode_dim();
    let mut triplets = Vec::new();
    for na in 0..d {
        for nb in 0..d {
            let from = cutoff.index(na, nb);
            let (n, step_a) = match mode {
                Mode::A => (na, true),
                Mode::B => (nb, false),
            };
            match direction {
                LadderDirection::Lower => {
                    if n >= 1 {
                        let to = if step_a {
                            cutoff.index(na - 1, nb)
                        } else {
                            cutoff.index(na, nb - 1)
                        };
                        triplets.push((to, from, Complex64::new((n as f64).sqrt(), 0.0)));
                    }
                }
                LadderDirection::Raise => {
                    if n + 1 < d + 1 && n + 1 <= cutoff.n_max() {
                        let to = if step_a {
                            cutoff.index(na + 1, nb)
                        } else {
                            cutoff.index(na, nb + 1)
                        };
                        triplets.push((to, from, Complex64::new(((n + 1) as f64).sqrt(), 0.0)));
                    }
                }
            }
        }
    }
    TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
}

/// Photon number operator of one mode (diagonal).
pub fn number_op(mode: Mode, cutoff: ModeCutoff) -> TwoModeOperator {
    let triplets = (0..cutoff.dim())
        .map(|i| {
            let (na, nb) = cutoff.unindex(i);
            let n = match mode {
                Mode::A => na,
                Mode::B => nb,
            };
            (i, i, Complex64::new(n as f64, 0.0))
        })
        .collect();
    TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
}

/// Total photon number n_a + n_b (diagonal).
pub fn total_number(cutoff: ModeCutoff) -> TwoModeOperator {
    number_op(Mode::A, cutoff).add(&number_op(Mode::B, cutoff))
}

/// Schwinger spin operators built from the ladder operators:
/// Jx = (a'b + b'a)/2, Jy = -i(a'b - b'a)/2, Jz = (a'a - b'b)/2,
/// and the Casimir J^2 = (N/2)(N/2 + 1), diagonal in the Fock basis.
pub fn schwinger(which: SchwingerOp, cutoff: ModeCutoff) -> TwoModeOperator {
    match which {
        SchwingerOp::Jz => {
            let triplets = (0..cutoff.dim())
                .map(|i| {
                    let (na, nb) = cutoff.unindex(i);
                    (i, i, Complex64::new((na as f64 - nb as f64) / 2.0, 0.0))
                })
                .collect();
            TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
        }
        SchwingerOp::J2 => {
            let triplets = (0..cutoff.dim())
                .map(|i| {
                    let (na, nb) = cutoff.unindex(i);
                    (i, i, Complex64::new(jm_index(na, nb).casimir(), 0.0))
                })
                .collect();
            TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
        }
        SchwingerOp::Jx | SchwingerOp::Jy => {
            // a^dagger b connects (na, nb) -> (na+1, nb-1)
            let d = cutoff.mode_dim();
            let mut triplets = Vec::new();
            for na in 0..d {
                for nb in 0..d {
                    if nb >= 1 && na + 1 < d {
                        let from = cutoff.index(na, nb);
                        let to = cutoff.index(na + 1, nb - 1);
                        let amp = (((na + 1) * nb) as f64).sqrt();
                        let (up, down) = match which {
                            SchwingerOp::Jx => {
                                (Complex64::new(amp / 2.0, 0.0), Complex64::new(amp / 2.0, 0.0))
                            }
                            SchwingerOp::Jy => (
                                Complex64::new(0.0, -amp / 2.0),
                                Complex64::new(0.0, amp / 2.0),
                            ),
                            _ => unreachable!(),
                        };
                        triplets.push((to, from, up));
                        triplets.push((from, to, down));
                    }
                }
            }
            TwoModeOperator::from_matrix(cutoff, CsrMatrix::from_triplets(cutoff.dim(), triplets))
        }
    }
}

/// Pure state or density operator; most estimators accept either.
#[derive(Debug, Clone)]
pub enum State {
    Pure(TwoModePureState),
    Mixed(TwoModeDensity),
}

impl From<TwoModePureState> for State {
    fn from(s: TwoModePureState) -> Self {
        State::Pure(s)
    }
}

impl From<TwoModeDensity> for State {
    fn from(s: TwoModeDensity) -> Self {
        State::Mixed(s)
    }
}

impl State {
    pub fn cutoff(&self) -> ModeCutoff {
        match self {
            State::Pure(s) => s.cutoff(),
            State::Mixed(s) => s.cutoff(),
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            State::Pure(_) => 1.0,
            State::Mixed(rho) => rho.purity(),
        }
    }

    pub fn mean_total_photons(&self) -> f64 {
        match self {
            State::Pure(s) => s.mean_total_photons(),
            State::Mixed(rho) => rho.mean_total_photons(),
        }
    }

    pub fn to_density(&self) -> TwoModeDensity {
        match self {
            State::Pure(s) => s.to_density(),
            State::Mixed(rho) => rho.clone(),
        }
    }
}

/// <psi|O|psi> or Tr(rho O).
pub fn expectation(state: &State, op: &TwoModeOperator) -> Result<Complex64> {
    state.cutoff().ensure_match(&op.cutoff())?;
    match state {
        State::Pure(psi) => {
            let y = op.apply_vec(psi.amplitudes());
            Ok(psi
                .amplitudes()
                .iter()
                .zip(y.iter())
                .map(|(x, v)| x.conj() * v)
                .sum())
        }
        State::Mixed(rho) => {
            // Tr(rho O) = sum_ij rho_ij O_ji
            let mut acc = ZERO;
            for (r, c, v) in rho.matrix().iter() {
                acc += v * op.matrix().get(c, r);
            }
            Ok(acc)
        }
    }
}

/// Real part of the expectation of a Hermitian operator; checks the
/// imaginary residue against 1e-10.
pub fn expectation_real(state: &State, op: &TwoModeOperator) -> Result<f64> {
    let v = expectation(state, op)?;
    debug_assert!(
        v.im.abs() < 1e-10,
        "imaginary residue {} for Hermitian expectation",
        v.im
    );
    Ok(v.re)
}

/// Second moment <O^2> without materializing O^2 (O assumed Hermitian).
pub fn second_moment(state: &State, op: &TwoModeOperator) -> Result<f64> {
    state.cutoff().ensure_match(&op.cutoff())?;
    match state {
        State::Pure(psi) => {
            let y = op.apply_vec(psi.amplitudes());
            Ok(y.iter().map(|v| v.norm_sqr()).sum())
        }
        State::Mixed(_) => {
            let sq = TwoModeOperator::from_matrix(
                op.cutoff(),
                op.matrix().matmul(op.matrix()),
            );
            expectation_real(state, &sq)
        }
    }
}

/// Four-mode pure state: signal modes (a, b) with the shared cutoff and
/// ancilla modes (a', b') restricted to 0 or 1 photons, as appropriate for
/// first-order weak taps.
#[derive(Debug, Clone)]
pub struct FourModeState {
    cutoff: ModeCutoff,
    // indexed by ancilla occupation (n_a' * 2 + n_b')
    comps: [Vec<Complex64>; 4],
}

pub const ANC_00: usize = 0;
pub const ANC_01: usize = 1;
pub const ANC_10: usize = 2;
pub const ANC_11: usize = 3;

impl FourModeState {
    /// |psi>_{ab} tensor |0,0>_{a'b'}.
    pub fn from_signal(psi: &TwoModePureState) -> Self {
        let dim = psi.cutoff().dim();
        let mut comps = [
            vec![ZERO; dim],
            vec![ZERO; dim],
            vec![ZERO; dim],
            vec![ZERO; dim],
        ];
        comps[ANC_00].copy_from_slice(psi.amplitudes());
        FourModeState {
            cutoff: psi.cutoff(),
            comps,
        }
    }

    pub fn from_components(cutoff: ModeCutoff, comps: [Vec<Complex64>; 4]) -> Self {
        for c in &comps {
            assert_eq!(c.len(), cutoff.dim());
        }
        FourModeState { cutoff, comps }
    }

    pub fn cutoff(&self) -> ModeCutoff {
        self.cutoff
    }

    pub fn component(&self, anc: usize) -> &[Complex64] {
        &self.comps[anc]
    }

    pub fn component_mut(&mut self, anc: usize) -> &mut Vec<Complex64> {
        &mut self.comps[anc]
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Traces out the ancilla pair, keeping modes (a, b).
    pub fn partial_trace_pair(&self) -> Result<TwoModeDensity> {
        self.conditioned(&[1.0; 4]).map(|(rho, _)| rho)
    }

    /// Conditions on an ancilla-diagonal POVM with the given weights and
    /// traces the ancillas out. Returns the *normalized* conditional state
    /// and the outcome probability.
    pub fn conditioned(&self, weights: &[f64; 4]) -> Result<(TwoModeDensity, f64)> {
        let dim = self.cutoff.dim();
        let mut prob = 0.0;
        let mut mat = CsrMatrix::zeros(dim);
        for anc in 0..4 {
            if weights[anc] == 0.0 {
                continue;
            }
            let v = &self.comps[anc];
            let nsq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            prob += weights[anc] * nsq;
            if nsq > 0.0 {
                mat = mat.add(&outer_product(v).scale(Complex64::new(weights[anc], 0.0)));
            }
        }
        if prob < 1e-300 {
            return Err(Error::Unheraldable { prob });
        }
        let rho = TwoModeDensity::from_matrix(self.cutoff, mat).normalized()?;
        Ok((rho, prob))
    }

    /// Projects onto a single ancilla basis state; returns the normalized
    /// signal state and the outcome probability.
    pub fn project_ancilla(&self, anc: usize) -> Result<(TwoModePureState, f64)> {
        let v = &self.comps[anc];
        let prob: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if prob < 1e-300 {
            return Err(Error::Unheraldable { prob });
        }
        let psi = TwoModePureState::normalized(self.cutoff, v.clone())?;
        Ok((psi, prob))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_vacuum() {
        let cut = ModeCutoff::new(4);
        let v = basis_state(0, 0, cut).unwrap();
        assert!((v.norm_sq() - 1.0).abs() < 1e-15);
        let jz = schwinger(SchwingerOp::Jz, cut);
        let e = expectation_real(&v.clone().into(), &jz).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn basis_state_rejects_out_of_range() {
        let cut = ModeCutoff::new(3);
        let err = basis_state(4, 0, cut).unwrap_err();
        match err {
            Error::PhotonOutOfRange { mode, n, n_max } => {
                assert_eq!(mode, 'a');
                assert_eq!(n, 4);
                assert_eq!(n_max, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn twin_fock_jm_labels() {
        for n in 0..6usize {
            let jm = jm_index(n, n);
            assert_eq!(jm.two_j, 2 * n as i64);
            assert_eq!(jm.two_m, 0);
        }
        // (3,1) -> j = 2, m = 1
        let jm = jm_index(3, 1);
        assert_eq!((jm.j(), jm.m()), (2.0, 1.0));
        // (n, n-1) -> (n - 1/2, 1/2)
        let jm = jm_index(5, 4);
        assert_eq!((jm.two_j, jm.two_m), (9, 1));
        assert_eq!(jm_index(0, 0), JmLabel { two_j: 0, two_m: 0 });
    }

    #[test]
    fn ladder_matrix_elements() {
        let cut = ModeCutoff::new(5);
        let lower_a = ladder(Mode::A, LadderDirection::Lower, cut);
        let one_zero = basis_state(1, 0, cut).unwrap();
        let out = lower_a.apply_vec(one_zero.amplitudes());
        assert!((out[cut.index(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        // lower(a) on |0,k> is the zero vector
        let zk = basis_state(0, 3, cut).unwrap();
        let out = lower_a.apply_vec(zk.amplitudes());
        assert!(out.iter().all(|v| v.norm() == 0.0));

        // raise(a) on |n,.> gives sqrt(n+1)|n+1,.>
        let raise_a = ladder(Mode::A, LadderDirection::Raise, cut);
        for n in 0..5usize {
            let s = basis_state(n, 2, cut).unwrap();
            let out = raise_a.apply_vec(s.amplitudes());
            let expect = ((n + 1) as f64).sqrt();
            assert!((out[cut.index(n + 1, 2)] - c(expect, 0.0)).norm() < 1e-14);
        }
        // raising out of the cutoff drops the amplitude
        let top = basis_state(5, 0, cut).unwrap();
        let out = raise_a.apply_vec(top.amplitudes());
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn schwinger_from_ladder_definition() {
        let cut = ModeCutoff::new(6);
        let a_low = ladder(Mode::A, LadderDirection::Lower, cut);
        let b_low = ladder(Mode::B, LadderDirection::Lower, cut);
        let adag_b = a_low.adjoint().compose(&b_low);
        let bdag_a = b_low.adjoint().compose(&a_low);
        let jx_ref = adag_b.add(&bdag_a).scale(c(0.5, 0.0));
        let jx = schwinger(SchwingerOp::Jx, cut);
        // agreement away from the truncation edge: restrict to N <= n_max
        for (r, col, v) in jx_ref.matrix().iter() {
            let (na, nb) = cut.unindex(r);
            let (ma, mb) = cut.unindex(col);
            if na + nb <= 6 && ma + mb <= 6 {
                assert!((jx.matrix().get(r, col) - v).norm() < 1e-14);
            }
        }
        let jy_ref = adag_b.sub(&bdag_a).scale(c(0.0, -0.5));
        let jy = schwinger(SchwingerOp::Jy, cut);
        assert!(max_abs_diff(jy.matrix(), jy_ref.matrix()) < 1e-14);
    }

    #[test]
    fn su2_commutators_on_complete_sectors() {
        let cut = ModeCutoff::new(6);
        let jx = schwinger(SchwingerOp::Jx, cut);
        let jy = schwinger(SchwingerOp::Jy, cut);
        let jz = schwinger(SchwingerOp::Jz, cut);
        let pairs = [
            (&jx, &jy, &jz),
            (&jy, &jz, &jx),
            (&jz, &jx, &jy),
        ];
        for (a, b, expect) in pairs {
            let comm = a.compose(b).sub(&b.compose(a));
            let target = expect.scale(c(0.0, 1.0));
            // restrict to the subspace with total photon number <= n_max
            for (r, col, v) in comm.sub(&target).matrix().iter() {
                let (na, nb) = cut.unindex(r);
                let (ma, mb) = cut.unindex(col);
                if na + nb <= cut.n_max() && ma + mb <= cut.n_max() {
                    assert!(v.norm() < 1e-10, "commutator residue {v} at ({r},{col})");
                }
            }
        }
    }

    #[test]
    fn casimir_eigenvalues() {
        let cut = ModeCutoff::new(7);
        let j2 = schwinger(SchwingerOp::J2, cut);
        for n in 1..4usize {
            let s = basis_state(n, n - 1, cut).unwrap();
            let out = j2.apply_vec(s.amplitudes());
            let j = (2 * n - 1) as f64 / 2.0;
            let expect = j * (j + 1.0);
            assert!(
                (out[cut.index(n, n - 1)] - c(expect, 0.0)).norm() < 1e-12,
                "J^2 eigenvalue mismatch at n={n}"
            );
        }
    }

    #[test]
    fn expectation_examples() {
        let cut = ModeCutoff::new(6);
        let jz = schwinger(SchwingerOp::Jz, cut);
        let jx = schwinger(SchwingerOp::Jx, cut);

        // (|1,0> + |0,1>)/sqrt(2) has <Jz> = 0
        let mut amps = vec![c(0.0, 0.0); cut.dim()];
        amps[cut.index(1, 0)] = c(1.0, 0.0);
        amps[cut.index(0, 1)] = c(1.0, 0.0);
        let s = TwoModePureState::normalized(cut, amps).unwrap();
        assert!(expectation_real(&s.into(), &jz).unwrap().abs() < 1e-15);

        // (|n,n-1> + |n-1,n>)/sqrt(2) has <Jx> = n/2
        for n in 1..4usize {
            let mut amps = vec![c(0.0, 0.0); cut.dim()];
            amps[cut.index(n, n - 1)] = c(1.0, 0.0);
            amps[cut.index(n - 1, n)] = c(1.0, 0.0);
            let s = TwoModePureState::normalized(cut, amps).unwrap();
            let e = expectation_real(&s.into(), &jx).unwrap();
            assert!((e - n as f64 / 2.0).abs() < 1e-12);
        }

        // N_total on |n,n> is 2n
        let nt = total_number(cut);
        let s = basis_state(3, 3, cut).unwrap();
        assert!((expectation_real(&s.into(), &nt).unwrap() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn expectation_cutoff_mismatch() {
        let s = basis_state(1, 1, ModeCutoff::new(4)).unwrap();
        let op = schwinger(SchwingerOp::Jz, ModeCutoff::new(5));
        assert!(matches!(
            expectation(&s.into(), &op),
            Err(Error::CutoffMismatch { .. })
        ));
    }

    #[test]
    fn hermiticity_of_advertised_operators() {
        let cut = ModeCutoff::new(8);
        for which in [
            SchwingerOp::Jx,
            SchwingerOp::Jy,
            SchwingerOp::Jz,
            SchwingerOp::J2,
        ] {
            assert!(schwinger(which, cut).hermiticity_error() < 1e-12);
        }
        assert!(number_op(Mode::A, cut).hermiticity_error() < 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        let cut = ModeCutoff::new(3);
        let mut amps = vec![c(0.0, 0.0); cut.dim()];
        amps[cut.index(2, 1)] = c(0.6, 0.0);
        amps[cut.index(1, 2)] = c(0.0, 0.8);
        let psi = TwoModePureState::normalized(cut, amps).unwrap();
        let four = FourModeState::from_signal(&psi);
        let rho = four.partial_trace_pair().unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let ref_rho = psi.to_density();
        assert!(max_abs_diff(rho.matrix(), ref_rho.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_bell_like() {
        // (|10>_{ab}|10>_{a'b'} + |01>_{ab}|01>_{a'b'})/sqrt(2)
        let cut = ModeCutoff::new(2);
        let dim = cut.dim();
        let mut comps = [
            vec![c(0.0, 0.0); dim],
            vec![c(0.0, 0.0); dim],
            vec![c(0.0, 0.0); dim],
            vec![c(0.0, 0.0); dim],
        ];
        let r = 1.0 / 2f64.sqrt();
        comps[ANC_10][cut.index(1, 0)] = c(r, 0.0);
        comps[ANC_01][cut.index(0, 1)] = c(r, 0.0);
        let four = FourModeState::from_components(cut, comps);
        let rho = four.partial_trace_pair().unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        assert!((rho.entry(1, 0, 1, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.entry(0, 1, 0, 1).re - 0.5).abs() < 1e-12);
        assert!(rho.entry(1, 0, 0, 1).norm() < 1e-15);
    }

    #[test]
    fn conditioning_on_zero_probability_fails() {
        let cut = ModeCutoff::new(2);
        let psi = basis_state(0, 0, cut).unwrap();
        let four = FourModeState::from_signal(&psi);
        assert!(matches!(
            four.project_ancilla(ANC_10),
            Err(Error::Unheraldable { .. })
        ));
    }

    #[test]
    fn density_positivity_and_trace() {
        let cut = ModeCutoff::new(3);
        let rho = basis_state(2, 1, cut).unwrap().to_density();
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        assert!(rho.hermiticity_error() < 1e-14);
        assert!(rho.min_eigenvalue() > -1e-12);
    }
}
