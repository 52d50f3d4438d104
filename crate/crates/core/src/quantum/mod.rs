//! Quantum side: Bell operators for two-outcome correlation inequalities,
//! see-saw lower bounds on the maximal quantum value, GHZ models and partial
//! transposes.
//!
//! Floating-point throughout. Tensor factors are ordered with party 0 as the
//! most significant index, matching the settings-tuple order of
//! [`crate::scenario`].

mod ghz;
mod ppt;
pub mod random;
mod seesaw;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Inequality;
use crate::rational::{to_f64, Rational};
use crate::scenario::Representation;

pub use ghz::{ghz_closed_form, ghz_model, ghz_state, ghz_value, qubit_observable};
pub use ppt::{partial_transpose, ppt_check, PptReport};
pub use seesaw::{optimize_observables, quantum_value_seesaw, seesaw_from, SeesawOptions, SeesawResult, MAX_SEESAW_DIM};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const STATE_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const SPECTRUM_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(CVector),
    Mixed(CMatrix),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(v) => v.len(),
            State::Mixed(m) => m.nrows(),
        }
    }

    pub fn density(&self) -> CMatrix {
        match self {
            State::Pure(v) => v * v.adjoint(),
            State::Mixed(m) => m.clone(),
        }
    }

    /// `Tr[ρ O]` for an operator given by its action on vectors.
    fn expectation(&self, apply: impl Fn(&CVector) -> CVector) -> Complex64 {
        match self {
            State::Pure(psi) => psi.dotc(&apply(psi)),
            State::Mixed(rho) => {
                // Tr[O ρ] = Σ_k (O ρ_k)[k] over the columns of ρ.
                (0..rho.ncols()).map(|k| apply(&rho.column(k).into_owned())[k]).sum()
            }
        }
    }
}

/// State plus one Hermitian contraction per (party, setting).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModel {
    pub local_dims: Vec<usize>,
    pub state: State,
    /// `observables[party][setting]`
    pub observables: Vec<Vec<CMatrix>>,
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (values, vectors)
}

pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.last().copied().unwrap_or(f64::NAN)
}

/// `sign(X)` of the Hermitian part of `x`, with `+1` on the kernel: the
/// Hermitian contraction maximizing `Re Tr[A x]`.
pub fn hermitian_sign(x: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(x);
    let signs = CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(if v < 0.0 { -1.0 } else { 1.0 }, 0.0)),
    );
    &vectors * CMatrix::from_diagonal(&signs) * vectors.adjoint()
}

pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    factors
        .iter()
        .fold(CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)), |acc, f| acc.kronecker(f))
}

/// Applies `op` to tensor factor `party` of `v`.
pub fn apply_local(op: &CMatrix, party: usize, dims: &[usize], v: &CVector) -> CVector {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut out = CVector::zeros(v.len());
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for a in 0..d {
                let mut acc = Complex64::zero();
                for b in 0..d {
                    let coef = op[(a, b)];
                    if coef != Complex64::zero() {
                        acc += coef * v[base + b * inner];
                    }
                }
                out[base + a * inner] = acc;
            }
        }
    }
    out
}

impl QuantumModel {
    pub fn n_parties(&self) -> usize {
        self.local_dims.len()
    }

    pub fn n_settings(&self) -> usize {
        self.observables.first().map_or(0, |o| o.len())
    }

    pub fn validate(&self) -> Result<()> {
        let total: usize = self.local_dims.iter().product();
        if self.local_dims.is_empty() || self.local_dims.contains(&0) {
            return Err(Error::InvalidInput("local dimensions must be positive".into()));
        }
        if self.state.dim() != total {
            return Err(Error::DimensionMismatch { expected: total, found: self.state.dim() });
        }
        match &self.state {
            State::Pure(v) => {
                if (v.norm() - 1.0).abs() > STATE_TOL {
                    return Err(Error::InvalidInput(format!("state norm {} is not 1", v.norm())));
                }
            }
            State::Mixed(m) => {
                if !is_hermitian(m, HERMITIAN_TOL) || (m.trace().re - 1.0).abs() > STATE_TOL {
                    return Err(Error::InvalidInput("density matrix must be Hermitian with unit trace".into()));
                }
            }
        }
        if self.observables.len() != self.n_parties() {
            return Err(Error::DimensionMismatch { expected: self.n_parties(), found: self.observables.len() });
        }
        let m = self.n_settings();
        for (i, obs) in self.observables.iter().enumerate() {
            if obs.len() != m || m == 0 {
                return Err(Error::InvalidInput("every party needs the same positive number of settings".into()));
            }
            for a in obs {
                if a.nrows() != self.local_dims[i] || a.ncols() != self.local_dims[i] {
                    return Err(Error::DimensionMismatch { expected: self.local_dims[i], found: a.nrows() });
                }
                if !is_hermitian(a, HERMITIAN_TOL) {
                    return Err(Error::InvalidInput(format!("observable of party {i} is not Hermitian")));
                }
                let (ev, _) = hermitian_eigen(a);
                if ev.iter().any(|&e| e.abs() > 1.0 + SPECTRUM_TOL) {
                    return Err(Error::InvalidInput(format!("observable of party {i} has spectrum outside [-1,1]")));
                }
            }
        }
        Ok(())
    }

    fn apply_product(&self, settings: &[usize], v: &CVector, skip: Option<usize>) -> CVector {
        let mut out = v.clone();
        for (i, &x) in settings.iter().enumerate() {
            if Some(i) != skip {
                out = apply_local(&self.observables[i][x], i, &self.local_dims, &out);
            }
        }
        out
    }

    /// `Tr[ρ ⊗_i A_i^{s_i}]` for every settings tuple, in settings-index order.
    pub fn correlations(&self) -> Vec<f64> {
        let (n, m) = (self.n_parties(), self.n_settings());
        (0..m.pow(n as u32))
            .map(|s| {
                let settings = crate::scenario::digits(s, m, n);
                self.state.expectation(|v| self.apply_product(&settings, v, None)).re
            })
            .collect()
    }

    /// Operator `Y` on party `party` with `Σ_{s: s_party = setting} c(s) ⟨⊗ A⟩ = Tr[A_{party,setting} Y]`.
    fn effective_operator(&self, coefficients: &[f64], party: usize, setting: usize) -> CMatrix {
        let (n, m) = (self.n_parties(), self.n_settings());
        let dims = &self.local_dims;
        let d = dims[party];
        let inner: usize = dims[party + 1..].iter().product();
        let outer: usize = dims[..party].iter().product();
        let mut y = CMatrix::zeros(d, d);

        let columns: Vec<CVector> = match &self.state {
            State::Pure(psi) => vec![psi.clone()],
            State::Mixed(rho) => (0..rho.ncols()).map(|k| rho.column(k).into_owned()).collect(),
        };
        for (s, &c) in coefficients.iter().enumerate() {
            let settings = crate::scenario::digits(s, m, n);
            if c == 0.0 || settings[party] != setting {
                continue;
            }
            match &self.state {
                State::Pure(psi) => {
                    let phi = self.apply_product(&settings, psi, Some(party));
                    for o in 0..outer {
                        for i in 0..inner {
                            let base = o * d * inner + i;
                            for b in 0..d {
                                for a in 0..d {
                                    y[(b, a)] += phi[base + b * inner] * psi[base + a * inner].conj() * c;
                                }
                            }
                        }
                    }
                }
                State::Mixed(_) => {
                    // (M ρ)[(b,r),(a,r)] summed over r.
                    for (k, col) in columns.iter().enumerate() {
                        let phi = self.apply_product(&settings, col, Some(party));
                        let a = (k / inner) % d;
                        let (ko, ki) = (k / (d * inner), k % inner);
                        for b in 0..d {
                            y[(b, a)] += phi[ko * d * inner + b * inner + ki] * c;
                        }
                    }
                }
            }
        }
        y
    }
}

/// Bell value of a fixed model.
#[derive(Debug, Clone)]
pub struct BellValue {
    pub value: f64,
    pub model: QuantumModel,
    pub inequality: Inequality,
    /// `value / bound`, defined when the bound is positive.
    pub violation_ratio: Option<f64>,
}

fn check_correlation_inequality(ineq: &Inequality) -> Result<Vec<f64>> {
    if ineq.representation != Representation::FullCorrelation || ineq.scenario.n_outcomes != 2 {
        return Err(Error::RepresentationMismatch(
            "quantum optimization needs a two-outcome full-correlation inequality".into(),
        ));
    }
    Ok(ineq.coefficients.iter().map(to_f64).collect())
}

fn check_model_shape(ineq: &Inequality, model: &QuantumModel) -> Result<()> {
    let s = ineq.scenario;
    if model.n_parties() != s.n_parties || model.n_settings() != s.n_settings {
        return Err(Error::DimensionMismatch { expected: s.n_parties * s.n_settings, found: model.n_parties() * model.n_settings() });
    }
    Ok(())
}

pub fn bell_value(ineq: &Inequality, model: &QuantumModel) -> Result<BellValue> {
    let coefficients = check_correlation_inequality(ineq)?;
    check_model_shape(ineq, model)?;
    let value = coefficients.iter().zip(model.correlations()).map(|(c, e)| c * e).sum();
    Ok(make_value(value, model.clone(), ineq))
}

fn make_value(value: f64, model: QuantumModel, ineq: &Inequality) -> BellValue {
    let bound = to_f64(&ineq.bound);
    let violation_ratio = (bound > 0.0).then(|| value / bound);
    BellValue { value, model, inequality: ineq.clone(), violation_ratio }
}

/// `B = Σ_s c(s) A_1^{s_1} ⊗ … ⊗ A_N^{s_N}`.
pub fn bell_operator(ineq: &Inequality, observables: &[Vec<CMatrix>]) -> Result<CMatrix> {
    let coefficients = check_correlation_inequality(ineq)?;
    let s = ineq.scenario;
    if observables.len() != s.n_parties || observables.iter().any(|o| o.len() != s.n_settings) {
        return Err(Error::DimensionMismatch { expected: s.n_parties * s.n_settings, found: observables.iter().map(|o| o.len()).sum() });
    }
    for obs in observables {
        let d = obs[0].nrows();
        if obs.iter().any(|a| a.nrows() != d || a.ncols() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: obs.iter().map(|a| a.nrows()).max().unwrap_or(0) });
        }
    }
    let dim: usize = observables.iter().map(|o| o[0].nrows()).product();
    let mut b = CMatrix::zeros(dim, dim);
    for (idx, &c) in coefficients.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let settings = s.settings_tuple(idx);
        let factors: Vec<&CMatrix> = settings.iter().enumerate().map(|(i, &x)| &observables[i][x]).collect();
        b += kron_all(&factors).scale(c);
    }
    Ok(b)
}

/// Last continued-fraction convergent with denominator at most `max_denominator`.
pub fn rationalize(value: f64, max_denominator: u64) -> Result<Rational> {
    if !value.is_finite() {
        return Err(Error::NonFinite(value));
    }
    if max_denominator == 0 {
        return Err(Error::InvalidInput("max_denominator must be positive".into()));
    }
    let exact = Rational::from_float(value).ok_or(Error::NonFinite(value))?;
    let max_q = BigInt::from(max_denominator);
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::from(0), BigInt::from(1), BigInt::from(1), BigInt::from(0));
    let mut x = exact.clone();
    loop {
        let a = x.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > max_q {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = &x - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        x = frac.recip();
    }
    Ok(Rational::new(p1, q1))
}

/// Real and imaginary parts of a matrix, row-major.
pub type SplitMatrix = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// JSON export of a model and its statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelExport {
    pub local_dims: Vec<usize>,
    pub state_real: Vec<Vec<f64>>,
    pub state_imag: Vec<Vec<f64>>,
    /// `observables[party][setting] = (real, imag)`
    pub observables: Vec<Vec<SplitMatrix>>,
    pub correlations: Vec<f64>,
    pub bell_value: Option<f64>,
    pub ppt: Vec<PptReport>,
}

fn split(m: &CMatrix) -> SplitMatrix {
    let re = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect();
    let im = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect();
    (re, im)
}

impl ModelExport {
    pub fn new(model: &QuantumModel, bell_value: Option<f64>) -> Result<Self> {
        let rho = model.state.density();
        let (state_real, state_imag) = split(&rho);
        Ok(ModelExport {
            local_dims: model.local_dims.clone(),
            state_real,
            state_imag,
            observables: model.observables.iter().map(|o| o.iter().map(split).collect()).collect(),
            correlations: model.correlations(),
            bell_value,
            ppt: ppt_check(&rho, &model.local_dims)?,
        })
    }
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}
