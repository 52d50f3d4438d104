use super::{bell_value, c, pauli_x, pauli_y, BellValue, CMatrix, CVector, QuantumModel, State};
use crate::error::{Error, Result};
use crate::geometry::Inequality;
use crate::scenario::digits;

/// Agreement required between the tensor contraction and `cos(Σ φ)`.
const CLOSED_FORM_TOL: f64 = 1e-12;

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz_state(n: usize) -> CVector {
    let dim = 1 << n;
    let mut v = CVector::zeros(dim);
    v[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[dim - 1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v
}

/// `cos(φ) X + sin(φ) Y`
pub fn qubit_observable(phi: f64) -> CMatrix {
    pauli_x().scale(phi.cos()) + pauli_y().scale(phi.sin())
}

/// GHZ state with equatorial observables; `angles[party][setting]` in radians.
pub fn ghz_model(angles: &[Vec<f64>]) -> Result<QuantumModel> {
    let n = angles.len();
    let m = angles.first().map_or(0, |a| a.len());
    if n == 0 || m == 0 || angles.iter().any(|a| a.len() != m) {
        return Err(Error::InvalidInput("angles must be a non-empty N × M table".into()));
    }
    if n > 12 {
        return Err(Error::DimensionLimit(1 << n));
    }
    Ok(QuantumModel {
        local_dims: vec![2; n],
        state: State::Pure(ghz_state(n)),
        observables: angles.iter().map(|a| a.iter().map(|&phi| qubit_observable(phi)).collect()).collect(),
    })
}

/// `E(s) = cos(Σ_i φ_{i,s_i})`, in settings-index order.
pub fn ghz_closed_form(angles: &[Vec<f64>]) -> Vec<f64> {
    let n = angles.len();
    let m = angles.first().map_or(0, |a| a.len());
    (0..m.pow(n as u32))
        .map(|s| digits(s, m, n).iter().enumerate().map(|(i, &x)| angles[i][x]).sum::<f64>().cos())
        .collect()
}

/// Bell value of the GHZ model, cross-checked against the cosine form.
pub fn ghz_value(ineq: &Inequality, angles: &[Vec<f64>]) -> Result<BellValue> {
    let model = ghz_model(angles)?;
    let value = bell_value(ineq, &model)?;
    let contracted = value.model.correlations();
    let closed = ghz_closed_form(angles);
    if let Some((a, b)) = contracted.iter().zip(&closed).find(|(a, b)| (*a - *b).abs() > CLOSED_FORM_TOL) {
        return Err(Error::Invariant(format!("GHZ contraction {a} disagrees with closed form {b}")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Representation, Scenario};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, SQRT_2};

    fn mermin() -> Inequality {
        // E(112) + E(121) + E(211) − E(222) with settings 1,2 ↦ indices 0,1.
        let mut c = [0i64; 8];
        c[0b001] = 1;
        c[0b010] = 1;
        c[0b100] = 1;
        c[0b111] = -1;
        Inequality::from_ints(Scenario::new(3, 2, 2).unwrap(), Representation::FullCorrelation, &c, 2).unwrap()
    }

    #[test]
    fn zero_angles() {
        let chsh = Inequality::from_ints(Scenario::new(2, 2, 2).unwrap(), Representation::FullCorrelation, &[1, 1, 1, -1], 2).unwrap();
        let v = ghz_value(&chsh, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!((v.value - 2.0).abs() < 1e-12);
        assert!(v.model.correlations().iter().all(|e| (e - 1.0).abs() < 1e-12));
    }

    #[test]
    fn chsh_optimal_angles() {
        let chsh = Inequality::from_ints(Scenario::new(2, 2, 2).unwrap(), Representation::FullCorrelation, &[1, 1, 1, -1], 2).unwrap();
        let v = ghz_value(&chsh, &[vec![0.0, FRAC_PI_2], vec![-FRAC_PI_4, FRAC_PI_4]]).unwrap();
        assert!((v.value - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((v.violation_ratio.unwrap() - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn mermin_value() {
        let angles = vec![vec![-FRAC_PI_6, FRAC_PI_3]; 3];
        let v = ghz_value(&mermin(), &angles).unwrap();
        assert!((v.value - 4.0).abs() < 1e-12);
        // With angles 0 and π/2 every term of this form is cos(±π/2) or cos(3π/2).
        let v = ghz_value(&mermin(), &vec![vec![0.0, FRAC_PI_2]; 3]).unwrap();
        assert!(v.value.abs() < 1e-12);
    }

    #[test]
    fn bad_angles() {
        assert!(ghz_model(&[]).is_err());
        assert!(ghz_model(&[vec![0.0, 1.0], vec![0.0]]).is_err());
    }
}
