//! Dense statevector simulation over `{X, SX, RZ, CX}`.
//!
//! Qubit 0 is the least-significant bit of the amplitude index. Gate matrices:
//!
//! ```text
//! X     = [[0, 1], [1, 0]]
//! SX    = ((1+i)/2) [[1, -i], [-i, 1]]
//! RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})
//! CX    = flips the target where the control bit is 1
//! ```

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// Largest register [`run`] will simulate.
pub const DEFAULT_SIMULATOR_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        Ok(StateVector {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::QubitCountMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            Gate::X(q) => {
                let m = 1usize << q;
                for i in 0..self.amplitudes.len() {
                    if i & m == 0 {
                        self.amplitudes.swap(i, i | m);
                    }
                }
            }
            Gate::SX(q) => {
                let m = 1usize << q;
                let h = Complex64::new(0.5, 0.5);
                let k = Complex64::new(0.5, -0.5);
                for i in 0..self.amplitudes.len() {
                    if i & m == 0 {
                        let a0 = self.amplitudes[i];
                        let a1 = self.amplitudes[i | m];
                        self.amplitudes[i] = h * a0 + k * a1;
                        self.amplitudes[i | m] = k * a0 + h * a1;
                    }
                }
            }
            Gate::RZ(q, theta) => {
                let m = 1usize << q;
                let p0 = Complex64::from_polar(1.0, -theta / 2.0);
                let p1 = Complex64::from_polar(1.0, theta / 2.0);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    *a *= if i & m == 0 { p0 } else { p1 };
                }
            }
            Gate::CX(c, t) => {
                let cm = 1usize << c;
                let tm = 1usize << t;
                for i in 0..self.amplitudes.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
        }
        Ok(())
    }

    /// Amplitude dump as CSV `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, a) in self.amplitudes.iter().enumerate() {
            out.push_str(&format!("{i},{:.17e},{:.17e}\n", a.re, a.im));
        }
        out
    }
}

/// Functional form of [`StateVector::apply_gate`].
pub fn apply_gate(sv: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = sv.clone();
    out.apply_gate(gate)?;
    Ok(out)
}

/// Runs `c` on `|0...0>` with the default simulator cap.
pub fn run(c: &Circuit) -> Result<StateVector> {
    run_with_cap(c, DEFAULT_SIMULATOR_CAP)
}

pub fn run_with_cap(c: &Circuit, cap: usize) -> Result<StateVector> {
    if c.num_qubits() > cap {
        return Err(Error::SimulatorCap {
            num_qubits: c.num_qubits(),
            cap,
        });
    }
    let mut sv = StateVector::zero(c.num_qubits());
    for g in c.gates() {
        sv.apply_gate(g)?;
    }
    Ok(sv)
}

/// `|<target| candidate |0>|^2`.
pub fn fidelity(target: &StateVector, candidate: &Circuit) -> Result<f64> {
    if target.num_qubits() != candidate.num_qubits() {
        return Err(Error::QubitCountMismatch(target.num_qubits(), candidate.num_qubits()));
    }
    target.fidelity(&run(candidate)?)
}
