//! Pauli strings `i^phase X^x Z^z` with exact phase bookkeeping.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::gates::Matrix;
use crate::statevec::StateVector;

/// `i^phase_exp * X^x_mask * Z^z_mask` on `n` qubits. The X part acts after
/// the Z part, so `X^x Z^z |c> = (-1)^(z.c) |c ^ x>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub n: usize,
    pub phase_exp: u8,
    pub x_mask: usize,
    pub z_mask: usize,
}

fn i_pow(p: u8) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Nearest power of `i` to a unit-modulus complex number, if within `tol`.
pub(crate) fn quarter_turn(c: Complex64, tol: f64) -> Option<u8> {
    (0..4u8).find(|&p| (c - i_pow(p)).norm() < tol)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            phase_exp: 0,
            x_mask: 0,
            z_mask: 0,
        }
    }

    pub fn x(n: usize, mask: usize) -> Self {
        Self {
            x_mask: mask,
            ..Self::identity(n)
        }
    }

    pub fn z(n: usize, mask: usize) -> Self {
        Self {
            z_mask: mask,
            ..Self::identity(n)
        }
    }

    pub fn with_phase(mut self, phase_exp: u8) -> Self {
        self.phase_exp = phase_exp % 4;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0 && self.phase_exp == 0
    }

    /// True when the operator is the identity up to a global phase.
    pub fn is_trivial(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        // Z^z1 X^x2 = (-1)^(z1.x2) X^x2 Z^z1
        let swap = 2 * bits::parity(self.z_mask & other.x_mask);
        Ok(PauliString {
            n: self.n,
            phase_exp: (self.phase_exp + other.phase_exp + swap) % 4,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
        })
    }

    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase_exp)
    }

    pub fn matrix(&self) -> Matrix {
        let dim = 1 << self.n;
        let mut m = Matrix::zeros(dim, dim);
        for c in 0..dim {
            m[(c ^ self.x_mask, c)] = self.phase() * bits::sign(self.z_mask, c);
        }
        m
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_qubits() != self.n {
            return Err(Error::DimensionMismatch(state.n_qubits(), self.n));
        }
        let phase = self.phase().arg();
        let z = self.z_mask;
        let flipped = state.map_phases(|c| {
            phase
                + if bits::parity(z & c) == 1 {
                    std::f64::consts::PI
                } else {
                    0.0
                }
        });
        Ok(flipped.permute_basis(|c| c ^ self.x_mask))
    }

    /// Recognizes `m` as a Pauli string with a quarter-turn phase.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Option<PauliString> {
        let dim = m.nrows();
        if dim < 2 || !dim.is_power_of_two() || m.ncols() != dim {
            return None;
        }
        let n = dim.trailing_zeros() as usize;
        let x_mask = (0..dim).max_by(|&a, &b| m[(a, 0)].norm().total_cmp(&m[(b, 0)].norm()))?;
        let phase_exp = quarter_turn(m[(x_mask, 0)], tol)?;
        let z_mask = (0..n).fold(0usize, |acc, q| {
            let e = bits::qubit_mask(n, q);
            let v = m[(e ^ x_mask, e)] / i_pow(phase_exp);
            if v.re < 0.0 {
                acc | e
            } else {
                acc
            }
        });
        let p = PauliString {
            n,
            phase_exp,
            x_mask,
            z_mask,
        };
        let expect = p.matrix();
        let dist = m.iter().zip(expect.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        (dist < tol).then_some(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // X Z = -i Y on each qubit carrying both.
        let ys = (self.x_mask & self.z_mask).count_ones() as u8;
        let phase = (self.phase_exp + 3 * (ys % 4)) % 4;
        let prefix = ["+", "+i", "-", "-i"][phase as usize];
        let body: String = (0..self.n)
            .map(|q| {
                match (bits::bit(self.x_mask, self.n, q), bits::bit(self.z_mask, self.n, q)) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (0, 1) => 'Z',
                    _ => 'Y',
                }
            })
            .collect();
        write!(f, "{prefix}{body}")
    }
}
