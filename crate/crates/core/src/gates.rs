//! Dense gate matrices. Multi-qubit matrices list their first qubit as the
//! most significant index bit, matching [`crate::bits`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bits;

pub type Matrix = DMatrix<Complex64>;

const UNITARY_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(rows: usize, data: &[f64]) -> Matrix {
    Matrix::from_row_iterator(rows, rows, data.iter().map(|&v| c(v, 0.0)))
}

pub fn identity(n_qubits: usize) -> Matrix {
    Matrix::identity(1 << n_qubits, 1 << n_qubits)
}

pub fn h() -> Matrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    real(2, &[r, r, r, -r])
}

pub fn x() -> Matrix {
    real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn y() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn z() -> Matrix {
    real(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn s() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

pub fn t() -> Matrix {
    let p = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    Matrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), p])
}

/// `exp(i theta X)`.
pub fn x_rotation(theta: f64) -> Matrix {
    let (s, co) = theta.sin_cos();
    Matrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, s), c(0.0, s), c(co, 0.0)])
}

/// `exp(i theta Z)`.
pub fn z_rotation(theta: f64) -> Matrix {
    Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::from_polar(1.0, theta),
        Complex64::from_polar(1.0, -theta),
    ]))
}

/// Control on the first qubit, target on the second.
pub fn cx() -> Matrix {
    real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

pub fn cz() -> Matrix {
    real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, -1.0,
        ],
    )
}

pub fn swap() -> Matrix {
    real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Toffoli with controls on the first two qubits.
pub fn ccx() -> Matrix {
    let mut m = identity(3);
    m[(6, 6)] = c(0.0, 0.0);
    m[(7, 7)] = c(0.0, 0.0);
    m[(6, 7)] = c(1.0, 0.0);
    m[(7, 6)] = c(1.0, 0.0);
    m
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_deviation(m: &Matrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - c(expect, 0.0)).norm());
        }
    }
    worst
}

pub fn is_unitary(m: &Matrix) -> bool {
    unitarity_deviation(m) < UNITARY_TOL
}

/// Number of qubits a square matrix acts on, if its size is a power of two.
pub fn arity(m: &Matrix) -> Option<usize> {
    let d = m.nrows();
    (m.ncols() == d && d.is_power_of_two() && d > 1).then(|| d.trailing_zeros() as usize)
}

/// Embed `m` acting on `targets` into the full `n`-qubit operator.
pub fn embed(m: &Matrix, targets: &[usize], n: usize) -> Matrix {
    let dim = 1 << n;
    let tmask = bits::mask_of(n, targets);
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let rest = col & !tmask;
        let sub_col = bits::gather(col, targets, n);
        for sub_row in 0..m.nrows() {
            let v = m[(sub_row, sub_col)];
            if v != c(0.0, 0.0) {
                out[(rest | bits::scatter(sub_row, targets, n), col)] = v;
            }
        }
    }
    out
}

/// Maximum entry-wise distance between `a` and `b` after removing the best
/// global phase.
pub fn distance_up_to_phase(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}
