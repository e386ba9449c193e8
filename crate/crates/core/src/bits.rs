//! Bitstring helpers.
//!
//! Throughout the crate qubit 0 is the most significant bit of a basis index.
//! A bitstring `b_0 b_1 ... b_{n-1}` (qubit 0 first) therefore maps to the
//! index `sum_q b_q 2^(n-1-q)`, and masks such as byproducts `k` or Walsh
//! indices `j` use the same packing.

use crate::error::{Error, Result};

/// Bit position of qubit `q` inside an `n`-qubit index.
#[inline]
pub fn shift(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// Mask with only qubit `q` set.
#[inline]
pub fn qubit_mask(n: usize, q: usize) -> usize {
    1 << shift(n, q)
}

/// Value of qubit `q` in basis index `index`.
#[inline]
pub fn bit(index: usize, n: usize, q: usize) -> u8 {
    ((index >> shift(n, q)) & 1) as u8
}

#[inline]
pub fn parity(x: usize) -> u8 {
    (x.count_ones() & 1) as u8
}

/// `(-1)^(a.b)` for two packed bitstrings.
#[inline]
pub fn sign(a: usize, b: usize) -> f64 {
    if parity(a & b) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn to_index(bits: &[u8]) -> Result<usize> {
    bits.iter().try_fold(0usize, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | b as usize),
        _ => Err(Error::InvalidBitstring(format!("{bits:?}"))),
    })
}

pub fn to_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|q| bit(index, n, q)).collect()
}

pub fn parse(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::InvalidBitstring(s.to_string())),
        })
        .collect()
}

pub fn format(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

/// Mask over `n` qubits with the listed qubits set.
pub fn mask_of(n: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | qubit_mask(n, q))
}

/// Qubits set in `mask`, ascending.
pub fn qubits_of(n: usize, mask: usize) -> Vec<usize> {
    (0..n).filter(|&q| bit(mask, n, q) == 1).collect()
}

/// Scatter the bits of a `k`-bit index onto `targets` of an `n`-qubit index.
pub fn scatter(sub: usize, targets: &[usize], n: usize) -> usize {
    let k = targets.len();
    targets
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &q)| acc | (((sub >> (k - 1 - t)) & 1) << shift(n, q)))
}

/// Gather the bits of `targets` out of an `n`-qubit index.
pub fn gather(index: usize, targets: &[usize], n: usize) -> usize {
    targets
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((index >> shift(n, q)) & 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_zero_is_most_significant() {
        assert_eq!(to_index(&[1, 0, 0]).unwrap(), 4);
        assert_eq!(to_bits(3, 2), vec![1, 1]);
        assert_eq!(bit(4, 3, 0), 1);
        assert_eq!(parse("010").unwrap(), vec![0, 1, 0]);
        assert!(parse("012").is_err());
    }

    #[test]
    fn scatter_gather_inverse() {
        let targets = [3, 0, 2];
        for sub in 0..8 {
            let idx = scatter(sub, &targets, 5);
            assert_eq!(gather(idx, &targets, 5), sub);
        }
    }
}
