//! Majorana operators and polynomials in them.
//!
//! Majorana `c_p` (0-based, `p < 2n`) acts on mode `j = p / 2`; under the
//! Jordan–Wigner map `c_{2j} = Z_0…Z_{j-1} X_j` and
//! `c_{2j+1} = Z_0…Z_{j-1} Y_j`. The annihilator of mode `j` is
//! `a_j = (c_{2j} + i c_{2j+1}) / 2`.
//!
//! A monomial is a set of Majorana indices stored as a bit mask and stands
//! for the product of its members in increasing index order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, DenseHermitian};
use crate::pauli::{check_register, PauliString, PauliSum};

/// Largest number of modes handled by the bit-mask representation.
pub const MAX_MODES: usize = 32;

/// Jordan–Wigner image of `c_p` on `n_modes` modes.
pub fn jordan_wigner_majorana(p: usize, n_modes: usize) -> Result<PauliString> {
    if p >= 2 * n_modes {
        return Err(Error::OutOfRange { index: p, bound: 2 * n_modes });
    }
    let j = p / 2;
    let string = PauliString { x: 0, z: (1u64 << j) - 1, phase: 0 };
    let site = if p.is_multiple_of(2) { PauliString::x(j) } else { PauliString::y(j) };
    Ok(string * site)
}

/// Sign of `m1 · m2` relative to the ordered monomial `m1 ^ m2`.
pub fn monomial_product_sign(m1: u64, m2: u64) -> f64 {
    let mut swaps = 0u32;
    let mut rest = m2;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if b >= 63 { 0 } else { !((1u64 << (b + 1)) - 1) };
        swaps += (m1 & above).count_ones();
    }
    if swaps.is_multiple_of(2) { 1.0 } else { -1.0 }
}

/// Sign picked up by reversing the order of a degree-`k` monomial.
pub fn reversal_sign(k: u32) -> f64 {
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 }
}

/// Pauli string of an ordered Majorana monomial.
pub fn monomial_pauli(mask: u64, n_modes: usize) -> Result<PauliString> {
    let mut out = PauliString::IDENTITY;
    let mut rest = mask;
    while rest != 0 {
        let p = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out = out * jordan_wigner_majorana(p, n_modes)?;
    }
    Ok(out)
}

/// Complex linear combination of Majorana monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MajoranaPoly {
    pub terms: BTreeMap<u64, Complex64>,
}

impl MajoranaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: impl Into<Complex64>) -> Self {
        let mut p = Self::zero();
        p.add_term(0, c.into());
        p
    }

    pub fn majorana(p: usize) -> Self {
        let mut out = Self::zero();
        out.add_term(1u64 << p, Complex64::new(1.0, 0.0));
        out
    }

    /// `a_j = (c_{2j} + i c_{2j+1}) / 2`.
    pub fn annihilator(j: usize) -> Self {
        let mut out = Self::zero();
        out.add_term(1u64 << (2 * j), Complex64::new(0.5, 0.0));
        out.add_term(1u64 << (2 * j + 1), Complex64::new(0.0, 0.5));
        out
    }

    pub fn creator(j: usize) -> Self {
        Self::annihilator(j).dagger()
    }

    pub fn add_term(&mut self, mask: u64, c: Complex64) {
        let e = self.terms.entry(mask).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    pub fn add(&mut self, other: &MajoranaPoly) {
        for (&m, &c) in &other.terms {
            self.add_term(m, c);
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { terms: self.terms.iter().map(|(&m, &c)| (m, c * s)).collect() }
    }

    pub fn mul(&self, other: &MajoranaPoly) -> Self {
        let mut out = Self::zero();
        for (&m1, &c1) in &self.terms {
            for (&m2, &c2) in &other.terms {
                out.add_term(m1 ^ m2, c1 * c2 * monomial_product_sign(m1, m2));
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&m, &c)| (m, c.conj() * reversal_sign(m.count_ones())))
                .collect(),
        }
    }

    /// Drop coefficients with modulus at most `eps`.
    pub fn pruned(mut self, eps: f64) -> Self {
        self.terms.retain(|_, c| c.norm() > eps);
        self
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn distance(&self, other: &MajoranaPoly) -> f64 {
        let mut diff = self.clone();
        diff.add(&other.scaled(Complex64::new(-1.0, 0.0)));
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn pauli_sum(&self, n_modes: usize) -> Result<PauliSum> {
        let mut sum = PauliSum::new();
        for (&m, &c) in &self.terms {
            if c.norm() > 0.0 {
                let p = monomial_pauli(m, n_modes)?;
                sum.push(c, p);
            }
        }
        Ok(sum)
    }

    pub fn to_dense(&self, n_modes: usize) -> Result<CMat> {
        check_register(n_modes)?;
        self.pauli_sum(n_modes)?.to_dense(n_modes)
    }

    pub fn to_hermitian(&self, n_modes: usize) -> Result<DenseHermitian> {
        DenseHermitian::new(self.to_dense(n_modes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_majoranas() {
        assert_eq!(jordan_wigner_majorana(0, 2).unwrap(), PauliString::x(0));
        let c3 = jordan_wigner_majorana(3, 2).unwrap();
        assert_eq!(c3, PauliString::z(0) * PauliString::y(1));
        assert!(jordan_wigner_majorana(4, 2).is_err());
    }

    #[test]
    fn anticommutation_dense() {
        let n = 3;
        let mats: Vec<CMat> = (0..2 * n)
            .map(|p| jordan_wigner_majorana(p, n).unwrap().to_dense(n).unwrap())
            .collect();
        let id = CMat::identity(1 << n, 1 << n);
        for p in 0..2 * n {
            for q in 0..2 * n {
                let ac = &mats[p] * &mats[q] + &mats[q] * &mats[p];
                let expected = if p == q { &id * Complex64::new(2.0, 0.0) } else { CMat::zeros(1 << n, 1 << n) };
                assert!((ac - expected).camax() < 1e-14);
            }
        }
    }

    #[test]
    fn product_sign_matches_dense() {
        let n = 3;
        for m1 in 0u64..64 {
            for m2 in [0b000011u64, 0b101000, 0b010110, 0b111111, 0b000100] {
                let lhs = monomial_pauli(m1, n).unwrap() * monomial_pauli(m2, n).unwrap();
                let rhs = monomial_pauli(m1 ^ m2, n).unwrap();
                let ratio = lhs.coefficient() / rhs.coefficient();
                assert!((ratio.re - monomial_product_sign(m1, m2)).abs() < 1e-15 && ratio.im.abs() < 1e-15);
                assert_eq!((lhs.x, lhs.z), (rhs.x, rhs.z));
            }
        }
    }

    #[test]
    fn ladder_operators() {
        let n = 2;
        let a0 = MajoranaPoly::annihilator(0).to_dense(n).unwrap();
        // a_0 |1,0⟩ = |0,0⟩ with bit 0 = mode 0
        assert!((a0[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let a1 = MajoranaPoly::annihilator(1);
        let ad0 = MajoranaPoly::creator(0);
        // {a_1, a_0†} = 0, {a_0, a_0†} = 1
        let mut anti = a1.mul(&ad0);
        anti.add(&ad0.mul(&a1));
        assert!(anti.pruned(1e-15).terms.is_empty());
        let mut one = MajoranaPoly::annihilator(0).mul(&ad0);
        one.add(&ad0.mul(&MajoranaPoly::annihilator(0)));
        assert!(one.distance(&MajoranaPoly::scalar(1.0)) < 1e-15);
    }

    #[test]
    fn number_operator_form() {
        let n0 = MajoranaPoly::creator(0).mul(&MajoranaPoly::annihilator(0));
        // a†a = (1 + i c_0 c_1) / 2
        let mut expected = MajoranaPoly::scalar(0.5);
        expected.add_term(0b11, Complex64::new(0.0, 0.5));
        assert!(n0.distance(&expected) < 1e-15);
    }
}
