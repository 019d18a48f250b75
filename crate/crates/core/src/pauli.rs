//! Pauli strings on up to 63 qubits as bit masks.
//!
//! A [`PauliString`] is `i^phase · X^x · Z^z` where `X^x` is the product of
//! `X_a` over the set bits `a` of `x` (likewise `Z^z`). Qubit `a` is bit `a`
//! of a computational basis index, and bit value 0 is the `Z = +1` state.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, DenseHermitian};

/// Largest register handled by dense builders (2^14 amplitudes).
pub const MAX_DENSE_QUBITS: usize = 14;

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    /// Power of `i`, mod 4.
    pub phase: u8,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0, phase: 0 };

    pub fn x(q: usize) -> Self {
        Self { x: 1 << q, z: 0, phase: 0 }
    }

    pub fn y(q: usize) -> Self {
        // Y = i X Z
        Self { x: 1 << q, z: 1 << q, phase: 1 }
    }

    pub fn z(q: usize) -> Self {
        Self { x: 0, z: 1 << q, phase: 0 }
    }

    pub fn coefficient(&self) -> Complex64 {
        I_POWERS[(self.phase & 3) as usize]
    }

    pub fn scaled_by_i(self, k: u8) -> Self {
        Self { phase: (self.phase + k) & 3, ..self }
    }

    /// Qubits acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Image of basis state `b`: returns `(amplitude, b')` with
    /// `P|b⟩ = amplitude · |b'⟩`.
    #[inline]
    pub fn apply_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = (self.z & b).count_ones() & 1;
        let k = (self.phase as u32 + 2 * sign) & 3;
        (I_POWERS[k as usize], b ^ self.x)
    }

    /// Dense matrix on `n` qubits.
    pub fn to_dense(&self, n: usize) -> Result<CMat> {
        check_register(n)?;
        let dim = 1usize << n;
        let mut m = CMat::zeros(dim, dim);
        for b in 0..dim as u64 {
            let (amp, out) = self.apply_basis(b);
            m[(out as usize, b as usize)] += amp;
        }
        Ok(m)
    }

    pub fn apply(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(psi.len());
        for (b, &a) in psi.iter().enumerate() {
            let (amp, dst) = self.apply_basis(b as u64);
            out[dst as usize] += amp * a;
        }
        out
    }

    pub fn expectation(&self, psi: &DVector<Complex64>) -> Complex64 {
        psi.dotc(&self.apply(psi))
    }
}

impl std::ops::Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: PauliString) -> PauliString {
        // Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}
        let swap = ((self.z & rhs.x).count_ones() & 1) as u8;
        PauliString {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: (self.phase + rhs.phase + 2 * swap) & 3,
        }
    }
}

pub(crate) fn check_register(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge {
            what: "dense register qubits",
            value: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// Linear combination of Pauli strings.
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    pub terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coeff: impl Into<Complex64>, p: PauliString) {
        self.terms.push((coeff.into(), p));
    }

    pub fn to_dense(&self, n: usize) -> Result<CMat> {
        check_register(n)?;
        let dim = 1usize << n;
        let mut m = CMat::zeros(dim, dim);
        for b in 0..dim as u64 {
            for (c, p) in &self.terms {
                let (amp, out) = p.apply_basis(b);
                m[(out as usize, b as usize)] += c * amp;
            }
        }
        Ok(m)
    }

    pub fn to_hermitian(&self, n: usize) -> Result<DenseHermitian> {
        DenseHermitian::new(self.to_dense(n)?)
    }

    pub fn expectation(&self, psi: &DVector<Complex64>) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, p)| c * p.expectation(psi))
            .sum()
    }
}
