//! JSON instance files.
//!
//! ```json
//! {"kind": "qubit", "n": 2, "C": [[2, 5, 0.5]], "D": [[0, 1.0]]}
//! {"kind": "fermion-majorana", "n_modes": 2, "V": [[0, 1, 0.25]], "W": [[0, 1, 2, 3, 1.0]], "shift": 0.0}
//! {"kind": "fermion-number", "n_modes": 2, "Vc": [[0, 1, 1.0, 0.0]], "Wc": [[1, 0, 0, 1, 1.0, 0.0]], "omega": 0.0}
//! ```
//!
//! Qubit couplings may be given in either orientation and are symmetrized.
//! A one-body entry `Vc[p][q]` given without its partner `Vc[q][p]` is
//! completed by conjugation. Duplicate entries and unknown fields are
//! rejected.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{MajoranaHamiltonian, NumberConservingHamiltonian};
use crate::linalg::CMat;
use crate::qubit::TwoLocalHamiltonian;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum InstanceFile {
    #[serde(rename = "qubit")]
    Qubit {
        n: usize,
        #[serde(rename = "C", default)]
        c: Vec<(usize, usize, f64)>,
        #[serde(rename = "D", default)]
        d: Vec<(usize, f64)>,
    },
    #[serde(rename = "fermion-majorana")]
    FermionMajorana {
        n_modes: usize,
        #[serde(rename = "V", default)]
        v: Vec<(usize, usize, f64)>,
        #[serde(rename = "W", default)]
        w: Vec<(usize, usize, usize, usize, f64)>,
        #[serde(default)]
        shift: f64,
    },
    #[serde(rename = "fermion-number")]
    FermionNumber {
        n_modes: usize,
        #[serde(rename = "Vc", default)]
        vc: Vec<(usize, usize, f64, f64)>,
        #[serde(rename = "Wc", default)]
        wc: Vec<(usize, usize, usize, usize, f64, f64)>,
        #[serde(default)]
        omega: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Qubit(TwoLocalHamiltonian),
    Majorana(MajoranaHamiltonian),
    Number(NumberConservingHamiltonian),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Qubit(_) => "qubit",
            Self::Majorana(_) => "fermion-majorana",
            Self::Number(_) => "fermion-number",
        }
    }

    /// Majorana form of a fermionic instance.
    pub fn majorana(&self) -> Result<MajoranaHamiltonian> {
        match self {
            Self::Qubit(_) => Err(Error::validation("instance is not fermionic")),
            Self::Majorana(h) => Ok(h.clone()),
            Self::Number(h) => crate::fermion::to_majorana(h),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        match file {
            InstanceFile::Qubit { n, c, d } => Ok(Self::Qubit(TwoLocalHamiltonian::from_triplets(n, &c, &d)?)),
            InstanceFile::FermionMajorana { n_modes, v, w, shift } => {
                let w: Vec<([usize; 4], f64)> = w.into_iter().map(|(p, q, r, s, x)| ([p, q, r, s], x)).collect();
                Ok(Self::Majorana(MajoranaHamiltonian::from_terms(n_modes, &v, &w, shift)?))
            }
            InstanceFile::FermionNumber { n_modes, vc, wc, omega } => {
                let mut given = BTreeMap::new();
                for (p, q, re, im) in vc {
                    if p >= n_modes || q >= n_modes {
                        return Err(Error::OutOfRange { index: p.max(q), bound: n_modes });
                    }
                    if given.insert((p, q), Complex64::new(re, im)).is_some() {
                        return Err(Error::validation(format!("duplicate one-body entry ({p}, {q})")));
                    }
                }
                let mut m = CMat::zeros(n_modes, n_modes);
                for (&(p, q), &z) in &given {
                    m[(p, q)] = z;
                    if !given.contains_key(&(q, p)) {
                        m[(q, p)] = z.conj();
                    }
                }
                let mut w = BTreeMap::new();
                for (p, q, r, s, re, im) in wc {
                    if w.insert([p, q, r, s], Complex64::new(re, im)).is_some() {
                        return Err(Error::validation(format!("duplicate two-body entry ({p}, {q}, {r}, {s})")));
                    }
                }
                Ok(Self::Number(NumberConservingHamiltonian::new(n_modes, m, w, omega)?))
            }
        }
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        match inst {
            Instance::Qubit(h) => InstanceFile::Qubit {
                n: h.n_qubits(),
                c: h.couplings().collect(),
                d: h.linear().iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect(),
            },
            Instance::Majorana(h) => {
                let d = 2 * h.n_modes();
                let vm = h.v().matrix();
                let v = (0..d)
                    .flat_map(|p| ((p + 1)..d).map(move |q| (p, q)))
                    .filter(|&(p, q)| vm[(p, q)] != 0.0)
                    .map(|(p, q)| (p, q, vm[(p, q)]))
                    .collect();
                let w = h.quartic().iter().map(|(&[p, q, r, s], &x)| (p, q, r, s, x)).collect();
                InstanceFile::FermionMajorana { n_modes: h.n_modes(), v, w, shift: h.shift() }
            }
            Instance::Number(h) => {
                let n = h.n_modes();
                let vc = (0..n)
                    .flat_map(|p| (0..n).map(move |q| (p, q)))
                    .filter(|&(p, q)| h.vc()[(p, q)] != Complex64::new(0.0, 0.0))
                    .map(|(p, q)| (p, q, h.vc()[(p, q)].re, h.vc()[(p, q)].im))
                    .collect();
                let wc = h.wc().iter().map(|(&[p, q, r, s], z)| (p, q, r, s, z.re, z.im)).collect();
                InstanceFile::FermionNumber { n_modes: n, vc, wc, omega: h.omega() }
            }
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Instance::try_from(file)
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(inst)).expect("instance serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_roundtrip() {
        let text = r#"{"kind": "qubit", "n": 2, "C": [[5, 2, 0.5]], "D": [[0, 1.0]]}"#;
        let inst = parse_instance(text).unwrap();
        let Instance::Qubit(h) = &inst else { panic!("wrong kind") };
        assert_eq!(h.coupling(2, 5), 0.5);
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            r#"{"kind": "qubit", "n": 2, "C": [[0, 1, 0.5]]}"#,
            r#"{"kind": "qubit", "n": 2, "C": [[0, 3, 0.5], [3, 0, 0.5]]}"#,
            r#"{"kind": "qubit", "n": 2, "extra": 1}"#,
            r#"{"kind": "spin", "n": 2}"#,
            r#"{"kind": "fermion-majorana", "n_modes": 2, "W": [[0, 2, 1, 3, 1.0]]}"#,
            r#"{"kind": "fermion-number", "n_modes": 2, "Vc": [[0, 0, 1.0, 0.5]]}"#,
            r#"{"kind": "fermion-number", "n_modes": 2, "Wc": [[0, 1, 0, 1, 1.0, 0.0], [0, 1, 0, 1, 1.0, 0.0]]}"#,
        ] {
            assert!(parse_instance(text).is_err(), "{text}");
        }
        let err = parse_instance(r#"{"kind": "qubit", "n": 2, "C": [[0, 1, 0.5]]}"#).unwrap_err();
        assert!(err.to_string().contains("0 and 1"));
    }

    #[test]
    fn fermion_roundtrips() {
        let rich = Instance::Number(crate::fermion::richardson(2).unwrap());
        assert_eq!(parse_instance(&instance_to_json(&rich)).unwrap(), rich);
        let maj = Instance::Majorana(rich.majorana().unwrap());
        assert_eq!(parse_instance(&instance_to_json(&maj)).unwrap(), maj);
        let text = r#"{"kind": "fermion-number", "n_modes": 2, "Vc": [[0, 1, 1.0, 2.0]]}"#;
        let Instance::Number(h) = parse_instance(text).unwrap() else { panic!("wrong kind") };
        assert_eq!(h.vc()[(1, 0)], Complex64::new(1.0, -2.0));
    }
}
