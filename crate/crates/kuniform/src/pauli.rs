//! Pauli-string expectations and the F-invariants.
//!
//! For a qubit subset `T`, the invariant `F_T` is the sum of squared
//! expectation values of all Pauli strings whose non-identity support is
//! exactly `T` (3^|T| strings). These reconstruct subset purities through
//!
//! ```text
//! π_S = 2^{-|S|} (1 + Σ_{∅≠T⊆S} F_T)
//! ```
//!
//! which is the second, trace-free route to the same purity the partial
//! trace computes — the two are cross-checked on every uniformity verdict.
//!
//! Expectations are evaluated sparsely over the support: a string with X/Y
//! flip mask `m` pairs the amplitude at `x` with the one at `x XOR m`, with
//! a ±1/±i phase collected from the Z and Y positions of `x`. No dense 2^N
//! operator is ever materialized.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::reduce::{ExactRatio, Purity};
use crate::state::{PureState, QubitSubset};

/// Cap on `|T|` for invariant sums (3^6 = 729 strings).
pub const MAX_F_SUBSET: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A choice of {I, X, Y, Z} per qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString { letters }
    }

    /// Identity string with the given letters placed at 1-based qubits.
    pub fn from_ops(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n_qubits];
        for &(q, p) in ops {
            if q == 0 || q > n_qubits {
                return Err(Error::IndexOutOfRange { index: q, n: n_qubits });
            }
            letters[q - 1] = p;
        }
        Ok(PauliString { letters })
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q - 1]
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> QubitSubset {
        let n = self.letters.len();
        let indices: Vec<usize> = (1..=n).filter(|&q| self.letter(q) != Pauli::I).collect();
        QubitSubset::new(indices, n).expect("support indices are in range")
    }

    fn masks(&self) -> PauliMasks {
        let n = self.letters.len();
        let mut flip = 0u64;
        let mut phase = 0u64;
        let mut y_count = 0u32;
        for q in 1..=n {
            let bit = 1u64 << (n - q);
            match self.letter(q) {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    phase |= bit;
                    y_count += 1;
                }
                Pauli::Z => phase |= bit,
            }
        }
        PauliMasks { flip, phase, y_count }
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

struct PauliMasks {
    /// Bits flipped by the string (X and Y positions).
    flip: u64,
    /// Bits contributing a (-1) per set bit of the input ket (Z and Y).
    phase: u64,
    y_count: u32,
}

struct Expectation {
    value: f64,
    /// Numerator over the shared scale `r`, present for exact-mode states.
    exact_num: Option<i64>,
}

fn expectation_inner(psi: &PureState, p: &PauliString) -> Result<Expectation> {
    if p.n_qubits() != psi.n_qubits() {
        return Err(Error::DimensionMismatch { left: psi.n_qubits(), right: p.n_qubits() });
    }
    expectation_masks(psi, &p.masks())
}

fn expectation_masks(psi: &PureState, m: &PauliMasks) -> Result<Expectation> {
    use crate::state::BasisIndex;
    if psi.is_exact() {
        let r = psi.exact_scale().unwrap();
        let mut acc: i64 = 0;
        for (idx, amp) in psi.iter() {
            let Some(partner) = psi.get(BasisIndex::new_unchecked(idx.value() ^ m.flip)) else {
                continue;
            };
            let parity = (idx.value() & m.phase).count_ones() & 1;
            let term = i64::from(amp.exact.unwrap().sign) * i64::from(partner.exact.unwrap().sign);
            acc += if parity == 1 { -term } else { term };
        }
        // i^y rotates the whole accumulator; odd powers would make the
        // expectation imaginary, which cancellation already forbids
        let (re, im) = match m.y_count % 4 {
            0 => (acc, 0),
            1 => (0, acc),
            2 => (-acc, 0),
            _ => (0, -acc),
        };
        if im != 0 {
            return Err(Error::NonHermitianResidue { imag: im as f64 / r as f64 });
        }
        return Ok(Expectation { value: re as f64 / r as f64, exact_num: Some(re) });
    }

    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, amp) in psi.iter() {
        let Some(partner) = psi.get(BasisIndex::new_unchecked(idx.value() ^ m.flip)) else {
            continue;
        };
        let parity = (idx.value() & m.phase).count_ones() & 1;
        let term = partner.as_complex().conj() * amp.as_complex();
        acc += if parity == 1 { -term } else { term };
    }
    let rot = match m.y_count % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let total = acc * rot;
    if total.im.abs() >= 1e-10 {
        return Err(Error::NonHermitianResidue { imag: total.im });
    }
    Ok(Expectation { value: total.re, exact_num: None })
}

/// `⟨ψ|P|ψ⟩` for a Hermitian Pauli string (always real).
pub fn pauli_expectation(psi: &PureState, p: &PauliString) -> Result<f64> {
    expectation_inner(psi, p).map(|e| e.value)
}

/// `F_T`: the invariant mass carried by exactly the subset `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct FValue {
    pub subset: QubitSubset,
    pub value: f64,
    pub exact: Option<ExactRatio>,
}

/// Sums `⟨P⟩²` over the 3^|T| strings supported exactly on `subset`.
pub fn f_value(psi: &PureState, subset: &QubitSubset) -> Result<FValue> {
    if subset.len() > MAX_F_SUBSET {
        return Err(Error::SubsetTooLarge { size: subset.len(), cap: MAX_F_SUBSET });
    }
    if let Some(&max) = subset.indices().last() {
        if max > psi.n_qubits() {
            return Err(Error::IndexOutOfRange { index: max, n: psi.n_qubits() });
        }
    }
    let n = psi.n_qubits();
    let k = subset.len();
    let total = 3usize.pow(k as u32);
    let mut value = 0.0f64;
    let mut exact_num: Option<i128> = if psi.is_exact() { Some(0) } else { None };
    for code in 0..total {
        // letters in base 3 (X, Y, Z) along the subset, masks built directly
        let mut masks = PauliMasks { flip: 0, phase: 0, y_count: 0 };
        let mut c = code;
        for &q in subset.indices() {
            let bit = 1u64 << (n - q);
            match c % 3 {
                0 => masks.flip |= bit,
                1 => {
                    masks.flip |= bit;
                    masks.phase |= bit;
                    masks.y_count += 1;
                }
                _ => masks.phase |= bit,
            }
            c /= 3;
        }
        let e = expectation_masks(psi, &masks)?;
        value += e.value * e.value;
        if let (Some(acc), Some(num)) = (exact_num.as_mut(), e.exact_num) {
            *acc += i128::from(num) * i128::from(num);
        }
    }
    let exact = exact_num.map(|num| {
        let r = i128::from(psi.exact_scale().unwrap());
        ExactRatio::new(num, r * r)
    });
    Ok(FValue { subset: subset.clone(), value, exact })
}

/// Purity of `ρ_subset` reconstructed from the invariants alone:
/// `2^{-|S|} (1 + Σ_{∅≠T⊆S} F_T)`.
pub fn purity_via_invariants(psi: &PureState, subset: &QubitSubset) -> Result<Purity> {
    if subset.len() > MAX_F_SUBSET {
        return Err(Error::SubsetTooLarge { size: subset.len(), cap: MAX_F_SUBSET });
    }
    let mut total = 1.0f64;
    let mut exact_sum: Option<i128> = if psi.is_exact() { Some(0) } else { None };
    for t in subset.non_empty_subsets() {
        let f = f_value(psi, &t)?;
        total += f.value;
        if let Some(acc) = exact_sum.as_mut() {
            *acc += f.exact.unwrap().num;
        }
    }
    let scale = (1u64 << subset.len()) as f64;
    let value = total / scale;
    let exact = exact_sum.map(|sum| {
        let r = i128::from(psi.exact_scale().unwrap());
        ExactRatio::new(r * r + sum, r * r * i128::from(1u64 << subset.len()))
    });
    Ok(Purity { value, exact })
}
