//! Partial trace onto qubit subsets and purity.
//!
//! The kernel iterates the sparse support grouped by environment bits rather
//! than the dense 2^N space, so cost is O(support²) worst case. For
//! exact-mode states (`±1/√r` amplitudes) the reduced matrix is emitted as
//! integer counts over `r`, and purity becomes the exact rational
//! `Σ counts² / r²`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::state::{PureState, QubitSubset};

/// Largest subset a reduced matrix may keep (dimension cap 4096).
pub const MAX_KEEP: usize = 12;

/// An exact non-negative rational, kept unreduced as produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactRatio {
    pub num: i128,
    pub den: i128,
}

impl ExactRatio {
    pub fn new(num: i128, den: i128) -> Self {
        debug_assert!(den > 0);
        ExactRatio { num, den }
    }

    pub fn reduced(&self) -> ExactRatio {
        let g = self.num.gcd(&self.den);
        if g == 0 {
            return ExactRatio { num: 0, den: 1 };
        }
        ExactRatio { num: self.num / g, den: self.den / g }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Value equality by cross-multiplication.
    pub fn eq_value(&self, other: &ExactRatio) -> bool {
        self.num * other.den == other.num * self.den
    }
}

/// `Tr ρ²` of a reduced state, with the exact rational when available.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Purity {
    pub value: f64,
    pub exact: Option<ExactRatio>,
}

/// Integer-count form of an exact reduced matrix: `entries = counts / scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDensity {
    pub counts: Vec<i64>,
    pub scale: u64,
}

/// Reduced density matrix on a kept subset, row-major.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    exact: Option<ExactDensity>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, a: usize, b: usize) -> Complex64 {
        self.entries[a * self.dim + b]
    }

    pub fn exact(&self) -> Option<&ExactDensity> {
        self.exact.as_ref()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|a| self.entry(a, a)).sum()
    }

    /// Row-major `[re, im]` pairs, for debugging dumps.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim)
            .map(|a| (0..self.dim).map(|b| [self.entry(a, b).re, self.entry(a, b).im]).collect())
            .collect();
        serde_json::json!({ "dim": self.dim, "entries": rows })
    }
}

/// Compresses the bits of `value` at the given 1-based qubit labels
/// (ascending) into a dense little index, first label most significant.
pub(crate) fn compress_bits(value: u64, qubits: &[usize], n: usize) -> u64 {
    let mut out = 0u64;
    for &q in qubits {
        out = (out << 1) | ((value >> (n - q)) & 1);
    }
    out
}

/// `ρ_keep[a][b] = Σ_e ψ[a⊗e] ψ*[b⊗e]`, environment bits summed out.
pub fn partial_trace(psi: &PureState, keep: &QubitSubset) -> Result<DensityMatrix> {
    let n = psi.n_qubits();
    if keep.len() > MAX_KEEP {
        return Err(Error::SubsetTooLarge { size: keep.len(), cap: MAX_KEEP });
    }
    if let Some(&max) = keep.indices().last() {
        if max > n {
            return Err(Error::IndexOutOfRange { index: max, n });
        }
    }
    let env: Vec<usize> = (1..=n).filter(|q| !keep.contains(*q)).collect();
    let dim = 1usize << keep.len();

    // group the support by environment bits; BTreeMap keeps accumulation
    // order deterministic
    let mut groups: BTreeMap<u64, Vec<(u64, Complex64, i8)>> = BTreeMap::new();
    for (idx, amp) in psi.iter() {
        let e = compress_bits(idx.value(), &env, n);
        let a = compress_bits(idx.value(), keep.indices(), n);
        let sign = amp.exact.map_or(0, |x| x.sign);
        groups.entry(e).or_default().push((a, amp.as_complex(), sign));
    }

    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut counts = if psi.is_exact() { Some(vec![0i64; dim * dim]) } else { None };
    for members in groups.values() {
        for &(a, amp_a, sign_a) in members {
            for &(b, amp_b, sign_b) in members {
                entries[a as usize * dim + b as usize] += amp_a * amp_b.conj();
                if let Some(c) = counts.as_mut() {
                    c[a as usize * dim + b as usize] += i64::from(sign_a) * i64::from(sign_b);
                }
            }
        }
    }

    let exact = counts.map(|counts| ExactDensity { counts, scale: psi.exact_scale().unwrap() });
    Ok(DensityMatrix { dim, entries, exact })
}

/// `Tr ρ² = Σ_{a,b} |ρ_ab|²`; exact path returns `Σ counts² / r²`.
pub fn purity(rho: &DensityMatrix) -> Purity {
    if let Some(exact) = &rho.exact {
        let num: i128 = exact.counts.iter().map(|&c| i128::from(c) * i128::from(c)).sum();
        let den = i128::from(exact.scale) * i128::from(exact.scale);
        let ratio = ExactRatio::new(num, den);
        return Purity { value: ratio.as_f64(), exact: Some(ratio) };
    }
    let value: f64 = rho.entries.iter().map(|e| e.norm_sqr()).sum();
    Purity { value, exact: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_entries(2, &[("00", h, 0.0), ("11", h, 0.0)]).unwrap()
    }

    #[test]
    fn bell_single_qubit_is_maximally_mixed() {
        let rho = partial_trace(&bell(), &QubitSubset::new(vec![1], 2).unwrap()).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-15);
        assert!(rho.entry(0, 1).norm() < 1e-15);
        let exact = rho.exact().unwrap();
        assert_eq!(exact.counts, vec![1, 0, 0, 1]);
        assert_eq!(exact.scale, 2);
        let p = purity(&rho);
        assert_eq!(p.exact.unwrap().reduced(), ExactRatio::new(1, 2));
    }

    #[test]
    fn product_state_single_qubit_is_pure() {
        let s = PureState::from_entries(2, &[("00", 1.0, 0.0)]).unwrap();
        let rho = partial_trace(&s, &QubitSubset::new(vec![1], 2).unwrap()).unwrap();
        assert!((rho.entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!(rho.entry(1, 1).norm() < 1e-15);
        assert!((purity(&rho).value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_keep_is_a_projector() {
        let rho = partial_trace(&bell(), &QubitSubset::full(2)).unwrap();
        assert_eq!(rho.dim(), 4);
        assert!((purity(&rho).value - 1.0).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complement_purities_match() {
        // Schmidt symmetry on an asymmetric state
        let s = PureState::from_entries_normalized(
            3,
            &[("000", 0.6, 0.0), ("011", 0.48, 0.0), ("101", 0.4, 0.36), ("110", 0.0, 0.35)],
        )
        .unwrap();
        for keep in [vec![1], vec![2], vec![1, 3]] {
            let sub = QubitSubset::new(keep, 3).unwrap();
            let comp = sub.complement(3).unwrap();
            let p1 = purity(&partial_trace(&s, &sub).unwrap());
            let p2 = purity(&partial_trace(&s, &comp).unwrap());
            assert!((p1.value - p2.value).abs() < 1e-10);
        }
    }

    #[test]
    fn keep_cap_enforced() {
        let s = bell();
        let big = QubitSubset::new((1..=13).collect(), 13).unwrap();
        assert!(matches!(
            partial_trace(&s, &big),
            Err(Error::SubsetTooLarge { size: 13, cap: MAX_KEEP })
        ));
    }

    #[test]
    fn subset_beyond_state_rejected() {
        let s = bell();
        let sub = QubitSubset::new(vec![3], 3).unwrap();
        assert!(matches!(partial_trace(&s, &sub), Err(Error::IndexOutOfRange { index: 3, n: 2 })));
    }

    #[test]
    fn exact_ratio_reduction() {
        let r = ExactRatio::new(128, 1024);
        assert_eq!(r.reduced(), ExactRatio::new(1, 8));
        assert!(r.eq_value(&ExactRatio::new(1, 8)));
        assert!(!r.eq_value(&ExactRatio::new(1, 4)));
    }
}
