//! Sparse pure states over computational basis kets.
//!
//! Bit convention: qubit 1 (the leftmost label in a bitstring) is the most
//! significant bit of the basis index, so the bitstring `011` on 3 qubits is
//! index 3. External qubit labels are 1-based everywhere; bit positions are
//! an internal detail.
//!
//! A state whose amplitudes are all `±1/√r` with `r` equal to the support
//! size is stored in *exact mode*: every amplitude carries its sign and the
//! shared scale `r`, which downstream code uses for zero-tolerance rational
//! arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the number of qubits; keeps dense enumeration paths addressable.
pub const MAX_QUBITS: usize = 30;
/// Amplitudes below this magnitude are dropped as zeros.
pub const AMPLITUDE_EPS: f64 = 1e-14;
/// Tolerance on `Σ|a|² = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance used when auto-detecting exact `±1/√r` amplitudes.
const EXACT_DETECT_TOL: f64 = 1e-12;

/// Index of a computational basis ket, `0 ≤ value < 2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(u64);

impl BasisIndex {
    /// No range validation; for internal hot paths where `value` is already
    /// known to fit.
    pub(crate) fn new_unchecked(value: u64) -> Self {
        BasisIndex(value)
    }

    pub fn new(value: u64, n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if value >> n_qubits != 0 {
            return Err(Error::BadBitstring {
                bitstring: format!("{value:b}"),
                reason: format!("index {value} does not fit in {n_qubits} qubits"),
            });
        }
        Ok(BasisIndex(value))
    }

    /// Parses a `0`/`1` string, qubit 1 leftmost.
    pub fn from_bitstring(bits: &str, n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if bits.len() != n_qubits {
            return Err(Error::BadBitstring {
                bitstring: bits.to_string(),
                reason: format!("expected {n_qubits} bits, got {}", bits.len()),
            });
        }
        let mut value = 0u64;
        for c in bits.chars() {
            value <<= 1;
            match c {
                '0' => {}
                '1' => value |= 1,
                other => {
                    return Err(Error::BadBitstring {
                        bitstring: bits.to_string(),
                        reason: format!("invalid character {other:?}"),
                    })
                }
            }
        }
        Ok(BasisIndex(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Bit of 1-based qubit `q` (qubit 1 = most significant).
    pub fn bit(self, q: usize, n_qubits: usize) -> u8 {
        ((self.0 >> (n_qubits - q)) & 1) as u8
    }

    pub fn to_bitstring(self, n_qubits: usize) -> String {
        (1..=n_qubits).map(|q| if self.bit(q, n_qubits) == 1 { '1' } else { '0' }).collect()
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    Ok(())
}

/// Exact representation `sign/√scale` of an amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactAmp {
    /// `+1` or `-1`.
    pub sign: i8,
    /// The shared support size `r`.
    pub scale: u64,
}

/// One complex amplitude, optionally carrying its exact dyadic-root form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
    pub exact: Option<ExactAmp>,
}

impl Amplitude {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// A strictly increasing set of 1-based qubit labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitSubset {
    indices: Vec<usize>,
}

impl QubitSubset {
    /// Builds a subset of `1..=n_qubits`; input order is irrelevant,
    /// duplicates are rejected.
    pub fn new(mut indices: Vec<usize>, n_qubits: usize) -> Result<Self> {
        indices.sort_unstable();
        for window in indices.windows(2) {
            if window[0] == window[1] {
                return Err(Error::DuplicateIndex { index: window[0] });
            }
        }
        for &q in &indices {
            if q == 0 || q > n_qubits {
                return Err(Error::IndexOutOfRange { index: q, n: n_qubits });
            }
        }
        Ok(QubitSubset { indices })
    }

    pub fn empty() -> Self {
        QubitSubset { indices: Vec::new() }
    }

    pub fn full(n_qubits: usize) -> Self {
        QubitSubset { indices: (1..=n_qubits).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    /// Sorted complement within `1..=n_qubits`. May be empty.
    pub fn complement(&self, n_qubits: usize) -> Result<QubitSubset> {
        if let Some(&max) = self.indices.last() {
            if max > n_qubits {
                return Err(Error::IndexOutOfRange { index: max, n: n_qubits });
            }
        }
        Ok(QubitSubset {
            indices: (1..=n_qubits).filter(|q| !self.contains(*q)).collect(),
        })
    }

    /// Bit mask with the bit of every member qubit set.
    pub fn mask(&self, n_qubits: usize) -> u64 {
        self.indices.iter().map(|q| 1u64 << (n_qubits - q)).fold(0, |a, b| a | b)
    }

    /// All size-`k` subsets of `1..=n_qubits` in lexicographic order.
    pub fn all_of_size(n_qubits: usize, k: usize) -> Vec<QubitSubset> {
        use itertools::Itertools;
        (1..=n_qubits)
            .combinations(k)
            .map(|indices| QubitSubset { indices })
            .collect()
    }

    /// All non-empty subsets of `self`, ordered by size then lexicographically.
    pub fn non_empty_subsets(&self) -> Vec<QubitSubset> {
        use itertools::Itertools;
        let mut out = Vec::new();
        for size in 1..=self.indices.len() {
            for combo in self.indices.iter().copied().combinations(size) {
                out.push(QubitSubset { indices: combo });
            }
        }
        out
    }
}

impl fmt::Display for QubitSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

/// An `n`-qubit pure state, sparse over its nonzero amplitudes.
///
/// Immutable after construction; always normalized within [`NORM_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: BTreeMap<BasisIndex, Amplitude>,
    exact_mode: bool,
}

impl PureState {
    /// Builds a state from `(bitstring, re, im)` entries.
    ///
    /// Rejects duplicate bitstrings and any normalization defect beyond
    /// [`NORM_TOL`]. Exact mode is auto-detected when every magnitude equals
    /// `1/√(support size)` within 1e-12 and every phase is ±1.
    pub fn from_entries<S: AsRef<str>>(n_qubits: usize, entries: &[(S, f64, f64)]) -> Result<Self> {
        Self::from_entries_opts(n_qubits, entries, false)
    }

    /// Like [`PureState::from_entries`] but rescales to unit norm instead of
    /// rejecting a normalization defect.
    pub fn from_entries_normalized<S: AsRef<str>>(
        n_qubits: usize,
        entries: &[(S, f64, f64)],
    ) -> Result<Self> {
        Self::from_entries_opts(n_qubits, entries, true)
    }

    fn from_entries_opts<S: AsRef<str>>(
        n_qubits: usize,
        entries: &[(S, f64, f64)],
        normalize: bool,
    ) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut map = BTreeMap::new();
        for (bits, re, im) in entries {
            let idx = BasisIndex::from_bitstring(bits.as_ref(), n_qubits)?;
            if map.insert(idx, Complex64::new(*re, *im)).is_some() {
                return Err(Error::DuplicateBasisState { bitstring: bits.as_ref().to_string() });
            }
        }
        Self::from_complex_map(n_qubits, map, normalize)
    }

    /// Core constructor from an amplitude map. Drops entries below
    /// [`AMPLITUDE_EPS`], validates (or restores, with `normalize`) the unit
    /// norm, then detects exact mode.
    pub fn from_complex_map(
        n_qubits: usize,
        map: BTreeMap<BasisIndex, Complex64>,
        normalize: bool,
    ) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut map: BTreeMap<BasisIndex, Complex64> =
            map.into_iter().filter(|(_, a)| a.norm() >= AMPLITUDE_EPS).collect();
        let norm_sq: f64 = map.values().map(|a| a.norm_sqr()).sum();
        if normalize {
            if norm_sq <= 0.0 {
                return Err(Error::NotNormalized { norm_sq });
            }
            let scale = 1.0 / norm_sq.sqrt();
            for a in map.values_mut() {
                *a *= scale;
            }
        } else if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }

        let support = map.len();
        let target = 1.0 / (support as f64).sqrt();
        let exact_mode = support > 0
            && map
                .values()
                .all(|a| (a.norm() - target).abs() <= EXACT_DETECT_TOL && a.im.abs() <= EXACT_DETECT_TOL);

        let amplitudes = map
            .into_iter()
            .map(|(idx, a)| {
                let amp = if exact_mode {
                    let sign: i8 = if a.re >= 0.0 { 1 } else { -1 };
                    Amplitude {
                        re: f64::from(sign) * target,
                        im: 0.0,
                        exact: Some(ExactAmp { sign, scale: support as u64 }),
                    }
                } else {
                    Amplitude { re: a.re, im: a.im, exact: None }
                };
                (idx, amp)
            })
            .collect();

        Ok(PureState { n_qubits, amplitudes, exact_mode })
    }

    /// Exact-mode state `(1/√r) Σ signs[j] |rows[j]⟩`.
    pub fn from_signed_support(n_qubits: usize, rows: &[u64], signs: &[i8]) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if rows.len() != signs.len() {
            return Err(Error::InternalInconsistency(format!(
                "{} rows vs {} signs",
                rows.len(),
                signs.len()
            )));
        }
        let r = rows.len();
        let mag = 1.0 / (r as f64).sqrt();
        let mut amplitudes = BTreeMap::new();
        for (&row, &sign) in rows.iter().zip(signs) {
            let idx = BasisIndex::new(row, n_qubits)?;
            let amp = Amplitude {
                re: f64::from(sign) * mag,
                im: 0.0,
                exact: Some(ExactAmp { sign, scale: r as u64 }),
            };
            if amplitudes.insert(idx, amp).is_some() {
                return Err(Error::DuplicateRow { row: idx.to_bitstring(n_qubits) });
            }
        }
        Ok(PureState { n_qubits, amplitudes, exact_mode: true })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_exact(&self) -> bool {
        self.exact_mode
    }

    /// The shared scale `r` in exact mode.
    pub fn exact_scale(&self) -> Option<u64> {
        if self.exact_mode {
            Some(self.amplitudes.len() as u64)
        } else {
            None
        }
    }

    pub fn amplitude(&self, idx: BasisIndex) -> Complex64 {
        self.amplitudes.get(&idx).map_or(Complex64::new(0.0, 0.0), Amplitude::as_complex)
    }

    /// Sorted iteration over the support.
    pub fn iter(&self) -> impl Iterator<Item = (BasisIndex, &Amplitude)> {
        self.amplitudes.iter().map(|(idx, amp)| (*idx, amp))
    }

    pub fn get(&self, idx: BasisIndex) -> Option<&Amplitude> {
        self.amplitudes.get(&idx)
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.values().map(Amplitude::norm_sq).sum()
    }

    /// `⟨self|other⟩`. Exact-mode pairs with a shared scale are summed in
    /// integer arithmetic, so e.g. self-overlaps come out exactly 1.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        if let (true, true) = (self.exact_mode, other.exact_mode) {
            if self.support_len() == other.support_len() {
                let r = self.support_len() as i64;
                let mut acc: i64 = 0;
                for (idx, amp) in &self.amplitudes {
                    if let Some(b) = other.amplitudes.get(idx) {
                        acc += i64::from(amp.exact.unwrap().sign) * i64::from(b.exact.unwrap().sign);
                    }
                }
                return Ok(Complex64::new(acc as f64 / r as f64, 0.0));
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, amp) in &self.amplitudes {
            if let Some(b) = other.amplitudes.get(idx) {
                acc += amp.as_complex().conj() * b.as_complex();
            }
        }
        Ok(acc)
    }

    // ---------------------------------------------------------------- plain format

    /// Renders the plain state file format: a `nqubits N` header, then one
    /// `<bitstring> <re> <im>` line per stored amplitude in index order.
    pub fn to_plain_text(&self) -> String {
        let mut out = format!("nqubits {}\n", self.n_qubits);
        for (idx, amp) in &self.amplitudes {
            out.push_str(&format!("{} {} {}\n", idx.to_bitstring(self.n_qubits), amp.re, amp.im));
        }
        out
    }

    /// Parses the plain state file format. `#` starts a comment; the `im`
    /// column is optional and defaults to 0.
    pub fn from_plain_text(text: &str) -> Result<Self> {
        Self::from_plain_text_opts(text, false)
    }

    pub fn from_plain_text_opts(text: &str, normalize: bool) -> Result<Self> {
        let mut n_qubits: Option<usize> = None;
        let mut entries: Vec<(String, f64, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            if n_qubits.is_none() {
                let head = fields.next().unwrap();
                if head != "nqubits" {
                    return Err(Error::Syntax {
                        line: lineno + 1,
                        col: 1,
                        message: format!("expected `nqubits N` header, found {head:?}"),
                    });
                }
                let n = parse_usize(fields.next(), lineno + 1, "qubit count")?;
                if fields.next().is_some() {
                    return Err(Error::Syntax {
                        line: lineno + 1,
                        col: 1,
                        message: "trailing tokens after header".into(),
                    });
                }
                n_qubits = Some(n);
                continue;
            }
            let bits = fields.next().unwrap().to_string();
            let re = parse_f64(fields.next(), lineno + 1, "re")?;
            let im = match fields.next() {
                Some(tok) => parse_f64(Some(tok), lineno + 1, "im")?,
                None => 0.0,
            };
            if fields.next().is_some() {
                return Err(Error::Syntax {
                    line: lineno + 1,
                    col: 1,
                    message: "trailing tokens after amplitude".into(),
                });
            }
            entries.push((bits, re, im));
        }
        let n = n_qubits.ok_or_else(|| Error::Syntax {
            line: 1,
            col: 1,
            message: "missing `nqubits N` header".into(),
        })?;
        Self::from_entries_opts(n, &entries, normalize)
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::Syntax { line, col: 1, message: format!("missing {what}") })?
        .parse()
        .map_err(|_| Error::Syntax { line, col: 1, message: format!("invalid {what}") })
}

fn parse_f64(tok: Option<&str>, line: usize, what: &str) -> Result<f64> {
    tok.ok_or_else(|| Error::Syntax { line, col: 1, message: format!("missing {what}") })?
        .parse()
        .map_err(|_| Error::Syntax { line, col: 1, message: format!("invalid {what} value") })
}
