//! Binary orthogonal arrays: strength, irredundancy, and the correspondence
//! with equal-superposition states.
//!
//! Rows are stored one 64-bit word each (column 1 = most significant bit of
//! the used window), so column projections are mask-and-popcount cheap. All
//! checks are exhaustive — at these sizes that is instant and leaves nothing
//! to argue with.

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::par;
use crate::search::SignVector;
use crate::state::{BasisIndex, PureState, MAX_QUBITS};

/// An `r × N` binary array with pairwise-distinct rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalArray {
    factors: usize,
    rows: Vec<u64>,
}

impl OrthogonalArray {
    pub fn new(factors: usize, rows: Vec<u64>) -> Result<Self> {
        if factors == 0 || factors > MAX_QUBITS {
            return Err(Error::TooManyQubits { n: factors, max: MAX_QUBITS });
        }
        let mut seen = HashMap::with_capacity(rows.len());
        for (i, &row) in rows.iter().enumerate() {
            if row >> factors != 0 {
                return Err(Error::MalformedArray {
                    line: i + 1,
                    message: format!("row value {row:#b} does not fit {factors} columns"),
                });
            }
            if seen.insert(row, i).is_some() {
                return Err(Error::DuplicateRow {
                    row: BasisIndex::new_unchecked(row).to_bitstring(factors),
                });
            }
        }
        Ok(OrthogonalArray { factors, rows })
    }

    pub fn runs(&self) -> usize {
        self.rows.len()
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Bit of 1-based column `col` in row `row`.
    pub fn bit(&self, row: usize, col: usize) -> u8 {
        ((self.rows[row] >> (self.factors - col)) & 1) as u8
    }

    /// Same rows sorted ascending (the canonical order sign vectors align to).
    pub fn sorted(&self) -> OrthogonalArray {
        let mut rows = self.rows.clone();
        rows.sort_unstable();
        OrthogonalArray { factors: self.factors, rows }
    }
}

/// Outcome of the exhaustive strength computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrengthResult {
    pub strength: usize,
    /// First violation at level `strength + 1`, when one was reached.
    pub witness: Option<StrengthWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrengthWitness {
    /// 1-based column labels.
    pub columns: Vec<usize>,
    /// The under-represented pattern, first column leftmost.
    pub pattern: String,
    pub observed: usize,
    pub expected: usize,
}

/// Exact strength by exhaustive column-subset pattern counting.
///
/// `t_max` is clamped to what is countable (`t ≤ N` and `2^t ≤ r`; above
/// that no level can balance). The witness reports the first
/// under-represented pattern of the first violating column subset in
/// lexicographic order.
pub fn oa_strength(a: &OrthogonalArray, t_max: usize) -> StrengthResult {
    let r = a.runs();
    let n = a.factors();
    // largest countable level: t <= t_max, t <= N, 2^t <= r
    let mut t_cap = 0usize;
    while t_cap < t_max.min(n) && (1usize << (t_cap + 1)) <= r {
        t_cap += 1;
    }

    for t in 1..=t_cap {
        let combos: Vec<Vec<usize>> = (1..=n).combinations(t).collect();
        let violations = par::map_slice(&combos, |cols| check_balance(a, cols, t));
        if let Some(w) = violations.into_iter().flatten().next() {
            return StrengthResult { strength: t - 1, witness: Some(w) };
        }
    }
    if t_cap < t_max.min(n) {
        // levels past 2^t > r cannot balance; report the trivial witness
        let t = t_cap + 1;
        let cols: Vec<usize> = (1..=t.min(n)).collect();
        let w = check_balance(a, &cols, cols.len());
        return StrengthResult { strength: t_cap, witness: w };
    }
    StrengthResult { strength: t_cap, witness: None }
}

fn check_balance(a: &OrthogonalArray, cols: &[usize], t: usize) -> Option<StrengthWitness> {
    let r = a.runs();
    let mut counts = vec![0usize; 1 << t];
    for row in 0..r {
        let mut pat = 0usize;
        for &c in cols {
            pat = (pat << 1) | a.bit(row, c) as usize;
        }
        counts[pat] += 1;
    }
    // balanced iff every pattern appears exactly r / 2^t times; the reported
    // pattern is the first one short of its share (one always exists)
    let exact = r % (1 << t) == 0;
    let share = r >> t;
    if exact && counts.iter().all(|&c| c == share) {
        return None;
    }
    let pattern = (0..counts.len())
        .find(|&p| counts[p] * (1 << t) < r)
        .expect("an under-represented pattern always exists at a violation");
    Some(StrengthWitness {
        columns: cols.to_vec(),
        pattern: (0..t).map(|i| if (pattern >> (t - 1 - i)) & 1 == 1 { '1' } else { '0' }).collect(),
        observed: counts[pattern],
        expected: share,
    })
}

/// Outcome of the irredundancy check at level `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irredundancy {
    pub irredundant: bool,
    pub witness: Option<RedundancyWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundancyWitness {
    /// 1-based labels of the deleted columns.
    pub dropped_columns: Vec<usize>,
    /// Indices of the first colliding row pair.
    pub row_a: usize,
    pub row_b: usize,
}

/// True iff rows stay pairwise distinct after deleting any `k` columns.
pub fn oa_irredundant(a: &OrthogonalArray, k: usize) -> Result<Irredundancy> {
    let n = a.factors();
    if k >= n {
        return Err(Error::InvalidOrder { k, max: n - 1 });
    }
    let combos: Vec<Vec<usize>> = (1..=n).combinations(k).collect();
    let hits = par::map_slice(&combos, |dropped| {
        let mask: u64 = dropped.iter().fold(!0u64 >> (64 - n), |m, &c| m & !(1u64 << (n - c)));
        let mut seen: HashMap<u64, usize> = HashMap::with_capacity(a.runs());
        for (i, &row) in a.rows().iter().enumerate() {
            if let Some(&j) = seen.get(&(row & mask)) {
                return Some(RedundancyWitness { dropped_columns: dropped.clone(), row_a: j, row_b: i });
            }
            seen.insert(row & mask, i);
        }
        None
    });
    match hits.into_iter().flatten().next() {
        Some(w) => Ok(Irredundancy { irredundant: false, witness: Some(w) }),
        None => Ok(Irredundancy { irredundant: true, witness: None }),
    }
}

/// `(1/√r) Σ_j signs[j] |row_j⟩`, all-plus when `signs` is `None`.
pub fn state_from_oa(a: &OrthogonalArray, signs: Option<&SignVector>) -> Result<PureState> {
    let r = a.runs();
    let owned;
    let signs = match signs {
        Some(s) => {
            if s.len() != r {
                return Err(Error::MalformedSigns {
                    message: format!("{} signs for {r} rows", s.len()),
                });
            }
            s.signs()
        }
        None => {
            owned = vec![1i8; r];
            &owned
        }
    };
    PureState::from_signed_support(a.factors(), a.rows(), signs)
}

/// Inverse of [`state_from_oa`] for exact-mode states: rows are the support
/// sorted ascending, signs aligned.
pub fn oa_from_state(psi: &PureState) -> Result<(OrthogonalArray, SignVector)> {
    if !psi.is_exact() {
        return Err(Error::NotUniformMagnitude);
    }
    let mut rows = Vec::with_capacity(psi.support_len());
    let mut signs = Vec::with_capacity(psi.support_len());
    for (idx, amp) in psi.iter() {
        rows.push(idx.value());
        signs.push(amp.exact.unwrap().sign);
    }
    let array = OrthogonalArray::new(psi.n_qubits(), rows)?;
    Ok((array, SignVector::from_signs(signs)?))
}

// ---------------------------------------------------------------- file format

/// Parses the OA file format: an optional `oa r N 2 t` header, an optional
/// `# signs ...` comment, then `r` rows of contiguous or space-separated
/// bits. Other `#` comments are ignored.
pub fn parse_oa_text(text: &str) -> Result<(OrthogonalArray, Option<SignVector>)> {
    let mut header: Option<(usize, usize)> = None; // (runs, factors)
    let mut signs: Option<SignVector> = None;
    let mut rows: Vec<u64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut first = true;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(sig) = rest.strip_prefix("signs") {
                signs = Some(SignVector::parse(sig.trim()).map_err(|e| Error::MalformedArray {
                    line,
                    message: e.to_string(),
                })?);
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if first && fields[0] == "oa" {
            first = false;
            if fields.len() != 5 {
                return Err(Error::MalformedArray {
                    line,
                    message: "header must be `oa <runs> <factors> 2 <strength>`".into(),
                });
            }
            let runs: usize = fields[1].parse().map_err(|_| Error::MalformedArray {
                line,
                message: "bad run count".into(),
            })?;
            let factors: usize = fields[2].parse().map_err(|_| Error::MalformedArray {
                line,
                message: "bad factor count".into(),
            })?;
            if fields[3] != "2" {
                return Err(Error::MalformedArray {
                    line,
                    message: format!("only 2-level arrays are supported, got {}", fields[3]),
                });
            }
            header = Some((runs, factors));
            continue;
        }
        first = false;

        let bits: String = if fields.len() == 1 {
            fields[0].to_string()
        } else {
            for f in &fields {
                if *f != "0" && *f != "1" {
                    return Err(Error::MalformedArray {
                        line,
                        message: format!("invalid entry {f:?}"),
                    });
                }
            }
            fields.concat()
        };
        if let Some(w) = width {
            if bits.len() != w {
                return Err(Error::MalformedArray {
                    line,
                    message: format!("row has {} columns, expected {w}", bits.len()),
                });
            }
        } else {
            width = Some(bits.len());
        }
        let mut value = 0u64;
        for c in bits.chars() {
            value <<= 1;
            match c {
                '0' => {}
                '1' => value |= 1,
                other => {
                    return Err(Error::MalformedArray {
                        line,
                        message: format!("invalid character {other:?} in row"),
                    })
                }
            }
        }
        rows.push(value);
    }

    let factors = match (header, width) {
        (Some((runs, factors)), w) => {
            if rows.len() != runs {
                return Err(Error::MalformedArray {
                    line: 0,
                    message: format!("header declares {runs} runs, found {}", rows.len()),
                });
            }
            if let Some(w) = w {
                if w != factors {
                    return Err(Error::MalformedArray {
                        line: 0,
                        message: format!("header declares {factors} factors, rows have {w}"),
                    });
                }
            }
            factors
        }
        (None, Some(w)) => w,
        (None, None) => {
            return Err(Error::MalformedArray { line: 0, message: "no rows found".into() })
        }
    };
    if let Some(s) = &signs {
        if s.len() != rows.len() {
            return Err(Error::MalformedSigns {
                message: format!("{} signs for {} rows", s.len(), rows.len()),
            });
        }
    }
    Ok((OrthogonalArray::new(factors, rows)?, signs))
}

/// Renders the OA file format, computing the header strength; a mixed sign
/// vector is carried in a `# signs` comment.
pub fn oa_to_text(a: &OrthogonalArray, signs: Option<&SignVector>) -> String {
    let strength = oa_strength(a, a.factors()).strength;
    let mut out = format!("oa {} {} 2 {}\n", a.runs(), a.factors(), strength);
    if let Some(s) = signs {
        if !s.is_all_plus() {
            out.push_str(&format!("# signs {}\n", s.to_line()));
        }
    }
    for &row in a.rows() {
        out.push_str(&BasisIndex::new_unchecked(row).to_bitstring(a.factors()));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_factorial(n: usize) -> OrthogonalArray {
        OrthogonalArray::new(n, (0..(1u64 << n)).collect()).unwrap()
    }

    #[test]
    fn full_factorial_has_full_strength() {
        let a = full_factorial(3);
        let s = oa_strength(&a, 3);
        assert_eq!(s.strength, 3);
        assert!(s.witness.is_none());
    }

    #[test]
    fn constant_column_has_strength_zero_with_witness() {
        let a = OrthogonalArray::new(3, vec![0b000, 0b011]).unwrap();
        let s = oa_strength(&a, 2);
        assert_eq!(s.strength, 0);
        let w = s.witness.unwrap();
        assert_eq!(w.columns, vec![1]);
        assert_eq!(w.pattern, "1");
        assert_eq!(w.observed, 0);
        assert_eq!(w.expected, 1);
    }

    #[test]
    fn strength_clamps_past_power_of_two_budget()  {
        // r = 2 cannot support t = 2 regardless of t_max
        let a = OrthogonalArray::new(2, vec![0b00, 0b11]).unwrap();
        let s = oa_strength(&a, 2);
        assert_eq!(s.strength, 1);
        assert!(s.witness.is_some());
    }

    #[test]
    fn irredundancy_examples() {
        let a = full_factorial(3);
        assert!(oa_irredundant(&a, 1).unwrap().irredundant);

        let b = OrthogonalArray::new(3, vec![0b000, 0b001]).unwrap();
        let res = oa_irredundant(&b, 1).unwrap();
        assert!(!res.irredundant);
        let w = res.witness.unwrap();
        assert_eq!(w.dropped_columns, vec![3]);
        assert_eq!((w.row_a, w.row_b), (0, 1));
    }

    #[test]
    fn irredundant_k_must_be_below_n() {
        let a = full_factorial(2);
        assert!(matches!(oa_irredundant(&a, 2), Err(Error::InvalidOrder { k: 2, max: 1 })));
    }

    #[test]
    fn duplicate_rows_rejected() {
        assert!(matches!(
            OrthogonalArray::new(2, vec![0b01, 0b01]),
            Err(Error::DuplicateRow { .. })
        ));
    }

    #[test]
    fn bell_from_rows() {
        let a = OrthogonalArray::new(2, vec![0b00, 0b11]).unwrap();
        let s = state_from_oa(&a, None).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.support_len(), 2);
        let (back, signs) = oa_from_state(&s).unwrap();
        assert_eq!(back.rows(), &[0b00, 0b11]);
        assert!(signs.is_all_plus());
    }

    #[test]
    fn minus_state_from_signed_rows() {
        let a = OrthogonalArray::new(1, vec![0, 1]).unwrap();
        let signs = SignVector::from_signs(vec![1, -1]).unwrap();
        let s = state_from_oa(&a, Some(&signs)).unwrap();
        let amp1 = s.amplitude(BasisIndex::from_bitstring("1", 1).unwrap());
        assert!(amp1.re < 0.0);
    }

    #[test]
    fn non_uniform_state_has_no_array() {
        let s = PureState::from_entries(1, &[("0", 0.6, 0.0), ("1", 0.8, 0.0)]).unwrap();
        assert!(matches!(oa_from_state(&s), Err(Error::NotUniformMagnitude)));
    }

    #[test]
    fn file_round_trip_with_signs() {
        let a = OrthogonalArray::new(3, vec![0b000, 0b011, 0b101, 0b110]).unwrap();
        let signs = SignVector::from_signs(vec![1, -1, -1, 1]).unwrap();
        let text = oa_to_text(&a, Some(&signs));
        let (back, back_signs) = parse_oa_text(&text).unwrap();
        assert_eq!(back, a);
        assert_eq!(back_signs.unwrap().signs(), signs.signs());
    }

    #[test]
    fn parses_spaced_rows_and_header() {
        let text = "oa 2 3 2 0\n0 0 0\n0 1 1\n";
        let (a, signs) = parse_oa_text(text).unwrap();
        assert_eq!(a.runs(), 2);
        assert_eq!(a.factors(), 3);
        assert!(signs.is_none());
        assert_eq!(a.rows(), &[0b000, 0b011]);
    }

    #[test]
    fn header_mismatches_rejected() {
        assert!(parse_oa_text("oa 3 3 2 0\n000\n011\n").is_err());
        assert!(parse_oa_text("oa 2 4 2 0\n000\n011\n").is_err());
        assert!(parse_oa_text("oa 2 3 3 0\n000\n011\n").is_err());
        assert!(parse_oa_text("000\n0111\n").is_err());
    }
}
