//! State-description language mirroring factored tensor-block expressions.
//!
//! The grammar is line-oriented:
//!
//! ```text
//! doc      := "state" INT NL "norm" COEF NL term+
//! term     := "term" [SIGN] [COEF] ":" block ("*" block)* NL
//! block    := "block(" INT ("," INT)* ")" "{" ket (("+"|"-") ket)* "}"
//! ket      := [SIGN] BITSTRING
//! COEF     := INT "/sqrt(" INT ")" | INT
//! ```
//!
//! `#` starts a comment. Block qubit lists are explicit and ordered: bit `j`
//! of a ket binds to the `j`-th listed qubit, so interleaved qubit orders
//! transcribe directly without silent misbinding.
//!
//! Expansion distributes the products over the block sums. Coefficients of
//! colliding basis kets are *added* (repeated kets across factors are legal
//! input, and addition is the faithful reading), and the final state must
//! come out normalized — a norm defect is the primary symptom of a
//! transcription typo, so it is never repaired silently.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{strip_comment, BasisIndex, PureState, AMPLITUDE_EPS, MAX_QUBITS};

/// `p/√q` with non-negative integers; `q = 1` for a bare integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coefficient {
    pub p: u64,
    pub q: u64,
}

impl Coefficient {
    pub fn value(&self) -> f64 {
        self.p as f64 / (self.q as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdlKet {
    /// `+1` or `-1`.
    pub sign: i8,
    pub bits: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdlBlock {
    /// 1-based qubit labels in listed order; bit `j` of each ket binds to
    /// `qubits[j]`.
    pub qubits: Vec<usize>,
    pub kets: Vec<SdlKet>,
    /// Source line, for diagnostics.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdlTerm {
    pub sign: i8,
    pub scale: Option<Coefficient>,
    pub blocks: Vec<SdlBlock>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdlDocument {
    pub n_qubits: usize,
    pub global_norm: Coefficient,
    pub terms: Vec<SdlTerm>,
}

// ---------------------------------------------------------------- parsing

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0, line }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.get(self.pos), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect_char(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected {want:?}, found {c:?}"))),
            None => Err(self.err(format!("expected {want:?}, found end of line"))),
        }
    }

    fn keyword(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_lowercase()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn expect_keyword(&mut self, want: &str) -> Result<()> {
        let got = self.keyword();
        if got == want {
            Ok(())
        } else {
            Err(self.err(format!("expected keyword {want:?}, found {got:?}")))
        }
    }

    fn parse_int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.err(format!("integer {text:?} out of range")))
    }

    /// `INT "/sqrt(" INT ")" | INT`
    fn parse_coef(&mut self) -> Result<Coefficient> {
        let p = self.parse_int()?;
        if self.peek() == Some('/') {
            self.bump();
            self.expect_keyword("sqrt")?;
            self.expect_char('(')?;
            let q = self.parse_int()?;
            self.expect_char(')')?;
            if q == 0 {
                return Err(self.err("zero under sqrt"));
            }
            Ok(Coefficient { p, q })
        } else {
            Ok(Coefficient { p, q: 1 })
        }
    }

    fn parse_sign(&mut self) -> Option<i8> {
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(1)
            }
            Some('-') => {
                self.bump();
                Some(-1)
            }
            _ => None,
        }
    }

    fn parse_bits(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some('0') | Some('1')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a bitstring"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

fn parse_block(cur: &mut Cursor) -> Result<SdlBlock> {
    cur.expect_keyword("block")?;
    cur.expect_char('(')?;
    let mut qubits = vec![cur.parse_int()? as usize];
    while cur.peek() == Some(',') {
        cur.bump();
        qubits.push(cur.parse_int()? as usize);
    }
    cur.expect_char(')')?;
    cur.expect_char('{')?;
    let mut kets = Vec::new();
    let sign = cur.parse_sign().unwrap_or(1);
    kets.push(SdlKet { sign, bits: cur.parse_bits()? });
    loop {
        match cur.peek() {
            Some('}') => {
                cur.bump();
                break;
            }
            Some('+') | Some('-') => {
                let sep = cur.parse_sign().unwrap();
                let own = cur.parse_sign().unwrap_or(1);
                kets.push(SdlKet { sign: sep * own, bits: cur.parse_bits()? });
            }
            Some(c) => return Err(cur.err(format!("expected '+', '-' or '}}', found {c:?}"))),
            None => return Err(cur.err("unterminated block")),
        }
    }
    Ok(SdlBlock { qubits, kets, line: cur.line })
}

/// Parses SDL text into a structurally validated document.
///
/// Structural checks: every ket is as wide as its block's qubit list, and
/// each term's blocks cover `1..=N` exactly once.
pub fn parse_sdl(text: &str) -> Result<SdlDocument> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, strip_comment(raw)))
        .filter(|(_, l)| !l.trim().is_empty());

    let (lineno, line) = lines
        .next()
        .ok_or(Error::Syntax { line: 1, col: 1, message: "empty document".into() })?;
    let mut cur = Cursor::new(line, lineno);
    cur.expect_keyword("state")?;
    let n_qubits = cur.parse_int()? as usize;
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(cur.err(format!("qubit count must be in 1..={MAX_QUBITS}")));
    }
    if !cur.at_end() {
        return Err(cur.err("trailing tokens after state header"));
    }

    let (lineno, line) = lines
        .next()
        .ok_or(Error::Syntax { line: lineno, col: 1, message: "missing norm line".into() })?;
    let mut cur = Cursor::new(line, lineno);
    cur.expect_keyword("norm")?;
    let global_norm = cur.parse_coef()?;
    if !cur.at_end() {
        return Err(cur.err("trailing tokens after norm"));
    }

    let mut terms = Vec::new();
    let mut last_line = lineno;
    for (lineno, line) in lines {
        last_line = lineno;
        let mut cur = Cursor::new(line, lineno);
        cur.expect_keyword("term")?;
        let sign = cur.parse_sign().unwrap_or(1);
        let scale = match cur.peek() {
            Some(c) if c.is_ascii_digit() => Some(cur.parse_coef()?),
            _ => None,
        };
        cur.expect_char(':')?;
        let mut blocks = vec![parse_block(&mut cur)?];
        while cur.peek() == Some('*') {
            cur.bump();
            blocks.push(parse_block(&mut cur)?);
        }
        if !cur.at_end() {
            return Err(cur.err("trailing tokens after term"));
        }
        terms.push(SdlTerm { sign, scale, blocks });
    }
    if terms.is_empty() {
        return Err(Error::Syntax { line: last_line, col: 1, message: "document has no terms".into() });
    }

    let doc = SdlDocument { n_qubits, global_norm, terms };
    validate_structure(&doc)?;
    Ok(doc)
}

fn validate_structure(doc: &SdlDocument) -> Result<()> {
    let n = doc.n_qubits;
    for (t, term) in doc.terms.iter().enumerate() {
        let term_no = t + 1;
        let mut covered = vec![false; n + 1];
        for block in &term.blocks {
            for &q in &block.qubits {
                if q == 0 || q > n {
                    return Err(Error::QubitCoverage {
                        term: term_no,
                        n,
                        message: format!("qubit label {q} out of range"),
                    });
                }
                if covered[q] {
                    return Err(Error::QubitCoverage {
                        term: term_no,
                        n,
                        message: format!("qubit {q} covered more than once"),
                    });
                }
                covered[q] = true;
            }
            for ket in &block.kets {
                if ket.bits.len() != block.qubits.len() {
                    return Err(Error::BlockWidthMismatch {
                        line: block.line,
                        ket: ket.bits.clone(),
                        got: ket.bits.len(),
                        want: block.qubits.len(),
                    });
                }
            }
        }
        if let Some(q) = (1..=n).find(|&q| !covered[q]) {
            return Err(Error::QubitCoverage {
                term: term_no,
                n,
                message: format!("qubit {q} not covered"),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- expansion

/// Distributes all products over block sums and returns the raw amplitude
/// map, with colliding kets summed and exact zeros dropped. No normalization
/// check — diagnostics and property tests use this directly.
pub fn expand_unchecked(doc: &SdlDocument) -> BTreeMap<BasisIndex, Complex64> {
    let n = doc.n_qubits;
    let norm = doc.global_norm.value();
    let mut map: BTreeMap<BasisIndex, Complex64> = BTreeMap::new();
    for term in &doc.terms {
        let coeff = norm * f64::from(term.sign) * term.scale.map_or(1.0, |c| c.value());
        distribute(n, &term.blocks, 0, 0u64, 1, &mut |index, sign| {
            let amp = Complex64::new(coeff * f64::from(sign), 0.0);
            *map.entry(BasisIndex::new(index, n).expect("validated index")).or_insert_with(|| {
                Complex64::new(0.0, 0.0)
            }) += amp;
        });
    }
    map.retain(|_, a| a.norm() >= AMPLITUDE_EPS);
    map
}

fn distribute(
    n: usize,
    blocks: &[SdlBlock],
    depth: usize,
    index: u64,
    sign: i8,
    emit: &mut impl FnMut(u64, i8),
) {
    if depth == blocks.len() {
        emit(index, sign);
        return;
    }
    let block = &blocks[depth];
    for ket in &block.kets {
        let mut idx = index;
        for (j, c) in ket.bits.chars().enumerate() {
            if c == '1' {
                idx |= 1u64 << (n - block.qubits[j]);
            }
        }
        distribute(n, blocks, depth + 1, idx, sign * ket.sign, emit);
    }
}

/// Expands a document to a [`PureState`], validating the final norm.
pub fn expand(doc: &SdlDocument) -> Result<PureState> {
    expand_opts(doc, false)
}

/// Like [`expand`] but rescales to unit norm instead of rejecting a defect.
pub fn expand_opts(doc: &SdlDocument, normalize: bool) -> Result<PureState> {
    let map = expand_unchecked(doc);
    PureState::from_complex_map(doc.n_qubits, map, normalize)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: &str = "state 2\nnorm 1/sqrt(2)\nterm: block(1,2){00 + 11}\n";

    #[test]
    fn parses_bell_document() {
        let doc = parse_sdl(BELL).unwrap();
        assert_eq!(doc.n_qubits, 2);
        assert_eq!(doc.global_norm, Coefficient { p: 1, q: 2 });
        assert_eq!(doc.terms.len(), 1);
        assert_eq!(doc.terms[0].blocks[0].kets.len(), 2);
    }

    #[test]
    fn expands_bell_document() {
        let s = expand(&parse_sdl(BELL).unwrap()).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.support_len(), 2);
        let a = s.amplitude(BasisIndex::from_bitstring("00", 2).unwrap());
        assert!((a.re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coverage_overlap_rejected() {
        let text = "state 2\nnorm 1/sqrt(2)\nterm: block(1,2){00} * block(1,2){00}\n";
        let err = parse_sdl(text).unwrap_err();
        assert!(matches!(err, Error::QubitCoverage { term: 1, .. }));
    }

    #[test]
    fn coverage_gap_rejected() {
        let text = "state 3\nnorm 1/sqrt(2)\nterm: block(1,2){00 + 11}\n";
        let err = parse_sdl(text).unwrap_err();
        assert!(matches!(err, Error::QubitCoverage { term: 1, .. }));
    }

    #[test]
    fn block_width_mismatch_rejected() {
        let text = "state 3\nnorm 1/sqrt(2)\nterm: block(1,2,3){00 + 111}\n";
        let err = parse_sdl(text).unwrap_err();
        assert!(matches!(err, Error::BlockWidthMismatch { line: 3, got: 2, want: 3, .. }));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_sdl("state x\n").unwrap_err();
        match err {
            Error::Syntax { line: 1, col, .. } => assert!(col >= 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cancellation_fails_normalization() {
        let text = "state 1\nnorm 1/sqrt(1)\nterm: block(1){0}\nterm -: block(1){0}\n";
        let err = expand(&parse_sdl(text).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn collisions_sum_coefficients() {
        // |0> collects 1/2 from each term; |1> cancels exactly and is dropped.
        let text = "state 1\nnorm 1/sqrt(4)\nterm: block(1){0 + 1}\nterm: block(1){0 - 1}\n";
        let s = expand(&parse_sdl(text).unwrap()).unwrap();
        assert_eq!(s.support_len(), 1);
        let a = s.amplitude(BasisIndex::from_bitstring("0", 1).unwrap());
        assert!((a.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_order_binds_bits_to_listed_qubits() {
        // block(2,1){10}: bit 1 -> qubit 2, bit 0 -> qubit 1, i.e. |01>.
        let text = "state 2\nnorm 1\nterm: block(2,1){10}\n";
        let s = expand(&parse_sdl(text).unwrap()).unwrap();
        assert_eq!(s.support_len(), 1);
        assert!(s.get(BasisIndex::from_bitstring("01", 2).unwrap()).is_some());
    }

    #[test]
    fn term_signs_and_scales_apply() {
        let text = "state 1\nnorm 1/sqrt(2)\nterm: block(1){0}\nterm - : block(1){- 1}\n";
        let s = expand(&parse_sdl(text).unwrap()).unwrap();
        let a1 = s.amplitude(BasisIndex::from_bitstring("1", 1).unwrap());
        assert!(a1.re > 0.0); // double negative
        let text = "state 1\nnorm 1/sqrt(8)\nterm 2: block(1){0 + 1}\n";
        let s = expand(&parse_sdl(text).unwrap()).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.exact_scale(), Some(2));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# header\n\nstate 2   # two qubits\nnorm 1/sqrt(2)\n# the only term\nterm: block(1,2){00 + 11}\n";
        assert!(parse_sdl(text).is_ok());
    }

    #[test]
    fn expansion_linearity() {
        // expanding T1 ∪ T2 equals merging the expansions of T1 and T2
        let t1 = "state 2\nnorm 1/sqrt(4)\nterm: block(1,2){00 + 01}\n";
        let t2 = "state 2\nnorm 1/sqrt(4)\nterm: block(1){1} * block(2){0 + 1}\n";
        let joint = "state 2\nnorm 1/sqrt(4)\nterm: block(1,2){00 + 01}\nterm: block(1){1} * block(2){0 + 1}\n";
        let m1 = expand_unchecked(&parse_sdl(t1).unwrap());
        let m2 = expand_unchecked(&parse_sdl(t2).unwrap());
        let mj = expand_unchecked(&parse_sdl(joint).unwrap());
        let mut merged = m1;
        for (k, v) in m2 {
            *merged.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        assert_eq!(merged.len(), mj.len());
        for (k, v) in &mj {
            assert!((merged[k] - v).norm() < 1e-15);
        }
    }
}
