//! Embedded SDL documents for the shipped reference states.
//!
//! States are stored as SDL text, not expanded amplitude dumps: the
//! transcription itself is the risk surface, and text can be compared
//! character by character against its origin. Verification failures of
//! catalog entries are first-class outcomes with witness subsets, never
//! crashes — adjudicating a transcription is exactly this tool's job.

use crate::error::{Error, Result};
use crate::reduce::Purity;
use crate::sdl::{expand, parse_sdl};
use crate::state::{PureState, QubitSubset};
use crate::uniformity::{check_uniformity, CheckMode, UniformityReport};

#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub n_qubits: usize,
    /// The uniformity order the entry is claimed to reach.
    pub claimed_k: usize,
    /// Structural description of where the terms come from.
    pub source: &'static str,
    /// Byte-stable SDL text.
    pub sdl: &'static str,
}

impl CatalogEntry {
    pub fn expand(&self) -> Result<PureState> {
        expand(&parse_sdl(self.sdl)?)
    }
}

const PSI11: &str = "\
state 11
norm 1/sqrt(32)
term: block(3,4,6,7){0000 + 1111} * block(1,2,5,8,9,10,11){0000000 + 1111111}
term: block(3,4,6,7){0001 + 1110} * block(1,2,5,8,9,10,11){0111010 + 1000101}
term: block(3,4,6,7){0010 + 1101} * block(1,2,5,8,9,10,11){0110101 + 1001010}
term: block(3,4,6,7){0011 + 1100} * block(1,2,5,8,9,10,11){0001111 + 1110000}
term: block(3,4,6,7){0100 + 1011} * block(1,2,5,8,9,10,11){0101100 + 1010011}
term: block(3,4,6,7){0101 + 1010} * block(1,2,5,8,9,10,11){0010110 + 1101001}
term: block(3,4,6,7){0110 + 1001} * block(1,2,5,8,9,10,11){0011001 + 1100110}
term: block(3,4,6,7){0111 + 1000} * block(1,2,5,8,9,10,11){0100011 + 1011100}
";

const PSI12: &str = "\
state 12
norm 1/sqrt(32)
term: block(3,4,6,7){0000 + 1111} * block(1,2,5,8,9,10,11,12){00000000 + 11111111}
term: block(3,4,6,7){0001 + 1110} * block(1,2,5,8,9,10,11,12){01110100 + 10001011}
term: block(3,4,6,7){0010 + 1101} * block(1,2,5,8,9,10,11,12){01101010 + 10010101}
term: block(3,4,6,7){0011 + 1100} * block(1,2,5,8,9,10,11,12){00011110 + 11100001}
term: block(3,4,6,7){0100 + 1011} * block(1,2,5,8,9,10,11,12){01011001 + 10100110}
term: block(3,4,6,7){0101 + 1010} * block(1,2,5,8,9,10,11,12){00101101 + 11010010}
term: block(3,4,6,7){0110 + 1001} * block(1,2,5,8,9,10,11,12){00110011 + 11001100}
term: block(3,4,6,7){0111 + 1000} * block(1,2,5,8,9,10,11,12){01000111 + 10111000}
";

const PSI13: &str = "\
state 13
norm 1/sqrt(32)
term: block(1,2,8,11){0000} * block(3,4,5,6,7,9,10,12,13){000000000 + 011011110 + 101101111 + 110110001}
term: block(1,2,8,11){0011} * block(3,4,5,6,7,9,10,12,13){000111101 + 011100011 + 101010010 + 110001100}
term: block(1,2,8,11){0101} * block(3,4,5,6,7,9,10,12,13){001101000 + 010110110 + 100000111 + 111011001}
term: block(1,2,8,11){0110} * block(3,4,5,6,7,9,10,12,13){001010101 + 010001011 + 100111010 + 111100100}
term: block(1,2,8,11){1001} * block(3,4,5,6,7,9,10,12,13){000011011 + 011000101 + 101110100 + 110101010}
term: block(1,2,8,11){1010} * block(3,4,5,6,7,9,10,12,13){000100110 + 011111000 + 101001001 + 110010111}
term: block(1,2,8,11){1100} * block(3,4,5,6,7,9,10,12,13){001110011 + 010101101 + 100011100 + 111000010}
term: block(1,2,8,11){1111} * block(3,4,5,6,7,9,10,12,13){001001110 + 010010000 + 100100001 + 111111111}
";

const PSI14: &str = "\
state 14
norm 1/sqrt(32)
term: block(1,2,8,11){0000} * block(3,4,5,6,7,9,10,12,13,14){0000000000 + 0110111101 + 1011011110 + 1101100011}
term: block(1,2,8,11){0011} * block(3,4,5,6,7,9,10,12,13,14){0001111011 + 0111000110 + 1010100101 + 1100011000}
term: block(1,2,8,11){0101} * block(3,4,5,6,7,9,10,12,13,14){0011010001 + 0101101100 + 1000001111 + 1110110010}
term: block(1,2,8,11){0110} * block(3,4,5,6,7,9,10,12,13,14){0010101010 + 0100010111 + 1001110100 + 1111001001}
term: block(1,2,8,11){1001} * block(3,4,5,6,7,9,10,12,13,14){0000110110 + 0110001011 + 1011101000 + 1101010101}
term: block(1,2,8,11){1010} * block(3,4,5,6,7,9,10,12,13,14){0001001101 + 0111110000 + 1010010011 + 1100101110}
term: block(1,2,8,11){1100} * block(3,4,5,6,7,9,10,12,13,14){0011100111 + 0101011010 + 1000111001 + 1110000100}
term: block(1,2,8,11){1111} * block(3,4,5,6,7,9,10,12,13,14){0010011100 + 0100100001 + 1001000010 + 1111111111}
";

const PSI15: &str = "\
state 15
norm 1/sqrt(32)
term: block(1,2,8,11){0000} * block(3,4,5,6,7,9,10,12,13,14,15){00000000000 + 01101111010 + 10110111101 + 11011000111}
term: block(1,2,8,11){0011} * block(3,4,5,6,7,9,10,12,13,14,15){00011110110 + 01110001100 + 10101001011 + 11000110001}
term: block(1,2,8,11){0101} * block(3,4,5,6,7,9,10,12,13,14,15){00110100011 + 01011011001 + 10000011110 + 11101100100}
term: block(1,2,8,11){0110} * block(3,4,5,6,7,9,10,12,13,14,15){00101010101 + 01000101111 + 10011101000 + 11110010010}
term: block(1,2,8,11){1001} * block(3,4,5,6,7,9,10,12,13,14,15){00001101101 + 01100010111 + 10111010000 + 11010101010}
term: block(1,2,8,11){1010} * block(3,4,5,6,7,9,10,12,13,14,15){00010011011 + 01111100001 + 10100100110 + 11001011100}
term: block(1,2,8,11){1100} * block(3,4,5,6,7,9,10,12,13,14,15){00111001110 + 01010110100 + 10001110011 + 11100001001}
term: block(1,2,8,11){1111} * block(3,4,5,6,7,9,10,12,13,14,15){00100111000 + 01001000010 + 10010000101 + 11111111111}
";

const PSI_M8: &str = "\
state 8
norm 1/sqrt(64)
term: block(1,2,3,4){0000 + 1110 + 0101 + 1011} * block(5,6,7,8){0000 - 1110 + 0001 - 1111}
term: block(1,2,3,4){0010 + 1100 + 0001 - 1111} * block(5,6,7,8){0000 + 1110 + 1001 + 0111}
term: block(1,2,3,4){0100 + 1010 + 1001 + 0111} * block(5,6,7,8){0000 + 1110 - 0101 - 1011}
term: block(1,2,3,4){0000 - 1110 + 0101 - 1011} * block(5,6,7,8){0000 - 1110 + 1001 - 1011}
";

const BELL: &str = "\
state 2
norm 1/sqrt(2)
term: block(1,2){00 + 11}
";

const GHZ3: &str = "\
state 3
norm 1/sqrt(2)
term: block(1,2,3){000 + 111}
";

const GHZ4: &str = "\
state 4
norm 1/sqrt(2)
term: block(1,2,3,4){0000 + 1111}
";

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        id: "psi11",
        n_qubits: 11,
        claimed_k: 3,
        source: "32-ket OA(32,11,2,3) equal superposition, blocks on {3,4,6,7} x {1,2,5,8,9,10,11}",
        sdl: PSI11,
    },
    CatalogEntry {
        id: "psi12",
        n_qubits: 12,
        claimed_k: 3,
        source: "32-ket OA(32,12,2,3) equal superposition, blocks on {3,4,6,7} x {1,2,5,8..12}",
        sdl: PSI12,
    },
    CatalogEntry {
        id: "psi13",
        n_qubits: 13,
        claimed_k: 3,
        source: "32-ket OA(32,13,2,3) equal superposition, blocks on {1,2,8,11} x rest",
        sdl: PSI13,
    },
    CatalogEntry {
        id: "psi14",
        n_qubits: 14,
        claimed_k: 3,
        source: "32-ket OA(32,14,2,3) equal superposition, blocks on {1,2,8,11} x rest",
        sdl: PSI14,
    },
    CatalogEntry {
        id: "psi15",
        n_qubits: 15,
        claimed_k: 3,
        source: "32-ket OA(32,15,2,3) equal superposition, blocks on {1,2,8,11} x rest",
        sdl: PSI15,
    },
    CatalogEntry {
        id: "psiM8",
        n_qubits: 8,
        claimed_k: 3,
        source: "signed 8-qubit bracket product, transcribed as printed (terms 1 and 4 overlap)",
        sdl: PSI_M8,
    },
    CatalogEntry { id: "bell", n_qubits: 2, claimed_k: 1, source: "textbook two-qubit pair", sdl: BELL },
    CatalogEntry { id: "ghz3", n_qubits: 3, claimed_k: 1, source: "textbook GHZ, 3 qubits", sdl: GHZ3 },
    CatalogEntry { id: "ghz4", n_qubits: 4, claimed_k: 1, source: "textbook GHZ, 4 qubits", sdl: GHZ4 },
];

/// Every embedded entry, in catalog order.
pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

/// Looks an entry up by id.
pub fn catalog_get(id: &str) -> Result<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownId { id: id.to_string() })
}

/// Verification outcome for one catalog entry.
#[derive(Clone, Debug)]
pub struct CatalogVerification {
    pub id: &'static str,
    pub claimed_k: usize,
    pub report: UniformityReport,
    /// The size-4 purity table, attached to the signed 8-qubit entry whose
    /// four-qubit reductions are part of its claim.
    pub quad_table: Option<Vec<(QubitSubset, Purity)>>,
}

/// Runs `check_uniformity` at each entry's claimed k. Exact arithmetic is
/// auto-selected for exact-mode expansions; entries whose expansion is not
/// uniform-magnitude (possible for transcriptions carrying collisions) run
/// on the float path. Failing entries are data, not errors.
pub fn catalog_verify_all(tolerance: f64) -> Result<Vec<CatalogVerification>> {
    let mut out = Vec::with_capacity(ENTRIES.len());
    for entry in ENTRIES {
        let psi = entry.expand()?;
        let report = check_uniformity(&psi, entry.claimed_k, CheckMode::SizeKOnly, tolerance)?;
        let quad_table = if entry.id == "psiM8" {
            Some(crate::uniformity::purity_table(&psi, 4)?)
        } else {
            None
        };
        out.push(CatalogVerification { id: entry.id, claimed_k: entry.claimed_k, report, quad_table });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::ExactRatio;

    #[test]
    fn get_known_and_unknown_ids() {
        assert_eq!(catalog_get("psi11").unwrap().claimed_k, 3);
        assert_eq!(catalog_get("bell").unwrap().claimed_k, 1);
        assert!(matches!(catalog_get("psi99"), Err(Error::UnknownId { .. })));
    }

    #[test]
    fn every_entry_parses_and_normalizes() {
        for entry in entries() {
            let psi = entry.expand().unwrap_or_else(|e| panic!("{} failed: {e}", entry.id));
            assert_eq!(psi.n_qubits(), entry.n_qubits, "{}", entry.id);
            assert!((psi.norm_sq() - 1.0).abs() < 1e-10, "{}", entry.id);
        }
    }

    #[test]
    fn equal_coefficient_entries_have_support_32() {
        // 1/sqrt(32) forces 32 unit-weight kets for the five OA states
        for id in ["psi11", "psi12", "psi13", "psi14", "psi15"] {
            let psi = catalog_get(id).unwrap().expand().unwrap();
            assert_eq!(psi.support_len(), 32, "{id}");
            assert!(psi.is_exact(), "{id}");
            assert_eq!(psi.exact_scale(), Some(32), "{id}");
            for (_, amp) in psi.iter() {
                assert_eq!(amp.exact.unwrap().sign, 1, "{id} has a negative ket");
            }
        }
    }

    #[test]
    fn psi_m8_expansion_matches_its_printed_collisions() {
        // terms 1 and 4 share 8 kets: 4 reinforce to ±1/4, 4 cancel, so the
        // printed expression expands to 52 kets, not 64
        let psi = catalog_get("psiM8").unwrap().expand().unwrap();
        assert_eq!(psi.support_len(), 52);
        assert!(!psi.is_exact());
        let mut quarters = 0;
        let mut eighths = 0;
        for (_, amp) in psi.iter() {
            let mag = amp.as_complex().norm();
            if (mag - 0.25).abs() < 1e-12 {
                quarters += 1;
            } else if (mag - 0.125).abs() < 1e-12 {
                eighths += 1;
            } else {
                panic!("unexpected magnitude {mag}");
            }
        }
        assert_eq!((quarters, eighths), (4, 48));
    }

    #[test]
    fn ghz_states_are_1_uniform_only() {
        let ghz4 = catalog_get("ghz4").unwrap().expand().unwrap();
        let r1 = check_uniformity(&ghz4, 1, CheckMode::SizeKOnly, 1e-10).unwrap();
        assert!(r1.is_k_uniform);
        let r2 = check_uniformity(&ghz4, 2, CheckMode::SizeKOnly, 1e-10).unwrap();
        assert!(!r2.is_k_uniform);
        for v in r2.verdicts {
            assert!(v.purity_trace.exact.unwrap().eq_value(&ExactRatio::new(1, 2)));
        }
    }
}
