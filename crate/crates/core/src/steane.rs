//! Hamming [7,4,3] and Steane [[7,1,3]] tables.
//!
//! A 7-bit word is stored in a `u8` with position 1 in bit 6 and position 7 in
//! bit 0, so `format!("{:07b}", w)` prints position 1 first.

use std::sync::OnceLock;

use serde::Serialize;

use crate::circuit::RegId;
use crate::error::{Error, Result};

/// Rows of the parity-check matrix; they also generate the even subcode.
pub const H_ROWS: [u8; 3] = [0b1010101, 0b0110011, 0b0001111];

/// Support of both logical operators, positions {1,2,3}.
pub const LOGICAL_SUPPORT: u8 = 0b1110000;

pub const WORD_MASK: u8 = 0x7f;

/// Bit for position `pos` (1-based).
pub const fn position_bit(pos: usize) -> u8 {
    1 << (7 - pos)
}

pub fn bit_at(word: u8, pos: usize) -> bool {
    word & position_bit(pos) != 0
}

pub fn word_string(word: u8) -> String {
    format!("{:07b}", word & WORD_MASK)
}

pub fn parse_word(s: &str) -> Option<u8> {
    if s.len() != 7 || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return None;
    }
    u8::from_str_radix(s, 2).ok()
}

/// Three-bit syndrome, bit `k` set when row `k` of H has odd overlap.
pub fn syndrome(word: u8) -> u8 {
    H_ROWS
        .iter()
        .enumerate()
        .fold(0, |s, (k, &row)| s | (((row & word).count_ones() as u8 & 1) << k))
}

pub fn is_codeword(word: u8) -> bool {
    word & !WORD_MASK == 0 && syndrome(word) == 0
}

/// Weight parity of `word`.
pub fn logical_value(word: u8) -> bool {
    (word & WORD_MASK).count_ones() % 2 == 1
}

/// `seeds[0]·H1 ⊕ seeds[1]·H2 ⊕ seeds[2]·H3`, then X̄ when `bit` is set.
pub fn encode_codeword(bit: bool, seeds: [bool; 3]) -> u8 {
    let mut w = 0;
    for (row, s) in H_ROWS.iter().zip(seeds) {
        if s {
            w ^= row;
        }
    }
    if bit {
        w ^= LOGICAL_SUPPORT;
    }
    w
}

pub fn overlap_parity(u: u8, v: u8) -> Result<bool> {
    for w in [u, v] {
        if !is_codeword(w) {
            return Err(Error::NotCodeword(w));
        }
    }
    Ok((u & v).count_ones() % 2 == 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PauliType {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub pauli: PauliType,
    /// Positions in the support, 1-based.
    pub support: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteaneTables {
    pub h: [u8; 3],
    /// All 16 Hamming codewords, ascending.
    pub codewords: Vec<u8>,
    /// Even-weight codewords, ascending.
    pub c_perp: Vec<u8>,
    /// Odd-weight codewords, ascending.
    pub c_minus_c_perp: Vec<u8>,
    pub logical_x_support: [usize; 3],
    pub logical_z_support: [usize; 3],
    /// g1..g3 are Z-type and g4..g6 X-type, each on one row of H.
    pub generators: [Generator; 6],
}

impl SteaneTables {
    pub fn get() -> &'static SteaneTables {
        static TABLES: OnceLock<SteaneTables> = OnceLock::new();
        TABLES.get_or_init(SteaneTables::build)
    }

    fn build() -> SteaneTables {
        let codewords: Vec<u8> = (0..=WORD_MASK).filter(|&w| syndrome(w) == 0).collect();
        let (odd, even): (Vec<u8>, Vec<u8>) = codewords.iter().partition(|&&w| logical_value(w));
        let support = |row: u8| {
            let mut s = [0; 4];
            let mut k = 0;
            for pos in 1..=7 {
                if bit_at(row, pos) {
                    s[k] = pos;
                    k += 1;
                }
            }
            s
        };
        let generators = std::array::from_fn(|i| Generator {
            pauli: if i < 3 { PauliType::Z } else { PauliType::X },
            support: support(H_ROWS[i % 3]),
        });
        SteaneTables {
            h: H_ROWS,
            codewords,
            c_perp: even,
            c_minus_c_perp: odd,
            logical_x_support: [1, 2, 3],
            logical_z_support: [1, 2, 3],
            generators,
        }
    }

    pub fn parity_class(&self, bit: bool) -> &[u8] {
        if bit {
            &self.c_minus_c_perp
        } else {
            &self.c_perp
        }
    }
}

/// Counts of 00, 01, 10, 11 at positions (i, j) over the parity-`bit`
/// codewords, indexed by `2·w_i + w_j`.
pub fn pair_counts(bit: bool, i: usize, j: usize) -> Result<[usize; 4]> {
    if i == j || !(1..=7).contains(&i) || !(1..=7).contains(&j) {
        return Err(Error::InvalidArgument(format!("position pair ({i}, {j})")));
    }
    let mut counts = [0; 4];
    for &w in SteaneTables::get().parity_class(bit) {
        counts[2 * usize::from(bit_at(w, i)) + usize::from(bit_at(w, j))] += 1;
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCount {
    pub parity: u8,
    pub positions: (usize, usize),
    pub counts: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairwiseReport {
    pub uniform: bool,
    pub pairs_checked: usize,
    pub non_uniform: Vec<PairCount>,
}

/// Checks that every position pair of a uniform parity-b codeword is
/// uniform over {0,1}², for both b.
pub fn pairwise_uniformity_check() -> PairwiseReport {
    let mut non_uniform = Vec::new();
    let mut pairs_checked = 0;
    for bit in [false, true] {
        for i in 1..=7 {
            for j in i + 1..=7 {
                let counts = pair_counts(bit, i, j).expect("valid pair");
                pairs_checked += 1;
                if counts != [2; 4] {
                    non_uniform.push(PairCount {
                        parity: u8::from(bit),
                        positions: (i, j),
                        counts,
                    });
                }
            }
        }
    }
    PairwiseReport {
        uniform: non_uniform.is_empty(),
        pairs_checked,
        non_uniform,
    }
}

/// Seven registers holding one code block, in position order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub struct CodeBlock {
    regs: [RegId; 7],
}

impl CodeBlock {
    pub fn new(regs: [RegId; 7]) -> Result<CodeBlock> {
        for i in 0..7 {
            if regs[..i].contains(&regs[i]) {
                return Err(Error::InvalidArgument(format!(
                    "register {} appears twice in a code block",
                    regs[i]
                )));
            }
        }
        Ok(CodeBlock { regs })
    }

    pub fn regs(&self) -> &[RegId; 7] {
        &self.regs
    }

    /// Register at position `pos` (1-based).
    pub fn at(&self, pos: usize) -> RegId {
        self.regs[pos - 1]
    }

    /// Reads the block's word out of a register file.
    pub fn word(&self, registers: &[bool]) -> u8 {
        self.regs.iter().fold(0, |w, &r| (w << 1) | u8::from(registers[r]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> u8 {
        parse_word(s).unwrap()
    }

    #[test]
    fn table_sizes_and_weights() {
        let t = SteaneTables::get();
        assert_eq!(t.codewords.len(), 16);
        assert_eq!(t.c_perp.len(), 8);
        assert!(t
            .c_perp
            .iter()
            .all(|&c| c.count_ones() % 2 == 0 && t.codewords.contains(&c)));
        assert!(t.c_minus_c_perp.iter().all(|&c| c.count_ones() % 2 == 1));
        assert!(t.codewords.iter().all(|&c| syndrome(c) == 0));
    }

    #[test]
    fn generator_supports() {
        let t = SteaneTables::get();
        assert_eq!(t.generators[0].support, [1, 3, 5, 7]);
        assert_eq!(t.generators[1].support, [2, 3, 6, 7]);
        assert_eq!(t.generators[2].support, [4, 5, 6, 7]);
        assert_eq!(t.generators[3].pauli, PauliType::X);
        assert_eq!(t.generators[5].support, [4, 5, 6, 7]);
    }

    #[test]
    fn logical_values() {
        assert!(!logical_value(w("0001111")));
        assert!(logical_value(w("1110000")));
        assert!(!logical_value(0));
    }

    #[test]
    fn encoding_examples() {
        assert_eq!(encode_codeword(false, [false; 3]), 0);
        assert_eq!(encode_codeword(true, [false; 3]), w("1110000"));
        let mut even: Vec<u8> = (0..8)
            .map(|s| encode_codeword(false, [s & 1 == 1, s & 2 == 2, s & 4 == 4]))
            .collect();
        even.sort();
        assert_eq!(even, SteaneTables::get().c_perp);
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_parity(w("0001111"), w("0001111")), Ok(false));
        assert_eq!(overlap_parity(w("1110000"), w("1001100")), Ok(true));
        assert_eq!(overlap_parity(w("0001111"), w("0110011")), Ok(false));
        assert_eq!(overlap_parity(w("0000001"), 0), Err(Error::NotCodeword(1)));
    }

    #[test]
    fn pair_counts_and_degenerate_pair() {
        assert_eq!(pair_counts(false, 1, 2), Ok([2; 4]));
        assert!(pair_counts(false, 3, 3).is_err());
        let report = pairwise_uniformity_check();
        assert!(report.uniform);
        assert_eq!(report.pairs_checked, 42);
    }

    #[test]
    fn dual_containment_and_xor_closure() {
        let t = SteaneTables::get();
        for &u in &t.c_perp {
            for &v in &t.codewords {
                assert_eq!((u & v).count_ones() % 2, 0);
            }
        }
        for &a in &t.codewords {
            for &b in &t.codewords {
                assert!(is_codeword(a ^ b));
                assert_eq!(logical_value(a ^ b), logical_value(a) ^ logical_value(b));
                assert_eq!(overlap_parity(a, b).unwrap(), logical_value(a) & logical_value(b));
            }
        }
    }

    #[test]
    fn code_block_reads_position_order() {
        let b = CodeBlock::new([10, 11, 12, 13, 14, 15, 16]).unwrap();
        let mut regs = vec![false; 17];
        regs[10] = true;
        regs[16] = true;
        assert_eq!(b.word(&regs), w("1000001"));
        assert_eq!(b.at(7), 16);
        assert!(CodeBlock::new([1, 2, 3, 4, 5, 6, 1]).is_err());
    }

    proptest! {
        #[test]
        fn encoding_has_requested_parity(bit: bool, seeds: [bool; 3]) {
            let c = encode_codeword(bit, seeds);
            prop_assert!(is_codeword(c));
            prop_assert_eq!(logical_value(c), bit);
        }

        #[test]
        fn word_strings_round_trip(word in 0u8..128) {
            prop_assert_eq!(parse_word(&word_string(word)), Some(word));
        }
    }
}
