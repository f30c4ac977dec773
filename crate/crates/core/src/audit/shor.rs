//! Single-fault analysis of the Shor-state preparation and its decoder.

use std::collections::BTreeMap;

use serde::Serialize;

use super::zmask::{propagate_z, syndrome_of, Basis, CliffordCircuit, FaultSite, Location, Prep, ZMask};
use crate::error::Result;

pub const SHOR_PREP_CNOTS: [(usize, usize); 6] = [(5, 4), (3, 4), (6, 5), (2, 3), (7, 6), (1, 2)];
pub const SHOR_DECODE_CNOTS: [(usize, usize); 6] = [(1, 4), (7, 3), (6, 2), (2, 5), (3, 4), (4, 5)];
pub const SHOR_X_MEASURED: [usize; 6] = [1, 2, 3, 4, 6, 7];
pub const SHOR_Z_MEASURED: usize = 5;

/// The four fault sites singled out in the analysis, with their expected
/// output pattern and syndrome: (gate index, wire, pattern, syndrome).
pub const MARKED_SITES: [(usize, usize, &[usize], &[usize]); 4] = [
    (3, 2, &[1, 2], &[1, 2, 6]),
    (1, 3, &[1, 2, 3], &[1, 2, 3, 6, 7]),
    (0, 5, &[5, 6, 7], &[2, 4, 6, 7]),
    (2, 6, &[6, 7], &[6, 7]),
];

pub fn shor_prep_circuit() -> CliffordCircuit {
    let prep = (1..=7).map(|w| if w == 4 { Prep::Zero } else { Prep::Plus }).collect();
    CliffordCircuit::new(7, SHOR_PREP_CNOTS.to_vec(), prep, vec![Basis::Z; 7]).expect("fixture")
}

pub fn shor_decode_circuit() -> CliffordCircuit {
    let measure = (1..=7)
        .map(|w| if w == SHOR_Z_MEASURED { Basis::Z } else { Basis::X })
        .collect();
    CliffordCircuit::new(7, SHOR_DECODE_CNOTS.to_vec(), vec![Prep::Plus; 7], measure).expect("fixture")
}

/// Z-type stabilizers of the prepared state: a Z on a `|0⟩`-prepared wire,
/// pushed to the output.
pub fn output_stabilizers(prep: &CliffordCircuit) -> Result<Vec<ZMask>> {
    (1..=prep.wires())
        .filter(|&w| prep.prep()[w - 1] == Prep::Zero)
        .map(|w| propagate_z(ZMask::single(w), prep, Location::Prep))
        .collect()
}

/// Minimum-weight representative of `mask` modulo the span of `stabilizers`,
/// ties broken by the smaller bit pattern.
pub fn canonical(mask: ZMask, stabilizers: &[ZMask]) -> ZMask {
    let mut best = mask;
    for sel in 1..1u64 << stabilizers.len() {
        let mut m = mask;
        for (k, &s) in stabilizers.iter().enumerate() {
            if sel >> k & 1 == 1 {
                m ^= s;
            }
        }
        if (m.weight(), m.0) < (best.weight(), best.0) {
            best = m;
        }
    }
    best
}

/// Every single-Z site: after preparation on each wire, and after each gate
/// on each of its operands. "Before gate k" coincides with one of these.
pub fn single_fault_sites(prep: &CliffordCircuit) -> Vec<FaultSite> {
    let mut sites: Vec<FaultSite> = (1..=prep.wires()).map(|w| FaultSite::new(Location::Prep, w)).collect();
    for (k, &(c, t)) in prep.cnots().iter().enumerate() {
        sites.push(FaultSite::new(Location::After(k), c));
        sites.push(FaultSite::new(Location::After(k), t));
    }
    sites
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiteRecord {
    pub site: FaultSite,
    pub raw_pattern: ZMask,
    pub pattern: ZMask,
    pub syndrome: ZMask,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaultClass {
    pub pattern: ZMask,
    pub weight: u32,
    pub syndrome: ZMask,
    pub sites: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkedCheck {
    pub site: FaultSite,
    pub expected_pattern: ZMask,
    pub pattern: ZMask,
    pub expected_syndrome: ZMask,
    pub syndrome: ZMask,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShorAudit {
    pub stabilizers: Vec<ZMask>,
    pub no_fault_syndrome: ZMask,
    pub sites: Vec<SiteRecord>,
    pub classes: Vec<FaultClass>,
    pub multi_error_classes: Vec<ZMask>,
    pub expected_multi_error_classes: Vec<ZMask>,
    /// Multi-error classes beyond the expected four; reported, not failed.
    pub extra_classes: Vec<ZMask>,
    pub single_error_syndromes: Vec<(ZMask, ZMask)>,
    pub marked: Vec<MarkedCheck>,
    pub syndromes_distinct: bool,
    pub pass: bool,
}

/// Enumerates every single-Z fault in `prep`, groups sites by output pattern
/// and checks that multi-error patterns are told apart by `decoder`.
pub fn enumerate_single_faults(prep: &CliffordCircuit, decoder: &CliffordCircuit) -> Result<ShorAudit> {
    let stabilizers = output_stabilizers(prep)?;
    let mut sites = Vec::new();
    let mut classes: BTreeMap<ZMask, (ZMask, usize)> = BTreeMap::new();
    for site in single_fault_sites(prep) {
        let raw = propagate_z(site.injected, prep, site.location)?;
        let pattern = canonical(raw, &stabilizers);
        let syndrome = syndrome_of(pattern, decoder)?;
        classes.entry(pattern).or_insert((syndrome, 0)).1 += 1;
        sites.push(SiteRecord {
            site,
            raw_pattern: raw,
            pattern,
            syndrome,
        });
    }

    let classes: Vec<FaultClass> = classes
        .into_iter()
        .map(|(pattern, (syndrome, n))| FaultClass {
            pattern,
            weight: pattern.weight(),
            syndrome,
            sites: n,
        })
        .collect();
    let multi: Vec<&FaultClass> = classes.iter().filter(|c| c.weight >= 2).collect();
    let expected: Vec<ZMask> = MARKED_SITES.iter().map(|m| ZMask::from_wires(m.2)).collect();
    let extra_classes: Vec<ZMask> = multi
        .iter()
        .map(|c| c.pattern)
        .filter(|p| !expected.contains(p))
        .collect();

    let single_error_syndromes = (1..=prep.wires())
        .map(|w| Ok((ZMask::single(w), syndrome_of(ZMask::single(w), decoder)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<ZMask> = single_error_syndromes.iter().map(|s| s.1).collect();
    all.extend(multi.iter().map(|c| c.syndrome));
    let mut dedup = all.clone();
    dedup.sort();
    dedup.dedup();
    let syndromes_distinct = dedup.len() == all.len() && !all.contains(&ZMask::EMPTY);

    let mut marked = Vec::new();
    for &(gate, wire, pat, syn) in &MARKED_SITES {
        let site = FaultSite::new(Location::After(gate), wire);
        let pattern = propagate_z(site.injected, prep, site.location)?;
        let syndrome = syndrome_of(pattern, decoder)?;
        let expected_pattern = ZMask::from_wires(pat);
        let expected_syndrome = ZMask::from_wires(syn);
        marked.push(MarkedCheck {
            site,
            expected_pattern,
            pattern,
            expected_syndrome,
            syndrome,
            pass: pattern == expected_pattern && syndrome == expected_syndrome,
        });
    }

    let mut found: Vec<ZMask> = multi.iter().map(|c| c.pattern).collect();
    found.retain(|p| expected.contains(p));
    let all_expected_found = expected.iter().all(|e| found.contains(e));
    let no_fault_syndrome = syndrome_of(ZMask::EMPTY, decoder)?;
    let pass =
        syndromes_distinct && all_expected_found && marked.iter().all(|m| m.pass) && no_fault_syndrome.is_empty();

    Ok(ShorAudit {
        stabilizers,
        no_fault_syndrome,
        sites,
        multi_error_classes: multi.iter().map(|c| c.pattern).collect(),
        classes,
        expected_multi_error_classes: expected,
        extra_classes,
        single_error_syndromes,
        marked,
        syndromes_distinct,
        pass,
    })
}

/// Runs the audit on the frozen fixtures.
pub fn audit_shor() -> Result<ShorAudit> {
    enumerate_single_faults(&shor_prep_circuit(), &shor_decode_circuit())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(w: &[usize]) -> ZMask {
        ZMask::from_wires(w)
    }

    #[test]
    fn marked_patterns() {
        let prep = shor_prep_circuit();
        assert_eq!(propagate_z(z(&[2]), &prep, Location::Before(5)).unwrap(), z(&[1, 2]));
        assert_eq!(propagate_z(z(&[3]), &prep, Location::After(1)).unwrap(), z(&[1, 2, 3]));
        assert_eq!(propagate_z(z(&[5]), &prep, Location::After(0)).unwrap(), z(&[5, 6, 7]));
        assert_eq!(propagate_z(z(&[6]), &prep, Location::After(2)).unwrap(), z(&[6, 7]));
    }

    #[test]
    fn decoder_syndromes() {
        let d = shor_decode_circuit();
        assert_eq!(syndrome_of(z(&[1, 2]), &d).unwrap(), z(&[1, 2, 6]));
        assert_eq!(syndrome_of(z(&[1, 2, 3]), &d).unwrap(), z(&[1, 2, 3, 6, 7]));
        assert_eq!(syndrome_of(z(&[5, 6, 7]), &d).unwrap(), z(&[2, 4, 6, 7]));
        assert_eq!(syndrome_of(z(&[6, 7]), &d).unwrap(), z(&[6, 7]));
        assert_eq!(syndrome_of(ZMask::EMPTY, &d).unwrap(), ZMask::EMPTY);
        // The all-Z stabilizer is invisible to the decoder.
        assert_eq!(syndrome_of(z(&[1, 2, 3, 4, 5, 6, 7]), &d).unwrap(), ZMask::EMPTY);
    }

    #[test]
    fn single_error_syndromes() {
        let d = shor_decode_circuit();
        let expected: [&[usize]; 7] = [&[1], &[2, 6], &[3, 7], &[1, 3, 4], &[2, 4], &[6], &[7]];
        for (w, s) in expected.iter().enumerate() {
            assert_eq!(syndrome_of(z(&[w + 1]), &d).unwrap(), z(s), "Z{}", w + 1);
        }
    }

    #[test]
    fn full_audit_passes_with_exactly_four_classes() {
        let a = audit_shor().unwrap();
        assert!(a.pass);
        assert!(a.syndromes_distinct);
        assert!(a.extra_classes.is_empty());
        assert_eq!(a.stabilizers, vec![z(&[1, 2, 3, 4, 5, 6, 7])]);
        let mut multi = a.multi_error_classes.clone();
        multi.sort();
        let mut expected = a.expected_multi_error_classes.clone();
        expected.sort();
        assert_eq!(multi, expected);
        assert_eq!(a.sites.len(), 7 + 12);
    }

    #[test]
    fn complement_folds_into_same_class() {
        let prep = shor_prep_circuit();
        let stab = output_stabilizers(&prep).unwrap();
        let raw = propagate_z(z(&[4]), &prep, Location::After(0)).unwrap();
        assert_eq!(raw, z(&[1, 2, 3, 4]));
        assert_eq!(canonical(raw, &stab), z(&[5, 6, 7]));
    }

    #[test]
    fn classical_prep_outputs_even_words() {
        let prep = shor_prep_circuit();
        let mut seen = std::collections::HashSet::new();
        for t in 0..64u32 {
            let bits: Vec<bool> = (0..6).map(|i| t >> i & 1 == 1).collect();
            let out = prep.classical_output(&bits).unwrap();
            assert_eq!(out.iter().filter(|&&b| b).count() % 2, 0);
            seen.insert(out);
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn broken_decoder_fails_distinctness() {
        let prep = shor_prep_circuit();
        let d = CliffordCircuit::new(7, vec![], vec![Prep::Plus; 7], vec![Basis::Z; 7]).unwrap();
        let a = enumerate_single_faults(&prep, &d).unwrap();
        assert!(!a.syndromes_distinct);
        assert!(!a.pass);
    }
}
