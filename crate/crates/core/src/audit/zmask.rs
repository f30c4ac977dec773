use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Set of wires carrying a Z error. Wire `i` (1-based) is bit `i - 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZMask(pub u64);

impl ZMask {
    pub const EMPTY: ZMask = ZMask(0);

    pub fn single(wire: usize) -> ZMask {
        ZMask(1 << (wire - 1))
    }

    pub fn from_wires(wires: &[usize]) -> ZMask {
        wires.iter().fold(ZMask::EMPTY, |m, &w| m ^ ZMask::single(w))
    }

    pub fn has(self, wire: usize) -> bool {
        self.0 >> (wire - 1) & 1 == 1
    }

    pub fn toggle(&mut self, wire: usize) {
        self.0 ^= 1 << (wire - 1);
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn wires(self) -> Vec<usize> {
        (1..=64).filter(|&w| self.has(w)).collect()
    }

    pub fn restrict(self, keep: ZMask) -> ZMask {
        ZMask(self.0 & keep.0)
    }
}

impl std::ops::BitXor for ZMask {
    type Output = ZMask;
    fn bitxor(self, rhs: ZMask) -> ZMask {
        ZMask(self.0 ^ rhs.0)
    }
}

impl std::ops::BitXorAssign for ZMask {
    fn bitxor_assign(&mut self, rhs: ZMask) {
        self.0 ^= rhs.0;
    }
}

/// Prints `Z1Z2`, or `I` for the empty mask.
impl fmt::Display for ZMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("I");
        }
        for w in self.wires() {
            write!(f, "Z{w}")?;
        }
        Ok(())
    }
}

impl Serialize for ZMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Prep {
    Zero,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    X,
    Z,
}

/// CNOT-only circuit on 1-based wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordCircuit {
    wires: usize,
    cnots: Vec<(usize, usize)>,
    prep: Vec<Prep>,
    measure: Vec<Basis>,
}

impl CliffordCircuit {
    pub fn new(wires: usize, cnots: Vec<(usize, usize)>, prep: Vec<Prep>, measure: Vec<Basis>) -> Result<Self> {
        if wires == 0 || wires > 64 || prep.len() != wires || measure.len() != wires {
            return Err(Error::InvalidArgument(format!(
                "clifford circuit with {wires} wires, {} preps, {} measurements",
                prep.len(),
                measure.len()
            )));
        }
        for (k, &(c, t)) in cnots.iter().enumerate() {
            if c == t || c == 0 || t == 0 || c > wires || t > wires {
                return Err(Error::InvalidArgument(format!("cnot {k}: ({c}, {t})")));
            }
        }
        Ok(CliffordCircuit {
            wires,
            cnots,
            prep,
            measure,
        })
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn cnots(&self) -> &[(usize, usize)] {
        &self.cnots
    }

    pub fn prep(&self) -> &[Prep] {
        &self.prep
    }

    pub fn measure(&self) -> &[Basis] {
        &self.measure
    }

    pub fn measured_in(&self, basis: Basis) -> ZMask {
        let wires: Vec<usize> = (1..=self.wires).filter(|&w| self.measure[w - 1] == basis).collect();
        ZMask::from_wires(&wires)
    }

    /// Classical output for a computational-basis run: `|+⟩` wires take the
    /// next bit of `random`, `|0⟩` wires start at 0.
    pub fn classical_output(&self, random: &[bool]) -> Result<Vec<bool>> {
        let mut it = random.iter();
        let mut v = Vec::with_capacity(self.wires);
        for p in &self.prep {
            v.push(match p {
                Prep::Zero => false,
                Prep::Plus => *it.next().ok_or(Error::TapeExhausted { used: random.len() })?,
            });
        }
        for &(c, t) in &self.cnots {
            v[t - 1] ^= v[c - 1];
        }
        Ok(v)
    }
}

/// Where a fault is injected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case", tag = "at", content = "gate")]
pub enum Location {
    /// Right after preparation, before any gate.
    Prep,
    Before(usize),
    After(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FaultSite {
    pub location: Location,
    pub wire: usize,
    pub injected: ZMask,
}

impl FaultSite {
    pub fn new(location: Location, wire: usize) -> Self {
        FaultSite {
            location,
            wire,
            injected: ZMask::single(wire),
        }
    }
}

/// Pushes `mask` from `from` to the end of `circuit`. Through CNOT(c, t) a
/// Z on the target also lands on the control; a Z on the control stays put.
pub fn propagate_z(mask: ZMask, circuit: &CliffordCircuit, from: Location) -> Result<ZMask> {
    let n = circuit.cnots.len();
    let start = match from {
        Location::Prep => 0,
        Location::Before(k) if k < n => k,
        Location::After(k) if k < n => k + 1,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "location {from:?} in a circuit with {n} gates"
            )))
        }
    };
    if mask.0 >> circuit.wires != 0 {
        return Err(Error::InvalidArgument(format!(
            "mask {mask} exceeds {} wires",
            circuit.wires
        )));
    }
    let mut m = mask;
    for &(c, t) in &circuit.cnots[start..] {
        if m.has(t) {
            m.toggle(c);
        }
    }
    Ok(m)
}

/// Outcomes flipped by `mask` entering `decoder`: the propagated mask on the
/// X-measured wires.
pub fn syndrome_of(mask: ZMask, decoder: &CliffordCircuit) -> Result<ZMask> {
    Ok(propagate_z(mask, decoder, Location::Prep)?.restrict(decoder.measured_in(Basis::X)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain() -> CliffordCircuit {
        CliffordCircuit::new(3, vec![(1, 2), (2, 3)], vec![Prep::Plus; 3], vec![Basis::X; 3]).unwrap()
    }

    #[test]
    fn target_error_spreads_to_control() {
        let c = chain();
        assert_eq!(
            propagate_z(ZMask::single(3), &c, Location::Prep).unwrap(),
            ZMask::from_wires(&[2, 3])
        );
        assert_eq!(
            propagate_z(ZMask::single(2), &c, Location::Prep).unwrap(),
            ZMask::from_wires(&[1, 2])
        );
        assert_eq!(
            propagate_z(ZMask::single(1), &c, Location::Prep).unwrap(),
            ZMask::single(1)
        );
        assert_eq!(
            propagate_z(ZMask::single(3), &c, Location::After(1)).unwrap(),
            ZMask::single(3)
        );
        assert_eq!(
            propagate_z(ZMask::single(3), &c, Location::Before(1)).unwrap(),
            ZMask::from_wires(&[2, 3])
        );
        assert_eq!(propagate_z(ZMask::EMPTY, &c, Location::Prep).unwrap(), ZMask::EMPTY);
    }

    #[test]
    fn invalid_locations() {
        let c = chain();
        assert!(propagate_z(ZMask::EMPTY, &c, Location::After(2)).is_err());
        assert!(propagate_z(ZMask::single(4), &c, Location::Prep).is_err());
        assert!(CliffordCircuit::new(2, vec![(1, 1)], vec![Prep::Zero; 2], vec![Basis::Z; 2]).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(ZMask::from_wires(&[5, 6, 7]).to_string(), "Z5Z6Z7");
        assert_eq!(ZMask::EMPTY.to_string(), "I");
    }

    proptest! {
        #[test]
        fn propagation_is_a_homomorphism(
            cnots in prop::collection::vec((1usize..=7, 1usize..=7).prop_filter("distinct", |(a, b)| a != b), 0..20),
            a in 0u64..128,
            b in 0u64..128,
        ) {
            let c = CliffordCircuit::new(7, cnots, vec![Prep::Plus; 7], vec![Basis::X; 7]).unwrap();
            let pa = propagate_z(ZMask(a), &c, Location::Prep).unwrap();
            let pb = propagate_z(ZMask(b), &c, Location::Prep).unwrap();
            prop_assert_eq!(propagate_z(ZMask(a ^ b), &c, Location::Prep).unwrap(), pa ^ pb);
        }
    }
}
