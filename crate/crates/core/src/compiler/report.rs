//! Location counts, pair counts and size ratios of a compiled circuit.

use serde::Serialize;

use super::emit::{GadgetKind, LocationCount};
use super::standalone::{standalone, Standalone};
use super::CompiledCircuit;
use crate::circuit::{Circuit, EventSource};
use crate::error::Result;

/// Locations of the largest state-preparation exRec in the published count.
pub const REFERENCE_LOCATIONS: usize = 20;

/// Pairs of locations, `C(n, 2)`.
pub fn pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn threshold(n: usize) -> Option<f64> {
    match pairs(n) {
        0 => None,
        k => Some(1.0 / k as f64),
    }
}

/// ASAP depth: a gate sits one layer after the latest gate touching any of
/// its registers or producing its condition event.
pub fn circuit_depth(circuit: &Circuit) -> usize {
    let mut reg_layer = vec![0usize; circuit.registers().len()];
    let mut gate_layer = Vec::with_capacity(circuit.gates().len());
    let mut depth = 0;
    for g in circuit.gates() {
        let ops = g.kind.operands();
        let mut layer = ops.iter().map(|&r| reg_layer[r]).max().unwrap_or(0);
        if let Some(c) = g.condition {
            if let EventSource::Gate { gate, .. } = circuit.events()[c].source {
                layer = layer.max(gate_layer[gate]);
            }
        }
        layer += 1;
        for &r in ops.iter() {
            reg_layer[r] = layer;
        }
        gate_layer.push(layer);
        depth = depth.max(layer);
    }
    depth
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GadgetLocations {
    pub index: usize,
    pub kind: GadgetKind,
    pub source_gate: usize,
    pub locations: LocationCount,
    pub total: usize,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepLocations {
    pub gadget: Standalone,
    pub locations: LocationCount,
    pub total: usize,
    pub pairs: usize,
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeReport {
    pub logical_gates: usize,
    pub logical_depth: usize,
    pub physical_gates: usize,
    pub physical_depth: usize,
    pub registers: usize,
    pub wire_events: usize,
    pub size_ratio: Option<f64>,
    pub depth_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocationReport {
    pub reference_locations: usize,
    pub reference_pairs: usize,
    pub reference_threshold: f64,
    /// Standalone preparation gadgets as emitted by this compiler.
    pub preparations: Vec<PrepLocations>,
    /// One row per top-level gadget expanding a source gate.
    pub gadgets: Vec<GadgetLocations>,
    pub largest: Option<GadgetLocations>,
    pub largest_threshold: Option<f64>,
    pub size: SizeReport,
}

fn ratio(a: usize, b: usize) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

pub fn location_report(compiled: &CompiledCircuit) -> Result<LocationReport> {
    let preparations = [Standalone::PrepZero, Standalone::PrepPlus, Standalone::ShorPrepVerify]
        .into_iter()
        .map(|kind| {
            let g = standalone(kind)?;
            let total = g.locations.total();
            Ok(PrepLocations {
                gadget: kind,
                locations: g.locations,
                total,
                pairs: pairs(total),
                threshold: threshold(total),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let gadgets: Vec<GadgetLocations> = compiled
        .meta
        .gadgets
        .iter()
        .enumerate()
        .filter(|(_, g)| g.depth == 0)
        .filter_map(|(index, g)| {
            let source_gate = g.source_gate?;
            let total = g.locations.total();
            Some(GadgetLocations {
                index,
                kind: g.kind,
                source_gate,
                locations: g.locations,
                total,
                pairs: pairs(total),
            })
        })
        .collect();
    let largest = gadgets
        .iter()
        .max_by_key(|g| (g.total, std::cmp::Reverse(g.index)))
        .cloned();
    let largest_threshold = largest.as_ref().and_then(|g| threshold(g.total));

    let c = &compiled.circuit;
    let physical_depth = circuit_depth(c);
    let size = SizeReport {
        logical_gates: compiled.meta.logical_gates,
        logical_depth: compiled.meta.logical_depth,
        physical_gates: c.gates().len(),
        physical_depth,
        registers: c.registers().len(),
        wire_events: c.event_count(),
        size_ratio: ratio(c.gates().len(), compiled.meta.logical_gates),
        depth_ratio: ratio(physical_depth, compiled.meta.logical_depth),
    };
    Ok(LocationReport {
        reference_locations: REFERENCE_LOCATIONS,
        reference_pairs: pairs(REFERENCE_LOCATIONS),
        reference_threshold: 1.0 / pairs(REFERENCE_LOCATIONS) as f64,
        preparations,
        gadgets,
        largest,
        largest_threshold,
        size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::circuit::{parse_netlist, GateKind, Role};

    #[test]
    fn pair_arithmetic() {
        assert_eq!(pairs(20), 190);
        assert_eq!(pairs(0), 0);
        assert_eq!(pairs(1), 0);
        assert!((1.0 / pairs(REFERENCE_LOCATIONS) as f64 - 0.005_263_157_894_736_842).abs() < 1e-15);
    }

    #[test]
    fn depth_counts_shared_registers() {
        let c = parse_netlist("reg a\nreg b\nreg c\ngate NOT a\ngate NOT b\ngate CNOT a b\ngate NOT c\n").unwrap();
        assert_eq!(circuit_depth(&c), 2);
    }

    #[test]
    fn depth_respects_conditions() {
        let mut b = CircuitBuilder::new();
        let a = b.add_register("a", Role::Internal, false).unwrap();
        let x = b.add_register("x", Role::Internal, false).unwrap();
        b.push(GateKind::Not(a)).unwrap();
        let ev = b.push(GateKind::Not(a)).unwrap();
        b.push_conditioned(ev, GateKind::Not(x)).unwrap();
        assert_eq!(circuit_depth(&b.build().unwrap()), 3);
    }

    #[test]
    fn prep_zero_locations() {
        let g = standalone(Standalone::PrepZero).unwrap();
        assert_eq!(
            g.locations,
            LocationCount {
                preparations: 14,
                gates: 25,
                measurements: 7
            }
        );
    }
}
