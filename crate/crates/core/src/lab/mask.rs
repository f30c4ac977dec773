//! Leak masks.

use rand::Rng as _;

use crate::circuit::EventId;
use crate::rng::Rng;

/// Independent Bernoulli(`p`) selection from `events`, in order. Gaps are
/// drawn geometrically so the cost tracks the mask size.
pub fn sample_mask(events: &[EventId], p: f64, rng: &mut Rng) -> Vec<EventId> {
    if p <= 0.0 || events.is_empty() {
        return Vec::new();
    }
    if p >= 1.0 {
        return events.to_vec();
    }
    let log_q = (-p).ln_1p();
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        // 1 - u lies in (0, 1], so the logarithm is finite.
        let u: f64 = rng.random();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if gap >= (events.len() - i) as f64 {
            return out;
        }
        i += gap as usize;
        out.push(events[i]);
        i += 1;
        if i >= events.len() {
            return out;
        }
    }
}
