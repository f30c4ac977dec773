use std::f64::consts::PI;

use num_complex::Complex64;
use rand::RngCore;
use serde::Serialize;

use super::density::{
    check_wires, hermitian_error, max_abs_diff, min_eigenvalue, CMatrix, DensityMatrix, LeakageFunction,
};
use crate::error::{Error, Result};

/// Operator-sum map `ρ ↦ Σ w_k E_k ρ E_k†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    dim: usize,
    terms: Vec<(f64, CMatrix)>,
}

impl Channel {
    pub fn new(dim: usize, terms: Vec<(f64, CMatrix)>) -> Result<Self> {
        for (_, e) in &terms {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: e.nrows(),
                });
            }
        }
        Ok(Channel { dim, terms })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let dim = check_wires(n)?;
        Channel::new(dim, vec![(1.0, CMatrix::identity(dim, dim))])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(f64, CMatrix)] {
        &self.terms
    }

    /// Applies the map to any operator, not only density matrices.
    pub fn apply_operator(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (w, e) in &self.terms {
            out += (e * rho * e.adjoint()) * Complex64::new(*w, 0.0);
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rho.dim(),
            });
        }
        Ok(self.apply_operator(rho.matrix()))
    }

    /// `max |Σ w E†E − I|`.
    pub fn completeness_error(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for (w, e) in &self.terms {
            sum += (e.adjoint() * e) * Complex64::new(*w, 0.0);
        }
        max_abs_diff(&sum, &CMatrix::identity(self.dim, self.dim))
    }

    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.dim != next.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: next.dim,
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * next.terms.len());
        for (w1, e1) in &self.terms {
            for (w2, e2) in &next.terms {
                terms.push((w1 * w2, e2 * e1));
            }
        }
        Channel::new(self.dim, terms)
    }

    /// Weighted sum of channels of equal dimension.
    pub fn convex(parts: &[(f64, Channel)]) -> Result<Channel> {
        let dim = parts
            .first()
            .map(|p| p.1.dim)
            .ok_or_else(|| Error::InvalidArgument("no channels".into()))?;
        let mut terms = Vec::new();
        for (p, c) in parts {
            if c.dim != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: c.dim,
                });
            }
            terms.extend(c.terms.iter().map(|(w, e)| (p * w, e.clone())));
        }
        Channel::new(dim, terms)
    }
}

/// Keeps coherence only within each level set of `l`: `ρ ↦ Σ_v P_v ρ P_v`.
pub fn leakage_channel(l: &LeakageFunction) -> Result<Channel> {
    let dim = check_wires(l.wires())?;
    let (labels, d) = l.dense_table();
    let terms = (0..d)
        .map(|v| {
            let diag: Vec<Complex64> = labels
                .iter()
                .map(|&x| Complex64::new(if x == v { 1.0 } else { 0.0 }, 0.0))
                .collect();
            (1.0, CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
        })
        .collect();
    Channel::new(dim, terms)
}

/// `F^k` with diagonal entries `ω^{k·l(s)}`, `ω = exp(2πi/d)`.
fn phase_operator(labels: &[usize], d: usize, k: usize) -> CMatrix {
    let diag: Vec<Complex64> = labels
        .iter()
        .map(|&x| Complex64::from_polar(1.0, 2.0 * PI * ((k * x) % d) as f64 / d as f64))
        .collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
}

/// `ρ ↦ (1/d) Σ_k F^k ρ F^k†`, with `d` the realized image size of `l`.
pub fn dephasing_channel(l: &LeakageFunction) -> Result<Channel> {
    let dim = check_wires(l.wires())?;
    let (labels, d) = l.dense_table();
    let w = 1.0 / d as f64;
    Channel::new(dim, (0..d).map(|k| (w, phase_operator(&labels, d, k))).collect())
}

fn check_distribution(requests: &[(LeakageFunction, f64)]) -> Result<()> {
    let total: f64 = requests.iter().map(|r| r.1).sum();
    if requests.is_empty() || requests.iter().any(|r| r.1.is_nan() || r.1 < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "mixture probabilities must be non-negative and sum to 1 (sum {total})"
        )));
    }
    let n = requests[0].0.wires();
    if let Some(r) = requests.iter().find(|r| r.0.wires() != n) {
        return Err(Error::DimensionMismatch {
            left: 1 << n,
            right: 1 << r.0.wires(),
        });
    }
    Ok(())
}

/// Mixture of dephasing channels, each normalised by its own image size.
pub fn mixture_channel(requests: &[(LeakageFunction, f64)]) -> Result<Channel> {
    check_distribution(requests)?;
    let parts = requests
        .iter()
        .map(|(l, p)| Ok((*p, dephasing_channel(l)?)))
        .collect::<Result<Vec<_>>>()?;
    Channel::convex(&parts)
}

/// Mixture of leakage channels with the same weights.
pub fn leakage_mixture(requests: &[(LeakageFunction, f64)]) -> Result<Channel> {
    check_distribution(requests)?;
    let parts = requests
        .iter()
        .map(|(l, p)| Ok((*p, leakage_channel(l)?)))
        .collect::<Result<Vec<_>>>()?;
    Channel::convex(&parts)
}

/// The `dim²` probe operators: `|i⟩⟨i|`, and for `i < j` the projectors onto
/// `(|i⟩ + |j⟩)/√2` and `(|i⟩ + i|j⟩)/√2`. They span the operator space.
pub fn probe_states(dim: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut m = CMatrix::zeros(dim, dim);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        out.push(m);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let mut m = CMatrix::zeros(dim, dim);
                m[(i, i)] = Complex64::new(0.5, 0.0);
                m[(j, j)] = Complex64::new(0.5, 0.0);
                m[(j, i)] = phase * 0.5;
                m[(i, j)] = phase.conj() * 0.5;
                out.push(m);
            }
        }
    }
    out
}

/// Largest entrywise output difference over [`probe_states`].
pub fn channel_distance(c1: &Channel, c2: &Channel) -> Result<f64> {
    if c1.dim != c2.dim {
        return Err(Error::DimensionMismatch {
            left: c1.dim,
            right: c2.dim,
        });
    }
    Ok(probe_states(c1.dim)
        .iter()
        .map(|rho| max_abs_diff(&c1.apply_operator(rho), &c2.apply_operator(rho)))
        .fold(0.0, f64::max))
}

/// Worst violation of the density-matrix conditions by `c(ρ)` over the
/// probe states: (Hermitian error, trace error, negative eigenvalue).
pub fn output_validity(c: &Channel) -> (f64, f64, f64) {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for rho in probe_states(c.dim) {
        let out = c.apply_operator(&rho);
        worst.0 = worst.0.max(hermitian_error(&out));
        worst.1 = worst.1.max((out.trace() - Complex64::new(1.0, 0.0)).norm());
        worst.2 = worst.2.max(-min_eigenvalue(&out));
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub wires: usize,
    pub alphabet: usize,
    pub exhaustive_functions: usize,
    pub random_functions: usize,
    pub max_distance: f64,
    pub max_completeness_error: f64,
    pub max_hermitian_error: f64,
    pub max_trace_error: f64,
    pub max_negative_eigenvalue: f64,
    pub max_idempotence_error: f64,
    pub max_mixture_distance: f64,
    pub phase_error_identity_distance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const LEMMA_TOL: f64 = 1e-10;
pub const PHASE_ERROR_TOL: f64 = 1e-12;

/// Leaking the single wire equals a random Z: distance between the leakage
/// channel of the identity function on one wire and `½(ρ + ZρZ)`.
pub fn phase_error_identity_distance() -> Result<f64> {
    let leak = leakage_channel(&LeakageFunction::identity(1)?)?;
    let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]));
    let half_z = Channel::new(2, vec![(0.5, CMatrix::identity(2, 2)), (0.5, z)])?;
    channel_distance(&leak, &half_z)
}

/// Compares leakage and dephasing channels for every table on up to
/// `min(wires, 2)` wires over `0..alphabet`, plus `trials` random tables on
/// `wires` wires and random two-function mixtures.
pub fn lemma_sweep(wires: usize, alphabet: usize, trials: usize, seed: u64) -> Result<SweepReport> {
    check_wires(wires)?;
    let mut functions = Vec::new();
    for n in 1..=wires.min(2) {
        functions.extend(LeakageFunction::all(n, alphabet)?);
    }
    let exhaustive = functions.len();
    let mut rng = crate::rng::stream(seed, 0);
    for _ in 0..trials {
        functions.push(LeakageFunction::random(wires, alphabet, &mut rng)?);
    }

    let mut report = SweepReport {
        wires,
        alphabet,
        exhaustive_functions: exhaustive,
        random_functions: trials,
        max_distance: 0.0,
        max_completeness_error: 0.0,
        max_hermitian_error: 0.0,
        max_trace_error: 0.0,
        max_negative_eigenvalue: 0.0,
        max_idempotence_error: 0.0,
        max_mixture_distance: 0.0,
        phase_error_identity_distance: phase_error_identity_distance()?,
        tolerance: LEMMA_TOL,
        pass: false,
    };
    for l in &functions {
        let leak = leakage_channel(l)?;
        let deph = dephasing_channel(l)?;
        report.max_distance = report.max_distance.max(channel_distance(&leak, &deph)?);
        for c in [&leak, &deph] {
            report.max_completeness_error = report.max_completeness_error.max(c.completeness_error());
            let (h, t, e) = output_validity(c);
            report.max_hermitian_error = report.max_hermitian_error.max(h);
            report.max_trace_error = report.max_trace_error.max(t);
            report.max_negative_eigenvalue = report.max_negative_eigenvalue.max(e);
        }
        let twice = leak.then(&leak)?;
        report.max_idempotence_error = report.max_idempotence_error.max(channel_distance(&twice, &leak)?);
    }
    if wires > 0 {
        for _ in 0..trials {
            let a = LeakageFunction::random(wires, alphabet, &mut rng)?;
            let b = LeakageFunction::random(wires, alphabet, &mut rng)?;
            let p = rand::Rng::random::<f64>(&mut rng);
            let req = [(a, p), (b, 1.0 - p)];
            let d = channel_distance(&mixture_channel(&req)?, &leakage_mixture(&req)?)?;
            report.max_mixture_distance = report.max_mixture_distance.max(d);
        }
    }
    report.pass = report.max_distance <= LEMMA_TOL
        && report.max_mixture_distance <= LEMMA_TOL
        && report.max_completeness_error <= LEMMA_TOL
        && report.max_trace_error <= LEMMA_TOL
        && report.max_negative_eigenvalue <= LEMMA_TOL
        && report.max_idempotence_error <= LEMMA_TOL
        && report.phase_error_identity_distance <= PHASE_ERROR_TOL;
    Ok(report)
}

/// Draws a random state and returns `(leakage(ρ), dephasing(ρ))` distance;
/// used by the random-state comparisons.
pub fn state_distance<R: RngCore + ?Sized>(l: &LeakageFunction, rng: &mut R) -> Result<f64> {
    let rho = DensityMatrix::random(l.wires(), rng)?;
    let a = leakage_channel(l)?.apply(&rho)?;
    let b = dephasing_channel(l)?.apply(&rho)?;
    Ok(max_abs_diff(&a, &b))
}
