//! Numerical checks of the two facts about `t -> |u[t]|_inf` that the
//! envelope argument rests on: it is Lipschitz with constant `max |u_t|`,
//! its forward difference agrees with that of `|u + h u_t|_inf`, and the
//! one-sided derivative of `|u + h w|_inf` is bounded by `sgn(u) w` on the
//! set where `|u|` is maximal.
//!
//! Fields are random truncated Fourier series sampled on a fixed grid of
//! [`ORACLE_NODES`] points; the sup norm is the grid maximum.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const ORACLE_NODES: usize = 2049;
pub const DEFAULT_CASES: usize = 200;
/// Step of the forward differences in the Dini oracle.
pub const DINI_STEP: f64 = 1e-5;
pub const DINI_TOLERANCE: f64 = 1e-3;
/// Step of the one-sided difference in the contact-set oracle.
pub const CONTACT_STEP: f64 = 1e-6;
/// Time samples per interval when bounding `max |u_t|`.
const TIME_SAMPLES: usize = 64;

/// `u(t, x) = sum_j A_j sin(k_j pi x + psi_j) cos(omega_j t + chi_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierField {
    pub modes: Vec<FourierMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub phase_x: f64,
    pub omega: f64,
    pub phase_t: f64,
}

impl FourierField {
    /// Random field with `sum |A_j| = 1`, at most 4 spatial and 3 temporal
    /// modes and `omega <= 3`.
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut modes = Vec::new();
        for k in 1..=rng.gen_range(1..=4) {
            for _ in 0..rng.gen_range(1..=3) {
                modes.push(FourierMode {
                    amplitude: rng.gen_range(-1.0..1.0),
                    wavenumber: k as f64,
                    phase_x: rng.gen_range(0.0..TAU),
                    omega: rng.gen_range(0.0..3.0),
                    phase_t: rng.gen_range(0.0..TAU),
                });
            }
        }
        let total: f64 = modes.iter().map(|m| m.amplitude.abs()).sum();
        for m in &mut modes {
            m.amplitude /= total.max(f64::MIN_POSITIVE);
        }
        Self { modes }
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| m.amplitude * (m.wavenumber * PI * x + m.phase_x).sin() * (m.omega * t + m.phase_t).cos())
            .sum()
    }

    pub fn time_derivative(&self, t: f64, x: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                -m.amplitude * m.omega * (m.wavenumber * PI * x + m.phase_x).sin() * (m.omega * t + m.phase_t).sin()
            })
            .sum()
    }

    /// Upper bound on `|u_tt|` everywhere.
    pub fn second_time_derivative_bound(&self) -> f64 {
        self.modes.iter().map(|m| m.amplitude.abs() * m.omega * m.omega).sum()
    }

    pub fn sample(&self, t: f64) -> Vec<f64> {
        nodes().map(|x| self.value(t, x)).collect()
    }

    pub fn sample_time_derivative(&self, t: f64) -> Vec<f64> {
        nodes().map(|x| self.time_derivative(t, x)).collect()
    }
}

fn nodes() -> impl Iterator<Item = f64> {
    (0..ORACLE_NODES).map(|i| i as f64 / (ORACLE_NODES - 1) as f64)
}

pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn axpy(u: &[f64], h: f64, w: &[f64]) -> Vec<f64> {
    u.iter().zip(w).map(|(a, b)| a + h * b).collect()
}

/// `max sgn(u_i) w_i` over `{ i : |u_i| >= |u|_inf - eps }`.
pub fn contact_bound(u: &[f64], w: &[f64], eps: f64) -> f64 {
    let top = sup_norm(u);
    u.iter()
        .zip(w)
        .filter(|(a, _)| a.abs() >= top - eps)
        .map(|(a, b)| a.signum() * b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Forward difference `(|u + h w|_inf - |u|_inf) / h`.
pub fn norm_difference_quotient(u: &[f64], w: &[f64], h: f64) -> f64 {
    (sup_norm(&axpy(u, h, w)) - sup_norm(u)) / h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFailure {
    pub oracle: String,
    pub case: usize,
    pub detail: String,
}

/// Outcome of one oracle over all cases. `worst_margin` is the largest value
/// of `lhs - allowed`; it is `<= 0` when every case passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleStats {
    pub cases: usize,
    pub failures: usize,
    pub worst_margin: f64,
}

impl OracleStats {
    fn new() -> Self {
        Self {
            cases: 0,
            failures: 0,
            worst_margin: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, margin: f64) -> bool {
        self.cases += 1;
        self.worst_margin = self.worst_margin.max(margin);
        let failed = !(margin <= 0.0);
        if failed {
            self.failures += 1;
        }
        failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub lipschitz: OracleStats,
    pub dini: OracleStats,
    pub contact: OracleStats,
    /// Contact cases with `u = 0`, where only `|w|_inf` bounds the quotient.
    pub zero_fields: usize,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `|max|u[t2]| - max|u[t1]|| - |t2 - t1| M` where `M` bounds `|u_t|` on
/// `[t1, t2] x grid` from time samples plus half a sample spacing times `max |u_tt|`.
pub fn lipschitz_margin(field: &FourierField, t1: f64, t2: f64) -> f64 {
    let (lo, hi) = (t1.min(t2), t1.max(t2));
    let spacing = (hi - lo) / (TIME_SAMPLES - 1) as f64;
    let sampled = (0..TIME_SAMPLES)
        .map(|k| sup_norm(&field.sample_time_derivative(lo + spacing * k as f64)))
        .fold(0.0, f64::max);
    let bound = sampled + 0.5 * spacing * field.second_time_derivative_bound();
    let lhs = (sup_norm(&field.sample(t2)) - sup_norm(&field.sample(t1))).abs();
    lhs - (hi - lo) * bound * (1.0 + 1e-12) - 1e-15
}

/// `|D_h - R_h|` with `D_h` the forward difference of `|u[t]|_inf` and `R_h`
/// that of `|u[t] + h u_t[t]|_inf`.
pub fn dini_gap(field: &FourierField, t: f64, h: f64) -> f64 {
    let now = field.sample(t);
    let forward = (sup_norm(&field.sample(t + h)) - sup_norm(&now)) / h;
    let linear = norm_difference_quotient(&now, &field.sample_time_derivative(t), h);
    (forward - linear).abs()
}

/// Runs every oracle on [`DEFAULT_CASES`] random cases.
pub fn lemma_oracles(seed: u64) -> OracleReport {
    lemma_oracles_with(seed, DEFAULT_CASES)
}

pub fn lemma_oracles_with(seed: u64, cases: usize) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        seed,
        lipschitz: OracleStats::new(),
        dini: OracleStats::new(),
        contact: OracleStats::new(),
        zero_fields: 0,
        failures: Vec::new(),
    };
    let fail = |oracle: &str, case: usize, detail: String, failures: &mut Vec<OracleFailure>| {
        failures.push(OracleFailure {
            oracle: oracle.into(),
            case,
            detail,
        })
    };

    for case in 0..cases {
        let field = FourierField::random(&mut rng);
        let (t1, t2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let margin = lipschitz_margin(&field, t1, t2);
        if report.lipschitz.record(margin) {
            fail("lipschitz", case, format!("t1 = {t1}, t2 = {t2}, margin {margin:e}"), &mut report.failures);
        }

        let t = rng.gen_range(0.0..2.0);
        let gap = dini_gap(&field, t, DINI_STEP);
        if report.dini.record(gap - DINI_TOLERANCE) {
            fail("dini", case, format!("t = {t}, gap {gap:e}"), &mut report.failures);
        }

        let u_field = FourierField::random(&mut rng);
        let w = FourierField::random(&mut rng).sample(rng.gen_range(0.0..2.0));
        let u = if rng.gen_bool(0.05) {
            vec![0.0; ORACLE_NODES]
        } else {
            u_field.sample(rng.gen_range(0.0..2.0))
        };
        let quotient = norm_difference_quotient(&u, &w, CONTACT_STEP);
        let w_norm = sup_norm(&w);
        let (allowed, which) = if sup_norm(&u) > 0.0 {
            // Any index within 2 h |w| of the maximum can carry the perturbed maximum.
            (contact_bound(&u, &w, 2.0 * CONTACT_STEP * w_norm), "contact")
        } else {
            report.zero_fields += 1;
            (w_norm, "zero field")
        };
        let margin = quotient - allowed - 1e-9;
        if report.contact.record(margin) {
            fail(
                "contact",
                case,
                format!("{which}: quotient {quotient}, bound {allowed}"),
                &mut report.failures,
            );
        }
    }
    report
}
