use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_boolean_lattice, hadamard_upper_bound};
use crate::numerics::RngStream;

/// Total code length `nll + (d/2)·log(n/(2πe)) + log V`.
pub fn mdl_score(neg_log_lik: f64, d: usize, n: f64, log_volume: f64) -> f64 {
    neg_log_lik + 0.5 * d as f64 * (n / (2.0 * PI * E)).ln() + log_volume
}

/// One data case: a sample size and the (fixed) fit term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdlCase {
    pub sample_size: f64,
    pub neg_log_lik: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MdlCurveConfig {
    /// Boolean lattice orders `n`, each giving `D = 2^n` atoms.
    pub orders: Vec<u32>,
    pub cases: Vec<MdlCase>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MdlCurveConfig {
    fn default() -> Self {
        Self {
            orders: (1..=8).collect(),
            cases: [1e3, 1e4, 1e5]
                .into_iter()
                .map(|sample_size| MdlCase {
                    sample_size,
                    neg_log_lik: 0.0,
                })
                .collect(),
            samples: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdlPoint {
    pub case: usize,
    pub sample_size: f64,
    pub order: u32,
    /// Number of lattice atoms `D`; the model has `D − 1` free parameters.
    pub atoms: usize,
    pub log_volume: f64,
    pub log_volume_stderr: f64,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MdlCurve {
    /// Case-major, then by increasing order.
    pub points: Vec<MdlPoint>,
}

impl MdlCurve {
    pub fn case(&self, case: usize) -> Vec<MdlPoint> {
        self.points.iter().filter(|p| p.case == case).copied().collect()
    }

    /// Index of the maximum score if it is interior and the scores strictly
    /// decrease from there to the largest lattice.
    pub fn interior_peak(&self, case: usize) -> Option<usize> {
        let s: Vec<f64> = self.case(case).iter().map(|p| p.score).collect();
        let peak = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)?;
        let interior = peak > 0 && peak + 1 < s.len();
        let falls = s[peak..].windows(2).all(|w| w[1] < w[0]);
        (interior && falls).then_some(peak)
    }
}

/// MDL scores over Boolean lattices, with the Hadamard upper bound as the
/// log-volume. The volumes are shared by all cases.
pub fn mdl_lattice_curve(config: &MdlCurveConfig) -> Result<MdlCurve> {
    if config.orders.is_empty() || config.orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("orders must be nonempty and strictly ascending"));
    }
    if config.cases.iter().any(|c| !(c.sample_size >= 1.0)) {
        return Err(Error::precondition("sample sizes must be at least 1"));
    }
    let root = RngStream::new(config.seed);
    let volumes = config
        .orders
        .iter()
        .map(|&k| {
            let lat = build_boolean_lattice(k)?;
            let est = hadamard_upper_bound(&lat, config.samples, &root.child(k as u64))?;
            Ok((k, lat.size(), est))
        })
        .collect::<Result<Vec<_>>>()?;
    let points = config
        .cases
        .iter()
        .enumerate()
        .flat_map(|(i, case)| {
            volumes.iter().map(move |(k, atoms, est)| MdlPoint {
                case: i,
                sample_size: case.sample_size,
                order: *k,
                atoms: *atoms,
                log_volume: est.value,
                log_volume_stderr: est.stderr,
                score: mdl_score(case.neg_log_lik, atoms - 1, case.sample_size, est.value),
            })
        })
        .collect();
    Ok(MdlCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_hand_values() {
        assert!(mdl_score(0.0, 1, 2.0 * PI * E, 0.0).abs() < 1e-15);
        let v = mdl_score(0.0, 4, 100.0, -3.0);
        assert_eq!(mdl_score(2.5, 4, 100.0, -3.0) - v, 2.5);
    }

    #[test]
    fn curve_layout() {
        let cfg = MdlCurveConfig {
            orders: vec![1, 2, 3],
            samples: 200,
            ..Default::default()
        };
        let c = mdl_lattice_curve(&cfg).unwrap();
        assert_eq!(c.points.len(), 9);
        assert_eq!(c.case(2).iter().map(|p| p.atoms).collect::<Vec<_>>(), [2, 4, 8]);
        assert_eq!(c.points[0].log_volume, c.points[3].log_volume);
        assert_eq!(c, mdl_lattice_curve(&cfg).unwrap());
    }

    #[test]
    fn rises_then_falls_on_small_lattices() {
        let cfg = MdlCurveConfig {
            orders: vec![1, 2, 3, 4],
            cases: vec![MdlCase { sample_size: 1e3, neg_log_lik: 50.0 }],
            samples: 1000,
            seed: 1,
        };
        let c = mdl_lattice_curve(&cfg).unwrap();
        assert_eq!(c.interior_peak(0), Some(1));
    }

    #[test]
    fn bad_orders() {
        let cfg = MdlCurveConfig { orders: vec![2, 1], ..Default::default() };
        assert!(mdl_lattice_curve(&cfg).is_err());
    }
}
