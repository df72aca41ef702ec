//! Demand matrices: gravity-model synthesis, temporal perturbation and I/O.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TeError};
use crate::topology::{Capacity, NodeId, Sd, Topology};

/// `|V| x |V|` nonnegative demand matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DemandMatrix {
    pub fn zeros(n: usize) -> Self {
        DemandMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut m = DemandMatrix::zeros(n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(TeError::InvalidDemands(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                check_entry(i, j, v)?;
                m.data[i * n + j] = v;
            }
        }
        Ok(m)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, s: NodeId, d: NodeId) -> f64 {
        self.data[s * self.n + d]
    }

    /// Panics if the entry would break the matrix invariants.
    pub fn set(&mut self, s: NodeId, d: NodeId, value: f64) {
        check_entry(s, d, value).expect("invalid demand entry");
        self.data[s * self.n + d] = value;
    }

    /// Pairs with strictly positive demand, in `(s, d)` order.
    pub fn demanded(&self) -> impl Iterator<Item = (Sd, f64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(idx, v)| ((idx / self.n, idx % self.n), *v))
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Dense CSV, one row per source, no header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for row in self.data.chunks(self.n.max(1)) {
            out.write_record(row.iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| TeError::InvalidDemands(format!("line {line}: {f:?} is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((line, row));
        }
        let n = rows.len();
        let mut m = DemandMatrix::zeros(n);
        for (i, (line, row)) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(TeError::InvalidDemands(format!(
                    "line {line}: {} columns in a {n}-row matrix",
                    row.len()
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                check_entry(i, j, v).map_err(|e| TeError::InvalidDemands(format!("line {line}: {e}")))?;
                m.data[i * n + j] = v;
            }
        }
        Ok(m)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn check_entry(s: NodeId, d: NodeId, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(TeError::InvalidDemands(format!(
            "demand ({s}, {d}) = {v} is not a nonnegative number"
        )));
    }
    if s == d && v != 0.0 {
        return Err(TeError::InvalidDemands(format!(
            "diagonal demand ({s}, {s}) = {v} must be zero"
        )));
    }
    Ok(())
}

impl Serialize for DemandMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            demand: Vec<Vec<f64>>,
        }
        Repr { demand: self.rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DemandMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            demand: Vec<Vec<f64>>,
        }
        let repr = Repr::deserialize(d)?;
        DemandMatrix::from_rows(repr.demand).map_err(serde::de::Error::custom)
    }
}

/// Ordered demand snapshots taken at a fixed interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandSeries {
    pub interval: String,
    pub snapshots: Vec<DemandMatrix>,
}

impl DemandSeries {
    pub fn new(interval: impl Into<String>, snapshots: Vec<DemandMatrix>) -> Result<Self> {
        if let Some(first) = snapshots.first() {
            if snapshots.iter().any(|m| m.node_count() != first.node_count()) {
                return Err(TeError::InvalidDemands("snapshots differ in dimension".into()));
            }
        }
        Ok(DemandSeries {
            interval: interval.into(),
            snapshots,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityOptions {
    /// Mass contributed by an unbounded-capacity edge.
    pub unbounded_weight: f64,
    /// Standard deviation of the log-normal multiplicative noise; `None`
    /// keeps the model deterministic.
    pub noise_sigma: Option<f64>,
}

impl Default for GravityOptions {
    fn default() -> Self {
        GravityOptions {
            unbounded_weight: 1e6,
            noise_sigma: None,
        }
    }
}

/// Gravity-model demands with node mass equal to incident capacity (in + out).
pub fn gravity_demands(topology: &Topology, total_volume: f64, seed: u64) -> Result<DemandMatrix> {
    gravity_demands_with(topology, total_volume, seed, &GravityOptions::default())
}

pub fn gravity_demands_with(
    topology: &Topology,
    total_volume: f64,
    seed: u64,
    options: &GravityOptions,
) -> Result<DemandMatrix> {
    let n = topology.node_count();
    if n < 2 {
        return Err(TeError::InvalidDemands("gravity model needs at least two nodes".into()));
    }
    if !(total_volume.is_finite() && total_volume > 0.0) {
        return Err(TeError::InvalidDemands(format!(
            "total volume must be positive, got {total_volume}"
        )));
    }
    let mut weight = vec![0.0; n];
    for (s, d, cap) in topology.edges() {
        let w = match cap {
            Capacity::Finite(c) => c,
            Capacity::Unbounded => options.unbounded_weight,
        };
        weight[s] += w;
        weight[d] += w;
    }
    let sum: f64 = weight.iter().sum();
    let norm = sum * sum - weight.iter().map(|w| w * w).sum::<f64>();
    if norm <= 0.0 {
        return Err(TeError::DegenerateWeights);
    }

    let mut m = DemandMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m.data[i * n + j] = total_volume * weight[i] * weight[j] / norm;
            }
        }
    }
    if let Some(sigma) = options.noise_sigma.filter(|s| *s > 0.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).map_err(|e| TeError::InvalidConfig(e.to_string()))?;
        for v in m.data.iter_mut().filter(|v| **v > 0.0) {
            *v *= normal.sample(&mut rng).exp();
        }
        let scale = total_volume / m.total();
        m.data.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(m)
}

/// Per-pair variance of the temporal change process: the mean square of
/// consecutive differences.
pub fn change_variances(series: &DemandSeries) -> Result<DemandMatrix> {
    let snaps = &series.snapshots;
    if snaps.len() < 2 {
        return Err(TeError::InvalidDemands(format!(
            "perturbation needs at least two snapshots, got {}",
            snaps.len()
        )));
    }
    let n = snaps[0].node_count();
    let mut var = DemandMatrix::zeros(n);
    let steps = (snaps.len() - 1) as f64;
    for pair in snaps.windows(2) {
        for (v, (a, b)) in var.data.iter_mut().zip(pair[0].data.iter().zip(&pair[1].data)) {
            let delta = b - a;
            *v += delta * delta / steps;
        }
    }
    Ok(var)
}

/// Adds zero-mean normal noise with variance `scale * change variance` to
/// every pair of every snapshot, clamping at zero.
pub fn perturb_series(series: &DemandSeries, scale: f64, seed: u64) -> Result<DemandSeries> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(TeError::InvalidConfig(format!(
            "scale must be nonnegative, got {scale}"
        )));
    }
    let var = change_variances(series)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let snapshots = series
        .snapshots
        .iter()
        .map(|snap| {
            let mut out = snap.clone();
            for (v, base_var) in out.data.iter_mut().zip(&var.data) {
                let variance = scale * base_var;
                if variance > 0.0 {
                    let noise = Normal::new(0.0, variance.sqrt()).expect("positive std dev");
                    *v = (*v + noise.sample(&mut rng)).max(0.0);
                }
            }
            out
        })
        .collect();
    DemandSeries::new(series.interval.clone(), snapshots)
}
