//! Scaling benchmark: tear random graphs down to empty, record the oracle's
//! total update work, and compare against recompute-from-scratch baselines.
//!
//! Work is counted in structure touches (edge scans, heap probes/writes,
//! event applications), the same unit the oracle's own counters use. The
//! baselines count the touches a recompute strategy would spend: a single
//! BFS visits `n` nodes and `2m` arc endpoints, so recomputing all-pairs
//! distances after a deletion costs `n * (n + 2m)` and answering one query
//! by a fresh BFS costs `n + 2m`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dado_core::generators::{gnp, shuffled_edges};
use dado_core::oracle::{Oracle, OracleConfig};

pub const DEFAULT_SIZES: [usize; 3] = [64, 128, 256];
pub const DEFAULT_DENSITIES: [f64; 1] = [0.3];

/// Benchmark oracle tuning. `c` stays at 1 so the landmark sample keeps a
/// sub-saturated size at these node counts and the measured scaling reflects
/// the sparse-landmark regime rather than an all-pairs degenerate one.
pub const BENCH_EPSILON: f64 = 0.5;
pub const BENCH_C: f64 = 1.0;

#[derive(Debug, Clone, Copy)]
pub struct BenchCell {
    pub n: usize,
    /// Density as permille (0.3 -> 300); integral so report keys are stable.
    pub permille: u32,
    pub m_initial: usize,
    pub deletions: u64,
    pub work_oracle: u64,
    pub work_baseline_apsp: u64,
    pub work_baseline_query_bfs: u64,
}

impl BenchCell {
    /// How many times cheaper the oracle was than recomputing all-pairs
    /// distances after every deletion.
    pub fn ratio_apsp(&self) -> f64 {
        self.work_baseline_apsp as f64 / self.work_oracle.max(1) as f64
    }
}

#[derive(Debug)]
pub struct BenchReport {
    pub seed: u64,
    pub epsilon: f64,
    pub c: f64,
    pub cells: Vec<BenchCell>,
    /// Fitted slope of ln(total work) against ln(n) per density.
    pub exponents: Vec<(u32, f64)>,
}

impl BenchReport {
    pub fn cell(&self, n: usize, permille: u32) -> Option<&BenchCell> {
        self.cells
            .iter()
            .find(|c| c.n == n && c.permille == permille)
    }

    /// Sorted `key=value` lines; fully deterministic for a fixed seed.
    pub fn render(&self) -> String {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        kv.insert("bench_c".into(), format!("{}", self.c));
        kv.insert("bench_epsilon".into(), format!("{}", self.epsilon));
        kv.insert("bench_seed".into(), self.seed.to_string());
        for cell in &self.cells {
            let p = format!("bench_n{:04}_p{:03}", cell.n, cell.permille);
            kv.insert(format!("{p}_m_initial"), cell.m_initial.to_string());
            kv.insert(format!("{p}_deletions"), cell.deletions.to_string());
            kv.insert(format!("{p}_work_oracle"), cell.work_oracle.to_string());
            kv.insert(
                format!("{p}_work_baseline_apsp"),
                cell.work_baseline_apsp.to_string(),
            );
            kv.insert(
                format!("{p}_work_baseline_query_bfs"),
                cell.work_baseline_query_bfs.to_string(),
            );
            kv.insert(format!("{p}_ratio_apsp"), format!("{:.3}", cell.ratio_apsp()));
        }
        for &(permille, slope) in &self.exponents {
            kv.insert(
                format!("bench_p{permille:03}_exponent"),
                format!("{slope:.3}"),
            );
        }
        let mut out = String::new();
        for (k, v) in kv {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Runs one full-teardown cell per (size, density) pair.
pub fn bench_suite(sizes: &[usize], densities: &[f64], seed: u64) -> BenchReport {
    let mut cells = Vec::new();
    for &p in densities {
        let permille = (p * 1000.0).round() as u32;
        for &n in sizes {
            cells.push(run_cell(n, p, permille, seed));
        }
    }
    let mut exponents = Vec::new();
    for &p in densities {
        let permille = (p * 1000.0).round() as u32;
        let pts: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.permille == permille)
            .map(|c| ((c.n as f64).ln(), (c.work_oracle.max(1) as f64).ln()))
            .collect();
        if pts.len() >= 2 {
            exponents.push((permille, least_squares_slope(&pts)));
        }
    }
    BenchReport {
        seed,
        epsilon: BENCH_EPSILON,
        c: BENCH_C,
        cells,
        exponents,
    }
}

fn run_cell(n: usize, p: f64, permille: u32, seed: u64) -> BenchCell {
    let cell_seed = seed ^ ((n as u64) << 32) ^ (permille as u64);
    let g = gnp(n, p, cell_seed);
    let m0 = g.m();
    let order = shuffled_edges(&g, cell_seed.wrapping_add(1));
    let cfg = OracleConfig {
        epsilon: BENCH_EPSILON,
        c: BENCH_C,
        seed: cell_seed.wrapping_add(2),
        zeta_override: None,
    };
    let mut o = Oracle::build(g, &cfg).expect("benchmark tuning is valid");
    for (u, v) in order {
        o.delete(u, v).expect("each initial edge is deleted once");
    }

    // After deletion t the graph has m0 - t edges; summing n + 2*(m0 - t)
    // over t = 1..=m0 gives m0*(n + m0 - 1) touches for one BFS per deletion
    // and n times that for a full all-pairs recompute per deletion.
    let m = m0 as u128;
    let query_bfs = m * (n as u128 + m - 1);
    let apsp = query_bfs * n as u128;

    BenchCell {
        n,
        permille,
        m_initial: m0,
        deletions: m0 as u64,
        work_oracle: o.work() + o.pivots().applied(),
        work_baseline_apsp: u64::try_from(apsp).unwrap_or(u64::MAX),
        work_baseline_query_bfs: u64::try_from(query_bfs).unwrap_or(u64::MAX),
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}
