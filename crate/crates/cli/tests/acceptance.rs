//! Acceptance gate for the oracle stack: nine product-level criteria, one
//! test per criterion, each printing a single `criterion N (...): PASS/FAIL`
//! line with measured numbers (run with `-- --nocapture` to see the lines
//! for passing tests).
//!
//! Criteria 1-2 share one exact-tree fleet; criteria 3-7 share one oracle
//! fleet (fixture graphs plus twenty random teardowns at two accuracy
//! settings). Fleets run once behind a `OnceLock` and every criterion reads
//! its own tallies, so the evidence for each verdict comes from the same
//! runs the other criteria saw.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dado_cli::bench::bench_suite;
use dado_core::dist::{Dist, INF};
use dado_core::estree::EsTree;
use dado_core::fault::{inject, ALL_FAULTS};
use dado_core::generators::{c8, gnp, p4, path, shuffled_edges, star_k15, two_block};
use dado_core::graph::DynamicGraph;
use dado_core::oracle::{Oracle, OracleConfig};
use dado_core::sampling::{audit, SampleSets};
use dado_core::verify::{bfs_distances, check_all, ExactSnapshot};

fn gate(num: u32, label: &str, pass: bool, details: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {num} ({label}): {verdict} - {details}");
    assert!(pass, "criterion {num} ({label}) failed: {details}");
}

#[derive(Debug, Default)]
struct Tally {
    checked: u64,
    violations: u64,
    samples: Vec<String>,
}

impl Tally {
    fn hit(&mut self) {
        self.checked += 1;
    }
    fn flag(&mut self, line: String) {
        self.violations += 1;
        if self.samples.len() < 6 {
            self.samples.push(line);
        }
    }
    fn describe(&self, what: &str) -> String {
        if self.violations == 0 {
            format!("{} {what} checked, 0 violations", self.checked)
        } else {
            format!(
                "{} {what} checked, {} violations, e.g. {:?}",
                self.checked, self.violations, self.samples
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Criteria 1-2: exact bounded-depth trees on fifty random teardowns.
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
struct TreeFleet {
    graphs: usize,
    deletions: u64,
    levels: Tally,
    node_scans: Tally,
    total_scans: Tally,
    elapsed: Duration,
}

fn tree_fleet() -> &'static TreeFleet {
    static FLEET: OnceLock<TreeFleet> = OnceLock::new();
    FLEET.get_or_init(run_tree_fleet)
}

fn run_tree_fleet() -> TreeFleet {
    let t0 = Instant::now();
    let mut out = TreeFleet::default();
    let n = 64;
    let sources = [0usize, 21, 42];
    let depths: [Dist; 2] = [4, 63];

    for seed in 0..50u64 {
        let p = [0.05, 0.15, 0.4][(seed % 3) as usize];
        let mut g = gnp(n, p, seed);
        let order = shuffled_edges(&g, seed ^ 0xE5);
        let mut trees: Vec<EsTree> = sources
            .iter()
            .flat_map(|&s| depths.iter().map(move |&d| (s, d)))
            .map(|(s, d)| EsTree::build(&g, s, d))
            .collect();
        out.graphs += 1;

        for (u, v) in order {
            g.delete_edge(u, v).expect("teardown deletes live edges");
            out.deletions += 1;
            for t in trees.iter_mut() {
                t.on_delete(&g, u, v);
            }
            for (si, &s) in sources.iter().enumerate() {
                let bfs = bfs_distances(&g, s);
                for (di, &d) in depths.iter().enumerate() {
                    let t = &trees[si * depths.len() + di];
                    for w in 0..n {
                        let expected = if bfs[w] <= d { bfs[w] } else { INF };
                        out.levels.hit();
                        if t.level(w) != expected {
                            out.levels.flag(format!(
                                "seed {seed} source {s} depth {d} node {w}: level {} expected {}",
                                t.level(w),
                                expected
                            ));
                        }
                    }
                }
            }
            for t in &trees {
                let d = t.depth_bound();
                for w in 0..n {
                    out.node_scans.hit();
                    if (t.scan_counters()[w] as usize) > d {
                        out.node_scans.flag(format!(
                            "seed {seed} source {} depth {d} node {w}: {} scans",
                            t.source(),
                            t.scan_counters()[w]
                        ));
                    }
                }
                out.total_scans.hit();
                if t.total_scans() > (t.m_initial() * d) as u64 {
                    out.total_scans.flag(format!(
                        "seed {seed} source {} depth {d}: {} total scans > m*d = {}",
                        t.source(),
                        t.total_scans(),
                        t.m_initial() * d
                    ));
                }
            }
        }
    }
    out.elapsed = t0.elapsed();
    out
}

#[test]
fn criterion_1_tree_levels_match_bfs_after_every_deletion() {
    let f = tree_fleet();
    let within_budget = f.elapsed < Duration::from_secs(60);
    gate(
        1,
        "bounded-depth tree exactness",
        f.levels.violations == 0 && within_budget,
        format!(
            "{} graphs, {} deletions, {}; elapsed {:.1?} (budget 60s)",
            f.graphs,
            f.deletions,
            f.levels.describe("levels"),
            f.elapsed
        ),
    );
}

#[test]
fn criterion_2_tree_scan_work_stays_within_depth_budget() {
    let f = tree_fleet();
    gate(
        2,
        "tree scan-work bound",
        f.node_scans.violations == 0 && f.total_scans.violations == 0,
        format!(
            "per-node: {}; per-tree totals: {}",
            f.node_scans.describe("counters"),
            f.total_scans.describe("trees")
        ),
    );
}

// ---------------------------------------------------------------------------
// Criteria 3-7: oracle fleet (fixtures + twenty random teardowns).
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
struct OracleFleet {
    runs: usize,
    deletions: u64,
    audit_excluded: u64,
    in_tree: Tally,       // criterion 3
    uncovered: Tally,     // criterion 4
    query_sound: Tally,   // criterion 5, hard side
    query_stretch: Tally, // criterion 5, audit-gated side
    relay_sound: Tally,   // criterion 6, hard side
    relay_stretch: Tally, // criterion 6, audit-gated side
    lazy: Tally,          // criterion 7
    elapsed: Duration,
}

fn oracle_fleet() -> &'static OracleFleet {
    static FLEET: OnceLock<OracleFleet> = OnceLock::new();
    FLEET.get_or_init(run_oracle_fleet)
}

fn run_oracle_fleet() -> OracleFleet {
    let t0 = Instant::now();
    let mut out = OracleFleet::default();

    // Fixture graphs at both accuracy settings.
    let fixtures: [(fn() -> DynamicGraph, &str); 4] = [
        (p4, "p4"),
        (c8, "c8"),
        (star_k15, "star"),
        (two_block, "two-block"),
    ];
    let mut run_idx = 0u64;
    for &(make, name) in &fixtures {
        for &eps in &[0.25, 0.5] {
            fleet_run(&mut out, name, make(), eps, 1.5, run_idx);
            run_idx += 1;
        }
    }
    // Twenty random teardowns, accuracy alternating.
    for k in 0..20u64 {
        let n = [24, 32, 48, 64, 80, 96][(k % 6) as usize];
        let p = [0.08, 0.15, 0.25][(k % 3) as usize];
        let eps = if k % 2 == 0 { 0.5 } else { 0.25 };
        fleet_run(
            &mut out,
            &format!("gnp{n}"),
            gnp(n, p, 500 + k),
            eps,
            1.5,
            run_idx,
        );
        run_idx += 1;
    }
    out.elapsed = t0.elapsed();
    out
}

fn fleet_run(out: &mut OracleFleet, name: &str, g: DynamicGraph, eps: f64, c: f64, idx: u64) {
    let n = g.n();
    let order = shuffled_edges(&g, 0xACC0 + idx);
    let cfg = OracleConfig {
        epsilon: eps,
        c,
        seed: 1000 + idx,
        zeta_override: None,
    };
    let mut o = Oracle::build(g, &cfg).expect("fleet config is valid");
    let ope = o.params().one_plus_eps();
    let sq2 = ope * ope;
    let sq5 = ope.powi(5);
    let mut rng = ChaCha8Rng::seed_from_u64(3000 + idx);
    let deletions = order.len().max(1);
    let relay_quota = 1000usize.div_ceil(deletions);
    out.runs += 1;

    for (u, v) in order {
        o.delete(u, v).expect("teardown deletes live edges");
        out.deletions += 1;
        let snap = ExactSnapshot::take(o.graph());
        let audit_ok = audit(o.sets(), o.graph(), &snap, o.params().beta).passes();
        if !audit_ok {
            out.audit_excluded += 1;
        }

        // Criterion 3: every tree member's level is its exact distance.
        for i in 1..=o.sets().i_max() {
            for &s in o.sets().s_level(i) {
                let tree = o.forest().tree(i, s).expect("one tree per source");
                for (w, lvl) in tree.members() {
                    out.in_tree.hit();
                    if lvl != snap.dist(s, w) {
                        out.in_tree.flag(format!(
                            "{name}: scale {i} source {s} node {w}: level {lvl} exact {}",
                            snap.dist(s, w)
                        ));
                    }
                }
            }
        }

        // Criterion 4: nodes outside a tree but within its reach keep a
        // relayed bound (audit-gated; integer left side, real right side).
        if audit_ok {
            for i in 1..=o.sets().i_max() {
                let reach = 1usize << i;
                for &s in o.sets().s_level(i) {
                    let tree = o.forest().tree(i, s).expect("one tree per source");
                    for x in 0..n {
                        if tree.level(x) < INF {
                            continue;
                        }
                        let d = snap.dist(x, s);
                        if d > reach {
                            continue;
                        }
                        let best = o.relay().scale_min(x, s, i).min(o.relay().short_min(x, s));
                        out.uncovered.hit();
                        if (best as f64) > sq2 * ((d + 2) as f64) + 1e-9 {
                            out.uncovered.flag(format!(
                                "{name}: scale {i} source {s} node {x}: best {best} > (1+e)^2*({d}+2)"
                            ));
                        }
                    }
                }
            }
        }

        // Criterion 5: query sandwich on sampled pairs.
        let pairs: Vec<(usize, usize)> = if n <= 32 {
            (0..n).flat_map(|x| (x..n).map(move |y| (x, y))).collect()
        } else {
            (0..200)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect()
        };
        for (x, y) in pairs {
            let est = o.query(x, y).estimate;
            let exact = snap.dist(x, y);
            out.query_sound.hit();
            if est < exact {
                out.query_sound.flag(format!(
                    "{name}: query {x} {y}: estimate {est} below exact {exact}"
                ));
            }
            if audit_ok && exact < INF {
                out.query_stretch.hit();
                if (est as f64) > sq5 * ((exact + 2) as f64) + 1e-9 {
                    out.query_stretch.flag(format!(
                        "{name}: query {x} {y}: estimate {est} > (1+e)^5*({exact}+2)"
                    ));
                }
            }
        }

        // Criterion 6: landmark-relay estimates against heavy-path detours.
        for _ in 0..relay_quota {
            let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let tilde = o.relay().relay_estimate(x, y);
            let exact = snap.dist(x, y);
            out.relay_sound.hit();
            if tilde < exact {
                out.relay_sound.flag(format!(
                    "{name}: relay {x} {y}: {tilde} below exact {exact}"
                ));
            }
            let heavy = snap.heavy_dist(x, y);
            if audit_ok && heavy < INF {
                out.relay_stretch.hit();
                if (tilde as f64) > sq2 * ((heavy + 2) as f64) + 1e-9 {
                    out.relay_stretch.flag(format!(
                        "{name}: relay {x} {y}: {tilde} > (1+e)^2*({heavy}+2)"
                    ));
                }
            }
        }

        // Criterion 7: lazy entries refresh before drifting a full (1+e)
        // factor, and scale-heap key sets never regrow.
        let slots = o.sets().q_list().len();
        for x in 0..n {
            for slot in 0..slots {
                let est = o.relay().estimate(slot, x);
                let last = o.relay().last_refreshed_estimate(x, slot);
                out.lazy.hit();
                let fresh = est == last;
                let within = (est as f64) < ope * (last as f64);
                if !(fresh || within) {
                    out.lazy.flag(format!(
                        "{name}: landmark slot {slot} node {x}: estimate {est} vs last refresh {last}"
                    ));
                }
            }
        }
        out.lazy.hit();
        if o.relay_counters().blocked_reinserts != 0 {
            out.lazy.flag(format!(
                "{name}: {} scale-heap reinsert(s) attempted",
                o.relay_counters().blocked_reinserts
            ));
        }
    }
}

#[test]
fn criterion_3_tree_members_hold_exact_distances() {
    let f = oracle_fleet();
    gate(
        3,
        "in-tree exactness",
        f.in_tree.violations == 0,
        format!(
            "{} runs, {} deletions, {}",
            f.runs,
            f.deletions,
            f.in_tree.describe("members")
        ),
    );
}

#[test]
fn criterion_4_uncovered_nodes_keep_relayed_bounds() {
    let f = oracle_fleet();
    let excluded_pct = 100.0 * f.audit_excluded as f64 / f.deletions.max(1) as f64;
    gate(
        4,
        "out-of-tree relay bound",
        f.uncovered.violations == 0 && excluded_pct <= 1.0,
        format!(
            "{}; {:.2}% of {} deletions audit-excluded (budget 1%)",
            f.uncovered.describe("node-source pairs"),
            excluded_pct,
            f.deletions
        ),
    );
}

#[test]
fn criterion_5_query_sandwich_sound_and_tight() {
    let f = oracle_fleet();
    gate(
        5,
        "query sandwich",
        f.query_sound.violations == 0 && f.query_stretch.violations == 0,
        format!(
            "soundness: {}; stretch: {}",
            f.query_sound.describe("queries"),
            f.query_stretch.describe("queries")
        ),
    );
}

#[test]
fn criterion_6_relay_estimates_bounded_by_heavy_detours() {
    let f = oracle_fleet();
    gate(
        6,
        "relay sandwich",
        f.relay_sound.violations == 0 && f.relay_stretch.violations == 0,
        format!(
            "soundness: {}; heavy-detour bound: {}",
            f.relay_sound.describe("pairs"),
            f.relay_stretch.describe("pairs")
        ),
    );
}

#[test]
fn criterion_7_lazy_refresh_discipline_holds() {
    let f = oracle_fleet();
    gate(
        7,
        "lazy refresh discipline",
        f.lazy.violations == 0,
        f.lazy.describe("entries"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: every single-field corruption is flagged.
// ---------------------------------------------------------------------------

fn mid_run_rig() -> Oracle {
    let g = gnp(26, 0.22, 19);
    let order = shuffled_edges(&g, 31);
    let cfg = OracleConfig {
        epsilon: 0.5,
        c: 0.75,
        seed: 4,
        zeta_override: Some(1),
    };
    let mut o = Oracle::build(g, &cfg).expect("rig config is valid");
    for &(u, v) in order.iter().take(20) {
        o.delete(u, v).expect("teardown deletes live edges");
    }
    o
}

fn deep_tree_rig() -> Oracle {
    let sets = SampleSets::from_parts(
        40,
        0.9,
        vec![39],
        vec![vec![], vec![], vec![], vec![], vec![0]],
    );
    let mut o = Oracle::with_sets(path(40), sets, Some(1)).expect("rig config is valid");
    o.delete(10, 11).expect("edge exists");
    o
}

#[test]
fn criterion_8_single_field_corruptions_are_flagged() {
    let rigs: [fn() -> Oracle; 2] = [mid_run_rig, deep_tree_rig];
    let mut detected = 0;
    let mut lines = Vec::new();
    for &fault in ALL_FAULTS.iter() {
        let outcome = rigs.iter().find_map(|mk| {
            let mut o = mk();
            let what = inject(&mut o, fault)?;
            let snap = ExactSnapshot::take(o.graph());
            let report = check_all(&o, &snap).expect("fresh snapshot");
            Some((what, !report.passes()))
        });
        match outcome {
            Some((_, true)) => detected += 1,
            Some((what, false)) => lines.push(format!("{fault:?} ({what}) went unnoticed")),
            None => lines.push(format!("{fault:?} had no target in either rig")),
        }
    }
    gate(
        8,
        "corruption detection",
        detected == ALL_FAULTS.len(),
        if lines.is_empty() {
            format!("{detected}/{} corruptions flagged", ALL_FAULTS.len())
        } else {
            format!(
                "{detected}/{} corruptions flagged; {:?}",
                ALL_FAULTS.len(),
                lines
            )
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: scaling benchmark against the recompute baseline.
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_update_work_scales_below_recompute_baseline() {
    let t0 = Instant::now();
    let report = bench_suite(&[64, 128, 256], &[0.3], 0);
    let elapsed = t0.elapsed();
    let cell = report.cell(256, 300).expect("largest cell present");
    let ratio = cell.ratio_apsp();
    let exponent = report
        .exponents
        .first()
        .map(|&(_, e)| e)
        .unwrap_or(f64::NAN);
    let within_budget = elapsed < Duration::from_secs(600);
    gate(
        9,
        "update work scaling",
        ratio >= 3.0 && within_budget,
        format!(
            "n=256 p=0.3: oracle work {} vs per-deletion all-pairs recompute {} ({ratio:.1}x headroom, \
             target 3x); fitted work exponent {exponent:.2}; elapsed {elapsed:.1?} (budget 600s)",
            cell.work_oracle, cell.work_baseline_apsp
        ),
    );
}
