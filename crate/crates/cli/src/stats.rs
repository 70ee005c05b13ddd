//! Run statistics: cumulative work counters, phase timings, and a query
//! latency histogram, rendered as sorted `key=value` lines.
//!
//! Counter keys are deterministic for a fixed (graph, ops, flags, seed);
//! `time_*` and `qlat_*` keys carry wall-clock measurements and are the only
//! keys whose values vary between replays.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use dado_core::oracle::{Oracle, UpdateStats};

/// Disjoint latency buckets: `< 1us, < 2us, ..., < 1024us`, then `>= 1024us`.
const QLAT_BUCKETS: usize = 11;

/// Everything the run loop accumulates outside the oracle itself.
#[derive(Debug, Default)]
pub struct RunStats {
    pub deletes: u64,
    pub queries: u64,

    pub exact_level_rises: u64,
    pub estimate_rises: u64,
    pub landmark_distance_rises: u64,
    pub pair_min_rises: u64,
    pub scale_min_rises: u64,
    pub membership_events: u64,
    pub ball_activations: u64,

    pub time_build: Duration,
    pub time_updates: Duration,
    pub time_queries: Duration,
    pub time_verify: Duration,
    pub time_total: Duration,

    qlat: [u64; QLAT_BUCKETS + 1],
    qlat_total_ns: u128,
    qlat_max_ns: u128,

    pub verify_steps: u64,
    pub verify_checks: u64,
    pub verify_hard_violations: u64,
    pub verify_warnings: u64,
    pub verify_audit_excluded_steps: u64,
}

impl RunStats {
    pub fn record_update(&mut self, s: &UpdateStats) {
        self.deletes += 1;
        self.exact_level_rises += s.exact_level_rises as u64;
        self.estimate_rises += s.estimate_rises as u64;
        self.landmark_distance_rises += s.landmark_distance_rises as u64;
        self.pair_min_rises += s.pair_min_rises as u64;
        self.scale_min_rises += s.scale_min_rises as u64;
        self.membership_events += s.membership_events as u64;
        self.ball_activations += s.ball_activations;
    }

    pub fn record_query_latency(&mut self, d: Duration) {
        self.queries += 1;
        let ns = d.as_nanos();
        self.qlat_total_ns += ns;
        self.qlat_max_ns = self.qlat_max_ns.max(ns);
        let us = ns / 1_000;
        let bucket = (0..QLAT_BUCKETS)
            .find(|k| us < (1u128 << k))
            .unwrap_or(QLAT_BUCKETS);
        self.qlat[bucket] += 1;
    }
}

/// Snapshot of graph shape taken before the oracle consumes the graph.
#[derive(Debug, Clone, Copy)]
pub struct GraphMeta {
    pub n: usize,
    pub m_initial: usize,
}

/// Flattens the whole run into sorted `key=value` lines.
pub fn render(
    o: &Oracle,
    meta: GraphMeta,
    rs: &RunStats,
    verify: bool,
    seed: u64,
    zeta_override: Option<usize>,
) -> String {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        kv.insert(k.to_string(), v);
    };

    let p = o.params();
    put("config_beta", p.beta.to_string());
    put("config_c", format!("{}", o.sets().c()));
    put("config_epsilon", format!("{}", p.epsilon));
    put("config_seed", seed.to_string());
    put("config_verify", verify.to_string());
    put(
        "config_zeta_override",
        zeta_override.map_or_else(|| "none".to_string(), |z| z.to_string()),
    );
    put("config_zeta", p.zeta.to_string());

    put("graph_n", meta.n.to_string());
    put("graph_m_initial", meta.m_initial.to_string());
    put("graph_m_final", o.graph().m().to_string());
    put("graph_version", o.graph().version().to_string());

    put("ops_deletes", rs.deletes.to_string());
    put("ops_queries", rs.queries.to_string());

    put("events_ball_activations", rs.ball_activations.to_string());
    put("events_estimate_rises", rs.estimate_rises.to_string());
    put("events_exact_level_rises", rs.exact_level_rises.to_string());
    put(
        "events_landmark_distance_rises",
        rs.landmark_distance_rises.to_string(),
    );
    put("events_membership", rs.membership_events.to_string());
    put("events_pair_min_rises", rs.pair_min_rises.to_string());
    put("events_scale_min_rises", rs.scale_min_rises.to_string());

    let rc = o.relay_counters();
    put("heap_live_lazy", rc.lazy_entries.to_string());
    put("heap_live_scale", rc.scale_entries.to_string());
    put("heap_live_short", rc.short_entries.to_string());
    put("heap_peak_lazy", rc.lazy_peak_entries.to_string());
    put("heap_peak_scale", rc.scale_peak_entries.to_string());
    put("heap_peak_short", rc.short_peak_entries.to_string());
    put(
        "heap_peak_total",
        (rc.short_peak_entries + rc.lazy_peak_entries + rc.scale_peak_entries).to_string(),
    );
    put(
        "relay_blocked_reinserts",
        rc.blocked_reinserts.to_string(),
    );
    put(
        "relay_landmark_tree_touches",
        rc.landmark_tree_touches.to_string(),
    );
    put("relay_lazy_evictions", rc.lazy_evictions.to_string());
    put("relay_lazy_probes", rc.lazy_probes.to_string());
    put("relay_lazy_refreshes", rc.lazy_refreshes.to_string());
    put("relay_lazy_writes", rc.lazy_writes.to_string());
    put("relay_provider_touches", rc.provider_touches.to_string());
    put("relay_scale_evictions", rc.scale_evictions.to_string());
    put("relay_scale_probes", rc.scale_probes.to_string());
    put("relay_scale_writes", rc.scale_writes.to_string());
    put("relay_short_evictions", rc.short_evictions.to_string());
    put("relay_short_probes", rc.short_probes.to_string());
    put("relay_short_writes", rc.short_writes.to_string());

    let lc = o.light_counters();
    put("light_active_balls", lc.active_balls.to_string());
    put("light_admissions", lc.admissions.to_string());
    put("light_ball_activations", lc.ball_activations.to_string());
    put("light_ball_touches", lc.ball_touches.to_string());
    put("light_edge_touches", lc.edge_touches.to_string());
    put(
        "light_excl_ball_detour",
        lc.ball_detour_exclusions.to_string(),
    );
    put("light_excl_depth_cap", lc.cap_exclusions.to_string());
    put(
        "light_excl_scale_cover",
        lc.scale_cover_exclusions.to_string(),
    );
    put(
        "light_excl_short_relay",
        lc.short_relay_exclusions.to_string(),
    );
    put("light_members", lc.members.to_string());
    put("light_removals", lc.removals.to_string());
    put("light_scans", lc.scans.to_string());
    put("light_tree_count", lc.tree_count.to_string());

    put("pivot_events", o.pivots().applied().to_string());
    put(
        "work_total",
        (o.work() + o.pivots().applied()).to_string(),
    );

    put("time_build_ms", rs.time_build.as_millis().to_string());
    put("time_queries_ms", rs.time_queries.as_millis().to_string());
    put("time_total_ms", rs.time_total.as_millis().to_string());
    put("time_updates_ms", rs.time_updates.as_millis().to_string());
    put("time_verify_ms", rs.time_verify.as_millis().to_string());

    put("qlat_count", rs.queries.to_string());
    put("qlat_max_ns", rs.qlat_max_ns.to_string());
    put("qlat_total_ns", rs.qlat_total_ns.to_string());
    for k in 0..QLAT_BUCKETS {
        put(
            &format!("qlat_us_lt_{:04}", 1u64 << k),
            rs.qlat[k].to_string(),
        );
    }
    put(
        &format!("qlat_us_ge_{:04}", 1u64 << (QLAT_BUCKETS - 1)),
        rs.qlat[QLAT_BUCKETS].to_string(),
    );

    if verify {
        put(
            "verify_audit_excluded_steps",
            rs.verify_audit_excluded_steps.to_string(),
        );
        put("verify_checks", rs.verify_checks.to_string());
        put(
            "verify_hard_violations",
            rs.verify_hard_violations.to_string(),
        );
        put("verify_steps", rs.verify_steps.to_string());
        put("verify_warnings", rs.verify_warnings.to_string());
    }

    let mut out = String::new();
    for (k, v) in kv {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}
