//! Script execution: load graph and ops, drive the oracle, print query
//! lines, optionally re-verify every structural invariant per step, and
//! write statistics.

use std::fs;
use std::io::Write as _;
use std::time::Instant;

use dado_core::dist::dist_str;
use dado_core::graph::parse_graph;
use dado_core::oracle::{parse_ops, Op, Oracle, OracleConfig};
use dado_core::verify::{check_all, ExactSnapshot};

use crate::args::{self, CliArgs, USAGE};
use crate::bench;
use crate::stats::{self, GraphMeta, RunStats};

/// Entry point shared by the binary and the tests: parses `argv` (program
/// name already stripped), runs, and returns the process exit code.
pub fn main_entry(argv: &[String]) -> i32 {
    if argv.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return 0;
    }
    let args = match args::parse(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    if args.bench {
        return run_bench(&args);
    }
    match run_script(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn run_bench(args: &CliArgs) -> i32 {
    let report = bench::bench_suite(&bench::DEFAULT_SIZES, &bench::DEFAULT_DENSITIES, args.seed);
    let text = report.render();
    match &args.stats {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    0
}

/// Per-step verification state: the latest exact snapshot plus whether the
/// sampling audit passed at that version.
struct VerifyState {
    snap: ExactSnapshot,
    audit_passed: bool,
}

fn run_script(args: &CliArgs) -> Result<i32, String> {
    let t_start = Instant::now();

    let graph_path = args.graph.as_ref().ok_or("missing --graph (try --help)")?;
    let ops_path = args.ops.as_ref().ok_or("missing --ops (try --help)")?;

    let graph_text = fs::read_to_string(graph_path)
        .map_err(|e| format!("cannot read {}: {e}", graph_path.display()))?;
    let g = parse_graph(&graph_text).map_err(|e| format!("{}: {e}", graph_path.display()))?;
    let ops_text = fs::read_to_string(ops_path)
        .map_err(|e| format!("cannot read {}: {e}", ops_path.display()))?;
    let ops = parse_ops(&ops_text).map_err(|e| format!("{}: {e}", ops_path.display()))?;

    let meta = GraphMeta {
        n: g.n(),
        m_initial: g.m(),
    };
    for (idx, op) in ops.iter().enumerate() {
        let (Op::Delete(u, v) | Op::Query(u, v)) = *op;
        if u >= meta.n || v >= meta.n {
            return Err(format!(
                "{}: op {} references node {} but the graph has {} nodes",
                ops_path.display(),
                idx + 1,
                u.max(v),
                meta.n
            ));
        }
    }

    let cfg = OracleConfig {
        epsilon: args.epsilon,
        c: args.c,
        seed: args.seed,
        zeta_override: args.zeta_override,
    };

    let t_build = Instant::now();
    let mut o = Oracle::build(g, &cfg).map_err(|e| format!("build failed: {e}"))?;
    let mut rs = RunStats::default();
    rs.time_build = t_build.elapsed();

    let stretch_cap = o.params().one_plus_eps().powi(5);
    let mut ver: Option<VerifyState> = None;
    if args.verify {
        ver = Some(verify_step(&o, &mut rs));
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    for op in &ops {
        match *op {
            Op::Delete(u, v) => {
                let t0 = Instant::now();
                let upd = o
                    .delete(u, v)
                    .map_err(|e| format!("delete {u} {v}: {e}"))?;
                rs.time_updates += t0.elapsed();
                rs.record_update(&upd);
                if args.verify {
                    ver = Some(verify_step(&o, &mut rs));
                }
            }
            Op::Query(u, v) => {
                let t0 = Instant::now();
                let ans = o.query(u, v);
                let lat = t0.elapsed();
                rs.time_queries += lat;
                rs.record_query_latency(lat);

                let mut line = format!("Q {u} {v} {}", dist_str(ans.estimate));
                if let Some(vs) = &ver {
                    let exact = vs.snap.dist(u, v);
                    let sound = ans.estimate >= exact;
                    let within = exact >= dado_core::dist::INF
                        || !vs.audit_passed
                        || (ans.estimate as f64) <= stretch_cap * (exact + 2) as f64 + 1e-9;
                    let ok = sound && within;
                    if !ok {
                        rs.verify_hard_violations += 1;
                        eprintln!(
                            "verify: version {}: query {u} {v} estimate {} exact {} out of bounds",
                            o.graph().version(),
                            dist_str(ans.estimate),
                            dist_str(exact),
                        );
                    }
                    line.push_str(&format!(" exact={} ok={}", dist_str(exact), ok));
                }
                writeln!(out, "{line}").map_err(|e| format!("stdout: {e}"))?;
            }
        }
    }
    drop(out);

    rs.time_total = t_start.elapsed();
    if let Some(path) = &args.stats {
        let text = stats::render(&o, meta, &rs, args.verify, args.seed, args.zeta_override);
        fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }

    if args.verify && rs.verify_hard_violations > 0 {
        eprintln!(
            "verify: {} hard violation(s); see lines above",
            rs.verify_hard_violations
        );
        return Ok(1);
    }
    Ok(0)
}

/// Takes a fresh snapshot, runs the full invariant suite against it, logs
/// hard violations and warnings to stderr, and returns the snapshot for
/// query-line annotation.
fn verify_step(o: &Oracle, rs: &mut RunStats) -> VerifyState {
    let t0 = Instant::now();
    let snap = ExactSnapshot::take(o.graph());
    let report = check_all(o, &snap).expect("snapshot taken at the current version");
    rs.verify_steps += 1;
    rs.verify_checks += report.checks();
    rs.verify_hard_violations += report.violations().len() as u64;
    rs.verify_warnings += report.warnings().len() as u64;
    if !report.audit_passed() {
        rs.verify_audit_excluded_steps += 1;
    }
    for line in report.violations() {
        eprintln!("verify: version {}: {line}", report.version());
    }
    for line in report.warnings() {
        eprintln!("verify-warning: version {}: {line}", report.version());
    }
    rs.time_verify += t0.elapsed();
    VerifyState {
        snap,
        audit_passed: report.audit_passed(),
    }
}
