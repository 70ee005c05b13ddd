//! Command-line flag parsing. Hand-rolled: the surface is nine flags, and
//! keeping it dependency-free makes the binary trivially auditable.

use std::path::PathBuf;

/// Parsed command line.
#[derive(Debug, Clone)]
pub struct CliArgs {
    pub graph: Option<PathBuf>,
    pub ops: Option<PathBuf>,
    pub epsilon: f64,
    pub c: f64,
    pub seed: u64,
    pub zeta_override: Option<usize>,
    pub verify: bool,
    pub stats: Option<PathBuf>,
    pub bench: bool,
}

impl Default for CliArgs {
    fn default() -> Self {
        CliArgs {
            graph: None,
            ops: None,
            epsilon: 0.5,
            c: 4.0,
            seed: 0,
            zeta_override: None,
            verify: false,
            stats: None,
            bench: false,
        }
    }
}

pub const USAGE: &str = "\
dado - decremental approximate distance oracle

USAGE:
    dado --graph <path> --ops <path> [options]
    dado --bench [--seed <int>] [--stats <path>]

OPTIONS:
    --graph <path>         graph file: first line \"n m\", then one \"u v\" per edge;
                           blank lines and '#' comments are ignored
    --ops <path>           script file: lines \"D u v\" (delete edge) and
                           \"Q u v\" (query distance), executed in order
    --epsilon <real>       accuracy knob in (0, 1); smaller is tighter (default 0.5)
    --c <real>             sampling-rate multiplier (default 4)
    --seed <int>           seed for the sample draw (default 0)
    --zeta-override <int>  override the derived landmark budget parameter
    --verify               re-check every structural invariant after the build and
                           after each deletion; annotate each query line with
                           \" exact=<d> ok=<bool>\"
    --stats <path>         write run statistics (or the bench report under --bench)
                           as sorted key=value lines
    --bench                run the built-in scaling benchmark instead of a script;
                           --graph/--ops are ignored
    --help                 print this help

Each query prints one line \"Q u v <estimate>\"; unreachable prints INF.
Exit codes: 0 success, 1 invariant violation under --verify, 2 bad input or usage.
";

/// Parses flags; any malformed or unknown token is an error (the caller maps
/// errors to exit code 2).
pub fn parse(argv: &[String]) -> Result<CliArgs, String> {
    let mut out = CliArgs::default();
    let mut it = argv.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next()
                .map(String::as_str)
                .ok_or_else(|| format!("{name} expects a value"))
        };
        match flag.as_str() {
            "--graph" => out.graph = Some(PathBuf::from(value("--graph")?)),
            "--ops" => out.ops = Some(PathBuf::from(value("--ops")?)),
            "--epsilon" => {
                let tok = value("--epsilon")?;
                out.epsilon = tok
                    .parse()
                    .map_err(|_| format!("--epsilon: not a real number: {tok:?}"))?;
            }
            "--c" => {
                let tok = value("--c")?;
                out.c = tok
                    .parse()
                    .map_err(|_| format!("--c: not a real number: {tok:?}"))?;
            }
            "--seed" => {
                let tok = value("--seed")?;
                out.seed = tok
                    .parse()
                    .map_err(|_| format!("--seed: not an integer: {tok:?}"))?;
            }
            "--zeta-override" => {
                let tok = value("--zeta-override")?;
                let z: usize = tok
                    .parse()
                    .map_err(|_| format!("--zeta-override: not an integer: {tok:?}"))?;
                out.zeta_override = Some(z);
            }
            "--verify" => out.verify = true,
            "--bench" => out.bench = true,
            "--stats" => out.stats = Some(PathBuf::from(value("--stats")?)),
            other => return Err(format!("unknown flag {other:?} (try --help)")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn defaults_and_overrides() {
        let a = parse(&argv("")).unwrap();
        assert_eq!(a.epsilon, 0.5);
        assert_eq!(a.c, 4.0);
        assert_eq!(a.seed, 0);
        assert!(a.zeta_override.is_none() && !a.verify && !a.bench);

        let a = parse(&argv(
            "--graph g.txt --ops o.txt --epsilon 0.25 --c 1.5 --seed 7 \
             --zeta-override 2 --verify --stats s.txt --bench",
        ))
        .unwrap();
        assert_eq!(a.graph.as_deref().unwrap().to_str(), Some("g.txt"));
        assert_eq!(a.ops.as_deref().unwrap().to_str(), Some("o.txt"));
        assert_eq!((a.epsilon, a.c, a.seed), (0.25, 1.5, 7));
        assert_eq!(a.zeta_override, Some(2));
        assert!(a.verify && a.bench);
        assert_eq!(a.stats.as_deref().unwrap().to_str(), Some("s.txt"));
    }

    #[test]
    fn rejects_bad_tokens() {
        assert!(parse(&argv("--epsilon abc")).is_err());
        assert!(parse(&argv("--seed")).is_err());
        assert!(parse(&argv("--frobnicate")).is_err());
        assert!(parse(&argv("positional")).is_err());
    }
}
