//! Command-line surface for the coverfam toolkit: formula evaluation,
//! construction builders, covering-number reports, exact search with
//! checkpoint/resume, parameter sweeps, and the verification suite.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or parameter error,
//! 3 search budget exhausted.

use clap::{Args, Parser, Subcommand};
use coverfam::checkpoint::{parse_checkpoint, serialize_checkpoint};
use coverfam::document::{parse_family, serialize_family};
use coverfam::family::{covering_number_unchecked, iterated_tau, min_covers};
use coverfam::formulas::{
    construction1_size, construction2_size, construction3_size, large_n_threshold,
    max_construction_size, meets_threshold, Label,
};
use coverfam::search::{exact_max_resumable, sweep, Budget, SearchStatus};
use coverfam::verifier::{default_grid, run_suite, tally, SuiteConfig, CHECK_NAMES};
use coverfam::{Error, Params};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "coverfam", version, about = "Exact combinatorics of t-intersecting families and their covering numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Ground-set size
    #[arg(long)]
    n: u64,
    /// Member size
    #[arg(long)]
    k: u32,
    /// Intersection threshold
    #[arg(long)]
    t: u32,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, Error> {
        Params::new(self.n, self.k, self.t)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the three extremal size formulas and the large-n threshold
    Formulas {
        #[command(flatten)]
        params: ParamArgs,
        /// Also evaluate every ground-set size up to this one, one line each
        #[arg(long)]
        n_to: Option<u64>,
        /// Machine-readable JSON output
        #[arg(long)]
        json: bool,
    },
    /// Build one of the three candidate extremal families
    Construct {
        /// Which construction: c1, c2, or c3
        #[arg(long)]
        variant: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the family document here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Covering-number metrics of a family document
    Tau {
        /// Family document to read
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Covering-number metrics plus the full minimum-cover list
    Covers {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Exact maximum size of a t-intersecting family with covering number >= s
    Search {
        #[command(flatten)]
        params: ParamArgs,
        /// Covering-number floor
        #[arg(long)]
        s: u32,
        /// Abort after this many search nodes
        #[arg(long)]
        node_budget: Option<u64>,
        /// Abort after this many milliseconds
        #[arg(long)]
        time_budget_ms: Option<u64>,
        /// Write the witness family document here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a resumable checkpoint here when the budget runs out
        #[arg(long)]
        checkpoint_out: Option<PathBuf>,
        /// Resume from a checkpoint written by an earlier run
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run exact search over a range of ground-set sizes
    Sweep {
        /// Smallest ground-set size
        #[arg(long)]
        n_from: u64,
        /// Largest ground-set size
        #[arg(long)]
        n_to: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        node_budget: Option<u64>,
        #[arg(long)]
        time_budget_ms: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Run the verification suite
    Verify {
        /// Which parameter grid: default or quick
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long, default_value_t = 20260809)]
        seed: u64,
        /// Number of seeded random maximal families
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Number of random cross-intersecting tuples
        #[arg(long, default_value_t = 100)]
        cross_samples: usize,
        /// Worker threads for the suite
        #[arg(long)]
        threads: Option<usize>,
        /// List the check names and exit
        #[arg(long)]
        list_checks: bool,
        /// Self-test: corrupt one construction so the suite must fail
        #[arg(long)]
        inject_fault: bool,
        #[arg(long)]
        json: bool,
    },
}

fn fail_usage(err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(EXIT_USAGE)
}

fn label_from_str(s: &str) -> Option<Label> {
    match s {
        "c1" => Some(Label::C1),
        "c2" => Some(Label::C2),
        "c3" => Some(Label::C3),
        _ => None,
    }
}

/// The formulas command prints labels in formula notation.
fn formula_names(labels: &[Label]) -> String {
    let names: Vec<&str> = labels
        .iter()
        .map(|l| match l {
            Label::C1 => "f1",
            Label::C2 => "f2",
            Label::C3 => "f3",
        })
        .collect();
    names.join(",")
}

fn cmd_formulas(params: &ParamArgs, n_to: Option<u64>, json: bool) -> ExitCode {
    let last = n_to.unwrap_or(params.n);
    if last < params.n {
        return fail_usage("--n-to must not be below --n");
    }
    for n in params.n..=last {
        let p = match Params::new(n, params.k, params.t) {
            Ok(p) => p,
            Err(e) => return fail_usage(e),
        };
        let line = (|| -> Result<String, Error> {
            let f1 = construction1_size(&p)?;
            let f2 = construction2_size(&p)?;
            let f3 = construction3_size(&p)?;
            let (_, labels) = max_construction_size(&p)?;
            let threshold = large_n_threshold(p.k, p.t)?;
            let in_range = meets_threshold(n, p.k, p.t)?;
            Ok(if json {
                json!({
                    "n": n, "k": p.k, "t": p.t,
                    "f1": f1.to_string(), "f2": f2.to_string(), "f3": f3.to_string(),
                    "max": formula_names(&labels),
                    "threshold": threshold.to_string(),
                    "in_range": in_range,
                })
                .to_string()
            } else if n_to.is_some() {
                format!(
                    "n={} f1={} f2={} f3={} max={} threshold={} in_range={}",
                    n, f1, f2, f3, formula_names(&labels), threshold, in_range
                )
            } else {
                format!(
                    "f1={} f2={} f3={} max={} threshold={} in_range={}",
                    f1, f2, f3, formula_names(&labels), threshold, in_range
                )
            })
        })();
        match line {
            Ok(line) => println!("{line}"),
            Err(e) => return fail_usage(e),
        }
    }
    ExitCode::from(EXIT_OK)
}

fn cmd_construct(variant: &str, params: &ParamArgs, out: Option<&PathBuf>, json: bool) -> ExitCode {
    let Some(label) = label_from_str(variant) else {
        return fail_usage(format!("unknown variant `{variant}`; expected c1, c2, or c3"));
    };
    let p = match params.params() {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let built = coverfam::constructions::build_default(&p, label);
    let family = match built {
        Ok(f) => f,
        Err(e) => return fail_usage(e),
    };
    let it = match iterated_tau(&family) {
        Ok(it) => it,
        Err(e) => return fail_usage(e),
    };
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, serialize_family(&family)) {
            return fail_usage(format!("cannot write {}: {e}", path.display()));
        }
    }
    if json {
        println!(
            "{}",
            json!({
                "variant": label.as_str(),
                "n": p.n, "k": p.k, "t": p.t,
                "sets": family.len(),
                "tau": it.tau, "tau2": it.tau_of_covers,
                "intersecting_covers": it.covers_intersecting,
            })
        );
    } else {
        println!(
            "sets={} tau=({},{}) intersecting_covers={}",
            family.len(),
            it.tau,
            it.tau_of_covers,
            it.covers_intersecting
        );
    }
    ExitCode::from(EXIT_OK)
}

fn read_family(path: &PathBuf) -> Result<coverfam::Family, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_family(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_tau(input: &PathBuf, with_covers: bool, json: bool) -> ExitCode {
    let family = match read_family(input) {
        Ok(f) => f,
        Err(e) => return fail_usage(e),
    };
    let covers = match min_covers(&family) {
        Ok(c) => c,
        Err(e) => return fail_usage(e),
    };
    let cover_family = match covers.as_family() {
        Ok(f) => f,
        Err(e) => return fail_usage(e),
    };
    let intersecting = coverfam::family::is_t_intersecting(&cover_family);
    let tau2 = match covering_number_unchecked(&cover_family) {
        Ok(v) => v,
        Err(e) => return fail_usage(e),
    };
    let cover_lists: Vec<Vec<u32>> = {
        let mut lists: Vec<Vec<u32>> = covers.sets().iter().map(|s| s.elements()).collect();
        lists.sort();
        lists
    };
    if json {
        let mut obj = json!({
            "tau": covers.size(),
            "covers": covers.len(),
            "tau2": tau2,
            "intersecting_covers": intersecting,
        });
        if with_covers {
            obj["cover_sets"] = json!(cover_lists);
        }
        println!("{obj}");
    } else {
        println!(
            "tau={} covers={} tau2={} intersecting_covers={}",
            covers.size(),
            covers.len(),
            tau2,
            intersecting
        );
        if with_covers {
            for list in cover_lists {
                let parts: Vec<String> = list.iter().map(|e| e.to_string()).collect();
                println!("{}", parts.join(" "));
            }
        }
    }
    ExitCode::from(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    params: &ParamArgs,
    s: u32,
    node_budget: Option<u64>,
    time_budget_ms: Option<u64>,
    out: Option<&PathBuf>,
    checkpoint_out: Option<&PathBuf>,
    resume: Option<&PathBuf>,
    json: bool,
) -> ExitCode {
    let p = match params.params() {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let budget = Budget { max_nodes: node_budget, max_millis: time_budget_ms };
    let resume_ck = match resume {
        None => None,
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail_usage(format!("cannot read {}: {e}", path.display())),
            };
            match parse_checkpoint(&text) {
                Ok(ck) => Some(ck),
                Err(e) => return fail_usage(format!("{}: {e}", path.display())),
            }
        }
    };
    let result = match exact_max_resumable(&p, s, &budget, resume_ck) {
        Ok(r) => r,
        Err(e) => return fail_usage(e),
    };
    let status = match result.status {
        SearchStatus::ProvedOptimal => "proved-optimal",
        SearchStatus::BudgetExhausted => "budget-exhausted",
    };
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, serialize_family(&result.witness)) {
            return fail_usage(format!("cannot write {}: {e}", path.display()));
        }
    }
    if let (Some(path), Some(ck)) = (checkpoint_out, &result.checkpoint) {
        if let Err(e) = std::fs::write(path, serialize_checkpoint(ck)) {
            return fail_usage(format!("cannot write {}: {e}", path.display()));
        }
    }
    if json {
        println!(
            "{}",
            json!({
                "n": p.n, "k": p.k, "t": p.t, "s": s,
                "value": result.value,
                "status": status,
                "nodes": result.stats.nodes,
                "constraints": result.stats.constraints_generated,
                "ms": result.stats.wall_ms as u64,
            })
        );
    } else {
        println!(
            "value={} status={} nodes={} constraints={} ms={}",
            result.value,
            status,
            result.stats.nodes,
            result.stats.constraints_generated,
            result.stats.wall_ms
        );
    }
    match result.status {
        SearchStatus::ProvedOptimal => ExitCode::from(EXIT_OK),
        SearchStatus::BudgetExhausted => ExitCode::from(EXIT_BUDGET),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    n_from: u64,
    n_to: u64,
    k: u32,
    t: u32,
    s: u32,
    node_budget: Option<u64>,
    time_budget_ms: Option<u64>,
    json: bool,
) -> ExitCode {
    if n_from > n_to {
        return fail_usage("--n-from must not exceed --n-to");
    }
    let mut cells = Vec::new();
    for n in n_from..=n_to {
        match Params::new(n, k, t) {
            Ok(p) => cells.push((p, s)),
            Err(e) => return fail_usage(e),
        }
    }
    let budget = Budget { max_nodes: node_budget, max_millis: time_budget_ms };
    let mut exhausted = false;
    for row in sweep(&cells, &budget) {
        let status = match row.status {
            Some(SearchStatus::ProvedOptimal) => "proved-optimal",
            Some(SearchStatus::BudgetExhausted) => {
                exhausted = true;
                "budget-exhausted"
            }
            None => "rejected",
        };
        let formula = row
            .formula_max
            .as_ref()
            .map(|(v, labels)| (v.to_string(), formula_names(labels)));
        if json {
            println!(
                "{}",
                json!({
                    "n": row.params.n, "k": row.params.k, "t": row.params.t, "s": row.s,
                    "value": row.value,
                    "status": status,
                    "nodes": row.nodes,
                    "formula_max": formula.as_ref().map(|(v, _)| v.clone()),
                    "formula_labels": formula.as_ref().map(|(_, l)| l.clone()),
                    "error": row.error,
                })
            );
        } else {
            let mut line = format!("n={} k={} t={} s={}", row.params.n, row.params.k, row.params.t, row.s);
            match row.value {
                Some(v) => line.push_str(&format!(" value={v}")),
                None => line.push_str(" value=-"),
            }
            line.push_str(&format!(" status={status} nodes={}", row.nodes));
            if let Some((v, labels)) = formula {
                line.push_str(&format!(" formula_max={v} formula_labels={labels}"));
            }
            if let Some(err) = &row.error {
                line.push_str(&format!(" error={:?}", err));
            }
            println!("{line}");
        }
    }
    if exhausted {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::from(EXIT_OK)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    grid: &str,
    seed: u64,
    samples: usize,
    cross_samples: usize,
    threads: Option<usize>,
    list_checks: bool,
    inject_fault: bool,
    json: bool,
) -> ExitCode {
    if list_checks {
        for name in CHECK_NAMES {
            println!("{name}");
        }
        return ExitCode::from(EXIT_OK);
    }
    let grid = match grid {
        "default" => default_grid(),
        "quick" => default_grid()
            .into_iter()
            .filter(|p| p.t == 1 && p.k == 4 && p.n <= 12)
            .collect(),
        other => return fail_usage(format!("unknown grid `{other}`; expected default or quick")),
    };
    let cfg = SuiteConfig {
        grid,
        seed,
        random_samples: samples,
        cross_samples,
        inject_fault,
        ..SuiteConfig::default()
    };
    let run = || {
        let reports = run_suite(&cfg);
        for r in &reports {
            if json {
                let metrics: serde_json::Map<String, serde_json::Value> = r
                    .metrics
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect();
                println!(
                    "{}",
                    json!({
                        "check": r.name,
                        "instance": r.instance,
                        "verdict": r.verdict.as_str(),
                        "metrics": metrics,
                    })
                );
            } else {
                println!("{}", r.line());
            }
        }
        tally(&reports)
    };
    let (pass, fail, na) = match threads {
        None => run(),
        Some(workers) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                Ok(p) => p,
                Err(e) => return fail_usage(e),
            };
            pool.install(run)
        }
    };
    if json {
        println!("{}", json!({"summary": {"pass": pass, "fail": fail, "not_applicable": na}}));
    } else {
        println!("summary pass={pass} fail={fail} not-applicable={na}");
    }
    if fail > 0 {
        ExitCode::from(EXIT_CHECK_FAILED)
    } else {
        ExitCode::from(EXIT_OK)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Formulas { params, n_to, json } => cmd_formulas(params, *n_to, *json),
        Command::Construct { variant, params, out, json } => {
            cmd_construct(variant, params, out.as_ref(), *json)
        }
        Command::Tau { input, json } => cmd_tau(input, false, *json),
        Command::Covers { input, json } => cmd_tau(input, true, *json),
        Command::Search {
            params,
            s,
            node_budget,
            time_budget_ms,
            out,
            checkpoint_out,
            resume,
            json,
        } => cmd_search(
            params,
            *s,
            *node_budget,
            *time_budget_ms,
            out.as_ref(),
            checkpoint_out.as_ref(),
            resume.as_ref(),
            *json,
        ),
        Command::Sweep { n_from, n_to, k, t, s, node_budget, time_budget_ms, json } => {
            cmd_sweep(*n_from, *n_to, *k, *t, *s, *node_budget, *time_budget_ms, *json)
        }
        Command::Verify {
            grid,
            seed,
            samples,
            cross_samples,
            threads,
            list_checks,
            inject_fault,
            json,
        } => cmd_verify(
            grid,
            *seed,
            *samples,
            *cross_samples,
            *threads,
            *list_checks,
            *inject_fault,
            *json,
        ),
    }
}
