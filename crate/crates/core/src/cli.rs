//! The `groupca` command line.
//!
//! Every subcommand prints one JSON report (or writes it to `--out`). The
//! report echoes the command and the crate version, so re-running the echo
//! reproduces the same verdict payload; only `wall_clock_ms` changes.
//! Errors go to stderr as `{"error": {"reason", "message"}}` with the exit
//! code of [`Error::exit_code`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::blocking::{
    replay_counterexample, sensitivity_probe, verify_blocking, BlockingQuery, VerificationMode,
    VerifyOptions, DEFAULT_EXHAUSTIVE_CAP,
};
use crate::config::{Alphabet, ConfigFile, Configuration, Pattern, PatternFile, Symbol};
use crate::engine::{builtin, evolve_capped, CellularAutomaton, RuleFile};
use crate::error::{Error, Result};
use crate::freeca::{
    ball_state_dot, experiment_nonsensitivity, experiment_propagation, experiment_uniform_interior,
    free_alphabet, obstacle_config, Exterior, NonsensitivitySpec, PropagationSpec, ZERO,
};
use crate::group::{Family, GroupCtx, GroupElement, DEFAULT_BALL_CAP};
use crate::lift::SubgroupEmbedding;
use crate::vz::{equicontinuity_pipeline, glue, VZStructure};

pub const CAP_ENV: &str = "GROUPCA_CAP_ELEMS";

#[derive(Debug, Parser)]
#[command(name = "groupca", version, about = "Cellular automata on finitely generated groups")]
pub struct Cli {
    /// Worker threads (the report does not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest number of exterior assignments enumerated exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    pub max_enum: u128,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a configuration and print the frames on a ball.
    Evolve {
        #[arg(long, default_value = "z")]
        group: String,
        #[arg(long)]
        ca: String,
        /// Configuration JSON; uniform first symbol when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        window_radius: u64,
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Check that a word blocks a region up to a horizon.
    VerifyBlocking {
        #[arg(long, default_value = "z")]
        group: String,
        #[arg(long)]
        ca: String,
        #[arg(long)]
        word: String,
        /// JSON list of elements, inline or as a file.
        #[arg(long)]
        region: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Skip the set-valued proof and enumerate.
        #[arg(long)]
        no_set_pruning: bool,
    },
    /// Look for a word blocking B(1,k) among words on balls of radius k..=max.
    SearchBlocking {
        #[arg(long, default_value = "z")]
        group: String,
        #[arg(long)]
        ca: String,
        #[arg(long, default_value_t = 0)]
        k: u64,
        #[arg(long, default_value_t = 2)]
        max_radius: u64,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, default_value = "exhaustive")]
        mode: String,
    },
    /// Impacts of neighborhood elements on a virtually-Z group.
    Impact {
        #[arg(long, default_value = "z")]
        group: String,
        /// Elements to measure; the generators and 1 when absent.
        #[arg(long = "s")]
        s: Vec<String>,
        /// Report Δ for this automaton as well.
        #[arg(long)]
        ca: Option<String>,
        /// Vertebrae checked are -range..=range.
        #[arg(long, default_value_t = 5)]
        range: i64,
    },
    /// Glue two blocking words along a virtually-Z group.
    Glue {
        #[arg(long, default_value = "z")]
        group: String,
        #[arg(long)]
        ca: String,
        #[arg(long)]
        left_word: String,
        #[arg(long)]
        left_region: String,
        #[arg(long)]
        right_word: String,
        #[arg(long)]
        right_region: String,
        #[arg(long)]
        horizon: usize,
        /// Configuration supplying the cells between the words; both words
        /// over the first symbol when absent.
        #[arg(long)]
        filler: Option<PathBuf>,
    },
    /// Build a periodic point from a blocking word and test it as an
    /// equicontinuity point.
    EquicontinuityCheck {
        #[arg(long, default_value = "z")]
        group: String,
        #[arg(long)]
        ca: String,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        /// Blocking word; searched on balls of radius k..=k+2 when absent.
        #[arg(long, requires = "region")]
        word: Option<String>,
        #[arg(long)]
        region: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1000)]
        probes: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare a lifted automaton with the original on every coset.
    LiftCheck {
        #[arg(long, default_value = "free:2")]
        big: String,
        #[arg(long, default_value = "z-as-a")]
        sub: String,
        #[arg(long)]
        ca: String,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 5)]
        window: u64,
        /// Coset representatives are taken from this ball.
        #[arg(long, default_value_t = 2)]
        reps_radius: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the rectangle inclusions for all k, l up to the bounds.
    Rectangles {
        #[arg(long, default_value = "free:2")]
        group: String,
        #[arg(long, default_value_t = 4)]
        k_max: u64,
        #[arg(long, default_value_t = 4)]
        l_max: u64,
    },
    /// Experiments with the free-group automaton.
    Counterexample {
        #[arg(long)]
        experiment: String,
        #[arg(long, default_value_t = 2)]
        rank: u8,
        #[arg(long, default_value_t = 3)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        steps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// binary or full
        #[arg(long, default_value = "binary")]
        exterior: String,
        /// Propagation: starting cell and time.
        #[arg(long, default_value = "")]
        g: String,
        #[arg(long, default_value_t = 0)]
        t: u32,
        /// Propagation: path length.
        #[arg(long, default_value_t = 2)]
        i: u64,
        /// Propagation: seed configuration, uniform 0 when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Propagation: allow the flip to land inside B(1,n).
        #[arg(long)]
        no_enforce_cut: bool,
        /// Directory for Graphviz dumps of the initial state.
        #[arg(long)]
        dump_dot: Option<PathBuf>,
    },
}

fn ball_cap_from_env() -> Result<usize> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| Error::parse(format!("{CAP_ENV}='{v}': {e}"))),
        Err(_) => Ok(DEFAULT_BALL_CAP),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Inline JSON when the argument starts with `[` or `{`, else a file path.
fn json_arg(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        Ok(arg.to_string())
    } else {
        read(Path::new(arg))
    }
}

fn load_ca(spec: &str, family: Family) -> Result<CellularAutomaton> {
    if spec.ends_with(".json") || spec.trim_start().starts_with('{') {
        let rule: RuleFile = serde_json::from_str(&json_arg(spec)?)?;
        rule.into_ca(family)
    } else {
        builtin(spec, family)
    }
}

fn same_alphabet(ca: &CellularAutomaton, a: &Alphabet) -> Result<()> {
    if ca.alphabet() != a {
        return Err(Error::precondition(format!(
            "alphabet {:?} does not match the automaton's {:?}",
            a.tokens(),
            ca.alphabet().tokens()
        )));
    }
    Ok(())
}

fn load_word(arg: &str, ca: &CellularAutomaton) -> Result<Pattern> {
    let file: PatternFile = serde_json::from_str(&json_arg(arg)?)?;
    let (a, p) = Pattern::from_json(ca.family(), &file)?;
    same_alphabet(ca, &a)?;
    Ok(p)
}

fn load_region(arg: &str, family: Family) -> Result<Vec<GroupElement>> {
    let cells: Vec<String> = serde_json::from_str(&json_arg(arg)?)?;
    cells.iter().map(|c| family.parse_element(c)).collect()
}

fn load_config(path: &Path, family: Family, alphabet: &Alphabet) -> Result<Configuration> {
    let file: ConfigFile = serde_json::from_str(&read(path)?)?;
    let (a, c) = Configuration::from_json(family, &file)?;
    if &a != alphabet {
        return Err(Error::precondition(format!(
            "configuration alphabet {:?} does not match {:?}",
            a.tokens(),
            alphabet.tokens()
        )));
    }
    if c.family() != family {
        return Err(Error::FamilyMismatch {
            expected: family.to_string(),
            found: c.family().to_string(),
        });
    }
    Ok(c)
}

fn ctx_of(group: &str, cap: usize) -> Result<GroupCtx> {
    Ok(group.parse::<GroupCtx>()?.with_ball_cap(cap))
}

fn vz_of(group: &str, cap: usize) -> Result<VZStructure> {
    let ctx = ctx_of(group, cap)?;
    if ctx.generators() != ctx.family().canonical_generators().as_slice() {
        return Err(Error::Unsupported(
            "virtually-Z machinery uses the canonical generating set".into(),
        ));
    }
    VZStructure::new(ctx)
}

fn frames_json(alphabet: &Alphabet, frames: &[Vec<Symbol>]) -> Value {
    json!(frames
        .iter()
        .map(|f| f.iter().map(|s| alphabet.token(*s)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn write_dot(dir: &Path, name: &str, dot: &str) -> Result<String> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.dot"));
    std::fs::write(&path, dot)?;
    Ok(path.display().to_string())
}

struct Limits {
    ball_cap: usize,
    opts: VerifyOptions,
}

fn run_command(cmd: &Command, lim: &Limits) -> Result<Value> {
    let cap = lim.ball_cap;
    match cmd {
        Command::Evolve {
            group,
            ca,
            config,
            window_radius,
            steps,
        } => {
            let ctx = ctx_of(group, cap)?;
            let ca = load_ca(ca, ctx.family())?;
            let cfg = match config {
                Some(p) => load_config(p, ctx.family(), ca.alphabet())?,
                None => Configuration::uniform(ctx.family(), Symbol(0)),
            };
            let window = ctx.ball(*window_radius)?;
            let ev = evolve_capped(&ca, &cfg, &window, *steps, cap)?;
            Ok(json!({
                "group": ctx.family().to_string(),
                "ca": ca.name(),
                "window": window.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "steps": steps,
                "dependency_size": ev.dependency_size,
                "frames": frames_json(ca.alphabet(), &ev.frames),
            }))
        }
        Command::VerifyBlocking {
            group,
            ca,
            word,
            region,
            horizon,
            mode,
            no_set_pruning,
        } => {
            let ctx = ctx_of(group, cap)?;
            let ca = load_ca(ca, ctx.family())?;
            let mode: VerificationMode = mode.parse()?;
            let q = BlockingQuery::new(
                load_word(word, &ca)?,
                load_region(region, ctx.family())?,
                *horizon,
            );
            let opts = VerifyOptions {
                set_pruning: !no_set_pruning,
                ..lim.opts
            };
            let cert = verify_blocking(&ca, &q, mode, &opts)?;
            let replayed = match cert.verdict.counterexample() {
                Some(_) => Some(replay_counterexample(&ca, &cert)?),
                None => None,
            };
            Ok(json!({
                "group": ctx.family().to_string(),
                "ca": ca.name(),
                "certificate": cert.to_json(ca.alphabet()),
                "replayed": replayed,
            }))
        }
        Command::SearchBlocking {
            group,
            ca,
            k,
            max_radius,
            horizon,
            mode,
        } => {
            let ctx = ctx_of(group, cap)?;
            let ca = load_ca(ca, ctx.family())?;
            let mode: VerificationMode = mode.parse()?;
            let rep = sensitivity_probe(&ctx, &ca, *k, *max_radius, *horizon, mode, &lim.opts)?;
            Ok(json!({
                "group": ctx.family().to_string(),
                "ca": ca.name(),
                "max_radius": max_radius,
                "horizon": horizon,
                "mode": mode.to_string(),
                "probe": rep.to_json(ca.alphabet()),
            }))
        }
        Command::Impact { group, s, ca, range } => {
            let vz = vz_of(group, cap)?;
            let fam = vz.family();
            let elems: Vec<GroupElement> = if s.is_empty() {
                let mut v = vec![fam.identity()];
                v.extend(fam.canonical_generators());
                v
            } else {
                s.iter().map(|x| fam.parse_element(x)).collect::<Result<_>>()?
            };
            let mut rows = Vec::new();
            for e in &elems {
                let per: Vec<u64> = (-range..=*range)
                    .map(|k| vz.impact_at(e, k))
                    .collect::<Result<_>>()?;
                let imp = vz.impact(e)?;
                rows.push(json!({
                    "s": e.to_string(),
                    "imp": imp,
                    "per_vertebra": per,
                    "independent_of_k": per.iter().all(|v| *v == imp),
                }));
            }
            let delta = match ca {
                Some(c) => Some(vz.delta(&load_ca(c, fam)?)?),
                None => None,
            };
            Ok(json!({
                "group": fam.to_string(),
                "vertebrae": [-range, range],
                "impacts": rows,
                "delta": delta,
            }))
        }
        Command::Glue {
            group,
            ca,
            left_word,
            left_region,
            right_word,
            right_region,
            horizon,
            filler,
        } => {
            let vz = vz_of(group, cap)?;
            let fam = vz.family();
            let ca = load_ca(ca, fam)?;
            let q1 = BlockingQuery::new(load_word(left_word, &ca)?, load_region(left_region, fam)?, *horizon);
            let q2 = BlockingQuery::new(load_word(right_word, &ca)?, load_region(right_region, fam)?, *horizon);
            let filler = match filler {
                Some(p) => load_config(p, fam, ca.alphabet())?,
                None => Configuration::uniform(fam, Symbol(0)).patched(&q1.word.overlay(&q2.word)),
            };
            let glued = glue(&vz, &ca, &q1, &q2, &filler, &lim.opts)?;
            let cert = verify_blocking(&ca, &glued, VerificationMode::Exhaustive, &lim.opts)?;
            Ok(json!({
                "group": fam.to_string(),
                "ca": ca.name(),
                "delta": vz.delta(&ca)?,
                "glued": glued.to_json(ca.alphabet()),
                "certificate": cert.to_json(ca.alphabet()),
            }))
        }
        Command::EquicontinuityCheck {
            group,
            ca,
            k,
            horizon,
            word,
            region,
            trials,
            probes,
            seed,
        } => {
            let vz = vz_of(group, cap)?;
            let fam = vz.family();
            let ca = load_ca(ca, fam)?;
            let (q, search) = match (word, region) {
                (Some(w), Some(r)) => (
                    BlockingQuery::new(load_word(w, &ca)?, load_region(r, fam)?, *horizon),
                    Value::Null,
                ),
                _ => {
                    let rep = sensitivity_probe(
                        vz.ctx(),
                        &ca,
                        *k,
                        k + 2,
                        *horizon,
                        VerificationMode::Exhaustive,
                        &lim.opts,
                    )?;
                    let Some((r, cert)) = rep.outcome.found.clone() else {
                        return Err(Error::precondition(format!(
                            "no B(1,{k})-blocking word on balls up to radius {}",
                            k + 2
                        )));
                    };
                    (
                        cert.query.clone(),
                        json!({"radius": r, "candidates": rep.outcome.certificates.len(), "word": cert.query.to_json(ca.alphabet())}),
                    )
                }
            };
            let rep = equicontinuity_pipeline(&vz, &ca, &q, *k, *probes, *trials, *seed, &lim.opts)?;
            Ok(json!({
                "group": fam.to_string(),
                "ca": ca.name(),
                "search": search,
                "seed": seed,
                "pipeline": rep.to_json(ca.alphabet()),
            }))
        }
        Command::LiftCheck {
            big,
            sub,
            ca,
            steps,
            window,
            reps_radius,
            seed,
        } => {
            if sub != "z-as-a" {
                return Err(Error::Unsupported(format!(
                    "subgroup '{sub}' (only z-as-a, the cyclic subgroup of the first letter)"
                )));
            }
            let Family::Free { rank } = big.parse::<Family>()? else {
                return Err(Error::Unsupported("lifts go into free groups".into()));
            };
            let emb = SubgroupEmbedding::new(rank)?.with_ball_cap(cap);
            let ca = load_ca(ca, Family::Integers)?;
            let symbols: Vec<Symbol> = ca.alphabet().symbols().collect();
            let x = Configuration::noise(Family::Free { rank }, Pattern::new(), *seed, symbols);
            let reps = emb.reps_in_ball(*reps_radius)?;
            let rep = emb.check_parallel_dynamics(&ca, &x, *steps, *window, &reps)?;
            Ok(json!({
                "big": format!("free:{rank}"),
                "sub": sub,
                "ca": ca.name(),
                "lifted": emb.lift_ca(&ca)?.name(),
                "seed": seed,
                "parallel": rep.to_json(),
            }))
        }
        Command::Rectangles { group, k_max, l_max } => {
            let Family::Free { rank } = group.parse::<Family>()? else {
                return Err(Error::Unsupported("rectangles live in free groups".into()));
            };
            let emb = SubgroupEmbedding::new(rank)?.with_ball_cap(cap);
            let mut rows = Vec::new();
            let mut all = true;
            for k in 0..=*k_max {
                for l in 0..=*l_max {
                    let r = emb.check_rectangle_inclusions(k, l)?;
                    all &= r.holds();
                    rows.push(r.to_json());
                }
            }
            let lambdas: Vec<u64> = (0..=*k_max).map(|k| emb.lambda_of(k)).collect::<Result<_>>()?;
            Ok(json!({
                "group": format!("free:{rank}"),
                "lambda": lambdas,
                "rectangles": rows,
                "all_hold": all,
            }))
        }
        Command::Counterexample {
            experiment,
            rank,
            n,
            steps,
            seed,
            trials,
            exterior,
            g,
            t,
            i,
            config,
            no_enforce_cut,
            dump_dot,
        } => {
            let fam = Family::Free { rank: *rank };
            if !(2..=26).contains(rank) {
                return Err(Error::Usage("rank must be between 2 and 26".into()));
            }
            let alphabet = free_alphabet();
            let (report, initial, radius) = match experiment.as_str() {
                "obstacle" => {
                    let spec = NonsensitivitySpec {
                        rank: *rank,
                        n: *n,
                        steps: *steps,
                        trials: *trials,
                        seed: *seed,
                        exterior: exterior.parse::<Exterior>()?,
                    };
                    let r = experiment_nonsensitivity(&spec)?;
                    (r.to_json(), obstacle_config(*rank, *n)?, n + 1)
                }
                "uniform-interior" => {
                    let r = experiment_uniform_interior(*rank, *n, cap)?;
                    let c = Configuration::uniform(fam, crate::freeca::IOTA)
                        .patched(&Pattern::single(r.flipped.clone(), ZERO));
                    (r.to_json(), c, *n)
                }
                "propagation" => {
                    let seed_config = match config {
                        Some(p) => load_config(p, fam, &alphabet)?,
                        None => Configuration::uniform(fam, ZERO),
                    };
                    let spec = PropagationSpec {
                        seed_config: seed_config.clone(),
                        g: fam.parse_element(g)?,
                        t: *t,
                        n: *n,
                        i: *i,
                        enforce_cut: !no_enforce_cut,
                    };
                    let mut r = experiment_propagation(&spec)?.to_json();
                    r["enforce_cut"] = json!(spec.enforce_cut);
                    (r, seed_config, *n)
                }
                other => {
                    return Err(Error::Usage(format!(
                        "unknown experiment '{other}' (obstacle, uniform-interior, propagation)"
                    )))
                }
            };
            let dot = match dump_dot {
                Some(dir) => Some(write_dot(dir, experiment, &ball_state_dot(&initial, &alphabet, radius)?)?),
                None => None,
            };
            Ok(json!({
                "group": fam.to_string(),
                "ca": "freeblock",
                "report": report,
                "dot": dot,
            }))
        }
    }
}

/// Parses and runs one command line. `Ok(None)` for `--help`/`--version`.
pub fn run<I, T>(args: I) -> Result<Option<Value>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(None);
            }
            return Err(Error::Usage(e.to_string()));
        }
    };
    let lim = Limits {
        ball_cap: ball_cap_from_env()?,
        opts: VerifyOptions {
            exhaustive_cap: cli.max_enum,
            ball_cap: ball_cap_from_env()?,
            ..VerifyOptions::default()
        },
    };
    let started = Instant::now();
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(|| run_command(&cli.command, &lim)),
        None => run_command(&cli.command, &lim),
    }?;
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let report = json!({
        "command": echo,
        "version": env!("CARGO_PKG_VERSION"),
        "caps": {"ball_elements": lim.ball_cap, "exhaustive": lim.opts.exhaustive_cap.to_string()},
        "result": result,
        "wall_clock_ms": started.elapsed().as_millis() as u64,
    });
    let text = serde_json::to_string_pretty(&report)?;
    match &cli.out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(Some(report))
}

/// Entry point of the binary: runs and maps errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(args) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": {"reason": e.reason(), "message": e.to_string()}})
            );
            e.exit_code()
        }
    }
}
