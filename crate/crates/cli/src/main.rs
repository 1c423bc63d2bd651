use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use diamond_core::hecke::{
    check_all, derive_conditions, hecke_reduce, render_letters, CheckOptions, ConditionSet,
    DotMode, HeckeError, HeckePresentation,
};
use diamond_core::ms::{
    apply_packet_flip, comm_canonical, expression_graph, find_flippable_packet,
    higher_inversion_set, leq, sink, Expression, MsError, Permutation,
};
use diamond_core::presentation::{
    parse_presentation, preset, Presentation, PresentationError, System, PRESETS,
};
use diamond_core::word::{
    bergman_check, complete, enumerate_irreducible, normal_form, BergmanOptions, CompletionStatus,
    RewriteSystem, WordError, DEFAULT_BUDGET,
};

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Ms(#[from] MsError),
    #[error("{0}")]
    Usage(String),
    #[error("refusing to list a basis: not of Bergman type ({0} unresolvable ambiguities); pass --force to list irreducibles anyway")]
    Refused(usize),
}

type Outcome = Result<(String, u8), CliError>;

#[derive(Parser)]
#[command(
    name = "diamond",
    version,
    about = "Diamond lemma checks for word rewriting and Hecke-type presentations"
)]
struct Cli {
    /// Worker threads for ambiguity checks.
    #[arg(long, global = true, env = "DIAMOND_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Presentation file (TOML).
    file: Option<PathBuf>,
    /// Use a built-in presentation instead of a file.
    #[arg(long, conflicts_with = "file")]
    preset: Option<String>,
    /// Reduction step budget.
    #[arg(long)]
    budget: Option<usize>,
}

impl Input {
    fn load(&self) -> Result<Presentation, CliError> {
        match (&self.file, &self.preset) {
            (Some(path), None) => {
                let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(parse_presentation(&src)?)
            }
            (None, Some(name)) => Ok(preset(name)?),
            _ => {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                Err(CliError::Usage(format!(
                    "give a presentation file or --preset (one of {})",
                    names.join(", ")
                )))
            }
        }
    }

    fn budget(&self, p: &Presentation) -> usize {
        self.budget.or(p.options().budget).unwrap_or(DEFAULT_BUDGET)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check every ambiguity; exit 0 if all resolve, 1 if not.
    Check {
        #[command(flatten)]
        input: Input,
        /// Include reduction chains.
        #[arg(long)]
        trace: bool,
        /// Accept residuals lying in the span of smaller relation instances.
        #[arg(long)]
        relative: bool,
    },
    /// Polynomial conditions on the parameters for every ambiguity to resolve.
    Conditions {
        #[command(flatten)]
        input: Input,
    },
    /// List basis words (irreducible words or sink expressions).
    Basis {
        #[command(flatten)]
        input: Input,
        /// Bottom colours (Hecke presentations).
        #[arg(long)]
        source: Option<String>,
        /// Top colours (Hecke presentations).
        #[arg(long)]
        target: Option<String>,
        /// Longest word listed (word systems).
        #[arg(long)]
        max_len: Option<usize>,
        /// List even if the presentation is not of Bergman type.
        #[arg(long)]
        force: bool,
    },
    /// Reduce a term to normal form.
    NormalForm {
        #[command(flatten)]
        input: Input,
        /// Linear combination of words, or a decorated word for Hecke presentations.
        #[arg(long, allow_hyphen_values = true)]
        term: String,
        /// Bottom colours (Hecke presentations).
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        trace: bool,
    },
    /// Add oriented residuals as rules until every ambiguity resolves.
    Complete {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Reduced expressions in symmetric groups.
    #[command(subcommand)]
    Ms(MsCommand),
}

#[derive(Subcommand)]
enum MsCommand {
    /// Graph of expressions of a permutation, as DOT.
    Graph {
        /// Permutation in one-line notation, e.g. 4321.
        #[arg(long)]
        w: String,
        /// Collapse commutation classes.
        #[arg(long)]
        quotient: bool,
        /// Orient braid and cancellation edges.
        #[arg(long)]
        orient: bool,
        /// Also include expressions this much longer than reduced (even).
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long, default_value_t = 100_000)]
        max_vertices: usize,
    },
    /// Sink of the commutation class reached by oriented moves.
    Sink {
        word: String,
        #[arg(long)]
        strands: Option<usize>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Compare two reduced expressions of the same permutation.
    Order {
        a: String,
        b: String,
        #[arg(long)]
        strands: Option<usize>,
    },
    /// Apply a braid move and report the change in the triple set.
    Flip {
        word: String,
        /// Start of the braid pattern; found automatically if omitted.
        #[arg(long)]
        at: Option<usize>,
        #[arg(long)]
        strands: Option<usize>,
    },
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn verdict(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn word_system(p: &Presentation, cmd: &str) -> Result<RewriteSystem, CliError> {
    match &p.system {
        System::WordRewrite(s) => Ok(s.clone()),
        System::Hecke(_) => Err(CliError::Usage(format!(
            "{cmd} needs a word-rewrite presentation"
        ))),
    }
}

fn colors(
    p: &HeckePresentation,
    flag: &str,
    src: &Option<String>,
) -> Result<Vec<diamond_core::scalar::Color>, CliError> {
    let src = src
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for Hecke presentations")))?;
    Ok(p.parse_colors(src)?)
}

fn check(input: &Input, trace: bool, relative: bool) -> Outcome {
    let p = input.load()?;
    let budget = input.budget(&p);
    match &p.system {
        System::WordRewrite(s) => {
            let opts = BergmanOptions {
                budget,
                relative: relative || p.options().relative.unwrap_or(false),
                basis_len: p.options().max_len.unwrap_or(8),
            };
            let rep = bergman_check(s, &opts)?;
            let mut v = json!({
                "presentation": p.name(),
                "kind": "word-rewrite",
                "ambiguities_checked": rep.reports.len(),
            });
            v.as_object_mut()
                .unwrap()
                .extend(rep.to_json(s).as_object().unwrap().clone());
            Ok((pretty(&v), verdict(rep.bergman)))
        }
        System::Hecke(h) => {
            let rep = check_all(h, DotMode::Generators, CheckOptions { budget, trace })?;
            let mut v = json!({ "presentation": p.name() });
            v.as_object_mut()
                .unwrap()
                .extend(rep.to_json(trace).as_object().unwrap().clone());
            Ok((pretty(&v), verdict(rep.bergman)))
        }
    }
}

fn conditions(input: &Input) -> Outcome {
    let p = input.load()?;
    let budget = input.budget(&p);
    let set = match &p.system {
        System::Hecke(h) => {
            derive_conditions(
                h,
                CheckOptions {
                    budget,
                    trace: false,
                },
            )?
            .0
        }
        System::WordRewrite(s) => {
            let opts = BergmanOptions {
                budget,
                relative: false,
                basis_len: 0,
            };
            let rep = bergman_check(s, &opts)?;
            ConditionSet::from_residuals(
                rep.reports
                    .iter()
                    .flat_map(|r| r.residual.terms().map(|(_, c)| c)),
            )
        }
    };
    let mut v = json!({ "presentation": p.name() });
    v.as_object_mut()
        .unwrap()
        .extend(set.to_json().as_object().unwrap().clone());
    Ok((pretty(&v), 0))
}

fn basis(
    input: &Input,
    source: &Option<String>,
    target: &Option<String>,
    max_len: Option<usize>,
    force: bool,
) -> Outcome {
    let p = input.load()?;
    let budget = input.budget(&p);
    match &p.system {
        System::WordRewrite(s) => {
            let len = max_len.or(p.options().max_len).unwrap_or(8);
            let rep = bergman_check(
                s,
                &BergmanOptions {
                    budget,
                    relative: p.options().relative.unwrap_or(false),
                    basis_len: len,
                },
            )?;
            if !rep.bergman && !force {
                return Err(CliError::Refused(rep.unresolvable().count()));
            }
            let words: Vec<String> = enumerate_irreducible(s, len)
                .iter()
                .map(|w| s.render(w))
                .collect();
            let v = json!({
                "presentation": p.name(),
                "certified": rep.bergman,
                "max_len": len,
                "complete": rep.irreducible.total.is_some(),
                "count": words.len(),
                "basis": words,
            });
            Ok((pretty(&v), 0))
        }
        System::Hecke(h) => {
            let bottom = colors(h, "source", source)?;
            let top = match target {
                Some(_) => colors(h, "target", target)?,
                None => bottom.clone(),
            };
            let rep = check_all(
                h,
                DotMode::Generators,
                CheckOptions {
                    budget,
                    trace: false,
                },
            )?;
            if !rep.bergman && !force {
                return Err(CliError::Refused(rep.unresolvable().count()));
            }
            let words: Vec<String> = h
                .enumerate_basis(&bottom, &top)?
                .iter()
                .map(|e| e.to_string())
                .collect();
            let v = json!({
                "presentation": p.name(),
                "certified": rep.bergman,
                "count": words.len(),
                "basis": words,
                "over": "dots",
            });
            Ok((pretty(&v), 0))
        }
    }
}

fn normal(input: &Input, term: &str, source: &Option<String>, trace: bool) -> Outcome {
    let p = input.load()?;
    let budget = input.budget(&p);
    match &p.system {
        System::WordRewrite(s) => {
            let t = s.lincomb(term)?;
            let nf = normal_form(s, &t, budget, trace)?;
            let mut v = json!({
                "input": s.render_lincomb(&t),
                "normal_form": s.render_lincomb(&nf.result),
                "steps": nf.steps,
            });
            if trace {
                v["trace"] = json!(nf.trace);
            }
            Ok((pretty(&v), 0))
        }
        System::Hecke(h) => {
            let bottom = colors(h, "source", source)?;
            let w = h.parse_decorated(&bottom, term)?;
            let input = render_letters(&w);
            let r = hecke_reduce(
                h,
                &bottom,
                &[(w, diamond_core::scalar::Scalar::one())],
                budget,
                trace,
            )?;
            let mut v = json!({
                "input": input,
                "normal_form": r.result.render(),
                "steps": r.steps,
            });
            if trace {
                v["trace"] = json!(r.trace);
            }
            Ok((pretty(&v), 0))
        }
    }
}

fn completion(input: &Input, rounds: Option<usize>) -> Outcome {
    let p = input.load()?;
    let budget = input.budget(&p);
    let s = word_system(&p, "complete")?;
    let rounds = rounds.or(p.options().rounds).unwrap_or(10);
    let c = complete(&s, rounds, budget)?;
    let rules: Vec<Value> = c
        .system
        .rules
        .iter()
        .map(|r| {
            json!({
                "label": r.label,
                "lhs": c.system.render(&r.lhs),
                "rhs": c.system.render_lincomb(&r.rhs),
            })
        })
        .collect();
    let v = json!({
        "presentation": p.name(),
        "status": c.status,
        "rounds": c.rounds,
        "added": c.added,
        "rules": rules,
    });
    Ok((pretty(&v), verdict(c.status == CompletionStatus::Confluent)))
}

fn expression(src: &str, strands: Option<usize>) -> Result<Expression, CliError> {
    Ok(Expression::parse_auto(src, strands.unwrap_or(1))?)
}

fn ms(cmd: &MsCommand) -> Outcome {
    match cmd {
        MsCommand::Graph {
            w,
            quotient,
            orient,
            extra,
            max_vertices,
        } => {
            let perm: Permutation = w.parse()?;
            let g = expression_graph(&perm, *extra, *max_vertices)?;
            let dot = if *quotient {
                g.quotient.to_dot(&perm.to_string(), *orient)
            } else {
                g.to_dot(*orient)
            };
            Ok((dot, 0))
        }
        MsCommand::Sink {
            word,
            strands,
            budget,
        } => {
            let e = expression(word, *strands)?;
            let r = sink(&e, budget.unwrap_or(DEFAULT_BUDGET))?;
            let v = json!({
                "input": e,
                "sink": r.sink,
                "length": r.sink.len(),
                "trace": r.trace,
            });
            Ok((pretty(&v), 0))
        }
        MsCommand::Order { a, b, strands } => {
            let n = expression(a, *strands)?
                .n()
                .max(expression(b, *strands)?.n());
            let (x, y) = (Expression::parse(n, a)?, Expression::parse(n, b)?);
            let c = leq(&x, &y)?;
            let v = json!({
                "a": x,
                "b": y,
                "comparison": c,
                "a_class": comm_canonical(&x),
                "b_class": comm_canonical(&y),
            });
            Ok((pretty(&v), 0))
        }
        MsCommand::Flip { word, at, strands } => {
            let e = expression(word, *strands)?;
            let (start, position) = match at {
                Some(p) => (e.clone(), *p),
                None => match find_flippable_packet(&e)? {
                    Some(site) => (site.rearranged, site.position),
                    None => {
                        return Err(CliError::Usage(format!(
                            "{e} has no forward flip: its triple set is already full"
                        )))
                    }
                },
            };
            let (f, triple, forward) = apply_packet_flip(&start, position)?;
            let v = json!({
                "input": e,
                "rearranged": start,
                "position": position,
                "result": f,
                "triple": triple,
                "delta": if forward { "added" } else { "removed" },
                "j_before": higher_inversion_set(&start)?,
                "j_after": higher_inversion_set(&f)?,
            });
            Ok((pretty(&v), 0))
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if let Some(k) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    match &cli.command {
        Command::Check {
            input,
            trace,
            relative,
        } => check(input, *trace, *relative),
        Command::Conditions { input } => conditions(input),
        Command::Basis {
            input,
            source,
            target,
            max_len,
            force,
        } => basis(input, source, target, *max_len, *force),
        Command::NormalForm {
            input,
            term,
            source,
            trace,
        } => normal(input, term, source, *trace),
        Command::Complete { input, rounds } => completion(input, *rounds),
        Command::Ms(m) => ms(m),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Refused(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
