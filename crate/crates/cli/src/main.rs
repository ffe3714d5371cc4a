use std::fs;
use std::io::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use refgap::cnf::{emit_dimacs, parse_dimacs, parse_model, write_model, Cnf};
use refgap::condition::{audit_refutation, run_claims, AuditOptions, BlockContext};
use refgap::encode::{encode, encode_ref, encode_rref, Family, Variant};
use refgap::generate::{random_unsat_3cnf, seeded};
use refgap::proof::{check_proof, parse_trace, proof_width, write_trace, Proof, Verdict};
use refgap::reduction::{
    decide_via_automatizer, gap_instance_with, padded_gap_instance_with, witness_searcher, GapInstance, GapOptions,
    SearchOutcome,
};
use refgap::restriction::{
    classify_restricted_formula, restrict_and_reindex_proof, restriction_report, sample_restriction, write_restriction,
    RestrictError,
};
use refgap::solver::{solve, Limits, SolveResult};
use refgap::structure::{
    full_tree, parse_structure, structure_to_assignment, structure_to_proof, validate_structure, write_structure, FullTree,
};
use refgap::witness::{build_witness, cut_count};

#[derive(Parser)]
#[command(name = "refgap", version, about = "REF/RREF encodings, proof checking and gap-reduction experiments")]
struct Cli {
    /// Worker threads for parallel subcommands (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ref,
    Rref,
    RrefPrime,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate REF(F,s), RREF(F,s) or RREF′(F,s).
    Encode {
        kind: Kind,
        #[arg(long)]
        cnf: PathBuf,
        #[arg(short)]
        s: usize,
        /// Whitespace-separated line indices; produces the formula over this index set.
        #[arg(short = 'A')]
        indices: Option<PathBuf>,
        #[arg(short)]
        o: PathBuf,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
    },
    /// Build the full-tree refutation of F.
    Fulltree {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(short)]
        o: PathBuf,
        /// Also write it as a proof trace.
        #[arg(long)]
        proof: Option<PathBuf>,
    },
    /// Validate a refutation structure against the rules (R1)–(R8).
    CheckStruct {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long = "struct")]
        structure: PathBuf,
    },
    /// Check a proof trace against premises in DIMACS.
    CheckProof {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        /// Require the last line to be the empty clause.
        #[arg(long)]
        refutation: bool,
    },
    /// Build the short refutation of RREF(F,s) from a model of F.
    Witness {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(short)]
        s: usize,
        #[arg(short)]
        o: PathBuf,
        #[arg(long)]
        rref_prime: bool,
    },
    /// Sample a random restriction of RREF(F,t).
    Restrict {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(short)]
        t: usize,
        #[arg(long, env = "REFGAP_SEED", default_value_t = 0)]
        seed: u64,
        /// A refutation of RREF(F,t) to restrict.
        #[arg(long)]
        proof: Option<PathBuf>,
        /// Width threshold for the report.
        #[arg(short, default_value_t = 1)]
        w: usize,
        /// Output directory.
        #[arg(short)]
        o: PathBuf,
    },
    /// Run the condition adversary against a refutation of REF(F,s).
    Audit {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(short)]
        s: usize,
        #[arg(short)]
        w: usize,
        #[arg(long)]
        proof: PathBuf,
        /// Allow parameters outside 2^n ≥ s ≥ 6nw.
        #[arg(long)]
        relaxed: bool,
    },
    /// Randomized checks of the condition-game claims.
    Claims {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
        /// Defaults to 6nw.
        #[arg(short)]
        s: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, env = "REFGAP_SEED", default_value_t = 0)]
        seed: u64,
        /// Unsatisfiable F; a random unsatisfiable 3-CNF on n variables otherwise.
        #[arg(long)]
        cnf: Option<PathBuf>,
    },
    /// Emit the gap instance RREF(F,13n²) or RREF′(F,13n^{t+1}).
    Reduce {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        pad: Option<u32>,
        #[arg(short)]
        o: PathBuf,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        /// Accept clauses longer than 3.
        #[arg(long)]
        allow_general: bool,
    },
    /// Decide F by searching for a refutation of its gap instance.
    Decide {
        #[arg(long)]
        cnf: PathBuf,
        /// `witness` or `external:<command>`.
        #[arg(long, default_value = "witness")]
        searcher: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Use this length instead of 13n².
        #[arg(long)]
        length: Option<usize>,
        #[arg(long)]
        allow_general: bool,
    },
    /// Run the DPLL solver.
    Solve {
        #[arg(long)]
        cnf: PathBuf,
        /// Maximum number of decisions.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

struct Run {
    ok: bool,
    parameters: Value,
    outcome: Value,
    artifacts: Vec<PathBuf>,
}

impl Run {
    fn new(ok: bool, parameters: Value, outcome: Value) -> Self {
        Run { ok, parameters, outcome, artifacts: Vec::new() }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_cnf(path: &Path) -> Result<Cnf> {
    parse_dimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_proof(path: &Path) -> Result<Proof> {
    parse_trace(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Writes via a temporary file in the same directory and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(run: &mut Run, path: &Path, contents: &str) -> Result<()> {
    write_atomic(path, contents)?;
    run.artifacts.push(path.to_path_buf());
    Ok(())
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Accepted => json!({ "accepted": true }),
        Verdict::Rejected { line, reason } => json!({ "accepted": false, "line": line, "reason": reason.code() }),
    }
}

fn cmd_encode(kind: Kind, cnf: &Path, s: usize, indices: Option<&Path>, o: &Path, map: Option<&Path>, tags: Option<&Path>) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let variant = match kind {
        Kind::Ref => Variant::Ref,
        Kind::Rref => Variant::Rref,
        Kind::RrefPrime => Variant::RrefPrime,
    };
    let indices: Vec<usize> = match indices {
        Some(p) => read(p)?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| anyhow!("bad index `{t}` in {}", p.display())))
            .collect::<Result<_>>()?,
        None => (1..=s).collect(),
    };
    let g = encode(&f, &indices, s, variant)?;
    let mut run = Run::new(
        true,
        json!({ "variant": format!("{variant:?}"), "s": s, "indices": indices.len() }),
        json!({
            "num_vars": g.cnf.num_vars(),
            "num_clauses": g.len(),
            "max_index_width": g.max_index_width(),
        }),
    );
    emit(&mut run, o, &emit_dimacs(&g.cnf))?;
    if let Some(p) = map {
        emit(&mut run, p, &g.emit_map())?;
    }
    if let Some(p) = tags {
        emit(&mut run, p, &g.emit_tags())?;
    }
    Ok(run)
}

fn cmd_fulltree(cnf: &Path, o: &Path, proof: Option<&Path>) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let params = json!({ "n": f.num_vars(), "m": f.num_clauses() });
    match full_tree(&f) {
        FullTree::CounterModel(alpha) => {
            Ok(Run::new(false, params, json!({ "satisfiable": true, "model": write_model(&alpha) })))
        }
        FullTree::Refutation(st) => {
            let g = encode_ref(&f, st.s)?;
            let alpha = structure_to_assignment(&st, &f)?;
            let unsatisfied = g.cnf.clauses().iter().filter(|c| !alpha.satisfies(c)).count();
            let mut run = Run::new(unsatisfied == 0, params, json!({ "length": st.s, "unsatisfied_ref_clauses": unsatisfied }));
            emit(&mut run, o, &write_structure(&st))?;
            if let Some(p) = proof {
                emit(&mut run, p, &write_trace(&structure_to_proof(&st)))?;
            }
            Ok(run)
        }
    }
}

fn cmd_check_struct(cnf: &Path, structure: &Path) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let st = parse_structure(&read(structure)?).with_context(|| format!("parsing {}", structure.display()))?;
    let params = json!({ "s": st.s, "n": st.n, "m": st.m });
    Ok(match validate_structure(&f, &st)? {
        None => Run::new(true, params, json!({ "valid": true })),
        Some(v) => Run::new(false, params, json!({ "valid": false, "violation": v })),
    })
}

fn cmd_check_proof(cnf: &Path, proof: &Path, refutation: bool) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let p = read_proof(proof)?;
    let v = check_proof(&f, &p, refutation);
    let mut outcome = verdict_json(&v);
    outcome["length"] = json!(p.len());
    outcome["width"] = json!(proof_width(&p));
    Ok(Run::new(v.is_accepted(), json!({ "refutation": refutation }), outcome))
}

fn cmd_witness(cnf: &Path, model: &Path, s: usize, o: &Path, rref_prime: bool) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let alpha = parse_model(&read(model)?).with_context(|| format!("parsing {}", model.display()))?;
    let variant = if rref_prime { Variant::RrefPrime } else { Variant::Rref };
    let w = build_witness(&f, &alpha, s, variant)?;
    let (n, m) = (f.num_vars() as usize, f.num_clauses());
    let mut run = Run::new(
        true,
        json!({ "s": s, "variant": format!("{variant:?}") }),
        json!({
            "length": w.proof.len(),
            "resolvents": w.proof.resolvent_count(),
            "cut_count": cut_count(s, n, m),
            "a0_lines": w.a0_lines,
        }),
    );
    emit(&mut run, o, &write_trace(&w.proof))?;
    Ok(run)
}

fn cmd_restrict(cnf: &Path, t: usize, seed: u64, proof: Option<&Path>, w: usize, o: &Path) -> Result<Run> {
    if t == 0 {
        bail!("t must be at least 1");
    }
    let f = read_cnf(cnf)?;
    let rref = encode_rref(&f, t, true)?;
    let r = sample_restriction(f.num_vars() as usize, f.num_clauses(), t, seed);
    let class = classify_restricted_formula(&f, &rref, &r);
    fs::create_dir_all(o).with_context(|| format!("creating {}", o.display()))?;
    let mut outcome = json!({
        "active": r.active.len(),
        "p_t": r.last_active(),
        "classification": class,
    });
    // With P[t] = 0 the only expected casualty is (A24).
    let clean = if r.last_active() {
        class.falsified.is_empty() && class.matches_ref_reindexed
    } else {
        class.falsified.iter().all(|(_, fam)| *fam == Family::A24)
    };
    let mut run = Run::new(clean, json!({ "t": t, "seed": seed, "w": w }), Value::Null);
    emit(&mut run, &o.join("restriction.txt"), &write_restriction(&r))?;
    if let Some(p) = proof {
        let proof = read_proof(p)?;
        outcome["report"] = serde_json::to_value(restriction_report(&rref, &proof, &r, w))?;
        match restrict_and_reindex_proof(&f, &rref, &proof, &r) {
            Ok(out) => {
                let v = check_proof(&out.target.cnf, &out.proof, true);
                run.ok &= v.is_accepted();
                outcome["reindexed"] = json!({
                    "length": out.proof.len(),
                    "max_index_width": out.max_index_width,
                    "check": verdict_json(&v),
                });
                emit(&mut run, &o.join("ref.cnf"), &emit_dimacs(&out.target.cnf))?;
                emit(&mut run, &o.join("restricted.rtrace"), &write_trace(&out.proof))?;
            }
            Err(RestrictError::InactiveLast) => outcome["reindexed"] = Value::Null,
            Err(e) => {
                run.ok = false;
                outcome["reindexed"] = json!({ "error": e.to_string() });
            }
        }
    }
    run.outcome = outcome;
    Ok(run)
}

fn cmd_audit(cnf: &Path, s: usize, w: usize, proof: &Path, relaxed: bool) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let p = read_proof(proof)?;
    let ctx = if relaxed { BlockContext::relaxed(&f, s, w)? } else { BlockContext::new(&f, s, w)? };
    let params = json!({ "s": s, "w": w, "relaxed": relaxed, "k": ctx.k });
    Ok(match audit_refutation(&p, &ctx, AuditOptions::default()) {
        Ok(report) => Run::new(true, params, serde_json::to_value(report)?),
        Err(e) => Run::new(false, params, json!({ "error": e.to_string() })),
    })
}

fn cmd_claims(n: usize, w: usize, s: Option<usize>, trials: u64, seed: u64, cnf: Option<&Path>) -> Result<Run> {
    let f = match cnf {
        Some(p) => read_cnf(p)?,
        None => random_unsat(n, seed)?,
    };
    if f.num_vars() as usize != n {
        bail!("F has {} variables, expected {n}", f.num_vars());
    }
    let s = s.unwrap_or(6 * n * w);
    let ctx = BlockContext::new(&f, s, w)?;
    let report = run_claims(&ctx, trials, seed);
    for (name, t) in [
        ("preservation", &report.preservation),
        ("restriction", &report.restriction),
        ("extension", &report.extension),
        ("size-bound", &report.size_bound),
        ("monotone", &report.monotone),
        ("axioms", &report.axioms),
    ] {
        let verdict = if t.violations == 0 && t.checks > 0 { "PASS" } else { "FAIL" };
        eprintln!("{name:<14} {verdict} checks={} violations={}", t.checks, t.violations);
    }
    Ok(Run::new(report.passed(), json!({ "n": n, "w": w, "s": s, "trials": trials, "seed": seed }), serde_json::to_value(&report)?))
}

/// A random unsatisfiable 3-CNF drawn from the seeded stream.
fn random_unsat(n: usize, seed: u64) -> Result<Cnf> {
    if !(1..=16).contains(&n) {
        bail!("n must lie in 1..=16 when no --cnf is given");
    }
    Ok(random_unsat_3cnf(n as u32, &mut seeded(seed)))
}

fn gap_options(allow_general: bool, length: Option<usize>) -> GapOptions {
    GapOptions { allow_general, length }
}

fn cmd_reduce(cnf: &Path, pad: Option<u32>, o: &Path, map: Option<&Path>, params: Option<&Path>, tags: Option<&Path>, allow_general: bool) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let opts = gap_options(allow_general, None);
    let g = match pad {
        Some(t) => padded_gap_instance_with(&f, t, &opts)?,
        None => gap_instance_with(&f, &opts)?,
    };
    let p = serde_json::to_value(&g.params)?;
    let mut run = Run::new(true, json!({ "pad": pad, "allow_general": allow_general }), p.clone());
    emit(&mut run, o, &emit_dimacs(&g.encoded.cnf))?;
    if let Some(path) = map {
        emit(&mut run, path, &g.encoded.emit_map())?;
    }
    if let Some(path) = tags {
        emit(&mut run, path, &g.encoded.emit_tags())?;
    }
    if let Some(path) = params {
        emit(&mut run, path, &(serde_json::to_string_pretty(&p)? + "\n"))?;
    }
    Ok(run)
}

/// Runs `<command> <cnf> <trace> <budget>`; a nonzero exit is a timeout.
fn external_search(command: &str, g: &GapInstance, budget: u64) -> Result<Option<String>> {
    let mut words = command.split_whitespace();
    let program = words.next().ok_or_else(|| anyhow!("empty external searcher command"))?;
    let dir = tempfile::tempdir()?;
    let cnf = dir.path().join("instance.cnf");
    let trace = dir.path().join("proof.rtrace");
    fs::write(&cnf, emit_dimacs(&g.encoded.cnf))?;
    let status = Command::new(program)
        .args(words)
        .arg(&cnf)
        .arg(&trace)
        .arg(budget.to_string())
        .status()
        .with_context(|| format!("running {program}"))?;
    if !status.success() {
        return Ok(None);
    }
    Ok(Some(read(&trace)?))
}

fn cmd_decide(cnf: &Path, searcher: &str, budget: u64, length: Option<usize>, allow_general: bool) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let g = gap_instance_with(&f, &gap_options(allow_general, length))?;
    let params = json!({ "searcher": searcher, "budget": budget, "length": length });
    let report = if searcher == "witness" {
        decide_via_automatizer(&g, budget, witness_searcher)?
    } else if let Some(command) = searcher.strip_prefix("external:") {
        let text = external_search(command, &g, budget)?;
        let outcome = match text {
            None => SearchOutcome::Timeout,
            Some(t) => SearchOutcome::Refutation(parse_trace(&t).context("parsing the searcher's trace")?),
        };
        decide_via_automatizer(&g, budget, move |_, _| outcome.clone())?
    } else {
        bail!("unknown searcher `{searcher}`; expected `witness` or `external:<command>`");
    };
    let ok = report.decision == refgap::reduction::Decision::Satisfiable;
    Ok(Run::new(ok, params, serde_json::to_value(&report)?))
}

fn cmd_solve(cnf: &Path, budget: Option<u64>, model: Option<&Path>) -> Result<Run> {
    let f = read_cnf(cnf)?;
    let limits = Limits { max_decisions: budget };
    let params = json!({ "budget": budget });
    Ok(match solve(&f, limits) {
        Ok(SolveResult::Sat { model: alpha, stats }) => {
            let mut run = Run::new(true, params, json!({ "result": "sat", "stats": stats }));
            if let Some(p) = model {
                emit(&mut run, p, &write_model(&alpha))?;
            }
            run
        }
        Ok(SolveResult::Unsat { stats }) => Run::new(false, params, json!({ "result": "unsat", "stats": stats })),
        Err(e) => Run::new(false, params, json!({ "result": "unknown", "stats": e.stats })),
    })
}

fn name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Encode { .. } => "encode",
        Cmd::Fulltree { .. } => "fulltree",
        Cmd::CheckStruct { .. } => "check-struct",
        Cmd::CheckProof { .. } => "check-proof",
        Cmd::Witness { .. } => "witness",
        Cmd::Restrict { .. } => "restrict",
        Cmd::Audit { .. } => "audit",
        Cmd::Claims { .. } => "claims",
        Cmd::Reduce { .. } => "reduce",
        Cmd::Decide { .. } => "decide",
        Cmd::Solve { .. } => "solve",
    }
}

fn dispatch(cmd: &Cmd) -> Result<Run> {
    match cmd {
        Cmd::Encode { kind, cnf, s, indices, o, map, tags } => {
            cmd_encode(*kind, cnf, *s, indices.as_deref(), o, map.as_deref(), tags.as_deref())
        }
        Cmd::Fulltree { cnf, o, proof } => cmd_fulltree(cnf, o, proof.as_deref()),
        Cmd::CheckStruct { cnf, structure } => cmd_check_struct(cnf, structure),
        Cmd::CheckProof { cnf, proof, refutation } => cmd_check_proof(cnf, proof, *refutation),
        Cmd::Witness { cnf, model, s, o, rref_prime } => cmd_witness(cnf, model, *s, o, *rref_prime),
        Cmd::Restrict { cnf, t, seed, proof, w, o } => cmd_restrict(cnf, *t, *seed, proof.as_deref(), *w, o),
        Cmd::Audit { cnf, s, w, proof, relaxed } => cmd_audit(cnf, *s, *w, proof, *relaxed),
        Cmd::Claims { n, w, s, trials, seed, cnf } => cmd_claims(*n, *w, *s, *trials, *seed, cnf.as_deref()),
        Cmd::Reduce { cnf, pad, o, map, params, tags, allow_general } => {
            cmd_reduce(cnf, *pad, o, map.as_deref(), params.as_deref(), tags.as_deref(), *allow_general)
        }
        Cmd::Decide { cnf, searcher, budget, length, allow_general } => {
            cmd_decide(cnf, searcher, *budget, *length, *allow_general)
        }
        Cmd::Solve { cnf, budget, model } => cmd_solve(cnf, *budget, model.as_deref()),
    }
}

fn run(cli: &Cli) -> Result<u8> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global()?;
    }
    let start = Instant::now();
    let sub = name(&cli.cmd);
    let (code, report) = match dispatch(&cli.cmd) {
        Ok(r) => (
            if r.ok { 0 } else { 1 },
            json!({
                "schema": 1,
                "subcommand": sub,
                "parameters": r.parameters,
                "ok": r.ok,
                "outcome": r.outcome,
                "timings": { "elapsed_ms": start.elapsed().as_millis() as u64 },
                "artifacts": r.artifacts,
            }),
        ),
        Err(e) => {
            eprintln!("error: {e:#}");
            (
                2,
                json!({
                    "schema": 1,
                    "subcommand": sub,
                    "ok": false,
                    "error": format!("{e:#}"),
                    "timings": { "elapsed_ms": start.elapsed().as_millis() as u64 },
                }),
            )
        }
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &cli.report {
        Some(p) => write_atomic(p, &text)?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| run(&cli))) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(3),
    }
}
