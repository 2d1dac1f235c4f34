use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use lawvere::backend::Backend;
use lawvere::catalogue::resolve;
use lawvere::dsl::{parse_term, print_presentation};
use lawvere::kronecker::{
    check_bilinear_axioms, is_commutative_theory, kronecker, BilinearWitness, CommutativityVerdict,
};
use lawvere::kzero::{assembly_pi0, aut_group, k0, k0_pushforward, K0Options};
use lawvere::linearization::{
    detect_trivial_ring, group_ring, leavitt_presentation, linearize, verify_rank_iso, TrivialRingVerdict,
};
use lawvere::models::{abelian_group_objects, count_models, count_up_to_iso, enumerate_models};
use lawvere::multicat::check_coherence;
use lawvere::rewrite::{check_local_confluence, CompletionBounds};
use lawvere::theory::{compose, hom_enumerate, FMor, Family, Theory, TheoryMorphism};
use lawvere::{Error, Term};

#[derive(Parser, Debug)]
#[command(
    name = "lawvere",
    version,
    about = "Finitely presented Lawvere theories: free models, Kronecker products, finite models and K0"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// Emit a JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for iso searches.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Rewrite step budget for rewriting backends.
    #[arg(long, global = true)]
    trs_budget: Option<usize>,
    /// Rule limit for completion of `.thy` presentations.
    #[arg(long, global = true)]
    kb_max_rules: Option<usize>,
    /// Term size limit for completion of `.thy` presentations.
    #[arg(long, global = true)]
    kb_max_term_size: Option<usize>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", content = "inputs", rename_all = "kebab-case")]
enum Command {
    /// Show a presentation and its decision procedure.
    Theory { theory: String },
    /// Normal form of a term.
    Normalize {
        theory: String,
        term: String,
        /// Number of variables in context (default: largest variable index).
        #[arg(long)]
        context: Option<usize>,
    },
    /// Morphisms T_m → T_n.
    Hom {
        theory: String,
        m: usize,
        n: usize,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// `G ∘ F`, morphisms written `(t1, …, tm) : Tm -> Tn`.
    Compose { theory: String, f: String, g: String },
    /// Kronecker product S ⊗ T.
    Kron {
        left: String,
        right: String,
        #[arg(long)]
        check_bilinear: bool,
        #[command(flatten)]
        bilinear: BilinearArgs,
    },
    /// Finite models on a carrier of the given size.
    Models {
        theory: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        up_to_iso: bool,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
    /// Abelian group objects in the finite models of a theory.
    AbelianObjects {
        theory: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
    /// The linearization Z ⊗ T.
    Linearize { theory: String },
    /// Search for a derivation of x1 = 0 in Z ⊗ T.
    TrivialRing {
        theory: String,
        #[arg(long, default_value_t = lawvere::linearization::DEFAULT_TRIVIAL_BUDGET)]
        budget: usize,
    },
    /// The Leavitt algebra L_a.
    Leavitt {
        a: usize,
        #[arg(long)]
        verify_rank_iso: bool,
    },
    /// K0 with a certificate.
    K0 {
        theory: String,
        #[command(flatten)]
        bounds: K0Args,
    },
    /// The assembly map K0(Ab) ⊗ K0(T) → K0(Z ⊗ T).
    Assembly {
        theory: String,
        #[command(flatten)]
        bounds: K0Args,
    },
    /// The map on K0 induced by a theory morphism given as JSON.
    Pushforward {
        morphism: String,
        #[command(flatten)]
        bounds: K0Args,
    },
    /// Automorphism group of T_n.
    Aut {
        theory: String,
        n: usize,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Whether all operations commute with each other.
    Commutative {
        theory: String,
        #[arg(long, default_value_t = 6)]
        model_bound: usize,
    },
    /// Bilinear functor axioms for F_S × F_T → F_{S⊗T}.
    CheckBilinear {
        left: String,
        right: String,
        #[command(flatten)]
        bilinear: BilinearArgs,
    },
    /// Unit, symmetry and associativity diagrams within an arity window.
    CheckCoherence {
        #[arg(num_args = 1..=3, required = true)]
        theories: Vec<String>,
        #[arg(long, default_value_t = 2)]
        cap: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Args, Debug, Serialize)]
struct BilinearArgs {
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    arity_bound: usize,
}

#[derive(Args, Debug, Serialize)]
struct K0Args {
    #[arg(long, default_value_t = 6)]
    term_bound: usize,
    #[arg(long, default_value_t = 6)]
    arity_bound: usize,
    #[arg(long, default_value_t = 4)]
    model_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Status {
    Ok,
    CheckFailed,
    Inconclusive,
    UsageError,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::Inconclusive => 2,
            Status::UsageError => 3,
        }
    }

    fn of_error(e: &Error) -> Status {
        match e {
            Error::CheckFailed(_) => Status::CheckFailed,
            Error::BudgetExhausted(_)
            | Error::CompletionBound(_)
            | Error::CapExceeded(_)
            | Error::Undecidable(_)
            | Error::InfiniteHomSet
            | Error::Inconclusive(_) => Status::Inconclusive,
            _ => Status::UsageError,
        }
    }
}

struct Outcome {
    status: Status,
    results: Value,
    certificates: Option<Value>,
    text: String,
}

impl Outcome {
    fn new(status: Status, results: Value, text: impl Into<String>) -> Self {
        Outcome { status, results, certificates: None, text: text.into() }
    }

    fn certified(mut self, certificates: Value) -> Self {
        self.certificates = Some(certificates);
        self
    }
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    #[serde(flatten)]
    command: &'a Command,
    seed: u64,
    status: Status,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificates: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

type Res<T> = std::result::Result<T, Error>;

struct Ctx<'a> {
    global: &'a Global,
}

impl Ctx<'_> {
    fn theory(&self, name: &str) -> Res<Theory> {
        let mut bounds = CompletionBounds::default();
        if let Some(r) = self.global.kb_max_rules {
            bounds.max_rules = r;
        }
        if let Some(s) = self.global.kb_max_term_size {
            bounds.max_term_size = s;
        }
        if let Some(b) = self.global.trs_budget {
            bounds.step_budget = b;
        }
        let t = resolve(name, bounds)?;
        Ok(match self.global.trs_budget {
            Some(b) => t.with_step_budget(b),
            None => t,
        })
    }

    fn k0_options(&self, a: &K0Args) -> K0Options {
        K0Options {
            term_bound: a.term_bound,
            arity_bound: a.arity_bound,
            model_cap: a.model_cap,
            jobs: self.global.jobs.max(1),
            ..K0Options::default()
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let (mut depth, mut start, mut out) = (0i32, 0, Vec::new());
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

/// Parses `(t1, …, tm) : Tm -> Tn`.
fn parse_fmor(theory: &Theory, src: &str) -> Res<FMor> {
    let bad = || Error::Invalid(format!("expected `(t1, …) : Tm -> Tn`, got `{src}`"));
    let (comps, arrow) = src.rsplit_once(':').ok_or_else(bad)?;
    let (m, n) = arrow.split_once("->").ok_or_else(bad)?;
    let obj = |s: &str| s.trim().strip_prefix('T').and_then(|k| k.parse::<usize>().ok()).ok_or_else(bad);
    let (m, n) = (obj(m)?, obj(n)?);
    let inner = comps.trim().strip_prefix('(').and_then(|c| c.strip_suffix(')')).ok_or_else(bad)?;
    let terms = split_top(inner).into_iter().map(parse_term).collect::<Res<Vec<Term>>>()?;
    FMor::new(theory, m, n, terms)
}

#[derive(Deserialize)]
struct MorphismFile {
    source: String,
    target: String,
    #[serde(default)]
    assignment: BTreeMap<String, String>,
}

fn run(ctx: &Ctx, command: &Command) -> Res<Outcome> {
    Ok(match command {
        Command::Theory { theory } => {
            let th = ctx.theory(theory)?;
            let completion = match th.backend() {
                Backend::Trs(rs) => {
                    let c = check_local_confluence(rs)?;
                    let status = if c.locally_confluent() { "complete" } else { "not-confluent" };
                    Some(json!({
                        "status": status,
                        "rules": rs.rules().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                        "critical_pairs": c.critical_pairs,
                    }))
                }
                _ => None,
            };
            let text = format!("{}backend: {}\n", print_presentation(th.presentation()), th.backend().kind());
            let status = if th.backend().is_decided() { Status::Ok } else { Status::Inconclusive };
            Outcome::new(
                status,
                json!({
                    "presentation": th.presentation(),
                    "backend": th.backend().kind(),
                    "completion": completion,
                }),
                text,
            )
        }
        Command::Normalize { theory, term, context } => {
            let th = ctx.theory(theory)?;
            let t = parse_term(term)?;
            let n = context.unwrap_or_else(|| t.max_var());
            let nf = th.normalize(&t, n)?;
            Outcome::new(Status::Ok, json!({ "term": t, "context": n, "normal_form": nf }), nf.to_string())
        }
        Command::Hom { theory, m, n, bound, cap, count_only } => {
            let th = ctx.theory(theory)?;
            let homs = hom_enumerate(&th, *m, *n, *bound, *cap)?;
            let mut text = format!("{} morphisms T{m} -> T{n}\n", homs.len());
            if !count_only {
                for f in &homs {
                    text.push_str(&format!("{f}\n"));
                }
            }
            let listed = if *count_only { Value::Null } else { to_value(&homs) };
            Outcome::new(Status::Ok, json!({ "count": homs.len(), "morphisms": listed }), text)
        }
        Command::Compose { theory, f, g } => {
            let th = ctx.theory(theory)?;
            let (f, g) = (parse_fmor(&th, f)?, parse_fmor(&th, g)?);
            let h = compose(&g, &f)?;
            Outcome::new(Status::Ok, to_value(&h), h.to_string())
        }
        Command::Kron { left, right, check_bilinear, bilinear } => {
            let kt = kronecker(&ctx.theory(left)?, &ctx.theory(right)?)?;
            let th = &kt.combined;
            let mut text = format!("{}backend: {}\n", print_presentation(th.presentation()), th.backend().kind());
            let mut status = Status::Ok;
            let mut report = Value::Null;
            if *check_bilinear {
                let r = check_bilinear_axioms(
                    &BilinearWitness::new(kt.clone()),
                    bilinear.samples,
                    bilinear.arity_bound,
                    ctx.global.seed,
                )?;
                text.push_str(&bilinear_text(&r));
                if !r.passed() {
                    status = Status::CheckFailed;
                }
                report = to_value(&r);
            }
            Outcome::new(
                status,
                json!({
                    "presentation": th.presentation(),
                    "backend": th.backend().kind(),
                    "commutations": kt.commutations,
                    "bilinear": report,
                }),
                text,
            )
        }
        Command::CheckBilinear { left, right, bilinear } => {
            let kt = kronecker(&ctx.theory(left)?, &ctx.theory(right)?)?;
            let r = check_bilinear_axioms(
                &BilinearWitness::new(kt),
                bilinear.samples,
                bilinear.arity_bound,
                ctx.global.seed,
            )?;
            let status = if r.passed() { Status::Ok } else { Status::CheckFailed };
            Outcome::new(status, to_value(&r), bilinear_text(&r))
        }
        Command::Models { theory, size, count_only, up_to_iso, cap } => {
            let th = ctx.theory(theory)?;
            if *up_to_iso {
                let c = count_up_to_iso(&th, *size)?;
                Outcome::new(
                    Status::Ok,
                    json!({ "size": size, "up_to_iso": c }),
                    format!("{c} models up to isomorphism"),
                )
            } else if *count_only {
                let c = count_models(&th, *size)?;
                Outcome::new(Status::Ok, json!({ "size": size, "count": c }), format!("{c} models"))
            } else {
                let ms = enumerate_models(&th, *size, *cap)?;
                let mut text = format!("{} models\n", ms.len());
                for m in &ms {
                    text.push_str(&format!("{}\n", serde_json::to_string(&m.tables).expect("tables serialize")));
                }
                Outcome::new(Status::Ok, json!({ "size": size, "count": ms.len(), "models": ms }), text)
            }
        }
        Command::AbelianObjects { theory, size, cap } => {
            let th = ctx.theory(theory)?;
            let ws = abelian_group_objects(&th, *size, *cap)?;
            Outcome::new(
                Status::Ok,
                json!({ "size": size, "count": ws.len(), "objects": ws }),
                format!("{} abelian group objects on {size} elements", ws.len()),
            )
        }
        Command::Linearize { theory } => {
            let th = ctx.theory(theory)?;
            let lin = linearize(&th)?;
            let combined = &lin.kronecker.combined;
            let ring = match th.family() {
                Family::GSets(g) => Some(group_ring(g).render()),
                Family::Cantor(a) => Some(leavitt_presentation(*a)?.render()),
                _ => None,
            };
            let mut text =
                format!("{}backend: {}\n", print_presentation(combined.presentation()), combined.backend().kind());
            if let Some(r) = &ring {
                text.push_str(&format!("ring: {}\n", r.join("; ")));
            }
            Outcome::new(
                Status::Ok,
                json!({
                    "presentation": combined.presentation(),
                    "backend": combined.backend().kind(),
                    "ring_relations": ring,
                }),
                text,
            )
        }
        Command::TrivialRing { theory, budget } => {
            let th = ctx.theory(theory)?;
            let (lin, verdict) = detect_trivial_ring(&th, *budget)?;
            match &verdict {
                TrivialRingVerdict::Trivial { derivation, .. } => {
                    let replayed =
                        derivation.replay(lin.kronecker.combined.presentation(), &th, &lin.kronecker.prefixes.1)?;
                    let mut text = format!("Z ⊗ {} is trivial\n  {}\n", th.name(), derivation.start);
                    for s in &derivation.steps {
                        text.push_str(&format!("= {}\n", s.result));
                    }
                    text.push_str(&format!("replay: {}\n", if replayed { "ok" } else { "FAILED" }));
                    let status = if replayed { Status::Ok } else { Status::CheckFailed };
                    Outcome::new(status, json!({ "verdict": verdict, "replayed": replayed }), text)
                }
                TrivialRingVerdict::NotShownTrivial { reason, .. } => Outcome::new(
                    Status::Inconclusive,
                    json!({ "verdict": verdict }),
                    format!("not shown trivial: {reason}"),
                ),
            }
        }
        Command::Leavitt { a, verify_rank_iso: verify } => {
            let p = leavitt_presentation(*a)?;
            let relations = p.render();
            let mut text = format!("L{a} on {}\n", p.generators.join(", "));
            for r in &relations {
                text.push_str(&format!("  {r}\n"));
            }
            let proof = if *verify {
                let proof = verify_rank_iso(*a)?;
                text.push_str(&format!("R·C = {}\nC·R = identity matrix: verified\n", proof.row_times_column));
                Some(proof)
            } else {
                None
            };
            Outcome::new(
                Status::Ok,
                json!({ "a": a, "generators": p.generators, "relations": relations, "rank_iso": proof }),
                text,
            )
        }
        Command::K0 { theory, bounds } => {
            let th = ctx.theory(theory)?;
            let cert = k0(&th, &ctx.k0_options(bounds))?;
            let (status, text) = match cert.group {
                Some(g) => (Status::Ok, format!("K0({}) = {g}\n{}", th.name(), cert.note)),
                None => (Status::Inconclusive, format!("K0({}) inconclusive: {}", th.name(), cert.note)),
            };
            let results = json!({ "group": cert.group, "generator": cert.generator, "note": cert.note });
            Outcome::new(status, results, text).certified(to_value(&cert))
        }
        Command::Assembly { theory, bounds } => {
            let th = ctx.theory(theory)?;
            let r = assembly_pi0(&th, &ctx.k0_options(bounds))?;
            let text = format!("assembly for {}: {} → {} ({:?})", th.name(), r.map.source, r.map.target, r.map.kind);
            Outcome::new(Status::Ok, to_value(&r.map), text)
                .certified(json!({ "theory": r.theory, "linearization": r.linearization }))
        }
        Command::Pushforward { morphism, bounds } => {
            let src = std::fs::read_to_string(morphism).map_err(|e| Error::Invalid(format!("{morphism}: {e}")))?;
            let file: MorphismFile =
                serde_json::from_str(&src).map_err(|e| Error::Invalid(format!("{morphism}: {e}")))?;
            let (s, t) = (ctx.theory(&file.source)?, ctx.theory(&file.target)?);
            let assignment = file
                .assignment
                .iter()
                .map(|(k, v)| Ok((k.clone(), parse_term(v)?)))
                .collect::<Res<BTreeMap<_, _>>>()?;
            let l = TheoryMorphism::new(&s, &t, assignment)?;
            let verdict = lawvere::theory::check_theory_morphism(&l)?;
            if !verdict.valid {
                return Err(Error::CheckFailed(format!(
                    "not a theory morphism: {} fails",
                    verdict.violated.map(|e| e.to_string()).unwrap_or_default()
                )));
            }
            let p = k0_pushforward(&l, &ctx.k0_options(bounds))?;
            let text = format!(
                "K0({}) = {} → K0({}) = {} ({:?}, surjective)",
                s.name(),
                p.map.source,
                t.name(),
                p.map.target,
                p.map.kind
            );
            Outcome::new(Status::Ok, to_value(&p.map), text).certified(
                json!({ "source": p.source, "target": p.target, "witness_transported": p.witness_transported }),
            )
        }
        Command::Aut { theory, n, bound, cap } => {
            let th = ctx.theory(theory)?;
            let g = aut_group(&th, *n, Some(*bound), *cap)?;
            let mut text = format!("Aut(T{n}) in {} has order {}\n", th.name(), g.order());
            for f in &g.elements {
                text.push_str(&format!("  {f}\n"));
            }
            Outcome::new(Status::Ok, to_value(&g), text)
        }
        Command::Commutative { theory, model_bound } => {
            let th = ctx.theory(theory)?;
            let v = is_commutative_theory(&th, *model_bound)?;
            let (status, text) = match &v {
                CommutativityVerdict::Commutative { .. } => (Status::Ok, format!("{} is commutative", th.name())),
                CommutativityVerdict::NonCommutative { witness, equation, .. } => (
                    Status::Ok,
                    format!("{} is not commutative: {equation} fails in a model of size {}", th.name(), witness.size),
                ),
                CommutativityVerdict::Inconclusive { reason } => {
                    (Status::Inconclusive, format!("inconclusive: {reason}"))
                }
            };
            Outcome::new(status, to_value(&v), text)
        }
        Command::CheckCoherence { theories, cap, samples } => {
            let ths = theories.iter().map(|t| ctx.theory(t)).collect::<Res<Vec<_>>>()?;
            let r = check_coherence(&ths, *cap, *samples, ctx.global.seed)?;
            let mut text = String::new();
            for d in &r.diagrams {
                text.push_str(&format!(
                    "{:<18} {:<24} checked {:>6} ({} exhaustive, {} sampled)  failures {}\n",
                    d.diagram,
                    d.theories.join(","),
                    d.checked,
                    d.exhaustive,
                    d.sampled,
                    d.failures
                ));
            }
            let status = if r.passed() { Status::Ok } else { Status::CheckFailed };
            Outcome::new(status, to_value(&r), text)
        }
    })
}

fn bilinear_text(r: &lawvere::kronecker::BilinearReport) -> String {
    format!(
        "pairs checked {}: square failures {}, delta failures {}, monoidality failures {}\n",
        r.pairs_checked, r.square_failures, r.delta_failures, r.monoidality_failures
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::UsageError.code() } else { 0 });
        }
    };
    let ctx = Ctx { global: &cli.global };
    let start = Instant::now();
    let outcome = run(&ctx, &cli.command).unwrap_or_else(|e| {
        Outcome::new(Status::of_error(&e), json!({ "error": e.to_string() }), format!("error: {e}"))
    });
    let Outcome { status, results, certificates, text } = outcome;
    let timing_ms = cli.global.timing.then(|| start.elapsed().as_millis());
    if cli.global.json {
        let report = Report {
            tool: "lawvere",
            version: env!("CARGO_PKG_VERSION"),
            command: &cli.command,
            seed: cli.global.seed,
            status,
            results,
            certificates,
            timing_ms,
        };
        let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else if status == Status::Ok {
        let _ = writeln!(std::io::stdout(), "{}", text.trim_end());
    } else {
        eprintln!("{}", text.trim_end());
    }
    if !cli.global.json {
        if let Some(ms) = timing_ms {
            eprintln!("time: {ms} ms");
        }
    }
    ExitCode::from(status.code())
}
