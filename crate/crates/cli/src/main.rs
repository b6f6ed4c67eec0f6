use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use unital_core::catalog::{self, Document, Entry};
use unital_core::design::{
    build_affine_unital, close, flat_parallelism, natural_parallelism, partition_report, verify_affine_unital,
    verify_design, AffineUnital, ClosedUnital, Parallelism, ParallelismKind,
};
use unital_core::hatsearch::{self, SearchConfig};
use unital_core::morphisms::{are_isomorphic_affine, closures_isomorphic, stabilizer_of_identity};
use unital_core::onan::{count_onan_through, find_onan};

#[derive(Parser)]
#[command(name = "unital", version, about = "Affine SL(2,q)-unitals: verification, automorphisms, O'Nan configurations, closures and hat search")]
struct Cli {
    /// Field order
    #[arg(long, global = true, default_value_t = 8)]
    q: u32,
    /// Reduction polynomial as an integer bit pattern
    #[arg(long, global = true, default_value_t = 11)]
    modulus: u32,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Time budget for searches, in seconds
    #[arg(long, global = true)]
    budget_sec: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pi {
    Flat,
    Natural,
}

impl From<Pi> for ParallelismKind {
    fn from(p: Pi) -> Self {
        match p {
            Pi::Flat => ParallelismKind::Flat,
            Pi::Natural => ParallelismKind::Natural,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check (Q), (P) and (AU1)-(AU5); for files with a closure line also the 2-design axioms
    Verify { source: String },
    /// Stabilizer of the identity and full automorphism group order
    Aut { source: String },
    /// Isomorphism test of two affine unitals or of their closures
    Iso {
        a: String,
        b: String,
        /// Compare the closures U_a^P1 and U_b^P2
        #[arg(long, num_args = 2, value_names = ["P1", "P2"])]
        closed: Option<Vec<Pi>>,
    },
    /// Search for O'Nan configurations
    Onan {
        source: String,
        /// Count configurations through the point with field codes a,b,c,d
        #[arg(long, value_name = "a,b,c,d")]
        count_through: Option<String>,
        /// Enumeration step budget for counting
        #[arg(long)]
        budget: Option<u64>,
        /// Exit 1 when no configuration exists
        #[arg(long)]
        expect_found: bool,
    },
    /// Write the closure with respect to a parallelism
    Close { source: String, parallelism: Pi, out: PathBuf },
    /// Run a hat-system search from a TOML configuration
    Search {
        config: PathBuf,
        /// Directory for result files and the manifest
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a catalog entry in the unital v1 format
    Export { name: String, out: PathBuf },
}

enum Failure {
    /// axiom, isomorphism or expectation failed
    Semantic(String),
    Input(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Semantic(m) | Failure::Input(m) | Failure::Budget(m) => m,
        }
    }
}

fn input(e: impl Display) -> Failure {
    Failure::Input(e.to_string())
}

struct Out {
    machine: bool,
}

impl Out {
    fn human(&self, line: impl Display) {
        if !self.machine {
            println!("{line}");
        }
    }

    fn kv(&self, key: &str, value: impl Display) {
        if self.machine {
            println!("@{key} {value}");
        }
    }
}

struct Ctx {
    q: u32,
    modulus: u32,
    threads: usize,
    budget_sec: Option<f64>,
    out: Out,
}

impl Ctx {
    fn load(&self, source: &str) -> Result<Document, Failure> {
        let doc = match Entry::parse(source) {
            Ok(entry) => Document { system: catalog::load(entry).map_err(input)?, closure: None },
            Err(_) => {
                let path = Path::new(source);
                if !path.exists() {
                    return Err(Failure::Input(format!("{source}: not a catalog name (classical8, wu, ou, pu) or a file")));
                }
                let text = std::fs::read_to_string(path).map_err(|e| input(format!("{source}: {e}")))?;
                catalog::parse_document(&text).map_err(|e| input(format!("{source}: {e}")))?
            }
        };
        let field = doc.system.group().field();
        if field.order() as u32 != self.q || field.modulus() != self.modulus {
            return Err(Failure::Input(format!(
                "{source} is over GF({}) with modulus {}, expected q = {} and modulus {}",
                field.order(),
                field.modulus(),
                self.q,
                self.modulus
            )));
        }
        Ok(doc)
    }

    fn unital(&self, source: &str) -> Result<(AffineUnital, Option<ParallelismKind>), Failure> {
        let doc = self.load(source)?;
        let unital = build_affine_unital(&doc.system).map_err(|e| Failure::Semantic(format!("{source}: {e}")))?;
        Ok((unital, doc.closure))
    }
}

fn parallelism(unital: &AffineUnital, kind: ParallelismKind) -> Parallelism {
    match kind {
        ParallelismKind::Natural => natural_parallelism(unital),
        _ => flat_parallelism(unital),
    }
}

fn closed(unital: &AffineUnital, kind: ParallelismKind) -> Result<ClosedUnital, Failure> {
    close(unital, &parallelism(unital, kind)).map_err(|e| Failure::Semantic(e.to_string()))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn verify(ctx: &Ctx, source: &str) -> Result<(), Failure> {
    let out = &ctx.out;
    let doc = ctx.load(source)?;
    let system = &doc.system;
    let counts = match partition_report(system) {
        Ok(c) => c,
        Err(e) => {
            out.kv("result", "fail");
            return Err(Failure::Semantic(format!("{source}: {e}")));
        }
    };
    out.human(format!("(Q) holds for all {} bases", system.bases().len()));
    out.human(format!(
        "(P) {} + {} + {} = {}",
        counts.subgroup,
        counts.sylow,
        counts.quotients,
        counts.total()
    ));
    out.kv("Q", "pass");
    out.kv("P", "pass");
    out.kv("partition", counts.total());
    let unital = build_affine_unital(system).map_err(|e| Failure::Semantic(e.to_string()))?;
    let short = unital.short_blocks().count();
    out.human(format!(
        "{} points, {} blocks ({} short, {} long)",
        unital.n_points(),
        unital.n_blocks(),
        short,
        unital.n_blocks() - short
    ));
    out.kv("points", unital.n_points());
    out.kv("blocks", unital.n_blocks());
    out.kv("short", short);
    out.kv("long", unital.n_blocks() - short);
    let report = verify_affine_unital(&unital);
    for c in &report.checks {
        out.human(format!("{} {}: {}", pass(c.passed), c.name, c.detail));
        out.kv(c.name, pass(c.passed));
    }
    if let Some(c) = report.first_failure() {
        out.kv("result", "fail");
        return Err(Failure::Semantic(format!("{source}: {} fails: {}", c.name, c.detail)));
    }
    if let Some(kind) = doc.closure {
        let closure = closed(&unital, kind)?;
        let report = verify_design(&closure);
        out.human(format!(
            "closure ({kind}): {} points, {} blocks",
            closure.incidence().n_points(),
            closure.incidence().n_blocks()
        ));
        out.kv("closure", kind);
        out.kv("closure-points", closure.incidence().n_points());
        out.kv("closure-blocks", closure.incidence().n_blocks());
        for c in &report.checks {
            out.human(format!("{} {}: {}", pass(c.passed), c.name, c.detail));
            out.kv(&format!("design-{}", c.name.replace(' ', "-")), pass(c.passed));
        }
        if let Some(c) = report.first_failure() {
            out.kv("result", "fail");
            return Err(Failure::Semantic(format!("{source}: closure {} fails: {}", c.name, c.detail)));
        }
    }
    out.kv("result", "pass");
    Ok(())
}

fn aut(ctx: &Ctx, source: &str) -> Result<(), Failure> {
    let (unital, _) = ctx.unital(source)?;
    let stab = stabilizer_of_identity(&unital);
    let out = &ctx.out;
    out.human(format!(
        "stabilizer {} ({}), full {}, index {}",
        stab.order(),
        stab.description.label,
        stab.full_order(),
        stab.index()
    ));
    out.kv("stabilizer", stab.order());
    out.kv("label", &stab.description.label);
    out.kv("full", stab.full_order());
    out.kv("index", stab.index());
    Ok(())
}

fn iso(ctx: &Ctx, a: &str, b: &str, closed: Option<&[Pi]>) -> Result<(), Failure> {
    let (ua, _) = ctx.unital(a)?;
    let (ub, _) = ctx.unital(b)?;
    let out = &ctx.out;
    let witness = match closed {
        None => are_isomorphic_affine(&ua, &ub),
        Some(pis) => {
            let (pa, pb) = (parallelism(&ua, pis[0].into()), parallelism(&ub, pis[1].into()));
            closures_isomorphic(&ua, &pa, &ub, &pb).map_err(input)?
        }
    };
    match witness {
        Some(psi) => {
            out.human(format!("isomorphic, witness {psi}"));
            out.kv("isomorphic", true);
            out.kv("witness", psi);
            Ok(())
        }
        None => {
            out.human("not isomorphic");
            out.kv("isomorphic", false);
            Err(Failure::Semantic("not isomorphic".into()))
        }
    }
}

fn onan(ctx: &Ctx, source: &str, through: Option<&str>, budget: Option<u64>, expect_found: bool) -> Result<(), Failure> {
    let (unital, closure) = ctx.unital(source)?;
    let closed_unital = closure.map(|k| closed(&unital, k)).transpose()?;
    let inc = match &closed_unital {
        Some(c) => c.incidence(),
        None => unital.incidence(),
    };
    let group = unital.group();
    let out = &ctx.out;
    if let Some(spec) = through {
        let codes: Vec<u32> = spec.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().map_err(input)?;
        let codes: [u32; 4] = codes.try_into().map_err(|_| input("--count-through expects a,b,c,d"))?;
        let p = group.index_of(&group.element_from_codes(codes).map_err(input)?);
        let count = count_onan_through(inc, p, budget);
        out.human(format!(
            "{} configurations through {} ({} steps{})",
            count.count,
            group.element(p),
            count.steps,
            if count.complete { "" } else { ", budget exhausted, partial" }
        ));
        out.kv("count", count.count);
        out.kv("complete", count.complete);
        if !count.complete {
            return Err(Failure::Budget("budget exhausted before the count finished".into()));
        }
        if expect_found && count.count == 0 {
            return Err(Failure::Semantic("none found".into()));
        }
        return Ok(());
    }
    match find_onan(inc) {
        Some(cfg) => {
            let name = |p: u32| {
                if (p as usize) < unital.n_points() {
                    group.element(p).to_string()
                } else {
                    format!("ideal{}", p as usize - unital.n_points())
                }
            };
            let points: Vec<String> = cfg.points.iter().map(|&p| name(p)).collect();
            out.human(format!("found: blocks {:?}, points {}", cfg.blocks, points.join(" ")));
            out.kv("found", true);
            out.kv("blocks", format!("{:?}", cfg.blocks));
            Ok(())
        }
        None => {
            out.human("none found");
            out.kv("found", false);
            if expect_found {
                Err(Failure::Semantic("none found".into()))
            } else {
                Ok(())
            }
        }
    }
}

fn close_cmd(ctx: &Ctx, source: &str, pi: Pi, path: &Path) -> Result<(), Failure> {
    let doc = ctx.load(source)?;
    let unital = build_affine_unital(&doc.system).map_err(|e| Failure::Semantic(e.to_string()))?;
    let kind: ParallelismKind = pi.into();
    let closure = closed(&unital, kind)?;
    let report = verify_design(&closure);
    if let Some(c) = report.first_failure() {
        return Err(Failure::Semantic(format!("closure {} fails: {}", c.name, c.detail)));
    }
    let text = catalog::serialize_document(&Document { system: doc.system, closure: Some(kind) });
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    ctx.out.human(format!(
        "wrote {} ({kind} closure: {} points, {} blocks)",
        path.display(),
        closure.incidence().n_points(),
        closure.incidence().n_blocks()
    ));
    ctx.out.kv("written", path.display());
    Ok(())
}

fn search(ctx: &Ctx, path: &Path, out_dir: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let mut config = SearchConfig::from_toml(&text).map_err(input)?;
    if ctx.threads > 1 {
        config.threads = ctx.threads;
    }
    if let Some(b) = ctx.budget_sec {
        config.time_budget_sec = Some(b);
    }
    if config.q != ctx.q {
        return Err(Failure::Input(format!("config q = {} but --q = {}", config.q, ctx.q)));
    }
    let outcome = hatsearch::search(&config).map_err(input)?;
    let out = &ctx.out;
    for (i, system) in outcome.systems.iter().enumerate() {
        let label = Entry::ALL
            .into_iter()
            .find(|&e| {
                let known = catalog::load(e).ok().and_then(|s| build_affine_unital(&s).ok());
                let found = build_affine_unital(system).ok();
                matches!((known, found), (Some(k), Some(f)) if are_isomorphic_affine(&f, &k).is_some())
            })
            .map_or("new".to_string(), |e| e.to_string());
        out.human(format!("system {}: {label}", i + 1));
    }
    out.human(format!(
        "{} systems from {} candidates, {} rows, {} covers in {} ms{}",
        outcome.systems.len(),
        outcome.candidates,
        outcome.rows,
        outcome.cover_solutions,
        outcome.elapsed.as_millis(),
        if outcome.complete { "" } else { " (partial)" }
    ));
    if ctx.out.machine {
        print!("{}", hatsearch::manifest(&config, &outcome));
    }
    if let Some(dir) = out_dir {
        hatsearch::write_results(dir, &config, &outcome).map_err(input)?;
        out.human(format!("results in {}", dir.display()));
    }
    if !outcome.complete {
        return Err(Failure::Budget("budget exhausted, results are partial".into()));
    }
    Ok(())
}

fn export(ctx: &Ctx, name: &str, path: &Path) -> Result<(), Failure> {
    let entry = Entry::parse(name).map_err(input)?;
    let doc = ctx.load(entry.name())?;
    std::fs::write(path, catalog::serialize(&doc.system)).map_err(|e| input(format!("{}: {e}", path.display())))?;
    ctx.out.human(format!("wrote {}", path.display()));
    ctx.out.kv("written", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 1 {
        unital_core::set_threads(cli.threads);
    }
    let ctx = Ctx {
        q: cli.q,
        modulus: cli.modulus,
        threads: cli.threads,
        budget_sec: cli.budget_sec.filter(|b| *b >= 0.0),
        out: Out { machine: cli.format == Format::Machine },
    };
    let result = match &cli.command {
        Command::Verify { source } => verify(&ctx, source),
        Command::Aut { source } => aut(&ctx, source),
        Command::Iso { a, b, closed } => iso(&ctx, a, b, closed.as_deref()),
        Command::Onan { source, count_through, budget, expect_found } => {
            onan(&ctx, source, count_through.as_deref(), *budget, *expect_found)
        }
        Command::Close { source, parallelism, out } => close_cmd(&ctx, source, *parallelism, out),
        Command::Search { config, out } => search(&ctx, config, out.as_deref()),
        Command::Export { name, out } => export(&ctx, name, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
