//! `mcq`: batch front end for structure checks, constructors, flows,
//! colorings, the coloring correspondence, and diagram moves.
//!
//! Exit codes: 0 success, 1 semantic failure, 2 parse failure, 3 budget.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};

use mcq_core::axioms::CheckMode;
use mcq_core::coloring::{
    colorings_by_flow, colorings_per_flow, count_colorings, enumerate_flows, is_valid_coloring, linear_colorings,
    list_colorings, transport_coloring, verify_against, verify_correspondence, verify_family_correspondence,
    ColoringError, EngineOptions, Family, Flow, Target,
};
use mcq_core::diagram::Diagram;
use mcq_core::family::{
    gfamily_alexander_b, gfamily_alexander_q, lift_quandle_family, verify_qg_compat, zkm_family_from_biquandle,
    zkm_family_from_quandle,
};
use mcq_core::formats::{
    parse_assignment, parse_structure_file, serialize_assignment, serialize_structure, FormatError, Structure,
};
use mcq_core::group::FiniteGroup;
use mcq_core::mcq::{q_functor_mcb, Blocks, Mcb, Mcq};
use mcq_core::moves::{apply_move_detailed, Direction, MoveKind, MoveSite};
use mcq_core::quandle::{alexander_biquandle, alexander_quandle, Table};
use mcq_core::ring::FiniteRing;

#[derive(Parser, Debug)]
#[command(name = "mcq", version, about = "Multiple conjugation quandles and biquandles: checks, colorings, moves")]
struct Cli {
    /// Output style: `text` (`key: value`) or `machine` (`key=value`).
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    /// Maximum number of search nodes per count.
    #[arg(long, default_value_t = 50_000_000, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Worker threads for the coloring search.
    #[arg(long, default_value_t = 1, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms of a structure file.
    Check { structure: PathBuf },
    /// Print Q(X) for an MCB (or the associated MCB of a biquandle family).
    Functor { structure: PathBuf },
    /// Print the quandle family Q_G of a biquandle family.
    Qg { family: PathBuf },
    /// Construct a structure and print it.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
    },
    /// Enumerate G-flows of a diagram.
    Flows {
        /// A group file or a G-family file (its group is used).
        group: PathBuf,
        diagram: PathBuf,
        /// Also print every flow.
        #[arg(long)]
        list: bool,
    },
    /// Count, list or solve colorings of a diagram.
    Color(ColorArgs),
    /// Compare |Col_X(D)| with |Col_Q(X)(D)| over one or more diagrams.
    Verify {
        /// An MCB file or a G-family of biquandles.
        structure: PathBuf,
        /// Diagram files or directories of `.dgm` files.
        #[arg(required = true)]
        diagrams: Vec<PathBuf>,
        /// Also compare per flow (families only).
        #[arg(long)]
        per_flow: bool,
        /// Test hook: compare against a deliberately wrong MCQ.
        #[arg(long, hide = true)]
        inject_wrong_q: bool,
    },
    /// Apply a move to a diagram, optionally transporting a coloring.
    Move(MoveArgs),
}

#[derive(Subcommand, Debug)]
enum BuildKind {
    /// Alexander quandle (without --s) or biquandle over Z_m[x]/(poly).
    Alexander {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
    },
    /// Cyclic Alexander G-family: quandle family with --u, biquandle family with --t and --s.
    AlexanderFamily {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
    },
    /// The Z_{k·type} family of a quandle or biquandle file.
    Zkm {
        structure: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// The associated MCQ or MCB of a G-family file.
    Associated { family: PathBuf },
    /// A quandle family viewed as a biquandle family (x ⊼^g y = x).
    Lift { family: PathBuf },
}

#[derive(Args, Debug)]
struct RingArgs {
    #[arg(long)]
    m: i64,
    /// Little-endian coefficients of the monic modulus, e.g. `2,1,1`; omit for Z_m.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    poly: Vec<i64>,
}

#[derive(Args, Debug)]
struct ColorArgs {
    structure: PathBuf,
    diagram: PathBuf,
    #[arg(long)]
    count: bool,
    #[arg(long)]
    list: bool,
    /// Module dimension and basis (Alexander families, with --flow or --per-flow).
    #[arg(long)]
    dim: bool,
    /// Per-flow counts (families only).
    #[arg(long)]
    per_flow: bool,
    /// Restrict to one flow, given as an assignment file (families only).
    #[arg(long)]
    flow: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MoveArgs {
    diagram: PathBuf,
    /// Move id: R1a, R1b, R2a, R2b, R3, R4a, R4b, R5a, R5b, R6.
    #[arg(long = "move")]
    kind: String,
    /// Comma-separated semi-arc ids locating the site.
    #[arg(long, value_delimiter = ',')]
    site: Vec<String>,
    #[arg(long, default_value = "apply")]
    direction: String,
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    variant: String,
    /// Coloring file to carry across the move (requires --structure).
    #[arg(long, requires = "structure")]
    transport: Option<PathBuf>,
    /// Structure used to validate and transport the coloring.
    #[arg(long)]
    structure: Option<PathBuf>,
    /// Write the rewritten diagram here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the transported coloring here instead of stdout.
    #[arg(long)]
    coloring_output: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn semantic(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: e.into() }
}

fn parse_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: e.into() }
}

impl From<ColoringError> for Failure {
    fn from(e: ColoringError) -> Self {
        let code = if matches!(e, ColoringError::SizeBoundExceeded(_)) { 3 } else { 1 };
        Failure { code, error: e.into() }
    }
}

type Outcome = Result<u8, Failure>;

/// Key-value report writer.
struct Report {
    format: OutputFormat,
}

impl Report {
    fn kv(&self, key: &str, value: impl Display) {
        match self.format {
            OutputFormat::Text => println!("{key}: {value}"),
            OutputFormat::Machine => println!("{key}={value}"),
        }
    }
}

fn compact(a: &BTreeMap<String, usize>) -> String {
    a.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(",")
}

fn read_structure(path: &Path) -> Result<Structure, Failure> {
    parse_structure_file(path).map_err(|e| match e {
        FormatError::Syntax { .. } => parse_failure(anyhow!("{}: {e}", path.display())),
        FormatError::Semantic(_) => semantic(anyhow!("{}: {e}", path.display())),
    })
}

/// A structure that passed its axiom check.
fn read_valid_structure(path: &Path) -> Result<Structure, Failure> {
    let s = read_structure(path)?;
    let report = s.check(CheckMode::FirstViolation);
    match report.first() {
        None => Ok(s),
        Some(v) => Err(semantic(anyhow!("{}: {} fails {v}", path.display(), s.kind_name()))),
    }
}

fn read_diagram(path: &Path) -> Result<Diagram, Failure> {
    let text = fs::read_to_string(path).map_err(|e| parse_failure(anyhow!("{}: {e}", path.display())))?;
    Diagram::parse(&text).map_err(|e| parse_failure(anyhow!("{}: {e}", path.display())))
}

fn read_assignment(path: &Path) -> Result<BTreeMap<String, usize>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| parse_failure(anyhow!("{}: {e}", path.display())))?;
    parse_assignment(&text).map_err(|e| parse_failure(anyhow!("{}: {e}", path.display())))
}

fn diagram_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| parse_failure(anyhow!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.extension().is_some_and(|x| x == "dgm"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Owned coloring target of a structure: quandles and biquandles act as
/// MCQs/MCBs with singleton blocks; families use their associated structure.
enum Owned {
    Mcq(Mcq),
    Mcb(Mcb),
}

impl Owned {
    fn of(s: &Structure) -> Result<Owned, Failure> {
        let singletons = |n: usize| Blocks::product(n, &FiniteGroup::trivial());
        Ok(match s {
            Structure::Quandle(q) => Owned::Mcq(Mcq::new(singletons(q.n()), q.table().clone()).map_err(semantic)?),
            Structure::Biquandle(b) => Owned::Mcb(
                Mcb::new(singletons(b.n()), b.under_table().clone(), b.over_table().clone()).map_err(semantic)?,
            ),
            Structure::Mcq(q) => Owned::Mcq(q.clone()),
            Structure::Mcb(b) => Owned::Mcb(b.clone()),
            Structure::FamilyQ(f) => Owned::Mcq(f.associated_mcq()),
            Structure::FamilyB(f) => Owned::Mcb(f.associated_mcb()),
            Structure::Group(_) => return Err(semantic(anyhow!("a group file has no colorings; use `flows`"))),
        })
    }

    fn target(&self) -> Target<'_> {
        match self {
            Owned::Mcq(q) => Target::Mcq(q),
            Owned::Mcb(b) => Target::Mcb(b),
        }
    }
}

fn family_of(s: &Structure) -> Option<Family<'_>> {
    match s {
        Structure::FamilyQ(f) => Some(Family::Q(f)),
        Structure::FamilyB(f) => Some(Family::B(f)),
        _ => None,
    }
}

fn cmd_check(out: &Report, path: &Path) -> Outcome {
    let s = read_structure(path)?;
    let report = s.check(CheckMode::Full);
    out.kv("kind", s.kind_name());
    out.kv("ok", report.ok());
    for (i, v) in report.violations.iter().enumerate() {
        let w: Vec<String> = v.witness.iter().map(ToString::to_string).collect();
        out.kv(&format!("violation.{i}"), format!("{} witness={}", v.axiom.id(), w.join(",")));
    }
    Ok(if report.ok() { 0 } else { 1 })
}

fn cmd_functor(path: &Path) -> Outcome {
    let x = match read_valid_structure(path)? {
        Structure::Mcb(b) => b,
        Structure::FamilyB(f) => f.associated_mcb(),
        other => return Err(semantic(anyhow!("expected an MCB, found a {}", other.kind_name()))),
    };
    let q = q_functor_mcb(&x).map_err(semantic)?;
    print!("{}", serialize_structure(&Structure::Mcq(q)));
    Ok(0)
}

fn cmd_qg(path: &Path) -> Outcome {
    let Structure::FamilyB(f) = read_valid_structure(path)? else {
        return Err(semantic(anyhow!("expected a G-family of biquandles")));
    };
    if !verify_qg_compat(&f) {
        return Err(semantic(anyhow!("Q_G(X) does not match Q of the associated MCB")));
    }
    print!("{}", serialize_structure(&Structure::FamilyQ(f.qg_map())));
    Ok(0)
}

fn cmd_build(kind: &BuildKind) -> Outcome {
    let ring_of = |r: &RingArgs| FiniteRing::new(r.m, &r.poly).map_err(semantic);
    let elt = |ring: &FiniteRing, text: &str| ring.parse_element(text).map_err(parse_failure);
    let built = match kind {
        BuildKind::Alexander { ring, t, s } => {
            let ring = ring_of(ring)?;
            let t = elt(&ring, t)?;
            match s {
                None => Structure::Quandle(alexander_quandle(&ring, &t).map_err(semantic)?),
                Some(s) => Structure::Biquandle(alexander_biquandle(&ring, &elt(&ring, s)?, &t).map_err(semantic)?),
            }
        }
        BuildKind::AlexanderFamily { ring, n, u, t, s } => {
            let ring = ring_of(ring)?;
            match (u, t, s) {
                (Some(u), None, None) => {
                    Structure::FamilyQ(gfamily_alexander_q(&ring, *n, &elt(&ring, u)?).map_err(semantic)?)
                }
                (None, Some(t), Some(s)) => Structure::FamilyB(
                    gfamily_alexander_b(&ring, *n, &elt(&ring, t)?, &elt(&ring, s)?).map_err(semantic)?,
                ),
                _ => return Err(parse_failure(anyhow!("give either --u, or both --t and --s"))),
            }
        }
        BuildKind::Zkm { structure, k } => match read_valid_structure(structure)? {
            Structure::Quandle(q) => Structure::FamilyQ(zkm_family_from_quandle(&q, *k).map_err(semantic)?),
            Structure::Biquandle(b) => Structure::FamilyB(zkm_family_from_biquandle(&b, *k).map_err(semantic)?),
            other => return Err(semantic(anyhow!("expected a quandle or biquandle, found a {}", other.kind_name()))),
        },
        BuildKind::Associated { family } => match read_valid_structure(family)? {
            Structure::FamilyQ(f) => Structure::Mcq(f.associated_mcq()),
            Structure::FamilyB(f) => Structure::Mcb(f.associated_mcb()),
            other => return Err(semantic(anyhow!("expected a G-family, found a {}", other.kind_name()))),
        },
        BuildKind::Lift { family } => match read_valid_structure(family)? {
            Structure::FamilyQ(f) => Structure::FamilyB(lift_quandle_family(&f)),
            other => return Err(semantic(anyhow!("expected a quandle family, found a {}", other.kind_name()))),
        },
    };
    print!("{}", serialize_structure(&built));
    Ok(0)
}

fn cmd_flows(out: &Report, opts: EngineOptions, group: &Path, diagram: &Path, list: bool) -> Outcome {
    let s = read_valid_structure(group)?;
    let g = match &s {
        Structure::Group(t) => FiniteGroup::new(t.clone()).map_err(semantic)?,
        Structure::FamilyQ(f) => f.group().clone(),
        Structure::FamilyB(f) => f.group().clone(),
        Structure::Mcq(q) if q.blocks().count() == 1 => q.blocks().group(0).clone(),
        other => return Err(semantic(anyhow!("no group in a {}", other.kind_name()))),
    };
    let d = read_diagram(diagram)?;
    let flows = enumerate_flows(&d, &g, opts)?;
    out.kv("flows", flows.len());
    if list {
        for (i, f) in flows.iter().enumerate() {
            out.kv(&format!("flow.{i}"), compact(f));
        }
    }
    Ok(0)
}

fn print_dim(out: &Report, prefix: &str, family: Family<'_>, d: &Diagram, flow: &Flow) -> Result<(), Failure> {
    let r = linear_colorings(d, family, flow)?;
    out.kv(&format!("{prefix}linear_count"), r.count);
    if let Some(m) = r.module_info {
        match m.dimension {
            Some(dim) => out.kv(&format!("{prefix}dimension"), dim),
            None => out.kv(&format!("{prefix}dimension"), "n/a (ring is not a field)"),
        }
        out.kv(&format!("{prefix}unknowns"), m.unknowns.join(","));
        for (i, v) in m.basis.iter().enumerate() {
            let cells: Vec<String> = v.iter().map(|e| e.to_string()).collect();
            out.kv(&format!("{prefix}basis.{i}"), format!("[{}]", cells.join(", ")));
        }
    }
    Ok(())
}

fn cmd_color(out: &Report, opts: EngineOptions, a: &ColorArgs) -> Outcome {
    let s = read_valid_structure(&a.structure)?;
    let d = read_diagram(&a.diagram)?;
    let family = family_of(&s);
    let needs_family = a.per_flow || a.flow.is_some() || a.dim;
    let Some(family) = family.filter(|_| needs_family) else {
        if needs_family {
            return Err(semantic(anyhow!("--per-flow, --flow and --dim need a G-family")));
        }
        let owned = Owned::of(&s)?;
        if a.list {
            let list = list_colorings(&d, owned.target(), opts)?;
            out.kv("count", list.len());
            for (i, c) in list.iter().enumerate() {
                out.kv(&format!("coloring.{i}"), compact(c));
            }
        } else {
            out.kv("count", count_colorings(&d, owned.target(), opts)?);
        }
        return Ok(0);
    };
    if let Some(path) = &a.flow {
        let flow = read_assignment(path)?;
        let r = colorings_by_flow(&d, family, &flow, a.list, opts)?;
        out.kv("flow", compact(&flow));
        out.kv("count", r.count);
        for (i, c) in r.list.iter().flatten().enumerate() {
            out.kv(&format!("coloring.{i}"), compact(c));
        }
        if a.dim {
            print_dim(out, "", family, &d, &flow)?;
        }
        return Ok(0);
    }
    let r = colorings_per_flow(&d, family, opts)?;
    out.kv("count", r.count);
    for (i, (flow, c)) in r.per_flow.iter().flatten().enumerate() {
        out.kv(&format!("flow.{i}"), compact(flow));
        out.kv(&format!("flow.{i}.count"), c);
        if a.dim {
            print_dim(out, &format!("flow.{i}."), family, &d, flow)?;
        }
    }
    Ok(0)
}

fn cmd_verify(out: &Report, opts: EngineOptions, structure: &Path, diagrams: &[PathBuf], per_flow: bool, wrong: bool) -> Outcome {
    let s = read_valid_structure(structure)?;
    let (x, fam) = match &s {
        Structure::Mcb(b) => (b.clone(), None),
        Structure::FamilyB(f) => (f.associated_mcb(), Some(f)),
        other => return Err(semantic(anyhow!("expected an MCB or biquandle family, found a {}", other.kind_name()))),
    };
    if per_flow && fam.is_none() {
        return Err(semantic(anyhow!("--per-flow needs a G-family of biquandles")));
    }
    let wrong_q = wrong.then(|| {
        let n = x.n();
        Mcq::new(x.blocks().clone(), Table::from_fn(n, |a, _| a)).expect("sizes agree")
    });
    let mut all_equal = true;
    for path in diagram_paths(diagrams)? {
        let d = read_diagram(&path)?;
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        let total = match &wrong_q {
            Some(y) => verify_against(&d, &x, y, opts)?,
            None => verify_correspondence(&d, &x, opts)?,
        };
        out.kv(&format!("{name}.count_mcb"), total.count_mcb);
        out.kv(&format!("{name}.count_mcq"), total.count_mcq);
        let mut equal = total.equal;
        if let (true, Some(f)) = (per_flow, fam) {
            let fc = verify_family_correspondence(&d, f, opts)?;
            for (i, pf) in fc.per_flow.iter().enumerate() {
                out.kv(&format!("{name}.flow.{i}"), compact(&pf.flow));
                out.kv(&format!("{name}.flow.{i}.counts"), format!("{} {}", pf.count_b, pf.count_q));
                if let Some((db, dq)) = pf.dims {
                    let show = |v: Option<usize>| v.map_or("n/a".to_string(), |v| v.to_string());
                    out.kv(&format!("{name}.flow.{i}.dims"), format!("{} {}", show(db), show(dq)));
                }
            }
            equal &= fc.all_equal;
        }
        out.kv(&format!("{name}.equal"), equal);
        all_equal &= equal;
    }
    out.kv("all_equal", all_equal);
    Ok(if all_equal { 0 } else { 1 })
}

fn write_or_print(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| semantic(anyhow!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_move(opts: EngineOptions, a: &MoveArgs) -> Outcome {
    let d = read_diagram(&a.diagram)?;
    let kind: MoveKind = a.kind.parse().map_err(parse_failure)?;
    let direction: Direction = a.direction.parse().map_err(parse_failure)?;
    let ids: Vec<&str> = a.site.iter().map(String::as_str).collect();
    let site = MoveSite::new(kind, direction, &ids, &a.variant);
    let outcome = apply_move_detailed(&d, &site).map_err(semantic)?;
    eprintln!("inverse: {}", outcome.inverse);
    let Some(coloring_path) = &a.transport else {
        write_or_print(a.output.as_ref(), &outcome.diagram.serialize())?;
        return Ok(0);
    };
    let s = read_valid_structure(a.structure.as_ref().expect("clap enforces --structure"))?;
    let owned = Owned::of(&s)?;
    let c = read_assignment(coloring_path)?;
    if !is_valid_coloring(&d, owned.target(), &c) {
        return Err(semantic(anyhow!("{} is not a coloring of the diagram", coloring_path.display())));
    }
    let (moved, c2) = transport_coloring(&d, &site, &c, owned.target(), opts)?;
    write_or_print(a.output.as_ref(), &moved.serialize())?;
    if a.output.is_none() && a.coloring_output.is_none() {
        println!("---");
    }
    write_or_print(a.coloring_output.as_ref(), &serialize_assignment(&c2))?;
    Ok(0)
}

fn run(cli: &Cli) -> Outcome {
    let out = Report { format: cli.format };
    let opts = EngineOptions { budget: cli.budget, threads: cli.threads as usize };
    match &cli.command {
        Command::Check { structure } => cmd_check(&out, structure),
        Command::Functor { structure } => cmd_functor(structure),
        Command::Qg { family } => cmd_qg(family),
        Command::Build { kind } => cmd_build(kind),
        Command::Flows { group, diagram, list } => cmd_flows(&out, opts, group, diagram, *list),
        Command::Color(a) => cmd_color(&out, opts, a),
        Command::Verify { structure, diagrams, per_flow, inject_wrong_q } => {
            cmd_verify(&out, opts, structure, diagrams, *per_flow, *inject_wrong_q)
        }
        Command::Move(a) => cmd_move(opts, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
