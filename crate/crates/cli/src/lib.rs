//! Command-line front end: parses arguments, runs one library operation and
//! renders a report. Exit codes: 0 pass, 1 refuted, 2 usage or input error,
//! 3 budget exhausted.

pub mod report;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relnpi::angles::{gauss_bonnet, parse_angles};
use relnpi::certify::{
    certify_fold, justify_by_standard_coloring, search_zero_one, AngleChoice, AngleSource, CertWitness, CertifyError,
    KJustification, NpiCertificate, Tier, MAX_ANGLE_ASSIGNMENTS,
};
use relnpi::coloring::{coloring_test, relative_coloring_test, strong_relative_coloring_test, ColoringVerdict, ColoringWitness, LinkStep};
use relnpi::immersion::{
    audit_relative, audit_relative_with_angles, enumerate_immersions, AuditReport, ImmersionBudget, DEFAULT_MAX_CELLS,
    DEFAULT_NODE_LIMIT,
};
use relnpi::lot::{
    certify_lot, core, has_boundary_reducible_sublot, justify_lot, lot_complex, parse_lot, reduction_flags, sub_lots, write_lot,
    Log, LotCertificate, SubJustification,
};
use relnpi::parse::write_complex;
use relnpi::thin::{thin_immersion, ThinError};
use relnpi::{parse_complex, standard_angles, AngleStructure, CombMap, ComplexDocument, CornerId, Subcomplex, TwoComplex};
use serde_json::json;

pub use report::{Outcome, Report, Witness, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "relnpi", version, about = "Coloring tests, fold certificates and immersion audits for 2-complexes")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Accepted for compatibility; searches run sequentially.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a complex and summarize it.
    Parse { file: PathBuf },
    /// Print the link of every vertex.
    Links { file: PathBuf },
    /// Vertex and cell curvatures with the Gauss–Bonnet residual.
    Curvature {
        file: PathBuf,
        /// `standard` or a path to an angle file.
        #[arg(long, default_value = "standard")]
        angles: String,
    },
    /// Coloring tests.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Fold certificates.
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Enumerate immersions and audit Euler characteristic bounds.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Thin an immersion relative to a subcomplex of its target.
    Thin(ThinArgs),
    /// Labeled oriented trees.
    #[command(subcommand)]
    Lot(LotCommand),
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    Coloring(CheckArgs),
    Relative(CheckArgs),
    Strong(CheckArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    file: PathBuf,
    /// Named subcomplex of the input (required by relative tests).
    #[arg(long)]
    sub: Option<String>,
    /// `standard`, `search` (coloring only) or a path to an angle file.
    #[arg(long, default_value = "standard")]
    angles: String,
    /// Maximum number of complete zero/one assignments tried by `search`.
    #[arg(long, default_value_t = MAX_ANGLE_ASSIGNMENTS)]
    budget: u64,
}

#[derive(Subcommand, Debug)]
enum CertifyCommand {
    Npi(CertifyArgs),
}

#[derive(Args, Debug)]
struct CertifyArgs {
    file: PathBuf,
    #[arg(long)]
    sub: String,
    #[arg(long)]
    fold_edge: String,
    /// `standard`, `search` or a path to an angle file for the folded complex.
    #[arg(long, default_value = "standard")]
    angles: String,
    #[arg(long, default_value_t = MAX_ANGLE_ASSIGNMENTS)]
    budget: u64,
    /// Try to justify the subcomplex by the coloring test with standard angles.
    #[arg(long)]
    justify_k: bool,
    /// Record an unverified justification for the subcomplex.
    #[arg(long, conflicts_with = "justify_k")]
    assume_k: Option<String>,
}

#[derive(Subcommand, Debug)]
enum AuditCommand {
    Npi(AuditArgs),
    Relative(AuditArgs),
}

#[derive(Args, Debug)]
struct AuditArgs {
    file: PathBuf,
    #[arg(long)]
    sub: Option<String>,
    #[arg(long, env = "NPI_MAX_CELLS", default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: u64,
    #[arg(long)]
    allow_reflections: bool,
    /// With angles, also audit heredity of the strong test and the
    /// curvature-drop bound.
    #[arg(long)]
    angles: Option<String>,
    /// Write every enumerated immersion into this directory.
    #[arg(long)]
    dump_instances: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ThinArgs {
    /// Source complex with a map block; without one, the identity map.
    file: PathBuf,
    /// Target complex; defaults to the source.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Named subcomplex of the target.
    #[arg(long)]
    sub: String,
    /// Check the strong test on the target pair with these angles first.
    #[arg(long)]
    angles: Option<String>,
}

#[derive(Subcommand, Debug)]
enum LotCommand {
    Check { file: PathBuf },
    Certify(LotCertifyArgs),
}

#[derive(Args, Debug)]
struct LotCertifyArgs {
    file: PathBuf,
    /// Named sub-LOT to fold; without it, a route is searched.
    #[arg(long)]
    sub: Option<String>,
    /// Vertex the sub-LOT collapses to; defaults to its first vertex.
    #[arg(long, requires = "sub")]
    collapse_vertex: Option<String>,
    /// Record an unverified justification for the sub-LOT.
    #[arg(long, requires = "sub")]
    assume_sub: Option<String>,
}

/// Parses `args` (including the program name), runs the command, writes
/// the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let text = match cli.format {
        Format::Human => report.to_human(),
        Format::Structured => report.to_json(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    report.exit_code()
}

fn execute(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Parse { file } => cmd_parse(file),
        Command::Links { file } => cmd_links(file),
        Command::Curvature { file, angles } => cmd_curvature(file, angles),
        Command::Check(c) => cmd_check(c),
        Command::Certify(CertifyCommand::Npi(a)) => cmd_certify(a),
        Command::Audit(AuditCommand::Npi(a)) => cmd_audit(a, false),
        Command::Audit(AuditCommand::Relative(a)) => cmd_audit(a, true),
        Command::Thin(a) => cmd_thin(a),
        Command::Lot(LotCommand::Check { file }) => cmd_lot_check(file),
        Command::Lot(LotCommand::Certify(a)) => cmd_lot_certify(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<ComplexDocument> {
    parse_complex(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn input_name(path: &Path) -> String {
    path.display().to_string()
}

fn sub_named(doc: &ComplexDocument, name: &str) -> Result<Subcomplex> {
    doc.sub(name).cloned().ok_or_else(|| {
        let known: Vec<&str> = doc.subs.iter().map(|(n, _)| n.as_str()).collect();
        anyhow!("no subcomplex named `{name}` (known: {})", known.join(", "))
    })
}

fn load_angles(k: &TwoComplex, spec: &str) -> Result<AngleStructure> {
    if spec == "standard" {
        return Ok(standard_angles(k));
    }
    let w = parse_angles(k, &read(Path::new(spec))?).with_context(|| spec.to_string())?;
    w.check_shape(k)?;
    Ok(w)
}

fn corner_name(k: &TwoComplex, c: CornerId) -> String {
    format!("{}#{}", k.cells()[c.cell].name, c.pos)
}

fn walk_text(k: &TwoComplex, walk: &[LinkStep]) -> String {
    walk.iter().map(|s| format!("{}{}", corner_name(k, s.corner), if s.forward { "" } else { "'" })).collect::<Vec<_>>().join(" ")
}

fn describe_coloring(k: &TwoComplex, w: &ColoringWitness) -> String {
    let vname = |v: usize| k.vertices()[v].clone();
    match w {
        ColoringWitness::PositiveCell { cell, curvature } => {
            format!("cell {} has curvature {curvature}", k.cells()[*cell].name)
        }
        ColoringWitness::ZeroCycle { vertex, walk } => {
            format!("reduced cycle of angle-0 corners at {}: {}", vname(*vertex), walk_text(k, walk))
        }
        ColoringWitness::LightCycle { vertex, walk, weight } => {
            format!("reduced link cycle of weight {weight} at {}: {}", vname(*vertex), walk_text(k, walk))
        }
        ColoringWitness::ClosingCorner { vertex, corner } => {
            format!("angle-1 corner {} at {} joins one lk0 component", corner_name(k, *corner), vname(*vertex))
        }
        ColoringWitness::Disconnected { vertex, a, b, walk } => format!(
            "{} and {} at {} share an lk0 component but not a subcomplex component: {}",
            k.format_end(*a),
            k.format_end(*b),
            vname(*vertex),
            walk_text(k, walk)
        ),
        ColoringWitness::QuotientCycle { vertex, corners } => format!(
            "cycle in the quotient link at {}: {}",
            vname(*vertex),
            corners.iter().map(|c| corner_name(k, *c)).collect::<Vec<_>>().join(" ")
        ),
    }
}

fn cmd_parse(file: &Path) -> Result<Report> {
    let doc = load(file)?;
    let k = &doc.complex;
    let mut r = Report::new("parse", &input_name(file), Outcome::Pass);
    r.summary.push(format!(
        "complex {}: {} vertices, {} edges, {} cells, euler characteristic {}",
        k.name(),
        k.vertex_count(),
        k.edge_count(),
        k.cell_count(),
        k.euler_characteristic()
    ));
    for (name, s) in &doc.subs {
        r.summary.push(format!("sub {name}: {} vertices, {} edges, {} cells", s.vertices.len(), s.edges.len(), s.cells.len()));
    }
    if doc.map.is_some() {
        r.summary.push("map block present".into());
    }
    r.data = json!({
        "name": k.name(),
        "vertices": k.vertex_count(),
        "edges": k.edge_count(),
        "cells": k.cell_count(),
        "euler_characteristic": k.euler_characteristic(),
        "subs": doc.subs.iter().map(|(n, s)| json!({"name": n, "vertices": s.vertices.len(), "edges": s.edges.len(), "cells": s.cells.len()})).collect::<Vec<_>>(),
        "text": write_complex(k, &doc.subs),
    });
    Ok(r)
}

fn cmd_links(file: &Path) -> Result<Report> {
    let doc = load(file)?;
    let k = &doc.complex;
    let mut r = Report::new("links", &input_name(file), Outcome::Pass);
    let mut out = Vec::new();
    for lk in k.links() {
        let nodes: Vec<String> = lk.nodes.iter().map(|e| k.format_end(*e)).collect();
        let corners: Vec<String> =
            lk.corners.iter().map(|c| format!("{}: {} - {}", corner_name(k, c.id), k.format_end(c.a), k.format_end(c.b))).collect();
        let components = lk.to_graph().component_count();
        r.summary.push(format!(
            "vertex {}: {} nodes, {} corners, {} components, euler characteristic {}",
            k.vertices()[lk.vertex],
            nodes.len(),
            corners.len(),
            components,
            lk.euler_characteristic()
        ));
        for c in &corners {
            r.summary.push(format!("  {c}"));
        }
        out.push(json!({"vertex": k.vertices()[lk.vertex], "nodes": nodes, "corners": corners, "components": components}));
    }
    r.data = json!({ "links": out });
    Ok(r)
}

fn cmd_curvature(file: &Path, angles: &str) -> Result<Report> {
    let doc = load(file)?;
    let k = &doc.complex;
    let w = load_angles(k, angles)?;
    let mut r = Report::new("curvature", &input_name(file), Outcome::Pass);
    match gauss_bonnet(k, &w) {
        Ok(c) => {
            for (v, x) in c.vertex.iter().enumerate() {
                r.summary.push(format!("vertex {}: {x}", k.vertices()[v]));
            }
            for (d, x) in c.cell.iter().enumerate() {
                r.summary.push(format!("cell {}: {x}", k.cells()[d].name));
            }
            r.summary.push(format!("euler characteristic {}, residual {}", c.euler, c.residual));
            r.data = serde_json::to_value(&c)?;
        }
        Err(e) => {
            r.outcome = Outcome::Refuted;
            r.witnesses.push(Witness::with_complex(e.to_string(), write_complex(k, &[])));
        }
    }
    Ok(r)
}

fn verdict_report(r: &mut Report, k: &TwoComplex, v: &ColoringVerdict) {
    r.outcome = if v.pass { Outcome::Pass } else { Outcome::Refuted };
    r.summary.push(format!("cells {}", if v.cells_pass { "pass" } else { "fail" }));
    for (i, ok) in v.vertex_pass.iter().enumerate() {
        r.summary.push(format!("vertex {}: {}", k.vertices()[i], if *ok { "pass" } else { "fail" }));
    }
    let text = write_complex(k, &[]);
    for w in &v.witnesses {
        r.witnesses.push(Witness::with_complex(describe_coloring(k, w), text.clone()));
    }
}

fn cmd_check(c: &CheckCommand) -> Result<Report> {
    let (name, a) = match c {
        CheckCommand::Coloring(a) => ("check coloring", a),
        CheckCommand::Relative(a) => ("check relative", a),
        CheckCommand::Strong(a) => ("check strong", a),
    };
    let doc = load(&a.file)?;
    let k = &doc.complex;
    let sub = match (c, &a.sub) {
        (CheckCommand::Coloring(_), Some(_)) => bail!("`check coloring` takes no subcomplex"),
        (CheckCommand::Coloring(_), None) => Subcomplex::empty(),
        (_, Some(s)) => sub_named(&doc, s)?,
        (_, None) => bail!("`{name}` needs --sub"),
    };
    let mut r = Report::new(name, &input_name(&a.file), Outcome::Pass);
    let w = if a.angles == "search" {
        if !matches!(c, CheckCommand::Coloring(_)) {
            bail!("--angles search is only available for `check coloring`");
        }
        let s = search_zero_one(k, a.budget, |w| coloring_test(k, w).map(|v| v.pass))?;
        r.summary.push(format!("angle search: {} assignments tried", s.tried));
        match s.found {
            Some(w) => w,
            None => {
                r.outcome = if s.exhausted { Outcome::Inconclusive } else { Outcome::Refuted };
                let why = if s.exhausted { "search budget exhausted" } else { "no zero/one angle structure passes" };
                r.witnesses.push(Witness::with_complex(why, write_complex(k, &[])));
                r.data = json!({"tried": s.tried, "exhausted": s.exhausted});
                return Ok(r);
            }
        }
    } else {
        load_angles(k, &a.angles)?
    };
    let v = match c {
        CheckCommand::Coloring(_) => coloring_test(k, &w)?,
        CheckCommand::Relative(_) => relative_coloring_test(k, &sub, &w)?,
        CheckCommand::Strong(_) => strong_relative_coloring_test(k, &sub, &w)?,
    };
    verdict_report(&mut r, k, &v);
    r.data = json!({ "verdict": v, "angles": w });
    Ok(r)
}

fn describe_cert_witness(cert: &NpiCertificate, w: &CertWitness) -> Witness {
    let folded = &cert.folded;
    match w {
        CertWitness::NonzeroExponentSum { cell, sum } => Witness::text(format!("cell {cell} has exponent sum {sum}")),
        CertWitness::LinkLaw => Witness::with_complex("folded link differs from the predicted link", write_complex(folded, &[])),
        CertWitness::Coloring(c) => Witness::with_complex(describe_coloring(folded, c), write_complex(folded, &[])),
        CertWitness::FoldEndsJoined { walk } => Witness::with_complex(
            format!("{}+ and {}- share an lk0 component: {}", cert.fold_edge, cert.fold_edge, walk_text(folded, walk)),
            write_complex(folded, &[]),
        ),
        CertWitness::NoAngleStructure => Witness::with_complex("no zero/one angle structure found", write_complex(folded, &[])),
    }
}

fn cmd_certify(a: &CertifyArgs) -> Result<Report> {
    let doc = load(&a.file)?;
    let l = &doc.complex;
    let k = sub_named(&doc, &a.sub)?;
    let y = l.edge_index(&a.fold_edge).ok_or_else(|| anyhow!("no edge named `{}`", a.fold_edge))?;
    let choice = match a.angles.as_str() {
        "standard" => AngleChoice::Standard,
        "search" => AngleChoice::Search { budget: a.budget },
        path => {
            let folded = relnpi::fold::fold_to_edge(l, &k, y)?;
            AngleChoice::Supplied(load_angles(&folded.complex, path)?)
        }
    };
    let mut r = Report::new("certify npi", &input_name(&a.file), Outcome::Pass);
    let cert = match certify_fold(l, &k, y, choice) {
        Ok(c) => c,
        Err(CertifyError::Precondition(msg)) => {
            r.outcome = Outcome::Refuted;
            r.summary.push(format!("tier: {}", Tier::None.describe()));
            r.witnesses.push(Witness::with_complex(msg, write_complex(l, &doc.subs)));
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let cert = if let Some(reason) = &a.assume_k {
        cert.with_k_justification(KJustification::Assumed { reason: reason.clone() })
    } else if a.justify_k {
        match justify_by_standard_coloring(l, &k) {
            Some(j) => cert.with_k_justification(j),
            None => cert,
        }
    } else {
        cert
    };
    for c in &cert.checks {
        r.summary.push(format!("{}: {}", c.name, if c.pass { "pass" } else { "fail" }));
    }
    r.summary.push(format!("angles: {}", angle_source_text(&cert.angle_source)));
    r.summary.push(format!("tier: {}", cert.conclusion.describe()));
    for s in &cert.assumptions {
        r.summary.push(format!("assumption: {s}"));
    }
    r.witnesses = cert.witnesses.iter().map(|w| describe_cert_witness(&cert, w)).collect();
    r.outcome = match (&cert.conclusion, &cert.angle_source) {
        (Tier::None, AngleSource::Search { exhausted: true, .. }) => Outcome::Inconclusive,
        (Tier::None, _) => Outcome::Refuted,
        _ => Outcome::Pass,
    };
    r.data = serde_json::to_value(&cert)?;
    Ok(r)
}

fn angle_source_text(s: &AngleSource) -> String {
    match s {
        AngleSource::Supplied => "supplied".into(),
        AngleSource::Standard => "standard".into(),
        AngleSource::Search { tried, exhausted } => {
            format!("search ({tried} assignments{})", if *exhausted { ", budget exhausted" } else { "" })
        }
    }
}

fn cmd_audit(a: &AuditArgs, relative: bool) -> Result<Report> {
    let doc = load(&a.file)?;
    let l = &doc.complex;
    let k = match (&a.sub, relative) {
        (Some(s), true) => sub_named(&doc, s)?,
        (None, true) => bail!("`audit relative` needs --sub"),
        (Some(_), false) => bail!("`audit npi` takes no subcomplex"),
        (None, false) => Subcomplex::empty(),
    };
    if a.max_cells == 0 {
        bail!("--max-cells must be at least 1");
    }
    let budget = ImmersionBudget { max_cells: a.max_cells, allow_reflections: a.allow_reflections, node_limit: a.node_limit };
    let mut report: AuditReport = match &a.angles {
        Some(spec) => audit_relative_with_angles(l, &k, &load_angles(l, spec)?, &budget),
        None => audit_relative(l, &k, &budget),
    };
    report.relative = relative;
    let name = if relative { "audit relative" } else { "audit npi" };
    let mut r = Report::new(name, &input_name(&a.file), Outcome::Pass);
    r.summary.push(format!(
        "{} immersions with at most {} cells, enumeration {} ({} search nodes)",
        report.count,
        budget.max_cells,
        if report.completed { "completed" } else { "truncated" },
        report.nodes
    ));
    r.summary.push("scope: essential X only (every edge on a 2-cell)".into());
    r.summary.push(format!("{} violations", report.violations.len()));
    for v in &report.violations {
        r.witnesses.push(Witness::with_complex(
            format!("instance {}: {:?} violation, chi(X) = {}, chi(Y) = {}", v.index, v.kind, v.chi_x, v.chi_y),
            v.instance.clone(),
        ));
    }
    r.outcome = if !report.violations.is_empty() {
        Outcome::Refuted
    } else if !report.completed {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    if let Some(dir) = &a.dump_instances {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let en = enumerate_immersions(l, &budget);
        for (i, inst) in en.instances.iter().enumerate() {
            let path = dir.join(format!("instance_{i:04}.2cx"));
            fs::write(&path, inst.to_text(l)).with_context(|| format!("cannot write {}", path.display()))?;
        }
        r.summary.push(format!("wrote {} instances to {}", en.instances.len(), dir.display()));
    }
    r.data = serde_json::to_value(&report)?;
    Ok(r)
}

fn cmd_thin(a: &ThinArgs) -> Result<Report> {
    let xdoc = load(&a.file)?;
    let x = &xdoc.complex;
    let ldoc = match &a.target {
        Some(p) => load(p)?,
        None => xdoc.clone(),
    };
    let l = &ldoc.complex;
    let k = sub_named(&ldoc, &a.sub)?;
    let f = match &xdoc.map {
        Some(spec) => CombMap::from_spec(x, l, spec).map_err(|e| anyhow!("map block: {e}"))?,
        None if a.target.is_none() => CombMap::identity(x),
        None => bail!("{} has no map block", a.file.display()),
    };
    let w = a.angles.as_deref().map(|s| load_angles(l, s)).transpose()?;
    let mut r = Report::new("thin", &input_name(&a.file), Outcome::Pass);
    match thin_immersion(x, l, &f, &k, w.as_ref()) {
        Ok(t) => {
            let text = write_complex(&t.x_prime, &[]);
            r.summary.push(format!("hollowed components k = {}, capped boundary components p = {}", t.k, t.p));
            r.summary.push(format!("chi(X) = {}, chi(X') = {}", t.chi_x, t.chi_x_prime));
            r.data = json!({
                "k": t.k,
                "p": t.p,
                "chi_x": t.chi_x,
                "chi_x_prime": t.chi_x_prime,
                "x_prime": text,
                "map": t.map,
            });
        }
        Err(ThinError::Invariant(msg)) => {
            r.outcome = Outcome::Refuted;
            r.witnesses.push(Witness::with_complex(msg, write_complex(x, &[])));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn lot_edges_text(g: &Log, edges: &BTreeSet<usize>) -> String {
    let idx: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
    let vs: Vec<&str> = g.span(edges).iter().map(|&v| g.vertices[v].as_str()).collect();
    format!("{} (vertices {})", idx.join(" "), vs.join(" "))
}

fn cmd_lot_check(file: &Path) -> Result<Report> {
    let g = parse_lot(&read(file)?).with_context(|| input_name(file))?;
    let flags = reduction_flags(&g);
    let c = core(&g);
    let k = lot_complex(&g);
    let mut r = Report::new("lot check", &input_name(file), Outcome::Pass);
    r.summary.push(format!("{} vertices, {} edges, tree: {}", g.vertices.len(), g.edges.len(), g.is_tree()));
    r.summary.push(format!(
        "boundary reduced: {}, interior reduced: {}, compressed: {}, reduced: {}, injective: {}",
        flags.boundary_reduced, flags.interior_reduced, flags.compressed, flags.reduced, flags.injective
    ));
    r.summary.push(format!("core: {} vertices, {} edges", c.vertices.len(), c.edges.len()));
    r.summary.push(format!("euler characteristic of the complex: {}", k.euler_characteristic()));
    let all = g.all_edges();
    let subs = match sub_lots(&g) {
        Ok(s) => {
            let proper: Vec<_> = s.into_iter().filter(|s| *s != all).collect();
            r.summary.push(format!("{} proper sub-LOTs", proper.len()));
            for s in &proper {
                r.summary.push(format!("  edges {}", lot_edges_text(&g, s)));
            }
            Some(proper)
        }
        Err(e) => {
            r.summary.push(format!("sub-LOTs not enumerated: {e}"));
            None
        }
    };
    if let Ok(Some((s, v))) = has_boundary_reducible_sublot(&g) {
        r.summary.push(format!("sub-LOT on edges {} is boundary reducible at {}", lot_edges_text(&g, &s), g.vertices[v]));
    }
    r.data = json!({
        "flags": flags,
        "tree": g.is_tree(),
        "core": write_lot(&c),
        "proper_sub_lots": subs,
        "euler_characteristic": k.euler_characteristic(),
    });
    Ok(r)
}

fn lot_report(r: &mut Report, cert: &LotCertificate) -> Result<()> {
    for c in &cert.checks {
        r.summary.push(format!("{}: {}", c.name, if c.pass { "pass" } else { "fail" }));
    }
    r.summary.push(format!("certified: {}", cert.certified));
    for s in &cert.assumptions {
        r.summary.push(format!("assumption: {s}"));
    }
    r.witnesses = cert.witnesses.iter().map(Witness::text).collect();
    r.outcome = if cert.certified { Outcome::Pass } else { Outcome::Refuted };
    if !cert.certified && r.witnesses.is_empty() {
        let failed: Vec<&str> = cert.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        r.witnesses.push(Witness::text(format!("failed checks: {}", failed.join(", "))));
    }
    r.data = serde_json::to_value(cert)?;
    Ok(())
}

fn cmd_lot_certify(a: &LotCertifyArgs) -> Result<Report> {
    let g = parse_lot(&read(&a.file)?).with_context(|| input_name(&a.file))?;
    let mut r = Report::new("lot certify", &input_name(&a.file), Outcome::Pass);
    let cert = match &a.sub {
        None => justify_lot(&g),
        Some(name) => {
            let sub = g.sub(name).ok_or_else(|| anyhow!("no sub-LOT named `{name}`"))?.clone();
            let v0 = match &a.collapse_vertex {
                Some(v) => g.vertex_index(v).ok_or_else(|| anyhow!("no LOT vertex named `{v}`"))?,
                None => *g.span(&sub).iter().next().ok_or_else(|| anyhow!("sub-LOT `{name}` is empty"))?,
            };
            let just = match &a.assume_sub {
                Some(reason) => SubJustification::Assume(reason.clone()),
                None => SubJustification::Auto,
            };
            certify_lot(&g, &sub, v0, &just)
        }
    };
    lot_report(&mut r, &cert)?;
    Ok(r)
}

/// Parses one text report, for callers checking round trips.
pub fn parse_report(text: &str) -> Result<Report> {
    Ok(Report::from_json(text)?)
}
