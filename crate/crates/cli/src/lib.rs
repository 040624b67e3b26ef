//! Command-line driver: each verb writes one JSON artifact (or a directory
//! of them for `replay-paper`) plus a [`RunManifest`].
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mubforge::entropy::{
    eur_bounds, sampled_bound_check, strong_unext_probe, theorem3_check, BoundCheck, EntropyReport, ProbeConfig,
};
use mubforge::fixtures::{Golden, WORKED_P3_JSON};
use mubforge::lattice::DEFAULT_GUARD_MAX_P;
use mubforge::records::{to_json, ClassRecord, ClassSetRecord, StateRecord, SCHEMA_VERSION};
use mubforge::spread::CompleteSetSearch;
use mubforge::{
    assemble_unextendible, build_basis, build_complete_set, certify_unextendible, new_classes_from_subset,
    search_unextendible, Basis, Certification, ClassLattice, ClassSet, CommutingClass, MubError, Prime, TieBreak,
};
use serde::Serialize;

pub mod manifest;

pub use manifest::{manifest_path_for, sha256_hex, FileHash, RunManifest, Tolerances};
use manifest::{write_file, write_manifest};

pub const GUARD_ENV: &str = "MUBFORGE_GUARD_MAX_P";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Bad input maps to a usage error; anything else is a failed check.
impl From<MubError> for CliError {
    fn from(e: MubError) -> Self {
        use MubError::*;
        match e {
            NotPrime(_)
            | PrimeTooLarge { .. }
            | GuardExceeded { .. }
            | WrongSubsetSize { .. }
            | IndexOutOfRange { .. }
            | NoNewClass
            | Record(_)
            | Precondition(_)
            | WrongPrime { .. }
            | PrimeMismatch(..)
            | NotDisjoint => CliError::Usage(e.to_string()),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mubforge", version, about = "Unextendible sets of commuting classes and MUBs in dimension p²")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write every maximal commuting class for a prime.
    Enumerate(EnumerateArgs),
    /// Write one complete set of p² + 1 disjoint classes.
    Complete(CompleteArgs),
    /// Search complete sets for certified unextendible sets of a given size.
    Unext(UnextArgs),
    /// Entropy reports for the eigenstates of the classes a subset admits.
    Eur(EurArgs),
    /// Rebuild the nine-dimensional worked example and compare it with the golden fixture.
    ReplayPaper(ReplayArgs),
    /// Random-restart search for a vector unbiased to every basis of a set.
    ProbeStrong(ProbeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub prime: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CompleteArgs {
    #[arg(long)]
    pub prime: u32,
    /// Shuffle search tie-breaks with this seed instead of canonical order.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct UnextArgs {
    #[arg(long)]
    pub prime: u32,
    #[arg(long)]
    pub target_size: usize,
    /// Maximum number of search nodes expanded.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EurArgs {
    /// Class-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated indices of the p + 1 classes to combine.
    #[arg(long, value_delimiter = ',', required = true)]
    pub subset: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = mubforge::entropy::ENTROPY_TOL)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Alternative golden fixture; defaults to the built-in copy.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long, default_value_t = mubforge::entropy::ENTROPY_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    /// Class-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated indices restricting the probe to a subfamily.
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<usize>>,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Invocation context shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub args: Vec<String>,
    pub guard_max_p: u32,
}

impl Context {
    /// Reads the guard override from the environment.
    pub fn from_env(args: Vec<String>) -> Result<Self, CliError> {
        let guard_max_p = match std::env::var(GUARD_ENV) {
            Ok(v) => {
                v.trim().parse().map_err(|_| CliError::Usage(format!("{GUARD_ENV} must be an integer, got {v:?}")))?
            }
            Err(_) => DEFAULT_GUARD_MAX_P,
        };
        Ok(Context { args, guard_max_p })
    }

    fn lattice(&self, p: Prime) -> Result<ClassLattice, CliError> {
        Ok(ClassLattice::with_guard(p, self.guard_max_p)?)
    }

    fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::new(command, &self.args, self.guard_max_p)
    }
}

fn prime(p: u32) -> Result<Prime, CliError> {
    Prime::new(p).map_err(|e| match e {
        MubError::NotPrime(_) => CliError::Usage(format!("{p} is not prime")),
        e => e.into(),
    })
}

fn tie_break(seed: Option<u64>) -> TieBreak {
    seed.map_or(TieBreak::Canonical, TieBreak::Seeded)
}

fn read_input(path: &Path) -> Result<(String, FileHash), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let hash = FileHash::of_bytes(path, text.as_bytes());
    Ok((text, hash))
}

fn read_class_set(path: &Path) -> Result<(ClassSetRecord, ClassSet, FileHash), CliError> {
    let (text, hash) = read_input(path)?;
    let rec: ClassSetRecord = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{} is not a class-set record: {e}", path.display())))?;
    let set = rec.to_set(None).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((rec, set, hash))
}

/// Writes `payload` to `out` and its manifest next to it.
fn emit<T: Serialize>(out: &Path, payload: &T, mut manifest: RunManifest, start: Instant) -> Result<(), CliError> {
    let hash = write_file(out, &to_json(payload))?;
    manifest.outputs.push(hash);
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    write_manifest(&manifest_path_for(out), &manifest)
}

#[derive(Debug, Serialize)]
struct ClassList {
    schema: u32,
    p: u32,
    count: usize,
    classes: Vec<ClassRecord>,
}

pub fn cmd_enumerate(args: &EnumerateArgs, ctx: &Context) -> Result<(), CliError> {
    let start = Instant::now();
    let p = prime(args.prime)?;
    let lattice = ctx.lattice(p)?;
    let payload = ClassList {
        schema: SCHEMA_VERSION,
        p: p.get(),
        count: lattice.len(),
        classes: lattice.classes().iter().map(ClassRecord::from).collect(),
    };
    let mut manifest = ctx.manifest("enumerate");
    manifest.p = Some(p.get());
    emit(&args.out, &payload, manifest, start)
}

pub fn cmd_complete(args: &CompleteArgs, ctx: &Context) -> Result<(), CliError> {
    let start = Instant::now();
    let p = prime(args.prime)?;
    let lattice = ctx.lattice(p)?;
    let set = build_complete_set(&lattice, tie_break(args.seed))?;
    let mut manifest = ctx.manifest("complete");
    manifest.p = Some(p.get());
    manifest.seed = args.seed;
    emit(&args.out, &ClassSetRecord::from_set(&set, None), manifest, start)
}

#[derive(Debug, Serialize)]
struct UnextReport {
    schema: u32,
    p: u32,
    target_size: usize,
    budget: u64,
    seed: Option<u64>,
    nodes_expanded: u64,
    complete_sets_visited: usize,
    budget_exhausted: bool,
    count: usize,
    sets: Vec<ClassSetRecord>,
}

pub fn cmd_unext(args: &UnextArgs, ctx: &Context) -> Result<(), CliError> {
    let start = Instant::now();
    let p = prime(args.prime)?;
    let lattice = ctx.lattice(p)?;
    let report = search_unextendible(&lattice, args.target_size, args.budget, tie_break(args.seed))?;
    // Independent re-check of every certificate before anything is written.
    for (i, set) in report.sets.iter().enumerate() {
        match certify_unextendible(set, &lattice) {
            Certification::Unextendible(cert) if Some(cert) == set.certificate() => {}
            _ => return Err(CliError::Verification(format!("set {i} failed re-certification"))),
        }
    }
    let payload = UnextReport {
        schema: SCHEMA_VERSION,
        p: p.get(),
        target_size: report.target_size,
        budget: args.budget,
        seed: args.seed,
        nodes_expanded: report.nodes_expanded,
        complete_sets_visited: report.complete_sets_visited,
        budget_exhausted: report.budget_exhausted,
        count: report.sets.len(),
        sets: report.sets.iter().map(|s| ClassSetRecord::from_set(s, None)).collect(),
    };
    let mut manifest = ctx.manifest("unext");
    manifest.p = Some(p.get());
    manifest.seed = args.seed;
    manifest.budget = Some(args.budget);
    emit(&args.out, &payload, manifest, start)
}

#[derive(Debug, Serialize)]
struct EigenstateReport {
    new_class: usize,
    label: Vec<u8>,
    report: EntropyReport,
}

#[derive(Debug, Serialize)]
struct SampledFamily {
    family: String,
    #[serde(rename = "L")]
    num_bases: usize,
    check: BoundCheck,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct EurReport {
    schema: u32,
    p: u32,
    subset: Vec<usize>,
    #[serde(rename = "L")]
    num_bases: usize,
    bound_h1: f64,
    bound_h2: f64,
    new_classes: Vec<ClassRecord>,
    eigenstates: Vec<EigenstateReport>,
    all_saturated: bool,
    sampled: Vec<SampledFamily>,
    bounds_hold: bool,
}

struct EurOutcome {
    report: EurReport,
}

fn eur_for_subset(
    set: &ClassSet,
    subset: &[usize],
    samples: usize,
    seed: u64,
    tolerance: f64,
    lattice: &ClassLattice,
) -> Result<EurOutcome, CliError> {
    let p = set.prime();
    if samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    if let Some(&i) = subset.iter().find(|&&i| i >= set.len()) {
        return Err(MubError::IndexOutOfRange { index: i, len: set.len() }.into());
    }
    let chosen: Vec<&CommutingClass> = subset.iter().map(|&i| &set.classes()[i]).collect();
    let mut new = new_classes_from_subset(&chosen, lattice)?;
    if new.is_empty() {
        return Err(MubError::NoNewClass.into());
    }
    new.sort();
    let subset_bases = chosen.iter().map(|c| build_basis(c)).collect::<Result<Vec<Basis>, _>>()?;
    let all_bases = set.classes().iter().map(build_basis).collect::<Result<Vec<Basis>, _>>()?;
    let log_p = (p.get() as f64).log2();
    let mut eigenstates = Vec::new();
    for (k, class) in new.iter().enumerate() {
        let labels = build_basis(class)?.labels().to_vec();
        let reports = theorem3_check(&subset_bases, class)?;
        for (label, mut report) in labels.into_iter().zip(reports) {
            // Saturation here means every single entropy equals log₂ p.
            report.tolerance = tolerance;
            let exact = report.all_entropies_equal(log_p);
            report.saturated_h1 = exact && (report.avg_h1 - report.bound_h1).abs() <= tolerance;
            report.saturated_h2 = exact && (report.avg_h2 - report.bound_h2).abs() <= tolerance;
            eigenstates.push(EigenstateReport { new_class: k, label: label.entries().to_vec(), report });
        }
    }
    let all_saturated = eigenstates.iter().all(|e| e.report.saturated_h1 && e.report.saturated_h2);
    let mut sampled = Vec::new();
    for (family, bases) in [("subset", &subset_bases), ("input", &all_bases)] {
        if bases.len() < 2 {
            continue;
        }
        let check = sampled_bound_check(bases, samples, seed, tolerance)?;
        sampled.push(SampledFamily { family: family.into(), num_bases: bases.len(), holds: check.holds(), check });
    }
    let bounds_hold = sampled.iter().all(|s| s.holds);
    let (bound_h1, bound_h2) = eur_bounds(subset_bases.len(), p)?;
    Ok(EurOutcome {
        report: EurReport {
            schema: SCHEMA_VERSION,
            p: p.get(),
            subset: subset.to_vec(),
            num_bases: subset_bases.len(),
            bound_h1,
            bound_h2,
            new_classes: new.iter().map(ClassRecord::from).collect(),
            eigenstates,
            all_saturated,
            sampled,
            bounds_hold,
        },
    })
}

pub fn cmd_eur(args: &EurArgs, ctx: &Context) -> Result<(), CliError> {
    let start = Instant::now();
    let (_, set, hash) = read_class_set(&args.input)?;
    let lattice = ctx.lattice(set.prime())?;
    let outcome = eur_for_subset(&set, &args.subset, args.samples, args.seed, args.tolerance, &lattice)?;
    let mut manifest = ctx.manifest("eur");
    manifest.p = Some(set.prime().get());
    manifest.seed = Some(args.seed);
    manifest.tolerances.entropy = args.tolerance;
    manifest.inputs.push(hash);
    let (saturated, holds) = (outcome.report.all_saturated, outcome.report.bounds_hold);
    emit(&args.out, &outcome.report, manifest, start)?;
    if !saturated {
        return Err(CliError::Verification("some eigenstate does not saturate the bounds".into()));
    }
    if !holds {
        return Err(CliError::Verification("a sampled state violates an entropy bound".into()));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ProbeReport {
    schema: u32,
    p: u32,
    num_bases: usize,
    subset: Option<Vec<usize>>,
    restarts: usize,
    seed: u64,
    max_iters: usize,
    min_value: f64,
    best_restart: usize,
    restart_values: Vec<f64>,
    argmin: StateRecord,
    note: &'static str,
}

pub fn cmd_probe_strong(args: &ProbeArgs, ctx: &Context) -> Result<(), CliError> {
    let start = Instant::now();
    let (_, set, hash) = read_class_set(&args.input)?;
    let p = set.prime();
    let classes: Vec<&CommutingClass> = match &args.subset {
        Some(idx) => idx
            .iter()
            .map(|&i| set.classes().get(i).ok_or(MubError::IndexOutOfRange { index: i, len: set.len() }))
            .collect::<Result<_, _>>()?,
        None => set.classes().iter().collect(),
    };
    let bases = classes.iter().map(|c| build_basis(c)).collect::<Result<Vec<Basis>, _>>()?;
    let cfg =
        ProbeConfig { restarts: args.restarts, seed: args.seed, max_iters: args.max_iters, ..ProbeConfig::default() };
    let result = strong_unext_probe(&bases, &cfg)?;
    let payload = ProbeReport {
        schema: SCHEMA_VERSION,
        p: p.get(),
        num_bases: bases.len(),
        subset: args.subset.clone(),
        restarts: args.restarts,
        seed: args.seed,
        max_iters: args.max_iters,
        min_value: result.min_value,
        best_restart: result.best_restart,
        restart_values: result.restart_values,
        argmin: StateRecord {
            label: Vec::new(),
            re: result.argmin.iter().map(|a| a.re).collect(),
            im: result.argmin.iter().map(|a| a.im).collect(),
        },
        note: "numerical evidence from local descent, not a proof",
    };
    let mut manifest = ctx.manifest("probe-strong");
    manifest.p = Some(p.get());
    manifest.seed = Some(args.seed);
    manifest.inputs.push(hash);
    emit(&args.out, &payload, manifest, start)
}

#[derive(Debug, Serialize)]
struct ReplayCheck {
    artifact: String,
    status: &'static str,
    detail: String,
}

#[derive(Debug, Serialize)]
struct ReplaySummary {
    schema: u32,
    p: u32,
    fixture_sha256: String,
    checks: Vec<ReplayCheck>,
    all_match: bool,
}

struct Replay<'a> {
    golden: &'a Golden,
    lattice: &'a ClassLattice,
    checks: Vec<ReplayCheck>,
}

impl Replay<'_> {
    fn check(&mut self, artifact: &str, ok: bool, detail: impl Into<String>) {
        let status = if ok { "match" } else { "mismatch" };
        self.checks.push(ReplayCheck { artifact: artifact.into(), status, detail: detail.into() });
    }

    fn names(&self, set: &ClassSet) -> Vec<String> {
        set.classes()
            .iter()
            .enumerate()
            .map(|(i, c)| self.golden.name_of(c).map_or_else(|| format!("unnamed{i}"), str::to_string))
            .collect()
    }

    fn record(&self, set: &ClassSet) -> ClassSetRecord {
        ClassSetRecord::from_set(set, Some(&self.names(set)))
    }

    fn compare_set(&mut self, artifact: &str, ours: &ClassSet) -> Result<(), CliError> {
        let theirs = self.golden.set(artifact).map_err(|e| CliError::Verification(format!("{artifact}: {e}")))?;
        let same = ours.same_classes(theirs);
        self.check(artifact, same, format!("{} classes", ours.len()));
        Ok(())
    }

    fn certify(&mut self, artifact: &str, set: ClassSet) -> Result<ClassSet, CliError> {
        let expected = self.golden.set(artifact).ok().and_then(|s| s.certificate());
        match certify_unextendible(&set, self.lattice) {
            Certification::Unextendible(cert) => {
                let ok = expected == Some(cert);
                self.check(
                    &format!("{artifact}.certificate"),
                    ok,
                    format!(
                        "residual {} words, {} Lagrangians checked",
                        cert.residual_word_count, cert.lagrangians_checked
                    ),
                );
                ClassSet::from_parts(
                    set.prime(),
                    mubforge::SetKind::CertifiedUnextendible,
                    set.classes().to_vec(),
                    Some(cert),
                    None,
                )
                .map_err(CliError::from)
            }
            Certification::Extendible { witness } => {
                self.check(&format!("{artifact}.certificate"), false, format!("extendible by {witness:?}"));
                Ok(set)
            }
        }
    }
}

fn subset_positions(golden: &Golden, subset: &str, within: &ClassSet) -> Result<Vec<usize>, CliError> {
    let names = golden.subset(subset).map_err(|e| CliError::Verification(e.to_string()))?;
    names
        .iter()
        .map(|n| {
            let c = golden.class(n).map_err(|e| CliError::Verification(e.to_string()))?;
            within
                .classes()
                .iter()
                .position(|d| d == c)
                .ok_or_else(|| CliError::Verification(format!("subset {subset}: class {n} not present")))
        })
        .collect()
}

pub fn cmd_replay_paper(args: &ReplayArgs, ctx: &Context) -> Result<(), CliError> {
    let start = Instant::now();
    let (text, fixture_hash) = match &args.fixture {
        Some(path) => read_input(path)?,
        None => (
            WORKED_P3_JSON.to_string(),
            FileHash::of_bytes(Path::new("<built-in worked_p3.json>"), WORKED_P3_JSON.as_bytes()),
        ),
    };
    let p = prime(3)?;
    let lattice = ctx.lattice(p)?;
    let golden =
        Golden::parse(&text, Some(&lattice)).map_err(|e| CliError::Verification(format!("fixture invalid: {e}")))?;
    if golden.p != p {
        return Err(CliError::Verification(format!("fixture has p = {}, expected 3", golden.p)));
    }
    let mut replay = Replay { golden: &golden, lattice: &lattice, checks: Vec::new() };
    let mut outputs: Vec<(String, String)> = Vec::new();

    // The complete set: rebuilt from its generators, re-validated as an exact
    // cover, and located among all complete sets found by exhaustive search.
    let fixture_complete = golden.set("complete").map_err(|e| CliError::Verification(e.to_string()))?;
    let complete = ClassSet::complete(p, fixture_complete.classes().to_vec())
        .map_err(|e| CliError::Verification(format!("complete: {e}")))?;
    let mut found = false;
    let mut search = CompleteSetSearch::new(&lattice, TieBreak::Canonical, u64::MAX);
    let _ = search.run(|chosen| {
        let mut classes: Vec<CommutingClass> = chosen.iter().map(|&i| lattice.classes()[i].clone()).collect();
        classes.sort();
        found = classes == complete.sorted_classes();
        if found {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    replay.check("complete", found && complete.covered().len() == 80, "80 words covered, found by exhaustive search");
    outputs.push(("complete.json".into(), to_json(&replay.record(&complete))));

    let first = subset_positions(&golden, "first", &complete)?;
    let chosen: Vec<&CommutingClass> = first.iter().map(|&i| &complete.classes()[i]).collect();
    let mut new_first = new_classes_from_subset(&chosen, &lattice)?;
    new_first.sort();
    let new_first = ClassSet::candidate(p, new_first)?;
    replay.compare_set("new_from_first", &new_first)?;
    outputs.push(("new_from_first.json".into(), to_json(&replay.record(&new_first))));

    let eight = assemble_unextendible(&complete, &first, &lattice)?;
    replay.compare_set("unextendible_8", &eight)?;
    let eight = replay.certify("unextendible_8", eight)?;
    outputs.push(("unextendible_8.json".into(), to_json(&replay.record(&eight))));

    let second = subset_positions(&golden, "second", &eight)?;
    let chosen: Vec<&CommutingClass> = second.iter().map(|&i| &eight.classes()[i]).collect();
    let mut new_second = new_classes_from_subset(&chosen, &lattice)?;
    new_second.sort();
    let new_second = ClassSet::candidate(p, new_second)?;
    replay.compare_set("new_from_second", &new_second)?;
    outputs.push(("new_from_second.json".into(), to_json(&replay.record(&new_second))));

    let five = assemble_unextendible(&eight, &second, &lattice)?;
    replay.compare_set("unextendible_5", &five)?;
    let five = replay.certify("unextendible_5", five)?;
    outputs.push(("unextendible_5.json".into(), to_json(&replay.record(&five))));

    let eur = eur_for_subset(&complete, &first, 1000, 0, args.tolerance, &lattice)?;
    replay.check(
        "saturation",
        eur.report.all_saturated && eur.report.bounds_hold,
        format!("{} eigenstates against {} bases", eur.report.eigenstates.len(), eur.report.num_bases),
    );
    outputs.push(("saturation.json".into(), to_json(&eur.report)));

    let all_match = replay.checks.iter().all(|c| c.status == "match");
    let failures: Vec<String> =
        replay.checks.iter().filter(|c| c.status != "match").map(|c| c.artifact.clone()).collect();
    let summary = ReplaySummary {
        schema: SCHEMA_VERSION,
        p: p.get(),
        fixture_sha256: fixture_hash.sha256.clone(),
        checks: replay.checks,
        all_match,
    };
    outputs.push(("replay.json".into(), to_json(&summary)));

    let mut manifest = ctx.manifest("replay-paper");
    manifest.p = Some(p.get());
    manifest.seed = Some(0);
    manifest.tolerances.entropy = args.tolerance;
    manifest.inputs.push(fixture_hash);
    for (name, body) in &outputs {
        manifest.outputs.push(write_file(&args.out.join(name), body)?);
    }
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    write_manifest(&args.out.join("manifest.json"), &manifest)?;
    if !all_match {
        return Err(CliError::Verification(format!("replay mismatch: {}", failures.join(", "))));
    }
    Ok(())
}

pub fn dispatch(cli: &Cli, ctx: &Context) -> Result<(), CliError> {
    match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, ctx),
        Command::Complete(a) => cmd_complete(a, ctx),
        Command::Unext(a) => cmd_unext(a, ctx),
        Command::Eur(a) => cmd_eur(a, ctx),
        Command::ReplayPaper(a) => cmd_replay_paper(a, ctx),
        Command::ProbeStrong(a) => cmd_probe_strong(a, ctx),
    }
}

/// Parses `argv`, runs the command, and returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let result = Context::from_env(args).and_then(|ctx| dispatch(&cli, &ctx));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mubforge: {e}");
            e.exit_code()
        }
    }
}
