//! Command-line driver: configure a run, search for arcs, persist
//! certificates and result records, re-verify certificates, produce code
//! reports and aggregate result tables.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hjelmslev::cert::{digest, verify_certificate, ArcCertificate, GroupConfig, SolverInfo};
use hjelmslev::orbits::{condense, orbits, OrbitPartition};
use hjelmslev::par;
use hjelmslev::plane::Plane;
use hjelmslev::report::{code_report, render_csv, render_table, CodeReport, ResultRecord, ResultsFile};
use hjelmslev::ring::{ring_from_name, GaloisRing};
use hjelmslev::search::{
    expand, extend, maximize, multiset_size, solve_fixed_n, verify, ArcKind, ArcSolution, Budget,
    FixedOutcome, PointMultiset, SearchMode, SearchProblem,
};

mod reproduce;

#[derive(Parser)]
#[command(
    name = "hjarcs",
    about = "arc search in projective Hjelmslev planes over Galois rings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for (n,u)-arcs and write certificates
    Search(SearchArgs),
    /// Re-verify one or more certificate files
    Verify {
        /// certificate paths
        certs: Vec<PathBuf>,
    },
    /// Analyze the code generated by a certificate's arc
    CodeReport {
        cert: PathBuf,
        /// directory for the JSON report (defaults next to the certificate)
        #[arg(long)]
        out: Option<PathBuf>,
        /// cap on full code enumeration
        #[arg(long, default_value_t = hjelmslev::codes::DEFAULT_MAX_CODEWORDS)]
        max_codewords: u64,
        /// write the Gray-image words as digit rows to this file
        #[arg(long)]
        export_words: Option<PathBuf>,
    },
    /// Aggregate results.json into an aligned table and CSV
    Table {
        /// results directory (containing results.json)
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the full reproduction pipeline and report pass/fail per step
    ReproducePaper {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

#[derive(Args, Clone, Default)]
struct SearchArgs {
    /// declarative run configuration (JSON); flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// ring name: Z8, F9, GR(16,4) or a GR(p^m=..,q=..,f=[..]) spec
    #[arg(long)]
    ring: Option<String>,
    /// group directive: trivial or singer (explicit generators via config)
    #[arg(long)]
    group: Option<String>,
    /// maximum collinear count u, or an inclusive range like 2..12
    #[arg(long)]
    u: Option<String>,
    /// target arc size (switches to fixed-n mode unless --mode says otherwise)
    #[arg(long)]
    n: Option<u64>,
    /// fixed-n | maximize
    #[arg(long)]
    mode: Option<String>,
    /// allow point multiplicities (multiarcs)
    #[arg(long)]
    multiarc: bool,
    /// cap on per-orbit multiplicity in multiarc mode (default u)
    #[arg(long)]
    multiarc_cap: Option<u32>,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// worker threads (0 = default pool)
    #[arg(long)]
    workers: Option<usize>,
    /// greedily extend the found arc to an extension-maximal one
    #[arg(long)]
    extend: bool,
    /// output directory for certificates and results.json
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Declarative run configuration; the file form of `SearchArgs`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    ring: Option<String>,
    group: Option<GroupConfig>,
    u: Option<String>,
    n: Option<u64>,
    mode: Option<String>,
    multiarc: bool,
    multiarc_cap: Option<u32>,
    budget_nodes: Option<u64>,
    budget_seconds: Option<f64>,
    workers: usize,
    extend: bool,
    out: Option<String>,
}

impl RunConfig {
    fn from_args(args: &SearchArgs) -> anyhow::Result<RunConfig> {
        let mut config = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(ring) = &args.ring {
            config.ring = Some(ring.clone());
        }
        if let Some(group) = &args.group {
            config.group = Some(GroupConfig::Directive(group.clone()));
        }
        if let Some(u) = &args.u {
            config.u = Some(u.clone());
        }
        if let Some(n) = args.n {
            config.n = Some(n);
        }
        if let Some(mode) = &args.mode {
            config.mode = Some(mode.clone());
        }
        if args.multiarc {
            config.multiarc = true;
        }
        if let Some(cap) = args.multiarc_cap {
            config.multiarc_cap = Some(cap);
        }
        if let Some(b) = args.budget_nodes {
            config.budget_nodes = Some(b);
        }
        if let Some(b) = args.budget_seconds {
            config.budget_seconds = Some(b);
        }
        if let Some(w) = args.workers {
            config.workers = w;
        }
        if args.extend {
            config.extend = true;
        }
        if let Some(out) = &args.out {
            config.out = Some(out.display().to_string());
        }
        Ok(config)
    }

    fn u_values(&self) -> anyhow::Result<Vec<u32>> {
        let spec = self
            .u
            .as_deref()
            .ok_or_else(|| anyhow!("missing required parameter: u"))?;
        if let Some((lo, hi)) = spec.split_once("..") {
            let lo: u32 = lo.trim().parse().context("bad u range start")?;
            let hi: u32 = hi.trim().parse().context("bad u range end")?;
            if lo < 1 || hi < lo {
                bail!("invalid u range {}..{}", lo, hi);
            }
            Ok((lo..=hi).collect())
        } else {
            let u: u32 = spec.trim().parse().context("bad u value")?;
            if u < 1 {
                bail!("u must be >= 1");
            }
            Ok(vec![u])
        }
    }
}

/// Everything a run needs, built once per ring/group pair.
struct Workspace {
    ring: GaloisRing,
    plane: Plane,
    partition: OrbitPartition,
    system: hjelmslev::orbits::CondensedSystem,
    group: GroupConfig,
}

impl Workspace {
    fn build(ring_name: &str, group: &GroupConfig) -> anyhow::Result<Workspace> {
        let ring = ring_from_name(ring_name)?;
        let plane = Plane::new(&ring)?;
        let directive = group.to_directive(&ring)?;
        let generators = directive.generators(&ring)?;
        let partition = orbits(&generators, &plane)?;
        let system = condense(&plane, &partition);
        Ok(Workspace {
            ring,
            plane,
            partition,
            system,
            group: group.clone(),
        })
    }
}

enum RunStatus {
    Found,
    NotFound,
    Inconclusive,
}

struct RunOutput {
    status: RunStatus,
    record: Option<ResultRecord>,
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect::<String>()
        .trim_matches('-')
        .replace("--", "-")
}

/// One search run: solve, optionally extend, verify, certify, record.
#[allow(clippy::too_many_arguments)]
fn run_search(
    ws: &Workspace,
    u: u32,
    config: &RunConfig,
    out_dir: &Path,
    results: &mut ResultsFile,
) -> anyhow::Result<RunOutput> {
    let mode = match (config.mode.as_deref(), config.n) {
        (Some("fixed-n"), Some(n)) => SearchMode::FixedN(n),
        (Some("fixed-n"), None) => bail!("fixed-n mode needs --n"),
        (Some("maximize"), _) | (None, None) => SearchMode::Maximize,
        (None, Some(n)) => SearchMode::FixedN(n),
        (Some(other), _) => bail!("unknown mode '{}'", other),
    };
    let kind = if config.multiarc {
        ArcKind::Multiarc {
            cap: config.multiarc_cap,
        }
    } else {
        ArcKind::Projective
    };
    let budget = Budget {
        max_nodes: config.budget_nodes,
        max_seconds: config.budget_seconds,
    };
    let problem = SearchProblem {
        system: &ws.system,
        u,
        mode,
        kind,
        budget,
    };

    let start = Instant::now();
    let (solution, optimal, nodes, status): (Option<ArcSolution>, bool, u64, RunStatus) = match mode
    {
        SearchMode::FixedN(_) => {
            let result = solve_fixed_n(&problem);
            match result.outcome {
                FixedOutcome::Found(sol) => (Some(sol), false, result.nodes, RunStatus::Found),
                FixedOutcome::Infeasible => (None, true, result.nodes, RunStatus::NotFound),
                FixedOutcome::Inconclusive => (None, false, result.nodes, RunStatus::Inconclusive),
            }
        }
        SearchMode::Maximize => {
            let result = maximize(&problem);
            let status = if result.best.is_some() {
                RunStatus::Found
            } else if result.optimal {
                RunStatus::NotFound
            } else {
                RunStatus::Inconclusive
            };
            (result.best, result.optimal, result.nodes, status)
        }
    };
    let seconds = start.elapsed().as_secs_f64();

    let Some(solution) = solution else {
        let label = match status {
            RunStatus::NotFound => "no arc exists",
            _ => "inconclusive (budget exhausted)",
        };
        println!(
            "{} {} u={}: {} ({} nodes, {:.2}s)",
            ws.ring.display_name(),
            ws.group.label(),
            u,
            label,
            nodes,
            seconds
        );
        return Ok(RunOutput {
            status,
            record: None,
        });
    };

    let mut points = expand(&solution.x, &ws.partition);
    let mut extended = false;
    if config.extend {
        let grown = extend(&points, &ws.plane, u)?;
        if multiset_size(&grown) > multiset_size(&points) {
            points = grown;
            extended = true;
        }
    }
    let n = multiset_size(&points);

    // soundness gate: every reported arc must pass independent verification
    let report = verify(&points, &ws.plane, u)?;
    if !report.is_arc {
        bail!(
            "internal error: solver output fails verification (max line count {})",
            report.max_line_count
        );
    }

    let run_desc = format!(
        "ring={};group={:?};u={};mode={:?};kind={:?};extend={}",
        ws.ring.spec_string(),
        ws.group,
        u,
        mode,
        kind,
        extended,
    );
    let run_digest = digest(&run_desc);
    let mode_label = match mode {
        SearchMode::FixedN(_) => "fixed-n",
        SearchMode::Maximize => "maximize",
    };
    let cert = ArcCertificate::build(
        &ws.ring,
        &ws.plane,
        ws.group.clone(),
        u,
        &points,
        config.multiarc,
        extended,
        if extended { None } else { Some(&solution) },
        SolverInfo {
            mode: mode_label.into(),
            budget_nodes: config.budget_nodes,
            budget_seconds: config.budget_seconds,
            nodes,
            attains_u: report.attains_u,
        },
    )?;
    std::fs::create_dir_all(out_dir)?;
    let filename = format!(
        "{}_{}_u{}_n{}_{}.json",
        slug(&ws.ring.display_name()),
        slug(&ws.group.label()),
        u,
        n,
        &run_digest[..8],
    );
    let cert_path = out_dir.join(&filename);
    cert.save(&cert_path)?;

    let record = ResultRecord {
        ring: ws.ring.display_name(),
        group: ws.group.label(),
        u,
        n,
        mode: mode_label.into(),
        arc_kind: cert.arc_kind.clone(),
        optimal,
        extended,
        nodes,
        seconds,
        certificate: filename.clone(),
        digest: run_digest,
    };
    results.upsert(record.clone());
    println!(
        "{} {} u={}: n={}{}{} -> {} ({} nodes, {:.2}s)",
        ws.ring.display_name(),
        ws.group.label(),
        u,
        n,
        if extended { " (extended)" } else { "" },
        if optimal { " (optimal)" } else { "" },
        filename,
        nodes,
        seconds
    );
    Ok(RunOutput {
        status: RunStatus::Found,
        record: Some(record),
    })
}

fn cmd_search(args: &SearchArgs) -> anyhow::Result<i32> {
    let config = RunConfig::from_args(args)?;
    let ring_name = config
        .ring
        .clone()
        .ok_or_else(|| anyhow!("missing required parameter: ring"))?;
    let group = config
        .group
        .clone()
        .unwrap_or_else(|| GroupConfig::Directive("trivial".into()));
    let u_values = config.u_values()?;
    let out_dir = PathBuf::from(config.out.clone().unwrap_or_else(|| "out".into()));
    let workers = config.workers;

    par::run_with_workers(workers, || -> anyhow::Result<i32> {
        let ws = Workspace::build(&ring_name, &group)?;
        std::fs::create_dir_all(&out_dir)?;
        let results_path = out_dir.join("results.json");
        let mut results = ResultsFile::load(&results_path)?;
        let mut any_inconclusive = false;
        let mut all_found = true;
        for &u in &u_values {
            let output = run_search(&ws, u, &config, &out_dir, &mut results)?;
            match output.status {
                RunStatus::Found => {}
                RunStatus::NotFound => all_found = false,
                RunStatus::Inconclusive => {
                    all_found = false;
                    any_inconclusive = true;
                }
            }
        }
        results.save(&results_path)?;
        Ok(if all_found {
            0
        } else if any_inconclusive {
            3
        } else {
            2
        })
    })
}

fn cmd_verify(certs: &[PathBuf]) -> anyhow::Result<i32> {
    if certs.is_empty() {
        bail!("no certificates given");
    }
    let mut failures = 0;
    for path in certs {
        let cert = match ArcCertificate::load(path) {
            Ok(cert) => cert,
            Err(e) => {
                failures += 1;
                println!("FAIL {} (unreadable: {})", path.display(), e);
                continue;
            }
        };
        match verify_certificate(&cert) {
            Ok(report) if report.pass => {
                let secants: Vec<String> = report
                    .secant
                    .iter()
                    .filter(|&(_, &c)| c > 0)
                    .map(|(k, c)| format!("{}:{}", k, c))
                    .collect();
                println!(
                    "PASS {} (n={}, u={}, max line count {}, secants {{{}}})",
                    path.display(),
                    cert.n,
                    cert.u,
                    report.report.max_line_count,
                    secants.join(", ")
                );
            }
            Ok(report) => {
                failures += 1;
                println!("FAIL {}", path.display());
                for issue in &report.issues {
                    println!("  - {}", issue);
                }
            }
            Err(e) => {
                failures += 1;
                println!("FAIL {} (malformed: {})", path.display(), e);
            }
        }
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_code_report(
    cert_path: &Path,
    out: Option<&Path>,
    max_codewords: u64,
    export_words: Option<&Path>,
) -> anyhow::Result<i32> {
    let cert = ArcCertificate::load(cert_path)?;
    let verification = verify_certificate(&cert)?;
    if !verification.pass {
        bail!(
            "certificate fails verification, refusing to analyze: {:?}",
            verification.issues
        );
    }
    let ring = GaloisRing::from_spec_string(&cert.ring)?;
    let plane = Plane::new(&ring)?;
    let points: PointMultiset = cert.point_multiset(&ring, &plane)?;
    let report: CodeReport = code_report(&points, &plane, max_codewords)?;
    print!("{}", report.render_text());
    let out_dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cert_path.parent().unwrap_or(Path::new(".")).to_path_buf());
    std::fs::create_dir_all(&out_dir)?;
    let stem = cert_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("code");
    let report_path = out_dir.join(format!("{}_code.json", stem));
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    println!("report written to {}", report_path.display());
    if let Some(words_path) = export_words {
        let text = CodeReport::export_words(&points, &plane, max_codewords)?;
        std::fs::write(words_path, text)?;
        println!("gray words written to {}", words_path.display());
    }
    Ok(0)
}

fn cmd_table(out: &Path) -> anyhow::Result<i32> {
    let results_path = out.join("results.json");
    let results = ResultsFile::load(&results_path)?;
    if results.records.is_empty() {
        println!("(no results in {})", results_path.display());
        return Ok(0);
    }
    // every printed number must be backed by a re-verifying certificate
    let mut verified: BTreeMap<String, bool> = BTreeMap::new();
    let mut failures = 0;
    for record in &results.records {
        let cert_path = out.join(&record.certificate);
        let entry = verified.entry(record.certificate.clone());
        if let std::collections::btree_map::Entry::Vacant(v) = entry {
            let ok = ArcCertificate::load(&cert_path)
                .and_then(|c| verify_certificate(&c))
                .map(|r| r.pass && r.report.max_line_count <= record.u as u64)
                .unwrap_or(false);
            if !ok {
                eprintln!(
                    "certificate {} fails re-verification; excluding",
                    record.certificate
                );
                failures += 1;
            }
            v.insert(ok);
        }
    }
    let good: Vec<ResultRecord> = results
        .records
        .iter()
        .filter(|r| verified.get(&r.certificate).copied().unwrap_or(false))
        .cloned()
        .collect();
    let table = render_table(&good);
    let csv = render_csv(&good);
    print!("{}", table);
    std::fs::write(out.join("table.txt"), &table)?;
    std::fs::write(out.join("table.csv"), &csv)?;
    println!("written {} and table.csv", out.join("table.txt").display());
    Ok(if failures == 0 { 0 } else { 1 })
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Search(args) => cmd_search(args),
        Command::Verify { certs } => cmd_verify(certs),
        Command::CodeReport {
            cert,
            out,
            max_codewords,
            export_words,
        } => cmd_code_report(cert, out.as_deref(), *max_codewords, export_words.as_deref()),
        Command::Table { out } => cmd_table(out),
        Command::ReproducePaper { out, workers } => reproduce::run(out, *workers),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            std::process::exit(64);
        }
    }
}
