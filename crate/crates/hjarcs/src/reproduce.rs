//! The `reproduce-paper` subcommand: runs the whole pipeline end to end at
//! reference scale and prints one PASS/FAIL line per step.

use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail};

use hjelmslev::cert::{verify_certificate, ArcCertificate, GroupConfig};
use hjelmslev::codes::griesmer_step;
use hjelmslev::par;
use hjelmslev::plane::Plane;
use hjelmslev::report::{code_report, ResultsFile};
use hjelmslev::ring::ring_from_name;
use hjelmslev::search::verify;

use crate::{run_search, RunConfig, RunStatus, Workspace};

struct Stepper {
    failures: usize,
}

impl Stepper {
    fn check(&mut self, name: &str, result: anyhow::Result<String>) {
        match result {
            Ok(detail) => println!("PASS {}: {}", name, detail),
            Err(e) => {
                self.failures += 1;
                println!("FAIL {}: {:#}", name, e);
            }
        }
    }
}

pub fn run(out: &Path, workers: usize) -> anyhow::Result<i32> {
    par::run_with_workers(workers, || run_inner(out))
}

fn search_config(group: &str, u: u32, n: Option<u64>, multiarc: bool, extend: bool) -> RunConfig {
    RunConfig {
        group: Some(GroupConfig::Directive(group.into())),
        u: Some(u.to_string()),
        n,
        mode: Some(if n.is_some() { "fixed-n" } else { "maximize" }.into()),
        multiarc,
        extend,
        ..RunConfig::default()
    }
}

fn run_inner(out: &Path) -> anyhow::Result<i32> {
    std::fs::create_dir_all(out)?;
    let results_path = out.join("results.json");
    let mut stepper = Stepper { failures: 0 };
    let start = Instant::now();

    // 1. plane cardinalities
    stepper.check("plane-cardinalities", (|| {
        let expected = [
            ("Z8", 112usize),
            ("Z9", 117),
            ("GR(16,4)", 336),
            ("Z16", 448),
            ("Z25", 775),
            ("Z27", 1053),
        ];
        for (name, count) in expected {
            let ring = ring_from_name(name)?;
            let plane = Plane::new(&ring)?;
            if plane.num_points() != count || plane.num_lines() != count {
                bail!(
                    "{}: got {} points / {} lines, expected {}",
                    name,
                    plane.num_points(),
                    plane.num_lines(),
                    count
                );
            }
        }
        Ok("|P| = |L| = 112, 117, 336, 448, 775, 1053".into())
    })());

    // 2. Singer orbit structure on PHG(2, GR(16,4))
    let gr16 = Workspace::build("GR(16,4)", &GroupConfig::Directive("singer".into()))?;
    stepper.check("singer-orbit-structure", (|| {
        let orbits = &gr16.partition.point_orbits;
        if orbits.len() != 16 || orbits.iter().any(|o| o.len() != 21) {
            bail!("expected 16 point orbits of length 21, got {}", orbits.len());
        }
        for orbit in orbits {
            let mut classes: Vec<usize> = orbit
                .iter()
                .map(|&p| gr16.plane.neighbor_class(p as usize))
                .collect();
            classes.sort_unstable();
            classes.dedup();
            if classes.len() != 21 {
                bail!("an orbit misses neighborhood classes");
            }
            let points: Vec<(u32, u32)> = orbit.iter().map(|&p| (p, 1)).collect();
            let report = verify(&points, &gr16.plane, 2)?;
            if !report.is_arc || !report.attains_u {
                bail!("an orbit is not a (21,2)-arc");
            }
        }
        Ok("16 orbits x 21, class transversals, all (21,2)-arcs".into())
    })());

    // 3. the (126,8)-arc
    let mut results = ResultsFile::load(&results_path)?;
    let config = search_config("singer", 8, Some(126), false, false);
    let arc126 = run_search(&gr16, 8, &config, out, &mut results)?;
    results.save(&results_path)?;
    let arc126_record = arc126.record.clone();
    stepper.check("arc-126-8", (|| {
        if !matches!(arc126.status, RunStatus::Found) {
            bail!("no (126,8)-arc found");
        }
        let record = arc126_record.as_ref().ok_or_else(|| anyhow!("no record"))?;
        let cert = ArcCertificate::load(&out.join(&record.certificate))?;
        let selected = cert
            .orbit_selection
            .as_ref()
            .ok_or_else(|| anyhow!("certificate lacks orbit selection"))?
            .iter()
            .filter(|&&v| v == 1)
            .count();
        if selected != 6 {
            bail!("expected 6 selected orbits, got {}", selected);
        }
        let verification = verify_certificate(&cert)?;
        if !verification.pass {
            bail!("certificate fails: {:?}", verification.issues);
        }
        let expect: std::collections::BTreeMap<u64, u64> =
            [(0u64, 21u64), (8, 315)].into_iter().collect();
        if verification.secant != expect {
            bail!("secant distribution {:?}", verification.secant);
        }
        // neighborhood distribution: 6 arc points per class
        let ring = ring_from_name("GR(16,4)")?;
        let plane = Plane::new(&ring)?;
        let points = cert.point_multiset(&ring, &plane)?;
        let mut per_class = vec![0u32; plane.num_neighbor_classes()];
        for &(p, m) in &points {
            per_class[plane.neighbor_class(p as usize)] += m;
        }
        if per_class.iter().any(|&c| c != 6) {
            bail!("neighborhood distribution is not constant 6");
        }
        Ok("6 orbits, secants {0:21, 8:315}, 6 points per class".into())
    })());

    // 4. the code pipeline on the (126,8)-arc
    stepper.check("code-pipeline", (|| {
        let record = arc126_record
            .as_ref()
            .ok_or_else(|| anyhow!("needs the (126,8)-arc"))?;
        let cert = ArcCertificate::load(&out.join(&record.certificate))?;
        let ring = ring_from_name("GR(16,4)")?;
        let plane = Plane::new(&ring)?;
        let points = cert.point_multiset(&ring, &plane)?;
        let report = code_report(&points, &plane, 1 << 22)?;
        let expect_enum = vec![(0u64, 1u64), (376, 3780), (384, 63), (408, 252)];
        if report.enumerator != expect_enum {
            bail!("enumerator {:?}", report.enumerator);
        }
        let mut ktypes = report.ktypes.clone();
        ktypes.sort();
        let expect_ktypes = vec![
            (vec![96u64, 22, 8], 315u64),
            (vec![96, 30, 0], 21),
        ];
        if ktypes != expect_ktypes {
            bail!("k-types {:?}", ktypes);
        }
        let gray = report.gray.as_ref().ok_or_else(|| anyhow!("no gray image"))?;
        if gray.size != 4096
            || gray.length != 504
            || gray.min_distance != 376
            || !gray.distance_invariant
            || gray.linear
        {
            bail!(
                "gray image [{},{},{}], invariant={}, linear={}",
                gray.length,
                gray.size,
                gray.min_distance,
                gray.distance_invariant,
                gray.linear
            );
        }
        let path = out.join(format!(
            "{}_code.json",
            record.certificate.trim_end_matches(".json")
        ));
        std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
        Ok("[126,3] code, enumerator ok, gray [504,6,376] nonlinear distance-invariant".into())
    })());

    // 5. one-step Griesmer residual
    stepper.check("griesmer-step", (|| {
        let step = griesmer_step(4, 504, 6, 376)?;
        if step != (128, 5, 94) {
            bail!("got {:?}", step);
        }
        Ok("(4,504,6,376) -> (128,5,94)".into())
    })());

    // 6. the (155,8)-multiarc over Z25
    stepper.check("multiarc-155-8", (|| {
        let z25 = Workspace::build("Z25", &GroupConfig::Directive("singer".into()))?;
        if z25.partition.point_orbits.len() != 25
            || z25.partition.point_orbits.iter().any(|o| o.len() != 31)
        {
            bail!("expected 25 orbits of length 31");
        }
        let config = search_config("singer", 8, Some(155), true, false);
        let mut results = ResultsFile::load(&results_path)?;
        let outcome = run_search(&z25, 8, &config, out, &mut results)?;
        results.save(&results_path)?;
        if !matches!(outcome.status, RunStatus::Found) {
            bail!("no (155,8)-multiarc found");
        }
        let record = outcome.record.ok_or_else(|| anyhow!("no record"))?;
        let cert = ArcCertificate::load(&out.join(&record.certificate))?;
        let x = cert
            .orbit_selection
            .as_ref()
            .ok_or_else(|| anyhow!("no orbit selection"))?;
        let selected: Vec<u32> = x.iter().copied().filter(|&v| v > 0).collect();
        if selected.len() != 4 || selected.iter().filter(|&&v| v == 2).count() != 1 {
            bail!("selection {:?}, expected 4 orbits with one doubled", selected);
        }
        let verification = verify_certificate(&cert)?;
        if !verification.pass || verification.report.max_line_count != 8 {
            bail!("verification failed: {:?}", verification.issues);
        }
        Ok("4 orbits, one doubled; max line intersection 8 with multiplicities".into())
    })());

    // 7. small reference lower bounds
    let small_runs: Vec<(&str, &str, u32, u64)> = vec![
        ("Z8", "trivial", 2, 10),
        ("Z9", "trivial", 2, 9),
        ("GR(16,4)", "singer", 2, 21),
        ("Z16", "trivial", 2, 16),
        ("Z9", "trivial", 3, 19),
    ];
    for (ring_name, group, u, n) in small_runs {
        let name = format!("bound-{}-u{}-n{}", ring_name, u, n);
        stepper.check(&name, (|| {
            let ws = Workspace::build(ring_name, &GroupConfig::Directive(group.into()))?;
            let config = search_config(group, u, Some(n), false, false);
            let mut results = ResultsFile::load(&results_path)?;
            let outcome = run_search(&ws, u, &config, out, &mut results)?;
            results.save(&results_path)?;
            let record = match outcome.status {
                RunStatus::Found => outcome.record.ok_or_else(|| anyhow!("no record"))?,
                _ => bail!("no ({},{})-arc found", n, u),
            };
            if record.n < n {
                bail!("found only n = {}", record.n);
            }
            let cert = ArcCertificate::load(&out.join(&record.certificate))?;
            let verification = verify_certificate(&cert)?;
            if !verification.pass {
                bail!("certificate fails: {:?}", verification.issues);
            }
            Ok(format!("({},{})-arc certified", record.n, u))
        })());
    }

    // 8. aggregate table
    stepper.check("table", (|| {
        let code = crate::cmd_table(out)?;
        if code != 0 {
            bail!("table reported certificate failures");
        }
        Ok("table.txt and table.csv written".into())
    })());

    println!(
        "reproduction finished in {:.1}s with {} failure(s)",
        start.elapsed().as_secs_f64(),
        stepper.failures
    );
    Ok(if stepper.failures == 0 { 0 } else { 1 })
}
