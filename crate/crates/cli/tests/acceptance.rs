//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use tfclass_core::affine::{monomial, AffineBackend, AffineWindow, PidPrime, RingDescriptor};
use tfclass_core::exact::Field;
use tfclass_core::p1::{
    self, P1Backend, P1Classification, P1Window, SheafP1, TorfFamilyP1,
};
use tfclass_core::subcat::{self, Category, ClosureOp, Report, WindowIndex};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scratch_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = scratch_dir().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn tfclass(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tfclass"))
        .args(args)
        .output()
        .expect("run tfclass");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn class_labels(report: &Report) -> Vec<String> {
    report.classes.iter().map(|c| c.label.clone()).collect()
}

fn json_class_labels(text: &str) -> Result<Vec<String>, String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("bad report JSON: {e}"))?;
    Ok(v["classes"]
        .as_array()
        .ok_or("report has no classes")?
        .iter()
        .map(|c| c["label"].as_str().unwrap_or_default().to_string())
        .collect())
}

fn f2() -> Field {
    Field::prime(2).unwrap()
}

fn finite(ring: &str, len: u32) -> AffineBackend {
    AffineBackend::new(RingDescriptor::parse(ring).unwrap(), AffineWindow::Finite { max_length: len }).unwrap()
}

fn integers(exp: u32, rank: u32) -> AffineBackend {
    AffineBackend::new(
        RingDescriptor::parse("Z").unwrap(),
        AffineWindow::Pid { primes: vec![PidPrime::Int(2), PidPrime::Int(3)], max_exponent: exp, max_rank: rank },
    )
    .unwrap()
}

const Z_POOL: [&str; 6] = ["Z", "Z/2", "Z/4", "Z/3", "Z/9", "Z/6"];

fn full_pool<C: Category>(idx: &WindowIndex<'_, C>) -> Vec<usize> {
    (0..idx.len()).filter(|&i| i != idx.zero()).collect()
}

fn z_pool(b: &AffineBackend, idx: &WindowIndex<'_, AffineBackend>) -> Vec<usize> {
    Z_POOL
        .iter()
        .map(|t| idx.require(&b.ring.parse_module(t).unwrap()).unwrap())
        .collect()
}

fn require_pass(name: &str, r: &Report) -> Result<(), String> {
    ensure(r.pass, || format!("{name}: {} counterexamples, first {:?}", r.counterexamples.len(), r.counterexamples.first()))
}

fn criterion_1() -> Outcome {
    let cfg = write_config(
        "c1.toml",
        "space = \"F2[x,y]/(x^2,xy)\"\nobjects = [\"R\"]\n[window]\nbox_exponent = 2\nmax_summands = 2\n",
    );
    let cfg = cfg.to_str().unwrap();
    let (code, text) = tfclass(&["ass", cfg]);
    ensure(code == 0, || format!("ass exited {code}"))?;
    ensure(text.contains("Ass R = {(x), (x,y)}"), || format!("Ass R missing in {text}"))?;
    ensure(text.contains("Assh R = {(x)}"), || format!("Assh R missing in {text}"))?;
    let (code, text) = tfclass(&["verify", "serre-in-torf", cfg, "--set", "phi=ass"]);
    ensure(code == 0, || format!("serre-in-torf on Ass R exited {code}"))?;
    let ass = json_class_labels(&text)?;
    let want = ["AssClass({})", "AssClass({(x,y)})", "AssClass({(x), (x,y)})"];
    ensure(ass == want, || format!("Ass R classes {ass:?}"))?;
    let (code, text) = tfclass(&["verify", "serre-in-torf", cfg, "--set", "phi=assh"]);
    ensure(code == 0, || format!("serre-in-torf on Assh R exited {code}"))?;
    let assh = json_class_labels(&text)?;
    ensure(assh == ["AssClass({})", "AssClass({(x)})"], || format!("Assh R classes {assh:?}"))?;
    Ok("Ass R: 3 Serre subcategories (0, fl R, tf R); Assh R: 2".into())
}

fn criterion_2() -> Outcome {
    let cfg = write_config("c2.toml", "space = \"F2[x,y]/(xy)\"\nphi = \"min\"\n");
    let (code, dot) = tfclass(&["lattice", cfg.to_str().unwrap()]);
    ensure(code == 0, || format!("lattice exited {code}"))?;
    let nodes: Vec<&str> = dot.lines().filter(|l| l.contains("[label=")).collect();
    let edges: BTreeSet<&str> = dot.lines().filter(|l| l.contains("->")).map(str::trim).collect();
    let want_nodes = [
        "  n0 [label=\"{}\"];",
        "  n1 [label=\"{(x)}\"];",
        "  n2 [label=\"{(y)}\"];",
        "  n3 [label=\"{(x), (y)}\"];",
    ];
    ensure(nodes == want_nodes, || format!("nodes {nodes:?}"))?;
    let want_edges: BTreeSet<&str> = ["n0 -> n1;", "n0 -> n2;", "n1 -> n3;", "n2 -> n3;"].into();
    ensure(edges == want_edges, || format!("edges {edges:?}"))?;
    Ok("Boolean lattice on Min R = {(x), (y)}: 4 nodes, diamond".into())
}

struct AffineRuns {
    reports: Vec<(String, Report)>,
}

fn takahashi_runs(z6_len: u32, z_exp: u32, z_rank: u32) -> Result<AffineRuns, String> {
    let mut reports = Vec::new();
    let b = finite("Z/6", z6_len);
    let idx = WindowIndex::new(&b).map_err(|e| e.to_string())?;
    let r = subcat::verify_takahashi(&idx, &full_pool(&idx)).map_err(|e| e.to_string())?;
    reports.push(("Z/6".to_string(), r));
    let b = integers(z_exp, z_rank);
    let idx = WindowIndex::new(&b).map_err(|e| e.to_string())?;
    let r = subcat::verify_takahashi(&idx, &z_pool(&b, &idx)).map_err(|e| e.to_string())?;
    reports.push(("Z".to_string(), r));
    Ok(AffineRuns { reports })
}

fn criterion_3_with(z6_len: u32, z_exp: u32, z_rank: u32) -> Result<(String, Vec<Vec<String>>), String> {
    let runs = takahashi_runs(z6_len, z_exp, z_rank)?;
    for (name, r) in &runs.reports {
        require_pass(name, r)?;
        ensure(r.classes.len() == r.realizable || name == "Z", || {
            format!("{name}: {} classes, {} realizable", r.classes.len(), r.realizable)
        })?;
    }
    let z6 = &runs.reports[0].1;
    ensure(z6.classes.len() == 4, || format!("Z/6: {} classes", z6.classes.len()))?;
    let z = &runs.reports[1].1;
    ensure(z.classes.len() == z.realizable, || format!("Z: {} classes of {} Ass subsets", z.classes.len(), z.realizable))?;
    Ok((
        format!(
            "Z/6: {} subsets, 4 classes; Z: {} subsets, {} classes",
            z6.checked,
            z.checked,
            z.classes.len()
        ),
        runs.reports.iter().map(|(_, r)| class_labels(r)).collect(),
    ))
}

fn criterion_3() -> Outcome {
    criterion_3_with(3, 2, 1).map(|(s, _)| s)
}

fn criterion_4_with(z6_len: u32, z_exp: u32, z_rank: u32) -> Result<(String, Vec<Vec<String>>), String> {
    let b = finite("Z/6", z6_len);
    let idx = WindowIndex::new(&b).map_err(|e| e.to_string())?;
    let r1 = subcat::verify_gabriel_serre(&idx, &full_pool(&idx)).map_err(|e| e.to_string())?;
    require_pass("Z/6", &r1)?;
    let b = integers(z_exp, z_rank);
    let idx = WindowIndex::new(&b).map_err(|e| e.to_string())?;
    let r2 = subcat::verify_gabriel_serre(&idx, &z_pool(&b, &idx)).map_err(|e| e.to_string())?;
    require_pass("Z", &r2)?;
    Ok((
        format!(
            "{} torsion closures, all Serre and Supp-predicted ({} + {} classes)",
            r1.checked + r2.checked,
            r1.classes.len(),
            r2.classes.len()
        ),
        vec![class_labels(&r1), class_labels(&r2)],
    ))
}

fn criterion_4() -> Outcome {
    criterion_4_with(3, 2, 1).map(|(s, _)| s)
}

fn criterion_5_with(len: u32) -> Result<(String, Vec<Vec<String>>), String> {
    let mut labels = Vec::new();
    let mut checked = 0;
    for ring in ["Z/4", "Z/6"] {
        let b = finite(ring, len);
        let idx = WindowIndex::new(&b).map_err(|e| e.to_string())?;
        let r = subcat::verify_ie_equals_torf(&idx, &full_pool(&idx)).map_err(|e| e.to_string())?;
        require_pass(ring, &r)?;
        checked += r.checked;
        labels.push(class_labels(&r));
    }
    Ok((format!("{checked} generator subsets, IE = F = T ∩ F"), labels))
}

fn criterion_5() -> Outcome {
    criterion_5_with(3).map(|(s, _)| s)
}

fn sheaf(s: &str) -> SheafP1 {
    SheafP1::parse(f2(), s).unwrap()
}

fn criterion_6_with(lo: i64, hi: i64, len: u32) -> Result<(String, Vec<String>), String> {
    let b = P1Backend::new(P1Window::standard(f2(), lo, hi, len, 2, 1).map_err(|e| e.to_string())?);
    let idx = WindowIndex::new(&b).map_err(|e| e.to_string())?;
    let pool: Vec<SheafP1> = ["O", "O(2)", "T(t,1)", "T(t+1,2)"].iter().map(|s| sheaf(s)).collect();
    let mut results = Vec::new();
    for mask in 0u32..16 {
        let gens: Vec<SheafP1> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| pool[i].clone()).collect();
        let c = p1::classify_window(&idx, &gens).map_err(|e| e.to_string())?;
        let fam = match &c {
            P1Classification::Family(f) => f.clone(),
            P1Classification::NotClassified { .. } => return Err(format!("generators {gens:?}: {c}")),
        };
        if matches!(fam, TorfFamilyP1::TypeI(_) | TorfFamilyP1::TypeII(_)) {
            for f in idx.objects() {
                for m in [-1, 1] {
                    ensure(
                        p1::family_membership(f, &fam) == p1::family_membership(&p1::twist(f, m), &fam),
                        || format!("{fam} is not twist-invariant at {f}"),
                    )?;
                }
            }
        }
        results.push(c.to_string());
    }
    let o = vec![idx.require(&sheaf("O")).unwrap()];
    let fix = idx
        .closure(&o, &subcat::ops(&[ClosureOp::Sub, ClosureOp::Ext]))
        .map_err(|e| e.to_string())?;
    let c = p1::classify_window(&idx, &[sheaf("O")]).map_err(|e| e.to_string())?;
    ensure(c == P1Classification::Family(TorfFamilyP1::TypeIII(0)), || format!("closure of O is {c}"))?;
    let o1 = idx.require(&sheaf("O(1)")).map_err(|e| e.to_string())?;
    ensure(!fix.contains(o1), || "O(1) lies in the closure of O".into())?;
    let kinds: BTreeSet<&str> = results.iter().map(|r| &r[..r.find('(').unwrap_or(r.len())]).collect();
    Ok((
        format!("16 generator sets classified ({}), window of {} sheaves", kinds.into_iter().collect::<Vec<_>>().join(", "), idx.len()),
        results,
    ))
}

fn criterion_6() -> Outcome {
    criterion_6_with(-4, 4, 2).map(|(s, _)| s)
}

fn criterion_7() -> Outcome {
    let b = P1Backend::new(P1Window::standard(f2(), -4, 4, 2, 2, 1).unwrap());
    let idx = WindowIndex::new(&b).map_err(|e| e.to_string())?;
    for f in idx.objects() {
        let (tor, vect) = p1::decompose(f);
        ensure(p1::ext1_dim(&vect, &tor) == 0, || format!("Ext^1(vect, tor) != 0 for {f}"))?;
        ensure(tor.direct_sum(&vect) == *f, || format!("{f} is not tor + vect"))?;
    }
    let triples = idx.conflations().map_err(|e| e.to_string())?;
    for &(a, e, bb) in triples {
        let (a, e, bb) = (idx.object(a), idx.object(e), idx.object(bb));
        ensure(
            p1::euler_characteristic(e) == p1::euler_characteristic(a) + p1::euler_characteristic(bb),
            || format!("chi fails on 0 -> {a} -> {e} -> {bb} -> 0"),
        )?;
        let (sa, se, sb) = (p1::ass_p1(a), p1::ass_p1(e), p1::ass_p1(bb));
        ensure(sa.is_subset(&se) && se.is_subset(&sa.union(&sb).cloned().collect()), || {
            format!("Ass fails on 0 -> {a} -> {e} -> {bb} -> 0")
        })?;
    }
    Ok(format!("{} sheaves split, chi additive on {} extensions", idx.len(), triples.len()))
}

fn criterion_8() -> Outcome {
    let ring = RingDescriptor::parse("F2[x,y]/(xy)").unwrap();
    let RingDescriptor::Monomial(r) = &ring else { unreachable!() };
    let cyclics = monomial::ideals_in_box(&r.ideal, 2);
    let b = AffineBackend::new(ring.clone(), AffineWindow::Monomial { cyclics, max_summands: 2 }).unwrap();
    ensure(ring.dim() == 1, || "dimension is not 1".into())?;
    ensure(ring.ring_min() == ring.ring_assh(), || "not equidimensional".into())?;
    ensure(ring.is_cm_dim_le1(&ring.ring_module()) == Ok(true), || "R is not CM".into())?;
    let modules = b.enumerate_window();
    let mut agree = 0;
    for m in &modules {
        let pure = ring.is_maximal_pure(m);
        let tf = ring.is_torsionfree(m);
        let cm = ring.is_maximal_cm_dim_le1(m).map_err(|e| e.to_string())?;
        ensure(pure == tf && tf == cm, || {
            format!("{}: maximal-pure {pure}, torsionfree {tf}, maximal CM {cm}", ring.module_label(m))
        })?;
        agree += usize::from(tf);
    }
    Ok(format!("{} modules, {} torsionfree, zero disagreements", modules.len(), agree))
}

fn criterion_9() -> Outcome {
    let (_, small3) = criterion_3_with(3, 2, 1)?;
    let (_, large3) = criterion_3_with(4, 3, 2)?;
    ensure(small3 == large3, || format!("Takahashi labels changed: {small3:?} vs {large3:?}"))?;
    let (_, small4) = criterion_4_with(3, 2, 1)?;
    let (_, large4) = criterion_4_with(4, 3, 2)?;
    ensure(small4 == large4, || format!("torsion-class labels changed: {small4:?} vs {large4:?}"))?;
    let (_, small5) = criterion_5_with(3)?;
    let (_, large5) = criterion_5_with(4)?;
    ensure(small5 == large5, || format!("IE labels changed: {small5:?} vs {large5:?}"))?;
    let (_, small6) = criterion_6_with(-4, 4, 2)?;
    let (_, large6) = criterion_6_with(-5, 5, 3)?;
    ensure(small6 == large6, || format!("P1 families changed: {small6:?} vs {large6:?}"))?;
    Ok("criteria 3-6 give identical labels one notch larger".into())
}

fn criterion_10() -> Outcome {
    let configs = [
        write_config(
            "d_mono.toml",
            "space = \"F2[x,y]/(x^2,xy)\"\nobjects = [\"R\", \"R/(x)\", \"R/(x,y)\", \"0\"]\ngenerators = [\"R/(x)\"]\npool = [\"R/(x)\", \"R/(x,y)\"]\nphi = \"ass\"\n",
        ),
        write_config(
            "d_z.toml",
            "space = \"Z\"\nobjects = [\"Z/6\", \"Z + Z/4\"]\ngenerators = [\"Z/9\"]\npool = [\"Z\", \"Z/2\", \"Z/4\", \"Z/3\", \"Z/9\", \"Z/6\"]\nphi = \"ass\"\n",
        ),
        write_config("d_z6.toml", "space = \"Z/6\"\nobjects = [\"Z/6\"]\ngenerators = [\"Z/2\"]\npool = \"full\"\nphi = \"ass\"\n"),
        write_config(
            "d_p1.toml",
            "space = \"P1/F2\"\nobjects = [\"O(2) + T(t^2+t+1,2)\"]\ngenerators = [\"O\", \"T(t,1)\"]\npool = [\"O\", \"T(t,1)\", \"T(inf,1)\"]\nphi = \"ass\"\n",
        ),
    ];
    let mut runs = 0;
    for cfg in &configs {
        let cfg = cfg.to_str().unwrap();
        let mut commands: Vec<Vec<&str>> = vec![vec!["ass", cfg], vec!["classify", cfg], vec!["lattice", cfg]];
        for th in ["takahashi", "gabriel-serre", "ie-torf", "serre-in-torf"] {
            commands.push(vec!["verify", th, cfg]);
        }
        for cmd in commands {
            let is_mono_ie = cfg.ends_with("d_mono.toml") && cmd.iter().any(|c| ["takahashi", "gabriel-serre", "ie-torf", "classify"].contains(c));
            let mut one = vec!["--threads", "1"];
            one.extend(&cmd);
            let mut eight = vec!["--threads", "8"];
            eight.extend(&cmd);
            let (c1, o1) = tfclass(&one);
            let (c8, o8) = tfclass(&eight);
            ensure(c1 == c8 && o1 == o8, || format!("{cmd:?} differs between 1 and 8 threads"))?;
            ensure(is_mono_ie || c1 == 0, || format!("{cmd:?} exited {c1}"))?;
            runs += 1;
        }
    }
    for cmd in [
        vec!["p1", "hom", "O(-1)", "O(1)"],
        vec!["p1", "ext", "O(1)", "O(-1)"],
        vec!["p1", "decompose", "O(2) + T(t,3)"],
    ] {
        let mut one = vec!["--threads", "1"];
        one.extend(&cmd);
        let mut eight = vec!["--threads", "8"];
        eight.extend(&cmd);
        ensure(tfclass(&one) == tfclass(&eight), || format!("{cmd:?} differs between 1 and 8 threads"))?;
        runs += 1;
    }
    Ok(format!("{runs} command runs byte-identical with 1 and 8 threads"))
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 10] = [
        (1, "embedded-prime Serre count", 10, criterion_1),
        (2, "CM Serre lattice", 10, criterion_2),
        (3, "torsionfree classes by Ass", 60, criterion_3),
        (4, "torsion classes are Serre", 60, criterion_4),
        (5, "IE-closed = torsionfree", 60, criterion_5),
        (6, "P1 torsionfree families", 300, criterion_6),
        (7, "split decomposition", 60, criterion_7),
        (8, "predicate coherence", 10, criterion_8),
        (9, "window-growth stability", 600, criterion_9),
        (10, "determinism across threads", 600, criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs(budget);
        let (status, detail) = match (&result, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {budget}s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {n:>2} [{name}]: {status} ({:.2}s, budget {budget}s) {detail}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

