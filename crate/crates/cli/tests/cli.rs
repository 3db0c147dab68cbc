use std::path::PathBuf;
use std::process::{Command, Output};

use relnpi::parse::write_complex;
use relnpi::thin::necklace;
use relnpi::parse_complex;
use relnpi_cli::Report;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).display().to_string()
}

fn relnpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relnpi")).args(args).env_remove("NPI_MAX_CELLS").output().expect("binary runs")
}

fn structured(args: &[&str]) -> (i32, Report, String) {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let out = relnpi(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), report, text)
}

#[test]
fn torus_passes_coloring() {
    let out = relnpi(&["check", "coloring", &corpus("torus.2cx"), "--angles", "standard"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn torus_hnn_pairs_certify() {
    for k in 1..=4 {
        let file = corpus(&format!("torus_hnn_k{k}.2cx"));
        let (code, r, _) = structured(&["certify", "npi", &file, "--sub", "K", "--fold-edge", "y1", "--angles", "standard"]);
        assert_eq!(code, 0);
        assert!(r.summary.iter().any(|l| l == "tier: relative collapsing NPI"), "{:?}", r.summary);
        assert_eq!(r.data["conclusion"], "RelativeCollapsingNpi");
        assert!(r.data["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }
}

#[test]
fn justified_subcomplex_upgrades_the_tier() {
    let file = corpus("torus_hnn_k2.2cx");
    let (code, r, _) = structured(&["certify", "npi", &file, "--sub", "K", "--fold-edge", "y1", "--justify-k"]);
    assert_eq!(code, 0);
    assert_eq!(r.data["conclusion"], "CollapsingNpi");
}

#[test]
fn xyxy_search_is_refuted_with_certificate() {
    let file = corpus("xyxy_fold.2cx");
    let (code, r, _) = structured(&["certify", "npi", &file, "--sub", "K", "--fold-edge", "y1", "--angles", "search"]);
    assert_eq!(code, 1);
    assert_eq!(r.data["conclusion"], "None");
    assert!(!r.witnesses.is_empty());
    let folded = r.witnesses[0].complex.as_ref().unwrap();
    assert_eq!(parse_complex(folded).unwrap().complex.cell_count(), 1);
}

#[test]
fn bad_presentation_audit_reports_the_witness() {
    let (code, r, _) = structured(&["audit", "npi", &corpus("bad.2cx"), "--max-cells", "1"]);
    assert_eq!(code, 1);
    let w = &r.witnesses[0];
    assert!(w.description.contains("chi(X) = 1"), "{}", w.description);
    let doc = parse_complex(w.complex.as_ref().unwrap()).unwrap();
    assert!(doc.map.is_some());
    assert_eq!(doc.complex.euler_characteristic(), 1);
}

#[test]
fn structured_reports_round_trip() {
    for args in [
        vec!["parse", "corpus/torus.2cx"],
        vec!["links", "corpus/torus.2cx"],
        vec!["curvature", "corpus/hnn_k3.2cx"],
        vec!["check", "strong", "corpus/torus_hnn_k1.2cx", "--sub", "K"],
        vec!["audit", "relative", "corpus/torus_hnn_k1.2cx", "--sub", "K", "--max-cells", "2", "--angles", "standard"],
        vec!["lot", "check", "corpus/lot3.lot"],
    ] {
        let args: Vec<String> = args.iter().map(|a| a.strip_prefix("corpus/").map_or(a.to_string(), corpus)).collect();
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (_, r, text) = structured(&refs);
        assert_eq!(r.schema_version, relnpi_cli::SCHEMA_VERSION);
        assert_eq!(r.to_json(), text);
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(relnpi(&["check", "coloring", "/nonexistent.2cx"]).status.code(), Some(2));
    assert_eq!(relnpi(&["check", "relative", &corpus("torus.2cx"), "--sub", "Nope"]).status.code(), Some(2));
    assert_eq!(relnpi(&["check", "relative", &corpus("torus.2cx")]).status.code(), Some(2));
    assert_eq!(relnpi(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(relnpi(&["certify", "npi", &corpus("torus_hnn_k1.2cx"), "--sub", "K", "--fold-edge", "z"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.2cx");
    std::fs::write(&bad, "complex c\nvertex v\nedge a v w\n").unwrap();
    let out = relnpi(&["parse", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = relnpi(&["audit", "npi", &corpus("torus.2cx"), "--max-cells", "2", "--node-limit", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn max_cells_default_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_relnpi"))
        .args(["audit", "npi", &corpus("torus.2cx"), "--format", "structured"])
        .env("NPI_MAX_CELLS", "1")
        .output()
        .unwrap();
    let r = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(r.data["budget"]["max_cells"], 1);
}

#[test]
fn output_is_independent_of_job_count() {
    let file = corpus("hnn_k2.2cx");
    let a = relnpi(&["audit", "npi", &file, "--max-cells", "2", "--jobs", "1", "--format", "structured"]);
    let b = relnpi(&["audit", "npi", &file, "--max-cells", "2", "--jobs", "4", "--format", "structured"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_and_instance_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let dump = dir.path().join("instances");
    let o = relnpi(&[
        "audit",
        "npi",
        &corpus("torus.2cx"),
        "--max-cells",
        "2",
        "--format",
        "structured",
        "--out",
        out.to_str().unwrap(),
        "--dump-instances",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let count = r.data["count"].as_u64().unwrap() as usize;
    let files: Vec<_> = std::fs::read_dir(&dump).unwrap().collect();
    assert_eq!(files.len(), count);
    for f in files {
        let doc = parse_complex(&std::fs::read_to_string(f.unwrap().path()).unwrap()).unwrap();
        assert!(doc.map.is_some());
    }
}

#[test]
fn thin_reports_balance() {
    let dir = tempfile::tempdir().unwrap();
    let n = necklace(2, &[0, 1], 1);
    let file = dir.path().join("necklace.2cx");
    std::fs::write(&file, write_complex(&n.x, &[("K".to_string(), n.k.clone())])).unwrap();
    let (code, r, _) = structured(&["thin", file.to_str().unwrap(), "--sub", "K"]);
    assert_eq!(code, 0);
    let d = &r.data;
    let drop = d["chi_x"].as_i64().unwrap() - d["chi_x_prime"].as_i64().unwrap();
    assert_eq!(drop, d["k"].as_i64().unwrap() - d["p"].as_i64().unwrap());
    assert!(parse_complex(d["x_prime"].as_str().unwrap()).is_ok());
}

#[test]
fn lot_commands() {
    let (code, r, _) = structured(&["lot", "check", &corpus("lot3.lot")]);
    assert_eq!(code, 0);
    assert_eq!(r.data["flags"]["reduced"], true);
    assert_eq!(r.data["proper_sub_lots"].as_array().unwrap().len(), 0);
    assert_eq!(r.data["euler_characteristic"], 0);

    let (code, r, _) = structured(&["lot", "certify", &corpus("lot5.lot"), "--sub", "G1", "--collapse-vertex", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r.data["certified"], true);

    let (code, _, _) = structured(&["lot", "certify", &corpus("lot5.lot")]);
    assert_eq!(code, 0);
}
