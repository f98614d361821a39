use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cellforge(args: &[&str], data: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cellforge"));
    c.args(args).env_remove("CELLFORGE_DATA");
    if let Some(d) = data {
        c.env("CELLFORGE_DATA", d);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cellforge-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &to.join(e.file_name()));
        } else {
            std::fs::copy(e.path(), to.join(e.file_name())).unwrap();
        }
    }
}

fn row<'a>(out: &'a str, name: &str) -> Vec<&'a str> {
    out.lines().find(|l| l.split_whitespace().next() == Some(name)).unwrap_or_else(|| panic!("no row {name}")).split_whitespace().collect()
}

#[test]
fn verify_passes_with_published_counts() {
    let o = cellforge(&["verify"], None);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(row(&s, "(ii)")[1], "171");
    assert_eq!(row(&s, "(R3)")[1], "1251");
    assert!(s.lines().skip(1).filter(|l| l.contains(" pass")).count() >= 18);
}

#[test]
fn lower_precision_passes_with_larger_radii() {
    let hi = stdout(&cellforge(&["verify"], None));
    let o = cellforge(&["verify", "--precision", "128"], None);
    assert_eq!(o.status.code(), Some(0));
    let lo = stdout(&o);
    let r = |s: &str| row(s, "(R3)")[2].parse::<f64>().unwrap();
    assert!(r(&lo) > r(&hi));
}

#[test]
fn corrupted_weight_fails_naming_the_relation() {
    let d = scratch("corrupt");
    copy_dir(Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data")), &d);
    let cells = d.join("e412_cells.json");
    let text = std::fs::read_to_string(&cells).unwrap();
    let at = text.find("\"coeff\": \"").unwrap() + 10;
    let end = at + text[at..].find('"').unwrap();
    std::fs::write(&cells, format!("{}2{}", &text[..at], &text[end..])).unwrap();
    let o = cellforge(&["verify"], Some(&d));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().last().unwrap().starts_with("FAIL: ("));
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn verify_writes_only_with_report() {
    let d = scratch("report");
    let o = Command::new(env!("CARGO_BIN_EXE_cellforge")).arg("verify").current_dir(&d).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(&d).unwrap().count(), 0);
    let rep = d.join("r.json");
    cellforge(&["verify", "--report", rep.to_str().unwrap()], None);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["blocks"].as_array().unwrap().len(), 4);
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn solve_lists_magnitudes_and_is_reproducible() {
    let d = scratch("solve");
    let (a, b) = (d.join("a.json"), d.join("b.json"));
    let o = cellforge(&["solve", "--recognize", "--out", a.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1.931852   q[2]"));
    assert!(s.contains("0.239691   no match"));
    let o2 = cellforge(&["solve", "--recognize", "--out", b.to_str().unwrap()], None);
    assert_eq!(o.stdout, o2.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["magnitudes"].as_array().unwrap().len(), 41);
    assert!(v["assignment"].as_array().unwrap().iter().all(|e| e["re"].is_number() && e["p"].is_string()));
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn solve_without_convergence_exits_three() {
    let o = cellforge(&["solve", "--init", "disk", "--restarts", "2", "--max-iter", "3"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn recognize_reads_a_list() {
    let d = scratch("recognize");
    let f = d.join("values.txt");
    std::fs::write(&f, "0.366025\n0.239691\n").unwrap();
    let s = stdout(&cellforge(&["recognize", f.to_str().unwrap()], None));
    assert_eq!(s.lines().collect::<Vec<_>>(), ["0.366025   1/q[3]", "0.239691   no match"]);
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cellforge(&["verify", "--precision", "many"], None).status.code(), Some(1));
    assert_eq!(cellforge(&["--help"], None).status.code(), Some(0));
}
