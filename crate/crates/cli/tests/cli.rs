use std::fs;
use std::process::{Command, Output};

use tempfile::TempDir;

fn trigmv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigmv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn compute_on_diagonal_matches_scalar_functions() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "d.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 -2.0\n");
    let b = write(&dir, "b.csv", "1\n1\n");
    let o = trigmv(&[
        "compute", "--matrix", &m, "--rhs", &b, "--fn", "cos,sin,cosh,sinh,exp", "--t", "0.5",
    ]);
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["cos", "sin", "cosh", "sinh", "exp"]);
    for (row, lambda) in rows.iter().zip([1.0f64, -2.0]) {
        let x = 0.5 * lambda;
        let want = [x.cos(), x.sin(), x.cosh(), x.sinh(), x.exp()];
        for (g, w) in row.iter().zip(want) {
            assert!((g - w).abs() < 1e-14, "{g} vs {w}");
        }
    }
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("mv="), "{err}");
}

#[test]
fn complex_matrix_market_input() {
    let dir = TempDir::new().unwrap();
    // diag(i, 2i): cos(i) = cosh(1)
    let m = write(&dir, "c.mtx", "%%MatrixMarket matrix coordinate complex general\n2 2 2\n1 1 0 1\n2 2 0 2\n");
    let b = write(&dir, "b.csv", "1\n1\n");
    let o = trigmv(&["compute", "--matrix", &m, "--rhs", &b, "--fn", "cos", "--t", "1", "--format", "jsonl"]);
    let line = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(v["function"], "cos");
    let re: Vec<f64> = serde_json::from_value(v["re"].clone()).unwrap();
    let im: Vec<f64> = serde_json::from_value(v["im"].clone()).unwrap();
    assert!((re[0] - 1f64.cosh()).abs() < 1e-14 && (re[1] - 2f64.cosh()).abs() < 1e-13);
    assert!(im.iter().all(|x| x.abs() < 1e-14));
}

#[test]
fn multiple_times_label_columns() {
    let o = trigmv(&["compute", "--gen", "laplace1d:4", "--fn", "exp", "--t", "0.01,0.02"]);
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["exp@0.01", "exp@0.02"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn params_zero_matrix_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "z.mtx", "%%MatrixMarket matrix coordinate real general\n3 3 0\n");
    let o = trigmv(&["params", "--matrix", &m, "--t", "5"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m_star,s,mu_re,mu_im,path,scaled_norm,width,predicted_mv,mv_estimate"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[4], row[7]), ("0", "1", "zero", "0"));
}

#[test]
fn gen_writes_matrix_market_and_rhs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.mtx");
    let rhs = dir.path().join("b.csv");
    stdout(&trigmv(&[
        "gen",
        "triw:3",
        "--out",
        out.to_str().unwrap(),
        "--rhs-out",
        rhs.to_str().unwrap(),
    ]));
    let a = trigmv::io::read_matrix_market(&out).unwrap();
    match a {
        trigmv::io::AnyOperator::Real(a) => assert_eq!(a.one_norm().unwrap(), 9.0),
        _ => panic!("real matrix expected"),
    }
    let b: Vec<f64> = fs::read_to_string(&rhs).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(b.len(), 3);
    assert!((b[1] - 2f64.cos()).abs() < 1e-16);
}

fn records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn bench_schema_and_reproducibility() {
    let run = || stdout(&trigmv(&["bench", "--gen", "laplace2d:7", "--t", "0.1", "--method", "trig,trig_block"]));
    let text = run();
    assert_eq!(
        text.lines().next().unwrap(),
        "matrix,n,functions,method,t,tol,mv,mv_estimate,wall_time_s,rel_err,m_star,s"
    );
    let rows = records(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][2], "cos,sin");
    let mv: Vec<usize> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(mv[0] < mv[1]);
    assert!(rows.iter().all(|r| r[9].parse::<f64>().unwrap() < 1e-10));
    let again: Vec<usize> = records(&run()).iter().map(|r| r[6].parse().unwrap()).collect();
    assert_eq!(mv, again);
}

#[test]
fn bench_skips_missing_files() {
    let o = trigmv(&["bench", "--matrix", "/nonexistent/orani676.mtx"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("skipping") && err.contains("nothing to run"), "{err}");
}

#[test]
fn theta_gen_reproduces_shipped_module() {
    let o = trigmv(&["theta-gen", "--rust"]);
    let shipped = include_str!("../../core/src/theta_tables.rs");
    assert_eq!(stdout(&o), shipped);
}

#[test]
fn shipped_text_tables_match_library() {
    for (name, tol) in [
        ("half", trigmv::Tolerance::Half),
        ("single", trigmv::Tolerance::Single),
        ("double", trigmv::Tolerance::Double),
    ] {
        let path = format!("{}/../../data/theta_{name}.txt", env!("CARGO_MANIFEST_DIR"));
        let text = fs::read_to_string(path).unwrap();
        let table = trigmv::ThetaTable::from_text(&text).unwrap();
        assert_eq!(table, trigmv::ThetaTable::for_tolerance(tol).unwrap());
    }
}

#[test]
fn rejects_bad_input() {
    assert!(!trigmv(&["compute", "--gen", "laplace1d:4", "--fn", "tan"]).status.success());
    assert!(!trigmv(&["compute", "--gen", "nosuch:4"]).status.success());
    assert!(!trigmv(&["compute", "--gen", "laplace1d:4", "--tol", "2"]).status.success());
    assert!(!trigmv(&["bench", "--gen", "laplace1d:4", "--fn", "cos,cosh"]).status.success());
}
