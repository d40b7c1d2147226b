use std::process::{Command, Output};

fn drforms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drforms"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn coeffs_e_3_2_8() {
    let o = drforms(&["coeffs", "e_3_2_8", "--prec", "16", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("exponent,coeff\n0/1,1/1\n3/1,8/1\n4/1,6/1\n"));
}

#[test]
fn coeffs_cohen_and_eta() {
    let o = drforms(&["coeffs", "cohen:1", "--prec", "8", "--format", "csv"]);
    assert!(stdout(&o).contains("\n0/1,-1/12\n"));
    let o = drforms(&["coeffs", "eta:3", "--prec", "30", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("1/8,1/1"));
    let o = drforms(&["coeffs", "jacobi_eis:5:1", "--prec", "16"]);
    assert!(stdout(&o).starts_with(r#"{"r":5,"weight":4,"prec":16,"components":"#));
}

#[test]
fn verify_exit_codes() {
    let o = drforms(&["verify", "r3-class", "--bound", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(r#""passed":true"#));

    let o = drforms(&["verify", "eigen-chain", "--r", "5", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));

    let o = drforms(&["verify", "s-d0", "--r", "3", "--k", "2", "--d0", "8", "--bound", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(r#""item":"S_8(E) vs A(d0)G q^2""#));

    let o = drforms(&["verify", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "sigma3", "--bound", "100"];
    let a = drforms(&args);
    let b = drforms(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains(r#""passed":true"#));
}

#[test]
fn maps() {
    // T^J(3) on E_{4,D5} is multiplication by 4
    let o = drforms(&["map", "hecke-tj", "--input", "jacobi_eis:5:1", "--p", "3", "--prec", "72"]);
    assert_eq!(o.status.code(), Some(0));
    let eis = drforms(&["coeffs", "jacobi_eis:5:1", "--prec", "8", "--format", "csv"]);
    let img = drforms(&["map", "hecke-tj", "--input", "jacobi_eis:5:1", "--p", "3", "--prec", "72", "--format", "csv"]);
    let scaled: Vec<String> = stdout(&eis)
        .lines()
        .skip(1)
        .map(|l| {
            let (head, c) = l.rsplit_once(',').unwrap();
            let v: i64 = c.trim_end_matches("/1").parse().unwrap();
            format!("{head},{}/1", 4 * v)
        })
        .collect();
    let got: Vec<String> = stdout(&img).lines().skip(1).map(String::from).collect();
    assert_eq!(got, scaled);

    // j-even on E_{4,D5} gives E^(8)_{3/2}
    let a = drforms(&["map", "j-even", "--input", "jacobi_eis:5:1", "--prec", "64", "--format", "csv"]);
    let b = drforms(&["coeffs", "e_3_2_8", "--prec", "64", "--format", "csv"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn map_from_file_roundtrip() {
    let dir = std::env::temp_dir().join(format!("drforms-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let eta = dir.join("eta9.json");
    let phi = dir.join("phi.json");
    let o = drforms(&["coeffs", "eta:9", "--prec", "400", "--out", eta.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let src = format!("@{}", eta.display());
    let o = drforms(&["map", "j-odd-inv", "--input", &src, "--out", phi.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = drforms(&["map", "j-odd", "--input", &format!("@{}", phi.display())]);
    assert_eq!(stdout(&o).trim(), std::fs::read_to_string(&eta).unwrap().trim());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors() {
    assert_eq!(drforms(&["coeffs", "foo"]).status.code(), Some(2));
    assert_eq!(drforms(&["coeffs", "theta3", "--prec", "3"]).status.code(), Some(2));
    assert_eq!(drforms(&["map", "j-even", "--input", "e_3_2_8"]).status.code(), Some(2));
    assert_eq!(drforms(&["map", "hecke-tj", "--input", "jacobi_eis:5:1"]).status.code(), Some(2));
    assert_eq!(
        drforms(&["map", "s-d0-even", "--input", "jacobi_eis:3:2", "--d0", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn tables() {
    let o = drforms(&["class-table", "--bound", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = drforms(&["newforms", "--weight", "8", "--prec", "40", "--format", "csv", "--primes", "2,3"]);
    assert_eq!(stdout(&o), "label,p,lambda,fricke\n8.2.a,2,-8/1,1\n8.2.a,3,12/1,1\n");
}
