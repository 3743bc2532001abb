use std::path::PathBuf;
use std::process::{Command, Output};

fn sample(name: &str) -> String {
    format!("{}/samples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("germforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn germforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_germforge")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn pipeline_certifies_cusp_and_certificate_reverifies() {
    let cert = scratch("cusp.cert");
    let out = germforge(&["pipeline", &sample("cusp.herm"), "--emit-certificate", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}{}", stdout(&out), stderr(&out));
    let text = std::fs::read_to_string(&cert).unwrap();
    assert!(text.starts_with("germforge-certificate v1"));
    assert!(text.contains("status certified"));

    let check = germforge(&["witness", cert.to_str().unwrap()]);
    assert_eq!(code(&check), 0, "{}{}", stdout(&check), stderr(&check));

    let tampered = scratch("tampered.cert");
    std::fs::write(&tampered, text.replace("status certified", "status violation")).unwrap();
    assert_eq!(code(&germforge(&["witness", tampered.to_str().unwrap()])), 1);
}

#[test]
fn pipeline_without_witness_exits_two() {
    let out = germforge(&["pipeline", &sample("quartic.herm"), "--N", "20"]);
    assert_eq!(code(&out), 2, "{}{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("4"));
}

#[test]
fn witness_and_ratio_on_curves() {
    let ok = germforge(&["witness", &sample("cusp.herm"), &sample("cusp.curve"), "--N", "50"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let bad = germforge(&["witness", &sample("cusp.herm"), &sample("perturbed.curve"), "--N", "40"]);
    assert_eq!(code(&bad), 2, "{}", stderr(&bad));
    assert!(stdout(&bad).contains("7"));
    let ratio = germforge(&["ratio", &sample("cusp.herm"), &sample("perturbed.curve")]);
    assert_eq!(code(&ratio), 0, "{}", stderr(&ratio));
    assert!(stdout(&ratio).contains("7/2"));
}

#[test]
fn parse_errors_carry_file_positions() {
    let bad = scratch("bad.herm");
    std::fs::write(&bad, "vars 2; N=4;\n+ 1 z1^ zbar1\n").unwrap();
    let out = germforge(&["decompose", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("bad.herm:2:"), "{err}");
    assert!(err.contains("malformed exponent"), "{err}");
}

#[test]
fn missing_input_is_an_error() {
    let out = germforge(&["pipeline", "/nonexistent/input.herm"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("germforge:"));
}

#[test]
fn codim_lift_and_puiseux_commands() {
    let codim = germforge(&["codim", &sample("monomial.ideal")]);
    assert_eq!(code(&codim), 0, "{}", stderr(&codim));
    assert!(stdout(&codim).contains("6"));
    let lift = germforge(&["lift", &sample("node.ideal"), &sample("node_base.curve"), "--N", "40"]);
    assert_eq!(code(&lift), 0, "{}", stderr(&lift));
    let puiseux = germforge(&["puiseux", &sample("cusp.ideal"), "--N", "20"]);
    assert_eq!(code(&puiseux), 0, "{}", stderr(&puiseux));
}

#[test]
fn search_is_independent_of_thread_count() {
    let run = |threads: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_germforge"));
        c.args(["search", &sample("cusp.herm")]);
        match threads {
            Some(t) => c.env("GERMFORGE_THREADS", t),
            None => c.env_remove("GERMFORGE_THREADS"),
        };
        c.output().unwrap()
    };
    let one = run(Some("1"));
    let many = run(Some("4"));
    let default = run(None);
    assert_eq!(code(&one), code(&many));
    assert_eq!(stdout(&one), stdout(&many));
    assert_eq!(stdout(&one), stdout(&default));
}
