use std::path::PathBuf;
use std::process::{Command, Output};

use kohn_core::cli::CertificateFile;

fn kohn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kohn")).args(args).env_remove("KOHN_SEED").output().unwrap()
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus(name: &str) -> String {
    corpus_dir().join(name).to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&kohn(&["multiplicity", "z^2", "w^3"])), 0);
    assert_eq!(stdout(&kohn(&["multiplicity", "z^2", "w^3", "--method", "linear-algebra"])), "6\n");
    assert_eq!(code(&kohn(&["multiplicity", "z^2 +", "w"])), 2);
    assert_eq!(code(&kohn(&["no-such-command"])), 2);
    assert_eq!(code(&kohn(&["run", "/nonexistent/domain.json"])), 2);
    assert_eq!(code(&kohn(&["multiplicity", "z^2", "z^2*w"])), 3);
    assert_eq!(code(&kohn(&["type", "z^2", "z^2*w"])), 3);
    assert_eq!(code(&kohn(&["puiseux", "w^4 - 4*z^2*w^2 + 4*z^4 - 3*z^6"])), 5);
}

#[test]
fn rejects_unknown_fields() {
    let dir = std::env::temp_dir().join(format!("kohn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"premultipliers": ["z^2", "w^2"], "colour": 1}"#).unwrap();
    assert_eq!(code(&kohn(&["run", path.to_str().unwrap()])), 2);
    std::fs::write(&path, r#"{"premultipliers": ["z^2", "z^2*w"]}"#).unwrap();
    assert_eq!(code(&kohn(&["run", path.to_str().unwrap()])), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn certificate_round_trip_and_determinism() {
    let a = kohn(&["run", &corpus("cd.json"), "--seed", "7", "--verify-membership", "--classic"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    let parsed = CertificateFile::from_text(&text).unwrap();
    assert_eq!(parsed.to_text(), text);
    let b = kohn(&["run", &corpus("cd.json"), "--seed", "7", "--verify-membership", "--classic"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let out = std::env::temp_dir().join(format!("kohn-cert-{}.json", std::process::id()));
    let o = kohn(&["run", &corpus("heier.json"), "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    std::fs::remove_file(&out).unwrap();
    assert_eq!(written, stdout(&kohn(&["run", &corpus("heier.json")])));
}

#[test]
fn seed_from_environment() {
    let with_flag = kohn(&["run", &corpus("cd.json"), "--seed", "11"]);
    let with_env = Command::new(env!("CARGO_BIN_EXE_kohn")).args(["run", &corpus("cd.json")]).env("KOHN_SEED", "11").output().unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
}

#[test]
fn corpus_summary() {
    let o = kohn(&["corpus", corpus_dir().to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("cd.json: ok l=7 a=12 epsilon=1/768"), "{text}");
    assert!(text.contains("heier.json: ok l=3 a=1 epsilon=1/16"), "{text}");
}

#[test]
fn puiseux_output() {
    let text = stdout(&kohn(&["puiseux", "w^2 - z^3"]));
    assert!(text.starts_with("branch 1: (t^2, t^3)"), "{text}");
}
