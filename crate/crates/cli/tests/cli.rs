use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn prodsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodsynth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("prodsynth-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn size_of(o: &Output) -> usize {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix("size="))
        .and_then(|s| s.parse().ok())
        .expect("stats print a size")
}

#[test]
fn synthesized_program_passes_check() {
    let problem = corpus("pair_swap.mls");
    let out = prodsynth(&["synth", problem.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let dir = scratch("check");
    let prog = dir.join("swap.ml");
    std::fs::write(&prog, stdout(&out)).unwrap();
    let checked = prodsynth(&["check", problem.to_str().unwrap(), prog.to_str().unwrap()]);
    assert!(checked.status.success(), "{checked:?}");
    assert_eq!(stdout(&checked).trim(), "ok");
}

#[test]
fn wrong_program_is_rejected() {
    let dir = scratch("reject");
    let prog = dir.join("id.ml");
    std::fs::write(&prog, "fix f (x : nat * bool) : nat = O").unwrap();
    let out = prodsynth(&[
        "check",
        corpus("fst.mls").to_str().unwrap(),
        prog.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn focusing_does_not_change_the_answer_size() {
    for p in ["len.mls", "make_triple.mls", "unzip_bool.mls"] {
        let path = corpus(p);
        let on = prodsynth(&["synth", "--stats", path.to_str().unwrap()]);
        let off = prodsynth(&["synth", "--stats", "--no-focus", path.to_str().unwrap()]);
        assert!(on.status.success() && off.status.success(), "{p}");
        assert_eq!(size_of(&on), size_of(&off), "{p}");
    }
}

#[test]
fn trace_lists_rules() {
    let out = prodsynth(&["synth", "--trace", corpus("fst.mls").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().count() > 1);
    assert!(text.contains("IRefine-Fix"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(
        prodsynth(&["synth", "/nonexistent/problem.mls"])
            .status
            .code(),
        Some(3)
    );
    let tight = prodsynth(&[
        "synth",
        "--max-size",
        "3",
        corpus("nat_max.mls").to_str().unwrap(),
    ]);
    assert_eq!(tight.status.code(), Some(1), "{tight:?}");
    let zero = prodsynth(&[
        "synth",
        "--max-terms",
        "0",
        corpus("fst.mls").to_str().unwrap(),
    ]);
    assert_eq!(zero.status.code(), Some(3));

    let dir = scratch("config");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "max_sise = 4\n").unwrap();
    let out = prodsynth(&[
        "--config",
        cfg.to_str().unwrap(),
        "synth",
        corpus("fst.mls").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_sets_limits() {
    let dir = scratch("limits");
    let cfg = dir.join("small.toml");
    std::fs::write(&cfg, "max_size = 3\n").unwrap();
    let out = prodsynth(&[
        "--config",
        cfg.to_str().unwrap(),
        "synth",
        corpus("nat_max.mls").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    // Flags override the file.
    let out = prodsynth(&[
        "--config",
        cfg.to_str().unwrap(),
        "synth",
        "--max-size",
        "40",
        corpus("fst.mls").to_str().unwrap(),
    ]);
    assert!(out.status.success());
}

#[test]
fn bench_run_writes_csv() {
    let dir = scratch("bench");
    for p in ["fst.mls", "snd.mls", "bool_not.mls"] {
        std::fs::copy(corpus(p), dir.join(p)).unwrap();
    }
    let out = prodsynth(&["bench", "run", dir.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("name,tier,outcome,size,examples,seconds")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.contains(",solved,")));
}

#[test]
fn census_prints_one_row_per_size() {
    let out = prodsynth(&["census", "--max-nodes", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,all,typed,normal");
    assert_eq!(lines.len(), 6);
}
