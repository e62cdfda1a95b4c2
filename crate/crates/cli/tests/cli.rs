use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn grammar(file: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../grammars")
        .join(file);
    path.to_str().unwrap().to_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fungll"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fungll"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("fungll-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn recognize_accepts() {
    let o = run(&[
        "recognize",
        "-g",
        &grammar("e.grammar"),
        "-s",
        "E",
        "--text",
        "a",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "accept\n");
    let o = run(&[
        "recognize",
        "-g",
        &grammar("list.grammar"),
        "-s",
        "Start",
        "--text",
        "a(a)((a))",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn recognize_rejects_with_errors() {
    let g = grammar("csv.grammar");
    let o = run(&["recognize", "-g", &g, "-s", "CSV(alpha)", "--text", "a,!"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        stdout(&o),
        "reject\nerror: position 2: expected alpha at `CSV(alpha) ::= . alpha`, got !\n"
    );
    let o = run(&[
        "recognize",
        "-g",
        &g,
        "-s",
        "CSV(alpha)",
        "--text",
        "a,!",
        "--format",
        "json",
    ]);
    let v = json(&o);
    assert_eq!(v["accepted"], false);
    assert_eq!(v["errors"][0]["position"], 2);
    assert_eq!(v["errors"][0]["expected"], "alpha");
    let o = run(&[
        "recognize",
        "-g",
        &g,
        "-s",
        "CSV(alpha)",
        "--text",
        "a,!",
        "--errors",
        "0",
    ]);
    assert_eq!(stdout(&o), "reject\n");
}

#[test]
fn fuel_exhaustion_is_an_error() {
    let o = run(&[
        "recognize",
        "-g",
        &grammar("f.grammar"),
        "-s",
        "Start",
        "--text",
        "abc",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fuel exhausted"), "{}", stderr(&o));
}

#[test]
fn small_fuel_budget() {
    let g = grammar("s1.grammar");
    let o = run(&["recognize", "-g", &g, "--text", "aaaa", "--fuel", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["recognize", "-g", &g, "--text", "aaaa", "--fuel", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bsr_dump_of_golden_run() {
    let o = run(&["bsr", "-g", &grammar("e.grammar"), "--text", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 15);
    assert_eq!(lines[14], "total: 14");
    assert!(lines.contains(&"E ::= ., 0, 0, 0"));
    assert!(lines.contains(&"E ::= 'a' ., 0, 0, 1"));
    assert!(lines.contains(&"E ::= E E . E, 0, 1, 1"));
    let v = json(&run(&[
        "bsr",
        "-g",
        &grammar("e.grammar"),
        "--text",
        "a",
        "--format",
        "json",
    ]));
    assert_eq!(v["total"], 14);
    assert_eq!(v["bsrs"].as_array().unwrap().len(), 14);
}

#[test]
fn bsr_dump_edge_cases() {
    let o = run(&["bsr", "-g", &grammar("e.grammar"), "--text", ""]);
    assert!(stdout(&o).lines().any(|l| l == "E ::= ., 0, 0, 0"));
    let o = run(&[
        "bsr",
        "-g",
        &grammar("e.grammar"),
        "-s",
        "'a'",
        "--text",
        "a",
    ]);
    assert_eq!(stdout(&o), "__START ::= 'a' ., 0, 0, 1\ntotal: 1\n");
}

#[test]
fn parse_prints_trees() {
    let o = run(&["parse", "-g", &grammar("expr.grammar"), "--text", "a+a+a"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().last(), Some("2 trees"));
    assert_eq!(out.lines().count(), 3);
    let o = run(&[
        "parse",
        "-g",
        &grammar("expr_left.grammar"),
        "--text",
        "a+a+a",
    ]);
    assert_eq!(
        stdout(&o),
        "(Expr 0 5 (Expr 0 3 (Expr 0 1 'a'@0) '+'@1 (Expr 2 3 'a'@2)) '+'@3 (Expr 4 5 'a'@4))\n1 tree\n"
    );
    let o = run(&[
        "parse",
        "-g",
        &grammar("csv.grammar"),
        "-s",
        "CSV(alpha)",
        "--text",
        "a",
    ]);
    assert_eq!(stdout(&o), "(CSV(alpha) 0 1 'a'@0)\n1 tree\n");
}

#[test]
fn parse_truncates() {
    let g = grammar("expr.grammar");
    let o = run(&["parse", "-g", &g, "--text", "a+a+a+a", "--max-trees", "1"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    assert_eq!(out.lines().last(), Some("5 trees (truncated)"));
    let v = json(&run(&[
        "parse",
        "-g",
        &g,
        "--text",
        "a+a+a+a",
        "--max-trees",
        "2",
        "--format",
        "json",
    ]));
    assert_eq!(v["trees"].as_array().unwrap().len(), 2);
    assert_eq!(v["count"], 5);
    assert_eq!(v["truncated"], true);
    assert_eq!(v["trees"][0]["name"], "Expr");
}

#[test]
fn count_derivations() {
    let o = run(&[
        "count",
        "-g",
        &grammar("expr.grammar"),
        "--text",
        "a+a+a+a+a+a",
    ]);
    assert_eq!(stdout(&o), "42\n");
    let v = json(&run(&[
        "count",
        "-g",
        &grammar("permutations.grammar"),
        "--text",
        "4213",
        "--format",
        "json",
    ]));
    assert_eq!(v["count"], 1);
    assert_eq!(v["saturated"], false);
    let o = run(&[
        "count",
        "-g",
        &grammar("expr_nonassoc.grammar"),
        "--text",
        "a+a+a",
    ]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn stats_are_deterministic() {
    let o = run(&[
        "stats",
        "-g",
        &grammar("e.grammar"),
        "--text",
        "a",
        "--deterministic",
    ]);
    assert_eq!(
        stdout(&o),
        "accepted: true\ndescriptors_processed: 16\nuset: 16\nbsrs: 14\nprel: 5\ngrel: 9\ninstances: 1\ninput_length: 1\n"
    );
    assert!(stderr(&o).is_empty());
    let v = json(&run(&[
        "stats",
        "-g",
        &grammar("e.grammar"),
        "--text",
        "a",
        "--format",
        "json",
    ]));
    assert_eq!(v["descriptors_processed"], 16);
    assert!(v["wall_time_ms"].is_number());
}

#[test]
fn input_sources() {
    let g = grammar("list.grammar");
    let file = temp_file("input.txt", "a(a)\n");
    let o = run(&["recognize", "-g", &g, "--input", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run_stdin(&["recognize", "-g", &g, "--stdin"], "a(a)((a))\n");
    assert_eq!(o.status.code(), Some(0));
    let o = run_stdin(&["recognize", "-g", &g, "--stdin"], "a(a)(a)\n");
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_file(file).unwrap();
}

#[test]
fn words_mode() {
    let file = temp_file(
        "words.grammar",
        "%token num %digit\n%token plus %any\nE: E plus E | num\n",
    );
    let g = file.to_str().unwrap();
    let o = run(&[
        "count",
        "-g",
        g,
        "--mode",
        "words",
        "--text",
        "num plus num plus num",
    ]);
    assert_eq!(stdout(&o), "2\n");
    let o = run(&["recognize", "-g", g, "--mode", "words", "--text", "num num"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_file(file).unwrap();
}

#[test]
fn oracle_cross_check() {
    let o = run(&[
        "recognize",
        "-g",
        &grammar("list.grammar"),
        "--text",
        "a(a)((a))",
        "--oracle",
    ]);
    assert_eq!(stdout(&o), "oracle: agree\naccept\n");
    let o = run(&[
        "recognize",
        "-g",
        &grammar("tuples.grammar"),
        "--text",
        "(a,)",
        "--oracle",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "recognize",
        "-g",
        &grammar("s2.grammar"),
        "--text",
        "aa",
        "--oracle",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("left-recursive"));
}

#[test]
fn usage_and_grammar_errors() {
    let o = run(&["recognize", "-g", &grammar("e.grammar")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "recognize",
        "-g",
        &grammar("e.grammar"),
        "--text",
        "a",
        "--stdin",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "recognize",
        "-g",
        &grammar("csv.grammar"),
        "-s",
        "CSV",
        "--text",
        "a",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "));
    let bad = temp_file("bad.grammar", "S: T\n");
    let o = run(&["recognize", "-g", bad.to_str().unwrap(), "--text", "a"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("T"), "{}", stderr(&o));
    std::fs::remove_file(bad).unwrap();
    let o = run(&["recognize", "-g", "/nonexistent/x.grammar", "--text", "a"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_reports_each_size() {
    let o = run(&["bench", "-g", &grammar("s1.grammar"), "--sizes", "5,10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "size 5: accept, 47 descriptors\nsize 10: accept, 142 descriptors\n"
    );
    assert_eq!(stderr(&o).lines().count(), 2);
}
