use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "corpus", rel]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn pmodel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmodel"))
        .args(args)
        .env_remove("PMODEL_CORPUS_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sheffer_rewrite() {
    let o = pmodel(&["formal", "sheffer", "(!(p))"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "(p |/ p)\n");
}

#[test]
fn formal_parse_and_eval() {
    let o = pmodel(&["formal", "parse", "forall x.(x in H -> J S x)"]);
    assert_eq!(stdout(&o), "forall x. (x in H -> J S x)\n");
    let model = corpus("formal/jones_saw_some.json");
    let o = pmodel(&[
        "formal",
        "eval",
        "--model",
        &model,
        "exists x. (x in H & J S x)",
    ]);
    assert_eq!(stdout(&o), "true\n");
    let o = pmodel(&["formal", "parse", "forall x. ("]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn derive_p_text_and_emphasis() {
    let f = corpus("frep/jones_saw_everyone.json");
    let o = pmodel(&["derive", "p", &f]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("DS  y_1 Jones saw everyone_1\n"), "{out}");
    assert!(out.ends_with("=> Jones saw everyone\n"));
    let o = pmodel(&["derive", "p", &f, "--emphasis", "everyone"]);
    assert!(stdout(&o).contains("SS  Everyone_1 Jones saw t_1\n"));
    let o = pmodel(&["derive", "p", &f, "--emphasis", "nobody"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn derive_json_and_dot() {
    let f = corpus("frep/who.json");
    let o = pmodel(&["derive", "p", &f, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["model"], "P");
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    let o = pmodel(&["derive", "p", &f, "--format", "dot"]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn derive_t_interrogative() {
    let o = pmodel(&[
        "derive",
        "t",
        "--force",
        "interrogative",
        "y_1 did Jones see who_1 ?",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(
        out.contains("SS  [CP Who_1 did [IP Jones see t_1]] ?\n"),
        "{out}"
    );
    assert!(
        out.contains("LF  [CP Who_1 did [IP Jones see x_1]] ?\n"),
        "{out}"
    );
    assert!(out.ends_with("=> Who did Jones see?\n"));
    let o = pmodel(&["derive", "t", "--force", "rhetorical", "Jones left"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scope_and_compare() {
    let o = pmodel(&["scope", &corpus("frep/everyone_someone.json")]);
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = pmodel(&["compare", &corpus("frep/jones_saw_everyone.json")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lf agrees: true"));
}

#[test]
fn recognize_marks_failures() {
    let lex = corpus("lexicon.tsv");
    let o = pmodel(&["recognize", &lex, "Jon#s s#w ever#one"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "Jones saw everyone\n");
    let o = pmodel(&["recognize", &lex, "Jones s#w ####"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "Jones saw ?\n");
    let o = pmodel(&["recognize", &lex, "Jones s#w Mary", "--expect", "N N N"]);
    assert!(o.status.success());
    let o = pmodel(&["recognize", &lex, "Jones", "--expect", "N V"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gardenpath_reports_failure() {
    let g = corpus("grammar.cfg");
    let o = pmodel(&[
        "gardenpath",
        &g,
        "the horse raced past the barn fell",
        "--oracle",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(
        out.contains("failed: no attachment for `fell` at position 6"),
        "{out}"
    );
    assert!(out.contains("garden-path: true"));
    let o = pmodel(&["gardenpath", &g, "Jones saw everyone", "--format", "dot"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn corpus_run_matches_goldens() {
    let dir = corpus("");
    let o = pmodel(&["corpus", "run", "--dir", &dir, "--jobs", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with(" failed\n"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(pmodel(&[]).status.code(), Some(2));
    assert_eq!(pmodel(&["derive", "q"]).status.code(), Some(2));
    assert_eq!(pmodel(&["gardenpath"]).status.code(), Some(2));
}

#[test]
fn json_output_reads_back() {
    let path = corpus("frep/who.json");
    let o = pmodel(&["frep", &path, "--format", "json"]);
    assert!(o.status.success());
    let back = pmodel::frep::FRepresentation::from_json(&stdout(&o)).unwrap();
    let original =
        pmodel::frep::FRepresentation::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, original);

    let text = "wh x. (x in H, J S x)";
    let o = pmodel(&["formal", "parse", "--format", "json", text]);
    let f: pmodel::formal_lang::Formula = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(f, pmodel::formal_lang::parse_formula(text).unwrap());
}
