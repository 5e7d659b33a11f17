//! End-to-end runs of the `kbctl` binary over the exit-code contract:
//! 0 clean, 1 domain error, 2 I/O or usage error.

mod common;

use common::{fixtures, Scratch};

fn fixture(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

const MUSTERMANN: &str = "queries/mustermann.flo";
const COMPOSITE: &str = "queries/composite.flo";

// check

#[test]
fn check_accepts_the_table_program() {
    let ws = Scratch::empty();
    let r = ws.run(&["check", &fixture("flogic/table.flo")]);
    assert_eq!(r.code, 0, "{}", r.describe());
}

#[test]
fn check_accepts_the_split_listings_as_one_program() {
    let ws = Scratch::empty();
    let files = ["flogic/hierarchy.flo", "flogic/signatures.flo", "flogic/rules.flo"].map(fixture);
    let r = ws.run(&["check", &files[0], &files[1], &files[2]]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert!(!r.stderr.contains("error"), "{}", r.describe());
}

#[test]
fn check_reports_a_cycle() {
    let ws = Scratch::empty();
    ws.write("cycle.flo", "A :: B.\nB :: C.\nC :: A.\n");
    let r = ws.run(&["check", "cycle.flo"]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert!(r.stderr.contains("class-cycle"), "{}", r.describe());
}

#[test]
fn check_missing_file_is_an_io_error() {
    let ws = Scratch::empty();
    let r = ws.run(&["check", "nope.flo"]);
    assert_eq!(r.code, 2, "{}", r.describe());
    assert!(r.stderr.contains("nope.flo"));
}

#[test]
fn check_positions_point_into_the_right_file() {
    let ws = Scratch::empty();
    ws.write("a.flo", "A.\nB :: A.\n");
    ws.write("b.flo", "C :: B.\n\nx : C[\n");
    let r = ws.run(&["check", "a.flo", "b.flo"]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert!(r.stderr.lines().any(|l| l.starts_with("b.flo:")), "{}", r.describe());
    assert!(!r.stderr.contains("a.flo:"), "{}", r.describe());
}

#[test]
fn check_workspace_is_clean() {
    let ws = Scratch::golden();
    let r = ws.run(&["check"]);
    assert_eq!(r.code, 0, "{}", r.describe());
}

#[test]
fn check_strict_and_lenient_differ_on_unknown_attributes() {
    let ws = Scratch::empty();
    ws.write("kb.flo", "TPerson.\nTPerson[HatName ==> STRING].\np : TPerson[HatAlter ->> \"3\"].\n");
    assert_eq!(ws.run(&["check", "kb.flo"]).code, 1);
    let r = ws.run(&["--lenient", "check", "kb.flo"]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert!(r.stderr.contains("warning"), "{}", r.describe());
}

#[test]
fn check_without_sources_is_a_usage_error() {
    assert_eq!(Scratch::empty().run(&["check"]).code, 2);
}

// query

#[test]
fn mustermann_query_returns_the_partners() {
    let ws = Scratch::golden();
    let r = ws.run(&["query", "-f", MUSTERMANN]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert_eq!(r.stdout, "NAME\n\"Maier\"\n\"Schulze\"\n");
}

#[test]
fn composite_query_finds_the_one_planted_person() {
    let ws = Scratch::golden();
    let r = ws.run(&["query", "-f", COMPOSITE]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert_eq!(r.stdout, "P\npe1\n");
}

#[test]
fn query_without_facts_prints_the_header() {
    let ws = Scratch::golden();
    ws.write("kbctl.manifest", "ontology = ontology.flo\n");
    let r = ws.run(&["query", "-q", "FORALL X, N <- X[HatName ->> N]."]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert_eq!(r.stdout, "X  N\n");
}

#[test]
fn unsafe_query_is_rejected() {
    let ws = Scratch::golden();
    let r = ws.run(&["query", "-q", "FORALL X, Y <- X : TPerson."]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert!(r.stderr.contains("unsafe-query"), "{}", r.describe());
}

#[test]
fn query_with_unknown_attribute_fails_in_strict_mode_only() {
    let ws = Scratch::golden();
    let q = "FORALL X <- X[HatAlter ->> \"3\"].";
    assert_eq!(ws.run(&["query", "-q", q]).code, 1);
    let r = ws.run(&["--lenient", "query", "-q", q]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert_eq!(r.stdout, "X\n");
}

#[test]
fn tsv_output() {
    let ws = Scratch::golden();
    let r = ws.run(&["query", "--tsv", "-q", "FORALL P, O <- P : TForscher[HatErfahrungMit ->> O]."]);
    assert_eq!(r.stdout, "P\tO\npe1\torg1\npe2\torg1\npe3\torg2\npe4\torg2\n", "{}", r.describe());
}

#[test]
fn explain_traces_a_row() {
    let ws = Scratch::golden();
    let r = ws.run(&["query", "-f", COMPOSITE, "--explain", "1"]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert!(r.stdout.contains("pe1[HatErfahrungMit ->> org1]  [by rule #1"), "{}", r.describe());
    assert!(r.stdout.contains("prj1[HatKunde ->> org1]  [asserted]"), "{}", r.describe());
}

#[test]
fn explain_row_out_of_range_is_a_usage_error() {
    let ws = Scratch::golden();
    assert_eq!(ws.run(&["query", "-f", COMPOSITE, "--explain", "2"]).code, 2);
    assert_eq!(ws.run(&["query", "-f", COMPOSITE, "--explain", "0"]).code, 2);
}

#[test]
fn cached_saturation_gives_the_same_answers() {
    let ws = Scratch::golden();
    let first = ws.run(&["query", "-f", MUSTERMANN]);
    assert!(ws.path().join(".kbctl-cache").read_dir().unwrap().count() == 1);
    let second = ws.run(&["query", "-f", MUSTERMANN]);
    assert_eq!(first.stdout, second.stdout);
    // a changed snapshot gets its own cache entry
    ws.write("facts.flo", "pe7 : TForscher.\npe7[HatName ->> \"Koch\"].\npe7[KooperiertMit ->> pe1].\n");
    let third = ws.run(&["query", "-f", MUSTERMANN]);
    assert_eq!(third.stdout, "NAME\n\"Koch\"\n\"Maier\"\n\"Schulze\"\n", "{}", third.describe());
}

#[test]
fn query_file_missing_is_an_io_error() {
    assert_eq!(Scratch::golden().run(&["query", "-f", "missing.flo"]).code, 2);
}

#[test]
fn query_needs_a_query() {
    assert_eq!(Scratch::golden().run(&["query"]).code, 2);
}

// ingest

#[test]
fn ingest_bag_document() {
    let ws = Scratch::golden();
    let r = ws.run(&["ingest", "docs/bag.rdf"]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert_eq!(r.stdout, "docs/bag.rdf: 3 statements, 7 facts, 0 warnings\n");
    let snapshot = ws.read("facts.flo");
    assert!(snapshot.contains("`Beispiel.pdf`[HatAutor ->> Autor_1]."), "{snapshot}");
    assert!(snapshot.contains("`Beispiel.pdf`[HatAutor ->> Autor_2]."), "{snapshot}");
    assert!(ws.read("kbctl.manifest").contains("document = docs/bag.rdf"));

    let q = ws.run(&["query", "-q", "FORALL A, P <- A[HatVeroeffentlicht ->> P]."]);
    assert_eq!(q.stdout, "A        P\nAutor_1  Beispiel.pdf\nAutor_2  Beispiel.pdf\n", "{}", q.describe());
}

#[test]
fn ingest_empty_block() {
    let ws = Scratch::golden();
    let r = ws.run(&["ingest", "docs/empty.rdf"]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert_eq!(r.stdout, "docs/empty.rdf: 0 statements, 0 facts, 0 warnings\n");
}

#[test]
fn ingest_html_embedded_annotations() {
    let ws = Scratch::golden();
    let r = ws.run(&["ingest", "docs/article.html"]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert!(r.stdout.starts_with("docs/article.html: 4 statements, 6 facts"), "{}", r.describe());
    assert!(ws.read("facts.flo").contains("Autor_1[HatEmail ->> \"hm@xyz.de\"]."));
}

#[test]
fn ingest_snapshot_is_canonical() {
    let a = Scratch::golden();
    let b = Scratch::golden();
    a.run(&["ingest", "docs/bag.rdf", "docs/article.html"]);
    b.run(&["ingest", "docs/article.html"]);
    b.run(&["ingest", "docs/bag.rdf"]);
    assert_eq!(a.read("facts.flo"), b.read("facts.flo"));
    let snapshot = a.read("facts.flo");
    let mut lines: Vec<&str> = snapshot.lines().collect();
    let printed = lines.clone();
    lines.sort();
    assert_eq!(lines, printed);
    // re-ingesting changes nothing
    a.run(&["ingest", "docs/bag.rdf"]);
    assert_eq!(a.read("facts.flo"), snapshot);
}

#[test]
fn ingest_without_mapping_is_refused() {
    let ws = Scratch::golden();
    ws.write("kbctl.manifest", "ontology = ontology.flo\n");
    let r = ws.run(&["ingest", "docs/bag.rdf"]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert!(r.stderr.contains("mapping"), "{}", r.describe());
}

#[test]
fn ingest_missing_document_is_an_io_error() {
    assert_eq!(Scratch::golden().run(&["ingest", "docs/none.rdf"]).code, 2);
}

#[test]
fn ingest_unmapped_property_depends_on_mode() {
    let ws = Scratch::golden();
    ws.write(
        "docs/extra.rdf",
        "<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\" xmlns:s=\"http://description.org/schema/\">\n\
         <rdf:Description about=\"Autor_9\"><s:Name>Koch</s:Name><s:Hobby>Schach</s:Hobby></rdf:Description>\n</rdf:RDF>\n",
    );
    let strict = ws.run(&["ingest", "docs/extra.rdf"]);
    assert_eq!(strict.code, 1, "{}", strict.describe());
    assert!(strict.stdout.contains("rejected"));
    assert!(!ws.path().join("facts.flo").exists() || !ws.read("facts.flo").contains("Koch"));

    let lenient = ws.run(&["--lenient", "ingest", "docs/extra.rdf"]);
    assert_eq!(lenient.code, 0, "{}", lenient.describe());
    assert_eq!(lenient.stdout, "docs/extra.rdf: 2 statements, 2 facts, 1 warnings\n");
}

#[test]
fn ingest_malformed_xml_needs_lenient_mode() {
    let ws = Scratch::golden();
    std::fs::copy(fixtures().join("rdf/structured.rdf"), ws.path().join("docs/structured.rdf")).unwrap();
    let strict = ws.run(&["ingest", "docs/structured.rdf"]);
    assert_eq!(strict.code, 1, "{}", strict.describe());
    let lenient = ws.run(&["--lenient", "ingest", "docs/structured.rdf"]);
    assert_eq!(lenient.code, 0, "{}", lenient.describe());
    assert!(lenient.stdout.starts_with("docs/structured.rdf: 4 statements, 6 facts"), "{}", lenient.describe());
}

#[test]
fn ingest_validates_against_the_doctype() {
    let ws = Scratch::golden();
    std::fs::copy(fixtures().join("xml/person.dtd"), ws.path().join("docs/person.dtd")).unwrap();
    std::fs::copy(fixtures().join("xml/person_external.xml"), ws.path().join("docs/person.xml")).unwrap();
    let valid = ws.run(&["ingest", "docs/person.xml"]);
    assert_eq!(valid.code, 0, "{}", valid.describe());

    let broken: String = ws.read("docs/person.xml").lines().filter(|l| !l.contains("TEmail")).map(|l| format!("{l}\n")).collect();
    ws.write("docs/broken.xml", &broken);
    let strict = ws.run(&["ingest", "docs/broken.xml"]);
    assert_eq!(strict.code, 1, "{}", strict.describe());
    assert!(strict.stderr.contains("expected <TEmail> after <TName>"), "{}", strict.describe());
    let lenient = ws.run(&["--lenient", "ingest", "docs/broken.xml"]);
    assert_eq!(lenient.code, 0, "{}", lenient.describe());
    assert!(lenient.stderr.contains("warning invalid-content"), "{}", lenient.describe());
}

#[test]
fn ingest_reports_each_document() {
    let ws = Scratch::golden();
    ws.run(&["version", "bump"]);
    let r = ws.run(&["ingest", "docs/report_v3.rdf", "docs/bag.rdf"]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert_eq!(r.stdout, "docs/report_v3.rdf: rejected, 1 errors\ndocs/bag.rdf: 3 statements, 7 facts, 0 warnings\n");
    assert!(ws.read("facts.flo").contains("Autor_2"));
    assert!(!ws.read("facts.flo").contains("Bericht_v3"));
}

// version

#[test]
fn fresh_workspace_is_version_one() {
    let r = Scratch::empty().run(&["version", "show"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "v1\n"), "{}", r.describe());
}

#[test]
fn bump_records_a_timestamped_entry() {
    let ws = Scratch::golden();
    let r = ws.run(&["version", "bump"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "v2\n"), "{}", r.describe());
    assert_eq!(ws.run(&["version", "show"]).stdout, "v2\n");
    let manifest = ws.read("kbctl.manifest");
    let bump = manifest.lines().find(|l| l.starts_with("bump = v2 ")).expect(&manifest);
    let stamp = bump.split_whitespace().nth(3).unwrap();
    assert!(chrono::DateTime::parse_from_rfc3339(stamp).is_ok(), "{bump}");
    assert!(manifest.contains("ontology-digest = "));
}

#[test]
fn bump_refuses_a_broken_ontology() {
    let ws = Scratch::golden();
    ws.append("ontology.flo", "\nTBroken :: TMissing :: .\n");
    let r = ws.run(&["version", "bump"]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert_eq!(ws.run(&["version", "show"]).stdout, "v1\n");
}

#[test]
fn changed_ontology_blocks_ingest_until_bumped() {
    let ws = Scratch::golden();
    assert_eq!(ws.run(&["ingest", "docs/bag.rdf"]).code, 0);
    ws.append("ontology.flo", "\nTBericht :: TVeroeffentlichung.\n");
    let r = ws.run(&["ingest", "docs/article.html"]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert!(r.stderr.contains("version bump"), "{}", r.describe());
    let check = ws.run(&["check"]);
    assert_eq!(check.code, 0);
    assert!(check.stderr.contains("changed since v1"), "{}", check.describe());

    assert_eq!(ws.run(&["version", "bump"]).stdout, "v2\n");
    let r = ws.run(&["ingest", "docs/article.html"]);
    assert_eq!(r.code, 0, "{}", r.describe());
}

#[test]
fn same_version_document_ingests_cleanly() {
    let ws = Scratch::golden();
    ws.run(&["version", "bump"]);
    let r = ws.run(&["ingest", "docs/report_v2.rdf"]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert_eq!(r.stdout, "docs/report_v2.rdf: 2 statements, 4 facts, 0 warnings\n");
    assert_eq!(r.stderr, "");
}

#[test]
fn older_version_document_warns_and_proceeds() {
    let ws = Scratch::golden();
    ws.run(&["version", "bump"]);
    let r = ws.run(&["ingest", "docs/report_v1.rdf"]);
    assert_eq!(r.code, 0, "{}", r.describe());
    assert!(r.stderr.contains("warning version-outdated"), "{}", r.describe());
    assert!(ws.read("facts.flo").contains("`Bericht_v1.pdf`[HatAutor ->> pe1]."));
}

#[test]
fn newer_version_document_is_rejected() {
    let ws = Scratch::golden();
    ws.run(&["version", "bump"]);
    let r = ws.run(&["ingest", "docs/report_v3.rdf"]);
    assert_eq!(r.code, 1, "{}", r.describe());
    assert!(r.stderr.contains("error version-too-new"), "{}", r.describe());
}

// usage

#[test]
fn usage_errors_exit_with_two() {
    let ws = Scratch::golden();
    assert_eq!(ws.run(&[]).code, 2);
    assert_eq!(ws.run(&["frobnicate"]).code, 2);
    assert_eq!(ws.run(&["--strict", "--lenient", "check"]).code, 2);
    assert_eq!(ws.run(&["ingest"]).code, 2);
    assert_eq!(ws.run(&["--workspace", "no/such/dir", "version", "show"]).code, 2);
}

#[test]
fn broken_manifest_is_a_usage_error() {
    let ws = Scratch::golden();
    ws.write("kbctl.manifest", "ontology ontology.flo\n");
    let r = ws.run(&["version", "show"]);
    assert_eq!(r.code, 2, "{}", r.describe());
    assert!(r.stderr.contains("kbctl.manifest:1"), "{}", r.describe());
}

#[test]
fn workspace_flag_selects_the_directory() {
    let ws = Scratch::golden();
    let elsewhere = Scratch::empty();
    let path = ws.path().to_string_lossy().into_owned();
    let q = ws.path().join(MUSTERMANN).to_string_lossy().into_owned();
    let r = elsewhere.run(&["--workspace", &path, "query", "-f", &q]);
    assert_eq!(r.stdout, "NAME\n\"Maier\"\n\"Schulze\"\n", "{}", r.describe());
}
