use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use consol::config::SessionConfig;
use consol::export::{DECISIONS, GOLDEN, METRICS, STANDARDIZED};
use consol::ingest::{read_path, write_table};
use consol::labels::write_labels;
use consol::log::write_log;
use consol::reviewer::run_session;
use consol::session::Session;
use consol::synth::Planted;
use tempfile::TempDir;

const CONFIG: &str = r#"
input = "input.csv"
key_column = "id"
target_columns = ["name", "address", "journal"]
budget = 40
seed = 9
labels = "labels.csv"
"#;

struct Fixture {
    dir: TempDir,
    planted: Planted,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let planted = Planted::generate(20, 3);
        write_table(&planted.table, b',', fs::File::create(dir.path().join("input.csv")).unwrap()).unwrap();
        write_labels(&planted.labels["name"], b',', fs::File::create(dir.path().join("labels.csv")).unwrap()).unwrap();
        fs::write(dir.path().join("consol.toml"), CONFIG).unwrap();
        Fixture { dir, planted }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Reviews with the planted oracle and stores the log.
    fn record(&self) -> PathBuf {
        let config = SessionConfig::load(&self.path("consol.toml")).unwrap();
        let mut session = Session::new(self.planted.table.clone(), config).unwrap();
        run_session(&mut session, &mut self.planted.reviewer()).unwrap();
        assert!(session.log().iter().any(|r| r.direction.is_some()));
        let path = self.path("recorded.jsonl");
        write_log(fs::File::create(&path).unwrap(), session.log()).unwrap();
        path
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_consol"))
            .arg("--config")
            .arg(self.path("consol.toml"))
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    }
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(name).display()))
}

#[test]
fn ingest_reports_counts() {
    let fx = Fixture::new();
    let out = fx.ok(&["ingest"]);
    assert!(out.contains(&format!("rows = {}", fx.planted.table.row_count())), "{out}");
    assert!(out.contains("clusters = 20"), "{out}");
    assert!(out.contains("replacements[journal] = "), "{out}");
}

#[test]
fn replay_exports_are_byte_identical() {
    let fx = Fixture::new();
    let log = fx.record();
    let log = log.to_str().unwrap();
    let a = fx.path("a");
    let b = fx.path("b");
    fx.ok(&["replay", "--decisions", log, "--out", a.to_str().unwrap()]);
    fx.ok(&["replay", "--decisions", log, "--out", b.to_str().unwrap()]);
    for name in [STANDARDIZED, GOLDEN, DECISIONS, METRICS] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
    assert_eq!(read(&a, DECISIONS), fs::read(log).unwrap());

    // Replaying the exported log reproduces the export again.
    let c = fx.path("c");
    let again = a.join(DECISIONS);
    fx.ok(&["export", "--decisions", again.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert_eq!(read(&a, STANDARDIZED), read(&c, STANDARDIZED));

    let standardized = read_path(&a.join(STANDARDIZED), b',', "id").unwrap();
    assert_eq!(standardized.row_count(), fx.planted.table.row_count());
    assert_ne!(standardized, fx.planted.table);
}

#[test]
fn export_refuses_to_overwrite() {
    let fx = Fixture::new();
    let out = fx.path("out");
    let out = out.to_str().unwrap();
    fx.ok(&["export", "--out", out]);
    let before = read(Path::new(out), STANDARDIZED);
    let refused = fx.run(&["export", "--out", out]);
    assert!(!refused.status.success());
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));
    fx.ok(&["export", "--out", out, "--force"]);
    assert_eq!(read(Path::new(out), STANDARDIZED), before);
}

#[test]
fn evaluate_prints_metrics() {
    let fx = Fixture::new();
    let labels = fx.path("labels.csv");
    let labels = labels.to_str().unwrap();
    let before = fx.ok(&["evaluate", "--labels", labels]);
    assert!(before.contains("recall"), "{before}");
    let log = fx.record();
    let after = fx.ok(&["evaluate", "--labels", labels, "--decisions", log.to_str().unwrap()]);
    assert_ne!(before, after);
    assert!(after.contains("precision = 1.0000"), "{after}");
}

#[test]
fn replay_rejects_a_foreign_log() {
    let fx = Fixture::new();
    let log = fx.record();
    let text = fs::read_to_string(&log).unwrap().replacen("\"column\":\"name\"", "\"column\":\"title\"", 1);
    fs::write(&log, text).unwrap();
    let out = fx.run(&["replay", "--decisions", log.to_str().unwrap(), "--out", fx.path("x").to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn config_is_validated() {
    let fx = Fixture::new();
    let config = SessionConfig::load(&fx.path("consol.toml")).unwrap();
    assert_eq!(config.input, fx.path("input.csv"));
    assert_eq!(config.labels, Some(fx.path("labels.csv")));
    assert_eq!(config.max_path_len, 6);
    assert_eq!(config.budget, 40);

    for (bad, why) in [
        ("budget = 0", "budget"),
        ("budget = 1\nmax_path_len = 0", "max_path_len"),
        ("budget = 1\ncolour = \"red\"", "colour"),
    ] {
        let text = CONFIG.replace("budget = 40", bad);
        let path = fx.path("bad.toml");
        fs::write(&path, text).unwrap();
        let err = format!("{:#}", SessionConfig::load(&path).unwrap_err());
        assert!(err.contains(why), "{err}");
    }
    let missing = fx.run(&["--config", fx.path("nope.toml").to_str().unwrap(), "ingest"]);
    assert!(!missing.status.success());
}
