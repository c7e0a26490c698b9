use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn parselet(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parselet"))
        .arg("--cache")
        .arg(cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn text(seed: u64, vocab: &[&str], len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::new();
    while s.len() < len {
        s.push_str(vocab[rng.gen_range(0..vocab.len())]);
        s.push(' ');
    }
    s.truncate(len);
    s.into_bytes()
}

const A: [&str; 5] = ["apple", "banana", "cherry", "date", "elder"];
const B: [&str; 5] = ["one", "two", "three", "four", "five"];

struct Fixture {
    dir: tempfile::TempDir,
    cache: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("x.txt"), text(1, &A, 2000)).unwrap();
        std::fs::write(dir.path().join("x2.txt"), text(2, &A, 1800)).unwrap();
        std::fs::write(dir.path().join("y.txt"), text(3, &B, 2000)).unwrap();
        Fixture { dir, cache: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    fn run(&self, args: &[&str]) -> Output {
        parselet(self.cache.path(), args)
    }
}

#[test]
fn compress_then_decompress_roundtrips() {
    let f = Fixture::new();
    let (x, mpz, back) = (f.path("x.txt"), f.path("x.mpz"), f.path("back.txt"));
    let first = ok(&f.run(&["compress", &x, "-o", &mpz, "--patience", "20"]));
    assert!(first.contains("cache      miss"), "{first}");
    for key in ["rate", "codelength", "entries", "depth"] {
        assert!(first.contains(key));
    }
    ok(&f.run(&["decompress", &mpz, "-o", &back]));
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&x).unwrap());
    let second = ok(&f.run(&["compress", &x, "-o", &mpz, "--patience", "20"]));
    assert!(second.contains("cache      hit"));
    assert_eq!(first.replace("miss", "hit"), second);
    // The denoised version has the same length.
    let lossy = f.run(&["decompress", &mpz, "--lossy"]);
    assert_eq!(ok(&lossy).len(), std::fs::read(&x).unwrap().len());
}

#[test]
fn dist_is_a_symmetric_matrix_with_zero_diagonal() {
    let f = Fixture::new();
    let files = [f.path("x.txt"), f.path("x2.txt"), f.path("y.txt")];
    let args: Vec<&str> = ["dist", "--patience", "20"].into_iter().chain(files.iter().map(|s| s.as_str())).collect();
    let csv = ok(&f.run(&args));
    let rows: Vec<Vec<String>> = csv.lines().map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], ["name", "x.txt", "x2.txt", "y.txt"]);
    let v: Vec<Vec<f64>> = rows[1..].iter().map(|r| r[1..].iter().map(|c| c.parse().unwrap()).collect()).collect();
    for i in 0..3 {
        assert_eq!(v[i][i], 0.0);
        for j in 0..3 {
            assert_eq!(v[i][j], v[j][i]);
        }
    }
    assert!(v[0][1] < v[0][2]);
    // Evaluation reruns hit the cache and reproduce the output exactly.
    assert_eq!(ok(&f.run(&args)), csv);
    let listed = ok(&f.run(&["cache", "list"]));
    assert_eq!(listed.lines().count(), 3);
}

#[test]
fn inspect_reports_common_strings() {
    let f = Fixture::new();
    let (x, y, out) = (f.path("x.txt"), f.path("y.txt"), f.path("a.mpz"));
    ok(&f.run(&["archive", &x, &x, &y, "-o", &out, "--patience", "20"]));
    let dump = ok(&f.run(&["inspect", &out, "--model"]));
    for field in ["Decompr.", "K_2", "LDepth", "Patch", "<Total>", "MCS bits", "<Entries>"] {
        assert!(dump.contains(field), "missing {field}:\n{dump}");
    }
    let back = tempfile::tempdir().unwrap();
    ok(&f.run(&["decompress", &out, "-o", &back.path().to_string_lossy()]));
    assert_eq!(std::fs::read(back.path().join("0001")).unwrap(), std::fs::read(&x).unwrap());
    assert_eq!(std::fs::read(back.path().join("0002")).unwrap(), std::fs::read(&y).unwrap());
}

#[test]
fn score_ranks_the_own_model_first() {
    let f = Fixture::new();
    let (x, x2, y) = (f.path("x.txt"), f.path("x2.txt"), f.path("y.txt"));
    let table = ok(&f.run(&["score", &x, "--hypothesis", &x2, "--hypothesis", &y, "--patience", "20"]));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 4, "{table}");
    assert!(lines[1].ends_with("x2.txt"), "{table}");
    assert!(table.contains("\tempty"));
}

#[test]
fn pc_prob_indep_and_profile_run() {
    let f = Fixture::new();
    let (x, x2, y) = (f.path("x.txt"), f.path("x2.txt"), f.path("y.txt"));
    let dot = ok(&f.run(&["pc", &x, &x2, &y, "--eta", "0.5", "--dot", "--patience", "20"]));
    assert!(dot.starts_with("graph skeleton {"));
    let uni = tempfile::tempdir().unwrap();
    std::fs::write(uni.path().join("u1"), text(4, &A, 1500)).unwrap();
    std::fs::write(uni.path().join("u2"), text(5, &B, 1500)).unwrap();
    let p = ok(&f.run(&["prob", &x, &y, "--universe", &uni.path().to_string_lossy(), "--patience", "20"]));
    assert!(p.lines().any(|l| l.starts_with("name,p")));
    let i = ok(&f.run(&["indep", "-x", &x, "-y", &x2, "-z", &y, "--patience", "20"]));
    assert!(i.contains("I(X:Y|Z)"));
    let csv = ok(&f.run(&["rd-profile", &x, "--patience", "5"]));
    assert!(csv.starts_with("step,rate,codelength"));
}

#[test]
fn exit_codes_distinguish_failures() {
    let f = Fixture::new();
    let missing = f.path("missing.txt");
    assert_eq!(f.run(&["compress", &missing]).status.code(), Some(3));
    let junk = f.path("junk.mpz");
    std::fs::write(&junk, b"not an archive").unwrap();
    assert_eq!(f.run(&["inspect", &junk]).status.code(), Some(4));
    assert_eq!(f.run(&["compress", &f.path("x.txt"), "--tsig", "0"]).status.code(), Some(5));
    assert_eq!(f.run(&["dist", &f.path("x.txt"), "--metric", "cosine"]).status.code(), Some(5));
    assert_eq!(f.run(&["compress", &f.path("x.txt"), "--norm", "l3"]).status.code(), Some(5));
}
