#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use persona_rag::eval::QAExample;
use persona_rag::llm::ScriptEntry;
use persona_rag::retrieval::Document;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_persona-rag"));
    cmd.env_remove("PERSONA_RAG_API_KEY")
        .env_remove("PERSONA_RAG_API_BASE")
        .env_remove("PERSONA_RAG_MODEL")
        .env_remove("PERSONA_RAG_LOG");
    cmd
}

pub fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "{:?} failed: {}\n{}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn core_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core")
}

pub fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) {
    let mut f = std::fs::File::create(path).unwrap();
    for item in items {
        serde_json::to_writer(&mut f, item).unwrap();
        f.write_all(b"\n").unwrap();
    }
}

pub fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// Independent BM25 (k1 = 1.2, b = 0.75) over every document, best first,
/// ties by ascending id.
pub fn brute_force(docs: &[Document], query: &str, k: usize) -> Vec<(String, f64)> {
    let (k1, b) = (1.2, 0.75);
    let toks: Vec<Vec<String>> = docs.iter().map(|d| words(&d.text)).collect();
    let n = docs.len() as f64;
    let avgdl = toks.iter().map(Vec::len).sum::<usize>() as f64 / n;
    let mut terms: Vec<String> = Vec::new();
    for t in words(query) {
        if !terms.contains(&t) {
            terms.push(t);
        }
    }
    let mut scored: Vec<(String, f64)> = docs
        .iter()
        .zip(&toks)
        .map(|(d, dt)| {
            let dl = dt.len() as f64;
            let mut s = 0.0;
            for t in &terms {
                let df = toks.iter().filter(|x| x.contains(t)).count() as f64;
                let tf = dt.iter().filter(|x| *x == t).count() as f64;
                if tf > 0.0 {
                    let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                    s += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
                }
            }
            (d.id.clone(), s)
        })
        .collect();
    scored.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then_with(|| x.0.cmp(&y.0)));
    scored.truncate(k);
    scored
}

pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.random_range(5..60);
            let text: Vec<String> = (0..len)
                .map(|_| {
                    let r: f64 = rng.random();
                    format!("w{}", (r * r * 300.0) as usize)
                })
                .collect();
            Document::new(format!("doc{i:03}"), format!("Title {i}"), text.join(" "))
        })
        .collect()
}

pub fn random_queries(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.random_range(1..6);
            (0..len)
                .map(|_| format!("w{}", rng.random_range(0..320)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Parses `rank<TAB>id<TAB>score<TAB>title` lines.
pub fn parse_search(stdout: &[u8]) -> Vec<(usize, String, f64, String)> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.splitn(4, '\t').collect();
            (f[0].parse().unwrap(), f[1].to_string(), f[2].parse().unwrap(), f[3].to_string())
        })
        .collect()
}

pub fn small_corpus() -> Vec<Document> {
    vec![
        Document::new("p1", "Mona Lisa theft", "The Mona Lisa was stolen from the Louvre in 1911."),
        Document::new("p2", "Peruggia", "Vincenzo Peruggia, a Louvre employee, stole the Mona Lisa."),
        Document::new("p3", "Florence", "Peruggia was arrested in Florence in 1913."),
        Document::new("p4", "Paris", "Paris is the capital of France."),
        Document::new("p5", "Italy", "Rome is the capital of Italy."),
    ]
}

pub fn qa_dataset(n: usize) -> Vec<QAExample> {
    (0..n)
        .map(|i| QAExample {
            id: format!("q{i:04}"),
            question: format!("Who painted picture number {i} in the Louvre?"),
            gold_answers: vec![format!("painter-{i}")],
        })
        .collect()
}

/// Writes corpus, index and dataset into `dir`; returns (dataset, index) paths.
pub fn setup(dir: &Path, questions: &[QAExample]) -> (PathBuf, PathBuf) {
    let corpus = dir.join("corpus.jsonl");
    write_jsonl(&corpus, &small_corpus());
    let index = dir.join("index.bin");
    run_ok(bin().args(["index", "--corpus"]).arg(&corpus).arg("--out").arg(&index));
    let dataset = dir.join("dataset.jsonl");
    write_jsonl(&dataset, questions);
    (dataset, index)
}

pub fn write_script(path: &Path, entries: &[ScriptEntry]) {
    write_jsonl(path, entries);
}

pub fn read_lines(path: &Path) -> Vec<serde_json::Value> {
    BufReader::new(std::fs::File::open(path).unwrap())
        .lines()
        .map(|l| serde_json::from_str(&l.unwrap()).unwrap())
        .collect()
}

pub struct FakeServer {
    pub base: String,
    pub hits: Arc<AtomicUsize>,
}

/// Minimal HTTP server answering every request with `status` and `body`
/// after `delay`.
pub fn fake_server(status: u16, body: &'static str, delay: Duration) -> FakeServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let counter = counter.clone();
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap_or(0) == 0 {
                        return;
                    }
                    if line == "\r\n" {
                        break;
                    }
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap_or(0);
                    }
                }
                let mut buf = vec![0u8; len];
                let _ = reader.read_exact(&mut buf);
                counter.fetch_add(1, Ordering::SeqCst);
                std::thread::sleep(delay);
                let reply = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.write_all(reply.as_bytes());
            });
        }
    });
    FakeServer {
        base: format!("http://{addr}/v1"),
        hits,
    }
}
