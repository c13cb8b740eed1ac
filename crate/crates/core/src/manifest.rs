//! Seeded corpus runs of the constancy check and their manifests.
//!
//! A manifest is deterministic given its run parameters: records are sorted
//! by `(p, n, index)` and timings sit in a separate section, so two runs with
//! the same seed agree byte-for-byte outside `timings`.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::Prime;
use crate::endoscopy::{corpus_entry, gs_constancy, mutation_caught, mutations, CorpusEntry};
use crate::error::Result;
use crate::formats::{config_json, etale_json, mu8_json, square_class_json};
use crate::weil::Mu8;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever the corpus generator changes what a seed produces.
pub const GENERATOR_VERSION: &str = "gs-corpus/1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSpec {
    pub seed: u64,
    pub primes: Vec<Prime>,
    pub ns: Vec<usize>,
    pub count: usize,
    /// Also run single-entry corruptions of each configuration.
    pub mutations: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub p: u64,
    pub n: usize,
    pub index: usize,
    pub seed: u64,
    /// Absent when the configuration could not be generated.
    pub entry: Option<CorpusEntry>,
    pub inputs_digest: String,
    pub lhs: Option<Mu8>,
    pub rhs: Option<Mu8>,
    pub pass: bool,
    pub error: Option<String>,
    /// `(caught, total)` over the mutations of this configuration.
    pub mutations: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub spec: RunSpec,
    pub records: Vec<Record>,
    /// Wall-clock milliseconds per `(p, n)` group.
    pub timings: Vec<(u64, usize, f64)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn run_one(spec: &RunSpec, p: Prime, n: usize, index: usize) -> Record {
    let seed = crate::endoscopy::mix_seed(spec.seed, &[p.get(), n as u64, index as u64]);
    let mut rec = Record {
        p: p.get(),
        n,
        index,
        seed,
        entry: None,
        inputs_digest: String::new(),
        lhs: None,
        rhs: None,
        pass: false,
        error: None,
        mutations: None,
    };
    let entry = match corpus_entry(spec.seed, p, n, index) {
        Ok(e) => e,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.inputs_digest = sha256_hex(config_json(&entry.config).to_string().as_bytes());
    match gs_constancy(&entry.config, n) {
        Ok(out) => {
            rec.lhs = out.lhs;
            rec.rhs = Some(out.rhs);
            rec.pass = out.pass;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    if spec.mutations {
        let ms = mutations(&entry.config);
        let caught = ms.iter().filter(|(_, m)| mutation_caught(m, n)).count();
        rec.mutations = Some((caught, ms.len()));
    }
    rec.entry = Some(entry);
    rec
}

pub fn run(spec: &RunSpec) -> Manifest {
    let mut records = Vec::new();
    let mut timings = Vec::new();
    for &p in &spec.primes {
        for &n in &spec.ns {
            let start = Instant::now();
            let group: Vec<Record> = (0..spec.count).into_par_iter().map(|i| run_one(spec, p, n, i)).collect();
            timings.push((p.get(), n, start.elapsed().as_secs_f64() * 1e3));
            records.extend(group);
        }
    }
    records.sort_by_key(|r| (r.p, r.n, r.index));
    Manifest { spec: spec.clone(), records, timings }
}

impl Manifest {
    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.pass).count()
    }

    /// Records whose check ran and returned false.
    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| !r.pass && r.error.is_none()).count()
    }

    /// Records that could not be evaluated.
    pub fn errored(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn mutation_totals(&self) -> (usize, usize) {
        self.records.iter().filter_map(|r| r.mutations).fold((0, 0), |(a, b), (c, t)| (a + c, b + t))
    }

    /// Process exit status: 0 all pass, 1 some check failed, 3 some record
    /// could not be evaluated.
    pub fn exit_code(&self) -> i32 {
        if self.failed() > 0 {
            1
        } else if self.errored() > 0 {
            3
        } else {
            0
        }
    }

    pub fn records_json(&self) -> Value {
        Value::Array(self.records.iter().map(record_json).collect())
    }

    /// Everything except timings; stable across reruns.
    pub fn deterministic_json(&self) -> Value {
        let records = self.records_json();
        let (caught, total) = self.mutation_totals();
        let mut v = json!({
            "tool_version": TOOL_VERSION,
            "generator_version": GENERATOR_VERSION,
            "seed": self.spec.seed,
            "primes": self.spec.primes.iter().map(|p| p.get()).collect::<Vec<_>>(),
            "ns": self.spec.ns,
            "count": self.spec.count,
            "summary": {
                "total": self.records.len(),
                "passed": self.passed(),
                "failed": self.failed(),
                "errored": self.errored(),
            },
            "records_digest": sha256_hex(records.to_string().as_bytes()),
            "records": records,
        });
        if self.spec.mutations {
            v["summary"]["mutations"] = json!({ "caught": caught, "total": total });
        }
        v
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.deterministic_json();
        v["timings"] = Value::Array(
            self.timings.iter().map(|(p, n, ms)| json!({ "p": p, "n": n, "millis": (ms * 1e3).round() / 1e3 })).collect(),
        );
        v
    }
}

fn record_json(r: &Record) -> Value {
    let mut v = json!({
        "p": r.p,
        "n": r.n,
        "index": r.index,
        "seed": r.seed,
        "inputs_digest": r.inputs_digest,
        "lhs": r.lhs.map(mu8_json),
        "rhs": r.rhs.map(mu8_json),
        "pass": r.pass,
    });
    if let Some(e) = &r.entry {
        v["K"] = etale_json(&e.k);
        v["c"] = square_class_json(&e.c);
    }
    if let Some(e) = &r.error {
        v["error"] = json!(e);
    }
    if let Some((c, t)) = r.mutations {
        v["mutations"] = json!({ "caught": c, "total": t });
    }
    v
}

/// The corpus itself: every configuration as a literal, for replay by other
/// tools.
pub fn generate(spec: &RunSpec) -> Result<Value> {
    let mut entries = Vec::new();
    for &p in &spec.primes {
        for &n in &spec.ns {
            let group: Result<Vec<CorpusEntry>> =
                (0..spec.count).into_par_iter().map(|i| corpus_entry(spec.seed, p, n, i)).collect();
            entries.extend(group?.into_iter().map(|e| {
                json!({
                    "p": e.p,
                    "n": e.n,
                    "index": e.index,
                    "seed": e.seed,
                    "K": etale_json(&e.k),
                    "c": square_class_json(&e.c),
                    "config": config_json(&e.config),
                })
            }));
        }
    }
    Ok(json!({
        "tool_version": TOOL_VERSION,
        "generator_version": GENERATOR_VERSION,
        "seed": spec.seed,
        "primes": spec.primes.iter().map(|p| p.get()).collect::<Vec<_>>(),
        "ns": spec.ns,
        "count": spec.count,
        "entries": entries,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reruns_agree() {
        let spec = RunSpec { seed: 7, primes: vec![Prime::new(3).unwrap()], ns: vec![1, 2], count: 4, mutations: false };
        let a = run(&spec);
        let b = run(&spec);
        assert_eq!(a.deterministic_json().to_string(), b.deterministic_json().to_string());
        assert_eq!(a.exit_code(), 0);
        assert_eq!(a.records.len(), 8);
    }
}
