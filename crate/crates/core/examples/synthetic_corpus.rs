//! Generate a synthetic corpus and write it in both relation formats.
//!
//! cargo run --example synthetic_corpus -- [seed] [docs] [out-dir]

use std::collections::BTreeMap;
use std::path::PathBuf;

use pdtb_lab::corpus::synth::generate_synthetic_corpus;
use pdtb_lab::corpus::{make_instances, InstanceOptions};

fn main() -> pdtb_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed = args.first().and_then(|s| s.parse().ok()).unwrap_or(42);
    let docs = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let out = args
        .get(2)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pdtb-lab-synth"));

    let synth = generate_synthetic_corpus(seed, docs)?;
    synth.write_to(&out)?;
    let corpus = synth.to_corpus()?;

    let mut by_type: BTreeMap<&str, usize> = BTreeMap::new();
    for r in corpus.relations() {
        *by_type.entry(r.rel_type.as_str()).or_default() += 1;
    }
    println!("{} documents written to {}", corpus.docs.len(), out.display());
    for (t, n) in by_type {
        println!("  {t:<10} {n}");
    }
    let inst = make_instances(&corpus, InstanceOptions::default());
    let intra = inst.iter().filter(|i| i.location.is_intra()).count();
    println!("implicit instances: {} ({} intra-sentential)", inst.len(), intra);
    Ok(())
}
