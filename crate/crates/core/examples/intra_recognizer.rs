//! Sentence-level recognizer for intra-sentential implicit and AltLex
//! relations over linearized parse trees.

use pdtb_lab::corpus::synth::generate_synthetic_corpus;
use pdtb_lab::recognizers::{
    binary_report, build_sentence_dataset, majority_baseline, train_intra_recognizer, RecognizerConfig,
};

fn main() -> pdtb_lab::Result<()> {
    let corpus = generate_synthetic_corpus(11, 60)?.to_corpus()?;
    let split = build_sentence_dataset(&corpus, 11)?;
    let positives = split.train.iter().filter(|s| s.label).count();
    println!("{} training sentences, {positives} labelled 1", split.train.len());
    println!("example: {}", split.train[0].tokens.join(" "));

    let train_labels: Vec<bool> = split.train.iter().map(|s| s.label).collect();
    let test_labels: Vec<bool> = split.test.iter().map(|s| s.label).collect();
    let majority = majority_baseline(&train_labels)?;
    let base = binary_report(&test_labels, &vec![majority; test_labels.len()])?;
    println!("baseline   acc {:.3} F1 {:.3}", base.accuracy, base.f1);

    let cfg = RecognizerConfig {
        embed_dim: 32,
        hidden: 32,
        lr: 0.003,
        patience: 5,
        max_epochs: 30,
        seed: 11,
        ..Default::default()
    };
    let (net, log) = train_intra_recognizer(&split, &cfg, None)?;
    let r = net.evaluate(&split.test)?;
    println!(
        "recognizer acc {:.3} P {:.3} R {:.3} F1 {:.3} after {} epochs",
        r.accuracy,
        r.precision,
        r.recall,
        r.f1,
        log.epochs.len()
    );
    Ok(())
}
