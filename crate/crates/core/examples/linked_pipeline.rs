//! Naive-Bayes detection of explicit relations linked with an implicit one,
//! then sense classification of the detected implicit relations.

use pdtb_lab::classifiers::{train, ModelKind, TrainConfig};
use pdtb_lab::corpus::synth::generate_synthetic_corpus;
use pdtb_lab::corpus::{make_instances, InstanceOptions, SplitSpec};
use pdtb_lab::nn::synthetic_embeddings;
use pdtb_lab::recognizers::{binary_report, build_linked_dataset, pipeline_classify, LinkedRecognizer};
use pdtb_lab::treebank::ProductionMode;

fn main() -> pdtb_lab::Result<()> {
    let synth = generate_synthetic_corpus(5, 250)?;
    let corpus = synth.to_corpus()?;
    let data = build_linked_dataset(&corpus, 100, ProductionMode::InternalOnly)?;
    println!("{} rules in the feature dictionary", data.dictionary.len());
    let rec = LinkedRecognizer::train(&data, 1.0)?;
    let golds: Vec<bool> = data.split.test.iter().map(|i| i.label).collect();
    let flagged = rec.predict_all(&data.split.test)?;
    let d = binary_report(&golds, &flagged)?;
    println!("linked detection P {:.3} R {:.3} F1 {:.3}", d.precision, d.recall, d.f1);

    let inst = make_instances(&corpus, InstanceOptions::default());
    let split = SplitSpec::standard().apply(&inst);
    let emb = synthetic_embeddings(&synth.vocabulary(), 100, 5)?;
    let cfg = TrainConfig {
        lr: 0.003,
        batch_size: 16,
        patience: 10,
        seed: 5,
        ..Default::default()
    };
    for kind in [ModelKind::Basic, ModelKind::Model1] {
        let (clf, _) = train(kind, &split.train, &split.dev, Some(emb.clone()), &cfg)?;
        let (_, report) = pipeline_classify(&corpus, &data.split.test, &flagged, &clf)?;
        let sense = report.sense.map(|s| format!("{:.3}", s.micro_f1)).unwrap_or_else(|| "n/a".into());
        println!(
            "{kind}: {} flagged, {} matched, all intra {}, sense F1 {sense}",
            report.recognized, report.matched, report.all_intra
        );
    }
    Ok(())
}
