//! Train the majority-sense baseline, the Basic Model, Model 1 and Model 2
//! on a synthetic corpus and compare them by location.

use std::time::Instant;

use pdtb_lab::classifiers::{train, LocationFeature, ModelKind, TrainConfig};
use pdtb_lab::corpus::synth::{generate, SynthConfig};
use pdtb_lab::corpus::{make_instances, random_split, InstanceOptions};
use pdtb_lab::nn::synthetic_embeddings;

fn main() -> pdtb_lab::Result<()> {
    let mut sc = SynthConfig::new(42, 105);
    sc.ambiguity = 0.05;
    let synth = generate(sc)?;
    let corpus = synth.to_corpus()?;
    let inst = make_instances(&corpus, InstanceOptions::default());
    let emb = synthetic_embeddings(&synth.vocabulary(), 100, 42)?;
    let split = random_split(inst, 42, 0.6, 0.2);
    println!("train {} / dev {} / test {}", split.train.len(), split.dev.len(), split.test.len());

    let cfg = TrainConfig {
        lr: 0.003,
        batch_size: 16,
        patience: 10,
        seed: 42,
        ..Default::default()
    };
    let runs = [
        (ModelKind::Mfs, LocationFeature::Informative),
        (ModelKind::Basic, LocationFeature::Informative),
        (ModelKind::Model1, LocationFeature::Informative),
        (ModelKind::Model2, LocationFeature::Informative),
        (ModelKind::Model2, LocationFeature::Zero),
    ];
    println!("{:<8} {:<12} {:>7} {:>7} {:>7} {:>7}", "model", "f_S", "micro", "inter", "intra", "epochs");
    for (kind, lf) in runs {
        let t = Instant::now();
        let c = TrainConfig {
            location_feature: lf,
            ..cfg.clone()
        };
        let (model, log) = train(kind, &split.train, &split.dev, Some(emb.clone()), &c)?;
        let r = model.score(&split.test)?;
        println!(
            "{:<8} {:<12} {:>7.3} {:>7.3} {:>7.3} {:>7}  ({:.1?})",
            kind.as_str(),
            format!("{lf:?}"),
            r.micro_f1,
            r.inter.micro_f1,
            r.intra.micro_f1,
            log.epochs.len(),
            t.elapsed()
        );
    }
    Ok(())
}
