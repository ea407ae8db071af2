//! Cross-validation over contiguous section groups.

use pdtb_lab::classifiers::{train, ModelKind, TrainConfig};
use pdtb_lab::corpus::synth::generate_synthetic_corpus;
use pdtb_lab::corpus::{cv_folds, fold_train_ratio, make_instances, InstanceOptions};
use pdtb_lab::eval::cross_validate;
use pdtb_lab::nn::synthetic_embeddings;

fn main() -> pdtb_lab::Result<()> {
    let synth = generate_synthetic_corpus(3, 100)?;
    let corpus = synth.to_corpus()?;
    let inst = make_instances(&corpus, InstanceOptions::default());
    let emb = synthetic_embeddings(&synth.vocabulary(), 50, 3)?;
    let folds = cv_folds(&corpus.sections(), 5)?;
    let (inter, intra) = fold_train_ratio(&corpus, &folds)?;
    println!("mean training counts per fold: {inter:.1} inter, {intra:.1} intra");

    let cfg = TrainConfig {
        hidden: 50,
        lr: 0.003,
        batch_size: 16,
        patience: 5,
        seed: 3,
        ..Default::default()
    };
    let report = cross_validate(&folds, |i, f| {
        let s = f.apply(&inst);
        let (m, _) = train(ModelKind::Basic, &s.train, &s.dev, Some(emb.clone()), &cfg)?;
        let score = m.score(&s.test)?.overall_micro;
        println!("fold {i}: test sections {:?} -> {score:.3}", f.test);
        Ok(score)
    })?;
    println!("mean {:.3}", report.mean);
    Ok(())
}
