//! The command-line workflow driven from code: write a synthetic corpus
//! with its config, then validate, train and evaluate.

use pdtb_lab::cli::{cmd_eval, cmd_synth, cmd_train, cmd_validate, ExperimentConfig};

fn main() -> pdtb_lab::Result<()> {
    let dir = std::env::temp_dir().join("pdtb-lab-experiment");
    cmd_synth(42, 60, &dir)?;
    let mut cfg = ExperimentConfig::load(&dir.join("experiment.toml"))?;
    cfg.out = dir.join("runs");

    let v = cmd_validate(&cfg)?;
    println!("{} relations, implicit {} inter / {} intra", v.relations, v.implicit_inter, v.implicit_intra);
    let (_, r) = cmd_train(&cfg)?;
    println!("{} micro F1 {:.3} after {} epochs", r.model, r.metrics.micro_f1, r.epochs);
    let m = cmd_eval(&cfg, &cfg.out.join("model.json"))?;
    println!("reloaded checkpoint scores {:.3}", m.micro_f1);
    println!("artifacts in {}", cfg.out.display());
    Ok(())
}
