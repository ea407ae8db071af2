//! Finite-difference gradient check of every layer and the composed model.

use pdtb_lab::classifiers::composed_grad_check;
use pdtb_lab::nn::layer_suite;

fn main() -> pdtb_lab::Result<()> {
    let mut checks = layer_suite(0, 1e-5)?;
    checks.push(("basic_model".into(), composed_grad_check(0, 1e-5)?));
    for (name, c) in checks {
        println!("{name:<16} max rel error {:.2e} (worst {}[{}])", c.max_rel_error, c.worst.0, c.worst.1);
    }
    Ok(())
}
