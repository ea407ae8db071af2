//! Precision, recall and F1 from a confusion matrix, and the location
//! weighted overall score.

use pdtb_lab::eval::{confusion, macro_f1, micro_f1, prf, solve_inter_weight, weighted_overall};
use pdtb_lab::sense::{SenseInventory, SenseLevel};

fn main() -> pdtb_lab::Result<()> {
    let inv = SenseInventory::new(SenseLevel::Two);
    let gold = ["Contingency.Cause", "Contingency.Cause", "Expansion.Conjunction", "Temporal.Asynchronous"];
    let pred = ["Contingency.Cause", "Expansion.Conjunction", "Expansion.Conjunction", "Contingency.Cause"];
    let m = confusion(&gold, &pred, inv.labels())?;
    for label in ["Contingency.Cause", "Expansion.Conjunction"] {
        let i = inv.index_of_name(label).unwrap();
        let s = prf(&m, i);
        println!("{label:<24} P {:.3} R {:.3} F1 {:.3}", s.precision, s.recall, s.f1);
    }
    println!("micro F1 {:.3}, macro F1 {:.3}", micro_f1(&m), macro_f1(&m));

    let overall = weighted_overall(35.791, 47.154, 0.75, 0.25)?;
    println!("weighted overall at 75/25: {overall:.3}");
    println!("inter weight giving 38.608: {:.4}", solve_inter_weight(35.791, 47.154, 38.608)?);
    Ok(())
}
