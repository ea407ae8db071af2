//! Level-2 sense distribution of implicit relations by location and by
//! linkage, with a chi-squared test over the sense-by-location table.

use pdtb_lab::corpus::synth::generate_synthetic_corpus;
use pdtb_lab::eval::{chi_square, distribution, Axis};

fn main() -> pdtb_lab::Result<()> {
    let corpus = generate_synthetic_corpus(7, 200)?.to_corpus()?;
    for axis in [Axis::Location, Axis::Linkage] {
        let report = distribution(&corpus, axis);
        print!("{}", report.render());
        let table: Vec<Vec<f64>> = report
            .rows
            .iter()
            .filter(|r| r.counts.iter().sum::<u64>() > 0)
            .map(|r| r.counts.iter().map(|&c| c as f64).collect())
            .collect();
        let chi = chi_square(&table, false)?;
        println!("chi-squared {:.2} on {} dof, p = {:.3e}\n", chi.statistic, chi.dof, chi.p_value);
    }
    Ok(())
}
