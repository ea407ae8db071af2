use serde::{Deserialize, Serialize};

use crate::corpus::FoldSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub fold: usize,
    pub test_sections: Vec<u8>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldScore>,
    /// Unweighted mean of the fold scores.
    pub mean: f64,
}

/// Run `train_and_score` once per fold, in fold order.
pub fn cross_validate<F>(folds: &[FoldSpec], mut train_and_score: F) -> Result<CvReport>
where
    F: FnMut(usize, &FoldSpec) -> Result<f64>,
{
    if folds.is_empty() {
        return Err(Error::invalid("no folds"));
    }
    let mut out = Vec::with_capacity(folds.len());
    for (i, f) in folds.iter().enumerate() {
        if f.train.is_empty() || f.dev.is_empty() || f.test.is_empty() {
            return Err(Error::invalid(format!("fold {i} has an empty part")));
        }
        let score = train_and_score(i, f)?;
        out.push(FoldScore {
            fold: i,
            test_sections: f.test.clone(),
            score,
        });
    }
    let mean = out.iter().map(|f| f.score).sum::<f64>() / out.len() as f64;
    Ok(CvReport { folds: out, mean })
}
