use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{locate, Corpus, Location, RelType};
use crate::error::{Error, Result};

/// Anything assigned to a WSJ section.
pub trait Sectioned {
    fn section(&self) -> u8;
}

impl Sectioned for super::RelationRecord {
    fn section(&self) -> u8 {
        self.section
    }
}

impl<T: Sectioned> Sectioned for &T {
    fn section(&self) -> u8 {
        (**self).section()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub dev: Vec<T>,
    pub test: Vec<T>,
}

impl<T> Split<T> {
    pub fn map<U>(self, mut f: impl FnMut(Vec<T>) -> Vec<U>) -> Split<U> {
        Split {
            train: f(self.train),
            dev: f(self.dev),
            test: f(self.test),
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.dev.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sections assigned to each part. Sections not listed are excluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: Vec<u8>,
    pub dev: Vec<u8>,
    pub test: Vec<u8>,
}

pub type FoldSpec = SplitSpec;

impl SplitSpec {
    /// Train 2-21, dev 22, test 23.
    pub fn standard() -> Self {
        SplitSpec {
            train: (2..=21).collect(),
            dev: vec![22],
            test: vec![23],
        }
    }

    pub fn apply<T: Sectioned + Clone>(&self, items: &[T]) -> Split<T> {
        let mut out = Split {
            train: Vec::new(),
            dev: Vec::new(),
            test: Vec::new(),
        };
        for it in items {
            let s = it.section();
            if self.train.contains(&s) {
                out.train.push(it.clone());
            } else if self.dev.contains(&s) {
                out.dev.push(it.clone());
            } else if self.test.contains(&s) {
                out.test.push(it.clone());
            }
        }
        out
    }
}

pub fn standard_split<T: Sectioned>(items: &[T]) -> Split<&T> {
    let refs: Vec<&T> = items.iter().collect();
    SplitSpec::standard().apply(&refs)
}

/// `k` contiguous section groups (sizes differ by at most one, larger groups
/// first). Fold `i` tests on group `i`, develops on group `i+1 mod k` and
/// trains on the rest.
pub fn cv_folds(sections: &[u8], k: usize) -> Result<Vec<FoldSpec>> {
    let mut secs = sections.to_vec();
    secs.sort_unstable();
    secs.dedup();
    if k < 2 {
        return Err(Error::invalid(format!("fold count must be at least 2, got {k}")));
    }
    if k > secs.len() {
        return Err(Error::invalid(format!(
            "{k} folds requested over {} sections",
            secs.len()
        )));
    }
    let base = secs.len() / k;
    let extra = secs.len() % k;
    let mut groups: Vec<Vec<u8>> = Vec::with_capacity(k);
    let mut at = 0;
    for g in 0..k {
        let n = base + usize::from(g < extra);
        groups.push(secs[at..at + n].to_vec());
        at += n;
    }
    Ok((0..k)
        .map(|i| {
            let dev_i = (i + 1) % k;
            FoldSpec {
                train: groups
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i && j != dev_i)
                    .flat_map(|(_, g)| g.iter().copied())
                    .collect(),
                dev: groups[dev_i].clone(),
                test: groups[i].clone(),
            }
        })
        .collect())
}

/// Mean (inter, intra) implicit-relation counts over the training part of each fold.
pub fn fold_train_ratio(corpus: &Corpus, folds: &[FoldSpec]) -> Result<(f64, f64)> {
    if folds.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mut inter = 0usize;
    let mut intra = 0usize;
    for fold in folds {
        for doc in corpus.docs.iter().filter(|d| fold.train.contains(&d.section)) {
            let spans = doc.sentence_spans();
            for r in doc.relations.iter().filter(|r| r.rel_type == RelType::Implicit) {
                match locate(r, &spans)? {
                    Location::InterSentential => inter += 1,
                    Location::IntraSentential => intra += 1,
                }
            }
        }
    }
    let n = folds.len() as f64;
    Ok((inter as f64 / n, intra as f64 / n))
}

/// Seeded shuffle then contiguous cut by the given train/dev fractions.
pub fn random_split<T>(mut items: Vec<T>, seed: u64, train_frac: f64, dev_frac: f64) -> Split<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items.shuffle(&mut rng);
    let n = items.len();
    let n_train = ((n as f64) * train_frac).round() as usize;
    let n_dev = (((n as f64) * dev_frac).round() as usize).min(n - n_train.min(n));
    let n_train = n_train.min(n);
    let test = items.split_off(n_train + n_dev);
    let dev = items.split_off(n_train);
    Split {
        train: items,
        dev,
        test,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Debug, PartialEq)]
    struct S(u8);
    impl Sectioned for S {
        fn section(&self) -> u8 {
            self.0
        }
    }

    #[test]
    fn standard_assignment() {
        let items: Vec<S> = (0..=24).map(S).collect();
        let s = standard_split(&items);
        assert_eq!(s.train.len(), 20);
        assert!(s.train.iter().any(|x| x.0 == 5));
        assert_eq!(s.dev.iter().map(|x| x.0).collect::<Vec<_>>(), vec![22]);
        assert_eq!(s.test.iter().map(|x| x.0).collect::<Vec<_>>(), vec![23]);
        let all: Vec<u8> = s.train.iter().chain(&s.dev).chain(&s.test).map(|x| x.0).collect();
        assert!(!all.contains(&0));
        assert!(!all.contains(&24));
    }

    #[test]
    fn twelve_folds_over_24_sections() {
        let secs: Vec<u8> = (1..=24).collect();
        let folds = cv_folds(&secs, 12).unwrap();
        assert_eq!(folds.len(), 12);
        for f in &folds {
            assert_eq!(f.test.len(), 2);
            assert_eq!(f.dev.len(), 2);
            assert_eq!(f.train.len(), 20);
        }
        let mut tested: Vec<u8> = folds.iter().flat_map(|f| f.test.clone()).collect();
        tested.sort();
        assert_eq!(tested, secs);
    }

    #[test]
    fn two_folds_contiguous_halves() {
        let secs: Vec<u8> = (0..=24).collect();
        let folds = cv_folds(&secs, 2).unwrap();
        assert_eq!(folds[0].test, (0..=12).collect::<Vec<_>>());
        assert_eq!(folds[1].test, (13..=24).collect::<Vec<_>>());
        assert_eq!(folds[0].dev, folds[1].test);
        assert!(folds[0].train.is_empty());
    }

    #[test]
    fn too_many_folds() {
        assert!(cv_folds(&[1, 2, 3], 4).is_err());
        assert!(cv_folds(&[1, 2, 3], 1).is_err());
    }

    #[test]
    fn random_split_partition() {
        let s = random_split((0..100).collect::<Vec<_>>(), 7, 0.6, 0.2);
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (60, 20, 20));
        let mut all: Vec<_> = s.train.iter().chain(&s.dev).chain(&s.test).copied().collect();
        all.sort();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        let again = random_split((0..100).collect::<Vec<_>>(), 7, 0.6, 0.2);
        assert_eq!(s, again);
    }
}
