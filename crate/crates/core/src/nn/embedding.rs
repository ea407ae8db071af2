use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tensor::{Params, Tensor};
use crate::error::{Error, Result};

pub const UNK: &str = "<unk>";

/// Token → vector lookup. Row 0 is reserved for unknown tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct EmbeddingTable {
    tokens: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    matrix: Tensor,
    pub trainable: bool,
}

#[derive(Deserialize)]
struct RawTable {
    tokens: Vec<String>,
    matrix: Tensor,
    trainable: bool,
}

impl TryFrom<RawTable> for EmbeddingTable {
    type Error = Error;
    fn try_from(r: RawTable) -> Result<Self> {
        let mut t = EmbeddingTable::from_rows(r.tokens, r.matrix)?;
        t.trainable = r.trainable;
        Ok(t)
    }
}

impl EmbeddingTable {
    /// `tokens[0]` must be the unknown token.
    pub fn from_rows(tokens: Vec<String>, matrix: Tensor) -> Result<Self> {
        if matrix.shape().len() != 2 || matrix.rows() != tokens.len() {
            return Err(Error::shape(format!("{} tokens for matrix {:?}", tokens.len(), matrix.shape())));
        }
        if tokens.first().map(String::as_str) != Some(UNK) {
            return Err(Error::invalid("embedding row 0 must be the unknown token"));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::validation("embedding vocabulary", format!("duplicate token {t:?}")));
            }
        }
        Ok(EmbeddingTable {
            tokens,
            index,
            matrix,
            trainable: false,
        })
    }

    /// Random uniform rows in `[-0.5, 0.5]`; `vocab` must not contain the
    /// unknown token, which is prepended.
    pub fn random(vocab: &[String], dim: usize, trainable: bool, rng: &mut impl Rng) -> Result<Self> {
        let mut tokens = vec![UNK.to_string()];
        tokens.extend(vocab.iter().cloned());
        let matrix = Tensor::uniform(&[tokens.len(), dim], 0.5, rng);
        let mut t = EmbeddingTable::from_rows(tokens, matrix)?;
        t.trainable = trainable;
        Ok(t)
    }

    /// Read the common text format: an optional `count dim` header, then
    /// `token v1 .. vd` per line. With `keep`, only listed tokens are
    /// retained. The unknown row is zero. The result is frozen.
    pub fn load_text(reader: impl BufRead, keep: Option<&HashSet<String>>) -> Result<Self> {
        let mut tokens = vec![UNK.to_string()];
        let mut seen = HashSet::new();
        let mut values: Vec<f64> = Vec::new();
        let mut dim: Option<usize> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let mut fields = line.split_whitespace();
            let Some(tok) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if i == 0 && rest.len() == 1 && tok.parse::<usize>().is_ok() {
                if let Ok(d) = rest[0].parse::<usize>() {
                    dim = Some(d);
                    continue;
                }
            }
            match dim {
                Some(d) if d != rest.len() => {
                    return Err(Error::Malformed {
                        line: lineno,
                        msg: format!("expected {d} values, found {}", rest.len()),
                    })
                }
                None if rest.is_empty() => {
                    return Err(Error::Malformed {
                        line: lineno,
                        msg: "token without vector".into(),
                    })
                }
                None => dim = Some(rest.len()),
                _ => {}
            }
            if tok == UNK || keep.is_some_and(|k| !k.contains(tok)) || !seen.insert(tok.to_string()) {
                continue;
            }
            for v in rest {
                let x: f64 = v.parse().map_err(|_| Error::Malformed {
                    line: lineno,
                    msg: format!("bad number {v:?}"),
                })?;
                values.push(x);
            }
            tokens.push(tok.to_string());
        }
        let d = dim.ok_or_else(|| Error::invalid("embedding file has no vectors"))?;
        let mut data = vec![0.0; d];
        data.extend(values);
        EmbeddingTable::from_rows(tokens, Tensor::from_vec(vec![data.len() / d, d], data)?)
    }

    /// Write in the text format with a header line. Row 0 is omitted.
    pub fn write_text(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{} {}", self.len() - 1, self.dim())?;
        for (i, t) in self.tokens.iter().enumerate().skip(1) {
            write!(w, "{t}")?;
            for v in self.matrix.row(i) {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 1
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn matrix(&self) -> &Tensor {
        &self.matrix
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(0)
    }

    pub fn ids(&self, tokens: &[String]) -> Vec<usize> {
        tokens.iter().map(|t| self.id(t)).collect()
    }

    pub fn row(&self, id: usize) -> &[f64] {
        self.matrix.row(id)
    }

    pub fn embed(&self, tokens: &[String]) -> Result<Vec<Vec<f64>>> {
        if tokens.is_empty() {
            return Err(Error::invalid("cannot embed an empty token sequence"));
        }
        Ok(tokens.iter().map(|t| self.row(self.id(t)).to_vec()).collect())
    }

    /// Accumulate `d` into the rows of `ids`.
    pub fn backward(&self, ids: &[usize], d: &[Vec<f64>], grad: &mut EmbeddingTable) {
        for (&i, g) in ids.iter().zip(d) {
            for (a, b) in grad.matrix.row_mut(i).iter_mut().zip(g) {
                *a += b;
            }
        }
    }
}

impl Params for EmbeddingTable {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        f("matrix".into(), &self.matrix);
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        f("matrix".into(), &mut self.matrix);
    }
}

/// Random vectors for a vocabulary, deterministic under `seed`. Tokens
/// that differ only in a numeric suffix (`cause0`, `cause1`) are drawn
/// around a shared centroid, the way related words sit close together in
/// pretrained vectors.
pub fn synthetic_embeddings(vocab: &[String], dim: usize, seed: u64) -> Result<EmbeddingTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = EmbeddingTable::random(vocab, dim, false, &mut rng)?;
    t.matrix.row_mut(0).fill(0.0);
    let mut centroids: HashMap<&str, Vec<f64>> = HashMap::new();
    for (i, tok) in vocab.iter().enumerate() {
        let Some(stem) = family_stem(tok) else { continue };
        let c = centroids
            .entry(stem)
            .or_insert_with(|| (0..dim).map(|_| rng.gen_range(-0.5..=0.5)).collect());
        for (v, m) in t.matrix.row_mut(i + 1).iter_mut().zip(c.iter()) {
            *v = 0.8 * m + 0.4 * *v;
        }
    }
    Ok(t)
}

fn family_stem(tok: &str) -> Option<&str> {
    let stem = tok.trim_end_matches(|c: char| c.is_ascii_digit());
    (stem.len() < tok.len() && stem.chars().any(|c| c.is_alphabetic())).then_some(stem)
}
