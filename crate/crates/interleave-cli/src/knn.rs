//! K-nearest-neighbor classification over a precomputed distance matrix,
//! with leave-one-out and k-fold cross-validation.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use interleave_core::Value;

use crate::format::DistanceMatrix;

pub struct Dataset {
    pub matrix: DistanceMatrix,
    /// Class per sample, aligned with the matrix labels.
    pub classes: Vec<String>,
}

impl Dataset {
    pub fn new(matrix: DistanceMatrix, labels: &[(String, String)]) -> Result<Dataset> {
        let lookup: BTreeMap<&str, &str> =
            labels.iter().map(|(n, c)| (n.as_str(), c.as_str())).collect();
        let mut classes = Vec::with_capacity(matrix.labels.len());
        for name in &matrix.labels {
            match lookup.get(name.as_str()) {
                Some(c) => classes.push(c.to_string()),
                None => bail!("no class label for {name:?}"),
            }
        }
        Ok(Dataset { matrix, classes })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Majority vote among the `k` nearest training samples. Ties in
    /// distance break by index, ties in votes by nearest member, so the
    /// prediction is deterministic.
    pub fn predict(&self, sample: usize, k: usize, train: &[usize]) -> String {
        let mut near: Vec<(Value, usize)> =
            train.iter().map(|&j| (self.matrix.values[sample][j], j)).collect();
        near.sort();
        near.truncate(k.max(1));
        let mut votes: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for (rank, &(_, j)) in near.iter().enumerate() {
            let e = votes.entry(self.classes[j].as_str()).or_insert((0, rank));
            e.0 += 1;
        }
        votes
            .iter()
            .max_by(|a, b| (a.1 .0, usize::MAX - a.1 .1).cmp(&(b.1 .0, usize::MAX - b.1 .1)))
            .map(|(c, _)| c.to_string())
            .unwrap_or_default()
    }

    /// Leave-one-out accuracy at a fixed `k`.
    pub fn loo_accuracy(&self, k: usize) -> f64 {
        let mut hits = 0usize;
        for i in 0..self.len() {
            let train: Vec<usize> = (0..self.len()).filter(|&j| j != i).collect();
            if self.predict(i, k, &train) == self.classes[i] {
                hits += 1;
            }
        }
        hits as f64 / self.len().max(1) as f64
    }

    /// Mean accuracy over `folds` round-robin folds at a fixed `k`.
    pub fn fold_accuracy(&self, k: usize, folds: usize) -> f64 {
        let folds = folds.min(self.len()).max(2);
        let mut hits = 0usize;
        for fold in 0..folds {
            let train: Vec<usize> = (0..self.len()).filter(|&j| j % folds != fold).collect();
            for i in (0..self.len()).filter(|&j| j % folds == fold) {
                if self.predict(i, k, &train) == self.classes[i] {
                    hits += 1;
                }
            }
        }
        hits as f64 / self.len().max(1) as f64
    }

    /// Best `k` in `1..=k_max` by `folds`-fold cross-validation; ties go to
    /// the smallest `k`.
    pub fn select_k(&self, k_max: usize, folds: usize) -> (usize, f64) {
        let mut best = (1, f64::NEG_INFINITY);
        for k in 1..=k_max {
            let acc = self.fold_accuracy(k, folds);
            if acc > best.1 {
                best = (k, acc);
            }
        }
        best
    }

    /// Leave-one-out confusion matrix at a fixed `k`: rows are true
    /// classes, columns predicted, in sorted class order.
    pub fn confusion(&self, k: usize) -> (Vec<String>, Vec<Vec<usize>>) {
        let mut order: Vec<String> = self.classes.clone();
        order.sort();
        order.dedup();
        let index: BTreeMap<&str, usize> =
            order.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let mut m = vec![vec![0usize; order.len()]; order.len()];
        for i in 0..self.len() {
            let train: Vec<usize> = (0..self.len()).filter(|&j| j != i).collect();
            let got = self.predict(i, k, &train);
            m[index[self.classes[i].as_str()]][index[got.as_str()]] += 1;
        }
        (order, m)
    }
}

pub fn confusion_csv(classes: &[String], m: &[Vec<usize>]) -> String {
    let mut out = String::from("true\\predicted");
    for c in classes {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, row) in m.iter().enumerate() {
        out.push_str(&classes[i]);
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}
