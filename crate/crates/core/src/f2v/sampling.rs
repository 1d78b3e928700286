use rand::Rng;

use super::{F2vConfig, F2vError};
use crate::corpus::{DataSplit, PropertyNorms};
use crate::rng::{shuffle, uniform_below};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub concept: usize,
    pub feature: usize,
    pub label: Label,
}

/// Training pairs for one epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochSamples {
    /// Each gold training pair repeated `pf` times.
    pub positives: Vec<(usize, usize)>,
    /// `negative_rate` corrupted pairs per positive, concept held fixed.
    pub negatives: Vec<(usize, usize)>,
}

impl EpochSamples {
    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Positives then negatives, shuffled together.
    pub fn shuffled<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Sample> {
        let mut all: Vec<Sample> = self
            .positives
            .iter()
            .map(|&(concept, feature)| Sample {
                concept,
                feature,
                label: Label::Positive,
            })
            .chain(self.negatives.iter().map(|&(concept, feature)| Sample {
                concept,
                feature,
                label: Label::Negative,
            }))
            .collect();
        shuffle(rng, &mut all);
        all
    }
}

/// Materializes positives for the training concepts and draws fresh
/// negatives: for each positive, `negative_rate` features sampled uniformly,
/// rejecting gold pairs of the same concept.
pub fn build_epoch_samples<R: Rng + ?Sized>(
    norms: &PropertyNorms,
    split: &DataSplit,
    config: &F2vConfig,
    rng: &mut R,
) -> Result<EpochSamples, F2vError> {
    if split.train().is_empty() {
        return Err(F2vError::EmptyTraining);
    }
    let n_features = norms.n_features();
    for &c in split.train() {
        if c >= norms.n_concepts() {
            return Err(F2vError::Index(format!("concept {c}")));
        }
        if norms.features_of(c).len() >= n_features {
            return Err(F2vError::Unsatisfiable(
                norms.concepts().token(c).to_string(),
            ));
        }
    }

    let mut positives = Vec::new();
    for &c in split.train() {
        for &(f, pf) in norms.features_of(c) {
            positives.extend(std::iter::repeat_n((c, f), pf as usize));
        }
    }

    let k = config.negative_rate;
    let mut negatives = Vec::with_capacity(positives.len() * k);
    for &(c, _) in &positives {
        for _ in 0..k {
            let f = loop {
                let f = uniform_below(rng, n_features);
                if !norms.is_pair(c, f) {
                    break f;
                }
            };
            negatives.push((c, f));
        }
    }
    Ok(EpochSamples {
        positives,
        negatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_norms;
    use crate::rng::seeded_rng;

    fn config(k: usize) -> F2vConfig {
        let mut c = F2vConfig::new(2);
        c.negative_rate = k;
        c
    }

    #[test]
    fn counts_follow_pf() {
        let norms = read_norms("concept\tfeature\tpf\nc\tf\t5\nd\tg\t5\n".as_bytes()).unwrap();
        let split = DataSplit::new([0].into(), [1].into(), 0, 2).unwrap();
        let s = build_epoch_samples(&norms, &split, &config(20), &mut seeded_rng(1)).unwrap();
        assert_eq!(s.positives, vec![(0, 0); 5]);
        assert_eq!(s.negatives.len(), 100);
        assert!(s.negatives.iter().all(|&(c, f)| c == 0 && f == 1));
    }

    #[test]
    fn rejection_avoids_gold() {
        let norms =
            read_norms("concept\tfeature\tpf\nc\tf1\t5\nd\tf2\t5\nd\tf3\t5\n".as_bytes()).unwrap();
        let split = DataSplit::all_train(2, 0);
        let s = build_epoch_samples(&norms, &split, &config(7), &mut seeded_rng(3)).unwrap();
        let mut seen = [false; 3];
        for &(c, f) in &s.negatives {
            assert!(!norms.is_pair(c, f));
            if c == 0 {
                seen[f] = true;
            }
        }
        assert_eq!(seen, [false, true, true]);
        assert_eq!(s.negatives.len(), 7 * s.positives.len());
    }

    #[test]
    fn saturated_concept_is_error() {
        let norms =
            read_norms("concept\tfeature\tpf\nc\tf1\t5\nc\tf2\t5\nd\tf1\t5\n".as_bytes()).unwrap();
        let split = DataSplit::all_train(2, 0);
        assert!(matches!(
            build_epoch_samples(&norms, &split, &config(1), &mut seeded_rng(0)),
            Err(F2vError::Unsatisfiable(c)) if c == "c"
        ));
    }

    #[test]
    fn shuffled_keeps_every_sample() {
        let norms = read_norms("concept\tfeature\tpf\nc\tf\t3\nd\tg\t2\n".as_bytes()).unwrap();
        let split = DataSplit::all_train(2, 0);
        let s = build_epoch_samples(&norms, &split, &config(2), &mut seeded_rng(0)).unwrap();
        let all = s.shuffled(&mut seeded_rng(9));
        assert_eq!(all.len(), 15);
        assert_eq!(all.iter().filter(|x| x.label == Label::Positive).count(), 5);
    }
}
