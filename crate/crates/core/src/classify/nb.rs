use alloc::vec;
use alloc::vec::Vec;

use super::{check_labels, ClassifyError, FeatureMatrix};
use crate::ingest::WordPair;

pub const DEFAULT_COUNT_CAP: u32 = 100;
pub const DEFAULT_ALPHA: f64 = 1.0;

const NON_EVENT: usize = 0;
const EVENT: usize = 1;

/// Naive Bayes over clipped integer counts with Laplace-smoothed categorical
/// conditionals. Class index 0 is non-event, 1 is event.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NbModel {
    pub features: Vec<WordPair>,
    pub count_cap: u32,
    pub alpha: f64,
    /// `[P(non-event), P(event)]`.
    pub class_prior: [f64; 2],
    /// `cond[f][c][v] = P(clip(x_f) = v | c)`, `v ∈ 0..=count_cap`.
    pub cond: Vec<[Vec<f64>; 2]>,
}

impl NbModel {
    pub fn train(x: &FeatureMatrix, y: &[bool], count_cap: u32, alpha: f64) -> Result<Self, ClassifyError> {
        check_labels(x, y)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ClassifyError::InvalidHyper("alpha must be positive"));
        }
        let bins = count_cap as usize + 1;
        let nf = x.num_features();
        let mut hist = vec![[vec![0u32; bins], vec![0u32; bins]]; nf];
        let mut class_days = [0u32; 2];
        for (row, &label) in x.rows().zip(y) {
            let c = usize::from(label);
            class_days[c] += 1;
            for (f, &v) in row.iter().enumerate() {
                hist[f][c][v.min(count_cap) as usize] += 1;
            }
        }
        let total = f64::from(class_days[0] + class_days[1]);
        let class_prior = [f64::from(class_days[0]) / total, f64::from(class_days[1]) / total];
        let cond = hist
            .into_iter()
            .map(|per_class| {
                let mut c = 0;
                per_class.map(|h| {
                    let denom = f64::from(class_days[c]) + alpha * bins as f64;
                    c += 1;
                    h.into_iter().map(|n| (f64::from(n) + alpha) / denom).collect()
                })
            })
            .collect();
        Ok(NbModel { features: x.features.clone(), count_cap, alpha, class_prior, cond })
    }

    fn check_dim(&self, x: &[u32]) -> Result<(), ClassifyError> {
        if x.len() != self.cond.len() {
            return Err(ClassifyError::DimensionMismatch { expected: self.cond.len(), got: x.len() });
        }
        Ok(())
    }

    /// Unnormalized log joint `[log P(N) + Σ log P(x|N), log P(E) + Σ log P(x|E)]`.
    pub fn log_joint(&self, x: &[u32]) -> Result<[f64; 2], ClassifyError> {
        self.check_dim(x)?;
        let mut lj = [libm::log(self.class_prior[NON_EVENT]), libm::log(self.class_prior[EVENT])];
        for (f, &v) in x.iter().enumerate() {
            let v = v.min(self.count_cap) as usize;
            for (c, acc) in lj.iter_mut().enumerate() {
                *acc += libm::log(self.cond[f][c][v]);
            }
        }
        Ok(lj)
    }

    /// Posterior probability of the event class (two-class log-domain softmax).
    pub fn predict(&self, x: &[u32]) -> Result<f64, ClassifyError> {
        Ok(self.posterior(x)?[EVENT])
    }

    /// `[P(non-event | x), P(event | x)]`.
    pub fn posterior(&self, x: &[u32]) -> Result<[f64; 2], ClassifyError> {
        let [ln, le] = self.log_joint(x)?;
        let m = ln.max(le);
        let (en, ee) = (libm::exp(ln - m), libm::exp(le - m));
        let z = en + ee;
        Ok([en / z, ee / z])
    }

    /// Posterior of the event class by direct products with an explicit
    /// normalizer. Underflows for many features; reference use only.
    pub fn predict_direct(&self, x: &[u32]) -> Result<f64, ClassifyError> {
        self.check_dim(x)?;
        let mut joint = self.class_prior;
        for (f, &v) in x.iter().enumerate() {
            let v = v.min(self.count_cap) as usize;
            joint[NON_EVENT] *= self.cond[f][NON_EVENT][v];
            joint[EVENT] *= self.cond[f][EVENT][v];
        }
        let z = joint[NON_EVENT] + joint[EVENT];
        Ok(joint[EVENT] / z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::FeatureMatrix;
    use alloc::format;
    use proptest::prelude::*;

    fn fm(nf: usize, rows: &[&[u32]]) -> FeatureMatrix {
        let feats = (0..nf).map(|i| WordPair::new(format!("a{i}"), format!("b{i}")).unwrap()).collect();
        let days = (0..rows.len() as u32).collect();
        FeatureMatrix::from_rows(feats, days, rows.concat()).unwrap()
    }

    #[test]
    fn prior_is_class_frequency() {
        let rows: Vec<&[u32]> = (0..10).map(|_| &[0u32][..]).collect();
        let y: Vec<bool> = (0..10).map(|i| i < 3).collect();
        let m = NbModel::train(&fm(1, &rows), &y, 5, 1.0).unwrap();
        assert!((m.class_prior[EVENT] - 0.3).abs() < 1e-15);
        assert!((m.class_prior.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smoothed_histogram_by_hand() {
        // event days carry values 1, 1, 0; one non-event day with 0
        let x = fm(1, &[&[1], &[1], &[0], &[0]]);
        let m = NbModel::train(&x, &[true, true, true, false], 1, 1.0).unwrap();
        assert!((m.cond[0][EVENT][1] - 0.6).abs() < 1e-15);
        assert!((m.cond[0][EVENT][0] - 0.4).abs() < 1e-15);
        // non-event: (0+1)/(1+2) for v=1
        assert!((m.cond[0][NON_EVENT][1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn counts_are_clipped() {
        let x = fm(1, &[&[250], &[0]]);
        let m = NbModel::train(&x, &[true, false], 100, 1.0).unwrap();
        assert!(m.cond[0][EVENT][100] > m.cond[0][EVENT][50]);
        assert_eq!(m.predict(&[100]).unwrap(), m.predict(&[9000]).unwrap());
    }

    #[test]
    fn two_day_toy_model() {
        // cap 5, alpha 1: 6 bins, one day per class
        let x = fm(1, &[&[5], &[0]]);
        let m = NbModel::train(&x, &[true, false], 5, 1.0).unwrap();
        // P(E)=P(N)=1/2, P(5|E)=2/7, P(5|N)=1/7
        let e = 0.5 * 2.0 / 7.0;
        let n = 0.5 * 1.0 / 7.0;
        let expect = e / (e + n);
        assert!((m.predict(&[5]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.predict(&[5]).unwrap() - expect).abs() < 1e-15);
        assert!((m.predict(&[3]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uninformative_feature_cancels() {
        let x = fm(2, &[&[4, 0], &[0, 0], &[5, 0], &[1, 0]]);
        let y = [true, false, true, false];
        let two = NbModel::train(&x, &y, 10, 1.0).unwrap();
        let x1 = fm(1, &[&[4], &[0], &[5], &[1]]);
        let one = NbModel::train(&x1, &y, 10, 1.0).unwrap();
        for v in 0..12 {
            let a = two.predict(&[v, 0]).unwrap();
            let b = one.predict(&[v]).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_model_gives_half() {
        let x = fm(1, &[&[2], &[2]]);
        let m = NbModel::train(&x, &[true, false], 4, 1.0).unwrap();
        for v in 0..6 {
            assert_eq!(m.predict(&[v]).unwrap(), 0.5);
        }
    }

    #[test]
    fn errors() {
        let x = fm(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(NbModel::train(&x, &[true, true], 4, 1.0), Err(ClassifyError::SingleClass("event")));
        assert!(NbModel::train(&x, &[true, false], 4, 0.0).is_err());
        let m = NbModel::train(&x, &[true, false], 4, 1.0).unwrap();
        assert_eq!(m.predict(&[1]), Err(ClassifyError::DimensionMismatch { expected: 2, got: 1 }));
    }

    fn dataset() -> impl Strategy<Value = (usize, u32, Vec<Vec<u32>>, Vec<bool>)> {
        (1usize..=5, 1u32..12, 2usize..30).prop_flat_map(|(nf, cap, n)| {
            (
                Just(nf),
                Just(cap),
                proptest::collection::vec(proptest::collection::vec(0u32..15, nf), n),
                proptest::collection::vec(any::<bool>(), n).prop_filter("two classes", |y| {
                    y.iter().any(|&b| b) && y.iter().any(|&b| !b)
                }),
            )
        })
    }

    proptest! {
        #[test]
        fn histograms_normalized_and_positive((nf, cap, rows, y) in dataset()) {
            let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
            let m = NbModel::train(&fm(nf, &refs), &y, cap, 1.0).unwrap();
            prop_assert!((m.class_prior[0] + m.class_prior[1] - 1.0).abs() < 1e-12);
            for per_class in &m.cond {
                for h in per_class {
                    prop_assert_eq!(h.len(), cap as usize + 1);
                    prop_assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    prop_assert!(h.iter().all(|&p| p > 0.0));
                }
            }
        }

        #[test]
        fn log_domain_matches_direct((nf, cap, rows, y) in dataset(), probe in proptest::collection::vec(0u32..15, 5)) {
            let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
            let m = NbModel::train(&fm(nf, &refs), &y, cap, 1.0).unwrap();
            let x: Vec<u32> = probe[..nf].iter().map(|v| v.min(&cap)).copied().collect();
            let a = m.predict(&x).unwrap();
            let b = m.predict_direct(&x).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-300));
            let p = m.posterior(&x).unwrap();
            prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
            prop_assert!(a > 0.0 && a < 1.0);
        }

        #[test]
        fn feature_permutation_invariant((nf, cap, rows, y) in dataset(), rot in 0usize..5) {
            let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
            let m = NbModel::train(&fm(nf, &refs), &y, cap, 1.0).unwrap();
            let rotated: Vec<Vec<u32>> = rows.iter().map(|r| { let mut r = r.clone(); r.rotate_left(rot % nf); r }).collect();
            let rrefs: Vec<&[u32]> = rotated.iter().map(Vec::as_slice).collect();
            let mr = NbModel::train(&fm(nf, &rrefs), &y, cap, 1.0).unwrap();
            for (r, rr) in rows.iter().zip(&rotated) {
                let a = m.predict(r).unwrap();
                let b = mr.predict(rr).unwrap();
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
