//! Streaming moments and deterministic chunked Monte-Carlo.

use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::rng::{derive_seed, stream_rng};

/// Samples per Monte-Carlo chunk. Chunks are the unit of both seeding and
/// parallelism, so results do not depend on the thread count.
pub const CHUNK: usize = 4096;

/// Running mean and sum of squared deviations per component (Welford).
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], m2: vec![0.0; dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.mean.len());
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased sample variance per component (0 with fewer than two samples).
    pub fn variance(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![0.0; self.mean.len()];
        }
        let d = (self.count - 1) as f64;
        self.m2.iter().map(|s| s / d).collect()
    }

    /// Standard error of the mean per component.
    pub fn std_error(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.variance().into_iter().map(|v| (v / n).sqrt()).collect()
    }
}

/// Moments of `samples` draws of a `dim`-vector produced by `draw`.
///
/// Chunk `c` gets its own generator seeded with `derive_seed(seed, c)`; chunk
/// results are merged in chunk order.
pub fn chunked_moments<F>(dim: usize, samples: usize, seed: u64, draw: F) -> Moments
where
    F: Fn(&mut ChaCha12Rng, &mut [f64]) + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(derive_seed(seed, c as u64), 0);
            let mut buf = vec![0.0; dim];
            let mut acc = Moments::new(dim);
            let len = CHUNK.min(samples - c * CHUNK);
            for _ in 0..len {
                draw(&mut rng, &mut buf);
                acc.push(&buf);
            }
            acc
        })
        .collect();
    let mut total = Moments::new(dim);
    for p in &parts {
        total.merge(p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, -2.0, 8.5, 0.25];
        let mut m = Moments::new(1);
        for x in xs {
            m.push(&[x]);
        }
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((m.mean()[0] - mean).abs() < 1e-14);
        assert!((m.variance()[0] - var).abs() < 1e-13);
    }

    #[test]
    fn merge_equals_sequential() {
        let mut all = Moments::new(2);
        let mut a = Moments::new(2);
        let mut b = Moments::new(2);
        for i in 0..37 {
            let x = [i as f64 * 0.3, (i * i) as f64 - 4.0];
            all.push(&x);
            if i < 11 { a.push(&x) } else { b.push(&x) }
        }
        a.merge(&b);
        for k in 0..2 {
            assert!((a.mean()[k] - all.mean()[k]).abs() < 1e-12);
            assert!((a.variance()[k] - all.variance()[k]).abs() < 1e-9 * all.variance()[k]);
        }
        assert_eq!(a.count(), 37);
    }

    #[test]
    fn chunked_is_thread_count_independent() {
        let draw = |r: &mut ChaCha12Rng, out: &mut [f64]| out[0] = r.random::<f64>();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| chunked_moments(1, 20_000, 5, draw));
        let b = four.install(|| chunked_moments(1, 20_000, 5, draw));
        assert_eq!(a, b);
        assert_eq!(a.count(), 20_000);
        assert!((a.mean()[0] - 0.5).abs() < 5.0 * a.std_error()[0]);
    }
}
