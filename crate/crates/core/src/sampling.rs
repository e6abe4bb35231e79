//! Seeded low-discrepancy sampling of axis-aligned boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Point;
use crate::error::{Error, Result};

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// An axis-aligned box `Π [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    bounds: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Invalid(format!("bad interval [{lo}, {hi}]")));
            }
        }
        Ok(BoxDomain { bounds })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi); dim])
    }

    /// Parses `lo..hi` (same for every axis) or `lo..hi,lo..hi,…`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let interval = |s: &str| -> Result<(f64, f64)> {
            let (lo, hi) = s
                .split_once("..")
                .ok_or_else(|| Error::Invalid(format!("expected lo..hi, found '{s}'")))?;
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Invalid(format!("bad number '{t}'")))
            };
            Ok((num(lo)?, num(hi)?))
        };
        match parts.len() {
            1 => Self::new(vec![interval(parts[0])?; dim]),
            k if k == dim => Self::new(parts.iter().map(|s| interval(s)).collect::<Result<_>>()?),
            k => Err(Error::DimensionMismatch {
                expected: dim,
                got: k,
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.bounds)
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// `count` points of a Halton sequence with a seeded Cranley–Patterson
    /// rotation.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Point> {
        self.sample_raw(count, seed)
            .into_iter()
            .map(|c| Point::new(c).expect("finite box"))
            .collect()
    }

    pub fn sample_raw(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let dim = self.dim();
        assert!(
            dim <= PRIMES.len(),
            "Halton sampling supports up to 16 axes"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        (1..=count)
            .map(|i| {
                (0..dim)
                    .map(|a| {
                        let u = (radical_inverse(i as u64, PRIMES[a]) + shift[a]).fract();
                        let (lo, hi) = self.bounds[a];
                        lo + u * (hi - lo)
                    })
                    .collect()
            })
            .collect()
    }
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}
