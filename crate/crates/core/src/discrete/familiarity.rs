use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Pairwise familiarity degrees between the members of a swarm.
///
/// Starts random and positive; every generation adds `1 / |rank_i - rank_j|`
/// to each off-diagonal entry, so similarly ranked fireflies grow familiar
/// fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FamiliarityMatrix {
    n: usize,
    p: Vec<f64>,
}

impl FamiliarityMatrix {
    /// Entries uniform on `(0, 1]`.
    pub fn random(n: usize, rng: &mut RngStream) -> Self {
        Self {
            n,
            p: (0..n * n).map(|_| 1.0 - rng.uniform()).collect(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: r.len(),
            });
        }
        let p: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(v) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::param(
                "familiarity",
                format!("entries must be finite and >= 0, got {v}"),
            ));
        }
        Ok(Self { n, p })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    /// Adds `1 / |rank_i - rank_j|` to every off-diagonal entry.
    pub fn update(&mut self, ranks: &[usize]) -> Result<()> {
        if ranks.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: ranks.len(),
            });
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let gap = ranks[i].abs_diff(ranks[j]);
                if gap == 0 {
                    return Err(Error::Contract(format!(
                        "members {i} and {j} share rank {}",
                        ranks[i]
                    )));
                }
                self.p[i * self.n + j] += 1.0 / gap as f64;
            }
        }
        Ok(())
    }

    /// `exp(-(max_k P_ik - P_ij)^2 / max_k P_ik)`, the maximum taken over
    /// `k != i`.
    pub fn beta(&self, i: usize, j: usize) -> Result<f64> {
        let max = (0..self.n)
            .filter(|&k| k != i)
            .map(|k| self.get(i, k))
            .fold(f64::NEG_INFINITY, f64::max);
        if !(max > 0.0) {
            return Err(Error::DegenerateFamiliarity { row: i });
        }
        let gap = max - self.get(i, j);
        Ok((-(gap * gap) / max).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_examples() {
        let mut m = FamiliarityMatrix::from_rows(vec![vec![0.0; 3]; 3]).unwrap();
        m.update(&[1, 2, 3]).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 2), 0.5);
        assert_eq!(m.get(1, 1), 0.0);
        assert!(m.update(&[1, 1, 2]).is_err());
    }

    #[test]
    fn beta_examples() {
        let m = FamiliarityMatrix::from_rows(vec![
            vec![9.0, 4.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m.beta(0, 1).unwrap(), 1.0);
        assert!((m.beta(0, 2).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        assert!(matches!(
            m.beta(2, 0),
            Err(Error::DegenerateFamiliarity { row: 2 })
        ));
    }

    #[test]
    fn entries_grow_and_beta_stays_in_unit_interval() {
        let mut rng = RngStream::new(3);
        let n = 8;
        let mut m = FamiliarityMatrix::random(n, &mut rng);
        for _ in 0..20 {
            let before = m.clone();
            let mut ranks: Vec<usize> = (1..=n).collect();
            rand::seq::SliceRandom::shuffle(ranks.as_mut_slice(), &mut rng);
            m.update(&ranks).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(m.get(i, j) > before.get(i, j));
                        let b = m.beta(i, j).unwrap();
                        assert!(b > 0.0 && b <= 1.0);
                    } else {
                        assert_eq!(m.get(i, i), before.get(i, i));
                    }
                }
            }
        }
    }
}
