use std::fmt;

/// Permutation of `0..n`, stored as the image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// `None` unless `images` is a bijection of `0..n`.
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// The cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn long_cycle(n: usize) -> Self {
        Self((0..n).map(|i| (i + 1) % n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut r = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            r[j] = i;
        }
        Self(r)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] == i).collect()
    }

    /// Disjoint cycles, each starting at its smallest element, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut j = self.0[start];
            while j != start {
                seen[j] = true;
                cyc.push(j);
                j = self.0[j];
            }
            out.push(cyc);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// One-based cycle notation without fixed points, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let items: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", items.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation() {
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert_eq!(Permutation::new(vec![1, 0, 2]).unwrap().to_string(), "(1 2)");
        assert_eq!(Permutation::long_cycle(3).to_string(), "(1 2 3)");
        assert!(Permutation::new(vec![0, 0]).is_none());
    }

    #[test]
    fn compose_inverse() {
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.fixed_points(), Vec::<usize>::new());
    }
}
