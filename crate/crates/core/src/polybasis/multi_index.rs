/// Exponent tuple of a monomial in one, two or three variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: [usize; 3],
    vars: usize,
}

impl MultiIndex {
    pub fn new(exps: &[usize]) -> Self {
        assert!((1..=3).contains(&exps.len()), "1 to 3 variables supported");
        let mut e = [0; 3];
        e[..exps.len()].copy_from_slice(exps);
        MultiIndex {
            exps: e,
            vars: exps.len(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exps[..self.vars]
    }

    pub fn degree(&self) -> usize {
        self.exponents().iter().sum()
    }

    /// Position of this index in the graded-lexicographic enumeration.
    pub fn position(&self) -> usize {
        index_of(self.exponents())
    }
}

/// Number of monomials of total degree at most `degree` in `vars` variables.
pub fn monomial_count(vars: usize, degree: usize) -> usize {
    match vars {
        0 => 1,
        1 => degree + 1,
        2 => (degree + 1) * (degree + 2) / 2,
        3 => (degree + 1) * (degree + 2) * (degree + 3) / 6,
        _ => panic!("unsupported number of variables {vars}"),
    }
}

/// Graded-lexicographic enumeration: by total degree, then by decreasing
/// first exponent, then by decreasing second exponent.
///
/// In two variables and degree 2 this is `1, x, y, x², xy, y²`.
pub fn enumerate_multi_indices(vars: usize, degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(monomial_count(vars, degree));
    for n in 0..=degree {
        match vars {
            1 => out.push(MultiIndex::new(&[n])),
            2 => {
                for b in 0..=n {
                    out.push(MultiIndex::new(&[n - b, b]));
                }
            }
            3 => {
                for r in 0..=n {
                    for c in 0..=r {
                        out.push(MultiIndex::new(&[n - r, r - c, c]));
                    }
                }
            }
            _ => panic!("unsupported number of variables {vars}"),
        }
    }
    out
}

/// Closed-form inverse of [`enumerate_multi_indices`].
pub fn index_of(exps: &[usize]) -> usize {
    match exps.len() {
        1 => exps[0],
        2 => {
            let n = exps[0] + exps[1];
            n * (n + 1) / 2 + exps[1]
        }
        3 => {
            let n = exps[0] + exps[1] + exps[2];
            let r = exps[1] + exps[2];
            n * (n + 1) * (n + 2) / 6 + r * (r + 1) / 2 + exps[2]
        }
        v => panic!("unsupported number of variables {v}"),
    }
}
