//! Row-echelon basis over the two-element field, rows packed in `u64`.

#[derive(Debug, Clone)]
pub struct Gf2Basis {
    /// `pivots[b]` holds the basis row whose highest set bit is `b`.
    pivots: [u64; 64],
    rank: usize,
}

impl Default for Gf2Basis {
    fn default() -> Self {
        Gf2Basis {
            pivots: [0; 64],
            rank: 0,
        }
    }
}

impl Gf2Basis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `row` against the basis and adds what remains. Returns whether
    /// the rank grew.
    pub fn insert(&mut self, mut row: u64) -> bool {
        while row != 0 {
            let top = 63 - row.leading_zeros() as usize;
            if self.pivots[top] == 0 {
                self.pivots[top] = row;
                self.rank += 1;
                return true;
            }
            row ^= self.pivots[top];
        }
        false
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// A nonzero vector `v` over the first `width` coordinates with
    /// `row · v = 0` for every basis row, if the basis is not full rank there.
    pub fn kernel_vector(&self, width: usize) -> Option<u64> {
        // back substitution on the reduced row echelon form
        let mut rows: Vec<u64> = self.pivots.iter().copied().filter(|&r| r != 0).collect();
        rows.sort_unstable_by_key(|r| std::cmp::Reverse(*r));
        for i in 0..rows.len() {
            let top = 63 - rows[i].leading_zeros();
            for j in 0..rows.len() {
                if j != i && (rows[j] >> top) & 1 == 1 {
                    rows[j] ^= rows[i];
                }
            }
        }
        let pivot_mask = rows
            .iter()
            .fold(0u64, |m, r| m | (1u64 << (63 - r.leading_zeros())));
        let free = (0..width).find(|&b| (pivot_mask >> b) & 1 == 0)?;
        let mut v = 1u64 << free;
        for r in &rows {
            if (r >> free) & 1 == 1 {
                v |= 1u64 << (63 - r.leading_zeros());
            }
        }
        Some(v)
    }
}

pub fn rank<I: IntoIterator<Item = u64>>(rows: I) -> usize {
    let mut basis = Gf2Basis::new();
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}
