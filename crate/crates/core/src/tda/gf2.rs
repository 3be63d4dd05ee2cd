/// Dense binary matrix with rows packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Gf2Matrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let word = &mut self.data[r * self.words + c / 64];
        let bit = 1u64 << (c % 64);
        if value {
            *word |= bit;
        } else {
            *word &= !bit;
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Rank over GF(2) by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let words = self.words;
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pivot) = (rank..self.rows).find(|&r| m[r * words + w] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                for k in 0..words {
                    m.swap(pivot * words + k, rank * words + k);
                }
            }
            for r in (rank + 1)..self.rows {
                if m[r * words + w] & bit != 0 {
                    // columns before w are already cleared in both rows
                    for k in w..words {
                        m[r * words + k] ^= m[rank * words + k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Product over GF(2); `None` on a shape mismatch.
    pub fn mul(&self, other: &Gf2Matrix) -> Option<Gf2Matrix> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for j in 0..self.cols {
                if self.get(r, j) {
                    let src = other.row(j);
                    let dst = &mut out.data[r * out.words..(r + 1) * out.words];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(Gf2Matrix::zeros(4, 7).rank(), 0);
        assert_eq!(Gf2Matrix::identity(5).rank(), 5);
        assert_eq!(Gf2Matrix::zeros(0, 3).rank(), 0);
        // all-ones 3x3 has rank 1
        let mut ones = Gf2Matrix::zeros(3, 3);
        for r in 0..3 {
            for c in 0..3 {
                ones.set(r, c, true);
            }
        }
        assert_eq!(ones.rank(), 1);
    }

    #[test]
    fn wide_rows_cross_word_boundaries() {
        let mut m = Gf2Matrix::zeros(3, 130);
        m.set(0, 0, true);
        m.set(0, 129, true);
        m.set(1, 129, true);
        m.set(2, 0, true);
        assert_eq!(m.rank(), 2);
        assert!(m.get(0, 129) && !m.get(0, 128));
    }

    #[test]
    fn product() {
        let mut a = Gf2Matrix::zeros(2, 2);
        a.set(0, 0, true);
        a.set(0, 1, true);
        a.set(1, 1, true);
        let sq = a.mul(&a).unwrap();
        // [[1,1],[0,1]]^2 = [[1,0],[0,1]] mod 2
        assert_eq!(sq, Gf2Matrix::identity(2));
        assert!(a.mul(&Gf2Matrix::zeros(3, 1)).is_none());
    }
}
