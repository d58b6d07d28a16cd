//! Compressed sparse row matrices assembled from triplets.

/// Triplet accumulator; duplicate entries are summed when compressed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        TripletBuilder {
            n,
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.n && col < self.n);
        if val != 0.0 {
            self.rows.push(row);
            self.cols.push(col);
            self.vals.push(val);
        }
    }

    pub fn build(self) -> CsrMatrix {
        let n = self.n;
        let mut counts = vec![0usize; n + 1];
        for &r in &self.rows {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut col_idx = vec![0usize; self.vals.len()];
        let mut values = vec![0.0; self.vals.len()];
        let mut next = counts.clone();
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            let slot = next[r];
            col_idx[slot] = c;
            values[slot] = v;
            next[r] += 1;
        }
        // Sort each row by column and merge duplicates in place.
        let mut row_ptr = vec![0usize; n + 1];
        let mut write = 0;
        for r in 0..n {
            let (lo, hi) = (counts[r], counts[r + 1]);
            let mut entries: Vec<(usize, f64)> = (lo..hi)
                .map(|k| (col_idx[k], values[k]))
                .collect();
            entries.sort_unstable_by_key(|e| e.0);
            row_ptr[r] = write;
            let mut iter = entries.into_iter();
            if let Some((mut cur_c, mut cur_v)) = iter.next() {
                for (c, v) in iter {
                    if c == cur_c {
                        cur_v += v;
                    } else {
                        col_idx[write] = cur_c;
                        values[write] = cur_v;
                        write += 1;
                        cur_c = c;
                        cur_v = v;
                    }
                }
                col_idx[write] = cur_c;
                values[write] = cur_v;
                write += 1;
            }
        }
        row_ptr[n] = write;
        col_idx.truncate(write);
        values.truncate(write);
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// n x n identity scaled by `s`.
    pub fn scaled_identity(n: usize, s: f64) -> Self {
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![s; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    pub fn mul_vec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        for k in self.row_ptr[row]..self.row_ptr[row + 1] {
            if self.col_idx[k] == col {
                return self.values[k];
            }
        }
        0.0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    /// C = a*self + b*other (patterns may differ).
    pub fn linear_combination(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut t = TripletBuilder::new(self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                t.push(r, self.col_idx[k], a * self.values[k]);
            }
            for k in other.row_ptr[r]..other.row_ptr[r + 1] {
                t.push(r, other.col_idx[k], b * other.values[k]);
            }
        }
        t.build()
    }

    /// Largest |A - A^T| entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                worst = worst.max((self.values[k] - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                d[r][self.col_idx[k]] += self.values[k];
            }
        }
        d
    }
}
