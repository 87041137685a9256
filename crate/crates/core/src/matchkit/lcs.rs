//! Longest common subsequence under an arbitrary closeness relation.
//!
//! Fits use the bit-parallel row update `V ← (V + (V & M)) | (V & !M)`, which
//! only needs the row's match mask, so it works for any boolean relation, not
//! just symbol equality. Alignments are recovered with Hirschberg's
//! divide-and-conquer in linear memory.

/// Bit vector of `m` columns with the LCS row state.
struct Row {
    v: Vec<u64>,
    m: usize,
}

impl Row {
    fn new(m: usize) -> Self {
        let words = m.div_ceil(64).max(1);
        let mut v = vec![u64::MAX; words];
        let tail = m % 64;
        if tail != 0 {
            v[words - 1] = (1u64 << tail) - 1;
        }
        if m == 0 {
            v[0] = 0;
        }
        Self { v, m }
    }

    #[inline]
    fn update(&mut self, mask: &[u64]) {
        let mut carry = 0u64;
        for (v, &mm) in self.v.iter_mut().zip(mask) {
            let x = *v;
            let u = x & mm;
            let (s1, c1) = x.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = u64::from(c1 | c2);
            *v = s2 | (x & !mm);
        }
        let tail = self.m % 64;
        if tail != 0 {
            let last = self.v.len() - 1;
            self.v[last] &= (1u64 << tail) - 1;
        }
    }

    fn fit(&self) -> usize {
        self.m - self.v.iter().map(|w| w.count_ones() as usize).sum::<usize>()
    }
}

/// LCS length between class sequences, where positions are close iff their class ids agree.
///
/// `a` is consumed row by row; `b` is indexed as columns.
pub fn lcs_len_classes<I: IntoIterator<Item = u32>>(a: I, b: &[u32]) -> usize {
    let m = b.len();
    if m == 0 {
        return 0;
    }
    let classes = b.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut positions: Vec<Vec<u32>> = vec![Vec::new(); classes];
    for (j, &c) in b.iter().enumerate() {
        positions[c as usize].push(j as u32);
    }
    let mut row = Row::new(m);
    let words = row.v.len();
    // Dense classes get a cached mask; sparse ones are scattered into a scratch row.
    let dense = words.max(64);
    let mut cached: Vec<Option<Vec<u64>>> = positions
        .iter()
        .map(|ps| (ps.len() > dense).then(|| mask_from(ps, words)))
        .collect();
    let mut scratch = vec![0u64; words];
    for c in a {
        let c = c as usize;
        if c >= classes || positions[c].is_empty() {
            continue;
        }
        if let Some(mask) = cached[c].as_ref() {
            row.update(mask);
        } else {
            for &j in &positions[c] {
                scratch[j as usize / 64] |= 1u64 << (j % 64);
            }
            row.update(&scratch);
            for &j in &positions[c] {
                scratch[j as usize / 64] = 0;
            }
        }
    }
    cached.clear();
    row.fit()
}

fn mask_from(ps: &[u32], words: usize) -> Vec<u64> {
    let mut mask = vec![0u64; words];
    for &j in ps {
        mask[j as usize / 64] |= 1u64 << (j % 64);
    }
    mask
}

/// LCS length for an `n × m` closeness oracle, evaluated row by row.
pub fn lcs_len_by<F: FnMut(usize, usize) -> bool>(n: usize, m: usize, mut close: F) -> usize {
    if m == 0 || n == 0 {
        return 0;
    }
    let mut row = Row::new(m);
    let mut mask = vec![0u64; row.v.len()];
    for i in 0..n {
        mask.iter_mut().for_each(|w| *w = 0);
        for j in 0..m {
            if close(i, j) {
                mask[j / 64] |= 1u64 << (j % 64);
            }
        }
        row.update(&mask);
    }
    row.fit()
}

/// Quadratic-memory reference DP; used for small problems and as a test oracle.
pub fn lcs_table<F: FnMut(usize, usize) -> bool>(n: usize, m: usize, mut close: F) -> Vec<Vec<u32>> {
    let mut t = vec![vec![0u32; m + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=m {
            let diag = if close(i - 1, j - 1) { t[i - 1][j - 1] + 1 } else { 0 };
            t[i][j] = t[i - 1][j].max(t[i][j - 1]).max(diag);
        }
    }
    t
}

const FULL_TABLE_CELLS: usize = 1 << 22;

/// A maximum alignment as increasing index pairs `(i, j)` with `close(i, j)`.
pub fn lcs_pairs_by<F: FnMut(usize, usize) -> bool>(n: usize, m: usize, mut close: F) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    hirschberg(0, n, 0, m, &mut close, &mut out, FULL_TABLE_CELLS);
    out
}

fn hirschberg<F: FnMut(usize, usize) -> bool>(
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
    close: &mut F,
    out: &mut Vec<(usize, usize)>,
    limit: usize,
) {
    let (rows, cols) = (r1 - r0, c1 - c0);
    if rows == 0 || cols == 0 {
        return;
    }
    if (rows + 1) * (cols + 1) <= limit || rows == 1 {
        let t = lcs_table(rows, cols, |i, j| close(r0 + i, c0 + j));
        let (mut i, mut j) = (rows, cols);
        let mut rev = Vec::new();
        while i > 0 && j > 0 {
            if t[i][j] == t[i - 1][j] {
                i -= 1;
            } else if t[i][j] == t[i][j - 1] {
                j -= 1;
            } else {
                rev.push((r0 + i - 1, c0 + j - 1));
                i -= 1;
                j -= 1;
            }
        }
        out.extend(rev.into_iter().rev());
        return;
    }
    let mid = r0 + rows / 2;
    let fwd = forward_scores(r0, mid, c0, c1, close);
    let bwd = backward_scores(mid, r1, c0, c1, close);
    let mut best = 0;
    let mut split = 0;
    for k in 0..=cols {
        let s = fwd[k] + bwd[k];
        if s > best || k == 0 {
            best = s;
            split = k;
        }
    }
    hirschberg(r0, mid, c0, c0 + split, close, out, limit);
    hirschberg(mid, r1, c0 + split, c1, close, out, limit);
}

/// `f[k]` = LCS of rows `r0..r1` against columns `c0..c0+k`.
fn forward_scores<F: FnMut(usize, usize) -> bool>(r0: usize, r1: usize, c0: usize, c1: usize, close: &mut F) -> Vec<u32> {
    let cols = c1 - c0;
    let mut prev = vec![0u32; cols + 1];
    let mut cur = vec![0u32; cols + 1];
    for i in r0..r1 {
        for k in 1..=cols {
            let diag = if close(i, c0 + k - 1) { prev[k - 1] + 1 } else { 0 };
            cur[k] = prev[k].max(cur[k - 1]).max(diag);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}

/// `b[k]` = LCS of rows `r0..r1` against columns `c0+k..c1`.
fn backward_scores<F: FnMut(usize, usize) -> bool>(r0: usize, r1: usize, c0: usize, c1: usize, close: &mut F) -> Vec<u32> {
    let cols = c1 - c0;
    let mut prev = vec![0u32; cols + 1];
    let mut cur = vec![0u32; cols + 1];
    for i in (r0..r1).rev() {
        cur[cols] = 0;
        for k in (0..cols).rev() {
            let diag = if close(i, c0 + k) { prev[k + 1] + 1 } else { 0 };
            cur[k] = prev[k].max(cur[k + 1]).max(diag);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}
