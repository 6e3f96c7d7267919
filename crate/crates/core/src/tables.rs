//! Lattice-point walks over two-margin integer tables.
//!
//! Both walks fill entries in row-major order with ascending values, so the
//! visit order is lexicographic on the flattened table.

/// Visits every nonnegative `rows.len() x cols.len()` table with the given
/// row and column sums. Nothing is visited when the totals differ.
pub fn for_each_table<F: FnMut(&[u32])>(rows: &[u32], cols: &[u32], mut f: F) {
    let total_r: u64 = rows.iter().map(|&x| x as u64).sum();
    let total_c: u64 = cols.iter().map(|&x| x as u64).sum();
    if total_r != total_c {
        return;
    }
    let (nr, nc) = (rows.len(), cols.len());
    if nr == 0 || nc == 0 {
        if total_r == 0 {
            f(&[]);
        }
        return;
    }
    let mut cell = vec![0u32; nr * nc];
    let mut row_rem = rows.to_vec();
    let mut col_rem = cols.to_vec();
    exact_fill(
        0,
        nr,
        nc,
        None,
        &mut cell,
        &mut row_rem,
        &mut col_rem,
        &mut f,
    );
}

/// As [`for_each_table`], additionally requiring `table[p] <= caps[p]` for every cell.
pub fn for_each_capped_table<F: FnMut(&[u32])>(rows: &[u32], cols: &[u32], caps: &[u32], mut f: F) {
    let total_r: u64 = rows.iter().map(|&x| x as u64).sum();
    let total_c: u64 = cols.iter().map(|&x| x as u64).sum();
    let (nr, nc) = (rows.len(), cols.len());
    assert_eq!(caps.len(), nr * nc);
    if total_r != total_c {
        return;
    }
    if nr == 0 || nc == 0 {
        if total_r == 0 {
            f(&[]);
        }
        return;
    }
    let mut cell = vec![0u32; nr * nc];
    let mut row_rem = rows.to_vec();
    let mut col_rem = cols.to_vec();
    exact_fill(
        0,
        nr,
        nc,
        Some(caps),
        &mut cell,
        &mut row_rem,
        &mut col_rem,
        &mut f,
    );
}

#[allow(clippy::too_many_arguments)]
fn exact_fill<F: FnMut(&[u32])>(
    pos: usize,
    nr: usize,
    nc: usize,
    caps: Option<&[u32]>,
    cell: &mut [u32],
    row_rem: &mut [u32],
    col_rem: &mut [u32],
    f: &mut F,
) {
    if pos == nr * nc {
        f(cell);
        return;
    }
    let (r, c) = (pos / nc, pos % nc);
    let (lo, hi) = if r + 1 == nr {
        // last row is forced by the column sums
        (col_rem[c], col_rem[c])
    } else if c + 1 == nc {
        (row_rem[r], row_rem[r])
    } else {
        let later: u32 = col_rem[c + 1..].iter().sum();
        (row_rem[r].saturating_sub(later), row_rem[r].min(col_rem[c]))
    };
    let hi = match caps {
        Some(caps) => hi.min(caps[pos]),
        None => hi,
    };
    if lo > hi || hi > row_rem[r] || hi > col_rem[c] {
        return;
    }
    for v in lo..=hi {
        cell[pos] = v;
        row_rem[r] -= v;
        col_rem[c] -= v;
        exact_fill(pos + 1, nr, nc, caps, cell, row_rem, col_rem, f);
        row_rem[r] += v;
        col_rem[c] += v;
    }
    cell[pos] = 0;
}

/// Visits every nonnegative table whose row sums are at most `row_caps`,
/// column sums at most `col_caps`, and grand total at most `total_cap`.
pub fn for_each_bounded_table<F: FnMut(&[u32])>(
    row_caps: &[u32],
    col_caps: &[u32],
    total_cap: u32,
    mut f: F,
) {
    let (nr, nc) = (row_caps.len(), col_caps.len());
    let mut cell = vec![0u32; nr * nc];
    let mut row_rem = row_caps.to_vec();
    let mut col_rem = col_caps.to_vec();
    bounded_fill(
        0,
        nr,
        nc,
        total_cap,
        &mut cell,
        &mut row_rem,
        &mut col_rem,
        &mut f,
    );
}

#[allow(clippy::too_many_arguments)]
fn bounded_fill<F: FnMut(&[u32])>(
    pos: usize,
    nr: usize,
    nc: usize,
    total_rem: u32,
    cell: &mut [u32],
    row_rem: &mut [u32],
    col_rem: &mut [u32],
    f: &mut F,
) {
    if pos == nr * nc {
        f(cell);
        return;
    }
    let (r, c) = (pos / nc, pos % nc);
    let hi = row_rem[r].min(col_rem[c]).min(total_rem);
    for v in 0..=hi {
        cell[pos] = v;
        row_rem[r] -= v;
        col_rem[c] -= v;
        bounded_fill(pos + 1, nr, nc, total_rem - v, cell, row_rem, col_rem, f);
        row_rem[r] += v;
        col_rem[c] += v;
    }
    cell[pos] = 0;
}
