use std::collections::HashMap;
use std::rc::Rc;

use super::kernel::KernelSpec;
use crate::data_io::SparseRow;

/// LRU cache of full kernel rows `k(x_i, x_·)` under a byte budget.
pub(crate) struct KernelCache<'a> {
    rows: &'a [SparseRow],
    kernel: KernelSpec,
    capacity: usize,
    clock: u64,
    entries: HashMap<usize, (Rc<[f64]>, u64)>,
    pub(crate) misses: u64,
}

impl<'a> KernelCache<'a> {
    pub(crate) fn new(rows: &'a [SparseRow], kernel: KernelSpec, budget_bytes: usize) -> Self {
        let row_bytes = rows.len().max(1) * std::mem::size_of::<f64>();
        KernelCache {
            rows,
            kernel,
            capacity: (budget_bytes / row_bytes).max(2),
            clock: 0,
            entries: HashMap::new(),
            misses: 0,
        }
    }

    pub(crate) fn diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|x| self.kernel.eval_unchecked(x, x))
            .collect()
    }

    pub(crate) fn row(&mut self, i: usize) -> Rc<[f64]> {
        self.clock += 1;
        if let Some((row, stamp)) = self.entries.get_mut(&i) {
            *stamp = self.clock;
            return Rc::clone(row);
        }
        self.misses += 1;
        if self.entries.len() >= self.capacity {
            let oldest = self
                .entries
                .iter()
                .min_by_key(|(_, (_, stamp))| *stamp)
                .map(|(&k, _)| k);
            if let Some(k) = oldest {
                self.entries.remove(&k);
            }
        }
        let xi = &self.rows[i];
        let row: Rc<[f64]> = self
            .rows
            .iter()
            .map(|xj| self.kernel.eval_unchecked(xi, xj))
            .collect();
        self.entries.insert(i, (Rc::clone(&row), self.clock));
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_least_recently_used() {
        let rows: Vec<SparseRow> = (0..4)
            .map(|i| SparseRow::from_dense(&[i as f64]))
            .collect();
        // room for exactly two rows of four entries
        let mut cache = KernelCache::new(&rows, KernelSpec::Linear, 2 * 4 * 8);
        cache.row(0);
        cache.row(1);
        cache.row(0);
        cache.row(2); // evicts 1
        assert_eq!(cache.misses, 3);
        cache.row(0);
        assert_eq!(cache.misses, 3);
        cache.row(1);
        assert_eq!(cache.misses, 4);
        assert_eq!(&*cache.row(3), &[0.0, 3.0, 6.0, 9.0]);
    }
}
