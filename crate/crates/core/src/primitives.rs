//! The four data-parallel building blocks every pipeline step is written in:
//! sequence fill, stable key-value sort, inclusive scan and masked scatter.
//!
//! All of them are pure and return bit-identical results for any worker
//! count.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::exec;
use crate::radix;

/// `[0, 1, ..., n-1]`.
///
/// Panics if `n` exceeds the 32-bit index range.
pub fn fill_sequence(n: usize) -> Vec<u32> {
    assert!(n as u64 <= 1 << 32, "sequence of {n} does not fit 32-bit indices");
    exec::map_range(n, |i| i as u32)
}

/// Sorts `keys` ascending and applies the same permutation to `values`.
///
/// The sort is stable: equal keys keep their input order.
pub fn key_value_sort<K>(keys: &[K], values: &[u32]) -> Result<(Vec<K>, Vec<u32>)>
where
    K: Ord + Clone + Send + Sync,
{
    if keys.len() != values.len() {
        return Err(Error::LengthMismatch {
            what: "keys vs values",
            left: keys.len(),
            right: values.len(),
        });
    }
    let mut pairs = exec::map_range(keys.len(), |i| (keys[i].clone(), values[i]));
    exec::sort_by_key_stable(&mut pairs, |p| &p.0);
    Ok(exec::unzip(pairs))
}

/// [`key_value_sort`] for keys made of `N` 32-bit words, compared
/// lexicographically. Uses a stable LSD radix sort; the output is identical
/// to the comparison-based route.
pub fn key_value_sort_words<const N: usize>(
    keys: &[[u32; N]],
    values: &[u32],
) -> Result<(Vec<[u32; N]>, Vec<u32>)> {
    if keys.len() != values.len() {
        return Err(Error::LengthMismatch {
            what: "keys vs values",
            left: keys.len(),
            right: values.len(),
        });
    }
    Ok(radix::sort_pairs(keys, values))
}

fn scan_block_len(n: usize) -> usize {
    const MIN_BLOCK: usize = 1 << 14;
    let workers = exec::current_workers().max(1);
    n.div_ceil(workers * 4).max(MIN_BLOCK)
}

/// Running sums: `out[i] = flags[0] + ... + flags[i]`.
///
/// Two passes over fixed blocks (block totals, then local sums offset by the
/// preceding totals). Accumulates in 64 bits and fails if the total does not
/// fit a `u32`.
pub fn inclusive_scan<T>(flags: &[T]) -> Result<Vec<u32>>
where
    T: Copy + Into<u64> + Sync,
{
    let n = flags.len();
    let block = scan_block_len(n);
    let blocks = n.div_ceil(block);

    let totals = exec::map_range(blocks, |b| {
        flags[b * block..((b + 1) * block).min(n)]
            .iter()
            .map(|&f| f.into())
            .sum::<u64>()
    });
    let mut offsets = Vec::with_capacity(blocks);
    let mut total = 0u64;
    for t in totals {
        offsets.push(total);
        total += t;
    }
    if total > u32::MAX as u64 {
        return Err(Error::ScanOverflow { total });
    }

    let mut out = vec![0u32; n];
    exec::for_each_chunk_mut(&mut out, block, |b, chunk| {
        let mut acc = offsets[b];
        for (o, &f) in chunk.iter_mut().zip(&flags[b * block..]) {
            acc += f.into();
            *o = acc as u32;
        }
    });
    Ok(out)
}

/// Writes `values[i]` to `out[positions[i]]` for every `i` the mask admits
/// (`None` admits all).
///
/// Every output slot must receive at least one write. When several inputs
/// target one slot the highest input index wins, so the result does not
/// depend on scheduling.
pub fn scatter<T>(
    values: &[T],
    positions: &[u32],
    mask: Option<&[bool]>,
    out_len: usize,
) -> Result<Vec<T>>
where
    T: Clone + Send + Sync,
{
    let n = values.len();
    if positions.len() != n {
        return Err(Error::LengthMismatch {
            what: "scatter values vs positions",
            left: n,
            right: positions.len(),
        });
    }
    if let Some(mask) = mask {
        if mask.len() != n {
            return Err(Error::LengthMismatch {
                what: "scatter values vs mask",
                left: n,
                right: mask.len(),
            });
        }
    }
    let admitted = |i: usize| mask.is_none_or(|m| m[i]);

    // 0 marks an unwritten slot, otherwise the winning input index + 1.
    let winners: Vec<AtomicUsize> = exec::map_range(out_len, |_| AtomicUsize::new(0));
    let bad = exec::filter_map_range(n, |i| {
        if !admitted(i) {
            return None;
        }
        let p = positions[i] as usize;
        if p >= out_len {
            return Some(i);
        }
        winners[p].fetch_max(i + 1, Ordering::Relaxed);
        None
    });
    if let Some(&i) = bad.first() {
        return Err(Error::ScatterOutOfRange { input: i, position: positions[i], out_len });
    }

    exec::try_map_range(out_len, |slot| match winners[slot].load(Ordering::Relaxed) {
        0 => Err(Error::ScatterUncovered { slot }),
        w => Ok(values[w - 1].clone()),
    })
}
