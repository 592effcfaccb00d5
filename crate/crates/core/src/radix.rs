// Parallel LSD radix sort of (fixed-width key, u32 value) pairs.
//
// Each pass splits the input into one contiguous chunk per worker, counts
// byte digits per chunk, turns the counts into digit-major/chunk-minor
// output offsets and scatters every chunk into its own disjoint output
// ranges. LSD radix sort is stable, so the result does not depend on the
// chunking.

use crate::exec;

#[derive(Clone, Copy)]
struct Item<const N: usize> {
    key: [u32; N],
    value: u32,
}

struct SharedOut<T>(*mut T);

// Writers only touch disjoint index ranges handed out by the offset table.
unsafe impl<T: Send> Send for SharedOut<T> {}
unsafe impl<T: Send> Sync for SharedOut<T> {}

impl<T> SharedOut<T> {
    fn ptr(&self) -> *mut T {
        self.0
    }
}

#[inline]
fn digit<const N: usize>(item: &Item<N>, pass: usize) -> usize {
    let word = N - 1 - pass / 4;
    ((item.key[word] >> ((pass % 4) * 8)) & 0xff) as usize
}

const MIN_CHUNK: usize = 1 << 15;

pub(crate) fn sort_pairs<const N: usize>(keys: &[[u32; N]], values: &[u32]) -> (Vec<[u32; N]>, Vec<u32>) {
    debug_assert_eq!(keys.len(), values.len());
    let n = keys.len();
    let mut src: Vec<Item<N>> = exec::map_range(n, |i| Item { key: keys[i], value: values[i] });
    if n > 1 {
        let chunk = n.div_ceil(exec::current_workers().max(1)).max(MIN_CHUNK);
        let chunks = n.div_ceil(chunk);
        let mut dst = vec![Item { key: [0; N], value: 0 }; n];

        for pass in 0..4 * N {
            let counts: Vec<[usize; 256]> = exec::map_range(chunks, |c| {
                let mut h = [0usize; 256];
                for item in &src[c * chunk..((c + 1) * chunk).min(n)] {
                    h[digit(item, pass)] += 1;
                }
                h
            });
            let constant = (0..256).any(|d| counts.iter().map(|h| h[d]).sum::<usize>() == n);
            if constant {
                continue;
            }

            let mut offsets = vec![[0usize; 256]; chunks];
            let mut running = 0;
            for d in 0..256 {
                for c in 0..chunks {
                    offsets[c][d] = running;
                    running += counts[c][d];
                }
            }

            let out = SharedOut(dst.as_mut_ptr());
            let src_ref = &src;
            exec::map_range(chunks, |c| {
                let mut next = offsets[c];
                for item in &src_ref[c * chunk..((c + 1) * chunk).min(n)] {
                    let d = digit(item, pass);
                    // SAFETY: next[d] walks the range reserved for (chunk c,
                    // digit d); ranges are disjoint and cover 0..n exactly.
                    unsafe { out.ptr().add(next[d]).write(*item) };
                    next[d] += 1;
                }
            });
            std::mem::swap(&mut src, &mut dst);
        }
    }
    let sorted_keys = exec::map_range(n, |i| src[i].key);
    let sorted_values = exec::map_range(n, |i| src[i].value);
    (sorted_keys, sorted_values)
}
