/// Fixed-length bitmap backed by u64 words. Used for family membership
/// tables (indexed by colex rank) and hypercube vertex sets (indexed by
/// characteristic integer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    len: u64,
    words: Vec<u64>,
}

impl Bitmap {
    pub fn zeros(len: u64) -> Self {
        let words = vec![0u64; len.div_ceil(64) as usize];
        Bitmap { len, words }
    }

    pub fn ones(len: u64) -> Self {
        let mut b = Bitmap::zeros(len);
        for w in &mut b.words {
            *w = !0;
        }
        b.clear_tail();
        b
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: u64, value: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[(i >> 6) as usize];
        if value {
            *w |= 1 << (i & 63);
        } else {
            *w &= !(1 << (i & 63));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Flip every bit in [0, len).
    pub fn complement(&self) -> Bitmap {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Bitmap) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let base = (wi as u64) << 6;
            std::iter::successors(if w == 0 { None } else { Some(w) }, |&rest| {
                let next = rest & (rest - 1);
                if next == 0 {
                    None
                } else {
                    Some(next)
                }
            })
            .map(move |rest| base + rest.trailing_zeros() as u64)
        })
    }

    fn clear_tail(&mut self) {
        let tail = self.len & 63;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count() {
        let mut b = Bitmap::zeros(130);
        b.set(0, true);
        b.set(64, true);
        b.set(129, true);
        assert!(b.get(0) && b.get(64) && b.get(129));
        assert!(!b.get(1));
        assert_eq!(b.count_ones(), 3);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
    }

    #[test]
    fn complement_respects_length() {
        let mut b = Bitmap::zeros(70);
        b.set(3, true);
        let c = b.complement();
        assert_eq!(c.count_ones(), 69);
        assert!(!c.get(3));
        assert_eq!(c.complement(), b);
    }

    #[test]
    fn subset_check() {
        let mut a = Bitmap::zeros(10);
        let mut b = Bitmap::zeros(10);
        a.set(2, true);
        b.set(2, true);
        b.set(5, true);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
    }
}
