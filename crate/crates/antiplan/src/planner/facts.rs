//! Compact bitset over fact indices; search states hash and clone cheaply.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactSet {
    words: Box<[u64]>,
}

impl FactSet {
    pub fn zeros(n_bits: usize) -> Self {
        FactSet {
            words: vec![0u64; n_bits.div_ceil(64)].into_boxed_slice(),
        }
    }

    pub fn from_indices(n_bits: usize, indices: &[u32]) -> Self {
        let mut s = FactSet::zeros(n_bits);
        for &i in indices {
            s.set(i);
        }
        s
    }

    #[inline]
    pub fn set(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: u32) {
        self.words[(i / 64) as usize] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: u32) -> bool {
        self.words[(i / 64) as usize] & (1u64 << (i % 64)) != 0
    }

    #[inline]
    pub fn contains_all(&self, indices: &[u32]) -> bool {
        indices.iter().all(|&i| self.contains(i))
    }

    pub fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some(w as u32 * 64 + b)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_clear_contains() {
        let mut s = FactSet::zeros(130);
        s.set(0);
        s.set(64);
        s.set(129);
        assert!(s.contains(0) && s.contains(64) && s.contains(129));
        assert!(!s.contains(1));
        s.clear(64);
        assert!(!s.contains(64));
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 129]);
    }

    #[test]
    fn from_indices_round_trip() {
        let s = FactSet::from_indices(200, &[3, 77, 150, 3]);
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![3, 77, 150]);
        assert!(s.contains_all(&[3, 77]));
        assert!(!s.contains_all(&[3, 78]));
    }
}
