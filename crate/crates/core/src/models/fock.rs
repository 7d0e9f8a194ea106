use crate::error::{Error, Result};

/// Occupation-number basis of `n` spinless fermions on `l` sites.
///
/// States are bitmasks (bit `j` set when site `j` is occupied) stored in
/// ascending numeric order. A basis state stands for
/// `c†_{j_N} ⋯ c†_{j_1} |0⟩` with `j_1 < ⋯ < j_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    sites: usize,
    particles: usize,
    states: Vec<u64>,
}

impl FockBasis {
    pub fn new(sites: usize, particles: usize) -> Result<Self> {
        if sites == 0 || sites > 63 {
            return Err(Error::Config(format!("site count {sites} outside 1..=63")));
        }
        if particles > sites {
            return Err(Error::Config(format!(
                "{particles} particles do not fit on {sites} sites"
            )));
        }
        let mut states = Vec::new();
        if particles == 0 {
            states.push(0);
        } else {
            // Gosper's hack walks all masks of fixed popcount in increasing order.
            let limit = 1u64 << sites;
            let mut s: u64 = (1u64 << particles) - 1;
            while s < limit {
                states.push(s);
                let c = s & s.wrapping_neg();
                let r = s + c;
                s = (((r ^ s) >> 2) / c) | r;
            }
        }
        Ok(Self {
            sites,
            particles,
            states,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    pub fn index(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }
}

/// Sign of `c†_to c_from` acting on `state` (which must have `from`
/// occupied and `to` empty): the parity of occupied sites strictly between.
pub(crate) fn hop_sign(state: u64, from: usize, to: usize) -> f64 {
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    if hi - lo < 2 {
        return 1.0;
    }
    let mask = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    if (state & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
