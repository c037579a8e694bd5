//! Shared O(m) precomputations for the candidate-table solvers: prefix
//! sums of sorted costs and suffix sums of their reciprocals.

use crate::game::GameInstance;

pub(crate) struct Tables {
    prefix: Vec<f64>, // prefix[j] = phi_1 + .. + phi_j, prefix[0] = 0
    crec: Vec<f64>,   // crec[s] = sum_{j >= s} 1/phi_j, crec[m+1] = 0
}

impl Tables {
    pub fn new(g: &GameInstance) -> Self {
        let m = g.m();
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(0.0);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for j in 1..=m {
            let v = g.cost(j);
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
            prefix.push(sum + comp);
        }

        let mut crec = vec![0.0; m + 2];
        let mut sum = 0.0;
        let mut comp = 0.0;
        for s in (1..=m).rev() {
            let v = 1.0 / g.cost(s);
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
            crec[s] = sum + comp;
        }
        Tables { prefix, crec }
    }

    /// `phi_a + .. + phi_b` over 1-based inclusive bounds; empty ranges
    /// sum to zero.
    #[inline]
    pub fn prefix_range(&self, a: usize, b: usize) -> f64 {
        if a > b {
            0.0
        } else {
            self.prefix[b] - self.prefix[a - 1]
        }
    }

    /// `sum_{j >= s} 1/phi_j`; `crec(m + 1)` is 0.
    #[inline]
    pub fn crec(&self, s: usize) -> f64 {
        self.crec[s]
    }
}
