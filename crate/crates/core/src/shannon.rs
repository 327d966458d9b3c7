//! Shannon information measures on [`JointPmf`], all in bits (base-2 logs,
//! with the 0 log 0 = 0 convention).

use crate::error::Result;
use crate::pmf::{JointPmf, ZERO_CLAMP};
use crate::real::Real;

/// -sum p log2 p over a probability table; masses below `1e-15` are treated
/// as exact zeros so the sum never produces -inf.
pub(crate) fn entropy_of_table<T: Real>(table: &[T]) -> T {
    let cutoff = T::of(ZERO_CLAMP);
    let mut h = T::zero();
    for &p in table {
        if p > cutoff {
            h -= p * p.log2();
        }
    }
    h.max(T::zero())
}

impl<T: Real> JointPmf<T> {
    /// Entropy H of the marginal on `vars`, in bits.
    pub fn entropy(&self, vars: &[usize]) -> Result<T> {
        self.check_nonempty_vars(vars)?;
        Ok(entropy_of_table(&self.marginal_table(vars)))
    }

    /// Joint entropy of all variables, in bits.
    pub fn entropy_all(&self) -> T {
        entropy_of_table(self.probs())
    }

    /// Conditional entropy H(target | given) = H(target, given) - H(given).
    /// An empty `given` reduces to the plain entropy.
    pub fn conditional_entropy(&self, target: &[usize], given: &[usize]) -> Result<T> {
        self.check_nonempty_vars(target)?;
        Self::check_disjoint(target, given)?;
        if given.is_empty() {
            return self.entropy(target);
        }
        let mut union = target.to_vec();
        union.extend_from_slice(given);
        let h_union = self.entropy(&union)?;
        let h_given = self.entropy(given)?;
        Ok((h_union - h_given).max(T::zero()))
    }

    /// Mutual information I(set_a ; set_b) = H(A) + H(B) - H(AB), clamped to
    /// be nonnegative.
    pub fn mutual_information(&self, set_a: &[usize], set_b: &[usize]) -> Result<T> {
        self.check_nonempty_vars(set_a)?;
        self.check_nonempty_vars(set_b)?;
        Self::check_disjoint(set_a, set_b)?;
        let mut union = set_a.to_vec();
        union.extend_from_slice(set_b);
        let h_a = self.entropy(set_a)?;
        let h_b = self.entropy(set_b)?;
        let h_ab = self.entropy(&union)?;
        Ok((h_a + h_b - h_ab).max(T::zero()))
    }

    /// Conditional mutual information I(A ; B | C) = H(A|C) - H(A|BC),
    /// computed as H(AC) + H(BC) - H(C) - H(ABC) and clamped to be
    /// nonnegative. An empty `given` reduces to the plain mutual information.
    pub fn conditional_mutual_information(
        &self,
        set_a: &[usize],
        set_b: &[usize],
        given: &[usize],
    ) -> Result<T> {
        self.check_nonempty_vars(set_a)?;
        self.check_nonempty_vars(set_b)?;
        Self::check_disjoint(set_a, set_b)?;
        Self::check_disjoint(set_a, given)?;
        Self::check_disjoint(set_b, given)?;
        if given.is_empty() {
            return self.mutual_information(set_a, set_b);
        }
        let mut ac = set_a.to_vec();
        ac.extend_from_slice(given);
        let mut bc = set_b.to_vec();
        bc.extend_from_slice(given);
        let mut abc = set_a.to_vec();
        abc.extend_from_slice(set_b);
        abc.extend_from_slice(given);
        let h_ac = self.entropy(&ac)?;
        let h_bc = self.entropy(&bc)?;
        let h_c = self.entropy(given)?;
        let h_abc = self.entropy(&abc)?;
        Ok((h_ac + h_bc - h_c - h_abc).max(T::zero()))
    }
}

/// Binary entropy h(q) in bits.
pub fn binary_entropy<T: Real>(q: T) -> T {
    let cutoff = T::of(ZERO_CLAMP);
    let mut h = T::zero();
    if q > cutoff {
        h -= q * q.log2();
    }
    let r = T::one() - q;
    if r > cutoff {
        h -= r * r.log2();
    }
    h.max(T::zero())
}
