//! Shannon quantities, in bits, on [`JointDistribution`] tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ObserverError, Result};
use crate::joint::{JointDistribution, Variable};

/// Floating-point cancellation below this magnitude is clamped to zero.
pub const NEGATIVE_SLACK: f64 = 1e-10;

/// An information quantity in bits, never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitsValue(f64);

impl BitsValue {
    pub const ZERO: BitsValue = BitsValue(0.0);

    /// Clamps values in `[-1e-10, 0)` to zero; anything more negative means a broken table.
    pub fn from_raw(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(ObserverError::validation(format!("non-finite information value {x}")));
        }
        if x < -NEGATIVE_SLACK {
            return Err(ObserverError::validation(format!(
                "information value {x} is negative beyond tolerance"
            )));
        }
        Ok(BitsValue(x.max(0.0)))
    }

    pub fn bits(self) -> f64 {
        self.0
    }

    pub fn nats(self) -> f64 {
        self.0 * std::f64::consts::LN_2
    }
}

impl fmt::Display for BitsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} bits", self.0)
    }
}

/// `-sum p log2 p` over a probability vector, with `0 log 0 = 0`.
pub fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Binary entropy `H_b(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

fn raw_entropy(joint: &JointDistribution, vars: &[&str]) -> Result<f64> {
    if vars.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy_of(joint.marginal(vars)?.probs()))
}

fn disjoint(sets: &[&[&str]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        if a.is_empty() {
            return Err(ObserverError::validation("variable subsets must be non-empty"));
        }
        for b in &sets[i + 1..] {
            if let Some(v) = a.iter().find(|v| b.contains(v)) {
                return Err(ObserverError::validation(format!(
                    "variable {v} appears in two subsets"
                )));
            }
        }
    }
    Ok(())
}

fn union<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

pub fn entropy(joint: &JointDistribution, vars: &[&str]) -> Result<BitsValue> {
    if vars.is_empty() {
        return Err(ObserverError::validation("entropy needs at least one variable"));
    }
    BitsValue::from_raw(raw_entropy(joint, vars)?)
}

fn block_size(joint: &JointDistribution, vars: &[&str]) -> Result<usize> {
    vars.iter().map(|v| Ok(joint.variable(v)?.size())).product()
}

/// `I(A;B) = sum p(a,b) log2(p(a,b) / (p(a) p(b)))`, summed directly so that a
/// constant side gives exactly zero.
pub fn mutual_information(joint: &JointDistribution, a: &[&str], b: &[&str]) -> Result<BitsValue> {
    disjoint(&[a, b])?;
    let nb = block_size(joint, b)?;
    let p = joint.marginal(&union(&[a, b]))?;
    let p = p.probs();
    let na = p.len() / nb;
    let total: f64 = p.iter().sum();
    let pa: Vec<f64> = (0..na).map(|i| p[i * nb..(i + 1) * nb].iter().sum()).collect();
    let mut pb = vec![0.0; nb];
    for i in 0..na {
        for (j, slot) in pb.iter_mut().enumerate() {
            *slot += p[i * nb + j];
        }
    }
    let mut h = 0.0;
    for i in 0..na {
        for j in 0..nb {
            let x = p[i * nb + j];
            if x > 0.0 {
                h += x * ((x * total) / (pa[i] * pb[j])).log2();
            }
        }
    }
    BitsValue::from_raw(h / total)
}

/// `I(A;B|C) = sum p(a,b,c) log2(p(a,b,c) p(c) / (p(a,c) p(b,c)))`.
pub fn conditional_mutual_information(
    joint: &JointDistribution,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<BitsValue> {
    disjoint(&[a, b, c])?;
    let nb = block_size(joint, b)?;
    let nc = block_size(joint, c)?;
    let p = joint.marginal(&union(&[a, b, c]))?;
    let p = p.probs();
    let na = p.len() / (nb * nc);
    let at = |i: usize, j: usize, l: usize| p[(i * nb + j) * nc + l];
    let mut pac = vec![0.0; na * nc];
    let mut pbc = vec![0.0; nb * nc];
    for i in 0..na {
        for j in 0..nb {
            for l in 0..nc {
                pac[i * nc + l] += at(i, j, l);
                pbc[j * nc + l] += at(i, j, l);
            }
        }
    }
    let mut pc = vec![0.0; nc];
    for i in 0..na {
        for (l, slot) in pc.iter_mut().enumerate() {
            *slot += pac[i * nc + l];
        }
    }
    let mut h = 0.0;
    for i in 0..na {
        for j in 0..nb {
            for l in 0..nc {
                let x = at(i, j, l);
                if x > 0.0 {
                    h += x * ((x * pc[l]) / (pac[i * nc + l] * pbc[j * nc + l])).log2();
                }
            }
        }
    }
    let total: f64 = p.iter().sum();
    BitsValue::from_raw(h / total)
}

/// Empirical frequency table from sampled configurations.
pub fn plugin_from_samples(vars: Vec<Variable>, samples: &[Vec<usize>]) -> Result<JointDistribution> {
    if samples.is_empty() {
        return Err(ObserverError::validation("at least one sample window required"));
    }
    let sizes: Vec<usize> = vars.iter().map(Variable::size).collect();
    let len: usize = sizes.iter().product();
    let mut counts = vec![0u64; len];
    for s in samples {
        if s.len() != sizes.len() || s.iter().zip(&sizes).any(|(&x, &n)| x >= n) {
            return Err(ObserverError::validation(format!(
                "sample {s:?} does not fit the alphabets"
            )));
        }
        let i = s.iter().zip(&sizes).fold(0, |acc, (&x, &n)| acc * n + x);
        counts[i] += 1;
    }
    from_counts(vars, &counts)
}

/// Normalizes a count table.
pub fn from_counts(vars: Vec<Variable>, counts: &[u64]) -> Result<JointDistribution> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(ObserverError::validation("empty count table"));
    }
    let probs = counts.iter().map(|&c| c as f64 / n as f64).collect();
    JointDistribution::with_mass_tolerance(vars, probs, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn table(sizes: &[usize], probs: Vec<f64>) -> JointDistribution {
        let vars = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| Variable::indexed(["A", "B", "C"][i], n))
            .collect();
        JointDistribution::new(vars, probs).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let uniform4 = table(&[4], vec![0.25; 4]);
        assert_abs_diff_eq!(entropy(&uniform4, &["A"]).unwrap().bits(), 2.0, epsilon = 1e-15);
        let point = table(&[3], vec![0.0, 1.0, 0.0]);
        assert_eq!(entropy(&point, &["A"]).unwrap().bits(), 0.0);
        let skew = table(&[4], vec![0.375, 0.375, 0.125, 0.125]);
        assert_abs_diff_eq!(
            entropy(&skew, &["A"]).unwrap().bits(),
            1.811278124459133,
            epsilon = 1e-12
        );
        assert!(entropy(&skew, &[]).is_err());
        assert!(entropy(&skew, &["Z"]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let indep = table(&[2, 2], vec![0.25; 4]);
        assert_eq!(mutual_information(&indep, &["A"], &["B"]).unwrap().bits(), 0.0);
        let same = table(&[2, 2], vec![0.5, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(
            mutual_information(&same, &["A"], &["B"]).unwrap().bits(),
            1.0,
            epsilon = 1e-15
        );
        assert!(mutual_information(&same, &["A"], &["A"]).is_err());
        assert!(mutual_information(&same, &[], &["A"]).is_err());
    }

    #[test]
    fn conditional_examples() {
        // A and B are noisy copies of C, independent given C.
        let mut p = vec![0.0; 8];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let fa = if a == c { 0.9 } else { 0.1 };
                    let fb = if b == c { 0.8 } else { 0.2 };
                    p[a * 4 + b * 2 + c] = 0.5 * fa * fb;
                }
            }
        }
        let j = table(&[2, 2, 2], p);
        let cmi = conditional_mutual_information(&j, &["A"], &["B"], &["C"]).unwrap();
        assert!(cmi.bits() < 1e-12);
        let lhs = mutual_information(&j, &["A"], &["B", "C"]).unwrap().bits();
        let rhs = mutual_information(&j, &["A"], &["C"]).unwrap().bits() + cmi.bits();
        assert!((lhs - rhs).abs() < 1e-10);
        assert!(conditional_mutual_information(&j, &["A"], &["B"], &["A"]).is_err());
    }

    #[test]
    fn clamp_rules() {
        assert_eq!(BitsValue::from_raw(-5e-11).unwrap().bits(), 0.0);
        assert!(BitsValue::from_raw(-1e-9).is_err());
        assert!(BitsValue::from_raw(f64::NAN).is_err());
    }

    #[test]
    fn plugin_examples() {
        let vars = || vec![Variable::indexed("A", 2), Variable::indexed("B", 3)];
        let j = plugin_from_samples(vars(), &vec![vec![1, 2]; 5]).unwrap();
        assert_eq!(j.prob(&[1, 2]), 1.0);
        assert!(plugin_from_samples(vars(), &[]).is_err());
        assert!(plugin_from_samples(vars(), &[vec![2, 0]]).is_err());
    }

    fn random_table() -> impl Strategy<Value = JointDistribution> {
        proptest::collection::vec(0.0..1.0f64, 12).prop_filter_map("zero mass", |w| {
            JointDistribution::from_weights(
                vec![
                    Variable::indexed("A", 2),
                    Variable::indexed("B", 3),
                    Variable::indexed("C", 2),
                ],
                w,
            )
            .ok()
        })
    }

    proptest! {
        #[test]
        fn symmetric(j in random_table()) {
            let ab = mutual_information(&j, &["A"], &["B"]).unwrap().bits();
            let ba = mutual_information(&j, &["B"], &["A"]).unwrap().bits();
            prop_assert!((ab - ba).abs() <= 1e-12);
        }

        #[test]
        fn monotone_in_second_argument(j in random_table()) {
            let small = mutual_information(&j, &["A"], &["B"]).unwrap().bits();
            let big = mutual_information(&j, &["A"], &["B", "C"]).unwrap().bits();
            prop_assert!(big >= small - 1e-10);
        }

        #[test]
        fn invariant_under_relabeling(j in random_table(), perm in Just([2usize, 0, 1])) {
            // permute the symbols of B
            let mut p = vec![0.0; j.len()];
            for (c, x) in j.iter() {
                let moved = [c[0], perm[c[1]], c[2]];
                p[j.encode(&moved)] = x;
            }
            let k = JointDistribution::new(j.vars().to_vec(), p).unwrap();
            let a = mutual_information(&j, &["A", "C"], &["B"]).unwrap().bits();
            let b = mutual_information(&k, &["A", "C"], &["B"]).unwrap().bits();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn chain_rule(j in random_table()) {
            let lhs = mutual_information(&j, &["A"], &["B", "C"]).unwrap().bits();
            let rhs = mutual_information(&j, &["A"], &["C"]).unwrap().bits()
                + conditional_mutual_information(&j, &["A"], &["B"], &["C"]).unwrap().bits();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }
    }
}
