//! Dense probability tables over named finite-alphabet variables.
//!
//! Entries are stored row-major in variable order: the last variable varies
//! fastest.

use std::io::{Read, Write};

use crate::error::{ObserverError, Result};
use crate::report::fmt_sig;

pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub labels: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Self {
        Variable {
            name: name.into(),
            labels,
        }
    }

    /// Variable whose symbols are labeled `0..size`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Self {
        Variable::new(name, (0..size).map(|i| i.to_string()).collect())
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    vars: Vec<Variable>,
    probs: Vec<f64>,
}

fn table_len(vars: &[Variable]) -> Option<usize> {
    vars.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.size()))
}

impl JointDistribution {
    /// Validated constructor: non-negative entries, unit mass within `1e-12`.
    pub fn new(vars: Vec<Variable>, probs: Vec<f64>) -> Result<Self> {
        Self::with_mass_tolerance(vars, probs, MASS_TOLERANCE)
    }

    pub(crate) fn with_mass_tolerance(vars: Vec<Variable>, probs: Vec<f64>, tol: f64) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if v.size() == 0 {
                return Err(ObserverError::validation(format!(
                    "variable {} has an empty alphabet",
                    v.name
                )));
            }
            if vars[..i].iter().any(|u| u.name == v.name) {
                return Err(ObserverError::validation(format!("duplicate variable {}", v.name)));
            }
        }
        let len = table_len(&vars).ok_or_else(|| ObserverError::validation("table size overflows"))?;
        if len != probs.len() {
            return Err(ObserverError::validation(format!(
                "table has {} entries, alphabets need {len}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(ObserverError::validation(format!(
                "negative or non-finite probability {bad}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(ObserverError::validation(format!("total mass {total} differs from 1")));
        }
        Ok(JointDistribution { vars, probs })
    }

    /// Builds a table from unnormalized non-negative weights.
    pub fn from_weights(vars: Vec<Variable>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(ObserverError::validation("weights have no mass"));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Self::with_mass_tolerance(vars, probs, 1e-9)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| ObserverError::validation(format!("unknown variable {name}")))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.vars[self.position(name)?])
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.vars.iter().map(Variable::size).collect()
    }

    /// Decodes a flat index into one symbol per variable.
    pub fn decode(&self, mut index: usize, out: &mut [usize]) {
        for (slot, v) in out.iter_mut().zip(&self.vars).rev() {
            *slot = index % v.size();
            index /= v.size();
        }
    }

    pub fn encode(&self, config: &[usize]) -> usize {
        config.iter().zip(&self.vars).fold(0, |acc, (&c, v)| acc * v.size() + c)
    }

    pub fn prob(&self, config: &[usize]) -> f64 {
        self.probs[self.encode(config)]
    }

    /// `(configuration, probability)` for every cell, in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        (0..self.len()).map(move |i| {
            let mut c = vec![0; self.vars.len()];
            self.decode(i, &mut c);
            (c, self.probs[i])
        })
    }

    /// Marginal over `names`, with variables in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointDistribution> {
        let positions = names.iter().map(|n| self.position(n)).collect::<Result<Vec<_>>>()?;
        for (i, p) in positions.iter().enumerate() {
            if positions[..i].contains(p) {
                return Err(ObserverError::validation(format!("variable {} listed twice", names[i])));
            }
        }
        let vars: Vec<Variable> = positions.iter().map(|&p| self.vars[p].clone()).collect();
        let len = table_len(&vars).expect("sub-table of a valid table");
        let mut probs = vec![0.0; len];
        let mut config = vec![0; self.vars.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            self.decode(i, &mut config);
            let j = positions
                .iter()
                .zip(&vars)
                .fold(0, |acc, (&pos, v)| acc * v.size() + config[pos]);
            probs[j] += p;
        }
        Ok(JointDistribution { vars, probs })
    }

    /// Same table with variables renamed pairwise.
    pub fn renamed(&self, renames: &[(&str, &str)]) -> Result<JointDistribution> {
        let mut vars = self.vars.clone();
        for (from, to) in renames {
            let p = self.position(from)?;
            vars[p].name = (*to).to_string();
        }
        JointDistribution::with_mass_tolerance(vars, self.probs.clone(), f64::INFINITY)
    }

    /// Largest absolute cell difference between two tables over identical variables.
    pub fn max_abs_deviation(&self, other: &JointDistribution) -> Result<f64> {
        if self.vars != other.vars {
            return Err(ObserverError::validation(format!(
                "variable mismatch: {:?} vs {:?}",
                self.var_names(),
                other.var_names()
            )));
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes one row per configuration plus a `probability` column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header: Vec<&str> = self.var_names();
        header.push("probability");
        w.write_record(&header)?;
        for (config, p) in self.iter() {
            let mut row: Vec<String> = config
                .iter()
                .zip(&self.vars)
                .map(|(&c, v)| v.labels[c].clone())
                .collect();
            row.push(fmt_sig(p));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| ObserverError::io("<csv>", e))?;
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv), using `template`
    /// for variable order and alphabets. Missing rows are zero.
    pub fn read_csv<R: Read>(reader: R, template: &JointDistribution) -> Result<JointDistribution> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let mut expected: Vec<&str> = template.var_names();
        expected.push("probability");
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(ObserverError::validation(format!(
                "csv header {:?} does not match {:?}",
                header.iter().collect::<Vec<_>>(),
                expected
            )));
        }
        let mut probs = vec![0.0; template.len()];
        let mut config = vec![0; template.vars.len()];
        for rec in r.records() {
            let rec = rec?;
            for (i, v) in template.vars.iter().enumerate() {
                let field = &rec[i];
                config[i] = v
                    .labels
                    .iter()
                    .position(|l| l == field)
                    .ok_or_else(|| ObserverError::validation(format!("unknown symbol {field:?} for {}", v.name)))?;
            }
            let p: f64 = rec[template.vars.len()]
                .parse()
                .map_err(|_| ObserverError::validation(format!("bad probability {:?}", &rec[template.vars.len()])))?;
            probs[template.encode(&config)] += p;
        }
        JointDistribution::with_mass_tolerance(template.vars.clone(), probs, 1e-6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bits(p: [f64; 4]) -> JointDistribution {
        JointDistribution::new(vec![Variable::indexed("X", 2), Variable::indexed("Y", 2)], p.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_tables() {
        let vars = || vec![Variable::indexed("X", 2)];
        assert!(JointDistribution::new(vars(), vec![0.5, 0.4]).is_err());
        assert!(JointDistribution::new(vars(), vec![1.5, -0.5]).is_err());
        assert!(JointDistribution::new(vars(), vec![1.0]).is_err());
        assert!(JointDistribution::new(vec![Variable::indexed("X", 1), Variable::indexed("X", 1)], vec![1.0]).is_err());
    }

    #[test]
    fn marginal_reorders_and_sums() {
        let j = two_bits([0.1, 0.2, 0.3, 0.4]);
        let y = j.marginal(&["Y"]).unwrap();
        assert!((y.probs()[0] - 0.4).abs() < 1e-15);
        let yx = j.marginal(&["Y", "X"]).unwrap();
        assert_eq!(yx.probs(), &[0.1, 0.3, 0.2, 0.4]);
        assert!(j.marginal(&["Z"]).is_err());
        assert!(j.marginal(&["X", "X"]).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let j = two_bits([0.125, 0.375, 0.375, 0.125]);
        let mut buf = Vec::new();
        j.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("X,Y,probability\n0,0,0.125\n"));
        let back = JointDistribution::read_csv(&buf[..], &j).unwrap();
        assert_eq!(back.max_abs_deviation(&j).unwrap(), 0.0);
    }
}
