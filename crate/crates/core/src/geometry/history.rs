use alloc::format;
use alloc::vec::Vec;

use super::{Curve, Topology};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub t: f64,
    pub curve: Curve,
}

/// Time-ordered curves with material correspondence: index `i` is the same
/// flowing point in every slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowHistory {
    topology: Topology,
    count: usize,
    truncated: bool,
    slices: Vec<Slice>,
    /// Time at which the solver stopped on a detected singularity.
    pub singular_time: Option<f64>,
    /// Times at which the samples were redistributed by arclength; across
    /// these the correspondence is by arclength fraction only.
    pub resample_events: Vec<f64>,
}

impl FlowHistory {
    pub fn new(t: f64, curve: Curve) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidHistory("non-finite slice time".into()));
        }
        Ok(FlowHistory {
            topology: curve.topology(),
            count: curve.len(),
            truncated: curve.is_truncated(),
            slices: alloc::vec![Slice { t, curve }],
            singular_time: None,
            resample_events: Vec::new(),
        })
    }

    pub fn from_slices(slices: Vec<(f64, Curve)>) -> Result<Self> {
        let mut it = slices.into_iter();
        let (t, c) = it
            .next()
            .ok_or_else(|| Error::InvalidHistory("no slices".into()))?;
        let mut h = FlowHistory::new(t, c)?;
        for (t, c) in it {
            h.push(t, c)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, t: f64, curve: Curve) -> Result<()> {
        let last = self.last().t;
        if !(t > last) || !t.is_finite() {
            return Err(Error::InvalidHistory(format!(
                "slice times must increase strictly ({t} after {last})"
            )));
        }
        if curve.len() != self.count || curve.topology() != self.topology {
            return Err(Error::InvalidHistory(format!(
                "slice at t = {t} has {} {:?} points, expected {} {:?}",
                curve.len(),
                curve.topology(),
                self.count,
                self.topology
            )));
        }
        self.slices.push(Slice { t, curve });
        Ok(())
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn first(&self) -> &Slice {
        &self.slices[0]
    }

    pub fn last(&self) -> &Slice {
        &self.slices[self.slices.len() - 1]
    }

    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.t).collect()
    }

    /// Index of the slice at time `t` (relative tolerance 1e-9).
    pub fn index_of_time(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        let k = self.slices.partition_point(|s| s.t < t - tol);
        match self.slices.get(k) {
            Some(s) if (s.t - t).abs() <= tol => Ok(k),
            _ => Err(Error::OutOfRange(format!("no slice at t = {t}"))),
        }
    }

    /// Index of the slice closest in time to `t`; ties go to the earlier one.
    pub fn nearest_index(&self, t: f64) -> usize {
        let k = self.slices.partition_point(|s| s.t < t);
        if k == 0 {
            return 0;
        }
        if k == self.slices.len() {
            return k - 1;
        }
        if t - self.slices[k - 1].t <= self.slices[k].t - t {
            k - 1
        } else {
            k
        }
    }

    /// Sub-history of the slices with `lo <= t <= hi` (tolerance 1e-12).
    pub fn window(&self, lo: f64, hi: f64) -> Result<FlowHistory> {
        let picked: Vec<(f64, Curve)> = self
            .slices
            .iter()
            .filter(|s| s.t >= lo - 1e-12 && s.t <= hi + 1e-12)
            .map(|s| (s.t, s.curve.clone()))
            .collect();
        FlowHistory::from_slices(picked)
    }
}
