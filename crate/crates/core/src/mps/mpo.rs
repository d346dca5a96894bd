use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

use super::SiteTensor;

type C = Complex64;

/// One MPO tensor `W[a, b]_{s', s}` with bond indices `a` (left), `b` (right).
#[derive(Clone, Debug, PartialEq)]
pub struct MpoSite {
    left: usize,
    right: usize,
    phys_out: usize,
    phys_in: usize,
    data: Vec<C>,
}

impl MpoSite {
    pub fn zeros(left: usize, right: usize, phys_out: usize, phys_in: usize) -> Self {
        MpoSite { left, right, phys_out, phys_in, data: vec![C::new(0.0, 0.0); left * right * phys_out * phys_in] }
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, so: usize, si: usize) -> usize {
        a + self.left * (b + self.right * (so + self.phys_out * si))
    }

    pub fn get(&self, a: usize, b: usize, so: usize, si: usize) -> C {
        self.data[self.idx(a, b, so, si)]
    }

    pub fn set(&mut self, a: usize, b: usize, so: usize, si: usize, v: C) {
        let k = self.idx(a, b, so, si);
        self.data[k] = v;
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.left, self.right, self.phys_out, self.phys_in)
    }

    /// Combined bonds are `mps_index + mps_dim · mpo_index` on both sides.
    pub(crate) fn contract(&self, t: &SiteTensor) -> Result<SiteTensor> {
        if t.phys != self.phys_in {
            return Err(Error::DimensionMismatch { expected: self.phys_in, found: t.phys });
        }
        let (tl, tr) = (t.left, t.right);
        let mut out = SiteTensor::zeros(tl * self.left, self.phys_out, tr * self.right);
        for si in 0..self.phys_in {
            for so in 0..self.phys_out {
                for b in 0..self.right {
                    for a in 0..self.left {
                        let w = self.get(a, b, so, si);
                        if w == C::new(0.0, 0.0) {
                            continue;
                        }
                        for r in 0..tr {
                            for l in 0..tl {
                                let k = out.idx(l + tl * a, so, r + tr * b);
                                out.data[k] += w * t.get(l, si, r);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mpo {
    sites: Vec<MpoSite>,
}

impl Mpo {
    pub fn new(sites: Vec<MpoSite>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::Config("an MPO needs at least one site".into()));
        }
        check_len(1, sites[0].left)?;
        check_len(1, sites[sites.len() - 1].right)?;
        for w in sites.windows(2) {
            check_len(w[0].right, w[1].left)?;
        }
        Ok(Mpo { sites })
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[MpoSite] {
        &self.sites
    }
}
