//! Sparse time-dependent operators.
//!
//! A [`TimeDepOp`] stores one CSR matrix whose nonzeros each carry a slot
//! index; the value used at time t is `val · coeff[slot](t)`. Slot 0 is the
//! constant 1.

use num_complex::Complex64 as C64;

use crate::pulse::{Envelope, EnvelopeKind};

/// Time dependence of one coefficient slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    One,
    Envelope(Envelope),
    EnvelopeSquared(Envelope),
}

impl Coefficient {
    /// Constant envelopes are treated as on for the whole segment, so stage
    /// times that overshoot the segment end by rounding still see the field.
    pub fn at(&self, t: f64) -> f64 {
        let env = |e: &Envelope| match e.kind {
            EnvelopeKind::Constant => e.peak,
            EnvelopeKind::RaisedCosine => e.value(t),
        };
        match self {
            Coefficient::One => 1.0,
            Coefficient::Envelope(e) => env(e),
            Coefficient::EnvelopeSquared(e) => env(e).powi(2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TimeDepOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<C64>,
    slots: Vec<u16>,
    pub coefficients: Vec<Coefficient>,
}

impl TimeDepOp {
    /// Builds from (row, col, slot, value) triples; duplicates are summed.
    pub fn from_triples(dim: usize, mut triples: Vec<(usize, usize, u16, C64)>, coefficients: Vec<Coefficient>) -> Self {
        triples.sort_by_key(|&(r, c, s, _)| (r, c, s));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triples.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triples.len());
        let mut slots = Vec::with_capacity(triples.len());
        let mut last: Option<(usize, usize, u16)> = None;
        for (r, c, s, v) in triples {
            if last == Some((r, c, s)) {
                *vals.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c, s));
            row_ptr[r + 1] += 1;
            cols.push(c as u32);
            vals.push(v);
            slots.push(s);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        TimeDepOp { dim, row_ptr, cols, vals, slots, coefficients }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn coefficient_values(&self, t: f64, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.coefficients.iter().map(|c| c.at(t)));
    }

    /// Iterates (col, value) of row `r` given evaluated coefficients.
    #[inline]
    pub fn row<'a>(&'a self, r: usize, coeffs: &'a [f64]) -> impl Iterator<Item = (usize, C64)> + 'a {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        span.filter_map(move |k| {
            let c = coeffs[self.slots[k] as usize];
            (c != 0.0).then(|| (self.cols[k] as usize, self.vals[k] * c))
        })
    }

    /// Dense matrix at time t, row-major.
    pub fn dense(&self, t: f64) -> Vec<C64> {
        let mut coeffs = Vec::new();
        self.coefficient_values(t, &mut coeffs);
        let mut m = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for r in 0..self.dim {
            for (c, v) in self.row(r, &coeffs) {
                m[r * self.dim + c] += v;
            }
        }
        m
    }
}

/// √γ|to⟩⟨from| on one site, embedded as composite index pairs.
#[derive(Debug, Clone)]
pub struct Jump {
    pub label: String,
    pub site: usize,
    pub rate: f64,
    /// (from, to) composite indices.
    pub pairs: Vec<(u32, u32)>,
}

impl Jump {
    /// ‖L ψ‖².
    pub fn weight(&self, psi: &[C64]) -> f64 {
        self.rate * self.pairs.iter().map(|&(f, _)| psi[f as usize].norm_sqr()).sum::<f64>()
    }

    /// ψ ← L ψ (unnormalised).
    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        let a = self.rate.sqrt();
        for &(f, t) in &self.pairs {
            out[t as usize] += psi[f as usize] * a;
        }
    }
}
