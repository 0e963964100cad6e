//! GF(2) signal-level model of both hops of the channel.
//!
//! Level 1 is the top (most significant) level everywhere. Internally a
//! vector stores level `k` at index `k - 1`.

use std::fmt;
use std::ops::BitXor;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Link strengths of the symmetric two-hop network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ChannelParams {
    pub m: u32,
    pub n: u32,
    pub mbar: u32,
    pub nbar: u32,
    pub f: u32,
}

/// Interference-to-signal ratio m/n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alpha {
    Finite(Ratio<u32>),
    Infinite,
    Undefined,
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(r) => write!(f, "{r}"),
            Alpha::Infinite => write!(f, "inf"),
            Alpha::Undefined => write!(f, "undefined"),
        }
    }
}

impl ChannelParams {
    pub fn new(m: u32, n: u32, mbar: u32, nbar: u32, f: u32) -> Self {
        ChannelParams { m, n, mbar, nbar, f }
    }

    /// Length of hop-1 signal vectors.
    pub fn q(&self) -> usize {
        self.m.max(self.n) as usize
    }

    /// Length of hop-2 signal vectors.
    pub fn qbar(&self) -> usize {
        self.mbar.max(self.nbar).max(self.f) as usize
    }

    pub fn alpha(&self) -> Alpha {
        match (self.m, self.n) {
            (0, 0) => Alpha::Undefined,
            (_, 0) => Alpha::Infinite,
            (m, n) => Alpha::Finite(Ratio::new(m, n)),
        }
    }
}

impl fmt::Display for ChannelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} n={} mbar={} nbar={} f={}", self.m, self.n, self.mbar, self.nbar, self.f)
    }
}

/// Anything that can sit on a signal level: a bit, or a symbolic combination.
pub trait Level: Clone + Default {
    fn add(&self, other: &Self) -> Self;
}

impl Level for bool {
    fn add(&self, other: &Self) -> Self {
        self ^ other
    }
}

/// Keeps the top `k` entries of `x`, bottom-aligned in a vector of the same length.
pub fn shift_levels<T: Level>(x: &[T], k: usize) -> Vec<T> {
    let len = x.len();
    debug_assert!(k <= len);
    let mut out = vec![T::default(); len - k];
    out.extend_from_slice(&x[..k]);
    out
}

fn superpose<T: Level>(a: Vec<T>, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

/// Hop-1 outputs `(y_r1, y_r2)` for arbitrary level contents.
pub fn first_hop_levels<T: Level>(x_s1: &[T], x_s2: &[T], p: &ChannelParams) -> (Vec<T>, Vec<T>) {
    let (m, n) = (p.m as usize, p.n as usize);
    let y_r1 = superpose(shift_levels(x_s1, n), &shift_levels(x_s2, m));
    let y_r2 = superpose(shift_levels(x_s1, m), &shift_levels(x_s2, n));
    (y_r1, y_r2)
}

/// Hop-2 outputs for arbitrary level contents.
pub fn second_hop_levels<T: Level>(x_r1: &[T], x_r2: &[T], p: &ChannelParams) -> HopTwo<Vec<T>> {
    let (mbar, nbar, f) = (p.mbar as usize, p.nbar as usize, p.f as usize);
    HopTwo {
        y_d1: shift_levels(x_r1, f),
        y_d2: shift_levels(x_r2, f),
        y_s1: superpose(shift_levels(x_r1, nbar), &shift_levels(x_r2, mbar)),
        y_s2: superpose(shift_levels(x_r2, nbar), &shift_levels(x_r1, mbar)),
    }
}

/// Everything the second hop delivers in one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopTwo<V> {
    pub y_d1: V,
    pub y_d2: V,
    pub y_s1: V,
    pub y_s2: V,
}

/// Fixed-length binary column vector, top level first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GfVec {
    bits: Vec<bool>,
}

impl GfVec {
    pub fn zeros(len: usize) -> Self {
        GfVec { bits: vec![false; len] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        GfVec { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 1-based `level`.
    pub fn level(&self, level: usize) -> bool {
        self.bits[level - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    /// Returns a copy with the 1-based `level` flipped.
    pub fn flipped(&self, level: usize) -> GfVec {
        let mut bits = self.bits.clone();
        bits[level - 1] ^= true;
        GfVec { bits }
    }

    pub fn xor(&self, other: &GfVec) -> Result<GfVec> {
        if self.len() != other.len() {
            return Err(Error::Domain(format!("xor of vectors with lengths {} and {}", self.len(), other.len())));
        }
        Ok(GfVec { bits: superpose(self.bits.clone(), &other.bits) })
    }
}

impl BitXor for &GfVec {
    type Output = GfVec;

    /// Panics on length mismatch; use [`GfVec::xor`] for a checked version.
    fn bitxor(self, rhs: &GfVec) -> GfVec {
        self.xor(rhs).expect("GfVec length mismatch")
    }
}

impl fmt::Display for GfVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for GfVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Domain(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(GfVec::from_bits)
    }
}

/// Multiplication by the lower shift matrix S^(L-k): the top `k` levels of `x`
/// survive, bottom-aligned.
pub fn shift(x: &GfVec, k: usize) -> Result<GfVec> {
    if k > x.len() {
        return Err(Error::Domain(format!("shift by {k} exceeds vector length {}", x.len())));
    }
    Ok(GfVec { bits: shift_levels(&x.bits, k) })
}

fn check_len(v: &GfVec, want: usize, name: &str) -> Result<()> {
    if v.len() != want {
        return Err(Error::Domain(format!("{name} has length {}, expected {want}", v.len())));
    }
    Ok(())
}

/// Relay observations `(y_r1, y_r2)` for source inputs of length q.
pub fn first_hop(x_s1: &GfVec, x_s2: &GfVec, p: &ChannelParams) -> Result<(GfVec, GfVec)> {
    check_len(x_s1, p.q(), "x_s1")?;
    check_len(x_s2, p.q(), "x_s2")?;
    let (y_r1, y_r2) = first_hop_levels(&x_s1.bits, &x_s2.bits, p);
    Ok((GfVec::from_bits(y_r1), GfVec::from_bits(y_r2)))
}

/// Destination and overheard source observations for relay inputs of length qbar.
pub fn second_hop(x_r1: &GfVec, x_r2: &GfVec, p: &ChannelParams) -> Result<HopTwo<GfVec>> {
    check_len(x_r1, p.qbar(), "x_r1")?;
    check_len(x_r2, p.qbar(), "x_r2")?;
    let out = second_hop_levels(&x_r1.bits, &x_r2.bits, p);
    Ok(HopTwo {
        y_d1: GfVec::from_bits(out.y_d1),
        y_d2: GfVec::from_bits(out.y_d2),
        y_s1: GfVec::from_bits(out.y_s1),
        y_s2: GfVec::from_bits(out.y_s2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> GfVec {
        s.parse().unwrap()
    }

    #[test]
    fn shift_keeps_top_levels_bottom_aligned() {
        assert_eq!(shift(&v("1011"), 4).unwrap(), v("1011"));
        assert_eq!(shift(&v("1011"), 2).unwrap(), v("0010"));
        assert_eq!(shift(&v("1100111"), 4).unwrap(), v("0001100"));
        assert_eq!(shift(&v("1011"), 0).unwrap(), v("0000"));
    }

    #[test]
    fn shift_past_length_is_domain_error() {
        assert!(matches!(shift(&v("10"), 3), Err(Error::Domain(_))));
    }

    #[test]
    fn first_hop_rejects_wrong_length() {
        let p = ChannelParams::new(2, 4, 0, 0, 1);
        assert!(first_hop(&v("101"), &v("1010"), &p).is_err());
        assert!(first_hop(&v("1010"), &v("10100"), &p).is_err());
    }

    #[test]
    fn degenerate_channel_maps_empty_to_empty() {
        let p = ChannelParams::new(0, 0, 0, 0, 0);
        let (a, b) = first_hop(&GfVec::zeros(0), &GfVec::zeros(0), &p).unwrap();
        assert!(a.is_empty() && b.is_empty());
        let h = second_hop(&GfVec::zeros(0), &GfVec::zeros(0), &p).unwrap();
        assert!(h.y_s1.is_empty());
    }

    #[test]
    fn alpha_cases() {
        assert_eq!(ChannelParams::new(2, 4, 0, 0, 0).alpha(), Alpha::Finite(Ratio::new(1, 2)));
        assert_eq!(ChannelParams::new(3, 0, 0, 0, 0).alpha(), Alpha::Infinite);
        assert_eq!(ChannelParams::new(0, 0, 0, 0, 0).alpha(), Alpha::Undefined);
    }

    #[test]
    fn qbar_takes_largest_backward_or_forward_link() {
        let p = ChannelParams::new(1, 1, 1, 3, 2);
        assert_eq!(p.qbar(), 3);
        let x_r1 = v("101");
        let h = second_hop(&x_r1, &GfVec::zeros(3), &p).unwrap();
        // destination sees the top two relay levels only
        assert_eq!(h.y_d1, v("010"));
        // own source sees all three
        assert_eq!(h.y_s1, v("101"));
    }
}
