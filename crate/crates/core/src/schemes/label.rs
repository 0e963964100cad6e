//! Symbolic level contents: XOR combinations of payload bits.

use std::fmt;

use crate::channel::Level;

/// Payload bit identifier.
pub type Var = u32;

/// Numbering of payload bits: `packets` packets, each carrying `per_packet`
/// fresh bits from each of the two sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarSpace {
    pub per_packet: u32,
    pub packets: u32,
}

impl VarSpace {
    pub fn total(&self) -> usize {
        2 * self.per_packet as usize * self.packets as usize
    }

    /// `side` is 0 for source 1 and 1 for source 2; `packet` and `index` are 0-based.
    pub fn var(&self, side: usize, packet: u32, index: u32) -> Var {
        debug_assert!(index < self.per_packet && packet < self.packets && side < 2);
        (packet * 2 + side as u32) * self.per_packet + index
    }

    pub fn side_of(&self, v: Var) -> usize {
        ((v / self.per_packet) % 2) as usize
    }

    pub fn packet_of(&self, v: Var) -> u32 {
        v / self.per_packet / 2
    }

    pub fn index_of(&self, v: Var) -> u32 {
        v % self.per_packet
    }

    /// Human-readable name, e.g. `a3_2` for source 1, packet 3, bit 2 (1-based).
    pub fn name(&self, v: Var) -> String {
        let who = if self.side_of(v) == 0 { 'a' } else { 'b' };
        format!("{who}{}_{}", self.packet_of(v) + 1, self.index_of(v) + 1)
    }
}

/// A GF(2) linear combination of payload bits, kept as a sorted set of ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Label(Vec<Var>);

impl Label {
    pub fn zero() -> Self {
        Label(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Label(vec![v])
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn xor(&self, other: &Label) -> Label {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Label(out)
    }

    /// Value of the combination under a full payload assignment.
    pub fn eval(&self, payload: &[bool]) -> bool {
        self.0.iter().fold(false, |acc, &v| acc ^ payload[v as usize])
    }

    /// Drops every variable for which `drop` returns true.
    pub fn without(&self, mut drop: impl FnMut(Var) -> bool) -> Label {
        Label(self.0.iter().copied().filter(|&v| !drop(v)).collect())
    }

    pub fn display<'a>(&'a self, vars: &'a VarSpace) -> impl fmt::Display + 'a {
        LabelDisplay { label: self, vars }
    }
}

impl FromIterator<Var> for Label {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        iter.into_iter().fold(Label::zero(), |acc, v| acc.xor(&Label::var(v)))
    }
}

impl Level for Label {
    fn add(&self, other: &Self) -> Self {
        self.xor(other)
    }
}

struct LabelDisplay<'a> {
    label: &'a Label,
    vars: &'a VarSpace,
}

impl fmt::Display for LabelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.label.is_zero() {
            return f.write_str("0");
        }
        let names: Vec<String> = self.label.0.iter().map(|&v| self.vars.name(v)).collect();
        f.write_str(&names.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_is_symmetric_difference() {
        let a: Label = [1, 4, 7].into_iter().collect();
        let b: Label = [4, 5].into_iter().collect();
        assert_eq!(a.xor(&b).vars(), &[1, 5, 7]);
        assert!(a.xor(&a).is_zero());
        assert_eq!(a.xor(&Label::zero()), a);
    }

    #[test]
    fn from_iter_cancels_repeats() {
        let l: Label = [3, 1, 3].into_iter().collect();
        assert_eq!(l.vars(), &[1]);
    }

    #[test]
    fn var_space_round_trip() {
        let vs = VarSpace { per_packet: 6, packets: 10 };
        let v = vs.var(1, 3, 5);
        assert_eq!((vs.side_of(v), vs.packet_of(v), vs.index_of(v)), (1, 3, 5));
        assert_eq!(vs.name(v), "b4_6");
        assert_eq!(vs.total(), 120);
    }

    #[test]
    fn display_names() {
        let vs = VarSpace { per_packet: 2, packets: 2 };
        let l: Label = [vs.var(0, 0, 1), vs.var(1, 0, 0)].into_iter().collect();
        assert_eq!(l.display(&vs).to_string(), "a1_2+b1_1");
        assert_eq!(Label::zero().display(&vs).to_string(), "0");
    }
}
