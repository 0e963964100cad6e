//! Incremental GF(2) elimination: what a node can infer from everything it has
//! observed so far.
//!
//! Rows are kept in reduced echelon form keyed by pivot, so a pivot variable
//! occurs in exactly one row. A row that shrinks to a single variable means
//! that variable is decoded.

use std::collections::{BTreeMap, BTreeSet};

use super::label::{Label, Var};

#[derive(Debug, Clone)]
struct Row {
    vars: Label,
    value: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Knowledge {
    known: BTreeMap<Var, bool>,
    rows: BTreeMap<Var, Row>,
    // non-pivot variable -> pivots of the rows it appears in
    occurs: BTreeMap<Var, BTreeSet<Var>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InsertOutcome {
    /// Variables decoded by this observation, in ascending order.
    pub solved: Vec<(Var, bool)>,
    /// The observation contradicts earlier ones.
    pub conflict: bool,
}

impl Knowledge {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a variable known a priori (a source's own payload).
    pub fn learn(&mut self, v: Var, value: bool) {
        debug_assert!(!self.rows.contains_key(&v) && !self.occurs.contains_key(&v));
        self.known.insert(v, value);
    }

    pub fn value_of(&self, v: Var) -> Option<bool> {
        self.known.get(&v).copied()
    }

    pub fn is_known(&self, v: Var) -> bool {
        self.known.contains_key(&v)
    }

    /// Reduces a combination against everything known; returns the residue
    /// and the accumulated constant.
    fn reduce(&self, label: &Label, value: bool) -> (Label, bool) {
        let mut val = value;
        let mut pivots = Vec::new();
        let rest = label.without(|v| {
            if let Some(b) = self.known.get(&v) {
                val ^= b;
                true
            } else {
                if self.rows.contains_key(&v) {
                    pivots.push(v);
                }
                false
            }
        });
        let mut acc = rest;
        for pv in pivots {
            let row = &self.rows[&pv];
            acc = acc.xor(&row.vars);
            val ^= row.value;
        }
        (acc, val)
    }

    /// Value of `label` if it lies in the span of what this node knows.
    pub fn eval(&self, label: &Label) -> Option<bool> {
        let (rest, val) = self.reduce(label, false);
        rest.is_zero().then_some(val)
    }

    fn xor_into_row(&mut self, target: Var, src: &Label, src_val: bool) {
        let row = self.rows.get_mut(&target).expect("row exists");
        for &u in src.vars() {
            if u == target {
                continue;
            }
            let set = self.occurs.entry(u).or_default();
            if row.vars.contains(u) {
                set.remove(&target);
                if set.is_empty() {
                    self.occurs.remove(&u);
                }
            } else {
                set.insert(target);
            }
        }
        row.vars = row.vars.xor(src);
        row.value ^= src_val;
    }

    /// Adds the observation `label = value`.
    pub fn insert(&mut self, label: &Label, value: bool) -> InsertOutcome {
        let (acc, val) = self.reduce(label, value);
        let Some(&pivot) = acc.vars().first() else {
            return InsertOutcome { solved: Vec::new(), conflict: val };
        };

        let touched: Vec<Var> = self.occurs.get(&pivot).map(|s| s.iter().copied().collect()).unwrap_or_default();
        for &r in &touched {
            self.xor_into_row(r, &acc, val);
        }
        debug_assert!(!self.occurs.contains_key(&pivot));
        for &u in &acc.vars()[1..] {
            self.occurs.entry(u).or_default().insert(pivot);
        }
        self.rows.insert(pivot, Row { vars: acc, value: val });

        let mut solved = Vec::new();
        for r in touched.into_iter().chain(std::iter::once(pivot)) {
            if self.rows[&r].vars.vars().len() == 1 {
                let row = self.rows.remove(&r).expect("row exists");
                self.known.insert(r, row.value);
                solved.push((r, row.value));
            }
        }
        solved.sort_unstable();
        InsertOutcome { solved, conflict: false }
    }

    /// Number of independent observations not yet resolved into single bits.
    pub fn pending_rows(&self) -> usize {
        self.rows.len()
    }
}
