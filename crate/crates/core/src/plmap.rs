//! Continuous piecewise-linear self-maps of `[0,1]` with exact rational nodes.
//!
//! A map is an ordered node list `(x_0,y_0),…,(x_m,y_m)` with `x_0 = 0`,
//! `x_m = 1`, strictly increasing x and all y in `[0,1]`; the map is the affine
//! interpolation between consecutive nodes. Continuity is structural: this
//! representation cannot express a discontinuous map. Values are kept in
//! canonical form (no collinear interior nodes), so equality of values is
//! equality of maps.

use crate::interval::{Interval, IntervalSet, Rat};
use num::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("a map needs at least two nodes")]
    TooFewNodes,
    #[error("first node must have x = 0, last must have x = 1")]
    MissingEndpoint,
    #[error("node x-coordinates must be strictly increasing (node {index})")]
    NonMonotone { index: usize },
    #[error("node value {value} at x = {x} lies outside [0,1]")]
    ValueOutOfRange { x: String, value: String },
    #[error("argument {x} lies outside the domain [0,1]")]
    DomainError { x: String },
}

/// A continuous piecewise-linear self-map of `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLMap {
    nodes: Vec<(Rat, Rat)>,
}

fn one() -> Rat {
    Rat::one()
}

/// Collinearity test for three nodes: equal slopes on both sides of the middle.
fn collinear(a: &(Rat, Rat), b: &(Rat, Rat), c: &(Rat, Rat)) -> bool {
    (&b.1 - &a.1) * (&c.0 - &b.0) == (&c.1 - &b.1) * (&b.0 - &a.0)
}

fn drop_collinear(nodes: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(nodes.len());
    for n in nodes {
        while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &n) {
            out.pop();
        }
        out.push(n);
    }
    out
}

impl PLMap {
    /// Validates and canonicalizes a node list.
    pub fn new(nodes: Vec<(Rat, Rat)>) -> Result<Self, MapError> {
        if nodes.len() < 2 {
            return Err(MapError::TooFewNodes);
        }
        if !nodes[0].0.is_zero() || nodes[nodes.len() - 1].0 != one() {
            return Err(MapError::MissingEndpoint);
        }
        for (i, (x, y)) in nodes.iter().enumerate() {
            if y.is_negative() || y > &one() {
                return Err(MapError::ValueOutOfRange { x: x.to_string(), value: y.to_string() });
            }
            if i > 0 && nodes[i - 1].0 >= *x {
                return Err(MapError::NonMonotone { index: i });
            }
        }
        Ok(PLMap { nodes: drop_collinear(nodes) })
    }

    pub fn identity() -> Self {
        PLMap { nodes: vec![(Rat::zero(), Rat::zero()), (one(), one())] }
    }

    pub fn constant(y: Rat) -> Result<Self, MapError> {
        PLMap::new(vec![(Rat::zero(), y.clone()), (one(), y)])
    }

    pub fn nodes(&self) -> &[(Rat, Rat)] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Exact affine interpolation at `x`.
    pub fn eval(&self, x: &Rat) -> Result<Rat, MapError> {
        if x.is_negative() || x > &one() {
            return Err(MapError::DomainError { x: x.to_string() });
        }
        Ok(self.eval_in(x))
    }

    /// Interpolation for a known-valid argument.
    fn eval_in(&self, x: &Rat) -> Rat {
        debug_assert!(!x.is_negative() && x <= &one());
        // last node with node.x <= x
        let i = match self.nodes.binary_search_by(|n| n.0.cmp(x)) {
            Ok(i) => return self.nodes[i].1.clone(),
            Err(i) => i - 1, // i >= 1 since x >= 0 = nodes[0].x
        };
        let (x0, y0) = &self.nodes[i];
        let (x1, y1) = &self.nodes[i + 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Exact composition `self ∘ inner`. Breakpoints are inner's nodes plus the
    /// inner-preimages of self's breakpoints; the result is canonical.
    pub fn compose(&self, inner: &PLMap) -> PLMap {
        let mut xs: BTreeSet<Rat> = inner.nodes.iter().map(|n| n.0.clone()).collect();
        for w in inner.nodes.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if y0 == y1 {
                continue;
            }
            let slope = (y1 - y0) / (x1 - x0);
            for (t, _) in &self.nodes {
                let x = x0 + (t - y0) / &slope;
                if &x > x0 && &x < x1 {
                    xs.insert(x);
                }
            }
        }
        let nodes = xs
            .into_iter()
            .map(|x| {
                let y = self.eval_in(&inner.eval_in(&x));
                (x, y)
            })
            .collect();
        PLMap { nodes: drop_collinear(nodes) }
    }

    /// Exact image of a set, with inclusivity tracked per monotone segment: a
    /// constant segment contributes a closed degenerate point; an open endpoint
    /// mapped by a strictly monotone segment stays open.
    pub fn image(&self, s: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for p in s.parts() {
            self.image_interval_into(p, &mut parts);
        }
        IntervalSet::from_parts(parts)
    }

    pub fn image_interval(&self, iv: &Interval) -> IntervalSet {
        let mut parts = Vec::new();
        self.image_interval_into(iv, &mut parts);
        IntervalSet::from_parts(parts)
    }

    fn image_interval_into(&self, iv: &Interval, out: &mut Vec<Interval>) {
        for w in self.nodes.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            // clip iv to the segment domain [x0,x1]; a clip at a breakpoint is
            // attained (breakpoints interior to iv belong to it)
            let (a, a_closed) = if iv.lo() > x0 {
                (iv.lo().clone(), iv.lo_closed())
            } else if iv.lo() == x0 {
                (x0.clone(), iv.lo_closed())
            } else {
                (x0.clone(), true)
            };
            let (b, b_closed) = if iv.hi() < x1 {
                (iv.hi().clone(), iv.hi_closed())
            } else if iv.hi() == x1 {
                (x1.clone(), iv.hi_closed())
            } else {
                (x1.clone(), true)
            };
            if a > b || (a == b && !(a_closed && b_closed)) {
                continue;
            }
            if y0 == y1 {
                out.push(Interval::point(y0.clone()));
                continue;
            }
            let va = self.segment_value(x0, y0, x1, y1, &a);
            let vb = self.segment_value(x0, y0, x1, y1, &b);
            let piece = if y1 > y0 {
                Interval::new(va, vb, a_closed, b_closed)
            } else {
                Interval::new(vb, va, b_closed, a_closed)
            };
            out.push(piece.expect("monotone segment image is non-empty"));
        }
    }

    fn segment_value(&self, x0: &Rat, y0: &Rat, x1: &Rat, y1: &Rat, x: &Rat) -> Rat {
        if x == x0 {
            y0.clone()
        } else if x == x1 {
            y1.clone()
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }

    /// Exact preimage as a finite union: piecewise inversion per segment;
    /// a constant segment contributes its whole domain piece when its value
    /// lies in `s`, nothing otherwise.
    pub fn preimage(&self, s: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for w in self.nodes.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if y0 == y1 {
                if s.contains_point(y0) {
                    parts.push(Interval::closed(x0.clone(), x1.clone()).unwrap());
                }
                continue;
            }
            let range = if y1 > y0 {
                Interval::closed(y0.clone(), y1.clone()).unwrap()
            } else {
                Interval::closed(y1.clone(), y0.clone()).unwrap()
            };
            let slope = (y1 - y0) / (x1 - x0);
            for p in s.parts() {
                let Some(q) = p.intersect(&range) else { continue };
                // pull back through the affine bijection; orientation flips for
                // a negative slope
                let xa = x0 + (q.lo() - y0) / &slope;
                let xb = x0 + (q.hi() - y0) / &slope;
                let piece = if slope.is_positive() {
                    Interval::new(xa, xb, q.lo_closed(), q.hi_closed())
                } else {
                    Interval::new(xb, xa, q.hi_closed(), q.lo_closed())
                };
                parts.push(piece.expect("preimage piece is non-empty"));
            }
        }
        IntervalSet::from_parts(parts)
    }

    /// Supremum metric `D(f,g) = sup |f−g|`. The difference is piecewise
    /// linear, so the supremum is attained at a node of the merged partition.
    pub fn sup_distance(&self, other: &PLMap) -> Rat {
        let xs: BTreeSet<&Rat> = self
            .nodes
            .iter()
            .map(|n| &n.0)
            .chain(other.nodes.iter().map(|n| &n.0))
            .collect();
        xs.into_iter()
            .map(|x| (self.eval_in(x) - other.eval_in(x)).abs())
            .max()
            .expect("maps have nodes")
    }

    /// Feeble openness: no segment of slope 0. A zero-slope piece crushes an
    /// open interval to a point; otherwise every open interval has a
    /// non-degenerate image interval.
    pub fn is_feeble_open(&self) -> bool {
        self.nodes.windows(2).all(|w| w[0].1 != w[1].1)
    }

    /// `image(self, iv) ⊆ iv`, inclusivity-exact.
    pub fn is_invariant(&self, iv: &Interval) -> bool {
        self.image_interval(iv).is_subset_of(&iv.clone().into())
    }

    /// The affine pieces as `(lo, hi, slope, intercept)` per segment.
    pub fn pieces(&self) -> Vec<(Rat, Rat, Rat, Rat)> {
        self.nodes
            .windows(2)
            .map(|w| {
                let (x0, y0) = &w[0];
                let (x1, y1) = &w[1];
                let slope = (y1 - y0) / (x1 - x0);
                let intercept = y0 - &slope * x0;
                (x0.clone(), x1.clone(), slope, intercept)
            })
            .collect()
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pl [")?;
        for (i, (x, y)) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "]")
    }
}
