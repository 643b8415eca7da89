use std::collections::BinaryHeap;
use std::cmp::Ordering;

use super::{QuadratureError, QuadratureResult};

const L2: f64 = 0.358568582800318091990645153907937; // sqrt(9/70)
const L3: f64 = 0.948683298050513799599668063329816; // sqrt(9/10)
const L4: f64 = L3;
const L5: f64 = 0.688247201611685297721628734293737; // sqrt(9/19)

/// Axis-aligned box `center +- half`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRegion {
    pub center: [f64; 3],
    pub half: [f64; 3],
}

impl BoxRegion {
    pub fn from_bounds(lo: [f64; 3], hi: [f64; 3]) -> Self {
        let mut center = [0.0; 3];
        let mut half = [0.0; 3];
        for k in 0..3 {
            center[k] = 0.5 * (lo[k] + hi[k]);
            half[k] = 0.5 * (hi[k] - lo[k]);
        }
        BoxRegion { center, half }
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half[0] * self.half[1] * self.half[2]
    }

    fn point(&self, u: [f64; 3]) -> [f64; 3] {
        [
            self.center[0] + self.half[0] * u[0],
            self.center[1] + self.half[1] * u[1],
            self.center[2] + self.half[2] * u[2],
        ]
    }

    fn split(&self, axis: usize) -> (BoxRegion, BoxRegion) {
        let mut a = *self;
        let mut b = *self;
        a.half[axis] *= 0.5;
        b.half[axis] *= 0.5;
        a.center[axis] -= a.half[axis];
        b.center[axis] += b.half[axis];
        (a, b)
    }
}

/// The degree 7 Genz-Malik rule on one box in three dimensions, with its
/// embedded degree 5 rule. Returns `(I7, I5, split_axis)`; the axis has
/// the largest fourth divided difference.
pub fn genz_malik_rule(f: &mut impl FnMut([f64; 3]) -> f64, r: &BoxRegion) -> (f64, f64, usize) {
    const N: f64 = 3.0;
    let w1 = (12824.0 - 9120.0 * N + 400.0 * N * N) / 19683.0;
    let w2 = 980.0 / 6561.0;
    let w3 = (1820.0 - 400.0 * N) / 19683.0;
    let w4 = 200.0 / 19683.0;
    let w5 = 6859.0 / 19683.0 / 8.0;
    let v1 = (729.0 - 950.0 * N + 50.0 * N * N) / 729.0;
    let v2 = 245.0 / 486.0;
    let v3 = (265.0 - 100.0 * N) / 1458.0;
    let v4 = 25.0 / 729.0;

    let f0 = f(r.point([0.0; 3]));
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let mut best_axis = 0;
    let mut best_diff = -1.0;
    for k in 0..3 {
        let mut u = [0.0; 3];
        u[k] = L2;
        let a = f(r.point(u));
        u[k] = -L2;
        let b = f(r.point(u));
        u[k] = L3;
        let c = f(r.point(u));
        u[k] = -L3;
        let d = f(r.point(u));
        s2 += a + b;
        s3 += c + d;
        let diff = (a + b - 2.0 * f0 - (L2 * L2 / (L3 * L3)) * (c + d - 2.0 * f0)).abs();
        if diff > best_diff * (1.0 + 1e-12) {
            best_diff = diff;
            best_axis = k;
        }
    }
    let mut s4 = 0.0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut u = [0.0; 3];
                u[i] = si * L4;
                u[j] = sj * L4;
                s4 += f(r.point(u));
            }
        }
    }
    let mut s5 = 0.0;
    for mask in 0..8u32 {
        let sg = |bit: u32| if mask & (1 << bit) != 0 { -L5 } else { L5 };
        s5 += f(r.point([sg(0), sg(1), sg(2)]));
    }
    let vol = r.volume();
    let i7 = vol * (w1 * f0 + w2 * s2 + w3 * s3 + w4 * s4 + w5 * s5);
    let i5 = vol * (v1 * f0 + v2 * s2 + v3 * s3 + v4 * s4);
    (i7, i5, best_axis)
}

struct Region {
    bx: BoxRegion,
    value: f64,
    error: f64,
    axis: usize,
    seq: u64,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Globally adaptive Genz-Malik cubature over a box, bisecting the region
/// with the largest `|I7 - I5|` along its selected axis.
pub fn genz_malik(
    mut f: impl FnMut([f64; 3]) -> f64,
    region: BoxRegion,
    tol: f64,
    max_evaluations: u64,
) -> Result<QuadratureResult, QuadratureError> {
    const PER_RULE: u64 = 33;
    if region.half.iter().any(|h| !h.is_finite() || *h < 0.0) {
        return Err(QuadratureError::BadLimits);
    }
    if region.volume() == 0.0 {
        return Ok(QuadratureResult::ZERO);
    }
    let mut seq = 0u64;
    let mut evals = 0u64;
    let mut eval_region = |bx: BoxRegion, seq: u64, evals: &mut u64| {
        let (i7, i5, axis) = genz_malik_rule(&mut f, &bx);
        *evals += PER_RULE;
        Region { bx, value: i7, error: (i7 - i5).abs(), axis, seq }
    };
    let mut heap = BinaryHeap::new();
    heap.push(eval_region(region, seq, &mut evals));
    let mut total_err = heap.peek().map(|r| r.error).unwrap_or(0.0);
    while total_err > tol {
        if !total_err.is_finite() {
            return Err(QuadratureError::NonFinite);
        }
        if evals + 2 * PER_RULE > max_evaluations {
            let (value, error_estimate) = totals(&heap);
            return Err(QuadratureError::NotConverged { value, error_estimate, evaluations: evals });
        }
        let worst = heap.pop().expect("heap is never empty");
        let (a, b) = worst.bx.split(worst.axis);
        seq += 1;
        let ra = eval_region(a, seq, &mut evals);
        seq += 1;
        let rb = eval_region(b, seq, &mut evals);
        total_err += ra.error + rb.error - worst.error;
        heap.push(ra);
        heap.push(rb);
        if heap.len() % 1024 == 0 {
            // Refresh the running sum against drift.
            total_err = totals(&heap).1;
        }
    }
    let (value, error_estimate) = totals(&heap);
    if !value.is_finite() {
        return Err(QuadratureError::NonFinite);
    }
    Ok(QuadratureResult { value, error_estimate, evaluations: evals })
}

/// Sums in creation order so the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Region>) -> (f64, f64) {
    let mut v: Vec<&Region> = heap.iter().collect();
    v.sort_by_key(|r| r.seq);
    (v.iter().map(|r| r.value).sum(), v.iter().map(|r| r.error).sum())
}
