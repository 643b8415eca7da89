use std::cell::{Cell, RefCell};

use super::{QuadratureError, QuadratureResult};
use crate::bump::Interval;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Accept when `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0, max_intervals: 4000 }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel = rel;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
pub fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    let mut resabs = WGK[7] * fc.abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
        resabs += WGK[j] * (fv1[j].abs() + fv2[j].abs());
    }
    let result = resk * half;
    resasc *= half.abs();
    resabs *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive GK15 on `[a, b]`.
pub fn integrate(
    f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<QuadratureResult, QuadratureError> {
    integrate_with_breakpoints(f, &[a, b], tol)
}

/// Globally adaptive GK15 over consecutive `points`, never straddling an
/// interior point. Bisects the panel with the largest error until the total
/// error meets `tol`.
pub fn integrate_with_breakpoints(
    mut f: impl FnMut(f64) -> f64,
    points: &[f64],
    tol: Tolerance,
) -> Result<QuadratureResult, QuadratureError> {
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] < w[0]) {
        return Err(QuadratureError::BadLimits);
    }
    let evals = Cell::new(0u64);
    let mut counted = |x: f64| {
        evals.set(evals.get() + 1);
        f(x)
    };
    let mut panels: Vec<Panel> = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(&mut counted, w[0], w[1]);
            panels.push(Panel { a: w[0], b: w[1], value, error });
        }
    }
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(QuadratureError::NonFinite);
        }
        if error <= tol.target(value) {
            return Ok(QuadratureResult { value, error_estimate: error, evaluations: evals.get() });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = &panels[worst];
        let mid = 0.5 * (p.a + p.b);
        let too_narrow = mid <= p.a || mid >= p.b || (p.b - p.a) < 64.0 * f64::EPSILON * p.a.abs().max(p.b.abs());
        if panels.len() >= tol.max_intervals || too_narrow {
            return Err(QuadratureError::NotConverged {
                value,
                error_estimate: error,
                evaluations: evals.get(),
            });
        }
        let (a, b) = (p.a, p.b);
        let (v1, e1) = gk15(&mut counted, a, mid);
        let (v2, e2) = gk15(&mut counted, mid, b);
        panels[worst] = Panel { a, b: mid, value: v1, error: e1 };
        panels.insert(worst + 1, Panel { a: mid, b, value: v2, error: e2 });
    }
}

/// Iterated integral of `f(x, y, z)` over `x in xr`, `y in yr(x)`,
/// `z in zr(x, y)`. Empty inner ranges contribute zero.
///
/// The reported error is `E_x + |xr| * max(E_y + |yr| * max E_z)`, which
/// bounds the true error whenever each level's estimate does.
pub fn nested3(
    xr: Interval,
    yr: impl Fn(f64) -> Option<Interval>,
    zr: impl Fn(f64, f64) -> Option<Interval>,
    f: impl Fn(f64, f64, f64) -> f64,
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    let lx = xr.width().max(0.0);
    if lx == 0.0 {
        return Ok(QuadratureResult::ZERO);
    }
    let ly = (0..=8)
        .filter_map(|k| yr(xr.lo + lx * k as f64 / 8.0))
        .map(|i| i.width())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut scale = 1.0;
    let mut last = None;
    for _ in 0..4 {
        let res = nested3_once(xr, &yr, &zr, &f, tol * scale, lx, ly)?;
        if res.error_estimate <= tol {
            return Ok(res);
        }
        last = Some(res);
        scale *= 0.1;
    }
    let r = last.expect("loop runs at least once");
    Err(QuadratureError::NotConverged {
        value: r.value,
        error_estimate: r.error_estimate,
        evaluations: r.evaluations,
    })
}

fn nested3_once(
    xr: Interval,
    yr: &impl Fn(f64) -> Option<Interval>,
    zr: &impl Fn(f64, f64) -> Option<Interval>,
    f: &impl Fn(f64, f64, f64) -> f64,
    tol: f64,
    lx: f64,
    ly: f64,
) -> Result<QuadratureResult, QuadratureError> {
    let tol_x = tol / 3.0;
    let tol_y = tol / (3.0 * lx);
    let tol_z = tol / (3.0 * lx * ly);
    let failure: RefCell<Option<QuadratureError>> = RefCell::new(None);
    let evals = Cell::new(0u64);
    let max_mid_err = Cell::new(0.0f64);

    let outer = integrate(
        |x| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            let Some(yi) = yr(x).filter(|i| i.hi > i.lo) else { return 0.0 };
            let max_inner = Cell::new(0.0f64);
            let mid = integrate(
                |y| {
                    if failure.borrow().is_some() {
                        return 0.0;
                    }
                    let Some(zi) = zr(x, y).filter(|i| i.hi > i.lo) else { return 0.0 };
                    match integrate(|z| f(x, y, z), zi.lo, zi.hi, Tolerance::absolute(tol_z)) {
                        Ok(r) => {
                            evals.set(evals.get() + r.evaluations);
                            max_inner.set(max_inner.get().max(r.error_estimate));
                            r.value
                        }
                        Err(e) => {
                            *failure.borrow_mut() = Some(e);
                            0.0
                        }
                    }
                },
                yi.lo,
                yi.hi,
                Tolerance::absolute(tol_y),
            );
            match mid {
                Ok(r) => {
                    let err = r.error_estimate + yi.width() * max_inner.get();
                    max_mid_err.set(max_mid_err.get().max(err));
                    r.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        xr.lo,
        xr.hi,
        Tolerance::absolute(tol_x),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadratureResult {
        value: outer.value,
        error_estimate: outer.error_estimate + lx * max_mid_err.get(),
        evaluations: evals.get(),
    })
}
