//! Globally adaptive Gauss–Kronrod (7, 15) integration.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
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
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Stopping rule for the adaptive routines.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-300,
            rel: 1e-13,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance {
            rel,
            ..Default::default()
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> Vec<Complex64>>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let n = fc.len();
    let mut k: Vec<Complex64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<Complex64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for i in 0..n {
            let s = f1[i] + f2[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let mut error = 0.0_f64;
    for i in 0..n {
        k[i] *= h;
        g[i] *= h;
        error = error.max((k[i] - g[i]).norm());
    }
    Segment {
        a,
        b,
        value: k,
        error,
    }
}

/// Integrate a vector-valued complex function over `[a, b]`, refining the
/// interval with the largest error estimate until the summed error drops
/// below `max(abs, rel · ‖I‖∞)`.
pub fn integrate_vec<F>(mut f: F, breaks: &[f64], tol: Tolerance) -> Vec<Complex64>
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    let mut segs: Vec<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&mut f, w[0], w[1]))
        .collect();
    if segs.is_empty() {
        return Vec::new();
    }
    let n = segs[0].value.len();
    let mut total = vec![Complex64::new(0.0, 0.0); n];
    let mut err = 0.0;
    let mut steps = 0usize;
    loop {
        if steps % 64 == 0 {
            // resum to keep the running totals free of drift
            total.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            err = 0.0;
            for s in &segs {
                for i in 0..n {
                    total[i] += s.value[i];
                }
                err += s.error;
            }
        }
        steps += 1;
        let scale = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if err <= tol.abs.max(tol.rel * scale) || segs.len() >= tol.max_intervals {
            if steps % 64 != 1 {
                steps = 0;
                continue;
            }
            return total;
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if !(m > s.a && m < s.b) {
            // cannot split further; accept what we have
            err -= s.error;
            segs.push(Segment { error: 0.0, ..s });
            continue;
        }
        let left = kronrod(&mut f, s.a, m);
        let right = kronrod(&mut f, m, s.b);
        for i in 0..n {
            total[i] += left.value[i] + right.value[i] - s.value[i];
        }
        err += left.error + right.error - s.error;
        segs.push(left);
        segs.push(right);
    }
}

/// Scalar complex integral over `[a, b]` with interior break points.
pub fn integrate_complex<F>(f: F, breaks: &[f64], tol: Tolerance) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    integrate_vec(|x| vec![f(x)], breaks, tol)[0]
}

/// Scalar real integral over `[a, b]` with interior break points.
pub fn integrate<F>(f: F, breaks: &[f64], tol: Tolerance) -> f64
where
    F: Fn(f64) -> f64,
{
    integrate_vec(|x| vec![Complex64::new(f(x), 0.0)], breaks, tol)[0].re
}
