//! Single-step kernels: Dormand-Prince 5(4) and an L-stable SDIRK of order 4(3).

use super::OdeSystem;
use crate::linalg::{identity, Lu};

pub(crate) fn err_norm<const N: usize>(
    e: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    tol: f64,
) -> f64 {
    let s: f64 = (0..N)
        .map(|i| {
            let sk = tol + tol * y0[i].abs().max(y1[i].abs());
            (e[i] / sk).powi(2)
        })
        .sum();
    (s / N as f64).sqrt()
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for &(c, k) in terms {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Outcome of one trial step.
pub(crate) struct Trial<const N: usize> {
    pub y1: [f64; N],
    /// Slope at the end of the step (for Hermite interpolation).
    pub f1: [f64; N],
    /// Error estimate, already weighted; accept if `<= 1`.
    pub err: f64,
}

pub(crate) fn dopri5<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    y0: &[f64; N],
    k1: &[f64; N],
    h: f64,
    tol: f64,
) -> Trial<N> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = B1 - 5179.0 / 57600.0;
    const E3: f64 = B3 - 7571.0 / 16695.0;
    const E4: f64 = B4 - 393.0 / 640.0;
    const E5: f64 = B5 - (-92097.0 / 339200.0);
    const E6: f64 = B6 - 187.0 / 2100.0;
    const E7: f64 = -1.0 / 40.0;

    let k2 = sys.rhs(&axpy(y0, h, &[(A21, k1)]));
    let k3 = sys.rhs(&axpy(y0, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(&axpy(y0, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(&axpy(
        y0,
        h,
        &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)],
    ));
    let k6 = sys.rhs(&axpy(
        y0,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ));
    let y1 = axpy(
        y0,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = sys.rhs(&y1);
    let e = axpy(
        &[0.0; N],
        h,
        &[
            (E1, k1),
            (E3, &k3),
            (E4, &k4),
            (E5, &k5),
            (E6, &k6),
            (E7, &k7),
        ],
    );
    let err = if y1.iter().all(|v| v.is_finite()) {
        err_norm(&e, y0, &y1, tol)
    } else {
        f64::INFINITY
    };
    Trial { y1, f1: k7, err }
}

const GAMMA: f64 = 0.25;
const SD_A: [[f64; 4]; 5] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.5, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0],
];
const SD_BHAT: [f64; 5] = [59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0];

/// Stage solve failed to converge.
pub(crate) struct NewtonFailure;

pub(crate) fn sdirk4<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    y0: &[f64; N],
    f0: &[f64; N],
    h: f64,
    tol: f64,
) -> Result<Trial<N>, NewtonFailure> {
    let hg = h * GAMMA;
    let mut k = [[0.0; N]; 5];
    let mut z = *y0;
    for i in 0..5 {
        let mut base = *y0;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = SD_A[i][j];
            for m in 0..N {
                base[m] += h * a * kj[m];
            }
        }
        // predictor: continue the previous slope
        let slope = if i == 0 { *f0 } else { k[i - 1] };
        for m in 0..N {
            z[m] = base[m] + hg * slope[m];
        }
        z = newton_stage(sys, &base, z, hg, tol)?;
        for m in 0..N {
            k[i][m] = (z[m] - base[m]) / hg;
        }
    }
    let y1 = z;
    let mut e = [0.0; N];
    for (i, ki) in k.iter().enumerate() {
        let b = if i < 4 { SD_A[4][i] } else { GAMMA };
        let d = b - SD_BHAT[i];
        for m in 0..N {
            e[m] += h * d * ki[m];
        }
    }
    // filter the estimate through (I - h gamma J) so it stays bounded for stiff components
    let mut m = identity::<N>();
    let j0 = sys.jac(y0);
    for r in 0..N {
        for c in 0..N {
            m[r][c] -= hg * j0[r][c];
        }
    }
    let e = match Lu::new(m) {
        Some(lu) => lu.solve(&e),
        None => e,
    };
    let err = if y1.iter().all(|v| v.is_finite()) {
        err_norm(&e, y0, &y1, tol)
    } else {
        f64::INFINITY
    };
    Ok(Trial { y1, f1: k[4], err })
}

fn newton_stage<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    base: &[f64; N],
    mut z: [f64; N],
    hg: f64,
    tol: f64,
) -> Result<[f64; N], NewtonFailure> {
    let mut prev = f64::INFINITY;
    for _ in 0..12 {
        let f = sys.rhs(&z);
        let j = sys.jac(&z);
        let mut m = identity::<N>();
        let mut r = [0.0; N];
        for a in 0..N {
            r[a] = -(z[a] - base[a] - hg * f[a]);
            for b in 0..N {
                m[a][b] -= hg * j[a][b];
            }
        }
        let lu = Lu::new(m).ok_or(NewtonFailure)?;
        let dz = lu.solve(&r);
        for a in 0..N {
            z[a] += dz[a];
        }
        let size = err_norm(&dz, &z, &z, tol);
        if !size.is_finite() {
            return Err(NewtonFailure);
        }
        if size < 1e-3 {
            return Ok(z);
        }
        if size > 2.0 * prev && size > 1.0 {
            return Err(NewtonFailure);
        }
        prev = size;
    }
    Err(NewtonFailure)
}
