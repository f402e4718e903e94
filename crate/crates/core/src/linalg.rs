//! Small dense linear algebra on fixed-size arrays.

pub(crate) fn identity<const N: usize>() -> [[f64; N]; N] {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

/// LU factorization with partial pivoting. `None` if singular.
#[derive(Debug, Clone)]
pub(crate) struct Lu<const N: usize> {
    lu: [[f64; N]; N],
    piv: [usize; N],
}

impl<const N: usize> Lu<N> {
    pub fn new(mut a: [[f64; N]; N]) -> Option<Self> {
        let mut piv = [0usize; N];
        for (i, p) in piv.iter_mut().enumerate() {
            *p = i;
        }
        for k in 0..N {
            let (p, max) = (k..N)
                .map(|i| (i, a[i][k].abs()))
                .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if !(max > 0.0) || !max.is_finite() {
                return None;
            }
            a.swap(k, p);
            piv.swap(k, p);
            for i in k + 1..N {
                let l = a[i][k] / a[k][k];
                a[i][k] = l;
                for j in k + 1..N {
                    a[i][j] -= l * a[k][j];
                }
            }
        }
        Some(Self { lu: a, piv })
    }

    pub fn solve(&self, b: &[f64; N]) -> [f64; N] {
        let mut x = [0.0; N];
        for i in 0..N {
            x[i] = b[self.piv[i]];
        }
        for i in 0..N {
            for j in 0..i {
                x[i] -= self.lu[i][j] * x[j];
            }
        }
        for i in (0..N).rev() {
            for j in i + 1..N {
                x[i] -= self.lu[i][j] * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves() {
        let a = [
            [0.0, 2.0, 1.0, 0.5],
            [1.0, 1.0, 0.0, 2.0],
            [3.0, -1.0, 2.0, 0.0],
            [0.5, 0.0, 1.0, 4.0],
        ];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        for i in 0..4 {
            b[i] = (0..4).map(|j| a[i][j] * x[j]).sum();
        }
        let got = Lu::new(a).unwrap().solve(&b);
        for i in 0..4 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
        assert!(Lu::new([[1.0, 2.0], [2.0, 4.0]]).is_none());
    }
}
