use crate::scalar::Scalar;

/// Row-major dense square matrix.
#[derive(Debug, Clone)]
pub(crate) struct Dense<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: T) {
        let n = self.n;
        self.data[r * n + c] = self.data[r * n + c] + v;
    }

    /// Solves `self · x = rhs` in place by Gaussian elimination with partial
    /// pivoting. On a (numerically) singular system returns the index of the
    /// first unknown that could not be eliminated.
    pub fn solve(mut self, mut rhs: Vec<T>) -> Result<Vec<T>, usize> {
        let n = self.n;
        let scale = self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tiny = scale * T::epsilon();
        let a = &mut self.data;
        for k in 0..n {
            let (piv, max) = (k..n)
                .map(|r| (r, a[r * n + k].abs()))
                .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(max > tiny) {
                return Err(k);
            }
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                rhs.swap(k, piv);
            }
            let d = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] / d;
                if f == T::zero() {
                    continue;
                }
                for c in k..n {
                    a[r * n + c] = a[r * n + c] - f * a[k * n + c];
                }
                rhs[r] = rhs[r] - f * rhs[k];
            }
        }
        let mut x = vec![T::zero(); n];
        for k in (0..n).rev() {
            let mut s = rhs[k];
            for c in k + 1..n {
                s = s - a[k * n + c] * x[c];
            }
            x[k] = s / a[k * n + k];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 1; 1 3] x = [3; 5] -> x = [0.8, 1.4]
        let mut m = Dense::<f64>::zeros(2);
        m.add(0, 0, 2.0);
        m.add(0, 1, 1.0);
        m.add(1, 0, 1.0);
        m.add(1, 1, 3.0);
        let x = m.solve(vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn pivots_on_zero_diagonal() {
        let mut m = Dense::<f64>::zeros(2);
        m.add(0, 1, 1.0);
        m.add(1, 0, 1.0);
        assert_eq!(m.solve(vec![2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    }

    #[test]
    fn reports_singular_column() {
        let mut m = Dense::<f64>::zeros(3);
        m.add(0, 0, 1.0);
        m.add(2, 2, 1.0);
        assert_eq!(m.solve(vec![0.0; 3]).unwrap_err(), 1);
    }
}
