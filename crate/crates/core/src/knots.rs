//! Clamped knot vectors, span lookup and B-spline basis functions.

use crate::error::{GeomError, Result};

/// A clamped, non-decreasing knot vector for a given degree.
///
/// End knots repeat exactly `degree + 1` times and interior knots at most
/// `degree` times, so every curve built on it interpolates its end control
/// points and stays at least C⁰.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(GeomError::Form("degree must be at least 1".into()));
        }
        let order = degree + 1;
        if knots.len() < 2 * order {
            return Err(GeomError::Form(format!(
                "knot vector of degree {degree} needs at least {} knots, got {}",
                2 * order,
                knots.len()
            )));
        }
        if let Some(i) = knots.iter().position(|k| !k.is_finite()) {
            return Err(GeomError::Form(format!("knot {i} is not finite")));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] < w[0]) {
            return Err(GeomError::Form(format!(
                "knots must be non-decreasing (knot {} < knot {i})",
                i + 1
            )));
        }
        let first = knots[0];
        let last = knots[knots.len() - 1];
        if first >= last {
            return Err(GeomError::Form("knot vector spans an empty domain".into()));
        }
        let mut i = 0;
        while i < knots.len() {
            let mut j = i;
            while j < knots.len() && knots[j] == knots[i] {
                j += 1;
            }
            let multiplicity = j - i;
            let at_end = i == 0 || j == knots.len();
            if at_end && multiplicity != order {
                return Err(GeomError::Form(format!(
                    "end knot {} has multiplicity {multiplicity}, clamped form requires {order}",
                    knots[i]
                )));
            }
            if !at_end && multiplicity > degree {
                return Err(GeomError::Form(format!(
                    "interior knot {} has multiplicity {multiplicity} > degree {degree}",
                    knots[i]
                )));
            }
            i = j;
        }
        Ok(KnotVector { knots, degree })
    }

    /// Knot vector of a single Bézier segment over `[0, 1]`.
    pub fn bezier(degree: usize) -> Result<Self> {
        let mut knots = vec![0.0; degree + 1];
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        KnotVector::new(knots, degree)
    }

    /// Clamped knot vector with uniformly spaced interior knots on `[0, 1]`.
    pub fn uniform_clamped(control_count: usize, degree: usize) -> Result<Self> {
        if control_count < degree + 1 {
            return Err(GeomError::Form(format!(
                "{control_count} control points cannot carry degree {degree}"
            )));
        }
        let segments = control_count - degree;
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..segments).map(|i| i as f64 / segments as f64));
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        KnotVector::new(knots, degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Number of control points this knot vector supports.
    pub fn control_count(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// The valid parameter domain `[knots[p], knots[n]]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[self.degree], self.knots[self.control_count()])
    }

    /// Whether this is the single-segment `{0…0, 1…1}` layout.
    pub fn is_bezier(&self) -> bool {
        self.knots.len() == 2 * (self.degree + 1) && self.domain() == (0.0, 1.0)
    }

    pub fn check_parameter(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if t.is_nan() || t < lo || t > hi {
            return Err(GeomError::domain(t, (lo, hi)));
        }
        Ok(())
    }

    /// Index `k` of the knot span containing `t`.
    ///
    /// Spans are left-continuous: `t` equal to an interior knot belongs to the
    /// span ending there. The domain start maps to the first non-empty span.
    pub fn span(&self, t: f64) -> usize {
        let p = self.degree;
        let n = self.control_count();
        if t <= self.knots[p] {
            // first non-empty span starts at the last copy of the first knot
            return p;
        }
        // smallest k in [p, n-1] with t <= knots[k+1]
        let (mut lo, mut hi) = (p, n - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if t <= self.knots[mid + 1] {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Nonzero basis functions and their derivatives up to `order` at `t`
    /// on span `span`. Row `k` holds the k-th derivatives of
    /// `N[span-p..=span]`.
    pub(crate) fn basis_derivatives(&self, span: usize, t: f64, order: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let u = &self.knots;
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = t - u[span + 1 - j];
            right[j] = u[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; order + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=order.min(p) {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize) - 1 <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for (k, row) in ders.iter_mut().enumerate().take(order.min(p) + 1).skip(1) {
            for v in row.iter_mut() {
                *v *= factor;
            }
            factor *= (p - k) as f64;
        }
        ders
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unclamped_ends() {
        let err = KnotVector::new(vec![0.0, 0.0, 1.0, 2.0, 3.0, 3.0], 2).unwrap_err();
        assert!(matches!(err, GeomError::Form(_)));
    }

    #[test]
    fn rejects_excess_interior_multiplicity() {
        let k = vec![0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0];
        assert!(KnotVector::new(k, 2).is_err());
    }

    #[test]
    fn rejects_decreasing_knots() {
        let k = vec![0.0, 0.0, 0.6, 0.4, 1.0, 1.0];
        assert!(KnotVector::new(k, 1).is_err());
    }

    #[test]
    fn spans_are_left_continuous() {
        let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(kv.span(0.0), 2);
        assert_eq!(kv.span(0.25), 2);
        assert_eq!(kv.span(0.5), 2);
        assert_eq!(kv.span(0.75), 3);
        assert_eq!(kv.span(1.0), 3);
    }

    #[test]
    fn basis_is_a_partition_of_unity_with_zero_sum_derivatives() {
        let kv = KnotVector::new(
            vec![0.0, 0.0, 0.0, 0.0, 0.3, 0.5, 0.5, 0.8, 1.0, 1.0, 1.0, 1.0],
            3,
        )
        .unwrap();
        for i in 0..=50 {
            let t = i as f64 / 50.0;
            let ders = kv.basis_derivatives(kv.span(t), t, 2);
            assert!((ders[0].iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(ders[1].iter().sum::<f64>().abs() < 1e-11);
            assert!(ders[2].iter().sum::<f64>().abs() < 1e-9);
        }
    }

    #[test]
    fn bezier_layout() {
        let kv = KnotVector::bezier(3).unwrap();
        assert!(kv.is_bezier());
        assert_eq!(kv.control_count(), 4);
        assert_eq!(kv.domain(), (0.0, 1.0));
    }
}
