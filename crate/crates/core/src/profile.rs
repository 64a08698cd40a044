//! Compactly supported piecewise polynomial profiles with exact calculus.

/// Dense polynomial `c[0] + c[1] s + c[2] s^2 + ...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 s`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    /// Antiderivative vanishing at `s = 0`.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Poly::new(out)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn powi(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Quintic on `[0, len]` matching value, slope and curvature at both ends.
    pub fn hermite5(len: f64, left: [f64; 3], right: [f64; 3]) -> Poly {
        let [v0, d0, c0] = left;
        let [v1, d1, c1] = right;
        let l = len;
        let dv = v1 - (v0 + d0 * l + 0.5 * c0 * l * l);
        let dd = d1 - (d0 + c0 * l);
        let dc = c1 - c0;
        let a3 = (10.0 * dv - 4.0 * dd * l + 0.5 * dc * l * l) / l.powi(3);
        let a4 = (-15.0 * dv + 7.0 * dd * l - dc * l * l) / l.powi(4);
        let a5 = (6.0 * dv - 3.0 * dd * l + 0.5 * dc * l * l) / l.powi(5);
        Poly::new(vec![v0, d0, 0.5 * c0, a3, a4, a5])
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Piece {
    start: f64,
    end: f64,
    /// In the local variable `s = x - start`.
    poly: Poly,
    d1: Poly,
    d2: Poly,
    anti: Poly,
    /// Integral of the profile over everything left of `start`.
    offset: f64,
}

/// Piecewise polynomial on contiguous intervals, identically zero outside them.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
    total: f64,
}

impl PiecewisePoly {
    pub fn zero() -> Self {
        Self { pieces: Vec::new(), total: 0.0 }
    }

    /// `knots` has one more entry than `polys`; each polynomial is written in
    /// the local variable measured from its left knot.
    pub fn new(knots: &[f64], polys: Vec<Poly>) -> Self {
        assert_eq!(knots.len(), polys.len() + 1, "one polynomial per interval");
        let mut offset = 0.0;
        let mut pieces = Vec::with_capacity(polys.len());
        for (k, poly) in polys.into_iter().enumerate() {
            let (start, end) = (knots[k], knots[k + 1]);
            assert!(end > start, "knots must increase");
            let anti = poly.antiderivative();
            let d1 = poly.derivative();
            let d2 = d1.derivative();
            let piece_integral = anti.eval(end - start);
            pieces.push(Piece { start, end, poly, d1, d2, anti, offset });
            offset += piece_integral;
        }
        Self { pieces, total: offset }
    }

    /// Single polynomial given in the global variable `x` on `[a, b]`.
    pub fn single_global(a: f64, b: f64, global: &Poly) -> Self {
        // Re-expand around `a`: substitute x = a + s.
        let shift = Poly::linear(a, 1.0);
        let local = global
            .coeffs()
            .iter()
            .enumerate()
            .fold(Poly::default(), |acc, (k, &c)| acc.add(&shift.powi(k as u32).scale(c)));
        Self::new(&[a, b], vec![local])
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.start, self.pieces.last()?.end))
    }

    fn locate(&self, x: f64) -> Option<&Piece> {
        let (lo, hi) = self.support()?;
        if x < lo || x > hi {
            return None;
        }
        let idx = self.pieces.partition_point(|p| p.end < x);
        self.pieces.get(idx.min(self.pieces.len() - 1))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.locate(x).map_or(0.0, |p| p.poly.eval(x - p.start))
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.locate(x).map_or(0.0, |p| p.d1.eval(x - p.start))
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.locate(x).map_or(0.0, |p| p.d2.eval(x - p.start))
    }

    /// `int_{-inf}^x` of the profile.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let Some((lo, hi)) = self.support() else { return 0.0 };
        if x <= lo {
            0.0
        } else if x >= hi {
            self.total
        } else {
            let p = self.locate(x).expect("inside support");
            p.offset + p.anti.eval(x - p.start)
        }
    }

    pub fn integral(&self) -> f64 {
        self.total
    }

    /// Sup norm of the derivative of the given order (0, 1 or 2), from dense sampling.
    pub fn sup_norm(&self, order: u8) -> f64 {
        let mut best: f64 = 0.0;
        for piece in &self.pieces {
            let poly = match order {
                0 => &piece.poly,
                1 => &piece.d1,
                _ => &piece.d2,
            };
            let len = piece.end - piece.start;
            const SAMPLES: usize = 4096;
            for k in 0..=SAMPLES {
                let s = len * k as f64 / SAMPLES as f64;
                best = best.max(poly.eval(s).abs());
            }
        }
        best
    }

    /// `int |profile|`, splitting each piece at sign changes.
    pub fn l1_norm(&self) -> f64 {
        let mut total = 0.0;
        for piece in &self.pieces {
            let len = piece.end - piece.start;
            const SAMPLES: usize = 2048;
            let mut cuts = vec![0.0];
            let mut prev = piece.poly.eval(0.0);
            for k in 1..=SAMPLES {
                let s = len * k as f64 / SAMPLES as f64;
                let v = piece.poly.eval(s);
                if prev * v < 0.0 {
                    cuts.push(bisect_root(&piece.poly, s - len / SAMPLES as f64, s));
                } else if v == 0.0 && prev != 0.0 && k < SAMPLES {
                    cuts.push(s);
                }
                prev = v;
            }
            cuts.push(len);
            for w in cuts.windows(2) {
                total += (piece.anti.eval(w[1]) - piece.anti.eval(w[0])).abs();
            }
        }
        total
    }
}

fn bisect_root(poly: &Poly, mut lo: f64, mut hi: f64) -> f64 {
    let flo = poly.eval(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (poly.eval(mid) * flo) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_matches_end_conditions() {
        let h = Poly::hermite5(0.7, [1.0, -2.0, 0.5], [0.3, 0.25, -1.0]);
        let (d, c) = (h.derivative(), h.derivative().derivative());
        assert_relative_eq!(h.eval(0.0), 1.0);
        assert_relative_eq!(d.eval(0.0), -2.0);
        assert_relative_eq!(c.eval(0.0), 0.5);
        assert_relative_eq!(h.eval(0.7), 0.3, epsilon = 1e-12);
        assert_relative_eq!(d.eval(0.7), 0.25, epsilon = 1e-12);
        assert_relative_eq!(c.eval(0.7), -1.0, epsilon = 1e-11);
    }

    #[test]
    fn global_to_local_expansion() {
        // (1 - x^2) on [-1, 1]
        let p = PiecewisePoly::single_global(-1.0, 1.0, &Poly::new(vec![1.0, 0.0, -1.0]));
        assert_relative_eq!(p.value(0.5), 0.75, epsilon = 1e-15);
        assert_relative_eq!(p.d1(0.5), -1.0, epsilon = 1e-15);
        assert_relative_eq!(p.d2(0.1), -2.0, epsilon = 1e-15);
        assert_relative_eq!(p.integral(), 4.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(p.antiderivative(0.0), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(p.value(1.5), 0.0);
        assert_eq!(p.antiderivative(7.0), p.integral());
    }

    #[test]
    fn l1_norm_splits_at_sign_changes() {
        // x on [-1, 1]: integral 0, L1 norm 1
        let p = PiecewisePoly::single_global(-1.0, 1.0, &Poly::linear(0.0, 1.0));
        assert!(p.integral().abs() < 1e-15);
        assert_relative_eq!(p.l1_norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.sup_norm(0), 1.0);
    }
}
