//! Test integrands with exact reference integrals.
//!
//! The optimizer only ever sees randomly oriented Heavisides. Smooth
//! Gaussian bumps and a two-pair product of Heavisides exist for evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sampler::Point2;
use crate::scalar::{count, lit, Real};

/// A function on `([0,1)²)^pairs` with a known integral.
pub trait Integrand<T: Real>: Clone + Send + Sync {
    /// Number of 2D dimension pairs consumed per sample.
    fn pairs(&self) -> usize {
        1
    }

    /// Evaluates at one sample; `x.len() == self.pairs()`.
    fn eval(&self, x: &[Point2<T>]) -> T;

    /// Exact integral over the whole domain.
    fn reference(&self) -> T;
}

/// Indicator of the half-plane `dot(x - anchor, normal) >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeavisideIntegrand<T> {
    pub anchor: (T, T),
    pub normal: (T, T),
}

impl<T: Real> HeavisideIntegrand<T> {
    /// `angle` is the orientation of the normal in radians.
    pub fn new(anchor: (T, T), angle: T) -> Self {
        Self {
            anchor,
            normal: (angle.cos(), angle.sin()),
        }
    }

    /// Uses `normal` as given; callers are responsible for unit length.
    pub fn with_normal(anchor: (T, T), normal: (T, T)) -> Self {
        Self { anchor, normal }
    }

    #[inline]
    fn side(&self, u: T, v: T) -> T {
        (u - self.anchor.0) * self.normal.0 + (v - self.anchor.1) * self.normal.1
    }

    #[inline]
    pub fn eval_point(&self, x: Point2<T>) -> T {
        if self.side(x.u, x.v) >= T::zero() {
            T::one()
        } else {
            T::zero()
        }
    }

    /// The complementary half-plane.
    pub fn flipped(&self) -> Self {
        Self {
            anchor: self.anchor,
            normal: (-self.normal.0, -self.normal.1),
        }
    }

    /// Area of the unit square on the positive side, by clipping the square
    /// against the half-plane and taking the polygon area.
    pub fn exact_reference(&self) -> T {
        let corners = [
            (T::zero(), T::zero()),
            (T::one(), T::zero()),
            (T::one(), T::one()),
            (T::zero(), T::one()),
        ];
        let mut poly: Vec<(T, T)> = Vec::with_capacity(5);
        for i in 0..4 {
            let p = corners[i];
            let q = corners[(i + 1) % 4];
            let gp = self.side(p.0, p.1);
            let gq = self.side(q.0, q.1);
            if gp >= T::zero() {
                poly.push(p);
            }
            if (gp >= T::zero()) != (gq >= T::zero()) {
                let t = gp / (gp - gq);
                poly.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
        polygon_area(&poly)
    }
}

fn polygon_area<T: Real>(poly: &[(T, T)]) -> T {
    if poly.len() < 3 {
        return T::zero();
    }
    let twice: T = (0..poly.len())
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    (twice * lit(0.5)).abs()
}

impl<T: Real> Integrand<T> for HeavisideIntegrand<T> {
    #[inline]
    fn eval(&self, x: &[Point2<T>]) -> T {
        self.eval_point(x[0])
    }

    fn reference(&self) -> T {
        self.exact_reference()
    }
}

/// Isotropic Gaussian bump `exp(-|x - c|² / (2 w²))` on the unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpIntegrand<T> {
    pub center: (T, T),
    pub width: T,
}

impl<T: Real> BumpIntegrand<T> {
    fn axis_integral(c: f64, w: f64) -> f64 {
        let s = w * std::f64::consts::SQRT_2;
        w * (std::f64::consts::PI / 2.0).sqrt() * (libm::erf((1.0 - c) / s) + libm::erf(c / s))
    }
}

impl<T: Real> Integrand<T> for BumpIntegrand<T> {
    #[inline]
    fn eval(&self, x: &[Point2<T>]) -> T {
        let du = x[0].u - self.center.0;
        let dv = x[0].v - self.center.1;
        (-(du * du + dv * dv) / (lit::<T>(2.0) * self.width * self.width)).exp()
    }

    /// Separable product of two error-function integrals.
    fn reference(&self) -> T {
        let w = self.width.to_f64().unwrap();
        let cx = self.center.0.to_f64().unwrap();
        let cy = self.center.1.to_f64().unwrap();
        lit(Self::axis_integral(cx, w) * Self::axis_integral(cy, w))
    }
}

/// Four-dimensional product of Heavisides: one on pair 0, one on pair 1.
///
/// With `second == None` the second factor is the constant 1 but the pair is
/// still consumed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductIntegrand<T> {
    pub first: HeavisideIntegrand<T>,
    pub second: Option<HeavisideIntegrand<T>>,
}

impl<T: Real> Integrand<T> for ProductIntegrand<T> {
    fn pairs(&self) -> usize {
        2
    }

    #[inline]
    fn eval(&self, x: &[Point2<T>]) -> T {
        let a = self.first.eval_point(x[0]);
        match &self.second {
            Some(h) => a * h.eval_point(x[1]),
            None => a,
        }
    }

    fn reference(&self) -> T {
        let a = self.first.exact_reference();
        match &self.second {
            Some(h) => a * h.exact_reference(),
            None => a,
        }
    }
}

/// A fixed set of integrands together with their exact integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrandBank<T, F = HeavisideIntegrand<T>> {
    integrands: Vec<F>,
    references: Vec<T>,
    seed: u64,
}

pub type HeavisideBank<T> = IntegrandBank<T, HeavisideIntegrand<T>>;
pub type BumpBank<T> = IntegrandBank<T, BumpIntegrand<T>>;
pub type ProductBank<T> = IntegrandBank<T, ProductIntegrand<T>>;

impl<T: Real, F: Integrand<T>> IntegrandBank<T, F> {
    pub fn from_integrands(integrands: Vec<F>, seed: u64) -> Result<Self> {
        let Some(first) = integrands.first() else {
            return Err(Error::InvalidConfig(
                "integrand bank must not be empty".into(),
            ));
        };
        let pairs = first.pairs();
        if integrands.iter().any(|f| f.pairs() != pairs) {
            return Err(Error::DimensionMismatch(
                "all integrands in a bank must consume the same number of pairs".into(),
            ));
        }
        let references = integrands.iter().map(F::reference).collect();
        Ok(Self {
            integrands,
            references,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.integrands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.integrands.is_empty()
    }

    pub fn pairs(&self) -> usize {
        self.integrands[0].pairs()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn integrands(&self) -> &[F] {
        &self.integrands
    }

    pub fn references(&self) -> &[T] {
        &self.references
    }

    /// Monte-Carlo estimates of every integrand, written into `out`.
    ///
    /// `samples` is sample-major with `self.pairs()` points per sample.
    pub fn estimate_into(&self, samples: &[Point2<T>], out: &mut [T]) -> Result<()> {
        let pairs = self.pairs();
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        if samples.len() % pairs != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} points do not split into samples of {pairs} pair(s)",
                samples.len()
            )));
        }
        if out.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "output holds {} estimates for {} integrands",
                out.len(),
                self.len()
            )));
        }
        let n = count::<T>(samples.len() / pairs);
        for (f, o) in self.integrands.iter().zip(out.iter_mut()) {
            let total: T = samples.chunks_exact(pairs).map(|x| f.eval(x)).sum();
            *o = total / n;
        }
        Ok(())
    }

    /// Vector of Monte-Carlo estimates, one per integrand.
    pub fn estimate_vector(&self, samples: &[Point2<T>]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.len()];
        self.estimate_into(samples, &mut out)?;
        Ok(out)
    }
}

fn check_count(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::InvalidConfig(
            "integrand count must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

fn random_heaviside<T: Real>(rng: &mut ChaCha8Rng) -> HeavisideIntegrand<T> {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    HeavisideIntegrand::with_normal((lit(u), lit(v)), (lit(angle.cos()), lit(angle.sin())))
}

/// `m` Heavisides with anchors uniform on the unit square and normals
/// uniform on the circle, all drawn from `seed`.
pub fn make_bank<T: Real>(m: usize, seed: u64) -> Result<HeavisideBank<T>> {
    check_count(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs = (0..m).map(|_| random_heaviside(&mut rng)).collect();
    IntegrandBank::from_integrands(fs, seed)
}

/// Smallest and largest bump width.
pub const BUMP_WIDTH_RANGE: (f64, f64) = (0.1, 0.3);

/// `m` Gaussian bumps with centers uniform on the unit square and widths
/// uniform in [`BUMP_WIDTH_RANGE`].
pub fn make_bump_bank<T: Real>(m: usize, seed: u64) -> Result<BumpBank<T>> {
    check_count(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6275_6d70);
    let fs = (0..m)
        .map(|_| {
            let cx: f64 = rng.gen();
            let cy: f64 = rng.gen();
            let w = rng.gen_range(BUMP_WIDTH_RANGE.0..BUMP_WIDTH_RANGE.1);
            BumpIntegrand {
                center: (lit(cx), lit(cy)),
                width: lit(w),
            }
        })
        .collect();
    IntegrandBank::from_integrands(fs, seed)
}

/// `m` two-pair products of independent random Heavisides.
pub fn make_product_bank<T: Real>(m: usize, seed: u64) -> Result<ProductBank<T>> {
    check_count(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7072_6f64);
    let fs = (0..m)
        .map(|_| ProductIntegrand {
            first: random_heaviside(&mut rng),
            second: Some(random_heaviside(&mut rng)),
        })
        .collect();
    IntegrandBank::from_integrands(fs, seed)
}

/// Lifts a Heaviside bank to two pairs with a constant second factor.
pub fn lift_to_product<T: Real>(bank: &HeavisideBank<T>) -> ProductBank<T> {
    let fs = bank
        .integrands()
        .iter()
        .map(|&first| ProductIntegrand {
            first,
            second: None,
        })
        .collect();
    IntegrandBank::from_integrands(fs, bank.seed()).expect("nonempty bank")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(anchor: (f64, f64), normal: (f64, f64)) -> HeavisideIntegrand<f64> {
        HeavisideIntegrand::with_normal(anchor, normal)
    }

    fn p(u: f64, v: f64) -> Point2<f64> {
        Point2 { u, v }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(h((0.5, 0.5), (1.0, 0.0)).eval(&[p(0.75, 0.1)]), 1.0);
        assert_eq!(h((0.5, 0.5), (1.0, 0.0)).eval(&[p(0.5, 0.5)]), 1.0);
        assert_eq!(h((0.5, 0.5), (0.0, 1.0)).eval(&[p(0.9, 0.2)]), 0.0);
    }

    #[test]
    fn reference_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h((0.5, 0.5), (1.0, 0.0)).exact_reference() - 0.5).abs() < 1e-12);
        assert!((h((0.5, 0.5), (r, r)).exact_reference() - 0.5).abs() < 1e-12);
        assert!((h((0.25, 0.25), (r, r)).exact_reference() - 0.875).abs() < 1e-12);
        // Line misses the square entirely.
        assert_eq!(h((2.0, 0.5), (1.0, 0.0)).exact_reference(), 0.0);
        assert!((h((-1.0, 0.5), (1.0, 0.0)).exact_reference() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bank_shape_and_determinism() {
        let bank = make_bank::<f64>(1, 77).unwrap();
        assert_eq!(bank.len(), 1);
        let f = bank.integrands()[0];
        assert!((f.normal.0.hypot(f.normal.1) - 1.0).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&bank.references()[0]));
        assert_eq!(
            make_bank::<f64>(32, 5).unwrap(),
            make_bank::<f64>(32, 5).unwrap()
        );
        assert_ne!(
            make_bank::<f64>(32, 5).unwrap(),
            make_bank::<f64>(32, 6).unwrap()
        );
        assert!(make_bank::<f64>(0, 1).is_err());
    }

    #[test]
    fn reference_mean_near_half() {
        // Reflecting the normal maps the construction onto itself, so the
        // expected reference is exactly 1/2.
        let mut means = Vec::new();
        for seed in 0..16 {
            let bank = make_bank::<f64>(64, seed).unwrap();
            let mean = bank.references().iter().sum::<f64>() / 64.0;
            assert!((mean - 0.5).abs() < 0.1, "seed {seed}: {mean}");
            means.push(mean);
        }
        let overall = means.iter().sum::<f64>() / means.len() as f64;
        assert!((overall - 0.5).abs() < 0.05);
    }

    #[test]
    fn estimate_examples() {
        let bank = IntegrandBank::from_integrands(vec![h((0.5, 0.5), (1.0, 0.0))], 0).unwrap();
        assert_eq!(bank.estimate_vector(&[p(0.75, 0.3)]).unwrap(), vec![1.0]);
        assert!(matches!(
            bank.estimate_vector(&[]),
            Err(Error::EmptySamples)
        ));
        // A 16-point stratified set has 8 points on each side of u = 0.5.
        let pts: Vec<Point2<f64>> = (0..16u32)
            .map(|k| crate::sampler::rank1_point(k, Default::default()))
            .collect();
        let brute = pts.iter().filter(|x| x.u >= 0.5).count() as f64 / 16.0;
        assert_eq!(brute, 0.5);
        assert_eq!(bank.estimate_vector(&pts).unwrap(), vec![brute]);
    }

    #[test]
    fn bump_references_in_open_unit_interval() {
        let bank = make_bump_bank::<f64>(64, 3).unwrap();
        for &r in bank.references() {
            assert!(r > 0.0 && r < 1.0);
        }
    }

    /// Bump reference against a 1024² midpoint rule.
    #[test]
    fn bump_reference_quadrature() {
        let bank = make_bump_bank::<f64>(8, 4).unwrap();
        let n = 1024;
        for (f, &r) in bank.integrands().iter().zip(bank.references()) {
            let mut acc = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let x = p((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                    acc += f.eval(&[x]);
                }
            }
            acc /= (n * n) as f64;
            assert!((acc - r).abs() < 1e-6, "{acc} vs {r}");
        }
    }

    #[test]
    fn product_reference_and_degenerate_lift() {
        let bank = make_product_bank::<f64>(8, 1).unwrap();
        for f in bank.integrands() {
            let expected = f.first.exact_reference() * f.second.unwrap().exact_reference();
            assert_eq!(f.reference(), expected);
        }
        let base = make_bank::<f64>(4, 2).unwrap();
        let lifted = lift_to_product(&base);
        assert_eq!(lifted.references(), base.references());
        assert_eq!(lifted.pairs(), 2);
        assert!(lifted.estimate_vector(&[p(0.1, 0.1)]).is_err());
    }
}
