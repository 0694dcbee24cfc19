use proptest::prelude::*;
use screen_sampler::sampler::{
    owen_scramble, radical_inverse_bits, rank1_bits, rank1_point, shift_scramble, sobol_owen_bits,
    xor_scramble, GeneratorVector,
};
use screen_sampler::{Point2, SamplerKind, SamplerSpec, ScrambleTile};

fn unit() -> impl Strategy<Value = f64> {
    (0u32..=u32::MAX).prop_map(|b| f64::from(b) / 4_294_967_296.0)
}

fn point() -> impl Strategy<Value = Point2<f64>> {
    (unit(), unit()).prop_map(|(u, v)| Point2 { u, v })
}

fn generator() -> impl Strategy<Value = GeneratorVector> {
    (1u32..1 << 20, 0u32..1 << 20).prop_map(|(x, y)| GeneratorVector::new(x, 2 * y + 1).unwrap())
}

/// Torus distance of `a - b` from zero along one axis.
fn wrap_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

proptest! {
    #[test]
    fn shift_stays_in_unit_square(s in point(), u in point()) {
        let r = shift_scramble(s, u);
        prop_assert!(r.is_valid());
        prop_assert!(r.u < 1.0 && r.v < 1.0);
    }

    #[test]
    fn shift_preserves_difference_vectors(
        d in generator(),
        u in point(),
        i in 0u32..64,
        j in 0u32..64,
    ) {
        let (a, b): (Point2<f64>, Point2<f64>) = (rank1_point(i, d), rank1_point(j, d));
        let (sa, sb) = (shift_scramble(a, u), shift_scramble(b, u));
        prop_assert!((wrap_distance(a.u, b.u) - wrap_distance(sa.u, sb.u)).abs() < 1e-12);
        prop_assert!((wrap_distance(a.v, b.v) - wrap_distance(sa.v, sb.v)).abs() < 1e-12);
    }

    #[test]
    fn xor_is_an_involution(s in point(), u in point()) {
        let once = xor_scramble(s, u);
        prop_assert!(once.is_valid());
        prop_assert_eq!(xor_scramble(once, u), s);
    }

    #[test]
    fn rank1_first_component_is_stratified(d in generator().prop_filter("x odd", |d| d.components().0 % 2 == 1), m in 0u32..10) {
        let n = 1u32 << m;
        let mut seen = vec![false; n as usize];
        for k in 0..n {
            let (x, _) = rank1_bits(k, d);
            let cell = if m == 0 { 0 } else { (x >> (32 - m)) as usize };
            prop_assert!(!seen[cell]);
            seen[cell] = true;
        }
    }

    #[test]
    fn owen_sobol_is_stratified_for_any_seed(seed in any::<u64>(), m in 1u32..9) {
        let n = 1u32 << m;
        let mut x_seen = vec![false; n as usize];
        let mut y_seen = vec![false; n as usize];
        for k in 0..n {
            let (x, y) = sobol_owen_bits(k, seed);
            let (cx, cy) = ((x >> (32 - m)) as usize, (y >> (32 - m)) as usize);
            prop_assert!(!x_seen[cx] && !y_seen[cy]);
            x_seen[cx] = true;
            y_seen[cy] = true;
        }
    }

    #[test]
    fn owen_scramble_is_nested(bits in any::<u32>(), other in any::<u32>(), key in any::<u32>(), depth in 0u32..32) {
        // Values sharing their leading `depth` bits keep sharing them.
        let mask = if depth == 0 { 0 } else { u32::MAX << (32 - depth) };
        let b = (bits & mask) | (other & !mask);
        prop_assert_eq!(owen_scramble(bits, key) & mask, owen_scramble(b, key) & mask);
    }

    #[test]
    fn samples_are_pure_and_in_range(
        kind in prop_oneof![Just(SamplerKind::Rank1), Just(SamplerKind::SobolOwenXor), Just(SamplerKind::WhiteNoise)],
        seed in any::<u64>(),
        i in -100i64..100,
        j in -100i64..100,
        k in 0u32..256,
        pair in 0usize..3,
    ) {
        let tile = ScrambleTile::<f64>::random(8, 4, seed ^ 1).unwrap();
        let spec = SamplerSpec::new(kind, 16, seed).with_pairs(3);
        let a = spec.sample(&tile, (i, j), k, pair).unwrap();
        prop_assert!(a.is_valid());
        prop_assert_eq!(a, spec.sample(&tile, (i, j), k, pair).unwrap());
        if kind.uses_tile() {
            prop_assert_eq!(a, spec.sample(&tile, (i + 8, j - 4), k, pair).unwrap());
        }
    }

    #[test]
    fn tile_round_trips_through_bytes(w in 0u32..5, h in 0u32..5, seed in any::<u64>()) {
        let tile = ScrambleTile::<f64>::random(1 << w, 1 << h, seed).unwrap();
        let back = ScrambleTile::<f64>::from_bytes(&tile.to_bytes()).unwrap();
        prop_assert_eq!(back, tile);
    }
}

#[test]
fn van_der_corput_is_bit_reversal() {
    for k in [0u32, 1, 2, 3, 5, 0x8000_0000, 0xdead_beef] {
        assert_eq!(radical_inverse_bits(k), k.reverse_bits());
    }
}
