//! Quadrature: adaptive Gauss–Kronrod for potential integrals and a fixed
//! Gauss–Legendre rule with its cumulative integration matrix for
//! integrals along a propagated Prüfer path.

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let fc = f(c);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        kron += T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integral of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let mut stack = vec![(a, b, tol, 0usize)];
    let mut total = T::zero();
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (val, err) = gk15(&mut f, lo, hi);
        if err <= t || depth >= 40 {
            total += val;
        } else {
            let mid = T::lit(0.5) * (lo + hi);
            let ht = T::lit(0.5) * t;
            stack.push((lo, mid, ht, depth + 1));
            stack.push((mid, hi, ht, depth + 1));
        }
    }
    total
}

/// Eight-point Gauss–Legendre nodes on `[-1, 1]`.
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
/// Eight-point Gauss–Legendre weights on `[-1, 1]`.
pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Gauss–Legendre rule on a reference interval together with the matrix
/// `S[i][j] = ∫_{-1}^{t_i} ℓ_j(t) dt`, so that `Σ_j S[i][j] g(t_j)` is the
/// running integral of the degree-7 interpolant of `g` up to node `t_i`.
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    pub nodes: [T; 8],
    pub weights: [T; 8],
    pub cumulative: [[T; 8]; 8],
}

impl<T: Real> GaussRule<T> {
    pub fn new() -> Self {
        let lagrange = |j: usize, t: f64| -> f64 {
            let mut p = 1.0;
            for m in 0..8 {
                if m != j {
                    p *= (t - GL8_NODES[m]) / (GL8_NODES[j] - GL8_NODES[m]);
                }
            }
            p
        };
        let mut cumulative = [[T::zero(); 8]; 8];
        for (i, row) in cumulative.iter_mut().enumerate() {
            let upper = GL8_NODES[i];
            let half = 0.5 * (upper + 1.0);
            for (j, entry) in row.iter_mut().enumerate() {
                // ℓ_j has degree 7, so the mapped 8-point rule is exact.
                let s: f64 = (0..8)
                    .map(|q| {
                        let t = -1.0 + half * (GL8_NODES[q] + 1.0);
                        GL8_WEIGHTS[q] * lagrange(j, t)
                    })
                    .sum();
                *entry = T::lit(s * half);
            }
        }
        Self {
            nodes: GL8_NODES.map(T::lit),
            weights: GL8_WEIGHTS.map(T::lit),
            cumulative,
        }
    }
}

impl<T: Real> Default for GaussRule<T> {
    fn default() -> Self {
        Self::new()
    }
}
