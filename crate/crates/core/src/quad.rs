//! Fixed 16-node Gauss-Legendre rule, used by the quadrature overlap
//! backend and the detection-filter integrals.

use crate::Real;

/// Positive abscissas and weights of the 16-node rule on [-1, 1], at full
/// published precision.
#[allow(clippy::excessive_precision)]
const HALF_RULE: [(f64, f64); 8] = [
    (0.095_012_509_837_637_440_185, 0.189_450_610_455_068_496_285),
    (0.281_603_550_779_258_913_230, 0.182_603_415_044_923_588_867),
    (0.458_016_777_657_227_386_342, 0.169_156_519_395_002_538_189),
    (0.617_876_244_402_643_748_447, 0.149_595_988_816_576_732_081),
    (0.755_404_408_355_003_033_895, 0.124_628_971_255_533_872_052),
    (0.865_631_202_387_831_743_880, 0.095_158_511_682_492_784_810),
    (0.944_575_023_073_232_576_078, 0.062_253_523_938_647_892_863),
    (0.989_400_934_991_649_932_596, 0.027_152_459_411_754_094_852),
];

pub(crate) const NODES: usize = 16;

/// The rule's nodes and weights mapped onto `[a, b]`.
pub(crate) fn nodes<T: Real>(a: T, b: T) -> [(T, T); NODES] {
    let mid = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let mut out = [(T::zero(), T::zero()); NODES];
    for (i, &(x, w)) in HALF_RULE.iter().enumerate() {
        let dx = half * T::lit(x);
        let weight = half * T::lit(w);
        out[2 * i] = (mid - dx, weight);
        out[2 * i + 1] = (mid + dx, weight);
    }
    out
}

/// Integrates `f` over `[a, b]` with the composite rule on `panels` equal
/// panels. The summand type only needs addition and scaling by the node
/// weight, so the same driver serves real and complex integrands.
pub(crate) fn integrate<T, V, F>(a: T, b: T, panels: usize, mut f: F) -> V
where
    T: Real,
    V: Copy + std::ops::Add<Output = V> + std::ops::Mul<T, Output = V> + num_traits::Zero,
    F: FnMut(T) -> V,
{
    let width = (b - a) / T::lit(panels as f64);
    let mut total = V::zero();
    for panel in 0..panels {
        let lo = a + width * T::lit(panel as f64);
        for (x, w) in nodes(lo, lo + width) {
            total = total + f(x) * w;
        }
    }
    total
}
