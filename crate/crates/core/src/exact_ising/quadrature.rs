//! Global adaptive Gauss–Kronrod (7, 15) quadrature for vector-valued
//! integrands.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default limit on the number of panels.
pub const DEFAULT_PANEL_BUDGET: usize = 1_000_000;
/// Panels initially laid over the interval.
const INITIAL_PANELS: usize = 8;

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64, &mut [f64])>(f: &F, a: f64, b: f64, ncomp: usize, buf: &mut [f64]) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![0.0; ncomp];
    let mut gauss = vec![0.0; ncomp];
    f(center, buf);
    for c in 0..ncomp {
        kron[c] = WGK[7] * buf[c];
        gauss[c] = WG[3] * buf[c];
    }
    for (j, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        for point in [center - dx, center + dx] {
            f(point, buf);
            for c in 0..ncomp {
                kron[c] += WGK[j] * buf[c];
                if j % 2 == 1 {
                    gauss[c] += WG[j / 2] * buf[c];
                }
            }
        }
    }
    let mut error: f64 = 0.0;
    for c in 0..ncomp {
        kron[c] *= half;
        gauss[c] *= half;
        error = error.max((kron[c] - gauss[c]).abs());
    }
    Panel {
        a,
        b,
        value: kron,
        error,
    }
}

/// Integrates `f` over `[a, b]` componentwise until the summed panel error
/// estimate drops below `tol`. `f(x, out)` writes `ncomp` values into `out`.
///
/// Returns the estimate and the final error bound.
pub fn integrate<F: Fn(f64, &mut [f64])>(
    f: F,
    a: f64,
    b: f64,
    ncomp: usize,
    tol: f64,
    max_panels: usize,
) -> Result<(Vec<f64>, f64)> {
    let mut buf = vec![0.0; ncomp];
    let mut heap = BinaryHeap::new();
    let width = (b - a) / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + width * (i + 1) as f64
        };
        heap.push(gauss_kronrod(&f, lo, hi, ncomp, &mut buf));
    }
    let mut total_error: f64 = heap.iter().map(|p| p.error).sum();
    while total_error > tol {
        if heap.len() >= max_panels {
            let (value, _) = collect(heap, ncomp);
            return Err(Error::Quadrature {
                estimate: value.first().copied().unwrap_or(0.0),
                error_bound: total_error,
                panels: max_panels,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in floating point.
            let n = heap.len() + 1;
            heap.push(worst);
            let (value, _) = collect(heap, ncomp);
            return Err(Error::Quadrature {
                estimate: value.first().copied().unwrap_or(0.0),
                error_bound: total_error,
                panels: n,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid, ncomp, &mut buf);
        let right = gauss_kronrod(&f, mid, worst.b, ncomp, &mut buf);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Resum occasionally so the running total does not drift.
        if heap.len() % 1024 == 0 {
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }
    let (value, _) = collect(heap, ncomp);
    Ok((value, total_error))
}

fn collect(heap: BinaryHeap<Panel>, ncomp: usize) -> (Vec<f64>, usize) {
    // Sum panels in left-to-right order so results do not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = vec![0.0; ncomp];
    for p in &panels {
        for (v, x) in value.iter_mut().zip(&p.value) {
            *v += x;
        }
    }
    (value, panels.len())
}
