//! Quadrature and statistics used as independent oracles in unit tests.

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth > 60 || (b - a).abs() < 1e-15 * a.abs().max(1.0) {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    rec(&f, a, b, tol, 0)
}

#[test]
fn quadrature_self_check() {
    let v = integrate(|x| x.powi(6), 0.0, 2.0, 1e-14);
    assert!((v - 128.0 / 7.0).abs() < 1e-12);
    let w = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-14);
    assert!((w - 2.0).abs() < 1e-13);
    let e = integrate(|x| (-x).exp(), 0.0, 50.0, 1e-14);
    assert!((e - (1.0 - (-50f64).exp())).abs() < 1e-13);
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Chi-square p-value of `draws` against a density on `(0, upper]`, using
/// cells merged until each expects roughly `draws.len() / bins` hits.
pub fn chi_square_against_density(
    draws: &[f64],
    pdf: impl Fn(f64) -> f64,
    upper: f64,
    bins: usize,
) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let cells = 40 * bins;
    let w = upper / cells as f64;
    let target = 1.0 / bins as f64;
    let mut edges = vec![0.0];
    let mut probs = Vec::new();
    let mut acc = 0.0;
    for i in 0..cells {
        acc += integrate(&pdf, i as f64 * w, (i + 1) as f64 * w, 1e-13);
        if acc >= target || i + 1 == cells {
            edges.push((i + 1) as f64 * w);
            probs.push(acc);
            acc = 0.0;
        }
    }
    let mut counts = vec![0usize; probs.len()];
    for &x in draws {
        let k = edges.partition_point(|&e| e < x).clamp(1, probs.len()) - 1;
        counts[k] += 1;
    }
    let n = draws.len() as f64;
    let total: f64 = probs.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| {
            let e = n * p / total;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (probs.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}
