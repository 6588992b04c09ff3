//! Oracles shared by the integration suites. Nothing here calls into the
//! code paths it is used to check.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

/// Golden error table: `(x, t) -> columns`.
pub struct GoldenTable {
    pub columns: Vec<String>,
    pub rows: Vec<(f64, f64, Vec<f64>)>,
}

impl GoldenTable {
    pub fn load(name: &str) -> Self {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut lines = text.lines();
        let columns = lines.next().unwrap().split(',').skip(2).map(str::to_string).collect();
        let rows = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let f: Vec<f64> = l.split(',').map(|s| s.trim().parse().unwrap()).collect();
                (f[0], f[1], f[2..].to_vec())
            })
            .collect();
        Self { columns, rows }
    }

    pub fn column(&self, name: &str) -> usize {
        self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"))
    }
}

/// `got` agrees with `want` to three significant figures: the difference is
/// at most half a unit in the third significant digit of `want`.
pub fn matches_3_sig(got: f64, want: f64) -> bool {
    let unit = 10f64.powf(want.abs().log10().floor() - 2.0);
    (got - want).abs() <= 0.5 * unit
}

/// Central difference for the k-th derivative (k ≤ 3) with Richardson
/// extrapolation over steps `h` and `h/2`.
pub fn fd_derivative(f: &dyn Fn(f64) -> f64, x: f64, k: usize, h: f64) -> f64 {
    let central = |h: f64| match k {
        0 => f(x),
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        _ => panic!("fd_derivative supports k <= 3"),
    };
    let coarse = central(h);
    let fine = central(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `(1/k!) ∂_t^k` of the traveling wave at `t = 0`, `k ≤ 2`, from hand
/// differentiation in `ξ = (λ/2)(x + λ²t/2)`, `ξ_t = λ³/4`.
pub fn wave_taylor_coefficients(lambda: f64, x: f64) -> [(f64, f64); 3] {
    let xi = lambda * x / 2.0;
    let s = sech(xi);
    let s2 = s * s;
    let th = xi.tanh();
    let xt = lambda.powi(3) / 4.0;
    let v0 = lambda * lambda / 8.0 * (1.0 - 4.0 * s2);
    let w0 = lambda * s;
    // d/dξ sech² = −2 sech² tanh, d²/dξ² sech² = 4 sech² tanh² − 2 sech⁴
    let v1 = lambda * lambda * s2 * th * xt;
    let v2 = -lambda * lambda / 2.0 * (4.0 * s2 * th * th - 2.0 * s2 * s2) * xt * xt / 2.0;
    // d/dξ sech = −sech tanh, d²/dξ² sech = sech (tanh² − sech²)
    let w1 = -lambda * s * th * xt;
    let w2 = lambda * s * (th * th - s2) * xt * xt / 2.0;
    [(v0, w0), (v1, w1), (v2, w2)]
}

/// Independent series product: a list of `(h, j, value)` terms with numeric
/// coefficients, multiplied pairwise and evaluated at `t`.
pub fn brute_product_at(a: &[(u32, u32, f64)], b: &[(u32, u32, f64)], alpha: f64, beta: f64, t: f64) -> f64 {
    let mut acc: HashMap<(u32, u32), f64> = HashMap::new();
    for (ha, ja, ca) in a {
        for (hb, jb, cb) in b {
            *acc.entry((ha + hb, ja + jb)).or_default() += ca * cb;
        }
    }
    acc.into_iter()
        .map(|((h, j), c)| {
            let mu = f64::from(h) * alpha + f64::from(j) * beta;
            if mu == 0.0 {
                c
            } else {
                c * t.powf(mu)
            }
        })
        .sum()
}
