//! Named pairs.
//!
//! `basic-2x2[-transpose]` is the nilpotent 2x2 pair. `cauchy-N[-variant]`
//! is the Calogero-Moser pair with positions `0, 1, ..., N-1` and zero
//! momenta unless overridden by a query `?x=..&p=..`, each a comma list of
//! `RE` or `RE:IM` values. Variants apply one symmetry:
//!
//! * `shift`: `X -> X + Z`
//! * `dual`: `Z -> Z + X^2`
//! * `conj`: `(X, Z) -> g (X, Z) g^{-1}` with `g = I + E_{12}/2` (upper shear)

use anyhow::{anyhow, bail, Context, Result};
use cm_bethe::{
    apply_symmetry, basic_2x2_pair, cm_pair_from_positions, CMPair, Complex64, ComplexMatrix, RationalFn,
    SymmetryOp, Tolerances,
};

pub const ENTRIES: &[(&str, &str)] = &[
    ("basic-2x2", "X = [[0,1],[0,0]], Z = [[0,0],[1,0]]"),
    ("basic-2x2-transpose", "transpose of basic-2x2"),
    ("cauchy-N", "Calogero-Moser pair, positions 0..N-1, zero momenta; accepts ?x=..&p=.."),
    ("cauchy-N-shift", "cauchy-N translated by X -> X + Z"),
    ("cauchy-N-dual", "cauchy-N translated by Z -> Z + X^2"),
    ("cauchy-N-conj", "cauchy-N conjugated by the shear I + E_12 / 2"),
];

const MAX_N: usize = 64;

pub fn lookup(name: &str, tol: &Tolerances) -> Result<CMPair> {
    let (base, query) = match name.split_once('?') {
        Some((b, q)) => (b, Some(q)),
        None => (name, None),
    };
    match base {
        "basic-2x2" | "basic-2x2-transpose" => {
            if query.is_some() {
                bail!("catalog entry {base} takes no parameters");
            }
            let pair = basic_2x2_pair();
            if base.ends_with("transpose") {
                Ok(apply_symmetry(&pair, &SymmetryOp::Transpose, tol)?)
            } else {
                Ok(pair)
            }
        }
        _ => cauchy(base, query, tol),
    }
}

fn cauchy(base: &str, query: Option<&str>, tol: &Tolerances) -> Result<CMPair> {
    let rest = base
        .strip_prefix("cauchy-")
        .ok_or_else(|| anyhow!("unknown catalog entry {base:?}"))?;
    let (size, variant) = match rest.split_once('-') {
        Some((s, v)) => (s, Some(v)),
        None => (rest, None),
    };
    let n: usize = size.parse().map_err(|_| anyhow!("unknown catalog entry {base:?}"))?;
    if n == 0 || n > MAX_N {
        bail!("cauchy-N needs 1 <= N <= {MAX_N}");
    }
    let mut x: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64, 0.0)).collect();
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    if let Some(q) = query {
        for part in q.split('&') {
            let (key, value) = part.split_once('=').ok_or_else(|| anyhow!("malformed parameter {part:?}"))?;
            let values = parse_list(value).with_context(|| format!("parameter {key}"))?;
            if values.len() != n {
                bail!("parameter {key} has {} values, expected {n}", values.len());
            }
            match key {
                "x" => x = values,
                "p" => p = values,
                _ => bail!("unknown parameter {key:?}"),
            }
        }
    }
    let pair = cm_pair_from_positions(&x, &p, tol.separation, tol.rank_one)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let op = match variant {
        None => return Ok(pair),
        Some("shift") => SymmetryOp::TranslateX(RationalFn::polynomial(vec![zero, one])),
        Some("dual") => SymmetryOp::TranslateZ(RationalFn::polynomial(vec![zero, zero, one])),
        Some("conj") => {
            let mut g = ComplexMatrix::identity(n).into_inner();
            if n > 1 {
                g[(0, 1)] = Complex64::new(0.5, 0.0);
            }
            SymmetryOp::Conjugate(ComplexMatrix::from_inner(g)?)
        }
        Some(v) => bail!("unknown catalog variant {v:?}"),
    };
    Ok(apply_symmetry(&pair, &op, tol)?)
}

fn parse_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(parse_scalar).collect()
}

/// `RE` or `RE:IM`.
fn parse_scalar(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let (re, im) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse::<f64>()?, b.trim().parse::<f64>()?),
        None => (s.parse::<f64>()?, 0.0),
    };
    if !(re.is_finite() && im.is_finite()) {
        bail!("non-finite value {s:?}");
    }
    Ok(Complex64::new(re, im))
}
