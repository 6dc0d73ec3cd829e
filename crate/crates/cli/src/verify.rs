//! Batch checks run by `chromalg verify`.

use chromalg::genset::{evaluate_cached, Decomposer};
use chromalg::ncpartition::{enumerate_basis_capped, riordan};
use chromalg::rewrite::{normalize, normalize_randomized};
use chromalg::sampling::{random_diagram, SampleLimits};
use chromalg::{AlgebraElement, ProductCache};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;

pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

const ASSOCIATIVITY_SAMPLES: usize = 200;
const CONFLUENCE_DIAGRAMS: usize = 50;
const CONFLUENCE_ORDERS: usize = 10;

type Suite = fn(usize, &Config) -> Result<String, String>;

const SUITES: [(&str, Suite); 5] = [
    ("dimension", dimension),
    ("identity", identity),
    ("associativity", associativity),
    ("confluence", confluence),
    ("round-trip", round_trip),
];

/// Runs every suite, `cfg.parallelism` at a time; results keep suite order.
pub fn run(n: usize, cfg: &Config) -> Vec<SuiteResult> {
    let mut results = Vec::with_capacity(SUITES.len());
    for batch in SUITES.chunks(cfg.parallelism.max(1)) {
        let outcomes: Vec<Result<String, String>> = std::thread::scope(|s| {
            let handles: Vec<_> = batch.iter().map(|&(_, suite)| s.spawn(move || suite(n, cfg))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err("suite panicked".into())))
                .collect()
        });
        for (&(name, _), outcome) in batch.iter().zip(outcomes) {
            let (pass, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            results.push(SuiteResult { name, pass, detail });
        }
    }
    results
}

fn basis(n: usize, cfg: &Config) -> Result<Vec<AlgebraElement>, String> {
    Ok(enumerate_basis_capped(n, cfg.max_enumeration_order)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(AlgebraElement::basis)
        .collect())
}

fn dimension(n: usize, cfg: &Config) -> Result<String, String> {
    let count = enumerate_basis_capped(n, cfg.max_enumeration_order).map_err(|e| e.to_string())?.len();
    let r = riordan(2 * n).map_err(|e| e.to_string())?.to_string();
    if r == count.to_string() {
        Ok(format!("{count} basis elements"))
    } else {
        Err(format!("enumerated {count}, recurrence {r}"))
    }
}

fn identity(n: usize, cfg: &Config) -> Result<String, String> {
    let id = AlgebraElement::identity(n);
    let basis = basis(n, cfg)?;
    for x in &basis {
        let left = id.mul(x).map_err(|e| e.to_string())?;
        let right = x.mul(&id).map_err(|e| e.to_string())?;
        if left != *x || right != *x {
            return Err(format!("identity law fails at {}", serde_json::to_string(x).unwrap_or_default()));
        }
    }
    Ok(format!("{} elements", basis.len()))
}

fn associativity(n: usize, cfg: &Config) -> Result<String, String> {
    let basis = basis(n, cfg)?;
    let k = basis.len();
    let triples: Vec<[usize; 3]> = if k * k * k <= ASSOCIATIVITY_SAMPLES {
        (0..k * k * k).map(|t| [t / (k * k), t / k % k, t % k]).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..ASSOCIATIVITY_SAMPLES).map(|_| [0; 3].map(|_| rng.gen_range(0..k))).collect()
    };
    let cache = ProductCache::new();
    let mul = |a: &AlgebraElement, b: &AlgebraElement| a.mul_cached(b, &cache).map_err(|e| e.to_string());
    for &[i, j, l] in &triples {
        let (a, b, c) = (&basis[i], &basis[j], &basis[l]);
        if mul(&mul(a, b)?, c)? != mul(a, &mul(b, c)?)? {
            return Err(format!("basis triple ({i}, {j}, {l})"));
        }
    }
    Ok(format!("{} triples", triples.len()))
}

fn confluence(n: usize, cfg: &Config) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    for k in 0..CONFLUENCE_DIAGRAMS {
        let d = random_diagram(&mut rng, n, SampleLimits::default()).map_err(|e| e.to_string())?;
        let canonical = normalize(&d).map_err(|e| e.to_string())?;
        for _ in 0..CONFLUENCE_ORDERS {
            if normalize_randomized(&d, &mut rng).map_err(|e| e.to_string())? != canonical {
                return Err(format!("diagram {k}: {}", serde_json::to_string(&d).unwrap_or_default()));
            }
        }
    }
    Ok(format!("{CONFLUENCE_DIAGRAMS} diagrams x {CONFLUENCE_ORDERS} orders"))
}

fn round_trip(n: usize, cfg: &Config) -> Result<String, String> {
    let cache = ProductCache::new();
    let mut dec = Decomposer::new();
    let basis = basis(n, cfg)?;
    for x in &basis {
        let expr = dec.decompose_element(x).map_err(|e| e.to_string())?;
        if evaluate_cached(&expr, &cache).map_err(|e| e.to_string())? != *x {
            return Err(serde_json::to_string(x).unwrap_or_default());
        }
    }
    Ok(format!("{} elements", basis.len()))
}
