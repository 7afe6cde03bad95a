//! `I(f, g, h)(xi) = J(h, K(f, g))(xi) / 2` with a cached table of `K(f, g)`.

use super::jop::{j_kernel, JParts, Mode};
use super::kernel::{KTable, KView};
use super::QuadPanelConfig;
use crate::core_model::field::Field;
use crate::error::Result;
use num_complex::Complex64 as C64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Key = (u64, u64, u64, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<KTable>>> {
    static C: OnceLock<Mutex<HashMap<Key, Arc<KTable>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Table range (in `s = sqrt|eta|`) needed for `|xi| <= xi_max`.
pub fn table_s_max(xi_max: f64) -> f64 {
    let s = (2.0 * xi_max.abs() + 8.0).max(14.0).sqrt();
    (2.0 * s).ceil() / 2.0
}

/// Table of `K(f, g)` covering `|xi| <= xi_max`, shared between calls.
pub fn k_table(f: &dyn Field, g: &dyn Field, cfg: &QuadPanelConfig, xi_max: f64) -> Result<Arc<KTable>> {
    let s_max = table_s_max(xi_max);
    let same = std::ptr::addr_eq(f as *const dyn Field, g as *const dyn Field)
        || matches!((f.fingerprint(), g.fingerprint()), (Some(a), Some(b)) if a == b);
    let key = match (f.fingerprint(), g.fingerprint()) {
        (Some(a), Some(b)) => Some((a.min(b), a.max(b), s_max.to_bits(), cfg.tol.to_bits())),
        _ => None,
    };
    if let Some(k) = key {
        if let Some(t) = cache().lock().unwrap().get(&k) {
            return Ok(t.clone());
        }
    }
    let t = Arc::new(KTable::build(f, g, cfg, s_max, same)?);
    if let Some(k) = key {
        cache().lock().unwrap().entry(k).or_insert_with(|| t.clone());
    }
    Ok(t)
}

/// `I(f, g, h)(xi)` with channel split (already halved).
pub fn i_eval_parts(f: &dyn Field, g: &dyn Field, h: &dyn Field, xi: f64, cfg: &QuadPanelConfig, mode: Mode) -> Result<JParts> {
    if f.is_zero() || g.is_zero() || h.is_zero() {
        return Ok(JParts::default());
    }
    let t = k_table(f, g, cfg, xi.abs())?;
    i_eval_table(&t, f, g, h, xi, cfg, mode)
}

/// `I(f, g, h)(xi)` against an existing table of `K(f, g)`.
pub fn i_eval_table(t: &KTable, f: &dyn Field, g: &dyn Field, h: &dyn Field, xi: f64, cfg: &QuadPanelConfig, mode: Mode) -> Result<JParts> {
    if f.is_zero() || g.is_zero() || h.is_zero() {
        return Ok(JParts::default());
    }
    let kv = KView::new(t, f, g);
    Ok(j_kernel(h, &kv, xi, cfg, mode)?.scaled(0.5))
}

#[allow(non_snake_case)]
pub fn I_eval(f: &dyn Field, g: &dyn Field, h: &dyn Field, xi: f64, cfg: &QuadPanelConfig, mode: Mode) -> Result<C64> {
    Ok(i_eval_parts(f, g, h, xi, cfg, mode)?.total)
}
