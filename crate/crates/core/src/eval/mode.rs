//! Coefficient modes: how variable domains grow with the coefficient index `m`.
//!
//! A mode maps `m` to a pair of multipliers `(free, bound)` applied to the sorts of
//! free and quantified variables. Modes are registered by name and looked up at
//! runtime (`--mode lifted|base`).

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

pub trait CoefficientMode: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Sort multipliers `(free, bound)` at coefficient index `m >= 1`.
    fn scales(&self, m: u32) -> (u32, u32);
}

/// Every variable domain lifts to the degree-`m` extension of its sort field.
pub struct Lifted;

impl CoefficientMode for Lifted {
    fn name(&self) -> &'static str {
        "lifted"
    }

    fn description(&self) -> &'static str {
        "free and quantified variables both range over the degree-m extension"
    }

    fn scales(&self, m: u32) -> (u32, u32) {
        (m, m)
    }
}

/// Free variables lift to `F_{q^m}`; quantified variables keep their original domain.
pub struct Base;

impl CoefficientMode for Base {
    fn name(&self) -> &'static str {
        "base"
    }

    fn description(&self) -> &'static str {
        "free variables range over the degree-m extension, quantified ones stay in F_q"
    }

    fn scales(&self, m: u32) -> (u32, u32) {
        (m, 1)
    }
}

#[derive(Default)]
pub struct ModeRegistry {
    modes: BTreeMap<&'static str, Arc<dyn CoefficientMode>>,
}

impl ModeRegistry {
    pub fn register(&mut self, mode: Arc<dyn CoefficientMode>) {
        self.modes.insert(mode.name(), mode);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn CoefficientMode>> {
        self.modes.get(name.to_ascii_lowercase().as_str()).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.modes.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn CoefficientMode>> {
        self.modes.values()
    }
}

/// The built-in modes. `lifted` is the default.
pub fn modes() -> &'static ModeRegistry {
    static REGISTRY: OnceLock<ModeRegistry> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r = ModeRegistry::default();
        r.register(Arc::new(Lifted));
        r.register(Arc::new(Base));
        r
    })
}

pub fn default_mode() -> Arc<dyn CoefficientMode> {
    Arc::new(Lifted)
}
