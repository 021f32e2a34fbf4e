//! Shared computation context: memo tables plus an optional injected fault.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, OnceLock, RwLock};

use crate::kernel::{Rational, StirlingCache};
use crate::multipoly::AlphaVector;

/// A single deliberate perturbation of a table entry.
///
/// Used to check that the identity suite notices corrupted inputs: an engine
/// built with a fault returns `true value + delta` for exactly one entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    Stirling2 {
        n: u32,
        m: u32,
        delta: i64,
    },
    Stirling1 {
        n: u32,
        m: u32,
        delta: i64,
    },
    Alpha {
        magnitudes: Vec<u32>,
        l: u32,
        delta: i64,
    },
}

/// Owns every memo table. All public operations are methods on an engine;
/// the module-level free functions run against [`Engine::global`].
#[derive(Debug, Default)]
pub struct Engine {
    pub(crate) stirling: StirlingCache,
    pub(crate) pb_memo: Memo<(u32, i64), Rational>,
    pub(crate) alpha_memo: Memo<Vec<u32>, Arc<AlphaVector>>,
    pub(crate) fault: Option<Fault>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fault(fault: Fault) -> Self {
        Engine {
            fault: Some(fault),
            ..Self::default()
        }
    }

    pub fn global() -> &'static Engine {
        static GLOBAL: OnceLock<Engine> = OnceLock::new();
        GLOBAL.get_or_init(Engine::new)
    }

    pub fn fault(&self) -> Option<&Fault> {
        self.fault.as_ref()
    }
}

/// Insert-once memo map. Values are computed outside the lock; if two threads
/// race on one key the first insertion wins and both observe it.
#[derive(Debug)]
pub(crate) struct Memo<K, V> {
    map: RwLock<HashMap<K, V>>,
}

impl<K, V> Default for Memo<K, V> {
    fn default() -> Self {
        Memo {
            map: RwLock::new(HashMap::new()),
        }
    }
}

impl<K: Eq + Hash + Clone, V: Clone> Memo<K, V> {
    pub(crate) fn get_or_try_insert_with<E>(
        &self,
        key: &K,
        compute: impl FnOnce() -> Result<V, E>,
    ) -> Result<V, E> {
        if let Some(v) = self.map.read().unwrap().get(key) {
            return Ok(v.clone());
        }
        let value = compute()?;
        let mut map = self.map.write().unwrap();
        Ok(map.entry(key.clone()).or_insert(value).clone())
    }
}
