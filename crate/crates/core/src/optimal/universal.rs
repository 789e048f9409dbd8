use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::clustering::binarize;
use crate::error::Result;
use crate::forest::RootedForest;
use crate::group::Group;
use crate::tree_sum::{level_factory_over, EngineFactory, Legality, PerComponent, TreeSumEngine};

use super::adaptive::{AdaptiveTreeSum, OptTable};
use super::search::{fingerprint, search_optimal_with, SearchCaps};

/// Operations covered by the tables of the universal structure's bottom level.
pub const UNIVERSAL_M_CAP: usize = 3;

/// Optimal trees of `f` for `m = 1..=m_cap`, searched once per process.
pub fn opt_table_for(f: &RootedForest, m_cap: usize) -> Result<Arc<OptTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(String, usize), Arc<OptTable>>>> = OnceLock::new();
    let key = (fingerprint(f), m_cap);
    if let Some(t) = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(t.clone());
    }
    let caps = SearchCaps { n: 3, m: m_cap, d: 2 * m_cap + 2 };
    let mut table = OptTable::default();
    for m in 1..=m_cap {
        let r = search_optimal_with(f, m, caps.d, caps)?;
        table.mids.push(r.mid);
        table.trees.push(Arc::new(r.witness));
    }
    let table = Arc::new(table);
    CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner()).insert(key, table.clone());
    Ok(table)
}

/// Three cluster reductions over [`AdaptiveTreeSum`] structures running optimal
/// computation trees. The innermost reduction uses clusters of at most two
/// vertices, so every bottom forest has at most two vertices.
pub struct UniversalTreeSum<G: Group> {
    inner: PerComponent<G>,
    legal: Legality,
    bottom_max: Arc<AtomicUsize>,
    bottoms: Arc<AtomicUsize>,
}

impl<G: Group> UniversalTreeSum<G> {
    pub fn new(f: &RootedForest, weights: Vec<G::Elem>, g: G) -> Result<Self> {
        let bottom_max = Arc::new(AtomicUsize::new(0));
        let bottoms = Arc::new(AtomicUsize::new(0));
        let bottom: EngineFactory<G> = {
            let (g, bottom_max, bottoms) = (g.clone(), bottom_max.clone(), bottoms.clone());
            Arc::new(move |t: &RootedForest, w: Vec<G::Elem>| {
                bottom_max.fetch_max(t.len(), Ordering::Relaxed);
                bottoms.fetch_add(1, Ordering::Relaxed);
                let table = opt_table_for(t, UNIVERSAL_M_CAP).expect("bottom forests are within the search caps");
                Box::new(AdaptiveTreeSum::new(t, w, g.clone(), table)) as Box<dyn TreeSumEngine<G> + Send>
            })
        };
        // warm the cache for every bottom shape before building
        for shape in bottom_shapes() {
            opt_table_for(&shape, UNIVERSAL_M_CAP)?;
        }
        let factory = level_factory_over(g.clone(), 4, vec![None, None, Some(2)], bottom);
        let b = binarize(f, &weights, g.zero());
        let inner = PerComponent::new(&b.forest, &b.weights, &factory);
        Ok(UniversalTreeSum { inner, legal: Legality::new(f.parents(), f.aux_flags()), bottom_max, bottoms })
    }

    /// Largest forest handed to a bottom structure.
    pub fn max_bottom_size(&self) -> usize {
        self.bottom_max.load(Ordering::Relaxed)
    }

    /// Bottom structures built so far.
    pub fn bottom_count(&self) -> usize {
        self.bottoms.load(Ordering::Relaxed)
    }

    pub fn tree_sum(&mut self, v: usize) -> Result<G::Elem> {
        self.legal.query(v)?;
        Ok(self.inner.tree_sum(v))
    }

    pub fn update_weight(&mut self, v: usize, x: G::Elem) -> Result<()> {
        self.legal.query(v)?;
        self.inner.update_weight(v, x);
        Ok(())
    }

    pub fn cut_report(&mut self, v: usize) -> Result<(G::Elem, G::Elem)> {
        self.legal.cut(v)?;
        Ok(self.inner.cut_report(v))
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.cut_report(v).map(|_| ())
    }
}

impl<G: Group> TreeSumEngine<G> for UniversalTreeSum<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        self.inner.tree_sum(v)
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        self.inner.update_weight(v, x)
    }
    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem) {
        self.inner.cut_report(v)
    }
}

/// Every tree with at most two vertices, with every auxiliary labelling.
fn bottom_shapes() -> Vec<RootedForest> {
    let mut out = Vec::new();
    for aux in [[false, false], [true, false], [false, true], [true, true]] {
        out.push(RootedForest::new(&[None, Some(0)], &aux).expect("2-path"));
    }
    out.push(RootedForest::new(&[None], &[false]).expect("vertex"));
    out.push(RootedForest::new(&[None], &[true]).expect("vertex"));
    out
}
