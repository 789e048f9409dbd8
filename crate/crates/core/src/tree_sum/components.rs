use super::reduction::EngineFactory;
use super::TreeSumEngine;
use crate::forest::RootedForest;
use crate::group::Group;

/// Independent engines per component of the initial forest. Components never
/// merge, so the static component id routes every operation.
pub struct PerComponent<G: Group> {
    comp: Vec<u32>,
    local: Vec<u32>,
    engines: Vec<Box<dyn TreeSumEngine<G> + Send>>,
}

impl<G: Group> PerComponent<G> {
    pub fn new(f: &RootedForest, weights: &[G::Elem], factory: &EngineFactory<G>) -> Self {
        let (comp, members) = f.components();
        let mut local = vec![0u32; f.len()];
        let mut engines = Vec::with_capacity(members.len());
        for m in &members {
            for (i, &v) in m.iter().enumerate() {
                local[v] = i as u32;
            }
            let w = m.iter().map(|&v| weights[v].clone()).collect();
            engines.push(factory(&f.induced(m), w));
        }
        PerComponent { comp: comp.into_iter().map(|c| c as u32).collect(), local, engines }
    }

    fn route(&self, v: usize) -> (usize, usize) {
        (self.comp[v] as usize, self.local[v] as usize)
    }
}

impl<G: Group> TreeSumEngine<G> for PerComponent<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        let (c, l) = self.route(v);
        self.engines[c].tree_sum(l)
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        let (c, l) = self.route(v);
        self.engines[c].update_weight(l, x)
    }
    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem) {
        let (c, l) = self.route(v);
        self.engines[c].cut_report(l)
    }
}
