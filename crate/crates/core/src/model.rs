//! A critical Ising model on a finite isoradial graph, bundled with the
//! derived structures every computation needs.

use crate::error::Result;
use crate::fisher::{AngleField, FisherGraph, KasteleynMatrix, KasteleynOrientation};
use crate::geometry::{DiamondGraph, IsoradialGraph};

#[derive(Debug, Clone)]
pub struct CriticalModel {
    pub graph: IsoradialGraph,
    pub diamond: DiamondGraph,
    pub fisher: FisherGraph,
    pub orientation: KasteleynOrientation,
    pub angles: AngleField,
}

impl CriticalModel {
    /// Decorate, orient deterministically and assign angles.
    pub fn new(graph: IsoradialGraph) -> Result<Self> {
        let fisher = FisherGraph::decorate(&graph)?;
        let orientation = KasteleynOrientation::compute(&fisher)?;
        Self::assemble(graph, fisher, orientation)
    }

    /// Same as [`new`](Self::new) but with a caller-supplied orientation,
    /// which is verified first.
    pub fn with_orientation(graph: IsoradialGraph, orientation: KasteleynOrientation) -> Result<Self> {
        let fisher = FisherGraph::decorate(&graph)?;
        orientation.verify(&fisher)?;
        Self::assemble(graph, fisher, orientation)
    }

    fn assemble(graph: IsoradialGraph, fisher: FisherGraph, orientation: KasteleynOrientation) -> Result<Self> {
        let angles = AngleField::assign(&fisher, &orientation)?;
        let diamond = DiamondGraph::build(&graph);
        Ok(Self { graph, diamond, fisher, orientation, angles })
    }

    pub fn kasteleyn(&self) -> KasteleynMatrix<'_> {
        KasteleynMatrix::new(&self.fisher, &self.orientation)
    }
}
