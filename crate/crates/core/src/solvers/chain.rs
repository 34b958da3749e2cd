//! Chain composition: order VNFs by predicted priority, then repair the
//! order so every strictly ordered VNF appears in sequence.

use crate::error::Result;
use crate::neuro::{Genome, Predictors};
use crate::workload::{SfcRequest, VnfKind};

use super::{ChainedVnf, ForwardingGraph};

pub fn compose_chain(sfcr: &SfcRequest, predictors: &Predictors, genome: &Genome) -> Result<ForwardingGraph> {
    let priorities = sfcr
        .vnfs
        .iter()
        .map(|&vnf| predictors.priority(genome, sfcr.id, vnf))
        .collect::<Result<Vec<_>>>()?;
    Ok(order_chain(sfcr.id, &sfcr.vnfs, &priorities, &sfcr.strict_order))
}

/// Stable descending sort by priority followed by strict-order repair.
///
/// Walking `strict_order`, a VNF found before the previous strict VNF is
/// pulled out and re-inserted at that VNF's old position, which lands it
/// directly behind it.
pub fn order_chain(sfcr_id: usize, vnfs: &[VnfKind], priorities: &[f64], strict_order: &[VnfKind]) -> ForwardingGraph {
    let mut ordered: Vec<ChainedVnf> = vnfs
        .iter()
        .zip(priorities)
        .map(|(&kind, &priority)| ChainedVnf {
            kind,
            instance: 1,
            priority,
        })
        .collect();
    ordered.sort_by(|a, b| b.priority.total_cmp(&a.priority));

    let mut last_index: Option<usize> = None;
    for &strict in strict_order {
        let Some(mut index) = ordered.iter().position(|v| v.kind == strict) else {
            continue;
        };
        if let Some(last) = last_index {
            if index < last {
                let vnf = ordered.remove(index);
                index = last;
                ordered.insert(index, vnf);
            }
        }
        last_index = Some(index);
    }

    ForwardingGraph {
        sfcr_id,
        ordered_vnfs: ordered,
    }
}
