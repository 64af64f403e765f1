use crate::chunker::Provenance;
use crate::index::SearchHit;

use super::EvalError;

/// A retrieval is correct when any retrieved chunk is a row, header, caption
/// or whole-table chunk of a gold table. Returns the hit flag and the rank of
/// the first such chunk.
pub fn judge_hit<'p, F>(
    hits: &[SearchHit],
    provenance: F,
    gold_table_ids: &[String],
) -> Result<(bool, Option<usize>), EvalError>
where
    F: Fn(&str) -> Option<&'p Provenance>,
{
    let mut first = None;
    for h in hits {
        let p = provenance(&h.chunk_id).ok_or_else(|| EvalError::UnknownChunkId(h.chunk_id.clone()))?;
        let gold = p.kind.is_table_part()
            && p.table_id
                .as_ref()
                .is_some_and(|t| gold_table_ids.iter().any(|g| g == t));
        if gold && first.is_none_or(|r| h.rank < r) {
            first = Some(h.rank);
        }
    }
    Ok((first.is_some(), first))
}
