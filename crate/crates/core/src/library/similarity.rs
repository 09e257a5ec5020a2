use crate::text::token_set;

use super::Category;

/// Token-set Jaccard similarity between two categories over the lowercased
/// alphanumeric tokens of name and description.
///
/// Two categories with identical (including empty) token sets score 1.0.
pub fn surface_similarity(a: &Category, b: &Category) -> f64 {
    let ta = token_set(&format!("{} {}", a.name, a.description));
    let tb = token_set(&format!("{} {}", b.name, b.description));
    let union = ta.union(&tb).count();
    if union == 0 {
        return 1.0;
    }
    ta.intersection(&tb).count() as f64 / union as f64
}
