//! Negative summaries: rule-based augmentations of the reference summary
//! and model-mined summaries of other documents.

mod augment;
mod lexical;
mod mining;
mod recipe;

pub use augment::{drop_chars, drop_words, shuffle_words, swap_antonyms, swap_entities, Augmented};
pub use lexical::{
    augment, generate_dataset, generate_lexical_negatives, LexicalNegatives, LexicalResources,
    MAX_ATTEMPTS,
};
pub use mining::{combine_negatives, mine_model_negatives, MiningConfig};
pub use recipe::{AugmentKind, AugmentRecipe, RecipeEntry, DEFAULT_P_DROP, DEFAULT_P_SWAP};
