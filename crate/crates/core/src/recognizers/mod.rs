//! Recognizers that locate implicit relations: a sentence-level recognizer
//! for intra-sentential relations and a naive-Bayes detector of explicit
//! relations linked with implicit ones.

mod intra;
mod linked;
mod pipeline;
mod sentence;

pub use intra::{train_intra_recognizer, IntraRecognizer, RecognizerConfig};
pub use linked::{build_linked_dataset, linked_with_implicit, LinkedDataset, LinkedInstance, LinkedRecognizer, NaiveBayes};
pub use pipeline::{pipeline_classify, PipelinePrediction, PipelineReport};
pub use sentence::{
    binary_report, build_sentence_dataset, build_vocab, majority_baseline, sentence_labels, BinaryReport,
    SentenceInstance,
};
