//! Acknowledgment mining and structural analysis of acknowledgment networks.
//!
//! The crate is organised along the analysis pipeline:
//!
//! * [`corpus`] parses exported bibliographic records.
//! * [`extract`] finds acknowledgee names, merges spelling variants and drops self-mentions.
//! * [`textstats`] produces lemma frequency tables and keyword-family reports.
//! * [`mentions`] holds the per-paper acknowledgee sets and the mention distribution statistics.
//! * [`acknet`] builds the directed author → acknowledgee network and analyses its structure.
//! * [`coupling`] computes the Jaccard similarity layers between papers.
//! * [`assoc`] relates the social and intellectual layers to each other.
//! * [`io`] reads and writes the NET/CLU and delimited file formats.

pub mod acknet;
pub mod assoc;
pub mod corpus;
pub mod coupling;
mod error;
pub mod extract;
pub mod io;
pub mod mentions;
pub mod partition;
pub mod textstats;

pub use error::{Error, Result};
pub use partition::Partition;

pub use acknet::{AckGraph, DyadCensus, SymAcyclicResult, TriadCensus, TriadType};
pub use assoc::{AssociationResult, CommunityPartition, ContingencyResult};
pub use corpus::{BiblioRecord, Corpus, RecordFormat};
pub use coupling::{CouplingNetwork, Layer, SimilarityMatrix};
pub use extract::{AliasTable, Entity, EntityCategory};
pub use mentions::{DistributionSummary, LorenzGini, MentionIndex, ScholarId};
pub use textstats::{KeywordFamily, LemmaTable};
