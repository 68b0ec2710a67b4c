pub mod cli;
pub mod const_codec;
pub mod dep_codec;
pub mod features;
pub mod pruner;
pub mod tagger;
pub mod train;
pub mod treebank;
