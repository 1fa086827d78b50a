pub mod oracle;
pub mod voc_fixtures;
