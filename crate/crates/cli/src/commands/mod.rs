pub mod check;
pub mod ingest;
pub mod query;
pub mod version;
