//! XML reading, writing and DTD validation.

pub mod content_model;
mod cursor;
pub mod dtd;
pub mod entities;
pub mod lenient;
mod reader;
pub mod tree;
mod validate;
mod writer;

pub use dtd::{parse_dtd, ContentSpec, Dtd};
pub use entities::resolve_entities;
pub use lenient::{scan_islands, Islands};
pub use reader::{decode_bytes, parse_fragment, parse_xml};
pub use tree::{Document, Element, Node, NsScope};
pub use validate::{doctype_dtd, validate, validate_document};
pub use writer::{serialize, serialize_element};
