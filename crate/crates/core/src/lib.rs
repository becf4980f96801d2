//! Core engine for a dual-platform agricultural business directory.
//!
//! The crate is organised around the pieces a USSD server and an offline
//! smartphone client share:
//!
//! - [`directory`]: the business records, CSV ingestion, the synthetic data
//!   generator and the versioned binary snapshot.
//! - [`search`]: faceted filtering and fuzzy keyword lookup.
//! - [`session`]: the menu state machine, the 160-character screen renderer
//!   and the compact session string.
//! - [`logbatch`]: the delta-timestamped binary usage-log codec.
//! - [`records`]: the line formats of the server hit log and action store.
//! - [`analytics`]: usage metrics computed from those two files.

pub mod analytics;
pub mod directory;
pub mod logbatch;
pub mod msisdn;
pub mod records;
pub mod search;
pub mod session;
pub mod varint;

pub use directory::{Business, Directory, DirectoryError, Sector};
pub use msisdn::{normalize_msisdn, Msisdn, MsisdnError};
pub use search::{Catalog, FilterState, KeywordIndex, KeywordKind, ResultSet};
pub use session::{Screen, ScreenKind, SessionState};
