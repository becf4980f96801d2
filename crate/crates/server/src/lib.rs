//! Network side of the directory service: the USSD gateway emulation, the
//! offline-client sync endpoints, the HTTP router and the benchmark harness.

pub mod bench;
pub mod cache;
pub mod disclaimer;
pub mod gateway;
pub mod hitlog;
pub mod http;
pub mod store;
pub mod sync;
pub mod whitelist;

pub use gateway::{Gateway, GatewayConfig, GatewayError, GatewayRequest};
pub use whitelist::Whitelist;
