//! Kovacs: decentralized, non-repudiable data exchange with pseudonymous
//! usage logging on a minimal proof-of-work blockchain.
//!
//! The crate is organized around the moving parts of a Kovacs node:
//!
//! - [`crypto`] — signing keypairs, digests, time-asymmetric symmetric
//!   encryption, and hybrid sealed boxes.
//! - [`pseudonym`] — one-time pseudonym provisioning and proof of ownership.
//! - [`identity`] — verifiable credentials and local identity verification.
//! - [`protocol`] — the new-usage exchange protocol and non-repudiation
//!   evidence.
//! - [`ledger`] — the account-based proof-of-work chain storing usage
//!   payloads.
//! - [`node`] — a full node: sessions, non-repudiation store, erasure,
//!   gossip.
//! - [`netsim`] — deterministic discrete-event simulation and adversary
//!   harness.
//! - [`idp`] — a minimal institutional identity provider.

pub mod crypto;
pub mod identity;
pub mod idp;
pub mod ledger;
pub mod netsim;
pub mod node;
pub mod protocol;
pub mod pseudonym;
