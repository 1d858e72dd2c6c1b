//! Verifiable credentials and local identity verification.
//!
//! The IdP binds a user id to a long-term public key with its signature.
//! During an exchange each party presents the credential plus a signature
//! over a verifier-chosen challenge and the session label. Verification is
//! purely local: no operation here touches a transport.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{self, KeyPair, Signature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("issuer signature does not verify")]
    BadIssuerSignature,
    #[error("challenge signature does not verify")]
    BadChallengeSignature,
}

/// IdP-signed binding of a user id to a long-term public key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiableCredential {
    pub user_id: String,
    #[serde(with = "hex::serde")]
    pub user_public_key: Vec<u8>,
    pub issuer_signature: Signature,
}

/// Credential plus a fresh challenge signature, presented per session.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityAssertion {
    pub credential: VerifiableCredential,
    pub challenge_signature: Signature,
}

fn credential_claims(user_id: &str, user_public_key: &[u8]) -> Vec<u8> {
    let mut msg = Vec::new();
    msg.extend_from_slice(&(user_id.len() as u32).to_be_bytes());
    msg.extend_from_slice(user_id.as_bytes());
    msg.extend_from_slice(&(user_public_key.len() as u32).to_be_bytes());
    msg.extend_from_slice(user_public_key);
    msg
}

fn assertion_message(challenge: &[u8], session_label: &[u8]) -> Vec<u8> {
    let mut msg = Vec::new();
    msg.extend_from_slice(&(challenge.len() as u32).to_be_bytes());
    msg.extend_from_slice(challenge);
    msg.extend_from_slice(&(session_label.len() as u32).to_be_bytes());
    msg.extend_from_slice(session_label);
    msg
}

/// Issue a credential over (user_id ‖ user_public_key), signed by the IdP.
pub fn issue_credential(
    idp_key: &KeyPair,
    user_id: &str,
    user_public_key: &[u8],
) -> VerifiableCredential {
    let claims = credential_claims(user_id, user_public_key);
    VerifiableCredential {
        user_id: user_id.to_string(),
        user_public_key: user_public_key.to_vec(),
        issuer_signature: crypto::sign(&claims, idp_key),
    }
}

/// Check the IdP's signature on a credential.
pub fn credential_is_valid(credential: &VerifiableCredential, idp_public_key: &[u8]) -> bool {
    let claims = credential_claims(&credential.user_id, &credential.user_public_key);
    crypto::verify(&claims, &credential.issuer_signature, idp_public_key)
}

/// Build an identity assertion for one session.
pub fn present_identity(
    credential: &VerifiableCredential,
    identity_key: &KeyPair,
    challenge: &[u8],
    session_label: &[u8],
) -> IdentityAssertion {
    let msg = assertion_message(challenge, session_label);
    IdentityAssertion {
        credential: credential.clone(),
        challenge_signature: crypto::sign(&msg, identity_key),
    }
}

/// Verify an assertion locally and return the asserted user id.
///
/// Checks (i) the IdP signature on the credential and (ii) the challenge
/// signature under the credential's key. No IdP round trip happens here.
pub fn verify_identity(
    assertion: &IdentityAssertion,
    idp_public_key: &[u8],
    challenge: &[u8],
    session_label: &[u8],
) -> Result<String, IdentityError> {
    if !credential_is_valid(&assertion.credential, idp_public_key) {
        return Err(IdentityError::BadIssuerSignature);
    }
    let msg = assertion_message(challenge, session_label);
    if !crypto::verify(
        &msg,
        &assertion.challenge_signature,
        &assertion.credential.user_public_key,
    ) {
        return Err(IdentityError::BadChallengeSignature);
    }
    Ok(assertion.credential.user_id.clone())
}
