//! Cryptographic primitives behind algorithm-agnostic contracts.
//!
//! Defaults: RSA keypairs (PKCS#1 v1.5 signatures over SHA-256 and key
//! wrap), BLAKE2s-256 digests, PBKDF2-HMAC-SHA256 key stretching with an
//! exponential work factor, and AES-256-GCM for authenticated symmetric
//! encryption. All randomness is injected so simulations stay reproducible.

use std::sync::atomic::{AtomicU64, Ordering};

use aes_gcm::aead::{Aead, Payload};
use aes_gcm::{Aes256Gcm, KeyInit, Nonce};
use blake2::{Blake2s256, Digest};
use rand::{CryptoRng, RngCore};
use rsa::traits::PublicKeyParts;
use rsa::{BigUint, Pkcs1v15Encrypt, Pkcs1v15Sign, RsaPrivateKey, RsaPublicKey};
use serde::{Deserialize, Serialize};
use sha2::Sha256;
use thiserror::Error;

/// Key sizes accepted by the default policy.
pub const DEFAULT_ALLOWED_BITS: &[usize] = &[2048, 3072, 4096];

/// Minimum work factor accepted by [`derive_cipher_key`].
pub const MIN_WORK_FACTOR: u32 = 4;

/// AES-GCM nonce size in bytes.
const NONCE_SIZE: usize = 12;

static DECRYPTION_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Number of symmetric/sealed decryptions performed process-wide.
///
/// Query paths assert this stays untouched: retrieving log entries must
/// never decrypt anything.
pub fn decryption_count() -> u64 {
    DECRYPTION_COUNTER.load(Ordering::Relaxed)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("unsupported key size: {0} bits")]
    UnsupportedBits(usize),
    #[error("key generation failed: {0}")]
    KeyGeneration(String),
    #[error("invalid work factor: {0}")]
    InvalidWorkFactor(u32),
    #[error("authentication failure")]
    AuthenticationFailure,
    #[error("unseal failure")]
    UnsealFailure,
    #[error("malformed key encoding")]
    MalformedKey,
}

/// 32-byte BLAKE2s-256 digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Digest32(pub [u8; 32]);

impl Digest32 {
    pub const ZERO: Digest32 = Digest32([0u8; 32]);

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Digest32> {
        let v = hex::decode(s).ok()?;
        let arr: [u8; 32] = v.try_into().ok()?;
        Some(Digest32(arr))
    }
}

impl std::fmt::Display for Digest32 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// BLAKE2s-256 digest of arbitrary bytes.
pub fn digest32(data: &[u8]) -> Digest32 {
    let mut hasher = Blake2s256::new();
    hasher.update(data);
    Digest32(hasher.finalize().into())
}

/// Which key sizes a node accepts when generating keypairs.
///
/// The default floor follows current recommendations; simulations lower it
/// to keep bulk key generation affordable.
#[derive(Debug, Clone)]
pub struct KeyPolicy {
    pub allowed_bits: Vec<usize>,
}

impl Default for KeyPolicy {
    fn default() -> Self {
        KeyPolicy {
            allowed_bits: DEFAULT_ALLOWED_BITS.to_vec(),
        }
    }
}

impl KeyPolicy {
    /// Policy accepting any size from `floor` bits upward. Used by the
    /// simulation harness, which trades key strength for throughput.
    pub fn permissive(floor: usize) -> Self {
        KeyPolicy {
            allowed_bits: (0..=16).map(|i| floor + 64 * i).collect(),
        }
    }

    fn allows(&self, bits: usize) -> bool {
        self.allowed_bits.contains(&bits)
    }
}

/// An asymmetric keypair. Immutable after creation.
#[derive(Debug, Clone)]
pub struct KeyPair {
    public: RsaPublicKey,
    private: RsaPrivateKey,
    bits: usize,
}

impl KeyPair {
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Canonical public-key encoding: big-endian modulus bytes followed by
    /// the public exponent as 4 big-endian bytes. Pseudonyms hash this, so
    /// it must be byte-stable across nodes.
    pub fn public_encoded(&self) -> Vec<u8> {
        encode_public_key(&self.public)
    }
}

fn encode_public_key(pk: &RsaPublicKey) -> Vec<u8> {
    let mut out = pk.n().to_bytes_be();
    let e = pk.e().to_bytes_be();
    let mut e4 = [0u8; 4];
    e4[4 - e.len()..].copy_from_slice(&e);
    out.extend_from_slice(&e4);
    out
}

fn decode_public_key(bytes: &[u8]) -> Result<RsaPublicKey, CryptoError> {
    if bytes.len() < 5 {
        return Err(CryptoError::MalformedKey);
    }
    let (n, e) = bytes.split_at(bytes.len() - 4);
    RsaPublicKey::new(BigUint::from_bytes_be(n), BigUint::from_bytes_be(e))
        .map_err(|_| CryptoError::MalformedKey)
}

/// Generate a fresh keypair under the default policy.
pub fn generate_keypair<R: RngCore + CryptoRng>(
    bits: usize,
    rng: &mut R,
) -> Result<KeyPair, CryptoError> {
    generate_keypair_with(bits, &KeyPolicy::default(), rng)
}

/// Generate a fresh keypair, checking `bits` against the given policy.
pub fn generate_keypair_with<R: RngCore + CryptoRng>(
    bits: usize,
    policy: &KeyPolicy,
    rng: &mut R,
) -> Result<KeyPair, CryptoError> {
    if !policy.allows(bits) {
        return Err(CryptoError::UnsupportedBits(bits));
    }
    let private =
        RsaPrivateKey::new(rng, bits).map_err(|e| CryptoError::KeyGeneration(e.to_string()))?;
    let public = RsaPublicKey::from(&private);
    Ok(KeyPair {
        public,
        private,
        bits,
    })
}

/// A detached signature over a message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature(#[serde(with = "hex::serde")] pub Vec<u8>);

impl Signature {
    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

/// Sign a message with the pair's private key (PKCS#1 v1.5 over SHA-256).
pub fn sign(message: &[u8], key: &KeyPair) -> Signature {
    let hashed = Sha256::digest(message);
    let sig = key
        .private
        .sign(Pkcs1v15Sign::new::<Sha256>(), &hashed)
        .expect("RSA signing with a valid key cannot fail");
    Signature(sig)
}

/// Verify a signature against a canonically encoded public key.
///
/// Returns `false` on any mismatch or malformed input; never panics.
pub fn verify(message: &[u8], signature: &Signature, public_key: &[u8]) -> bool {
    let Ok(pk) = decode_public_key(public_key) else {
        return false;
    };
    let hashed = Sha256::digest(message);
    pk.verify(Pkcs1v15Sign::new::<Sha256>(), &hashed, &signature.0)
        .is_ok()
}

/// Seed material for the time-asymmetric cipher key derivation.
///
/// The owner sends `seed` and `salt` in the final protocol message; the
/// consumer must repeat the expensive derivation before decrypting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherKeySeed {
    pub seed: Vec<u8>,
    pub salt: Vec<u8>,
    pub work_factor: u32,
}

/// Byte length of `seed`.
pub const SEED_LEN: usize = 32;
/// Byte length of `salt`.
pub const SALT_LEN: usize = 16;
/// Wire length of seed ‖ salt, the body of round messages.
pub const SEED_WIRE_LEN: usize = SEED_LEN + SALT_LEN;

impl CipherKeySeed {
    /// Fresh random seed material for one exchange.
    pub fn random<R: RngCore + CryptoRng>(work_factor: u32, rng: &mut R) -> CipherKeySeed {
        let mut seed = vec![0u8; SEED_LEN];
        let mut salt = vec![0u8; SALT_LEN];
        rng.fill_bytes(&mut seed);
        rng.fill_bytes(&mut salt);
        CipherKeySeed {
            seed,
            salt,
            work_factor,
        }
    }

    /// Canonical encoding (length-prefixed) used inside transaction labels.
    pub fn canonical(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.seed.len() + self.salt.len());
        out.extend_from_slice(&(self.seed.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.seed);
        out.extend_from_slice(&(self.salt.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.salt);
        out.extend_from_slice(&self.work_factor.to_be_bytes());
        out
    }

    /// Wire body: seed ‖ salt, with no structure that would let a receiver
    /// tell it apart from a random round value of the same length. The work
    /// factor travels in the cipher message instead.
    pub fn wire_body(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(SEED_WIRE_LEN);
        out.extend_from_slice(&self.seed);
        out.extend_from_slice(&self.salt);
        out
    }

    /// Reinterpret a wire body as seed material. Any body of the right
    /// length parses; only the real one yields a key that authenticates.
    pub fn from_wire_body(body: &[u8], work_factor: u32) -> Option<CipherKeySeed> {
        if body.len() != SEED_WIRE_LEN {
            return None;
        }
        Some(CipherKeySeed {
            seed: body[..SEED_LEN].to_vec(),
            salt: body[SEED_LEN..].to_vec(),
            work_factor,
        })
    }
}

/// 32-byte symmetric key derived from a [`CipherKeySeed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricKey(pub [u8; 32]);

/// Derive the cipher key by key stretching: PBKDF2-HMAC-SHA256 with
/// `2^work_factor` iterations. Deterministic in (seed, salt, work_factor);
/// cost doubles per work-factor step.
pub fn derive_cipher_key(seed: &CipherKeySeed) -> Result<SymmetricKey, CryptoError> {
    if seed.work_factor < MIN_WORK_FACTOR || seed.work_factor > 31 {
        return Err(CryptoError::InvalidWorkFactor(seed.work_factor));
    }
    let iterations = 1u32 << seed.work_factor;
    let mut key = [0u8; 32];
    pbkdf2::pbkdf2_hmac::<Sha256>(&seed.seed, &seed.salt, iterations, &mut key);
    Ok(SymmetricKey(key))
}

/// AES-256-GCM encryption. Output is nonce ‖ ciphertext+tag.
pub fn encrypt_datum<R: RngCore + CryptoRng>(
    datum: &[u8],
    key: &SymmetricKey,
    rng: &mut R,
) -> Vec<u8> {
    let cipher = Aes256Gcm::new_from_slice(&key.0).expect("32-byte key");
    let mut nonce = [0u8; NONCE_SIZE];
    rng.fill_bytes(&mut nonce);
    let mut out = nonce.to_vec();
    let ct = cipher
        .encrypt(
            Nonce::from_slice(&nonce),
            Payload {
                msg: datum,
                aad: &[],
            },
        )
        .expect("AES-GCM encryption cannot fail");
    out.extend_from_slice(&ct);
    out
}

/// AES-256-GCM decryption; fails on any tampering or wrong key.
pub fn decrypt_datum(cipher_bytes: &[u8], key: &SymmetricKey) -> Result<Vec<u8>, CryptoError> {
    DECRYPTION_COUNTER.fetch_add(1, Ordering::Relaxed);
    if cipher_bytes.len() < NONCE_SIZE {
        return Err(CryptoError::AuthenticationFailure);
    }
    let (nonce, ct) = cipher_bytes.split_at(NONCE_SIZE);
    let cipher = Aes256Gcm::new_from_slice(&key.0).expect("32-byte key");
    cipher
        .decrypt(Nonce::from_slice(nonce), Payload { msg: ct, aad: &[] })
        .map_err(|_| CryptoError::AuthenticationFailure)
}

/// Hybrid sealed box: an RSA-wrapped ephemeral key plus an AES-GCM body.
/// Payload length is unrestricted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SealedBox {
    pub wrapped_key: Vec<u8>,
    pub body: Vec<u8>,
}

/// Seal a payload to a canonically encoded recipient public key.
pub fn seal<R: RngCore + CryptoRng>(
    payload: &[u8],
    recipient_public_key: &[u8],
    rng: &mut R,
) -> Result<SealedBox, CryptoError> {
    let pk = decode_public_key(recipient_public_key)?;
    let mut ephemeral = [0u8; 32];
    rng.fill_bytes(&mut ephemeral);
    let wrapped_key = pk
        .encrypt(rng, Pkcs1v15Encrypt, &ephemeral)
        .map_err(|_| CryptoError::MalformedKey)?;
    let body = encrypt_datum(payload, &SymmetricKey(ephemeral), rng);
    Ok(SealedBox { wrapped_key, body })
}

/// Open a sealed box with the matching private key.
pub fn unseal(sealed: &SealedBox, key: &KeyPair) -> Result<Vec<u8>, CryptoError> {
    DECRYPTION_COUNTER.fetch_add(1, Ordering::Relaxed);
    let ephemeral = key
        .private
        .decrypt(Pkcs1v15Encrypt, &sealed.wrapped_key)
        .map_err(|_| CryptoError::UnsealFailure)?;
    let ephemeral: [u8; 32] = ephemeral.try_into().map_err(|_| CryptoError::UnsealFailure)?;
    decrypt_datum(&sealed.body, &SymmetricKey(ephemeral))
        .map_err(|_| CryptoError::UnsealFailure)
}
