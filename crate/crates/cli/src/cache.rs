//! One file per artifact kind: a header line with the SHA-256 of the input
//! text, then the canonical serialization.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use h4_core::pipeline::{ArtifactKind, ArtifactStore};
use sha2::{Digest, Sha256};

const HEADER: &str = "# inputs sha256 ";

pub struct DiskStore {
    dir: PathBuf,
}

pub fn input_hash(inputs: &str) -> String {
    hex::encode(Sha256::digest(inputs.as_bytes()))
}

impl DiskStore {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir }
    }

    pub fn path(&self, kind: ArtifactKind) -> PathBuf {
        self.dir.join(format!("{kind}.txt"))
    }
}

impl ArtifactStore for DiskStore {
    fn load(&self, kind: ArtifactKind, inputs: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(kind)).ok()?;
        let (header, body) = text.split_once('\n')?;
        (header.strip_prefix(HEADER)? == input_hash(inputs)).then(|| body.to_string())
    }

    fn save(&self, kind: ArtifactKind, inputs: &str, body: &str) -> h4_core::Result<()> {
        let io = |e: std::io::Error| h4_core::Error::InvalidParameter(format!("writing cache {}: {e}", self.dir.display()));
        fs::create_dir_all(&self.dir).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        write!(tmp, "{HEADER}{}\n{body}", input_hash(inputs)).map_err(io)?;
        tmp.persist(self.path(kind)).map_err(|e| io(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_requires_the_same_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let store = DiskStore::new(dir.path().join("c"));
        assert!(store.load(ArtifactKind::Tau, "a").is_none());
        store.save(ArtifactKind::Tau, "a", "body\nline\n").unwrap();
        assert_eq!(store.load(ArtifactKind::Tau, "a").as_deref(), Some("body\nline\n"));
        assert!(store.load(ArtifactKind::Tau, "b").is_none());
        assert!(store.load(ArtifactKind::Group, "a").is_none());
        let text = fs::read_to_string(store.path(ArtifactKind::Tau)).unwrap();
        assert!(text.starts_with(&format!("{HEADER}{}\n", input_hash("a"))));
    }
}
