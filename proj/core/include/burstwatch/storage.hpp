#pragma once

#include <filesystem>
#include <string>

#include "burstwatch/errors.hpp"

namespace burstwatch::storage {

class MissingArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChecksumMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VersionMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sidecar metadata for every persisted artifact. `created_at` is the
/// artifact's logical data time (propagated from the stream origin), so
/// identical inputs serialize byte-identically.
struct Manifest {
    std::string kind;
    int schema_version = 1;
    std::string created_at;
    std::string config_hash;
    std::string path;      // payload path relative to the data root
    std::string checksum;  // fnv1a64 hex of the payload bytes

    std::string to_json() const;
    static Manifest from_json(const std::string& text);
};

/// Standard directory layout under a data root.
struct DataLayout {
    std::filesystem::path root;

    std::filesystem::path streams() const { return root / "data" / "streams"; }
    std::filesystem::path events() const { return root / "data" / "events"; }
    std::filesystem::path features() const { return root / "data" / "features"; }
    std::filesystem::path models() const { return root / "models"; }
    std::filesystem::path reports() const { return root / "reports"; }
    std::filesystem::path manifests() const { return root / "manifests"; }

    void ensure_dirs() const;
    std::filesystem::path manifest_for(const std::filesystem::path& payload) const;
};

/// Writes payload + manifest atomically-ish (tmp file, rename) under an
/// exclusive per-file lock.
void save_artifact(const DataLayout& layout, const std::filesystem::path& payload_path,
                   const std::string& kind, int schema_version,
                   const std::string& created_at, const std::string& config_hash,
                   const std::string& payload);

/// Loads and verifies. Distinct errors: MissingArtifactError (payload or
/// manifest absent), ChecksumMismatchError, VersionMismatchError (message
/// names both versions), ConfigError (kind mismatch).
std::string load_artifact(const DataLayout& layout, const std::filesystem::path& payload_path,
                          const std::string& expected_kind, int expected_version);

/// Manifest-less helpers for plain reads/writes.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Chunked fnv1a64 of a file on disk (streams, for multi-hundred-MB payloads).
std::string checksum_file(const std::filesystem::path& path);

/// Writes a manifest for a payload that is already on disk.
void save_manifest_for_existing(const DataLayout& layout,
                                const std::filesystem::path& payload_path,
                                const std::string& kind, int schema_version,
                                const std::string& created_at,
                                const std::string& config_hash);

/// Verifies kind/version/checksum without loading the payload into memory.
void verify_artifact(const DataLayout& layout, const std::filesystem::path& payload_path,
                     const std::string& expected_kind, int expected_version);

}  // namespace burstwatch::storage
