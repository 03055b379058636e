#include "burstwatch/storage.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "burstwatch/textio.hpp"

namespace burstwatch::storage {

using ordered_json = nlohmann::ordered_json;

std::string Manifest::to_json() const {
    ordered_json j;
    j["kind"] = kind;
    j["schema_version"] = schema_version;
    j["created_at"] = created_at;
    j["config_hash"] = config_hash;
    j["path"] = path;
    j["checksum"] = checksum;
    return j.dump(2) + "\n";
}

Manifest Manifest::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("malformed manifest JSON");
    Manifest m;
    m.kind = j.at("kind").get<std::string>();
    m.schema_version = j.at("schema_version").get<int>();
    m.created_at = j.at("created_at").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.path = j.at("path").get<std::string>();
    m.checksum = j.at("checksum").get<std::string>();
    return m;
}

void DataLayout::ensure_dirs() const {
    for (const auto& dir : {streams(), events(), features(), models(), reports(), manifests()})
        std::filesystem::create_directories(dir);
}

std::filesystem::path DataLayout::manifest_for(const std::filesystem::path& payload) const {
    const auto rel = std::filesystem::relative(payload, root);
    std::string flat = rel.generic_string();
    for (char& c : flat)
        if (c == '/') c = '_';
    return manifests() / (flat + ".manifest.json");
}

namespace {

/// Scoped flock; serializes writers per target file.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& target) {
        const std::string lock_path = target.string() + ".lock";
        fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0) ::flock(fd_, LOCK_EX);
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    int fd_ = -1;
};

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("missing file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    std::filesystem::rename(tmp, path);
}

void save_artifact(const DataLayout& layout, const std::filesystem::path& payload_path,
                   const std::string& kind, int schema_version,
                   const std::string& created_at, const std::string& config_hash,
                   const std::string& payload) {
    std::filesystem::create_directories(payload_path.parent_path());
    FileLock lock(payload_path);
    write_file(payload_path, payload);

    Manifest manifest;
    manifest.kind = kind;
    manifest.schema_version = schema_version;
    manifest.created_at = created_at;
    manifest.config_hash = config_hash;
    manifest.path = std::filesystem::relative(payload_path, layout.root).generic_string();
    manifest.checksum = fnv1a64_hex(payload);
    write_file(layout.manifest_for(payload_path), manifest.to_json());
}

std::string checksum_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("missing file: " + path.string());
    std::uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

void save_manifest_for_existing(const DataLayout& layout,
                                const std::filesystem::path& payload_path,
                                const std::string& kind, int schema_version,
                                const std::string& created_at,
                                const std::string& config_hash) {
    Manifest manifest;
    manifest.kind = kind;
    manifest.schema_version = schema_version;
    manifest.created_at = created_at;
    manifest.config_hash = config_hash;
    manifest.path = std::filesystem::relative(payload_path, layout.root).generic_string();
    manifest.checksum = checksum_file(payload_path);
    write_file(layout.manifest_for(payload_path), manifest.to_json());
}

namespace {

Manifest load_and_check_header(const DataLayout& layout,
                               const std::filesystem::path& payload_path,
                               const std::string& expected_kind, int expected_version) {
    const auto manifest_path = layout.manifest_for(payload_path);
    if (!std::filesystem::exists(manifest_path))
        throw MissingArtifactError("missing manifest: " + manifest_path.string());
    if (!std::filesystem::exists(payload_path))
        throw MissingArtifactError("missing artifact: " + payload_path.string());
    const Manifest manifest = Manifest::from_json(read_file(manifest_path));
    if (manifest.kind != expected_kind)
        throw ConfigError("artifact kind mismatch: expected '" + expected_kind + "', found '" +
                          manifest.kind + "'");
    if (manifest.schema_version != expected_version)
        throw VersionMismatchError("schema version mismatch for " + payload_path.string() +
                                   ": reader v" + std::to_string(expected_version) +
                                   ", file v" + std::to_string(manifest.schema_version));
    return manifest;
}

}  // namespace

void verify_artifact(const DataLayout& layout, const std::filesystem::path& payload_path,
                     const std::string& expected_kind, int expected_version) {
    const Manifest manifest =
        load_and_check_header(layout, payload_path, expected_kind, expected_version);
    const std::string checksum = checksum_file(payload_path);
    if (checksum != manifest.checksum)
        throw ChecksumMismatchError("checksum mismatch for " + payload_path.string() +
                                    ": manifest " + manifest.checksum + ", payload " + checksum);
}

std::string load_artifact(const DataLayout& layout, const std::filesystem::path& payload_path,
                          const std::string& expected_kind, int expected_version) {
    const Manifest manifest =
        load_and_check_header(layout, payload_path, expected_kind, expected_version);
    std::string payload = read_file(payload_path);
    const std::string checksum = fnv1a64_hex(payload);
    if (checksum != manifest.checksum)
        throw ChecksumMismatchError("checksum mismatch for " + payload_path.string() +
                                    ": manifest " + manifest.checksum + ", payload " + checksum);
    return payload;
}

}  // namespace burstwatch::storage
