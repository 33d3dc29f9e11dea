#pragma once

#include <map>

#include "dssflow/config.hpp"
#include "dssflow/field.hpp"

namespace dssflow {

// Field snapshot file: magic, JSON header {L, N, components, s}, raw float64
// physical-grid array.
void write_field_file(const std::string& path, const Field& f, double s);
struct FieldSnapshot {
    Field field;
    double s;
};
FieldSnapshot read_field_file(const std::string& path);

std::uint64_t file_hash(const std::string& path);

// Run manifest: canonical config, config hash, and a content hash per emitted
// file. Reruns with identical config produce identical hashes (timestamps are
// excluded).
class Manifest {
  public:
    explicit Manifest(const RunConfig& cfg);
    Manifest() = default;

    void record(const std::string& relpath, const std::string& dir);
    void add_warning(const std::string& w);
    void set(const std::string& key, const std::string& value);
    void write(const std::string& dir) const;

    static Manifest load(const std::string& dir);
    // throws IntegrityError on the first mismatching file
    void check_hashes(const std::string& dir) const;

    const std::map<std::string, std::string>& files() const { return files_; }
    const std::string& config_text() const { return config_text_; }
    const std::map<std::string, std::string>& extra() const { return extra_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    std::string config_text_;
    std::string config_hash_;
    std::map<std::string, std::string> files_;
    std::map<std::string, std::string> extra_;
    std::vector<std::string> warnings_;
};

}  // namespace dssflow
