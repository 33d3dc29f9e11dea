#include "dssflow/artifact.hpp"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "dssflow/errors.hpp"
#include "dssflow/util.hpp"
#include "json.hpp"

namespace dssflow {

namespace {
constexpr char kFieldMagic[9] = "DSSFLD01";
}

void write_field_file(const std::string& path, const Field& f, double s) {
    nlohmann::json hdr = {
        {"L", f.box().L}, {"N", f.box().N}, {"components", f.ncomp()}, {"s", s}};
    std::string hs = hdr.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(kFieldMagic, 8);
    std::uint64_t len = hs.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(hs.data(), hs.size());
    const RealVec& v = f.phys();
    out.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
}

FieldSnapshot read_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw IntegrityError("bad field file magic: " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    nlohmann::json hdr = nlohmann::json::parse(hs);
    BoxPtr box = Box::make(hdr.at("L").get<double>(), hdr.at("N").get<int>());
    Field f(box, hdr.at("components").get<int>());
    RealVec& v = f.phys_raw();
    in.read(reinterpret_cast<char*>(v.data()), v.size() * sizeof(double));
    if (!in) throw IntegrityError("truncated field file: " + path);
    return {std::move(f), hdr.at("s").get<double>()};
}

std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (in.good()) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        if (got > 0) h = fnv1a(buf, std::size_t(got), h);
    }
    return h;
}

Manifest::Manifest(const RunConfig& cfg) {
    config_text_ = cfg.canonical();
    config_hash_ = hash_hex(cfg.hash());
}

void Manifest::record(const std::string& relpath, const std::string& dir) {
    files_[relpath] = hash_hex(file_hash(dir + "/" + relpath));
}

void Manifest::add_warning(const std::string& w) { warnings_.push_back(w); }

void Manifest::set(const std::string& key, const std::string& value) { extra_[key] = value; }

void Manifest::write(const std::string& dir) const {
    nlohmann::json j;
    j["config"] = config_text_;
    j["config_hash"] = config_hash_;
    j["version"] = "0.1.0";
    j["files"] = files_;
    j["extra"] = extra_;
    j["warnings"] = warnings_;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    j["created_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    std::ofstream out(dir + "/manifest.json");
    if (!out) throw Error("cannot write manifest in " + dir);
    out << j.dump(2) << "\n";
}

Manifest Manifest::load(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw Error("no manifest.json in " + dir);
    nlohmann::json j = nlohmann::json::parse(in);
    Manifest m;
    m.config_text_ = j.at("config").get<std::string>();
    m.config_hash_ = j.at("config_hash").get<std::string>();
    m.files_ = j.at("files").get<std::map<std::string, std::string>>();
    if (j.contains("extra")) m.extra_ = j.at("extra").get<std::map<std::string, std::string>>();
    if (j.contains("warnings")) m.warnings_ = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

void Manifest::check_hashes(const std::string& dir) const {
    for (const auto& [rel, expect] : files_) {
        std::string path = dir + "/" + rel;
        if (!std::filesystem::exists(path))
            throw IntegrityError("artifact file missing: " + rel);
        std::string got = hash_hex(file_hash(path));
        if (got != expect)
            throw IntegrityError("artifact file hash mismatch: " + rel + " (expected " + expect +
                                 ", got " + got + ")");
    }
}

}  // namespace dssflow
