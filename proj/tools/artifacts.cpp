#include "artifacts.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "spinbench/errors.hpp"
#include "spinbench/random.hpp"

namespace spinbench::cli {

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[md[k] >> 4];
        out += hex[md[k] & 15];
    }
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) throw InputError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

int worker_count() {
    const char* raw = std::getenv("SPINBENCH_WORKERS");
    if (!raw || !*raw) return 1;
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw InputError(std::string("SPINBENCH_WORKERS must be 1..1024, got '") + raw + "'");
    return static_cast<int>(v);
}

Manifest::Manifest(std::string command) : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["rng"] = Rng::kAlgorithm;
    doc_["digest"] = "sha256";
    doc_["parameters"] = nlohmann::json::object();
    doc_["seeds"] = nlohmann::json::array();
    doc_["inputs"] = nlohmann::json::array();
    doc_["outputs"] = nlohmann::json::array();
    doc_["timing"] = nlohmann::json::object();
}

void Manifest::add_input(const fs::path& path, std::string_view content) {
    doc_["inputs"].push_back({{"path", path.generic_string()}, {"sha256", sha256_hex(content)}});
}

void Manifest::write_output(const fs::path& path, std::string_view content) {
    write_atomic(path, content);
    doc_["outputs"].push_back({{"path", path.filename().generic_string()}, {"sha256", sha256_hex(content)}});
}

void Manifest::finish(const fs::path& manifest_path) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    doc_["timing"]["finished_utc"] = stamp;
    doc_["timing"]["wall_seconds"] = elapsed;
    write_atomic(manifest_path, doc_.dump(2) + "\n");
}

fs::path manifest_for_dir(const fs::path& dir) { return dir / "manifest.json"; }

fs::path manifest_for_file(const fs::path& file) {
    fs::path m = file;
    m += ".manifest.json";
    return m;
}

}  // namespace spinbench::cli
