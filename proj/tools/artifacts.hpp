#pragma once

// File plumbing shared by the subcommands: digests, atomic writes and run
// manifests.  A manifest separates deterministic content (parameters, seeds,
// digests) from the "timing" block so two reruns differ only there.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace spinbench::cli {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data);

/// Whole file; InputError when unreadable.
std::string read_file(const fs::path& path);

/// Writes to a sibling temporary and renames over `path`.
void write_atomic(const fs::path& path, std::string_view content);

/// SPINBENCH_WORKERS, default 1.  InputError on garbage.
int worker_count();

class Manifest {
public:
    explicit Manifest(std::string command);

    nlohmann::json& parameters() { return doc_["parameters"]; }
    nlohmann::json& timing() { return doc_["timing"]; }
    void add_seed(std::uint64_t seed) { doc_["seeds"].push_back(seed); }
    void add_input(const fs::path& path, std::string_view content);
    /// Writes the artifact atomically and records its digest.
    void write_output(const fs::path& path, std::string_view content);

    /// Stamps wall time and writes the manifest itself.
    void finish(const fs::path& manifest_path);

    const nlohmann::json& json() const { return doc_; }

private:
    nlohmann::json doc_;
    std::chrono::steady_clock::time_point start_;
};

/// "<dir>/manifest.json" for directory outputs, "<file>.manifest.json" otherwise.
fs::path manifest_for_dir(const fs::path& dir);
fs::path manifest_for_file(const fs::path& file);

}  // namespace spinbench::cli
