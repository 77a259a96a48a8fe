#pragma once

// Data model for bias-carrying two-body Ising instances.
//
// All coupling and bias values are stored as integers scaled by a common
// power-of-ten denominator, so energies of integer (or decimal) instances
// are computed exactly.  The energy convention is
//
//     E(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i
//
// so J < 0 is ferromagnetic.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinbench/errors.hpp"

namespace spinbench {

/// Exact decimal number: scaled / denominator, denominator a power of ten.
struct Decimal {
    std::int64_t scaled = 0;
    std::int64_t denominator = 1;

    double to_double() const { return static_cast<double>(scaled) / static_cast<double>(denominator); }
    std::string to_string() const;

    /// Parses "-12", "3.25", "+0.5".  Rejects exponents, nan and inf.
    static Decimal parse(std::string_view text);

    friend bool operator==(const Decimal& a, const Decimal& b);
    friend bool operator<(const Decimal& a, const Decimal& b);
};

/// Rescales `value` (given at `from` denominator) to the larger power-of-ten `to`.
std::int64_t rescale(std::int64_t value, std::int64_t from, std::int64_t to);

struct TopologyTag {
    enum class Kind { general, chimera, logical_square, anticluster };
    Kind kind = Kind::general;
    int size = 0;  // cells per side; unused for general

    std::string to_string() const;
    static TopologyTag parse(std::string_view text);
    friend bool operator==(const TopologyTag&, const TopologyTag&) = default;
};

class SpinConfiguration {
public:
    SpinConfiguration() = default;
    explicit SpinConfiguration(std::vector<std::int8_t> spins);

    static SpinConfiguration uniform(int n, std::int8_t value = 1);

    int size() const { return static_cast<int>(spins_.size()); }
    std::int8_t operator[](int i) const { return spins_[static_cast<std::size_t>(i)]; }
    const std::vector<std::int8_t>& spins() const { return spins_; }

    SpinConfiguration flipped(int i) const;
    SpinConfiguration negated() const;

    friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

private:
    std::vector<std::int8_t> spins_;
};

struct Coupling {
    int i = 0;
    int j = 0;
    std::int64_t value = 0;  // scaled by IsingInstance::denominator
    friend bool operator==(const Coupling&, const Coupling&) = default;
};

struct Bias {
    int i = 0;
    std::int64_t value = 0;
    friend bool operator==(const Bias&, const Bias&) = default;
};

struct InstanceMetadata {
    std::string generator;
    std::map<std::string, std::string> params;  // alpha, rho, R, seed, ...
    std::string rng;
    friend bool operator==(const InstanceMetadata&, const InstanceMetadata&) = default;
};

struct IsingInstance {
    int n = 0;
    std::int64_t denominator = 1;
    std::vector<Coupling> couplings;
    std::vector<Bias> biases;
    TopologyTag topology;
    std::optional<SpinConfiguration> planted;
    InstanceMetadata metadata;

    bool has_biases() const;
    Decimal value(std::int64_t scaled) const { return {scaled, denominator}; }

    /// Couplings sorted by (i, j), zero couplings and zero biases removed.
    IsingInstance canonical() const;

    /// Numeric content only (n, couplings, biases); tags and metadata ignored.
    bool same_terms(const IsingInstance& other) const;
};

Decimal energy(const IsingInstance& instance, const SpinConfiguration& config);
/// Energy in units of 1/denominator, no allocation.
std::int64_t energy_scaled(const IsingInstance& instance, std::span<const std::int8_t> spins);

IsingInstance parse_instance(std::istream& in);
IsingInstance parse_instance(std::string_view text);
std::string serialize_instance(const IsingInstance& instance);

std::vector<std::string> validate_instance(const IsingInstance& instance);

/// Per-site adjacency built from the nonzero couplings.
struct Adjacency {
    struct Entry {
        int neighbor;
        std::int64_t coupling;
    };
    std::vector<std::vector<Entry>> sites;

    explicit Adjacency(const IsingInstance& instance);
    int size() const { return static_cast<int>(sites.size()); }
};

}  // namespace spinbench
