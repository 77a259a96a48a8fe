#include "spinbench/ising.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace spinbench {

namespace {

constexpr int kMaxDecimals = 15;

bool is_power_of_ten(std::int64_t d) {
    if (d < 1) return false;
    while (d % 10 == 0) d /= 10;
    return d == 1;
}

std::int64_t pow10(int k) {
    std::int64_t p = 1;
    for (int i = 0; i < k; ++i) p *= 10;
    return p;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t' && s[pos] != '\r') ++pos;
        if (pos > start) out.push_back(s.substr(start, pos - start));
    }
    return out;
}

bool parse_index(std::string_view s, long long& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

// ---------------------------------------------------------------- Decimal

Decimal Decimal::parse(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) throw InputError("empty numeric value");
    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::int64_t mantissa = 0;
    int decimals = 0;
    bool seen_point = false;
    bool seen_digit = false;
    for (char ch : s) {
        if (ch == '.') {
            if (seen_point) throw InputError("malformed number '" + std::string(text) + "'");
            seen_point = true;
            continue;
        }
        if (ch < '0' || ch > '9') {
            throw InputError("non-finite or malformed number '" + std::string(text) + "'");
        }
        seen_digit = true;
        if (mantissa > (std::numeric_limits<std::int64_t>::max() - 9) / 10) {
            throw InputError("numeric value out of range '" + std::string(text) + "'");
        }
        mantissa = mantissa * 10 + (ch - '0');
        if (seen_point && ++decimals > kMaxDecimals) {
            throw InputError("too many decimal places in '" + std::string(text) + "'");
        }
    }
    if (!seen_digit) throw InputError("malformed number '" + std::string(text) + "'");
    Decimal d{negative ? -mantissa : mantissa, pow10(decimals)};
    while (d.denominator > 1 && d.scaled % 10 == 0) {
        d.scaled /= 10;
        d.denominator /= 10;
    }
    return d;
}

std::string Decimal::to_string() const {
    if (denominator == 1) return std::to_string(scaled);
    std::int64_t den = denominator;
    std::int64_t num = scaled;
    while (den > 1 && num % 10 == 0) {
        num /= 10;
        den /= 10;
    }
    if (den == 1) return std::to_string(num);
    const bool negative = num < 0;
    const std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(num) : static_cast<std::uint64_t>(num);
    const auto uden = static_cast<std::uint64_t>(den);
    std::string frac = std::to_string(mag % uden);
    int width = 0;
    for (std::int64_t d = den; d > 1; d /= 10) ++width;
    frac.insert(0, static_cast<std::size_t>(width) - frac.size(), '0');
    return (negative ? "-" : "") + std::to_string(mag / uden) + "." + frac;
}

bool operator==(const Decimal& a, const Decimal& b) {
    return static_cast<__int128>(a.scaled) * b.denominator == static_cast<__int128>(b.scaled) * a.denominator;
}

bool operator<(const Decimal& a, const Decimal& b) {
    return static_cast<__int128>(a.scaled) * b.denominator < static_cast<__int128>(b.scaled) * a.denominator;
}

std::int64_t rescale(std::int64_t value, std::int64_t from, std::int64_t to) {
    if (from == to) return value;
    if (from <= 0 || to % from != 0) throw InputError("incompatible denominators");
    const __int128 r = static_cast<__int128>(value) * (to / from);
    if (r > std::numeric_limits<std::int64_t>::max() || r < std::numeric_limits<std::int64_t>::min()) {
        throw InputError("value overflow while rescaling");
    }
    return static_cast<std::int64_t>(r);
}

// ------------------------------------------------------------ TopologyTag

std::string TopologyTag::to_string() const {
    switch (kind) {
        case Kind::chimera: return "chimera(" + std::to_string(size) + ")";
        case Kind::logical_square: return "logical_square(" + std::to_string(size) + ")";
        case Kind::anticluster: return "anticluster(" + std::to_string(size) + ")";
        case Kind::general: break;
    }
    return "general";
}

TopologyTag TopologyTag::parse(std::string_view text) {
    text = trim(text);
    if (text == "general") return {};
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw InputError("bad topology tag '" + std::string(text) + "'");
    }
    const std::string_view name = text.substr(0, open);
    long long c = 0;
    if (!parse_index(text.substr(open + 1, text.size() - open - 2), c) || c < 1) {
        throw InputError("bad topology size in '" + std::string(text) + "'");
    }
    TopologyTag tag;
    tag.size = static_cast<int>(c);
    if (name == "chimera") tag.kind = Kind::chimera;
    else if (name == "logical_square") tag.kind = Kind::logical_square;
    else if (name == "anticluster") tag.kind = Kind::anticluster;
    else throw InputError("unknown topology '" + std::string(name) + "'");
    return tag;
}

// ------------------------------------------------------- SpinConfiguration

SpinConfiguration::SpinConfiguration(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    for (auto s : spins_) {
        if (s != 1 && s != -1) throw InputError("spin values must be +1 or -1");
    }
}

SpinConfiguration SpinConfiguration::uniform(int n, std::int8_t value) {
    return SpinConfiguration(std::vector<std::int8_t>(static_cast<std::size_t>(n), value));
}

SpinConfiguration SpinConfiguration::flipped(int i) const {
    SpinConfiguration out = *this;
    out.spins_.at(static_cast<std::size_t>(i)) = static_cast<std::int8_t>(-out.spins_[static_cast<std::size_t>(i)]);
    return out;
}

SpinConfiguration SpinConfiguration::negated() const {
    SpinConfiguration out = *this;
    for (auto& s : out.spins_) s = static_cast<std::int8_t>(-s);
    return out;
}

// ------------------------------------------------------------- IsingInstance

bool IsingInstance::has_biases() const {
    return std::any_of(biases.begin(), biases.end(), [](const Bias& b) { return b.value != 0; });
}

IsingInstance IsingInstance::canonical() const {
    IsingInstance out = *this;
    std::erase_if(out.couplings, [](const Coupling& c) { return c.value == 0; });
    std::erase_if(out.biases, [](const Bias& b) { return b.value == 0; });
    std::sort(out.couplings.begin(), out.couplings.end(),
              [](const Coupling& a, const Coupling& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    std::sort(out.biases.begin(), out.biases.end(), [](const Bias& a, const Bias& b) { return a.i < b.i; });
    return out;
}

bool IsingInstance::same_terms(const IsingInstance& other) const {
    if (n != other.n) return false;
    const IsingInstance a = canonical();
    const IsingInstance b = other.canonical();
    if (a.couplings.size() != b.couplings.size() || a.biases.size() != b.biases.size()) return false;
    for (std::size_t k = 0; k < a.couplings.size(); ++k) {
        const auto& x = a.couplings[k];
        const auto& y = b.couplings[k];
        if (x.i != y.i || x.j != y.j || !(a.value(x.value) == b.value(y.value))) return false;
    }
    for (std::size_t k = 0; k < a.biases.size(); ++k) {
        const auto& x = a.biases[k];
        const auto& y = b.biases[k];
        if (x.i != y.i || !(a.value(x.value) == b.value(y.value))) return false;
    }
    return true;
}

std::int64_t energy_scaled(const IsingInstance& instance, std::span<const std::int8_t> spins) {
    if (static_cast<int>(spins.size()) != instance.n) {
        throw InputError("configuration length " + std::to_string(spins.size()) + " does not match n = " +
                         std::to_string(instance.n));
    }
    std::int64_t e = 0;
    for (const auto& c : instance.couplings) {
        e += c.value * spins[static_cast<std::size_t>(c.i)] * spins[static_cast<std::size_t>(c.j)];
    }
    for (const auto& b : instance.biases) e += b.value * spins[static_cast<std::size_t>(b.i)];
    return e;
}

Decimal energy(const IsingInstance& instance, const SpinConfiguration& config) {
    return {energy_scaled(instance, config.spins()), instance.denominator};
}

// ----------------------------------------------------------------- file I/O

IsingInstance parse_instance(std::istream& in) {
    struct RawTerm {
        int i, j;
        Decimal v;
    };
    std::vector<RawTerm> terms;
    std::optional<long long> n;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
        const auto tokens = split_ws(s);
        if (!n) {
            long long value = 0;
            if (tokens.size() != 1 || !parse_index(tokens[0], value) || value < 0 ||
                value > std::numeric_limits<int>::max()) {
                throw InputError(where() + "malformed variable count '" + std::string(s) + "'");
            }
            n = value;
            continue;
        }
        long long i = 0;
        long long j = 0;
        if (tokens.size() != 3 || !parse_index(tokens[0], i) || !parse_index(tokens[1], j)) {
            throw InputError(where() + "malformed line '" + std::string(s) + "'");
        }
        if (i < 0 || j < 0 || i >= *n || j >= *n) throw InputError(where() + "index out of range");
        if (i > j) throw InputError(where() + "malformed line: expected i <= j");
        Decimal v;
        try {
            v = Decimal::parse(tokens[2]);
        } catch (const InputError& e) {
            throw InputError(where() + e.what());
        }
        terms.push_back({static_cast<int>(i), static_cast<int>(j), v});
    }
    if (!n) throw InputError("missing variable count line");

    IsingInstance out;
    out.n = static_cast<int>(*n);
    for (const auto& t : terms) out.denominator = std::max(out.denominator, t.v.denominator);
    std::set<std::pair<int, int>> seen;
    for (const auto& t : terms) {
        if (!seen.insert({t.i, t.j}).second) {
            throw InputError("duplicate pair (" + std::to_string(t.i) + ", " + std::to_string(t.j) + ")");
        }
        const std::int64_t v = rescale(t.v.scaled, t.v.denominator, out.denominator);
        if (t.i == t.j) out.biases.push_back({t.i, v});
        else out.couplings.push_back({t.i, t.j, v});
    }
    return out;
}

IsingInstance parse_instance(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_instance(in);
}

std::string serialize_instance(const IsingInstance& instance) {
    const IsingInstance c = instance.canonical();
    std::string out = std::to_string(c.n) + "\n";
    for (const auto& t : c.couplings) {
        out += std::to_string(t.i) + " " + std::to_string(t.j) + " " + c.value(t.value).to_string() + "\n";
    }
    for (const auto& b : c.biases) {
        out += std::to_string(b.i) + " " + std::to_string(b.i) + " " + c.value(b.value).to_string() + "\n";
    }
    return out;
}

std::vector<std::string> validate_instance(const IsingInstance& instance) {
    std::vector<std::string> violations;
    if (instance.n < 0) violations.emplace_back("negative variable count");
    if (!is_power_of_ten(instance.denominator)) violations.emplace_back("denominator must be a power of ten");
    const auto in_range = [&](int k) { return k >= 0 && k < instance.n; };
    std::set<std::pair<int, int>> pairs;
    for (const auto& c : instance.couplings) {
        const std::string tag = " at (" + std::to_string(c.i) + ", " + std::to_string(c.j) + ")";
        if (!in_range(c.i) || !in_range(c.j)) violations.push_back("index out of range" + tag);
        if (c.i >= c.j) violations.push_back("i<j ordering" + tag);
        if (!pairs.insert(std::minmax(c.i, c.j)).second) violations.push_back("duplicate pair" + tag);
    }
    std::set<int> bias_sites;
    for (const auto& b : instance.biases) {
        const std::string tag = " at bias " + std::to_string(b.i);
        if (!in_range(b.i)) violations.push_back("index out of range" + tag);
        if (!bias_sites.insert(b.i).second) violations.push_back("duplicate bias" + tag);
    }
    if (instance.planted && instance.planted->size() != instance.n) {
        violations.emplace_back("planted configuration length mismatch");
    }
    if (instance.metadata.generator == "fcl") {
        const auto it = instance.metadata.params.find("rho");
        if (it != instance.metadata.params.end()) {
            const long long rho = std::stoll(it->second);
            for (const auto& c : instance.couplings) {
                if (c.value % instance.denominator != 0) {
                    violations.emplace_back("fcl coupling is not an integer");
                    break;
                }
                if (std::abs(c.value / instance.denominator) > rho) {
                    violations.emplace_back("fcl coupling exceeds precision bound");
                    break;
                }
            }
        }
    }
    return violations;
}

Adjacency::Adjacency(const IsingInstance& instance) : sites(static_cast<std::size_t>(instance.n)) {
    for (const auto& c : instance.couplings) {
        if (c.value == 0) continue;
        sites[static_cast<std::size_t>(c.i)].push_back({c.j, c.value});
        sites[static_cast<std::size_t>(c.j)].push_back({c.i, c.value});
    }
}

}  // namespace spinbench
