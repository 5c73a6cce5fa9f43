#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ergan {

struct ParamEntry {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;  // row-major, size = product(shape)

    std::size_t size() const { return values.size(); }
};

// Ordered, named, shaped flat arrays holding all trainable weights of one
// network. Entry order is part of the identity (serialization and optimizer
// state walk entries in order).
class ParameterStore {
public:
    std::vector<double>& add(std::string name, std::vector<std::size_t> shape,
                             double fill = 0.0);

    bool has(std::string_view name) const { return index_.count(std::string(name)) > 0; }
    ParamEntry& entry(std::string_view name);
    const ParamEntry& entry(std::string_view name) const;

    std::span<ParamEntry> entries() { return entries_; }
    std::span<const ParamEntry> entries() const { return entries_; }
    std::size_t total_size() const;

    // Throws NumericError naming the offending entry.
    void require_finite(std::string_view context) const;

    // Same names/shapes, values zeroed.
    static ParameterStore zeros_like(const ParameterStore& other);

    // True when names, shapes and entry order all match.
    bool congruent(const ParameterStore& other) const;

    friend bool operator==(const ParameterStore&, const ParameterStore&);

private:
    std::vector<ParamEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Text parameter block, one `param <name> <ndim> <dims...>` line followed by
// one line of %a-encoded (hexadecimal, lossless) values per entry. Used by
// checkpoints; round-trips bit-exactly.
void write_param_block(const ParameterStore& store, std::ostream& out);
ParameterStore read_param_block(std::istream& in);

}  // namespace ergan
