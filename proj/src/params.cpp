#include "ergan/params.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "ergan/errors.hpp"

namespace ergan {

std::vector<double>& ParameterStore::add(std::string name, std::vector<std::size_t> shape,
                                         double fill) {
    if (index_.count(name)) throw DataError("duplicate parameter '" + name + "'");
    std::size_t total = 1;
    for (std::size_t d : shape) total *= d;
    if (shape.empty() || total == 0) {
        throw DataError("parameter '" + name + "' has an empty shape");
    }
    index_.emplace(name, entries_.size());
    entries_.push_back(ParamEntry{std::move(name), std::move(shape),
                                  std::vector<double>(total, fill)});
    return entries_.back().values;
}

ParamEntry& ParameterStore::entry(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw DataError("unknown parameter '" + std::string(name) + "'");
    return entries_[it->second];
}

const ParamEntry& ParameterStore::entry(std::string_view name) const {
    return const_cast<ParameterStore*>(this)->entry(name);
}

std::size_t ParameterStore::total_size() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.size();
    return n;
}

void ParameterStore::require_finite(std::string_view context) const {
    for (const auto& e : entries_) {
        for (double v : e.values) {
            if (!std::isfinite(v)) {
                throw NumericError(std::string(context) + ": non-finite value in parameter '" +
                                   e.name + "'");
            }
        }
    }
}

ParameterStore ParameterStore::zeros_like(const ParameterStore& other) {
    ParameterStore out;
    for (const auto& e : other.entries_) out.add(e.name, e.shape, 0.0);
    return out;
}

bool ParameterStore::congruent(const ParameterStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name != other.entries_[i].name) return false;
        if (entries_[i].shape != other.entries_[i].shape) return false;
    }
    return true;
}

bool operator==(const ParameterStore& a, const ParameterStore& b) {
    if (!a.congruent(b)) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        if (a.entries_[i].values != b.entries_[i].values) return false;
    }
    return true;
}

void write_param_block(const ParameterStore& store, std::ostream& out) {
    out << "params " << store.entries().size() << "\n";
    char buf[48];
    for (const ParamEntry& e : store.entries()) {
        out << "param " << e.name << " " << e.shape.size();
        for (std::size_t d : e.shape) out << " " << d;
        out << "\n";
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%a", e.values[i]);
            out << (i ? " " : "") << buf;
        }
        out << "\n";
    }
}

ParameterStore read_param_block(std::istream& in) {
    std::string tok;
    if (!(in >> tok) || tok != "params") throw DataError("param block: expected 'params'");
    std::size_t count = 0;
    if (!(in >> count)) throw DataError("param block: bad count");
    ParameterStore store;
    for (std::size_t p = 0; p < count; ++p) {
        if (!(in >> tok) || tok != "param") throw DataError("param block: expected 'param'");
        std::string name;
        std::size_t ndim = 0;
        if (!(in >> name >> ndim) || ndim == 0 || ndim > 4) {
            throw DataError("param block: bad entry header");
        }
        std::vector<std::size_t> shape(ndim);
        for (std::size_t& d : shape) {
            if (!(in >> d) || d == 0) throw DataError("param block: bad shape");
        }
        auto& values = store.add(name, shape);
        for (double& v : values) {
            if (!(in >> tok)) throw DataError("param block: truncated values for '" + name + "'");
            char* end = nullptr;
            v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size()) {
                throw DataError("param block: bad value for '" + name + "'");
            }
        }
    }
    return store;
}

}  // namespace ergan
