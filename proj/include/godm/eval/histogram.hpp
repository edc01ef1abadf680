#pragma once

// Generation-quality tables: per-bin density of one feature dimension for
// real outliers vs synthetic nodes, and edge-type frequencies.

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "godm/graph/graph.hpp"
#include "godm/graph/io.hpp"

namespace godm {

struct DensityTable {
    std::vector<double> bin_edges;  // bins + 1 boundaries
    std::vector<double> real;       // fraction of real outliers per bin
    std::vector<double> synthetic;  // fraction of synthetic nodes per bin

    std::string to_csv() const {
        std::string out = "bin,lo,hi,real,synthetic\n";
        for (std::size_t b = 0; b < real.size(); ++b) {
            out += std::to_string(b) + ',';
            io_detail::append_double(out, bin_edges[b]);
            out += ',';
            io_detail::append_double(out, bin_edges[b + 1]);
            out += ',';
            io_detail::append_double(out, real[b]);
            out += ',';
            io_detail::append_double(out, synthetic[b]);
            out += '\n';
        }
        return out;
    }
};

struct TypeFrequencyTable {
    std::vector<double> real;       // index p-1: share of real outlier-incident edges of type p
    std::vector<double> synthetic;  // index p-1: share of synthetic edges of type p

    std::string to_csv() const {
        std::string out = "type,real,synthetic\n";
        for (std::size_t p = 0; p < real.size(); ++p) {
            out += std::to_string(p + 1) + ',';
            io_detail::append_double(out, real[p]);
            out += ',';
            io_detail::append_double(out, synthetic[p]);
            out += '\n';
        }
        return out;
    }
};

/// Both groups share `bins` equal-width bins spanning their pooled range; the
/// last bin is closed on the right.
inline DensityTable density_histogram(const Graph& real, const Graph& synth, std::size_t dim, std::size_t bins) {
    if (dim >= real.d || dim >= synth.d)
        throw ConfigError("histogram: dimension " + std::to_string(dim) + " out of range for d=" +
                          std::to_string(std::min(real.d, synth.d)));
    if (bins < 1) throw ConfigError("histogram: need at least one bin");
    std::vector<double> a, b;
    for (std::size_t i = 0; i < real.n; ++i)
        if (real.labels[i] == kOutlier) a.push_back(real.row(i)[dim]);
    for (std::size_t i = 0; i < synth.n; ++i) b.push_back(synth.row(i)[dim]);

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* v : {&a, &b})
        for (double x : *v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    if (a.empty() && b.empty()) lo = hi = 0.0;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    DensityTable t;
    for (std::size_t k = 0; k <= bins; ++k)
        t.bin_edges.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins));
    auto fill = [&](const std::vector<double>& v) {
        std::vector<double> h(bins, 0.0);
        for (double x : v) {
            auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
            h[std::min(k, bins - 1)] += 1.0;
        }
        if (!v.empty())
            for (auto& c : h) c /= static_cast<double>(v.size());
        return h;
    };
    t.real = fill(a);
    t.synthetic = fill(b);
    return t;
}

inline TypeFrequencyTable type_frequencies(const Graph& real, const Graph& synth) {
    if (!real.has_types()) throw ConfigError("type_frequencies: graph has no edge types");
    const auto p = static_cast<std::size_t>(real.num_types);
    TypeFrequencyTable t{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
    double nr = 0.0, ns = 0.0;
    for (std::size_t e = 0; e < real.edges.size(); ++e)
        if (real.labels[real.edges[e].src] == kOutlier || real.labels[real.edges[e].dst] == kOutlier) {
            t.real[static_cast<std::size_t>(real.edge_type[e] - 1)] += 1.0;
            nr += 1.0;
        }
    for (int type : synth.edge_type) {
        if (type >= 1 && static_cast<std::size_t>(type) <= p) t.synthetic[static_cast<std::size_t>(type - 1)] += 1.0;
        ns += 1.0;
    }
    if (nr > 0)
        for (auto& c : t.real) c /= nr;
    if (ns > 0)
        for (auto& c : t.synthetic) c /= ns;
    return t;
}

}  // namespace godm
