#pragma once

// Graph directory layout:
//   meta.json     {"n": int, "d": int, "P": int, "has_time": bool, "directed": true}
//   features.csv  n rows of d comma-separated floats, no header
//   labels.csv    header "node_id,label,split"; label in {0,1,-1}; split in {train,val,test,none}
//   edges.csv     header "src,dst[,time][,type]"
// Edges are directed; undirected graphs list both directions.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "godm/graph/graph.hpp"

namespace godm {

namespace io_detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

template <class T>
T parse_number(std::string_view s, const std::string& file, std::size_t row) {
    T v{};
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
        throw IoError(file + " row " + std::to_string(row) + ": cannot parse '" + std::string(s) + "'", row);
    }
    return v;
}

inline void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("write failed for " + p.string());
}

inline const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        default: return "none";
    }
}

}  // namespace io_detail

inline void save_graph(const Graph& g, const std::filesystem::path& dir) {
    g.validate();
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json meta = {
        {"n", g.n}, {"d", g.d}, {"P", g.num_types}, {"has_time", g.timed}, {"directed", true}};
    io_detail::write_text(dir / "meta.json", meta.dump() + "\n");

    std::string text;
    text.reserve(g.n * g.d * 12);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.d; ++j) {
            if (j) text += ',';
            io_detail::append_double(text, g.features[i * g.d + j]);
        }
        text += '\n';
    }
    io_detail::write_text(dir / "features.csv", text);

    text = "node_id,label,split\n";
    for (std::size_t i = 0; i < g.n; ++i) {
        text += std::to_string(i) + ',' + std::to_string(g.labels[i]) + ',' + io_detail::split_name(g.split[i]) + '\n';
    }
    io_detail::write_text(dir / "labels.csv", text);

    text = "src,dst";
    if (g.timed) text += ",time";
    if (g.has_types()) text += ",type";
    text += '\n';
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        text += std::to_string(g.edges[e].src) + ',' + std::to_string(g.edges[e].dst);
        if (g.timed) text += ',' + std::to_string(g.edge_time[e]);
        if (g.has_types()) text += ',' + std::to_string(g.edge_type[e]);
        text += '\n';
    }
    io_detail::write_text(dir / "edges.csv", text);
}

inline Graph load_graph(const std::filesystem::path& dir) {
    using io_detail::parse_number;
    Graph g;
    {
        const auto path = dir / "meta.json";
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path.string());
        nlohmann::json meta;
        try {
            in >> meta;
            for (const auto& [key, _] : meta.items())
                if (key != "n" && key != "d" && key != "P" && key != "has_time" && key != "directed")
                    throw IoError("meta.json: unknown key '" + key + "'");
            g.n = meta.at("n").get<std::size_t>();
            g.d = meta.at("d").get<std::size_t>();
            g.num_types = meta.at("P").get<int>();
            g.timed = meta.at("has_time").get<bool>();
            if (meta.contains("directed") && !meta.at("directed").get<bool>())
                throw IoError("meta.json: only directed edge lists are supported (list both directions)");
        } catch (const nlohmann::json::exception& e) {
            throw IoError(std::string("meta.json: ") + e.what());
        }
        if (g.num_types < 0) throw IoError("meta.json: P must be >= 0");
    }

    {
        const std::string file = "features.csv";
        const auto lines = io_detail::read_lines(dir / file);
        if (lines.size() != g.n)
            throw IoError(file + ": expected " + std::to_string(g.n) + " rows, found " + std::to_string(lines.size()));
        g.features.resize(g.n * g.d);
        for (std::size_t i = 0; i < g.n; ++i) {
            const auto cells = g.d == 0 && lines[i].empty() ? std::vector<std::string_view>{}
                                                            : io_detail::split_csv(lines[i]);
            if (cells.size() != g.d)
                throw IoError(file + " row " + std::to_string(i + 1) + ": expected " + std::to_string(g.d) +
                                  " values, found " + std::to_string(cells.size()),
                              i + 1);
            for (std::size_t j = 0; j < g.d; ++j) g.features[i * g.d + j] = parse_number<double>(cells[j], file, i + 1);
        }
    }

    {
        const std::string file = "labels.csv";
        const auto lines = io_detail::read_lines(dir / file);
        if (lines.empty() || lines[0] != "node_id,label,split") throw IoError(file + ": missing header 'node_id,label,split'", 1);
        if (lines.size() != g.n + 1)
            throw IoError(file + ": expected " + std::to_string(g.n) + " data rows, found " +
                          std::to_string(lines.size() - 1));
        g.labels.assign(g.n, kUnknown);
        g.split.assign(g.n, Split::None);
        std::vector<bool> seen(g.n, false);
        for (std::size_t r = 1; r < lines.size(); ++r) {
            const auto cells = io_detail::split_csv(lines[r]);
            if (cells.size() != 3) throw IoError(file + " row " + std::to_string(r + 1) + ": expected 3 columns", r + 1);
            const auto id = parse_number<std::size_t>(cells[0], file, r + 1);
            if (id >= g.n || seen[id])
                throw IoError(file + " row " + std::to_string(r + 1) + ": node id out of range or repeated", r + 1);
            seen[id] = true;
            const int label = parse_number<int>(cells[1], file, r + 1);
            if (label != kInlier && label != kOutlier && label != kUnknown)
                throw IoError(file + " row " + std::to_string(r + 1) + ": label must be 0, 1 or -1", r + 1);
            g.labels[id] = label;
            const auto s = cells[2];
            if (s == "train") g.split[id] = Split::Train;
            else if (s == "val") g.split[id] = Split::Val;
            else if (s == "test") g.split[id] = Split::Test;
            else if (s == "none") g.split[id] = Split::None;
            else throw IoError(file + " row " + std::to_string(r + 1) + ": unknown split '" + std::string(s) + "'", r + 1);
            if (g.split[id] != Split::None && label == kUnknown)
                throw IoError(file + " row " + std::to_string(r + 1) + ": masked node has unknown label", r + 1);
        }
    }

    {
        const std::string file = "edges.csv";
        const auto lines = io_detail::read_lines(dir / file);
        std::string header = "src,dst";
        if (g.timed) header += ",time";
        if (g.has_types()) header += ",type";
        if (lines.empty()) throw IoError(file + ": missing header", 1);
        if (lines[0] != header) {
            const auto cols = io_detail::split_csv(lines[0]);
            const bool typed_file = std::find(cols.begin(), cols.end(), "type") != cols.end();
            if (typed_file && !g.has_types()) throw IoError(file + ": typed edges present but meta.json has P = 0", 1);
            throw IoError(file + ": header must be '" + header + "' per meta.json", 1);
        }
        const std::size_t ncol = 2 + (g.timed ? 1 : 0) + (g.has_types() ? 1 : 0);
        g.edges.reserve(lines.size() - 1);
        for (std::size_t r = 1; r < lines.size(); ++r) {
            const std::size_t row = r + 1;
            const auto cells = io_detail::split_csv(lines[r]);
            if (cells.size() != ncol)
                throw IoError(file + " row " + std::to_string(row) + ": expected " + std::to_string(ncol) + " columns", row);
            const auto src = parse_number<long long>(cells[0], file, row);
            const auto dst = parse_number<long long>(cells[1], file, row);
            if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= g.n || static_cast<std::size_t>(dst) >= g.n)
                throw IoError(file + " row " + std::to_string(row) + ": node index out of range 0.." +
                                  std::to_string(g.n == 0 ? 0 : g.n - 1),
                              row);
            g.edges.push_back({static_cast<std::size_t>(src), static_cast<std::size_t>(dst)});
            std::size_t c = 2;
            if (g.timed) {
                const auto t = parse_number<std::int64_t>(cells[c++], file, row);
                if (t < 0) throw IoError(file + " row " + std::to_string(row) + ": negative timestamp", row);
                g.edge_time.push_back(t);
            }
            if (g.has_types()) {
                const auto p = parse_number<int>(cells[c++], file, row);
                if (p < 1 || p > g.num_types)
                    throw IoError(file + " row " + std::to_string(row) + ": edge type " + std::to_string(p) +
                                      " outside 1.." + std::to_string(g.num_types),
                                  row);
                g.edge_type.push_back(p);
            }
        }
    }
    g.validate();
    return g;
}

}  // namespace godm
