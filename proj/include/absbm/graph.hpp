#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "absbm/common.hpp"

namespace absbm {

using VertexId = int;

struct GroundTruth {
    std::vector<int> labels;

    int n_labels() const {
        int mx = -1;
        for (int l : labels) mx = std::max(mx, l);
        return mx + 1;
    }
};

// Undirected network with one real attribute per vertex.
//
// Adjacency is a CSR over directed slots: each undirected edge {i,j}
// occupies two slots, one in i's range (pointing to j) and one in j's
// range (pointing to i). The slot in i's range carries the incoming
// message m_{j->i}; reverse_slot maps it to the opposite direction in
// O(1). Neighbor lists are sorted.
class AttributedNetwork {
public:
    AttributedNetwork() = default;

    AttributedNetwork(int n_vertices, std::vector<std::pair<VertexId, VertexId>> edges,
                      std::vector<double> attributes = {},
                      std::vector<long long> original_ids = {})
        : n_(n_vertices), edges_(std::move(edges)), attributes_(std::move(attributes)),
          original_ids_(std::move(original_ids)) {
        if (attributes_.empty()) attributes_.assign(static_cast<std::size_t>(n_), 0.0);
        if (static_cast<int>(attributes_.size()) != n_)
            throw validation_error("attribute count does not match vertex count");
        for (double d : attributes_)
            if (!std::isfinite(d)) throw validation_error("non-finite attribute value");
        validate_edges();
        build_adjacency();
    }

    int n_vertices() const { return n_; }
    std::size_t n_edges() const { return edges_.size(); }
    const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }

    double attribute(VertexId v) const { return attributes_[static_cast<std::size_t>(v)]; }
    const std::vector<double>& attributes() const { return attributes_; }
    void set_attributes(std::vector<double> attrs) {
        if (static_cast<int>(attrs.size()) != n_)
            throw validation_error("attribute count does not match vertex count");
        for (double d : attrs)
            if (!std::isfinite(d)) throw validation_error("non-finite attribute value");
        attributes_ = std::move(attrs);
    }

    long long original_id(VertexId v) const {
        return original_ids_.empty() ? v : original_ids_[static_cast<std::size_t>(v)];
    }

    int degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

    // Directed slot range of vertex v. Slot s in [slot_begin(v), slot_end(v))
    // points to neighbor(s) and holds the message neighbor(s) -> v.
    int slot_begin(VertexId v) const { return offsets_[v]; }
    int slot_end(VertexId v) const { return offsets_[v + 1]; }
    VertexId neighbor(int slot) const { return neighbors_[slot]; }
    int reverse_slot(int slot) const { return reverse_[slot]; }
    int n_slots() const { return static_cast<int>(neighbors_.size()); }

    // Slot in j's range pointing to i, or -1 if ij is not an edge.
    int find_slot(VertexId j, VertexId i) const {
        auto first = neighbors_.begin() + offsets_[j];
        auto last = neighbors_.begin() + offsets_[j + 1];
        auto it = std::lower_bound(first, last, i);
        if (it == last || *it != i) return -1;
        return static_cast<int>(it - neighbors_.begin());
    }

    bool has_edge(VertexId i, VertexId j) const { return find_slot(i, j) >= 0; }

private:
    void validate_edges() {
        for (auto& [i, j] : edges_) {
            if (i == j) throw validation_error("self-loop on vertex " + std::to_string(i));
            if (i > j) std::swap(i, j);
            if (i < 0 || j >= n_) throw validation_error("edge endpoint out of range");
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw validation_error("duplicate edge");
    }

    void build_adjacency() {
        offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (auto [i, j] : edges_) {
            ++offsets_[i + 1];
            ++offsets_[j + 1];
        }
        for (int v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
        neighbors_.resize(edges_.size() * 2);
        std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
        for (auto [i, j] : edges_) {  // edges sorted, so each list comes out sorted
            neighbors_[fill[i]++] = j;
            neighbors_[fill[j]++] = i;
        }
        reverse_.resize(neighbors_.size());
        for (int v = 0; v < n_; ++v)
            for (int s = offsets_[v]; s < offsets_[v + 1]; ++s)
                reverse_[s] = find_slot(neighbors_[s], v);
    }

    int n_ = 0;
    std::vector<std::pair<VertexId, VertexId>> edges_;
    std::vector<double> attributes_;
    std::vector<long long> original_ids_;
    std::vector<int> offsets_;
    std::vector<VertexId> neighbors_;
    std::vector<int> reverse_;
};

// ---------------------------------------------------------------------------
// Edge-list format: one "i j" pair per line, '#' starts a comment.

inline AttributedNetwork parse_edge_list(std::istream& in) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    long long max_id = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        long long a, b;
        if (!(ls >> a)) continue;  // blank or comment-only line
        if (!(ls >> b)) throw parse_error("line " + std::to_string(line_no) + ": expected two vertex ids");
        std::string trailing;
        if (ls >> trailing) throw parse_error("line " + std::to_string(line_no) + ": trailing tokens");
        if (a < 0 || b < 0) throw parse_error("line " + std::to_string(line_no) + ": negative vertex id");
        if (a == b) throw validation_error("line " + std::to_string(line_no) + ": self-loop");
        max_id = std::max({max_id, a, b});
        edges.emplace_back(static_cast<VertexId>(a), static_cast<VertexId>(b));
    }
    return AttributedNetwork(static_cast<int>(max_id + 1), std::move(edges));
}

inline void write_edge_list(std::ostream& out, const AttributedNetwork& net) {
    for (auto [i, j] : net.edges()) out << i << ' ' << j << '\n';
}

// ---------------------------------------------------------------------------
// GML subset: graph [ node [ id N (label "...") (value N) ] ...
//                     edge [ source N target N ] ... ]
// Vertex ids may be arbitrary integers; they are remapped to dense 0-based
// indices in id order. When every node carries a `value`, the values are
// densified (by sorted distinct value) and returned as ground truth.

namespace detail {

struct GmlToken {
    enum Kind { Key, Int, Real, Str, Open, Close, End } kind;
    std::string text;
    long long ivalue = 0;
    std::size_t pos = 0;
};

class GmlLexer {
public:
    explicit GmlLexer(std::istream& in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        src_ = ss.str();
    }

    GmlToken next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        GmlToken t;
        t.pos = pos_;
        if (pos_ >= src_.size()) {
            t.kind = GmlToken::End;
            return t;
        }
        char c = src_[pos_];
        if (c == '[') {
            ++pos_;
            t.kind = GmlToken::Open;
            return t;
        }
        if (c == ']') {
            ++pos_;
            t.kind = GmlToken::Close;
            return t;
        }
        if (c == '"') {
            std::size_t end = src_.find('"', pos_ + 1);
            if (end == std::string::npos) throw parse_error(err("unterminated string"));
            t.kind = GmlToken::Str;
            t.text = src_.substr(pos_ + 1, end - pos_ - 1);
            pos_ = end + 1;
            return t;
        }
        std::size_t start = pos_;
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
               src_[pos_] != '[' && src_[pos_] != ']')
            ++pos_;
        t.text = src_.substr(start, pos_ - start);
        char* endp = nullptr;
        long long iv = std::strtoll(t.text.c_str(), &endp, 10);
        if (endp && *endp == '\0') {
            t.kind = GmlToken::Int;
            t.ivalue = iv;
        } else {
            double dv = std::strtod(t.text.c_str(), &endp);
            (void)dv;
            t.kind = (endp && *endp == '\0') ? GmlToken::Real : GmlToken::Key;
        }
        return t;
    }

    std::string err(const std::string& msg) const {
        return "GML parse error at offset " + std::to_string(pos_) + ": " + msg;
    }

private:
    std::string src_;
    std::size_t pos_ = 0;
};

}  // namespace detail

struct GmlGraph {
    AttributedNetwork network;
    std::optional<GroundTruth> truth;
};

inline GmlGraph parse_gml(std::istream& in) {
    detail::GmlLexer lex(in);

    struct Node {
        long long id = -1;
        bool has_id = false;
        bool has_value = false;
        long long value = 0;
    };
    std::vector<Node> nodes;
    std::vector<std::pair<long long, long long>> raw_edges;

    // Skips a balanced [...] block whose opening bracket was consumed.
    auto skip_block = [&](auto&& self) -> void {
        for (;;) {
            auto t = lex.next();
            if (t.kind == detail::GmlToken::End) throw parse_error(lex.err("unbalanced brackets"));
            if (t.kind == detail::GmlToken::Close) return;
            if (t.kind == detail::GmlToken::Open) self(self);
        }
    };

    auto parse_node = [&]() {
        Node nd;
        for (;;) {
            auto t = lex.next();
            if (t.kind == detail::GmlToken::Close) break;
            if (t.kind == detail::GmlToken::End) throw parse_error(lex.err("unbalanced brackets in node"));
            if (t.kind != detail::GmlToken::Key) continue;
            auto v = lex.next();
            if (v.kind == detail::GmlToken::Open) {
                skip_block(skip_block);
                continue;
            }
            if (t.text == "id" && v.kind == detail::GmlToken::Int) {
                nd.id = v.ivalue;
                nd.has_id = true;
            } else if (t.text == "value" && v.kind == detail::GmlToken::Int) {
                nd.value = v.ivalue;
                nd.has_value = true;
            }
            // label and other scalar fields are accepted and ignored
        }
        if (!nd.has_id) throw parse_error(lex.err("node without id"));
        nodes.push_back(nd);
    };

    auto parse_edge = [&]() {
        long long src = -1, dst = -1;
        bool has_src = false, has_dst = false;
        for (;;) {
            auto t = lex.next();
            if (t.kind == detail::GmlToken::Close) break;
            if (t.kind == detail::GmlToken::End) throw parse_error(lex.err("unbalanced brackets in edge"));
            if (t.kind != detail::GmlToken::Key) continue;
            auto v = lex.next();
            if (v.kind == detail::GmlToken::Open) {
                skip_block(skip_block);
                continue;
            }
            if (t.text == "source" && v.kind == detail::GmlToken::Int) {
                src = v.ivalue;
                has_src = true;
            } else if (t.text == "target" && v.kind == detail::GmlToken::Int) {
                dst = v.ivalue;
                has_dst = true;
            }
        }
        if (!has_src || !has_dst) throw parse_error(lex.err("edge without source/target"));
        raw_edges.emplace_back(src, dst);
    };

    bool saw_graph = false;
    for (;;) {
        auto t = lex.next();
        if (t.kind == detail::GmlToken::End) break;
        if (t.kind != detail::GmlToken::Key) continue;
        if (t.text == "graph") {
            auto open = lex.next();
            if (open.kind != detail::GmlToken::Open) throw parse_error(lex.err("expected [ after graph"));
            saw_graph = true;
            for (;;) {
                auto u = lex.next();
                if (u.kind == detail::GmlToken::Close) break;
                if (u.kind == detail::GmlToken::End) throw parse_error(lex.err("unbalanced graph block"));
                if (u.kind != detail::GmlToken::Key) continue;
                if (u.text == "node") {
                    auto o = lex.next();
                    if (o.kind != detail::GmlToken::Open) throw parse_error(lex.err("expected [ after node"));
                    parse_node();
                } else if (u.text == "edge") {
                    auto o = lex.next();
                    if (o.kind != detail::GmlToken::Open) throw parse_error(lex.err("expected [ after edge"));
                    parse_edge();
                } else {
                    auto v = lex.next();
                    if (v.kind == detail::GmlToken::Open) skip_block(skip_block);
                    // else: scalar graph-level field, ignored
                }
            }
        }
    }
    if (!saw_graph) throw parse_error("no graph block found");

    std::map<long long, VertexId> id_map;
    std::vector<long long> original_ids;
    for (const auto& nd : nodes) {
        if (id_map.count(nd.id)) throw parse_error("duplicate node id " + std::to_string(nd.id));
        id_map[nd.id] = 0;
    }
    VertexId next = 0;
    for (auto& [id, dense] : id_map) {
        dense = next++;
        original_ids.push_back(id);
    }

    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(raw_edges.size());
    for (auto [s, t] : raw_edges) {
        auto is = id_map.find(s), it = id_map.find(t);
        if (is == id_map.end() || it == id_map.end())
            throw parse_error("edge references unknown node id");
        edges.emplace_back(is->second, it->second);
    }

    GmlGraph out{AttributedNetwork(static_cast<int>(nodes.size()), std::move(edges), {},
                                   std::move(original_ids)),
                 std::nullopt};

    bool all_values = !nodes.empty() &&
                      std::all_of(nodes.begin(), nodes.end(), [](const Node& n) { return n.has_value; });
    if (all_values) {
        std::map<long long, int> value_map;
        for (const auto& nd : nodes) value_map[nd.value] = 0;
        int lbl = 0;
        for (auto& [v, l] : value_map) l = lbl++;
        GroundTruth gt;
        gt.labels.resize(nodes.size());
        for (const auto& nd : nodes) gt.labels[static_cast<std::size_t>(id_map[nd.id])] = value_map[nd.value];
        out.truth = std::move(gt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV files: "vertex_id,value" for attributes, "vertex_id,label" for labels.

inline std::vector<double> parse_attribute_csv(std::istream& in, int n_vertices) {
    std::vector<double> attrs(static_cast<std::size_t>(n_vertices),
                              std::numeric_limits<double>::quiet_NaN());
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty attribute file");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id_s, val_s;
        if (!std::getline(ls, id_s, ',') || !std::getline(ls, val_s))
            throw parse_error("attribute line " + std::to_string(line_no) + ": expected id,value");
        int id = std::stoi(id_s);
        if (id < 0 || id >= n_vertices)
            throw parse_error("attribute line " + std::to_string(line_no) + ": vertex id out of range");
        attrs[static_cast<std::size_t>(id)] = std::stod(val_s);
    }
    for (double d : attrs)
        if (!std::isfinite(d)) throw parse_error("attribute file is missing vertices");
    return attrs;
}

inline void write_attribute_csv(std::ostream& out, const std::vector<double>& attrs) {
    out << "vertex_id,value\n";
    char buf[64];
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", attrs[i]);
        out << i << ',' << buf << '\n';
    }
}

inline GroundTruth parse_label_csv(std::istream& in, int n_vertices) {
    std::vector<int> labels(static_cast<std::size_t>(n_vertices), -1);
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty label file");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id_s, lbl_s;
        if (!std::getline(ls, id_s, ',') || !std::getline(ls, lbl_s))
            throw parse_error("label line " + std::to_string(line_no) + ": expected id,label");
        int id = std::stoi(id_s);
        if (id < 0 || id >= n_vertices)
            throw parse_error("label line " + std::to_string(line_no) + ": vertex id out of range");
        labels[static_cast<std::size_t>(id)] = std::stoi(lbl_s);
    }
    for (int l : labels)
        if (l < 0) throw parse_error("label file is missing vertices");
    return GroundTruth{std::move(labels)};
}

inline void write_label_csv(std::ostream& out, const GroundTruth& gt) {
    out << "vertex_id,label\n";
    for (std::size_t i = 0; i < gt.labels.size(); ++i) out << i << ',' << gt.labels[i] << '\n';
}

}  // namespace absbm
