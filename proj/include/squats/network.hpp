#ifndef SQUATS_NETWORK_HPP
#define SQUATS_NETWORK_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "squats/codec.hpp"
#include "squats/errors.hpp"

namespace squats {

enum class NodeKind { Encoder, Relay, Decoder };

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Encoder: return "encoder";
        case NodeKind::Relay: return "relay";
        default: return "decoder";
    }
}

inline NodeKind node_kind_from_string(const std::string& s) {
    if (s == "encoder") return NodeKind::Encoder;
    if (s == "relay") return NodeKind::Relay;
    if (s == "decoder") return NodeKind::Decoder;
    throw ConfigError("unknown node kind: " + s);
}

struct NetNode {
    int id;
    NodeKind kind;
};

struct NetEdge {
    int from;
    int to;
};

// Acyclic OR-forwarding network: encoder sources, relay nodes that emit the
// OR of their intact incoming words, and exactly one decoder sink. Links
// either carry the full b-bit word or are erased (treated as all-zero).
struct NetworkGraph {
    std::vector<NetNode> nodes;
    std::vector<NetEdge> edges;

    int node_index(int id) const {
        for (size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        throw ConfigError("edge references unknown node id " + std::to_string(id));
    }

    std::vector<int> encoder_indices() const {
        std::vector<int> out;
        for (size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].kind == NodeKind::Encoder) out.push_back(static_cast<int>(i));
        return out;
    }

    int decoder_index() const {
        int found = -1;
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].kind != NodeKind::Decoder) continue;
            if (found >= 0) throw ConfigError("topology must have exactly one decoder");
            found = static_cast<int>(i);
        }
        if (found < 0) throw ConfigError("topology must have exactly one decoder");
        return found;
    }

    // Kahn topological order; throws on cycles.
    std::vector<int> topological_order() const {
        const size_t n = nodes.size();
        std::vector<int> indeg(n, 0);
        std::vector<std::vector<int>> out_adj(n);
        for (const NetEdge& e : edges) {
            const int u = node_index(e.from), v = node_index(e.to);
            out_adj[u].push_back(v);
            ++indeg[v];
        }
        std::vector<int> order;
        std::queue<int> q;
        for (size_t i = 0; i < n; ++i)
            if (indeg[i] == 0) q.push(static_cast<int>(i));
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            order.push_back(u);
            for (int v : out_adj[u])
                if (--indeg[v] == 0) q.push(v);
        }
        if (order.size() != n) throw ConfigError("topology contains a cycle");
        return order;
    }

    nlohmann::json to_json(const std::vector<int>& failures = {}) const {
        nlohmann::json j;
        j["nodes"] = nlohmann::json::array();
        for (const NetNode& nd : nodes)
            j["nodes"].push_back({{"id", nd.id}, {"kind", to_string(nd.kind)}});
        j["edges"] = nlohmann::json::array();
        for (const NetEdge& e : edges)
            j["edges"].push_back({{"from", e.from}, {"to", e.to}});
        j["failures"] = failures;
        return j;
    }

    static NetworkGraph from_json(const nlohmann::json& j) {
        NetworkGraph g;
        if (!j.contains("nodes") || !j.contains("edges"))
            throw ConfigError("topology JSON needs nodes and edges arrays");
        for (const auto& nd : j.at("nodes"))
            g.nodes.push_back({nd.at("id").get<int>(),
                               node_kind_from_string(nd.at("kind").get<std::string>())});
        for (const auto& e : j.at("edges"))
            g.edges.push_back({e.at("from").get<int>(), e.at("to").get<int>()});
        g.topological_order();  // validates ids and acyclicity
        g.decoder_index();
        return g;
    }
};

struct Topology {
    NetworkGraph graph;
    std::vector<int> failures;  // indices into graph.edges

    static Topology load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open topology file " + path);
        nlohmann::json j;
        is >> j;
        Topology t;
        t.graph = NetworkGraph::from_json(j);
        if (j.contains("failures"))
            t.failures = j.at("failures").get<std::vector<int>>();
        for (int f : t.failures)
            if (f < 0 || f >= static_cast<int>(t.graph.edges.size()))
                throw ConfigError("failure index out of range");
        return t;
    }
};

// Per-encoder flag: does a path of intact edges reach the decoder?
inline std::vector<bool> reachability(const NetworkGraph& g,
                                      const std::vector<int>& failed_edges) {
    std::unordered_set<int> failed(failed_edges.begin(), failed_edges.end());
    const size_t n = g.nodes.size();
    std::vector<std::vector<int>> in_adj(n);
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (failed.count(static_cast<int>(e))) continue;
        in_adj[g.node_index(g.edges[e].to)].push_back(g.node_index(g.edges[e].from));
    }
    std::vector<bool> reaches(n, false);
    std::queue<int> q;
    q.push(g.decoder_index());
    reaches[g.decoder_index()] = true;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int u : in_adj[v])
            if (!reaches[u]) {
                reaches[u] = true;
                q.push(u);
            }
    }
    std::vector<bool> out;
    for (int enc : g.encoder_indices()) out.push_back(reaches[enc]);
    return out;
}

// One synchronized round: every node emits once in topological order; a node's
// word is the OR of its intact incoming words (an encoder additionally ORs its
// own register). Returns the word assembled at the decoder.
inline Register simulate(const NetworkGraph& g, const std::vector<Register>& encoder_inputs,
                         const std::vector<int>& failed_edges) {
    const auto encoders = g.encoder_indices();
    if (encoder_inputs.size() != encoders.size())
        throw std::invalid_argument("simulate: one register per encoder required");
    if (encoder_inputs.empty()) throw std::invalid_argument("simulate: no encoders");
    const size_t bits = encoder_inputs.front().size();
    for (const Register& r : encoder_inputs)
        if (r.size() != bits) throw std::invalid_argument("simulate: register sizes differ");

    std::unordered_set<int> failed(failed_edges.begin(), failed_edges.end());
    const size_t n = g.nodes.size();
    std::vector<Register> word(n, Register(bits));
    for (size_t m = 0; m < encoders.size(); ++m) word[encoders[m]] = encoder_inputs[m];

    std::vector<std::vector<int>> in_edges(n);
    for (size_t e = 0; e < g.edges.size(); ++e)
        in_edges[g.node_index(g.edges[e].to)].push_back(static_cast<int>(e));

    for (int v : g.topological_order()) {
        for (int e : in_edges[v]) {
            if (failed.count(e)) continue;  // erased link contributes all-zero
            word[v] |= word[g.node_index(g.edges[e].from)];
        }
    }
    return word[g.decoder_index()];
}

// Layered DAG for tests and simulations: encoders in layer 0, `relay_layers`
// layers of relays, then the decoder. Every non-decoder node gets one edge to
// a random node of the next layer (so the failure-free graph is connected),
// plus extra forward edges with probability edge_prob.
inline NetworkGraph random_layered_dag(int n_encoders, int relay_layers, int relay_width,
                                       double edge_prob, Rng& rng) {
    if (n_encoders < 1 || relay_layers < 0 || (relay_layers > 0 && relay_width < 1))
        throw std::invalid_argument("random_layered_dag: bad shape");
    NetworkGraph g;
    std::vector<std::vector<int>> layers;
    int next_id = 0;
    layers.emplace_back();
    for (int i = 0; i < n_encoders; ++i) {
        g.nodes.push_back({next_id, NodeKind::Encoder});
        layers.back().push_back(next_id++);
    }
    for (int ly = 0; ly < relay_layers; ++ly) {
        layers.emplace_back();
        for (int i = 0; i < relay_width; ++i) {
            g.nodes.push_back({next_id, NodeKind::Relay});
            layers.back().push_back(next_id++);
        }
    }
    layers.emplace_back();
    g.nodes.push_back({next_id, NodeKind::Decoder});
    layers.back().push_back(next_id++);

    for (size_t ly = 0; ly + 1 < layers.size(); ++ly) {
        const auto& cur = layers[ly];
        const auto& nxt = layers[ly + 1];
        for (int u : cur) {
            const int forced = nxt[rng.below(nxt.size())];
            g.edges.push_back({u, forced});
            for (int v : nxt)
                if (v != forced && rng.bernoulli(edge_prob)) g.edges.push_back({u, v});
        }
    }
    return g;
}

// Random failure set that keeps every encoder connected to the decoder.
// Rejection sampled; gives up (returning no failures) after max_tries.
inline std::vector<int> sample_noncut_failures(const NetworkGraph& g, double fail_prob,
                                               Rng& rng, int max_tries = 64) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::vector<int> failed;
        for (size_t e = 0; e < g.edges.size(); ++e)
            if (rng.bernoulli(fail_prob)) failed.push_back(static_cast<int>(e));
        const auto ok = reachability(g, failed);
        if (std::all_of(ok.begin(), ok.end(), [](bool b) { return b; })) return failed;
    }
    return {};
}

// Bins of an ensemble codebook assigned to encoders: encoder m owns bins
// m*T .. m*T+T-1 of the base codebook (which has n*T bins).
inline std::vector<Register> encode_distributed(const std::vector<SparseSignal>& signals,
                                                const Codebook& base,
                                                const ScalarQuantizer& qz) {
    const int n = static_cast<int>(signals.size());
    if (n == 0) return {};
    const int T = signals.front().length();
    for (const auto& s : signals)
        if (s.length() != T)
            throw std::invalid_argument("encode_distributed: signals must share a length");
    if (static_cast<uint64_t>(n) * T != base.bins())
        throw std::invalid_argument("encode_distributed: base codebook must have n*T bins");
    if (qz.levels() != static_cast<int>(base.levels()))
        throw std::invalid_argument("encode_distributed: quantizer levels mismatch");
    std::vector<Register> out;
    out.reserve(n);
    for (int m = 0; m < n; ++m) {
        Register reg(base.bits());
        for (int i = 0; i < T; ++i) {
            const int j = qz.quantize(signals[m].values[i]).index;
            if (j != 0) reg.or_words(base.codeword(j, m * T + i));
        }
        out.push_back(std::move(reg));
    }
    return out;
}

// The concatenated ensemble as one long signal, for monolithic encoding.
inline SparseSignal concat_ensemble(const std::vector<SparseSignal>& signals) {
    SparseSignal s;
    for (const auto& sig : signals) {
        s.values.insert(s.values.end(), sig.values.begin(), sig.values.end());
        s.support_budget += sig.support_budget;
    }
    return s;
}

}  // namespace squats

#endif
