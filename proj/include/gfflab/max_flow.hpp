#pragma once

#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace gfflab {

/// Dinic's algorithm on a small directed graph with integer capacities.
class FlowNetwork {
public:
    explicit FlowNetwork(std::size_t nodes) : adj_(nodes) {}

    void add_edge(std::size_t from, std::size_t to, int capacity) {
        adj_[from].push_back(edges_.size());
        edges_.push_back({to, capacity});
        adj_[to].push_back(edges_.size());
        edges_.push_back({from, 0});
    }

    int max_flow(std::size_t source, std::size_t sink) {
        int flow = 0;
        while (bfs(source, sink)) {
            next_.assign(adj_.size(), 0);
            while (int pushed = dfs(source, sink, std::numeric_limits<int>::max())) flow += pushed;
        }
        return flow;
    }

private:
    struct Edge {
        std::size_t to;
        int cap;
    };

    bool bfs(std::size_t s, std::size_t t) {
        level_.assign(adj_.size(), -1);
        std::queue<std::size_t> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop();
            for (std::size_t e : adj_[v])
                if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[v] + 1;
                    q.push(edges_[e].to);
                }
        }
        return level_[t] >= 0;
    }

    int dfs(std::size_t v, std::size_t t, int limit) {
        if (v == t) return limit;
        for (std::size_t& i = next_[v]; i < adj_[v].size(); ++i) {
            const std::size_t e = adj_[v][i];
            Edge& edge = edges_[e];
            if (edge.cap <= 0 || level_[edge.to] != level_[v] + 1) continue;
            if (int got = dfs(edge.to, t, limit < edge.cap ? limit : edge.cap)) {
                edge.cap -= got;
                edges_[e ^ 1].cap += got;
                return got;
            }
        }
        return 0;
    }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
};

}  // namespace gfflab
