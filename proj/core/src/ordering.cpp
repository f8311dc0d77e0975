#include "rbfpu/ordering.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace rbfpu {

namespace {

using Graph = std::vector<std::vector<int>>;

Graph symmetric_graph(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("ordering needs a square matrix");
  const int n = static_cast<int>(a.rows());
  Graph g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      const int j = static_cast<int>(it.col());
      if (j == i) continue;
      g[static_cast<std::size_t>(i)].push_back(j);
      g[static_cast<std::size_t>(j)].push_back(i);
    }
  }
  for (auto& adj : g) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

// BFS levels from `root` over unvisited nodes; returns the nodes of the last level.
std::vector<int> last_level(const Graph& g, int root, const std::vector<char>& done, int& depth) {
  std::vector<int> level(g.size(), -1);
  std::vector<int> frontier{root};
  level[static_cast<std::size_t>(root)] = 0;
  depth = 0;
  while (true) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int v : g[static_cast<std::size_t>(u)]) {
        if (done[static_cast<std::size_t>(v)] || level[static_cast<std::size_t>(v)] >= 0) continue;
        level[static_cast<std::size_t>(v)] = depth + 1;
        next.push_back(v);
      }
    }
    if (next.empty()) return frontier;
    frontier = std::move(next);
    ++depth;
  }
}

int pseudo_peripheral(const Graph& g, int start, const std::vector<char>& done) {
  int root = start;
  int depth = 0;
  std::vector<int> last = last_level(g, root, done, depth);
  for (int guard = 0; guard < 16; ++guard) {
    const int cand = *std::min_element(last.begin(), last.end(), [&](int a, int b) {
      return g[static_cast<std::size_t>(a)].size() < g[static_cast<std::size_t>(b)].size();
    });
    int cand_depth = 0;
    std::vector<int> cand_last = last_level(g, cand, done, cand_depth);
    if (cand_depth <= depth) break;
    root = cand;
    depth = cand_depth;
    last = std::move(cand_last);
  }
  return root;
}

}  // namespace

std::vector<int> reverse_cuthill_mckee(const SparseMatrix& a) {
  const Graph g = symmetric_graph(a);
  const int n = static_cast<int>(g.size());
  auto degree = [&](int v) { return g[static_cast<std::size_t>(v)].size(); };

  std::vector<char> done(static_cast<std::size_t>(n), 0);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    if (done[static_cast<std::size_t>(s)]) continue;
    // lowest-degree unvisited node of this component as the seed
    int seed = s;
    {
      std::vector<int> stack{s};
      std::vector<char> seen(static_cast<std::size_t>(n), 0);
      seen[static_cast<std::size_t>(s)] = 1;
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        if (degree(u) < degree(seed)) seed = u;
        for (int v : g[static_cast<std::size_t>(u)]) {
          if (done[static_cast<std::size_t>(v)] || seen[static_cast<std::size_t>(v)]) continue;
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    const int root = pseudo_peripheral(g, seed, done);
    std::size_t head = order.size();
    order.push_back(root);
    done[static_cast<std::size_t>(root)] = 1;
    while (head < order.size()) {
      const int u = order[head++];
      std::vector<int> next;
      for (int v : g[static_cast<std::size_t>(u)]) {
        if (!done[static_cast<std::size_t>(v)]) {
          done[static_cast<std::size_t>(v)] = 1;
          next.push_back(v);
        }
      }
      std::stable_sort(next.begin(), next.end(), [&](int x, int y) { return degree(x) < degree(y); });
      order.insert(order.end(), next.begin(), next.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

int bandwidth(const SparseMatrix& a) {
  int bw = 0;
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      bw = std::max(bw, static_cast<int>(std::abs(it.row() - it.col())));
    }
  }
  return bw;
}

SparseMatrix permute_symmetric(const SparseMatrix& a, const std::vector<int>& perm) {
  if (a.rows() != a.cols() || static_cast<Eigen::Index>(perm.size()) != a.rows()) {
    throw std::invalid_argument("permute_symmetric: size mismatch");
  }
  std::vector<int> inv(perm.size(), -1);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const int old = perm[k];
    if (old < 0 || old >= static_cast<int>(perm.size()) || inv[static_cast<std::size_t>(old)] >= 0) {
      throw std::invalid_argument("permute_symmetric: not a permutation");
    }
    inv[static_cast<std::size_t>(old)] = static_cast<int>(k);
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      trip.emplace_back(inv[static_cast<std::size_t>(it.row())], inv[static_cast<std::size_t>(it.col())], it.value());
    }
  }
  SparseMatrix out(a.rows(), a.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace rbfpu
