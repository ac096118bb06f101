#include "snc/hdbscan.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace snc {
namespace {

struct Edge {
  int a;
  int b;
  double weight;
};

struct Merge {
  int left;
  int right;
  double distance;
  int size;
};

struct CondensedEntry {
  int parent;  // cluster label
  int child;   // point id (< n) or cluster label (>= n)
  double lambda;
  int size;
};

// Finite stand-in for 1/0 so that stabilities stay free of inf - inf.
constexpr double kMaxLambda = 1e300;

double to_lambda(double distance) { return distance > 0.0 ? std::min(1.0 / distance, kMaxLambda) : kMaxLambda; }

std::vector<double> core_distances(const Eigen::Ref<const Matrix<double>>& d, int min_samples) {
  const int n = static_cast<int>(d.rows());
  std::vector<double> core(static_cast<std::size_t>(n), 0.0);
  const int others = std::min(min_samples - 1, n - 1);
  if (others <= 0) return core;
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    row.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) row.push_back(d(i, j));
    }
    std::nth_element(row.begin(), row.begin() + (others - 1), row.end());
    core[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(others - 1)];
  }
  return core;
}

// Prim's algorithm over the mutual reachability graph, dense O(n^2).
std::vector<Edge> mutual_reachability_mst(const Eigen::Ref<const Matrix<double>>& d,
                                          const std::vector<double>& core) {
  const int n = static_cast<int>(d.rows());
  std::vector<double> best(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<int> from(static_cast<std::size_t>(n), -1);
  std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n - 1));

  int current = 0;
  in_tree[0] = 1;
  for (int step = 1; step < n; ++step) {
    int next = -1;
    for (int j = 0; j < n; ++j) {
      if (in_tree[static_cast<std::size_t>(j)]) continue;
      const double reach = std::max({core[static_cast<std::size_t>(current)],
                                     core[static_cast<std::size_t>(j)], d(current, j)});
      if (reach < best[static_cast<std::size_t>(j)]) {
        best[static_cast<std::size_t>(j)] = reach;
        from[static_cast<std::size_t>(j)] = current;
      }
      if (next < 0 || best[static_cast<std::size_t>(j)] < best[static_cast<std::size_t>(next)]) next = j;
    }
    edges.push_back({from[static_cast<std::size_t>(next)], next, best[static_cast<std::size_t>(next)]});
    in_tree[static_cast<std::size_t>(next)] = 1;
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& x, const Edge& y) { return x.weight < y.weight; });
  return edges;
}

// Single-linkage dendrogram; merge i creates node n + i.
std::vector<Merge> single_linkage(const std::vector<Edge>& edges, int n) {
  std::vector<int> uf(static_cast<std::size_t>(2 * n - 1));
  std::iota(uf.begin(), uf.end(), 0);
  std::vector<int> size(static_cast<std::size_t>(2 * n - 1), 1);
  auto find = [&](int x) {
    int root = x;
    while (uf[static_cast<std::size_t>(root)] != root) root = uf[static_cast<std::size_t>(root)];
    while (uf[static_cast<std::size_t>(x)] != root) {
      const int up = uf[static_cast<std::size_t>(x)];
      uf[static_cast<std::size_t>(x)] = root;
      x = up;
    }
    return root;
  };
  std::vector<Merge> merges;
  merges.reserve(edges.size());
  for (const Edge& e : edges) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    const int node = n + static_cast<int>(merges.size());
    const int merged = size[static_cast<std::size_t>(ra)] + size[static_cast<std::size_t>(rb)];
    merges.push_back({ra, rb, e.weight, merged});
    uf[static_cast<std::size_t>(ra)] = node;
    uf[static_cast<std::size_t>(rb)] = node;
    size[static_cast<std::size_t>(node)] = merged;
  }
  return merges;
}

}  // namespace

std::vector<int> hdbscan_labels(const Eigen::Ref<const Matrix<double>>& distances,
                                const HdbscanParams& params) {
  const int n = static_cast<int>(distances.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  if (n < 2) return labels;

  const auto core = core_distances(distances, params.min_samples);
  const auto merges = single_linkage(mutual_reachability_mst(distances, core), n);
  const int mcs = params.min_cluster_size;

  auto node_size = [&](int node) {
    return node < n ? 1 : merges[static_cast<std::size_t>(node - n)].size;
  };
  auto leaves_of = [&](int node, auto&& emit) {
    std::vector<int> stack{node};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (x < n) {
        emit(x);
      } else {
        const Merge& m = merges[static_cast<std::size_t>(x - n)];
        stack.push_back(m.right);
        stack.push_back(m.left);
      }
    }
  };

  // Condense the dendrogram: walk from the root, keeping splits where both
  // sides reach min_cluster_size and letting smaller sides fall out.
  const int root = 2 * n - 2;
  std::vector<int> relabel(static_cast<std::size_t>(2 * n - 1), -1);
  relabel[static_cast<std::size_t>(root)] = n;
  int next_label = n + 1;
  std::vector<CondensedEntry> tree;
  std::vector<int> queue{root};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int node = queue[head];
    const Merge& m = merges[static_cast<std::size_t>(node - n)];
    const int label = relabel[static_cast<std::size_t>(node)];
    const double lambda = to_lambda(m.distance);
    const int left_size = node_size(m.left);
    const int right_size = node_size(m.right);
    auto fall_out = [&](int side) {
      leaves_of(side, [&](int p) { tree.push_back({label, p, lambda, 1}); });
    };
    auto keep = [&](int side, int new_label) {
      relabel[static_cast<std::size_t>(side)] = new_label;
      if (side >= n) {
        queue.push_back(side);
      } else {
        tree.push_back({label, side, lambda, 1});
      }
    };
    if (left_size >= mcs && right_size >= mcs) {
      for (int side : {m.left, m.right}) {
        const int child_label = next_label++;
        tree.push_back({label, child_label, lambda, node_size(side)});
        keep(side, child_label);
      }
    } else if (left_size < mcs && right_size < mcs) {
      fall_out(m.left);
      fall_out(m.right);
    } else if (left_size < mcs) {
      fall_out(m.left);
      keep(m.right, label);
    } else {
      fall_out(m.right);
      keep(m.left, label);
    }
  }

  const int n_clusters = next_label - n;
  auto slot = [n](int label) { return static_cast<std::size_t>(label - n); };
  std::vector<double> birth(static_cast<std::size_t>(n_clusters), 0.0);
  std::vector<int> parent_of(static_cast<std::size_t>(n_clusters), -1);
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n_clusters));
  for (const auto& e : tree) {
    if (e.child >= n) {
      birth[slot(e.child)] = e.lambda;
      parent_of[slot(e.child)] = e.parent;
      children[slot(e.parent)].push_back(e.child);
    }
  }
  std::vector<double> stability(static_cast<std::size_t>(n_clusters), 0.0);
  for (const auto& e : tree) {
    stability[slot(e.parent)] += (e.lambda - birth[slot(e.parent)]) * e.size;
  }

  // Excess-of-mass selection, children before parents, root excluded.
  std::vector<char> selected(static_cast<std::size_t>(n_clusters), 1);
  selected[0] = 0;
  for (int label = next_label - 1; label > n; --label) {
    double subtree = 0.0;
    for (int c : children[slot(label)]) subtree += stability[slot(c)];
    if (subtree > stability[slot(label)]) {
      selected[slot(label)] = 0;
      stability[slot(label)] = subtree;
    } else {
      std::vector<int> stack(children[slot(label)]);
      while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        selected[slot(c)] = 0;
        for (int g : children[slot(c)]) stack.push_back(g);
      }
    }
  }

  std::vector<int> remap(static_cast<std::size_t>(n_clusters), -1);
  std::vector<int> raw(static_cast<std::size_t>(n), -1);
  for (const auto& e : tree) {
    if (e.child >= n) continue;
    int c = e.parent;
    while (c != n && !selected[slot(c)]) c = parent_of[slot(c)];
    if (c != n) raw[static_cast<std::size_t>(e.child)] = c;
  }
  int next = 0;
  for (int p = 0; p < n; ++p) {
    const int c = raw[static_cast<std::size_t>(p)];
    if (c < 0) continue;
    if (remap[slot(c)] < 0) remap[slot(c)] = next++;
    labels[static_cast<std::size_t>(p)] = remap[slot(c)];
  }
  return labels;
}

}  // namespace snc
