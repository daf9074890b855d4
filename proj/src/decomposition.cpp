#include "sparsejt/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <tuple>

#include "sparsejt/errors.hpp"

namespace sjt {

namespace {

// Fixed-width bitset sized at runtime; adjacency rows of the primal graph.
class Bits {
 public:
  explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  // |this \ other|
  std::size_t count_minus(const Bits& other) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::size_t>(std::popcount(words_[i] & ~other.words_[i]));
    return c;
  }
  std::size_t count_and(const Bits& other) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }
  bool subset_of(const Bits& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        const int b = std::countr_zero(word);
        f(w * 64 + static_cast<std::size_t>(b));
        word &= word - 1;
      }
    }
  }
  bool operator==(const Bits&) const = default;

 private:
  std::vector<std::uint64_t> words_;
};

std::vector<Bits> primal_graph(const Model& model) {
  const std::size_t n = model.num_variables();
  std::vector<Bits> adj(n, Bits(n));
  for (const auto& f : model.factors())
    for (auto a : f.scope())
      for (auto b : f.scope())
        if (a != b) adj[a].set(b);
  return adj;
}

// Fill edges added by eliminating v: non-adjacent pairs among its neighbours.
std::size_t fill_score(const std::vector<Bits>& adj, std::size_t v) {
  std::size_t missing = 0;
  const std::size_t deg = adj[v].count();
  adj[v].for_each([&](std::size_t a) {
    // neighbours of v that are neither a nor adjacent to a
    missing += deg - 1 - adj[v].count_and(adj[a]);
  });
  return missing / 2;
}

void eliminate(std::vector<Bits>& adj, std::size_t v, std::vector<std::size_t>* fill_added) {
  std::vector<std::size_t> nbrs;
  adj[v].for_each([&](std::size_t a) { nbrs.push_back(a); });
  std::size_t added = 0;
  for (std::size_t i = 0; i < nbrs.size(); ++i)
    for (std::size_t j = i + 1; j < nbrs.size(); ++j)
      if (!adj[nbrs[i]].test(nbrs[j])) {
        adj[nbrs[i]].set(nbrs[j]);
        adj[nbrs[j]].set(nbrs[i]);
        ++added;
      }
  for (auto a : nbrs) adj[a].reset(v);
  adj[v] = Bits(adj.size());
  if (fill_added) fill_added->push_back(added);
}

}  // namespace

std::size_t Ghd::treewidth() const {
  std::size_t tw = 0;
  for (const auto& n : nodes) tw = std::max(tw, n.chi.size());
  return tw;
}

std::vector<VarId> Ghd::separator(std::size_t v) const {
  std::vector<VarId> sep;
  if (!nodes[v].parent) return sep;
  const auto& a = nodes[v].chi;
  const auto& b = nodes[*nodes[v].parent].chi;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(sep));
  return sep;
}

std::vector<std::size_t> Ghd::depths() const {
  std::vector<std::size_t> depth(nodes.size(), 0);
  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto c : nodes[v].children) {
      depth[c] = depth[v] + 1;
      queue.push_back(c);
    }
  }
  return depth;
}

std::vector<std::size_t> Ghd::leaves_to_root() const {
  const auto depth = depths();
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return depth[a] > depth[b]; });
  return order;
}

std::vector<std::size_t> Ghd::subtree(std::size_t v) const {
  std::vector<std::size_t> out{v};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto c : nodes[out[i]].children) out.push_back(c);
  return out;
}

TableSize TableSize::of(std::span<const std::uint32_t> cards) { return {table_size_u64(cards), log10_table_size(cards)}; }

TableSize TableSize::of_vars(std::span<const VarId> vars, std::span<const std::uint32_t> domains) {
  std::vector<std::uint32_t> cards;
  cards.reserve(vars.size());
  for (auto v : vars) cards.push_back(domains[v]);
  return of(cards);
}

bool operator<(const TableSize& a, const TableSize& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact;
  if (a.exact) return true;
  if (b.exact) return false;
  return a.log10 < b.log10;
}

bool operator==(const TableSize& a, const TableSize& b) { return !(a < b) && !(b < a); }

std::vector<VarId> min_fill_order(const Model& model) {
  const std::size_t n = model.num_variables();
  auto adj = primal_graph(model);
  std::vector<std::size_t> score(n);
  for (std::size_t v = 0; v < n; ++v) score[v] = fill_score(adj, v);
  std::vector<bool> done(n, false);
  std::vector<VarId> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && (best == n || score[v] < score[best])) best = v;
    // Scores can change only within distance two of the eliminated vertex.
    Bits touched(n);
    adj[best].for_each([&](std::size_t a) {
      touched.set(a);
      adj[a].for_each([&](std::size_t b) { touched.set(b); });
    });
    eliminate(adj, best, nullptr);
    done[best] = true;
    order.push_back(static_cast<VarId>(best));
    touched.for_each([&](std::size_t u) {
      if (!done[u]) score[u] = fill_score(adj, u);
    });
  }
  return order;
}

std::size_t count_fill_edges(const Model& model, std::span<const VarId> order) {
  auto adj = primal_graph(model);
  std::vector<std::size_t> added;
  for (auto v : order) eliminate(adj, v, &added);
  return std::accumulate(added.begin(), added.end(), std::size_t{0});
}

Ghd build_ghd(const Model& model, std::span<const VarId> order) {
  const std::size_t n = model.num_variables();
  if (order.size() != n) throw InvalidArgument("build_ghd: ordering must list every variable once");
  {
    std::vector<bool> seen(n, false);
    for (auto v : order) {
      if (v >= n || seen[v]) throw InvalidArgument("build_ghd: ordering is not a permutation");
      seen[v] = true;
    }
  }

  auto adj = primal_graph(model);
  std::vector<Bits> cliques;
  for (auto v : order) {
    Bits c = adj[v];
    c.set(v);
    cliques.push_back(std::move(c));
    eliminate(adj, v, nullptr);
  }

  // Keep maximal cliques only; of equal cliques keep the first.
  std::vector<Bits> bags;
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < cliques.size() && !absorbed; ++j) {
      if (i == j || !cliques[i].subset_of(cliques[j])) continue;
      absorbed = !(cliques[i] == cliques[j]) || j < i;
    }
    if (!absorbed) bags.push_back(cliques[i]);
  }

  Ghd ghd;
  const std::size_t k = bags.size();
  ghd.nodes.resize(k);
  for (std::size_t b = 0; b < k; ++b)
    bags[b].for_each([&](std::size_t v) { ghd.nodes[b].chi.push_back(static_cast<VarId>(v)); });

  // Kruskal, heaviest separators first; zero-weight pairs join components.
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> pairs;
  pairs.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(bags[i].count_and(bags[j]), i, j);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<std::size_t> uf(k);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (const auto& [w, i, j] : pairs) {
    const auto a = find(i), b = find(j);
    if (a == b) continue;
    uf[a] = b;
    ghd.edges.emplace_back(i, j);
    if (ghd.edges.size() + 1 == k) break;
  }

  // Factor placement.
  const auto& domains = model.domain_sizes();
  std::vector<TableSize> sizes(k);
  for (std::size_t b = 0; b < k; ++b) sizes[b] = TableSize::of_vars(ghd.nodes[b].chi, domains);
  for (std::size_t f = 0; f < model.num_factors(); ++f) {
    const auto& scope = model.factor(f).scope();
    std::optional<std::size_t> best;
    for (std::size_t b = 0; b < k; ++b) {
      const auto& chi = ghd.nodes[b].chi;
      if (!std::includes(chi.begin(), chi.end(), scope.begin(), scope.end())) continue;
      ghd.nodes[b].lambda.push_back(f);
      if (!best || sizes[b] < sizes[*best]) best = b;
    }
    if (!best) throw Error("build_ghd: factor " + std::to_string(f) + " fits in no bag");
    ghd.nodes[*best].alpha.push_back(f);
  }

  std::size_t root = 0;
  for (std::size_t b = 1; b < k; ++b)
    if (sizes[root] < sizes[b]) root = b;
  return reroot(ghd, root);
}

Ghd reroot(const Ghd& ghd, std::size_t root) {
  if (root >= ghd.size()) throw InvalidArgument("reroot: no such bag");
  Ghd out = ghd;
  out.root = root;
  std::vector<std::vector<std::size_t>> nbrs(ghd.size());
  for (const auto& [a, b] : ghd.edges) {
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  for (auto& nb : nbrs) std::sort(nb.begin(), nb.end());
  for (auto& node : out.nodes) {
    node.parent.reset();
    node.children.clear();
  }
  std::vector<bool> seen(ghd.size(), false);
  std::deque<std::size_t> queue{root};
  seen[root] = true;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto w : nbrs[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      out.nodes[w].parent = v;
      out.nodes[v].children.push_back(w);
      queue.push_back(w);
    }
  }
  return out;
}

bool has_coverage(const Ghd& ghd, const Model& model) {
  for (std::size_t f = 0; f < model.num_factors(); ++f) {
    const auto& scope = model.factor(f).scope();
    bool ok = false;
    for (const auto& node : ghd.nodes) {
      const bool inside = std::includes(node.chi.begin(), node.chi.end(), scope.begin(), scope.end());
      const bool listed = std::find(node.lambda.begin(), node.lambda.end(), f) != node.lambda.end();
      if (inside && listed) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

bool has_running_intersection(const Ghd& ghd, std::size_t num_variables) {
  for (VarId v = 0; v < num_variables; ++v) {
    std::vector<std::size_t> holders;
    for (std::size_t b = 0; b < ghd.size(); ++b)
      if (std::binary_search(ghd.nodes[b].chi.begin(), ghd.nodes[b].chi.end(), v)) holders.push_back(b);
    if (holders.empty()) continue;
    // Connected iff exactly one holder has its parent outside the holder set.
    std::size_t tops = 0;
    for (auto b : holders) {
      const auto& p = ghd.nodes[b].parent;
      if (!p || !std::binary_search(ghd.nodes[*p].chi.begin(), ghd.nodes[*p].chi.end(), v)) ++tops;
    }
    if (tops != 1) return false;
  }
  return true;
}

bool has_unique_assignment(const Ghd& ghd, const Model& model) {
  std::vector<std::size_t> count(model.num_factors(), 0);
  for (const auto& node : ghd.nodes)
    for (auto f : node.alpha) {
      if (f >= model.num_factors()) return false;
      ++count[f];
      if (std::find(node.lambda.begin(), node.lambda.end(), f) == node.lambda.end()) return false;
      const auto& scope = model.factor(f).scope();
      if (!std::includes(node.chi.begin(), node.chi.end(), scope.begin(), scope.end())) return false;
    }
  return std::all_of(count.begin(), count.end(), [](std::size_t c) { return c == 1; });
}

double Rho::value() const {
  if (exact) return static_cast<double>(*exact);
  return std::pow(10.0, log10);
}

Rho rho(const Ghd& ghd, std::span<const std::uint32_t> domains) {
  Rho out;
  unsigned __int128 sum = 0;
  bool exact = true;
  double max_log = -INFINITY;
  std::vector<double> logs;
  for (const auto& node : ghd.nodes) {
    const auto size = TableSize::of_vars(node.chi, domains);
    logs.push_back(size.log10);
    max_log = std::max(max_log, size.log10);
    if (exact && size.exact) {
      const unsigned __int128 add = *size.exact;
      if (sum > ~static_cast<unsigned __int128>(0) - add)
        exact = false;
      else
        sum += add;
    } else {
      exact = false;
    }
  }
  if (exact) out.exact = sum;
  double acc = 0.0;
  for (auto l : logs) acc += std::pow(10.0, l - max_log);
  out.log10 = logs.empty() ? -INFINITY : max_log + std::log10(acc);
  return out;
}

}  // namespace sjt
