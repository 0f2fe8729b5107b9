#include "marstab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace marstab {

int EdgeMatrix::couple_of_woman(int w) const {
  for (int c = 0; c < n_couples; ++c)
    if (wife[c] == w) return c;
  throw std::out_of_range("woman " + std::to_string(w) + " not in edge matrix");
}

std::vector<int> PathOfRemarriages::men() const {
  std::vector<int> out;
  for (const PairKey& e : edges)
    if (e.man != PairKey::kEmpty) out.push_back(e.man);
  return out;
}

double path_weight(const PathOfRemarriages& path, const EdgeMatrix& edges) {
  double sum = 0.0;
  for (const PairKey& e : path.edges) sum += edges.at(e);
  return sum;
}

bool Coalition::rematches_to_single() const {
  for (const auto& [a, b] : rematch)
    if (b.is_empty()) return true;
  return false;
}

bool coalition_is_valid(const Coalition& coalition) {
  std::set<AgentId> member_set(coalition.members.begin(), coalition.members.end());
  if (member_set.size() != coalition.members.size()) return false;
  for (const AgentId& a : coalition.members) {
    if (a.is_empty()) return false;  // ∅ is represented as a rematch target
    auto it = coalition.rematch.find(a);
    if (it == coalition.rematch.end()) return false;
    const AgentId& b = it->second;
    if (b.is_empty()) continue;
    if (b.side == a.side) return false;
    if (!member_set.count(b)) return false;
    auto back = coalition.rematch.find(b);
    if (back == coalition.rematch.end() || !(back->second == a)) return false;
  }
  for (const auto& [a, b] : coalition.rematch)
    if (!member_set.count(a)) return false;
  return true;
}

bool coalition_is_permissible(const Coalition& coalition, const Matching& matching,
                              const CommittedSet& committed) {
  std::set<AgentId> member_set(coalition.members.begin(), coalition.members.end());
  for (const AgentId& a : coalition.members) {
    int couple = a.side == Side::Man ? a.index : matching.husband_of(a.index);
    if (!committed.is_committed(couple)) continue;
    AgentId spouse = a.side == Side::Man ? AgentId::woman(matching.wife_of(a.index))
                                         : AgentId::man(matching.husband_of(a.index));
    if (!member_set.count(spouse)) return false;
  }
  return true;
}

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_len(const Vec& v, int len, const char* what) {
  if (static_cast<int>(v.size()) != len)
    throw DimensionMismatch(std::string(what) + ": length " + std::to_string(v.size()) +
                            ", expected " + std::to_string(len));
}

}  // namespace

double edge_weight(const Market& mk, const AllocationCandidate& cand, const PairKey& key) {
  double s = 1.0;
  if (cand.s) {
    auto it = cand.s->find(key);
    if (it != cand.s->end()) s = it->second;
  }
  const double income_term = mk.y.at(key) * s;

  if (key.is_cross()) {
    const int cm = key.man;                        // couple of the man
    const int cw = mk.couple_of_woman(key.woman);  // couple of the woman
    const Vec& p = mk.p.at(key);
    check_len(p, mk.n_private, "private price");
    check_len(cand.q_m[cm], mk.n_private, "q_m");
    check_len(cand.q_w[cw], mk.n_private, "q_w");
    const Vec& Pm = cand.Pm.at(key);
    const Vec& Pw = cand.Pw.at(key);
    check_len(Pm, mk.n_public, "Pm");
    check_len(Pw, mk.n_public, "Pw");
    double a = 0.0;
    for (int k = 0; k < mk.n_private; ++k) a += p[k] * (cand.q_m[cm][k] + cand.q_w[cw][k]);
    a += dot(Pm, mk.Q_obs[cm]) + dot(Pw, mk.Q_obs[cw]);
    return a - income_term;
  }
  if (key.man_single()) {
    const int c = key.man;
    const Vec& p = mk.p.at(key);
    check_len(p, mk.n_private, "private price");
    check_len(cand.q_m[c], mk.n_private, "q_m");
    return dot(p, cand.q_m[c]) + dot(mk.P.at(key), mk.Q_obs[c]) - income_term;
  }
  const int c = mk.couple_of_woman(key.woman);
  const Vec& p = mk.p.at(key);
  check_len(p, mk.n_private, "private price");
  check_len(cand.q_w[c], mk.n_private, "q_w");
  return dot(p, cand.q_w[c]) + dot(mk.P.at(key), mk.Q_obs[c]) - income_term;
}

EdgeMatrix build_edge_matrix(const Market& mk, const AllocationCandidate& cand,
                             double tolerance) {
  EdgeMatrix em;
  em.n_couples = mk.n_couples();
  em.tolerance = tolerance;
  em.wife.resize(em.n_couples);
  for (int c = 0; c < em.n_couples; ++c) em.wife[c] = mk.wife_of(c);
  for (const PairKey& k : potential_pairs(mk)) em.weights[k] = edge_weight(mk, cand, k);
  return em;
}

bool path_is_permissible(const PathOfRemarriages& path, const CommittedSet& committed) {
  if (path.is_cycle) return true;
  if (path.is_single_option()) return !committed.is_committed(path.first_couple());
  return !committed.is_committed(path.first_couple()) &&
         !committed.is_committed(path.last_couple());
}

namespace {

PathOfRemarriages single_option_structure(int couple, const PairKey& edge) {
  PathOfRemarriages p;
  p.couples = {couple};
  p.edges = {edge};
  p.is_cycle = false;
  return p;
}

PathOfRemarriages from_vertex_walk(const std::vector<int>& vertices, const EdgeMatrix& em,
                                   bool cycle) {
  PathOfRemarriages p;
  p.couples = vertices;
  p.is_cycle = cycle;
  for (size_t i = 0; i + 1 < vertices.size(); ++i)
    p.edges.push_back(em.cross_edge(vertices[i], vertices[i + 1]));
  return p;
}

/// Reduces a vertex walk containing one distinguished strict edge to a simple
/// path or cycle that still contains it. Splicing out a loop that does not
/// contain the strict edge is always safe; a loop around the strict edge is
/// itself a valid cycle structure.
PathOfRemarriages reduce_walk(std::vector<int> verts, size_t strict_edge,
                              const EdgeMatrix& em) {
  for (;;) {
    std::map<int, size_t> seen;
    bool repeated = false;
    size_t i = 0, j = 0;
    for (size_t k = 0; k < verts.size(); ++k) {
      auto it = seen.find(verts[k]);
      if (it != seen.end()) {
        i = it->second;
        j = k;
        repeated = true;
        break;
      }
      seen[verts[k]] = k;
    }
    if (!repeated) return from_vertex_walk(verts, em, false);
    // Edge t spans vertices (t, t+1).
    if (strict_edge >= i && strict_edge < j) {
      std::vector<int> cyc(verts.begin() + i, verts.begin() + j + 1);
      return from_vertex_walk(cyc, em, true);
    }
    verts.erase(verts.begin() + i, verts.begin() + j);
    if (strict_edge >= j) strict_edge -= (j - i);
  }
}

std::optional<std::vector<int>> bfs_path(const std::vector<std::vector<int>>& adj, int from,
                                         int to) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> pred(n, -2);
  std::deque<int> queue{from};
  pred[from] = -1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (int v : adj[u])
      if (pred[v] == -2) {
        pred[v] = u;
        queue.push_back(v);
      }
  }
  if (pred[to] == -2) return std::nullopt;
  std::vector<int> path;
  for (int v = to; v != -1; v = pred[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<PathOfRemarriages> find_consistency_structure(const EdgeMatrix& em,
                                                            const CommittedSet& committed) {
  const int n = em.n_couples;
  const double eps = em.tolerance;

  // Subgraph of weakly nonpositive cross edges (a ≤ ε).
  std::vector<std::vector<int>> adj(n), radj(n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      if (em.at(em.cross_edge(u, v)) <= eps) {
        adj[u].push_back(v);
        radj[v].push_back(u);
      }
    }

  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      if (em.at(em.cross_edge(u, v)) > -eps) continue;  // need a strict edge

      // Cycle: v reaches u inside the subgraph.
      if (auto back = bfs_path(adj, v, u)) {
        std::vector<int> verts{u};
        verts.insert(verts.end(), back->begin(), back->end());  // u,v,...,u
        return from_vertex_walk(verts, em, true);
      }
      // Open path: nc → u and v → nc inside the subgraph.
      std::optional<std::vector<int>> head;  // nc,...,u
      for (int s = 0; s < n && !head; ++s) {
        if (committed.is_committed(s)) continue;
        if (auto p = bfs_path(adj, s, u)) head = std::move(p);
      }
      if (!head) continue;
      std::optional<std::vector<int>> tail;  // v,...,nc
      for (int t = 0; t < n && !tail; ++t) {
        if (committed.is_committed(t)) continue;
        if (auto p = bfs_path(adj, v, t)) tail = std::move(p);
      }
      if (!tail) continue;

      std::vector<int> walk = *head;                          // ...,u
      size_t strict = walk.size() - 1;                        // edge (u,v)
      walk.insert(walk.end(), tail->begin(), tail->end());    // u,v,...,nc
      return reduce_walk(std::move(walk), strict, em);
    }
  }
  return std::nullopt;
}

std::optional<PathOfRemarriages> find_monotonicity_structure(const EdgeMatrix& em,
                                                             const CommittedSet& committed) {
  const int n = em.n_couples;
  const double eps = em.tolerance;
  // Hub vertex n ties all non-committed couples to a common potential; a
  // negative cycle through it is an open path with non-committed endpoints.
  bool any_nc = false;
  for (int c = 0; c < n; ++c)
    if (!committed.is_committed(c)) any_nc = true;
  const int V = n + (any_nc ? 1 : 0);
  const int hub = n;

  struct Arc {
    int from, to;
    double w;
  };
  std::vector<Arc> arcs;
  // Shift keeps structures with Σ ≤ −ε detectable as strictly negative cycles.
  const double shift = eps / (V + 1);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) arcs.push_back({u, v, em.at(em.cross_edge(u, v)) + shift});
  if (any_nc)
    for (int c = 0; c < n; ++c)
      if (!committed.is_committed(c)) {
        arcs.push_back({hub, c, shift});
        arcs.push_back({c, hub, shift});
      }

  std::vector<double> dist(V, 0.0);  // virtual source at distance 0 everywhere
  std::vector<int> pred(V, -1);
  int updated = -1;
  for (int it = 0; it <= V; ++it) {
    updated = -1;
    for (const Arc& a : arcs) {
      if (dist[a.from] + a.w < dist[a.to] - 1e-12) {
        dist[a.to] = dist[a.from] + a.w;
        pred[a.to] = a.from;
        updated = a.to;
      }
    }
    if (updated == -1) return std::nullopt;  // converged: no negative cycle
  }

  // Walk predecessors V times to land on the cycle, then collect it.
  int x = updated;
  for (int i = 0; i < V; ++i) x = pred[x];
  std::vector<int> cyc;
  for (int v = x;; v = pred[v]) {
    cyc.push_back(v);
    if (v == x && cyc.size() > 1) break;
  }
  cyc.pop_back();                           // drop duplicate of x
  std::reverse(cyc.begin(), cyc.end());     // pred order -> forward order

  auto hub_pos = std::find(cyc.begin(), cyc.end(), hub);
  if (any_nc && hub_pos != cyc.end()) {
    std::rotate(cyc.begin(), hub_pos, cyc.end());
    cyc.erase(cyc.begin());  // open path: the couples after the hub
    return from_vertex_walk(cyc, em, false);
  }
  cyc.push_back(cyc.front());
  return from_vertex_walk(cyc, em, true);
}

}  // namespace

std::optional<PathOfRemarriages> find_blocking_structure(const EdgeMatrix& em,
                                                         const CommittedSet& committed,
                                                         BlockingMode mode) {
  const double eps = em.tolerance;
  // Individual-rationality exits for non-committed couples.
  for (int c = 0; c < em.n_couples; ++c) {
    if (committed.is_committed(c)) continue;
    PairKey km = man_single(c);
    if (em.at(km) <= -eps) return single_option_structure(c, km);
    PairKey kw = woman_single(em.wife[c]);
    if (em.at(kw) <= -eps) return single_option_structure(c, kw);
  }
  if (em.n_couples < 2) return std::nullopt;
  return mode == BlockingMode::Consistency ? find_consistency_structure(em, committed)
                                           : find_monotonicity_structure(em, committed);
}

PathOfRemarriages coalition_to_path(const Coalition& coalition, const Matching& matching,
                                    const CommittedSet& committed) {
  if (!coalition_is_valid(coalition))
    throw MalformedCoalition("rematching is not a valid pairing on the members");
  if (coalition.rematches_to_single())
    throw MalformedCoalition("rematching sends a member to the single option");
  if (!coalition_is_permissible(coalition, matching, committed))
    throw NotPermissible("a committed member's spouse is missing from the coalition");

  std::set<int> men_in, women_in;
  for (const AgentId& a : coalition.members)
    (a.side == Side::Man ? men_in : women_in).insert(a.index);
  if (men_in.empty()) throw MalformedCoalition("coalition contains no rematched pair");
  for (int m : men_in)
    if (coalition.rematch.at(AgentId::man(m)).index == matching.wife_of(m))
      throw MalformedCoalition("member rematched to their current spouse");

  auto rematch_of = [&](int m) { return coalition.rematch.at(AgentId::man(m)).index; };

  // Case 1: some man's current wife is outside the coalition -> open path.
  int seed = -1;
  for (int m : men_in)
    if (!women_in.count(matching.wife_of(m))) {
      seed = m;
      break;  // lowest index (set is ordered)
    }

  std::vector<int> verts;
  bool cycle = false;
  if (seed >= 0) {
    int cur = seed;
    verts.push_back(cur);
    for (;;) {
      int w = rematch_of(cur);
      int next = matching.husband_of(w);
      verts.push_back(next);
      if (!men_in.count(next)) break;  // exited the coalition
      cur = next;
    }
  } else {
    // Case 2: all spouses inside -> the rematch walk is a cycle.
    int start = *men_in.begin();
    int cur = start;
    verts.push_back(cur);
    for (;;) {
      int w = rematch_of(cur);
      int next = matching.husband_of(w);
      verts.push_back(next);
      if (next == start) break;
      cur = next;
    }
    cycle = true;
  }

  PathOfRemarriages path;
  path.couples = verts;
  path.is_cycle = cycle;
  for (size_t i = 0; i + 1 < verts.size(); ++i)
    path.edges.push_back(cross_pair(verts[i], matching.wife_of(verts[i + 1])));
  return path;
}

std::vector<PathOfRemarriages> enumerate_permissible_paths(int n_couples,
                                                           const std::vector<int>& wife,
                                                           const CommittedSet& committed,
                                                           int max_len) {
  EdgeMatrix em;  // only used for edge-key construction
  em.n_couples = n_couples;
  em.wife = wife;

  // Open paths: all ordered simple vertex sequences with non-committed ends.
  std::vector<PathOfRemarriages> paths;
  std::vector<PathOfRemarriages> cycles;
  std::vector<int> seq;
  std::vector<bool> vused(n_couples, false);
  auto dfs_path = [&](auto&& self) -> void {
    int first = seq.front();
    int cur = seq.back();
    if (seq.size() >= 2 && !committed.is_committed(first) && !committed.is_committed(cur))
      paths.push_back(from_vertex_walk(seq, em, false));
    if (static_cast<int>(seq.size()) - 1 >= max_len) return;
    for (int next = 0; next < n_couples; ++next) {
      if (vused[next]) continue;
      vused[next] = true;
      seq.push_back(next);
      self(self);
      seq.pop_back();
      vused[next] = false;
    }
  };
  for (int s = 0; s < n_couples; ++s) {
    if (committed.is_committed(s)) continue;
    vused[s] = true;
    seq.push_back(s);
    dfs_path(dfs_path);
    seq.pop_back();
    vused[s] = false;
  }

  // Cycles: canonical representative starts at the minimum vertex.
  auto dfs_cycle = [&](auto&& self, int start) -> void {
    if (seq.size() >= 2 && static_cast<int>(seq.size()) <= max_len) {
      std::vector<int> cyc = seq;
      cyc.push_back(start);
      cycles.push_back(from_vertex_walk(cyc, em, true));
    }
    if (static_cast<int>(seq.size()) >= max_len) return;
    for (int next = start + 1; next < n_couples; ++next) {
      if (vused[next]) continue;
      vused[next] = true;
      seq.push_back(next);
      self(self, start);
      seq.pop_back();
      vused[next] = false;
    }
  };
  for (int s = 0; s < n_couples; ++s) {
    vused[s] = true;
    seq.push_back(s);
    for (int second = s + 1; second < n_couples; ++second) {
      vused[second] = true;
      seq.push_back(second);
      dfs_cycle(dfs_cycle, s);
      seq.pop_back();
      vused[second] = false;
    }
    seq.pop_back();
    vused[s] = false;
  }

  std::vector<PathOfRemarriages> result;
  auto order_key = [](const PathOfRemarriages& p) {
    return std::make_tuple(p.edges.size(), !p.is_cycle, p.couples);
  };
  result.reserve(paths.size() + cycles.size());
  for (auto& p : paths) result.push_back(std::move(p));
  for (auto& c : cycles) result.push_back(std::move(c));
  std::sort(result.begin(), result.end(),
            [&](const auto& a, const auto& b) { return order_key(a) < order_key(b); });
  return result;
}

std::vector<PathOfRemarriages> enumerate_permissible_paths(const Market& mk, int max_len) {
  std::vector<int> wife(mk.n_couples());
  for (int c = 0; c < mk.n_couples(); ++c) wife[c] = mk.wife_of(c);
  return enumerate_permissible_paths(mk.n_couples(), wife, mk.committed, max_len);
}

}  // namespace marstab
