#include "padtree/tree.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace padtree {

std::string edge_key(const DirectedEdge& e) {
  return std::to_string(e.tail) + "->" + std::to_string(e.head);
}

TreeGraph TreeGraph::from_edges(std::vector<std::pair<int, int>> edges) {
  std::vector<int> vertices;
  for (const auto& [x, y] : edges) {
    vertices.push_back(x);
    vertices.push_back(y);
  }
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()),
                 vertices.end());
  return from_vertices_and_edges(std::move(vertices), std::move(edges));
}

TreeGraph TreeGraph::from_vertices_and_edges(
    std::vector<int> vertices, std::vector<std::pair<int, int>> edges) {
  TreeGraph t;
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end()) {
    throw DomainError("duplicate vertex id");
  }
  if (vertices.size() < 2) {
    throw DomainError("a tree needs at least 2 vertices");
  }
  for (auto& [x, y] : edges) {
    if (x == y) throw DomainError("self-loop at vertex " + std::to_string(x));
    if (x > y) std::swap(x, y);
    if (!std::binary_search(vertices.begin(), vertices.end(), x) ||
        !std::binary_search(vertices.begin(), vertices.end(), y)) {
      throw DomainError("edge endpoint is not a listed vertex");
    }
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw DomainError("duplicate edge");
  }
  if (edges.size() + 1 != vertices.size()) {
    throw DomainError("edge count must be vertex count minus one");
  }
  t.vertices_ = std::move(vertices);
  t.edges_ = std::move(edges);
  for (int v : t.vertices_) t.adj_[v];
  for (const auto& [x, y] : t.edges_) {
    t.adj_[x].push_back(y);
    t.adj_[y].push_back(x);
  }
  for (auto& [v, nv] : t.adj_) std::sort(nv.begin(), nv.end());
  // Connectivity; acyclicity follows from the edge count.
  std::set<int> seen{t.vertices_.front()};
  std::deque<int> work{t.vertices_.front()};
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    for (int w : t.adj_[v]) {
      if (seen.insert(w).second) work.push_back(w);
    }
  }
  if (seen.size() != t.vertices_.size()) {
    throw DomainError("edge list does not describe a connected graph");
  }
  return t;
}

std::vector<DirectedEdge> TreeGraph::directed_edges() const {
  std::vector<DirectedEdge> out;
  out.reserve(2 * edges_.size());
  for (const auto& [x, y] : edges_) {
    out.push_back({x, y});
    out.push_back({y, x});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool TreeGraph::has_vertex(int v) const { return adj_.count(v) > 0; }

const std::vector<int>& TreeGraph::neighbors(int v) const {
  auto it = adj_.find(v);
  if (it == adj_.end()) {
    throw DomainError("unknown vertex " + std::to_string(v));
  }
  return it->second;
}

bool TreeGraph::adjacent(int x, int y) const {
  const auto& nx = neighbors(x);
  return std::binary_search(nx.begin(), nx.end(), y);
}

int TreeGraph::degree(int v) const {
  return static_cast<int>(neighbors(v).size());
}

TreeGraph build_cayley(const CayleySpec& spec, long vertex_cap) {
  if (spec.order_k < 1) throw DomainError("order k must be >= 1");
  if (spec.depth < 0) throw DomainError("depth must be >= 0");
  if (spec.depth == 0) {
    throw DomainError("depth-0 truncation has no edges; need depth >= 1");
  }
  std::vector<std::pair<int, int>> edges;
  std::vector<int> frontier{spec.root};
  long count = 1;
  int next_id = spec.root + 1;
  for (int d = 1; d <= spec.depth; ++d) {
    const int children = (d == 1) ? spec.order_k + 1 : spec.order_k;
    std::vector<int> next_frontier;
    for (int v : frontier) {
      for (int c = 0; c < children; ++c) {
        if (++count > vertex_cap) {
          throw ResourceLimit("tree exceeds vertex cap of " +
                              std::to_string(vertex_cap));
        }
        edges.push_back({v, next_id});
        next_frontier.push_back(next_id);
        ++next_id;
      }
    }
    frontier = std::move(next_frontier);
  }
  TreeGraph t = TreeGraph::from_edges(std::move(edges));
  t.completion_degree = spec.order_k + 1;
  return t;
}

Volume::Volume(const TreeGraph& tree, std::vector<int> members)
    : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()),
                 members_.end());
  if (members_.empty()) throw DomainError("volume must be nonempty");
  for (int v : members_) {
    if (!tree.has_vertex(v)) {
      throw DomainError("volume member " + std::to_string(v) +
                        " is not a tree vertex");
    }
  }
  std::set<int> seen{members_.front()};
  std::deque<int> work{members_.front()};
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    for (int w : tree.neighbors(v)) {
      if (contains(w) && seen.insert(w).second) work.push_back(w);
    }
  }
  if (seen.size() != members_.size()) {
    throw DomainError("volume must be connected");
  }
}

bool Volume::contains(int v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

std::vector<int> boundary(const TreeGraph& tree, const Volume& lambda) {
  std::set<int> out;
  for (int v : lambda.members()) {
    for (int w : tree.neighbors(v)) {
      if (!lambda.contains(w)) out.insert(w);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<int> interior_boundary(const TreeGraph& tree,
                                   const Volume& lambda) {
  std::vector<int> out;
  for (int v : lambda.members()) {
    for (int w : tree.neighbors(v)) {
      if (!lambda.contains(w)) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

std::vector<int> closure(const TreeGraph& tree, const Volume& lambda) {
  std::vector<int> out = lambda.members();
  for (int v : boundary(tree, lambda)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

int unique_inner_neighbor(const TreeGraph& tree, const Volume& lambda,
                          int x) {
  if (lambda.contains(x)) {
    throw DomainError("vertex " + std::to_string(x) +
                      " lies inside the volume, not on its boundary");
  }
  int found = -1;
  int hits = 0;
  for (int w : tree.neighbors(x)) {
    if (lambda.contains(w)) {
      found = w;
      ++hits;
    }
  }
  if (hits == 0) {
    throw DomainError("vertex " + std::to_string(x) +
                      " is not adjacent to the volume");
  }
  if (hits > 1) {
    throw Error("boundary vertex with several inner neighbors; volume "
                "connectivity is broken");
  }
  return found;
}

namespace {

// BFS distances; parents allow path reconstruction. Neighbor lists are
// sorted, so the first vertex found at maximal distance has the least id.
std::pair<int, std::map<int, int>> bfs_farthest(const TreeGraph& tree,
                                                int start) {
  std::map<int, int> parent{{start, start}};
  std::vector<int> frontier{start};
  int last_min = start;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int w : tree.neighbors(u)) {
        if (!parent.count(w)) {
          parent[w] = u;
          next.push_back(w);
        }
      }
    }
    if (!next.empty()) last_min = *std::min_element(next.begin(), next.end());
    frontier = std::move(next);
  }
  return {last_min, parent};
}

}  // namespace

std::vector<int> diameter_path(const TreeGraph& tree) {
  const int a = bfs_farthest(tree, tree.vertices().front()).first;
  auto [b, parent] = bfs_farthest(tree, a);
  std::vector<int> path;
  for (int v = b; v != a; v = parent.at(v)) path.push_back(v);
  path.push_back(a);
  if (path.front() > path.back()) std::reverse(path.begin(), path.end());
  return path;
}

EdgeClass CayleyEmbedding::classify(int x, int y) const {
  auto it = classes.find({std::min(x, y), std::max(x, y)});
  if (it == classes.end()) throw DomainError("edge not classified");
  return it->second;
}

namespace {

// Supported k-ary continuation depth below head when entered from tail.
int branch_depth(const TreeGraph& tree, int k, int tail, int head,
                 std::map<DirectedEdge, int>& memo) {
  auto it = memo.find({tail, head});
  if (it != memo.end()) return it->second;
  std::vector<int> child_depths;
  for (int w : tree.neighbors(head)) {
    if (w == tail) continue;
    child_depths.push_back(branch_depth(tree, k, head, w, memo));
  }
  int result = 0;
  if (static_cast<int>(child_depths.size()) >= k) {
    std::sort(child_depths.rbegin(), child_depths.rend());
    result = 1 + child_depths[k - 1];
  }
  memo[{tail, head}] = result;
  return result;
}

}  // namespace

CayleyEmbedding embed_cayley(const TreeGraph& tree, int k, int depth) {
  if (k < 1) throw DomainError("order k must be >= 1");
  if (depth < 1) throw DomainError("embedding depth must be >= 1");
  std::map<DirectedEdge, int> memo;
  for (int r : tree.vertices()) {
    std::vector<std::pair<int, int>> branches;  // (-supported depth, head id)
    for (int w : tree.neighbors(r)) {
      branches.push_back({-branch_depth(tree, k, r, w, memo), w});
    }
    std::sort(branches.begin(), branches.end());
    // branch_depth counts levels below the first-level vertex, so a branch
    // supporting the full depth scores depth - 1.
    if (static_cast<int>(branches.size()) < k + 1 ||
        -branches[k].first < depth - 1) {
      continue;
    }
    CayleyEmbedding emb;
    emb.k = k;
    emb.depth = depth;
    emb.root = r;
    emb.core.insert(r);
    // Grow the selected branches outward, keeping k children per level.
    std::deque<std::tuple<int, int, int>> work;  // tail, head, remaining depth
    for (int i = 0; i <= k; ++i) {
      work.push_back({r, branches[i].second, depth});
    }
    while (!work.empty()) {
      auto [tail, head, d] = work.front();
      work.pop_front();
      emb.core.insert(head);
      if (d <= 1) continue;
      std::vector<std::pair<int, int>> kids;
      for (int w : tree.neighbors(head)) {
        if (w == tail) continue;
        kids.push_back({-branch_depth(tree, k, head, w, memo), w});
      }
      std::sort(kids.begin(), kids.end());
      for (int i = 0; i < k; ++i) {
        work.push_back({head, kids[i].second, d - 1});
      }
    }
    for (const auto& [x, y] : tree.edges()) {
      const bool cx = emb.in_core(x);
      const bool cy = emb.in_core(y);
      emb.classes[{x, y}] = cx && cy   ? EdgeClass::Core
                            : cx || cy ? EdgeClass::Crossing
                                       : EdgeClass::Outside;
    }
    return emb;
  }
  throw NoEmbedding("no order-" + std::to_string(k) + " depth-" +
                    std::to_string(depth) + " regular subtree found");
}

}  // namespace padtree
