#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "padtree/errors.hpp"

namespace padtree {

// Oriented edge <tail, head> of a tree; carries the direction used by
// boundary-law values z(x, y).
struct DirectedEdge {
  int tail = 0;
  int head = 0;
  auto operator<=>(const DirectedEdge&) const = default;
};

std::string edge_key(const DirectedEdge& e);  // "x->y", the file format key

// Finite tree with integer vertex ids: connected, acyclic, at least 2
// vertices. Immutable after construction.
class TreeGraph {
 public:
  static TreeGraph from_edges(std::vector<std::pair<int, int>> edges);
  static TreeGraph from_vertices_and_edges(
      std::vector<int> vertices, std::vector<std::pair<int, int>> edges);

  const std::vector<int>& vertices() const { return vertices_; }
  // Canonical undirected edges (min, max), sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  // Both orientations of every edge, sorted.
  std::vector<DirectedEdge> directed_edges() const;

  bool has_vertex(int v) const;
  const std::vector<int>& neighbors(int v) const;  // sorted
  bool adjacent(int x, int y) const;
  int degree(int v) const;

  // When set, every vertex is treated as having this uniform total degree in
  // the infinite continuation; missing neighbors of a vertex are phantom
  // sites carried by boundary-law fields. Set to k+1 by build_cayley.
  std::optional<int> completion_degree;

 private:
  std::vector<int> vertices_;
  std::vector<std::pair<int, int>> edges_;
  std::map<int, std::vector<int>> adj_;
};

struct CayleySpec {
  int order_k = 2;
  int depth = 2;
  int root = 0;
};

inline constexpr long kDefaultVertexCap = 2000000;

// Depth-D truncation of the regular tree in which every vertex has k+1
// neighbors; ids are assigned breadth-first from the root. A chain of
// 2*depth+1 vertices for k = 1.
TreeGraph build_cayley(const CayleySpec& spec,
                       long vertex_cap = kDefaultVertexCap);

// Nonempty connected set of vertices of a host tree.
class Volume {
 public:
  Volume(const TreeGraph& tree, std::vector<int> members);

  const std::vector<int>& members() const { return members_; }  // sorted
  bool contains(int v) const;

 private:
  std::vector<int> members_;
};

// Exterior neighbors of the volume, sorted.
std::vector<int> boundary(const TreeGraph& tree, const Volume& lambda);
// Members of the volume having a neighbor outside it, sorted.
std::vector<int> interior_boundary(const TreeGraph& tree,
                                   const Volume& lambda);
// Volume together with its boundary, sorted.
std::vector<int> closure(const TreeGraph& tree, const Volume& lambda);
// The unique neighbor inside the volume of a boundary vertex x.
int unique_inner_neighbor(const TreeGraph& tree, const Volume& lambda, int x);

// Vertex sequence of a longest path in the tree, deterministic: both BFS
// sweeps break distance ties toward smaller ids, and the returned path
// starts at its smaller endpoint.
std::vector<int> diameter_path(const TreeGraph& tree);

enum class EdgeClass { Core, Crossing, Outside };

// Identified truncation of a regular tree inside a host tree, with every
// host edge classified relative to the identified core.
struct CayleyEmbedding {
  int k = 1;
  int depth = 0;
  int root = 0;
  std::set<int> core;
  std::map<std::pair<int, int>, EdgeClass> classes;  // canonical edge keys

  bool in_core(int v) const { return core.count(v) > 0; }
  EdgeClass classify(int x, int y) const;
};

// Finds a subtree isomorphic to the depth-D truncation of the order-k
// regular tree and classifies every edge of the host; NoEmbedding when no
// such subtree exists. Deterministic: smallest feasible root id, branches
// by descending supported depth then ascending id.
CayleyEmbedding embed_cayley(const TreeGraph& tree, int k, int depth);

}  // namespace padtree
