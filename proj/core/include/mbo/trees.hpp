// Rooted 5-ary trees indexing the normal-form expansion.  A tree of
// generation J has 5J+1 nodes; each of the J internal nodes has exactly five
// children, children 2 and 4 are always leaves (they carry gauge-exponential
// weights), and internal nodes are numbered compatibly with the partial
// order.  Generation J+1 trees arise by expanding one odd-position leaf.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mbo/errors.hpp"

namespace mbo {

struct Tree {
    struct Node {
        int parent = -1;                      // -1 for the root
        int slot = 0;                         // position among siblings, 1..5
        std::array<int, 5> child{-1, -1, -1, -1, -1};
        bool internal() const { return child[0] >= 0; }
    };

    int generation = 0;
    std::vector<Node> nodes;        // node 0 is the root
    std::vector<int> parent_order;  // internal nodes, a_1 .. a_J

    int node_count() const { return static_cast<int>(nodes.size()); }
    // T^infty_1: second and fourth children of internal nodes (weight slots).
    std::vector<int> weight_leaves() const;
    // T^infty_2: the remaining leaves (state slots).
    std::vector<int> state_leaves() const;
    bool is_descendant(int a, int of) const;
};

// All trees of the given generation; count is prod_{j=1..J} (2j-1).
// Throws GenerationTooLarge beyond j_max.
std::vector<Tree> enumerate_trees(int J, int j_max = 3);

inline long long tree_count(int J) {
    long long c = 1;
    for (int j = 1; j <= J; ++j) c *= 2 * j - 1;
    return c;
}

// Frequency assignment on a tree: one integer per node, each internal node's
// value equal to the sum over its children.
struct IndexFunction {
    const Tree* tree = nullptr;
    std::vector<long long> n;

    bool valid() const;
    // Phase of the j-th internal node (1-based j).
    long long phi_at_parent(int j) const;
};

}  // namespace mbo
