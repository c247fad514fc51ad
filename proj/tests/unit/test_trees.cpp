#include <doctest.h>

#include <set>

#include "mbo/trees.hpp"

using namespace mbo;

TEST_CASE("tree counts follow the double factorial") {
    CHECK(enumerate_trees(1).size() == 1);
    CHECK(enumerate_trees(2).size() == 3);
    CHECK(enumerate_trees(3).size() == 15);
    CHECK(tree_count(1) == 1);
    CHECK(tree_count(2) == 3);
    CHECK(tree_count(3) == 15);
    // index-function space: 7^J multiplier choices per tree
    auto U = [](int J) {
        long long p = tree_count(J);
        for (int j = 0; j < J; ++j) p *= 7;
        return p;
    };
    CHECK(U(1) == 7);
    CHECK(U(2) == 147);
    CHECK(U(3) == 5145);
    CHECK_THROWS_AS(enumerate_trees(4), GenerationTooLarge);
    CHECK(enumerate_trees(4, 4).size() == 105);
}

TEST_CASE("tree structure invariants") {
    for (int J = 1; J <= 3; ++J) {
        for (const auto& t : enumerate_trees(J)) {
            CHECK(t.generation == J);
            CHECK(t.node_count() == 5 * J + 1);
            CHECK(static_cast<int>(t.parent_order.size()) == J);
            CHECK(static_cast<int>(t.weight_leaves().size()) == 2 * J);
            CHECK(static_cast<int>(t.state_leaves().size()) == 2 * J + 1);

            // exactly one root
            int roots = 0;
            for (const auto& nd : t.nodes)
                if (nd.parent < 0) ++roots;
            CHECK(roots == 1);

            // internal nodes have five children; slots 2 and 4 stay leaves
            for (int p : t.parent_order) {
                const auto& nd = t.nodes[static_cast<size_t>(p)];
                CHECK(nd.internal());
                for (int s = 1; s <= 5; ++s) {
                    const auto& ch = t.nodes[static_cast<size_t>(nd.child[s - 1])];
                    CHECK(ch.parent == p);
                    CHECK(ch.slot == s);
                    if (s == 2 || s == 4) CHECK(!ch.internal());
                }
            }

            // parent numbering is monotone along the partial order
            for (size_t j1 = 0; j1 < t.parent_order.size(); ++j1)
                for (size_t j2 = 0; j2 < t.parent_order.size(); ++j2)
                    if (t.is_descendant(t.parent_order[j2], t.parent_order[j1]))
                        CHECK(j1 <= j2);
        }
        // trees are pairwise distinct
        std::set<std::vector<int>> shapes;
        for (const auto& t : enumerate_trees(J)) {
            std::vector<int> sig;
            for (const auto& nd : t.nodes) sig.push_back(nd.parent);
            shapes.insert(sig);
        }
        CHECK(shapes.size() == static_cast<size_t>(tree_count(J)));
    }
}

TEST_CASE("index functions validate the summation constraint") {
    const auto trees = enumerate_trees(2);
    const auto& t = trees.front();
    IndexFunction f;
    f.tree = &t;
    f.n.assign(t.nodes.size(), 0);
    // fill leaves, then parents bottom-up (parent_order is top-down)
    for (int j = static_cast<int>(t.parent_order.size()) - 1; j >= 0; --j) {
        const int p = t.parent_order[static_cast<size_t>(j)];
        const auto& nd = t.nodes[static_cast<size_t>(p)];
        long long acc = 0;
        for (int ci = 0; ci < 5; ++ci) {
            const auto& child = t.nodes[static_cast<size_t>(nd.child[ci])];
            if (!child.internal()) f.n[static_cast<size_t>(nd.child[ci])] = ci - 2;
            acc += f.n[static_cast<size_t>(nd.child[ci])];
        }
        f.n[static_cast<size_t>(p)] = acc;
    }
    CHECK(f.valid());
    (void)f.phi_at_parent(1);  // evaluates without issue
    f.n[0] += 1;
    CHECK(!f.valid());
}
