#include "mbo/trees.hpp"

#include <string>

namespace mbo {

std::vector<int> Tree::weight_leaves() const {
    std::vector<int> out;
    for (int p : parent_order) {
        out.push_back(nodes[static_cast<size_t>(p)].child[1]);
        out.push_back(nodes[static_cast<size_t>(p)].child[3]);
    }
    return out;
}

std::vector<int> Tree::state_leaves() const {
    std::vector<int> out;
    for (int i = 0; i < node_count(); ++i) {
        const auto& nd = nodes[static_cast<size_t>(i)];
        if (!nd.internal() && !(nd.slot == 2 || nd.slot == 4)) out.push_back(i);
    }
    return out;
}

bool Tree::is_descendant(int a, int of) const {
    while (a >= 0) {
        if (a == of) return true;
        a = nodes[static_cast<size_t>(a)].parent;
    }
    return false;
}

namespace {

void expand_leaf(Tree& t, int leaf) {
    t.parent_order.push_back(leaf);
    for (int s = 1; s <= 5; ++s) {
        Tree::Node child;
        child.parent = leaf;
        child.slot = s;
        t.nodes[static_cast<size_t>(leaf)].child[static_cast<size_t>(s - 1)] =
            t.node_count();
        t.nodes.push_back(child);
    }
    ++t.generation;
}

}  // namespace

std::vector<Tree> enumerate_trees(int J, int j_max) {
    if (J < 1) throw ConfigInvalid("enumerate_trees: generation must be >= 1");
    if (J > j_max)
        throw GenerationTooLarge("enumerate_trees: generation " + std::to_string(J) +
                                 " exceeds limit " + std::to_string(j_max));
    Tree root;
    root.nodes.push_back(Tree::Node{});
    std::vector<Tree> current{root};
    for (int gen = 1; gen <= J; ++gen) {
        std::vector<Tree> next;
        for (const auto& t : current) {
            // new parents attach at state leaves only (weight leaves stay leaves)
            std::vector<int> sites =
                gen == 1 ? std::vector<int>{0} : t.state_leaves();
            for (int site : sites) {
                Tree grown = t;
                expand_leaf(grown, site);
                next.push_back(std::move(grown));
            }
        }
        current = std::move(next);
    }
    return current;
}

bool IndexFunction::valid() const {
    if (tree == nullptr || n.size() != tree->nodes.size()) return false;
    for (int p : tree->parent_order) {
        long long sum = 0;
        for (int c : tree->nodes[static_cast<size_t>(p)].child)
            sum += n[static_cast<size_t>(c)];
        if (sum != n[static_cast<size_t>(p)]) return false;
    }
    return true;
}

long long IndexFunction::phi_at_parent(int j) const {
    const int p = tree->parent_order[static_cast<size_t>(j - 1)];
    const auto& nd = tree->nodes[static_cast<size_t>(p)];
    auto sq = [](long long m) { return m * (m >= 0 ? m : -m); };
    return sq(n[static_cast<size_t>(p)]) - sq(n[static_cast<size_t>(nd.child[0])]) -
           sq(n[static_cast<size_t>(nd.child[2])]) - sq(n[static_cast<size_t>(nd.child[4])]);
}

}  // namespace mbo
