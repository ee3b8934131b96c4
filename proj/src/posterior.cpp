#include "ssreg/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ssreg/errors.hpp"
#include "ssreg/evidence.hpp"
#include "ssreg/linalg.hpp"
#include "ssreg/subset_scan.hpp"

namespace ssreg {

double ModelPosterior::mass_of(const ModelIndex& xi) const {
    const ModelEntry* e = find(xi);
    return e == nullptr ? 0.0 : e->mass;
}

const ModelEntry* ModelPosterior::find(const ModelIndex& xi) const {
    auto it = index_.find(xi);
    return it == index_.end() ? nullptr : &entries[it->second];
}

std::vector<ModelEntry> ModelPosterior::sorted_entries() const {
    std::vector<ModelEntry> out = entries;
    std::sort(out.begin(), out.end(), [](const ModelEntry& a, const ModelEntry& b) {
        if (a.mass != b.mass) return a.mass > b.mass;
        return a.xi < b.xi;
    });
    return out;
}

ModelPosterior exact_posterior(const ProblemInstance& instance, const PriorSpec& prior,
                               int max_size, std::uint64_t cap) {
    if (!prior.conjugate()) {
        throw NonConjugateError("exact_posterior needs a conjugate prior configuration");
    }
    const int p = instance.p;
    if (max_size < 0 || max_size > p) {
        throw std::invalid_argument("exact_posterior needs 0 <= max_size <= p");
    }
    const std::uint64_t total = subset_count_at_most(p, max_size);
    require_budget(total, cap);

    ModelPosterior post;
    post.max_size = max_size;

    std::vector<int> pool(p);
    std::iota(pool.begin(), pool.end(), 1);

    // rank-deficient branches are pruned: every superset of a rank-deficient
    // model is rank-deficient and carries mass 0 as well
    scan_subsets(pool, 0, max_size, [&](const std::vector<int>& members) {
        ModelIndex xi(members);
        if (!is_full_rank(instance.X, xi).full_rank) return false;
        ModelEntry e;
        e.xi = xi;
        e.log_evidence = log_model_evidence(xi, instance, prior);
        e.log_prior = prior.selection.log_mass(xi);
        post.entries.push_back(std::move(e));
        return true;
    });
    post.num_rank_deficient = total - post.entries.size();

    double m = -std::numeric_limits<double>::infinity();
    for (const ModelEntry& e : post.entries) m = std::max(m, e.log_evidence + e.log_prior);
    if (!std::isfinite(m)) throw std::runtime_error("exact_posterior: no full-rank model found");
    double acc = 0.0;
    for (const ModelEntry& e : post.entries) acc += std::exp(e.log_evidence + e.log_prior - m);
    post.log_normalizer = m + std::log(acc);
    for (std::size_t i = 0; i < post.entries.size(); ++i) {
        ModelEntry& e = post.entries[i];
        e.mass = std::exp(e.log_evidence + e.log_prior - post.log_normalizer);
        post.index_.emplace(e.xi, static_cast<int>(i));
    }

    // every truncated model's evidence is below the universal bound, so the
    // missing mass is at most tail * exp(bound) against the kept normalizer
    double tail = prior.selection.tail(max_size);
    if (tail > 0.0) {
        double log_missing = std::log(tail) + log_evidence_upper_bound(instance.n, prior.variance);
        double log_total = std::max(log_missing, post.log_normalizer) +
                           std::log(std::exp(std::min(log_missing, post.log_normalizer) -
                                             std::max(log_missing, post.log_normalizer)) +
                                    1.0);
        post.truncated_mass_bound = std::exp(log_missing - log_total);
    }
    return post;
}

} // namespace ssreg
